//! Crossover and mutation operators.
//!
//! Every operator produces one child. Offspring deeper than the bound are
//! regenerated up to [`MAX_VARIATION_RETRIES`] times, after which a copy of the
//! first parent is returned.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{random_subtree, GpNode, GpTree, TerminalSet};

pub const MAX_VARIATION_RETRIES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossoverKind {
    /// Random subtree of the second parent replaces a random subtree of the first.
    SimpleTree,
    /// Walks the common region; interior nodes of equal arity take either
    /// parent's label, boundary nodes take either parent's whole subtree.
    Uniform,
    /// Like simple tree crossover, but the inserted subtree is chosen so that
    /// its expected size equals the size of the removed one.
    SizeFair,
    /// Single crossover point drawn from the common region (positions reached
    /// through ancestors of equal arity in both parents).
    OnePoint,
    /// Crossover point restricted to positions with identical root paths in
    /// both parents (strong context preservation).
    ContextPreserving,
}

impl CrossoverKind {
    pub const ALL: [CrossoverKind; 5] = [
        CrossoverKind::SimpleTree,
        CrossoverKind::Uniform,
        CrossoverKind::SizeFair,
        CrossoverKind::OnePoint,
        CrossoverKind::ContextPreserving,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CrossoverKind::SimpleTree => "simple",
            CrossoverKind::Uniform => "uniform",
            CrossoverKind::SizeFair => "sizefair",
            CrossoverKind::OnePoint => "onepoint",
            CrossoverKind::ContextPreserving => "context",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

pub fn crossover<R: Rng + ?Sized>(
    a: &GpTree,
    b: &GpTree,
    kind: CrossoverKind,
    max_depth: usize,
    rng: &mut R,
) -> GpTree {
    for _ in 0..MAX_VARIATION_RETRIES {
        let child = match kind {
            CrossoverKind::SimpleTree => simple_tree(a, b, rng),
            CrossoverKind::Uniform => uniform(a, b, rng),
            CrossoverKind::SizeFair => size_fair(a, b, rng),
            CrossoverKind::OnePoint => path_swap(a, b, true, rng),
            CrossoverKind::ContextPreserving => path_swap(a, b, false, rng),
        };
        if child.depth() <= max_depth {
            return child;
        }
    }
    a.clone()
}

fn simple_tree<R: Rng + ?Sized>(a: &GpTree, b: &GpTree, rng: &mut R) -> GpTree {
    let i = rng.gen_range(0..a.size());
    let j = rng.gen_range(0..b.size());
    a.replace_subtree(i, b.subtree(j))
}

fn size_fair<R: Rng + ?Sized>(a: &GpTree, b: &GpTree, rng: &mut R) -> GpTree {
    let i = rng.gen_range(0..a.size());
    let removed = a.subtree_end(i) - i;
    let mut smaller = Vec::new();
    let mut equal = Vec::new();
    let mut larger = Vec::new();
    for j in 0..b.size() {
        let s = b.subtree_end(j) - j;
        if s < removed {
            smaller.push((j, s));
        } else if s == removed {
            equal.push((j, s));
        } else if s <= 2 * removed + 1 {
            larger.push((j, s));
        }
    }
    let mean = |v: &[(usize, usize)]| v.iter().map(|&(_, s)| s as f64).sum::<f64>() / v.len() as f64;
    // equal-size insertion with probability 1/3 when available; the rest is split
    // between smaller and larger so the expected size change is zero
    let p_equal = if equal.is_empty() { 0.0 } else { 1.0 / 3.0 };
    let (p_small, p_large) = match (smaller.is_empty(), larger.is_empty()) {
        (false, false) => {
            let below = removed as f64 - mean(&smaller);
            let above = mean(&larger) - removed as f64;
            let rest = 1.0 - p_equal;
            (rest * above / (above + below), rest * below / (above + below))
        }
        (false, true) if equal.is_empty() => (1.0, 0.0),
        (true, false) if equal.is_empty() => (0.0, 1.0),
        _ => (0.0, 0.0),
    };
    let roll: f64 = rng.gen();
    let bucket = if roll < p_small {
        &smaller
    } else if roll < p_small + p_large {
        &larger
    } else if !equal.is_empty() {
        &equal
    } else if !smaller.is_empty() {
        &smaller
    } else {
        &larger
    };
    let &(j, _) = bucket.choose(rng).expect("at least one leaf of size 1 qualifies");
    a.replace_subtree(i, b.subtree(j))
}

/// Positions reachable in both trees by the same child-index path.
/// With `same_arity`, descent continues only below nodes of equal arity.
fn common_paths(a: &GpNode, b: &GpNode, same_arity: bool, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(path.clone());
    if same_arity && a.prim.arity() != b.prim.arity() {
        return;
    }
    let shared = a.children.len().min(b.children.len());
    for k in 0..shared {
        path.push(k);
        common_paths(&a.children[k], &b.children[k], same_arity, path, out);
        path.pop();
    }
}

fn at_path<'a>(node: &'a GpNode, path: &[usize]) -> &'a GpNode {
    path.iter().fold(node, |n, &k| &n.children[k])
}

fn at_path_mut<'a>(node: &'a mut GpNode, path: &[usize]) -> &'a mut GpNode {
    path.iter().fold(node, |n, &k| &mut n.children[k])
}

fn path_swap<R: Rng + ?Sized>(a: &GpTree, b: &GpTree, same_arity: bool, rng: &mut R) -> GpTree {
    let (na, nb) = (a.to_node(), b.to_node());
    let mut paths = Vec::new();
    common_paths(&na, &nb, same_arity, &mut Vec::new(), &mut paths);
    let path = paths.choose(rng).expect("root is always common");
    let mut child = na;
    *at_path_mut(&mut child, path) = at_path(&nb, path).clone();
    GpTree::from_node(&child)
}

fn uniform<R: Rng + ?Sized>(a: &GpTree, b: &GpTree, rng: &mut R) -> GpTree {
    fn walk<R: Rng + ?Sized>(x: &GpNode, y: &GpNode, rng: &mut R) -> GpNode {
        let arity = x.prim.arity();
        if arity > 0 && arity == y.prim.arity() {
            let prim = if rng.gen_bool(0.5) { x.prim } else { y.prim };
            let children = x.children.iter().zip(&y.children).map(|(cx, cy)| walk(cx, cy, rng)).collect();
            GpNode { prim, children }
        } else if rng.gen_bool(0.5) {
            x.clone()
        } else {
            y.clone()
        }
    }
    GpTree::from_node(&walk(&a.to_node(), &b.to_node(), rng))
}

/// Replaces a uniformly chosen node with a fresh grow-method subtree.
pub fn subtree_mutation<R: Rng + ?Sized>(
    t: &GpTree,
    terms: &TerminalSet,
    max_depth: usize,
    rng: &mut R,
) -> GpTree {
    let depths = t.node_depths();
    for _ in 0..MAX_VARIATION_RETRIES {
        let i = rng.gen_range(0..t.size());
        let room = max_depth.saturating_sub(depths[i]);
        let fresh = random_subtree(terms, room, rng);
        let child = t.replace_subtree(i, fresh.nodes());
        if child.depth() <= max_depth {
            return child;
        }
    }
    t.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{eval_abstract, parse_tree, random_tree, Primitive, Terminal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_point_on_leaves_picks_a_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = GpTree::leaf(Terminal::Var(0));
        let b = GpTree::leaf(Terminal::Seed(1));
        for _ in 0..20 {
            let c = crossover(&a, &b, CrossoverKind::OnePoint, 5, &mut rng);
            assert!(c == a || c == b);
        }
    }

    #[test]
    fn self_crossover_stays_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let terms = TerminalSet::new(2, 2);
        for _ in 0..500 {
            let a = random_tree(&terms, 5, &mut rng);
            let c = crossover(&a, &a, CrossoverKind::SimpleTree, 5, &mut rng);
            assert!(c.depth() <= 5);
            c.validate(&terms).unwrap();
        }
    }

    #[test]
    fn closure_over_all_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let terms = TerminalSet::new(2, 4);
        let pool: Vec<_> = (0..100).map(|_| random_tree(&terms, 5, &mut rng)).collect();
        for i in 0..10_000 {
            let a = &pool[rng.gen_range(0..pool.len())];
            let b = &pool[rng.gen_range(0..pool.len())];
            let kind = CrossoverKind::ALL[i % 5];
            let c = crossover(a, b, kind, 5, &mut rng);
            assert!(c.depth() <= 5, "{kind:?}");
            c.validate(&terms).unwrap();
            let m = subtree_mutation(&c, &terms, 5, &mut rng);
            assert!(m.depth() <= 5);
            m.validate(&terms).unwrap();
            assert_eq!(GpTree::from_prefix(m.nodes().to_vec()).unwrap().depth(), m.depth());
        }
    }

    #[test]
    fn uniform_keeps_common_labels_from_parents() {
        let terms = TerminalSet::new(2, 2);
        let a = parse_tree("(v0 XOR f0)", &terms).unwrap();
        let b = parse_tree("(v1 AND f1)", &terms).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let c = crossover(&a, &b, CrossoverKind::Uniform, 5, &mut rng);
            let n = c.nodes();
            assert!(matches!(n[0], Primitive::Xor | Primitive::And));
            assert!(matches!(n[1], Primitive::Var(0) | Primitive::Var(1)));
            assert!(matches!(n[2], Primitive::Seed(0) | Primitive::Seed(1)));
        }
    }

    #[test]
    fn context_preserving_respects_paths() {
        let terms = TerminalSet::new(2, 2);
        let a = parse_tree("NOT(v0)", &terms).unwrap();
        let b = parse_tree("(f0 XOR f1)", &terms).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let c = crossover(&a, &b, CrossoverKind::ContextPreserving, 5, &mut rng);
            let s = c.to_string();
            assert!(s == "NOT(f0)" || s == "(f0 XOR f1)", "{s}");
            let o = crossover(&a, &b, CrossoverKind::OnePoint, 5, &mut rng);
            assert_eq!(o.to_string(), "(f0 XOR f1)");
        }
    }

    #[test]
    fn size_fair_inserts_bounded_subtrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let terms = TerminalSet::new(2, 2);
        for _ in 0..500 {
            let a = random_tree(&terms, 5, &mut rng);
            let b = random_tree(&terms, 5, &mut rng);
            let c = crossover(&a, &b, CrossoverKind::SizeFair, 64, &mut rng);
            assert!(c.size() <= 2 * a.size() + 1);
        }
    }

    #[test]
    fn mutation_of_single_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let only = TerminalSet::new(1, 0);
        let t = GpTree::leaf(Terminal::Var(0));
        assert_eq!(subtree_mutation(&t, &only, 0, &mut rng), t);
        let terms = TerminalSet::new(2, 2);
        for _ in 0..100 {
            let m = subtree_mutation(&t, &terms, 3, &mut rng);
            assert!(m.depth() <= 3);
        }
    }

    #[test]
    fn crossover_deterministic() {
        let terms = TerminalSet::new(2, 2);
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let a = random_tree(&terms, 5, &mut rng);
            let b = random_tree(&terms, 5, &mut rng);
            CrossoverKind::ALL
                .iter()
                .map(|&k| crossover(&a, &b, k, 5, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
        let _ = eval_abstract(&run()[0], 2, 2).unwrap();
    }
}
