use rand::Rng;

use super::{GpTree, Primitive, TerminalSet, FUNCTIONS};

/// Ramped half-and-half initialization.
///
/// The target depth is drawn uniformly from `2..=max_depth` (or is `max_depth`
/// itself when that is below 2), then the tree is grown with the full or the
/// grow method with equal probability.
pub fn random_tree<R: Rng + ?Sized>(terms: &TerminalSet, max_depth: usize, rng: &mut R) -> GpTree {
    let low = max_depth.min(2);
    let depth = rng.gen_range(low..=max_depth);
    let full = rng.gen_bool(0.5);
    let mut nodes = Vec::new();
    build(terms, depth, 0, full, rng, &mut nodes);
    GpTree::from_prefix(nodes).expect("generator emits well-formed prefix")
}

/// Grow-method subtree of depth at most `max_depth`, used by mutation.
pub fn random_subtree<R: Rng + ?Sized>(terms: &TerminalSet, max_depth: usize, rng: &mut R) -> GpTree {
    let mut nodes = Vec::new();
    build(terms, max_depth, 0, false, rng, &mut nodes);
    GpTree::from_prefix(nodes).expect("generator emits well-formed prefix")
}

fn build<R: Rng + ?Sized>(
    terms: &TerminalSet,
    limit: usize,
    depth: usize,
    full: bool,
    rng: &mut R,
    out: &mut Vec<Primitive>,
) {
    assert!(!terms.is_empty(), "terminal set must not be empty");
    let prim = if depth >= limit {
        random_terminal(terms, rng)
    } else if full {
        FUNCTIONS[rng.gen_range(0..FUNCTIONS.len())]
    } else {
        let pick = rng.gen_range(0..FUNCTIONS.len() + terms.len());
        if pick < FUNCTIONS.len() {
            FUNCTIONS[pick]
        } else {
            terms.nth(pick - FUNCTIONS.len())
        }
    };
    out.push(prim);
    for _ in 0..prim.arity() {
        build(terms, limit, depth + 1, full, rng, out);
    }
}

fn random_terminal<R: Rng + ?Sized>(terms: &TerminalSet, rng: &mut R) -> Primitive {
    terms.nth(rng.gen_range(0..terms.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn depth_one_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let terms = TerminalSet::new(2, 2);
        for _ in 0..500 {
            let t = random_tree(&terms, 1, &mut rng);
            assert!(t.depth() <= 1);
            if t.depth() == 1 {
                assert!(t.nodes()[1..].iter().all(|p| p.is_terminal()));
            }
        }
    }

    #[test]
    fn depth_bound_and_leaf_kinds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let terms = TerminalSet::new(2, 4);
        let (mut vars, mut seeds) = (0usize, 0usize);
        for _ in 0..10_000 {
            let t = random_tree(&terms, 5, &mut rng);
            assert!(t.depth() <= 5);
            t.validate(&terms).unwrap();
            for p in t.nodes() {
                match p {
                    Primitive::Var(_) => vars += 1,
                    Primitive::Seed(_) => seeds += 1,
                    _ => {}
                }
            }
        }
        assert!(vars > 0 && seeds > 0);
    }

    #[test]
    fn deterministic_replay() {
        let terms = TerminalSet::new(2, 2);
        let a: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            (0..50).map(|_| random_tree(&terms, 5, &mut rng)).collect()
        };
        let b: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            (0..50).map(|_| random_tree(&terms, 5, &mut rng)).collect()
        };
        assert_eq!(a, b);
    }
}
