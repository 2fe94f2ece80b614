//! GP genotype: prefix-ordered expression trees over the Boolean function set
//! `{OR, XOR, AND, AND2, XNOR, NOT, IF}` and two terminal kinds, additional
//! variables `v_j` and seed functions `f_i`.

mod eval;
mod generate;
mod text;
mod variation;

use std::fmt;

pub use eval::{eval_abstract, eval_tree, LeafTables};
pub use generate::{random_subtree, random_tree};
pub use text::{parse_tree, parse_tree_list, serialize_tree};
pub use variation::{crossover, subtree_mutation, CrossoverKind, MAX_VARIATION_RETRIES};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Primitive {
    Or,
    Xor,
    And,
    /// `a AND (NOT b)`.
    And2,
    Xnor,
    Not,
    /// `IF(a, b, c)` is `b` when `a` holds, `c` otherwise.
    If,
    Var(u8),
    Seed(u8),
}

/// The seven operators, in the order used for uniform sampling.
pub const FUNCTIONS: [Primitive; 7] = [
    Primitive::Or,
    Primitive::Xor,
    Primitive::And,
    Primitive::And2,
    Primitive::Xnor,
    Primitive::Not,
    Primitive::If,
];

impl Primitive {
    pub fn arity(self) -> usize {
        match self {
            Primitive::Or | Primitive::Xor | Primitive::And | Primitive::And2 | Primitive::Xnor => 2,
            Primitive::Not => 1,
            Primitive::If => 3,
            Primitive::Var(_) | Primitive::Seed(_) => 0,
        }
    }

    pub fn is_terminal(self) -> bool {
        self.arity() == 0
    }

    pub fn terminal(self) -> Option<Terminal> {
        match self {
            Primitive::Var(j) => Some(Terminal::Var(j)),
            Primitive::Seed(i) => Some(Terminal::Seed(i)),
            _ => None,
        }
    }

    /// Infix/prefix keyword used by the text format.
    pub fn keyword(self) -> &'static str {
        match self {
            Primitive::Or => "OR",
            Primitive::Xor => "XOR",
            Primitive::And => "AND",
            Primitive::And2 => "AND2",
            Primitive::Xnor => "XNOR",
            Primitive::Not => "NOT",
            Primitive::If => "IF",
            Primitive::Var(_) | Primitive::Seed(_) => "",
        }
    }
}

/// A leaf of a construction: additional variable `v_j` or seed `f_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Terminal {
    Var(u8),
    Seed(u8),
}

impl Terminal {
    pub fn primitive(self) -> Primitive {
        match self {
            Terminal::Var(j) => Primitive::Var(j),
            Terminal::Seed(i) => Primitive::Seed(i),
        }
    }
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Terminal::Var(j) => write!(f, "v{j}"),
            Terminal::Seed(i) => write!(f, "f{i}"),
        }
    }
}

/// Terminal set of a GP context: `vars` additional variables and `seeds` seed terminals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct TerminalSet {
    pub vars: usize,
    pub seeds: usize,
}

impl TerminalSet {
    pub fn new(vars: usize, seeds: usize) -> Self {
        Self { vars, seeds }
    }

    pub fn len(&self) -> usize {
        self.vars + self.seeds
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Terminals in canonical order `v_0.., f_0..`.
    pub fn terminals(&self) -> Vec<Terminal> {
        let vars = (0..self.vars).map(|j| Terminal::Var(j as u8));
        let seeds = (0..self.seeds).map(|i| Terminal::Seed(i as u8));
        vars.chain(seeds).collect()
    }

    pub fn contains(&self, t: Terminal) -> bool {
        match t {
            Terminal::Var(j) => usize::from(j) < self.vars,
            Terminal::Seed(i) => usize::from(i) < self.seeds,
        }
    }

    pub(crate) fn nth(&self, idx: usize) -> Primitive {
        if idx < self.vars {
            Primitive::Var(idx as u8)
        } else {
            Primitive::Seed((idx - self.vars) as u8)
        }
    }
}

/// Nested form of a tree, convenient for structural rewrites.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GpNode {
    pub prim: Primitive,
    pub children: Vec<GpNode>,
}

impl GpNode {
    pub fn leaf(prim: Primitive) -> Self {
        Self { prim, children: Vec::new() }
    }

    pub fn new(prim: Primitive, children: Vec<GpNode>) -> Self {
        debug_assert_eq!(prim.arity(), children.len());
        Self { prim, children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(GpNode::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }

    fn write_prefix(&self, out: &mut Vec<Primitive>) {
        out.push(self.prim);
        for c in &self.children {
            c.write_prefix(out);
        }
    }
}

/// Expression tree stored in prefix order. Depth counts edges, root at 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GpTree {
    nodes: Vec<Primitive>,
    depth: usize,
}

impl GpTree {
    /// Validates the arity structure of a prefix sequence.
    pub fn from_prefix(nodes: Vec<Primitive>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Precondition("empty tree".into()));
        }
        let mut open = 1usize;
        for (i, p) in nodes.iter().enumerate() {
            if open == 0 {
                return Err(Error::Precondition(format!("trailing nodes after position {i}")));
            }
            open = open - 1 + p.arity();
        }
        if open != 0 {
            return Err(Error::Precondition("prefix sequence ends with open operands".into()));
        }
        let depth = prefix_depth(&nodes);
        Ok(Self { nodes, depth })
    }

    pub fn leaf(t: Terminal) -> Self {
        Self { nodes: vec![t.primitive()], depth: 0 }
    }

    pub fn from_node(node: &GpNode) -> Self {
        let mut nodes = Vec::with_capacity(node.size());
        node.write_prefix(&mut nodes);
        let depth = node.depth();
        Self { nodes, depth }
    }

    pub fn to_node(&self) -> GpNode {
        fn build(nodes: &[Primitive], pos: &mut usize) -> GpNode {
            let prim = nodes[*pos];
            *pos += 1;
            let children = (0..prim.arity()).map(|_| build(nodes, pos)).collect();
            GpNode { prim, children }
        }
        let mut pos = 0;
        build(&self.nodes, &mut pos)
    }

    pub fn nodes(&self) -> &[Primitive] {
        &self.nodes
    }

    pub fn root(&self) -> Primitive {
        self.nodes[0]
    }

    /// Node count, every node weighted equally.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// One past the last node of the subtree rooted at `i`.
    pub fn subtree_end(&self, i: usize) -> usize {
        let mut open = 1usize;
        let mut j = i;
        while open > 0 {
            open = open - 1 + self.nodes[j].arity();
            j += 1;
        }
        j
    }

    /// Depth of every node, in prefix order.
    pub fn node_depths(&self) -> Vec<usize> {
        let mut depths = Vec::with_capacity(self.nodes.len());
        let mut stack: Vec<(usize, usize)> = Vec::new(); // (depth, remaining children)
        for p in &self.nodes {
            let d = stack.last().map_or(0, |&(d, _)| d + 1);
            depths.push(d);
            if let Some(top) = stack.last_mut() {
                top.1 -= 1;
            }
            while matches!(stack.last(), Some(&(_, 0))) {
                stack.pop();
            }
            if p.arity() > 0 {
                stack.push((d, p.arity()));
            }
        }
        depths
    }

    /// Replaces the subtree at `i` with `donor` (a prefix slice of a complete subtree).
    pub fn replace_subtree(&self, i: usize, donor: &[Primitive]) -> GpTree {
        let end = self.subtree_end(i);
        let mut nodes = Vec::with_capacity(self.nodes.len() - (end - i) + donor.len());
        nodes.extend_from_slice(&self.nodes[..i]);
        nodes.extend_from_slice(donor);
        nodes.extend_from_slice(&self.nodes[end..]);
        let depth = prefix_depth(&nodes);
        GpTree { nodes, depth }
    }

    pub fn subtree(&self, i: usize) -> &[Primitive] {
        &self.nodes[i..self.subtree_end(i)]
    }

    /// Distinct terminals that occur syntactically.
    pub fn terminals_present(&self) -> std::collections::BTreeSet<Terminal> {
        self.nodes.iter().filter_map(|p| p.terminal()).collect()
    }

    /// Checks every leaf against the terminal set.
    pub fn validate(&self, terms: &TerminalSet) -> Result<()> {
        for p in &self.nodes {
            if let Some(t) = p.terminal() {
                if !terms.contains(t) {
                    return Err(Error::TerminalRange {
                        name: t.to_string(),
                        vars: terms.vars,
                        seeds: terms.seeds,
                    });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for GpTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_tree(self))
    }
}

fn prefix_depth(nodes: &[Primitive]) -> usize {
    let mut max = 0;
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for p in nodes {
        let d = stack.last().map_or(0, |&(d, _)| d + 1);
        max = max.max(d);
        if let Some(top) = stack.last_mut() {
            top.1 -= 1;
        }
        while matches!(stack.last(), Some(&(_, 0))) {
            stack.pop();
        }
        if p.arity() > 0 {
            stack.push((d, p.arity()));
        }
    }
    max
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_validation() {
        use Primitive::*;
        assert!(GpTree::from_prefix(vec![Xor, Var(0)]).is_err());
        assert!(GpTree::from_prefix(vec![Var(0), Var(1)]).is_err());
        assert!(GpTree::from_prefix(vec![]).is_err());
        let t = GpTree::from_prefix(vec![If, Var(0), Seed(0), Xor, Var(1), Seed(1)]).unwrap();
        assert_eq!(t.size(), 6);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.node_depths(), vec![0, 1, 1, 1, 2, 2]);
        assert_eq!(t.subtree_end(3), 6);
        assert_eq!(GpTree::from_node(&t.to_node()), t);
    }

    #[test]
    fn replace_updates_depth() {
        use Primitive::*;
        let t = GpTree::from_prefix(vec![Not, Var(0)]).unwrap();
        let r = t.replace_subtree(1, &[Not, Not, Seed(0)]);
        assert_eq!(r.nodes(), &[Not, Not, Not, Seed(0)]);
        assert_eq!(r.depth(), 3);
    }
}
