//! Post-hoc analysis of evolved constructions: abstract truth tables,
//! essential terminals, equivalence classes, simplification and size statistics.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfun::TruthTable;
use crate::error::{Error, Result};
use crate::gp::{eval_abstract, GpNode, GpTree, Primitive, Terminal};

/// Largest `s + k` accepted by [`abstractize`].
pub const MAX_ABSTRACT_INPUTS: usize = 16;
/// Largest `s + k` accepted by the brute-force equivalence check.
pub const MAX_EQUIV_INPUTS: usize = 8;

/// A construction's truth table with every terminal as a free input.
///
/// Seed `f_i` is input bit `i`; variable `v_j` is input bit `s + k - 1 - j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbstractFunction {
    pub s: usize,
    pub k: usize,
    pub table: TruthTable,
}

impl AbstractFunction {
    pub fn from_table(s: usize, k: usize, table: TruthTable) -> Result<Self> {
        if s + k > MAX_ABSTRACT_INPUTS {
            return Err(Error::ArityBound { inputs: s + k, max: MAX_ABSTRACT_INPUTS });
        }
        if table.num_vars() as usize != s + k {
            return Err(Error::LengthMismatch { expected: 1 << (s + k), found: table.len() });
        }
        Ok(Self { s, k, table })
    }

    pub fn arity(&self) -> usize {
        self.s + self.k
    }

    /// Terminals in input order `v_0..v_{k-1}, f_0..f_{s-1}`.
    pub fn inputs(&self) -> Vec<Terminal> {
        (0..self.k as u8).map(Terminal::Var).chain((0..self.s as u8).map(Terminal::Seed)).collect()
    }

    pub fn input_bit(&self, t: Terminal) -> usize {
        bit_of(self.s, self.k, t)
    }

    fn terminal_at(&self, bit: usize) -> Terminal {
        if bit < self.s {
            Terminal::Seed(bit as u8)
        } else {
            Terminal::Var((self.s + self.k - 1 - bit) as u8)
        }
    }

    fn depends_on_bit(&self, bit: usize) -> bool {
        let m = 1usize << bit;
        (0..self.table.len()).any(|x| x & m == 0 && self.table.get(x) != self.table.get(x | m))
    }
}

fn bit_of(s: usize, k: usize, t: Terminal) -> usize {
    match t {
        Terminal::Seed(i) => usize::from(i),
        Terminal::Var(j) => s + k - 1 - usize::from(j),
    }
}

pub fn abstractize(tree: &GpTree, s: usize, k: usize) -> Result<AbstractFunction> {
    if s + k > MAX_ABSTRACT_INPUTS {
        return Err(Error::ArityBound { inputs: s + k, max: MAX_ABSTRACT_INPUTS });
    }
    Ok(AbstractFunction { s, k, table: eval_abstract(tree, s, k)? })
}

/// Terminals whose two cofactors differ.
pub fn essential_terminals(a: &AbstractFunction) -> BTreeSet<Terminal> {
    (0..a.arity()).filter(|&b| a.depends_on_bit(b)).map(|b| a.terminal_at(b)).collect()
}

/// Number of essential seed terminals.
pub fn seeds_used(a: &AbstractFunction) -> usize {
    essential_terminals(a).iter().filter(|t| matches!(t, Terminal::Seed(_))).count()
}

/// Drops inessential inputs, renumbering the remaining ones within their kind
/// in increasing index order. A constant keeps its first input.
pub fn restrict_to_essential(a: &AbstractFunction) -> AbstractFunction {
    let mut ess = essential_terminals(a);
    if ess.is_empty() {
        ess.extend(a.inputs().into_iter().next());
    }
    let seeds: Vec<Terminal> = ess.iter().copied().filter(|t| matches!(t, Terminal::Seed(_))).collect();
    let vars: Vec<Terminal> = ess.iter().copied().filter(|t| matches!(t, Terminal::Var(_))).collect();
    let (s2, k2) = (seeds.len(), vars.len());
    let mut old_bits = vec![0usize; s2 + k2];
    for (i, t) in seeds.iter().enumerate() {
        old_bits[bit_of(s2, k2, Terminal::Seed(i as u8))] = a.input_bit(*t);
    }
    for (j, t) in vars.iter().enumerate() {
        old_bits[bit_of(s2, k2, Terminal::Var(j as u8))] = a.input_bit(*t);
    }
    let table = TruthTable::from_fn((s2 + k2) as u32, |y| {
        let x = old_bits.iter().enumerate().fold(0usize, |x, (nb, &ob)| x | ((y >> nb & 1) << ob));
        a.table.get(x)
    })
    .expect("arity within bound");
    AbstractFunction { s: s2, k: k2, table }
}

/// Adds inessential inputs so the function has shape `(s, k)`; existing
/// terminals keep their indices.
pub fn pad_to(a: &AbstractFunction, s: usize, k: usize) -> Result<AbstractFunction> {
    if s < a.s || k < a.k {
        return Err(Error::SeedShape(format!("cannot pad ({},{}) down to ({s},{k})", a.s, a.k)));
    }
    if s + k > MAX_ABSTRACT_INPUTS {
        return Err(Error::ArityBound { inputs: s + k, max: MAX_ABSTRACT_INPUTS });
    }
    let moves: Vec<(usize, usize)> = a.inputs().into_iter().map(|t| (bit_of(s, k, t), a.input_bit(t))).collect();
    let table = TruthTable::from_fn((s + k) as u32, |y| {
        let x = moves.iter().fold(0usize, |x, &(nb, ob)| x | ((y >> nb & 1) << ob));
        a.table.get(x)
    })?;
    Ok(AbstractFunction { s, k, table })
}

/// Transformations under which two constructions count as equal.
/// Output negation is always allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct EquivRelation {
    /// Permute all inputs together instead of variables and seeds separately.
    pub joint: bool,
    /// Also allow negating any subset of inputs.
    pub input_negation: bool,
}

impl EquivRelation {
    pub const WITHIN_KIND: Self = Self { joint: false, input_negation: false };
    pub const JOINT: Self = Self { joint: true, input_negation: false };

    pub fn name(self) -> &'static str {
        match (self.joint, self.input_negation) {
            (false, false) => "kind",
            (true, false) => "joint",
            (false, true) => "kind+neg",
            (true, true) => "joint+neg",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        let r = match s {
            "kind" => (false, false),
            "joint" => (true, false),
            "kind+neg" => (false, true),
            "joint+neg" => (true, true),
            _ => return None,
        };
        Some(Self { joint: r.0, input_negation: r.1 })
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// All input-bit maps `new bit -> old bit` allowed by the relation.
fn bit_maps(s: usize, k: usize, joint: bool) -> Vec<Vec<usize>> {
    if joint {
        return permutations(&(0..s + k).collect::<Vec<_>>());
    }
    let seed_perms = permutations(&(0..s).collect::<Vec<_>>());
    let var_perms = permutations(&(s..s + k).collect::<Vec<_>>());
    let mut out = Vec::with_capacity(seed_perms.len() * var_perms.len());
    for sp in &seed_perms {
        for vp in &var_perms {
            out.push(sp.iter().chain(vp).copied().collect());
        }
    }
    out
}

/// Smallest transformed table, as words; equal for exactly the equivalent functions.
pub fn canonical_form(a: &AbstractFunction, rel: EquivRelation) -> Result<Vec<u64>> {
    let n = a.arity();
    if n > MAX_EQUIV_INPUTS {
        return Err(Error::ArityBound { inputs: n, max: MAX_EQUIV_INPUTS });
    }
    let size = 1usize << n;
    let masks = if rel.input_negation { size } else { 1 };
    let bits: Vec<bool> = (0..size).map(|x| a.table.get(x)).collect();
    let mut best: Option<Vec<u64>> = None;
    let mut words = vec![0u64; size.div_ceil(64)];
    let mut index = vec![0usize; size];
    for map in bit_maps(a.s, a.k, rel.joint) {
        for (y, slot) in index.iter_mut().enumerate() {
            *slot = map.iter().enumerate().fold(0usize, |x, (nb, &ob)| x | ((y >> nb & 1) << ob));
        }
        for mask in 0..masks {
            words.iter_mut().for_each(|w| *w = 0);
            for (y, &x) in index.iter().enumerate() {
                if bits[x ^ mask] {
                    words[y / 64] |= 1 << (y % 64);
                }
            }
            let tail = if size < 64 { (1u64 << size) - 1 } else { u64::MAX };
            let neg: Vec<u64> = words.iter().map(|w| !w & tail).collect();
            let cand = if neg < words { neg } else { words.clone() };
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    Ok(best.expect("at least the identity map"))
}

pub fn equivalent(a: &AbstractFunction, b: &AbstractFunction, rel: EquivRelation) -> Result<bool> {
    if (a.s, a.k) != (b.s, b.k) {
        return Err(Error::SeedShape(format!("shapes ({},{}) and ({},{}) differ", a.s, a.k, b.s, b.k)));
    }
    Ok(canonical_form(a, rel)? == canonical_form(b, rel)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceGraph {
    pub adjacency: Vec<Vec<bool>>,
    /// Node indices per class, classes ordered by their smallest member.
    pub classes: Vec<Vec<usize>>,
}

impl EquivalenceGraph {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn max_class_size(&self) -> usize {
        self.classes.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Square 0/1 grid, one row per line.
    pub fn grid(&self) -> String {
        let mut out = String::new();
        for row in &self.adjacency {
            let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Class index of every node.
    pub fn class_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.adjacency.len()];
        for (c, members) in self.classes.iter().enumerate() {
            for &m in members {
                out[m] = c;
            }
        }
        out
    }
}

/// Pairwise equivalence of already-abstracted functions.
pub fn equivalence_graph_of(fns: &[AbstractFunction], rel: EquivRelation) -> Result<EquivalenceGraph> {
    if let Some(a) = fns.first() {
        if let Some(b) = fns.iter().find(|b| (b.s, b.k) != (a.s, a.k)) {
            return Err(Error::SeedShape(format!("shapes ({},{}) and ({},{}) differ", a.s, a.k, b.s, b.k)));
        }
    }
    let canon = fns.par_iter().map(|f| canonical_form(f, rel)).collect::<Result<Vec<_>>>()?;
    let adjacency: Vec<Vec<bool>> = canon.iter().map(|a| canon.iter().map(|b| a == b).collect()).collect();
    let mut by_form: BTreeMap<&Vec<u64>, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, c) in canon.iter().enumerate() {
        let id = *by_form.entry(c).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[id].push(i);
    }
    Ok(EquivalenceGraph { adjacency, classes })
}

pub fn equivalence_graph(trees: &[GpTree], s: usize, k: usize, rel: EquivRelation) -> Result<EquivalenceGraph> {
    let fns = trees.iter().map(|t| abstractize(t, s, k)).collect::<Result<Vec<_>>>()?;
    equivalence_graph_of(&fns, rel)
}

/// Simplifies, abstracts, keeps only essential terminals and pads back to `(s, k)`.
pub fn normalize(tree: &GpTree, s: usize, k: usize, target_s: usize, target_k: usize) -> Result<AbstractFunction> {
    let simple = simplify(tree, s, k)?;
    let restricted = restrict_to_essential(&abstractize(&simple, s, k)?);
    pad_to(&restricted, target_s, target_k)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeStats {
    pub min: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: usize,
    pub values: Vec<usize>,
}

/// Quartiles use linear interpolation between order statistics.
pub fn size_stats(trees: &[GpTree]) -> Option<SizeStats> {
    stats_of(trees.iter().map(GpTree::size).collect())
}

pub fn stats_of(values: Vec<usize>) -> Option<SizeStats> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.clone();
    sorted.sort_unstable();
    let q = |p: f64| {
        let h = p * (sorted.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        sorted[lo] as f64 + (h - lo as f64) * (sorted[hi] as f64 - sorted[lo] as f64)
    };
    Some(SizeStats {
        min: sorted[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: *sorted.last().expect("non-empty"),
        values,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Expr {
    Const(bool),
    Lit(Terminal),
    Not(Box<Expr>),
    Bin(Primitive, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

use Expr::*;

fn not(e: Expr) -> Expr {
    Not(Box::new(e))
}

fn bin(op: Primitive, a: Expr, b: Expr) -> Expr {
    Bin(op, Box::new(a), Box::new(b))
}

fn ite(c: Expr, t: Expr, e: Expr) -> Expr {
    If(Box::new(c), Box::new(t), Box::new(e))
}

impl Expr {
    fn from_node(n: &GpNode, keep: &BTreeSet<Terminal>) -> Expr {
        let c = |i: usize| Expr::from_node(&n.children[i], keep);
        match n.prim {
            Primitive::Var(_) | Primitive::Seed(_) => {
                let t = n.prim.terminal().expect("leaf");
                if keep.contains(&t) {
                    Lit(t)
                } else {
                    Const(false)
                }
            }
            Primitive::Not => not(c(0)),
            Primitive::If => ite(c(0), c(1), c(2)),
            op => bin(op, c(0), c(1)),
        }
    }

    fn size(&self) -> usize {
        match self {
            Const(_) | Lit(_) => 1,
            Not(a) => 1 + a.size(),
            Bin(_, a, b) => 1 + a.size() + b.size(),
            If(c, t, e) => 1 + c.size() + t.size() + e.size(),
        }
    }

    fn substitute(self, lit: Terminal, value: bool) -> Expr {
        match self {
            Lit(t) if t == lit => Const(value),
            Const(_) | Lit(_) => self,
            Not(a) => not(a.substitute(lit, value)),
            Bin(op, a, b) => bin(op, a.substitute(lit, value), b.substitute(lit, value)),
            If(c, t, e) => ite(c.substitute(lit, value), t.substitute(lit, value), e.substitute(lit, value)),
        }
    }

    fn simplify(self) -> Expr {
        match self {
            Const(_) | Lit(_) => self,
            Not(a) => simplify_not(a.simplify()),
            Bin(op, a, b) => simplify_bin(op, a.simplify(), b.simplify()),
            If(c, t, e) => simplify_if(c.simplify(), t.simplify(), e.simplify()),
        }
    }

    fn to_node(&self, zero_leaf: Terminal) -> GpNode {
        match self {
            Const(v) => {
                let op = if *v { Primitive::Xnor } else { Primitive::Xor };
                let l = GpNode::leaf(zero_leaf.primitive());
                GpNode::new(op, vec![l.clone(), l])
            }
            Lit(t) => GpNode::leaf(t.primitive()),
            Not(a) => GpNode::new(Primitive::Not, vec![a.to_node(zero_leaf)]),
            Bin(op, a, b) => GpNode::new(*op, vec![a.to_node(zero_leaf), b.to_node(zero_leaf)]),
            If(c, t, e) => GpNode::new(Primitive::If, vec![c.to_node(zero_leaf), t.to_node(zero_leaf), e.to_node(zero_leaf)]),
        }
    }
}

fn simplify_not(a: Expr) -> Expr {
    match a {
        Const(v) => Const(!v),
        Not(inner) => *inner,
        other => not(other),
    }
}

fn strip_not(e: Expr) -> (Expr, bool) {
    match e {
        Not(inner) => (*inner, true),
        other => (other, false),
    }
}

fn simplify_bin(op: Primitive, a: Expr, b: Expr) -> Expr {
    use Primitive::{And, And2, Or, Xnor, Xor};
    match (op, &a, &b) {
        (Or, Const(true), _) | (Or, _, Const(true)) => return Const(true),
        (Or, Const(false), _) => return b,
        (Or, _, Const(false)) => return a,
        (And, Const(false), _) | (And, _, Const(false)) => return Const(false),
        (And, Const(true), _) => return b,
        (And, _, Const(true)) => return a,
        (And2, Const(false), _) | (And2, _, Const(true)) => return Const(false),
        (And2, _, Const(false)) => return a,
        (And2, Const(true), _) => return simplify_not(b),
        (Xor, Const(v), _) => return if *v { simplify_not(b) } else { b },
        (Xor, _, Const(v)) => return if *v { simplify_not(a) } else { a },
        (Xnor, Const(v), _) => return if *v { b } else { simplify_not(b) },
        (Xnor, _, Const(v)) => return if *v { a } else { simplify_not(a) },
        _ => {}
    }
    if a == b {
        return match op {
            Or | And => a,
            Xor | And2 => Const(false),
            Xnor => Const(true),
            _ => unreachable!("binary operator"),
        };
    }
    if matches!(op, Xor | Xnor) {
        let (a, na) = strip_not(a);
        let (b, nb) = strip_not(b);
        let flip = na ^ nb ^ (op == Xnor);
        let core = if a == b { Const(false) } else { bin(Xor, a, b) };
        return if flip { simplify_not(core) } else { core };
    }
    bin(op, a, b)
}

fn simplify_if(c: Expr, t: Expr, e: Expr) -> Expr {
    use Primitive::{And, And2, Or};
    match c {
        Const(true) => return t,
        Const(false) => return e,
        Not(inner) => return simplify_if(*inner, e, t),
        Lit(x) => {
            let t2 = t.clone().substitute(x, true).simplify();
            let e2 = e.clone().substitute(x, false).simplify();
            if t2 != t || e2 != e {
                return simplify_if(Lit(x), t2, e2);
            }
        }
        _ => {}
    }
    if t == e {
        return t;
    }
    match (&t, &e) {
        (Const(true), Const(false)) => c,
        (Const(false), Const(true)) => simplify_not(c),
        (Const(true), _) => simplify_bin(Or, c, e),
        (Const(false), _) => simplify_bin(And2, e, c),
        (_, Const(false)) => simplify_bin(And, c, t),
        (_, Const(true)) => simplify_not(simplify_bin(And2, c, t)),
        (Not(_), Not(_)) => {
            let (t, _) = strip_not(t);
            let (e, _) = strip_not(e);
            simplify_not(simplify_if(c, t, e))
        }
        _ => ite(c, t, e),
    }
}

/// Semantically identical tree (same abstract table) with constants folded,
/// IF branches specialized on a literal condition, negations reduced,
/// identity operands dropped and inessential terminals pruned.
/// Never larger than the input.
pub fn simplify(tree: &GpTree, s: usize, k: usize) -> Result<GpTree> {
    let before = abstractize(tree, s, k)?;
    let essential = essential_terminals(&before);
    let mut e = Expr::from_node(&tree.to_node(), &essential);
    loop {
        let next = e.clone().simplify();
        if next == e {
            break;
        }
        e = next;
    }
    let zero_leaf = tree.terminals_present().into_iter().next().expect("a tree has at least one leaf");
    let out = GpTree::from_node(&e.to_node(zero_leaf));
    let out = if out.size() <= tree.size() && e.size() <= tree.size() { out } else { tree.clone() };
    let after = abstractize(&out, s, k)?;
    assert_eq!(after.table, before.table, "simplify changed the semantics of {tree}");
    Ok(out)
}

/// Root is IF, its condition is a literal (possibly negated) and the size is
/// at most `max_size`.
pub fn is_simple_construction(tree: &GpTree, max_size: f64) -> bool {
    let node = tree.to_node();
    if node.prim != Primitive::If || tree.size() as f64 > max_size {
        return false;
    }
    let mut cond = &node.children[0];
    while cond.prim == Primitive::Not {
        cond = &cond.children[0];
    }
    cond.prim.is_terminal()
}

/// Index of the smallest tree meeting [`is_simple_construction`] with the
/// lower size quartile as bound; ties go to the earlier tree.
pub fn select_simplest(trees: &[GpTree]) -> Option<usize> {
    let stats = size_stats(trees)?;
    trees
        .iter()
        .enumerate()
        .filter(|(_, t)| is_simple_construction(t, stats.q1))
        .min_by_key(|(i, t)| (t.size(), *i))
        .map(|(i, _)| i)
}
