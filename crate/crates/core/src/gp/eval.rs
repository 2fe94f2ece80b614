use crate::boolfun::{variable_words, word_count, TruthTable, MAX_VARS};
use crate::error::{Error, Result};

use super::{GpTree, Primitive, TerminalSet};

/// Precomputed leaf tables for repeated word-parallel evaluation.
///
/// With concrete seeds of `n` variables the output has `n + k` variables:
/// seeds read the low `n` index bits and `v_j` is index bit `n + k - 1 - j`,
/// so `v_0` is the most significant input. In abstract mode each seed `f_i`
/// is itself a free input at index bit `i` (and `n` is replaced by `s`).
#[derive(Clone, Debug)]
pub struct LeafTables {
    out_vars: u32,
    width: usize,
    terms: TerminalSet,
    vars: Vec<Vec<u64>>,
    seeds: Vec<Vec<u64>>,
}

impl LeafTables {
    pub fn concrete(vars: usize, seeds: &[TruthTable]) -> Result<Self> {
        let seed_n = match seeds.first() {
            Some(s) => s.num_vars(),
            None => 0,
        };
        if seeds.iter().any(|s| s.num_vars() != seed_n) {
            return Err(Error::SeedShape("seed functions in one group differ in size".into()));
        }
        let out_vars = seed_n as usize + vars;
        if out_vars == 0 || out_vars > MAX_VARS as usize {
            return Err(Error::VariableCount { n: out_vars as u32, max: MAX_VARS });
        }
        let out_vars = out_vars as u32;
        let seed_tables = seeds
            .iter()
            .map(|s| s.lift(out_vars - seed_n).map(|t| t.words().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(out_vars, seed_n, vars, seed_tables))
    }

    /// Every seed terminal becomes a free input.
    pub fn abstract_inputs(vars: usize, seeds: usize) -> Result<Self> {
        let out_vars = vars + seeds;
        if out_vars == 0 || out_vars > MAX_VARS as usize {
            return Err(Error::VariableCount { n: out_vars as u32, max: MAX_VARS });
        }
        let out_vars = out_vars as u32;
        let seed_tables = (0..seeds as u32).map(|i| variable_words(out_vars, i)).collect();
        Ok(Self::assemble(out_vars, seeds as u32, vars, seed_tables))
    }

    fn assemble(out_vars: u32, base: u32, vars: usize, seeds: Vec<Vec<u64>>) -> Self {
        let vars_tables = (0..vars as u32)
            .map(|j| variable_words(out_vars, base + vars as u32 - 1 - j))
            .collect();
        Self {
            out_vars,
            width: word_count(out_vars),
            terms: TerminalSet::new(vars, seeds.len()),
            vars: vars_tables,
            seeds,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.out_vars
    }

    pub fn terminals(&self) -> TerminalSet {
        self.terms
    }

    pub fn eval(&self, tree: &GpTree) -> Result<TruthTable> {
        tree.validate(&self.terms)?;
        let mut stack = Vec::new();
        Ok(self.eval_unchecked(tree, &mut stack))
    }

    /// Evaluates a tree already validated against [`Self::terminals`], reusing `stack`.
    pub fn eval_unchecked(&self, tree: &GpTree, stack: &mut Vec<u64>) -> TruthTable {
        let w = self.width;
        stack.clear();
        for p in tree.nodes().iter().rev() {
            match *p {
                Primitive::Var(j) => stack.extend_from_slice(&self.vars[usize::from(j)]),
                Primitive::Seed(i) => stack.extend_from_slice(&self.seeds[usize::from(i)]),
                Primitive::Not => {
                    let len = stack.len();
                    for x in &mut stack[len - w..] {
                        *x = !*x;
                    }
                }
                Primitive::If => {
                    let len = stack.len();
                    let (rest, cond) = stack.split_at_mut(len - w);
                    let (rest, then) = rest.split_at_mut(len - 2 * w);
                    let other = &mut rest[len - 3 * w..];
                    for ((o, t), c) in other.iter_mut().zip(then.iter()).zip(cond.iter()) {
                        *o = (c & t) | (!c & *o);
                    }
                    stack.truncate(len - 2 * w);
                }
                op => {
                    let len = stack.len();
                    let (rest, first) = stack.split_at_mut(len - w);
                    let second = &mut rest[len - 2 * w..];
                    for (b, a) in second.iter_mut().zip(first.iter()) {
                        *b = apply_binary(op, *a, *b);
                    }
                    stack.truncate(len - w);
                }
            }
        }
        debug_assert_eq!(stack.len(), w);
        TruthTable::from_words_masked(self.out_vars, stack.clone())
    }
}

#[inline]
fn apply_binary(op: Primitive, a: u64, b: u64) -> u64 {
    match op {
        Primitive::Or => a | b,
        Primitive::Xor => a ^ b,
        Primitive::And => a & b,
        Primitive::And2 => a & !b,
        Primitive::Xnor => !(a ^ b),
        _ => unreachable!("not a binary operator: {op:?}"),
    }
}

/// Evaluates a construction with `vars` additional variables and concrete seeds.
pub fn eval_tree(tree: &GpTree, vars: usize, seeds: &[TruthTable]) -> Result<TruthTable> {
    LeafTables::concrete(vars, seeds)?.eval(tree)
}

/// Evaluates a construction with every terminal as a free input (`s + k` variables).
pub fn eval_abstract(tree: &GpTree, seeds: usize, vars: usize) -> Result<TruthTable> {
    LeafTables::abstract_inputs(vars, seeds)?.eval(tree)
}
