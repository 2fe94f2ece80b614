//! Objective values of resulting functions and fitness of constructions.

use serde::{Deserialize, Serialize};

use crate::boolfun::{balancedness_penalty, nonlinearity_from_spectrum, walsh_transform, TruthTable};
use crate::error::{Error, Result};
use crate::gp::{GpTree, LeafTables, TerminalSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectiveKind {
    /// `-BAL + [BAL = 0] * Nl`.
    NlOnly,
    /// `-BAL + [BAL = 0] * (Nl + Indicator)`.
    NlWithSpectrum,
}

impl ObjectiveKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::NlOnly => "nl",
            ObjectiveKind::NlWithSpectrum => "nl+spectrum",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "nl" | "1" | "objective1" => Some(ObjectiveKind::NlOnly),
            "nl+spectrum" | "2" | "objective2" => Some(ObjectiveKind::NlWithSpectrum),
            _ => None,
        }
    }
}

/// How per-group objective values combine into one fitness value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FitnessKind {
    /// Group 0 alone until it reaches `target_val`, then the groups are added.
    FirstGroup { target_val: u64, options: FirstGroupOptions },
    SumAll,
    MinAll,
}

/// Switches for the ambiguous parts of the first-group fitness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstGroupOptions {
    /// Trigger only when `val_1 == target_val` instead of `val_1 >= target_val`.
    pub exact_trigger: bool,
    /// Add `val_1` a second time through the sum over all groups.
    pub include_first_in_sum: bool,
}

impl Default for FirstGroupOptions {
    fn default() -> Self {
        Self { exact_trigger: false, include_first_in_sum: true }
    }
}

impl FitnessKind {
    pub fn first_group(target_val: u64) -> Self {
        FitnessKind::FirstGroup { target_val, options: FirstGroupOptions::default() }
    }

    /// Experiment tag letter: A (first group), B (sum), C (minimum).
    pub fn tag(self) -> char {
        match self {
            FitnessKind::FirstGroup { .. } => 'A',
            FitnessKind::SumAll => 'B',
            FitnessKind::MinAll => 'C',
        }
    }
}

/// Fitness of one construction over its seed groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    /// Raw fitness divided by `1 + missing_terminals`.
    pub value: f64,
    /// Objective per seed group; `None` for groups skipped by the first-group trigger.
    pub per_group: Vec<Option<f64>>,
    pub missing_terminals: u32,
}

impl FitnessValue {
    /// Single-function fitness, used when evolving plain functions.
    pub fn single(value: f64) -> Self {
        Self { value, per_group: vec![Some(value)], missing_terminals: 0 }
    }

    pub fn cmp_value(&self, other: &Self) -> std::cmp::Ordering {
        self.value.total_cmp(&other.value)
    }
}

/// Objective of a resulting function.
pub fn objective(f: &TruthTable, kind: ObjectiveKind) -> f64 {
    let bal = balancedness_penalty(f);
    if bal != 0 {
        return -(bal as f64);
    }
    let spectrum = walsh_transform(f);
    let nl = nonlinearity_from_spectrum(&spectrum) as f64;
    match kind {
        ObjectiveKind::NlOnly => nl,
        ObjectiveKind::NlWithSpectrum => {
            let count = spectrum.max_abs_count() as f64;
            nl + 1.0 - count / f.len() as f64
        }
    }
}

/// Fitness evaluator for constructions over a fixed list of seed groups.
#[derive(Clone, Debug)]
pub struct ConstructionEvaluator {
    groups: Vec<LeafTables>,
    terms: TerminalSet,
    objective: ObjectiveKind,
    fitness: FitnessKind,
}

impl ConstructionEvaluator {
    /// `groups[g][i]` is seed `f_i` of group `g`.
    pub fn new(
        vars: usize,
        groups: &[Vec<TruthTable>],
        objective: ObjectiveKind,
        fitness: FitnessKind,
    ) -> Result<Self> {
        let first = groups
            .first()
            .ok_or_else(|| Error::SeedShape("at least one seed group is required".into()))?;
        let (s, n) = (first.len(), first.first().map(TruthTable::num_vars));
        for (g, group) in groups.iter().enumerate() {
            if group.len() != s || group.iter().any(|f| Some(f.num_vars()) != n) {
                return Err(Error::SeedShape(format!("seed group {g} does not match group 0's shape")));
            }
        }
        if let FitnessKind::FirstGroup { target_val: 0, .. } = fitness {
            return Err(Error::Config("first-group target must be positive".into()));
        }
        let tables = groups
            .iter()
            .map(|g| LeafTables::concrete(vars, g))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { groups: tables, terms: TerminalSet::new(vars, s), objective, fitness })
    }

    pub fn terminals(&self) -> TerminalSet {
        self.terms
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn result_vars(&self) -> u32 {
        self.groups[0].num_vars()
    }

    /// Terminals of the context that never occur in the tree.
    pub fn missing_terminals(&self, tree: &GpTree) -> u32 {
        let present = tree.terminals_present();
        self.terms.terminals().iter().filter(|t| !present.contains(t)).count() as u32
    }

    pub fn evaluate(&self, tree: &GpTree) -> Result<FitnessValue> {
        tree.validate(&self.terms)?;
        Ok(self.evaluate_unchecked(tree))
    }

    /// Resulting function of `tree` for group `g`.
    pub fn resulting_function(&self, tree: &GpTree, g: usize) -> Result<TruthTable> {
        self.groups[g].eval(tree)
    }

    fn evaluate_unchecked(&self, tree: &GpTree) -> FitnessValue {
        let mut stack = Vec::new();
        let mut val = |g: usize| objective(&self.groups[g].eval_unchecked(tree, &mut stack), self.objective);
        let count = self.groups.len();
        let mut per_group = vec![None; count];
        let raw = match self.fitness {
            FitnessKind::FirstGroup { target_val, options } => {
                let first = val(0);
                per_group[0] = Some(first);
                let target = target_val as f64;
                let triggered = if options.exact_trigger { first == target } else { first >= target };
                if triggered {
                    let mut sum = if options.include_first_in_sum { first } else { 0.0 };
                    for (g, slot) in per_group.iter_mut().enumerate().skip(1) {
                        let v = val(g);
                        *slot = Some(v);
                        sum += v;
                    }
                    first + sum
                } else {
                    first
                }
            }
            FitnessKind::SumAll => {
                let mut sum = 0.0;
                for (g, slot) in per_group.iter_mut().enumerate() {
                    let v = val(g);
                    *slot = Some(v);
                    sum += v;
                }
                sum
            }
            FitnessKind::MinAll => {
                let mut min = f64::INFINITY;
                for (g, slot) in per_group.iter_mut().enumerate() {
                    let v = val(g);
                    *slot = Some(v);
                    min = min.min(v);
                }
                min
            }
        };
        let missing = self.missing_terminals(tree);
        FitnessValue { value: raw / f64::from(1 + missing), per_group, missing_terminals: missing }
    }
}

/// Fitness of a construction; builds a one-off evaluator.
pub fn construction_fitness(
    tree: &GpTree,
    vars: usize,
    groups: &[Vec<TruthTable>],
    objective: ObjectiveKind,
    fitness: FitnessKind,
) -> Result<FitnessValue> {
    ConstructionEvaluator::new(vars, groups, objective, fitness)?.evaluate(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{nonlinearity, walsh_transform};

    use crate::gp::{parse_tree, random_tree};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// `x_4 + x_0 x_1 + x_2 x_3` with inputs permuted: balanced, Nl 12.
    fn nl12(rng: &mut ChaCha8Rng) -> TruthTable {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..5).collect();
        perm.shuffle(rng);
        let flip: usize = rand::Rng::gen_range(rng, 0..32);
        TruthTable::from_fn(5, |x| {
            let y = x ^ flip;
            let b = |i: usize| (y >> perm[i]) & 1;
            (b(4) ^ (b(0) & b(1)) ^ (b(2) & b(3))) == 1
        })
        .unwrap()
    }

    #[test]
    fn unbalanced_objective_is_penalty() {
        let z = TruthTable::zero(4).unwrap();
        assert_eq!(objective(&z, ObjectiveKind::NlOnly), -8.0);
        let bent = TruthTable::inner_product(4).unwrap();
        assert_eq!(bent.weight(), 6);
        assert_eq!(objective(&bent, ObjectiveKind::NlOnly), -2.0);
        assert_eq!(objective(&bent, ObjectiveKind::NlWithSpectrum), -2.0);
    }

    #[test]
    fn spectrum_indicator_value() {
        // x_4 + x_0 x_1 + x_2 x_3: |W| = 8 on the 16 masks with bit 4 set
        let f = TruthTable::from_fn(5, |x| ((x >> 4) ^ (x & (x >> 1)) ^ ((x >> 2) & (x >> 3))) & 1 == 1).unwrap();
        let w = walsh_transform(&f);
        assert_eq!((w.max_abs(), w.max_abs_count()), (8, 16));
        assert_eq!(objective(&f, ObjectiveKind::NlWithSpectrum), 12.5);
        assert_eq!(objective(&f, ObjectiveKind::NlOnly), 12.0);

        // Parseval with W in {0, +-4, +-8} and W(0) = 0 forces at least 11
        // positions at |W| = 8 for any balanced Nl-12 function of 5 variables
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut seen = 0;
        while seen < 20 {
            let g = TruthTable::random_balanced(5, &mut rng).unwrap();
            if nonlinearity(&g) != 12 {
                continue;
            }
            seen += 1;
            let count = walsh_transform(&g).max_abs_count();
            assert!(count >= 11);
            assert_eq!(objective(&g, ObjectiveKind::NlWithSpectrum), 13.0 - count as f64 / 32.0);
        }
    }

    #[test]
    fn spectrum_objective_refines_nl() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let f = TruthTable::random_balanced(6, &mut rng).unwrap();
            let d = objective(&f, ObjectiveKind::NlWithSpectrum) - objective(&f, ObjectiveKind::NlOnly);
            assert!(d >= 0.0 && d < 1.0, "{d}");
        }
    }

    fn nl12_groups(rng: &mut ChaCha8Rng, groups: usize, s: usize) -> Vec<Vec<TruthTable>> {
        (0..groups).map(|_| (0..s).map(|_| nl12(rng)).collect()).collect()
    }

    #[test]
    fn concatenation_sum_over_four_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let groups = nl12_groups(&mut rng, 4, 2);
        let tree = parse_tree("IF(v0, f0, (v1 XOR f1))", &TerminalSet::new(2, 2)).unwrap();
        let fv = construction_fitness(&tree, 2, &groups, ObjectiveKind::NlOnly, FitnessKind::SumAll).unwrap();
        assert_eq!(fv.missing_terminals, 0);
        assert_eq!(fv.value, 224.0);
        assert!(fv.per_group.iter().all(|v| *v == Some(56.0)));
    }

    #[test]
    fn missing_terminals_divide() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let groups = nl12_groups(&mut rng, 4, 2);
        let tree = parse_tree("f0", &TerminalSet::new(2, 2)).unwrap();
        let fv = construction_fitness(&tree, 2, &groups, ObjectiveKind::NlOnly, FitnessKind::SumAll).unwrap();
        assert_eq!(fv.missing_terminals, 3);
        // f0 lifted to 7 variables is balanced with Nl 4 * 12
        assert_eq!(fv.value, 4.0 * 48.0 / 4.0);
    }

    #[test]
    fn min_picks_worst_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let mut groups = nl12_groups(&mut rng, 4, 2);
        groups[2][0] = TruthTable::zero(5).unwrap();
        let tree = parse_tree("IF(v0, f0, (v1 XOR f1))", &TerminalSet::new(2, 2)).unwrap();
        let fv = construction_fitness(&tree, 2, &groups, ObjectiveKind::NlOnly, FitnessKind::MinAll).unwrap();
        let g2 = fv.per_group[2].unwrap();
        assert!(g2 < 0.0);
        assert_eq!(fv.value, g2);
        let sum = construction_fitness(&tree, 2, &groups, ObjectiveKind::NlOnly, FitnessKind::SumAll).unwrap();
        assert!(fv.value <= sum.value / 4.0);
    }

    #[test]
    fn first_group_trigger_is_lazy() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let groups = nl12_groups(&mut rng, 4, 2);
        let tree = parse_tree("IF(v0, f0, (v1 XOR f1))", &TerminalSet::new(2, 2)).unwrap();
        let hit = construction_fitness(&tree, 2, &groups, ObjectiveKind::NlOnly, FitnessKind::first_group(56)).unwrap();
        assert_eq!(hit.value, 56.0 + 4.0 * 56.0);
        let miss = construction_fitness(&tree, 2, &groups, ObjectiveKind::NlOnly, FitnessKind::first_group(57)).unwrap();
        assert_eq!(miss.value, 56.0);
        assert_eq!(miss.per_group[1..], [None, None, None]);
        let no_double = FitnessKind::FirstGroup {
            target_val: 56,
            options: FirstGroupOptions { exact_trigger: true, include_first_in_sum: false },
        };
        let alt = construction_fitness(&tree, 2, &groups, ObjectiveKind::NlOnly, no_double).unwrap();
        assert_eq!(alt.value, 56.0 + 3.0 * 56.0);
        let obj2 = FitnessKind::FirstGroup {
            target_val: 56,
            options: FirstGroupOptions { exact_trigger: true, include_first_in_sum: true },
        };
        let frac = construction_fitness(&tree, 2, &groups, ObjectiveKind::NlWithSpectrum, obj2).unwrap();
        assert_eq!(frac.per_group[1], None, "exact trigger cannot fire on a fractional objective");
    }

    #[test]
    fn penalty_preserves_sign_and_purity() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let groups = nl12_groups(&mut rng, 4, 2);
        let terms = TerminalSet::new(2, 2);
        let eval = ConstructionEvaluator::new(2, &groups, ObjectiveKind::NlWithSpectrum, FitnessKind::SumAll).unwrap();
        for _ in 0..200 {
            let t = random_tree(&terms, 5, &mut rng);
            let a = eval.evaluate(&t).unwrap();
            let b = eval.evaluate(&t).unwrap();
            assert_eq!(a, b);
            let raw: f64 = a.per_group.iter().map(|v| v.unwrap()).sum();
            assert_eq!(a.value.signum() * raw.signum() >= 0.0, true);
            if a.missing_terminals == 0 {
                assert_eq!(a.value, raw);
            }
        }
    }

    #[test]
    fn shape_errors() {
        let groups = vec![
            vec![TruthTable::zero(4).unwrap(), TruthTable::zero(4).unwrap()],
            vec![TruthTable::zero(4).unwrap(), TruthTable::zero(5).unwrap()],
        ];
        assert!(ConstructionEvaluator::new(2, &groups, ObjectiveKind::NlOnly, FitnessKind::SumAll).is_err());
        assert!(ConstructionEvaluator::new(2, &[], ObjectiveKind::NlOnly, FitnessKind::SumAll).is_err());
    }
}
