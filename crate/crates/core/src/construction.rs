//! Seed groups, seed sourcing, generality testing and bootstrap.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfun::{nonlinearity, TruthTable};
use crate::error::{Error, Result};
use crate::evaluation::{FitnessKind, ObjectiveKind};
use crate::evolver::{run, EvolverConfig, FunctionEvaluator};
use crate::gp::{GpTree, LeafTables, TerminalSet};

/// Best known nonlinearity of balanced functions, by variable count.
pub const BEST_KNOWN_BALANCED_NL: [(u32, u64); 13] = [
    (4, 4),
    (5, 12),
    (6, 26),
    (7, 56),
    (8, 116),
    (9, 240),
    (10, 492),
    (11, 992),
    (12, 2012),
    (13, 4036),
    (14, 8120),
    (15, 16272),
    (16, 32638),
];

/// Nonlinearity reached by the evolved constructions, by resulting size.
/// Size 6 comes from the concatenation recurrence on Nl-4 seeds.
pub const CONSTRUCTION_RESULT_NL: [(u32, u64); 13] = [
    (6, 24),
    (7, 56),
    (8, 116),
    (9, 240),
    (10, 488),
    (11, 992),
    (12, 2000),
    (13, 4032),
    (14, 8096),
    (15, 16256),
    (16, 32576),
    (17, 65280),
    (18, 130688),
];

pub fn best_known_nl(n: u32) -> Option<u64> {
    BEST_KNOWN_BALANCED_NL.iter().find(|&&(m, _)| m == n).map(|&(_, v)| v)
}

pub fn construction_result_nl(size: u32) -> Option<u64> {
    CONSTRUCTION_RESULT_NL.iter().find(|&&(m, _)| m == size).map(|&(_, v)| v)
}

/// Bent nonlinearity `2^{n-1} - 2^{n/2-1}` (n even).
pub fn bent_nl(n: u32) -> u64 {
    (1u64 << (n - 1)) - (1u64 << (n / 2 - 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Evolved,
    Bent,
    File,
    Bootstrapped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedType {
    Balanced,
    Bent,
}

/// One assignment of truth tables to the seed terminals `f_0..f_{s-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedGroup {
    pub seeds: Vec<TruthTable>,
    pub provenance: Provenance,
    pub declared_nl: u64,
}

impl SeedGroup {
    /// Checks shared size, declared nonlinearity and (optionally) balancedness.
    pub fn new(seeds: Vec<TruthTable>, provenance: Provenance, declared_nl: u64, balanced: bool) -> Result<Self> {
        let n = seeds
            .first()
            .ok_or_else(|| Error::SeedShape("empty seed group".into()))?
            .num_vars();
        for (i, f) in seeds.iter().enumerate() {
            if f.num_vars() != n {
                return Err(Error::SeedShape(format!("seed f{i} has n={}, expected {n}", f.num_vars())));
            }
            let nl = nonlinearity(f);
            if nl != declared_nl {
                return Err(Error::Precondition(format!("seed f{i} has nonlinearity {nl}, declared {declared_nl}")));
            }
            if balanced && !f.is_balanced() {
                return Err(Error::Precondition(format!("seed f{i} is not balanced")));
            }
        }
        Ok(Self { seeds, provenance, declared_nl })
    }

    pub fn num_vars(&self) -> u32 {
        self.seeds[0].num_vars()
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn all_balanced(&self) -> bool {
        self.seeds.iter().all(TruthTable::is_balanced)
    }
}

/// Tables of several groups in evaluator form.
pub fn group_tables(groups: &[SeedGroup]) -> Vec<Vec<TruthTable>> {
    groups.iter().map(|g| g.seeds.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SeedSource {
    /// Plain GP until the required nonlinearity is met.
    Evolved,
    /// Inner-product bent function and affine-equivalent variants.
    Bent,
    /// A seed directory written by [`write_seed_dir`].
    File(PathBuf),
}

/// What [`make_seed_groups`] should produce.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRequest {
    pub s: usize,
    pub n: u32,
    /// Required nonlinearity; defaults to the best-known (balanced) or bent value.
    pub nl: Option<u64>,
    pub seed_type: SeedType,
    pub groups: usize,
    pub source: SeedSource,
    pub rng_seed: u64,
    /// Plain-GP settings for the evolved source (early exit is set automatically).
    pub evolver: EvolverConfig,
}

impl SeedRequest {
    pub fn evolved(s: usize, n: u32, groups: usize, rng_seed: u64) -> Self {
        Self {
            s,
            n,
            nl: None,
            seed_type: SeedType::Balanced,
            groups,
            source: SeedSource::Evolved,
            rng_seed,
            evolver: seed_evolver_defaults(),
        }
    }

    pub fn required_nl(&self) -> Result<u64> {
        if let Some(nl) = self.nl {
            return Ok(nl);
        }
        match self.seed_type {
            SeedType::Bent => Ok(bent_nl(self.n)),
            SeedType::Balanced => best_known_nl(self.n)
                .ok_or_else(|| Error::Config(format!("no default nonlinearity for n={}; set nl", self.n))),
        }
    }
}

/// Plain-GP settings used to evolve seeds: population 200, up to 100 000 evaluations.
pub fn seed_evolver_defaults() -> EvolverConfig {
    EvolverConfig { population_size: 200, budget: 100_000, runs: 1, ..EvolverConfig::paper() }
}

pub fn make_seed_groups(req: &SeedRequest) -> Result<Vec<SeedGroup>> {
    if req.s == 0 || req.groups == 0 {
        return Err(Error::Config("seed count and group count must be positive".into()));
    }
    if let SeedSource::File(dir) = &req.source {
        let groups = read_seed_dir(dir)?;
        if groups.is_empty() {
            return Err(Error::Config(format!("seed directory {} holds no groups", dir.display())));
        }
        let g = &groups[0];
        if g.len() != req.s || g.num_vars() != req.n {
            return Err(Error::SeedShape(format!(
                "seed directory holds s={} n={}, expected s={} n={}",
                g.len(),
                g.num_vars(),
                req.s,
                req.n
            )));
        }
        return Ok(groups);
    }
    let nl = req.required_nl()?;
    let needed = req.s * req.groups;
    let seeds = match (&req.source, req.seed_type) {
        (SeedSource::Bent, _) | (SeedSource::Evolved, SeedType::Bent) => bent_seeds(req.n, needed, req.rng_seed)?,
        (SeedSource::Evolved, SeedType::Balanced) => evolved_seeds(req, nl, needed)?,
        (SeedSource::File(_), _) => unreachable!(),
    };
    let provenance = match req.source {
        SeedSource::Bent => Provenance::Bent,
        _ if req.seed_type == SeedType::Bent => Provenance::Bent,
        _ => Provenance::Evolved,
    };
    let balanced = req.seed_type == SeedType::Balanced;
    let declared = if balanced { nl } else { bent_nl(req.n) };
    seeds
        .chunks(req.s)
        .map(|chunk| SeedGroup::new(chunk.to_vec(), provenance, declared, balanced))
        .collect()
}

fn evolved_seeds(req: &SeedRequest, nl: u64, needed: usize) -> Result<Vec<TruthTable>> {
    let eval = FunctionEvaluator::new(req.n, ObjectiveKind::NlWithSpectrum)?;
    let cfg = EvolverConfig { rng_seed: req.rng_seed, stop_at: Some(nl as f64), runs: 1, ..req.evolver.clone() };
    cfg.validate()?;
    let mut out: Vec<TruthTable> = Vec::with_capacity(needed);
    let mut seen = BTreeSet::new();
    let mut next_run = 0usize;
    let mut attempts_left = needed * 4 + 8;
    while out.len() < needed {
        let want = (needed - out.len()).min(attempts_left);
        if want == 0 {
            break;
        }
        let batch: Vec<Result<(TruthTable, f64)>> = (next_run..next_run + want)
            .into_par_iter()
            .map(|i| {
                let r = run(&cfg, &eval, &mut cfg.run_rng(i))?;
                Ok((eval.function(&r.best_tree)?, r.best_fitness.value))
            })
            .collect();
        next_run += want;
        attempts_left -= want;
        for item in batch {
            let (f, fitness) = item?;
            if f.is_balanced() && nonlinearity(&f) == nl && seen.insert(f.clone()) {
                out.push(f);
                if out.len() == needed {
                    break;
                }
            } else if out.len() + attempts_left < needed && attempts_left == 0 {
                return Err(Error::TargetUnreached { n: req.n, target: nl, best: format!("fitness {fitness}") });
            }
        }
    }
    if out.len() < needed {
        return Err(Error::TargetUnreached {
            n: req.n,
            target: nl,
            best: format!("{} of {needed} distinct seeds", out.len()),
        });
    }
    Ok(out)
}

/// Affine-equivalent variants `x -> f(Ax + b) + c.x` of the inner-product bent function.
fn bent_seeds(n: u32, needed: usize, rng_seed: u64) -> Result<Vec<TruthTable>> {
    let base = TruthTable::inner_product(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::with_capacity(needed);
    let mut seen = BTreeSet::new();
    if seen.insert(base.clone()) {
        out.push(base.clone());
    }
    let mut guard = 0;
    while out.len() < needed {
        guard += 1;
        if guard > needed * 100 {
            return Err(Error::TargetUnreached { n, target: bent_nl(n), best: "too few distinct variants".into() });
        }
        let f = affine_variant(&base, &mut rng)?;
        if seen.insert(f.clone()) {
            out.push(f);
        }
    }
    Ok(out)
}

fn affine_variant<R: Rng>(f: &TruthTable, rng: &mut R) -> Result<TruthTable> {
    let n = f.num_vars() as usize;
    let rows = random_invertible(n, rng);
    let shift: usize = rng.gen_range(0..1usize << n);
    let linear: usize = rng.gen_range(0..1usize << n);
    TruthTable::from_fn(n as u32, |x| {
        let mut y = 0usize;
        for (i, row) in rows.iter().enumerate() {
            y |= (((row & x).count_ones() & 1) as usize) << i;
        }
        f.get(y ^ shift) ^ ((linear & x).count_ones() & 1 == 1)
    })
}

fn random_invertible<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    loop {
        let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..1usize << n)).collect();
        if gf2_rank(&rows, n) == n {
            return rows;
        }
    }
}

fn gf2_rank(rows: &[usize], n: usize) -> usize {
    let mut m = rows.to_vec();
    let mut rank = 0;
    for bit in 0..n {
        if let Some(p) = (rank..m.len()).find(|&r| m[r] >> bit & 1 == 1) {
            m.swap(rank, p);
            let pivot = m[rank];
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && *row >> bit & 1 == 1 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedManifest {
    pub s: usize,
    pub n: u32,
    pub groups: usize,
    pub declared_nl: u64,
    pub provenance: Provenance,
    pub balanced: bool,
    /// `files[g][i]` is the file of seed `f_i` in group `g`, relative to the directory.
    pub files: Vec<Vec<String>>,
}

pub const SEED_MANIFEST: &str = "manifest.json";

/// Writes one truth-table file per seed and a manifest.
pub fn write_seed_dir(groups: &[SeedGroup], dir: &Path) -> Result<()> {
    let first = groups.first().ok_or_else(|| Error::SeedShape("no seed groups to write".into()))?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::with_capacity(groups.len());
    for (g, group) in groups.iter().enumerate() {
        let mut names = Vec::with_capacity(group.len());
        for (i, f) in group.seeds.iter().enumerate() {
            let name = format!("g{g}_f{i}.tt");
            f.write_file(&dir.join(&name))?;
            names.push(name);
        }
        files.push(names);
    }
    let manifest = SeedManifest {
        s: first.len(),
        n: first.num_vars(),
        groups: groups.len(),
        declared_nl: first.declared_nl,
        provenance: first.provenance,
        balanced: groups.iter().all(SeedGroup::all_balanced),
        files,
    };
    let path = dir.join(SEED_MANIFEST);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Json { path: path.clone(), source: e })?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

pub fn read_seed_dir(dir: &Path) -> Result<Vec<SeedGroup>> {
    let path = dir.join(SEED_MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: SeedManifest = serde_json::from_str(&text).map_err(|e| Error::Json { path: path.clone(), source: e })?;
    if manifest.files.len() != manifest.groups {
        return Err(Error::SeedShape(format!(
            "manifest lists {} groups but {} file rows",
            manifest.groups,
            manifest.files.len()
        )));
    }
    let mut groups = Vec::with_capacity(manifest.groups);
    for row in &manifest.files {
        if row.len() != manifest.s {
            return Err(Error::SeedShape(format!("group with {} seeds, manifest says s={}", row.len(), manifest.s)));
        }
        let seeds = row
            .iter()
            .map(|name| TruthTable::read_file(&dir.join(name)))
            .collect::<Result<Vec<_>>>()?;
        if seeds.iter().any(|f| f.num_vars() != manifest.n) {
            return Err(Error::SeedShape(format!("seed file size differs from manifest n={}", manifest.n)));
        }
        groups.push(SeedGroup::new(seeds, manifest.provenance, manifest.declared_nl, manifest.balanced)?);
    }
    Ok(groups)
}

/// Target nonlinearity per resulting size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TargetTable {
    /// What the evolved constructions reached (default).
    ConstructionResults,
    /// Best known balanced nonlinearity.
    BestKnown,
    /// `2^n + 2 nl_seed`, the concatenation value for the given seeds.
    SeedRelative,
    Custom(BTreeMap<u32, u64>),
}

impl TargetTable {
    pub fn target(&self, size: u32, seed_n: u32, seed_nl: u64) -> Option<u64> {
        match self {
            TargetTable::ConstructionResults => construction_result_nl(size),
            TargetTable::BestKnown => best_known_nl(size),
            TargetTable::SeedRelative => Some((1u64 << seed_n) + 2 * seed_nl),
            TargetTable::Custom(map) => map.get(&size).copied(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeRow {
    pub size: u32,
    pub seed_n: u32,
    pub seed_nl: u64,
    pub target: u64,
    /// Resulting nonlinearity per group, in group order.
    pub resulting_nl: Vec<u64>,
    pub balanced: Vec<bool>,
    pub groups_passed: usize,
    pub groups_total: usize,
}

impl SizeRow {
    pub fn min_nl(&self) -> u64 {
        self.resulting_nl.iter().copied().min().unwrap_or(0)
    }

    pub fn all_balanced(&self) -> bool {
        self.balanced.iter().all(|&b| b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralityReport {
    pub rows: Vec<SizeRow>,
    /// Sizes without a target; excluded from the verdict.
    pub skipped: Vec<u32>,
    pub general: bool,
    /// First failing `(size, group index)` in size order.
    pub first_failure: Option<(u32, usize)>,
}

impl GeneralityReport {
    /// Three-row table: size, seed nonlinearity, resulting nonlinearity.
    pub fn table(&self) -> String {
        let mut size = String::from("size");
        let mut seed = String::from("seed_nl");
        let mut res = String::from("resulting_nl");
        for r in &self.rows {
            size.push_str(&format!("\t{}", r.size));
            seed.push_str(&format!("\t{}", r.seed_nl));
            res.push_str(&format!("\t{}", r.min_nl()));
        }
        format!("{size}\n{seed}\n{res}\n")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "size {:>2}: seed n={} nl={} target={} resulting min nl={} balanced={} passed {}/{}\n",
                r.size,
                r.seed_n,
                r.seed_nl,
                r.target,
                r.min_nl(),
                r.all_balanced(),
                r.groups_passed,
                r.groups_total
            ));
        }
        for s in &self.skipped {
            out.push_str(&format!("size {s:>2}: skipped (no target)\n"));
        }
        match self.first_failure {
            None if self.general => out.push_str("verdict: general\n"),
            None => out.push_str("verdict: not general (nothing tested)\n"),
            Some((size, g)) => out.push_str(&format!("verdict: not general (first failure: size {size}, group {g})\n")),
        }
        out
    }
}

/// Applies the unchanged tree at every size and group of `test_sets`
/// (keyed by resulting size) and compares against `targets`.
pub fn test_generality(
    tree: &GpTree,
    vars: usize,
    test_sets: &BTreeMap<u32, Vec<SeedGroup>>,
    targets: &TargetTable,
) -> Result<GeneralityReport> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (&size, groups) in test_sets {
        let first = groups
            .first()
            .ok_or_else(|| Error::SeedShape(format!("test size {size} has no groups")))?;
        let seed_n = first.num_vars();
        if seed_n as usize + vars != size as usize {
            return Err(Error::SeedShape(format!("size {size} keyed with {seed_n}-variable seeds and k={vars}")));
        }
        tree.validate(&TerminalSet::new(vars, first.len()))?;
        let Some(target) = targets.target(size, seed_n, first.declared_nl) else {
            skipped.push(size);
            continue;
        };
        let results = groups
            .par_iter()
            .map(|g| {
                if g.num_vars() != seed_n || g.len() != first.len() {
                    return Err(Error::SeedShape(format!("size {size}: groups differ in shape")));
                }
                let f = LeafTables::concrete(vars, &g.seeds)?.eval(tree)?;
                Ok((nonlinearity(&f), f.is_balanced()))
            })
            .collect::<Result<Vec<_>>>()?;
        let groups_passed = results.iter().filter(|&&(nl, bal)| bal && nl >= target).count();
        rows.push(SizeRow {
            size,
            seed_n,
            seed_nl: first.declared_nl,
            target,
            resulting_nl: results.iter().map(|r| r.0).collect(),
            balanced: results.iter().map(|r| r.1).collect(),
            groups_passed,
            groups_total: groups.len(),
        });
    }
    let first_failure = rows.iter().find_map(|r| {
        r.resulting_nl
            .iter()
            .zip(&r.balanced)
            .position(|(&nl, &bal)| !bal || nl < r.target)
            .map(|g| (r.size, g))
    });
    let general = !rows.is_empty() && first_failure.is_none();
    Ok(GeneralityReport { rows, skipped, general, first_failure })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapOutcome {
    /// `levels[0]` are the base groups, `levels[l]` the groups after `l` applications.
    pub levels: Vec<Vec<SeedGroup>>,
    /// Why the chain stopped before the requested level, if it did.
    pub halted: Option<String>,
}

impl BootstrapOutcome {
    /// Rows of (resulting size, seed nl, resulting nl) for every completed level.
    pub fn table_rows(&self) -> Vec<(u32, u64, u64)> {
        self.levels
            .windows(2)
            .map(|w| (w[1][0].num_vars(), w[0][0].declared_nl, w[1][0].declared_nl))
            .collect()
    }

    pub fn table(&self) -> String {
        let rows = self.table_rows();
        let mut out = String::from("size");
        for r in &rows {
            out.push_str(&format!("\t{}", r.0));
        }
        out.push_str("\nseed_nl");
        for r in &rows {
            out.push_str(&format!("\t{}", r.1));
        }
        out.push_str("\nresulting_nl");
        for r in &rows {
            out.push_str(&format!("\t{}", r.2));
        }
        out.push('\n');
        out
    }
}

/// Feeds the construction's outputs back in as seeds.
///
/// New seed `j` of a group is the tree applied to the group's seeds rotated
/// left by `j`, so each group of `s` seeds yields `s` new seeds.
pub fn bootstrap(tree: &GpTree, vars: usize, base: &[SeedGroup], levels: usize) -> Result<BootstrapOutcome> {
    if base.is_empty() {
        return Err(Error::SeedShape("bootstrap needs at least one base group".into()));
    }
    tree.validate(&TerminalSet::new(vars, base[0].len()))?;
    let mut out = vec![base.to_vec()];
    for level in 1..=levels {
        let prev = out.last().expect("base level present");
        let mut next = Vec::with_capacity(prev.len());
        for (g, group) in prev.iter().enumerate() {
            let mut seeds = Vec::with_capacity(group.len());
            for j in 0..group.len() {
                let mut rotated = group.seeds.clone();
                rotated.rotate_left(j);
                seeds.push(LeafTables::concrete(vars, &rotated)?.eval(tree)?);
            }
            if let Some(i) = seeds.iter().position(|f| !f.is_balanced()) {
                let halted = format!("level {level}: group {g} seed {i} is not balanced");
                return Ok(BootstrapOutcome { levels: out, halted: Some(halted) });
            }
            let nls: BTreeSet<u64> = seeds.iter().map(nonlinearity).collect();
            if nls.len() != 1 {
                let halted = format!("level {level}: group {g} seeds have unequal nonlinearities {nls:?}");
                return Ok(BootstrapOutcome { levels: out, halted: Some(halted) });
            }
            let nl = *nls.iter().next().expect("one value");
            next.push(SeedGroup { seeds, provenance: Provenance::Bootstrapped, declared_nl: nl });
        }
        out.push(next);
    }
    Ok(BootstrapOutcome { levels: out, halted: None })
}

/// Full experiment description: the `(s, n, nl, ev)` tuple plus everything
/// else needed to reproduce a construction-evolution batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub s: usize,
    pub n: u32,
    pub nl: u64,
    pub fitness: FitnessKind,
    pub k: usize,
    pub objective: ObjectiveKind,
    pub seed_type: SeedType,
    pub groups: usize,
    pub seed_source: SeedSource,
    pub seed_rng_seed: u64,
    pub evolver: EvolverConfig,
}

impl ExperimentConfig {
    /// Tuple label such as `(2,4,4,B)`.
    pub fn label(&self) -> String {
        format!("({},{},{},{})", self.s, self.n, self.nl, self.fitness.tag())
    }

    pub fn result_size(&self) -> u32 {
        self.n + self.k as u32
    }

    /// Nonlinearity a construction must reach at the evolved size to count as locally optimal.
    pub fn local_target(&self) -> u64 {
        match self.seed_type {
            SeedType::Balanced => construction_result_nl(self.result_size())
                .or_else(|| best_known_nl(self.result_size()))
                .unwrap_or((1u64 << self.n) + 2 * self.nl),
            SeedType::Bent => best_known_nl(self.result_size()).unwrap_or(0),
        }
    }

    pub fn seed_request(&self) -> SeedRequest {
        SeedRequest {
            s: self.s,
            n: self.n,
            nl: Some(self.nl),
            seed_type: self.seed_type,
            groups: self.groups,
            source: self.seed_source.clone(),
            rng_seed: self.seed_rng_seed,
            evolver: seed_evolver_defaults(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 || self.k == 0 || self.groups == 0 {
            return Err(Error::Config("s, k and groups must be positive".into()));
        }
        if self.s + self.k > crate::analysis::MAX_ABSTRACT_INPUTS {
            return Err(Error::Config(format!("s + k = {} exceeds the analysis bound", self.s + self.k)));
        }
        if self.seed_type == SeedType::Bent && self.n % 2 != 0 {
            return Err(Error::Config(format!("bent seeds need even n, got {}", self.n)));
        }
        if self.seed_type == SeedType::Bent && self.nl != bent_nl(self.n) {
            return Err(Error::Config(format!("bent seeds on n={} have nl {}, not {}", self.n, bent_nl(self.n), self.nl)));
        }
        self.evolver.validate()
    }
}

/// Shuffles group order; used to draw held-out subsets reproducibly.
pub fn shuffled<T: Clone, R: Rng>(items: &[T], rng: &mut R) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}
