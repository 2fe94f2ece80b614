//! Experiment pipelines, run manifests and on-disk artifacts.
//!
//! Every command writes its artifacts into one output directory together
//! with `manifest.json`; [`replay`] re-executes a manifest and, apart from the
//! manifest's timestamps, reproduces the artifacts byte for byte.

pub mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{
    abstractize, equivalence_graph_of, essential_terminals, normalize, seeds_used, select_simplest, simplify,
    size_stats, EquivRelation,
};
use crate::boolfun::{nonlinearity, TruthTable};
use crate::construction::{
    best_known_nl, bootstrap, group_tables, make_seed_groups, read_seed_dir, test_generality, write_seed_dir,
    ExperimentConfig, SeedGroup, SeedRequest, SeedSource, TargetTable, SEED_MANIFEST,
};
use crate::error::{Error, Result};
use crate::evaluation::{ConstructionEvaluator, ObjectiveKind};
use crate::evolver::{run_batch, EvolverConfig, FunctionEvaluator, RunResult};
use crate::gp::{parse_tree, parse_tree_list, GpTree, TerminalSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const MANIFEST: &str = "manifest.json";
pub const OUT_ENV: &str = "EVOCONS_OUT";

/// Exit status for an error: unmet targets are a negative verdict, everything
/// else is a usage or configuration problem.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::TargetUnreached { .. } => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

/// Output root from `EVOCONS_OUT`, else `evocons-out`.
pub fn default_out_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("evocons-out"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    EvolveFn {
        n: u32,
        /// Defaults to the best known balanced nonlinearity for `n`.
        target_nl: Option<u64>,
        objective: ObjectiveKind,
        evolver: EvolverConfig,
    },
    EvolveCons {
        experiment: ExperimentConfig,
    },
    TestCons {
        tree: String,
        s: usize,
        k: usize,
        test_dirs: Vec<PathBuf>,
        /// Restrict to these resulting sizes; empty means all found.
        sizes: Vec<u32>,
        targets: TargetTable,
    },
    Analyze {
        trees: Vec<String>,
        s: usize,
        k: usize,
        relation: EquivRelation,
        /// Restrict to essential terminals and pad to this `(s, k)`.
        restrict_to: Option<(usize, usize)>,
    },
    Bootstrap {
        tree: String,
        s: usize,
        k: usize,
        base_dir: PathBuf,
        levels: usize,
    },
    Seeds {
        request: SeedRequest,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::EvolveFn { .. } => "evolve-fn",
            Command::EvolveCons { .. } => "evolve-cons",
            Command::TestCons { .. } => "test-cons",
            Command::Analyze { .. } => "analyze",
            Command::Bootstrap { .. } => "bootstrap",
            Command::Seeds { .. } => "seeds",
        }
    }

    fn rng_seed(&self) -> Option<u64> {
        match self {
            Command::EvolveFn { evolver, .. } => Some(evolver.rng_seed),
            Command::EvolveCons { experiment } => Some(experiment.evolver.rng_seed),
            Command::Seeds { request } => Some(request.rng_seed),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    #[serde(flatten)]
    pub command: Command,
    pub rng_seed: Option<u64>,
    /// Seed-group directories used by the command; relative paths lie inside
    /// the output directory.
    pub seed_files: Vec<PathBuf>,
    /// Files written, relative to the output directory.
    pub artifacts: Vec<String>,
    pub exit_code: i32,
    pub started_unix: u64,
    pub finished_unix: u64,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Json { path: path.into(), source: e })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// Human summary printed at the end of a command.
    pub summary: String,
    pub out_dir: PathBuf,
    pub artifacts: Vec<String>,
}

struct Writer {
    dir: PathBuf,
    names: Vec<String>,
    seed_files: Vec<PathBuf>,
}

impl Writer {
    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn seed_dir(&mut self, name: &str, groups: &[SeedGroup]) -> Result<()> {
        write_seed_dir(groups, &self.dir.join(name))?;
        for (g, group) in groups.iter().enumerate() {
            for i in 0..group.len() {
                self.names.push(format!("{name}/g{g}_f{i}.tt"));
            }
        }
        self.names.push(format!("{name}/{SEED_MANIFEST}"));
        Ok(())
    }
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn jsonl(records: &[serde_json::Value]) -> String {
    records.iter().map(|r| r.to_string() + "\n").collect()
}

/// Runs a command into `out_dir` and writes its manifest.
pub fn execute(cmd: &Command, out_dir: &Path) -> Result<Outcome> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let started = now_unix();
    let mut w = Writer { dir: out_dir.to_path_buf(), names: Vec::new(), seed_files: Vec::new() };
    let (code, summary) = match cmd {
        Command::EvolveFn { n, target_nl, objective, evolver } => evolve_fn(&mut w, *n, *target_nl, *objective, evolver)?,
        Command::EvolveCons { experiment } => evolve_cons(&mut w, experiment)?,
        Command::TestCons { tree, s, k, test_dirs, sizes, targets } => {
            test_cons(&mut w, tree, *s, *k, test_dirs, sizes, targets)?
        }
        Command::Analyze { trees, s, k, relation, restrict_to } => analyze(&mut w, trees, *s, *k, *relation, *restrict_to)?,
        Command::Bootstrap { tree, s, k, base_dir, levels } => run_bootstrap(&mut w, tree, *s, *k, base_dir, *levels)?,
        Command::Seeds { request } => seeds(&mut w, request)?,
    };
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: cmd.clone(),
        rng_seed: cmd.rng_seed(),
        seed_files: w.seed_files.clone(),
        artifacts: w.names.clone(),
        exit_code: code,
        started_unix: started,
        finished_unix: now_unix(),
    };
    let path = out_dir.join(MANIFEST);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Json { path: path.clone(), source: e })?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(Outcome { code, summary, out_dir: out_dir.to_path_buf(), artifacts: w.names })
}

/// Re-executes the command recorded in a manifest.
pub fn replay(manifest: &Path, out_dir: &Path) -> Result<Outcome> {
    execute(&RunManifest::read(manifest)?.command, out_dir)
}

/// Compares every artifact of a manifest between two output directories.
pub fn compare_artifacts(manifest: &RunManifest, a: &Path, b: &Path) -> Vec<(String, bool)> {
    manifest
        .artifacts
        .iter()
        .map(|name| {
            let same = match (fs::read(a.join(name)), fs::read(b.join(name))) {
                (Ok(x), Ok(y)) => x == y,
                _ => false,
            };
            (name.clone(), same)
        })
        .collect()
}

/// Human summary of an output directory.
pub fn report(dir: &Path) -> Result<String> {
    let manifest = RunManifest::read(&dir.join(MANIFEST))?;
    let mut out = format!(
        "command: {}\nversion: {}\nexit code: {}\nrng seed: {}\nelapsed: {} s\nartifacts: {}\n",
        manifest.command.name(),
        manifest.version,
        manifest.exit_code,
        manifest.rng_seed.map_or("-".to_string(), |s| s.to_string()),
        manifest.finished_unix.saturating_sub(manifest.started_unix),
        manifest.artifacts.len()
    );
    for name in ["summary.txt", "report.txt"] {
        if manifest.artifacts.iter().any(|a| a == name) {
            let path = dir.join(name);
            out.push('\n');
            out.push_str(&fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?);
        }
    }
    Ok(out)
}

fn history_records(results: &[RunResult]) -> Vec<serde_json::Value> {
    results
        .iter()
        .flat_map(|r| {
            r.fitness_history
                .iter()
                .map(move |h| json!({"run": r.run_index, "evaluation": h.evaluation, "best": h.best, "size": h.size}))
        })
        .collect()
}

fn evolve_fn(
    w: &mut Writer,
    n: u32,
    target_nl: Option<u64>,
    objective: ObjectiveKind,
    evolver: &EvolverConfig,
) -> Result<(i32, String)> {
    let eval = FunctionEvaluator::new(n, objective)?;
    evolver.validate()?;
    let results = run_batch(evolver, &eval)?;
    let target = target_nl.or_else(|| best_known_nl(n));
    let mut records = Vec::new();
    let mut nls = Vec::new();
    let mut reached = 0;
    let mut best: Option<(f64, TruthTable)> = None;
    for r in &results {
        let f = eval.function(&r.best_tree)?;
        let nl = nonlinearity(&f);
        let balanced = f.is_balanced();
        let ok = balanced && target.map_or(true, |t| nl >= t);
        reached += usize::from(ok);
        nls.push(nl);
        records.push(json!({
            "run": r.run_index,
            "fitness": r.best_fitness.value,
            "nl": nl,
            "balanced": balanced,
            "reached": ok,
            "evaluations": r.evaluations_used,
            "size": r.best_tree.size(),
            "tree": r.best_tree.to_string(),
            "function": f.to_hex(),
        }));
        if best.as_ref().map_or(true, |(v, _)| r.best_fitness.value > *v) {
            best = Some((r.best_fitness.value, f));
        }
    }
    let (_, best_fn) = best.expect("at least one run");
    w.write("best.tt", &best_fn.to_file_string())?;
    w.write("runs.jsonl", &jsonl(&records))?;
    w.write("history.jsonl", &jsonl(&history_records(&results)))?;
    let max = *nls.iter().max().expect("runs");
    let min = *nls.iter().min().expect("runs");
    let avg = nls.iter().sum::<u64>() as f64 / nls.len() as f64;
    let at_max = nls.iter().filter(|&&v| v == max).count();
    let target_text = target.map_or("-".to_string(), |t| t.to_string());
    let summary = format!(
        "n\ttarget\tmin\tavg\tmax\t#max\treached\n{n}\t{target_text}\t{min}\t{avg:.2}\t{max}\t{at_max}\t{reached}/{}\n",
        results.len()
    );
    w.write("summary.txt", &summary)?;
    Ok((if reached > 0 { EXIT_OK } else { EXIT_NEGATIVE }, summary))
}

fn evolve_cons(w: &mut Writer, exp: &ExperimentConfig) -> Result<(i32, String)> {
    exp.validate()?;
    let groups = make_seed_groups(&exp.seed_request())?;
    match &exp.seed_source {
        SeedSource::File(dir) => w.seed_files.push(dir.clone()),
        _ => {
            w.seed_dir("seeds", &groups)?;
            w.seed_files.push(PathBuf::from("seeds"));
        }
    }
    w.write("config.txt", &config::experiment_to_string(exp))?;
    let eval = ConstructionEvaluator::new(exp.k, &group_tables(&groups), exp.objective, exp.fitness)?;
    let results = run_batch(&exp.evolver, &eval)?;
    let target = exp.local_target();
    let mut records = Vec::new();
    let mut lines = String::new();
    let mut optimal = 0;
    let mut trees = format!("# {} best tree per run\n", exp.label());
    for r in &results {
        let mut nls = Vec::with_capacity(groups.len());
        let mut balanced = true;
        for g in 0..groups.len() {
            let f = eval.resulting_function(&r.best_tree, g)?;
            balanced &= f.is_balanced();
            nls.push(nonlinearity(&f));
        }
        let min_nl = nls.iter().copied().min().unwrap_or(0);
        let local = balanced && min_nl >= target;
        optimal += usize::from(local);
        trees.push_str(&format!("{}\n", r.best_tree));
        records.push(json!({
            "run": r.run_index,
            "fitness": r.best_fitness.value,
            "per_group": r.best_fitness.per_group,
            "missing_terminals": r.best_fitness.missing_terminals,
            "resulting_nl": nls,
            "balanced": balanced,
            "locally_optimal": local,
            "evaluations": r.evaluations_used,
            "size": r.best_tree.size(),
            "tree": r.best_tree.to_string(),
        }));
        lines.push_str(&format!(
            "run {:>2}: fitness {:.4} min nl {min_nl} balanced {balanced} size {}{}\n",
            r.run_index,
            r.best_fitness.value,
            r.best_tree.size(),
            if local { " locally optimal" } else { "" }
        ));
    }
    w.write("trees.txt", &trees)?;
    w.write("runs.jsonl", &jsonl(&records))?;
    w.write("history.jsonl", &jsonl(&history_records(&results)))?;
    let summary = format!(
        "experiment {} k={} objective {} size {} target nl {target}\n{lines}locally optimal: {optimal}/{}\n",
        exp.label(),
        exp.k,
        exp.objective.name(),
        exp.result_size(),
        results.len()
    );
    w.write("summary.txt", &summary)?;
    Ok((if optimal > 0 { EXIT_OK } else { EXIT_NEGATIVE }, summary))
}

/// Reads seed directories keyed by resulting size `n + k`. Each path is either
/// a seed directory or a directory of seed directories.
pub fn load_test_sets(dirs: &[PathBuf], k: usize) -> Result<BTreeMap<u32, Vec<SeedGroup>>> {
    let mut found = Vec::new();
    for dir in dirs {
        if dir.join(SEED_MANIFEST).is_file() {
            found.push(dir.clone());
            continue;
        }
        let mut subdirs: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join(SEED_MANIFEST).is_file())
            .collect();
        subdirs.sort();
        if subdirs.is_empty() {
            return Err(Error::Config(format!("no seed directories under {}", dir.display())));
        }
        found.extend(subdirs);
    }
    let mut sets: BTreeMap<u32, Vec<SeedGroup>> = BTreeMap::new();
    for dir in found {
        let groups = read_seed_dir(&dir)?;
        let size = groups[0].num_vars() + k as u32;
        let entry = sets.entry(size).or_default();
        if let Some(first) = entry.first() {
            if first.len() != groups[0].len() || first.declared_nl != groups[0].declared_nl {
                return Err(Error::SeedShape(format!("seed sets of size {size} disagree ({})", dir.display())));
            }
        }
        entry.extend(groups);
    }
    Ok(sets)
}

fn test_cons(
    w: &mut Writer,
    tree: &str,
    s: usize,
    k: usize,
    test_dirs: &[PathBuf],
    sizes: &[u32],
    targets: &TargetTable,
) -> Result<(i32, String)> {
    let tree = parse_tree(tree, &TerminalSet::new(k, s))?;
    let mut sets = load_test_sets(test_dirs, k)?;
    w.seed_files.extend(test_dirs.iter().cloned());
    let mut warnings = String::new();
    if !sizes.is_empty() {
        for size in sizes {
            if !sets.contains_key(size) {
                warnings.push_str(&format!("warning: no test seeds for size {size}; skipped\n"));
            }
        }
        sets.retain(|size, _| sizes.contains(size));
    }
    let report = test_generality(&tree, k, &sets, targets)?;
    let text = format!("tree: {tree}\n{warnings}{}\n{}", report.summary(), report.table());
    w.write("report.txt", &text)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Json { path: w.dir.join("report.json"), source: e })?;
    w.write("report.json", &(json + "\n"))?;
    Ok((if report.general { EXIT_OK } else { EXIT_NEGATIVE }, text))
}

fn analyze(
    w: &mut Writer,
    texts: &[String],
    s: usize,
    k: usize,
    relation: EquivRelation,
    restrict_to: Option<(usize, usize)>,
) -> Result<(i32, String)> {
    let terms = TerminalSet::new(k, s);
    let trees = texts.iter().map(|t| parse_tree(t, &terms)).collect::<Result<Vec<GpTree>>>()?;
    let stats = size_stats(&trees).ok_or_else(|| Error::Config("no trees to analyze".into()))?;
    let simplified = trees.iter().map(|t| simplify(t, s, k)).collect::<Result<Vec<_>>>()?;
    let used = trees
        .iter()
        .map(|t| abstractize(t, s, k).map(|a| seeds_used(&a)))
        .collect::<Result<Vec<_>>>()?;
    let mut summary = format!(
        "trees: {}\nsize min {} q1 {} median {} q3 {} max {}\n",
        trees.len(),
        stats.min,
        stats.q1,
        stats.median,
        stats.q3,
        stats.max
    );
    w.write("stats.json", &(serde_json::to_string_pretty(&stats).expect("plain data") + "\n"))?;
    let mut simp_text = String::new();
    for t in &simplified {
        simp_text.push_str(&format!("{t}\n"));
    }
    w.write("simplified.txt", &simp_text)?;

    let mut class_of = vec![None; trees.len()];
    if trees.len() >= 2 {
        let fns = trees
            .iter()
            .map(|t| match restrict_to {
                Some((ts, tk)) => normalize(t, s, k, ts, tk),
                None => abstractize(t, s, k),
            })
            .collect::<Result<Vec<_>>>()?;
        let graph = equivalence_graph_of(&fns, relation)?;
        for (i, c) in graph.class_of().into_iter().enumerate() {
            class_of[i] = Some(c);
        }
        w.write("adjacency.txt", &graph.grid())?;
        let distinct: BTreeSet<usize> = used.iter().copied().collect();
        let used_text: Vec<String> = distinct.iter().map(usize::to_string).collect();
        let classes = format!(
            "classes\tmax_size\tseeds_used\n{}\t{}\t{}\n",
            graph.num_classes(),
            graph.max_class_size(),
            used_text.join(",")
        );
        w.write("classes.tsv", &classes)?;
        summary.push_str(&format!(
            "relation {}: {} classes, largest {}\n",
            relation.name(),
            graph.num_classes(),
            graph.max_class_size()
        ));
    } else {
        summary.push_str("fewer than 2 trees: equivalence graph skipped\n");
    }

    let mut rows = String::from("index\tsize\tsimplified_size\tseeds_used\tessential\tclass\n");
    for (i, t) in trees.iter().enumerate() {
        let ess: Vec<String> = essential_terminals(&abstractize(t, s, k)?).iter().map(|t| t.to_string()).collect();
        let class = class_of[i].map_or("-".to_string(), |c| c.to_string());
        rows.push_str(&format!(
            "{i}\t{}\t{}\t{}\t{}\t{class}\n",
            t.size(),
            simplified[i].size(),
            used[i],
            ess.join(",")
        ));
    }
    w.write("sizes.tsv", &rows)?;

    match select_simplest(&trees) {
        Some(i) => {
            let text = format!("index {i}\ntree {}\nsimplified {}\n", trees[i], simplified[i]);
            summary.push_str(&format!("simplest: #{i} {} -> {}\n", trees[i], simplified[i]));
            w.write("simplest.txt", &text)?;
        }
        None => summary.push_str("simplest: no tree meets the selection criteria\n"),
    }
    w.write("summary.txt", &summary)?;
    Ok((EXIT_OK, summary))
}

fn run_bootstrap(w: &mut Writer, tree: &str, s: usize, k: usize, base_dir: &Path, levels: usize) -> Result<(i32, String)> {
    let tree = parse_tree(tree, &TerminalSet::new(k, s))?;
    let base = read_seed_dir(base_dir)?;
    w.seed_files.push(base_dir.to_path_buf());
    let outcome = bootstrap(&tree, k, &base, levels)?;
    for (l, groups) in outcome.levels.iter().enumerate() {
        w.seed_dir(&format!("level_{l}"), groups)?;
    }
    let mut text = format!("tree: {tree}\n{}", outcome.table());
    let code = match &outcome.halted {
        Some(why) => {
            text.push_str(&format!(
                "halted: {why}; last valid level {}\n",
                outcome.levels.len() - 1
            ));
            EXIT_NEGATIVE
        }
        None => EXIT_OK,
    };
    w.write("report.txt", &text)?;
    Ok((code, text))
}

fn seeds(w: &mut Writer, req: &SeedRequest) -> Result<(i32, String)> {
    let groups = make_seed_groups(req)?;
    w.seed_dir("seeds", &groups)?;
    let summary = format!(
        "{} groups of {} seeds, n={}, nl={}\n",
        groups.len(),
        req.s,
        req.n,
        groups[0].declared_nl
    );
    w.write("summary.txt", &summary)?;
    Ok((EXIT_OK, summary))
}

/// Reads trees from a file, or from `trees.txt` inside a directory.
pub fn read_tree_texts(path: &Path, s: usize, k: usize) -> Result<Vec<String>> {
    let file = if path.is_dir() { path.join("trees.txt") } else { path.to_path_buf() };
    let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
    let trees = parse_tree_list(&text, &TerminalSet::new(k, s))?;
    Ok(trees.iter().map(GpTree::to_string).collect())
}
