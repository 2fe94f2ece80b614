use std::fs;
use std::path::Path;

use evocons::analysis::EquivRelation;
use evocons::construction::{read_seed_dir, SeedRequest, SeedSource, TargetTable};
use evocons::evaluation::ObjectiveKind;
use evocons::evolver::EvolverConfig;
use evocons::orchestrator::{
    config, execute, exit_code, load_test_sets, read_tree_texts, report, Command, RunManifest, EXIT_NEGATIVE,
    EXIT_OK, EXIT_USAGE, MANIFEST,
};

const CONCAT: &str = "IF(v0, f0, (v1 XOR f1))";

fn small() -> EvolverConfig {
    EvolverConfig { budget: 2000, runs: 2, population_size: 50, ..EvolverConfig::desk() }
}

fn seeds(root: &Path, name: &str, n: u32, groups: usize, rng_seed: u64) -> std::path::PathBuf {
    let out = root.join(name);
    let req = SeedRequest::evolved(2, n, groups, rng_seed);
    assert_eq!(execute(&Command::Seeds { request: req }, &out).unwrap().code, EXIT_OK);
    out.join("seeds")
}

#[test]
fn evolve_fn_trivial_target() {
    let tmp = tempfile::tempdir().unwrap();
    let cmd = Command::EvolveFn { n: 2, target_nl: Some(0), objective: ObjectiveKind::NlOnly, evolver: small() };
    let out = execute(&cmd, tmp.path()).unwrap();
    assert_eq!(out.code, EXIT_OK);
    let best = evocons::boolfun::TruthTable::read_file(&tmp.path().join("best.tt")).unwrap();
    assert!(best.is_balanced());
    assert_eq!(fs::read_to_string(tmp.path().join("runs.jsonl")).unwrap().lines().count(), 2);
}

#[test]
fn evolve_fn_unreachable_target_is_negative() {
    let tmp = tempfile::tempdir().unwrap();
    let cmd = Command::EvolveFn { n: 4, target_nl: Some(6), objective: ObjectiveKind::NlOnly, evolver: small() };
    assert_eq!(execute(&cmd, tmp.path()).unwrap().code, EXIT_NEGATIVE);
}

#[test]
fn evolve_cons_writes_trees_and_seeds() {
    let tmp = tempfile::tempdir().unwrap();
    let mut exp = config::parse_experiment("s=2\nn=4\nk=2\nfitness=B\ngroups=2\n").unwrap();
    exp.evolver = small();
    let out = execute(&Command::EvolveCons { experiment: exp.clone() }, tmp.path()).unwrap();
    assert!(out.code == EXIT_OK || out.code == EXIT_NEGATIVE);
    assert_eq!(read_tree_texts(tmp.path(), 2, 2).unwrap().len(), 2);
    assert_eq!(read_seed_dir(&tmp.path().join("seeds")).unwrap().len(), 2);
    let cfg = fs::read_to_string(tmp.path().join("config.txt")).unwrap();
    assert_eq!(config::parse_experiment(&cfg).unwrap(), exp);
    let manifest = RunManifest::read(&tmp.path().join(MANIFEST)).unwrap();
    assert_eq!(manifest.command, Command::EvolveCons { experiment: exp });
    assert!(manifest.artifacts.iter().all(|a| tmp.path().join(a).is_file()));
    assert!(report(tmp.path()).unwrap().contains("evolve-cons"));
}

#[test]
fn evolve_cons_rejects_empty_seed_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    let mut exp = config::parse_experiment("s=2\nn=4\nk=2\nfitness=B\n").unwrap();
    exp.seed_source = SeedSource::File(empty);
    let err = execute(&Command::EvolveCons { experiment: exp }, &tmp.path().join("out")).unwrap_err();
    assert_eq!(exit_code(&err), EXIT_USAGE);
}

#[test]
fn test_cons_verdicts_and_skips() {
    let tmp = tempfile::tempdir().unwrap();
    let s4 = seeds(tmp.path(), "s4", 4, 2, 3);
    let s5 = seeds(tmp.path(), "s5", 5, 2, 4);
    let run = |tree: &str, sizes: Vec<u32>, name: &str| {
        let cmd = Command::TestCons {
            tree: tree.into(),
            s: 2,
            k: 2,
            test_dirs: vec![s4.clone(), s5.clone()],
            sizes,
            targets: TargetTable::ConstructionResults,
        };
        execute(&cmd, &tmp.path().join(name)).unwrap()
    };
    let general = run(CONCAT, vec![], "a");
    assert_eq!(general.code, EXIT_OK);
    assert!(general.summary.contains("verdict: general"));
    let skipped = run(CONCAT, vec![7, 9], "b");
    assert_eq!(skipped.code, EXIT_OK);
    assert!(skipped.summary.contains("no test seeds for size 9"));
    assert!(!skipped.summary.contains("size  6"));
    let bad = run("(f0 XOR f1)", vec![], "c");
    assert_eq!(bad.code, EXIT_NEGATIVE);
    assert!(bad.summary.contains("first failure: size 6, group 0"));
    let json = fs::read_to_string(tmp.path().join("a/report.json")).unwrap();
    let parsed: evocons::construction::GeneralityReport = serde_json::from_str(&json).unwrap();
    assert!(parsed.general);
}

#[test]
fn test_sets_from_parent_directory() {
    let tmp = tempfile::tempdir().unwrap();
    seeds(tmp.path(), "s4", 4, 2, 3);
    seeds(tmp.path(), "s5", 5, 1, 4);
    let parent = tmp.path().join("all");
    fs::create_dir_all(&parent).unwrap();
    fs::rename(tmp.path().join("s4/seeds"), parent.join("a")).unwrap();
    fs::rename(tmp.path().join("s5/seeds"), parent.join("b")).unwrap();
    let sets = load_test_sets(&[parent], 2).unwrap();
    assert_eq!(sets.keys().copied().collect::<Vec<_>>(), vec![6, 7]);
    assert_eq!(sets[&6].len(), 2);
    assert!(load_test_sets(&[tmp.path().join("s4")], 2).is_err());
}

#[test]
fn analyze_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let trees = vec![
        CONCAT.to_string(),
        "IF(v1, f1, (f0 XOR v0))".to_string(),
        "(f0 XOR f1)".to_string(),
    ];
    let cmd = Command::Analyze { trees, s: 2, k: 2, relation: EquivRelation::WITHIN_KIND, restrict_to: None };
    let out = execute(&cmd, tmp.path()).unwrap();
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(fs::read_to_string(tmp.path().join("adjacency.txt")).unwrap(), "1 1 0\n1 1 0\n0 0 1\n");
    assert_eq!(fs::read_to_string(tmp.path().join("classes.tsv")).unwrap(), "classes\tmax_size\tseeds_used\n2\t2\t2\n");
    let sizes = fs::read_to_string(tmp.path().join("sizes.tsv")).unwrap();
    assert_eq!(sizes.lines().count(), 4);

    let one = tmp.path().join("one");
    let cmd = Command::Analyze {
        trees: vec![CONCAT.into()],
        s: 2,
        k: 2,
        relation: EquivRelation::JOINT,
        restrict_to: None,
    };
    let out = execute(&cmd, &one).unwrap();
    assert!(out.summary.contains("equivalence graph skipped"));
    assert!(!one.join("adjacency.txt").exists());
    assert!(one.join("stats.json").exists());
}

#[test]
fn bootstrap_levels_and_halt() {
    let tmp = tempfile::tempdir().unwrap();
    let base = seeds(tmp.path(), "s5", 5, 1, 8);
    let run = |levels, base: &Path, name: &str| {
        let cmd = Command::Bootstrap { tree: CONCAT.into(), s: 2, k: 2, base_dir: base.to_path_buf(), levels };
        execute(&cmd, &tmp.path().join(name)).unwrap()
    };
    let two = run(2, &base, "two");
    assert_eq!(two.code, EXIT_OK);
    assert!(two.summary.contains("size\t7\t9\nseed_nl\t12\t56\nresulting_nl\t56\t240\n"));
    assert_eq!(read_seed_dir(&tmp.path().join("two/level_2")).unwrap()[0].declared_nl, 240);

    let zero = run(0, &base, "zero");
    assert_eq!(zero.code, EXIT_OK);
    assert_eq!(read_seed_dir(&tmp.path().join("zero/level_0")).unwrap(), read_seed_dir(&base).unwrap());

    let bent = tmp.path().join("bent");
    let mut req = SeedRequest::evolved(2, 4, 1, 1);
    req.seed_type = evocons::construction::SeedType::Bent;
    req.source = SeedSource::Bent;
    execute(&Command::Seeds { request: req }, &bent).unwrap();
    let halted = run(2, &bent.join("seeds"), "halted");
    assert_eq!(halted.code, EXIT_NEGATIVE);
    assert!(halted.summary.contains("halted: level 1"));
}

#[test]
fn bad_tree_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let base = seeds(tmp.path(), "s4", 4, 1, 2);
    let cmd = Command::Bootstrap { tree: "IF(v0, f7, f1)".into(), s: 2, k: 2, base_dir: base, levels: 1 };
    let err = execute(&cmd, &tmp.path().join("x")).unwrap_err();
    assert_eq!(exit_code(&err), EXIT_USAGE);
}
