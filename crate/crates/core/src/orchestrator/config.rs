//! Flat `key = value` experiment files.
//!
//! ```text
//! # (2,4,4,B)
//! s = 2
//! n = 4
//! nl = 4
//! k = 2
//! fitness = B
//! objective = 2
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::construction::{bent_nl, best_known_nl, ExperimentConfig, SeedSource, SeedType};
use crate::error::{Error, Result};
use crate::evaluation::{FirstGroupOptions, FitnessKind, ObjectiveKind};
use crate::evolver::EvolverConfig;
use crate::gp::CrossoverKind;

const KEYS: [&str; 21] = [
    "s",
    "n",
    "nl",
    "k",
    "groups",
    "seed_type",
    "seed_source",
    "seed_rng_seed",
    "objective",
    "fitness",
    "target_val",
    "exact_trigger",
    "include_first_in_sum",
    "population",
    "max_depth",
    "mutation_prob",
    "budget",
    "runs",
    "rng_seed",
    "crossover",
    "count_initial",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().to_string();
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key {key}", lineno + 1)));
        }
    }
    Ok(out)
}

fn get<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    map.get(key)
        .map(|v| v.parse::<T>().map_err(|_| Error::Config(format!("bad value for {key}: {v:?}"))))
        .transpose()
}

fn required<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T> {
    get(map, key)?.ok_or_else(|| Error::Config(format!("missing key {key}")))
}

pub fn parse_experiment(text: &str) -> Result<ExperimentConfig> {
    let map = parse_pairs(text)?;
    if let Some(bad) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::Config(format!("unknown key {bad}")));
    }
    let s: usize = required(&map, "s")?;
    let n: u32 = required(&map, "n")?;
    let k: usize = required(&map, "k")?;
    let seed_type = match map.get("seed_type").map(String::as_str).unwrap_or("balanced") {
        "balanced" => SeedType::Balanced,
        "bent" => SeedType::Bent,
        other => return Err(Error::Config(format!("bad seed_type {other:?}"))),
    };
    let nl = match get(&map, "nl")? {
        Some(v) => v,
        None => match seed_type {
            SeedType::Bent if n % 2 == 0 => bent_nl(n),
            SeedType::Bent => return Err(Error::Config(format!("bent seeds need even n, got {n}"))),
            SeedType::Balanced => best_known_nl(n).ok_or_else(|| Error::Config(format!("missing key nl for n={n}")))?,
        },
    };
    let seed_source = match map.get("seed_source").map(String::as_str).unwrap_or("evolved") {
        "evolved" => SeedSource::Evolved,
        "bent" => SeedSource::Bent,
        other => match other.strip_prefix("dir:") {
            Some(path) => SeedSource::File(PathBuf::from(path)),
            None => return Err(Error::Config(format!("bad seed_source {other:?}"))),
        },
    };
    let objective = match map.get("objective") {
        None => ObjectiveKind::NlWithSpectrum,
        Some(v) => ObjectiveKind::from_name(v).ok_or_else(|| Error::Config(format!("bad objective {v:?}")))?,
    };
    let mut evolver = EvolverConfig::desk();
    if let Some(v) = get(&map, "population")? {
        evolver.population_size = v;
    }
    if let Some(v) = get(&map, "max_depth")? {
        evolver.max_depth = v;
    }
    if let Some(v) = get(&map, "mutation_prob")? {
        evolver.mutation_prob = v;
    }
    if let Some(v) = get(&map, "budget")? {
        evolver.budget = v;
    }
    if let Some(v) = get(&map, "runs")? {
        evolver.runs = v;
    }
    if let Some(v) = get(&map, "rng_seed")? {
        evolver.rng_seed = v;
    }
    if let Some(v) = get(&map, "count_initial")? {
        evolver.count_initial_evaluations = v;
    }
    if let Some(list) = map.get("crossover") {
        evolver.crossover_kinds = parse_crossovers(list)?;
    }
    let mut cfg = ExperimentConfig {
        s,
        n,
        nl,
        fitness: FitnessKind::SumAll,
        k,
        objective,
        seed_type,
        groups: get(&map, "groups")?.unwrap_or(4),
        seed_source,
        seed_rng_seed: get(&map, "seed_rng_seed")?.unwrap_or(1),
        evolver,
    };
    cfg.fitness = match map.get("fitness").map(String::as_str) {
        Some("A") | Some("a") | Some("first") => {
            let options = FirstGroupOptions {
                exact_trigger: get(&map, "exact_trigger")?.unwrap_or(false),
                include_first_in_sum: get(&map, "include_first_in_sum")?.unwrap_or(true),
            };
            let target_val = get(&map, "target_val")?.unwrap_or_else(|| cfg.local_target());
            FitnessKind::FirstGroup { target_val, options }
        }
        Some("B") | Some("b") | Some("sum") => FitnessKind::SumAll,
        Some("C") | Some("c") | Some("min") => FitnessKind::MinAll,
        Some(other) => return Err(Error::Config(format!("bad fitness {other:?}"))),
        None => return Err(Error::Config("missing key fitness".into())),
    };
    if !matches!(cfg.fitness, FitnessKind::FirstGroup { .. })
        && ["target_val", "exact_trigger", "include_first_in_sum"].iter().any(|k| map.contains_key(*k))
    {
        return Err(Error::Config("target_val and trigger options only apply to fitness A".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_crossovers(list: &str) -> Result<Vec<CrossoverKind>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| CrossoverKind::from_name(s).ok_or_else(|| Error::Config(format!("unknown crossover {s:?}"))))
        .collect()
}

/// Writes a config that [`parse_experiment`] reads back to the same value.
pub fn experiment_to_string(cfg: &ExperimentConfig) -> String {
    let mut out = format!("# {}\n", cfg.label());
    let mut put = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
    put("s", cfg.s.to_string());
    put("n", cfg.n.to_string());
    put("nl", cfg.nl.to_string());
    put("k", cfg.k.to_string());
    put("groups", cfg.groups.to_string());
    put("seed_type", match cfg.seed_type {
        SeedType::Balanced => "balanced".into(),
        SeedType::Bent => "bent".into(),
    });
    put("seed_source", match &cfg.seed_source {
        SeedSource::Evolved => "evolved".into(),
        SeedSource::Bent => "bent".into(),
        SeedSource::File(p) => format!("dir:{}", p.display()),
    });
    put("seed_rng_seed", cfg.seed_rng_seed.to_string());
    put("objective", cfg.objective.name().into());
    put("fitness", cfg.fitness.tag().to_string());
    if let FitnessKind::FirstGroup { target_val, options } = cfg.fitness {
        put("target_val", target_val.to_string());
        put("exact_trigger", options.exact_trigger.to_string());
        put("include_first_in_sum", options.include_first_in_sum.to_string());
    }
    let e = &cfg.evolver;
    put("population", e.population_size.to_string());
    put("max_depth", e.max_depth.to_string());
    put("mutation_prob", e.mutation_prob.to_string());
    put("budget", e.budget.to_string());
    put("runs", e.runs.to_string());
    put("rng_seed", e.rng_seed.to_string());
    let names: Vec<&str> = e.crossover_kinds.iter().map(|c| c.name()).collect();
    put("crossover", names.join(","));
    put("count_initial", e.count_initial_evaluations.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let cfg = parse_experiment("s = 2\nn = 4\nk = 2\nfitness = B # sum\n").unwrap();
        assert_eq!(cfg.label(), "(2,4,4,B)");
        assert_eq!(cfg.objective, ObjectiveKind::NlWithSpectrum);
        assert_eq!(cfg.evolver, EvolverConfig::desk());
        assert_eq!(cfg.local_target(), 24);
    }

    #[test]
    fn round_trip() {
        let text = "s=4\nn=5\nnl=12\nk=2\nfitness=A\nobjective=1\ngroups=3\nbudget=2000\nruns=2\ncrossover=onepoint,uniform\nseed_source=dir:/tmp/x\n";
        let cfg = parse_experiment(text).unwrap();
        assert_eq!(cfg.fitness, FitnessKind::first_group(56));
        assert_eq!(parse_experiment(&experiment_to_string(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "s=2\nn=4\nk=2\n",
            "s=2\nn=4\nk=2\nfitness=D\n",
            "s=2\nn=4\nk=2\nfitness=B\ncolour=red\n",
            "s=2\nn=4\nk=2\nfitness=B\nbudget=ten\n",
            "s=2\nn=4\nk=2\nfitness=B\ns=3\n",
            "s=2\nn=5\nk=2\nfitness=B\nseed_type=bent\n",
            "s=2\nn=4\nk=2\nfitness=B\ntarget_val=3\n",
            "s=2\nn=4\nk=2\nfitness=B\nbudget=10\n",
            "s=2\nn=4\nk=0\nfitness=B\n",
            "s=2\nn=4\nk=2\nfitness=B\ncrossover=bogus\n",
            "s=2\nn=4\nk=2\nfitness=B\nnot a pair\n",
        ] {
            assert!(matches!(parse_experiment(text), Err(Error::Config(_))), "{text}");
        }
    }
}
