use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use evocons::analysis::EquivRelation;
use evocons::construction::{SeedRequest, SeedSource, SeedType, TargetTable};
use evocons::evaluation::ObjectiveKind;
use evocons::evolver::EvolverConfig;
use evocons::orchestrator::{
    compare_artifacts, config, default_out_root, execute, exit_code, read_tree_texts, replay, report, Command,
    RunManifest, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, MANIFEST,
};
use evocons::Error;

/// Evolve, test and analyze secondary constructions of Boolean functions.
#[derive(Parser)]
#[command(name = "evocons", version)]
struct Cli {
    /// Output directory (default: $EVOCONS_OUT/<command>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct EvolverArgs {
    /// Population 500, 500 000 evaluations, 30 runs.
    #[arg(long)]
    paper_scale: bool,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    rng_seed: Option<u64>,
}

impl EvolverArgs {
    fn apply(&self, mut cfg: EvolverConfig) -> EvolverConfig {
        if self.paper_scale {
            let paper = EvolverConfig::paper();
            cfg.budget = paper.budget;
            cfg.runs = paper.runs;
            cfg.population_size = paper.population_size;
        }
        if let Some(v) = self.budget {
            cfg.budget = v;
        }
        if let Some(v) = self.runs {
            cfg.runs = v;
        }
        if let Some(v) = self.population {
            cfg.population_size = v;
        }
        if let Some(v) = self.rng_seed {
            cfg.rng_seed = v;
        }
        cfg
    }
}

#[derive(Args)]
struct TreeArgs {
    /// File holding the tree (first non-comment line).
    #[arg(long, conflicts_with = "expr")]
    tree: Option<PathBuf>,
    /// Tree given inline, e.g. "IF(v0, f0, (v1 XOR f1))".
    #[arg(long)]
    expr: Option<String>,
    #[arg(long, default_value_t = 2)]
    s: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
}

impl TreeArgs {
    fn text(&self) -> anyhow::Result<String> {
        match (&self.tree, &self.expr) {
            (_, Some(e)) => Ok(e.clone()),
            (Some(path), None) => read_tree_texts(path, self.s, self.k)?
                .into_iter()
                .next()
                .ok_or_else(|| anyhow!("no tree in {}", path.display())),
            (None, None) => bail!("give --tree FILE or --expr TEXT"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    Nl,
    NlSpectrum,
}

impl From<Objective> for ObjectiveKind {
    fn from(o: Objective) -> Self {
        match o {
            Objective::Nl => ObjectiveKind::NlOnly,
            Objective::NlSpectrum => ObjectiveKind::NlWithSpectrum,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Plain GP for a balanced n-variable function.
    EvolveFn {
        #[arg(long)]
        n: u32,
        /// Default: best known balanced nonlinearity for n.
        #[arg(long)]
        target_nl: Option<u64>,
        #[arg(long, value_enum, default_value = "nl-spectrum")]
        objective: Objective,
        #[command(flatten)]
        evolver: EvolverArgs,
    },
    /// Evolve constructions for an experiment file.
    EvolveCons {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        evolver: EvolverArgs,
    },
    /// Apply a construction to held-out seed groups.
    TestCons {
        #[command(flatten)]
        tree: TreeArgs,
        /// Seed directory, or a directory of seed directories; repeatable.
        #[arg(long = "test-dir", required = true)]
        test_dirs: Vec<PathBuf>,
        /// Resulting sizes to test, comma separated (default: all found).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u32>,
        /// results, best, seed, or a list such as 6:24,7:56.
        #[arg(long, default_value = "results")]
        targets: String,
    },
    /// Size statistics, equivalence classes and simplification of a tree list.
    Analyze {
        /// Tree file, or a run directory holding trees.txt.
        #[arg(long)]
        trees: PathBuf,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// kind, joint, kind+neg or joint+neg.
        #[arg(long, default_value = "kind")]
        relation: String,
        /// Restrict to essential terminals and pad to S,K before comparing.
        #[arg(long, value_parser = parse_pair)]
        restrict: Option<(usize, usize)>,
    },
    /// Feed a construction's outputs back in as seeds.
    Bootstrap {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        base: PathBuf,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Generate a seed directory.
    Seeds {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 4)]
        groups: usize,
        #[arg(long)]
        nl: Option<u64>,
        /// Bent seeds (inner product and affine variants).
        #[arg(long)]
        bent: bool,
        #[arg(long, default_value_t = 1)]
        rng_seed: u64,
    },
    /// Summarize an output directory, optionally re-running it from its manifest.
    Report {
        dir: PathBuf,
        /// Re-run into this directory and compare artifacts byte for byte.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected S,K")?;
    Ok((a.trim().parse().map_err(|_| "bad S")?, b.trim().parse().map_err(|_| "bad K")?))
}

fn parse_targets(s: &str) -> anyhow::Result<TargetTable> {
    Ok(match s {
        "results" => TargetTable::ConstructionResults,
        "best" => TargetTable::BestKnown,
        "seed" => TargetTable::SeedRelative,
        list => {
            let mut map = BTreeMap::new();
            for item in list.split(',') {
                let (size, nl) = item.split_once(':').ok_or_else(|| anyhow!("bad target {item:?}"))?;
                map.insert(size.trim().parse()?, nl.trim().parse()?);
            }
            TargetTable::Custom(map)
        }
    })
}

fn out_dir(cli_out: &Option<PathBuf>, name: &str) -> PathBuf {
    cli_out.clone().unwrap_or_else(|| default_out_root().join(name))
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let command = match cli.cmd {
        Cmd::EvolveFn { n, target_nl, objective, evolver } => Command::EvolveFn {
            n,
            target_nl,
            objective: objective.into(),
            evolver: evolver.apply(EvolverConfig::desk()),
        },
        Cmd::EvolveCons { config: path, evolver } => {
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let mut experiment = config::parse_experiment(&text)?;
            experiment.evolver = evolver.apply(experiment.evolver);
            if let SeedSource::File(dir) = &experiment.seed_source {
                if dir.is_relative() {
                    let base = path.parent().unwrap_or(Path::new("."));
                    experiment.seed_source = SeedSource::File(base.join(dir));
                }
            }
            experiment.validate()?;
            Command::EvolveCons { experiment }
        }
        Cmd::TestCons { tree, test_dirs, sizes, targets } => Command::TestCons {
            tree: tree.text()?,
            s: tree.s,
            k: tree.k,
            test_dirs,
            sizes,
            targets: parse_targets(&targets)?,
        },
        Cmd::Analyze { trees, s, k, relation, restrict } => Command::Analyze {
            trees: read_tree_texts(&trees, s, k)?,
            s,
            k,
            relation: EquivRelation::from_name(&relation).ok_or_else(|| anyhow!("unknown relation {relation:?}"))?,
            restrict_to: restrict,
        },
        Cmd::Bootstrap { tree, base, levels } => Command::Bootstrap {
            tree: tree.text()?,
            s: tree.s,
            k: tree.k,
            base_dir: base,
            levels,
        },
        Cmd::Seeds { s, n, groups, nl, bent, rng_seed } => {
            let mut request = SeedRequest::evolved(s, n, groups, rng_seed);
            request.nl = nl;
            if bent {
                request.seed_type = SeedType::Bent;
                request.source = SeedSource::Bent;
            }
            Command::Seeds { request }
        }
        Cmd::Report { dir, replay: None } => {
            print!("{}", report(&dir)?);
            return Ok(EXIT_OK);
        }
        Cmd::Report { dir, replay: Some(target) } => {
            let manifest = RunManifest::read(&dir.join(MANIFEST))?;
            let outcome = replay(&dir.join(MANIFEST), &target)?;
            let diffs = compare_artifacts(&manifest, &dir, &target);
            let mut identical = true;
            for (name, same) in &diffs {
                println!("{} {name}", if *same { "same" } else { "DIFF" });
                identical &= same;
            }
            println!("replay exit code {}; artifacts {}", outcome.code, if identical { "identical" } else { "differ" });
            return Ok(if identical { EXIT_OK } else { EXIT_NEGATIVE });
        }
    };
    let out = out_dir(&cli.out, command.name());
    let outcome = execute(&command, &out)?;
    print!("{}", outcome.summary);
    println!("artifacts in {}", outcome.out_dir.display());
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_OK as u8 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.downcast_ref::<Error>().map_or(EXIT_USAGE, exit_code) as u8)
        }
    }
}
