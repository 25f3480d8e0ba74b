//! The `rada` command line.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::config::{config_args, parse_config};
use crate::error::{HarnessError, Result};
use crate::experiment::{run_experiment, Algo, ExperimentResult, ExperimentSpec, Overrides, ProblemSpec};
use crate::io::{load_dataset_csv, LoadOptions};
use crate::output::{render_summary, write_result, Format};
use crate::presets::{preset, Scale};
use crate::selftest::run_selftest;

#[derive(Debug, Parser)]
#[command(name = "rada", version, about = "Riemannian alternating descent ascent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Algorithms to run (repeatable).
    #[arg(long = "algo", value_enum)]
    algos: Vec<Algo>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    /// Inner steps per outer iteration.
    #[arg(long = "T")]
    inner_steps: Option<usize>,
    /// Base seed: trial t uses seed+t for data and seed+10000+t for the start.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// `key = value` file mirroring these flags; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            eps: self.eps,
            beta1: self.beta1,
            inner_steps: self.inner_steps,
            max_iters: self.max_iters,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sparse PCA on Gaussian data.
    Spca {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        mu: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Fair PCA with one group per Gaussian sample.
    Fpca {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sparse spectral clustering on Gaussian points.
    SscSynth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 20)]
        feat_dim: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sparse spectral clustering on a labelled CSV dataset.
    SscCsv {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        m: usize,
        /// Drop repeated samples.
        #[arg(long)]
        dedup: bool,
        /// Zero-based sample indices to drop (repeatable).
        #[arg(long = "drop-row")]
        drop_rows: Vec<usize>,
        /// Rescale every feature to [0, 1] before building the affinity.
        #[arg(long)]
        min_max: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a named table preset.
    Bench {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(crate::presets::PRESETS))]
        preset: String,
        #[arg(long, value_enum, default_value_t = Scale::Desk)]
        scale: Scale,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suites.
    Selftest,
}

/// Splices flags from a `--config` file in after the subcommand.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>> {
    let pos = argv.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else {
        return Ok(argv);
    };
    let path = match argv[pos].split_once('=') {
        Some((_, p)) => p.to_string(),
        None => argv
            .get(pos + 1)
            .cloned()
            .ok_or_else(|| HarnessError::Usage("--config needs a path".into()))?,
    };
    let text = std::fs::read_to_string(&path).map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    let extra = config_args(&parse_config(&text, &path)?, &argv);
    let at = 2.min(argv.len());
    let mut out = argv[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

fn single(problem: ProblemSpec, common: &Common, default_algo: Algo) -> ExperimentSpec {
    let algos = if common.algos.is_empty() {
        vec![default_algo]
    } else {
        common.algos.clone()
    };
    let mut spec = ExperimentSpec::new(problem, algos);
    spec.trials = common.trials.unwrap_or(1);
    spec.base_seed = common.seed;
    spec.overrides = common.overrides();
    spec
}

fn bench_specs(name: &str, scale: Scale, common: &Common) -> Result<Vec<ExperimentSpec>> {
    let mut specs = preset(name, scale)?;
    let ov = common.overrides();
    for s in &mut specs {
        if !common.algos.is_empty() {
            s.algos = common.algos.clone();
        }
        if let Some(t) = common.trials {
            s.trials = t;
        }
        s.base_seed = common.seed;
        s.overrides = Overrides {
            eps: ov.eps.or(s.overrides.eps),
            beta1: ov.beta1.or(s.overrides.beta1),
            inner_steps: ov.inner_steps.or(s.overrides.inner_steps),
            max_iters: ov.max_iters.or(s.overrides.max_iters),
        };
    }
    Ok(specs)
}

/// Runs the specs in order and merges their rows and summaries.
pub fn run_all(specs: &[ExperimentSpec]) -> Result<ExperimentResult> {
    let mut merged = ExperimentResult {
        rows: Vec::new(),
        summary: Vec::new(),
    };
    for s in specs {
        let r = run_experiment(s)?;
        merged.rows.extend(r.rows);
        merged.summary.extend(r.summary);
    }
    Ok(merged)
}

fn emit(result: &ExperimentResult, common: &Common) -> Result<()> {
    match &common.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|source| HarnessError::Io {
                path: path.display().to_string(),
                source,
            })?;
            write_result(std::io::BufWriter::new(file), result, common.format)
        }
        None => write_result(std::io::stdout().lock(), result, common.format),
    }
}

fn execute(command: Command) -> Result<i32> {
    let (specs, common) = match command {
        Command::Selftest => {
            let checks = run_selftest();
            let mut failed = 0;
            let mut err = std::io::stderr().lock();
            for c in &checks {
                let status = if c.pass() { "PASS" } else { "FAIL" };
                failed += usize::from(!c.pass());
                let _ = writeln!(err, "{status} [{}] {}: {:e} (tol {:e})", c.suite, c.name, c.value, c.tol);
            }
            let _ = writeln!(err, "{} checks, {failed} failed", checks.len());
            return Ok(if failed == 0 { 0 } else { 2 });
        }
        Command::Spca { d, n, r, mu, common } => {
            (vec![single(ProblemSpec::Spca { d, n, r, mu }, &common, Algo::RadaRgd)], common)
        }
        Command::Fpca { d, n, r, common } => (vec![single(ProblemSpec::Fpca { d, n, r }, &common, Algo::RadaRgd)], common),
        Command::SscSynth {
            n,
            m,
            mu,
            feat_dim,
            common,
        } => {
            let p = ProblemSpec::SscSynth { n, m, mu, feat_dim };
            (vec![single(p, &common, Algo::RadaPgd)], common)
        }
        Command::SscCsv {
            dataset,
            kappa,
            mu,
            m,
            dedup,
            drop_rows,
            min_max,
            common,
        } => {
            let opts = LoadOptions {
                dedup,
                drop_rows,
                min_max,
            };
            let data = load_dataset_csv(&dataset, &opts)?;
            let p = ProblemSpec::SscData {
                data: Arc::new(data),
                kappa,
                mu,
                m,
            };
            (vec![single(p, &common, Algo::RadaPgd)], common)
        }
        Command::Bench { preset, scale, common } => (bench_specs(&preset, scale, &common)?, common),
    };
    let result = run_all(&specs)?;
    emit(&result, &common)?;
    let mut err = std::io::stderr().lock();
    let _ = write!(err, "{}", render_summary(&result));
    for r in result.rows.iter().filter(|r| r.error.is_some()) {
        let _ = writeln!(err, "error: {} seed {}: {}", r.algo, r.seed, r.error.as_deref().unwrap_or(""));
    }
    Ok(if result.failures() == 0 { 0 } else { 2 })
}

/// Exit code 0 on success, 1 on usage errors, 2 on solver failures.
pub fn cli_main<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let argv: Vec<String> = args.into_iter().collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HarnessError::Core(_) => 2,
                _ => 1,
            }
        }
    }
}
