//! Seeded trials over a problem family and an algorithm roster.

use std::sync::Arc;
use std::time::Instant;

use rada_core::baselines::{run_baseline_timed, run_sgs_admm_timed, Baseline, BaselineConfig, Power};
use rada_core::linalg::Mat;
use rada_core::manifold::{random_point, ManifoldPoint};
use rada_core::problem::{
    affinity_gaussian, affinity_inner_abs, build_laplacian, gen_gaussian_points, make_spca, make_ssc, spectral_init,
    Dataset, Fpca, Problem, Spca, Ssc,
};
use rada_core::rada::{run_rada_timed, InnerSolver, PgdStep, RadaConfig};
use rada_core::report::{Clock, RunReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::metrics::{cluster_from_solution, nmi, normalized_variance, sparsity_percent, SPARSITY_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    RadaPgd,
    RadaRgd,
    Arpgda,
    Dsgm,
    Radmm,
    SgsAdmm,
}

impl Algo {
    pub const ALL: [Algo; 6] = [Algo::RadaPgd, Algo::RadaRgd, Algo::Arpgda, Algo::Dsgm, Algo::Radmm, Algo::SgsAdmm];

    pub fn name(self) -> &'static str {
        match self {
            Algo::RadaPgd => "rada-pgd",
            Algo::RadaRgd => "rada-rgd",
            Algo::Arpgda => "arpgda",
            Algo::Dsgm => "dsgm",
            Algo::Radmm => "radmm",
            Algo::SgsAdmm => "sgs-admm",
        }
    }

    pub fn parse(s: &str) -> Option<Algo> {
        Algo::ALL.into_iter().find(|a| a.name() == s)
    }
}

#[derive(Debug, Clone)]
pub enum ProblemSpec {
    Spca { d: usize, n: usize, r: usize, mu: f64 },
    /// One group per sample, so `m = N`.
    Fpca { d: usize, n: usize, r: usize },
    /// Gaussian features of dimension `feat_dim`, affinity `|⟨a_i, a_j⟩|`.
    SscSynth { n: usize, m: usize, mu: f64, feat_dim: usize },
    /// A labelled dataset with Gaussian-kernel affinity.
    SscData { data: Arc<Dataset>, kappa: f64, mu: f64, m: usize },
}

impl ProblemSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ProblemSpec::Spca { .. } => "spca",
            ProblemSpec::Fpca { .. } => "fpca",
            ProblemSpec::SscSynth { .. } => "ssc-synth",
            ProblemSpec::SscData { .. } => "ssc-csv",
        }
    }

    fn is_ssc(&self) -> bool {
        matches!(self, ProblemSpec::SscSynth { .. } | ProblemSpec::SscData { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(HarnessError::Usage(s.to_string()));
        match *self {
            ProblemSpec::Spca { d, n, r, mu } => {
                if r == 0 || d < r || n == 0 {
                    return bad("spca needs 1 <= r <= d and n >= 1");
                }
                if !(mu > 0.0) {
                    return bad("spca needs mu > 0");
                }
            }
            ProblemSpec::Fpca { d, n, r } => {
                if r == 0 || d < r || n == 0 {
                    return bad("fpca needs 1 <= r <= d and n >= 1");
                }
            }
            ProblemSpec::SscSynth { n, m, mu, feat_dim } => {
                if m == 0 || n <= m || feat_dim == 0 {
                    return bad("ssc-synth needs 1 <= m < n and feat-dim >= 1");
                }
                if !(mu > 0.0) {
                    return bad("ssc-synth needs mu > 0");
                }
            }
            ProblemSpec::SscData { ref data, kappa, mu, m } => {
                if m == 0 || data.len() <= m {
                    return bad("ssc-csv needs 1 <= m < number of samples");
                }
                if !(mu > 0.0) || !(kappa > 0.0) {
                    return bad("ssc-csv needs mu > 0 and kappa > 0");
                }
            }
        }
        Ok(())
    }
}

/// Values that replace the per-family defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub eps: Option<f64>,
    pub beta1: Option<f64>,
    pub inner_steps: Option<usize>,
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    pub algos: Vec<Algo>,
    pub trials: usize,
    pub base_seed: u64,
    pub overrides: Overrides,
    pub kmeans_restarts: usize,
}

impl ExperimentSpec {
    pub fn new(problem: ProblemSpec, algos: Vec<Algo>) -> Self {
        ExperimentSpec {
            problem,
            algos,
            trials: 1,
            base_seed: 0,
            overrides: Overrides::default(),
            kmeans_restarts: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Usage("trials must be at least 1".into()));
        }
        if self.algos.is_empty() {
            return Err(HarnessError::Usage("no algorithm selected".into()));
        }
        self.problem.validate()
    }

    pub fn data_seed(&self, trial: usize) -> u64 {
        self.base_seed + trial as u64
    }

    pub fn init_seed(&self, trial: usize) -> u64 {
        self.base_seed + 10_000 + trial as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub problem: String,
    pub algo: String,
    pub seed: u64,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub r: Option<usize>,
    pub m: Option<usize>,
    pub mu: Option<f64>,
    pub kappa: Option<f64>,
    pub iters: Option<usize>,
    pub cpu_seconds: Option<f64>,
    pub phi: Option<f64>,
    pub var: Option<f64>,
    pub sparsity: Option<f64>,
    pub nmi: Option<f64>,
    /// Smallest and largest NMI over the k-means restarts.
    pub nmi_spread: Option<(f64, f64)>,
    pub rgs_gres: Option<f64>,
    pub rgs_yres: Option<f64>,
    pub ros_gres: Option<f64>,
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub problem: String,
    pub algo: String,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub r: Option<usize>,
    pub m: Option<usize>,
    pub mu: Option<f64>,
    pub kappa: Option<f64>,
    pub trials: usize,
    pub failures: usize,
    pub converged: usize,
    pub phi: Option<f64>,
    pub iters: Option<f64>,
    pub cpu_seconds: Option<f64>,
    pub var: Option<f64>,
    pub sparsity: Option<f64>,
    pub nmi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub rows: Vec<MetricsRow>,
    pub summary: Vec<Summary>,
}

impl ExperimentResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

struct WallClock(Instant);

impl Clock for WallClock {
    fn elapsed_seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

enum Instance {
    Spca(Spca),
    Fpca(Fpca),
    Ssc { p: Ssc, labels: Option<Vec<usize>> },
}

impl Instance {
    fn problem(&self) -> &dyn Problem {
        match self {
            Instance::Spca(p) => p,
            Instance::Fpca(p) => p,
            Instance::Ssc { p, .. } => p,
        }
    }
}

fn build(spec: &ProblemSpec, data_seed: u64, init_seed: u64) -> Result<(Instance, ManifoldPoint)> {
    Ok(match *spec {
        ProblemSpec::Spca { d, n, r, mu } => {
            let p = make_spca(gen_gaussian_points(d, n, data_seed).points, r, mu)?;
            let x0 = random_point(p.manifold(), init_seed);
            (Instance::Spca(p), x0)
        }
        ProblemSpec::Fpca { d, n, r } => {
            let p = Fpca::from_columns(&gen_gaussian_points(d, n, data_seed).points, r)?;
            let x0 = random_point(p.manifold(), init_seed);
            (Instance::Fpca(p), x0)
        }
        ProblemSpec::SscSynth { n, m, mu, feat_dim } => {
            let pts = gen_gaussian_points(feat_dim, n, data_seed).points;
            let l = build_laplacian(&affinity_inner_abs(&pts))?;
            let x0 = spectral_init(&l, m)?;
            (Instance::Ssc { p: make_ssc(l, m, mu)?, labels: None }, x0)
        }
        ProblemSpec::SscData { ref data, kappa, mu, m } => {
            let l = build_laplacian(&affinity_gaussian(&data.points, kappa)?)?;
            let x0 = spectral_init(&l, m)?;
            let p = make_ssc(l, m, mu)?;
            (
                Instance::Ssc {
                    p,
                    labels: data.labels.clone(),
                },
                x0,
            )
        }
    })
}

/// Dimensions `(d, N, r, m, μ, κ)` as reported in rows.
fn dims(spec: &ProblemSpec) -> (usize, usize, Option<usize>, Option<usize>, Option<f64>, Option<f64>) {
    match *spec {
        ProblemSpec::Spca { d, n, r, mu } => (d, n, Some(r), None, Some(mu), None),
        ProblemSpec::Fpca { d, n, r } => (d, n, Some(r), Some(n), None, None),
        ProblemSpec::SscSynth { n, m, mu, feat_dim } => (feat_dim, n, None, Some(m), Some(mu), None),
        ProblemSpec::SscData { ref data, kappa, mu, m } => (data.dim(), data.len(), None, Some(m), Some(mu), Some(kappa)),
    }
}

/// Accuracy, `β1`, and inner steps of the RADA family for a problem.
fn rada_defaults(spec: &ProblemSpec, inner: InnerSolver) -> (f64, f64, usize, usize) {
    match *spec {
        ProblemSpec::Spca { d, r, .. } => (1e-8, d as f64 * (r as f64).sqrt(), 10, 50_000),
        ProblemSpec::Fpca { n, r, .. } => {
            let m = n as f64;
            (1e-8, 1e4 * m * m * (r as f64).sqrt(), 5, 20_000)
        }
        ProblemSpec::SscSynth { n, m, .. } => ssc_defaults(n, m, 1e-4, inner),
        ProblemSpec::SscData { ref data, m, .. } => ssc_defaults(data.len(), m, 1e-3, inner),
    }
}

fn ssc_defaults(n: usize, m: usize, eps: f64, inner: InnerSolver) -> (f64, f64, usize, usize) {
    let t = match inner {
        InnerSolver::ProjectedGradient => 1,
        InnerSolver::RiemannianGradient => 3,
    };
    (eps, (n * n) as f64 * (m as f64).sqrt(), t, 20_000)
}

pub fn rada_config(spec: &ProblemSpec, algo: Algo, ov: &Overrides) -> RadaConfig {
    let inner = match algo {
        Algo::RadaPgd => InnerSolver::ProjectedGradient,
        _ => InnerSolver::RiemannianGradient,
    };
    let (eps, beta1, t, max_iters) = rada_defaults(spec, inner);
    let mut cfg = RadaConfig::new(
        ov.eps.unwrap_or(eps),
        ov.beta1.unwrap_or(beta1),
        ov.inner_steps.unwrap_or(t),
        inner,
    );
    cfg.max_iters = ov.max_iters.unwrap_or(max_iters);
    if spec.is_ssc() {
        cfg.pgd_step = PgdStep::InverseSmoothing;
    }
    cfg
}

pub fn baseline_config(spec: &ProblemSpec, algo: Baseline, ov: &Overrides) -> BaselineConfig {
    let (eps, beta1, _, max_iters) = rada_defaults(spec, InnerSolver::RiemannianGradient);
    let mut cfg = BaselineConfig::new(algo, ov.eps.unwrap_or(eps));
    cfg.max_iters = ov.max_iters.unwrap_or(max_iters);
    let beta_coef = match *spec {
        ProblemSpec::Fpca { n, r, .. } => 1e3 * (n * n) as f64 * (r as f64).sqrt(),
        _ => beta1,
    };
    cfg.beta = Power {
        coef: beta_coef,
        exponent: -1.5,
    };
    if spec.is_ssc() {
        cfg.smoothing = Power {
            coef: 1e-2,
            exponent: -1.0 / 3.0,
        };
        cfg.sigma = Power {
            coef: 0.1,
            exponent: 1.0 / 3.0,
        };
        cfg.window = 50;
    }
    cfg
}

fn run_one(inst: &Instance, spec: &ExperimentSpec, algo: Algo, x0: ManifoldPoint) -> rada_core::Result<RunReport> {
    let p = inst.problem();
    let y0 = p.prox_family().origin_projection();
    let clock = WallClock(Instant::now());
    let ov = &spec.overrides;
    match algo {
        Algo::RadaPgd | Algo::RadaRgd => run_rada_timed(p, &rada_config(&spec.problem, algo, ov), x0, y0, &clock),
        Algo::SgsAdmm => {
            let cfg = rada_config(&spec.problem, Algo::RadaRgd, ov);
            run_sgs_admm_timed(p, &cfg, x0, y0, &clock)
        }
        Algo::Arpgda | Algo::Dsgm | Algo::Radmm => {
            let b = match algo {
                Algo::Arpgda => Baseline::Arpgda,
                Algo::Dsgm => Baseline::Dsgm,
                _ => Baseline::Radmm,
            };
            run_baseline_timed(p, &baseline_config(&spec.problem, b, ov), x0, y0, &clock)
        }
    }
}

fn empty_row(spec: &ExperimentSpec, algo: Algo, seed: u64) -> MetricsRow {
    let (d, n, r, m, mu, kappa) = dims(&spec.problem);
    MetricsRow {
        problem: spec.problem.family().to_string(),
        algo: algo.name().to_string(),
        seed,
        d,
        n,
        r,
        m,
        mu,
        kappa,
        iters: None,
        cpu_seconds: None,
        phi: None,
        var: None,
        sparsity: None,
        nmi: None,
        nmi_spread: None,
        rgs_gres: None,
        rgs_yres: None,
        ros_gres: None,
        converged: false,
        error: None,
    }
}

fn fill(row: &mut MetricsRow, inst: &Instance, rep: &RunReport, spec: &ExperimentSpec, init_seed: u64) -> Result<()> {
    row.iters = Some(rep.iterations);
    row.cpu_seconds = Some(rep.elapsed);
    row.phi = Some(rep.phi);
    row.rgs_gres = Some(rep.rgs.g_res);
    row.rgs_yres = Some(rep.rgs.y_res);
    row.ros_gres = Some(rep.ros.g_res);
    row.converged = rep.converged;
    let x = rep.x.basis();
    match inst {
        Instance::Spca(p) => {
            let r = x.ncols();
            row.var = Some(normalized_variance(p.data(), x, r)?);
            row.sparsity = Some(sparsity_percent(x, SPARSITY_THRESHOLD));
        }
        Instance::Fpca(_) => {}
        Instance::Ssc { labels, .. } => {
            let q: Mat = x * x.transpose();
            row.sparsity = Some(sparsity_percent(&q, SPARSITY_THRESHOLD));
            if let Some(truth) = labels {
                let c = cluster_from_solution(x, spec.kmeans_restarts, init_seed)?;
                row.nmi = Some(nmi(&c.labels, truth)?);
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for (_, labels) in &c.restarts {
                    let v = nmi(labels, truth)?;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                row.nmi_spread = Some((lo, hi));
            }
        }
    }
    Ok(())
}

fn run_trial(spec: &ExperimentSpec, trial: usize) -> Vec<MetricsRow> {
    let seed = spec.data_seed(trial);
    let init_seed = spec.init_seed(trial);
    let built = build(&spec.problem, seed, init_seed);
    spec.algos
        .iter()
        .map(|&algo| {
            let mut row = empty_row(spec, algo, seed);
            let outcome = built
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|(inst, x0)| {
                    let rep = run_one(inst, spec, algo, x0.clone()).map_err(|e| e.to_string())?;
                    fill(&mut row, inst, &rep, spec, init_seed).map_err(|e| e.to_string())
                });
            if let Err(e) = outcome {
                row.error = Some(e);
                row.converged = false;
            }
            row
        })
        .collect()
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Means over the successful rows of each algorithm, in roster order.
pub fn summarize(rows: &[MetricsRow], algos: &[Algo]) -> Vec<Summary> {
    algos
        .iter()
        .filter_map(|a| {
            let mine: Vec<&MetricsRow> = rows.iter().filter(|r| r.algo == a.name()).collect();
            let first = mine.first()?;
            let ok: Vec<&&MetricsRow> = mine.iter().filter(|r| r.error.is_none()).collect();
            Some(Summary {
                problem: first.problem.clone(),
                algo: first.algo.clone(),
                d: first.d,
                n: first.n,
                r: first.r,
                m: first.m,
                mu: first.mu,
                kappa: first.kappa,
                trials: mine.len(),
                failures: mine.len() - ok.len(),
                converged: mine.iter().filter(|r| r.converged).count(),
                phi: mean(ok.iter().filter_map(|r| r.phi)),
                iters: mean(ok.iter().filter_map(|r| r.iters.map(|i| i as f64))),
                cpu_seconds: mean(ok.iter().filter_map(|r| r.cpu_seconds)),
                var: mean(ok.iter().filter_map(|r| r.var)),
                sparsity: mean(ok.iter().filter_map(|r| r.sparsity)),
                nmi: mean(ok.iter().filter_map(|r| r.nmi)),
            })
        })
        .collect()
}

/// Runs every trial (concurrently when threads are available) and returns
/// rows in `(trial, algorithm)` order. Solver failures are recorded in the
/// row and do not stop the run.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let per_trial: Vec<Vec<MetricsRow>> = (0..spec.trials).into_par_iter().map(|t| run_trial(spec, t)).collect();
    let rows: Vec<MetricsRow> = per_trial.into_iter().flatten().collect();
    let summary = summarize(&rows, &spec.algos);
    Ok(ExperimentResult { rows, summary })
}

#[cfg(test)]
mod tests;
