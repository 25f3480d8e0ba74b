//! Named table grids for the `bench` command.

use std::sync::Arc;

use rada_core::problem::Dataset;

use crate::error::{HarnessError, Result};
use crate::experiment::{Algo, ExperimentSpec, Overrides, ProblemSpec};
use crate::io::{parse_dataset_csv, LoadOptions};

pub const PRESETS: [&str; 4] = ["table2", "table3", "table4", "table5"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scale {
    /// One representative grid point per table.
    Desk,
    /// The full grids with 20 trials.
    Full,
}

const IRIS: &str = include_str!("../data/iris.csv");

/// The bundled Iris data with its one duplicated sample removed (`N = 149`)
/// and each feature rescaled to `[0, 1]`.
pub fn iris() -> Result<Dataset> {
    let opts = LoadOptions {
        dedup: true,
        drop_rows: Vec::new(),
        min_max: true,
    };
    parse_dataset_csv(IRIS.as_bytes(), "iris.csv", "iris", &opts)
}

fn specs(problems: Vec<ProblemSpec>, algos: &[Algo], trials: usize, overrides: Overrides) -> Vec<ExperimentSpec> {
    problems
        .into_iter()
        .map(|p| {
            let mut s = ExperimentSpec::new(p, algos.to_vec());
            s.trials = trials;
            s.overrides = overrides.clone();
            s
        })
        .collect()
}

pub fn preset(name: &str, scale: Scale) -> Result<Vec<ExperimentSpec>> {
    let desk = scale == Scale::Desk;
    Ok(match name {
        "table2" => {
            let problems = if desk {
                vec![ProblemSpec::Spca {
                    d: 300,
                    n: 50,
                    r: 5,
                    mu: 1.0,
                }]
            } else {
                let mut v: Vec<ProblemSpec> = [0.5, 0.75, 1.0, 1.25, 1.5]
                    .into_iter()
                    .map(|mu| ProblemSpec::Spca { d: 1000, n: 50, r: 10, mu })
                    .collect();
                v.extend([4, 6, 8, 10, 12].into_iter().map(|r| ProblemSpec::Spca { d: 2000, n: 50, r, mu: 3.0 }));
                v
            };
            // The desk row uses the looser accuracy it is checked at.
            let ov = Overrides {
                eps: desk.then_some(1e-6),
                ..Overrides::default()
            };
            specs(problems, &[Algo::RadaRgd], if desk { 10 } else { 20 }, ov)
        }
        "table3" => {
            let problems = if desk {
                vec![ProblemSpec::Fpca { d: 200, n: 20, r: 4 }]
            } else {
                let mut v: Vec<ProblemSpec> =
                    [20, 25, 30, 35, 40].into_iter().map(|n| ProblemSpec::Fpca { d: 1000, n, r: 2 }).collect();
                v.extend([200, 400, 600, 800, 1000].into_iter().map(|d| ProblemSpec::Fpca { d, n: 20, r: 4 }));
                v
            };
            let algos = [Algo::RadaRgd, Algo::Arpgda, Algo::Radmm, Algo::Dsgm];
            specs(problems, &algos, 20, Overrides::default())
        }
        "table4" => {
            let synth = |n, m, mu| ProblemSpec::SscSynth { n, m, mu, feat_dim: 20 };
            let problems = if desk {
                vec![synth(200, 3, 0.005)]
            } else {
                let mut v: Vec<ProblemSpec> = (2..=6).map(|m| synth(200, m, 0.005)).collect();
                v.extend([0.001, 0.002, 0.005, 0.01, 0.02].into_iter().map(|mu| synth(500, 3, mu)));
                v
            };
            let algos = [Algo::RadaPgd, Algo::RadaRgd, Algo::Arpgda, Algo::Radmm, Algo::Dsgm];
            specs(problems, &algos, if desk { 5 } else { 20 }, Overrides::default())
        }
        "table5" => {
            let problems = vec![ProblemSpec::SscData {
                data: Arc::new(iris()?),
                kappa: 0.2,
                mu: 0.005,
                m: 3,
            }];
            let algos = [Algo::RadaPgd, Algo::RadaRgd, Algo::Arpgda, Algo::Dsgm, Algo::Radmm];
            specs(problems, &algos, 1, Overrides::default())
        }
        other => {
            return Err(HarnessError::Usage(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    })
}
