use super::*;

fn fpca_spec(trials: usize, algos: Vec<Algo>) -> ExperimentSpec {
    let mut s = ExperimentSpec::new(ProblemSpec::Fpca { d: 20, n: 5, r: 2 }, algos);
    s.trials = trials;
    s.base_seed = 3;
    s.overrides.max_iters = Some(40);
    s
}

#[test]
fn seeds_follow_the_offsets() {
    let s = fpca_spec(3, vec![Algo::RadaRgd]);
    assert_eq!((s.data_seed(2), s.init_seed(2)), (5, 10_005));
}

#[test]
fn one_trial_one_algorithm_gives_one_row() {
    let r = run_experiment(&fpca_spec(1, vec![Algo::RadaRgd])).unwrap();
    assert_eq!(r.rows.len(), 1);
    let row = &r.rows[0];
    assert_eq!((row.problem.as_str(), row.algo.as_str(), row.seed), ("fpca", "rada-rgd", 3));
    assert_eq!((row.d, row.n, row.r, row.m), (20, 5, Some(2), Some(5)));
    assert!(row.error.is_none() && row.phi.unwrap().is_finite());
}

#[test]
fn rows_are_ordered_by_trial_then_algorithm() {
    let algos = vec![Algo::RadaRgd, Algo::Arpgda, Algo::Dsgm, Algo::Radmm];
    let r = run_experiment(&fpca_spec(3, algos.clone())).unwrap();
    assert_eq!(r.rows.len(), 12);
    for (i, row) in r.rows.iter().enumerate() {
        assert_eq!(row.seed, 3 + (i / 4) as u64);
        assert_eq!(row.algo, algos[i % 4].name());
    }
    // Summary means agree with a direct average.
    for s in &r.summary {
        let phis: Vec<f64> = r.rows.iter().filter(|x| x.algo == s.algo).map(|x| x.phi.unwrap()).collect();
        let mean = phis.iter().sum::<f64>() / phis.len() as f64;
        assert!((s.phi.unwrap() - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        assert_eq!(s.trials, 3);
    }
}

#[test]
fn solver_errors_are_recorded_and_the_run_continues() {
    // FPCA has no Lipschitz bundle, so the projected-gradient solver refuses it.
    let r = run_experiment(&fpca_spec(2, vec![Algo::RadaPgd, Algo::RadaRgd])).unwrap();
    assert_eq!(r.failures(), 2);
    assert!(r.rows[0].error.is_some() && !r.rows[0].converged);
    assert!(r.rows[1].error.is_none());
    assert_eq!(r.summary[0].failures, 2);
    assert_eq!(r.summary[0].phi, None);
}

#[test]
fn reruns_are_identical_up_to_timing() {
    let spec = fpca_spec(2, vec![Algo::RadaRgd, Algo::Radmm]);
    let strip = |mut r: ExperimentResult| {
        for row in &mut r.rows {
            row.cpu_seconds = None;
        }
        r.rows
    };
    assert_eq!(strip(run_experiment(&spec).unwrap()), strip(run_experiment(&spec).unwrap()));
}

#[test]
fn spca_rows_carry_variance_and_sparsity() {
    let mut s = ExperimentSpec::new(ProblemSpec::Spca { d: 20, n: 8, r: 2, mu: 0.5 }, vec![Algo::RadaRgd]);
    s.overrides.max_iters = Some(100);
    let row = &run_experiment(&s).unwrap().rows[0];
    let var = row.var.unwrap();
    assert!(var > 0.0 && var <= 1.0 + 1e-10);
    assert!((0.0..=100.0).contains(&row.sparsity.unwrap()));
    assert_eq!(row.nmi, None);
}

#[test]
fn invalid_specs_are_rejected() {
    let mut s = fpca_spec(0, vec![Algo::RadaRgd]);
    assert!(matches!(run_experiment(&s), Err(HarnessError::Usage(_))));
    s.trials = 1;
    s.algos.clear();
    assert!(run_experiment(&s).is_err());
    let bad = ExperimentSpec::new(ProblemSpec::Spca { d: 2, n: 3, r: 3, mu: 1.0 }, vec![Algo::RadaRgd]);
    assert!(run_experiment(&bad).is_err());
}

#[test]
fn family_defaults() {
    let ssc = ProblemSpec::SscSynth { n: 200, m: 3, mu: 0.005, feat_dim: 20 };
    let pgd = rada_config(&ssc, Algo::RadaPgd, &Overrides::default());
    assert_eq!((pgd.eps, pgd.inner_steps, pgd.pgd_step), (1e-4, 1, PgdStep::InverseSmoothing));
    assert_eq!(pgd.beta1, 40_000.0 * 3f64.sqrt());
    assert_eq!(rada_config(&ssc, Algo::RadaRgd, &Overrides::default()).inner_steps, 3);
    let b = baseline_config(&ssc, Baseline::Dsgm, &Overrides::default());
    assert_eq!((b.smoothing.coef, b.window), (1e-2, 50));

    let fpca = ProblemSpec::Fpca { d: 1000, n: 20, r: 2 };
    let c = rada_config(&fpca, Algo::RadaRgd, &Overrides::default());
    assert_eq!((c.eps, c.inner_steps, c.beta1), (1e-8, 5, 1e4 * 400.0 * 2f64.sqrt()));
    let a = baseline_config(&fpca, Baseline::Arpgda, &Overrides::default());
    assert_eq!((a.beta.coef, a.window, a.max_iters), (1e3 * 400.0 * 2f64.sqrt(), 1000, 20_000));

    let spca = ProblemSpec::Spca { d: 300, n: 50, r: 5, mu: 1.0 };
    let ov = Overrides {
        eps: Some(1e-6),
        inner_steps: Some(2),
        ..Overrides::default()
    };
    let s = rada_config(&spca, Algo::RadaRgd, &ov);
    assert_eq!((s.eps, s.inner_steps, s.beta1, s.max_iters), (1e-6, 2, 300.0 * 5f64.sqrt(), 50_000));
}
