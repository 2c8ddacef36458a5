use seqmix::case_study;
use seqmix::case_study::SweepConfig;
use seqmix::optimize::{
    bfgs_maximize, chebyshev_objective, default_dt_seeds, optimize_chebyshev, optimize_dt, simple_objective,
    BfgsOptions,
};
use seqmix::schedules::angles_from_schedule;
use seqmix::sim::{pr_opt, qaoa_state};
use seqmix::{ChebyshevSchedule, Error, MixerMode, MixingFamily, ProblemInstance, QaoaSimulator, Schedule};

#[test]
fn dt_search_beats_a_dense_scan() {
    let inst = case_study::instance();
    let sim = QaoaSimulator::new(&inst, &MixingFamily::min(&inst)).unwrap();
    let p = 4;
    let r = optimize_dt(&sim, 3, p, MixerMode::Sequential, None).unwrap();
    let scan = (1..=1000)
        .map(|i| simple_objective(&sim, 3, p, i as f64 * 0.01, MixerMode::Sequential).unwrap())
        .fold(0.0, f64::max);
    assert!(r.best_value >= scan - 1e-9, "{} < {scan}", r.best_value);
    assert_eq!(r.seed_trace.len(), default_dt_seeds().len());
    assert_eq!(r.method, "golden-section");
    assert!(r.evaluations > r.seed_trace.len());
}

#[test]
fn flat_landscape_keeps_the_smallest_seed() {
    // One feasible state: Pr_opt is identically 1.
    let inst = ProblemInstance::new(vec![1, 1, 2], 0, vec![0.0; 3], vec![], Some("000".parse().unwrap())).unwrap();
    let sim = QaoaSimulator::new(&inst, &MixingFamily::min(&inst)).unwrap();
    let r = optimize_dt(&sim, 2, 3, MixerMode::Sequential, Some(&[3.0, 1.5, 2.0])).unwrap();
    assert!((1.25..=1.75).contains(&r.best_params[0]), "{:?}", r.best_params);
    assert!((r.best_value - 1.0).abs() < 1e-12);
}

#[test]
fn dt_search_argument_checks() {
    let inst = case_study::instance();
    let sim = QaoaSimulator::new(&inst, &MixingFamily::min(&inst)).unwrap();
    assert!(matches!(
        optimize_dt(&sim, 3, 0, MixerMode::Sequential, None),
        Err(Error::OutOfRange(_))
    ));
    assert!(matches!(
        optimize_dt(&sim, 3, 2, MixerMode::Sequential, Some(&[])),
        Err(Error::OutOfRange(_))
    ));
}

#[test]
fn bfgs_solves_rosenbrock() {
    let f = |x: &[f64]| Ok(-(100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)));
    let opts = BfgsOptions {
        max_iterations: 2000,
        fd_step: 1e-6,
        ..BfgsOptions::default()
    };
    let (x, v, iters, trace) = bfgs_maximize(&f, &[-1.2, 1.0], opts).unwrap();
    assert!(
        (x[0] - 1.0).abs() < 1e-3 && (x[1] - 1.0).abs() < 2e-3,
        "{x:?} after {iters}"
    );
    assert!(v > -1e-6);
    assert!(trace.windows(2).all(|w| w[1].value >= w[0].value));
    assert_eq!(trace.len(), iters + 1);
}

#[test]
fn bfgs_respects_iteration_cap() {
    let f = |x: &[f64]| Ok(-(100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)));
    let opts = BfgsOptions {
        max_iterations: 3,
        ..BfgsOptions::default()
    };
    let (_, _, iters, _) = bfgs_maximize(&f, &[-1.2, 1.0], opts).unwrap();
    assert!(iters <= 3);
}

#[test]
fn bfgs_propagates_objective_errors() {
    let f = |_: &[f64]| Err(Error::DomainError(2.0));
    assert!(matches!(
        bfgs_maximize(&f, &[0.0], BfgsOptions::default()),
        Err(Error::DomainError(_))
    ));
}

#[test]
fn chebyshev_refinement_improves_the_fitted_start() {
    let inst = case_study::instance();
    let sim = QaoaSimulator::new(&inst, &MixingFamily::min(&inst)).unwrap();
    let p = 4;
    let dt = optimize_dt(&sim, 3, p, MixerMode::Sequential, None)
        .unwrap()
        .best_params[0];
    let init = ChebyshevSchedule::fit_simple(3, dt, 6);
    let start = chebyshev_objective(&sim, p, &init.to_params(), MixerMode::Sequential).unwrap();
    let r = optimize_chebyshev(&sim, p, &init, MixerMode::Sequential, BfgsOptions::default()).unwrap();
    assert!(r.best_value > start);
    assert_eq!(r.best_params.len(), 18);
    assert!(r.trace.windows(2).all(|w| w[1].value >= w[0].value));
    assert_eq!(r.trace.last().unwrap().value, r.best_value);
    let csv = r.trace_csv();
    assert!(csv.starts_with("iteration,value,grad_norm,step\n"));
    assert_eq!(csv.lines().count(), r.trace.len() + 1);
}

#[test]
fn stored_values_match_a_fresh_simulation() {
    let inst = case_study::instance();
    let sim = QaoaSimulator::new(&inst, &MixingFamily::mu_max(&inst, 3).unwrap()).unwrap();
    let p = 8;
    let dt = optimize_dt(&sim, 3, p, MixerMode::Sequential, None).unwrap();
    let angles = angles_from_schedule(&Schedule::Simple { k: 3 }, p, dt.best_params[0]).unwrap();
    let state = qaoa_state(
        &inst,
        &MixingFamily::mu_max(&inst, 3).unwrap(),
        &angles,
        MixerMode::Sequential,
    )
    .unwrap();
    assert!((pr_opt(&state, &inst).unwrap() - dt.best_value).abs() < 1e-12);

    let init = ChebyshevSchedule::fit_simple(3, dt.best_params[0], 6);
    let opts = BfgsOptions {
        max_iterations: 20,
        ..BfgsOptions::default()
    };
    let r = optimize_chebyshev(&sim, p, &init, MixerMode::Sequential, opts).unwrap();
    let sched = Schedule::Chebyshev(ChebyshevSchedule::from_params(&r.best_params).unwrap());
    let state = sim
        .run(&angles_from_schedule(&sched, p, 1.0).unwrap(), MixerMode::Sequential)
        .unwrap();
    assert!((sim.pr_opt(&state) - r.best_value).abs() < 1e-12);
}

#[test]
fn chebyshev_probability_is_nondecreasing_in_depth() {
    let inst = case_study::instance();
    for (name, fam) in case_study::families(&inst) {
        let config = SweepConfig {
            p_max_simple: 32,
            p_max_chebyshev: 32,
            ..SweepConfig::default()
        };
        let sweep = case_study::sweep_family(&inst, name, &fam, &config).unwrap();
        let pr: Vec<f64> = sweep.points.iter().filter_map(|pt| pt.pr_chebyshev).collect();
        assert!(pr.len() >= 2);
        for w in pr.windows(2) {
            assert!(w[1] >= w[0] - 0.02, "{name}: {pr:?}");
        }
    }
}
