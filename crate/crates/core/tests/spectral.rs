mod common;

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use seqmix::case_study;
use seqmix::sim::{build_hamiltonians, Hamiltonians};
use seqmix::spectral::{
    adiabatic_timescale, adiabatic_timescale_with, default_grid, endpoint_overlaps, hamiltonian_at,
    hamiltonian_at_with, hamiltonian_derivative, spectrum_slice, uniform_grid, BetaPolicy, DEFAULT_LEVELS,
};
use seqmix::{ChebyshevSchedule, Error, MixingFamily, ProblemInstance, Schedule};

fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

fn case(fam: &str) -> (ProblemInstance, Hamiltonians) {
    let inst = case_study::instance();
    let f = case_study::families(&inst)
        .into_iter()
        .find(|(n, _)| *n == fam)
        .unwrap()
        .1;
    let h = build_hamiltonians(&inst, &f, None).unwrap();
    (inst, h)
}

/// `T_A(s)` from a fresh full eigensolve, lowest `m` levels.
fn t_a_oracle(h: &Hamiltonians, sched: &Schedule, s: f64, m: usize) -> f64 {
    let eig = SymmetricEigen::new(hamiltonian_at(h, sched, s).unwrap());
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let dh = hamiltonian_derivative(h, sched, s).unwrap();
    let v0 = eig.eigenvectors.column(idx[0]);
    let e0 = eig.eigenvalues[idx[0]];
    idx.iter()
        .take(m)
        .skip(1)
        .map(|&j| {
            let vj = eig.eigenvectors.column(j);
            let elem = (vj.transpose() * &dh * v0)[(0, 0)];
            elem.abs() / (e0 - eig.eigenvalues[j]).powi(2)
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn interior_gap_is_positive(inst in common::warm_instance_strategy(9)) {
        for fam in [MixingFamily::min(&inst), MixingFamily::mu_max(&inst, 3).unwrap()] {
            let h = build_hamiltonians(&inst, &fam, None).unwrap();
            if h.dimension() < 2 {
                continue;
            }
            let sched = Schedule::Simple { k: inst.k() };
            let curve = adiabatic_timescale(&h, &sched, &uniform_grid(0.02, 0.98, 25), DEFAULT_LEVELS).unwrap();
            prop_assert!(curve.min_gap() > 0.0);
            prop_assert!(curve.t_a().iter().all(|t| t.is_finite() && *t >= 0.0));
        }
    }

    #[test]
    fn derivative_matches_finite_differences(s in 0.01f64..0.99, dt in 0.5f64..3.0) {
        let (_, h) = case("3-max");
        let fit = ChebyshevSchedule::fit_simple(3, dt, 6);
        for sched in [Schedule::Simple { k: 3 }, Schedule::Chebyshev(fit.clone()), Schedule::Chebyshev(fit.normalized(true))] {
            let step = 1e-5;
            let fd = (hamiltonian_at(&h, &sched, s + step).unwrap() - hamiltonian_at(&h, &sched, s - step).unwrap()) / (2.0 * step);
            let analytic = hamiltonian_derivative(&h, &sched, s).unwrap();
            prop_assert!(frobenius(&(&fd - &analytic)) <= 1e-6 * frobenius(&analytic));
        }
    }
}

#[test]
fn simple_schedule_endpoints_and_midpoint() {
    let (_, h) = case("3-max");
    let sched = Schedule::Simple { k: 3 };
    let a = diag(h.a_diag());
    let b = h.bplus.to_dense();
    let c = diag(h.c_diag());
    assert_eq!(hamiltonian_at(&h, &sched, 0.0).unwrap(), a);
    assert_eq!(hamiltonian_at(&h, &sched, 1.0).unwrap(), c);
    let mid = (&a * 2.0 + &b * 3.0 + &c * 2.0) / 7.0;
    assert!(frobenius(&(hamiltonian_at(&h, &sched, 0.5).unwrap() - mid)) < 1e-14);
}

#[test]
fn spectrum_slice_reference_cases() {
    let (inst, h) = case("min");
    let c = spectrum_slice(&diag(h.c_diag()), 33);
    let mut sorted = h.c_diag().to_vec();
    sorted.sort_by(f64::total_cmp);
    assert!(c.eigenvalues.iter().zip(&sorted).all(|(x, y)| (x - y).abs() < 1e-12));
    assert!(c.eigenvalues.windows(2).all(|w| w[0] <= w[1]));

    let a = spectrum_slice(&diag(h.a_diag()), 2);
    assert_eq!(a.eigenvalues[0], -(inst.n() as f64) / 2.0);
    let warm = h.basis.index_of(&case_study::WARM_START.parse().unwrap()).unwrap();
    assert_eq!(a.eigenvectors[0][warm], 1.0);
    // Feasible states differ from z° in at least two bits.
    assert_eq!(a.gap, 2.0);

    let two = spectrum_slice(&DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]), 2);
    assert!((two.eigenvalues[0] + 1.0).abs() < 1e-15 && (two.eigenvalues[1] - 1.0).abs() < 1e-15);
    assert!(spectrum_slice(&DMatrix::from_element(1, 1, 3.0), 5).gap.is_infinite());
}

#[test]
fn eigenvectors_are_orthonormal() {
    let (_, h) = case("3-max");
    let hm = hamiltonian_at(&h, &Schedule::Simple { k: 3 }, 0.37).unwrap();
    let sl = spectrum_slice(&hm, DEFAULT_LEVELS);
    for (i, u) in sl.eigenvectors.iter().enumerate() {
        for (j, v) in sl.eigenvectors.iter().enumerate() {
            let d: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((d - want).abs() < 1e-9);
        }
    }
}

#[test]
fn ground_state_varies_continuously() {
    for fam in ["3-max", "min"] {
        let (_, h) = case(fam);
        let sched = Schedule::Simple { k: 3 };
        let grid = default_grid();
        assert!(grid[1] - grid[0] <= 0.01);
        let states: Vec<Vec<f64>> = grid
            .iter()
            .map(|&s| {
                spectrum_slice(&hamiltonian_at(&h, &sched, s).unwrap(), 1)
                    .eigenvectors
                    .remove(0)
            })
            .collect();
        for w in states.windows(2) {
            let overlap: f64 = w[0].iter().zip(&w[1]).map(|(a, b)| a * b).sum();
            assert!(overlap.abs() > 0.9, "{fam}: overlap {overlap}");
        }
    }
}

#[test]
fn timescale_matches_independent_eigensolve() {
    for fam in ["3-max", "min"] {
        let (_, h) = case(fam);
        let sched = Schedule::Simple { k: 3 };
        let grid = default_grid();
        let curve = adiabatic_timescale(&h, &sched, &grid, DEFAULT_LEVELS).unwrap();
        assert_eq!(curve.points.len(), 201);
        assert_eq!(curve.levels, 20);
        assert!(curve.lower_bound);
        assert_eq!(curve.grid(), grid);
        for p in curve.points.iter().step_by(20) {
            let want = t_a_oracle(&h, &sched, p.s, DEFAULT_LEVELS);
            assert!(
                (p.t_a - want).abs() <= 1e-9 * want.max(1.0),
                "{fam} s={}: {} vs {want}",
                p.s,
                p.t_a
            );
        }
        assert!(curve.t_a().iter().all(|t| t.is_finite()));
        assert_eq!(curve.max(), curve.argmax().unwrap().t_a);
        let csv = curve.to_csv();
        assert!(csv.starts_with("s,E_0,"));
        assert!(csv.lines().next().unwrap().ends_with(",gap,T_A"));
        assert_eq!(csv.lines().count(), 202);
    }
}

#[test]
fn simple_schedule_endpoint_overlaps_are_exact() {
    for fam in ["3-max", "min"] {
        let inst = case_study::instance();
        let f = case_study::families(&inst)
            .into_iter()
            .find(|(n, _)| *n == fam)
            .unwrap()
            .1;
        let sim = seqmix::QaoaSimulator::new(&inst, &f).unwrap();
        let h = sim.hamiltonians();
        let warm = h.basis.index_of(&case_study::WARM_START.parse().unwrap()).unwrap();
        let (start, end) = endpoint_overlaps(h, &Schedule::Simple { k: 3 }, warm, sim.optimal_indices()).unwrap();
        assert_eq!((start, end), (1.0, 1.0));
    }
}

#[test]
fn negative_beta_rejected_only_in_the_interior() {
    let (_, h) = case("min");
    // β(s) = −(2s − 1): negative for s > 1/2.
    let sched = Schedule::Chebyshev(ChebyshevSchedule::new(vec![2.0], vec![0.0, -1.0], vec![2.0]));
    assert!(hamiltonian_at(&h, &sched, 0.25).is_ok());
    assert!(matches!(
        hamiltonian_at(&h, &sched, 0.75),
        Err(Error::NegativeBeta { .. })
    ));
    assert!(hamiltonian_at(&h, &sched, 1.0).is_ok());
    assert!(hamiltonian_at_with(&h, &sched, 0.75, BetaPolicy::Allow).is_ok());
    assert!(matches!(
        adiabatic_timescale(&h, &sched, &default_grid(), DEFAULT_LEVELS),
        Err(Error::NegativeBeta { .. })
    ));
    assert!(adiabatic_timescale_with(&h, &sched, &default_grid(), DEFAULT_LEVELS, BetaPolicy::Allow).is_ok());
}

#[test]
fn level_crossing_is_a_gap_collapse() {
    // Two states, no mixer: diagonal entries cross at s = 1/2.
    let inst = ProblemInstance::new(vec![1, 1], 1, vec![2.0, 0.0], vec![], Some("10".parse().unwrap())).unwrap();
    let h = build_hamiltonians(&inst, &MixingFamily::custom(vec![]), None).unwrap();
    let grid = uniform_grid(0.1, 0.9, 9);
    assert_eq!(grid[4], 0.5);
    match adiabatic_timescale(&h, &Schedule::Simple { k: 1 }, &grid, 2) {
        Err(Error::GapCollapse { s, gap }) => {
            assert_eq!(s, 0.5);
            assert!(gap < 1e-10);
        }
        other => panic!("expected gap collapse, got {other:?}"),
    }
    // The mixer lifts the crossing.
    let h = build_hamiltonians(&inst, &MixingFamily::min(&inst), None).unwrap();
    assert!(
        adiabatic_timescale(&h, &Schedule::Simple { k: 1 }, &grid, 2)
            .unwrap()
            .min_gap()
            > 0.1
    );
}

#[test]
fn dense_cap_applies_to_spectral_path() {
    let inst = ProblemInstance::linear(vec![1; 14], 7, vec![0.0; 14])
        .unwrap()
        .with_warm_start("11111110000000".parse().unwrap())
        .unwrap();
    let h = build_hamiltonians(&inst, &MixingFamily::min(&inst), None).unwrap();
    assert_eq!(h.dimension(), 3432);
    std::env::set_var("SEQMIX_DENSE_CAP", "1000");
    let r = hamiltonian_at(&h, &Schedule::Simple { k: 1 }, 0.5);
    std::env::remove_var("SEQMIX_DENSE_CAP");
    assert!(matches!(r, Err(Error::DimensionTooLarge { dim: 3432, cap: 1000 })));
}
