//! Maximization of `Pr_opt` over the simple-schedule step `Δt` and over the
//! Chebyshev schedule coefficients.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedules::{angles_from_schedule, ChebyshevSchedule, Schedule};
use crate::sim::{MixerMode, QaoaSimulator};

/// Seeds `0.25, 0.5, …, 10`.
pub fn default_dt_seeds() -> Vec<f64> {
    (1..=40).map(|i| 0.25 * i as f64).collect()
}

/// Objective values closer than this count as a tie; the smaller Δt wins.
pub const DT_TIE: f64 = 1e-12;

/// Half-width of the golden-section bracket around each seed.
pub const DT_BRACKET: f64 = 0.25;
const DT_TOLERANCE: f64 = 1e-6;
const DT_FLOOR: f64 = 1e-9;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: f64,
    pub params: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub value: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub method: String,
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub seed_trace: Vec<SeedOutcome>,
    pub evaluations: usize,
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
}

impl OptResult {
    /// Per-iteration CSV `iteration,value,grad_norm,step`.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,value,grad_norm,step\n");
        for r in &self.trace {
            let _ = writeln!(s, "{},{},{},{}", r.iteration, r.value, r.grad_norm, r.step);
        }
        s
    }
}

struct Counter(AtomicUsize);

impl Counter {
    fn tick(&self) {
        self.0.fetch_add(1, AtomicOrdering::Relaxed);
    }
}

/// `Pr_opt` of the simple schedule sampled at `p` layers with step `dt`.
pub fn simple_objective(sim: &QaoaSimulator, k: u32, p: usize, dt: f64, mode: MixerMode) -> Result<f64> {
    let angles = angles_from_schedule(&Schedule::Simple { k }, p, dt)?;
    sim.run_pr_opt(&angles, mode)
}

/// `Pr_opt` of a Chebyshev schedule given as concatenated coefficients.
pub fn chebyshev_objective(sim: &QaoaSimulator, p: usize, params: &[f64], mode: MixerMode) -> Result<f64> {
    let sched = Schedule::Chebyshev(ChebyshevSchedule::from_params(params)?);
    sim.run_pr_opt(&angles_from_schedule(&sched, p, 1.0)?, mode)
}

/// Golden-section maximization on `[lo, hi]`, started from `seed`. The seed is
/// kept unless some probe is strictly better.
fn golden_section(f: &dyn Fn(f64) -> Result<f64>, seed: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let mut best = (seed, f(seed)?);
    let consider = |best: &mut (f64, f64), x: f64, v: f64| {
        if v > best.1 {
            *best = (x, v);
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    consider(&mut best, x1, f1);
    consider(&mut best, x2, f2);
    while b - a > DT_TOLERANCE {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1)?;
            consider(&mut best, x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2)?;
            consider(&mut best, x2, f2);
        }
    }
    Ok(best)
}

/// Best `Δt` for the simple schedule at depth `p`: golden-section refinement in
/// `seed ± 0.25` for every seed, reduced by maximum value with ties going to
/// the smaller `Δt`.
pub fn optimize_dt(sim: &QaoaSimulator, k: u32, p: usize, mode: MixerMode, seeds: Option<&[f64]>) -> Result<OptResult> {
    if p == 0 {
        return Err(Error::OutOfRange("p must be at least 1".into()));
    }
    let seeds = seeds.map(<[f64]>::to_vec).unwrap_or_else(default_dt_seeds);
    if seeds.is_empty() {
        return Err(Error::OutOfRange("no Δt seeds".into()));
    }
    let counter = Counter(AtomicUsize::new(0));
    let f = |dt: f64| {
        counter.tick();
        simple_objective(sim, k, p, dt, mode)
    };
    let outcomes = seeds
        .par_iter()
        .map(|&seed| {
            let lo = (seed - DT_BRACKET).max(DT_FLOOR);
            let (dt, value) = golden_section(&f, seed, lo, seed + DT_BRACKET)?;
            Ok(SeedOutcome {
                seed,
                params: vec![dt],
                value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = outcomes
        .iter()
        .fold(None::<&SeedOutcome>, |acc, o| match acc {
            Some(b)
                if o.value < b.value - DT_TIE
                    || ((o.value - b.value).abs() <= DT_TIE && o.params[0] >= b.params[0]) =>
            {
                Some(b)
            }
            _ => Some(o),
        })
        .expect("at least one seed");
    Ok(OptResult {
        method: "golden-section".into(),
        best_params: best.params.clone(),
        best_value: best.value,
        evaluations: counter.0.load(AtomicOrdering::Relaxed),
        iterations: outcomes.len(),
        seed_trace: outcomes,
        trace: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iterations: usize,
    pub fd_step: f64,
    pub grad_tolerance: f64,
    pub rel_tolerance: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            max_iterations: 500,
            fd_step: 1e-4,
            grad_tolerance: 1e-6,
            rel_tolerance: 1e-10,
        }
    }
}

/// Central-difference gradient, one parallel task per coordinate.
fn gradient(f: &(dyn Fn(&[f64]) -> Result<f64> + Sync), x: &[f64], h: f64) -> Result<Vec<f64>> {
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            Ok((f(&xp)? - f(&xm)?) / (2.0 * h))
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// BFGS ascent with an Armijo backtracking line search. Returns the best
/// iterate; the value never decreases between accepted iterates.
pub fn bfgs_maximize(
    f: &(dyn Fn(&[f64]) -> Result<f64> + Sync),
    x0: &[f64],
    options: BfgsOptions,
) -> Result<(Vec<f64>, f64, usize, Vec<TraceRow>)> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    let mut g = gradient(f, &x, options.fd_step)?;
    // Inverse Hessian of −f, row-major.
    let identity = |scale: f64| {
        let mut m = vec![0.0; n * n];
        (0..n).for_each(|i| m[i * n + i] = scale);
        m
    };
    let mut hinv = identity(1.0);
    let mut trace = vec![TraceRow {
        iteration: 0,
        value: fx,
        grad_norm: inf_norm(&g),
        step: 0.0,
    }];
    let mut iterations = 0;
    let mut fresh = true;
    // Previous gain; seeded so the first trial step has unit length.
    let mut last_gain = dot(&g, &g).sqrt() / 2.0;
    while iterations < options.max_iterations && inf_norm(&g) >= options.grad_tolerance {
        // Ascent direction d = H g.
        let d: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &g)).collect();
        let slope = dot(&g, &d);
        let mut accepted = None;
        if slope > 0.0 {
            // Interpolated initial step from the previous gain.
            let mut t = (2.02 * last_gain / slope).min(1.0);
            if t.is_nan() || t <= 0.0 {
                t = 1.0;
            }
            for _ in 0..40 {
                let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                let fxn = f(&xn)?;
                if fxn >= fx + 1e-4 * t * slope {
                    accepted = Some((xn, fxn, t));
                    break;
                }
                t *= 0.5;
            }
        }
        let Some((xn, fxn, t)) = accepted else {
            if fresh {
                break;
            }
            hinv = identity(1.0);
            fresh = true;
            last_gain = dot(&g, &g).sqrt() / 2.0;
            continue;
        };
        iterations += 1;
        debug_assert!(fxn >= fx);
        let gn = gradient(f, &xn, options.fd_step)?;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        // Curvature of −f: y = −(gn − g).
        let y: Vec<f64> = g.iter().zip(&gn).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if fresh {
                hinv = identity(sy / dot(&y, &y));
            }
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            fresh = false;
        }
        let improvement = (fxn - fx) / fx.abs().max(f64::MIN_POSITIVE);
        last_gain = fxn - fx;
        x = xn;
        fx = fxn;
        g = gn;
        trace.push(TraceRow {
            iteration: iterations,
            value: fx,
            grad_norm: inf_norm(&g),
            step: t,
        });
        if improvement < options.rel_tolerance {
            break;
        }
    }
    Ok((x, fx, iterations, trace))
}

/// Quasi-Newton refinement of Chebyshev coefficients at depth `p`, started
/// from `init` (conventionally a fit of the Δt-optimized simple schedule).
pub fn optimize_chebyshev(
    sim: &QaoaSimulator,
    p: usize,
    init: &ChebyshevSchedule,
    mode: MixerMode,
    options: BfgsOptions,
) -> Result<OptResult> {
    if p == 0 {
        return Err(Error::OutOfRange("p must be at least 1".into()));
    }
    let counter = Counter(AtomicUsize::new(0));
    let f = |params: &[f64]| {
        counter.tick();
        chebyshev_objective(sim, p, params, mode)
    };
    let x0 = init.to_params();
    let (x, value, iterations, trace) = bfgs_maximize(&f, &x0, options)?;
    Ok(OptResult {
        method: "bfgs-central-difference".into(),
        best_params: x,
        best_value: value,
        seed_trace: Vec::new(),
        evaluations: counter.0.load(AtomicOrdering::Relaxed),
        iterations,
        trace,
    })
}
