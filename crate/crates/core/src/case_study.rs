//! Eight-variable benchmark instance and the depth-sweep pipeline that
//! reproduces its convergence and timescale curves.

use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::Result;
use crate::mixers::MixingFamily;
use crate::optimize::{optimize_chebyshev, optimize_dt, BfgsOptions, OptResult};
use crate::problem::ProblemInstance;
use crate::schedules::{ChebyshevSchedule, Schedule, DEFAULT_ORDER};
use crate::sim::{MixerMode, QaoaSimulator};
use crate::spectral::{adiabatic_timescale, default_grid, endpoint_overlaps, TimescaleCurve, DEFAULT_LEVELS};

pub const COEFFICIENTS: [u32; 8] = [1, 1, 1, 2, 2, 2, 3, 3];
pub const LINEAR: [f64; 8] = [1.181, 0.640, 1.840, 0.643, 0.015, 0.352, 2.633, 0.696];
/// Recovered from the warm start and the optimum, both of which weigh 8.
pub const TARGET: u64 = 8;
pub const WARM_START: &str = "11100110";
pub const OPTIMUM: &str = "01001101";
pub const OPTIMUM_VALUE: f64 = 1.703;
pub const CONVERGENCE_BAR: f64 = 0.999;

pub fn instance() -> ProblemInstance {
    ProblemInstance::new(
        COEFFICIENTS.to_vec(),
        TARGET,
        LINEAR.to_vec(),
        vec![],
        Some(WARM_START.parse::<Bitstring>().expect("fixture bitstring")),
    )
    .expect("fixture instance is valid")
}

/// The two families studied: the 3-maximal family and the minimal family.
pub fn families(instance: &ProblemInstance) -> Vec<(&'static str, MixingFamily)> {
    vec![
        (
            "3-max",
            MixingFamily::mu_max(instance, 3).expect("mu = 3 is valid for k = 3"),
        ),
        ("min", MixingFamily::min(instance)),
    ]
}

/// `2, 4, 8, …` up to and including `p_max`.
pub fn depth_sweep(p_max: usize) -> Vec<usize> {
    std::iter::successors(Some(2usize), |p| Some(p * 2))
        .take_while(|&p| p <= p_max)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: usize,
    pub dt: f64,
    pub pr_simple: f64,
    /// Present when Chebyshev refinement ran at this depth.
    pub pr_chebyshev: Option<f64>,
    pub chebyshev: Option<ChebyshevSchedule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySweep {
    pub family: String,
    pub points: Vec<SweepPoint>,
    /// First depth reaching the bar with the simple schedule.
    pub simple_converged_at: Option<usize>,
    pub chebyshev_converged_at: Option<usize>,
}

impl FamilySweep {
    pub fn convergence_csv(&self) -> String {
        let mut s = String::from("p,dt,pr_simple,pr_chebyshev\n");
        for pt in &self.points {
            let cheb = pt.pr_chebyshev.map(|v| v.to_string()).unwrap_or_default();
            s.push_str(&format!("{},{},{},{}\n", pt.p, pt.dt, pt.pr_simple, cheb));
        }
        s
    }

    /// Chebyshev schedule at the depth where refinement first converged, or
    /// at the deepest refined depth otherwise.
    pub fn final_chebyshev(&self) -> Option<(usize, &ChebyshevSchedule)> {
        fn pick(pt: &SweepPoint) -> Option<(usize, &ChebyshevSchedule)> {
            pt.chebyshev.as_ref().map(|c| (pt.p, c))
        }
        match self.chebyshev_converged_at {
            Some(p) => self.points.iter().find(|pt| pt.p == p).and_then(pick),
            None => self.points.iter().rev().find_map(pick),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub p_max_simple: usize,
    pub p_max_chebyshev: usize,
    pub mode: MixerMode,
    pub order: usize,
    pub bfgs: BfgsOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            p_max_simple: 512,
            p_max_chebyshev: 64,
            mode: MixerMode::Sequential,
            order: DEFAULT_ORDER,
            bfgs: BfgsOptions::default(),
        }
    }
}

/// Optimizes `Δt` at each depth and refines a Chebyshev fit of the optimized
/// simple schedule. Each track stops at its first depth reaching the bar.
pub fn sweep_family(
    instance: &ProblemInstance,
    name: &str,
    family: &MixingFamily,
    config: &SweepConfig,
) -> Result<FamilySweep> {
    let sim = QaoaSimulator::new(instance, family)?;
    let k = instance.k();
    let mut out = FamilySweep {
        family: name.to_string(),
        points: Vec::new(),
        simple_converged_at: None,
        chebyshev_converged_at: None,
    };
    let p_max = config.p_max_simple.max(config.p_max_chebyshev);
    for p in depth_sweep(p_max) {
        let simple_active = out.simple_converged_at.is_none() && p <= config.p_max_simple;
        let cheb_active = out.chebyshev_converged_at.is_none() && p <= config.p_max_chebyshev;
        if !simple_active && !cheb_active {
            break;
        }
        let dt_opt: OptResult = optimize_dt(&sim, k, p, config.mode, None)?;
        let dt = dt_opt.best_params[0];
        let mut point = SweepPoint {
            p,
            dt,
            pr_simple: dt_opt.best_value,
            pr_chebyshev: None,
            chebyshev: None,
        };
        if simple_active && dt_opt.best_value >= CONVERGENCE_BAR {
            out.simple_converged_at = Some(p);
        }
        if cheb_active {
            let init = ChebyshevSchedule::fit_simple(k, dt, config.order);
            let r = optimize_chebyshev(&sim, p, &init, config.mode, config.bfgs)?;
            point.pr_chebyshev = Some(r.best_value);
            point.chebyshev = Some(ChebyshevSchedule::from_params(&r.best_params)?);
            if r.best_value >= CONVERGENCE_BAR {
                out.chebyshev_converged_at = Some(p);
            }
        }
        out.points.push(point);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub family: String,
    pub schedule: String,
    pub curve: TimescaleCurve,
    pub start_overlap: f64,
    pub end_overlap: f64,
}

/// `T_A(s)` for the simple schedule and, when given, for the normalized
/// Chebyshev schedule.
pub fn spectral_summaries(
    instance: &ProblemInstance,
    name: &str,
    family: &MixingFamily,
    chebyshev: Option<&ChebyshevSchedule>,
) -> Result<Vec<SpectralSummary>> {
    let sim = QaoaSimulator::new(instance, family)?;
    let h = sim.hamiltonians();
    let warm = sim
        .basis()
        .index_of(&instance.warm_start().expect("fixture warm start"))
        .expect("feasible");
    let mut schedules = vec![("simple".to_string(), Schedule::Simple { k: instance.k() })];
    if let Some(c) = chebyshev {
        schedules.push(("chebyshev".to_string(), Schedule::Chebyshev(c.clone().normalized(true))));
    }
    schedules
        .into_iter()
        .map(|(label, sched)| {
            let curve = adiabatic_timescale(h, &sched, &default_grid(), DEFAULT_LEVELS)?;
            let (start_overlap, end_overlap) = endpoint_overlaps(h, &sched, warm, sim.optimal_indices())?;
            Ok(SpectralSummary {
                family: name.to_string(),
                schedule: label,
                curve,
                start_overlap,
                end_overlap,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_facts() {
        let p = instance();
        assert_eq!(p.enumerate_feasible().len(), 33);
        let (z, v) = p.find_optimum().unwrap();
        assert_eq!(z.to_string(), OPTIMUM);
        assert!((v - OPTIMUM_VALUE).abs() < 1e-12);
        let fams = families(&p);
        assert_eq!(fams[0].1.len(), 34);
        assert_eq!(fams[1].1.len(), 7);
    }

    #[test]
    fn sweep_depths() {
        assert_eq!(depth_sweep(64), [2, 4, 8, 16, 32, 64]);
        assert_eq!(depth_sweep(1), Vec::<usize>::new());
    }
}
