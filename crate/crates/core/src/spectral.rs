//! Instantaneous spectra of `H(s) = α(s)A + β(s)B⁺ + γ(s)C` and the adiabatic
//! timescale `T_A(s)`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedules::Schedule;
use crate::sim::{dense_cap, Hamiltonians};

/// Default number of levels entering `T_A(s)`.
pub const DEFAULT_LEVELS: usize = 20;

/// Levels closer than this to `E_0` are treated as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// 201 uniform points on `[0.0025, 0.9975]`.
pub fn default_grid() -> Vec<f64> {
    uniform_grid(0.0025, 0.9975, 201)
}

pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn is_interior(s: f64) -> bool {
    s > 0.0 && s < 1.0
}

fn combine(h: &Hamiltonians, w: [f64; 3]) -> DMatrix<f64> {
    let mut m = h.bplus.to_dense() * w[1];
    for (u, (&a, &c)) in h.a_diag().iter().zip(h.c_diag()).enumerate() {
        m[(u, u)] += w[0] * a + w[2] * c;
    }
    m
}

/// Treatment of negative `β(s)` on the open interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaPolicy {
    #[default]
    Reject,
    /// Diagnostic only: the spectrum is computed but no gap guarantee holds.
    Allow,
}

/// Dense `H(s)`. Negative `β(s)` is rejected on the open interval.
pub fn hamiltonian_at(h: &Hamiltonians, schedule: &Schedule, s: f64) -> Result<DMatrix<f64>> {
    hamiltonian_at_with(h, schedule, s, BetaPolicy::Reject)
}

pub fn hamiltonian_at_with(h: &Hamiltonians, schedule: &Schedule, s: f64, policy: BetaPolicy) -> Result<DMatrix<f64>> {
    let cap = dense_cap();
    if h.dimension() > cap {
        return Err(Error::DimensionTooLarge {
            dim: h.dimension(),
            cap,
        });
    }
    let w = schedule.eval(s)?;
    if policy == BetaPolicy::Reject && is_interior(s) && w[1] < 0.0 {
        return Err(Error::NegativeBeta { s, beta: w[1] });
    }
    Ok(combine(h, w))
}

/// `∂_s H = α′(s)A + β′(s)B⁺ + γ′(s)C`.
pub fn hamiltonian_derivative(h: &Hamiltonians, schedule: &Schedule, s: f64) -> Result<DMatrix<f64>> {
    Ok(combine(h, schedule.derivative(s)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSlice {
    pub s: f64,
    /// Lowest `m` eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Matching eigenvectors in basis order.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `E_1 − E_0`, or infinity for a one-dimensional space.
    pub gap: f64,
}

/// Lowest `m` eigenpairs of a real symmetric matrix.
pub fn spectrum_slice(hm: &DMatrix<f64>, m: usize) -> SpectrumSlice {
    spectrum_slice_at(hm, m, f64::NAN)
}

fn spectrum_slice_at(hm: &DMatrix<f64>, m: usize, s: f64) -> SpectrumSlice {
    let eig = SymmetricEigen::new(hm.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    order.truncate(m.min(order.len()));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            // Fix the sign so the largest-magnitude entry is positive.
            let big = v
                .iter()
                .copied()
                .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if big < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    let gap = if eigenvalues.len() > 1 {
        eigenvalues[1] - eigenvalues[0]
    } else {
        f64::INFINITY
    };
    SpectrumSlice {
        s,
        eigenvalues,
        eigenvectors,
        gap,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimescalePoint {
    pub s: f64,
    pub t_a: f64,
    pub gap: f64,
    pub energies: Vec<f64>,
    /// Excited levels skipped as degenerate with the ground level.
    pub degenerate_excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimescaleCurve {
    pub levels: usize,
    /// Set when fewer levels than the full dimension entered the maximum, in
    /// which case every value is a lower bound.
    pub lower_bound: bool,
    pub points: Vec<TimescalePoint>,
}

impl TimescaleCurve {
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.s).collect()
    }

    pub fn t_a(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t_a).collect()
    }

    pub fn argmax(&self) -> Option<&TimescalePoint> {
        self.points.iter().max_by(|a, b| a.t_a.total_cmp(&b.t_a))
    }

    pub fn max(&self) -> f64 {
        self.argmax().map_or(0.0, |p| p.t_a)
    }

    pub fn min_gap(&self) -> f64 {
        self.points.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min)
    }

    /// CSV `s,E_0..E_{m−1},gap,T_A`.
    pub fn to_csv(&self) -> String {
        let width = self.points.iter().map(|p| p.energies.len()).max().unwrap_or(0);
        let mut s = String::from("s");
        for j in 0..width {
            let _ = write!(s, ",E_{j}");
        }
        s.push_str(",gap,T_A\n");
        for p in &self.points {
            let _ = write!(s, "{}", p.s);
            for j in 0..width {
                match p.energies.get(j) {
                    Some(e) => {
                        let _ = write!(s, ",{e}");
                    }
                    None => s.push(','),
                }
            }
            let _ = writeln!(s, ",{},{}", p.gap, p.t_a);
        }
        s
    }
}

/// `T_A(s) = max_j |⟨E_0|∂_sH|E_j⟩| / (E_0 − E_j)²` over the lowest `m` levels.
pub fn adiabatic_timescale(h: &Hamiltonians, schedule: &Schedule, grid: &[f64], m: usize) -> Result<TimescaleCurve> {
    adiabatic_timescale_with(h, schedule, grid, m, BetaPolicy::Reject)
}

pub fn adiabatic_timescale_with(
    h: &Hamiltonians,
    schedule: &Schedule,
    grid: &[f64],
    m: usize,
    policy: BetaPolicy,
) -> Result<TimescaleCurve> {
    let points = grid
        .par_iter()
        .map(|&s| timescale_point(h, schedule, s, m, policy))
        .collect::<Result<Vec<_>>>()?;
    let levels = m.min(h.dimension());
    Ok(TimescaleCurve {
        levels,
        lower_bound: levels < h.dimension(),
        points,
    })
}

fn timescale_point(
    h: &Hamiltonians,
    schedule: &Schedule,
    s: f64,
    m: usize,
    policy: BetaPolicy,
) -> Result<TimescalePoint> {
    let hm = hamiltonian_at_with(h, schedule, s, policy)?;
    let dh = hamiltonian_derivative(h, schedule, s)?;
    let slice = spectrum_slice_at(&hm, m, s);
    if is_interior(s) && slice.gap < DEGENERACY_TOLERANCE {
        return Err(Error::GapCollapse { s, gap: slice.gap });
    }
    let e0 = slice.eigenvalues[0];
    let v0 = DVector::from_column_slice(&slice.eigenvectors[0]);
    let dv0 = &dh * &v0;
    let mut t_a: f64 = 0.0;
    let mut degenerate_excluded = 0;
    for (ej, vj) in slice.eigenvalues.iter().zip(&slice.eigenvectors).skip(1) {
        let de = e0 - ej;
        if de.abs() < DEGENERACY_TOLERANCE {
            degenerate_excluded += 1;
            continue;
        }
        let elem: f64 = vj.iter().zip(dv0.iter()).map(|(a, b)| a * b).sum();
        t_a = t_a.max(elem.abs() / (de * de));
    }
    Ok(TimescalePoint {
        s,
        t_a,
        gap: slice.gap,
        energies: slice.eigenvalues,
        degenerate_excluded,
    })
}

/// `|⟨ψ_0|z°⟩|` and `|⟨ψ_f|z_opt⟩|` for the ground states of `H(0)` and `H(1)`;
/// the optimum overlap sums probability over degenerate minimizers.
pub fn endpoint_overlaps(
    h: &Hamiltonians,
    schedule: &Schedule,
    warm_index: usize,
    optimal: &[usize],
) -> Result<(f64, f64)> {
    // Endpoints are exempt from the sign check.
    let g0 = spectrum_slice(&hamiltonian_at(h, schedule, 0.0)?, 1);
    let g1 = spectrum_slice(&hamiltonian_at(h, schedule, 1.0)?, 1);
    let start = g0.eigenvectors[0][warm_index].abs();
    let end = optimal
        .iter()
        .map(|&u| g1.eigenvectors[0][u].powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((start, end))
}
