//! Annealing schedules `(α(s), β(s), γ(s))` and their sampling into per-layer
//! angles at `s_l = l/(p+1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::AngleSet;

/// Default number of Chebyshev coefficients per curve.
pub const DEFAULT_ORDER: usize = 6;

/// Triples whose sum falls below this cannot be normalized.
pub const NORMALIZATION_FLOOR: f64 = 1e-9;

const DOMAIN_SLACK: f64 = 1e-12;

/// `(α, β, γ)` at one point of the schedule.
pub type Triple = [f64; 3];

/// Rational schedule with denominator `1 + k s(1−s)`.
pub fn simple_eval(k: u32, s: f64) -> Triple {
    let k = k as f64;
    let d = 1.0 + k * s * (1.0 - s);
    [(1.0 - s) / d, k * s * (1.0 - s) / d, s / d]
}

/// `d/ds` of [`simple_eval`].
pub fn simple_derivative(k: u32, s: f64) -> Triple {
    let k = k as f64;
    let d = 1.0 + k * s * (1.0 - s);
    let dd = k * (1.0 - 2.0 * s);
    let d2 = d * d;
    [(-d - (1.0 - s) * dd) / d2, k * (1.0 - 2.0 * s) / d2, (d - s * dd) / d2]
}

/// `Σ_{k=1}^N c_k T_{k−1}(x) − c_1/2`.
pub fn cheb_eval(coeffs: &[f64], x: f64) -> Result<f64> {
    if x.is_nan() || x.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::DomainError(x));
    }
    let Some(&c1) = coeffs.first() else {
        return Ok(0.0);
    };
    let (mut t_prev, mut t) = (1.0, x);
    let mut sum = c1 * 0.5;
    for (n, &c) in coeffs.iter().enumerate().skip(1) {
        if n > 1 {
            let next = 2.0 * x * t - t_prev;
            t_prev = t;
            t = next;
        }
        sum += c * t;
    }
    Ok(sum)
}

/// Coefficients `c_j = (2/N) Σ_k f(x_k) cos(π(j−1)(k−½)/N)` at the Chebyshev
/// nodes `x_k = cos(π(k−½)/N)`.
pub fn cheb_fit(f: impl Fn(f64) -> f64, n: usize) -> Vec<f64> {
    let nf = n as f64;
    let samples: Vec<f64> = (1..=n)
        .map(|k| f((std::f64::consts::PI * (k as f64 - 0.5) / nf).cos()))
        .collect();
    (0..n)
        .map(|j| {
            let s: f64 = samples
                .iter()
                .enumerate()
                .map(|(k, &fk)| fk * (std::f64::consts::PI * j as f64 * (k as f64 + 0.5) / nf).cos())
                .sum();
            2.0 * s / nf
        })
        .collect()
}

/// Coefficients of `d/dx` in the same convention as [`cheb_eval`].
pub fn cheb_derivative_coeffs(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut d = vec![0.0; n];
    if n < 2 {
        return d;
    }
    d[n - 2] = 2.0 * (n - 1) as f64 * coeffs[n - 1];
    for j in (1..n - 1).rev() {
        let above = if j + 1 < n { d[j + 1] } else { 0.0 };
        d[j - 1] = above + 2.0 * j as f64 * coeffs[j];
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevSchedule {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    #[serde(default)]
    pub normalize: bool,
}

impl ChebyshevSchedule {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Self {
        ChebyshevSchedule {
            alpha,
            beta,
            gamma,
            normalize: false,
        }
    }

    /// Fit of the simple schedule scaled by `dt`, in the variable `x = 2s − 1`.
    pub fn fit_simple(k: u32, dt: f64, order: usize) -> Self {
        let curve = |i: usize| cheb_fit(|x| dt * simple_eval(k, (x + 1.0) / 2.0)[i], order);
        ChebyshevSchedule::new(curve(0), curve(1), curve(2))
    }

    pub fn normalized(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }

    /// Concatenated `alpha ‖ beta ‖ gamma`.
    pub fn to_params(&self) -> Vec<f64> {
        [&self.alpha[..], &self.beta, &self.gamma].concat()
    }

    /// Inverse of [`ChebyshevSchedule::to_params`] with equal-length curves.
    pub fn from_params(params: &[f64]) -> Result<Self> {
        if !params.len().is_multiple_of(3) {
            return Err(Error::LengthMismatch {
                expected: params.len() / 3 * 3,
                got: params.len(),
            });
        }
        let n = params.len() / 3;
        Ok(ChebyshevSchedule::new(
            params[..n].to_vec(),
            params[n..2 * n].to_vec(),
            params[2 * n..].to_vec(),
        ))
    }

    fn raw(&self, s: f64) -> Result<Triple> {
        let x = 2.0 * s - 1.0;
        Ok([
            cheb_eval(&self.alpha, x)?,
            cheb_eval(&self.beta, x)?,
            cheb_eval(&self.gamma, x)?,
        ])
    }

    fn raw_derivative(&self, s: f64) -> Result<Triple> {
        let x = 2.0 * s - 1.0;
        let d = |c: &[f64]| cheb_eval(&cheb_derivative_coeffs(c), x).map(|v| 2.0 * v);
        Ok([d(&self.alpha)?, d(&self.beta)?, d(&self.gamma)?])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Schedule {
    Simple { k: u32 },
    Chebyshev(ChebyshevSchedule),
}

impl Schedule {
    pub fn eval(&self, s: f64) -> Result<Triple> {
        match self {
            Schedule::Simple { k } => Ok(simple_eval(*k, s)),
            Schedule::Chebyshev(c) => {
                let t = c.raw(s)?;
                if c.normalize {
                    let sum = normalization_sum(&t)?;
                    Ok(t.map(|v| v / sum))
                } else {
                    Ok(t)
                }
            }
        }
    }

    pub fn derivative(&self, s: f64) -> Result<Triple> {
        match self {
            Schedule::Simple { k } => Ok(simple_derivative(*k, s)),
            Schedule::Chebyshev(c) => {
                let d = c.raw_derivative(s)?;
                if !c.normalize {
                    return Ok(d);
                }
                let t = c.raw(s)?;
                let sum = normalization_sum(&t)?;
                let dsum: f64 = d.iter().sum();
                Ok([0, 1, 2].map(|i| (d[i] * sum - t[i] * dsum) / (sum * sum)))
            }
        }
    }
}

fn normalization_sum(t: &Triple) -> Result<f64> {
    let sum: f64 = t.iter().sum();
    if sum <= NORMALIZATION_FLOOR {
        return Err(Error::NormalizationFloor(sum));
    }
    Ok(sum)
}

/// `α_l = α(s_l)·dt` (likewise β, γ) with `s_l = l/(p+1)`, `l = 1..p`.
/// Chebyshev schedules are conventionally sampled with `dt = 1`.
pub fn angles_from_schedule(schedule: &Schedule, p: usize, dt: f64) -> Result<AngleSet> {
    let mut angles = AngleSet::zeros(p);
    for l in 1..=p {
        let s = l as f64 / (p + 1) as f64;
        let [a, b, g] = schedule.eval(s)?;
        angles.alphas[l - 1] = a * dt;
        angles.betas[l - 1] = b * dt;
        angles.gammas[l - 1] = g * dt;
    }
    angles.validate()?;
    Ok(angles)
}

/// On-disk schedule: `{"type":"simple","k":…,"dt":…}` or
/// `{"type":"chebyshev","alpha":[…],"beta":[…],"gamma":[…]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScheduleFile {
    Simple {
        k: u32,
        #[serde(default = "one")]
        dt: f64,
    },
    Chebyshev(ChebyshevSchedule),
}

fn one() -> f64 {
    1.0
}

impl ScheduleFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// The schedule together with its step size.
    pub fn into_parts(self) -> (Schedule, f64) {
        match self {
            ScheduleFile::Simple { k, dt } => (Schedule::Simple { k }, dt),
            ScheduleFile::Chebyshev(c) => (Schedule::Chebyshev(c), 1.0),
        }
    }
}
