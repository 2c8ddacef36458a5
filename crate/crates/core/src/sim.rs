//! State-vector evolution restricted to the feasible subspace `S^(b)`.

use std::fmt::Write as _;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::mixers::{MixingFamily, Provenance};
use crate::problem::{FeasibleBasis, ProblemInstance};
use crate::schedules::{angles_from_schedule, Schedule};

/// Default dimension limit for dense eigendecompositions.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Qubit limit for full Hilbert-space simulation.
pub const FULL_SPACE_LIMIT: usize = 12;

/// Two objective values closer than this count as the same optimum.
pub const OPTIMUM_TOLERANCE: f64 = 1e-12;

/// Dense cap, overridable through `SEQMIX_DENSE_CAP`.
pub fn dense_cap() -> usize {
    std::env::var("SEQMIX_DENSE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

/// Hermitian operator on `S^(b)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SubspaceOperator {
    Diagonal(Vec<f64>),
    /// `weight · Σ_j (−M_j)`; each inner list holds the vertex-disjoint pairs
    /// coupled by one family operator.
    PairCoupled {
        dimension: usize,
        components: Vec<Vec<(usize, usize)>>,
        weight: f64,
    },
}

impl SubspaceOperator {
    pub fn dimension(&self) -> usize {
        match self {
            SubspaceOperator::Diagonal(d) => d.len(),
            SubspaceOperator::PairCoupled { dimension, .. } => *dimension,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            SubspaceOperator::Diagonal(d) => DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)),
            SubspaceOperator::PairCoupled {
                dimension,
                components,
                weight,
            } => {
                let mut m = DMatrix::zeros(*dimension, *dimension);
                for &(u, v) in components.iter().flatten() {
                    m[(u, v)] -= weight;
                    m[(v, u)] -= weight;
                }
                m
            }
        }
    }

    pub fn apply(&self, state: &SubspaceState) -> SubspaceState {
        let a = &state.amplitudes;
        let out = match self {
            SubspaceOperator::Diagonal(d) => a.iter().zip(d).map(|(x, &e)| x * e).collect(),
            SubspaceOperator::PairCoupled {
                dimension,
                components,
                weight,
            } => {
                let mut out = vec![Complex64::new(0.0, 0.0); *dimension];
                for &(u, v) in components.iter().flatten() {
                    out[u] -= a[v] * weight;
                    out[v] -= a[u] * weight;
                }
                out
            }
        };
        SubspaceState { amplitudes: out }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceState {
    pub amplitudes: Vec<Complex64>,
}

impl SubspaceState {
    pub fn basis_state(dimension: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dimension];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        SubspaceState { amplitudes }
    }

    pub fn uniform(dimension: usize) -> Self {
        let a = Complex64::new(1.0 / (dimension as f64).sqrt(), 0.0);
        SubspaceState {
            amplitudes: vec![a; dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &SubspaceState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest absolute componentwise difference.
    pub fn max_diff(&self, other: &SubspaceState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// CSV rows `bitstring,re,im,prob,objective` in basis order.
    pub fn to_csv(&self, basis: &FeasibleBasis, instance: &ProblemInstance) -> String {
        let mut s = String::from("bitstring,re,im,prob,objective\n");
        for (z, a) in basis.states().iter().zip(&self.amplitudes) {
            let _ = writeln!(
                s,
                "{z},{},{},{},{}",
                a.re,
                a.im,
                a.norm_sqr(),
                instance.objective_unchecked(z)
            );
        }
        s
    }
}

/// Per-layer angles `(α_l, β_l, γ_l)`, `l = 1..p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl AngleSet {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        let set = AngleSet { alphas, betas, gammas };
        set.validate()?;
        Ok(set)
    }

    pub fn zeros(p: usize) -> Self {
        AngleSet {
            alphas: vec![0.0; p],
            betas: vec![0.0; p],
            gammas: vec![0.0; p],
        }
    }

    pub fn p(&self) -> usize {
        self.alphas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.betas.len() != self.alphas.len() || self.gammas.len() != self.alphas.len() {
            return Err(Error::InvalidAngles(format!(
                "lengths {}, {}, {} differ",
                self.alphas.len(),
                self.betas.len(),
                self.gammas.len()
            )));
        }
        let all = self.alphas.iter().chain(&self.betas).chain(&self.gammas);
        if let Some(x) = all.into_iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidAngles(format!("non-finite angle {x}")));
        }
        Ok(())
    }

    pub fn layers(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.p()).map(move |l| (self.alphas[l], self.betas[l], self.gammas[l]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixerMode {
    #[default]
    Sequential,
    Simultaneous,
}

/// Order in which the sequential mixer applies family operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    #[default]
    Canonical,
    Reversed,
}

/// `e^{−iθD}` for diagonal `D`.
pub fn evolve_diagonal(state: &SubspaceState, diag: &[f64], theta: f64) -> SubspaceState {
    debug_assert_eq!(state.dimension(), diag.len());
    SubspaceState {
        amplitudes: state
            .amplitudes
            .iter()
            .zip(diag)
            .map(|(a, &d)| a * Complex64::from_polar(1.0, -theta * d))
            .collect(),
    }
}

fn rotate_pairs(amps: &mut [Complex64], pairs: &[(usize, usize)], theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let is = Complex64::new(0.0, s);
    for &(u, v) in pairs {
        let (au, av) = (amps[u], amps[v]);
        amps[u] = au * c + is * av;
        amps[v] = is * au + av * c;
    }
}

/// Product of `e^{−iβ w (−M_j)}` over the family operators held by `bplus`.
pub fn evolve_sequential(
    state: &SubspaceState,
    bplus: &SubspaceOperator,
    beta: f64,
    ordering: Ordering,
) -> SubspaceState {
    let mut out = state.clone();
    match bplus {
        SubspaceOperator::Diagonal(d) => return evolve_diagonal(state, d, beta),
        SubspaceOperator::PairCoupled { components, weight, .. } => {
            let theta = beta * weight;
            match ordering {
                Ordering::Canonical => components
                    .iter()
                    .for_each(|pairs| rotate_pairs(&mut out.amplitudes, pairs, theta)),
                Ordering::Reversed => components
                    .iter()
                    .rev()
                    .for_each(|pairs| rotate_pairs(&mut out.amplitudes, pairs, theta)),
            }
        }
    }
    out
}

/// Cached eigendecomposition `H = V diag(λ) Vᵀ` of a real symmetric operator.
#[derive(Debug, Clone)]
pub struct DenseEvolver {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl DenseEvolver {
    pub fn new(op: &SubspaceOperator) -> Result<Self> {
        Self::with_cap(op, dense_cap())
    }

    pub fn with_cap(op: &SubspaceOperator, cap: usize) -> Result<Self> {
        let dim = op.dimension();
        if dim > cap {
            return Err(Error::DimensionTooLarge { dim, cap });
        }
        let eig = SymmetricEigen::new(op.to_dense());
        Ok(DenseEvolver {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `e^{−iθH}·state`.
    pub fn evolve(&self, state: &SubspaceState, theta: f64) -> SubspaceState {
        let n = self.dimension();
        let v = &self.eigenvectors;
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for (j, wj) in w.iter_mut().enumerate() {
            let col = v.column(j);
            let dot: Complex64 = state.amplitudes.iter().zip(col.iter()).map(|(a, &x)| a * x).sum();
            *wj = dot * Complex64::from_polar(1.0, -theta * self.eigenvalues[j]);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, wj) in w.iter().enumerate() {
            for (o, &x) in out.iter_mut().zip(v.column(j).iter()) {
                *o += wj * x;
            }
        }
        SubspaceState { amplitudes: out }
    }
}

/// `e^{−iθH}·state` through a fresh dense eigendecomposition.
pub fn evolve_simultaneous(state: &SubspaceState, op: &SubspaceOperator, theta: f64) -> Result<SubspaceState> {
    if state.dimension() != op.dimension() {
        return Err(Error::DimensionMismatch(state.dimension(), op.dimension()));
    }
    Ok(DenseEvolver::new(op)?.evolve(state, theta))
}

/// Default `B⁺` prefactor: 1 for the minimal family, `1/N` otherwise.
pub fn default_scale(instance: &ProblemInstance, family: &MixingFamily) -> f64 {
    match family.provenance() {
        Provenance::Min => 1.0,
        _ => 1.0 / instance.n() as f64,
    }
}

/// Warm-start diagonal `½ Σ_i σ(z°_i)(1 − 2 z_i)` with `σ(z) = 2z − 1`.
pub fn warm_start_energy(warm: &Bitstring, z: &Bitstring) -> f64 {
    let mut e = 0.0;
    for i in 0..z.len() {
        let sigma = if warm.get(i) { 1.0 } else { -1.0 };
        let zi = if z.get(i) { -1.0 } else { 1.0 };
        e += sigma * zi;
    }
    0.5 * e
}

/// The three restricted operators of the generalized ansatz.
#[derive(Debug, Clone)]
pub struct Hamiltonians {
    pub basis: FeasibleBasis,
    pub a: SubspaceOperator,
    pub bplus: SubspaceOperator,
    pub c: SubspaceOperator,
    pub scale: f64,
}

impl Hamiltonians {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn a_diag(&self) -> &[f64] {
        match &self.a {
            SubspaceOperator::Diagonal(d) => d,
            _ => unreachable!("A is diagonal"),
        }
    }

    pub fn c_diag(&self) -> &[f64] {
        match &self.c {
            SubspaceOperator::Diagonal(d) => d,
            _ => unreachable!("C is diagonal"),
        }
    }
}

/// `A`, `B⁺ = scale · Σ (−M_j)` and `C` on `S^(b)`; `scale` defaults per
/// [`default_scale`].
pub fn build_hamiltonians(
    instance: &ProblemInstance,
    family: &MixingFamily,
    scale: Option<f64>,
) -> Result<Hamiltonians> {
    let warm = instance.warm_start().ok_or(Error::MissingWarmStart)?;
    let basis = instance.enumerate_feasible();
    if basis.is_empty() {
        return Err(Error::EmptyFeasibleSet);
    }
    let a = basis.states().iter().map(|z| warm_start_energy(&warm, z)).collect();
    let c = basis.states().iter().map(|z| instance.objective_unchecked(z)).collect();
    let components = family
        .operators()
        .iter()
        .map(|op| op.transition_pairs(&basis))
        .collect();
    Ok(Hamiltonians {
        a: SubspaceOperator::Diagonal(a),
        bplus: SubspaceOperator::PairCoupled {
            dimension: basis.len(),
            components,
            weight: scale.unwrap_or_else(|| default_scale(instance, family)),
        },
        c: SubspaceOperator::Diagonal(c),
        scale: scale.unwrap_or_else(|| default_scale(instance, family)),
        basis,
    })
}

/// Reusable simulator for one instance and family.
#[derive(Debug)]
pub struct QaoaSimulator {
    hamiltonians: Hamiltonians,
    initial: usize,
    optimal: Vec<usize>,
    ordering: Ordering,
    dense: OnceLock<Result<DenseEvolver>>,
}

impl QaoaSimulator {
    pub fn new(instance: &ProblemInstance, family: &MixingFamily) -> Result<Self> {
        Self::with_scale(instance, family, None)
    }

    pub fn with_scale(instance: &ProblemInstance, family: &MixingFamily, scale: Option<f64>) -> Result<Self> {
        let hamiltonians = build_hamiltonians(instance, family, scale)?;
        let warm = instance.warm_start().ok_or(Error::MissingWarmStart)?;
        let initial = hamiltonians.basis.index_of(&warm).expect("warm start is feasible");
        let optimal = optimal_indices(hamiltonians.c_diag());
        Ok(QaoaSimulator {
            hamiltonians,
            initial,
            optimal,
            ordering: Ordering::Canonical,
            dense: OnceLock::new(),
        })
    }

    pub fn with_ordering(mut self, ordering: Ordering) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn hamiltonians(&self) -> &Hamiltonians {
        &self.hamiltonians
    }

    pub fn basis(&self) -> &FeasibleBasis {
        &self.hamiltonians.basis
    }

    pub fn dimension(&self) -> usize {
        self.hamiltonians.dimension()
    }

    pub fn initial_state(&self) -> SubspaceState {
        SubspaceState::basis_state(self.dimension(), self.initial)
    }

    pub fn optimal_indices(&self) -> &[usize] {
        &self.optimal
    }

    fn dense(&self) -> Result<&DenseEvolver> {
        self.dense
            .get_or_init(|| DenseEvolver::new(&self.hamiltonians.bplus))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Mixer layer `e^{−iβB⁺}` (simultaneous) or its sequential product.
    pub fn mix(&self, state: &SubspaceState, beta: f64, mode: MixerMode) -> Result<SubspaceState> {
        match mode {
            MixerMode::Sequential => Ok(evolve_sequential(state, &self.hamiltonians.bplus, beta, self.ordering)),
            MixerMode::Simultaneous => Ok(self.dense()?.evolve(state, beta)),
        }
    }

    /// `Π_l e^{−iγ_l C} U_B(β_l) e^{−iα_l A} |z°⟩`, rightmost factor first.
    pub fn run(&self, angles: &AngleSet, mode: MixerMode) -> Result<SubspaceState> {
        angles.validate()?;
        let h = &self.hamiltonians;
        let mut state = self.initial_state();
        for (alpha, beta, gamma) in angles.layers() {
            state = evolve_diagonal(&state, h.a_diag(), alpha);
            state = self.mix(&state, beta, mode)?;
            state = evolve_diagonal(&state, h.c_diag(), gamma);
        }
        Ok(state)
    }

    pub fn pr_opt(&self, state: &SubspaceState) -> f64 {
        self.optimal.iter().map(|&u| state.amplitudes[u].norm_sqr()).sum()
    }

    pub fn run_pr_opt(&self, angles: &AngleSet, mode: MixerMode) -> Result<f64> {
        Ok(self.pr_opt(&self.run(angles, mode)?))
    }
}

fn optimal_indices(c: &[f64]) -> Vec<usize> {
    let min = c.iter().copied().fold(f64::INFINITY, f64::min);
    (0..c.len()).filter(|&u| c[u] - min <= OPTIMUM_TOLERANCE).collect()
}

pub fn qaoa_state(
    instance: &ProblemInstance,
    family: &MixingFamily,
    angles: &AngleSet,
    mode: MixerMode,
) -> Result<SubspaceState> {
    QaoaSimulator::new(instance, family)?.run(angles, mode)
}

/// Probability summed over all minimizers of the objective on `S^(b)`.
pub fn pr_opt(state: &SubspaceState, instance: &ProblemInstance) -> Result<f64> {
    let basis = instance.enumerate_feasible();
    if basis.len() != state.dimension() {
        return Err(Error::DimensionMismatch(basis.len(), state.dimension()));
    }
    let c: Vec<f64> = basis.states().iter().map(|z| instance.objective_unchecked(z)).collect();
    Ok(optimal_indices(&c)
        .into_iter()
        .map(|u| state.amplitudes[u].norm_sqr())
        .sum())
}

/// Trotterized annealing over total time `T` with `n_steps` steps: `p =
/// n_steps − 1` layers at `Δt = T/(p+1)`. The final step is dropped because
/// `e^{−iΔtC}` leaves basis populations unchanged.
pub fn adiabatic_evolve(
    instance: &ProblemInstance,
    family: &MixingFamily,
    schedule: &Schedule,
    total_time: f64,
    n_steps: usize,
    mode: MixerMode,
) -> Result<SubspaceState> {
    if n_steps == 0 {
        return Err(Error::OutOfRange("n_steps must be at least 1".into()));
    }
    let p = n_steps - 1;
    let angles = angles_from_schedule(schedule, p, total_time / n_steps as f64)?;
    qaoa_state(instance, family, &angles, mode)
}

/// Runs the generalized ansatz on all `2^N` amplitudes with each operator
/// exponentiated through its commuting Pauli terms, and returns the total
/// probability outside `S^(b)`. The mixer is applied sequentially with the
/// default prefactor.
pub fn leakage_check(instance: &ProblemInstance, family: &MixingFamily, angles: &AngleSet) -> Result<f64> {
    let n = instance.n();
    if n > FULL_SPACE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: FULL_SPACE_LIMIT,
        });
    }
    angles.validate()?;
    let warm = instance.warm_start().ok_or(Error::MissingWarmStart)?;
    let dim = 1usize << n;
    let states: Vec<Bitstring> = (0..dim as u64).map(|x| Bitstring::from_index(x, n)).collect();
    let a: Vec<f64> = states.iter().map(|z| warm_start_energy(&warm, z)).collect();
    let c: Vec<f64> = states.iter().map(|z| instance.objective_unchecked(z)).collect();
    let scale = default_scale(instance, family);
    let terms: Vec<Vec<_>> = family.operators().iter().map(|op| op.pauli_decompose()).collect();

    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[warm.index() as usize] = Complex64::new(1.0, 0.0);
    for (alpha, beta, gamma) in angles.layers() {
        for (x, &e) in psi.iter_mut().zip(&a) {
            *x *= Complex64::from_polar(1.0, -alpha * e);
        }
        // e^{−iβs(−M)} = Π_α e^{+iβ s c_α P_α}, all terms commuting.
        for op_terms in &terms {
            for term in op_terms {
                let phi = beta * scale * term.coefficient;
                let (cs, sn) = (phi.cos(), phi.sin());
                let mut next = vec![Complex64::new(0.0, 0.0); dim];
                for (x, amp) in psi.iter().enumerate() {
                    if amp.norm_sqr() == 0.0 {
                        continue;
                    }
                    let (y, phase) = term.apply_basis(n, x as u64);
                    next[x] += amp * cs;
                    next[y as usize] += amp * phase * Complex64::new(0.0, sn);
                }
                psi = next;
            }
        }
        for (x, &e) in psi.iter_mut().zip(&c) {
            *x *= Complex64::from_polar(1.0, -gamma * e);
        }
    }
    Ok(states
        .iter()
        .zip(&psi)
        .filter(|(z, _)| !instance.is_feasible(z))
        .map(|(_, amp)| amp.norm_sqr())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_instance() -> ProblemInstance {
        ProblemInstance::new(vec![1, 1], 1, vec![0.0, 1.0], vec![], Some("10".parse().unwrap())).unwrap()
    }

    #[test]
    fn two_state_bplus() {
        let p = pair_instance();
        let h = build_hamiltonians(&p, &MixingFamily::min(&p), None).unwrap();
        let dense = h.bplus.to_dense();
        assert_eq!(dense, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
    }

    #[test]
    fn sequential_pair_rotation() {
        let p = pair_instance();
        let h = build_hamiltonians(&p, &MixingFamily::min(&p), None).unwrap();
        let out = evolve_sequential(
            &SubspaceState::basis_state(2, 0),
            &h.bplus,
            std::f64::consts::FRAC_PI_2,
            Ordering::Canonical,
        );
        assert!(out.amplitudes[0].norm() < 1e-15);
        assert!((out.amplitudes[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn simultaneous_two_state_closed_form() {
        let p = pair_instance();
        let h = build_hamiltonians(&p, &MixingFamily::min(&p), None).unwrap();
        let theta = 0.731;
        let out = evolve_simultaneous(&SubspaceState::basis_state(2, 0), &h.bplus, theta).unwrap();
        assert!((out.amplitudes[0] - Complex64::new(theta.cos(), 0.0)).norm() < 1e-12);
        assert!((out.amplitudes[1] - Complex64::new(0.0, theta.sin())).norm() < 1e-12);
    }

    #[test]
    fn dense_cap_enforced() {
        let op = SubspaceOperator::Diagonal(vec![0.0; 10]);
        let err = DenseEvolver::with_cap(&op, 4).unwrap_err();
        assert_eq!(err, Error::DimensionTooLarge { dim: 10, cap: 4 });
    }

    #[test]
    fn missing_warm_start() {
        let p = ProblemInstance::linear(vec![1, 1], 1, vec![0.0, 1.0]).unwrap();
        let err = build_hamiltonians(&p, &MixingFamily::min(&p), None).unwrap_err();
        assert_eq!(err, Error::MissingWarmStart);
    }

    #[test]
    fn zero_layers_return_warm_start() {
        let p = pair_instance();
        let fam = MixingFamily::min(&p);
        let s = qaoa_state(&p, &fam, &AngleSet::zeros(0), MixerMode::Sequential).unwrap();
        assert_eq!(s, SubspaceState::basis_state(2, 1));
        let s = qaoa_state(&p, &fam, &AngleSet::zeros(3), MixerMode::Simultaneous).unwrap();
        assert!(s.max_diff(&SubspaceState::basis_state(2, 1)) < 1e-12);
        assert_eq!(leakage_check(&p, &fam, &AngleSet::zeros(0)).unwrap(), 0.0);
    }

    #[test]
    fn warm_start_energy_minimum() {
        let w: Bitstring = "1010".parse().unwrap();
        assert_eq!(warm_start_energy(&w, &w), -2.0);
        let far: Bitstring = "0101".parse().unwrap();
        assert_eq!(warm_start_energy(&w, &far), 2.0);
    }

    #[test]
    fn invalid_angles_rejected() {
        assert!(AngleSet::new(vec![0.0], vec![], vec![0.0]).is_err());
        assert!(AngleSet::new(vec![f64::NAN], vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn csv_dump_in_basis_order() {
        let p = pair_instance();
        let csv = SubspaceState::uniform(2).to_csv(&p.enumerate_feasible(), &p);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("01,") && lines[2].starts_with("10,"));
    }
}
