//! Strategies and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use seqmix::{Bitstring, MergeOperator, ProblemInstance};

/// Occurrence counts `l_1 ≥ 2`, `l_κ ≥ 1`, total at most `max_n`.
pub fn counts_strategy(max_n: usize) -> impl Strategy<Value = Vec<usize>> {
    (1usize..=4)
        .prop_flat_map(|k| {
            (2usize..=4, proptest::collection::vec(1usize..=3, k - 1)).prop_map(|(l1, rest)| {
                let mut c = vec![l1];
                c.extend(rest);
                c
            })
        })
        .prop_filter("too many variables", move |c| c.iter().sum::<usize>() <= max_n)
}

/// Shuffled sequential coefficients, random linear costs and a random target.
pub fn instance_strategy(max_n: usize) -> impl Strategy<Value = ProblemInstance> {
    counts_strategy(max_n)
        .prop_flat_map(|counts| {
            let coeffs: Vec<u32> = counts
                .iter()
                .enumerate()
                .flat_map(|(i, &c)| std::iter::repeat_n(i as u32 + 1, c))
                .collect();
            let n = coeffs.len();
            let total: u64 = coeffs.iter().map(|&c| c as u64).sum();
            (
                Just(coeffs).prop_shuffle(),
                proptest::collection::vec(-2.0f64..2.0, n),
                0..=total,
            )
        })
        .prop_map(|(coeffs, linear, b)| ProblemInstance::linear(coeffs, b, linear).unwrap())
}

/// Random valid instance drawn from a seeded generator.
pub fn random_instance(rng: &mut StdRng, max_n: usize) -> ProblemInstance {
    loop {
        let k = rng.random_range(1..=4u32);
        let mut coeffs = vec![1u32; rng.random_range(2..=4)];
        for kappa in 2..=k {
            for _ in 0..rng.random_range(1..=3) {
                coeffs.push(kappa);
            }
        }
        if coeffs.len() > max_n {
            continue;
        }
        for i in (1..coeffs.len()).rev() {
            coeffs.swap(i, rng.random_range(0..=i));
        }
        let total: u64 = coeffs.iter().map(|&c| c as u64).sum();
        let linear = (0..coeffs.len()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let b = rng.random_range(0..=total);
        return ProblemInstance::linear(coeffs, b, linear).unwrap();
    }
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Every feasible string by scanning all `2^N` integers.
pub fn brute_feasible(inst: &ProblemInstance) -> Vec<Bitstring> {
    let n = inst.n();
    (0..1u64 << n)
        .map(|x| Bitstring::from_index(x, n))
        .filter(|z| {
            let v: u64 = (0..n).filter(|&i| z.get(i)).map(|i| inst.coefficient(i) as u64).sum();
            v == inst.target()
        })
        .collect()
}

/// Full-space matrix of `M_{I,i*}` straight from its two ket-bra terms.
pub fn merge_matrix_oracle(n: usize, sources: &[usize], target: usize) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim as u64 {
        let z = Bitstring::from_index(x, n);
        if sources.iter().all(|&i| z.get(i)) && !z.get(target) {
            let mut w = z;
            sources.iter().for_each(|&i| w.set(i, false));
            w.set(target, true);
            m[(w.index() as usize, x as usize)] = 1.0;
            m[(x as usize, w.index() as usize)] = 1.0;
        }
    }
    m
}

/// Full-space complex matrix of a weighted Pauli string.
pub fn pauli_matrix(n: usize, term: &seqmix::PauliTerm) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim as u64 {
        let (y, phase) = term.apply_basis(n, x);
        m[(y as usize, x as usize)] += phase * term.coefficient;
    }
    m
}

/// `exp(−iθM)` for a merge operator: `cos θ` on coupled pairs with `−i sin θ`
/// across, identity elsewhere, since `M²` projects onto the coupled pairs.
pub fn merge_exponential_oracle(n: usize, sources: &[usize], target: usize, theta: f64) -> DMatrix<Complex64> {
    let m = merge_matrix_oracle(n, sources, target);
    let dim = 1usize << n;
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    for r in 0..dim {
        let coupled = (0..dim).any(|c| m[(r, c)] != 0.0);
        if coupled {
            u[(r, r)] = Complex64::new(theta.cos(), 0.0);
            for c in 0..dim {
                if m[(r, c)] != 0.0 {
                    u[(r, c)] = Complex64::new(0.0, -theta.sin());
                }
            }
        }
    }
    u
}

pub fn max_abs(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `exp(−iθH)` for real symmetric `H` by a dense eigendecomposition.
pub fn dense_expm(h: &DMatrix<f64>, theta: f64) -> DMatrix<Complex64> {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -theta * l)));
    &v * d * v.transpose()
}

pub fn apply(u: &DMatrix<Complex64>, psi: &[Complex64]) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(psi);
    (u * v).iter().copied().collect()
}

/// Random normalized complex vector.
pub fn random_state(rng: &mut StdRng, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

/// Every valid merge operator of `inst` with at most `max_sources` sources,
/// by scanning all (target, subset) pairs.
pub fn brute_merges(inst: &ProblemInstance, max_sources: usize) -> Vec<MergeOperator> {
    let n = inst.n();
    let mut out = Vec::new();
    for target in 0..n {
        for mask in 1u32..(1 << n) {
            if mask & (1 << target) != 0 || mask.count_ones() as usize > max_sources {
                continue;
            }
            let sources: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let sum: u32 = sources.iter().map(|&i| inst.coefficient(i)).sum();
            if sum != inst.coefficient(target) {
                continue;
            }
            // m = 1 operators are symmetric; keep one orientation.
            if sources.len() == 1 && sources[0] > target {
                continue;
            }
            out.push(MergeOperator::new(inst, &sources, target).unwrap());
        }
    }
    out
}

/// Instance with a nonempty feasible set and a warm start drawn from it.
pub fn warm_instance_strategy(max_n: usize) -> impl Strategy<Value = ProblemInstance> {
    (instance_strategy(max_n), any::<prop::sample::Index>()).prop_filter_map("empty feasible set", |(inst, pick)| {
        let basis = inst.enumerate_feasible();
        if basis.is_empty() {
            return None;
        }
        let z = basis.state(pick.index(basis.len()));
        Some(inst.with_warm_start(z).unwrap())
    })
}

/// Seeded counterpart of [`warm_instance_strategy`].
pub fn random_warm_instance(rng: &mut StdRng, max_n: usize) -> ProblemInstance {
    loop {
        let inst = random_instance(rng, max_n);
        let basis = inst.enumerate_feasible();
        if basis.is_empty() {
            continue;
        }
        let z = basis.state(rng.random_range(0..basis.len()));
        return inst.with_warm_start(z).unwrap();
    }
}

/// Random angle set with entries uniform in `[-π, π]`.
pub fn random_angles(rng: &mut StdRng, p: usize) -> seqmix::AngleSet {
    let mut draw = || {
        (0..p)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect()
    };
    let (a, b, c) = (draw(), draw(), draw());
    seqmix::AngleSet::new(a, b, c).unwrap()
}
