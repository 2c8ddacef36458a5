//! Shared fixtures for the criterion benches.

use seqmix::ProblemInstance;

/// Instance with `per_value` copies of each coefficient `1..=k` and target at
/// half the coefficient sum.
pub fn balanced_instance(k: u32, per_value: usize) -> ProblemInstance {
    let coeffs: Vec<u32> = (1..=k).flat_map(|v| std::iter::repeat_n(v, per_value)).collect();
    let n = coeffs.len();
    let target = coeffs.iter().map(|&c| c as u64).sum::<u64>() / 2;
    let linear = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 / 5.0).collect();
    ProblemInstance::linear(coeffs, target, linear).expect("balanced instance is valid")
}

/// [`balanced_instance`] with its first feasible state as warm start.
pub fn warm_instance(k: u32, per_value: usize) -> ProblemInstance {
    let inst = balanced_instance(k, per_value);
    let z = inst.enumerate_feasible().state(0);
    inst.with_warm_start(z).expect("state is feasible")
}
