//! Merge operators and mixing families.
//!
//! `M_{I,i*}` swaps the pattern "all of `I` set, `i*` clear" with "all of `I`
//! clear, `i*` set" and annihilates every other basis state. When the source
//! coefficients add up to the target coefficient the constraint value is
//! unchanged, so the operator never leaves a feasible subspace. Families store
//! the operators un-negated; the mixer Hamiltonian is `B⁺ = scale · Σ (−M)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::problem::{FeasibleBasis, ProblemInstance};

/// Default cap on `|I|` when enumerating the maximal family.
pub const DEFAULT_MAX_SOURCES: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MergeOperator {
    sources: Vec<usize>,
    target: usize,
}

impl MergeOperator {
    /// Validated constructor (`make_merge`).
    pub fn new(instance: &ProblemInstance, sources: &[usize], target: usize) -> Result<Self> {
        let n = instance.n();
        for &i in sources.iter().chain(std::iter::once(&target)) {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
        }
        let op = Self::new_unchecked(sources, target)?;
        let src: u64 = op.sources.iter().map(|&i| instance.coefficient(i) as u64).sum();
        let tgt = instance.coefficient(op.target) as u64;
        if src != tgt {
            return Err(Error::CoefficientMismatch {
                sources: src,
                target: tgt,
            });
        }
        Ok(op)
    }

    /// Structural constructor that skips the coefficient check. Used to build
    /// deliberately broken families in tests and leakage experiments.
    pub fn new_unchecked(sources: &[usize], target: usize) -> Result<Self> {
        let set: BTreeSet<usize> = sources.iter().copied().collect();
        if set.is_empty() || set.len() != sources.len() || set.contains(&target) {
            return Err(Error::MalformedMerge);
        }
        let mut sources: Vec<usize> = set.into_iter().collect();
        let mut target = target;
        // M_{a,b} and M_{b,a} are the same operator; keep the smaller index as source.
        if sources.len() == 1 && sources[0] > target {
            std::mem::swap(&mut sources[0], &mut target);
        }
        Ok(MergeOperator { sources, target })
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// `m = |I|`.
    pub fn m(&self) -> usize {
        self.sources.len()
    }

    /// Qubits acted on: `I` in ascending order followed by `i*`.
    pub fn support(&self) -> Vec<usize> {
        let mut s = self.sources.clone();
        s.push(self.target);
        s
    }

    pub fn support_len(&self) -> usize {
        self.sources.len() + 1
    }

    pub fn coefficient_sum_holds(&self, instance: &ProblemInstance) -> bool {
        let src: u64 = self.sources.iter().map(|&i| instance.coefficient(i) as u64).sum();
        src == instance.coefficient(self.target) as u64
    }

    /// Raw-bit masks for `(I, i*)` in an `n`-variable bitstring.
    pub fn masks(&self, n: usize) -> (u64, u64) {
        let src = self.sources.iter().fold(0u64, |acc, &i| acc | Bitstring::mask_of(n, i));
        (src, Bitstring::mask_of(n, self.target))
    }

    /// Image of `z` under `M` if `z` is one of the two matched patterns.
    pub fn partner(&self, z: &Bitstring) -> Option<Bitstring> {
        let (src, tgt) = self.masks(z.len());
        let v = z.index();
        let merged = v & src == 0 && v & tgt != 0;
        let split = v & src == src && v & tgt == 0;
        if merged || split {
            Some(z.flipped(src | tgt))
        } else {
            None
        }
    }

    /// `⟨z|M|z'⟩` straight from the definition.
    pub fn matrix_element(&self, z: &Bitstring, zp: &Bitstring) -> f64 {
        match self.partner(zp) {
            Some(w) if w == *z => 1.0,
            _ => 0.0,
        }
    }

    /// Feasible-basis pairs `(u, v)` with `u < v` connected by this operator.
    pub fn transition_pairs(&self, basis: &FeasibleBasis) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for (u, z) in basis.states().iter().enumerate() {
            if let Some(w) = self.partner(z) {
                if let Some(v) = basis.index_of(&w) {
                    if u < v {
                        pairs.push((u, v));
                    }
                }
            }
        }
        pairs
    }

    /// Exact Pauli expansion: `2^{|I|}` terms of X/Y strings with an even number
    /// of Y factors, coefficient `±2^{-|I|}`.
    pub fn pauli_decompose(&self) -> Vec<PauliTerm> {
        let support = self.support();
        let len = support.len();
        let mag = 0.5f64.powi(self.m() as i32);
        let mut terms = Vec::with_capacity(1 << self.m());
        // Enumerate Y-subsets in binary order, support qubit 0 most significant.
        for mask in 0u32..(1 << len) {
            if mask.count_ones() % 2 != 0 {
                continue;
            }
            let axes: Vec<PauliAxis> = (0..len)
                .map(|q| {
                    if mask & (1 << (len - 1 - q)) != 0 {
                        PauliAxis::Y
                    } else {
                        PauliAxis::X
                    }
                })
                .collect();
            let half = (mask.count_ones() / 2) as i32;
            let mut sign = if half % 2 == 0 { 1.0 } else { -1.0 };
            if axes[len - 1] == PauliAxis::Y {
                sign = -sign;
            }
            terms.push(PauliTerm {
                coefficient: sign * mag,
                qubits: support.clone(),
                axes,
            });
        }
        terms
    }
}

impl fmt::Display for MergeOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let src: Vec<String> = self.sources.iter().map(|i| i.to_string()).collect();
        write!(f, "M({{{}}}->{})", src.join(","), self.target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
}

impl PauliAxis {
    pub fn symbol(self) -> char {
        match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
        }
    }
}

/// `coefficient · ⊗_q σ^{axes[q]}_{qubits[q]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub qubits: Vec<usize>,
    pub axes: Vec<PauliAxis>,
}

impl PauliTerm {
    pub fn y_count(&self) -> usize {
        self.axes.iter().filter(|&&a| a == PauliAxis::Y).count()
    }

    /// Axis string such as `"YXY"`, in support order.
    pub fn label(&self) -> String {
        self.axes.iter().map(|a| a.symbol()).collect()
    }

    /// Action on a basis state of an `n`-qubit register: `P|z⟩ = phase · |z ⊕ mask⟩`.
    pub fn apply_basis(&self, n: usize, z: u64) -> (u64, num_complex::Complex64) {
        use num_complex::Complex64;
        let mut phase = Complex64::new(1.0, 0.0);
        let mut flip = 0u64;
        for (&q, &a) in self.qubits.iter().zip(&self.axes) {
            let m = Bitstring::mask_of(n, q);
            flip |= m;
            if a == PauliAxis::Y {
                // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩
                phase *= if z & m == 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
            }
        }
        (z ^ flip, phase)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}·", self.coefficient)?;
        for (q, a) in self.qubits.iter().zip(&self.axes) {
            write!(f, "{}{}", a.symbol(), q)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Min,
    Max,
    MuMax { mu: usize },
    Custom,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Min => f.write_str("min"),
            Provenance::Max => f.write_str("max"),
            Provenance::MuMax { mu } => write!(f, "mu-max:{mu}"),
            Provenance::Custom => f.write_str("custom"),
        }
    }
}

/// Ordered set of merge operators, applied in this order by the sequential mixer.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingFamily {
    operators: Vec<MergeOperator>,
    provenance: Provenance,
}

impl MixingFamily {
    /// Custom family; duplicates are dropped, order of first appearance kept.
    /// Operators are not checked against any instance.
    pub fn custom(operators: Vec<MergeOperator>) -> Self {
        let mut seen = BTreeSet::new();
        let operators = operators.into_iter().filter(|op| seen.insert(op.clone())).collect();
        MixingFamily {
            operators,
            provenance: Provenance::Custom,
        }
    }

    fn sorted(mut operators: Vec<MergeOperator>, provenance: Provenance) -> Self {
        operators.sort_by(|a, b| (a.m(), a.target, &a.sources).cmp(&(b.m(), b.target, &b.sources)));
        operators.dedup();
        MixingFamily { operators, provenance }
    }

    /// Swaps between neighbouring variables of equal coefficient plus the chain
    /// of 2-to-1 merges `{[1,1],[κ,1]} → [κ+1,1]` and `{[1,1],[1,2]} → [2,1]`.
    pub fn min(instance: &ProblemInstance) -> Self {
        let mut ops = Vec::new();
        for kappa in 1..=instance.k() {
            for l in 1..instance.occurrences(kappa) as u32 {
                let a = instance.at(kappa, l);
                let b = instance.at(kappa, l + 1);
                ops.push(MergeOperator::new(instance, &[a], b).expect("equal coefficients"));
            }
        }
        if instance.k() >= 2 {
            let sources = [instance.at(1, 1), instance.at(1, 2)];
            ops.push(MergeOperator::new(instance, &sources, instance.at(2, 1)).expect("1 + 1 = 2"));
        }
        for kappa in 2..instance.k() {
            let sources = [instance.at(1, 1), instance.at(kappa, 1)];
            ops.push(MergeOperator::new(instance, &sources, instance.at(kappa + 1, 1)).expect("1 + κ = κ + 1"));
        }
        Self::sorted(ops, Provenance::Min)
    }

    /// Every merge operator with at most [`DEFAULT_MAX_SOURCES`] sources.
    pub fn max(instance: &ProblemInstance) -> Self {
        Self::max_with_cap(instance, DEFAULT_MAX_SOURCES)
    }

    /// Every merge operator with `|I| <= max_sources`.
    pub fn max_with_cap(instance: &ProblemInstance, max_sources: usize) -> Self {
        Self::sorted(enumerate_merges(instance, max_sources), Provenance::Max)
    }

    /// Maximal family truncated to operators on at most `mu` qubits.
    pub fn mu_max(instance: &ProblemInstance, mu: usize) -> Result<Self> {
        Self::mu_max_with_cap(instance, mu, DEFAULT_MAX_SOURCES)
    }

    pub fn mu_max_with_cap(instance: &ProblemInstance, mu: usize, max_sources: usize) -> Result<Self> {
        let needed = if instance.k() >= 2 { 2 } else { 1 };
        if mu < needed + 1 {
            return Err(Error::MuTooSmall { mu });
        }
        let cap = (mu - 1).min(max_sources);
        Ok(Self::sorted(enumerate_merges(instance, cap), Provenance::MuMax { mu }))
    }

    pub fn operators(&self) -> &[MergeOperator] {
        &self.operators
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn contains(&self, op: &MergeOperator) -> bool {
        self.operators.contains(op)
    }

    pub fn is_subset_of(&self, other: &MixingFamily) -> bool {
        self.operators.iter().all(|op| other.contains(op))
    }

    /// Same operators without the one at `index`.
    pub fn without(&self, index: usize) -> Self {
        let mut operators = self.operators.clone();
        operators.remove(index);
        MixingFamily {
            operators,
            provenance: Provenance::Custom,
        }
    }

    /// Same operators in a different application order.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() {
            return Err(Error::DimensionMismatch(order.len(), self.len()));
        }
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::OutOfRange(format!("invalid permutation entry {i}")));
            }
        }
        Ok(MixingFamily {
            operators: order.iter().map(|&i| self.operators[i].clone()).collect(),
            provenance: self.provenance.clone(),
        })
    }

    pub fn reversed(&self) -> Self {
        let order: Vec<usize> = (0..self.len()).rev().collect();
        self.reordered(&order).expect("valid permutation")
    }

    /// Operators whose coefficient-sum condition fails for `instance`.
    pub fn invalid_operators(&self, instance: &ProblemInstance) -> Vec<&MergeOperator> {
        self.operators
            .iter()
            .filter(|op| op.support().iter().any(|&i| i >= instance.n()) || !op.coefficient_sum_holds(instance))
            .collect()
    }

    pub fn to_file(&self) -> FamilyFile {
        FamilyFile {
            provenance: self.provenance.clone(),
            operators: self
                .operators
                .iter()
                .map(|op| FamilyEntry {
                    sources: op.sources.clone(),
                    target: op.target,
                })
                .collect(),
        }
    }

    /// Reads either a bare operator array or an object with a provenance header.
    /// Every operator is validated against `instance`.
    pub fn from_json(instance: &ProblemInstance, text: &str) -> Result<Self> {
        let entries: Vec<FamilyEntry> = match serde_json::from_str::<FamilyFile>(text) {
            Ok(file) => file.operators,
            Err(_) => serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?,
        };
        let ops = entries
            .iter()
            .map(|e| MergeOperator::new(instance, &e.sources, e.target))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::custom(ops))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub sources: Vec<usize>,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub provenance: Provenance,
    pub operators: Vec<FamilyEntry>,
}

/// All source sets with matching coefficient sum, per target.
fn enumerate_merges(instance: &ProblemInstance, max_sources: usize) -> Vec<MergeOperator> {
    let n = instance.n();
    let coeffs = instance.coefficients();
    let mut out = Vec::new();
    for target in 0..n {
        let goal = coeffs[target] as u64;
        let candidates: Vec<usize> = (0..n).filter(|&i| i != target && (coeffs[i] as u64) <= goal).collect();
        // Suffix sums bound the reachable total for pruning.
        let mut suffix = vec![0u64; candidates.len() + 1];
        for j in (0..candidates.len()).rev() {
            suffix[j] = suffix[j + 1] + coeffs[candidates[j]] as u64;
        }
        let mut chosen = Vec::new();
        subset_search(
            coeffs,
            &candidates,
            &suffix,
            0,
            goal,
            max_sources,
            &mut chosen,
            &mut |set| {
                if set.len() == 1 && set[0] > target {
                    // counted from the other side
                    return;
                }
                out.push(MergeOperator {
                    sources: set.to_vec(),
                    target,
                });
            },
        );
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn subset_search(
    coeffs: &[u32],
    candidates: &[usize],
    suffix: &[u64],
    pos: usize,
    remaining: u64,
    max_len: usize,
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if remaining == 0 {
        if !chosen.is_empty() {
            emit(chosen);
        }
        return;
    }
    if pos == candidates.len() || chosen.len() == max_len || suffix[pos] < remaining {
        return;
    }
    let i = candidates[pos];
    let s = coeffs[i] as u64;
    if s <= remaining {
        chosen.push(i);
        subset_search(
            coeffs,
            candidates,
            suffix,
            pos + 1,
            remaining - s,
            max_len,
            chosen,
            emit,
        );
        chosen.pop();
    }
    subset_search(coeffs, candidates, suffix, pos + 1, remaining, max_len, chosen, emit);
}
