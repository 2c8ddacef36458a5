//! Constrained binary problems `min C(z)` subject to `Σ s_i z_i = b`, where the
//! coefficients form a sequential set `{1, …, k}` (value 1 at least twice, every
//! other value at least once).
//!
//! Variables carry two equivalent labels: a flat index `i` and a
//! [`KappaIndex`] `[κ, l]` meaning "the `l`-th variable with coefficient `κ`",
//! counted in flat order.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::{Bitstring, MAX_BITS};
use crate::error::{Error, Result};

/// `[κ, l]` label of a variable. Both components are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KappaIndex {
    pub kappa: u32,
    pub l: u32,
}

impl KappaIndex {
    pub fn new(kappa: u32, l: u32) -> Self {
        KappaIndex { kappa, l }
    }
}

impl std::fmt::Display for KappaIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.kappa, self.l)
    }
}

/// A `(i, j, J_ij)` quadratic objective term, 0-based indices.
pub type QuadraticTerm = (usize, usize, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    coefficients: Vec<u32>,
    target: u64,
    linear: Vec<f64>,
    quadratic: Vec<QuadraticTerm>,
    warm_start: Option<Bitstring>,
    k: u32,
    // occurrences[κ - 1] = l_κ
    occurrences: Vec<usize>,
    kappa_of: Vec<KappaIndex>,
    // flat_of[κ - 1][l - 1] = i
    flat_of: Vec<Vec<usize>>,
}

impl ProblemInstance {
    /// Validates and builds an instance.
    pub fn new(
        coefficients: Vec<u32>,
        target: u64,
        linear: Vec<f64>,
        quadratic: Vec<QuadraticTerm>,
        warm_start: Option<Bitstring>,
    ) -> Result<Self> {
        if coefficients.is_empty() || coefficients.contains(&0) {
            return Err(Error::InvalidCoefficients);
        }
        let n = coefficients.len();
        if n > MAX_BITS {
            return Err(Error::TooLarge { n, limit: MAX_BITS });
        }
        if linear.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: linear.len(),
            });
        }
        for &(i, j, _) in &quadratic {
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
        }

        let k = *coefficients.iter().max().unwrap();
        let mut occurrences = vec![0usize; k as usize];
        let mut kappa_of = Vec::with_capacity(n);
        let mut flat_of = vec![Vec::new(); k as usize];
        for (i, &s) in coefficients.iter().enumerate() {
            occurrences[s as usize - 1] += 1;
            kappa_of.push(KappaIndex::new(s, occurrences[s as usize - 1] as u32));
            flat_of[s as usize - 1].push(i);
        }
        if occurrences[0] < 2 {
            return Err(Error::SequentialityViolation {
                kappa: 1,
                required: 2,
                found: occurrences[0],
            });
        }
        if let Some(pos) = occurrences.iter().position(|&c| c == 0) {
            return Err(Error::SequentialityViolation {
                kappa: pos as u32 + 1,
                required: 1,
                found: 0,
            });
        }

        let inst = ProblemInstance {
            coefficients,
            target,
            linear,
            quadratic,
            warm_start: None,
            k,
            occurrences,
            kappa_of,
            flat_of,
        };
        if let Some(ws) = warm_start {
            if ws.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: ws.len(),
                });
            }
            let got = inst.constraint_value(&ws);
            if got != target {
                return Err(Error::InfeasibleWarmStart { got, expected: target });
            }
        }
        Ok(ProblemInstance { warm_start, ..inst })
    }

    /// Linear-objective shorthand.
    pub fn linear(coefficients: Vec<u32>, target: u64, linear: Vec<f64>) -> Result<Self> {
        Self::new(coefficients, target, linear, Vec::new(), None)
    }

    /// Same constraint and objective, different right-hand side. The warm start
    /// is dropped since it belongs to the old `b`.
    pub fn with_target(&self, target: u64) -> Self {
        ProblemInstance {
            target,
            warm_start: None,
            ..self.clone()
        }
    }

    pub fn with_warm_start(&self, warm_start: Bitstring) -> Result<Self> {
        Self::new(
            self.coefficients.clone(),
            self.target,
            self.linear.clone(),
            self.quadratic.clone(),
            Some(warm_start),
        )
    }

    pub fn n(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[u32] {
        &self.coefficients
    }

    pub fn coefficient(&self, i: usize) -> u32 {
        self.coefficients[i]
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn linear_terms(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic_terms(&self) -> &[QuadraticTerm] {
        &self.quadratic
    }

    pub fn warm_start(&self) -> Option<Bitstring> {
        self.warm_start
    }

    /// Largest coefficient `k`.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// `l_κ`, the number of variables with coefficient `κ`.
    pub fn occurrences(&self, kappa: u32) -> usize {
        if kappa == 0 || kappa > self.k {
            0
        } else {
            self.occurrences[kappa as usize - 1]
        }
    }

    pub fn coefficient_sum(&self) -> u64 {
        self.coefficients.iter().map(|&s| s as u64).sum()
    }

    pub fn kappa_index(&self, i: usize) -> KappaIndex {
        self.kappa_of[i]
    }

    pub fn flat_index(&self, idx: KappaIndex) -> Option<usize> {
        self.flat_of
            .get((idx.kappa as usize).checked_sub(1)?)?
            .get((idx.l as usize).checked_sub(1)?)
            .copied()
    }

    /// Flat index of `[κ, l]`; panics on a label outside the instance.
    pub fn at(&self, kappa: u32, l: u32) -> usize {
        self.flat_index(KappaIndex::new(kappa, l))
            .unwrap_or_else(|| panic!("no variable [{kappa},{l}]"))
    }

    pub fn constraint_value(&self, z: &Bitstring) -> u64 {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|&(i, _)| z.get(i))
            .map(|(_, &s)| s as u64)
            .sum()
    }

    pub fn is_feasible(&self, z: &Bitstring) -> bool {
        z.len() == self.n() && self.constraint_value(z) == self.target
    }

    /// `Σ J_ij z_i z_j + Σ c_i z_i`.
    pub fn objective_value(&self, z: &Bitstring) -> Result<f64> {
        if z.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: z.len(),
            });
        }
        Ok(self.objective_unchecked(z))
    }

    pub(crate) fn objective_unchecked(&self, z: &Bitstring) -> f64 {
        let lin: f64 = self
            .linear
            .iter()
            .enumerate()
            .filter(|&(i, _)| z.get(i))
            .map(|(_, c)| c)
            .sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .filter(|&&(i, j, _)| z.get(i) && z.get(j))
            .map(|&(_, _, w)| w)
            .sum();
        lin + quad
    }

    /// Every feasible bitstring, in lexicographic order.
    pub fn enumerate_feasible(&self) -> FeasibleBasis {
        let n = self.n();
        let mut states = Vec::new();
        // Depth-first over variables with suffix-sum pruning keeps this well below
        // 2^N for small b.
        let mut suffix = vec![0u64; n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + self.coefficients[i] as u64;
        }
        let mut cur = Bitstring::zeros(n);
        self.enumerate_rec(0, 0, &suffix, &mut cur, &mut states);
        FeasibleBasis::from_sorted(states)
    }

    fn enumerate_rec(&self, i: usize, sum: u64, suffix: &[u64], cur: &mut Bitstring, out: &mut Vec<Bitstring>) {
        if sum > self.target || sum + suffix[i] < self.target {
            return;
        }
        if i == self.n() {
            out.push(*cur);
            return;
        }
        // 0 before 1 yields lexicographic order.
        cur.set(i, false);
        self.enumerate_rec(i + 1, sum, suffix, cur, out);
        cur.set(i, true);
        self.enumerate_rec(i + 1, sum + self.coefficients[i] as u64, suffix, cur, out);
        cur.set(i, false);
    }

    /// Brute-force minimum over the feasible set. Ties go to the
    /// lexicographically smallest bitstring.
    pub fn find_optimum(&self) -> Result<(Bitstring, f64)> {
        let basis = self.enumerate_feasible();
        let mut best: Option<(Bitstring, f64)> = None;
        for &z in basis.states() {
            let v = self.objective_unchecked(&z);
            match best {
                Some((_, bv)) if v >= bv => {}
                _ => best = Some((z, v)),
            }
        }
        best.ok_or(Error::EmptyFeasibleSet)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            coefficients: self.coefficients.clone(),
            b: self.target,
            linear: self.linear.clone(),
            quadratic: self.quadratic.iter().map(|&(i, j, w)| (i, j, w)).collect(),
            warm_start: self.warm_start,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_instance()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }
}

/// On-disk instance format. Indices are 0-based.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub coefficients: Vec<u32>,
    pub b: u64,
    pub linear: Vec<f64>,
    #[serde(default)]
    pub quadratic: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<Bitstring>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<ProblemInstance> {
        ProblemInstance::new(self.coefficients, self.b, self.linear, self.quadratic, self.warm_start)
    }
}

/// The feasible bitstrings of an instance with a position lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleBasis {
    states: Vec<Bitstring>,
    index_of: HashMap<Bitstring, usize>,
}

impl FeasibleBasis {
    fn from_sorted(states: Vec<Bitstring>) -> Self {
        debug_assert!(states.windows(2).all(|w| w[0] < w[1]));
        let index_of = states.iter().enumerate().map(|(i, &z)| (z, i)).collect();
        FeasibleBasis { states, index_of }
    }

    /// Builds a basis from arbitrary states; sorts and deduplicates.
    pub fn from_states(mut states: Vec<Bitstring>) -> Self {
        states.sort();
        states.dedup();
        Self::from_sorted(states)
    }

    pub fn states(&self) -> &[Bitstring] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, idx: usize) -> Bitstring {
        self.states[idx]
    }

    pub fn index_of(&self, z: &Bitstring) -> Option<usize> {
        self.index_of.get(z).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    #[test]
    fn sequential_example_is_valid() {
        let inst = ProblemInstance::linear(vec![1, 1, 2], 2, vec![0.0; 3]).unwrap();
        assert_eq!(inst.k(), 2);
        assert_eq!(inst.occurrences(1), 2);
        assert_eq!(inst.occurrences(2), 1);
    }

    #[test]
    fn missing_kappa_is_reported() {
        let err = ProblemInstance::linear(vec![1, 1, 3], 2, vec![0.0; 3]).unwrap_err();
        assert_eq!(
            err,
            Error::SequentialityViolation {
                kappa: 2,
                required: 1,
                found: 0
            }
        );
    }

    #[test]
    fn single_unit_coefficient_rejected() {
        let err = ProblemInstance::linear(vec![1, 2], 1, vec![0.0; 2]).unwrap_err();
        assert!(matches!(err, Error::SequentialityViolation { kappa: 1, .. }));
        assert_eq!(
            ProblemInstance::linear(vec![], 0, vec![]).unwrap_err(),
            Error::InvalidCoefficients
        );
        assert_eq!(
            ProblemInstance::linear(vec![1, 0, 1], 0, vec![0.0; 3]).unwrap_err(),
            Error::InvalidCoefficients
        );
    }

    #[test]
    fn warm_start_checked() {
        let ok = ProblemInstance::new(
            vec![1, 1, 1, 2, 2, 2, 3, 3],
            8,
            vec![0.0; 8],
            vec![],
            Some(bs("11100110")),
        );
        assert!(ok.is_ok());
        let bad = ProblemInstance::new(vec![1, 1, 2], 2, vec![0.0; 3], vec![], Some(bs("100")));
        assert_eq!(bad.unwrap_err(), Error::InfeasibleWarmStart { got: 1, expected: 2 });
    }

    #[test]
    fn enumerate_small_cases() {
        let inst = ProblemInstance::linear(vec![1, 1, 2], 2, vec![0.0; 3]).unwrap();
        let basis = inst.enumerate_feasible();
        assert_eq!(basis.states(), &[bs("001"), bs("110")]);
        assert_eq!(basis.index_of(&bs("110")), Some(1));

        let inst = ProblemInstance::linear(vec![1, 1], 1, vec![0.0; 2]).unwrap();
        assert_eq!(inst.enumerate_feasible().states(), &[bs("01"), bs("10")]);

        let inst = ProblemInstance::linear(vec![1, 1], 5, vec![0.0; 2]).unwrap();
        assert!(inst.enumerate_feasible().is_empty());
    }

    #[test]
    fn kappa_round_trip() {
        let inst = ProblemInstance::linear(vec![1, 2, 1, 3, 2], 0, vec![0.0; 5]).unwrap();
        assert_eq!(inst.kappa_index(2), KappaIndex::new(1, 2));
        assert_eq!(inst.kappa_index(4), KappaIndex::new(2, 2));
        for i in 0..inst.n() {
            assert_eq!(inst.flat_index(inst.kappa_index(i)), Some(i));
        }
        assert_eq!(inst.flat_index(KappaIndex::new(3, 2)), None);
        assert_eq!(inst.flat_index(KappaIndex::new(0, 1)), None);
    }

    #[test]
    fn objective_and_optimum() {
        let inst = ProblemInstance::new(vec![1, 1, 2], 2, vec![1.0, 2.0, 0.5], vec![(0, 1, -4.0)], None).unwrap();
        assert_eq!(inst.objective_value(&bs("000")).unwrap(), 0.0);
        assert_eq!(inst.objective_value(&bs("110")).unwrap(), -1.0);
        assert!(inst.objective_value(&bs("11")).is_err());
        assert_eq!(inst.find_optimum().unwrap(), (bs("110"), -1.0));

        let inst = ProblemInstance::linear(vec![1, 1], 2, vec![1.0, 2.0]).unwrap();
        assert_eq!(inst.find_optimum().unwrap(), (bs("11"), 3.0));
        assert_eq!(inst.with_target(3).find_optimum().unwrap_err(), Error::EmptyFeasibleSet);
    }

    #[test]
    fn optimum_ties_prefer_lexicographic_first() {
        let inst = ProblemInstance::linear(vec![1, 1], 1, vec![1.0, 1.0]).unwrap();
        assert_eq!(inst.find_optimum().unwrap().0, bs("01"));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"coefficients":[1,1,2],"b":2,"linear":[0.1,0.2,0.3],
                       "quadratic":[[0,2,1.5]],"warm_start":"110"}"#;
        let inst = ProblemInstance::from_json(text).unwrap();
        assert_eq!(inst.warm_start(), Some(bs("110")));
        let again = serde_json::to_string(&inst.to_file()).unwrap();
        assert_eq!(ProblemInstance::from_json(&again).unwrap(), inst);
        assert!(matches!(
            ProblemInstance::from_json("{\"coefficients\":[1]}"),
            Err(Error::Parse(_))
        ));
    }
}
