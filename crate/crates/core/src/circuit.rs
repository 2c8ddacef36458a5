//! Exact gate sequences for `exp(−iθM)` built from the commuting Pauli
//! expansion of a merge operator.
//!
//! Conventions: `RX(t) = exp(−i t X/2)`, `RZ(t) = exp(−i t Z/2)`, qubit `q`
//! is variable `z_q`, and dense unitaries use the basis index of
//! [`Bitstring`](crate::bits::Bitstring).

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::mixers::{MergeOperator, PauliAxis, PauliTerm};

/// Register limit for dense unitary construction.
pub const DENSE_QUBIT_LIMIT: usize = 10;

const HEADER_NOTE: &str = "// rx(t) = exp(-i t X/2), rz(t) = exp(-i t Z/2)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate {
    Cx { control: usize, target: usize },
    Rx { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    H { qubit: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cx { control, target } => vec![control, target],
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } | Gate::H { qubit } => vec![qubit],
        }
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, Gate::Rx { .. } | Gate::Rz { .. })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Cx { control, target } => write!(f, "cx q[{control}],q[{target}]"),
            Gate::Rx { qubit, angle } => write!(f, "rx({angle}) q[{qubit}]"),
            Gate::Rz { qubit, angle } => write!(f, "rz({angle}) q[{qubit}]"),
            Gate::H { qubit } => write!(f, "h q[{qubit}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.gates.extend_from_slice(&other.gates);
    }

    /// Distinct in-range qubits on every gate.
    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            let q = g.qubits();
            if let Some(&bad) = q.iter().find(|&&x| x >= self.n_qubits) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    n: self.n_qubits,
                });
            }
            if q.len() == 2 && q[0] == q[1] {
                return Err(Error::Parse(format!("gate {g} repeats a qubit")));
            }
        }
        Ok(())
    }

    pub fn count(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(g)).count()
    }

    /// Applies every gate in order to a full register state.
    pub fn apply(&self, psi: &mut [Complex64]) {
        for g in &self.gates {
            apply_gate(self.n_qubits, g, psi);
        }
    }

    /// Dense unitary, row-major.
    pub fn unitary(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::TooLarge {
                n: self.n_qubits,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        self.validate()?;
        let dim = 1usize << self.n_qubits;
        let mut u = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut psi = vec![Complex64::new(0.0, 0.0); dim];
            psi[col] = Complex64::new(1.0, 0.0);
            self.apply(&mut psi);
            for (row, a) in psi.into_iter().enumerate() {
                u[(row, col)] = a;
            }
        }
        Ok(u)
    }
}

fn apply_gate(n: usize, gate: &Gate, psi: &mut [Complex64]) {
    let mask = |q: usize| Bitstring::mask_of(n, q) as usize;
    // 2×2 action on amplitude pairs (|…0…⟩, |…1…⟩) of one qubit.
    let single = |psi: &mut [Complex64], q: usize, m: [[Complex64; 2]; 2]| {
        let bit = mask(q);
        for x in 0..psi.len() {
            if x & bit == 0 {
                let (a0, a1) = (psi[x], psi[x | bit]);
                psi[x] = m[0][0] * a0 + m[0][1] * a1;
                psi[x | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    };
    match *gate {
        Gate::Cx { control, target } => {
            let (c, t) = (mask(control), mask(target));
            for x in 0..psi.len() {
                if x & c != 0 && x & t == 0 {
                    psi.swap(x, x | t);
                }
            }
        }
        Gate::Rx { qubit, angle } => {
            let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            let cc = Complex64::new(c, 0.0);
            let ms = Complex64::new(0.0, -s);
            single(psi, qubit, [[cc, ms], [ms, cc]]);
        }
        Gate::Rz { qubit, angle } => {
            let zero = Complex64::new(0.0, 0.0);
            single(
                psi,
                qubit,
                [
                    [Complex64::from_polar(1.0, -angle / 2.0), zero],
                    [zero, Complex64::from_polar(1.0, angle / 2.0)],
                ],
            );
        }
        Gate::H { qubit } => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            single(psi, qubit, [[h, h], [h, -h]]);
        }
    }
}

/// Circuit for `exp(−i(θ/2)·P)` where `P` is the Pauli string of `term`
/// (its coefficient is ignored): CNOT ladder controlled by the first support
/// qubit, `RX(θ)` on that qubit, mirrored ladder, with `RZ(∓π/2)` around the
/// block on every `Y` qubit.
pub fn emit_pauli_rotation(n_qubits: usize, term: &PauliTerm, theta: f64) -> Circuit {
    assert!(!term.qubits.is_empty(), "Pauli rotation needs a nonempty support");
    let mut c = Circuit::new(n_qubits);
    let ys: Vec<usize> = term
        .qubits
        .iter()
        .zip(&term.axes)
        .filter(|(_, &a)| a == PauliAxis::Y)
        .map(|(&q, _)| q)
        .collect();
    for &q in &ys {
        c.push(Gate::Rz {
            qubit: q,
            angle: -FRAC_PI_2,
        });
    }
    let control = term.qubits[0];
    let ladder: Vec<Gate> = term.qubits[1..]
        .iter()
        .map(|&t| Gate::Cx { control, target: t })
        .collect();
    ladder.iter().for_each(|&g| c.push(g));
    c.push(Gate::Rx {
        qubit: control,
        angle: theta,
    });
    ladder.iter().rev().for_each(|&g| c.push(g));
    for &q in &ys {
        c.push(Gate::Rz {
            qubit: q,
            angle: FRAC_PI_2,
        });
    }
    c
}

/// `exp(−iθM) = Π_α exp(−iθ c_α P_α)`, one rotation block per term with angle
/// `2θc_α`, terms in canonical decomposition order.
pub fn emit_merge_unitary(n_qubits: usize, op: &MergeOperator, theta: f64) -> Circuit {
    emit_terms(n_qubits, &op.pauli_decompose(), theta)
}

/// Rotation blocks for an explicit list of commuting terms.
pub fn emit_terms(n_qubits: usize, terms: &[PauliTerm], theta: f64) -> Circuit {
    let mut c = Circuit::new(n_qubits);
    for t in terms {
        c.extend(&emit_pauli_rotation(n_qubits, t, 2.0 * theta * t.coefficient));
    }
    c
}

/// `exp(−iθM)` on `n` qubits from a dense eigendecomposition of `M`.
pub fn dense_merge_exponential(n_qubits: usize, op: &MergeOperator, theta: f64) -> Result<DMatrix<Complex64>> {
    if n_qubits > DENSE_QUBIT_LIMIT {
        return Err(Error::TooLarge {
            n: n_qubits,
            limit: DENSE_QUBIT_LIMIT,
        });
    }
    if let Some(&q) = op.support().iter().find(|&&q| q >= n_qubits) {
        return Err(Error::IndexOutOfRange { index: q, n: n_qubits });
    }
    let dim = 1usize << n_qubits;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for x in 0..dim {
        if let Some(w) = op.partner(&Bitstring::from_index(x as u64, n_qubits)) {
            m[(w.index() as usize, x)] = 1.0;
        }
    }
    let eig = SymmetricEigen::new(m);
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -theta * l)));
    Ok(&v * phases * v.transpose())
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entrywise error between the compiled circuit and the dense
/// exponential.
pub fn verify_merge_circuit(n_qubits: usize, op: &MergeOperator, theta: f64) -> Result<f64> {
    let compiled = emit_merge_unitary(n_qubits, op, theta).unitary()?;
    Ok(max_abs_diff(&compiled, &dense_merge_exponential(n_qubits, op, theta)?))
}

/// Line-per-gate text with a one-line register header.
pub fn export_circuit(circuit: &Circuit, format: &str) -> Result<String> {
    match format {
        "qasm" | "qasm_like" | "qasm-like" => {
            let mut s = format!("qreg q[{}] {HEADER_NOTE}\n", circuit.n_qubits);
            for g in &circuit.gates {
                s.push_str(&g.to_string());
                s.push('\n');
            }
            Ok(s)
        }
        other => Err(Error::UnknownFormat(other.to_string())),
    }
}

fn parse_qubit(tok: &str) -> Result<usize> {
    tok.trim()
        .strip_prefix("q[")
        .and_then(|t| t.strip_suffix(']'))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad qubit reference {tok:?}")))
}

fn parse_angle(head: &str, name: &str) -> Result<f64> {
    head.strip_prefix(name)
        .and_then(|t| t.strip_prefix('('))
        .and_then(|t| t.strip_suffix(')'))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad angle in {head:?}")))
}

/// Inverse of [`export_circuit`].
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut lines = text
        .lines()
        .map(|l| l.split("//").next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing register header".into()))?;
    let n = header
        .strip_prefix("qreg q[")
        .and_then(|t| t.strip_suffix(']'))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad register header {header:?}")))?;
    let mut c = Circuit::new(n);
    for line in lines {
        let (head, args) = line
            .split_once(' ')
            .ok_or_else(|| Error::Parse(format!("bad gate line {line:?}")))?;
        let gate = match head {
            "cx" => {
                let (a, b) = args
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("cx needs two qubits: {line:?}")))?;
                Gate::Cx {
                    control: parse_qubit(a)?,
                    target: parse_qubit(b)?,
                }
            }
            "h" => Gate::H {
                qubit: parse_qubit(args)?,
            },
            h if h.starts_with("rx") => Gate::Rx {
                qubit: parse_qubit(args)?,
                angle: parse_angle(h, "rx")?,
            },
            h if h.starts_with("rz") => Gate::Rz {
                qubit: parse_qubit(args)?,
                angle: parse_angle(h, "rz")?,
            },
            other => return Err(Error::Parse(format!("unknown gate {other:?}"))),
        };
        c.push(gate);
    }
    c.validate()?;
    Ok(c)
}
