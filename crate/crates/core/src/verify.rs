//! Exhaustive checks of the three mixing-family conditions, interaction graphs,
//! constructive feasibility witnesses and mixer ground-state analysis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::mixers::{MergeOperator, MixingFamily};
use crate::problem::{FeasibleBasis, ProblemInstance};

/// Default limit on `N` for the full `2^N` feasibility-preservation scan.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 14;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` if the two were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn count(&self) -> usize {
        self.sets
    }

    /// Components as sorted member lists, ordered by smallest member.
    pub fn components(&mut self) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.parent.len() {
            let r = self.find(x);
            groups.entry(r).or_default().push(x);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|c| c[0]);
        out
    }
}

/// Graph on feasible basis states; an edge joins two states when some family
/// operator has a nonzero matrix element between them.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisInteractionGraph {
    basis: FeasibleBasis,
    /// `(u, v)` with `u < v` mapped to the generating operator positions.
    edges: BTreeMap<(usize, usize), Vec<usize>>,
}

impl BasisInteractionGraph {
    /// Built from each operator's transition pairs.
    pub fn build(basis: &FeasibleBasis, family: &MixingFamily) -> Self {
        let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (j, op) in family.operators().iter().enumerate() {
            for pair in op.transition_pairs(basis) {
                edges.entry(pair).or_default().push(j);
            }
        }
        BasisInteractionGraph {
            basis: basis.clone(),
            edges,
        }
    }

    /// Built by scanning every matrix element `⟨u|M_j|v⟩`. Quadratic in the
    /// basis size; used to cross-check [`BasisInteractionGraph::build`].
    pub fn from_matrix_elements(basis: &FeasibleBasis, family: &MixingFamily) -> Self {
        let mut edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let states = basis.states();
        for (j, op) in family.operators().iter().enumerate() {
            for u in 0..states.len() {
                for v in (u + 1)..states.len() {
                    if op.matrix_element(&states[u], &states[v]) != 0.0 {
                        edges.entry((u, v)).or_default().push(j);
                    }
                }
            }
        }
        BasisInteractionGraph {
            basis: basis.clone(),
            edges,
        }
    }

    pub fn basis(&self) -> &FeasibleBasis {
        &self.basis
    }

    pub fn vertex_count(&self) -> usize {
        self.basis.len()
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), Vec<usize>> {
        &self.edges
    }

    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges.keys().copied().collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for &(u, v) in self.edges.keys() {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn union_find(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.vertex_count());
        for &(u, v) in self.edges.keys() {
            uf.union(u, v);
        }
        uf
    }

    /// Empty and single-vertex graphs count as connected.
    pub fn is_connected(&self) -> bool {
        self.vertex_count() <= 1 || self.union_find().count() == 1
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph basis {\n");
        for z in self.basis.states() {
            let _ = writeln!(s, "  \"{z}\";");
        }
        for (&(u, v), ops) in &self.edges {
            let labels: Vec<String> = ops.iter().map(|j| j.to_string()).collect();
            let _ = writeln!(
                s,
                "  \"{}\" -- \"{}\" [label=\"{}\"];",
                self.basis.state(u),
                self.basis.state(v),
                labels.join(",")
            );
        }
        s.push_str("}\n");
        s
    }
}

/// One hyperedge `I ∪ {i*}` per family operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitInteractionGraph {
    pub n_qubits: usize,
    pub hyperedges: Vec<Vec<usize>>,
}

impl QubitInteractionGraph {
    pub fn build(n_qubits: usize, family: &MixingFamily) -> Self {
        QubitInteractionGraph {
            n_qubits,
            hyperedges: family.operators().iter().map(|op| op.support()).collect(),
        }
    }

    /// Hyperedges drawn as auxiliary nodes joined to their qubits.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph qubits {\n");
        for q in 0..self.n_qubits {
            let _ = writeln!(s, "  q{q};");
        }
        for (j, e) in self.hyperedges.iter().enumerate() {
            if e.len() == 2 {
                let _ = writeln!(s, "  q{} -- q{} [label=\"{j}\"];", e[0], e[1]);
            } else {
                let _ = writeln!(s, "  h{j} [shape=point];");
                for q in e {
                    let _ = writeln!(s, "  h{j} -- q{q};");
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leak {
    pub operator: MergeOperator,
    pub from: Bitstring,
    pub to: Bitstring,
    pub from_value: u64,
    pub to_value: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionA {
    pub passed: bool,
    pub counterexample: Option<Leak>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffendingEntry {
    pub operator: MergeOperator,
    pub row: Bitstring,
    pub col: Bitstring,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionB {
    pub passed: bool,
    pub offending: Option<OffendingEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionC {
    pub passed: bool,
    pub component_count: usize,
    /// Member states of each component, listed only when disconnected.
    pub components: Vec<Vec<Bitstring>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BConnectivity {
    pub b: u64,
    pub dimension: usize,
    pub connected: bool,
    pub components: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub b: u64,
    pub family: String,
    pub operators: usize,
    pub dimension: usize,
    pub exhaustive: bool,
    pub condition_a: ConditionA,
    pub condition_b: ConditionB,
    pub condition_c: ConditionC,
    pub per_b: Vec<BConnectivity>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.condition_a.passed && self.condition_b.passed && self.condition_c.passed
    }

    pub fn summary(&self) -> String {
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        let mut s = format!(
            "family {} ({} operators), N={}, b={}, |S|={}\n",
            self.family, self.operators, self.n, self.b, self.dimension
        );
        let _ = writeln!(s, "  (a) feasibility preservation: {}", mark(self.condition_a.passed));
        if let Some(l) = &self.condition_a.counterexample {
            let _ = writeln!(
                s,
                "      {} maps {} (value {}) to {} (value {})",
                l.operator, l.from, l.from_value, l.to, l.to_value
            );
        }
        let _ = writeln!(s, "  (b) nonpositivity:            {}", mark(self.condition_b.passed));
        if let Some(o) = &self.condition_b.offending {
            let _ = writeln!(s, "      {} entry <{}|.|{}> = {}", o.operator, o.row, o.col, o.value);
        }
        let _ = writeln!(
            s,
            "  (c) connectivity:             {} ({} component(s))",
            mark(self.condition_c.passed),
            self.condition_c.component_count
        );
        for (i, comp) in self.condition_c.components.iter().enumerate() {
            let names: Vec<String> = comp.iter().map(|z| z.to_string()).collect();
            let _ = writeln!(s, "      component {i}: {{{}}}", names.join(", "));
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub exhaustive_limit: usize,
    /// Check feasibility preservation only from states of `S^(b)`.
    pub subspace_only: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            subspace_only: false,
        }
    }
}

pub fn verify_family(instance: &ProblemInstance, family: &MixingFamily) -> Result<VerificationReport> {
    verify_family_with(instance, family, VerifyOptions::default())
}

pub fn verify_family_with(
    instance: &ProblemInstance,
    family: &MixingFamily,
    options: VerifyOptions,
) -> Result<VerificationReport> {
    let n = instance.n();
    if !options.subspace_only && n > options.exhaustive_limit {
        return Err(Error::TooLargeForExhaustive {
            n,
            limit: options.exhaustive_limit,
        });
    }
    if let Some(op) = family
        .operators()
        .iter()
        .find(|op| op.support().iter().any(|&i| i >= n))
    {
        return Err(Error::IndexOutOfRange {
            index: *op.support().iter().max().unwrap(),
            n,
        });
    }
    let basis = instance.enumerate_feasible();
    let condition_a = if options.subspace_only {
        check_preservation_subspace(instance, family, &basis)
    } else {
        check_preservation_full(instance, family)
    };
    let condition_b = check_nonpositivity(family, &basis);
    let graph = BasisInteractionGraph::build(&basis, family);
    let condition_c = {
        let mut uf = graph.union_find();
        let count = if basis.is_empty() { 0 } else { uf.count() };
        let passed = count <= 1;
        let components = if passed {
            Vec::new()
        } else {
            uf.components()
                .into_iter()
                .map(|c| c.into_iter().map(|u| basis.state(u)).collect())
                .collect()
        };
        ConditionC {
            passed,
            component_count: count,
            components,
        }
    };
    Ok(VerificationReport {
        n,
        b: instance.target(),
        family: family.provenance().to_string(),
        operators: family.len(),
        dimension: basis.len(),
        exhaustive: !options.subspace_only,
        condition_a,
        condition_b,
        condition_c,
        per_b: connectivity_scan(instance, family),
    })
}

/// Any operator that changes the constraint value anywhere in `2^N` fails,
/// which also catches leakage between two different `b` subspaces.
fn check_preservation_full(instance: &ProblemInstance, family: &MixingFamily) -> ConditionA {
    let n = instance.n();
    let values: Vec<u64> = (0..1u64 << n)
        .map(|x| instance.constraint_value(&Bitstring::from_index(x, n)))
        .collect();
    for op in family.operators() {
        for x in 0..1u64 << n {
            let z = Bitstring::from_index(x, n);
            if let Some(w) = op.partner(&z) {
                let (vz, vw) = (values[x as usize], values[w.index() as usize]);
                if vz != vw {
                    return ConditionA {
                        passed: false,
                        counterexample: Some(Leak {
                            operator: op.clone(),
                            from: z,
                            to: w,
                            from_value: vz,
                            to_value: vw,
                        }),
                    };
                }
            }
        }
    }
    ConditionA {
        passed: true,
        counterexample: None,
    }
}

fn check_preservation_subspace(instance: &ProblemInstance, family: &MixingFamily, basis: &FeasibleBasis) -> ConditionA {
    for op in family.operators() {
        for z in basis.states() {
            if let Some(w) = op.partner(z) {
                if basis.index_of(&w).is_none() {
                    return ConditionA {
                        passed: false,
                        counterexample: Some(Leak {
                            operator: op.clone(),
                            from: *z,
                            to: w,
                            from_value: instance.constraint_value(z),
                            to_value: instance.constraint_value(&w),
                        }),
                    };
                }
            }
        }
    }
    ConditionA {
        passed: true,
        counterexample: None,
    }
}

/// Every entry of every `−M_j` restricted to `S` must be `<= 0`.
fn check_nonpositivity(family: &MixingFamily, basis: &FeasibleBasis) -> ConditionB {
    let states = basis.states();
    for op in family.operators() {
        for row in states {
            for col in states {
                let value = -op.matrix_element(row, col);
                if value > 0.0 {
                    return ConditionB {
                        passed: false,
                        offending: Some(OffendingEntry {
                            operator: op.clone(),
                            row: *row,
                            col: *col,
                            value,
                        }),
                    };
                }
            }
        }
    }
    ConditionB {
        passed: true,
        offending: None,
    }
}

/// Connectivity of the basis interaction graph for every `b` in `0..=Σ s_i`.
pub fn connectivity_scan(instance: &ProblemInstance, family: &MixingFamily) -> Vec<BConnectivity> {
    (0..=instance.coefficient_sum())
        .into_par_iter()
        .map(|b| {
            let basis = instance.with_target(b).enumerate_feasible();
            let graph = BasisInteractionGraph::build(&basis, family);
            let components = if basis.is_empty() {
                0
            } else {
                graph.union_find().count()
            };
            BConnectivity {
                b,
                dimension: basis.len(),
                connected: components <= 1,
                components,
            }
        })
        .collect()
}

fn set_kappa(instance: &ProblemInstance, z: &mut Bitstring, kappa: u32, l: u32, value: bool) {
    let i = instance.at(kappa, l);
    debug_assert_ne!(z.get(i), value, "witness step must toggle [{kappa},{l}]");
    z.set(i, value);
}

/// Smallest `κ` (then smallest `l`) with a zero bit.
fn smallest_zero(instance: &ProblemInstance, z: &Bitstring) -> Option<(u32, u32)> {
    (1..=instance.k()).find_map(|kappa| {
        (1..=instance.occurrences(kappa) as u32)
            .find(|&l| !z.get(instance.at(kappa, l)))
            .map(|l| (kappa, l))
    })
}

/// Feasible bitstring for right-hand side `b` with `z_[κ*,l*] = 1`, built by
/// induction on `b` from the single-bit string at `b = κ*`.
pub fn witness_with_bit(instance: &ProblemInstance, kappa_star: u32, l_star: u32, b: u64) -> Result<Bitstring> {
    if instance
        .flat_index(crate::problem::KappaIndex::new(kappa_star, l_star))
        .is_none()
    {
        return Err(Error::OutOfRange(format!("no variable [{kappa_star},{l_star}]")));
    }
    if b < kappa_star as u64 || b > instance.coefficient_sum() {
        return Err(Error::OutOfRange(format!(
            "b = {b} outside [{kappa_star}, {}]",
            instance.coefficient_sum()
        )));
    }
    let mut z = Bitstring::zeros(instance.n());
    set_kappa(instance, &mut z, kappa_star, l_star, true);
    for _ in kappa_star as u64..b {
        let (kp, lp) = smallest_zero(instance, &z).expect("sum below total leaves a zero bit");
        if kp == 1 {
            set_kappa(instance, &mut z, 1, lp, true);
        } else if kp == kappa_star + 1 {
            if kappa_star > 1 {
                set_kappa(instance, &mut z, kappa_star - 1, 1, false);
            }
            // Free a unit variable other than the protected one.
            let unit = if kappa_star == 1 && l_star == 2 { 1 } else { 2 };
            set_kappa(instance, &mut z, 1, unit, false);
            set_kappa(instance, &mut z, kp, lp, true);
        } else {
            set_kappa(instance, &mut z, kp - 1, 1, false);
            set_kappa(instance, &mut z, kp, lp, true);
        }
        debug_assert!(z.get(instance.at(kappa_star, l_star)));
    }
    debug_assert_eq!(instance.constraint_value(&z), b);
    Ok(z)
}

/// Feasible bitstring for right-hand side `b` with `z_[1,1] = z_[k,1] = 1`
/// (`z_[1,2]` in place of `z_[k,1]` when `k = 1`), built by induction from
/// `b = k + 1`.
pub fn witness_merge_pair(instance: &ProblemInstance, b: u64) -> Result<Bitstring> {
    let k = instance.k();
    let total = instance.coefficient_sum();
    if b < k as u64 + 1 || b > total {
        return Err(Error::OutOfRange(format!("b = {b} outside [{}, {total}]", k + 1)));
    }
    let partner = if k >= 2 { (k, 1) } else { (1, 2) };
    let mut z = Bitstring::zeros(instance.n());
    set_kappa(instance, &mut z, 1, 1, true);
    set_kappa(instance, &mut z, partner.0, partner.1, true);
    for _ in (k as u64 + 1)..b {
        let (kp, lp) = smallest_zero(instance, &z).expect("sum below total leaves a zero bit");
        match kp {
            1 => set_kappa(instance, &mut z, 1, lp, true),
            2 => {
                set_kappa(instance, &mut z, 1, 2, false);
                set_kappa(instance, &mut z, 2, lp, true);
            }
            _ => {
                set_kappa(instance, &mut z, kp - 1, 1, false);
                set_kappa(instance, &mut z, kp, lp, true);
            }
        }
    }
    debug_assert_eq!(instance.constraint_value(&z), b);
    Ok(z)
}

/// Mixer whose ground state is analysed.
#[derive(Debug, Clone)]
pub enum MixerSpec<'a> {
    Family {
        instance: &'a ProblemInstance,
        family: &'a MixingFamily,
    },
    /// `−Σ X_i` on the unconstrained `n`-qubit space.
    TransverseField { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixerGroundState {
    pub dimension: usize,
    pub regular: bool,
    /// degree → number of vertices
    pub degree_histogram: BTreeMap<usize, usize>,
    pub ground_energy: f64,
    /// Lowest eigenvector, sign fixed so the entries are nonnegative.
    pub ground_state: Vec<f64>,
    pub uniform: bool,
}

pub fn analyze_mixer_ground_state(spec: MixerSpec<'_>) -> Result<MixerGroundState> {
    let (dim, edges): (usize, Vec<(usize, usize)>) = match spec {
        MixerSpec::Family { instance, family } => {
            let basis = instance.enumerate_feasible();
            let g = BasisInteractionGraph::build(&basis, family);
            (basis.len(), g.edges().keys().copied().collect())
        }
        MixerSpec::TransverseField { n } => {
            if n > 12 {
                return Err(Error::TooLarge { n, limit: 12 });
            }
            let dim = 1usize << n;
            let edges = (0..dim)
                .flat_map(|x| (0..n).map(move |q| (x, x ^ (1 << q))))
                .filter(|&(u, v)| u < v)
                .collect();
            (dim, edges)
        }
    };
    if dim == 0 {
        return Err(Error::EmptyFeasibleSet);
    }
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut degree = vec![0usize; dim];
    for &(u, v) in &edges {
        h[(u, v)] -= 1.0;
        h[(v, u)] -= 1.0;
        degree[u] += 1;
        degree[v] += 1;
    }
    let mut degree_histogram = BTreeMap::new();
    for &d in &degree {
        *degree_histogram.entry(d).or_insert(0) += 1;
    }
    let regular = degree_histogram.len() == 1;

    let eig = SymmetricEigen::new(h);
    let (imin, &e0) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let mut ground: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
    let sum: f64 = ground.iter().sum();
    if sum < 0.0 {
        ground.iter_mut().for_each(|x| *x = -*x);
    }
    let (lo, hi) = ground.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    Ok(MixerGroundState {
        dimension: dim,
        regular,
        degree_histogram,
        ground_energy: e0,
        ground_state: ground,
        uniform: hi - lo < 1e-9,
    })
}
