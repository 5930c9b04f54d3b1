//! GHZ, Bernstein–Vazirani and Deutsch–Jozsa circuits as sequences of gate
//! matrices, state-vector evolution with size/time metrics, and measurement.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TiddError};
use crate::linalg::{matrix_level, MatrixTidd, VectorTidd};
use crate::manager::Manager;
use crate::ops::BinaryOp;
use crate::tidd::{SizeReport, Tidd};
use crate::value::Value;

pub const CSV_HEADER: &str = "algo,qubits,seed,gates,final_nodes,final_edges,final_total,max_intermediate,wall_seconds";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateKind {
    H,
    X,
    Z,
    I,
    /// Targets `[control, target]`.
    Cnot,
    /// Targets `[a, b]`.
    Cz,
    /// Diagonal `±1` oracle; `signs[x]` is true where basis state `x` is negated.
    Phase(Arc<[bool]>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub qubits: usize,
}

impl GateSpec {
    pub fn new(kind: GateKind, targets: Vec<usize>, qubits: usize) -> Self {
        GateSpec { kind, targets, qubits }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(TiddError::GateSpecError(msg));
        if self.qubits == 0 || !self.qubits.is_power_of_two() {
            return err(format!("{} qubits is not a power of two", self.qubits));
        }
        if let Some(&t) = self.targets.iter().find(|&&t| t >= self.qubits) {
            return err(format!("qubit {t} out of range for {} qubits", self.qubits));
        }
        let arity = match self.kind {
            GateKind::H | GateKind::X | GateKind::Z => Some(1),
            GateKind::Cnot | GateKind::Cz => Some(2),
            GateKind::I | GateKind::Phase(_) => None,
        };
        if let Some(k) = arity {
            if self.targets.len() != k {
                return err(format!("{:?} takes {k} targets, got {}", self.kind, self.targets.len()));
            }
        }
        if has_repeats(&self.targets) {
            return err(format!("repeated target in {:?}", self.targets));
        }
        if let GateKind::Phase(signs) = &self.kind {
            if self.qubits >= usize::BITS as usize || signs.len() != 1usize << self.qubits {
                return err(format!("phase oracle has {} signs for {} qubits", signs.len(), self.qubits));
            }
        }
        Ok(())
    }
}

fn has_repeats(targets: &[usize]) -> bool {
    targets.iter().enumerate().any(|(i, t)| targets[..i].contains(t))
}

/// 2×2 gate entries `[m00, m01, m10, m11]`.
fn gate_entries(kind: &GateKind) -> [Value; 4] {
    let (z, o) = (Value::zero(), Value::one());
    match kind {
        GateKind::H => {
            let h = Value::inv_sqrt2();
            [h.clone(), h.clone(), h.clone(), -h]
        }
        GateKind::X => [z.clone(), o.clone(), o, z],
        GateKind::Z => [o, z.clone(), z, Value::from_int(-1)],
        _ => [o.clone(), z.clone(), z, o],
    }
}

fn projector(bit: bool) -> [Value; 4] {
    let (z, o) = (Value::zero(), Value::one());
    if bit {
        [z.clone(), z.clone(), z, o]
    } else {
        [o, z.clone(), z.clone(), z]
    }
}

impl Manager {
    /// Tensor product of single-qubit factors over `qubits` qubits, identity
    /// on every qubit not listed.
    pub fn product_operator(&mut self, qubits: usize, factors: &[(usize, [Value; 4])]) -> Result<MatrixTidd> {
        matrix_level(qubits)?;
        Ok(self.product_rec(0, qubits, factors))
    }

    fn product_rec(&mut self, lo: usize, len: usize, factors: &[(usize, [Value; 4])]) -> MatrixTidd {
        let inside: Vec<&(usize, [Value; 4])> = factors.iter().filter(|(q, _)| (lo..lo + len).contains(q)).collect();
        if inside.is_empty() {
            return self.identity_matrix(len).expect("power of two");
        }
        if len == 1 {
            return self.matrix_2x2(inside[0].1.clone());
        }
        let half = len / 2;
        let l = self.product_rec(lo, half, factors);
        let r = self.product_rec(lo + half, half, factors);
        self.matrix_kron(&l, &r).expect("halves have equal size")
    }

    pub fn gate_matrix(&mut self, g: &GateSpec) -> Result<MatrixTidd> {
        g.validate()?;
        let n = g.qubits;
        match &g.kind {
            GateKind::I => self.identity_matrix(n),
            GateKind::H | GateKind::X | GateKind::Z => self.product_operator(n, &[(g.targets[0], gate_entries(&g.kind))]),
            GateKind::Cnot | GateKind::Cz => {
                let (c, t) = (g.targets[0], g.targets[1]);
                let inner = if g.kind == GateKind::Cnot { GateKind::X } else { GateKind::Z };
                let off = self.product_operator(n, &[(c, projector(false))])?;
                let on = self.product_operator(n, &[(c, projector(true)), (t, gate_entries(&inner))])?;
                let t = self.apply(&BinaryOp::PLUS, &off.t, &on.t)?;
                Ok(MatrixTidd { t, qubits: n })
            }
            GateKind::Phase(signs) => {
                let amps: Vec<Value> = signs.iter().map(|&s| Value::from_int(if s { -1 } else { 1 })).collect();
                let v = self.vector_from_amplitudes(&amps)?;
                let id = self.identity_matrix(n)?;
                let t = self.apply(&BinaryOp::TIMES, &id.t, v.tidd())?;
                Ok(MatrixTidd { t, qubits: n })
            }
        }
    }
}

/// Smallest power of two holding `n` qubits; the extra qubits stay idle.
pub fn padded_qubits(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

fn h_layer(n: usize, total: usize) -> impl Iterator<Item = GateSpec> {
    (0..n).map(move |q| GateSpec::new(GateKind::H, vec![q], total))
}

pub fn ghz_circuit(n: usize) -> Vec<GateSpec> {
    let total = padded_qubits(n);
    let mut gates = vec![GateSpec::new(GateKind::H, vec![0], total)];
    gates.extend((1..n).map(|i| GateSpec::new(GateKind::Cnot, vec![0, i], total)));
    gates
}

/// Phase-oracle Bernstein–Vazirani: the oracle `(-1)^{s·x}` is the product of
/// `Z` on every qubit with `s_j = 1`.
pub fn bv_circuit(n: usize, s: &[bool]) -> Result<Vec<GateSpec>> {
    if s.len() != n {
        return Err(TiddError::GateSpecError(format!("secret has {} bits for {n} qubits", s.len())));
    }
    let total = padded_qubits(n);
    let mut gates: Vec<GateSpec> = h_layer(n, total).collect();
    gates.extend((0..n).filter(|&j| s[j]).map(|j| GateSpec::new(GateKind::Z, vec![j], total)));
    gates.extend(h_layer(n, total));
    Ok(gates)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DjMode {
    Constant,
    Balanced,
}

/// Largest qubit count for which a Deutsch–Jozsa oracle is tabulated.
pub const DJ_MAX_QUBITS: usize = 20;

/// Seeded sign pattern of the Deutsch–Jozsa oracle over `n` qubits (`total`
/// with padding). Balanced: `x_d ⊕ r(x without d)` for a seeded qubit `d`
/// and seeded random `r`, which negates exactly half of the inputs.
/// Constant: one seeded sign everywhere.
pub fn dj_signs(n: usize, total: usize, mode: DjMode, seed: u64) -> Result<Vec<bool>> {
    if total > DJ_MAX_QUBITS {
        return Err(TiddError::OracleScaleLimit {
            vars: total,
            limit: DJ_MAX_QUBITS,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << total;
    let shift = total - n;
    Ok(match mode {
        DjMode::Constant => vec![rng.gen(); dim],
        DjMode::Balanced => {
            let d = rng.gen_range(0..n);
            let r: Vec<bool> = (0..1usize << (n - 1)).map(|_| rng.gen()).collect();
            (0..dim)
                .map(|x| {
                    let logical = x >> shift;
                    let bit = n - 1 - d;
                    let xd = (logical >> bit) & 1 == 1;
                    let rest = ((logical >> (bit + 1)) << bit) | (logical & ((1 << bit) - 1));
                    xd ^ r[rest]
                })
                .collect()
        }
    })
}

pub fn dj_circuit(n: usize, mode: DjMode, seed: u64) -> Result<Vec<GateSpec>> {
    let total = padded_qubits(n);
    let signs = dj_signs(n, total, mode, seed)?;
    let mut gates: Vec<GateSpec> = h_layer(n, total).collect();
    gates.push(GateSpec::new(GateKind::Phase(signs.into()), vec![], total));
    gates.extend(h_layer(n, total));
    Ok(gates)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunMetrics {
    pub final_size: SizeReport,
    pub max_intermediate_size: usize,
    pub wall_time: f64,
    pub gate_count: usize,
}

impl RunMetrics {
    pub fn csv_row(&self, algo: &str, qubits: usize, seed: u64) -> String {
        format!(
            "{algo},{qubits},{seed},{},{},{},{},{},{:.6}",
            self.gate_count,
            self.final_size.nodes,
            self.final_size.edges,
            self.final_size.total,
            self.max_intermediate_size,
            self.wall_time
        )
    }
}

impl Manager {
    pub fn run_circuit(&mut self, gates: &[GateSpec], initial: &VectorTidd) -> Result<(VectorTidd, RunMetrics)> {
        self.run_circuit_observed(gates, initial, &mut |_, _| {})
    }

    /// [`Manager::run_circuit`], calling `observe` on every gate matrix and
    /// state produced.
    pub fn run_circuit_observed(
        &mut self,
        gates: &[GateSpec],
        initial: &VectorTidd,
        observe: &mut dyn FnMut(&mut Manager, &Tidd),
    ) -> Result<(VectorTidd, RunMetrics)> {
        let start = Instant::now();
        let mut state = initial.clone();
        let mut max = self.size_metrics(state.tidd()).total;
        for g in gates {
            if g.qubits != state.qubits() {
                return Err(TiddError::ShapeMismatch(format!(
                    "{}-qubit gate on {}-qubit state",
                    g.qubits,
                    state.qubits()
                )));
            }
            let u = self.gate_matrix(g)?;
            observe(self, &u.t);
            max = max.max(self.size_metrics(&u.t).total);
            state = self.matvec(&u, &state)?;
            observe(self, state.tidd());
            max = max.max(self.size_metrics(state.tidd()).total);
        }
        let metrics = RunMetrics {
            final_size: self.size_metrics(state.tidd()),
            max_intermediate_size: max,
            wall_time: start.elapsed().as_secs_f64(),
            gate_count: gates.len(),
        };
        Ok((state, metrics))
    }

    /// `Σ_x |ψ(x)|²`, exact.
    pub fn state_norm_sqr(&mut self, state: &VectorTidd) -> Value {
        let sq = self
            .apply(&BinaryOp::TIMES, state.tidd(), state.tidd())
            .expect("same level");
        // Each row is replicated over 2^n columns.
        self.weighted_sum(&sq) * Value::pow2_inv(state.qubits() as u32)
    }

    /// Histogram of `shots` measurements in the computational basis; keys are
    /// bit strings, qubit 0 first.
    pub fn measure_distribution<R: Rng + ?Sized>(
        &mut self,
        state: &VectorTidd,
        shots: usize,
        rng: &mut R,
    ) -> Result<BTreeMap<String, usize>> {
        if shots == 0 {
            return Err(TiddError::InvalidParameter("shots must be at least 1".into()));
        }
        let sq = self.apply(&BinaryOp::TIMES, state.tidd(), state.tidd())?;
        let sampler = self.sampler(&sq)?;
        let mut hist = BTreeMap::new();
        for _ in 0..shots {
            let a = sampler.sample(rng);
            let key: String = a.iter().step_by(2).map(|&b| if b { '1' } else { '0' }).collect();
            *hist.entry(key).or_insert(0) += 1;
        }
        Ok(hist)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Ghz,
    Bv,
    Dj,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Ghz => "ghz",
            Algo::Bv => "bv",
            Algo::Dj => "dj",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Seeded Bernstein–Vazirani secret.
pub fn bv_secret(n: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen()).collect()
}

/// Builds the benchmark circuit for `algo` (BV secret and balanced DJ oracle
/// drawn from `seed`).
pub fn benchmark_circuit(algo: Algo, n: usize, seed: u64) -> Result<Vec<GateSpec>> {
    if n == 0 {
        return Err(TiddError::InvalidParameter("at least one qubit is required".into()));
    }
    match algo {
        Algo::Ghz => Ok(ghz_circuit(n)),
        Algo::Bv => bv_circuit(n, &bv_secret(n, seed)),
        Algo::Dj => dj_circuit(n, DjMode::Balanced, seed),
    }
}

impl Manager {
    /// Runs `algo` on `n` qubits from `|0…0⟩`.
    pub fn run_benchmark(&mut self, algo: Algo, n: usize, seed: u64) -> Result<(VectorTidd, RunMetrics)> {
        let gates = benchmark_circuit(algo, n, seed)?;
        let total = padded_qubits(n);
        let init = self.vector_from_basis_state(total, &vec![false; total])?;
        self.run_circuit(&gates, &init)
    }
}
