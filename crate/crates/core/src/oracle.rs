//! Brute-force reference semantics: dense truth tables, dense linear algebra,
//! dense state-vector simulation and Myhill–Nerode class counting over
//! explicit strings. Nothing here looks at layer tables except through
//! [`Manager::evaluate`].

use std::collections::HashMap;

use crate::error::{Result, TiddError};
use crate::manager::Manager;
use crate::ops::BinaryOp;
use crate::tidd::Tidd;
use crate::value::Value;

/// Largest variable count the oracle will tabulate.
pub const ORACLE_MAX_VARS: usize = 20;

/// Explicit outputs over all `2^{2^level}` assignments, indexed by the
/// assignment read as a big-endian integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseFunction {
    level: u32,
    outputs: Vec<Value>,
}

fn guard(level: u32, limit: usize) -> Result<usize> {
    let vars = 1usize.checked_shl(level).unwrap_or(usize::MAX);
    let limit = limit.min(ORACLE_MAX_VARS);
    if vars > limit {
        return Err(TiddError::OracleScaleLimit { vars, limit });
    }
    Ok(vars)
}

/// Bits of `index` as an assignment of length `n`, most significant first.
pub fn bits_of(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|j| (index >> (n - 1 - j)) & 1 == 1).collect()
}

impl DenseFunction {
    pub fn new(level: u32, outputs: Vec<Value>) -> Result<Self> {
        let vars = guard(level, ORACLE_MAX_VARS)?;
        if outputs.len() != 1usize << vars {
            return Err(TiddError::TruthTableLengthMismatch {
                expected: 1usize << vars,
                got: outputs.len(),
            });
        }
        Ok(DenseFunction { level, outputs })
    }

    pub fn from_fn(level: u32, f: impl Fn(&[bool]) -> Value) -> Result<Self> {
        let vars = guard(level, ORACLE_MAX_VARS)?;
        let outputs = (0..1usize << vars).map(|i| f(&bits_of(i, vars))).collect();
        Ok(DenseFunction { level, outputs })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn num_vars(&self) -> usize {
        1usize << self.level
    }

    pub fn outputs(&self) -> &[Value] {
        &self.outputs
    }

    pub fn get(&self, index: usize) -> &Value {
        &self.outputs[index]
    }
}

pub fn dense_from_tidd(m: &Manager, f: &Tidd) -> Result<DenseFunction> {
    dense_from_tidd_limited(m, f, ORACLE_MAX_VARS)
}

pub fn dense_from_tidd_limited(m: &Manager, f: &Tidd, limit: usize) -> Result<DenseFunction> {
    let vars = guard(f.level(), limit)?;
    let outputs = (0..1usize << vars)
        .map(|i| m.evaluate(f, &bits_of(i, vars)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DenseFunction {
        level: f.level(),
        outputs,
    })
}

pub fn dense_apply(op: &BinaryOp, a: &DenseFunction, b: &DenseFunction) -> Result<DenseFunction> {
    if a.level != b.level {
        return Err(TiddError::ShapeMismatch(format!(
            "dense operands at levels {} and {}",
            a.level, b.level
        )));
    }
    let outputs = a
        .outputs
        .iter()
        .zip(&b.outputs)
        .map(|(x, y)| op.eval(x, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(DenseFunction {
        level: a.level,
        outputs,
    })
}

/// Index of matrix entry `(row, col)` under the interleaved ordering.
pub fn interleaved_index(qubits: usize, row: usize, col: usize) -> usize {
    (0..qubits).fold(0, |acc, j| {
        let shift = qubits - 1 - j;
        (acc << 2) | (((row >> shift) & 1) << 1) | ((col >> shift) & 1)
    })
}

fn qubits_of(d: &DenseFunction) -> Result<usize> {
    if d.level == 0 {
        return Err(TiddError::ShapeMismatch("a level-0 function is not a matrix".into()));
    }
    Ok(d.num_vars() / 2)
}

/// Row-major `2^n × 2^n` entries of a matrix function.
pub fn dense_matrix(d: &DenseFunction) -> Result<Vec<Vec<Value>>> {
    let n = qubits_of(d)?;
    let dim = 1usize << n;
    Ok((0..dim)
        .map(|r| (0..dim).map(|c| d.outputs[interleaved_index(n, r, c)].clone()).collect())
        .collect())
}

pub fn dense_from_matrix(rows: &[Vec<Value>]) -> Result<DenseFunction> {
    let dim = rows.len();
    if dim < 2 || !dim.is_power_of_two() || rows.iter().any(|r| r.len() != dim) {
        return Err(TiddError::ShapeMismatch(format!("{dim}-row matrix is not square of power-of-two size")));
    }
    let n = dim.trailing_zeros() as usize;
    if !(2 * n).is_power_of_two() {
        return Err(TiddError::ShapeMismatch(format!("{n} qubits is not a power of two")));
    }
    let level = (2 * n).trailing_zeros();
    let vars = guard(level, ORACLE_MAX_VARS)?;
    let mut outputs = vec![Value::zero(); 1usize << vars];
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            outputs[interleaved_index(n, r, c)] = v.clone();
        }
    }
    Ok(DenseFunction { level, outputs })
}

pub fn dense_matmul(a: &DenseFunction, b: &DenseFunction) -> Result<DenseFunction> {
    if a.level != b.level {
        return Err(TiddError::ShapeMismatch(format!(
            "dense matrices at levels {} and {}",
            a.level, b.level
        )));
    }
    let (ma, mb) = (dense_matrix(a)?, dense_matrix(b)?);
    let dim = ma.len();
    let prod: Vec<Vec<Value>> = (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| (0..dim).fold(Value::zero(), |acc, k| acc + &ma[r][k] * &mb[k][c]))
                .collect()
        })
        .collect();
    dense_from_matrix(&prod)
}

/// `out[i_a · 2^N + i_b] = a[i_a] · b[i_b]` with `N` the variable count of `b`.
pub fn dense_kron(a: &DenseFunction, b: &DenseFunction) -> Result<DenseFunction> {
    if a.level != b.level {
        return Err(TiddError::ShapeMismatch(format!(
            "dense operands at levels {} and {}",
            a.level, b.level
        )));
    }
    guard(a.level + 1, ORACLE_MAX_VARS)?;
    let mut outputs = Vec::with_capacity(a.outputs.len() * b.outputs.len());
    for x in &a.outputs {
        for y in &b.outputs {
            outputs.push(x * y);
        }
    }
    Ok(DenseFunction {
        level: a.level + 1,
        outputs,
    })
}

pub fn exhaustive_equiv(m: &Manager, f: &Tidd, d: &DenseFunction) -> Result<bool> {
    if f.level() != d.level {
        return Err(TiddError::ShapeMismatch(format!(
            "diagram at level {} vs table at level {}",
            f.level(),
            d.level
        )));
    }
    let vars = guard(f.level(), ORACLE_MAX_VARS)?;
    for (i, want) in d.outputs.iter().enumerate() {
        if &m.evaluate(f, &bits_of(i, vars))? != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Class ids of every length-`2^i` string, for each level `i` from the top
/// down. Level `level` is seeded by output values; level `i` strings `u`,
/// `u'` share a class iff `[u‖v] ≡ [u'‖v]` and `[v‖u] ≡ [v‖u']` at level
/// `i + 1` for every `v`.
fn string_classes(d: &DenseFunction) -> Vec<Vec<u32>> {
    let mut per_level: Vec<Vec<u32>> = Vec::new();
    let mut ids: HashMap<&Value, u32> = HashMap::new();
    let top: Vec<u32> = d
        .outputs
        .iter()
        .map(|v| {
            let n = ids.len() as u32;
            *ids.entry(v).or_insert(n)
        })
        .collect();
    per_level.push(top);
    for i in (0..d.level).rev() {
        let len = 1usize << i;
        let count = 1usize << len;
        let upper = per_level.last().expect("seeded");
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let classes: Vec<u32> = (0..count)
            .map(|u| {
                let mut sig = Vec::with_capacity(2 * count);
                sig.extend((0..count).map(|v| upper[(u << len) | v]));
                sig.extend((0..count).map(|v| upper[(v << len) | u]));
                let n = ids.len() as u32;
                *ids.entry(sig).or_insert(n)
            })
            .collect();
        per_level.push(classes);
    }
    per_level.reverse();
    per_level
}

/// Number of Myhill–Nerode classes of length-`2^i` strings.
pub fn class_count_at_level(d: &DenseFunction, i: u32) -> Result<usize> {
    Ok(class_counts(d)?[i as usize])
}

/// Class counts for every level `0..=level`.
pub fn class_counts(d: &DenseFunction) -> Result<Vec<usize>> {
    Ok(string_classes(d)
        .iter()
        .map(|c| c.iter().copied().max().map_or(0, |m| m as usize + 1))
        .collect())
}

/// Class count of length-`n` row strings for a function that is a
/// conjunction over `n` row blocks, `∧_i pred(i, row_i)`. A row string `u`
/// is identified by which block predicates it satisfies; this holds as long
/// as every predicate is satisfiable, which is checked.
///
/// Lets the anti-diagonal class count be checked at sizes where the dense
/// table is out of reach.
pub fn conjunctive_row_class_count(n: usize, pred: impl Fn(usize, &[bool]) -> bool) -> Result<usize> {
    if n > 24 {
        return Err(TiddError::OracleScaleLimit { vars: n, limit: 24 });
    }
    let rows: Vec<Vec<bool>> = (0..1usize << n).map(|u| bits_of(u, n)).collect();
    for i in 0..n {
        if !rows.iter().any(|r| pred(i, r)) {
            return Ok(1);
        }
    }
    let mut sigs: HashMap<Vec<bool>, ()> = HashMap::new();
    for r in &rows {
        sigs.insert((0..n).map(|i| pred(i, r)).collect(), ());
    }
    Ok(sigs.len())
}

/// Exact normalized distribution `Pr[a] ∝ f(a)` as floats.
pub fn dense_distribution(d: &DenseFunction) -> Result<Vec<f64>> {
    if let Some(v) = d.outputs.iter().find(|v| v.is_negative()) {
        return Err(TiddError::NegativeWeight(v.to_string()));
    }
    let w: Vec<f64> = d.outputs.iter().map(Value::to_f64).collect();
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(TiddError::ZeroDistribution);
    }
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// Exact dense state vector over `n` qubits, index big-endian (qubit 0 most
/// significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseState {
    pub qubits: usize,
    pub amps: Vec<Value>,
}

impl DenseState {
    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = vec![Value::zero(); 1usize << qubits];
        amps[index] = Value::one();
        DenseState { qubits, amps }
    }

    fn bit(&self, q: usize) -> usize {
        self.qubits - 1 - q
    }

    pub fn h(&mut self, q: usize) {
        let s = Value::inv_sqrt2();
        let mask = 1usize << self.bit(q);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (a, b) = (self.amps[i].clone(), self.amps[i | mask].clone());
                self.amps[i] = &s * &(&a + &b);
                self.amps[i | mask] = &s * &(a - b);
            }
        }
    }

    pub fn x(&mut self, q: usize) {
        let mask = 1usize << self.bit(q);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                self.amps.swap(i, i | mask);
            }
        }
    }

    pub fn z(&mut self, q: usize) {
        let mask = 1usize << self.bit(q);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *a = -&*a;
            }
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << self.bit(control), 1usize << self.bit(target));
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let (ma, mb) = (1usize << self.bit(a), 1usize << self.bit(b));
        for (i, v) in self.amps.iter_mut().enumerate() {
            if i & ma != 0 && i & mb != 0 {
                *v = -&*v;
            }
        }
    }

    /// Multiplies amplitude `i` by `signs[i]`.
    pub fn phase(&mut self, signs: &[bool]) {
        for (a, &neg) in self.amps.iter_mut().zip(signs) {
            if neg {
                *a = -&*a;
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr().to_f64()).collect()
    }
}

/// Random expression over projections, evaluated independently of any
/// diagram by [`Expr::eval`].
///
/// Boolean operators only ever see Boolean subtrees; `PLUS`/`TIMES` take any
/// subtree, so integer values appear above them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(usize),
    Bool(&'static str, Box<Expr>, Box<Expr>),
    Arith(&'static str, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Random tree of the given depth over `vars` variables.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, vars: usize, depth: usize) -> Expr {
        let want_bool = rng.gen_bool(0.5);
        Expr::random_typed(rng, vars, depth, want_bool)
    }

    fn random_typed<R: rand::Rng + ?Sized>(rng: &mut R, vars: usize, depth: usize, want_bool: bool) -> Expr {
        if depth == 0 || rng.gen_bool(0.15) {
            return Expr::Var(rng.gen_range(0..vars));
        }
        if want_bool {
            let op = ["AND", "OR", "XOR"][rng.gen_range(0..3)];
            let l = Expr::random_typed(rng, vars, depth - 1, true);
            let r = Expr::random_typed(rng, vars, depth - 1, true);
            Expr::Bool(op, Box::new(l), Box::new(r))
        } else {
            let op = ["PLUS", "TIMES"][rng.gen_range(0..2)];
            let lb = rng.gen_bool(0.5);
            let rb = rng.gen_bool(0.5);
            let l = Expr::random_typed(rng, vars, depth - 1, lb);
            let r = Expr::random_typed(rng, vars, depth - 1, rb);
            Expr::Arith(op, Box::new(l), Box::new(r))
        }
    }

    fn op(name: &str) -> BinaryOp {
        match name {
            "AND" => BinaryOp::AND,
            "OR" => BinaryOp::OR,
            "XOR" => BinaryOp::XOR,
            "PLUS" => BinaryOp::PLUS,
            _ => BinaryOp::TIMES,
        }
    }

    /// Direct pointwise evaluation on one assignment.
    pub fn eval(&self, bits: &[bool]) -> Value {
        match self {
            Expr::Var(i) => Value::from_bool(bits[*i]),
            Expr::Bool(op, l, r) => {
                let (a, b) = (l.eval(bits).as_bool(), r.eval(bits).as_bool());
                let (a, b) = (a.expect("boolean subtree"), b.expect("boolean subtree"));
                Value::from_bool(match *op {
                    "AND" => a && b,
                    "OR" => a || b,
                    _ => a != b,
                })
            }
            Expr::Arith(op, l, r) => {
                let (a, b) = (l.eval(bits), r.eval(bits));
                if *op == "PLUS" {
                    a + b
                } else {
                    a * b
                }
            }
        }
    }

    pub fn dense(&self, level: u32) -> Result<DenseFunction> {
        DenseFunction::from_fn(level, |b| self.eval(b))
    }

    /// Builds the diagram bottom-up with `apply`; every intermediate result is
    /// passed to `observe`.
    pub fn build(&self, m: &mut Manager, level: u32, observe: &mut dyn FnMut(&mut Manager, &Tidd)) -> Result<Tidd> {
        let out = match self {
            Expr::Var(i) => m.projection(level, *i)?,
            Expr::Bool(op, l, r) | Expr::Arith(op, l, r) => {
                let a = l.build(m, level, observe)?;
                let b = r.build(m, level, observe)?;
                m.apply(&Expr::op(op), &a, &b)?
            }
        };
        observe(m, &out);
        Ok(out)
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) => 1,
            Expr::Bool(_, l, r) | Expr::Arith(_, l, r) => 1 + l.size() + r.size(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<Value> {
        xs.iter().copied().map(Value::from_int).collect()
    }

    #[test]
    fn dense_of_builders() {
        let mut m = Manager::new();
        let c = m.constant(2, Value::from_int(7));
        assert_eq!(dense_from_tidd(&m, &c).unwrap().outputs(), ints(&[7; 16]).as_slice());
        let h = m.hadamard_family(1).unwrap();
        assert_eq!(dense_from_tidd(&m, &h).unwrap().outputs(), ints(&[1, 1, 1, -1]).as_slice());
        let p = m.projection(2, 0).unwrap();
        let d = dense_from_tidd(&m, &p).unwrap();
        for i in 0..16 {
            assert_eq!(d.get(i), &Value::from_bool(i >= 8));
        }
    }

    #[test]
    fn scale_guard() {
        let mut m = Manager::new();
        let c = m.constant(5, Value::one());
        assert!(matches!(
            dense_from_tidd(&m, &c),
            Err(TiddError::OracleScaleLimit { vars: 32, limit: 20 })
        ));
        let c = m.constant(4, Value::one());
        assert!(matches!(
            dense_from_tidd_limited(&m, &c, 8),
            Err(TiddError::OracleScaleLimit { vars: 16, limit: 8 })
        ));
    }

    #[test]
    fn dense_matmul_h2() {
        let h = DenseFunction::new(1, ints(&[1, 1, 1, -1])).unwrap();
        let p = dense_matmul(&h, &h).unwrap();
        assert_eq!(p.outputs(), ints(&[2, 0, 0, 2]).as_slice());
    }

    #[test]
    fn xor_self_is_zero() {
        let t = DenseFunction::from_fn(2, |b| Value::from_bool(b[0] ^ b[3])).unwrap();
        let z = dense_apply(&BinaryOp::XOR, &t, &t).unwrap();
        assert!(z.outputs().iter().all(Value::is_zero));
    }

    #[test]
    fn equality_table_matches_definition() {
        let mut m = Manager::new();
        let e = m.equality_relation(2).unwrap();
        let d = DenseFunction::from_fn(2, |b| Value::from_bool(b[0] == b[1] && b[2] == b[3])).unwrap();
        assert!(exhaustive_equiv(&m, &e, &d).unwrap());
        let p0 = m.projection(2, 0).unwrap();
        let p1 = m.projection(2, 1).unwrap();
        let d1 = dense_from_tidd(&m, &p1).unwrap();
        assert!(!exhaustive_equiv(&m, &p0, &d1).unwrap());
    }

    #[test]
    fn class_counts_of_known_functions() {
        let c = DenseFunction::from_fn(3, |_| Value::one()).unwrap();
        assert_eq!(class_counts(&c).unwrap(), vec![1, 1, 1, 1]);
        // 16x16 Hadamard: 4 qubits, 8 interleaved variables.
        let h16 = DenseFunction::from_fn(3, |b| {
            let dot = (0..4).filter(|&j| b[2 * j] && b[2 * j + 1]).count();
            Value::from_int(if dot % 2 == 0 { 1 } else { -1 })
        })
        .unwrap();
        assert_eq!(class_counts(&h16).unwrap(), vec![2, 2, 2, 2]);
    }

    #[test]
    fn anti_diagonal_h4_classes() {
        // h_4: rows of 4 bits, row i must have bit 3-i clear.
        let d = DenseFunction::from_fn(4, |b| Value::from_bool((0..4).all(|i| !b[4 * i + 3 - i]))).unwrap();
        assert_eq!(class_count_at_level(&d, 2).unwrap(), 16);
        let via_rows = conjunctive_row_class_count(4, |i, r| !r[3 - i]).unwrap();
        assert_eq!(via_rows, 16);
    }

    #[test]
    fn dense_kron_order() {
        let a = DenseFunction::new(0, ints(&[2, 3])).unwrap();
        let b = DenseFunction::new(0, ints(&[5, 7])).unwrap();
        assert_eq!(dense_kron(&a, &b).unwrap().outputs(), ints(&[10, 14, 15, 21]).as_slice());
    }

    #[test]
    fn dense_state_gates() {
        let mut s = DenseState::basis(2, 0);
        s.h(0);
        s.cnot(0, 1);
        let h = Value::inv_sqrt2();
        assert_eq!(s.amps, vec![h.clone(), Value::zero(), Value::zero(), h]);
        s.cz(0, 1);
        s.z(0);
        s.x(1);
        assert_eq!(s.probabilities().iter().sum::<f64>(), 1.0);
    }
}
