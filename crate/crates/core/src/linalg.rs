//! Matrices and vectors over interleaved row/column variables, and matrix
//! multiplication through weighted triple sums.
//!
//! An `n`-qubit matrix is a function of `2n` variables ordered
//! `x0 y0 x1 y1 …` (row bits `x`, column bits `y`, most significant first),
//! so each level-1 subtree reads one `(x_j, y_j)` pair. A vector is stored
//! column-replicated, `v·1ᵀ`, which makes a matrix-vector product an ordinary
//! matrix product.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Result, TiddError};
use crate::layer::{LayerBody, LayerId, LevelZeroKind, TransitionTable};
use crate::manager::Manager;
use crate::ops::BinaryOp;
use crate::tidd::Tidd;
use crate::value::Value;

/// Formal sum of weighted `(q, p, w)` triples, kept sorted by `(q, p)` with
/// equal pairs merged, so equal sums compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TripleSum(Vec<(u32, u32, BigUint)>);

impl TripleSum {
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, BigUint)>) -> Self {
        let mut acc: BTreeMap<(u32, u32), BigUint> = BTreeMap::new();
        for (q, p, w) in terms {
            *acc.entry((q, p)).or_default() += w;
        }
        TripleSum(acc.into_iter().filter(|(_, w)| w.bits() > 0).map(|((q, p), w)| (q, p, w)).collect())
    }

    pub fn terms(&self) -> &[(u32, u32, BigUint)] {
        &self.0
    }
}

/// One level of a matrix product: the layer and the triple sum each of its
/// states stands for.
#[derive(Clone, Debug)]
pub struct MatmulLayer {
    pub layer: LayerId,
    pub sums: Arc<[TripleSum]>,
}

/// A `2^n × 2^n` matrix on `n` qubits (`n` a power of two).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixTidd {
    pub t: Tidd,
    pub qubits: usize,
}

/// A length-`2^n` vector stored as a column-replicated matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorTidd {
    pub m: MatrixTidd,
}

/// Level of an `n`-qubit matrix: `2n` variables.
pub fn matrix_level(qubits: usize) -> Result<u32> {
    if qubits == 0 || !qubits.is_power_of_two() {
        return Err(TiddError::NotPowerOfTwo(qubits));
    }
    Ok(1 + qubits.trailing_zeros())
}

impl MatrixTidd {
    pub fn new(t: Tidd, qubits: usize) -> Result<Self> {
        let level = matrix_level(qubits)?;
        if t.level() != level {
            return Err(TiddError::ShapeMismatch(format!(
                "{qubits}-qubit matrix needs level {level}, got {}",
                t.level()
            )));
        }
        Ok(MatrixTidd { t, qubits })
    }

    pub fn dim(&self) -> usize {
        1usize << self.qubits
    }
}

impl VectorTidd {
    pub fn qubits(&self) -> usize {
        self.m.qubits
    }

    pub fn tidd(&self) -> &Tidd {
        &self.m.t
    }
}

/// Interleaved assignment for row `r`, column `c` of an `n`-qubit matrix.
pub fn interleave(qubits: usize, row: usize, col: usize) -> Vec<bool> {
    (0..qubits)
        .flat_map(|j| {
            let shift = qubits - 1 - j;
            [(row >> shift) & 1 == 1, (col >> shift) & 1 == 1]
        })
        .collect()
}

impl Manager {
    pub fn matmul(&mut self, a: &MatrixTidd, b: &MatrixTidd) -> Result<MatrixTidd> {
        if a.qubits != b.qubits || a.t.level() != b.t.level() {
            return Err(TiddError::ShapeMismatch(format!(
                "cannot multiply {}-qubit by {}-qubit matrix",
                a.qubits, b.qubits
            )));
        }
        let (va, vb) = (a.t.values(), b.t.values());
        let ml = self.matmul_layer(
            (a.t.top(), va.iter().position(Value::is_zero).map(|i| i as u32)),
            (b.t.top(), vb.iter().position(Value::is_zero).map(|i| i as u32)),
        );
        let raw: Vec<Value> = ml
            .sums
            .iter()
            .map(|sum| {
                let mut acc = Value::zero();
                for (q, p, w) in sum.terms() {
                    let prod = &va[*q as usize] * &vb[*p as usize];
                    if !prod.is_zero() {
                        acc = acc + prod * Value::from_biguint(w);
                    }
                }
                acc
            })
            .collect();
        let t = self.finish(ml.layer, raw);
        Ok(MatrixTidd { t, qubits: a.qubits })
    }

    /// Product layer for operand layers `a.0`, `b.0`. `a.1`/`b.1` name a state
    /// of that layer from which every completion evaluates to 0; terms
    /// through it contribute nothing and are dropped.
    fn matmul_layer(&mut self, a: NullTagged, b: NullTagged) -> MatmulLayer {
        if let Some(ml) = self.matmul_cache.get(&(a, b)) {
            self.stats.matmul_hits += 1;
            return ml.clone();
        }
        self.stats.matmul_misses += 1;
        let (ca, ta) = internal(self, a.0);
        let (cb, tb) = internal(self, b.0);
        let keep = |q: u32, p: u32| Some(q) != a.1 && Some(p) != b.1;
        let (child, child_sums): (LayerId, Vec<TripleSum>) = if self.layer(ca).level() == 0 {
            // Level 1 reads one (row bit, column bit) pair through a Fork;
            // a DontCare operand leaf maps both bits to its single state.
            let leaf_state = |m: &Manager, id: LayerId, bit: u32| match m.layer(id).leaf_kind() {
                Some(LevelZeroKind::Fork) => bit,
                _ => 0,
            };
            let sums: Vec<TripleSum> = (0..4u32)
                .map(|ij| {
                    let (i, j) = (ij >> 1, ij & 1);
                    TripleSum::from_terms((0..2).filter_map(|k| {
                        let q = ta.get(leaf_state(self, ca, i), leaf_state(self, ca, k));
                        let p = tb.get(leaf_state(self, cb, k), leaf_state(self, cb, j));
                        keep(q, p).then(|| (q, p, BigUint::one()))
                    }))
                })
                .collect();
            let fork = self.fork();
            let (entries, states) = number_sums(sums);
            let n = states.len();
            let layer = self.intern_canonical(fork, TransitionTable::new_unchecked(2, entries), n);
            let ml = MatmulLayer {
                layer,
                sums: states.into(),
            };
            self.matmul_cache.insert((a, b), ml.clone());
            return ml;
        } else {
            let na = null_child(&ta, a.1);
            let nb = null_child(&tb, b.1);
            let sub = self.matmul_layer((ca, na), (cb, nb));
            (sub.layer, sub.sums.to_vec())
        };
        let s = child_sums.len();
        let (ta, tb) = (&*ta, &*tb);
        let mut sums = Vec::with_capacity(s * s);
        for l in &child_sums {
            for r in &child_sums {
                sums.push(TripleSum::from_terms(l.0.iter().flat_map(|(q1, p1, w1)| {
                    r.0.iter().filter_map(move |(q2, p2, w2)| {
                        let (q, p) = (ta.get(*q1, *q2), tb.get(*p1, *p2));
                        keep(q, p).then(|| (q, p, w1 * w2))
                    })
                })));
            }
        }
        let (entries, states) = number_sums(sums);
        let n = states.len();
        let layer = self.intern_canonical(child, TransitionTable::new_unchecked(s, entries), n);
        let ml = MatmulLayer {
            layer,
            sums: states.into(),
        };
        self.matmul_cache.insert((a, b), ml.clone());
        ml
    }

    pub fn identity_matrix(&mut self, qubits: usize) -> Result<MatrixTidd> {
        let level = matrix_level(qubits)?;
        let t = self.equality_relation(level)?;
        Ok(MatrixTidd { t, qubits })
    }

    /// Builds a 1-qubit matrix from its entries `[m00, m01, m10, m11]`.
    pub fn matrix_2x2(&mut self, entries: [Value; 4]) -> MatrixTidd {
        let t = self.from_truth_table(1, &entries).expect("level-1 table has 4 entries");
        MatrixTidd { t, qubits: 1 }
    }

    /// Kronecker product of two equal-size matrices (`a` acts on the more
    /// significant qubits).
    pub fn matrix_kron(&mut self, a: &MatrixTidd, b: &MatrixTidd) -> Result<MatrixTidd> {
        if a.qubits != b.qubits {
            return Err(TiddError::ShapeMismatch(format!(
                "kronecker of {}-qubit and {}-qubit matrices",
                a.qubits, b.qubits
            )));
        }
        let t = self.kronecker(&a.t, &b.t)?;
        Ok(MatrixTidd {
            t,
            qubits: 2 * a.qubits,
        })
    }

    pub fn vector_from_basis_state(&mut self, qubits: usize, bits: &[bool]) -> Result<VectorTidd> {
        if bits.len() != qubits {
            return Err(TiddError::ShapeMismatch(format!(
                "basis state has {} bits for {qubits} qubits",
                bits.len()
            )));
        }
        matrix_level(qubits)?;
        let m = self.basis_rec(bits);
        Ok(VectorTidd { m })
    }

    fn basis_rec(&mut self, bits: &[bool]) -> MatrixTidd {
        if bits.len() == 1 {
            let (z, o) = (Value::zero(), Value::one());
            let e = if bits[0] {
                [z.clone(), z, o.clone(), o]
            } else {
                [o.clone(), o, z.clone(), z]
            };
            return self.matrix_2x2(e);
        }
        let (l, r) = bits.split_at(bits.len() / 2);
        let l = self.basis_rec(l);
        let r = self.basis_rec(r);
        self.matrix_kron(&l, &r).expect("halves have equal size")
    }

    /// Column-replicated vector with the given amplitudes (index big-endian
    /// over qubits). Built by splitting on the high half of the qubits and
    /// summing `indicator ⊗ sub-vector` over the distinct sub-vectors.
    pub fn vector_from_amplitudes(&mut self, amps: &[Value]) -> Result<VectorTidd> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(TiddError::NotPowerOfTwo(len));
        }
        let qubits = len.trailing_zeros() as usize;
        matrix_level(qubits)?;
        let m = self.amplitudes_rec(amps);
        Ok(VectorTidd { m })
    }

    fn amplitudes_rec(&mut self, amps: &[Value]) -> MatrixTidd {
        if amps.len() == 2 {
            let (a, b) = (amps[0].clone(), amps[1].clone());
            return self.matrix_2x2([a.clone(), a, b.clone(), b]);
        }
        let qubits = amps.len().trailing_zeros() as usize;
        let lo_len = 1usize << (qubits / 2);
        let chunks: Vec<&[Value]> = amps.chunks(lo_len).collect();
        let mut groups: Vec<(&[Value], Vec<bool>)> = Vec::new();
        let mut index: HashMap<&[Value], usize> = HashMap::new();
        for (hi, chunk) in chunks.iter().enumerate() {
            let g = *index.entry(chunk).or_insert_with(|| {
                groups.push((chunk, vec![false; chunks.len()]));
                groups.len() - 1
            });
            groups[g].1[hi] = true;
        }
        let mut terms = Vec::with_capacity(groups.len());
        for (chunk, members) in groups {
            if chunk.iter().all(Value::is_zero) {
                continue;
            }
            let ind: Vec<Value> = members.into_iter().map(Value::from_bool).collect();
            let ind = self.amplitudes_rec(&ind);
            let sub = self.amplitudes_rec(chunk);
            terms.push(self.matrix_kron(&ind, &sub).expect("halves have equal size"));
        }
        if terms.is_empty() {
            let level = matrix_level(qubits).expect("power of two");
            return MatrixTidd {
                t: self.constant(level, Value::zero()),
                qubits,
            };
        }
        self.sum_balanced(terms)
    }

    fn sum_balanced(&mut self, mut terms: Vec<MatrixTidd>) -> MatrixTidd {
        while terms.len() > 1 {
            let mut next = Vec::with_capacity(terms.len().div_ceil(2));
            let mut it = terms.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => {
                        let t = self.apply(&BinaryOp::PLUS, &a.t, &b.t).expect("equal levels");
                        next.push(MatrixTidd { t, qubits: a.qubits });
                    }
                    None => next.push(a),
                }
            }
            terms = next;
        }
        terms.pop().expect("nonempty")
    }

    pub fn matvec(&mut self, a: &MatrixTidd, v: &VectorTidd) -> Result<VectorTidd> {
        Ok(VectorTidd {
            m: self.matmul(a, &v.m)?,
        })
    }

    /// Amplitude of basis state `index` (read from column 0).
    pub fn amplitude(&self, v: &VectorTidd, index: usize) -> Value {
        let bits = interleave(v.qubits(), index, 0);
        self.evaluate(&v.m.t, &bits).expect("shape is consistent")
    }
}

/// A layer plus its all-zero state, if any.
pub(crate) type NullTagged = (LayerId, Option<u32>);

/// The child state whose every row and column entry is `parent_null`.
fn null_child(table: &TransitionTable, parent_null: Option<u32>) -> Option<u32> {
    let z = parent_null?;
    let s = table.side() as u32;
    (0..s).find(|&q| (0..s).all(|r| table.get(q, r) == z && table.get(r, q) == z))
}

/// Numbers sums in first-occurrence order; returns the table entries and the
/// distinct sums.
fn number_sums(sums: Vec<TripleSum>) -> (Vec<u32>, Vec<TripleSum>) {
    let mut index: HashMap<TripleSum, u32> = HashMap::new();
    let mut states = Vec::new();
    let entries = sums
        .into_iter()
        .map(|sum| {
            *index.entry(sum).or_insert_with_key(|sum| {
                states.push(sum.clone());
                (states.len() - 1) as u32
            })
        })
        .collect();
    (entries, states)
}

fn internal(m: &Manager, id: LayerId) -> (LayerId, Arc<TransitionTable>) {
    match m.layer(id).body() {
        LayerBody::Internal { child, table } => (*child, table.clone()),
        LayerBody::Leaf(_) => panic!("matrix diagrams have level at least 1"),
    }
}
