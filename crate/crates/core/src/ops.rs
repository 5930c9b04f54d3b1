//! Pointwise binary operations (pair product + reduction), scalar
//! multiplication and the Kronecker product.
//!
//! Reduction works in one top-down pass. In a leveled automaton the
//! equivalence classes at level `i` are fully determined by the classes at
//! level `i + 1`: two states are equivalent iff, against every peer state,
//! they lead to the same class from both the left and the right. Every state
//! of a layer occurs in its parent's table, so no state is unreachable and no
//! further fixpoint iteration is needed. The layers are then rebuilt bottom-up
//! with first-occurrence renumbering.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Result, TiddError};
use crate::layer::{LayerBody, LayerId, LevelZeroKind, TransitionTable};
use crate::manager::Manager;
use crate::tidd::Tidd;
use crate::value::Value;

/// Result of renumbering a raw table into first-occurrence order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Renumbering {
    pub table: TransitionTable,
    pub num_states: usize,
    /// `perm[old_label] = new_index`; labels that never occur map to `u32::MAX`.
    pub perm: Vec<u32>,
}

/// Renumbers the parent labels of a total square table so that first
/// occurrences in row-major order read `0, 1, 2, …`.
pub fn canonical_renumber(side: usize, raw: &[u32]) -> Renumbering {
    assert_eq!(raw.len(), side * side, "raw table must be square");
    let max = raw.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut perm = vec![u32::MAX; max];
    let mut next = 0u32;
    let entries = raw
        .iter()
        .map(|&e| {
            let slot = &mut perm[e as usize];
            if *slot == u32::MAX {
                *slot = next;
                next += 1;
            }
            *slot
        })
        .collect();
    Renumbering {
        table: TransitionTable::new_unchecked(side, entries),
        num_states: next as usize,
        perm,
    }
}

/// A pair-product layer with, for each of its states, the operand state pair
/// it stands for.
#[derive(Clone, Debug)]
pub struct PairProduct {
    pub layer: LayerId,
    pub pairs: Arc<[(u32, u32)]>,
}

/// A surjective state → class map, numbered so that each class is named after
/// its leftmost member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionMap {
    classes: Vec<u32>,
    num_classes: usize,
}

impl ReductionMap {
    pub fn identity(n: usize) -> Self {
        ReductionMap {
            classes: (0..n as u32).collect(),
            num_classes: n,
        }
    }

    /// Renames arbitrary labels to leftmost-first class indices.
    pub fn from_labels<T: std::hash::Hash + Eq>(labels: impl IntoIterator<Item = T>) -> Self {
        let mut ids: HashMap<T, u32> = HashMap::new();
        let classes: Vec<u32> = labels
            .into_iter()
            .map(|l| {
                let n = ids.len() as u32;
                *ids.entry(l).or_insert(n)
            })
            .collect();
        ReductionMap {
            num_classes: ids.len(),
            classes,
        }
    }

    /// Groups states with equal values. Returns the map and the value of each
    /// class.
    pub fn from_values(values: &[Value]) -> (Self, Vec<Value>) {
        let map = ReductionMap::from_labels(values.iter());
        let mut class_values = vec![None; map.num_classes];
        for (state, &c) in map.classes.iter().enumerate() {
            class_values[c as usize].get_or_insert_with(|| values[state].clone());
        }
        (map, class_values.into_iter().map(Option::unwrap).collect())
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.num_classes == self.classes.len()
    }

    /// Smallest member of every class.
    pub fn representatives(&self) -> Vec<u32> {
        let mut reps = vec![u32::MAX; self.num_classes];
        for (s, &c) in self.classes.iter().enumerate() {
            if reps[c as usize] == u32::MAX {
                reps[c as usize] = s as u32;
            }
        }
        reps
    }
}

/// Output of [`Manager::reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduced {
    pub top: LayerId,
    /// Old top state → new top state.
    pub top_map: Vec<u32>,
}

type ValueFn = fn(&Value, &Value) -> Result<Value>;

/// A pure binary operation on values, identified by name for memoization.
#[derive(Clone, Copy)]
pub struct BinaryOp {
    name: &'static str,
    func: ValueFn,
}

impl std::fmt::Debug for BinaryOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BinaryOp({})", self.name)
    }
}

fn boolean(op: &'static str, v: &Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| TiddError::ValueDomainError {
        op,
        value: v.to_string(),
    })
}

impl BinaryOp {
    pub const PLUS: BinaryOp = BinaryOp {
        name: "PLUS",
        func: |a, b| Ok(a + b),
    };
    pub const TIMES: BinaryOp = BinaryOp {
        name: "TIMES",
        func: |a, b| Ok(a * b),
    };
    pub const MINUS: BinaryOp = BinaryOp {
        name: "MINUS",
        func: |a, b| Ok(a - b),
    };
    pub const AND: BinaryOp = BinaryOp {
        name: "AND",
        func: |a, b| Ok(Value::from_bool(boolean("AND", a)? & boolean("AND", b)?)),
    };
    pub const OR: BinaryOp = BinaryOp {
        name: "OR",
        func: |a, b| Ok(Value::from_bool(boolean("OR", a)? | boolean("OR", b)?)),
    };
    pub const XOR: BinaryOp = BinaryOp {
        name: "XOR",
        func: |a, b| Ok(Value::from_bool(boolean("XOR", a)? ^ boolean("XOR", b)?)),
    };
    pub const FIRST: BinaryOp = BinaryOp {
        name: "FIRST",
        func: |a, _| Ok(a.clone()),
    };

    /// A user-supplied operation. `func` must be pure; `name` must be unique
    /// per function since it keys the apply cache.
    pub const fn custom(name: &'static str, func: ValueFn) -> Self {
        BinaryOp { name, func }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn eval(&self, a: &Value, b: &Value) -> Result<Value> {
        (self.func)(a, b)
    }
}

impl Manager {
    /// Cross product of two equal-level layer stacks, keeping only reachable
    /// pairs. Memoized on the handle pair.
    pub fn pair_product(&mut self, a: LayerId, b: LayerId) -> Result<PairProduct> {
        let (la, lb) = (self.layer(a).level(), self.layer(b).level());
        if la != lb {
            return Err(TiddError::LevelMismatch { left: la, right: lb });
        }
        Ok(self.pair_product_rec(a, b))
    }

    fn pair_product_rec(&mut self, a: LayerId, b: LayerId) -> PairProduct {
        if let Some(pp) = self.pair_cache.get(&(a, b)) {
            self.stats.pair_hits += 1;
            return pp.clone();
        }
        self.stats.pair_misses += 1;
        let result = match (self.layer(a).body().clone(), self.layer(b).body().clone()) {
            (LayerBody::Leaf(ka), LayerBody::Leaf(kb)) => {
                use LevelZeroKind::*;
                let (kind, pairs): (_, Vec<(u32, u32)>) = match (ka, kb) {
                    (DontCare, DontCare) => (DontCare, vec![(0, 0)]),
                    (Fork, DontCare) => (Fork, vec![(0, 0), (1, 0)]),
                    (DontCare, Fork) => (Fork, vec![(0, 0), (0, 1)]),
                    (Fork, Fork) => (Fork, vec![(0, 0), (1, 1)]),
                };
                PairProduct {
                    layer: self.intern_leaf(kind),
                    pairs: pairs.into(),
                }
            }
            (
                LayerBody::Internal { child: ca, table: ta },
                LayerBody::Internal { child: cb, table: tb },
            ) => {
                let child = self.pair_product_rec(ca, cb);
                let s = child.pairs.len();
                let mut index: HashMap<(u32, u32), u32> = HashMap::new();
                let mut pairs = Vec::new();
                let mut entries = Vec::with_capacity(s * s);
                for &(qa, pa) in child.pairs.iter() {
                    for &(qb, pb) in child.pairs.iter() {
                        let pair = (ta.get(qa, qb), tb.get(pa, pb));
                        let id = *index.entry(pair).or_insert_with(|| {
                            pairs.push(pair);
                            (pairs.len() - 1) as u32
                        });
                        entries.push(id);
                    }
                }
                let n = pairs.len();
                let layer = self.intern_canonical(child.layer, TransitionTable::new_unchecked(s, entries), n);
                PairProduct {
                    layer,
                    pairs: pairs.into(),
                }
            }
            _ => unreachable!("layers at equal level have equal kinds"),
        };
        self.pair_cache.insert((a, b), result.clone());
        result
    }

    /// Minimizes the stack under `top` after merging top states according to
    /// `top_classes`, rebuilding canonical layers.
    pub fn reduce(&mut self, top: LayerId, top_classes: &ReductionMap) -> Reduced {
        assert_eq!(top_classes.len(), self.layer(top).num_states(), "class map must cover the top layer");
        let stack = self.stack(top);
        let mut classes: Vec<ReductionMap> = vec![top_classes.clone()];
        // Descend until the classes are trivial on a layer already known minimal.
        let mut base = stack.len() - 1;
        for (d, &id) in stack.iter().enumerate() {
            let cls = &classes[d];
            if cls.is_identity() && self.minimal.contains(&id) {
                base = d;
                break;
            }
            let (child, table) = match self.layer(id).body() {
                LayerBody::Leaf(_) => {
                    base = d;
                    break;
                }
                LayerBody::Internal { child, table } => (*child, table.clone()),
            };
            let s = self.layer(child).num_states();
            let c = cls.classes();
            let sigs = (0..s as u32).map(|x| {
                let mut sig = Vec::with_capacity(2 * s);
                sig.extend((0..s as u32).map(|y| c[table.get(x, y) as usize]));
                sig.extend((0..s as u32).map(|y| c[table.get(y, x) as usize]));
                sig
            });
            classes.push(ReductionMap::from_labels(sigs));
        }

        // Rebuild bottom-up from `base`.
        let base_id = stack[base];
        let base_cls = &classes[base];
        let (mut cur, mut map): (LayerId, Vec<u32>) = if base_cls.is_identity() && self.minimal.contains(&base_id) {
            (base_id, base_cls.classes().to_vec())
        } else {
            // Only leaves stop the descent otherwise.
            debug_assert!(self.layer(base_id).leaf_kind().is_some());
            let kind = if base_cls.num_classes() == 2 {
                LevelZeroKind::Fork
            } else {
                LevelZeroKind::DontCare
            };
            (self.intern_leaf(kind), base_cls.classes().to_vec())
        };
        for d in (0..base).rev() {
            let table = self.layer(stack[d]).table().expect("internal layer").clone();
            let cls = classes[d].classes();
            let child_new = self.layer(cur).num_states();
            let mut reps = vec![u32::MAX; child_new];
            for (old, &new) in map.iter().enumerate() {
                if reps[new as usize] == u32::MAX {
                    reps[new as usize] = old as u32;
                }
            }
            let mut raw = Vec::with_capacity(child_new * child_new);
            for &ru in &reps {
                for &rv in &reps {
                    raw.push(cls[table.get(ru, rv) as usize]);
                }
            }
            let ren = canonical_renumber(child_new, &raw);
            let id = self.intern_canonical(cur, ren.table, ren.num_states);
            self.minimal.insert(id);
            map = cls.iter().map(|&c| ren.perm[c as usize]).collect();
            cur = id;
        }
        Reduced { top: cur, top_map: map }
    }

    /// Turns a (possibly non-minimal) top layer with raw per-state values into
    /// a canonical diagram.
    pub(crate) fn finish(&mut self, top: LayerId, raw_values: Vec<Value>) -> Tidd {
        let (classes, class_values) = ReductionMap::from_values(&raw_values);
        let reduced = self.reduce(top, &classes);
        let mut values = vec![None; class_values.len()];
        for (old, &new) in reduced.top_map.iter().enumerate() {
            values[new as usize].get_or_insert_with(|| raw_values[old].clone());
        }
        let level = self.layer(reduced.top).level();
        Tidd {
            top: reduced.top,
            level,
            values: values.into_iter().map(Option::unwrap).collect::<Vec<_>>().into(),
        }
    }

    /// Re-reduces a diagram whose value tuple is already duplicate-free.
    pub fn reduce_tidd(&mut self, f: &Tidd) -> Tidd {
        self.finish(f.top, f.values.to_vec())
    }

    pub fn apply(&mut self, op: &BinaryOp, f: &Tidd, g: &Tidd) -> Result<Tidd> {
        if f.level != g.level {
            return Err(TiddError::LevelMismatch {
                left: f.level,
                right: g.level,
            });
        }
        let key = (op.name, f.clone(), g.clone());
        if let Some(r) = self.apply_cache.get(&key) {
            self.stats.apply_hits += 1;
            return Ok(r.clone());
        }
        self.stats.apply_misses += 1;
        let pp = self.pair_product_rec(f.top, g.top);
        let raw = pp
            .pairs
            .iter()
            .map(|&(q, p)| op.eval(&f.values[q as usize], &g.values[p as usize]))
            .collect::<Result<Vec<_>>>()?;
        let out = self.finish(pp.layer, raw);
        self.apply_cache.insert(key, out.clone());
        Ok(out)
    }

    pub fn scalar_multiply(&mut self, c: &Value, f: &Tidd) -> Tidd {
        let k = self.constant(f.level, c.clone());
        self.apply(&BinaryOp::TIMES, f, &k).expect("TIMES is total on equal levels")
    }

    /// `a ⊗ b`: the level-`l+1` diagram whose left half of variables is read by
    /// `a` and right half by `b`, with value the product.
    pub fn kronecker(&mut self, a: &Tidd, b: &Tidd) -> Result<Tidd> {
        if a.level != b.level {
            return Err(TiddError::LevelMismatch {
                left: a.level,
                right: b.level,
            });
        }
        let key = (a.clone(), b.clone());
        if let Some(r) = self.kron_cache.get(&key) {
            self.stats.kron_hits += 1;
            return Ok(r.clone());
        }
        self.stats.kron_misses += 1;
        let pp = self.pair_product_rec(a.top, b.top);
        let s = pp.pairs.len();
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut raw_values = Vec::new();
        let mut entries = Vec::with_capacity(s * s);
        for &(qa, _) in pp.pairs.iter() {
            for &(_, qb) in pp.pairs.iter() {
                let id = *index.entry((qa, qb)).or_insert_with(|| {
                    raw_values.push(&a.values[qa as usize] * &b.values[qb as usize]);
                    (raw_values.len() - 1) as u32
                });
                entries.push(id);
            }
        }
        let n = raw_values.len();
        let top = self.intern_canonical(pp.layer, TransitionTable::new_unchecked(s, entries), n);
        let out = self.finish(top, raw_values);
        self.kron_cache.insert(key, out.clone());
        Ok(out)
    }
}
