//! Complete diagrams: a top layer plus the value tuple of its states.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::error::{Result, TiddError};
use crate::layer::{LayerBody, LayerId, LevelZeroKind};
use crate::manager::Manager;
use crate::value::Value;

/// A diagram over `2^level` Boolean variables. `values[j]` is the value of
/// top state `j`.
///
/// Equality is structural: same top handle and same value tuple. For
/// diagrams built by this crate that is exactly semantic equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tidd {
    pub(crate) top: LayerId,
    pub(crate) level: u32,
    pub(crate) values: Arc<[Value]>,
}

impl Tidd {
    pub fn top(&self) -> LayerId {
        self.top
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn num_vars(&self) -> usize {
        1usize << self.level
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }
}

impl fmt::Debug for Tidd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tidd")
            .field("top", &self.top)
            .field("level", &self.level)
            .field("values", &self.values)
            .finish()
    }
}

/// Size of a diagram under the node/edge counting convention used by the
/// benchmarks: one node per layer; a leaf contributes 1 (DontCare) or
/// 2 (Fork) edges; an internal layer contributes the lengths of its distinct
/// rows, each distinct row counted once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SizeReport {
    pub nodes: usize,
    pub edges: usize,
    pub total: usize,
    /// Sum of state counts over all layers (not part of `total`).
    pub states: usize,
}

/// First violated structural constraint, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    LevelMismatch { declared: u32, actual: u32 },
    ValueCountMismatch { expected: usize, got: usize },
    /// Two top states share a value.
    DuplicateValue { first: usize, second: usize },
    ArityMismatch { level: u32 },
    NotTotal { level: u32, cell: usize },
    NonCanonicalOrder { level: u32, cell: usize },
    NotSurjective { level: u32 },
    /// Two states of the layer at `level` have identical rows and columns in
    /// the table one level up.
    Indistinguishable { level: u32, first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LevelMismatch { declared, actual } => {
                write!(f, "declared level {declared} but top layer is at level {actual}")
            }
            Violation::ValueCountMismatch { expected, got } => {
                write!(f, "top layer has {expected} states but {got} values")
            }
            Violation::DuplicateValue { first, second } => {
                write!(f, "top states {first} and {second} share a value")
            }
            Violation::ArityMismatch { level } => write!(f, "level {level}: table side differs from child state count"),
            Violation::NotTotal { level, cell } => write!(f, "level {level}: cell {cell} is not a valid state"),
            Violation::NonCanonicalOrder { level, cell } => {
                write!(f, "level {level}: table out of first-occurrence order at cell {cell}")
            }
            Violation::NotSurjective { level } => write!(f, "level {level}: some state never occurs in the table"),
            Violation::Indistinguishable { level, first, second } => {
                write!(f, "level {level}: states {first} and {second} are indistinguishable")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationReport {
    Pass,
    Fail(Violation),
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, ValidationReport::Pass)
    }
}

impl Manager {
    /// Pairs a top layer with its value tuple. The tuple length must match the
    /// layer; other constraints are only checked by [`Manager::validate`].
    pub fn make_tidd(&self, top: LayerId, values: Vec<Value>) -> Result<Tidd> {
        let layer = self.layer(top);
        if values.len() != layer.num_states() {
            return Err(TiddError::ShapeMismatch(format!(
                "top layer has {} states, got {} values",
                layer.num_states(),
                values.len()
            )));
        }
        Ok(Tidd {
            top,
            level: layer.level(),
            values: values.into(),
        })
    }

    /// State reached in layer `id` by the bottom-up run over `bits`.
    pub fn run(&self, id: LayerId, bits: &[bool]) -> u32 {
        match &self.layer(id).body {
            LayerBody::Leaf(kind) => kind.state_of(bits[0]),
            LayerBody::Internal { child, table } => {
                let half = bits.len() / 2;
                let l = self.run(*child, &bits[..half]);
                let r = self.run(*child, &bits[half..]);
                table.get(l, r)
            }
        }
    }

    pub fn evaluate(&self, f: &Tidd, bits: &[bool]) -> Result<Value> {
        if bits.len() != f.num_vars() {
            return Err(TiddError::AssignmentLengthMismatch {
                expected: f.num_vars(),
                got: bits.len(),
            });
        }
        Ok(f.values[self.run(f.top, bits) as usize].clone())
    }

    /// Semantic equality for same-level diagrams (canonicity).
    pub fn equal(&self, f: &Tidd, g: &Tidd) -> bool {
        f == g
    }

    pub fn validate(&self, f: &Tidd) -> ValidationReport {
        match self.check(f) {
            Ok(()) => ValidationReport::Pass,
            Err(v) => ValidationReport::Fail(v),
        }
    }

    fn check(&self, f: &Tidd) -> std::result::Result<(), Violation> {
        let top = self.layer(f.top);
        if top.level() != f.level {
            return Err(Violation::LevelMismatch {
                declared: f.level,
                actual: top.level(),
            });
        }
        if f.values.len() != top.num_states() {
            return Err(Violation::ValueCountMismatch {
                expected: top.num_states(),
                got: f.values.len(),
            });
        }
        let mut seen: HashMap<&Value, usize> = HashMap::new();
        for (j, v) in f.values.iter().enumerate() {
            if let Some(&first) = seen.get(v) {
                return Err(Violation::DuplicateValue { first, second: j });
            }
            seen.insert(v, j);
        }
        for id in self.stack(f.top) {
            let layer = self.layer(id);
            let (child, table) = match &layer.body {
                LayerBody::Leaf(_) => continue,
                LayerBody::Internal { child, table } => (self.layer(*child), table),
            };
            let level = layer.level();
            let s = child.num_states();
            if table.side() != s {
                return Err(Violation::ArityMismatch { level });
            }
            let mut next = 0u32;
            for (cell, &e) in table.entries().iter().enumerate() {
                if e as usize >= layer.num_states() {
                    return Err(Violation::NotTotal { level, cell });
                }
                if e == next {
                    next += 1;
                } else if e > next {
                    return Err(Violation::NonCanonicalOrder { level, cell });
                }
            }
            if next as usize != layer.num_states() {
                return Err(Violation::NotSurjective { level });
            }
            // Child states j != k must differ in some row or column.
            let mut sigs: HashMap<Vec<u32>, usize> = HashMap::with_capacity(s);
            for j in 0..s {
                let mut sig = Vec::with_capacity(2 * s);
                sig.extend_from_slice(table.row(j));
                sig.extend((0..s).map(|q| table.get(q as u32, j as u32)));
                if let Some(&first) = sigs.get(&sig) {
                    return Err(Violation::Indistinguishable {
                        level: level - 1,
                        first,
                        second: j,
                    });
                }
                sigs.insert(sig, j);
            }
        }
        Ok(())
    }

    pub fn size_metrics(&self, f: &Tidd) -> SizeReport {
        self.layer_size(f.top)
    }

    pub fn layer_size(&self, top: LayerId) -> SizeReport {
        let mut report = SizeReport::default();
        for id in self.stack(top) {
            let layer = self.layer(id);
            report.nodes += 1;
            report.states += layer.num_states();
            report.edges += match &layer.body {
                LayerBody::Leaf(LevelZeroKind::Fork) => 2,
                LayerBody::Leaf(LevelZeroKind::DontCare) => 1,
                LayerBody::Internal { table, .. } => {
                    let distinct: HashSet<&[u32]> = table.rows().collect();
                    distinct.len() * table.side()
                }
            };
        }
        report.total = report.nodes + report.edges;
        report
    }

    /// Deterministic text dump, one line per layer from level 0 up, then the
    /// value tuple as `a,b,k` triples.
    pub fn dump(&self, f: &Tidd) -> String {
        let mut out = String::new();
        for id in self.stack(f.top).into_iter().rev() {
            let layer = self.layer(id);
            let (kind, cells): (&str, Vec<u32>) = match &layer.body {
                LayerBody::Leaf(LevelZeroKind::Fork) => ("Fork", vec![0, 1]),
                LayerBody::Leaf(LevelZeroKind::DontCare) => ("DontCare", vec![0, 0]),
                LayerBody::Internal { table, .. } => ("Internal", table.entries().to_vec()),
            };
            let cells: Vec<String> = cells.iter().map(u32::to_string).collect();
            let _ = writeln!(
                out,
                "L{} kind={} states={} table=[{}]",
                layer.level(),
                kind,
                layer.num_states(),
                cells.join(",")
            );
        }
        let vals: Vec<String> = f
            .values
            .iter()
            .map(|v| {
                let (a, b, k) = v.triple();
                format!("{a},{b},{k}")
            })
            .collect();
        let _ = writeln!(out, "V={}", vals.join(" "));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layer::TransitionTable;

    fn h2(m: &mut Manager) -> Tidd {
        let fork = m.fork();
        let t = TransitionTable::from_rows(&[vec![0, 0], vec![0, 1]]).unwrap();
        let top = m.intern_internal(fork, t).unwrap();
        m.make_tidd(top, vec![Value::one(), Value::from_int(-1)]).unwrap()
    }

    #[test]
    fn evaluate_h2() {
        let mut m = Manager::new();
        let h = h2(&mut m);
        assert_eq!(m.evaluate(&h, &[false, true]).unwrap(), Value::one());
        assert_eq!(m.evaluate(&h, &[true, true]).unwrap(), Value::from_int(-1));
        assert!(matches!(
            m.evaluate(&h, &[true]),
            Err(TiddError::AssignmentLengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn duplicate_values_fail_validation() {
        let mut m = Manager::new();
        let h = h2(&mut m);
        let bad = m.make_tidd(h.top(), vec![Value::one(), Value::one()]).unwrap();
        assert_eq!(
            m.validate(&bad),
            ValidationReport::Fail(Violation::DuplicateValue { first: 0, second: 1 })
        );
        assert!(m.validate(&h).is_pass());
    }

    #[test]
    fn merged_states_fail_validation() {
        let mut m = Manager::new();
        let fork = m.fork();
        let t = TransitionTable::from_rows(&[vec![0, 0], vec![0, 0]]).unwrap();
        let top = m.intern_internal(fork, t).unwrap();
        let f = m.make_tidd(top, vec![Value::one()]).unwrap();
        assert_eq!(
            m.validate(&f),
            ValidationReport::Fail(Violation::Indistinguishable { level: 0, first: 0, second: 1 })
        );
    }

    #[test]
    fn h2_size_and_dump() {
        let mut m = Manager::new();
        let h = h2(&mut m);
        let s = m.size_metrics(&h);
        assert_eq!((s.nodes, s.edges, s.total, s.states), (2, 6, 8, 4));
        assert_eq!(
            m.dump(&h),
            "L0 kind=Fork states=2 table=[0,1]\nL1 kind=Internal states=2 table=[0,0,0,1]\nV=1,0,0 -1,0,0\n"
        );
    }
}
