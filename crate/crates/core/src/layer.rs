//! State layers: the per-level building blocks of a diagram.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, TiddError};

/// Handle to an interned layer. Two handles are equal iff the layers are
/// structurally identical.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LayerId(pub(crate) u32);

impl LayerId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L#{}", self.0)
    }
}

/// The two possible level-0 layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LevelZeroKind {
    /// Two states: symbol 0 reaches state 0, symbol 1 reaches state 1.
    Fork,
    /// One state reached by both symbols.
    DontCare,
}

impl LevelZeroKind {
    pub fn num_states(self) -> usize {
        match self {
            LevelZeroKind::Fork => 2,
            LevelZeroKind::DontCare => 1,
        }
    }

    /// State reached when reading `bit`.
    pub fn state_of(self, bit: bool) -> u32 {
        match self {
            LevelZeroKind::Fork => bit as u32,
            LevelZeroKind::DontCare => 0,
        }
    }
}

/// Square transition table `E` where `E[a][b]` is the parent state reached
/// from child states `a` (left) and `b` (right). Stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TransitionTable {
    side: usize,
    entries: Vec<u32>,
}

impl TransitionTable {
    pub fn new(side: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != side * side {
            return Err(TiddError::NotSquare { len: entries.len() });
        }
        Ok(TransitionTable { side, entries })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let side = rows.len();
        if rows.iter().any(|r| r.len() != side) {
            return Err(TiddError::NotSquare {
                len: rows.iter().map(Vec::len).sum(),
            });
        }
        Ok(TransitionTable {
            side,
            entries: rows.concat(),
        })
    }

    pub(crate) fn new_unchecked(side: usize, entries: Vec<u32>) -> Self {
        debug_assert_eq!(entries.len(), side * side);
        TransitionTable { side, entries }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn get(&self, left: u32, right: u32) -> u32 {
        self.entries[left as usize * self.side + right as usize]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn row(&self, a: usize) -> &[u32] {
        &self.entries[a * self.side..(a + 1) * self.side]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.entries.chunks(self.side.max(1))
    }

    /// Number of parent states if the table is in first-occurrence order.
    pub fn check_canonical(&self) -> Result<u32> {
        let mut next = 0u32;
        for (cell, &e) in self.entries.iter().enumerate() {
            if e == next {
                next += 1;
            } else if e > next {
                return Err(TiddError::CanonicalOrderViolation {
                    cell,
                    expected: next,
                    found: e,
                });
            }
        }
        Ok(next)
    }
}

impl fmt::Debug for TransitionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LayerBody {
    Leaf(LevelZeroKind),
    Internal {
        child: LayerId,
        table: Arc<TransitionTable>,
    },
}

/// An interned state layer. States are implicit indices `0..num_states`.
#[derive(Clone, Debug)]
pub struct Layer {
    pub(crate) level: u32,
    pub(crate) num_states: usize,
    pub(crate) body: LayerBody,
}

impl Layer {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn body(&self) -> &LayerBody {
        &self.body
    }

    pub fn child(&self) -> Option<LayerId> {
        match &self.body {
            LayerBody::Leaf(_) => None,
            LayerBody::Internal { child, .. } => Some(*child),
        }
    }

    pub fn table(&self) -> Option<&Arc<TransitionTable>> {
        match &self.body {
            LayerBody::Leaf(_) => None,
            LayerBody::Internal { table, .. } => Some(table),
        }
    }

    pub fn leaf_kind(&self) -> Option<LevelZeroKind> {
        match &self.body {
            LayerBody::Leaf(k) => Some(*k),
            LayerBody::Internal { .. } => None,
        }
    }
}
