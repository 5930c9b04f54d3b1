//! The manager context: owns the layer unique table and every memo table.
//!
//! Layers are hash-consed, so identical layers always share one [`LayerId`].
//! All mutation goes through `&mut Manager`; callers sharing a manager across
//! threads must serialize access themselves (e.g. with a `Mutex`).

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::analysis::PathCountAnnotation;
use crate::error::{Result, TiddError};
use crate::layer::{Layer, LayerBody, LayerId, LevelZeroKind, TransitionTable};
use crate::linalg::{MatmulLayer, NullTagged};
use crate::ops::PairProduct;
use crate::tidd::Tidd;

/// Argument to [`Manager::intern_layer`].
#[derive(Clone, Debug)]
pub enum RawLayer {
    Leaf(LevelZeroKind),
    Internal {
        child: LayerId,
        table: TransitionTable,
    },
}

/// Hit/miss counters for the memo tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub pair_hits: u64,
    pub pair_misses: u64,
    pub apply_hits: u64,
    pub apply_misses: u64,
    pub matmul_hits: u64,
    pub matmul_misses: u64,
    pub kron_hits: u64,
    pub kron_misses: u64,
}

#[derive(Default)]
pub struct Manager {
    layers: Vec<Layer>,
    unique: HashMap<LayerBody, LayerId>,
    /// Layers produced by reduction: their whole sub-stack is minimal when
    /// all of their own states are kept distinct.
    pub(crate) minimal: HashSet<LayerId>,
    pub(crate) pair_cache: HashMap<(LayerId, LayerId), PairProduct>,
    pub(crate) apply_cache: HashMap<(&'static str, Tidd, Tidd), Tidd>,
    pub(crate) kron_cache: HashMap<(Tidd, Tidd), Tidd>,
    pub(crate) matmul_cache: HashMap<(NullTagged, NullTagged), MatmulLayer>,
    pub(crate) path_cache: HashMap<LayerId, Arc<PathCountAnnotation>>,
    pub(crate) stats: CacheStats,
}

impl Manager {
    pub fn new() -> Self {
        let mut m = Manager::default();
        // Leaves are trivially minimal.
        let fork = m.intern_leaf(LevelZeroKind::Fork);
        let dc = m.intern_leaf(LevelZeroKind::DontCare);
        m.minimal.insert(fork);
        m.minimal.insert(dc);
        m
    }

    pub fn layer(&self, id: LayerId) -> &Layer {
        &self.layers[id.index()]
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn stats(&self) -> CacheStats {
        self.stats
    }

    /// Drops every memo table (the unique table is kept, so handles stay valid).
    pub fn clear_caches(&mut self) {
        self.pair_cache.clear();
        self.apply_cache.clear();
        self.kron_cache.clear();
        self.matmul_cache.clear();
        self.path_cache.clear();
    }

    pub fn intern_layer(&mut self, raw: RawLayer) -> Result<LayerId> {
        match raw {
            RawLayer::Leaf(kind) => Ok(self.intern_leaf(kind)),
            RawLayer::Internal { child, table } => self.intern_internal(child, table),
        }
    }

    pub fn intern_leaf(&mut self, kind: LevelZeroKind) -> LayerId {
        self.insert(0, kind.num_states(), LayerBody::Leaf(kind))
    }

    pub fn fork(&mut self) -> LayerId {
        self.intern_leaf(LevelZeroKind::Fork)
    }

    pub fn dont_care(&mut self) -> LayerId {
        self.intern_leaf(LevelZeroKind::DontCare)
    }

    pub fn intern_internal(&mut self, child: LayerId, table: TransitionTable) -> Result<LayerId> {
        let child_layer = self.layer(child);
        if table.side() != child_layer.num_states {
            return Err(TiddError::ArityMismatch {
                side: table.side(),
                child_states: child_layer.num_states,
            });
        }
        let num_states = table.check_canonical()? as usize;
        let level = child_layer.level + 1;
        Ok(self.insert(
            level,
            num_states,
            LayerBody::Internal {
                child,
                table: Arc::new(table),
            },
        ))
    }

    /// Interns a table already known to be in first-occurrence order with
    /// `num_states` distinct entries.
    pub(crate) fn intern_canonical(&mut self, child: LayerId, table: TransitionTable, num_states: usize) -> LayerId {
        debug_assert_eq!(table.check_canonical().ok(), Some(num_states as u32));
        debug_assert_eq!(table.side(), self.layer(child).num_states);
        let level = self.layer(child).level + 1;
        self.insert(
            level,
            num_states,
            LayerBody::Internal {
                child,
                table: Arc::new(table),
            },
        )
    }

    fn insert(&mut self, level: u32, num_states: usize, body: LayerBody) -> LayerId {
        if let Some(&id) = self.unique.get(&body) {
            return id;
        }
        let id = LayerId(u32::try_from(self.layers.len()).expect("layer table overflow"));
        self.layers.push(Layer {
            level,
            num_states,
            body: body.clone(),
        });
        self.unique.insert(body, id);
        id
    }

    /// Layers from `top` down to level 0, top first.
    pub fn stack(&self, top: LayerId) -> Vec<LayerId> {
        let mut out = vec![top];
        let mut cur = top;
        while let Some(c) = self.layer(cur).child() {
            out.push(c);
            cur = c;
        }
        out
    }
}
