//! Tree-automata inspired decision diagrams (TIDDs).
//!
//! A TIDD represents a function `{0,1}^{2^l} → D` as a leveled, deterministic,
//! bottom-up tree automaton over the perfect binary tree of the assignment.
//! Level `i` holds the states reachable on length-`2^i` substrings; each
//! level's transition table maps a (left, right) pair of child states to a
//! parent state, and the top states carry distinct values. Tables are kept in
//! first-occurrence order and minimal, so each function has exactly one
//! representation and equality is a handle comparison.
//!
//! All layers live in a [`Manager`], which also owns the operation caches.
//!
//! ```
//! use tidd::{Manager, Value};
//!
//! let mut m = Manager::new();
//! let h = m.hadamard_family(1).unwrap();
//! assert_eq!(m.evaluate(&h, &[true, true]).unwrap(), Value::from_int(-1));
//! let h4 = m.kronecker(&h, &h).unwrap();
//! assert_eq!(h4, m.hadamard_family(2).unwrap());
//! ```

pub mod analysis;
pub mod bench;
pub mod builders;
pub mod error;
pub mod layer;
pub mod linalg;
pub mod manager;
pub mod ops;
pub mod oracle;
pub mod tidd;
pub mod value;

pub use analysis::{PathCountAnnotation, SampleWeights, Sampler};
pub use builders::{Family, FamilySpec};
pub use error::{Result, TiddError};
pub use layer::{Layer, LayerBody, LayerId, LevelZeroKind, TransitionTable};
pub use linalg::{MatrixTidd, TripleSum, VectorTidd};
pub use manager::{CacheStats, Manager, RawLayer};
pub use ops::{canonical_renumber, BinaryOp, PairProduct, ReductionMap, Reduced, Renumbering};
pub use tidd::{SizeReport, Tidd, ValidationReport, Violation};
pub use value::Value;
