//! Constructors for constants, projections, truth tables and the analytic
//! families (Hadamard, equality, anti-diagonal).

use crate::error::{Result, TiddError};
use crate::layer::{LayerId, TransitionTable};
use crate::manager::Manager;
use crate::ops::BinaryOp;
use crate::tidd::Tidd;
use crate::value::Value;

/// Largest variable count accepted by [`Manager::from_truth_table`].
pub const TRUTH_TABLE_MAX_VARS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Hadamard,
    Equality,
    AntiDiagonal,
}

/// A member of one of the analytic families. `parameter` is the exponent `i`
/// for Hadamard/Equality (`2^i` variables) and the matrix side `n` for the
/// anti-diagonal function (`n²` variables).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FamilySpec {
    pub family: Family,
    pub parameter: usize,
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        if self.parameter < 1 {
            return Err(TiddError::InvalidParameter(format!(
                "{:?} parameter must be at least 1",
                self.family
            )));
        }
        if self.family == Family::AntiDiagonal && !self.parameter.is_power_of_two() {
            return Err(TiddError::NotPowerOfTwo(self.parameter));
        }
        Ok(())
    }
}

fn table(rows: &[[u32; 2]]) -> TransitionTable {
    TransitionTable::new_unchecked(rows.len(), rows.concat())
}

impl Manager {
    /// Chain of single-state layers over a DontCare leaf.
    pub fn no_distinction_proto(&mut self, level: u32) -> LayerId {
        let mut cur = self.dont_care();
        for _ in 0..level {
            cur = self.intern_canonical(cur, TransitionTable::new_unchecked(1, vec![0]), 1);
        }
        self.minimal.insert(cur);
        cur
    }

    pub fn constant(&mut self, level: u32, v: Value) -> Tidd {
        let top = self.no_distinction_proto(level);
        Tidd {
            top,
            level,
            values: vec![v].into(),
        }
    }

    pub fn false_tidd(&mut self, level: u32) -> Tidd {
        self.constant(level, Value::from_bool(false))
    }

    pub fn true_tidd(&mut self, level: u32) -> Tidd {
        self.constant(level, Value::from_bool(true))
    }

    /// `λ x_0 … x_{2^level - 1} . x_index`. At each level the two child
    /// states mean "the variable below reads 0 / 1"; the parent keeps the
    /// left child's state when the variable lies in the left half and the
    /// right child's otherwise.
    pub fn projection(&mut self, level: u32, index: usize) -> Result<Tidd> {
        let vars = 1usize << level;
        if index >= vars {
            return Err(TiddError::IndexOutOfRange { index, vars });
        }
        let top = self.projection_proto(level, index);
        Ok(Tidd {
            top,
            level,
            values: vec![Value::from_bool(false), Value::from_bool(true)].into(),
        })
    }

    fn projection_proto(&mut self, level: u32, index: usize) -> LayerId {
        if level == 0 {
            return self.fork();
        }
        let half = 1usize << (level - 1);
        let (child, t) = if index < half {
            (self.projection_proto(level - 1, index), table(&[[0, 0], [1, 1]]))
        } else {
            (self.projection_proto(level - 1, index - half), table(&[[0, 1], [0, 1]]))
        };
        let id = self.intern_canonical(child, t, 2);
        self.minimal.insert(id);
        id
    }

    /// Builds the canonical diagram for an explicit table of outputs, indexed
    /// by the assignment read as a big-endian integer.
    ///
    /// The unminimized automaton whose level-`i` states are all `2^{2^i}`
    /// strings is already total and in first-occurrence order (state of
    /// `u‖v` is `u·2^{|v|} + v`), so it is built directly and then reduced.
    pub fn from_truth_table(&mut self, level: u32, outputs: &[Value]) -> Result<Tidd> {
        let vars = 1usize << level;
        if vars > TRUTH_TABLE_MAX_VARS {
            return Err(TiddError::OracleScaleLimit {
                vars,
                limit: TRUTH_TABLE_MAX_VARS,
            });
        }
        let expected = 1usize << vars;
        if outputs.len() != expected {
            return Err(TiddError::TruthTableLengthMismatch {
                expected,
                got: outputs.len(),
            });
        }
        let mut cur = self.fork();
        let mut states = 2usize;
        for _ in 0..level {
            let entries: Vec<u32> = (0..(states * states) as u32).collect();
            cur = self.intern_canonical(cur, TransitionTable::new_unchecked(states, entries), states * states);
            states *= states;
        }
        Ok(self.finish(cur, outputs.to_vec()))
    }

    /// Hadamard matrix `H_{2^i}` over interleaved row/column variables,
    /// values `[1, -1]`.
    pub fn hadamard_family(&mut self, i: u32) -> Result<Tidd> {
        if i < 1 {
            return Err(TiddError::InvalidParameter("Hadamard exponent must be at least 1".into()));
        }
        let mut cur = self.fork();
        cur = self.intern_canonical(cur, table(&[[0, 0], [0, 1]]), 2);
        for _ in 1..i {
            cur = self.intern_canonical(cur, table(&[[0, 1], [1, 0]]), 2);
        }
        self.minimal.insert(cur);
        Ok(Tidd {
            top: cur,
            level: i,
            values: vec![Value::one(), Value::from_int(-1)].into(),
        })
    }

    /// `EQ_{2^l}` over interleaved variables: 1 iff every `x_j = y_j`.
    pub fn equality_relation(&mut self, l: u32) -> Result<Tidd> {
        if l < 1 {
            return Err(TiddError::InvalidParameter("equality exponent must be at least 1".into()));
        }
        let mut cur = self.fork();
        cur = self.intern_canonical(cur, table(&[[0, 1], [1, 0]]), 2);
        for _ in 1..l {
            cur = self.intern_canonical(cur, table(&[[0, 1], [1, 1]]), 2);
        }
        self.minimal.insert(cur);
        Ok(Tidd {
            top: cur,
            level: l,
            values: vec![Value::one(), Value::zero()].into(),
        })
    }

    /// Conjuncts of the anti-diagonal function `h_n` in row order: entry `i`
    /// tests that bit `n-1-i` of row `i` is 0.
    pub fn anti_diagonal_conjuncts(&mut self, n: usize) -> Result<Vec<Tidd>> {
        FamilySpec {
            family: Family::AntiDiagonal,
            parameter: n,
        }
        .validate()?;
        if n < 2 {
            return Err(TiddError::InvalidParameter("anti-diagonal side must be at least 2".into()));
        }
        let level = 2 * n.trailing_zeros();
        let t = self.true_tidd(level);
        (0..n)
            .map(|i| {
                let x = self.projection(level, i * n + n - 1 - i)?;
                self.apply(&BinaryOp::XOR, &x, &t)
            })
            .collect()
    }

    /// Prefix conjunctions `f_0 ∧ … ∧ f_s` for `s = 0..n`; the last one is `h_n`.
    pub fn anti_diagonal_prefixes(&mut self, n: usize) -> Result<Vec<Tidd>> {
        let conjuncts = self.anti_diagonal_conjuncts(n)?;
        let mut out: Vec<Tidd> = Vec::with_capacity(n);
        for f in conjuncts {
            let next = match out.last() {
                None => f,
                Some(acc) => self.apply(&BinaryOp::AND, acc, &f)?,
            };
            out.push(next);
        }
        Ok(out)
    }

    /// `h_n`: 1 iff every anti-diagonal entry of the row-major `n×n` Boolean
    /// matrix is 0.
    pub fn anti_diagonal(&mut self, n: usize) -> Result<Tidd> {
        Ok(self.anti_diagonal_prefixes(n)?.pop().expect("n >= 2"))
    }

    pub fn build_family(&mut self, spec: FamilySpec) -> Result<Tidd> {
        spec.validate()?;
        match spec.family {
            Family::Hadamard => self.hadamard_family(spec.parameter as u32),
            Family::Equality => self.equality_relation(spec.parameter as u32),
            Family::AntiDiagonal => self.anti_diagonal(spec.parameter),
        }
    }
}
