//! Path counting (sizes of down-assignment languages) and weighted sampling
//! of assignments.

use std::sync::Arc;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Result, TiddError};
use crate::layer::{LayerBody, LayerId, LevelZeroKind};
use crate::manager::Manager;
use crate::tidd::Tidd;
use crate::value::Value;

/// Fractional bits used when turning irrational weights into integers for
/// the top-level draw.
const FIXED_BITS: u32 = 160;

/// Number of assignments reaching each state, for every layer of a stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathCountAnnotation {
    /// `levels[i][q]` = count of level-`i` state `q`.
    levels: Vec<Arc<[BigUint]>>,
}

impl PathCountAnnotation {
    pub fn level(&self, i: u32) -> &[BigUint] {
        &self.levels[i as usize]
    }

    pub fn top(&self) -> &[BigUint] {
        self.levels.last().expect("at least one level")
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }
}

/// Per-top-state sampling weights `V(q)·|L(q)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleWeights(pub Vec<Value>);

impl SampleWeights {
    pub fn total(&self) -> Value {
        self.0.iter().fold(Value::zero(), |acc, w| acc + w)
    }
}

impl Manager {
    pub fn path_counts(&mut self, f: &Tidd) -> Arc<PathCountAnnotation> {
        self.layer_path_counts(f.top())
    }

    fn layer_path_counts(&mut self, id: LayerId) -> Arc<PathCountAnnotation> {
        if let Some(p) = self.path_cache.get(&id) {
            return p.clone();
        }
        let ann = match self.layer(id).body().clone() {
            LayerBody::Leaf(LevelZeroKind::Fork) => PathCountAnnotation {
                levels: vec![vec![BigUint::one(), BigUint::one()].into()],
            },
            LayerBody::Leaf(LevelZeroKind::DontCare) => PathCountAnnotation {
                levels: vec![vec![BigUint::from(2u32)].into()],
            },
            LayerBody::Internal { child, table } => {
                let below = self.layer_path_counts(child);
                let c = below.top();
                let mut counts = vec![BigUint::zero(); self.layer(id).num_states()];
                let s = table.side();
                for a in 0..s {
                    for b in 0..s {
                        counts[table.get(a as u32, b as u32) as usize] += &c[a] * &c[b];
                    }
                }
                let mut levels = below.levels.clone();
                levels.push(counts.into());
                PathCountAnnotation { levels }
            }
        };
        let ann = Arc::new(ann);
        self.path_cache.insert(id, ann.clone());
        ann
    }

    pub fn sample_weights(&mut self, f: &Tidd) -> SampleWeights {
        let counts = self.path_counts(f);
        SampleWeights(
            f.values()
                .iter()
                .zip(counts.top())
                .map(|(v, c)| v * &Value::from_biguint(c))
                .collect(),
        )
    }

    /// `Σ_a f(a)` computed from the path counts.
    pub fn weighted_sum(&mut self, f: &Tidd) -> Value {
        self.sample_weights(f).total()
    }

    pub fn sampler(&mut self, f: &Tidd) -> Result<Sampler> {
        Sampler::new(self, f)
    }

    /// One assignment drawn with probability proportional to its value.
    /// Builds a fresh [`Sampler`]; use [`Manager::sampler`] for repeated draws.
    pub fn sample<R: Rng + ?Sized>(&mut self, f: &Tidd, rng: &mut R) -> Result<Vec<bool>> {
        Ok(self.sampler(f)?.sample(rng))
    }
}

/// Incoming transitions of one state with cumulative weights.
#[derive(Clone, Debug)]
struct Incoming {
    pairs: Vec<(u32, u32)>,
    cumulative: Vec<BigUint>,
}

impl Incoming {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (u32, u32) {
        draw_index(&self.cumulative, rng).map(|i| self.pairs[i]).expect("reachable state has incoming transitions")
    }
}

fn draw_index<R: Rng + ?Sized>(cumulative: &[BigUint], rng: &mut R) -> Option<usize> {
    let total = cumulative.last()?;
    if total.is_zero() {
        return None;
    }
    let x = rng.gen_biguint_below(total);
    Some(cumulative.partition_point(|c| c <= &x))
}

/// Precomputed tables for repeated sampling from one diagram.
#[derive(Clone, Debug)]
pub struct Sampler {
    top_cumulative: Vec<BigUint>,
    /// Internal layers from the top down; `incoming[d][q]`.
    incoming: Vec<Vec<Incoming>>,
    leaf: LevelZeroKind,
}

impl Sampler {
    pub fn new(m: &mut Manager, f: &Tidd) -> Result<Sampler> {
        if let Some(v) = f.values().iter().find(|v| v.is_negative()) {
            return Err(TiddError::NegativeWeight(v.to_string()));
        }
        let weights = m.sample_weights(f);
        let mut acc = BigUint::zero();
        let top_cumulative: Vec<BigUint> = weights
            .0
            .iter()
            .map(|w| {
                acc += w.to_fixed(FIXED_BITS);
                acc.clone()
            })
            .collect();
        if acc.is_zero() {
            return Err(TiddError::ZeroDistribution);
        }
        let counts = m.path_counts(f);
        let mut incoming = Vec::new();
        let mut leaf = LevelZeroKind::Fork;
        for id in m.stack(f.top()) {
            let layer = m.layer(id);
            match layer.body() {
                LayerBody::Leaf(k) => leaf = *k,
                LayerBody::Internal { table, .. } => {
                    let c = counts.level(layer.level() - 1);
                    let mut per_state = vec![
                        Incoming {
                            pairs: Vec::new(),
                            cumulative: Vec::new(),
                        };
                        layer.num_states()
                    ];
                    let s = table.side() as u32;
                    for a in 0..s {
                        for b in 0..s {
                            let inc = &mut per_state[table.get(a, b) as usize];
                            let w = &c[a as usize] * &c[b as usize];
                            let next = inc.cumulative.last().map_or(w.clone(), |last| last + &w);
                            inc.pairs.push((a, b));
                            inc.cumulative.push(next);
                        }
                    }
                    incoming.push(per_state);
                }
            }
        }
        Ok(Sampler {
            top_cumulative,
            incoming,
            leaf,
        })
    }

    pub fn num_vars(&self) -> usize {
        1usize << self.incoming.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        let q = draw_index(&self.top_cumulative, rng).expect("nonzero total") as u32;
        let mut out = Vec::with_capacity(self.num_vars());
        self.descend(0, q, rng, &mut out);
        out
    }

    fn descend<R: Rng + ?Sized>(&self, depth: usize, q: u32, rng: &mut R, out: &mut Vec<bool>) {
        if depth == self.incoming.len() {
            out.push(match self.leaf {
                LevelZeroKind::Fork => q == 1,
                LevelZeroKind::DontCare => rng.gen(),
            });
            return;
        }
        let (a, b) = self.incoming[depth][q as usize].draw(rng);
        self.descend(depth + 1, a, rng, out);
        self.descend(depth + 1, b, rng, out);
    }
}
