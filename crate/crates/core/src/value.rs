//! Exact scalars of the form `(a + b·√2) / 2^k`.
//!
//! Every value is kept in a canonical form so that structural equality and
//! hashing coincide with numeric equality: while `k > 0` and both `a` and `b`
//! are even, the triple is halved. Zero is always `(0, 0, 0)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Value {
    a: BigInt,
    b: BigInt,
    k: u32,
}

impl Value {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, k: u32) -> Self {
        let mut v = Value {
            a: a.into(),
            b: b.into(),
            k,
        };
        v.normalize();
        v
    }

    pub fn zero() -> Self {
        Value::from_int(0)
    }

    pub fn one() -> Self {
        Value::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Value {
            a: BigInt::from(n),
            b: BigInt::zero(),
            k: 0,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        Value::from_int(b as i64)
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        Value {
            a: BigInt::from_biguint(Sign::Plus, n.clone()),
            b: BigInt::zero(),
            k: 0,
        }
    }

    /// `1/√2`, written canonically as `√2 / 2`.
    pub fn inv_sqrt2() -> Self {
        Value::new(0, 1, 1)
    }

    pub fn sqrt2() -> Self {
        Value::new(0, 1, 0)
    }

    /// `2^-e`.
    pub fn pow2_inv(e: u32) -> Self {
        Value::new(1, 0, e)
    }

    pub fn rational_part(&self) -> &BigInt {
        &self.a
    }

    pub fn sqrt2_part(&self) -> &BigInt {
        &self.b
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    /// The canonical `(a, b, k)` triple as decimal strings.
    pub fn triple(&self) -> (String, String, u32) {
        (self.a.to_string(), self.b.to_string(), self.k)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_boolean(&self) -> bool {
        self.as_bool().is_some()
    }

    pub fn as_bool(&self) -> Option<bool> {
        if !self.b.is_zero() || self.k != 0 {
            return None;
        }
        if self.a.is_zero() {
            Some(false)
        } else if self.a.is_one() {
            Some(true)
        } else {
            None
        }
    }

    /// Sign of the real number denoted, computed exactly.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.sign();
        let sb = self.b.sign();
        match (sa, sb) {
            (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
            (Sign::NoSign, s) | (s, Sign::NoSign) | (s @ Sign::Plus, Sign::Plus) | (s @ Sign::Minus, Sign::Minus) => {
                if s == Sign::Plus {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            (Sign::Plus, Sign::Minus) | (Sign::Minus, Sign::Plus) => {
                // a + b√2 has the sign of whichever of a², 2b² dominates.
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * 2;
                let a_wins = a2 > b2;
                match (sa, a_wins) {
                    (Sign::Plus, true) | (Sign::Minus, false) => Ordering::Greater,
                    _ => Ordering::Less,
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// `|v|²`; values are real so this is `v · v`.
    pub fn norm_sqr(&self) -> Value {
        self * self
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.a.bits().max(self.b.bits());
        let shift = bits.saturating_sub(60);
        let a = (&self.a >> shift).to_f64().unwrap_or(0.0);
        let b = (&self.b >> shift).to_f64().unwrap_or(0.0);
        let scale = shift as i64 - self.k as i64;
        (a + b * std::f64::consts::SQRT_2) * 2f64.powi(scale.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Fixed-point approximation `floor(v · 2^frac_bits)` for a nonnegative value.
    pub(crate) fn to_fixed(&self, frac_bits: u32) -> BigUint {
        debug_assert!(!self.is_negative());
        // √2·b·2^f = sign(b)·sqrt(2·b²·4^f)
        let scaled_a = &self.a << frac_bits;
        let b_mag = self.b.magnitude();
        let root = ((b_mag * b_mag * 2u32) << (2 * frac_bits)).sqrt();
        let b_term = BigInt::from_biguint(self.b.sign(), root);
        let total: BigInt = (scaled_a + b_term) >> self.k;
        total.to_biguint().unwrap_or_default()
    }

    fn normalize(&mut self) {
        if self.a.is_zero() && self.b.is_zero() {
            self.k = 0;
            return;
        }
        if self.k == 0 {
            return;
        }
        let tz_a = self.a.trailing_zeros().unwrap_or(u64::MAX);
        let tz_b = self.b.trailing_zeros().unwrap_or(u64::MAX);
        let shift = tz_a.min(tz_b).min(self.k as u64);
        if shift > 0 {
            self.a >>= shift;
            self.b >>= shift;
            self.k -= shift as u32;
        }
    }

    fn aligned(&self, k: u32) -> (BigInt, BigInt) {
        let s = k - self.k;
        (&self.a << s, &self.b << s)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::from_int(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::from_bool(b)
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        let k = self.k.max(rhs.k);
        let (a1, b1) = self.aligned(k);
        let (a2, b2) = rhs.aligned(k);
        Value::new(a1 + a2, b1 + b2, k)
    }
}

impl Sub for &Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        self + &(-rhs)
    }
}

impl Mul for &Value {
    type Output = Value;
    fn mul(self, rhs: &Value) -> Value {
        if self.is_zero() || rhs.is_zero() {
            return Value::zero();
        }
        let a = &self.a * &rhs.a + (&self.b * &rhs.b) * 2;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Value::new(a, b, self.k + rhs.k)
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        Value {
            a: -&self.a,
            b: -&self.b,
            k: self.k,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Value {
            type Output = Value;
            fn $m(self, rhs: Value) -> Value {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Value> for Value {
            type Output = Value;
            fn $m(self, rhs: &Value) -> Value {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        -&self
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Value({self})")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let numer = match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => self.a.to_string(),
            (true, false) => format!("{}√2", self.b),
            (false, false) => {
                let sign = if self.b.is_negative() { '-' } else { '+' };
                format!("({}{}{}√2)", self.a, sign, self.b.abs())
            }
        };
        if self.k == 0 {
            write!(f, "{numer}")
        } else {
            write!(f, "{numer}/2^{}", self.k)
        }
    }
}
