//! Exact coefficient fields: the rationals and prime fields.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// The coefficient field of an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Rationals,
    /// Integers modulo an odd prime.
    Prime(u64),
}

impl Field {
    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Fp(n.rem_euclid(p as i64) as u64, p),
        }
    }

    /// `num/den` reduced into the field. Fails when `den` vanishes in the field.
    pub fn fraction(self, num: &BigInt, den: &BigInt) -> Option<Scalar> {
        match self {
            Field::Rationals => {
                if den.is_zero() {
                    None
                } else {
                    Some(Scalar::Q(BigRational::new(num.clone(), den.clone())))
                }
            }
            Field::Prime(p) => {
                let m = BigInt::from(p);
                let reduce = |x: &BigInt| {
                    let r = ((x % &m) + &m) % &m;
                    r.to_u64().expect("residue fits in u64")
                };
                let d = reduce(den);
                if d == 0 {
                    return None;
                }
                let n = Scalar::Fp(reduce(num), p);
                Some(n.div(&Scalar::Fp(d, p)))
            }
        }
    }

    pub fn is_prime_field(self) -> bool {
        matches!(self, Field::Prime(_))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp {p}"),
        }
    }
}

/// An exact field element. Mixing elements of different fields is a logic
/// error and panics.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Scalar {
    Q(BigRational),
    Fp(u64, u64),
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rationals,
            Scalar::Fp(_, p) => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp(v, _) => *v == 1,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) if p == q => Scalar::Fp((a + b) % p, *p),
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp(a, p) => Scalar::Fp((p - a) % p, *p),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) if p == q => Scalar::Fp(mulmod(*a, *b, *p), *p),
            _ => panic!("scalar field mismatch"),
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            Scalar::Fp(a, p) => Scalar::Fp(powmod(*a, p - 2, *p), *p),
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self.mul(&other.inv())
    }

    /// Multiplies by a small integer.
    pub fn mul_int(&self, n: i64) -> Scalar {
        self.mul(&self.field().from_i64(n))
    }

    /// Multiplies by `(-1)^k` when `negate` is set.
    pub fn signed(&self, negate: bool) -> Scalar {
        if negate {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// True when the canonical printed form starts with a minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_negative(),
            Scalar::Fp(..) => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Fp(v, _) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let q = Field::Rationals;
        let x = q.fraction(&BigInt::from(6), &BigInt::from(-4)).unwrap();
        assert_eq!(x.to_string(), "-3/2");
        let y = x.add(&q.fraction(&BigInt::from(1), &BigInt::from(2)).unwrap());
        assert_eq!(y.to_string(), "-1");
        assert!(q.fraction(&BigInt::from(1), &BigInt::from(0)).is_none());
    }

    #[test]
    fn prime_field_inverse() {
        let f = Field::Prime(7);
        for a in 1..7 {
            let x = f.from_i64(a);
            assert!(x.mul(&x.inv()).is_one());
        }
        assert_eq!(f.from_i64(-1).to_string(), "6");
        assert!(f.fraction(&BigInt::from(3), &BigInt::from(14)).is_none());
        assert_eq!(f.fraction(&BigInt::from(1), &BigInt::from(2)).unwrap(), f.from_i64(4));
    }
}
