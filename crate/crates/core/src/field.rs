//! Exact scalar arithmetic: arbitrary-precision rationals or a prime field.
//!
//! Every computation in this crate is an identity check, so rounding is not
//! an option.  The field is fixed per session: either `Q` (rationals backed
//! by `BigRational`) or `Fp { p }` for a prime `p`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;

use crate::error::Error;

/// The active ground field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Q,
    Fp { p: u64 },
}

/// An exact scalar in the active field.
///
/// `Fp` residues are stored reduced, in `0..p`; the modulus lives in the
/// [`Field`] handle, not in the scalar.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp(u64),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn fp(p: u64) -> Result<Field, Error> {
        if !is_prime(p) {
            return Err(Error::NonPrimeModulus(p));
        }
        Ok(Field::Fp { p })
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Q => Scalar::Q(BigRational::zero()),
            Field::Fp { .. } => Scalar::Fp(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Q => Scalar::Q(BigRational::one()),
            Field::Fp { .. } => Scalar::Fp(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Q => Scalar::Q(BigRational::from(BigInt::from(n))),
            Field::Fp { p } => {
                let r = n.rem_euclid(*p as i64);
                Scalar::Fp(r as u64)
            }
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp(r) => *r == 0,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Q, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            (Field::Fp { p }, Scalar::Fp(x), Scalar::Fp(y)) => {
                Scalar::Fp(((*x as u128 + *y as u128) % *p as u128) as u64)
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Q, Scalar::Q(x)) => Scalar::Q(-x),
            (Field::Fp { p }, Scalar::Fp(x)) => Scalar::Fp(if *x == 0 { 0 } else { p - x }),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Q, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            (Field::Fp { p }, Scalar::Fp(x), Scalar::Fp(y)) => {
                Scalar::Fp(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Scalar {
        assert!(!self.is_zero(a), "inverse of zero");
        match (self, a) {
            (Field::Q, Scalar::Q(x)) => Scalar::Q(x.recip()),
            (Field::Fp { p }, Scalar::Fp(x)) => Scalar::Fp(pow_mod(*x, p - 2, *p)),
            _ => panic!("scalar/field mismatch"),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.mul(a, &self.inv(b))
    }

    /// Parse a scalar literal: `"num/den"` or `"num"` over Q, an integer over Fp.
    pub fn parse(&self, s: &str) -> Result<Scalar, Error> {
        match self {
            Field::Q => {
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let n: BigInt = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::MalformedScalar(s.to_string()))?;
                let d: BigInt = den
                    .trim()
                    .parse()
                    .map_err(|_| Error::MalformedScalar(s.to_string()))?;
                if d.is_zero() {
                    return Err(Error::MalformedScalar(s.to_string()));
                }
                Ok(Scalar::Q(BigRational::new(n, d)))
            }
            Field::Fp { p } => {
                let n: i64 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::MalformedScalar(s.to_string()))?;
                Ok(Scalar::Fp(n.rem_euclid(*p as i64) as u64))
            }
        }
    }

    pub fn format(&self, a: &Scalar) -> String {
        match a {
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    format!("{}", r.numer())
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp(x) => format!("{x}"),
        }
    }

    /// Sign (-1)^k as a scalar.
    pub fn sign(&self, k: usize) -> Scalar {
        if k % 2 == 0 {
            self.one()
        } else {
            self.neg(&self.one())
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp(x) => write!(f, "{x}"),
        }
    }
}

impl Scalar {
    /// True for rationals with |value| representable; used only in reports.
    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp(x) => *x == 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_negative(),
            Scalar::Fp(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_q() {
        let k = Field::Q;
        let a = k.parse("3/7").unwrap();
        assert!(k.is_zero(&k.add(&a, &k.neg(&a))));
        assert_eq!(k.mul(&a, &k.inv(&a)), k.one());
    }

    #[test]
    fn field_axioms_fp() {
        let k = Field::fp(101).unwrap();
        for x in 1..101i64 {
            let a = k.from_i64(x);
            assert!(k.is_zero(&k.add(&a, &k.neg(&a))));
            assert_eq!(k.mul(&a, &k.inv(&a)), k.one());
        }
    }

    #[test]
    fn non_prime_rejected() {
        assert!(Field::fp(15).is_err());
        assert!(Field::fp(1).is_err());
        assert!(Field::fp(2).is_ok());
    }

    #[test]
    fn parse_round_trip() {
        let k = Field::Q;
        let a = k.parse("-5/3").unwrap();
        assert_eq!(k.format(&a), "-5/3");
        let b = k.parse("4").unwrap();
        assert_eq!(k.format(&b), "4");
        assert!(k.parse("1/0").is_err());
        assert!(k.parse("x").is_err());
    }
}
