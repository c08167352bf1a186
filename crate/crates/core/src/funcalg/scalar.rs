//! Scalar fields used for every coefficient in the library.
//!
//! Three variants are supported: exact rationals, exact Gaussian rationals
//! `p/q + i r/s`, and complex doubles. Rationals and Gaussian rationals mix
//! freely (both are exact); mixing either with a float is an error.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Which field a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Rational,
    Gaussian,
    Float,
}

impl ScalarKind {
    pub fn is_exact(self) -> bool {
        !matches!(self, ScalarKind::Float)
    }

    /// The smallest kind holding both operands. Exact and float never unify.
    pub fn unify(self, other: ScalarKind) -> Result<ScalarKind> {
        use ScalarKind::*;
        match (self, other) {
            (Float, Float) => Ok(Float),
            (Float, _) | (_, Float) => Err(Error::MixedScalars),
            (Rational, Rational) => Ok(Rational),
            _ => Ok(Gaussian),
        }
    }

    /// Unify two optional kinds; `None` stands for "no coefficients yet".
    pub fn unify_opt(a: Option<ScalarKind>, b: Option<ScalarKind>) -> Result<Option<ScalarKind>> {
        match (a, b) {
            (Some(x), Some(y)) => x.unify(y).map(Some),
            (x, None) => Ok(x),
            (None, y) => Ok(y),
        }
    }
}

/// A field element.
///
/// `Gauss` never carries a zero imaginary part; such values are demoted to
/// `Rat` so that equality stays syntactic.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rat(BigRational),
    Gauss(BigRational, BigRational),
    Float(Complex64),
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl Scalar {
    pub fn rat(p: i64, q: i64) -> Scalar {
        Scalar::Rat(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Rat(big(n))
    }

    pub fn gauss(re: BigRational, im: BigRational) -> Scalar {
        if im.is_zero() {
            Scalar::Rat(re)
        } else {
            Scalar::Gauss(re, im)
        }
    }

    pub fn float(re: f64, im: f64) -> Scalar {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn zero(kind: ScalarKind) -> Scalar {
        Scalar::from_int(kind, 0)
    }

    pub fn one(kind: ScalarKind) -> Scalar {
        Scalar::from_int(kind, 1)
    }

    pub fn from_int(kind: ScalarKind, n: i64) -> Scalar {
        match kind {
            ScalarKind::Float => Scalar::float(n as f64, 0.0),
            _ => Scalar::int(n),
        }
    }

    pub fn ratio(kind: ScalarKind, p: i64, q: i64) -> Scalar {
        match kind {
            ScalarKind::Float => Scalar::float(p as f64 / q as f64, 0.0),
            _ => Scalar::rat(p, q),
        }
    }

    /// The imaginary unit in the given kind (rationals promote to Gaussian).
    pub fn i(kind: ScalarKind) -> Scalar {
        match kind {
            ScalarKind::Float => Scalar::float(0.0, 1.0),
            _ => Scalar::Gauss(BigRational::zero(), BigRational::one()),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Rat(_) => ScalarKind::Rational,
            Scalar::Gauss(..) => ScalarKind::Gaussian,
            Scalar::Float(_) => ScalarKind::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.kind().is_exact()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.is_zero(),
            Scalar::Gauss(..) => false,
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.is_one(),
            Scalar::Gauss(..) => false,
            Scalar::Float(z) => z.re == 1.0 && z.im == 0.0,
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Rat(_) => true,
            Scalar::Gauss(..) => false,
            Scalar::Float(z) => z.im == 0.0,
        }
    }

    /// Magnitude as a double; used for residual reporting and tolerances.
    pub fn abs_f64(&self) -> f64 {
        match self {
            Scalar::Rat(q) => rat_to_f64(&q.abs()),
            Scalar::Gauss(a, b) => rat_to_f64(a).hypot(rat_to_f64(b)),
            Scalar::Float(z) => z.norm(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Rat(q) => Complex64::new(rat_to_f64(q), 0.0),
            Scalar::Gauss(a, b) => Complex64::new(rat_to_f64(a), rat_to_f64(b)),
            Scalar::Float(z) => *z,
        }
    }

    /// Re-express an exact value as a float; floats pass through.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_complex())
    }

    fn gauss_parts(&self) -> (BigRational, BigRational) {
        match self {
            Scalar::Rat(q) => (q.clone(), BigRational::zero()),
            Scalar::Gauss(a, b) => (a.clone(), b.clone()),
            Scalar::Float(_) => unreachable!("float has no exact parts"),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a + b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a + b)),
            (Scalar::Float(_), _) | (_, Scalar::Float(_)) => Err(Error::MixedScalars),
            _ => {
                let (a, b) = self.gauss_parts();
                let (c, d) = other.gauss_parts();
                Ok(Scalar::gauss(a + c, b + d))
            }
        }
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a * b)),
            (Scalar::Float(_), _) | (_, Scalar::Float(_)) => Err(Error::MixedScalars),
            _ => {
                let (a, b) = self.gauss_parts();
                let (c, d) = other.gauss_parts();
                Ok(Scalar::gauss(&a * &c - &b * &d, &a * &d + &b * &c))
            }
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        let inv = other.inv()?;
        self.checked_mul(&inv)
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rat(q) => Scalar::Rat(q.recip()),
            Scalar::Gauss(a, b) => {
                let n = a * a + b * b;
                Scalar::gauss(a / &n, -(b / &n))
            }
            Scalar::Float(z) => Scalar::Float(z.inv()),
        })
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Rat(q) => Scalar::Rat(-q),
            Scalar::Gauss(a, b) => Scalar::Gauss(-a, -b),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }

    /// Multiply by the imaginary unit.
    pub fn mul_i(&self) -> Scalar {
        match self {
            Scalar::Rat(q) => Scalar::gauss(BigRational::zero(), q.clone()),
            Scalar::Gauss(a, b) => Scalar::gauss(-b, a.clone()),
            Scalar::Float(z) => Scalar::Float(Complex64::new(-z.im, z.re)),
        }
    }

    pub fn scale_int(&self, n: i64) -> Scalar {
        match self {
            Scalar::Rat(q) => Scalar::Rat(q * big(n)),
            Scalar::Gauss(a, b) => Scalar::gauss(a * big(n), b * big(n)),
            Scalar::Float(z) => Scalar::Float(z * n as f64),
        }
    }

    /// Multiply by the rational `p/q`, preserving the kind.
    pub fn scale_ratio(&self, p: i64, q: i64) -> Scalar {
        let r = BigRational::new(BigInt::from(p), BigInt::from(q));
        match self {
            Scalar::Rat(x) => Scalar::Rat(x * &r),
            Scalar::Gauss(a, b) => Scalar::gauss(a * &r, b * &r),
            Scalar::Float(z) => Scalar::Float(z * (p as f64 / q as f64)),
        }
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one(self.kind());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Compare two real scalars. Complex or mixed inputs are rejected.
    pub fn real_cmp(&self, other: &Scalar) -> Result<Ordering> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(a.cmp(b)),
            (Scalar::Float(a), Scalar::Float(b)) if a.im == 0.0 && b.im == 0.0 => {
                a.re.partial_cmp(&b.re).ok_or(Error::NotReal)
            }
            (Scalar::Float(_), Scalar::Rat(_)) | (Scalar::Rat(_), Scalar::Float(_)) => {
                Err(Error::MixedScalars)
            }
            _ => Err(Error::NotReal),
        }
    }

    /// `|self - other| <= tol`, with exact comparison for exact operands.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match self.checked_sub(other) {
            Ok(d) if d.is_exact() => d.is_zero(),
            Ok(d) => d.abs_f64() <= tol,
            Err(_) => (self.to_complex() - other.to_complex()).norm() <= tol,
        }
    }

    /// `e^{i k t}` for a real point `t`.
    ///
    /// In exact kinds only the trivially exact cases (`k = 0` or `t = 0`) are
    /// representable; anything else is `Error::NotExact`.
    pub fn exp_i(k: i64, t: &Scalar) -> Result<Scalar> {
        match t {
            Scalar::Float(z) => Ok(Scalar::Float(Complex64::from_polar(1.0, k as f64 * z.re))),
            _ if k == 0 || t.is_zero() => Ok(Scalar::one(t.kind())),
            _ => Err(Error::NotExact(format!("e^({k}i t) at t = {t}"))),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(q) => write!(f, "{q}"),
            Scalar::Gauss(a, b) => write!(f, "({a} + {b}i)"),
            Scalar::Float(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Scalar::Float(z) => write!(f, "({} + {}i)", z.re, z.im),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses `"p"` or `"p/q"` into an exact rational.
    fn from_str(s: &str) -> Result<Scalar> {
        BigRational::from_str(s.trim())
            .map(Scalar::Rat)
            .map_err(|_| Error::NotExact(format!("cannot parse {s:?} as p/q")))
    }
}

// Operator sugar. These assume compatible kinds (internal code checks kinds
// at function boundaries) and panic on exact/float mixing.
macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("mixed exact and floating-point scalars")
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_binop!(Add, add, checked_add);
scalar_binop!(Sub, sub, checked_sub);
scalar_binop!(Mul, mul, checked_mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Rat { rat: String },
    Gauss { gauss: [String; 2] },
    Float { f64re: f64, f64im: f64 },
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Scalar::Rat(q) => ScalarRepr::Rat { rat: q.to_string() },
            Scalar::Gauss(a, b) => ScalarRepr::Gauss {
                gauss: [a.to_string(), b.to_string()],
            },
            Scalar::Float(z) => ScalarRepr::Float {
                f64re: z.re,
                f64im: z.im,
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Scalar, D::Error> {
        use serde::de::Error as _;
        match ScalarRepr::deserialize(deserializer)? {
            ScalarRepr::Rat { rat } => rat.parse().map_err(D::Error::custom),
            ScalarRepr::Gauss { gauss: [a, b] } => {
                let a = BigRational::from_str(&a).map_err(D::Error::custom)?;
                let b = BigRational::from_str(&b).map_err(D::Error::custom)?;
                Ok(Scalar::gauss(a, b))
            }
            ScalarRepr::Float { f64re, f64im } => Ok(Scalar::float(f64re, f64im)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixing_exact_and_float_is_an_error() {
        let a = Scalar::rat(1, 2);
        let b = Scalar::float(0.5, 0.0);
        assert!(matches!(a.checked_add(&b), Err(Error::MixedScalars)));
        assert!(matches!(b.checked_mul(&a), Err(Error::MixedScalars)));
        assert!(ScalarKind::Rational.unify(ScalarKind::Float).is_err());
    }

    #[test]
    fn rational_and_gaussian_promote() {
        let i = Scalar::i(ScalarKind::Rational);
        let sq = &i * &i;
        assert_eq!(sq, Scalar::int(-1));
        assert_eq!(sq.kind(), ScalarKind::Rational);
        let z = Scalar::rat(1, 3) + i.clone();
        assert_eq!(z.kind(), ScalarKind::Gaussian);
        assert_eq!(z.inv().unwrap() * z, Scalar::int(1));
    }

    #[test]
    fn exp_i_exactness() {
        assert_eq!(Scalar::exp_i(3, &Scalar::int(0)).unwrap(), Scalar::int(1));
        assert!(Scalar::exp_i(1, &Scalar::rat(1, 2)).is_err());
        let v = Scalar::exp_i(2, &Scalar::float(std::f64::consts::FRAC_PI_4, 0.0)).unwrap();
        assert!(v.approx_eq(&Scalar::float(0.0, 1.0), 1e-15));
    }

    #[test]
    fn json_forms() {
        let s = serde_json::to_string(&Scalar::rat(-3, 6)).unwrap();
        assert_eq!(s, r#"{"rat":"-1/2"}"#);
        let g: Scalar = serde_json::from_str(r#"{"gauss":["1/2","3"]}"#).unwrap();
        assert_eq!(g, Scalar::gauss(BigRational::new(1.into(), 2.into()), big(3)));
        let f: Scalar = serde_json::from_str(r#"{"f64re":1.5,"f64im":-2.0}"#).unwrap();
        assert_eq!(f, Scalar::float(1.5, -2.0));
    }
}
