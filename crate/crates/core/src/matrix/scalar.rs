use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exactnum::ntheory::{is_power_of_two, reduce};
use crate::exactnum::{CycNum, CycRing};

/// Which scalar arithmetic a matrix is built over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(Error::InvalidParams(format!("unknown backend {other:?}"))),
        }
    }
}

/// A concrete scalar field: an exact cyclotomic ring of a given order, or `ℂ` in `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Exact(CycRing),
    Float,
}

impl Field {
    /// The field a construction over `ω_root` lives in for the chosen backend.
    ///
    /// Power-of-two roots are embedded into order `max(root, 8)` so that `√2` is available.
    pub fn for_root(backend: Backend, root: u64) -> Result<Self> {
        match backend {
            Backend::Float => Ok(Field::Float),
            Backend::Exact => {
                let order = if is_power_of_two(root) { root.max(8) } else { root };
                Ok(Field::Exact(CycRing::new(order)?))
            }
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Field::Exact(_) => Backend::Exact,
            Field::Float => Backend::Float,
        }
    }
}

/// A single matrix entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(CycNum),
    Float(Complex64),
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_) => Backend::Float,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(x) => x.to_complex(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(x) => x.is_zero(),
            Scalar::Float(z) => *z == Complex64::new(0.0, 0.0),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(x) => Scalar::Exact(x.conj()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a.try_mul(b)?)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a * b)),
            _ => Err(Error::BackendMismatch),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a.try_add(b)?)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a + b)),
            _ => Err(Error::BackendMismatch),
        }
    }

    /// Exact equality on the exact backend, `|a − b| ≤ tol` on the float backend.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> Result<bool> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(a == b),
            (Scalar::Float(a), Scalar::Float(b)) => Ok((a - b).norm() <= tol),
            _ => Err(Error::BackendMismatch),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(x) => write!(f, "{x}"),
            Scalar::Float(z) => write_complex(f, *z),
        }
    }
}

pub fn write_complex(f: &mut impl fmt::Write, z: Complex64) -> fmt::Result {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        write!(f, "{re:.6}")
    } else if re == 0.0 {
        write!(f, "{im:.6}i")
    } else if im < 0.0 {
        write!(f, "{re:.6}-{:.6}i", -im)
    } else {
        write!(f, "{re:.6}+{im:.6}i")
    }
}

/// Symbolic entry `2^(−half_log2/2) · Σ c·ω_root^e`.
///
/// Constructors describe their matrices through this type so that the exact and the
/// float backend evaluate the same formula along independent paths.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSum {
    root: u64,
    half_log2: i32,
    terms: SmallVec<[(i64, i64); 4]>,
}

impl RootSum {
    pub fn zero(root: u64) -> Self {
        Self {
            root,
            half_log2: 0,
            terms: SmallVec::new(),
        }
    }

    /// `ω_root^e`.
    pub fn root(root: u64, e: i64) -> Self {
        Self::zero(root).plus(1, e)
    }

    /// Adds `c · ω_root^e`.
    pub fn plus(mut self, c: i64, e: i64) -> Self {
        if c != 0 {
            self.terms.push((c, e));
        }
        self
    }

    /// Multiplies by `2^(−h/2)`.
    pub fn over_sqrt2_pow(mut self, h: i32) -> Self {
        self.half_log2 += h;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Writes coefficients into `out` (length `ring.phi()`) and returns the power-of-two scale.
    pub(crate) fn realize_into(&self, ring: &CycRing, out: &mut [i64]) -> Result<i32> {
        out.iter_mut().for_each(|c| *c = 0);
        if self.terms.is_empty() {
            return Ok(0);
        }
        let order = ring.order();
        let stride = if order % self.root == 0 && (ring.is_power_of_two() || order == self.root) {
            (order / self.root) as i64
        } else {
            return Err(Error::OrderMismatch {
                left: self.root,
                right: order,
            });
        };
        for &(c, e) in &self.terms {
            ring.add_root(c, reduce(e, self.root) as i64 * stride, out);
        }
        if self.half_log2.rem_euclid(2) == 0 {
            Ok(self.half_log2.div_euclid(2))
        } else {
            let s2 = ring.sqrt2_coeffs()?;
            let base = out.to_vec();
            out.iter_mut().for_each(|c| *c = 0);
            ring.mul_acc(&base, &s2, out);
            Ok((self.half_log2 + 1).div_euclid(2))
        }
    }

    pub fn to_cyc(&self, ring: &CycRing) -> Result<CycNum> {
        let mut coeffs = vec![0; ring.phi()];
        let t = self.realize_into(ring, &mut coeffs)?;
        Ok(CycNum::from_parts(*ring, coeffs, t))
    }

    /// Direct floating evaluation; `table[k] = e^(2πik/root)` when supplied.
    pub fn to_complex_with(&self, table: Option<&[Complex64]>) -> Complex64 {
        let sum: Complex64 = self
            .terms
            .iter()
            .map(|&(c, e)| {
                let k = reduce(e, self.root) as usize;
                let w = match table {
                    Some(t) => t[k],
                    None => Complex64::from_polar(1.0, TAU * k as f64 / self.root as f64),
                };
                w * c as f64
            })
            .sum();
        sum * 2f64.powf(-(self.half_log2 as f64) / 2.0)
    }

    pub fn to_scalar(&self, field: &Field) -> Result<Scalar> {
        match field {
            Field::Exact(ring) => Ok(Scalar::Exact(self.to_cyc(ring)?)),
            Field::Float => Ok(Scalar::Float(self.to_complex_with(None))),
        }
    }

    pub fn root_order(&self) -> u64 {
        self.root
    }
}

/// `e^(2πik/root)` for `k` in `0..root`.
pub(crate) fn root_table(root: u64) -> Vec<Complex64> {
    (0..root)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / root as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_sqrt2_is_exact() {
        let ring = CycRing::new(8).unwrap();
        let x = RootSum::root(2, 0).over_sqrt2_pow(1).to_cyc(&ring).unwrap();
        assert_eq!(&x * &x, CycNum::one(8).unwrap().scale_pow2(1));
        let z = RootSum::root(2, 1).over_sqrt2_pow(1).to_complex_with(None);
        assert!((z - Complex64::new(-(0.5f64.sqrt()), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn field_selection() {
        assert_eq!(
            Field::for_root(Backend::Exact, 2).unwrap(),
            Field::Exact(CycRing::new(8).unwrap())
        );
        assert_eq!(
            Field::for_root(Backend::Exact, 16).unwrap(),
            Field::Exact(CycRing::new(16).unwrap())
        );
        assert_eq!(
            Field::for_root(Backend::Exact, 5).unwrap(),
            Field::Exact(CycRing::new(5).unwrap())
        );
        assert!(Field::for_root(Backend::Exact, 6).is_err());
    }

    #[test]
    fn incompatible_root_is_rejected() {
        let ring = CycRing::new(8).unwrap();
        assert!(RootSum::root(5, 1).to_cyc(&ring).is_err());
        assert!(RootSum::root(16, 1).to_cyc(&ring).is_err());
    }
}
