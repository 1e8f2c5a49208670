//! Exact arithmetic in cyclotomic rings `ℤ[ω_M]`, scaled by powers of two.
//!
//! Two families of orders are supported:
//!
//! * `M = 2^m`: power basis `1, ω, …, ω^(M/2 − 1)` with the negacyclic rule
//!   `ω^(M/2) = −1`;
//! * `M = p` an odd prime: power basis `1, ω, …, ω^(p − 2)` with
//!   `ω^(p − 1) = −(1 + ω + … + ω^(p − 2))`.
//!
//! Both bases are ℤ-bases of the ring of integers, so a value `2^(−t) · Σ c_k ω^k`
//! whose coefficient vector is not entirely even (or is zero with `t = 0`) has a
//! unique representation. Equality and zero tests are therefore exact.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::ntheory::{is_power_of_two, is_prime, reduce};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Basis {
    /// `ω^(half) = −1`.
    Negacyclic { half: usize },
    /// `ω^(p−1) = −Σ_{k<p−1} ω^k`.
    OddPrime { p: usize },
}

/// Shape of the coefficient space for one cyclotomic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CycRing {
    order: u64,
    basis: Basis,
}

impl CycRing {
    pub fn new(order: u64) -> Result<Self> {
        let basis = if order >= 2 && is_power_of_two(order) {
            Basis::Negacyclic {
                half: (order / 2) as usize,
            }
        } else if order > 2 && is_prime(order) {
            Basis::OddPrime { p: order as usize }
        } else {
            return Err(Error::UnsupportedOrder(order));
        };
        Ok(Self { order, basis })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_power_of_two(&self) -> bool {
        matches!(self.basis, Basis::Negacyclic { .. })
    }

    /// Number of integer coefficients, φ(M).
    pub fn phi(&self) -> usize {
        match self.basis {
            Basis::Negacyclic { half } => half,
            Basis::OddPrime { p } => p - 1,
        }
    }

    /// Whether `√2` lies in this ring (needs `8 | M`).
    pub fn has_sqrt2(&self) -> bool {
        self.is_power_of_two() && self.order >= 8
    }

    /// Smallest ring containing both orders: equal orders, or the larger power of two.
    pub fn join(left: u64, right: u64) -> Result<u64> {
        if left == right {
            return Ok(left);
        }
        if is_power_of_two(left) && is_power_of_two(right) {
            return Ok(left.max(right));
        }
        Err(Error::OrderMismatch { left, right })
    }

    /// Adds `k · ω^e` to `out`.
    pub fn add_root(&self, k: i64, e: i64, out: &mut [i64]) {
        let e = reduce(e, self.order) as usize;
        match self.basis {
            Basis::Negacyclic { half } => {
                if e < half {
                    out[e] += k;
                } else {
                    out[e - half] -= k;
                }
            }
            Basis::OddPrime { p } => {
                if e < p - 1 {
                    out[e] += k;
                } else {
                    out.iter_mut().for_each(|c| *c -= k);
                }
            }
        }
    }

    /// `out += a · b`.
    pub fn mul_acc(&self, a: &[i64], b: &[i64], out: &mut [i64]) {
        match self.basis {
            Basis::Negacyclic { half } => {
                for (i, &ai) in a.iter().enumerate() {
                    if ai == 0 {
                        continue;
                    }
                    let (low, high) = b.split_at(half - i);
                    for (o, &bj) in out[i..].iter_mut().zip(low) {
                        *o += ai * bj;
                    }
                    for (o, &bj) in out.iter_mut().zip(high) {
                        *o -= ai * bj;
                    }
                }
            }
            Basis::OddPrime { p } => {
                let mut full: SmallVec<[i64; 64]> = SmallVec::from_elem(0, p);
                for (i, &ai) in a.iter().enumerate() {
                    if ai == 0 {
                        continue;
                    }
                    for (j, &bj) in b.iter().enumerate() {
                        let k = i + j;
                        full[if k >= p { k - p } else { k }] += ai * bj;
                    }
                }
                let top = full[p - 1];
                for (o, f) in out.iter_mut().zip(&full[..p - 1]) {
                    *o += f - top;
                }
            }
        }
    }

    /// `out = conj(a)`, i.e. `ω^k ↦ ω^(−k)`.
    pub fn conj_into(&self, a: &[i64], out: &mut [i64]) {
        out.iter_mut().for_each(|c| *c = 0);
        for (k, &c) in a.iter().enumerate() {
            if c != 0 {
                self.add_root(c, -(k as i64), out);
            }
        }
    }

    /// Re-expresses coefficients from `self` in the larger power-of-two ring `target`.
    pub fn promote_into(&self, a: &[i64], target: &CycRing, out: &mut [i64]) -> Result<()> {
        if self.order == target.order {
            out.copy_from_slice(a);
            return Ok(());
        }
        if !(self.is_power_of_two() && target.is_power_of_two() && target.order % self.order == 0)
        {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: target.order,
            });
        }
        let stride = (target.order / self.order) as usize;
        out.iter_mut().for_each(|c| *c = 0);
        for (k, &c) in a.iter().enumerate() {
            out[k * stride] = c;
        }
        Ok(())
    }

    /// Coefficients of `√2 = ω_8 + ω_8⁻¹`.
    pub fn sqrt2_coeffs(&self) -> Result<Vec<i64>> {
        if !self.has_sqrt2() {
            return Err(Error::UnsupportedOrder(self.order));
        }
        let mut out = vec![0; self.phi()];
        let eighth = (self.order / 8) as i64;
        self.add_root(1, eighth, &mut out);
        self.add_root(1, -eighth, &mut out);
        Ok(out)
    }

    /// Table of `ω^k` for `k` in `0..phi`.
    pub fn basis_values(&self) -> Vec<Complex64> {
        (0..self.phi())
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / self.order as f64))
            .collect()
    }

    pub fn evaluate(&self, coeffs: &[i64], scale_log2: i32, table: &[Complex64]) -> Complex64 {
        let s: Complex64 = coeffs
            .iter()
            .zip(table)
            .filter(|(c, _)| **c != 0)
            .map(|(&c, w)| w * c as f64)
            .sum();
        s * 2f64.powi(-scale_log2)
    }
}

/// Divides out common factors of two: returns the new scale.
pub(crate) fn normalize_scale(coeffs: &mut [i64], scale_log2: i32) -> i32 {
    let shift = coeffs
        .iter()
        .filter(|c| **c != 0)
        .map(|c| c.trailing_zeros())
        .min();
    match shift {
        None => 0,
        Some(0) => scale_log2,
        Some(s) => {
            coeffs.iter_mut().for_each(|c| *c >>= s);
            scale_log2 - s as i32
        }
    }
}

/// Brings two scaled coefficient vectors to a common scale, returning it.
pub(crate) fn align_scales(a: &mut [i64], ta: i32, b: &mut [i64], tb: i32) -> i32 {
    if ta < tb {
        let k = tb - ta;
        a.iter_mut().for_each(|c| *c <<= k);
        tb
    } else {
        let k = ta - tb;
        b.iter_mut().for_each(|c| *c <<= k);
        ta
    }
}

/// An exact value `2^(−scale_log2) · Σ coeffs[k]·ω_order^k` in canonical form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawCycNum")]
pub struct CycNum {
    order: u64,
    coeffs: Vec<i64>,
    scale_log2: i32,
}

#[derive(Deserialize)]
struct RawCycNum {
    order: u64,
    coeffs: Vec<i64>,
    scale_log2: i32,
}

impl TryFrom<RawCycNum> for CycNum {
    type Error = Error;

    fn try_from(raw: RawCycNum) -> Result<Self> {
        let ring = CycRing::new(raw.order)?;
        if raw.coeffs.len() != ring.phi() {
            return Err(Error::DimMismatch {
                left: raw.coeffs.len(),
                right: ring.phi(),
            });
        }
        Ok(CycNum::from_parts(ring, raw.coeffs, raw.scale_log2))
    }
}

/// Ring operation selector for [`cyc_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycOp {
    Add,
    Mul,
}

impl CycNum {
    pub(crate) fn from_parts(ring: CycRing, mut coeffs: Vec<i64>, scale_log2: i32) -> Self {
        let scale_log2 = normalize_scale(&mut coeffs, scale_log2);
        Self {
            order: ring.order,
            coeffs,
            scale_log2,
        }
    }

    pub fn zero(order: u64) -> Result<Self> {
        let ring = CycRing::new(order)?;
        Ok(Self::from_parts(ring, vec![0; ring.phi()], 0))
    }

    pub fn from_int(order: u64, k: i64) -> Result<Self> {
        Self::root(order, 0).map(|one| one.mul_int(k))
    }

    pub fn one(order: u64) -> Result<Self> {
        Self::root(order, 0)
    }

    /// `ω_order^e`; negative exponents are reduced modulo the order first.
    pub fn root(order: u64, e: i64) -> Result<Self> {
        let ring = CycRing::new(order)?;
        let mut coeffs = vec![0; ring.phi()];
        ring.add_root(1, e, &mut coeffs);
        Ok(Self::from_parts(ring, coeffs, 0))
    }

    /// `√2`, available for power-of-two orders `≥ 8`.
    pub fn sqrt2(order: u64) -> Result<Self> {
        let ring = CycRing::new(order)?;
        Ok(Self::from_parts(ring, ring.sqrt2_coeffs()?, 0))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn scale_log2(&self) -> i32 {
        self.scale_log2
    }

    fn ring(&self) -> CycRing {
        CycRing::new(self.order).expect("order validated at construction")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// Re-expresses the value in a larger power-of-two order.
    pub fn promote(&self, order: u64) -> Result<Self> {
        let target = CycRing::new(order)?;
        let mut out = vec![0; target.phi()];
        self.ring().promote_into(&self.coeffs, &target, &mut out)?;
        Ok(Self::from_parts(target, out, self.scale_log2))
    }

    fn lift_pair(&self, other: &Self) -> Result<(Self, Self)> {
        let order = CycRing::join(self.order, other.order)?;
        Ok((self.promote(order)?, other.promote(order)?))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let (mut a, mut b) = self.lift_pair(other)?;
        let t = align_scales(&mut a.coeffs, a.scale_log2, &mut b.coeffs, b.scale_log2);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        Ok(Self::from_parts(a.ring(), a.coeffs, t))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.lift_pair(other)?;
        let ring = a.ring();
        let mut out = vec![0; ring.phi()];
        ring.mul_acc(&a.coeffs, &b.coeffs, &mut out);
        Ok(Self::from_parts(ring, out, a.scale_log2 + b.scale_log2))
    }

    fn neg_ref(&self) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            scale_log2: self.scale_log2,
        }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * k).collect();
        Self::from_parts(self.ring(), coeffs, self.scale_log2)
    }

    /// Multiplies by `2^(−k)`.
    pub fn scale_pow2(&self, k: i32) -> Self {
        Self::from_parts(self.ring(), self.coeffs.clone(), self.scale_log2 + k)
    }

    /// Complex conjugate, `ω^k ↦ ω^(−k)`.
    pub fn conj(&self) -> Self {
        let ring = self.ring();
        let mut out = vec![0; ring.phi()];
        ring.conj_into(&self.coeffs, &mut out);
        Self::from_parts(ring, out, self.scale_log2)
    }

    pub fn to_complex(&self) -> Complex64 {
        let ring = self.ring();
        ring.evaluate(&self.coeffs, self.scale_log2, &ring.basis_values())
    }
}

/// `ω_M^e` in canonical form.
pub fn cyc_root(order: u64, e: i64) -> Result<CycNum> {
    CycNum::root(order, e)
}

pub fn cyc_arith(x: &CycNum, y: &CycNum, op: CycOp) -> Result<CycNum> {
    match op {
        CycOp::Add => x.try_add(y),
        CycOp::Mul => x.try_mul(y),
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.scale_log2 == other.scale_log2 && self.coeffs == other.coeffs;
        }
        match self.lift_pair(other) {
            Ok((a, b)) => a == b,
            Err(_) => false,
        }
    }
}

impl Eq for CycNum {}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.try_add(rhs).expect("incompatible cyclotomic orders")
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.try_sub(rhs).expect("incompatible cyclotomic orders")
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.try_mul(rhs).expect("incompatible cyclotomic orders")
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        self.neg_ref()
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, i64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| (k, *c))
            .collect();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut body = String::new();
        for (idx, (k, c)) in terms.iter().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            if idx == 0 {
                if *c < 0 {
                    body.push('-');
                }
            } else {
                body.push_str(&format!(" {sign} "));
            }
            let mag = c.unsigned_abs();
            match (k, mag) {
                (0, m) => body.push_str(&m.to_string()),
                (k, 1) => body.push_str(&format!("w{}^{k}", self.order)),
                (k, m) => body.push_str(&format!("{m}*w{}^{k}", self.order)),
            }
        }
        let wrap = terms.len() > 1 && self.scale_log2 != 0;
        if wrap {
            write!(f, "({body})")?;
        } else {
            write!(f, "{body}")?;
        }
        match self.scale_log2 {
            0 => Ok(()),
            t if t > 0 => write!(f, "/{}", 1u64 << t),
            t => write!(f, "*{}", 1u64 << (-t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root(m: u64, e: i64) -> CycNum {
        cyc_root(m, e).unwrap()
    }

    #[test]
    fn root_examples() {
        assert_eq!(root(4, 2), CycNum::from_int(4, -1).unwrap());
        assert_eq!(root(8, 5), -&root(8, 1));
        assert_eq!(root(8, 0), CycNum::one(8).unwrap());
        assert_eq!(root(8, -3), root(8, 5));
    }

    #[test]
    fn arithmetic_examples() {
        let one = CycNum::one(4).unwrap();
        let i = root(4, 1);
        let prod = &(&one + &i) * &(&one - &i);
        assert_eq!(prod, CycNum::from_int(4, 2).unwrap());
        assert_eq!(root(8, 1).conj(), -&root(8, 3));
        assert!((&root(4, 2) + &one).is_zero());
    }

    #[test]
    fn mixing_orders() {
        let x = root(8, 1);
        let y = root(5, 1);
        assert_eq!(
            cyc_arith(&x, &y, CycOp::Mul),
            Err(Error::OrderMismatch { left: 8, right: 5 })
        );
        // order 4 promotes into order 8: i = ω_8²
        let s = cyc_arith(&root(4, 1), &root(8, 2), CycOp::Add).unwrap();
        assert_eq!(s.order(), 8);
        assert_eq!(s, root(8, 2).mul_int(2));
        assert_eq!(root(4, 1), root(16, 4));
    }

    #[test]
    fn unsupported_orders() {
        assert_eq!(cyc_root(6, 1), Err(Error::UnsupportedOrder(6)));
        assert_eq!(cyc_root(1, 0), Err(Error::UnsupportedOrder(1)));
        assert!(CycNum::sqrt2(4).is_err());
    }

    #[test]
    fn complex_values() {
        let w4 = root(4, 1).to_complex();
        assert!((w4 - Complex64::i()).norm() < 1e-12);
        let w8 = root(8, 1).to_complex();
        let expect = Complex64::new(1.0, 1.0) * (2f64.sqrt() / 2.0);
        assert!((w8 - expect).norm() < 1e-12);
        let half_two = CycNum::from_int(8, 2).unwrap().scale_pow2(1);
        assert!((half_two.to_complex() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn canonical_scale() {
        let x = CycNum::from_int(8, 4).unwrap().scale_pow2(3);
        assert_eq!(x.coeffs(), &[1, 0, 0, 0]);
        assert_eq!(x.scale_log2(), 1);
        let z = CycNum::zero(8).unwrap().scale_pow2(5);
        assert_eq!(z.scale_log2(), 0);
        let s = CycNum::sqrt2(8).unwrap();
        assert_eq!(&s * &s, CycNum::from_int(8, 2).unwrap());
    }

    #[test]
    fn odd_prime_ring() {
        // 1 + ω + ω² = 0 in ℤ[ω_3]
        let sum = &(&root(3, 0) + &root(3, 1)) + &root(3, 2);
        assert!(sum.is_zero());
        for e in 0..7 {
            assert_eq!(&root(7, e) * &root(7, 7 - e), CycNum::one(7).unwrap());
            assert!((root(7, e).to_complex()
                - Complex64::from_polar(1.0, TAU * e as f64 / 7.0))
            .norm()
                < 1e-12);
        }
        assert_eq!(root(5, 2).conj(), root(5, 3));
    }

    #[test]
    fn serde_round_trip() {
        let x = root(8, 3).scale_pow2(2);
        let js = serde_json::to_string(&x).unwrap();
        assert_eq!(js, r#"{"order":8,"coeffs":[0,0,0,1],"scale_log2":2}"#);
        let back: CycNum = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<CycNum>(r#"{"order":8,"coeffs":[1],"scale_log2":0}"#)
            .is_err());
    }

    #[test]
    fn display() {
        assert_eq!(root(8, 3).scale_pow2(1).to_string(), "w8^3/2");
        assert_eq!(CycNum::zero(8).unwrap().to_string(), "0");
        let x = &CycNum::one(8).unwrap() - &root(8, 1);
        assert_eq!(x.to_string(), "1 - w8^1");
    }
}
