//! Magnetic translations on the discrete torus.
//!
//! For odd `N` the phase `ω^{rs/2}` makes `J_{r,s} = ω^{rs/2} P^r Q^s` a projective
//! representation with cocycle `ω^{(r's − rs')/2}`. For `N = 2^n` there is no `1/2`,
//! and the translation acts on the doubled torus instead:
//! `J^p_{r,s} = ω^{−psr} · Q^s P^r ⊗ Q^s P^r`, with `Q, P` the clock and shift of
//! [`crate::heisenberg`]. As an operator on `HW ⊗ HW` this is `(z^{−sr} ⊗ 1)·x_d^s·(y_d^{−1})^r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::ZMod;
use crate::heisenberg::{p_matrix, q_matrix, HWParams};
use crate::matrix::{Backend, Field, OpMatrix, RootSum};

/// A phase-space point `(r, s)` in `ℤ_N²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusPoint {
    pub r: ZMod,
    pub s: ZMod,
}

impl TorusPoint {
    pub fn new(r: ZMod, s: ZMod) -> Result<Self> {
        if r.modulus() != s.modulus() {
            return Err(Error::ModulusMismatch {
                left: r.modulus(),
                right: s.modulus(),
            });
        }
        Ok(Self { r, s })
    }

    pub fn from_ints(r: i64, s: i64, modulus: u64) -> Result<Self> {
        Self::new(ZMod::new(r, modulus)?, ZMod::new(s, modulus)?)
    }

    pub fn modulus(&self) -> u64 {
        self.r.modulus()
    }

    /// All `N²` points in lexicographic `(r, s)` order.
    pub fn all(modulus: u64) -> Vec<TorusPoint> {
        (0..modulus as i64)
            .flat_map(|r| (0..modulus as i64).map(move |s| (r, s)))
            .map(|(r, s)| TorusPoint {
                r: ZMod::wrap(r, modulus),
                s: ZMod::wrap(s, modulus),
            })
            .collect()
    }

    pub fn add(self, other: TorusPoint) -> TorusPoint {
        TorusPoint {
            r: self.r + other.r,
            s: self.s + other.s,
        }
    }

    pub fn neg(self) -> TorusPoint {
        TorusPoint {
            r: -self.r,
            s: -self.s,
        }
    }

    pub fn scale(self, k: i64) -> TorusPoint {
        TorusPoint {
            r: self.r.scale(k),
            s: self.s.scale(k),
        }
    }
}

/// Odd-`N` magnetic translation `ω^{rs·2⁻¹} P^r Q^s` (Q = diag ω^k, P = δ_{k−1,j}).
pub fn j_odd(modulus: u64, pt: TorusPoint, backend: Backend) -> Result<OpMatrix> {
    if modulus % 2 == 0 {
        return Err(Error::EvenModulus(modulus));
    }
    if pt.modulus() != modulus {
        return Err(Error::ModulusMismatch {
            left: pt.modulus(),
            right: modulus,
        });
    }
    let half = ZMod::wrap(2, modulus).inv()?;
    let (r, s) = (pt.r.value() as i64, pt.s.value() as i64);
    let base = (pt.r * pt.s * half).value() as i64;
    let n = modulus as usize;
    let field = Field::for_root(backend, modulus)?;
    OpMatrix::from_root_sums(n, field, |k, j| {
        // (P^r Q^s)_{kj} = ω^{sj} δ_{k−r,j}
        if (k as i64 - r).rem_euclid(modulus as i64) == j as i64 {
            RootSum::root(modulus, base + s * j as i64)
        } else {
            RootSum::zero(modulus)
        }
    })
    .map(|m| m.with_meta(format!("J odd N={modulus} r={r} s={s}")))
}

/// Twisted translation from its entrywise closed form:
/// `ω^{p(−sr + (k₁+k₂)s)} δ_{k₁−r,j₁} δ_{k₂−r,j₂}` at `(N k₁ + k₂, N j₁ + j₂)`.
pub fn j_twisted(params: &HWParams, pt: TorusPoint, backend: Backend) -> Result<OpMatrix> {
    let n = twisted_check(params, pt)?;
    let (r, s) = (pt.r.value() as i64, pt.s.value() as i64);
    let field = params.field(backend)?;
    OpMatrix::from_root_sums(n * n, field, |row, col| {
        let (k1, k2) = ((row / n) as i64, (row % n) as i64);
        let (j1, j2) = (col / n, col % n);
        if params.idx(k1 - r) == j1 && params.idx(k2 - r) == j2 {
            params.phase(-s * r + (k1 + k2) * s)
        } else {
            RootSum::zero(params.modulus())
        }
    })
    .map(|m| m.with_meta(format!("J twisted p={} r={r} s={s}", params.p())))
}

/// Twisted translation as the product `ω^{−psr} · Q^s P^r ⊗ Q^s P^r`.
pub fn j_twisted_product(params: &HWParams, pt: TorusPoint, backend: Backend) -> Result<OpMatrix> {
    twisted_check(params, pt)?;
    let (r, s) = (pt.r.value(), pt.s.value());
    let factor = q_matrix(params, backend)?
        .pow(s)?
        .mul(&p_matrix(params, backend)?.pow(r)?)?;
    let phase = params
        .phase(-(r as i64) * s as i64)
        .to_scalar(&params.field(backend)?)?;
    factor.kron(&factor)?.scalar_mul(&phase)
}

fn twisted_check(params: &HWParams, pt: TorusPoint) -> Result<usize> {
    if !params.is_power_of_two() {
        return Err(Error::InvalidParams(
            "twisted translations need N = 2^n".into(),
        ));
    }
    if pt.modulus() != params.modulus() {
        return Err(Error::ModulusMismatch {
            left: pt.modulus(),
            right: params.modulus(),
        });
    }
    Ok(params.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::CycRing;
    use crate::matrix::Scalar;

    const E: Backend = Backend::Exact;

    fn pt(r: i64, s: i64, n: u64) -> TorusPoint {
        TorusPoint::from_ints(r, s, n).unwrap()
    }

    fn hw(n: u32, p: u64) -> HWParams {
        HWParams::qubits(n, p).unwrap()
    }

    #[test]
    fn odd_examples() {
        assert!(j_odd(3, pt(0, 0, 3), E).unwrap().is_identity(0.0));
        let op = HWParams::odd_prime(3).unwrap();
        let pq = p_matrix(&op, E).unwrap().mul(&q_matrix(&op, E).unwrap()).unwrap();
        let w2 = Scalar::Exact(crate::exactnum::cyc_root(3, 2).unwrap());
        assert_eq!(j_odd(3, pt(1, 1, 3), E).unwrap(), pq.scalar_mul(&w2).unwrap());
        assert_eq!(
            j_odd(5, pt(1, 2, 5), E).unwrap().dagger(),
            j_odd(5, pt(-1, -2, 5), E).unwrap()
        );
        assert!(matches!(j_odd(4, pt(1, 1, 4), E), Err(Error::EvenModulus(4))));
    }

    #[test]
    fn odd_cocycle_and_powers() {
        for n in [3u64, 5, 7] {
            let half = ZMod::wrap(2, n).inv().unwrap();
            let ring = Field::Exact(CycRing::new(n).unwrap());
            let pts = TorusPoint::all(n);
            let js: Vec<OpMatrix> = pts.iter().map(|x| j_odd(n, *x, E).unwrap()).collect();
            let index = |x: TorusPoint| (x.r.value() * n + x.s.value()) as usize;
            for (a, ja) in pts.iter().zip(&js) {
                for (b, jb) in pts.iter().zip(&js) {
                    let e = ((b.r * a.s - a.r * b.s) * half).value() as i64;
                    let w = RootSum::root(n, e).to_scalar(&ring).unwrap();
                    let rhs = js[index(a.add(*b))].scalar_mul(&w).unwrap();
                    assert_eq!(ja.mul(jb).unwrap(), rhs, "N={n} {a:?} {b:?}");
                    if n == 5 {
                        let w = RootSum::root(n, (a.s * b.r - b.s * a.r).value() as i64)
                            .to_scalar(&ring)
                            .unwrap();
                        assert_eq!(ja.mul(jb).unwrap(), jb.mul(ja).unwrap().scalar_mul(&w).unwrap());
                    }
                }
                if n <= 5 {
                    for k in 0..=n {
                        assert_eq!(ja.pow(k).unwrap(), js[index(a.scale(k as i64))]);
                    }
                }
            }
        }
    }

    #[test]
    fn twisted_examples() {
        let p = hw(1, 1);
        assert!(j_twisted(&p, pt(0, 0, 2), E).unwrap().is_identity(0.0));
        let qp = q_matrix(&p, E).unwrap().mul(&p_matrix(&p, E).unwrap()).unwrap();
        let minus = Scalar::Exact(crate::exactnum::CycNum::from_int(8, -1).unwrap());
        let expect = qp.kron(&qp).unwrap().scalar_mul(&minus).unwrap();
        assert_eq!(j_twisted(&p, pt(1, 1, 2), E).unwrap(), expect);
        let j = j_twisted(&hw(2, 1), pt(1, 1, 4), Backend::Float).unwrap();
        let z = j.entry_complex(4 + 1, 0);
        assert!((z - num_complex::Complex64::i()).norm() < 1e-12);
    }

    #[test]
    fn twisted_forms_agree_and_regression_phase() {
        for n in 1..=3 {
            for p in HWParams::all_labels(n) {
                let params = hw(n, p);
                for x in TorusPoint::all(params.modulus()) {
                    assert_eq!(
                        j_twisted(&params, x, E).unwrap(),
                        j_twisted_product(&params, x, E).unwrap()
                    );
                }
            }
        }
        // J_{1,0} J_{0,1} = ω^{−p} J_{1,1}; n = 2, p = 1 gives −i
        let params = hw(2, 1);
        let lhs = j_twisted(&params, pt(1, 0, 4), E)
            .unwrap()
            .mul(&j_twisted(&params, pt(0, 1, 4), E).unwrap())
            .unwrap();
        let w = RootSum::root(4, 3).to_scalar(&params.field(E).unwrap()).unwrap();
        assert_eq!(lhs, j_twisted(&params, pt(1, 1, 4), E).unwrap().scalar_mul(&w).unwrap());
    }

    #[test]
    fn twisted_cocycle_unitarity_periodicity() {
        for n in 1..=2 {
            for p in HWParams::all_labels(n) {
                let params = hw(n, p);
                let field = params.field(E).unwrap();
                let nn = params.modulus();
                let pts = TorusPoint::all(nn);
                let js: Vec<OpMatrix> = pts.iter().map(|x| j_twisted(&params, *x, E).unwrap()).collect();
                let index = |x: TorusPoint| (x.r.value() * nn + x.s.value()) as usize;
                for (a, ja) in pts.iter().zip(&js) {
                    assert_eq!(ja.dagger(), js[index(a.neg())]);
                    let shifted = j_twisted(
                        &params,
                        pt(a.r.value() as i64 + nn as i64, a.s.value() as i64 + nn as i64, nn),
                        E,
                    )
                    .unwrap();
                    assert_eq!(&shifted, ja);
                    for (b, jb) in pts.iter().zip(&js) {
                        let e = (b.r * a.s - b.s * a.r).value() as i64;
                        let w = params.phase(e).to_scalar(&field).unwrap();
                        assert_eq!(ja.mul(jb).unwrap(), js[index(a.add(*b))].scalar_mul(&w).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn twisted_needs_power_of_two() {
        let op = HWParams::odd_prime(5).unwrap();
        assert!(j_twisted(&op, pt(1, 1, 5), E).is_err());
        assert!(j_twisted(&hw(2, 1), pt(1, 1, 8), E).is_err());
    }
}
