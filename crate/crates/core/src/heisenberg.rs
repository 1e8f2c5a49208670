//! Matrix representations of the finite Heisenberg-Weyl group `HW_N`.
//!
//! Orientation: `p_matrix` is the shift `δ_{k−1,j}` and `p_inverse_matrix` is
//! `δ_{k+1,j}`. The representation sends the generator `y` to the latter, so
//! `gamma_p(0,0,1) = p_inverse_matrix` and in general
//! `Γ(m,r,s) = ω^{pm} · Q^r · P^{−s}`, entries `ω^{p(m + kr)} δ_{k+s,j}`.
//! The vectors `ψ_k` of [`p_eigensystem`] are eigenvectors of `P^{−1}` with eigenvalue
//! `ω^k` (and of `P` with eigenvalue `ω^{−k}`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::ntheory::{is_prime, reduce};
use crate::exactnum::ZMod;
use crate::matrix::{Backend, Field, OpMatrix, RootSum, Scalar};

/// Largest qubit count accepted (dimension `2^12 = 4096`).
pub const MAX_QUBITS: u32 = 12;

/// Which irreducible representation: `N = 2^n` with odd label `p`, or an odd prime `N` with `p = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HWParams {
    modulus: u64,
    qubits: Option<u32>,
    p: u64,
}

impl HWParams {
    pub fn qubits(n: u32, p: u64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidParams(format!(
                "qubit count must lie in 1..={MAX_QUBITS}, got {n}"
            )));
        }
        let modulus = 1u64 << n;
        if p % 2 == 0 || p >= modulus {
            return Err(Error::InvalidParams(format!(
                "p must be odd and below {modulus}, got {p}"
            )));
        }
        Ok(Self {
            modulus,
            qubits: Some(n),
            p,
        })
    }

    pub fn odd_prime(modulus: u64) -> Result<Self> {
        if modulus < 3 || !is_prime(modulus) {
            return Err(Error::InvalidParams(format!(
                "{modulus} is not an odd prime"
            )));
        }
        Ok(Self {
            modulus,
            qubits: None,
            p: 1,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.modulus as usize
    }

    pub fn qubit_count(&self) -> Option<u32> {
        self.qubits
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_power_of_two(&self) -> bool {
        self.qubits.is_some()
    }

    /// The odd labels allowed for `N = 2^n`.
    pub fn all_labels(n: u32) -> Vec<u64> {
        (1..(1u64 << n)).step_by(2).collect()
    }

    pub fn field(&self, backend: Backend) -> Result<Field> {
        Field::for_root(backend, self.modulus)
    }

    pub fn zmod(&self, v: i64) -> ZMod {
        ZMod::wrap(v, self.modulus)
    }

    /// `ω^{p·e}` as a symbolic entry.
    pub fn phase(&self, e: i64) -> RootSum {
        RootSum::root(self.modulus, self.scaled(e))
    }

    /// `p·e mod N`.
    pub(crate) fn scaled(&self, e: i64) -> i64 {
        let n = self.modulus as i128;
        ((self.p as i128 * e as i128).rem_euclid(n)) as i64
    }

    pub(crate) fn idx(&self, k: i64) -> usize {
        reduce(k, self.modulus) as usize
    }
}

fn check_modulus(params: &HWParams, xs: &[ZMod]) -> Result<()> {
    for x in xs {
        if x.modulus() != params.modulus {
            return Err(Error::ModulusMismatch {
                left: x.modulus(),
                right: params.modulus,
            });
        }
    }
    Ok(())
}

/// `Γ^p(z^m x^r y^s)`.
pub fn gamma_p(params: &HWParams, m: ZMod, r: ZMod, s: ZMod, backend: Backend) -> Result<OpMatrix> {
    check_modulus(params, &[m, r, s])?;
    let (m, r, s) = (m.value() as i64, r.value() as i64, s.value() as i64);
    let n = params.dim();
    let zero = RootSum::zero(params.modulus);
    OpMatrix::from_root_sums(n, params.field(backend)?, |k, j| {
        if params.idx(k as i64 + s) == j {
            params.phase(m + k as i64 * r)
        } else {
            zero.clone()
        }
    })
    .map(|g| g.with_meta(format!("gamma p={} m={m} r={r} s={s}", params.p)))
}

/// Clock matrix `diag(ω^{pk})`.
pub fn q_matrix(params: &HWParams, backend: Backend) -> Result<OpMatrix> {
    let zero = RootSum::zero(params.modulus);
    OpMatrix::from_root_sums(params.dim(), params.field(backend)?, |k, j| {
        if k == j {
            params.phase(k as i64)
        } else {
            zero.clone()
        }
    })
    .map(|q| q.with_meta("Q"))
}

/// Shift matrix with entries `δ_{k−1,j}`.
pub fn p_matrix(params: &HWParams, backend: Backend) -> Result<OpMatrix> {
    let n = params.dim();
    Ok(OpMatrix::permutation(n, params.field(backend)?, |k| (k + n - 1) % n).with_meta("P"))
}

/// Inverse shift `δ_{k+1,j}`, the image of `y`.
pub fn p_inverse_matrix(params: &HWParams, backend: Backend) -> Result<OpMatrix> {
    let n = params.dim();
    Ok(OpMatrix::permutation(n, params.field(backend)?, |k| (k + 1) % n).with_meta("P^-1"))
}

/// Central phase `ω^p`.
pub fn z_phase(params: &HWParams, backend: Backend) -> Result<Scalar> {
    params.phase(1).to_scalar(&params.field(backend)?)
}

/// `N^{−1/2} ω^{kj}`. The exact backend needs `N = 2^n`.
pub fn fourier(params: &HWParams, backend: Backend) -> Result<OpMatrix> {
    let n = params.dim();
    let m = match (params.qubits, backend) {
        (Some(q), _) => OpMatrix::from_root_sums(n, params.field(backend)?, |k, j| {
            RootSum::root(params.modulus, (k * j) as i64).over_sqrt2_pow(q as i32)
        })?,
        (None, Backend::Float) => {
            let norm = (n as f64).sqrt().recip();
            let table = crate::matrix::root_table(params.modulus);
            OpMatrix::from_complex_fn(n, |k, j| table[(k * j) % n] * norm)
        }
        (None, Backend::Exact) => return Err(Error::UnsupportedBackend("odd-N Fourier matrix")),
    };
    Ok(m.with_meta("F"))
}

/// An eigenpair of `P^{−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub vector: Vec<Scalar>,
    pub value: Scalar,
}

/// `ψ_k = N^{−1/2}(ω^{kj})_j` with eigenvalue `ω^k` under [`p_inverse_matrix`].
pub fn p_eigensystem(params: &HWParams, backend: Backend) -> Result<Vec<EigenPair>> {
    let n = params.dim();
    let field = params.field(backend)?;
    let entry = |k: usize, j: usize| -> Result<Scalar> {
        let w = RootSum::root(params.modulus, (k * j) as i64);
        match params.qubits {
            Some(q) => w.over_sqrt2_pow(q as i32).to_scalar(&field),
            None => match field {
                Field::Float => Ok(Scalar::Float(
                    w.to_complex_with(None) / Complex64::new((n as f64).sqrt(), 0.0),
                )),
                Field::Exact(_) => Err(Error::UnsupportedBackend("odd-N eigenvectors")),
            },
        }
    };
    (0..n)
        .map(|k| {
            Ok(EigenPair {
                vector: (0..n).map(|j| entry(k, j)).collect::<Result<_>>()?,
                value: RootSum::root(params.modulus, k as i64).to_scalar(&field)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: i64, n: u64) -> ZMod {
        ZMod::new(v, n).unwrap()
    }

    fn hw(n: u32, p: u64) -> HWParams {
        HWParams::qubits(n, p).unwrap()
    }

    fn float_diag(vals: &[Complex64]) -> OpMatrix {
        OpMatrix::from_complex_fn(vals.len(), |i, j| if i == j { vals[i] } else { Complex64::new(0.0, 0.0) })
    }

    const E: Backend = Backend::Exact;

    #[test]
    fn params_validation() {
        assert!(HWParams::qubits(2, 2).is_err());
        assert!(HWParams::qubits(2, 5).is_err());
        assert!(HWParams::qubits(0, 1).is_err());
        assert!(HWParams::odd_prime(9).is_err());
        assert_eq!(HWParams::odd_prime(7).unwrap().p(), 1);
        assert_eq!(HWParams::all_labels(3), vec![1, 3, 5, 7]);
    }

    #[test]
    fn gamma_examples() {
        let p = hw(1, 1);
        let g = gamma_p(&p, z(0, 2), z(0, 2), z(0, 2), E).unwrap();
        assert!(g.is_identity(0.0));
        let g = gamma_p(&p, z(0, 2), z(1, 2), z(0, 2), Backend::Float).unwrap();
        let expect = float_diag(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert!(g.mat_eq(&expect, 1e-12).unwrap().equal);
        let p2 = hw(2, 1);
        let g = gamma_p(&p2, z(1, 4), z(0, 4), z(0, 4), Backend::Float).unwrap();
        assert!(g.mat_eq(&float_diag(&[Complex64::i(); 4]), 1e-12).unwrap().equal);
        // y is sent to the inverse shift
        for n in 1..4 {
            let p = hw(n, 1);
            let nn = p.modulus();
            let g = gamma_p(&p, z(0, nn), z(0, nn), z(1, nn), E).unwrap();
            assert_eq!(g, p_inverse_matrix(&p, E).unwrap());
        }
    }

    #[test]
    fn clock_shift_examples() {
        let p = p_matrix(&hw(1, 1), E).unwrap();
        assert_eq!(p, OpMatrix::permutation(2, p.field(), |k| 1 - k));
        let q = q_matrix(&hw(2, 1), Backend::Float).unwrap();
        let expect = float_diag(&[
            Complex64::new(1.0, 0.0),
            Complex64::i(),
            Complex64::new(-1.0, 0.0),
            -Complex64::i(),
        ]);
        assert!(q.mat_eq(&expect, 1e-12).unwrap().equal);
        let zp = z_phase(&hw(2, 3), Backend::Float).unwrap().to_complex();
        assert!((zp + Complex64::i()).norm() < 1e-12);
        // odd prime: P·Q·P^-1 = ω^-1 Q
        let op = HWParams::odd_prime(5).unwrap();
        let q = q_matrix(&op, E).unwrap();
        let pm = p_matrix(&op, E).unwrap();
        let lhs = pm.mul(&q).unwrap().mul(&pm.dagger()).unwrap();
        let w = RootSum::root(5, -1).to_scalar(&op.field(E).unwrap()).unwrap();
        assert_eq!(lhs, q.scalar_mul(&w).unwrap());
    }

    #[test]
    fn fourier_examples() {
        let f = fourier(&hw(1, 1), Backend::Float).unwrap();
        let h = 0.5f64.sqrt();
        let expect = OpMatrix::from_complex_fn(2, |i, j| Complex64::new(if i * j == 1 { -h } else { h }, 0.0));
        assert!(f.mat_eq(&expect, 1e-12).unwrap().equal);
        for n in 1..=3 {
            let f = fourier(&hw(n, 1), E).unwrap();
            assert!(f.pow(4).unwrap().is_identity(0.0));
            let first = f.entry(0, 0);
            for j in 0..f.dim() {
                assert_eq!(f.entry(0, j), first);
            }
        }
        assert!(fourier(&HWParams::odd_prime(3).unwrap(), E).is_err());
        let f3 = fourier(&HWParams::odd_prime(3).unwrap(), Backend::Float).unwrap();
        assert!(f3.is_unitary(1e-12).unwrap());
    }

    #[test]
    fn eigensystem_examples() {
        let params = hw(1, 1);
        let pairs = p_eigensystem(&params, Backend::Float).unwrap();
        let h = 0.5f64.sqrt();
        assert!((pairs[0].value.to_complex() - 1.0).norm() < 1e-12);
        assert!(pairs[0].vector.iter().all(|x| (x.to_complex() - h).norm() < 1e-12));
        assert!((pairs[1].value.to_complex() + 1.0).norm() < 1e-12);
        assert!((pairs[1].vector[1].to_complex() + h).norm() < 1e-12);
        for n in 1..=3 {
            for p in HWParams::all_labels(n) {
                let params = hw(n, p);
                let pinv = p_inverse_matrix(&params, E).unwrap();
                let pm = p_matrix(&params, E).unwrap();
                let pairs = p_eigensystem(&params, E).unwrap();
                let mut proj = OpMatrix::zeros(params.dim(), pinv.field());
                for pair in &pairs {
                    let lhs = pinv.mul_vec(&pair.vector).unwrap();
                    for (x, v) in lhs.iter().zip(&pair.vector) {
                        assert_eq!(*x, pair.value.try_mul(v).unwrap());
                    }
                    // P itself has the conjugate eigenvalue
                    let lhs = pm.mul_vec(&pair.vector).unwrap();
                    let conj = pair.value.conj();
                    for (x, v) in lhs.iter().zip(&pair.vector) {
                        assert_eq!(*x, conj.try_mul(v).unwrap());
                    }
                    let outer = OpMatrix::from_cyc_entries(
                        params.dim(),
                        &pair
                            .vector
                            .iter()
                            .flat_map(|a| {
                                pair.vector.iter().map(move |b| match a.try_mul(&b.conj()).unwrap() {
                                    Scalar::Exact(x) => x,
                                    Scalar::Float(_) => unreachable!(),
                                })
                            })
                            .collect::<Vec<_>>(),
                    )
                    .unwrap();
                    proj = proj.add(&outer).unwrap();
                }
                assert!(proj.is_identity(0.0));
            }
        }
    }

    #[test]
    fn commutation_and_periodicity() {
        for n in 1..=3 {
            for p in HWParams::all_labels(n) {
                let params = hw(n, p);
                let q = q_matrix(&params, E).unwrap();
                let pinv = p_inverse_matrix(&params, E).unwrap();
                let w = z_phase(&params, E).unwrap();
                assert_eq!(
                    pinv.mul(&q).unwrap(),
                    q.mul(&pinv).unwrap().scalar_mul(&w).unwrap()
                );
                let nn = params.modulus();
                assert!(q.pow(nn).unwrap().is_identity(0.0));
                assert!(p_matrix(&params, E).unwrap().pow(nn).unwrap().is_identity(0.0));
                let f = fourier(&params, E).unwrap();
                let pp = p_matrix(&params, E).unwrap().pow(p).unwrap();
                assert_eq!(f.mul(&pp).unwrap().mul(&f.dagger()).unwrap(), q);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn commutator_relation(
                p in prop::sample::select(vec![1u64, 3]),
                g in (0i64..4, 0i64..4, 0i64..4),
                h in (0i64..4, 0i64..4, 0i64..4),
            ) {
                let params = hw(2, p);
                let gm = |(m, r, s): (i64, i64, i64)| {
                    gamma_p(&params, z(m, 4), z(r, 4), z(s, 4), E).unwrap()
                };
                let (a, b) = (gm(g), gm(h));
                let comm = a.mul(&b).unwrap().sub(&b.mul(&a).unwrap()).unwrap();
                let coeff = RootSum::zero(4)
                    .plus(1, params.scaled(h.1 * g.2))
                    .plus(-1, params.scaled(g.1 * h.2))
                    .to_scalar(&a.field())
                    .unwrap();
                let rhs = gm((g.0 + h.0, g.1 + h.1, g.2 + h.2)).scalar_mul(&coeff).unwrap();
                prop_assert_eq!(comm, rhs);
            }

            #[test]
            fn gamma_is_unitary(n in 1u32..=3, m in 0i64..8, r in 0i64..8, s in 0i64..8) {
                let params = hw(n, 1);
                let nn = params.modulus();
                let g = gamma_p(&params, z(m, nn), z(r, nn), z(s, nn), E).unwrap();
                prop_assert!(g.is_unitary(0.0).unwrap());
            }
        }
    }
}
