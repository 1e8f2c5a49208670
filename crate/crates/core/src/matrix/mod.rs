//! Dense square matrices over either scalar backend.
//!
//! Composite indices on tensor products follow `d₂·k₁ + k₂` throughout the crate:
//! `kron(A, B)[d₂·k₁ + k₂, d₂·j₁ + j₂] = A[k₁, j₁]·B[k₂, j₂]`.

mod export;
mod scalar;

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

pub use export::{MatrixExport, MatrixEntries};
pub use scalar::{write_complex, Backend, Field, RootSum, Scalar};
pub(crate) use scalar::root_table;

use crate::error::{Error, Result};
use crate::exactnum::{align_scales, normalize_scale, CycNum, CycRing};

/// Exact payload: one common power-of-two scale and `dim²·φ(M)` integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ExactData {
    ring: CycRing,
    scale_log2: i32,
    coeffs: Vec<i64>,
}

impl ExactData {
    fn phi(&self) -> usize {
        self.ring.phi()
    }

    fn entry(&self, idx: usize) -> &[i64] {
        let phi = self.phi();
        &self.coeffs[idx * phi..(idx + 1) * phi]
    }

    fn normalized(mut self) -> Self {
        self.scale_log2 = normalize_scale(&mut self.coeffs, self.scale_log2);
        self
    }

    fn promote(&self, order: u64) -> Result<Self> {
        if order == self.ring.order() {
            return Ok(self.clone());
        }
        let target = CycRing::new(order)?;
        let (phi, tphi) = (self.phi(), target.phi());
        let n = self.coeffs.len() / phi;
        let mut out = vec![0; n * tphi];
        for idx in 0..n {
            self.ring.promote_into(
                &self.coeffs[idx * phi..(idx + 1) * phi],
                &target,
                &mut out[idx * tphi..(idx + 1) * tphi],
            )?;
        }
        Ok(ExactData {
            ring: target,
            scale_log2: self.scale_log2,
            coeffs: out,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Data {
    Exact(ExactData),
    Float(Vec<Complex64>),
}

/// Dense `dim × dim` matrix with an optional provenance label.
#[derive(Debug, Clone)]
pub struct OpMatrix {
    dim: usize,
    data: Data,
    meta: Option<String>,
}

/// Outcome of [`OpMatrix::mat_eq`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatEq {
    pub equal: bool,
    pub max_deviation: f64,
}

impl PartialEq for OpMatrix {
    /// Value equality; provenance labels are ignored. Exact matrices of different
    /// power-of-two orders are compared after promotion.
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && match self.paired(other) {
                Ok((Data::Exact(a), Data::Exact(b))) => a == b,
                Ok((Data::Float(a), Data::Float(b))) => a == b,
                _ => false,
            }
    }
}

impl OpMatrix {
    fn new(dim: usize, data: Data) -> Self {
        assert!(dim >= 1, "matrices must have dim >= 1");
        Self {
            dim,
            data,
            meta: None,
        }
    }

    pub fn zeros(dim: usize, field: Field) -> Self {
        match field {
            Field::Exact(ring) => Self::new(
                dim,
                Data::Exact(ExactData {
                    ring,
                    scale_log2: 0,
                    coeffs: vec![0; dim * dim * ring.phi()],
                }),
            ),
            Field::Float => Self::new(dim, Data::Float(vec![Complex64::new(0.0, 0.0); dim * dim])),
        }
    }

    pub fn identity(dim: usize, field: Field) -> Self {
        Self::permutation(dim, field, |i| i)
    }

    /// Matrix with a single `1` in each row `i`, at column `col_of_row(i)`.
    pub fn permutation(dim: usize, field: Field, col_of_row: impl Fn(usize) -> usize) -> Self {
        let mut m = Self::zeros(dim, field);
        for i in 0..dim {
            let j = col_of_row(i);
            match &mut m.data {
                Data::Exact(e) => {
                    let phi = e.phi();
                    e.coeffs[(i * dim + j) * phi] = 1;
                }
                Data::Float(v) => v[i * dim + j] = Complex64::new(1.0, 0.0),
            }
        }
        m
    }

    /// Builds a matrix from symbolic entries, evaluated exactly or in floating point.
    pub fn from_root_sums(
        dim: usize,
        field: Field,
        entry: impl Fn(usize, usize) -> RootSum + Sync,
    ) -> Result<Self> {
        match field {
            Field::Exact(ring) => {
                let phi = ring.phi();
                let cells: Vec<(Vec<i64>, i32)> = (0..dim * dim)
                    .into_par_iter()
                    .map(|idx| {
                        let mut c = vec![0; phi];
                        let t = entry(idx / dim, idx % dim).realize_into(&ring, &mut c)?;
                        Ok((c, t))
                    })
                    .collect::<Result<_>>()?;
                let scale = cells
                    .iter()
                    .filter(|(c, _)| c.iter().any(|x| *x != 0))
                    .map(|(_, t)| *t)
                    .max()
                    .unwrap_or(0);
                let mut coeffs = Vec::with_capacity(dim * dim * phi);
                for (c, t) in cells {
                    let shift = scale - t;
                    coeffs.extend(c.into_iter().map(|x| x << shift));
                }
                Ok(Self::new(
                    dim,
                    Data::Exact(
                        ExactData {
                            ring,
                            scale_log2: scale,
                            coeffs,
                        }
                        .normalized(),
                    ),
                ))
            }
            Field::Float => {
                let tables = std::sync::Mutex::new(std::collections::HashMap::new());
                let table_for = |root: u64| -> std::sync::Arc<Vec<Complex64>> {
                    let mut guard = tables.lock().expect("table cache poisoned");
                    guard
                        .entry(root)
                        .or_insert_with(|| std::sync::Arc::new(root_table(root)))
                        .clone()
                };
                let values: Vec<Complex64> = (0..dim * dim)
                    .into_par_iter()
                    .map(|idx| {
                        let rs = entry(idx / dim, idx % dim);
                        if rs.is_zero() {
                            return Complex64::new(0.0, 0.0);
                        }
                        let table = table_for(rs.root_order());
                        rs.to_complex_with(Some(&table))
                    })
                    .collect();
                Ok(Self::new(dim, Data::Float(values)))
            }
        }
    }

    /// Float matrix from a complex-valued entry function.
    pub fn from_complex_fn(dim: usize, entry: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut v = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                v.push(entry(i, j));
            }
        }
        Self::new(dim, Data::Float(v))
    }

    /// Exact matrix from per-entry cyclotomic numbers (row-major).
    pub fn from_cyc_entries(dim: usize, entries: &[CycNum]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        let mut order = entries[0].order();
        for e in entries {
            order = CycRing::join(order, e.order())?;
        }
        let ring = CycRing::new(order)?;
        let lifted: Vec<CycNum> = entries
            .iter()
            .map(|e| e.promote(order))
            .collect::<Result<_>>()?;
        let scale = lifted
            .iter()
            .filter(|e| !e.is_zero())
            .map(|e| e.scale_log2())
            .max()
            .unwrap_or(0);
        let mut coeffs = Vec::with_capacity(dim * dim * ring.phi());
        for e in &lifted {
            let shift = scale - e.scale_log2();
            coeffs.extend(e.coeffs().iter().map(|x| x << shift));
        }
        Ok(Self::new(
            dim,
            Data::Exact(
                ExactData {
                    ring,
                    scale_log2: scale,
                    coeffs,
                }
                .normalized(),
            ),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        match self.data {
            Data::Exact(_) => Backend::Exact,
            Data::Float(_) => Backend::Float,
        }
    }

    pub fn field(&self) -> Field {
        match &self.data {
            Data::Exact(e) => Field::Exact(e.ring),
            Data::Float(_) => Field::Float,
        }
    }

    pub fn meta(&self) -> Option<&str> {
        self.meta.as_deref()
    }

    pub fn with_meta(mut self, label: impl Into<String>) -> Self {
        self.meta = Some(label.into());
        self
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        let idx = i * self.dim + j;
        match &self.data {
            Data::Exact(e) => Scalar::Exact(CycNum::from_parts(
                e.ring,
                e.entry(idx).to_vec(),
                e.scale_log2,
            )),
            Data::Float(v) => Scalar::Float(v[idx]),
        }
    }

    pub fn entry_complex(&self, i: usize, j: usize) -> Complex64 {
        let idx = i * self.dim + j;
        match &self.data {
            Data::Exact(e) => {
                let table = e.ring.basis_values();
                e.ring.evaluate(e.entry(idx), e.scale_log2, &table)
            }
            Data::Float(v) => v[idx],
        }
    }

    /// Row-major complex values of all entries.
    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        match &self.data {
            Data::Exact(e) => {
                let table = e.ring.basis_values();
                (0..self.dim * self.dim)
                    .map(|idx| e.ring.evaluate(e.entry(idx), e.scale_log2, &table))
                    .collect()
            }
            Data::Float(v) => v.clone(),
        }
    }

    /// Floating copy of this matrix (exact entries are evaluated).
    pub fn to_float(&self) -> OpMatrix {
        OpMatrix {
            dim: self.dim,
            data: Data::Float(self.to_complex_vec()),
            meta: self.meta.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Exact(e) => e.coeffs.iter().all(|c| *c == 0),
            Data::Float(v) => v.iter().all(|z| z.norm() == 0.0),
        }
    }

    fn check_dims(&self, other: &OpMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// Both payloads over a common field.
    fn paired(&self, other: &OpMatrix) -> Result<(Data, Data)> {
        match (&self.data, &other.data) {
            (Data::Exact(a), Data::Exact(b)) => {
                let order = CycRing::join(a.ring.order(), b.ring.order())?;
                Ok((
                    Data::Exact(a.promote(order)?),
                    Data::Exact(b.promote(order)?),
                ))
            }
            (Data::Float(a), Data::Float(b)) => Ok((Data::Float(a.clone()), Data::Float(b.clone()))),
            _ => Err(Error::BackendMismatch),
        }
    }

    pub fn mul(&self, other: &OpMatrix) -> Result<OpMatrix> {
        self.check_dims(other)?;
        let dim = self.dim;
        let data = match self.paired(other)? {
            (Data::Exact(a), Data::Exact(b)) => Data::Exact(exact_mul(&a, &b, dim)),
            (Data::Float(a), Data::Float(b)) => Data::Float(float_mul(&a, &b, dim)),
            _ => unreachable!("paired returns matching backends"),
        };
        Ok(Self::new(dim, data))
    }

    fn combine(&self, other: &OpMatrix, sign: i64) -> Result<OpMatrix> {
        self.check_dims(other)?;
        let data = match self.paired(other)? {
            (Data::Exact(mut a), Data::Exact(mut b)) => {
                let t = align_scales(&mut a.coeffs, a.scale_log2, &mut b.coeffs, b.scale_log2);
                for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
                    *x += sign * y;
                }
                a.scale_log2 = t;
                Data::Exact(a.normalized())
            }
            (Data::Float(mut a), Data::Float(b)) => {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y * sign as f64;
                }
                Data::Float(a)
            }
            _ => unreachable!("paired returns matching backends"),
        };
        Ok(Self::new(self.dim, data))
    }

    pub fn add(&self, other: &OpMatrix) -> Result<OpMatrix> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &OpMatrix) -> Result<OpMatrix> {
        self.combine(other, -1)
    }

    pub fn scalar_mul(&self, s: &Scalar) -> Result<OpMatrix> {
        let data = match (&self.data, s) {
            (Data::Exact(a), Scalar::Exact(x)) => {
                let order = CycRing::join(a.ring.order(), x.order())?;
                let a = a.promote(order)?;
                let x = x.promote(order)?;
                let phi = a.phi();
                let mut out = vec![0; a.coeffs.len()];
                for (src, dst) in a.coeffs.chunks(phi).zip(out.chunks_mut(phi)) {
                    a.ring.mul_acc(src, x.coeffs(), dst);
                }
                Data::Exact(
                    ExactData {
                        ring: a.ring,
                        scale_log2: a.scale_log2 + x.scale_log2(),
                        coeffs: out,
                    }
                    .normalized(),
                )
            }
            (Data::Float(a), Scalar::Float(z)) => Data::Float(a.iter().map(|v| v * z).collect()),
            _ => return Err(Error::BackendMismatch),
        };
        Ok(Self::new(self.dim, data))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> OpMatrix {
        let dim = self.dim;
        let data = match &self.data {
            Data::Exact(a) => {
                let phi = a.phi();
                let mut out = vec![0; a.coeffs.len()];
                for i in 0..dim {
                    for j in 0..dim {
                        let dst = (j * dim + i) * phi;
                        a.ring
                            .conj_into(a.entry(i * dim + j), &mut out[dst..dst + phi]);
                    }
                }
                Data::Exact(ExactData {
                    ring: a.ring,
                    scale_log2: a.scale_log2,
                    coeffs: out,
                })
            }
            Data::Float(a) => {
                let mut out = vec![Complex64::new(0.0, 0.0); a.len()];
                for i in 0..dim {
                    for j in 0..dim {
                        out[j * dim + i] = a[i * dim + j].conj();
                    }
                }
                Data::Float(out)
            }
        };
        Self::new(dim, data)
    }

    pub fn pow(&self, mut k: u64) -> Result<OpMatrix> {
        let mut acc = OpMatrix::identity(self.dim, self.field());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Integer power with negative exponents taken through the adjoint; valid for unitaries.
    pub fn unitary_pow(&self, k: i64) -> Result<OpMatrix> {
        if k >= 0 {
            self.pow(k as u64)
        } else {
            self.dagger().pow(k.unsigned_abs())
        }
    }

    /// Kronecker product with the `d₂·k₁ + k₂` composite index.
    pub fn kron(&self, other: &OpMatrix) -> Result<OpMatrix> {
        let (d1, d2) = (self.dim, other.dim);
        let dim = d1 * d2;
        let data = match self.paired(other)? {
            (Data::Exact(a), Data::Exact(b)) => {
                let phi = a.phi();
                let mut out = vec![0; dim * dim * phi];
                for k1 in 0..d1 {
                    for j1 in 0..d1 {
                        let x = a.entry(k1 * d1 + j1);
                        if x.iter().all(|c| *c == 0) {
                            continue;
                        }
                        for k2 in 0..d2 {
                            for j2 in 0..d2 {
                                let idx = (d2 * k1 + k2) * dim + (d2 * j1 + j2);
                                a.ring.mul_acc(
                                    x,
                                    b.entry(k2 * d2 + j2),
                                    &mut out[idx * phi..(idx + 1) * phi],
                                );
                            }
                        }
                    }
                }
                Data::Exact(
                    ExactData {
                        ring: a.ring,
                        scale_log2: a.scale_log2 + b.scale_log2,
                        coeffs: out,
                    }
                    .normalized(),
                )
            }
            (Data::Float(a), Data::Float(b)) => {
                let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
                for k1 in 0..d1 {
                    for j1 in 0..d1 {
                        let x = a[k1 * d1 + j1];
                        for k2 in 0..d2 {
                            for j2 in 0..d2 {
                                out[(d2 * k1 + k2) * dim + (d2 * j1 + j2)] = x * b[k2 * d2 + j2];
                            }
                        }
                    }
                }
                Data::Float(out)
            }
            _ => unreachable!("paired returns matching backends"),
        };
        Ok(Self::new(dim, data))
    }

    /// Compares two matrices. The exact backend ignores `tol` and compares canonical forms;
    /// the deviation is the largest entrywise modulus of the difference in both cases.
    pub fn mat_eq(&self, other: &OpMatrix, tol: f64) -> Result<MatEq> {
        self.check_dims(other)?;
        match self.paired(other)? {
            (Data::Exact(a), Data::Exact(b)) => {
                if a == b {
                    return Ok(MatEq {
                        equal: true,
                        max_deviation: 0.0,
                    });
                }
                let diff = Self::new(self.dim, Data::Exact(a)).sub(&Self::new(self.dim, Data::Exact(b)))?;
                Ok(MatEq {
                    equal: false,
                    max_deviation: diff.max_abs(),
                })
            }
            (Data::Float(a), Data::Float(b)) => {
                let dev = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                Ok(MatEq {
                    equal: dev <= tol,
                    max_deviation: dev,
                })
            }
            _ => unreachable!("paired returns matching backends"),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.to_complex_vec()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let id = OpMatrix::identity(self.dim, self.field());
        self.mat_eq(&id, tol).map(|r| r.equal).unwrap_or(false)
    }

    /// `A·A† = I`.
    pub fn is_unitary(&self, tol: f64) -> Result<bool> {
        Ok(self.mul(&self.dagger())?.is_identity(tol))
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let mut out = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut acc = match self.field() {
                Field::Exact(r) => Scalar::Exact(CycNum::zero(r.order())?),
                Field::Float => Scalar::Float(Complex64::new(0.0, 0.0)),
            };
            for (j, x) in v.iter().enumerate() {
                let a = self.entry(i, j);
                if !a.is_zero() {
                    acc = acc.try_add(&a.try_mul(x)?)?;
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// `|tr(self† · other)|`, used to measure distance up to a global phase.
    pub fn hs_overlap(&self, other: &OpMatrix) -> Result<Complex64> {
        self.check_dims(other)?;
        let a = self.to_complex_vec();
        let b = other.to_complex_vec();
        Ok(a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.to_complex_vec()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `min_φ ‖self − e^{iφ}·other‖_F`.
    pub fn distance_up_to_phase(&self, other: &OpMatrix) -> Result<f64> {
        let overlap = other.hs_overlap(self)?.norm();
        let sq = self.frobenius_norm().powi(2) + other.frobenius_norm().powi(2) - 2.0 * overlap;
        Ok(sq.max(0.0).sqrt())
    }

    /// The scalar `λ` with `self = λ·other` entrywise within `tol`, if there is one.
    pub fn proportionality(&self, other: &OpMatrix, tol: f64) -> Result<Option<Complex64>> {
        self.check_dims(other)?;
        let (x, y) = (self.to_complex_vec(), other.to_complex_vec());
        let pivot = (0..y.len())
            .max_by(|&i, &j| y[i].norm().total_cmp(&y[j].norm()))
            .expect("dim >= 1");
        if y[pivot].norm() == 0.0 {
            return Ok(x.iter().all(|z| z.norm() <= tol).then_some(Complex64::new(0.0, 0.0)));
        }
        let lambda = x[pivot] / y[pivot];
        let fits = x.iter().zip(&y).all(|(a, b)| (a - lambda * b).norm() <= tol);
        Ok(fits.then_some(lambda))
    }

    /// Number of structurally nonzero entries.
    pub fn nnz(&self) -> usize {
        match &self.data {
            Data::Exact(e) => (0..self.dim * self.dim)
                .filter(|&i| e.entry(i).iter().any(|c| *c != 0))
                .count(),
            Data::Float(v) => v.iter().filter(|z| z.norm() != 0.0).count(),
        }
    }
}

fn exact_mul(a: &ExactData, b: &ExactData, dim: usize) -> ExactData {
    let ring = a.ring;
    let phi = ring.phi();
    let nonzero = |d: &ExactData, idx: usize| d.entry(idx).iter().any(|c| *c != 0);
    let b_rows: Vec<Vec<usize>> = (0..dim)
        .map(|l| (0..dim).filter(|&j| nonzero(b, l * dim + j)).collect())
        .collect();
    let mut out = vec![0i64; dim * dim * phi];
    out.par_chunks_mut(dim * phi)
        .enumerate()
        .for_each(|(i, row)| {
            for l in 0..dim {
                let x = a.entry(i * dim + l);
                if x.iter().all(|c| *c == 0) {
                    continue;
                }
                for &j in &b_rows[l] {
                    ring.mul_acc(x, b.entry(l * dim + j), &mut row[j * phi..(j + 1) * phi]);
                }
            }
        });
    ExactData {
        ring,
        scale_log2: a.scale_log2 + b.scale_log2,
        coeffs: out,
    }
    .normalized()
}

fn float_mul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    let work = |(i, row): (usize, &mut [Complex64])| {
        for l in 0..dim {
            let x = a[i * dim + l];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for (o, y) in row.iter_mut().zip(&b[l * dim..(l + 1) * dim]) {
                *o += x * y;
            }
        }
    };
    if dim >= 64 {
        out.par_chunks_mut(dim).enumerate().for_each(work);
    } else {
        out.chunks_mut(dim).enumerate().for_each(work);
    }
    out
}

/// Permutation matrix of the twist map `|a⟩⊗|b⟩ ↦ |b⟩⊗|a⟩` on `ℂ^d ⊗ ℂ^d`.
pub fn twist_perm(d: usize, field: Field) -> OpMatrix {
    OpMatrix::permutation(d * d, field, |row| {
        let (b, a) = (row / d, row % d);
        d * a + b
    })
    .with_meta(format!("twist d={d}"))
}

impl fmt::Display for OpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let order = match self.field() {
            Field::Exact(r) => format!(" order={}", r.order()),
            Field::Float => String::new(),
        };
        write!(f, "# dim={} backend={}{}", self.dim, self.backend().as_str(), order)?;
        if let Some(m) = &self.meta {
            write!(f, " meta={m}")?;
        }
        writeln!(f)?;
        let cells: Vec<String> = (0..self.dim * self.dim)
            .map(|idx| self.entry(idx / self.dim, idx % self.dim).to_string())
            .collect();
        let width = cells.iter().map(|c| c.len()).max().unwrap_or(1);
        for row in cells.chunks(self.dim) {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "{}", line.join("  "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact8() -> Field {
        Field::Exact(CycRing::new(8).unwrap())
    }

    fn diag(field: Field, root: u64, exps: &[i64]) -> OpMatrix {
        OpMatrix::from_root_sums(exps.len(), field, |i, j| {
            if i == j {
                RootSum::root(root, exps[i])
            } else {
                RootSum::zero(root)
            }
        })
        .unwrap()
    }

    #[test]
    fn dagger_of_identity() {
        for f in [exact8(), Field::Float] {
            let id = OpMatrix::identity(3, f);
            assert_eq!(id.dagger(), id);
        }
    }

    #[test]
    fn kron_examples() {
        for f in [exact8(), Field::Float] {
            let i2 = OpMatrix::identity(2, f);
            assert_eq!(i2.kron(&i2).unwrap(), OpMatrix::identity(4, f));
            let q = diag(f, 2, &[0, 1]);
            let qq = q.kron(&q).unwrap();
            let expect = diag(f, 2, &[0, 1, 1, 0]);
            assert!(qq.mat_eq(&expect, 1e-12).unwrap().equal);
        }
        // block structure: kron(diag(a,b), M)[0..2,0..2] = a·M
        let f = exact8();
        let m = OpMatrix::from_root_sums(2, f, |i, j| RootSum::root(8, (i * 3 + j) as i64)).unwrap();
        let d = diag(f, 8, &[1, 5]);
        let k = d.kron(&m).unwrap();
        let a = CycNum::root(8, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = match m.entry(i, j) {
                    Scalar::Exact(x) => Scalar::Exact(&a * &x),
                    _ => unreachable!(),
                };
                assert_eq!(k.entry(i, j), expect);
            }
        }
    }

    #[test]
    fn twist_examples() {
        let f = exact8();
        assert_eq!(twist_perm(1, f), OpMatrix::identity(1, f));
        let t = twist_perm(2, f);
        let expect = OpMatrix::permutation(4, f, |i| [0, 2, 1, 3][i]);
        assert_eq!(t, expect);
        for d in 1..5 {
            let t = twist_perm(d, f);
            assert!(t.mul(&t).unwrap().is_identity(0.0));
        }
    }

    #[test]
    fn mat_eq_behaviour() {
        let id = OpMatrix::identity(3, Field::Float);
        let r = id.mat_eq(&id, 0.0).unwrap();
        assert!(r.equal && r.max_deviation == 0.0);
        let nudged = OpMatrix::from_complex_fn(3, |i, j| {
            if i == j {
                Complex64::new(1.0 + 1e-12, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let r = id.mat_eq(&nudged, 1e-9).unwrap();
        assert!(r.equal);
        assert!((r.max_deviation - 1e-12).abs() < 1e-15);
        assert!(!id.mat_eq(&nudged, 1e-13).unwrap().equal);
        assert!(matches!(
            id.mat_eq(&OpMatrix::identity(2, Field::Float), 0.0),
            Err(Error::DimMismatch { .. })
        ));
        assert!(matches!(
            id.mat_eq(&OpMatrix::identity(3, exact8()), 0.0),
            Err(Error::BackendMismatch)
        ));
    }

    #[test]
    fn exact_inequality_reports_deviation() {
        let f = exact8();
        let a = diag(f, 4, &[0, 1]);
        let b = diag(f, 4, &[0, 0]);
        let r = a.mat_eq(&b, 1.0).unwrap();
        assert!(!r.equal);
        assert!((r.max_deviation - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mixed_orders_promote() {
        let a = OpMatrix::identity(2, exact8());
        let b = OpMatrix::identity(2, Field::Exact(CycRing::new(16).unwrap()));
        assert_eq!(a, b);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.field(), Field::Exact(CycRing::new(16).unwrap()));
        let c = OpMatrix::identity(2, Field::Exact(CycRing::new(5).unwrap()));
        assert!(a.mul(&c).is_err());
    }

    #[test]
    fn pow_and_scalar_mul() {
        let f = exact8();
        let shift = OpMatrix::permutation(4, f, |i| (i + 3) % 4);
        assert!(shift.pow(4).unwrap().is_identity(0.0));
        assert!(!shift.pow(2).unwrap().is_identity(0.0));
        let half = Scalar::Exact(CycNum::one(8).unwrap().scale_pow2(1));
        let h = shift.scalar_mul(&half).unwrap();
        let two = Scalar::Exact(CycNum::from_int(8, 2).unwrap());
        assert_eq!(h.scalar_mul(&two).unwrap(), shift);
    }

    #[test]
    fn cyc_entries_round_trip() {
        let entries: Vec<CycNum> = (0..4)
            .map(|k| CycNum::root(8, k).unwrap().scale_pow2(k as i32))
            .collect();
        let m = OpMatrix::from_cyc_entries(2, &entries).unwrap();
        for (idx, e) in entries.iter().enumerate() {
            assert_eq!(m.entry(idx / 2, idx % 2), Scalar::Exact(e.clone()));
        }
    }

    #[test]
    fn distance_up_to_phase_ignores_global_phase() {
        let id = OpMatrix::identity(4, Field::Float);
        let rotated = id.scalar_mul(&Scalar::Float(Complex64::from_polar(1.0, 0.7))).unwrap();
        assert!(id.distance_up_to_phase(&rotated).unwrap() < 1e-12);
        let other = OpMatrix::permutation(4, Field::Float, |i| (i + 1) % 4);
        assert!((id.distance_up_to_phase(&other).unwrap() - 8f64.sqrt()).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn mat(dim: usize) -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
            (
                prop::collection::vec(-2i64..3, dim * dim),
                prop::collection::vec(0i64..8, dim * dim),
            )
        }

        fn build(field: Field, dim: usize, (c, e): &(Vec<i64>, Vec<i64>)) -> OpMatrix {
            OpMatrix::from_root_sums(dim, field, |i, j| {
                RootSum::zero(8).plus(c[i * dim + j], e[i * dim + j])
            })
            .unwrap()
        }

        proptest! {
            #[test]
            fn kron_is_associative(a in mat(2), b in mat(2), c in mat(3)) {
                let f = exact8();
                let (a, b, c) = (build(f, 2, &a), build(f, 2, &b), build(f, 3, &c));
                let left = a.kron(&b).unwrap().kron(&c).unwrap();
                let right = a.kron(&b.kron(&c).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }

            #[test]
            fn dagger_reverses_products(a in mat(3), b in mat(3)) {
                for f in [exact8(), Field::Float] {
                    let (x, y) = (build(f, 3, &a), build(f, 3, &b));
                    let lhs = x.mul(&y).unwrap().dagger();
                    let rhs = y.dagger().mul(&x.dagger()).unwrap();
                    prop_assert!(lhs.mat_eq(&rhs, 1e-12).unwrap().equal);
                }
            }

            #[test]
            fn exact_and_float_products_agree(a in mat(4), b in mat(4)) {
                let e = build(exact8(), 4, &a).mul(&build(exact8(), 4, &b)).unwrap();
                let fl = build(Field::Float, 4, &a).mul(&build(Field::Float, 4, &b)).unwrap();
                prop_assert!(e.to_float().mat_eq(&fl, 1e-9).unwrap().equal);
            }
        }
    }
}
