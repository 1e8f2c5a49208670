//! Metaplectic representations.
//!
//! For `N = 2^n` the representation acts on `ℂ^N ⊗ ℂ^N` (composite index `N k₁ + k₂`):
//!
//! * `U(S)` has entries `N⁻¹ ω^{p(k₁j₂ + k₂j₁)}`,
//! * `U(T) = diag ω^{−p k₁k₂}`,
//! * `U(D(a))` is the image of the word `T^{−a} S T^{−a⁻¹} S⁻¹ T^{−a} S⁻¹`,
//!
//! and `U(A)` has the closed forms of [`matrixdec1`], [`goodd`], [`gozero`] and
//! [`matrixdec3`], all of which agree with the image of the word from
//! [`crate::sl2::decompose`]. Every `U(A)` satisfies `U⁻¹ J_{r,s} U = J_{(r,s)A}`.
//!
//! For an odd prime `N` the Weil representation acts on `ℂ^N` and is built in floating point.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::ntheory::{is_prime, jacobi_symbol, solve_linear_congruence};
use crate::exactnum::ZMod;
use crate::heisenberg::{fourier, p_matrix, q_matrix, HWParams};
use crate::magnetic::{j_odd, j_twisted, TorusPoint};
use crate::matrix::{twist_perm, Backend, OpMatrix, RootSum};
use crate::report::{Checker, ReportParams, VerifyReport};
use crate::sl2::{decompose, GeneratorWord, SL2Element, Token};

fn twisted(params: &HWParams) -> Result<(usize, u32)> {
    match params.qubit_count() {
        Some(n) => Ok((params.dim(), n)),
        None => Err(Error::InvalidParams("this construction needs N = 2^n".into())),
    }
}

fn same_modulus(params: &HWParams, elem: &SL2Element) -> Result<()> {
    if elem.modulus() != params.modulus() {
        return Err(Error::ModulusMismatch {
            left: elem.modulus(),
            right: params.modulus(),
        });
    }
    Ok(())
}

/// Builds a `N² × N²` matrix from `(k₁, k₂, j₁, j₂) ↦ entry`.
fn tensor_matrix(
    params: &HWParams,
    backend: Backend,
    entry: impl Fn(i64, i64, i64, i64) -> RootSum + Sync,
) -> Result<OpMatrix> {
    let n = params.dim();
    OpMatrix::from_root_sums(n * n, params.field(backend)?, |row, col| {
        entry(
            (row / n) as i64,
            (row % n) as i64,
            (col / n) as i64,
            (col % n) as i64,
        )
    })
}

pub fn u_s(params: &HWParams, backend: Backend) -> Result<OpMatrix> {
    let (_, n) = twisted(params)?;
    tensor_matrix(params, backend, |k1, k2, j1, j2| {
        params.phase(k1 * j2 + k2 * j1).over_sqrt2_pow(2 * n as i32)
    })
    .map(|m| m.with_meta("U(S)"))
}

pub fn u_t(params: &HWParams, backend: Backend) -> Result<OpMatrix> {
    u_t_pow(params, params.zmod(1), backend)
}

/// `U(T)^k = diag ω^{−pk k₁k₂}`.
pub fn u_t_pow(params: &HWParams, k: ZMod, backend: Backend) -> Result<OpMatrix> {
    twisted(params)?;
    let k = k.value() as i64;
    tensor_matrix(params, backend, |k1, k2, j1, j2| {
        if k1 == j1 && k2 == j2 {
            params.phase(-k * k1 * k2)
        } else {
            RootSum::zero(params.modulus())
        }
    })
    .map(|m| m.with_meta(format!("U(T^{k})")))
}

/// `N⁻¹ Σ_{s₁,s₂} ω^{p s₁s₂} Q^{s₁} ⊗ Q^{s₂}`.
pub fn u_t_from_clock(params: &HWParams, backend: Backend) -> Result<OpMatrix> {
    let (dim, n) = twisted(params)?;
    let field = params.field(backend)?;
    let q = q_matrix(params, backend)?;
    let powers: Vec<OpMatrix> = (0..dim as u64).map(|s| q.pow(s)).collect::<Result<_>>()?;
    let mut acc = OpMatrix::zeros(dim * dim, field);
    for (s1, a) in powers.iter().enumerate() {
        for (s2, b) in powers.iter().enumerate() {
            let w = params
                .phase((s1 * s2) as i64)
                .over_sqrt2_pow(2 * n as i32)
                .to_scalar(&field)?;
            acc = acc.add(&a.kron(b)?.scalar_mul(&w)?)?;
        }
    }
    Ok(acc)
}

/// `τ · (F ⊗ F)`.
pub fn u_s_from_fourier(params: &HWParams, backend: Backend) -> Result<OpMatrix> {
    let (dim, _) = twisted(params)?;
    let f = fourier(params, backend)?;
    twist_perm(dim, params.field(backend)?).mul(&f.kron(&f)?)
}

/// `U(D(a))` as the image of its generator word.
pub fn u_d(params: &HWParams, a: ZMod, backend: Backend) -> Result<OpMatrix> {
    twisted(params)?;
    let (_, word) = crate::sl2::dilatation(a)?;
    Ok(u_word(params, &word, backend)?.with_meta(format!("U(D({}))", a.value())))
}

/// The permutation `|k₁, k₂⟩ ↦ |a⁻¹k₁, a k₂⟩`, i.e. nonzero entries at `(k₁,k₂), (a k₁, a⁻¹ k₂)`.
pub fn u_d_permutation(params: &HWParams, a: ZMod, backend: Backend) -> Result<OpMatrix> {
    let (dim, _) = twisted(params)?;
    let inv = a.inv()?;
    let (a, inv) = (a.value() as usize, inv.value() as usize);
    Ok(OpMatrix::permutation(dim * dim, params.field(backend)?, |row| {
        let (k1, k2) = (row / dim, row % dim);
        dim * ((a * k1) % dim) + (inv * k2) % dim
    }))
}

/// Product of the images of the word's tokens.
pub fn u_word(params: &HWParams, word: &GeneratorWord, backend: Backend) -> Result<OpMatrix> {
    let (dim, _) = twisted(params)?;
    if word.modulus != params.modulus() {
        return Err(Error::ModulusMismatch {
            left: word.modulus,
            right: params.modulus(),
        });
    }
    let s = u_s(params, backend)?;
    let mut acc = OpMatrix::identity(dim * dim, params.field(backend)?);
    for token in &word.tokens {
        let img = match token {
            Token::T(k) => u_t_pow(params, *k, backend)?,
            Token::S => s.clone(),
            Token::SInv => s.dagger(),
            Token::S2 => s.mul(&s)?,
            Token::D(a) => u_d(params, *a, backend)?,
        };
        acc = acc.mul(&img)?;
    }
    Ok(acc)
}

/// Image of the word returned by [`decompose`].
pub fn u_decomposed(params: &HWParams, elem: &SL2Element, backend: Backend) -> Result<OpMatrix> {
    same_modulus(params, elem)?;
    u_word(params, &decompose(elem)?, backend)
}

fn branch_error(what: &str, elem: &SL2Element) -> Error {
    Error::BadBranch(format!("{what} does not apply to {elem}"))
}

fn ints(elem: &SL2Element) -> (i64, i64, i64, i64) {
    let [a, b, c, d] = elem.to_ints();
    (a as i64, b as i64, c as i64, d as i64)
}

/// Unit-`d` closed form with the inner sum over `r` evaluated directly:
/// `N⁻¹ Σ_r δ(−d⁻¹k₁ + cd⁻¹r + j₁) ω^{p(−bd⁻¹k₁k₂ + (−d⁻¹k₂ + j₂) r)}`.
pub fn matrixdec1(params: &HWParams, elem: &SL2Element, backend: Backend) -> Result<OpMatrix> {
    let (dim, n) = twisted(params)?;
    same_modulus(params, elem)?;
    let dinv = elem.d.inv().map_err(|_| branch_error("unit-d form", elem))?;
    let bd = (elem.b * dinv).value() as i64;
    let cd = (elem.c * dinv).value();
    let di = dinv.value() as i64;
    let m = dim as u64;
    let sols: Vec<Vec<u64>> = (0..m).map(|v| solve_linear_congruence(cd, v, m)).collect();
    tensor_matrix(params, backend, |k1, k2, j1, j2| {
        let target = params.idx(di * k1 - j1);
        let mut sum = RootSum::zero(m).over_sqrt2_pow(2 * n as i32);
        for &r in &sols[target] {
            sum = sum.plus(1, params.scaled(-bd * k1 * k2 + (-di * k2 + j2) * r as i64));
        }
        sum
    })
    .map(|u| u.with_meta("U(A) unit-d sum"))
}

/// Unit-`d` form when `c d⁻¹` is also a unit:
/// `N⁻¹ ω^{p(−(b/d + c⁻¹d⁻¹) k₁k₂ − (c/d)⁻¹ j₁j₂ + c⁻¹(k₂j₁ + j₂k₁))}`.
pub fn goodd(params: &HWParams, elem: &SL2Element, backend: Backend) -> Result<OpMatrix> {
    let (_, n) = twisted(params)?;
    same_modulus(params, elem)?;
    let err = || branch_error("unit c/d form", elem);
    let dinv = elem.d.inv().map_err(|_| err())?;
    let cinv = elem.c.inv().map_err(|_| err())?;
    let cd_inv = (elem.c * dinv).inv().map_err(|_| err())?;
    let x = (elem.b * dinv + cinv * dinv).value() as i64;
    let y = cd_inv.value() as i64;
    let ci = cinv.value() as i64;
    tensor_matrix(params, backend, |k1, k2, j1, j2| {
        params
            .phase(-x * k1 * k2 - y * j1 * j2 + ci * (k2 * j1 + j2 * k1))
            .over_sqrt2_pow(2 * n as i32)
    })
    .map(|u| u.with_meta("U(A) unit c/d"))
}

/// `c = 0`: `ω^{−p b d⁻¹ k₁k₂} δ(j₁ − d⁻¹k₁) δ(j₂ − d⁻¹k₂)`.
pub fn gozero(params: &HWParams, elem: &SL2Element, backend: Backend) -> Result<OpMatrix> {
    twisted(params)?;
    same_modulus(params, elem)?;
    if !elem.c.is_zero() {
        return Err(branch_error("c = 0 form", elem));
    }
    let dinv = elem.d.inv().map_err(|_| branch_error("c = 0 form", elem))?;
    let bd = (elem.b * dinv).value() as i64;
    let di = dinv.value() as i64;
    tensor_matrix(params, backend, |k1, k2, j1, j2| {
        if params.idx(di * k1) == j1 as usize && params.idx(di * k2) == j2 as usize {
            params.phase(-bd * k1 * k2)
        } else {
            RootSum::zero(params.modulus())
        }
    })
    .map(|u| u.with_meta("U(A) c=0"))
}

/// Non-unit `d` (so `c` is a unit): `N⁻¹ ω^{p(−(a/c)k₁k₂ + (k₁j₂ + k₂j₁)/c − (d/c) j₁j₂)}`.
pub fn matrixdec3(params: &HWParams, elem: &SL2Element, backend: Backend) -> Result<OpMatrix> {
    let (_, n) = twisted(params)?;
    same_modulus(params, elem)?;
    if elem.d.is_unit() {
        return Err(branch_error("non-unit d form", elem));
    }
    let cinv = elem.c.inv().map_err(|_| branch_error("non-unit d form", elem))?;
    let ac = (elem.a * cinv).value() as i64;
    let dc = (elem.d * cinv).value() as i64;
    let ci = cinv.value() as i64;
    tensor_matrix(params, backend, |k1, k2, j1, j2| {
        params
            .phase(-ac * k1 * k2 + ci * (k1 * j2 + k2 * j1) - dc * j1 * j2)
            .over_sqrt2_pow(2 * n as i32)
    })
    .map(|u| u.with_meta("U(A) non-unit d"))
}

/// Which closed form [`u_a_closed`] used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedForm {
    UnitDSum,
    UnitCOverD,
    CZero,
    NonUnitD,
}

impl ClosedForm {
    pub fn as_str(self) -> &'static str {
        match self {
            ClosedForm::UnitDSum => "unit-d-sum",
            ClosedForm::UnitCOverD => "unit-c-over-d",
            ClosedForm::CZero => "c-zero",
            ClosedForm::NonUnitD => "non-unit-d",
        }
    }

    pub fn select(elem: &SL2Element) -> ClosedForm {
        match elem.d.inv() {
            Ok(_) if elem.c.is_zero() => ClosedForm::CZero,
            Ok(dinv) if (elem.c * dinv).is_unit() => ClosedForm::UnitCOverD,
            Ok(_) => ClosedForm::UnitDSum,
            Err(_) => ClosedForm::NonUnitD,
        }
    }
}

/// Closed-form `U(A)`, choosing the most specific applicable form.
pub fn u_a_closed(params: &HWParams, elem: &SL2Element, backend: Backend) -> Result<(OpMatrix, ClosedForm)> {
    let form = ClosedForm::select(elem);
    let u = match form {
        ClosedForm::CZero => gozero(params, elem, backend)?,
        ClosedForm::UnitCOverD => goodd(params, elem, backend)?,
        ClosedForm::UnitDSum => matrixdec1(params, elem, backend)?,
        ClosedForm::NonUnitD => matrixdec3(params, elem, backend)?,
    };
    Ok((u, form))
}

/// `U(A)` for any element, with the branch recorded in the matrix label.
pub fn u_general(params: &HWParams, elem: &SL2Element, backend: Backend) -> Result<OpMatrix> {
    let (u, form) = u_a_closed(params, elem, backend)?;
    Ok(u.with_meta(format!("U{} branch={}", elem, form.as_str())))
}

fn odd_prime(modulus: u64) -> Result<()> {
    if modulus < 3 || !is_prime(modulus) {
        return Err(Error::InvalidParams(format!("{modulus} is not an odd prime")));
    }
    Ok(())
}

fn omega(modulus: u64, e: i64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * e.rem_euclid(modulus as i64) as f64 / modulus as f64)
}

/// `1` for `N ≡ 1 (mod 4)`, `−i` for `N ≡ 3 (mod 4)`.
pub fn odd_bracket(modulus: u64) -> Complex64 {
    if modulus % 4 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, -1.0)
    }
}

/// `σ(r) = (r | N) · {1 or −i}`.
pub fn sigma(r: i64, modulus: u64) -> Complex64 {
    odd_bracket(modulus) * jacobi_symbol(r, modulus) as f64
}

/// `(−1)^N i^t N^{−1/2} ω^{lm}` with `t = 0` for `N ≡ 1` and `t = 1` for `N ≡ 3 (mod 4)`.
pub fn weil_odd_s(modulus: u64) -> Result<OpMatrix> {
    odd_prime(modulus)?;
    let t = if modulus % 4 == 1 { 0 } else { 1 };
    let pre = -Complex64::i().powu(t) / (modulus as f64).sqrt();
    Ok(OpMatrix::from_complex_fn(modulus as usize, |l, m| {
        pre * omega(modulus, (l * m) as i64)
    })
    .with_meta(format!("Weil U(S) N={modulus}")))
}

/// Scalar on the dilatation: `σ(1)σ(2 − a − a⁻¹)`, pinned to `1` at `a = 1` where the
/// formula degenerates. For `a ≠ 1` it equals `(a | N)`.
pub fn weil_odd_d_factor(modulus: u64, a: ZMod) -> Result<Complex64> {
    let inv = a.inv()?;
    if a.value() == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let arg = 2 - a.value() as i64 - inv.value() as i64;
    Ok(sigma(1, modulus) * sigma(arg, modulus))
}

/// `U(D(a))` with entries `σ(1)σ(2−a−a⁻¹)` at `(l, a l)`.
pub fn weil_odd_d(modulus: u64, a: ZMod) -> Result<OpMatrix> {
    odd_prime(modulus)?;
    if a.modulus() != modulus {
        return Err(Error::ModulusMismatch {
            left: a.modulus(),
            right: modulus,
        });
    }
    let f = weil_odd_d_factor(modulus, a)?;
    let av = a.value() as usize;
    let n = modulus as usize;
    Ok(OpMatrix::from_complex_fn(n, |l, m| {
        if m == (av * l) % n {
            f
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .with_meta(format!("Weil U(D({av})) N={modulus}")))
}

/// Generic-case formula `N^{−1/2} (−2c | N) {1 or −i} ω^{−(al² + dm² − 2lm)/(2c)}`, needs `c ≠ 0`.
pub fn weil_odd_generic(modulus: u64, elem: &SL2Element) -> Result<OpMatrix> {
    odd_prime(modulus)?;
    if elem.modulus() != modulus {
        return Err(Error::ModulusMismatch {
            left: elem.modulus(),
            right: modulus,
        });
    }
    if elem.c.is_zero() {
        return Err(Error::NonGeneric);
    }
    let (a, _, c, d) = ints(elem);
    let inv2c = ZMod::wrap(2 * c, modulus).inv()?.value() as i64;
    let pre = odd_bracket(modulus) * jacobi_symbol(-2 * c, modulus) as f64 / (modulus as f64).sqrt();
    Ok(OpMatrix::from_complex_fn(modulus as usize, |l, m| {
        let (l, m) = (l as i64, m as i64);
        pre * omega(modulus, -((a * l * l + d * m * m - 2 * l * m) % modulus as i64) * inv2c)
    })
    .with_meta(format!("Weil generic {elem}")))
}

/// Total Weil map: the generic formula for `c ≠ 0`, otherwise `U(D(a)) · U(T)^{a⁻¹b}` with
/// `U(T) = U_gen(S)⁻¹ U_gen(ST)`.
pub fn weil_odd_general(modulus: u64, elem: &SL2Element) -> Result<OpMatrix> {
    if !elem.c.is_zero() {
        return weil_odd_generic(modulus, elem);
    }
    odd_prime(modulus)?;
    let s = SL2Element::s(modulus);
    let st = s.mul(&SL2Element::t(modulus));
    let ut = weil_odd_generic(modulus, &s)?
        .dagger()
        .mul(&weil_odd_generic(modulus, &st)?)?;
    let shift = (elem.a.inv()? * elem.b).value();
    Ok(weil_odd_d(modulus, elem.a)?
        .mul(&ut.pow(shift)?)?
        .with_meta(format!("Weil {elem}")))
}

/// Which magnetic translations a metaplectic operator is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    TwistedEven(HWParams),
    WeilOdd(u64),
}

impl Flavor {
    pub fn modulus(&self) -> u64 {
        match self {
            Flavor::TwistedEven(p) => p.modulus(),
            Flavor::WeilOdd(n) => *n,
        }
    }
}

/// All translations `J_{r,s}` of one flavor, indexed by `r·N + s`.
pub struct TranslationTable {
    flavor: Flavor,
    mats: Vec<OpMatrix>,
}

impl TranslationTable {
    pub fn new(flavor: Flavor, backend: Backend) -> Result<Self> {
        let n = flavor.modulus();
        let mats = TorusPoint::all(n)
            .into_par_iter()
            .map(|pt| match flavor {
                Flavor::TwistedEven(params) => j_twisted(&params, pt, backend),
                Flavor::WeilOdd(n) => j_odd(n, pt, backend),
            })
            .collect::<Result<_>>()?;
        Ok(Self { flavor, mats })
    }

    pub fn get(&self, pt: TorusPoint) -> &OpMatrix {
        let n = self.flavor.modulus();
        &self.mats[(pt.r.value() * n + pt.s.value()) as usize]
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }
}

/// Checks `J_{r,s} · U = U · J_{(r,s)A}` (equivalently `U⁻¹ J_{r,s} U = J_{(r,s)A}`)
/// for every phase-space point, in lexicographic order.
pub fn check_metaplectic(
    checker: &mut Checker,
    u: &OpMatrix,
    elem: &SL2Element,
    table: &TranslationTable,
    tol: f64,
) -> Result<()> {
    let outcomes: Vec<(TorusPoint, crate::matrix::MatEq)> = TorusPoint::all(table.flavor.modulus())
        .into_par_iter()
        .map(|pt| {
            let lhs = table.get(pt).mul(u)?;
            let rhs = u.mul(table.get(elem.act_on_point(pt)))?;
            Ok((pt, lhs.mat_eq(&rhs, tol)?))
        })
        .collect::<Result<_>>()?;
    for (pt, eq) in outcomes {
        checker.check_eq(
            "metaplectic",
            || format!("A={elem} (r,s)=({},{})", pt.r.value(), pt.s.value()),
            eq,
        );
    }
    Ok(())
}

pub fn verify_metaplectic(u: &OpMatrix, elem: &SL2Element, flavor: Flavor, tol: f64) -> Result<VerifyReport> {
    let table = TranslationTable::new(flavor, u.backend())?;
    let mut checker = Checker::new();
    check_metaplectic(&mut checker, u, elem, &table, tol)?;
    let params = match flavor {
        Flavor::TwistedEven(p) => ReportParams {
            n: p.qubit_count(),
            modulus: Some(p.modulus()),
            p: Some(p.p()),
            backend: Some(u.backend()),
            tol,
            ..Default::default()
        },
        Flavor::WeilOdd(n) => ReportParams {
            modulus: Some(n),
            backend: Some(u.backend()),
            tol,
            ..Default::default()
        },
    };
    Ok(checker.finish("metaplectic", params))
}

/// Generator relations of the twisted representation:
/// `U(S)⁴ = I`, `(U(S)U(T))⁶ = I`, `U(T)^N = I`, `U(S)² = U(D(−1))`, `U(D(a))U(T) = U(T)^{a²}U(D(a))`,
/// `U(S)U(D(a)) = U(D(a⁻¹))U(S)`, `U(D(a))U(D(b)) = U(D(ab))`, the clock-sum form of `U(T)`,
/// `U(S)⁻¹(Q⊗I)U(S) = I⊗P`, `U(S)⁻¹(I⊗Q)U(S) = P⊗I`, and at `p = 1` also `U(S) = τ(F⊗F)`.
pub fn check_group_relations(checker: &mut Checker, params: &HWParams, backend: Backend, tol: f64) -> Result<()> {
    let (dim, _) = twisted(params)?;
    let n = params.modulus();
    let field = params.field(backend)?;
    let label = |extra: String| move || format!("N={n} p={}{extra}", params.p());
    let s = u_s(params, backend)?;
    let t = u_t(params, backend)?;
    let sdag = s.dagger();
    let id = OpMatrix::identity(dim * dim, field);
    let small_id = OpMatrix::identity(dim, field);

    checker.check_eq("U(S)^4 = I", label(String::new()), s.pow(4)?.mat_eq(&id, tol)?);
    checker.check_eq("(U(S)U(T))^6 = I", label(String::new()), s.mul(&t)?.pow(6)?.mat_eq(&id, tol)?);
    checker.check_eq("U(T)^N = I", label(String::new()), t.pow(n)?.mat_eq(&id, tol)?);
    let minus_one = params.zmod(-1);
    checker.check_eq(
        "U(S)^2 = U(D(-1))",
        label(String::new()),
        s.mul(&s)?.mat_eq(&u_d(params, minus_one, backend)?, tol)?,
    );
    let units: Vec<ZMod> = (1..n as i64).step_by(2).map(|a| params.zmod(a)).collect();
    let dils = units
        .iter()
        .map(|&a| u_d(params, a, backend))
        .collect::<Result<Vec<_>>>()?;
    let dil = |a: ZMod| &dils[(a.value() / 2) as usize];
    for (&a, ud) in units.iter().zip(&dils) {
        let lhs = ud.mul(&t)?;
        let rhs = u_t_pow(params, a * a, backend)?.mul(ud)?;
        checker.check_eq("U(D(a))U(T) = U(T)^(a^2)U(D(a))", label(format!(" a={}", a.value())), lhs.mat_eq(&rhs, tol)?);
        let lhs = s.mul(ud)?;
        let rhs = dil(a.inv()?).mul(&s)?;
        checker.check_eq("U(S)U(D(a)) = U(D(1/a))U(S)", label(format!(" a={}", a.value())), lhs.mat_eq(&rhs, tol)?);
        for &b in &units {
            let lhs = ud.mul(dil(b))?;
            checker.check_eq(
                "U(D(a))U(D(b)) = U(D(ab))",
                label(format!(" a={} b={}", a.value(), b.value())),
                lhs.mat_eq(dil(a * b), tol)?,
            );
        }
    }
    checker.check_eq("U(T) from clock sum", label(String::new()), u_t_from_clock(params, backend)?.mat_eq(&t, tol)?);
    let q = q_matrix(params, backend)?;
    let pm = p_matrix(params, backend)?;
    let lhs = sdag.mul(&q.kron(&small_id)?)?.mul(&s)?;
    checker.check_eq("U(S)^-1 (Q x I) U(S) = I x P", label(String::new()), lhs.mat_eq(&small_id.kron(&pm)?, tol)?);
    let lhs = sdag.mul(&small_id.kron(&q)?)?.mul(&s)?;
    checker.check_eq("U(S)^-1 (I x Q) U(S) = P x I", label(String::new()), lhs.mat_eq(&pm.kron(&small_id)?, tol)?);
    if params.p() == 1 {
        checker.check_eq("U(S) = twist (F x F)", label(String::new()), s.mat_eq(&u_s_from_fourier(params, backend)?, tol)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::{enumerate, sample};

    const E: Backend = Backend::Exact;
    const F: Backend = Backend::Float;

    fn hw(n: u32, p: u64) -> HWParams {
        HWParams::qubits(n, p).unwrap()
    }

    fn el(a: i64, b: i64, c: i64, d: i64, n: u64) -> SL2Element {
        SL2Element::from_ints(a, b, c, d, n).unwrap()
    }

    #[test]
    fn generator_relations() {
        for n in 1..=3 {
            for p in HWParams::all_labels(n) {
                let mut ch = Checker::new();
                check_group_relations(&mut ch, &hw(n, p), E, 0.0).unwrap();
                assert_eq!(ch.failure_count(), 0, "n={n} p={p}");
                assert!(ch.checks_run() >= 9);
            }
        }
    }

    #[test]
    fn u_s_examples() {
        let s = u_s(&hw(1, 1), F).unwrap();
        for j in 0..4 {
            assert!((s.entry_complex(0, j) - 0.5).norm() < 1e-12);
            for i in 0..4 {
                assert!((s.entry_complex(i, j).norm() - 0.5).abs() < 1e-12);
            }
        }
        for n in 1..=3 {
            for p in HWParams::all_labels(n) {
                let params = hw(n, p);
                let s = u_s(&params, E).unwrap();
                assert!(s.pow(4).unwrap().is_identity(0.0));
                assert!(s.is_unitary(0.0).unwrap());
            }
            let params = hw(n, 1);
            assert_eq!(u_s(&params, E).unwrap(), u_s_from_fourier(&params, E).unwrap());
        }
    }

    #[test]
    fn u_t_examples() {
        let params = hw(2, 1);
        let t = u_t(&params, F).unwrap();
        for k2 in 0..4 {
            assert!((t.entry_complex(k2, k2) - 1.0).norm() < 1e-12);
        }
        assert!((t.entry_complex(5, 5) + Complex64::i()).norm() < 1e-12);
        for n in 1..=3 {
            for p in HWParams::all_labels(n) {
                let params = hw(n, p);
                let t = u_t(&params, E).unwrap();
                assert!(t.pow(params.modulus()).unwrap().is_identity(0.0));
                assert_eq!(t, u_t_from_clock(&params, E).unwrap());
            }
        }
    }

    #[test]
    fn dilatation_images() {
        assert!(u_d(&hw(2, 1), ZMod::new(1, 4).unwrap(), E).unwrap().is_identity(0.0));
        for n in 1..=3 {
            for p in HWParams::all_labels(n) {
                let params = hw(n, p);
                let nn = params.modulus();
                for a in (1..nn as i64).step_by(2) {
                    let a = ZMod::new(a, nn).unwrap();
                    let ud = u_d(&params, a, E).unwrap();
                    assert_eq!(ud, u_d_permutation(&params, a, E).unwrap());
                    let back = u_d(&params, a.inv().unwrap(), E).unwrap();
                    assert!(ud.mul(&back).unwrap().is_identity(0.0));
                }
            }
        }
    }

    #[test]
    fn dilatation_metaplectic_n2() {
        let params = hw(2, 1);
        let table = TranslationTable::new(Flavor::TwistedEven(params), E).unwrap();
        for a in [1i64, 3] {
            let a = ZMod::new(a, 4).unwrap();
            let ud = u_d(&params, a, E).unwrap();
            let elem = SL2Element::dilatation(a).unwrap();
            for pt in TorusPoint::all(4) {
                let lhs = ud.dagger().mul(table.get(pt)).unwrap().mul(&ud).unwrap();
                let image = TorusPoint {
                    r: a * pt.r,
                    s: a.inv().unwrap() * pt.s,
                };
                assert_eq!(elem.act_on_point(pt), image);
                assert_eq!(&lhs, table.get(image));
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let params = hw(2, 1);
        assert!(gozero(&params, &el(1, 0, 0, 1, 4), E).unwrap().is_identity(0.0));
        assert_eq!(gozero(&params, &SL2Element::t(4), E).unwrap(), u_t(&params, E).unwrap());
        assert_eq!(matrixdec3(&params, &SL2Element::s(4), E).unwrap(), u_s(&params, E).unwrap());
        assert!(matches!(
            matrixdec3(&params, &SL2Element::t(4), E),
            Err(Error::BadBranch(_))
        ));
        assert!(matches!(gozero(&params, &SL2Element::s(4), E), Err(Error::BadBranch(_))));
        assert!(matches!(goodd(&params, &el(1, 0, 2, 1, 4), E), Err(Error::BadBranch(_))));
        let st = SL2Element::s(8).mul(&SL2Element::t(8));
        assert_eq!(st.d.value(), 1);
        let u = u_general(&hw(3, 1), &st, E).unwrap();
        assert!(u.meta().unwrap().contains("branch=unit-c-over-d"));
        let u = u_general(&hw(3, 1), &SL2Element::s(8), E).unwrap();
        assert!(u.meta().unwrap().contains("branch=non-unit-d"));
    }

    #[test]
    fn closed_forms_match_words_n1_n2() {
        for n in 1..=2 {
            for p in HWParams::all_labels(n) {
                let params = hw(n, p);
                for g in enumerate(params.modulus()).unwrap() {
                    let (u, form) = u_a_closed(&params, &g, E).unwrap();
                    assert_eq!(u, u_decomposed(&params, &g, E).unwrap(), "{g} {form:?}");
                    if matches!(form, ClosedForm::UnitCOverD | ClosedForm::CZero) {
                        assert_eq!(u, matrixdec1(&params, &g, E).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn general_inverse_pairs() {
        let params = hw(3, 1);
        for g in sample(8, 3, 20).unwrap() {
            let u = u_general(&params, &g, E).unwrap();
            let v = u_general(&params, &g.inv(), E).unwrap();
            assert!(u.mul(&v).unwrap().is_identity(0.0));
        }
    }

    #[test]
    fn verify_examples() {
        for n in 1..=2 {
            for p in HWParams::all_labels(n) {
                let params = hw(n, p);
                let nn = params.modulus();
                let r = verify_metaplectic(&u_s(&params, E).unwrap(), &SL2Element::s(nn), Flavor::TwistedEven(params), 0.0).unwrap();
                assert!(r.passed && r.checks_run == nn * nn);
                let r = verify_metaplectic(&u_t(&params, E).unwrap(), &SL2Element::t(nn), Flavor::TwistedEven(params), 0.0).unwrap();
                assert!(r.passed);
            }
        }
        let params = hw(1, 1);
        let id = OpMatrix::identity(4, params.field(E).unwrap());
        let s = SL2Element::s(2);
        let r = verify_metaplectic(&id, &s, Flavor::TwistedEven(params), 0.0).unwrap();
        let moved = TorusPoint::all(2).into_iter().filter(|x| s.act_on_point(*x) != *x).count();
        assert_eq!(r.failures.len(), moved);
        assert_eq!(moved, 2);
    }

    #[test]
    fn odd_weil_examples() {
        let s3 = weil_odd_s(3).unwrap();
        let expect = -Complex64::i() / 3f64.sqrt();
        assert!((s3.entry_complex(0, 0) - expect).norm() < 1e-12);
        assert!(s3.is_unitary(1e-12).unwrap());
        for n in [3u64, 5, 7, 11] {
            assert!(weil_odd_d(n, ZMod::new(1, n).unwrap()).unwrap().is_identity(1e-15));
            for a in 2..n as i64 {
                let a = ZMod::new(a, n).unwrap();
                let f = weil_odd_d_factor(n, a).unwrap();
                assert!((f - jacobi_symbol(a.value() as i64, n) as f64).norm() < 1e-12);
            }
        }
        let s5 = SL2Element::s(5);
        let g = weil_odd_generic(5, &s5).unwrap();
        let phase = g.proportionality(&weil_odd_s(5).unwrap(), 1e-12).unwrap().unwrap();
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(matches!(weil_odd_generic(5, &SL2Element::t(5)), Err(Error::NonGeneric)));
        assert!(weil_odd_general(5, &SL2Element::identity(5)).unwrap().is_identity(1e-12));
    }

    #[test]
    fn odd_weil_metaplectic_n3() {
        let table = TranslationTable::new(Flavor::WeilOdd(3), F).unwrap();
        let mut c = Checker::new();
        for g in enumerate(3).unwrap() {
            let u = weil_odd_general(3, &g).unwrap();
            check_metaplectic(&mut c, &u, &g, &table, 1e-9).unwrap();
        }
        assert_eq!(c.failure_count(), 0);
        assert_eq!(c.checks_run(), 24 * 9);
    }
}
