//! Weil representation of the quadratic module `(ℤ_N², x ↦ x₁x₂/N)` and the chirp-based
//! operators on `ℂ^N`, whose composition law carries a sign defect for even `N`.
//!
//! Everything here is floating point.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::ntheory::{inverse_mod, reduce};
use crate::exactnum::ZMod;
use crate::heisenberg::HWParams;
use crate::matrix::{Backend, Field, OpMatrix};
use crate::metaplectic::{u_d, u_s, u_t};
use crate::report::Checker;
use crate::sl2::{enumerate, SL2Element};

const BILINEAR_SAMPLES: usize = 500;
const BILINEAR_SEED: u64 = 0x5eed;

/// `e^{πi t / N}`, a `2N`-th root of unity.
fn half_root(modulus: u64, t: i128) -> Complex64 {
    let m = 2 * modulus as i128;
    Complex64::from_polar(1.0, PI * t.rem_euclid(m) as f64 / modulus as f64)
}

fn omega(modulus: u64, e: i128) -> Complex64 {
    half_root(modulus, 2 * e)
}

fn conj_matrix(m: &OpMatrix) -> OpMatrix {
    let v = m.to_complex_vec();
    let d = m.dim();
    OpMatrix::from_complex_fn(d, |i, j| v[i * d + j].conj())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticModule {
    qubits: u32,
    modulus: u64,
}

impl QuadraticModule {
    /// The module on `ℤ_{2^n}²`. Checks `Q(−x) = Q(x)` exhaustively for `n ≤ 3` and
    /// bilinearity of the polar form on seeded random triples.
    pub fn new(n: u32) -> Result<Self> {
        if !(1..=6).contains(&n) {
            return Err(Error::InvalidParams(format!("quadratic module needs 1 <= n <= 6, got {n}")));
        }
        let qm = Self {
            qubits: n,
            modulus: 1 << n,
        };
        let m = qm.modulus;
        if n <= 3 {
            for x1 in 0..m {
                for x2 in 0..m {
                    if qm.q([x1, x2]) != qm.q([(m - x1) % m, (m - x2) % m]) {
                        return Err(Error::InvalidParams(format!("Q(-x) != Q(x) at ({x1},{x2})")));
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(BILINEAR_SEED);
        for _ in 0..BILINEAR_SAMPLES {
            let mut pt = || [rng.gen_range(0..m), rng.gen_range(0..m)];
            let (x, y, z) = (pt(), pt(), pt());
            let xy = [(x[0] + y[0]) % m, (x[1] + y[1]) % m];
            if qm.b(xy, z) != (qm.b(x, z) + qm.b(y, z)) % m {
                return Err(Error::InvalidParams(format!("B not additive at {x:?},{y:?},{z:?}")));
            }
        }
        Ok(qm)
    }

    pub fn qubit_count(&self) -> u32 {
        self.qubits
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `|M| = N²`, also the carrier dimension.
    pub fn order(&self) -> usize {
        (self.modulus * self.modulus) as usize
    }

    /// Numerator of `Q(x)`: `x₁x₂ mod N`.
    pub fn q(&self, x: [u64; 2]) -> u64 {
        (x[0] * x[1]) % self.modulus
    }

    /// Numerator of `B(x,y) = Q(x+y) − Q(x) − Q(y)`.
    pub fn b(&self, x: [u64; 2], y: [u64; 2]) -> u64 {
        let m = self.modulus;
        let xy = [(x[0] + y[0]) % m, (x[1] + y[1]) % m];
        (self.q(xy) + 2 * m - self.q(x) - self.q(y)) % m
    }

    fn point(&self, idx: usize) -> [u64; 2] {
        let m = self.modulus as usize;
        [(idx / m) as u64, (idx % m) as u64]
    }

    /// `|M|^{−1/2} Σ_x e^{2πi a Q(x)}`.
    pub fn alpha_q(&self, a: ZMod) -> Result<Complex64> {
        if a.modulus() != self.modulus {
            return Err(Error::ModulusMismatch {
                left: a.modulus(),
                right: self.modulus,
            });
        }
        if !a.is_unit() {
            return Err(Error::NotAUnit {
                value: a.value(),
                modulus: self.modulus,
            });
        }
        let sum: Complex64 = (0..self.order())
            .map(|i| omega(self.modulus, (a.value() * self.q(self.point(i))) as i128))
            .sum();
        Ok(sum / self.modulus as f64)
    }

    fn units(&self) -> Vec<ZMod> {
        (1..self.modulus as i64)
            .step_by(2)
            .map(|v| ZMod::new(v, self.modulus).expect("valid residue"))
            .collect()
    }

    /// `α(a) = 1` for each unit and `α(a)α(b) = α(1)α(ab)` for each pair of units.
    pub fn check_properness(&self, checker: &mut Checker, tol: f64) -> Result<()> {
        let one = Complex64::new(1.0, 0.0);
        let units = self.units();
        let alphas = units
            .iter()
            .map(|&a| self.alpha_q(a))
            .collect::<Result<Vec<_>>>()?;
        let a1 = self.alpha_q(ZMod::one(self.modulus))?;
        for (a, al) in units.iter().zip(&alphas) {
            checker.check_close("alpha_q = 1", || format!("N={} a={}", self.modulus, a.value()), *al, one, tol);
        }
        for (a, al) in units.iter().zip(&alphas) {
            for (b, bl) in units.iter().zip(&alphas) {
                let ab = self.alpha_q(*a * *b)?;
                checker.check_close(
                    "alpha_q properness",
                    || format!("N={} a={} b={}", self.modulus, a.value(), b.value()),
                    al * bl,
                    a1 * ab,
                    tol,
                );
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeilGenerator {
    T,
    SInv,
    D(ZMod),
}

impl std::fmt::Display for WeilGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeilGenerator::T => write!(f, "T"),
            WeilGenerator::SInv => write!(f, "S^-1"),
            WeilGenerator::D(a) => write!(f, "D({})", a.value()),
        }
    }
}

/// Generator images on `ℂ^{M}`, basis index `N x₁ + x₂`.
pub fn weil_generator_action(qm: &QuadraticModule, generator: WeilGenerator) -> Result<OpMatrix> {
    let dim = qm.order();
    let m = qm.modulus;
    let minus_one = ZMod::new(-1, m)?;
    Ok(match generator {
        WeilGenerator::T => OpMatrix::from_complex_fn(dim, |i, j| {
            if i == j {
                omega(m, qm.q(qm.point(i)) as i128)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
        WeilGenerator::SInv => {
            let pre = qm.alpha_q(minus_one)? / m as f64;
            OpMatrix::from_complex_fn(dim, |i, j| pre * omega(m, qm.b(qm.point(i), qm.point(j)) as i128))
        }
        WeilGenerator::D(a) => {
            let pre = qm.alpha_q(a)? * qm.alpha_q(minus_one)?;
            let ainv = a.inv()?.value();
            let perm = OpMatrix::permutation(dim, Field::Float, |i| {
                let x = qm.point(i);
                ((ainv * x[0] % m) * m + ainv * x[1] % m) as usize
            });
            perm.scalar_mul(&crate::matrix::Scalar::Float(pre))?
        }
    }
    .with_meta(format!("Gamma({generator}) N={m}")))
}

/// How one generator image relates to the metaplectic operators at the same `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorComparison {
    pub generator: String,
    /// `λ` with `Γ(g) = λ U(g)`, if any.
    pub vs_u: Option<[f64; 2]>,
    /// `λ` with `Γ(g) = λ conj(U(g))`, if any.
    pub vs_conj_u: Option<[f64; 2]>,
}

/// Measures the proportionality constants between each `Γ(g)` and `U(g)`, `conj(U(g))`
/// for `g ∈ {T, S⁻¹, D(a)}`, `a` ranging over units.
pub fn compare_with_metaplectic(qm: &QuadraticModule, p: u64, tol: f64) -> Result<Vec<GeneratorComparison>> {
    let params = HWParams::qubits(qm.qubit_count(), p)?;
    let backend = Backend::Float;
    let mut gens = vec![
        (WeilGenerator::T, u_t(&params, backend)?),
        (WeilGenerator::SInv, u_s(&params, backend)?.dagger()),
    ];
    for a in qm.units() {
        gens.push((WeilGenerator::D(a), u_d(&params, a, backend)?));
    }
    let pair = |z: Option<Complex64>| z.map(|z| [z.re, z.im]);
    gens.into_iter()
        .map(|(g, u)| {
            let gamma = weil_generator_action(qm, g)?;
            Ok(GeneratorComparison {
                generator: g.to_string(),
                vs_u: pair(gamma.proportionality(&u, tol)?),
                vs_conj_u: pair(gamma.proportionality(&conj_matrix(&u), tol)?),
            })
        })
        .collect()
}

/// `P^r Q^s` on `ℂ^N`, entry `(k, k−r) = ω^{s(k−r)}`.
pub fn pi_shift(modulus: u64, r: i64, s: i64) -> Result<OpMatrix> {
    if modulus < 2 {
        return Err(Error::BadModulus(modulus));
    }
    let (r, s) = (reduce(r, modulus), reduce(s, modulus));
    let n = modulus as usize;
    Ok(OpMatrix::from_complex_fn(n, |k, j| {
        if (j as u64 + r) % modulus == k as u64 {
            omega(modulus, (s * j as u64) as i128)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .with_meta(format!("pi({r},{s}) N={modulus}")))
}

/// `R_c = diag e^{πi(N+1)c k²/N}`. `c` is used as given: shifting it by `N` changes `R_c`
/// when `N` is even.
pub fn chirp(modulus: u64, c: i64) -> Result<OpMatrix> {
    if modulus < 2 {
        return Err(Error::BadModulus(modulus));
    }
    let n1 = modulus as i128 + 1;
    Ok(OpMatrix::from_complex_fn(modulus as usize, |i, j| {
        if i == j {
            let k = i as i128;
            half_root(modulus, n1 * c as i128 * k * k)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .with_meta(format!("R_{c} N={modulus}")))
}

/// Representative of `c` in `{1, …, N}`.
pub fn chirp_bracket(modulus: u64, c: i64) -> u64 {
    reduce(c - 1, modulus) + 1
}

/// `(−1)^{[c₁] + [c₂] − ([c₁]+[c₂]) mod (N+1)}` with brackets in `{1, …, N}`.
pub fn theta_defect(modulus: u64, c1: i64, c2: i64) -> i8 {
    let (b1, b2) = (chirp_bracket(modulus, c1), chirp_bracket(modulus, c2));
    let e = b1 + b2 - (b1 + b2) % (modulus + 1);
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Largest entrywise deviation in `R_{[c₁]} R_{[c₂]} = θ^{k²} R_{[c₁+c₂]}`.
pub fn chirp_identity_deviation(modulus: u64, c1: i64, c2: i64) -> Result<f64> {
    let br = |c: i64| chirp_bracket(modulus, c) as i64;
    let lhs = chirp(modulus, br(c1))?.mul(&chirp(modulus, br(c2))?)?;
    let rhs = chirp(modulus, br(c1 + c2))?;
    let theta = theta_defect(modulus, c1, c2) as f64;
    let mut dev: f64 = 0.0;
    for i in 0..modulus as usize {
        for j in 0..modulus as usize {
            let sign = if i == j { theta.powi((i * i % 2) as i32) } else { 1.0 };
            dev = dev.max((lhs.entry_complex(i, j) - sign * rhs.entry_complex(i, j)).norm());
        }
    }
    Ok(dev)
}

/// Parameter `θ = 2` for odd `a`, `1` for even `a`.
fn theta_param(a: u64) -> u64 {
    if a % 2 == 1 {
        2
    } else {
        1
    }
}

/// The chirp-based operator
/// `U_{km} = e^{πi(N+1)/N ([c₀a₀⁻¹]k² + [−θ]m²)} N⁻¹ Σ_l ω^{l(k a₀⁻¹ − m)} e^{πi(N+1)[−a₀⁻¹b] l²/N}`
/// with `a₀ = a + θb`, `c₀ = c + θd`, brackets the least nonnegative residues mod `N`.
pub fn feichtinger_u(elem: &SL2Element) -> Result<OpMatrix> {
    let modulus = elem.modulus();
    let [a, b, c, d] = elem.to_ints();
    let th = theta_param(a);
    let a0 = (a + th * b) % modulus;
    let c0 = (c + th * d) % modulus;
    let a0i = inverse_mod(a0, modulus)
        .ok_or_else(|| Error::IllFormed(format!("a0 = {a0} is not a unit mod {modulus} for {elem}")))?;
    let k_coef = (c0 * a0i % modulus) as i128;
    let m_coef = reduce(-(th as i64), modulus) as i128;
    let l_coef = reduce(-((a0i * b % modulus) as i64), modulus) as i128;
    let n1 = modulus as i128 + 1;
    let nn = modulus as usize;
    let l_phase: Vec<Complex64> = (0..nn as i128)
        .map(|l| half_root(modulus, n1 * l_coef * l * l))
        .collect();
    let a0i = a0i as i128;
    Ok(OpMatrix::from_complex_fn(nn, |k, m| {
        let (k, m) = (k as i128, m as i128);
        let pre = half_root(modulus, n1 * (k_coef * k * k + m_coef * m * m));
        let sum: Complex64 = (0..nn as i128)
            .map(|l| omega(modulus, l * (k * a0i - m)) * l_phase[l as usize])
            .sum();
        pre * sum / modulus as f64
    })
    .with_meta(format!("Feichtinger U{elem}")))
}

/// Values of the scalar function `ψ_A(k,l)`, indexed `k N + l`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterSample {
    pub elem: SL2Element,
    pub values: Vec<Complex64>,
}

impl CharacterSample {
    pub fn get(&self, k: u64, l: u64) -> Complex64 {
        let n = self.elem.modulus();
        self.values[((k % n) * n + l % n) as usize]
    }

    /// `max |1 − |ψ||`.
    pub fn modulus_defect(&self) -> f64 {
        self.values.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Reads off `ψ_A(k,l)` from `U π(k,l) U⁻¹ = ψ_A(k,l) π(ak+bl, ck+dl)`.
/// `U` must be unitary.
pub fn extract_psi(u: &OpMatrix, elem: &SL2Element, tol: f64) -> Result<CharacterSample> {
    let n = elem.modulus();
    if u.dim() as u64 != n {
        return Err(Error::DimMismatch {
            left: u.dim(),
            right: n as usize,
        });
    }
    if !u.is_unitary(tol)? {
        return Err(Error::IllFormed(format!("operator for {elem} is not unitary")));
    }
    let [a, b, c, d] = elem.to_ints();
    let u = u.to_float();
    let udag = u.dagger();
    let values = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (k, l) = (idx / n, idx % n);
            let x = u.mul(&pi_shift(n, k as i64, l as i64)?)?.mul(&udag)?;
            let y = pi_shift(n, ((a * k + b * l) % n) as i64, ((c * k + d * l) % n) as i64)?;
            match x.proportionality(&y, tol)? {
                Some(z) if (z.norm() - 1.0).abs() <= tol => Ok(z),
                _ => Err(Error::NotMetaplectic { k, l }),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacterSample { elem: *elem, values })
}

/// `σ_A = (ac, bc; ad − 1, bd)` mod `N`.
pub fn sigma_a(elem: &SL2Element) -> [u64; 4] {
    let n = elem.modulus();
    let [a, b, c, d] = elem.to_ints();
    [a * c % n, b * c % n, (a * d + n - 1) % n, b * d % n]
}

/// Largest `N` for which `check_second_degree` runs on every quadruple.
pub const SECOND_DEGREE_EXHAUSTIVE_MAX_N: u64 = 4;
pub const SECOND_DEGREE_SAMPLES: usize = 1000;

/// `ψ(k+k', l+l') = ψ(k,l) ψ(k',l') ω^{(k,l) σ_A (k',l')ᵀ}` on all quadruples for
/// `N ≤ 4`, otherwise on `1000` quadruples drawn with `seed`.
pub fn check_second_degree(checker: &mut Checker, psi: &CharacterSample, seed: u64, tol: f64) {
    let n = psi.elem.modulus();
    let s = sigma_a(&psi.elem);
    let quads: Vec<[u64; 4]> = if n <= SECOND_DEGREE_EXHAUSTIVE_MAX_N {
        (0..n.pow(4))
            .map(|i| [i / n.pow(3), i / n.pow(2) % n, i / n % n, i % n])
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..SECOND_DEGREE_SAMPLES)
            .map(|_| [0; 4].map(|_| rng.gen_range(0..n)))
            .collect()
    };
    for [k, l, k2, l2] in quads {
        let form = k * (s[0] * k2 + s[1] * l2) + l * (s[2] * k2 + s[3] * l2);
        let lhs = psi.get(k + k2, l + l2);
        let rhs = psi.get(k, l) * psi.get(k2, l2) * omega(n, form as i128);
        checker.check_close(
            "second-degree character",
            || format!("A={} (k,l,k',l')=({k},{l},{k2},{l2})", psi.elem),
            lhs,
            rhs,
            tol,
        );
    }
}

/// A pair with `U(A)U(B) ≠ e^{iφ} U(AB)` for every `φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomomorphismWitness {
    #[serde(rename = "N")]
    pub modulus: u64,
    pub pair: [[u64; 4]; 2],
    /// `min_φ ‖U(A)U(B) − e^{iφ}U(AB)‖_F`.
    pub defect_norm: f64,
}

fn all_feichtinger(modulus: u64) -> Result<Vec<(SL2Element, Option<OpMatrix>)>> {
    enumerate(modulus)?
        .into_par_iter()
        .map(|g| match feichtinger_u(&g) {
            Ok(u) => Ok((g, Some(u))),
            Err(Error::IllFormed(_)) => Ok((g, None)),
            Err(e) => Err(e),
        })
        .collect()
}

/// First pair in enumeration order where `U(A)U(B)` is not a scalar multiple of `U(AB)`
/// (entrywise within `tol`).
pub fn find_nonhomomorphism_witness(modulus: u64, tol: f64) -> Result<Option<HomomorphismWitness>> {
    let ops = all_feichtinger(modulus)?;
    let index = |g: &SL2Element| ops.iter().position(|(h, _)| h == g).expect("group is closed");
    let found = ops
        .par_iter()
        .enumerate()
        .map(|(i, (ga, ua))| -> Result<Option<(usize, HomomorphismWitness)>> {
            let Some(ua) = ua else { return Ok(None) };
            for (gb, ub) in &ops {
                let Some(ub) = ub else { continue };
                let Some(uab) = &ops[index(&ga.mul(gb))].1 else { continue };
                let prod = ua.mul(ub)?;
                if prod.proportionality(uab, tol)?.is_none() {
                    let defect = prod.distance_up_to_phase(uab)?;
                    return Ok(Some((
                        i,
                        HomomorphismWitness {
                            modulus,
                            pair: [ga.to_ints(), gb.to_ints()],
                            defect_norm: defect,
                        },
                    )));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(found.into_iter().flatten().min_by_key(|(i, _)| *i).map(|(_, w)| w))
}

/// Outcome of comparing `U(A)U(B)` with `U(AB)` through their extracted `ψ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamePsiSummary {
    pub pairs: u64,
    /// Pairs whose two operators carry the same `ψ`.
    pub same_psi: u64,
    /// Of those, pairs where the operators agree up to a global phase.
    pub same_psi_and_proportional: u64,
}

/// Two operators implementing `AB` with equal `ψ` should differ by a global phase.
/// Checked on every pair of the group.
pub fn same_psi_cross_check(modulus: u64, tol: f64) -> Result<SamePsiSummary> {
    let ops = all_feichtinger(modulus)?;
    let psis = ops
        .par_iter()
        .map(|(g, u)| u.as_ref().map(|u| extract_psi(u, g, tol)).transpose())
        .collect::<Result<Vec<_>>>()?;
    let index = |g: &SL2Element| ops.iter().position(|(h, _)| h == g).expect("group is closed");
    let parts = ops
        .par_iter()
        .map(|(ga, ua)| -> Result<SamePsiSummary> {
            let mut out = SamePsiSummary::default();
            let Some(ua) = ua else { return Ok(out) };
            for (gb, ub) in &ops {
                let Some(ub) = ub else { continue };
                let gab = ga.mul(gb);
                let j = index(&gab);
                let (Some(uab), Some(psi_ab)) = (&ops[j].1, &psis[j]) else { continue };
                let prod = ua.mul(ub)?;
                let psi_prod = extract_psi(&prod, &gab, tol)?;
                out.pairs += 1;
                let same = psi_prod
                    .values
                    .iter()
                    .zip(&psi_ab.values)
                    .all(|(x, y)| (x - y).norm() <= tol);
                if same {
                    out.same_psi += 1;
                    if prod.proportionality(uab, tol)?.is_some() {
                        out.same_psi_and_proportional += 1;
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().fold(SamePsiSummary::default(), |acc, p| SamePsiSummary {
        pairs: acc.pairs + p.pairs,
        same_psi: acc.same_psi + p.same_psi,
        same_psi_and_proportional: acc.same_psi_and_proportional + p.same_psi_and_proportional,
    }))
}
