//! Named verification suites.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exactnum::ntheory::{is_power_of_two, is_prime};
use crate::exactnum::ZMod;
use crate::heisenberg::{fourier, gamma_p, p_eigensystem, p_inverse_matrix, p_matrix, q_matrix, z_phase, HWParams};
use crate::magnetic::{j_odd, j_twisted, j_twisted_product, TorusPoint};
use crate::matrix::{Backend, MatEq, OpMatrix, RootSum};
use crate::metaplectic::{
    check_group_relations, check_metaplectic, goodd, matrixdec1, u_a_closed, u_general, u_s, u_t, u_word,
    weil_odd_general, weil_odd_generic, weil_odd_s, ClosedForm, Flavor, TranslationTable,
};
use crate::report::{Checker, ReportParams, VerifyReport};
use crate::sl2::{decompose_detailed, enumerate, group_order, sample, SL2Element};
use crate::weilmod::{
    check_second_degree, chirp_identity_deviation, compare_with_metaplectic, extract_psi, feichtinger_u,
    find_nonhomomorphism_witness, theta_defect, QuadraticModule,
};

/// Largest carrier dimension any suite will build.
pub const MAX_DIM: u64 = 4096;
/// Largest pair count scanned exhaustively.
pub const MAX_EXHAUSTIVE_PAIRS: u128 = 10_000_000;
/// Sampled commutator pairs when the Heisenberg suite cannot go exhaustive.
pub const DEFAULT_COMMUTATOR_SAMPLES: usize = 1000;
const UNITARITY_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Heisenberg,
    CocycleOdd,
    CocycleTwisted,
    Metaplectic,
    Homomorphism,
    Decomposition,
    WeilOdd,
    QuadraticModule,
    FeichtingerDefect,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Heisenberg,
        Suite::CocycleOdd,
        Suite::CocycleTwisted,
        Suite::Metaplectic,
        Suite::Homomorphism,
        Suite::Decomposition,
        Suite::WeilOdd,
        Suite::QuadraticModule,
        Suite::FeichtingerDefect,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Heisenberg => "heisenberg",
            Suite::CocycleOdd => "cocycle-odd",
            Suite::CocycleTwisted => "cocycle-twisted",
            Suite::Metaplectic => "metaplectic",
            Suite::Homomorphism => "homomorphism",
            Suite::Decomposition => "decomposition",
            Suite::WeilOdd => "weil-odd",
            Suite::QuadraticModule => "quadratic-module",
            Suite::FeichtingerDefect => "feichtinger-defect",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// A suite with its parameters. Unset fields take per-suite defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSpec {
    pub suite: Suite,
    pub n: Option<u32>,
    pub modulus: Option<u64>,
    pub p: Option<u64>,
    /// `None`: exhaustive where the suite allows it.
    pub samples: Option<usize>,
    pub seed: u64,
    pub backend: Option<Backend>,
    pub tol: f64,
}

impl SuiteSpec {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            n: None,
            modulus: None,
            p: None,
            samples: None,
            seed: 0,
            backend: None,
            tol: 1e-9,
        }
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_modulus(mut self, modulus: u64) -> Self {
        self.modulus = Some(modulus);
        self
    }

    pub fn with_p(mut self, p: u64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = Some(samples);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = Some(backend);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Qubit count from `n` or a power-of-two `N`.
    fn qubits(&self) -> Result<u32> {
        let from_modulus = match self.modulus {
            Some(m) if is_power_of_two(m) && m >= 2 => Some(m.trailing_zeros()),
            Some(m) => {
                return Err(Error::InvalidParams(format!(
                    "suite {} needs N = 2^n, got N = {m}",
                    self.suite
                )))
            }
            None => None,
        };
        match (self.n, from_modulus) {
            (Some(a), Some(b)) if a != b => Err(Error::InvalidParams(format!("n = {a} and N = 2^{b} disagree"))),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => Err(Error::InvalidParams(format!("suite {} needs --n or --N", self.suite))),
        }
    }

    fn odd_prime(&self) -> Result<u64> {
        if self.n.is_some() {
            return Err(Error::InvalidParams(format!("suite {} takes --N, not --n", self.suite)));
        }
        match self.modulus {
            Some(m) if m >= 3 && is_prime(m) => Ok(m),
            Some(m) => Err(Error::InvalidParams(format!("suite {} needs an odd prime N, got {m}", self.suite))),
            None => Err(Error::InvalidParams(format!("suite {} needs --N", self.suite))),
        }
    }

    fn any_modulus(&self) -> Result<u64> {
        match (self.n, self.modulus) {
            (Some(n), Some(m)) if 1u64.checked_shl(n) != Some(m) => {
                Err(Error::InvalidParams(format!("n = {n} and N = {m} disagree")))
            }
            (_, Some(m)) if m >= 2 => Ok(m),
            (_, Some(m)) => Err(Error::BadModulus(m)),
            (Some(n), None) if (1..=12).contains(&n) => Ok(1 << n),
            (Some(n), None) => Err(Error::InvalidParams(format!("n = {n} out of range"))),
            (None, None) => Err(Error::InvalidParams(format!("suite {} needs --n or --N", self.suite))),
        }
    }

    /// Labels to run: the given one, or all odd labels when `all_by_default`.
    fn labels(&self, n: u32, all_by_default: bool) -> Result<Vec<u64>> {
        match self.p {
            Some(p) => {
                HWParams::qubits(n, p)?;
                Ok(vec![p])
            }
            None if all_by_default => Ok(HWParams::all_labels(n)),
            None => Ok(vec![1]),
        }
    }

    fn even_backend(&self, n: u32) -> Backend {
        self.backend
            .unwrap_or(if n <= 3 { Backend::Exact } else { Backend::Float })
    }

    fn float_only(&self) -> Result<Backend> {
        match self.backend {
            Some(Backend::Exact) => Err(Error::UnsupportedBackend("this suite runs in floating point")),
            _ => Ok(Backend::Float),
        }
    }
}

fn check_dim(what: &'static str, dim: u64) -> Result<()> {
    if dim > MAX_DIM {
        return Err(Error::TooLarge {
            what,
            size: dim as u128,
            limit: MAX_DIM as u128,
        });
    }
    Ok(())
}

fn check_pairs(what: &'static str, pairs: u128) -> Result<()> {
    if pairs > MAX_EXHAUSTIVE_PAIRS {
        return Err(Error::TooLarge {
            what,
            size: pairs,
            limit: MAX_EXHAUSTIVE_PAIRS,
        });
    }
    Ok(())
}

/// Runs one suite. Identical specs give identical reports (apart from `runtime_ms`).
pub fn run_suite(spec: &SuiteSpec) -> Result<VerifyReport> {
    let start = Instant::now();
    let mut checker = Checker::new();
    let params = match spec.suite {
        Suite::Heisenberg => heisenberg(spec, &mut checker)?,
        Suite::CocycleOdd => cocycle_odd(spec, &mut checker)?,
        Suite::CocycleTwisted => cocycle_twisted(spec, &mut checker)?,
        Suite::Metaplectic => metaplectic(spec, &mut checker)?,
        Suite::Homomorphism => homomorphism(spec, &mut checker)?,
        Suite::Decomposition => decomposition(spec, &mut checker)?,
        Suite::WeilOdd => weil_odd(spec, &mut checker)?,
        Suite::QuadraticModule => quadratic_module(spec, &mut checker)?,
        Suite::FeichtingerDefect => feichtinger_defect(spec, &mut checker)?,
    };
    let mut report = checker.finish(spec.suite.as_str(), params);
    report.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn base_params(spec: &SuiteSpec, n: Option<u32>, modulus: u64, p: Option<u64>, backend: Backend) -> ReportParams {
    ReportParams {
        n,
        modulus: Some(modulus),
        p,
        seed: None,
        samples: spec.samples,
        backend: Some(backend),
        tol: spec.tol,
    }
}

fn single_label(labels: &[u64]) -> Option<u64> {
    (labels.len() == 1).then(|| labels[0])
}

fn record(checker: &mut Checker, identity: &str, outcomes: Vec<(String, MatEq)>) {
    for (inputs, eq) in outcomes {
        checker.check_eq(identity, || inputs, eq);
    }
}

fn scaled(m: &OpMatrix, s: RootSum) -> Result<OpMatrix> {
    m.scalar_mul(&s.to_scalar(&m.field())?)
}

fn heisenberg(spec: &SuiteSpec, checker: &mut Checker) -> Result<ReportParams> {
    let n = spec.qubits()?;
    let labels = spec.labels(n, true)?;
    let backend = spec.even_backend(n);
    let modulus = 1u64 << n;
    check_dim("dimension", modulus)?;
    let triples = (modulus as u128).pow(3);
    let sampled_pairs = match spec.samples {
        Some(k) => Some(k),
        None if n <= 2 => None,
        None => Some(DEFAULT_COMMUTATOR_SAMPLES),
    };
    if sampled_pairs.is_none() {
        check_pairs("commutator pairs", triples * triples)?;
    }
    for &p in &labels {
        let params = HWParams::qubits(n, p)?;
        let tag = |extra: String| move || format!("n={n} p={p}{extra}");
        let q = q_matrix(&params, backend)?;
        let pinv = p_inverse_matrix(&params, backend)?;
        let pm = p_matrix(&params, backend)?;
        let w = z_phase(&params, backend)?;
        let field = q.field();
        let id = OpMatrix::identity(modulus as usize, field);
        checker.check_eq(
            "P^-1 Q = z Q P^-1",
            tag(String::new()),
            pinv.mul(&q)?.mat_eq(&q.mul(&pinv)?.scalar_mul(&w)?, spec.tol)?,
        );
        checker.check_eq("Q^N = I", tag(String::new()), q.pow(modulus)?.mat_eq(&id, spec.tol)?);
        checker.check_eq("P^N = I", tag(String::new()), pm.pow(modulus)?.mat_eq(&id, spec.tol)?);
        let f = fourier(&params, backend)?;
        checker.check_eq(
            "F P^p F^-1 = Q",
            tag(String::new()),
            f.mul(&pm.pow(p)?)?.mul(&f.dagger())?.mat_eq(&q, spec.tol)?,
        );
        for (k, pair) in p_eigensystem(&params, backend)?.iter().enumerate() {
            let lhs = pinv.mul_vec(&pair.vector)?;
            let mut dev: f64 = 0.0;
            let mut ok = true;
            for (x, v) in lhs.iter().zip(&pair.vector) {
                let want = pair.value.try_mul(v)?;
                ok &= x.approx_eq(&want, spec.tol)?;
                dev = dev.max((x.to_complex() - want.to_complex()).norm());
            }
            checker.check("P^-1 eigenvector", tag(format!(" k={k}")), ok, dev);
        }

        let nn = modulus as i64;
        let gamma = |(m, r, s): (i64, i64, i64)| gamma_p(&params, params.zmod(m), params.zmod(r), params.zmod(s), backend);
        let pairs: Vec<[(i64, i64, i64); 2]> = match sampled_pairs {
            None => {
                let all: Vec<(i64, i64, i64)> = (0..nn.pow(3)).map(|i| (i / (nn * nn), i / nn % nn, i % nn)).collect();
                all.iter().flat_map(|&g| all.iter().map(move |&h| [g, h])).collect()
            }
            Some(k) => {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ p);
                let mut draw = || (rng.gen_range(0..nn), rng.gen_range(0..nn), rng.gen_range(0..nn));
                (0..k).map(|_| [draw(), draw()]).collect()
            }
        };
        let outcomes = pairs
            .par_iter()
            .map(|&[g, h]| {
                let (a, b) = (gamma(g)?, gamma(h)?);
                let comm = a.mul(&b)?.sub(&b.mul(&a)?)?;
                let coeff = RootSum::zero(modulus)
                    .plus(1, params.scaled(h.1 * g.2))
                    .plus(-1, params.scaled(g.1 * h.2));
                let rhs = scaled(&gamma((g.0 + h.0, g.1 + h.1, g.2 + h.2))?, coeff)?;
                Ok((format!("n={n} p={p} g={g:?} h={h:?}"), comm.mat_eq(&rhs, spec.tol)?))
            })
            .collect::<Result<Vec<_>>>()?;
        record(checker, "commutator", outcomes);

        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(p));
        for _ in 0..UNITARITY_SAMPLES {
            let g = (rng.gen_range(0..nn), rng.gen_range(0..nn), rng.gen_range(0..nn));
            let m = gamma(g)?;
            checker.check_eq(
                "unitarity",
                tag(format!(" g={g:?}")),
                m.mul(&m.dagger())?.mat_eq(&id, spec.tol)?,
            );
        }
    }
    let mut params = base_params(spec, Some(n), modulus, single_label(&labels), backend);
    params.seed = Some(spec.seed);
    params.samples = sampled_pairs;
    Ok(params)
}

fn point_label(pt: TorusPoint) -> String {
    format!("({},{})", pt.r.value(), pt.s.value())
}

fn cocycle_odd(spec: &SuiteSpec, checker: &mut Checker) -> Result<ReportParams> {
    let modulus = spec.odd_prime()?;
    check_dim("dimension", modulus)?;
    let backend = spec.backend.unwrap_or(Backend::Exact);
    let pts = TorusPoint::all(modulus);
    check_pairs("translation pairs", (pts.len() as u128).pow(2))?;
    let mats = pts
        .par_iter()
        .map(|&pt| j_odd(modulus, pt, backend))
        .collect::<Result<Vec<_>>>()?;
    let field = mats[0].field();
    let at = |pt: TorusPoint| &mats[(pt.r.value() * modulus + pt.s.value()) as usize];
    let half = ZMod::new(2, modulus)?.inv()?;
    let phase = |e: ZMod| RootSum::root(modulus, e.value() as i64);
    let pairs: Vec<(TorusPoint, TorusPoint)> = pts.iter().flat_map(|&a| pts.iter().map(move |&b| (a, b))).collect();
    let outcomes = pairs
        .par_iter()
        .map(|&(a, b)| {
            let ab = at(a).mul(at(b))?;
            let cocycle = scaled(at(a.add(b)), phase((b.r * a.s - a.r * b.s) * half))?;
            let ba = at(b).mul(at(a))?;
            let swapped = scaled(&ba, phase(a.s * b.r - b.s * a.r))?;
            let inputs = format!("N={modulus} a={} b={}", point_label(a), point_label(b));
            Ok((inputs, ab.mat_eq(&cocycle, spec.tol)?, ab.mat_eq(&swapped, spec.tol)?))
        })
        .collect::<Result<Vec<_>>>()?;
    for (inputs, eq, _) in &outcomes {
        checker.check_eq("J_a J_b = w^((r's-rs')/2) J_(a+b)", || inputs.clone(), *eq);
    }
    for (inputs, _, eq) in outcomes {
        checker.check_eq("J_a J_b = w^(sr'-s'r) J_b J_a", || inputs, eq);
    }
    let id = OpMatrix::identity(modulus as usize, field);
    for &pt in &pts {
        let j = at(pt);
        let mut acc = id.clone();
        for k in 1..=modulus as i64 {
            acc = acc.mul(j)?;
            let want = if k == modulus as i64 { &id } else { at(pt.scale(k)) };
            checker.check_eq(
                "J^k = J_(k r, k s)",
                || format!("N={modulus} pt={} k={k}", point_label(pt)),
                acc.mat_eq(want, spec.tol)?,
            );
        }
        checker.check_eq(
            "J^dagger = J_(-r,-s)",
            || format!("N={modulus} pt={}", point_label(pt)),
            j.dagger().mat_eq(at(pt.neg()), spec.tol)?,
        );
    }
    Ok(base_params(spec, None, modulus, None, backend))
}

fn cocycle_twisted(spec: &SuiteSpec, checker: &mut Checker) -> Result<ReportParams> {
    let n = spec.qubits()?;
    let modulus = 1u64 << n;
    check_dim("dimension", modulus * modulus)?;
    let labels = spec.labels(n, true)?;
    let backend = spec.even_backend(n);
    let pts = TorusPoint::all(modulus);
    check_pairs("translation pairs", (pts.len() as u128).pow(2))?;
    for &p in &labels {
        let params = HWParams::qubits(n, p)?;
        let mats = pts
            .par_iter()
            .map(|&pt| j_twisted(&params, pt, backend))
            .collect::<Result<Vec<_>>>()?;
        let at = |pt: TorusPoint| &mats[(pt.r.value() * modulus + pt.s.value()) as usize];
        let pairs: Vec<(TorusPoint, TorusPoint)> =
            pts.iter().flat_map(|&a| pts.iter().map(move |&b| (a, b))).collect();
        let outcomes = pairs
            .par_iter()
            .map(|&(a, b)| {
                let e = b.r.value() as i64 * a.s.value() as i64 - b.s.value() as i64 * a.r.value() as i64;
                let rhs = scaled(at(a.add(b)), params.phase(e))?;
                Ok((
                    format!("n={n} p={p} a={} b={}", point_label(a), point_label(b)),
                    at(a).mul(at(b))?.mat_eq(&rhs, spec.tol)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        record(checker, "J_a J_b = w^(p(r's-s'r)) J_(a+b)", outcomes);
        for &pt in &pts {
            let tag = || format!("n={n} p={p} pt={}", point_label(pt));
            checker.check_eq("J^dagger = J_(-r,-s)", tag, at(pt).dagger().mat_eq(at(pt.neg()), spec.tol)?);
            let shifted = TorusPoint::from_ints(
                pt.r.value() as i64 + modulus as i64,
                pt.s.value() as i64 + modulus as i64,
                modulus,
            )?;
            checker.check_eq("J_(r+N,s+N) = J_(r,s)", tag, j_twisted(&params, shifted, backend)?.mat_eq(at(pt), spec.tol)?);
            checker.check_eq(
                "closed form = product form",
                tag,
                j_twisted_product(&params, pt, backend)?.mat_eq(at(pt), spec.tol)?,
            );
        }
    }
    Ok(base_params(spec, Some(n), modulus, single_label(&labels), backend))
}

fn metaplectic(spec: &SuiteSpec, checker: &mut Checker) -> Result<ReportParams> {
    let n = spec.qubits()?;
    let modulus = 1u64 << n;
    check_dim("dimension", modulus * modulus)?;
    let labels = spec.labels(n, true)?;
    let backend = spec.even_backend(n);
    let elems = match spec.samples {
        Some(k) => sample(modulus, spec.seed, k)?,
        None => vec![],
    };
    for &p in &labels {
        let params = HWParams::qubits(n, p)?;
        let table = TranslationTable::new(Flavor::TwistedEven(params), backend)?;
        check_metaplectic(checker, &u_s(&params, backend)?, &SL2Element::s(modulus), &table, spec.tol)?;
        check_metaplectic(checker, &u_t(&params, backend)?, &SL2Element::t(modulus), &table, spec.tol)?;
        for elem in &elems {
            let u = u_general(&params, elem, backend);
            if checker.check_result("u_general", || format!("p={p} A={elem}"), &u) {
                check_metaplectic(checker, &u?, elem, &table, spec.tol)?;
            }
        }
    }
    let mut params = base_params(spec, Some(n), modulus, single_label(&labels), backend);
    if spec.samples.is_some() {
        params.seed = Some(spec.seed);
    }
    Ok(params)
}

fn homomorphism(spec: &SuiteSpec, checker: &mut Checker) -> Result<ReportParams> {
    let n = spec.qubits()?;
    let modulus = 1u64 << n;
    check_dim("dimension", modulus * modulus)?;
    let labels = spec.labels(n, false)?;
    let backend = spec.even_backend(n);
    for &p in &labels {
        let params = HWParams::qubits(n, p)?;
        let image = |g: &SL2Element| u_general(&params, g, backend);
        let outcomes: Vec<(String, MatEq)> = match spec.samples {
            None => {
                let order = group_order(modulus);
                check_pairs("group pairs", order * order)?;
                let elems = enumerate(modulus)?;
                let imgs = elems.par_iter().map(image).collect::<Result<Vec<_>>>()?;
                let index = |g: &SL2Element| elems.binary_search(g).expect("enumeration is sorted and closed");
                let pairs: Vec<(usize, usize)> =
                    (0..elems.len()).flat_map(|i| (0..elems.len()).map(move |j| (i, j))).collect();
                pairs
                    .par_iter()
                    .map(|&(i, j)| {
                        let ab = elems[i].mul(&elems[j]);
                        let lhs = imgs[i].mul(&imgs[j])?;
                        Ok((
                            format!("p={p} A={} B={}", elems[i], elems[j]),
                            lhs.mat_eq(&imgs[index(&ab)], spec.tol)?,
                        ))
                    })
                    .collect::<Result<_>>()?
            }
            Some(k) => {
                let draws = sample(modulus, spec.seed, 2 * k)?;
                draws
                    .par_chunks(2)
                    .map(|ab| {
                        let (a, b) = (&ab[0], &ab[1]);
                        let lhs = image(a)?.mul(&image(b)?)?;
                        Ok((format!("p={p} A={a} B={b}"), lhs.mat_eq(&image(&a.mul(b))?, spec.tol)?))
                    })
                    .collect::<Result<_>>()?
            }
        };
        record(checker, "U(A)U(B) = U(AB)", outcomes);
    }
    let mut params = base_params(spec, Some(n), modulus, single_label(&labels), backend);
    if spec.samples.is_some() {
        params.seed = Some(spec.seed);
    }
    Ok(params)
}

fn decomposition(spec: &SuiteSpec, checker: &mut Checker) -> Result<ReportParams> {
    let n = spec.qubits()?;
    let modulus = 1u64 << n;
    check_dim("dimension", modulus * modulus)?;
    let labels = spec.labels(n, false)?;
    let backend = spec.even_backend(n);
    let elems = match spec.samples {
        Some(k) => sample(modulus, spec.seed, k)?,
        None => enumerate(modulus)?,
    };
    let mut word_ok = Vec::with_capacity(elems.len());
    for elem in &elems {
        let d = decompose_detailed(elem)?;
        let back = d.word.evaluate()?;
        checker.check("word reproduces A", || format!("A={elem} word={}", d.word), back == *elem, if back == *elem { 0.0 } else { 1.0 });
        checker.check(
            "exactly one sign candidate matches",
            || format!("A={elem} candidates={} matched={}", d.candidates, d.matched),
            d.matched == 1,
            if d.matched == 1 { 0.0 } else { 1.0 },
        );
        word_ok.push(d.word);
    }
    for &p in &labels {
        let params = HWParams::qubits(n, p)?;
        let outcomes = elems
            .par_iter()
            .zip(&word_ok)
            .map(|(elem, word)| {
                let (closed, form) = u_a_closed(&params, elem, backend)?;
                let via_word = u_word(&params, word, backend)?;
                let main = (format!("p={p} A={elem} form={}", form.as_str()), closed.mat_eq(&via_word, spec.tol)?);
                let branch = if form == ClosedForm::UnitCOverD {
                    let sum = matrixdec1(&params, elem, backend)?;
                    Some((format!("p={p} A={elem}"), goodd(&params, elem, backend)?.mat_eq(&sum, spec.tol)?))
                } else {
                    None
                };
                Ok((main, branch))
            })
            .collect::<Result<Vec<_>>>()?;
        let (main, branch): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
        record(checker, "closed form = word image", main);
        record(checker, "goodd = matrixdec1 sum", branch.into_iter().flatten().collect());
        check_group_relations(checker, &params, backend, spec.tol)?;
    }
    let mut params = base_params(spec, Some(n), modulus, single_label(&labels), backend);
    if spec.samples.is_some() {
        params.seed = Some(spec.seed);
    }
    Ok(params)
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn weil_odd(spec: &SuiteSpec, checker: &mut Checker) -> Result<ReportParams> {
    let modulus = spec.odd_prime()?;
    check_dim("dimension", modulus)?;
    let backend = spec.float_only()?;
    let order = group_order(modulus);
    check_pairs("group pairs", order * order)?;
    let elems = enumerate(modulus)?;
    let imgs = elems
        .par_iter()
        .map(|g| weil_odd_general(modulus, g))
        .collect::<Result<Vec<_>>>()?;
    let table = TranslationTable::new(Flavor::WeilOdd(modulus), backend)?;
    for (g, u) in elems.iter().zip(&imgs) {
        check_metaplectic(checker, u, g, &table, spec.tol)?;
    }
    let index = |g: &SL2Element| elems.binary_search(g).expect("enumeration is sorted and closed");
    let rows = (0..elems.len())
        .into_par_iter()
        .map(|i| {
            (0..elems.len())
                .map(|j| {
                    let lhs = imgs[i].mul(&imgs[j])?;
                    let rhs = &imgs[index(&elems[i].mul(&elems[j]))];
                    Ok((j, lhs.proportionality(rhs, spec.tol)?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let one = Complex64::new(1.0, 0.0);
    let mut max_defect: f64 = 0.0;
    let mut non_proportional = 0u64;
    let mut nontrivial = 0u64;
    for (i, row) in rows.into_iter().enumerate() {
        for (j, lambda) in row {
            let inputs = || format!("N={modulus} A={} B={}", elems[i], elems[j]);
            match lambda {
                Some(l) => {
                    let dev = (l - one).norm();
                    max_defect = max_defect.max(dev);
                    if dev > spec.tol {
                        nontrivial += 1;
                    }
                    checker.check("U(A)U(B) = U(AB)", inputs, dev <= spec.tol, dev);
                }
                None => {
                    non_proportional += 1;
                    checker.check("U(A)U(B) = U(AB)", inputs, false, f64::INFINITY);
                }
            }
        }
    }
    checker.table(
        "phase_defect",
        json!({
            "pairs": order * order,
            "max_abs_phase_minus_one": max_defect,
            "pairs_with_nontrivial_phase": nontrivial,
            "pairs_not_proportional": non_proportional,
        }),
    );
    let s = SL2Element::s(modulus);
    let ratio = weil_odd_generic(modulus, &s)?.proportionality(&weil_odd_s(modulus)?, spec.tol)?;
    checker.table(
        "generic_s_over_u_s",
        ratio.map(complex_json).unwrap_or(serde_json::Value::Null),
    );
    Ok(base_params(spec, None, modulus, None, backend))
}

fn quadratic_module(spec: &SuiteSpec, checker: &mut Checker) -> Result<ReportParams> {
    let n = spec.qubits()?;
    let modulus = 1u64 << n;
    check_dim("dimension", modulus * modulus)?;
    let backend = spec.float_only()?;
    let labels = spec.labels(n, false)?;
    let qm = QuadraticModule::new(n)?;
    qm.check_properness(checker, spec.tol)?;
    let mut by_label = serde_json::Map::new();
    for &p in &labels {
        let cmp = compare_with_metaplectic(&qm, p, spec.tol)?;
        by_label.insert(format!("p={p}"), serde_json::to_value(cmp).expect("serializable"));
    }
    checker.table("gamma_vs_u", serde_json::Value::Object(by_label));
    Ok(base_params(spec, Some(n), modulus, single_label(&labels), backend))
}

fn feichtinger_defect(spec: &SuiteSpec, checker: &mut Checker) -> Result<ReportParams> {
    let modulus = spec.any_modulus()?;
    check_dim("dimension", modulus)?;
    let backend = spec.float_only()?;
    let nn = modulus as i64;
    let mut minus = 0u64;
    for c1 in 0..nn {
        for c2 in 0..nn {
            let theta = theta_defect(modulus, c1, c2);
            if theta == -1 {
                minus += 1;
            }
            if modulus % 2 == 1 {
                checker.check(
                    "theta = +1 for odd N",
                    || format!("N={modulus} c1={c1} c2={c2}"),
                    theta == 1,
                    if theta == 1 { 0.0 } else { 2.0 },
                );
            }
            let dev = chirp_identity_deviation(modulus, c1, c2)?;
            checker.check(
                "R_[c1] R_[c2] = theta^(k^2) R_[c1+c2]",
                || format!("N={modulus} c1={c1} c2={c2}"),
                dev <= spec.tol,
                dev,
            );
        }
    }
    checker.table("theta_minus_one_count", json!(minus));
    if modulus % 2 == 0 {
        let theta = theta_defect(modulus, nn, nn);
        checker.check(
            "theta = -1 witness for even N",
            || format!("N={modulus} c1={nn} c2={nn}"),
            theta == -1,
            if theta == -1 { 0.0 } else { 2.0 },
        );
        checker.table("theta_witness", json!({"N": modulus, "c1": nn, "c2": nn, "theta": theta}));
    }

    let elems = match spec.samples {
        Some(k) => sample(modulus, spec.seed, k)?,
        None => enumerate(modulus)?,
    };
    let mut ill_formed = 0u64;
    let results = elems
        .par_iter()
        .map(|g| match feichtinger_u(g) {
            Err(Error::IllFormed(_)) => Ok(None),
            Err(e) => Err(e),
            Ok(u) => Ok(Some(extract_psi(&u, g, spec.tol))),
        })
        .collect::<Result<Vec<_>>>()?;
    for (g, res) in elems.iter().zip(results) {
        let Some(psi) = res else {
            ill_formed += 1;
            continue;
        };
        if checker.check_result("U pi(k,l) U^-1 = psi pi((k,l)A)", || format!("N={modulus} A={g}"), &psi) {
            let psi = psi?;
            let defect = psi.modulus_defect();
            checker.check("|psi| = 1", || format!("N={modulus} A={g}"), defect <= spec.tol, defect);
            check_second_degree(checker, &psi, spec.seed, spec.tol);
        }
    }
    checker.table("ill_formed", json!(ill_formed));
    if modulus % 2 == 0 {
        let witness = find_nonhomomorphism_witness(modulus, spec.tol)?;
        checker.check(
            "non-homomorphism witness exists for even N",
            || format!("N={modulus}"),
            witness.is_some(),
            0.0,
        );
        checker.table(
            "nonhomomorphism_witness",
            serde_json::to_value(witness).expect("serializable"),
        );
    }
    let mut params = base_params(spec, None, modulus, None, backend);
    params.seed = Some(spec.seed);
    Ok(params)
}
