//! The group `SL₂(ℤ_N)` with the row-vector action `(r, s) ↦ (ar + cs, br + ds)`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::ntheory::{prime_divisors, solve_linear_congruence};
use crate::exactnum::ZMod;
use crate::magnetic::TorusPoint;

/// Upper bound on [`enumerate`].
pub const ENUMERATION_LIMIT: u128 = 100_000;

/// `[[a, b], [c, d]]` modulo `N` with determinant 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SL2Element {
    pub a: ZMod,
    pub b: ZMod,
    pub c: ZMod,
    pub d: ZMod,
}

impl SL2Element {
    pub fn new(a: ZMod, b: ZMod, c: ZMod, d: ZMod) -> Result<Self> {
        let n = a.modulus();
        for x in [b, c, d] {
            if x.modulus() != n {
                return Err(Error::ModulusMismatch {
                    left: n,
                    right: x.modulus(),
                });
            }
        }
        let det = a * d - b * c;
        if det.value() != 1 % n {
            return Err(Error::BadDeterminant {
                a: a.value(),
                b: b.value(),
                c: c.value(),
                d: d.value(),
                det: det.value(),
                modulus: n,
            });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64, modulus: u64) -> Result<Self> {
        Self::new(
            ZMod::new(a, modulus)?,
            ZMod::new(b, modulus)?,
            ZMod::new(c, modulus)?,
            ZMod::new(d, modulus)?,
        )
    }

    fn raw(a: i64, b: i64, c: i64, d: i64, modulus: u64) -> Self {
        Self {
            a: ZMod::wrap(a, modulus),
            b: ZMod::wrap(b, modulus),
            c: ZMod::wrap(c, modulus),
            d: ZMod::wrap(d, modulus),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.a.modulus()
    }

    pub fn identity(modulus: u64) -> Self {
        Self::raw(1, 0, 0, 1, modulus)
    }

    /// `S = [[0, −1], [1, 0]]`.
    pub fn s(modulus: u64) -> Self {
        Self::raw(0, -1, 1, 0, modulus)
    }

    /// `T = [[1, 1], [0, 1]]`.
    pub fn t(modulus: u64) -> Self {
        Self::raw(1, 1, 0, 1, modulus)
    }

    /// `T^k`.
    pub fn t_pow(k: ZMod) -> Self {
        Self::raw(1, k.value() as i64, 0, 1, k.modulus())
    }

    /// Dilatation `diag(a, a⁻¹)`.
    pub fn dilatation(a: ZMod) -> Result<Self> {
        let inv = a.inv()?;
        Ok(Self {
            a,
            b: ZMod::zero(a.modulus()),
            c: ZMod::zero(a.modulus()),
            d: inv,
        })
    }

    pub fn to_ints(&self) -> [u64; 4] {
        [self.a.value(), self.b.value(), self.c.value(), self.d.value()]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.modulus())
    }

    pub fn mul(&self, o: &SL2Element) -> SL2Element {
        SL2Element {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inv(&self) -> SL2Element {
        SL2Element {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn pow(&self, k: i64) -> SL2Element {
        let base = if k < 0 { self.inv() } else { *self };
        let mut acc = Self::identity(self.modulus());
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `(r, s) ↦ (r, s)·A = (ar + cs, br + ds)`.
    pub fn act_on_point(&self, pt: TorusPoint) -> TorusPoint {
        TorusPoint {
            r: self.a * pt.r + self.c * pt.s,
            s: self.b * pt.r + self.d * pt.s,
        }
    }

    /// `A = T_L · D(a) · T_R` with `T_L = [[1,0],[c/a,1]]`, `T_R = [[1,b/a],[0,1]]`; needs `a` a unit.
    pub fn lower_diag_upper(&self) -> Result<[SL2Element; 3]> {
        let inv = self.a.inv()?;
        let n = self.modulus();
        let lower = Self::raw(1, 0, (self.c * inv).value() as i64, 1, n);
        Ok([lower, Self::dilatation(self.a)?, Self::t_pow(self.b * inv)])
    }
}

impl fmt::Display for SL2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.to_ints();
        write!(f, "({a},{b},{c},{d}) mod {}", self.modulus())
    }
}

impl std::str::FromStr for SL2Literal {
    type Err = Error;

    /// Parses `"a,b,c,d"` (integers, possibly negative).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::InvalidParams(format!(
                "expected four comma-separated integers, got {s:?}"
            )));
        }
        let mut v = [0i64; 4];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::InvalidParams(format!("not an integer: {p:?}")))?;
        }
        Ok(SL2Literal(v))
    }
}

/// Unreduced `a,b,c,d` literal, reduced once the modulus is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SL2Literal(pub [i64; 4]);

impl SL2Literal {
    pub fn reduce(self, modulus: u64) -> Result<SL2Element> {
        let [a, b, c, d] = self.0;
        SL2Element::from_ints(a, b, c, d, modulus)
    }
}

/// `x ε x'ᵀ` with `ε = [[0, −1], [1, 0]]`, i.e. `r'·s − r·s'`.
pub fn symplectic_form(x: TorusPoint, y: TorusPoint) -> ZMod {
    y.r * x.s - x.r * y.s
}

/// One letter of a generator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Token {
    T(ZMod),
    S,
    SInv,
    S2,
    D(ZMod),
}

impl Token {
    pub fn element(&self, modulus: u64) -> Result<SL2Element> {
        Ok(match self {
            Token::T(k) => SL2Element::t_pow(*k),
            Token::S => SL2Element::s(modulus),
            Token::SInv => SL2Element::s(modulus).inv(),
            Token::S2 => SL2Element::s(modulus).pow(2),
            Token::D(a) => SL2Element::dilatation(*a)?,
        })
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::T(k) => write!(f, "T^{}", k.value()),
            Token::S => write!(f, "S"),
            Token::SInv => write!(f, "S^-1"),
            Token::S2 => write!(f, "S^2"),
            Token::D(a) => write!(f, "D({})", a.value()),
        }
    }
}

/// Ordered product of tokens, read left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorWord {
    pub modulus: u64,
    pub tokens: Vec<Token>,
}

impl GeneratorWord {
    pub fn evaluate(&self) -> Result<SL2Element> {
        self.tokens
            .iter()
            .try_fold(SL2Element::identity(self.modulus), |acc, t| {
                Ok(acc.mul(&t.element(self.modulus)?))
            })
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tokens.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `D(a)` and its word `T^{−a} S T^{−a⁻¹} S⁻¹ T^{−a} S⁻¹`.
pub fn dilatation(a: ZMod) -> Result<(SL2Element, GeneratorWord)> {
    let inv = a.inv()?;
    let word = GeneratorWord {
        modulus: a.modulus(),
        tokens: vec![
            Token::T(-a),
            Token::S,
            Token::T(-inv),
            Token::SInv,
            Token::T(-a),
            Token::SInv,
        ],
    };
    Ok((SL2Element::dilatation(a)?, word))
}

/// Which word shape applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `d` a unit: `T^{b/d} D(1/d) S⁻¹ T^{−c/d} S`.
    UnitD,
    /// `d` not a unit, `c` a unit: `T^{a/c} D(1/c) S⁻¹ T^{d/c} S²`.
    UnitC,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub word: GeneratorWord,
    pub branch: Branch,
    /// Distinct sign candidates tried for the middle `T` factor (1 on the unit-`d` branch).
    pub candidates: usize,
    /// How many of them multiply back to the element.
    pub matched: usize,
}

pub fn decompose(elem: &SL2Element) -> Result<GeneratorWord> {
    decompose_detailed(elem).map(|d| d.word)
}

/// Word decomposition. On the unit-`c` branch both signs `T^{±d/c}` are tried; the sign
/// that reproduces the element is kept and exactly one distinct candidate must match.
pub fn decompose_detailed(elem: &SL2Element) -> Result<Decomposition> {
    let n = elem.modulus();
    let unreachable = || Error::Unreachable {
        a: elem.a.value(),
        b: elem.b.value(),
        c: elem.c.value(),
        d: elem.d.value(),
        modulus: n,
    };
    if let Ok(dinv) = elem.d.inv() {
        let word = GeneratorWord {
            modulus: n,
            tokens: vec![
                Token::T(elem.b * dinv),
                Token::D(dinv),
                Token::SInv,
                Token::T(-(elem.c * dinv)),
                Token::S,
            ],
        };
        if word.evaluate()? != *elem {
            return Err(unreachable());
        }
        return Ok(Decomposition {
            word,
            branch: Branch::UnitD,
            candidates: 1,
            matched: 1,
        });
    }
    let cinv = elem.c.inv().map_err(|_| unreachable())?;
    let mid = elem.d * cinv;
    let mut shifts = vec![mid, -mid];
    shifts.dedup();
    let words: Vec<GeneratorWord> = shifts
        .iter()
        .map(|k| GeneratorWord {
            modulus: n,
            tokens: vec![
                Token::T(elem.a * cinv),
                Token::D(cinv),
                Token::SInv,
                Token::T(*k),
                Token::S2,
            ],
        })
        .collect();
    let mut hits = Vec::new();
    for w in &words {
        if w.evaluate()? == *elem {
            hits.push(w.clone());
        }
    }
    if hits.len() != 1 {
        return Err(unreachable());
    }
    Ok(Decomposition {
        word: hits.remove(0),
        branch: Branch::UnitC,
        candidates: words.len(),
        matched: 1,
    })
}

/// `|SL₂(ℤ_N)| = N³ ∏_{p | N} (1 − p⁻²)`.
pub fn group_order(modulus: u64) -> u128 {
    let mut total = (modulus as u128).pow(3);
    for p in prime_divisors(modulus) {
        let p = p as u128;
        total = total / (p * p) * (p * p - 1);
    }
    total
}

/// Every element, in lexicographic `(a, b, c, d)` order.
pub fn enumerate(modulus: u64) -> Result<Vec<SL2Element>> {
    if modulus < 2 {
        return Err(Error::BadModulus(modulus));
    }
    let size = group_order(modulus);
    if size > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            what: "SL2 enumeration",
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    let n = modulus as i64;
    let mut out = Vec::with_capacity(size as usize);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let rhs = ZMod::wrap(1 + b * c, modulus).value();
                for d in solve_linear_congruence(a as u64, rhs, modulus) {
                    out.push(SL2Element::raw(a, b, c, d as i64, modulus));
                }
            }
        }
    }
    Ok(out)
}

/// `count` uniformly distributed elements, deterministic in `seed`.
///
/// Draws `(a, b, c)` uniformly and an index `i < N`; the draw is kept when `i` is below the
/// number of solutions `d` of `ad ≡ 1 + bc`, and the `i`-th solution is returned. Every
/// element is hit with probability `N⁻⁴` per draw.
pub fn sample(modulus: u64, seed: u64, count: usize) -> Result<Vec<SL2Element>> {
    if modulus < 2 {
        return Err(Error::BadModulus(modulus));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = rng.gen_range(0..modulus);
        let b = rng.gen_range(0..modulus);
        let c = rng.gen_range(0..modulus);
        let pick = rng.gen_range(0..modulus) as usize;
        let rhs = ((1 + b as u128 * c as u128) % modulus as u128) as u64;
        let sols = solve_linear_congruence(a, rhs, modulus);
        if let Some(d) = sols.get(pick) {
            out.push(SL2Element::raw(a as i64, b as i64, c as i64, *d as i64, modulus));
        }
    }
    Ok(out)
}
