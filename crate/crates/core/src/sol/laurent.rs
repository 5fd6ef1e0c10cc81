//! Integer Laurent polynomials and pairs of them acting on `ℤ²`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::{HypMatrix, Vec2};
use crate::group::{Letter, Word};

/// `Σ c_d t^d` with only nonzero coefficients stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: i64, d: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(c, d);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut p = Self::zero();
        for (d, c) in terms {
            p.add_term(c, d);
        }
        p
    }

    pub fn add_term(&mut self, c: i64, d: i32) {
        if c == 0 {
            return;
        }
        let e = self.coeffs.entry(d).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&d);
        }
    }

    pub fn coeff(&self, d: i32) -> i64 {
        self.coeffs.get(&d).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(degree, coefficient)` pairs in increasing degree.
    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.coeffs.iter().map(|(&d, &c)| (d, c))
    }

    /// `M(p)`, the top degree.
    pub fn top(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// `m(p)`, the bottom degree.
    pub fn bottom(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    /// `‖p‖`, the sum of absolute coefficients.
    pub fn norm(&self) -> u64 {
        self.coeffs.values().map(|c| c.unsigned_abs()).sum()
    }

    pub fn max_abs_coeff(&self) -> u64 {
        self.coeffs.values().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    #[must_use]
    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (d, c) in other.terms() {
            p.add_term(c, d);
        }
        p
    }

    #[must_use]
    pub fn scale(&self, k: i64) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().map(|(d, c)| (d, c * k)))
    }

    #[must_use]
    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.scale(-1))
    }

    /// `t^s · p`.
    #[must_use]
    pub fn shift(&self, s: i32) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().map(|(d, c)| (d + s, c)))
    }

    #[must_use]
    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (d1, c1) in self.terms() {
            for (d2, c2) in other.terms() {
                p.add_term(c1 * c2, d1 + d2);
            }
        }
        p
    }

    #[must_use]
    pub fn pow(&self, k: u32) -> LaurentPoly {
        let mut p = LaurentPoly::monomial(1, 0);
        for _ in 0..k {
            p = p.mul(self);
        }
        p
    }

    /// Image under `t ↦ sign/t`.
    #[must_use]
    pub fn involution(&self, sign: i64) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().map(|(d, c)| (-d, if sign < 0 && d % 2 != 0 { -c } else { c })))
    }

    /// `Σ c_d R^d v`, exact. `None` on overflow.
    pub fn act(&self, r: &HypMatrix, v: Vec2) -> Option<Vec2> {
        let mut acc = [0i64; 2];
        for (d, c) in self.terms() {
            let w = super::matrix::mat_vec(&r.pow(d as i64)?, v)?;
            acc[0] = acc[0].checked_add(w[0].checked_mul(c)?)?;
            acc[1] = acc[1].checked_add(w[1].checked_mul(c)?)?;
        }
        Some(acc)
    }

    /// The characteristic polynomial `t² − tr·t + det`.
    pub fn characteristic(r: &HypMatrix) -> LaurentPoly {
        LaurentPoly::from_terms([(2, 1), (1, -r.trace()), (0, r.det())])
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (d, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{a}t")?,
                (_, 1) => write!(f, "t^{d}")?,
                _ => write!(f, "{a}t^{d}")?,
            }
        }
        Ok(())
    }
}

/// A pair `(p₁, p₂)`, standing for `p₁·x + p₂·y`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SupportVector {
    pub p1: LaurentPoly,
    pub p2: LaurentPoly,
}

impl SupportVector {
    pub fn new(p1: LaurentPoly, p2: LaurentPoly) -> Self {
        SupportVector { p1, p2 }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from lamps: `(position, a-count, b-count)` where a lamp at
    /// cursor position `s` is the term of degree `−s`.
    pub fn from_lamps(lamps: impl IntoIterator<Item = (i32, i64, i64)>) -> Self {
        let mut v = Self::empty();
        for (s, ca, cb) in lamps {
            v.p1.add_term(ca, -s);
            v.p2.add_term(cb, -s);
        }
        v
    }

    /// Lamps `(position, a-count, b-count)` sorted by position.
    pub fn lamps(&self) -> Vec<(i32, i64, i64)> {
        let mut degs: Vec<i32> = self.p1.terms().chain(self.p2.terms()).map(|(d, _)| d).collect();
        degs.sort_unstable();
        degs.dedup();
        let mut out: Vec<(i32, i64, i64)> = degs.into_iter().map(|d| (-d, self.p1.coeff(d), self.p2.coeff(d))).collect();
        out.sort_unstable_by_key(|l| l.0);
        out
    }

    pub fn length(&self) -> u64 {
        self.p1.norm() + self.p2.norm()
    }

    pub fn is_empty(&self) -> bool {
        self.p1.is_zero() && self.p2.is_zero()
    }

    /// `M(p₁, p₂)`.
    pub fn top(&self) -> Option<i32> {
        self.p1.top().into_iter().chain(self.p2.top()).max()
    }

    /// `m(p₁, p₂)`.
    pub fn bottom(&self) -> Option<i32> {
        self.p1.bottom().into_iter().chain(self.p2.bottom()).min()
    }

    pub fn max_abs_coeff(&self) -> u64 {
        self.p1.max_abs_coeff().max(self.p2.max_abs_coeff())
    }

    #[must_use]
    pub fn add(&self, other: &SupportVector) -> SupportVector {
        SupportVector { p1: self.p1.add(&other.p1), p2: self.p2.add(&other.p2) }
    }
}

impl fmt::Display for SupportVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p1, self.p2)
    }
}

/// `p₁·x + p₂·y` in `ℤ²`, with `t` acting as `R`.
pub fn apply_poly(p1: &LaurentPoly, p2: &LaurentPoly, r: &HypMatrix) -> Option<Vec2> {
    let a = p1.act(r, [1, 0])?;
    let b = p2.act(r, [0, 1])?;
    Some([a[0].checked_add(b[0])?, a[1].checked_add(b[1])?])
}

/// Minimal length of a word in `a, b, c` whose lamp configuration is `v`
/// and whose cursor ends at `z`: letters plus the shortest tour from `0`
/// covering every lamp position and finishing at `z`.
pub fn ll_length(v: &SupportVector, z: i64) -> u64 {
    let positions: Vec<i64> = v.lamps().iter().map(|l| l.0 as i64).collect();
    let hi = positions.iter().copied().max().unwrap_or(0).max(0);
    let lo = positions.iter().copied().min().unwrap_or(0).min(0);
    let travel = 2 * (hi - lo) + ((z - hi).abs() - hi).min((z - lo).abs() + lo);
    travel as u64 + v.length()
}

/// A word realising [`ll_length`]: sweep to one end of the support, then the
/// other, lighting each lamp on first visit, then walk to `z`.
pub fn ll_word(v: &SupportVector, z: i64) -> Word {
    let lamps: BTreeMap<i64, (i64, i64)> = v.lamps().into_iter().map(|(s, a, b)| (s as i64, (a, b))).collect();
    let hi = lamps.keys().next_back().copied().unwrap_or(0).max(0);
    let lo = lamps.keys().next().copied().unwrap_or(0).min(0);
    let high_first = (z - lo).abs() + lo <= (z - hi).abs() - hi;
    let stops = if high_first { [hi, lo, z] } else { [lo, hi, z] };
    let c = Letter::pos(2);
    let mut word = Word::empty();
    let mut cur = 0i64;
    let mut lit = std::collections::BTreeSet::new();
    let mut light = |at: i64, word: &mut Word| {
        if let Some(&(a, b)) = lamps.get(&at) {
            if lit.insert(at) {
                word.extend_from(&Word::power(Letter::pos(0), a));
                word.extend_from(&Word::power(Letter::pos(1), b));
            }
        }
    };
    light(cur, &mut word);
    for stop in stops {
        while cur != stop {
            let step = (stop - cur).signum();
            word.push(if step > 0 { c } else { c.inv() });
            cur += step;
            light(cur, &mut word);
        }
    }
    word
}
