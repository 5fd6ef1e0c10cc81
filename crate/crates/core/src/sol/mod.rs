//! Sol lattices `G_R = ℤ² ⋊_R ℤ` on the generators `a, b, c`.
//!
//! An element is `u·c^z` with `u ∈ ℤ²` (coordinates over `a, b`). The group
//! law is `(u, z)(u′, z′) = (u + R^{−z}u′, z + z′)`; it is the one for
//! which conjugation `c⁻¹·u·c` acts on `ℤ²` as `R`. Writing `u` as
//! `p₁·x + p₂·y` with Laurent polynomials in `t = R`, a term of degree `d`
//! is the conjugate `c^{−d} a c^{d}`, i.e. a lamp at cursor position `−d`
//! in the wreath product `ℤ² ≀ ℤ`.

pub mod expansion;
pub mod flat;
pub mod laurent;
pub mod matrix;
pub mod reps;
pub mod wreath;

use std::fmt;

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::group::{GenAlphabet, Letter, MarkedGroup};
use crate::search::BallIndex;

pub use laurent::{apply_poly, ll_length, LaurentPoly, SupportVector};
pub use matrix::{EigenGeometry, HypMatrix, Mat2, Vec2};
pub use reps::{minimal_reps, RepSolver};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolError {
    #[error("matrix {0:?} is not a hyperbolic automorphism of Z^2")]
    NotHyperbolic(Mat2),
    #[error("no representation of length at most {cap}")]
    CapExceeded { cap: u32 },
    #[error("({0},{1}) is outside the box |z_i| < {2}")]
    OutOfBox(i64, i64, i64),
    #[error("no K satisfies the window for m = {m}, n = {n}")]
    NoFeasibleK { m: u32, n: u32 },
    #[error("integer overflow in matrix powers")]
    Overflow,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolElement {
    pub u: Vec2,
    pub z: i64,
}

impl SolElement {
    pub const IDENTITY: SolElement = SolElement { u: [0, 0], z: 0 };

    pub const fn new(u: Vec2, z: i64) -> Self {
        SolElement { u, z }
    }
}

impl fmt::Display for SolElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.u[0], self.u[1], self.z)
    }
}

impl Serialize for SolElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(&self.u[0])?;
        t.serialize_element(&self.u[1])?;
        t.serialize_element(&self.z)?;
        t.end()
    }
}

pub fn sol_mul(x: &SolElement, y: &SolElement, r: &HypMatrix) -> Result<SolElement, SolError> {
    let w = matrix::mat_vec(&r.pow(-x.z).ok_or(SolError::Overflow)?, y.u).ok_or(SolError::Overflow)?;
    Ok(SolElement::new([x.u[0] + w[0], x.u[1] + w[1]], x.z + y.z))
}

#[derive(Debug, Clone)]
pub struct SolGroup {
    r: HypMatrix,
    alphabet: GenAlphabet,
    /// Columns of `R^{−z}` for `z ∈ [−reach, reach]`.
    cols: Vec<[Vec2; 2]>,
    reach: i64,
}

impl SolGroup {
    pub fn new(r: HypMatrix) -> Self {
        let mut reach = 0;
        while reach < 64 && r.pow(reach + 1).is_some() && r.pow(-(reach + 1)).is_some() {
            reach += 1;
        }
        let cols = (-reach..=reach)
            .map(|z| {
                let m = r.pow(-z).expect("within reach");
                [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
            })
            .collect();
        SolGroup { r, alphabet: GenAlphabet::standard(3), cols, reach }
    }

    pub fn matrix(&self) -> &HypMatrix {
        &self.r
    }
}

impl MarkedGroup for SolGroup {
    type Element = SolElement;

    fn alphabet(&self) -> &GenAlphabet {
        &self.alphabet
    }

    fn identity(&self) -> SolElement {
        SolElement::IDENTITY
    }

    fn mul_letter(&self, g: &SolElement, letter: Letter) -> SolElement {
        let s = letter.sign();
        match letter.gen {
            2 => SolElement::new(g.u, g.z + s),
            e => {
                assert!(g.z.abs() <= self.reach, "c-exponent {} beyond representable powers", g.z);
                let col = self.cols[(g.z + self.reach) as usize][e as usize];
                SolElement::new([g.u[0] + s * col[0], g.u[1] + s * col[1]], g.z)
            }
        }
    }
}

/// `‖g‖`: the least `ll_length(v, z)` over minimal representations `v` of `u`.
pub fn abs_norm(g: &SolElement, solver: &mut RepSolver, l_cap: u32) -> Result<u64, SolError> {
    let reps = solver.minimal_reps(g.u, l_cap)?;
    Ok(reps.iter().map(|v| ll_length(v, g.z)).min().expect("at least one representation"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapRow {
    pub element: SolElement,
    pub distance: u64,
    pub norm: u64,
    pub gap: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub radius: u64,
    pub rows: Vec<GapRow>,
    pub max_gap: i64,
    pub min_gap: i64,
    /// Elements whose representations exceeded the length cap.
    pub skipped: usize,
}

impl GapReport {
    /// `‖g‖ ≥ |g|` everywhere.
    pub fn upper_half_holds(&self) -> bool {
        self.min_gap >= 0
    }
}

/// `‖g‖ − |g|` over every element of the ball.
pub fn bdiff_gap(solver: &mut RepSolver, ball: &BallIndex<SolElement>, l_cap: u32) -> GapReport {
    let mut rows = Vec::with_capacity(ball.len());
    let mut skipped = 0;
    for (g, d) in ball.elements() {
        match abs_norm(g, solver, l_cap) {
            Ok(norm) => rows.push(GapRow { element: *g, distance: *d, norm, gap: norm as i64 - *d as i64 }),
            Err(_) => skipped += 1,
        }
    }
    let max_gap = rows.iter().map(|r| r.gap).max().unwrap_or(0);
    let min_gap = rows.iter().map(|r| r.gap).min().unwrap_or(0);
    GapReport { radius: ball.radius(), rows, max_gap, min_gap, skipped }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaubdSample {
    pub alternative: String,
    pub extra_length: u64,
    /// `|τ|^{2M(v)−2M(v′)}` and `|τ|^{2m(v′)−2m(v)}`.
    pub top_ratio: f64,
    pub bottom_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaubdReport {
    pub u: Vec2,
    pub minimal: String,
    pub samples: Vec<TaubdSample>,
    pub d1: f64,
    pub d2: f64,
    pub satisfied: bool,
}

/// Sample representations `v′` of `u` no more than four longer than a minimal
/// `v` and fit the least `D₂ > 1`, `D₁ > D₂·ln|τ|/4` with
/// `|τ|^{2M(v)−2M(v′)} < D₁(l(v′)−l(v)) + D₂` and the mirrored bottom bound.
///
/// Alternatives are the other minimal representations together with
/// `v + ε·t^s·p_R` and `v + ε·t^s·p_R + ε′·t^{s′}·p_R` over shifts near the
/// support of `v`.
pub fn taubd_check(u: Vec2, r: &HypMatrix, l_cap: u32, alt_count: usize) -> Result<TaubdReport, SolError> {
    let mut solver = RepSolver::new(r);
    let reps = solver.minimal_reps(u, l_cap)?;
    let v = reps[0].clone();
    let tau = r.tau().abs();
    let l = v.length();
    let pr = LaurentPoly::characteristic(r);
    let lo = v.bottom().unwrap_or(0) - 3;
    let hi = v.top().unwrap_or(0) + 1;
    let mut moves: Vec<SupportVector> = Vec::new();
    for s in lo..=hi {
        for eps in [1i64, -1] {
            let m = pr.shift(s).scale(eps);
            moves.push(SupportVector::new(m.clone(), LaurentPoly::zero()));
            moves.push(SupportVector::new(LaurentPoly::zero(), m));
        }
    }
    let mut alts: std::collections::BTreeSet<SupportVector> = reps.iter().skip(1).cloned().collect();
    for (i, m1) in moves.iter().enumerate() {
        let a = v.add(m1);
        if a.length() <= l + 4 {
            alts.insert(a.clone());
        }
        for m2 in &moves[i..] {
            let b = a.add(m2);
            if b.length() <= l + 4 && b != v {
                alts.insert(b);
            }
        }
    }
    let samples: Vec<TaubdSample> = if v.is_empty() {
        Vec::new()
    } else {
        alts.into_iter()
            .filter(|a| !a.is_empty())
            .take(alt_count)
            .map(|a| {
                let top = tau.powi(2 * (v.top().unwrap() - a.top().unwrap()));
                let bottom = tau.powi(2 * (a.bottom().unwrap() - v.bottom().unwrap()));
                TaubdSample { alternative: a.to_string(), extra_length: a.length() - l, top_ratio: top, bottom_ratio: bottom }
            })
            .collect()
    };
    let mut d2 = 1.0f64;
    for s in samples.iter().filter(|s| s.extra_length == 0) {
        d2 = d2.max(s.top_ratio).max(s.bottom_ratio);
    }
    d2 += 1e-6 * d2;
    let mut d1 = d2 * tau.ln() / 4.0;
    for s in samples.iter().filter(|s| s.extra_length > 0) {
        let need = (s.top_ratio.max(s.bottom_ratio) - d2) / s.extra_length as f64;
        d1 = d1.max(need);
    }
    d1 += 1e-6 * d1.max(1.0);
    let satisfied = d2 > 1.0
        && d1 > d2 * tau.ln() / 4.0
        && samples.iter().all(|s| {
            let rhs = d1 * s.extra_length as f64 + d2;
            s.top_ratio < rhs && s.bottom_ratio < rhs
        });
    Ok(TaubdReport { u, minimal: v.to_string(), samples, d1, d2, satisfied })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search;

    fn golden() -> HypMatrix {
        HypMatrix::new([[2, 1], [1, 1]]).unwrap()
    }

    #[test]
    fn group_law() {
        let r = golden();
        let g = SolGroup::new(r.clone());
        let w: crate::Word = "c- a c".parse().unwrap();
        assert_eq!(g.evaluate(&w).unwrap(), SolElement::new([2, 1], 0));
        let e = SolElement::new([3, -1], 2);
        assert_eq!(sol_mul(&e, &SolElement::IDENTITY, &r).unwrap(), e);
        let p = g.evaluate(&"c a c-".parse().unwrap()).unwrap();
        let q = g.evaluate(&"c a- c-".parse().unwrap()).unwrap();
        assert_eq!(sol_mul(&p, &q, &r).unwrap(), SolElement::IDENTITY);
    }

    #[test]
    fn mul_matches_letters() {
        let r = golden();
        let g = SolGroup::new(r.clone());
        let x: crate::Word = "a c b- c c a".parse().unwrap();
        let y: crate::Word = "c- b a c- a-".parse().unwrap();
        let ex = g.evaluate(&x).unwrap();
        let ey = g.evaluate(&y).unwrap();
        assert_eq!(sol_mul(&ex, &ey, &r).unwrap(), g.evaluate(&x.concat(&y)).unwrap());
    }

    #[test]
    fn norm_examples() {
        let r = golden();
        let mut solver = RepSolver::new(&r);
        assert_eq!(abs_norm(&SolElement::IDENTITY, &mut solver, 4).unwrap(), 0);
        assert_eq!(abs_norm(&SolElement::new([1, 0], 0), &mut solver, 4).unwrap(), 1);
        assert_eq!(abs_norm(&SolElement::new([2, 1], 0), &mut solver, 4).unwrap(), 3);
    }

    #[test]
    fn small_ball_gap() {
        let g = SolGroup::new(golden());
        let b = search::ball(&g, 4).unwrap();
        let mut solver = RepSolver::new(g.matrix());
        let rep = bdiff_gap(&mut solver, &b, 12);
        assert_eq!(rep.skipped, 0);
        assert!(rep.upper_half_holds());
        assert_eq!(rep.rows[0].gap, 0);
    }

    #[test]
    fn taubd_examples() {
        let r = golden();
        let rep = taubd_check([2, 1], &r, 6, 200).unwrap();
        assert!(rep.satisfied);
        assert!(!rep.samples.is_empty());
        let empty = taubd_check([0, 0], &r, 6, 200).unwrap();
        assert!(empty.samples.is_empty() && empty.satisfied);
    }
}
