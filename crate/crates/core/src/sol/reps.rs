//! Minimal-length representations `z = p₁·x + p₂·y`.
//!
//! [`RepSolver`] is the fast exact engine. It splits a representation at
//! degree zero into an upper part `Σ_{d≥0} c_d R^d` and a lower part
//! `Σ_{d<0} c_d R^d`, with digits `c_d ∈ ℤ²`, and peels digits off one end
//! at a time (Horner form). In eigen-coordinates `z = α·v_e + β·v_c`, an
//! upper part of length `≤ b` has `|β| ≤ b·β_max`, a lower part has
//! `|α| ≤ b·α_max/|τ|`, where `α_max, β_max` bound the coordinates of `x`
//! and `y`. These bands make every search finite without a degree window.
//!
//! [`gaps_minimal_reps`] is the slower recursion that removes one term
//! of degree inside the window `|d| < N(z, l)` at a time. It serves as an
//! independent check of the engine.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use super::laurent::{LaurentPoly, SupportVector};
use super::matrix::{EigenGeometry, HypMatrix, Vec2};
use super::SolError;

const EPS: f64 = 1e-7;

type Digits = Vec<(i32, Vec2)>;

pub struct RepSolver {
    r: HypMatrix,
    geo: EigenGeometry,
    alpha_max: f64,
    beta_max: f64,
    up: FxHashMap<(Vec2, u32), Option<u32>>,
    down: FxHashMap<(Vec2, u32), Option<u32>>,
    up_reps: FxHashMap<(Vec2, u32), Vec<Digits>>,
    down_reps: FxHashMap<(Vec2, u32), Vec<Digits>>,
    lengths: FxHashMap<Vec2, u32>,
}

fn norm1(c: Vec2) -> u32 {
    (c[0].unsigned_abs() + c[1].unsigned_abs()) as u32
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

/// All `c ∈ ℤ²` with `|c|₁ ≤ b`.
fn digits(b: u32) -> impl Iterator<Item = Vec2> {
    let b = b as i64;
    (-b..=b).flat_map(move |i| {
        let rest = b - i.abs();
        (-rest..=rest).map(move |j| [i, j])
    })
}

impl RepSolver {
    pub fn new(r: &HypMatrix) -> Self {
        let geo = r.geometry();
        let (ax, bx) = geo.coords([1, 0]);
        let (ay, by) = geo.coords([0, 1]);
        RepSolver {
            r: r.clone(),
            alpha_max: ax.abs().max(ay.abs()),
            beta_max: bx.abs().max(by.abs()),
            geo,
            up: FxHashMap::default(),
            down: FxHashMap::default(),
            up_reps: FxHashMap::default(),
            down_reps: FxHashMap::default(),
            lengths: FxHashMap::default(),
        }
    }

    pub fn matrix(&self) -> &HypMatrix {
        &self.r
    }

    fn beta_ok(&self, s: Vec2, b: u32) -> bool {
        self.geo.coords(s).1.abs() <= b as f64 * self.beta_max + EPS
    }

    fn alpha_ok(&self, y: Vec2, b: u32) -> bool {
        self.geo.coords(y).0.abs() <= b as f64 * self.alpha_max / self.geo.tau.abs() + EPS
    }

    /// Least `‖Σ_{d≥0} c_d‖` over upper representations of `s`, if `≤ b`.
    fn f_up(&mut self, s: Vec2, b: u32) -> Option<u32> {
        if s == [0, 0] {
            return Some(0);
        }
        if b == 0 || !self.beta_ok(s, b) {
            return None;
        }
        if let Some(&v) = self.up.get(&(s, b)) {
            return v;
        }
        let mut best: Option<u32> = None;
        for c in digits(b) {
            let cost = norm1(c);
            if best.is_some_and(|bv| cost >= bv) {
                continue;
            }
            let Some(s1) = self.r.apply_inv(sub(s, c)) else { continue };
            let rem = best.map_or(b, |bv| bv - 1).min(b) - cost;
            if s1 != [0, 0] && !self.beta_ok(s1, rem) {
                continue;
            }
            if let Some(t) = self.f_up(s1, rem) {
                if best.is_none_or(|bv| cost + t < bv) {
                    best = Some(cost + t);
                }
            }
        }
        self.up.insert((s, b), best);
        best
    }

    /// Least length over lower representations `Σ_{d<0} c_d R^d` of `y`, if `≤ b`.
    fn f_down(&mut self, y: Vec2, b: u32) -> Option<u32> {
        if y == [0, 0] {
            return Some(0);
        }
        if b == 0 || !self.alpha_ok(y, b) {
            return None;
        }
        if let Some(&v) = self.down.get(&(y, b)) {
            return v;
        }
        let ry = self.r.apply(y)?;
        let mut best: Option<u32> = None;
        for c in digits(b) {
            let cost = norm1(c);
            if best.is_some_and(|bv| cost >= bv) {
                continue;
            }
            let y1 = sub(ry, c);
            let rem = best.map_or(b, |bv| bv - 1).min(b) - cost;
            if y1 != [0, 0] && !self.alpha_ok(y1, rem) {
                continue;
            }
            if let Some(t) = self.f_down(y1, rem) {
                if best.is_none_or(|bv| cost + t < bv) {
                    best = Some(cost + t);
                }
            }
        }
        self.down.insert((y, b), best);
        best
    }

    /// Lattice points `s` with `|β(s)| ≤ L·β_max` and `|α(z − s)| ≤ L·α_max/|τ|`.
    fn splits(&self, z: Vec2, l: u32) -> Vec<Vec2> {
        let g = &self.geo;
        let (az, _) = g.coords(z);
        let ha = l as f64 * self.alpha_max / g.tau.abs() + EPS;
        let hb = l as f64 * self.beta_max + EPS;
        let mut xs = [f64::INFINITY, f64::NEG_INFINITY];
        let mut ys = [f64::INFINITY, f64::NEG_INFINITY];
        for sa in [-1.0, 1.0] {
            for sb in [-1.0, 1.0] {
                let a = az + sa * ha;
                let b = sb * hb;
                let p = [a * g.v_e[0] + b * g.v_c[0], a * g.v_e[1] + b * g.v_c[1]];
                xs = [xs[0].min(p[0]), xs[1].max(p[0])];
                ys = [ys[0].min(p[1]), ys[1].max(p[1])];
            }
        }
        let mut out = Vec::new();
        for i in (xs[0].floor() as i64)..=(xs[1].ceil() as i64) {
            for j in (ys[0].floor() as i64)..=(ys[1].ceil() as i64) {
                let s = [i, j];
                if self.beta_ok(s, l) && self.alpha_ok(sub(z, s), l) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Minimal total length of a representation of `z`, if at most `cap`.
    pub fn min_length(&mut self, z: Vec2, cap: u32) -> Option<u32> {
        if let Some(&l) = self.lengths.get(&z) {
            return (l <= cap).then_some(l);
        }
        for l in 0..=cap {
            if self.feasible(z, l) {
                self.lengths.insert(z, l);
                return Some(l);
            }
        }
        None
    }

    fn feasible(&mut self, z: Vec2, l: u32) -> bool {
        if z == [0, 0] {
            return true;
        }
        for s in self.splits(z, l) {
            if let Some(cu) = self.f_up(s, l) {
                if self.f_down(sub(z, s), l - cu).is_some() {
                    return true;
                }
            }
        }
        false
    }

    fn enum_up(&mut self, s: Vec2, cost: u32) -> Vec<Digits> {
        if s == [0, 0] {
            return if cost == 0 { vec![Vec::new()] } else { Vec::new() };
        }
        if let Some(v) = self.up_reps.get(&(s, cost)) {
            return v.clone();
        }
        let mut out = Vec::new();
        for c in digits(cost) {
            let k = norm1(c);
            let Some(s1) = self.r.apply_inv(sub(s, c)) else { continue };
            if self.f_up(s1, cost - k) != Some(cost - k) {
                continue;
            }
            for tail in self.enum_up(s1, cost - k) {
                let mut rep: Digits = Vec::with_capacity(tail.len() + 1);
                if c != [0, 0] {
                    rep.push((0, c));
                }
                rep.extend(tail.into_iter().map(|(d, v)| (d + 1, v)));
                out.push(rep);
            }
        }
        self.up_reps.insert((s, cost), out.clone());
        out
    }

    fn enum_down(&mut self, y: Vec2, cost: u32) -> Vec<Digits> {
        if y == [0, 0] {
            return if cost == 0 { vec![Vec::new()] } else { Vec::new() };
        }
        if let Some(v) = self.down_reps.get(&(y, cost)) {
            return v.clone();
        }
        let mut out = Vec::new();
        let Some(ry) = self.r.apply(y) else { return out };
        for c in digits(cost) {
            let k = norm1(c);
            let y1 = sub(ry, c);
            if self.f_down(y1, cost - k) != Some(cost - k) {
                continue;
            }
            for tail in self.enum_down(y1, cost - k) {
                let mut rep: Digits = Vec::with_capacity(tail.len() + 1);
                if c != [0, 0] {
                    rep.push((-1, c));
                }
                rep.extend(tail.into_iter().map(|(d, v)| (d - 1, v)));
                out.push(rep);
            }
        }
        self.down_reps.insert((y, cost), out.clone());
        out
    }

    /// Every representation of `z` of minimal length, sorted.
    pub fn minimal_reps(&mut self, z: Vec2, cap: u32) -> Result<Vec<SupportVector>, SolError> {
        let l = self.min_length(z, cap).ok_or(SolError::CapExceeded { cap })?;
        if z == [0, 0] {
            return Ok(vec![SupportVector::empty()]);
        }
        let mut out = BTreeSet::new();
        for s in self.splits(z, l) {
            let Some(cu) = self.f_up(s, l) else { continue };
            let y = sub(z, s);
            if self.f_down(y, l - cu) != Some(l - cu) {
                continue;
            }
            let ups = self.enum_up(s, cu);
            let downs = self.enum_down(y, l - cu);
            for u in &ups {
                for d in &downs {
                    out.insert(to_support(u.iter().chain(d.iter())));
                }
            }
        }
        Ok(out.into_iter().collect())
    }
}

fn to_support<'a>(digits: impl Iterator<Item = &'a (i32, Vec2)>) -> SupportVector {
    let mut v = SupportVector::empty();
    for &(d, c) in digits {
        v.p1.add_term(c[0], d);
        v.p2.add_term(c[1], d);
    }
    v
}

/// All minimal-length `(p₁, p₂)` with `p₁x + p₂y = z`, using a fresh solver.
pub fn minimal_reps(z: Vec2, r: &HypMatrix, l_cap: u32) -> Result<Vec<SupportVector>, SolError> {
    RepSolver::new(r).minimal_reps(z, l_cap)
}

/// The window `N(z, l)`: least integer with `N > log_|τ|(2l/D)`, where `D`
/// is the distance from the contracting component of `z` to `ℤ²`.
pub fn gap_window(z: Vec2, l: u32, r: &HypMatrix) -> i32 {
    let geo = r.geometry();
    let d = geo.contracting_offset(z);
    let x = (2.0 * l as f64 / d).ln() / geo.tau.abs().ln();
    let n = x.floor() as i32 + 1;
    n.max(1)
}

/// Minimal representations by the window recursion: a representation of
/// minimal length `l` has a term of degree `|d| < N(z, l)`, and removing one
/// unit of it leaves a minimal representation of length `l − 1`. One extra
/// degree is searched on each side to absorb floating-point error in `N`.
pub fn gaps_minimal_reps(z: Vec2, r: &HypMatrix, l_cap: u32) -> Result<Vec<SupportVector>, SolError> {
    let mut memo: FxHashMap<(Vec2, u32), bool> = FxHashMap::default();
    let mut powers: FxHashMap<i32, [Vec2; 2]> = FxHashMap::default();
    let l = (0..=l_cap).find(|&l| has_rep(z, l, r, &mut memo, &mut powers)).ok_or(SolError::CapExceeded { cap: l_cap })?;
    let mut reps_memo: FxHashMap<Vec2, Vec<SupportVector>> = FxHashMap::default();
    Ok(enum_gaps(z, l, r, &mut memo, &mut powers, &mut reps_memo))
}

fn terms(z: Vec2, l: u32, r: &HypMatrix, powers: &mut FxHashMap<i32, [Vec2; 2]>) -> Vec<(i32, usize, i64, Vec2)> {
    let n = gap_window(z, l, r) + 1;
    let mut out = Vec::new();
    for d in (1 - n)..n {
        let cols = *powers.entry(d).or_insert_with(|| {
            let m = r.pow(d as i64).expect("power overflow");
            [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
        });
        for (e, col) in cols.iter().enumerate() {
            for sign in [1i64, -1] {
                out.push((d, e, sign, [sign * col[0], sign * col[1]]));
            }
        }
    }
    out
}

fn has_rep(
    z: Vec2,
    l: u32,
    r: &HypMatrix,
    memo: &mut FxHashMap<(Vec2, u32), bool>,
    powers: &mut FxHashMap<i32, [Vec2; 2]>,
) -> bool {
    if z == [0, 0] {
        return true;
    }
    if l == 0 {
        return false;
    }
    if let Some(&v) = memo.get(&(z, l)) {
        return v;
    }
    let mut found = false;
    for (_, _, _, v) in terms(z, l, r, powers) {
        if has_rep(sub(z, v), l - 1, r, memo, powers) {
            found = true;
            break;
        }
    }
    memo.insert((z, l), found);
    found
}

fn enum_gaps(
    z: Vec2,
    l: u32,
    r: &HypMatrix,
    memo: &mut FxHashMap<(Vec2, u32), bool>,
    powers: &mut FxHashMap<i32, [Vec2; 2]>,
    reps: &mut FxHashMap<Vec2, Vec<SupportVector>>,
) -> Vec<SupportVector> {
    if z == [0, 0] {
        return vec![SupportVector::empty()];
    }
    if let Some(v) = reps.get(&z) {
        return v.clone();
    }
    let mut out = BTreeSet::new();
    for (d, e, sign, v) in terms(z, l, r, powers) {
        let rest = sub(z, v);
        if l >= 1 && (l == 1 || !has_rep(rest, l - 2, r, memo, powers)) && has_rep(rest, l - 1, r, memo, powers) {
            let unit = if e == 0 {
                SupportVector::new(LaurentPoly::monomial(sign, d), LaurentPoly::zero())
            } else {
                SupportVector::new(LaurentPoly::zero(), LaurentPoly::monomial(sign, d))
            };
            for rep in enum_gaps(rest, l - 1, r, memo, powers, reps) {
                let full = rep.add(&unit);
                if full.length() == l as u64 {
                    out.insert(full);
                }
            }
        }
    }
    let v: Vec<SupportVector> = out.into_iter().collect();
    reps.insert(z, v.clone());
    v
}
