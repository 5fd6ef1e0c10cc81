//! The discrete Heisenberg group `H = ⟨a, b | [a,b] central⟩`.
//!
//! Elements are kept in the normal form `a^i b^j [a,b]^k` with
//! `[x,y] = x⁻¹y⁻¹xy`. A word in `a, b` is a lattice path; the central
//! coordinate of its value is the signed area enclosed once the path is
//! closed by `b^{-j} a^{-i}` (counterclockwise positive, so `[a,b]` has
//! area `+1`).

use std::fmt;

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::group::{GenAlphabet, GroupError, Letter, MarkedGroup, Word};
use crate::search::{self, BallIndex, DepthReport, SearchError};

pub const A: Letter = Letter::pos(0);
pub const B: Letter = Letter::pos(1);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeisError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("({i},{j},{k}) lies outside the box for n = {n}")]
    OutOfBox { i: i64, j: i64, k: i64, n: i64 },
    #[error("no word of length at most {bound} found for ({i},{j},{k})")]
    NoShortWord { i: i64, j: i64, k: i64, bound: usize },
    #[error("the family needs n > 2, got {0}")]
    SmallN(i64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeisElement {
    pub i: i64,
    pub j: i64,
    pub k: i64,
}

impl HeisElement {
    pub const IDENTITY: HeisElement = HeisElement { i: 0, j: 0, k: 0 };

    pub const fn new(i: i64, j: i64, k: i64) -> Self {
        HeisElement { i, j, k }
    }

    /// `[a,b]^k`.
    pub const fn central(k: i64) -> Self {
        HeisElement { i: 0, j: 0, k }
    }

    pub fn inverse(self) -> Self {
        HeisElement { i: -self.i, j: -self.j, k: -self.k - self.i * self.j }
    }

    /// The normal-form word `a^i b^j (a⁻¹b⁻¹ab)^k`.
    pub fn normal_word(self) -> Word {
        let mut w = Word::power(A, self.i);
        w.extend_from(&Word::power(B, self.j));
        let comm = Word::new(vec![A.inv(), B.inv(), A, B]);
        let c = if self.k < 0 { comm.inverse() } else { comm };
        for _ in 0..self.k.unsigned_abs() {
            w.extend_from(&c);
        }
        w
    }
}

impl fmt::Display for HeisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.k)
    }
}

impl Serialize for HeisElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(&self.i)?;
        t.serialize_element(&self.j)?;
        t.serialize_element(&self.k)?;
        t.end()
    }
}

/// Right multiplication by a letter of `{a±, b±}`.
pub fn heis_step(e: HeisElement, letter: Letter) -> HeisElement {
    let HeisElement { i, j, k } = e;
    match (letter.gen, letter.inverse) {
        (0, false) => HeisElement::new(i + 1, j, k - j),
        (0, true) => HeisElement::new(i - 1, j, k + j),
        (1, false) => HeisElement::new(i, j + 1, k),
        (1, true) => HeisElement::new(i, j - 1, k),
        _ => panic!("letter {letter} is not in {{a, b}}"),
    }
}

pub fn heis_mul(x: HeisElement, y: HeisElement) -> HeisElement {
    HeisElement::new(x.i + y.i, x.j + y.j, x.k + y.k - x.j * y.i)
}

#[derive(Debug, Clone)]
pub struct Heisenberg {
    alphabet: GenAlphabet,
}

impl Default for Heisenberg {
    fn default() -> Self {
        Heisenberg { alphabet: GenAlphabet::standard(2) }
    }
}

impl Heisenberg {
    pub fn new() -> Self {
        Self::default()
    }
}

impl MarkedGroup for Heisenberg {
    type Element = HeisElement;

    fn alphabet(&self) -> &GenAlphabet {
        &self.alphabet
    }

    fn identity(&self) -> HeisElement {
        HeisElement::IDENTITY
    }

    fn mul_letter(&self, g: &HeisElement, letter: Letter) -> HeisElement {
        heis_step(*g, letter)
    }
}

/// Unit-step path in `ℤ²` traced by a word: `a` is a step right, `b` up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePath {
    pub vertices: Vec<(i64, i64)>,
}

impl LatticePath {
    pub fn from_word(w: &Word) -> Result<Self, GroupError> {
        let mut v = vec![(0i64, 0i64)];
        for &l in w.letters() {
            let (x, y) = *v.last().unwrap();
            let s = l.sign();
            v.push(match l.gen {
                0 => (x + s, y),
                1 => (x, y + s),
                _ => return Err(GroupError::UnknownLetter { index: l.index(), size: 2 }),
            });
        }
        Ok(LatticePath { vertices: v })
    }

    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn end(&self) -> (i64, i64) {
        *self.vertices.last().unwrap()
    }

    /// Signed area of the path closed by going vertically to the `x`-axis
    /// and then horizontally back to the origin.
    pub fn closed_area(&self) -> i64 {
        let (ei, _) = self.end();
        let mut pts = self.vertices.clone();
        pts.push((ei, 0));
        pts.push((0, 0));
        let twice: i64 = pts.windows(2).map(|p| p[0].0 * p[1].1 - p[1].0 * p[0].1).sum();
        debug_assert!(twice % 2 == 0);
        twice / 2
    }
}

/// Value of a word in `a, b`, computed from its path: endpoint and area.
pub fn word_area_normal(w: &Word) -> Result<HeisElement, GroupError> {
    let path = LatticePath::from_word(w)?;
    let (i, j) = path.end();
    Ok(HeisElement::new(i, j, path.closed_area()))
}

/// `a^{-n-1} b^{-1} a b^{-n+1} a^n b^n`, a word of length `4n+2` for `[a,b]^{n²+1}`.
pub fn dd_witness(n: i64) -> Word {
    assert!(n >= 1, "dd_witness needs n ≥ 1");
    let mut w = Word::power(A, -n - 1);
    w.push(B.inv());
    w.push(A);
    w.extend_from(&Word::power(B, 1 - n));
    w.extend_from(&Word::power(A, n));
    w.extend_from(&Word::power(B, n));
    w
}

/// Signed letter permutations of `{a, b}`: the eight symmetries of the square.
/// Each is an automorphism of `H` preserving word length.
fn symmetries() -> Vec<[Letter; 2]> {
    let mut out = Vec::new();
    for swap in [false, true] {
        for sa in [false, true] {
            for sb in [false, true] {
                let (ga, gb) = if swap { (1, 0) } else { (0, 1) };
                out.push([Letter { gen: ga, inverse: sa }, Letter { gen: gb, inverse: sb }]);
            }
        }
    }
    out
}

fn apply_sym(sym: &[Letter; 2], w: &Word) -> Word {
    w.map_letters(|l| {
        let img = sym[l.index()];
        if l.inverse {
            img.inv()
        } else {
            img
        }
    })
}

fn invert_sym(sym: &[Letter; 2]) -> [Letter; 2] {
    let mut inv = [A; 2];
    for (g, img) in sym.iter().enumerate() {
        inv[img.index()] = Letter { gen: g as u16, inverse: img.inverse };
    }
    inv
}

/// Image of an element under a letter symmetry.
pub fn sym_image(sym: &[Letter; 2], e: HeisElement) -> HeisElement {
    heis_eval(&apply_sym(sym, &e.normal_word()))
}

fn heis_eval(w: &Word) -> HeisElement {
    w.letters().iter().fold(HeisElement::IDENTITY, |e, &l| heis_step(e, l))
}

/// The construction `b^{-q-1} a^r b a^{n+1-r} b^q a^{i-n-1} b^j` with
/// `k = q(n+1) + r`, for `i ≥ |j|`, `k ≥ 0`.
pub fn nd_closed_form_word(i: i64, j: i64, k: i64, n: i64) -> Option<Word> {
    if i < j.abs() || k < 0 {
        return None;
    }
    let (q, r) = (k / (n + 1), k % (n + 1));
    if q > n - 1 {
        return None;
    }
    Some(loop_family(i, j, n + 1, q + 1, r, 0))
}

/// `b^{-h} a^r b a^{W-r} b^{h-1+t} a^{i-W} b^{j-t}`.
fn loop_family(i: i64, j: i64, width: i64, h: i64, r: i64, t: i64) -> Word {
    let mut w = Word::power(B, -h);
    w.extend_from(&Word::power(A, r));
    w.push(B);
    w.extend_from(&Word::power(A, width - r));
    w.extend_from(&Word::power(B, h - 1 + t));
    w.extend_from(&Word::power(A, i - width));
    w.extend_from(&Word::power(B, j - t));
    w
}

/// Shortest member of the loop family for `e`, searched over a window of
/// parameters sized by `n`.
fn family_search(e: HeisElement, n: i64) -> Option<Word> {
    let mut best: Option<Word> = None;
    let span = 2 * n + 2;
    for width in 0..=span {
        for h in 0..=span {
            for r in 0..=width {
                for t in -span..=span {
                    let w = loop_family(e.i, e.j, width, h, r, t).freely_reduced();
                    if best.as_ref().is_some_and(|b| b.len() <= w.len()) {
                        continue;
                    }
                    if heis_eval(&w) == e {
                        best = Some(w);
                    }
                }
            }
        }
    }
    best
}

/// A word of length at most `4n+2` for `a^i b^j [a,b]^k`.
///
/// Accepts `|i|, |j| ≤ n+1` and `|k| < n(n+1)`. The closed-form loop word is
/// tried first after moving the element by a square symmetry to `i ≥ |j|,
/// k ≥ 0`; the symmetries shift `k` by `±ij`, so when that lands outside the
/// range of the closed form a wider family of loops is searched.
pub fn nd_witness(i: i64, j: i64, k: i64, n: i64) -> Result<Word, HeisError> {
    if n < 1 || i.abs() > n + 1 || j.abs() > n + 1 || k.abs() >= n * (n + 1) {
        return Err(HeisError::OutOfBox { i, j, k, n });
    }
    let target = HeisElement::new(i, j, k);
    let bound = (4 * n + 2) as usize;
    let syms = symmetries();
    let mut best: Option<Word> = None;
    let consider = |best: &mut Option<Word>, w: Word| {
        let w = w.freely_reduced();
        if best.as_ref().is_none_or(|b| w.len() < b.len()) {
            *best = Some(w);
        }
    };
    for sym in &syms {
        let inv = invert_sym(sym);
        let s = sym_image(&inv, target);
        if let Some(w) = nd_closed_form_word(s.i, s.j, s.k, n) {
            consider(&mut best, apply_sym(sym, &w));
        }
    }
    if best.as_ref().is_none_or(|b| b.len() > bound) {
        for sym in &syms {
            let inv = invert_sym(sym);
            let s = sym_image(&inv, target);
            if let Some(w) = family_search(s, n) {
                consider(&mut best, apply_sym(sym, &w));
            }
        }
    }
    match best {
        Some(w) if w.len() <= bound => {
            debug_assert_eq!(heis_eval(&w), target);
            Ok(w)
        }
        _ => Err(HeisError::NoShortWord { i, j, k, bound }),
    }
}

/// The box `|i| ≤ m, |j| ≤ m, |k| ≤ n²+1+m(m−1)/2` containing the
/// `m`-neighbourhood of `[a,b]^{n²+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NhBox {
    pub m: i64,
    pub n: i64,
}

pub fn nh_box(m: i64, n: i64) -> NhBox {
    assert!(m >= 0);
    NhBox { m, n }
}

impl NhBox {
    pub fn k_bound(&self) -> i64 {
        self.n * self.n + 1 + self.m * (self.m - 1) / 2
    }

    pub fn contains(&self, e: &HeisElement) -> bool {
        e.i.abs() <= self.m && e.j.abs() <= self.m && e.k.abs() <= self.k_bound()
    }

    pub fn points(&self) -> impl Iterator<Item = HeisElement> + '_ {
        let (m, kb) = (self.m, self.k_bound());
        (-m..=m).flat_map(move |i| (-m..=m).flat_map(move |j| (-kb..=kb).map(move |k| HeisElement::new(i, j, k))))
    }
}

/// `⌈√(2n−4) + 1⌉`, the least integer `d ≥ 1` with `(d−1)² ≥ 2n−4`.
pub fn depth_lower_bound(n: i64) -> i64 {
    let target = (2 * n - 4).max(0);
    let mut d = 1;
    while (d - 1) * (d - 1) < target {
        d += 1;
    }
    d
}

/// Largest `m` whose box fits inside the short-word region: `m < n` and
/// `n²+1+m(m−1)/2 < n(n+1)`.
pub fn box_radius(n: i64) -> i64 {
    let mut m = 0;
    while m + 1 < n && (m + 1) * m < 2 * n - 2 {
        m += 1;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub n: i64,
    pub element: HeisElement,
    pub distance: u64,
    pub expected_distance: u64,
    pub depth_lower_bound: i64,
    pub bfs: DepthReport<HeisElement>,
    /// `m + 1` where every element of the `m`-box has a word of length `≤ 4n+2`.
    pub analytic_depth_bound: i64,
}

impl FamilyReport {
    pub fn holds(&self) -> bool {
        self.distance == self.expected_distance
            && self.bfs.depth as i64 >= self.depth_lower_bound
            && self.analytic_depth_bound >= self.depth_lower_bound
    }

    pub fn csv_header() -> &'static str {
        "n,distance,depth_lower_bound,bfs_depth"
    }

    pub fn csv_row(&self) -> String {
        let d = if self.bfs.exceeds_cap { format!(">={}", self.bfs.depth) } else { self.bfs.depth.to_string() };
        format!("{},{},{},{}", self.n, self.distance, self.depth_lower_bound, d)
    }
}

/// Distance and depth of `g_n = [a,b]^{n²+1}`, from the oracle and from the
/// explicit short words on the neighbourhood box.
pub fn heis_family(n: i64, ball: &BallIndex<HeisElement>, cap: u64) -> Result<FamilyReport, HeisError> {
    if n <= 2 {
        return Err(HeisError::SmallN(n));
    }
    let h = Heisenberg::new();
    let g = HeisElement::central(n * n + 1);
    let bfs = search::depth_in_ball(&h, &g, ball, cap)?;
    let m = box_radius(n);
    let bound = (4 * n + 2) as usize;
    let all_short = nh_box(m, n).points().all(|e| nd_witness(e.i, e.j, e.k, n).is_ok_and(|w| w.len() <= bound));
    Ok(FamilyReport {
        n,
        element: g,
        distance: bfs.distance_from_identity,
        expected_distance: (4 * n + 2) as u64,
        depth_lower_bound: depth_lower_bound(n),
        bfs,
        analytic_depth_bound: if all_short { m + 1 } else { 0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(heis_step(HeisElement::IDENTITY, A), HeisElement::new(1, 0, 0));
        assert_eq!(heis_step(HeisElement::new(0, 1, 0), A), HeisElement::new(1, 1, -1));
        let h = Heisenberg::new();
        assert_eq!(h.evaluate(&w("a- b- a b")).unwrap(), HeisElement::central(1));
        assert_eq!(h.evaluate(&w("b a")).unwrap(), HeisElement::new(1, 1, -1));
    }

    #[test]
    fn mul_matches_steps() {
        let x = HeisElement::new(0, 1, 0);
        assert_eq!(heis_mul(x, HeisElement::new(1, 0, 0)), HeisElement::new(1, 1, -1));
        let y = HeisElement::new(-2, 3, 4);
        assert_eq!(heis_mul(y, HeisElement::IDENTITY), y);
        assert_eq!(heis_mul(y, y.inverse()), HeisElement::IDENTITY);
    }

    #[test]
    fn area_examples() {
        assert_eq!(word_area_normal(&Word::empty()).unwrap(), HeisElement::IDENTITY);
        assert_eq!(word_area_normal(&w("a- b- a b")).unwrap(), HeisElement::central(1));
        assert_eq!(word_area_normal(&w("a- a- a- b- a b- a a b b")).unwrap(), HeisElement::central(5));
        assert!(word_area_normal(&w("c")).is_err());
    }

    #[test]
    fn dd_words() {
        let h = Heisenberg::new();
        for n in 1..6 {
            let d = dd_witness(n);
            assert_eq!(d.len() as i64, 4 * n + 2);
            assert_eq!(h.evaluate(&d).unwrap(), HeisElement::central(n * n + 1));
        }
        assert_eq!(dd_witness(2), w("a- a- a- b- a b- a a b b"));
    }

    #[test]
    fn nd_examples() {
        assert_eq!(nd_witness(0, 0, 5, 2).unwrap(), w("b- b- a a b a b a- a- a-"));
        assert!(nd_witness(0, 0, 0, 3).unwrap().is_empty());
        let x = nd_witness(1, 1, 3, 2).unwrap();
        assert!(x.len() <= 10);
        assert_eq!(heis_eval(&x), HeisElement::new(1, 1, 3));
        assert!(matches!(nd_witness(0, 0, 6, 2), Err(HeisError::OutOfBox { .. })));
    }

    #[test]
    fn nd_needs_wider_family() {
        let x = nd_witness(1, 2, 11, 3).unwrap();
        assert!(x.len() <= 14);
        assert_eq!(heis_eval(&x), HeisElement::new(1, 2, 11));
    }

    #[test]
    fn symmetries_are_automorphisms() {
        let syms = symmetries();
        assert_eq!(syms.len(), 8);
        let e = HeisElement::new(2, -3, 5);
        let f = HeisElement::new(-1, 4, 2);
        for s in &syms {
            assert_eq!(sym_image(s, heis_mul(e, f)), heis_mul(sym_image(s, e), sym_image(s, f)));
            assert_eq!(sym_image(&invert_sym(s), sym_image(s, e)), e);
        }
        // Quarter turn a → b, b → a⁻¹.
        let rot = [B, A.inv()];
        assert_eq!(sym_image(&rot, e), HeisElement::new(3, 2, 5 + 2 * -3));
    }

    #[test]
    fn box_constants() {
        assert_eq!(depth_lower_bound(3), 3);
        assert_eq!(depth_lower_bound(4), 3);
        assert_eq!(depth_lower_bound(5), 4);
        assert_eq!(box_radius(3), 2);
        assert_eq!(box_radius(4), 2);
        assert!(nh_box(0, 2).contains(&HeisElement::central(5)));
        assert!(!nh_box(0, 2).contains(&HeisElement::new(0, 0, 6)));
        assert_eq!(nh_box(1, 2).k_bound(), 5);
    }

    #[test]
    fn family_rejects_small_n() {
        let h = Heisenberg::new();
        let b = search::ball(&h, 2).unwrap();
        assert_eq!(heis_family(2, &b, 1).unwrap_err(), HeisError::SmallN(2));
    }

    #[test]
    fn serializes_as_triple() {
        assert_eq!(serde_json::to_string(&HeisElement::new(1, -2, 3)).unwrap(), "[1,-2,3]");
    }
}
