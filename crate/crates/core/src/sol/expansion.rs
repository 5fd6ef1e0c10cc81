//! Short expressions for integers and lattice points through powers of `R`.

use serde::Serialize;

use super::laurent::{ll_length, ll_word, LaurentPoly, SupportVector};
use super::matrix::HypMatrix;
use super::SolError;
use crate::group::Word;

/// `n = Σ k·p_m`, where `p_m` is the top-left entry of `R^m`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Expansion {
    /// `(m, k)` pairs with `k ≠ 0`, by increasing `m`.
    pub terms: Vec<(u32, i64)>,
}

impl Expansion {
    /// Number of letters from `S` used.
    pub fn length(&self) -> u64 {
        self.terms.iter().map(|t| t.1.unsigned_abs()).sum()
    }

    pub fn sum(&self, r: &HypMatrix) -> i128 {
        let p = top_left_powers(r, self.terms.last().map_or(0, |t| t.0));
        self.terms.iter().map(|&(m, k)| k as i128 * p[m as usize]).sum()
    }

    /// A Sol word `Π c^{−m} a^k c^m`; its `ℤ²` part has first coordinate `n`.
    pub fn sol_word(&self) -> Word {
        let mut v = SupportVector::empty();
        for &(m, k) in &self.terms {
            v.p1.add_term(k, m as i32);
        }
        ll_word(&v, 0)
    }
}

/// `p_0, …, p_top` via `p_{m+1} = tr·p_m − det·p_{m−1}`.
fn top_left_powers(r: &HypMatrix, top: u32) -> Vec<i128> {
    let mut p = vec![1i128, r.matrix()[0][0] as i128];
    while p.len() <= top as usize {
        let n = p.len();
        p.push(r.trace() as i128 * p[n - 1] - r.det() as i128 * p[n - 2]);
    }
    p.truncate(top as usize + 1);
    p
}

/// Constants with `length ≤ C₁ + max(0, C₂ ln(C₃|n|))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowersBound {
    /// Expanding and contracting parts of `p_m = p_e τ^m + p_c μ^m`.
    pub p_e: f64,
    pub p_c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl PowersBound {
    pub fn new(r: &HypMatrix) -> Self {
        let g = r.geometry();
        let (alpha, beta) = g.coords([1, 0]);
        let p_e = alpha * g.v_e[0];
        let p_c = beta * g.v_c[0];
        let tau = r.tau().abs();
        PowersBound {
            p_e,
            p_c,
            // The last stage writes the remainder, |n| ≤ |p_e|, as n·p_0.
            c1: p_e.abs().floor(),
            c2: tau * (1.0 + p_c.abs()) / tau.ln(),
            c3: tau / p_e.abs(),
        }
    }

    pub fn bound(&self, n: i64) -> f64 {
        if n == 0 {
            return self.c1;
        }
        self.c1 + (self.c2 * (self.c3 * n.unsigned_abs() as f64).ln()).max(0.0)
    }
}

/// Write `n` as a sum of top-left entries of nonnegative powers of `R`.
///
/// From `|n| ≤ |p_e τ^m|`, pick `|k| < |τ|` with `|n + k p_e τ^{m−1}| ≤ |p_e τ^{m−1}|`,
/// then a small correction `l·p_0` absorbing the contracting error, and recurse
/// on `m − 1`. The remainder at `m = 0` is written as `n·p_0`.
pub fn integer_expansion(n: i64, r: &HypMatrix) -> Expansion {
    let b = PowersBound::new(r);
    let tau = r.tau();
    let mut m: u32 = 0;
    while (n as f64).abs() > (b.p_e * tau.powi(m as i32)).abs() {
        m += 1;
    }
    let p = top_left_powers(r, m);
    let mut coeff = vec![0i64; m as usize + 1];
    let mut rest = n as i128;
    while m > 0 {
        m -= 1;
        let real = b.p_e * tau.powi(m as i32);
        let k = -(rest as f64 / real).trunc() as i64;
        rest += k as i128 * p[m as usize];
        let lim = real.abs().floor() as i128;
        if rest.abs() > lim {
            let l = -rest.signum() * (rest.abs() - lim);
            rest += l;
            coeff[0] -= l as i64;
        }
        coeff[m as usize] -= k;
    }
    coeff[0] += rest as i64;
    let terms = coeff.iter().enumerate().filter(|(_, &k)| k != 0).map(|(m, &k)| (m as u32, k)).collect();
    Expansion { terms }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistortWitness {
    pub word: Word,
    pub support: SupportVector,
    /// `ll` length of the digit construction before relation moves.
    pub raw_length: u64,
    pub length: u64,
    /// `2^{m+1} + 4m − 1`, or `2^{m+1} + 8m − 1` for `|tr R| ≤ 2`.
    pub stated_bound: u64,
    /// What the digit construction guarantees: `2⌊T/2⌋(2^{m+1} − 1)` letters
    /// plus travel, where `T` is the base and the support spans `[−m·s, m·s]`.
    pub construction_bound: u64,
}

/// Base `T` and the Laurent polynomial acting on `ℤ²` as `T·I`.
pub fn scalar_poly(r: &HypMatrix) -> (i64, LaurentPoly) {
    let (tr, det) = (r.trace(), r.det());
    if tr.abs() <= 2 {
        // t² + t⁻² acts as tr² − 2det, which is 3 or 6 in the small cases.
        (tr * tr - 2 * det, LaurentPoly::from_terms([(2, 1), (-2, 1)]))
    } else {
        (tr.abs(), LaurentPoly::from_terms([(1, tr.signum()), (-1, tr.signum() * det)]))
    }
}

fn balanced_digits(mut z: i64, base: i64, count: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut d = z.rem_euclid(base);
        if 2 * d > base {
            d -= base;
        }
        out.push(d);
        z = (z - d) / base;
    }
    debug_assert_eq!(z, 0);
    out
}

/// A word for `(z, 0)` built from balanced base-`T` digits of each coordinate,
/// each `T^i` rewritten as a power of `t ± t^{−1}` (or `t² + t^{−2}`), then
/// shortened by adding multiples `±t^s p_R` while `ll` length drops.
pub fn distort_witness(z: [i64; 2], m: u32, r: &HypMatrix) -> Result<DistortWitness, SolError> {
    let (base, q) = scalar_poly(r);
    let lim = base.checked_pow(m).ok_or(SolError::Overflow)?;
    if z[0].abs() >= lim || z[1].abs() >= lim {
        return Err(SolError::OutOfBox(z[0], z[1], lim));
    }
    let mut v = SupportVector::empty();
    for (c, zc) in z.iter().enumerate() {
        let mut qi = LaurentPoly::monomial(1, 0);
        for d in balanced_digits(*zc, base, m as usize + 1) {
            let term = qi.scale(d);
            if c == 0 {
                v.p1 = v.p1.add(&term);
            } else {
                v.p2 = v.p2.add(&term);
            }
            qi = qi.mul(&q);
        }
    }
    let raw_length = ll_length(&v, 0);
    let pr = LaurentPoly::characteristic(r);
    loop {
        let cur = ll_length(&v, 0);
        let (lo, hi) = (v.bottom().unwrap_or(0) - 2, v.top().unwrap_or(0));
        let mut best: Option<(u64, SupportVector)> = None;
        for s in lo..=hi {
            for eps in [1, -1] {
                let mv = pr.shift(s).scale(eps);
                for c in 0..2 {
                    let mut w = v.clone();
                    if c == 0 {
                        w.p1 = w.p1.add(&mv);
                    } else {
                        w.p2 = w.p2.add(&mv);
                    }
                    let l = ll_length(&w, 0);
                    if l < cur && best.as_ref().is_none_or(|b| l < b.0) {
                        best = Some((l, w));
                    }
                }
            }
        }
        match best {
            Some((_, w)) => v = w,
            None => break,
        }
    }
    let word = ll_word(&v, 0);
    let span = if r.trace().abs() <= 2 { 2 * m as u64 } else { m as u64 };
    let half = (base / 2) as u64;
    Ok(DistortWitness {
        length: word.len() as u64,
        word,
        support: v,
        raw_length,
        stated_bound: (1u64 << (m + 1)) + if r.trace().abs() <= 2 { 8 } else { 4 } * m as u64 - 1,
        construction_bound: 2 * half * ((1u64 << (m + 1)) - 1) + 4 * span,
    })
}
