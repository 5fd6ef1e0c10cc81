//! Candidate pockets in the commutator subgroup: points `K·x` far from both
//! eigenlines, inside a box small enough that short words reach everything.

use serde::Serialize;

use super::matrix::{EigenGeometry, HypMatrix, Vec2};
use super::{SolElement, SolError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FlatParams {
    /// Overrides the built-in constant `C₂` bounding eigenline distances of
    /// minimal representatives.
    pub c2: Option<f64>,
    /// Overrides the neighbourhood size `L` (default: the largest feasible).
    pub l: Option<i64>,
}

/// Conservative `C₂`: a minimal representative has coefficients at most
/// `|tr R| + 2`, so `d_c` of its top-degree part is bounded by a geometric
/// series in `1/|τ|`.
pub fn default_c2(r: &HypMatrix) -> f64 {
    (r.trace().abs() as f64 + 2.0) / (1.0 - 1.0 / r.tau().abs())
}

/// Side of the coordinate box is `2·base^m`: `|tr R|`, or 3 and 6 for traces 1 and 2.
pub fn box_base(r: &HypMatrix) -> i64 {
    match r.trace().abs() {
        1 => 3,
        2 => 6,
        t => t,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatCandidates {
    pub m: u32,
    pub n: u32,
    pub c2: f64,
    pub l: i64,
    /// Inclusive range of admissible `K`.
    pub k_min: i64,
    pub k_max: i64,
    pub candidates: Vec<SolElement>,
    bound: i64,
    dc_min: f64,
    de_min: f64,
    #[serde(skip)]
    geom: EigenGeometry,
}

impl FlatCandidates {
    /// Membership in `B_{m,n}`: inside the box and far from both eigenlines.
    pub fn contains(&self, u: Vec2) -> bool {
        u[0].abs() < self.bound && u[1].abs() < self.bound && self.geom.d_c(u) > self.dc_min && self.geom.d_e(u) > self.de_min
    }

    pub fn box_bound(&self) -> i64 {
        self.bound
    }
}

/// Propose `K·x` for every `K` with `(L + 2C₂|τ|ⁿ)ρ < K < base^m − L`, where
/// `ρ = max(d_c(x), d_c(y), d_e(x), d_e(y)) / min(d_c(x), d_e(x))`.
/// Candidates still need checking with a ball search.
pub fn flat_candidates(r: &HypMatrix, m: u32, n: u32, params: FlatParams) -> Result<FlatCandidates, SolError> {
    let g = r.geometry();
    let c2 = params.c2.unwrap_or_else(|| default_c2(r));
    let (x, y) = ([1, 0], [0, 1]);
    let dc = g.d_c(x).max(g.d_c(y));
    let de = g.d_e(x).max(g.d_e(y));
    let rho = dc.max(de) / g.d_c(x).min(g.d_e(x));
    let a = 2.0 * c2 * r.tau().abs().powi(n as i32);
    let bound = box_base(r).checked_pow(m).ok_or(SolError::Overflow)?;
    let infeasible = SolError::NoFeasibleK { m, n };
    let window = |l: i64| {
        let lo = ((l as f64 + a) * rho).floor() as i64 + 1;
        let hi = bound - l - 1;
        (lo <= hi).then_some((lo, hi))
    };
    let l = match params.l {
        Some(l) => l,
        None => {
            let mut l = 1;
            while window(l + 1).is_some() {
                l += 1;
            }
            l
        }
    };
    let (k_min, k_max) = window(l.max(1)).ok_or(infeasible)?;
    let candidates = (k_min..=k_max).map(|k| SolElement::new([k, 0], 0)).collect();
    Ok(FlatCandidates { m, n, c2, l, k_min, k_max, candidates, bound, dc_min: a * dc, de_min: a * de, geom: g })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> HypMatrix {
        HypMatrix::new([[2, 1], [1, 1]]).unwrap()
    }

    #[test]
    fn small_m_is_infeasible() {
        let r = golden();
        assert!(matches!(flat_candidates(&r, 2, 1, FlatParams::default()), Err(SolError::NoFeasibleK { .. })));
    }

    #[test]
    fn feasible_window() {
        let r = golden();
        let f = flat_candidates(&r, 5, 1, FlatParams { l: Some(1), ..Default::default() }).unwrap();
        assert!(!f.candidates.is_empty());
        assert!(!f.contains([0, 0]));
        for c in &f.candidates {
            assert!(f.contains(c.u), "{c}");
        }
        let wide = flat_candidates(&r, 5, 1, FlatParams::default()).unwrap();
        assert!(wide.l >= f.l && wide.k_min <= wide.k_max);
    }

    #[test]
    fn override_shrinks_threshold() {
        let r = golden();
        let f = flat_candidates(&r, 2, 0, FlatParams { c2: Some(0.5), l: Some(1) }).unwrap();
        assert!(f.k_max < 9 && f.k_min >= 1);
    }
}
