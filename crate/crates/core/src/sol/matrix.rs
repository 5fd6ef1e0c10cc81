//! Hyperbolic automorphisms of `ℤ²` and their eigenline geometry.

use serde::{Deserialize, Serialize};

use super::SolError;

pub type Mat2 = [[i64; 2]; 2];
pub type Vec2 = [i64; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Option<Mat2> {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let v = a[i][0] as i128 * b[0][j] as i128 + a[i][1] as i128 * b[1][j] as i128;
            out[i][j] = i64::try_from(v).ok()?;
        }
    }
    Some(out)
}

pub fn mat_vec(a: &Mat2, v: Vec2) -> Option<Vec2> {
    let x = a[0][0] as i128 * v[0] as i128 + a[0][1] as i128 * v[1] as i128;
    let y = a[1][0] as i128 * v[0] as i128 + a[1][1] as i128 * v[1] as i128;
    Some([i64::try_from(x).ok()?, i64::try_from(y).ok()?])
}

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];

/// A 2×2 integer matrix with `|det| = 1` and real eigenvalues off the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Mat2", into = "Mat2")]
pub struct HypMatrix {
    m: Mat2,
    inv: Mat2,
    tr: i64,
    det: i64,
}

impl TryFrom<Mat2> for HypMatrix {
    type Error = SolError;

    fn try_from(m: Mat2) -> Result<Self, SolError> {
        HypMatrix::new(m)
    }
}

impl From<HypMatrix> for Mat2 {
    fn from(h: HypMatrix) -> Mat2 {
        h.m
    }
}

impl HypMatrix {
    pub fn new(m: Mat2) -> Result<Self, SolError> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let tr = m[0][0] + m[1][1];
        let hyperbolic = (det == 1 && tr.abs() >= 3) || (det == -1 && tr.abs() >= 1);
        if !hyperbolic {
            return Err(SolError::NotHyperbolic(m));
        }
        // Inverse of a unimodular matrix is det · adj.
        let inv = [[det * m[1][1], -det * m[0][1]], [-det * m[1][0], det * m[0][0]]];
        Ok(HypMatrix { m, inv, tr, det })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn inverse(&self) -> &Mat2 {
        &self.inv
    }

    pub fn trace(&self) -> i64 {
        self.tr
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    /// Discriminant `tr² − 4 det` of the characteristic polynomial.
    pub fn discriminant(&self) -> i64 {
        self.tr * self.tr - 4 * self.det
    }

    /// `R^k` for any integer `k`, or `None` on overflow.
    pub fn pow(&self, k: i64) -> Option<Mat2> {
        let base = if k < 0 { self.inv } else { self.m };
        let mut out = IDENTITY;
        for _ in 0..k.unsigned_abs() {
            out = mat_mul(&out, &base)?;
        }
        Some(out)
    }

    pub fn apply(&self, v: Vec2) -> Option<Vec2> {
        mat_vec(&self.m, v)
    }

    pub fn apply_inv(&self, v: Vec2) -> Option<Vec2> {
        mat_vec(&self.inv, v)
    }

    /// Sign `s` with eigenvalue `(tr + s√Δ)/2` expanding.
    fn expanding_sign(&self) -> f64 {
        if self.tr > 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// The expanding eigenvalue `τ`, `|τ| > 1`.
    pub fn tau(&self) -> f64 {
        let s = self.expanding_sign();
        (self.tr as f64 + s * (self.discriminant() as f64).sqrt()) / 2.0
    }

    /// The contracting eigenvalue `det/τ`.
    pub fn mu(&self) -> f64 {
        self.det as f64 / self.tau()
    }

    pub fn geometry(&self) -> EigenGeometry {
        EigenGeometry::new(self)
    }
}

/// Distances to the eigenlines, and coordinates in the eigenbasis.
///
/// Eigenvectors are taken as `(r12, λ − r11)`. The cross product of an
/// integer vector with one of them is `(P + s·z1·√Δ)/2` for an integer `P`,
/// and is evaluated through the conjugate `(P² − z1²Δ)/(2(P − s·z1·√Δ))`
/// whenever the direct sum cancels.
#[derive(Debug, Clone)]
pub struct EigenGeometry {
    r12: i64,
    r11: i64,
    tr: i64,
    disc: i64,
    s_e: f64,
    pub tau: f64,
    pub mu: f64,
    /// Unnormalised eigenvectors.
    pub v_e: [f64; 2],
    pub v_c: [f64; 2],
    norm_e: f64,
    norm_c: f64,
    /// `cross(v_e, v_c)`.
    cross_ec: f64,
}

impl EigenGeometry {
    fn new(r: &HypMatrix) -> Self {
        let m = r.matrix();
        let s_e = r.expanding_sign();
        let disc = r.discriminant();
        let sq = (disc as f64).sqrt();
        let tau = r.tau();
        let mu = r.mu();
        let v_e = [m[0][1] as f64, tau - m[0][0] as f64];
        let v_c = [m[0][1] as f64, mu - m[0][0] as f64];
        let norm_e = v_e[0].hypot(v_e[1]);
        let norm_c = v_c[0].hypot(v_c[1]);
        // cross(v_e, v_c) = r12 (μ − τ) = −s_e r12 √Δ.
        let cross_ec = -s_e * m[0][1] as f64 * sq;
        EigenGeometry { r12: m[0][1], r11: m[0][0], tr: r.trace(), disc, s_e, tau, mu, v_e, v_c, norm_e, norm_c, cross_ec }
    }

    /// `cross(z, (r12, λ_s − r11))` for the eigenvalue with sign `s`.
    fn cross_eig(&self, z: Vec2, s: f64) -> f64 {
        let p = z[0] as i128 * (self.tr - 2 * self.r11) as i128 - 2 * z[1] as i128 * self.r12 as i128;
        let root = (self.disc as f64).sqrt();
        let q = s * z[0] as f64 * root;
        let pf = p as f64;
        if pf * q >= 0.0 {
            (pf + q) / 2.0
        } else {
            let num = p * p - (z[0] as i128) * (z[0] as i128) * self.disc as i128;
            num as f64 / (2.0 * (pf - q))
        }
    }

    /// Euclidean distance from `z` to the contracting line.
    pub fn d_c(&self, z: Vec2) -> f64 {
        self.cross_eig(z, -self.s_e).abs() / self.norm_c
    }

    /// Euclidean distance from `z` to the expanding line.
    pub fn d_e(&self, z: Vec2) -> f64 {
        self.cross_eig(z, self.s_e).abs() / self.norm_e
    }

    /// Coordinates `(α, β)` with `z = α·v_e + β·v_c`.
    pub fn coords(&self, z: Vec2) -> (f64, f64) {
        let alpha = self.cross_eig(z, -self.s_e) / self.cross_ec;
        let beta = -self.cross_eig(z, self.s_e) / self.cross_ec;
        (alpha, beta)
    }

    pub fn unit_e(&self) -> [f64; 2] {
        [self.v_e[0] / self.norm_e, self.v_e[1] / self.norm_e]
    }

    pub fn unit_c(&self) -> [f64; 2] {
        [self.v_c[0] / self.norm_c, self.v_c[1] / self.norm_c]
    }

    /// Distance from the point `β(z)·v_c` (the contracting component of `z`) to `ℤ²`.
    pub fn contracting_offset(&self, z: Vec2) -> f64 {
        let (_, beta) = self.coords(z);
        let p = [beta * self.v_c[0], beta * self.v_c[1]];
        let (dx, dy) = (p[0] - p[0].round(), p[1] - p[1].round());
        dx.hypot(dy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hyperbolic() {
        assert!(HypMatrix::new([[1, 1], [0, 1]]).is_err());
        assert!(HypMatrix::new([[2, 1], [1, 2]]).is_err());
        assert!(HypMatrix::new([[0, 1], [-1, 0]]).is_err());
        assert!(HypMatrix::new([[1, 1], [1, 0]]).is_ok());
        assert!(HypMatrix::new([[2, 1], [1, 1]]).is_ok());
    }

    #[test]
    fn tau_golden() {
        let r = HypMatrix::new([[2, 1], [1, 1]]).unwrap();
        assert!((r.tau() - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(r.pow(-1).unwrap(), [[1, -1], [-1, 2]]);
        assert_eq!(mat_mul(&r.pow(3).unwrap(), &r.pow(-3).unwrap()).unwrap(), IDENTITY);
    }

    #[test]
    fn eigenvectors_are_eigen() {
        for m in [[[1, 1], [1, 0]], [[2, 1], [1, 0]], [[2, 1], [1, 1]], [[3, 1], [2, 1]], [[-3, 1], [-1, 0]]] {
            let r = HypMatrix::new(m).unwrap();
            let g = r.geometry();
            for (v, lam) in [(g.v_e, g.tau), (g.v_c, g.mu)] {
                let rv = [m[0][0] as f64 * v[0] + m[0][1] as f64 * v[1], m[1][0] as f64 * v[0] + m[1][1] as f64 * v[1]];
                assert!((rv[0] - lam * v[0]).abs() < 1e-9 && (rv[1] - lam * v[1]).abs() < 1e-9);
            }
            assert!(g.tau.abs() > 1.0);
            let (a, b) = g.coords([3, -7]);
            let back = [a * g.v_e[0] + b * g.v_c[0], a * g.v_e[1] + b * g.v_c[1]];
            assert!((back[0] - 3.0).abs() < 1e-9 && (back[1] + 7.0).abs() < 1e-9);
        }
    }

    #[test]
    fn small_trace_identities() {
        // tr = t + det/t, so t² + t⁻² = tr² − 2 det.
        for (m, want) in [([[1, 1], [1, 0]], 3.0), ([[2, 1], [1, 0]], 6.0)] {
            let t = HypMatrix::new(m).unwrap().tau();
            assert!((t * t + 1.0 / (t * t) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn distances_scale() {
        let r = HypMatrix::new([[2, 1], [1, 1]]).unwrap();
        let g = r.geometry();
        let z = [5, -3];
        let rz = r.apply(z).unwrap();
        assert!((g.d_c(rz) / g.d_c(z) - g.tau.abs()).abs() < 1e-9 * g.tau.abs());
        assert!((g.d_e(rz) * g.tau.abs() / g.d_e(z) - 1.0).abs() < 1e-9);
    }
}
