//! The polytope `B = conv(A′ ∪ −A′)` of scaled generators, its facets and
//! the depth bound they give.

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use super::{weighted_distances, AbelianError, WeightedGenSet};
use crate::group::{Letter, Point, Word};
use crate::search::{depth_in_ball, BallIndex};

type Q = Ratio<i128>;

/// A scaled generator `±a·M/μ(a)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaledPoint {
    pub v: Vec<i64>,
    /// The original generator letter (with sign) it comes from.
    pub letter: Letter,
    /// `M/μ(a)`: copies of the letter the point stands for.
    pub copies: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Facet {
    /// `𝐚` with `𝐚·x = 1` on the facet and `≤ 1` on `B`.
    #[serde(serialize_with = "ser_ratios")]
    pub functional: Vec<Q>,
    /// Every scaled point on the facet's hyperplane.
    pub points: Vec<usize>,
    /// Extreme points, in boundary order when the facet is a polygon.
    pub vertices: Vec<usize>,
    /// Fan triangulation from the lexicographically least vertex.
    pub simplices: Vec<Vec<usize>>,
}

fn ser_ratios<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|q| q.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaledPolytope {
    pub n: usize,
    pub m: u64,
    pub points: Vec<ScaledPoint>,
    pub facets: Vec<Facet>,
}

impl ScaledPolytope {
    pub fn eval(&self, f: &Facet, p: &[i64]) -> Q {
        f.functional.iter().zip(p).map(|(a, &x)| a * Q::from_integer(x as i128)).sum()
    }

    pub fn find_point(&self, v: &[i64]) -> Option<usize> {
        self.points.iter().position(|p| p.v == v)
    }
}

/// Solve `A x = b` over `ℚ`; `None` if singular.
fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).find(|&r| a[r][col] != Q::from_integer(0))?;
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col && a[r][col] != Q::from_integer(0) {
                let f = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, t) in a[r].iter_mut().zip(pivot_row).skip(col) {
                    *x -= f * t;
                }
                let t = b[col];
                b[r] -= f * t;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, k, n, cur, out);
            cur.pop();
        }
    }
    rec(0, k, n, &mut cur, &mut out);
    out
}

fn cross(o: &[i64; 2], a: &[i64; 2], b: &[i64; 2]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

/// Strict convex hull of 2D points in counter-clockwise order (indices into `pts`).
fn hull_2d(pts: &[[i64; 2]], ids: &[usize]) -> Vec<usize> {
    let mut ids = ids.to_vec();
    ids.sort_by_key(|&i| pts[i]);
    ids.dedup_by_key(|i| pts[*i]);
    if ids.len() < 3 {
        return ids;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &ids {
        while lower.len() >= 2 && cross(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i]) <= 0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in ids.iter().rev() {
        while upper.len() >= 2 && cross(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i]) <= 0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn build_polytope(ws: &WeightedGenSet) -> Result<ScaledPolytope, AbelianError> {
    let n = ws.rank();
    if n > 3 {
        return Err(AbelianError::UnsupportedRank(n));
    }
    let m = ws.lcm_weight();
    let mut points: Vec<ScaledPoint> = Vec::new();
    for (i, g) in ws.gens().iter().enumerate() {
        let copies = m / g.w;
        for sign in [1i8, -1] {
            let v: Vec<i64> = g.v.iter().map(|&x| x * copies as i64 * sign as i64).collect();
            if !points.iter().any(|p| p.v == v) {
                points.push(ScaledPoint { v, letter: Letter::new(i, sign), copies });
            }
        }
    }
    let one = Q::from_integer(1);
    let mut facets: Vec<Facet> = Vec::new();
    for subset in combinations(n, points.len()) {
        let a = subset.iter().map(|&i| points[i].v.iter().map(|&x| Q::from_integer(x as i128)).collect()).collect();
        let Some(func) = solve(a, vec![one; n]) else { continue };
        if facets.iter().any(|f| f.functional == func) {
            continue;
        }
        let dot = |p: &ScaledPoint| -> Q { func.iter().zip(&p.v).map(|(a, &x)| a * Q::from_integer(x as i128)).sum() };
        if points.iter().any(|p| dot(p) > one) {
            continue;
        }
        let on: Vec<usize> = (0..points.len()).filter(|&i| dot(&points[i]) == one).collect();
        facets.push(Facet { functional: func, points: on, vertices: Vec::new(), simplices: Vec::new() });
    }
    if facets.is_empty() {
        return Err(AbelianError::DegenerateHull(n));
    }
    for f in &mut facets {
        f.vertices = match n {
            1 => f.points.clone(),
            2 => {
                let mut on = f.points.clone();
                on.sort_by(|&a, &b| points[a].v.cmp(&points[b].v));
                vec![on[0], on[on.len() - 1]]
            }
            _ => {
                // Drop the coordinate with the largest functional entry; the
                // projection is injective on the facet's plane.
                let k = (0..3)
                    .max_by_key(|&k| {
                        let q = f.functional[k];
                        if q < Q::from_integer(0) {
                            -q
                        } else {
                            q
                        }
                    })
                    .unwrap();
                let keep: Vec<usize> = (0..3).filter(|&c| c != k).collect();
                let proj: Vec<[i64; 2]> = points.iter().map(|p| [p.v[keep[0]], p.v[keep[1]]]).collect();
                hull_2d(&proj, &f.points)
            }
        };
        let least = (0..f.vertices.len()).min_by(|&a, &b| points[f.vertices[a]].v.cmp(&points[f.vertices[b]].v)).unwrap();
        let cyc: Vec<usize> = (0..f.vertices.len()).map(|i| f.vertices[(least + i) % f.vertices.len()]).collect();
        f.simplices = if n < 3 { vec![cyc] } else { (1..cyc.len() - 1).map(|i| vec![cyc[0], cyc[i], cyc[i + 1]]).collect() };
    }
    facets.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(ScaledPolytope { n, m, points, facets })
}

/// `a₁^{i₁} ⋯ a_k^{i_k}` over the original generators, each scaled point
/// expanded into `M/μ(a)` copies of its letter.
pub fn facet_ray_word(poly: &ScaledPolytope, on: &[usize], exponents: &[u64]) -> Result<Word, AbelianError> {
    if on.len() != exponents.len() {
        return Err(AbelianError::BadInput(format!("{} points but {} exponents", on.len(), exponents.len())));
    }
    if !poly.facets.iter().any(|f| on.iter().all(|i| f.points.contains(i))) {
        return Err(AbelianError::NotAFacet(on.to_vec()));
    }
    let mut w = Word::empty();
    for (&i, &e) in on.iter().zip(exponents) {
        let p = &poly.points[i];
        w.extend_from(&Word::power(p.letter, (p.copies * e) as i64));
    }
    Ok(w)
}

/// Lattice points in the closed parallelepiped spanned by `verts`.
fn parallelepiped_points(poly: &ScaledPolytope, verts: &[usize]) -> Vec<Vec<i64>> {
    let n = poly.n;
    let cols: Vec<&Vec<i64>> = verts.iter().map(|&i| &poly.points[i].v).collect();
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for mask in 0..1u32 << n {
        for c in 0..n {
            let s: i64 = (0..n).filter(|&j| mask >> j & 1 == 1).map(|j| cols[j][c]).sum();
            lo[c] = lo[c].min(s);
            hi[c] = hi[c].max(s);
        }
    }
    let a: Vec<Vec<Q>> = (0..n).map(|r| (0..n).map(|j| Q::from_integer(cols[j][r] as i128)).collect()).collect();
    let (zero, one) = (Q::from_integer(0), Q::from_integer(1));
    let mut out = Vec::new();
    let mut p = lo.clone();
    loop {
        let b = p.iter().map(|&x| Q::from_integer(x as i128)).collect();
        if let Some(lam) = solve(a.clone(), b) {
            if lam.iter().all(|l| *l >= zero && *l <= one) {
                out.push(p.clone());
            }
        }
        let mut c = 0;
        loop {
            if c == n {
                return out;
            }
            if p[c] < hi[c] {
                p[c] += 1;
                break;
            }
            p[c] = lo[c];
            c += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthBoundReport {
    /// `d_i` for each simplex, facet by facet.
    pub d_per_simplex: Vec<u64>,
    pub d: u64,
    pub m: u64,
    /// `2D + M + 1`.
    pub bound: u64,
    pub max_depth: u64,
    pub checked: usize,
    pub violations: Vec<Point>,
}

impl DepthBoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `2D + M + 1` where `D` bounds the distance from the origin to lattice
/// points of every facet simplex's unit parallelepiped, checked against the
/// exact depth of every element of `ball`.
pub fn depth_bound(
    ws: &WeightedGenSet,
    poly: &ScaledPolytope,
    ball: &BallIndex<Point>,
) -> Result<DepthBoundReport, AbelianError> {
    let mut d_per_simplex = Vec::new();
    for f in &poly.facets {
        for s in &f.simplices {
            let pts = parallelepiped_points(poly, s);
            d_per_simplex.push(weighted_distances(ws, &pts).into_iter().max().unwrap_or(0));
        }
    }
    let d = d_per_simplex.iter().copied().max().unwrap_or(0);
    let bound = 2 * d + poly.m + 1;
    let mut max_depth = 0;
    let mut violations = Vec::new();
    for (g, _) in ball.elements() {
        let rep = depth_in_ball(ws, g, ball, bound)?;
        max_depth = max_depth.max(rep.depth);
        if rep.depth > bound {
            violations.push(g.clone());
        }
    }
    Ok(DepthBoundReport { d_per_simplex, d, m: poly.m, bound, max_depth, checked: ball.len(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{weighted_distance, WeightedGenSet};
    use crate::group::MarkedGroup;
    use crate::search::ball;

    fn example() -> WeightedGenSet {
        WeightedGenSet::new(2, [(vec![1, 0], 2), (vec![0, 1], 3), (vec![1, 1], 4)]).unwrap()
    }

    #[test]
    fn square() {
        let p = build_polytope(&WeightedGenSet::standard(2)).unwrap();
        assert_eq!(p.m, 1);
        assert_eq!(p.facets.len(), 4);
        for f in &p.facets {
            assert_eq!(f.vertices.len(), 2);
        }
    }

    #[test]
    fn weighted_hull() {
        let ws = example();
        let p = build_polytope(&ws).unwrap();
        assert_eq!(p.m, 12);
        let vs: Vec<Vec<i64>> = p.points.iter().map(|q| q.v.clone()).collect();
        for v in [[6, 0], [0, 4], [3, 3], [-6, 0], [0, -4], [-3, -3]] {
            assert!(vs.contains(&v.to_vec()));
        }
        for f in &p.facets {
            for (i, q) in p.points.iter().enumerate() {
                let val = p.eval(f, &q.v);
                assert!(val <= Q::from_integer(1));
                assert_eq!(val == Q::from_integer(1), f.points.contains(&i));
            }
        }
    }

    #[test]
    fn ray_words() {
        let ws = example();
        let p = build_polytope(&ws).unwrap();
        let (a, c) = (p.find_point(&[6, 0]).unwrap(), p.find_point(&[3, 3]).unwrap());
        let w = facet_ray_word(&p, &[a, c], &[1, 1]).unwrap();
        let end = ws.evaluate(&w).unwrap();
        assert_eq!(end, Point(vec![9, 3]));
        assert_eq!(ws.word_weight(&w), 24);
        assert_eq!(weighted_distance(&ws, &end.0).unwrap(), 24);
        assert!(facet_ray_word(&p, &[a, c], &[0, 0]).unwrap().is_empty());
        let b = p.find_point(&[0, -4]).unwrap();
        assert!(matches!(facet_ray_word(&p, &[c, b], &[1, 1]), Err(AbelianError::NotAFacet(_))));
    }

    #[test]
    fn standard_bounds() {
        let ws = WeightedGenSet::standard(2);
        let p = build_polytope(&ws).unwrap();
        let b = ball(&ws, 8).unwrap();
        let rep = depth_bound(&ws, &p, &b).unwrap();
        assert_eq!((rep.d, rep.bound, rep.max_depth), (2, 6, 1));
        let z = WeightedGenSet::standard(1);
        let rep = depth_bound(&z, &build_polytope(&z).unwrap(), &ball(&z, 6).unwrap()).unwrap();
        assert_eq!((rep.d, rep.bound, rep.max_depth), (1, 4, 1));
    }

    #[test]
    fn cube() {
        let ws = WeightedGenSet::standard(3);
        let p = build_polytope(&ws).unwrap();
        assert_eq!(p.facets.len(), 8);
        let corners = [[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]].map(|c| (c.to_vec(), 1));
        let ws2 = WeightedGenSet::new(3, [(vec![1, 0, 0], 1), (vec![0, 1, 0], 1)].into_iter().chain(corners)).unwrap();
        let p2 = build_polytope(&ws2).unwrap();
        assert_eq!(p2.facets.len(), 6);
        assert!(p2.facets.iter().all(|f| f.vertices.len() == 4 && f.simplices.len() == 2));
        let e1 = p2.find_point(&[1, 0, 0]).unwrap();
        assert!(p2.facets.iter().any(|f| f.points.len() == 5 && f.points.contains(&e1) && !f.vertices.contains(&e1)));
    }
}
