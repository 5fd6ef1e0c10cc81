//! Weighted word metrics on `ℤⁿ`, the polytope of scaled generators and the
//! reduction of crystallographic groups to weighted lattices.

pub mod euclid;
pub mod hull;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GenAlphabet, GroupError, Letter, MarkedGroup, Point};
use crate::search::SearchError;

pub use euclid::{euclidean_reduce, sandwich_check, EucElement, EuclideanGroup, EuclideanSpec, Reduction, SandwichReport};
pub use hull::{build_polytope, depth_bound, facet_ray_word, DepthBoundReport, Facet, ScaledPolytope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("generators do not generate Z^{0}")]
    NotGenerating(usize),
    #[error("convex hull has dimension below {0}")]
    DegenerateHull(usize),
    #[error("vertices {0:?} do not lie on a common facet")]
    NotAFacet(Vec<usize>),
    #[error("rank {0} is not supported (at most 3)")]
    UnsupportedRank(usize),
    #[error("not a euclidean group: {0}")]
    NotEuclidean(String),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedGen {
    pub v: Vec<i64>,
    pub w: u64,
}

/// A generating set of `ℤⁿ` with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGenSet")]
pub struct WeightedGenSet {
    n: usize,
    gens: Vec<WeightedGen>,
    #[serde(skip)]
    alphabet: GenAlphabet,
}

#[derive(Deserialize)]
struct RawGenSet {
    n: usize,
    gens: Vec<WeightedGen>,
}

impl TryFrom<RawGenSet> for WeightedGenSet {
    type Error = AbelianError;

    fn try_from(raw: RawGenSet) -> Result<Self, AbelianError> {
        WeightedGenSet::new(raw.n, raw.gens.into_iter().map(|g| (g.v, g.w)))
    }
}

impl WeightedGenSet {
    pub fn new(n: usize, gens: impl IntoIterator<Item = (Vec<i64>, u64)>) -> Result<Self, AbelianError> {
        let gens: Vec<WeightedGen> = gens.into_iter().map(|(v, w)| WeightedGen { v, w }).collect();
        if n == 0 {
            return Err(AbelianError::BadInput("rank must be positive".into()));
        }
        for g in &gens {
            if g.v.len() != n {
                return Err(AbelianError::BadInput(format!("generator {:?} is not in Z^{n}", g.v)));
            }
            if g.w == 0 {
                return Err(AbelianError::BadInput(format!("generator {:?} has weight 0", g.v)));
            }
        }
        let vs: Vec<Vec<i64>> = gens.iter().map(|g| g.v.clone()).collect();
        if lattice_index(&vs, n) != Some(1) {
            return Err(AbelianError::NotGenerating(n));
        }
        let alphabet = GenAlphabet::standard(gens.len());
        Ok(WeightedGenSet { n, gens, alphabet })
    }

    /// The standard basis, every weight 1.
    pub fn standard(n: usize) -> Self {
        let gens = (0..n).map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            (v, 1)
        });
        Self::new(n, gens).expect("standard basis generates")
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[WeightedGen] {
        &self.gens
    }

    /// Least common multiple of the weights.
    pub fn lcm_weight(&self) -> u64 {
        self.gens.iter().fold(1, |acc, g| lcm(acc, g.w))
    }
}

impl MarkedGroup for WeightedGenSet {
    type Element = Point;

    fn alphabet(&self) -> &GenAlphabet {
        &self.alphabet
    }

    fn identity(&self) -> Point {
        Point(vec![0; self.n])
    }

    fn mul_letter(&self, g: &Point, letter: Letter) -> Point {
        let gen = &self.gens[letter.index()].v;
        Point(g.0.iter().zip(gen).map(|(x, y)| x + letter.sign() * y).collect())
    }

    fn weight(&self, letter: Letter) -> u64 {
        self.gens[letter.index()].w
    }

    fn is_weighted(&self) -> bool {
        true
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Index of the sublattice spanned by `vs` in `ℤⁿ`, or `None` if it has lower rank.
pub fn lattice_index(vs: &[Vec<i64>], n: usize) -> Option<u64> {
    let mut rows: Vec<Vec<i128>> = vs.iter().map(|v| v.iter().map(|&x| x as i128).collect()).collect();
    let mut index: u128 = 1;
    for col in 0..n {
        let top = col;
        // Euclid on column `col` over rows top.., leaving one nonzero pivot.
        loop {
            let mut pivot: Option<usize> = None;
            for r in top..rows.len() {
                if rows[r][col] != 0 && pivot.is_none_or(|p| rows[r][col].abs() < rows[p][col].abs()) {
                    pivot = Some(r);
                }
            }
            let p = pivot?;
            rows.swap(top, p);
            let mut done = true;
            for r in top + 1..rows.len() {
                let q = rows[r][col] / rows[top][col];
                if q != 0 {
                    let pivot_row = rows[top].clone();
                    for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                        *x -= q * y;
                    }
                }
                if rows[r][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        index *= rows[top][col].unsigned_abs();
    }
    u64::try_from(index).ok()
}

/// Weighted distances from the origin to each target, by Dijkstra.
///
/// Generation is checked on construction, so every target is reached; the
/// search stops once all of them are settled.
pub fn weighted_distances(ws: &WeightedGenSet, targets: &[Vec<i64>]) -> Vec<u64> {
    let mut pending: FxHashSet<Vec<i64>> = targets.iter().cloned().collect();
    let mut dist: FxHashMap<Vec<i64>, u64> = FxHashMap::default();
    let mut settled: FxHashMap<Vec<i64>, u64> = FxHashMap::default();
    let mut heap = BinaryHeap::new();
    let origin = vec![0i64; ws.n];
    dist.insert(origin.clone(), 0);
    heap.push(Reverse((0u64, origin)));
    while !pending.is_empty() {
        let Reverse((d, p)) = heap.pop().expect("generating set reaches every point");
        if settled.contains_key(&p) {
            continue;
        }
        pending.remove(&p);
        settled.insert(p.clone(), d);
        for g in &ws.gens {
            for s in [1i64, -1] {
                let q: Vec<i64> = p.iter().zip(&g.v).map(|(x, y)| x + s * y).collect();
                let nd = d + g.w;
                if !settled.contains_key(&q) && dist.get(&q).is_none_or(|&old| nd < old) {
                    dist.insert(q.clone(), nd);
                    heap.push(Reverse((nd, q)));
                }
            }
        }
    }
    targets.iter().map(|t| settled[t]).collect()
}

/// Minimal total weight of a word evaluating to `v`.
pub fn weighted_distance(ws: &WeightedGenSet, v: &[i64]) -> Result<u64, AbelianError> {
    if v.len() != ws.n {
        return Err(AbelianError::BadInput(format!("{v:?} is not in Z^{}", ws.n)));
    }
    Ok(weighted_distances(ws, &[v.to_vec()])[0])
}
