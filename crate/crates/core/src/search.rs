//! Exhaustive Cayley-ball oracle: ball enumeration, exact distances,
//! dead-end depth, and the two metric-perturbation constructions.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;
use thiserror::Error;

use crate::group::{Letter, MarkedGroup};

/// Default cap on the number of elements a ball may hold.
pub const DEFAULT_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("ball exceeds the element budget of {budget}")]
    ResourceCap { budget: usize },
    #[error("element {0} is not in the ball")]
    NotInBall(String),
    #[error("ball radius {radius} is below the required {required}")]
    InsufficientRadius { radius: u64, required: u64 },
    #[error("slack hypothesis fails at {at}: value {value} exceeds {limit}")]
    HypothesisViolated { at: String, value: i64, limit: i64 },
    #[error("the function is undefined at {0}, needed to finish the construction")]
    OutsideDomain(String),
    #[error("pointwise bound fails at {at}: |{d1} - {d2}| >= {c}")]
    BoundViolated { at: String, d1: i64, d2: i64, c: i64 },
}

/// Element budget: `DEADEND_BUDGET` from the environment, else [`DEFAULT_BUDGET`].
pub fn default_budget() -> usize {
    std::env::var("DEADEND_BUDGET").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

/// Exact distance table for a closed Cayley ball.
#[derive(Debug, Clone)]
pub struct BallIndex<E> {
    radius: u64,
    table: FxHashMap<E, u64>,
    elements: Vec<(E, u64)>,
    spheres: Vec<u64>,
}

impl<E: Clone + Eq + std::hash::Hash + Ord> BallIndex<E> {
    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, g: &E) -> Option<u64> {
        self.table.get(g).copied()
    }

    pub fn contains(&self, g: &E) -> bool {
        self.table.contains_key(g)
    }

    /// Elements with their distances, sorted by distance then key.
    pub fn elements(&self) -> &[(E, u64)] {
        &self.elements
    }

    /// `spheres()[d]` is the number of elements at distance exactly `d`.
    pub fn spheres(&self) -> &[u64] {
        &self.spheres
    }

    /// Elements at distance exactly `d`.
    pub fn sphere(&self, d: u64) -> impl Iterator<Item = &E> + '_ {
        let start = self.elements.partition_point(|(_, x)| *x < d);
        self.elements[start..].iter().take_while(move |(_, x)| *x == d).map(|(e, _)| e)
    }

    fn from_table(radius: u64, table: FxHashMap<E, u64>) -> Self {
        let mut elements: Vec<(E, u64)> = table.iter().map(|(e, d)| (e.clone(), *d)).collect();
        elements.sort_unstable_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let mut spheres = vec![0u64; radius as usize + 1];
        for (_, d) in &elements {
            spheres[*d as usize] += 1;
        }
        BallIndex { radius, table, elements, spheres }
    }

    pub fn spheres_csv(&self) -> String {
        let mut out = String::from("distance,count\n");
        for (d, c) in self.spheres.iter().enumerate() {
            let _ = writeln!(out, "{d},{c}");
        }
        out
    }
}

#[derive(Serialize)]
struct TableRow<'a, E> {
    element: &'a E,
    distance: u64,
}

impl<E: Serialize + Clone + Eq + std::hash::Hash + Ord> Serialize for BallIndex<E> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<TableRow<'_, E>> = self.elements.iter().map(|(e, d)| TableRow { element: e, distance: *d }).collect();
        let mut st = s.serialize_struct("BallIndex", 3)?;
        st.serialize_field("radius", &self.radius)?;
        st.serialize_field("table", &rows)?;
        st.serialize_field("sphere_counts", &self.spheres)?;
        st.end()
    }
}

/// Closed ball of radius `r` with the budget from [`default_budget`].
pub fn ball<G: MarkedGroup>(group: &G, r: u64) -> Result<BallIndex<G::Element>, SearchError> {
    ball_with_budget(group, r, default_budget())
}

pub fn ball_with_budget<G: MarkedGroup>(group: &G, r: u64, budget: usize) -> Result<BallIndex<G::Element>, SearchError> {
    let letters: Vec<Letter> = group.alphabet().letters().collect();
    let mut table: FxHashMap<G::Element, u64> = FxHashMap::default();
    table.insert(group.identity(), 0);
    if group.is_weighted() {
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0u64, group.identity())));
        while let Some(Reverse((d, g))) = heap.pop() {
            if table.get(&g).is_some_and(|&best| best < d) {
                continue;
            }
            for &l in &letters {
                let nd = d + group.weight(l);
                if nd > r {
                    continue;
                }
                let h = group.mul_letter(&g, l);
                match table.get(&h) {
                    Some(&old) if old <= nd => {}
                    _ => {
                        table.insert(h.clone(), nd);
                        if table.len() > budget {
                            return Err(SearchError::ResourceCap { budget });
                        }
                        heap.push(Reverse((nd, h)));
                    }
                }
            }
        }
    } else {
        let mut frontier = vec![group.identity()];
        for d in 1..=r {
            let mut next = Vec::new();
            for g in &frontier {
                for &l in &letters {
                    let h = group.mul_letter(g, l);
                    if !table.contains_key(&h) {
                        table.insert(h.clone(), d);
                        next.push(h);
                    }
                }
            }
            if table.len() > budget {
                return Err(SearchError::ResourceCap { budget });
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
    }
    Ok(BallIndex::from_table(r, table))
}

pub fn distance<E: Clone + Eq + std::hash::Hash + Ord + std::fmt::Display>(
    g: &E,
    ball: &BallIndex<E>,
) -> Result<u64, SearchError> {
    ball.get(g).ok_or_else(|| SearchError::NotInBall(g.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthReport<E> {
    pub element: E,
    pub distance_from_identity: u64,
    /// Exact depth, or `cap + 1` as a lower bound when `exceeds_cap` is set.
    pub depth: u64,
    pub witness: Option<E>,
    pub exceeds_cap: bool,
}

/// Depth of `g`, requiring `radius ≥ |g| + cap`.
pub fn depth<G: MarkedGroup>(
    group: &G,
    g: &G::Element,
    ball: &BallIndex<G::Element>,
    cap: u64,
) -> Result<DepthReport<G::Element>, SearchError> {
    let d = distance(g, ball)?;
    if ball.radius() < d + cap {
        return Err(SearchError::InsufficientRadius { radius: ball.radius(), required: d + cap });
    }
    Ok(depth_search(group, g, d, ball, cap))
}

/// Depth of `g` when only `|g| ≤ radius` is known.
///
/// An element missing from the ball is farther than the radius, hence farther
/// than `g`, so the search is exact for any cap once `g` itself is indexed.
pub fn depth_in_ball<G: MarkedGroup>(
    group: &G,
    g: &G::Element,
    ball: &BallIndex<G::Element>,
    cap: u64,
) -> Result<DepthReport<G::Element>, SearchError> {
    let d = distance(g, ball)?;
    Ok(depth_search(group, g, d, ball, cap))
}

fn depth_search<G: MarkedGroup>(
    group: &G,
    g: &G::Element,
    dg: u64,
    ball: &BallIndex<G::Element>,
    cap: u64,
) -> DepthReport<G::Element> {
    let farther = |h: &G::Element| ball.get(h).is_none_or(|dh| dh > dg);
    let (depth, witness) =
        if group.is_weighted() { search_weighted(group, g, cap, farther) } else { search_bfs(group, g, cap, farther) };
    match witness {
        Some(w) => DepthReport { element: g.clone(), distance_from_identity: dg, depth, witness: Some(w), exceeds_cap: false },
        None => DepthReport { element: g.clone(), distance_from_identity: dg, depth: cap + 1, witness: None, exceeds_cap: true },
    }
}

/// Layered BFS from `g` for the nearest element satisfying `target`.
/// Ties at the final layer go to the least canonical key.
fn search_bfs<G: MarkedGroup>(
    group: &G,
    g: &G::Element,
    cap: u64,
    target: impl Fn(&G::Element) -> bool,
) -> (u64, Option<G::Element>) {
    let letters: Vec<Letter> = group.alphabet().letters().collect();
    let mut seen: FxHashSet<G::Element> = FxHashSet::default();
    seen.insert(g.clone());
    let mut frontier = vec![g.clone()];
    for t in 1..=cap {
        let mut next = Vec::new();
        let mut best: Option<G::Element> = None;
        for x in &frontier {
            for &l in &letters {
                let h = group.mul_letter(x, l);
                if seen.contains(&h) {
                    continue;
                }
                if target(&h) && best.as_ref().is_none_or(|b| h < *b) {
                    best = Some(h.clone());
                }
                seen.insert(h.clone());
                next.push(h);
            }
        }
        if best.is_some() {
            return (t, best);
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    (cap + 1, None)
}

fn search_weighted<G: MarkedGroup>(
    group: &G,
    g: &G::Element,
    cap: u64,
    target: impl Fn(&G::Element) -> bool,
) -> (u64, Option<G::Element>) {
    let letters: Vec<Letter> = group.alphabet().letters().collect();
    let mut dist: FxHashMap<G::Element, u64> = FxHashMap::default();
    dist.insert(g.clone(), 0);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, g.clone())));
    let mut best: Option<(u64, G::Element)> = None;
    while let Some(Reverse((d, x))) = heap.pop() {
        if dist.get(&x).is_some_and(|&b| b < d) {
            continue;
        }
        if best.as_ref().is_some_and(|(bd, _)| d >= *bd) {
            break;
        }
        for &l in &letters {
            let nd = d + group.weight(l);
            if nd > cap {
                continue;
            }
            let h = group.mul_letter(&x, l);
            if target(&h) {
                let better = match &best {
                    None => true,
                    Some((bd, bh)) => nd < *bd || (nd == *bd && h < *bh),
                };
                if better {
                    best = Some((nd, h));
                }
                continue;
            }
            if dist.get(&h).is_none_or(|&old| nd < old) {
                dist.insert(h.clone(), nd);
                heap.push(Reverse((nd, h)));
            }
        }
    }
    match best {
        Some((d, h)) => (d, Some(h)),
        None => (cap + 1, None),
    }
}

/// Every element of the ball whose depth is at least `min_depth`, ordered by
/// distance then key. Depths are exact (see [`depth_in_ball`]).
pub fn deadend_scan<G: MarkedGroup>(group: &G, ball: &BallIndex<G::Element>, min_depth: u64) -> Vec<DepthReport<G::Element>> {
    let mut out = Vec::new();
    for (g, d) in ball.elements() {
        let rep = depth_search(group, g, *d, ball, ball.radius() + 1);
        if rep.depth >= min_depth {
            out.push(rep);
        }
    }
    out
}

/// Largest depth over the ball, with the first element attaining it.
pub fn max_depth<G: MarkedGroup>(group: &G, ball: &BallIndex<G::Element>) -> Option<DepthReport<G::Element>> {
    let mut best: Option<DepthReport<G::Element>> = None;
    for (g, d) in ball.elements() {
        let rep = depth_search(group, g, *d, ball, ball.radius() + 1);
        if best.as_ref().is_none_or(|b| rep.depth > b.depth) {
            best = Some(rep);
        }
    }
    best
}

/// Depth of `g` with respect to an arbitrary function: graph distance from `g`
/// to the nearest `h` with `f(h) > f(g)`. `f` returns `None` off its domain.
pub fn function_depth<G: MarkedGroup>(
    group: &G,
    f: &dyn Fn(&G::Element) -> Option<i64>,
    g: &G::Element,
    cap: u64,
) -> Result<(u64, Option<G::Element>), SearchError> {
    let fg = f(g).ok_or_else(|| SearchError::OutsideDomain(g.to_string()))?;
    let letters: Vec<Letter> = group.alphabet().letters().collect();
    let mut seen: FxHashSet<G::Element> = FxHashSet::default();
    seen.insert(g.clone());
    let mut frontier = vec![g.clone()];
    for t in 1..=cap {
        let mut next = Vec::new();
        let mut best: Option<G::Element> = None;
        for x in &frontier {
            for &l in &letters {
                let h = group.mul_letter(x, l);
                if !seen.insert(h.clone()) {
                    continue;
                }
                let fh = f(&h).ok_or_else(|| SearchError::OutsideDomain(h.to_string()))?;
                if fh > fg && best.as_ref().is_none_or(|b| h < *b) {
                    best = Some(h.clone());
                }
                next.push(h);
            }
        }
        if best.is_some() {
            return Ok((t, best));
        }
        frontier = next;
    }
    Ok((cap + 1, None))
}

/// Graph ball around `a`, as layers by distance.
fn layers<G: MarkedGroup>(group: &G, a: &G::Element, r: u64) -> Vec<Vec<G::Element>> {
    let letters: Vec<Letter> = group.alphabet().letters().collect();
    let mut seen: FxHashSet<G::Element> = FxHashSet::default();
    seen.insert(a.clone());
    let mut out = vec![vec![a.clone()]];
    for _ in 0..r {
        let mut next = Vec::new();
        for x in out.last().unwrap() {
            for &l in &letters {
                let h = group.mul_letter(x, l);
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        next.sort();
        out.push(next);
    }
    out
}

/// Given `f ≤ f(a) + n` on `B_r(a)`, find `a′` with `f ≤ f(a′)` on `B_s(a′)`,
/// `s = ⌊r/n⌋` (or `s = r` when `n = 0`).
///
/// With `g(x) = max f` over `B_x(a)`, the point `a′` is a maximiser of `f`
/// on `B_x(a)` for the least `x` with `g(x + s) = g(x)`. That `x` can exceed
/// `r` when `g` rises by exactly one on each of the `n` blocks, in which case
/// `f` must be defined beyond `B_r(a)`.
pub fn local_max_from_slack<G: MarkedGroup>(
    group: &G,
    f: &dyn Fn(&G::Element) -> Option<i64>,
    a: &G::Element,
    r: u64,
    n: u64,
) -> Result<(G::Element, u64), SearchError> {
    let fa = f(a).ok_or_else(|| SearchError::OutsideDomain(a.to_string()))?;
    let limit = fa + n as i64;
    let within = layers(group, a, r);
    for layer in &within {
        for x in layer {
            let v = f(x).ok_or_else(|| SearchError::OutsideDomain(x.to_string()))?;
            if v > limit {
                return Err(SearchError::HypothesisViolated { at: x.to_string(), value: v, limit });
            }
        }
    }
    if n == 0 {
        return Ok((a.clone(), r));
    }
    let s = r / n;
    let mut lay = within;
    let mut prefix_max: Vec<(i64, G::Element)> = Vec::new();
    let mut x = 0usize;
    loop {
        while prefix_max.len() <= x + s as usize {
            let idx = prefix_max.len();
            if idx >= lay.len() {
                let extra = layers(group, a, idx as u64);
                lay = extra;
            }
            let mut best = prefix_max.last().cloned();
            for y in &lay[idx] {
                let v = f(y).ok_or_else(|| SearchError::OutsideDomain(y.to_string()))?;
                if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                    best = Some((v, y.clone()));
                }
            }
            prefix_max.push(best.expect("ball around a is nonempty"));
        }
        if prefix_max[x + s as usize].0 == prefix_max[x].0 {
            return Ok((prefix_max[x].1.clone(), s));
        }
        x += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferPair<E> {
    pub source: E,
    pub source_depth: u64,
    pub slack: u64,
    pub target: E,
    pub guaranteed_radius: u64,
    pub target_depth: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferReport<E> {
    pub c: i64,
    pub min_depth: u64,
    pub pairs: Vec<TransferPair<E>>,
}

/// For every `d1`-dead end of depth at least `r + c`, run
/// [`local_max_from_slack`] on `d2` and record the resulting `d2`-pocket.
///
/// Depths are taken in the Cayley graph of `group`; the domain of both
/// functions is the ball. The slack passed on is measured exactly on the
/// dead end's pocket, `max d2 − d2(e)` over `B_{m−1}(e)`.
pub fn depth_transfer_check<G: MarkedGroup>(
    group: &G,
    ball: &BallIndex<G::Element>,
    d1: &dyn Fn(&G::Element) -> Option<i64>,
    d2: &dyn Fn(&G::Element) -> Option<i64>,
    c: i64,
    r: u64,
) -> Result<TransferReport<G::Element>, SearchError> {
    for (g, _) in ball.elements() {
        if let (Some(x), Some(y)) = (d1(g), d2(g)) {
            if (x - y).abs() >= c {
                return Err(SearchError::BoundViolated { at: g.to_string(), d1: x, d2: y, c });
            }
        }
    }
    let need = r + c.max(0) as u64;
    let mut pairs = Vec::new();
    for (g, _) in ball.elements() {
        let (m, _) = match function_depth(group, d1, g, need) {
            Ok(v) => v,
            Err(SearchError::OutsideDomain(_)) => continue,
            Err(e) => return Err(e),
        };
        if m < need {
            continue;
        }
        let pocket = layers(group, g, m - 1);
        let base = match d2(g) {
            Some(v) => v,
            None => continue,
        };
        let mut slack = 0i64;
        let mut defined = true;
        for y in pocket.iter().flatten() {
            match d2(y) {
                Some(v) => slack = slack.max(v - base),
                None => defined = false,
            }
        }
        if !defined {
            continue;
        }
        let (target, s) = match local_max_from_slack(group, d2, g, m - 1, slack as u64) {
            Ok(v) => v,
            Err(SearchError::OutsideDomain(_)) => continue,
            Err(e) => return Err(e),
        };
        let target_depth = match function_depth(group, d2, &target, s + 1) {
            Ok((d, _)) => d,
            Err(SearchError::OutsideDomain(_)) => continue,
            Err(e) => return Err(e),
        };
        pairs.push(TransferPair {
            source: g.clone(),
            source_depth: m,
            slack: slack as u64,
            target,
            guaranteed_radius: s,
            target_depth,
        });
    }
    Ok(TransferReport { c, min_depth: r, pairs })
}
