//! Crystallographic groups `ℤⁿ ⋊ P` given by affine generators `x ↦ Lx + b`,
//! and their reduction to a weighted generating set of the translations.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use super::{weighted_distances, AbelianError, WeightedGenSet};
use crate::group::{GenAlphabet, Letter, MarkedGroup, Word};
use crate::search::ball;

type Mat = Vec<Vec<i64>>;

/// Point groups larger than this are treated as infinite.
const POINT_GROUP_CAP: usize = 1152;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineGen {
    pub linear: Mat,
    pub translation: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EuclideanSpec {
    pub n: usize,
    pub gens: Vec<AffineGen>,
    /// Words for coset representatives, one per point-group element. Shortest
    /// words are chosen when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coset_reps: Option<Vec<String>>,
}

impl EuclideanSpec {
    /// `ℤⁿ ⋊ {±I}` on the unit translations and the point reflection.
    pub fn z_n_pm(n: usize) -> Self {
        let id = identity(n);
        let mut gens: Vec<AffineGen> = (0..n)
            .map(|i| {
                let mut t = vec![0; n];
                t[i] = 1;
                AffineGen { linear: id.clone(), translation: t }
            })
            .collect();
        gens.push(AffineGen { linear: id.iter().map(|r| r.iter().map(|x| -x).collect()).collect(), translation: vec![0; n] });
        EuclideanSpec { n, gens, coset_reps: None }
    }
}

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn mat_vec(a: &Mat, v: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// An affine map `x ↦ Lx + b`, i.e. translation by `b` after `L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EucElement {
    pub tr: Vec<i64>,
    pub lin: Mat,
}

impl fmt::Display for EucElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.tr.iter().map(|x| x.to_string()).collect();
        let l: Vec<String> = self.lin.iter().flatten().map(|x| x.to_string()).collect();
        write!(f, "({})[{}]", t.join(","), l.join(","))
    }
}

#[derive(Debug, Clone)]
pub struct EuclideanGroup {
    n: usize,
    alphabet: GenAlphabet,
    gens: Vec<EucElement>,
    inv: Vec<EucElement>,
    point_group: Vec<Mat>,
    coset_reps: Vec<Word>,
}

impl EuclideanGroup {
    pub fn new(spec: &EuclideanSpec) -> Result<Self, AbelianError> {
        let n = spec.n;
        let bad = |m: String| AbelianError::NotEuclidean(m);
        if n == 0 || spec.gens.is_empty() {
            return Err(bad("need a positive rank and at least one generator".into()));
        }
        for g in &spec.gens {
            if g.linear.len() != n || g.linear.iter().any(|r| r.len() != n) || g.translation.len() != n {
                return Err(bad(format!("generator {g:?} has the wrong shape")));
            }
        }
        let id = identity(n);
        // Closure of the linear parts; finite exactly when the point group is.
        let mut pg: Vec<Mat> = vec![id.clone()];
        let mut seen: FxHashSet<Mat> = pg.iter().cloned().collect();
        let mut i = 0;
        while i < pg.len() {
            for g in &spec.gens {
                let p = mat_mul(&pg[i], &g.linear);
                if seen.insert(p.clone()) {
                    if pg.len() >= POINT_GROUP_CAP || p.iter().flatten().any(|x| x.abs() > 1 << 20) {
                        return Err(bad("point group is infinite".into()));
                    }
                    pg.push(p);
                }
            }
            i += 1;
        }
        let gens: Vec<EucElement> =
            spec.gens.iter().map(|g| EucElement { tr: g.translation.clone(), lin: g.linear.clone() }).collect();
        let inv = gens
            .iter()
            .map(|g| {
                let li = pg.iter().find(|p| mat_mul(&g.lin, p) == id).expect("finite group contains inverses").clone();
                let tr = mat_vec(&li, &g.tr).into_iter().map(|x| -x).collect();
                EucElement { tr, lin: li }
            })
            .collect();
        let alphabet = GenAlphabet::standard(gens.len());
        let mut grp = EuclideanGroup { n, alphabet, gens, inv, point_group: pg, coset_reps: Vec::new() };
        grp.coset_reps = match &spec.coset_reps {
            Some(words) => {
                let ws: Vec<Word> = words.iter().map(|w| grp.alphabet.parse_word(w)).collect::<Result<_, _>>()?;
                let lins: FxHashSet<Mat> = ws.iter().map(|w| grp.evaluate(w).map(|e| e.lin)).collect::<Result<_, _>>()?;
                if ws.len() != grp.point_group.len() || lins.len() != ws.len() {
                    return Err(bad("coset representatives do not cover the point group once each".into()));
                }
                ws
            }
            None => grp.shortest_coset_words(),
        };
        Ok(grp)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> usize {
        self.point_group.len()
    }

    pub fn coset_reps(&self) -> &[Word] {
        &self.coset_reps
    }

    /// Breadth-first over the point group's Cayley graph.
    fn shortest_coset_words(&self) -> Vec<Word> {
        let mut words: BTreeMap<Mat, Word> = BTreeMap::new();
        let id = identity(self.n);
        words.insert(id.clone(), Word::empty());
        let mut queue = VecDeque::from([id]);
        while let Some(m) = queue.pop_front() {
            let w = words[&m].clone();
            for l in self.alphabet.letters() {
                let g = if l.sign() > 0 { &self.gens[l.index()] } else { &self.inv[l.index()] };
                let next = mat_mul(&m, &g.lin);
                if !words.contains_key(&next) {
                    let mut w2 = w.clone();
                    w2.push(l);
                    words.insert(next.clone(), w2);
                    queue.push_back(next);
                }
            }
        }
        let mut out: Vec<Word> = words.into_values().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

impl MarkedGroup for EuclideanGroup {
    type Element = EucElement;

    fn alphabet(&self) -> &GenAlphabet {
        &self.alphabet
    }

    fn identity(&self) -> EucElement {
        EucElement { tr: vec![0; self.n], lin: identity(self.n) }
    }

    fn mul_letter(&self, g: &EucElement, letter: Letter) -> EucElement {
        let s = if letter.sign() > 0 { &self.gens[letter.index()] } else { &self.inv[letter.index()] };
        let shift = mat_vec(&g.lin, &s.tr);
        EucElement { tr: g.tr.iter().zip(shift).map(|(a, b)| a + b).collect(), lin: mat_mul(&g.lin, &s.lin) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedGen {
    pub v: Vec<i64>,
    pub weight: u64,
    /// A word of `A′` and the coset representative conjugating it.
    pub word: String,
    pub conjugator: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Reduction {
    pub ws: WeightedGenSet,
    pub gens: Vec<ReducedGen>,
    pub index: usize,
    /// `2 Σ l(wᵢ)` over the coset representatives.
    pub d_bound: u64,
}

/// Words returning to the translation coset with no proper subword doing so,
/// conjugated by every coset representative, weighted by word length.
pub fn euclidean_reduce(spec: &EuclideanSpec) -> Result<Reduction, AbelianError> {
    let grp = EuclideanGroup::new(spec)?;
    let id = grp.identity();
    let mut primitive: Vec<(Word, Vec<i64>)> = Vec::new();
    // Prefix cosets of a primitive word are pairwise distinct, so its length
    // is at most the index.
    fn dfs(grp: &EuclideanGroup, cur: &EucElement, word: &mut Word, visited: &mut Vec<Mat>, out: &mut Vec<(Word, Vec<i64>)>) {
        for l in grp.alphabet().letters() {
            let next = grp.mul_letter(cur, l);
            word.push(l);
            if next.lin == visited[0] {
                out.push((word.clone(), next.tr.clone()));
            } else if !visited.contains(&next.lin) {
                visited.push(next.lin.clone());
                dfs(grp, &next, word, visited, out);
                visited.pop();
            }
            *word = word.slice(0..word.len() - 1);
        }
    }
    dfs(&grp, &id, &mut Word::empty(), &mut vec![id.lin.clone()], &mut primitive);
    let mut best: BTreeMap<Vec<i64>, ReducedGen> = BTreeMap::new();
    for rep in grp.coset_reps() {
        let h = grp.evaluate(rep)?;
        let h_inv = grp.point_group.iter().find(|p| mat_mul(&h.lin, p) == id.lin).expect("inverse in point group");
        for (w, v) in &primitive {
            // h⁻¹ (I, v) h = (I, L_h⁻¹ v).
            let cv = mat_vec(h_inv, v);
            if cv.iter().all(|&x| x == 0) {
                continue;
            }
            let cand = ReducedGen {
                v: cv.clone(),
                weight: w.len() as u64,
                word: grp.alphabet().format_word(w),
                conjugator: grp.alphabet().format_word(rep),
            };
            if best.get(&cv).is_none_or(|b| cand.weight < b.weight) {
                best.insert(cv, cand);
            }
        }
    }
    let gens: Vec<ReducedGen> = best.into_values().collect();
    let ws = WeightedGenSet::new(grp.rank(), gens.iter().map(|g| (g.v.clone(), g.weight)))
        .map_err(|_| AbelianError::NotEuclidean("translations in the group are not all of Z^n".into()))?;
    let d_bound = 2 * grp.coset_reps().iter().map(|w| w.len() as u64).sum::<u64>();
    Ok(Reduction { ws, gens, index: grp.index(), d_bound })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub radius: u64,
    pub checked: usize,
    pub d_bound: u64,
    /// `max(|x|_E − ‖x‖_B)` over translations in the ball.
    pub observed_d: u64,
    /// Translations with `‖x‖_B > |x|_E`.
    pub upper_violations: Vec<Vec<i64>>,
    /// Translations with `|x|_E > ‖x‖_B + D`.
    pub lower_violations: Vec<Vec<i64>>,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.upper_violations.is_empty() && self.lower_violations.is_empty() && self.observed_d <= self.d_bound
    }
}

/// Compare `|x|_E` with the reduced weighted metric `‖x‖_B` on every
/// translation in the radius-`r` ball of `E`.
pub fn sandwich_check(spec: &EuclideanSpec, r: u64) -> Result<SandwichReport, AbelianError> {
    let red = euclidean_reduce(spec)?;
    let grp = EuclideanGroup::new(spec)?;
    let b = ball(&grp, r)?;
    let id = identity(grp.rank());
    let trans: Vec<(Vec<i64>, u64)> = b.elements().iter().filter(|(e, _)| e.lin == id).map(|(e, d)| (e.tr.clone(), *d)).collect();
    let targets: Vec<Vec<i64>> = trans.iter().map(|t| t.0.clone()).collect();
    let norms = weighted_distances(&red.ws, &targets);
    let mut rep = SandwichReport {
        radius: r,
        checked: trans.len(),
        d_bound: red.d_bound,
        observed_d: 0,
        upper_violations: Vec::new(),
        lower_violations: Vec::new(),
    };
    for ((x, de), nb) in trans.into_iter().zip(norms) {
        if nb > de {
            rep.upper_violations.push(x.clone());
        }
        if de > nb + red.d_bound {
            rep.lower_violations.push(x.clone());
        }
        rep.observed_d = rep.observed_d.max(de.saturating_sub(nb));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_point_group() {
        let spec = EuclideanSpec { n: 2, gens: EuclideanSpec::z_n_pm(2).gens[..2].to_vec(), coset_reps: None };
        let red = euclidean_reduce(&spec).unwrap();
        assert_eq!(red.index, 1);
        assert_eq!(
            red.ws,
            WeightedGenSet::new(2, [(vec![-1, 0], 1), (vec![0, -1], 1), (vec![0, 1], 1), (vec![1, 0], 1)]).unwrap()
        );
        let rep = sandwich_check(&spec, 6).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.observed_d, 0);
    }

    #[test]
    fn point_reflection() {
        let spec = EuclideanSpec::z_n_pm(2);
        let red = euclidean_reduce(&spec).unwrap();
        assert_eq!(red.index, 2);
        assert_eq!(red.d_bound, 2);
        for v in [[1, 0], [0, 1], [-1, 0], [0, -1]] {
            let g = red.gens.iter().find(|g| g.v == v).unwrap();
            assert_eq!(g.weight, 1);
        }
        let rep = sandwich_check(&spec, 8).unwrap();
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn glide() {
        // ℤ² extended by a glide reflection (x, y) ↦ (x + ½, −y), written on
        // the doubled lattice: the translation part of E is spanned by (2,0), (0,1).
        let spec = EuclideanSpec {
            n: 2,
            gens: vec![
                AffineGen { linear: vec![vec![1, 0], vec![0, -1]], translation: vec![1, 0] },
                AffineGen { linear: identity(2), translation: vec![0, 1] },
            ],
            coset_reps: None,
        };
        assert!(matches!(euclidean_reduce(&spec), Err(AbelianError::NotEuclidean(_))));
    }

    #[test]
    fn infinite_point_group() {
        let spec = EuclideanSpec {
            n: 2,
            gens: vec![AffineGen { linear: vec![vec![1, 1], vec![0, 1]], translation: vec![0, 0] }],
            coset_reps: None,
        };
        assert!(matches!(euclidean_reduce(&spec), Err(AbelianError::NotEuclidean(_))));
    }

    #[test]
    fn explicit_reps() {
        let mut spec = EuclideanSpec::z_n_pm(2);
        spec.coset_reps = Some(vec![String::new(), "c a a-".into()]);
        let red = euclidean_reduce(&spec).unwrap();
        assert_eq!(red.d_bound, 6);
        spec.coset_reps = Some(vec![String::new(), "a".into()]);
        assert!(euclidean_reduce(&spec).is_err());
    }
}
