//! Finite automata accepting geodesic words, checked against a Cayley ball,
//! and the pumping argument that bounds depth by twice the state count.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GenAlphabet, GroupError, Letter, MarkedGroup, Word};
use crate::search::{depth_in_ball, BallIndex, SearchError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeoError {
    #[error("malformed automaton: {0}")]
    BadDfa(String),
    #[error("word of length {len} is shorter than the {n} states")]
    TooShort { len: usize, n: usize },
    #[error("word `{0}` is not accepted")]
    NotAccepted(String),
    #[error("soundness not verified for `{0}`")]
    SoundnessUnverified(String),
    #[error("pumped element {at} is farther than {cap} from the original")]
    PumpTooFar { at: String, cap: u64 },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Deterministic automaton over signed letters; a missing transition rejects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DfaJson", into = "DfaJson")]
pub struct Dfa {
    states: usize,
    start: usize,
    accept: BTreeSet<usize>,
    trans: BTreeMap<(usize, Letter), usize>,
}

#[derive(Serialize, Deserialize)]
struct TransJson {
    from: usize,
    letter: String,
    to: usize,
}

#[derive(Serialize, Deserialize)]
struct DfaJson {
    states: usize,
    start: usize,
    accept: Vec<usize>,
    trans: Vec<TransJson>,
}

fn letter_names() -> GenAlphabet {
    GenAlphabet::standard(26)
}

impl TryFrom<DfaJson> for Dfa {
    type Error = GeoError;

    fn try_from(j: DfaJson) -> Result<Self, GeoError> {
        let names = letter_names();
        let trans =
            j.trans.iter().map(|t| Ok((t.from, names.parse_letter(&t.letter)?, t.to))).collect::<Result<Vec<_>, GeoError>>()?;
        Dfa::new(j.states, j.start, j.accept, trans)
    }
}

impl From<Dfa> for DfaJson {
    fn from(d: Dfa) -> Self {
        DfaJson {
            states: d.states,
            start: d.start,
            accept: d.accept.into_iter().collect(),
            trans: d.trans.into_iter().map(|((from, l), to)| TransJson { from, letter: l.to_string(), to }).collect(),
        }
    }
}

impl Dfa {
    pub fn new(
        states: usize,
        start: usize,
        accept: impl IntoIterator<Item = usize>,
        trans: impl IntoIterator<Item = (usize, Letter, usize)>,
    ) -> Result<Self, GeoError> {
        let bad = |m: String| Err(GeoError::BadDfa(m));
        if start >= states {
            return bad(format!("start state {start} out of range"));
        }
        let accept: BTreeSet<usize> = accept.into_iter().collect();
        if let Some(s) = accept.iter().find(|&&s| s >= states) {
            return bad(format!("accept state {s} out of range"));
        }
        let mut map = BTreeMap::new();
        for (from, l, to) in trans {
            if from >= states || to >= states {
                return bad(format!("transition {from} -{l}-> {to} out of range"));
            }
            if map.insert((from, l), to).is_some() {
                return bad(format!("two transitions from {from} on {l}"));
            }
        }
        Ok(Dfa { states, start, accept, trans: map })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accept.contains(&s)
    }

    pub fn step(&self, s: usize, l: Letter) -> Option<usize> {
        self.trans.get(&(s, l)).copied()
    }

    pub fn letters(&self) -> BTreeSet<Letter> {
        self.trans.keys().map(|k| k.1).collect()
    }

    pub fn accepts(&self, w: &Word) -> bool {
        dfa_run(self, w).accepted(self)
    }

    /// Length of the shortest path from each state to an accept state.
    fn distance_to_accept(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.states];
        let mut queue = VecDeque::new();
        for &s in &self.accept {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(s) = queue.pop_front() {
            for (&(from, _), &to) in &self.trans {
                if to == s && dist[from].is_none() {
                    dist[from] = Some(dist[s].unwrap() + 1);
                    queue.push_back(from);
                }
            }
        }
        dist
    }

    /// A shortest word from `s` to an accept state.
    fn path_to_accept(&self, s: usize) -> Option<Word> {
        let dist = self.distance_to_accept();
        let mut cur = s;
        let mut w = Word::empty();
        while !self.is_accepting(cur) {
            let d = dist[cur]?;
            let (&(_, l), &to) =
                self.trans.range((cur, Letter::pos(0))..).find(|(&(f, _), &to)| f == cur && dist[to] == Some(d - 1))?;
            w.push(l);
            cur = to;
        }
        Some(w)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DfaRun {
    /// States visited, starting with the start state.
    pub trace: Vec<usize>,
    /// Position of the first letter without a transition.
    pub rejected_at: Option<usize>,
}

impl DfaRun {
    pub fn final_state(&self) -> Option<usize> {
        if self.rejected_at.is_some() {
            None
        } else {
            self.trace.last().copied()
        }
    }

    pub fn accepted(&self, dfa: &Dfa) -> bool {
        self.final_state().is_some_and(|s| dfa.is_accepting(s))
    }
}

pub fn dfa_run(dfa: &Dfa, w: &Word) -> DfaRun {
    let mut trace = vec![dfa.start];
    for (i, &l) in w.letters().iter().enumerate() {
        match dfa.step(*trace.last().unwrap(), l) {
            Some(s) => trace.push(s),
            None => return DfaRun { trace, rejected_at: Some(i) },
        }
    }
    DfaRun { trace, rejected_at: None }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pump {
    pub a: Word,
    pub b: Word,
    pub c: Word,
}

impl Pump {
    /// `a·b·b·c`.
    pub fn pumped(&self) -> Word {
        self.a.concat(&self.b).concat(&self.b).concat(&self.c)
    }
}

/// Factor an accepted `w = abc` with `|bc| ≤ n` and `|b| > 0`, the automaton
/// being in the same state after `a` and `ab`. Takes the repetition nearest
/// the end of the word.
pub fn pump_decompose(dfa: &Dfa, w: &Word) -> Result<Pump, GeoError> {
    let n = dfa.states;
    if w.len() < n {
        return Err(GeoError::TooShort { len: w.len(), n });
    }
    let run = dfa_run(dfa, w);
    if !run.accepted(dfa) {
        return Err(GeoError::NotAccepted(w.to_string()));
    }
    let l = w.len();
    let lo = l - n;
    for j in (lo..=l).rev() {
        if let Some(i) = (lo..j).rev().find(|&i| run.trace[i] == run.trace[j]) {
            return Ok(Pump { a: w.slice(0..i), b: w.slice(i..j), c: w.slice(j..l) });
        }
    }
    unreachable!("n + 1 trace entries over n states repeat")
}

/// A DFA whose accepted words of length up to `radius` are known geodesic.
#[derive(Debug, Clone)]
pub struct VerifiedDfa {
    dfa: Dfa,
    radius: u64,
}

impl VerifiedDfa {
    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageReport {
    pub radius: u64,
    pub states: usize,
    pub sound: bool,
    pub complete: bool,
    /// An accepted word that is not geodesic.
    pub counterexample: Option<String>,
    /// A ball element no accepted geodesic reaches.
    pub missing: Option<String>,
    /// Geodesic `(state, element)` pairs explored.
    pub pairs: usize,
}

pub struct Verification {
    pub report: LanguageReport,
    pub verified: Option<VerifiedDfa>,
}

/// Breadth-first tree over `(state, element)` pairs.
type Parents<E> = FxHashMap<(usize, E), Option<((usize, E), Letter)>>;

/// Soundness and completeness of `dfa` on `ball`, by breadth-first search of
/// the product of the automaton with the Cayley graph.
///
/// Layer `L` holds the pairs `(state, g)` reached by words of length `L`
/// evaluating to `g` with `|g| = L`. A word whose evaluation is shorter than
/// itself cannot be a prefix of a geodesic, so such pairs end the search
/// along that branch; if an accept state is still reachable from them within
/// the radius, the automaton is unsound.
pub fn verify_language<G: MarkedGroup>(dfa: &Dfa, group: &G, ball: &BallIndex<G::Element>) -> Result<Verification, GeoError> {
    for l in dfa.letters() {
        group.alphabet().check(l)?;
    }
    let radius = ball.radius();
    let to_accept = dfa.distance_to_accept();
    let id = group.identity();
    let mut parent: Parents<G::Element> = FxHashMap::default();
    parent.insert((dfa.start, id.clone()), None);
    let mut layer = vec![(dfa.start, id)];
    let mut reached: FxHashSet<G::Element> = FxHashSet::default();
    let mut counterexample: Option<String> = None;
    let word_to = |parent: &Parents<G::Element>, key: &(usize, G::Element)| {
        let mut letters = Vec::new();
        let mut cur = key.clone();
        while let Some(Some((prev, l))) = parent.get(&cur) {
            letters.push(*l);
            cur = prev.clone();
        }
        letters.reverse();
        Word::new(letters)
    };
    let mut len = 0u64;
    while !layer.is_empty() && counterexample.is_none() {
        for (s, g) in &layer {
            if dfa.is_accepting(*s) {
                reached.insert(g.clone());
            }
        }
        if len == radius {
            break;
        }
        let mut next = Vec::new();
        'outer: for key in &layer {
            for l in group.alphabet().letters() {
                let Some(t) = dfa.step(key.0, l) else { continue };
                let h = group.mul_letter(&key.1, l);
                let dh = ball.get(&h);
                if dh == Some(len + 1) {
                    let nk = (t, h);
                    if !parent.contains_key(&nk) {
                        parent.insert(nk.clone(), Some((key.clone(), l)));
                        next.push(nk);
                    }
                } else if to_accept[t].is_some_and(|k| len + 1 + k as u64 <= radius) {
                    let mut w = word_to(&parent, key);
                    w.push(l);
                    w.extend_from(&dfa.path_to_accept(t).expect("accept state reachable"));
                    counterexample = Some(w.to_string());
                    break 'outer;
                }
            }
        }
        layer = next;
        len += 1;
    }
    let sound = counterexample.is_none();
    let missing =
        if sound { ball.elements().iter().find(|(g, _)| !reached.contains(g)).map(|(g, _)| g.to_string()) } else { None };
    let report = LanguageReport {
        radius,
        states: dfa.states,
        sound,
        complete: sound && missing.is_none(),
        counterexample,
        missing,
        pairs: parent.len(),
    };
    let verified = sound.then(|| VerifiedDfa { dfa: dfa.clone(), radius });
    Ok(Verification { report, verified })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Extension<E> {
    pub element: E,
    pub word: Word,
    pub from_distance: u64,
    pub to_distance: u64,
    /// Distance between the original and the pumped element.
    pub gap: u64,
}

fn bounded_distance<G: MarkedGroup>(group: &G, g: &G::Element, h: &G::Element, cap: u64) -> Option<u64> {
    let mut seen: FxHashSet<G::Element> = FxHashSet::default();
    seen.insert(g.clone());
    let mut layer = vec![g.clone()];
    for d in 0..=cap {
        if layer.contains(h) {
            return Some(d);
        }
        let mut next = Vec::new();
        for x in &layer {
            for l in group.alphabet().letters() {
                let y = group.mul_letter(x, l);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        layer = next;
    }
    None
}

/// Pump `w` to `abbc`: a geodesic strictly longer than `w` ending within `2n`
/// of where `w` ends.
pub fn extend_geodesic<G: MarkedGroup>(
    vdfa: &VerifiedDfa,
    group: &G,
    w: &Word,
    ball: &BallIndex<G::Element>,
) -> Result<Extension<G::Element>, GeoError> {
    let pump = pump_decompose(&vdfa.dfa, w)?;
    let word = pump.pumped();
    if word.len() as u64 > vdfa.radius {
        return Err(GeoError::SoundnessUnverified(word.to_string()));
    }
    let g = group.evaluate(w)?;
    let h = group.evaluate(&word)?;
    let from_distance = crate::search::distance(&g, ball)?;
    let to_distance = crate::search::distance(&h, ball)?;
    let cap = 2 * vdfa.dfa.states as u64;
    let gap = bounded_distance(group, &g, &h, cap).ok_or_else(|| GeoError::PumpTooFar { at: h.to_string(), cap })?;
    Ok(Extension { element: h, word, from_distance, to_distance, gap })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegboundReport {
    pub states: usize,
    /// `2n`.
    pub bound: u64,
    pub max_depth: u64,
    pub checked: usize,
    pub violations: Vec<String>,
}

/// Exact depth of every ball element against `2n`.
pub fn regbound_check<G: MarkedGroup>(
    vdfa: &VerifiedDfa,
    group: &G,
    ball: &BallIndex<G::Element>,
) -> Result<RegboundReport, GeoError> {
    let bound = 2 * vdfa.dfa.states as u64;
    let mut max_depth = 0;
    let mut violations = Vec::new();
    for (g, _) in ball.elements() {
        let rep = depth_in_ball(group, g, ball, bound)?;
        max_depth = max_depth.max(rep.depth);
        if rep.depth > bound {
            violations.push(g.to_string());
        }
    }
    Ok(RegboundReport { states: vdfa.dfa.states, bound, max_depth, checked: ball.len(), violations })
}

/// Reduced words in the free group of rank `k`: one state per last letter.
pub fn free_reduced_dfa(k: usize) -> Dfa {
    let letters: Vec<Letter> = GenAlphabet::standard(k).letters().collect();
    let state = |l: Letter| 1 + 2 * l.index() + usize::from(l.inverse);
    let mut trans = Vec::new();
    for &l in &letters {
        trans.push((0, l, state(l)));
        for &m in &letters {
            if m != l.inv() {
                trans.push((state(l), m, state(m)));
            }
        }
    }
    Dfa::new(1 + 2 * k, 0, 0..=2 * k, trans).expect("well formed")
}

/// Words `a^i b^j …` in `ℤⁿ`: blocks in generator order, each of one sign.
pub fn sorted_abelian_dfa(n: usize) -> Dfa {
    let letters: Vec<Letter> = GenAlphabet::standard(n).letters().collect();
    let state = |l: Letter| 1 + 2 * l.index() + usize::from(l.inverse);
    let mut trans = Vec::new();
    for &l in &letters {
        trans.push((0, l, state(l)));
        for &m in &letters {
            if m == l || m.index() > l.index() {
                trans.push((state(l), m, state(m)));
            }
        }
    }
    Dfa::new(1 + 2 * n, 0, 0..=2 * n, trans).expect("well formed")
}

/// The fixtures: `("free2", F₂ reduced words)` and `("z2_sorted", sorted ℤ² words)`.
pub fn builtin_dfas() -> Vec<(&'static str, Dfa)> {
    vec![("free2", free_reduced_dfa(2)), ("z2_sorted", sorted_abelian_dfa(2))]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FreeAbelian, FreeGroup};
    use crate::search::ball;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn runs() {
        let f = free_reduced_dfa(2);
        assert_eq!(f.states(), 5);
        let r = dfa_run(&f, &Word::empty());
        assert_eq!(r.trace.len(), 1);
        assert!(f.accepts(&w("a b a-")));
        let r = dfa_run(&f, &w("a a-"));
        assert_eq!(r.rejected_at, Some(1));
        assert!(!r.accepted(&f));
    }

    #[test]
    fn pumping() {
        let z = sorted_abelian_dfa(2);
        assert_eq!(z.states(), 5);
        let p = pump_decompose(&z, &w("a a a a a")).unwrap();
        assert_eq!(p.b, w("a"));
        assert_eq!(p.pumped(), w("a a a a a a"));
        assert!(matches!(pump_decompose(&z, &w("a b")), Err(GeoError::TooShort { len: 2, n: 5 })));
        let f = free_reduced_dfa(2);
        let word = w("a b a b a b");
        let p = pump_decompose(&f, &word).unwrap();
        assert!(p.b.len() + p.c.len() <= 5 && !p.b.is_empty());
        assert!(f.accepts(&p.pumped()));
    }

    #[test]
    fn fixtures_verify() {
        let z2 = FreeAbelian::new(2);
        let b = ball(&z2, 6).unwrap();
        let v = verify_language(&sorted_abelian_dfa(2), &z2, &b).unwrap();
        assert!(v.report.sound && v.report.complete, "{:?}", v.report);
        let f2 = FreeGroup::new(2);
        let bf = ball(&f2, 6).unwrap();
        let v = verify_language(&free_reduced_dfa(2), &f2, &bf).unwrap();
        assert!(v.report.sound && v.report.complete);
    }

    #[test]
    fn unsound_reported() {
        let z2 = FreeAbelian::new(2);
        let b = ball(&z2, 6).unwrap();
        let d = sorted_abelian_dfa(2);
        let mut trans: Vec<(usize, Letter, usize)> = d.trans.iter().map(|(&(f, l), &t)| (f, l, t)).collect();
        trans.push((1, Letter::neg(0), 0));
        let bad = Dfa::new(5, 0, 0..5, trans).unwrap();
        let v = verify_language(&bad, &z2, &b).unwrap();
        assert!(!v.report.sound);
        assert_eq!(v.report.counterexample.as_deref(), Some("a a-"));
        assert!(v.verified.is_none());

        let incomplete = Dfa::new(2, 0, [0, 1], [(0, Letter::pos(0), 1), (1, Letter::pos(0), 1)]).unwrap();
        let v = verify_language(&incomplete, &z2, &b).unwrap();
        assert!(v.report.sound && !v.report.complete);
        assert_eq!(v.report.missing.as_deref(), Some("(-1,0)"));
    }

    #[test]
    fn hidden_detour() {
        // Accepts only `a a- b`, through a non-accepting state.
        let z2 = FreeAbelian::new(2);
        let b = ball(&z2, 4).unwrap();
        let d = Dfa::new(4, 0, [3], [(0, Letter::pos(0), 1), (1, Letter::neg(0), 2), (2, Letter::pos(1), 3)]).unwrap();
        let v = verify_language(&d, &z2, &b).unwrap();
        assert_eq!(v.report.counterexample.as_deref(), Some("a a- b"));
    }

    #[test]
    fn extension_and_bound() {
        let z2 = FreeAbelian::new(2);
        let b = ball(&z2, 10).unwrap();
        let v = verify_language(&sorted_abelian_dfa(2), &z2, &b).unwrap().verified.unwrap();
        let e = extend_geodesic(&v, &z2, &w("a a a b b"), &b).unwrap();
        assert_eq!(e.to_distance, 6);
        assert!(e.gap <= 10 && e.to_distance > e.from_distance);
        let r = regbound_check(&v, &z2, &b).unwrap();
        assert_eq!((r.bound, r.max_depth), (10, 1));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn json_roundtrip() {
        let d = sorted_abelian_dfa(2);
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains(r#"{"from":0,"letter":"a-","to":2}"#));
        let back: Dfa = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let dup =
            r#"{"states":2,"start":0,"accept":[0],"trans":[{"from":0,"letter":"a","to":1},{"from":0,"letter":"a","to":0}]}"#;
        assert!(serde_json::from_str::<Dfa>(dup).is_err());
    }
}
