//! The lamplighter-style group `ℤ² ≀ ℤ` on `a, b, c`, used as an oracle for
//! [`ll_length`](super::ll_length).

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::laurent::SupportVector;
use super::SolError;
use crate::group::{GenAlphabet, Letter, MarkedGroup};

/// A finitely supported `ℤ²`-valued lamp function and a cursor.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WreathElement {
    pub lamps: BTreeMap<i64, [i64; 2]>,
    pub cursor: i64,
}

impl WreathElement {
    pub fn from_support(v: &SupportVector, z: i64) -> Self {
        let lamps = v.lamps().into_iter().map(|(s, a, b)| (s as i64, [a, b])).collect();
        WreathElement { lamps, cursor: z }
    }

    fn bump(&mut self, at: i64, gen: usize, by: i64) {
        let e = self.lamps.entry(at).or_insert([0, 0]);
        e[gen] += by;
        if *e == [0, 0] {
            self.lamps.remove(&at);
        }
    }
}

impl fmt::Display for WreathElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (s, [a, b])) in self.lamps.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}:({a},{b})")?;
        }
        write!(f, "}}@{}", self.cursor)
    }
}

/// `a`, `b` increment the lamp under the cursor; `c` moves the cursor right.
#[derive(Debug, Clone)]
pub struct WreathZ2Z {
    alphabet: GenAlphabet,
}

impl WreathZ2Z {
    pub fn new() -> Self {
        WreathZ2Z { alphabet: GenAlphabet::standard(3) }
    }
}

impl Default for WreathZ2Z {
    fn default() -> Self {
        Self::new()
    }
}

impl MarkedGroup for WreathZ2Z {
    type Element = WreathElement;

    fn alphabet(&self) -> &GenAlphabet {
        &self.alphabet
    }

    fn identity(&self) -> WreathElement {
        WreathElement::default()
    }

    fn mul_letter(&self, g: &WreathElement, letter: Letter) -> WreathElement {
        let mut h = g.clone();
        match letter.gen {
            2 => h.cursor += letter.sign(),
            e => h.bump(g.cursor, e as usize, letter.sign()),
        }
        h
    }
}

/// Word length of `(v, z)` in `ℤ² ≀ ℤ`, by breadth-first search.
///
/// The search only touches lamps in the support of the target, only moves
/// each lamp component monotonically towards its target value, and keeps
/// the cursor inside the hull of `0`, `z` and the support. A geodesic never
/// leaves this region: cancelling an increment against a later decrement at
/// the same lamp, or cutting an excursion past the hull, shortens the word.
pub fn wreath_oracle(v: &SupportVector, z: i64, r_cap: u64) -> Result<u64, SolError> {
    let target = v.lamps();
    let lo = target.iter().map(|l| l.0 as i64).chain([0, z]).min().unwrap();
    let hi = target.iter().map(|l| l.0 as i64).chain([0, z]).max().unwrap();
    // State: cursor plus progress |value| for each of the 2·|support| components.
    let goals: Vec<i64> = target.iter().flat_map(|l| [l.1, l.2]).collect();
    let slot: FxHashMap<i64, usize> = target.iter().enumerate().map(|(i, l)| (l.0 as i64, i)).collect();
    let start = (0i64, vec![0i64; goals.len()]);
    let done = (z, goals.iter().map(|g| g.abs()).collect::<Vec<_>>());
    let mut seen: FxHashMap<(i64, Vec<i64>), u64> = FxHashMap::default();
    let mut queue = VecDeque::new();
    seen.insert(start.clone(), 0);
    queue.push_back(start);
    while let Some(state) = queue.pop_front() {
        let d = seen[&state];
        if state == done {
            return Ok(d);
        }
        if d >= r_cap {
            continue;
        }
        let (cur, prog) = &state;
        let mut next = Vec::with_capacity(4);
        if *cur > lo {
            next.push((cur - 1, prog.clone()));
        }
        if *cur < hi {
            next.push((cur + 1, prog.clone()));
        }
        if let Some(&i) = slot.get(cur) {
            for c in 0..2 {
                let k = 2 * i + c;
                if prog[k] < goals[k].abs() {
                    let mut p = prog.clone();
                    p[k] += 1;
                    next.push((*cur, p));
                }
            }
        }
        for s in next {
            if !seen.contains_key(&s) {
                seen.insert(s.clone(), d + 1);
                queue.push_back(s);
            }
        }
    }
    Err(SolError::CapExceeded { cap: r_cap.min(u32::MAX as u64) as u32 })
}
