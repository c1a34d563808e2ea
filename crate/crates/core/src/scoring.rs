//! Scores and accumulators of play prefixes, latest appearance records and
//! score sheets.
//!
//! The score of a set `F` counts how often `F` has been visited completely
//! since the last visit to a vertex outside `F`; the accumulator holds the
//! vertices of `F` collected towards the next increase. A [`ScoreSheet`] keeps
//! the last vertex and one capped `(score, acc)` pair per tracked set, which is
//! exactly the information that decides `=_F` equivalence.

use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::vertex_set::{Vertex, VertexSet};

/// Scores are never tracked beyond this value.
pub const SCORE_CAP: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScoreState {
    pub score: u32,
    pub acc: VertexSet,
}

/// Score and accumulator of the one-letter word `v`.
pub fn score_init(set: &VertexSet, v: Vertex) -> ScoreState {
    if set.len() == 1 && set.contains(v) {
        ScoreState { score: 1, acc: VertexSet::empty(set.universe()) }
    } else {
        ScoreState { score: 0, acc: VertexSet::singleton(set.universe(), v).intersection(set) }
    }
}

/// Extends a prefix by `v`.
pub fn score_step(set: &VertexSet, state: &ScoreState, v: Vertex) -> ScoreState {
    let universe = set.universe();
    if !set.contains(v) {
        return ScoreState { score: 0, acc: VertexSet::empty(universe) };
    }
    if state.acc == set.without(v) {
        ScoreState { score: state.score + 1, acc: VertexSet::empty(universe) }
    } else {
        let mut acc = state.acc.clone();
        acc.insert(v);
        ScoreState { score: state.score, acc }
    }
}

pub fn score_word(set: &VertexSet, word: &[Vertex]) -> Result<ScoreState> {
    let (&first, rest) = word.split_first().ok_or(Error::EmptyWord)?;
    Ok(rest.iter().fold(score_init(set, first), |state, &v| score_step(set, &state, v)))
}

/// Largest score reached by any set of `family` on any prefix of `word`.
pub fn maxscore(family: &[VertexSet], word: &[Vertex]) -> Result<u32> {
    let (&first, rest) = word.split_first().ok_or(Error::EmptyWord)?;
    let mut best = 0;
    for set in family {
        let mut state = score_init(set, first);
        best = best.max(state.score);
        for &v in rest {
            state = score_step(set, &state, v);
            best = best.max(state.score);
        }
    }
    Ok(best)
}

/// Latest appearance record: the vertices seen so far, ordered by their most
/// recent occurrence (last entry = last vertex).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lar(Vec<Vertex>);

impl Lar {
    pub fn new(v: Vertex) -> Self {
        Self(vec![v])
    }

    pub fn from_word(word: &[Vertex]) -> Result<Self> {
        let (&first, rest) = word.split_first().ok_or(Error::EmptyWord)?;
        Ok(rest.iter().fold(Self::new(first), |lar, &v| lar.update(v)))
    }

    pub fn update(&self, v: Vertex) -> Self {
        let mut record: Vec<Vertex> = self.0.iter().copied().filter(|&u| u != v).collect();
        record.push(v);
        Self(record)
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The sets `{v_1}`, `{v_1, v_2}`, ... built from the most recent end.
    pub fn suffix_sets(&self, universe: usize) -> Vec<VertexSet> {
        let mut acc = VertexSet::empty(universe);
        self.0
            .iter()
            .rev()
            .map(|&v| {
                acc.insert(v);
                acc.clone()
            })
            .collect()
    }
}

/// Canonically ordered family of tracked sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family(Vec<VertexSet>);

impl Family {
    pub fn new(mut sets: Vec<VertexSet>) -> Self {
        sets.sort();
        sets.dedup();
        Self(sets)
    }

    pub fn sets(&self) -> &[VertexSet] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Representative of an `=_F` class: the last vertex and the capped scores and
/// accumulators of every tracked set. The LAR is carried along but does not
/// take part in equality or hashing.
#[derive(Clone, Debug)]
pub struct ScoreSheet {
    pub last: Vertex,
    pub entries: Vec<ScoreState>,
    pub lar: Lar,
}

impl PartialEq for ScoreSheet {
    fn eq(&self, other: &Self) -> bool {
        self.last == other.last && self.entries == other.entries
    }
}

impl Eq for ScoreSheet {}

impl Hash for ScoreSheet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.last.hash(state);
        self.entries.hash(state);
    }
}

impl ScoreSheet {
    pub fn max_score(&self) -> u32 {
        self.entries.iter().map(|e| e.score).max().unwrap_or(0)
    }

    /// Extends the represented prefix by `v`, capping scores at `cap`.
    pub fn advance(&self, family: &Family, v: Vertex, cap: u32) -> Self {
        let entries = family
            .sets()
            .iter()
            .zip(&self.entries)
            .map(|(set, state)| {
                let mut next = score_step(set, state, v);
                next.score = next.score.min(cap);
                next
            })
            .collect();
        Self { last: v, entries, lar: self.lar.update(v) }
    }
}

pub fn sheet_init(family: &Family, v: Vertex) -> ScoreSheet {
    ScoreSheet { last: v, entries: family.sets().iter().map(|set| score_init(set, v)).collect(), lar: Lar::new(v) }
}

/// Successor sheet with scores capped at [`SCORE_CAP`]. Sheets that already
/// reached the cap are terminal.
pub fn sheet_update(family: &Family, sheet: &ScoreSheet, v: Vertex) -> Result<ScoreSheet> {
    if sheet.max_score() >= SCORE_CAP {
        return Err(Error::TerminalSheet);
    }
    Ok(sheet.advance(family, v, SCORE_CAP))
}

pub fn sheet_of(family: &Family, word: &[Vertex]) -> Result<ScoreSheet> {
    let (&first, rest) = word.split_first().ok_or(Error::EmptyWord)?;
    rest.iter().try_fold(sheet_init(family, first), |sheet, &v| sheet_update(family, &sheet, v))
}

/// The score preorder: same last vertex, and per set a strictly smaller score
/// or an equal score with a smaller-or-equal accumulator.
pub fn sheet_le(s: &ScoreSheet, t: &ScoreSheet) -> bool {
    s.last == t.last
        && s.entries
            .iter()
            .zip(&t.entries)
            .all(|(a, b)| a.score < b.score || (a.score == b.score && a.acc.is_subset(&b.acc)))
}
