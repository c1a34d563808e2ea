//! The safety game of a Muller game.
//!
//! Vertices are `=_F` classes of play prefixes, where `F` is the family of the
//! tracked player. Classes are discovered breadth-first from the one-letter
//! prefixes; every prefix on which some tracked score reaches the threshold is
//! merged into a single unsafe sink. Player 0 of the underlying game (after
//! swapping roles when Player 0's scores are tracked) wins the safety game by
//! keeping all tracked scores below the threshold.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::arena::{Arena, MullerCondition, Player};
use crate::error::{Error, Result};
use crate::scoring::{sheet_init, Family, ScoreSheet};
use crate::vertex_set::{Vertex, VertexSet};

/// A game won by Player 0 iff the play stays inside `safe` forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetyGame {
    pub arena: Arena,
    pub safe: VertexSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionOptions {
    /// Score at which a class counts as unsafe; 3 is exact, 2 is the cheaper
    /// sound-but-incomplete variant.
    pub threshold: u32,
    pub max_states: usize,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        Self { threshold: 3, max_states: 1_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct ClassInfo {
    /// `None` for the merged sink.
    pub sheet: Option<ScoreSheet>,
    /// Shortest prefix reaching the class (first found for the sink).
    pub repr: Vec<Vertex>,
}

#[derive(Clone, Debug)]
pub struct SafetyReduction {
    pub game: SafetyGame,
    pub tracked_player: Player,
    pub threshold: u32,
    pub family: Family,
    /// Arena the scores are computed on: the input arena, or its dual when
    /// Player 0's scores are tracked.
    pub base: Arena,
    pub embed: Vec<usize>,
    pub classes: Vec<ClassInfo>,
    /// Per class, the arena move taken and the class it leads to.
    pub transitions: Vec<Vec<(Vertex, usize)>>,
    pub sink: Option<usize>,
    /// Number of distinct unsafe classes before merging.
    pub unsafe_classes: usize,
    index: HashMap<ScoreSheet, usize>,
}

impl SafetyReduction {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn is_safe(&self, class: usize) -> bool {
        self.game.safe.contains(class)
    }

    pub fn sheet(&self, class: usize) -> Option<&ScoreSheet> {
        self.classes[class].sheet.as_ref()
    }

    pub fn last(&self, class: usize) -> Option<Vertex> {
        self.sheet(class).map(|s| s.last)
    }

    /// The player who keeps the play safe, in terms of the input game.
    pub fn safety_player(&self) -> Player {
        self.tracked_player.opponent()
    }

    pub fn successor(&self, class: usize, v: Vertex) -> Option<usize> {
        self.transitions[class].iter().find(|&&(u, _)| u == v).map(|&(_, c)| c)
    }

    pub fn label(&self, class: usize) -> String {
        if Some(class) == self.sink {
            "sink".to_string()
        } else {
            format!("[{}]", self.base.format_word(&self.classes[class].repr))
        }
    }

    pub fn lookup(&self, sheet: &ScoreSheet) -> Option<usize> {
        self.index.get(sheet).copied()
    }

    /// The class of a play prefix. A prefix that just reached the threshold
    /// maps to the sink.
    pub fn class_of(&self, word: &[Vertex]) -> Result<usize> {
        self.base.check_path(word)?;
        let (&first, rest) = word.split_first().ok_or(Error::EmptyWord)?;
        let mut sheet = sheet_init(&self.family, first);
        for (i, &v) in rest.iter().enumerate() {
            if sheet.max_score() >= self.threshold {
                return Err(Error::PrefixBeyondThreshold);
            }
            sheet = sheet.advance(&self.family, v, self.threshold);
            if sheet.max_score() >= self.threshold && i + 1 == rest.len() {
                return self.sink.ok_or(Error::ClassNotFound);
            }
        }
        self.lookup(&sheet).ok_or(Error::ClassNotFound)
    }
}

struct Explorer {
    classes: Vec<ClassInfo>,
    transitions: Vec<Vec<(Vertex, usize)>>,
    index: HashMap<ScoreSheet, usize>,
    max_states: usize,
}

impl Explorer {
    fn intern(&mut self, sheet: Option<ScoreSheet>, repr: Vec<Vertex>) -> Result<usize> {
        if self.classes.len() >= self.max_states {
            return Err(Error::StateLimit(self.max_states));
        }
        let id = self.classes.len();
        if let Some(s) = &sheet {
            self.index.insert(s.clone(), id);
        }
        self.classes.push(ClassInfo { sheet, repr });
        self.transitions.push(Vec::new());
        Ok(id)
    }
}

/// Builds the quotient safety game tracking `tracked_player`'s scores.
pub fn build_safety_game(
    arena: &Arena,
    muller: &MullerCondition,
    tracked_player: Player,
    options: ReductionOptions,
) -> Result<SafetyReduction> {
    if !(2..=3).contains(&options.threshold) {
        return Err(Error::BadThreshold(options.threshold));
    }
    let (base, family) = match tracked_player {
        Player::One => (arena.clone(), Family::new(muller.f1(arena)?)),
        Player::Zero => (arena.dual(), Family::new(muller.f0().to_vec())),
    };
    let threshold = options.threshold;

    let mut ex = Explorer {
        classes: Vec::new(),
        transitions: Vec::new(),
        index: HashMap::new(),
        max_states: options.max_states,
    };
    let mut unsafe_sheets: HashSet<ScoreSheet> = HashSet::new();
    let mut sink = None;
    let mut queue = VecDeque::new();

    let mut embed = Vec::with_capacity(base.len());
    for v in base.vertices() {
        let id = ex.intern(Some(sheet_init(&family, v)), vec![v])?;
        embed.push(id);
        queue.push_back(id);
    }

    while let Some(c) = queue.pop_front() {
        let sheet = ex.classes[c].sheet.clone().expect("sink is never queued");
        let mut out = Vec::with_capacity(base.successors(sheet.last).len());
        for &v in base.successors(sheet.last) {
            let next = sheet.advance(&family, v, threshold);
            let word = || {
                let mut w = ex.classes[c].repr.clone();
                w.push(v);
                w
            };
            let target = if next.max_score() >= threshold {
                unsafe_sheets.insert(next);
                match sink {
                    Some(s) => s,
                    None => {
                        let w = word();
                        let s = ex.intern(None, w)?;
                        sink = Some(s);
                        s
                    }
                }
            } else if let Some(&known) = ex.index.get(&next) {
                known
            } else {
                let w = word();
                let id = ex.intern(Some(next), w)?;
                queue.push_back(id);
                id
            };
            out.push((v, target));
        }
        ex.transitions[c] = out;
    }

    let Explorer { classes, transitions, index, .. } = ex;
    let n = classes.len();
    let mut names = Vec::with_capacity(n);
    let mut owners = Vec::with_capacity(n);
    for class in &classes {
        match &class.sheet {
            Some(s) => {
                names.push(format!("[{}]", base.format_word(&class.repr)));
                owners.push(base.owner(s.last));
            }
            None => {
                names.push("sink".to_string());
                owners.push(Player::One);
            }
        }
    }
    let mut edges: Vec<(usize, usize)> =
        transitions.iter().enumerate().flat_map(|(c, ts)| ts.iter().map(move |&(_, t)| (c, t))).collect();
    if let Some(s) = sink {
        edges.push((s, s));
    }
    let quotient = Arena::with_names(names, owners, edges)?;
    let mut safe = VertexSet::full(n);
    if let Some(s) = sink {
        safe.remove(s);
    }

    Ok(SafetyReduction {
        game: SafetyGame { arena: quotient, safe },
        tracked_player,
        threshold,
        family,
        base,
        embed,
        classes,
        transitions,
        sink,
        unsafe_classes: unsafe_sheets.len(),
        index,
    })
}

/// Upper bound on the number of quotient vertices for `n` arena vertices:
/// LARs of each length `k`, times the score/accumulator combinations per LAR,
/// plus the sink.
pub fn lar_size_bound(n: usize) -> u128 {
    let factorial = |k: usize| (1..=k as u128).product::<u128>();
    let binomial = |n: usize, k: usize| factorial(n) / (factorial(k) * factorial(n - k));
    (1..=n).map(|k| binomial(n, k) * factorial(k) * (1u128 << k) * factorial(k)).sum::<u128>() + 1
}

pub fn factorial_cubed(n: usize) -> u128 {
    (1..=n as u128).product::<u128>().pow(3)
}
