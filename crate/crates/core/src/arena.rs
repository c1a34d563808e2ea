//! Arenas, winning conditions, finite play prefixes and lassos.
//!
//! Vertices carry external string names but are handled as dense indices
//! everywhere else. An [`Arena`] is immutable once built.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::vertex_set::{Vertex, VertexSet};

/// Loop enumeration visits every subset of the vertex set.
pub const LOOP_VERTEX_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Zero,
    One,
}

impl Player {
    pub fn opponent(self) -> Self {
        match self {
            Player::Zero => Player::One,
            Player::One => Player::Zero,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Zero => 0,
            Player::One => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Player::Zero),
            1 => Some(Player::One),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// A finite directed graph whose vertices are split between the two players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    names: Vec<String>,
    index: HashMap<String, Vertex>,
    owner: Vec<Player>,
    succ: Vec<Vec<Vertex>>,
    pred: Vec<Vec<Vertex>>,
}

impl Arena {
    /// Builds an arena whose vertex names are the decimal indices.
    pub fn new(owner: Vec<Player>, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let names = (0..owner.len()).map(|v| v.to_string()).collect();
        Self::with_names(names, owner, edges)
    }

    pub fn with_names(
        names: Vec<String>,
        owner: Vec<Player>,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self> {
        assert_eq!(names.len(), owner.len(), "one owner per vertex");
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (v, name) in names.iter().enumerate() {
            if index.insert(name.clone(), v).is_some() {
                return Err(Error::DuplicateVertex(name.clone()));
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(Error::VertexOutOfRange(u));
            }
            if v >= n {
                return Err(Error::VertexOutOfRange(v));
            }
            succ[u].push(v);
            pred[v].push(u);
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { names, index, owner, succ, pred })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.len()
    }

    pub fn owner(&self, v: Vertex) -> Player {
        self.owner[v]
    }

    /// Successors in increasing index order.
    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: Vertex) -> &[Vertex] {
        &self.pred[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.succ.iter().enumerate().flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.index.get(name).copied()
    }

    pub fn vertex_or_err(&self, name: &str) -> Result<Vertex> {
        self.vertex(name).ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn owned_by(&self, player: Player) -> VertexSet {
        VertexSet::from_iter(self.len(), self.vertices().filter(|&v| self.owner[v] == player))
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::empty(self.len())
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    /// Resolves a whitespace-free sequence of names; single-character names may
    /// be written without separators (`"1001"`), others are separated by spaces.
    pub fn word(&self, text: &str) -> Result<Vec<Vertex>> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() == 1 && self.vertex(tokens[0]).is_none() {
            return text.trim().chars().map(|c| self.vertex_or_err(&c.to_string())).collect();
        }
        tokens.into_iter().map(|t| self.vertex_or_err(t)).collect()
    }

    /// Renders a word the way [`Arena::word`] reads it.
    pub fn format_word(&self, word: &[Vertex]) -> String {
        if self.names.iter().all(|n| n.chars().count() == 1) {
            word.iter().map(|&v| self.name(v)).collect()
        } else {
            word.iter().map(|&v| self.name(v)).collect::<Vec<_>>().join(" ")
        }
    }

    /// Renders a set as `{a,b,c}` in index order.
    pub fn format_set(&self, set: &VertexSet) -> String {
        let names: Vec<&str> = set.iter().map(|v| self.name(v)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// The same graph with the players' roles exchanged.
    pub fn dual(&self) -> Self {
        Self { owner: self.owner.iter().map(|p| p.opponent()).collect(), ..self.clone() }
    }

    pub fn check_path(&self, word: &[Vertex]) -> Result<()> {
        for &v in word {
            if v >= self.len() {
                return Err(Error::VertexOutOfRange(v));
            }
        }
        for pair in word.windows(2) {
            if !self.has_edge(pair[0], pair[1]) {
                return Err(Error::NotAPath { from: pair[0], to: pair[1] });
            }
        }
        Ok(())
    }
}

/// Muller condition given by Player 0's family of loops; every other loop
/// belongs to Player 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MullerCondition {
    f0: Vec<VertexSet>,
}

impl MullerCondition {
    pub fn new(mut f0: Vec<VertexSet>) -> Self {
        f0.sort();
        f0.dedup();
        Self { f0 }
    }

    pub fn f0(&self) -> &[VertexSet] {
        &self.f0
    }

    pub fn player0_wins(&self, infinity_set: &VertexSet) -> bool {
        self.f0.binary_search(infinity_set).is_ok()
    }

    /// Player 1's loops.
    pub fn f1(&self, arena: &Arena) -> Result<Vec<VertexSet>> {
        f1_loops(self, arena)
    }

    /// The family tracked when scoring `player`'s sets.
    pub fn family_of(&self, arena: &Arena, player: Player) -> Result<Vec<VertexSet>> {
        match player {
            Player::Zero => Ok(self.f0.clone()),
            Player::One => self.f1(arena),
        }
    }

    /// Condition of the game with the players' roles exchanged.
    pub fn dual(&self, arena: &Arena) -> Result<Self> {
        Ok(Self::new(self.f1(arena)?))
    }
}

/// Winning condition for Player 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    Muller(MullerCondition),
    Safety(VertexSet),
    Buchi(VertexSet),
    CoBuchi(VertexSet),
    Parity(Vec<u32>),
    RequestResponse(Vec<(VertexSet, VertexSet)>),
}

impl Condition {
    pub fn kind(&self) -> &'static str {
        match self {
            Condition::Muller(_) => "muller",
            Condition::Safety(_) => "safety",
            Condition::Buchi(_) => "buchi",
            Condition::CoBuchi(_) => "cobuchi",
            Condition::Parity(_) => "parity",
            Condition::RequestResponse(_) => "rr",
        }
    }
}

/// An arena together with a winning condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    pub arena: Arena,
    pub condition: Condition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoOutgoingEdge(Vertex),
    NotALoop(VertexSet),
    EmptyLoopSet,
    UniverseMismatch { expected: usize, actual: usize },
    PriorityCount { expected: usize, actual: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoOutgoingEdge(v) => write!(f, "vertex {v}: no outgoing edge"),
            Violation::NotALoop(set) => write!(f, "{set:?}: not a loop"),
            Violation::EmptyLoopSet => write!(f, "empty set in f0"),
            Violation::UniverseMismatch { expected, actual } => {
                write!(f, "vertex set over {actual} vertices, arena has {expected}")
            }
            Violation::PriorityCount { expected, actual } => {
                write!(f, "{actual} priorities given for {expected} vertices")
            }
        }
    }
}

impl Violation {
    pub fn describe(&self, arena: &Arena) -> String {
        match self {
            Violation::NoOutgoingEdge(v) => format!("vertex {}: no outgoing edge", arena.name(*v)),
            Violation::NotALoop(set) => format!("{}: not a loop", arena.format_set(set)),
            other => other.to_string(),
        }
    }
}

/// Collects every breach of the arena and condition invariants.
pub fn validate(arena: &Arena, condition: &Condition) -> Vec<Violation> {
    let n = arena.len();
    let mut out: Vec<Violation> =
        arena.vertices().filter(|&v| arena.successors(v).is_empty()).map(Violation::NoOutgoingEdge).collect();
    let check_universe = |set: &VertexSet, out: &mut Vec<Violation>| {
        if set.universe() != n {
            out.push(Violation::UniverseMismatch { expected: n, actual: set.universe() });
            false
        } else {
            true
        }
    };
    match condition {
        Condition::Muller(m) => {
            for set in m.f0() {
                if !check_universe(set, &mut out) {
                    continue;
                }
                if set.is_empty() {
                    out.push(Violation::EmptyLoopSet);
                } else if !is_loop(arena, set) {
                    out.push(Violation::NotALoop(set.clone()));
                }
            }
        }
        Condition::Safety(s) | Condition::Buchi(s) | Condition::CoBuchi(s) => {
            check_universe(s, &mut out);
        }
        Condition::Parity(priority) => {
            if priority.len() != n {
                out.push(Violation::PriorityCount { expected: n, actual: priority.len() });
            }
        }
        Condition::RequestResponse(pairs) => {
            for (q, p) in pairs {
                check_universe(q, &mut out);
                check_universe(p, &mut out);
            }
        }
    }
    out
}

/// Vertices occurring in `word`.
pub fn occ(universe: usize, word: &[Vertex]) -> VertexSet {
    VertexSet::from_iter(universe, word.iter().copied())
}

/// A non-empty path through an arena.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlayPrefix(Vec<Vertex>);

impl PlayPrefix {
    pub fn new(arena: &Arena, word: Vec<Vertex>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        arena.check_path(&word)?;
        Ok(Self(word))
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn last(&self) -> Vertex {
        *self.0.last().expect("non-empty")
    }
}

/// The ultimately periodic play `stem · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub stem: Vec<Vertex>,
    pub cycle: Vec<Vertex>,
}

impl Lasso {
    pub fn new(stem: Vec<Vertex>, cycle: Vec<Vertex>) -> Self {
        Self { stem, cycle }
    }

    /// Checks that `stem·cycle` and `cycle·cycle` are paths.
    pub fn check(&self, arena: &Arena) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        let mut word = self.stem.clone();
        word.extend_from_slice(&self.cycle);
        word.push(self.cycle[0]);
        arena.check_path(&word)
    }

    /// `stem · cycle^times`.
    pub fn unfold(&self, times: usize) -> Vec<Vertex> {
        let mut word = self.stem.clone();
        for _ in 0..times {
            word.extend_from_slice(&self.cycle);
        }
        word
    }
}

pub fn infi(universe: usize, lasso: &Lasso) -> VertexSet {
    occ(universe, &lasso.cycle)
}

/// Decides who wins the play described by `lasso`.
pub fn winner(arena: &Arena, condition: &Condition, lasso: &Lasso) -> Result<Player> {
    lasso.check(arena)?;
    let n = arena.len();
    let inf = infi(n, lasso);
    let zero_wins = match condition {
        Condition::Muller(m) => m.player0_wins(&inf),
        Condition::Safety(safe) => occ(n, &lasso.unfold(1)).is_subset(safe),
        Condition::Buchi(f) => inf.intersects(f),
        Condition::CoBuchi(f) => inf.is_subset(f),
        Condition::Parity(priority) => inf.iter().map(|v| priority[v]).min().is_some_and(|p| p % 2 == 0),
        Condition::RequestResponse(pairs) => pairs.iter().all(|(request, response)| {
            if inf.intersects(response) {
                return true;
            }
            if inf.intersects(request) {
                return false;
            }
            // no response recurs, so every request must be served before the cycle
            let mut pending = false;
            for v in lasso.unfold(2) {
                if response.contains(v) {
                    pending = false;
                }
                if request.contains(v) {
                    pending = true;
                }
            }
            !pending
        }),
    };
    Ok(if zero_wins { Player::Zero } else { Player::One })
}

/// Whether `set` is strongly connected inside itself. A singleton needs a
/// self-loop.
pub fn is_loop(arena: &Arena, set: &VertexSet) -> bool {
    let Some(root) = set.first() else {
        return false;
    };
    if set.len() == 1 {
        return arena.has_edge(root, root);
    }
    let reach = |forward: bool| {
        let mut seen = VertexSet::singleton(arena.len(), root);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let next = if forward { arena.successors(u) } else { arena.predecessors(u) };
            for &w in next {
                if set.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    queue.push_back(w);
                }
            }
        }
        seen
    };
    set.is_subset(&reach(true)) && set.is_subset(&reach(false))
}

/// Every loop of the arena, in canonical order.
pub fn enumerate_loops(arena: &Arena) -> Result<Vec<VertexSet>> {
    let n = arena.len();
    if n > LOOP_VERTEX_LIMIT {
        return Err(Error::TooManyVertices { limit: LOOP_VERTEX_LIMIT, actual: n });
    }
    let mut loops: Vec<VertexSet> =
        (1u64..1 << n).map(|mask| VertexSet::from_mask(n, mask)).filter(|set| is_loop(arena, set)).collect();
    loops.sort();
    Ok(loops)
}

/// Loops not in Player 0's family.
pub fn f1_loops(muller: &MullerCondition, arena: &Arena) -> Result<Vec<VertexSet>> {
    Ok(enumerate_loops(arena)?.into_iter().filter(|l| !muller.player0_wins(l)).collect())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Three vertices: Player 0 owns `1`, Player 1 owns `0` and `2`; `1` is
    /// connected both ways to `0` and `2`, which carry self-loops.
    pub fn two_sides() -> (Arena, MullerCondition) {
        let arena =
            Arena::new(vec![Player::One, Player::Zero, Player::One], [(0, 0), (0, 1), (1, 0), (1, 2), (2, 1), (2, 2)])
                .unwrap();
        let f0 = [vec![0], vec![2], vec![0, 1, 2]].into_iter().map(|s| VertexSet::from_iter(3, s)).collect();
        (arena, MullerCondition::new(f0))
    }

    fn set(items: &[Vertex]) -> VertexSet {
        VertexSet::from_iter(3, items.iter().copied())
    }

    #[test]
    fn two_sides_is_valid() {
        let (arena, muller) = two_sides();
        assert!(validate(&arena, &Condition::Muller(muller)).is_empty());
    }

    #[test]
    fn terminal_vertex_is_reported() {
        let arena = Arena::new(vec![Player::Zero, Player::Zero], [(0, 1)]).unwrap();
        let violations = validate(&arena, &Condition::Buchi(VertexSet::empty(2)));
        assert_eq!(violations, vec![Violation::NoOutgoingEdge(1)]);
        assert!(violations[0].to_string().contains("no outgoing edge"));
    }

    #[test]
    fn non_loop_in_f0_is_reported() {
        let (arena, _) = two_sides();
        let bad = MullerCondition::new(vec![set(&[0, 2])]);
        let violations = validate(&arena, &Condition::Muller(bad));
        assert_eq!(violations, vec![Violation::NotALoop(set(&[0, 2]))]);
        assert!(violations[0].describe(&arena).contains("not a loop"));
    }

    #[test]
    fn occurrence_sets() {
        let (arena, _) = two_sides();
        assert_eq!(occ(3, &arena.word("10012100").unwrap()), set(&[0, 1, 2]));
        assert_eq!(occ(3, &arena.word("0").unwrap()), set(&[0]));
        assert_eq!(occ(3, &arena.word("1212").unwrap()), set(&[1, 2]));
    }

    #[test]
    fn infinity_sets() {
        assert_eq!(infi(3, &Lasso::new(vec![1], vec![0, 1])), set(&[0, 1]));
        assert_eq!(infi(3, &Lasso::new(vec![], vec![0])), set(&[0]));
        assert_eq!(infi(3, &Lasso::new(vec![1, 2, 0], vec![0])), set(&[0]));
    }

    #[test]
    fn muller_winner_on_two_sides() {
        let (arena, muller) = two_sides();
        let cond = Condition::Muller(muller);
        assert_eq!(winner(&arena, &cond, &Lasso::new(vec![1], vec![0, 1])).unwrap(), Player::One);
        assert_eq!(winner(&arena, &cond, &Lasso::new(vec![], vec![0])).unwrap(), Player::Zero);
        assert!(winner(&arena, &cond, &Lasso::new(vec![0], vec![2])).is_err());
    }

    #[test]
    fn parity_winner_single_vertex() {
        let arena = Arena::new(vec![Player::Zero], [(0, 0)]).unwrap();
        let cond = Condition::Parity(vec![0]);
        assert_eq!(winner(&arena, &cond, &Lasso::new(vec![], vec![0])).unwrap(), Player::Zero);
    }

    #[test]
    fn request_response_winner() {
        // r -> a -> r, plus r -> s (sink with self-loop), a answers r
        let arena = Arena::new(vec![Player::Zero; 3], [(0, 1), (1, 0), (0, 2), (2, 2)]).unwrap();
        let pairs = vec![(VertexSet::from_iter(3, [0]), VertexSet::from_iter(3, [1]))];
        let cond = Condition::RequestResponse(pairs);
        let w = |stem: Vec<Vertex>, cycle: Vec<Vertex>| winner(&arena, &cond, &Lasso::new(stem, cycle)).unwrap();
        assert_eq!(w(vec![], vec![0, 1]), Player::Zero);
        assert_eq!(w(vec![0], vec![2]), Player::One);
        assert_eq!(w(vec![0, 1, 0], vec![2]), Player::One);
        assert_eq!(w(vec![2], vec![2]), Player::Zero);
    }

    #[test]
    fn loops_of_two_sides() {
        let (arena, muller) = two_sides();
        assert!(is_loop(&arena, &set(&[0, 1, 2])));
        assert!(!is_loop(&arena, &set(&[0, 2])));
        assert!(is_loop(&arena, &set(&[0])));
        assert!(!is_loop(&arena, &set(&[1])));
        let expected = vec![set(&[0]), set(&[0, 1]), set(&[0, 1, 2]), set(&[1, 2]), set(&[2])];
        assert_eq!(enumerate_loops(&arena).unwrap(), expected);
        assert_eq!(f1_loops(&muller, &arena).unwrap(), vec![set(&[0, 1]), set(&[1, 2])]);
    }

    #[test]
    fn small_loop_enumerations() {
        let single = Arena::new(vec![Player::Zero], [(0, 0)]).unwrap();
        assert_eq!(enumerate_loops(&single).unwrap(), vec![VertexSet::from_iter(1, [0])]);
        let pair = Arena::new(vec![Player::Zero, Player::One], [(0, 1), (1, 0)]).unwrap();
        assert_eq!(enumerate_loops(&pair).unwrap(), vec![VertexSet::from_iter(2, [0, 1])]);
    }

    #[test]
    fn f1_extremes() {
        let (arena, _) = two_sides();
        let all = MullerCondition::new(enumerate_loops(&arena).unwrap());
        assert!(f1_loops(&all, &arena).unwrap().is_empty());
        let none = MullerCondition::new(vec![]);
        assert_eq!(f1_loops(&none, &arena).unwrap(), enumerate_loops(&arena).unwrap());
    }

    #[test]
    fn word_parsing_accepts_compact_and_spaced_forms() {
        let (arena, _) = two_sides();
        assert_eq!(arena.word("1001").unwrap(), vec![1, 0, 0, 1]);
        assert_eq!(arena.word("1 0 0 1").unwrap(), vec![1, 0, 0, 1]);
        assert_eq!(arena.format_word(&[1, 0, 0, 1]), "1001");
    }
}
