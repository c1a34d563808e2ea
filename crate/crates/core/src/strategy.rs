//! Finite-state strategies read off the safety game, and their verification.
//!
//! Memory states are plain indices into a [`MemoryStructure`]; strategies built
//! from a reduction use `=_F` classes as memory and an extra `bot` state for
//! histories that left the winning region.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::arena::{Arena, MullerCondition, Player};
use crate::error::{Error, Result};
use crate::reduction::{build_safety_game, ReductionOptions, SafetyReduction};
use crate::safety_solver::{solve_safety, SafetySolution};
use crate::scoring::{sheet_init, sheet_le, Family, ScoreSheet};
use crate::vertex_set::{Vertex, VertexSet};

pub type Memory = usize;

pub const BOTTOM_LABEL: &str = "bot";

/// States, initialisation and update of a finite memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoryStructure {
    pub labels: Vec<String>,
    /// Absorbing state used for every update missing from the table.
    pub bottom: Option<Memory>,
    pub init: Vec<Memory>,
    pub update: BTreeMap<(Memory, Vertex), Memory>,
}

impl MemoryStructure {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn init(&self, v: Vertex) -> Memory {
        self.init[v]
    }

    pub fn update(&self, m: Memory, v: Vertex) -> Result<Memory> {
        self.update
            .get(&(m, v))
            .copied()
            .or(self.bottom)
            .ok_or_else(|| Error::UndefinedUpdate { memory: self.labels[m].clone(), vertex: v })
    }

    /// Memory after reading a whole prefix.
    pub fn run(&self, word: &[Vertex]) -> Result<Memory> {
        let (&first, rest) = word.split_first().ok_or(Error::EmptyWord)?;
        rest.iter().try_fold(self.init(first), |m, &v| self.update(m, v))
    }
}

/// A strategy that may allow several moves; deterministic strategies allow
/// exactly one.
pub trait MultiStrategy {
    fn player(&self) -> Player;
    fn memory(&self) -> &MemoryStructure;
    fn moves(&self, v: Vertex, m: Memory) -> Option<&[Vertex]>;

    fn allowed(&self, v: Vertex, m: Memory) -> Result<&[Vertex]> {
        self.moves(v, m).ok_or_else(|| Error::UndefinedMove { memory: self.memory().labels[m].clone(), vertex: v })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoryStrategy {
    pub player: Player,
    pub memory: MemoryStructure,
    pub next: BTreeMap<(Vertex, Memory), Vertex>,
}

impl MultiStrategy for MemoryStrategy {
    fn player(&self) -> Player {
        self.player
    }

    fn memory(&self) -> &MemoryStructure {
        &self.memory
    }

    fn moves(&self, v: Vertex, m: Memory) -> Option<&[Vertex]> {
        self.next.get(&(v, m)).map(std::slice::from_ref)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermissiveStrategy {
    pub player: Player,
    pub memory: MemoryStructure,
    pub next: BTreeMap<(Vertex, Memory), Vec<Vertex>>,
}

impl MultiStrategy for PermissiveStrategy {
    fn player(&self) -> Player {
        self.player
    }

    fn memory(&self) -> &MemoryStructure {
        &self.memory
    }

    fn moves(&self, v: Vertex, m: Memory) -> Option<&[Vertex]> {
        self.next.get(&(v, m)).map(Vec::as_slice)
    }
}

impl From<MemoryStrategy> for PermissiveStrategy {
    fn from(s: MemoryStrategy) -> Self {
        Self { player: s.player, memory: s.memory, next: s.next.into_iter().map(|(k, v)| (k, vec![v])).collect() }
    }
}

impl PermissiveStrategy {
    /// Back to a deterministic strategy when every move set is a singleton.
    pub fn into_deterministic(self) -> Option<MemoryStrategy> {
        let mut next = BTreeMap::new();
        for (k, vs) in self.next {
            match vs.as_slice() {
                [single] => {
                    next.insert(k, *single);
                }
                _ => return None,
            }
        }
        Some(MemoryStrategy { player: self.player, memory: self.memory, next })
    }
}

/// Checks that every listed move follows an arena edge and that no move set is
/// empty.
pub fn check_moves(arena: &Arena, strat: &impl MultiStrategy) -> Result<()> {
    let memory = strat.memory();
    for m in 0..memory.len() {
        for v in arena.vertices() {
            if let Some(moves) = strat.moves(v, m) {
                if moves.is_empty() {
                    return Err(Error::UndefinedMove { memory: memory.labels[m].clone(), vertex: v });
                }
                for &to in moves {
                    if to >= arena.len() || !arena.has_edge(v, to) {
                        return Err(Error::IllegalMove { from: v, to });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Vertices whose initial class is won in the safety game.
pub fn embedded_region(red: &SafetyReduction, sol: &SafetySolution) -> VertexSet {
    VertexSet::from_iter(red.embed.len(), (0..red.embed.len()).filter(|&v| sol.w0.contains(red.embed[v])))
}

fn class_sheet(red: &SafetyReduction, class: usize) -> &ScoreSheet {
    red.sheet(class).expect("safe classes carry a sheet")
}

/// Classes reachable from the winning initial classes when the safety player
/// follows `sol.strategy0` and the opponent moves freely.
pub fn strategy_reachable(red: &SafetyReduction, sol: &SafetySolution) -> Vec<usize> {
    let mut seen = VertexSet::empty(red.len());
    let mut queue = VecDeque::new();
    for &c in &red.embed {
        if sol.w0.contains(c) && !seen.contains(c) {
            seen.insert(c);
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        let next: Vec<usize> = if red.game.arena.owner(c) == Player::Zero {
            sol.strategy0[c].into_iter().collect()
        } else {
            red.game.arena.successors(c).to_vec()
        };
        for d in next {
            if !seen.contains(d) {
                seen.insert(d);
                queue.push_back(d);
            }
        }
    }
    seen.to_vec()
}

/// The `<=`-maximal elements of a set of safe classes, in index order.
pub fn maximal_classes(red: &SafetyReduction, classes: &[usize]) -> Vec<usize> {
    classes
        .iter()
        .copied()
        .filter(|&c| !classes.iter().any(|&d| d != c && sheet_le(class_sheet(red, c), class_sheet(red, d))))
        .collect()
}

/// Finite-state winning strategy whose memory is the antichain of maximal
/// classes reachable under the positional safety strategy, plus `bot`.
pub fn build_antichain_strategy(red: &SafetyReduction, sol: &SafetySolution) -> MemoryStrategy {
    let base = &red.base;
    let reach = strategy_reachable(red, sol);
    let maxima = maximal_classes(red, &reach);
    let bottom = maxima.len();
    let mut labels: Vec<String> = maxima.iter().map(|&c| red.label(c)).collect();
    labels.push(BOTTOM_LABEL.to_string());

    let dominate = |sheet: &ScoreSheet| -> Memory {
        if sheet.max_score() >= red.threshold {
            return bottom;
        }
        maxima.iter().position(|&c| sheet_le(sheet, class_sheet(red, c))).unwrap_or(bottom)
    };

    let init = base
        .vertices()
        .map(|v| if sol.w0.contains(red.embed[v]) { dominate(class_sheet(red, red.embed[v])) } else { bottom })
        .collect();

    let mut update = BTreeMap::new();
    let mut next = BTreeMap::new();
    for (m, &c) in maxima.iter().enumerate() {
        let sheet = class_sheet(red, c);
        let mut choice = None;
        for &v in base.successors(sheet.last) {
            let target = dominate(&sheet.advance(&red.family, v, red.threshold));
            update.insert((m, v), target);
            if target != bottom && choice.is_none() {
                choice = Some(v);
            }
        }
        if base.owner(sheet.last) == Player::Zero {
            next.insert((sheet.last, m), choice.unwrap_or(base.successors(sheet.last)[0]));
        }
    }
    for v in base.vertices() {
        if base.owner(v) == Player::Zero {
            next.insert((v, bottom), base.successors(v)[0]);
        }
    }

    MemoryStrategy {
        player: red.safety_player(),
        memory: MemoryStructure { labels, bottom: Some(bottom), init, update },
        next,
    }
}

/// Multi-strategy allowing every move that keeps the class history inside
/// the safety game's winning region; memory is that region plus `bot`.
pub fn build_permissive_strategy(red: &SafetyReduction, sol: &SafetySolution) -> PermissiveStrategy {
    let base = &red.base;
    let winning: Vec<usize> = sol.w0.to_vec();
    let memory_of: HashMap<usize, Memory> = winning.iter().enumerate().map(|(m, &c)| (c, m)).collect();
    let bottom = winning.len();
    let mut labels: Vec<String> = winning.iter().map(|&c| red.label(c)).collect();
    labels.push(BOTTOM_LABEL.to_string());
    let lift = |c: usize| memory_of.get(&c).copied().unwrap_or(bottom);

    let init = base.vertices().map(|v| lift(red.embed[v])).collect();
    let mut update = BTreeMap::new();
    let mut next = BTreeMap::new();
    for (m, &c) in winning.iter().enumerate() {
        let last = class_sheet(red, c).last;
        let mut allowed = Vec::new();
        for &(v, target) in &red.transitions[c] {
            let t = lift(target);
            update.insert((m, v), t);
            if t != bottom {
                allowed.push(v);
            }
        }
        if base.owner(last) == Player::Zero {
            if allowed.is_empty() {
                allowed.push(base.successors(last)[0]);
            }
            next.insert((last, m), allowed);
        }
    }
    for v in base.vertices() {
        if base.owner(v) == Player::Zero {
            next.insert((v, bottom), vec![base.successors(v)[0]]);
        }
    }

    PermissiveStrategy {
        player: red.safety_player(),
        memory: MemoryStructure { labels, bottom: Some(bottom), init, update },
        next,
    }
}

/// Outcome of a product exploration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// Shortest play prefix violating the property.
    pub witness: Option<Vec<Vertex>>,
    pub explored: usize,
}

fn trace<K: Clone + Eq + std::hash::Hash>(
    parents: &HashMap<K, Option<K>>,
    mut at: K,
    vertex_of: impl Fn(&K) -> Vertex,
) -> Vec<Vertex> {
    let mut path = vec![vertex_of(&at)];
    while let Some(Some(p)) = parents.get(&at) {
        path.push(vertex_of(p));
        at = p.clone();
    }
    path.reverse();
    path
}

fn check_from(arena: &Arena, from: &[Vertex]) -> Result<()> {
    match from.iter().find(|&&v| v >= arena.len()) {
        Some(&v) => Err(Error::VertexOutOfRange(v)),
        None => Ok(()),
    }
}

/// Explores all plays consistent with `strat` from `from`, tracking the
/// opponent's scores, and reports whether they always stay at most `bound`.
/// A bound of 2 or more certifies that `strat` wins from `from`.
pub fn verify_bounded_scores(
    arena: &Arena,
    muller: &MullerCondition,
    strat: &impl MultiStrategy,
    from: &[Vertex],
    bound: u32,
) -> Result<Verdict> {
    check_from(arena, from)?;
    let player = strat.player();
    let family = Family::new(muller.family_of(arena, player.opponent())?);
    let memory = strat.memory();
    let cap = bound + 1;

    type State = (Vertex, Memory, ScoreSheet);
    let mut parents: HashMap<State, Option<State>> = HashMap::new();
    let mut queue: VecDeque<State> = VecDeque::new();
    for &v in from {
        let state = (v, memory.init(v), sheet_init(&family, v));
        if !parents.contains_key(&state) {
            parents.insert(state.clone(), None);
            queue.push_back(state);
        }
    }
    while let Some(state) = queue.pop_front() {
        let (v, m, sheet) = &state;
        if sheet.max_score() > bound {
            return Ok(Verdict {
                holds: false,
                witness: Some(trace(&parents, state.clone(), |s| s.0)),
                explored: parents.len(),
            });
        }
        let moves = if arena.owner(*v) == player {
            let moves = strat.allowed(*v, *m)?;
            if let Some(&to) = moves.iter().find(|&&to| to >= arena.len() || !arena.has_edge(*v, to)) {
                return Err(Error::IllegalMove { from: *v, to });
            }
            moves
        } else {
            arena.successors(*v)
        };
        for &to in moves {
            let next = (to, memory.update(*m, to)?, sheet.advance(&family, to, cap));
            if !parents.contains_key(&next) {
                parents.insert(next.clone(), Some(state.clone()));
                queue.push_back(next);
            }
        }
    }
    Ok(Verdict { holds: true, witness: None, explored: parents.len() })
}

/// Checks up to `depth` vertices that every play consistent with `sigma` from
/// `from` is also consistent with `sigma_prime`. `sigma` must keep the
/// opponent's scores at most 2.
pub fn check_subsumption_bounded(
    arena: &Arena,
    muller: &MullerCondition,
    sigma: &impl MultiStrategy,
    sigma_prime: &impl MultiStrategy,
    from: Vertex,
    depth: usize,
) -> Result<Verdict> {
    if sigma.player() != sigma_prime.player() {
        return Err(Error::PlayerMismatch);
    }
    if !verify_bounded_scores(arena, muller, sigma, &[from], 2)?.holds {
        return Err(Error::NotScoreBounding);
    }
    let player = sigma.player();
    let (mem, mem_prime) = (sigma.memory(), sigma_prime.memory());

    type State = (Vertex, Memory, Memory);
    let start = (from, mem.init(from), mem_prime.init(from));
    let mut parents: HashMap<State, Option<State>> = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([(start, 1usize)]);
    while let Some((state, length)) = queue.pop_front() {
        if length >= depth {
            continue;
        }
        let (v, m, mp) = state;
        let moves = if arena.owner(v) == player { sigma.allowed(v, m)? } else { arena.successors(v) };
        let permitted = if arena.owner(v) == player { Some(sigma_prime.allowed(v, mp)?) } else { None };
        for &to in moves {
            if permitted.is_some_and(|p| !p.contains(&to)) {
                let mut witness = trace(&parents, state, |s| s.0);
                witness.push(to);
                return Ok(Verdict { holds: false, witness: Some(witness), explored: parents.len() });
            }
            let next = (to, mem.update(m, to)?, mem_prime.update(mp, to)?);
            if let Entry::Vacant(slot) = parents.entry(next) {
                slot.insert(Some(state));
                queue.push_back((next, length + 1));
            }
        }
    }
    Ok(Verdict { holds: true, witness: None, explored: parents.len() })
}

/// Reachable `(vertex, memory)` pairs of the arena under `strat` from `from`.
pub fn reachable_product(
    arena: &Arena,
    strat: &impl MultiStrategy,
    from: &[Vertex],
) -> Result<BTreeSet<(Vertex, Memory)>> {
    check_from(arena, from)?;
    let memory = strat.memory();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for &v in from {
        if seen.insert((v, memory.init(v))) {
            queue.push_back((v, memory.init(v)));
        }
    }
    while let Some((v, m)) = queue.pop_front() {
        let moves = if arena.owner(v) == strat.player() { strat.allowed(v, m)? } else { arena.successors(v) };
        for &to in moves {
            let next = (to, memory.update(m, to)?);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MullerSolution {
    pub w0: VertexSet,
    pub w1: VertexSet,
    pub strategy_p0: MemoryStrategy,
    pub strategy_p1: MemoryStrategy,
}

/// Winning regions of a Muller game plus antichain strategies for both
/// players, from the two safety games that track each player's scores.
pub fn solve_muller(arena: &Arena, muller: &MullerCondition, options: ReductionOptions) -> Result<MullerSolution> {
    let red1 = build_safety_game(arena, muller, Player::One, options)?;
    let sol1 = solve_safety(&red1.game);
    let red0 = build_safety_game(arena, muller, Player::Zero, options)?;
    let sol0 = solve_safety(&red0.game);
    let w0 = embedded_region(&red1, &sol1);
    let w1 = embedded_region(&red0, &sol0);
    if options.threshold == 3 && (w0.intersects(&w1) || w0.union(&w1) != arena.all_vertices()) {
        return Err(Error::Internal(format!(
            "winning regions do not partition the arena: W0 = {}, W1 = {}",
            arena.format_set(&w0),
            arena.format_set(&w1)
        )));
    }
    Ok(MullerSolution {
        w0,
        w1,
        strategy_p0: build_antichain_strategy(&red1, &sol1),
        strategy_p1: build_antichain_strategy(&red0, &sol0),
    })
}
