//! Monitor automata for prefix-closed safety languages and the product safety
//! games built from them.
//!
//! A monitor reads the play vertex by vertex. Its language must be such that a
//! play whose prefixes are all accepted is won by Player 0, and Player 0 can
//! keep the play accepted from her winning region. Solving the product safety
//! game then solves the original game, and the monitor doubles as strategy
//! memory. Monitor states are produced on demand during the product search.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::arena::{Arena, Condition, MullerCondition, Player};
use crate::error::{Error, Result};
use crate::reduction::SafetyGame;
use crate::safety_solver::solve_safety;
use crate::scoring::{sheet_init, Family, ScoreSheet, SCORE_CAP};
use crate::strategy::{reachable_product, MemoryStrategy, MemoryStructure};
use crate::vertex_set::{Vertex, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonitorState {
    /// Absorbing rejecting state shared by all monitors.
    Reject,
    /// Nothing read yet, or nothing worth remembering.
    Initial,
    /// Consecutive vertices outside the final set.
    Counter(u32),
    /// Bad vertices already seen.
    Seen(VertexSet),
    /// One counter per odd priority.
    Counters(Vec<u32>),
    /// Age of the open request per pair.
    Ages(Vec<Option<u64>>),
    Sheet(ScoreSheet),
}

#[derive(Clone, Debug)]
enum Rule {
    Safety(VertexSet),
    Buchi { finals: VertexSet, bound: u32 },
    CoBuchi(VertexSet),
    Parity { priority: Vec<u32>, odd: Vec<(u32, u32)> },
    RequestResponse { pairs: Vec<(VertexSet, VertexSet)>, bound: u64 },
    Muller(Family),
}

/// A deterministic automaton over the arena's vertices with an absorbing
/// reject state; every other state is accepting.
#[derive(Clone, Debug)]
pub struct Monitor {
    alphabet: usize,
    rule: Rule,
}

impl Monitor {
    pub fn kind(&self) -> &'static str {
        match self.rule {
            Rule::Safety(_) => "safety",
            Rule::Buchi { .. } => "buchi",
            Rule::CoBuchi(_) => "cobuchi",
            Rule::Parity { .. } => "parity",
            Rule::RequestResponse { .. } => "rr",
            Rule::Muller(_) => "muller",
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// The bound `k` of counting monitors.
    pub fn bound(&self) -> Option<u64> {
        match &self.rule {
            Rule::Buchi { bound, .. } => Some(u64::from(*bound)),
            Rule::RequestResponse { bound, .. } => Some(*bound),
            _ => None,
        }
    }

    pub fn start(&self) -> MonitorState {
        match &self.rule {
            Rule::Safety(_) | Rule::Muller(_) => MonitorState::Initial,
            Rule::Buchi { .. } => MonitorState::Counter(0),
            Rule::CoBuchi(_) => MonitorState::Seen(VertexSet::empty(self.alphabet)),
            Rule::Parity { odd, .. } => MonitorState::Counters(vec![0; odd.len()]),
            Rule::RequestResponse { pairs, .. } => MonitorState::Ages(vec![None; pairs.len()]),
        }
    }

    pub fn is_reject(&self, q: &MonitorState) -> bool {
        *q == MonitorState::Reject
    }

    pub fn step(&self, q: &MonitorState, v: Vertex) -> Result<MonitorState> {
        if v >= self.alphabet {
            return Err(Error::VertexOutOfRange(v));
        }
        if self.is_reject(q) {
            return Ok(MonitorState::Reject);
        }
        let next = match (&self.rule, q) {
            (Rule::Safety(safe), _) => {
                if safe.contains(v) {
                    MonitorState::Initial
                } else {
                    MonitorState::Reject
                }
            }
            (Rule::Buchi { finals, bound }, MonitorState::Counter(c)) => {
                if finals.contains(v) {
                    MonitorState::Counter(0)
                } else if c + 1 > *bound {
                    MonitorState::Reject
                } else {
                    MonitorState::Counter(c + 1)
                }
            }
            (Rule::CoBuchi(finals), MonitorState::Seen(seen)) => {
                if finals.contains(v) {
                    q.clone()
                } else if seen.contains(v) {
                    MonitorState::Reject
                } else {
                    let mut seen = seen.clone();
                    seen.insert(v);
                    MonitorState::Seen(seen)
                }
            }
            (Rule::Parity { priority, odd }, MonitorState::Counters(counters)) => {
                let p = priority[v];
                let mut counters = counters.clone();
                for (slot, &(c, limit)) in odd.iter().enumerate() {
                    if p % 2 == 0 && c > p {
                        counters[slot] = 0;
                    } else if c == p {
                        counters[slot] = (counters[slot] + 1).min(limit + 1);
                        if counters[slot] > limit {
                            return Ok(MonitorState::Reject);
                        }
                    }
                }
                MonitorState::Counters(counters)
            }
            (Rule::RequestResponse { pairs, bound }, MonitorState::Ages(ages)) => {
                let mut next = Vec::with_capacity(ages.len());
                for ((request, response), age) in pairs.iter().zip(ages) {
                    let mut age = age.map(|a| a + 1);
                    if response.contains(v) {
                        age = None;
                    }
                    if request.contains(v) && age.is_none() {
                        age = Some(0);
                    }
                    if age.is_some_and(|a| a > *bound) {
                        return Ok(MonitorState::Reject);
                    }
                    next.push(age);
                }
                MonitorState::Ages(next)
            }
            (Rule::Muller(family), MonitorState::Initial) => MonitorState::Sheet(sheet_init(family, v)),
            (Rule::Muller(family), MonitorState::Sheet(sheet)) => {
                let sheet = sheet.advance(family, v, SCORE_CAP);
                if sheet.max_score() >= SCORE_CAP {
                    MonitorState::Reject
                } else {
                    MonitorState::Sheet(sheet)
                }
            }
            _ => return Err(Error::Internal(format!("{} monitor in foreign state {q:?}", self.kind()))),
        };
        Ok(next)
    }

    pub fn run(&self, word: &[Vertex]) -> Result<MonitorState> {
        word.iter().try_fold(self.start(), |q, &v| self.step(&q, v))
    }

    pub fn accepts(&self, word: &[Vertex]) -> Result<bool> {
        Ok(!self.is_reject(&self.run(word)?))
    }

    /// Short, unique text for a state.
    pub fn describe(&self, arena: &Arena, q: &MonitorState) -> String {
        match q {
            MonitorState::Reject => "reject".to_string(),
            MonitorState::Initial => "init".to_string(),
            MonitorState::Counter(c) => format!("c{c}"),
            MonitorState::Seen(seen) => format!("seen{}", arena.format_set(seen)),
            MonitorState::Counters(cs) => {
                format!("odd({})", cs.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
            }
            MonitorState::Ages(ages) => {
                let ages: Vec<String> =
                    ages.iter().map(|a| a.map_or_else(|| "-".to_string(), |a| a.to_string())).collect();
                format!("age({})", ages.join(","))
            }
            MonitorState::Sheet(sheet) => {
                let entries: Vec<String> =
                    sheet.entries.iter().map(|e| format!("{}{}", e.score, arena.format_set(&e.acc))).collect();
                format!("{}|{}", arena.name(sheet.last), entries.join("|"))
            }
        }
    }
}

fn check_set(arena: &Arena, set: &VertexSet) -> Result<()> {
    if set.universe() != arena.len() {
        return Err(Error::Invalid(format!(
            "vertex set over {} vertices used with an arena of {}",
            set.universe(),
            arena.len()
        )));
    }
    Ok(())
}

pub fn safety_monitor(arena: &Arena, safe: &VertexSet) -> Result<Monitor> {
    check_set(arena, safe)?;
    Ok(Monitor { alphabet: arena.len(), rule: Rule::Safety(safe.clone()) })
}

/// Accepts while `finals` is visited at least once every `|V \ finals| + 1`
/// vertices.
pub fn buchi_monitor(arena: &Arena, finals: &VertexSet) -> Result<Monitor> {
    check_set(arena, finals)?;
    let bound = (arena.len() - finals.len()) as u32;
    Ok(Monitor { alphabet: arena.len(), rule: Rule::Buchi { finals: finals.clone(), bound } })
}

/// Accepts while no vertex outside `finals` repeats.
pub fn cobuchi_monitor(arena: &Arena, finals: &VertexSet) -> Result<Monitor> {
    check_set(arena, finals)?;
    Ok(Monitor { alphabet: arena.len(), rule: Rule::CoBuchi(finals.clone()) })
}

/// Accepts while no odd priority `c` is seen more often than there are
/// vertices of priority `c`, without a smaller even priority in between.
pub fn parity_monitor(arena: &Arena, priority: &[u32]) -> Result<Monitor> {
    if priority.len() != arena.len() {
        return Err(Error::Invalid(format!("{} priorities for {} vertices", priority.len(), arena.len())));
    }
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for &p in priority.iter().filter(|&&p| p % 2 == 1) {
        *counts.entry(p).or_default() += 1;
    }
    Ok(Monitor {
        alphabet: arena.len(),
        rule: Rule::Parity { priority: priority.to_vec(), odd: counts.into_iter().collect() },
    })
}

/// Accepts while every open request is answered within
/// `|V| * r * 2^(r+1)` steps, `r` the number of pairs.
pub fn rr_monitor(arena: &Arena, pairs: &[(VertexSet, VertexSet)]) -> Result<Monitor> {
    for (request, response) in pairs {
        check_set(arena, request)?;
        check_set(arena, response)?;
    }
    let r = pairs.len() as u64;
    let bound =
        (arena.len() as u64).saturating_mul(r).saturating_mul(1u64.checked_shl(r as u32 + 1).unwrap_or(u64::MAX));
    Ok(Monitor { alphabet: arena.len(), rule: Rule::RequestResponse { pairs: pairs.to_vec(), bound } })
}

/// Accepts while Player 1's scores stay below 3.
pub fn muller_monitor(arena: &Arena, muller: &MullerCondition) -> Result<Monitor> {
    Ok(Monitor { alphabet: arena.len(), rule: Rule::Muller(Family::new(muller.f1(arena)?)) })
}

pub fn monitor_for(arena: &Arena, condition: &Condition) -> Result<Monitor> {
    match condition {
        Condition::Muller(m) => muller_monitor(arena, m),
        Condition::Safety(safe) => safety_monitor(arena, safe),
        Condition::Buchi(f) => buchi_monitor(arena, f),
        Condition::CoBuchi(f) => cobuchi_monitor(arena, f),
        Condition::Parity(p) => parity_monitor(arena, p),
        Condition::RequestResponse(pairs) => rr_monitor(arena, pairs),
    }
}

/// Reachable part of the arena times a monitor. All rejecting pairs are merged
/// into one unsafe sink.
#[derive(Clone, Debug)]
pub struct ProductGame {
    pub game: SafetyGame,
    /// Arena vertex and monitor state of every product vertex; `None` for the
    /// sink.
    pub pairs: Vec<Option<(Vertex, MonitorState)>>,
    /// Product vertex `(v, step(start, v))` for each arena vertex `v`.
    pub seeds: Vec<usize>,
    pub sink: Option<usize>,
}

pub fn product_game(arena: &Arena, monitor: &Monitor) -> Result<ProductGame> {
    if monitor.alphabet() < arena.len() {
        return Err(Error::Invalid("monitor alphabet does not cover the arena".to_string()));
    }
    let mut pairs: Vec<Option<(Vertex, MonitorState)>> = Vec::new();
    let mut index: HashMap<(Vertex, MonitorState), usize> = HashMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut sink = None;
    let mut queue = VecDeque::new();

    let mut visit = |v: Vertex,
                     q: MonitorState,
                     pairs: &mut Vec<Option<(Vertex, MonitorState)>>,
                     out: &mut Vec<Vec<usize>>,
                     queue: &mut VecDeque<usize>| {
        if monitor.is_reject(&q) {
            return *sink.get_or_insert_with(|| {
                pairs.push(None);
                out.push(Vec::new());
                pairs.len() - 1
            });
        }
        let key = (v, q);
        if let Some(&id) = index.get(&key) {
            return id;
        }
        let id = pairs.len();
        pairs.push(Some(key.clone()));
        out.push(Vec::new());
        index.insert(key, id);
        queue.push_back(id);
        id
    };

    let start = monitor.start();
    let mut seeds = Vec::with_capacity(arena.len());
    for v in arena.vertices() {
        let q = monitor.step(&start, v)?;
        seeds.push(visit(v, q, &mut pairs, &mut out, &mut queue));
    }
    while let Some(id) = queue.pop_front() {
        let (u, q) = pairs[id].clone().expect("sink is never queued");
        for &v in arena.successors(u) {
            let next = monitor.step(&q, v)?;
            let target = visit(v, next, &mut pairs, &mut out, &mut queue);
            out[id].push(target);
        }
    }
    let sink = pairs.iter().position(Option::is_none);

    let n = pairs.len();
    let mut names = Vec::with_capacity(n);
    let mut owners = Vec::with_capacity(n);
    for pair in &pairs {
        match pair {
            Some((v, q)) => {
                names.push(format!("({},{})", arena.name(*v), monitor.describe(arena, q)));
                owners.push(arena.owner(*v));
            }
            None => {
                names.push("sink".to_string());
                owners.push(Player::One);
            }
        }
    }
    let mut edges: Vec<(usize, usize)> =
        out.iter().enumerate().flat_map(|(s, ts)| ts.iter().map(move |&t| (s, t))).collect();
    if let Some(s) = sink {
        edges.push((s, s));
    }
    let product = Arena::with_names(names, owners, edges)?;
    let mut safe = VertexSet::full(n);
    if let Some(s) = sink {
        safe.remove(s);
    }
    Ok(ProductGame { game: SafetyGame { arena: product, safe }, pairs, seeds, sink })
}

#[derive(Clone, Debug)]
pub struct MonitorSolution {
    pub w0: VertexSet,
    pub w1: VertexSet,
    /// Player 0 strategy using the monitor states as memory; `reject` is the
    /// bottom state.
    pub strategy: MemoryStrategy,
    pub product: ProductGame,
}

/// Solves the game whose Player 0 objective is reducible to the monitor's
/// language, reading the winning region off the product's seeds.
pub fn solve_via_safety(arena: &Arena, monitor: &Monitor) -> Result<MonitorSolution> {
    let product = product_game(arena, monitor)?;
    let sol = solve_safety(&product.game);
    let w0 = VertexSet::from_iter(arena.len(), arena.vertices().filter(|&v| sol.w0.contains(product.seeds[v])));
    let w1 = w0.complement();

    let mut memory_of: HashMap<MonitorState, usize> = HashMap::new();
    let mut labels = Vec::new();
    for (_, q) in product.pairs.iter().flatten() {
        if !memory_of.contains_key(q) {
            memory_of.insert(q.clone(), labels.len());
            labels.push(monitor.describe(arena, q));
        }
    }
    let bottom = labels.len();
    labels.push(monitor.describe(arena, &MonitorState::Reject));
    let mem = |q: &MonitorState| memory_of.get(q).copied().unwrap_or(bottom);
    let class_memory = |id: usize| product.pairs[id].as_ref().map_or(bottom, |(_, q)| mem(q));

    let init = product.seeds.iter().map(|&s| class_memory(s)).collect();
    let mut update = BTreeMap::new();
    let mut next = BTreeMap::new();
    for (id, pair) in product.pairs.iter().enumerate() {
        let Some((v, q)) = pair else { continue };
        let m = mem(q);
        for &to in arena.successors(*v) {
            update.insert((m, to), mem(&monitor.step(q, to)?));
        }
        if arena.owner(*v) == Player::Zero {
            let choice = sol.strategy0[id]
                .and_then(|t| product.pairs[t].as_ref().map(|(to, _)| *to))
                .unwrap_or(arena.successors(*v)[0]);
            next.insert((*v, m), choice);
        }
    }
    for v in arena.vertices() {
        if arena.owner(v) == Player::Zero {
            next.insert((v, bottom), arena.successors(v)[0]);
        }
    }
    let strategy = MemoryStrategy {
        player: Player::Zero,
        memory: MemoryStructure { labels, bottom: Some(bottom), init, update },
        next,
    };
    Ok(MonitorSolution { w0, w1, strategy, product })
}

/// Builds the matching monitor and solves through the product game.
pub fn solve_condition(arena: &Arena, condition: &Condition) -> Result<MonitorSolution> {
    solve_via_safety(arena, &monitor_for(arena, condition)?)
}

/// Whether plays consistent with `solution.strategy` from its winning region
/// never reach the reject state.
pub fn reject_unreachable(arena: &Arena, solution: &MonitorSolution) -> Result<bool> {
    let bottom = solution.strategy.memory.bottom;
    let reach = reachable_product(arena, &solution.strategy, &solution.w0.to_vec())?;
    Ok(reach.iter().all(|&(_, m)| Some(m) != bottom))
}

/// Length up to which every lasso prefix must be checked before the product
/// state sequence is guaranteed to repeat.
pub fn pumping_bound(states: usize, stem: usize, cycle: usize) -> usize {
    stem + (states + 1) * cycle
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::enumerate_loops;
    use crate::arena::tests::two_sides;
    use crate::reduction::{build_safety_game, ReductionOptions};
    use crate::strategy::embedded_region;

    fn two_cycle(owner: Player) -> Arena {
        Arena::with_names(vec!["a".into(), "b".into()], vec![owner, owner], [(0, 1), (1, 0), (0, 0), (1, 1)]).unwrap()
    }

    #[test]
    fn runs_and_absorption() {
        let arena = two_cycle(Player::Zero);
        let m = buchi_monitor(&arena, &VertexSet::from_iter(2, [0])).unwrap();
        assert_eq!(m.run(&[]).unwrap(), m.start());
        assert!(m.accepts(&arena.word("ba").unwrap()).unwrap());
        assert!(!m.accepts(&arena.word("bb").unwrap()).unwrap());
        assert!(!m.accepts(&arena.word("bbaaa").unwrap()).unwrap());
        assert!(m.accepts(&arena.word("a").unwrap()).unwrap());
        assert_eq!(m.step(&m.start(), 2), Err(Error::VertexOutOfRange(2)));
        let all = buchi_monitor(&arena, &arena.all_vertices()).unwrap();
        assert!(all.accepts(&arena.word("abababaa").unwrap()).unwrap());
    }

    #[test]
    fn cobuchi_words() {
        let arena =
            Arena::with_names(vec!["x".into(), "y".into()], vec![Player::Zero; 2], [(0, 0), (0, 1), (1, 0), (1, 1)])
                .unwrap();
        let m = cobuchi_monitor(&arena, &VertexSet::from_iter(2, [1])).unwrap();
        assert!(!m.accepts(&arena.word("xyx").unwrap()).unwrap());
        assert!(m.accepts(&arena.word("xyy").unwrap()).unwrap());
        let all = cobuchi_monitor(&arena, &arena.all_vertices()).unwrap();
        assert!(all.accepts(&arena.word("xxyxy").unwrap()).unwrap());
    }

    #[test]
    fn parity_words() {
        let arena =
            Arena::with_names(vec!["u".into(), "v".into()], vec![Player::Zero; 2], [(0, 0), (0, 1), (1, 0)]).unwrap();
        let m = parity_monitor(&arena, &[1, 0]).unwrap();
        assert!(!m.accepts(&arena.word("uu").unwrap()).unwrap());
        assert!(m.accepts(&arena.word("uvu").unwrap()).unwrap());
        assert!(m.accepts(&arena.word("u").unwrap()).unwrap());
        let even = parity_monitor(&arena, &[2, 0]).unwrap();
        assert!(even.accepts(&arena.word("uuuuvuu").unwrap()).unwrap());
    }

    #[test]
    fn rr_bound_and_words() {
        let arena = Arena::new(vec![Player::Zero; 3], [(0, 0), (0, 1), (1, 2), (2, 0), (1, 1)]).unwrap();
        let pairs = vec![(VertexSet::from_iter(3, [0]), VertexSet::from_iter(3, [2]))];
        let m = rr_monitor(&arena, &pairs).unwrap();
        assert_eq!(m.bound(), Some(12));
        let mut open = vec![0];
        open.extend(std::iter::repeat_n(1, 12));
        assert!(m.accepts(&open).unwrap());
        open.push(1);
        assert!(!m.accepts(&open).unwrap());
        assert!(m.accepts(&[1; 40]).unwrap());
        assert!(m.accepts(&[0, 1, 2, 0, 1, 2, 0]).unwrap());
    }

    #[test]
    fn rr_simultaneous_request_and_response() {
        let arena = Arena::new(vec![Player::Zero; 2], [(0, 0), (0, 1), (1, 1)]).unwrap();
        let both = VertexSet::from_iter(2, [0]);
        let m = rr_monitor(&arena, &[(both.clone(), both)]).unwrap();
        assert_eq!(m.run(&[0, 0]).unwrap(), MonitorState::Ages(vec![Some(0)]));
    }

    #[test]
    fn muller_monitor_on_two_sides() {
        let (arena, muller) = two_sides();
        let m = muller_monitor(&arena, &muller).unwrap();
        assert!(!m.accepts(&arena.word("100101").unwrap()).unwrap());
        assert!(m.accepts(&arena.word("10012100").unwrap()).unwrap());
        let all = MullerCondition::new(enumerate_loops(&arena).unwrap());
        let trivial = muller_monitor(&arena, &all).unwrap();
        let product = product_game(&arena, &trivial).unwrap();
        assert_eq!(product.game.arena.len(), 3);
    }

    #[test]
    fn trivial_monitor_gives_the_arena() {
        let (arena, _) = two_sides();
        let m = safety_monitor(&arena, &arena.all_vertices()).unwrap();
        let product = product_game(&arena, &m).unwrap();
        assert_eq!(product.game.arena.len(), 3);
        assert_eq!(product.game.arena.edges().collect::<Vec<_>>(), arena.edges().collect::<Vec<_>>());
        assert_eq!(product.sink, None);
    }

    #[test]
    fn muller_product_matches_reduction() {
        let (arena, muller) = two_sides();
        let product = product_game(&arena, &muller_monitor(&arena, &muller).unwrap()).unwrap();
        let red = build_safety_game(&arena, &muller, Player::One, ReductionOptions::default()).unwrap();
        assert_eq!(product.game.arena.len(), red.len());
        assert_eq!(product.game.safe, red.game.safe);
        assert_eq!(product.seeds, red.embed);
        assert_eq!(product.game.arena.edges().collect::<Vec<_>>(), red.game.arena.edges().collect::<Vec<_>>());
        for c in 0..red.len() {
            assert_eq!(product.game.arena.owner(c), red.game.arena.owner(c));
        }

        let sol = solve_via_safety(&arena, &muller_monitor(&arena, &muller).unwrap()).unwrap();
        let reduced = solve_safety(&red.game);
        assert_eq!(sol.w0, embedded_region(&red, &reduced));
        assert_eq!(sol.w0, arena.all_vertices());
        assert!(reject_unreachable(&arena, &sol).unwrap());
    }

    #[test]
    fn small_games() {
        let arena = two_cycle(Player::Zero);
        let sol = solve_condition(&arena, &Condition::Buchi(VertexSet::from_iter(2, [0]))).unwrap();
        assert_eq!(sol.w0, arena.all_vertices());
        assert!(reject_unreachable(&arena, &sol).unwrap());

        let single = Arena::new(vec![Player::Zero], [(0, 0)]).unwrap();
        let sol = solve_condition(&single, &Condition::Parity(vec![1])).unwrap();
        assert!(sol.w0.is_empty());

        let m = safety_monitor(&arena, &arena.empty_set()).unwrap();
        assert!(solve_via_safety(&arena, &m).unwrap().w0.is_empty());
    }
}
