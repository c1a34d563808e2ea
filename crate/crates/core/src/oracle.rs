//! Reference implementations used to cross-check the solvers: a recursive
//! Muller solver, encodings of infinity-set conditions as Muller families,
//! naive score computations and a seeded random game generator.
//!
//! Nothing here depends on the scoring or reduction code.

use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arena::{enumerate_loops, Arena, Condition, MullerCondition, Player};
use crate::error::{Error, Result};
use crate::vertex_set::{Vertex, VertexSet};

pub const ORACLE_VERTEX_LIMIT: usize = 16;

/// Attractor of `player` to `target` inside the subarena `within`.
fn attract(arena: &Arena, within: &VertexSet, player: Player, target: &VertexSet) -> VertexSet {
    let mut region = target.intersection(within);
    loop {
        let grown: Vec<Vertex> = within
            .iter()
            .filter(|&v| !region.contains(v))
            .filter(|&v| {
                let mut succ = arena.successors(v).iter().filter(|&&s| within.contains(s));
                if arena.owner(v) == player {
                    succ.any(|&s| region.contains(s))
                } else {
                    succ.all(|&s| region.contains(s))
                }
            })
            .collect();
        if grown.is_empty() {
            return region;
        }
        for v in grown {
            region.insert(v);
        }
    }
}

fn pick(player: Player, w0: VertexSet, w1: VertexSet) -> [VertexSet; 2] {
    match player {
        Player::Zero => [w0, w1],
        Player::One => [w1, w0],
    }
}

fn solve_sub(arena: &Arena, muller: &MullerCondition, sub: &VertexSet) -> [VertexSet; 2] {
    let n = arena.len();
    if sub.is_empty() {
        return [VertexSet::empty(n), VertexSet::empty(n)];
    }
    let favoured = if muller.player0_wins(sub) { Player::Zero } else { Player::One };
    let other = favoured.opponent();
    for v in sub.iter() {
        let removed = attract(arena, sub, favoured, &VertexSet::singleton(n, v));
        let rest = sub.difference(&removed);
        let inner = solve_sub(arena, muller, &rest);
        let lost = &inner[other.index()];
        if !lost.is_empty() {
            let gone = attract(arena, sub, other, lost);
            let outer = solve_sub(arena, muller, &sub.difference(&gone));
            let mut theirs = outer[other.index()].clone();
            theirs.union_with(&gone);
            return pick(favoured, outer[favoured.index()].clone(), theirs);
        }
    }
    pick(favoured, sub.clone(), VertexSet::empty(n))
}

/// Winning regions `(w0, w1)` of a Muller game by the classical recursion on
/// subarenas.
pub fn zielonka(arena: &Arena, muller: &MullerCondition) -> Result<(VertexSet, VertexSet)> {
    if arena.len() > ORACLE_VERTEX_LIMIT {
        return Err(Error::TooManyVertices { limit: ORACLE_VERTEX_LIMIT, actual: arena.len() });
    }
    let [w0, w1] = solve_sub(arena, muller, &arena.all_vertices());
    Ok((w0, w1))
}

/// The Muller family equivalent to an infinity-set condition.
pub fn encode_as_muller(arena: &Arena, condition: &Condition) -> Result<MullerCondition> {
    let keep: Box<dyn Fn(&VertexSet) -> bool> = match condition {
        Condition::Muller(m) => return Ok(m.clone()),
        Condition::Buchi(f) => Box::new(move |l| l.intersects(f)),
        Condition::CoBuchi(f) => Box::new(move |l| l.is_subset(f)),
        Condition::Parity(p) => Box::new(move |l| l.iter().map(|v| p[v]).min().is_some_and(|c| c % 2 == 0)),
        Condition::Safety(_) | Condition::RequestResponse(_) => return Err(Error::NotInfinitySetDetermined),
    };
    Ok(MullerCondition::new(enumerate_loops(arena)?.into_iter().filter(|l| keep(l)).collect()))
}

/// Score and accumulator straight from the definition: complete traversals of
/// `set` since the last vertex outside it, and what the unfinished one has
/// collected so far.
pub fn naive_score(set: &VertexSet, word: &[Vertex]) -> (u32, VertexSet) {
    let start = word.iter().rposition(|&v| !set.contains(v)).map_or(0, |i| i + 1);
    let mut score = 0;
    let mut open = VertexSet::empty(set.universe());
    for &v in &word[start..] {
        open.insert(v);
        if open == *set {
            score += 1;
            open = VertexSet::empty(set.universe());
        }
    }
    (score, open)
}

pub fn naive_maxscore(family: &[VertexSet], word: &[Vertex]) -> u32 {
    (1..=word.len()).flat_map(|end| family.iter().map(move |f| naive_score(f, &word[..end]).0)).max().unwrap_or(0)
}

/// Distinct vertices of `word` ordered by their last occurrence.
pub fn naive_lar(word: &[Vertex]) -> Vec<Vertex> {
    let mut seen: Vec<(usize, Vertex)> = Vec::new();
    for (i, &v) in word.iter().enumerate() {
        seen.retain(|&(_, u)| u != v);
        seen.push((i, v));
    }
    seen.into_iter().map(|(_, v)| v).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionKind {
    Muller,
    Safety,
    Buchi,
    CoBuchi,
    Parity,
    RequestResponse,
}

impl ConditionKind {
    pub const ALL: [ConditionKind; 6] = [
        ConditionKind::Muller,
        ConditionKind::Safety,
        ConditionKind::Buchi,
        ConditionKind::CoBuchi,
        ConditionKind::Parity,
        ConditionKind::RequestResponse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::Muller => "muller",
            ConditionKind::Safety => "safety",
            ConditionKind::Buchi => "buchi",
            ConditionKind::CoBuchi => "cobuchi",
            ConditionKind::Parity => "parity",
            ConditionKind::RequestResponse => "rr",
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConditionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown condition kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub vertices: usize,
    /// Probability of each ordered pair, self-loops included, being an edge.
    pub density: f64,
    /// Probability of a vertex belonging to Player 0.
    pub owner_bias: f64,
    pub seed: u64,
    pub kind: ConditionKind,
}

impl GeneratorConfig {
    pub fn new(vertices: usize, seed: u64, kind: ConditionKind) -> Self {
        Self { vertices, density: 0.4, owner_bias: 0.5, seed, kind }
    }
}

/// Seeded random game. Vertices left without successors get a self-loop.
pub fn random_game(cfg: &GeneratorConfig) -> Result<(Arena, Condition)> {
    let n = cfg.vertices;
    if n == 0 || n > ORACLE_VERTEX_LIMIT {
        return Err(Error::Invalid(format!("vertex count {n} outside 1..={ORACLE_VERTEX_LIMIT}")));
    }
    for (name, p) in [("density", cfg.density), ("owner bias", cfg.owner_bias)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Invalid(format!("{name} {p} outside [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let owners: Vec<Player> =
        (0..n).map(|_| if rng.random_bool(cfg.owner_bias) { Player::Zero } else { Player::One }).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        let before = edges.len();
        for v in 0..n {
            if rng.random_bool(cfg.density) {
                edges.push((u, v));
            }
        }
        if edges.len() == before {
            edges.push((u, u));
        }
    }
    let arena = Arena::new(owners, edges)?;
    let subset = |rng: &mut ChaCha8Rng, p: f64| VertexSet::from_iter(n, (0..n).filter(|_| rng.random_bool(p)));
    let condition = match cfg.kind {
        ConditionKind::Muller => {
            let loops = enumerate_loops(&arena)?;
            let f0 = loops.into_iter().filter(|_| rng.random_bool(0.5)).collect();
            Condition::Muller(MullerCondition::new(f0))
        }
        ConditionKind::Safety => Condition::Safety(subset(&mut rng, 0.7)),
        ConditionKind::Buchi => Condition::Buchi(subset(&mut rng, 0.5)),
        ConditionKind::CoBuchi => Condition::CoBuchi(subset(&mut rng, 0.5)),
        ConditionKind::Parity => Condition::Parity((0..n).map(|_| rng.random_range(0..4)).collect()),
        ConditionKind::RequestResponse => {
            let r = rng.random_range(1..=2);
            Condition::RequestResponse((0..r).map(|_| (subset(&mut rng, 0.3), subset(&mut rng, 0.3))).collect())
        }
    };
    Ok((arena, condition))
}
