//! Attractors and safety games.

use std::collections::VecDeque;

use crate::arena::{Arena, Player};
use crate::reduction::SafetyGame;
use crate::vertex_set::{Vertex, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attractor {
    pub region: VertexSet,
    /// For the attracting player's vertices outside the target: a successor
    /// that is strictly closer to the target.
    pub strategy: Vec<Option<Vertex>>,
}

/// Least set from which `player` forces a visit to `target`, computed with
/// out-degree counters in `O(|V| + |E|)`.
pub fn attractor(arena: &Arena, player: Player, target: &VertexSet) -> Attractor {
    let n = arena.len();
    let mut region = target.clone();
    let mut strategy = vec![None; n];
    let mut remaining: Vec<usize> = arena.vertices().map(|v| arena.successors(v).len()).collect();
    let mut queue: VecDeque<Vertex> = target.iter().collect();
    while let Some(u) = queue.pop_front() {
        for &p in arena.predecessors(u) {
            if region.contains(p) {
                continue;
            }
            if arena.owner(p) == player {
                strategy[p] = Some(u);
            } else {
                remaining[p] -= 1;
                if remaining[p] > 0 {
                    continue;
                }
            }
            region.insert(p);
            queue.push_back(p);
        }
    }
    Attractor { region, strategy }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafetySolution {
    pub w0: VertexSet,
    pub w1: VertexSet,
    /// Lowest-index successor inside `w0` for Player 0's vertices in `w0`.
    pub strategy0: Vec<Option<Vertex>>,
    /// Attractor strategy for Player 1 on `w1`.
    pub strategy1: Vec<Option<Vertex>>,
    /// Every successor inside `w0`, for each vertex in `w0`.
    pub allowed: Vec<Vec<Vertex>>,
}

pub fn solve_safety(game: &SafetyGame) -> SafetySolution {
    let arena = &game.arena;
    let unsafe_set = game.safe.complement();
    let Attractor { region: w1, strategy: strategy1 } = attractor(arena, Player::One, &unsafe_set);
    let w0 = w1.complement();
    let allowed: Vec<Vec<Vertex>> = arena
        .vertices()
        .map(|v| {
            if w0.contains(v) {
                arena.successors(v).iter().copied().filter(|&s| w0.contains(s)).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let strategy0 = arena
        .vertices()
        .map(|v| (arena.owner(v) == Player::Zero).then(|| allowed[v].first().copied()).flatten())
        .collect();
    SafetySolution { w0, w1, strategy0, strategy1, allowed }
}
