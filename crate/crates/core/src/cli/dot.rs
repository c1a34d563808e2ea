//! Graphviz output. Player 0 vertices are circles, Player 1 vertices boxes;
//! safe vertices get a double border.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::arena::{Arena, Player};
use crate::error::Result;
use crate::reduction::SafetyReduction;
use crate::strategy::{Memory, MultiStrategy};
use crate::vertex_set::{Vertex, VertexSet};

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

fn node(out: &mut String, id: usize, label: &str, owner: Player, safe: bool) {
    let shape = match owner {
        Player::Zero => "circle",
        Player::One => "box",
    };
    let peripheries = if safe { 2 } else { 1 };
    writeln!(out, "  n{id} [label=\"{}\", shape={shape}, peripheries={peripheries}];", escape(label)).unwrap();
}

/// Arena as a digraph; `safe` marks the double-bordered vertices.
pub fn arena_dot(arena: &Arena, safe: Option<&VertexSet>) -> String {
    let mut out = String::from("digraph G {\n");
    for v in arena.vertices() {
        node(&mut out, v, arena.name(v), arena.owner(v), safe.is_some_and(|s| s.contains(v)));
    }
    for (u, v) in arena.edges() {
        writeln!(out, "  n{u} -> n{v};").unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn reduction_dot(red: &SafetyReduction) -> String {
    arena_dot(&red.game.arena, Some(&red.game.safe))
}

/// The given `(vertex, memory)` pairs and the moves `strat` allows between
/// them. Pairs whose memory is not the bottom state count as safe.
pub fn product_dot(arena: &Arena, strat: &impl MultiStrategy, pairs: &BTreeSet<(Vertex, Memory)>) -> Result<String> {
    let memory = strat.memory();
    let ids: Vec<(Vertex, Memory)> = pairs.iter().copied().collect();
    let mut out = String::from("digraph G {\n");
    for (id, &(v, m)) in ids.iter().enumerate() {
        let label = format!("{},{}", arena.name(v), memory.labels[m]);
        node(&mut out, id, &label, arena.owner(v), Some(m) != memory.bottom);
    }
    for (id, &(v, m)) in ids.iter().enumerate() {
        let moves = if arena.owner(v) == strat.player() { strat.allowed(v, m)? } else { arena.successors(v) };
        for &to in moves {
            let target = (to, memory.update(m, to)?);
            if let Ok(t) = ids.binary_search(&target) {
                writeln!(out, "  n{id} -> n{t};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
