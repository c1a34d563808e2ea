//! Line-oriented text formats for games and strategies.
//!
//! Game files:
//!
//! ```text
//! # comment
//! vertex <id> <0|1>
//! edge <id> <id>
//! condition muller|safety|buchi|cobuchi|parity|rr
//! f0 { <id> ... }            # muller
//! safe <id>                  # safety
//! final <id>                 # buchi, cobuchi
//! priority <id> <n>          # parity
//! pair { <id> ... } { <id> ... }   # rr: requests, then responses
//! ```
//!
//! Strategy files:
//!
//! ```text
//! player <0|1>
//! states <m> ...
//! bottom <m>                 # optional: target of every missing update
//! init <id> <m>
//! update <m> <id> <m>
//! move <id> <m> { <id> ... }
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write;

use crate::arena::{validate, Arena, Condition, MullerCondition, Player};
use crate::error::{Error, Result};
use crate::strategy::{MemoryStructure, MultiStrategy, PermissiveStrategy};
use crate::vertex_set::{Vertex, VertexSet};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Strips the comment and splits into tokens.
fn tokens(line: &str) -> Vec<&str> {
    line.split('#').next().unwrap_or("").split_whitespace().collect()
}

fn parse_player(line: usize, token: &str) -> Result<Player> {
    token
        .parse::<usize>()
        .ok()
        .and_then(Player::from_index)
        .ok_or_else(|| parse_err(line, format!("expected player 0 or 1, got `{token}`")))
}

/// Reads `{ a b c }` groups from the token stream.
fn braced_groups<'a>(line: usize, mut rest: &[&'a str]) -> Result<Vec<Vec<&'a str>>> {
    let mut groups = Vec::new();
    while let Some((&open, tail)) = rest.split_first() {
        if open != "{" {
            return Err(parse_err(line, format!("expected `{{`, got `{open}`")));
        }
        let close = tail.iter().position(|&t| t == "}").ok_or_else(|| parse_err(line, "unclosed `{`"))?;
        groups.push(tail[..close].to_vec());
        rest = &tail[close + 1..];
    }
    Ok(groups)
}

enum Block {
    Muller(Vec<Vec<Vertex>>),
    Safety(Vec<Vertex>),
    Buchi(Vec<Vertex>),
    CoBuchi(Vec<Vertex>),
    Parity(Vec<Option<u32>>),
    Rr(Vec<(Vec<Vertex>, Vec<Vertex>)>),
}

/// Parses and validates a game file.
pub fn parse_game(text: &str) -> Result<(Arena, Condition)> {
    let mut names: Vec<String> = Vec::new();
    let mut owners = Vec::new();
    let mut index: HashMap<String, Vertex> = HashMap::new();
    let mut edges = Vec::new();
    let mut block: Option<Block> = None;
    let mut lines = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        lines = line;
        let toks = tokens(raw);
        let Some((&directive, args)) = toks.split_first() else { continue };
        let lookup =
            |name: &str| index.get(name).copied().ok_or_else(|| parse_err(line, format!("undeclared vertex `{name}`")));
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(parse_err(line, format!("`{directive}` takes {n} arguments")))
            }
        };
        let wrong_block = || parse_err(line, format!("`{directive}` does not fit the current condition"));
        match directive {
            "vertex" => {
                arity(2)?;
                if block.is_some() {
                    return Err(parse_err(line, "vertices must be declared before the condition"));
                }
                if index.contains_key(args[0]) {
                    return Err(parse_err(line, format!("duplicate vertex `{}`", args[0])));
                }
                index.insert(args[0].to_string(), names.len());
                names.push(args[0].to_string());
                owners.push(parse_player(line, args[1])?);
            }
            "edge" => {
                arity(2)?;
                edges.push((lookup(args[0])?, lookup(args[1])?));
            }
            "condition" => {
                arity(1)?;
                if block.is_some() {
                    return Err(parse_err(line, "second condition"));
                }
                block = Some(match args[0] {
                    "muller" => Block::Muller(Vec::new()),
                    "safety" => Block::Safety(Vec::new()),
                    "buchi" => Block::Buchi(Vec::new()),
                    "cobuchi" => Block::CoBuchi(Vec::new()),
                    "parity" => Block::Parity(vec![None; names.len()]),
                    "rr" => Block::Rr(Vec::new()),
                    other => return Err(parse_err(line, format!("unknown condition `{other}`"))),
                });
            }
            "f0" => {
                let Some(Block::Muller(sets)) = &mut block else { return Err(wrong_block()) };
                let groups = braced_groups(line, args)?;
                if groups.len() != 1 {
                    return Err(parse_err(line, "`f0` takes one set"));
                }
                sets.push(groups[0].iter().map(|t| lookup(t)).collect::<Result<_>>()?);
            }
            "safe" | "final" => {
                arity(1)?;
                let v = lookup(args[0])?;
                match (&mut block, directive) {
                    (Some(Block::Safety(vs)), "safe") => vs.push(v),
                    (Some(Block::Buchi(vs) | Block::CoBuchi(vs)), "final") => vs.push(v),
                    _ => return Err(wrong_block()),
                }
            }
            "priority" => {
                arity(2)?;
                let Some(Block::Parity(ps)) = &mut block else { return Err(wrong_block()) };
                let v = lookup(args[0])?;
                let p = args[1].parse().map_err(|_| parse_err(line, format!("bad priority `{}`", args[1])))?;
                if ps[v].replace(p).is_some() {
                    return Err(parse_err(line, format!("second priority for `{}`", args[0])));
                }
            }
            "pair" => {
                let Some(Block::Rr(pairs)) = &mut block else { return Err(wrong_block()) };
                let groups = braced_groups(line, args)?;
                if groups.len() != 2 {
                    return Err(parse_err(line, "`pair` takes a request set and a response set"));
                }
                let ids = |g: &[&str]| g.iter().map(|t| lookup(t)).collect::<Result<Vec<_>>>();
                pairs.push((ids(&groups[0])?, ids(&groups[1])?));
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }

    let block = block.ok_or_else(|| parse_err(lines, "missing condition"))?;
    let n = names.len();
    let set = |vs: &[Vertex]| VertexSet::from_iter(n, vs.iter().copied());
    let condition = match block {
        Block::Muller(sets) => Condition::Muller(MullerCondition::new(sets.iter().map(|s| set(s)).collect())),
        Block::Safety(vs) => Condition::Safety(set(&vs)),
        Block::Buchi(vs) => Condition::Buchi(set(&vs)),
        Block::CoBuchi(vs) => Condition::CoBuchi(set(&vs)),
        Block::Parity(ps) => Condition::Parity(
            ps.iter()
                .enumerate()
                .map(|(v, p)| p.ok_or_else(|| parse_err(lines, format!("missing priority for `{}`", names[v]))))
                .collect::<Result<_>>()?,
        ),
        Block::Rr(pairs) => Condition::RequestResponse(pairs.iter().map(|(q, p)| (set(q), set(p))).collect()),
    };
    let arena = Arena::with_names(names, owners, edges)?;
    let violations = validate(&arena, &condition);
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(|v| v.describe(&arena)).collect();
        return Err(Error::Invalid(text.join("; ")));
    }
    Ok((arena, condition))
}

fn ids(arena: &Arena, set: &VertexSet) -> String {
    set.iter().map(|v| arena.name(v)).collect::<Vec<_>>().join(" ")
}

fn braced(arena: &Arena, set: &VertexSet) -> String {
    if set.is_empty() {
        "{ }".to_string()
    } else {
        format!("{{ {} }}", ids(arena, set))
    }
}

pub fn serialize_game(arena: &Arena, condition: &Condition) -> String {
    let mut out = String::new();
    for v in arena.vertices() {
        writeln!(out, "vertex {} {}", arena.name(v), arena.owner(v).index()).unwrap();
    }
    for (u, v) in arena.edges() {
        writeln!(out, "edge {} {}", arena.name(u), arena.name(v)).unwrap();
    }
    writeln!(out, "condition {}", condition.kind()).unwrap();
    match condition {
        Condition::Muller(m) => {
            for set in m.f0() {
                writeln!(out, "f0 {}", braced(arena, set)).unwrap();
            }
        }
        Condition::Safety(safe) => {
            for v in safe.iter() {
                writeln!(out, "safe {}", arena.name(v)).unwrap();
            }
        }
        Condition::Buchi(f) | Condition::CoBuchi(f) => {
            for v in f.iter() {
                writeln!(out, "final {}", arena.name(v)).unwrap();
            }
        }
        Condition::Parity(ps) => {
            for (v, p) in ps.iter().enumerate() {
                writeln!(out, "priority {} {p}", arena.name(v)).unwrap();
            }
        }
        Condition::RequestResponse(pairs) => {
            for (request, response) in pairs {
                writeln!(out, "pair {} {}", braced(arena, request), braced(arena, response)).unwrap();
            }
        }
    }
    out
}

/// Memory labels usable as single tokens; falls back to `m<i>` when the
/// originals contain whitespace, braces or repeat.
fn token_labels(labels: &[String]) -> Vec<String> {
    let distinct: HashSet<&String> = labels.iter().collect();
    let usable = distinct.len() == labels.len()
        && labels
            .iter()
            .all(|l| !l.is_empty() && !l.contains(|c: char| c.is_whitespace() || c == '{' || c == '}' || c == '#'));
    if usable {
        labels.to_vec()
    } else {
        (0..labels.len()).map(|i| format!("m{i}")).collect()
    }
}

pub fn serialize_strategy(arena: &Arena, strat: &impl MultiStrategy) -> String {
    let memory = strat.memory();
    let labels = token_labels(&memory.labels);
    let mut out = String::new();
    writeln!(out, "player {}", strat.player().index()).unwrap();
    writeln!(out, "states {}", labels.join(" ")).unwrap();
    if let Some(b) = memory.bottom {
        writeln!(out, "bottom {}", labels[b]).unwrap();
    }
    for v in arena.vertices() {
        writeln!(out, "init {} {}", arena.name(v), labels[memory.init(v)]).unwrap();
    }
    for (&(m, v), &target) in &memory.update {
        writeln!(out, "update {} {} {}", labels[m], arena.name(v), labels[target]).unwrap();
    }
    for (m, label) in labels.iter().enumerate() {
        for v in arena.vertices() {
            if let Some(moves) = strat.moves(v, m) {
                let names: Vec<&str> = moves.iter().map(|&to| arena.name(to)).collect();
                writeln!(out, "move {} {label} {{ {} }}", arena.name(v), names.join(" ")).unwrap();
            }
        }
    }
    out
}

/// Parses a strategy file against `arena`; moves are checked to follow edges.
pub fn parse_strategy(arena: &Arena, text: &str) -> Result<PermissiveStrategy> {
    let mut player = None;
    let mut labels: Vec<String> = Vec::new();
    let mut memory_of: HashMap<String, usize> = HashMap::new();
    let mut bottom = None;
    let mut init: Vec<Option<usize>> = vec![None; arena.len()];
    let mut update = BTreeMap::new();
    let mut next: BTreeMap<(Vertex, usize), Vec<Vertex>> = BTreeMap::new();
    let mut lines = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        lines = line;
        let toks = tokens(raw);
        let Some((&directive, args)) = toks.split_first() else { continue };
        let vertex = |name: &str| arena.vertex(name).ok_or_else(|| parse_err(line, format!("unknown vertex `{name}`")));
        let state = |name: &str| {
            memory_of.get(name).copied().ok_or_else(|| parse_err(line, format!("unknown memory state `{name}`")))
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(parse_err(line, format!("`{directive}` takes {n} arguments")))
            }
        };
        match directive {
            "player" => {
                arity(1)?;
                player = Some(parse_player(line, args[0])?);
            }
            "states" => {
                if !labels.is_empty() {
                    return Err(parse_err(line, "states declared twice"));
                }
                for &label in args {
                    if memory_of.insert(label.to_string(), labels.len()).is_some() {
                        return Err(parse_err(line, format!("duplicate memory state `{label}`")));
                    }
                    labels.push(label.to_string());
                }
            }
            "bottom" => {
                arity(1)?;
                bottom = Some(state(args[0])?);
            }
            "init" => {
                arity(2)?;
                init[vertex(args[0])?] = Some(state(args[1])?);
            }
            "update" => {
                arity(3)?;
                update.insert((state(args[0])?, vertex(args[1])?), state(args[2])?);
            }
            "move" => {
                if args.len() < 2 {
                    return Err(parse_err(line, "`move` takes a vertex, a memory state and a set"));
                }
                let (v, m) = (vertex(args[0])?, state(args[1])?);
                let groups = braced_groups(line, &args[2..])?;
                if groups.len() != 1 || groups[0].is_empty() {
                    return Err(parse_err(line, "`move` takes one non-empty set"));
                }
                let mut moves = groups[0].iter().map(|t| vertex(t)).collect::<Result<Vec<_>>>()?;
                moves.sort_unstable();
                moves.dedup();
                if let Some(&to) = moves.iter().find(|&&to| !arena.has_edge(v, to)) {
                    return Err(parse_err(line, format!("no edge from `{}` to `{}`", args[0], arena.name(to))));
                }
                next.insert((v, m), moves);
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }

    let player = player.ok_or_else(|| parse_err(lines, "missing player"))?;
    if labels.is_empty() {
        return Err(parse_err(lines, "missing states"));
    }
    let init = init
        .into_iter()
        .enumerate()
        .map(|(v, m)| {
            m.or(bottom).ok_or_else(|| parse_err(lines, format!("missing init for vertex `{}`", arena.name(v))))
        })
        .collect::<Result<_>>()?;
    Ok(PermissiveStrategy { player, memory: MemoryStructure { labels, bottom, init, update }, next })
}
