use proptest::prelude::*;

use muller_safety::arena::{winner, Arena, Condition, Lasso, MullerCondition, Player};
use muller_safety::cli::format::{parse_game, serialize_game};
use muller_safety::oracle::{
    naive_lar, naive_maxscore, naive_score, random_game, zielonka, ConditionKind, GeneratorConfig,
};
use muller_safety::reduction::{build_safety_game, ReductionOptions, SafetyGame};
use muller_safety::safety_framework::{monitor_for, product_game};
use muller_safety::safety_solver::solve_safety;
use muller_safety::scoring::{maxscore, score_word, sheet_le, sheet_of, Family, Lar};
use muller_safety::strategy::solve_muller;
use muller_safety::vertex_set::{Vertex, VertexSet};

fn game(kind: ConditionKind, vertices: usize, seed: u64) -> (Arena, Condition) {
    random_game(&GeneratorConfig::new(vertices, seed, kind)).unwrap()
}

fn any_kind() -> impl Strategy<Value = ConditionKind> {
    prop::sample::select(ConditionKind::ALL.to_vec())
}

/// A lasso obtained by walking from `start`, taking successor `choice % deg`
/// at each step, until a vertex repeats.
fn walk_lasso(arena: &Arena, start: Vertex, choices: &[usize]) -> Lasso {
    let mut path = vec![start];
    let mut i = 0;
    loop {
        let last = *path.last().unwrap();
        let succ = arena.successors(last);
        let next = succ[choices.get(i).copied().unwrap_or(0) % succ.len()];
        i += 1;
        if let Some(pos) = path.iter().position(|&v| v == next) {
            return Lasso::new(path[..pos].to_vec(), path[pos..].to_vec());
        }
        path.push(next);
    }
}

/// The path from `start` that takes successor `choice % deg` at each step.
fn walk(arena: &Arena, start: Vertex, choices: &[usize]) -> Vec<Vertex> {
    let mut word = vec![start];
    for &c in choices {
        let succ = arena.successors(*word.last().unwrap());
        word.push(succ[c % succ.len()]);
    }
    word
}

fn word_over(n: usize, max_len: usize) -> impl Strategy<Value = Vec<Vertex>> {
    prop::collection::vec(0..n, 1..max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn winner_ignores_pumping_and_rotation(
        kind in any_kind(),
        n in 2usize..6,
        seed in any::<u64>(),
        start in 0usize..6,
        choices in prop::collection::vec(any::<usize>(), 0..12),
        pump in 1usize..4,
    ) {
        let (arena, condition) = game(kind, n, seed);
        let lasso = walk_lasso(&arena, start % n, &choices);
        let base = winner(&arena, &condition, &lasso).unwrap();
        let pumped = Lasso::new(lasso.stem.clone(), lasso.cycle.repeat(pump));
        prop_assert_eq!(winner(&arena, &condition, &pumped).unwrap(), base);
        let mut stem = lasso.stem.clone();
        stem.push(lasso.cycle[0]);
        let mut cycle = lasso.cycle[1..].to_vec();
        cycle.push(lasso.cycle[0]);
        let rotated = Lasso::new(stem, cycle);
        prop_assert_eq!(winner(&arena, &condition, &rotated).unwrap(), base);
    }

    #[test]
    fn incremental_scores_match_definition(mask in 1u64..32, word in word_over(5, 30)) {
        let set = VertexSet::from_mask(5, mask);
        let state = score_word(&set, &word).unwrap();
        prop_assert_eq!((state.score, state.acc.clone()), naive_score(&set, &word));
        prop_assert!(state.acc.len() < set.len());
    }

    #[test]
    fn maxscore_matches_definition(masks in prop::collection::vec(1u64..16, 0..5), word in word_over(4, 25)) {
        let family: Vec<VertexSet> = masks.iter().map(|&m| VertexSet::from_mask(4, m)).collect();
        prop_assert_eq!(maxscore(&family, &word).unwrap(), naive_maxscore(&family, &word));
    }

    #[test]
    fn lar_matches_definition(word in word_over(6, 30)) {
        let lar = Lar::from_word(&word).unwrap();
        prop_assert_eq!(lar.as_slice().to_vec(), naive_lar(&word));
        prop_assert_eq!(*lar.as_slice().last().unwrap(), *word.last().unwrap());
    }

    /// Prefixes with equal last vertex and equal (uncapped) scores and
    /// accumulators stay equal under any common extension.
    #[test]
    fn equal_score_states_are_a_congruence(
        masks in prop::collection::vec(1u64..8, 1..4),
        u in word_over(3, 10),
        v in word_over(3, 10),
        w in prop::collection::vec(0usize..3, 0..10),
    ) {
        let family: Vec<VertexSet> = masks.iter().map(|&m| VertexSet::from_mask(3, m)).collect();
        let states = |word: &[Vertex]| -> Vec<_> { family.iter().map(|f| score_word(f, word).unwrap()).collect() };
        if u.last() == v.last() && states(&u) == states(&v) {
            let (mut uw, mut vw) = (u.clone(), v.clone());
            uw.extend(&w);
            vw.extend(&w);
            prop_assert_eq!(states(&uw), states(&vw));
        }
    }

    #[test]
    fn sheet_order_is_a_preorder(
        masks in prop::collection::vec(1u64..8, 1..4),
        a in word_over(3, 8),
        b in word_over(3, 8),
        c in word_over(3, 8),
    ) {
        let family = Family::new(masks.iter().map(|&m| VertexSet::from_mask(3, m)).collect());
        let sheet = |w: &[Vertex]| sheet_of(&family, w).ok();
        if let (Some(x), Some(y), Some(z)) = (sheet(&a), sheet(&b), sheet(&c)) {
            prop_assert!(sheet_le(&x, &x));
            if sheet_le(&x, &y) && sheet_le(&y, &z) {
                prop_assert!(sheet_le(&x, &z));
            }
        }
    }

    #[test]
    fn safety_regions_partition_and_grow_with_the_safe_set(
        n in 2usize..8,
        seed in any::<u64>(),
        safe_mask in any::<u64>(),
        extra_mask in any::<u64>(),
    ) {
        let (arena, _) = game(ConditionKind::Safety, n, seed);
        let safe = VertexSet::from_mask(n, safe_mask & ((1 << n) - 1));
        let sol = solve_safety(&SafetyGame { arena: arena.clone(), safe: safe.clone() });
        prop_assert!(!sol.w0.intersects(&sol.w1));
        prop_assert_eq!(sol.w0.union(&sol.w1), arena.all_vertices());
        prop_assert!(sol.w0.is_subset(&safe));
        for v in sol.w0.iter() {
            let inside = arena.successors(v).iter().filter(|&&s| sol.w0.contains(s)).count();
            match arena.owner(v) {
                Player::Zero => prop_assert!(inside > 0),
                Player::One => prop_assert_eq!(inside, arena.successors(v).len()),
            }
        }
        let larger = safe.union(&VertexSet::from_mask(n, extra_mask & ((1 << n) - 1)));
        let bigger = solve_safety(&SafetyGame { arena, safe: larger });
        prop_assert!(sol.w0.is_subset(&bigger.w0));
    }

    #[test]
    fn monitors_are_prefix_closed(
        kind in any_kind(),
        n in 2usize..6,
        seed in any::<u64>(),
        start in 0usize..6,
        choices in prop::collection::vec(any::<usize>(), 0..40),
    ) {
        let (arena, condition) = game(kind, n, seed);
        let monitor = monitor_for(&arena, &condition).unwrap();
        let word = walk(&arena, start % n, &choices);
        if monitor.accepts(&word).unwrap() {
            for end in 0..word.len() {
                prop_assert!(monitor.accepts(&word[..end]).unwrap());
            }
        }
    }

    /// A lasso whose prefixes stay accepted long enough for the product state
    /// to repeat is won by Player 0.
    #[test]
    fn accepted_lassos_are_won(
        kind in any_kind(),
        n in 2usize..5,
        seed in any::<u64>(),
        start in 0usize..5,
        choices in prop::collection::vec(any::<usize>(), 0..10),
    ) {
        let (arena, condition) = game(kind, n, seed);
        let monitor = monitor_for(&arena, &condition).unwrap();
        let lasso = walk_lasso(&arena, start % n, &choices);
        let states = product_game(&arena, &monitor).unwrap().game.arena.len();
        let word = lasso.unfold(states + 1);
        if monitor.accepts(&word).unwrap() {
            prop_assert_eq!(winner(&arena, &condition, &lasso).unwrap(), Player::Zero);
        }
    }

    #[test]
    fn game_files_round_trip(kind in any_kind(), n in 1usize..7, seed in any::<u64>()) {
        let (arena, condition) = game(kind, n, seed);
        let text = serialize_game(&arena, &condition);
        let parsed = parse_game(&text).unwrap();
        prop_assert_eq!(&parsed, &(arena, condition));
        prop_assert_eq!(serialize_game(&parsed.0, &parsed.1), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn muller_solver_matches_reference(n in 1usize..6, seed in any::<u64>()) {
        let (arena, condition) = game(ConditionKind::Muller, n, seed);
        let Condition::Muller(muller) = condition else { unreachable!() };
        let sol = solve_muller(&arena, &muller, ReductionOptions::default()).unwrap();
        prop_assert_eq!((sol.w0, sol.w1), zielonka(&arena, &muller).unwrap());
    }

    #[test]
    fn threshold_two_is_sound(n in 1usize..6, seed in any::<u64>()) {
        let (arena, condition) = game(ConditionKind::Muller, n, seed);
        let Condition::Muller(muller) = condition else { unreachable!() };
        let (z0, z1) = zielonka(&arena, &muller).unwrap();
        let two = ReductionOptions { threshold: 2, ..ReductionOptions::default() };
        for (player, region) in [(Player::One, &z0), (Player::Zero, &z1)] {
            let red = build_safety_game(&arena, &muller, player, two).unwrap();
            let sol = solve_safety(&red.game);
            for v in arena.vertices() {
                if sol.w0.contains(red.embed[v]) {
                    prop_assert!(region.contains(v));
                }
            }
        }
    }

    #[test]
    fn dual_condition_swaps_regions(n in 1usize..6, seed in any::<u64>()) {
        let (arena, condition) = game(ConditionKind::Muller, n, seed);
        let Condition::Muller(muller) = condition else { unreachable!() };
        let (w0, w1) = zielonka(&arena, &muller).unwrap();
        let dual = MullerCondition::dual(&muller, &arena).unwrap();
        let (d0, d1) = zielonka(&arena.dual(), &dual).unwrap();
        prop_assert_eq!((d0, d1), (w1, w0));
    }
}
