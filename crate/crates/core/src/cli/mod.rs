//! The `muller` command-line tool.
//!
//! Exit status: 0 on success, 1 when solvers disagree or a verification
//! fails, 2 on usage, parse or solver errors.

pub mod dot;
pub mod format;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::arena::{Arena, Condition, MullerCondition, Player};
use crate::error::{Error, Result};
use crate::oracle::{encode_as_muller, random_game, zielonka, ConditionKind, GeneratorConfig};
use crate::reduction::{build_safety_game, ReductionOptions};
use crate::safety_framework::{monitor_for, muller_monitor, reject_unreachable, solve_via_safety};
use crate::safety_solver::solve_safety;
use crate::strategy::{
    build_antichain_strategy, build_permissive_strategy, reachable_product, solve_muller, verify_bounded_scores,
    MultiStrategy,
};
use crate::vertex_set::VertexSet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "muller", version, about = "Solve Muller games through safety games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct ReduceArgs {
    /// Score at which a class becomes unsafe.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..=3))]
    threshold: u32,
    /// Abort when the safety game grows beyond this many vertices.
    #[arg(long, default_value_t = 1_000_000)]
    max_states: usize,
}

impl ReduceArgs {
    fn options(self) -> ReductionOptions {
        ReductionOptions { threshold: self.threshold, max_states: self.max_states }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyKind {
    Antichain,
    Permissive,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ReduceOutput {
    Summary,
    Dot,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyOutput {
    Text,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print both winning regions.
    Solve {
        game: PathBuf,
        #[command(flatten)]
        reduce: ReduceArgs,
    },
    /// Build the safety game of a Muller game.
    Reduce {
        game: PathBuf,
        /// Player whose scores are tracked.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
        track_player: u8,
        #[command(flatten)]
        reduce: ReduceArgs,
        #[arg(long, value_enum, default_value_t = ReduceOutput::Summary)]
        out: ReduceOutput,
    },
    /// Print a winning strategy of a Muller game.
    Strategy {
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyKind::Antichain)]
        kind: StrategyKind,
        /// Player the strategy is for.
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        player: u8,
        #[command(flatten)]
        reduce: ReduceArgs,
        #[arg(long, value_enum, default_value_t = StrategyOutput::Text)]
        out: StrategyOutput,
    },
    /// Check that a strategy keeps the opponent's scores within a bound.
    Verify {
        game: PathBuf,
        strategy: PathBuf,
        #[arg(long, default_value_t = 2)]
        bound: u32,
        /// Start vertices; defaults to the strategy player's winning region.
        #[arg(long, num_args = 1..)]
        from: Vec<String>,
    },
    /// Compare the solvers against the recursive reference solver.
    Oracle { game: PathBuf },
    /// Print a random game.
    Random {
        #[arg(long, default_value_t = 5)]
        vertices: usize,
        #[arg(long, default_value_t = 0.4)]
        density: f64,
        /// Probability that a vertex belongs to Player 0.
        #[arg(long, default_value_t = 0.5)]
        owner_bias: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = ConditionKind::Muller)]
        kind: ConditionKind,
    },
    /// Solve through a monitor automaton, or run it on a word.
    Monitor {
        game: PathBuf,
        /// Monitor to use; defaults to the game's condition.
        #[arg(long)]
        kind: Option<ConditionKind>,
        /// Run the monitor on this play prefix instead of solving.
        #[arg(long)]
        word: Option<String>,
        #[arg(long, value_enum, default_value_t = ReduceOutput::Summary)]
        out: ReduceOutput,
    },
}

/// A command outcome other than plain success.
enum Failure {
    Error(Error),
    /// Reported through the normal output; exit with [`EXIT_FAILED`].
    Negative,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<(Arena, Condition)> {
    format::parse_game(&read(path)?).map_err(|e| match e {
        Error::Parse { line, message } => Error::Invalid(format!("{}:{line}: {message}", path.display())),
        other => other,
    })
}

fn load_muller(path: &Path) -> Result<(Arena, MullerCondition)> {
    match load_game(path)? {
        (arena, Condition::Muller(m)) => Ok((arena, m)),
        _ => Err(Error::NotMuller),
    }
}

fn player(index: u8) -> Player {
    Player::from_index(index as usize).expect("clap restricts the range")
}

fn regions(out: &mut dyn Write, arena: &Arena, w0: &VertexSet, w1: &VertexSet) -> std::io::Result<()> {
    writeln!(out, "W0 = {}", arena.format_set(w0))?;
    writeln!(out, "W1 = {}", arena.format_set(w1))
}

/// Winning regions from the safety-based solvers: the score reduction for
/// Muller games, monitor products otherwise.
fn solve_game(arena: &Arena, condition: &Condition, options: ReductionOptions) -> Result<(VertexSet, VertexSet)> {
    match condition {
        Condition::Muller(m) => {
            let sol = solve_muller(arena, m, options)?;
            Ok((sol.w0, sol.w1))
        }
        other => {
            let sol = solve_via_safety(arena, &monitor_for(arena, other)?)?;
            Ok((sol.w0, sol.w1))
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Error(Error::Internal(e.to_string()));
    match command {
        Command::Solve { game, reduce } => {
            let (arena, condition) = load_game(&game)?;
            let (w0, w1) = solve_game(&arena, &condition, reduce.options())?;
            regions(out, &arena, &w0, &w1).map_err(io)?;
        }
        Command::Reduce { game, track_player, reduce, out: format } => {
            let (arena, muller) = load_muller(&game)?;
            let red = build_safety_game(&arena, &muller, player(track_player), reduce.options())?;
            match format {
                ReduceOutput::Dot => out.write_all(dot::reduction_dot(&red).as_bytes()).map_err(io)?,
                ReduceOutput::Summary => {
                    let sol = solve_safety(&red.game);
                    let q = &red.game.arena;
                    writeln!(out, "vertices {}", red.len()).map_err(io)?;
                    writeln!(out, "safe {}", red.game.safe.len()).map_err(io)?;
                    writeln!(out, "unsafe classes {}", red.unsafe_classes).map_err(io)?;
                    for c in q.vertices() {
                        let succ: Vec<String> = q.successors(c).iter().map(|&d| d.to_string()).collect();
                        let side = if sol.w0.contains(c) { "W0" } else { "W1" };
                        writeln!(out, "{c} {} p{} {side} -> {}", q.name(c), q.owner(c).index(), succ.join(" "))
                            .map_err(io)?;
                    }
                }
            }
        }
        Command::Strategy { game, kind, player: p, reduce, out: format } => {
            let (arena, muller) = load_muller(&game)?;
            let owner = player(p);
            let red = build_safety_game(&arena, &muller, owner.opponent(), reduce.options())?;
            let sol = solve_safety(&red.game);
            let from = crate::strategy::embedded_region(&red, &sol).to_vec();
            let text = match kind {
                StrategyKind::Antichain => {
                    let s = build_antichain_strategy(&red, &sol);
                    match format {
                        StrategyOutput::Text => format::serialize_strategy(&arena, &s),
                        StrategyOutput::Dot => dot::product_dot(&arena, &s, &reachable_product(&arena, &s, &from)?)?,
                    }
                }
                StrategyKind::Permissive => {
                    let s = build_permissive_strategy(&red, &sol);
                    match format {
                        StrategyOutput::Text => format::serialize_strategy(&arena, &s),
                        StrategyOutput::Dot => dot::product_dot(&arena, &s, &reachable_product(&arena, &s, &from)?)?,
                    }
                }
            };
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        Command::Verify { game, strategy, bound, from } => {
            let (arena, muller) = load_muller(&game)?;
            let strat = format::parse_strategy(&arena, &read(&strategy)?)?;
            let from = if from.is_empty() {
                let sol = solve_muller(&arena, &muller, ReductionOptions::default())?;
                match strat.player() {
                    Player::Zero => sol.w0.to_vec(),
                    Player::One => sol.w1.to_vec(),
                }
            } else {
                from.iter().map(|name| arena.vertex_or_err(name)).collect::<Result<_>>()?
            };
            let verdict = verify_bounded_scores(&arena, &muller, &strat, &from, bound)?;
            writeln!(out, "explored {}", verdict.explored).map_err(io)?;
            match verdict.witness {
                None => writeln!(out, "scores bounded by {bound}").map_err(io)?,
                Some(w) => {
                    writeln!(out, "bound {bound} exceeded on {}", arena.format_word(&w)).map_err(io)?;
                    return Err(Failure::Negative);
                }
            }
        }
        Command::Oracle { game } => {
            let (arena, condition) = load_game(&game)?;
            let muller = encode_as_muller(&arena, &condition)?;
            let (z0, z1) = zielonka(&arena, &muller)?;
            let (w0, w1) = solve_game(&arena, &condition, ReductionOptions::default())?;
            writeln!(out, "reference").map_err(io)?;
            regions(out, &arena, &z0, &z1).map_err(io)?;
            writeln!(out, "safety").map_err(io)?;
            regions(out, &arena, &w0, &w1).map_err(io)?;
            if (z0, z1) != (w0, w1) {
                writeln!(out, "disagree").map_err(io)?;
                return Err(Failure::Negative);
            }
            writeln!(out, "agree").map_err(io)?;
        }
        Command::Random { vertices, density, owner_bias, seed, kind } => {
            let cfg = GeneratorConfig { vertices, density, owner_bias, seed, kind };
            let (arena, condition) = random_game(&cfg)?;
            out.write_all(format::serialize_game(&arena, &condition).as_bytes()).map_err(io)?;
        }
        Command::Monitor { game, kind, word, out: format } => {
            let (arena, condition) = load_game(&game)?;
            let monitor = match kind {
                None => monitor_for(&arena, &condition)?,
                Some(k) if k.name() == condition.kind() => monitor_for(&arena, &condition)?,
                Some(ConditionKind::Muller) => muller_monitor(&arena, &encode_as_muller(&arena, &condition)?)?,
                Some(k) => {
                    return Err(Error::Invalid(format!("a {k} monitor needs a {k} condition")).into());
                }
            };
            if let Some(word) = word {
                let word = arena.word(&word)?;
                let mut q = monitor.start();
                for &v in &word {
                    q = monitor.step(&q, v)?;
                    writeln!(out, "{} {}", arena.name(v), monitor.describe(&arena, &q)).map_err(io)?;
                }
                let accepted = !monitor.is_reject(&q);
                writeln!(out, "{}", if accepted { "accepted" } else { "rejected" }).map_err(io)?;
                return Ok(());
            }
            let sol = solve_via_safety(&arena, &monitor)?;
            match format {
                ReduceOutput::Dot => {
                    let text = dot::arena_dot(&sol.product.game.arena, Some(&sol.product.game.safe));
                    out.write_all(text.as_bytes()).map_err(io)?;
                }
                ReduceOutput::Summary => {
                    writeln!(out, "monitor {}", monitor.kind()).map_err(io)?;
                    writeln!(out, "product vertices {}", sol.product.game.arena.len()).map_err(io)?;
                    regions(out, &arena, &sol.w0, &sol.w1).map_err(io)?;
                    let sound = reject_unreachable(&arena, &sol)?;
                    writeln!(out, "reject unreachable: {sound}").map_err(io)?;
                    if !sound {
                        return Err(Failure::Negative);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Runs one invocation and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Negative) => EXIT_FAILED,
        Err(Failure::Error(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["muller"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn game_file(dir: &Path, name: &str, text: &str) -> String {
        let path = dir.join(name);
        fs::write(&path, text).unwrap();
        path.to_string_lossy().into_owned()
    }

    fn scratch(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("muller-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(invoke(&[]).0, EXIT_USAGE);
        assert_eq!(invoke(&["solve", "/nonexistent/game"]).0, EXIT_USAGE);
        assert_eq!(invoke(&["reduce", "x", "--threshold", "4"]).0, EXIT_USAGE);
        assert_eq!(invoke(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn random_then_solve_and_oracle() {
        let dir = scratch("random");
        let (code, text, _) = invoke(&["random", "--vertices", "4", "--seed", "3"]);
        assert_eq!(code, EXIT_OK);
        let path = game_file(&dir, "g.game", &text);
        let (code, solved, _) = invoke(&["solve", &path]);
        assert_eq!(code, EXIT_OK);
        assert!(solved.starts_with("W0 = "));
        let (code, report, _) = invoke(&["oracle", &path]);
        assert_eq!(code, EXIT_OK, "{report}");
        assert!(report.ends_with("agree\n"));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let dir = scratch("parse");
        let path = game_file(&dir, "bad.game", "vertex 1 0\nedge 1 3\n");
        let (code, _, err) = invoke(&["solve", &path]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains(":2: undeclared vertex `3`"), "{err}");
    }

    #[test]
    fn monitor_word_and_kinds() {
        let dir = scratch("monitor");
        let path = game_file(
            &dir,
            "b.game",
            "vertex a 0\nvertex b 0\nedge a b\nedge b a\nedge b b\ncondition buchi\nfinal a\n",
        );
        let (code, text, _) = invoke(&["monitor", &path, "--word", "a b b"]);
        assert_eq!(code, EXIT_OK);
        assert!(text.ends_with("rejected\n"), "{text}");
        let (code, text, _) = invoke(&["monitor", &path]);
        assert_eq!(code, EXIT_OK);
        assert!(text.contains("W0 = {a,b}"), "{text}");
        let (code, text, _) = invoke(&["monitor", &path, "--kind", "muller"]);
        assert_eq!(code, EXIT_OK);
        assert!(text.contains("monitor muller"));
        assert_eq!(invoke(&["monitor", &path, "--kind", "parity"]).0, EXIT_USAGE);
    }
}
