//! Muller games solved through safety games.
//!
//! A Muller game is turned into a safety game by tracking the opponent's
//! scores up to 3 ([`reduction`]). Solving that game ([`safety_solver`])
//! yields the winning regions, an antichain-based finite-state winning
//! strategy and a permissive multi-strategy ([`strategy`]). The same idea,
//! phrased as a monitor automaton multiplied with the arena, solves Büchi,
//! co-Büchi, parity and request-response games ([`safety_framework`]).
//! [`oracle`] holds an independent recursive solver used for cross-checks.

pub mod arena;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod reduction;
pub mod safety_framework;
pub mod safety_solver;
pub mod scoring;
pub mod strategy;
pub mod vertex_set;

pub use arena::{Arena, Condition, Game, Lasso, MullerCondition, PlayPrefix, Player};
pub use error::{Error, Result};
pub use vertex_set::{Vertex, VertexSet};
