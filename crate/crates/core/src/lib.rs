//! Conversion/preference games: change-of-mind relations, CP equilibria as
//! terminal strongly connected components, and the strategic-game and
//! Chinese Wall encodings.

pub mod chinesewall;
pub mod corpus;
pub mod equilibria;
pub mod fixpoint;
pub mod format;
pub mod game;
pub mod relation;
pub mod strategic;

pub use equilibria::{classify, cp_equilibria, Equilibrium, EquilibriumKind, EquilibriumReport};
pub use game::{build_game, AgentId, CpGame, GameError, GameSpec, SituationId, SituationSet};
pub use relation::Relation;
pub use strategic::StrategicGame;
