//! Optimistic robust optimization.
//!
//! The crate is organised bottom-up:
//!
//! * [`norms`]: the largest-k norm family, its dual, subgradients and L_p norms.
//! * [`uncertainty`]: norm-ball uncertainty sets described by support functions,
//!   argsup oracles and penalized optimistic infima.
//! * [`regularizers`]: the non-convex sparse regularizers and their DC splits.
//! * [`lp`]: LP data model, a dense revised simplex solver and an MPS reader/writer.
//! * [`orlp`]: robust LPs with budgets of uncertainty and optimism, solved by DCA.
//! * [`ml`]: classifiers and regressors built from the same machinery.
//! * [`experiments`]: random-LP generation, budget grids and Monte Carlo feasibility.

pub mod error;
pub mod experiments;
pub mod lp;
pub mod ml;
pub mod norms;
pub mod orlp;
pub mod regularizers;
pub mod uncertainty;

pub use error::{Error, Result};
pub use lp::{LinearRow, LpSolution, LpStatus, NominalLp, SimplexConfig};
pub use ml::{CompositeObjective, Dataset, InnerSolver, LinearModel, ResidualShape, TrainReport, TrainerConfig};
pub use norms::{cvar_norm, lp_norm, topk_dual_norm, topk_norm, topk_subgradient, LpKind};
pub use orlp::{DcaConfig, DcaOutcome, DcaStatus, DcaTrace, OrlpProblem, RobustRow};
pub use regularizers::Regularizer;
pub use uncertainty::{OptimismPenalty, OroLinearTerm, SetKind, UncertaintySet};
