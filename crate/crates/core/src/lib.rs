pub mod algebra;
pub mod classify;
pub mod corpus;
pub mod error;
pub mod group;
pub mod lie_dim;

pub use algebra::{AlgebraVector, ChainResult, GroupAlgebra, SubspaceBasis, UnitGroup};
pub use classify::{analyze, AnalysisReport, AnalyzeOptions, ConditionId, Verdict};
pub use corpus::{family, parse_spec, GroupSpec};
pub use error::{Error, Result};
pub use group::{AbelianType, CentralSeries, Generators, GroupTable, Subgroup};
pub use lie_dim::{DSequence, DimensionSeries, GateStatus, LieContext};
