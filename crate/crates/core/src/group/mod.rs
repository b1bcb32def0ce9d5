//! Finite groups as multiplication tables, and the subgroup calculus the
//! Lie dimension formulas are written in.

mod abelian;
mod subgroup;
mod table;

pub use abelian::{exact_log, factorize, AbelianType, SubgroupInfo};
pub use subgroup::{CentralSeries, Subgroup};
pub use table::{Generators, GroupTable, Matrix, Permutation, DEFAULT_ELEMENT_CAP, MAX_ELEMENT_CAP};
