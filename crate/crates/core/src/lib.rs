//! Entanglement of assistance for bipartite mixed states: bounds, the
//! two-qubit magic-basis machinery, ensemble search, and the two-copy
//! superadditivity witness.
//!
//! All entropies are in bits. Joint basis index is `a·d_b + b`.

pub mod bounds;
pub mod ensembles;
pub mod error;
pub mod magic;
pub mod matcore;
pub mod quantum;

pub use bounds::{bounds_report, BoundsReport};
pub use ensembles::{optimize, verify_superadditivity, Direction, EnsembleSize, OptimizerConfig, OptimizerResult};
pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, C64};
pub use quantum::{BipartiteDims, DensityMatrix, Ensemble, Member, PureState};
