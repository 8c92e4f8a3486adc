//! Exact computations on Gelfand-Tsetlin polytopes, marked order polytopes
//! of strongly planar posets, and the flow polytopes they are integrally
//! equivalent to.
//!
//! Every count is an arbitrary-precision integer and every volume an exact
//! rational. Volumes are relative to the lattice of the affine span, so a
//! unimodular `d`-simplex has volume `1/d!`.

pub mod combinatorics;
pub mod corpus;
pub mod dot;
pub mod error;
pub mod flow;
pub mod gt;
pub mod poset;
pub mod subdivision;
pub mod transform;
pub mod verify;

pub use combinatorics::{Integer, Partition, Rational, ShiftedTableau, WeakComposition};
pub use error::{Error, Result};
pub use flow::FlowNetwork;
pub use poset::{MarkedPoset, Poset};
pub use transform::{BoundedEmbedding, DualNetwork, MarkedEmbedding};
