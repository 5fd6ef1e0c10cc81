//! Word metrics, Cayley-ball oracles and dead-end depth.
//!
//! The crate covers free groups and lattices ([`group`]), weighted and
//! crystallographic lattices ([`abelian`]), the discrete Heisenberg group
//! ([`heis`]), Sol lattices `ℤ² ⋊_R ℤ` ([`sol`]) and regular geodesic
//! languages ([`geolang`]). Every analytic construction can be checked
//! against the exhaustive oracle in [`search`].

pub mod abelian;
pub mod geolang;
pub mod group;
pub mod heis;
pub mod search;
pub mod sol;

pub use group::{FreeAbelian, FreeGroup, GenAlphabet, GroupError, Letter, MarkedGroup, Point, Word};
pub use search::{ball, deadend_scan, depth, distance, BallIndex, DepthReport, SearchError};
