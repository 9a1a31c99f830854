//! Torus-action upper bounds on the topological complexity of complements of
//! discriminantal hypersurfaces, with numerical verification of the Morse
//! inputs and an illustrative motion planner on planar configuration spaces.
//!
//! The pipeline: given a sparse polynomial Delta in m complex variables,
//! compute the module of homogeneisations ([`lattice`]), validate a scalar
//! torus action ([`torus`]), maximise the stabiliser dimension t over
//! achievable zero-patterns, and report the bound 2m - s + t. The [`morse`]
//! and [`verify`] modules check the eigenvalue-signature facts the bound
//! rests on; [`config`] and [`planner`] specialise everything to planar
//! configuration spaces and turn the construction into explicit paths.

pub mod config;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod morse;
pub mod planner;
pub mod poly;
pub mod torus;
pub mod verify;
pub mod zmat;

pub use error::{Error, Result};
pub use lattice::{homog_lattice, HomogLattice};
pub use poly::SparsePoly;
pub use torus::{tc_upper_bound, validate_action, BoundReport, TorusAction};
