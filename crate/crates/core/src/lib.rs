//! Sobolev spaces of maps between manifolds measured through metrics on the
//! bundle T*M ⊗ TN.
//!
//! The crate is layered bottom-up: [`manifolds`] holds the concrete model
//! geometries, [`hom_bundle`] the fiber elements and their transport,
//! [`bundle_metrics`] the λ-family of metrics, [`sobolev`] sampled maps with
//! energies and distances, and [`experiments`] the counterexample families.

pub mod bundle_metrics;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod hom_bundle;
pub mod manifolds;
pub mod props;
pub mod quadrature;
pub mod sampling;
pub mod sobolev;

pub use error::{Error, Result};
