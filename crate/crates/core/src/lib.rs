//! Spectral differential-form calculus on the periodic 3-torus, the
//! hydrodynamical co-momentum map, and linking invariants of tube links:
//! Gauss and crossing linking numbers, helicity, Massey triple linking on the
//! grid, and a combinatorial Milnor-invariant oracle.

pub mod comomentum;
pub mod config;
pub mod conventions;
pub mod error;
pub mod grid;
pub mod links;
pub mod massey;
pub mod milnor;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
pub use grid::{GridField, Grid3, VectorField};
