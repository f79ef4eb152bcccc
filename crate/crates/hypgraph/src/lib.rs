//! Dimension theory of invariant graphs of hyperbolic skew products.
//!
//! The crate builds the classical example systems (affine Anosov forcing,
//! affine horseshoe families, baker-driven Weierstrass graphs), evaluates
//! their invariant graphs, solves the pressure equations that predict box
//! dimension, measures box dimension empirically, runs the Birkhoff-counting
//! multifractal pipeline, estimates critical regularity, and checks the
//! fibered-blender criteria on affine step systems.

pub mod blender;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod multifractal;
pub mod numerics;
pub mod pressure;
pub mod symbolic;
pub mod systems;

pub use error::{Error, Result};
