//! Computable coadjoint-orbit data for nilpotent Lie groups.
//!
//! The exact layer ([`algebra`], [`coadjoint`], [`polarization`], [`kernels`],
//! [`lattice`]) works over arbitrary-precision rationals. The numeric layer
//! ([`schrodinger`], [`finite_gabor`]) realizes the Heisenberg group on a
//! sampled grid and in the finite Weyl-Heisenberg model, and is used to
//! cross-check the exact formal dimensions and density products.

pub mod algebra;
pub mod bch;
pub mod coadjoint;
pub mod error;
pub mod finite_gabor;
pub mod kernels;
pub mod lattice;
pub mod linalg;
pub mod polarization;
pub mod presets;
pub mod rational;
pub mod schrodinger;
pub mod workspace;

pub use algebra::{AlgebraElement, GroupElement, LieAlgebra, ValidationReport};
pub use coadjoint::{Functional, OrbitAnalysis};
pub use error::{Error, ErrorKind, Result};
pub use linalg::Subspace;
pub use rational::Rational;
