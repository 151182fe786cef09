//! Homogeneous geodesics on three-dimensional Lorentzian Lie groups.
//!
//! Builds the canonical Lorentzian Lie algebras, computes their Levi-Civita
//! connection and curvature, isotropy algebras, and the geodesic vectors
//! that classify the g.o. property.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod cli;
pub mod connection;
pub mod exact;
pub mod families;
pub mod geodesics;
pub mod isotropy;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod tensor;
pub mod verify;
