//! Vertex index of origin-symmetric convex bodies.
//!
//! The vertex index of a symmetric body `K` is the infimum of `Σ ‖pᵢ‖_K` over
//! finite point sets whose convex hull contains `K`. This crate provides the
//! body oracles (gauge, support, hulls, polars, containment), minimal-volume
//! enclosing ellipsoids, lower-bound certificates, a constrained search for
//! upper bounds and Banach–Mazur transfer bounds.

pub mod body;
pub mod certify;
pub mod cli;
pub mod error;
pub mod geom;
pub mod lower;
pub mod mvee;
pub mod search;
pub mod sphere;
pub mod transfer;

pub use body::{Body, BodySpec, ContainmentReport, EllipsoidShape, Exponent, Polytope};
pub use error::{Result, VeinError};
