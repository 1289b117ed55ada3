//! General midpoint subdivision on quad meshes and mechanical smoothness
//! certification.
//!
//! Subdivision words over the refinement operator `R`, the face-averaging
//! operator `A`, the mid-edge operator `V` and the vertex smoother
//! `B(alpha, beta)` are applied to polygon meshes with exact rational weights.
//! On top of that the crate assembles subdivision matrices around
//! extraordinary vertices and faces, splits them by rotational frequency and
//! checks the spectral and geometric conditions that imply C0 and C1
//! continuity of the limit surfaces.

pub mod certificate;
pub mod characteristic;
pub mod config;
pub mod error;
pub mod mesh;
pub mod operators;
pub mod properties;
pub mod rational;
pub mod regular;
pub mod sparse;
pub mod verify;
pub mod spectral;

pub use error::{Error, Result};
