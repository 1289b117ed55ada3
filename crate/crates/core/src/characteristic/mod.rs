//! Characteristic meshes, vertical-difference cones and the decision tree
//! for C1 continuity at extraordinary elements.

pub mod charmesh;
pub mod cone;
pub mod nabla;
pub mod probe;
pub mod certify;
