//! Smoothness on regular grids: exact masks, second-difference schemes and
//! their norms.

pub mod certify;
pub mod diff2;
pub mod stencil;
