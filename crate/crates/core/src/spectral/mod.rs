//! Subdivision matrices around extraordinary elements and their spectra.

pub mod core;
pub mod matrix;
pub mod netmap;
pub mod eigen;
pub mod freq;
pub mod c0;
pub mod report;
