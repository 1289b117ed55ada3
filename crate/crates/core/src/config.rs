//! Numerical settings shared by the analyses. Every field has a default so
//! partial configuration files work.

use serde::{Deserialize, Serialize};

use crate::spectral::report::EigenSettings;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Ringnet size; `None` picks the smallest closed one.
    pub rho: Option<usize>,
    pub eigen_tol: f64,
    pub eigen_max_iter: usize,
    pub cluster_tol: f64,
    pub rank_tol: f64,
    /// Stopping threshold of the characteristic-mesh iteration.
    pub char_tol: f64,
    pub char_max_iter: usize,
    /// Levels `k = 0..=K` of the finite-level cone check.
    pub cone_levels: usize,
    /// Largest power searched for a positive column of `S^l`.
    pub c0_max_power: usize,
    /// Margin by which a spectral inequality must hold.
    pub inequality_margin: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let e = EigenSettings::default();
        Self {
            rho: None,
            eigen_tol: e.tol,
            eigen_max_iter: e.max_iter,
            cluster_tol: e.cluster_tol,
            rank_tol: e.rank_tol,
            char_tol: 1e-13,
            char_max_iter: 5_000,
            cone_levels: 4,
            c0_max_power: 40,
            inequality_margin: 1e-9,
        }
    }
}

impl AnalysisConfig {
    pub fn eigen(&self) -> EigenSettings {
        EigenSettings {
            tol: self.eigen_tol,
            max_iter: self.eigen_max_iter,
            cluster_tol: self.cluster_tol,
            rank_tol: self.rank_tol,
        }
    }
}
