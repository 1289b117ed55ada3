//! Spectral summary of a subdivision matrix.

use num_complex::Complex64;
use serde::Serialize;

use super::eigen::{self, algebraic_multiplicity, eigenvalues, spectral_radius, to_complex, Method};
use super::freq::{frequency_decompose, FrequencyBlocks};
use super::matrix::{build_subdivision_matrix, SubdivisionMatrix};
use crate::error::Result;
use crate::operators::word::OperatorWord;

#[derive(Debug, Clone, Copy)]
pub struct EigenSettings {
    pub tol: f64,
    pub max_iter: usize,
    /// Eigenvalues closer than this count as equal for multiplicities.
    pub cluster_tol: f64,
    /// Relative singular-value cut-off for kernel dimensions.
    pub rank_tol: f64,
}

impl Default for EigenSettings {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100_000, cluster_tol: 1e-6, rank_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl From<Complex64> for Complex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im, abs: z.norm() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencyEntry {
    pub f: usize,
    /// Segment angle `2 pi f / m`.
    pub angle: f64,
    /// Dominant eigenvalue of the core part of the block.
    pub lambda: Complex,
    /// Spectral radius of the whole block, including the rings.
    pub block_radius: f64,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Multiplicity {
    pub algebraic: usize,
    pub geometric: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub word: String,
    pub m: usize,
    pub rho: usize,
    pub size: usize,
    pub frequencies: Vec<FrequencyEntry>,
    /// `lambda` at segment angle `2 pi / m`.
    pub lambda_subdominant: f64,
    pub mu0: Complex,
    /// Set when other frequency-0 eigenvalues share `|mu0|`.
    pub mu0_tied: bool,
    pub lambda_pi: f64,
    pub rho_b: f64,
    pub rho_a: f64,
    /// Multiplicity of `lambda_subdominant` in the whole matrix.
    pub multiplicity: Multiplicity,
    /// Largest eigenvalue magnitude of `S` other than the eigenvalue 1.
    pub second_magnitude: f64,
    pub norm: &'static str,
}

/// Everything a spectral analysis needs, kept together.
pub struct Analysis {
    pub matrix: SubdivisionMatrix,
    pub blocks: FrequencyBlocks,
    pub report: SpectrumReport,
}

pub fn analyse(word: &OperatorWord, m: usize, rho: Option<usize>, cfg: &EigenSettings) -> Result<Analysis> {
    let matrix = build_subdivision_matrix(word, m, rho)?;
    let blocks = frequency_decompose(&matrix)?;
    let report = spectrum_report(&matrix, &blocks, cfg)?;
    Ok(Analysis { matrix, blocks, report })
}

fn frequency_entry(blocks: &FrequencyBlocks, f: usize, cfg: &EigenSettings) -> Result<FrequencyEntry> {
    let m = blocks.m;
    let core = blocks.core_block(f);
    // At frequency 0 the dominant eigenvalue is 1 and is not what is asked
    // for; report it anyway so the table is complete.
    let d = eigen::dominant(&core, None, cfg.tol, cfg.max_iter)?;
    Ok(FrequencyEntry {
        f,
        angle: 2.0 * std::f64::consts::PI * f as f64 / m as f64,
        lambda: d.value.into(),
        block_radius: spectral_radius(blocks.block(f))?,
        method: d.method,
        iterations: d.iterations,
        residual: d.residual,
    })
}

/// `lambda_pi` from the valence-4, frequency-2 configuration.
pub fn lambda_pi(word: &OperatorWord, cfg: &EigenSettings) -> Result<f64> {
    let s = build_subdivision_matrix(word, 4, None)?;
    let fb = frequency_decompose(&s)?;
    Ok(eigen::dominant(&fb.core_block(2), None, cfg.tol, cfg.max_iter)?.value.norm())
}

pub fn spectrum_report(s: &SubdivisionMatrix, fb: &FrequencyBlocks, cfg: &EigenSettings) -> Result<SpectrumReport> {
    let m = s.m;
    let frequencies: Vec<FrequencyEntry> = (0..m).map(|f| frequency_entry(fb, f, cfg)).collect::<Result<_>>()?;
    let lambda = frequencies[1].lambda.abs;

    // mu0: drop the eigenvalue closest to 1 from the frequency-0 spectrum.
    let mut e0 = eigenvalues(fb.block(0))?;
    let one = Complex64::new(1.0, 0.0);
    if let Some(i) = (0..e0.len()).min_by(|&i, &j| (e0[i] - one).norm().total_cmp(&(e0[j] - one).norm())) {
        e0.remove(i);
    }
    let e0 = eigen::sorted_by_magnitude(e0);
    let mu0 = e0.first().copied().unwrap_or_default();
    let mu0_tied = e0.iter().skip(1).any(|z| (z.norm() - mu0.norm()).abs() <= cfg.cluster_tol && (*z - mu0).norm() > cfg.cluster_tol);

    let dense = s.dense();
    let rho_b = spectral_radius(&to_complex(&dense.view((s.blocks.b.start, s.blocks.b.start), (s.blocks.b.len(), s.blocks.b.len())).into_owned()))?;
    let rho_a = spectral_radius(&to_complex(&dense.view((s.blocks.a.start, s.blocks.a.start), (s.blocks.a.len(), s.blocks.a.len())).into_owned()))?;

    let full = to_complex(&dense);
    let all = eigenvalues(&full)?;
    let target = frequencies[1].lambda.re + frequencies[1].lambda.im * Complex64::i();
    let algebraic = algebraic_multiplicity(&all, target, cfg.cluster_tol);
    let scale = dense.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let geometric = eigen::nullity(&full, target, cfg.rank_tol * scale);
    let mut rest = all.clone();
    if let Some(i) = (0..rest.len()).min_by(|&i, &j| (rest[i] - one).norm().total_cmp(&(rest[j] - one).norm())) {
        rest.remove(i);
    }
    let second_magnitude = rest.iter().map(|z| z.norm()).fold(0.0, f64::max);

    Ok(SpectrumReport {
        word: s.word.to_string(),
        m,
        rho: s.rho,
        size: s.n(),
        lambda_subdominant: lambda,
        frequencies,
        mu0: mu0.into(),
        mu0_tied,
        lambda_pi: lambda_pi(&s.word, cfg)?,
        rho_b,
        rho_a,
        multiplicity: Multiplicity { algebraic, geometric },
        second_magnitude,
        norm: "max-abs",
    })
}

/// Eigenvalue table as CSV: `f,re,im,abs`, every eigenvalue of every block.
pub fn eigenvalue_csv(fb: &FrequencyBlocks) -> Result<String> {
    let mut out = String::from("f,re,im,abs\n");
    for f in 0..fb.m {
        for z in eigen::sorted_by_magnitude(eigenvalues(fb.block(f))?) {
            out.push_str(&format!("{f},{:.16e},{:.16e},{:.16e}\n", z.re, z.im, z.norm()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::word::parse_word;

    fn report(w: &str, m: usize) -> SpectrumReport {
        analyse(&parse_word(w).unwrap(), m, None, &EigenSettings::default()).unwrap().report
    }

    #[test]
    fn frequency_zero_is_one() {
        for w in ["VV", "AAR", "VAV"] {
            let r = report(w, 5);
            assert!((r.frequencies[0].lambda.re - 1.0).abs() < 1e-10, "{w}");
        }
    }

    #[test]
    fn conjugate_frequencies_agree() {
        let r = report("AAR", 7);
        for f in 1..7 {
            assert!((r.frequencies[f].lambda.abs - r.frequencies[7 - f].lambda.abs).abs() < 1e-10);
        }
    }

    #[test]
    fn midpoint_lambda_pi_is_quarter() {
        let r = report("AAR", 5);
        assert!((r.lambda_pi - 0.25).abs() < 1e-10);
        assert!((r.mu0.abs - 0.25).abs() < 1e-10);
    }
}
