//! C1 certification at extraordinary elements.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use super::charmesh::{chain_top, characteristic_mesh, grid_start, CharOutcome, CharacteristicMesh, JordanChain};
use super::cone::{cone_contains, Cone, ConeCheck};
use super::nabla::{nabla2_matrix, EdgeLabel};
use super::probe::{grid_differences, GridStyle};
use crate::certificate::{num, to_value, Certificate, Subject, Verdict};
use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::mesh::ringnet::{build_grid_mesh, NetIndex, NetKind};
use crate::operators::net::apply_word_net;
use crate::operators::word::{Factor, OperatorWord, WordClass};
use crate::regular::certify::certify_regular;
use crate::spectral::c0::check_c0;
use crate::spectral::eigen::{generalized_kernel_dims, to_complex};
use crate::spectral::matrix::SubdivisionMatrix;
use crate::spectral::report::{analyse, Analysis};

const VAV_THEOREM: &str = "VAV schemes are C1 at extraordinary elements of valence m >= 5";
const VALENCE3_REMARK: &str = "valence 3: C1 if lambda > max(|mu0|, rho_B, rho_A)";
const JORDAN_CRITERION: &str =
    "C1 criterion for two subdominant generalized eigenvectors with a regular, injective characteristic map";
const CONE_LEMMA: &str = "vertical differences of a characteristic mesh lie in C(2 pi/m, pi/2)";
const GCC_THEOREM: &str = "B_r...B_1 R and A B_r...B_1 R are C1 if lambda > |mu0| for m >= 5 and m = 3";
const GCC_REMARK: &str =
    "unrestricted generalized Catmull-Clark: C1 under (1) m >= 5 with constant parameters, (2) m >= 5 and lambda > |mu0|, (3) m = 3 and lambda > max(|mu0|, rho_B, rho_A)";
const REIF: &str = "Reif's C1 criterion";
const C0_THEOREM: &str = "stochastic S with a positive column power and simple eigenvalue 1 converges";

/// `(dim ker (S - lambda), dim ker (S - lambda)^2)` with rank tolerance
/// `rank_tol * max |S_ij|`.
pub fn generalized_eigenvector_rank(s: &SubdivisionMatrix, lambda: f64, rank_tol: f64) -> (usize, usize) {
    generalized_kernel_dims(&to_complex(&s.dense()), Complex64::new(lambda, 0.0), rank_tol)
}

/// `nabla_2 (S^k M / sigma^k)` for the frequency-1 grid mesh `M` on the
/// c.rho-net, `k = 0..=levels`, checked against the pointed spoke cone.
pub fn finite_level_cones(s: &SubdivisionMatrix, sigma: f64, levels: usize) -> Vec<ConeCheck<EdgeLabel>> {
    let cone = Cone::spokes(s.m, true);
    let mut x = grid_start(s);
    let mut out = Vec::with_capacity(levels + 1);
    for k in 0..=levels {
        if k > 0 {
            x = s.apply(&x).into_iter().map(|z| z / sigma).collect();
        }
        let edges = nabla2_matrix(s, &x);
        out.push(cone_contains(&cone, &edges, zero_tol(&edges)));
    }
    out
}

fn zero_tol(edges: &[(EdgeLabel, Complex64)]) -> f64 {
    1e-10 * edges.iter().map(|(_, z)| z.norm()).fold(0.0, f64::max).max(1e-300)
}

fn cone_check(mesh: &CharacteristicMesh, s: &SubdivisionMatrix, pointed: bool) -> ConeCheck<EdgeLabel> {
    let edges = nabla2_matrix(s, &mesh.net);
    cone_contains(&Cone::spokes(s.m, pointed), &edges, zero_tol(&edges))
}

fn subject(word: &OperatorWord, m: usize) -> Subject {
    Subject { word: word.to_string(), analysed: word.even_power().to_string(), valence: Some(m), orientation: None }
}

fn invalid(word: &OperatorWord, m: usize, reason: &str) -> Certificate {
    let mut c = Certificate::new(subject(word, m), Verdict::InvalidInput);
    c.push("reason", Value::String(reason.into()));
    c
}

fn push_spectrum(c: &mut Certificate, a: &Analysis) {
    let r = &a.report;
    c.push("lambda", num(r.lambda_subdominant));
    c.push("mu0", json!({ "re": num(r.mu0.re), "im": num(r.mu0.im), "abs": num(r.mu0.abs), "tied": r.mu0_tied }));
    c.push("rho_b", num(r.rho_b));
    c.push("rho_a", num(r.rho_a));
    c.push("lambda_pi", num(r.lambda_pi));
    c.push("multiplicity", json!({ "algebraic": r.multiplicity.algebraic, "geometric": r.multiplicity.geometric }));
    c.push("matrix", json!({ "size": r.size, "rho": r.rho, "kind": a.matrix.kind }));
}

fn push_c0(c: &mut Certificate, s: &SubdivisionMatrix, cfg: &AnalysisConfig) -> Result<bool> {
    let check = check_c0(s, cfg.c0_max_power, cfg.cluster_tol)?;
    let ok = check.certified;
    c.push("c0", to_value(&check));
    if ok {
        c.cite(C0_THEOREM);
    }
    Ok(ok)
}

fn push_cone(c: &mut Certificate, name: &str, check: &ConeCheck<EdgeLabel>, cone: Cone) {
    c.push(
        name,
        json!({
            "cone": to_value(&cone),
            "contained": check.contained,
            "violations": to_value(&check.violations),
            "on_boundary": check.on_boundary.len(),
        }),
    );
}

fn push_char_mesh(c: &mut Certificate, mesh: &CharacteristicMesh) {
    c.push(
        "characteristic_mesh",
        json!({
            "method": mesh.method,
            "lambda": num(mesh.lambda),
            "residual": num(mesh.residual),
            "iterations": mesh.iterations,
            "rotation_residual": num(mesh.rotation_residual()),
            "reflection_residual": num(mesh.reflection_residual()),
        }),
    );
}

fn push_chain(c: &mut Certificate, chain: &JordanChain, full: (usize, usize)) {
    c.push(
        "generalized_eigenvectors",
        json!({
            "lambda": num(chain.lambda),
            "kernel": full.0,
            "kernel2": full.1,
            "generalized": full.1 - full.0,
            "frequency1_kernel": chain.kernel,
            "frequency1_kernel2": chain.kernel2,
        }),
    );
}

/// Decision procedure for `word` at an extraordinary element of valence `m`.
/// Invalid input comes back as an `invalid-input` certificate; errors are
/// internal failures.
pub fn certify_extraordinary(word: &OperatorWord, m: usize, cfg: &AnalysisConfig) -> Result<Certificate> {
    let class = word.classify();
    if let WordClass::Invalid { reason } = &class {
        return Ok(invalid(word, m, reason));
    }
    if m < 3 {
        return Ok(invalid(word, m, &format!("valence must be at least 3, got {m}")));
    }
    if let WordClass::GeneralizedCc { .. } = class {
        return certify_gcc(word, m, cfg);
    }
    if m == 4 {
        let mut c = certify_regular(word)?;
        c.subject.valence = Some(4);
        return Ok(c);
    }
    let analysed = word.even_power();
    let a = analyse(&analysed, m, cfg.rho, &cfg.eigen())?;
    let mut c = Certificate::new(subject(word, m), Verdict::NotCertifiable);
    c.push("class", to_value(&class));
    push_spectrum(&mut c, &a);
    let c0 = push_c0(&mut c, &a.matrix, cfg)?;

    if class.is_vav() {
        certify_vav(&mut c, &a, m, cfg, c0)?;
    } else {
        cone_evidence(&mut c, &analysed, &a, m, cfg)?;
        c.verdict = Verdict::TechniqueInapplicable;
    }
    Ok(c)
}

fn iterate(c: &mut Certificate, s: &SubdivisionMatrix, cfg: &AnalysisConfig) -> Result<Option<CharacteristicMesh>> {
    match characteristic_mesh(s, cfg.char_tol, cfg.char_max_iter)? {
        CharOutcome::Converged(mesh) => Ok(Some(mesh)),
        CharOutcome::NoSimplePair { iterations, last_change, lambda_estimate } => {
            c.push_note(
                "iteration",
                json!({ "iterations": iterations, "last_change": num(last_change), "lambda_estimate": num(lambda_estimate) }),
                "no simple subdominant pair by iteration",
            );
            Ok(None)
        }
    }
}

fn certify_vav(c: &mut Certificate, a: &Analysis, m: usize, cfg: &AnalysisConfig, c0: bool) -> Result<()> {
    let s = &a.matrix;
    let r = &a.report;
    let lambda = r.lambda_subdominant;
    let sigma = s.word.sigma();
    if m >= 5 {
        let Some(mesh) = iterate(c, s, cfg)? else {
            return Ok(());
        };
        let agree = (mesh.lambda - lambda).abs() <= 1e-8;
        push_char_mesh(c, &mesh);
        c.push("lambda_agreement", num((mesh.lambda - lambda).abs()));
        let d = cone_check(&mesh, s, false);
        push_cone(c, "nabla2_characteristic", &d, Cone::spokes(m, false));
        let levels = finite_level_cones(s, sigma, cfg.cone_levels);
        let levels_ok = levels.iter().all(|l| l.contained);
        c.push(
            "finite_level_cones",
            json!(levels
                .iter()
                .enumerate()
                .map(|(k, l)| json!({ "k": k, "contained": l.contained, "violations": to_value(&l.violations) }))
                .collect::<Vec<_>>()),
        );
        c.cite(VAV_THEOREM).cite(CONE_LEMMA).cite(REIF);
        c.push(
            "coverage",
            Value::String("C1 follows from the cited theorem; the cone checks are numerical corroboration at finitely many levels".into()),
        );
        if c0 && agree && d.contained && levels_ok && r.multiplicity.algebraic == 2 {
            c.verdict = Verdict::C1CertifiedExtraordinary;
        }
        return Ok(());
    }

    // Valence 3.
    let bound = r.mu0.abs.max(r.rho_b).max(r.rho_a);
    let holds = lambda > bound + cfg.inequality_margin;
    c.push("valence3_inequality", json!({ "lambda": num(lambda), "max_competitor": num(bound), "holds": holds }));
    if holds {
        if let Some(mesh) = iterate(c, s, cfg)? {
            push_char_mesh(c, &mesh);
            let d = cone_check(&mesh, s, false);
            push_cone(c, "nabla2_characteristic", &d, Cone::spokes(m, false));
            c.cite(VALENCE3_REMARK).cite(CONE_LEMMA).cite(REIF);
            if c0 && d.contained {
                c.verdict = Verdict::C1CertifiedExtraordinary;
            }
        }
        return Ok(());
    }
    // Inequality fails: look for exactly two generalized eigenvectors and a
    // characteristic mesh with vertical differences in the pointed cone.
    let _ = iterate(c, s, cfg)?;
    let full = generalized_eigenvector_rank(s, lambda, cfg.rank_tol);
    let (mesh, chain) = match chain_top(s, &a.blocks, lambda, cfg.rank_tol) {
        Ok(x) => x,
        Err(Error::Numerical(msg)) => {
            c.push_note("generalized_eigenvectors", json!({ "kernel": full.0, "kernel2": full.1 }), &msg);
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    push_chain(c, &chain, full);
    push_char_mesh(c, &mesh);
    let d0 = cone_check(&mesh, s, true);
    push_cone(c, "nabla2_characteristic", &d0, Cone::spokes(m, true));
    if c0 && full.1 - full.0 == 2 && d0.contained {
        c.cite(JORDAN_CRITERION).cite(CONE_LEMMA);
        c.verdict = Verdict::C1CertifiedExtraordinary;
    }
    Ok(())
}

/// Looks for cone violations of a word outside the covered classes: in the
/// characteristic mesh, at finite levels on the c.rho-net and on a larger
/// grid mesh after two rounds.
fn cone_evidence(c: &mut Certificate, analysed: &OperatorWord, a: &Analysis, m: usize, cfg: &AnalysisConfig) -> Result<()> {
    let s = &a.matrix;
    let mut witnesses: Vec<Value> = Vec::new();
    let mut record = |source: &str, check: &ConeCheck<EdgeLabel>| {
        for w in &check.violations {
            witnesses.push(json!({ "source": source, "edge": to_value(w) }));
        }
    };
    if let Some(mesh) = iterate(c, s, cfg)? {
        push_char_mesh(c, &mesh);
        record("characteristic-mesh", &cone_check(&mesh, s, false));
    }
    for (k, l) in finite_level_cones(s, analysed.sigma(), cfg.cone_levels).iter().enumerate() {
        record(&format!("level-{k}"), l);
    }
    let kind = analysed.stable_kind().unwrap_or(s.kind);
    let phi = 2.0 * PI / m as f64;
    let edges = grid_differences(analysed, kind, phi, 2, 4, GridStyle::Centered)?;
    record("grid-two-rounds", &cone_contains(&Cone::spokes(m, true), &edges, zero_tol(&edges)));
    if witnesses.is_empty() {
        c.push_note("cone_violation", Value::Null, "cone evidence present, no covering theorem");
    } else {
        c.push("cone_violation", Value::Array(witnesses));
    }
    Ok(())
}

/// Largest deviation between `B N` and `A^2 N` over primal grid nets of
/// every non-zero frequency.
pub fn b_matches_a2(word: &OperatorWord, m: usize) -> Result<f64> {
    let aa = OperatorWord { factors: vec![Factor::A, Factor::A] };
    let mut worst: f64 = 0.0;
    let mut seen = Vec::new();
    for f in &word.factors {
        let Factor::B(p) = f else { continue };
        if seen.contains(&p) {
            continue;
        }
        seen.push(p);
        let b = OperatorWord { factors: vec![f.clone()] };
        for freq in 1..m {
            let net = build_grid_mesh(m, freq, 4, NetKind::Primal)?;
            let x = apply_word_net(&net, &b, 1, None)?;
            let y = apply_word_net(&net, &aa, 1, None)?;
            for (v, k) in x.index.iter().enumerate() {
                if let Some(u) = y.vertex(k) {
                    let (p, q) = (x.mesh.positions[v], y.mesh.positions[u]);
                    worst = worst.max((p[0] - q[0]).hypot(p[1] - q[1]));
                }
            }
            if x.vertex(&NetIndex::Center).is_none() {
                return Err(Error::Structural("smoothing lost the centre vertex".into()));
            }
        }
    }
    Ok(worst)
}

/// Generalized Catmull-Clark words `B_r...B_1 R` and `A B_r...B_1 R`.
pub fn certify_gcc(word: &OperatorWord, m: usize, cfg: &AnalysisConfig) -> Result<Certificate> {
    let WordClass::GeneralizedCc { degree, restricted } = word.classify() else {
        return Ok(invalid(word, m, "not a generalized Catmull-Clark word"));
    };
    if m < 3 {
        return Ok(invalid(word, m, &format!("valence must be at least 3, got {m}")));
    }
    if m == 4 && restricted {
        let mut c = certify_regular(word)?;
        c.subject.valence = Some(4);
        return Ok(c);
    }
    let a = analyse(word, m, cfg.rho, &cfg.eigen())?;
    let mut c = Certificate::new(subject(word, m), Verdict::NotCertifiable);
    c.push("class", json!({ "class": "generalized-catmull-clark", "degree": degree, "restricted": restricted }));
    push_spectrum(&mut c, &a);
    let c0 = push_c0(&mut c, &a.matrix, cfg)?;
    let r = &a.report;
    let lambda = r.lambda_subdominant;
    let beats_mu0 = lambda > r.mu0.abs + cfg.inequality_margin;
    c.push("lambda_exceeds_mu0", Value::Bool(beats_mu0));
    let dev = b_matches_a2(word, m)?;
    c.push("b_equals_a2_on_symmetric_nets", json!({ "max_deviation": num(dev), "holds": dev <= 1e-12 }));

    if restricted {
        if (m >= 5 || m == 3) && beats_mu0 && c0 {
            c.cite(GCC_THEOREM).cite(REIF);
            c.verdict = Verdict::C1CertifiedExtraordinary;
        }
        return Ok(c);
    }
    let constant = word.factors.iter().all(|f| match f {
        Factor::B(p) => p.is_constant(),
        _ => true,
    });
    let competitor = r.mu0.abs.max(r.rho_b).max(r.rho_a);
    let conditions = [
        m >= 5 && constant,
        m >= 5 && !constant && beats_mu0,
        m == 3 && lambda > competitor + cfg.inequality_margin,
    ];
    c.push("conditions", json!({ "1": conditions[0], "2": conditions[1], "3": conditions[2] }));
    if c0 && conditions.iter().any(|&x| x) {
        c.cite(GCC_REMARK);
        c.verdict = Verdict::C1CertifiedExtraordinary;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::word::parse_word;
    use crate::spectral::matrix::build_subdivision_matrix;

    fn verdict(w: &str, m: usize) -> Certificate {
        certify_extraordinary(&parse_word(w).unwrap(), m, &AnalysisConfig::default()).unwrap()
    }

    #[test]
    fn vav_valence_seven() {
        let c = verdict("VAV", 7);
        assert_eq!(c.verdict, Verdict::C1CertifiedExtraordinary, "{:#?}", c.evidence);
    }

    #[test]
    fn midpoint_valence_five_and_three() {
        assert_eq!(verdict("AAR", 5).verdict, Verdict::C1CertifiedExtraordinary);
        assert_eq!(verdict("AAR", 3).verdict, Verdict::C1CertifiedExtraordinary);
    }

    #[test]
    fn mid_edge_valence_three_needs_the_jordan_path() {
        let c = verdict("VV", 3);
        assert_eq!(c.verdict, Verdict::C1CertifiedExtraordinary, "{:#?}", c.evidence);
        assert_eq!(c.evidence("generalized_eigenvectors").unwrap()["generalized"], 2);
        assert_eq!(c.evidence("valence3_inequality").unwrap()["holds"], false);
    }

    #[test]
    fn non_vav_is_outside_the_technique() {
        let c = verdict("VRVR", 5);
        assert_eq!(c.verdict, Verdict::TechniqueInapplicable);
        assert!(c.evidence("cone_violation").is_some());
    }

    #[test]
    fn invalid_words_are_values() {
        assert_eq!(verdict("R", 5).verdict, Verdict::InvalidInput);
        assert_eq!(verdict("AAR", 2).verdict, Verdict::InvalidInput);
    }

    #[test]
    fn multiplicities_of_midpoint() {
        let s = build_subdivision_matrix(&parse_word("AAR").unwrap(), 5, None).unwrap();
        let c = check_c0(&s, 40, 1e-6).unwrap();
        assert!(c.certified);
        let a = analyse(&parse_word("AAR").unwrap(), 5, None, &Default::default()).unwrap();
        assert_eq!(generalized_eigenvector_rank(&s, a.report.lambda_subdominant, 1e-9), (2, 2));
    }

    #[test]
    fn gcc_with_midpoint_parameters() {
        let c = certify_gcc(&parse_word("B(1/4,1/2)R").unwrap(), 5, &AnalysisConfig::default()).unwrap();
        assert_eq!(c.verdict, Verdict::C1CertifiedExtraordinary, "{:#?}", c.evidence);
        assert_eq!(c.evidence("b_equals_a2_on_symmetric_nets").unwrap()["holds"], true);
    }

    #[test]
    fn gcc_with_other_parameters() {
        let c = certify_gcc(&parse_word("B(9/20,9/20)R").unwrap(), 5, &AnalysisConfig::default()).unwrap();
        let lambda = c.evidence("lambda").unwrap().as_f64().unwrap();
        let mu0 = c.evidence("mu0").unwrap()["abs"].as_f64().unwrap();
        assert_eq!(c.verdict.is_certified(), lambda > mu0 + 1e-9);
        assert_eq!(c.evidence("b_equals_a2_on_symmetric_nets").unwrap()["holds"], true);
    }
}
