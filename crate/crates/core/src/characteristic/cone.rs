//! Direction cones `C(a, b) = (0, inf) e^{i [min(a,b), max(a,b)]}` and their
//! pointed versions, which also contain 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

/// Angle comparisons are done with this slack (radians).
pub const ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cone {
    pub lo: f64,
    pub hi: f64,
    pub pointed: bool,
}

impl Cone {
    pub fn new(a: f64, b: f64, pointed: bool) -> Self {
        Self { lo: a.min(b), hi: a.max(b), pointed }
    }

    /// The cone spanned by the spoke directions `e^{i 2 pi / m}` and `i`.
    pub fn spokes(m: usize, pointed: bool) -> Self {
        Self::new(2.0 * PI / m as f64, PI / 2.0, pointed)
    }

    /// The cone spanned by `e^{i phi}` and `i`.
    pub fn for_angle(phi: f64, pointed: bool) -> Self {
        Self::new(phi, PI / 2.0, pointed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness<L> {
    pub label: L,
    pub re: f64,
    pub im: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeCheck<L> {
    pub contained: bool,
    pub violations: Vec<Witness<L>>,
    /// Vectors inside the cone only thanks to the angle slack.
    pub on_boundary: Vec<Witness<L>>,
}

/// Direction angle in `(-pi, pi]`.
pub fn angle(z: Complex64) -> f64 {
    z.im.atan2(z.re)
}

/// Angle of `z` unwrapped towards the cone so that cones reaching past `pi`
/// compare correctly.
fn angle_near(z: Complex64, cone: &Cone) -> f64 {
    let a = angle(z);
    let mid = 0.5 * (cone.lo + cone.hi);
    let mut best = a;
    for k in [-1.0, 1.0] {
        let b = a + k * 2.0 * PI;
        if (b - mid).abs() < (best - mid).abs() {
            best = b;
        }
    }
    best
}

/// Checks every vector; `zero_tol` decides what counts as the zero vector.
pub fn cone_contains<L: Clone>(cone: &Cone, vectors: &[(L, Complex64)], zero_tol: f64) -> ConeCheck<L> {
    let mut violations = Vec::new();
    let mut on_boundary = Vec::new();
    for (label, z) in vectors {
        let a = angle_near(*z, cone);
        let w = Witness { label: label.clone(), re: z.re, im: z.im, angle: a };
        if z.norm() <= zero_tol {
            if !cone.pointed {
                violations.push(w);
            }
            continue;
        }
        if a < cone.lo - ANGLE_TOL || a > cone.hi + ANGLE_TOL {
            violations.push(w);
        } else if a < cone.lo + ANGLE_TOL || a > cone.hi - ANGLE_TOL {
            if a < cone.lo || a > cone.hi {
                on_boundary.push(w);
            }
        }
    }
    ConeCheck { contained: violations.is_empty(), violations, on_boundary }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(cone: &Cone, z: Complex64) -> bool {
        cone_contains(cone, &[((), z)], 1e-12).contained
    }

    #[test]
    fn zero_vector_needs_a_pointed_cone() {
        let z = Complex64::new(0.0, 0.0);
        assert!(!check(&Cone::spokes(5, false), z));
        assert!(check(&Cone::spokes(5, true), z));
    }

    #[test]
    fn valence_three_cone_reaches_past_the_vertical() {
        let d = Cone::spokes(3, false);
        assert!((d.lo - PI / 2.0).abs() < 1e-15 && (d.hi - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!(check(&d, Complex64::new(-1.0, 3f64.sqrt())));
        assert!(!check(&d, Complex64::new(1.0, 3f64.sqrt())));
    }

    #[test]
    fn steep_edge_leaves_the_cone() {
        let a = PI - 16f64.atan();
        assert!((a - 1.6332).abs() < 1e-4);
        assert!(!check(&Cone::for_angle(PI / 4.0, true), Complex64::from_polar(1.0, a)));
    }

    #[test]
    fn boundary_slack_is_reported() {
        let d = Cone::spokes(4, false);
        let z = Complex64::from_polar(1.0, PI / 2.0 + 1e-10);
        let c = cone_contains(&d, &[("e", z)], 1e-12);
        assert!(c.contained);
        assert_eq!(c.on_boundary.len(), 1);
    }
}
