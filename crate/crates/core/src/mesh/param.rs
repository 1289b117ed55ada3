//! Exact parameter-space labels for vertices of ringnets and their
//! subdivided images.
//!
//! Every segment `l` of a ringnet carries a chart with the spoke `l` as x
//! axis and spoke `l + 1` as y axis. A vertex is labelled by its segment and
//! chart coordinates with `x > 0, y >= 0`; the centre is separate. Adjacent
//! charts are glued like quadrants of the plane, which is all that local
//! averaging needs.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Center,
    Seg { seg: usize, x: Q, y: Q },
}

impl Param {
    /// Canonical label of the point `(x, y)` given in the chart of segment `s`.
    pub fn from_chart(s: usize, x: Q, y: Q, m: usize) -> Result<Param> {
        let zero = Q::zero();
        if x.is_zero() && y.is_zero() {
            return Ok(Param::Center);
        }
        if x > zero && y >= zero {
            Ok(Param::Seg { seg: s % m, x, y })
        } else if x <= zero && y > zero {
            Ok(Param::Seg { seg: (s + 1) % m, x: y, y: -x })
        } else if x >= zero && y < zero {
            Ok(Param::Seg { seg: (s + m - 1) % m, x: -y, y: x })
        } else {
            Err(Error::Structural(format!(
                "point ({x}, {y}) of chart {s} is not local to that chart"
            )))
        }
    }

    /// Coordinates in the chart of segment `s`, if the label lies in that
    /// segment or one of its two neighbours.
    pub fn in_chart(&self, s: usize, m: usize) -> Option<(Q, Q)> {
        match *self {
            Param::Center => Some((Q::zero(), Q::zero())),
            Param::Seg { seg, x, y } => {
                if seg == s {
                    Some((x, y))
                } else if seg == (s + 1) % m {
                    Some((-y, x))
                } else if (seg + 1) % m == s {
                    Some((y, -x))
                } else {
                    None
                }
            }
        }
    }

    pub fn seg(&self) -> Option<usize> {
        match self {
            Param::Center => None,
            Param::Seg { seg, .. } => Some(*seg),
        }
    }

    /// Max-norm distance from the centre measured in chart units.
    pub fn radius(&self) -> Q {
        match self {
            Param::Center => Q::zero(),
            Param::Seg { x, y, .. } => (*x).max(*y),
        }
    }

    pub fn rotated(&self, k: usize, m: usize) -> Param {
        match *self {
            Param::Center => Param::Center,
            Param::Seg { seg, x, y } => Param::Seg { seg: (seg + k) % m, x, y },
        }
    }

    /// The label of the mirror image under `p^l_{ij} -> p^{m-1-l}_{ji}`.
    pub fn reflected(&self, m: usize) -> Param {
        match *self {
            Param::Center => Param::Center,
            Param::Seg { seg, x, y } => {
                Param::from_chart(m - 1 - seg, y, x, m).expect("reflection stays local")
            }
        }
    }

    /// Label of the centroid of `labels`, which are the vertices of one mesh
    /// element. Elements touching three or more segments surround the centre
    /// and average to it by rotational symmetry.
    pub fn centroid(labels: &[Param], m: usize) -> Result<Param> {
        let mut segs: Vec<usize> = labels.iter().filter_map(|p| p.seg()).collect();
        segs.sort_unstable();
        segs.dedup();
        let s = match segs.len() {
            0 => return Ok(Param::Center),
            1 => segs[0],
            2 => {
                let (a, b) = (segs[0], segs[1]);
                if (a + 1) % m == b {
                    a
                } else if (b + 1) % m == a {
                    b
                } else {
                    return Err(Error::Structural(format!(
                        "element spans non-adjacent segments {a} and {b}"
                    )));
                }
            }
            _ => return Ok(Param::Center),
        };
        let n = labels.len() as i64;
        let (mut sx, mut sy) = (Q::zero(), Q::zero());
        for p in labels {
            let (x, y) = p.in_chart(s, m).expect("segments checked above");
            sx += x;
            sy += y;
        }
        Param::from_chart(s, sx / n, sy / n, m)
    }

    pub fn abs_max(&self) -> Q {
        match self {
            Param::Center => Q::zero(),
            Param::Seg { x, y, .. } => x.abs().max(y.abs()),
        }
    }
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(s: usize, x: Q, y: Q) -> Param {
        Param::Seg { seg: s, x, y }
    }

    #[test]
    fn chart_round_trip() {
        let m = 5;
        let p = seg(2, q(3, 2), q(1, 2));
        for s in [1, 2, 3] {
            let (x, y) = p.in_chart(s, m).unwrap();
            assert_eq!(Param::from_chart(s, x, y, m).unwrap(), p);
        }
        assert!(p.in_chart(4, m).is_none());
    }

    #[test]
    fn spoke_points_belong_to_the_segment_they_start() {
        // (0, 1) in chart 0 lies on spoke 1.
        assert_eq!(
            Param::from_chart(0, q(0, 1), q(1, 1), 5).unwrap(),
            seg(1, q(1, 1), q(0, 1))
        );
    }

    #[test]
    fn centroid_across_a_spoke() {
        // Dual centre-face edge between h^0_11 and h^1_11.
        let a = seg(0, q(1, 2), q(1, 2));
        let b = seg(1, q(1, 2), q(1, 2));
        assert_eq!(Param::centroid(&[a, b], 3).unwrap(), seg(1, q(1, 2), q(0, 1)));
        // Wrapping pair in valence 5.
        let c = seg(4, q(1, 2), q(1, 2));
        assert_eq!(Param::centroid(&[c, a], 5).unwrap(), seg(0, q(1, 2), q(0, 1)));
    }

    #[test]
    fn centre_face_averages_to_centre() {
        let f: Vec<Param> = (0..3).map(|l| seg(l, q(1, 2), q(1, 2))).collect();
        assert_eq!(Param::centroid(&f, 3).unwrap(), Param::Center);
    }

    #[test]
    fn reflection_is_an_involution() {
        let m = 5;
        for p in [seg(0, q(1, 1), q(0, 1)), seg(3, q(3, 2), q(1, 2)), seg(1, q(2, 1), q(5, 1))] {
            assert_eq!(p.reflected(m).reflected(m), p);
        }
        // Spoke 0 is the mirror axis.
        assert_eq!(seg(0, q(1, 1), q(0, 1)).reflected(m), seg(0, q(1, 1), q(0, 1)));
    }
}
