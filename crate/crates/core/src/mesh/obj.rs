//! Wavefront OBJ reading and writing (`v` and `f` records only).

use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use super::QuadMesh;
use crate::error::{Error, Result};

pub fn parse_obj(text: &str) -> Result<QuadMesh> {
    let mut positions = Vec::new();
    let mut faces = Vec::new();
    let mut ignored: Vec<&str> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut parts = line.split_whitespace();
        let Some(tag) = parts.next() else { continue };
        match tag {
            "v" => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::InvalidMesh(format!("line {}: {e}", lineno + 1)))?;
                if coords.len() < 2 {
                    return Err(Error::InvalidMesh(format!(
                        "line {}: vertex needs at least two coordinates",
                        lineno + 1
                    )));
                }
                positions.push([coords[0], coords[1], coords.get(2).copied().unwrap_or(0.0)]);
            }
            "f" => {
                let mut face = Vec::new();
                for item in parts {
                    let idx = item.split('/').next().unwrap_or("");
                    let k: i64 = idx.parse().map_err(|_| {
                        Error::InvalidMesh(format!("line {}: bad face index `{item}`", lineno + 1))
                    })?;
                    let v = if k < 0 { positions.len() as i64 + k } else { k - 1 };
                    if v < 0 {
                        return Err(Error::InvalidMesh(format!(
                            "line {}: face index {k} out of range",
                            lineno + 1
                        )));
                    }
                    face.push(v as usize);
                }
                faces.push(face);
            }
            "l" => {
                return Err(Error::NonManifold {
                    edges: parts
                        .filter_map(|s| s.parse::<usize>().ok())
                        .collect::<Vec<_>>()
                        .windows(2)
                        .map(|w| (w[0].saturating_sub(1), w[1].saturating_sub(1)))
                        .collect(),
                })
            }
            other => {
                if !ignored.contains(&other) {
                    ignored.push(other);
                }
            }
        }
    }
    if !ignored.is_empty() {
        warn!("ignoring unsupported OBJ records: {}", ignored.join(", "));
    }
    QuadMesh::new(positions, &faces, 3)
}

pub fn read_obj(path: &Path) -> Result<QuadMesh> {
    parse_obj(&std::fs::read_to_string(path)?)
}

/// Coordinates are printed with nine significant digits; planar meshes are
/// written with z = 0.
pub fn format_obj(mesh: &QuadMesh) -> String {
    let mut s = String::new();
    for p in &mesh.positions {
        let z = if mesh.dim == 2 { 0.0 } else { p[2] };
        let _ = writeln!(s, "v {} {} {}", sig9(p[0]), sig9(p[1]), sig9(z));
    }
    for face in mesh.topology.faces() {
        s.push('f');
        for v in face {
            let _ = write!(s, " {}", v + 1);
        }
        s.push('\n');
    }
    s
}

pub fn write_obj(mesh: &QuadMesh, path: &Path) -> Result<()> {
    std::fs::write(path, format_obj(mesh))?;
    Ok(())
}

fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{x:.8e}");
    // Round-trips through f64 parsing; keep it compact when possible.
    match s.parse::<f64>() {
        Ok(v) => format!("{v}"),
        Err(_) => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBE: &str = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
        f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf 4 1 5 8\n";

    #[test]
    fn cube_reads() {
        let m = parse_obj(CUBE).unwrap();
        assert_eq!(m.n_vertices(), 8);
        assert_eq!(m.n_faces(), 6);
        assert!((0..8).all(|v| m.topology.vertex_valence(v) == 3 && m.topology.is_interior_vertex(v)));
    }

    #[test]
    fn nine_digit_round_trip() {
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(-2.5), "-2.5");
    }

    #[test]
    fn line_records_are_rejected() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\nl 1 2\n";
        assert!(matches!(parse_obj(text), Err(Error::NonManifold { .. })));
    }
}
