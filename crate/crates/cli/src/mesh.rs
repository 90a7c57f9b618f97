//! Triangle meshes of sampled surfaces, written as OBJ or ascii PLY.
//!
//! One vertex per grid sample, in grid order. Cells that straddle a crossing
//! or join the two sheets of H³ get no faces, so every piece becomes its own
//! connected component. Attributes that cannot be evaluated are written as
//! `nan` and flagged in the `flags` property (see [`flag`]).

use std::fmt::Write as _;

use semidiscrete::curvature::{fit_principal_edge, fit_principal_smooth, gauss_mean_mixed, Curv};
use semidiscrete::singularity::{classify_vertex, refine_fp_vs_s, DirClass, Refinement};
use semidiscrete::{Sheet, SemiDiscreteSurface};

use crate::projection::{project_ambient, ProjectionError};

/// Bits of the per-vertex `flags` property.
pub mod flag {
    /// K and H unavailable (degenerate or non-proportional mixed areas).
    pub const NO_KH: u8 = 1;
    /// K or H infinite.
    pub const INFINITE_KH: u8 = 2;
    /// κ unavailable or infinite.
    pub const KAPPA: u8 = 4;
    /// κ₀₁ unavailable or infinite (always set on the last strip).
    pub const KAPPA01: u8 = 8;
    /// Vertex classification failed.
    pub const CLASS: u8 = 16;
}

/// Codes of the `class_discrete` / `class_smooth` properties.
pub fn class_code(d: DirClass, refinement: Refinement) -> u8 {
    match (d, refinement) {
        (DirClass::Fps, Refinement::Fp) => 3,
        (DirClass::Fps, Refinement::S) | (DirClass::S, _) => 2,
        (DirClass::Fps, _) | (DirClass::Fp, _) => 1,
        (DirClass::None, _) => 0,
    }
}

pub const ATTRIBUTE_NAMES: [&str; 4] = ["K", "H", "kappa", "kappa01"];

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Values per vertex in the order of [`ATTRIBUTE_NAMES`]; `NaN` marks a
    /// flagged value.
    pub attributes: Vec<[f64; 4]>,
    pub class_discrete: Vec<u8>,
    pub class_smooth: Vec<u8>,
    /// +1 / −1 on the sheets of H³, 0 elsewhere.
    pub sheet: Vec<i8>,
    pub piece: Vec<u32>,
    pub flags: Vec<u8>,
}

fn curv_value(c: Curv) -> Option<f64> {
    c.value()
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Projects the surface and attaches curvature and classification data.
pub fn build_mesh(surface: &SemiDiscreteSurface, tol: f64, inf_threshold: f64) -> Result<Mesh, ProjectionError> {
    let (ns, nt) = (surface.strips(), surface.samples());
    let mut m = Mesh {
        vertices: Vec::with_capacity(ns * nt),
        faces: Vec::new(),
        attributes: Vec::with_capacity(ns * nt),
        class_discrete: Vec::with_capacity(ns * nt),
        class_smooth: Vec::with_capacity(ns * nt),
        sheet: Vec::with_capacity(ns * nt),
        piece: surface.piece.clone(),
        flags: Vec::with_capacity(ns * nt),
    };
    for i in 0..ns {
        for j in 0..nt {
            m.vertices.push(project_ambient(&surface.x(i, j), surface.ambient, tol)?);
            let mut flags = 0;
            let edge = if i + 1 < ns { i } else { i.saturating_sub(1) };
            let (k, h) = match (ns > 1).then(|| gauss_mean_mixed(surface, edge, j)) {
                Some(Ok(c)) => match (curv_value(c.k), curv_value(c.h)) {
                    (Some(k), Some(h)) => (k, h),
                    _ => {
                        flags |= flag::INFINITE_KH;
                        (f64::NAN, f64::NAN)
                    }
                },
                _ => {
                    flags |= flag::NO_KH;
                    (f64::NAN, f64::NAN)
                }
            };
            let kappa = fit_principal_smooth(surface, i, j).ok().and_then(|p| curv_value(p.value));
            if kappa.is_none() {
                flags |= flag::KAPPA;
            }
            let kappa01 = (i + 1 < ns)
                .then(|| fit_principal_edge(surface, i, j).ok().and_then(|p| curv_value(p.value)))
                .flatten();
            if kappa01.is_none() {
                flags |= flag::KAPPA01;
            }
            m.attributes.push([k, h, kappa.unwrap_or(f64::NAN), kappa01.unwrap_or(f64::NAN)]);
            let (cd, cs) = match classify_vertex(surface, i, j, inf_threshold) {
                Ok(vc) => {
                    let refinement = refine_fp_vs_s(surface, i, j, inf_threshold);
                    (class_code(vc.discrete_dir, Refinement::NotApplicable), class_code(vc.smooth_dir, refinement))
                }
                Err(_) => {
                    flags |= flag::CLASS;
                    (0, 0)
                }
            };
            m.class_discrete.push(cd);
            m.class_smooth.push(cs);
            m.sheet.push(match surface.sheet(i, j) {
                Some(Sheet::Plus) => 1,
                Some(Sheet::Minus) => -1,
                None => 0,
            });
            m.flags.push(flags);
        }
    }
    for i in 0..ns.saturating_sub(1) {
        for j in 0..nt.saturating_sub(1) {
            if !surface.cell_is_regular(i, j) {
                continue;
            }
            let (a, b, c, d) = (surface.idx(i, j), surface.idx(i + 1, j), surface.idx(i + 1, j + 1), surface.idx(i, j + 1));
            let corners = [a, b, c, d];
            if corners.iter().any(|&v| m.sheet[v] != m.sheet[a]) {
                continue;
            }
            let p = |v: usize| m.vertices[v];
            if dist(p(a), p(c)) <= dist(p(b), p(d)) {
                m.faces.push([a, b, c]);
                m.faces.push([a, c, d]);
            } else {
                m.faces.push([a, b, d]);
                m.faces.push([b, c, d]);
            }
        }
    }
    Ok(m)
}

fn num(out: &mut String, v: f64) {
    if v.is_nan() {
        out.push_str("nan");
    } else {
        // Shortest representation that reads back to the same double.
        write!(out, "{v:?}").unwrap();
    }
}

pub fn to_obj(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("# semidiscrete surface mesh\n");
    for v in &mesh.vertices {
        out.push('v');
        for c in v {
            out.push(' ');
            num(&mut out, *c);
        }
        out.push('\n');
    }
    for f in &mesh.faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}

pub fn to_ply(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\ncomment non-finite attributes are written as nan and flagged\n");
    writeln!(out, "element vertex {}", mesh.vertices.len()).unwrap();
    for name in ["x", "y", "z"].iter().chain(ATTRIBUTE_NAMES.iter()) {
        writeln!(out, "property double {name}").unwrap();
    }
    out.push_str("property uchar class_discrete\nproperty uchar class_smooth\nproperty char sheet\n");
    out.push_str("property uint piece\nproperty uchar flags\n");
    writeln!(out, "element face {}", mesh.faces.len()).unwrap();
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for (idx, v) in mesh.vertices.iter().enumerate() {
        for (n, c) in v.iter().chain(mesh.attributes[idx].iter()).enumerate() {
            if n > 0 {
                out.push(' ');
            }
            num(&mut out, *c);
        }
        writeln!(
            out,
            " {} {} {} {} {}",
            mesh.class_discrete[idx], mesh.class_smooth[idx], mesh.sheet[idx], mesh.piece[idx], mesh.flags[idx]
        )
        .unwrap();
    }
    for f in &mesh.faces {
        writeln!(out, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    out
}

/// Positions and faces read back from a mesh file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
    /// PLY vertex property names and rows (positions included); empty for OBJ.
    pub properties: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn parse_f(tok: &str) -> Result<f64, String> {
    tok.parse::<f64>().map_err(|_| format!("bad number '{tok}'"))
}

pub fn parse_obj(text: &str) -> Result<ParsedMesh, String> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(parse_f).collect::<Result<_, _>>()?;
                if c.len() != 3 {
                    return Err(format!("line {}: vertex needs 3 coordinates", ln + 1));
                }
                vertices.push([c[0], c[1], c[2]]);
            }
            Some("f") => {
                let f = it
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or(t);
                        head.parse::<usize>().map_err(|_| format!("line {}: bad index '{t}'", ln + 1))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if f.len() < 3 || f.iter().any(|&v| v == 0 || v > vertices.len()) {
                    return Err(format!("line {}: face references a missing vertex", ln + 1));
                }
                faces.push(f.into_iter().map(|v| v - 1).collect());
            }
            _ => {}
        }
    }
    Ok(ParsedMesh { vertices, faces, properties: Vec::new(), rows: Vec::new() })
}

pub fn parse_ply(text: &str) -> Result<ParsedMesh, String> {
    let mut lines = text.lines();
    if lines.next() != Some("ply") {
        return Err("missing ply magic".into());
    }
    let (mut nv, mut nf) = (0usize, 0usize);
    let mut properties = Vec::new();
    let mut current = "";
    loop {
        let line = lines.next().ok_or("header not terminated")?;
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok.as_slice() {
            ["format", "ascii", "1.0"] | ["comment", ..] => {}
            ["format", ..] => return Err("only ascii 1.0 is supported".into()),
            ["element", "vertex", n] => {
                nv = n.parse().map_err(|_| "bad vertex count")?;
                current = "vertex";
            }
            ["element", "face", n] => {
                nf = n.parse().map_err(|_| "bad face count")?;
                current = "face";
            }
            ["property", "list", ..] if current == "face" => {}
            ["property", _, name] if current == "vertex" => properties.push(name.to_string()),
            ["end_header"] => break,
            _ => return Err(format!("unexpected header line '{line}'")),
        }
    }
    let pos: Vec<usize> = ["x", "y", "z"]
        .iter()
        .map(|p| properties.iter().position(|q| q == p).ok_or(format!("missing property {p}")))
        .collect::<Result<_, _>>()?;
    let mut vertices = Vec::with_capacity(nv);
    let mut rows = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = lines.next().ok_or("truncated vertex list")?;
        let row: Vec<f64> = line.split_whitespace().map(parse_f).collect::<Result<_, _>>()?;
        if row.len() != properties.len() {
            return Err(format!("vertex row has {} values, expected {}", row.len(), properties.len()));
        }
        vertices.push([row[pos[0]], row[pos[1]], row[pos[2]]]);
        rows.push(row);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let line = lines.next().ok_or("truncated face list")?;
        let v: Vec<usize> =
            line.split_whitespace().map(|t| t.parse().map_err(|_| format!("bad index '{t}'"))).collect::<Result<_, _>>()?;
        if v.is_empty() || v.len() != v[0] + 1 || v[1..].iter().any(|&i| i >= nv) {
            return Err(format!("malformed face '{line}'"));
        }
        faces.push(v[1..].to_vec());
    }
    Ok(ParsedMesh { vertices, faces, properties, rows })
}
