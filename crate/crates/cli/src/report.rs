//! Curvature and singularity tables, the Weingarten residual table and the
//! human-readable summary.
//!
//! Floats are written with 17 significant digits. Infinite values are the
//! strings `inf+` / `inf-`, missing values `nan`; the `flags` column says why.

use semidiscrete::curvature::{curvature_table, weingarten_residual, Curv, Sign, WeingartenRelation};
use semidiscrete::holo::HoloNet;
use semidiscrete::singularity::{
    classify_vertex, cmc1_edge_circle_test, condition_c, maximal_edge_circle_test, refine_fp_vs_s,
    singular_edge_lorentz, theta_singular_interval, DirClass, PlaneVariant, Refinement,
};
use semidiscrete::surface::Epsilon;
use semidiscrete::{Ambient, SemiDiscreteSurface};

pub fn fnum(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf+".into()
    } else if v == f64::NEG_INFINITY {
        "inf-".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn fcurv(c: Option<Curv>) -> String {
    match c {
        Some(Curv::Finite(v)) => fnum(v),
        Some(Curv::Infinite(Sign::Neg)) => "inf-".into(),
        Some(Curv::Infinite(_)) => "inf+".into(),
        None => "nan".into(),
    }
}

fn fbool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "true",
        Some(false) => "false",
        None => "n/a",
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

pub const CURVATURE_HEADER: [&str; 9] = ["k", "t", "kappa", "kappa01", "K_mixed", "H_mixed", "K_closed", "H_closed", "flags"];

pub fn curvature_csv(surface: &SemiDiscreteSurface) -> Vec<u8> {
    let grid = surface.grid;
    let rows = curvature_table(surface).into_iter().map(|r| {
        vec![
            grid.k(r.strip).to_string(),
            fnum(grid.t(r.sample)),
            fcurv(r.kappa),
            fcurv(r.kappa01),
            fcurv(r.mixed.map(|c| c.k)),
            fcurv(r.mixed.map(|c| c.h)),
            fcurv(r.closed.map(|c| c.k)),
            fcurv(r.closed.map(|c| c.h)),
            r.flags.join(";"),
        ]
    });
    csv_bytes(&CURVATURE_HEADER, rows)
}

/// Which edge-level theorem data apply to a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeTests {
    /// Riemannian ambient: no singular edges.
    None,
    /// Spacelike test of the tangent plane only.
    TangentPlane,
    /// Maximal surface: tangent plane and the circle test on `g`.
    Maximal,
    /// CMC 1 surface in S^{2,1}: plane `P(n, n₁)`, circle test and condition (C).
    Cmc1,
}

impl EdgeTests {
    fn plane(self) -> Option<PlaneVariant> {
        match self {
            EdgeTests::None => None,
            EdgeTests::TangentPlane | EdgeTests::Maximal => Some(PlaneVariant::TangentPlane),
            EdgeTests::Cmc1 => Some(PlaneVariant::CMC1Plane),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SingularityCounts {
    pub vertices: usize,
    pub discrete_fps: usize,
    pub discrete_s: usize,
    pub smooth_fps: usize,
    pub smooth_s: usize,
    pub refine_fp: usize,
    pub refine_s: usize,
    pub classify_errors: usize,
    /// `None` when singular edges do not apply.
    pub singular_edges: Option<usize>,
    pub edge_errors: usize,
    pub circle_checked: usize,
    pub circle_disagreements: usize,
    /// Parallel min/max surfaces: vertices compared with the θ-intervals,
    /// and how many disagree with the classification.
    pub theta_checked: usize,
    pub theta_disagreements: usize,
}

impl SingularityCounts {
    /// Vertices with any non-trivial classification.
    pub fn flagged(&self) -> usize {
        self.discrete_fps + self.discrete_s + self.smooth_fps + self.smooth_s
    }
}

pub const SINGULARITY_HEADER: [&str; 10] = [
    "k",
    "t",
    "discrete_dir",
    "smooth_dir",
    "refine",
    "edge_spacelike_left",
    "edge_spacelike_right",
    "circle_test",
    "condition_C",
    "flags",
];

/// Data for the θ-interval cross-check on parallel min/max surfaces.
#[derive(Debug, Clone, Copy)]
pub struct ThetaCheck<'a> {
    pub net: &'a HoloNet,
    pub eps: Epsilon,
    pub theta: f64,
}

/// Points closer than this to an interval endpoint are not compared.
pub const THETA_BAND: f64 = 1e-9;

pub fn singularity_csv(
    surface: &SemiDiscreteSurface,
    net: &HoloNet,
    tests: EdgeTests,
    theta_check: Option<ThetaCheck>,
    inf_threshold: f64,
) -> (Vec<u8>, SingularityCounts) {
    let grid = surface.grid;
    let (ns, nt) = (surface.strips(), surface.samples());
    let mut counts = SingularityCounts { singular_edges: tests.plane().map(|_| 0), ..Default::default() };
    // Edge status per (gap, sample), computed once.
    let mut edge_status: Vec<Option<bool>> = vec![None; ns.saturating_sub(1) * nt];
    if let Some(plane) = tests.plane() {
        for i in 0..ns.saturating_sub(1) {
            for j in 0..nt {
                match singular_edge_lorentz(surface, i, j, plane) {
                    Ok(st) => {
                        edge_status[i * nt + j] = Some(st.spacelike);
                        if st.singular {
                            *counts.singular_edges.as_mut().unwrap() += 1;
                        }
                        let circle = match tests {
                            EdgeTests::Maximal => maximal_edge_circle_test(net, i, j).ok(),
                            EdgeTests::Cmc1 => cmc1_edge_circle_test(net, i, j).ok(),
                            _ => None,
                        };
                        if let Some(c) = circle {
                            counts.circle_checked += 1;
                            counts.circle_disagreements += (c != st.singular) as usize;
                        }
                    }
                    Err(_) => counts.edge_errors += 1,
                }
            }
        }
    }
    let mut rows = Vec::with_capacity(ns * nt);
    for i in 0..ns {
        for j in 0..nt {
            counts.vertices += 1;
            let mut flags: Vec<&str> = Vec::new();
            let (dd, sd, refine) = match classify_vertex(surface, i, j, inf_threshold) {
                Ok(vc) => {
                    let refine = refine_fp_vs_s(surface, i, j, inf_threshold);
                    match vc.discrete_dir {
                        DirClass::Fps => counts.discrete_fps += 1,
                        DirClass::S => counts.discrete_s += 1,
                        _ => {}
                    }
                    match vc.smooth_dir {
                        DirClass::Fps => counts.smooth_fps += 1,
                        DirClass::S => counts.smooth_s += 1,
                        _ => {}
                    }
                    match refine {
                        Refinement::Fp => counts.refine_fp += 1,
                        Refinement::S => counts.refine_s += 1,
                        Refinement::NotApplicable => {}
                    }
                    if vc.boundary {
                        flags.push("boundary");
                    }
                    if let Some(tc) = theta_check.filter(|_| !vc.boundary) {
                        theta_compare(tc, i, j, vc.discrete_dir, vc.smooth_dir, &mut counts, &mut flags);
                    }
                    (vc.discrete_dir.label(), vc.smooth_dir.label(), refine.label())
                }
                Err(_) => {
                    counts.classify_errors += 1;
                    flags.push("classification_failed");
                    ("n/a", "n/a", "n/a")
                }
            };
            let edge = |gap: Option<usize>| -> &'static str {
                match (tests.plane(), gap) {
                    (Some(_), Some(g)) if g + 1 < ns => match edge_status[g * nt + j] {
                        Some(b) => fbool(Some(b)),
                        None => "error",
                    },
                    _ => "n/a",
                }
            };
            let left = edge(i.checked_sub(1));
            let right = edge(Some(i));
            let has_right = i + 1 < ns;
            let circle = match tests {
                EdgeTests::Maximal if has_right => fbool(maximal_edge_circle_test(net, i, j).ok()),
                EdgeTests::Cmc1 if has_right => fbool(cmc1_edge_circle_test(net, i, j).ok()),
                _ => "n/a",
            };
            let cond = match tests {
                EdgeTests::Cmc1 if has_right => fbool(Some(condition_c(net.g(i, j), net.dg(i, j), net.g(i + 1, j)))),
                _ => "n/a",
            };
            rows.push(vec![
                grid.k(i).to_string(),
                fnum(grid.t(j)),
                dd.to_string(),
                sd.to_string(),
                refine.to_string(),
                left.to_string(),
                right.to_string(),
                circle.to_string(),
                cond.to_string(),
                flags.join(";"),
            ]);
        }
    }
    (csv_bytes(&SINGULARITY_HEADER, rows), counts)
}

fn theta_compare(
    tc: ThetaCheck,
    i: usize,
    j: usize,
    discrete: DirClass,
    smooth: DirClass,
    counts: &mut SingularityCounts,
    flags: &mut Vec<&str>,
) {
    let Ok(iv) = theta_singular_interval(tc.net, tc.eps, i, j) else {
        flags.push("theta_interval_unavailable");
        return;
    };
    let th = tc.theta;
    if let Some(d) = iv.discrete.filter(|d| d.endpoint_distance(th) >= THETA_BAND) {
        counts.theta_checked += 1;
        if d.contains(th) != (discrete != DirClass::None) {
            counts.theta_disagreements += 1;
            flags.push("theta_interval_mismatch_discrete");
        }
    }
    let smooth_ivs = [iv.smooth_prev, iv.smooth_next];
    if smooth_ivs.iter().flatten().all(|s| s.endpoint_distance(th) >= THETA_BAND) {
        counts.theta_checked += 1;
        let inside = smooth_ivs.iter().flatten().any(|s| s.contains(th));
        if inside != (smooth != DirClass::None) {
            counts.theta_disagreements += 1;
            flags.push("theta_interval_mismatch_smooth");
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenRow {
    pub theta: f64,
    pub s_theta: Option<f64>,
    pub relation: String,
    pub evaluated: usize,
    pub skipped: usize,
    pub max_residual: f64,
    pub pass: bool,
}

pub fn relation_label(r: WeingartenRelation) -> String {
    match r {
        WeingartenRelation::MinMax => "H=0".into(),
        WeingartenRelation::ParallelFlat(t) => format!("H+({t})K=0"),
        WeingartenRelation::BrLW(s) | WeingartenRelation::ParallelCurved(s) => format!("2s(H-1)+(1-s)(K-1)=0 s={s}"),
        WeingartenRelation::BiLW(s) => format!("2s(H-1)-(1+s)(K-1)=0 s={s}"),
    }
}

pub fn weingarten_row(
    surface: &SemiDiscreteSurface,
    relation: WeingartenRelation,
    theta: f64,
    s_theta: Option<f64>,
    tol: f64,
) -> WeingartenRow {
    let r = weingarten_residual(surface, relation);
    WeingartenRow {
        theta,
        s_theta,
        relation: relation_label(relation),
        evaluated: r.evaluated,
        skipped: r.skipped,
        max_residual: r.max_residual,
        pass: r.evaluated > 0 && r.max_residual <= tol,
    }
}

pub const WEINGARTEN_HEADER: [&str; 7] = ["theta", "s_theta", "relation", "evaluated", "skipped", "max_residual", "pass"];

pub fn weingarten_csv(rows: &[WeingartenRow]) -> Vec<u8> {
    csv_bytes(
        &WEINGARTEN_HEADER,
        rows.iter().map(|r| {
            vec![
                fnum(r.theta),
                r.s_theta.map(fnum).unwrap_or_else(|| "n/a".into()),
                r.relation.clone(),
                r.evaluated.to_string(),
                r.skipped.to_string(),
                fnum(r.max_residual),
                r.pass.to_string(),
            ]
        }),
    )
}

/// Outcome of an adjacency theorem check over a whole job.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyResult {
    pub name: &'static str,
    pub singular_vertices: usize,
    pub violations: usize,
    pub error: Option<String>,
}

impl AdjacencyResult {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberSummary {
    pub theta: f64,
    pub s_theta: Option<f64>,
    pub ambient: Ambient,
    pub stem: String,
    pub vertices: usize,
    pub faces: Option<usize>,
    pub counts: Option<SingularityCounts>,
    pub weingarten: Option<WeingartenRow>,
    pub constraint_residual: f64,
}

pub fn summary_text(family: &str, grid: &str, members: &[MemberSummary], adjacency: &[AdjacencyResult]) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let mut all_pass = true;
    writeln!(out, "family: {family}").unwrap();
    writeln!(out, "grid: {grid}").unwrap();
    for m in members {
        writeln!(out, "\n[theta = {}] {}", m.theta, m.stem).unwrap();
        if let Some(s) = m.s_theta {
            writeln!(out, "  s_theta: {s}").unwrap();
        }
        writeln!(out, "  ambient: {:?}", m.ambient).unwrap();
        writeln!(out, "  vertices: {}", m.vertices).unwrap();
        if let Some(f) = m.faces {
            writeln!(out, "  faces: {f}").unwrap();
        }
        writeln!(out, "  constraint residual: {:.3e}", m.constraint_residual).unwrap();
        if let Some(c) = &m.counts {
            writeln!(out, "  discrete direction: {} FPS, {} S", c.discrete_fps, c.discrete_s).unwrap();
            writeln!(out, "  smooth direction: {} FPS, {} S (refined: {} FP, {} S)", c.smooth_fps, c.smooth_s, c.refine_fp, c.refine_s)
                .unwrap();
            if c.classify_errors > 0 {
                writeln!(out, "  classification failures: {}", c.classify_errors).unwrap();
            }
            match c.singular_edges {
                Some(n) => writeln!(out, "  singular edges: {n} ({} edges without a status)", c.edge_errors).unwrap(),
                None => writeln!(out, "  singular edges: not applicable (Riemannian ambient)").unwrap(),
            }
            if c.circle_checked > 0 {
                writeln!(out, "  circle test disagreements: {} of {}", c.circle_disagreements, c.circle_checked).unwrap();
            }
            if c.theta_checked > 0 {
                let ok = c.theta_disagreements == 0;
                all_pass &= ok;
                writeln!(
                    out,
                    "  theta-interval check: {} ({} disagreements of {})",
                    if ok { "pass" } else { "FAIL" },
                    c.theta_disagreements,
                    c.theta_checked
                )
                .unwrap();
            }
        }
        if let Some(w) = &m.weingarten {
            all_pass &= w.pass;
            writeln!(
                out,
                "  weingarten {}: max residual {:.3e} over {} edges ({} skipped): {}",
                w.relation,
                w.max_residual,
                w.evaluated,
                w.skipped,
                if w.pass { "pass" } else { "FAIL" }
            )
            .unwrap();
        }
    }
    if !adjacency.is_empty() {
        out.push('\n');
    }
    for a in adjacency {
        all_pass &= a.pass();
        match &a.error {
            Some(e) => writeln!(out, "{}: FAIL ({e})", a.name).unwrap(),
            None => writeln!(
                out,
                "{}: {} ({} violations, {} singular vertices)",
                a.name,
                if a.pass() { "pass" } else { "FAIL" },
                a.violations,
                a.singular_vertices
            )
            .unwrap(),
        }
    }
    writeln!(out, "\noverall: {}", if all_pass { "pass" } else { "FAIL" }).unwrap();
    out
}
