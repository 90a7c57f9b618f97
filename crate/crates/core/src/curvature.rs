//! Principal, Gaussian and mean curvatures of semi-discrete surfaces.
//!
//! Principal curvatures are the ratios `∂n = −κ ∂x` and `Δn = −κ₀₁ Δx`.
//! Gaussian and mean curvature on an edge come from the mixed area element
//! `A(x, y) = ¼((∂x + ∂x₁) ∧ Δy + (∂y + ∂y₁) ∧ Δx)` via
//! `A(n, n) = K·A(x, x)` and `A(x, n) = −H·A(x, x)`, or in closed form from
//! the three principal curvatures around the edge.

use num_complex::Complex64;
use thiserror::Error;

use crate::geom::{matrix_cross_ratio, wedge_apply, Ambient, GeomError, Vec4};
use crate::surface::{EdgeData, SemiDiscreteSurface};

/// Default ratio `‖∂x‖/‖∂n‖` below which a principal curvature is infinite.
pub const INF_THRESHOLD: f64 = 1e-10;
/// Largest angle (radians) between vectors that must be parallel.
pub const PARALLEL_TOL: f64 = 1e-7;
pub const PROPORTIONALITY_TOL: f64 = 1e-8;
/// `A(x, x)` with all entries below this is degenerate.
pub const DEGENERATE_AREA: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvError {
    #[error("vectors are not parallel (angle {angle:.3e} rad)")]
    NotParallel { angle: f64 },
    #[error("mixed area A(x,x) vanishes")]
    DegenerateMixedArea,
    #[error("mixed areas are not proportional (relative residual {residual:.3e})")]
    NotProportional { residual: f64 },
    #[error("umbilic degeneracy: κ + κ₁ − 2κ₀₁ vanishes")]
    UmbilicDegeneracy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v < 0.0 {
            Sign::Neg
        } else {
            Sign::Pos
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Pos => 1.0,
            Sign::Neg => -1.0,
        }
    }
}

/// A curvature value that may be infinite. Infinity is never stored as a
/// float so that "is infinite" stays a predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curv {
    Finite(f64),
    Infinite(Sign),
}

impl Curv {
    /// `num/den`, infinite when `|den| ≤ rel·|num|`.
    pub fn from_ratio(num: f64, den: f64, rel: f64) -> Curv {
        if den.abs() <= rel * num.abs() {
            let s = if den == 0.0 { num } else { num * den };
            Curv::Infinite(Sign::of(s))
        } else {
            Curv::Finite(num / den)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Curv::Finite(v) => Some(v),
            Curv::Infinite(_) => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Curv::Infinite(_))
    }

    /// −1, 0 or +1.
    pub fn signum(self) -> f64 {
        match self {
            Curv::Finite(v) if v == 0.0 => 0.0,
            Curv::Finite(v) => v.signum(),
            Curv::Infinite(s) => s.value(),
        }
    }

    /// Unit-norm homogeneous coordinates `(num, den)`.
    pub fn homogeneous(self) -> (f64, f64) {
        match self {
            Curv::Finite(v) => {
                let r = v.hypot(1.0);
                (v / r, 1.0 / r)
            }
            Curv::Infinite(s) => (s.value(), 0.0),
        }
    }
}

/// Fitted principal curvature with its least-squares residual
/// `‖∂n + κ∂x‖/‖∂x‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalCurvature {
    pub value: Curv,
    pub fit_residual: f64,
}

/// Least-squares `κ` with `dn ≈ −κ·d`, using the coordinate dot product.
pub fn fit_ratio(d: &Vec4, dn: &Vec4, inf_threshold: f64) -> Result<PrincipalCurvature, CurvError> {
    let (nd, nn) = (d.norm(), dn.norm());
    if nd <= inf_threshold * nn {
        let s = -d.dot(dn);
        return Ok(PrincipalCurvature { value: Curv::Infinite(Sign::of(s)), fit_residual: 0.0 });
    }
    let kappa = -dn.dot(d) / d.dot(d);
    let resid = (*dn + *d * kappa).norm();
    if nn > 0.0 {
        let angle = (resid / nn).min(1.0).asin();
        if angle > PARALLEL_TOL {
            return Err(CurvError::NotParallel { angle });
        }
    }
    Ok(PrincipalCurvature { value: Curv::Finite(kappa), fit_residual: resid / nd })
}

pub fn fit_principal_smooth(surface: &SemiDiscreteSurface, i: usize, j: usize) -> Result<PrincipalCurvature, CurvError> {
    fit_ratio(&surface.dx(i, j), &surface.dn(i, j), INF_THRESHOLD)
}

/// Principal curvature of the edge from strip `i` to `i + 1` at sample `j`.
pub fn fit_principal_edge(surface: &SemiDiscreteSurface, i: usize, j: usize) -> Result<PrincipalCurvature, CurvError> {
    let e = surface.edge(i, j);
    fit_ratio(&e.delta_x, &e.delta_n, INF_THRESHOLD)
}

/// Value of a mixed area element as a 4×4 operator; column `j` is `A·e_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedArea(pub [[f64; 4]; 4]);

impl MixedArea {
    pub fn apply(&self, c: &Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|r| (0..4).map(|k| self.0[r][k] * c[k]).sum()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn pivot(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for r in 0..4 {
            for c in 0..4 {
                if self.0[r][c].abs() > self.0[best.0][best.1].abs() {
                    best = (r, c);
                }
            }
        }
        best
    }

    /// Scalar `k` with `other ≈ k·self`, and the residual relative to the
    /// larger of the two operators.
    pub fn ratio(&self, other: &MixedArea) -> Result<(f64, f64), CurvError> {
        let scale = self.max_abs();
        if scale < DEGENERATE_AREA {
            return Err(CurvError::DegenerateMixedArea);
        }
        let (r, c) = self.pivot();
        let k = other.0[r][c] / self.0[r][c];
        let mut resid = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                resid = resid.max((other.0[a][b] - k * self.0[a][b]).abs());
            }
        }
        Ok((k, resid / scale.max(other.max_abs())))
    }
}

/// `(∂x, ∂x₁, Δx)` of one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeTriple {
    pub d: Vec4,
    pub d1: Vec4,
    pub delta: Vec4,
}

fn parallel_angle(a: &Vec4, b: &Vec4) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let c = (a.dot(b) / (na * nb)).clamp(-1.0, 1.0);
    let proj = *b - *a * (a.dot(b) / (na * na));
    let s = proj.norm() / nb;
    s.atan2(c.abs())
}

pub fn mixed_area(xa: &EdgeTriple, ya: &EdgeTriple, ambient: Ambient) -> Result<MixedArea, CurvError> {
    for (a, b) in [(&xa.d, &ya.d), (&xa.d1, &ya.d1), (&xa.delta, &ya.delta)] {
        let angle = parallel_angle(a, b);
        if angle > PARALLEL_TOL {
            return Err(CurvError::NotParallel { angle });
        }
    }
    Ok(mixed_area_unchecked(xa, ya, ambient))
}

fn mixed_area_unchecked(xa: &EdgeTriple, ya: &EdgeTriple, ambient: Ambient) -> MixedArea {
    let sx = xa.d + xa.d1;
    let sy = ya.d + ya.d1;
    let mut out = [[0.0; 4]; 4];
    for col in 0..4 {
        let c = Vec4::basis(col);
        let v = wedge(&sx, &ya.delta, &c, ambient) + wedge(&sy, &xa.delta, &c, ambient);
        for row in 0..4 {
            out[row][col] = 0.25 * v[row];
        }
    }
    MixedArea(out)
}

/// `(a ∧ b) c` with the inner product of the ambient space.
fn wedge(a: &Vec4, b: &Vec4, c: &Vec4, ambient: Ambient) -> Vec4 {
    match ambient {
        Ambient::H3 | Ambient::S21 => wedge_apply(a, b, c, ambient.signature()),
        _ => *b * ambient.inner(a, c) - *a * ambient.inner(b, c),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureSource {
    MixedArea,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCurvatures {
    pub k: Curv,
    pub h: Curv,
    pub source: CurvatureSource,
}

fn triples(e: &EdgeData) -> (EdgeTriple, EdgeTriple) {
    (
        EdgeTriple { d: e.dx, d1: e.dx1, delta: e.delta_x },
        EdgeTriple { d: e.dn, d1: e.dn1, delta: e.delta_n },
    )
}

/// K and H on edge data by proportionality of mixed areas.
pub fn gauss_mean_mixed_edge(e: &EdgeData, ambient: Ambient) -> Result<EdgeCurvatures, CurvError> {
    let (x, n) = triples(e);
    let axx = mixed_area(&x, &x, ambient)?;
    let ann = mixed_area(&n, &n, ambient)?;
    let axn = mixed_area(&x, &n, ambient)?;
    let (k, rk) = axx.ratio(&ann)?;
    let (mh, rh) = axx.ratio(&axn)?;
    let residual = rk.max(rh);
    if residual > PROPORTIONALITY_TOL {
        return Err(CurvError::NotProportional { residual });
    }
    Ok(EdgeCurvatures { k: Curv::Finite(k), h: Curv::Finite(-mh), source: CurvatureSource::MixedArea })
}

pub fn gauss_mean_mixed(surface: &SemiDiscreteSurface, i: usize, j: usize) -> Result<EdgeCurvatures, CurvError> {
    gauss_mean_mixed_edge(&surface.edge(i, j), surface.ambient)
}

/// K and H from the principal curvatures at both ends of an edge and on it:
/// `K = κ₀₁(2κκ₁ − κκ₀₁ − κ₁κ₀₁)/(κ₁ + κ − 2κ₀₁)`,
/// `H = (κκ₁ − κ₀₁²)/(κ₁ + κ − 2κ₀₁)`.
///
/// Evaluated in homogeneous coordinates so that infinite inputs are handled
/// without floating-point infinities.
pub fn gauss_mean_closed(kappa: Curv, kappa1: Curv, kappa01: Curv) -> Result<EdgeCurvatures, CurvError> {
    let (a, al) = kappa.homogeneous();
    let (b, be) = kappa1.homogeneous();
    let (c, ga) = kappa01.homogeneous();
    let core_terms = [b * al * ga, a * be * ga, -2.0 * c * al * be];
    let core: f64 = core_terms.iter().sum();
    let scale: f64 = core_terms.iter().map(|v| v.abs()).sum();
    if core.abs() <= 1e-12 * scale {
        return Err(CurvError::UmbilicDegeneracy);
    }
    let den = ga * core;
    let h_num = a * b * ga * ga - c * c * al * be;
    let k_num = c * (2.0 * a * b * ga - a * c * be - b * c * al);
    Ok(EdgeCurvatures {
        k: Curv::from_ratio(k_num, den, 1e-14),
        h: Curv::from_ratio(h_num, den, 1e-14),
        source: CurvatureSource::ClosedForm,
    })
}

/// Closed-form K, H on an edge from fitted principal curvatures.
pub fn gauss_mean_closed_at(surface: &SemiDiscreteSurface, i: usize, j: usize) -> Result<EdgeCurvatures, CurvError> {
    let k0 = fit_principal_smooth(surface, i, j)?.value;
    let k1 = fit_principal_smooth(surface, i + 1, j)?.value;
    let k01 = fit_principal_edge(surface, i, j)?.value;
    gauss_mean_closed(k0, k1, k01)
}

/// Tangent cross ratio `∂x·(Δx)⁻¹·∂x₁·(Δx)⁻¹` of an edge.
pub fn edge_cross_ratio(e: &EdgeData, ambient: Ambient) -> Result<Complex64, GeomError> {
    let m = |v: &Vec4| ambient.to_model(v);
    matrix_cross_ratio(&m(&e.dx), &m(&e.delta_x), &m(&e.dx1), &m(&e.delta_x), ambient.signature())
}

/// Linear Weingarten relation tested by [`weingarten_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeingartenRelation {
    /// `H = 0`.
    MinMax,
    /// `2s(H − 1) + (1 − s)(K − 1) = 0`.
    BrLW(f64),
    /// `2s(H − 1) − (1 + s)(K − 1) = 0`.
    BiLW(f64),
    /// `H + θK = 0`.
    ParallelFlat(f64),
    /// The Bryant-type relation with parameter `s_θ`.
    ParallelCurved(f64),
}

impl WeingartenRelation {
    pub fn residual(self, k: f64, h: f64) -> f64 {
        match self {
            WeingartenRelation::MinMax => h,
            WeingartenRelation::BrLW(s) | WeingartenRelation::ParallelCurved(s) => {
                2.0 * s * (h - 1.0) + (1.0 - s) * (k - 1.0)
            }
            WeingartenRelation::BiLW(s) => 2.0 * s * (h - 1.0) - (1.0 + s) * (k - 1.0),
            WeingartenRelation::ParallelFlat(theta) => h + theta * k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenReport {
    pub max_residual: f64,
    pub evaluated: usize,
    /// Edges whose curvatures could not be evaluated (degenerate or infinite).
    pub skipped: usize,
    /// `(strip, sample, residual)` for every evaluated edge.
    pub per_edge: Vec<(usize, usize, f64)>,
}

pub fn weingarten_residual(surface: &SemiDiscreteSurface, relation: WeingartenRelation) -> WeingartenReport {
    let mut report = WeingartenReport { max_residual: 0.0, evaluated: 0, skipped: 0, per_edge: Vec::new() };
    for i in 0..surface.strips() - 1 {
        for j in 0..surface.samples() {
            match gauss_mean_mixed(surface, i, j) {
                Ok(EdgeCurvatures { k: Curv::Finite(k), h: Curv::Finite(h), .. }) => {
                    let r = relation.residual(k, h).abs();
                    report.max_residual = report.max_residual.max(r);
                    report.evaluated += 1;
                    report.per_edge.push((i, j, r));
                }
                _ => report.skipped += 1,
            }
        }
    }
    report
}

/// One row of the curvature table; edge quantities are `None` on the last
/// strip.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureRow {
    pub strip: usize,
    pub sample: usize,
    pub kappa: Option<Curv>,
    pub kappa01: Option<Curv>,
    pub mixed: Option<EdgeCurvatures>,
    pub closed: Option<EdgeCurvatures>,
    pub flags: Vec<&'static str>,
}

pub fn curvature_table(surface: &SemiDiscreteSurface) -> Vec<CurvatureRow> {
    let (ns, nt) = (surface.strips(), surface.samples());
    let mut rows = Vec::with_capacity(ns * nt);
    for i in 0..ns {
        for j in 0..nt {
            let mut flags = Vec::new();
            let kappa = match fit_principal_smooth(surface, i, j) {
                Ok(p) => Some(p.value),
                Err(_) => {
                    flags.push("kappa_not_parallel");
                    None
                }
            };
            let (mut kappa01, mut mixed, mut closed) = (None, None, None);
            if i + 1 < ns {
                match fit_principal_edge(surface, i, j) {
                    Ok(p) => kappa01 = Some(p.value),
                    Err(_) => flags.push("kappa01_not_parallel"),
                }
                match gauss_mean_mixed(surface, i, j) {
                    Ok(c) => mixed = Some(c),
                    Err(CurvError::DegenerateMixedArea) => flags.push("degenerate_area"),
                    Err(_) => flags.push("not_proportional"),
                }
                match gauss_mean_closed_at(surface, i, j) {
                    Ok(c) => closed = Some(c),
                    Err(CurvError::UmbilicDegeneracy) => flags.push("umbilic"),
                    Err(_) => flags.push("closed_form_unavailable"),
                }
            }
            if kappa.is_some_and(Curv::is_infinite) || kappa01.is_some_and(Curv::is_infinite) {
                flags.push("infinite_kappa");
            }
            rows.push(CurvatureRow { strip: i, sample: j, kappa, kappa01, mixed, closed, flags });
        }
    }
    rows
}
