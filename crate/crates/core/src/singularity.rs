//! Flat, parabolic and singular vertices, singular edges and the adjacency
//! statements linking them.

use num_complex::Complex64;
use thiserror::Error;

use crate::curvature::{fit_ratio, Curv, CurvError};
use crate::geom::{circle_vs_unit_circle, tangent_circle, Ambient, GeomError, UnitCircleRelation, Vec4};
use crate::holo::HoloNet;
use crate::surface::{EdgeData, Epsilon, SemiDiscreteSurface};

/// Coplanarity tolerance for `∂x, ∂x₁, Δx`.
pub const COPLANAR_TOL: f64 = 1e-8;
/// Strictness margin of the side-of-line test.
pub const SIDE_MARGIN: f64 = 1e-10;
/// Leading minors of a Gram matrix must exceed this to count as spacelike.
pub const GRAM_TOL: f64 = 1e-10;
/// Relative rank threshold for spanning sets.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SingError {
    #[error("∂x, ∂x₁ and Δx are not coplanar (residual {residual:.3e})")]
    DegeneratePlane { residual: f64 },
    #[error("a tangent vector is collinear with Δx")]
    CollinearTangent,
    #[error("spanning set has rank {rank}")]
    RankDeficient { rank: usize },
    #[error("ambient is not Lorentzian")]
    NotLorentzian,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(&'static str),
    #[error(transparent)]
    Curv(#[from] CurvError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirClass {
    None,
    Fps,
    S,
    Fp,
}

impl DirClass {
    pub fn label(self) -> &'static str {
        match self {
            DirClass::None => "none",
            DirClass::Fps => "FPS",
            DirClass::S => "S",
            DirClass::Fp => "FP",
        }
    }
}

/// Curvatures used to classify a vertex `(k₀, t₀)`. Entries are `None`
/// where the neighbour is missing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    /// `κ₋₁₀` on the edge to the previous strip.
    pub kappa_prev_edge: Option<Curv>,
    /// `κ₀₁` on the edge to the next strip.
    pub kappa_next_edge: Option<Curv>,
    pub kappa_prev: Option<Curv>,
    pub kappa: Curv,
    pub kappa_next: Option<Curv>,
}

impl Evidence {
    /// `κ₋₁₀·κ₀₁`, when both are finite.
    pub fn discrete_product(&self) -> Option<f64> {
        Some(self.kappa_prev_edge?.value()? * self.kappa_next_edge?.value()?)
    }

    /// `ℓ₋₁₀ = κ_{k₀−1}κ_{k₀}`.
    pub fn ell_prev(&self) -> Option<f64> {
        Some(self.kappa_prev?.value()? * self.kappa.value()?)
    }

    /// `ℓ₁₀ = κ_{k₀}κ_{k₀+1}`.
    pub fn ell_next(&self) -> Option<f64> {
        Some(self.kappa.value()? * self.kappa_next?.value()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexClass {
    pub discrete_dir: DirClass,
    pub smooth_dir: DirClass,
    pub evidence: Evidence,
    /// The vertex lies on the first or last strip and was classified only
    /// in the available directions.
    pub boundary: bool,
}

fn fit(d: &Vec4, dn: &Vec4, thr: f64) -> Result<Curv, SingError> {
    Ok(fit_ratio(d, dn, thr)?.value)
}

fn smooth_kappa(s: &SemiDiscreteSurface, i: usize, j: usize, thr: f64) -> Result<Curv, SingError> {
    fit(&s.dx(i, j), &s.dn(i, j), thr)
}

fn edge_kappa(s: &SemiDiscreteSurface, i: usize, j: usize, thr: f64) -> Result<Curv, SingError> {
    let e = s.edge(i, j);
    fit(&e.delta_x, &e.delta_n, thr)
}

fn neg(a: Curv, b: Curv) -> bool {
    matches!((a, b), (Curv::Finite(x), Curv::Finite(y)) if x * y < 0.0)
}

pub fn classify_vertex(
    surface: &SemiDiscreteSurface,
    i: usize,
    j: usize,
    inf_threshold: f64,
) -> Result<VertexClass, SingError> {
    let ns = surface.strips();
    let has_prev = i > 0;
    let has_next = i + 1 < ns;
    let kappa = smooth_kappa(surface, i, j, inf_threshold)?;
    let kappa_prev = has_prev.then(|| smooth_kappa(surface, i - 1, j, inf_threshold)).transpose()?;
    let kappa_next = has_next.then(|| smooth_kappa(surface, i + 1, j, inf_threshold)).transpose()?;
    let kappa_prev_edge = has_prev.then(|| edge_kappa(surface, i - 1, j, inf_threshold)).transpose()?;
    let kappa_next_edge = has_next.then(|| edge_kappa(surface, i, j, inf_threshold)).transpose()?;
    let evidence = Evidence { kappa_prev_edge, kappa_next_edge, kappa_prev, kappa, kappa_next };

    let discrete_dir = match (kappa_prev_edge, kappa_next_edge) {
        (Some(a), Some(b)) if a.is_infinite() || b.is_infinite() => DirClass::S,
        (Some(a), Some(b)) if neg(a, b) => DirClass::Fps,
        (Some(a), None) | (None, Some(a)) if a.is_infinite() => DirClass::S,
        _ => DirClass::None,
    };
    let smooth = [kappa_prev, Some(kappa), kappa_next];
    let smooth_dir = if smooth.iter().flatten().any(|k| k.is_infinite()) {
        DirClass::S
    } else if kappa_prev.is_some_and(|p| neg(p, kappa)) || kappa_next.is_some_and(|n| neg(kappa, n)) {
        DirClass::Fps
    } else {
        DirClass::None
    };
    Ok(VertexClass { discrete_dir, smooth_dir, evidence, boundary: !(has_prev && has_next) })
}

/// Whether `d` and `d1` lie strictly on the same side of the line spanned by
/// `delta` inside the plane of the three vectors.
pub fn edge_embedded_data(d: &Vec4, d1: &Vec4, delta: &Vec4) -> Result<bool, SingError> {
    let nl = delta.norm();
    if nl == 0.0 || d.norm() == 0.0 || d1.norm() == 0.0 {
        return Err(SingError::CollinearTangent);
    }
    let e1 = *delta * (1.0 / nl);
    let w = *d - e1 * d.dot(&e1);
    if w.norm() <= SIDE_MARGIN * d.norm() {
        return Err(SingError::CollinearTangent);
    }
    let e2 = w * (1.0 / w.norm());
    let (a, b) = (d1.dot(&e1), d1.dot(&e2));
    let residual = (*d1 - e1 * a - e2 * b).norm() / d1.norm();
    if residual > COPLANAR_TOL {
        return Err(SingError::DegeneratePlane { residual });
    }
    if b.abs() <= SIDE_MARGIN * d1.norm() {
        return Err(SingError::CollinearTangent);
    }
    Ok(b > 0.0)
}

/// Embeddedness of the surface on the edge from strip `i` to `i + 1`.
pub fn edge_embedded(surface: &SemiDiscreteSurface, i: usize, j: usize) -> Result<bool, SingError> {
    let e = surface.edge(i, j);
    edge_embedded_data(&e.dx, &e.dx1, &e.delta_x)
}

/// Embeddedness of the Gauss map on the edge from strip `i` to `i + 1`.
pub fn gauss_map_embedded(surface: &SemiDiscreteSurface, i: usize, j: usize) -> Result<bool, SingError> {
    let e = surface.edge(i, j);
    edge_embedded_data(&e.dn, &e.dn1, &e.delta_n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    Fp,
    S,
    NotApplicable,
}

impl Refinement {
    pub fn label(self) -> &'static str {
        match self {
            Refinement::Fp => "FP",
            Refinement::S => "S",
            Refinement::NotApplicable => "n/a",
        }
    }
}

fn spacelike_or_riemannian(surface: &SemiDiscreteSurface, i: usize, j: usize) -> bool {
    if !surface.ambient.is_lorentzian() {
        return true;
    }
    singular_edge_lorentz(surface, i, j, PlaneVariant::TangentPlane).is_ok_and(|s| s.spacelike)
}

/// Splits a smooth-direction FPS vertex into flat-parabolic or singular.
pub fn refine_fp_vs_s(surface: &SemiDiscreteSurface, i: usize, j: usize, inf_threshold: f64) -> Refinement {
    let Ok(vc) = classify_vertex(surface, i, j, inf_threshold) else {
        return Refinement::NotApplicable;
    };
    if vc.boundary || vc.discrete_dir != DirClass::None || vc.smooth_dir != DirClass::Fps {
        return Refinement::NotApplicable;
    }
    let ev = vc.evidence;
    let bounded = [ev.kappa_prev_edge, ev.kappa_next_edge, ev.kappa_prev, Some(ev.kappa), ev.kappa_next]
        .iter()
        .all(|k| k.is_some_and(|k| !k.is_infinite()));
    if !bounded || !spacelike_or_riemannian(surface, i - 1, j) || !spacelike_or_riemannian(surface, i, j) {
        return Refinement::NotApplicable;
    }
    let (Some(lp), Some(ln)) = (ev.ell_prev(), ev.ell_next()) else {
        return Refinement::NotApplicable;
    };
    let edge = match (lp < 0.0, ln < 0.0) {
        (true, false) if ln > 0.0 => i - 1,
        (false, true) if lp > 0.0 => i,
        _ => return Refinement::NotApplicable,
    };
    match gauss_map_embedded(surface, edge, j) {
        Ok(true) => Refinement::S,
        Ok(false) => Refinement::Fp,
        Err(_) => Refinement::NotApplicable,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneVariant {
    /// `span{∂x, Δx}`.
    TangentPlane,
    /// `span{∂n, Δn, ∂Δn}`, evaluated on the surface traced by `n`.
    CMC1Plane,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeStatus {
    pub spacelike: bool,
    pub embedded_x: Option<bool>,
    pub embedded_n: Option<bool>,
    pub singular: bool,
}

/// Euclidean orthonormal basis of the span, largest vectors first.
fn span_basis(vs: &[Vec4]) -> Vec<Vec4> {
    let scale = vs.iter().map(Vec4::norm).fold(0.0, f64::max);
    let mut rest: Vec<Vec4> = vs.to_vec();
    let mut basis: Vec<Vec4> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    loop {
        let Some((k, best)) = rest
            .iter()
            .enumerate()
            .map(|(k, v)| (k, v.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if best <= RANK_TOL * scale {
            break;
        }
        let e = rest.swap_remove(k) * (1.0 / best);
        for v in rest.iter_mut() {
            *v = *v - e * v.dot(&e);
        }
        basis.push(e);
    }
    basis
}

/// Whether the Gram matrix of `a, b` is positive definite.
pub fn is_spacelike_pair(a: &Vec4, b: &Vec4, ambient: Ambient) -> bool {
    let g11 = ambient.inner(a, a);
    let g12 = ambient.inner(a, b);
    let g22 = ambient.inner(b, b);
    g11 > GRAM_TOL && g11 * g22 - g12 * g12 > GRAM_TOL
}

/// Spacelike/singular status of the edge from strip `i` to `i + 1`.
pub fn singular_edge_lorentz(
    surface: &SemiDiscreteSurface,
    i: usize,
    j: usize,
    variant: PlaneVariant,
) -> Result<EdgeStatus, SingError> {
    if !surface.ambient.is_lorentzian() {
        return Err(SingError::NotLorentzian);
    }
    let e = surface.edge(i, j);
    let spanning: Vec<Vec4> = match variant {
        PlaneVariant::TangentPlane => vec![e.dx, e.delta_x],
        PlaneVariant::CMC1Plane => vec![e.dx, e.delta_x, e.dx1 - e.dx],
    };
    let basis = span_basis(&spanning);
    match basis.len() {
        0 | 1 => return Err(SingError::RankDeficient { rank: basis.len() }),
        2 => {}
        _ => {
            let residual = spanning.iter().map(|v| v.norm()).fold(0.0, f64::max);
            return Err(SingError::DegeneratePlane { residual });
        }
    }
    let spacelike = is_spacelike_pair(&basis[0], &basis[1], surface.ambient);
    Ok(EdgeStatus {
        spacelike,
        embedded_x: edge_embedded(surface, i, j).ok(),
        embedded_n: gauss_map_embedded(surface, i, j).ok(),
        singular: !spacelike,
    })
}

/// A closed θ-interval; `extrapolated` marks the mirrored smooth-direction
/// edge that is not written out explicitly in the theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaInterval {
    pub lo: f64,
    pub hi: f64,
    pub extrapolated: bool,
}

impl ThetaInterval {
    fn of(a: f64, b: f64, extrapolated: bool) -> Self {
        ThetaInterval { lo: a.min(b), hi: a.max(b), extrapolated }
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.lo <= theta && theta <= self.hi
    }

    /// Distance from `theta` to the nearer endpoint.
    pub fn endpoint_distance(&self, theta: f64) -> f64 {
        (theta - self.lo).abs().min((theta - self.hi).abs())
    }
}

/// Parallel-surface singular θ-sets at one vertex of a minimal or maximal
/// surface. `a_prev`, `a_next` are the reciprocal edge curvatures; `b_*` the
/// reciprocal smooth curvatures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaIntervals {
    pub a_prev: Option<f64>,
    pub a_next: Option<f64>,
    pub b_prev: Option<f64>,
    pub b: f64,
    pub b_next: Option<f64>,
    /// `κ₋₁₀κ₀₁ ≤ 0` for the parallel surface.
    pub discrete: Option<ThetaInterval>,
    /// `κκ₁ ≤ 0` on the edge to the next strip.
    pub smooth_next: Option<ThetaInterval>,
    /// `κ₋₁κ ≤ 0` on the edge to the previous strip.
    pub smooth_prev: Option<ThetaInterval>,
}

pub fn theta_singular_interval(net: &HoloNet, eps: Epsilon, i: usize, j: usize) -> Result<ThetaIntervals, SingError> {
    let e = eps.value();
    let ns = net.grid().strips();
    let factor = |k: usize| {
        let f = 1.0 + e * net.g(k, j).norm_sqr();
        if f.abs() < 1e-10 {
            Err(SingError::HypothesisViolation("|g| = 1 at a vertex used by the interval"))
        } else {
            Ok(f)
        }
    };
    let b_of = |k: usize| -> Result<f64, SingError> {
        let dg = net.dg(k, j).norm_sqr();
        if dg == 0.0 {
            return Err(SingError::HypothesisViolation("∂g vanishes"));
        }
        let f = factor(k)?;
        Ok(-net.tau(j) * f * f / (4.0 * dg))
    };
    let a_of = |gap: usize| -> Result<f64, SingError> {
        let d = (net.g(gap + 1, j) - net.g(gap, j)).norm_sqr();
        if d == 0.0 {
            return Err(SingError::HypothesisViolation("Δg vanishes"));
        }
        Ok(-net.sigma(gap) * factor(gap)? * factor(gap + 1)? / (4.0 * d))
    };
    let a_prev = (i > 0).then(|| a_of(i - 1)).transpose()?;
    let a_next = (i + 1 < ns).then(|| a_of(i)).transpose()?;
    let b = b_of(i)?;
    let b_prev = (i > 0).then(|| b_of(i - 1)).transpose()?;
    let b_next = (i + 1 < ns).then(|| b_of(i + 1)).transpose()?;
    Ok(ThetaIntervals {
        a_prev,
        a_next,
        b_prev,
        b,
        b_next,
        discrete: a_prev.zip(a_next).map(|(p, n)| ThetaInterval::of(p, n, false)),
        smooth_next: b_next.map(|n| ThetaInterval::of(b, n, false)),
        smooth_prev: b_prev.map(|p| ThetaInterval::of(p, b, true)),
    })
}

/// `(N, D)` with `κ = −N/D` from the closed Bryant-type curvature:
/// `N = |d|²(1 + s) − w`, `D = |d|²(1 − s) + w`.
pub fn brlw_sign_pair(d_sq: f64, weight: f64, s: f64) -> (f64, f64) {
    (d_sq * (1.0 + s) - weight, d_sq * (1.0 - s) + weight)
}

/// One of the two sign-pattern systems holds: `N₋N₀ > 0, D₋D₀ < 0` or
/// `N₋N₀ < 0, D₋D₀ > 0`.
pub fn brlw_fps_values(prev: (f64, f64), next: (f64, f64)) -> bool {
    let (np, dp) = (prev.0 * next.0, prev.1 * next.1);
    (np > 0.0 && dp < 0.0) || (np < 0.0 && dp > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Discrete,
    Smooth,
}

/// Sign-change condition for the Bryant-type surface of `net` at `(i, j)`.
/// Discrete: edges `(i−1, i)` and `(i, i+1)`. Smooth: vertices `i`, `i+1`.
/// `None` where a neighbour is missing.
pub fn brlw_fps_condition(net: &HoloNet, s: f64, lambda: f64, i: usize, j: usize, dir: Direction) -> Option<bool> {
    let ns = net.grid().strips();
    let alpha = |k: usize| 1.0 + s * net.g(k, j).norm_sqr();
    let edge = |gap: usize| {
        let d = (net.g(gap + 1, j) - net.g(gap, j)).norm_sqr();
        brlw_sign_pair(d, lambda * net.sigma(gap) * alpha(gap) * alpha(gap + 1), s)
    };
    let vertex = |k: usize| {
        let a = alpha(k);
        brlw_sign_pair(net.dg(k, j).norm_sqr(), lambda * net.tau(j) * a * a, s)
    };
    match dir {
        Direction::Discrete if i > 0 && i + 1 < ns => Some(brlw_fps_values(edge(i - 1), edge(i))),
        Direction::Smooth if i + 1 < ns => Some(brlw_fps_values(vertex(i), vertex(i + 1))),
        _ => None,
    }
}

fn net_edge(net: &HoloNet, i: usize, j: usize) -> (Complex64, Complex64, Complex64, Complex64) {
    (net.g(i, j), net.dg(i, j), net.g(i + 1, j), net.dg(i + 1, j))
}

pub fn maximal_circle_test_data(g: Complex64, dg: Complex64, g1: Complex64, dg1: Complex64) -> Result<bool, SingError> {
    let c = tangent_circle(g, dg, g1, dg1)?;
    Ok(!matches!(circle_vs_unit_circle(&c), UnitCircleRelation::Disjoint))
}

/// Whether the tangent circle of the edge meets S¹.
pub fn maximal_edge_circle_test(net: &HoloNet, i: usize, j: usize) -> Result<bool, SingError> {
    let (g, dg, g1, dg1) = net_edge(net, i, j);
    maximal_circle_test_data(g, dg, g1, dg1)
}

pub fn cmc1_circle_test_data(g: Complex64, dg: Complex64, g1: Complex64, dg1: Complex64) -> Result<bool, SingError> {
    if (g.norm() - 1.0).abs() < 1e-10 || (g1.norm() - 1.0).abs() < 1e-10 {
        return Ok(true);
    }
    let c = tangent_circle(g, dg, g1, dg1)?;
    Ok(circle_vs_unit_circle(&c) == UnitCircleRelation::Transversal)
}

/// Whether the tangent circle crosses S¹ transversally; always true when an
/// end point lies on S¹.
pub fn cmc1_edge_circle_test(net: &HoloNet, i: usize, j: usize) -> Result<bool, SingError> {
    let (g, dg, g1, dg1) = net_edge(net, i, j);
    cmc1_circle_test_data(g, dg, g1, dg1)
}

/// `4|Δg|²|∂g|²(1 − |g|²)(1 − |g₁|²) < {(1 − ḡg₁)Δḡ∂g + (1 − gḡ₁)Δg∂ḡ}²`.
pub fn condition_c(g: Complex64, dg: Complex64, g1: Complex64) -> bool {
    let delta = g1 - g;
    let lhs = 4.0 * delta.norm_sqr() * dg.norm_sqr() * (1.0 - g.norm_sqr()) * (1.0 - g1.norm_sqr());
    let rhs = 2.0 * ((1.0 - g.conj() * g1) * delta.conj() * dg).re;
    lhs < rhs * rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjacencyKind {
    /// Maximal surfaces, tangent-plane singular edges.
    MaximalEdges,
    /// CMC 1 surfaces in S^{2,1}, plane `P(n, n₁)`, across a λ sweep.
    Cmc1Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyViolation {
    pub strip: usize,
    pub sample: usize,
    pub reason: String,
}

/// Discrete-direction sign-change vertices (finite curvatures) without an
/// adjacent singular edge.
///
/// `surfaces` holds one surface per swept λ (a single surface for `MaximalEdges`);
/// a vertex or edge counts as singular when it is singular on every member.
pub fn adjacency_check(
    surfaces: &[&SemiDiscreteSurface],
    kind: AdjacencyKind,
    inf_threshold: f64,
) -> Result<Vec<AdjacencyViolation>, SingError> {
    let Some(first) = surfaces.first() else {
        return Ok(Vec::new());
    };
    if !first.ambient.is_lorentzian() {
        return Err(SingError::NotLorentzian);
    }
    let variant = match kind {
        AdjacencyKind::MaximalEdges => PlaneVariant::TangentPlane,
        AdjacencyKind::Cmc1Sweep => PlaneVariant::CMC1Plane,
    };
    let (ns, nt) = (first.strips(), first.samples());
    let mut out = Vec::new();
    for i in 1..ns.saturating_sub(1) {
        for j in 0..nt {
            let mut singular_everywhere = true;
            for s in surfaces {
                let vc = classify_vertex(s, i, j, inf_threshold)?;
                if vc.discrete_dir != DirClass::Fps {
                    singular_everywhere = false;
                    break;
                }
            }
            if !singular_everywhere {
                continue;
            }
            let edge_singular = |gap: usize| -> Result<bool, SingError> {
                for s in surfaces {
                    if !singular_edge_lorentz(s, gap, j, variant)?.singular {
                        return Ok(false);
                    }
                }
                Ok(true)
            };
            let left = edge_singular(i - 1);
            let right = edge_singular(i);
            match (left, right) {
                (Ok(true), _) | (_, Ok(true)) => {}
                (l, r) => {
                    let reason = match (l, r) {
                        (Err(e), _) | (_, Err(e)) => format!("edge status unavailable: {e}"),
                        _ => "no adjacent singular edge".to_string(),
                    };
                    out.push(AdjacencyViolation { strip: i, sample: j, reason });
                }
            }
        }
    }
    Ok(out)
}

/// Side test with edge data, position and normal roles exchanged.
pub fn edge_data_gauss_embedded(e: &EdgeData) -> Result<bool, SingError> {
    edge_embedded_data(&e.dn, &e.dn1, &e.delta_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::Sign;
    use crate::holo::{make_linear_net, GridSpec};

    fn v(a: f64, b: f64, c: f64) -> Vec4 {
        Vec4::new(a, b, c, 0.0)
    }

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn side_of_line_examples() {
        let delta = v(1.0, 0.0, 0.0);
        assert!(!edge_embedded_data(&v(1.0, 1.0, 0.0), &v(1.0, -1.0, 0.0), &delta).unwrap());
        assert!(edge_embedded_data(&v(0.3, 1.0, 0.0), &v(0.3, 1.0, 0.0), &delta).unwrap());
        assert!(matches!(
            edge_embedded_data(&v(1.0, 1.0, 0.0), &v(0.0, 0.0, 1.0), &delta),
            Err(SingError::DegeneratePlane { .. })
        ));
        assert_eq!(
            edge_embedded_data(&v(2.0, 0.0, 0.0), &v(0.0, 1.0, 0.0), &delta),
            Err(SingError::CollinearTangent)
        );
    }

    #[test]
    fn gram_examples() {
        let a = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let b = Vec4::new(0.0, 1.0, 0.0, 0.0);
        assert!(is_spacelike_pair(&a, &b, Ambient::S21));
        let light = Vec4::new(0.0, 0.0, 1.0, 1.0);
        assert!(!is_spacelike_pair(&a, &light, Ambient::S21));
        assert_eq!(span_basis(&[a, a * 2.0]).len(), 1);
        assert_eq!(span_basis(&[a, b, a + b]).len(), 2);
    }

    #[test]
    fn theta_interval_example() {
        let grid = GridSpec::new(-1, 1, -1.0, 1.0, 0.01).unwrap();
        let net = make_linear_net(1.0, 1.0, grid).unwrap();
        let r = theta_singular_interval(&net, Epsilon::Plus, 1, 100).unwrap();
        assert!((r.a_prev.unwrap() + 0.5).abs() < 1e-14);
        assert!((r.a_next.unwrap() + 0.5).abs() < 1e-14);
        let d = r.discrete.unwrap();
        assert_eq!((d.lo, d.hi), (-0.5, -0.5));
        let s = r.smooth_next.unwrap();
        assert!((s.lo - 0.25).abs() < 1e-14 && (s.hi - 1.0).abs() < 1e-14);
        assert!(r.smooth_prev.unwrap().extrapolated);
    }

    #[test]
    fn theta_interval_hypothesis() {
        let grid = GridSpec::new(0, 2, 0.0, 0.1, 0.01).unwrap();
        let net = make_linear_net(1.0, 1.0, grid).unwrap();
        assert!(matches!(
            theta_singular_interval(&net, Epsilon::Minus, 1, 0),
            Err(SingError::HypothesisViolation(_))
        ));
    }

    #[test]
    fn brlw_values() {
        assert!(brlw_fps_values((1.0, 1.0), (1.0, -1.0)));
        assert!(brlw_fps_values((1.0, 1.0), (-1.0, 1.0)));
        assert!(!brlw_fps_values((1.0, 1.0), (1.0, 1.0)));
    }

    #[test]
    fn circle_tests() {
        // Circle through 0.5 and 2 on the real axis: every such circle meets S¹.
        let g = cx(0.5, 0.0);
        let g1 = cx(2.0, 0.0);
        let dg = cx(0.3, 1.0);
        let delta = g1 - g;
        let dg1 = -(delta * delta) / dg;
        assert!(maximal_circle_test_data(g, dg, g1, dg1).unwrap());
        assert!(cmc1_circle_test_data(g, dg, g1, dg1).unwrap());
        // Small circle inside the disc through 0.1 and 0.2.
        let (g, g1) = (cx(0.1, 0.0), cx(0.2, 0.0));
        let dg = cx(0.0, 1.0);
        let delta = g1 - g;
        let dg1 = -(delta * delta) / dg;
        assert!(!maximal_circle_test_data(g, dg, g1, dg1).unwrap());
        assert!(!cmc1_circle_test_data(g, dg, g1, dg1).unwrap());
        assert!(!condition_c(g, dg, g1));
        assert!(cmc1_circle_test_data(cx(1.0, 0.0), dg, cx(0.5, 0.1), cx(1.0, 1.0)).unwrap());
    }

    #[test]
    fn evidence_products() {
        let ev = Evidence {
            kappa_prev_edge: Some(Curv::Finite(1.0)),
            kappa_next_edge: Some(Curv::Infinite(Sign::Neg)),
            kappa_prev: Some(Curv::Finite(2.0)),
            kappa: Curv::Finite(-1.0),
            kappa_next: None,
        };
        assert_eq!(ev.discrete_product(), None);
        assert_eq!(ev.ell_prev(), Some(-2.0));
        assert_eq!(ev.ell_next(), None);
    }
}
