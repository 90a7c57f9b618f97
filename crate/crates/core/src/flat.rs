//! Minimal surfaces in R³ (ε = +1) and maximal surfaces in R^{2,1} (ε = −1)
//! from a semi-discrete holomorphic function:
//!
//! ```text
//! ∂x = Re( τ/(2∂g) · (1 − εg², i(1 + εg²), 2εg) )
//! Δx = Re( σ/(2Δg) · (1 − εgg₁, i(1 + εgg₁), ε(g + g₁)) )
//! n  = (2 Re g, 2 Im g, ε|g|² − 1) / (1 + ε|g|²)
//! ```
//!
//! `x` is integrated along the first strip and carried across strips by the
//! exact edge vectors.

use num_complex::Complex64;
use thiserror::Error;

use crate::curvature::{Curv, Sign};
use crate::geom::Vec4;
use crate::holo::{validate_net, HoloNet, NetError, NET_TOL};
use crate::ode::{integrate_on_grid, OdeError, OdeSettings};
use crate::surface::{Crossing, Epsilon, Provenance, SemiDiscreteSurface};

/// `|1 + ε|g|²|` below this makes the normal undefined.
pub const DENOMINATOR_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlatError {
    #[error("1 + ε|g|² vanishes at strip {strip}, t = {t}")]
    DenominatorBlowup { strip: usize, t: f64 },
    #[error("net is not isothermic: {0}")]
    InvalidNet(#[from] NetError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("parallel surfaces need a minimal or maximal base surface")]
    NotMinMax,
}

fn re3(v: [Complex64; 3]) -> Vec4 {
    Vec4::new(v[0].re, v[1].re, v[2].re, 0.0)
}

pub fn minmax_dx(g: Complex64, dg: Complex64, tau: f64, eps: Epsilon) -> Vec4 {
    let e = eps.value();
    let c = tau / (2.0 * dg);
    let i = Complex64::i();
    let g2 = g * g * e;
    re3([c * (1.0 - g2), c * i * (1.0 + g2), c * 2.0 * e * g])
}

pub fn minmax_delta_x(g: Complex64, g1: Complex64, sigma: f64, eps: Epsilon) -> Vec4 {
    let e = eps.value();
    let c = sigma / (2.0 * (g1 - g));
    let i = Complex64::i();
    let gg = g * g1 * e;
    re3([c * (1.0 - gg), c * i * (1.0 + gg), c * e * (g + g1)])
}

/// Analytic t-derivative of [`minmax_delta_x`].
pub fn minmax_delta_x_dt(g: Complex64, dg: Complex64, g1: Complex64, dg1: Complex64, sigma: f64, eps: Epsilon) -> Vec4 {
    let e = eps.value();
    let i = Complex64::i();
    let delta = g1 - g;
    let ddelta = dg1 - dg;
    let c = sigma / (2.0 * delta);
    let dc = -c * ddelta / delta;
    let gg = g * g1 * e;
    let dgg = (dg * g1 + g * dg1) * e;
    let v = [1.0 - gg, i * (1.0 + gg), e * (g + g1)];
    let dv = [-dgg, i * dgg, e * (dg + dg1)];
    re3(std::array::from_fn(|k| dc * v[k] + c * dv[k]))
}

pub fn normal_minmax(g: Complex64, eps: Epsilon) -> Result<Vec4, FlatError> {
    let e = eps.value();
    let den = 1.0 + e * g.norm_sqr();
    if den.abs() < DENOMINATOR_TOL {
        return Err(FlatError::DenominatorBlowup { strip: 0, t: f64::NAN });
    }
    Ok(Vec4::new(2.0 * g.re, 2.0 * g.im, e * g.norm_sqr() - 1.0, 0.0) * (1.0 / den))
}

/// Normal and its t-derivative; `None` where `1 + ε|g|²` vanishes.
pub fn normal_and_derivative(g: Complex64, dg: Complex64, eps: Epsilon) -> Option<(Vec4, Vec4)> {
    let e = eps.value();
    let den = 1.0 + e * g.norm_sqr();
    if den.abs() < DENOMINATOR_TOL {
        return None;
    }
    let n = Vec4::new(2.0 * g.re, 2.0 * g.im, e * g.norm_sqr() - 1.0, 0.0) * (1.0 / den);
    let dsq = 2.0 * (g.conj() * dg).re;
    let dnum = Vec4::new(2.0 * dg.re, 2.0 * dg.im, e * dsq, 0.0);
    let dn = dnum * (1.0 / den) - n * (e * dsq / den);
    Some((n, dn))
}

/// Parameter values on strip `i` where `1 + ε|g|²` changes sign, bracketed
/// by bisection to `1e-10`. Returns `(sample, t)` pairs.
fn find_crossings(net: &HoloNet, i: usize, eps: Epsilon) -> Vec<(usize, f64)> {
    let e = eps.value();
    let grid = net.grid();
    let f = |t: f64| 1.0 + e * net.eval(i, t).0.norm_sqr();
    let mut out = Vec::new();
    for j in 0..grid.samples() - 1 {
        let (mut a, mut b) = (grid.t(j), grid.t(j + 1));
        let (fa, fb) = (1.0 + e * net.g(i, j).norm_sqr(), 1.0 + e * net.g(i, j + 1).norm_sqr());
        if fa.signum() == fb.signum() {
            continue;
        }
        let sa = fa.signum();
        while b - a > 1e-10 {
            let m = 0.5 * (a + b);
            if f(m).signum() == sa {
                a = m;
            } else {
                b = m;
            }
        }
        out.push((j, 0.5 * (a + b)));
    }
    out
}

/// Minimal (`ε = +1`) or maximal (`ε = −1`) surface of a validated net with
/// `x(k_min, t_min) = base_point`.
///
/// Where a strip crosses `|g| = 1` (maximal case) the strip is split into
/// pieces and the crossing is recorded; samples lying on the circle are an
/// error.
pub fn build_minmax(
    net: &HoloNet,
    eps: Epsilon,
    base_point: Vec4,
    solver: &OdeSettings,
) -> Result<SemiDiscreteSurface, FlatError> {
    let report = validate_net(net, NET_TOL);
    if !report.pass {
        return Err(NetError::Invalid { max_residual: report.max_residual }.into());
    }
    let grid = *net.grid();
    let (ns, nt) = (grid.strips(), grid.samples());
    let mut x = vec![Vec4::ZERO; ns * nt];
    let mut n = vec![Vec4::ZERO; ns * nt];
    let mut dx = vec![Vec4::ZERO; ns * nt];
    let mut dn = vec![Vec4::ZERO; ns * nt];
    for i in 0..ns {
        for j in 0..nt {
            let idx = grid.index(i, j);
            let (g, d) = (net.g(i, j), net.dg(i, j));
            dx[idx] = minmax_dx(g, d, net.tau(j), eps);
            let (nv, dnv) =
                normal_and_derivative(g, d, eps).ok_or(FlatError::DenominatorBlowup { strip: i, t: grid.t(j) })?;
            n[idx] = nv;
            dn[idx] = dnv;
        }
    }
    let base = integrate_on_grid(
        |t, _: Vec4| {
            let (g, d) = net.eval(0, t);
            minmax_dx(g, d, net.tau_at(t), eps)
        },
        grid.t_min,
        base_point,
        grid.h,
        nt,
        solver,
    )?;
    x[..nt].copy_from_slice(&base);
    for i in 1..ns {
        for j in 0..nt {
            let delta = minmax_delta_x(net.g(i - 1, j), net.g(i, j), net.sigma(i - 1), eps);
            x[grid.index(i, j)] = x[grid.index(i - 1, j)] + delta;
        }
    }
    let mut surface = SemiDiscreteSurface::new_unpieced(
        grid,
        eps.ambient(),
        x,
        n,
        dx,
        dn,
        Provenance::MinMax { epsilon: eps },
    );
    if eps == Epsilon::Minus {
        for i in 0..ns {
            let mut label = 0u32;
            let crossings = find_crossings(net, i, eps);
            let mut next = crossings.iter().peekable();
            for j in 0..nt {
                surface.piece[grid.index(i, j)] = label;
                if next.peek().is_some_and(|(s, _)| *s == j) {
                    let (sample, t) = *next.next().unwrap();
                    surface.crossings.push(Crossing { strip: i, t, sample });
                    label += 1;
                }
            }
        }
    }
    Ok(surface)
}

/// Largest `‖∂(Δx) − Δ(∂x)‖` over all edges, with `∂(Δx)` the analytic
/// derivative of the edge vector formula.
pub fn compatibility_residual(net: &HoloNet, eps: Epsilon) -> f64 {
    let grid = net.grid();
    let mut worst = 0.0_f64;
    for i in 0..grid.strips() - 1 {
        for j in 0..grid.samples() {
            let (g, dg, g1, dg1) = (net.g(i, j), net.dg(i, j), net.g(i + 1, j), net.dg(i + 1, j));
            let lhs = minmax_delta_x_dt(g, dg, g1, dg1, net.sigma(i), eps);
            let rhs = minmax_dx(g1, dg1, net.tau(j), eps) - minmax_dx(g, dg, net.tau(j), eps);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// Principal curvatures from the closed forms
/// `κ = −4|∂g|²/(τ(1 + ε|g|²)²)` and
/// `κ₀₁ = −4|Δg|²/(σ(1 + ε|g|²)(1 + ε|g₁|²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedPrincipal {
    pub kappa: Curv,
    /// `None` on the last strip.
    pub kappa01: Option<Curv>,
}

pub fn principal_minmax_closed(net: &HoloNet, eps: Epsilon, i: usize, j: usize) -> ClosedPrincipal {
    let e = eps.value();
    let g = net.g(i, j);
    let a = 1.0 + e * g.norm_sqr();
    let num = -4.0 * net.dg(i, j).norm_sqr();
    let tau = net.tau(j);
    let kappa = if a.abs() < DENOMINATOR_TOL {
        Curv::Infinite(Sign::of(num * tau))
    } else {
        Curv::Finite(num / (tau * a * a))
    };
    let kappa01 = (i + 1 < net.grid().strips()).then(|| {
        let g1 = net.g(i + 1, j);
        let a1 = 1.0 + e * g1.norm_sqr();
        let num = -4.0 * (g1 - g).norm_sqr();
        let sigma = net.sigma(i);
        if a.abs() < DENOMINATOR_TOL || a1.abs() < DENOMINATOR_TOL {
            let s = if a * a1 != 0.0 { num * sigma * a * a1 } else { num * sigma };
            Curv::Infinite(Sign::of(s))
        } else {
            Curv::Finite(num / (sigma * a * a1))
        }
    });
    ClosedPrincipal { kappa, kappa01 }
}

/// `κ/(1 − θκ)`, infinite where `1 − θκ` vanishes.
pub fn parallel_principal(kappa: Curv, theta: f64) -> Curv {
    match kappa {
        Curv::Finite(k) => Curv::from_ratio(k, 1.0 - theta * k, 1e-14),
        Curv::Infinite(s) => {
            if theta == 0.0 {
                Curv::Infinite(s)
            } else {
                Curv::Finite(-1.0 / theta)
            }
        }
    }
}

/// The parallel surface `x + θn` of a minimal or maximal surface.
pub fn parallel_flat(surface: &SemiDiscreteSurface, theta: f64) -> Result<SemiDiscreteSurface, FlatError> {
    let (root, shift) = surface.provenance.root();
    let Provenance::MinMax { .. } = root else {
        return Err(FlatError::NotMinMax);
    };
    let mut out = surface.clone();
    for idx in 0..out.x.len() {
        out.x[idx] = surface.x[idx] + surface.n[idx] * theta;
        out.dx[idx] = surface.dx[idx] + surface.dn[idx] * theta;
    }
    out.provenance = Provenance::ParallelOf { base: Box::new(root.clone()), theta: shift + theta };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::{make_linear_net, GridSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normal_examples() {
        assert_eq!(normal_minmax(c(1.0, 0.0), Epsilon::Plus).unwrap(), Vec4::new(1.0, 0.0, 0.0, 0.0));
        let n = normal_minmax(c(0.0, 0.0), Epsilon::Minus).unwrap();
        assert_eq!(crate::geom::Ambient::R21.inner(&n, &n), -1.0);
        assert!(normal_minmax(c(1.0, 0.0), Epsilon::Minus).is_err());
    }

    #[test]
    fn closed_principal_examples() {
        let grid = GridSpec::new(0, 2, -1.0, 1.0, 0.01).unwrap();
        let net = make_linear_net(1.0, 1.0, grid).unwrap();
        let j = 100;
        assert_eq!(grid.t(j), 0.0);
        let cp = principal_minmax_closed(&net, Epsilon::Plus, 0, j);
        assert_eq!(cp.kappa, Curv::Finite(4.0));
        assert_eq!(cp.kappa01, Some(Curv::Finite(-2.0)));
        let cp = principal_minmax_closed(&net, Epsilon::Minus, 1, j);
        assert!(cp.kappa.is_infinite());
    }

    #[test]
    fn parallel_principal_blowup() {
        assert!(parallel_principal(Curv::Finite(4.0), 0.25).is_infinite());
        assert_eq!(parallel_principal(Curv::Finite(4.0), 0.0), Curv::Finite(4.0));
    }

    #[test]
    fn delta_derivative_matches_finite_difference() {
        let (g, dg, g1, dg1) = (c(0.2, 0.3), c(0.1, 1.0), c(1.1, -0.2), c(-0.4, 0.7));
        let (h, s) = (1e-6, 0.8);
        for eps in [Epsilon::Plus, Epsilon::Minus] {
            let f = |t: f64| minmax_delta_x(g + dg * t, g1 + dg1 * t, s, eps);
            let fd = (f(h) - f(-h)) * (0.5 / h);
            assert!((fd - minmax_delta_x_dt(g, dg, g1, dg1, s, eps)).norm() < 1e-8);
        }
    }
}
