//! Bryant-type linear Weingarten surfaces in H³ and their Bianchi-type
//! Gauss maps in S^{2,1}.
//!
//! A frame `E ∈ GL₂C` solves
//!
//! ```text
//! E⁻¹∂E = [[0, ∂g], [λτ/∂g, 0]],   E⁻¹ΔE = [[0, Δg], [λσ/Δg, 0]]
//! ```
//!
//! and with `T = 1 + s|g|²`, `L = [[0, √T], [−1/√T, −s ḡ/√T]]`
//!
//! ```text
//! x = sgn(T)/det E · EL (EL)*,   n = sgn(T)/det E · EL diag(1, −1) (EL)*
//! ```
//!
//! For `T < 0` the root is taken as `i√|T|`.

use num_complex::Complex64;
use thiserror::Error;

use crate::curvature::{Curv, Sign};
use crate::flat::ClosedPrincipal;
use crate::geom::{Ambient, GeomError, Mat2C, Signature, Vec4};
use crate::holo::{validate_net, HoloNet, NetError, NET_TOL};
use crate::ode::{integrate_on_grid, OdeError, OdeSettings};
use crate::surface::{Crossing, Provenance, SemiDiscreteSurface};

/// `|T|` below this violates the genericity assumption.
pub const GENERICITY_TOL: f64 = 1e-10;
/// `|det E|` below this is a degenerate frame.
pub const FRAME_DET_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvedError {
    #[error("spectral parameter λ must be nonzero")]
    LambdaZero,
    #[error("1 − λσ vanishes on strip gap {gap}")]
    OneMinusLambdaSigma { gap: usize },
    #[error("initial frame is not invertible")]
    SingularInitialFrame,
    #[error("frame determinant degenerates at strip {strip}, t = {t}")]
    DegenerateFrame { strip: usize, t: f64 },
    #[error("genericity violated: 1 + s|g|² vanishes at strip {strip}, t = {t}")]
    GenericityViolation { strip: usize, t: f64 },
    #[error("invalid Weingarten parameter: {0}")]
    InvalidParams(&'static str),
    #[error("net is not isothermic: {0}")]
    InvalidNet(#[from] NetError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LwType {
    Hyperbolic,
    DeSitter,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LWParams {
    pub s: f64,
}

impl LWParams {
    pub fn new(s: f64) -> Result<Self, CurvedError> {
        if !s.is_finite() {
            return Err(CurvedError::InvalidParams("s must be finite"));
        }
        Ok(LWParams { s })
    }

    pub fn kind(&self) -> LwType {
        if self.s > 0.0 {
            LwType::Hyperbolic
        } else if self.s < 0.0 {
            LwType::DeSitter
        } else {
            LwType::Flat
        }
    }

    /// `s = −1`: CMC 1 in S^{2,1}, HMC 1 in H³.
    pub fn is_cmc1(&self) -> bool {
        (self.s + 1.0).abs() < 1e-12
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn u_matrix(dg: Complex64, lambda: f64, tau: f64) -> Mat2C {
    Mat2C::new(c(0.0), dg, lambda * tau / dg, c(0.0))
}

fn delta_matrix(delta: Complex64, lambda: f64, sigma: f64) -> Mat2C {
    Mat2C::new(c(0.0), delta, lambda * sigma / delta, c(0.0))
}

/// Frame `E` sampled on the grid of its net.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameField {
    pub net: HoloNet,
    pub lambda: f64,
    pub e_init: Mat2C,
    e: Vec<Mat2C>,
}

impl FrameField {
    pub fn e(&self, i: usize, j: usize) -> Mat2C {
        self.e[self.net.grid().index(i, j)]
    }

    pub fn u(&self, i: usize, j: usize) -> Mat2C {
        u_matrix(self.net.dg(i, j), self.lambda, self.net.tau(j))
    }

    pub fn delta_m(&self, i: usize, j: usize) -> Mat2C {
        delta_matrix(self.net.g(i + 1, j) - self.net.g(i, j), self.lambda, self.net.sigma(i))
    }

    /// `∂E = E·U`.
    pub fn de(&self, i: usize, j: usize) -> Mat2C {
        self.e(i, j) * self.u(i, j)
    }
}

fn check_lambda(net: &HoloNet, lambda: f64) -> Result<(), CurvedError> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(CurvedError::LambdaZero);
    }
    for (gap, s) in net.sigma_values().iter().enumerate() {
        if (1.0 - lambda * s).abs() < 1e-12 {
            return Err(CurvedError::OneMinusLambdaSigma { gap });
        }
    }
    Ok(())
}

/// RK4 along the first strip, exact products across strips.
pub fn integrate_frame(
    net: &HoloNet,
    lambda: f64,
    e_init: Mat2C,
    solver: &OdeSettings,
) -> Result<FrameField, CurvedError> {
    check_lambda(net, lambda)?;
    if e_init.inverse().is_none() {
        return Err(CurvedError::SingularInitialFrame);
    }
    let report = validate_net(net, NET_TOL);
    if !report.pass {
        return Err(NetError::Invalid { max_residual: report.max_residual }.into());
    }
    let grid = *net.grid();
    let (ns, nt) = (grid.strips(), grid.samples());
    let base = integrate_strip(net, 0, lambda, e_init, solver.step, solver)?;
    let mut e = vec![Mat2C::zero(); ns * nt];
    e[..nt].copy_from_slice(&base);
    for i in 1..ns {
        for j in 0..nt {
            let m = delta_matrix(net.g(i, j) - net.g(i - 1, j), lambda, net.sigma(i - 1));
            e[grid.index(i, j)] = e[grid.index(i - 1, j)] * (Mat2C::identity() + m);
        }
    }
    let scale = e_init.det().norm();
    for i in 0..ns {
        for j in 0..nt {
            if e[grid.index(i, j)].det().norm() < FRAME_DET_TOL * scale.max(1.0) {
                return Err(CurvedError::DegenerateFrame { strip: i, t: grid.t(j) });
            }
        }
    }
    Ok(FrameField { net: net.clone(), lambda, e_init, e })
}

fn integrate_strip(
    net: &HoloNet,
    i: usize,
    lambda: f64,
    start: Mat2C,
    step: f64,
    solver: &OdeSettings,
) -> Result<Vec<Mat2C>, CurvedError> {
    let grid = *net.grid();
    let settings = OdeSettings { step, ..*solver };
    Ok(integrate_on_grid(
        |t, e: Mat2C| {
            let (_, dg) = net.eval(i, t);
            e * u_matrix(dg, lambda, net.tau_at(t))
        },
        grid.t_min,
        start,
        grid.h,
        grid.samples(),
        &settings,
    )?)
}

/// Residuals of the frame equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameResiduals {
    /// `max ‖E⁻¹(E₁ − E) − M_Δ‖`.
    pub delta: f64,
    /// Largest change of the first strip when re-integrated at half the step.
    pub t_direction: f64,
    /// Largest `‖E_Δ∂ − E_∂Δ‖`: every strip integrated along t from its own
    /// start value, against the stored frame obtained across strips.
    pub mixed: f64,
}

pub fn frame_residuals(frame: &FrameField, solver: &OdeSettings) -> Result<FrameResiduals, CurvedError> {
    let net = &frame.net;
    let grid = *net.grid();
    let (ns, nt) = (grid.strips(), grid.samples());
    let mut delta = 0.0_f64;
    for i in 0..ns - 1 {
        for j in 0..nt {
            let e = frame.e(i, j);
            let inv = e.inverse().ok_or(CurvedError::DegenerateFrame { strip: i, t: grid.t(j) })?;
            let r = inv * (frame.e(i + 1, j) - e) - frame.delta_m(i, j);
            delta = delta.max(r.norm());
        }
    }
    let half = integrate_strip(net, 0, frame.lambda, frame.e_init, solver.step / 2.0, solver)?;
    let t_direction = (0..nt).map(|j| (half[j] - frame.e(0, j)).norm()).fold(0.0, f64::max);
    let mut mixed = 0.0_f64;
    for i in 1..ns {
        let strip = integrate_strip(net, i, frame.lambda, frame.e(i, 0), solver.step, solver)?;
        for (j, e) in strip.iter().enumerate() {
            mixed = mixed.max((*e - frame.e(i, j)).norm());
        }
    }
    Ok(FrameResiduals { delta, t_direction, mixed })
}

/// Position, normal and their t-derivatives from a frame and its derivative.
pub(crate) struct LiftPoint {
    pub x: Vec4,
    pub n: Vec4,
    pub dx: Vec4,
    pub dn: Vec4,
}

pub(crate) fn lift_point(
    e: Mat2C,
    de: Mat2C,
    g: Complex64,
    dg: Complex64,
    s: f64,
) -> Result<LiftPoint, GeomError> {
    let t = 1.0 + s * g.norm_sqr();
    let rt = if t > 0.0 { c(t.sqrt()) } else { Complex64::new(0.0, (-t).sqrt()) };
    let dt = 2.0 * s * (g.conj() * dg).re;
    let drt = dt / (2.0 * rt);
    let l = Mat2C::new(c(0.0), rt, -1.0 / rt, -s * g.conj() / rt);
    let dl = Mat2C::new(c(0.0), drt, drt / t, -s * dg.conj() / rt + s * g.conj() * drt / t);
    let el = e * l;
    let del = de * l + e * dl;
    let pre = c(t.signum()) / e.det();
    let j = Mat2C::diag(c(1.0), c(-1.0));
    let (ela, dela) = (el.adjoint(), del.adjoint());
    let x = (el * ela).scale(pre);
    let n = (el * j * ela).scale(pre);
    let dx = (del * ela + el * dela).scale(pre);
    let dn = (del * j * ela + el * j * dela).scale(pre);
    let m = Signature::Minkowski31;
    Ok(LiftPoint { x: m.unembed(&x)?, n: m.unembed(&n)?, dx: m.unembed(&dx)?, dn: m.unembed(&dn)? })
}

/// A Bryant-type surface `x` in H³ together with its Gauss map `n` in S^{2,1}.
/// `n` is stored as a surface in its own right whose normal field is `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPair {
    pub x: SemiDiscreteSurface,
    pub n: SemiDiscreteSurface,
    pub params: LWParams,
    pub lambda: f64,
}

fn t_crossings(net: &HoloNet, i: usize, s: f64) -> Vec<(usize, f64)> {
    let grid = net.grid();
    let f = |t: f64| 1.0 + s * net.eval(i, t).0.norm_sqr();
    let mut out = Vec::new();
    for j in 0..grid.samples() - 1 {
        let (fa, fb) = (1.0 + s * net.g(i, j).norm_sqr(), 1.0 + s * net.g(i, j + 1).norm_sqr());
        if fa.signum() == fb.signum() {
            continue;
        }
        let (mut a, mut b) = (grid.t(j), grid.t(j + 1));
        while b - a > 1e-10 {
            let m = 0.5 * (a + b);
            if f(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        out.push((j, 0.5 * (a + b)));
    }
    out
}

pub fn lift_surface(frame: &FrameField, params: LWParams) -> Result<LiftedPair, CurvedError> {
    let net = &frame.net;
    let grid = *net.grid();
    let (ns, nt) = (grid.strips(), grid.samples());
    let s = params.s;
    let mut xs = Vec::with_capacity(ns * nt);
    let mut ns_ = Vec::with_capacity(ns * nt);
    let mut dxs = Vec::with_capacity(ns * nt);
    let mut dns = Vec::with_capacity(ns * nt);
    for i in 0..ns {
        for j in 0..nt {
            let g = net.g(i, j);
            if (1.0 + s * g.norm_sqr()).abs() < GENERICITY_TOL {
                return Err(CurvedError::GenericityViolation { strip: i, t: grid.t(j) });
            }
            let p = lift_point(frame.e(i, j), frame.de(i, j), g, net.dg(i, j), s)?;
            xs.push(p.x);
            ns_.push(p.n);
            dxs.push(p.dx);
            dns.push(p.dn);
        }
    }
    let lambda = frame.lambda;
    let mut x = SemiDiscreteSurface::new_unpieced(grid, Ambient::H3, xs, ns_, dxs, dns, Provenance::BrLW { s, lambda });
    for i in 0..ns {
        let mut label = 0;
        let crossings = t_crossings(net, i, s);
        let mut next = crossings.iter().peekable();
        for j in 0..nt {
            x.piece[grid.index(i, j)] = label;
            if next.peek().is_some_and(|(c, _)| *c == j) {
                let (sample, t) = *next.next().unwrap();
                x.crossings.push(Crossing { strip: i, t, sample });
                label += 1;
            }
        }
    }
    let n = x.dual(Ambient::S21, Provenance::BiLW { s, lambda });
    Ok(LiftedPair { x, n, params, lambda })
}

/// `max ‖∂(Δx) − Δ(∂x)‖` (and the same for `n`), where `∂(Δx)` uses the
/// product rule on `E₁ = E(I + M_Δ)` and `Δ(∂x)` uses `∂E₁ = E₁U₁`.
pub fn compatibility_residual(frame: &FrameField, params: LWParams) -> Result<(f64, f64), CurvedError> {
    let net = &frame.net;
    let grid = *net.grid();
    let s = params.s;
    let (mut wx, mut wn) = (0.0_f64, 0.0_f64);
    for i in 0..grid.strips() - 1 {
        for j in 0..grid.samples() {
            let e = frame.e(i, j);
            let delta = net.g(i + 1, j) - net.g(i, j);
            let ddelta = net.dg(i + 1, j) - net.dg(i, j);
            let lam_sig = frame.lambda * net.sigma(i);
            let dm = Mat2C::new(c(0.0), ddelta, -lam_sig * ddelta / (delta * delta), c(0.0));
            let de1 = frame.de(i, j) * (Mat2C::identity() + frame.delta_m(i, j)) + e * dm;
            let (g1, dg1) = (net.g(i + 1, j), net.dg(i + 1, j));
            let via_product = lift_point(frame.e(i + 1, j), de1, g1, dg1, s)?;
            let stored = lift_point(frame.e(i + 1, j), frame.de(i + 1, j), g1, dg1, s)?;
            wx = wx.max((via_product.dx - stored.dx).norm());
            wn = wn.max((via_product.dn - stored.dn).norm());
        }
    }
    Ok((wx, wn))
}

fn lw_principal(sq: f64, weight: f64, s: f64) -> Curv {
    let num = sq * (-1.0 - s) + weight;
    let den = sq * (1.0 - s) + weight;
    let scale = sq * (1.0 - s).abs() + weight.abs();
    if den.abs() <= 1e-12 * scale {
        let sgn = if den == 0.0 { num } else { num * den };
        Curv::Infinite(Sign::of(sgn))
    } else {
        Curv::Finite(num / den)
    }
}

/// Principal curvatures of `x` in closed form:
/// `κ = (|∂g|²(−1 − s) + T²λτ)/(|∂g|²(1 − s) + T²λτ)` and the edge analogue
/// with `|Δg|²`, `TT₁` and `σ`.
pub fn principal_curved_closed(net: &HoloNet, params: LWParams, lambda: f64, i: usize, j: usize) -> ClosedPrincipal {
    let s = params.s;
    let g = net.g(i, j);
    let t0 = 1.0 + s * g.norm_sqr();
    let kappa = lw_principal(net.dg(i, j).norm_sqr(), t0 * t0 * lambda * net.tau(j), s);
    let kappa01 = (i + 1 < net.grid().strips()).then(|| {
        let g1 = net.g(i + 1, j);
        let t1 = 1.0 + s * g1.norm_sqr();
        lw_principal((g1 - g).norm_sqr(), t0 * t1 * lambda * net.sigma(i), s)
    });
    ClosedPrincipal { kappa, kappa01 }
}

/// Closed-form principal curvature for arbitrary edge data, used by sampling tests
/// and singularity conditions.
pub fn lw_kappa(dg_sq: f64, alpha_sq: f64, lambda_tau: f64, s: f64) -> Curv {
    lw_principal(dg_sq, alpha_sq * lambda_tau, s)
}

/// The parallel pair `x_θ = cosh θ x + sinh θ n`, `n_θ = sinh θ x + cosh θ n`
/// with `s_θ = e^{−2θ}s`.
pub fn parallel_curved(pair: &LiftedPair, theta: f64) -> LiftedPair {
    let (ch, sh) = (theta.cosh(), theta.sinh());
    let mix = |a: &[Vec4], b: &[Vec4], p: f64, q: f64| -> Vec<Vec4> {
        a.iter().zip(b).map(|(u, v)| *u * p + *v * q).collect()
    };
    let x = &pair.x;
    let px = mix(&x.x, &x.n, ch, sh);
    let pn = mix(&x.x, &x.n, sh, ch);
    let pdx = mix(&x.dx, &x.dn, ch, sh);
    let pdn = mix(&x.dx, &x.dn, sh, ch);
    let s_theta = (-2.0 * theta).exp() * pair.params.s;
    let shift = |p: &Provenance| {
        let (root, t) = p.root();
        Provenance::ParallelOf { base: Box::new(root.clone()), theta: t + theta }
    };
    let xs = SemiDiscreteSurface {
        grid: x.grid,
        ambient: Ambient::H3,
        x: px,
        n: pn,
        dx: pdx,
        dn: pdn,
        provenance: shift(&x.provenance),
        piece: x.piece.clone(),
        crossings: x.crossings.clone(),
    };
    let ns = xs.dual(Ambient::S21, shift(&pair.n.provenance));
    LiftedPair { x: xs, n: ns, params: LWParams { s: s_theta }, lambda: pair.lambda }
}

/// Gaussian and mean curvature of `x_θ` from those of `x`:
/// `K_θ = (K cosh²θ − H sinh 2θ + sinh²θ)/D`,
/// `H_θ = (−(K + 1) sinh 2θ + 2H cosh 2θ)/(2D)`,
/// `D = cosh²θ − H sinh 2θ + K sinh²θ`. Flagged infinite where `D` vanishes.
pub fn parallel_gauss_mean(k: f64, h: f64, theta: f64) -> (Curv, Curv) {
    let (ch, sh) = (theta.cosh(), theta.sinh());
    let s2 = (2.0 * theta).sinh();
    let c2 = (2.0 * theta).cosh();
    let d = ch * ch - h * s2 + k * sh * sh;
    let kn = k * ch * ch - h * s2 + sh * sh;
    let hn = -(k + 1.0) * s2 + 2.0 * h * c2;
    (Curv::from_ratio(kn, d, 1e-14), Curv::from_ratio(hn, 2.0 * d, 1e-14))
}

/// `(g̃, s̃) = (e^θ g, e^{−2θ} s)`; τ and σ are unchanged.
pub fn reparametrized_weierstrass_data(net: &HoloNet, params: LWParams, theta: f64) -> (HoloNet, LWParams) {
    (net.scaled(theta.exp()), LWParams { s: params.s * (-2.0 * theta).exp() })
}

/// Frame seed for the reparametrized data: `E·diag(e^{−θ/2}, e^{θ/2})`.
pub fn reparametrized_frame_seed(e_init: Mat2C, theta: f64) -> Mat2C {
    e_init * Mat2C::diag(c((-theta / 2.0).exp()), c((theta / 2.0).exp()))
}

/// Closed-form tangent cross ratio of `x` on the edge `(i, j)–(i+1, j)`:
///
/// ```text
/// σ(1 − λσ)/τ · {(1−s)|∂g|² + λτT²}{(1−s)|∂g₁|² + λτT₁²} / {(1−s)|Δg|² + λσTT₁}²
/// ```
pub fn cross_ratio_x_closed(net: &HoloNet, params: LWParams, lambda: f64, i: usize, j: usize) -> f64 {
    let s = params.s;
    let (g, g1) = (net.g(i, j), net.g(i + 1, j));
    let (t0, t1) = (1.0 + s * g.norm_sqr(), 1.0 + s * g1.norm_sqr());
    let (tau, sigma) = (net.tau(j), net.sigma(i));
    let a = (1.0 - s) * net.dg(i, j).norm_sqr() + lambda * tau * t0 * t0;
    let b = (1.0 - s) * net.dg(i + 1, j).norm_sqr() + lambda * tau * t1 * t1;
    let d = (1.0 - s) * (g1 - g).norm_sqr() + lambda * sigma * t0 * t1;
    sigma * (1.0 - lambda * sigma) / tau * a * b / (d * d)
}

/// Tangent cross ratio of the Gauss map `n`: `κκ₁/κ₀₁² · cr(x)`.
/// `None` when a principal curvature is infinite or `κ₀₁ = 0`.
pub fn cross_ratio_n_closed(net: &HoloNet, params: LWParams, lambda: f64, i: usize, j: usize) -> Option<f64> {
    let k = principal_curved_closed(net, params, lambda, i, j);
    let k1 = principal_curved_closed(net, params, lambda, i + 1, j).kappa.value()?;
    let k01 = k.kappa01?.value()?;
    if k01 == 0.0 {
        return None;
    }
    Some(k.kappa.value()? * k1 / (k01 * k01) * cross_ratio_x_closed(net, params, lambda, i, j))
}
