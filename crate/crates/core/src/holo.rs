//! Semi-discrete holomorphic functions `g(k, t)`.
//!
//! A net is isothermic when the tangent cross ratio of `g` factorizes,
//! `∂g·∂g₁/(Δg)² = τ(t)/σ(k) < 0`. Values and analytic t-derivatives are
//! stored on a uniform grid; between samples a net is evaluated either
//! analytically (linear nets, polynomial base strips) or by cubic Hermite
//! interpolation of the stored `(g, ∂g)` pairs.

use num_complex::Complex64;
use thiserror::Error;

use crate::ode::{integrate_on_grid, CVec, OdeError, OdeSettings};

/// Relative tolerance on the factorization residual used when a net is
/// consumed by the surface builders.
pub const NET_TOL: f64 = 1e-8;
/// `|Δg|` below this aborts propagation.
pub const COLLISION_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid net parameter: {0}")]
    InvalidParameter(String),
    #[error("seed g1(t_min) coincides with g(t_min) on strip {strip}")]
    SeedCollision { strip: usize },
    #[error("tau/sigma is not negative at strip gap {gap}, t = {t}")]
    SignCondition { gap: usize, t: f64 },
    #[error("|Δg| fell below {COLLISION_TOL:e} on strip gap {gap} near t = {t}")]
    Collision { gap: usize, t: f64 },
    #[error("integrator failure: {0}")]
    StepFailure(#[from] OdeError),
    #[error("net failed validation (max residual {max_residual:.3e})")]
    Invalid { max_residual: f64 },
}

/// Uniform grid `k_min..=k_max` × `{t_min + j·h}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub k_min: i64,
    pub k_max: i64,
    pub t_min: f64,
    pub t_max: f64,
    pub h: f64,
}

impl GridSpec {
    pub fn new(k_min: i64, k_max: i64, t_min: f64, t_max: f64, h: f64) -> Result<Self, NetError> {
        let g = GridSpec { k_min, k_max, t_min, t_max, h };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.k_max <= self.k_min {
            return Err(NetError::InvalidGrid("k_max must exceed k_min"));
        }
        if !(self.t_max > self.t_min) || !self.t_min.is_finite() || !self.t_max.is_finite() {
            return Err(NetError::InvalidGrid("t_max must exceed t_min"));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(NetError::InvalidGrid("t step must be positive"));
        }
        Ok(())
    }

    pub fn strips(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn samples(&self) -> usize {
        ((self.t_max - self.t_min) / self.h + 1e-9).floor() as usize + 1
    }

    pub fn len(&self) -> usize {
        self.strips() * self.samples()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn t(&self, j: usize) -> f64 {
        self.t_min + j as f64 * self.h
    }

    pub fn k(&self, i: usize) -> i64 {
        self.k_min + i as i64
    }

    /// Row-major index of strip `i`, sample `j`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.samples() + j
    }

    /// Sample interval containing `t` (clamped to the grid).
    fn interval(&self, t: f64) -> (usize, f64) {
        let n = self.samples();
        let u = (t - self.t_min) / self.h;
        let j = (u.floor().max(0.0) as usize).min(n.saturating_sub(2));
        (j, u - j as f64)
    }
}

/// Time dependence of τ.
#[derive(Debug, Clone, PartialEq)]
pub enum TauProfile {
    Constant(f64),
    /// Real polynomial coefficients in increasing degree.
    Polynomial(Vec<f64>),
    /// Values on the t-samples; interpolated by Catmull–Rom cubics.
    Samples(Vec<f64>),
}

impl TauProfile {
    pub fn eval(&self, t: f64, grid: &GridSpec) -> f64 {
        match self {
            TauProfile::Constant(c) => *c,
            TauProfile::Polynomial(c) => c.iter().rev().fold(0.0, |acc, a| acc * t + a),
            TauProfile::Samples(v) => {
                if v.len() == 1 {
                    return v[0];
                }
                let (j, u) = grid.interval(t);
                let n = v.len();
                let slope = |i: usize| -> f64 {
                    if i == 0 {
                        v[1] - v[0]
                    } else if i == n - 1 {
                        v[n - 1] - v[n - 2]
                    } else {
                        0.5 * (v[i + 1] - v[i - 1])
                    }
                };
                hermite_real(v[j], slope(j), v[j + 1], slope(j + 1), u)
            }
        }
    }
}

fn hermite_real(p0: f64, m0: f64, p1: f64, m1: f64, u: f64) -> f64 {
    let (u2, u3) = (u * u, u * u * u);
    (2.0 * u3 - 3.0 * u2 + 1.0) * p0 + (u3 - 2.0 * u2 + u) * m0 + (-2.0 * u3 + 3.0 * u2) * p1 + (u3 - u2) * m1
}

/// Cubic Hermite value and derivative on `[t_j, t_j + h]` at `t_j + u·h`.
fn hermite(g0: Complex64, d0: Complex64, g1: Complex64, d1: Complex64, h: f64, u: f64) -> (Complex64, Complex64) {
    let (u2, u3) = (u * u, u * u * u);
    let g = g0 * (2.0 * u3 - 3.0 * u2 + 1.0)
        + d0 * (h * (u3 - 2.0 * u2 + u))
        + g1 * (-2.0 * u3 + 3.0 * u2)
        + d1 * (h * (u3 - u2));
    let dg = g0 * ((6.0 * u2 - 6.0 * u) / h)
        + d0 * (3.0 * u2 - 4.0 * u + 1.0)
        + g1 * ((-6.0 * u2 + 6.0 * u) / h)
        + d1 * (3.0 * u2 - 2.0 * u);
    (g, dg)
}

/// A single strip `t ↦ (g(t), ∂g(t))`.
pub trait StripSource {
    fn eval(&self, t: f64) -> (Complex64, Complex64);
}

/// Complex polynomial strip, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyStrip(pub Vec<Complex64>);

impl StripSource for PolyStrip {
    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let g = self.0.iter().rev().fold(zero, |acc, a| acc * t + a);
        let dg = self
            .0
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(zero, |acc, (i, a)| acc * t + a * i as f64);
        (g, dg)
    }
}

/// Samples of a strip on a grid, Hermite-interpolated in between.
#[derive(Debug, Clone, Copy)]
pub struct SampledStrip<'a> {
    pub grid: &'a GridSpec,
    pub g: &'a [Complex64],
    pub dg: &'a [Complex64],
}

impl StripSource for SampledStrip<'_> {
    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        if self.g.len() == 1 {
            return (self.g[0], self.dg[0]);
        }
        let (j, u) = self.grid.interval(t);
        hermite(self.g[j], self.dg[j], self.g[j + 1], self.dg[j + 1], self.grid.h, u)
    }
}

/// Strip `i` of a net.
#[derive(Debug, Clone, Copy)]
pub struct NetStrip<'a> {
    pub net: &'a HoloNet,
    pub strip: usize,
}

impl StripSource for NetStrip<'_> {
    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        self.net.eval(self.strip, t)
    }
}

/// How a net was produced; decides how it is evaluated off the samples.
#[derive(Debug, Clone, PartialEq)]
pub enum NetKind {
    /// `g = offset + a·k + i·b·t`.
    Linear { a: f64, b: f64, offset: Complex64 },
    /// Polynomial base strip at `k_min`, further strips by propagation.
    Propagated { base: PolyStrip },
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoloNet {
    grid: GridSpec,
    g: Vec<Complex64>,
    dg: Vec<Complex64>,
    tau_profile: TauProfile,
    tau: Vec<f64>,
    sigma: Vec<f64>,
    kind: NetKind,
}

impl HoloNet {
    /// Assembles a net from samples. Shapes are checked; the isothermic
    /// conditions are not (see [`validate_net`]).
    pub fn from_samples(
        grid: GridSpec,
        g: Vec<Complex64>,
        dg: Vec<Complex64>,
        tau: Vec<f64>,
        sigma: Vec<f64>,
    ) -> Result<Self, NetError> {
        grid.validate()?;
        let tau_profile = TauProfile::Samples(tau);
        Self::assemble(grid, g, dg, tau_profile, sigma, NetKind::Tabulated)
    }

    fn assemble(
        grid: GridSpec,
        g: Vec<Complex64>,
        dg: Vec<Complex64>,
        tau_profile: TauProfile,
        sigma: Vec<f64>,
        kind: NetKind,
    ) -> Result<Self, NetError> {
        let (ns, nt) = (grid.strips(), grid.samples());
        if g.len() != ns * nt || dg.len() != ns * nt {
            return Err(NetError::InvalidParameter(format!(
                "expected {} samples of g and dg, got {} and {}",
                ns * nt,
                g.len(),
                dg.len()
            )));
        }
        if sigma.len() != ns - 1 {
            return Err(NetError::InvalidParameter(format!(
                "expected {} sigma values, got {}",
                ns - 1,
                sigma.len()
            )));
        }
        let tau: Vec<f64> = match &tau_profile {
            TauProfile::Samples(v) => {
                if v.len() != nt {
                    return Err(NetError::InvalidParameter(format!(
                        "expected {nt} tau samples, got {}",
                        v.len()
                    )));
                }
                v.clone()
            }
            p => (0..nt).map(|j| p.eval(grid.t(j), &grid)).collect(),
        };
        Ok(HoloNet { grid, g, dg, tau_profile, tau, sigma, kind })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn kind(&self) -> &NetKind {
        &self.kind
    }

    pub fn g(&self, i: usize, j: usize) -> Complex64 {
        self.g[self.grid.index(i, j)]
    }

    pub fn dg(&self, i: usize, j: usize) -> Complex64 {
        self.dg[self.grid.index(i, j)]
    }

    pub fn tau(&self, j: usize) -> f64 {
        self.tau[j]
    }

    /// σ on the gap between strips `i` and `i + 1`.
    pub fn sigma(&self, i: usize) -> f64 {
        self.sigma[i]
    }

    pub fn tau_samples(&self) -> &[f64] {
        &self.tau
    }

    pub fn sigma_values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn g_samples(&self) -> &[Complex64] {
        &self.g
    }

    pub fn dg_samples(&self) -> &[Complex64] {
        &self.dg
    }

    pub fn tau_at(&self, t: f64) -> f64 {
        self.tau_profile.eval(t, &self.grid)
    }

    pub fn strip(&self, i: usize) -> NetStrip<'_> {
        NetStrip { net: self, strip: i }
    }

    /// `(g, ∂g)` on strip `i` at an arbitrary `t`.
    pub fn eval(&self, i: usize, t: f64) -> (Complex64, Complex64) {
        match &self.kind {
            NetKind::Linear { a, b, offset } => {
                let k = self.grid.k(i) as f64;
                (offset + Complex64::new(a * k, b * t), Complex64::new(0.0, *b))
            }
            NetKind::Propagated { base } if i == 0 => base.eval(t),
            _ => {
                let nt = self.grid.samples();
                let r = i * nt..(i + 1) * nt;
                SampledStrip { grid: &self.grid, g: &self.g[r.clone()], dg: &self.dg[r] }.eval(t)
            }
        }
    }

    /// Copy of this net with `g(i, j)` shifted by `delta`; the result is
    /// tabulated so that evaluation only sees the samples.
    pub fn perturbed(&self, i: usize, j: usize, delta: Complex64) -> HoloNet {
        let mut net = self.clone();
        let idx = self.grid.index(i, j);
        net.g[idx] += delta;
        net.kind = NetKind::Tabulated;
        net.tau_profile = TauProfile::Samples(net.tau.clone());
        net
    }

    /// Same net with `g` and `∂g` multiplied by `factor`; τ and σ unchanged.
    pub fn scaled(&self, factor: f64) -> HoloNet {
        let mut net = self.clone();
        for v in net.g.iter_mut().chain(net.dg.iter_mut()) {
            *v *= factor;
        }
        net.kind = match &self.kind {
            NetKind::Linear { a, b, offset } => {
                NetKind::Linear { a: a * factor, b: b * factor, offset: offset * factor }
            }
            NetKind::Propagated { base } => {
                NetKind::Propagated { base: PolyStrip(base.0.iter().map(|c| c * factor).collect()) }
            }
            NetKind::Tabulated => NetKind::Tabulated,
        };
        net
    }
}

/// `g(k, t) = a·k + i·b·t`, with `τ ≡ −b²`, `σ ≡ a²`.
pub fn make_linear_net(a: f64, b: f64, grid: GridSpec) -> Result<HoloNet, NetError> {
    make_affine_net(Complex64::new(0.0, 0.0), a, b, grid)
}

/// `g(k, t) = offset + a·k + i·b·t`.
pub fn make_affine_net(offset: Complex64, a: f64, b: f64, grid: GridSpec) -> Result<HoloNet, NetError> {
    grid.validate()?;
    if a == 0.0 || !a.is_finite() {
        return Err(NetError::InvalidParameter("linear net requires a != 0".into()));
    }
    if b == 0.0 || !b.is_finite() {
        return Err(NetError::InvalidParameter("linear net requires b != 0".into()));
    }
    let (ns, nt) = (grid.strips(), grid.samples());
    let mut g = Vec::with_capacity(ns * nt);
    let mut dg = Vec::with_capacity(ns * nt);
    for i in 0..ns {
        let k = grid.k(i) as f64;
        for j in 0..nt {
            g.push(offset + Complex64::new(a * k, b * grid.t(j)));
            dg.push(Complex64::new(0.0, b));
        }
    }
    HoloNet::assemble(
        grid,
        g,
        dg,
        TauProfile::Constant(-b * b),
        vec![a * a; ns - 1],
        NetKind::Linear { a, b, offset },
    )
}

fn check_sign(tau: &TauProfile, sigma: f64, grid: &GridSpec, gap: usize) -> Result<(), NetError> {
    if sigma == 0.0 || !sigma.is_finite() {
        return Err(NetError::InvalidParameter(format!("sigma on gap {gap} must be nonzero")));
    }
    for j in 0..grid.samples() {
        let t = grid.t(j);
        if !(tau.eval(t, grid) / sigma < 0.0) {
            return Err(NetError::SignCondition { gap, t });
        }
    }
    Ok(())
}

/// A strip of values with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Strip {
    pub g: Vec<Complex64>,
    pub dg: Vec<Complex64>,
}

/// Solves `∂g₁ = (τ/σ)(g₁ − g)²/∂g` along the grid, starting from
/// `g1_init` at `t_min`. The stored derivative is the right-hand side itself.
pub fn propagate_strip(
    prev: &dyn StripSource,
    tau: &TauProfile,
    sigma: f64,
    g1_init: Complex64,
    grid: &GridSpec,
    solver: &OdeSettings,
) -> Result<Strip, NetError> {
    grid.validate()?;
    check_sign(tau, sigma, grid, 0)?;
    let (g0, _) = prev.eval(grid.t_min);
    if (g1_init - g0).norm() <= COLLISION_TOL {
        return Err(NetError::SeedCollision { strip: 0 });
    }
    let rhs = |t: f64, g1: Complex64| {
        let (g, dg) = prev.eval(t);
        let d = g1 - g;
        d * d * (tau.eval(t, grid) / sigma) / dg
    };
    let g = integrate_on_grid(rhs, grid.t_min, g1_init, grid.h, grid.samples(), solver)?;
    let mut dg = Vec::with_capacity(g.len());
    for (j, g1) in g.iter().enumerate() {
        let t = grid.t(j);
        let (gp, _) = prev.eval(t);
        if (g1 - gp).norm() < COLLISION_TOL {
            return Err(NetError::Collision { gap: 0, t });
        }
        dg.push(rhs(t, *g1));
    }
    Ok(Strip { g, dg })
}

/// Builds a net from a polynomial base strip at `k_min` by propagating all
/// further strips together as one system (no interpolation of intermediate
/// strips is involved). `seeds[i]` is `g(k_min + i + 1, t_min)`.
pub fn propagate_net(
    base: PolyStrip,
    tau: TauProfile,
    sigma: Vec<f64>,
    seeds: &[Complex64],
    grid: GridSpec,
    solver: &OdeSettings,
) -> Result<HoloNet, NetError> {
    grid.validate()?;
    let ns = grid.strips();
    if sigma.len() != ns - 1 || seeds.len() != ns - 1 {
        return Err(NetError::InvalidParameter(format!(
            "need {} sigma values and seeds, got {} and {}",
            ns - 1,
            sigma.len(),
            seeds.len()
        )));
    }
    if let TauProfile::Samples(v) = &tau {
        if v.len() != grid.samples() {
            return Err(NetError::InvalidParameter("tau samples do not match grid".into()));
        }
    }
    for (gap, s) in sigma.iter().enumerate() {
        check_sign(&tau, *s, &grid, gap)?;
    }
    let mut prev = base.eval(grid.t_min).0;
    for (i, seed) in seeds.iter().enumerate() {
        if (seed - prev).norm() <= COLLISION_TOL {
            return Err(NetError::SeedCollision { strip: i + 1 });
        }
        prev = *seed;
    }
    let derivs = |t: f64, y: &[Complex64]| -> Vec<Complex64> {
        let (mut g, mut dg) = base.eval(t);
        let ratio = tau.eval(t, &grid);
        let mut out = Vec::with_capacity(y.len());
        for (i, g1) in y.iter().enumerate() {
            let d = g1 - g;
            let dg1 = d * d * (ratio / sigma[i]) / dg;
            out.push(dg1);
            g = *g1;
            dg = dg1;
        }
        out
    };
    let states = integrate_on_grid(
        |t, y: CVec| CVec(derivs(t, &y.0)),
        grid.t_min,
        CVec(seeds.to_vec()),
        grid.h,
        grid.samples(),
        solver,
    )?;
    let nt = grid.samples();
    let mut g = vec![Complex64::new(0.0, 0.0); ns * nt];
    let mut dg = g.clone();
    for (j, state) in states.iter().enumerate() {
        let t = grid.t(j);
        let (g0, dg0) = base.eval(t);
        g[j] = g0;
        dg[j] = dg0;
        let d = derivs(t, &state.0);
        for i in 1..ns {
            let idx = grid.index(i, j);
            g[idx] = state.0[i - 1];
            dg[idx] = d[i - 1];
            if (g[idx] - g[grid.index(i - 1, j)]).norm() < COLLISION_TOL {
                return Err(NetError::Collision { gap: i - 1, t });
            }
        }
    }
    HoloNet::assemble(grid, g, dg, tau, sigma, NetKind::Propagated { base })
}

/// Which isothermic condition a sample violates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NetFailure {
    ZeroDerivative { strip: usize, sample: usize },
    ZeroDifference { gap: usize, sample: usize },
    Factorization { gap: usize, sample: usize, residual: f64 },
    SignCondition { gap: usize, sample: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetReport {
    pub max_residual: f64,
    /// `(gap, sample)` of the largest factorization residual.
    pub worst: Option<(usize, usize)>,
    pub pass: bool,
    /// First few failures, in grid order.
    pub failures: Vec<NetFailure>,
    pub failure_count: usize,
}

const MAX_LISTED_FAILURES: usize = 32;

/// Checks `∂g ≠ 0`, `Δg ≠ 0`, the factorization of the cross ratio (relative
/// residual ≤ `tol`) and `τ/σ < 0` on every sample.
pub fn validate_net(net: &HoloNet, tol: f64) -> NetReport {
    let grid = net.grid;
    let (ns, nt) = (grid.strips(), grid.samples());
    let mut failures = Vec::new();
    let mut count = 0usize;
    let mut push = |f: NetFailure, failures: &mut Vec<NetFailure>| {
        count += 1;
        if failures.len() < MAX_LISTED_FAILURES {
            failures.push(f);
        }
    };
    for i in 0..ns {
        for j in 0..nt {
            let d = net.dg(i, j);
            if !(d.norm() > 0.0) {
                push(NetFailure::ZeroDerivative { strip: i, sample: j }, &mut failures);
            }
        }
    }
    let mut max_residual = 0.0_f64;
    let mut worst = None;
    for i in 0..ns - 1 {
        for j in 0..nt {
            let ratio = net.tau(j) / net.sigma(i);
            if !(ratio < 0.0) {
                push(NetFailure::SignCondition { gap: i, sample: j }, &mut failures);
            }
            let delta = net.g(i + 1, j) - net.g(i, j);
            if !(delta.norm() > 0.0) {
                push(NetFailure::ZeroDifference { gap: i, sample: j }, &mut failures);
                continue;
            }
            let cr = net.dg(i, j) * net.dg(i + 1, j) / (delta * delta);
            let residual = (cr - ratio).norm() / ratio.abs();
            let residual = if residual.is_nan() { f64::INFINITY } else { residual };
            if residual > max_residual || worst.is_none() {
                max_residual = max_residual.max(residual);
                worst = Some((i, j));
            }
            if residual > tol {
                push(NetFailure::Factorization { gap: i, sample: j, residual }, &mut failures);
            }
        }
    }
    NetReport { max_residual, worst, pass: count == 0, failures, failure_count: count }
}
