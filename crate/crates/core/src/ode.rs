//! Fixed-step classical Runge–Kutta integration with a half-step
//! Richardson estimate of the local error.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use thiserror::Error;

use crate::geom::{Mat2C, Vec4};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeMethod {
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSettings {
    /// Upper bound for the internal step; each grid interval is split into
    /// `ceil(h / step)` equal substeps.
    pub step: f64,
    pub method: OdeMethod,
    /// Largest accepted Richardson estimate of the error over one grid interval.
    pub error_budget: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        OdeSettings { step: 1e-3, method: OdeMethod::Rk4, error_budget: 1e-8 }
    }
}

impl OdeSettings {
    pub fn new(step: f64, error_budget: f64) -> Result<Self, OdeError> {
        let s = OdeSettings { step, method: OdeMethod::Rk4, error_budget };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(OdeError::InvalidSettings("step must be positive"));
        }
        if !(self.error_budget > 0.0) {
            return Err(OdeError::InvalidSettings("error budget must be positive"));
        }
        Ok(())
    }

    pub(crate) fn substeps(&self, interval: f64) -> usize {
        ((interval.abs() / self.step) - 1e-9).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("invalid solver settings: {0}")]
    InvalidSettings(&'static str),
    #[error("local error estimate {estimate:.3e} exceeds budget {budget:.3e} at t = {t}")]
    StepFailure { t: f64, estimate: f64, budget: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
}

/// State types the integrator can advance.
pub trait OdeState: Clone + Add<Output = Self> + Mul<f64, Output = Self> {
    fn size(&self) -> f64;
    fn finite(&self) -> bool;
}

impl OdeState for Complex64 {
    fn size(&self) -> f64 {
        self.norm()
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for Vec4 {
    fn size(&self) -> f64 {
        self.norm()
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

/// A vector of complex unknowns, used when several strips are propagated
/// together.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec(pub Vec<Complex64>);

impl Add for CVec {
    type Output = CVec;
    fn add(mut self, o: CVec) -> CVec {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
        self
    }
}

impl Mul<f64> for CVec {
    type Output = CVec;
    fn mul(mut self, s: f64) -> CVec {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }
}

impl OdeState for CVec {
    fn size(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
    fn finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl OdeState for Mat2C {
    fn size(&self) -> f64 {
        self.norm()
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

pub fn rk4_step<S: OdeState>(f: &mut impl FnMut(f64, S) -> S, t: f64, y: S, h: f64) -> S {
    let k1 = f(t, y.clone());
    let k2 = f(t + 0.5 * h, y.clone() + k1.clone() * (0.5 * h));
    let k3 = f(t + 0.5 * h, y.clone() + k2.clone() * (0.5 * h));
    let k4 = f(t + h, y.clone() + k3.clone() * h);
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

fn advance<S: OdeState>(f: &mut impl FnMut(f64, S) -> S, t0: f64, y0: S, len: f64, n: usize) -> S {
    let h = len / n as f64;
    let mut y = y0;
    for i in 0..n {
        y = rk4_step(f, t0 + i as f64 * h, y, h);
    }
    y
}

/// Integrates `y' = f(t, y)` from `t0` and returns the state at
/// `t0 + j·h` for `j = 0..samples`. `h` may be negative.
///
/// Every grid interval is also integrated with half the substep length;
/// the difference, divided by 15, must stay within the error budget.
pub fn integrate_on_grid<S: OdeState>(
    mut f: impl FnMut(f64, S) -> S,
    t0: f64,
    y0: S,
    h: f64,
    samples: usize,
    settings: &OdeSettings,
) -> Result<Vec<S>, OdeError> {
    settings.validate()?;
    let n = settings.substeps(h);
    let mut out = Vec::with_capacity(samples);
    let mut y = y0;
    out.push(y.clone());
    for j in 1..samples {
        let t = t0 + (j - 1) as f64 * h;
        let coarse = advance(&mut f, t, y.clone(), h, n);
        let fine = advance(&mut f, t, y, h, 2 * n);
        if !coarse.finite() || !fine.finite() {
            return Err(OdeError::NonFinite { t });
        }
        let estimate = (coarse.clone() + fine * -1.0).size() / 15.0;
        if estimate > settings.error_budget {
            return Err(OdeError::StepFailure { t, estimate, budget: settings.error_budget });
        }
        y = coarse;
        out.push(y.clone());
    }
    Ok(out)
}
