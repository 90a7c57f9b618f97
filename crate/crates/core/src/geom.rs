//! Ambient-space arithmetic.
//!
//! Points of the four-dimensional model spaces R⁴ (Euclidean) and R^{3,1}
//! (Minkowski, fourth slot timelike) are stored as [`Vec4`]. Both spaces are
//! identified with 2×2 complex matrices so that tangent cross ratios can be
//! formed by matrix multiplication and inversion:
//!
//! ```text
//! R⁴     : (z1,z2,z3,z4) ↦ [[z1 + i z2,  z3 + i z4], [-z3 + i z4, z1 - i z2]]
//! R^{3,1}: (z1,z2,z3,z0) ↦ [[z0 + z3,    z1 - i z2], [ z1 + i z2, z0 - z3  ]]
//! ```
//!
//! Under these embeddings `det = z∘z` (Euclidean) and `det = -z∘z`
//! (Minkowski). Planar circle helpers used by the singular-edge criteria live
//! here too.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Relative tolerance for deciding that a 2×2 product is a scalar matrix.
pub const SCALAR_MATRIX_TOL: f64 = 1e-8;
/// Relative tolerance on the imaginary part of a tangent cross ratio when
/// deciding that four planar data lie on a common circle.
pub const CIRCLE_CONSISTENCY_TOL: f64 = 1e-8;
/// Width of the band around tangency in [`circle_vs_unit_circle`].
pub const TANGENCY_BAND: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("matrix is not in the image of the embedding (residual {residual:.3e})")]
    NonRepresentableMatrix { residual: f64 },
    #[error("cross-ratio product is not a scalar matrix (relative residual {residual:.3e})")]
    NotScalarMatrix { residual: f64 },
    #[error("edge vector has a non-invertible matrix representation")]
    SingularEdgeVector,
    #[error("no common tangent circle (imaginary cross-ratio residual {residual:.3e})")]
    NoCommonCircle { residual: f64 },
    #[error("tangent circle data degenerate: points coincide or a tangent vanishes")]
    DegenerateCircleData,
}

/// A vector of the four-dimensional model space.
///
/// Components are `(z1, z2, z3, z4)` in R⁴ and `(z1, z2, z3, z0)` in
/// R^{3,1}; in the latter the last slot carries the minus sign.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0.0; 4]);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Vec4([a, b, c, d])
    }

    /// Unit coordinate vector `e_i`.
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        Vec4(v)
    }

    /// Coordinate (Euclidean) dot product, independent of any ambient metric.
    pub fn dot(&self, o: &Vec4) -> f64 {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// Coordinate (Euclidean) norm.
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl fmt::Debug for Vec4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

impl Index<usize> for Vec4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, o: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for Vec4 {
    fn add_assign(&mut self, o: Vec4) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, o: Vec4) -> Vec4 {
        Vec4(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        Vec4(self.0.map(|v| -v))
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, s: f64) -> Vec4 {
        Vec4(self.0.map(|v| v * s))
    }
}

impl Mul<Vec4> for f64 {
    type Output = Vec4;
    fn mul(self, v: Vec4) -> Vec4 {
        v * self
    }
}

/// Signature of the four-dimensional vector space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Euclidean4,
    /// (+,+,+,−) with the fourth slot timelike.
    Minkowski31,
}

impl Signature {
    pub fn inner(self, u: &Vec4, v: &Vec4) -> f64 {
        let (a, b) = (u.0, v.0);
        match self {
            Signature::Euclidean4 => a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3],
            Signature::Minkowski31 => a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3],
        }
    }

    pub fn embed(self, z: &Vec4) -> Mat2C {
        let [z1, z2, z3, z4] = z.0;
        let c = Complex64::new;
        match self {
            Signature::Euclidean4 => Mat2C([[c(z1, z2), c(z3, z4)], [c(-z3, z4), c(z1, -z2)]]),
            Signature::Minkowski31 => {
                Mat2C([[c(z4 + z3, 0.0), c(z1, -z2)], [c(z1, z2), c(z4 - z3, 0.0)]])
            }
        }
    }

    /// Inverse of [`Signature::embed`]. The matrix must lie in the image of
    /// the embedding within `1e-10` relative to its norm.
    pub fn unembed(self, m: &Mat2C) -> Result<Vec4, GeomError> {
        let [[a, b], [c, d]] = m.0;
        let (v, residual) = match self {
            Signature::Euclidean4 => {
                let v = Vec4::new(
                    0.5 * (a.re + d.re),
                    0.5 * (a.im - d.im),
                    0.5 * (b.re - c.re),
                    0.5 * (b.im + c.im),
                );
                let r = (a - d.conj()).norm().max((b + c.conj()).norm());
                (v, r)
            }
            Signature::Minkowski31 => {
                let v = Vec4::new(
                    0.5 * (b.re + c.re),
                    0.5 * (c.im - b.im),
                    0.5 * (a.re - d.re),
                    0.5 * (a.re + d.re),
                );
                let r = a.im.abs().max(d.im.abs()).max((b - c.conj()).norm());
                (v, r)
            }
        };
        let scale = m.norm().max(f64::MIN_POSITIVE);
        if residual > 1e-10 * scale.max(1.0) {
            return Err(GeomError::NonRepresentableMatrix { residual: residual / scale });
        }
        Ok(v)
    }
}

/// Inner product of `u` and `v` under signature `m`.
pub fn inner(u: &Vec4, v: &Vec4, m: Signature) -> f64 {
    m.inner(u, v)
}

pub fn embed(z: &Vec4, m: Signature) -> Mat2C {
    m.embed(z)
}

pub fn unembed(mat: &Mat2C, m: Signature) -> Result<Vec4, GeomError> {
    m.unembed(mat)
}

/// `(a ∧ b) c = (a∘c) b − (b∘c) a`.
pub fn wedge_apply(a: &Vec4, b: &Vec4, c: &Vec4, m: Signature) -> Vec4 {
    *b * m.inner(a, c) - *a * m.inner(b, c)
}

/// Scalar value of `p · q⁻¹ · r · s⁻¹` in the matrix model of `m`.
///
/// For circular edge data (`p = ∂x`, `q = s = Δx`, `r = ∂x₁`) the product is a
/// real multiple of the identity and that multiple is the tangent cross
/// ratio. The complex scalar is returned; callers decide how strictly its
/// imaginary part must vanish.
pub fn matrix_cross_ratio(
    p: &Vec4,
    q: &Vec4,
    r: &Vec4,
    s: &Vec4,
    m: Signature,
) -> Result<Complex64, GeomError> {
    matrix_cross_ratio_with_tol(p, q, r, s, m, SCALAR_MATRIX_TOL)
}

pub fn matrix_cross_ratio_with_tol(
    p: &Vec4,
    q: &Vec4,
    r: &Vec4,
    s: &Vec4,
    m: Signature,
    tol: f64,
) -> Result<Complex64, GeomError> {
    let qi = m.embed(q).inverse().ok_or(GeomError::SingularEdgeVector)?;
    let si = m.embed(s).inverse().ok_or(GeomError::SingularEdgeVector)?;
    let prod = m.embed(p) * qi * m.embed(r) * si;
    let [[a, b], [c, d]] = prod.0;
    let scalar = (a + d) * 0.5;
    let off = b.norm().max(c.norm()).max(((a - d) * 0.5).norm());
    let scale = prod.norm();
    if scale == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if off > tol * scale {
        return Err(GeomError::NotScalarMatrix { residual: off / scale });
    }
    Ok(scalar)
}

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2C(pub [[Complex64; 2]; 2]);

impl Mat2C {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mat2C([[o, z], [z, o]])
    }

    pub fn zero() -> Self {
        Mat2C([[Complex64::new(0.0, 0.0); 2]; 2])
    }

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2C([[a, b], [c, d]])
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Mat2C([[a, z], [z, d]])
    }

    pub fn det(&self) -> Complex64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse, or `None` when `|det|` is negligible against the entries.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        let n = self.norm();
        if n == 0.0 || det.norm() <= 1e-14 * n * n {
            return None;
        }
        let [[a, b], [c, d]] = self.0;
        let r = det.inv();
        Some(Mat2C([[d * r, -b * r], [-c * r, a * r]]))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2C([[a.conj(), c.conj()], [b.conj(), d.conj()]])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Mat2C(self.0.map(|row| row.map(|v| v * s)))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        let (a, b) = (self.0, o.0);
        Mat2C(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        }))
    }
}

impl Mul<f64> for Mat2C {
    type Output = Mat2C;
    fn mul(self, s: f64) -> Mat2C {
        Mat2C(self.0.map(|row| row.map(|v| v * s)))
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        Mat2C(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] + o.0[i][j])))
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        Mat2C(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] - o.0[i][j])))
    }
}

/// The three-dimensional spaceform a surface lives in, together with the
/// way its points sit inside R⁴ or R^{3,1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    /// Euclidean 3-space, stored as `(z1, z2, z3, 0)`.
    R3,
    /// Minkowski 3-space with the third slot timelike, stored as
    /// `(z1, z2, z3, 0)`.
    R21,
    /// Hyperbolic space `z∘z = -1` in R^{3,1}, both sheets.
    H3,
    /// De Sitter space `z∘z = +1` in R^{3,1}.
    S21,
}

/// Sheet of the two-sheeted hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Ambient {
    /// Ambient inner product on stored coordinates.
    pub fn inner(self, u: &Vec4, v: &Vec4) -> f64 {
        let (a, b) = (u.0, v.0);
        match self {
            Ambient::R3 => a[0] * b[0] + a[1] * b[1] + a[2] * b[2],
            Ambient::R21 => a[0] * b[0] + a[1] * b[1] - a[2] * b[2],
            Ambient::H3 | Ambient::S21 => Signature::Minkowski31.inner(u, v),
        }
    }

    /// Signature of the matrix model used for cross ratios.
    pub fn signature(self) -> Signature {
        match self {
            Ambient::R3 => Signature::Euclidean4,
            Ambient::R21 | Ambient::H3 | Ambient::S21 => Signature::Minkowski31,
        }
    }

    /// Stored coordinates → coordinates in the model space of
    /// [`Ambient::signature`]. R^{2,1} moves its timelike slot to `z0`.
    pub fn to_model(self, v: &Vec4) -> Vec4 {
        match self {
            Ambient::R21 => Vec4::new(v[0], v[1], 0.0, v[2]),
            _ => *v,
        }
    }

    pub fn is_lorentzian(self) -> bool {
        matches!(self, Ambient::R21 | Ambient::S21)
    }

    /// Checks the submanifold constraint of a point within `tol`.
    pub fn check_point(self, v: &Vec4, tol: f64) -> bool {
        match self {
            Ambient::R3 | Ambient::R21 => v[3] == 0.0,
            Ambient::H3 => (self.inner(v, v) + 1.0).abs() <= tol && v[3] != 0.0,
            Ambient::S21 => (self.inner(v, v) - 1.0).abs() <= tol,
        }
    }

    /// Sheet of a hyperbolic point (`None` outside H3).
    pub fn sheet(self, v: &Vec4) -> Option<Sheet> {
        match self {
            Ambient::H3 if v[3] > 0.0 => Some(Sheet::Plus),
            Ambient::H3 => Some(Sheet::Minus),
            _ => None,
        }
    }
}

/// A circle or straight line in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanarCircle {
    Circle { center: Complex64, radius: f64 },
    /// Line through `point` with unit `direction`.
    Line { point: Complex64, direction: Complex64 },
}

impl PlanarCircle {
    /// Unsigned distance from `z` to the curve.
    pub fn distance(&self, z: Complex64) -> f64 {
        match *self {
            PlanarCircle::Circle { center, radius } => ((z - center).norm() - radius).abs(),
            PlanarCircle::Line { point, direction } => ((z - point) * direction.conj()).im.abs(),
        }
    }

    /// Sine of the angle between `v` and the tangent of the curve at `z`
    /// (`z` assumed on the curve).
    pub fn tangency_residual(&self, z: Complex64, v: Complex64) -> f64 {
        let tangent = match *self {
            PlanarCircle::Circle { center, .. } => (z - center) * Complex64::i(),
            PlanarCircle::Line { direction, .. } => direction,
        };
        let (a, b) = (tangent.norm(), v.norm());
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        (v * tangent.conj()).im.abs() / (a * b)
    }
}

/// The circle through `g` and `g1` tangent to `dg` at `g` and `dg1` at `g1`.
pub fn tangent_circle(
    g: Complex64,
    dg: Complex64,
    g1: Complex64,
    dg1: Complex64,
) -> Result<PlanarCircle, GeomError> {
    let delta = g1 - g;
    let scale = delta.norm().max(g.norm()).max(g1.norm()).max(1.0);
    if delta.norm() <= 1e-14 * scale || dg.norm() == 0.0 || dg1.norm() == 0.0 {
        return Err(GeomError::DegenerateCircleData);
    }
    let cr = dg * dg1 / (delta * delta);
    let residual = cr.im.abs() / cr.norm();
    if residual > CIRCLE_CONSISTENCY_TOL {
        return Err(GeomError::NoCommonCircle { residual });
    }
    // Center on the normal line at g: c = g + i·dg·r with |c - g1| = |c - g|.
    let cross = (delta * dg.conj()).im;
    if cross.abs() <= 1e-12 * delta.norm() * dg.norm() {
        return Ok(PlanarCircle::Line { point: g, direction: dg / dg.norm() });
    }
    let r = delta.norm_sqr() / (2.0 * cross);
    let center = g + Complex64::i() * dg * r;
    Ok(PlanarCircle::Circle { center, radius: r.abs() * dg.norm() })
}

/// Position of a planar circle relative to the unit circle S¹.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitCircleRelation {
    Disjoint,
    Tangent,
    Transversal,
    Coincident,
}

pub fn circle_vs_unit_circle(c: &PlanarCircle) -> UnitCircleRelation {
    let band = TANGENCY_BAND;
    match *c {
        PlanarCircle::Circle { center, radius } => {
            let d = center.norm();
            if d <= band && (radius - 1.0).abs() <= band {
                UnitCircleRelation::Coincident
            } else if (d - (radius - 1.0).abs()).abs() <= band || (d - (radius + 1.0)).abs() <= band {
                UnitCircleRelation::Tangent
            } else if (radius - 1.0).abs() < d && d < radius + 1.0 {
                UnitCircleRelation::Transversal
            } else {
                UnitCircleRelation::Disjoint
            }
        }
        PlanarCircle::Line { .. } => {
            let dist = c.distance(Complex64::new(0.0, 0.0));
            if (dist - 1.0).abs() <= band {
                UnitCircleRelation::Tangent
            } else if dist < 1.0 {
                UnitCircleRelation::Transversal
            } else {
                UnitCircleRelation::Disjoint
            }
        }
    }
}
