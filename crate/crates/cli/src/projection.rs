//! Maps surface points from their four-dimensional model into R³ for viewing.

use semidiscrete::{Ambient, Vec4};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("point {point:?} violates the {ambient:?} constraint (residual {residual:.3e})")]
    ConstraintViolation { point: Vec4, ambient: Ambient, residual: f64 },
    /// The image left the region the projection guarantees; only reachable
    /// through rounding at extreme coordinates.
    #[error("projected point {image:?} of {point:?} leaves the {ambient:?} image region")]
    ImageOutOfRange { point: Vec4, image: [f64; 3], ambient: Ambient },
}

/// Hollow-ball radii lie strictly between these bounds.
pub const HOLLOW_INNER: f64 = 0.20787957635076193; // e^{−π/2}
pub const HOLLOW_OUTER: f64 = 4.810477380965351; // e^{π/2}

fn constraint_residual(p: &Vec4, ambient: Ambient) -> f64 {
    match ambient {
        Ambient::R3 | Ambient::R21 => p[3].abs(),
        Ambient::H3 => (ambient.inner(p, p) + 1.0).abs(),
        Ambient::S21 => (ambient.inner(p, p) - 1.0).abs(),
    }
}

/// R³ and R^{2,1}: the stored coordinates. H³: stereographic projection
/// `(z₁, z₂, z₃)/(1 + z₀)` from `(0, 0, 0, −1)`, sending H³₊ into the open
/// unit ball and H³₋ outside it. S^{2,1}: the hollow ball
/// `(z₁, z₂, z₃)·e^{arctan z₀}/√(1 + z₀²)`.
pub fn project_ambient(p: &Vec4, ambient: Ambient, tol: f64) -> Result<[f64; 3], ProjectionError> {
    let residual = constraint_residual(p, ambient);
    if !(residual <= tol) {
        return Err(ProjectionError::ConstraintViolation { point: *p, ambient, residual });
    }
    let image = match ambient {
        Ambient::R3 | Ambient::R21 => [p[0], p[1], p[2]],
        Ambient::H3 => {
            let d = 1.0 + p[3];
            [p[0] / d, p[1] / d, p[2] / d]
        }
        Ambient::S21 => {
            let z0 = p[3];
            let f = z0.atan().exp() / z0.hypot(1.0);
            [p[0] * f, p[1] * f, p[2] * f]
        }
    };
    let r = image.iter().map(|c| c * c).sum::<f64>().sqrt();
    let ok = match ambient {
        Ambient::R3 | Ambient::R21 => image.iter().all(|c| c.is_finite()),
        Ambient::H3 if p[3] > 0.0 => r < 1.0,
        Ambient::H3 => r > 1.0 && r.is_finite(),
        Ambient::S21 => r > HOLLOW_INNER && r < HOLLOW_OUTER,
    };
    if !ok {
        return Err(ProjectionError::ImageOutOfRange { point: *p, image, ambient });
    }
    Ok(image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bounds_constants() {
        use std::f64::consts::FRAC_PI_2;
        let (lo, hi) = ((-FRAC_PI_2).exp(), FRAC_PI_2.exp());
        assert!((lo - HOLLOW_INNER).abs() < 1e-16 && (hi - HOLLOW_OUTER).abs() < 1e-15);
    }

    #[test]
    fn apex_and_equator() {
        assert_eq!(project_ambient(&Vec4::new(0.0, 0.0, 0.0, 1.0), Ambient::H3, 1e-6).unwrap(), [0.0, 0.0, 0.0]);
        assert_eq!(project_ambient(&Vec4::new(1.0, 0.0, 0.0, 0.0), Ambient::S21, 1e-6).unwrap(), [1.0, 0.0, 0.0]);
        assert_eq!(project_ambient(&Vec4::new(1.0, 2.0, 3.0, 0.0), Ambient::R21, 1e-6).unwrap(), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn constraint_violation() {
        let e = project_ambient(&Vec4::new(0.0, 0.0, 0.0, 1.1), Ambient::H3, 1e-6).unwrap_err();
        assert!(matches!(e, ProjectionError::ConstraintViolation { .. }));
        assert!(project_ambient(&Vec4::new(0.0, 0.0, 0.0, 1.0), Ambient::R3, 1e-6).is_err());
    }

    #[test]
    fn lower_sheet_maps_outside() {
        let p = Vec4::new(0.3, 0.0, 0.0, -(1.09f64).sqrt());
        let r = project_ambient(&p, Ambient::H3, 1e-6).unwrap();
        assert!(r[0].abs() > 1.0);
    }

    fn h3_point(v: [f64; 3], upper: bool) -> Vec4 {
        let z0 = (1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        Vec4::new(v[0], v[1], v[2], if upper { z0 } else { -z0 })
    }

    proptest! {
        #[test]
        fn hyperbolic_upper_sheet_inside_ball(v in prop::array::uniform3(-50.0..50.0f64)) {
            let r = project_ambient(&h3_point(v, true), Ambient::H3, 1e-6).unwrap();
            prop_assert!(r.iter().map(|c| c * c).sum::<f64>() < 1.0);
        }

        #[test]
        fn de_sitter_radius_in_shell(dir in prop::array::uniform3(-1.0..1.0f64), z0 in -1e3..1e3f64) {
            let n = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
            prop_assume!(n > 1e-3);
            let scale = z0.hypot(1.0) / n;
            let p = Vec4::new(dir[0] * scale, dir[1] * scale, dir[2] * scale, z0);
            prop_assume!((Ambient::S21.inner(&p, &p) - 1.0).abs() < 1e-6);
            let r = project_ambient(&p, Ambient::S21, 1e-6).unwrap();
            let r = r.iter().map(|c| c * c).sum::<f64>().sqrt();
            prop_assert!(r > HOLLOW_INNER && r < HOLLOW_OUTER);
        }
    }
}
