use num_complex::Complex64;
use proptest::prelude::*;
use semidiscrete::curvature::{edge_cross_ratio, Curv, INF_THRESHOLD};
use semidiscrete::curved::{lw_kappa, integrate_frame, lift_surface, LWParams};
use semidiscrete::flat::{
    build_minmax, minmax_delta_x, minmax_dx, normal_and_derivative, parallel_flat, parallel_principal, principal_minmax_closed,
};
use semidiscrete::geom::{tangent_circle, PlanarCircle};
use semidiscrete::holo::{make_affine_net, make_linear_net, GridSpec, HoloNet};
use semidiscrete::singularity::*;
use semidiscrete::surface::{EdgeData, Epsilon};
use semidiscrete::{Ambient, Mat2C, OdeSettings, SemiDiscreteSurface, Vec4};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Strips k ≤ 2 lie inside S¹, k = 3 outside; no strip meets S¹.
fn crossing_net() -> HoloNet {
    let grid = GridSpec::new(-3, 3, -0.5, 0.5, 0.01).unwrap();
    make_affine_net(c(0.05, 0.0), 0.4, 1.0, grid).unwrap()
}

fn maximal(net: &HoloNet) -> SemiDiscreteSurface {
    build_minmax(net, Epsilon::Minus, Vec4::ZERO, &OdeSettings::default()).unwrap()
}

#[test]
fn theta_interval_sweep_matches_curvature_sign() {
    let cases = [
        (make_linear_net(1.0, 1.0, GridSpec::new(-2, 2, -1.0, 1.0, 0.05).unwrap()).unwrap(), Epsilon::Plus),
        (crossing_net(), Epsilon::Minus),
    ];
    for (net, eps) in cases {
        let grid = *net.grid();
        let mut checked = 0;
        for i in 1..grid.strips() - 1 {
            for j in (0..grid.samples()).step_by(10) {
                let iv = theta_singular_interval(&net, eps, i, j).unwrap();
                let kp = principal_minmax_closed(&net, eps, i - 1, j);
                let k0 = principal_minmax_closed(&net, eps, i, j);
                let k1 = principal_minmax_closed(&net, eps, i + 1, j);
                let disc = iv.discrete.unwrap();
                let smooth = iv.smooth_next.unwrap();
                let prev = iv.smooth_prev.unwrap();
                let lo = disc.lo.min(smooth.lo).min(prev.lo) - 1.0;
                let hi = disc.hi.max(smooth.hi).max(prev.hi) + 1.0;
                for m in 0..100 {
                    let theta = lo + (hi - lo) * m as f64 / 99.0;
                    let prod = |a: Curv, b: Curv| {
                        let (a, b) = (parallel_principal(a, theta), parallel_principal(b, theta));
                        a.is_infinite() || b.is_infinite() || a.signum() * b.signum() <= 0.0
                    };
                    for (interval, nonpos) in [
                        (disc, prod(kp.kappa01.unwrap(), k0.kappa01.unwrap())),
                        (smooth, prod(k0.kappa, k1.kappa)),
                        (prev, prod(kp.kappa, k0.kappa)),
                    ] {
                        if interval.endpoint_distance(theta) < 1e-9 {
                            continue;
                        }
                        assert_eq!(interval.contains(theta), nonpos, "{eps:?} ({i},{j}) θ={theta} {interval:?}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 1000);
    }
}

#[test]
fn parallel_surface_is_singular_inside_theta_interval() {
    // Minimal surface, vertex k = 0: discrete interval between a₋₁ and a₁.
    let grid = GridSpec::new(-2, 2, -1.0, 1.0, 0.05).unwrap();
    let net = make_affine_net(c(0.1, 0.0), 1.0, 1.0, grid).unwrap();
    let s = build_minmax(&net, Epsilon::Plus, Vec4::ZERO, &OdeSettings::default()).unwrap();
    let (i, j) = (2, 30);
    let iv = theta_singular_interval(&net, Epsilon::Plus, i, j).unwrap().discrete.unwrap();
    assert!(iv.hi - iv.lo > 1e-3);
    let inside = 0.5 * (iv.lo + iv.hi);
    let p = parallel_flat(&s, inside).unwrap();
    let vc = classify_vertex(&p, i, j, INF_THRESHOLD).unwrap();
    assert!(matches!(vc.discrete_dir, DirClass::Fps | DirClass::S));
    let outside = iv.hi + 0.5;
    let p = parallel_flat(&s, outside).unwrap();
    assert_eq!(classify_vertex(&p, i, j, INF_THRESHOLD).unwrap().discrete_dir, DirClass::None);
}

#[test]
fn adjacency_on_maximal_surface() {
    let net = crossing_net();
    let s = maximal(&net);
    let mut singular_vertices = 0;
    for i in 1..s.strips() - 1 {
        for j in 0..s.samples() {
            let vc = classify_vertex(&s, i, j, INF_THRESHOLD).unwrap();
            if vc.discrete_dir == DirClass::Fps {
                singular_vertices += 1;
            }
            // κ cannot change sign along the smooth direction.
            assert_ne!(vc.smooth_dir, DirClass::Fps);
        }
    }
    assert!(singular_vertices > 0);
    let violations = adjacency_check(&[&s], AdjacencyKind::MaximalEdges, INF_THRESHOLD).unwrap();
    assert!(violations.is_empty(), "{violations:?}");
}

#[test]
fn maximal_singular_edges_match_circle_test() {
    let net = crossing_net();
    let s = maximal(&net);
    let mut singular = 0;
    for i in 0..s.strips() - 1 {
        for j in 0..s.samples() {
            let status = singular_edge_lorentz(&s, i, j, PlaneVariant::TangentPlane).unwrap();
            assert_eq!(status.singular, maximal_edge_circle_test(&net, i, j).unwrap(), "({i},{j})");
            singular += status.singular as usize;
        }
    }
    assert!(singular > 0);
}

#[test]
fn minimal_surface_has_no_discrete_sign_changes() {
    let net = make_linear_net(1.0, 1.0, GridSpec::new(-2, 2, -1.0, 1.0, 0.05).unwrap()).unwrap();
    let s = build_minmax(&net, Epsilon::Plus, Vec4::ZERO, &OdeSettings::default()).unwrap();
    for i in 1..s.strips() - 1 {
        for j in 0..s.samples() {
            assert_eq!(classify_vertex(&s, i, j, INF_THRESHOLD).unwrap().discrete_dir, DirClass::None);
        }
    }
    assert_eq!(singular_edge_lorentz(&s, 0, 0, PlaneVariant::TangentPlane), Err(SingError::NotLorentzian));
}

#[test]
fn adjacency_on_cmc1_surfaces() {
    let net = crossing_net();
    let sweep = [1e-2, -1e-2, 1e-3, -1e-3];
    let pairs: Vec<_> = sweep
        .iter()
        .map(|&l| {
            let frame = integrate_frame(&net, l, Mat2C::identity(), &OdeSettings::default()).unwrap();
            lift_surface(&frame, LWParams::new(-1.0).unwrap()).unwrap()
        })
        .collect();
    let surfaces: Vec<&SemiDiscreteSurface> = pairs.iter().map(|p| &p.n).collect();
    let mut singular = 0;
    for i in 1..net.grid().strips() - 1 {
        for j in 0..net.grid().samples() {
            let all = surfaces
                .iter()
                .all(|s| classify_vertex(s, i, j, INF_THRESHOLD).unwrap().discrete_dir == DirClass::Fps);
            singular += all as usize;
        }
    }
    assert!(singular > 0);
    let violations = adjacency_check(&surfaces, AdjacencyKind::Cmc1Sweep, INF_THRESHOLD).unwrap();
    assert!(violations.is_empty(), "{violations:?}");
}

#[test]
fn cmc1_plane_matches_circle_test_for_small_lambda() {
    let net = crossing_net();
    for lambda in [1e-3, -1e-3] {
        let frame = integrate_frame(&net, lambda, Mat2C::identity(), &OdeSettings::default()).unwrap();
        let p = lift_surface(&frame, LWParams::new(-1.0).unwrap()).unwrap();
        for i in 0..net.grid().strips() - 1 {
            for j in (0..net.grid().samples()).step_by(5) {
                let status = singular_edge_lorentz(&p.n, i, j, PlaneVariant::CMC1Plane).unwrap();
                assert_eq!(status.singular, cmc1_edge_circle_test(&net, i, j).unwrap(), "λ={lambda} ({i},{j})");
            }
        }
    }
}

/// Three strips stacked along e2 with edge curvature 1 everywhere and
/// smooth curvatures `kappas`; `tangents[i]` is ∂x on strip `i`.
fn toy_surface(kappas: [f64; 3], tangents: [Vec4; 3]) -> SemiDiscreteSurface {
    let grid = GridSpec::new(0, 2, 0.0, 0.1, 0.1).unwrap();
    let e2 = Vec4::new(0.0, 1.0, 0.0, 0.0);
    let (mut x, mut n, mut dx, mut dn) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for i in 0..3 {
        for _ in 0..2 {
            let p = e2 * i as f64;
            x.push(p);
            n.push(p * -1.0);
            dx.push(tangents[i]);
            dn.push(tangents[i] * -kappas[i]);
        }
    }
    SemiDiscreteSurface::new_unpieced(
        grid,
        Ambient::R3,
        x,
        n,
        dx,
        dn,
        semidiscrete::surface::Provenance::MinMax { epsilon: Epsilon::Plus },
    )
}

#[test]
fn refinement_examples() {
    let v = |a: f64| Vec4::new(a, 0.3, 0.0, 0.0);
    // ℓ₋₁₀ = κ₀κ₁ < 0 < ℓ₁₀; ∂x, ∂x₁ on the same side, so ∂n, ∂n₁ are not.
    let s = toy_surface([1.0, -1.0, -2.0], [v(1.0), v(1.0), v(1.0)]);
    let vc = classify_vertex(&s, 1, 0, INF_THRESHOLD).unwrap();
    assert_eq!((vc.discrete_dir, vc.smooth_dir), (DirClass::None, DirClass::Fps));
    assert_eq!(refine_fp_vs_s(&s, 1, 0, INF_THRESHOLD), Refinement::Fp);
    // Opposite sides for x make the Gauss map embedded on that edge.
    let s = toy_surface([1.0, -1.0, -2.0], [v(1.0), v(-1.0), v(-1.0)]);
    assert_eq!(refine_fp_vs_s(&s, 1, 0, INF_THRESHOLD), Refinement::S);
    // Negative ℓ on the other edge.
    let s = toy_surface([1.0, 1.0, -2.0], [v(1.0), v(1.0), v(-1.0)]);
    assert_eq!(refine_fp_vs_s(&s, 1, 0, INF_THRESHOLD), Refinement::S);
    // Both ℓ negative.
    let s = toy_surface([1.0, -1.0, 2.0], [v(1.0), v(1.0), v(1.0)]);
    assert_eq!(refine_fp_vs_s(&s, 1, 0, INF_THRESHOLD), Refinement::NotApplicable);
}

#[test]
fn refinement_not_applicable_cases() {
    let net = crossing_net();
    let s = maximal(&net);
    // No smooth-direction FPS anywhere on a maximal surface.
    for i in 0..s.strips() {
        assert_eq!(refine_fp_vs_s(&s, i, 10, INF_THRESHOLD), Refinement::NotApplicable);
    }
}

#[test]
fn classification_stable_under_threshold_refinement() {
    let s = maximal(&crossing_net());
    for i in 0..s.strips() {
        for j in 0..s.samples() {
            let a = classify_vertex(&s, i, j, INF_THRESHOLD).unwrap();
            let b = classify_vertex(&s, i, j, INF_THRESHOLD / 10.0).unwrap();
            assert_eq!((a.discrete_dir, a.smooth_dir), (b.discrete_dir, b.smooth_dir));
        }
    }
}

fn circle_margin(circle: &PlanarCircle) -> f64 {
    match *circle {
        PlanarCircle::Circle { center, radius } => {
            let d = center.norm();
            (d - (radius - 1.0).abs()).abs().min((d - radius - 1.0).abs())
        }
        PlanarCircle::Line { .. } => (circle.distance(c(0.0, 0.0)) - 1.0).abs(),
    }
}

fn edge_sample() -> impl Strategy<Value = (Complex64, Complex64, Complex64, f64)> {
    let z = || (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b));
    (z(), z(), z(), 0.1..3.0f64)
}

/// Shared edge-local data of a minimal surface and its parallel surface.
fn minimal_edge(g: Complex64, g1: Complex64, dg: Complex64, tau: f64, sigma: f64) -> Option<(EdgeData, f64, f64)> {
    let delta = g1 - g;
    let dg1 = tau / sigma * delta * delta / dg;
    let eps = Epsilon::Plus;
    let (n, dn) = normal_and_derivative(g, dg, eps)?;
    let (n1, dn1) = normal_and_derivative(g1, dg1, eps)?;
    let dx = minmax_dx(g, dg, tau, eps);
    let dx1 = minmax_dx(g1, dg1, tau, eps);
    let delta_x = minmax_delta_x(g, g1, sigma, eps);
    let k = -dn.dot(&dx) / dx.dot(&dx);
    let k1 = -dn1.dot(&dx1) / dx1.dot(&dx1);
    Some((EdgeData { dx, dx1, delta_x, dn, dn1, delta_n: n1 - n }, k, k1))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn brlw_condition_matches_kappa_sign((g, gm, g1, _) in edge_sample(), s in -2.0..2.0f64, lambda in -1.0..1.0f64,
                               sigmas in (0.05..2.0f64, 0.05..2.0f64), dgs in (0.1..2.0f64, 0.1..2.0f64)) {
        let alpha = |z: Complex64| 1.0 + s * z.norm_sqr();
        // Discrete direction: edges (gm, g) and (g, g1).
        let e_prev = ((g - gm).norm_sqr(), alpha(gm) * alpha(g), lambda * sigmas.0);
        let e_next = ((g1 - g).norm_sqr(), alpha(g) * alpha(g1), lambda * sigmas.1);
        let kp = lw_kappa(e_prev.0, e_prev.1, e_prev.2, s);
        let kn = lw_kappa(e_next.0, e_next.1, e_next.2, s);
        prop_assume!(!kp.is_infinite() && !kn.is_infinite() && kp.signum() != 0.0 && kn.signum() != 0.0);
        let oracle = kp.signum() * kn.signum() < 0.0;
        let cond = brlw_fps_values(
            brlw_sign_pair(e_prev.0, e_prev.1 * e_prev.2, s),
            brlw_sign_pair(e_next.0, e_next.1 * e_next.2, s),
        );
        prop_assert_eq!(cond, oracle);
        // Smooth direction: vertices g and g1 with |∂g|², α² and λτ.
        let lt = -lambda * sigmas.0;
        let k0 = lw_kappa(dgs.0, alpha(g) * alpha(g), lt, s);
        let k1 = lw_kappa(dgs.1, alpha(g1) * alpha(g1), lt, s);
        prop_assume!(!k0.is_infinite() && !k1.is_infinite() && k0.signum() != 0.0 && k1.signum() != 0.0);
        let cond = brlw_fps_values(
            brlw_sign_pair(dgs.0, alpha(g) * alpha(g) * lt, s),
            brlw_sign_pair(dgs.1, alpha(g1) * alpha(g1) * lt, s),
        );
        prop_assert_eq!(cond, k0.signum() * k1.signum() < 0.0);
    }

    #[test]
    fn condition_c_matches_transversality((g, g1, dg, ratio) in edge_sample()) {
        let delta = g1 - g;
        prop_assume!(delta.norm() > 1e-3 && dg.norm() > 1e-3);
        prop_assume!((g.norm() - 1.0).abs() > 1e-6 && (g1.norm() - 1.0).abs() > 1e-6);
        let dg1 = -ratio * delta * delta / dg;
        let circle = tangent_circle(g, dg, g1, dg1).unwrap();
        prop_assume!(circle_margin(&circle) > 1e-8);
        prop_assert_eq!(cmc1_circle_test_data(g, dg, g1, dg1).unwrap(), condition_c(g, dg, g1));
    }

    #[test]
    fn gauss_map_embeddedness_vs_cross_ratio((g, g1, dg, ratio) in edge_sample(), sigma in 0.1..2.0f64, u in 0.05..0.95f64) {
        let tau = -ratio * sigma;
        let delta = g1 - g;
        prop_assume!(delta.norm() > 1e-2 && dg.norm() > 1e-2);
        let (base, k, k1) = minimal_edge(g, g1, dg, tau, sigma).unwrap();
        prop_assume!((1.0 / k - 1.0 / k1).abs() > 1e-3);
        // θ strictly between 1/κ and 1/κ₁ makes κ_θκ₁_θ < 0.
        let theta = 1.0 / k + u * (1.0 / k1 - 1.0 / k);
        let e = EdgeData {
            dx: base.dx + base.dn * theta,
            dx1: base.dx1 + base.dn1 * theta,
            delta_x: base.delta_x + base.delta_n * theta,
            ..base
        };
        let cr = edge_cross_ratio(&e, Ambient::R3).unwrap();
        prop_assume!(cr.re.abs() > 1e-9 * cr.norm().max(1e-300));
        let Ok(embedded) = edge_data_gauss_embedded(&e) else { return Ok(()) };
        prop_assert_eq!(embedded, cr.re > 0.0);
    }
}
