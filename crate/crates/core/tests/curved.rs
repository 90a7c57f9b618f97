use num_complex::Complex64;
use semidiscrete::curvature::{fit_principal_edge, fit_principal_smooth, gauss_mean_closed_at, gauss_mean_mixed, weingarten_residual, WeingartenRelation};
use semidiscrete::curved::{
    compatibility_residual, frame_residuals, integrate_frame, lift_surface, parallel_curved, principal_curved_closed,
    reparametrized_frame_seed, reparametrized_weierstrass_data, LWParams, LiftedPair,
};
use semidiscrete::holo::{make_affine_net, GridSpec, HoloNet};
use semidiscrete::{Mat2C, OdeSettings};

const S_VALUES: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
const LAMBDAS: [f64; 4] = [0.1, -0.1, 0.01, -0.01];

fn net() -> HoloNet {
    let grid = GridSpec::new(-2, 2, -0.5, 0.5, 0.01).unwrap();
    make_affine_net(Complex64::new(0.05, 0.02), 0.2, 1.0, grid).unwrap()
}

fn pair(net: &HoloNet, s: f64, lambda: f64) -> LiftedPair {
    let frame = integrate_frame(net, lambda, Mat2C::identity(), &OdeSettings::default()).unwrap();
    lift_surface(&frame, LWParams::new(s).unwrap()).unwrap()
}

#[test]
fn frame_equations_hold() {
    let n = net();
    for lambda in LAMBDAS {
        let frame = integrate_frame(&n, lambda, Mat2C::identity(), &OdeSettings::default()).unwrap();
        let r = frame_residuals(&frame, &OdeSettings::default()).unwrap();
        assert!(r.delta < 1e-12, "{r:?}");
        assert!(r.t_direction < 1e-10, "{r:?}");
        assert!(r.mixed < 1e-8, "{r:?}");
    }
}

#[test]
fn compatibility_and_constraints() {
    let n = net();
    for s in S_VALUES {
        for lambda in LAMBDAS {
            let frame = integrate_frame(&n, lambda, Mat2C::identity(), &OdeSettings::default()).unwrap();
            let (cx, cn) = compatibility_residual(&frame, LWParams { s }).unwrap();
            assert!(cx < 1e-6 && cn < 1e-6, "s={s} λ={lambda}: {cx:e} {cn:e}");
            let p = lift_surface(&frame, LWParams { s }).unwrap();
            assert!(p.x.norm_residual(&p.x.x, -1.0) < 1e-8);
            assert!(p.n.norm_residual(&p.n.x, 1.0) < 1e-8);
            assert!(p.x.orthogonality_residual() < 1e-8);
        }
    }
}

#[test]
fn finite_difference_oracle_agrees() {
    // Five-point differences carry an O(h⁴) truncation error, so compare
    // relative to the size of ∂x on a finer grid.
    let grid = GridSpec::new(-2, 2, -0.5, 0.5, 0.005).unwrap();
    let n = make_affine_net(Complex64::new(0.05, 0.02), 0.2, 1.0, grid).unwrap();
    for s in S_VALUES {
        let p = pair(&n, s, 0.1);
        for surf in [&p.x, &p.n] {
            let scale = surf.dx.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let fd = surf.compatibility_residual_fd();
            assert!(fd < 1e-6 * scale, "s={s}: {fd:e} vs {scale:e}");
        }
    }
}

#[test]
fn weingarten_relations_hold() {
    let n = net();
    for s in S_VALUES {
        for lambda in LAMBDAS {
            let p = pair(&n, s, lambda);
            let rx = weingarten_residual(&p.x, WeingartenRelation::BrLW(s));
            let rn = weingarten_residual(&p.n, WeingartenRelation::BiLW(s));
            assert!(rx.evaluated >= 100 && rn.evaluated >= 100);
            assert!(rx.max_residual < 1e-6, "x s={s} λ={lambda}: {:e} skipped {}", rx.max_residual, rx.skipped);
            assert!(rn.max_residual < 1e-6, "n s={s} λ={lambda}: {:e} skipped {}", rn.max_residual, rn.skipped);
        }
    }
}

#[test]
fn closed_principal_curvatures_match_fit() {
    let n = net();
    for s in S_VALUES {
        for lambda in LAMBDAS {
            let p = pair(&n, s, lambda);
            let grid = *n.grid();
            for i in 0..grid.strips() {
                for j in (0..grid.samples()).step_by(5) {
                    let closed = principal_curved_closed(&n, LWParams { s }, lambda, i, j);
                    let fit = fit_principal_smooth(&p.x, i, j).unwrap().value.value().unwrap();
                    let k = closed.kappa.value().unwrap();
                    assert!((fit - k).abs() <= 1e-6 * k.abs().max(1e-300), "s={s} λ={lambda} {fit} {k}");
                    if let Some(k01) = closed.kappa01 {
                        let fit01 = fit_principal_edge(&p.x, i, j).unwrap().value.value().unwrap();
                        let k01 = k01.value().unwrap();
                        assert!((fit01 - k01).abs() <= 1e-6 * k01.abs(), "s={s} λ={lambda} {fit01} {k01}");
                    }
                }
            }
        }
    }
}

#[test]
fn mixed_and_closed_curvatures_agree() {
    let n = net();
    for s in [-0.5, 0.5] {
        let p = pair(&n, s, 0.1);
        for surf in [&p.x, &p.n] {
            let mut count = 0;
            for i in 0..surf.strips() - 1 {
                for j in 0..surf.samples() {
                    let m = gauss_mean_mixed(surf, i, j).unwrap();
                    let c = gauss_mean_closed_at(surf, i, j).unwrap();
                    let dk = (m.k.value().unwrap() - c.k.value().unwrap()).abs();
                    let dh = (m.h.value().unwrap() - c.h.value().unwrap()).abs();
                    assert!(dk < 1e-8 && dh < 1e-8, "{dk:e} {dh:e}");
                    count += 1;
                }
            }
            assert!(count >= 100);
        }
    }
}

#[test]
fn parallel_family_relations() {
    let n = net();
    for s in [-1.0, 0.5, 1.0] {
        for theta in [0.1, 0.3, -0.2] {
            let p = parallel_curved(&pair(&n, s, 0.1), theta);
            let st = (-2.0 * theta).exp() * s;
            assert!((p.params.s - st).abs() < 1e-15);
            let rx = weingarten_residual(&p.x, WeingartenRelation::ParallelCurved(st));
            let rn = weingarten_residual(&p.n, WeingartenRelation::BiLW(st));
            assert!(rx.max_residual < 1e-6, "{:e}", rx.max_residual);
            assert!(rn.max_residual < 1e-6, "{:e}", rn.max_residual);
            assert!(p.x.norm_residual(&p.x.x, -1.0) < 1e-8);
        }
    }
}

#[test]
fn reparametrized_data_reproduces_parallel_surface() {
    let n = net();
    for s in [-1.0, 0.5] {
        for theta in [0.3, -0.4] {
            let direct = parallel_curved(&pair(&n, s, 0.1), theta);
            let (net2, p2) = reparametrized_weierstrass_data(&n, LWParams { s }, theta);
            let seed = reparametrized_frame_seed(Mat2C::identity(), theta);
            let frame = integrate_frame(&net2, 0.1, seed, &OdeSettings::default()).unwrap();
            let via = lift_surface(&frame, p2).unwrap();
            let worst = direct.x.x.iter().zip(&via.x.x).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
            assert!(worst < 1e-6, "s={s} θ={theta}: {worst:e}");
        }
    }
}

#[test]
fn parallel_curvature_transform_matches_mixed_area() {
    use semidiscrete::curved::parallel_gauss_mean;
    let n = net();
    let base = pair(&n, 0.5, 0.1);
    for theta in [0.2, -0.3] {
        let par = parallel_curved(&base, theta);
        for i in 0..base.x.strips() - 1 {
            for j in (0..base.x.samples()).step_by(10) {
                let m0 = gauss_mean_mixed(&base.x, i, j).unwrap();
                let m = gauss_mean_mixed(&par.x, i, j).unwrap();
                let (k, h) = parallel_gauss_mean(m0.k.value().unwrap(), m0.h.value().unwrap(), theta);
                assert!((k.value().unwrap() - m.k.value().unwrap()).abs() < 1e-8);
                assert!((h.value().unwrap() - m.h.value().unwrap()).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn cross_ratios_match_closed_forms() {
    use semidiscrete::curvature::edge_cross_ratio;
    use semidiscrete::curved::{cross_ratio_n_closed, cross_ratio_x_closed};
    use semidiscrete::Ambient;
    let n = net();
    for s in [-1.0, -0.5, 0.5] {
        for lambda in [0.1, -0.01] {
            let p = pair(&n, s, lambda);
            for i in 0..n.grid().strips() - 1 {
                for j in (0..n.grid().samples()).step_by(10) {
                    let cx = edge_cross_ratio(&p.x.edge(i, j), Ambient::H3).unwrap();
                    let want = cross_ratio_x_closed(&n, LWParams { s }, lambda, i, j);
                    assert!(cx.im.abs() < 1e-8 * cx.norm());
                    assert!((cx.re - want).abs() <= 1e-6 * want.abs(), "x s={s} λ={lambda}: {cx} {want}");
                    let cn = edge_cross_ratio(&p.n.edge(i, j), Ambient::S21).unwrap();
                    let want = cross_ratio_n_closed(&n, LWParams { s }, lambda, i, j).unwrap();
                    assert!(cn.im.abs() < 1e-8 * cn.norm());
                    assert!((cn.re - want).abs() <= 1e-6 * want.abs(), "n s={s} λ={lambda}: {cn} {want}");
                }
            }
        }
    }
}
