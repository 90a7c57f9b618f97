use num_complex::Complex64;
use semidiscrete::holo::{
    make_affine_net, make_linear_net, propagate_net, propagate_strip, validate_net, GridSpec, NetKind, PolyStrip,
    TauProfile,
};
use semidiscrete::OdeSettings;

#[test]
fn linear_net_is_isothermic_to_rounding() {
    let grid = GridSpec::new(-10, 10, -1.0, 1.0, 0.005).unwrap();
    let net = make_linear_net(1.0, 1.0, grid).unwrap();
    let report = validate_net(&net, 1e-12);
    assert!(report.pass);
    assert!(report.max_residual < 1e-12);
    assert_eq!(report.failure_count, 0);
}

#[test]
fn propagated_strip_matches_closed_form() {
    // g(1, t) = 0.3 + 0.5 + i·2t for the affine net with a = 0.5, b = 2.
    let grid = GridSpec::new(0, 1, -0.5, 0.5, 0.01).unwrap();
    let net = make_affine_net(Complex64::new(0.3, 0.0), 0.5, 2.0, grid).unwrap();
    let solver = OdeSettings::new(1e-3, 1e-8).unwrap();
    let strip = propagate_strip(
        &net.strip(0),
        &TauProfile::Constant(-4.0),
        0.25,
        net.g(1, 0),
        &grid,
        &solver,
    )
    .unwrap();
    for j in 0..grid.samples() {
        assert!((strip.g[j] - net.g(1, j)).norm() < 1e-9);
        assert!((strip.dg[j] - net.dg(1, j)).norm() < 1e-9);
    }
}

#[test]
fn propagated_net_evaluates_between_samples() {
    let grid = GridSpec::new(0, 2, 0.0, 0.4, 0.01).unwrap();
    let base = PolyStrip(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.1, 0.0)]);
    let seeds = [Complex64::new(0.4, 0.0), Complex64::new(0.8, 0.0)];
    let net = propagate_net(base, TauProfile::Constant(-1.0), vec![0.16, 0.16], &seeds, grid, &OdeSettings::default())
        .unwrap();
    assert!(matches!(net.kind(), NetKind::Propagated { .. }));
    assert!(validate_net(&net, 1e-8).pass);
    // Interpolated values sit between the samples they come from.
    let (g, _) = net.eval(2, 0.105);
    assert!((g - 0.5 * (net.g(2, 10) + net.g(2, 11))).norm() < 1e-3);
    let scaled = net.scaled(2.0);
    assert!((scaled.g(1, 7) - net.g(1, 7) * 2.0).norm() < 1e-15);
    assert!(validate_net(&scaled, 1e-8).pass);
}
