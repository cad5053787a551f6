use css_blowup::field::ComplexField;
use css_blowup::gauge::mass;
use css_blowup::grid::RadialGrid;
use css_blowup::radiation::{double_transform, pseudoconformal, Radiation, RadiationSpec, FRAK_M};
use num_complex::Complex64;
use std::sync::Arc;

fn grid() -> Arc<RadialGrid> {
    Arc::new(RadialGrid::log(2048, 1e-4, 10.0).unwrap())
}

fn spec(q: (f64, f64), nu: (f64, f64)) -> RadiationSpec {
    RadiationSpec::new(Complex64::new(q.0, q.1), Complex64::new(nu.0, nu.1)).unwrap()
}

fn rel(a: &ComplexField, b: &ComplexField) -> f64 {
    a.sub(b).l2() / b.l2()
}

#[test]
fn corrections_vanish_inside_the_self_similar_zone() {
    let rad = Radiation::new(spec((1.0, 0.0), (2.5, 0.0)), grid()).unwrap();
    assert_eq!(rad.spec().order, 1);
    for t in [-1e-2, -1e-3, 1e-3] {
        let z = rad.z(t).unwrap();
        let lin = rad.z_lin_hat(t).unwrap();
        let zone = t.abs().sqrt();
        for (j, &r) in rad.grid().radii().iter().enumerate() {
            if r <= zone {
                assert_eq!(z.values()[j], lin.values()[j], "t={t} r={r}");
            }
        }
        assert!(z.sub(&lin).l2() > 0.0);
    }
    assert!(rad.z(0.0).is_err());
}

#[test]
fn backward_branch_is_the_conjugate_construction() {
    let g = grid();
    let forward = Radiation::new(spec((0.5, 0.8), (1.0, 0.5)), g.clone()).unwrap();
    let mirrored = Radiation::new(spec((0.5, -0.8), (1.0, -0.5)), g).unwrap();
    let t = 3e-3;
    let back = forward.z(-t).unwrap();
    let expected = mirrored.z(t).unwrap().map(|_, v| v.conj());
    assert!(rel(&back, &expected) <= 1e-14);
    assert_eq!(back.m(), FRAK_M);
}

#[test]
fn linear_part_is_linear_in_the_amplitude() {
    let g = grid();
    let one = Radiation::new(spec((1.0, 0.0), (2.0, 0.0)), g.clone()).unwrap();
    let two = Radiation::new(spec((0.0, 2.0), (2.0, 0.0)), g).unwrap();
    let t = -5e-3;
    let scaled = one.z_lin_hat(t).unwrap().scale(Complex64::new(0.0, 2.0));
    assert!(rel(&two.z_lin_hat(t).unwrap(), &scaled) <= 1e-13);
}

#[test]
fn closed_form_time_derivative_matches_differences() {
    for nu in [(2.0, 0.0), (1.0, 0.5)] {
        let rad = Radiation::new(spec((1.0, 0.0), nu), grid()).unwrap();
        for t in [-1e-2, -1e-3] {
            let exact = rad.dt_z(t).unwrap();
            let fd = rad.dt_z_fd(t, 1e-4 * t.abs()).unwrap();
            assert!(rel(&fd, &exact) <= 1e-6, "ν={nu:?} t={t}: {:e}", rel(&fd, &exact));
        }
    }
}

#[test]
fn residual_routes_agree_up_to_the_spatial_discretization() {
    // `psi` differentiates the self-similar part in closed form, `psi_fd` applies the
    // discrete Laplacian to z, so the two differ by the spatial truncation error.
    let gap = |n: usize| {
        let g = Arc::new(RadialGrid::log(n, 1e-4, 10.0).unwrap());
        let rad = Radiation::new(spec((1.0, 0.0), (2.0, 0.0)), g).unwrap();
        let t = -1e-2;
        let psi = rad.psi(t).unwrap();
        psi.sub(&rad.psi_fd(t, 1e-3 * t.abs()).unwrap()).l2() / rad.dt_z(t).unwrap().l2()
    };
    let (coarse, fine) = (gap(1024), gap(2048));
    assert!(fine <= 2e-5 && fine <= coarse / 3.0, "{coarse:e} -> {fine:e}");
}

#[test]
fn residual_shrinks_towards_the_blowup_time() {
    let rad = Radiation::new(spec((1.0, 0.0), (2.0, 0.0)), grid()).unwrap();
    let reports: Vec<_> = [-1e-2, -1e-3, -1e-4].iter().map(|&t| rad.residual_report(t, 0.01).unwrap()).collect();
    for pair in reports.windows(2) {
        assert!(pair[1].psi_z_l2 < pair[0].psi_z_l2, "{reports:?}");
        assert!(pair[1].psi_z_weighted[0] < pair[0].psi_z_weighted[0]);
    }
    for r in &reports {
        assert!(r.psi_z_weighted[1] >= r.psi_z_weighted[0] * 0.9);
        assert!(r.psi_z_l2.is_finite());
    }
}

#[test]
fn phase_correction_is_small_and_odd_in_direction() {
    let rad = Radiation::new(spec((1.0, 0.0), (2.0, 0.0)), grid()).unwrap();
    let values: Vec<f64> = [-1e-4, -1e-3, -1e-2].iter().map(|&t| rad.gamma_z(t).unwrap()).collect();
    for pair in values.windows(2) {
        assert!(pair[1].abs() >= pair[0].abs(), "{values:?}");
    }
    assert!(values.iter().all(|v| v.is_finite()));
    assert!(values[0].abs() <= 1e-2);
    let field = rad.field(-1e-3).unwrap();
    assert_eq!(field.gamma_z, values[1]);
    assert_eq!(field.z1.m(), FRAK_M);
}

#[test]
fn transform_applied_twice_negates_the_initial_profile() {
    let s = spec((1.0, 0.0), (2.0, 0.0));
    let radii = [0.1, 0.5, 1.0, 1.5];
    let back = double_transform(&s, 400.0, &radii);
    for (r, v) in radii.iter().zip(&back) {
        let expected = -s.initial_profile(*r);
        assert!((v - expected).norm() <= 1e-3 * expected.norm(), "r={r}: {v} vs {expected}");
    }
}

#[test]
fn pseudoconformal_map_is_an_isometric_involution() {
    let g = Arc::new(RadialGrid::log(4096, 1e-5, 400.0).unwrap());
    let u = ComplexField::from_fn(g, 0, |r| Complex64::new(1.0, 0.3 * r) * (-r * r).exp());
    let t = -0.5;
    let (once, tp) = pseudoconformal(&u, t).unwrap();
    assert_eq!(tp, 2.0);
    assert!((mass(&once) - mass(&u)).abs() <= 1e-8 * mass(&u));
    let (twice, tpp) = pseudoconformal(&once, tp).unwrap();
    assert_eq!(tpp, t);
    assert!(rel(&twice, &u) <= 1e-6, "{:e}", rel(&twice, &u));
    assert!(pseudoconformal(&u, 0.0).is_err());
}
