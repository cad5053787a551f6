use css_blowup::specfun::{
    bessel_j2, connection, cpow, eval_e1, eval_e1_with_derivative, eval_f1, eval_f2, gamma_complex, recip_gamma, rpow,
    series_coeffs, SelfSimilarOde, SelfSimilarProfile, SeriesKind, MAX_SERIES_ORDER,
};
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const NUS: [(f64, f64); 4] = [(2.0, 0.0), (1.0, 0.5), (3.0, -1.0), (0.5, 2.0)];

#[test]
fn gamma_recurrence_and_reflection() {
    for z in [c(0.3, 0.0), c(1.7, 2.2), c(-2.4, 0.9), c(5.5, -3.0), c(0.5, 10.0)] {
        let lhs = gamma_complex(z + 1.0).unwrap();
        let rhs = z * gamma_complex(z).unwrap();
        assert!((lhs - rhs).norm() <= 1e-11 * lhs.norm(), "{z}");
        let refl = gamma_complex(z).unwrap() * gamma_complex(1.0 - z).unwrap() * (PI * z).sin();
        assert!((refl - PI).norm() <= 1e-11 * PI, "{z}");
        assert!((recip_gamma(z) * gamma_complex(z).unwrap() - 1.0).norm() <= 1e-12);
    }
    assert!((gamma_complex(c(0.5, 0.0)).unwrap().re - PI.sqrt()).abs() <= 1e-13);
    assert!(gamma_complex(c(-3.0, 0.0)).is_err());
    assert_eq!(recip_gamma(c(0.0, 0.0)), c(0.0, 0.0));
}

#[test]
fn principal_powers_use_one_branch() {
    let w = c(0.7, -0.3);
    for z in [c(1.0, 1.0), c(-1.0, 1e-12), c(-1.0, -1e-12), c(0.0, -2.0)] {
        let expected = (w * Complex64::new(z.norm().ln(), z.arg())).exp();
        assert!((cpow(z, w) - expected).norm() <= 1e-14 * expected.norm());
    }
    // Just above and below the cut the arguments are ±π.
    let above = cpow(c(-1.0, 1e-15), c(0.5, 0.0));
    let below = cpow(c(-1.0, -1e-15), c(0.5, 0.0));
    assert!((above - c(0.0, 1.0)).norm() <= 1e-12 && (below - c(0.0, -1.0)).norm() <= 1e-12);
    assert_eq!(cpow(c(0.0, 0.0), c(1.0, 0.0)), c(0.0, 0.0));
    assert!((rpow(4.0, c(0.5, 0.0)) - c(2.0, 0.0)).norm() <= 1e-15);
}

#[test]
fn asymptotic_residual_shrinks_with_order() {
    // At ν = 2, 𝔪 = −2 the f₁ series terminates after its leading term and is exact.
    let exact = series_coeffs(SeriesKind::F1, c(2.0, 0.0), -2, MAX_SERIES_ORDER).unwrap();
    assert!(exact.residual(16.0).norm() <= 1e-12);
    for (re, im) in NUS.iter().skip(1).copied() {
        let nu = c(re, im);
        for kind in [SeriesKind::F1, SeriesKind::F2] {
            let y = 16.0;
            let residuals: Vec<f64> = [2, 4, 8, MAX_SERIES_ORDER]
                .iter()
                .map(|&k| series_coeffs(kind, nu, -2, k).unwrap().residual(y).norm())
                .collect();
            for pair in residuals.windows(2) {
                assert!(pair[1] < pair[0], "{kind:?} ν={nu}: {residuals:?}");
            }
        }
    }
    assert!(series_coeffs(SeriesKind::F1, c(2.0, 0.0), -2, 0).is_err());
    assert!(series_coeffs(SeriesKind::F1, c(2.0, 0.0), -2, MAX_SERIES_ORDER + 1).is_err());
    assert!(SelfSimilarOde::new(c(2.0, 0.0), 0).is_err());
    assert!(eval_f1(c(2.0, 0.0), -2, 3.0).is_err());
}

#[test]
fn regular_branch_solves_the_self_similar_equation() {
    for (re, im) in NUS {
        let nu = c(re, im);
        let ode = SelfSimilarOde::new(nu, -2).unwrap();
        for y in [0.2, 1.0, 3.0, 6.0] {
            let (v, dv) = eval_e1_with_derivative(nu, -2, y).unwrap();
            let h = 1e-5 * y;
            let fd = (eval_e1(nu, -2, y + h).unwrap() - eval_e1(nu, -2, y - h).unwrap()) / (2.0 * h);
            assert!((fd - dv).norm() <= 1e-7 * dv.norm().max(1.0), "ν={nu} y={y}");
            let (_, dp) = eval_e1_with_derivative(nu, -2, y + h).unwrap();
            let (_, dm) = eval_e1_with_derivative(nu, -2, y - h).unwrap();
            let d2v = (dp - dm) / (2.0 * h);
            let scale = v.norm().max(dv.norm()).max(1.0);
            let res = ode.apply(y, v, dv, d2v).norm();
            assert!(res <= 1e-6 * scale, "ν={nu} y={y}: {res:e} vs {scale:e}");
            assert!((ode.second_derivative(y, v, dv) - d2v).norm() <= 1e-6 * scale);
        }
        // e₁ ~ Y² near the origin.
        let small = eval_e1(nu, -2, 1e-3).unwrap();
        assert!((small / 1e-6 - 1.0).norm() <= 1e-5);
    }
}

#[test]
fn connection_matches_the_closed_forms() {
    for (re, im) in NUS {
        let nu = c(re, im);
        let conn = connection(nu, -2).unwrap();
        assert!(conn.window_residual <= 1e-8, "ν={nu}: {:e}", conn.window_residual);
        assert!((conn.kappa - conn.kappa_closed).norm() <= 1e-6 * conn.kappa_closed.norm(), "ν={nu}");
        let alpha_tol = 1e-4 * conn.alpha_closed.norm().max(1e-3);
        assert!((conn.alpha - conn.alpha_closed).norm() <= alpha_tol, "ν={nu}: {} vs {}", conn.alpha, conn.alpha_closed);
    }
    // At ν = 2 the Gamma ratio is Γ(3)/Γ(3) = 1.
    let conn = connection(c(2.0, 0.0), -2).unwrap();
    assert!((conn.p - 1.0).norm() <= 1e-12);
}

#[test]
fn profile_is_continuous_across_its_pieces() {
    let profile = SelfSimilarProfile::new(c(1.0, 0.5), -2).unwrap();
    for y in [6.0, 24.0] {
        let below = profile.eval(y - 1e-9).unwrap();
        let above = profile.eval(y + 1e-9).unwrap();
        for k in 0..2 {
            assert!((below[k] - above[k]).norm() <= 1e-6 * below[k].norm().max(1.0), "y={y} k={k}");
        }
    }
    let far = profile.eval(40.0).unwrap()[0];
    let asymptotic = eval_f1(c(1.0, 0.5), -2, 40.0).unwrap() + profile.connection.alpha * eval_f2(c(1.0, 0.5), -2, 40.0).unwrap();
    assert!((far - asymptotic).norm() <= 1e-12 * far.norm());
    let origin = profile.eval(0.0).unwrap();
    assert_eq!(origin[0], c(0.0, 0.0));
    assert_eq!(origin[2], 2.0 * profile.connection.kappa);
}

#[test]
fn bessel_j2_reference_values() {
    for (x, v) in [(1.0, 0.114_903_484_931_900_5), (5.0, 0.046_565_116_277_752_2), (30.0, 0.078_451_246_073_265_4), (100.0, -0.021_528_757_344_505_4)] {
        assert!((bessel_j2(x) - v).abs() <= 1e-10, "x={x}: {}", bessel_j2(x));
    }
    assert_eq!(bessel_j2(0.0), 0.0);
    assert_eq!(bessel_j2(-3.0), bessel_j2(3.0));
}
