mod common;

use common::{c, points};
use proptest::prelude::*;
use ptds::spectra::{lax_residual, make_eigenfunction, make_superposed, phase};
use ptds::{EigenMatrix, GlobalParams, Normalization, SpectralParams, C};

fn globals() -> impl Strategy<Value = GlobalParams<f64>> {
    (prop::bool::ANY, prop::bool::ANY).prop_map(|(e, a)| {
        GlobalParams::new(if e { 1.0 } else { -1.0 }, if a { 1.0 } else { -1.0 }, 1.0).unwrap()
    })
}

fn spectral() -> impl Strategy<Value = SpectralParams<f64>> {
    (
        0.4f64..2.5,
        prop::bool::ANY,
        -7.0f64..7.0,
        -3.0f64..3.0,
        -3.0f64..3.0,
        prop::bool::ANY,
    )
        .prop_map(|(r, neg, phi, e, f, half)| {
            let sp = SpectralParams::new(if neg { -r } else { r }, phi).with_f(e, f);
            if half {
                sp
            } else {
                sp.with_norm(Normalization::Constant(C::new(0.8, -0.3)))
            }
        })
}

fn lax_points() -> Vec<(f64, f64, f64)> {
    points(50, 1.0, 7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn plain_eigenfunctions_solve_the_lax_pair(sp in spectral(), gp in globals()) {
        let (xi, eta) = make_eigenfunction(&sp, &gp).unwrap();
        let r = lax_residual(&xi, &eta, &gp, &lax_points());
        prop_assert!(r <= 1e-10, "residual {r}");
    }

    #[test]
    fn superposed_eigenfunctions_solve_the_lax_pair(sp in spectral(), gp in globals()) {
        let (xi, eta) = make_superposed(&sp, &gp).unwrap();
        let r = lax_residual(&xi, &eta, &gp, &lax_points());
        prop_assert!(r <= 1e-10, "residual {r}");
    }

    #[test]
    fn perturbed_phase_breaks_the_lax_pair(sp in spectral(), gp in globals()) {
        let (xi, eta) = make_eigenfunction(&sp, &gp).unwrap();
        let d = [c(0.1, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let r = lax_residual(&xi.shift_phase(d), &eta.shift_phase(d), &gp, &lax_points());
        prop_assert!(r > 1e-3, "residual {r}");
    }

    #[test]
    fn eigen_matrix_symmetry(sp in spectral(), gp in globals(), sup in prop::bool::ANY) {
        let (xi, eta) = if sup { make_superposed(&sp, &gp) } else { make_eigenfunction(&sp, &gp) }.unwrap();
        let th = EigenMatrix::new(&xi, &eta, &gp);
        for (x, y, t) in points(20, 1.0, 11) {
            let d = th.symmetry_defect(x, y, t, gp.epsilon);
            prop_assert!(d <= 1e-12, "defect {d}");
        }
    }

    #[test]
    fn gamma_is_i_over_alpha_times_alpha_beta(sp in spectral(), gp in globals()) {
        let [a, b, g] = phase(&sp, &gp);
        let want = C::<f64>::i() / gp.alpha() * a * b;
        prop_assert!((g - want).norm() <= 1e-15 * want.norm().max(1.0));
    }
}

#[test]
fn printed_q_constant_fails_the_lax_pair() {
    // The printed Q_k constant F + λρ⁻¹(iρ_k + ρ_{k,φ}) instead of the exact
    // φ-derivative; used only as a negative control.
    let gp = GlobalParams::ds1(1.0).unwrap();
    let sp = SpectralParams::new(2.0, 0.3).with_f(0.5, 1.0);
    let (xi_s, eta_s) = make_superposed(&sp, &gp).unwrap();
    let (_, eta) = make_eigenfunction(&sp, &gp).unwrap();
    let rho_k = (-C::<f64>::i() * sp.phi * 0.5).exp();
    let printed = sp.f_cal + sp.lambda() * (C::<f64>::i() * rho_k + rho_k * (-C::<f64>::i() * 0.5));
    let exact = sp.f_cal + C::new(0.0, 0.5);
    let eta_printed = &eta_s + &eta.scale(printed - exact);
    let pts = lax_points();
    assert!(lax_residual(&xi_s, &eta_s, &gp, &pts) <= 1e-10);
    assert!(lax_residual(&xi_s, &eta_printed, &gp, &pts) > 1e-3);
}

#[test]
fn superposed_q_is_p_plus_i() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let sp = SpectralParams::new(1.0, 0.0);
    let (xi_s, eta_s) = make_superposed(&sp, &gp).unwrap();
    let (xi, eta) = make_eigenfunction(&sp, &gp).unwrap();
    for (x, y, t) in points(10, 1.0, 3) {
        let p = xi_s.eval(x, y, t) / xi.eval(x, y, t);
        let q = eta_s.eval(x, y, t) / eta.eval(x, y, t);
        assert!((q - p - C::<f64>::i()).norm() < 1e-12);
    }
}
