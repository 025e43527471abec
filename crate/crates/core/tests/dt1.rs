mod common;

use std::f64::consts::PI;

use common::{c, points, rel};
use ptds::dt1::{ds1_from_params, ds1_highorder, ds1_solution, onefold_potential, EigenSpec};
use ptds::spectra::{make_eigenfunction, make_superposed};
use ptds::{EigenMatrix, Error, ExpPoly, Flag, GlobalParams, Solution, SpectralParams};

fn superposed(r: f64, phi: f64, e: f64, f: f64) -> EigenSpec<f64> {
    EigenSpec::superposed(SpectralParams::new(r, phi).with_f(e, f))
}

#[test]
fn onefold_matches_the_one_fold_determinant() {
    for eps in [1.0, -1.0] {
        let gp = GlobalParams::ds1(eps).unwrap();
        let sp = SpectralParams::new(1.6, 0.7).with_f(0.3, -0.4);
        for (xi, eta) in [make_eigenfunction(&sp, &gp).unwrap(), make_superposed(&sp, &gp).unwrap()] {
            let th = EigenMatrix::new(&xi, &eta, &gp);
            let sol = ds1_solution(std::slice::from_ref(&th), &gp).unwrap();
            for (x, y, t) in points(30, 2.0, 5) {
                let s = sol.sample(x, y, t);
                if s.flag != Flag::Regular {
                    continue;
                }
                let (u, w) = onefold_potential(&th, &gp, x, y, t).unwrap();
                assert!(rel(u, s.u) <= 1e-10, "u {u} vs {}", s.u);
                assert!(rel(w, s.w.unwrap()) <= 1e-10, "w {w} vs {:?}", s.w);
            }
        }
    }
}

#[test]
fn constant_theta_is_the_identity_transformation() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let k = |a, b| ExpPoly::constant(c(a, b));
    let th = EigenMatrix { entries: [[k(2.0, 1.0), k(0.5, 0.0)], [k(-1.0, 0.3), k(1.0, -1.0)]] };
    let (u, w) = onefold_potential(&th, &gp, 0.4, -1.1, 2.0).unwrap();
    assert!((u - gp.u0()).norm() < 1e-15);
    assert!((w - gp.w0()).norm() < 1e-15);
}

#[test]
fn onefold_reports_singular_points() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let one = ExpPoly::constant(c(1.0, 0.0));
    let th = EigenMatrix { entries: [[one.clone(), one.clone()], [one.clone(), one]] };
    assert!(matches!(onefold_potential(&th, &gp, 0.0, 0.0, 0.0), Err(Error::SingularPoint(_))));
}

#[test]
fn trace_form_and_log_det_form_of_w_agree() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let sols = [
        ds1_from_params(&[superposed(2.0, 2.0 * PI, 0.0, 1.0)], &gp).unwrap(),
        ds1_from_params(&[superposed(1.0, PI, 0.0, 0.0), superposed(1.0, PI / 2.0, 10.0, 2.0)], &gp).unwrap(),
        ds1_highorder(&[superposed(1.0, PI / 4.0, 0.5, 0.0)], &[1], &gp).unwrap(),
    ];
    for sol in &sols {
        let mut checked = 0;
        for (x, y, t) in points(50, 3.0, 17) {
            let s = sol.sample(x, y, t);
            if s.flag != Flag::Regular {
                continue;
            }
            let tr = sol.w_trace_form(x, y, t).unwrap();
            assert!(rel(tr, s.w.unwrap()) <= 1e-8, "{tr} vs {:?}", s.w);
            checked += 1;
        }
        assert!(checked >= 40);
    }
}

#[test]
fn v_field_is_the_reflected_conjugate_of_u() {
    for eps in [1.0, -1.0] {
        let gp = GlobalParams::ds1(eps).unwrap();
        let sol = ds1_from_params(&[superposed(2.0, 0.3, 0.2, 1.0), superposed(0.7, 1.9, -0.5, 0.4)], &gp).unwrap();
        for (x, y, t) in points(50, 2.0, 23) {
            let (a, b) = (sol.sample(x, y, t), sol.sample(-x, y, t));
            if a.flag != Flag::Regular || b.flag != Flag::Regular {
                continue;
            }
            let want = b.u.conj() * eps;
            assert!(rel(sol.v_field(x, y, t).unwrap(), want) <= 1e-8);
        }
    }
}

#[test]
fn multiplicity_zero_is_the_plain_one_fold() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let s = superposed(2.0, 2.0 * PI, 0.0, 1.0);
    let a = ds1_highorder(&[s], &[0], &gp).unwrap();
    let b = ds1_from_params(&[s], &gp).unwrap();
    for (x, y, t) in points(20, 3.0, 29) {
        let (sa, sb) = (a.sample(x, y, t), b.sample(x, y, t));
        assert_eq!(sa.flag, sb.flag);
        if sa.flag == Flag::Regular {
            assert!(rel(sa.u, sb.u) <= 1e-12);
            assert!(rel(sa.w.unwrap(), sb.w.unwrap()) <= 1e-12);
        }
    }
}

#[test]
fn high_order_travelling_wave_is_nonsingular() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let sol = ds1_highorder(&[superposed(1.0, PI / 2.0, 1.0, 0.0)], &[1], &gp).unwrap();
    let mut peak: f64 = 0.0;
    for k in 0..=20 {
        let t = -5.0 + 0.5 * k as f64;
        for i in 0..=24 {
            for j in 0..=24 {
                let (x, y) = (-3.0 + 0.25 * i as f64, -3.0 + 0.25 * j as f64);
                let s = sol.sample(x, y, t);
                assert_eq!(s.flag, Flag::Regular, "singular at ({x}, {y}, {t})");
                peak = peak.max(s.u.norm());
            }
        }
    }
    assert!(peak.is_finite() && peak < 5.0, "peak {peak}");
}

#[test]
fn plain_one_fold_levels_off_along_lines() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let sol = ds1_from_params(&[EigenSpec::plain(SpectralParams::new(1.5, 0.4))], &gp).unwrap();
    for dir in [1.0, -1.0] {
        let at = |s: f64| sol.sample(dir * s, 0.3 * s, 0.2).u;
        let (a, b) = (at(20.0), at(30.0));
        assert!((a - b).norm() < 1e-6, "{a} vs {b}");
        assert!(a.norm().is_finite());
    }
}

#[test]
fn rejects_ds2_globals() {
    let gp = GlobalParams::ds2(1.0).unwrap();
    assert!(ds1_from_params(&[superposed(2.0, 0.0, 0.0, 0.0)], &gp).is_err());
}

#[test]
fn evaluation_is_deterministic() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let sol = ds1_from_params(&[superposed(2.0, 2.0 * PI, 0.0, 1.0)], &gp).unwrap();
    let a = sol.sample(0.123, -0.456, -0.5);
    let b = sol.sample(0.123, -0.456, -0.5);
    assert_eq!(a.u.re.to_bits(), b.u.re.to_bits());
    assert_eq!(a.u.im.to_bits(), b.u.im.to_bits());
}
