use std::f64::consts::PI;

use ptds::catalog::{dt_solution, CatalogSolution, FamilyId, Params};
use ptds::dt1::{ds1_highorder, EigenSpec};
use ptds::solution::{ConstantSeed, Corrupted};
use ptds::verify::{convergence_order, pde_residual, GridSpec, Order};
use ptds::{Error, Meta, Sample, Solution, SpectralParams, C};
use ptds::{GlobalParams, GlobalParams64};

fn standard() -> GridSpec<f64> {
    GridSpec::square(3.0, 0.02)
}

/// Reduced grid for the Darboux evaluations, which cost a determinant per sample.
fn reduced() -> GridSpec<f64> {
    GridSpec::square(2.0, 0.04)
}

fn assert_converges(sol: &dyn Solution<f64>, gp: &GlobalParams64, grid: &GridSpec<f64>, t: f64, what: &str) {
    let c = convergence_order(sol, gp, grid, t).unwrap();
    assert!(c.passes(1.7, 2.3), "{what} at t = {t}: eq1 {:?}, eq2 {:?}", c.eq1, c.eq2);
    assert!(c.coarse.masked_fraction() < 0.2 && c.fine.masked_fraction() < 0.2, "{what}: too many masked");
    assert!(c.worst().is_some(), "{what}: residual unexpectedly at the floor");
}

fn catalog(id: FamilyId, t: f64) {
    let p = Params::defaults(id);
    let gp = p.global().unwrap();
    assert_converges(&CatalogSolution::new(p).unwrap(), &gp, &standard(), t, id.as_str());
}

fn catalog_on(id: FamilyId, t: f64, grid: GridSpec<f64>) {
    let p = Params::defaults(id);
    let gp = p.global().unwrap();
    assert_converges(&CatalogSolution::new(p).unwrap(), &gp, &grid, t, id.as_str());
}

fn darboux(id: FamilyId, t: f64) {
    let p = Params::defaults(id);
    let gp = p.global().unwrap();
    assert_converges(&dt_solution(&p).unwrap(), &gp, &reduced(), t, id.as_str());
}

#[test]
fn constant_seed_sits_at_the_floor() {
    for gp in [GlobalParams::ds1(1.0), GlobalParams::ds1(-1.0), GlobalParams::ds2(1.0), GlobalParams::ds2(-1.0)] {
        let gp = gp.unwrap();
        let seed = ConstantSeed::new(gp);
        let r = pde_residual(&seed, &gp, &standard(), 0.3).unwrap();
        assert!(r.eq1.unwrap().max <= 1e-12 && r.eq2.max <= 1e-12);
        let c = convergence_order(&seed, &gp, &standard(), 0.3).unwrap();
        assert_eq!(c.eq1, Some(Order::Floor));
        assert_eq!(c.eq2, Order::Floor);
        assert!(c.passes(1.7, 2.3));
    }
}

#[test]
fn ds1_fundamental_residual_and_ratio() {
    let p = Params::defaults(FamilyId::Ds1Fundamental);
    let gp = p.global().unwrap();
    let sol = CatalogSolution::new(p).unwrap();
    let c = convergence_order(&sol, &gp, &standard(), -0.5).unwrap();
    let (e1, e1f) = (c.coarse.eq1.unwrap().max, c.fine.eq1.unwrap().max);
    assert!(e1 <= 1e-2 && c.coarse.eq2.max <= 1e-2, "{e1} {}", c.coarse.eq2.max);
    let r1 = e1 / e1f;
    let r2 = c.coarse.eq2.max / c.fine.eq2.max;
    assert!((3.5..=4.5).contains(&r1) && (3.5..=4.5).contains(&r2), "ratios {r1} {r2}");
    assert_eq!(c.coarse.masked, 0);
}

#[test]
fn ds2_fundamental_converges_at_t0() {
    let p = Params::defaults(FamilyId::Ds2Fundamental);
    let gp = p.global().unwrap();
    assert!(gp.is_ds2());
    let c = convergence_order(&CatalogSolution::new(p).unwrap(), &gp, &standard(), 0.0).unwrap();
    let r1 = c.coarse.eq1.unwrap().max / c.fine.eq1.unwrap().max;
    let r2 = c.coarse.eq2.max / c.fine.eq2.max;
    assert!((3.5..=4.5).contains(&r1) && (3.5..=4.5).contains(&r2), "ratios {r1} {r2}");
}

#[test]
fn corrupted_field_does_not_converge() {
    let p = Params::defaults(FamilyId::Ds1Fundamental);
    let gp = p.global().unwrap();
    let bad = Corrupted::new(CatalogSolution::new(p).unwrap(), 0.01);
    let c = convergence_order(&bad, &gp, &standard(), -0.5).unwrap();
    let o = c.eq1.unwrap().value().unwrap();
    assert!(o.abs() < 0.5, "order {o}");
    assert!(!c.passes(1.7, 2.3));
}

#[test]
fn asymmetric_grid_is_rejected() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let grid = GridSpec::new((-3.0, 2.0), (-3.0, 3.0), 0.1);
    assert_eq!(pde_residual(&ConstantSeed::new(gp), &gp, &grid, 0.0), Err(Error::GridNotSymmetric));
}

struct Nowhere(Meta);

impl Solution<f64> for Nowhere {
    fn sample(&self, _: f64, _: f64, _: f64) -> Sample<f64> {
        Sample::singular(C::new(0.0, 0.0), true)
    }
    fn meta(&self) -> &Meta {
        &self.0
    }
}

#[test]
fn fully_singular_grid_is_an_error() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let r = pde_residual(&Nowhere(Meta::new("nowhere")), &gp, &GridSpec::square(1.0, 0.1), 0.0);
    assert_eq!(r, Err(Error::AllMasked));
}

#[test]
fn reconstructed_w_reports_only_the_second_equation() {
    let p = Params::defaults(FamilyId::Ds1Peregrine);
    let gp = p.global().unwrap();
    let r = pde_residual(&CatalogSolution::new(p).unwrap(), &gp, &standard(), -1.0).unwrap();
    assert!(r.w_reconstructed && r.eq1.is_none());
}

#[test]
fn ds1_fundamental_catalog() {
    catalog(FamilyId::Ds1Fundamental, -0.5);
}

#[test]
fn ds1_peregrine_catalog() {
    catalog(FamilyId::Ds1Peregrine, -1.0);
}

#[test]
fn ds1_travelling_catalog() {
    catalog(FamilyId::Ds1Travelling, -1.0);
    catalog(FamilyId::Ds1Travelling, 0.5);
}

#[test]
fn ds1_hybrid_catalog() {
    catalog(FamilyId::Ds1Hybrid, -1.0);
}

#[test]
fn ds1_second_order_catalog() {
    // singular for t roughly in [-4, 0]; the reconstructed w needs the wave to have spread out
    catalog(FamilyId::Ds1SecondOrder, 8.0);
}

#[test]
fn ds1_two_rogue_catalog() {
    catalog_on(FamilyId::Ds1TwoRogue, -1.0, reduced());
}

#[test]
fn ds2_fundamental_catalog() {
    catalog(FamilyId::Ds2Fundamental, 0.0);
}

#[test]
fn ds2_line_catalog() {
    catalog(FamilyId::Ds2Line, -1.0);
}

#[test]
fn ds2_travelling_catalog() {
    catalog(FamilyId::Ds2Travelling, -1.0);
    catalog(FamilyId::Ds2Travelling, 0.5);
}

#[test]
fn ds2_two_rational_catalog() {
    catalog_on(FamilyId::Ds2TwoRational, -1.0, reduced());
}

#[test]
fn ds2_second_order_catalog() {
    catalog(FamilyId::Ds2SecondOrder, -3.0);
    catalog(FamilyId::Ds2SecondOrder, 0.0);
}

#[test]
fn darboux_outputs_satisfy_the_system() {
    darboux(FamilyId::Ds1Fundamental, -0.5);
    darboux(FamilyId::Ds1Hybrid, -1.0);
    darboux(FamilyId::Ds1TwoRogue, -1.0);
    darboux(FamilyId::Ds2Fundamental, 0.0);
    darboux(FamilyId::Ds2TwoRational, -1.0);
}

#[test]
fn darboux_second_order_outputs_satisfy_the_system() {
    darboux(FamilyId::Ds1SecondOrder, 6.0);
    darboux(FamilyId::Ds1SecondOrder, -6.0);
    darboux(FamilyId::Ds2SecondOrder, -3.0);
}

#[test]
fn nonsingular_high_order_travelling_wave_converges() {
    let gp = GlobalParams::ds1(1.0).unwrap();
    let s = EigenSpec::superposed(SpectralParams::new(1.0, PI / 2.0).with_f(1.0, 0.0));
    let sol = ds1_highorder(&[s], &[1], &gp).unwrap();
    for t in [-5.0, 0.0, 5.0] {
        assert_converges(&sol, &gp, &reduced(), t, "ds1 high-order travelling");
    }
}
