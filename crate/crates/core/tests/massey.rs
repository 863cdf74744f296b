use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use vortexlink::grid::{ext_d, grad, random_form, GridField, Grid3};
use vortexlink::links::{Link, Scene};
use vortexlink::massey::*;
use vortexlink::Error;

fn borromean_at(n: usize) -> (Scene, Link, Grid3) {
    let scene = Scene::builtin("borromean").unwrap().with_resolution(n);
    let link = scene.link().unwrap();
    let grid = scene.grid().unwrap();
    (scene, link, grid)
}

fn build(link: &Link, grid: &Grid3, r_mask: f64) -> MasseyHierarchy {
    let dom = MaskedDomain::new(link, grid, r_mask).unwrap();
    MasseyHierarchy::build(link, dom, SolveParams::default()).unwrap()
}

fn borromean96() -> &'static (Link, Grid3, MasseyHierarchy) {
    static H: OnceLock<(Link, Grid3, MasseyHierarchy)> = OnceLock::new();
    H.get_or_init(|| {
        let (scene, link, grid) = borromean_at(96);
        let h = build(&link, &grid, scene.mask_radius());
        (link, grid, h)
    })
}

#[test]
fn mask_profile_limits() {
    assert_eq!(mask_profile(0.0, 0.2), 0.0);
    assert_eq!(mask_profile(0.2, 0.2), 0.0);
    assert_eq!(mask_profile(0.3, 0.2), 1.0);
    assert_eq!(mask_profile(5.0, 0.2), 1.0);
    assert!((mask_profile(0.25, 0.2) - 0.5).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn mask_profile_is_monotone_in_unit_interval(a in 0.0f64..1.0, b in 0.0f64..1.0, r in 0.05f64..0.5) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (m0, m1) = (mask_profile(lo, r), mask_profile(hi, r));
        prop_assert!((0.0..=1.0).contains(&m0) && (0.0..=1.0).contains(&m1));
        prop_assert!(m0 <= m1);
    }
}

#[test]
fn domain_mask_vanishes_on_tubes_and_is_one_far_away() {
    let (scene, link, grid) = borromean_at(64);
    let dom = MaskedDomain::new(&link, &grid, scene.mask_radius()).unwrap();
    let r = dom.r_mask();
    for i in 0..grid.len() {
        let p = grid.point(i);
        let d = link
            .components()
            .iter()
            .map(|c| c.polygon().distance_to_point(p.into()))
            .fold(f64::INFINITY, f64::min);
        let m = dom.mask()[i];
        assert!((0.0..=1.0).contains(&m));
        if d <= r {
            assert_eq!(m, 0.0);
        }
        if d > 2.0 * r {
            assert_eq!(m, 1.0);
        }
    }
}

#[test]
fn meridian_tori_are_closed_and_unmasked() {
    let (scene, link, grid) = borromean_at(96);
    let dom = MaskedDomain::new(&link, &grid, scene.mask_radius()).unwrap();
    for t in dom.tori() {
        assert!(t.closure_defect() < 1e-12, "{}", t.closure_defect());
        assert!(t.radius() > MASK_OUTER * dom.r_mask());
        // Trilinear sampling reaches lattice points one spacing inside the shell.
        let m = t.min_mask(&dom);
        assert!(m > 0.9, "{m}");
    }
}

#[test]
fn mask_below_tube_radius_is_rejected() {
    let (scene, link, grid) = borromean_at(64);
    let err = MaskedDomain::new(&link, &grid, 0.5 * scene.mask_radius()).unwrap_err();
    assert!(matches!(err, Error::Invalid(_)));
}

#[test]
fn manufactured_exact_form_is_recovered() {
    let grid = Grid3::new(32, 2.0 * std::f64::consts::PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let beta = random_form(&grid, 1, 4, &mut rng).unwrap();
    let omega = ext_d(&beta).unwrap();
    let dom = MaskedDomain::unmasked(&grid);
    let p = solve_primitive(&omega, &dom, &SolveParams::default()).unwrap();
    assert!(p.residual < 1e-6, "{}", p.residual);
    assert_eq!(p.v.degree(), 1);
}

#[test]
fn zero_form_needs_no_iterations() {
    let grid = Grid3::new(16, 1.0).unwrap();
    let dom = MaskedDomain::unmasked(&grid);
    let p = solve_masked(&GridField::zeros(grid, 2).unwrap(), &dom, &SolveParams::default()).unwrap();
    assert_eq!(p.iterations, 0);
    assert_eq!(p.residual, 0.0);
}

#[test]
fn solve_rejects_wrong_degree() {
    let grid = Grid3::new(16, 1.0).unwrap();
    let dom = MaskedDomain::unmasked(&grid);
    let err = solve_masked(&GridField::zeros(grid, 1).unwrap(), &dom, &SolveParams::default()).unwrap_err();
    assert!(matches!(err, Error::Degree(_)));
}

#[test]
fn iteration_cap_reports_no_convergence() {
    let scene = Scene::builtin("hopf").unwrap();
    let grid = scene.grid().unwrap();
    let dom = MaskedDomain::new(&scene.link().unwrap(), &grid, scene.mask_radius()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let omega = ext_d(&random_form(&grid, 1, 6, &mut rng).unwrap()).unwrap();
    let params = SolveParams { cg_maxiter: 1, ..SolveParams::default() };
    let err = solve_masked(&omega, &dom, &params).unwrap_err();
    assert!(matches!(err, Error::NoConvergence { iterations: 1, .. }));
}

#[test]
fn hopf_pair_is_obstructed_with_unit_period() {
    let scene = Scene::builtin("hopf").unwrap();
    let link = scene.link().unwrap();
    let grid = scene.grid().unwrap();
    let dom = MaskedDomain::new(&link, &grid, scene.mask_radius()).unwrap();
    let mut h = MasseyHierarchy::new(&link, dom, SolveParams::default()).unwrap();
    match h.solve_pair(1, 2) {
        Err(Error::ObstructedClass { i, j, period, tolerance, .. }) => {
            assert_eq!((i, j), (1, 2));
            assert_eq!(tolerance, 0.1);
            assert!((period.abs() - 1.0).abs() < 0.1, "{period}");
        }
        other => panic!("expected ObstructedClass, got {other:?}"),
    }
    let periods = &h.form_certificates()["12"].periods;
    assert!((periods[0] + periods[1]).abs() < 0.05, "{periods:?}");
    assert!(h.massey_triple().is_err());
}

#[test]
fn borromean_pairwise_periods_pass_the_gate() {
    let (_, _, h) = borromean96();
    for idx in ["12", "13", "23"] {
        let c = &h.form_certificates()[idx];
        assert!(c.periods.iter().all(|p| p.abs() < 0.1), "{idx}: {:?}", c.periods);
        assert!(c.masked_closedness < 0.05, "{idx}: {}", c.masked_closedness);
    }
}

#[test]
fn borromean_primitives_are_certified() {
    let (_, _, h) = borromean96();
    for idx in ["12", "23"] {
        let c = &h.primitive_certificates()[idx];
        assert!(c.residual < 0.05, "{idx}: {}", c.residual);
        assert!(c.cg_residual < 1e-8);
        let v = h.v(idx).unwrap();
        let r = masked_residual(v, h.omega(idx).unwrap(), h.domain()).unwrap();
        assert_eq!(r, c.residual);
    }
}

#[test]
fn borromean_triple_form_is_closed_and_links() {
    let (_, _, h) = borromean96();
    let c = &h.form_certificates()["123"];
    assert!(c.masked_closedness < 0.05, "{}", c.masked_closedness);
    let t3 = h.triple_linking(3).unwrap();
    assert!((t3.abs() - 1.0).abs() < 0.15, "{t3}");
    let sum: f64 = c.periods.iter().sum();
    assert!(sum.abs() < 0.02, "{:?}", c.periods);
}

#[test]
fn exact_shift_of_v12_keeps_the_triple_period() {
    let (_, grid, h) = borromean96();
    let centre = [0.6, 0.6, 0.6];
    let phi: Vec<f64> = (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            let r2: f64 = (0..3).map(|k| (p[k] - centre[k]).powi(2)).sum();
            (-r2 / (2.0 * 0.1f64.powi(2))).exp()
        })
        .collect();
    let g = grad(&phi, grid);
    let [x, y, z] = g.components().clone();
    let dphi = GridField::from_components(*grid, 1, vec![x, y, z]).unwrap();
    let mut shifted = h.clone();
    shifted.set_v("12", h.v("12").unwrap().add(&dphi).unwrap());
    shifted.massey_triple().unwrap();
    let before = h.triple_linking(3).unwrap();
    let after = shifted.triple_linking(3).unwrap();
    assert!((after - before).abs() < 0.02, "{before} {after}");
}

#[test]
fn triple_period_flips_under_reversal() {
    let (scene, link, grid) = borromean_at(64);
    let a = build(&link, &grid, scene.mask_radius()).triple_linking(3).unwrap();
    let b = build(&link.with_component_reversed(0), &grid, scene.mask_radius()).triple_linking(3).unwrap();
    assert!(a.abs() > 0.5);
    assert!((a + b).abs() < 0.05, "{a} {b}");
}

#[test]
fn triple_period_is_trilinear_in_flux() {
    let (scene, link, grid) = borromean_at(64);
    let a = build(&link, &grid, scene.mask_radius()).triple_linking(3).unwrap();
    let b = build(&link.with_flux(2.0), &grid, scene.mask_radius()).triple_linking(3).unwrap();
    assert!((b / a - 8.0).abs() < 0.08, "{a} {b}");
}

#[test]
fn split_triple_form_vanishes() {
    let scene = Scene::builtin("split").unwrap();
    let link = scene.link().unwrap();
    let grid = scene.grid().unwrap();
    let h = build(&link, &grid, scene.mask_radius());
    let om = h.omega("123").unwrap();
    assert!(om.components().iter().all(|c| c.iter().all(|&x| x == 0.0)));
    for k in 1..=3 {
        assert!(h.triple_linking(k).unwrap().abs() < 0.02);
    }
    let rep = h.involution_report(&link.hamiltonian_field(&grid).unwrap()).unwrap();
    assert!(rep.max_iota() < 1e-6 && rep.max_lie() < 1e-6 && rep.max_bracket() < 1e-6, "{rep:?}");
}

#[test]
fn missing_primitive_is_reported() {
    let (scene, link, grid) = borromean_at(64);
    let dom = MaskedDomain::new(&link, &grid, scene.mask_radius()).unwrap();
    let mut h = MasseyHierarchy::new(&link, dom, SolveParams::default()).unwrap();
    assert!(matches!(h.massey_triple(), Err(Error::MissingPrimitive(ref s)) if s == "23"));
    assert!(matches!(h.triple_linking(3), Err(Error::MissingPrimitive(_))));
    assert!(matches!(h.obstruction_form(0, 2), Err(Error::Invalid(_))));
}

#[test]
fn level_one_curvature_reproduces_pair_forms_bitwise() {
    let (_, _, h) = borromean96();
    let a = NilpotentConnection::from_hierarchy(h, 1).unwrap();
    let f = connection_curvature(&a).unwrap();
    assert_eq!(f.get(0, 2).unwrap(), h.omega("12").unwrap());
    assert_eq!(f.get(1, 3).unwrap(), h.omega("23").unwrap());
    assert!(f.get(0, 3).is_none());
    assert!(bianchi_residual(&a, &f, h.domain()).unwrap() < 0.05);
}

#[test]
fn level_two_curvature_reproduces_triple_form_bitwise() {
    let (_, _, h) = borromean96();
    let a = NilpotentConnection::from_hierarchy(h, 2).unwrap();
    let f = connection_curvature(&a).unwrap();
    assert_eq!(f.get(0, 3).unwrap(), h.omega("123").unwrap());
    for (i, j, idx) in [(0, 2, "12"), (1, 3, "23")] {
        let e = f.get(i, j).unwrap();
        let rel = h.domain().masked_norm(e) / h.domain().masked_norm(h.omega(idx).unwrap());
        assert!(rel < 0.05, "{idx}: {rel}");
    }
    assert!(bianchi_residual(&a, &f, h.domain()).unwrap() < 0.05);
}

#[test]
fn connection_rejects_lower_entries() {
    let grid = Grid3::new(8, 1.0).unwrap();
    let mut a = NilpotentConnection::new(3);
    assert!(a.set(1, 0, GridField::zeros(grid, 1).unwrap()).is_err());
    assert!(a.set(0, 1, GridField::zeros(grid, 2).unwrap()).is_err());
    assert!(a.set(0, 1, GridField::zeros(grid, 1).unwrap()).is_ok());
}

#[test]
fn borromean_involution_support_checks() {
    let (link, grid, h) = borromean96();
    let rep = h.involution_report(&link.hamiltonian_field(grid).unwrap()).unwrap();
    assert!(rep.max_iota() < 0.05, "{:?}", rep.iota);
    assert!(rep.max_lie() < 0.05, "{:?}", rep.lie);
    // The flat discs share the origin, so ξ_12 and ξ_23 overlap there and
    // (ξ_1×ξ_2)×(ξ_2×ξ_3) = det(ξ_1,ξ_2,ξ_3) ξ_2 ≠ 0.
    for (k, v) in &rep.bracket {
        if k != "12,23" {
            assert!(*v < 0.05, "{k}: {v}");
        }
    }
    assert!(rep.bracket["12,23"] > 0.5);
}

#[test]
fn exact_shift_moves_lie_residual_but_not_brackets() {
    let (link, grid, h) = borromean96();
    let xi = link.hamiltonian_field(grid).unwrap();
    let base = h.involution_report(&xi).unwrap();
    let phi: Vec<f64> = (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            (-(p[0] * p[0] + (p[1] - 0.5).powi(2) + p[2] * p[2]) / 0.02).exp()
        })
        .collect();
    let g = grad(&phi, grid);
    let [x, y, z] = g.components().clone();
    let dphi = GridField::from_components(*grid, 1, vec![x, y, z]).unwrap();
    let mut shifted = h.clone();
    shifted.set_v("1", h.v("1").unwrap().add(&dphi).unwrap());
    let rep = shifted.involution_report(&xi).unwrap();
    assert!((rep.lie["1"] - base.lie["1"]).abs() > 1e-3, "{} {}", rep.lie["1"], base.lie["1"]);
    assert_eq!(rep.pb_exactness, base.pb_exactness);
    assert_eq!(rep.bracket, base.bracket);
}
