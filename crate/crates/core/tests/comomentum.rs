use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use vortexlink::comomentum::*;
use vortexlink::conventions::EQUIVARIANCE_DEFECT_SIGN;
use vortexlink::grid::*;
use vortexlink::links::{gauss_linking, tube_field, PlanarCurve, Scene};
use vortexlink::{Error, GridField, Grid3, VectorField};

fn torus(n: usize) -> Grid3 {
    Grid3::new(n, 2.0 * PI).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn abc(g: Grid3, a: f64, b: f64, c: f64) -> VectorField {
    VectorField::from_fn(g, |p| {
        [a * p[2].sin() + c * p[1].cos(), b * p[0].sin() + a * p[2].cos(), c * p[1].sin() + b * p[0].cos()]
    })
}

/// Three solenoidal fields from distinct parity classes: every pairwise cross product
/// and the triple determinant have zero mean.
fn triple(seed: u64) -> [VectorField; 3] {
    let g = torus(32);
    let mut r = rng(seed);
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]].map(|p| random_solenoidal_parity(&g, 3, p, &mut r))
}

fn rel(a: &GridField, b: &GridField) -> f64 {
    a.sub(b).unwrap().max_abs() / b.max_abs()
}

#[test]
fn bracket_of_a_field_with_itself_vanishes() {
    let b = random_solenoidal(&torus(16), 3, &mut rng(1));
    assert_eq!(hydro_bracket(&b, &b).unwrap().max_abs(), 0.0);
}

#[test]
fn bracket_is_antisymmetric() {
    let [b, c, _] = triple(2);
    let bc = hydro_bracket(&b, &c).unwrap();
    let cb = hydro_bracket(&c, &b).unwrap();
    assert_eq!(bc, cb.scale(-1.0));
}

#[test]
fn single_mode_brackets() {
    let g = torus(16);
    let b = VectorField::from_fn(g, |p| [0.0, 0.0, p[0].sin()]);
    let c = VectorField::from_fn(g, |p| [0.0, p[0].sin(), 0.0]);
    // b × c = (-sin²x, 0, 0) depends on x only, so its curl vanishes.
    assert!(hydro_bracket(&b, &c).unwrap().max_abs() < 1e-12);
    // b × (sin y, 0, 0) = (0, sin x sin y, 0), curl = (0, 0, cos x sin y).
    let d = VectorField::from_fn(g, |p| [p[1].sin(), 0.0, 0.0]);
    let got = hydro_bracket(&b, &d).unwrap();
    let want = VectorField::from_fn(g, |p| [0.0, 0.0, p[0].cos() * p[1].sin()]);
    assert!(got.sub(&want).unwrap().max_abs() < 1e-12);
    assert_eq!(tower_bracket(&b, &d).unwrap(), got.scale(-1.0));
}

#[test]
fn bracket_rejects_compressible_fields() {
    let g = torus(16);
    let b = VectorField::from_fn(g, |p| [p[0].sin(), 0.0, 0.0]);
    let c = random_solenoidal(&g, 3, &mut rng(3));
    assert!(matches!(hydro_bracket(&b, &c), Err(Error::NotDivergenceFree { .. })));
}

#[test]
fn f1_of_abc_field_is_minus_its_flat() {
    let v = abc(torus(32), 1.0, 0.7, 0.4);
    let got = f1(&v).unwrap();
    assert!(rel(&got, &musical(&v).neg()) < 1e-10);
}

#[test]
fn f1_of_zero_is_zero() {
    let g = torus(16);
    assert_eq!(f1(&VectorField::zeros(g)).unwrap().max_abs(), 0.0);
    assert_eq!(eq25_residual(&VectorField::zeros(g)).unwrap(), 0.0);
}

#[test]
fn hamiltonian_pair_is_in_coulomb_gauge() {
    let b = random_solenoidal(&torus(32), 4, &mut rng(4));
    let h = HamiltonianPair::new(b).unwrap();
    assert!(h.residual < 1e-8);
    assert!(codiff(&h.form).unwrap().max_abs() < 1e-9 * h.form.max_abs());
}

#[test]
fn mu2_vanishes_on_the_diagonal_and_is_antisymmetric() {
    let [b, c, _] = triple(5);
    assert_eq!(mu2(&b, &b).unwrap().max_abs(), 0.0);
    assert_eq!(mu2(&b, &c).unwrap(), mu2(&c, &b).unwrap().neg());
    assert_eq!(f2(&b, &b).unwrap().max_abs(), 0.0);
}

#[test]
fn mu2_is_closed_and_exact() {
    for seed in 0..3 {
        let [b, c, _] = triple(10 + seed);
        let m = mu2(&b, &c).unwrap();
        assert!(mu2_closedness(&m).unwrap() < 1e-8);
        assert!(harmonic_norm(&m) < 1e-8 * m.max_abs());
    }
}

#[test]
fn f2_potential_is_zero_mean_and_exact() {
    let [b, c, _] = triple(6);
    let p = f2(&b, &c).unwrap();
    let m = mu2(&b, &c).unwrap();
    assert!(harmonic_norm(&p) < 1e-12 * p.max_abs());
    let dp = ext_d(&p).unwrap();
    assert!(dp.sub(&m).unwrap().l2_norm() / m.l2_norm() < 1e-6);
    assert!(eq26_residual(&b, &c).unwrap() < 1e-6);
}

#[test]
fn f2_is_obstructed_when_the_cross_product_has_a_mean() {
    let g = torus(16);
    let b = VectorField::from_fn(g, |p| [0.0, p[0].sin(), p[0].cos()]);
    let c = VectorField::from_fn(g, |p| [0.0, p[0].cos(), -p[0].sin()]);
    // b × c = (-1, 0, 0) everywhere.
    assert!(matches!(f2(&b, &c), Err(Error::ObstructedPotential { .. })));
}

#[test]
fn poisson_bracket_is_the_cross_product() {
    let [b, c, _] = triple(7);
    let hb = HamiltonianPair::new(b.clone()).unwrap();
    let hc = HamiltonianPair::new(c.clone()).unwrap();
    assert_eq!(poisson_bracket(&hb, &hb).unwrap().max_abs(), 0.0);
    let pb = poisson_bracket(&hb, &hc).unwrap();
    let oracle = musical(&cross(&b, &c).unwrap());
    assert!(pb.sub(&oracle).unwrap().max_abs() <= 1e-15 * oracle.max_abs().max(1.0));
}

#[test]
fn bracket_defect_identity() {
    for seed in 0..4 {
        let [b, c, _] = triple(20 + seed);
        let r = eq29_residual(&HamiltonianPair::new(b).unwrap(), &HamiltonianPair::new(c).unwrap()).unwrap();
        assert!(r < 1e-6, "seed {seed}: {r}");
    }
}

#[test]
fn f2_of_boundary_is_the_volume() {
    for seed in 0..3 {
        let [x, y, z] = triple(30 + seed);
        let r = eq27_residual(&x, &y, &z).unwrap();
        assert!(r < 1e-5, "seed {seed}: {r}");
    }
}

#[test]
fn divergence_free_flows_preserve_volume() {
    let b = random_solenoidal(&torus(32), 4, &mut rng(8));
    assert!(volume_conservation_defect(&b).unwrap() < 1e-8);
    let g = torus(32);
    let compressible = VectorField::from_fn(g, |p| [p[0].sin(), 0.0, 0.0]);
    assert!(volume_conservation_defect(&compressible).unwrap() > 0.1);
}

#[test]
fn equivariance_defect_on_abc_field() {
    let v = abc(torus(32), 1.0, 1.0, 1.0);
    let d = equivariance_defect(&v, &v).unwrap();
    let vmax = v.max_abs();
    assert!(d.max_abs() > 0.1 * vmax * vmax, "{} vs {}", d.max_abs(), vmax);
    // For an eigenfield B = v, so d<B, v> = d|v|².
    let grad_h = helicity_density_gradient(&v).unwrap();
    assert!(rel(&d, &grad_h.scale(EQUIVARIANCE_DEFECT_SIGN)) < 1e-10);
}

#[test]
fn equivariance_defect_vanishes_for_constant_helicity_density() {
    let g = torus(32);
    let b = VectorField::from_fn(g, |p| [0.0, 0.0, p[0].sin()]);
    assert!(equivariance_defect(&b, &b).unwrap().max_abs() < 1e-8);
    assert_eq!(equivariance_defect(&VectorField::zeros(g), &b).unwrap().max_abs(), 0.0);
}

#[test]
fn equivariance_defect_matches_helicity_gradient_on_random_fields() {
    let b = random_solenoidal(&torus(32), 3, &mut rng(9));
    let d = equivariance_defect(&b, &b).unwrap();
    let grad_h = helicity_density_gradient(&b).unwrap().scale(EQUIVARIANCE_DEFECT_SIGN);
    assert!(rel(&d, &grad_h) < 1e-9);
}

#[test]
fn equivariance_defect_is_linear_in_b() {
    let [xi, b1, b2] = triple(11);
    let sum = equivariance_defect(&xi, &b1.add(&b2).unwrap()).unwrap();
    let parts = equivariance_defect(&xi, &b1).unwrap().add(&equivariance_defect(&xi, &b2).unwrap()).unwrap();
    assert!(sum.sub(&parts).unwrap().max_abs() < 1e-12 * parts.max_abs());
}

#[test]
fn rasetti_regge_of_zero_is_zero() {
    let g = torus(16);
    let c = PlanarCurve::circle([PI, PI, PI], [0.0, 0.0, 1.0], 1.0, 64).unwrap();
    assert_eq!(rasetti_regge(&VectorField::zeros(g), c.polygon()).unwrap(), 0.0);
}

#[test]
fn rasetti_regge_recovers_the_linking_number() {
    let scene = Scene::hopf();
    let grid = scene.grid().unwrap();
    let link = scene.link().unwrap();
    let xi = solenoidal_part(&tube_field(link.polygon(0), link.tube(), &grid));
    let lk = gauss_linking(link.polygon(0), link.polygon(1)).unwrap();
    let value = rasetti_regge(&xi, link.polygon(1)).unwrap();
    assert!((value + lk).abs() < 1e-2, "value {value}, linking {lk}");
    let back = rasetti_regge(&xi, &link.polygon(1).reversed()).unwrap();
    assert!((value + back).abs() < 1e-6 * value.abs(), "{value} {back}");
}

#[test]
fn line_integral_of_a_gradient_vanishes_spectrally() {
    let g = torus(24);
    let mut r = rng(12);
    let b = random_solenoidal(&g, 3, &mut r);
    let phi = random_scalar(&g, 3, &mut r);
    let f = f1(&b).unwrap();
    let dphi = ext_d(&GridField::scalar(g, phi).unwrap()).unwrap();
    let gauge = f.add(&dphi).unwrap();
    let gamma = PlanarCurve::circle([PI, PI, PI], [0.3, 0.2, 1.0], 1.5, 64).unwrap();
    let a = line_integral(&f, gamma.polygon(), LineQuadrature::Spectral).unwrap();
    let b2 = line_integral(&gauge, gamma.polygon(), LineQuadrature::Spectral).unwrap();
    assert!((a - b2).abs() < 1e-9, "{a} {b2}");
    assert!(a.abs() > 1e-3);
    let t = line_integral(&f, gamma.polygon(), LineQuadrature::Trilinear).unwrap();
    assert!((t - a).abs() < 0.05 * a.abs().max(0.1));
}

#[test]
fn kks_pairing_examples() {
    let g = torus(32);
    let [w, b, c] = triple(13);
    let bc = kks_pairing(&w, &b, &c).unwrap();
    assert_eq!(bc, -kks_pairing(&w, &c, &b).unwrap());
    let flat = VectorField::from_fn(g, |p| [p[1].sin(), p[0].cos(), 0.0]);
    let flat2 = VectorField::from_fn(g, |p| [p[2].cos(), 0.0, 0.0]);
    // flat × flat2 is parallel to z; w = (1,0,0) is orthogonal to it.
    assert_eq!(kks_pairing(&VectorField::constant(g, [1.0, 0.0, 0.0]), &flat, &flat2).unwrap(), 0.0);
    // ABC w with b = (0, sin z, 0), c = (0, 0, 1): b × c = (sin z, 0, 0), ∫ w·(b×c) = A (2π)³ / 2.
    let v = abc(g, 0.8, 0.5, 0.3);
    let b = VectorField::from_fn(g, |p| [0.0, p[2].sin(), 0.0]);
    let k = kks_pairing(&v, &b, &VectorField::constant(g, [0.0, 0.0, 1.0])).unwrap();
    let exact = 0.8 * (2.0 * PI).powi(3) / 2.0;
    assert!((k - exact).abs() < 1e-10 * exact);
}

#[test]
fn loop_2form_examples() {
    let r = 1.3;
    let c = PlanarCurve::circle([0.0; 3], [0.0, 0.0, 1.0], r, 512).unwrap();
    let verts = c.polygon().vertices();
    let radial: Vec<[f64; 3]> = verts.iter().map(|p| [p[0] / r, p[1] / r, 0.0]).collect();
    let vertical = vec![[0.0, 0.0, 1.0]; verts.len()];
    let value = loop_2form(c.polygon(), &radial, &vertical).unwrap();
    assert!((value + 2.0 * PI * r).abs() < 1e-4 * 2.0 * PI * r, "{value}");
    assert_eq!(loop_2form(c.polygon(), &radial, &radial).unwrap(), 0.0);
    let tangent: Vec<[f64; 3]> = (0..verts.len())
        .map(|i| {
            let a = verts[i];
            let b = verts[(i + 1) % verts.len()];
            [b[0] - a[0], b[1] - a[1], b[2] - a[2]]
        })
        .collect();
    assert!(loop_2form(c.polygon(), &tangent, &vertical).unwrap().abs() < 1e-3);
    assert!(matches!(loop_2form(c.polygon(), &radial[1..], &vertical), Err(Error::LengthMismatch(_))));
}

#[test]
fn euler_rhs_vanishes_on_beltrami_fields() {
    let g = torus(32);
    assert!(euler_vorticity_rhs(&abc(g, 1.0, 0.6, 0.3)).unwrap().max_abs() < 1e-8);
    assert_eq!(euler_vorticity_rhs(&VectorField::zeros(g)).unwrap().max_abs(), 0.0);
}

#[test]
fn euler_rhs_is_divergence_free() {
    let w = random_solenoidal(&torus(32), 4, &mut rng(14));
    let rhs = euler_vorticity_rhs(&w).unwrap();
    assert!(divergence_defect(&rhs) < 1e-10);
    assert!(rhs.max_abs() > 1e-3);
}

#[test]
fn comomentum_pack_certificates() {
    let fields = triple(15).to_vec();
    let pack = ComomentumPack::build(&fields).unwrap();
    let c = pack.certificates;
    assert_eq!(pack.f1_forms.len(), 3);
    assert_eq!(pack.f2_values.len(), 3);
    assert!(c.eq25 < 1e-8 && c.eq26 < 1e-6 && c.eq27 < 1e-5 && c.eq29 < 1e-6, "{c:?}");
    assert!(c.gauge < 1e-9);
    assert!(ComomentumPack::build(&fields[..2]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn eq25_holds_for_random_solenoidal_fields(seed in 0u64..10_000, kmax in 1usize..6) {
        let b = random_solenoidal(&torus(24), kmax, &mut rng(seed));
        prop_assert!(eq25_residual(&b).unwrap() < 1e-8);
    }

    #[test]
    fn f1_is_linear(seed in 0u64..10_000, a in -3.0f64..3.0) {
        let g = torus(16);
        let mut r = rng(seed);
        let b = random_solenoidal(&g, 3, &mut r);
        let c = random_solenoidal(&g, 3, &mut r);
        let lhs = f1(&b.scale(a).add(&c).unwrap()).unwrap();
        let rhs = f1(&b).unwrap().scale(a).add(&f1(&c).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-13 * (1.0 + a.abs()));
    }

    #[test]
    fn eq29_holds_for_random_pairs(seed in 0u64..10_000) {
        let [b, c, _] = triple(seed);
        let r = eq29_residual(&HamiltonianPair::new(b).unwrap(), &HamiltonianPair::new(c).unwrap()).unwrap();
        prop_assert!(r < 1e-6);
    }
}
