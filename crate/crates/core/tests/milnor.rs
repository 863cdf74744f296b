use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use vortexlink::links::*;
use vortexlink::milnor::*;
use vortexlink::Error;

fn diagram(scene: &Scene) -> LinkDiagram {
    diagram_from_curves(&scene.link().unwrap(), scene.projection()).unwrap()
}

fn mu(d: &LinkDiagram, index: &[usize]) -> i64 {
    let v = mu_bar(d, index).unwrap().value;
    i64::try_from(v).unwrap()
}

fn directions(count: usize) -> Vec<[f64; 3]> {
    (0..count)
        .map(|i| {
            let z = 0.95 - 1.9 * (i as f64 + 0.5) / count as f64;
            let phi = 2.399_963 * i as f64 + 0.31;
            let s = (1.0 - z * z).sqrt();
            [s * phi.cos(), s * phi.sin(), z]
        })
        .collect()
}

fn trefoil(rot: f64, shift: [f64; 3]) -> PolygonalCurve {
    let m = 300;
    let (c, s) = (rot.cos(), rot.sin());
    let v = (0..m)
        .map(|i| {
            let t = 2.0 * PI * (i as f64 + 0.25) / m as f64;
            let p = [
                (t.sin() + 2.0 * (2.0 * t).sin()) * 0.3,
                (t.cos() - 2.0 * (2.0 * t).cos()) * 0.3,
                -(3.0 * t).sin() * 0.3,
            ];
            [c * p[0] - s * p[2] + shift[0], p[1] + shift[1], s * p[0] + c * p[2] + shift[2]]
        })
        .collect();
    PolygonalCurve::new(v).unwrap()
}

#[test]
fn magnus_inverse_is_exact() {
    let deg = 3;
    let a = MagnusSeries::generator(0, 1, deg);
    let b = MagnusSeries::generator(0, -1, deg);
    assert_eq!(b.coefficient(&[0, 0, 0]), BigInt::from(-1));
    assert_eq!(a.mul(&b), MagnusSeries::one(deg));
    assert_eq!(b.mul(&a), MagnusSeries::one(deg));
    let x = MagnusSeries::generator(1, 2, deg).mul(&a);
    assert_eq!(x.inverse().unwrap().mul(&x), MagnusSeries::one(deg));
}

#[test]
fn magnus_commutator_starts_in_degree_two() {
    let deg = 3;
    let a = MagnusSeries::generator(0, 1, deg);
    let b = MagnusSeries::generator(1, 1, deg);
    let c = a.inverse().unwrap().mul(&b.inverse().unwrap()).mul(&a).mul(&b);
    assert_eq!(c.coefficient(&[]), BigInt::from(1));
    assert!(c.coefficient(&[0]) == BigInt::from(0) && c.coefficient(&[1]) == BigInt::from(0));
    assert_eq!(c.coefficient(&[0, 1]), BigInt::from(1));
    assert_eq!(c.coefficient(&[1, 0]), BigInt::from(-1));
}

#[test]
fn hopf_crossings_and_mu12() {
    let scene = Scene::hopf();
    let d = diagram(&scene);
    assert_eq!(d.crossings().len(), 2);
    assert_eq!(d.crossings()[0].sign, d.crossings()[1].sign);
    let link = scene.link().unwrap();
    let lk = crossing_linking(link.polygon(0), link.polygon(1), scene.projection()).unwrap();
    assert_eq!(lk.abs(), 1);
    assert_eq!(mu(&d, &[1, 2]), lk);
    assert_eq!(mu(&d, &[2, 1]), lk);
    assert_eq!(d.linking_number(0, 1), lk);
}

/// Three unit circles around a triangle, heights modulated so each pair crosses twice:
/// the textbook 6-crossing Borromean diagram when viewed from above.
fn three_circle_borromean() -> Link {
    let phase = [0.0, PI / 2.0, PI / 2.0];
    let comps = (0..3)
        .map(|i| {
            let a = PI / 2.0 + 2.0 * PI * i as f64 / 3.0;
            let c = [0.6 * a.cos(), 0.6 * a.sin()];
            let v = (0..256)
                .map(|s| {
                    let t = 2.0 * PI * (s as f64 + 0.5) / 256.0;
                    [c[0] + t.cos(), c[1] + t.sin(), 0.3 * (3.0 * t + phase[i]).sin()]
                })
                .collect();
            Component::Polygon(PolygonalCurve::new(v).unwrap())
        })
        .collect();
    Link::new(comps, TubeParams::new(0.05)).unwrap()
}

fn pair_signs(d: &LinkDiagram, i: usize, j: usize) -> Vec<i8> {
    d.crossings()
        .iter()
        .filter(|x| {
            let (a, b) = (d.component_of(x.over), d.component_of(x.under_in));
            (a, b) == (i, j) || (a, b) == (j, i)
        })
        .map(|x| x.sign)
        .collect()
}

#[test]
fn textbook_borromean_diagram_shape() {
    let d = diagram_from_curves(&three_circle_borromean(), [0.01, 0.02, 1.0]).unwrap();
    assert_eq!(d.crossings().len(), 6);
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let s = pair_signs(&d, i, j);
        assert_eq!(s.len(), 2, "pair {i}{j}");
        assert_eq!(s[0], -s[1], "pair {i}{j}");
    }
    let p = wirtinger(&d);
    assert_eq!((p.generators, p.relators.len()), (6, 6));
    assert_eq!(mu(&d, &[1, 2, 3]).abs(), 1);
}

#[test]
fn ellipse_borromean_diagram_shape() {
    // The orthogonal ellipses have no 6-crossing projection: every generic view shows 8 or 12.
    let d = diagram(&Scene::borromean());
    assert_eq!(d.crossings().len(), 8);
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let s = pair_signs(&d, i, j);
        assert_eq!(s.len() % 2, 0, "pair {i}{j}");
        assert_eq!(s.iter().map(|&x| x as i64).sum::<i64>(), 0, "pair {i}{j}");
    }
    let p = wirtinger(&d);
    assert_eq!((p.generators, p.relators.len()), (8, 8));
}

#[test]
fn borromean_mu123_and_antisymmetry() {
    let d = diagram(&Scene::borromean());
    let m = mu_bar(&d, &[1, 2, 3]).unwrap();
    assert_eq!(i64::try_from(m.value.clone()).unwrap().abs(), 1);
    assert!(m.trail.iter().all(|(_, v)| *v == BigInt::from(0)));
    assert!(m.trail.iter().any(|(ix, _)| ix == &vec![1, 2]));
    assert_eq!(mu(&d, &[2, 1, 3]), -mu(&d, &[1, 2, 3]));
    // Cyclic symmetry.
    assert_eq!(mu(&d, &[2, 3, 1]), mu(&d, &[1, 2, 3]));
    assert_eq!(mu(&d, &[3, 1, 2]), mu(&d, &[1, 2, 3]));
}

#[test]
fn borromean_mu123_is_independent_of_projection() {
    let link = Scene::borromean().link().unwrap();
    let reference = mu(&diagram(&Scene::borromean()), &[1, 2, 3]);
    let mut used = 0;
    for dir in directions(20) {
        let d = diagram_from_curves(&link, dir).unwrap();
        assert_eq!(mu(&d, &[1, 2, 3]), reference, "direction {dir:?}");
        used += 1;
    }
    assert_eq!(used, 20);
}

#[test]
fn borromean_reversal_and_mirror_flip_sign() {
    let scene = Scene::borromean();
    let link = scene.link().unwrap();
    let reference = mu(&diagram(&scene), &[1, 2, 3]);
    let rev = diagram_from_curves(&link.with_component_reversed(0), scene.projection()).unwrap();
    assert_eq!(mu(&rev, &[1, 2, 3]), -reference);
    let mirrored: Vec<Component> =
        link.components().iter().map(|c| Component::Polygon(c.polygon().mirrored())).collect();
    let m = Link::new(mirrored, *link.tube()).unwrap();
    let md = diagram_from_curves(&m, scene.projection()).unwrap();
    // Mirroring flips invariants of even length only.
    assert_eq!(mu(&md, &[1, 2, 3]), reference);
    let hopf = Scene::hopf().link().unwrap();
    let hm: Vec<Component> =
        hopf.components().iter().map(|c| Component::Polygon(c.polygon().mirrored())).collect();
    let hm = Link::new(hm, *hopf.tube()).unwrap();
    let a = mu(&diagram_from_curves(&hopf, DEFAULT_PROJECTION).unwrap(), &[1, 2]);
    let b = mu(&diagram_from_curves(&hm, DEFAULT_PROJECTION).unwrap(), &[1, 2]);
    assert_eq!(a, -b);
}

#[test]
fn split_and_unlink_vanish() {
    let d = diagram(&Scene::split());
    assert_eq!(d.crossings().len(), 0);
    assert_eq!(mu(&d, &[1, 2, 3]), 0);
    let u = diagram(&Scene::unlink());
    assert_eq!(mu(&u, &[1, 2]), 0);
    assert_eq!(u.linking_number(0, 1), 0);
}

#[test]
fn unknot_presentation() {
    let c = PlanarCurve::circle([0.0; 3], [0.3, 0.1, 1.0], 1.0, 64).unwrap();
    let link = Link::new(vec![Component::Planar(c)], TubeParams::new(0.1)).unwrap();
    let d = diagram_from_curves(&link, DEFAULT_PROJECTION).unwrap();
    let p = wirtinger(&d);
    assert_eq!(p.generators, 1);
    assert!(p.relators.is_empty());
    assert!(longitude_word(&d, 1).unwrap().is_empty());
}

#[test]
fn kinks_do_not_change_invariants() {
    let hopf = diagram(&Scene::hopf());
    let borr = diagram(&Scene::borromean());
    let reference = (mu(&hopf, &[1, 2]), mu(&borr, &[1, 2, 3]));
    for sign in [1, -1] {
        for over_first in [true, false] {
            let h = hopf.with_kink(0, 0, sign, over_first).unwrap();
            assert_eq!(h.crossings().len(), 3);
            assert_eq!(h.self_writhe(0), sign as i64);
            assert_eq!(mu(&h, &[1, 2]), reference.0);
            assert_eq!(mu(&h, &[2, 1]), reference.0);
            let b = borr.with_kink(1, 1, sign, over_first).unwrap().with_kink(2, 0, -sign, !over_first).unwrap();
            assert_eq!(mu(&b, &[1, 2, 3]), reference.1);
            assert_eq!(mu(&b, &[3, 2, 1]), -reference.1);
        }
    }
    let split = diagram(&Scene::split()).with_kink(0, 0, 1, true).unwrap();
    assert_eq!(split.crossings().len(), 1);
    assert_eq!(mu(&split, &[1, 2, 3]), 0);
}

#[test]
fn mu12_matches_crossing_linking_on_random_scenes() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut checked = 0;
    let mut linked = 0;
    while checked < 25 {
        let mut unit = || {
            let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            v
        };
        let n1 = unit();
        let centre = unit();
        let rot = unit()[0] * PI;
        let a = if checked % 2 == 0 {
            Component::Polygon(trefoil(rot, [0.0; 3]))
        } else {
            match PlanarCurve::circle([0.0; 3], n1, 0.9, 128) {
                Ok(c) => Component::Planar(c),
                Err(_) => continue,
            }
        };
        let b = match PlanarCurve::circle(centre, unit(), 0.8, 128) {
            Ok(c) => Component::Planar(c),
            Err(_) => continue,
        };
        let Ok(link) = Link::new(vec![a, b], TubeParams::new(1e-3)) else { continue };
        if link.min_distance() < 0.02 {
            continue;
        }
        let dir = directions(7)[checked % 7];
        let Ok(lk) = crossing_linking(link.polygon(0), link.polygon(1), dir) else { continue };
        let d = diagram_from_curves(&link, dir).unwrap();
        assert_eq!(mu(&d, &[1, 2]), lk, "scene {checked}");
        assert_eq!(mu(&d, &[2, 1]), lk, "scene {checked}");
        let g = gauss_linking(link.polygon(0), link.polygon(1)).unwrap();
        assert!((g - lk as f64).abs() < 1e-2, "scene {checked}: gauss {g}, crossings {lk}");
        linked += (lk != 0) as usize;
        checked += 1;
    }
    assert!(linked >= 5, "only {linked} linked scenes");
}

#[test]
fn hopf_triple_index_is_indeterminate() {
    let scene = Scene::hopf();
    let link = scene.link().unwrap();
    let third = PlanarCurve::circle([0.0, 0.0, 2.2], [0.0, 0.0, 1.0], 0.4, 64).unwrap();
    let mut comps = link.components().to_vec();
    comps.push(Component::Planar(third));
    let l3 = Link::new(comps, *link.tube()).unwrap();
    let d = diagram_from_curves(&l3, scene.projection()).unwrap();
    match mu_bar(&d, &[1, 2, 3]) {
        Err(Error::IndeterminateInvariant { index, sub_index, value }) => {
            assert_eq!(index, "123");
            assert!(sub_index == "12" || sub_index == "21", "{sub_index}");
            assert_eq!(value.parse::<i64>().unwrap().abs(), 1);
        }
        other => panic!("expected an indeterminate invariant, got {other:?}"),
    }
}

#[test]
fn diagram_json_roundtrip_and_validation() {
    let d = diagram(&Scene::borromean());
    let text = d.to_json();
    assert!(text.contains("\"vdiag-1\""));
    let back = LinkDiagram::from_json(&text).unwrap();
    assert_eq!(back, d);
    assert_eq!(mu(&back, &[1, 2, 3]), mu(&d, &[1, 2, 3]));

    let broken = r#"{"schema":"vdiag-1","components":1,"arcs":[[0,1]],
        "crossings":[{"over":0,"under_in":0,"under_out":1,"sign":1}]}"#;
    assert!(matches!(LinkDiagram::from_json(broken), Err(Error::InconsistentDiagram(_))));
    let bad_sign = r#"{"schema":"vdiag-1","components":1,"arcs":[[0]],
        "crossings":[{"over":0,"under_in":0,"under_out":0,"sign":2}]}"#;
    assert!(matches!(LinkDiagram::from_json(bad_sign), Err(Error::InconsistentDiagram(_))));
    let wrong_order = r#"{"schema":"vdiag-1","components":1,"arcs":[[0,1,2]],
        "crossings":[{"over":0,"under_in":0,"under_out":2,"sign":1},
                     {"over":0,"under_in":2,"under_out":1,"sign":1},
                     {"over":0,"under_in":1,"under_out":0,"sign":1}]}"#;
    assert!(matches!(LinkDiagram::from_json(wrong_order), Err(Error::InconsistentDiagram(_))));
    let count = r#"{"schema":"vdiag-1","components":2,"arcs":[[0]],"crossings":[]}"#;
    assert!(matches!(LinkDiagram::from_json(count), Err(Error::InconsistentDiagram(_))));
    assert!(LinkDiagram::from_json(&text.replace("vdiag-1", "vdiag-2")).is_err());
}

#[test]
fn hopf_longitude_exponent_is_linking_number() {
    let d = diagram(&Scene::hopf());
    let w = longitude_word(&d, 1).unwrap();
    let net: i64 = w.iter().filter(|(a, _)| d.component_of(*a) == 1).map(|(_, e)| e).sum();
    assert_eq!(net, d.linking_number(0, 1));
    assert_eq!(net.abs(), 1);
    let p = wirtinger(&d);
    assert_eq!((p.generators, p.relators.len()), (2, 2));
}

#[test]
fn textbook_diagram_agrees_with_ellipses_up_to_sign() {
    let a = diagram_from_curves(&three_circle_borromean(), [0.01, 0.02, 1.0]).unwrap();
    let b = diagram(&Scene::borromean());
    assert_eq!(mu(&a, &[1, 2, 3]).abs(), mu(&b, &[1, 2, 3]).abs());
    assert_eq!(mu(&LinkDiagram::from_json(&a.to_json()).unwrap(), &[1, 2, 3]), mu(&a, &[1, 2, 3]));
}

#[test]
fn degenerate_projection_is_rejected() {
    let link = Scene::split().link().unwrap();
    // Looking along the plane of the coplanar circles.
    assert!(matches!(diagram_from_curves(&link, [1.0, 0.0, 0.0]), Err(Error::DegenerateProjection(_))));
    assert!(diagram_from_curves(&link, [0.0; 3]).is_err());
}
