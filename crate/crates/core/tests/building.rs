use std::f64::consts::{FRAC_PI_3, PI};

use cat0lab::building::{self, FixedVariant, Flag, Frame, Subspace};
use cat0lab::isometry::{self, GroupElement};
use nalgebra::Vector3 as V3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ge(case: u8, params: &[f64]) -> GroupElement {
    GroupElement::new(isometry::normal_form(case, params).unwrap()).unwrap()
}

fn flag(l: usize, p: (usize, usize)) -> Flag {
    building::flag(Subspace::coordinate_line(l), Subspace::coordinate_plane(p.0, p.1)).unwrap()
}

#[test]
fn flags_need_incidence() {
    assert!(building::flag(Subspace::coordinate_line(0), Subspace::coordinate_plane(0, 1)).is_ok());
    assert!(building::flag(Subspace::coordinate_line(2), Subspace::coordinate_plane(0, 1)).is_err());
}

#[test]
fn relative_positions() {
    let f = flag(0, (0, 1));
    assert_eq!(building::relative_position(&f, &f), [1, 2, 3]);
    assert_eq!(building::relative_position(&f, &flag(2, (1, 2))), [3, 2, 1]);
    assert_eq!(building::relative_position(&f, &flag(1, (0, 1))), [2, 1, 3]);
}

/// Both flags are coordinate flags of the frame.
fn frame_contains(fr: &Frame, f: &Flag) -> bool {
    let lines: Vec<Subspace> = (0..6).map(|k| fr.vertex(k)).filter(|s| s.is_line()).collect();
    let planes: Vec<Subspace> = (0..6).map(|k| fr.vertex(k)).filter(|s| !s.is_line()).collect();
    lines.iter().any(|l| l.approx_eq(&f.line, 1e-8)) && planes.iter().any(|p| p.approx_eq(&f.plane, 1e-8))
}

#[test]
fn common_apartments() {
    let std = Flag::standard();
    let fr = building::common_apartment(&std, &std);
    assert!(frame_contains(&fr, &std));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut v = || V3::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    for _ in 0..50 {
        let (a, b, c, d) = (v(), v(), v(), v());
        let f1 = building::flag(Subspace::line(a).unwrap(), Subspace::plane(a, b).unwrap()).unwrap();
        let f2 = building::flag(Subspace::line(c).unwrap(), Subspace::plane(c, d).unwrap()).unwrap();
        let fr = building::common_apartment(&f1, &f2);
        assert!(frame_contains(&fr, &f1) && frame_contains(&fr, &f2));
        // shared plane, different lines
        let f3 = building::flag(Subspace::line(b).unwrap(), f1.plane).unwrap();
        let fr = building::common_apartment(&f1, &f3);
        assert!(frame_contains(&fr, &f1) && frame_contains(&fr, &f3));
    }
}

#[test]
fn hexagon_distances() {
    let v = building::standard_vertices();
    assert!((building::tits_distance(&v[0], &v[1]) - FRAC_PI_3).abs() < 1e-12);
    assert!((building::tits_distance(&v[1], &v[4]) - PI).abs() < 1e-12);
}

#[test]
fn apartment_coordinates_round_trip() {
    let fr = Frame::standard();
    for k in 0..24 {
        let x = fr.point_at(k as f64 * 0.27);
        let u = building::apartment_coords(&x).unwrap();
        let y = building::from_apartment_coords(&u).unwrap();
        assert!(building::tits_distance(&x, &y) < 1e-12);
    }
}

#[test]
fn fixed_set_variants() {
    let cases = [
        (1, vec![], FixedVariant::EdgeStar),
        (2, vec![2.0], FixedVariant::IntervalThreeEdges),
        (3, vec![], FixedVariant::SingleEdge),
        (4, vec![0.5f64.cos() * 2.0, 0.5f64.sin() * 2.0], FixedVariant::TwoAntipodalVertices),
        (5, vec![2.0, 1.0, 0.5], FixedVariant::Hexagon),
        (6, vec![2.0], FixedVariant::SuspensionBoundary),
        (7, vec![], FixedVariant::WholeBoundary),
    ];
    for (case, params, variant) in cases {
        assert_eq!(building::fixed_set(&ge(case, &params)).unwrap().variant, variant, "case {case}");
    }
}

#[test]
fn case_three_samples_lie_on_one_edge() {
    let desc = building::fixed_set(&ge(3, &[])).unwrap();
    let pts = building::sample_fixed_set(&desc, 10, 5).unwrap();
    assert_eq!(pts.len(), 10);
    for x in &pts {
        for y in &pts {
            assert!(building::tits_distance(x, y) <= FRAC_PI_3 + 1e-12);
        }
    }
}

#[test]
fn case_one_samples_spread_over_many_edges() {
    let g = ge(1, &[]);
    let desc = building::fixed_set(&g).unwrap();
    let pts = building::sample_fixed_set(&desc, 100, 5).unwrap();
    assert!(pts.iter().all(|x| building::is_fixed(&g, x)));
    // distinct non-vertex flags are distinct edges
    let mut edges: Vec<Flag> = Vec::new();
    for x in pts.iter().filter(|x| x.kind() == building::VertexKind::Interior) {
        if !edges.iter().any(|f| f.line.approx_eq(&x.flag.line, 1e-8) && f.plane.approx_eq(&x.flag.plane, 1e-8)) {
            edges.push(x.flag);
        }
    }
    assert!(edges.len() >= 6, "{} edges", edges.len());
}

#[test]
fn zero_samples_is_an_error() {
    let desc = building::fixed_set(&ge(3, &[])).unwrap();
    assert!(building::sample_fixed_set(&desc, 0, 1).is_err());
}

#[test]
fn fixedness_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = ge(2, &[2.0]);
    let h = isometry::random_conjugator(&mut rng, 1.0);
    let desc = building::fixed_set(&g).unwrap();
    for x in building::sample_fixed_set(&desc, 50, 3).unwrap() {
        assert!(building::is_fixed(&g.conjugate_by(&h), &x.image(h.matrix())));
    }
}
