use approx::assert_abs_diff_eq;
use cat0lab::symspace::{
    angle_at, dist, exp_at, geodesic, log_at, ray, spd_exp, spd_log, sym_eig, Mat3, SpdPoint, SymTangent,
};
use proptest::prelude::*;

fn sym(v: [f64; 6]) -> Mat3 {
    Mat3::new(v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5])
}

fn traceless(v: [f64; 5]) -> SymTangent {
    let m = sym([v[0], v[1], v[2], v[3], v[4], -v[0] - v[3]]);
    SymTangent::new(m).unwrap()
}

fn point(v: [f64; 5]) -> SpdPoint {
    spd_exp(&traceless(v))
}

fn arr5() -> impl Strategy<Value = [f64; 5]> {
    prop::array::uniform5(-1.0f64..1.0)
}

#[test]
fn eig_of_diagonal_and_identity() {
    let e = sym_eig(&Mat3::identity()).unwrap();
    assert_eq!(e.values.as_slice(), &[1.0, 1.0, 1.0]);
    let d = sym_eig(&Mat3::from_diagonal(&nalgebra::Vector3::new(1.0, 3.0, 2.0))).unwrap();
    assert_eq!(d.values.as_slice(), &[3.0, 2.0, 1.0]);
}

#[test]
fn exp_of_diagonal_tangent() {
    let p = spd_exp(&SymTangent::diag([1.0, 1.0, -2.0]));
    let e = std::f64::consts::E;
    assert_abs_diff_eq!(*p.matrix(), Mat3::from_diagonal(&nalgebra::Vector3::new(e, e, e.powi(-2))), epsilon = 1e-14);
    assert!(spd_exp(&SymTangent::<3>::zero()).matrix() == &Mat3::identity());
}

#[test]
fn right_angle_between_diagonal_and_offdiagonal() {
    let e = SpdPoint::identity();
    let u = SymTangent::diag([1.0, -1.0, 0.0]);
    let v = SymTangent::new(sym([0.0, 1.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
    assert_abs_diff_eq!(angle_at(&e, &u, &v).unwrap(), std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
}

#[test]
fn angle_of_diagonal_tangents_is_euclidean() {
    let (a, b) = ([1.0, 0.0, -1.0], [1.0, -2.0, 1.0]);
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let got = angle_at(&SpdPoint::identity(), &SymTangent::diag(a), &SymTangent::diag(b)).unwrap();
    assert_abs_diff_eq!(got, (dot / (na * nb)).acos(), epsilon = 1e-14);
}

#[test]
fn distance_in_the_flat_is_euclidean() {
    let p = SpdPoint::diag([2.0, 1.0, 0.5]).unwrap();
    let l = [2f64.ln(), 0.0, 0.5f64.ln()];
    let expected = l.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert_abs_diff_eq!(dist(&SpdPoint::identity(), &p), expected, epsilon = 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigendecomposition_reconstructs(v in prop::array::uniform6(-3.0f64..3.0)) {
        let s = sym(v);
        let e = sym_eig(&s).unwrap();
        let back = e.frame * Mat3::from_diagonal(&e.values) * e.frame.transpose();
        prop_assert!((back - s).norm() <= 1e-10 * (1.0 + s.norm()));
    }

    #[test]
    fn log_inverts_exp(v in arr5()) {
        let u = traceless(v);
        prop_assert!((spd_log(&spd_exp(&u)).matrix() - u.matrix()).norm() < 1e-12);
    }

    #[test]
    fn exp_at_inverts_log_at(a in arr5(), b in arr5()) {
        let (p, q) = (point(a), point(b));
        let back = exp_at(&p, &log_at(&p, &q));
        prop_assert!(dist(&back, &q) < 1e-10);
    }

    #[test]
    fn distance_is_a_metric(a in arr5(), b in arr5(), c in arr5()) {
        let (p, q, r) = (point(a), point(b), point(c));
        prop_assert!((dist(&p, &q) - dist(&q, &p)).abs() < 1e-12);
        prop_assert!(dist(&p, &p) < 1e-12);
        prop_assert!(dist(&p, &r) <= dist(&p, &q) + dist(&q, &r) + 1e-10);
    }

    #[test]
    fn geodesics_have_constant_speed(a in arr5(), b in arr5(), s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let (p, q) = (point(a), point(b));
        let d = dist(&geodesic(&p, &q, s), &geodesic(&p, &q, t));
        prop_assert!((d - (s - t).abs() * dist(&p, &q)).abs() < 1e-9);
    }

    #[test]
    fn unit_rays_have_unit_speed(a in arr5(), b in arr5(), t in 0.0f64..4.0) {
        let p = point(a);
        let u = traceless(b);
        prop_assume!(u.norm() > 1e-3);
        let n = cat0lab::symspace::norm_at(&p, &u);
        let x = ray(&p, &u.scale(1.0 / n), t).unwrap();
        prop_assert!((dist(&p, &x) - t).abs() < 1e-9);
    }
}
