//! Named verification suites. Each suite checks the invariants declared by
//! one module and reports every check with its measured value.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::building::{self, BoundaryPoint, Frame};
use crate::cat1::{self, GeodesicSpace, MetricSample};
use crate::error::{Error, Result};
use crate::gradflow::{self, ConvexFunctional, RaySpec};
use crate::isometry::{self, GroupElement, Kind};
use crate::symspace::{self, SpdPoint};

/// How a check's value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    /// Reported only; never fails.
    #[serde(rename = "info")]
    Info,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    /// `None` for info checks.
    pub threshold: Option<f64>,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= threshold,
            Relation::AtLeast => value >= threshold,
            Relation::Info => true,
        };
        Self {
            name: name.into(),
            value,
            relation,
            threshold: (relation != Relation::Info).then_some(threshold),
            passed,
        }
    }
}

fn at_most(name: impl Into<String>, value: f64, thr: f64) -> Check {
    Check::new(name, value, Relation::AtMost, thr)
}

fn at_least(name: impl Into<String>, value: f64, thr: f64) -> Check {
    Check::new(name, value, Relation::AtLeast, thr)
}

fn info(name: impl Into<String>, value: f64) -> Check {
    Check::new(name, value, Relation::Info, f64::NAN)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub module: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// `(name, module, summary)` of every suite.
pub const SUITES: [(&str, &str, &str); 10] = [
    ("cat0-comparison", "symspace", "CAT(0) and angle comparison, triangle inequality, geodesic additivity"),
    ("classification", "isometry", "Jordan classification of random conjugates, invariance, convexity of d_g"),
    ("tits-metric", "building", "hexagon distances, metric axioms, apartment coordinates, fixed-set predicates"),
    ("radfix", "building", "radii of sampled fixed sets, parabolic bound π/2"),
    ("first-variation", "gradflow", "first variation equality and inequality"),
    ("busemann-flow", "gradflow", "Busemann functions, gradient curves, boundary limits of parabolic flows"),
    ("simplex", "cat1", "rad of spherical simplices, δ_m, minimax solver identities"),
    ("suspension", "cat1", "radius and centers of sampled suspensions"),
    ("sperner", "cat1", "fully labeled cells of subdivided simplices"),
    ("lemmas", "cat1", "exponents of the small-triangle comparison lemmas"),
];

/// Runs the named suite. `samples` rescales the main sample counts (the
/// default is the documented contract size).
pub fn run_suite(name: &str, seed: u64, samples: Option<usize>) -> Result<SuiteResult> {
    let (_, module, _) = SUITES
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| Error::validation(format!("unknown suite {name:?}; try --list")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match name {
        "cat0-comparison" => cat0_comparison(&mut rng, samples.unwrap_or(10_000))?,
        "classification" => classification(&mut rng, samples.unwrap_or(200))?,
        "tits-metric" => tits_metric(&mut rng, samples.unwrap_or(1000))?,
        "radfix" => radfix(&mut rng, samples.unwrap_or(200))?,
        "first-variation" => first_variation(&mut rng, samples.unwrap_or(1000))?,
        "busemann-flow" => busemann_flow(&mut rng, samples.unwrap_or(200))?,
        "simplex" => simplex(&mut rng, samples.unwrap_or(200))?,
        "suspension" => suspension(&mut rng, samples.unwrap_or(1000))?,
        "sperner" => sperner(&mut rng, samples.unwrap_or(200))?,
        _ => lemmas(seed, samples.unwrap_or(2000))?,
    };
    Ok(SuiteResult {
        suite: name.to_string(),
        module: module.to_string(),
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Distance between points at fractions `s`, `t` of the sides from the
/// apex of a Euclidean triangle with apex sides `b`, `c` and base `a`.
fn euclid_cevian(a: f64, b: f64, c: f64, s: f64, t: f64) -> f64 {
    // side b runs to the point at fraction s, side c to the one at t
    let cos = if b > 0.0 && c > 0.0 {
        ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0)
    } else {
        1.0
    };
    ((s * b).powi(2) + (t * c).powi(2) - 2.0 * s * t * b * c * cos).max(0.0).sqrt()
}

fn cat0_comparison(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    use symspace::{angle_at, dist, geodesic, log_at, random_point};
    let mut cat0 = f64::INFINITY;
    let mut angle = f64::INFINITY;
    let mut tri = f64::INFINITY;
    let mut additive = 0.0f64;
    for _ in 0..n {
        let p = random_point::<_, 3>(rng, 3.0);
        let q = random_point::<_, 3>(rng, 3.0);
        let r = random_point::<_, 3>(rng, 3.0);
        let (a, b, c) = (dist(&q, &r), dist(&p, &r), dist(&p, &q));
        tri = tri.min(b + c - a).min(a + c - b).min(a + b - c);
        let s: f64 = rng.random();
        let t: f64 = rng.random();
        // points on [p,q] and [p,r] at fractions s and t
        let x = geodesic(&p, &q, s);
        let y = geodesic(&p, &r, t);
        cat0 = cat0.min(euclid_cevian(a, c, b, s, t) - dist(&x, &y));
        let mpq = geodesic(&p, &q, 0.5);
        let mpr = geodesic(&p, &r, 0.5);
        let mqr = geodesic(&q, &r, 0.5);
        cat0 = cat0
            .min(a / 2.0 - dist(&mpq, &mpr))
            .min(b / 2.0 - dist(&mpq, &mqr))
            .min(c / 2.0 - dist(&mpr, &mqr));
        if b > 1e-6 && c > 1e-6 {
            let ang = angle_at(&p, &log_at(&p, &q), &log_at(&p, &r))?;
            let cmp = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0).acos();
            angle = angle.min(cmp - ang);
        }
        let (s1, s2) = (rng.random::<f64>(), rng.random::<f64>());
        let d = dist(&geodesic(&p, &q, s1), &geodesic(&p, &q, s2));
        additive = additive.max((d - (s1 - s2).abs() * c).abs());
    }
    Ok(vec![
        at_least("cat0_inequality_slack", cat0, -1e-9),
        at_least("angle_comparison_slack", angle, -1e-9),
        at_least("triangle_inequality_slack", tri, -1e-10),
        at_most("geodesic_additivity_error", additive, 1e-9),
    ])
}

fn conjugate(h: &GroupElement, m: &symspace::Mat3) -> Result<GroupElement> {
    GroupElement::normalized(h.matrix() * m * h.inverse().matrix())
}

fn classification(rng: &mut ChaCha8Rng, per_case: usize) -> Result<Vec<Check>> {
    let mut wrong = 0usize;
    let mut param_err = 0.0f64;
    let mut invariance = 0.0f64;
    let mut kind_mismatch = 0usize;
    for case in 1u8..=7 {
        for _ in 0..per_case {
            let params = isometry::random_params(rng, case);
            let nf = isometry::normal_form(case, &params)?;
            let h = isometry::random_conjugator(rng, 1.5);
            let g = conjugate(&h, &nf)?;
            let j = isometry::real_jordan(&g)?;
            if j.case_id != case {
                wrong += 1;
                continue;
            }
            for (a, b) in j.params.iter().zip(&params) {
                param_err = param_err.max((a - b).abs());
            }
        }
    }
    for _ in 0..per_case {
        let case = rng.random_range(1u8..=7);
        let nf = isometry::normal_form(case, &isometry::random_params(rng, case))?;
        let g = GroupElement::normalized(nf)?;
        let h = isometry::random_conjugator(rng, 1.0);
        let a = isometry::classify(&g)?;
        let b = isometry::classify(&g.conjugate_by(&h))?;
        if a.kind != b.kind {
            kind_mismatch += 1;
        }
        invariance = invariance.max((a.translation_length - b.translation_length).abs());
    }
    let mut convex = f64::INFINITY;
    for _ in 0..1000 {
        let case = rng.random_range(1u8..=7);
        let nf = isometry::normal_form(case, &isometry::random_params(rng, case))?;
        let g = conjugate(&isometry::random_conjugator(rng, 0.5), &nf)?;
        let p = symspace::random_point::<_, 3>(rng, 2.0);
        let q = symspace::random_point::<_, 3>(rng, 2.0);
        let t: f64 = rng.random();
        let mid = isometry::displacement(&g, &symspace::geodesic(&p, &q, t));
        let chord = (1.0 - t) * isometry::displacement(&g, &p) + t * isometry::displacement(&g, &q);
        convex = convex.min(chord + 1e-9 - mid);
    }
    // |g| = |hk| for the case-2 normal form and diag(a, a, 1/a²)
    let mut chain = 0.0f64;
    for a in [2.0, 0.5, -3.0, 1.7] {
        let g = GroupElement::new(isometry::normal_form(2, &[a])?)?;
        let hk = GroupElement::diag(a, a, 1.0 / (a * a))?;
        chain = chain.max(
            (isometry::classify(&g)?.translation_length - isometry::classify(&hk)?.translation_length).abs(),
        );
    }
    // Min-set predicates
    let e = SpdPoint::identity();
    let diag = GroupElement::diag(2.0, 1.0, 0.5)?;
    let e_in_min = isometry::min_set_contains(&diag, &e, 1e-12)?;
    let rot = GroupElement::new(isometry::normal_form(4, &[0.6f64.cos(), 0.6f64.sin()])?)?;
    let mut gamma0_in = true;
    for s in [-2.0, -0.5, 0.0, 0.3, 1.5] {
        let p = SpdPoint::diag([f64::exp(s), f64::exp(s), f64::exp(-2.0 * s)])?;
        gamma0_in &= isometry::min_set_contains(&rot, &p, 1e-9)?;
    }
    let par = GroupElement::new(isometry::normal_form(2, &[2.0])?)?;
    let mut parabolic_out = true;
    for _ in 0..100 {
        let p = symspace::random_point::<_, 3>(rng, 3.0);
        parabolic_out &= !isometry::min_set_contains(&par, &p, 1e-3)?;
    }
    let rep = isometry::classify(&GroupElement::new(isometry::normal_form(1, &[])?)?)?;
    Ok(vec![
        at_most("misclassified", wrong as f64, 0.0),
        at_most("param_error", param_err, 1e-6),
        at_most("conjugation_kind_mismatch", kind_mismatch as f64, 0.0),
        at_most("conjugation_length_change", invariance, 1e-8),
        at_least("displacement_convexity_slack", convex, 0.0),
        at_most("case2_chain_gap", chain, 1e-12),
        at_least("identity_in_min_of_diag", e_in_min as u8 as f64, 1.0),
        at_least("gamma0_fixed_by_rotation", gamma0_in as u8 as f64, 1.0),
        at_least("parabolic_min_set_empty", parabolic_out as u8 as f64, 1.0),
        at_least("case1_parabolic", (rep.kind == Kind::Parabolic) as u8 as f64, 1.0),
    ])
}

/// Normal form of `case` with random parameters, conjugated by a random
/// element of the given spread.
pub(crate) fn random_element(rng: &mut ChaCha8Rng, case: u8, spread: f64) -> Result<GroupElement> {
    let nf = isometry::normal_form(case, &isometry::random_params(rng, case))?;
    conjugate(&isometry::random_conjugator(rng, spread), &nf)
}

/// A small perturbation of a boundary point.
fn jitter(rng: &mut ChaCha8Rng, x: &BoundaryPoint, size: f64) -> BoundaryPoint {
    let h = isometry::random_conjugator(rng, size);
    let mut m = *h.matrix();
    // pull toward the identity
    m = symspace::Mat3::identity() + (m - symspace::Mat3::identity()) * size;
    x.image(&m)
}

fn random_frame(rng: &mut ChaCha8Rng) -> Result<Frame> {
    let mut v = || nalgebra::Vector3::from_fn(|_, _| rng.random::<f64>() - 0.5);
    Frame::new(v(), v(), v())
}

fn tits_metric(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    let v = building::standard_vertices();
    let mut hex = 0.0f64;
    for k in 0..6 {
        hex = hex.max((building::tits_distance(&v[k], &v[(k + 1) % 6]) - FRAC_PI_3).abs());
        hex = hex.max((building::tits_distance(&v[k], &v[(k + 3) % 6]) - PI).abs());
        hex = hex.max((building::tits_distance(&v[k], &v[(k + 2) % 6]) - 2.0 * FRAC_PI_3).abs());
    }
    let mut sym = 0.0f64;
    let mut tri = f64::INFINITY;
    let mut selfd = 0.0f64;
    for k in 0..n {
        // random points are generically opposite; share apartments as well
        let frame = random_frame(rng)?;
        let mut pick = |shared: bool| {
            if shared {
                frame.point_at(rng.random::<f64>() * 2.0 * PI)
            } else {
                building::random_boundary_point(rng)
            }
        };
        let (x, y, z) = (pick(k % 3 != 0), pick(k % 3 != 0), pick(k % 3 == 1));
        let (dxy, dyx) = (building::tits_distance(&x, &y), building::tits_distance(&y, &x));
        sym = sym.max((dxy - dyx).abs());
        let dyz = building::tits_distance(&y, &z);
        let dxz = building::tits_distance(&x, &z);
        tri = tri.min(dxy + dyz - dxz).min(dxz + dyz - dxy).min(dxy + dxz - dyz);
        selfd = selfd.max(building::tits_distance(&x, &x));
    }
    let frame = Frame::standard();
    let mut coords = 0.0f64;
    let mut angle = 0.0f64;
    let e = SpdPoint::identity();
    for _ in 0..n {
        let x = frame.point_at(rng.random::<f64>() * 2.0 * PI);
        let y = frame.point_at(rng.random::<f64>() * 2.0 * PI);
        let ux = building::apartment_coords(&x)?;
        let uy = building::apartment_coords(&y)?;
        let fa = symspace::frobenius_angle(ux.matrix(), uy.matrix())?;
        let td = building::tits_distance(&x, &y);
        coords = coords.max((fa - td).abs());
        let a = symspace::angle_at(&e, &ux, &uy)?;
        angle = angle.max((a - td.min(PI)).abs());
    }
    let mut equiv = 0usize;
    let mut disagree = 0usize;
    for case in 1u8..=7 {
        let g = random_element(rng, case, 1.0)?;
        let desc = building::fixed_set(&g)?;
        let inside = building::sample_fixed_set(&desc, n / 2, rng.random())?;
        let mut pts: Vec<BoundaryPoint> = inside.clone();
        for x in inside.iter().take(n / 4) {
            pts.push(jitter(rng, x, 1e-3));
        }
        while pts.len() < n {
            pts.push(building::random_boundary_point(rng));
        }
        let h = isometry::random_conjugator(rng, 1.0);
        let gh = g.conjugate_by(&h);
        for x in &pts {
            if desc.contains(x) != building::is_fixed(&g, x) {
                disagree += 1;
            }
            if building::is_fixed(&g, x) != building::is_fixed(&gh, &x.image(h.matrix())) {
                equiv += 1;
            }
        }
    }
    Ok(vec![
        at_most("hexagon_error", hex, 1e-12),
        at_most("symmetry_error", sym, 1e-12),
        at_least("triangle_slack", tri, -1e-12),
        at_most("self_distance", selfd, 1e-12),
        at_most("apartment_coords_vs_tits", coords, 1e-12),
        at_most("angle_vs_tits", angle, 1e-12),
        at_most("fixed_set_disagreements", disagree as f64, 0.0),
        at_most("is_fixed_equivariance_failures", equiv as f64, 0.0),
    ])
}

fn sample_radius(desc: &building::FixedSetDescription, n: usize, seed: u64) -> Result<f64> {
    let pts = building::sample_fixed_set(desc, n, seed)?;
    let m = cat1::FiniteMetricSample::from_space(&cat1::TitsBoundary, &pts);
    Ok(cat1::minimax_center(&m)?.rad)
}

fn radfix(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut worst_parabolic = 0.0f64;
    for case in 1u8..=4 {
        let g = random_element(rng, case, 1.0)?;
        let desc = building::fixed_set(&g)?;
        let r = sample_radius(&desc, n, rng.random())?;
        let (target, tol) = match case {
            1 | 2 => (FRAC_PI_2, 2e-3),
            3 => (FRAC_PI_6, 1e-6),
            _ => (PI, 1e-9),
        };
        if case <= 3 {
            worst_parabolic = worst_parabolic.max(r);
        }
        checks.push(at_most(format!("case{case}_radius_error"), (r - target).abs(), tol));
    }
    checks.push(at_most("parabolic_radius", worst_parabolic, FRAC_PI_2 + 2e-3));
    Ok(checks)
}

fn first_variation(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    use gradflow::{angle_to_point, directional_derivative, random_unit_tangent, steepest_direction};
    let mut eq_err = 0.0f64;
    for k in 0..n {
        let p = symspace::random_point::<_, 3>(rng, 2.0);
        let v = random_unit_tangent(rng, &p);
        let (f, foot) = if k % 2 == 0 {
            let q = symspace::random_point::<_, 3>(rng, 2.0);
            (ConvexFunctional::dist_to_point(q), q)
        } else {
            let (foot, _) = gradflow::project_to_flat(&p)?;
            (ConvexFunctional::dist_to_flat(), foot)
        };
        // finite differences need steps well below the distance to the foot
        if symspace::dist(&p, &foot) < 0.05 {
            continue;
        }
        let d = directional_derivative(&f, &p, &v)?;
        let a = angle_to_point(&p, &foot, &v)?;
        eq_err = eq_err.max((d + a.cos()).abs());
    }
    let per_point = 20;
    let mut slack = f64::INFINITY;
    let mut gnorm_gap = 0.0f64;
    for k in 0..n.div_ceil(per_point) {
        let case = [1u8, 2, 3][k % 3];
        let g = random_element(rng, case, 0.5)?;
        let f = ConvexFunctional::displacement(g);
        let p = symspace::random_point::<_, 3>(rng, 2.0);
        let (u, gn) = steepest_direction(&f, &p, 512)?;
        let (_, grad) = f.value_and_grad(&p);
        gnorm_gap = gnorm_gap.max((symspace::norm_at(&p, &grad) - gn).abs());
        for _ in 0..per_point {
            let v = random_unit_tangent(rng, &p);
            let d = directional_derivative(&f, &p, &v)?;
            let a = symspace::angle_at(&p, &u, &v)?;
            slack = slack.min(d + gn * a.cos());
        }
    }
    Ok(vec![
        at_most("first_variation_equality_error", eq_err, 1e-4),
        at_least("first_variation_inequality_slack", slack, -1e-4),
        info("steepest_vs_analytic_gradient_norm", gnorm_gap),
    ])
}

fn busemann_flow(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    use symspace::{dist, random_point};
    let mut along = 0.0f64;
    let mut lip = f64::NEG_INFINITY;
    let mut closed = 0.0f64;
    for _ in 0..n {
        let base = random_point::<_, 3>(rng, 2.0);
        let ray = RaySpec::new(base, gradflow::random_unit_tangent(rng, &base))?;
        let s = rng.random::<f64>() * 5.0;
        along = along.max((gradflow::busemann(&ray, &ray.point(s))? + s).abs());
        let p = random_point::<_, 3>(rng, 2.0);
        let q = random_point::<_, 3>(rng, 2.0);
        let (bp, bq) = (gradflow::busemann(&ray, &p)?, gradflow::busemann(&ray, &q)?);
        lip = lip.max((bp - bq).abs() - dist(&p, &q));
        // d(p, γ(t)) − t decreases to b(p)
        closed = closed.max(bp - (dist(&p, &ray.point(8.0)) - 8.0));
    }
    let mut checks = vec![
        at_most("busemann_along_ray_error", along, 1e-6),
        at_most("busemann_lipschitz_excess", lip, 1e-6),
        at_most("busemann_above_ladder_value", closed, 1e-9),
    ];

    let e = SpdPoint::identity();
    let mut mono = 0.0f64;
    let mut semigroup = 0.0f64;
    let mut slope_err = 0.0f64;
    let mut limit_radius = 0.0f64;
    let mut limit_fixed = true;
    for case in 1u8..=3 {
        let g = GroupElement::new(isometry::normal_form(case, &isometry::random_params(rng, case))?)?;
        let f = ConvexFunctional::displacement(g);
        let desc = building::fixed_set(&g)?;
        let ys = building::sample_fixed_set(&desc, 12, rng.random())?;
        let trace = gradflow::gradient_curve(&f, &e, 10.0, 1e-2)?;
        for y in &ys {
            let ray = RaySpec::toward(e, y);
            let mut prev = f64::INFINITY;
            for p in trace.points.iter().step_by(50) {
                let b = gradflow::busemann(&ray, p)?;
                mono = mono.max(b - prev);
                prev = b;
            }
        }
        // decrease rate against −|grad|² at small τ
        let tau = 1e-4;
        let short = gradflow::gradient_curve_steps(&f, &trace.points[100], 3, tau, &Default::default())?;
        let rate = (short.values[3] - short.values[2]) / tau;
        let g2 = short.grad_norms[2].powi(2);
        slope_err = slope_err.max((rate + g2).abs() / g2);
        for tau in [1e-2, 1e-3] {
            let (t, r) = (1.0, 1.0);
            let a = gradflow::gradient_curve(&f, &e, t + r, tau)?;
            let mid = a.points[(t / tau).round() as usize];
            let b = gradflow::gradient_curve(&f, &mid, r, tau / 2.0)?;
            semigroup = semigroup.max(dist(a.last(), b.last()) / (10.0 * tau));
        }
        let long = gradflow::gradient_curve(&f, &e, 1e4, 1.0)?;
        let lim = gradflow::boundary_limit(&long)?;
        limit_fixed &= building::is_fixed(&g, &lim.point);
        let far = building::sample_fixed_set(&desc, 200, rng.random())?
            .iter()
            .map(|y| building::tits_distance(&lim.point, y))
            .fold(0.0, f64::max);
        limit_radius = limit_radius.max(far);
    }
    checks.extend([
        at_most("busemann_increase_along_flow", mono, 1e-6),
        at_most("decrease_rate_vs_minus_gnorm_sq", slope_err, 0.05),
        at_most("semigroup_deviation_over_10tau", semigroup, 1.0),
        at_least("flow_limit_fixed", limit_fixed as u8 as f64, 1.0),
        at_most("flow_limit_max_tits_distance", limit_radius, FRAC_PI_2 + 2e-3),
    ]);

    // monotone points: case 2, toward v₂ (fixed) and v₅ (not fixed)
    let g = GroupElement::new(isometry::normal_form(2, &[2.0])?)?;
    let f = ConvexFunctional::displacement(g);
    let v = building::standard_vertices();
    let to_v2 = gradflow::is_monotone_point(&f, &RaySpec::toward(e, &v[1]));
    let to_v5 = gradflow::is_monotone_point(&f, &RaySpec::toward(e, &v[4]));
    let mut others = 0usize;
    for _ in 0..20 {
        let b = random_point::<_, 3>(rng, 2.0);
        if gradflow::is_monotone_point_with(&f, &RaySpec::toward(b, &v[1]), 16.0, 1e-6) {
            others += 1;
        }
    }
    checks.extend([
        at_least("monotone_toward_v2", to_v2 as u8 as f64, 1.0),
        at_most("monotone_toward_v5", to_v5 as u8 as f64, 0.0),
        at_least("monotone_from_other_bases", others as f64, 20.0),
    ]);
    Ok(checks)
}

fn simplex(rng: &mut ChaCha8Rng, k: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut deltas = Vec::new();
    for m in 1..=4 {
        let g = cat1::simplex_geometry(m)?;
        let exact = (1.0 / ((m + 1) as f64).sqrt()).acos();
        checks.push(at_most(format!("rad_m{m}_error"), (g.rad - exact).abs(), 1e-4));
        checks.push(at_least(format!("rad_m{m}_margin_below_pi_2"), FRAC_PI_2 - g.rad, 0.0));
        deltas.push(g.delta);
    }
    let decreasing = deltas.windows(2).all(|w| w[1] < w[0]);
    checks.push(at_least("delta_strictly_decreasing", decreasing as u8 as f64, 1.0));
    // sample-level identities and brute force on random subsets
    let mut ident = f64::INFINITY;
    let mut brute = 0.0f64;
    let mut perm = 0usize;
    for trial in 0..10 {
        let m = 1 + trial % 4;
        let size = 2 + rng.random_range(0..k.max(2) - 1);
        let pts: Vec<cat1::SimplexPoint> = (0..size)
            .map(|_| {
                let w: Vec<f64> = (0..=m).map(|_| rng.random::<f64>()).collect();
                cat1::SimplexPoint::from_weights(&w)
            })
            .collect::<Result<_>>()?;
        let sample = cat1::FiniteMetricSample::from_space(&cat1::SphericalSimplex { m }, &pts);
        let c = cat1::minimax_center(&sample)?;
        let diam = cat1::diameter(&sample);
        ident = ident.min(diam - c.rad).min(2.0 * c.rad - diam);
        let bf = (0..sample.len())
            .map(|i| (0..sample.len()).map(|j| sample.dist(i, j)).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        brute = brute.max((bf - c.rad).abs());
        let mut order: Vec<usize> = (0..size).collect();
        order.reverse();
        let c2 = cat1::minimax_center(&sample.restrict(&order))?;
        let mapped: Vec<usize> = {
            let mut v: Vec<usize> = c2.centers.iter().map(|&i| order[i]).collect();
            v.sort_unstable();
            v
        };
        if c2.rad != c.rad || mapped != c.centers {
            perm += 1;
        }
    }
    checks.extend([
        at_least("rad_le_diam_le_2rad_slack", ident, 0.0),
        at_most("minimax_vs_brute_force", brute, 0.0),
        at_most("permutation_mismatches", perm as f64, 0.0),
    ]);
    Ok(checks)
}

fn suspension(rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (m, res, levels) in [(2usize, 200usize, 60usize), (3, 30, 22)] {
        let pts = cat1::suspension_grid(m, res, levels);
        let c = cat1::suspension_centers(m, &pts)?;
        let equator: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].polar == FRAC_PI_2).collect();
        let space = cat1::Suspension { base: cat1::SphericalSimplex { m: m - 1 } };
        let nearest = |i: usize, set: &[usize]| {
            set.iter().map(|&j| space.distance(&pts[i], &pts[j])).fold(f64::INFINITY, f64::min)
        };
        let off_equator = c.centers.iter().map(|&i| (pts[i].polar - FRAC_PI_2).abs()).fold(0.0, f64::max);
        let haus = c
            .centers
            .iter()
            .map(|&i| nearest(i, &equator))
            .chain(equator.iter().map(|&i| nearest(i, &c.centers)))
            .fold(0.0, f64::max);
        let bary = cat1::SuspensionPoint::new(FRAC_PI_2, cat1::SimplexPoint::barycenter(m - 1))?;
        let c2_dist = c.centers2.iter().map(|&i| space.distance(&pts[i], &bary)).fold(0.0, f64::max);
        checks.extend([
            at_least(format!("m{m}_grid_points"), pts.len() as f64, 1e4),
            at_most(format!("m{m}_rad_error"), (c.rad - FRAC_PI_2).abs(), 2e-3),
            at_most(format!("m{m}_centers_off_equator"), off_equator, 2e-3),
            at_most(format!("m{m}_centers_hausdorff_to_equator_sample"), haus, 2e-3),
            at_most(format!("m{m}_c2_size"), c.centers2.len() as f64, 1.0),
            at_most(format!("m{m}_c2_to_barycenter"), c2_dist, 2e-3),
        ]);
    }
    let space = cat1::Suspension { base: cat1::UnitSphere };
    let mut tri = f64::INFINITY;
    let rp = |rng: &mut ChaCha8Rng| -> Result<cat1::SuspensionPoint<Vec<f64>>> {
        let v: Vec<f64> = (0..3).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let polar = match rng.random_range(0..10) {
            0 => 0.0,
            1 => PI,
            _ => rng.random::<f64>() * PI,
        };
        cat1::SuspensionPoint::new(polar, cat1::UnitSphere::point(&v)?)
    };
    for _ in 0..n {
        let (x, y, z) = (rp(rng)?, rp(rng)?, rp(rng)?);
        let (a, b, c) = (space.distance(&y, &z), space.distance(&x, &z), space.distance(&x, &y));
        tri = tri.min(b + c - a).min(a + c - b).min(a + b - c);
    }
    checks.push(at_least("triangle_slack", tri, -1e-10));
    Ok(checks)
}

fn sperner(rng: &mut ChaCha8Rng, random_per: usize) -> Result<Vec<Check>> {
    let mut failures = 0usize;
    let mut runs = 0usize;
    let mut check = |t: &cat1::Triangulation, labels: &[usize]| -> Result<()> {
        runs += 1;
        let c = cat1::sperner_search(t, labels)?;
        let mut seen = vec![false; t.n + 1];
        for &l in &c.labels {
            seen[l] = true;
        }
        if !seen.iter().all(|&s| s) {
            failures += 1;
        }
        Ok(())
    };
    for n in [2usize, 3] {
        let t = cat1::Triangulation::barycentric(n, 1);
        for l in cat1::all_labelings(&t) {
            check(&t, &l)?;
        }
        for depth in 2..=3 {
            let t = cat1::Triangulation::barycentric(n, depth);
            check(&t, &cat1::nearest_vertex_labels(&t))?;
            for _ in 0..random_per {
                let l = cat1::random_labeling(&t, rng);
                check(&t, &l)?;
            }
        }
    }
    Ok(vec![
        at_most("labelings_without_full_cell", failures as f64, 0.0),
        info("labelings_checked", runs as f64),
    ])
}

fn lemmas(seed: u64, instances: usize) -> Result<Vec<Check>> {
    use cat1::LemmaKind::*;
    let r = cat1::verify_comparison_lemmas(&cat1::DEFAULT_EPS, instances, seed)?;
    let d = r.fit(Discurve);
    Ok(vec![
        at_least("comp1_slope", r.fit(Comp1).slope, 0.45),
        at_least("fulltri1_slope", r.fit(Fulltri1).slope, 0.45),
        at_least("fulltri2_slope", r.fit(Fulltri2).slope, 0.45),
        at_least("ruled_slope", r.fit(Ruled).slope, 0.20),
        info("comp2_empirical_constant", r.fit(Comp2).constant),
        at_most("discurve_worst_deviation_over_2eps", d.worst.iter().copied().fold(0.0, f64::max), 1.0 - 1e-12),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_a_validation_error() {
        assert!(matches!(run_suite("nope", 1, None), Err(Error::Validation(_))));
    }

    #[test]
    fn small_cat0_suite_passes() {
        let r = run_suite("cat0-comparison", 3, Some(50)).unwrap();
        assert!(r.passed, "{:?}", r.checks);
    }
}
