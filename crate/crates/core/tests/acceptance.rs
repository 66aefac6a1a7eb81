//! Acceptance criteria at their pinned tolerances. Prints one line per
//! criterion; exits non-zero when the set of failures differs from
//! `EXPECTED_FAILURES`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};
use std::time::Instant;

use cat0lab::building::{self, BoundaryPoint};
use cat0lab::cat1::{self, GeodesicSpace, LemmaKind, SimplexPoint, SpernerCell, Triangulation};
use cat0lab::gradflow::{self, ConvexFunctional, RaySpec};
use cat0lab::isometry::{self, GroupElement};
use cat0lab::symspace::{self, Mat3, SpdPoint, SymTangent};
use nalgebra::Vector3 as V3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that fail at their pinned tolerances; see the lemma-exponent
/// check for the counterexample families.
const EXPECTED_FAILURES: [usize; 1] = [10];

type Outcome = (bool, String);

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 12] = [
        (1, "classification", classification),
        (2, "translation lengths", translation_lengths),
        (3, "fixed sets", fixed_sets),
        (4, "radius bound realized by the flow", radfix_flow),
        (5, "CAT(0) comparison", cat0_comparison),
        (6, "first variation", first_variation),
        (7, "Busemann functions and flows", busemann_flow),
        (8, "suspension centers", suspension),
        (9, "simplex constants", simplex_constants),
        (10, "comparison lemma exponents", lemma_exponents),
        (11, "Sperner cells", sperner),
        (12, "Tits metric", tits_metric),
    ];
    let mut failed = Vec::new();
    for (id, name, f) in criteria {
        let start = Instant::now();
        let (ok, detail) = f();
        let secs = start.elapsed().as_secs_f64();
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} [{tag}] {name} ({secs:.1} s): {detail}");
        if !ok {
            failed.push(id);
        }
    }
    let expected = EXPECTED_FAILURES.to_vec();
    println!(
        "acceptance: {} of 12 pass; failing {:?}; expected failures {:?}",
        12 - failed.len(),
        failed,
        expected
    );
    if failed != expected {
        println!("acceptance: failures differ from the expected set");
        std::process::exit(1);
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn conj(h: &GroupElement, m: &Mat3) -> GroupElement {
    GroupElement::normalized(h.matrix() * m * h.inverse().matrix()).unwrap()
}

/// Affine-invariant inner product `tr(p⁻¹ u p⁻¹ v)`.
fn inner(p: &SpdPoint, u: &SymTangent, v: &SymTangent) -> f64 {
    let pi = p.matrix().try_inverse().unwrap();
    (pi * u.matrix() * pi * v.matrix()).trace()
}

fn oracle_angle(p: &SpdPoint, u: &SymTangent, v: &SymTangent) -> f64 {
    let c = inner(p, u, v) / (inner(p, u, u) * inner(p, v, v)).sqrt();
    c.clamp(-1.0, 1.0).acos()
}

/// Euclidean comparison angle opposite side `a`.
fn euclid_angle(a: f64, b: f64, c: f64) -> f64 {
    ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0).acos()
}

/// `min_i max_j d(i, j)` by brute force.
fn brute_radius(d: &dyn Fn(usize, usize) -> f64, n: usize) -> f64 {
    (0..n)
        .map(|i| (0..n).map(|j| d(i, j)).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

fn classification() -> Outcome {
    let mut r = rng(1);
    let start = Instant::now();
    let mut wrong = 0;
    let mut worst = 0.0f64;
    for case in 1u8..=7 {
        for _ in 0..200 {
            let params = isometry::random_params(&mut r, case);
            let h = isometry::random_conjugator(&mut r, 1.5);
            let g = conj(&h, &isometry::normal_form(case, &params).unwrap());
            let j = isometry::real_jordan(&g).unwrap();
            if j.case_id != case {
                wrong += 1;
                continue;
            }
            for (a, b) in j.params.iter().zip(&params) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        wrong == 0 && worst <= 1e-6 && secs < 5.0,
        format!("1400 conjugates, {wrong} misclassified, worst parameter error {worst:.1e}, {secs:.3} s"),
    )
}

fn translation_lengths() -> Outcome {
    let ln2 = 2f64.ln();
    let mut r = rng(2);
    let mut ok = true;
    let mut parts = Vec::new();
    let (a4, b4) = (2.0 * 0.7f64.cos(), 2.0 * 0.7f64.sin());
    let semisimple: [(&str, Mat3, f64, f64); 3] = [
        ("case 5", isometry::normal_form(5, &[2.0, 1.0, 0.5]).unwrap(), 2.0 * 2f64.sqrt() * ln2, 0.01),
        ("case 2", isometry::normal_form(2, &[2.0]).unwrap(), 2.0 * 6f64.sqrt() * ln2, 0.02),
        ("case 4", isometry::normal_form(4, &[a4, b4]).unwrap(), 6f64.sqrt() * 4f64.ln(), 0.01),
    ];
    for (name, m, exact, rel) in semisimple {
        for conjugated in [false, true] {
            let g = if conjugated {
                conj(&isometry::random_conjugator(&mut r, 0.7), &m)
            } else {
                GroupElement::new(m).unwrap()
            };
            let start = Instant::now();
            let (est, _) = isometry::translation_length_numeric(&g, 2000, 0.1).unwrap();
            let secs = start.elapsed().as_secs_f64();
            let gap = (est - exact).abs() / exact;
            ok &= gap <= rel && secs < 60.0;
            parts.push(format!("{name}{} rel gap {gap:.1e}", if conjugated { " conj" } else { "" }));
        }
    }
    for case in [1u8, 3] {
        let g = GroupElement::new(isometry::normal_form(case, &[]).unwrap()).unwrap();
        let start = Instant::now();
        let (est, _) = isometry::translation_length_numeric(&g, 10_000, 0.1).unwrap();
        let secs = start.elapsed().as_secs_f64();
        ok &= est < 1e-2 && secs < 60.0;
        parts.push(format!("case {case} estimate {est:.2e} ({secs:.1} s)"));
    }
    (ok, parts.join(", "))
}

/// Fixed-set samples, their perturbations and random boundary points.
fn membership_points(r: &mut ChaCha8Rng, desc: &building::FixedSetDescription, n: usize) -> Vec<BoundaryPoint> {
    let inside = building::sample_fixed_set(desc, n / 2, r.random()).unwrap();
    let mut pts = inside.clone();
    for x in inside.iter().take(n / 4) {
        let s = 1e-3;
        let mut m = Mat3::identity();
        for v in m.iter_mut() {
            *v += s * (r.random::<f64>() * 2.0 - 1.0);
        }
        pts.push(x.image(&m));
    }
    while pts.len() < n {
        pts.push(building::random_boundary_point(r));
    }
    pts
}

fn sampled_radius(desc: &building::FixedSetDescription, n: usize, seed: u64) -> f64 {
    let pts = building::sample_fixed_set(desc, n, seed).unwrap();
    let d = |i: usize, j: usize| building::tits_distance(&pts[i], &pts[j]);
    brute_radius(&d, pts.len())
}

fn fixed_sets() -> Outcome {
    let mut r = rng(3);
    let mut disagree = 0;
    let mut parts = Vec::new();
    let mut ok = true;
    for case in 1u8..=7 {
        let params = isometry::random_params(&mut r, case);
        let g = conj(&isometry::random_conjugator(&mut r, 1.0), &isometry::normal_form(case, &params).unwrap());
        let desc = building::fixed_set(&g).unwrap();
        for x in membership_points(&mut r, &desc, 1000) {
            if desc.contains(&x) != building::is_fixed(&g, &x) {
                disagree += 1;
            }
        }
        let target = match case {
            1 | 2 => Some((FRAC_PI_2, 2e-3)),
            3 => Some((FRAC_PI_6, 1e-6)),
            4 => Some((PI, 1e-9)),
            _ => None,
        };
        if let Some((t, tol)) = target {
            let rad = sampled_radius(&desc, 200, r.random());
            ok &= (rad - t).abs() <= tol;
            parts.push(format!("case {case} rad {rad:.9}"));
        }
    }
    ok &= disagree == 0;
    (ok, format!("{disagree} disagreements over 7000 points; {}", parts.join(", ")))
}

fn radfix_flow() -> Outcome {
    let mut r = rng(4);
    let mut ok = true;
    let mut parts = Vec::new();
    for case in 1u8..=3 {
        let params = isometry::random_params(&mut r, case);
        let g = GroupElement::new(isometry::normal_form(case, &params).unwrap()).unwrap();
        let f = ConvexFunctional::displacement(g);
        let trace =
            gradflow::gradient_curve_steps(&f, &SpdPoint::identity(), 10_000, 1.0, &Default::default()).unwrap();
        let lim = match gradflow::boundary_limit(&trace) {
            Ok(l) => l,
            Err(e) => {
                ok = false;
                parts.push(format!("case {case}: {e}"));
                continue;
            }
        };
        let fixed = building::is_fixed(&g, &lim.point);
        let desc = building::fixed_set(&g).unwrap();
        let far = building::sample_fixed_set(&desc, 500, r.random())
            .unwrap()
            .iter()
            .map(|y| building::tits_distance(&lim.point, y))
            .fold(0.0, f64::max);
        ok &= fixed && far <= FRAC_PI_2 + 2e-3;
        parts.push(format!("case {case} fixed {fixed}, max Td {far:.6}"));
    }
    (ok, parts.join(", "))
}

fn cat0_comparison() -> Outcome {
    use symspace::{dist, geodesic, log_at, random_point};
    let mut r = rng(5);
    let mut slack = f64::INFINITY;
    let mut angle_slack = f64::INFINITY;
    for _ in 0..10_000 {
        let p: SpdPoint = random_point(&mut r, 3.0);
        let q: SpdPoint = random_point(&mut r, 3.0);
        let s: SpdPoint = random_point(&mut r, 3.0);
        let (a, b, c) = (dist(&q, &s), dist(&p, &s), dist(&p, &q));
        // comparison triangle p̄ = 0, q̄ = (c, 0), s̄ at angle from the law of cosines
        let alpha = euclid_angle(a, b, c);
        let (qb, sb) = ((c, 0.0), (b * alpha.cos(), b * alpha.sin()));
        let mid = |x: (f64, f64), y: (f64, f64)| ((x.0 + y.0) / 2.0, (x.1 + y.1) / 2.0);
        let e = |x: (f64, f64), y: (f64, f64)| ((x.0 - y.0).powi(2) + (x.1 - y.1).powi(2)).sqrt();
        let (mpq, mps, mqs) = (geodesic(&p, &q, 0.5), geodesic(&p, &s, 0.5), geodesic(&q, &s, 0.5));
        let (bpq, bps, bqs) = (mid((0.0, 0.0), qb), mid((0.0, 0.0), sb), mid(qb, sb));
        slack = slack
            .min(e(bpq, bps) - dist(&mpq, &mps))
            .min(e(bpq, bqs) - dist(&mpq, &mqs))
            .min(e(bps, bqs) - dist(&mps, &mqs));
        if b > 1e-9 && c > 1e-9 {
            let ang = oracle_angle(&p, &log_at(&p, &q), &log_at(&p, &s));
            angle_slack = angle_slack.min(alpha - ang);
        }
    }
    (
        slack >= -1e-9 && angle_slack >= -1e-9,
        format!("10⁴ triangles, midpoint slack {slack:.2e}, angle slack {angle_slack:.2e}"),
    )
}

fn first_variation() -> Outcome {
    use gradflow::{directional_derivative, random_unit_tangent, steepest_direction};
    let mut r = rng(6);
    let mut eq = 0.0f64;
    let mut n = 0;
    while n < 1000 {
        let p: SpdPoint = symspace::random_point(&mut r, 2.0);
        let v = random_unit_tangent(&mut r, &p);
        let (f, foot) = if n % 2 == 0 {
            let q: SpdPoint = symspace::random_point(&mut r, 2.0);
            (ConvexFunctional::dist_to_point(q), q)
        } else {
            let (foot, _) = gradflow::project_to_flat(&p).unwrap();
            (ConvexFunctional::dist_to_flat(), foot)
        };
        if symspace::dist(&p, &foot) < 0.05 {
            continue;
        }
        n += 1;
        let d = directional_derivative(&f, &p, &v).unwrap();
        let a = oracle_angle(&p, &v, &symspace::log_at(&p, &foot));
        eq = eq.max((d + a.cos()).abs());
    }
    let mut slack = f64::INFINITY;
    for k in 0..50 {
        let case = [1u8, 2, 3][k % 3];
        let params = isometry::random_params(&mut r, case);
        let g = conj(&isometry::random_conjugator(&mut r, 0.5), &isometry::normal_form(case, &params).unwrap());
        let f = ConvexFunctional::displacement(g);
        let p: SpdPoint = symspace::random_point(&mut r, 2.0);
        let (u, gnorm) = steepest_direction(&f, &p, 512).unwrap();
        for _ in 0..20 {
            let v = random_unit_tangent(&mut r, &p);
            let d = directional_derivative(&f, &p, &v).unwrap();
            slack = slack.min(d + gnorm * oracle_angle(&p, &u, &v).cos());
        }
    }
    (
        eq <= 1e-4 && slack >= -1e-4,
        format!("equality error {eq:.2e} on 1000 samples, inequality slack {slack:.2e} on 1000 samples"),
    )
}

fn busemann_flow() -> Outcome {
    use symspace::{dist, random_point};
    let mut r = rng(7);
    let (mut along, mut lip) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..500 {
        let base: SpdPoint = random_point(&mut r, 2.0);
        let ray = RaySpec::new(base, gradflow::random_unit_tangent(&mut r, &base)).unwrap();
        let s = r.random::<f64>() * 6.0;
        along = along.max((gradflow::busemann(&ray, &ray.point(s)).unwrap() + s).abs());
        let p: SpdPoint = random_point(&mut r, 2.5);
        let q: SpdPoint = random_point(&mut r, 2.5);
        let diff = gradflow::busemann(&ray, &p).unwrap() - gradflow::busemann(&ray, &q).unwrap();
        lip = lip.max(diff.abs() - dist(&p, &q));
    }
    let e = SpdPoint::identity();
    let mut rise = f64::NEG_INFINITY;
    let mut semi = 0.0f64;
    for case in 1u8..=3 {
        let params = isometry::random_params(&mut r, case);
        let g = GroupElement::new(isometry::normal_form(case, &params).unwrap()).unwrap();
        let f = ConvexFunctional::displacement(g);
        let trace = gradflow::gradient_curve(&f, &e, 5.0, 1e-2).unwrap();
        let desc = building::fixed_set(&g).unwrap();
        for y in building::sample_fixed_set(&desc, 8, r.random()).unwrap() {
            let ray = RaySpec::toward(e, &y);
            let b: Vec<f64> = trace.points.iter().map(|p| gradflow::busemann(&ray, p).unwrap()).collect();
            for w in b.windows(2) {
                rise = rise.max(w[1] - w[0]);
            }
        }
        for tau in [1e-2, 1e-3] {
            let (t, rr) = (1.0, 1.0);
            let whole = gradflow::gradient_curve(&f, &e, t + rr, tau).unwrap();
            let mid = whole.points[(t / tau).round() as usize];
            let restart = gradflow::gradient_curve(&f, &mid, rr, tau / 2.0).unwrap();
            semi = semi.max(dist(whole.last(), restart.last()) / (10.0 * tau));
        }
    }
    (
        along <= 1e-6 && lip <= 1e-6 && rise <= 1e-6 && semi <= 1.0,
        format!(
            "along-ray {along:.1e}, Lipschitz excess {lip:.1e}, max rise per step {rise:.1e}, semigroup deviation/(10τ) {semi:.2e}"
        ),
    )
}

fn suspension() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, n, levels) in [(2usize, 800usize, 14usize), (3, 30, 22)] {
        let pts = cat1::suspension_grid(m, n, levels);
        let c = cat1::suspension_centers(m, &pts).unwrap();
        let space = cat1::Suspension { base: cat1::SphericalSimplex { m: m - 1 } };
        let d = |i: usize, j: usize| space.distance(&pts[i], &pts[j]);
        let brute = if m == 2 { Some(brute_radius(&d, pts.len())) } else { None };
        // distance to the equator is |θ − π/2|
        let off = c.centers.iter().map(|&i| (pts[i].polar - FRAC_PI_2).abs()).fold(0.0, f64::max);
        let equator: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].polar == FRAC_PI_2).collect();
        let back = if m == 2 {
            // the whole equatorial arc: every point of it against the centers
            (0..=4000)
                .map(|k| {
                    let s = k as f64 / 4000.0 * FRAC_PI_2;
                    let x = cat1::SuspensionPoint::new(FRAC_PI_2, SimplexPoint::new(vec![s.cos(), s.sin()]).unwrap())
                        .unwrap();
                    c.centers.iter().map(|&i| space.distance(&x, &pts[i])).fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        } else {
            equator
                .iter()
                .map(|&i| c.centers.iter().map(|&j| d(i, j)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let bary = cat1::SuspensionPoint::new(FRAC_PI_2, SimplexPoint::barycenter(m - 1)).unwrap();
        let c2 = c.centers2.iter().map(|&i| space.distance(&pts[i], &bary)).fold(0.0, f64::max);
        ok &= pts.len() >= 10_000
            && (c.rad - FRAC_PI_2).abs() <= 2e-3
            && brute.is_none_or(|b| b == c.rad)
            && off.max(back) <= 2e-3
            && c.centers2.len() == 1
            && c2 <= 2e-3;
        parts.push(format!(
            "m={m}: {} points, rad {:.6}, Hausdorff {:.1e}{}, |C²| {}, C² to barycenter {c2:.1e}",
            pts.len(),
            c.rad,
            off.max(back),
            if m == 3 { " (equator sample)" } else { "" },
            c.centers2.len()
        ));
    }
    (ok, parts.join("; "))
}

fn simplex_constants() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut deltas = Vec::new();
    for m in 1..=4usize {
        let g = cat1::simplex_geometry(m).unwrap();
        let exact = (1.0 / ((m + 1) as f64).sqrt()).acos();
        ok &= (g.rad - exact).abs() <= 1e-4;
        deltas.push(g.delta);
        parts.push(format!("m={m} rad {:.8} vs {exact:.8}", g.rad));
    }
    // oracle for the minimax solver: brute force on a coarse grid
    let grid = cat1::simplex_grid(2, 12);
    let space = cat1::SphericalSimplex { m: 2 };
    let sample = cat1::FiniteMetricSample::from_space(&space, &grid);
    let d = |i: usize, j: usize| space.distance(&grid[i], &grid[j]);
    ok &= cat1::minimax_center(&sample).unwrap().rad == brute_radius(&d, grid.len());
    let decreasing = deltas.windows(2).all(|w| w[1] < w[0]);
    ok &= decreasing;
    (ok, format!("{}, δ strictly decreasing {decreasing}", parts.join(", ")))
}

fn lemma_exponents() -> Outcome {
    let report = cat1::verify_comparison_lemmas(&cat1::DEFAULT_EPS, 2000, 10).unwrap();
    let slope = |k: LemmaKind| report.fit(k).slope;
    let (c1, c2, f1, f2, ru) = (
        slope(LemmaKind::Comp1),
        slope(LemmaKind::Comp2),
        slope(LemmaKind::Fulltri1),
        slope(LemmaKind::Fulltri2),
        slope(LemmaKind::Ruled),
    );
    let disc = report.fit(LemmaKind::Discurve).worst.iter().copied().fold(0.0, f64::max);
    let ok = c1 >= 0.45 && c2 >= 0.45 && f1 >= 0.45 && f2 >= 0.45 && ru >= 0.20 && disc < 1.0;
    (
        ok,
        format!(
            "slopes comp1 {c1:.3}, comp2 {c2:.3}, fulltri1 {f1:.3}, fulltri2 {f2:.3}, ruled {ru:.3}; \
             discurve worst d(x_s, c(sl))/(2ε) = {disc:.1} (bound needs < 1)"
        ),
    )
}

fn sperner_ok(t: &Triangulation, labels: &[usize]) -> bool {
    let found: SpernerCell = match cat1::sperner_search(t, labels) {
        Ok(c) => c,
        Err(_) => return false,
    };
    let mut seen = vec![false; t.n + 1];
    for &v in &t.cells[found.cell] {
        seen[labels[v]] = true;
    }
    let all = t.fully_labeled_cells(labels);
    seen.iter().all(|&s| s) && all.contains(&found.cell) && all.len() % 2 == 1
}

fn sperner() -> Outcome {
    let start = Instant::now();
    let mut r = rng(11);
    let (mut runs, mut bad) = (0usize, 0usize);
    for n in [2usize, 3] {
        let t = Triangulation::barycentric(n, 1);
        for l in cat1::all_labelings(&t) {
            runs += 1;
            bad += usize::from(!sperner_ok(&t, &l));
        }
        for depth in 2..=3 {
            let t = Triangulation::barycentric(n, depth);
            let mut labelings = vec![cat1::nearest_vertex_labels(&t)];
            labelings.extend((0..40).map(|_| cat1::random_labeling(&t, &mut r)));
            for l in labelings {
                runs += 1;
                bad += usize::from(!sperner_ok(&t, &l));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (bad == 0 && secs < 30.0, format!("{runs} labelings, {bad} without a verified fully labeled cell, {secs:.1} s"))
}

fn tits_metric() -> Outcome {
    let v = building::standard_vertices();
    let mut hex = 0.0f64;
    for k in 0..6 {
        hex = hex
            .max((building::tits_distance(&v[k], &v[(k + 1) % 6]) - FRAC_PI_3).abs())
            .max((building::tits_distance(&v[k], &v[(k + 3) % 6]) - PI).abs());
    }
    let mut r = rng(12);
    let mut slack = f64::INFINITY;
    let mut axioms = 0.0f64;
    for k in 0..1000 {
        // a third of the triples share an apartment, a third have two points in one
        let mut vec3 = || V3::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5, r.random::<f64>() - 0.5);
        let frame = building::Frame::new(vec3(), vec3(), vec3()).unwrap();
        let mut pick = |shared: bool| {
            if shared {
                frame.point_at(r.random::<f64>() * 2.0 * PI)
            } else {
                building::random_boundary_point(&mut r)
            }
        };
        let (x, y, z) = (pick(k % 3 != 0), pick(k % 3 != 0), pick(k % 3 == 1));
        let d = building::tits_distance;
        let (xy, yz, xz) = (d(&x, &y), d(&y, &z), d(&x, &z));
        slack = slack.min(xy + yz - xz).min(xy + xz - yz).min(xz + yz - xy);
        axioms = axioms.max((xy - d(&y, &x)).abs()).max(d(&x, &x));
        if xy < 0.0 || xy > PI + 1e-12 {
            axioms = f64::INFINITY;
        }
    }
    (
        hex <= 1e-12 && slack >= -1e-12 && axioms <= 1e-12,
        format!("hexagon error {hex:.1e}, triangle slack {slack:.2e}, symmetry/identity error {axioms:.1e}"),
    )
}
