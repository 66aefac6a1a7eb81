//! Empirical deficits of the small-triangle comparison lemmas on the round
//! 2-sphere, with log-log exponent fits.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::maps::{comparison_angle, near_geodesic_check};
use super::space::{sphere_angle, GeodesicSpace, UnitSphere};
use crate::error::{Error, Result};

type P3 = [f64; 3];

/// The lemmas whose deficits are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    /// Angle at `a₀` exceeds its spherical counterpart by `O(ε^{1/2})`.
    Comp1,
    /// Opposite side falls short of its counterpart by `O(ε)`.
    Comp2,
    /// Angles at `y` stay within `O(ε^{1/2})` of `π/2`.
    Fulltri1,
    /// The whole side stays `π/2 − O(ε^{1/2})` away from `a₂`.
    Fulltri2,
    /// Proportional points keep their distance to `O(ε^{1/4})`.
    Ruled,
    /// Deviation of a short 1-Lipschitz curve from the geodesic, over `2ε`.
    Discurve,
}

impl LemmaKind {
    pub const ALL: [LemmaKind; 6] = [
        LemmaKind::Comp1,
        LemmaKind::Comp2,
        LemmaKind::Fulltri1,
        LemmaKind::Fulltri2,
        LemmaKind::Ruled,
        LemmaKind::Discurve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaKind::Comp1 => "comp1",
            LemmaKind::Comp2 => "comp2",
            LemmaKind::Fulltri1 => "fulltri1",
            LemmaKind::Fulltri2 => "fulltri2",
            LemmaKind::Ruled => "ruled",
            LemmaKind::Discurve => "discurve",
        }
    }

    /// Exponent `e` in the stated bound `O(ε^e)`; the deficit of
    /// [`LemmaKind::Discurve`] is already normalized.
    pub fn stated_exponent(self) -> f64 {
        match self {
            LemmaKind::Comp1 | LemmaKind::Fulltri1 | LemmaKind::Fulltri2 => 0.5,
            LemmaKind::Comp2 => 1.0,
            LemmaKind::Ruled => 0.25,
            LemmaKind::Discurve => 0.0,
        }
    }
}

fn sph(lat: f64, lon: f64) -> P3 {
    [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
}

fn d(a: &P3, b: &P3) -> f64 {
    sphere_angle(a, b)
}

fn slerp(a: &P3, b: &P3, t: f64) -> P3 {
    let v = UnitSphere.geodesic_point(&a.to_vec(), &b.to_vec(), t).expect("not antipodal");
    [v[0], v[1], v[2]]
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Angle at `p` between the geodesics to `q` and to `r`.
fn angle_at(p: &P3, q: &P3, r: &P3) -> f64 {
    let tangent = |x: &P3| {
        let c: f64 = (0..3).map(|i| p[i] * x[i]).sum();
        [x[0] - c * p[0], x[1] - c * p[1], x[2] - c * p[2]]
    };
    let (u, v) = (tangent(q), tangent(r));
    let dot: f64 = (0..3).map(|i| u[i] * v[i]).sum();
    let cr = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    (cr[0].hypot(cr[1]).hypot(cr[2])).atan2(dot)
}

/// Third side from two sides and the included angle.
fn third_side(b: f64, c: f64, angle: f64) -> f64 {
    // haversine form, accurate for small sides
    let h = ((b - c) / 2.0).sin().powi(2) + b.sin() * c.sin() * (angle / 2.0).sin().powi(2);
    2.0 * h.clamp(0.0, 1.0).sqrt().asin()
}

const MAX_TRIES: usize = 100_000;

/// Worst deficit among `count` random instances at `eps` (which may be 0).
pub fn lemma_deficit<R: Rng + ?Sized>(kind: LemmaKind, eps: f64, count: usize, rng: &mut R) -> Result<f64> {
    if !(0.0..=0.1).contains(&eps) {
        return Err(Error::validation(format!("ε = {eps} outside [0, 0.1]")));
    }
    let mut worst = 0.0f64;
    let mut made = 0;
    let mut tries = 0;
    while made < count {
        tries += 1;
        if tries > MAX_TRIES {
            return Err(Error::numerical(format!(
                "{}: only {made} of {count} instances satisfied the hypotheses",
                kind.name()
            )));
        }
        let v = match kind {
            LemmaKind::Comp1 => comp1(eps, rng),
            LemmaKind::Comp2 => comp2(eps, rng),
            LemmaKind::Fulltri1 => fulltri(eps, rng).map(|x| x.0),
            LemmaKind::Fulltri2 => fulltri(eps, rng).map(|x| x.1),
            LemmaKind::Ruled => ruled(eps, rng),
            LemmaKind::Discurve => discurve(eps, rng),
        };
        if let Some(v) = v {
            worst = worst.max(v);
            made += 1;
        }
    }
    Ok(worst)
}

fn small(sides: &[f64]) -> bool {
    sides.iter().all(|&s| s <= FRAC_PI_2)
}

/// Sides `b = d(a₀,a₁)`, `c = d(a₀,a₂)` log-uniform in `[√ε, π/2]`, angle
/// uniform; the primed triangle perturbs all three sides by at most `ε`.
fn comp1<R: Rng + ?Sized>(eps: f64, rng: &mut R) -> Option<f64> {
    let lo = eps.sqrt().max(1e-9);
    let b = log_uniform(rng, lo, FRAC_PI_2);
    let c = log_uniform(rng, lo, FRAC_PI_2);
    let ang = rng.random::<f64>() * PI;
    let a = third_side(b, c, ang);
    let mut pert = || eps * (2.0 * rng.random::<f64>() - 1.0);
    let (a2, b2, c2) = (a + pert(), b + pert(), c + pert());
    if !small(&[a, b, c, a2, b2, c2]) || b2 <= 0.0 || c2 <= 0.0 {
        return None;
    }
    let ang2 = comparison_angle(a2, b2, c2).ok()?;
    Some((ang - ang2).max(0.0))
}

/// Angle at `a₀` at least the primed angle minus `ε`, adjacent sides within
/// `ε`; deficit of the opposite side.
fn comp2<R: Rng + ?Sized>(eps: f64, rng: &mut R) -> Option<f64> {
    let b2 = rng.random::<f64>() * FRAC_PI_2;
    let c2 = rng.random::<f64>() * FRAC_PI_2;
    let ang2 = rng.random::<f64>() * PI;
    let mut pert = || eps * (2.0 * rng.random::<f64>() - 1.0);
    let (b, c) = (b2 + pert(), c2 + pert());
    let ang = (ang2 - eps * rng.random::<f64>()).max(0.0);
    if b <= 0.0 || c <= 0.0 {
        return None;
    }
    let (a, a2) = (third_side(b, c, ang), third_side(b2, c2, ang2));
    if !small(&[a, b, c, a2, b2, c2]) {
        return None;
    }
    Some((a2 - a).max(0.0))
}

/// `a₂` the north pole, `y` within `ε` of the equator, the side through `y`
/// in a random direction with both ends at least `√ε` from `y`. Returns the
/// angle deficit at `y` and the distance deficit of the side.
fn fulltri<R: Rng + ?Sized>(eps: f64, rng: &mut R) -> Option<(f64, f64)> {
    let lo = eps.sqrt().max(1e-9);
    let lat = eps * rng.random::<f64>();
    let y = sph(lat, 0.0);
    let s0 = log_uniform(rng, lo, FRAC_PI_2);
    let s1 = log_uniform(rng, lo, FRAC_PI_2);
    if s0 + s1 > FRAC_PI_2 {
        return None;
    }
    // steeper sides leave the hemisphere; propose only feasible slopes
    let smax = (2.0 * lat / s0.min(s1)).min(1.0);
    let sb = smax * (2.0 * rng.random::<f64>() - 1.0);
    let cb = (1.0 - sb * sb).sqrt();
    let north = [-lat.sin(), 0.0, lat.cos()];
    let w = [cb * 0.0 + sb * north[0], cb, sb * north[2]];
    let along = |t: f64| -> P3 {
        let (s, c) = t.sin_cos();
        [c * y[0] + s * w[0], c * y[1] + s * w[1], c * y[2] + s * w[2]]
    };
    let a0 = along(-s0);
    let a1 = along(s1);
    let a2 = [0.0, 0.0, 1.0];
    if !small(&[d(&a0, &a1), d(&a0, &a2), d(&a1, &a2)]) || d(&a2, &y) < FRAC_PI_2 - eps {
        return None;
    }
    let ang = (angle_at(&y, &a2, &a0) - FRAC_PI_2)
        .abs()
        .max((angle_at(&y, &a2, &a1) - FRAC_PI_2).abs());
    // highest point of the side: z(t) = y_z cos t + w_z sin t on [−s0, s1]
    let tstar = w[2].atan2(y[2]);
    let mut zmax = a0[2].max(a1[2]);
    if (-s0..=s1).contains(&tstar) {
        zmax = zmax.max(y[2].hypot(w[2]));
    }
    Some((ang, zmax.clamp(-1.0, 1.0).asin().max(0.0)))
}

/// Primed triangle: `a₂'` the pole, `a₀', a₁'` on the equator. The other
/// triangle moves all three vertices by `O(ε)` and is kept when every point
/// of `[a₀, a₁]` is farther than `π/2 − ε` from `a₂`.
fn ruled<R: Rng + ?Sized>(eps: f64, rng: &mut R) -> Option<f64> {
    let len2 = rng.random::<f64>() * FRAC_PI_2;
    let a0p = sph(0.0, 0.0);
    let a1p = sph(0.0, len2);
    let a2p = [0.0, 0.0, 1.0];
    let mut pert = || eps * (2.0 * rng.random::<f64>() - 1.0);
    let len = len2 + pert();
    let a0 = sph(pert().abs(), 0.0);
    let a1 = sph(pert().abs(), len);
    let tilt = pert().abs();
    let dir = rng.random::<f64>() * 2.0 * PI;
    let a2 = [tilt.sin() * dir.cos(), tilt.sin() * dir.sin(), tilt.cos()];
    if !small(&[d(&a0, &a1), d(&a0, &a2), d(&a1, &a2)]) || (d(&a0, &a1) - len2).abs() >= eps && eps > 0.0 {
        return None;
    }
    for k in 0..=200 {
        let x = slerp(&a0, &a1, k as f64 / 200.0);
        if d(&a2, &x) <= FRAC_PI_2 - eps && eps > 0.0 {
            return None;
        }
    }
    let r0 = rng.random::<f64>();
    let r1 = rng.random::<f64>();
    let x0 = slerp(&a2, &a0, r0);
    let x1 = slerp(&a2, &a1, r1);
    let x0p = slerp(&a2p, &a0p, r0);
    let x1p = slerp(&a2p, &a1p, r1);
    Some((d(&x0, &x1) - d(&x0p, &x1p)).abs())
}

/// A latitude bump between two equator points, traversed at constant
/// speed at most 1 with total parameter length below `d + ε`. Returns the
/// deviation divided by `2ε`.
fn discurve<R: Rng + ?Sized>(eps: f64, rng: &mut R) -> Option<f64> {
    if eps == 0.0 {
        return Some(0.0);
    }
    let dd = 0.1 + rng.random::<f64>() * (FRAC_PI_2 - 0.1);
    let bump = rng.random::<f64>() * 2.0 * (eps * dd).sqrt() / PI;
    let fine = 2000;
    let poly: Vec<P3> = (0..=fine)
        .map(|k| {
            let phi = dd * k as f64 / fine as f64;
            sph(bump * (PI * phi / dd).sin(), phi)
        })
        .collect();
    let mut cum = vec![0.0];
    for k in 1..poly.len() {
        cum.push(cum[k - 1] + d(&poly[k - 1], &poly[k]));
    }
    let arclen = cum[fine];
    if arclen >= dd + eps {
        return None;
    }
    let l = arclen + rng.random::<f64>() * (dd + eps - arclen) * 0.999;
    let n = 201;
    let curve: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            // speed arclen/l ≤ 1
            let target = arclen * k as f64 / (n - 1) as f64;
            let i = cum.partition_point(|&c| c < target).clamp(1, fine);
            let seg = cum[i] - cum[i - 1];
            let t = if seg > 0.0 { (target - cum[i - 1]) / seg } else { 0.0 };
            slerp(&poly[i - 1], &poly[i], t.clamp(0.0, 1.0)).to_vec()
        })
        .collect();
    let dev = near_geodesic_check(&UnitSphere, &curve, l, eps).ok()?;
    Some(dev / (2.0 * eps))
}

/// Worst deficits of one lemma across `ε` values, with exponent fits.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaFit {
    pub lemma: LemmaKind,
    pub eps: Vec<f64>,
    pub worst: Vec<f64>,
    /// Least-squares slope of `ln worst` on `ln ε` over all values.
    pub slope_all: f64,
    /// The same with the two largest `ε` dropped (NaN with fewer than four
    /// values).
    pub slope_tail: f64,
    /// `slope_tail` when it differs from `slope_all` by more than 0.05
    /// (the large-`ε` values are then treated as non-asymptotic), else
    /// `slope_all`.
    pub slope: f64,
    /// `max worst/ε^e` for the stated exponent `e`.
    pub constant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub instances: usize,
    pub fits: Vec<LemmaFit>,
}

impl LemmaReport {
    pub fn fit(&self, kind: LemmaKind) -> &LemmaFit {
        self.fits.iter().find(|f| f.lemma == kind).expect("every lemma is fitted")
    }

    /// CSV with columns `lemma,eps,worst`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lemma,eps,worst\n");
        for f in &self.fits {
            for (e, w) in f.eps.iter().zip(&f.worst) {
                s.push_str(&format!("{},{e:e},{w:e}\n", f.lemma.name()));
            }
        }
        s
    }
}

/// Least-squares slope of `ln y` on `ln x` over the pairs with `y > 0`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(_, &v)| v > 0.0)
        .map(|(&a, &b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs every lemma at each `ε` with `instances` random instances.
pub fn verify_comparison_lemmas(eps: &[f64], instances: usize, seed: u64) -> Result<LemmaReport> {
    if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0 && e <= 0.1)) {
        return Err(Error::validation("ε values must lie in (0, 0.1]"));
    }
    if instances == 0 {
        return Err(Error::validation("need at least one instance"));
    }
    let mut sorted = eps.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut fits = Vec::new();
    for (li, kind) in LemmaKind::ALL.into_iter().enumerate() {
        let mut worst = Vec::with_capacity(sorted.len());
        for (ei, &e) in sorted.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((li as u64) << 32) ^ ei as u64);
            worst.push(lemma_deficit(kind, e, instances, &mut rng)?);
        }
        let slope_all = loglog_slope(&sorted, &worst);
        let slope_tail = if sorted.len() >= 4 {
            loglog_slope(&sorted[2..], &worst[2..])
        } else {
            f64::NAN
        };
        let slope = if slope_tail.is_finite() && (slope_tail - slope_all).abs() > 0.05 {
            slope_tail
        } else {
            slope_all
        };
        let ex = kind.stated_exponent();
        let constant = sorted
            .iter()
            .zip(&worst)
            .map(|(e, w)| w / e.powf(ex))
            .fold(0.0, f64::max);
        fits.push(LemmaFit {
            lemma: kind,
            eps: sorted.clone(),
            worst,
            slope_all,
            slope_tail,
            slope,
            constant,
        });
    }
    Ok(LemmaReport { seed, instances, fits })
}

/// Default `ε` ladder.
pub const DEFAULT_EPS: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
