//! Comparison angles, sampled maps from spherical simplices, the cone
//! extension, and near-geodesic deviation.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use super::space::{sphere_angle, GeodesicSpace, SimplexPoint};
use crate::error::{Error, Result};

const SIDE_TOL: f64 = 1e-12;

/// Angle opposite side `a` of the spherical triangle with sides `a, b, c`
/// (half-angle formula).
pub fn comparison_angle(a: f64, b: f64, c: f64) -> Result<f64> {
    for x in [a, b, c] {
        if !x.is_finite() || !(-SIDE_TOL..=PI + SIDE_TOL).contains(&x) {
            return Err(Error::validation(format!("side {x} outside [0, π]")));
        }
    }
    if b <= 0.0 || c <= 0.0 {
        return Err(Error::validation("angle undefined at a degenerate vertex"));
    }
    if a > b + c + SIDE_TOL || b > a + c + SIDE_TOL || c > a + b + SIDE_TOL {
        return Err(Error::validation("sides violate the triangle inequality"));
    }
    let s = 0.5 * (a + b + c);
    if s > PI + SIDE_TOL {
        return Err(Error::validation("perimeter exceeds 2π"));
    }
    let num = ((s - b).sin() * (s - c).sin()).max(0.0).sqrt();
    let den = (s.sin() * (s - a).sin()).max(0.0).sqrt();
    Ok(2.0 * num.atan2(den))
}

/// A map sampled on points of `△₁^m`.
#[derive(Debug, Clone, Serialize)]
pub struct LipschitzMapSample<P> {
    pub domain: Vec<SimplexPoint>,
    pub image: Vec<P>,
}

impl<P: Clone> LipschitzMapSample<P> {
    pub fn new(domain: Vec<SimplexPoint>, image: Vec<P>) -> Result<Self> {
        if domain.is_empty() || domain.len() != image.len() {
            return Err(Error::validation("domain and image must be nonempty and of equal length"));
        }
        let m = domain[0].dim();
        if domain.iter().any(|x| x.dim() != m) {
            return Err(Error::validation("domain points from simplices of different dimension"));
        }
        Ok(Self { domain, image })
    }

    pub fn dim(&self) -> usize {
        self.domain[0].dim()
    }

    fn pair_stat<S: GeodesicSpace<Point = P>>(&self, space: &S, f: impl Fn(f64, f64) -> f64) -> f64 {
        let k = self.domain.len();
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in i + 1..k {
                let dd = sphere_angle(self.domain[i].coords(), self.domain[j].coords());
                let di = space.distance(&self.image[i], &self.image[j]);
                worst = worst.max(f(dd, di));
            }
        }
        worst
    }

    /// `max |d(φx, φy) − d(x, y)|` over sampled pairs.
    pub fn distortion<S: GeodesicSpace<Point = P>>(&self, space: &S) -> f64 {
        self.pair_stat(space, |dd, di| (di - dd).abs())
    }

    /// `max (d(φx, φy) − d(x, y))⁺` over sampled pairs.
    pub fn lipschitz_excess<S: GeodesicSpace<Point = P>>(&self, space: &S) -> f64 {
        self.pair_stat(space, |dd, di| (di - dd).max(0.0))
    }
}

/// Cones a map on `△₁^m` over a new vertex sent to `apex`.
///
/// Each sampled `x̄'` spawns the points at fractions `k/levels` of the
/// segment from the new vertex to `x̄'`; the image is the point at the same
/// fraction of the geodesic from `apex` to `φ(x̄')`. The new vertex itself is
/// the first sample. Requires the domain to contain the barycenter and
/// `d(apex, φ(b')) > π/2 − eps`.
pub fn cone_extension<S: GeodesicSpace>(
    space: &S,
    phi: &LipschitzMapSample<S::Point>,
    apex: &S::Point,
    eps: f64,
    levels: usize,
) -> Result<LipschitzMapSample<S::Point>> {
    if levels == 0 {
        return Err(Error::validation("need at least one level"));
    }
    let m = phi.dim();
    let bary = SimplexPoint::barycenter(m);
    let ib = phi
        .domain
        .iter()
        .position(|x| sphere_angle(x.coords(), bary.coords()) < 1e-9)
        .ok_or_else(|| Error::validation("domain sample must contain the barycenter"))?;
    let db = space.distance(apex, &phi.image[ib]);
    if !(db > FRAC_PI_2 - eps) {
        return Err(Error::validation(format!(
            "apex at distance {db} from the barycenter image, need > π/2 − {eps}"
        )));
    }
    let top = SimplexPoint::vertex(m + 1, m + 1);
    let mut domain = vec![top.clone()];
    let mut image = vec![apex.clone()];
    for (x, y) in phi.domain.iter().zip(&phi.image) {
        let mut c = x.coords().to_vec();
        c.push(0.0);
        let xb = SimplexPoint::new(c)?;
        for k in 1..=levels {
            let r = k as f64 / levels as f64;
            let (s, co) = (r * FRAC_PI_2).sin_cos();
            let mut w: Vec<f64> = xb.coords().iter().map(|v| s * v).collect();
            w[m + 1] = co;
            domain.push(SimplexPoint::new(w)?);
            image.push(space.geodesic_point(apex, y, r)?);
        }
    }
    LipschitzMapSample::new(domain, image)
}

/// `max_k d(x_{s_k}, c(s_k l))` for a curve sampled at equally spaced
/// parameters `s_k l`, `s_k = k/(N−1)`, where `x_s` runs along the geodesic
/// between the endpoints.
///
/// Fails unless `l < d(c(0), c(l)) + eps` and the samples are 1-Lipschitz
/// in the parameter (to `1e-9`).
pub fn near_geodesic_check<S: GeodesicSpace>(
    space: &S,
    curve: &[S::Point],
    l: f64,
    eps: f64,
) -> Result<f64> {
    let n = curve.len();
    if n < 2 {
        return Err(Error::validation("curve needs at least two samples"));
    }
    let (x0, x1) = (&curve[0], &curve[n - 1]);
    let d = space.distance(x0, x1);
    if !(l < d + eps) {
        return Err(Error::validation(format!(
            "length hypothesis fails: l = {l} ≥ d + ε = {}",
            d + eps
        )));
    }
    let h = l / (n - 1) as f64;
    for i in 0..n {
        for j in i + 1..n {
            if space.distance(&curve[i], &curve[j]) > (j - i) as f64 * h + 1e-9 {
                return Err(Error::validation(format!("curve is not 1-Lipschitz between samples {i} and {j}")));
            }
        }
    }
    let mut worst = 0.0f64;
    for (k, c) in curve.iter().enumerate() {
        let s = k as f64 / (n - 1) as f64;
        let xs = space.geodesic_point(x0, x1, s)?;
        worst = worst.max(space.distance(&xs, c));
    }
    Ok(worst)
}
