//! Model CAT(1) spaces behind a distance oracle and a geodesic-point oracle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::building::{self, BoundaryPoint};
use crate::error::{Error, Result};

/// A geodesic metric space seen through two oracles.
pub trait GeodesicSpace {
    type Point: Clone;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// The point at fraction `t ∈ [0, 1]` of a minimizing geodesic from `x`
    /// to `y`. Fails when no unique geodesic is available.
    fn geodesic_point(&self, x: &Self::Point, y: &Self::Point, t: f64) -> Result<Self::Point>;
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle between unit vectors, accurate for nearby and nearly antipodal
/// pairs.
pub(crate) fn sphere_angle(a: &[f64], b: &[f64]) -> f64 {
    let mut dm = 0.0;
    let mut dp = 0.0;
    for (x, y) in a.iter().zip(b) {
        dm += (x - y) * (x - y);
        dp += (x + y) * (x + y);
    }
    2.0 * dm.sqrt().atan2(dp.sqrt())
}

fn slerp(a: &[f64], b: &[f64], t: f64) -> Result<Vec<f64>> {
    let th = sphere_angle(a, b);
    if th == 0.0 {
        return Ok(a.to_vec());
    }
    if PI - th < 1e-12 {
        return Err(Error::Antipodal);
    }
    let s = th.sin();
    let wa = ((1.0 - t) * th).sin() / s;
    let wb = (t * th).sin() / s;
    let mut v: Vec<f64> = a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect();
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    Ok(v)
}

/// The unit sphere in any dimension; points are unit vectors.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitSphere;

impl UnitSphere {
    /// Normalizes a nonzero vector onto the sphere.
    pub fn point(v: &[f64]) -> Result<Vec<f64>> {
        let n = norm(v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(v.iter().map(|x| x / n).collect())
    }
}

impl GeodesicSpace for UnitSphere {
    type Point = Vec<f64>;

    fn distance(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        sphere_angle(x, y)
    }

    fn geodesic_point(&self, x: &Vec<f64>, y: &Vec<f64>, t: f64) -> Result<Vec<f64>> {
        slerp(x, y, t)
    }
}

/// A point of the standard spherical simplex: nonnegative unit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    /// Validates nonnegativity (to `-1e-12`) and unit norm (to `1e-12`).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::validation("simplex point needs at least one coordinate"));
        }
        if coords.iter().any(|x| !x.is_finite() || *x < -1e-12) {
            return Err(Error::validation("simplex coordinates must be nonnegative"));
        }
        if (norm(&coords) - 1.0).abs() > 1e-12 {
            return Err(Error::validation("simplex point must have unit norm"));
        }
        Ok(Self {
            coords: coords.into_iter().map(|x| x.max(0.0)).collect(),
        })
    }

    /// Radial projection of a nonzero nonnegative vector.
    pub fn from_weights(w: &[f64]) -> Result<Self> {
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::validation("weights must be nonnegative"));
        }
        Self::new(UnitSphere::point(w)?)
    }

    /// Vertex `i` of the `m`-simplex.
    pub fn vertex(m: usize, i: usize) -> Self {
        let mut c = vec![0.0; m + 1];
        c[i] = 1.0;
        Self { coords: c }
    }

    pub fn barycenter(m: usize) -> Self {
        Self {
            coords: vec![1.0 / ((m + 1) as f64).sqrt(); m + 1],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Dimension `m` of the simplex the point lives in.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }
}

/// The standard spherical simplex `△₁^m`, the nonnegative part of `S^m`.
#[derive(Debug, Clone, Copy)]
pub struct SphericalSimplex {
    pub m: usize,
}

impl GeodesicSpace for SphericalSimplex {
    type Point = SimplexPoint;

    fn distance(&self, x: &SimplexPoint, y: &SimplexPoint) -> f64 {
        sphere_angle(&x.coords, &y.coords)
    }

    fn geodesic_point(&self, x: &SimplexPoint, y: &SimplexPoint, t: f64) -> Result<SimplexPoint> {
        let v = slerp(&x.coords, &y.coords, t)?;
        Ok(SimplexPoint {
            coords: v.into_iter().map(|c| c.max(0.0)).collect(),
        })
    }
}

/// A point of a spherical suspension: polar angle and a base point (the
/// base is ignored at the poles).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuspensionPoint<P> {
    pub polar: f64,
    pub base: P,
}

impl<P> SuspensionPoint<P> {
    pub fn new(polar: f64, base: P) -> Result<Self> {
        if !(0.0..=PI).contains(&polar) {
            return Err(Error::validation(format!("polar angle {polar} outside [0, π]")));
        }
        Ok(Self { polar, base })
    }
}

/// `cos d = cos s cos t + sin s sin t cos(min(base_dist, π))`.
pub fn suspension_distance<P>(
    x: &SuspensionPoint<P>,
    y: &SuspensionPoint<P>,
    base_dist: impl Fn(&P, &P) -> f64,
) -> f64 {
    let (s, t) = (x.polar, y.polar);
    if s == 0.0 || s == PI || t == 0.0 || t == PI {
        return (s - t).abs();
    }
    let th = base_dist(&x.base, &y.base).min(PI);
    // same-meridian pairs exactly, the rest through the planar embedding
    let a = [s.sin(), 0.0, s.cos()];
    let b = [t.sin() * th.cos(), t.sin() * th.sin(), t.cos()];
    sphere_angle(&a, &b)
}

/// The spherical suspension over a CAT(1) base.
#[derive(Debug, Clone, Copy)]
pub struct Suspension<B> {
    pub base: B,
}

impl<B: GeodesicSpace> GeodesicSpace for Suspension<B> {
    type Point = SuspensionPoint<B::Point>;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        suspension_distance(x, y, |a, b| self.base.distance(a, b))
    }

    fn geodesic_point(&self, x: &Self::Point, y: &Self::Point, t: f64) -> Result<Self::Point> {
        let th = self.base.distance(&x.base, &y.base).min(PI);
        let (s, u) = (x.polar, y.polar);
        let a = [s.sin(), 0.0, s.cos()];
        let b = [u.sin() * th.cos(), u.sin() * th.sin(), u.cos()];
        let r = slerp(&a, &b, t)?;
        let polar = r[2].clamp(-1.0, 1.0).acos();
        let rho = r[0].hypot(r[1]);
        let base = if rho < 1e-15 {
            x.base.clone()
        } else if th >= PI {
            // the geodesic runs over a pole; each half keeps its meridian
            if r[0] >= 0.0 {
                x.base.clone()
            } else {
                y.base.clone()
            }
        } else if th == 0.0 {
            x.base.clone()
        } else {
            let phi = r[1].atan2(r[0]).clamp(0.0, th);
            self.base.geodesic_point(&x.base, &y.base, phi / th)?
        };
        Ok(SuspensionPoint { polar, base })
    }
}

/// The Tits boundary of the symmetric space, as a CAT(1) space.
#[derive(Debug, Clone, Copy, Default)]
pub struct TitsBoundary;

impl GeodesicSpace for TitsBoundary {
    type Point = BoundaryPoint;

    fn distance(&self, x: &BoundaryPoint, y: &BoundaryPoint) -> f64 {
        building::tits_distance(x, y)
    }

    fn geodesic_point(&self, x: &BoundaryPoint, y: &BoundaryPoint, t: f64) -> Result<BoundaryPoint> {
        building::tits_geodesic_point(x, y, t)
    }
}
