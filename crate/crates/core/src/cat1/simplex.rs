//! Grids on spherical simplices, the constants `δ_m`, and sampled
//! suspensions.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use super::minimax::{minimax_center, Centers, OracleSample};
use super::space::{sphere_angle, SimplexPoint, SphericalSimplex, Suspension, SuspensionPoint};
use crate::error::{Error, Result};

/// All compositions of `n` into `parts` nonnegative integers, in
/// lexicographic order.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(n);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=n).rev() {
            cur.push(k);
            rec(n - k, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(n, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// The radial projection of the lattice `{k/n : Σk = n}` onto `△₁^m`.
pub fn simplex_grid(m: usize, n: usize) -> Vec<SimplexPoint> {
    compositions(n, m + 1)
        .into_iter()
        .map(|c| {
            let w: Vec<f64> = c.iter().map(|&k| k as f64).collect();
            SimplexPoint::from_weights(&w).expect("nonzero lattice point")
        })
        .collect()
}

/// Largest distance from a simplex point to the nearest grid point, bounded
/// by the spherical image of a lattice cell.
fn grid_error(m: usize, n: usize) -> f64 {
    // a lattice cell has Euclidean diameter ≤ √2/n on the affine simplex,
    // whose points are at distance ≥ 1/√(m+1) from the origin
    let chord = 2f64.sqrt() / n as f64 * ((m + 1) as f64).sqrt();
    2.0 * (chord / 2.0).min(1.0).asin()
}

#[derive(Debug, Clone, Serialize)]
pub struct SimplexGeometry {
    pub m: usize,
    pub rad: f64,
    pub barycenter: SimplexPoint,
    /// `π/2 − rad`.
    pub delta: f64,
    /// Best center found (after refinement).
    pub center: SimplexPoint,
    pub grid_points: usize,
    pub grid_error: f64,
}

/// Eccentricity of `x` against the sample `targets`.
fn ecc(x: &[f64], targets: &[SimplexPoint]) -> f64 {
    targets
        .iter()
        .map(|t| sphere_angle(x, t.coords()))
        .fold(0.0, f64::max)
}

/// `rad △₁^m` by minimax over a lattice grid of `△₁^m`, refined by pattern
/// search around the best grid center. Grid resolution `n` is rounded up to
/// a multiple of `m + 1`.
pub fn simplex_geometry_with(m: usize, n: usize) -> Result<SimplexGeometry> {
    if m == 0 {
        return Err(Error::validation("simplex dimension must be at least 1"));
    }
    let n = n.max(1).div_ceil(m + 1) * (m + 1);
    let grid = simplex_grid(m, n);
    let space = SphericalSimplex { m };
    let c = minimax_center(&OracleSample { space: &space, points: &grid })?;
    let mut best = grid[c.centers2[0]].coords().to_vec();
    let mut best_val = c.rad;
    // pattern search in barycentric weights; targets stay the grid
    let mut h = 1.0 / n as f64;
    while h > 1e-9 {
        let mut improved = false;
        for i in 0..=m {
            for j in 0..=m {
                if i == j {
                    continue;
                }
                let mut w = best.clone();
                w[i] += h;
                w[j] -= h;
                if w[j] < 0.0 {
                    continue;
                }
                let cand = super::space::UnitSphere::point(&w)?;
                let v = ecc(&cand, &grid);
                if v < best_val - 1e-15 {
                    best = cand;
                    best_val = v;
                    improved = true;
                }
            }
        }
        if !improved {
            h /= 2.0;
        }
    }
    let rad = best_val.min(c.rad);
    Ok(SimplexGeometry {
        m,
        rad,
        barycenter: SimplexPoint::barycenter(m),
        delta: FRAC_PI_2 - rad,
        center: SimplexPoint::new(best)?,
        grid_points: grid.len(),
        grid_error: grid_error(m, n),
    })
}

/// [`simplex_geometry_with`] at a resolution of roughly a thousand points.
pub fn simplex_geometry(m: usize) -> Result<SimplexGeometry> {
    let n = match m {
        1 => 1000,
        2 => 45,
        3 => 16,
        _ => 10,
    };
    simplex_geometry_with(m, n)
}

/// A sampled spherical suspension over `△₁^{m−1}`: both poles plus
/// `levels − 1` interior latitudes times a base lattice grid of resolution
/// `n`. With even `levels` the equator is one of the latitudes.
pub fn suspension_grid(m: usize, n: usize, levels: usize) -> Vec<SuspensionPoint<SimplexPoint>> {
    let base = simplex_grid(m - 1, n);
    let mut pts = vec![
        SuspensionPoint { polar: 0.0, base: base[0].clone() },
        SuspensionPoint { polar: PI, base: base[0].clone() },
    ];
    for l in 1..levels {
        let t = if 2 * l == levels { FRAC_PI_2 } else { PI * l as f64 / levels as f64 };
        for b in &base {
            pts.push(SuspensionPoint { polar: t, base: b.clone() });
        }
    }
    pts
}

/// Minimax data of a sampled suspension over `△₁^{m−1}`.
pub fn suspension_centers(
    m: usize,
    points: &[SuspensionPoint<SimplexPoint>],
) -> Result<Centers> {
    if m == 0 {
        return Err(Error::validation("suspension base needs m ≥ 1"));
    }
    let space = Suspension { base: SphericalSimplex { m: m - 1 } };
    minimax_center(&OracleSample { space: &space, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_arc() {
        let g = simplex_geometry(1).unwrap();
        assert!((g.rad - PI / 4.0).abs() < 1e-12);
        assert!((g.delta - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn grid_counts() {
        assert_eq!(simplex_grid(2, 4).len(), 15);
        assert_eq!(compositions(3, 2), vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
    }
}
