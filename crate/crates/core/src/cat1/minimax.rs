//! Exact radius and centers of finite metric samples.

use serde::{Deserialize, Serialize};

use super::space::GeodesicSpace;
use crate::error::{Error, Result};

/// Tie tolerance for center membership.
pub const CENTER_TOL: f64 = 1e-9;

/// Anything with finitely many points and pairwise distances.
pub trait MetricSample {
    fn len(&self) -> usize;
    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Point ids with an explicit distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSample {
    pub ids: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl FiniteMetricSample {
    /// Validates zero diagonal, symmetry and the triangle inequality (all to
    /// `1e-9`). Distances may be `+∞`.
    pub fn new(ids: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let k = ids.len();
        if matrix.len() != k || matrix.iter().any(|r| r.len() != k) {
            return Err(Error::validation("distance matrix must be k×k for k ids"));
        }
        for i in 0..k {
            if matrix[i][i] != 0.0 {
                return Err(Error::validation(format!("nonzero diagonal at {i}")));
            }
            for j in 0..k {
                let d = matrix[i][j];
                if d.is_nan() || d < 0.0 {
                    return Err(Error::validation(format!("invalid distance at ({i},{j})")));
                }
                if (d - matrix[j][i]).abs() > 1e-9 && d != matrix[j][i] {
                    return Err(Error::validation(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    if matrix[i][l] > matrix[i][j] + matrix[j][l] + 1e-9 {
                        return Err(Error::validation(format!(
                            "triangle inequality fails for ({i},{j},{l})"
                        )));
                    }
                }
            }
        }
        Ok(Self { ids, matrix })
    }

    /// Tabulates the distances of points in a geodesic space.
    pub fn from_space<S: GeodesicSpace>(space: &S, points: &[S::Point]) -> Self {
        let k = points.len();
        let mut matrix = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let d = space.distance(&points[i], &points[j]);
                matrix[i][j] = d;
                matrix[j][i] = d;
            }
        }
        Self {
            ids: (0..k).map(|i| i.to_string()).collect(),
            matrix,
        }
    }

    /// The sub-sample on the given indices, in that order.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        Self {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            matrix: idx
                .iter()
                .map(|&i| idx.iter().map(|&j| self.matrix[i][j]).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(s).map_err(|e| Error::validation(e.to_string()))?;
        Self::new(raw.ids, raw.matrix)
    }
}

impl MetricSample for FiniteMetricSample {
    fn len(&self) -> usize {
        self.ids.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }
}

/// Points of a geodesic space, distances evaluated on demand.
pub struct OracleSample<'a, S: GeodesicSpace> {
    pub space: &'a S,
    pub points: &'a [S::Point],
}

impl<S: GeodesicSpace> MetricSample for OracleSample<'_, S> {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.space.distance(&self.points[i], &self.points[j])
        }
    }
}

struct Sub<'a, M: MetricSample + ?Sized> {
    inner: &'a M,
    idx: &'a [usize],
}

impl<M: MetricSample + ?Sized> MetricSample for Sub<'_, M> {
    fn len(&self) -> usize {
        self.idx.len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.inner.dist(self.idx[i], self.idx[j])
    }
}

/// Radius, center set `C` and the centers `C²` of `C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Centers {
    pub rad: f64,
    /// Indices whose eccentricity is within [`CENTER_TOL`] of `rad`.
    pub centers: Vec<usize>,
    /// Radius of `C` in the induced metric.
    pub rad2: f64,
    /// Indices (into the whole sample) of the centers of `C`.
    pub centers2: Vec<usize>,
}

/// Eccentricities `max_j d(i, j)`. Rows are abandoned once they exceed the
/// best value so far (plus the tie tolerance); those entries are lower
/// bounds that cannot belong to the center set.
fn eccentricities<M: MetricSample + ?Sized>(m: &M) -> Vec<f64> {
    let k = m.len();
    let mut ecc = vec![f64::NAN; k];
    let mut best = f64::INFINITY;
    // previously found farthest points are scanned first so the cutoff bites
    let mut hints: Vec<usize> = Vec::new();
    // a spread-out first pass gives a good cutoff early
    let stride = (k / 64).max(1);
    let order = (0..k).step_by(stride).chain((0..k).filter(|i| i % stride != 0));
    for i in order {
        let cutoff = best + CENTER_TOL;
        let mut e = 0.0f64;
        let mut abandoned = false;
        for &j in &hints {
            e = e.max(m.dist(i, j));
            if e > cutoff {
                abandoned = true;
                break;
            }
        }
        if !abandoned {
            let mut arg = 0;
            for j in 0..k {
                let d = m.dist(i, j);
                if d > e {
                    e = d;
                    arg = j;
                }
                if e > cutoff {
                    abandoned = true;
                    break;
                }
            }
            if !hints.contains(&arg) && hints.len() < 16 {
                hints.push(arg);
            }
        }
        ecc[i] = e;
        if !abandoned {
            best = best.min(e);
        }
    }
    ecc
}

fn argmin_set(ecc: &[f64]) -> (f64, Vec<usize>) {
    let rad = ecc.iter().copied().fold(f64::INFINITY, f64::min);
    let c = (0..ecc.len()).filter(|&i| ecc[i] <= rad + CENTER_TOL).collect();
    (rad, c)
}

/// Exact minimax solution over a finite sample:
/// `rad = min_i max_j d(i, j)`, `C` its argmin set, `C²` the centers of `C`.
pub fn minimax_center<M: MetricSample + ?Sized>(m: &M) -> Result<Centers> {
    if m.is_empty() {
        return Err(Error::validation("empty sample"));
    }
    let (rad, centers) = argmin_set(&eccentricities(m));
    let sub = Sub { inner: m, idx: &centers };
    let (rad2, c2) = argmin_set(&eccentricities(&sub));
    Ok(Centers {
        rad,
        rad2,
        centers2: c2.into_iter().map(|i| centers[i]).collect(),
        centers,
    })
}

/// Largest pairwise distance.
pub fn diameter<M: MetricSample + ?Sized>(m: &M) -> f64 {
    let k = m.len();
    let mut d = 0.0f64;
    for i in 0..k {
        for j in i + 1..k {
            d = d.max(m.dist(i, j));
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn two_antipodes() {
        let m = FiniteMetricSample::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, PI], vec![PI, 0.0]],
        )
        .unwrap();
        let c = minimax_center(&m).unwrap();
        assert_eq!(c.rad, PI);
        assert_eq!(c.centers, vec![0, 1]);
    }

    #[test]
    fn rejects_bad_matrices() {
        let ids = vec!["a".into(), "b".into(), "c".into()];
        let bad = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
        assert!(FiniteMetricSample::new(ids, bad).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = FiniteMetricSample::new(
            vec!["x".into(), "y".into()],
            vec![vec![0.0, 0.5], vec![0.5, 0.0]],
        )
        .unwrap();
        assert_eq!(FiniteMetricSample::from_json(&m.to_json()).unwrap(), m);
    }
}
