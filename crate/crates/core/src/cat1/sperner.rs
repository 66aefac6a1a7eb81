//! Barycentric subdivisions of the standard simplex with exact rational
//! vertices, and a door-following search for fully labeled cells.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Barycentric coordinates `nums / den`, reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RationalPoint {
    pub nums: Vec<u64>,
    pub den: u64,
}

impl RationalPoint {
    fn reduced(nums: Vec<u64>, den: u64) -> Self {
        let g = nums.iter().fold(den, |g, &x| gcd(g, x));
        Self {
            nums: nums.iter().map(|x| x / g).collect(),
            den: den / g,
        }
    }

    fn vertex(n: usize, i: usize) -> Self {
        let mut nums = vec![0; n + 1];
        nums[i] = 1;
        Self { nums, den: 1 }
    }

    fn barycenter(pts: &[&RationalPoint]) -> Self {
        let l = pts.iter().fold(1u64, |l, p| l / gcd(l, p.den) * p.den);
        let dim = pts[0].nums.len();
        let mut nums = vec![0u64; dim];
        for p in pts {
            let f = l / p.den;
            for (acc, x) in nums.iter_mut().zip(&p.nums) {
                *acc += x * f;
            }
        }
        Self::reduced(nums, l * pts.len() as u64)
    }

    /// Indices of the nonzero coordinates: the carrier face.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nums.len()).filter(|&i| self.nums[i] != 0).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.nums.iter().map(|&x| x as f64 / self.den as f64).collect()
    }
}

/// A triangulation of `△ⁿ` given by vertices and `(n+1)`-vertex cells.
#[derive(Debug, Clone, Serialize)]
pub struct Triangulation {
    pub n: usize,
    pub vertices: Vec<RationalPoint>,
    pub cells: Vec<Vec<usize>>,
}

impl Triangulation {
    /// The simplex itself as a single cell.
    pub fn standard(n: usize) -> Self {
        Self {
            n,
            vertices: (0..=n).map(|i| RationalPoint::vertex(n, i)).collect(),
            cells: vec![(0..=n).collect()],
        }
    }

    /// Barycentric subdivision of every cell.
    pub fn subdivide(&self) -> Self {
        let mut vertices: Vec<RationalPoint> = Vec::new();
        let mut index: HashMap<RationalPoint, usize> = HashMap::new();
        let mut intern = |p: RationalPoint, vertices: &mut Vec<RationalPoint>| -> usize {
            *index.entry(p.clone()).or_insert_with(|| {
                vertices.push(p);
                vertices.len() - 1
            })
        };
        let mut cells = Vec::new();
        for cell in &self.cells {
            for perm in permutations(cell.len()) {
                let mut new_cell = Vec::with_capacity(cell.len());
                for k in 1..=perm.len() {
                    let face: Vec<&RationalPoint> =
                        perm[..k].iter().map(|&i| &self.vertices[cell[i]]).collect();
                    new_cell.push(intern(RationalPoint::barycenter(&face), &mut vertices));
                }
                cells.push(new_cell);
            }
        }
        Self { n: self.n, vertices, cells }
    }

    /// `depth` rounds of barycentric subdivision of `△ⁿ`.
    pub fn barycentric(n: usize, depth: usize) -> Self {
        let mut t = Self::standard(n);
        for _ in 0..depth {
            t = t.subdivide();
        }
        t
    }

    /// Checks the Sperner boundary condition: every vertex carries a label
    /// from its carrier face.
    pub fn check_labels(&self, labels: &[usize]) -> Result<()> {
        if labels.len() != self.vertices.len() {
            return Err(Error::validation(format!(
                "expected {} labels, got {}",
                self.vertices.len(),
                labels.len()
            )));
        }
        for (v, &l) in self.vertices.iter().zip(labels) {
            if l > self.n || v.nums[l] == 0 {
                return Err(Error::validation(format!(
                    "label {l} at {:?}/{} is not in the carrier face",
                    v.nums, v.den
                )));
            }
        }
        Ok(())
    }

    /// Cells whose vertices carry all labels, by exhaustive scan.
    pub fn fully_labeled_cells(&self, labels: &[usize]) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&c| label_mask(&self.cells[c], labels) == full_mask(self.n))
            .collect()
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn label_mask(vs: &[usize], labels: &[usize]) -> u64 {
    vs.iter().fold(0, |m, &v| m | (1 << labels[v]))
}

fn full_mask(n: usize) -> u64 {
    (1u64 << (n + 1)) - 1
}

#[derive(Debug, Clone, Serialize)]
pub struct SpernerCell {
    pub cell: usize,
    pub vertices: Vec<usize>,
    pub labels: Vec<usize>,
    /// Cells visited by the door-following walk.
    pub steps: usize,
}

/// Finds a cell carrying all labels `0..=n`.
///
/// Doors are facets labeled exactly `0..n−1`. Walks start at the doors on
/// the face opposite vertex `n`, whose number is odd; a walk passes through
/// cells with two doors and ends either at a fully labeled cell or at
/// another boundary door, so some walk must end inside.
pub fn sperner_search(t: &Triangulation, labels: &[usize]) -> Result<SpernerCell> {
    t.check_labels(labels)?;
    let n = t.n;
    if n == 0 {
        return Ok(SpernerCell {
            cell: 0,
            vertices: t.cells[0].clone(),
            labels: vec![labels[t.cells[0][0]]],
            steps: 1,
        });
    }
    let door_mask = full_mask(n - 1);
    let mut facets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (c, cell) in t.cells.iter().enumerate() {
        for skip in 0..cell.len() {
            let mut f: Vec<usize> = cell.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            f.sort_unstable();
            facets.entry(f).or_default().push(c);
        }
    }
    let on_last_face = |f: &[usize]| f.iter().all(|&v| t.vertices[v].nums[n] == 0);
    let mut starts: Vec<&Vec<usize>> = facets
        .iter()
        .filter(|(f, cs)| cs.len() == 1 && on_last_face(f) && label_mask(f, labels) == door_mask)
        .map(|(f, _)| f)
        .collect();
    starts.sort();
    let mut used = std::collections::HashSet::new();
    let mut steps = 0;
    for start in starts {
        if used.contains(start) {
            continue;
        }
        used.insert(start.clone());
        let mut cell = facets[start][0];
        let mut came = start.clone();
        loop {
            steps += 1;
            let cv = &t.cells[cell];
            if label_mask(cv, labels) == full_mask(n) {
                return Ok(SpernerCell {
                    cell,
                    vertices: cv.clone(),
                    labels: cv.iter().map(|&v| labels[v]).collect(),
                    steps,
                });
            }
            // the other door of this cell
            let mut next = None;
            for skip in 0..cv.len() {
                let mut f: Vec<usize> = cv.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                f.sort_unstable();
                if f != came && label_mask(&f, labels) == door_mask {
                    next = Some(f);
                    break;
                }
            }
            let Some(f) = next else {
                return Err(Error::numerical("door-following walk lost its exit door"));
            };
            let nbrs = &facets[&f];
            match nbrs.iter().find(|&&c| c != cell) {
                Some(&c) => {
                    cell = c;
                    came = f;
                }
                None => {
                    used.insert(f);
                    break;
                }
            }
        }
    }
    Err(Error::numerical("no fully labeled cell reached; triangulation is not a pseudomanifold"))
}

/// Labels each vertex by its largest barycentric coordinate (lowest index
/// on ties).
pub fn nearest_vertex_labels(t: &Triangulation) -> Vec<usize> {
    t.vertices
        .iter()
        .map(|v| {
            let mut best = 0;
            for i in 1..v.nums.len() {
                if v.nums[i] > v.nums[best] {
                    best = i;
                }
            }
            best
        })
        .collect()
}

/// Every Sperner labeling of `t`, in lexicographic order. Only feasible
/// for small triangulations.
pub fn all_labelings(t: &Triangulation) -> Vec<Vec<usize>> {
    let supports: Vec<Vec<usize>> = t.vertices.iter().map(|v| v.support()).collect();
    let mut out = vec![Vec::with_capacity(supports.len())];
    for s in &supports {
        let mut next = Vec::with_capacity(out.len() * s.len());
        for l in &out {
            for &x in s {
                let mut l2: Vec<usize> = l.clone();
                l2.push(x);
                next.push(l2);
            }
        }
        out = next;
    }
    out
}

/// A uniformly random Sperner labeling.
pub fn random_labeling<R: rand::Rng + ?Sized>(t: &Triangulation, rng: &mut R) -> Vec<usize> {
    t.vertices
        .iter()
        .map(|v| {
            let s = v.support();
            s[rng.random_range(0..s.len())]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subdivision_sizes() {
        let t = Triangulation::barycentric(2, 2);
        assert_eq!(t.cells.len(), 36);
        assert_eq!(t.vertices.len(), 25);
        let t = Triangulation::barycentric(3, 1);
        assert_eq!(t.cells.len(), 24);
        assert_eq!(t.vertices.len(), 15);
    }

    #[test]
    fn trivial_triangulation() {
        let t = Triangulation::standard(2);
        let c = sperner_search(&t, &[0, 1, 2]).unwrap();
        assert_eq!(c.cell, 0);
    }

    #[test]
    fn mislabeled_corner() {
        let t = Triangulation::standard(2);
        assert!(sperner_search(&t, &[1, 1, 2]).is_err());
    }
}
