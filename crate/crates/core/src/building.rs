//! The ideal boundary of SL(3,R)/SO(3) as the spherical building of flags
//! in R³.
//!
//! A boundary point is a flag `L ⊂ P` together with an arc parameter
//! `θ ∈ [0, π/3]` measured from the line vertex. Apartments are frames of
//! three independent lines; the six coordinate subspaces of a frame form a
//! hexagon with edges of length π/3.

use std::f64::consts::{FRAC_PI_3, PI};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::isometry::{self, GroupElement, JordanClass};
use crate::symspace::{self, lower_inverse, Mat3, SpdPoint, SymTangent};

type V3 = Vector3<f64>;

/// Default angular tolerance for comparing subspaces.
pub const SUBSPACE_TOL: f64 = 1e-9;
/// Incidence tolerance accepted by [`Flag::new`].
pub const INCIDENCE_TOL: f64 = 1e-10;
/// Relative tolerance of the invariant-subspace test in [`is_fixed`].
pub const FIX_TOL: f64 = 1e-9;
/// Tolerance used by fixed-set membership predicates.
pub const MEMBER_TOL: f64 = 1e-8;

const VERTEX_EPS: f64 = 1e-12;

fn canonical_sign(mut v: V3) -> V3 {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v = -v;
        }
    }
    v
}

/// Sine of the angle between two unit vectors.
fn sin_between(a: &V3, b: &V3) -> f64 {
    a.cross(b).norm()
}

/// A line or a plane through the origin of R³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subspace {
    dim: u8,
    /// Line: unit direction. Plane: unit normal.
    v: V3,
}

impl Subspace {
    pub fn line(v: V3) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::validation("line spanned by a zero vector"));
        }
        Ok(Self {
            dim: 1,
            v: canonical_sign(v / n),
        })
    }

    pub fn plane(a: V3, b: V3) -> Result<Self> {
        let n = a.cross(&b);
        if !(n.norm() > 1e-14 * a.norm() * b.norm()) {
            return Err(Error::validation("plane spanned by dependent vectors"));
        }
        Self::plane_from_normal(n)
    }

    pub fn plane_from_normal(n: V3) -> Result<Self> {
        let l = n.norm();
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::validation("zero plane normal"));
        }
        Ok(Self {
            dim: 2,
            v: canonical_sign(n / l),
        })
    }

    pub fn coordinate_line(i: usize) -> Self {
        Self {
            dim: 1,
            v: V3::ith(i, 1.0),
        }
    }

    /// Plane spanned by two standard basis vectors.
    pub fn coordinate_plane(i: usize, j: usize) -> Self {
        let k = 3 - i - j;
        Self {
            dim: 2,
            v: V3::ith(k, 1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn is_line(&self) -> bool {
        self.dim == 1
    }

    /// Line direction or plane normal.
    pub fn vector(&self) -> V3 {
        self.v
    }

    /// Orthonormal basis: one column for a line, two for a plane.
    pub fn basis(&self) -> Vec<V3> {
        if self.dim == 1 {
            return vec![self.v];
        }
        let n = self.v;
        let a = (0..3)
            .map(|i| {
                let e = V3::ith(i, 1.0);
                e - n * n.dot(&e)
            })
            .fold(V3::zeros(), |best, r| if r.norm() > best.norm() + 1e-12 { r } else { best })
            .normalize();
        let a = canonical_sign(a);
        vec![a, n.cross(&a)]
    }

    pub fn projector(&self) -> Mat3 {
        if self.dim == 1 {
            self.v * self.v.transpose()
        } else {
            Mat3::identity() - self.v * self.v.transpose()
        }
    }

    /// Distance of the unit vector `u` from the subspace.
    pub fn residual(&self, u: &V3) -> f64 {
        let u = u.normalize();
        if self.dim == 1 {
            sin_between(&self.v, &u)
        } else {
            self.v.dot(&u).abs()
        }
    }

    /// Gap between two subspaces of equal dimension (sine of the largest
    /// principal angle).
    pub fn gap(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return 1.0;
        }
        sin_between(&self.v, &other.v)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.gap(other) <= tol
    }

    /// Line `self` contained in plane `p` up to `tol`.
    pub fn line_in_plane(&self, p: &Self, tol: f64) -> bool {
        self.dim == 1 && p.dim == 2 && self.v.dot(&p.v).abs() <= tol
    }

    /// Image `g(self)`.
    pub fn image(&self, g: &Mat3) -> Self {
        if self.dim == 1 {
            Self {
                dim: 1,
                v: canonical_sign((g * self.v).normalize()),
            }
        } else {
            let git = g.try_inverse().expect("invertible").transpose();
            Self {
                dim: 2,
                v: canonical_sign((git * self.v).normalize()),
            }
        }
    }

    /// `‖(I − BBᵀ) g B‖` for an orthonormal basis `B`.
    pub fn invariance_residual(&self, g: &Mat3) -> f64 {
        let pr = Mat3::identity() - self.projector();
        self.basis()
            .iter()
            .map(|b| (pr * (g * b)).norm_squared())
            .sum::<f64>()
            .sqrt()
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Subspace", 2)?;
        st.serialize_field("dimension", &self.dim)?;
        let b: Vec<[f64; 3]> = self.basis().iter().map(|v| [v[0], v[1], v[2]]).collect();
        st.serialize_field("basis", &b)?;
        st.end()
    }
}

/// A full flag `line ⊂ plane`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flag {
    pub line: Subspace,
    pub plane: Subspace,
}

impl Flag {
    pub fn new(line: Subspace, plane: Subspace) -> Result<Self> {
        if line.dim != 1 || plane.dim != 2 {
            return Err(Error::validation("a flag needs a line and a plane"));
        }
        if !line.line_in_plane(&plane, INCIDENCE_TOL) {
            return Err(Error::validation(format!(
                "line is not contained in the plane (residual {:.3e})",
                line.v.dot(&plane.v).abs()
            )));
        }
        Ok(Self { line, plane })
    }

    /// Flag from orthonormal `o1` (line) and `o2` (completing the plane).
    fn from_pair(o1: V3, o2: V3) -> Self {
        let line = Subspace::line(o1).expect("nonzero");
        let n = o1.cross(&o2);
        Self {
            line,
            plane: Subspace::plane_from_normal(n).expect("independent"),
        }
    }

    pub fn standard() -> Self {
        Self {
            line: Subspace::coordinate_line(0),
            plane: Subspace::coordinate_plane(0, 1),
        }
    }

    pub fn image(&self, g: &Mat3) -> Self {
        Self {
            line: self.line.image(g),
            plane: self.plane.image(g),
        }
    }

    /// Orthonormal frame adapted to the flag: line, its orthogonal complement
    /// inside the plane, plane normal.
    pub fn adapted_frame(&self) -> Mat3 {
        let o1 = self.line.v;
        let o3 = self.plane.v;
        let o2 = o3.cross(&o1).normalize();
        Mat3::from_columns(&[o1, o2, o3])
    }
}

fn complete_line(line: &Subspace) -> Flag {
    let l = line.v;
    let (_, r) = (0..3)
        .map(|i| {
            let e = V3::ith(i, 1.0);
            (i, e - l * l.dot(&e))
        })
        .fold((0, V3::zeros()), |best, c| if c.1.norm() > best.1.norm() + 1e-12 { c } else { best });
    Flag::from_pair(l, r.normalize())
}

fn complete_plane(plane: &Subspace) -> Flag {
    let b = plane.basis();
    Flag {
        line: Subspace::line(b[0]).expect("unit"),
        plane: *plane,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Line,
    Plane,
    Interior,
}

/// A point of the Tits boundary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryPoint {
    pub flag: Flag,
    pub theta: f64,
}

impl BoundaryPoint {
    pub fn new(flag: Flag, theta: f64) -> Result<Self> {
        if !(-1e-12..=FRAC_PI_3 + 1e-12).contains(&theta) {
            return Err(Error::validation(format!("θ = {theta} outside [0, π/3]")));
        }
        Ok(Self {
            flag,
            theta: theta.clamp(0.0, FRAC_PI_3),
        })
    }

    /// The vertex of a line, with a canonical completing plane.
    pub fn line_vertex(line: Subspace) -> Self {
        Self {
            flag: complete_line(&line),
            theta: 0.0,
        }
    }

    /// The vertex of a plane, with a canonical completing line.
    pub fn plane_vertex(plane: Subspace) -> Self {
        Self {
            flag: complete_plane(&plane),
            theta: FRAC_PI_3,
        }
    }

    pub fn kind(&self) -> VertexKind {
        if self.theta <= VERTEX_EPS {
            VertexKind::Line
        } else if self.theta >= FRAC_PI_3 - VERTEX_EPS {
            VertexKind::Plane
        } else {
            VertexKind::Interior
        }
    }

    /// Equality ignoring the completing subspace of vertices.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match (self.kind(), other.kind()) {
            (VertexKind::Line, VertexKind::Line) => self.flag.line.approx_eq(&other.flag.line, tol),
            (VertexKind::Plane, VertexKind::Plane) => {
                self.flag.plane.approx_eq(&other.flag.plane, tol)
            }
            (VertexKind::Interior, VertexKind::Interior) => {
                (self.theta - other.theta).abs() <= tol
                    && self.flag.line.approx_eq(&other.flag.line, tol)
                    && self.flag.plane.approx_eq(&other.flag.plane, tol)
            }
            _ => false,
        }
    }

    /// `g·x = (gL ⊂ gP, θ)`.
    pub fn image(&self, g: &Mat3) -> Self {
        Self {
            flag: self.flag.image(g),
            theta: self.theta,
        }
    }
}

/// `u(α) = cos α·E₁ + sin α·E₂` on the unit circle of trace-0 diagonals,
/// with `E₁ = (2,−1,−1)/√6` and `E₂ = (0,1,−1)/√2`.
pub fn u_of_angle(alpha: f64) -> [f64; 3] {
    let s6 = 6f64.sqrt();
    let s2 = 2f64.sqrt();
    let (s, c) = alpha.sin_cos();
    [2.0 * c / s6, -c / s6 + s / s2, -c / s6 - s / s2]
}

fn angle_of_u(u: &[f64; 3]) -> f64 {
    let s6 = 6f64.sqrt();
    let s2 = 2f64.sqrt();
    let x = (2.0 * u[0] - u[1] - u[2]) / s6;
    let y = (u[1] - u[2]) / s2;
    y.atan2(x)
}

/// Unit tangent at the identity pointing at `x`.
pub fn direction_at_identity(x: &BoundaryPoint) -> SymTangent {
    let o = x.flag.adapted_frame();
    let u = u_of_angle(x.theta);
    let d = Mat3::from_diagonal(&V3::new(u[0], u[1], u[2]));
    SymTangent::new(o * d * o.transpose()).expect("symmetric")
}

/// Boundary point of the ray `t ↦ exp(t u)`.
pub fn from_direction_at_identity(u: &SymTangent) -> Result<BoundaryPoint> {
    let u = u.project_traceless();
    let n = u.norm();
    if !(n > 0.0) {
        return Err(Error::ZeroVector);
    }
    let e = symspace::sym_eig(&(u.matrix() / n))?;
    let vals = [e.values[0], e.values[1], e.values[2]];
    let theta = angle_of_u(&vals).clamp(0.0, FRAC_PI_3);
    let o1 = e.frame.column(0).into_owned();
    let o2 = e.frame.column(1).into_owned();
    BoundaryPoint::new(Flag::from_pair(o1, o2), theta)
}

/// Unit tangent at `base` of the ray from `base` toward `x`.
pub fn direction_at(base: &SpdPoint, x: &BoundaryPoint) -> SymTangent {
    let l = base.chol();
    let li = lower_inverse(&l);
    let y = x.image(&li);
    let u = direction_at_identity(&y);
    SymTangent::from_sym_unchecked(l * u.matrix() * l.transpose())
}

/// Endpoint at infinity of the ray from `base` through `p ≠ base`.
pub fn boundary_point_through(base: &SpdPoint, p: &SpdPoint) -> Result<BoundaryPoint> {
    let l = base.chol();
    let w = symspace::whiten(base, p.matrix());
    let lg = symspace::spd_log_matrix(&w)?;
    let y = from_direction_at_identity(&lg)?;
    Ok(y.image(&l))
}

/// Three independent lines; the vertices of its apartment in cyclic order
/// are `f₁, f₁f₂, f₂, f₂f₃, f₃, f₃f₁`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Frame {
    pub lines: [Subspace; 3],
}

impl Frame {
    pub fn new(a: V3, b: V3, c: V3) -> Result<Self> {
        let m = Mat3::from_columns(&[a.normalize(), b.normalize(), c.normalize()]);
        if !(m.determinant().abs() > 1e-12) {
            return Err(Error::validation("frame lines do not span R³"));
        }
        Ok(Self {
            lines: [Subspace::line(a)?, Subspace::line(b)?, Subspace::line(c)?],
        })
    }

    pub fn standard() -> Self {
        Self {
            lines: [0, 1, 2].map(Subspace::coordinate_line),
        }
    }

    fn dir(&self, i: usize) -> V3 {
        self.lines[i].v
    }

    /// Subspace at hexagon position `k` (0..6).
    pub fn vertex(&self, k: usize) -> Subspace {
        let k = k % 6;
        if k % 2 == 0 {
            self.lines[k / 2]
        } else {
            let i = k / 2;
            let j = (i + 1) % 3;
            Subspace::plane(self.dir(i), self.dir(j)).expect("frame spans")
        }
    }

    /// The boundary point at arc length `alpha` from vertex `f₁`.
    pub fn point_at(&self, alpha: f64) -> BoundaryPoint {
        let s = (alpha / FRAC_PI_3).rem_euclid(6.0);
        let mut k = s.floor() as usize;
        let mut frac = s - k as f64;
        if k >= 6 {
            k = 0;
            frac = 0.0;
        }
        if frac <= 1e-13 {
            return self.vertex_point(k);
        }
        if frac >= 1.0 - 1e-13 {
            return self.vertex_point(k + 1);
        }
        let (li, pi, theta) = if k % 2 == 0 {
            (k, k + 1, frac * FRAC_PI_3)
        } else {
            ((k + 1) % 6, k, (1.0 - frac) * FRAC_PI_3)
        };
        let line = self.vertex(li);
        let plane = self.vertex(pi);
        BoundaryPoint {
            flag: Flag { line, plane },
            theta,
        }
    }

    fn vertex_point(&self, k: usize) -> BoundaryPoint {
        let k = k % 6;
        if k % 2 == 0 {
            BoundaryPoint::line_vertex(self.vertex(k))
        } else {
            BoundaryPoint::plane_vertex(self.vertex(k))
        }
    }

    /// Hexagon angle of `x`, with the worst incidence residual.
    pub fn locate(&self, x: &BoundaryPoint) -> (f64, f64) {
        let line_pos = |l: &Subspace| -> (usize, f64) {
            (0..3)
                .map(|i| (2 * i, l.gap(&self.lines[i])))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("three lines")
        };
        let plane_res = |p: &Subspace, k: usize| -> f64 {
            let i = k / 2;
            let j = (i + 1) % 3;
            p.residual(&self.dir(i)).max(p.residual(&self.dir(j)))
        };
        let plane_pos = |p: &Subspace| -> (usize, f64) {
            [1usize, 3, 5]
                .iter()
                .map(|&k| (k, plane_res(p, k)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("three planes")
        };
        match x.kind() {
            VertexKind::Line => {
                let (k, r) = line_pos(&x.flag.line);
                (k as f64 * FRAC_PI_3, r)
            }
            VertexKind::Plane => {
                let (k, r) = plane_pos(&x.flag.plane);
                (k as f64 * FRAC_PI_3, r)
            }
            VertexKind::Interior => {
                let (k, r1) = line_pos(&x.flag.line);
                let up = (k + 1) % 6;
                let down = (k + 5) % 6;
                let (ru, rd) = (plane_res(&x.flag.plane, up), plane_res(&x.flag.plane, down));
                let (dir, r2) = if ru <= rd { (1.0, ru) } else { (-1.0, rd) };
                (k as f64 * FRAC_PI_3 + dir * x.theta, r1.max(r2))
            }
        }
    }
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Subspaces `[L₁, P₁, L₂, P₂]` as inputs to dimension counting.
fn intersection_dim(a: &Subspace, b: &Subspace, tol: f64) -> usize {
    match (a.dim, b.dim) {
        (1, 1) => usize::from(a.approx_eq(b, tol)),
        (1, 2) => usize::from(a.line_in_plane(b, tol)),
        (2, 1) => usize::from(b.line_in_plane(a, tol)),
        _ => {
            if a.approx_eq(b, tol) {
                2
            } else {
                1
            }
        }
    }
}

pub fn flag(line: Subspace, plane: Subspace) -> Result<Flag> {
    Flag::new(line, plane)
}

/// Relative position of two flags as a permutation `σ` of `{1,2,3}`, read
/// from the jumps of `dim(Vᵢ ∩ Wⱼ)`.
pub fn relative_position(f1: &Flag, f2: &Flag) -> [u8; 3] {
    relative_position_tol(f1, f2, SUBSPACE_TOL)
}

pub fn relative_position_tol(f1: &Flag, f2: &Flag, tol: f64) -> [u8; 3] {
    let v = [f1.line, f1.plane];
    let w = [f2.line, f2.plane];
    // r[i][j] = dim(V_i ∩ W_j) for i, j in 0..=3
    let mut r = [[0usize; 4]; 4];
    for i in 0..=3 {
        for j in 0..=3 {
            r[i][j] = if i == 0 || j == 0 {
                0
            } else if i == 3 {
                j
            } else if j == 3 {
                i
            } else {
                intersection_dim(&v[i - 1], &w[j - 1], tol)
            };
        }
    }
    let mut sigma = [0u8; 3];
    for i in 1..=3 {
        for j in 1..=3 {
            let jump = r[i][j] + r[i - 1][j - 1] - r[i - 1][j] - r[i][j - 1];
            if jump == 1 {
                sigma[i - 1] = j as u8;
            }
        }
    }
    sigma
}

/// A frame whose apartment contains both flags.
pub fn common_apartment(f1: &Flag, f2: &Flag) -> Frame {
    common_apartment_tol(f1, f2, SUBSPACE_TOL)
}

pub fn common_apartment_tol(f1: &Flag, f2: &Flag, tol: f64) -> Frame {
    let mut lines: Vec<V3> = Vec::with_capacity(3);
    let push = |lines: &mut Vec<V3>, v: V3| {
        let v = canonical_sign(v.normalize());
        if lines.iter().all(|l| sin_between(l, &v) > tol) {
            lines.push(v);
        }
    };
    push(&mut lines, f1.line.v);
    push(&mut lines, f2.line.v);
    let meet = f1.plane.v.cross(&f2.plane.v);
    if meet.norm() > tol {
        push(&mut lines, meet);
    }
    for p in [f1.plane, f2.plane] {
        if lines.len() >= 3 {
            break;
        }
        let inside: Vec<V3> = lines
            .iter()
            .copied()
            .filter(|l| l.dot(&p.v).abs() <= tol)
            .collect();
        if inside.len() == 1 {
            push(&mut lines, p.v.cross(&inside[0]));
        }
    }
    while lines.len() < 3 {
        let span: Vec<V3> = gram_schmidt(&lines);
        let best = (0..3)
            .map(|i| {
                let e = V3::ith(i, 1.0);
                span.iter().fold(e, |r, s| r - s * s.dot(&r))
            })
            .fold(V3::zeros(), |best, r| if r.norm() > best.norm() + 1e-12 { r } else { best });
        push(&mut lines, best);
    }
    Frame {
        lines: [0, 1, 2].map(|i| Subspace::line(lines[i]).expect("unit")),
    }
}

fn gram_schmidt(vs: &[V3]) -> Vec<V3> {
    let mut out: Vec<V3> = Vec::new();
    for v in vs {
        let r = out.iter().fold(*v, |r, s| r - s * s.dot(&r));
        if r.norm() > 1e-12 {
            out.push(r.normalize());
        }
    }
    out
}

/// Tits distance, computed in a common apartment.
pub fn tits_distance(x: &BoundaryPoint, y: &BoundaryPoint) -> f64 {
    tits_distance_tol(x, y, SUBSPACE_TOL)
}

/// Tits distance with an explicit tolerance for identifying subspaces.
pub fn tits_distance_tol(x: &BoundaryPoint, y: &BoundaryPoint, tol: f64) -> f64 {
    let frame = common_apartment_tol(&x.flag, &y.flag, tol);
    let (a, _) = frame.locate(x);
    let (b, _) = frame.locate(y);
    circle_distance(a, b)
}

/// Point at fraction `t` along the Tits geodesic from `x` to `y`.
pub fn tits_geodesic_point(x: &BoundaryPoint, y: &BoundaryPoint, t: f64) -> Result<BoundaryPoint> {
    let frame = common_apartment(&x.flag, &y.flag);
    let (a, _) = frame.locate(x);
    let (b, _) = frame.locate(y);
    let mut d = (b - a).rem_euclid(2.0 * PI);
    if (d - PI).abs() <= 1e-12 {
        return Err(Error::Antipodal);
    }
    if d > PI {
        d -= 2.0 * PI;
    }
    Ok(frame.point_at(a + t * d))
}

/// Coordinates of a point of the standard apartment as a unit trace-0
/// diagonal.
pub fn apartment_coords(x: &BoundaryPoint) -> Result<SymTangent> {
    let (alpha, res) = Frame::standard().locate(x);
    if res > SUBSPACE_TOL {
        return Err(Error::validation(
            "boundary point does not lie in the standard apartment",
        ));
    }
    Ok(SymTangent::diag(u_of_angle(alpha)))
}

/// Inverse of [`apartment_coords`].
pub fn from_apartment_coords(u: &SymTangent) -> Result<BoundaryPoint> {
    let m = u.matrix();
    let off = m[(0, 1)].abs() + m[(0, 2)].abs() + m[(1, 2)].abs();
    let n = u.norm();
    if !(n > 0.0) {
        return Err(Error::ZeroVector);
    }
    if off > 1e-12 * n || u.trace().abs() > 1e-12 * n {
        return Err(Error::validation("expected a trace-0 diagonal matrix"));
    }
    let d = [m[(0, 0)], m[(1, 1)], m[(2, 2)]];
    Ok(Frame::standard().point_at(angle_of_u(&d)))
}

/// Whether `g` fixes `x`: it stabilizes the line of a line vertex, the plane
/// of a plane vertex, and both subspaces of an interior point.
pub fn is_fixed(g: &GroupElement, x: &BoundaryPoint) -> bool {
    is_fixed_tol(g, x, FIX_TOL)
}

pub fn is_fixed_tol(g: &GroupElement, x: &BoundaryPoint, tol: f64) -> bool {
    let m = g.matrix();
    let t = tol * m.norm();
    let line = || x.flag.line.invariance_residual(m) <= t;
    let plane = || x.flag.plane.invariance_residual(m) <= t;
    match x.kind() {
        VertexKind::Line => line(),
        VertexKind::Plane => plane(),
        VertexKind::Interior => line() && plane(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedVariant {
    SingleEdge,
    IntervalThreeEdges,
    EdgeStar,
    TwoAntipodalVertices,
    Hexagon,
    SuspensionBoundary,
    WholeBoundary,
}

/// The fixed point set of an isometry on the Tits boundary.
///
/// Witness subspaces are given in actual coordinates:
/// - single edge: `[line, plane]` of the fixed chamber;
/// - interval of three edges: `[ℓ₁, Π₁, ℓ₂, Π₂]` with chambers `ℓ₁⊂Π₁`,
///   `ℓ₂⊂Π₁`, `ℓ₂⊂Π₂`;
/// - edge star: `[ℓ₀, Π₀]`, all edges at the two endpoints of `ℓ₀ ⊂ Π₀`;
/// - two antipodal vertices: `[Π, ℓ]`;
/// - hexagon: the three frame lines;
/// - suspension boundary: `[Π, ℓ]`, the boundary of the parallel set of the
///   geodesic with endpoints `Π` and `ℓ`.
#[derive(Debug, Clone, Serialize)]
pub struct FixedSetDescription {
    pub variant: FixedVariant,
    pub case_id: u8,
    /// `k` mapping normal-form coordinates to actual coordinates.
    pub conjugator: GroupElement,
    pub witnesses: Vec<Subspace>,
    pub degenerate: bool,
}

pub fn fixed_set(g: &GroupElement) -> Result<FixedSetDescription> {
    Ok(fixed_set_of_class(&isometry::real_jordan(g)?))
}

pub(crate) fn fixed_set_of_class(j: &JordanClass) -> FixedSetDescription {
    let k = j.conjugator.inverse();
    let km = *k.matrix();
    let line = |i: usize| Subspace::coordinate_line(i).image(&km);
    let plane = |i: usize, j: usize| Subspace::coordinate_plane(i, j).image(&km);
    let (variant, witnesses) = match j.case_id {
        1 => (FixedVariant::EdgeStar, vec![line(1), plane(0, 1)]),
        2 => (
            FixedVariant::IntervalThreeEdges,
            vec![line(0), plane(0, 1), line(1), plane(1, 2)],
        ),
        3 => (FixedVariant::SingleEdge, vec![line(0), plane(0, 1)]),
        4 => (FixedVariant::TwoAntipodalVertices, vec![plane(0, 1), line(2)]),
        5 => (FixedVariant::Hexagon, vec![line(0), line(1), line(2)]),
        6 => (FixedVariant::SuspensionBoundary, vec![plane(0, 1), line(2)]),
        _ => (FixedVariant::WholeBoundary, vec![]),
    };
    FixedSetDescription {
        variant,
        case_id: j.case_id,
        conjugator: k,
        witnesses,
        degenerate: j.degenerate,
    }
}

impl FixedSetDescription {
    /// Membership predicate derived from the variant.
    pub fn contains(&self, x: &BoundaryPoint) -> bool {
        self.contains_tol(x, MEMBER_TOL)
    }

    pub fn contains_tol(&self, x: &BoundaryPoint, tol: f64) -> bool {
        let w = &self.witnesses;
        let l = &x.flag.line;
        let p = &x.flag.plane;
        let eq = |a: &Subspace, b: &Subspace| a.approx_eq(b, tol);
        let inc = |a: &Subspace, b: &Subspace| a.line_in_plane(b, tol);
        let kind = x.kind();
        match self.variant {
            FixedVariant::WholeBoundary => true,
            FixedVariant::SingleEdge => match kind {
                VertexKind::Line => eq(l, &w[0]),
                VertexKind::Plane => eq(p, &w[1]),
                VertexKind::Interior => eq(l, &w[0]) && eq(p, &w[1]),
            },
            FixedVariant::IntervalThreeEdges => {
                let (l1, p1, l2, p2) = (&w[0], &w[1], &w[2], &w[3]);
                match kind {
                    VertexKind::Line => eq(l, l1) || eq(l, l2),
                    VertexKind::Plane => eq(p, p1) || eq(p, p2),
                    VertexKind::Interior => {
                        (eq(l, l1) && eq(p, p1)) || (eq(l, l2) && (eq(p, p1) || eq(p, p2)))
                    }
                }
            }
            FixedVariant::EdgeStar => {
                let (l0, p0) = (&w[0], &w[1]);
                match kind {
                    VertexKind::Line => inc(l, p0),
                    VertexKind::Plane => inc(l0, p),
                    VertexKind::Interior => eq(p, p0) || eq(l, l0),
                }
            }
            FixedVariant::TwoAntipodalVertices => match kind {
                VertexKind::Line => eq(l, &w[1]),
                VertexKind::Plane => eq(p, &w[0]),
                VertexKind::Interior => false,
            },
            FixedVariant::Hexagon => {
                let on_line = |s: &Subspace| w.iter().any(|f| eq(s, f));
                let on_plane = |s: &Subspace| {
                    w.iter().filter(|f| inc(f, s)).count() >= 2
                };
                match kind {
                    VertexKind::Line => on_line(l),
                    VertexKind::Plane => on_plane(p),
                    VertexKind::Interior => on_line(l) && on_plane(p),
                }
            }
            FixedVariant::SuspensionBoundary => {
                let (pi, ell) = (&w[0], &w[1]);
                match kind {
                    VertexKind::Line => inc(l, pi) || eq(l, ell),
                    VertexKind::Plane => eq(p, pi) || inc(ell, p),
                    VertexKind::Interior => {
                        (inc(l, pi) && (eq(p, pi) || inc(ell, p))) || eq(l, ell)
                    }
                }
            }
        }
    }
}

fn flag_of(line: V3, plane_a: V3, plane_b: V3) -> Flag {
    Flag {
        line: Subspace::line(line).expect("nonzero"),
        plane: Subspace::plane(plane_a, plane_b).expect("independent"),
    }
}

fn pt(f: Flag, theta: f64) -> BoundaryPoint {
    BoundaryPoint { flag: f, theta }
}

fn e(i: usize) -> V3 {
    V3::ith(i, 1.0)
}

/// Points of the fixed set in normal-form coordinates: structural points
/// first (endpoints and midpoints), then seeded random points.
fn normal_form_samples(variant: FixedVariant, n: usize, rng: &mut ChaCha8Rng) -> Vec<BoundaryPoint> {
    let third = FRAC_PI_3;
    let c1 = flag_of(e(0), e(0), e(1));
    let c2 = flag_of(e(1), e(0), e(1));
    let c3 = flag_of(e(1), e(1), e(2));
    let mut out: Vec<BoundaryPoint> = Vec::new();
    let mut random: Box<dyn FnMut(&mut ChaCha8Rng) -> BoundaryPoint> = match variant {
        FixedVariant::SingleEdge => {
            out.extend([pt(c1, third / 2.0), pt(c1, 0.0), pt(c1, third)]);
            Box::new(move |r| pt(c1, r.random::<f64>() * third))
        }
        FixedVariant::IntervalThreeEdges => {
            out.extend([
                pt(c2, third / 2.0),
                pt(c1, 0.0),
                pt(c3, third),
                pt(c1, third),
                pt(c2, 0.0),
                pt(c1, third / 2.0),
                pt(c3, third / 2.0),
            ]);
            Box::new(move |r| {
                let c = [c1, c2, c3][r.random_range(0..3usize)];
                pt(c, r.random::<f64>() * third)
            })
        }
        FixedVariant::EdgeStar => {
            // edges at Π₀ = e₁e₂ are chambers L ⊂ Π₀; edges at ℓ₀ = e₂ are
            // chambers ℓ₀ ⊂ P
            let at_plane = |phi: f64| flag_of(e(0) * phi.cos() + e(1) * phi.sin(), e(0), e(1));
            let at_line = |psi: f64| flag_of(e(1), e(1), e(0) * psi.cos() + e(2) * psi.sin());
            out.extend([pt(c2, third / 2.0), pt(c2, 0.0), pt(c2, third)]);
            let k = 4;
            for j in 0..k {
                let phi = PI * j as f64 / k as f64;
                let psi = PI * (j as f64 + 0.5) / k as f64;
                out.push(pt(at_plane(phi), 0.0));
                out.push(pt(at_line(psi), third));
                out.push(pt(at_plane(phi), third / 2.0));
                out.push(pt(at_line(psi), third / 2.0));
            }
            Box::new(move |r| {
                let th = r.random::<f64>() * third;
                let a = r.random::<f64>() * PI;
                if r.random::<bool>() {
                    pt(at_plane(a), th)
                } else {
                    pt(at_line(a), th)
                }
            })
        }
        FixedVariant::TwoAntipodalVertices => {
            let a = BoundaryPoint::plane_vertex(Subspace::coordinate_plane(0, 1));
            let b = BoundaryPoint::line_vertex(Subspace::coordinate_line(2));
            out.extend([a, b]);
            let mut flip = false;
            Box::new(move |_| {
                flip = !flip;
                if flip {
                    a
                } else {
                    b
                }
            })
        }
        FixedVariant::Hexagon => {
            let f = Frame::standard();
            for k in 0..12 {
                out.push(f.point_at(k as f64 * third / 2.0));
            }
            Box::new(move |r| f.point_at(r.random::<f64>() * 2.0 * PI))
        }
        FixedVariant::SuspensionBoundary => {
            out.extend([
                BoundaryPoint::plane_vertex(Subspace::coordinate_plane(0, 1)),
                BoundaryPoint::line_vertex(Subspace::coordinate_line(2)),
            ]);
            Box::new(move |r| {
                let a = r.random::<f64>() * PI;
                let in_pi = e(0) * a.cos() + e(1) * a.sin();
                let th = r.random::<f64>() * third;
                match r.random_range(0..5usize) {
                    0 => BoundaryPoint::line_vertex(Subspace::line(in_pi).expect("unit")),
                    1 => BoundaryPoint::plane_vertex(Subspace::plane(in_pi, e(2)).expect("indep")),
                    2 => pt(flag_of(in_pi, e(0), e(1)), th),
                    3 => pt(flag_of(in_pi, in_pi, e(2)), th),
                    _ => pt(flag_of(e(2), e(2), in_pi), th),
                }
            })
        }
        FixedVariant::WholeBoundary => {
            let f = Frame::standard();
            out.extend([f.point_at(0.0), f.point_at(PI)]);
            Box::new(random_boundary_point)
        }
    };
    out.truncate(n);
    while out.len() < n {
        out.push(random(rng));
    }
    out
}

/// Seeded sample of `n` points of the fixed set, structural points first.
pub fn sample_fixed_set(desc: &FixedSetDescription, n: usize, seed: u64) -> Result<Vec<BoundaryPoint>> {
    if n == 0 {
        return Err(Error::validation("sample size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let km = *desc.conjugator.matrix();
    Ok(normal_form_samples(desc.variant, n, &mut rng)
        .into_iter()
        .map(|x| x.image(&km))
        .collect())
}

/// Random boundary point; vertices of either type appear with probability
/// 0.1 each.
pub fn random_boundary_point<R: Rng + ?Sized>(rng: &mut R) -> BoundaryPoint {
    let mut gauss = || V3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
    let a = gauss();
    let b = gauss();
    let f = flag_of(a, a, b);
    let u: f64 = rng.random();
    if u < 0.1 {
        BoundaryPoint::line_vertex(f.line)
    } else if u < 0.2 {
        BoundaryPoint::plane_vertex(f.plane)
    } else {
        pt(f, rng.random::<f64>() * FRAC_PI_3)
    }
}

/// Pairwise Tits distances.
pub fn tits_distance_matrix(points: &[BoundaryPoint]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = tits_distance(&points[i], &points[j]);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// The six vertices `v₁..v₆` of the standard apartment.
pub fn standard_vertices() -> [BoundaryPoint; 6] {
    let f = Frame::standard();
    [0, 1, 2, 3, 4, 5].map(|k| f.point_at(k as f64 * FRAC_PI_3))
}
