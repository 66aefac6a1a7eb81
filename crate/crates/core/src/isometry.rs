//! The SL(3,R) action `g·p = g p gᵀ` on the det-1 slice, displacement
//! functions, real Jordan forms and translation lengths.

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::building::{self, FixedSetDescription};
use crate::error::{Error, Result};
use crate::gradflow::{self, ConvexFunctional, FlowOptions, FlowTrace};
use crate::io::ser_mat3;
use crate::symspace::{
    lower_inverse, sym_eig, Mat3, SpdPoint, SymTangent, DET_TOL, EIG_FLOOR,
};

/// Eigenvalue-coincidence threshold separating Jordan cases.
pub const ETA: f64 = 1e-8;
/// Relative singular-value threshold used for ranks and kernels.
pub const RANK_TOL: f64 = 1e-7;
/// Maximum accepted `‖h g h⁻¹ − J‖` relative to `max(1, ‖J‖)`.
pub const CONJ_TOL: f64 = 1e-8;

/// An element of SL(3,R).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupElement {
    #[serde(serialize_with = "ser_mat3")]
    m: Mat3,
}

impl GroupElement {
    /// Requires finite entries and `|det − 1| ≤ 1e-9`.
    pub fn new(m: Mat3) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("matrix has non-finite entries"));
        }
        let d = m.determinant();
        if (d - 1.0).abs() > DET_TOL {
            return Err(Error::validation(format!(
                "determinant {d:.12} differs from 1"
            )));
        }
        Ok(Self { m })
    }

    /// Rescales by `det^{-1/3}`; fails for singular matrices.
    pub fn normalized(m: Mat3) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("matrix has non-finite entries"));
        }
        let d = m.determinant();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::validation("matrix is singular"));
        }
        Ok(Self { m: m / d.cbrt() })
    }

    pub(crate) fn from_unchecked(m: Mat3) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self { m: Mat3::identity() }
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(Mat3::from_diagonal(&Vector3::new(a, b, c)))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn det(&self) -> f64 {
        self.m.determinant()
    }

    pub fn inverse(&self) -> Self {
        Self {
            m: self.m.try_inverse().expect("det-1 matrix is invertible"),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { m: self.m * other.m }
    }

    /// `h g h⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        Self {
            m: h.m * self.m * h.inverse().m,
        }
    }
}

/// `g·p = g p gᵀ`.
pub fn act(g: &GroupElement, p: &SpdPoint) -> SpdPoint {
    SpdPoint::from_spd_unchecked(g.m * p.matrix() * g.m.transpose(), p.det_one())
}

/// Action on tangent vectors, `v ↦ g v gᵀ`.
pub fn act_tangent(g: &GroupElement, v: &SymTangent) -> SymTangent {
    SymTangent::from_sym_unchecked(g.m * v.matrix() * g.m.transpose())
}

fn whitened_conjugate(g: &GroupElement, p: &SpdPoint) -> (Mat3, Mat3) {
    let l = p.chol();
    let li = lower_inverse(&l);
    (li * g.m * l, l)
}

fn log_norm(m: &Mat3) -> (f64, Mat3) {
    let e = sym_eig(m).expect("symmetric input");
    let lg = e.map(|x| x.max(EIG_FLOOR).ln());
    (lg.norm(), lg)
}

/// `d_g(p) = d(p, g·p)`.
pub fn displacement(g: &GroupElement, p: &SpdPoint) -> f64 {
    let (m, _) = whitened_conjugate(g, p);
    let mmt = (m * m.transpose() + (m * m.transpose()).transpose()) * 0.5;
    log_norm(&mmt).0
}

/// Displacement together with its Riemannian gradient at `p`. The gradient
/// is zero where `d_g` vanishes.
pub fn displacement_with_grad(g: &GroupElement, p: &SpdPoint) -> (f64, SymTangent) {
    let (m, l) = whitened_conjugate(g, p);
    let a = m * m.transpose();
    let a = (a + a.transpose()) * 0.5;
    let (d, la) = log_norm(&a);
    if d <= 1e-300 {
        return (d, SymTangent::zero());
    }
    let mi = m.try_inverse().expect("invertible");
    let b = mi * mi.transpose();
    let b = (b + b.transpose()) * 0.5;
    let (_, lb) = log_norm(&b);
    let gw = -(la + lb) / d;
    (d, SymTangent::from_sym_unchecked(l * gw * l.transpose()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinSetTag {
    /// The flat `F₀` of diagonal matrices.
    F0,
    /// The geodesic `γ₀ = {diag(s, s, 1/s²)}`.
    Gamma0,
    /// The union `P(γ₀)` of geodesics parallel to `γ₀`.
    PGamma0,
    /// The whole space.
    X,
    Empty,
}

/// Real Jordan normal form with the conjugator realizing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JordanClass {
    pub case_id: u8,
    pub params: Vec<f64>,
    /// `h` with `h g h⁻¹ = normal_form`.
    pub conjugator: GroupElement,
    #[serde(serialize_with = "ser_mat3")]
    pub normal_form: Mat3,
    /// Set when a deciding quantity was within two decades of its threshold.
    pub degenerate: bool,
    /// `‖h g h⁻¹ − J‖_F`.
    pub residual: f64,
}

/// The matrix of the normal form for a case and its parameters.
pub fn normal_form(case_id: u8, params: &[f64]) -> Result<Mat3> {
    let need = match case_id {
        1 | 3 | 7 => 0,
        2 | 6 => 1,
        4 => 2,
        5 => 3,
        _ => return Err(Error::validation(format!("unknown case id {case_id}"))),
    };
    if params.len() != need {
        return Err(Error::validation(format!(
            "case {case_id} takes {need} parameters, got {}",
            params.len()
        )));
    }
    Ok(match case_id {
        1 => Mat3::new(1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0),
        2 => {
            let a = params[0];
            Mat3::new(1.0 / (a * a), 0.0, 0.0, 0.0, a, 1.0, 0.0, 0.0, a)
        }
        3 => Mat3::new(1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0),
        4 => {
            let (a, b) = (params[0], params[1]);
            Mat3::new(a, b, 0.0, -b, a, 0.0, 0.0, 0.0, 1.0 / (a * a + b * b))
        }
        5 => Mat3::from_diagonal(&Vector3::new(params[0], params[1], params[2])),
        6 => {
            let a = params[0];
            Mat3::from_diagonal(&Vector3::new(a, a, 1.0 / (a * a)))
        }
        _ => Mat3::identity(),
    })
}

struct Svd3 {
    sigma: [f64; 3],
    right: [Vector3<f64>; 3],
}

fn canonical_sign(mut v: Vector3<f64>) -> Vector3<f64> {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v = -v;
        }
    }
    v
}

fn svd3(m: &Mat3) -> Svd3 {
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    Svd3 {
        sigma: idx.map(|i| svd.singular_values[i]),
        right: idx.map(|i| canonical_sign(vt.row(i).transpose())),
    }
}

/// Rank with a flag for singular values near the threshold.
fn rank(s: &Svd3, scale: f64, degenerate: &mut bool) -> usize {
    let tol = RANK_TOL * scale;
    let mut r = 0;
    for &x in &s.sigma {
        if x > tol {
            r += 1;
        }
        if x > tol * 1e-2 && x < tol * 1e2 {
            *degenerate = true;
        }
    }
    r
}

fn kernel(s: &Svd3, r: usize) -> Vec<Vector3<f64>> {
    s.right[r..].to_vec()
}

fn cubic(t: f64, c: f64, d: f64, x: f64) -> (f64, f64) {
    (((x - t) * x + c) * x - d, (3.0 * x - 2.0 * t) * x + c)
}

fn polish(t: f64, c: f64, d: f64, mut x: f64) -> f64 {
    for _ in 0..4 {
        let (f, fp) = cubic(t, c, d, x);
        if fp.abs() < 1e-300 {
            break;
        }
        let nx = x - f / fp;
        if !nx.is_finite() {
            break;
        }
        let (nf, _) = cubic(t, c, d, nx);
        if nf.abs() >= f.abs() {
            break;
        }
        x = nx;
    }
    x
}

fn unit(v: Vector3<f64>) -> Vector3<f64> {
    canonical_sign(v.normalize())
}

/// Component of `v` orthogonal to `w` (unit).
fn reject(v: &Vector3<f64>, w: &Vector3<f64>) -> Vector3<f64> {
    v - w * w.dot(v)
}

/// Real Jordan form of `g` with a det-1 conjugator `h`, `h g h⁻¹ = J`.
pub fn real_jordan(g: &GroupElement) -> Result<JordanClass> {
    let m = g.m;
    let id = Mat3::identity();
    let t = m.trace();
    let c = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
        - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    let d = m.determinant();
    let scale = 1f64.max(t.abs()).max(c.abs().sqrt());
    let gscale = m.norm().max(1.0);

    // Discriminant of λ³ − Tλ² + Cλ − D.
    let (bb, cc, dd) = (-t, c, -d);
    let disc = 18.0 * bb * cc * dd - 4.0 * bb.powi(3) * dd + bb * bb * cc * cc
        - 4.0 * cc.powi(3)
        - 27.0 * dd * dd;
    let disc_rel = disc / scale.powi(6);
    let spread = (t * t - 3.0 * c) / (scale * scale);

    let mut degenerate = false;
    let near = |x: f64| x.abs() > ETA * 1e-2 && x.abs() < ETA * 1e2;

    let (case_id, params, cols): (u8, Vec<f64>, [Vector3<f64>; 3]) = if spread.abs() < ETA {
        degenerate |= near(spread);
        let r = t / 3.0;
        let n = m - id * r;
        let s = svd3(&n);
        match rank(&s, gscale, &mut degenerate) {
            0 => (7, vec![], [Vector3::x(), Vector3::y(), Vector3::z()]),
            1 => {
                let p3 = s.right[0];
                let p2 = n * p3;
                let ker = kernel(&s, 1);
                let p1 = unit(pick_orth(&ker, &p2.normalize()));
                (1, vec![], [p1, p2, p3])
            }
            _ => {
                let n2 = n * n;
                let s2 = svd3(&n2);
                let p3 = s2.right[0];
                let p2 = n * p3;
                let p1 = n * p2;
                (3, vec![], [p1, p2, p3])
            }
        }
    } else if disc_rel > ETA {
        degenerate |= near(disc_rel);
        let p = c - t * t / 3.0;
        let q = -2.0 * t.powi(3) / 27.0 + t * c / 3.0 - d;
        let rr = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let mut roots: Vec<f64> = (0..3)
            .map(|k| {
                let x = rr * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + t / 3.0;
                polish(t, c, d, x)
            })
            .collect();
        roots.sort_by(|x, y| y.abs().total_cmp(&x.abs()).then(y.total_cmp(x)));
        let cols = [0, 1, 2].map(|k| {
            let s = svd3(&(m - id * roots[k]));
            s.right[2]
        });
        (5, roots, cols)
    } else if disc_rel < -ETA {
        degenerate |= near(disc_rel);
        let p = c - t * t / 3.0;
        let q = -2.0 * t.powi(3) / 27.0 + t * c / 3.0 - d;
        let sq = (q * q / 4.0 + p.powi(3) / 27.0).max(0.0).sqrt();
        let x = (-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt() + t / 3.0;
        let rho = polish(t, c, d, x);
        let a = (t - rho) / 2.0;
        let b2 = d / rho - a * a;
        if !(b2 > 0.0) {
            return Err(Error::numerical("complex eigenvalue pair has vanishing imaginary part"));
        }
        let b = b2.sqrt();
        let q2 = (m - id * a) * (m - id * a) + id * (b * b);
        let s = svd3(&q2);
        let x = s.right[2];
        let y = (x * a - m * x) / b;
        let s3 = svd3(&(m - id * rho));
        (4, vec![a, b], [x, y, s3.right[2]])
    } else {
        degenerate |= near(disc_rel);
        // Double root: the critical point of the cubic closer to a root.
        let sq = (t * t - 3.0 * c).max(0.0).sqrt();
        let cands = [(t + sq) / 3.0, (t - sq) / 3.0];
        let r = if cubic(t, c, d, cands[0]).0.abs() <= cubic(t, c, d, cands[1]).0.abs() {
            cands[0]
        } else {
            cands[1]
        };
        let simple = t - 2.0 * r;
        let n = m - id * r;
        let s = svd3(&n);
        let ps = svd3(&(m - id * simple)).right[2];
        match rank(&s, gscale, &mut degenerate) {
            0 | 1 => {
                let ker = kernel(&s, 1);
                (6, vec![r], [ker[0], ker[1], ps])
            }
            _ => {
                let kvec = s.right[2];
                let s2 = svd3(&(n * n));
                let r2 = rank(&s2, gscale * gscale, &mut degenerate).min(2);
                let ker2 = kernel(&s2, r2.max(1));
                let p3 = unit(pick_orth(&ker2, &kvec));
                let p2 = n * p3;
                (2, vec![r], [ps, p2, p3])
            }
        }
    };

    let mut pm = Mat3::from_columns(&cols);
    let det = pm.determinant();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::numerical("singular Jordan basis"));
    }
    pm /= det.cbrt();
    let h = pm.try_inverse().ok_or_else(|| Error::numerical("singular Jordan basis"))?;
    let jn = normal_form(case_id, &params)?;
    let residual = (h * m * pm - jn).norm();
    if residual > CONJ_TOL * jn.norm().max(1.0) && !degenerate {
        return Err(Error::numerical(format!(
            "conjugator residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(JordanClass {
        case_id,
        params,
        conjugator: GroupElement::from_unchecked(h),
        normal_form: jn,
        degenerate,
        residual,
    })
}

/// Unit vector in `span(basis)` orthogonal to the unit vector `w`.
fn pick_orth(basis: &[Vector3<f64>], w: &Vector3<f64>) -> Vector3<f64> {
    basis
        .iter()
        .map(|b| reject(b, w))
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .expect("nonempty basis")
        .normalize()
}

/// Closed-form translation length `|g|` of a normal form.
pub fn translation_length(case_id: u8, params: &[f64]) -> f64 {
    let s6 = 6f64.sqrt();
    match case_id {
        2 | 6 => 2.0 * s6 * params[0].abs().ln().abs(),
        4 => s6 * (params[0] * params[0] + params[1] * params[1]).ln().abs(),
        5 => 2.0 * params.iter().map(|x| x.abs().ln().powi(2)).sum::<f64>().sqrt(),
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub jordan: JordanClass,
    pub kind: Kind,
    pub translation_length: f64,
    pub min_set: MinSetTag,
    /// `k = h⁻¹`; the minimal set of `g` is `k` applied to the tagged set.
    pub min_set_conjugator: GroupElement,
    pub fixed_boundary: FixedSetDescription,
}

/// Type, translation length, minimal set and boundary fixed set.
pub fn classify(g: &GroupElement) -> Result<ClassificationReport> {
    let jordan = real_jordan(g)?;
    let len = translation_length(jordan.case_id, &jordan.params);
    let (kind, min_set) = match jordan.case_id {
        1..=3 => (Kind::Parabolic, MinSetTag::Empty),
        4 => {
            let r = jordan.params[0].powi(2) + jordan.params[1].powi(2);
            if (r - 1.0).abs() <= ETA {
                (Kind::Elliptic, MinSetTag::Gamma0)
            } else {
                (Kind::Hyperbolic, MinSetTag::Gamma0)
            }
        }
        5 => (Kind::Hyperbolic, MinSetTag::F0),
        6 => {
            if jordan.params[0].abs().ln().abs() <= ETA {
                (Kind::Elliptic, MinSetTag::PGamma0)
            } else {
                (Kind::Hyperbolic, MinSetTag::PGamma0)
            }
        }
        _ => (Kind::Elliptic, MinSetTag::X),
    };
    let fixed_boundary = building::fixed_set_of_class(&jordan);
    Ok(ClassificationReport {
        min_set_conjugator: jordan.conjugator.inverse(),
        kind,
        translation_length: len,
        min_set,
        fixed_boundary,
        jordan,
    })
}

/// `true` iff `d_g(p) ≤ |g| + tol`.
pub fn min_set_contains(g: &GroupElement, p: &SpdPoint, tol: f64) -> Result<bool> {
    let r = classify(g)?;
    Ok(displacement(g, p) <= r.translation_length + tol)
}

/// Estimate of `|g|` as the smallest displacement along the proximal
/// gradient flow of `d_g` started at the identity.
pub fn translation_length_numeric(
    g: &GroupElement,
    budget: usize,
    tau: f64,
) -> Result<(f64, FlowTrace)> {
    if budget == 0 {
        return Err(Error::validation("budget must be at least 1"));
    }
    let f = ConvexFunctional::displacement(*g);
    let opts = FlowOptions::default();
    let trace = gradflow::gradient_curve_steps(&f, &SpdPoint::identity(), budget, tau, &opts)?;
    let est = trace.values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((est, trace))
}

/// Random conjugator `Q·diag(e^{s})` with `Q` a rotation and `s` a
/// trace-free vector with entries in `[−spread, spread]`.
pub fn random_conjugator<R: Rng + ?Sized>(rng: &mut R, spread: f64) -> GroupElement {
    let mut raw = Mat3::zeros();
    for x in raw.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
    let qr = raw.qr();
    let mut q = qr.q();
    if q.determinant() < 0.0 {
        q.set_column(0, &(-q.column(0)));
    }
    let mut s = [0.0; 3];
    for x in s.iter_mut() {
        *x = (rng.random::<f64>() * 2.0 - 1.0) * spread;
    }
    let mean = (s[0] + s[1] + s[2]) / 3.0;
    let d = Mat3::from_diagonal(&Vector3::new(
        (s[0] - mean).exp(),
        (s[1] - mean).exp(),
        (s[2] - mean).exp(),
    ));
    GroupElement::from_unchecked(q * d)
}

fn rand_in<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn rand_modulus<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let mag = if rng.random::<bool>() {
        rand_in(rng, 1.5, 3.0)
    } else {
        rand_in(rng, 0.3, 0.7)
    };
    if rng.random::<bool>() {
        mag
    } else {
        -mag
    }
}

/// Random well-separated parameters for a Jordan case, in canonical order.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R, case_id: u8) -> Vec<f64> {
    match case_id {
        2 | 6 => vec![rand_modulus(rng)],
        4 => {
            let r = if rng.random::<f64>() < 0.25 {
                1.0
            } else {
                rand_in(rng, 0.3, 3.0)
            };
            let phi = rand_in(rng, 0.3, std::f64::consts::PI - 0.3);
            let s = r.sqrt();
            vec![s * phi.cos(), s * phi.sin()]
        }
        5 => {
            let l1 = rand_in(rng, 0.4, 1.5);
            let l3 = -rand_in(rng, 0.4, 1.5);
            let l2 = -(l1 + l3);
            let mut logs = [l1, l2, l3];
            logs.sort_by(|x, y| y.abs().total_cmp(&x.abs()));
            if (logs[0].abs() - logs[1].abs()).abs() < 0.2 || (logs[1].abs() - logs[2].abs()).abs() < 0.2 {
                return random_params(rng, 5);
            }
            let flip = rng.random_range(0..4usize);
            logs.sort_by(|x, y| y.total_cmp(x));
            let mut v: Vec<f64> = logs.iter().map(|x| x.exp()).collect();
            if flip > 0 {
                for (k, x) in v.iter_mut().enumerate() {
                    if k != flip - 1 {
                        *x = -*x;
                    }
                }
            }
            v
        }
        _ => vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn classifies_listed_normal_forms() {
        let j = real_jordan(&GroupElement::diag(2.0, 1.0, 0.5).unwrap()).unwrap();
        assert_eq!(j.case_id, 5);
        assert!(close(j.params[0], 2.0, 1e-14) && close(j.params[1], 1.0, 1e-14) && close(j.params[2], 0.5, 1e-14));

        let g = GroupElement::new(normal_form(1, &[]).unwrap()).unwrap();
        assert_eq!(real_jordan(&g).unwrap().case_id, 1);

        let th: f64 = 0.7;
        let rot = Mat3::new(th.cos(), th.sin(), 0.0, -th.sin(), th.cos(), 0.0, 0.0, 0.0, 1.0);
        let j = real_jordan(&GroupElement::new(rot).unwrap()).unwrap();
        assert_eq!(j.case_id, 4);
        assert!(close(j.params[0].powi(2) + j.params[1].powi(2), 1.0, 1e-12));
        assert!(j.params[1] > 0.0);

        assert_eq!(real_jordan(&GroupElement::identity()).unwrap().case_id, 7);
    }

    #[test]
    fn translation_length_formulas() {
        let l2 = 2.0f64.ln();
        assert!(close(translation_length(2, &[2.0]), 2.0 * 6f64.sqrt() * l2, 1e-15));
        assert!(close(translation_length(6, &[0.5]), 2.0 * 6f64.sqrt() * l2, 1e-15));
        assert!(close(translation_length(5, &[2.0, 1.0, 0.5]), 2.0 * (2.0 * l2 * l2).sqrt(), 1e-15));
    }

    #[test]
    fn classify_kinds() {
        let g = GroupElement::new(normal_form(2, &[2.0]).unwrap()).unwrap();
        let r = classify(&g).unwrap();
        assert_eq!(r.kind, Kind::Parabolic);
        assert_eq!(r.min_set, MinSetTag::Empty);
        let g = GroupElement::new(normal_form(6, &[2.0]).unwrap()).unwrap();
        let r = classify(&g).unwrap();
        assert_eq!((r.kind, r.min_set), (Kind::Hyperbolic, MinSetTag::PGamma0));
        let th: f64 = 1.1;
        let g = GroupElement::new(normal_form(4, &[th.cos(), th.sin()]).unwrap()).unwrap();
        let r = classify(&g).unwrap();
        assert_eq!((r.kind, r.min_set), (Kind::Elliptic, MinSetTag::Gamma0));
    }

    #[test]
    fn displacement_at_identity_of_diagonal() {
        let g = GroupElement::diag(2.0, 1.0, 0.5).unwrap();
        let d = displacement(&g, &SpdPoint::identity());
        assert!(close(d, 2.0 * (2.0 * 2f64.ln().powi(2)).sqrt(), 1e-14));
    }

    #[test]
    fn rejects_bad_determinant() {
        assert!(GroupElement::new(Mat3::identity() * 2.0).is_err());
        let g = GroupElement::normalized(Mat3::identity() * 2.0).unwrap();
        assert!(close(g.det(), 1.0, 1e-15));
    }
}
