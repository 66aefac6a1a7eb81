//! Convex functionals on the det-1 slice: directional derivatives, steepest
//! descent directions, proximal gradient curves, Busemann functions and
//! limits of escaping flows.

use std::sync::Arc;

use serde::Serialize;

use crate::building::{self, BoundaryPoint};
use crate::error::{Error, Result};
use crate::io::ser_mat3;
use crate::isometry::{self, GroupElement};
use crate::symspace::{
    self, dist, exp_at, log_at, lower_inverse, norm_at, sym_eig, whiten, Mat3, SpdPoint,
    SymTangent,
};

/// A ray `t ↦ exp_base(t·direction)` with a unit direction.
#[derive(Debug, Clone, Copy)]
pub struct RaySpec {
    pub base: SpdPoint,
    pub direction: SymTangent,
}

impl RaySpec {
    /// Normalizes `direction` in the metric at `base`.
    pub fn new(base: SpdPoint, direction: SymTangent) -> Result<Self> {
        let n = norm_at(&base, &direction);
        if !(n > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            base,
            direction: direction.scale(1.0 / n),
        })
    }

    /// The ray from `base` asymptotic to `x`.
    pub fn toward(base: SpdPoint, x: &BoundaryPoint) -> Self {
        Self {
            base,
            direction: building::direction_at(&base, x),
        }
    }

    pub fn point(&self, t: f64) -> SpdPoint {
        exp_at(&self.base, &self.direction.scale(t))
    }

    pub fn endpoint(&self) -> BoundaryPoint {
        let l = self.base.chol();
        let w = SymTangent::from_sym_unchecked(whiten(&self.base, self.direction.matrix()));
        building::from_direction_at_identity(&w)
            .expect("unit direction")
            .image(&l)
    }
}

/// Horospherical data of a ray for the closed-form Busemann function.
#[derive(Debug, Clone, Copy)]
struct Horo {
    base_inv: Mat3,
    frame: Mat3,
    u: [f64; 3],
    endpoint: BoundaryPoint,
}

impl Horo {
    fn new(ray: &RaySpec) -> Self {
        let li = lower_inverse(&ray.base.chol());
        let w = whiten(&ray.base, ray.direction.matrix());
        let e = sym_eig(&w).expect("symmetric");
        Self {
            base_inv: li,
            frame: e.frame,
            u: [e.values[0], e.values[1], e.values[2]],
            endpoint: ray.endpoint(),
        }
    }

    /// `b(p) = −⟨log D, u⟩` where `Oᵀ L⁻¹ p L⁻ᵀ O = n D nᵀ` with `n` upper
    /// unipotent.
    fn value(&self, p: &SpdPoint) -> f64 {
        let m = self.frame.transpose() * self.base_inv;
        let q = m * p.matrix() * m.transpose();
        // reversed LDLᵀ through the anti-diagonal permutation
        let mut jq = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                jq[(i, j)] = q[(2 - i, 2 - j)];
            }
        }
        let jq = (jq + jq.transpose()) * 0.5;
        let c = symspace::cholesky(&jq).expect("positive definite");
        let log_d = [0, 1, 2].map(|i| 2.0 * c[(2 - i, 2 - i)].ln());
        -(0..3).map(|i| log_d[i] * self.u[i]).sum::<f64>()
    }
}

/// What a [`ConvexFunctional`] evaluates.
#[derive(Clone)]
pub enum FunctionalKind {
    /// `d_g(p) = d(p, g·p)`.
    Displacement(GroupElement),
    /// Busemann function of a ray, normalized to vanish at its base.
    Busemann(RaySpec),
    /// `d(p, q)`.
    DistToPoint(SpdPoint),
    /// `½ d(p, q)²`.
    HalfDistSq(SpdPoint),
    /// Distance to the flat `k·F₀`.
    DistToFlat(GroupElement),
    Constant(f64),
    Custom(Arc<dyn Fn(&SpdPoint) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for FunctionalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl FunctionalKind {
    pub fn tag(&self) -> &'static str {
        match self {
            FunctionalKind::Displacement(_) => "displacement",
            FunctionalKind::Busemann(_) => "busemann",
            FunctionalKind::DistToPoint(_) => "dist_to_point",
            FunctionalKind::HalfDistSq(_) => "half_dist_sq",
            FunctionalKind::DistToFlat(_) => "dist_to_flat",
            FunctionalKind::Constant(_) => "constant",
            FunctionalKind::Custom(_) => "custom",
        }
    }
}

/// A geodesically convex function on the det-1 slice.
#[derive(Clone, Debug)]
pub struct ConvexFunctional {
    pub kind: FunctionalKind,
    pub lipschitz: Option<f64>,
    horo: Option<Horo>,
}

impl ConvexFunctional {
    fn with(kind: FunctionalKind, lipschitz: Option<f64>) -> Self {
        let horo = match &kind {
            FunctionalKind::Busemann(r) => Some(Horo::new(r)),
            _ => None,
        };
        Self {
            kind,
            lipschitz,
            horo,
        }
    }

    pub fn displacement(g: GroupElement) -> Self {
        Self::with(FunctionalKind::Displacement(g), Some(2.0))
    }

    pub fn busemann(ray: RaySpec) -> Self {
        Self::with(FunctionalKind::Busemann(ray), Some(1.0))
    }

    pub fn dist_to_point(q: SpdPoint) -> Self {
        Self::with(FunctionalKind::DistToPoint(q), Some(1.0))
    }

    pub fn half_dist_sq(q: SpdPoint) -> Self {
        Self::with(FunctionalKind::HalfDistSq(q), None)
    }

    /// Distance to `F₀`.
    pub fn dist_to_flat() -> Self {
        Self::dist_to_flat_conj(GroupElement::identity())
    }

    /// Distance to `k·F₀`.
    pub fn dist_to_flat_conj(k: GroupElement) -> Self {
        Self::with(FunctionalKind::DistToFlat(k), Some(1.0))
    }

    pub fn constant(c: f64) -> Self {
        Self::with(FunctionalKind::Constant(c), Some(0.0))
    }

    pub fn custom(f: impl Fn(&SpdPoint) -> f64 + Send + Sync + 'static) -> Self {
        Self::with(FunctionalKind::Custom(Arc::new(f)), None)
    }

    pub fn tag(&self) -> &'static str {
        self.kind.tag()
    }

    pub fn value(&self, p: &SpdPoint) -> f64 {
        match &self.kind {
            FunctionalKind::Displacement(g) => isometry::displacement(g, p),
            FunctionalKind::Busemann(_) => self.horo.as_ref().expect("busemann data").value(p),
            FunctionalKind::DistToPoint(q) => dist(p, q),
            FunctionalKind::HalfDistSq(q) => 0.5 * dist(p, q).powi(2),
            FunctionalKind::DistToFlat(k) => {
                let ki = k.inverse();
                let pp = isometry::act(&ki, p);
                let (foot, _) = project_to_flat(&pp).expect("projection converges");
                dist(&pp, &foot)
            }
            FunctionalKind::Constant(c) => *c,
            FunctionalKind::Custom(f) => f(p),
        }
    }

    /// Value and Riemannian gradient at `p`. Where the function is not
    /// differentiable (a minimum of a distance), the zero vector is returned.
    pub fn value_and_grad(&self, p: &SpdPoint) -> (f64, SymTangent) {
        match &self.kind {
            FunctionalKind::Displacement(g) => isometry::displacement_with_grad(g, p),
            FunctionalKind::Busemann(_) => {
                let h = self.horo.as_ref().expect("busemann data");
                (h.value(p), building::direction_at(p, &h.endpoint).scale(-1.0))
            }
            FunctionalKind::DistToPoint(q) => {
                let v = log_at(p, q);
                let d = norm_at(p, &v);
                if d <= 1e-300 {
                    (0.0, SymTangent::zero())
                } else {
                    (d, v.scale(-1.0 / d))
                }
            }
            FunctionalKind::HalfDistSq(q) => {
                let v = log_at(p, q);
                let d = norm_at(p, &v);
                (0.5 * d * d, v.scale(-1.0))
            }
            FunctionalKind::DistToFlat(k) => {
                let ki = k.inverse();
                let pp = isometry::act(&ki, p);
                let (foot, _) = project_to_flat(&pp).expect("projection converges");
                let foot = isometry::act(k, &foot);
                let v = log_at(p, &foot);
                let d = norm_at(p, &v);
                if d <= 1e-300 {
                    (0.0, SymTangent::zero())
                } else {
                    (d, v.scale(-1.0 / d))
                }
            }
            FunctionalKind::Constant(c) => (*c, SymTangent::zero()),
            FunctionalKind::Custom(_) => (self.value(p), numeric_grad(self, p)),
        }
    }
}

/// Nearest point of `F₀` (diagonal det-1 matrices) and the number of
/// iterations used.
pub fn project_to_flat(p: &SpdPoint) -> Result<(SpdPoint, usize)> {
    let m = p.matrix();
    let mut w = [m[(0, 0)].ln(), m[(1, 1)].ln(), m[(2, 2)].ln()];
    for it in 0..500 {
        let s = [0, 1, 2].map(|i| (-0.5 * w[i]).exp());
        let mut q = *m;
        for i in 0..3 {
            for j in 0..3 {
                q[(i, j)] *= s[i] * s[j];
            }
        }
        let lg = symspace::spd_log_matrix(&q)?;
        let step = [0, 1, 2].map(|i| lg.matrix()[(i, i)]);
        for i in 0..3 {
            w[i] += step[i];
        }
        if step.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-14 * (1.0 + lg.norm()) {
            let mean = (w[0] + w[1] + w[2]) / 3.0;
            let d = if p.det_one() {
                [w[0] - mean, w[1] - mean, w[2] - mean]
            } else {
                w
            };
            let foot = SpdPoint::from_spd_unchecked(
                Mat3::from_diagonal(&nalgebra::Vector3::new(d[0].exp(), d[1].exp(), d[2].exp())),
                p.det_one(),
            );
            return Ok((foot, it + 1));
        }
    }
    Err(Error::numerical("projection onto the flat did not converge"))
}

/// Orthonormal basis of trace-0 symmetric 3×3 matrices (Frobenius).
pub fn traceless_basis() -> [Mat3; 5] {
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    let mut b = [Mat3::zeros(); 5];
    b[0] = Mat3::from_diagonal(&nalgebra::Vector3::new(1.0 / s2, -1.0 / s2, 0.0));
    b[1] = Mat3::from_diagonal(&nalgebra::Vector3::new(1.0 / s6, 1.0 / s6, -2.0 / s6));
    for (k, (i, j)) in [(0usize, 1usize), (0, 2), (1, 2)].iter().enumerate() {
        b[2 + k][(*i, *j)] = 1.0 / s2;
        b[2 + k][(*j, *i)] = 1.0 / s2;
    }
    b
}

/// Central-difference gradient over a whitened orthonormal basis.
pub fn numeric_grad(f: &ConvexFunctional, p: &SpdPoint) -> SymTangent {
    let l = p.chol();
    let h = 1e-6;
    let mut gw = Mat3::zeros();
    for b in traceless_basis() {
        let v = SymTangent::from_sym_unchecked(l * b * l.transpose());
        let fp = f.value(&exp_at(p, &v.scale(h)));
        let fm = f.value(&exp_at(p, &v.scale(-h)));
        gw += b * ((fp - fm) / (2.0 * h));
    }
    SymTangent::from_sym_unchecked(l * gw * l.transpose())
}

const FD_STEPS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// One-sided directional derivative `D_pF(v)` for a unit `v`, from forward
/// differences at `h = 1e-2 … 1e-6` with two Richardson levels.
///
/// Difference quotients of a convex function increase with `h`; a violation
/// beyond `1e-7·(1 + |F(p)|)` is reported as an error.
pub fn directional_derivative(f: &ConvexFunctional, p: &SpdPoint, v: &SymTangent) -> Result<f64> {
    let n = norm_at(p, v);
    if !(n > 0.0) {
        return Err(Error::ZeroVector);
    }
    let v = v.scale(1.0 / n);
    let f0 = f.value(p);
    let q: Vec<f64> = FD_STEPS
        .iter()
        .map(|&h| (f.value(&exp_at(p, &v.scale(h))) - f0) / h)
        .collect();
    let slack = 1e-7 * (1.0 + f0.abs());
    for k in 1..q.len() {
        if q[k] > q[k - 1] + slack {
            return Err(Error::NonConvex(format!(
                "difference quotient increased from {:.9e} to {:.9e} as h decreased",
                q[k - 1],
                q[k]
            )));
        }
    }
    // Richardson with ratio 10 for O(h) then O(h²) error terms, on the
    // three largest steps where rounding is negligible.
    let r1: Vec<f64> = (0..2).map(|k| (10.0 * q[k + 1] - q[k]) / 9.0).collect();
    let r2 = (100.0 * r1[1] - r1[0]) / 99.0;
    // Kinks make the extrapolation unreliable; fall back to the smallest
    // step when the levels disagree.
    if (r2 - q[4]).abs() > 1e-3 * (1.0 + r2.abs()) {
        return Ok(q[4]);
    }
    Ok(r2)
}

/// Deterministic quasi-random unit vectors in R⁵ (an additive recurrence
/// in the cube with rejection outside the ball).
fn sphere_directions(count: usize) -> Vec<[f64; 5]> {
    // generalized golden ratio for dimension 5: root of x⁶ = x + 1
    let mut phi = 1.0f64;
    for _ in 0..60 {
        phi = (1.0 + phi).powf(1.0 / 6.0);
    }
    let alpha: [f64; 5] = [1, 2, 3, 4, 5].map(|k| phi.powi(-k).fract());
    let mut out = Vec::with_capacity(count);
    let mut i = 0u64;
    while out.len() < count {
        i += 1;
        let x: [f64; 5] = [0, 1, 2, 3, 4].map(|k| 2.0 * (0.5 + alpha[k] * i as f64).fract() - 1.0);
        let r2: f64 = x.iter().map(|a| a * a).sum();
        if r2 <= 1.0 && r2 > 1e-4 {
            let r = r2.sqrt();
            out.push(x.map(|a| a / r));
        }
    }
    out
}

fn combine(basis: &[Mat3; 5], c: &[f64; 5]) -> Mat3 {
    (0..5).fold(Mat3::zeros(), |acc, k| acc + basis[k] * c[k])
}

/// Steepest descent direction `u_p` of `F` at `p` and `|grad_p(−F)|`.
///
/// `density` directions of the unit tangent sphere are scanned, then the
/// best is refined by golden-section searches along great circles until the
/// improvement stalls.
pub fn steepest_direction(
    f: &ConvexFunctional,
    p: &SpdPoint,
    density: usize,
) -> Result<(SymTangent, f64)> {
    let l = p.chol();
    let basis = traceless_basis();
    let to_tangent = |w: &Mat3| SymTangent::from_sym_unchecked(l * w * l.transpose());
    let f0 = f.value(p);
    let h = 1e-6;
    let quick = |w: &Mat3| (f.value(&exp_at(p, &to_tangent(w).scale(h))) - f0) / h;

    let dirs = sphere_directions(density.max(1));
    let mut best = combine(&basis, &dirs[0]);
    let mut best_val = f64::INFINITY;
    for d in &dirs {
        let w = combine(&basis, d);
        let v = quick(&w);
        if v < best_val {
            best_val = v;
            best = w;
        }
    }

    let exact = |w: &Mat3| directional_derivative(f, p, &to_tangent(w));
    let mut cur = best;
    let mut cur_val = exact(&cur)?;
    let mut width = 0.5;
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    for _round in 0..40 {
        let start_val = cur_val;
        for b in &basis {
            // great circle through cur toward the component of b orthogonal
            // to cur
            let mut t = b - cur * cur.dot(b);
            let tn = t.norm();
            if tn < 1e-8 {
                continue;
            }
            t /= tn;
            let point = |s: f64| cur * s.cos() + t * s.sin();
            let (mut a, mut c) = (-width, width);
            let mut x1 = c - gr * (c - a);
            let mut x2 = a + gr * (c - a);
            let mut f1 = exact(&point(x1))?;
            let mut f2 = exact(&point(x2))?;
            for _ in 0..30 {
                if f1 <= f2 {
                    c = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = c - gr * (c - a);
                    f1 = exact(&point(x1))?;
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + gr * (c - a);
                    f2 = exact(&point(x2))?;
                }
            }
            let (s, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
            if v < cur_val {
                cur = point(s);
                cur /= cur.norm();
                cur_val = v;
            }
        }
        width *= 0.5;
        if (start_val - cur_val).abs() < 1e-12 && width < 1e-3 {
            break;
        }
    }
    Ok((to_tangent(&cur), (-cur_val).max(0.0)))
}

/// Options of the proximal solver and of flows.
#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    /// Stop the inner solver when the chart gradient norm falls below this.
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    /// Abort a flow that gets this far from its start without decreasing.
    pub divergence_radius: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            inner_tol: 1e-9,
            inner_max_iter: 200,
            divergence_radius: 1e3,
        }
    }
}

/// Approximate minimizer of `y ↦ F(y) + d(x, y)²/(2τ)`.
pub fn proximal_step(f: &ConvexFunctional, x: &SpdPoint, tau: f64) -> Result<SpdPoint> {
    proximal_step_with(f, x, tau, &FlowOptions::default())
}

pub fn proximal_step_with(
    f: &ConvexFunctional,
    x: &SpdPoint,
    tau: f64,
    opts: &FlowOptions,
) -> Result<SpdPoint> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::validation("step size τ must be positive"));
    }
    let objective = |y: &SpdPoint| -> f64 { f.value(y) + dist(x, y).powi(2) / (2.0 * tau) };
    let obj_grad = |y: &SpdPoint| -> (f64, SymTangent) {
        let (fv, g) = f.value_and_grad(y);
        let v = log_at(y, x);
        let d2 = norm_at(y, &v).powi(2);
        (fv + d2 / (2.0 * tau), g.add(&v.scale(-1.0 / tau)))
    };
    let phi_x = f.value(x);

    // explicit Euler predictor
    let (_, gx) = f.value_and_grad(x);
    let mut y = *x;
    let mut phi = phi_x;
    if norm_at(x, &gx) > 0.0 {
        let pred = renormalize(exp_at(x, &gx.scale(-tau)), x.det_one());
        let pv = objective(&pred);
        if pv <= phi {
            y = pred;
            phi = pv;
        }
    }

    let mut step = tau;
    for _ in 0..opts.inner_max_iter {
        let (_, g) = obj_grad(&y);
        let gn = norm_at(&y, &g);
        if gn < opts.inner_tol {
            break;
        }
        let mut s = step * 2.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = renormalize(exp_at(&y, &g.scale(-s)), y.det_one());
            let cv = objective(&cand);
            if cv <= phi - 1e-4 * s * gn * gn {
                y = cand;
                phi = cv;
                step = s;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            // no representable decrease along the gradient
            break;
        }
    }
    if phi > phi_x + 1e-12 * (1.0 + phi_x.abs()) {
        return Err(Error::numerical(format!(
            "proximal objective increased from {phi_x:.12e} to {phi:.12e}"
        )));
    }
    Ok(y)
}

fn renormalize(p: SpdPoint, det_one: bool) -> SpdPoint {
    if det_one {
        p.normalize_det()
    } else {
        p
    }
}

/// A discretized gradient curve.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    #[serde(serialize_with = "ser_points")]
    pub points: Vec<SpdPoint>,
    pub values: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub tau: f64,
}

fn ser_points<S: serde::Serializer>(pts: &[SpdPoint], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct M<'a>(&'a Mat3);
    impl Serialize for M<'_> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ser_mat3(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(pts.len()))?;
    for p in pts {
        seq.serialize_element(&M(p.matrix()))?;
    }
    seq.end()
}

impl FlowTrace {
    pub fn last(&self) -> &SpdPoint {
        self.points.last().expect("nonempty trace")
    }

    /// CSV with columns `t,value,grad_norm`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,value,grad_norm\n");
        for k in 0..self.times.len() {
            s.push_str(&format!(
                "{},{},{}\n",
                self.times[k], self.values[k], self.grad_norms[k]
            ));
        }
        s
    }
}

/// Gradient curve on `[0, horizon]` by iterated proximal steps.
pub fn gradient_curve(f: &ConvexFunctional, p: &SpdPoint, horizon: f64, tau: f64) -> Result<FlowTrace> {
    if !(tau > 0.0) || !(horizon >= tau) {
        return Err(Error::validation("need horizon ≥ τ > 0"));
    }
    let steps = (horizon / tau).round() as usize;
    gradient_curve_steps(f, p, steps, tau, &FlowOptions::default())
}

/// `steps` proximal steps of size `tau`.
pub fn gradient_curve_steps(
    f: &ConvexFunctional,
    p: &SpdPoint,
    steps: usize,
    tau: f64,
    opts: &FlowOptions,
) -> Result<FlowTrace> {
    let mut trace = FlowTrace {
        times: Vec::with_capacity(steps + 1),
        points: Vec::with_capacity(steps + 1),
        values: Vec::with_capacity(steps + 1),
        grad_norms: Vec::with_capacity(steps + 1),
        tau,
    };
    let mut cur = *p;
    let (v0, g0) = f.value_and_grad(&cur);
    trace.times.push(0.0);
    trace.points.push(cur);
    trace.values.push(v0);
    trace.grad_norms.push(norm_at(&cur, &g0));
    let mut best = v0;
    for k in 1..=steps {
        let next = proximal_step_with(f, &cur, tau, opts)?;
        let (v, g) = f.value_and_grad(&next);
        if v < best {
            best = v;
        } else if dist(p, &next) > opts.divergence_radius {
            return Err(Error::numerical(format!(
                "flow left the ball of radius {} around its start without decreasing (step {k})",
                opts.divergence_radius
            )));
        }
        cur = next;
        trace.times.push(k as f64 * tau);
        trace.points.push(cur);
        trace.values.push(v);
        trace.grad_norms.push(norm_at(&cur, &g));
    }
    Ok(trace)
}

/// Busemann function `lim_{t→∞} d(p, γ(t)) − t`.
///
/// The values at `t = 2^k` are computed and must be non-increasing and
/// bounded below by the horospherical value, which is returned. Near-equal
/// eigenvalues of the direction give an `O(1/t)` tail that no ladder
/// reachable in double precision resolves, so extrapolating the ladder
/// would be off by up to `1e-2`.
pub fn busemann(ray: &RaySpec, p: &SpdPoint) -> Result<f64> {
    // In the eigenframe of the whitened direction the ray is diag(e^{t u}),
    // so d(p, γ(t)) is read off a diagonally scaled matrix, which Jacobi
    // resolves to relative accuracy even when γ(t) is badly conditioned.
    let li = lower_inverse(&ray.base.chol());
    let e = sym_eig(&whiten(&ray.base, ray.direction.matrix()))?;
    let m = e.frame.transpose() * li;
    let pt = m * p.matrix() * m.transpose();
    let u = e.values;
    let eval = |t: f64| -> Result<f64> {
        let mut s = pt;
        for i in 0..3 {
            for j in 0..3 {
                s[(i, j)] *= (-0.5 * t * (u[i] + u[j])).exp();
            }
        }
        let ev = sym_eig(&((s + s.transpose()) * 0.5))?;
        let d = ev
            .values
            .iter()
            .map(|x| x.max(symspace::EIG_FLOOR).ln().powi(2))
            .sum::<f64>()
            .sqrt();
        Ok(d - t)
    };
    let b = Horo::new(ray).value(p);
    let spread = (u[0] - u[2]).max(1e-3);
    let kmax = ((600.0 / spread).log2().floor() as i32).clamp(4, 40);
    let mut prev = f64::INFINITY;
    for k in 0..=kmax {
        let t = 2f64.powi(k);
        let x = eval(t)?;
        if x > prev + 1e-9 * (1.0 + t) {
            return Err(Error::numerical(format!(
                "non-monotone tail: d(p, γ(t)) − t rose from {prev:.12e} to {x:.12e} at t = {t}"
            )));
        }
        if x < b - 1e-9 * (1.0 + t) {
            return Err(Error::numerical(format!(
                "d(p, γ(t)) − t = {x:.12e} fell below the horospherical value {b:.12e} at t = {t}"
            )));
        }
        if (x - b).abs() < 1e-13 * (1.0 + t) {
            break;
        }
        prev = x;
    }
    Ok(b)
}

/// Closed-form Busemann function of the ray, for cross-checking
/// [`busemann`].
pub fn busemann_closed_form(ray: &RaySpec, p: &SpdPoint) -> f64 {
    Horo::new(ray).value(p)
}

/// Whether `F` is non-increasing along the ray (sampled at geometric times
/// up to `horizon`, allowing increases up to `1e-7`).
pub fn is_monotone_point(f: &ConvexFunctional, ray: &RaySpec) -> bool {
    is_monotone_point_with(f, ray, 64.0, 1e-7)
}

/// From a base off the standard flat, rounding in `d_g` grows like
/// `e^{t·(u₁ − u₃)/2}·ε` along the ray, so horizons past roughly
/// `30/(u₁ − u₃)` test rounding rather than monotonicity.
pub fn is_monotone_point_with(f: &ConvexFunctional, ray: &RaySpec, horizon: f64, tol: f64) -> bool {
    let along = match &f.kind {
        FunctionalKind::Displacement(g) => displacement_along(g, ray).ok(),
        _ => None,
    };
    let value = |t: f64| match &along {
        Some(h) => h(t),
        None => f.value(&ray.point(t)),
    };
    let mut prev = value(0.0);
    let mut t = 1.0 / 16.0;
    while t <= horizon * (1.0 + 1e-12) {
        let v = value(t);
        if v > prev + tol {
            return false;
        }
        prev = v;
        t *= 2.0;
    }
    true
}

/// `t ↦ d_g(γ(t))` evaluated in the eigenframe of the ray, where γ(t) is
/// diagonal and whitening reduces to rescaling entries.
fn displacement_along(g: &GroupElement, ray: &RaySpec) -> Result<impl Fn(f64) -> f64> {
    let l = ray.base.chol();
    let e = sym_eig(&whiten(&ray.base, ray.direction.matrix()))?;
    let a = l * e.frame;
    let ai = e.frame.transpose() * lower_inverse(&l);
    let h = ai * g.matrix() * a;
    let u = e.values;
    Ok(move |t: f64| {
        let mut m = h;
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] *= (0.5 * t * (u[j] - u[i])).exp();
            }
        }
        let s = m * m.transpose();
        match sym_eig(&((s + s.transpose()) * 0.5)) {
            Ok(ev) => ev
                .values
                .iter()
                .map(|x| x.max(symspace::EIG_FLOOR).ln().powi(2))
                .sum::<f64>()
                .sqrt(),
            Err(_) => f64::INFINITY,
        }
    })
}

/// Result of [`boundary_limit`].
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryLimit {
    pub point: BoundaryPoint,
    /// Largest Tits distance between the estimates from trailing windows.
    pub window_spread: f64,
    /// Distance of the last point from the start.
    pub escape_distance: f64,
}

/// Escape criteria for [`boundary_limit`].
#[derive(Debug, Clone, Copy)]
pub struct EscapeOptions {
    /// Minimum distance of the last point from the start.
    pub radius: f64,
    /// Minimum distance covered by the second half of the trace.
    pub trailing_motion: f64,
    /// Required agreement of the trailing-window estimates.
    pub window_tol: f64,
}

impl Default for EscapeOptions {
    fn default() -> Self {
        Self {
            radius: 4.0,
            trailing_motion: 0.2,
            window_tol: 1e-3,
        }
    }
}

/// Endpoint at infinity of an escaping flow.
///
/// The direction is read off the chord between two late points, for three
/// nested trailing windows; the estimates must agree to `window_tol`.
pub fn boundary_limit(trace: &FlowTrace) -> Result<BoundaryLimit> {
    boundary_limit_with(trace, &EscapeOptions::default())
}

pub fn boundary_limit_with(trace: &FlowTrace, opts: &EscapeOptions) -> Result<BoundaryLimit> {
    let n = trace.points.len();
    if n < 8 {
        return Err(Error::NoBoundaryLimit("trace too short".into()));
    }
    let start = &trace.points[0];
    let last = &trace.points[n - 1];
    let esc = dist(start, last);
    let tail = dist(&trace.points[n / 2], last);
    if esc < opts.radius || tail < opts.trailing_motion {
        return Err(Error::NoBoundaryLimit(format!(
            "trace stays bounded: distance from start {esc:.4}, trailing motion {tail:.4}"
        )));
    }
    let est = |from: usize| building::boundary_point_through(&trace.points[from], last);
    let i1 = n / 2;
    let i2 = n / 2 + n / 8;
    let i3 = n / 2 + n / 4;
    let x1 = est(i1)?;
    let x2 = est(i2)?;
    let x3 = est(i3)?;
    let tol = 1e-6;
    let spread = building::tits_distance_tol(&x1, &x3, tol)
        .max(building::tits_distance_tol(&x2, &x3, tol))
        .max(building::tits_distance_tol(&x1, &x2, tol));
    if spread > opts.window_tol {
        return Err(Error::NoBoundaryLimit(format!(
            "trailing-window estimates disagree by {spread:.3e}"
        )));
    }
    Ok(BoundaryLimit {
        point: x3,
        window_spread: spread,
        escape_distance: esc,
    })
}

/// Angle at `p` between the geodesic to `q` and `v`.
pub fn angle_to_point(p: &SpdPoint, q: &SpdPoint, v: &SymTangent) -> Result<f64> {
    symspace::angle_at(p, &log_at(p, q), v)
}

/// Random unit tangent at `p`, uniform on the whitened unit sphere.
pub fn random_unit_tangent<R: rand::Rng + ?Sized>(rng: &mut R, p: &SpdPoint) -> SymTangent {
    let w = symspace::random_traceless::<R, 3>(rng, 1.0);
    let l = p.chol();
    SymTangent::from_sym_unchecked(l * w.matrix() * l.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_sampler_is_unit_and_deterministic() {
        let a = sphere_directions(64);
        let b = sphere_directions(64);
        assert_eq!(a, b);
        for d in &a {
            let n: f64 = d.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn traceless_basis_is_orthonormal() {
        let b = traceless_basis();
        for i in 0..5 {
            assert!(b[i].trace().abs() < 1e-15);
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((b[i].dot(&b[j]) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn constant_prox_is_identity() {
        let x = SpdPoint::diag([2.0, 1.0, 0.5]).unwrap();
        let y = proximal_step(&ConvexFunctional::constant(3.0), &x, 0.5).unwrap();
        assert_eq!(y, x);
    }
}
