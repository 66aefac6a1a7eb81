//! Riemannian geometry of positive-definite symmetric matrices with the
//! affine-invariant metric `(u, v)_p = tr(p⁻¹ u p⁻¹ v)`.
//!
//! Everything is computed in a whitened chart: with `p = L Lᵀ` (Cholesky),
//! the map `v ↦ L⁻¹ v L⁻ᵀ` is an isometry from `T_p` onto the symmetric
//! matrices with the Frobenius inner product, and it sends the geodesic
//! through `p` to a matrix exponential through the identity.

use nalgebra::{SMatrix, SVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Mat<const N: usize> = SMatrix<f64, N, N>;
pub type Mat3 = Mat<3>;

/// Relative symmetry tolerance accepted by the constructors.
pub const SYM_TOL: f64 = 1e-12;
/// Determinant tolerance for points of the det-1 slice.
pub const DET_TOL: f64 = 1e-9;
/// Lower clamp applied to eigenvalues before taking logarithms.
pub const EIG_FLOOR: f64 = 1e-300;

const JACOBI_MAX_SWEEPS: usize = 64;

fn asymmetry<const N: usize>(m: &Mat<N>) -> f64 {
    (m - m.transpose()).norm()
}

fn symmetrize<const N: usize>(m: &Mat<N>) -> Mat<N> {
    (m + m.transpose()) * 0.5
}

fn check_symmetric<const N: usize>(m: &Mat<N>) -> Result<()> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let scale = m.norm().max(1.0);
    if asymmetry(m) > SYM_TOL * scale {
        return Err(Error::validation(format!(
            "matrix is not symmetric (asymmetry {:.3e})",
            asymmetry(m)
        )));
    }
    Ok(())
}

/// A symmetric matrix viewed as a tangent vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTangent<const N: usize = 3> {
    m: Mat<N>,
}

impl<const N: usize> SymTangent<N> {
    /// Validates symmetry and stores the symmetrized matrix.
    pub fn new(m: Mat<N>) -> Result<Self> {
        check_symmetric(&m)?;
        Ok(Self { m: symmetrize(&m) })
    }

    /// Validates symmetry and a vanishing trace (tangent to the det-1 slice).
    pub fn traceless(m: Mat<N>) -> Result<Self> {
        let t = Self::new(m)?;
        if t.trace().abs() > SYM_TOL * t.m.norm().max(1.0) {
            return Err(Error::validation(format!(
                "tangent has trace {:.3e}, expected 0",
                t.trace()
            )));
        }
        Ok(t)
    }

    pub(crate) fn from_sym_unchecked(m: Mat<N>) -> Self {
        Self { m: symmetrize(&m) }
    }

    pub fn diag(d: [f64; N]) -> Self {
        Self {
            m: Mat::<N>::from_diagonal(&SVector::<f64, N>::from(d)),
        }
    }

    pub fn zero() -> Self {
        Self { m: Mat::<N>::zeros() }
    }

    pub fn matrix(&self) -> &Mat<N> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Frobenius norm, i.e. the Riemannian norm at the identity.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m * s }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: self.m + other.m }
    }

    /// Removes the trace part.
    pub fn project_traceless(&self) -> Self {
        let t = self.trace() / N as f64;
        Self {
            m: self.m - Mat::<N>::identity() * t,
        }
    }
}

/// A positive-definite symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdPoint<const N: usize = 3> {
    m: Mat<N>,
    det_one: bool,
}

impl<const N: usize> SpdPoint<N> {
    /// Validates symmetry and positive definiteness.
    pub fn new(m: Mat<N>) -> Result<Self> {
        check_symmetric(&m)?;
        let m = symmetrize(&m);
        if cholesky(&m).is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { m, det_one: false })
    }

    /// Like [`SpdPoint::new`] but additionally requires `|det − 1| ≤ 1e-9`.
    pub fn new_det_one(m: Mat<N>) -> Result<Self> {
        let p = Self::new(m)?;
        let d = p.det();
        if (d - 1.0).abs() > DET_TOL {
            return Err(Error::validation(format!(
                "determinant {d:.12} differs from 1"
            )));
        }
        Ok(Self { det_one: true, ..p })
    }

    /// Explicit rescaling by `det^{-1/n}` onto the det-1 slice.
    pub fn normalize_det(&self) -> Self {
        let d = self.det();
        Self {
            m: self.m * d.powf(-1.0 / N as f64),
            det_one: true,
        }
    }

    pub(crate) fn from_spd_unchecked(m: Mat<N>, det_one: bool) -> Self {
        Self {
            m: symmetrize(&m),
            det_one,
        }
    }

    pub fn identity() -> Self {
        Self {
            m: Mat::<N>::identity(),
            det_one: true,
        }
    }

    pub fn diag(d: [f64; N]) -> Result<Self> {
        let m = Mat::<N>::from_diagonal(&SVector::<f64, N>::from(d));
        let p = Self::new(m)?;
        let det_one = (p.det() - 1.0).abs() <= DET_TOL;
        Ok(Self { det_one, ..p })
    }

    pub fn matrix(&self) -> &Mat<N> {
        &self.m
    }

    pub fn det_one(&self) -> bool {
        self.det_one
    }

    pub fn det(&self) -> f64 {
        let l = cholesky(&self.m).expect("SpdPoint holds a positive-definite matrix");
        (0..N).map(|i| l[(i, i)] * l[(i, i)]).product()
    }

    /// Lower-triangular Cholesky factor.
    pub fn chol(&self) -> Mat<N> {
        cholesky(&self.m).expect("SpdPoint holds a positive-definite matrix")
    }
}

/// Eigenvalues in descending order with an orthogonal frame of column
/// eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigDecomp<const N: usize = 3> {
    pub values: SVector<f64, N>,
    pub frame: Mat<N>,
}

impl<const N: usize> EigDecomp<N> {
    pub fn reconstruct(&self) -> Mat<N> {
        self.map(|x| x)
    }

    /// `Q f(Λ) Qᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat<N> {
        let mut d = self.values;
        d.iter_mut().for_each(|x| *x = f(*x));
        symmetrize(&(self.frame * Mat::<N>::from_diagonal(&d) * self.frame.transpose()))
    }
}

/// Lower Cholesky factor, or `None` when the matrix is not positive definite.
pub fn cholesky<const N: usize>(m: &Mat<N>) -> Option<Mat<N>> {
    let mut l = Mat::<N>::zeros();
    for j in 0..N {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..N {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Inverse of a nonsingular lower-triangular matrix.
pub fn lower_inverse<const N: usize>(l: &Mat<N>) -> Mat<N> {
    let mut x = Mat::<N>::zeros();
    for c in 0..N {
        for i in c..N {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// A rotation is skipped once `|a_pq| ≤ 4ε·sqrt(|a_pp a_qq|)`, which keeps
/// small eigenvalues of strongly graded positive-definite matrices accurate
/// to working relative precision. The final off-diagonal mass is checked
/// against `1e-13·‖S‖`.
pub fn sym_eig<const N: usize>(s: &Mat<N>) -> Result<EigDecomp<N>> {
    check_symmetric(s)?;
    let mut a = symmetrize(s);
    let mut v = Mat::<N>::identity();
    let scale = a.norm();
    let eps = f64::EPSILON;

    let mut converged = N < 2 || scale == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                if apq.abs() <= 4.0 * eps * (app * aqq).abs().sqrt()
                    || apq.abs() <= f64::MIN_POSITIVE * scale
                {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..N {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        let np = c * arp - sn * arq;
                        let nq = sn * arp + c * arq;
                        a[(r, p)] = np;
                        a[(p, r)] = np;
                        a[(r, q)] = nq;
                        a[(q, r)] = nq;
                    }
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - sn * vrq;
                    v[(r, q)] = sn * vrp + c * vrq;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    let mut off = 0.0;
    for p in 0..N {
        for q in 0..N {
            if p != q {
                off += a[(p, q)] * a[(p, q)];
            }
        }
    }
    if !converged || off.sqrt() > 1e-13 * scale {
        return Err(Error::numerical("Jacobi eigensolver did not converge"));
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let mut values = SVector::<f64, N>::zeros();
    let mut frame = Mat::<N>::zeros();
    for (k, &i) in order.iter().enumerate() {
        values[k] = a[(i, i)];
        let mut col = v.column(i).into_owned();
        col.normalize_mut();
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                col = -col;
            }
        }
        frame.set_column(k, &col);
    }
    Ok(EigDecomp { values, frame })
}

/// Matrix exponential of a symmetric matrix.
pub fn spd_exp<const N: usize>(u: &SymTangent<N>) -> SpdPoint<N> {
    let e = sym_eig(&u.m).expect("SymTangent is symmetric");
    let det_one = u.trace().abs() <= SYM_TOL * u.norm().max(1.0);
    SpdPoint::from_spd_unchecked(e.map(f64::exp), det_one)
}

/// Principal logarithm of a positive-definite matrix.
pub fn spd_log<const N: usize>(p: &SpdPoint<N>) -> SymTangent<N> {
    let e = sym_eig(&p.m).expect("SpdPoint is symmetric");
    SymTangent::from_sym_unchecked(e.map(|x| x.max(EIG_FLOOR).ln()))
}

/// Logarithm of an arbitrary symmetric matrix; fails unless it is positive
/// definite.
pub fn spd_log_matrix<const N: usize>(m: &Mat<N>) -> Result<SymTangent<N>> {
    let e = sym_eig(m)?;
    if e.values.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(SymTangent::from_sym_unchecked(e.map(f64::ln)))
}

/// `L⁻¹ q L⁻ᵀ` where `L` is the Cholesky factor of `p`.
pub fn whiten<const N: usize>(p: &SpdPoint<N>, q: &Mat<N>) -> Mat<N> {
    let li = lower_inverse(&p.chol());
    symmetrize(&(li * q * li.transpose()))
}

/// Inverse of [`whiten`]: `L w Lᵀ`.
pub fn unwhiten<const N: usize>(p: &SpdPoint<N>, w: &Mat<N>) -> Mat<N> {
    let l = p.chol();
    symmetrize(&(l * w * l.transpose()))
}

/// Riemannian distance `‖log(p^{-1/2} q p^{-1/2})‖_F`.
pub fn dist<const N: usize>(p: &SpdPoint<N>, q: &SpdPoint<N>) -> f64 {
    let w = whiten(p, &q.m);
    let e = sym_eig(&w).expect("whitened matrix is symmetric");
    e.values
        .iter()
        .map(|&x| {
            let l = x.max(EIG_FLOOR).ln();
            l * l
        })
        .sum::<f64>()
        .sqrt()
}

/// Distance from the identity, `‖log p‖_F`.
pub fn dist_from_identity<const N: usize>(p: &SpdPoint<N>) -> f64 {
    let e = sym_eig(&p.m).expect("SpdPoint is symmetric");
    e.values
        .iter()
        .map(|&x| x.max(EIG_FLOOR).ln().powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn inner_at<const N: usize>(p: &SpdPoint<N>, u: &SymTangent<N>, v: &SymTangent<N>) -> f64 {
    whiten(p, &u.m).dot(&whiten(p, &v.m))
}

pub fn norm_at<const N: usize>(p: &SpdPoint<N>, u: &SymTangent<N>) -> f64 {
    whiten(p, &u.m).norm()
}

/// Riemannian exponential map at `p`.
pub fn exp_at<const N: usize>(p: &SpdPoint<N>, v: &SymTangent<N>) -> SpdPoint<N> {
    let w = SymTangent::from_sym_unchecked(whiten(p, &v.m));
    let e = spd_exp(&w);
    let det_one = p.det_one && v.trace_at(p).abs() <= 1e-10 * v.norm().max(1.0);
    SpdPoint::from_spd_unchecked(unwhiten(p, &e.m), det_one)
}

/// Riemannian logarithm at `p`: the initial velocity of the unit-time
/// geodesic from `p` to `q`.
pub fn log_at<const N: usize>(p: &SpdPoint<N>, q: &SpdPoint<N>) -> SymTangent<N> {
    let w = whiten(p, &q.m);
    let e = sym_eig(&w).expect("whitened matrix is symmetric");
    SymTangent::from_sym_unchecked(unwhiten(p, &e.map(|x| x.max(EIG_FLOOR).ln())))
}

impl<const N: usize> SymTangent<N> {
    /// `tr(p⁻¹ v)`: derivative of `log det` in direction `v` at `p`.
    pub fn trace_at(&self, p: &SpdPoint<N>) -> f64 {
        whiten(p, &self.m).trace()
    }
}

/// Constant-speed geodesic with `geodesic(p, q, 0) = p` and
/// `geodesic(p, q, 1) = q`.
pub fn geodesic<const N: usize>(p: &SpdPoint<N>, q: &SpdPoint<N>, t: f64) -> SpdPoint<N> {
    let w = whiten(p, &q.m);
    let e = sym_eig(&w).expect("whitened matrix is symmetric");
    let wt = e.map(|x| x.max(EIG_FLOOR).powf(t));
    SpdPoint::from_spd_unchecked(unwhiten(p, &wt), p.det_one && q.det_one)
}

/// Unit-speed ray from `p` in direction `u`. The direction is normalized in
/// the metric at `p`.
pub fn ray<const N: usize>(p: &SpdPoint<N>, u: &SymTangent<N>, t: f64) -> Result<SpdPoint<N>> {
    let n = norm_at(p, u);
    if !(n > 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(exp_at(p, &u.scale(t / n)))
}

/// Riemannian angle between two nonzero tangent vectors at `p`, in `[0, π]`.
pub fn angle_at<const N: usize>(p: &SpdPoint<N>, u: &SymTangent<N>, v: &SymTangent<N>) -> Result<f64> {
    let a = whiten(p, &u.m);
    let b = whiten(p, &v.m);
    frobenius_angle(&a, &b)
}

/// Angle between two nonzero matrices in the Frobenius inner product.
pub fn frobenius_angle<const N: usize>(a: &Mat<N>, b: &Mat<N>) -> Result<f64> {
    let na = a.norm();
    let nb = b.norm();
    if !(na > 0.0) || !(nb > 0.0) {
        return Err(Error::ZeroVector);
    }
    let a = a / na;
    let b = b / nb;
    Ok(2.0 * (a - b).norm().atan2((a + b).norm()))
}

/// Random symmetric trace-0 matrix with Gaussian entries, scaled to
/// Frobenius norm `r`.
pub fn random_traceless<R: Rng + ?Sized, const N: usize>(rng: &mut R, r: f64) -> SymTangent<N> {
    loop {
        let mut m = Mat::<N>::zeros();
        for i in 0..N {
            for j in i..N {
                let x: f64 = rng.sample(StandardNormal);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        let t = SymTangent::from_sym_unchecked(m).project_traceless();
        let n = t.norm();
        if n > 1e-8 {
            return t.scale(r / n);
        }
    }
}

/// Random point of the det-1 slice at distance at most `rmax` from the
/// identity.
pub fn random_point<R: Rng + ?Sized, const N: usize>(rng: &mut R, rmax: f64) -> SpdPoint<N> {
    let r = rmax * rng.random::<f64>();
    spd_exp(&random_traceless::<R, N>(rng, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eig_of_identity_and_diagonal() {
        let e = sym_eig(&Mat3::identity()).unwrap();
        assert_eq!(e.values, SVector::<f64, 3>::new(1.0, 1.0, 1.0));
        let e = sym_eig(&Mat3::from_diagonal(&SVector::<f64, 3>::new(3.0, 2.0, 1.0))).unwrap();
        assert_eq!(e.values, SVector::<f64, 3>::new(3.0, 2.0, 1.0));
        assert_eq!(e.frame, Mat3::identity());
    }

    #[test]
    fn eig_rejects_asymmetric() {
        let mut m = Mat3::identity();
        m[(0, 1)] = 1.0;
        assert!(matches!(sym_eig(&m), Err(Error::Validation(_))));
    }

    #[test]
    fn eig_sign_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = *random_traceless::<_, 3>(&mut rng, 2.0).matrix();
            let e = sym_eig(&s).unwrap();
            for k in 0..3 {
                let col = e.frame.column(k);
                let first = col.iter().find(|x| x.abs() > 1e-12).unwrap();
                assert!(*first > 0.0);
            }
            assert!(e.values[0] >= e.values[1] && e.values[1] >= e.values[2]);
        }
    }

    #[test]
    fn graded_matrix_small_eigenvalue_is_relatively_accurate() {
        // q = R diag(1e12, 1, 1e-12) Rᵀ, with R a rotation with exact entries
        let c = 0.6;
        let s = 0.8;
        let r = Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        let d = Mat3::from_diagonal(&SVector::<f64, 3>::new(1e12, 1.0, 1e-12));
        let p = SpdPoint::new(r * d * r.transpose()).unwrap();
        let dd = dist_from_identity(&p);
        let want = (2.0 * (1e12f64).ln().powi(2)).sqrt();
        assert!((dd - want).abs() < 1e-9 * want);
    }

    #[test]
    fn exp_of_diagonal() {
        let p = spd_exp(&SymTangent::diag([1.0, 1.0, -2.0]));
        let e = std::f64::consts::E;
        let want = Mat3::from_diagonal(&SVector::<f64, 3>::new(e, e, e.powi(-2)));
        assert!((p.matrix() - want).norm() < 1e-14);
        assert!(p.det_one());
        assert_eq!(*spd_exp(&SymTangent::<3>::zero()).matrix(), Mat3::identity());
    }

    #[test]
    fn log_rejects_indefinite() {
        let m = Mat3::from_diagonal(&SVector::<f64, 3>::new(1.0, -1.0, 1.0));
        assert_eq!(spd_log_matrix(&m), Err(Error::NotPositiveDefinite));
        assert_eq!(SpdPoint::new(m), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn det_one_constructor() {
        assert!(SpdPoint::new_det_one(Mat3::identity() * 2.0).is_err());
        let p = SpdPoint::new(Mat3::identity() * 2.0).unwrap().normalize_det();
        assert!((p.det() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ray_rejects_zero() {
        let e = SpdPoint::<3>::identity();
        assert_eq!(ray(&e, &SymTangent::zero(), 1.0), Err(Error::ZeroVector));
    }

    #[test]
    fn angle_examples() {
        let e = SpdPoint::<3>::identity();
        let u = SymTangent::diag([1.0, -1.0, 0.0]);
        let v = SymTangent::new(Mat3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(angle_at(&e, &u, &u).unwrap(), 0.0);
        assert!((angle_at(&e, &u, &v).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(angle_at(&e, &u, &SymTangent::zero()), Err(Error::ZeroVector));
    }
}
