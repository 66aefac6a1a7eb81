//! Python bindings. Matrices cross the boundary as nested lists; structured
//! reports come back as plain dicts.

use ::cat0lab::building::{self, BoundaryPoint as CoreBoundaryPoint};
use ::cat0lab::cat1;
use ::cat0lab::gradflow::{self, ConvexFunctional, FlowTrace as CoreTrace, RaySpec};
use ::cat0lab::isometry::{self, GroupElement as CoreGroupElement};
use ::cat0lab::symspace::{self, Mat3, SpdPoint as CoreSpdPoint, SymTangent};
use ::cat0lab::Error;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn mat(rows: Vec<Vec<f64>>) -> PyResult<Mat3> {
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(PyValueError::new_err("expected a 3x3 matrix"));
    }
    Ok(Mat3::from_fn(|i, j| rows[i][j]))
}

fn rows(m: &Mat3) -> Vec<Vec<f64>> {
    (0..3).map(|i| (0..3).map(|j| m[(i, j)]).collect()).collect()
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

/// A positive-definite symmetric 3x3 matrix.
#[pyclass(frozen, skip_from_py_object, module = "cat0lab")]
#[derive(Clone)]
struct SpdPoint(CoreSpdPoint);

#[pymethods]
impl SpdPoint {
    #[new]
    #[pyo3(signature = (matrix, normalize = false))]
    fn new(matrix: Vec<Vec<f64>>, normalize: bool) -> PyResult<Self> {
        let p = CoreSpdPoint::new(mat(matrix)?).map_err(err)?;
        Ok(Self(if normalize { p.normalize_det() } else { p }))
    }

    #[staticmethod]
    fn identity() -> Self {
        Self(CoreSpdPoint::identity())
    }

    #[staticmethod]
    fn diag(d: [f64; 3]) -> PyResult<Self> {
        CoreSpdPoint::diag(d).map(Self).map_err(err)
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        rows(self.0.matrix())
    }

    fn det(&self) -> f64 {
        self.0.det()
    }

    fn dist(&self, other: &SpdPoint) -> f64 {
        symspace::dist(&self.0, &other.0)
    }

    fn geodesic(&self, other: &SpdPoint, t: f64) -> Self {
        Self(symspace::geodesic(&self.0, &other.0, t))
    }

    fn log(&self, other: &SpdPoint) -> Vec<Vec<f64>> {
        rows(symspace::log_at(&self.0, &other.0).matrix())
    }

    fn exp(&self, v: Vec<Vec<f64>>) -> PyResult<Self> {
        let v = SymTangent::new(mat(v)?).map_err(err)?;
        Ok(Self(symspace::exp_at(&self.0, &v)))
    }

    fn __repr__(&self) -> String {
        format!("SpdPoint({:?})", self.matrix())
    }
}

/// An element of SL(3,R) acting by g·p = g p gᵀ.
#[pyclass(frozen, skip_from_py_object, module = "cat0lab")]
#[derive(Clone)]
struct GroupElement(CoreGroupElement);

#[pymethods]
impl GroupElement {
    #[new]
    #[pyo3(signature = (matrix, normalize = false))]
    fn new(matrix: Vec<Vec<f64>>, normalize: bool) -> PyResult<Self> {
        let m = mat(matrix)?;
        let g = if normalize { CoreGroupElement::normalized(m) } else { CoreGroupElement::new(m) };
        g.map(Self).map_err(err)
    }

    #[staticmethod]
    fn normal_form(case_id: u8, params: Vec<f64>) -> PyResult<Self> {
        let m = isometry::normal_form(case_id, &params).map_err(err)?;
        CoreGroupElement::new(m).map(Self).map_err(err)
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        rows(self.0.matrix())
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn __mul__(&self, other: &GroupElement) -> Self {
        Self(self.0.mul(&other.0))
    }

    fn conjugate_by(&self, h: &GroupElement) -> Self {
        Self(self.0.conjugate_by(&h.0))
    }

    fn act(&self, p: &SpdPoint) -> SpdPoint {
        SpdPoint(isometry::act(&self.0, &p.0))
    }

    fn displacement(&self, p: &SpdPoint) -> f64 {
        isometry::displacement(&self.0, &p.0)
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &isometry::classify(&self.0).map_err(err)?)
    }

    #[pyo3(signature = (steps = 2000, tau = 0.1))]
    fn translation_length_numeric(&self, steps: usize, tau: f64) -> PyResult<f64> {
        isometry::translation_length_numeric(&self.0, steps, tau).map(|r| r.0).map_err(err)
    }

    fn fixed_set<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &building::fixed_set(&self.0).map_err(err)?)
    }

    fn sample_fixed_set(&self, n: usize, seed: u64) -> PyResult<Vec<BoundaryPoint>> {
        let desc = building::fixed_set(&self.0).map_err(err)?;
        let pts = building::sample_fixed_set(&desc, n, seed).map_err(err)?;
        Ok(pts.into_iter().map(BoundaryPoint).collect())
    }

    fn fixes(&self, x: &BoundaryPoint) -> bool {
        building::is_fixed(&self.0, &x.0)
    }

    fn __repr__(&self) -> String {
        format!("GroupElement({:?})", self.matrix())
    }
}

/// A point of the ideal boundary, stored as a flag and an angle in [0, π/3].
#[pyclass(frozen, from_py_object, module = "cat0lab")]
#[derive(Clone)]
struct BoundaryPoint(CoreBoundaryPoint);

#[pymethods]
impl BoundaryPoint {
    /// Vertex `k` of the standard apartment, `k` in 0..6.
    #[staticmethod]
    fn standard_vertex(k: usize) -> PyResult<Self> {
        building::standard_vertices()
            .get(k)
            .copied()
            .map(Self)
            .ok_or_else(|| PyValueError::new_err("vertex index must be below 6"))
    }

    /// The point at arc length `alpha` around the standard apartment.
    #[staticmethod]
    fn standard_apartment(alpha: f64) -> Self {
        Self(building::Frame::standard().point_at(alpha))
    }

    /// Endpoint of the geodesic ray from the identity with direction `u`.
    #[staticmethod]
    fn from_direction(u: Vec<Vec<f64>>) -> PyResult<Self> {
        let u = SymTangent::new(mat(u)?).map_err(err)?;
        building::from_direction_at_identity(&u).map(Self).map_err(err)
    }

    /// Unit traceless direction at the identity pointing at this point.
    fn direction(&self) -> Vec<Vec<f64>> {
        rows(building::direction_at_identity(&self.0).matrix())
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }

    fn distance(&self, other: &BoundaryPoint) -> f64 {
        building::tits_distance(&self.0, &other.0)
    }

    fn image(&self, g: &GroupElement) -> Self {
        Self(self.0.image(g.0.matrix()))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        format!("BoundaryPoint(theta={})", self.0.theta)
    }
}

/// A convex function on the symmetric space.
#[pyclass(frozen, skip_from_py_object, module = "cat0lab")]
#[derive(Clone)]
struct Functional(ConvexFunctional);

#[pymethods]
impl Functional {
    #[staticmethod]
    fn displacement(g: &GroupElement) -> Self {
        Self(ConvexFunctional::displacement(g.0))
    }

    #[staticmethod]
    fn busemann(base: &SpdPoint, x: &BoundaryPoint) -> Self {
        Self(ConvexFunctional::busemann(RaySpec::toward(base.0, &x.0)))
    }

    #[staticmethod]
    fn dist_to_point(q: &SpdPoint) -> Self {
        Self(ConvexFunctional::dist_to_point(q.0))
    }

    #[staticmethod]
    fn half_dist_sq(q: &SpdPoint) -> Self {
        Self(ConvexFunctional::half_dist_sq(q.0))
    }

    #[staticmethod]
    fn dist_to_flat() -> Self {
        Self(ConvexFunctional::dist_to_flat())
    }

    #[getter]
    fn tag(&self) -> &'static str {
        self.0.tag()
    }

    fn __call__(&self, p: &SpdPoint) -> f64 {
        self.0.value(&p.0)
    }

    fn prox(&self, p: &SpdPoint, tau: f64) -> PyResult<SpdPoint> {
        gradflow::proximal_step(&self.0, &p.0, tau).map(SpdPoint).map_err(err)
    }

    /// Proximal gradient curve from `p` up to time `horizon`.
    #[pyo3(signature = (p, horizon, tau = 1.0))]
    fn flow(&self, py: Python<'_>, p: &SpdPoint, horizon: f64, tau: f64) -> PyResult<FlowTrace> {
        let f = self.0.clone();
        let p = p.0;
        py.detach(move || gradflow::gradient_curve(&f, &p, horizon, tau)).map(FlowTrace).map_err(err)
    }

    /// Whether the ray from `base` toward `x` is a monotone point of this functional.
    fn is_monotone(&self, base: &SpdPoint, x: &BoundaryPoint) -> bool {
        gradflow::is_monotone_point(&self.0, &RaySpec::toward(base.0, &x.0))
    }
}

/// A discretized gradient curve.
#[pyclass(frozen, module = "cat0lab")]
struct FlowTrace(CoreTrace);

#[pymethods]
impl FlowTrace {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }

    #[getter]
    fn grad_norms(&self) -> Vec<f64> {
        self.0.grad_norms.clone()
    }

    fn points(&self) -> Vec<SpdPoint> {
        self.0.points.iter().copied().map(SpdPoint).collect()
    }

    fn last(&self) -> SpdPoint {
        SpdPoint(*self.0.last())
    }

    /// The boundary point the curve escapes toward; raises ArithmeticError
    /// when the curve stays bounded or has not settled.
    fn boundary_limit(&self) -> PyResult<BoundaryPoint> {
        gradflow::boundary_limit(&self.0).map(|l| BoundaryPoint(l.point)).map_err(err)
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __len__(&self) -> usize {
        self.0.times.len()
    }
}

/// A finite metric space given by its distance matrix.
#[pyclass(frozen, module = "cat0lab")]
struct MetricSample(cat1::FiniteMetricSample);

#[pymethods]
impl MetricSample {
    #[new]
    fn new(ids: Vec<String>, matrix: Vec<Vec<f64>>) -> PyResult<Self> {
        cat1::FiniteMetricSample::new(ids, matrix).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_boundary_points(points: Vec<BoundaryPoint>) -> PyResult<Self> {
        let pts: Vec<CoreBoundaryPoint> = points.into_iter().map(|p| p.0).collect();
        let ids = (0..pts.len()).map(|k| k.to_string()).collect();
        cat1::FiniteMetricSample::new(ids, building::tits_distance_matrix(&pts)).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        cat1::FiniteMetricSample::from_json(s).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn minimax_center<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &cat1::minimax_center(&self.0).map_err(err)?)
    }

    fn diameter(&self) -> f64 {
        cat1::diameter(&self.0)
    }
}

/// Angle at the vertex opposite side `a` of the spherical comparison triangle.
#[pyfunction]
fn comparison_angle(a: f64, b: f64, c: f64) -> PyResult<f64> {
    cat1::comparison_angle(a, b, c).map_err(err)
}

/// Radius, center and center-of-centers of the spherical simplex of dimension `m`.
#[pyfunction]
fn simplex_geometry<'py>(py: Python<'py>, m: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &cat1::simplex_geometry(m).map_err(err)?)
}

#[pyfunction]
fn list_suites() -> Vec<(&'static str, &'static str, &'static str)> {
    ::cat0lab::verify::SUITES.to_vec()
}

#[pyfunction]
#[pyo3(signature = (name, seed = 0, samples = None))]
fn run_suite<'py>(py: Python<'py>, name: &str, seed: u64, samples: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let name = name.to_owned();
    let r = py.detach(move || ::cat0lab::verify::run_suite(&name, seed, samples)).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
#[pyo3(name = "cat0lab")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SpdPoint>()?;
    m.add_class::<GroupElement>()?;
    m.add_class::<BoundaryPoint>()?;
    m.add_class::<Functional>()?;
    m.add_class::<FlowTrace>()?;
    m.add_class::<MetricSample>()?;
    m.add_function(wrap_pyfunction!(comparison_angle, m)?)?;
    m.add_function(wrap_pyfunction!(simplex_geometry, m)?)?;
    m.add_function(wrap_pyfunction!(list_suites, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
