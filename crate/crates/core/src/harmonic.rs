//! Leafwise Laplacians, Green–Riesz checks and harmonicity defects.
//!
//! All test functions are given in a planar chart `(x, y)`. The hyperbolic
//! Laplacian is conformal to the Euclidean one: `Δ_P f = y² Δ_E f` in the
//! half-plane and `Δ_P f = ((1 - |z|²)²/4) Δ_E f` in the disk, so that
//! `Δ_P f v_P = Δ_E f v_E` in both models.

use crate::error::{Error, Result};
use crate::measure::{neumaier_sum, NodeMeasure};
use crate::quad::{
    boundary_integral, integrate_1d, integrate_polar_annulus, integrate_polar_disk, laplacian_fd, AreaForm, Domain,
    Interval1D,
};
use crate::weights::{normalizer, WeightKind, WeightProfile};
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub type PlaneFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Step of the central differences used for normal derivatives on circles.
pub const NORMAL_STEP: f64 = 1e-5;

/// Relative step of the extrapolated finite-difference Laplacian.
pub const FD_STEP: f64 = 1e-3;

/// Absolute accuracy floor of the jump integral in the boundary closed form; the
/// jump `f(R' e^{iθ}) - f(R e^{iθ})` carries round-off of this order.
const JUMP_FLOOR: f64 = 1e-14;

/// A `C²` function on a planar chart with its sup norm and, when known, its
/// Euclidean Laplacian.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: PlaneFn,
    laplacian_e: Option<PlaneFn>,
    sup_norm: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("analytic_laplacian", &self.laplacian_e.is_some())
            .field("sup_norm", &self.sup_norm)
            .finish()
    }
}

impl TestFunction {
    /// `sup_norm` is the sup of `|f|` over the region where the function is used.
    pub fn new(name: impl Into<String>, eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, sup_norm: f64) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            laplacian_e: None,
            sup_norm,
        }
    }

    pub fn with_laplacian(mut self, lap: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.laplacian_e = Some(Arc::new(lap));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn has_analytic_laplacian(&self) -> bool {
        self.laplacian_e.is_some()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    /// `Δ_E f`, analytic when available and otherwise by finite differences: the
    /// 9-point stencil at steps `h` and `2h`, `h = 1e-3` times the distance to the
    /// domain boundary, Richardson-extrapolated to remove the `h²` term.
    pub fn laplacian_e(&self, x: f64, y: f64, domain: Domain) -> Result<f64> {
        match &self.laplacian_e {
            Some(lap) => Ok(lap(x, y)),
            None => {
                let dist = domain.boundary_distance(x, y);
                if !(dist > 0.0) {
                    return Err(Error::domain(format!("({x}, {y}) is not inside the {domain:?} domain")));
                }
                let h = FD_STEP * dist;
                let f = |u: f64, v: f64| (self.eval)(u, v);
                let fine = laplacian_fd(f, x, y, h, domain)?;
                let coarse = laplacian_fd(f, x, y, 2.0 * h, domain)?;
                Ok((4.0 * fine - coarse) / 3.0)
            }
        }
    }

    /// `f ∘ R_angle`, with `R_angle` the rotation about the origin.
    pub fn rotated(&self, angle: f64) -> TestFunction {
        let (c, s) = (angle.cos(), angle.sin());
        let rot = move |x: f64, y: f64| (c * x - s * y, s * x + c * y);
        let eval = self.eval.clone();
        let mut out = TestFunction::new(
            format!("{}@rot({angle})", self.name),
            move |x, y| {
                let (u, v) = rot(x, y);
                eval(u, v)
            },
            self.sup_norm,
        );
        if let Some(lap) = self.laplacian_e.clone() {
            out = out.with_laplacian(move |x, y| {
                let (u, v) = rot(x, y);
                lap(u, v)
            });
        }
        out
    }

    /// `f(x, y) = g(log y)` on the half-plane, for `g(t) = cos(2πkt)` or `sin(2πkt)`.
    /// These descend to the circle `t mod 1`.
    pub fn circle_mode(k: u32, sine: bool) -> TestFunction {
        let w = 2.0 * PI * k as f64;
        let g = move |t: f64| if sine { (w * t).sin() } else { (w * t).cos() };
        let dg = move |t: f64| if sine { w * (w * t).cos() } else { -w * (w * t).sin() };
        let name = format!("{}(2π·{k}·t)", if sine { "sin" } else { "cos" });
        // f_yy = (g'' - g')/y² with g'' = -w² g
        TestFunction::new(name, move |_, y| g(y.ln()), 1.0).with_laplacian(move |_, y| {
            let t = y.ln();
            (-w * w * g(t) - dg(t)) / (y * y)
        })
    }
}

/// A random polynomial plus plane wave with analytic Laplacian; the sup norm is
/// the coefficient bound on the closed unit disk.
pub fn random_smooth(rng: &mut impl Rng) -> TestFunction {
    let c: [f64; 6] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
    let (kx, ky, ph): (f64, f64, f64) = (
        rng.random_range(-3.0..3.0),
        rng.random_range(-3.0..3.0),
        rng.random_range(0.0..6.3),
    );
    let amp: f64 = rng.random_range(-1.0..1.0);
    let sup = c.iter().map(|v| v.abs()).sum::<f64>() + amp.abs();
    TestFunction::new(
        "random",
        move |x, y| {
            c[0] + c[1] * x
                + c[2] * y * y
                + c[3] * x * x * y
                + c[4] * x.powi(4)
                + c[5] * x * y.powi(3)
                + amp * (kx * x + ky * y + ph).cos()
        },
        sup,
    )
    .with_laplacian(move |x, y| {
        2.0 * c[2] + 2.0 * c[3] * y + 12.0 * c[4] * x * x + 6.0 * c[5] * x * y
            - amp * (kx * kx + ky * ky) * (kx * x + ky * y + ph).cos()
    })
}

/// The regression basis on the closed unit disk: eight separable
/// polynomial/trigonometric functions with analytic Laplacians and exact sup norms.
pub fn default_basis() -> Vec<TestFunction> {
    vec![
        TestFunction::new("1", |_, _| 1.0, 1.0).with_laplacian(|_, _| 0.0),
        TestFunction::new("x", |x, _| x, 1.0).with_laplacian(|_, _| 0.0),
        TestFunction::new("x^2-y^2", |x, y| x * x - y * y, 1.0).with_laplacian(|_, _| 0.0),
        TestFunction::new("x^2+y^2", |x, y| x * x + y * y, 1.0).with_laplacian(|_, _| 4.0),
        TestFunction::new("x^4", |x, _| x.powi(4), 1.0).with_laplacian(|x, _| 12.0 * x * x),
        TestFunction::new("cos(pi x)cos(pi y)", |x, y| (PI * x).cos() * (PI * y).cos(), 1.0)
            .with_laplacian(|x, y| -2.0 * PI * PI * (PI * x).cos() * (PI * y).cos()),
        TestFunction::new("x^2 y^2", |x, y| x * x * y * y, 0.25).with_laplacian(|x, y| 2.0 * (x * x + y * y)),
        TestFunction::new("cos(pi x/2) y^2", |x, y| (PI * x / 2.0).cos() * y * y, 1.0).with_laplacian(|x, y| {
            let c = (PI * x / 2.0).cos();
            2.0 * c - PI * PI / 4.0 * c * y * y
        }),
    ]
}

/// The eight lowest circle modes `cos(2πkt)`, `sin(2πkt)`, `k = 1..=4`, as
/// functions on the half-plane with `t = log y`.
pub fn circle_basis() -> Vec<TestFunction> {
    (1..=4)
        .flat_map(|k| [TestFunction::circle_mode(k, false), TestFunction::circle_mode(k, true)])
        .collect()
}

fn radial_derivative(f: &TestFunction, x: f64, y: f64, r: f64) -> f64 {
    let (c, s) = (x / r, y / r);
    let h = NORMAL_STEP;
    (f.eval(x + h * c, y + h * s) - f.eval(x - h * c, y - h * s)) / (2.0 * h)
}

/// `|∫_Ω (φΔ_E f - fΔ_E φ) v_E - ∮_{∂Ω} (φ ∂f/∂n - f ∂φ/∂n) σ_E|` for the annulus
/// `Ω = {r_in < |z| < r_out}` (`r_in = 0` gives the disk), with outward normals.
pub fn green_riesz_residual(phi: &TestFunction, f: &TestFunction, r_in: f64, r_out: f64, tol: f64) -> Result<f64> {
    let failure = std::cell::RefCell::new(None);
    let lap = |g: &TestFunction, x: f64, y: f64| match g.laplacian_e(x, y, Domain::Plane) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let interior = integrate_polar_annulus(
        |x, y| phi.eval(x, y) * lap(f, x, y) - f.eval(x, y) * lap(phi, x, y),
        r_in,
        r_out,
        AreaForm::Euclidean,
        tol / 2.0,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let interior = interior?;
    let flux = |r: f64| {
        move |x: f64, y: f64| {
            phi.eval(x, y) * radial_derivative(f, x, y, r) - f.eval(x, y) * radial_derivative(phi, x, y, r)
        }
    };
    let mut boundary = boundary_integral(flux(r_out), r_out, tol / 4.0)?;
    if r_in > 0.0 {
        boundary -= boundary_integral(flux(r_in), r_in, tol / 4.0)?;
    }
    Ok((interior - boundary).abs())
}

/// How [`weighted_laplacian_integral`] is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianMethod {
    /// `A (∫_0^{2π} f(R' e^{iθ}) dθ - ∫_0^{2π} f(R e^{iθ}) dθ)`.
    Boundary,
    /// `∫ φ Δ_E f v_E` by polar quadrature split at both interface circles.
    Direct,
}

fn require_phi(p: &WeightProfile) -> Result<()> {
    match p.kind() {
        WeightKind::Phi => Ok(()),
        WeightKind::Psi => Err(Error::domain("the φ-weighted Laplacian integral needs a φ profile")),
    }
}

/// `∫_D φ Δ_P f v_P` for a φ profile.
pub fn weighted_laplacian_integral(
    p: &WeightProfile,
    f: &TestFunction,
    method: LaplacianMethod,
    tol: f64,
) -> Result<f64> {
    require_phi(p)?;
    let (r, rp) = (p.r_in(), p.r_out());
    match method {
        LaplacianMethod::Boundary => {
            let jump = |t: f64| {
                let (c, s) = (t.cos(), t.sin());
                f.eval(rp * c, rp * s) - f.eval(r * c, r * s)
            };
            let dom = Interval1D::new(0.0, 2.0 * PI, (tol / p.a()).max(JUMP_FLOOR))?;
            Ok(p.a() * integrate_1d(jump, &dom)?)
        }
        LaplacianMethod::Direct => {
            let failure = std::cell::RefCell::new(None);
            let lap = |x: f64, y: f64| match f.laplacian_e(x, y, Domain::Plane) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            };
            let inner = integrate_polar_disk(lap, r, AreaForm::Euclidean, tol / 2.0);
            let annulus = integrate_polar_annulus(
                |x, y| p.weight_from_co(1.0 - x.hypot(y)) * lap(x, y),
                r,
                rp,
                AreaForm::Euclidean,
                tol / 2.0,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            Ok(inner? + annulus?)
        }
    }
}

/// `4πA / ∫φ v_P`, the uniform bound on [`defect_ratio`].
pub fn numerator_bound_ratio(p: &WeightProfile, rel_tol: f64) -> Result<f64> {
    Ok(4.0 * PI * p.a() / normalizer(p, rel_tol)?)
}

/// `|∫ φ Δ_P f v_P| / (‖f‖_∞ ∫ φ v_P)`.
pub fn defect_ratio(p: &WeightProfile, f: &TestFunction, tol: f64) -> Result<f64> {
    require_phi(p)?;
    if !(f.sup_norm() > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "test function {} has zero sup norm",
            f.name()
        )));
    }
    let num = weighted_laplacian_integral(p, f, LaplacianMethod::Boundary, tol)?;
    Ok(num.abs() / (f.sup_norm() * normalizer(p, 1e-12)?))
}

/// Planar model in which a chart lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    HalfPlane,
    Disk,
}

type ChartFn<P> = Box<dyn Fn(&P) -> Option<(f64, f64)> + Send + Sync>;

/// A map from node points into a planar model of the leaf.
pub struct LeafChart<P> {
    kind: ChartKind,
    map: ChartFn<P>,
}

impl<P> LeafChart<P> {
    pub fn new(kind: ChartKind, map: impl Fn(&P) -> Option<(f64, f64)> + Send + Sync + 'static) -> Self {
        Self {
            kind,
            map: Box::new(map),
        }
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn apply(&self, p: &P) -> Option<(f64, f64)> {
        (self.map)(p)
    }

    /// `Δ_P f` at the chart image `(x, y)`.
    pub fn hyperbolic_laplacian(&self, f: &TestFunction, x: f64, y: f64) -> Result<f64> {
        match self.kind {
            ChartKind::HalfPlane => {
                if !(y > 0.0) {
                    return Err(Error::Chart(format!("({x}, {y}) is not in the upper half-plane")));
                }
                Ok(y * y * f.laplacian_e(x, y, Domain::UpperHalfPlane)?)
            }
            ChartKind::Disk => {
                let q = 1.0 - x * x - y * y;
                if !(q > 0.0) {
                    return Err(Error::Chart(format!("({x}, {y}) is not in the open unit disk")));
                }
                Ok(q * q / 4.0 * f.laplacian_e(x, y, Domain::UnitDisk)?)
            }
        }
    }
}

/// `max_f |Σ_nodes w Δ_P f| / ‖Δ_P f‖_∞` over `basis`, the sup norm taken over the
/// nodes. Functions with `Δ_P f ≡ 0` on the nodes are skipped.
pub fn harmonicity_defect<P: Sync>(mu: &NodeMeasure<P>, basis: &[TestFunction], chart: &LeafChart<P>) -> Result<f64> {
    let coords: Vec<(f64, f64)> = mu
        .points()
        .par_iter()
        .map(|p| {
            chart
                .apply(p)
                .ok_or_else(|| Error::Chart("chart undefined at a node".into()))
        })
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for f in basis {
        let lap: Vec<f64> = coords
            .par_iter()
            .map(|&(x, y)| chart.hyperbolic_laplacian(f, x, y))
            .collect::<Result<_>>()?;
        let sup = lap.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sup == 0.0 {
            continue;
        }
        let mean = neumaier_sum(lap.iter().zip(mu.weights()).map(|(l, w)| l * w));
        worst = worst.max(mean.abs() / sup);
    }
    Ok(worst)
}
