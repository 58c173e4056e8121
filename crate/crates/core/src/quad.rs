//! Quadrature, finite differences and sampling primitives.
//!
//! One-dimensional integrals use adaptive Gauss–Kronrod (7/15) with global
//! interval bisection: the subinterval with the largest error estimate is halved
//! until the summed estimate falls below the absolute tolerance. The rule never
//! evaluates at interval endpoints, so integrable endpoint singularities such as
//! `sqrt(t)` or `1/sqrt(u)` are handled by refinement alone. Infinite limits are
//! mapped to `(0, 1]` with `u = e^{-(t - lo)}`.

use crate::error::{Error, Result};
use crate::hyp::GeodesicPolar;
use crate::measure::{neumaier_sum, NodeMeasure};
use crate::rng::par_samples;
use rand::Rng;
use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

pub const DEFAULT_TOL_1D: f64 = 1e-10;
pub const DEFAULT_TOL_2D: f64 = 1e-8;

const MAX_INTERVALS: usize = 20_000;

/// Integration domain with an absolute error budget. Either limit may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval1D {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
}

impl Interval1D {
    pub fn new(lo: f64, hi: f64, tol: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::domain(format!("interval needs lo < hi, got [{lo}, {hi}]")));
        }
        if !(tol > 0.0) {
            return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self { lo, hi, tol })
    }

    /// `[lo, +∞)`.
    pub fn to_infinity(lo: f64, tol: f64) -> Result<Self> {
        Self::new(lo, f64::INFINITY, tol)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

// Kronrod abscissae on [0, 1]; odd indices are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        a,
        b,
        value: res_k * half,
        error,
    }
}

fn adaptive_finite(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    let first = kronrod15(f, a, b);
    let mut heap = BinaryHeap::new();
    let mut total_err = first.error;
    heap.push(first);
    while !(total_err <= tol) {
        if total_err.is_nan() || heap.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureFailure {
                estimate: total_err,
                tol,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            return Err(Error::QuadratureFailure {
                estimate: total_err,
                tol,
            });
        }
        let left = kronrod15(f, worst.a, mid);
        let right = kronrod15(f, mid, worst.b);
        heap.push(left);
        heap.push(right);
        // re-sum to avoid drift from repeated subtraction
        total_err = neumaier_sum(heap.iter().map(|s| s.error));
    }
    let intervals = heap.len();
    let value = neumaier_sum(heap.iter().map(|s| s.value));
    Ok(Estimate {
        value,
        error: total_err,
        intervals,
    })
}

/// Adaptive integral with error estimate.
pub fn integrate_1d_estimate(f: impl Fn(f64) -> f64, dom: &Interval1D) -> Result<Estimate> {
    estimate(&f, dom)
}

fn estimate(f: &dyn Fn(f64) -> f64, dom: &Interval1D) -> Result<Estimate> {
    let Interval1D { lo, hi, tol } = *dom;
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => adaptive_finite(&f, lo, hi, tol),
        (true, false) => {
            let g = |u: f64| f(lo - u.ln()) / u;
            adaptive_finite(&g, 0.0, 1.0, tol)
        }
        (false, true) => {
            let g = |u: f64| f(hi + u.ln()) / u;
            adaptive_finite(&g, 0.0, 1.0, tol)
        }
        (false, false) => {
            let left = estimate(f, &Interval1D::new(f64::NEG_INFINITY, 0.0, tol / 2.0)?)?;
            let right = estimate(f, &Interval1D::new(0.0, f64::INFINITY, tol / 2.0)?)?;
            Ok(Estimate {
                value: left.value + right.value,
                error: left.error + right.error,
                intervals: left.intervals + right.intervals,
            })
        }
    }
}

/// `∫ f` over `dom` to within `dom.tol`.
pub fn integrate_1d(f: impl Fn(f64) -> f64, dom: &Interval1D) -> Result<f64> {
    integrate_1d_estimate(f, dom).map(|e| e.value)
}

/// Integral over consecutive breakpoints `points[0] < points[1] < ...`, with the
/// tolerance shared equally between the pieces.
pub fn integrate_piecewise(f: impl Fn(f64) -> f64, points: &[f64], tol: f64) -> Result<f64> {
    if points.len() < 2 {
        return Ok(0.0);
    }
    let share = tol / (points.len() - 1) as f64;
    let mut parts = Vec::with_capacity(points.len() - 1);
    for w in points.windows(2) {
        if w[1] > w[0] {
            parts.push(integrate_1d(&f, &Interval1D::new(w[0], w[1], share)?)?);
        }
    }
    Ok(neumaier_sum(parts))
}

/// Area form used by the polar integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AreaForm {
    /// `r dr dθ`
    Euclidean,
    /// `4 r dr dθ / (1 - r²)²`
    Poincare,
}

impl AreaForm {
    fn density(self, r: f64) -> f64 {
        match self {
            AreaForm::Euclidean => r,
            AreaForm::Poincare => {
                let q = (1.0 - r) * (1.0 + r);
                4.0 * r / (q * q)
            }
        }
    }

    /// `∫_{r0}^{r1} density(r) dr`.
    fn radial_mass(self, r0: f64, r1: f64) -> f64 {
        match self {
            AreaForm::Euclidean => 0.5 * (r1 * r1 - r0 * r0),
            AreaForm::Poincare => {
                let prim = |r: f64| 2.0 * r * r / ((1.0 - r) * (1.0 + r));
                prim(r1) - prim(r0)
            }
        }
    }
}

/// `∫ f(x, y)` over the annulus `r_in < |z| < r_out` against `form`.
pub fn integrate_polar_annulus(
    f: impl Fn(f64, f64) -> f64,
    r_in: f64,
    r_out: f64,
    form: AreaForm,
    tol: f64,
) -> Result<f64> {
    if !(r_in >= 0.0 && r_in < r_out) {
        return Err(Error::domain(format!(
            "annulus needs 0 <= r_in < r_out, got ({r_in}, {r_out})"
        )));
    }
    if form == AreaForm::Poincare && !(r_out < 1.0) {
        return Err(Error::domain(format!(
            "Poincaré area form diverges at |z| = 1; radius {r_out} is not below 1"
        )));
    }
    let radial = form.radial_mass(r_in, r_out).max(f64::MIN_POSITIVE);
    let inner_tol = tol / (2.0 * radial);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let ring = |r: f64| -> f64 {
        let theta_dom = Interval1D {
            lo: 0.0,
            hi: 2.0 * PI,
            tol: inner_tol,
        };
        match integrate_1d(|t: f64| f(r * t.cos(), r * t.sin()), &theta_dom) {
            Ok(v) => form.density(r) * v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let outer = integrate_1d(ring, &Interval1D::new(r_in, r_out, tol / 2.0)?);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    outer
}

/// `∫_{D(R)} f` against `form`.
pub fn integrate_polar_disk(f: impl Fn(f64, f64) -> f64, r: f64, form: AreaForm, tol: f64) -> Result<f64> {
    integrate_polar_annulus(f, 0.0, r, form, tol)
}

/// `∮_{|z| = R} f dσ_E`, the integral against Euclidean arc length.
pub fn boundary_integral(f: impl Fn(f64, f64) -> f64, r: f64, tol: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("circle radius must be positive, got {r}")));
    }
    let dom = Interval1D::new(0.0, 2.0 * PI, tol / r)?;
    Ok(r * integrate_1d(|t: f64| f(r * t.cos(), r * t.sin()), &dom)?)
}

/// Domain on which a finite-difference stencil must stay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Plane,
    UnitDisk,
    UpperHalfPlane,
}

impl Domain {
    fn contains(self, x: f64, y: f64) -> bool {
        match self {
            Domain::Plane => x.is_finite() && y.is_finite(),
            Domain::UnitDisk => x * x + y * y < 1.0,
            Domain::UpperHalfPlane => y > 0.0,
        }
    }

    /// Euclidean distance to the boundary (`1` for the whole plane).
    pub fn boundary_distance(self, x: f64, y: f64) -> f64 {
        match self {
            Domain::Plane => 1.0,
            Domain::UnitDisk => 1.0 - x.hypot(y),
            Domain::UpperHalfPlane => y,
        }
    }
}

/// Finite-difference Euclidean Laplacian with the compact 9-point stencil
///
/// ```text
/// [1  4 1]
/// [4 -20 4] / (6 h²)
/// [1  4 1]
/// ```
///
/// Its leading error term is `(h²/12) Δ²f`, so the estimate is exact for
/// quadratics and fourth-order accurate for harmonic `f`.
pub fn laplacian_fd(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64, domain: Domain) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain(format!("step must be positive, got {h}")));
    }
    let corners = [(x + h, y + h), (x - h, y + h), (x + h, y - h), (x - h, y - h)];
    if !corners.iter().all(|&(a, b)| domain.contains(a, b)) {
        return Err(Error::domain(format!(
            "stencil of width {h} about ({x}, {y}) leaves the {domain:?} domain"
        )));
    }
    let edges = f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h);
    let diag = corners.iter().map(|&(a, b)| f(a, b)).sum::<f64>();
    Ok((4.0 * edges + diag - 20.0 * f(x, y)) / (6.0 * h * h))
}

/// [`laplacian_fd`] with step `1e-4` times the distance to the domain boundary.
pub fn laplacian_fd_auto(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, domain: Domain) -> Result<f64> {
    let dist = domain.boundary_distance(x, y);
    if !(dist > 0.0) {
        return Err(Error::domain(format!("({x}, {y}) is not inside the {domain:?} domain")));
    }
    laplacian_fd(f, x, y, 1e-4 * dist, domain)
}

/// Inverse radial CDF of the Poincaré area on a disk of geodesic radius `rho`:
/// solves `(cosh r - 1)/(cosh ρ - 1) = u`.
pub fn hyperbolic_radius_quantile(rho: f64, u: f64) -> f64 {
    2.0 * (u.sqrt() * (rho / 2.0).sinh()).asinh()
}

/// `n` i.i.d. points, uniform for the Poincaré area on the disk of geodesic radius
/// `rho` about the origin, in geodesic polar coordinates. Deterministic in
/// `(seed, n)`.
pub fn sample_hyperbolic_disk(seed: u64, rho: f64, n: usize) -> Result<NodeMeasure<GeodesicPolar>> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::domain(format!("disk radius must be positive, got {rho}")));
    }
    if n == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let points = par_samples(seed, n, |rng| {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        GeodesicPolar {
            radius: hyperbolic_radius_quantile(rho, u),
            angle: 2.0 * PI * v,
        }
    });
    Ok(NodeMeasure::uniform(points).expect("n >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn limit_integral() {
        let dom = Interval1D::to_infinity(0.0, 1e-10).unwrap();
        let v = integrate_1d(|t: f64| ((-t).exp() - (-2.0 * t).exp()).max(0.0).sqrt(), &dom).unwrap();
        assert_abs_diff_eq!(v, PI / 2.0, epsilon = 1e-10);
    }

    #[test]
    fn simple_integrals() {
        let unit = Interval1D::new(0.0, 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(integrate_1d(|_| 1.0, &unit).unwrap(), 1.0, epsilon = 1e-12);
        let half = Interval1D::new(0.0, PI, 1e-12).unwrap();
        // -cos π + cos 0
        assert_abs_diff_eq!(integrate_1d(f64::sin, &half).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn endpoint_singularity_and_lower_infinite() {
        let unit = Interval1D::new(0.0, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(
            integrate_1d(|x: f64| 1.0 / x.sqrt(), &unit).unwrap(),
            2.0,
            epsilon = 1e-9
        );
        let neg = Interval1D::new(f64::NEG_INFINITY, 0.0, 1e-11).unwrap();
        assert_abs_diff_eq!(integrate_1d(f64::exp, &neg).unwrap(), 1.0, epsilon = 1e-11);
        let all = Interval1D::new(f64::NEG_INFINITY, f64::INFINITY, 1e-10).unwrap();
        assert_abs_diff_eq!(
            integrate_1d(|x: f64| (-x * x).exp(), &all).unwrap(),
            PI.sqrt(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn reports_failure() {
        let unit = Interval1D::new(0.0, 1.0, 1e-10).unwrap();
        let err = integrate_1d(|x: f64| 1.0 / x, &unit).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
        assert!(Interval1D::new(1.0, 0.0, 1e-3).is_err());
        assert!(Interval1D::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn polar_examples() {
        assert_abs_diff_eq!(
            integrate_polar_disk(|_, _| 1.0, 1.0, AreaForm::Euclidean, 1e-10).unwrap(),
            PI,
            epsilon = 1e-10
        );
        let r = crate::hyp::geodesic_radius_to_euclid(1.0).unwrap();
        let area = integrate_polar_disk(|_, _| 1.0, r, AreaForm::Poincare, 1e-10).unwrap();
        assert_abs_diff_eq!(area, crate::hyp::disk_area(1.0), epsilon = 1e-9);
        assert_abs_diff_eq!(area, 3.412_276_3, epsilon = 1e-7);
        let odd = integrate_polar_disk(|x, _| x, 0.7, AreaForm::Euclidean, 1e-10).unwrap();
        assert_abs_diff_eq!(odd, 0.0, epsilon = 1e-10);
        assert!(matches!(
            integrate_polar_disk(|_, _| 1.0, 1.0, AreaForm::Poincare, 1e-8),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn boundary_examples() {
        assert_abs_diff_eq!(boundary_integral(|_, _| 1.0, 0.5, 1e-12).unwrap(), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(boundary_integral(|x, _| x, 0.9, 1e-12).unwrap(), 0.0, epsilon = 1e-12);
        let v = boundary_integral(|x, y| x * x + y * y, 0.8, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 2.0 * PI * 0.8 * 0.64, epsilon = 1e-11);
        assert_abs_diff_eq!(v, 3.21699, epsilon = 1e-5);
    }

    #[test]
    fn fd_laplacian_examples() {
        let q = laplacian_fd(|x, y| x * x + y * y, 0.3, -0.2, 1e-3, Domain::Plane).unwrap();
        assert_abs_diff_eq!(q, 4.0, epsilon = 1e-6);
        let lg = laplacian_fd(|x, y| x.hypot(y).ln(), 0.5, 0.0, 1e-3, Domain::Plane).unwrap();
        assert_abs_diff_eq!(lg, 0.0, epsilon = 1e-5);
        let x4 = laplacian_fd(|x, _| x.powi(4), 0.3, 0.2, 1e-3, Domain::Plane).unwrap();
        assert_abs_diff_eq!(x4, 1.08, epsilon = 1e-4);
        assert!(matches!(
            laplacian_fd(|x, _| x, 0.0, 0.0005, 1e-3, Domain::UpperHalfPlane),
            Err(Error::Domain(_))
        ));
        assert!(laplacian_fd_auto(|x, y| x * y, 0.999, 0.0, Domain::UnitDisk).is_ok());
    }

    #[test]
    fn sampler_support_and_radial_cdf() {
        let m = sample_hyperbolic_disk(1, 2.0, 1000).unwrap();
        assert!(m.points().iter().all(|p| p.radius <= 2.0 && p.radius >= 0.0));
        assert_abs_diff_eq!(m.total_weight(), 1.0, epsilon = 1e-12);

        let rho: f64 = 3.0;
        let n = 200_000;
        let m = sample_hyperbolic_disk(2, rho, n).unwrap();
        let p = ((rho / 2.0).cosh() - 1.0) / (rho.cosh() - 1.0);
        let frac = m.mass_where(|g| g.radius <= rho / 2.0);
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((frac - p).abs() < 4.0 * sigma, "frac {frac} vs {p}");
    }

    #[test]
    fn sampler_mean_cosh_radius() {
        // oracle by 1D quadrature of cosh r sinh r on [0, 1]
        let dom = Interval1D::new(0.0, 1.0, 1e-13).unwrap();
        let num = integrate_1d(|r: f64| r.cosh() * r.sinh(), &dom).unwrap();
        let expected = num / (1f64.cosh() - 1.0);
        let n = 1_000_000;
        let m = sample_hyperbolic_disk(5, 1.0, n).unwrap();
        let mean = m.expectation(|g| g.radius.cosh());
        let var = m.expectation(|g| (g.radius.cosh() - expected).powi(2));
        assert!(
            (mean - expected).abs() < 4.0 * (var / n as f64).sqrt(),
            "{mean} vs {expected}"
        );
    }

    #[test]
    fn sampler_annulus_binomial_bound() {
        let rho: f64 = 4.0;
        let n = 100_000;
        let m = sample_hyperbolic_disk(9, rho, n).unwrap();
        for &(a, b) in &[(0.5, 1.0), (2.0, 3.0), (3.5, 4.0)] {
            let p = (f64::cosh(b) - f64::cosh(a)) / (rho.cosh() - 1.0);
            let frac = m.mass_where(|g| g.radius > a && g.radius <= b);
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((frac - p).abs() < 3.0 * sigma, "annulus ({a},{b}): {frac} vs {p}");
        }
    }

    #[test]
    fn divergence_consistency() {
        // ∫_{D(R)} Δf dA = ∮ ∂f/∂r dσ for f = x³ y + exp(x) cos(2y)
        let f = |x: f64, y: f64| x.powi(3) * y + x.exp() * (2.0 * y).cos();
        let lap = |x: f64, y: f64| 6.0 * x * y + x.exp() * (2.0 * y).cos() - 4.0 * x.exp() * (2.0 * y).cos();
        let r = 0.6;
        let tol = 1e-9;
        let interior = integrate_polar_disk(lap, r, AreaForm::Euclidean, tol).unwrap();
        let h = 1e-5;
        let radial = |x: f64, y: f64| {
            let (c, s) = (x / r, y / r);
            (f(x + h * c, y + h * s) - f(x - h * c, y - h * s)) / (2.0 * h)
        };
        let boundary = boundary_integral(radial, r, tol).unwrap();
        assert_abs_diff_eq!(interior, boundary, epsilon = 10.0 * tol);
    }

    proptest! {
        #[test]
        fn integrate_is_linear(c in proptest::collection::vec(-3.0..3.0f64, 4), d in proptest::collection::vec(-3.0..3.0f64, 4), a in -2.0..2.0f64, b in -2.0..2.0f64) {
            let tol = 1e-10;
            let dom = Interval1D::new(-1.0, 2.0, tol).unwrap();
            let p = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x.powi(3);
            let q = |x: f64| d[0] + d[1] * x.sin() + d[2] * x * x + d[3] * x.powi(5);
            let lhs = integrate_1d(|x| a * p(x) + b * q(x), &dom).unwrap();
            let rhs = a * integrate_1d(p, &dom).unwrap() + b * integrate_1d(q, &dom).unwrap();
            prop_assert!((lhs - rhs).abs() <= 2.0 * tol);
        }

        #[test]
        fn poincare_area_monotone_in_radius(r1 in 0.05..0.9f64, dr in 0.001..0.09f64) {
            let f = |x: f64, y: f64| 1.0 + (3.0 * x).sin() * y * y;
            let a1 = integrate_polar_disk(f, r1, AreaForm::Poincare, 1e-9).unwrap();
            let a2 = integrate_polar_disk(f, r1 + dr, AreaForm::Poincare, 1e-9).unwrap();
            prop_assert!(a2 > a1);
        }
    }
}
