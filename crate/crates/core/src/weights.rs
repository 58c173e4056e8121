//! Radial cut-off profiles on the disk model and the probability measures they
//! define.
//!
//! A profile is fixed by two radii `0 < R < R' < 1`. In terms of the log-radius
//! `ρ = artanh R` (so that `D(R)` has geodesic radius `2ρ`) the outer radius sits at
//! `ρ + ρ'`. Both profiles are `1` on `D(R)` and vanish outside `D(R')`; on the
//! annulus
//!
//! - `ψ(z) = (R' - |z|)/(R' - R)` (linear in `|z|`),
//! - `φ(z) = A log(R'/|z|)` with `A = 1/log(R'/R)` (harmonic).
//!
//! For large `ρ` the radii are indistinguishable from 1 in `f64`. Profiles therefore
//! keep the complements `1 - R`, `1 - R'` and evaluate everything in terms of
//! `c = 1 - |z|`, computed from the log-radius as `2/(e^{2a} + 1)`.

use crate::error::{Error, Result};
use crate::hyp::{disk_area, DiskPoint, GeodesicPolar};
use crate::measure::{neumaier_sum, NodeMeasure};
use crate::quad::{integrate_1d, Interval1D};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    Psi,
    Phi,
}

impl WeightKind {
    pub fn name(self) -> &'static str {
        match self {
            WeightKind::Psi => "psi",
            WeightKind::Phi => "phi",
        }
    }
}

/// `1 - tanh a`.
pub fn co_radius(a: f64) -> f64 {
    2.0 / ((2.0 * a).exp() + 1.0)
}

/// `log(log1p(x)/x)`, accurate for small `x`.
fn ln_g(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let gm1 = x * (-0.5 + x * (1.0 / 3.0 + x * (-0.25 + x * (0.2 - x / 6.0))));
        gm1.ln_1p()
    } else {
        (x.ln_1p() / x).ln()
    }
}

/// A ψ or φ profile with radii `R < R'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightProfile {
    kind: WeightKind,
    r_in: f64,
    r_out: f64,
    co_in: f64,
    co_out: f64,
    rho: f64,
    rho_prime: f64,
    a: f64,
}

impl WeightProfile {
    /// Profile from Euclidean radii `0 < R < R' < 1`.
    pub fn from_radii(r_in: f64, r_out: f64, kind: WeightKind) -> Result<Self> {
        if !(r_in > 0.0 && r_in < r_out && r_out < 1.0) {
            return Err(Error::domain(format!(
                "profile needs 0 < R < R' < 1, got R = {r_in}, R' = {r_out}"
            )));
        }
        let rho = r_in.atanh();
        Self::build(kind, rho, r_out.atanh() - rho, 1.0 - r_in, 1.0 - r_out)
    }

    /// Profile from the log-radii `ρ > 0` and `ρ' > 0`: `R = tanh ρ`, `R' = tanh(ρ + ρ')`.
    pub fn from_log_radii(rho: f64, rho_prime: f64, kind: WeightKind) -> Result<Self> {
        if !(rho > 0.0 && rho_prime > 0.0) || !(rho + rho_prime).is_finite() {
            return Err(Error::domain(format!(
                "profile needs ρ, ρ' > 0, got ρ = {rho}, ρ' = {rho_prime}"
            )));
        }
        Self::build(kind, rho, rho_prime, co_radius(rho), co_radius(rho + rho_prime))
    }

    fn build(kind: WeightKind, rho: f64, rho_prime: f64, co_in: f64, co_out: f64) -> Result<Self> {
        if !(co_out > 0.0 && co_in > co_out && rho_prime > 0.0) {
            return Err(Error::domain(format!(
                "radii not separable in double precision (1 - R = {co_in:e}, 1 - R' = {co_out:e})"
            )));
        }
        let r_in = 1.0 - co_in;
        let a = 1.0 / ((co_in - co_out) / r_in).ln_1p();
        Ok(Self {
            kind,
            r_in,
            r_out: 1.0 - co_out,
            co_in,
            co_out,
            rho,
            rho_prime,
            a,
        })
    }

    /// The same radii with the other profile.
    pub fn with_kind(&self, kind: WeightKind) -> Self {
        Self { kind, ..*self }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn r_in(&self) -> f64 {
        self.r_in
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    /// `1 - R`.
    pub fn co_in(&self) -> f64 {
        self.co_in
    }

    /// `1 - R'`.
    pub fn co_out(&self) -> f64 {
        self.co_out
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_prime(&self) -> f64 {
        self.rho_prime
    }

    /// `A = 1/log(R'/R)`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `A (R' - R)`; tends to 1 as `R -> 1` with `R'` in the middle of `(R, 1)`.
    pub fn a_times_width(&self) -> f64 {
        self.a * (self.co_in - self.co_out)
    }

    /// Log-radius of the outer circle.
    pub fn outer_log_radius(&self) -> f64 {
        self.rho + self.rho_prime
    }

    /// Weight at the point with `1 - |z| = c`.
    pub fn weight_from_co(&self, c: f64) -> f64 {
        if c >= self.co_in {
            return 1.0;
        }
        if c <= self.co_out {
            return 0.0;
        }
        let u = c - self.co_out;
        match self.kind {
            WeightKind::Psi => u / (self.co_in - self.co_out),
            WeightKind::Phi => self.a * (u / (1.0 - c)).ln_1p(),
        }
    }

    /// Weight at log-radius `a` (geodesic distance `2a` from the origin).
    pub fn weight_at_log_radius(&self, a: f64) -> f64 {
        if a <= self.rho {
            1.0
        } else if a >= self.outer_log_radius() {
            0.0
        } else {
            self.weight_from_co(co_radius(a))
        }
    }

    /// `ψ - φ` at the point with `1 - |z| = c`, without cancellation.
    pub fn psi_minus_phi_from_co(&self, c: f64) -> f64 {
        if c >= self.co_in || c <= self.co_out {
            return 0.0;
        }
        let u = c - self.co_out;
        let u0 = self.co_in - self.co_out;
        let psi = u / u0;
        let x = u / (1.0 - c);
        let x0 = u0 / (1.0 - self.co_in);
        // φ/ψ = (R/|z|) g(x)/g(x0), g(x) = log1p(x)/x
        let ln_ratio = (-self.co_in).ln_1p() - (-c).ln_1p() + ln_g(x) - ln_g(x0);
        psi * -ln_ratio.exp_m1()
    }

    pub fn psi_minus_phi_at_log_radius(&self, a: f64) -> f64 {
        if a <= self.rho || a >= self.outer_log_radius() {
            0.0
        } else {
            self.psi_minus_phi_from_co(co_radius(a))
        }
    }

    /// Poincaré area of `D(R)`.
    pub fn inner_area(&self) -> f64 {
        disk_area(2.0 * self.rho)
    }
}

/// Weight of profile `p` at `z`.
pub fn weight_eval(p: &WeightProfile, z: DiskPoint) -> f64 {
    p.weight_from_co(1.0 - z.modulus())
}

/// Density of `v_P` in the log-radius after integrating out the angle:
/// `4 r dr dθ/(1 - r²)²` becomes `4π sinh(2a) da`.
fn radial_density(a: f64) -> f64 {
    4.0 * PI * (2.0 * a).sinh()
}

/// Composite 8-point Gauss–Legendre estimate, used to scale relative tolerances.
fn rough_integral(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const PIECES: usize = 64;
    let step = (hi - lo) / PIECES as f64;
    (0..PIECES)
        .map(|i| gauss_legendre8(&f, lo + i as f64 * step, lo + (i + 1) as f64 * step))
        .sum()
}

fn integrate_relative(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    let tol = (rel_tol * rough_integral(&f, lo, hi).abs()).max(f64::MIN_POSITIVE);
    integrate_1d(f, &Interval1D::new(lo, hi, tol)?)
}

/// `∫_D w v_P` with relative accuracy `rel_tol`. The radial integral is split at
/// both interface circles and carried out in the log-radius.
pub fn normalizer(p: &WeightProfile, rel_tol: f64) -> Result<f64> {
    let inner = integrate_relative(radial_density, 0.0, p.rho, rel_tol)?;
    let annulus = integrate_relative(
        |a| p.weight_at_log_radius(a) * radial_density(a),
        p.rho,
        p.outer_log_radius(),
        rel_tol,
    )?;
    Ok(inner + annulus)
}

/// `∫_D (ψ - φ) v_P` for the radii of `p`, integrated directly.
/// The tolerance is relative to the difference itself, which is many orders of
/// magnitude below either normalizer when `R` is close to 1.
pub fn weight_difference(p: &WeightProfile, rel_tol: f64) -> Result<f64> {
    integrate_relative(
        |a| p.psi_minus_phi_at_log_radius(a) * radial_density(a),
        p.rho,
        p.outer_log_radius(),
        rel_tol,
    )
}

/// Variable in which a [`PolarGrid`] is uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialScale {
    /// Uniform in `|z|`; `r_max <= 1`.
    Euclidean,
    /// Uniform in `artanh |z|`.
    LogRadius,
}

/// Tensor grid of polar cells covering `(0, r_max) × [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid {
    pub scale: RadialScale,
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl PolarGrid {
    pub fn new(scale: RadialScale, r_max: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 2 || n_theta < 4 {
            return Err(Error::domain(format!(
                "grid needs n_r >= 2 and n_theta >= 4, got {n_r} x {n_theta}"
            )));
        }
        let ok = match scale {
            RadialScale::Euclidean => r_max > 0.0 && r_max <= 1.0,
            RadialScale::LogRadius => r_max > 0.0 && r_max.is_finite(),
        };
        if !ok {
            return Err(Error::domain(format!(
                "invalid grid extent {r_max} for {scale:?} scale"
            )));
        }
        Ok(Self {
            scale,
            r_max,
            n_r,
            n_theta,
        })
    }

    /// Log-radius grid just covering the support of `p`, with `per_piece` cells in
    /// the annulus and at least as many in `D(R)`.
    pub fn fitted(p: &WeightProfile, per_piece: usize, n_theta: usize) -> Result<Self> {
        let step = p.rho_prime / per_piece as f64;
        let inner = ((p.rho / step).ceil() as usize).max(per_piece);
        let step = step.min(p.rho / inner as f64);
        let n_r = (p.outer_log_radius() / step).ceil() as usize;
        Self::new(RadialScale::LogRadius, n_r as f64 * step, n_r, n_theta)
    }

    /// Radial cell edges in log-radius.
    fn log_edges(&self) -> Vec<f64> {
        (0..=self.n_r)
            .map(|i| {
                let s = self.r_max * i as f64 / self.n_r as f64;
                match self.scale {
                    RadialScale::LogRadius => s,
                    RadialScale::Euclidean if i == self.n_r && self.r_max == 1.0 => f64::INFINITY,
                    RadialScale::Euclidean => s.atanh(),
                }
            })
            .collect()
    }
}

/// The probability measure `w v_P / ∫ w v_P` discretized on `grid`.
///
/// Each cell is split at the interface circles; every piece becomes one node at its
/// radial midpoint, carrying the exact `w v_P` mass of the piece.
pub fn make_measure(p: &WeightProfile, grid: &PolarGrid) -> Result<NodeMeasure<GeodesicPolar>> {
    let edges = grid.log_edges();
    let outer = p.outer_log_radius();
    if *edges.last().expect("n_r >= 2") < outer * (1.0 - 1e-12) {
        return Err(Error::Resolution(format!(
            "grid ends at log-radius {} inside the support (outer log-radius {outer})",
            edges.last().unwrap()
        )));
    }
    let centers = |lo: f64, hi: f64| {
        edges
            .windows(2)
            .filter(|w| {
                let m = 0.5 * (w[0] + w[1]);
                m > lo && m < hi
            })
            .count()
    };
    let (inner_cells, annulus_cells) = (centers(0.0, p.rho), centers(p.rho, outer));
    if inner_cells < 8 || annulus_cells < 8 {
        return Err(Error::Resolution(format!(
            "interfaces under-resolved: {inner_cells} radial cells in D(R), {annulus_cells} in the annulus (need 8 each)"
        )));
    }

    let mut pieces = Vec::new();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1].min(outer));
        if lo >= hi {
            break;
        }
        let mut cuts = vec![lo];
        if lo < p.rho && p.rho < hi {
            cuts.push(p.rho);
        }
        cuts.push(hi);
        for c in cuts.windows(2) {
            pieces.push((c[0], c[1]));
        }
    }

    let mut points = Vec::with_capacity(pieces.len() * grid.n_theta);
    let mut masses = Vec::with_capacity(pieces.len() * grid.n_theta);
    let dtheta = 2.0 * PI / grid.n_theta as f64;
    for &(lo, hi) in &pieces {
        let f = |a: f64| p.weight_at_log_radius(a) * 2.0 * (2.0 * a).sinh();
        let rough = gauss_legendre8(f, lo, hi);
        if rough <= 0.0 {
            continue;
        }
        let radial = integrate_1d(f, &Interval1D::new(lo, hi, 1e-11 * rough)?)?;
        let mid = 0.5 * (lo + hi);
        for j in 0..grid.n_theta {
            points.push(GeodesicPolar {
                radius: 2.0 * mid,
                angle: (j as f64 + 0.5) * dtheta,
            });
            masses.push(radial * dtheta);
        }
    }
    NodeMeasure::from_masses(points, masses).ok_or_else(|| Error::Resolution("grid carries no mass".into()))
}

#[allow(clippy::excessive_precision)]
fn gauss_legendre8(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329_0,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_362_0,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    h * X
        .iter()
        .zip(W)
        .map(|(&x, w)| w * (f(c - h * x) + f(c + h * x)))
        .sum::<f64>()
}

/// Distances between the ψ- and φ-measures with common radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    /// `∫ |ψ/∫ψ - φ/∫φ| v_P`.
    pub l1_gap: f64,
    /// `2 (1 - ∫φ/∫ψ)`, the bound obtained from `ψ >= φ`.
    pub normalizer_bound: f64,
    pub psi_normalizer: f64,
    pub phi_normalizer: f64,
    /// `∫ (ψ - φ) v_P`, integrated directly.
    pub weight_difference: f64,
}

impl GapReport {
    /// `∫ψ / ∫φ`, formed from the directly integrated difference.
    pub fn normalizer_ratio(&self) -> f64 {
        1.0 + self.weight_difference / self.phi_normalizer
    }

    /// `|∫(ψ - φ) - (∫ψ - ∫φ)| / ∫ψ`.
    pub fn difference_identity_residual(&self) -> f64 {
        let split = self.psi_normalizer - self.phi_normalizer;
        (self.weight_difference - split).abs() / self.psi_normalizer
    }
}

/// L¹ distance between the normalized densities of two profiles with the same
/// radii. The integrand `(ψ - φ) ∫ψ - ψ (∫ψ - ∫φ)` changes sign once on the
/// annulus; the crossing is located and the integral split there.
pub fn measure_gap(p_psi: &WeightProfile, p_phi: &WeightProfile, rel_tol: f64) -> Result<GapReport> {
    let same = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs());
    if !(same(p_psi.co_in, p_phi.co_in) && same(p_psi.co_out, p_phi.co_out)) {
        return Err(Error::domain("measure gap needs profiles with the same radii"));
    }
    let p = p_psi;
    let n_self = normalizer(p_psi, rel_tol)?;
    if p_psi.kind == p_phi.kind {
        return Ok(GapReport {
            l1_gap: 0.0,
            normalizer_bound: 0.0,
            psi_normalizer: n_self,
            phi_normalizer: n_self,
            weight_difference: 0.0,
        });
    }
    let (psi, phi) = match p_psi.kind {
        WeightKind::Psi => (p_psi.with_kind(WeightKind::Psi), p_phi.with_kind(WeightKind::Phi)),
        WeightKind::Phi => (p_phi.with_kind(WeightKind::Psi), p_psi.with_kind(WeightKind::Phi)),
    };
    let n_psi = normalizer(&psi, rel_tol)?;
    let n_phi = normalizer(&phi, rel_tol)?;
    let diff = weight_difference(&psi, rel_tol)?;

    let h =
        |a: f64| (psi.psi_minus_phi_at_log_radius(a) * n_psi - psi.weight_at_log_radius(a) * diff) * radial_density(a);
    let (lo, hi) = (p.rho, p.outer_log_radius());
    let mut cuts = vec![lo];
    const SCAN: usize = 256;
    let x = |i: usize| lo + (hi - lo) * i as f64 / SCAN as f64;
    for i in 0..SCAN - 1 {
        let (a, b) = (x(i), x(i + 1));
        let (fa, fb) = (h(a), h(b));
        if fa.signum() != fb.signum() && fa != 0.0 && fb != 0.0 {
            cuts.push(bisect(&h, a, b));
        }
    }
    cuts.push(hi);
    let scale = 2.0 * diff.abs() * n_psi;
    let tol = (rel_tol * scale).max(f64::MIN_POSITIVE);
    let share = tol / (cuts.len() - 1) as f64;
    let mut parts = Vec::with_capacity(cuts.len() - 1);
    for c in cuts.windows(2) {
        if c[1] > c[0] {
            parts.push(integrate_1d(|a| h(a).abs(), &Interval1D::new(c[0], c[1], share)?)?);
        }
    }
    let annulus = neumaier_sum(parts);
    let inner = diff.abs() * psi.inner_area();
    let denom = n_psi * n_phi;
    Ok(GapReport {
        l1_gap: (inner + annulus) / denom,
        normalizer_bound: 2.0 * diff / n_psi,
        psi_normalizer: n_psi,
        phi_normalizer: n_phi,
        weight_difference: diff,
    })
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m).signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn at_radius(r: f64) -> DiskPoint {
        DiskPoint::new(r, 0.0).unwrap()
    }

    #[test]
    fn eval_examples() {
        for kind in [WeightKind::Psi, WeightKind::Phi] {
            let p = WeightProfile::from_radii(0.5, 0.8, kind).unwrap();
            assert_abs_diff_eq!(weight_eval(&p, at_radius(0.5)), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(weight_eval(&p, at_radius(0.8)), 0.0, epsilon = 1e-15);
            assert_eq!(weight_eval(&p, at_radius(0.9)), 0.0);
            assert_eq!(weight_eval(&p, at_radius(0.1)), 1.0);
        }
        let phi = WeightProfile::from_radii(0.5, 0.8, WeightKind::Phi).unwrap();
        let expected = (0.8f64 / 0.65).ln() / 1.6f64.ln();
        assert_abs_diff_eq!(weight_eval(&phi, at_radius(0.65)), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(weight_eval(&phi, at_radius(0.65)), 0.441_782, epsilon = 1e-6);
        let psi = phi.with_kind(WeightKind::Psi);
        assert_abs_diff_eq!(weight_eval(&psi, at_radius(0.65)), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn continuity_at_interfaces() {
        for kind in [WeightKind::Psi, WeightKind::Phi] {
            let p = WeightProfile::from_log_radii(3.0, 1.5, kind).unwrap();
            let eps = 1e-9;
            assert_abs_diff_eq!(p.weight_at_log_radius(3.0 + eps), 1.0, epsilon = 1e-7);
            assert_abs_diff_eq!(p.weight_at_log_radius(4.5 - eps), 0.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn constructors_agree() {
        let a = WeightProfile::from_log_radii(1.2, 0.7, WeightKind::Phi).unwrap();
        let b = WeightProfile::from_radii(1.2f64.tanh(), 1.9f64.tanh(), WeightKind::Phi).unwrap();
        assert_relative_eq!(a.a(), b.a(), max_relative = 1e-13);
        assert_relative_eq!(a.rho_prime(), b.rho_prime(), max_relative = 1e-13);
        assert_abs_diff_eq!(a.a(), 1.0 / (b.r_out() / b.r_in()).ln(), epsilon = 1e-13);
        assert!(WeightProfile::from_radii(0.8, 0.5, WeightKind::Psi).is_err());
        assert!(WeightProfile::from_radii(0.5, 1.0, WeightKind::Psi).is_err());
        assert!(WeightProfile::from_log_radii(0.0, 1.0, WeightKind::Psi).is_err());
    }

    #[test]
    fn stable_difference_matches_naive() {
        let p = WeightProfile::from_radii(0.3, 0.9, WeightKind::Psi).unwrap();
        for i in 1..50 {
            let r = 0.3 + 0.6 * i as f64 / 50.0;
            let c = 1.0 - r;
            let naive = p.weight_from_co(c) - p.with_kind(WeightKind::Phi).weight_from_co(c);
            assert_abs_diff_eq!(p.psi_minus_phi_from_co(c), naive, epsilon = 1e-14);
        }
    }

    #[test]
    fn normalizer_examples() {
        let phi = WeightProfile::from_radii(0.9, 0.95, WeightKind::Phi).unwrap();
        let n = normalizer(&phi, 1e-12).unwrap();
        assert!(n >= disk_area(2.0 * phi.rho()));

        // first term of the split: ∫_0^R r dr/(1 - r²)²
        let r: f64 = 0.9;
        let first = integrate_1d(
            |s| s / ((1.0 - s * s) * (1.0 - s * s)),
            &Interval1D::new(0.0, r, 1e-13).unwrap(),
        )
        .unwrap();
        let closed = r * r / (2.0 * (1.0 - r) * (1.0 + r));
        assert_abs_diff_eq!(first, closed, epsilon = 1e-10);
        assert_relative_eq!(8.0 * PI * first, phi.inner_area(), max_relative = 1e-11);

        for kind in [WeightKind::Psi, WeightKind::Phi] {
            let p = WeightProfile::from_log_radii(12.0, 6.0, kind).unwrap();
            let ratio = normalizer(&p, 1e-12).unwrap() / (4.0 * PI * p.a() * p.rho_prime());
            assert!((0.9..=1.1).contains(&ratio), "{kind:?}: {ratio}");
        }
    }

    #[test]
    fn normalizer_matches_euclidean_radial_quadrature() {
        let p = WeightProfile::from_radii(0.4, 0.85, WeightKind::Phi).unwrap();
        let f = |r: f64| {
            let q = 1.0 - r * r;
            8.0 * PI * weight_eval(&p, at_radius(r)) * r / (q * q)
        };
        let oracle = integrate_1d(f, &Interval1D::new(0.0, 0.4, 1e-12).unwrap()).unwrap()
            + integrate_1d(f, &Interval1D::new(0.4, 0.85, 1e-12).unwrap()).unwrap();
        assert_relative_eq!(normalizer(&p, 1e-13).unwrap(), oracle, max_relative = 1e-11);
    }

    #[test]
    fn measure_examples() {
        let p = WeightProfile::from_log_radii(2.0, 1.0, WeightKind::Phi).unwrap();
        let grid = PolarGrid::fitted(&p, 40, 16).unwrap();
        let m = make_measure(&p, &grid).unwrap();
        assert_abs_diff_eq!(m.total_weight(), 1.0, epsilon = 1e-12);
        assert_eq!(m.mass_where(|g| g.radius > 2.0 * p.outer_log_radius()), 0.0);
        let inner = m.mass_where(|g| g.radius <= 2.0 * p.rho());
        let oracle = disk_area(2.0 * p.rho()) / normalizer(&p, 1e-12).unwrap();
        assert_abs_diff_eq!(inner, oracle, epsilon = 1e-6);

        let euclid = PolarGrid::new(RadialScale::Euclidean, 1.0, 400, 8).unwrap();
        let m2 = make_measure(&p, &euclid).unwrap();
        assert_abs_diff_eq!(m2.mass_where(|g| g.radius <= 2.0 * p.rho()), oracle, epsilon = 1e-6);
    }

    #[test]
    fn measure_resolution_errors() {
        let p = WeightProfile::from_log_radii(10.0, 2.0, WeightKind::Psi).unwrap();
        let euclid = PolarGrid::new(RadialScale::Euclidean, 1.0, 1000, 8).unwrap();
        assert!(matches!(make_measure(&p, &euclid), Err(Error::Resolution(_))));
        let short = PolarGrid::new(RadialScale::LogRadius, 11.0, 1000, 8).unwrap();
        assert!(matches!(make_measure(&p, &short), Err(Error::Resolution(_))));
    }

    #[test]
    fn gap_examples() {
        let psi = WeightProfile::from_log_radii(4.0, 2.0, WeightKind::Psi).unwrap();
        let zero = measure_gap(&psi, &psi, 1e-12).unwrap();
        assert_eq!(zero.l1_gap, 0.0);

        let rep = measure_gap(&psi, &psi.with_kind(WeightKind::Phi), 1e-12).unwrap();
        assert!(rep.l1_gap > 0.0 && rep.l1_gap <= rep.normalizer_bound * (1.0 + 1e-9));
        assert!(rep.difference_identity_residual() < 1e-10);

        let far = WeightProfile::from_log_radii(8.0, 4.0, WeightKind::Psi).unwrap();
        let rep_far = measure_gap(&far, &far.with_kind(WeightKind::Phi), 1e-12).unwrap();
        assert!(rep_far.l1_gap < rep.l1_gap);
    }

    #[test]
    fn gap_matches_naive_quadrature_at_moderate_radius() {
        // both densities formed separately; fine while ψ - φ does not cancel
        let psi = WeightProfile::from_log_radii(1.0, 1.0, WeightKind::Psi).unwrap();
        let phi = psi.with_kind(WeightKind::Phi);
        let (np, nf) = (normalizer(&psi, 1e-13).unwrap(), normalizer(&phi, 1e-13).unwrap());
        let f =
            |a: f64| (psi.weight_at_log_radius(a) / np - phi.weight_at_log_radius(a) / nf).abs() * radial_density(a);
        let mut oracle = 0.0;
        let n = 4000;
        for i in 0..n {
            let (lo, hi) = (2.0 * i as f64 / n as f64, 2.0 * (i + 1) as f64 / n as f64);
            oracle += gauss_legendre8(f, lo, hi);
        }
        let rep = measure_gap(&psi, &phi, 1e-12).unwrap();
        assert_relative_eq!(rep.l1_gap, oracle, max_relative = 1e-8);
    }

    #[test]
    fn log_ratio_asymptotic() {
        let r: f64 = 1.0 - 1e-4;
        let rp = r + (1.0 - r) / 2.0;
        let p = WeightProfile::from_radii(r, rp, WeightKind::Phi).unwrap();
        assert_abs_diff_eq!(p.a_times_width(), 1.0, epsilon = 1e-3);
    }
}
