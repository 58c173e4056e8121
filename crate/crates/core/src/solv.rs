//! The `Solv3` torus bundle and the disk averages `β_ρ(z_ρ)` on it.
//!
//! `Solv3 = {(x, q, t)}` with `(x,q,t)(x',q',t') = (e^t x' + x, e^{-t} q' + q, t + t')`.
//! Each leaf `{q = q0}` is a copy of the half-plane through `(x, q, t) ↦ x + e^t i`,
//! on which `Y^t = (0,0,t)` and `S^s = (s,0,0)` act by `x + yi ↦ x + e^t yi` and
//! `x + yi ↦ x + ys + yi`.
//!
//! For the geodesic disk of radius `ρ` about `z_ρ = e^ρ i`, the normalized area of
//! the band `t1 <= log y <= t2` converges as `ρ -> ∞` to `∫ Φ̂` with
//! `Φ̂(t) = (2/π) sqrt(e^{-t} - e^{-2t})` on `t >= 0`. Reduced modulo 1 in `t` the
//! limit density is `Φ(t) = Σ_k Φ̂(t + k)`, which is not constant, so the limit of
//! the disk averages differs from the harmonic measure `dx dq dt`.

use crate::error::{Error, Result};
use crate::hyp::HalfPlanePoint;
use crate::measure::{neumaier_sum, NodeMeasure};
use crate::quad::{integrate_1d, sample_hyperbolic_disk, Interval1D};
use rayon::prelude::*;
use std::f64::consts::{LN_2, PI};

/// An element `(x, q, t)` of `Solv3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolvElement {
    pub x: f64,
    pub q: f64,
    pub t: f64,
}

impl SolvElement {
    pub const IDENTITY: SolvElement = SolvElement { x: 0.0, q: 0.0, t: 0.0 };

    pub fn new(x: f64, q: f64, t: f64) -> Self {
        Self { x, q, t }
    }

    pub fn mul(&self, other: &SolvElement) -> SolvElement {
        SolvElement {
            x: self.t.exp() * other.x + self.x,
            q: (-self.t).exp() * other.q + self.q,
            t: self.t + other.t,
        }
    }

    pub fn inverse(&self) -> SolvElement {
        SolvElement {
            x: -(-self.t).exp() * self.x,
            q: -self.t.exp() * self.q,
            t: -self.t,
        }
    }

    /// Left action on the leaf: `z ↦ e^t z + x`.
    pub fn act(&self, z: HalfPlanePoint) -> Result<HalfPlanePoint> {
        let s = self.t.exp();
        HalfPlanePoint::new(s * z.x() + self.x, s * z.y())
    }

    /// The leaf point `x + e^t i`.
    pub fn leaf_point(&self) -> Result<HalfPlanePoint> {
        HalfPlanePoint::new(self.x, self.t.exp())
    }
}

/// `Y^t(x + yi) = x + e^t yi`.
pub fn flow_y(t: f64, z: HalfPlanePoint) -> Result<HalfPlanePoint> {
    HalfPlanePoint::new(z.x(), t.exp() * z.y())
}

/// `S^s(x + yi) = x + ys + yi`.
pub fn flow_s(s: f64, z: HalfPlanePoint) -> Result<HalfPlanePoint> {
    HalfPlanePoint::new(z.x() + z.y() * s, z.y())
}

/// Residual of `Y^t ∘ S^s = S^{s e^{-t}} ∘ Y^t` at `z`, relative to the size of
/// the image.
pub fn flow_commutation_residual(t: f64, s: f64, z: HalfPlanePoint) -> Result<f64> {
    let lhs = flow_y(t, flow_s(s, z)?)?;
    let rhs = flow_s(s * (-t).exp(), flow_y(t, z)?)?;
    let scale = 1.0f64.max(lhs.x().abs()).max(lhs.y().abs());
    Ok((lhs.x() - rhs.x()).abs().max((lhs.y() - rhs.y()).abs()) / scale)
}

/// A hyperbolic `A ∈ SL(2, Z)` with its eigen-data.
///
/// The columns of `P` are eigenvectors of `A` for `μ` and `1/μ`, `|μ| > 1`, scaled
/// so that `|det P| = 1`. The plane lattice `Λ` is spanned by the rows of `P`; it
/// satisfies `Λ diag(μ, 1/μ) = Λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    a: [[i64; 2]; 2],
    mu: f64,
    p: [[f64; 2]; 2],
    p_inv: [[f64; 2]; 2],
}

impl LatticeSpec {
    /// `A = [[a, b], [c, d]]`.
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::Lattice(format!(
                "det [[{a}, {b}], [{c}, {d}]] = {} is not 1",
                a * d - b * c
            )));
        }
        let tr = a + d;
        if tr.abs() <= 2 {
            return Err(Error::Lattice(format!(
                "|trace| = {} is not > 2, so the matrix is not hyperbolic",
                tr.abs()
            )));
        }
        let trf = tr as f64;
        let disc = (trf * trf - 4.0).sqrt();
        let mu = trf.signum() * (trf.abs() + disc) / 2.0;
        let nu = 1.0 / mu;
        // b != 0 for hyperbolic A with det 1
        let v = [b as f64, mu - a as f64];
        let w = [b as f64, nu - a as f64];
        let det = v[0] * w[1] - w[0] * v[1];
        if !(det.abs() > 1e-12) {
            return Err(Error::Lattice("eigenbasis is degenerate".into()));
        }
        let s = 1.0 / det.abs().sqrt();
        let p = [[v[0] * s, w[0] * s], [v[1] * s, w[1] * s]];
        let dp = p[0][0] * p[1][1] - p[0][1] * p[1][0];
        let p_inv = [[p[1][1] / dp, -p[0][1] / dp], [-p[1][0] / dp, p[0][0] / dp]];
        Ok(Self {
            a: [[a, b], [c, d]],
            mu,
            p,
            p_inv,
        })
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.a
    }

    /// The expanding eigenvalue `λ = |μ| > 1`.
    pub fn lambda(&self) -> f64 {
        self.mu.abs()
    }

    /// The expanding eigenvalue with its sign.
    pub fn eigenvalue(&self) -> f64 {
        self.mu
    }

    /// The two basis vectors of `Λ` in `(x, q)` coordinates.
    pub fn basis(&self) -> [[f64; 2]; 2] {
        self.p
    }

    /// `Σ n_i e_i` for the basis vectors `e_i` of `Λ`.
    pub fn lattice_vector(&self, n: i64, m: i64) -> [f64; 2] {
        let (n, m) = (n as f64, m as f64);
        [n * self.p[0][0] + m * self.p[1][0], n * self.p[0][1] + m * self.p[1][1]]
    }
}

impl Default for LatticeSpec {
    fn default() -> Self {
        Self::from_ints(2, 1, 1, 1).expect("[[2,1],[1,1]] is hyperbolic")
    }
}

/// Canonical representative of a point of the quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientPoint {
    /// Lattice coordinates of the fiber point, in `[0, 1)²`.
    pub torus: (f64, f64),
    /// `t mod 1`, in `[0, 1)`.
    pub circle_t: f64,
}

fn frac(v: f64) -> f64 {
    let f = v - v.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Reduces `(x, q, t)`: with `n = ⌊t⌋`, the fiber point `(x μ^{-n}, q μ^n)` is taken
/// modulo `Λ` and `t` modulo 1.
pub fn quotient_reduce(g: &SolvElement, lat: &LatticeSpec) -> Result<QuotientPoint> {
    if !(g.x.is_finite() && g.q.is_finite() && g.t.is_finite()) {
        return Err(Error::Lattice(format!("cannot reduce non-finite element {g:?}")));
    }
    let n = g.t.floor();
    let circle_t = frac(g.t);
    let k = n as i32;
    let x = g.x * lat.mu.powi(-k);
    let q = g.q * lat.mu.powi(k);
    let c0 = x * lat.p_inv[0][0] + q * lat.p_inv[1][0];
    let c1 = x * lat.p_inv[0][1] + q * lat.p_inv[1][1];
    if !(c0.is_finite() && c1.is_finite()) {
        return Err(Error::Lattice(format!("twist overflows at t = {}", g.t)));
    }
    Ok(QuotientPoint {
        torus: (frac(c0), frac(c1)),
        circle_t,
    })
}

/// Layout of the samples of a [`DensityCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridLayout {
    /// Values at `t_lo + i h`, `i = 0..n`, including both ends.
    Nodes,
    /// Values on the `n` cells of `[t_lo, t_hi)`, reported at cell centers.
    Cells,
}

/// A real function sampled on a uniform 1D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    t_lo: f64,
    t_hi: f64,
    values: Vec<f64>,
    layout: GridLayout,
}

impl DensityCurve {
    pub fn new(t_lo: f64, t_hi: f64, values: Vec<f64>, layout: GridLayout) -> Result<Self> {
        let min_len = match layout {
            GridLayout::Nodes => 2,
            GridLayout::Cells => 1,
        };
        if !(t_lo < t_hi) || values.len() < min_len {
            return Err(Error::domain(format!(
                "density curve needs t_lo < t_hi and at least {min_len} values"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("density curve values must be finite"));
        }
        Ok(Self {
            t_lo,
            t_hi,
            values,
            layout,
        })
    }

    /// Samples `f` at the nodes of a uniform grid with `points` nodes.
    pub fn sample(t_lo: f64, t_hi: f64, points: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if points < 2 {
            return Err(Error::domain("need at least two grid points"));
        }
        let h = (t_hi - t_lo) / (points - 1) as f64;
        let values = (0..points).map(|i| f(t_lo + i as f64 * h)).collect();
        Self::new(t_lo, t_hi, values, GridLayout::Nodes)
    }

    pub fn t_lo(&self) -> f64 {
        self.t_lo
    }

    pub fn t_hi(&self) -> f64 {
        self.t_hi
    }

    pub fn layout(&self) -> GridLayout {
        self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        match self.layout {
            GridLayout::Nodes => (self.t_hi - self.t_lo) / (self.values.len() - 1) as f64,
            GridLayout::Cells => (self.t_hi - self.t_lo) / self.values.len() as f64,
        }
    }

    /// Abscissa of value `i`.
    pub fn abscissa(&self, i: usize) -> f64 {
        match self.layout {
            GridLayout::Nodes => self.t_lo + i as f64 * self.spacing(),
            GridLayout::Cells => self.t_lo + (i as f64 + 0.5) * self.spacing(),
        }
    }

    /// `(t, value)` pairs.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.abscissa(i), v))
    }

    /// Trapezoid rule on nodes, exact cell sum on cells.
    pub fn mass(&self) -> f64 {
        let h = self.spacing();
        match self.layout {
            GridLayout::Cells => h * neumaier_sum(self.values.iter().copied()),
            GridLayout::Nodes => {
                let n = self.values.len();
                let inner = neumaier_sum(self.values[1..n - 1].iter().copied());
                h * (inner + 0.5 * (self.values[0] + self.values[n - 1]))
            }
        }
    }

    /// Index of the largest value (first on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }
}

/// `Φ̂(t) = (2/π) sqrt(e^{-t} - e^{-2t})` for `t >= 0`, else 0. Maximal at `log 2`.
pub fn phi_hat(t: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let u = (-t).exp();
    2.0 / PI * (u * -(-t).exp_m1()).sqrt()
}

/// `Σ Φ̂(t + k)` over the integers `k` with `t + k ∈ [0, K]`.
pub fn phi_periodized(t: f64, k_max: u32) -> f64 {
    let k_max = k_max as f64;
    let first = (-t).ceil();
    let last = (k_max - t).floor();
    if first > last {
        return 0.0;
    }
    let count = (last - first) as usize + 1;
    neumaier_sum((0..count).map(|i| phi_hat(t + first + i as f64)))
}

/// Smallest `K` with `(2/π) e^{-(K+1)/2} / (1 - e^{-1/2}) < tol`, which bounds the
/// tail of the periodized sum.
pub fn truncation_for(tol: f64) -> u32 {
    let c = 2.0 / PI / (1.0 - (-0.5f64).exp());
    let k = (2.0 * (c / tol).ln() - 1.0).ceil().max(1.0);
    k as u32
}

/// `Φ(0)`, `Φ(log 2)` and `Φ(log 2) - Φ(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotConstant {
    pub phi0: f64,
    pub phi_log2: f64,
    pub margin: f64,
}

pub fn check_not_constant(k_max: u32) -> Result<NotConstant> {
    if k_max < 20 {
        return Err(Error::domain(format!("truncation K = {k_max} is below 20")));
    }
    let phi0 = phi_periodized(0.0, k_max);
    let phi_log2 = phi_periodized(LN_2, k_max);
    Ok(NotConstant {
        phi0,
        phi_log2,
        margin: phi_log2 - phi0,
    })
}

/// `β_ρ(z_ρ)(T² × [t1, t2])`: the Poincaré area of the part of the disk of radius `ρ`
/// about `e^ρ i` with `t1 <= log y <= t2`, over the area of the disk.
///
/// The band area is `(2/π)`-normalized as
/// `∫ sqrt((1 - e^{-t})(e^{2ρ-t} - 1)) dt / ((e^{ρ/2} - e^{-ρ/2})² π/2)`.
pub fn band_mass(rho: f64, t1: f64, t2: f64, tol: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::domain(format!("disk radius must be positive, got {rho}")));
    }
    let (lo, hi) = (t1.max(0.0), t2.min(2.0 * rho));
    if !(lo < hi) {
        return Ok(0.0);
    }
    let s = (rho / 2.0).sinh();
    let denom = 4.0 * s * s * PI / 2.0;
    let chord = |t: f64| ((-(-t).exp_m1()) * (2.0 * rho - t).exp_m1()).max(0.0).sqrt();
    Ok(integrate_1d(chord, &Interval1D::new(lo, hi, tol * denom)?)? / denom)
}

/// `∫_{t1}^{t2} Φ̂`, in closed form.
pub fn limit_band_mass(t1: f64, t2: f64) -> f64 {
    let prim = |t: f64| {
        if t == f64::INFINITY {
            return 0.0;
        }
        let u = (-t.max(0.0)).exp();
        -((u * (1.0 - u)).max(0.0).sqrt() + u.sqrt().asin())
    };
    if !(t1 < t2) {
        return 0.0;
    }
    2.0 / PI * (prim(t2) - prim(t1))
}

/// Expected mass of each of `bins` equal cells of `t mod 1` under `β_ρ(z_ρ)`.
pub fn bin_band_masses(rho: f64, bins: usize, tol: f64) -> Result<Vec<f64>> {
    let periods = (2.0 * rho).ceil() as usize;
    let per_call = tol / (periods as f64 + 1.0);
    (0..bins)
        .into_par_iter()
        .map(|b| {
            let (lo, hi) = (b as f64 / bins as f64, (b + 1) as f64 / bins as f64);
            let parts = (0..=periods)
                .map(|k| band_mass(rho, k as f64 + lo, k as f64 + hi, per_call))
                .collect::<Result<Vec<_>>>()?;
            Ok(neumaier_sum(parts))
        })
        .collect()
}

/// `n` samples of `β_ρ(z_ρ)` on the leaf `q = 0`, uniform for the Poincaré area on
/// the disk of radius `ρ` about `e^ρ i`.
pub fn sample_beta(seed: u64, rho: f64, n: usize) -> Result<NodeMeasure<SolvElement>> {
    let disk = sample_hyperbolic_disk(seed, rho, n)?;
    let scale = rho.exp();
    let points: Vec<SolvElement> = disk
        .points()
        .par_iter()
        .map(|g| {
            let z = g.to_half_plane();
            SolvElement::new(scale * z.x(), 0.0, rho + g.log_height())
        })
        .collect();
    Ok(NodeMeasure::uniform(points).expect("n >= 1"))
}

/// Bin counts of `t mod 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn fraction(&self, b: usize) -> f64 {
        self.counts[b] as f64 / self.total as f64
    }

    /// Density on `[0, 1)`: bin fraction times the number of bins.
    pub fn density(&self) -> DensityCurve {
        let bins = self.bins() as f64;
        let values = (0..self.bins()).map(|b| self.fraction(b) * bins).collect();
        DensityCurve::new(0.0, 1.0, values, GridLayout::Cells).expect("bins >= 1")
    }
}

fn reduce_all(sample: &NodeMeasure<SolvElement>, lat: &LatticeSpec) -> Result<Vec<QuotientPoint>> {
    sample.points().par_iter().map(|g| quotient_reduce(g, lat)).collect()
}

fn check_mc_args(rho: f64, n: usize) -> Result<()> {
    if !(rho > 0.0) {
        return Err(Error::domain(format!("disk radius must be positive, got {rho}")));
    }
    if n < 1000 {
        return Err(Error::domain(format!(
            "Monte Carlo needs at least 1000 samples, got {n}"
        )));
    }
    Ok(())
}

/// Histogram of `t mod 1` for `n` samples of `β_ρ(z_ρ)` reduced to the quotient.
/// Bins are left-closed.
pub fn mc_histogram(seed: u64, rho: f64, n: usize, bins: usize, lat: &LatticeSpec) -> Result<Histogram> {
    check_mc_args(rho, n)?;
    if bins == 0 {
        return Err(Error::domain("need at least one bin"));
    }
    let reduced = reduce_all(&sample_beta(seed, rho, n)?, lat)?;
    let mut counts = vec![0u64; bins];
    for p in &reduced {
        let b = ((p.circle_t * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(Histogram {
        counts,
        total: n as u64,
    })
}

/// The density of `t mod 1` under the reduced samples, on `bins` cells of `[0, 1)`.
pub fn mc_pushforward(seed: u64, rho: f64, n: usize, bins: usize, lat: &LatticeSpec) -> Result<DensityCurve> {
    Ok(mc_histogram(seed, rho, n, bins, lat)?.density())
}

/// Largest modulus of the Fourier coefficients `E[e^{2πi(j u + k v)}]`,
/// `0 < max(|j|, |k|) <= modes`, of points of the torus `[0, 1)²`.
pub fn fourier_max(points: &[(f64, f64)], modes: u32) -> (f64, (i32, i32)) {
    let m = modes as i32;
    let mut pairs = Vec::new();
    for j in 0..=m {
        for k in -m..=m {
            if j > 0 || k > 0 {
                pairs.push((j, k));
            }
        }
    }
    let n = points.len() as f64;
    let moduli: Vec<f64> = pairs
        .par_iter()
        .map(|&(j, k)| {
            let (mut re, mut im) = (0.0, 0.0);
            for &(u, v) in points {
                let arg = 2.0 * PI * (j as f64 * u + k as f64 * v);
                re += arg.cos();
                im += arg.sin();
            }
            (re / n).hypot(im / n)
        })
        .collect();
    let mut best = (0.0, (0, 0));
    for (&c, &jk) in moduli.iter().zip(&pairs) {
        if c > best.0 {
            best = (c, jk);
        }
    }
    best
}

/// Fourier statistic of the fiber distribution within a `t`-band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberReport {
    pub max_coefficient: f64,
    pub mode: (i32, i32),
    /// Samples with `circle_t` in the band.
    pub band_count: usize,
}

impl FiberReport {
    /// `1/sqrt(band_count)`, the CLT scale of a single coefficient under uniformity.
    pub fn noise_scale(&self) -> f64 {
        1.0 / (self.band_count as f64).sqrt()
    }
}

/// Fiberwise equidistribution test: reduces `n` samples of `β_ρ(z_ρ)`, keeps those
/// with `t mod 1 ∈ [band.0, band.1)` and reports the largest nonzero Fourier
/// coefficient of their torus coordinates up to order `modes`.
pub fn torus_fiber_test(
    seed: u64,
    rho: f64,
    n: usize,
    lat: &LatticeSpec,
    modes: u32,
    band: (f64, f64),
) -> Result<FiberReport> {
    check_mc_args(rho, n)?;
    let reduced = reduce_all(&sample_beta(seed, rho, n)?, lat)?;
    let fiber: Vec<(f64, f64)> = reduced
        .iter()
        .filter(|p| p.circle_t >= band.0 && p.circle_t < band.1)
        .map(|p| p.torus)
        .collect();
    if fiber.is_empty() {
        return Err(Error::DegenerateInput(format!(
            "no samples with t mod 1 in [{}, {})",
            band.0, band.1
        )));
    }
    let (max_coefficient, mode) = fourier_max(&fiber, modes);
    Ok(FiberReport {
        max_coefficient,
        mode,
        band_count: fiber.len(),
    })
}
