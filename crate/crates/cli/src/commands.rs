//! One report builder per subcommand. Every builder is a pure function of its
//! parameters; parallel sections collect in index order.

use crate::report::{Cell, Report};
use equilab::harmonic::{
    default_basis, defect_ratio, green_riesz_residual, numerator_bound_ratio, random_smooth,
    weighted_laplacian_integral, LaplacianMethod, TestFunction,
};
use equilab::hyp::{conjugation_residual, HalfPlanePoint, UnitTangent};
use equilab::quad::{integrate_1d, Interval1D};
use equilab::solv::{
    bin_band_masses, check_not_constant, flow_commutation_residual, limit_band_mass, mc_histogram, phi_hat,
    phi_periodized, DensityCurve, LatticeSpec,
};
use equilab::weights::{measure_gap, WeightKind, WeightProfile};
use equilab::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

/// Relative tolerance of the normalizer and gap integrals.
const WEIGHT_TOL: f64 = 1e-12;

/// Tolerance of the band mass integrals.
const BAND_TOL: f64 = 1e-11;

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn fmt_e(v: f64) -> String {
    format!("{v:.3e}")
}

/// `E[Φ]` over each of `bins` cells of `[0, 1)`, Φ truncated to `t + k <= K`.
pub fn limit_bin_densities(bins: usize, k_max: u32) -> Vec<f64> {
    (0..bins)
        .map(|b| {
            let (lo, hi) = (b as f64 / bins as f64, (b + 1) as f64 / bins as f64);
            let mass: f64 = (0..k_max).map(|k| limit_band_mass(k as f64 + lo, k as f64 + hi)).sum();
            mass * bins as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitIntegral {
    pub tol: f64,
}

/// `∫_0^∞ sqrt(e^{-t} - e^{-2t}) dt` against `π/2`.
pub fn limit_integral(p: &LimitIntegral) -> Result<Report> {
    require_positive("tol", p.tol)?;
    let dom = Interval1D::to_infinity(0.0, p.tol)?;
    let computed = integrate_1d(|t: f64| ((-t).exp() - (-2.0 * t).exp()).max(0.0).sqrt(), &dom)?;
    let diff = computed - FRAC_PI_2;
    let mut r = Report::new(&["tol", "computed", "exact", "difference"]);
    r.push_row(vec![p.tol.into(), computed.into(), FRAC_PI_2.into(), diff.into()]);
    r.check(
        "limit-integral",
        diff.abs() <= p.tol,
        format!("|difference| = {} vs tol {}", fmt_e(diff.abs()), p.tol),
    );
    r.note(format!("integral = {computed:.15}, pi/2 - integral = {}", fmt_e(-diff)));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhihatCurve {
    pub t_lo: f64,
    pub t_hi: f64,
    pub points: usize,
    pub k: u32,
}

impl Default for PhihatCurve {
    fn default() -> Self {
        Self {
            t_lo: -1.0,
            t_hi: 20.0,
            points: 2101,
            k: 40,
        }
    }
}

/// `Φ̂` and its periodization `Φ` on a uniform grid.
pub fn phihat_curve(p: &PhihatCurve) -> Result<Report> {
    let curve = DensityCurve::sample(p.t_lo, p.t_hi, p.points, phi_hat)?;
    let h = curve.spacing();
    let mut r = Report::new(&["t", "phi_hat", "phi_periodized"]);
    for (t, v) in curve.rows() {
        r.push_row(vec![t.into(), v.into(), phi_periodized(t, p.k).into()]);
    }
    if p.t_lo <= LN_2 && LN_2 <= p.t_hi {
        let t_max = curve.abscissa(curve.argmax());
        r.check(
            "phihat-argmax",
            (t_max - LN_2).abs() <= h,
            format!("argmax at t = {t_max:.6}, log 2 = {LN_2:.6}, step {h:.3e}"),
        );
    }
    let nonzero_left = curve.rows().filter(|&(t, v)| t <= 0.0 && v != 0.0).count();
    r.check(
        "phihat-support",
        nonzero_left == 0,
        format!("{nonzero_left} nonzero values at t <= 0"),
    );
    if p.t_lo <= 0.0 && p.t_hi >= 20.0 && h <= 0.02 {
        let mass = curve.mass();
        r.check(
            "phihat-mass",
            (mass - 1.0).abs() < 1e-3,
            format!("trapezoid mass {mass:.6}"),
        );
    }
    r.note(format!("{} points, step {h:.4e}, K = {}", p.points, p.k));
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandConvergence {
    pub rhos: Vec<f64>,
    pub bins: usize,
}

impl Default for BandConvergence {
    fn default() -> Self {
        Self {
            rhos: vec![4.0, 6.0, 8.0, 10.0, 12.0, 14.0],
            bins: 32,
        }
    }
}

/// Sup distance between the binned density of `t mod 1` under `β_ρ` and the
/// binned limit `Φ`, per `ρ`.
pub fn band_convergence(p: &BandConvergence) -> Result<Report> {
    if p.bins == 0 || p.rhos.is_empty() {
        return Err(Error::domain("band-convergence needs at least one bin and one radius"));
    }
    let limit = limit_bin_densities(p.bins, 80);
    let mut r = Report::new(&["rho", "mass", "sup_distance"]);
    let mut dists = Vec::new();
    for &rho in &p.rhos {
        require_positive("rho", rho)?;
        let masses = bin_band_masses(rho, p.bins, BAND_TOL)?;
        let mass: f64 = masses.iter().sum();
        let d = masses
            .iter()
            .zip(&limit)
            .map(|(m, l)| (m * p.bins as f64 - l).abs())
            .fold(0.0, f64::max);
        r.push_row(vec![rho.into(), mass.into(), d.into()]);
        r.check(
            "band-mass",
            (mass - 1.0).abs() <= 1e-8,
            format!("rho = {rho}: mass {mass:.12}"),
        );
        dists.push((rho, d));
    }
    let decreasing = dists.windows(2).all(|w| w[0].0 < w[1].0 && w[1].1 < w[0].1);
    r.check("band-decreasing", decreasing, "sup distance strictly decreasing in rho");
    if let Some(&(_, d)) = dists.iter().find(|(rho, _)| *rho == 14.0) {
        r.check(
            "band-rho-14",
            d < 5e-3,
            format!("sup distance at rho = 14: {}", fmt_e(d)),
        );
    }
    for (rho, d) in &dists {
        r.note(format!("rho = {rho}: sup distance {}", fmt_e(*d)));
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSolv {
    pub rho: f64,
    pub n: usize,
    pub bins: usize,
    pub k: u32,
    pub seed: u64,
    pub lattice: LatticeSpec,
}

impl McSolv {
    pub fn new(seed: u64) -> Self {
        Self {
            rho: 12.0,
            n: 1_000_000,
            bins: 32,
            k: 40,
            seed,
            lattice: LatticeSpec::default(),
        }
    }
}

/// Sample count from which the sup-distance threshold 0.02 applies.
pub const MC_SUP_MIN_N: usize = 1_000_000;

/// Monte Carlo histogram of `t mod 1` for `β_ρ`, against `Φ`, the exact band
/// masses and the constant density.
pub fn mc_solv(p: &McSolv) -> Result<Report> {
    let hist = mc_histogram(p.seed, p.rho, p.n, p.bins, &p.lattice)?;
    let exact = bin_band_masses(p.rho, p.bins, BAND_TOL)?;
    let phi = limit_bin_densities(p.bins, p.k);
    let nc = check_not_constant(p.k)?;
    let bins = p.bins as f64;
    let n = p.n as f64;

    let mut r = Report::new(&[
        "bin_lo",
        "bin_hi",
        "count",
        "empirical_density",
        "phi_density",
        "exact_density",
        "sigma_density",
        "constant_density",
    ]);
    let (mut d_phi, mut d_const, mut worst_z) = (0.0f64, 0.0f64, 0.0f64);
    let mut outside = Vec::new();
    for b in 0..p.bins {
        let emp = hist.fraction(b) * bins;
        let q = exact[b];
        let sigma = (q * (1.0 - q) / n).sqrt();
        let z = (hist.fraction(b) - q).abs() / sigma;
        if z > 3.0 {
            outside.push(b);
        }
        worst_z = worst_z.max(z);
        d_phi = d_phi.max((emp - phi[b]).abs());
        d_const = d_const.max((emp - 1.0).abs());
        r.push_row(vec![
            (b as f64 / bins).into(),
            ((b + 1) as f64 / bins).into(),
            Cell::Int(hist.counts[b] as i64),
            emp.into(),
            phi[b].into(),
            (q * bins).into(),
            (sigma * bins).into(),
            1.0.into(),
        ]);
    }
    let total: u64 = hist.counts.iter().sum();
    let mass = hist.density().mass();
    r.check(
        "mc-mass",
        total == hist.total && (mass - 1.0).abs() <= 1e-12,
        format!("{total} of {} samples binned, density mass {mass:.15}", hist.total),
    );
    r.check(
        "mc-margin",
        nc.margin > 0.05,
        format!("Phi(log 2) - Phi(0) = {:.6}", nc.margin),
    );
    if p.n >= MC_SUP_MIN_N {
        r.check(
            "mc-sup-phi",
            d_phi <= 0.02,
            format!("sup |empirical - Phi| = {d_phi:.5}"),
        );
    }
    r.check(
        "mc-binomial",
        outside.is_empty(),
        format!("largest deviation {worst_z:.2} sigma, bins beyond 3 sigma: {outside:?}"),
    );
    r.check(
        "mc-not-constant",
        d_const > d_phi,
        format!("sup distance to 1 = {d_const:.5}, to Phi = {d_phi:.5}"),
    );
    r.note(format!(
        "Phi(0) = {:.9}, Phi(log 2) = {:.9}, margin = {:.6}",
        nc.phi0, nc.phi_log2, nc.margin
    ));
    r.note(format!(
        "sup distance to Phi {d_phi:.5}, to the constant density {d_const:.5}"
    ));
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectSweep {
    pub rho: f64,
    pub rho_primes: Vec<f64>,
    pub basis_size: usize,
}

impl Default for DefectSweep {
    fn default() -> Self {
        Self {
            rho: 10.0,
            rho_primes: vec![2.0, 4.0, 6.0, 8.0],
            basis_size: 8,
        }
    }
}

/// Tolerance of the defect numerators.
const DEFECT_TOL: f64 = 1e-12;

/// Allowed excess of a defect ratio over its bound.
const BOUND_SLACK: f64 = 1e-8;

/// Defect ratios of the first `basis_size` regression functions for φ profiles,
/// against the bound `4πA / ∫φ v_P`.
pub fn defect_sweep(p: &DefectSweep) -> Result<Report> {
    let basis = default_basis();
    if p.basis_size == 0 || p.basis_size > basis.len() {
        return Err(Error::domain(format!(
            "basis size must be in 1..={}, got {}",
            basis.len(),
            p.basis_size
        )));
    }
    let basis = &basis[..p.basis_size];
    let mut r = Report::new(&["rho", "rho_prime", "function", "defect_ratio", "bound"]);
    let mut maxima = Vec::new();
    for &rp in &p.rho_primes {
        let prof = WeightProfile::from_log_radii(p.rho, rp, WeightKind::Phi)?;
        let bound = numerator_bound_ratio(&prof, WEIGHT_TOL)?;
        let ratios: Vec<f64> = basis
            .par_iter()
            .map(|f| defect_ratio(&prof, f, DEFECT_TOL))
            .collect::<Result<_>>()?;
        let mut worst: f64 = 0.0;
        for (f, &q) in basis.iter().zip(&ratios) {
            r.push_row(vec![p.rho.into(), rp.into(), f.name().into(), q.into(), bound.into()]);
            r.check(
                "defect-bound",
                q <= bound + BOUND_SLACK,
                format!("rho' = {rp}, {}: {} vs bound {}", f.name(), fmt_e(q), fmt_e(bound)),
            );
            if f.name() == "1" {
                r.check("defect-constant", q == 0.0, format!("rho' = {rp}: ratio {q}"));
            }
            worst = worst.max(q);
        }
        r.push_row(vec![p.rho.into(), rp.into(), "max".into(), worst.into(), bound.into()]);
        maxima.push((rp, worst));
    }
    let at = |v: f64| maxima.iter().find(|(rp, _)| *rp == v).map(|&(_, m)| m);
    if let (Some(m2), Some(m8)) = (at(2.0), at(8.0)) {
        r.check(
            "defect-decay",
            m8 < 0.5 * m2,
            format!("max at rho' = 8: {}, at rho' = 2: {}", fmt_e(m8), fmt_e(m2)),
        );
    }
    for (rp, m) in &maxima {
        r.note(format!("rho = {}, rho' = {rp}: max defect ratio {}", p.rho, fmt_e(*m)));
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureGap {
    pub rhos: Vec<f64>,
    pub rho_primes: Vec<f64>,
}

impl Default for MeasureGap {
    fn default() -> Self {
        Self {
            rhos: vec![10.0],
            rho_primes: vec![2.0, 4.0, 6.0, 8.0],
        }
    }
}

/// L¹ distances between the normalized ψ- and φ-measures.
pub fn measure_gap_table(p: &MeasureGap) -> Result<Report> {
    let mut r = Report::new(&[
        "rho",
        "rho_prime",
        "l1_gap",
        "normalizer_bound",
        "psi_normalizer",
        "phi_normalizer",
        "weight_difference",
        "identity_residual",
        "self_gap",
    ]);
    for &rho in &p.rhos {
        let mut gaps = Vec::new();
        for &rp in &p.rho_primes {
            let psi = WeightProfile::from_log_radii(rho, rp, WeightKind::Psi)?;
            let phi = psi.with_kind(WeightKind::Phi);
            let g = measure_gap(&psi, &phi, WEIGHT_TOL)?;
            let own = measure_gap(&psi, &psi, WEIGHT_TOL)?.l1_gap;
            let residual = g.difference_identity_residual();
            r.push_row(vec![
                rho.into(),
                rp.into(),
                g.l1_gap.into(),
                g.normalizer_bound.into(),
                g.psi_normalizer.into(),
                g.phi_normalizer.into(),
                g.weight_difference.into(),
                residual.into(),
                own.into(),
            ]);
            let at = format!("rho = {rho}, rho' = {rp}");
            r.check(
                "gap-identity",
                residual < 1e-10,
                format!("{at}: relative residual {}", fmt_e(residual)),
            );
            r.check("gap-self", own == 0.0, format!("{at}: psi vs psi gap {own}"));
            r.check(
                "gap-normalizer",
                g.l1_gap <= g.normalizer_bound * (1.0 + 1e-6),
                format!(
                    "{at}: gap {} vs bound 2(1 - Nphi/Npsi) = {}",
                    fmt_e(g.l1_gap),
                    fmt_e(g.normalizer_bound)
                ),
            );
            if rho == 10.0 && rp == 8.0 {
                r.check("gap-small", g.l1_gap < 0.15, format!("{at}: gap {}", fmt_e(g.l1_gap)));
            }
            gaps.push((rp, g.l1_gap));
        }
        let decreasing = gaps.windows(2).all(|w| w[0].0 < w[1].0 && w[1].1 < w[0].1);
        r.check(
            "gap-decreasing",
            decreasing,
            format!("rho = {rho}: gap strictly decreasing in rho'"),
        );
        for (rp, g) in &gaps {
            r.note(format!("rho = {rho}, rho' = {rp}: L1 gap {}", fmt_e(*g)));
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowsCheck {
    pub grid: Vec<f64>,
}

impl Default for FlowsCheck {
    fn default() -> Self {
        Self {
            grid: vec![-2.0, -1.0, 0.5, 1.0, 3.0],
        }
    }
}

/// Residuals of `g^t h^s g^{-t} = h^{s e^{-t}}` at `u = [[2, 1], [1, 1]]` and of
/// `Y^t ∘ S^s = S^{s e^{-t}} ∘ Y^t` at `z = 0.3 + 1.7i`, over `grid × grid`.
pub fn flows_check(p: &FlowsCheck) -> Result<Report> {
    let u = UnitTangent::new(2.0, 1.0, 1.0, 1.0)?;
    let z = HalfPlanePoint::new(0.3, 1.7)?;
    let mut r = Report::new(&["t", "s", "conjugation_residual", "flow_residual"]);
    let (mut worst_g, mut worst_y) = (0.0f64, 0.0f64);
    for &t in &p.grid {
        for &s in &p.grid {
            let g = conjugation_residual(t, s, &u);
            let y = flow_commutation_residual(t, s, z)?;
            worst_g = worst_g.max(g);
            worst_y = worst_y.max(y);
            r.push_row(vec![t.into(), s.into(), g.into(), y.into()]);
        }
    }
    r.check(
        "flows-conjugation",
        worst_g < 1e-12,
        format!("max residual {}", fmt_e(worst_g)),
    );
    r.check(
        "flows-commutation",
        worst_y < 1e-12,
        format!("max residual {}", fmt_e(worst_y)),
    );
    r.note(format!(
        "max residuals: conjugation {}, flow commutation {}",
        fmt_e(worst_g),
        fmt_e(worst_y)
    ));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenRiesz {
    pub tol: f64,
    pub cases: usize,
    pub seed: u64,
}

impl Default for GreenRiesz {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            cases: 20,
            seed: 20,
        }
    }
}

/// Green–Riesz residuals on three annuli, then the φ-weighted Laplacian integral
/// by the boundary closed form against direct quadrature.
pub fn green_riesz(p: &GreenRiesz) -> Result<Report> {
    require_positive("tol", p.tol)?;
    let mut r = Report::new(&["case", "r_in", "r_out", "value", "reference", "residual"]);

    let one = TestFunction::new("1", |_, _| 1.0, 1.0).with_laplacian(|_, _| 0.0);
    let saddle = TestFunction::new("x^2-y^2", |x, y| x * x - y * y, 1.0).with_laplacian(|_, _| 0.0);
    let log = TestFunction::new("log(0.8/r)", |x, y| (0.8 / x.hypot(y)).ln(), 1.0).with_laplacian(|_, _| 0.0);
    let sq = TestFunction::new("|z|^2", |x, y| x * x + y * y, 1.0);
    let lin = TestFunction::new("x", |x, _| x, 1.0);
    let configs = [
        ("phi=1 f=x^2-y^2", &one, &saddle, 0.0, 0.7),
        ("phi=log(0.8/r) f=1", &log, &one, 0.5, 0.8),
        ("phi=|z|^2 f=x", &sq, &lin, 0.3, 0.6),
    ];
    for (name, phi, f, a, b) in configs {
        let res = green_riesz_residual(phi, f, a, b, p.tol)?;
        r.push_row(vec![
            name.into(),
            a.into(),
            b.into(),
            res.into(),
            0.0.into(),
            res.into(),
        ]);
        r.check("green-riesz", res < 1e-6, format!("{name}: residual {}", fmt_e(res)));
    }

    let agree = |b: f64, d: f64| (b - d).abs() <= 1e-6 * (1.0 + b.abs());
    let prof = WeightProfile::from_radii(0.5, 0.8, WeightKind::Phi)?;
    let sq_exact = TestFunction::new("|z|^2", |x, y| x * x + y * y, 1.0).with_laplacian(|_, _| 4.0);
    let b = weighted_laplacian_integral(&prof, &sq_exact, LaplacianMethod::Boundary, p.tol)?;
    let d = weighted_laplacian_integral(&prof, &sq_exact, LaplacianMethod::Direct, p.tol)?;
    let exact = 2.0 * PI * prof.a() * (0.64 - 0.25);
    r.push_row(vec![
        "|z|^2 boundary".into(),
        0.5.into(),
        0.8.into(),
        b.into(),
        exact.into(),
        (b - exact).abs().into(),
    ]);
    r.push_row(vec![
        "|z|^2 direct".into(),
        0.5.into(),
        0.8.into(),
        d.into(),
        exact.into(),
        (d - exact).abs().into(),
    ]);
    r.check(
        "weighted-analytic",
        agree(b, exact) && agree(d, exact),
        format!("boundary {b:.12}, direct {d:.12}, exact {exact:.12}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut cases = Vec::with_capacity(p.cases);
    for _ in 0..p.cases {
        use rand::Rng;
        let a = rng.random_range(0.2..0.6);
        let b = a + rng.random_range(0.1..0.35);
        cases.push((a, b, random_smooth(&mut rng)));
    }
    let values: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|(a, b, f)| {
            let prof = WeightProfile::from_radii(*a, *b, WeightKind::Phi)?;
            let bd = weighted_laplacian_integral(&prof, f, LaplacianMethod::Boundary, p.tol)?;
            let dr = weighted_laplacian_integral(&prof, f, LaplacianMethod::Direct, p.tol.max(1e-9))?;
            Ok((bd, dr))
        })
        .collect::<Result<_>>()?;
    let mut bad = Vec::new();
    for (i, ((a, b, _), (bd, dr))) in cases.iter().zip(&values).enumerate() {
        r.push_row(vec![
            format!("random {i}").into(),
            (*a).into(),
            (*b).into(),
            (*bd).into(),
            (*dr).into(),
            (bd - dr).abs().into(),
        ]);
        if !agree(*bd, *dr) {
            bad.push(i);
        }
    }
    r.check(
        "weighted-random",
        bad.is_empty(),
        format!("{} cases, disagreeing: {bad:?}", p.cases),
    );
    Ok(r)
}
