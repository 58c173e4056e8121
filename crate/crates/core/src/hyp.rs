//! Poincaré half-plane and disk models.
//!
//! Both models carry the curvature `-1` metric: `(dx² + dy²)/y²` on the upper
//! half-plane and `4|dz|²/(1 - |z|²)²` on the unit disk. The two are joined by the
//! Cayley map `z ↦ (z - i)/(z + i)`, which sends `i` to the origin.
//!
//! Two radial parameters of the disk appear in this crate and must not be mixed:
//!
//! - the *geodesic radius* `r` of `D(R)`, i.e. the hyperbolic distance from `0`
//!   to `|z| = R`, with `R = tanh(r/2)`;
//! - the *log-radius* `ρ = ½ log((1 + R)/(1 - R)) = artanh R`, with `R = tanh ρ`,
//!   which parameterizes the weight profiles in [`crate::weights`]. The geodesic
//!   radius of `D(tanh ρ)` is `2ρ`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// A point `x + yi` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::domain(format!("half-plane point needs y > 0, got ({x}, {y})")));
        }
        Ok(Self { x, y })
    }

    /// The point `i`.
    pub const I: HalfPlanePoint = HalfPlanePoint { x: 0.0, y: 1.0 };

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// A point `u + vi` of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    u: f64,
    v: f64,
}

impl DiskPoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u * u + v * v < 1.0) {
            return Err(Error::domain(format!("disk point needs |z| < 1, got ({u}, {v})")));
        }
        Ok(Self { u, v })
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub const ORIGIN: DiskPoint = DiskPoint { u: 0.0, v: 0.0 };

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// Euclidean modulus `|z|`.
    pub fn modulus(&self) -> f64 {
        self.u.hypot(self.v)
    }

    pub fn arg(&self) -> f64 {
        self.v.atan2(self.u)
    }

    /// Rotation about the origin (a disk isometry).
    pub fn rotate(&self, angle: f64) -> DiskPoint {
        let (s, c) = angle.sin_cos();
        DiskPoint {
            u: c * self.u - s * self.v,
            v: s * self.u + c * self.v,
        }
    }
}

/// Geodesic polar coordinates about a base point: distance `radius >= 0` and
/// direction `angle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicPolar {
    pub radius: f64,
    pub angle: f64,
}

impl GeodesicPolar {
    /// Position in the disk model, base point at the origin.
    pub fn to_disk(&self) -> Result<DiskPoint> {
        DiskPoint::from_polar((self.radius / 2.0).tanh(), self.angle)
    }

    /// Position in the half-plane with base point `i`, angle measured from the
    /// upward vertical geodesic. Agrees with `cayley_inverse(self.to_disk())` but
    /// stays accurate when the point is far from `i`.
    pub fn to_half_plane(&self) -> HalfPlanePoint {
        let sin_a = self.angle.sin();
        let sh = self.radius.sinh();
        let half = (self.angle / 2.0).sin();
        // cosh r - sinh r cos a, rewritten without cancellation
        let den = (-self.radius).exp() + 2.0 * sh * half * half;
        let y = 1.0 / den;
        HalfPlanePoint { x: -sh * sin_a * y, y }
    }

    /// `log(Im z)` of [`Self::to_half_plane`], computed without forming `y`.
    pub fn log_height(&self) -> f64 {
        let sh = self.radius.sinh();
        let half = (self.angle / 2.0).sin();
        -((-self.radius).exp() + 2.0 * sh * half * half).ln()
    }
}

/// Hyperbolic distance in the half-plane.
pub fn hyp_dist(z1: HalfPlanePoint, z2: HalfPlanePoint) -> f64 {
    // arcosh(1 + d²/(2 y1 y2)) = 2 asinh(d / (2 sqrt(y1 y2)))
    let d = (z1.x - z2.x).hypot(z1.y - z2.y);
    2.0 * (d / (2.0 * (z1.y * z2.y).sqrt())).asinh()
}

/// Hyperbolic distance in the disk model.
pub fn disk_dist(w1: DiskPoint, w2: DiskPoint) -> f64 {
    // |w1 - w2| / |1 - conj(w1) w2|
    let num = (w1.u - w2.u).hypot(w1.v - w2.v);
    let re = 1.0 - (w1.u * w2.u + w1.v * w2.v);
    let im = -(w1.u * w2.v - w1.v * w2.u);
    2.0 * (num / re.hypot(im)).atanh()
}

/// Euclidean radius `R = tanh ρ` of the disk with log-radius `ρ`.
pub fn disk_radius_to_euclid(rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::domain(format!("log-radius must be >= 0, got {rho}")));
    }
    Ok(rho.tanh())
}

/// Log-radius `½ log((1 + R)/(1 - R))`.
pub fn euclid_to_disk_radius(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::domain(format!("Euclidean radius must lie in [0, 1), got {r}")));
    }
    Ok(r.atanh())
}

/// Euclidean radius of the disk whose geodesic radius is `r`.
pub fn geodesic_radius_to_euclid(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("geodesic radius must be >= 0, got {r}")));
    }
    Ok((r / 2.0).tanh())
}

/// The Cayley map from the half-plane to the disk, `i ↦ 0`.
pub fn cayley(z: HalfPlanePoint) -> DiskPoint {
    // (z - i)/(z + i) = (x² + y² - 1 - 2xi) / (x² + (y + 1)²)
    let den = z.x * z.x + (z.y + 1.0) * (z.y + 1.0);
    DiskPoint {
        u: (z.x * z.x + z.y * z.y - 1.0) / den,
        v: -2.0 * z.x / den,
    }
}

/// Inverse Cayley map `w ↦ i(1 + w)/(1 - w)`.
pub fn cayley_inverse(w: DiskPoint) -> HalfPlanePoint {
    let den = (1.0 - w.u) * (1.0 - w.u) + w.v * w.v;
    let one_minus_mod2 = (1.0 - w.modulus()) * (1.0 + w.modulus());
    HalfPlanePoint {
        x: -2.0 * w.v / den,
        y: one_minus_mod2 / den,
    }
}

/// Poincaré area of a disk of geodesic radius `rho`: `π(e^ρ + e^{-ρ} - 2)`.
pub fn disk_area(rho: f64) -> f64 {
    let s = (rho / 2.0).sinh();
    4.0 * PI * s * s
}

/// Circle in the half-plane: `x² + (y - center_y)² = radius²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCircle {
    pub center_y: f64,
    pub radius: f64,
}

impl BoundaryCircle {
    /// Point of the circle at Euclidean angle `theta` about its center.
    pub fn point(&self, theta: f64) -> Result<HalfPlanePoint> {
        HalfPlanePoint::new(self.radius * theta.cos(), self.center_y + self.radius * theta.sin())
    }
}

/// The boundary of the geodesic disk of radius `rho` about `e^ρ i`; it is tangent
/// to the horocycle `y = 1`.
pub fn disk_boundary_circle(rho: f64) -> Result<BoundaryCircle> {
    if !(rho >= 0.0) {
        return Err(Error::domain(format!("radius must be >= 0, got {rho}")));
    }
    let r = (2.0 * rho).exp();
    Ok(BoundaryCircle {
        center_y: (r + 1.0) / 2.0,
        radius: (2.0 * rho).exp_m1() / 2.0,
    })
}

/// A 2×2 real matrix of determinant one, standing for a point of the unit tangent
/// bundle `PSL(2, R)`. Equality is up to global sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitTangent {
    pub m: [[f64; 2]; 2],
}

impl UnitTangent {
    pub const IDENTITY: UnitTangent = UnitTangent {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Result<Self> {
        let u = Self {
            m: [[m11, m12], [m21, m22]],
        };
        if (u.det() - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("unit tangent needs det = 1, got {}", u.det())));
        }
        Ok(u)
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn mul(&self, other: &UnitTangent) -> UnitTangent {
        let a = &self.m;
        let b = &other.m;
        UnitTangent {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    /// Largest entrywise difference, minimized over the sign ambiguity.
    pub fn distance(&self, other: &UnitTangent) -> f64 {
        let diff = |sign: f64| {
            let mut d: f64 = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    d = d.max((self.m[i][j] - sign * other.m[i][j]).abs());
                }
            }
            d
        };
        diff(1.0).min(diff(-1.0))
    }

    /// The geodesic flow generator `diag(e^{t/2}, e^{-t/2})`.
    pub fn geodesic(t: f64) -> UnitTangent {
        UnitTangent {
            m: [[(t / 2.0).exp(), 0.0], [0.0, (-t / 2.0).exp()]],
        }
    }

    /// The stable horocycle generator, lower unipotent with entry `s`.
    pub fn horocycle(s: f64) -> UnitTangent {
        UnitTangent {
            m: [[1.0, 0.0], [s, 1.0]],
        }
    }
}

/// `u · g^t`.
pub fn geodesic_flow(t: f64, u: &UnitTangent) -> UnitTangent {
    u.mul(&UnitTangent::geodesic(t))
}

/// `u · h^s`.
pub fn horocycle_flow(s: f64, u: &UnitTangent) -> UnitTangent {
    u.mul(&UnitTangent::horocycle(s))
}

/// Residual of `g^t h^s g^{-t} = h^{s e^{-t}}` evaluated at `u`.
pub fn conjugation_residual(t: f64, s: f64, u: &UnitTangent) -> f64 {
    let lhs = geodesic_flow(-t, &horocycle_flow(s, &geodesic_flow(t, u)));
    let rhs = horocycle_flow(s * (-t).exp(), u);
    lhs.distance(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn hp(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hyp_dist(HalfPlanePoint::I, HalfPlanePoint::I), 0.0);
        assert_abs_diff_eq!(hyp_dist(HalfPlanePoint::I, hp(0.0, 2f64.exp())), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            hyp_dist(HalfPlanePoint::I, hp(1.0, 1.0)),
            1.5f64.acosh(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            hyp_dist(HalfPlanePoint::I, hp(1.0, 1.0)),
            0.962_423_650_119_206_9,
            epsilon = 1e-14
        );
    }

    #[test]
    fn distance_matches_line_element_quadrature() {
        // the geodesic from i to 1 + i is the arc of |z - 1/2|² = 5/4; integrate |dz|/y on it
        let rad = 1.25f64.sqrt();
        let a0 = (1.0f64).atan2(-0.5);
        let a1 = (1.0f64).atan2(0.5);
        let dom = crate::quad::Interval1D::new(a1, a0, 1e-13).unwrap();
        let len = crate::quad::integrate_1d(|a: f64| rad / (rad * a.sin()), &dom).unwrap();
        assert_abs_diff_eq!(len, hyp_dist(HalfPlanePoint::I, hp(1.0, 1.0)), epsilon = 1e-11);
    }

    #[test]
    fn radius_conversions() {
        assert_eq!(disk_radius_to_euclid(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(euclid_to_disk_radius(1f64.tanh()).unwrap(), 1.0, epsilon = 1e-14);
        let r = disk_radius_to_euclid(3.7).unwrap();
        assert_abs_diff_eq!(euclid_to_disk_radius(r).unwrap(), 3.7, epsilon = 1e-12);
        let half_log = |r: f64| 0.5 * ((1.0 + r) / (1.0 - r)).ln();
        assert_abs_diff_eq!(half_log(r), 3.7, epsilon = 1e-12);
        assert!(matches!(euclid_to_disk_radius(1.0), Err(Error::Domain(_))));
        assert!(matches!(euclid_to_disk_radius(1.5), Err(Error::Domain(_))));
        assert!(disk_radius_to_euclid(-1.0).is_err());
    }

    #[test]
    fn cayley_normalization_and_inverse() {
        let w = cayley(HalfPlanePoint::I);
        assert_eq!((w.u(), w.v()), (0.0, 0.0));
        let z = hp(-0.3, 2.5);
        let back = cayley_inverse(cayley(z));
        assert_abs_diff_eq!(back.x(), z.x(), epsilon = 1e-12);
        assert_abs_diff_eq!(back.y(), z.y(), epsilon = 1e-12);
    }

    #[test]
    fn cayley_distance_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let z = hp(rng.random_range(-3.0..3.0), rng.random_range(0.05..4.0));
            let d_half = hyp_dist(HalfPlanePoint::I, z);
            let d_disk = disk_dist(DiskPoint::ORIGIN, cayley(z));
            assert_abs_diff_eq!(d_half, d_disk, epsilon = 1e-10);
        }
    }

    #[test]
    fn area_examples() {
        assert_eq!(disk_area(0.0), 0.0);
        let e = 1f64.exp();
        assert_abs_diff_eq!(disk_area(1.0), PI * (e + 1.0 / e - 2.0), epsilon = 1e-13);
        assert_abs_diff_eq!(disk_area(1.0), 3.412_276_3, epsilon = 1e-7);
        assert_abs_diff_eq!(disk_area(2.0), 17.355_387, epsilon = 1e-6);
        let rho = 20.0;
        assert_abs_diff_eq!(disk_area(rho) / (PI * f64::exp(rho)), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn boundary_circle() {
        let c0 = disk_boundary_circle(0.0).unwrap();
        assert_eq!((c0.center_y, c0.radius), (1.0, 0.0));
        let c1 = disk_boundary_circle(1.0).unwrap();
        assert_abs_diff_eq!(c1.center_y - c1.radius, 1.0, epsilon = 1e-14);
        let rho = 1.5;
        let c = disk_boundary_circle(rho).unwrap();
        let center = hp(0.0, rho.exp());
        for k in 0..50 {
            let p = c.point(2.0 * PI * (k as f64 + 0.5) / 50.0).unwrap();
            assert_abs_diff_eq!(hyp_dist(center, p), rho, epsilon = 1e-10);
        }
    }

    #[test]
    fn geodesic_polar_half_plane_matches_cayley() {
        for &(r, a) in &[(0.3, 0.2), (2.0, 2.5), (5.0, -1.0), (1.0, 0.0)] {
            let g = GeodesicPolar { radius: r, angle: a };
            let z1 = g.to_half_plane();
            let z2 = cayley_inverse(g.to_disk().unwrap());
            assert_abs_diff_eq!(z1.x(), z2.x(), epsilon = 1e-9 * (1.0 + z1.x().abs()));
            assert_abs_diff_eq!(z1.y(), z2.y(), epsilon = 1e-9 * z1.y());
            assert_abs_diff_eq!(hyp_dist(HalfPlanePoint::I, z1), r, epsilon = 1e-10);
            assert_abs_diff_eq!(g.log_height(), z1.y().ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn flow_examples() {
        let u = UnitTangent::new(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(horocycle_flow(0.0, &u), u);
        let lhs = UnitTangent::geodesic(1.0)
            .mul(&UnitTangent::horocycle(1.0))
            .mul(&UnitTangent::geodesic(-1.0));
        assert!(lhs.distance(&UnitTangent::horocycle((-1f64).exp())) < 1e-12);
        let p = UnitTangent::geodesic(0.5).mul(&UnitTangent::horocycle(2.0));
        let expected = [[0.25f64.exp(), 0.0], [2.0 * (-0.25f64).exp(), (-0.25f64).exp()]];
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(p.m[i][j], expected[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn unit_tangent_rejects_bad_det() {
        assert!(UnitTangent::new(1.0, 1.0, 1.0, 1.0).is_err());
        let u = UnitTangent::new(-1.0, 0.0, 0.0, -1.0).unwrap();
        assert_eq!(u.distance(&UnitTangent::IDENTITY), 0.0);
    }

    proptest! {
        #[test]
        fn dist_symmetric_and_triangle(
            x1 in -5.0..5.0f64, y1 in 0.01..5.0f64,
            x2 in -5.0..5.0f64, y2 in 0.01..5.0f64,
            x3 in -5.0..5.0f64, y3 in 0.01..5.0f64,
        ) {
            let (a, b, c) = (hp(x1, y1), hp(x2, y2), hp(x3, y3));
            prop_assert!((hyp_dist(a, b) - hyp_dist(b, a)).abs() < 1e-12);
            prop_assert!(hyp_dist(a, c) <= hyp_dist(a, b) + hyp_dist(b, c) + 1e-12);
            prop_assert!(hyp_dist(a, b) >= 0.0);
        }

        #[test]
        fn dist_invariant_under_affine_action(
            x1 in -5.0..5.0f64, y1 in 0.01..5.0f64,
            x2 in -5.0..5.0f64, y2 in 0.01..5.0f64,
            t in -3.0..3.0f64, x0 in -10.0..10.0f64,
        ) {
            let act = |z: HalfPlanePoint| hp(t.exp() * z.x() + x0, t.exp() * z.y());
            let (a, b) = (hp(x1, y1), hp(x2, y2));
            let d = hyp_dist(a, b);
            prop_assert!((hyp_dist(act(a), act(b)) - d).abs() < 1e-12 * (1.0 + d));
        }

        #[test]
        fn flows_keep_det_and_group_laws(t1 in -4.0..4.0f64, t2 in -4.0..4.0f64, s1 in -4.0..4.0f64, s2 in -4.0..4.0f64) {
            let u = UnitTangent::new(2.0, 1.0, 1.0, 1.0).unwrap();
            prop_assert!((geodesic_flow(t1, &u).det() - 1.0).abs() < 1e-12);
            let g = geodesic_flow(t2, &geodesic_flow(t1, &UnitTangent::IDENTITY));
            prop_assert!(g.distance(&UnitTangent::geodesic(t1 + t2)) < 1e-12 * g.m[0][0].max(g.m[1][1]));
            let h = horocycle_flow(s2, &horocycle_flow(s1, &UnitTangent::IDENTITY));
            prop_assert!(h.distance(&UnitTangent::horocycle(s1 + s2)) < 1e-12);
            prop_assert!(conjugation_residual(t1, s1, &u) < 1e-12 * (1.0 + s1.abs()) * 20.0);
        }
    }
}
