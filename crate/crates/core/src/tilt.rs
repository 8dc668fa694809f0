//! Cylinder axis tilted by a small angle in the plane normal to the plate.

use serde::{Deserialize, Serialize};

use crate::dielectric::PermittivityModel;
use crate::error::{domain, Result};
use crate::lifshitz::{cylinder_force, cylinder_force_gradient, evaluate, ForceResult, Geometry, Kernel, ThermalState};
use crate::quadrature::QuadratureSpec;

/// Tilt angle `theta` (rad). The dimensionless tilt `A = theta L / (2a)`
/// follows from the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltParams {
    pub theta: f64,
}

impl TiltParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta >= 0.0) || !theta.is_finite() {
            return domain(format!("tilt angle must be finite and >= 0, got {theta}"));
        }
        Ok(Self { theta })
    }

    /// The angle that gives tilt parameter `a_theta` at this geometry.
    pub fn from_a_theta(a_theta: f64, geom: &Geometry) -> Result<Self> {
        check_a_theta(a_theta)?;
        Self::new(2.0 * geom.a * a_theta / geom.length)
    }

    pub fn a_theta(&self, geom: &Geometry) -> f64 {
        self.theta * geom.length / (2.0 * geom.a)
    }

    fn checked_a_theta(&self, geom: &Geometry) -> Result<f64> {
        let a = self.a_theta(geom);
        check_a_theta(a)?;
        Ok(a)
    }
}

fn check_a_theta(a_theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&a_theta) {
        return domain(format!("A_theta must lie in [0, 1), got {a_theta}: the cylinder end would reach the plate"));
    }
    Ok(())
}

const KAPPA_SERIES_BELOW: f64 = 1e-3;

/// Multiplicative tilt factor `[(1-A)^{-5/2} - (1+A)^{-5/2}] / (5A)`.
pub fn kappa(a_theta: f64) -> Result<f64> {
    check_a_theta(a_theta)?;
    let a = a_theta;
    if a < KAPPA_SERIES_BELOW {
        let a2 = a * a;
        return Ok(1.0 + a2 * (21.0 / 8.0 + a2 * 3003.0 / 640.0));
    }
    Ok(((1.0 - a).powf(-2.5) - (1.0 + a).powf(-2.5)) / (5.0 * a))
}

/// Gradient counterpart of [`kappa`] for the ideal metal at zero temperature:
/// `[(1-A)^{-7/2} - (1+A)^{-7/2}] / (7A)`.
pub fn kappa_gradient(a_theta: f64) -> Result<f64> {
    check_a_theta(a_theta)?;
    let a = a_theta;
    if a < KAPPA_SERIES_BELOW {
        let a2 = a * a;
        return Ok(1.0 + a2 * (33.0 / 8.0 + a2 * 1287.0 / 128.0));
    }
    Ok(((1.0 - a).powf(-3.5) - (1.0 + a).powf(-3.5)) / (7.0 * a))
}

pub fn tilted_force(
    geom: &Geometry,
    thermal: ThermalState,
    model: &PermittivityModel,
    tilt: TiltParams,
    quad: &QuadratureSpec,
) -> Result<ForceResult> {
    let a_theta = tilt.checked_a_theta(geom)?;
    if a_theta == 0.0 {
        return cylinder_force(geom, thermal, model, quad);
    }
    evaluate(geom, thermal, model, Kernel::TiltedForce(a_theta), quad)
}

/// `dF/da` at fixed tilt angle.
pub fn tilted_gradient(
    geom: &Geometry,
    thermal: ThermalState,
    model: &PermittivityModel,
    tilt: TiltParams,
    quad: &QuadratureSpec,
) -> Result<ForceResult> {
    let a_theta = tilt.checked_a_theta(geom)?;
    if a_theta == 0.0 {
        return cylinder_force_gradient(geom, thermal, model, quad);
    }
    evaluate(geom, thermal, model, Kernel::TiltedGradient(a_theta), quad)
}

/// Ratio of the tilted to the parallel force for the same model.
pub fn kappa_nm(
    geom: &Geometry,
    thermal: ThermalState,
    model: &PermittivityModel,
    tilt: TiltParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if tilt.checked_a_theta(geom)? == 0.0 {
        return Ok(1.0);
    }
    let tilted = tilted_force(geom, thermal, model, tilt, quad)?;
    let parallel = cylinder_force(geom, thermal, model, quad)?;
    Ok(tilted.value / parallel.value)
}

/// `kappa(A) F(a, T)`
pub fn multiplicative_force(
    geom: &Geometry,
    thermal: ThermalState,
    model: &PermittivityModel,
    tilt: TiltParams,
    quad: &QuadratureSpec,
) -> Result<ForceResult> {
    let k = kappa(tilt.checked_a_theta(geom)?)?;
    Ok(cylinder_force(geom, thermal, model, quad)?.scaled(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dielectric::DrudeParams;
    use crate::lifshitz::{ideal_metal_force, ideal_metal_gradient, sinh_ratio_sum};
    use crate::specfun::polylog;

    const NM: f64 = 1e-9;
    const UM: f64 = 1e-6;

    fn geom(a: f64) -> Geometry {
        Geometry::new(a, 100.0 * UM, 100.0 * UM).unwrap()
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x / y - 1.0).abs()
    }

    fn drude() -> PermittivityModel {
        PermittivityModel::Drude(DrudeParams::gold())
    }

    // sum_n e^{-n mu} n^{-base} sinh(A n v)/(A n v), term by term with
    // e^{-n mu} sinh(h n)/(h n) = e^{-n(mu-h)} (1 - e^{-2hn}) / (2hn).
    fn direct_sum(base: f64, a: f64, v: f64, mu: f64) -> f64 {
        let h = a * v;
        let (mut sum, mut c) = (0.0f64, 0.0f64);
        for n in 1..200_000 {
            let nf = n as f64;
            let t = (-nf * (mu - h)).exp() * (-(-2.0 * h * nf).exp_m1()) / (2.0 * h * nf) * nf.powf(-base);
            let y = t - c;
            let s = sum + y;
            c = (s - sum) - y;
            sum = s;
            if t < 1e-18 * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn kernel_matches_direct_n_sum() {
        for &base in &[0.5, -0.5] {
            for &a in &[1e-4, 5e-4, 0.01, 0.1, 0.5, 0.9] {
                for &(v, shift) in &[(0.3, 0.0), (1.0, 0.2), (4.0, 0.0), (12.0, 1.5), (30.0, 0.0)] {
                    let mu = v + shift;
                    let k = sinh_ratio_sum(base, a, v, mu);
                    let d = direct_sum(base, a, v, mu);
                    assert!(rel(k, d) < 1e-9, "base={base} A={a} v={v}: {k} vs {d}");
                }
            }
        }
    }

    #[test]
    fn stable_factor_equals_naive_sinh() {
        for &(a, v, n) in &[(0.1f64, 2.0f64, 3.0f64), (0.5, 10.0, 7.0), (0.9, 1.0, 40.0), (1e-6, 3.0, 2.0)] {
            let h = a * v * n;
            let naive = (-n * v).exp() * h.sinh() / h;
            let stable = (-n * v * (1.0 - a)).exp() * (-(-2.0 * h).exp_m1()) / (2.0 * h);
            assert!(rel(stable, naive) < 1e-12);
        }
    }

    #[test]
    fn kappa_closed_form_and_series() {
        assert_eq!(kappa(0.0).unwrap(), 1.0);
        for (a, k) in [(0.01, 1.00026), (0.05, 1.0066), (0.1, 1.0267), (0.5, 2.1176)] {
            assert!((kappa(a).unwrap() - k).abs() < 5e-5 * k.max(1.0));
        }
        let below = kappa(KAPPA_SERIES_BELOW * (1.0 - 1e-12)).unwrap();
        let above = kappa(KAPPA_SERIES_BELOW).unwrap();
        assert!((below - above).abs() < 1e-12);
        let below = kappa_gradient(KAPPA_SERIES_BELOW * (1.0 - 1e-12)).unwrap();
        let above = kappa_gradient(KAPPA_SERIES_BELOW).unwrap();
        assert!((below - above).abs() < 1e-12);
        assert!(kappa(1.0).is_err());
        assert!(kappa(-0.1).is_err());
    }

    #[test]
    fn ideal_metal_zero_temperature_is_multiplicative() {
        let q = QuadratureSpec::default();
        let g = geom(200.0 * NM);
        let m = PermittivityModel::IdealMetal;
        for a_theta in [0.1, 0.5] {
            let t = TiltParams::from_a_theta(a_theta, &g).unwrap();
            let f = tilted_force(&g, ThermalState::zero(), &m, t, &q).unwrap();
            assert!(rel(f.value, kappa(a_theta).unwrap() * ideal_metal_force(&g)) < 1e-8);
            let mf = multiplicative_force(&g, ThermalState::zero(), &m, t, &q).unwrap();
            assert!(rel(f.value, mf.value) < 1e-8);
            let d = tilted_gradient(&g, ThermalState::zero(), &m, t, &q).unwrap();
            assert!(rel(d.value, kappa_gradient(a_theta).unwrap() * ideal_metal_gradient(&g)) < 1e-8);
        }
    }

    #[test]
    fn tilted_gradient_is_derivative_at_fixed_angle() {
        let q = QuadratureSpec::with_rel_tol(1e-12).unwrap();
        let g = geom(300.0 * NM);
        let t = TiltParams::from_a_theta(0.3, &g).unwrap();
        let m = PermittivityModel::IdealMetal;
        let h = g.a * 1e-4;
        let fp = tilted_force(&g.with_separation(g.a + h).unwrap(), ThermalState::zero(), &m, t, &q).unwrap().value;
        let fm = tilted_force(&g.with_separation(g.a - h).unwrap(), ThermalState::zero(), &m, t, &q).unwrap().value;
        let d = tilted_gradient(&g, ThermalState::zero(), &m, t, &q).unwrap().value;
        assert!(rel((fp - fm) / (2.0 * h), d) < 1e-5);
    }

    #[test]
    fn zero_angle_reduces_to_parallel() {
        let q = QuadratureSpec::default();
        let g = geom(150.0 * NM);
        let t = TiltParams::new(0.0).unwrap();
        let th = ThermalState::room();
        let a = tilted_force(&g, th, &drude(), t, &q).unwrap();
        let b = cylinder_force(&g, th, &drude(), &q).unwrap();
        assert!(rel(a.value, b.value) < 1e-12);
        let a = tilted_gradient(&g, th, &drude(), t, &q).unwrap();
        let b = cylinder_force_gradient(&g, th, &drude(), &q).unwrap();
        assert!(rel(a.value, b.value) < 1e-12);
        assert_eq!(kappa_nm(&g, th, &drude(), t, &q).unwrap(), 1.0);
        let m = multiplicative_force(&g, th, &drude(), t, &q).unwrap();
        assert_eq!(m.value, cylinder_force(&g, th, &drude(), &q).unwrap().value);
    }

    #[test]
    fn tiny_tilt_is_continuous_with_parallel() {
        let q = QuadratureSpec::default();
        let g = geom(150.0 * NM);
        let th = ThermalState::room();
        let base = cylinder_force(&g, th, &drude(), &q).unwrap().value;
        let t = TiltParams::from_a_theta(1e-5, &g).unwrap();
        let f = tilted_force(&g, th, &drude(), t, &q).unwrap().value;
        assert!(rel(f, base) < 1e-8);
    }

    #[test]
    fn rejects_large_tilt() {
        let g = geom(100.0 * NM);
        let t = TiltParams::new(2.0 * g.a / g.length).unwrap();
        let q = QuadratureSpec::default();
        assert!(tilted_force(&g, ThermalState::room(), &drude(), t, &q).is_err());
        assert!(TiltParams::new(-1.0).is_err());
    }

    #[test]
    fn bracketed_by_one_and_kappa() {
        let q = QuadratureSpec::default();
        let g = geom(200.0 * NM);
        let mut prev = 1.0;
        for a_theta in [0.01, 0.05, 0.1, 0.5] {
            let t = TiltParams::from_a_theta(a_theta, &g).unwrap();
            let k = kappa_nm(&g, ThermalState::room(), &drude(), t, &q).unwrap();
            assert!(k > prev && k <= kappa(a_theta).unwrap());
            prev = k;
        }
    }

    #[test]
    fn polylog_difference_identity() {
        // sum_n x^n n^{-1/2} sinh(h n)/(h n) with mu = 1, h = 0.25
        let lhs = sinh_ratio_sum(0.5, 0.25, 1.0, 1.0);
        let rhs = (polylog(1.5, (-0.75f64).exp()).unwrap() - polylog(1.5, (-1.25f64).exp()).unwrap()) / 0.5;
        assert!(rel(lhs, rhs) < 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn kappa_increasing(a in 0.0f64..0.98, da in 1e-4f64..0.01) {
            proptest::prop_assert!(kappa(a + da).unwrap() > kappa(a).unwrap());
            proptest::prop_assert!(kappa(a).unwrap() >= 1.0);
        }
    }
}
