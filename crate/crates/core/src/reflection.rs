//! TM/TE reflection coefficients on the imaginary frequency axis in the
//! dimensionless variables `v = 2 q a` and `zeta = xi / omega_c`.

use serde::{Deserialize, Serialize};

use crate::dielectric::ZeroFreqBehavior;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessPoint {
    pub v: f64,
    pub zeta: f64,
}

impl DimensionlessPoint {
    pub fn new(v: f64, zeta: f64) -> Result<Self> {
        if !(zeta >= 0.0) || !(v >= zeta) || !v.is_finite() {
            return domain(format!("need v >= zeta >= 0, got v={v}, zeta={zeta}"));
        }
        Ok(Self { v, zeta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionPair {
    pub r_tm: f64,
    pub r_te: f64,
}

/// `ln r^2` for both polarizations; `-inf` marks a vanishing coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogReflection {
    pub tm: f64,
    pub te: f64,
}

impl LogReflection {
    pub(crate) const IDEAL: LogReflection = LogReflection { tm: 0.0, te: 0.0 };
}

// With chi = eps - 1 and s = sqrt(v^2 + chi zeta^2):
//   eps v - s = chi ((eps + 1) v^2 - zeta^2) / (eps v + s)
//   v - s     = -chi zeta^2 / (v + s)
// so neither coefficient is formed as a difference of nearly equal numbers.
fn root(v: f64, zeta: f64, chi: f64) -> f64 {
    (v * v + chi * zeta * zeta).sqrt()
}

pub(crate) fn fresnel_from_susceptibility(v: f64, zeta: f64, chi: f64) -> ReflectionPair {
    let s = root(v, zeta, chi);
    let eps = 1.0 + chi;
    let tm_den = eps * v + s;
    let r_tm = chi * ((eps + 1.0) * v * v - zeta * zeta) / (tm_den * tm_den);
    let te_den = v + s;
    let r_te = -chi * zeta * zeta / (te_den * te_den);
    ReflectionPair { r_tm, r_te }
}

/// `ln r^2` from the complements `1 - r_tm = 2s/(eps v + s)` and
/// `1 - |r_te| = 2v/(v + s)`, which stay accurate as `|r| -> 1`.
pub(crate) fn log_sq_from_susceptibility(v: f64, zeta: f64, chi: f64) -> LogReflection {
    let s = root(v, zeta, chi);
    let eps = 1.0 + chi;
    let tm = 2.0 * (-2.0 * s / (eps * v + s)).ln_1p();
    let te = 2.0 * (-2.0 * v / (v + s)).ln_1p();
    LogReflection { tm, te }
}

/// Reflection coefficients for `eps_l = eps(i xi_l) >= 1`.
pub fn fresnel(point: DimensionlessPoint, eps_l: f64) -> Result<ReflectionPair> {
    if !(eps_l >= 1.0) {
        return domain(format!("permittivity on the imaginary axis must be >= 1, got {eps_l}"));
    }
    Ok(fresnel_from_susceptibility(point.v, point.zeta, eps_l - 1.0))
}

/// Zero-frequency (`l = 0`) coefficients for the given behaviour.
pub fn zero_frequency_pair(behavior: ZeroFreqBehavior, v: f64) -> ReflectionPair {
    match behavior {
        ZeroFreqBehavior::IdealMetal => ReflectionPair { r_tm: 1.0, r_te: -1.0 },
        ZeroFreqBehavior::DrudeLike => ReflectionPair { r_tm: 1.0, r_te: 0.0 },
        ZeroFreqBehavior::Dielectric { r0 } => ReflectionPair { r_tm: r0, r_te: 0.0 },
        ZeroFreqBehavior::PlasmaLike { alpha, .. } => {
            let av = alpha * v;
            let d = av - (av * av + 1.0).sqrt();
            ReflectionPair { r_tm: 1.0, r_te: -d * d }
        }
    }
}

pub(crate) fn log_sq_zero_frequency(behavior: ZeroFreqBehavior, v: f64) -> LogReflection {
    match behavior {
        ZeroFreqBehavior::IdealMetal => LogReflection::IDEAL,
        ZeroFreqBehavior::DrudeLike => LogReflection { tm: 0.0, te: f64::NEG_INFINITY },
        ZeroFreqBehavior::Dielectric { r0 } => LogReflection { tm: 2.0 * r0.abs().ln(), te: f64::NEG_INFINITY },
        // |r_te| = (sqrt(a^2 v^2 + 1) - a v)^2 = exp(-2 asinh(a v))
        ZeroFreqBehavior::PlasmaLike { alpha, .. } => LogReflection { tm: 0.0, te: -4.0 * (alpha * v).asinh() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: f64, zeta: f64) -> DimensionlessPoint {
        DimensionlessPoint::new(v, zeta).unwrap()
    }

    #[test]
    fn static_limit_reproduces_r0() {
        let r = fresnel(pt(1.7, 0.0), 3.0).unwrap();
        assert!((r.r_tm - 0.5).abs() < 1e-15);
        assert_eq!(r.r_te, 0.0);
    }

    #[test]
    fn ideal_metal_limit() {
        let r = fresnel(pt(2.0, 1.0), 1e12).unwrap();
        assert!((r.r_tm - 1.0).abs() < 1e-5);
        assert!((r.r_te + 1.0).abs() < 1e-5);
    }

    #[test]
    fn grazing_edge_hand_value() {
        let r = fresnel(pt(0.8, 0.8), 2.0).unwrap();
        let s2 = 2f64.sqrt();
        assert!((r.r_tm - (2.0 - s2) / (2.0 + s2)).abs() < 1e-15);
        assert!((r.r_te - (1.0 - s2) / (1.0 + s2)).abs() < 1e-15);
    }

    #[test]
    fn naive_and_stable_forms_agree() {
        for &(v, zeta, eps) in &[(1.0f64, 0.5f64, 3.0f64), (5.0, 0.1, 1e4), (0.3, 0.3, 1.0001), (2.0, 1.9, 50.0)] {
            let s = (v * v + (eps - 1.0) * zeta * zeta).sqrt();
            let naive_tm = (eps * v - s) / (eps * v + s);
            let naive_te = (v - s) / (v + s);
            let r = fresnel(pt(v, zeta), eps).unwrap();
            assert!((r.r_tm - naive_tm).abs() < 1e-12);
            assert!((r.r_te - naive_te).abs() < 1e-12);
            let l = log_sq_from_susceptibility(v, zeta, eps - 1.0);
            assert!((l.tm - (r.r_tm * r.r_tm).ln()).abs() < 1e-10);
            assert!((l.te - (r.r_te * r.r_te).ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_sub_unity_permittivity() {
        assert!(fresnel(pt(1.0, 0.5), 0.9).is_err());
        assert!(DimensionlessPoint::new(0.5, 1.0).is_err());
    }

    #[test]
    fn static_path_matches_zero_frequency_path() {
        for i in 1..50 {
            let v = 0.1 * i as f64;
            let a = fresnel(pt(v, 0.0), 3.0).unwrap();
            let b = zero_frequency_pair(ZeroFreqBehavior::Dielectric { r0: 0.5 }, v);
            assert!((a.r_tm - b.r_tm).abs() < 1e-14 && (a.r_te - b.r_te).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_frequency_tags() {
        assert_eq!(zero_frequency_pair(ZeroFreqBehavior::IdealMetal, 2.0), ReflectionPair { r_tm: 1.0, r_te: -1.0 });
        for v in [0.01, 1.0, 40.0] {
            assert_eq!(zero_frequency_pair(ZeroFreqBehavior::DrudeLike, v), ReflectionPair { r_tm: 1.0, r_te: 0.0 });
        }
        let plasma = |alpha| ZeroFreqBehavior::PlasmaLike { alpha, skin_depth: 0.0 };
        assert!((zero_frequency_pair(plasma(0.01), 1e-12).r_te + 1.0).abs() < 1e-12);
        let r = zero_frequency_pair(plasma(0.5), 2.0).r_te;
        assert!((r + (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((r + 0.171_572_875).abs() < 1e-9);
    }

    #[test]
    fn plasma_te_expansion_to_second_order() {
        let alpha = 1e-4;
        let b = ZeroFreqBehavior::PlasmaLike { alpha, skin_depth: 0.0 };
        for n in [1.0f64, 2.0, 5.0] {
            for v in [0.5, 1.0, 3.0, 10.0] {
                let r = zero_frequency_pair(b, v).r_te;
                let exact = r.powf(2.0 * n);
                let approx = 1.0 - 4.0 * n * v * alpha + 8.0 * n * n * v * v * alpha * alpha;
                let x = n * v * alpha;
                assert!((exact - approx).abs() < 20.0 * x * x * x + 1e-15, "n={n} v={v}");
            }
        }
    }

    #[test]
    fn plasma_te_monotone_in_alpha_v() {
        let b = |alpha| ZeroFreqBehavior::PlasmaLike { alpha, skin_depth: 0.0 };
        let mut prev = -1.0;
        for i in 1..200 {
            let r = zero_frequency_pair(b(0.05 * i as f64), 1.0).r_te;
            assert!(r > prev && r < 0.0);
            prev = r;
        }
        let log = log_sq_zero_frequency(b(0.3), 2.0).te;
        let r = zero_frequency_pair(b(0.3), 2.0).r_te;
        assert!((log - (r * r).ln()).abs() < 1e-13);
    }

    proptest::proptest! {
        #[test]
        fn coefficients_bounded_with_fixed_signs(v in 1e-3f64..50.0, frac in 0.0f64..1.0, chi in 0.0f64..1e7) {
            let zeta = v * frac;
            let r = fresnel_from_susceptibility(v, zeta, chi);
            proptest::prop_assert!(r.r_tm >= 0.0 && r.r_tm <= 1.0);
            proptest::prop_assert!(r.r_te <= 0.0 && r.r_te >= -1.0);
        }
    }
}
