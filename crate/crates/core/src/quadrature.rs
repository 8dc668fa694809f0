//! Adaptive Gauss-Kronrod quadrature and the tolerance policy shared by the
//! force integrals.

#![allow(clippy::excessive_precision)]

use serde::{Deserialize, Serialize};

use crate::error::{domain, CasimirError, Result};

/// Tolerances and truncation policy for the `v` integrals and the Matsubara
/// sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Relative tolerance for every integral and for the Matsubara cutoff.
    pub rel_tol: f64,
    /// Hard cap on Matsubara terms before a convergence failure is reported.
    pub max_matsubara: usize,
    /// Bisection budget for a single adaptive integral.
    pub max_subdivisions: usize,
    /// Evaluate Matsubara terms on the rayon pool. The reduction order is
    /// fixed either way.
    pub parallel: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-9, max_matsubara: 100_000, max_subdivisions: 400, parallel: true }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Result<Self> {
        let spec = Self { rel_tol, ..Self::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-4) {
            return domain(format!("rel_tol must lie in (0, 1e-4], got {}", self.rel_tol));
        }
        if self.max_matsubara == 0 || self.max_subdivisions == 0 {
            return domain("quadrature budgets must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Nodes and weights of the 21-point Kronrod rule mapped onto `[a, b]`.
pub fn kronrod21_nodes(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (0..21).map(move |i| {
        if i == 10 {
            (center, WGK[10] * half)
        } else if i < 10 {
            (center - half * XGK[i], WGK[i] * half)
        } else {
            let j = 20 - i;
            (center + half * XGK[j], WGK[j] * half)
        }
    })
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

/// One 10-point Gauss / 21-point Kronrod pass with QUADPACK error scaling.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut resabs = (WGK[10] * fc).abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error, resabs }
}

/// Globally adaptive integration of `f` over the finite interval `[a, b]`.
///
/// Stops when the summed error estimate falls below
/// `max(abs_tol, rel_tol * |I|)` or the roundoff floor of the rule.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, abs_error: 0.0 });
    }
    let mut panels = vec![gk21(&f, a, b)];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let resabs: f64 = panels.iter().map(|p| p.resabs).sum();
        let tol = abs_tol.max(rel_tol * value.abs()).max(100.0 * f64::EPSILON * resabs);
        if !value.is_finite() {
            return Err(CasimirError::Convergence(format!("non-finite integrand on [{a}, {b}]")));
        }
        if error <= tol {
            return Ok(Integral { value, abs_error: error });
        }
        if panels.len() >= max_subdivisions {
            // Within two orders of magnitude of the request the result is still
            // usable; beyond that the integrand is not being resolved.
            if error <= 100.0 * tol {
                return Ok(Integral { value, abs_error: error });
            }
            return Err(CasimirError::Convergence(format!(
                "adaptive quadrature on [{a}, {b}] stalled at error {error:e} (target {tol:e})"
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty panel list");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(CasimirError::Convergence(format!("interval collapsed near {mid}")));
        }
        panels.push(gk21(&f, p.a, mid));
        panels.push(gk21(&f, mid, p.b));
    }
}

/// Integral of an exponentially decaying `f` over `[lower, inf)`.
///
/// The half line is cut into panels of doubling width starting at `lower`;
/// marching stops once a panel contributes less than `rel_tol / 100` of the
/// running total, which for `e^{-v}`-type envelopes places the effective
/// cutoff a few tens of units past `lower`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<Integral> {
    let mut total = 0.0f64;
    let mut error = 0.0;
    let mut offset = 0.0;
    let mut width = 1.0;
    for _ in 0..64 {
        let a = lower + offset;
        let b = lower + offset + width;
        let abs_tol = 0.25 * rel_tol * total.abs();
        let panel = integrate(&f, a, b, abs_tol, rel_tol, max_subdivisions)?;
        total += panel.value;
        error += panel.abs_error;
        offset += width;
        if offset >= 2.0 {
            width *= 2.0;
        }
        if offset >= 8.0 && panel.value.abs() <= 0.01 * rel_tol * total.abs() {
            return Ok(Integral { value: total, abs_error: error });
        }
    }
    Err(CasimirError::Convergence(format!("integrand does not decay beyond v = {lower}")))
}
