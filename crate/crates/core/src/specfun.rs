//! Real-order polylogarithm on `[0, 1)` and Riemann zeta values.
//!
//! `Li_s(x)` is evaluated in the variable `mu = -ln x`. Below the crossover
//! `x = e^{-1/2}` the defining series is summed directly; above it the
//! small-`mu` expansion
//!
//! ```text
//! Li_s(e^{-mu}) = Gamma(1-s) mu^{s-1} + sum_k zeta(s-k) (-mu)^k / k!
//! ```
//!
//! is used (with the usual logarithmic replacement of the `k = s-1` term when
//! `s` is a positive integer). Working in `mu` keeps the `x -> 1` behaviour
//! accurate when callers already know `-ln x` exactly, which the force
//! integrands always do.

use std::f64::consts::PI;
use std::sync::OnceLock;

use statrs::function::gamma::gamma;

use crate::error::{domain, Result};

/// ζ(3) (Apéry's constant).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// Crossover in `mu = -ln x` between the direct series and the expansion.
pub const CROSSOVER_MU: f64 = 0.5;

const SERIES_TERMS: usize = 640;
const EXPANSION_TERMS: usize = 34;
const BORWEIN_N: usize = 48;

pub fn zeta3() -> f64 {
    ZETA3
}

fn borwein_weights() -> &'static [f64] {
    static WEIGHTS: OnceLock<Vec<f64>> = OnceLock::new();
    WEIGHTS.get_or_init(|| {
        // d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), stored as (d_k - d_n) / d_n.
        let n = BORWEIN_N;
        let nf = n as f64;
        let mut term = 1.0 / nf;
        let mut partial = term;
        let mut d = Vec::with_capacity(n + 1);
        d.push(nf * partial);
        for i in 1..=n {
            let fi = i as f64;
            term *= (nf + fi - 1.0) * 4.0 * (nf - fi + 1.0) / ((2.0 * fi) * (2.0 * fi - 1.0));
            partial += term;
            d.push(nf * partial);
        }
        let dn = d[n];
        d.iter().take(n).map(|dk| (dk - dn) / dn).collect()
    })
}

/// Riemann zeta for real `s != 1`.
///
/// `s > 0` uses Borwein's accelerated alternating (eta) series, `s <= 0` the
/// functional equation.
pub fn zeta(s: f64) -> f64 {
    if s == 1.0 {
        return f64::INFINITY;
    }
    if s == 0.0 {
        return -0.5;
    }
    if s > 0.0 {
        if s > 60.0 {
            return 1.0 + 2f64.powf(-s) + 3f64.powf(-s);
        }
        let eta: f64 = -borwein_weights()
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * w * ((k + 1) as f64).powf(-s)
            })
            .sum::<f64>();
        return eta / (1.0 - 2f64.powf(1.0 - s));
    }
    if s.fract() == 0.0 && (s as i64) % 2 == 0 {
        return 0.0;
    }
    let reflected = zeta(1.0 - s);
    2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * gamma(1.0 - s) * reflected
}

#[derive(Debug, Clone)]
enum Expansion {
    NonInteger { gamma: f64, coeffs: Vec<f64> },
    PositiveInteger { pivot: usize, harmonic: f64, inv_factorial: f64, coeffs: Vec<f64> },
}

/// Polylogarithm of a fixed real order with its expansion coefficients
/// precomputed.
#[derive(Debug, Clone)]
pub struct Polylog {
    order: f64,
    inv_powers: Vec<f64>,
    expansion: Expansion,
}

impl Polylog {
    /// Builds the evaluator for order `s`. Any real `s` is accepted here; the
    /// public [`polylog`] entry point restricts the order to `s > -1`.
    pub fn new(order: f64) -> Self {
        let inv_powers = (1..=SERIES_TERMS).map(|n| (n as f64).powf(-order)).collect();
        let mut coeffs = Vec::with_capacity(EXPANSION_TERMS);
        let mut factorial = 1.0;
        for k in 0..EXPANSION_TERMS {
            if k > 0 {
                factorial *= k as f64;
            }
            coeffs.push(zeta(order - k as f64) / factorial);
        }
        let expansion = if order >= 1.0 && order.fract() == 0.0 {
            let pivot = order as usize - 1;
            let harmonic = (1..=pivot).map(|j| 1.0 / j as f64).sum();
            let inv_factorial = 1.0 / (1..=pivot).map(|j| j as f64).product::<f64>();
            coeffs[pivot] = 0.0;
            Expansion::PositiveInteger { pivot, harmonic, inv_factorial, coeffs }
        } else {
            Expansion::NonInteger { gamma: gamma(1.0 - order), coeffs }
        };
        Self { order, inv_powers, expansion }
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// `Li_s(x)` for `x` in `[0, 1]`; no domain checks.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.eval_mu(-x.ln())
    }

    /// `Li_s(e^{-mu})` for `mu >= 0`.
    pub fn eval_mu(&self, mu: f64) -> f64 {
        if mu == f64::INFINITY {
            0.0
        } else if mu >= CROSSOVER_MU {
            self.series(mu)
        } else if mu <= 0.0 {
            if self.order > 1.0 {
                zeta(self.order)
            } else {
                f64::INFINITY
            }
        } else {
            self.expansion(mu)
        }
    }

    /// Direct summation of `sum_n e^{-n mu} / n^s`.
    pub fn series(&self, mu: f64) -> f64 {
        let x = (-mu).exp();
        let peak = (-self.order / mu).max(0.0);
        let mut xn = 1.0;
        let mut sum = 0.0;
        for (i, p) in self.inv_powers.iter().enumerate() {
            xn *= x;
            let term = xn * p;
            sum += term;
            if term <= 0.25 * f64::EPSILON * sum && (i + 1) as f64 > peak {
                break;
            }
        }
        sum
    }

    /// Small-`mu` expansion; accurate for `mu` well inside `2 pi`.
    pub fn expansion(&self, mu: f64) -> f64 {
        let horner = |coeffs: &[f64]| coeffs.iter().rev().fold(0.0, |acc, c| acc * -mu + c);
        match &self.expansion {
            Expansion::NonInteger { gamma, coeffs } => gamma * mu.powf(self.order - 1.0) + horner(coeffs),
            Expansion::PositiveInteger { pivot, harmonic, inv_factorial, coeffs } => {
                let log_term = (-mu).powi(*pivot as i32) * inv_factorial * (harmonic - mu.ln());
                horner(coeffs) + log_term
            }
        }
    }
}

fn cached(order: f64) -> Option<&'static Polylog> {
    static HALF: OnceLock<Polylog> = OnceLock::new();
    static MINUS_HALF: OnceLock<Polylog> = OnceLock::new();
    static THREE_HALVES: OnceLock<Polylog> = OnceLock::new();
    static THREE: OnceLock<Polylog> = OnceLock::new();
    let cell = if order == 0.5 {
        &HALF
    } else if order == -0.5 {
        &MINUS_HALF
    } else if order == 1.5 {
        &THREE_HALVES
    } else if order == 3.0 {
        &THREE
    } else {
        return None;
    };
    Some(cell.get_or_init(|| Polylog::new(order)))
}

/// Shared evaluator for the orders the force kernels use repeatedly.
pub(crate) fn shared(order: f64) -> &'static Polylog {
    static EXTRA: OnceLock<Vec<Polylog>> = OnceLock::new();
    if let Some(p) = cached(order) {
        return p;
    }
    let extra = EXTRA.get_or_init(|| [-1.5, -2.5, -3.5, -4.5].into_iter().map(Polylog::new).collect());
    extra
        .iter()
        .find(|p| p.order() == order)
        .expect("polylog order without a shared evaluator")
}

/// `Li_s(x) = sum_{n>=1} x^n / n^s` for `s > -1` and `0 <= x < 1`.
///
/// `x = 1` is accepted for `s > 1`, where the series converges to `zeta(s)`.
pub fn polylog(s: f64, x: f64) -> Result<f64> {
    if !s.is_finite() || s <= -1.0 {
        return domain(format!("polylog order must satisfy s > -1, got {s}"));
    }
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return domain(format!("polylog argument must lie in [0, 1), got {x}"));
    }
    if x == 1.0 {
        if s > 1.0 {
            return Ok(zeta(s));
        }
        return domain(format!("polylog of order {s} diverges at x = 1"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(match cached(s) {
        Some(p) => p.eval(x),
        None => Polylog::new(s).eval(x),
    })
}
