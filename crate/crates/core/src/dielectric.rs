//! Dielectric permittivity on the imaginary frequency axis, `eps(i xi)`.
//!
//! Frequencies and model parameters are photon energies in eV.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::HBAR_C_EV_M;
use crate::error::{domain, CasimirError, Result};
use crate::quadrature::{integrate, kronrod21_nodes};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrudeParams {
    pub omega_p: f64,
    pub gamma: f64,
}

impl DrudeParams {
    pub fn new(omega_p: f64, gamma: f64) -> Result<Self> {
        if !(omega_p > 0.0 && omega_p.is_finite()) || !(gamma > 0.0 && gamma.is_finite()) {
            return domain(format!("Drude parameters must be positive (omega_p={omega_p}, gamma={gamma})"));
        }
        Ok(Self { omega_p, gamma })
    }

    /// Au: omega_p = 9.0 eV, gamma = 0.035 eV.
    pub fn gold() -> Self {
        Self { omega_p: 9.0, gamma: 0.035 }
    }

    /// `Im eps(omega)` of the Drude form on the real axis.
    pub fn im_eps(&self, omega: f64) -> f64 {
        let wp2 = self.omega_p * self.omega_p;
        wp2 * self.gamma / (omega * (omega * omega + self.gamma * self.gamma))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillator {
    /// g_j, eV^2
    pub strength: f64,
    /// omega_j, eV
    pub frequency: f64,
    /// gamma_j, eV
    pub width: f64,
}

/// Plasma term plus core-electron oscillators. An empty oscillator list is the
/// simple plasma model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSet {
    pub omega_p: f64,
    pub oscillators: Vec<Oscillator>,
}

impl OscillatorSet {
    pub fn new(omega_p: f64, oscillators: Vec<Oscillator>) -> Result<Self> {
        if !(omega_p > 0.0 && omega_p.is_finite()) {
            return domain(format!("plasma frequency must be positive, got {omega_p}"));
        }
        for (j, osc) in oscillators.iter().enumerate() {
            if !(osc.frequency > 0.0) || osc.width < 0.0 || !osc.strength.is_finite() {
                return domain(format!("oscillator {j} invalid: need omega_j > 0 and gamma_j >= 0"));
            }
        }
        Ok(Self { omega_p, oscillators })
    }

    pub fn simple_plasma(omega_p: f64) -> Result<Self> {
        Self::new(omega_p, Vec::new())
    }

    /// Skin depth `c / omega_p` in metres.
    pub fn skin_depth(&self) -> f64 {
        HBAR_C_EV_M / self.omega_p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticDielectric {
    pub eps0: f64,
}

impl StaticDielectric {
    pub fn new(eps0: f64) -> Result<Self> {
        if !(eps0 > 1.0 && eps0.is_finite()) {
            return domain(format!("static permittivity must exceed 1, got {eps0}"));
        }
        Ok(Self { eps0 })
    }

    /// `r_0 = (eps0 - 1) / (eps0 + 1)`
    pub fn r0(&self) -> f64 {
        (self.eps0 - 1.0) / (self.eps0 + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalRow {
    pub omega: f64,
    pub im_eps: f64,
}

/// Tabulated `Im eps(omega)` with strictly ascending photon energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalTable {
    rows: Vec<OpticalRow>,
}

impl OpticalTable {
    pub fn new(rows: Vec<OpticalRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(CasimirError::MalformedTable { line: 0, reason: "need at least 2 rows".into() });
        }
        for (i, r) in rows.iter().enumerate() {
            if !(r.omega > 0.0 && r.omega.is_finite()) || !(r.im_eps > 0.0 && r.im_eps.is_finite()) {
                return Err(CasimirError::MalformedTable {
                    line: i + 1,
                    reason: format!("row {} needs omega > 0 and im_eps > 0", i + 1),
                });
            }
            if i > 0 && r.omega <= rows[i - 1].omega {
                return Err(CasimirError::MalformedTable {
                    line: i + 1,
                    reason: format!("row {} is not ascending in omega", i + 1),
                });
            }
        }
        Ok(Self { rows })
    }

    /// Parses `omega_eV im_eps` or `omega_eV n k` rows; `#` starts a comment
    /// line. Line numbers in errors refer to the input text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<OpticalRow> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| CasimirError::MalformedTable { line: line_no, reason };
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad(format!("cannot parse `{t}` as a number"))))
                .collect::<Result<_>>()?;
            let row = match fields.as_slice() {
                [omega, im] => OpticalRow { omega: *omega, im_eps: *im },
                [omega, n, k] => OpticalRow { omega: *omega, im_eps: 2.0 * n * k },
                _ => return Err(bad(format!("expected 2 or 3 columns, found {}", fields.len()))),
            };
            if !(row.omega > 0.0 && row.omega.is_finite()) {
                return Err(bad(format!("omega must be positive, got {}", row.omega)));
            }
            if !(row.im_eps > 0.0 && row.im_eps.is_finite()) {
                return Err(bad(format!("Im eps must be positive, got {}", row.im_eps)));
            }
            if let Some(prev) = rows.last() {
                if row.omega <= prev.omega {
                    return Err(bad(format!("omega {} does not ascend (previous {})", row.omega, prev.omega)));
                }
            }
            rows.push(row);
        }
        if rows.len() < 2 {
            return Err(CasimirError::MalformedTable { line: 0, reason: format!("need at least 2 rows, found {}", rows.len()) });
        }
        Ok(Self { rows })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn rows(&self) -> &[OpticalRow] {
        &self.rows
    }

    pub fn omega_min(&self) -> f64 {
        self.rows[0].omega
    }

    pub fn omega_max(&self) -> f64 {
        self.rows[self.rows.len() - 1].omega
    }
}

/// Log-log interpolated table plus Drude extrapolation below the first row,
/// reduced to fixed quadrature nodes so that each `eps(i xi)` is a single
/// weighted sum.
#[derive(Debug, Clone)]
pub struct KkTransform {
    table: OpticalTable,
    tail: DrudeParams,
    // (omega^2, w * omega^2 * Im eps) in the log-omega variable
    nodes: Vec<(f64, f64)>,
}

const KK_LOG_PANEL: f64 = 0.25;

impl KkTransform {
    pub fn new(table: OpticalTable, tail: DrudeParams) -> Self {
        let mut nodes = Vec::new();
        for pair in table.rows.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let t0 = lo.omega.ln();
            let t1 = hi.omega.ln();
            let slope = (hi.im_eps / lo.im_eps).ln() / (t1 - t0);
            let panels = ((t1 - t0) / KK_LOG_PANEL).ceil().max(1.0) as usize;
            let step = (t1 - t0) / panels as f64;
            for p in 0..panels {
                let a = t0 + step * p as f64;
                let b = if p + 1 == panels { t1 } else { a + step };
                for (t, w) in kronrod21_nodes(a, b) {
                    let omega = t.exp();
                    let im = lo.im_eps * (slope * (t - t0)).exp();
                    nodes.push((omega * omega, w * omega * omega * im));
                }
            }
        }
        Self { table, tail, nodes }
    }

    pub fn table(&self) -> &OpticalTable {
        &self.table
    }

    pub fn tail(&self) -> DrudeParams {
        self.tail
    }

    fn low_frequency(&self, xi: f64) -> Result<f64> {
        let w = self.table.omega_min();
        let g = self.tail.gamma;
        let wp2 = self.tail.omega_p * self.tail.omega_p;
        if (xi - g).abs() > 1e-4 * g {
            let bracket = (w / g).atan() / g - (w / xi).atan() / xi;
            return Ok(2.0 / PI * wp2 * g * bracket / (xi * xi - g * g));
        }
        // xi ~ gamma: partial fractions cancel, integrate in ln(omega).
        let f = |t: f64| {
            let om = t.exp();
            om * wp2 * g / ((om * om + g * g) * (om * om + xi * xi))
        };
        let lo = w.ln() - 60.0;
        let r = integrate(f, lo, w.ln(), 0.0, 1e-12, 200)?;
        Ok(2.0 / PI * r.value)
    }

    /// `eps(i xi) - 1`.
    pub fn susceptibility(&self, xi: f64) -> Result<f64> {
        if !(xi > 0.0) {
            return domain(format!("imaginary frequency must be positive, got {xi}"));
        }
        let x2 = xi * xi;
        let table_part: f64 = self.nodes.iter().map(|(w2, weight)| weight / (w2 + x2)).sum();
        Ok(2.0 / PI * table_part + self.low_frequency(xi)?)
    }

    pub fn eps(&self, xi: f64) -> Result<f64> {
        Ok(1.0 + self.susceptibility(xi)?)
    }
}

/// `eps(i xi) = 1 + (2/pi) int omega Im eps(omega) / (omega^2 + xi^2) d omega`
/// for tabulated data with a Drude tail below the table.
pub fn kk_transform(table: &OpticalTable, tail: DrudeParams, xi: f64) -> Result<f64> {
    KkTransform::new(table.clone(), tail).eps(xi)
}

#[derive(Debug, Clone)]
pub enum PermittivityModel {
    IdealMetal,
    Drude(DrudeParams),
    PlasmaOscillators(OscillatorSet),
    Dielectric(StaticDielectric),
    Tabulated(Arc<KkTransform>),
}

impl PermittivityModel {
    pub fn tabulated(table: OpticalTable, tail: DrudeParams) -> Self {
        Self::Tabulated(Arc::new(KkTransform::new(table, tail)))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::IdealMetal => "ideal",
            Self::Drude(_) => "drude",
            Self::PlasmaOscillators(_) => "plasma",
            Self::Dielectric(_) => "dielectric",
            Self::Tabulated(_) => "tabulated",
        }
    }

    /// `eps(i xi) - 1` as used by the force kernels. A static dielectric is
    /// treated as dispersionless here; the ideal metal has no finite response.
    pub(crate) fn susceptibility(&self, xi: f64) -> Result<f64> {
        match self {
            Self::IdealMetal => Err(CasimirError::UnsupportedModel("ideal metal has no finite permittivity")),
            Self::Drude(d) => Ok(d.omega_p * d.omega_p / (xi * (xi + d.gamma))),
            Self::PlasmaOscillators(set) => {
                let plasma = set.omega_p * set.omega_p / (xi * xi);
                let bound: f64 = set
                    .oscillators
                    .iter()
                    .map(|o| o.strength / (o.frequency * o.frequency + xi * xi + o.width * xi))
                    .sum();
                Ok(plasma + bound)
            }
            Self::Dielectric(d) => Ok(d.eps0 - 1.0),
            Self::Tabulated(kk) => kk.susceptibility(xi),
        }
    }
}

/// `eps(i xi)` for the dispersive models.
pub fn eps_imag_axis(model: &PermittivityModel, xi: f64) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return domain(format!("imaginary frequency must be positive and finite, got {xi}"));
    }
    match model {
        PermittivityModel::IdealMetal => Err(CasimirError::UnsupportedModel("ideal metal")),
        PermittivityModel::Dielectric(_) => Err(CasimirError::UnsupportedModel("static dielectric")),
        _ => Ok(1.0 + model.susceptibility(xi)?),
    }
}

/// Zero-frequency reflection behaviour of a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroFreqBehavior {
    /// `r_TM^2 = r_TE^2 = 1`
    IdealMetal,
    /// `r_TM = 1`, `r_TE = 0`
    DrudeLike,
    /// `r_TM = 1`, TE set by `alpha = delta_0 / (2a)`
    PlasmaLike { alpha: f64, skin_depth: f64 },
    /// `r_TM = r_0`, `r_TE = 0`
    Dielectric { r0: f64 },
}

/// `a` is the separation in metres; only the plasma variant depends on it.
pub fn zero_frequency_character(model: &PermittivityModel, a: f64) -> ZeroFreqBehavior {
    match model {
        PermittivityModel::IdealMetal => ZeroFreqBehavior::IdealMetal,
        PermittivityModel::Drude(_) | PermittivityModel::Tabulated(_) => ZeroFreqBehavior::DrudeLike,
        PermittivityModel::PlasmaOscillators(set) => {
            let skin_depth = set.skin_depth();
            ZeroFreqBehavior::PlasmaLike { alpha: skin_depth / (2.0 * a), skin_depth }
        }
        PermittivityModel::Dielectric(d) => ZeroFreqBehavior::Dielectric { r0: d.r0() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gold() -> PermittivityModel {
        PermittivityModel::Drude(DrudeParams::gold())
    }

    pub(crate) fn drude_table(n: usize) -> OpticalTable {
        let d = DrudeParams::gold();
        let (lo, hi) = (0.125f64.ln(), 10_000f64.ln());
        let rows = (0..n)
            .map(|i| {
                let omega = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
                OpticalRow { omega, im_eps: d.im_eps(omega) }
            })
            .collect();
        OpticalTable::new(rows).unwrap()
    }

    #[test]
    fn drude_at_plasma_frequency() {
        let e = eps_imag_axis(&gold(), 9.0).unwrap();
        let expect = 1.0 + 81.0 / (9.0 * 9.035);
        assert!((e - expect).abs() < 1e-14);
        assert!((e - 1.996_126_2).abs() < 1e-6);
    }

    #[test]
    fn simple_plasma_at_plasma_frequency() {
        let m = PermittivityModel::PlasmaOscillators(OscillatorSet::simple_plasma(9.0).unwrap());
        assert_eq!(eps_imag_axis(&m, 9.0).unwrap(), 2.0);
    }

    #[test]
    fn high_frequency_transparency() {
        assert!((eps_imag_axis(&gold(), 1e6).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(eps_imag_axis(&gold(), 0.0).is_err());
        assert!(eps_imag_axis(&gold(), -1.0).is_err());
        assert!(matches!(
            eps_imag_axis(&PermittivityModel::IdealMetal, 1.0),
            Err(CasimirError::UnsupportedModel(_))
        ));
        let diel = PermittivityModel::Dielectric(StaticDielectric::new(3.0).unwrap());
        assert!(matches!(eps_imag_axis(&diel, 1.0), Err(CasimirError::UnsupportedModel(_))));
        assert!(DrudeParams::new(-1.0, 0.1).is_err());
        assert!(StaticDielectric::new(1.0).is_err());
        assert!(OscillatorSet::new(9.0, vec![Oscillator { strength: 1.0, frequency: 0.0, width: 0.1 }]).is_err());
    }

    #[test]
    fn oscillators_raise_permittivity() {
        let osc = OscillatorSet::new(9.0, vec![Oscillator { strength: 20.0, frequency: 3.0, width: 0.5 }]).unwrap();
        let with = eps_imag_axis(&PermittivityModel::PlasmaOscillators(osc), 2.0).unwrap();
        let bare = eps_imag_axis(&PermittivityModel::PlasmaOscillators(OscillatorSet::simple_plasma(9.0).unwrap()), 2.0)
            .unwrap();
        assert!((with - bare - 20.0 / (9.0 + 4.0 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn kk_reproduces_drude_at_one_ev() {
        let table = drude_table(600);
        let kk = kk_transform(&table, DrudeParams::gold(), 1.0).unwrap();
        let analytic = eps_imag_axis(&gold(), 1.0).unwrap();
        assert!((kk / analytic - 1.0).abs() < 1e-3, "{kk} vs {analytic}");
    }

    #[test]
    fn kk_reproduces_drude_across_decades() {
        let kk = KkTransform::new(drude_table(600), DrudeParams::gold());
        for i in 0..=40 {
            let xi = 10f64.powf(-2.0 + 4.0 * i as f64 / 40.0);
            let a = kk.eps(xi).unwrap();
            let b = eps_imag_axis(&gold(), xi).unwrap();
            assert!((a / b - 1.0).abs() < 5e-3, "xi={xi}: {a} vs {b}");
        }
    }

    #[test]
    fn kk_degenerate_tail_branch_matches_neighbours() {
        let kk = KkTransform::new(drude_table(200), DrudeParams::gold());
        let at = kk.eps(0.035).unwrap();
        let below = kk.eps(0.035 * (1.0 - 2e-4)).unwrap();
        let above = kk.eps(0.035 * (1.0 + 2e-4)).unwrap();
        assert!(at < below && at > above);
        assert!((at / below - 1.0).abs() < 1e-3);
    }

    #[test]
    fn kk_vacuum_limit() {
        let rows = vec![OpticalRow { omega: 0.125, im_eps: 1e-30 }, OpticalRow { omega: 10_000.0, im_eps: 1e-30 }];
        let table = OpticalTable::new(rows).unwrap();
        let tail = DrudeParams::new(1e-10, 0.035).unwrap();
        assert!((kk_transform(&table, tail, 1.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn kk_decays_at_large_xi() {
        let e = kk_transform(&drude_table(100), DrudeParams::gold(), 1e7).unwrap();
        assert!((e - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_frequency_tags() {
        assert_eq!(zero_frequency_character(&gold(), 1e-7), ZeroFreqBehavior::DrudeLike);
        let plasma = PermittivityModel::PlasmaOscillators(OscillatorSet::simple_plasma(9.0).unwrap());
        match zero_frequency_character(&plasma, 1e-6) {
            ZeroFreqBehavior::PlasmaLike { alpha, skin_depth } => {
                assert!(skin_depth > 21.5e-9 && skin_depth < 22.5e-9);
                assert!((alpha - skin_depth / 2e-6).abs() < 1e-18);
            }
            other => panic!("unexpected {other:?}"),
        }
        let diel = PermittivityModel::Dielectric(StaticDielectric::new(3.0).unwrap());
        assert_eq!(zero_frequency_character(&diel, 1e-7), ZeroFreqBehavior::Dielectric { r0: 0.5 });
    }

    #[test]
    fn parses_two_and_three_column_files() {
        let t = OpticalTable::parse("# Au\n0.1 5.0\n\n0.2 4.0\n").unwrap();
        assert_eq!(t.rows().len(), 2);
        let t = OpticalTable::parse("0.1 2.0 3.0\n0.2 1.0 1.0\n").unwrap();
        assert_eq!(t.rows()[0].im_eps, 12.0);
        assert_eq!(t.omega_max(), 0.2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = OpticalTable::parse("# header\n0.1 1.0\n0.2 x\n").unwrap_err();
        assert!(matches!(err, CasimirError::MalformedTable { line: 3, .. }), "{err}");
        let err = OpticalTable::parse("0.2 1.0\n0.1 1.0\n").unwrap_err();
        assert!(matches!(err, CasimirError::MalformedTable { line: 2, .. }));
        let err = OpticalTable::parse("0.1 1.0\n0.2 -1.0\n").unwrap_err();
        assert!(matches!(err, CasimirError::MalformedTable { line: 2, .. }));
        assert!(OpticalTable::parse("0.1 1.0\n").is_err());
        assert!(OpticalTable::parse("0.1 1.0 2.0 3.0\n0.2 1.0\n").is_err());
    }

    proptest::proptest! {
        #[test]
        fn drude_and_plasma_decrease(xi in 1e-3f64..1e3, step in 1.001f64..2.0) {
            for m in [gold(), PermittivityModel::PlasmaOscillators(OscillatorSet::simple_plasma(9.0).unwrap())] {
                let a = eps_imag_axis(&m, xi).unwrap();
                let b = eps_imag_axis(&m, xi * step).unwrap();
                proptest::prop_assert!(a >= 1.0 && b >= 1.0 && b < a);
            }
        }
    }
}
