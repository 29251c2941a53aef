//! Experiment scenarios: array geometry, Bob/Eve links, pilots, the
//! attacker-knowledge error model, and the reference figure presets.
//!
//! Powers are linear everywhere in this module except the `*_db` setters
//! and the sweep grids, which are the config/CLI boundary.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CVec;
use crate::stats::TruncGauss;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_antennas: usize,
    /// Element spacing in wavelengths (d / lambda_c).
    pub spacing_over_wavelength: f64,
}

impl ArrayConfig {
    pub fn new(n_antennas: usize, spacing_over_wavelength: f64) -> Result<Self> {
        let a = Self {
            n_antennas,
            spacing_over_wavelength,
        };
        a.validate()?;
        Ok(a)
    }

    /// Ten half-wavelength spaced elements.
    pub fn reference() -> Self {
        Self {
            n_antennas: 10,
            spacing_over_wavelength: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_antennas == 0 {
            return Err(Error::Config("array needs at least one antenna".into()));
        }
        if !(self.spacing_over_wavelength > 0.0 && self.spacing_over_wavelength.is_finite()) {
            return Err(Error::Config(format!(
                "antenna spacing must be positive, got {}",
                self.spacing_over_wavelength
            )));
        }
        Ok(())
    }
}

/// One transmitter's multipath link to the base station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserLink {
    /// Angles of arrival in radians, one per path.
    pub aoas: Vec<f64>,
    /// Average transmit power per symbol, linear. Zero is a passive Eve.
    pub power: f64,
}

impl UserLink {
    pub fn new(aoas: Vec<f64>, power: f64) -> Result<Self> {
        let l = Self { aoas, power };
        l.validate()?;
        Ok(l)
    }

    pub fn paths(&self) -> usize {
        self.aoas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.aoas.is_empty() {
            return Err(Error::Config("a link needs at least one path".into()));
        }
        for &t in &self.aoas {
            // ULA responses are ambiguous outside [0, pi]; never wrap.
            if !(0.0..=PI).contains(&t) {
                return Err(Error::Config(format!("angle of arrival {t} outside [0, pi]")));
            }
        }
        if !(self.power >= 0.0 && self.power.is_finite()) {
            return Err(Error::Config(format!("power must be finite and >= 0, got {}", self.power)));
        }
        Ok(())
    }
}

/// Full multi-user uplink description. Bob `m` and Eve `m` share pilot `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub array: ArrayConfig,
    pub bobs: Vec<UserLink>,
    pub eves: Vec<UserLink>,
    pub noise_variance: f64,
    pub pilot_length: usize,
    /// Second AoA of Bob 1, when the preset geometry is in use.
    pub psi: Option<f64>,
    /// Offset of Eve 1's first AoA from Bob 1's third AoA.
    pub phi: Option<f64>,
}

impl ScenarioConfig {
    /// Two Bob-Eve pairs on a 10-element array, SNR_B = 30 dB, SSR = 0 dB,
    /// unit noise variance, K = 8, psi = phi = pi/10.
    pub fn reference() -> Self {
        let noise_variance = 1.0;
        let p_b = db_to_linear(30.0) * noise_variance;
        let p_e = p_b / db_to_linear(0.0);
        let psi = PI / 10.0;
        let phi = PI / 10.0;
        Self {
            array: ArrayConfig::reference(),
            bobs: vec![
                UserLink {
                    aoas: vec![0.0, psi, PI / 5.0],
                    power: p_b,
                },
                UserLink {
                    aoas: vec![3.0 * PI / 5.0, 7.0 * PI / 10.0],
                    power: p_b,
                },
            ],
            eves: vec![
                UserLink {
                    aoas: vec![PI / 5.0 + phi, 2.0 * PI / 5.0, PI / 2.0],
                    power: p_e,
                },
                UserLink {
                    aoas: vec![4.0 * PI / 5.0, 9.0 * PI / 10.0],
                    power: p_e,
                },
            ],
            noise_variance,
            pilot_length: 8,
            psi: Some(psi),
            phi: Some(phi),
        }
    }

    pub fn users(&self) -> usize {
        self.bobs.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.array.validate()?;
        if self.bobs.is_empty() {
            return Err(Error::Config("at least one Bob-Eve pair is required".into()));
        }
        if self.bobs.len() != self.eves.len() {
            return Err(Error::Config(format!(
                "{} Bobs but {} Eves; links are paired by index",
                self.bobs.len(),
                self.eves.len()
            )));
        }
        if self.pilot_length < self.bobs.len() {
            return Err(Error::Config(format!(
                "pilot length {} cannot hold {} orthogonal pilots",
                self.pilot_length,
                self.bobs.len()
            )));
        }
        if !(self.noise_variance > 0.0 && self.noise_variance.is_finite()) {
            return Err(Error::Config(format!(
                "noise variance must be positive, got {}",
                self.noise_variance
            )));
        }
        for l in self.bobs.iter().chain(&self.eves) {
            l.validate()?;
        }
        Ok(())
    }

    /// Places `psi` as Bob 1's second AoA.
    pub fn with_psi(mut self, psi: f64) -> Result<Self> {
        let bob = self
            .bobs
            .first_mut()
            .filter(|b| b.aoas.len() >= 2)
            .ok_or_else(|| Error::Config("psi needs Bob 1 with at least two paths".into()))?;
        bob.aoas[1] = psi;
        self.psi = Some(psi);
        Ok(self)
    }

    /// Places Eve 1's first AoA at Bob 1's third AoA plus `phi`.
    pub fn with_phi(mut self, phi: f64) -> Result<Self> {
        let anchor = self
            .bobs
            .first()
            .and_then(|b| b.aoas.get(2).copied())
            .ok_or_else(|| Error::Config("phi needs Bob 1 with at least three paths".into()))?;
        let eve = self
            .eves
            .first_mut()
            .ok_or_else(|| Error::Config("phi needs an Eve 1".into()))?;
        eve.aoas[0] = anchor + phi;
        self.phi = Some(phi);
        Ok(self)
    }

    /// Sets every Bob power to `SNR_B * sigma_v^2`, keeping each pair's SSR.
    pub fn with_snr_b_db(mut self, snr_db: f64) -> Self {
        let p_b = db_to_linear(snr_db) * self.noise_variance;
        for (bob, eve) in self.bobs.iter_mut().zip(self.eves.iter_mut()) {
            if bob.power > 0.0 {
                eve.power *= p_b / bob.power;
            }
            bob.power = p_b;
        }
        self
    }

    /// Sets every Eve power to `P_B / SSR`.
    pub fn with_ssr_db(mut self, ssr_db: f64) -> Self {
        let ssr = db_to_linear(ssr_db);
        for (bob, eve) in self.bobs.iter().zip(self.eves.iter_mut()) {
            eve.power = bob.power / ssr;
        }
        self
    }

    /// Every Eve silent in uplink.
    pub fn passive(mut self) -> Self {
        for eve in &mut self.eves {
            eve.power = 0.0;
        }
        self
    }

    /// Keeps only the first `m` Bob-Eve pairs.
    pub fn with_users(mut self, m: usize) -> Result<Self> {
        if m == 0 || m > self.bobs.len() {
            return Err(Error::Config(format!(
                "user count {m} outside 1..={}",
                self.bobs.len()
            )));
        }
        self.bobs.truncate(m);
        self.eves.truncate(m);
        Ok(self)
    }

    pub fn snr_b(&self, user: usize) -> f64 {
        self.bobs[user].power / self.noise_variance
    }

    /// `P_B / P_E`; infinite for a passive Eve.
    pub fn ssr(&self, user: usize) -> f64 {
        self.bobs[user].power / self.eves[user].power
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `m` distinct columns (0, 1, ..., m-1) of the unitary K-point DFT matrix.
pub fn make_dft_pilots(pilot_length: usize, users: usize) -> Result<Vec<CVec>> {
    if users == 0 {
        return Err(Error::Config("at least one pilot is required".into()));
    }
    if pilot_length < users {
        return Err(Error::Config(format!(
            "cannot allocate {users} orthogonal pilots of length {pilot_length}"
        )));
    }
    let k = pilot_length as f64;
    let scale = 1.0 / k.sqrt();
    Ok((0..users)
        .map(|m| {
            CVec::from_fn(pilot_length, |n, _| {
                let ang = -2.0 * PI * ((n * m) % pilot_length) as f64 / k;
                Complex64::from_polar(scale, ang)
            })
        })
        .collect())
}

/// Hyperparameters of the truncated-Gaussian errors on Alice's estimates of
/// the Eve AoAs and (log-domain) Eve power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveErrorModel {
    pub sigma_theta: f64,
    pub delta_theta_max: f64,
    pub sigma_power: f64,
    pub delta_power_max: f64,
}

impl EveErrorModel {
    /// AoA window +-pi/25 with shape std pi/75; log-power window +-0.3454
    /// (3 dB total) with shape std 0.1727.
    pub fn reference() -> Self {
        let delta_theta_max = PI / 25.0;
        let delta_power_max = 0.3454;
        Self {
            sigma_theta: delta_theta_max / 3.0,
            delta_theta_max,
            sigma_power: delta_power_max / 2.0,
            delta_power_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !(ok(self.sigma_theta)
            && ok(self.delta_theta_max)
            && ok(self.sigma_power)
            && ok(self.delta_power_max))
        {
            return Err(Error::Config(format!("invalid Eve error model {self:?}")));
        }
        Ok(())
    }

    pub fn aoa_error(&self) -> TruncGauss {
        TruncGauss::symmetric(self.sigma_theta, self.delta_theta_max)
            .expect("validated error model")
    }

    pub fn power_error(&self) -> TruncGauss {
        TruncGauss::symmetric(self.sigma_power, self.delta_power_max)
            .expect("validated error model")
    }

    /// Draws Alice's noisy view of `eve`: `theta_hat = theta + d_theta`,
    /// `P_hat = P * exp(d_p)`.
    pub fn sample_knowledge<R: Rng + ?Sized>(&self, eve: &UserLink, rng: &mut R) -> EveKnowledge {
        let aoa = self.aoa_error();
        let aoa_estimates = eve.aoas.iter().map(|&t| t + aoa.sample(rng)).collect();
        let power_estimate = eve.power * self.power_error().sample(rng).exp();
        EveKnowledge {
            aoa_estimates,
            power_estimate,
            model: *self,
        }
    }

    /// Error-free knowledge, for oracles.
    pub fn exact_knowledge(&self, eve: &UserLink) -> EveKnowledge {
        EveKnowledge {
            aoa_estimates: eve.aoas.clone(),
            power_estimate: eve.power,
            model: *self,
        }
    }
}

/// What Alice knows about one Eve: point estimates plus the error model.
#[derive(Debug, Clone, PartialEq)]
pub struct EveKnowledge {
    pub aoa_estimates: Vec<f64>,
    pub power_estimate: f64,
    pub model: EveErrorModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SweepVariable {
    SnrBDb,
    SsrDb,
    Snapshots,
    Psi,
    Phi,
    SigmaTheta,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::SnrBDb => "snr_b_db",
            SweepVariable::SsrDb => "ssr_db",
            SweepVariable::Snapshots => "q",
            SweepVariable::Psi => "psi",
            SweepVariable::Phi => "phi",
            SweepVariable::SigmaTheta => "sigma_theta",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "snr_b_db" => SweepVariable::SnrBDb,
            "ssr_db" => SweepVariable::SsrDb,
            "q" => SweepVariable::Snapshots,
            "psi" => SweepVariable::Psi,
            "phi" => SweepVariable::Phi,
            "sigma_theta" => SweepVariable::SigmaTheta,
            other => return Err(Error::Config(format!("unknown sweep variable '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// Snapshot count for sample-correlation estimators when Q is not swept.
    pub q_snapshots: Option<usize>,
}

/// A scenario, the attacker-knowledge model and the sweep to run over it.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub scenario: ScenarioConfig,
    pub eve_model: EveErrorModel,
    pub sweep: Sweep,
}

/// One sweep point resolved into concrete inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub scenario: ScenarioConfig,
    pub eve_model: EveErrorModel,
    pub q_snapshots: Option<usize>,
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.eve_model.validate()?;
        if self.sweep.values.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.sweep.variable == SweepVariable::Snapshots
            && self.sweep.values.iter().any(|&q| !(q >= 1.0 && q.fract() == 0.0))
        {
            return Err(Error::Config("snapshot counts must be positive integers".into()));
        }
        Ok(())
    }

    pub fn point(&self, value: f64) -> Result<SweepPoint> {
        let mut scenario = self.scenario.clone();
        let mut eve_model = self.eve_model;
        let mut q = self.sweep.q_snapshots;
        match self.sweep.variable {
            SweepVariable::SnrBDb => scenario = scenario.with_snr_b_db(value),
            SweepVariable::SsrDb => scenario = scenario.with_ssr_db(value),
            SweepVariable::Snapshots => q = Some(value as usize),
            SweepVariable::Psi => scenario = scenario.with_psi(value)?,
            SweepVariable::Phi => scenario = scenario.with_phi(value)?,
            SweepVariable::SigmaTheta => eve_model.sigma_theta = value,
        }
        scenario.validate()?;
        eve_model.validate()?;
        Ok(SweepPoint {
            value,
            scenario,
            eve_model,
            q_snapshots: q,
        })
    }

    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        self.sweep.values.iter().map(|&v| self.point(v)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigurePreset {
    Fig3,
    Fig4,
    Fig5,
    Fig8,
    Fig9,
    Fig10,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 6] = [
        FigurePreset::Fig3,
        FigurePreset::Fig4,
        FigurePreset::Fig5,
        FigurePreset::Fig8,
        FigurePreset::Fig9,
        FigurePreset::Fig10,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigurePreset::Fig3 => "fig3",
            FigurePreset::Fig4 => "fig4",
            FigurePreset::Fig5 => "fig5",
            FigurePreset::Fig8 => "fig8",
            FigurePreset::Fig9 => "fig9",
            FigurePreset::Fig10 => "fig10",
        }
    }
}

impl fmt::Display for FigurePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigurePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigurePreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure preset '{s}'")))
    }
}

/// Keys accepted by [`build_reference_scenario`] overrides.
pub const OVERRIDE_KEYS: &[&str] = &[
    "M",
    "snr_b_db",
    "ssr_db",
    "psi",
    "phi",
    "noise_variance",
    "pilot_length",
    "n_antennas",
    "spacing_over_wavelength",
    "sigma_theta",
    "delta_theta_max",
    "sigma_power",
    "delta_power_max",
    "q",
];

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

fn preset_sweep(preset: FigurePreset, model: &EveErrorModel) -> Sweep {
    let (variable, values, q) = match preset {
        FigurePreset::Fig3 => (SweepVariable::SnrBDb, grid(0.0, 34.0, 2.0), None),
        FigurePreset::Fig4 => (SweepVariable::SsrDb, grid(-10.0, 20.0, 2.0), None),
        FigurePreset::Fig5 => (
            SweepVariable::Snapshots,
            (4..=12).map(|k| f64::from(1u32 << k)).collect(),
            None,
        ),
        FigurePreset::Fig8 => (
            SweepVariable::Psi,
            vec![0.0, PI / 80.0, PI / 40.0, PI / 20.0, PI / 10.0],
            None,
        ),
        FigurePreset::Fig9 => (
            SweepVariable::Phi,
            vec![0.0, PI / 80.0, PI / 40.0, PI / 20.0, PI / 10.0],
            None,
        ),
        FigurePreset::Fig10 => (
            SweepVariable::SigmaTheta,
            [12.0, 6.0, 4.0, 3.0, 2.4, 2.0]
                .iter()
                .map(|d| model.delta_theta_max / d)
                .collect(),
            None,
        ),
    };
    Sweep {
        variable,
        values,
        q_snapshots: q,
    }
}

/// Builds the reference scenario for `preset`, with its sweep variable left
/// free, then applies `overrides` (keys from [`OVERRIDE_KEYS`]).
pub fn build_reference_scenario(
    preset: FigurePreset,
    overrides: &BTreeMap<String, f64>,
) -> Result<Experiment> {
    let mut scenario = ScenarioConfig::reference();
    let mut eve_model = EveErrorModel::reference();
    let mut snr_db = 30.0;
    let mut ssr_db = 0.0;
    let mut q = None;
    for (key, &v) in overrides {
        match key.as_str() {
            "M" => scenario = scenario.with_users(as_count(key, v)?)?,
            "snr_b_db" => snr_db = v,
            "ssr_db" => ssr_db = v,
            "psi" => scenario = scenario.with_psi(v)?,
            "phi" => scenario = scenario.with_phi(v)?,
            "noise_variance" => scenario.noise_variance = v,
            "pilot_length" => scenario.pilot_length = as_count(key, v)?,
            "n_antennas" => scenario.array.n_antennas = as_count(key, v)?,
            "spacing_over_wavelength" => scenario.array.spacing_over_wavelength = v,
            "sigma_theta" => eve_model.sigma_theta = v,
            "delta_theta_max" => eve_model.delta_theta_max = v,
            "sigma_power" => eve_model.sigma_power = v,
            "delta_power_max" => eve_model.delta_power_max = v,
            "q" => q = Some(as_count(key, v)?),
            other => return Err(Error::Config(format!("unknown override key '{other}'"))),
        }
    }
    scenario = scenario.with_snr_b_db(snr_db).with_ssr_db(ssr_db);
    let mut sweep = preset_sweep(preset, &eve_model);
    sweep.q_snapshots = q;
    let exp = Experiment {
        scenario,
        eve_model,
        sweep,
    };
    exp.validate()?;
    Ok(exp)
}

fn as_count(key: &str, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v.is_finite() {
        Ok(v as usize)
    } else {
        Err(Error::Config(format!("override '{key}' must be a positive integer, got {v}")))
    }
}

// On-disk TOML layout.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentFile {
    pilot_length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    psi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    array: ArrayConfig,
    noise: NoiseSection,
    bobs: Vec<UserLink>,
    eves: Vec<UserLink>,
    eve_knowledge: EveErrorModel,
    sweep: SweepSection,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSection {
    variance: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    variable: String,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q_snapshots: Option<usize>,
}

impl Experiment {
    pub fn to_toml(&self) -> Result<String> {
        let s = &self.scenario;
        let file = ExperimentFile {
            pilot_length: s.pilot_length,
            psi: s.psi,
            phi: s.phi,
            array: s.array,
            noise: NoiseSection {
                variance: s.noise_variance,
            },
            bobs: s.bobs.clone(),
            eves: s.eves.clone(),
            eve_knowledge: self.eve_model,
            sweep: SweepSection {
                variable: self.sweep.variable.name().to_string(),
                values: self.sweep.values.clone(),
                q_snapshots: self.sweep.q_snapshots,
            },
        };
        toml::to_string(&file).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses a config file. `psi`/`phi`, when present, are substituted into
    /// the Bob 1 / Eve 1 AoA lists.
    pub fn from_toml(text: &str) -> Result<Self> {
        let f: ExperimentFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut scenario = ScenarioConfig {
            array: f.array,
            bobs: f.bobs,
            eves: f.eves,
            noise_variance: f.noise.variance,
            pilot_length: f.pilot_length,
            psi: None,
            phi: None,
        };
        if let Some(psi) = f.psi {
            scenario = scenario.with_psi(psi)?;
        }
        if let Some(phi) = f.phi {
            scenario = scenario.with_phi(phi)?;
        }
        let exp = Experiment {
            scenario,
            eve_model: f.eve_knowledge,
            sweep: Sweep {
                variable: f.sweep.variable.parse()?,
                values: f.sweep.values,
                q_snapshots: f.sweep.q_snapshots,
            },
        };
        exp.validate()?;
        Ok(exp)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }
}
