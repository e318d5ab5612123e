//! Experiment files.
//!
//! A file holds one base scenario plus optional `[[scenario]]` blocks, each
//! overriding a few fields of the base. Unknown keys are rejected
//! everywhere. SNR and threshold values are in dB here and converted once
//! when a point is resolved.

use std::collections::BTreeSet;
use std::path::PathBuf;

use hstn_core::channel::{SrFadingParams, TerrestrialFading};
use hstn_core::linkbudget::{self, LinkBudget};
use hstn_core::mcsim::MAX_AUTO_TRIALS;
use hstn_core::mobility::{MobilityConfig, MobilityModel};
use hstn_core::outage::{HardwareProfile, Network, OutageQuery};
use hstn_core::db_to_linear;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Upper bound on the points of one sweep axis.
pub const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub sweep: SweepSection,
    pub system: SystemSection,
    pub hardware: HardwareProfile,
    pub satellite: SatelliteSection,
    pub terrestrial: TerrestrialSection,
    pub mobility: MobilitySection,
    pub link_budget: Option<LinkBudgetSection>,
    #[serde(default)]
    pub monte_carlo: MonteCarloSection,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<ScenarioOverride>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Asymptotic,
    Numeric,
    Montecarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Asymptotic => "asymptotic",
            Method::Numeric => "numeric",
            Method::Montecarlo => "montecarlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Average SNR `η_s = η_u = η`.
    Eta,
    /// Outage threshold `γ_th`.
    Gamma,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Eta => "eta",
            Axis::Gamma => "gamma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSection {
    pub fn validate(&self) -> CliResult<()> {
        for (field, v) in [("start", self.start), ("stop", self.stop), ("step", self.step)] {
            if !v.is_finite() {
                return Err(CliError::Config(format!("sweep.{field} must be finite, got {v}")));
            }
        }
        if self.step.is_nan() || self.step <= 0.0 {
            return Err(CliError::Config(format!("sweep.step must be positive, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(CliError::Config(format!(
                "sweep.stop ({}) is below sweep.start ({})",
                self.stop, self.start
            )));
        }
        if (self.stop - self.start) / self.step >= MAX_SWEEP_POINTS as f64 {
            return Err(CliError::Config(format!("sweep has more than {MAX_SWEEP_POINTS} points")));
        }
        Ok(())
    }

    /// `start, start + step, ...` up to `stop`; a stop that lies within
    /// 1e-9 steps of the grid is included.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrSource {
    /// `η_s = η_u = η`.
    #[default]
    Direct,
    /// `η_s` from the link budget at transmit power ratio `η`; `η_u = η`.
    LinkBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub relays: u32,
    pub path_loss_exp: f64,
    #[serde(default)]
    pub snr_source: SnrSource,
    /// Fixed threshold of an `eta` sweep.
    pub threshold_db: Option<f64>,
    /// Fixed SNR of a `gamma` sweep.
    pub eta_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteSection {
    pub m_su: f64,
    pub b_su: f64,
    pub omega_su: f64,
}

impl SatelliteSection {
    pub fn params(&self) -> CliResult<SrFadingParams> {
        Ok(SrFadingParams::new(self.m_su, self.b_su, self.omega_su)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum TerrestrialSection {
    Nakagami { m_ud: f64, omega_ud: f64 },
    Rician { k_ud: f64, omega_ud: f64 },
}

impl TerrestrialSection {
    pub fn fading(&self) -> CliResult<TerrestrialFading> {
        Ok(match *self {
            TerrestrialSection::Nakagami { m_ud, omega_ud } => TerrestrialFading::nakagami(m_ud, omega_ud)?,
            TerrestrialSection::Rician { k_ud, omega_ud } => TerrestrialFading::rician(k_ud, omega_ud)?,
        })
    }
}

/// Geometry and speeds, with the dwell law given either as a stay
/// probability or as an explicit dwell range.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilitySection {
    pub height_h: f64,
    pub radius_r: f64,
    pub walk_range: f64,
    pub v_vert_min: f64,
    pub v_vert_max: f64,
    pub stay_probability: Option<f64>,
    pub dwell_min: Option<f64>,
    pub dwell_max: Option<f64>,
}

impl MobilitySection {
    pub fn reference() -> Self {
        let c = MobilityConfig::reference();
        MobilitySection {
            height_h: c.height_h,
            radius_r: c.radius_r,
            walk_range: c.walk_range,
            v_vert_min: c.v_vert_min,
            v_vert_max: c.v_vert_max,
            stay_probability: Some(0.5),
            dwell_min: None,
            dwell_max: None,
        }
    }

    /// Builds the model. A stay probability strictly inside `(0, 1)` sets
    /// the dwell range; at 0 or 1 only the stationary laws are meaningful.
    pub fn model(&self) -> CliResult<MobilityModel> {
        let mut cfg = MobilityConfig {
            height_h: self.height_h,
            radius_r: self.radius_r,
            walk_range: self.walk_range,
            v_vert_min: self.v_vert_min,
            v_vert_max: self.v_vert_max,
            dwell_min: 1.0,
            dwell_max: 1.0,
        };
        match (self.stay_probability, self.dwell_min, self.dwell_max) {
            (Some(ps), None, None) if ps > 0.0 && ps < 1.0 => Ok(MobilityModel::new(cfg.with_stay_probability(ps)?)?),
            (Some(ps), None, None) => Ok(MobilityModel::with_stay_probability(cfg, ps)?),
            (None, Some(lo), Some(hi)) => {
                cfg.dwell_min = lo;
                cfg.dwell_max = hi;
                Ok(MobilityModel::new(cfg)?)
            }
            _ => Err(CliError::Config(
                "mobility: give either stay_probability or both dwell_min and dwell_max".to_string(),
            )),
        }
    }

    /// True when the dwell range encodes the stay probability, so the
    /// trajectory simulator is consistent with the stationary laws.
    pub fn has_dynamics(&self) -> bool {
        match self.stay_probability {
            Some(ps) => ps > 0.0 && ps < 1.0,
            None => true,
        }
    }
}

/// Satellite link budget in the units it is usually quoted in.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudgetSection {
    pub noise_temp_k: f64,
    pub bandwidth_mhz: f64,
    /// Must equal the built-in constant; present so the file is complete.
    pub speed_of_light: f64,
    pub distance_km: f64,
    pub carrier_freq_ghz: f64,
    pub gain_uav_db: f64,
    pub gain_sat_db: f64,
    pub theta_u_deg: f64,
    pub theta_3db_deg: f64,
}

impl LinkBudgetSection {
    pub fn budget(&self) -> CliResult<LinkBudget> {
        if self.speed_of_light != linkbudget::SPEED_OF_LIGHT {
            return Err(CliError::Config(format!(
                "link_budget.speed_of_light is fixed at {}, got {}",
                linkbudget::SPEED_OF_LIGHT,
                self.speed_of_light
            )));
        }
        let b = LinkBudget {
            noise_temp: self.noise_temp_k,
            bandwidth: self.bandwidth_mhz * 1e6,
            carrier_freq: self.carrier_freq_ghz * 1e9,
            distance_du: self.distance_km * 1e3,
            gain_sat_db: self.gain_sat_db,
            gain_uav_db: self.gain_uav_db,
            theta_u_deg: self.theta_u_deg,
            theta_3db_deg: self.theta_3db_deg,
            tx_power_over_noise: 1.0,
        };
        b.validate()?;
        Ok(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    /// Fixed trial count per point; absent means automatic sizing.
    pub trials: Option<u64>,
    /// Ceiling of automatic sizing.
    pub trial_cap: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverride {
    pub name: String,
    pub relays: Option<u32>,
    pub hardware: Option<HardwareProfile>,
    pub satellite: Option<SatelliteSection>,
    pub terrestrial: Option<TerrestrialSection>,
    pub methods: Option<Vec<Method>>,
    pub threshold_db: Option<f64>,
    pub eta_db: Option<f64>,
}

/// Maps a swept SNR in dB to `(η_s, η_u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrMap {
    Direct,
    Budget(LinkBudget),
}

impl SnrMap {
    pub fn etas(&self, eta_db: f64) -> CliResult<(f64, f64)> {
        let eta_u = db_to_linear(eta_db);
        match self {
            SnrMap::Direct => Ok((eta_u, eta_u)),
            SnrMap::Budget(b) => Ok((linkbudget::eta_s(b, eta_db)?, eta_u)),
        }
    }
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub network: Network,
    pub relays: u32,
    pub hardware: HardwareProfile,
    pub methods: Vec<Method>,
    pub axis: Axis,
    /// Threshold for an `eta` sweep, SNR for a `gamma` sweep (dB).
    pub fixed_db: f64,
    pub snr: SnrMap,
}

impl Scenario {
    /// The query at sweep coordinate `x_db`.
    pub fn query(&self, x_db: f64) -> CliResult<OutageQuery> {
        let (threshold_db, eta_db) = match self.axis {
            Axis::Eta => (self.fixed_db, x_db),
            Axis::Gamma => (x_db, self.fixed_db),
        };
        let (eta_s, eta_u) = self.snr.etas(eta_db)?;
        Ok(OutageQuery::new(self.relays, db_to_linear(threshold_db), eta_s, eta_u, self.hardware)?)
    }
}

impl ExperimentConfig {
    /// Parses TOML; diagnostics carry the line and column.
    pub fn from_toml(text: &str, origin: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }

    pub fn from_path(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn monte_carlo_cap(&self) -> u64 {
        self.monte_carlo.trial_cap.unwrap_or(MAX_AUTO_TRIALS)
    }

    /// Validates the file and expands it into scenarios in file order.
    pub fn resolve(&self) -> CliResult<Vec<Scenario>> {
        self.sweep.validate()?;
        if let Some(0) = self.monte_carlo.trials {
            return Err(CliError::Config("monte_carlo.trials must be at least 1".to_string()));
        }
        let snr = match (self.system.snr_source, &self.link_budget) {
            (SnrSource::Direct, lb) => {
                if let Some(lb) = lb {
                    lb.budget()?;
                }
                SnrMap::Direct
            }
            (SnrSource::LinkBudget, Some(lb)) => SnrMap::Budget(lb.budget()?),
            (SnrSource::LinkBudget, None) => {
                return Err(CliError::Config("system.snr_source = \"link_budget\" needs a [link_budget] table".to_string()))
            }
        };
        let mobility = self.mobility.model().map_err(|e| context("mobility", e))?;

        let base = ScenarioOverride {
            name: self.name.clone(),
            relays: None,
            hardware: None,
            satellite: None,
            terrestrial: None,
            methods: None,
            threshold_db: None,
            eta_db: None,
        };
        let overrides = if self.scenarios.is_empty() {
            std::slice::from_ref(&base)
        } else {
            &self.scenarios[..]
        };
        let mut seen = BTreeSet::new();
        overrides
            .iter()
            .map(|o| {
                if !seen.insert(o.name.as_str()) {
                    return Err(CliError::Config(format!("duplicate scenario name `{}`", o.name)));
                }
                self.build(o, mobility, snr).map_err(|e| context(&format!("scenario `{}`", o.name), e))
            })
            .collect()
    }

    fn build(&self, o: &ScenarioOverride, mobility: MobilityModel, snr: SnrMap) -> CliResult<Scenario> {
        if o.name.is_empty() || o.name.contains(['\n', '\r']) {
            return Err(CliError::Config("name must be a non-empty single line".to_string()));
        }
        let methods = o.methods.clone().unwrap_or_else(|| self.methods.clone());
        if methods.is_empty() {
            return Err(CliError::Config("at least one method is required".to_string()));
        }
        let sr = o.satellite.unwrap_or(self.satellite).params()?;
        let terrestrial = o.terrestrial.unwrap_or(self.terrestrial).fading()?;
        let network = Network::new(sr, terrestrial, mobility, self.system.path_loss_exp)?;
        let hardware = o.hardware.unwrap_or(self.hardware);
        HardwareProfile::new(hardware.kappa_s, hardware.kappa_u)?;
        let axis = self.sweep.axis;
        let fixed_db = match axis {
            Axis::Eta => o.threshold_db.or(self.system.threshold_db).ok_or_else(|| {
                CliError::Config("an eta sweep needs system.threshold_db".to_string())
            })?,
            Axis::Gamma => o
                .eta_db
                .or(self.system.eta_db)
                .ok_or_else(|| CliError::Config("a gamma sweep needs system.eta_db".to_string()))?,
        };
        if !fixed_db.is_finite() {
            return Err(CliError::Config(format!("fixed sweep coordinate must be finite, got {fixed_db}")));
        }
        let relays = o.relays.unwrap_or(self.system.relays);
        if relays == 0 {
            return Err(CliError::Config("relays must be at least 1".to_string()));
        }
        // SNRs that overflow at some points fail those points only
        Ok(Scenario {
            name: o.name.clone(),
            network,
            relays,
            hardware,
            methods,
            axis,
            fixed_db,
            snr,
        })
    }
}

fn context(what: &str, e: CliError) -> CliError {
    match e {
        CliError::Config(msg) => CliError::Config(format!("{what}: {msg}")),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "base"
methods = ["exact"]

[sweep]
axis = "eta"
start = 0.0
stop = 10.0
step = 5.0

[system]
relays = 1
path_loss_exp = 2.0
threshold_db = 0.0

[hardware]
kappa_s = 0.3
kappa_u = 0.3

[satellite]
m_su = 1
b_su = 0.063
omega_su = 0.0007

[terrestrial]
family = "nakagami"
m_ud = 1
omega_ud = 1.0

[mobility]
height_h = 40.0
radius_r = 80.0
walk_range = 40.0
v_vert_min = 0.1
v_vert_max = 30.0
stay_probability = 0.5
"#;

    fn parse(text: &str) -> CliResult<ExperimentConfig> {
        ExperimentConfig::from_toml(text, "test")
    }

    #[test]
    fn minimal_file_resolves_to_one_scenario() {
        let cfg = parse(MINIMAL).unwrap();
        let s = cfg.resolve().unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].name, "base");
        assert_eq!(cfg.sweep.points(), vec![0.0, 5.0, 10.0]);
        assert_eq!(cfg.seed, 1);
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let text = MINIMAL.replace("relays = 1", "relays = 1\nrelay_count = 2");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("relay_count"), "{err}");
        assert!(err.contains("line"), "{err}");
        let text = MINIMAL.replace("m_ud = 1", "m_ud = 1\nk_ud = 2");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn bad_sweeps_are_rejected() {
        for (from, to) in [("step = 5.0", "step = 0.0"), ("step = 5.0", "step = -1.0"), ("stop = 10.0", "stop = -1.0")] {
            let cfg = parse(&MINIMAL.replace(from, to)).unwrap();
            assert!(matches!(cfg.resolve(), Err(CliError::Config(_))), "{to}");
        }
        let cfg = parse(&MINIMAL.replace("stop = 10.0", "stop = 0.0")).unwrap();
        assert_eq!(cfg.sweep.points(), vec![0.0]);
        let cfg = parse(&MINIMAL.replace("methods = [\"exact\"]", "methods = []")).unwrap();
        assert!(cfg.resolve().is_err());
        assert!(parse(&MINIMAL.replace("\"exact\"", "\"guess\"")).is_err());
    }

    #[test]
    fn grid_keeps_a_stop_on_the_grid() {
        let s = SweepSection {
            axis: Axis::Gamma,
            start: 0.0,
            stop: 1.0,
            step: 0.1,
        };
        assert_eq!(s.points().len(), 11);
        assert!((s.points()[10] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overrides_replace_base_fields() {
        let text = format!(
            "{MINIMAL}\n[[scenario]]\nname = \"a\"\nrelays = 3\n\n[[scenario]]\nname = \"b\"\nterrestrial = {{ family = \"rician\", k_ud = 2.0, omega_ud = 1.0 }}\nhardware = {{ kappa_s = 0.0, kappa_u = 0.0 }}\n"
        );
        let s = parse(&text).unwrap().resolve().unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].relays, 3);
        assert_eq!(s[1].relays, 1);
        assert!(matches!(s[1].network.terrestrial, TerrestrialFading::Rician { .. }));
        assert_eq!(s[1].hardware, HardwareProfile::ideal());
        let dup = text.replace("name = \"b\"", "name = \"a\"");
        assert!(parse(&dup).unwrap().resolve().is_err());
    }

    #[test]
    fn invalid_values_name_the_field() {
        let err = parse(&MINIMAL.replace("m_su = 1", "m_su = 1.5")).unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("m_su"), "{err}");
        let err = parse(&MINIMAL.replace("relays = 1", "relays = 0")).unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("relays"), "{err}");
    }

    #[test]
    fn gamma_sweep_needs_a_fixed_snr() {
        let text = MINIMAL.replace("axis = \"eta\"", "axis = \"gamma\"");
        assert!(parse(&text).unwrap().resolve().is_err());
        let text = text.replace("threshold_db = 0.0", "eta_db = 60.0");
        let s = parse(&text).unwrap().resolve().unwrap();
        let q = s[0].query(3.0).unwrap();
        assert!((q.threshold - db_to_linear(3.0)).abs() < 1e-12);
        assert!((q.eta_s - 1e6).abs() < 1e-3);
    }

    #[test]
    fn mobility_dwell_forms() {
        let mut m = MobilitySection::reference();
        assert!((m.model().unwrap().stay_probability() - 0.5).abs() < 1e-12);
        m.stay_probability = Some(1.0);
        assert_eq!(m.model().unwrap().stay_probability(), 1.0);
        assert!(!m.has_dynamics());
        m.dwell_min = Some(1.0);
        m.dwell_max = Some(2.0);
        assert!(m.model().is_err());
        m.stay_probability = None;
        assert!(m.model().is_ok());
    }

    #[test]
    fn link_budget_source() {
        let lb = "\n[link_budget]\nnoise_temp_k = 300\nbandwidth_mhz = 15\nspeed_of_light = 3e8\ndistance_km = 35786\ncarrier_freq_ghz = 2\ngain_uav_db = 4.8\ngain_sat_db = 53.45\ntheta_u_deg = 0.8\ntheta_3db_deg = 0.3\n";
        let text = MINIMAL.replace("path_loss_exp = 2.0", "path_loss_exp = 2.0\nsnr_source = \"link_budget\"");
        assert!(parse(&text).unwrap().resolve().is_err());
        let s = parse(&format!("{text}{lb}")).unwrap().resolve().unwrap();
        let q = s[0].query(20.0).unwrap();
        let scale = linkbudget::free_space_scale(&LinkBudget::reference()).unwrap();
        assert!((q.eta_s / (scale * 100.0) - 1.0).abs() < 1e-12);
        assert_eq!(q.eta_u, 100.0);
        let wrong_c = lb.replace("3e8", "2.99792458e8");
        assert!(parse(&format!("{MINIMAL}{wrong_c}")).unwrap().resolve().is_err());
    }
}
