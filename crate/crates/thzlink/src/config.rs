//! TOML run configuration: strict parsing, documented defaults, and the
//! dotted-path overrides behind `--set`.
//!
//! Every section and key has a default, so the empty config plus a scenario
//! kind is already runnable. Unknown keys anywhere are errors; silent typos
//! in a sweep configuration waste hours.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atmosphere::{AbsorptionModel, Atmosphere, AtmosphereError};
use crate::channel::WindowScan;
use crate::link::{BeamConfig, LinkError, RadioHardware};
use crate::mobility::MobilityClass;
use crate::scenarios::{AlignmentSim, LinkEnv, ScenarioError, UserField};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config needs a [scenario] table with a `kind`")]
    MissingScenario,
    #[error("unknown scenario kind {kind:?}")]
    UnknownScenario { kind: String },
    #[error("config selects scenario {found:?} but the {expected:?} command was invoked")]
    ScenarioMismatch { expected: String, found: String },
    #[error("bad --set override {given:?}: {message}")]
    BadOverride { given: String, message: String },
    #[error("{message}")]
    Invalid { message: String },
    #[error(transparent)]
    Atmosphere(#[from] AtmosphereError),
    #[error(transparent)]
    Link(#[from] LinkError),
}

impl From<ScenarioError> for ConfigError {
    fn from(e: ScenarioError) -> Self {
        ConfigError::Invalid {
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtmosphereConfig {
    pub temperature_k: f64,
    pub pressure_kpa: f64,
    pub relative_humidity_percent: f64,
    /// Absorption line set CSV (`center_hz,strength,half_width_hz`); builtin
    /// lines when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lines_csv: Option<PathBuf>,
    /// Coefficient lookup CSV (`frequency_hz,k_np_per_m` at the reference
    /// vapor density); exclusive with `lines_csv`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_csv: Option<PathBuf>,
    /// Flat continuum added to a line-set model (Np/m at reference density).
    pub continuum_np_per_m: f64,
    /// Vapor density the line strengths / table values are quoted at (g/m^3).
    pub reference_vapor_density_g_m3: f64,
}

impl Default for AtmosphereConfig {
    fn default() -> Self {
        Self {
            temperature_k: 293.15,
            pressure_kpa: 101.325,
            relative_humidity_percent: 50.0,
            lines_csv: None,
            table_csv: None,
            continuum_np_per_m: crate::atmosphere::DEFAULT_CONTINUUM_NP_PER_M,
            reference_vapor_density_g_m3: crate::atmosphere::REFERENCE_VAPOR_DENSITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HardwareConfig {
    pub tx_power_dbm: f64,
    pub noise_figure_db: f64,
    pub system_temperature_k: f64,
    pub tx_beamwidth_deg: f64,
    pub rx_beamwidth_deg: f64,
}

impl Default for HardwareConfig {
    fn default() -> Self {
        Self {
            tx_power_dbm: 10.0,
            noise_figure_db: 10.0,
            system_temperature_k: 290.0,
            tx_beamwidth_deg: 10.0,
            rx_beamwidth_deg: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub f_low_ghz: f64,
    pub f_high_ghz: f64,
    pub step_mhz: f64,
    pub loss_threshold_db: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            f_low_ghz: 100.0,
            f_high_ghz: 3000.0,
            step_mhz: 100.0,
            loss_threshold_db: 120.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapacityConfig {
    pub subchannel_mhz: f64,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        Self {
            subchannel_mhz: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlignmentConfig {
    pub realign_latency_ms: f64,
    pub duration_s: f64,
    pub timestep_ms: f64,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        Self {
            realign_latency_ms: 10.0,
            duration_s: 10.0,
            timestep_ms: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathLossScenario {
    pub distance_m: f64,
}

impl Default for PathLossScenario {
    fn default() -> Self {
        Self { distance_m: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowsScenario {
    pub distance_m: f64,
}

impl Default for WindowsScenario {
    fn default() -> Self {
        Self { distance_m: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateScenario {
    pub distance_m: f64,
    pub bandwidth_ghz: f64,
    pub center_start_ghz: f64,
    pub center_stop_ghz: f64,
    pub center_step_ghz: f64,
}

impl Default for RateScenario {
    fn default() -> Self {
        Self {
            distance_m: 1.0,
            bandwidth_ghz: 10.0,
            center_start_ghz: 130.0,
            center_stop_ghz: 1000.0,
            center_step_ghz: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackhaulScenario {
    pub total_distance_m: f64,
    pub required_rate_gbps: f64,
    pub required_bandwidth_ghz: f64,
}

impl Default for BackhaulScenario {
    fn default() -> Self {
        Self {
            total_distance_m: 1000.0,
            required_rate_gbps: 100.0,
            required_bandwidth_ghz: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KioskCScenario {
    pub distance_m: f64,
    pub bandwidth_ghz: f64,
    pub class: String,
    pub demand_gbps: f64,
    pub delta_start_deg: f64,
    pub delta_stop_deg: f64,
    pub delta_step_deg: f64,
    pub trial_count: usize,
    /// Also write a per-step trace of the first trial at the first grid
    /// point.
    pub emit_trajectory: bool,
}

impl Default for KioskCScenario {
    fn default() -> Self {
        Self {
            distance_m: 1.0,
            bandwidth_ghz: 50.0,
            class: "s1".into(),
            demand_gbps: 10.0,
            delta_start_deg: 1.0,
            delta_stop_deg: 60.0,
            delta_step_deg: 1.0,
            trial_count: 100,
            emit_trajectory: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KioskDScenario {
    pub user_count: usize,
    pub range_min_m: f64,
    pub range_max_m: f64,
    pub sector_half_angle_deg: f64,
    pub class: String,
    pub bandwidth_ghz: f64,
    pub demand_gbps: f64,
    pub delta_start_deg: f64,
    pub delta_stop_deg: f64,
    pub delta_step_deg: f64,
}

impl Default for KioskDScenario {
    fn default() -> Self {
        Self {
            user_count: 30,
            range_min_m: 0.5,
            range_max_m: 5.0,
            sector_half_angle_deg: 60.0,
            class: "s1".into(),
            bandwidth_ghz: 50.0,
            demand_gbps: 10.0,
            delta_start_deg: 1.0,
            delta_stop_deg: 60.0,
            delta_step_deg: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AbsScenario {
    pub user_count: usize,
    pub disk_radius_m: f64,
    pub class: String,
    pub bandwidth_ghz: f64,
    pub demand_gbps: f64,
    pub height_start_m: f64,
    pub height_stop_m: f64,
    pub height_step_m: f64,
    pub delta_start_deg: f64,
    pub delta_stop_deg: f64,
    pub delta_step_deg: f64,
}

impl Default for AbsScenario {
    fn default() -> Self {
        Self {
            user_count: 50,
            disk_radius_m: 100.0,
            class: "s2".into(),
            bandwidth_ghz: 10.0,
            demand_gbps: 2.0,
            height_start_m: 10.0,
            height_stop_m: 200.0,
            height_step_m: 10.0,
            delta_start_deg: 1.0,
            delta_stop_deg: 60.0,
            delta_step_deg: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioConfig {
    PathLoss(PathLossScenario),
    Windows(WindowsScenario),
    Rate(RateScenario),
    Backhaul(BackhaulScenario),
    KioskC(KioskCScenario),
    KioskD(KioskDScenario),
    Abs(AbsScenario),
}

impl ScenarioConfig {
    /// The `kind` string as written in config files and subcommand names.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::PathLoss(_) => "pathloss",
            Self::Windows(_) => "windows",
            Self::Rate(_) => "rate",
            Self::Backhaul(_) => "backhaul",
            Self::KioskC(_) => "kiosk-c",
            Self::KioskD(_) => "kiosk-d",
            Self::Abs(_) => "abs",
        }
    }

    pub fn default_for_kind(kind: &str) -> Result<Self, ConfigError> {
        Self::from_table(toml::Table::from_iter([(
            "kind".to_string(),
            toml::Value::String(kind.to_string()),
        )]))
    }

    /// serde cannot pair `deny_unknown_fields` with a tagged enum, so the
    /// kind is peeled off by hand and each payload keeps strict keys.
    fn from_table(mut table: toml::Table) -> Result<Self, ConfigError> {
        let kind = match table.remove("kind") {
            Some(toml::Value::String(s)) => s,
            Some(_) => return Err(invalid("scenario.kind must be a string")),
            None => return Err(ConfigError::MissingScenario),
        };
        let rest = toml::Value::Table(table);
        Ok(match kind.as_str() {
            "pathloss" => Self::PathLoss(rest.try_into()?),
            "windows" => Self::Windows(rest.try_into()?),
            "rate" => Self::Rate(rest.try_into()?),
            "backhaul" => Self::Backhaul(rest.try_into()?),
            "kiosk-c" => Self::KioskC(rest.try_into()?),
            "kiosk-d" => Self::KioskD(rest.try_into()?),
            "abs" => Self::Abs(rest.try_into()?),
            _ => return Err(ConfigError::UnknownScenario { kind }),
        })
    }

    fn to_table(&self) -> toml::Table {
        let mut table = match self {
            Self::PathLoss(s) => serialize_table(s),
            Self::Windows(s) => serialize_table(s),
            Self::Rate(s) => serialize_table(s),
            Self::Backhaul(s) => serialize_table(s),
            Self::KioskC(s) => serialize_table(s),
            Self::KioskD(s) => serialize_table(s),
            Self::Abs(s) => serialize_table(s),
        };
        table.insert(
            "kind".to_string(),
            toml::Value::String(self.kind().to_string()),
        );
        table
    }
}

fn serialize_table<T: Serialize>(value: &T) -> toml::Table {
    match toml::Value::try_from(value).expect("config sections serialize to tables") {
        toml::Value::Table(t) => t,
        _ => unreachable!("config sections are structs"),
    }
}

/// A whole run: environment sections plus exactly one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub atmosphere: AtmosphereConfig,
    pub hardware: HardwareConfig,
    pub scan: ScanConfig,
    pub capacity: CapacityConfig,
    pub alignment: AlignmentConfig,
    pub scenario: ScenarioConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawConfig {
    seed: u64,
    atmosphere: AtmosphereConfig,
    hardware: HardwareConfig,
    scan: ScanConfig,
    capacity: CapacityConfig,
    alignment: AlignmentConfig,
    scenario: Option<toml::Table>,
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Self::finish(toml::from_str(text)?)
    }

    pub fn from_value(tree: toml::Value) -> Result<Self, ConfigError> {
        Self::finish(tree.try_into()?)
    }

    fn finish(raw: RawConfig) -> Result<Self, ConfigError> {
        let scenario = ScenarioConfig::from_table(raw.scenario.ok_or(ConfigError::MissingScenario)?)?;
        Ok(Self {
            seed: raw.seed,
            atmosphere: raw.atmosphere,
            hardware: raw.hardware,
            scan: raw.scan,
            capacity: raw.capacity,
            alignment: raw.alignment,
            scenario,
        })
    }

    /// Emits TOML that parses back to an identical config.
    pub fn to_toml_string(&self) -> String {
        let mut root = toml::Table::new();
        root.insert("seed".into(), toml::Value::Integer(self.seed as i64));
        root.insert(
            "atmosphere".into(),
            toml::Value::Table(serialize_table(&self.atmosphere)),
        );
        root.insert(
            "hardware".into(),
            toml::Value::Table(serialize_table(&self.hardware)),
        );
        root.insert("scan".into(), toml::Value::Table(serialize_table(&self.scan)));
        root.insert(
            "capacity".into(),
            toml::Value::Table(serialize_table(&self.capacity)),
        );
        root.insert(
            "alignment".into(),
            toml::Value::Table(serialize_table(&self.alignment)),
        );
        root.insert(
            "scenario".into(),
            toml::Value::Table(self.scenario.to_table()),
        );
        root.to_string()
    }

    /// Builds the domain-level environment every scenario consumes.
    pub fn build_env(&self) -> Result<LinkEnv, ConfigError> {
        let a = &self.atmosphere;
        let model = match (&a.lines_csv, &a.table_csv) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "atmosphere.lines_csv and atmosphere.table_csv are mutually exclusive",
                ))
            }
            (Some(path), None) => AbsorptionModel::from_lines_csv(
                path,
                a.continuum_np_per_m,
                a.reference_vapor_density_g_m3,
            )?,
            (None, Some(path)) => {
                AbsorptionModel::from_table_csv(path, a.reference_vapor_density_g_m3)?
            }
            (None, None) => AbsorptionModel::builtin(),
        };
        let atmosphere =
            Atmosphere::new(a.temperature_k, a.pressure_kpa, a.relative_humidity_percent)?;
        let h = &self.hardware;
        let hardware = RadioHardware::new(
            h.tx_power_dbm,
            h.noise_figure_db,
            h.system_temperature_k,
            BeamConfig::along_x(h.tx_beamwidth_deg.to_radians())?,
            BeamConfig::along_x(h.rx_beamwidth_deg.to_radians())?,
        )?;
        let s = &self.scan;
        if !(s.step_mhz > 0.0 && s.f_low_ghz > 0.0 && s.f_high_ghz > s.f_low_ghz) {
            return Err(invalid(format!(
                "bad scan grid: {} GHz to {} GHz step {} MHz",
                s.f_low_ghz, s.f_high_ghz, s.step_mhz
            )));
        }
        if !(self.capacity.subchannel_mhz > 0.0) {
            return Err(invalid("capacity.subchannel_mhz must be positive"));
        }
        let al = &self.alignment;
        if !(al.timestep_ms > 0.0 && al.duration_s > 0.0 && al.realign_latency_ms >= 0.0) {
            return Err(invalid("bad alignment block"));
        }
        Ok(LinkEnv {
            model,
            atmosphere,
            hardware,
            scan: WindowScan {
                f_low_hz: s.f_low_ghz * 1e9,
                f_high_hz: s.f_high_ghz * 1e9,
                step_hz: s.step_mhz * 1e6,
                loss_threshold_db: s.loss_threshold_db,
            },
            subchannel_width_hz: self.capacity.subchannel_mhz * 1e6,
            alignment: AlignmentSim {
                realign_latency_s: al.realign_latency_ms / 1e3,
                duration_s: al.duration_s,
                timestep_s: al.timestep_ms / 1e3,
            },
        })
    }

    /// Scenario-parameter checks that `build_env` cannot see: grids, mobility
    /// class names, user fields, positivity of distances and demands. Runners
    /// may assume these hold.
    pub fn validate_scenario(&self) -> Result<(), ConfigError> {
        fn positive(name: &'static str, value: f64) -> Result<(), ConfigError> {
            if value > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive, got {value}")))
            }
        }
        match &self.scenario {
            ScenarioConfig::PathLoss(s) => positive("scenario.distance_m", s.distance_m),
            ScenarioConfig::Windows(s) => positive("scenario.distance_m", s.distance_m),
            ScenarioConfig::Rate(s) => {
                positive("scenario.distance_m", s.distance_m)?;
                positive("scenario.bandwidth_ghz", s.bandwidth_ghz)?;
                inclusive_grid(s.center_start_ghz, s.center_stop_ghz, s.center_step_ghz)?;
                Ok(())
            }
            ScenarioConfig::Backhaul(s) => {
                positive("scenario.total_distance_m", s.total_distance_m)?;
                positive("scenario.required_rate_gbps", s.required_rate_gbps)?;
                positive("scenario.required_bandwidth_ghz", s.required_bandwidth_ghz)
            }
            ScenarioConfig::KioskC(s) => {
                positive("scenario.distance_m", s.distance_m)?;
                positive("scenario.bandwidth_ghz", s.bandwidth_ghz)?;
                positive("scenario.demand_gbps", s.demand_gbps)?;
                s.delta_grid_rad()?;
                mobility_class(&s.class)?;
                if s.trial_count == 0 {
                    return Err(invalid("scenario.trial_count must be at least 1"));
                }
                Ok(())
            }
            ScenarioConfig::KioskD(s) => {
                positive("scenario.bandwidth_ghz", s.bandwidth_ghz)?;
                positive("scenario.demand_gbps", s.demand_gbps)?;
                s.delta_grid_rad()?;
                s.user_field(self.seed)?;
                Ok(())
            }
            ScenarioConfig::Abs(s) => {
                positive("scenario.bandwidth_ghz", s.bandwidth_ghz)?;
                positive("scenario.demand_gbps", s.demand_gbps)?;
                s.delta_grid_rad()?;
                s.height_grid_m()?;
                s.user_field(self.seed)?;
                Ok(())
            }
        }
    }
}

/// Ascending inclusive grid `start, start+step, ...` up to `stop` (within one
/// part in 1e9 of the step, so a stop that is an exact multiple lands on the
/// grid).
pub fn inclusive_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, ConfigError> {
    if !(step > 0.0) {
        return Err(invalid(format!("grid step must be positive, got {step}")));
    }
    if !(stop >= start) {
        return Err(invalid(format!("grid stop {stop} below start {start}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

pub fn mobility_class(name: &str) -> Result<MobilityClass, ConfigError> {
    MobilityClass::from_name(name)
        .ok_or_else(|| invalid(format!("unknown mobility class {name:?} (s1, s2, s3, static)")))
}

impl KioskCScenario {
    pub fn delta_grid_rad(&self) -> Result<Vec<f64>, ConfigError> {
        degree_grid(self.delta_start_deg, self.delta_stop_deg, self.delta_step_deg)
    }

    pub fn trial_seeds(&self, master_seed: u64) -> Vec<u64> {
        (0..self.trial_count).map(|i| master_seed ^ i as u64).collect()
    }
}

impl KioskDScenario {
    pub fn delta_grid_rad(&self) -> Result<Vec<f64>, ConfigError> {
        degree_grid(self.delta_start_deg, self.delta_stop_deg, self.delta_step_deg)
    }

    pub fn user_field(&self, master_seed: u64) -> Result<UserField, ConfigError> {
        Ok(UserField::sector(
            self.user_count,
            self.range_min_m,
            self.range_max_m,
            self.sector_half_angle_deg.to_radians(),
            mobility_class(&self.class)?,
            master_seed,
        )?)
    }
}

impl AbsScenario {
    pub fn delta_grid_rad(&self) -> Result<Vec<f64>, ConfigError> {
        degree_grid(self.delta_start_deg, self.delta_stop_deg, self.delta_step_deg)
    }

    pub fn height_grid_m(&self) -> Result<Vec<f64>, ConfigError> {
        if !(self.height_start_m > 0.0) {
            return Err(invalid("abs height grid must start above ground"));
        }
        inclusive_grid(self.height_start_m, self.height_stop_m, self.height_step_m)
    }

    pub fn user_field(&self, master_seed: u64) -> Result<UserField, ConfigError> {
        Ok(UserField::disk(
            self.user_count,
            self.disk_radius_m,
            mobility_class(&self.class)?,
            master_seed,
        )?)
    }
}

fn degree_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, ConfigError> {
    if !(start > 0.0) {
        return Err(invalid(format!(
            "beamwidth grid must start above 0 degrees, got {start}"
        )));
    }
    Ok(inclusive_grid(start, stop, step)?
        .into_iter()
        .map(f64::to_radians)
        .collect())
}

/// Applies `--set key.path=value` overrides onto a parsed TOML tree.
///
/// Values parse as integer, then float, then bool, and fall back to string.
/// Intermediate tables are created on demand; overriding through a non-table
/// is an error rather than a silent replacement.
pub fn apply_overrides(root: &mut toml::Table, sets: &[String]) -> Result<(), ConfigError> {
    for given in sets {
        let (path, raw_value) = given.split_once('=').ok_or_else(|| ConfigError::BadOverride {
            given: given.clone(),
            message: "expected key.path=value".into(),
        })?;
        let segments: Vec<&str> = path.split('.').collect();
        if segments.iter().any(|s| s.is_empty()) {
            return Err(ConfigError::BadOverride {
                given: given.clone(),
                message: "empty path segment".into(),
            });
        }
        let mut table = &mut *root;
        for segment in &segments[..segments.len() - 1] {
            table = table
                .entry(segment.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                .as_table_mut()
                .ok_or_else(|| ConfigError::BadOverride {
                    given: given.clone(),
                    message: format!("{segment} is not a table"),
                })?;
        }
        table.insert(segments[segments.len() - 1].to_string(), parse_override(raw_value));
    }
    Ok(())
}

fn parse_override(raw: &str) -> toml::Value {
    if let Ok(i) = raw.parse::<i64>() {
        return toml::Value::Integer(i);
    }
    if let Ok(f) = raw.parse::<f64>() {
        return toml::Value::Float(f);
    }
    match raw {
        "true" => toml::Value::Boolean(true),
        "false" => toml::Value::Boolean(false),
        _ => toml::Value::String(raw.to_string()),
    }
}
