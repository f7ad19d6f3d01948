//! Scenario configuration: a single TOML file with an embedded schema
//! version, validated as a whole (every violation reported, not just the
//! first).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::campaign::{AttackTemplate, CampaignPlan, FapPlan};
use crate::device::{builtin_profile, DeviceProfile, PayloadClass, PortState, Protocol};
use crate::error::{Result, SimError};
use crate::netsim::{AccessPoint, Bssid};

pub const SCHEMA_VERSION: u32 = 1;

/// One victim device: a built-in profile reference plus optional inline
/// overrides of its calibrated constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceConfig {
    /// Built-in profile name: "raspberry_pi" or "arduino".
    pub profile: String,
    /// Device name; defaults to the profile name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<ProfileOverrides>,
}

/// Inline overrides of selected profile constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ProfileOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_base: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fap_e_level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fap_connect_reliability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_voltage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApConfig {
    pub ssid: String,
    pub bssid: Bssid,
    pub channel: u8,
    pub security: String,
    pub signal_dbm: f64,
}

impl Default for ApConfig {
    fn default() -> Self {
        let ap = crate::campaign::default_ap();
        ApConfig {
            ssid: ap.ssid,
            bssid: ap.bssid,
            channel: ap.channel,
            security: ap.security_profile,
            signal_dbm: ap.signal_dbm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub baseline_minutes: u32,
    pub ec_minutes: u32,
    pub max_attack_minutes: u32,
    pub attacks: Vec<AttackTemplate>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            baseline_minutes: 30,
            ec_minutes: 30,
            max_attack_minutes: 8,
            attacks: vec![AttackTemplate {
                protocol: Protocol::Icmp,
                payload: PayloadClass::Np,
                port_class: PortState::Open,
            }],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FapConfig {
    pub enabled: bool,
    pub signal_margin: f64,
    pub injection_protocol: Protocol,
    pub injection_payload: PayloadClass,
    pub injection_minutes: u32,
}

impl Default for FapConfig {
    fn default() -> Self {
        let plan = FapPlan::default();
        FapConfig {
            enabled: plan.enabled,
            signal_margin: plan.signal_margin,
            injection_protocol: plan.injection_protocol,
            injection_payload: plan.injection_payload,
            injection_minutes: plan.injection_minutes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".to_string(), "json".to_string()]
}

/// The full scenario configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Mandatory: every run is seeded for determinism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub devices: Vec<DeviceConfig>,
    #[serde(default)]
    pub ap: ApConfig,
    #[serde(default)]
    pub campaign: CampaignConfig,
    #[serde(default)]
    pub fap: FapConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            seed: None,
            devices: vec![
                DeviceConfig {
                    profile: "raspberry_pi".to_string(),
                    name: None,
                    overrides: None,
                },
                DeviceConfig {
                    profile: "arduino".to_string(),
                    name: None,
                    overrides: None,
                },
            ],
            ap: ApConfig::default(),
            campaign: CampaignConfig::default(),
            fap: FapConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ScenarioConfig {
    /// Default scenario with a seed filled in.
    pub fn default_with_seed(seed: u64) -> Self {
        ScenarioConfig {
            seed: Some(seed),
            ..ScenarioConfig::default()
        }
    }

    /// Validate the whole config, reporting every violation.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            violations.push(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.seed.is_none() {
            violations.push("seed is required: determinism is mandatory".to_string());
        }
        if self.devices.is_empty() {
            violations.push("device list is empty".to_string());
        }
        for device in &self.devices {
            if builtin_profile(&device.profile).is_none() {
                violations.push(format!("unknown profile: {}", device.profile));
            }
            if let Some(overrides) = &device.overrides {
                if let Some((lo, hi)) = overrides.e_base {
                    if lo > hi {
                        violations.push(format!(
                            "device {}: e_base lo {lo} exceeds hi {hi}",
                            device.profile
                        ));
                    }
                }
                if let Some(p) = overrides.fap_connect_reliability {
                    if !(0.0..=1.0).contains(&p) {
                        violations
                            .push(format!("device {}: reliability {p} outside [0, 1]", device.profile));
                    }
                }
            }
        }
        if !(1..=14).contains(&self.ap.channel) {
            violations.push(format!("ap.channel {} outside 1-14", self.ap.channel));
        }
        if self.campaign.baseline_minutes < 30 {
            violations.push(format!(
                "campaign.baseline_minutes {} below the 30-minute minimum",
                self.campaign.baseline_minutes
            ));
        }
        if !(8..=30).contains(&self.campaign.ec_minutes) {
            violations.push(format!(
                "campaign.ec_minutes {} outside [8, 30]",
                self.campaign.ec_minutes
            ));
        }
        if !(8..=30).contains(&self.campaign.max_attack_minutes) {
            violations.push(format!(
                "campaign.max_attack_minutes {} outside [8, 30]",
                self.campaign.max_attack_minutes
            ));
        }
        if self.campaign.attacks.is_empty() {
            violations.push("campaign.attacks is empty".to_string());
        }
        if self.fap.enabled {
            if self.fap.signal_margin <= 0.0 {
                violations.push("fap.signal_margin must be positive".to_string());
            }
            if !(8..=30).contains(&self.fap.injection_minutes) {
                violations.push(format!(
                    "fap.injection_minutes {} outside [8, 30]",
                    self.fap.injection_minutes
                ));
            }
        }
        for format in &self.output.formats {
            if format != "csv" && format != "json" {
                violations.push(format!("unknown output format: {format}"));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(SimError::ConfigInvalid(violations))
        }
    }

    /// The legitimate access point described by this config.
    pub fn access_point(&self) -> AccessPoint {
        AccessPoint {
            ssid: self.ap.ssid.clone(),
            bssid: self.ap.bssid,
            channel: self.ap.channel,
            security_profile: self.ap.security.clone(),
            signal_dbm: self.ap.signal_dbm,
            is_fake: false,
        }
    }

    /// Resolve every device entry to a (name, profile) pair.
    pub fn resolved_devices(&self) -> Result<Vec<(String, DeviceProfile)>> {
        let mut devices = Vec::new();
        for entry in &self.devices {
            let mut profile = builtin_profile(&entry.profile)
                .ok_or_else(|| SimError::UnknownDevice(entry.profile.clone()))?;
            if let Some(overrides) = &entry.overrides {
                if let Some(band) = overrides.e_base {
                    profile.e_base = band;
                }
                if let Some(level) = overrides.fap_e_level {
                    profile.fap_e_level = level;
                }
                if let Some(p) = overrides.fap_connect_reliability {
                    profile.fap_connect_reliability = p;
                }
                if let Some(v) = overrides.nominal_voltage {
                    profile.nominal_voltage = v;
                }
            }
            let name = entry.name.clone().unwrap_or_else(|| entry.profile.clone());
            devices.push((name, profile));
        }
        Ok(devices)
    }

    /// Build the campaign plan, optionally overriding the seed.
    pub fn to_plan(&self, seed_override: Option<u64>) -> Result<CampaignPlan> {
        self.validate()?;
        let seed = seed_override
            .or(self.seed)
            .expect("validate() enforces a seed");
        Ok(CampaignPlan {
            devices: self.resolved_devices()?,
            ap: self.access_point(),
            baseline_minutes: self.campaign.baseline_minutes,
            ec_minutes: self.campaign.ec_minutes,
            attack_matrix: self.campaign.attacks.clone(),
            fap: FapPlan {
                enabled: self.fap.enabled,
                signal_margin: self.fap.signal_margin,
                injection_protocol: self.fap.injection_protocol,
                injection_payload: self.fap.injection_payload,
                injection_minutes: self.fap.injection_minutes,
            },
            max_attack_minutes: self.campaign.max_attack_minutes,
            seed,
        })
    }
}

/// Parse and validate a scenario config file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| SimError::ConfigParse(format!("{}: {e}", path.display())))?;
    parse_config(&content)
}

/// Parse and validate config text. Parse errors carry the offending line.
pub fn parse_config(content: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig =
        toml::from_str(content).map_err(|e| SimError::ConfigParse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Serialize a config; `load_config` of the result round-trips.
pub fn write_config(config: &ScenarioConfig) -> Result<String> {
    toml::to_string_pretty(config).map_err(|e| SimError::ConfigParse(e.to_string()))
}
