//! Deterministic discrete-event simulator of energy cyber attacks against
//! WiFi smart-healthcare devices.
//!
//! The simulator models victim devices' connectivity and per-second energy
//! consumption under three attack families and reproduces the calibrated
//! quantities of the underlying testbed:
//!
//! - **DDoS** floods that disconnect a victim from its access point, with
//!   threshold attack rates and survival durations;
//! - **EC-DDoS** floods kept below the disconnect threshold, maximizing the
//!   victim's joules per second;
//! - **Fake access point** (evil twin) takeover: cloning the legitimate AP,
//!   attracting disconnected devices, capturing their traffic, and injecting
//!   malicious floods.
//!
//! A campaign orchestrator runs the full attack sequence (baseline, scan,
//! EC-DDoS, DDoS disconnect, fake-AP takeover) and reports energy traces,
//! thresholds, survival durations and the attack-energy attribution split.
//!
//! Everything is seeded: identical scenario configuration and seed produce
//! byte-identical traces and reports.
//!
//! See the crate examples for one runnable program per capability, and the
//! `ec-attack-sim` binary for the command-line front end.

pub mod attacker;
pub mod campaign;
pub mod cli;
pub mod config;
pub mod device;
pub mod error;
pub mod fakeap;
pub mod netsim;
pub mod report;

pub use attacker::{FloodSpec, PortScanReport, PortSelector, ScanReport};
pub use campaign::{CampaignPlan, CampaignReport, ThresholdResult};
pub use config::ScenarioConfig;
pub use device::{DeviceProfile, EnergySample, PayloadClass, PortState, Protocol, RATE_CAP};
pub use error::{Result, SimError};
pub use netsim::{AccessPoint, Binding, DeviceId, FloodId, Simulation};
