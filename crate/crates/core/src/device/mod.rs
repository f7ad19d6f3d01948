//! Victim-device behaviour: port tables, packet-reception saturation,
//! disconnection thresholds with survival durations, and the per-second
//! energy-response model.

mod profiles;

pub use profiles::{arduino_profile, builtin_profile, raspberry_pi_profile, PROFILE_NAMES};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Hard ceiling on attack rates the simulator accepts, in packets per second.
pub const RATE_CAP: u32 = 100_000;

/// State of a single scanned port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortState {
    Open,
    Closed,
    Filtered,
    OpenFiltered,
}

impl PortState {
    pub fn label(self) -> &'static str {
        match self {
            PortState::Open => "open",
            PortState::Closed => "closed",
            PortState::Filtered => "filtered",
            PortState::OpenFiltered => "open_filtered",
        }
    }
}

impl std::str::FromStr for PortState {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "open" => Ok(PortState::Open),
            "closed" => Ok(PortState::Closed),
            "filtered" => Ok(PortState::Filtered),
            "open_filtered" | "open-filtered" => Ok(PortState::OpenFiltered),
            other => Err(format!("unknown port state: {other}")),
        }
    }
}

/// Transport protocol of an attack or scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    #[serde(rename = "tcp")]
    TcpSyn,
    Udp,
    Icmp,
}

impl Protocol {
    pub fn label(self) -> &'static str {
        match self {
            Protocol::TcpSyn => "tcp",
            Protocol::Udp => "udp",
            Protocol::Icmp => "icmp",
        }
    }

    /// Protocols that carry a destination port.
    pub fn has_ports(self) -> bool {
        !matches!(self, Protocol::Icmp)
    }
}

impl std::str::FromStr for Protocol {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tcp" | "tcp_syn" | "tcp-syn" => Ok(Protocol::TcpSyn),
            "udp" => Ok(Protocol::Udp),
            "icmp" | "icmp_echo" | "icmp-echo" => Ok(Protocol::Icmp),
            other => Err(format!("unknown protocol: {other}")),
        }
    }
}

/// Attack payload class: no payload (0 B) or high payload (1500 B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadClass {
    Np,
    Hp,
}

impl PayloadClass {
    pub fn bytes(self) -> u32 {
        match self {
            PayloadClass::Np => 0,
            PayloadClass::Hp => 1500,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PayloadClass::Np => "np",
            PayloadClass::Hp => "hp",
        }
    }
}

impl std::str::FromStr for PayloadClass {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "np" => Ok(PayloadClass::Np),
            "hp" => Ok(PayloadClass::Hp),
            other => Err(format!("unknown payload class: {other} (expected np or hp)")),
        }
    }
}

/// Per-protocol table of port states.
///
/// Ports are simulated identifiers starting at 1; the scanned space of a
/// table may exceed the 16-bit transport range when the calibrated scan
/// counts require it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortTable {
    tcp: BTreeMap<u32, PortState>,
    udp: BTreeMap<u32, PortState>,
}

/// Tallies of port states over a scanned range.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortCounts {
    pub open: u32,
    pub closed: u32,
    pub filtered: u32,
    pub open_filtered: u32,
}

impl PortCounts {
    pub fn total(&self) -> u32 {
        self.open + self.closed + self.filtered + self.open_filtered
    }
}

impl PortTable {
    pub fn new(tcp: BTreeMap<u32, PortState>, udp: BTreeMap<u32, PortState>) -> Self {
        Self { tcp, udp }
    }

    fn map(&self, protocol: Protocol) -> &BTreeMap<u32, PortState> {
        match protocol {
            Protocol::Udp => &self.udp,
            // ICMP carries no ports; scanning it is a TCP-table question that
            // callers reject earlier. Default to TCP for state lookups.
            Protocol::TcpSyn | Protocol::Icmp => &self.tcp,
        }
    }

    /// State of a single port, `Filtered` when outside the table.
    pub fn state(&self, protocol: Protocol, port: u32) -> PortState {
        self.map(protocol).get(&port).copied().unwrap_or(PortState::Filtered)
    }

    /// Lowest-numbered port in the given state, if any.
    pub fn lowest_in_state(&self, protocol: Protocol, state: PortState) -> Option<u32> {
        self.map(protocol)
            .iter()
            .find(|(_, s)| **s == state)
            .map(|(p, _)| *p)
    }

    /// Number of ports the table defines for a protocol.
    pub fn port_space(&self, protocol: Protocol) -> u32 {
        self.map(protocol).len() as u32
    }

    /// Full scanned range of the table: (lowest, highest) port id.
    pub fn full_range(&self, protocol: Protocol) -> (u32, u32) {
        let m = self.map(protocol);
        match (m.keys().next(), m.keys().next_back()) {
            (Some(lo), Some(hi)) => (*lo, *hi),
            _ => (0, 0),
        }
    }

    /// Tally port states over an inclusive range.
    pub fn count_range(&self, protocol: Protocol, lo: u32, hi: u32) -> PortCounts {
        let mut counts = PortCounts::default();
        if lo > hi {
            return counts;
        }
        for (_, state) in self.map(protocol).range(lo..=hi) {
            match state {
                PortState::Open => counts.open += 1,
                PortState::Closed => counts.closed += 1,
                PortState::Filtered => counts.filtered += 1,
                PortState::OpenFiltered => counts.open_filtered += 1,
            }
        }
        counts
    }

    /// Tally over the whole table.
    pub fn count_all(&self, protocol: Protocol) -> PortCounts {
        let (lo, hi) = self.full_range(protocol);
        self.count_range(protocol, lo, hi)
    }
}

/// Calibrated constants describing one victim device class.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile {
    /// Profile name ("raspberry_pi", "arduino", or a custom label).
    pub device_class: String,
    pub port_table: PortTable,
    /// Idle energy band in joules per second: (lo, hi).
    pub e_base: (f64, f64),
    /// Per-protocol attack-energy ceiling in J/s, toward which the
    /// energy response saturates on open / open-filtered ports.
    pub e_max: BTreeMap<Protocol, f64>,
    /// Minimum attack rate (sent PPS) that disconnects the device,
    /// per payload class. `None` means no finite rate disconnects it.
    pub ar_threshold: BTreeMap<PayloadClass, Option<u32>>,
    /// Average survival duration in minutes at the threshold rate,
    /// per (protocol, payload). Absent entries survive any rate.
    pub sd_ref: BTreeMap<(Protocol, PayloadClass), f64>,
    /// Sent rate up to which reception is lossless, in PPS.
    pub reception_linear_limit: f64,
    /// Curvature of the logarithmic reception region, in PPS.
    pub reception_gamma: f64,
    /// Fake-AP connect delay range in minutes: (min, max).
    pub fap_connect_range: (f64, f64),
    /// Probability that a single attract attempt lands.
    pub fap_connect_reliability: f64,
    /// Energy level in J/s that steady-state fake-AP injection exceeds.
    pub fap_e_level: f64,
    /// Nominal supply voltage used by the meter, in volts.
    pub nominal_voltage: f64,
}

/// Headroom factor between the reported fake-AP energy level and the
/// saturation ceiling the injection curve approaches.
const FAP_CEILING_HEADROOM: f64 = 1.05;

/// Span attenuation applied when an attack targets closed or filtered ports.
const CLOSED_PORT_ATTENUATION: f64 = 0.5;

/// Fraction of the idle-to-ceiling span reached at the calibration point of
/// the saturating energy curve (1 - e^-3).
const SATURATION_POINT: f64 = 3.0;

/// Relative amplitude of the deterministic jitter applied to UDP floods.
const UDP_JITTER_FRACTION: f64 = 0.05;

impl DeviceProfile {
    pub fn e_base_mid(&self) -> f64 {
        0.5 * (self.e_base.0 + self.e_base.1)
    }

    /// Sent-rate threshold for a payload class; `None` when unbounded.
    pub fn threshold_rate(&self, payload: PayloadClass) -> Option<u32> {
        self.ar_threshold.get(&payload).copied().flatten()
    }

    /// Highest EC-DDoS rate that stays below the disconnect threshold.
    pub fn near_threshold_rate(&self, payload: PayloadClass) -> u32 {
        match self.threshold_rate(payload) {
            Some(thr) => thr.saturating_sub(1),
            None => RATE_CAP,
        }
    }

    /// Received-domain image of the disconnect threshold: the reception rate
    /// observed when the attacker sends exactly the threshold rate.
    pub fn threshold_received(&self, payload: PayloadClass) -> Option<f64> {
        self.threshold_rate(payload)
            .map(|thr| reception_rate(thr as f64, self))
    }

    /// Energy ceiling for an attack, after the port-state attenuation.
    pub fn attack_ceiling(&self, protocol: Protocol, port_state_class: PortState) -> f64 {
        let base = self.e_base_mid();
        let ceiling = *self
            .e_max
            .get(&protocol)
            .expect("profile defines a ceiling per protocol");
        match port_state_class {
            PortState::Closed | PortState::Filtered => {
                base + CLOSED_PORT_ATTENUATION * (ceiling - base)
            }
            PortState::Open | PortState::OpenFiltered => ceiling,
        }
    }

    /// Ceiling the fake-AP injection curve saturates toward.
    pub fn fap_ceiling(&self) -> f64 {
        self.fap_e_level * FAP_CEILING_HEADROOM
    }

    /// Rate constant of the saturating energy curve, in received PPS.
    ///
    /// Chosen so the curve attains 1 - e^-3 of its span at the received-domain
    /// image of the NP disconnect threshold (the rate cap when unbounded),
    /// which places every per-protocol ceiling within reach of a legal
    /// below-threshold flood.
    pub fn energy_kappa(&self) -> f64 {
        let anchor = self
            .threshold_received(PayloadClass::Np)
            .unwrap_or_else(|| reception_rate(RATE_CAP as f64, self));
        anchor / SATURATION_POINT
    }
}

/// One per-second meter reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: u64,
    pub voltage: f64,
    pub current: f64,
    pub watts: f64,
    pub joules: f64,
}

impl EnergySample {
    /// Build a sample from the energy drawn over a 1-second window.
    pub fn from_joules(t: u64, joules: f64, profile: &DeviceProfile) -> Self {
        let watts = joules; // 1-second window
        let voltage = profile.nominal_voltage;
        EnergySample {
            t,
            voltage,
            current: watts / voltage,
            watts,
            joules,
        }
    }
}

/// Reception saturation: lossless up to the linear limit, then logarithmic.
///
/// `received = r_lin + gamma * ln(1 + (sent - r_lin)/gamma)` above the limit.
pub fn reception_rate(sent: f64, profile: &DeviceProfile) -> f64 {
    debug_assert!(sent >= 0.0);
    let r_lin = profile.reception_linear_limit;
    if sent <= r_lin {
        sent
    } else {
        let gamma = profile.reception_gamma;
        r_lin + gamma * ((sent - r_lin) / gamma).ln_1p()
    }
}

/// Outcome of evaluating a flood against the disconnect model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DisconnectOutcome {
    Survives,
    /// Disconnects this many minutes after the attack started.
    DisconnectsAt(f64),
}

/// Disconnect model: survives below the received-domain threshold; above it
/// the survival duration scales inversely with the received rate, anchored at
/// the calibrated reference value.
pub fn disconnect_outcome(
    received: f64,
    protocol: Protocol,
    payload: PayloadClass,
    max_duration_min: f64,
    profile: &DeviceProfile,
) -> DisconnectOutcome {
    let Some(sd_ref) = profile.sd_ref.get(&(protocol, payload)).copied() else {
        return DisconnectOutcome::Survives;
    };
    let Some(thr_received) = profile.threshold_received(payload) else {
        return DisconnectOutcome::Survives;
    };
    if received < thr_received {
        return DisconnectOutcome::Survives;
    }
    let sd = (sd_ref * thr_received / received).min(max_duration_min);
    DisconnectOutcome::DisconnectsAt(sd)
}

/// Saturating energy response to an attack, before UDP jitter.
///
/// `E = base + (ceiling - base) * (1 - exp(-received/kappa))`.
pub fn attack_energy_rate(
    received: f64,
    protocol: Protocol,
    port_state_class: PortState,
    profile: &DeviceProfile,
) -> f64 {
    let base = profile.e_base_mid();
    let ceiling = profile.attack_ceiling(protocol, port_state_class);
    saturating_energy(received, base, ceiling, profile.energy_kappa())
}

/// Energy response while associated to the fake AP under malicious injection:
/// the same saturating curve, aimed at the fake-AP ceiling.
pub fn fap_energy_rate(received: f64, profile: &DeviceProfile) -> f64 {
    let base = profile.e_base_mid();
    saturating_energy(received, base, profile.fap_ceiling(), profile.energy_kappa())
}

fn saturating_energy(received: f64, base: f64, ceiling: f64, kappa: f64) -> f64 {
    base + (ceiling - base) * (1.0 - (-received / kappa).exp())
}

/// Deterministic fluctuation for UDP floods: `jitter` in [-1, 1] displaces the
/// sample by up to 5% of the span above baseline.
pub fn apply_udp_jitter(energy: f64, jitter: f64, profile: &DeviceProfile) -> f64 {
    let span = energy - profile.e_base_mid();
    energy + jitter * UDP_JITTER_FRACTION * span
}

/// Idle draw inside the baseline band; `frac` in [0, 1).
pub fn baseline_energy(frac: f64, profile: &DeviceProfile) -> f64 {
    profile.e_base.0 + frac * (profile.e_base.1 - profile.e_base.0)
}

/// Validate a rate against the simulator cap.
pub fn check_rate(rate: u32) -> Result<()> {
    if rate > RATE_CAP {
        return Err(SimError::RateAboveCap { rate, cap: RATE_CAP });
    }
    Ok(())
}

#[cfg(test)]
mod tests;
