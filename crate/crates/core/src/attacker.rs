//! Adversary operations: network and port scanning, and flood generation.

use serde::{Deserialize, Serialize};

use crate::device::{self, DeviceProfile, PayloadClass, PortState, Protocol};
use crate::error::{Result, SimError};
use crate::netsim::{Binding, DeviceId, FloodId, FloodOrigin, Simulation, TcpFlag};

/// Destination selector of a flood: a concrete port or a port-state class,
/// which resolves to the lowest-numbered port in that state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortSelector {
    Port(u32),
    Class(PortState),
}

/// Description of one flood attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloodSpec {
    pub protocol: Protocol,
    /// Target device name.
    pub target: String,
    /// Absent for ICMP; defaults to the open port class for TCP/UDP.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dst_port: Option<PortSelector>,
    /// Attack rate in packets per second.
    pub rate: u32,
    pub payload: PayloadClass,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tcp_flags: Vec<TcpFlag>,
    /// Attack window in minutes, 8 to 30.
    pub max_duration_min: u32,
}

impl FloodSpec {
    pub fn new(protocol: Protocol, target: &str, rate: u32, payload: PayloadClass) -> Self {
        let tcp_flags = if protocol == Protocol::TcpSyn {
            vec![TcpFlag::Syn]
        } else {
            Vec::new()
        };
        FloodSpec {
            protocol,
            target: target.to_string(),
            dst_port: None,
            rate,
            payload,
            tcp_flags,
            max_duration_min: 8,
        }
    }

    pub fn with_port(mut self, selector: PortSelector) -> Self {
        self.dst_port = Some(selector);
        self
    }

    pub fn with_duration_min(mut self, minutes: u32) -> Self {
        self.max_duration_min = minutes;
        self
    }

    /// Structural validation, independent of any device.
    pub fn validate(&self) -> Result<()> {
        if self.protocol == Protocol::Icmp && self.dst_port.is_some() {
            return Err(SimError::InvalidFloodSpec(
                "ICMP floods carry no port selector".to_string(),
            ));
        }
        device::check_rate(self.rate)?;
        if !(8..=30).contains(&self.max_duration_min) {
            return Err(SimError::InvalidFloodSpec(format!(
                "max_duration_min {} outside [8, 30]",
                self.max_duration_min
            )));
        }
        Ok(())
    }

    /// Resolve the targeted port's state class against a device profile.
    pub fn resolve_port_state(&self, profile: &DeviceProfile) -> Result<PortState> {
        self.validate()?;
        if self.protocol == Protocol::Icmp {
            // No port; the device answers echo requests at full capacity.
            return Ok(PortState::Open);
        }
        match self.dst_port {
            None => Ok(PortState::Open),
            Some(PortSelector::Port(port)) => {
                Ok(profile.port_table.state(self.protocol, port))
            }
            Some(PortSelector::Class(class)) => {
                if profile.port_table.lowest_in_state(self.protocol, class).is_none() {
                    return Err(SimError::InvalidFloodSpec(format!(
                        "device has no {} {} port to target",
                        self.protocol.label(),
                        class.label()
                    )));
                }
                Ok(class)
            }
        }
    }
}

/// Status of one device in a network scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub device: String,
    pub status: String,
    pub ip: String,
    pub mac: String,
}

/// Result of scanning the network for device status, IPs and MACs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub t: u64,
    pub entries: Vec<ScanEntry>,
}

/// Result of a TCP/UDP port scan of one device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortScanReport {
    pub device: String,
    pub protocol: Protocol,
    pub scanned_range: (u32, u32),
    pub open: u32,
    pub closed: u32,
    pub filtered: u32,
    pub open_filtered: u32,
}

impl Simulation {
    /// Report every device's online/offline status, IP and MAC as of now.
    ///
    /// Scans take one tick, matching the paper's treatment of scans as
    /// instantaneous context.
    pub fn scan_network(&mut self) -> Result<ScanReport> {
        if !self.attacker_joined() {
            return Err(SimError::AttackerOffNetwork);
        }
        let entries = self
            .device_ids()
            .map(|id| {
                let online = self.association(id).bound.is_connected();
                ScanEntry {
                    device: self.device_name(id).to_string(),
                    status: if online { "online" } else { "offline" }.to_string(),
                    ip: self.ip_of(self.device_node(id)),
                    mac: self.mac_of(self.device_node(id)).to_string(),
                }
            })
            .collect();
        let t = self.now();
        self.advance_by(1)?;
        Ok(ScanReport { t, entries })
    }

    /// Scan a port range of one device; the device must be online.
    pub fn scan_ports(
        &mut self,
        id: DeviceId,
        protocol: Protocol,
        range: Option<(u32, u32)>,
    ) -> Result<PortScanReport> {
        if !self.attacker_joined() {
            return Err(SimError::AttackerOffNetwork);
        }
        if !self.association(id).bound.is_connected() {
            return Err(SimError::HostDown(self.device_name(id).to_string()));
        }
        let profile = self.device_profile(id);
        let (lo, hi) = range.unwrap_or_else(|| profile.port_table.full_range(protocol));
        let counts = profile.port_table.count_range(protocol, lo, hi);
        let report = PortScanReport {
            device: self.device_name(id).to_string(),
            protocol,
            scanned_range: (lo, hi),
            open: counts.open,
            closed: counts.closed,
            filtered: counts.filtered,
            open_filtered: counts.open_filtered,
        };
        self.advance_by(1)?;
        Ok(report)
    }

    /// Launch a flood from the attacker node.
    pub fn launch_flood(&mut self, spec: FloodSpec) -> Result<FloodId> {
        spec.validate()?;
        let target = self.device_by_name(&spec.target)?;
        self.spawn_flood(spec, target, FloodOrigin::Attacker)
    }

    /// Whether a device is currently bound to the legitimate AP.
    pub fn on_legitimate_ap(&self, id: DeviceId) -> bool {
        matches!(self.association(id).bound, Binding::Legitimate(_))
    }
}
