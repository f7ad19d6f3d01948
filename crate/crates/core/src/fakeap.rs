//! Fake access point: clones the legitimate AP, attracts disconnected
//! devices, captures transiting traffic, and injects energy-draining floods.

use std::collections::BTreeMap;
use std::io::Write;

use crate::attacker::FloodSpec;
use crate::error::{Result, SimError};
use crate::netsim::{
    AccessPoint, Binding, CaptureEntry, DeviceId, FapMode, FloodId, FloodOrigin, Simulation,
};

/// Clone a legitimate AP's identity, broadcasting a stronger signal.
///
/// The clone copies SSID, BSSID, channel and security settings verbatim;
/// only the signal differs, by `signal_margin` (which must be positive, or
/// the takeover can never occur).
pub fn clone_ap(legit: &AccessPoint, signal_margin: f64) -> Result<AccessPoint> {
    if legit.is_fake {
        return Err(SimError::CloneOfFake);
    }
    if signal_margin <= 0.0 {
        return Err(SimError::NonPositiveMargin(signal_margin));
    }
    Ok(AccessPoint {
        ssid: legit.ssid.clone(),
        bssid: legit.bssid,
        channel: legit.channel,
        security_profile: legit.security_profile.clone(),
        signal_dbm: legit.signal_dbm + signal_margin,
        is_fake: true,
    })
}

impl Simulation {
    /// Clone the given AP and register the fake on the network, dormant.
    pub fn deploy_fake_ap(&mut self, legit_index: usize, signal_margin: f64) -> Result<usize> {
        let fake = clone_ap(self.ap(legit_index), signal_margin)?;
        let clone_of = fake.bssid;
        let ap_index = self.add_ap(fake);
        self.install_fake_state(ap_index, clone_of);
        Ok(ap_index)
    }

    /// Begin broadcasting the cloned identity.
    pub fn fap_start_broadcast(&mut self) -> Result<()> {
        let fake = self.fake.as_mut().ok_or(SimError::NoFakeAp)?;
        if fake.mode == FapMode::Dormant {
            fake.mode = FapMode::Broadcasting;
        }
        Ok(())
    }

    /// Enable monitor mode; requires the broadcast to have started.
    pub fn fap_enable_monitoring(&mut self) -> Result<()> {
        let fake = self.fake.as_mut().ok_or(SimError::NoFakeAp)?;
        if fake.mode == FapMode::Dormant {
            return Err(SimError::MonitorBeforeBroadcast);
        }
        fake.mode = FapMode::Monitoring;
        Ok(())
    }

    pub fn fap_mode(&self) -> Option<FapMode> {
        self.fake.as_ref().map(|f| f.mode)
    }

    /// BSSID of the AP the fake one clones.
    pub fn fap_clone_of(&self) -> Option<crate::netsim::Bssid> {
        self.fake.as_ref().map(|f| f.clone_of)
    }

    /// Devices currently connected to the fake AP.
    pub fn fap_connected(&self) -> Vec<DeviceId> {
        self.fake.as_ref().map(|f| f.connected.clone()).unwrap_or_default()
    }

    /// Attract a disconnected device toward the fake AP.
    ///
    /// Each attempt draws a connect delay from the profile's range; an
    /// attempt that does not land re-attracts after the full window, at most
    /// three attempts in total before the takeover is reported failed.
    pub fn attract(&mut self, id: DeviceId) -> Result<()> {
        self.start_attract(id)
    }

    /// Capture-log entries for one device from `from_t` onward.
    ///
    /// Requires monitor mode (which itself requires broadcasting).
    pub fn capture(&self, id: DeviceId, from_t: u64) -> Result<Vec<CaptureEntry>> {
        let fake = self.fake.as_ref().ok_or(SimError::NoFakeAp)?;
        if fake.mode != FapMode::Monitoring {
            return Err(SimError::MonitorBeforeBroadcast);
        }
        Ok(fake
            .capture
            .iter()
            .filter(|e| e.device == id && e.t >= from_t)
            .copied()
            .collect())
    }

    /// Total captured packets per device (expanding aggregated entries).
    pub fn capture_packet_counts(&self) -> BTreeMap<DeviceId, u64> {
        let mut counts = BTreeMap::new();
        if let Some(fake) = &self.fake {
            for entry in &fake.capture {
                *counts.entry(entry.device).or_insert(0) += entry.count;
            }
        }
        counts
    }

    /// Inject a malicious flood into a device connected to the fake AP.
    ///
    /// The device's energy follows the fake-AP response curve and every
    /// joule above baseline is attributed to the fake AP.
    pub fn inject_malicious(&mut self, id: DeviceId, spec: FloodSpec) -> Result<FloodId> {
        spec.validate()?;
        let connected = self
            .fake
            .as_ref()
            .is_some_and(|f| f.connected.contains(&id));
        if !connected || !matches!(self.association(id).bound, Binding::Fake(_)) {
            return Err(SimError::NotOnFakeAp(self.device_name(id).to_string()));
        }
        let flood = self.spawn_flood(spec, id, FloodOrigin::FakeAp)?;
        if let Some(fake) = self.fake.as_mut() {
            fake.injections.insert(id, flood);
        }
        Ok(flood)
    }

    /// Write the capture log as CSV: `t,direction,protocol,bytes`, one row
    /// per captured packet, LF line endings.
    pub fn export_capture_csv<W: Write>(&self, writer: &mut W) -> Result<()> {
        let fake = self.fake.as_ref().ok_or(SimError::NoFakeAp)?;
        writeln!(writer, "t,direction,protocol,bytes")?;
        for entry in &fake.capture {
            for _ in 0..entry.count {
                writeln!(
                    writer,
                    "{},{},{},{}",
                    entry.t,
                    entry.direction.label(),
                    entry.protocol.label(),
                    entry.bytes
                )?;
            }
        }
        Ok(())
    }
}
