//! The simulation engine: one logical timeline over which floods, meters,
//! association changes and fake-AP activity are interleaved deterministically.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::attacker::FloodSpec;
use crate::device::{
    self, DeviceProfile, DisconnectOutcome, EnergySample, PortState, Protocol,
};
use crate::error::{Result, SimError};

use super::{
    derive_stream_seed, AccessPoint, AssociationState, Binding, Bssid, EventHandle, EventQueue,
    Packet, SimEvent,
};

/// Index of a registered device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DeviceId(pub usize);

/// Identifier of any node on the simulated network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

/// Handle to a launched flood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FloodId(pub u32);

/// Who generates a flood; drives both the energy curve and the
/// attribution accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FloodOrigin {
    Attacker,
    FakeAp,
}

/// Result of delivering a single packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeliveryOutcome {
    Delivered,
    Dropped,
}

/// Fake access point lifecycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FapMode {
    Dormant,
    Broadcasting,
    Monitoring,
}

/// Direction of a captured packet relative to the monitored device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaptureDirection {
    Inbound,
    Outbound,
}

impl CaptureDirection {
    pub fn label(self) -> &'static str {
        match self {
            CaptureDirection::Inbound => "inbound",
            CaptureDirection::Outbound => "outbound",
        }
    }
}

/// Aggregated capture-log record: `count` packets sharing one summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaptureEntry {
    pub t: u64,
    pub device: DeviceId,
    pub direction: CaptureDirection,
    pub protocol: Protocol,
    pub bytes: u32,
    pub count: u64,
}

/// Frozen counters of a flood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloodCounters {
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    /// Packets the victim actually processed, after reception saturation.
    pub processed: f64,
    /// Tick at which the flood disconnected its target, if it did.
    pub disconnected_target_at: Option<u64>,
}

/// One per-second trace record for a device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub t: u64,
    pub joules: f64,
    pub received_pps: f64,
    pub associated: bool,
    /// Origin of the dominant flood during this second, if any.
    pub source: Option<FloodOrigin>,
}

/// An event fired by [`Simulation::advance`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiredEvent {
    pub t: u64,
    pub event: SimEvent,
}

#[derive(Debug)]
pub(crate) struct FloodState {
    pub spec: FloodSpec,
    pub target: DeviceId,
    pub origin: FloodOrigin,
    /// Concrete destination port and its state class, resolved at launch.
    pub port_state: PortState,
    pub start: u64,
    pub duration_secs: u64,
    pub active: bool,
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub processed: f64,
    pub disconnected_target_at: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractAttempt {
    pub attempt: u32,
    pub delay_secs: u64,
    pub succeeded: bool,
}

#[derive(Debug, Default)]
pub(crate) struct AttractState {
    pub attempts: Vec<AttractAttempt>,
    pub connected_at: Option<u64>,
    pub failed: bool,
}

#[derive(Debug)]
pub(crate) struct FakeApState {
    pub ap: usize,
    pub clone_of: Bssid,
    pub mode: FapMode,
    pub connected: Vec<DeviceId>,
    pub capture: Vec<CaptureEntry>,
    pub injections: BTreeMap<DeviceId, FloodId>,
    pub attract: BTreeMap<DeviceId, AttractState>,
}

pub(crate) struct DeviceState {
    pub name: String,
    pub profile: Arc<DeviceProfile>,
    pub node: NodeId,
    pub powered: bool,
    pub association: AssociationState,
    pub trace: Vec<SampleRecord>,
    /// Flood contributions accumulated during the current tick, in PPS.
    rx: Vec<(FloodId, f64)>,
    pub dropped_packets: u64,
    pub disconnect_events: u32,
    baseline_rng: ChaCha12Rng,
    jitter_rng: ChaCha12Rng,
    attract_rng: ChaCha12Rng,
}

enum NodeKind {
    Attacker,
    Device(usize),
    Ap(usize),
}

/// Deterministic discrete-event simulation of the attack testbed.
///
/// All state mutates on one logical timeline; time advances in 1-second
/// ticks with sub-second ordering by event insertion sequence.
pub struct Simulation {
    seed: u64,
    now: u64,
    queue: EventQueue,
    nodes: Vec<NodeKind>,
    aps: Vec<AccessPoint>,
    devices: Vec<DeviceState>,
    pub(crate) floods: Vec<FloodState>,
    pub(crate) fake: Option<FakeApState>,
    attacker_node: NodeId,
    attacker_joined: bool,
    /// Security tag devices are provisioned for: the first AP's.
    network_security: Option<String>,
}

impl Simulation {
    pub fn new(seed: u64) -> Self {
        let mut sim = Simulation {
            seed,
            now: 0,
            queue: EventQueue::new(),
            nodes: Vec::new(),
            aps: Vec::new(),
            devices: Vec::new(),
            floods: Vec::new(),
            fake: None,
            attacker_node: NodeId(0),
            attacker_joined: true,
            network_security: None,
        };
        sim.attacker_node = sim.register_node(NodeKind::Attacker);
        sim
    }

    /// Attach or detach the attacker node from the network. Scans require
    /// the attacker to be joined.
    pub fn set_attacker_joined(&mut self, joined: bool) {
        self.attacker_joined = joined;
    }

    pub fn attacker_joined(&self) -> bool {
        self.attacker_joined
    }

    fn register_node(&mut self, kind: NodeKind) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(kind);
        id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Seconds fully elapsed since simulation start.
    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn attacker_node(&self) -> NodeId {
        self.attacker_node
    }

    /// Register an access point. The first legitimate AP added is the one
    /// devices associate to by default.
    pub fn add_ap(&mut self, ap: AccessPoint) -> usize {
        let index = self.aps.len();
        if self.network_security.is_none() {
            self.network_security = Some(ap.security_profile.clone());
        }
        self.aps.push(ap);
        self.register_node(NodeKind::Ap(index));
        index
    }

    pub fn ap(&self, index: usize) -> &AccessPoint {
        &self.aps[index]
    }

    pub(crate) fn install_fake_state(&mut self, ap: usize, clone_of: Bssid) {
        self.fake = Some(FakeApState {
            ap,
            clone_of,
            mode: FapMode::Dormant,
            connected: Vec::new(),
            capture: Vec::new(),
            injections: BTreeMap::new(),
            attract: BTreeMap::new(),
        });
    }

    pub fn add_device(&mut self, name: &str, profile: DeviceProfile) -> DeviceId {
        let index = self.devices.len();
        let node = self.register_node(NodeKind::Device(index));
        self.devices.push(DeviceState {
            name: name.to_string(),
            profile: Arc::new(profile),
            node,
            powered: true,
            association: AssociationState::new(),
            trace: Vec::new(),
            rx: Vec::new(),
            dropped_packets: 0,
            disconnect_events: 0,
            baseline_rng: ChaCha12Rng::seed_from_u64(derive_stream_seed(
                self.seed,
                "baseline",
                index as u64,
            )),
            jitter_rng: ChaCha12Rng::seed_from_u64(derive_stream_seed(
                self.seed,
                "udp-jitter",
                index as u64,
            )),
            attract_rng: ChaCha12Rng::seed_from_u64(derive_stream_seed(
                self.seed,
                "fap-attract",
                index as u64,
            )),
        });
        DeviceId(index)
    }

    pub fn device_count(&self) -> usize {
        self.devices.len()
    }

    pub fn device_ids(&self) -> impl Iterator<Item = DeviceId> {
        (0..self.devices.len()).map(DeviceId)
    }

    pub fn device_by_name(&self, name: &str) -> Result<DeviceId> {
        self.devices
            .iter()
            .position(|d| d.name == name)
            .map(DeviceId)
            .ok_or_else(|| SimError::UnknownDevice(name.to_string()))
    }

    pub fn device_name(&self, id: DeviceId) -> &str {
        &self.devices[id.0].name
    }

    pub fn device_profile(&self, id: DeviceId) -> &DeviceProfile {
        &self.devices[id.0].profile
    }

    pub fn device_node(&self, id: DeviceId) -> NodeId {
        self.devices[id.0].node
    }

    pub fn power_on(&mut self, id: DeviceId) {
        self.devices[id.0].powered = true;
    }

    pub fn power_off(&mut self, id: DeviceId) {
        self.devices[id.0].powered = false;
    }

    pub fn is_powered(&self, id: DeviceId) -> bool {
        self.devices[id.0].powered
    }

    pub fn association(&self, id: DeviceId) -> &AssociationState {
        &self.devices[id.0].association
    }

    pub fn meter_trace(&self, id: DeviceId) -> &[SampleRecord] {
        &self.devices[id.0].trace
    }

    pub fn disconnect_events(&self, id: DeviceId) -> u32 {
        self.devices[id.0].disconnect_events
    }

    pub fn dropped_packets(&self, id: DeviceId) -> u64 {
        self.devices[id.0].dropped_packets
    }

    /// Deterministic IP address from scenario ordering.
    pub fn ip_of(&self, node: NodeId) -> String {
        match self.nodes[node.0 as usize] {
            NodeKind::Attacker => "10.0.0.254".to_string(),
            NodeKind::Device(i) => format!("10.0.0.{}", 2 + i),
            NodeKind::Ap(i) => {
                if self.aps[i].is_fake {
                    "10.0.0.253".to_string()
                } else {
                    "10.0.0.1".to_string()
                }
            }
        }
    }

    /// Deterministic MAC address from scenario ordering.
    pub fn mac_of(&self, node: NodeId) -> Bssid {
        match self.nodes[node.0 as usize] {
            NodeKind::Attacker => Bssid::from_index(0xfe),
            NodeKind::Device(i) => Bssid::from_index(0x10 + i as u8),
            NodeKind::Ap(i) => self.aps[i].bssid,
        }
    }

    // ------------------------------------------------------------------
    // Clock and event queue
    // ------------------------------------------------------------------

    /// Schedule an event to fire during the second `t`.
    pub fn schedule(&mut self, t: u64, event: SimEvent) -> Result<EventHandle> {
        self.queue.schedule(self.now, t, event)
    }

    /// Complete every second up to (but excluding) `to`, firing all due
    /// events in (time, insertion) order and metering each second.
    pub fn advance(&mut self, to: u64) -> Result<Vec<FiredEvent>> {
        if to < self.now {
            return Err(SimError::ClockRewind { to, now: self.now });
        }
        let mut fired = Vec::new();
        while self.now < to {
            let t = self.now;
            while let Some((time, event)) = self.queue.pop_due(t) {
                self.dispatch(time, &event);
                fired.push(FiredEvent { t: time, event });
            }
            self.end_of_tick(t);
            self.now = t + 1;
        }
        Ok(fired)
    }

    /// Advance by a number of seconds.
    pub fn advance_by(&mut self, secs: u64) -> Result<Vec<FiredEvent>> {
        self.advance(self.now + secs)
    }

    fn dispatch(&mut self, t: u64, event: &SimEvent) {
        match *event {
            SimEvent::FloodBatch { flood } => self.flood_batch(t, flood),
            SimEvent::AttractAttempt { device, attempt } => {
                self.attract_attempt(t, device, attempt)
            }
            SimEvent::AttractComplete { device } => self.attract_complete(t, device),
            SimEvent::Marker { .. } => {}
        }
    }

    // ------------------------------------------------------------------
    // Association
    // ------------------------------------------------------------------

    /// Bind a device to an access point.
    ///
    /// Binding to a fake AP requires the device to be disconnected first.
    pub fn associate(&mut self, id: DeviceId, ap_index: usize) -> Result<&AssociationState> {
        let ap = self.aps[ap_index].clone();
        // Security handshake as an instantaneous tag equality check.
        if self.network_security.as_deref() != Some(ap.security_profile.as_str()) {
            return Err(SimError::SecurityMismatch {
                ap: ap.ssid.clone(),
                expected: self.network_security.clone().unwrap_or_default(),
            });
        }
        let t = self.now;
        let bound = self.devices[id.0].association.bound;
        if bound.is_connected() {
            let already_there = matches!(
                (bound, ap.is_fake),
                (Binding::Fake(b), true) | (Binding::Legitimate(b), false) if b == ap.bssid
            );
            if !already_there {
                return Err(SimError::StillAssociated(self.devices[id.0].name.clone()));
            }
        } else {
            let binding = if ap.is_fake {
                Binding::Fake(ap.bssid)
            } else {
                Binding::Legitimate(ap.bssid)
            };
            self.devices[id.0].association.transition(t, binding);
            if ap.is_fake {
                if let Some(fake) = &mut self.fake {
                    if !fake.connected.contains(&id) {
                        fake.connected.push(id);
                    }
                }
            }
        }
        Ok(&self.devices[id.0].association)
    }

    /// Among the broadcasting APs, pick the strongest and associate to it.
    pub fn associate_strongest(&mut self, id: DeviceId) -> Result<usize> {
        let fake_visible = self
            .fake
            .as_ref()
            .map(|f| (f.ap, f.mode >= FapMode::Broadcasting));
        let mut best: Option<(usize, f64)> = None;
        for (index, ap) in self.aps.iter().enumerate() {
            if ap.is_fake {
                match fake_visible {
                    Some((fap, true)) if fap == index => {}
                    _ => continue,
                }
            }
            if best.is_none_or(|(_, signal)| ap.signal_dbm > signal) {
                best = Some((index, ap.signal_dbm));
            }
        }
        let (index, _) = best.ok_or(SimError::NoFakeAp)?;
        self.associate(id, index)?;
        Ok(index)
    }

    /// Drop the device's current association, recording the transition.
    pub fn disconnect_device(&mut self, id: DeviceId) {
        let t = self.now;
        let device = &mut self.devices[id.0];
        if device.association.bound.is_connected() {
            let was_fake = matches!(device.association.bound, Binding::Fake(_));
            device.association.transition(t, Binding::Disconnected);
            device.disconnect_events += 1;
            if was_fake {
                if let Some(fake) = &mut self.fake {
                    fake.connected.retain(|d| *d != id);
                }
            }
        }
    }

    // ------------------------------------------------------------------
    // Packet delivery
    // ------------------------------------------------------------------

    /// Deliver one materialized packet.
    ///
    /// A packet reaches an AP unconditionally. It reaches a device only
    /// while that device is associated to an AP the source can reach: the
    /// attacker and the APs reach every associated device, a device reaches
    /// only peers sharing its AP. Dropped packets are counted per
    /// destination.
    pub fn deliver(&mut self, packet: Packet) -> Result<DeliveryOutcome> {
        debug_assert!(matches!(packet.payload_bytes, 0 | 1500));
        debug_assert!(packet.protocol.has_ports() || packet.dst_port.is_none());
        let dst_index = packet.dst.0 as usize;
        if dst_index >= self.nodes.len() || packet.src.0 as usize >= self.nodes.len() {
            return Err(SimError::UnknownNode(packet.dst.0));
        }
        match self.nodes[dst_index] {
            NodeKind::Ap(_) | NodeKind::Attacker => Ok(DeliveryOutcome::Delivered),
            NodeKind::Device(device_index) => {
                let id = DeviceId(device_index);
                let dst_bound = self.devices[device_index].association.bound;
                let reachable = match self.nodes[packet.src.0 as usize] {
                    NodeKind::Attacker | NodeKind::Ap(_) => dst_bound.is_connected(),
                    NodeKind::Device(src_index) => {
                        dst_bound.is_connected()
                            && self.devices[src_index].association.bound == dst_bound
                    }
                };
                if reachable {
                    self.capture_packet(
                        packet.t,
                        id,
                        CaptureDirection::Inbound,
                        packet.protocol,
                        packet.payload_bytes,
                        1,
                    );
                    Ok(DeliveryOutcome::Delivered)
                } else {
                    self.devices[device_index].dropped_packets += 1;
                    Ok(DeliveryOutcome::Dropped)
                }
            }
        }
    }

    /// A device emits traffic (telemetry); captured when monitored.
    pub fn send_from_device(
        &mut self,
        id: DeviceId,
        protocol: Protocol,
        bytes: u32,
        count: u64,
    ) -> Result<()> {
        if !self.devices[id.0].association.bound.is_connected() {
            return Err(SimError::HostDown(self.devices[id.0].name.clone()));
        }
        self.capture_packet(self.now, id, CaptureDirection::Outbound, protocol, bytes, count);
        Ok(())
    }

    fn capture_packet(
        &mut self,
        t: u64,
        device: DeviceId,
        direction: CaptureDirection,
        protocol: Protocol,
        bytes: u32,
        count: u64,
    ) {
        let Some(fake) = &mut self.fake else { return };
        if fake.mode != FapMode::Monitoring || !fake.connected.contains(&device) {
            return;
        }
        fake.capture.push(CaptureEntry {
            t,
            device,
            direction,
            protocol,
            bytes,
            count,
        });
    }

    // ------------------------------------------------------------------
    // Floods
    // ------------------------------------------------------------------

    /// Start a flood on the timeline; batches fire once per second.
    pub(crate) fn spawn_flood(
        &mut self,
        spec: FloodSpec,
        target: DeviceId,
        origin: FloodOrigin,
    ) -> Result<FloodId> {
        device::check_rate(spec.rate)?;
        let profile = &self.devices[target.0].profile;
        let port_state = spec.resolve_port_state(profile)?;
        let id = FloodId(self.floods.len() as u32);
        let duration_secs = u64::from(spec.max_duration_min) * 60;
        self.floods.push(FloodState {
            spec,
            target,
            origin,
            port_state,
            start: self.now,
            duration_secs,
            active: true,
            sent: 0,
            delivered: 0,
            dropped: 0,
            processed: 0.0,
            disconnected_target_at: None,
        });
        self.schedule(self.now, SimEvent::FloodBatch { flood: id })?;
        Ok(id)
    }

    /// Freeze a flood: no further batches are generated. Idempotent.
    pub fn stop_flood(&mut self, id: FloodId) -> FloodCounters {
        self.floods[id.0 as usize].active = false;
        self.flood_counters(id)
    }

    pub fn flood_counters(&self, id: FloodId) -> FloodCounters {
        let flood = &self.floods[id.0 as usize];
        FloodCounters {
            sent: flood.sent,
            delivered: flood.delivered,
            dropped: flood.dropped,
            processed: flood.processed,
            disconnected_target_at: flood.disconnected_target_at,
        }
    }

    pub fn flood_is_active(&self, id: FloodId) -> bool {
        self.floods[id.0 as usize].active
    }

    fn flood_batch(&mut self, t: u64, id: FloodId) {
        let flood = &self.floods[id.0 as usize];
        if !flood.active || t >= flood.start + flood.duration_secs {
            self.floods[id.0 as usize].active = false;
            return;
        }
        let target = flood.target;
        let origin = flood.origin;
        let rate = u64::from(flood.spec.rate);
        let protocol = flood.spec.protocol;
        let bytes = flood.spec.payload.bytes();

        // Injection floods end the moment their target leaves the fake AP.
        if origin == FloodOrigin::FakeAp {
            let still_connected = self
                .fake
                .as_ref()
                .is_some_and(|f| f.connected.contains(&target));
            if !still_connected {
                self.floods[id.0 as usize].active = false;
                return;
            }
        }

        let flood = &mut self.floods[id.0 as usize];
        flood.sent += rate;
        let connected = self.devices[target.0].association.bound.is_connected();
        if connected {
            self.floods[id.0 as usize].delivered += rate;
            self.devices[target.0].rx.push((id, rate as f64));
            self.capture_packet(t, target, CaptureDirection::Inbound, protocol, bytes, rate);
        } else {
            self.floods[id.0 as usize].dropped += rate;
            self.devices[target.0].dropped_packets += rate;
        }
        // Chain the next batch; the terminating batch above ends the chain.
        let _ = self.queue.schedule(t, t + 1, SimEvent::FloodBatch { flood: id });
    }

    // ------------------------------------------------------------------
    // Fake-AP attraction
    // ------------------------------------------------------------------

    const MAX_ATTRACT_ATTEMPTS: u32 = 3;

    /// Begin attracting a disconnected device toward the fake AP.
    pub(crate) fn start_attract(&mut self, id: DeviceId) -> Result<()> {
        if self.fake.as_ref().map(|f| f.mode) < Some(FapMode::Broadcasting) {
            return Err(SimError::NoFakeAp);
        }
        if self.devices[id.0].association.bound.is_connected() {
            return Err(SimError::StillAssociated(self.devices[id.0].name.clone()));
        }
        if let Some(fake) = &mut self.fake {
            fake.attract.insert(id, AttractState::default());
        }
        self.schedule(self.now, SimEvent::AttractAttempt { device: id, attempt: 1 })?;
        Ok(())
    }

    fn attract_attempt(&mut self, t: u64, id: DeviceId, attempt: u32) {
        let device = &mut self.devices[id.0];
        if device.association.bound.is_connected() {
            return; // reassociated by other means; nothing to do
        }
        let (min_min, max_min) = device.profile.fap_connect_range;
        let reliability = device.profile.fap_connect_reliability;
        let succeeded = device.attract_rng.gen::<f64>() < reliability;
        let delay_secs = device
            .attract_rng
            .gen_range(min_min * 60.0..=max_min * 60.0)
            .round() as u64;
        let max_secs = (max_min * 60.0).round() as u64;

        if let Some(fake) = &mut self.fake {
            if let Some(state) = fake.attract.get_mut(&id) {
                state.attempts.push(AttractAttempt { attempt, delay_secs, succeeded });
                if !succeeded && attempt >= Self::MAX_ATTRACT_ATTEMPTS {
                    state.failed = true;
                }
            }
        }
        if succeeded {
            let _ = self
                .queue
                .schedule(t, t + delay_secs, SimEvent::AttractComplete { device: id });
        } else if attempt < Self::MAX_ATTRACT_ATTEMPTS {
            // No association after the full window: re-attract immediately.
            let _ = self.queue.schedule(
                t,
                t + max_secs,
                SimEvent::AttractAttempt { device: id, attempt: attempt + 1 },
            );
        }
    }

    fn attract_complete(&mut self, t: u64, id: DeviceId) {
        if self.devices[id.0].association.bound.is_connected() {
            return;
        }
        if self.associate_strongest(id).is_ok() {
            if let Some(fake) = &mut self.fake {
                if let Some(state) = fake.attract.get_mut(&id) {
                    state.connected_at = Some(t);
                }
            }
        }
    }

    pub fn attract_attempts(&self, id: DeviceId) -> Vec<AttractAttempt> {
        self.fake
            .as_ref()
            .and_then(|f| f.attract.get(&id))
            .map(|s| s.attempts.clone())
            .unwrap_or_default()
    }

    pub fn attract_connected_at(&self, id: DeviceId) -> Option<u64> {
        self.fake.as_ref().and_then(|f| f.attract.get(&id)).and_then(|s| s.connected_at)
    }

    pub fn attract_failed(&self, id: DeviceId) -> bool {
        self.fake
            .as_ref()
            .and_then(|f| f.attract.get(&id))
            .is_some_and(|s| s.failed)
    }

    // ------------------------------------------------------------------
    // Metering
    // ------------------------------------------------------------------

    /// Latest meter reading for a device.
    ///
    /// The meter itself runs on the engine's 1 Hz cadence and appends one
    /// sample per completed second to the device's trace.
    pub fn sample_meter(&self, id: DeviceId) -> Result<EnergySample> {
        let device = &self.devices[id.0];
        if !device.powered {
            return Err(SimError::PoweredOff(device.name.clone()));
        }
        let profile = &device.profile;
        match device.trace.last() {
            Some(record) => Ok(EnergySample::from_joules(record.t, record.joules, profile)),
            None => Ok(EnergySample::from_joules(
                self.now,
                profile.e_base_mid(),
                profile,
            )),
        }
    }

    /// Current fake-AP injection energy rate for a device; errors unless the
    /// device is associated to the fake AP.
    pub fn energy_rate_fap(&self, id: DeviceId) -> Result<f64> {
        let device = &self.devices[id.0];
        if !matches!(device.association.bound, Binding::Fake(_)) {
            return Err(SimError::NotOnFakeAp(device.name.clone()));
        }
        let received: f64 = device
            .trace
            .last()
            .map(|record| record.received_pps)
            .unwrap_or(0.0);
        Ok(device::fap_energy_rate(received, &device.profile))
    }

    /// Close out the second `t`: fold flood contributions through the
    /// reception model, meter every powered device, and evaluate disconnects.
    fn end_of_tick(&mut self, t: u64) {
        for index in 0..self.devices.len() {
            let contributions = std::mem::take(&mut self.devices[index].rx);
            let device = &self.devices[index];
            if !device.powered {
                continue;
            }
            let profile = Arc::clone(&device.profile);
            let total_pps: f64 = contributions.iter().map(|(_, pps)| pps).sum();
            let received = if total_pps > 0.0 {
                device::reception_rate(total_pps, &profile)
            } else {
                0.0
            };

            // Apportion processed packets across concurrent floods.
            for (flood_id, pps) in &contributions {
                let share = received * pps / total_pps;
                self.floods[flood_id.0 as usize].processed += share;
            }

            // The dominant flood (highest ceiling) shapes the energy response.
            let dominant = contributions
                .iter()
                .map(|(flood_id, _)| flood_id)
                .max_by(|a, b| {
                    let ceiling = |fid: &&FloodId| {
                        let f = &self.floods[fid.0 as usize];
                        match f.origin {
                            FloodOrigin::FakeAp => profile.fap_ceiling(),
                            FloodOrigin::Attacker => {
                                profile.attack_ceiling(f.spec.protocol, f.port_state)
                            }
                        }
                    };
                    ceiling(a).total_cmp(&ceiling(b)).then(b.0.cmp(&a.0))
                })
                .copied();

            let device = &mut self.devices[index];
            let (joules, source) = match dominant {
                Some(flood_id) => {
                    let flood = &self.floods[flood_id.0 as usize];
                    let energy = match flood.origin {
                        FloodOrigin::FakeAp => device::fap_energy_rate(received, &profile),
                        FloodOrigin::Attacker => device::attack_energy_rate(
                            received,
                            flood.spec.protocol,
                            flood.port_state,
                            &profile,
                        ),
                    };
                    let energy = if flood.spec.protocol == Protocol::Udp {
                        let jitter = device.jitter_rng.gen_range(-1.0..=1.0);
                        device::apply_udp_jitter(energy, jitter, &profile)
                    } else {
                        energy
                    };
                    (energy, Some(flood.origin))
                }
                None => {
                    let frac = device.baseline_rng.gen::<f64>();
                    (device::baseline_energy(frac, &profile), None)
                }
            };

            let associated = device.association.bound.is_connected();
            device.trace.push(SampleRecord {
                t,
                joules,
                received_pps: received,
                associated,
                source,
            });

            // Disconnect evaluation, in flood-id order for determinism.
            if associated && total_pps > 0.0 {
                let mut flood_ids: Vec<FloodId> =
                    contributions.iter().map(|(fid, _)| *fid).collect();
                flood_ids.sort();
                for flood_id in flood_ids {
                    let flood = &self.floods[flood_id.0 as usize];
                    let elapsed_min = (t - flood.start + 1) as f64 / 60.0;
                    let outcome = device::disconnect_outcome(
                        received,
                        flood.spec.protocol,
                        flood.spec.payload,
                        f64::from(flood.spec.max_duration_min),
                        &profile,
                    );
                    if let DisconnectOutcome::DisconnectsAt(sd) = outcome {
                        if elapsed_min >= sd - 1e-9 {
                            self.floods[flood_id.0 as usize].disconnected_target_at = Some(t);
                            self.disconnect_device(DeviceId(index));
                            break;
                        }
                    }
                }
            }
        }
    }
}
