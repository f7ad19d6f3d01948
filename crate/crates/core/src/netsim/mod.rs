//! Simulation core: virtual clock, event queue, access points, device
//! association state machine, and packet delivery between nodes.

mod engine;

pub use engine::{
    AttractAttempt, CaptureDirection, CaptureEntry, DeliveryOutcome, DeviceId, FapMode,
    FiredEvent, FloodCounters, FloodId, FloodOrigin, NodeId, SampleRecord, Simulation,
};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::device::Protocol;
use crate::error::{Result, SimError};

/// 6-byte hardware identifier (BSSID / MAC).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bssid(pub [u8; 6]);

impl Bssid {
    /// Deterministic locally-administered address from a small index.
    pub fn from_index(index: u8) -> Self {
        Bssid([0x02, 0x00, 0x00, 0x00, 0x00, index])
    }
}

impl std::fmt::Display for Bssid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let b = self.0;
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            b[0], b[1], b[2], b[3], b[4], b[5]
        )
    }
}

impl std::str::FromStr for Bssid {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<_> = s.split(':').collect();
        if parts.len() != 6 {
            return Err(format!("invalid bssid: {s}"));
        }
        let mut bytes = [0u8; 6];
        for (i, part) in parts.iter().enumerate() {
            bytes[i] =
                u8::from_str_radix(part, 16).map_err(|_| format!("invalid bssid byte: {part}"))?;
        }
        Ok(Bssid(bytes))
    }
}

impl Serialize for Bssid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Bssid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A WiFi access point, legitimate or fake.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessPoint {
    pub ssid: String,
    pub bssid: Bssid,
    /// Broadcast channel, 1-14.
    pub channel: u8,
    /// Opaque security-settings tag; association checks it by equality.
    pub security_profile: String,
    /// dBm-like scalar; higher is stronger.
    pub signal_dbm: f64,
    pub is_fake: bool,
}

/// What a device is currently bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    Legitimate(Bssid),
    Fake(Bssid),
    Disconnected,
}

impl Binding {
    pub fn is_connected(self) -> bool {
        !matches!(self, Binding::Disconnected)
    }

    pub fn label(self) -> &'static str {
        match self {
            Binding::Legitimate(_) => "legitimate",
            Binding::Fake(_) => "fake",
            Binding::Disconnected => "disconnected",
        }
    }
}

/// One recorded association transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub t: u64,
    pub from: Binding,
    pub to: Binding,
}

/// Association state of one device, with its full transition history.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationState {
    pub bound: Binding,
    pub since: u64,
    pub history: Vec<TransitionRecord>,
}

impl AssociationState {
    pub fn new() -> Self {
        AssociationState {
            bound: Binding::Disconnected,
            since: 0,
            history: Vec::new(),
        }
    }

    pub(crate) fn transition(&mut self, t: u64, to: Binding) {
        let from = self.bound;
        self.bound = to;
        self.since = t;
        self.history.push(TransitionRecord { t, from, to });
    }
}

impl Default for AssociationState {
    fn default() -> Self {
        Self::new()
    }
}

/// TCP session flags carried by attack packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TcpFlag {
    Syn,
    Ack,
    Fin,
    Psh,
    Urg,
}

/// A single simulated packet.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub src: NodeId,
    pub dst: NodeId,
    pub protocol: Protocol,
    /// Absent for ICMP.
    pub dst_port: Option<u16>,
    /// 0 (NP) or 1500 (HP).
    pub payload_bytes: u32,
    pub tcp_flags: Vec<TcpFlag>,
    pub t: u64,
}

/// Payload of a scheduled simulation event.
#[derive(Debug, Clone, PartialEq)]
pub enum SimEvent {
    /// One per-second batch of an active flood.
    FloodBatch { flood: FloodId },
    /// A fake-AP attract attempt fires and draws its outcome.
    AttractAttempt { device: DeviceId, attempt: u32 },
    /// A successful attract attempt completes: the device re-associates.
    AttractComplete { device: DeviceId },
    /// Inert event for tests and examples; fires and does nothing.
    Marker { tag: u64 },
}

/// Handle returned by [`Simulation::schedule`]; identifies one scheduled event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventHandle(pub u64);

#[derive(Debug, Clone)]
struct Scheduled {
    time: u64,
    seq: u64,
    event: SimEvent,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}
impl Eq for Scheduled {}

impl Ord for Scheduled {
    // Reversed so the BinaryHeap pops the earliest (time, seq) first.
    fn cmp(&self, other: &Self) -> Ordering {
        (other.time, other.seq).cmp(&(self.time, self.seq))
    }
}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Time-ordered event queue; ties resolve by insertion sequence.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Scheduled>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Enqueue an event; `now` guards against scheduling in the past.
    pub fn schedule(&mut self, now: u64, time: u64, event: SimEvent) -> Result<EventHandle> {
        if time < now {
            return Err(SimError::PastEvent { t: time, now });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Scheduled { time, seq, event });
        Ok(EventHandle(seq))
    }

    /// Pop the earliest event if it fires at or before `time`.
    pub fn pop_due(&mut self, time: u64) -> Option<(u64, SimEvent)> {
        if self.heap.peek().is_some_and(|s| s.time <= time) {
            self.heap.pop().map(|s| (s.time, s.event))
        } else {
            None
        }
    }

    /// Time of the next pending event.
    pub fn peek_time(&self) -> Option<u64> {
        self.heap.peek().map(|s| s.time)
    }
}

/// Derive a per-stream RNG seed from the scenario seed, a stream label and an
/// index, so independent random streams never share state.
pub fn derive_stream_seed(seed: u64, label: &str, index: u64) -> u64 {
    // FNV-1a over the label, folded with the seed and index.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in label.as_bytes() {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^= index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    h = h.wrapping_mul(0x0000_0100_0000_01b3);
    h ^ seed.rotate_left(32)
}

#[cfg(test)]
mod tests;
