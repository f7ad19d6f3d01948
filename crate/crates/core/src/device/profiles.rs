//! Built-in device profiles with the calibrated scan, disconnect and
//! energy constants for the two victim classes.

use std::collections::BTreeMap;

use super::{DeviceProfile, PayloadClass, PortState, PortTable, Protocol};

/// Names of the profiles shipped with the simulator.
pub const PROFILE_NAMES: &[&str] = &["raspberry_pi", "arduino"];

/// Reception-curve constant of the Raspberry-Pi class, solved from the
/// single calibration point `reception_rate(15000) = 14544` by bisection
/// of `g * ln(1 + 5000/g) = 4544` (see the oracle in the test suite).
pub const RPI_RECEPTION_GAMMA: f64 = 24_130.885_425_953_31;

/// Reception-curve constant of the Arduino class. No calibration point is
/// available for it; the value keeps the curve shape comparable to the
/// Raspberry-Pi one at the much lower linear limit.
pub const ARDUINO_RECEPTION_GAMMA: f64 = 1200.0;

/// Look up a built-in profile by name.
pub fn builtin_profile(name: &str) -> Option<DeviceProfile> {
    match name {
        "raspberry_pi" => Some(raspberry_pi_profile()),
        "arduino" => Some(arduino_profile()),
        _ => None,
    }
}

/// Raspberry-Pi class victim.
pub fn raspberry_pi_profile() -> DeviceProfile {
    // TCP scan tallies: 3 open, 998 open-filtered, 65389 filtered, 0 closed.
    // The filtered count exceeds the 16-bit transport range, so the simulated
    // scan space extends to 66390 port ids; attack targets resolve to the
    // lowest id per state and stay within the real range.
    let mut tcp = BTreeMap::new();
    for port in 1..=66_390u32 {
        tcp.insert(port, PortState::Filtered);
    }
    for port in [22, 80, 443] {
        tcp.insert(port, PortState::Open);
    }
    for port in 1001..=1998u32 {
        tcp.insert(port, PortState::OpenFiltered);
    }

    // UDP scan tallies: 4 open, 700 open-filtered, 0 closed.
    let mut udp = BTreeMap::new();
    for port in 1..=704u32 {
        udp.insert(port, PortState::OpenFiltered);
    }
    for port in [53, 67, 123, 137] {
        udp.insert(port, PortState::Open);
    }

    DeviceProfile {
        device_class: "raspberry_pi".to_string(),
        port_table: PortTable::new(tcp, udp),
        e_base: (1.410, 1.420),
        e_max: BTreeMap::from([
            (Protocol::TcpSyn, 3.3),
            (Protocol::Icmp, 3.6),
            (Protocol::Udp, 3.5),
        ]),
        ar_threshold: BTreeMap::from([
            (PayloadClass::Np, Some(20_000)),
            (PayloadClass::Hp, None),
        ]),
        sd_ref: BTreeMap::from([
            ((Protocol::Icmp, PayloadClass::Np), 7.58),
            ((Protocol::TcpSyn, PayloadClass::Np), 6.2),
            ((Protocol::Udp, PayloadClass::Np), 7.8),
        ]),
        reception_linear_limit: 10_000.0,
        reception_gamma: RPI_RECEPTION_GAMMA,
        fap_connect_range: (3.0, 5.0),
        fap_connect_reliability: 1.0,
        fap_e_level: 4.00,
        nominal_voltage: 5.1,
    }
}

/// Arduino class victim.
pub fn arduino_profile() -> DeviceProfile {
    // TCP scan tallies: 1 open, 22 filtered, 1000 open-filtered, 0 closed.
    let mut tcp = BTreeMap::new();
    for port in 1..=22u32 {
        tcp.insert(port, PortState::Filtered);
    }
    tcp.insert(80, PortState::Open);
    for port in (23..=1023u32).filter(|p| *p != 80) {
        tcp.insert(port, PortState::OpenFiltered);
    }

    // UDP scan tallies: 1000 open-filtered ports.
    let mut udp = BTreeMap::new();
    for port in 1..=1000u32 {
        udp.insert(port, PortState::OpenFiltered);
    }

    DeviceProfile {
        device_class: "arduino".to_string(),
        port_table: PortTable::new(tcp, udp),
        e_base: (1.060, 1.065),
        e_max: BTreeMap::from([
            (Protocol::TcpSyn, 1.75),
            (Protocol::Icmp, 1.25),
            (Protocol::Udp, 1.50),
        ]),
        ar_threshold: BTreeMap::from([
            (PayloadClass::Np, Some(800)),
            (PayloadClass::Hp, Some(200)),
        ]),
        sd_ref: BTreeMap::from([
            ((Protocol::Icmp, PayloadClass::Np), 3.6),
            ((Protocol::TcpSyn, PayloadClass::Np), 3.3),
            ((Protocol::Udp, PayloadClass::Np), 3.8),
            ((Protocol::Icmp, PayloadClass::Hp), 3.13),
            ((Protocol::TcpSyn, PayloadClass::Hp), 2.44),
            ((Protocol::Udp, PayloadClass::Hp), 2.44),
        ]),
        reception_linear_limit: 500.0,
        reception_gamma: ARDUINO_RECEPTION_GAMMA,
        fap_connect_range: (7.0, 10.0),
        fap_connect_reliability: 0.75,
        fap_e_level: 2.00,
        nominal_voltage: 5.0,
    }
}
