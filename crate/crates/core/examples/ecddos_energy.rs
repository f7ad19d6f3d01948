//! Energy-consumption DDoS: floods kept just below the disconnect
//! threshold, maximizing the victim's joules per second without breaking
//! its association.
//!
//! Runs each protocol against both device classes and prints the
//! steady-state energy next to the per-protocol ceiling.
//!
//! ```bash
//! cargo run -p ec-attack-sim --example ecddos_energy
//! ```

use ec_attack_sim::campaign::default_ap;
use ec_attack_sim::device::{builtin_profile, PayloadClass, Protocol};
use ec_attack_sim::{FloodSpec, Simulation};

fn main() -> ec_attack_sim::Result<()> {
    println!(
        "{:<14} {:<5} {:>9} {:>13} {:>9} {:>8}",
        "device", "proto", "rate", "received_pps", "peak_J/s", "ceiling"
    );
    for device in ["raspberry_pi", "arduino"] {
        let profile = builtin_profile(device).unwrap();
        for protocol in [Protocol::TcpSyn, Protocol::Icmp, Protocol::Udp] {
            let mut sim = Simulation::new(6);
            let ap = sim.add_ap(default_ap());
            let id = sim.add_device(device, profile.clone());
            sim.associate(id, ap)?;

            let rate = profile.near_threshold_rate(PayloadClass::Np);
            let spec = FloodSpec::new(protocol, device, rate, PayloadClass::Np)
                .with_duration_min(8);
            let flood = sim.launch_flood(spec)?;
            sim.advance_by(8 * 60)?;
            sim.stop_flood(flood);

            let attacked: Vec<_> = sim
                .meter_trace(id)
                .iter()
                .filter(|s| s.source.is_some())
                .collect();
            let peak = attacked.iter().map(|s| s.joules).fold(0.0, f64::max);
            let received = attacked.iter().map(|s| s.received_pps).fold(0.0, f64::max);
            println!(
                "{:<14} {:<5} {:>9} {:>13.1} {:>9.4} {:>8.2}",
                device,
                protocol.label(),
                rate,
                received,
                peak,
                profile.e_max[&protocol]
            );
            assert!(sim.association(id).bound.is_connected(), "EC-DDoS must not disconnect");
        }
    }
    Ok(())
}
