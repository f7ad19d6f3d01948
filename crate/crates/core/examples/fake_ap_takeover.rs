//! Fake access point (evil twin) takeover, step by step.
//!
//! Clones the legitimate AP with a stronger signal, disconnects the victim
//! with a DDoS flood, attracts it to the clone, enables monitor mode,
//! captures its traffic and injects an energy-draining flood.
//!
//! ```bash
//! cargo run -p ec-attack-sim --example fake_ap_takeover
//! ```

use ec_attack_sim::campaign::default_ap;
use ec_attack_sim::device::{raspberry_pi_profile, PayloadClass, Protocol};
use ec_attack_sim::{FloodSpec, Simulation};

fn main() -> ec_attack_sim::Result<()> {
    let mut sim = Simulation::new(2);
    let ap = sim.add_ap(default_ap());
    let rpi = sim.add_device("raspberry_pi", raspberry_pi_profile());
    sim.associate(rpi, ap)?;

    // Disconnect the victim with a threshold-rate DDoS flood.
    let flood_start = sim.now();
    let ddos = FloodSpec::new(Protocol::Icmp, "raspberry_pi", 20_000, PayloadClass::Np)
        .with_duration_min(8);
    let flood = sim.launch_flood(ddos)?;
    sim.advance_by(8 * 60)?;
    let counters = sim.stop_flood(flood);
    let disconnect_t = counters.disconnected_target_at.expect("threshold rate disconnects");
    println!(
        "victim disconnected after {:.2} minutes of flooding",
        (disconnect_t - flood_start + 1) as f64 / 60.0
    );

    // Clone the AP and lure the victim in.
    let fake = sim.deploy_fake_ap(ap, 10.0)?;
    println!(
        "fake AP deployed: ssid={} bssid={} channel={} signal={} dBm (legit {} dBm)",
        sim.ap(fake).ssid,
        sim.ap(fake).bssid,
        sim.ap(fake).channel,
        sim.ap(fake).signal_dbm,
        sim.ap(ap).signal_dbm
    );
    sim.fap_start_broadcast()?;
    let attract_start = sim.now();
    sim.attract(rpi)?;
    while sim.attract_connected_at(rpi).is_none() {
        sim.advance_by(1)?;
    }
    let connected_at = sim.attract_connected_at(rpi).unwrap();
    println!(
        "victim re-associated to the fake AP after {:.2} minutes",
        (connected_at - attract_start) as f64 / 60.0
    );

    // Monitor and inject.
    sim.fap_enable_monitoring()?;
    sim.send_from_device(rpi, Protocol::Udp, 64, 5)?; // telemetry, captured
    let injection = FloodSpec::new(Protocol::Icmp, "raspberry_pi", 19_999, PayloadClass::Np)
        .with_duration_min(8);
    let flood = sim.inject_malicious(rpi, injection)?;
    sim.advance_by(120)?;
    sim.stop_flood(flood);

    let steady = sim.energy_rate_fap(rpi)?;
    println!("steady-state injection energy: {steady:.3} J/s (level to exceed: 4.00)");

    let captured = sim.capture(rpi, 0)?;
    let inbound: u64 = captured
        .iter()
        .filter(|e| e.direction == ec_attack_sim::netsim::CaptureDirection::Inbound)
        .map(|e| e.count)
        .sum();
    let outbound: u64 = captured
        .iter()
        .filter(|e| e.direction == ec_attack_sim::netsim::CaptureDirection::Outbound)
        .map(|e| e.count)
        .sum();
    println!("capture log: {inbound} inbound packets, {outbound} outbound packets");

    let mut csv = Vec::new();
    sim.export_capture_csv(&mut csv)?;
    let lines = csv.iter().filter(|b| **b == b'\n').count();
    println!("capture CSV export: {} rows (one per packet)", lines - 1);
    Ok(())
}
