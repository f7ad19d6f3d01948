//! Network and port scanning of the victim devices.
//!
//! Prints each device's online status, IP and MAC, then the TCP/UDP
//! port-state tallies of the built-in profiles.
//!
//! ```bash
//! cargo run -p ec-attack-sim --example port_scan
//! ```

use ec_attack_sim::campaign::default_ap;
use ec_attack_sim::device::{arduino_profile, raspberry_pi_profile, Protocol};
use ec_attack_sim::Simulation;

fn main() -> ec_attack_sim::Result<()> {
    let mut sim = Simulation::new(1);
    let ap = sim.add_ap(default_ap());
    let rpi = sim.add_device("raspberry_pi", raspberry_pi_profile());
    let ard = sim.add_device("arduino", arduino_profile());
    sim.associate(rpi, ap)?;
    sim.associate(ard, ap)?;

    let network = sim.scan_network()?;
    println!("network scan at t={}s:", network.t);
    for entry in &network.entries {
        println!(
            "  {:<14} {:<8} ip={:<10} mac={}",
            entry.device, entry.status, entry.ip, entry.mac
        );
    }

    println!("\nport scan:");
    println!(
        "  {:<14} {:<5} {:>6} {:>14} {:>9} {:>7}",
        "device", "proto", "open", "open_filtered", "filtered", "closed"
    );
    for device in [rpi, ard] {
        for protocol in [Protocol::TcpSyn, Protocol::Udp] {
            let scan = sim.scan_ports(device, protocol, None)?;
            println!(
                "  {:<14} {:<5} {:>6} {:>14} {:>9} {:>7}",
                scan.device,
                protocol.label(),
                scan.open,
                scan.open_filtered,
                scan.filtered,
                scan.closed
            );
        }
    }
    Ok(())
}
