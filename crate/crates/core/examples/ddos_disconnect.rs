//! DDoS disconnection: threshold attack rates and survival durations.
//!
//! Searches the minimum disconnecting rate per device and payload class
//! (binary search over probe simulations), then measures the survival
//! duration grid at those thresholds.
//!
//! ```bash
//! cargo run -p ec-attack-sim --example ddos_disconnect
//! ```

use ec_attack_sim::campaign::{find_threshold_ar, measure_sd, ThresholdResult};
use ec_attack_sim::device::{builtin_profile, PayloadClass, Protocol};

fn main() -> ec_attack_sim::Result<()> {
    println!("threshold attack rates (PPS):");
    for device in ["raspberry_pi", "arduino"] {
        let profile = builtin_profile(device).unwrap();
        for payload in [PayloadClass::Np, PayloadClass::Hp] {
            let result = find_threshold_ar(&profile, Protocol::Icmp, payload, 8, 1)?;
            println!("  {:<14} {:<3} -> {}", device, payload.label(), result);
        }
    }

    println!("\nsurvival duration at threshold (minutes):");
    println!(
        "  {:<14} {:<4} {:>6} {:>6} {:>6}",
        "device", "load", "icmp", "tcp", "udp"
    );
    for device in ["raspberry_pi", "arduino"] {
        let profile = builtin_profile(device).unwrap();
        for payload in [PayloadClass::Np, PayloadClass::Hp] {
            let mut cells = Vec::new();
            for protocol in [Protocol::Icmp, Protocol::TcpSyn, Protocol::Udp] {
                let cell = match profile.threshold_rate(payload) {
                    Some(rate) => measure_sd(&profile, protocol, payload, rate, 8, 1)?
                        .map(|sd| format!("{sd:.2}"))
                        .unwrap_or_else(|| "none".to_string()),
                    None => "none".to_string(),
                };
                cells.push(cell);
            }
            println!(
                "  {:<14} {:<4} {:>6} {:>6} {:>6}",
                device,
                payload.label(),
                cells[0],
                cells[1],
                cells[2]
            );
        }
    }

    // Double-checking the search with the exhaustive oracle on one case:
    let ard = builtin_profile("arduino").unwrap();
    let binary = find_threshold_ar(&ard, Protocol::Udp, PayloadClass::Hp, 8, 1)?;
    let linear = ec_attack_sim::campaign::find_threshold_ar_linear(
        &ard,
        Protocol::Udp,
        PayloadClass::Hp,
        8,
        1,
    )?;
    assert_eq!(binary, linear);
    if let ThresholdResult::Pps(rate) = binary {
        println!("\nbinary search and linear scan agree: arduino HP threshold = {rate} PPS");
    }
    Ok(())
}
