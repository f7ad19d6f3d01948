//! Packet-reception saturation: what the victim actually processes as the
//! attacker raises the send rate.
//!
//! Reception is lossless up to the device's linear limit, then grows
//! logarithmically; the Raspberry-Pi curve is calibrated so that a
//! 15000 PPS flood is received as about 14544 PPS.
//!
//! ```bash
//! cargo run -p ec-attack-sim --example reception_curve
//! ```

use ec_attack_sim::device::{arduino_profile, raspberry_pi_profile, reception_rate};

fn main() {
    let rpi = raspberry_pi_profile();
    let ard = arduino_profile();

    println!("{:>9} {:>14} {:>12}", "sent", "raspberry_pi", "arduino");
    for sent in [
        100u32, 500, 1_000, 5_000, 10_000, 12_000, 15_000, 20_000, 50_000, 100_000,
    ] {
        println!(
            "{:>9} {:>14.1} {:>12.1}",
            sent,
            reception_rate(f64::from(sent), &rpi),
            reception_rate(f64::from(sent), &ard),
        );
    }

    let calibration = reception_rate(15_000.0, &rpi);
    println!("\ncalibration point: 15000 PPS -> {calibration:.1} PPS received");
}
