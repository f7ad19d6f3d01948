//! Thirty minutes of idle per-second energy metering.
//!
//! Each device's meter samples voltage, current, watts and joules once per
//! second; at idle every sample stays inside the device's baseline band.
//!
//! ```bash
//! cargo run -p ec-attack-sim --example baseline_energy
//! ```

use ec_attack_sim::campaign::default_ap;
use ec_attack_sim::device::{arduino_profile, raspberry_pi_profile};
use ec_attack_sim::Simulation;

fn main() -> ec_attack_sim::Result<()> {
    let mut sim = Simulation::new(5);
    let ap = sim.add_ap(default_ap());
    let rpi = sim.add_device("raspberry_pi", raspberry_pi_profile());
    let ard = sim.add_device("arduino", arduino_profile());
    sim.associate(rpi, ap)?;
    sim.associate(ard, ap)?;

    sim.advance_by(30 * 60)?;

    for id in [rpi, ard] {
        let trace = sim.meter_trace(id);
        let mean = trace.iter().map(|s| s.joules).sum::<f64>() / trace.len() as f64;
        let min = trace.iter().map(|s| s.joules).fold(f64::INFINITY, f64::min);
        let max = trace.iter().map(|s| s.joules).fold(0.0, f64::max);
        let band = sim.device_profile(id).e_base;
        println!(
            "{:<14} {} samples: mean {:.4} J/s, range [{:.4}, {:.4}], band [{}, {}]",
            sim.device_name(id),
            trace.len(),
            mean,
            min,
            max,
            band.0,
            band.1
        );
    }

    let sample = sim.sample_meter(rpi)?;
    println!(
        "\nlatest raspberry_pi reading: {:.3} V, {:.4} A, {:.4} W, {:.4} J",
        sample.voltage, sample.current, sample.watts, sample.joules
    );
    Ok(())
}
