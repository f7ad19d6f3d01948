//! The full attack campaign end to end: baseline metering, network scan,
//! EC-DDoS, DDoS disconnection, fake-AP takeover with injection, and the
//! final attack-energy attribution split.
//!
//! Writes the report JSON and per-phase trace CSVs under ./out (or
//! $EC_ATTACK_SIM_OUT) and prints a summary.
//!
//! ```bash
//! cargo run -p ec-attack-sim --example full_campaign
//! ```

use std::path::PathBuf;

use ec_attack_sim::campaign::{run_full_campaign, CampaignPlan};
use ec_attack_sim::report::emit_campaign_artifacts;

fn main() -> ec_attack_sim::Result<()> {
    let plan = CampaignPlan::default_plan(42);
    let report = run_full_campaign(&plan)?;

    println!("baseline:");
    for stats in &report.baseline {
        println!(
            "  {:<14} mean {:.4} J/s over {} min (band [{}, {}])",
            stats.device, stats.mean_jps, stats.minutes, stats.band.0, stats.band.1
        );
    }

    println!("\nattacks:");
    for attack in &report.attacks {
        let outcome = match attack.disconnect_minutes {
            Some(sd) => format!("disconnected after {sd:.2} min"),
            None => "stayed associated".to_string(),
        };
        println!(
            "  {:<14} {:?} {} {} at {} PPS: peak {:.3} J/s, {}",
            attack.device,
            attack.kind,
            attack.protocol.label(),
            attack.payload.label(),
            attack.rate_pps,
            attack.peak_jps,
            outcome
        );
    }

    println!("\nfake AP:");
    for record in &report.fap {
        println!(
            "  {:<14} connected after {:.2} min ({} attempt(s)), injection steady {:.3} J/s",
            record.device,
            record.connect_minutes.unwrap_or(f64::NAN),
            record.attempts.len(),
            record.steady_jps
        );
    }

    if let Some(attribution) = report.attribution {
        println!(
            "\nattribution of above-baseline energy: EC-DDoS {:.1}%, fake AP {:.1}%",
            attribution.ec_ddos * 100.0,
            attribution.fap * 100.0
        );
    }
    for comparison in &report.energy_comparison {
        println!(
            "  {:<14} E1 {:.4} J/s -> E2 {:.4} J/s",
            comparison.device, comparison.e1_jps, comparison.e2_jps
        );
    }

    let dir = std::env::var("EC_ATTACK_SIM_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|_| PathBuf::from("out"));
    let written = emit_campaign_artifacts(&report, &dir)?;
    println!("\nartifacts:");
    for path in written {
        println!("  {}", path.display());
    }
    Ok(())
}
