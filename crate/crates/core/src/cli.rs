//! Command-line front end. Exit statuses: 0 success, 1 runtime error,
//! 2 validation error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::attacker::PortSelector;
use crate::campaign::{self, ThresholdResult};
use crate::config::{self, ScenarioConfig};
use crate::device::{PayloadClass, Protocol};
use crate::error::{Result, SimError};
use crate::report::{self, FigureId, OutDirLock};
use crate::{FloodSpec, Simulation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

/// Environment variable providing the default output directory.
pub const OUT_ENV: &str = "EC_ATTACK_SIM_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "ec-attack-sim",
    about = "Deterministic simulator of DDoS, EC-DDoS and fake-AP energy attacks on smart-healthcare devices",
    version
)]
pub struct Cli {
    /// Scenario config file (TOML). Optional; defaults apply without it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Seed override (takes precedence over the config's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory. Falls back to the config, then $EC_ATTACK_SIM_OUT,
    /// then "./out".
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Network scan plus a port scan of one device; prints JSON.
    Scan(ScanArgs),
    /// Run a single flood and report its counters and trace.
    Flood(FloodArgs),
    /// Search the minimum attack rate that disconnects a device.
    Threshold(ThresholdArgs),
    /// Run the full campaign and write its artifacts.
    Campaign,
    /// Emit plot-ready data for one figure or table.
    Emit(EmitArgs),
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Device name to port-scan.
    #[arg(long)]
    pub device: String,
    #[arg(long)]
    pub protocol: Protocol,
    /// Port range "lo:hi"; defaults to the device's full table.
    #[arg(long)]
    pub range: Option<String>,
}

#[derive(Debug, Args)]
pub struct FloodArgs {
    #[arg(long)]
    pub device: String,
    #[arg(long)]
    pub protocol: Protocol,
    #[arg(long)]
    pub payload: PayloadClass,
    /// Attack rate in packets per second.
    #[arg(long)]
    pub rate: u32,
    /// Attack window in minutes (8-30).
    #[arg(long, default_value_t = 8)]
    pub duration_min: u32,
    /// Concrete destination port.
    #[arg(long, conflicts_with = "port_class")]
    pub port: Option<u32>,
    /// Port-state class to target: open, closed, filtered, open_filtered.
    #[arg(long)]
    pub port_class: Option<String>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub device: String,
    #[arg(long)]
    pub protocol: Protocol,
    #[arg(long)]
    pub payload: PayloadClass,
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    /// fig5, fig6, fig7, fig8, fig9, table1 or table2.
    #[arg(long)]
    pub figure: String,
}

impl clap::builder::ValueParserFactory for Protocol {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Protocol>())
    }
}

impl clap::builder::ValueParserFactory for PayloadClass {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<PayloadClass>())
    }
}

/// Run the CLI and map the outcome onto the exit-status contract.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn load_scenario(cli: &Cli) -> Result<ScenarioConfig> {
    let mut config = match &cli.config {
        Some(path) => config::load_config(path)?,
        None => ScenarioConfig::default_with_seed(cli.seed.unwrap_or(0)),
    };
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(cli: &Cli, config: &ScenarioConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var(OUT_ENV).ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn build_simulation(config: &ScenarioConfig) -> Result<(Simulation, usize)> {
    let mut sim = Simulation::new(config.seed.unwrap_or(0));
    let ap = sim.add_ap(config.access_point());
    for (name, profile) in config.resolved_devices()? {
        let id = sim.add_device(&name, profile);
        sim.associate(id, ap)?;
    }
    Ok((sim, ap))
}

fn execute(cli: Cli) -> Result<()> {
    let config = load_scenario(&cli)?;
    let dir = out_dir(&cli, &config);
    match &cli.command {
        Command::Scan(args) => cmd_scan(&config, args, &dir),
        Command::Flood(args) => cmd_flood(&config, args, &dir),
        Command::Threshold(args) => cmd_threshold(&config, args),
        Command::Campaign => cmd_campaign(&config, &dir),
        Command::Emit(args) => cmd_emit(&config, args, &dir),
    }
}

fn parse_range(range: &str) -> Result<(u32, u32)> {
    let (lo, hi) = range
        .split_once(':')
        .ok_or_else(|| SimError::InvalidFloodSpec(format!("range must be lo:hi, got {range}")))?;
    let lo = lo
        .parse()
        .map_err(|e| SimError::InvalidFloodSpec(format!("bad range: {e}")))?;
    let hi = hi
        .parse()
        .map_err(|e| SimError::InvalidFloodSpec(format!("bad range: {e}")))?;
    Ok((lo, hi))
}

fn cmd_scan(config: &ScenarioConfig, args: &ScanArgs, dir: &Path) -> Result<()> {
    let (mut sim, _) = build_simulation(config)?;
    let device = sim.device_by_name(&args.device)?;
    let network = sim.scan_network()?;
    let range = args.range.as_deref().map(parse_range).transpose()?;
    let ports = sim.scan_ports(device, args.protocol, range)?;
    let output = serde_json::json!({ "network": network, "ports": ports });
    let mut text = serde_json::to_string_pretty(&output)?;
    text.push('\n');
    print!("{text}");
    let _lock = OutDirLock::acquire(dir)?;
    std::fs::write(dir.join("scan.json"), text)?;
    Ok(())
}

fn cmd_flood(config: &ScenarioConfig, args: &FloodArgs, dir: &Path) -> Result<()> {
    let mut spec = FloodSpec::new(args.protocol, &args.device, args.rate, args.payload)
        .with_duration_min(args.duration_min);
    if let Some(port) = args.port {
        spec = spec.with_port(PortSelector::Port(port));
    }
    if let Some(class) = &args.port_class {
        let class = class
            .parse::<crate::device::PortState>()
            .map_err(SimError::InvalidFloodSpec)?;
        spec = spec.with_port(PortSelector::Class(class));
    }
    spec.validate()?;

    let (mut sim, _) = build_simulation(config)?;
    let device = sim.device_by_name(&args.device)?;
    let flood = sim.launch_flood(spec.clone())?;
    sim.advance_by(u64::from(args.duration_min) * 60)?;
    let counters = sim.stop_flood(flood);

    let summary = serde_json::json!({
        "spec": spec,
        "sent": counters.sent,
        "delivered": counters.delivered,
        "dropped": counters.dropped,
        "processed": report::round6(counters.processed),
        "disconnected_at_s": counters.disconnected_target_at,
        "still_associated": sim.association(device).bound.is_connected(),
    });
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    print!("{text}");

    let _lock = OutDirLock::acquire(dir)?;
    std::fs::write(dir.join("flood.json"), text)?;
    let trace = campaign::TraceArtifact {
        device: args.device.clone(),
        phase: format!("flood_{}_{}", spec.protocol.label(), spec.payload.label()),
        samples: sim.meter_trace(device).to_vec(),
    };
    let mut buffer = Vec::new();
    report::write_trace_csv(&mut buffer, &trace)?;
    std::fs::write(
        dir.join(format!("trace_{}_{}.csv", trace.device, trace.phase)),
        buffer,
    )?;
    Ok(())
}

fn cmd_threshold(config: &ScenarioConfig, args: &ThresholdArgs) -> Result<()> {
    let devices = config.resolved_devices()?;
    let (_, profile) = devices
        .iter()
        .find(|(name, _)| *name == args.device)
        .ok_or_else(|| SimError::UnknownDevice(args.device.clone()))?;
    let result = campaign::find_threshold_ar(
        profile,
        args.protocol,
        args.payload,
        config.campaign.max_attack_minutes,
        config.seed.unwrap_or(0),
    )?;
    match result {
        ThresholdResult::Pps(rate) => println!("{rate}"),
        ThresholdResult::Unbounded => println!("unbounded"),
    }
    Ok(())
}

fn cmd_campaign(config: &ScenarioConfig, dir: &Path) -> Result<()> {
    let plan = config.to_plan(None)?;
    let report = campaign::run_full_campaign(&plan)?;
    let _lock = OutDirLock::acquire(dir)?;
    let written = report::emit_campaign_artifacts(&report, dir)?;
    for path in &written {
        println!("{}", path.display());
    }
    if let Some(failure) = &report.failure {
        return Err(SimError::PhaseOrder(format!("campaign failed: {failure}")));
    }
    Ok(())
}

fn cmd_emit(config: &ScenarioConfig, args: &EmitArgs, dir: &Path) -> Result<()> {
    let figure: FigureId = args
        .figure
        .parse()
        .map_err(SimError::InvalidFloodSpec)?;
    let path = report::emit_figure_data(config, figure, dir)?;
    println!("{}", path.display());
    Ok(())
}
