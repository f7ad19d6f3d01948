//! Artifact emission: campaign reports as JSON, per-phase traces and
//! plot-ready figure data as CSV, plus the strict parsers that read them
//! back. All numeric output is fixed at 6 significant digits so identical
//! runs produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::campaign::{self, CampaignReport, TraceArtifact};
use crate::config::ScenarioConfig;
use crate::device::{PayloadClass, Protocol};
use crate::error::{Result, SimError};
use crate::netsim::{SampleRecord, Simulation};

/// Round to 6 significant digits; the fixed precision of all emitted output.
pub fn round6(x: f64) -> f64 {
    round_sig(x, 6)
}

fn round_sig(x: f64, sig: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(sig - 1 - magnitude);
    (x * factor).round() / factor
}

/// Format a number for CSV output: shortest decimal form of the value
/// rounded to 6 significant digits, decimal point only.
pub fn fmt6(x: f64) -> String {
    let rounded = round6(x);
    if rounded == rounded.trunc() && rounded.abs() < 1e15 {
        format!("{}", rounded as i64)
    } else {
        format!("{rounded}")
    }
}

/// Exact header of per-phase trace CSV files.
pub const TRACE_HEADER: &str = "t,joules,received_pps,associated";

/// Write one per-phase trace as CSV.
pub fn write_trace_csv<W: Write>(writer: &mut W, trace: &TraceArtifact) -> Result<()> {
    writeln!(writer, "{TRACE_HEADER}")?;
    for s in &trace.samples {
        writeln!(
            writer,
            "{},{},{},{}",
            s.t,
            fmt6(s.joules),
            fmt6(s.received_pps),
            u8::from(s.associated)
        )?;
    }
    Ok(())
}

fn trace_file_name(trace: &TraceArtifact) -> String {
    format!("trace_{}_{}.csv", trace.device, trace.phase)
}

/// Write the campaign report JSON and every per-phase trace CSV under `dir`.
/// Returns the written paths in a deterministic order.
pub fn emit_campaign_artifacts(report: &CampaignReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let json_path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(&json_path, json)?;
    written.push(json_path);

    for trace in &report.traces {
        let path = dir.join(trace_file_name(trace));
        let mut buffer = Vec::new();
        write_trace_csv(&mut buffer, trace)?;
        fs::write(&path, buffer)?;
        written.push(path);
    }
    Ok(written)
}

/// Load a previously emitted campaign report.
pub fn load_report(dir: &Path) -> Result<CampaignReport> {
    let content = fs::read_to_string(dir.join("report.json"))?;
    Ok(serde_json::from_str(&content)?)
}

/// Identifier of a reproducible figure or table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Per-second meter output (voltage, current, watts, joules) at idle.
    Fig5,
    /// Raspberry-Pi-class energy traces under EC-DDoS floods.
    Fig6,
    /// Arduino-class energy traces under EC-DDoS floods.
    Fig7,
    /// Energy traces under fake-AP injection.
    Fig8,
    /// Attribution split of above-baseline energy across attack sources.
    Fig9,
    /// Port-scan grid.
    Table1,
    /// Survival-duration grid at threshold rates.
    Table2,
}

impl FigureId {
    pub fn label(self) -> &'static str {
        match self {
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
            FigureId::Table1 => "table1",
            FigureId::Table2 => "table2",
        }
    }

    pub const ALL: [FigureId; 7] = [
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
        FigureId::Table1,
        FigureId::Table2,
    ];
}

impl std::str::FromStr for FigureId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fig5" => Ok(FigureId::Fig5),
            "fig6" => Ok(FigureId::Fig6),
            "fig7" => Ok(FigureId::Fig7),
            "fig8" => Ok(FigureId::Fig8),
            "fig9" => Ok(FigureId::Fig9),
            "table1" => Ok(FigureId::Table1),
            "table2" => Ok(FigureId::Table2),
            other => Err(format!("unknown figure id: {other}")),
        }
    }
}

fn missing_phase(figure: FigureId, phase: &str) -> SimError {
    SimError::MissingPhase {
        figure: figure.label().to_string(),
        phase: phase.to_string(),
    }
}

/// Emit the data file of one figure under `dir`, reading the report and
/// trace artifacts a prior campaign run wrote there as needed.
///
/// `table1` and `table2` run their own short probes and need no prior run.
pub fn emit_figure_data(config: &ScenarioConfig, figure: FigureId, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.csv", figure.label()));
    let mut out = Vec::new();
    match figure {
        FigureId::Table1 => emit_table1(config, &mut out)?,
        FigureId::Table2 => emit_table2(config, &mut out)?,
        FigureId::Fig5 => emit_fig5(config, dir, &mut out)?,
        FigureId::Fig6 => emit_ec_traces(FigureId::Fig6, "raspberry_pi", dir, &mut out)?,
        FigureId::Fig7 => emit_ec_traces(FigureId::Fig7, "arduino", dir, &mut out)?,
        FigureId::Fig8 => emit_fig8(dir, &mut out)?,
        FigureId::Fig9 => emit_fig9(dir, &mut out)?,
    }
    fs::write(&path, out)?;
    Ok(path)
}

fn emit_table1<W: Write>(config: &ScenarioConfig, out: &mut W) -> Result<()> {
    writeln!(out, "# table1: port-scan tallies per device and protocol")?;
    writeln!(out, "device,protocol,open,open_filtered,filtered,closed")?;
    let mut sim = Simulation::new(config.seed.unwrap_or(0));
    let ap = sim.add_ap(config.access_point());
    let mut ids = Vec::new();
    for (name, profile) in config.resolved_devices()? {
        let id = sim.add_device(&name, profile);
        sim.associate(id, ap)?;
        ids.push(id);
    }
    for id in ids {
        for protocol in [Protocol::TcpSyn, Protocol::Udp] {
            let scan = sim.scan_ports(id, protocol, None)?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                scan.device, protocol.label(), scan.open, scan.open_filtered, scan.filtered,
                scan.closed
            )?;
        }
    }
    Ok(())
}

fn emit_table2<W: Write>(config: &ScenarioConfig, out: &mut W) -> Result<()> {
    writeln!(out, "# table2: survival duration in minutes at the threshold rate")?;
    writeln!(out, "device,protocol,payload,sd_minutes")?;
    let seed = config.seed.unwrap_or(0);
    for (name, profile) in config.resolved_devices()? {
        for protocol in [Protocol::Icmp, Protocol::TcpSyn, Protocol::Udp] {
            for payload in [PayloadClass::Np, PayloadClass::Hp] {
                let cell = match profile.threshold_rate(payload) {
                    Some(rate) => {
                        campaign::measure_sd(&profile, protocol, payload, rate, 8, seed)?
                            .map(fmt6)
                            .unwrap_or_else(|| "none".to_string())
                    }
                    None => "none".to_string(),
                };
                writeln!(out, "{},{},{},{}", name, protocol.label(), payload.label(), cell)?;
            }
        }
    }
    Ok(())
}

fn emit_fig5<W: Write>(config: &ScenarioConfig, dir: &Path, out: &mut W) -> Result<()> {
    writeln!(out, "# fig5: per-second meter samples at idle baseline")?;
    writeln!(out, "device,t,voltage,current,watts,joules")?;
    let mut any = false;
    for (name, profile) in config.resolved_devices()? {
        let path = dir.join(format!("trace_{name}_baseline.csv"));
        if !path.exists() {
            continue;
        }
        any = true;
        let samples = load_trace_csv(&path)?;
        for s in samples {
            let watts = s.joules;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                name,
                s.t,
                fmt6(profile.nominal_voltage),
                fmt6(watts / profile.nominal_voltage),
                fmt6(watts),
                fmt6(s.joules)
            )?;
        }
    }
    if !any {
        return Err(missing_phase(FigureId::Fig5, "baseline"));
    }
    Ok(())
}

fn emit_ec_traces<W: Write>(
    figure: FigureId,
    device_class: &str,
    dir: &Path,
    out: &mut W,
) -> Result<()> {
    let report = load_report(dir)?;
    writeln!(out, "# {}: energy traces under EC-DDoS floods", figure.label())?;
    writeln!(out, "device,protocol,t,joules")?;
    let mut any = false;
    for attack in &report.attacks {
        if attack.kind != campaign::AttackKind::EcDdos {
            continue;
        }
        if !attack.device.contains(device_class) {
            continue;
        }
        let phase = format!("ecddos_{}_{}", attack.protocol.label(), attack.payload.label());
        let path = dir.join(format!("trace_{}_{}.csv", attack.device, phase));
        if !path.exists() {
            continue;
        }
        any = true;
        for s in load_trace_csv(&path)? {
            writeln!(
                out,
                "{},{},{},{}",
                attack.device,
                attack.protocol.label(),
                s.t,
                fmt6(s.joules)
            )?;
        }
    }
    if !any {
        return Err(missing_phase(figure, "ecddos"));
    }
    Ok(())
}

fn emit_fig8<W: Write>(dir: &Path, out: &mut W) -> Result<()> {
    let report = load_report(dir)?;
    writeln!(out, "# fig8: energy traces under fake-AP injection")?;
    writeln!(out, "device,t,joules")?;
    if report.fap.is_empty() {
        return Err(missing_phase(FigureId::Fig8, "fap"));
    }
    for record in &report.fap {
        let path = dir.join(format!("trace_{}_fap.csv", record.device));
        if !path.exists() {
            return Err(missing_phase(FigureId::Fig8, "fap"));
        }
        for s in load_trace_csv(&path)? {
            writeln!(out, "{},{},{}", record.device, s.t, fmt6(s.joules))?;
        }
    }
    Ok(())
}

fn emit_fig9<W: Write>(dir: &Path, out: &mut W) -> Result<()> {
    let report = load_report(dir)?;
    let attribution = report
        .attribution
        .ok_or_else(|| missing_phase(FigureId::Fig9, "attribution"))?;
    writeln!(out, "# fig9: above-baseline energy fractions per attack source")?;
    writeln!(out, "source,fraction")?;
    writeln!(out, "ec_ddos,{}", fmt6(attribution.ec_ddos))?;
    writeln!(out, "fap,{}", fmt6(attribution.fap))?;
    Ok(())
}

/// Strict CSV reading: exact expected header (after any leading `#` comment
/// lines), LF endings, uniform column count.
pub fn parse_strict_csv(content: &str, expected_header: &str) -> Result<Vec<Vec<String>>> {
    if content.contains('\r') {
        return Err(SimError::ConfigParse("CSV contains CR characters".to_string()));
    }
    let mut lines = content.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| SimError::ConfigParse("empty CSV".to_string()))?;
    if header != expected_header {
        return Err(SimError::ConfigParse(format!(
            "CSV header mismatch: got {header:?}, want {expected_header:?}"
        )));
    }
    let columns = expected_header.split(',').count();
    let mut rows = Vec::new();
    for (index, line) in lines.enumerate() {
        let fields: Vec<String> = line.split(',').map(str::to_string).collect();
        if fields.len() != columns {
            return Err(SimError::ConfigParse(format!(
                "CSV row {} has {} fields, want {columns}",
                index + 2,
                fields.len()
            )));
        }
        rows.push(fields);
    }
    Ok(rows)
}

fn parse_f64(field: &str) -> Result<f64> {
    if field.contains(',') || field.contains(' ') {
        return Err(SimError::ConfigParse(format!("malformed number: {field:?}")));
    }
    field
        .parse::<f64>()
        .map_err(|e| SimError::ConfigParse(format!("malformed number {field:?}: {e}")))
}

/// Read back a per-phase trace CSV. The attack-source tag is not part of
/// the wire format, so it comes back as `None`.
pub fn load_trace_csv(path: &Path) -> Result<Vec<SampleRecord>> {
    let content = fs::read_to_string(path)?;
    let rows = parse_strict_csv(&content, TRACE_HEADER)?;
    let mut samples = Vec::new();
    for row in rows {
        samples.push(SampleRecord {
            t: row[0]
                .parse::<u64>()
                .map_err(|e| SimError::ConfigParse(format!("bad t {:?}: {e}", row[0])))?,
            joules: parse_f64(&row[1])?,
            received_pps: parse_f64(&row[2])?,
            associated: row[3] == "1",
            source: None,
        });
    }
    Ok(samples)
}

/// Exclusive lock on an output directory for the duration of a run.
pub struct OutDirLock {
    path: PathBuf,
}

impl OutDirLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(".ec-attack-sim.lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(OutDirLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(SimError::OutputLocked(dir.display().to_string()))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for OutDirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
