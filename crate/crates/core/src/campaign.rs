//! Campaign orchestrator: runs the full attack sequence end to end
//! (baseline, scan, EC-DDoS, DDoS disconnect, fake-AP takeover) and the
//! measurement procedures for threshold attack rates, survival durations
//! and energy attribution.

use serde::{Deserialize, Serialize};

use crate::attacker::{FloodSpec, ScanReport};
use crate::device::{DeviceProfile, PayloadClass, PortState, Protocol, RATE_CAP};
use crate::error::{Result, SimError};
use crate::netsim::{
    AccessPoint, AttractAttempt, Binding, Bssid, DeviceId, FloodOrigin, SampleRecord, Simulation,
};
use crate::report::round6;

/// One cell of the campaign's attack matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackTemplate {
    pub protocol: Protocol,
    pub payload: PayloadClass,
    pub port_class: PortState,
}

/// Fake-AP phase parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FapPlan {
    pub enabled: bool,
    /// Signal advantage of the fake AP over the legitimate one.
    pub signal_margin: f64,
    pub injection_protocol: Protocol,
    pub injection_payload: PayloadClass,
    /// Injection duration in minutes; the shipped default balances the
    /// attribution split between flood phases and the fake AP.
    pub injection_minutes: u32,
}

impl Default for FapPlan {
    fn default() -> Self {
        FapPlan {
            enabled: true,
            signal_margin: 10.0,
            injection_protocol: Protocol::Icmp,
            injection_payload: PayloadClass::Np,
            injection_minutes: 19,
        }
    }
}

/// Full description of a campaign run.
#[derive(Debug, Clone)]
pub struct CampaignPlan {
    /// (device name, profile) pairs, in scenario order.
    pub devices: Vec<(String, DeviceProfile)>,
    pub ap: AccessPoint,
    pub baseline_minutes: u32,
    pub ec_minutes: u32,
    pub attack_matrix: Vec<AttackTemplate>,
    pub fap: FapPlan,
    /// DDoS attack window in minutes, 8 to 30.
    pub max_attack_minutes: u32,
    pub seed: u64,
}

impl CampaignPlan {
    /// The default two-device plan with the calibrated phase durations.
    pub fn default_plan(seed: u64) -> Self {
        CampaignPlan {
            devices: vec![
                (
                    "raspberry_pi".to_string(),
                    crate::device::raspberry_pi_profile(),
                ),
                ("arduino".to_string(), crate::device::arduino_profile()),
            ],
            ap: default_ap(),
            baseline_minutes: 30,
            ec_minutes: 30,
            attack_matrix: vec![AttackTemplate {
                protocol: Protocol::Icmp,
                payload: PayloadClass::Np,
                port_class: PortState::Open,
            }],
            fap: FapPlan::default(),
            max_attack_minutes: 8,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if self.devices.is_empty() {
            violations.push("device list is empty".to_string());
        }
        if self.baseline_minutes < 30 {
            violations.push(format!(
                "baseline_minutes {} below the 30-minute minimum",
                self.baseline_minutes
            ));
        }
        if self.attack_matrix.is_empty() {
            violations.push("attack matrix is empty".to_string());
        }
        if !(8..=30).contains(&self.ec_minutes) {
            violations.push(format!("ec_minutes {} outside [8, 30]", self.ec_minutes));
        }
        if !(8..=30).contains(&self.max_attack_minutes) {
            violations.push(format!(
                "max_attack_minutes {} outside [8, 30]",
                self.max_attack_minutes
            ));
        }
        if self.fap.enabled && !(8..=30).contains(&self.fap.injection_minutes) {
            violations.push(format!(
                "fap.injection_minutes {} outside [8, 30]",
                self.fap.injection_minutes
            ));
        }
        if self.fap.enabled && self.fap.signal_margin <= 0.0 {
            violations.push("fap.signal_margin must be positive".to_string());
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(SimError::ConfigInvalid(violations))
        }
    }

    /// EC-DDoS spec for a template: the highest rate below the threshold.
    pub fn ec_spec(&self, device: &str, profile: &DeviceProfile, template: &AttackTemplate) -> FloodSpec {
        FloodSpec::new(
            template.protocol,
            device,
            profile.near_threshold_rate(template.payload),
            template.payload,
        )
        .with_port_class(template.protocol, template.port_class)
        .with_duration_min(self.ec_minutes)
    }

    /// DDoS spec for a template: the threshold rate itself (the cap when the
    /// device has no finite threshold).
    pub fn ddos_spec(&self, device: &str, profile: &DeviceProfile, template: &AttackTemplate) -> FloodSpec {
        let rate = profile.threshold_rate(template.payload).unwrap_or(RATE_CAP);
        FloodSpec::new(template.protocol, device, rate, template.payload)
            .with_port_class(template.protocol, template.port_class)
            .with_duration_min(self.max_attack_minutes)
    }
}

impl FloodSpec {
    fn with_port_class(self, protocol: Protocol, class: PortState) -> Self {
        if protocol == Protocol::Icmp {
            self
        } else {
            self.with_port(crate::attacker::PortSelector::Class(class))
        }
    }
}

/// Legitimate AP used when a scenario does not configure one.
pub fn default_ap() -> AccessPoint {
    AccessPoint {
        ssid: "mednet".to_string(),
        bssid: Bssid::from_index(1),
        channel: 6,
        security_profile: "wpa2-psk".to_string(),
        signal_dbm: -50.0,
        is_fake: false,
    }
}

/// Per-device baseline statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineStats {
    pub device: String,
    pub minutes: u32,
    pub mean_jps: f64,
    pub band: (f64, f64),
    pub all_samples_in_band: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    EcDdos,
    Ddos,
}

/// Outcome of one attack phase against one device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackRecord {
    pub device: String,
    pub kind: AttackKind,
    pub protocol: Protocol,
    pub payload: PayloadClass,
    pub rate_pps: u32,
    pub duration_min: u32,
    /// Steady-state reception rate observed at the victim.
    pub received_pps: f64,
    pub peak_jps: f64,
    pub mean_jps: f64,
    /// Minutes from attack start to the induced disconnection, if any.
    pub disconnect_minutes: Option<f64>,
    /// The profile's threshold rate for this payload; absent when unbounded.
    pub threshold_ar_pps: Option<u32>,
    pub start_t: u64,
    pub end_t: u64,
}

/// Outcome of the fake-AP phase for one device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FapRecord {
    pub device: String,
    /// Wall-clock minutes from attract start to association.
    pub connect_minutes: Option<f64>,
    pub attempts: Vec<AttractAttempt>,
    pub injection_protocol: Protocol,
    pub injection_rate_pps: u32,
    pub injection_minutes: u32,
    /// Steady-state injection energy, J/s.
    pub steady_jps: f64,
    pub start_t: u64,
    pub end_t: u64,
}

/// Fractions of above-baseline joules per attack source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub ec_ddos: f64,
    pub fap: f64,
}

/// Before/after energy aggregates per device (the campaign's energy
/// comparison driving continuation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyComparison {
    pub device: String,
    /// Mean J/s before any attack.
    pub e1_jps: f64,
    /// Mean J/s over all attack-phase seconds.
    pub e2_jps: f64,
}

/// One emitted per-phase trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceArtifact {
    pub device: String,
    pub phase: String,
    pub samples: Vec<SampleRecord>,
}

/// Full output of a campaign run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema_version: u32,
    pub seed: u64,
    pub baseline: Vec<BaselineStats>,
    pub attacks: Vec<AttackRecord>,
    pub fap: Vec<FapRecord>,
    pub attribution: Option<Attribution>,
    pub energy_comparison: Vec<EnergyComparison>,
    pub failure: Option<String>,
    /// Per-phase traces; emitted as CSV, not serialized into the JSON report.
    #[serde(skip)]
    pub traces: Vec<TraceArtifact>,
}

/// A campaign in progress: owns the simulation and enforces phase order.
pub struct Campaign {
    sim: Simulation,
    plan: CampaignPlan,
    devices: Vec<DeviceId>,
    baseline_done: bool,
    report: CampaignReport,
}

impl Campaign {
    pub fn new(plan: CampaignPlan) -> Result<Self> {
        plan.validate()?;
        let mut sim = Simulation::new(plan.seed);
        let legit = sim.add_ap(plan.ap.clone());
        let mut devices = Vec::new();
        for (name, profile) in &plan.devices {
            let id = sim.add_device(name, profile.clone());
            sim.power_on(id);
            sim.associate(id, legit)?;
            devices.push(id);
        }
        let report = CampaignReport {
            schema_version: 1,
            seed: plan.seed,
            baseline: Vec::new(),
            attacks: Vec::new(),
            fap: Vec::new(),
            attribution: None,
            energy_comparison: Vec::new(),
            failure: None,
            traces: Vec::new(),
        };
        Ok(Campaign {
            sim,
            plan,
            devices,
            baseline_done: false,
            report,
        })
    }

    pub fn simulation(&self) -> &Simulation {
        &self.sim
    }

    pub fn simulation_mut(&mut self) -> &mut Simulation {
        &mut self.sim
    }

    pub fn device_ids(&self) -> &[DeviceId] {
        &self.devices
    }

    fn trace_slice(&self, id: DeviceId, start: u64, end: u64) -> Vec<SampleRecord> {
        self.sim
            .meter_trace(id)
            .iter()
            .filter(|s| s.t >= start && s.t < end)
            .copied()
            .collect()
    }

    fn push_trace(&mut self, id: DeviceId, phase: &str, start: u64, end: u64) {
        let samples = self.trace_slice(id, start, end);
        self.report.traces.push(TraceArtifact {
            device: self.sim.device_name(id).to_string(),
            phase: phase.to_string(),
            samples,
        });
    }

    /// Collect at least 30 minutes of idle per-second samples per device.
    pub fn run_phase_baseline(&mut self) -> Result<&[BaselineStats]> {
        if self.baseline_done {
            return Err(SimError::PhaseOrder("baseline already ran".to_string()));
        }
        for id in &self.devices {
            if !self.sim.is_powered(*id) || !self.sim.association(*id).bound.is_connected() {
                return Err(SimError::HostDown(self.sim.device_name(*id).to_string()));
            }
        }
        let start = self.sim.now();
        let secs = u64::from(self.plan.baseline_minutes) * 60;
        self.sim.advance_by(secs)?;
        let end = self.sim.now();

        for id in self.devices.clone() {
            let samples = self.trace_slice(id, start, end);
            let profile = self.sim.device_profile(id);
            let band = profile.e_base;
            let mean = samples.iter().map(|s| s.joules).sum::<f64>() / samples.len() as f64;
            let all_in = samples.iter().all(|s| s.joules >= band.0 && s.joules <= band.1);
            self.report.baseline.push(BaselineStats {
                device: self.sim.device_name(id).to_string(),
                minutes: self.plan.baseline_minutes,
                mean_jps: round6(mean),
                band,
                all_samples_in_band: all_in,
            });
            self.push_trace(id, "baseline", start, end);
        }
        self.baseline_done = true;
        Ok(&self.report.baseline)
    }

    /// Network scan of every device (one tick).
    pub fn run_phase_scan(&mut self) -> Result<ScanReport> {
        self.sim.scan_network()
    }

    fn require_baseline(&self) -> Result<()> {
        if !self.baseline_done {
            return Err(SimError::PhaseOrder(
                "EC-DDoS requires a completed baseline phase".to_string(),
            ));
        }
        Ok(())
    }

    fn baseline_mean(&self, device: &str) -> f64 {
        self.report
            .baseline
            .iter()
            .find(|b| b.device == device)
            .map(|b| b.mean_jps)
            .unwrap_or(0.0)
    }

    /// Run one below-threshold energy-consumption flood against one device.
    pub fn run_phase_ecddos(&mut self, id: DeviceId, spec: FloodSpec) -> Result<AttackRecord> {
        self.require_baseline()?;
        let record = self.launch_attacks(vec![(id, spec)], AttackKind::EcDdos)?;
        Ok(record.into_iter().next().expect("one record per launched spec"))
    }

    /// Run one at-or-above-threshold flood until the device disconnects or
    /// the attack window ends.
    pub fn run_phase_ddos_disconnect(&mut self, id: DeviceId, spec: FloodSpec) -> Result<AttackRecord> {
        self.require_baseline()?;
        let record = self.launch_attacks(vec![(id, spec)], AttackKind::Ddos)?;
        Ok(record.into_iter().next().expect("one record per launched spec"))
    }

    /// Launch a set of floods concurrently (one per device) and advance
    /// through the attack window.
    fn launch_attacks(
        &mut self,
        specs: Vec<(DeviceId, FloodSpec)>,
        kind: AttackKind,
    ) -> Result<Vec<AttackRecord>> {
        let mut launched = Vec::new();
        let start = self.sim.now();
        let mut window_secs = 0u64;
        for (id, spec) in specs {
            let profile = self.sim.device_profile(id);
            let threshold = profile.threshold_rate(spec.payload);
            match kind {
                AttackKind::EcDdos => {
                    if let Some(thr) = threshold {
                        if spec.rate >= thr {
                            return Err(SimError::NotEcDdos { rate: spec.rate, threshold: thr });
                        }
                    }
                }
                AttackKind::Ddos => {}
            }
            window_secs = window_secs.max(u64::from(spec.max_duration_min) * 60);
            let flood = self.sim.launch_flood(spec.clone())?;
            launched.push((id, spec, threshold, flood));
        }
        self.sim.advance_by(window_secs)?;
        let end = self.sim.now();

        let mut records = Vec::new();
        for (id, spec, threshold, flood) in launched {
            let counters = self.sim.flood_counters(flood);
            self.sim.stop_flood(flood);
            let disconnect_minutes = counters
                .disconnected_target_at
                .map(|t| round6((t - start + 1) as f64 / 60.0));
            if kind == AttackKind::EcDdos && disconnect_minutes.is_some() {
                return Err(SimError::PhaseOrder(
                    "EC-DDoS flood disconnected its target".to_string(),
                ));
            }
            let samples = self.trace_slice(id, start, end);
            let attacked: Vec<&SampleRecord> =
                samples.iter().filter(|s| s.source.is_some()).collect();
            let peak = attacked.iter().map(|s| s.joules).fold(0.0, f64::max);
            let mean = if attacked.is_empty() {
                0.0
            } else {
                attacked.iter().map(|s| s.joules).sum::<f64>() / attacked.len() as f64
            };
            let received = attacked.iter().map(|s| s.received_pps).fold(0.0, f64::max);
            let device = self.sim.device_name(id).to_string();
            let phase = format!(
                "{}_{}_{}",
                match kind {
                    AttackKind::EcDdos => "ecddos",
                    AttackKind::Ddos => "ddos",
                },
                spec.protocol.label(),
                spec.payload.label()
            );
            self.push_trace(id, &phase, start, end);
            records.push(AttackRecord {
                device,
                kind,
                protocol: spec.protocol,
                payload: spec.payload,
                rate_pps: spec.rate,
                duration_min: spec.max_duration_min,
                received_pps: round6(received),
                peak_jps: round6(peak),
                mean_jps: round6(mean),
                disconnect_minutes,
                threshold_ar_pps: threshold,
                start_t: start,
                end_t: end,
            });
        }
        self.report.attacks.extend(records.clone());
        Ok(records)
    }

    /// Fake-AP takeover of one disconnected device: attract, monitor, inject.
    pub fn run_phase_fap(&mut self, id: DeviceId) -> Result<FapRecord> {
        let records = self.run_phase_fap_all(&[id])?;
        Ok(records.into_iter().next().expect("one record per device"))
    }

    /// Fake-AP takeover of several devices on the shared timeline.
    pub fn run_phase_fap_all(&mut self, ids: &[DeviceId]) -> Result<Vec<FapRecord>> {
        for id in ids {
            let device = self.sim.device_name(*id).to_string();
            if self.sim.disconnect_events(*id) == 0 {
                return Err(SimError::PhaseOrder(format!(
                    "fake-AP phase for {device} requires a prior disconnect event"
                )));
            }
            match self.sim.association(*id).bound {
                Binding::Legitimate(_) => {
                    return Err(SimError::PhaseOrder(format!(
                        "device {device} reconnected to the legitimate AP first"
                    )));
                }
                Binding::Fake(_) | Binding::Disconnected => {}
            }
        }
        if self.sim.fap_mode().is_none() {
            self.sim.deploy_fake_ap(0, self.plan.fap.signal_margin)?;
        }
        self.sim.fap_start_broadcast()?;

        let attract_start = self.sim.now();
        for id in ids {
            if !self.sim.association(*id).bound.is_connected() {
                self.sim.attract(*id)?;
            }
        }
        // Wait out the attract window: at most three attempts of the widest
        // connect range, plus the successful attempt's own delay.
        let deadline = attract_start
            + ids
                .iter()
                .map(|id| {
                    let range = self.sim.device_profile(*id).fap_connect_range;
                    (range.1 * 60.0).round() as u64 * 4
                })
                .max()
                .unwrap_or(0)
            + 2;
        while self.sim.now() < deadline {
            let pending = ids.iter().any(|id| {
                self.sim.attract_connected_at(*id).is_none() && !self.sim.attract_failed(*id)
            });
            if !pending {
                break;
            }
            self.sim.advance_by(1)?;
        }
        for id in ids {
            if self.sim.attract_connected_at(*id).is_none() {
                return Err(SimError::AttractFailed {
                    device: self.sim.device_name(*id).to_string(),
                    attempts: self.sim.attract_attempts(*id).len() as u32,
                });
            }
        }

        self.sim.fap_enable_monitoring()?;

        let inject_start = self.sim.now();
        let minutes = self.plan.fap.injection_minutes;
        let mut floods = Vec::new();
        for id in ids {
            let profile = self.sim.device_profile(*id);
            let spec = FloodSpec::new(
                self.plan.fap.injection_protocol,
                self.sim.device_name(*id),
                profile.near_threshold_rate(self.plan.fap.injection_payload),
                self.plan.fap.injection_payload,
            )
            .with_duration_min(minutes);
            let flood = self.sim.inject_malicious(*id, spec.clone())?;
            floods.push((*id, spec, flood));
        }
        self.sim.advance_by(u64::from(minutes) * 60)?;
        let end = self.sim.now();

        let mut records = Vec::new();
        for (id, spec, flood) in floods {
            self.sim.stop_flood(flood);
            let samples = self.trace_slice(id, inject_start, end);
            let injected: Vec<&SampleRecord> = samples
                .iter()
                .filter(|s| s.source == Some(FloodOrigin::FakeAp))
                .collect();
            let steady = injected.iter().map(|s| s.joules).fold(0.0, f64::max);
            let connect_minutes = self
                .sim
                .attract_connected_at(id)
                .map(|t| round6((t - attract_start) as f64 / 60.0));
            self.push_trace(id, "fap", attract_start, end);
            let record = FapRecord {
                device: self.sim.device_name(id).to_string(),
                connect_minutes,
                attempts: self.sim.attract_attempts(id),
                injection_protocol: spec.protocol,
                injection_rate_pps: spec.rate,
                injection_minutes: minutes,
                steady_jps: round6(steady),
                start_t: attract_start,
                end_t: end,
            };
            records.push(record.clone());
            self.report.fap.push(record);
        }
        Ok(records)
    }

    /// Close the campaign: compute attribution and energy comparison.
    pub fn finish(mut self) -> CampaignReport {
        let mut targets = Vec::new();
        for id in &self.devices {
            let device = self.sim.device_name(*id).to_string();
            let baseline_mean = self.baseline_mean(&device);
            targets.push((*id, device, baseline_mean));
        }
        let mut ec_joules = 0.0;
        let mut fap_joules = 0.0;
        for (id, device, baseline_mean) in &targets {
            let trace = self.sim.meter_trace(*id);
            let mut attack_sum = 0.0;
            let mut attack_count = 0u64;
            for sample in trace {
                if let Some(origin) = sample.source {
                    let above = sample.joules - baseline_mean;
                    match origin {
                        FloodOrigin::Attacker => ec_joules += above,
                        FloodOrigin::FakeAp => fap_joules += above,
                    }
                    attack_sum += sample.joules;
                    attack_count += 1;
                }
            }
            if attack_count > 0 {
                self.report.energy_comparison.push(EnergyComparison {
                    device: device.clone(),
                    e1_jps: round6(*baseline_mean),
                    e2_jps: round6(attack_sum / attack_count as f64),
                });
            }
        }
        let total = ec_joules + fap_joules;
        if total > 0.0 {
            self.report.attribution = Some(Attribution {
                ec_ddos: round6(ec_joules / total),
                fap: round6(fap_joules / total),
            });
        }
        self.report
    }

    pub fn mark_failure(&mut self, message: String) {
        self.report.failure = Some(message);
    }
}

/// Run every phase of a plan in order: baseline, scan, EC-DDoS, DDoS
/// disconnect, fake AP. Phase errors abort the remaining phases; the
/// partial report is retained with a failure marker.
pub fn run_full_campaign(plan: &CampaignPlan) -> Result<CampaignReport> {
    let mut campaign = Campaign::new(plan.clone())?;
    let outcome = run_phases(&mut campaign, plan);
    if let Err(e) = outcome {
        campaign.mark_failure(e.to_string());
    }
    Ok(campaign.finish())
}

fn run_phases(campaign: &mut Campaign, plan: &CampaignPlan) -> Result<()> {
    campaign.run_phase_baseline()?;
    campaign.run_phase_scan()?;

    let devices = campaign.device_ids().to_vec();
    for template in &plan.attack_matrix {
        let mut specs = Vec::new();
        for id in &devices {
            let name = campaign.simulation().device_name(*id).to_string();
            let profile = campaign.simulation().device_profile(*id).clone();
            specs.push((*id, plan.ec_spec(&name, &profile, template)));
        }
        campaign.launch_attacks(specs, AttackKind::EcDdos)?;
    }
    // The DDoS phase uses the first template; devices with no finite
    // threshold for it survive the window, which is not an error.
    let template = plan.attack_matrix[0];
    let mut specs = Vec::new();
    for id in &devices {
        let name = campaign.simulation().device_name(*id).to_string();
        let profile = campaign.simulation().device_profile(*id).clone();
        specs.push((*id, plan.ddos_spec(&name, &profile, &template)));
    }
    campaign.launch_attacks(specs, AttackKind::Ddos)?;

    if plan.fap.enabled {
        let disconnected: Vec<DeviceId> = devices
            .iter()
            .copied()
            .filter(|id| !campaign.simulation().association(*id).bound.is_connected())
            .collect();
        if !disconnected.is_empty() {
            campaign.run_phase_fap_all(&disconnected)?;
        }
    }
    Ok(())
}

/// Result of a threshold-AR search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdResult {
    Pps(u32),
    /// Even the simulator's rate cap does not disconnect the device.
    Unbounded,
}

impl std::fmt::Display for ThresholdResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdResult::Pps(rate) => write!(f, "{rate}"),
            ThresholdResult::Unbounded => write!(f, "unbounded"),
        }
    }
}

/// Paper-derived search bounds per device class.
fn search_bounds(profile: &DeviceProfile) -> (u32, u32) {
    match profile.device_class.as_str() {
        "raspberry_pi" => (500, 20_000),
        "arduino" => (100, 800),
        _ => (1, RATE_CAP),
    }
}

/// Probe one rate: does the flood disconnect the device within the window?
fn probe_disconnects(
    profile: &DeviceProfile,
    protocol: Protocol,
    payload: PayloadClass,
    rate: u32,
    max_duration_min: u32,
    seed: u64,
) -> Result<bool> {
    let mut sim = Simulation::new(seed);
    let ap = sim.add_ap(default_ap());
    let id = sim.add_device("probe", profile.clone());
    sim.associate(id, ap)?;
    let spec = FloodSpec::new(protocol, "probe", rate, payload)
        .with_duration_min(max_duration_min.clamp(8, 30));
    sim.launch_flood(spec)?;
    sim.advance_by(u64::from(max_duration_min.clamp(8, 30)) * 60)?;
    Ok(!sim.association(id).bound.is_connected())
}

/// Measure the survival duration at a given rate, in minutes.
pub fn measure_sd(
    profile: &DeviceProfile,
    protocol: Protocol,
    payload: PayloadClass,
    rate: u32,
    max_duration_min: u32,
    seed: u64,
) -> Result<Option<f64>> {
    let mut sim = Simulation::new(seed);
    let ap = sim.add_ap(default_ap());
    let id = sim.add_device("probe", profile.clone());
    sim.associate(id, ap)?;
    let spec = FloodSpec::new(protocol, "probe", rate, payload)
        .with_duration_min(max_duration_min.clamp(8, 30));
    let flood = sim.launch_flood(spec)?;
    let start = sim.now();
    sim.advance_by(u64::from(max_duration_min.clamp(8, 30)) * 60)?;
    Ok(sim
        .flood_counters(flood)
        .disconnected_target_at
        .map(|t| (t - start + 1) as f64 / 60.0))
}

/// Binary search for the minimum rate that disconnects the device within the
/// attack window; `Unbounded` when even the rate cap leaves it connected.
pub fn find_threshold_ar(
    profile: &DeviceProfile,
    protocol: Protocol,
    payload: PayloadClass,
    max_duration_min: u32,
    seed: u64,
) -> Result<ThresholdResult> {
    let (bound_lo, bound_hi) = search_bounds(profile);
    let probe =
        |rate: u32| probe_disconnects(profile, protocol, payload, rate, max_duration_min, seed);

    let (mut lo, mut hi) = if probe(bound_hi)? {
        (bound_lo, bound_hi)
    } else if probe(RATE_CAP)? {
        (bound_hi + 1, RATE_CAP)
    } else {
        return Ok(ThresholdResult::Unbounded);
    };
    // Invariant: probe(hi) disconnects; lo..hi still to narrow.
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if probe(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(ThresholdResult::Pps(hi))
}

/// Exhaustive linear scan over the search bounds; the independent oracle for
/// the binary search.
pub fn find_threshold_ar_linear(
    profile: &DeviceProfile,
    protocol: Protocol,
    payload: PayloadClass,
    max_duration_min: u32,
    seed: u64,
) -> Result<ThresholdResult> {
    let (lo, hi) = search_bounds(profile);
    for rate in lo..=hi {
        if probe_disconnects(profile, protocol, payload, rate, max_duration_min, seed)? {
            return Ok(ThresholdResult::Pps(rate));
        }
    }
    if probe_disconnects(profile, protocol, payload, RATE_CAP, max_duration_min, seed)? {
        return Ok(ThresholdResult::Pps(RATE_CAP));
    }
    Ok(ThresholdResult::Unbounded)
}

/// Split above-baseline joules across attack sources.
///
/// Takes (trace, baseline mean) pairs; seconds with no active attack source
/// contribute nothing. Returns `None` when no above-baseline energy exists.
pub fn attribute_energy(traces: &[(&[SampleRecord], f64)]) -> Option<Attribution> {
    let mut ec = 0.0;
    let mut fap = 0.0;
    for (trace, baseline_mean) in traces {
        for sample in *trace {
            match sample.source {
                Some(FloodOrigin::Attacker) => ec += sample.joules - baseline_mean,
                Some(FloodOrigin::FakeAp) => fap += sample.joules - baseline_mean,
                None => {}
            }
        }
    }
    let total = ec + fap;
    if total > 0.0 {
        Some(Attribution {
            ec_ddos: ec / total,
            fap: fap / total,
        })
    } else {
        None
    }
}

#[cfg(test)]
mod tests;
