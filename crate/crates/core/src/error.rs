use thiserror::Error;

/// Errors produced by the simulator and its front ends.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("event scheduled in the past: t={t} < now={now}")]
    PastEvent { t: u64, now: u64 },

    #[error("cannot rewind clock: target={to} < now={now}")]
    ClockRewind { to: u64, now: u64 },

    #[error("unknown device: {0}")]
    UnknownDevice(String),

    #[error("unknown node id: {0}")]
    UnknownNode(u32),

    #[error("device {0} is still associated")]
    StillAssociated(String),

    #[error("device {0} is powered off")]
    PoweredOff(String),

    #[error("device {0} is offline: host down")]
    HostDown(String),

    #[error("attacker is not on the network")]
    AttackerOffNetwork,

    #[error("security settings of AP {ap} do not match the provisioned network ({expected})")]
    SecurityMismatch { ap: String, expected: String },

    #[error("device {0} is not associated to the fake access point")]
    NotOnFakeAp(String),

    #[error("no fake access point deployed")]
    NoFakeAp,

    #[error("cannot clone a fake access point")]
    CloneOfFake,

    #[error("signal margin must be positive, got {0}")]
    NonPositiveMargin(f64),

    #[error("monitor mode requires an active broadcast")]
    MonitorBeforeBroadcast,

    #[error("attack rate {rate} PPS exceeds the simulator cap of {cap} PPS")]
    RateAboveCap { rate: u32, cap: u32 },

    #[error("invalid flood spec: {0}")]
    InvalidFloodSpec(String),

    #[error("this is a DDoS spec, not EC-DDoS: rate {rate} >= disconnect threshold {threshold}")]
    NotEcDdos { rate: u32, threshold: u32 },

    #[error("phase order violation: {0}")]
    PhaseOrder(String),

    #[error("attract failed for {device} after {attempts} attempts")]
    AttractFailed { device: String, attempts: u32 },

    #[error("figure {figure} requires the {phase} phase, which is absent from the report")]
    MissingPhase { figure: String, phase: String },

    #[error("config validation failed:\n{}", .0.join("\n"))]
    ConfigInvalid(Vec<String>),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("output directory is locked by another run: {0}")]
    OutputLocked(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SimError {
    /// Whether this error is a configuration/usage problem (CLI exit status 2)
    /// as opposed to a runtime failure (exit status 1).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            SimError::ConfigInvalid(_)
                | SimError::ConfigParse(_)
                | SimError::RateAboveCap { .. }
                | SimError::InvalidFloodSpec(_)
                | SimError::NonPositiveMargin(_)
                | SimError::UnknownDevice(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
