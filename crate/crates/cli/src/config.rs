//! Flat `key = value` experiment configuration with `#` comments.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use infospread::sim::{DistanceMetric, Mobility, SimParams, UplinkMode};
use infospread::{Config, Mode};

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("{}field `{field}`: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// Everything one command needs: the network plus simulation and output settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub network: Config,
    /// Transmit power used by `predict` and `simulate`.
    pub mu: f64,
    pub mode: Mode,
    pub mobility: Mobility,
    pub speed: f64,
    pub slot_period: f64,
    pub k_max: usize,
    pub trials: u64,
    pub seed: u64,
    pub distance: DistanceMetric,
    pub uplink: UplinkMode,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// The Figure-2 scenario with a unit target SIR.
    pub fn fig2() -> Self {
        let sim = SimParams::fig2();
        ExperimentConfig {
            network: Config::fig2(),
            mu: 0.064,
            mode: Mode::Broadcast,
            mobility: sim.mobility,
            speed: sim.speed,
            slot_period: sim.slot_period,
            k_max: 42,
            trials: 10_000,
            seed: 1,
            distance: sim.distance,
            uplink: sim.uplink,
            output: None,
        }
    }

    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        match name {
            "fig2" => Ok(Self::fig2()),
            other => Err(ConfigError::new(
                None,
                "preset",
                format!("unknown preset `{other}`"),
            )),
        }
    }

    pub fn sim_params(&self) -> SimParams {
        SimParams {
            mobility: self.mobility,
            speed: self.speed,
            slot_period: self.slot_period,
            distance: self.distance,
            uplink: self.uplink,
        }
    }

    /// Checks every field; nothing is computed before this passes.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.network
            .validate()
            .map_err(|e| ConfigError::new(None, "network", e.to_string()))?;
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(ConfigError::new(
                None,
                "mu",
                format!("transmit power must be positive, got {}", self.mu),
            ));
        }
        if self.k_max == 0 {
            return Err(ConfigError::new(None, "k_max", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(ConfigError::new(None, "trials", "must be at least 1"));
        }
        self.sim_params()
            .validate()
            .map_err(|e| ConfigError::new(None, "simulation", e.to_string()))
    }

    /// Applies `text` on top of `self`; unknown or repeated keys are errors.
    pub fn merge_str(mut self, text: &str) -> Result<Self, ConfigError> {
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::new(
                    Some(line_no),
                    line,
                    "expected `key = value`",
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::new(Some(line_no), key, "duplicate key"));
            }
            self.set(key, value)
                .map_err(|msg| ConfigError::new(Some(line_no), key, msg))?;
        }
        Ok(self)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::fig2().merge_str(text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(v: &str) -> Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            v.parse::<T>()
                .map_err(|e| format!("cannot parse `{v}`: {e}"))
        }
        fn kw<T: FromStr<Err = infospread::Error>>(v: &str) -> Result<T, String> {
            v.parse::<T>().map_err(|e| e.to_string())
        }
        let n = &mut self.network;
        match key {
            "n_bs" => n.n_bs = num(value)?,
            "n_mu" => n.n_mu = num(value)?,
            "n_src" => n.n_src = num(value)?,
            "area" => n.area = num(value)?,
            "beta" => n.beta = num(value)?,
            "alpha" => n.alpha = num(value)?,
            "power_cap" => n.power_cap = num(value)?,
            "slot_cap" => n.slot_cap = num(value)?,
            "target_ratio" => n.target_ratio = num(value)?,
            "mu" => self.mu = num(value)?,
            "mode" => self.mode = kw(value)?,
            "mobility" => self.mobility = kw(value)?,
            "speed" => self.speed = num(value)?,
            "slot_period" => self.slot_period = num(value)?,
            "k_max" => self.k_max = num(value)?,
            "trials" => self.trials = num(value)?,
            "seed" => self.seed = num(value)?,
            "distance" => self.distance = kw(value)?,
            "uplink" => self.uplink = kw(value)?,
            "output" => self.output = (!value.is_empty()).then(|| PathBuf::from(value)),
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Renders every field; `parse(to_config_string())` reproduces `self`.
    pub fn to_config_string(&self) -> String {
        let n = &self.network;
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("n_bs", &n.n_bs);
        kv("n_mu", &n.n_mu);
        kv("n_src", &n.n_src);
        kv("area", &n.area);
        kv("beta", &n.beta);
        kv("alpha", &n.alpha);
        kv("power_cap", &n.power_cap);
        kv("slot_cap", &n.slot_cap);
        kv("target_ratio", &n.target_ratio);
        kv("mu", &self.mu);
        kv("mode", &self.mode);
        kv("mobility", &self.mobility);
        kv("speed", &self.speed);
        kv("slot_period", &self.slot_period);
        kv("k_max", &self.k_max);
        kv("trials", &self.trials);
        kv("seed", &self.seed);
        kv("distance", &self.distance);
        kv("uplink", &self.uplink);
        if let Some(out) = &self.output {
            kv("output", &out.display());
        }
        s
    }
}
