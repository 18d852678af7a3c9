use std::path::Path;

use crate::error::{Error, Result};

/// Stage layout of one core: 1-based, inclusive ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineSpec {
    pub total_stages: u32,
    pub preprocess: (u32, u32),
    pub feedback: (u32, u32),
    pub postprocess: (u32, u32),
}

impl Default for PipelineSpec {
    fn default() -> Self {
        Self {
            total_stages: 19,
            preprocess: (1, 10),
            feedback: (11, 18),
            postprocess: (19, 19),
        }
    }
}

impl PipelineSpec {
    pub fn feedback_depth(&self) -> u32 {
        self.feedback.1 - self.feedback.0 + 1
    }

    /// Sections must be contiguous, disjoint and cover 1..=total_stages.
    pub fn validate(&self) -> Result<()> {
        let ok = self.preprocess.0 == 1
            && self.preprocess.0 <= self.preprocess.1
            && self.feedback.0 == self.preprocess.1 + 1
            && self.feedback.0 <= self.feedback.1
            && self.postprocess.0 == self.feedback.1 + 1
            && self.postprocess.0 <= self.postprocess.1
            && self.postprocess.1 == self.total_stages;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "inconsistent pipeline sections: {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Features {
    pub banking: bool,
    pub interleaving: bool,
    pub wrapping: bool,
}

impl Default for Features {
    fn default() -> Self {
        Self {
            banking: true,
            interleaving: true,
            wrapping: true,
        }
    }
}

impl Features {
    /// All 8 on/off combinations.
    pub fn all() -> impl Iterator<Item = Features> {
        (0..8u8).map(|m| Features {
            banking: m & 1 != 0,
            interleaving: m & 2 != 0,
            wrapping: m & 4 != 0,
        })
    }
}

/// Joules per event. Defaults are calibrated so the 201×201, 60-ray,
/// 16-core run totals 1.7 mJ: static power covers 10%, the rest splits
/// 70/30 between core cycles and bank accesses, stalled cycles cost a
/// quarter of active ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    pub e_core_cycle: f64,
    pub e_stall_cycle: f64,
    pub e_mem_access: f64,
    pub e_static_per_s: f64,
}

impl EnergyParams {
    pub const ZERO: EnergyParams = EnergyParams {
        e_core_cycle: 0.0,
        e_stall_cycle: 0.0,
        e_mem_access: 0.0,
        e_static_per_s: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.e_core_cycle,
            self.e_stall_cycle,
            self.e_mem_access,
            self.e_static_per_s,
        ];
        if all.iter().all(|v| v.is_finite() && *v >= 0.0) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "energy constants must be finite and >= 0: {self:?}"
            )))
        }
    }
}

impl Default for EnergyParams {
    fn default() -> Self {
        const E_CORE: f64 = 4.401e-10;
        Self {
            e_core_cycle: E_CORE,
            e_stall_cycle: E_CORE / 4.0,
            e_mem_access: 6.312e-11,
            e_static_per_s: 0.1105,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchConfig {
    pub n_cores: usize,
    pub clock_hz: f64,
    pub n_banks: usize,
    pub interleave_depth: usize,
    pub pipeline: PipelineSpec,
    pub features: Features,
    pub energy: EnergyParams,
    /// Entries of the per-bank queue in front of each MI bank's port pair.
    /// A core stalls on a bank conflict only when that queue is full.
    pub mi_queue_depth: usize,
    /// Largest supported map side.
    pub max_map: usize,
}

impl Default for ArchConfig {
    fn default() -> Self {
        Self::with_cores(16)
    }
}

impl ArchConfig {
    pub const DEFAULT_MAX_MAP: usize = 512;

    /// Defaults with `n` cores and `n` banks.
    pub fn with_cores(n: usize) -> Self {
        Self {
            n_cores: n,
            clock_hz: 1e8,
            n_banks: n,
            interleave_depth: 8,
            pipeline: PipelineSpec::default(),
            features: Features::default(),
            energy: EnergyParams::default(),
            mi_queue_depth: 16,
            max_map: Self::DEFAULT_MAX_MAP,
        }
    }

    pub fn with_features(mut self, features: Features) -> Self {
        self.features = features;
        self
    }

    /// Banks actually modeled: 1 when banking is off.
    pub fn effective_banks(&self) -> usize {
        if self.features.banking {
            self.n_banks
        } else {
            1
        }
    }

    /// Ray slots per core: 1 when interleaving is off.
    pub fn effective_depth(&self) -> usize {
        if self.features.interleaving {
            self.interleave_depth
        } else {
            1
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cores == 0 || self.n_banks == 0 || self.interleave_depth == 0 || self.max_map == 0
        {
            return Err(Error::Config(
                "cores, banks, interleave_depth and max_map must be positive".into(),
            ));
        }
        if !(self.clock_hz.is_finite() && self.clock_hz > 0.0) {
            return Err(Error::Config(format!(
                "clock_hz must be positive, got {}",
                self.clock_hz
            )));
        }
        self.pipeline.validate()?;
        self.energy.validate()
    }

    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults and `banks` follows `cores` unless given.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut banks = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config(format!("line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let uint = || {
                value
                    .parse::<usize>()
                    .map_err(|_| err(format!("{key}: `{value}` is not an integer")))
            };
            let real = || {
                value
                    .parse::<f64>()
                    .map_err(|_| err(format!("{key}: `{value}` is not a number")))
            };
            let flag = || match value {
                "true" | "on" | "1" => Ok(true),
                "false" | "off" | "0" => Ok(false),
                _ => Err(err(format!("{key}: `{value}` is not a boolean"))),
            };
            match key {
                "cores" => cfg.n_cores = uint()?,
                "banks" => banks = Some(uint()?),
                "clock_hz" => cfg.clock_hz = real()?,
                "interleave_depth" => cfg.interleave_depth = uint()?,
                "max_map" => cfg.max_map = uint()?,
                "mi_queue_depth" => cfg.mi_queue_depth = uint()?,
                "features.banking" => cfg.features.banking = flag()?,
                "features.interleaving" => cfg.features.interleaving = flag()?,
                "features.wrapping" => cfg.features.wrapping = flag()?,
                "energy.e_core_cycle" => cfg.energy.e_core_cycle = real()?,
                "energy.e_stall_cycle" => cfg.energy.e_stall_cycle = real()?,
                "energy.e_mem_access" => cfg.energy.e_mem_access = real()?,
                "energy.e_static_per_s" => cfg.energy.e_static_per_s = real()?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        cfg.n_banks = banks.unwrap_or(cfg.n_cores);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        format!(
            "cores = {}\nbanks = {}\nclock_hz = {}\ninterleave_depth = {}\nmi_queue_depth = {}\nmax_map = {}\n\
             features.banking = {}\nfeatures.interleaving = {}\nfeatures.wrapping = {}\n\
             energy.e_core_cycle = {:e}\nenergy.e_stall_cycle = {:e}\nenergy.e_mem_access = {:e}\n\
             energy.e_static_per_s = {}\n",
            self.n_cores,
            self.n_banks,
            self.clock_hz,
            self.interleave_depth,
            self.mi_queue_depth,
            self.max_map,
            self.features.banking,
            self.features.interleaving,
            self.features.wrapping,
            self.energy.e_core_cycle,
            self.energy.e_stall_cycle,
            self.energy.e_mem_access,
            self.energy.e_static_per_s,
        )
    }
}
