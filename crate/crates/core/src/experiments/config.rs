//! Sweep configuration and the flat `key=value` config file format.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{ExperimentError, Result};
use crate::channels::ChannelKind;
use crate::protocol::{BellOutcome, CharlieOutcome, InfoKind};
use crate::rindler::AccelerationParam;

const GRID_TOL: f64 = 1e-9;

/// Common channel acceleration values `start, start + step, ..., stop`,
/// with `stop` clamped to pi/4 and always included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for RGrid {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 0.78,
            step: 0.02,
        }
    }
}

impl RGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let grid = Self { start, stop, step };
        grid.validate()?;
        Ok(grid)
    }

    /// `{start}` only.
    pub fn single(r: f64) -> Result<Self> {
        Self::new(r, r, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { start, stop, step } = *self;
        if ![start, stop, step].iter().all(|x| x.is_finite()) {
            return Err(ExperimentError::config("grid bounds must be finite"));
        }
        if step <= 0.0 {
            return Err(ExperimentError::config(format!(
                "grid step {step} must be > 0"
            )));
        }
        if !(0.0..=AccelerationParam::MAX).contains(&start) {
            return Err(ExperimentError::config(format!(
                "grid start {start} outside [0, pi/4]"
            )));
        }
        if stop < start {
            return Err(ExperimentError::config(format!(
                "grid stop {stop} below start {start}"
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let stop = self.stop.min(AccelerationParam::MAX);
        let mut out = Vec::new();
        for k in 0.. {
            let r = self.start + k as f64 * self.step;
            if r > stop + GRID_TOL {
                break;
            }
            out.push(r.min(stop));
        }
        if out.last().is_some_and(|&last| last < stop - GRID_TOL) {
            out.push(stop);
        }
        out
    }
}

/// How r0 is chosen for accelerated information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum R0Choice {
    Fixed(AccelerationParam),
    /// r0 equals the common channel acceleration at each grid point.
    TrackChannel,
}

impl R0Choice {
    pub fn at(self, r: AccelerationParam) -> AccelerationParam {
        match self {
            R0Choice::Fixed(p) => p,
            R0Choice::TrackChannel => r,
        }
    }
}

impl fmt::Display for R0Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            R0Choice::Fixed(p) => write!(f, "{}", p.r()),
            R0Choice::TrackChannel => f.write_str("r"),
        }
    }
}

impl FromStr for R0Choice {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "r" || s == "track" {
            return Ok(R0Choice::TrackChannel);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| ExperimentError::config(format!("bad r0 value {s:?}")))?;
        AccelerationParam::new(v)
            .map(R0Choice::Fixed)
            .map_err(|e| ExperimentError::config(format!("r0: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchSelection {
    /// W -> (psi+, z0), GHZ -> (psi+, x+), GHZ-like -> (phi+, z0).
    PlottedBranch,
    AllBranches,
    /// Probability-weighted mean over valid branches.
    Average,
}

impl BranchSelection {
    pub fn tag(self) -> &'static str {
        match self {
            BranchSelection::PlottedBranch => "plotted_branch",
            BranchSelection::AllBranches => "all_branches",
            BranchSelection::Average => "average",
        }
    }
}

impl FromStr for BranchSelection {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "plotted_branch" | "plotted" => Ok(BranchSelection::PlottedBranch),
            "all_branches" | "all" => Ok(BranchSelection::AllBranches),
            "average" | "avg" => Ok(BranchSelection::Average),
            other => Err(ExperimentError::config(format!(
                "unknown branch selection {other:?}"
            ))),
        }
    }
}

/// The branch plotted for each channel.
pub fn plotted_branch(channel: ChannelKind) -> (BellOutcome, CharlieOutcome) {
    match channel {
        ChannelKind::W => (BellOutcome::PsiPlus, CharlieOutcome::Z0),
        ChannelKind::Ghz => (BellOutcome::PsiPlus, CharlieOutcome::XPlus),
        ChannelKind::GhzLike => (BellOutcome::PhiPlus, CharlieOutcome::Z0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub channels: Vec<ChannelKind>,
    pub info_kinds: Vec<InfoKind>,
    /// Used for accelerated information only.
    pub r0_values: Vec<R0Choice>,
    pub grid: RGrid,
    pub alpha_sq: f64,
    pub branches: BranchSelection,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            channels: ChannelKind::ALL.to_vec(),
            info_kinds: vec![InfoKind::NonAccelerated, InfoKind::Accelerated],
            r0_values: [0.1, 0.4, 0.7]
                .iter()
                .map(|&r| R0Choice::Fixed(AccelerationParam::new(r).expect("in range")))
                .collect(),
            grid: RGrid::default(),
            alpha_sq: 0.5,
            branches: BranchSelection::PlottedBranch,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(0.0..=1.0).contains(&self.alpha_sq) {
            return Err(ExperimentError::config(format!(
                "alpha_sq {} outside [0, 1]",
                self.alpha_sq
            )));
        }
        if self.channels.is_empty() {
            return Err(ExperimentError::config("no channel selected"));
        }
        if self.info_kinds.is_empty() {
            return Err(ExperimentError::config("no info kind selected"));
        }
        if self.info_kinds.contains(&InfoKind::Accelerated) && self.r0_values.is_empty() {
            return Err(ExperimentError::config(
                "accelerated info needs at least one r0",
            ));
        }
        Ok(())
    }

    /// Applies one `key=value` setting; keys are the long CLI flag names.
    /// Returns `false` for keys that are not sweep settings.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        let value = value.trim();
        match key.trim().replace('_', "-").as_str() {
            "channel" => self.channels = parse_channels(value)?,
            "info-kind" => self.info_kinds = parse_info_kinds(value)?,
            "r0" => {
                self.r0_values = split_list(value)
                    .map(str::parse)
                    .collect::<Result<Vec<R0Choice>>>()?
            }
            "grid-start" => self.grid.start = parse_f64(key, value)?,
            "grid-stop" => self.grid.stop = parse_f64(key, value)?,
            "grid-step" => self.grid.step = parse_f64(key, value)?,
            "alpha-sq" => self.alpha_sq = parse_f64(key, value)?,
            "branches" => self.branches = value.parse()?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Applies every known key in `entries`, returning the unknown ones.
    pub fn apply<'a>(
        &mut self,
        entries: &'a BTreeMap<String, String>,
    ) -> Result<Vec<(&'a str, &'a str)>> {
        let mut rest = Vec::new();
        for (k, v) in entries {
            if !self.set(k, v)? {
                rest.push((k.as_str(), v.as_str()));
            }
        }
        Ok(rest)
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| ExperimentError::config(format!("{key}: not a number: {value:?}")))
}

pub fn parse_channels(value: &str) -> Result<Vec<ChannelKind>> {
    if value == "all" {
        return Ok(ChannelKind::ALL.to_vec());
    }
    split_list(value)
        .map(|s| {
            s.parse()
                .map_err(|e| ExperimentError::config(format!("{e}")))
        })
        .collect()
}

pub fn parse_info_kinds(value: &str) -> Result<Vec<InfoKind>> {
    if value == "both" || value == "all" {
        return Ok(vec![InfoKind::NonAccelerated, InfoKind::Accelerated]);
    }
    split_list(value)
        .map(|s| {
            s.parse()
                .map_err(|e| ExperimentError::config(format!("{e}")))
        })
        .collect()
}

/// Parses flat `key=value` lines. Blank lines and `#` comments are skipped;
/// later keys override earlier ones.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            ExperimentError::config(format!("line {}: expected key=value", n + 1))
        })?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(ExperimentError::config(format!(
                "line {}: empty key",
                n + 1
            )));
        }
        out.insert(k.replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}
