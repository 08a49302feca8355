//! Fidelity sweeps over the common channel acceleration.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;

use super::config::{plotted_branch, BranchSelection, R0Choice, SweepConfig};
use super::Result;
use crate::channels::{ChannelKind, ChannelRealization, DensityForm};
use crate::protocol::{
    average_fidelity, run_branch, BellOutcome, BranchEvaluation, CharlieOutcome, InfoKind,
    InfoQubit, ProtocolError,
};
use crate::qmath::IMPOSSIBLE_BRANCH_PROBABILITY;
use crate::report::{format_f64, format_opt};
use crate::rindler::{AccelerationParam, RegisterAcceleration};

pub const SWEEP_CSV_HEADER: &str =
    "channel,info_kind,r0,r1,r2,r3,alpha_sq,bell,charlie,probability,fidelity_oracle,fidelity_closed,valid";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchKey {
    Branch(BellOutcome, CharlieOutcome),
    Average,
}

impl BranchKey {
    pub fn bell_tag(self) -> &'static str {
        match self {
            BranchKey::Branch(b, _) => b.tag(),
            BranchKey::Average => "average",
        }
    }

    pub fn charlie_tag(self) -> &'static str {
        match self {
            BranchKey::Branch(_, c) => c.tag(),
            BranchKey::Average => "average",
        }
    }
}

impl fmt::Display for BranchKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.bell_tag(), self.charlie_tag())
    }
}

/// Which r0 a curve was computed with. Fixed values are stored as bits so
/// the key is `Ord`; r0 is never negative, so bit order is numeric order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveR0 {
    Absent,
    Fixed(u64),
    TrackChannel,
}

impl CurveR0 {
    pub fn fixed(r0: f64) -> Self {
        CurveR0::Fixed(r0.to_bits())
    }

    pub fn fixed_value(self) -> Option<f64> {
        match self {
            CurveR0::Fixed(bits) => Some(f64::from_bits(bits)),
            _ => None,
        }
    }
}

impl From<Option<R0Choice>> for CurveR0 {
    fn from(choice: Option<R0Choice>) -> Self {
        match choice {
            None => CurveR0::Absent,
            Some(R0Choice::Fixed(p)) => CurveR0::fixed(p.r()),
            Some(R0Choice::TrackChannel) => CurveR0::TrackChannel,
        }
    }
}

impl fmt::Display for CurveR0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveR0::Absent => f.write_str("-"),
            CurveR0::Fixed(bits) => write!(f, "{}", f64::from_bits(*bits)),
            CurveR0::TrackChannel => f.write_str("r"),
        }
    }
}

/// One row of a sweep. The channel qubits share `r` (r1 = r2 = r3).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub channel: ChannelKind,
    pub info_kind: InfoKind,
    pub curve_r0: CurveR0,
    pub r0: Option<f64>,
    pub r: f64,
    pub alpha_sq: f64,
    pub branch: BranchKey,
    /// Branch probability, or total valid probability for averages.
    pub probability: f64,
    /// Empty on impossible branches.
    pub fidelity_oracle: Option<f64>,
    pub fidelity_closed: Option<f64>,
    pub valid: bool,
}

impl SweepRecord {
    pub fn curve(&self) -> CurveKey {
        CurveKey {
            channel: self.channel,
            info_kind: self.info_kind,
            r0: self.curve_r0,
            branch: self.branch,
        }
    }

    fn sort_key(&self, other: &Self) -> std::cmp::Ordering {
        let r0 = |x: &Self| x.r0.unwrap_or(f64::NEG_INFINITY);
        self.channel
            .cmp(&other.channel)
            .then(self.info_kind.cmp(&other.info_kind))
            .then(r0(self).total_cmp(&r0(other)))
            .then(self.r.total_cmp(&other.r))
            .then(self.branch.cmp(&other.branch))
            .then(self.curve_r0.cmp(&other.curve_r0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveKey {
    pub channel: ChannelKind,
    pub info_kind: InfoKind,
    pub r0: CurveR0,
    pub branch: BranchKey,
}

impl fmt::Display for CurveKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} r0={} {}",
            self.channel.tag(),
            self.info_kind,
            self.r0,
            self.branch
        )
    }
}

/// Groups records into curves, each sorted by `r`. Points with no oracle
/// fidelity are dropped.
pub fn curves(records: &[SweepRecord]) -> BTreeMap<CurveKey, Vec<(f64, f64)>> {
    let mut out: BTreeMap<CurveKey, Vec<(f64, f64)>> = BTreeMap::new();
    for rec in records {
        if let Some(f) = rec.fidelity_oracle {
            out.entry(rec.curve()).or_default().push((rec.r, f));
        }
    }
    for pts in out.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// Runs the configured sweep. Output order does not depend on scheduling.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let points = config.grid.points();
    let jobs: Vec<(ChannelKind, f64)> = config
        .channels
        .iter()
        .flat_map(|&c| points.iter().map(move |&r| (c, r)))
        .collect();
    let per_job: Vec<Vec<SweepRecord>> = jobs
        .par_iter()
        .map(|&(channel, r)| sweep_point(config, channel, r))
        .collect::<Result<_>>()?;
    let mut records: Vec<SweepRecord> = per_job.into_iter().flatten().collect();
    records.sort_by(|a, b| a.sort_key(b));
    Ok(records)
}

fn sweep_point(config: &SweepConfig, channel: ChannelKind, r: f64) -> Result<Vec<SweepRecord>> {
    let r_param = AccelerationParam::new(r)?;
    let realization = ChannelRealization::new(channel, RegisterAcceleration::uniform(3, r_param))?;
    let mut out = Vec::new();
    for &info_kind in &config.info_kinds {
        let choices: Vec<Option<R0Choice>> = match info_kind {
            InfoKind::NonAccelerated => vec![None],
            InfoKind::Accelerated => config.r0_values.iter().copied().map(Some).collect(),
        };
        for choice in choices {
            let r0 = choice.map(|c| c.at(r_param));
            let info = InfoQubit::from_alpha_sq(config.alpha_sq, r0)?;
            let base = SweepRecord {
                channel,
                info_kind,
                curve_r0: choice.into(),
                r0: r0.map(AccelerationParam::r),
                r,
                alpha_sq: config.alpha_sq,
                branch: BranchKey::Average,
                probability: 0.0,
                fidelity_oracle: None,
                fidelity_closed: None,
                valid: true,
            };
            match config.branches {
                BranchSelection::PlottedBranch => {
                    let (bell, charlie) = plotted_branch(channel);
                    out.push(branch_record(&base, &realization, &info, bell, charlie)?);
                }
                BranchSelection::AllBranches => {
                    for eval in crate::protocol::enumerate_branches(
                        &realization,
                        &info,
                        DensityForm::Oracle,
                    )? {
                        out.push(from_evaluation(&base, &eval));
                    }
                }
                BranchSelection::Average => {
                    let avg = average_fidelity(&realization, &info, DensityForm::Oracle)?;
                    let fidelity =
                        (avg.valid_probability > IMPOSSIBLE_BRANCH_PROBABILITY).then(|| avg.mean());
                    out.push(SweepRecord {
                        probability: avg.valid_probability,
                        fidelity_oracle: fidelity,
                        ..base.clone()
                    });
                }
            }
        }
    }
    Ok(out)
}

fn branch_record(
    base: &SweepRecord,
    realization: &ChannelRealization,
    info: &InfoQubit,
    bell: BellOutcome,
    charlie: CharlieOutcome,
) -> Result<SweepRecord> {
    let eval = match run_branch(realization, info, bell, charlie, DensityForm::Oracle) {
        Ok(res) => BranchEvaluation::Done(res),
        Err(ProtocolError::ImpossibleBranch { probability, .. }) => {
            let rule = crate::protocol::correction_for(realization.kind, bell, charlie)?;
            BranchEvaluation::Impossible {
                bell,
                charlie,
                probability,
                valid: rule.valid,
            }
        }
        Err(e) => return Err(e.into()),
    };
    Ok(from_evaluation(base, &eval))
}

fn from_evaluation(base: &SweepRecord, eval: &BranchEvaluation) -> SweepRecord {
    let result = eval.result();
    SweepRecord {
        branch: BranchKey::Branch(eval.bell(), eval.charlie()),
        probability: eval.probability(),
        fidelity_oracle: result.map(|r| r.fidelity_oracle),
        fidelity_closed: result.and_then(|r| r.fidelity_closed),
        valid: eval.valid(),
        ..base.clone()
    }
}

pub fn write_sweep_csv<W: Write>(mut out: W, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for rec in records {
        let r = format_f64(rec.r);
        writeln!(
            out,
            "{},{},{},{r},{r},{r},{},{},{},{},{},{},{}",
            rec.channel.tag(),
            rec.info_kind.tag(),
            format_opt(rec.r0),
            format_f64(rec.alpha_sq),
            rec.branch.bell_tag(),
            rec.branch.charlie_tag(),
            format_f64(rec.probability),
            format_opt(rec.fidelity_oracle),
            format_opt(rec.fidelity_closed),
            rec.valid,
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::config::RGrid;
    use super::*;

    fn config(channel: ChannelKind, info: InfoKind) -> SweepConfig {
        SweepConfig {
            channels: vec![channel],
            info_kinds: vec![info],
            ..SweepConfig::default()
        }
    }

    #[test]
    fn ghz_at_rest_is_perfect() {
        let mut cfg = config(ChannelKind::Ghz, InfoKind::NonAccelerated);
        cfg.grid = RGrid::single(0.0).unwrap();
        cfg.branches = BranchSelection::AllBranches;
        let recs = sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 8);
        for rec in &recs {
            assert!((rec.fidelity_oracle.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn larger_r0_hurts_at_rest() {
        let mut cfg = config(ChannelKind::W, InfoKind::Accelerated);
        cfg.grid = RGrid::single(0.0).unwrap();
        cfg.r0_values = vec!["0.1".parse().unwrap(), "0.7".parse().unwrap()];
        let recs = sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].r0, Some(0.1));
        assert!(recs[1].fidelity_oracle.unwrap() < recs[0].fidelity_oracle.unwrap());
    }

    #[test]
    fn w_spot_row() {
        let mut cfg = config(ChannelKind::W, InfoKind::NonAccelerated);
        cfg.grid = RGrid::single(0.5).unwrap();
        let recs = sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 1);
        assert!((recs[0].fidelity_closed.unwrap() - 0.6816).abs() < 5e-4);
    }

    #[test]
    fn all_branches_one_row_per_branch() {
        let cfg = SweepConfig {
            grid: RGrid::new(0.0, 0.2, 0.1).unwrap(),
            r0_values: vec![R0Choice::TrackChannel],
            branches: BranchSelection::AllBranches,
            ..SweepConfig::default()
        };
        let recs = sweep(&cfg).unwrap();
        // 3 channels x 3 points x 2 info kinds x 8 branches
        assert_eq!(recs.len(), 3 * 3 * 2 * 8);
        let mut sums: BTreeMap<(ChannelKind, InfoKind, u64), f64> = BTreeMap::new();
        for rec in &recs {
            *sums
                .entry((rec.channel, rec.info_kind, rec.r.to_bits()))
                .or_default() += rec.probability;
        }
        for total in sums.values() {
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let cfg = SweepConfig {
            grid: RGrid::new(0.0, 0.3, 0.1).unwrap(),
            branches: BranchSelection::Average,
            ..SweepConfig::default()
        };
        let render = || {
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &sweep(&cfg).unwrap()).unwrap();
            buf
        };
        let first = render();
        assert_eq!(first, render());
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with(SWEEP_CSV_HEADER));
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("w,non_accelerated,,0.0000000000000000e0,"));
    }
}
