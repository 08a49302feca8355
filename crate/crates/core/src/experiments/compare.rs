//! Channel comparison built from sweep records.

use std::collections::BTreeMap;
use std::io::{self, Write};

use super::config::{BranchSelection, SweepConfig};
use super::sweep::{curves, sweep, BranchKey, CurveKey, CurveR0, SweepRecord};
use super::{ExperimentError, Result};
use crate::channels::ChannelKind;
use crate::protocol::InfoKind;
use crate::report::format_f64;

/// Fidelities closer than this count as a tie.
const TIE_TOL: f64 = 1e-12;
/// Allowed rise along a curve before it counts as non-monotone.
const FLAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats {
    pub channel: ChannelKind,
    pub min: f64,
    pub min_at: f64,
    pub mean: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointWinner {
    pub r: f64,
    pub best: f64,
    pub winners: Vec<ChannelKind>,
}

/// A grid point where GHZ is beaten by another channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseException {
    pub r: f64,
    pub channel: ChannelKind,
    pub ghz: f64,
    pub other: f64,
}

/// One comparison: every channel at the same info kind and r0 setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonGroup {
    pub info_kind: InfoKind,
    pub r0: CurveR0,
    pub stats: Vec<ChannelStats>,
    pub winners: Vec<PointWinner>,
    pub winner_counts: Vec<(ChannelKind, usize)>,
    pub ghz_exceptions: Vec<PointwiseException>,
    /// GHZ grid minimum strictly above every other channel's.
    pub ghz_minimum_exceeds: bool,
}

impl ComparisonGroup {
    pub fn stats_for(&self, channel: ChannelKind) -> Option<&ChannelStats> {
        self.stats.iter().find(|s| s.channel == channel)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityViolation {
    pub curve: CurveKey,
    pub r_before: f64,
    pub r_after: f64,
    pub f_before: f64,
    pub f_after: f64,
}

/// A point where accelerated information (r0 = r) beat the non-accelerated
/// run on the same channel and branch.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingViolation {
    pub channel: ChannelKind,
    pub branch: BranchKey,
    pub r: f64,
    pub non_accelerated: f64,
    pub accelerated: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSummary {
    pub groups: Vec<ComparisonGroup>,
    pub monotonicity_violations: Vec<MonotonicityViolation>,
    pub ordering_violations: Vec<OrderingViolation>,
}

impl ComparisonSummary {
    /// GHZ has the highest grid minimum in every group. Pointwise exceptions
    /// are listed separately and do not affect this.
    pub fn ghz_optimal(&self) -> bool {
        !self.groups.is_empty() && self.groups.iter().all(|g| g.ghz_minimum_exceeds)
    }

    /// GHZ is at least as good as every channel at every point of every group.
    pub fn ghz_pointwise_optimal(&self) -> bool {
        self.groups.iter().all(|g| g.ghz_exceptions.is_empty())
    }

    pub fn group(&self, info_kind: InfoKind, r0: CurveR0) -> Option<&ComparisonGroup> {
        self.groups
            .iter()
            .find(|g| g.info_kind == info_kind && g.r0 == r0)
    }

    pub fn write_report<W: Write>(&self, mut out: W) -> io::Result<()> {
        for g in &self.groups {
            writeln!(out, "# group info_kind={} r0={}", g.info_kind, g.r0)?;
            writeln!(out, "channel,min,min_at_r,mean,points,pointwise_wins")?;
            for s in &g.stats {
                let wins = g
                    .winner_counts
                    .iter()
                    .find(|(c, _)| *c == s.channel)
                    .map_or(0, |(_, n)| *n);
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    s.channel.tag(),
                    format_f64(s.min),
                    format_f64(s.min_at),
                    format_f64(s.mean),
                    s.points,
                    wins
                )?;
            }
            writeln!(out, "ghz_minimum_exceeds={}", g.ghz_minimum_exceeds)?;
            writeln!(out, "ghz_pointwise_exceptions={}", g.ghz_exceptions.len())?;
            if !g.ghz_exceptions.is_empty() {
                writeln!(out, "r,channel,ghz,other")?;
                for e in &g.ghz_exceptions {
                    writeln!(
                        out,
                        "{},{},{},{}",
                        format_f64(e.r),
                        e.channel.tag(),
                        format_f64(e.ghz),
                        format_f64(e.other)
                    )?;
                }
            }
            writeln!(out, "r,best,winners")?;
            for w in &g.winners {
                let names: Vec<_> = w.winners.iter().map(|c| c.tag()).collect();
                writeln!(
                    out,
                    "{},{},{}",
                    format_f64(w.r),
                    format_f64(w.best),
                    names.join("|")
                )?;
            }
            writeln!(out)?;
        }
        writeln!(
            out,
            "# monotonicity violations: {}",
            self.monotonicity_violations.len()
        )?;
        for v in &self.monotonicity_violations {
            writeln!(
                out,
                "{},{},{},{},{}",
                v.curve,
                format_f64(v.r_before),
                format_f64(v.r_after),
                format_f64(v.f_before),
                format_f64(v.f_after)
            )?;
        }
        writeln!(
            out,
            "# ordering violations: {}",
            self.ordering_violations.len()
        )?;
        for v in &self.ordering_violations {
            writeln!(
                out,
                "{},{},{},{},{}",
                v.channel.tag(),
                v.branch,
                format_f64(v.r),
                format_f64(v.non_accelerated),
                format_f64(v.accelerated)
            )?;
        }
        writeln!(out, "ghz_optimal={}", self.ghz_optimal())
    }

    pub fn report_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_report(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii report")
    }
}

/// Sweeps every channel and summarizes the oracle fidelities.
pub fn compare_channels(config: &SweepConfig) -> Result<ComparisonSummary> {
    let mut channels = config.channels.clone();
    channels.sort();
    channels.dedup();
    if channels != ChannelKind::ALL {
        return Err(ExperimentError::config("comparison needs channel=all"));
    }
    summarize(&sweep(config)?)
}

/// Pure function of the records. Needs one curve per channel in each
/// comparison group, so all-branch sweeps are rejected.
pub fn summarize(records: &[SweepRecord]) -> Result<ComparisonSummary> {
    let curves = curves(records);

    let mut grouped: BTreeMap<(InfoKind, CurveR0), ChannelCurves> = BTreeMap::new();
    for (key, pts) in &curves {
        let slot = grouped.entry((key.info_kind, key.r0)).or_default();
        if slot.insert(key.channel, pts).is_some() {
            return Err(ExperimentError::config(format!(
                "more than one branch per channel; compare needs {} or {}",
                BranchSelection::PlottedBranch.tag(),
                BranchSelection::Average.tag()
            )));
        }
    }

    let groups = grouped
        .into_iter()
        .map(|((info_kind, r0), by_channel)| compare_group(info_kind, r0, &by_channel))
        .collect();

    Ok(ComparisonSummary {
        groups,
        monotonicity_violations: monotonicity_violations(&curves),
        ordering_violations: ordering_violations(&curves),
    })
}

type ChannelCurves<'a> = BTreeMap<ChannelKind, &'a Vec<(f64, f64)>>;

fn compare_group(info_kind: InfoKind, r0: CurveR0, by_channel: &ChannelCurves) -> ComparisonGroup {
    let stats: Vec<ChannelStats> = by_channel
        .iter()
        .map(|(&channel, pts)| {
            let (min_at, min) = pts
                .iter()
                .copied()
                .fold(
                    (f64::NAN, f64::INFINITY),
                    |acc, p| if p.1 < acc.1 { p } else { acc },
                );
            let mean = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
            ChannelStats {
                channel,
                min,
                min_at,
                mean,
                points: pts.len(),
            }
        })
        .collect();

    // r (as bits) -> channel -> fidelity
    let mut at_r: BTreeMap<u64, BTreeMap<ChannelKind, f64>> = BTreeMap::new();
    for (&channel, pts) in by_channel {
        for &(r, f) in pts.iter() {
            at_r.entry(r.to_bits()).or_default().insert(channel, f);
        }
    }

    let mut winners = Vec::new();
    let mut counts: BTreeMap<ChannelKind, usize> = by_channel.keys().map(|&c| (c, 0)).collect();
    let mut ghz_exceptions = Vec::new();
    for (bits, values) in &at_r {
        let r = f64::from_bits(*bits);
        let best = values.values().copied().fold(f64::NEG_INFINITY, f64::max);
        let top: Vec<ChannelKind> = values
            .iter()
            .filter(|(_, &f)| f >= best - TIE_TOL)
            .map(|(&c, _)| c)
            .collect();
        for c in &top {
            *counts.get_mut(c).expect("channel present") += 1;
        }
        winners.push(PointWinner {
            r,
            best,
            winners: top,
        });
        if let Some(&ghz) = values.get(&ChannelKind::Ghz) {
            for (&channel, &other) in values {
                if channel != ChannelKind::Ghz && ghz < other - TIE_TOL {
                    ghz_exceptions.push(PointwiseException {
                        r,
                        channel,
                        ghz,
                        other,
                    });
                }
            }
        }
    }

    let ghz_min = stats
        .iter()
        .find(|s| s.channel == ChannelKind::Ghz)
        .map(|s| s.min);
    let ghz_minimum_exceeds = match ghz_min {
        Some(g) => stats
            .iter()
            .filter(|s| s.channel != ChannelKind::Ghz)
            .all(|s| g > s.min),
        None => false,
    };

    ComparisonGroup {
        info_kind,
        r0,
        stats,
        winners,
        winner_counts: counts.into_iter().collect(),
        ghz_exceptions,
        ghz_minimum_exceeds,
    }
}

fn monotonicity_violations(
    curves: &BTreeMap<CurveKey, Vec<(f64, f64)>>,
) -> Vec<MonotonicityViolation> {
    let mut out = Vec::new();
    for (key, pts) in curves {
        for w in pts.windows(2) {
            if w[1].1 > w[0].1 + FLAT_TOL {
                out.push(MonotonicityViolation {
                    curve: *key,
                    r_before: w[0].0,
                    r_after: w[1].0,
                    f_before: w[0].1,
                    f_after: w[1].1,
                });
            }
        }
    }
    out
}

fn ordering_violations(curves: &BTreeMap<CurveKey, Vec<(f64, f64)>>) -> Vec<OrderingViolation> {
    let mut out = Vec::new();
    for (key, na) in curves {
        if key.info_kind != InfoKind::NonAccelerated {
            continue;
        }
        let ac_key = CurveKey {
            info_kind: InfoKind::Accelerated,
            r0: CurveR0::TrackChannel,
            ..*key
        };
        let Some(ac) = curves.get(&ac_key) else {
            continue;
        };
        let ac_at: BTreeMap<u64, f64> = ac.iter().map(|&(r, f)| (r.to_bits(), f)).collect();
        for &(r, f_na) in na {
            if let Some(&f_ac) = ac_at.get(&r.to_bits()) {
                if f_na < f_ac - TIE_TOL {
                    out.push(OrderingViolation {
                        channel: key.channel,
                        branch: key.branch,
                        r,
                        non_accelerated: f_na,
                        accelerated: f_ac,
                    });
                }
            }
        }
    }
    out
}
