//! Figure panels as CSV, optionally rendered as static SVG line plots.
//!
//! Panel a overlays non-accelerated information with accelerated
//! information at r0 = r. Panel b shows accelerated information at each
//! fixed r0. Both use the plotted branch of the channel.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{plotted_branch, BranchSelection, R0Choice, RGrid, SweepConfig};
use super::sweep::{BranchKey, CurveR0, SweepRecord};
use super::{ExperimentError, Result};
use crate::channels::ChannelKind;
use crate::protocol::InfoKind;
use crate::report::{format_f64, format_opt};
use crate::rindler::AccelerationParam;

pub const PANEL_CSV_HEADER: &str = "curve,r0,r,fidelity";

const FIGURES: [(&str, ChannelKind); 3] = [
    ("fig2", ChannelKind::W),
    ("fig3", ChannelKind::Ghz),
    ("fig4", ChannelKind::GhzLike),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureFormat {
    Csv,
    CsvAndSvg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelRow {
    /// `na` or `ac`.
    pub curve: &'static str,
    pub r0: Option<f64>,
    pub r: f64,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub name: String,
    pub channel: ChannelKind,
    pub rows: Vec<PanelRow>,
}

impl Panel {
    pub fn csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{PANEL_CSV_HEADER}").unwrap();
        for row in &self.rows {
            writeln!(
                s,
                "{},{},{},{}",
                row.curve,
                format_opt(row.r0),
                format_f64(row.r),
                format_opt(row.fidelity)
            )
            .unwrap();
        }
        s
    }

    /// Consecutive rows sharing a curve label and, for fixed r0, its value.
    fn series(&self) -> Vec<(String, Vec<(f64, f64)>)> {
        let mut out: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for row in &self.rows {
            let label = if self.name.ends_with('b') {
                format!("r0 = {}", row.r0.unwrap_or_default())
            } else if row.curve == "na" {
                "non-accelerated".to_string()
            } else {
                "accelerated, r0 = r".to_string()
            };
            if out.last().is_none_or(|(l, _)| *l != label) {
                out.push((label, Vec::new()));
            }
            if let Some(f) = row.fidelity {
                out.last_mut().unwrap().1.push((row.r, f));
            }
        }
        out
    }

    /// Fixed axes `[0, pi/4] x [0, 1]`.
    pub fn svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const M: f64 = 50.0;
        const DASHES: [&str; 3] = ["", "8,4", "2,3"];
        let x = |r: f64| M + r / AccelerationParam::MAX * (W - 2.0 * M);
        let y = |f: f64| H - M - f * (H - 2.0 * M);
        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
        writeln!(
            s,
            r#"<path d="M{:.2} {:.2} L{:.2} {:.2} L{:.2} {:.2}" fill="none" stroke="black"/>"#,
            x(0.0),
            y(1.0),
            x(0.0),
            y(0.0),
            x(AccelerationParam::MAX),
            y(0.0)
        )
        .unwrap();
        for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
            writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{tick}</text>"#,
                x(0.0) - 6.0,
                y(tick) + 4.0
            )
            .unwrap();
        }
        for tick in [0.0, 0.2, 0.4, 0.6] {
            writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{tick}</text>"#,
                x(tick),
                y(0.0) + 16.0
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">r</text>"#,
            W / 2.0,
            H - 12.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="14" y="{:.2}" font-size="12" transform="rotate(-90 14 {:.2})" text-anchor="middle">fidelity</text>"#,
            H / 2.0,
            H / 2.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="24" font-size="13" text-anchor="middle">{} ({})</text>"#,
            W / 2.0,
            self.name,
            self.channel.tag()
        )
        .unwrap();
        for (i, (label, pts)) in self.series().iter().enumerate() {
            let dash = DASHES[i % DASHES.len()];
            let coords: Vec<String> = pts
                .iter()
                .map(|&(r, f)| format!("{:.2},{:.2}", x(r), y(f)))
                .collect();
            writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5" stroke-dasharray="{dash}"/>"#,
                coords.join(" ")
            )
            .unwrap();
            let ly = y(0.3) - 16.0 * i as f64;
            writeln!(
                s,
                r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="black" stroke-dasharray="{dash}"/>"#,
                x(0.05),
                x(0.12)
            )
            .unwrap();
            writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-size="11">{label}</text>"#,
                x(0.13),
                ly + 4.0
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

/// The sweep that feeds every panel: all channels, both info kinds,
/// r0 tracking the channel plus the fixed values.
pub fn figure_config(grid: RGrid, alpha_sq: f64, fixed_r0: &[f64]) -> Result<SweepConfig> {
    let mut r0_values = vec![R0Choice::TrackChannel];
    for &r0 in fixed_r0 {
        let p =
            AccelerationParam::new(r0).map_err(|e| ExperimentError::config(format!("r0: {e}")))?;
        r0_values.push(R0Choice::Fixed(p));
    }
    Ok(SweepConfig {
        channels: ChannelKind::ALL.to_vec(),
        info_kinds: vec![InfoKind::NonAccelerated, InfoKind::Accelerated],
        r0_values,
        grid,
        alpha_sq,
        branches: BranchSelection::PlottedBranch,
    })
}

/// Builds every panel the records have data for.
pub fn figure_panels(records: &[SweepRecord]) -> Vec<Panel> {
    let mut panels = Vec::new();
    for (fig, channel) in FIGURES {
        let (bell, charlie) = plotted_branch(channel);
        let mine: Vec<&SweepRecord> = records
            .iter()
            .filter(|r| r.channel == channel && r.branch == BranchKey::Branch(bell, charlie))
            .collect();
        let row = |curve, rec: &SweepRecord| PanelRow {
            curve,
            r0: rec.r0,
            r: rec.r,
            fidelity: rec.fidelity_oracle,
        };

        let mut a: Vec<PanelRow> = mine
            .iter()
            .filter(|r| r.curve_r0 == CurveR0::Absent)
            .map(|r| row("na", r))
            .collect();
        a.extend(
            mine.iter()
                .filter(|r| r.curve_r0 == CurveR0::TrackChannel)
                .map(|r| row("ac", r)),
        );
        if !a.is_empty() {
            panels.push(Panel {
                name: format!("{fig}a"),
                channel,
                rows: a,
            });
        }

        let mut fixed: Vec<&SweepRecord> = mine
            .iter()
            .copied()
            .filter(|r| r.curve_r0.fixed_value().is_some())
            .collect();
        fixed.sort_by(|x, y| x.curve_r0.cmp(&y.curve_r0).then(x.r.total_cmp(&y.r)));
        if !fixed.is_empty() {
            panels.push(Panel {
                name: format!("{fig}b"),
                channel,
                rows: fixed.into_iter().map(|r| row("ac", r)).collect(),
            });
        }
    }
    panels
}

/// Writes `<panel>.csv` (and `<panel>.svg`) into `dir`, returning the paths.
pub fn emit_figures(
    records: &[SweepRecord],
    format: FigureFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(ExperimentError::config("no records to plot"));
    }
    let panels = figure_panels(records);
    if panels.is_empty() {
        return Err(ExperimentError::config("records contain no plotted branch"));
    }
    fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    let mut written = Vec::new();
    for panel in &panels {
        let path = dir.join(format!("{}.csv", panel.name));
        fs::write(&path, panel.csv()).map_err(|e| ExperimentError::io(&path, e))?;
        written.push(path);
        if format == FigureFormat::CsvAndSvg {
            let path = dir.join(format!("{}.svg", panel.name));
            fs::write(&path, panel.svg()).map_err(|e| ExperimentError::io(&path, e))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::super::sweep::sweep;
    use super::*;

    fn records() -> Vec<SweepRecord> {
        let cfg = figure_config(RGrid::new(0.0, 0.6, 0.2).unwrap(), 0.5, &[0.1, 0.4, 0.7]).unwrap();
        sweep(&cfg).unwrap()
    }

    #[test]
    fn panel_shapes() {
        let panels = figure_panels(&records());
        let names: Vec<_> = panels.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(
            names,
            ["fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b"]
        );
        for p in &panels {
            let expected = if p.name.ends_with('a') { 2 * 4 } else { 3 * 4 };
            assert_eq!(p.rows.len(), expected, "{}", p.name);
        }
        let fig3a = &panels[2];
        for row in fig3a.rows.iter().filter(|r| r.r == 0.0) {
            assert!((row.fidelity.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_figures(&records(), FigureFormat::CsvAndSvg, dir.path()).unwrap();
        assert_eq!(paths.len(), 12);
        let csv = fs::read_to_string(dir.path().join("fig2b.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 12);
        let svg = fs::read_to_string(dir.path().join("fig4a.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn empty_records_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_figures(&[], FigureFormat::Csv, dir.path()).is_err());
    }
}
