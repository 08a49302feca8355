//! Printed closed forms against the oracle: fidelity polynomials and the
//! channel element tables in one report.

use std::io::{self, Write};

use rayon::prelude::*;

use super::config::RGrid;
use super::{ExperimentError, Result};
use crate::channels::{
    audit_channel, cube_grid, entry_verdict, write_audit_csv, ChannelKind, ChannelRealization,
    DensityForm, ElementDiscrepancy, EntryVerdict, AMBIGUOUS_ENTRIES, KNOWN_TABLE_DISCREPANCIES,
};
use crate::protocol::{run_branch, InfoKind, InfoQubit, PrintedFormula, ProtocolError};
use crate::report::format_f64;
use crate::rindler::{AccelerationParam, RegisterAcceleration};

pub const FORMULA_CSV_HEADER: &str = "formula,channel,info_kind,bell,charlie,points,max_abs_diff,worst_r0,worst_r1,worst_r2,worst_r3,worst_alpha_sq,closed,oracle,status";

const ENTRY_CSV_HEADER: &str = "kind,row,col,max_abs_diff,worst_r1,worst_r2,worst_r3,status,note";

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    /// Values each of r0, r1, r2, r3 ranges over independently.
    pub grid_values: Vec<f64>,
    pub alpha_sq_values: Vec<f64>,
    pub tolerance: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self::with_step(0.1, 1e-10).expect("valid defaults")
    }
}

impl AuditConfig {
    /// Grid `0, step, ..., pi/4` at alpha^2 in {0.2, 0.5, 0.9}.
    pub fn with_step(step: f64, tolerance: f64) -> Result<Self> {
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(ExperimentError::config(format!(
                "bad tolerance {tolerance}"
            )));
        }
        Ok(Self {
            grid_values: RGrid::new(0.0, AccelerationParam::MAX, step)?.points(),
            alpha_sq_values: vec![0.2, 0.5, 0.9],
            tolerance,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.grid_values.is_empty() || self.alpha_sq_values.is_empty() {
            return Err(ExperimentError::config("empty audit grid"));
        }
        if let Some(a) = self
            .alpha_sq_values
            .iter()
            .find(|a| !(0.0..=1.0).contains(*a))
        {
            return Err(ExperimentError::config(format!(
                "alpha_sq {a} outside [0, 1]"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditPoint {
    /// `[r0, r1, r2, r3]`; r0 is 0 for non-accelerated formulas.
    pub r: [f64; 4],
    pub alpha_sq: f64,
    pub closed: f64,
    pub oracle: f64,
}

impl AuditPoint {
    pub fn abs_diff(&self) -> f64 {
        (self.closed - self.oracle).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulaVerdict {
    pub formula: PrintedFormula,
    pub points: usize,
    pub max_abs_diff: f64,
    pub worst: AuditPoint,
    pub confirmed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulaAudit {
    pub tolerance: f64,
    pub formulas: Vec<FormulaVerdict>,
    /// Catalogued and ambiguous table entries.
    pub entries: Vec<EntryVerdict>,
    pub table_discrepancies: Vec<ElementDiscrepancy>,
}

impl FormulaAudit {
    pub fn verdict(&self, formula: PrintedFormula) -> Option<&FormulaVerdict> {
        self.formulas.iter().find(|v| v.formula == formula)
    }

    /// Table discrepancies missing from the catalogue.
    pub fn uncatalogued(&self) -> Vec<&ElementDiscrepancy> {
        self.table_discrepancies
            .iter()
            .filter(|d| !KNOWN_TABLE_DISCREPANCIES.contains(&(d.kind, d.row, d.col)))
            .collect()
    }

    pub fn write_report<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "# fidelity formulas (tolerance {})",
            format_f64(self.tolerance)
        )?;
        writeln!(out, "{FORMULA_CSV_HEADER}")?;
        for v in &self.formulas {
            let (bell, charlie) = v.formula.branch();
            let w = &v.worst;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                v.formula.tag(),
                v.formula.channel().tag(),
                v.formula.info_kind().tag(),
                bell.tag(),
                charlie.tag(),
                v.points,
                format_f64(v.max_abs_diff),
                format_f64(w.r[0]),
                format_f64(w.r[1]),
                format_f64(w.r[2]),
                format_f64(w.r[3]),
                format_f64(w.alpha_sq),
                format_f64(w.closed),
                format_f64(w.oracle),
                if v.confirmed { "CONFIRMED" } else { "MISMATCH" },
            )?;
        }
        writeln!(out)?;
        writeln!(out, "# table entries")?;
        writeln!(out, "{ENTRY_CSV_HEADER}")?;
        for e in &self.entries {
            let key = (e.kind, e.row, e.col);
            let mut notes = Vec::new();
            if KNOWN_TABLE_DISCREPANCIES.contains(&key) {
                notes.push("catalogued");
            }
            if AMBIGUOUS_ENTRIES.contains(&key) {
                notes.push("ambiguous");
            }
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                e.kind.tag(),
                e.row,
                e.col,
                format_f64(e.max_abs_diff),
                format_f64(e.worst_point[0]),
                format_f64(e.worst_point[1]),
                format_f64(e.worst_point[2]),
                if e.confirmed { "CONFIRMED" } else { "MISMATCH" },
                notes.join("|"),
            )?;
        }
        writeln!(out)?;
        writeln!(out, "# table discrepancies")?;
        write_audit_csv(&mut out, &self.table_discrepancies)
    }

    pub fn report_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_report(&mut buf).expect("writing to a Vec");
        buf
    }
}

/// Audits all eight fidelity polynomials and the three element tables.
pub fn audit_formulas(config: &AuditConfig) -> Result<FormulaAudit> {
    config.validate()?;
    let formulas = PrintedFormula::ALL
        .iter()
        .map(|&f| formula_verdict(f, config))
        .collect::<Result<Vec<_>>>()?;

    let cube = cube_grid(&config.grid_values);
    let mut table_discrepancies = Vec::new();
    for kind in ChannelKind::ALL {
        table_discrepancies.extend(audit_channel(kind, &cube, config.tolerance)?);
    }

    let mut keys: Vec<(ChannelKind, usize, usize)> = KNOWN_TABLE_DISCREPANCIES
        .iter()
        .chain(AMBIGUOUS_ENTRIES)
        .copied()
        .collect();
    keys.sort();
    keys.dedup();
    let entries = keys
        .par_iter()
        .map(|&(kind, row, col)| entry_verdict(kind, row, col, &cube, config.tolerance))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    Ok(FormulaAudit {
        tolerance: config.tolerance,
        formulas,
        entries,
        table_discrepancies,
    })
}

fn formula_verdict(formula: PrintedFormula, config: &AuditConfig) -> Result<FormulaVerdict> {
    let channel = formula.channel();
    let (bell, charlie) = formula.branch();
    let r0_values: &[f64] = match formula.info_kind() {
        InfoKind::NonAccelerated => &[0.0],
        InfoKind::Accelerated => &config.grid_values,
    };
    let cube = cube_grid(&config.grid_values);
    let per_point: Vec<Vec<AuditPoint>> = cube
        .par_iter()
        .map(|point| {
            let realization =
                ChannelRealization::new(channel, RegisterAcceleration::from_values(point)?)?;
            let mut found = Vec::new();
            for &r0 in r0_values {
                let r0_param = match formula.info_kind() {
                    InfoKind::NonAccelerated => None,
                    InfoKind::Accelerated => Some(AccelerationParam::new(r0)?),
                };
                for &alpha_sq in &config.alpha_sq_values {
                    let info = InfoQubit::from_alpha_sq(alpha_sq, r0_param)?;
                    let res =
                        match run_branch(&realization, &info, bell, charlie, DensityForm::Oracle) {
                            Ok(res) => res,
                            Err(ProtocolError::ImpossibleBranch { .. }) => continue,
                            Err(e) => return Err(e.into()),
                        };
                    let (a, b) = info.real_amplitudes()?;
                    let r = [r0, point[0], point[1], point[2]];
                    found.push(AuditPoint {
                        r,
                        alpha_sq,
                        closed: formula.evaluate(r, a, b),
                        oracle: res.fidelity_oracle,
                    });
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;

    let points: Vec<AuditPoint> = per_point.into_iter().flatten().collect();
    // first strict maximum in enumeration order
    let worst = points
        .iter()
        .copied()
        .reduce(|best, p| {
            if p.abs_diff() > best.abs_diff() {
                p
            } else {
                best
            }
        })
        .ok_or_else(|| {
            ExperimentError::config(format!("{formula}: no possible branch on the grid"))
        })?;
    Ok(FormulaVerdict {
        formula,
        points: points.len(),
        max_abs_diff: worst.abs_diff(),
        worst,
        confirmed: worst.abs_diff() <= config.tolerance,
    })
}
