//! Sweeps, channel comparison, formula audit and figure emission.

mod audit;
mod compare;
mod config;
mod figures;
mod sweep;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub use audit::{
    audit_formulas, AuditConfig, AuditPoint, FormulaAudit, FormulaVerdict, FORMULA_CSV_HEADER,
};
pub use compare::{
    compare_channels, summarize, ChannelStats, ComparisonGroup, ComparisonSummary,
    MonotonicityViolation, OrderingViolation, PointWinner, PointwiseException,
};
pub use config::{
    parse_channels, parse_info_kinds, parse_key_values, plotted_branch, BranchSelection, R0Choice,
    RGrid, SweepConfig,
};
pub use figures::{emit_figures, figure_config, figure_panels, FigureFormat, Panel, PanelRow};
pub use sweep::{
    curves, sweep, write_sweep_csv, BranchKey, CurveKey, CurveR0, SweepRecord, SWEEP_CSV_HEADER,
};

use crate::channels::ChannelError;
use crate::protocol::ProtocolError;
use crate::rindler::RindlerError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Rindler(#[from] RindlerError),
}

impl ExperimentError {
    pub fn config(msg: impl Into<String>) -> Self {
        ExperimentError::InvalidConfig(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        ExperimentError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 invalid config, 2 I/O, 3 anything that failed mid-pipeline.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::InvalidConfig(_) => 1,
            ExperimentError::Io { .. } => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;
