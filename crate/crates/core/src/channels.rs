//! The three tripartite channel states, their accelerated region-I density
//! operators, and the transcribed element tables they are audited against.
//!
//! Matrix rows and columns are reported 1-based, `index = label + 1`, where the
//! label puts channel qubit 1 on the least-significant bit. So index 2 is
//! `|100>` (qubit 1 excited), index 3 is `|010>`, index 5 is `|001>`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::qmath::{Complex64, DensityOperator, Matrix, QMathError, StateVector, Validity};
use crate::report::format_f64;
use crate::rindler::{accelerate_register, RegisterAcceleration, RindlerError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("channel acceleration needs 3 parameters, got {0}")]
    WrongRegisterLength(usize),
    #[error("audit grid is empty")]
    EmptyGrid,
    #[error("unknown channel {0:?} (expected w, ghz or ghz-like)")]
    UnknownChannel(String),
    #[error(transparent)]
    Rindler(#[from] RindlerError),
    #[error(transparent)]
    QMath(#[from] QMathError),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelKind {
    W,
    Ghz,
    GhzLike,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [ChannelKind::W, ChannelKind::Ghz, ChannelKind::GhzLike];

    /// Overall prefactor of the element table.
    pub fn normalization_probability(self) -> f64 {
        match self {
            ChannelKind::W => 1.0 / 3.0,
            ChannelKind::Ghz => 1.0 / 2.0,
            ChannelKind::GhzLike => 1.0 / 4.0,
        }
    }

    /// Short machine tag used in CSV files and on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            ChannelKind::W => "w",
            ChannelKind::Ghz => "ghz",
            ChannelKind::GhzLike => "ghz_like",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ChannelKind {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "w" => Ok(ChannelKind::W),
            "ghz" => Ok(ChannelKind::Ghz),
            "ghz_like" | "ghz-like" | "ghzlike" => Ok(ChannelKind::GhzLike),
            _ => Err(ChannelError::UnknownChannel(s.to_string())),
        }
    }
}

/// Minkowski (unaccelerated) channel state on channel qubits 1, 2, 3, stored
/// as register qubits 0, 1, 2.
pub fn minkowski_state(kind: ChannelKind) -> StateVector {
    // labels: bit k set = channel qubit k+1 excited
    let (labels, amp): (&[usize], f64) = match kind {
        ChannelKind::W => (&[0b001, 0b010, 0b100], (1.0f64 / 3.0).sqrt()),
        ChannelKind::Ghz => (&[0b000, 0b111], std::f64::consts::FRAC_1_SQRT_2),
        ChannelKind::GhzLike => (&[0b001, 0b010, 0b100, 0b111], 0.5),
    };
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 8];
    for &l in labels {
        amplitudes[l] = Complex64::new(amp, 0.0);
    }
    StateVector::normalized(amplitudes).expect("channel states are normalized")
}

/// `cos r_k` and `sin r_k` for channel qubits k = 1, 2, 3 (slot 0 unused).
#[derive(Debug, Clone, Copy)]
pub struct ChannelTrig {
    pub c: [f64; 4],
    pub s: [f64; 4],
}

impl ChannelTrig {
    pub fn new(acc: &RegisterAcceleration) -> Result<Self> {
        if acc.len() != 3 {
            return Err(ChannelError::WrongRegisterLength(acc.len()));
        }
        let mut c = [1.0; 4];
        let mut s = [0.0; 4];
        for (k, r) in acc.iter().enumerate() {
            c[k + 1] = r.cos();
            s[k + 1] = r.sin();
        }
        Ok(Self { c, s })
    }
}

/// One printed element; `row`/`col` are 1-based.
#[derive(Clone, Copy)]
pub struct TableEntry {
    pub row: usize,
    pub col: usize,
    pub value: fn(&ChannelTrig) -> f64,
}

macro_rules! entries {
    (
        [$c1:ident, $c2:ident, $c3:ident, $s1:ident, $s2:ident, $s3:ident];
        $( ($row:expr, $col:expr) => $body:expr ),* $(,)?
    ) => {
        &[$( TableEntry { row: $row, col: $col, value: {
            #[allow(unused_variables)]
            fn f(t: &ChannelTrig) -> f64 {
                let [_, $c1, $c2, $c3] = t.c;
                let [_, $s1, $s2, $s3] = t.s;
                $body
            }
            f
        } } ),*]
    };
}

// The tables below are transcribed as printed, including entries the oracle
// disagrees with. Unlisted entries are zero.
static W_TABLE: &[TableEntry] = entries![
    [c1, c2, c3, s1, s2, s3];
    (2, 2) => c2 * c2 * c3 * c3,
    (2, 3) => c1 * c2 * c3 * c3,
    (3, 2) => c1 * c2 * c3 * c3,
    (2, 5) => c1 * c3 * c2 * c2,
    (5, 2) => c1 * c3 * c2 * c2,
    (3, 3) => c1 * c1 * c3 * c3,
    (3, 5) => c2 * c3 * c1 * c1,
    (5, 3) => c2 * c3 * c1 * c1,
    (4, 4) => s2 * s2 * c3 * c3 + s1 * s1 * c3 * c3,
    (4, 6) => c2 * c3 * s1 * s1,
    (6, 4) => c2 * c3 * s1 * s1,
    (4, 7) => c2 * c3 * s1 * s1,
    (7, 4) => c2 * c3 * s1 * s1,
    (5, 5) => c1 * c1 * c2 * c2,
    (6, 6) => s1 * s1 * c2 * c2 + s3 * s3 * c2 * c2,
    (6, 7) => c1 * c2 * s3 * s3,
    (7, 6) => c1 * c2 * s3 * s3,
    (7, 7) => s1 * s1 * c1 * c1 + s3 * s3 * c1 * c1,
    (8, 8) => s1 * s1 * s2 * s2 + s1 * s1 * s3 * s3 + s2 * s2 * s3 * s3,
];

static GHZ_TABLE: &[TableEntry] = entries![
    [c1, c2, c3, s1, s2, s3];
    (1, 1) => c1 * c1 * c2 * c2 * c3 * c3,
    (2, 2) => c2 * c2 * c3 * c3 * s1 * s1,
    (3, 3) => c1 * c1 * c3 * c3 * s2 * s2,
    (4, 4) => c3 * c3 * s1 * s1 * s2 * s2,
    (5, 5) => c1 * c1 * c2 * c2 * s3 * s3,
    (6, 6) => c2 * c2 * s1 * s1 * s3 * s3,
    (7, 7) => c1 * c1 * s2 * s2 * s3 * s3,
    (8, 8) => s1 * s1 * s2 * s2 * s3 * s3 + 1.0,
    (8, 1) => c1 * c2 * c3,
    (1, 8) => c1 * c2 * c3,
];

static GHZ_LIKE_TABLE: &[TableEntry] = entries![
    [c1, c2, c3, s1, s2, s3];
    (2, 2) => c2 * c2 * c3 * c3,
    (2, 5) => c1 * c3 * c2 * c2,
    (5, 2) => c1 * c3 * c2 * c2,
    (2, 3) => c1 * c2 * c3 * c3,
    (3, 2) => c1 * c2 * c3 * c3,
    (2, 8) => c2 * c3,
    (8, 2) => c2 * c3,
    (3, 3) => c1 * c1 * c3 * c3,
    (3, 5) => c2 * c3 * c1 * c1,
    (5, 3) => c2 * c3 * c1 * c1,
    // printed with the same index twice; read as the mirrored pair
    (3, 8) => c1 * c3,
    (8, 3) => c1 * c3,
    (4, 4) => s2 * s2 * c3 * c3 + s1 * s1 * c3 * c3,
    (4, 7) => c1 * c3 * s2 * s2,
    (7, 4) => c1 * c3 * s2 * s2,
    (4, 6) => c2 * c3 * s1 * s1,
    (6, 4) => c2 * c3 * s1 * s1,
    (5, 5) => c1 * c1 * c2 * c2,
    (5, 8) => c2 * c2 * c3,
    (8, 5) => c2 * c2 * c3,
    (6, 6) => s1 * s1 * c2 * c2 + s3 * s3 * c2 * c2,
    (6, 7) => c1 * c2 * s3 * s3,
    (7, 6) => c1 * c2 * s3 * s3,
    (7, 7) => s2 * s2 * c1 * c1 + s3 * s3 * c1 * c1,
    (8, 8) => s1 * s1 * s2 * s2 + s1 * s1 * s3 * s3 + s2 * s2 * s3 * s3 + 1.0,
];

pub fn printed_table(kind: ChannelKind) -> &'static [TableEntry] {
    match kind {
        ChannelKind::W => W_TABLE,
        ChannelKind::Ghz => GHZ_TABLE,
        ChannelKind::GhzLike => GHZ_LIKE_TABLE,
    }
}

/// Table entries the oracle is known to contradict, as (kind, row, col).
pub const KNOWN_TABLE_DISCREPANCIES: &[(ChannelKind, usize, usize)] = &[
    (ChannelKind::W, 4, 7),
    (ChannelKind::W, 7, 4),
    (ChannelKind::W, 7, 7),
    (ChannelKind::GhzLike, 5, 8),
    (ChannelKind::GhzLike, 8, 5),
];

/// Printed entries whose transcription needed a reading decision.
pub const AMBIGUOUS_ENTRIES: &[(ChannelKind, usize, usize)] = &[
    (ChannelKind::W, 7, 7),
    (ChannelKind::GhzLike, 3, 8),
    (ChannelKind::GhzLike, 8, 3),
    (ChannelKind::GhzLike, 5, 8),
    (ChannelKind::GhzLike, 8, 5),
];

/// Density operator assembled from the printed table with its prefactor.
/// Not validated: trace, positivity and Hermiticity are whatever the table
/// yields.
pub fn closed_form_density(
    kind: ChannelKind,
    acc: &RegisterAcceleration,
) -> Result<DensityOperator> {
    let trig = ChannelTrig::new(acc)?;
    let p = kind.normalization_probability();
    let mut m = Matrix::zeros(8, 8);
    for e in printed_table(kind) {
        m[(e.row - 1, e.col - 1)] = Complex64::new(p * (e.value)(&trig), 0.0);
    }
    Ok(DensityOperator::from_matrix_unchecked(m)?)
}

/// First-principles region-I density operator: Unruh-embed each channel
/// qubit and trace out region II.
pub fn oracle_density(kind: ChannelKind, acc: &RegisterAcceleration) -> Result<DensityOperator> {
    if acc.len() != 3 {
        return Err(ChannelError::WrongRegisterLength(acc.len()));
    }
    Ok(accelerate_register(&minkowski_state(kind), acc)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityForm {
    Oracle,
    Closed,
}

impl FromStr for DensityForm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "oracle" => Ok(DensityForm::Oracle),
            "closed" => Ok(DensityForm::Closed),
            other => Err(format!(
                "unknown form {other:?} (expected oracle or closed)"
            )),
        }
    }
}

/// A channel at a given acceleration, in both constructions.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub kind: ChannelKind,
    pub acc: RegisterAcceleration,
    pub rho_oracle: DensityOperator,
    /// Unvalidated; see `closed_validity`.
    pub rho_closed: DensityOperator,
    pub closed_validity: Validity,
}

impl ChannelRealization {
    pub fn new(kind: ChannelKind, acc: RegisterAcceleration) -> Result<Self> {
        let rho_oracle = oracle_density(kind, &acc)?;
        let rho_closed = closed_form_density(kind, &acc)?;
        let closed_validity = rho_closed.validity();
        Ok(Self {
            kind,
            acc,
            rho_oracle,
            rho_closed,
            closed_validity,
        })
    }

    pub fn density(&self, form: DensityForm) -> &DensityOperator {
        match form {
            DensityForm::Oracle => &self.rho_oracle,
            DensityForm::Closed => &self.rho_closed,
        }
    }
}

/// One table entry at one grid point where the printed value and the oracle
/// differ by more than the audit tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementDiscrepancy {
    pub kind: ChannelKind,
    pub row: usize,
    pub col: usize,
    pub r_point: [f64; 3],
    pub closed_value: Complex64,
    pub oracle_value: Complex64,
    pub abs_diff: f64,
}

impl ElementDiscrepancy {
    fn sort_key(&self, other: &Self) -> std::cmp::Ordering {
        self.kind
            .cmp(&other.kind)
            .then(self.row.cmp(&other.row))
            .then(self.col.cmp(&other.col))
            .then_with(|| {
                self.r_point
                    .iter()
                    .zip(&other.r_point)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    }
}

/// Cartesian cube `values^3` in lexicographic order.
pub fn cube_grid(values: &[f64]) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(values.len().pow(3));
    for &a in values {
        for &b in values {
            for &c in values {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Compares every matrix entry of the printed table with the oracle at every
/// grid point and reports those off by more than `tolerance`.
pub fn audit_channel(
    kind: ChannelKind,
    grid: &[[f64; 3]],
    tolerance: f64,
) -> Result<Vec<ElementDiscrepancy>> {
    if grid.is_empty() {
        return Err(ChannelError::EmptyGrid);
    }
    let per_point: Vec<Vec<ElementDiscrepancy>> = grid
        .par_iter()
        .map(|point| {
            let acc = RegisterAcceleration::from_values(point)?;
            let closed = closed_form_density(kind, &acc)?;
            let oracle = oracle_density(kind, &acc)?;
            let mut found = Vec::new();
            for row in 0..8 {
                for col in 0..8 {
                    let closed_value = closed.entry(row, col);
                    let oracle_value = oracle.entry(row, col);
                    let abs_diff = (closed_value - oracle_value).norm();
                    if abs_diff > tolerance {
                        found.push(ElementDiscrepancy {
                            kind,
                            row: row + 1,
                            col: col + 1,
                            r_point: *point,
                            closed_value,
                            oracle_value,
                            abs_diff,
                        });
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<_> = per_point.into_iter().flatten().collect();
    all.sort_by(|a, b| a.sort_key(b));
    Ok(all)
}

pub const AUDIT_CSV_HEADER: &str =
    "kind,row,col,r1,r2,r3,closed_re,closed_im,oracle_re,oracle_im,abs_diff";

pub fn write_audit_csv<W: Write>(mut out: W, rows: &[ElementDiscrepancy]) -> io::Result<()> {
    writeln!(out, "{AUDIT_CSV_HEADER}")?;
    for d in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            d.kind.tag(),
            d.row,
            d.col,
            format_f64(d.r_point[0]),
            format_f64(d.r_point[1]),
            format_f64(d.r_point[2]),
            format_f64(d.closed_value.re),
            format_f64(d.closed_value.im),
            format_f64(d.oracle_value.re),
            format_f64(d.oracle_value.im),
            format_f64(d.abs_diff),
        )?;
    }
    Ok(())
}

/// Worst case of one table entry over an audit grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryVerdict {
    pub kind: ChannelKind,
    pub row: usize,
    pub col: usize,
    pub max_abs_diff: f64,
    pub worst_point: [f64; 3],
    pub confirmed: bool,
}

/// Max |closed - oracle| of a single entry across the grid.
pub fn entry_verdict(
    kind: ChannelKind,
    row: usize,
    col: usize,
    grid: &[[f64; 3]],
    tolerance: f64,
) -> Result<EntryVerdict> {
    if grid.is_empty() {
        return Err(ChannelError::EmptyGrid);
    }
    let mut worst = (f64::NEG_INFINITY, grid[0]);
    for point in grid {
        let acc = RegisterAcceleration::from_values(point)?;
        let closed = closed_form_density(kind, &acc)?.entry(row - 1, col - 1);
        let oracle = oracle_density(kind, &acc)?.entry(row - 1, col - 1);
        let d = (closed - oracle).norm();
        if d > worst.0 {
            worst = (d, *point);
        }
    }
    Ok(EntryVerdict {
        kind,
        row,
        col,
        max_abs_diff: worst.0,
        worst_point: worst.1,
        confirmed: worst.0 <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{EXACT_TOL, PIPELINE_TOL};
    use crate::rindler::AccelerationParam;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn acc(r: [f64; 3]) -> RegisterAcceleration {
        RegisterAcceleration::from_values(&r).unwrap()
    }

    #[test]
    fn ghz_amplitudes() {
        let g = minkowski_state(ChannelKind::Ghz);
        for label in 0..8 {
            let expected = if label == 0 || label == 7 {
                std::f64::consts::FRAC_1_SQRT_2
            } else {
                0.0
            };
            assert_abs_diff_eq!(g.amplitude(label).re, expected, epsilon = EXACT_TOL);
        }
    }

    #[test]
    fn w_weights_are_one_third() {
        let w = minkowski_state(ChannelKind::W);
        for label in [1, 2, 4] {
            assert_abs_diff_eq!(
                w.amplitude(label).norm_sqr(),
                1.0 / 3.0,
                epsilon = EXACT_TOL
            );
        }
        assert_abs_diff_eq!(w.amplitude(0).norm(), 0.0);
    }

    #[test]
    fn ghz_like_cross_term_with_111() {
        let a = acc([0.2, 0.5, 0.7]);
        let rho = oracle_density(ChannelKind::GhzLike, &a).unwrap();
        let expected = 0.25 * 0.5f64.cos() * 0.7f64.cos();
        assert_abs_diff_eq!(rho.entry(1, 7).re, expected, epsilon = EXACT_TOL);
    }

    #[test]
    fn ghz_corner_entry() {
        let a = acc([0.1, 0.35, 0.6]);
        let expected = 0.5 * 0.1f64.cos() * 0.35f64.cos() * 0.6f64.cos();
        let closed = closed_form_density(ChannelKind::Ghz, &a).unwrap();
        let oracle = oracle_density(ChannelKind::Ghz, &a).unwrap();
        assert_abs_diff_eq!(closed.entry(7, 0).re, expected, epsilon = EXACT_TOL);
        assert_abs_diff_eq!(oracle.entry(0, 7).re, expected, epsilon = EXACT_TOL);
    }

    #[test]
    fn ghz_last_diagonal_entry() {
        let s = 0.4f64.sin();
        let rho = oracle_density(ChannelKind::Ghz, &acc([0.4; 3])).unwrap();
        assert_abs_diff_eq!(
            rho.entry(7, 7).re,
            0.5 * (s.powi(6) + 1.0),
            epsilon = EXACT_TOL
        );
    }

    #[test]
    fn w_entry_for_label_011() {
        // index 7 = label 6 = qubits 2 and 3 excited
        let (c, s) = (0.5f64.cos(), 0.5f64.sin());
        let rho = oracle_density(ChannelKind::W, &acc([0.5; 3])).unwrap();
        assert_abs_diff_eq!(
            rho.entry(6, 6).re,
            (c * c * (s * s + s * s)) / 3.0,
            epsilon = EXACT_TOL
        );
    }

    #[test]
    fn w_closed_form_at_rest() {
        let rho = closed_form_density(ChannelKind::W, &RegisterAcceleration::at_rest(3)).unwrap();
        for i in [1, 2, 4] {
            for j in [1, 2, 4] {
                assert_abs_diff_eq!(rho.entry(i, j).re, 1.0 / 3.0, epsilon = EXACT_TOL);
            }
        }
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = EXACT_TOL);
    }

    #[test]
    fn closed_forms_at_rest_are_pure_projectors() {
        for kind in ChannelKind::ALL {
            let closed = closed_form_density(kind, &RegisterAcceleration::at_rest(3)).unwrap();
            let pure = minkowski_state(kind).projector();
            assert!(closed.max_abs_diff(&pure).unwrap() < EXACT_TOL, "{kind}");
        }
    }

    #[test]
    fn w_entry_77_printed_vs_oracle() {
        let (c1, s1, s2, s3) = (0.1f64.cos(), 0.1f64.sin(), 0.4f64.sin(), 0.7f64.sin());
        let a = acc([0.1, 0.4, 0.7]);
        let closed = closed_form_density(ChannelKind::W, &a).unwrap();
        let oracle = oracle_density(ChannelKind::W, &a).unwrap();
        assert_abs_diff_eq!(
            closed.entry(6, 6).re,
            (s1 * s1 * c1 * c1 + s3 * s3 * c1 * c1) / 3.0,
            epsilon = EXACT_TOL
        );
        assert_abs_diff_eq!(
            oracle.entry(6, 6).re,
            c1 * c1 * (s2 * s2 + s3 * s3) / 3.0,
            epsilon = EXACT_TOL
        );
        // at equal accelerations the typo is invisible
        let u = acc([0.3; 3]);
        let d = closed_form_density(ChannelKind::W, &u)
            .unwrap()
            .max_abs_diff(&oracle_density(ChannelKind::W, &u).unwrap())
            .unwrap();
        assert!(d < EXACT_TOL);
    }

    #[test]
    fn oracle_is_valid_on_a_coarse_grid() {
        for kind in ChannelKind::ALL {
            for p in cube_grid(&[0.0, 0.33, FRAC_PI_4]) {
                let rho = oracle_density(kind, &acc(p)).unwrap();
                assert!(rho.validity().is_state(PIPELINE_TOL));
            }
        }
    }

    #[test]
    fn audit_at_rest_is_empty() {
        for kind in ChannelKind::ALL {
            assert!(audit_channel(kind, &[[0.0; 3]], 1e-10).unwrap().is_empty());
        }
    }

    #[test]
    fn audit_finds_catalogued_entries() {
        let grid = cube_grid(&[0.0, 0.2, 0.4, 0.6, FRAC_PI_4]);
        for kind in ChannelKind::ALL {
            let found = audit_channel(kind, &grid, 1e-10).unwrap();
            let mut entries: Vec<_> = found.iter().map(|d| (d.kind, d.row, d.col)).collect();
            entries.dedup();
            let expected: Vec<_> = KNOWN_TABLE_DISCREPANCIES
                .iter()
                .copied()
                .filter(|e| e.0 == kind)
                .collect();
            let mut entries_sorted = entries.clone();
            entries_sorted.sort();
            entries_sorted.dedup();
            let mut expected_sorted = expected.clone();
            expected_sorted.sort();
            assert_eq!(entries_sorted, expected_sorted, "{kind}");
        }
    }

    #[test]
    fn audit_rejects_empty_grid() {
        assert_eq!(
            audit_channel(ChannelKind::W, &[], 1e-10),
            Err(ChannelError::EmptyGrid)
        );
    }

    #[test]
    fn ghz_like_mirror_confirmed_and_coefficient_rejected() {
        let grid = cube_grid(&[0.0, 0.3, FRAC_PI_4]);
        let mirror = entry_verdict(ChannelKind::GhzLike, 8, 3, &grid, 1e-10).unwrap();
        assert!(mirror.confirmed);
        let coeff = entry_verdict(ChannelKind::GhzLike, 5, 8, &grid, 1e-10).unwrap();
        assert!(!coeff.confirmed);
        // oracle gives C1 C2 / 4 at (5, 8)
        let a = acc([0.3, FRAC_PI_4, 0.0]);
        let oracle = oracle_density(ChannelKind::GhzLike, &a).unwrap();
        assert_abs_diff_eq!(
            oracle.entry(4, 7).re,
            0.25 * 0.3f64.cos() * FRAC_PI_4.cos(),
            epsilon = EXACT_TOL
        );
    }

    #[test]
    fn csv_layout() {
        let grid = [[0.2, 0.4, 0.6]];
        let rows = audit_channel(ChannelKind::W, &grid, 1e-10).unwrap();
        let mut buf = Vec::new();
        write_audit_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(AUDIT_CSV_HEADER));
        let first = lines.next().unwrap();
        assert!(first.starts_with("w,4,7,"));
        assert_eq!(first.split(',').count(), 11);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn wrong_register_length() {
        let a = RegisterAcceleration::uniform(2, AccelerationParam::ZERO);
        assert_eq!(
            oracle_density(ChannelKind::W, &a),
            Err(ChannelError::WrongRegisterLength(2))
        );
        assert!(closed_form_density(ChannelKind::W, &a).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "GHZ-like".parse::<ChannelKind>().unwrap(),
            ChannelKind::GhzLike
        );
        assert_eq!("w".parse::<ChannelKind>().unwrap(), ChannelKind::W);
        assert!("bell".parse::<ChannelKind>().is_err());
        for k in ChannelKind::ALL {
            assert_eq!(k.tag().parse::<ChannelKind>().unwrap(), k);
        }
    }
}
