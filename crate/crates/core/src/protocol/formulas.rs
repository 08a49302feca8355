//! The printed closed-form branch fidelities, transcribed term by term.
//!
//! Amplitudes are real; `a2 = alpha^2`, `b2 = beta^2` and so on. Index 0 of the
//! trig arrays is the information qubit, 1..=3 the channel qubits. Formulas
//! for non-accelerated information ignore r0 (C0 = 1, S0 = 0).

use std::fmt;
use std::str::FromStr;

use super::{BellOutcome, CharlieOutcome, InfoKind};
use crate::channels::ChannelKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrintedFormula {
    WNonAccelerated,
    WAccelerated,
    GhzNonAccelerated,
    GhzAccelerated,
    GhzLikeNonAcceleratedZ0,
    GhzLikeNonAcceleratedZ1,
    GhzLikeAcceleratedZ0,
    GhzLikeAcceleratedZ1,
}

impl PrintedFormula {
    pub const ALL: [PrintedFormula; 8] = [
        PrintedFormula::WNonAccelerated,
        PrintedFormula::WAccelerated,
        PrintedFormula::GhzNonAccelerated,
        PrintedFormula::GhzAccelerated,
        PrintedFormula::GhzLikeNonAcceleratedZ0,
        PrintedFormula::GhzLikeNonAcceleratedZ1,
        PrintedFormula::GhzLikeAcceleratedZ0,
        PrintedFormula::GhzLikeAcceleratedZ1,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            PrintedFormula::WNonAccelerated => "w_na",
            PrintedFormula::WAccelerated => "w_ac",
            PrintedFormula::GhzNonAccelerated => "ghz_na",
            PrintedFormula::GhzAccelerated => "ghz_ac",
            PrintedFormula::GhzLikeNonAcceleratedZ0 => "ghz_like_na_z0",
            PrintedFormula::GhzLikeNonAcceleratedZ1 => "ghz_like_na_z1",
            PrintedFormula::GhzLikeAcceleratedZ0 => "ghz_like_ac_z0",
            PrintedFormula::GhzLikeAcceleratedZ1 => "ghz_like_ac_z1",
        }
    }

    pub fn channel(self) -> ChannelKind {
        match self {
            PrintedFormula::WNonAccelerated | PrintedFormula::WAccelerated => ChannelKind::W,
            PrintedFormula::GhzNonAccelerated | PrintedFormula::GhzAccelerated => ChannelKind::Ghz,
            _ => ChannelKind::GhzLike,
        }
    }

    pub fn info_kind(self) -> InfoKind {
        match self {
            PrintedFormula::WNonAccelerated
            | PrintedFormula::GhzNonAccelerated
            | PrintedFormula::GhzLikeNonAcceleratedZ0
            | PrintedFormula::GhzLikeNonAcceleratedZ1 => InfoKind::NonAccelerated,
            _ => InfoKind::Accelerated,
        }
    }

    /// The measurement branch the formula was printed for.
    pub fn branch(self) -> (BellOutcome, CharlieOutcome) {
        use BellOutcome::*;
        use CharlieOutcome::*;
        match self {
            PrintedFormula::WNonAccelerated => (PsiPlus, Z0),
            PrintedFormula::WAccelerated => (PhiPlus, Z0),
            PrintedFormula::GhzNonAccelerated | PrintedFormula::GhzAccelerated => (PsiPlus, XPlus),
            PrintedFormula::GhzLikeNonAcceleratedZ0 | PrintedFormula::GhzLikeAcceleratedZ0 => {
                (PhiPlus, Z0)
            }
            PrintedFormula::GhzLikeNonAcceleratedZ1 | PrintedFormula::GhzLikeAcceleratedZ1 => {
                (PhiPlus, Z1)
            }
        }
    }

    /// Evaluates the polynomial verbatim. `r = [r0, r1, r2, r3]`.
    pub fn evaluate(self, r: [f64; 4], alpha: f64, beta: f64) -> f64 {
        let mut c = r.map(f64::cos);
        let mut s = r.map(f64::sin);
        if self.info_kind() == InfoKind::NonAccelerated {
            c[0] = 1.0;
            s[0] = 0.0;
        }
        let [c0, c1, c2, c3] = c;
        let [s0, s1, s2, s3] = s;
        let sq = |x: f64| x * x;
        let (a2, b2) = (sq(alpha), sq(beta));
        let (a4, b4) = (sq(a2), sq(b2));
        let ab = a2 * b2;
        match self {
            PrintedFormula::WNonAccelerated => {
                a4 * sq(c1) * sq(c3)
                    + ab * sq(c3) * (sq(s2) + sq(s1))
                    + 2.0 * ab * c1 * c2 * sq(c3)
                    + b4 * sq(c2) * sq(c3)
            }
            PrintedFormula::WAccelerated => {
                a4 * sq(c3) * (sq(sq(c0)) * sq(c2) + sq(sq(s0)) * sq(c1))
                    + b4 * sq(c1) * sq(c3)
                    + ab * sq(c0) * sq(c3) * (sq(s1) + sq(s2))
                    + a4 * sq(s0) * sq(c0) * sq(c3) * (sq(s1) + sq(s2))
                    + 2.0 * ab * sq(c0) * c1 * c2 * sq(c3)
                    + 2.0 * ab * sq(s0) * sq(c1) * sq(c3)
            }
            PrintedFormula::GhzNonAccelerated => {
                let t = sq(c3) + sq(s3);
                a4 * sq(sq(c0)) * sq(c1) * sq(c2) * t
                    + ab * sq(s1) * t
                    + ab * sq(c1) * sq(s2) * t
                    + 2.0 * ab * c1 * c2 * c3
                    // printed without an operator before this term
                    + b4 * sq(s1) * sq(s2) * t
                    + b4
            }
            PrintedFormula::GhzAccelerated => {
                let t = sq(c3) + sq(s3);
                let k = a2 * sq(s0) + b2;
                a4 * sq(sq(c0)) * sq(c1) * sq(c2) * t
                    + a4 * sq(c0) * sq(s0) * sq(s1) * sq(c2) * t
                    + ab * sq(c0) * sq(s1) * sq(c2) * t
                    + 2.0 * ab * sq(c0) * c1 * c2 * c3
                    + a4 * sq(s0) * sq(c0) * sq(c1) * sq(s2) * t
                    + a4 * sq(sq(s0)) * sq(s1) * sq(s2) * t
                    + ab * sq(s0) * sq(s1) * sq(s2) * t
                    + a2 * sq(s0) * k
                    + ab * sq(c0) * sq(c1) * sq(s2) * t
                    + ab * sq(s0) * sq(s1) * sq(s2) * t
                    + a2 * b4 * sq(s1) * sq(s2) * t
                    + b2 * k
            }
            PrintedFormula::GhzLikeNonAcceleratedZ0 => {
                a4 * sq(c2) * sq(c3)
                    + ab * sq(c3) * (sq(s1) + sq(s2))
                    + b4 * sq(c1) * sq(c3)
                    + 2.0 * ab * c1 * c2 * sq(c3)
            }
            PrintedFormula::GhzLikeNonAcceleratedZ1 => {
                a4 * sq(s1) * (sq(s2) + sq(s3))
                    + ab * sq(c1) * (sq(s2) + sq(s3))
                    + ab * sq(c2) * (sq(s1) + sq(s3))
                    + a4 * (sq(s2) * sq(s3) + 1.0)
                    + b4 * sq(c1) * sq(c2)
                    + 2.0 * ab * c1 * c2 * (1.0 + sq(s3))
            }
            PrintedFormula::GhzLikeAcceleratedZ0 => {
                let k = a2 * sq(s0) + b2;
                b2 * sq(c1) * sq(c3) * k
                    + a2 * sq(s0) * sq(c1) * sq(c3) * k
                    + a4 * sq(c0) * sq(s0) * sq(c3) * (sq(s1) + sq(s2))
                    + ab * sq(c3) * (sq(c0) * sq(s1) + sq(s2))
                    + a4 * sq(sq(c0)) * sq(c2) * sq(c3)
                    + 2.0 * ab * sq(c0) * c1 * c2 * sq(c3)
            }
            PrintedFormula::GhzLikeAcceleratedZ1 => {
                let k = a2 * sq(s0) + b2;
                a2 * sq(c0) * sq(c1) * sq(s3) * k
                    + a2 * sq(c0) * sq(c1) * sq(s2) * k
                    + a2 * sq(s0) * sq(c1) * sq(c2) * k
                    + b2 * sq(c1) * sq(c2) * k
                    + a4 * sq(s0) * sq(c0) * sq(c2) * (sq(s1) + sq(s3))
                    + ab * sq(c0) * sq(c2) * (sq(s1) + sq(s3))
                    + 2.0 * ab * sq(c0) * c1 * c2
                    + 2.0 * ab * sq(c0) * c1 * c2 * sq(s3)
                    + a4 * sq(sq(c0)) * (sq(s1) * sq(s2) + sq(s1) * sq(s3) + sq(s2) * sq(s3) + 1.0)
            }
        }
    }
}

impl fmt::Display for PrintedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PrintedFormula {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        PrintedFormula::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| format!("unknown formula {s:?}"))
    }
}

/// The printed formula for a branch, if there is one.
pub fn formula_for(
    channel: ChannelKind,
    info_kind: InfoKind,
    bell: BellOutcome,
    charlie: CharlieOutcome,
) -> Option<PrintedFormula> {
    PrintedFormula::ALL.into_iter().find(|f| {
        f.channel() == channel && f.info_kind() == info_kind && f.branch() == (bell, charlie)
    })
}

/// Evaluates the printed polynomial for the branch, or `None` when no
/// formula was given for it.
pub fn closed_form_fidelity(
    channel: ChannelKind,
    info_kind: InfoKind,
    bell: BellOutcome,
    charlie: CharlieOutcome,
    r: [f64; 4],
    alpha: f64,
    beta: f64,
) -> Option<f64> {
    formula_for(channel, info_kind, bell, charlie).map(|f| f.evaluate(r, alpha, beta))
}
