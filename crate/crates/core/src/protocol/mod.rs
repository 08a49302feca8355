//! The teleportation procedure over a three-qubit channel.
//!
//! Register layout: qubit 0 carries the information, qubits 1, 2, 3 are the
//! channel qubits held by Alice, Bob and Charlie. Alice projects (0, 1) onto a
//! Bell state, Charlie measures qubit 3, Bob applies a Pauli to qubit 2.

mod formulas;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use formulas::{closed_form_fidelity, formula_for, PrintedFormula};

use crate::channels::{ChannelError, ChannelKind, ChannelRealization, DensityForm};
use crate::qmath::{
    fidelity_pure, partial_trace, project, Apply, Complex64, DensityOperator, Operator, Pauli,
    QMathError, StateVector, Tensor, EXACT_TOL,
};
use crate::rindler::{accelerate_register, AccelerationParam, RegisterAcceleration, RindlerError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("information qubit not normalized: |alpha|^2 + |beta|^2 = {0}")]
    NotNormalized(f64),
    #[error("alpha^2 = {0} outside [0, 1]")]
    AlphaSqOutOfRange(f64),
    #[error("charlie outcome {charlie} is not measured on the {channel} channel")]
    BasisMismatch {
        channel: ChannelKind,
        charlie: CharlieOutcome,
    },
    #[error("closed-form fidelity undefined for complex amplitudes")]
    ClosedFormUndefined,
    #[error("impossible branch {bell}/{charlie} (probability {probability:e})")]
    ImpossibleBranch {
        bell: BellOutcome,
        charlie: CharlieOutcome,
        probability: f64,
    },
    #[error("unknown outcome {0:?}")]
    UnknownOutcome(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Rindler(#[from] RindlerError),
    #[error(transparent)]
    QMath(#[from] QMathError),
}

pub type Result<T> = std::result::Result<T, ProtocolError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InfoKind {
    NonAccelerated,
    Accelerated,
}

impl InfoKind {
    pub fn tag(self) -> &'static str {
        match self {
            InfoKind::NonAccelerated => "non_accelerated",
            InfoKind::Accelerated => "accelerated",
        }
    }
}

impl fmt::Display for InfoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for InfoKind {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "non_accelerated" | "na" => Ok(InfoKind::NonAccelerated),
            "accelerated" | "ac" => Ok(InfoKind::Accelerated),
            _ => Err(ProtocolError::UnknownOutcome(s.to_string())),
        }
    }
}

/// The qubit to teleport, `alpha|0> + beta|1>`, optionally accelerated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoQubit {
    alpha: Complex64,
    beta: Complex64,
    r0: Option<AccelerationParam>,
}

impl InfoQubit {
    pub fn new(alpha: Complex64, beta: Complex64, r0: Option<AccelerationParam>) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > EXACT_TOL {
            return Err(ProtocolError::NotNormalized(n));
        }
        Ok(Self { alpha, beta, r0 })
    }

    pub fn real(alpha: f64, beta: f64, r0: Option<AccelerationParam>) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0), r0)
    }

    /// `alpha = sqrt(alpha_sq)`, `beta = sqrt(1 - alpha_sq)`.
    pub fn from_alpha_sq(alpha_sq: f64, r0: Option<AccelerationParam>) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_sq) {
            return Err(ProtocolError::AlphaSqOutOfRange(alpha_sq));
        }
        Self::real(alpha_sq.sqrt(), (1.0 - alpha_sq).sqrt(), r0)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn r0(&self) -> Option<AccelerationParam> {
        self.r0
    }

    pub fn kind(&self) -> InfoKind {
        match self.r0 {
            Some(_) => InfoKind::Accelerated,
            None => InfoKind::NonAccelerated,
        }
    }

    pub fn with_r0(self, r0: Option<AccelerationParam>) -> Self {
        Self { r0, ..self }
    }

    /// The Minkowski state; this is also the fidelity target.
    pub fn state(&self) -> StateVector {
        StateVector::normalized(vec![self.alpha, self.beta]).expect("checked at construction")
    }

    /// Real amplitudes, if both imaginary parts vanish.
    pub fn real_amplitudes(&self) -> Result<(f64, f64)> {
        if self.alpha.im.abs() > EXACT_TOL || self.beta.im.abs() > EXACT_TOL {
            return Err(ProtocolError::ClosedFormUndefined);
        }
        Ok((self.alpha.re, self.beta.re))
    }
}

/// The information qubit as seen by Alice: pure when at rest, the region-I
/// reduction of its Unruh embedding when accelerated.
pub fn info_density(info: &InfoQubit) -> Result<DensityOperator> {
    let psi = info.state();
    match info.r0 {
        None => Ok(psi.projector()),
        Some(r0) => Ok(accelerate_register(
            &psi,
            &RegisterAcceleration::uniform(1, r0),
        )?),
    }
}

/// Alice's Bell outcomes. `Psi*` live on span{|00>, |11>} and `Phi*` on
/// span{|01>, |10>} (this naming follows the correction tables, not the usual
/// textbook one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellOutcome {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            BellOutcome::PsiPlus => "psi_plus",
            BellOutcome::PsiMinus => "psi_minus",
            BellOutcome::PhiPlus => "phi_plus",
            BellOutcome::PhiMinus => "phi_minus",
        }
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BellOutcome {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_").to_ascii_lowercase();
        let found = match norm.as_str() {
            "psi_plus" | "psi+" => Some(BellOutcome::PsiPlus),
            "psi_minus" | "psi_" => Some(BellOutcome::PsiMinus),
            "phi_plus" | "phi+" => Some(BellOutcome::PhiPlus),
            "phi_minus" | "phi_" => Some(BellOutcome::PhiMinus),
            _ => None,
        };
        found.ok_or_else(|| ProtocolError::UnknownOutcome(s.to_string()))
    }
}

/// Rank-one Bell projector on two qubits.
pub fn bell_projector(outcome: BellOutcome) -> Operator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // amplitudes over labels 0b00, 0b01, 0b10, 0b11
    let amps = match outcome {
        BellOutcome::PsiPlus => [h, 0.0, 0.0, h],
        BellOutcome::PsiMinus => [h, 0.0, 0.0, -h],
        BellOutcome::PhiPlus => [0.0, h, h, 0.0],
        BellOutcome::PhiMinus => [0.0, h, -h, 0.0],
    };
    let v = StateVector::from_real(&amps).expect("length 4");
    Operator::projector_onto(&v).expect("normalized")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CharlieOutcome {
    Z0,
    Z1,
    XPlus,
    XMinus,
}

impl CharlieOutcome {
    pub fn tag(self) -> &'static str {
        match self {
            CharlieOutcome::Z0 => "z0",
            CharlieOutcome::Z1 => "z1",
            CharlieOutcome::XPlus => "x_plus",
            CharlieOutcome::XMinus => "x_minus",
        }
    }

    pub fn basis(self) -> CharlieBasis {
        match self {
            CharlieOutcome::Z0 | CharlieOutcome::Z1 => CharlieBasis::Z,
            CharlieOutcome::XPlus | CharlieOutcome::XMinus => CharlieBasis::X,
        }
    }
}

impl fmt::Display for CharlieOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CharlieOutcome {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_").to_ascii_lowercase();
        let found = match norm.as_str() {
            "z0" | "0" => Some(CharlieOutcome::Z0),
            "z1" | "1" => Some(CharlieOutcome::Z1),
            "x_plus" | "x+" => Some(CharlieOutcome::XPlus),
            "x_minus" | "x_" => Some(CharlieOutcome::XMinus),
            _ => None,
        };
        found.ok_or_else(|| ProtocolError::UnknownOutcome(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharlieBasis {
    Z,
    X,
}

impl CharlieBasis {
    pub fn outcomes(self) -> [CharlieOutcome; 2] {
        match self {
            CharlieBasis::Z => [CharlieOutcome::Z0, CharlieOutcome::Z1],
            CharlieBasis::X => [CharlieOutcome::XPlus, CharlieOutcome::XMinus],
        }
    }

    /// Charlie measures W and GHZ-like channels in z, GHZ in x.
    pub fn for_channel(channel: ChannelKind) -> Self {
        match channel {
            ChannelKind::Ghz => CharlieBasis::X,
            ChannelKind::W | ChannelKind::GhzLike => CharlieBasis::Z,
        }
    }
}

pub fn charlie_projector(outcome: CharlieOutcome) -> Operator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match outcome {
        CharlieOutcome::Z0 => [1.0, 0.0],
        CharlieOutcome::Z1 => [0.0, 1.0],
        CharlieOutcome::XPlus => [h, h],
        CharlieOutcome::XMinus => [h, -h],
    };
    let v = StateVector::from_real(&amps).expect("length 2");
    Operator::projector_onto(&v).expect("normalized")
}

/// Bob's correction for one measurement record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrectionRule {
    pub channel: ChannelKind,
    pub bell: BellOutcome,
    pub charlie: CharlieOutcome,
    pub pauli: Pauli,
    /// False on branches where no Pauli recovers the state.
    pub valid: bool,
    /// True where the printed table had to be completed (duplicated rows).
    pub reconstructed: bool,
}

/// Looks up Bob's Pauli correction.
pub fn correction_for(
    channel: ChannelKind,
    bell: BellOutcome,
    charlie: CharlieOutcome,
) -> Result<CorrectionRule> {
    use BellOutcome::*;
    use CharlieOutcome::*;
    if charlie.basis() != CharlieBasis::for_channel(channel) {
        return Err(ProtocolError::BasisMismatch { channel, charlie });
    }
    let mut reconstructed = false;
    let (pauli, valid) = match (channel, charlie) {
        (ChannelKind::W, Z1) => (Pauli::I, false),
        (ChannelKind::W | ChannelKind::GhzLike, Z0) => match bell {
            PsiPlus => (Pauli::X, true),
            PsiMinus => (Pauli::Y, true),
            PhiPlus => (Pauli::I, true),
            PhiMinus => (Pauli::Z, true),
        },
        (ChannelKind::GhzLike, Z1) => {
            reconstructed = matches!(bell, PsiMinus | PhiMinus);
            match bell {
                PsiPlus => (Pauli::I, true),
                PsiMinus => (Pauli::Z, true),
                PhiPlus => (Pauli::X, true),
                PhiMinus => (Pauli::Y, true),
            }
        }
        (ChannelKind::Ghz, XPlus) => match bell {
            PsiPlus => (Pauli::I, true),
            PsiMinus => (Pauli::Z, true),
            PhiPlus => (Pauli::X, true),
            PhiMinus => (Pauli::Y, true),
        },
        (ChannelKind::Ghz, XMinus) => match bell {
            PsiPlus => (Pauli::Z, true),
            PsiMinus => (Pauli::I, true),
            PhiPlus => (Pauli::Y, true),
            PhiMinus => (Pauli::X, true),
        },
        _ => unreachable!("basis checked above"),
    };
    Ok(CorrectionRule {
        channel,
        bell,
        charlie,
        pauli,
        valid,
        reconstructed,
    })
}

/// Every (bell, charlie) pair measured on the channel, in output order.
pub fn branches(channel: ChannelKind) -> Vec<(BellOutcome, CharlieOutcome)> {
    let charlie = CharlieBasis::for_channel(channel).outcomes();
    BellOutcome::ALL
        .into_iter()
        .flat_map(|b| charlie.into_iter().map(move |c| (b, c)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchResult {
    pub bell: BellOutcome,
    pub charlie: CharlieOutcome,
    pub probability: f64,
    /// Bob's normalized, corrected qubit.
    pub rho_bob: DensityOperator,
    /// Fidelity of `rho_bob` with the original information state.
    pub fidelity_oracle: f64,
    pub fidelity_closed: Option<f64>,
    pub valid: bool,
}

/// The information density combined with the channel: qubit 0 information,
/// qubits 1..=3 channel.
pub fn combined_state(
    channel: &ChannelRealization,
    info: &InfoQubit,
    form: DensityForm,
) -> Result<DensityOperator> {
    Ok(info_density(info)?.tensor(channel.density(form)))
}

/// Runs the four protocol steps for one measurement record.
pub fn run_branch(
    channel: &ChannelRealization,
    info: &InfoQubit,
    bell: BellOutcome,
    charlie: CharlieOutcome,
    form: DensityForm,
) -> Result<BranchResult> {
    let rule = correction_for(channel.kind, bell, charlie)?;
    let total = combined_state(channel, info, form)?;
    run_branch_on(&total, channel, info, rule)
}

fn run_branch_on(
    total: &DensityOperator,
    channel: &ChannelRealization,
    info: &InfoQubit,
    rule: CorrectionRule,
) -> Result<BranchResult> {
    let (bell, charlie) = (rule.bell, rule.charlie);
    let impossible = |probability: f64| ProtocolError::ImpossibleBranch {
        bell,
        charlie,
        probability,
    };
    let (p_bell, after_bell) = match project(total, &bell_projector(bell), &[0, 1]) {
        Err(QMathError::ImpossibleBranch(p)) => return Err(impossible(p)),
        other => other?,
    };
    let (p_charlie, after_charlie) = match project(&after_bell, &charlie_projector(charlie), &[3]) {
        Err(QMathError::ImpossibleBranch(p)) => return Err(impossible(p_bell * p)),
        other => other?,
    };
    let corrected = after_charlie.apply(&rule.pauli.operator(), &[2])?;
    let rho_bob = partial_trace(&corrected, &[2])?;
    let fidelity_oracle = fidelity_pure(&info.state(), &rho_bob)?;
    let fidelity_closed = info.real_amplitudes().ok().and_then(|(a, b)| {
        let mut r = [0.0; 4];
        r[0] = info.r0.map_or(0.0, |p| p.r());
        for (k, p) in channel.acc.iter().enumerate() {
            r[k + 1] = p.r();
        }
        closed_form_fidelity(channel.kind, info.kind(), bell, charlie, r, a, b)
    });
    Ok(BranchResult {
        bell,
        charlie,
        probability: p_bell * p_charlie,
        rho_bob,
        fidelity_oracle,
        fidelity_closed,
        valid: rule.valid,
    })
}

/// Result of one branch in a full enumeration.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchEvaluation {
    Done(BranchResult),
    Impossible {
        bell: BellOutcome,
        charlie: CharlieOutcome,
        probability: f64,
        valid: bool,
    },
}

impl BranchEvaluation {
    pub fn bell(&self) -> BellOutcome {
        match self {
            BranchEvaluation::Done(b) => b.bell,
            BranchEvaluation::Impossible { bell, .. } => *bell,
        }
    }

    pub fn charlie(&self) -> CharlieOutcome {
        match self {
            BranchEvaluation::Done(b) => b.charlie,
            BranchEvaluation::Impossible { charlie, .. } => *charlie,
        }
    }

    pub fn probability(&self) -> f64 {
        match self {
            BranchEvaluation::Done(b) => b.probability,
            BranchEvaluation::Impossible { probability, .. } => *probability,
        }
    }

    pub fn valid(&self) -> bool {
        match self {
            BranchEvaluation::Done(b) => b.valid,
            BranchEvaluation::Impossible { valid, .. } => *valid,
        }
    }

    pub fn result(&self) -> Option<&BranchResult> {
        match self {
            BranchEvaluation::Done(b) => Some(b),
            BranchEvaluation::Impossible { .. } => None,
        }
    }
}

/// Runs every (bell, charlie) branch of the channel. Impossible branches are
/// kept as such so that probabilities still add up.
pub fn enumerate_branches(
    channel: &ChannelRealization,
    info: &InfoQubit,
    form: DensityForm,
) -> Result<Vec<BranchEvaluation>> {
    let total = combined_state(channel, info, form)?;
    branches(channel.kind)
        .into_iter()
        .map(|(bell, charlie)| {
            let rule = correction_for(channel.kind, bell, charlie)?;
            match run_branch_on(&total, channel, info, rule) {
                Ok(b) => Ok(BranchEvaluation::Done(b)),
                Err(ProtocolError::ImpossibleBranch { probability, .. }) => {
                    Ok(BranchEvaluation::Impossible {
                        bell,
                        charlie,
                        probability,
                        valid: rule.valid,
                    })
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageFidelity {
    /// Sum of probability x fidelity over valid branches.
    pub weighted_sum: f64,
    /// Total probability of the valid branches.
    pub valid_probability: f64,
}

impl AverageFidelity {
    /// Average fidelity conditioned on landing in a valid branch.
    pub fn mean(&self) -> f64 {
        self.weighted_sum / self.valid_probability
    }
}

pub fn average_fidelity(
    channel: &ChannelRealization,
    info: &InfoQubit,
    form: DensityForm,
) -> Result<AverageFidelity> {
    let mut weighted_sum = 0.0;
    let mut valid_probability = 0.0;
    for b in enumerate_branches(channel, info, form)? {
        if let BranchEvaluation::Done(r) = &b {
            if r.valid {
                weighted_sum += r.probability * r.fidelity_oracle;
                valid_probability += r.probability;
            }
        }
    }
    Ok(AverageFidelity {
        weighted_sum,
        valid_probability,
    })
}
