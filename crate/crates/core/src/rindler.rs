//! Uniform acceleration and the single-mode Minkowski to Rindler map.
//!
//! Each Minkowski qubit becomes a (region I, region II) pair:
//!
//! ```text
//! |0>  ->  cos r |0>_I |0>_II + sin r |1>_I |1>_II
//! |1>  ->  |1>_I |0>_II
//! ```
//!
//! For an n-qubit register, region-I qubit k keeps index k and its region-II
//! partner is placed at index n + k. Tracing out qubits n..2n leaves the state
//! seen by the accelerated observers.

use std::f64::consts::{FRAC_PI_4, PI};

use thiserror::Error;

use crate::qmath::{
    partial_trace, Complex64, DensityOperator, Matrix, QMathError, StateVector, EXACT_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RindlerError {
    #[error("acceleration parameter r = {0} outside [0, pi/4]")]
    OutOfRange(f64),
    #[error("invalid physical acceleration: {0}")]
    InvalidPhysical(&'static str),
    #[error("expected a single-qubit input, got {0} qubits")]
    NotSingleQubit(usize),
    #[error("register has {qubits} qubits but {params} acceleration parameters")]
    LengthMismatch { qubits: usize, params: usize },
    #[error(transparent)]
    QMath(#[from] QMathError),
}

pub type Result<T> = std::result::Result<T, RindlerError>;

/// Acceleration parameter r in [0, pi/4]; 0 is at rest, pi/4 is infinite
/// acceleration.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct AccelerationParam(f64);

impl AccelerationParam {
    pub const MAX: f64 = FRAC_PI_4;
    pub const ZERO: AccelerationParam = AccelerationParam(0.0);

    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=Self::MAX).contains(&r) {
            return Err(RindlerError::OutOfRange(r));
        }
        Ok(Self(r))
    }

    pub fn maximal() -> Self {
        Self(Self::MAX)
    }

    pub fn r(self) -> f64 {
        self.0
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Acceleration {
    Finite(f64),
    /// The a -> infinity limit.
    Maximal,
}

/// Proper acceleration `a`, mode frequency `omega` and speed of light `c`,
/// in one consistent unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalAcceleration {
    acceleration: Acceleration,
    omega: f64,
    c: f64,
}

impl PhysicalAcceleration {
    /// Finite `a >= 0`. Use [`PhysicalAcceleration::maximal`] for a = infinity.
    pub fn new(a: f64, omega: f64, c: f64) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(RindlerError::InvalidPhysical(
                "acceleration must be finite and >= 0",
            ));
        }
        Self::with(Acceleration::Finite(a), omega, c)
    }

    pub fn maximal(omega: f64, c: f64) -> Result<Self> {
        Self::with(Acceleration::Maximal, omega, c)
    }

    fn with(acceleration: Acceleration, omega: f64, c: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(RindlerError::InvalidPhysical(
                "omega must be finite and > 0",
            ));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(RindlerError::InvalidPhysical("c must be finite and > 0"));
        }
        Ok(Self {
            acceleration,
            omega,
            c,
        })
    }

    pub fn acceleration(&self) -> Acceleration {
        self.acceleration
    }
}

/// `r = arctan(exp(-pi * omega * c / a))`, with the a = 0 and a = infinity
/// limits taken exactly.
pub fn r_from_physical(p: &PhysicalAcceleration) -> AccelerationParam {
    let r = match p.acceleration {
        Acceleration::Maximal => FRAC_PI_4,
        Acceleration::Finite(0.0) => 0.0,
        Acceleration::Finite(a) => (-PI * p.omega * p.c / a).exp().atan(),
    };
    AccelerationParam(r.clamp(0.0, FRAC_PI_4))
}

impl From<PhysicalAcceleration> for AccelerationParam {
    fn from(p: PhysicalAcceleration) -> Self {
        r_from_physical(&p)
    }
}

/// One acceleration parameter per register qubit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegisterAcceleration {
    per_qubit: Vec<AccelerationParam>,
}

impl RegisterAcceleration {
    pub fn new(per_qubit: Vec<AccelerationParam>) -> Self {
        Self { per_qubit }
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        values
            .iter()
            .map(|&r| AccelerationParam::new(r))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    /// The same r on every qubit.
    pub fn uniform(num_qubits: usize, r: AccelerationParam) -> Self {
        Self::new(vec![r; num_qubits])
    }

    pub fn at_rest(num_qubits: usize) -> Self {
        Self::uniform(num_qubits, AccelerationParam::ZERO)
    }

    pub fn len(&self) -> usize {
        self.per_qubit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_qubit.is_empty()
    }

    pub fn get(&self, qubit: usize) -> AccelerationParam {
        self.per_qubit[qubit]
    }

    pub fn values(&self) -> Vec<f64> {
        self.per_qubit.iter().map(|p| p.r()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = AccelerationParam> + '_ {
        self.per_qubit.iter().copied()
    }
}

/// The 4x2 isometry of the map, columns indexed by the Minkowski basis and
/// rows by `|I II>` labels (region I on the low bit).
pub fn unruh_isometry(r: AccelerationParam) -> Matrix {
    let mut v = Matrix::zeros(4, 2);
    v[(0b00, 0)] = Complex64::new(r.cos(), 0.0);
    v[(0b11, 0)] = Complex64::new(r.sin(), 0.0);
    v[(0b01, 1)] = Complex64::new(1.0, 0.0);
    v
}

/// Maps a single-qubit object to the two-qubit (region I, region II) object.
pub trait UnruhEmbed: Sized {
    fn unruh_embed(&self, r: AccelerationParam) -> Result<Self>;
}

impl UnruhEmbed for StateVector {
    fn unruh_embed(&self, r: AccelerationParam) -> Result<Self> {
        if self.num_qubits() != 1 {
            return Err(RindlerError::NotSingleQubit(self.num_qubits()));
        }
        let acc = RegisterAcceleration::uniform(1, r);
        embed_register(self, &acc)
    }
}

impl UnruhEmbed for DensityOperator {
    fn unruh_embed(&self, r: AccelerationParam) -> Result<Self> {
        if self.num_qubits() != 1 {
            return Err(RindlerError::NotSingleQubit(self.num_qubits()));
        }
        let v = unruh_isometry(r);
        let out = &v * self.matrix() * v.adjoint();
        let embedded = if self.is_normalized() {
            DensityOperator::new(out)?
        } else {
            DensityOperator::new_branch(out)?
        };
        Ok(embedded)
    }
}

pub fn unruh_embed<T: UnruhEmbed>(qubit_state: &T, r: AccelerationParam) -> Result<T> {
    qubit_state.unruh_embed(r)
}

/// Pure 2n-qubit state obtained by embedding every register qubit.
pub fn embed_register(state: &StateVector, acc: &RegisterAcceleration) -> Result<StateVector> {
    let n = state.num_qubits();
    if acc.len() != n {
        return Err(RindlerError::LengthMismatch {
            qubits: n,
            params: acc.len(),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << (2 * n)];
    for (label, &amp) in state.amplitudes().iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        // expand the product of per-qubit maps term by term
        let mut terms: Vec<(usize, f64)> = vec![(0, 1.0)];
        for (k, r) in acc.iter().enumerate() {
            let region_i = 1 << k;
            let region_ii = 1 << (n + k);
            if (label >> k) & 1 == 0 {
                let (c, s) = (r.cos(), r.sin());
                terms = terms
                    .into_iter()
                    .flat_map(|(l, w)| [(l, w * c), (l | region_i | region_ii, w * s)])
                    .collect();
            } else {
                for term in &mut terms {
                    term.0 |= region_i;
                }
            }
        }
        for (l, w) in terms {
            out[l] += amp * w;
        }
    }
    Ok(StateVector::new(out)?)
}

/// Region-I density operator of an accelerated register: embed every qubit,
/// then trace out all region-II partners.
pub fn accelerate_register(
    state: &StateVector,
    acc: &RegisterAcceleration,
) -> Result<DensityOperator> {
    if !state.is_normalized() {
        return Err(QMathError::NotNormalized(state.norm_sqr()).into());
    }
    let n = state.num_qubits();
    let embedded = embed_register(state, acc)?;
    debug_assert!((embedded.norm_sqr() - 1.0).abs() <= 10.0 * EXACT_TOL);
    let keep: Vec<usize> = (0..n).collect();
    let reduced = partial_trace(&embedded.projector(), &keep)?;
    Ok(DensityOperator::new(reduced.matrix().clone())?)
}
