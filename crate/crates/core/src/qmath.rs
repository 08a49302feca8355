//! Dense complex linear algebra for registers of one to a handful of qubits.
//!
//! Bit convention, fixed for the whole crate: qubit 0 is the least-significant
//! bit of a basis label. The basis state `|q0 q1 ... q(n-1)>` has label
//! `q0 + 2*q1 + 4*q2 + ...` and that label is its (0-based) vector/matrix index.
//! Tensor products place the LEFT operand on the lower-indexed qubits.

use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64;
use thiserror::Error;

pub type ComplexScalar = Complex64;
pub type Matrix = DMatrix<Complex64>;

/// Tolerance for exact algebraic identities.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for chained numerical pipelines (projector chains, eigenvalues).
pub const PIPELINE_TOL: f64 = 1e-10;
/// Branches with probability at or below this are treated as impossible.
pub const IMPOSSIBLE_BRANCH_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QMathError {
    #[error("dimension {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry")]
    NonFinite,
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("trace {0} outside the admissible range")]
    BadTrace(f64),
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("operator is not a projector (deviation {0:e})")]
    NotProjector(f64),
    #[error("expected a projector, got a {0:?} operator")]
    ExpectedProjector(OperatorKind),
    #[error("keep set is empty")]
    EmptyKeep,
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("operator acts on {operator} qubits but {targets} targets were given")]
    ArityMismatch { operator: usize, targets: usize },
    #[error("impossible branch (probability {0:e})")]
    ImpossibleBranch(f64),
}

pub type Result<T> = std::result::Result<T, QMathError>;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(QMathError::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn square_qubits(m: &Matrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(QMathError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QMathError::NonFinite);
    }
    qubits_for_dim(m.nrows())
}

/// Kronecker product with `lower` on the low-order qubits.
fn kron(lower: &Matrix, upper: &Matrix) -> Matrix {
    upper.kronecker(lower)
}

fn max_abs_entry(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Places the low bits of `value` at the given register positions.
fn scatter(value: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (bit, &pos)| acc | (((value >> bit) & 1) << pos))
}

/// Reads the bits at `positions` out of `label`, packed low-first.
#[cfg(test)]
fn gather(label: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (bit, &pos)| acc | (((label >> pos) & 1) << bit))
}

fn check_targets(num_qubits: usize, on_qubits: &[usize]) -> Result<()> {
    for (i, &q) in on_qubits.iter().enumerate() {
        if q >= num_qubits {
            return Err(QMathError::QubitOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if on_qubits[..i].contains(&q) {
            return Err(QMathError::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// A pure state on `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Any finite vector of length 2^n, n >= 1. Normalization is not required.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_dim(amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(QMathError::NonFinite);
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Like [`StateVector::new`] but rejects vectors whose squared norm is not 1.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::new(amplitudes)?;
        let n = state.norm_sqr();
        if (n - 1.0).abs() > EXACT_TOL {
            return Err(QMathError::NotNormalized(n));
        }
        Ok(state)
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state with the given label.
    pub fn basis(num_qubits: usize, label: usize) -> Self {
        assert!(num_qubits >= 1 && label < (1 << num_qubits));
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[label] = Complex64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    /// Basis state from per-qubit bits, `bits[k]` being qubit k.
    pub fn from_bits(bits: &[u8]) -> Self {
        let label = bits
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &b)| acc | ((b as usize & 1) << k));
        Self::basis(bits.len(), label)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, label: usize) -> Complex64 {
        self.amplitudes[label]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= EXACT_TOL
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(QMathError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
        }
    }

    fn column(&self) -> Matrix {
        Matrix::from_column_slice(self.dim(), 1, &self.amplitudes)
    }

    /// `|psi><psi|`, flagged normalized when the vector is.
    pub fn projector(&self) -> DensityOperator {
        let col = self.column();
        DensityOperator {
            num_qubits: self.num_qubits,
            entries: &col * col.adjoint(),
            normalized: self.is_normalized(),
        }
    }
}

/// Numerical health of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub hermitian_deviation: f64,
    pub trace: Complex64,
    pub min_eigenvalue: f64,
}

impl Validity {
    /// Hermitian, PSD and unit trace within `tol`.
    pub fn is_state(&self, tol: f64) -> bool {
        self.hermitian_deviation <= tol
            && self.min_eigenvalue >= -tol
            && (self.trace - Complex64::new(1.0, 0.0)).norm() <= tol
    }
}

/// A (possibly unnormalized) mixed state.
///
/// `normalized = true` means trace one; `false` marks a post-measurement
/// branch or an operator whose invariants have not been asserted.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    num_qubits: usize,
    entries: Matrix,
    normalized: bool,
}

impl DensityOperator {
    /// Validated, trace-one density operator.
    pub fn new(entries: Matrix) -> Result<Self> {
        let num_qubits = square_qubits(&entries)?;
        let rho = Self {
            num_qubits,
            entries,
            normalized: true,
        };
        rho.validate()?;
        Ok(rho)
    }

    /// Validated operator with trace in (0, 1], as left by a measurement.
    pub fn new_branch(entries: Matrix) -> Result<Self> {
        let num_qubits = square_qubits(&entries)?;
        let rho = Self {
            num_qubits,
            entries,
            normalized: false,
        };
        rho.validate()?;
        Ok(rho)
    }

    /// Shape and finiteness checks only. Used for transcribed tables that may
    /// violate the density-operator invariants.
    pub fn from_matrix_unchecked(entries: Matrix) -> Result<Self> {
        let num_qubits = square_qubits(&entries)?;
        Ok(Self {
            num_qubits,
            entries,
            normalized: false,
        })
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self {
            num_qubits,
            entries: Matrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
            normalized: true,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    /// 0-based entry.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs_entry(&(&self.entries - self.entries.adjoint()))
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validity(&self) -> Validity {
        Validity {
            hermitian_deviation: self.hermiticity_deviation(),
            trace: self.trace(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }

    /// Checks Hermiticity, positivity and the trace condition of the flag.
    pub fn validate(&self) -> Result<()> {
        let v = self.validity();
        if v.hermitian_deviation > PIPELINE_TOL {
            return Err(QMathError::NotHermitian(v.hermitian_deviation));
        }
        if v.min_eigenvalue < -PIPELINE_TOL {
            return Err(QMathError::NotPositive(v.min_eigenvalue));
        }
        let tr = v.trace.re;
        let ok = if self.normalized {
            (v.trace - Complex64::new(1.0, 0.0)).norm() <= PIPELINE_TOL
        } else {
            v.trace.im.abs() <= PIPELINE_TOL && tr > 0.0 && tr <= 1.0 + PIPELINE_TOL
        };
        if !ok {
            return Err(QMathError::BadTrace(tr));
        }
        Ok(())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(QMathError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(max_abs_entry(&(&self.entries - &other.entries)))
    }

    /// Divides by the trace and sets the normalized flag.
    pub fn renormalized(&self) -> Result<Self> {
        let tr = self.trace().re;
        if tr <= IMPOSSIBLE_BRANCH_PROBABILITY {
            return Err(QMathError::ImpossibleBranch(tr));
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            entries: &self.entries / Complex64::new(tr, 0.0),
            normalized: true,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Unitary,
    Projector,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn symbol(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }

    pub fn operator(self) -> Operator {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let m = match self {
            Pauli::I => [c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)],
            Pauli::X => [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
            Pauli::Y => [c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
            Pauli::Z => [c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
        };
        Operator {
            num_qubits: 1,
            entries: Matrix::from_row_slice(2, 2, &m),
            kind: OperatorKind::Unitary,
        }
    }
}

/// A linear operator on a register, tagged with what it is known to be.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    num_qubits: usize,
    entries: Matrix,
    kind: OperatorKind,
}

impl Operator {
    pub fn unitary(entries: Matrix) -> Result<Self> {
        let num_qubits = square_qubits(&entries)?;
        let dim = entries.nrows();
        let dev = max_abs_entry(&(&entries * entries.adjoint() - Matrix::identity(dim, dim)));
        if dev > PIPELINE_TOL {
            return Err(QMathError::NotUnitary(dev));
        }
        Ok(Self {
            num_qubits,
            entries,
            kind: OperatorKind::Unitary,
        })
    }

    pub fn projector(entries: Matrix) -> Result<Self> {
        let num_qubits = square_qubits(&entries)?;
        let idem = max_abs_entry(&(&entries * &entries - &entries));
        let herm = max_abs_entry(&(&entries - entries.adjoint()));
        let dev = idem.max(herm);
        if dev > PIPELINE_TOL {
            return Err(QMathError::NotProjector(dev));
        }
        Ok(Self {
            num_qubits,
            entries,
            kind: OperatorKind::Projector,
        })
    }

    pub fn general(entries: Matrix) -> Result<Self> {
        let num_qubits = square_qubits(&entries)?;
        Ok(Self {
            num_qubits,
            entries,
            kind: OperatorKind::General,
        })
    }

    pub fn identity(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self {
            num_qubits,
            entries: Matrix::identity(dim, dim),
            kind: OperatorKind::Unitary,
        }
    }

    /// Rank-one projector `|v><v|` onto a normalized state.
    pub fn projector_onto(state: &StateVector) -> Result<Self> {
        if !state.is_normalized() {
            return Err(QMathError::NotNormalized(state.norm_sqr()));
        }
        let col = state.column();
        Ok(Self {
            num_qubits: state.num_qubits(),
            entries: &col * col.adjoint(),
            kind: OperatorKind::Projector,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    /// Full-register matrix with this operator acting on `on_qubits` (operator
    /// qubit j on register qubit `on_qubits[j]`) and identity elsewhere.
    pub fn embed(&self, num_qubits: usize, on_qubits: &[usize]) -> Result<Matrix> {
        if on_qubits.len() != self.num_qubits {
            return Err(QMathError::ArityMismatch {
                operator: self.num_qubits,
                targets: on_qubits.len(),
            });
        }
        check_targets(num_qubits, on_qubits)?;
        let rest: Vec<usize> = (0..num_qubits).filter(|q| !on_qubits.contains(q)).collect();
        let dim = 1usize << num_qubits;
        let local = 1usize << self.num_qubits;
        let mut out = Matrix::zeros(dim, dim);
        for spectator in 0..(1usize << rest.len()) {
            let base = scatter(spectator, &rest);
            for a in 0..local {
                let i = base | scatter(a, on_qubits);
                for b in 0..local {
                    let j = base | scatter(b, on_qubits);
                    out[(i, j)] = self.entries[(a, b)];
                }
            }
        }
        Ok(out)
    }
}

/// True when the family sums to the identity within `tol`.
pub fn is_complete_measurement(family: &[Operator], tol: f64) -> bool {
    let Some(first) = family.first() else {
        return false;
    };
    let dim = first.entries.nrows();
    if family.iter().any(|p| p.entries.nrows() != dim) {
        return false;
    }
    let sum = family
        .iter()
        .fold(Matrix::zeros(dim, dim), |acc, p| acc + &p.entries);
    max_abs_entry(&(sum - Matrix::identity(dim, dim))) <= tol
}

/// Kronecker product; the receiver occupies the lower-indexed qubits.
pub trait Tensor {
    fn tensor(&self, upper: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, upper: &Self) -> Self {
        let low = self.dim();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); low * upper.dim()];
        for (ib, b) in upper.amplitudes.iter().enumerate() {
            for (ia, a) in self.amplitudes.iter().enumerate() {
                amplitudes[ia + low * ib] = a * b;
            }
        }
        Self {
            num_qubits: self.num_qubits + upper.num_qubits,
            amplitudes,
        }
    }
}

impl Tensor for DensityOperator {
    fn tensor(&self, upper: &Self) -> Self {
        Self {
            num_qubits: self.num_qubits + upper.num_qubits,
            entries: kron(&self.entries, &upper.entries),
            normalized: self.normalized && upper.normalized,
        }
    }
}

impl Tensor for Operator {
    fn tensor(&self, upper: &Self) -> Self {
        let kind = if self.kind == upper.kind {
            self.kind
        } else {
            OperatorKind::General
        };
        Self {
            num_qubits: self.num_qubits + upper.num_qubits,
            entries: kron(&self.entries, &upper.entries),
            kind,
        }
    }
}

pub fn tensor<T: Tensor>(lower: &T, upper: &T) -> T {
    lower.tensor(upper)
}

/// Reduced operator on `keep` (sorted ascending; kept qubit `keep[j]` becomes
/// qubit j of the result).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    if keep.is_empty() {
        return Err(QMathError::EmptyKeep);
    }
    let n = rho.num_qubits;
    check_targets(n, keep)?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let kdim = 1usize << keep.len();
    let mut out = Matrix::zeros(kdim, kdim);
    for t in 0..(1usize << traced.len()) {
        let env = scatter(t, &traced);
        for a in 0..kdim {
            let i = env | scatter(a, &keep);
            for b in 0..kdim {
                let j = env | scatter(b, &keep);
                out[(a, b)] += rho.entries[(i, j)];
            }
        }
    }
    Ok(DensityOperator {
        num_qubits: keep.len(),
        entries: out,
        normalized: rho.normalized,
    })
}

/// `U|psi>` or `U rho U^dagger` with the operator placed on `on_qubits`.
pub trait Apply: Sized {
    fn apply(&self, op: &Operator, on_qubits: &[usize]) -> Result<Self>;
}

impl Apply for StateVector {
    fn apply(&self, op: &Operator, on_qubits: &[usize]) -> Result<Self> {
        let full = op.embed(self.num_qubits, on_qubits)?;
        let out = full * self.column();
        Ok(Self {
            num_qubits: self.num_qubits,
            amplitudes: out.iter().copied().collect(),
        })
    }
}

impl Apply for DensityOperator {
    fn apply(&self, op: &Operator, on_qubits: &[usize]) -> Result<Self> {
        let full = op.embed(self.num_qubits, on_qubits)?;
        let entries = &full * &self.entries * full.adjoint();
        Ok(Self {
            num_qubits: self.num_qubits,
            entries,
            normalized: self.normalized && op.kind == OperatorKind::Unitary,
        })
    }
}

pub fn apply<T: Apply>(op: &Operator, target: &T, on_qubits: &[usize]) -> Result<T> {
    target.apply(op, on_qubits)
}

/// Projective measurement outcome: probability `tr(P rho P)` and the
/// normalized post-measurement state.
pub fn project(
    rho: &DensityOperator,
    proj: &Operator,
    on_qubits: &[usize],
) -> Result<(f64, DensityOperator)> {
    if proj.kind != OperatorKind::Projector {
        return Err(QMathError::ExpectedProjector(proj.kind));
    }
    let branch = rho.apply(proj, on_qubits)?;
    let probability = branch.trace().re;
    if probability <= IMPOSSIBLE_BRANCH_PROBABILITY {
        return Err(QMathError::ImpossibleBranch(probability));
    }
    Ok((probability, branch.renormalized()?))
}

/// `<psi|rho|psi>`.
pub fn fidelity_pure(psi: &StateVector, rho: &DensityOperator) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(QMathError::DimensionMismatch {
            expected: rho.dim(),
            found: psi.dim(),
        });
    }
    let col = psi.column();
    Ok((col.adjoint() * &rho.entries * col)[(0, 0)].re)
}
