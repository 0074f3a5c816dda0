//! Dense complex linear algebra for registers of one to three qubits.
//!
//! Everything here is a plain value type: operators and states are stored as
//! interleaved row-major `Complex64` buffers and never mutated after
//! construction. Dimensions are capped at 8 (three qubits).

use crate::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Largest supported operator dimension (three qubits).
pub const MAX_DIM: usize = 8;

/// Tolerance on `Σ|amp|² = 1` for a state accepted by [`StateVector::new`].
pub const NORM_TOL: f64 = 1e-12;

/// Norm drift after [`apply`] beyond which the operator is treated as defective.
pub const DRIFT_TOL: f64 = 1e-10;

/// Asymmetry accepted (and symmetrized away) by [`hermitian_eigenvalues`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

fn checked_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    if dim > MAX_DIM {
        return Err(Error::RegisterTooLarge(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn all_finite(values: &[Complex]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Pure state of an `n`-qubit register, `n ∈ {1, 2, 3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex>,
}

impl StateVector {
    /// Builds a state from its amplitudes; the length must be 2, 4 or 8 and the
    /// squared norm must be 1 within [`NORM_TOL`].
    pub fn new(amps: Vec<Complex>) -> Result<Self> {
        let state = Self::from_amps(amps)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩` of an `n`-qubit register.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 3 {
            return Err(Error::RegisterTooLarge(1 << n_qubits.min(8)));
        }
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(Error::QubitOutOfRange { index, n: n_qubits });
        }
        let mut amps = vec![Complex::new(0.0, 0.0); dim];
        amps[index] = Complex::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    // Length and finiteness only; callers decide how strict to be on the norm.
    fn from_amps(amps: Vec<Complex>) -> Result<Self> {
        let n_qubits = checked_dim(amps.len())?;
        if n_qubits == 0 {
            return Err(Error::NotPowerOfTwo(1));
        }
        if !all_finite(&amps) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(x, y)| x.conj() * y).sum())
    }

    /// Tensor product `self ⊗ other`; `self` supplies the high-order qubits.
    pub fn kron(&self, other: &StateVector) -> Result<StateVector> {
        let dim = self.dim() * other.dim();
        checked_dim(dim)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|x| other.amps.iter().map(move |y| x * y))
            .collect();
        StateVector::from_amps(amps)
    }

    /// Largest amplitude-wise distance to another state of the same size.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// Linear combination `x·self + y·other`, renormalization not applied.
    /// Used to expand a cloning map by linearity; the result must still be a
    /// unit vector within [`NORM_TOL`].
    pub fn superpose(&self, x: Complex, other: &StateVector, y: Complex) -> Result<StateVector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let amps = self.amps.iter().zip(&other.amps).map(|(p, q)| x * p + y * q).collect();
        StateVector::new(amps)
    }

    /// Amplitudes after exchanging two qubits.
    pub fn swap_qubits(&self, q1: usize, q2: usize) -> Result<StateVector> {
        let n = self.n_qubits;
        for q in [q1, q2] {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        let (s1, s2) = (n - 1 - q1, n - 1 - q2);
        let mut amps = vec![Complex::new(0.0, 0.0); self.dim()];
        for (idx, amp) in self.amps.iter().enumerate() {
            let b1 = (idx >> s1) & 1;
            let b2 = (idx >> s2) & 1;
            let mut swapped = idx & !(1 << s1) & !(1 << s2);
            swapped |= (b1 << s2) | (b2 << s1);
            amps[swapped] = *amp;
        }
        Ok(StateVector { n_qubits: n, amps })
    }
}

/// Square complex matrix of dimension 2, 4 or 8.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareOperator {
    dim: usize,
    entries: Vec<Complex>,
}

impl SquareOperator {
    pub fn new(dim: usize, entries: Vec<Complex>) -> Result<Self> {
        checked_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if !all_finite(&entries) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        checked_dim(dim)?;
        let mut entries = vec![Complex::new(0.0, 0.0); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * dim + i] = Complex::new(d, 0.0);
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &SquareOperator) -> Result<SquareOperator> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let n = self.dim;
        let mut out = vec![Complex::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let lhs = self.entries[i * n + k];
                if lhs == Complex::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += lhs * rhs.entries[k * n + j];
                }
            }
        }
        Ok(SquareOperator { dim: n, entries: out })
    }

    pub fn dagger(&self) -> SquareOperator {
        let n = self.dim;
        let entries = (0..n * n)
            .map(|idx| self.entries[(idx % n) * n + idx / n].conj())
            .collect();
        SquareOperator { dim: n, entries }
    }

    pub fn transpose(&self) -> SquareOperator {
        let n = self.dim;
        let entries = (0..n * n).map(|idx| self.entries[(idx % n) * n + idx / n]).collect();
        SquareOperator { dim: n, entries }
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &SquareOperator) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// `max |(U·U† − I)[i][j]|`.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self
            .compose(&self.dagger())
            .expect("an operator composes with its own adjoint");
        let identity = SquareOperator::identity(self.dim).expect("dim already validated");
        product.max_abs_diff(&identity).expect("same dim")
    }

    /// `max |H[i][j] − conj(H[j][i])|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.dagger()).expect("same dim")
    }

    /// True when every entry is exactly 0 or 1 and each row and column holds a single 1.
    pub fn is_permutation(&self) -> bool {
        let n = self.dim;
        let exact = self
            .entries
            .iter()
            .all(|z| *z == Complex::new(0.0, 0.0) || *z == Complex::new(1.0, 0.0));
        let rows = (0..n).all(|i| (0..n).filter(|&j| self.get(i, j).re == 1.0).count() == 1);
        let cols = (0..n).all(|j| (0..n).filter(|&i| self.get(i, j).re == 1.0).count() == 1);
        exact && rows && cols
    }

    fn scale_add(&self, x: f64, other: &SquareOperator, y: f64) -> SquareOperator {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(p, q)| p * x + q * y)
            .collect();
        SquareOperator { dim: self.dim, entries }
    }
}

/// Hermitian, unit-trace, positive-semidefinite matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: SquareOperator,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace within 1e-12. Positivity is not
    /// checked here; see [`DensityMatrix::min_eigenvalue`].
    pub fn new(op: SquareOperator) -> Result<Self> {
        if op.dim() > 4 {
            return Err(Error::RegisterTooLarge(op.dim()));
        }
        let defect = op.hermitian_defect();
        if defect > NORM_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let trace = op.trace();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::BadTrace(trace.re));
        }
        Ok(Self { op })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(state: &StateVector) -> Result<Self> {
        let n = state.dim();
        let amps = state.amps();
        let entries = (0..n * n).map(|idx| amps[idx / n] * amps[idx % n].conj()).collect();
        Self::new(SquareOperator::new(n, entries)?)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.op.get(row, col)
    }

    pub fn as_operator(&self) -> &SquareOperator {
        &self.op
    }

    pub fn trace(&self) -> f64 {
        self.op.trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.op)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        let image = apply_unchecked(&self.op, state)?;
        Ok(state
            .inner(&StateVector {
                n_qubits: state.n_qubits(),
                amps: image,
            })?
            .re)
    }
}

/// Kronecker product; `a` acts on the high-order qubits.
pub fn kron(a: &SquareOperator, b: &SquareOperator) -> Result<SquareOperator> {
    let bd = b.dim();
    let dim = a.dim() * bd;
    checked_dim(dim)?;
    let mut entries = vec![Complex::new(0.0, 0.0); dim * dim];
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let aij = a.get(i, j);
            for k in 0..bd {
                for l in 0..bd {
                    entries[(i * bd + k) * dim + j * bd + l] = aij * b.get(k, l);
                }
            }
        }
    }
    SquareOperator::new(dim, entries)
}

/// `I ⊗ … ⊗ gate ⊗ … ⊗ I` with the single-qubit `gate` on qubit `target` of an
/// `n`-qubit register (qubit 0 is the most significant bit).
pub fn embed(gate: &SquareOperator, target: usize, n: usize) -> Result<SquareOperator> {
    if gate.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: gate.dim(),
        });
    }
    if n == 0 || n > 3 {
        return Err(Error::RegisterTooLarge(1 << n.min(8)));
    }
    if target >= n {
        return Err(Error::QubitOutOfRange { index: target, n });
    }
    let id = SquareOperator::identity(2)?;
    let mut out = if target == 0 { gate.clone() } else { id.clone() };
    for q in 1..n {
        out = kron(&out, if q == target { gate } else { &id })?;
    }
    Ok(out)
}

fn apply_unchecked(op: &SquareOperator, s: &StateVector) -> Result<Vec<Complex>> {
    let n = op.dim();
    if n != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.dim(),
        });
    }
    Ok((0..n)
        .map(|i| (0..n).map(|j| op.get(i, j) * s.amps()[j]).sum())
        .collect())
}

/// Matrix-vector product. The result is not renormalized; a norm change
/// beyond [`DRIFT_TOL`] is reported as [`Error::NormDrift`].
pub fn apply(op: &SquareOperator, s: &StateVector) -> Result<StateVector> {
    let out = StateVector::from_amps(apply_unchecked(op, s)?)?;
    let drift = (out.norm_sqr() - s.norm_sqr()).abs();
    if drift > DRIFT_TOL {
        return Err(Error::NormDrift(drift));
    }
    Ok(out)
}

/// Reduced density matrix of a pure state on the qubits in `keep`, in the
/// given order (`keep[0]` becomes the most significant qubit).
pub fn reduced_density(psi: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = psi.n_qubits();
    for (pos, &q) in keep.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
        if keep[..pos].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let bit = |idx: usize, q: usize| (idx >> (n - 1 - q)) & 1;
    let gather = |idx: usize, qubits: &[usize]| qubits.iter().fold(0, |acc, &q| (acc << 1) | bit(idx, q));

    // Rows indexed by the kept bits, columns by the traced bits; ρ = M·M†.
    let kd = 1 << keep.len();
    let td = 1 << traced.len();
    let mut m = vec![Complex::new(0.0, 0.0); kd * td];
    for (idx, amp) in psi.amps().iter().enumerate() {
        m[gather(idx, keep) * td + gather(idx, &traced)] = *amp;
    }
    let mut entries = vec![Complex::new(0.0, 0.0); kd * kd];
    for i in 0..kd {
        for j in 0..kd {
            entries[i * kd + j] = (0..td).map(|t| m[i * td + t] * m[j * td + t].conj()).sum();
        }
    }
    DensityMatrix::new(SquareOperator::new(kd, entries)?)
}

/// Two-qubit marginal `Tr_rest |ψ⟩⟨ψ|` keeping qubits `keep = (first, second)`.
pub fn partial_trace(psi: &StateVector, keep: (usize, usize)) -> Result<DensityMatrix> {
    if keep.0 == keep.1 {
        return Err(Error::DuplicateQubit(keep.0));
    }
    reduced_density(psi, &[keep.0, keep.1])
}

/// Transpose on the second subsystem of a two-qubit matrix:
/// `out[2i+l][2j+k] = ρ[2i+k][2j+l]`.
pub fn partial_transpose(rho: &DensityMatrix) -> Result<SquareOperator> {
    partial_transpose_op(rho.as_operator())
}

pub fn partial_transpose_op(op: &SquareOperator) -> Result<SquareOperator> {
    if op.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: op.dim(),
        });
    }
    let mut entries = vec![Complex::new(0.0, 0.0); 16];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    entries[(2 * i + l) * 4 + 2 * j + k] = op.get(2 * i + k, 2 * j + l);
                }
            }
        }
    }
    SquareOperator::new(4, entries)
}

/// Eigenvalues of a Hermitian matrix in ascending order, by cyclic complex
/// Jacobi rotations.
///
/// The input is symmetrized as `(H + H†)/2` first; an asymmetry larger than
/// [`HERMITIAN_TOL`] is rejected. Sweeps stop once the off-diagonal Frobenius
/// norm drops below `1e-13` (scaled by the matrix norm when that exceeds 1) or
/// after 100 sweeps.
pub fn hermitian_eigenvalues(h: &SquareOperator) -> Result<Vec<f64>> {
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.dim();
    let sym = h.scale_add(0.5, &h.dagger(), 0.5);
    let mut a: Vec<Complex> = sym.entries;

    let frobenius = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tol = JACOBI_OFF_TOL * frobenius.max(1.0);
    let off_norm = |a: &[Complex]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) < tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, n, p, q);
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

// Zeroes a[p][q] (and a[q][p]) with the unitary J = diag(1, e^{-iφ}) · G(θ)
// acting on the (p, q) plane, A ← J† A J.
fn jacobi_rotate(a: &mut [Complex], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    // Phase that makes the (p, q) entry real and positive.
    let phase = apq / mag;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Columns of J restricted to the (p, q) plane.
    let jpp = Complex::new(c, 0.0);
    let jpq = Complex::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    // A ← A J (columns p, q).
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * jpp + akq * jqp;
        a[k * n + q] = akp * jpq + akq * jqq;
    }
    // A ← J† A (rows p, q).
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
        a[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[p * n + q] = Complex::new(0.0, 0.0);
    a[q * n + p] = Complex::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}

/// `|⟨x|y⟩|²`.
pub fn overlap_sq(x: &StateVector, y: &StateVector) -> Result<f64> {
    Ok(x.inner(y)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn pauli_x() -> SquareOperator {
        SquareOperator::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn rot(theta: f64) -> SquareOperator {
        let (s, co) = theta.sin_cos();
        SquareOperator::from_real(2, &[co, -s, s, co]).unwrap()
    }

    #[test]
    fn kron_examples() {
        let i2 = SquareOperator::identity(2).unwrap();
        assert_eq!(kron(&i2, &i2).unwrap(), SquareOperator::identity(4).unwrap());

        let x_high = kron(&pauli_x(), &i2).unwrap();
        let out = apply(&x_high, &StateVector::basis(2, 0b00).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(2, 0b10).unwrap());

        let d = kron(
            &SquareOperator::diagonal(&[1.0, 2.0]).unwrap(),
            &SquareOperator::diagonal(&[3.0, 4.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(d, SquareOperator::diagonal(&[3.0, 4.0, 6.0, 8.0]).unwrap());
    }

    #[test]
    fn kron_rejects_oversized_register() {
        let i4 = SquareOperator::identity(4).unwrap();
        assert_eq!(kron(&i4, &i4), Err(Error::RegisterTooLarge(16)));
    }

    #[test]
    fn embed_examples() {
        let s00 = StateVector::basis(2, 0).unwrap();
        let out = apply(&embed(&pauli_x(), 0, 2).unwrap(), &s00).unwrap();
        assert_eq!(out, StateVector::basis(2, 0b10).unwrap());
        let out = apply(&embed(&pauli_x(), 1, 2).unwrap(), &s00).unwrap();
        assert_eq!(out, StateVector::basis(2, 0b01).unwrap());

        let out = apply(
            &embed(&rot(FRAC_PI_4), 0, 1).unwrap(),
            &StateVector::basis(1, 0).unwrap(),
        )
        .unwrap();
        assert!((out.amps()[0].re - FRAC_PI_4.cos()).abs() < 1e-15);
        assert!((out.amps()[1].re - FRAC_PI_4.sin()).abs() < 1e-15);
    }

    #[test]
    fn embed_target_out_of_range() {
        assert_eq!(embed(&pauli_x(), 3, 3), Err(Error::QubitOutOfRange { index: 3, n: 3 }));
    }

    #[test]
    fn apply_examples() {
        let psi = StateVector::from_real(&[0.5, 0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(apply(&SquareOperator::identity(8).unwrap(), &psi).unwrap(), psi);

        let cnot =
            SquareOperator::from_real(4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.]).unwrap();
        let out = apply(&cnot, &StateVector::basis(2, 0b10).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(2, 0b11).unwrap());

        let out = apply(&rot(FRAC_PI_8), &StateVector::basis(1, 1).unwrap()).unwrap();
        assert!((out.amps()[0].re + FRAC_PI_8.sin()).abs() < 1e-15);
        assert!((out.amps()[1].re - FRAC_PI_8.cos()).abs() < 1e-15);
    }

    #[test]
    fn apply_errors() {
        let s = StateVector::basis(1, 0).unwrap();
        assert!(matches!(
            apply(&SquareOperator::identity(4).unwrap(), &s),
            Err(Error::DimensionMismatch { .. })
        ));
        let not_unitary = SquareOperator::diagonal(&[2.0, 1.0]).unwrap();
        assert!(matches!(apply(&not_unitary, &s), Err(Error::NormDrift(_))));
    }

    #[test]
    fn state_constructor_checks_norm() {
        assert!(matches!(
            StateVector::from_real(&[1.0, 1.0]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            StateVector::from_real(&[1.0, 0.0, 0.0]),
            Err(Error::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = partial_trace(&StateVector::basis(3, 0).unwrap(), (1, 2)).unwrap();
        let expected = DensityMatrix::pure(&StateVector::basis(2, 0).unwrap()).unwrap();
        assert_eq!(rho, expected);
    }

    #[test]
    fn partial_trace_ghz_marginal() {
        let ghz = StateVector::from_real(&[FRAC_1_SQRT_2, 0., 0., 0., 0., 0., 0., FRAC_1_SQRT_2]).unwrap();
        let rho = partial_trace(&ghz, (1, 2)).unwrap();
        let expected = SquareOperator::diagonal(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(rho.as_operator().max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        let psi = StateVector::basis(3, 0).unwrap();
        assert_eq!(partial_trace(&psi, (1, 1)), Err(Error::DuplicateQubit(1)));
        assert_eq!(
            partial_trace(&psi, (0, 3)),
            Err(Error::QubitOutOfRange { index: 3, n: 3 })
        );
    }

    #[test]
    fn partial_trace_keep_order_matters() {
        // |0⟩_{a1}|0⟩_{a2}|1⟩_{a3}; keeping (2, 1) puts a3 on the high bit.
        let psi = StateVector::basis(3, 0b001).unwrap();
        let rho = partial_trace(&psi, (2, 1)).unwrap();
        assert_eq!(rho.get(0b10, 0b10), c(1.0));
    }

    #[test]
    fn partial_transpose_examples() {
        let diag = DensityMatrix::new(SquareOperator::diagonal(&[0.1, 0.2, 0.3, 0.4]).unwrap()).unwrap();
        assert_eq!(&partial_transpose(&diag).unwrap(), diag.as_operator());

        let bell = StateVector::from_real(&[FRAC_1_SQRT_2, 0., 0., FRAC_1_SQRT_2]).unwrap();
        let pt = partial_transpose(&DensityMatrix::pure(&bell).unwrap()).unwrap();
        let eigs = hermitian_eigenvalues(&pt).unwrap();
        assert!((eigs[0] + 0.5).abs() < 1e-14, "{eigs:?}");
        for e in &eigs[1..] {
            assert!((e - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenvalues_examples() {
        let eigs = hermitian_eigenvalues(&SquareOperator::diagonal(&[4.0, 3.0, 2.0, 1.0]).unwrap()).unwrap();
        assert_eq!(eigs, vec![1.0, 2.0, 3.0, 4.0]);

        // PT of a product of two mixed single-qubit states.
        let r1 = SquareOperator::new(2, vec![c(0.7), Complex::new(0.2, 0.1), Complex::new(0.2, -0.1), c(0.3)]).unwrap();
        let r2 = SquareOperator::new(
            2,
            vec![c(0.4), Complex::new(-0.1, 0.3), Complex::new(-0.1, -0.3), c(0.6)],
        )
        .unwrap();
        let rho = DensityMatrix::new(kron(&r1, &r2).unwrap()).unwrap();
        let eigs = hermitian_eigenvalues(&partial_transpose(&rho).unwrap()).unwrap();
        assert!(eigs.iter().all(|&e| e >= -1e-14), "{eigs:?}");
        assert!((eigs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_complex_two_by_two() {
        // [[1, i], [-i, 1]] has spectrum {0, 2}.
        let h = SquareOperator::new(2, vec![c(1.0), Complex::new(0.0, 1.0), Complex::new(0.0, -1.0), c(1.0)]).unwrap();
        let eigs = hermitian_eigenvalues(&h).unwrap();
        assert!(eigs[0].abs() < 1e-15 && (eigs[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let h = SquareOperator::from_real(2, &[1.0, 1e-6, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&h), Err(Error::NotHermitian(_))));
        // Asymmetry below the tolerance is symmetrized away.
        let h = SquareOperator::from_real(2, &[1.0, 1e-12, 0.0, 1.0]).unwrap();
        assert!(hermitian_eigenvalues(&h).is_ok());
        assert!(Error::NotHermitian(1.0).to_string().contains("matrix not Hermitian"));
    }

    #[test]
    fn overlap_examples() {
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        assert!((overlap_sq(&psi, &psi).unwrap() - 1.0).abs() < 1e-15);
        let zero = StateVector::basis(1, 0).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert_eq!(overlap_sq(&zero, &one).unwrap(), 0.0);
        let theta: f64 = 0.3;
        let rotated = StateVector::from_real(&[theta.cos(), theta.sin()]).unwrap();
        assert!((overlap_sq(&zero, &rotated).unwrap() - theta.cos().powi(2)).abs() < 1e-15);
        assert!(overlap_sq(&zero, &StateVector::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn overlap_ignores_global_phase() {
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        let phased =
            StateVector::new(psi.amps().iter().map(|z| z * Complex::from_polar(1.0, 1.234)).collect()).unwrap();
        let zero = StateVector::basis(1, 0).unwrap();
        assert!((overlap_sq(&zero, &psi).unwrap() - overlap_sq(&zero, &phased).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn swap_qubits_permutes_amplitudes() {
        let psi = StateVector::basis(3, 0b011).unwrap();
        assert_eq!(psi.swap_qubits(0, 2).unwrap(), StateVector::basis(3, 0b110).unwrap());
        assert_eq!(psi.swap_qubits(1, 2).unwrap(), psi);
    }
}
