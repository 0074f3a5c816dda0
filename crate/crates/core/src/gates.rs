//! The gate set of the cloning network.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::qlin::{embed, Complex, SquareOperator};
use crate::{Error, Result};

/// Field phase ω for which [`classical_field_unitary`] reproduces [`rotation`].
pub const ROTATION_PHASE: f64 = FRAC_PI_2;

/// The phase 3π/2, the other natural candidate for realizing the rotation.
/// Substituting it gives the transpose of [`rotation`], i.e. a rotation by −θ.
pub const QUOTED_ROTATION_PHASE: f64 = 3.0 * PI / 2.0;

/// Rotation angle in radians. Any finite value is accepted.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct RotationAngle(pub f64);

/// Phase ω of the driving classical field, radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct FieldPhase(pub f64);

impl From<f64> for RotationAngle {
    fn from(theta: f64) -> Self {
        RotationAngle(theta)
    }
}

impl From<f64> for FieldPhase {
    fn from(omega: f64) -> Self {
        FieldPhase(omega)
    }
}

/// Single-qubit rotation: `R|0⟩ = cos θ|0⟩ + sin θ|1⟩`,
/// `R|1⟩ = −sin θ|0⟩ + cos θ|1⟩`.
pub fn rotation(theta: impl Into<RotationAngle>) -> SquareOperator {
    let (s, c) = theta.into().0.sin_cos();
    SquareOperator::from_real(2, &[c, -s, s, c]).expect("finite 2x2 rotation")
}

/// Two-level evolution under a resonant classical field:
/// `[[cos θ, −i e^{−iω} sin θ], [−i e^{iω} sin θ, cos θ]]`.
pub fn classical_field_unitary(theta: impl Into<RotationAngle>, omega: impl Into<FieldPhase>) -> SquareOperator {
    let (s, c) = theta.into().0.sin_cos();
    let omega = omega.into().0;
    let minus_i = Complex::new(0.0, -1.0);
    SquareOperator::new(
        2,
        vec![
            Complex::new(c, 0.0),
            minus_i * Complex::from_polar(1.0, -omega) * s,
            minus_i * Complex::from_polar(1.0, omega) * s,
            Complex::new(c, 0.0),
        ],
    )
    .expect("finite 2x2 field unitary")
}

/// CNOT on an `n`-qubit register: flips `target` when `control` is 1.
pub fn cnot(control: usize, target: usize, n: usize) -> Result<SquareOperator> {
    if n == 0 || n > 3 {
        return Err(Error::RegisterTooLarge(1 << n.min(8)));
    }
    for q in [control, target] {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
    }
    if control == target {
        return Err(Error::DuplicateQubit(control));
    }
    let dim = 1 << n;
    let control_mask = 1 << (n - 1 - control);
    let target_mask = 1 << (n - 1 - target);
    let mut entries = vec![0.0; dim * dim];
    for col in 0..dim {
        let row = if col & control_mask != 0 {
            col ^ target_mask
        } else {
            col
        };
        entries[row * dim + col] = 1.0;
    }
    SquareOperator::from_real(dim, &entries)
}

/// [`rotation`] placed on qubit `target` of an `n`-qubit register.
pub fn rotation_on(theta: impl Into<RotationAngle>, target: usize, n: usize) -> Result<SquareOperator> {
    embed(&rotation(theta), target, n)
}
