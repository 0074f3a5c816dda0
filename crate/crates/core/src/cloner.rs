//! The cloning machine: coefficients, preparation angles, the two circuit
//! stages and the ideal cloning map used as an oracle.
//!
//! Register layout is `a1 a2 a3` with `a1` (the original) as the most
//! significant qubit. The blank copy is `a2`; the ancilla of the ideal map is
//! realized by `a3`, and both start in `|0⟩`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::gates::{classical_field_unitary, cnot, rotation};
use crate::qlin::{apply, embed, Complex, SquareOperator, StateVector};
use crate::{Error, Result};

/// Accepted deviation of `α² + β²` from 1 for custom inputs before renormalization.
pub const CUSTOM_NORM_TOL: f64 = 1e-6;

const TRIPLE_NORM_TOL: f64 = 1e-10;
const ARCSIN_SLACK: f64 = 1e-12;

/// Qubit positions in the three-qubit register.
pub const A1: usize = 0;
pub const A2: usize = 1;
pub const A3: usize = 2;

/// Amplitudes `(a, b, c)` of the cloning map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Coefficients {
    /// `a² + 2b² + c²`.
    pub fn norm_sqr(&self) -> f64 {
        self.a * self.a + 2.0 * self.b * self.b + self.c * self.c
    }
}

/// Preparation angles `(θ1, θ2, θ3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrepAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl PrepAngles {
    /// Adds the same error to all three angles.
    pub fn shifted(&self, delta: f64) -> Self {
        self.shifted_each([delta; 3])
    }

    pub fn shifted_each(&self, delta: [f64; 3]) -> Self {
        PrepAngles {
            theta1: self.theta1 + delta[0],
            theta2: self.theta2 + delta[1],
            theta3: self.theta3 + delta[2],
        }
    }
}

/// Full parameterization of the machine for one value of φ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MachineParams {
    pub phi: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl MachineParams {
    pub fn from_phi(phi: f64) -> Result<Self> {
        let co = coefficients(phi)?;
        let angles = prep_angles(&co)?;
        Ok(MachineParams {
            phi,
            a: co.a,
            b: co.b,
            c: co.c,
            theta1: angles.theta1,
            theta2: angles.theta2,
            theta3: angles.theta3,
        })
    }

    pub fn coefficients(&self) -> Coefficients {
        Coefficients {
            a: self.a,
            b: self.b,
            c: self.c,
        }
    }

    pub fn angles(&self) -> PrepAngles {
        PrepAngles {
            theta1: self.theta1,
            theta2: self.theta2,
            theta3: self.theta3,
        }
    }
}

/// One of the four family states, or an arbitrary real qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSpec {
    Psi1,
    Psi2,
    Psi3,
    Psi4,
    Custom { alpha: f64, beta: f64 },
}

impl InputSpec {
    pub const FAMILY: [InputSpec; 4] = [InputSpec::Psi1, InputSpec::Psi2, InputSpec::Psi3, InputSpec::Psi4];

    /// Real custom input `α|0⟩ + β|1⟩`, renormalized. `α² + β²` must already be
    /// within [`CUSTOM_NORM_TOL`] of 1.
    pub fn custom(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm_sqr = alpha * alpha + beta * beta;
        if norm_sqr == 0.0 {
            return Err(Error::InvalidInput(
                "(alpha, beta) = (0, 0) cannot be normalized".into(),
            ));
        }
        if (norm_sqr - 1.0).abs() > CUSTOM_NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "alpha^2 + beta^2 = {norm_sqr}, expected 1 within {CUSTOM_NORM_TOL:e}"
            )));
        }
        let norm = norm_sqr.sqrt();
        Ok(InputSpec::Custom {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    pub fn is_family(&self) -> bool {
        !matches!(self, InputSpec::Custom { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            InputSpec::Psi1 => "psi1",
            InputSpec::Psi2 => "psi2",
            InputSpec::Psi3 => "psi3",
            InputSpec::Psi4 => "psi4",
            InputSpec::Custom { .. } => "custom",
        }
    }

    /// Real amplitudes `(⟨0|ψ⟩, ⟨1|ψ⟩)` for this input at angle φ.
    pub fn amplitudes(&self, phi: f64) -> (f64, f64) {
        let (beta, alpha) = (phi / 2.0).sin_cos();
        match *self {
            InputSpec::Psi1 => (alpha, beta),
            InputSpec::Psi2 => (alpha, -beta),
            InputSpec::Psi3 => (beta, -alpha),
            InputSpec::Psi4 => (beta, alpha),
            InputSpec::Custom { alpha, beta } => (alpha, beta),
        }
    }
}

impl fmt::Display for InputSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InputSpec {
    type Err = Error;

    /// Parses the family names; custom inputs go through [`InputSpec::custom`].
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psi1" => Ok(InputSpec::Psi1),
            "psi2" => Ok(InputSpec::Psi2),
            "psi3" => Ok(InputSpec::Psi3),
            "psi4" => Ok(InputSpec::Psi4),
            other => Err(Error::InvalidInput(format!("unknown input '{other}'"))),
        }
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(Error::PhiOutOfRange(phi));
    }
    Ok(())
}

/// Cloning amplitudes for angle φ ∈ [0, π/2]:
/// `a = ½(1 + k cos²φ)`, `b = ½ k sin²φ`, `c = ½(1 − k cos²φ)` with
/// `k = (sin⁴φ + cos⁴φ)^{-1/2}`.
pub fn coefficients(phi: f64) -> Result<Coefficients> {
    check_phi(phi)?;
    let (s, c) = phi.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let k = 1.0 / (s2 * s2 + c2 * c2).sqrt();
    Ok(Coefficients {
        a: 0.5 * (1.0 + c2 * k),
        b: 0.5 * s2 * k,
        c: 0.5 * (1.0 - c2 * k),
    })
}

fn arcsin_checked(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + ARCSIN_SLACK {
        return Err(Error::ArcsinDomain(x));
    }
    Ok(x.clamp(-1.0, 1.0).asin())
}

/// Rotation angles that load `a|00⟩ + b(|01⟩+|10⟩) + c|11⟩` onto `a2 a3`:
/// `θ2 = arcsin(√2/2·(a+c)) − π/4`, `θ1 = θ3 = ½ arcsin(2b)` (principal branch).
pub fn prep_angles(co: &Coefficients) -> Result<PrepAngles> {
    let theta2 = arcsin_checked(FRAC_1_SQRT_2 * (co.a + co.c))? - FRAC_PI_4;
    let theta1 = 0.5 * arcsin_checked(2.0 * co.b)?;
    Ok(PrepAngles {
        theta1,
        theta2,
        theta3: theta1,
    })
}

/// The input qubit for a spec at angle φ.
pub fn input_state(spec: InputSpec, phi: f64) -> Result<StateVector> {
    if let InputSpec::Custom { alpha, beta } = spec {
        // Re-validate: the variant fields are public.
        InputSpec::custom(alpha, beta)?;
    } else {
        check_phi(phi)?;
    }
    let (alpha, beta) = spec.amplitudes(phi);
    let norm = (alpha * alpha + beta * beta).sqrt();
    StateVector::from_real(&[alpha / norm, beta / norm])
}

/// Bloch vector `(x, y, z)` of a single-qubit pure state.
pub fn bloch_vector(s: &StateVector) -> Result<[f64; 3]> {
    if s.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: s.dim(),
        });
    }
    let (alpha, beta) = (s.amps()[0], s.amps()[1]);
    let coherence = alpha.conj() * beta;
    Ok([
        2.0 * coherence.re,
        2.0 * coherence.im,
        alpha.norm_sqr() - beta.norm_sqr(),
    ])
}

/// `a|00⟩ + b|01⟩ + b|10⟩ + c|11⟩`, written down directly.
pub fn preparation_state_direct(co: &Coefficients) -> Result<StateVector> {
    let norm = co.norm_sqr();
    if (norm - 1.0).abs() > TRIPLE_NORM_TOL {
        return Err(Error::InvalidCoefficients(format!("a^2 + 2b^2 + c^2 = {norm}")));
    }
    let amps = [co.a, co.b, co.b, co.c].iter().map(|&x| Complex::new(x, 0.0)).collect();
    // Normalization was checked at the looser tolerance above.
    StateVector::new(amps).or_else(|_| {
        let scale = norm.sqrt();
        StateVector::from_real(&[co.a / scale, co.b / scale, co.b / scale, co.c / scale])
    })
}

/// Order in which the three copy-stage CNOTs are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CopyOrder {
    /// `a1→a2`, then `a3→a1`, then `a2→a3`.
    #[default]
    Standard,
    /// The same three gates applied last-to-first.
    Reversed,
}

/// Gate-level description of the network. The default is the correct machine;
/// the other settings exist so that verification can be exercised against
/// deliberately miswired builds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Network {
    pub copy_order: CopyOrder,
    /// `None` uses [`rotation`] directly; `Some(ω)` synthesizes every rotation
    /// as [`classical_field_unitary`] with phase ω.
    pub field_phase: Option<f64>,
}

impl Network {
    pub fn rotation_gate(&self, theta: f64) -> SquareOperator {
        match self.field_phase {
            None => rotation(theta),
            Some(omega) => classical_field_unitary(theta, omega),
        }
    }

    /// Two-qubit unitary of the preparation stage on `(a2, a3)`, gates applied
    /// as rotate a2 by θ1, CNOT a2→a3, rotate a3 by θ2, CNOT a3→a2, rotate a2 by θ3.
    pub fn preparation_operator(&self, angles: &PrepAngles) -> Result<SquareOperator> {
        let gates = [
            embed(&self.rotation_gate(angles.theta1), 0, 2)?,
            cnot(0, 1, 2)?,
            embed(&self.rotation_gate(angles.theta2), 1, 2)?,
            cnot(1, 0, 2)?,
            embed(&self.rotation_gate(angles.theta3), 0, 2)?,
        ];
        sequence(&gates)
    }

    pub fn preparation_state(&self, angles: &PrepAngles) -> Result<StateVector> {
        apply(&self.preparation_operator(angles)?, &StateVector::basis(2, 0)?)
    }

    /// Three-qubit permutation of the copy stage.
    pub fn copy_operator(&self) -> Result<SquareOperator> {
        let mut gates = vec![cnot(A1, A2, 3)?, cnot(A3, A1, 3)?, cnot(A2, A3, 3)?];
        if self.copy_order == CopyOrder::Reversed {
            gates.reverse();
        }
        sequence(&gates)
    }

    /// Runs `input ⊗ prep(angles)` through the copy stage.
    pub fn run(&self, input: &StateVector, angles: &PrepAngles) -> Result<StateVector> {
        let register = input.kron(&self.preparation_state(angles)?)?;
        apply(&self.copy_operator()?, &register)
    }

    pub fn clone_state(&self, input: InputSpec, phi: f64) -> Result<StateVector> {
        let params = MachineParams::from_phi(phi)?;
        self.run(&input_state(input, phi)?, &params.angles())
    }
}

// Product of gates applied first-to-last.
fn sequence(gates: &[SquareOperator]) -> Result<SquareOperator> {
    let mut total = SquareOperator::identity(gates[0].dim())?;
    for g in gates {
        total = g.compose(&total)?;
    }
    Ok(total)
}

/// Preparation stage of the standard network, applied to `|00⟩`.
pub fn preparation_circuit(angles: &PrepAngles) -> Result<StateVector> {
    Network::default().preparation_state(angles)
}

/// Copy stage of the standard network.
pub fn copy_circuit() -> SquareOperator {
    Network::default()
        .copy_operator()
        .expect("three CNOTs on a three-qubit register")
}

/// Right-hand side of the ideal cloning map for basis input `|bit⟩`, written
/// out amplitude by amplitude (no circuit involved).
pub fn ideal_clone_map(basis_bit: u8, co: &Coefficients) -> Result<StateVector> {
    let mut amps = [0.0; 8];
    match basis_bit {
        0 => {
            amps[0b000] = co.a;
            amps[0b011] = co.b;
            amps[0b101] = co.b;
            amps[0b110] = co.c;
        }
        1 => {
            amps[0b111] = co.a;
            amps[0b100] = co.b;
            amps[0b010] = co.b;
            amps[0b001] = co.c;
        }
        other => return Err(Error::InvalidInput(format!("basis bit must be 0 or 1, got {other}"))),
    }
    let norm = co.norm_sqr();
    if (norm - 1.0).abs() > TRIPLE_NORM_TOL {
        return Err(Error::InvalidCoefficients(format!("a^2 + 2b^2 + c^2 = {norm}")));
    }
    let scale = norm.sqrt();
    StateVector::from_real(&amps.map(|x| x / scale))
}

/// Ideal output for an arbitrary input, expanded by linearity of the map.
pub fn ideal_clone_output(input: InputSpec, phi: f64) -> Result<StateVector> {
    let co = coefficients(phi)?;
    let psi = input_state(input, phi)?;
    let (alpha, beta) = (psi.amps()[0], psi.amps()[1]);
    ideal_clone_map(0, &co)?.superpose(alpha, &ideal_clone_map(1, &co)?, beta)
}

/// Full pipeline on the standard network.
pub fn clone(input: InputSpec, phi: f64) -> Result<StateVector> {
    Network::default().clone_state(input, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_8, SQRT_2};

    // Closed forms at φ = π/4: k = √2.
    const A_PI4: f64 = (2.0 + SQRT_2) / 4.0;
    const B_PI4: f64 = SQRT_2 / 4.0;
    const C_PI4: f64 = (2.0 - SQRT_2) / 4.0;

    fn grid() -> impl Iterator<Item = f64> {
        (0..=40).map(|k| {
            if k == 40 {
                FRAC_PI_2
            } else {
                k as f64 * FRAC_PI_2 / 40.0
            }
        })
    }

    fn assert_close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y} (tol {tol:e})");
    }

    #[test]
    fn coefficients_examples() {
        let co = coefficients(0.0).unwrap();
        assert_eq!((co.a, co.b, co.c), (1.0, 0.0, 0.0));
        let co = coefficients(FRAC_PI_2).unwrap();
        assert_close(co.a, 0.5, 1e-15);
        assert_close(co.b, 0.5, 1e-15);
        assert_close(co.c, 0.5, 1e-15);
        let co = coefficients(FRAC_PI_4).unwrap();
        assert_close(co.a, A_PI4, 1e-15);
        assert_close(co.b, B_PI4, 1e-15);
        assert_close(co.c, C_PI4, 1e-15);
        assert_close(co.a, 0.853_553_4, 1e-7);
    }

    #[test]
    fn coefficients_reject_out_of_range_phi() {
        assert_eq!(coefficients(2.0), Err(Error::PhiOutOfRange(2.0)));
        assert!(coefficients(-1e-9).is_err());
        assert!(Error::PhiOutOfRange(2.0)
            .to_string()
            .contains("phi out of supported range"));
    }

    #[test]
    fn coefficient_identities_on_grid() {
        for phi in grid() {
            let co = coefficients(phi).unwrap();
            assert!(co.a >= 0.0 && co.b >= 0.0 && co.c >= 0.0);
            assert_close(co.norm_sqr(), 1.0, 1e-12);
            assert_close(co.a * co.c, co.b * co.b, 1e-12);
            assert_close(co.a + co.c, 1.0, 1e-12);
        }
    }

    #[test]
    fn prep_angles_examples() {
        let t = prep_angles(&Coefficients { a: 1.0, b: 0.0, c: 0.0 }).unwrap();
        assert_eq!((t.theta1, t.theta3), (0.0, 0.0));
        assert!(t.theta2.abs() < 1e-15);
        let t = prep_angles(&Coefficients { a: 0.5, b: 0.5, c: 0.5 }).unwrap();
        assert_close(t.theta1, FRAC_PI_4, 1e-15);
        assert_close(t.theta3, FRAC_PI_4, 1e-15);
        let t = prep_angles(&coefficients(FRAC_PI_4).unwrap()).unwrap();
        assert_close(t.theta1, FRAC_PI_8, 1e-15);
        assert!(t.theta2.abs() < 1e-14);
        assert_close(t.theta1.cos().powi(2), A_PI4, 1e-15);
    }

    #[test]
    fn prep_angles_guard_arcsin_domain() {
        let bad = Coefficients { a: 0.1, b: 0.7, c: 0.1 };
        assert!(matches!(prep_angles(&bad), Err(Error::ArcsinDomain(_))));
    }

    #[test]
    fn theta2_vanishes_and_theta1_in_range() {
        for phi in grid() {
            let p = MachineParams::from_phi(phi).unwrap();
            assert!(p.theta2.abs() < 1e-14, "phi={phi} theta2={}", p.theta2);
            assert_eq!(p.theta1, p.theta3);
            assert!((0.0..=FRAC_PI_4).contains(&p.theta1));
        }
    }

    #[test]
    fn input_state_examples() {
        assert_eq!(
            input_state(InputSpec::Psi1, 0.0).unwrap(),
            StateVector::basis(1, 0).unwrap()
        );
        let psi3 = input_state(InputSpec::Psi3, 0.0).unwrap();
        assert_eq!(psi3.amps()[0].re, 0.0);
        assert_eq!(psi3.amps()[1].re, -1.0);
        let plus = input_state(InputSpec::Psi1, FRAC_PI_2).unwrap();
        assert_close(plus.amps()[0].re, FRAC_1_SQRT_2, 1e-15);
        assert_close(plus.amps()[1].re, FRAC_1_SQRT_2, 1e-15);
    }

    #[test]
    fn custom_inputs() {
        let spec = InputSpec::custom(0.6, 0.8).unwrap();
        let s = input_state(spec, 0.3).unwrap();
        assert_close(s.amps()[1].re, 0.8, 1e-15);
        assert!(InputSpec::custom(0.0, 0.0).is_err());
        assert!(InputSpec::custom(1.0, 1.0).is_err());
        // Small deviations are absorbed by renormalization.
        let InputSpec::Custom { alpha, beta } = InputSpec::custom(0.6, 0.8000001).unwrap() else {
            unreachable!()
        };
        assert_close(alpha * alpha + beta * beta, 1.0, 1e-15);
        assert!(InputSpec::custom(f64::NAN, 0.0).is_err());
        assert!(input_state(InputSpec::Custom { alpha: 3.0, beta: 0.0 }, 0.0).is_err());
    }

    #[test]
    fn input_names_round_trip() {
        for spec in InputSpec::FAMILY {
            assert_eq!(spec.name().parse::<InputSpec>().unwrap(), spec);
        }
        assert!("psi5".parse::<InputSpec>().is_err());
    }

    #[test]
    fn bloch_vector_examples() {
        assert_eq!(
            bloch_vector(&StateVector::basis(1, 0).unwrap()).unwrap(),
            [0.0, 0.0, 1.0]
        );
        let y_plus =
            StateVector::new(vec![Complex::new(FRAC_1_SQRT_2, 0.0), Complex::new(0.0, FRAC_1_SQRT_2)]).unwrap();
        let v = bloch_vector(&y_plus).unwrap();
        assert_close(v[0], 0.0, 1e-15);
        assert_close(v[1], 1.0, 1e-15);
        assert_close(v[2], 0.0, 1e-15);
    }

    #[test]
    fn family_bloch_vectors_lie_in_xz_plane() {
        for phi in grid() {
            let (s, c) = phi.sin_cos();
            let expected = [[s, 0.0, c], [-s, 0.0, c], [-s, 0.0, -c], [s, 0.0, -c]];
            for (spec, m) in InputSpec::FAMILY.iter().zip(expected) {
                let v = bloch_vector(&input_state(*spec, phi).unwrap()).unwrap();
                for k in 0..3 {
                    assert_close(v[k], m[k], 1e-12);
                }
            }
        }
    }

    #[test]
    fn preparation_circuit_examples() {
        let zero = PrepAngles {
            theta1: 0.0,
            theta2: 0.0,
            theta3: 0.0,
        };
        assert_eq!(preparation_circuit(&zero).unwrap(), StateVector::basis(2, 0).unwrap());

        let quarter = PrepAngles {
            theta1: FRAC_PI_4,
            theta2: 0.0,
            theta3: FRAC_PI_4,
        };
        let uniform = StateVector::from_real(&[0.5; 4]).unwrap();
        assert!(preparation_circuit(&quarter).unwrap().max_abs_diff(&uniform).unwrap() < 1e-15);

        let eighth = PrepAngles {
            theta1: FRAC_PI_8,
            theta2: 0.0,
            theta3: FRAC_PI_8,
        };
        let expected = StateVector::from_real(&[A_PI4, B_PI4, B_PI4, C_PI4]).unwrap();
        assert!(preparation_circuit(&eighth).unwrap().max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn preparation_direct_examples() {
        let co = Coefficients { a: 1.0, b: 0.0, c: 0.0 };
        assert_eq!(
            preparation_state_direct(&co).unwrap(),
            StateVector::basis(2, 0).unwrap()
        );
        assert!(preparation_state_direct(&Coefficients { a: 1.0, b: 1.0, c: 0.0 }).is_err());
    }

    #[test]
    fn preparation_state_is_a_product() {
        for phi in grid() {
            let co = coefficients(phi).unwrap();
            let factor = StateVector::from_real(&[co.a.sqrt(), co.c.sqrt()]).unwrap();
            let product = factor.kron(&factor).unwrap();
            let direct = preparation_state_direct(&co).unwrap();
            assert!(product.max_abs_diff(&direct).unwrap() < 1e-12, "phi={phi}");
        }
    }

    #[test]
    fn preparation_identity_on_grid() {
        for phi in grid() {
            let p = MachineParams::from_phi(phi).unwrap();
            let circuit = preparation_circuit(&p.angles()).unwrap();
            let direct = preparation_state_direct(&p.coefficients()).unwrap();
            assert!(circuit.max_abs_diff(&direct).unwrap() < 1e-12, "phi={phi}");
        }
    }

    #[test]
    fn copy_circuit_examples() {
        let u = copy_circuit();
        assert!(u.is_permutation());
        let out = apply(&u, &StateVector::basis(3, 0).unwrap()).unwrap();
        assert_eq!(out, StateVector::basis(3, 0).unwrap());

        // Symbolic check with distinct placeholder amplitudes; the map is a
        // permutation, so any values work.
        let (a, b, c) = (0.1, 0.3, 0.9);
        let prep = StateVector::from_real(&[a, b, b, c]).unwrap();
        for bit in 0..2u8 {
            let register = StateVector::basis(1, bit as usize).unwrap().kron(&prep).unwrap();
            let out = apply(&u, &register).unwrap();
            let mut expected = [0.0; 8];
            if bit == 0 {
                expected[0b000] = a;
                expected[0b011] = b;
                expected[0b101] = b;
                expected[0b110] = c;
            } else {
                expected[0b111] = a;
                expected[0b100] = b;
                expected[0b010] = b;
                expected[0b001] = c;
            }
            for (idx, amp) in out.amps().iter().enumerate() {
                assert_eq!(amp.re, expected[idx], "bit {bit} index {idx:03b}");
            }
        }
    }

    #[test]
    fn reversed_copy_order_breaks_the_map() {
        let miswired = Network {
            copy_order: CopyOrder::Reversed,
            ..Network::default()
        };
        let out = miswired.clone_state(InputSpec::Psi1, 0.0).unwrap();
        let ideal = ideal_clone_output(InputSpec::Psi1, 0.0).unwrap();
        // The basis input |0⟩ passes untouched either way, so use a superposition.
        assert!(out.max_abs_diff(&ideal).unwrap() < 1e-15);
        let out = miswired.clone_state(InputSpec::Psi1, FRAC_PI_4).unwrap();
        let ideal = ideal_clone_output(InputSpec::Psi1, FRAC_PI_4).unwrap();
        assert!(out.max_abs_diff(&ideal).unwrap() > 0.1);
    }

    #[test]
    fn ideal_map_examples() {
        let co0 = coefficients(0.0).unwrap();
        assert_eq!(ideal_clone_map(0, &co0).unwrap(), StateVector::basis(3, 0b000).unwrap());
        assert_eq!(ideal_clone_map(1, &co0).unwrap(), StateVector::basis(3, 0b111).unwrap());
        let out = ideal_clone_map(0, &coefficients(FRAC_PI_4).unwrap()).unwrap();
        let amps: Vec<f64> = out.amps().iter().map(|z| z.re).collect();
        let expected = [A_PI4, 0.0, 0.0, B_PI4, 0.0, B_PI4, C_PI4, 0.0];
        for (x, y) in amps.iter().zip(expected) {
            assert_close(*x, y, 1e-15);
        }
        assert!(ideal_clone_map(2, &co0).is_err());
    }

    #[test]
    fn clone_examples() {
        let out = clone(InputSpec::Psi1, 0.0).unwrap();
        assert!(out.max_abs_diff(&StateVector::basis(3, 0).unwrap()).unwrap() < 1e-15);
        let amp = 1.0 / (2.0 * SQRT_2);
        let plus3 = StateVector::from_real(&[amp; 8]).unwrap();
        assert!(clone(InputSpec::Psi1, FRAC_PI_2).unwrap().max_abs_diff(&plus3).unwrap() < 1e-15);

        let minus = StateVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        let minus3 = minus.kron(&minus).unwrap().kron(&minus).unwrap();
        assert!(
            clone(InputSpec::Psi2, FRAC_PI_2)
                .unwrap()
                .max_abs_diff(&minus3)
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn circuit_matches_ideal_map_on_grid() {
        for phi in grid() {
            for spec in InputSpec::FAMILY {
                let out = clone(spec, phi).unwrap();
                let ideal = ideal_clone_output(spec, phi).unwrap();
                assert!(out.max_abs_diff(&ideal).unwrap() < 1e-10, "{spec} phi={phi}");
            }
        }
    }

    #[test]
    fn output_is_symmetric_under_original_blank_exchange() {
        // The ideal map pairs |011⟩ with |101⟩: a1 and a2 carry the copies.
        for phi in grid() {
            let out = clone(InputSpec::Psi1, phi).unwrap();
            assert_eq!(out.swap_qubits(A1, A2).unwrap(), out, "phi={phi}");
        }
        // a3 is the ancilla and does not share the symmetry away from b = c.
        let out = clone(InputSpec::Psi1, FRAC_PI_4).unwrap();
        assert!(out.swap_qubits(A2, A3).unwrap().max_abs_diff(&out).unwrap() > 0.1);
    }

    #[test]
    fn operators_are_unitary() {
        for phi in grid() {
            let p = MachineParams::from_phi(phi).unwrap();
            let prep = Network::default().preparation_operator(&p.angles()).unwrap();
            assert!(prep.unitarity_defect() < 1e-12);
        }
        assert!(copy_circuit().unitarity_defect() < 1e-15);
    }

    #[test]
    fn field_synthesized_network_matches_at_rotation_phase() {
        let field = Network {
            field_phase: Some(crate::gates::ROTATION_PHASE),
            ..Network::default()
        };
        for phi in grid() {
            let a = field.clone_state(InputSpec::Psi4, phi).unwrap();
            let b = clone(InputSpec::Psi4, phi).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-14);
        }
    }
}
