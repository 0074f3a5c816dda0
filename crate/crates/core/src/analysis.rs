//! Fidelity under rotation-angle errors, clone-pair density matrices and
//! partial-transpose spectra.

use std::fmt;

use serde::Serialize;

use crate::cloner::{coefficients, input_state, Coefficients, InputSpec, MachineParams, Network, A1, A2, A3};
use crate::qlin::{
    hermitian_eigenvalues, overlap_sq, partial_trace, partial_transpose, reduced_density, DensityMatrix, StateVector,
};
use crate::{Error, Result};

/// Minimum partial-transpose eigenvalue below which a pair is reported entangled.
pub const ENTANGLEMENT_THRESHOLD: f64 = -1e-12;

/// Agreement required between the three-qubit and preparation-only fidelity routes.
const ROUTE_AGREEMENT_TOL: f64 = 1e-12;

/// Closed-form and simulated fidelity for one `(φ, Δθ)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationResult {
    pub phi: f64,
    pub delta_theta: f64,
    pub f_closed: f64,
    pub f_simulated: f64,
}

impl PerturbationResult {
    pub fn difference(&self) -> f64 {
        (self.f_closed - self.f_simulated).abs()
    }
}

/// First-order fidelity model for a common error Δθ on all three preparation
/// angles.
///
/// The perturbed preparation amplitudes are approximated as
///
/// ```text
/// A = a − 2bΔθ + ½(1 − √(1−4b²))Δθ
/// B = b −  bΔθ +     √(1−4b²) Δθ
/// C = c + 2bΔθ + ½(1 + √(1−4b²))Δθ
/// ```
///
/// and `F = (aA + 2bB + cC)² / (A² + 2B² + C²)`. The expansion is only good
/// to O(Δθ²); compare against [`perturbed_fidelity_simulated`] for the exact value.
pub fn perturbed_fidelity_closed(phi: f64, delta_theta: f64) -> Result<f64> {
    let Coefficients { a, b, c } = coefficients(phi)?;
    let root = (1.0 - 4.0 * b * b).max(0.0).sqrt();
    let d = delta_theta;
    let big_a = a - 2.0 * b * d + 0.5 * (1.0 - root) * d;
    let big_b = b - b * d + root * d;
    let big_c = c + 2.0 * b * d + 0.5 * (1.0 + root) * d;
    let overlap = a * big_a + 2.0 * b * big_b + c * big_c;
    let norm_sqr = big_a * big_a + 2.0 * big_b * big_b + big_c * big_c;
    Ok(overlap * overlap / norm_sqr)
}

/// Exact fidelity between the ideal machine output and the output with every
/// preparation angle shifted by `delta_theta`.
pub fn perturbed_fidelity_simulated(phi: f64, delta_theta: f64) -> Result<f64> {
    perturbed_fidelity_independent(phi, [delta_theta; 3])
}

/// As [`perturbed_fidelity_simulated`] with a separate error on each angle.
///
/// The fidelity is taken on the full three-qubit output and cross-checked
/// against the overlap of the two preparation states, which must agree since
/// the input and the copy stage are shared.
pub fn perturbed_fidelity_independent(phi: f64, deltas: [f64; 3]) -> Result<f64> {
    perturbed_fidelity_on(&Network::default(), phi, deltas)
}

pub fn perturbed_fidelity_on(network: &Network, phi: f64, deltas: [f64; 3]) -> Result<f64> {
    let params = MachineParams::from_phi(phi)?;
    let ideal_angles = params.angles();
    let actual_angles = ideal_angles.shifted_each(deltas);
    let input = input_state(InputSpec::Psi1, phi)?;

    let full = overlap_sq(
        &network.run(&input, &ideal_angles)?,
        &network.run(&input, &actual_angles)?,
    )?;
    let prep = overlap_sq(
        &network.preparation_state(&ideal_angles)?,
        &network.preparation_state(&actual_angles)?,
    )?;
    if (full - prep).abs() > ROUTE_AGREEMENT_TOL {
        return Err(Error::CrossCheck(format!(
            "three-qubit fidelity {full} disagrees with preparation overlap {prep}"
        )));
    }
    Ok(full)
}

pub fn perturbation(phi: f64, delta_theta: f64) -> Result<PerturbationResult> {
    Ok(PerturbationResult {
        phi,
        delta_theta,
        f_closed: perturbed_fidelity_closed(phi, delta_theta)?,
        f_simulated: perturbed_fidelity_simulated(phi, delta_theta)?,
    })
}

/// Reduced state of qubits `(a2, a3)`, tracing out the original `a1`.
pub fn clone_pair_density(output: &StateVector) -> Result<DensityMatrix> {
    if output.n_qubits() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            found: output.dim(),
        });
    }
    partial_trace(output, (A2, A3))
}

/// A single qubit of the output register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputQubit {
    A1,
    A2,
    A3,
}

impl OutputQubit {
    pub fn index(self) -> usize {
        match self {
            OutputQubit::A1 => A1,
            OutputQubit::A2 => A2,
            OutputQubit::A3 => A3,
        }
    }
}

/// `⟨ψ_in|ρ_q|ψ_in⟩` for the marginal `ρ_q` of one output qubit.
pub fn single_clone_fidelity(output: &StateVector, input: &StateVector, which: OutputQubit) -> Result<f64> {
    if input.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: input.dim(),
        });
    }
    let rho = reduced_density(output, &[which.index()])?;
    rho.expectation(input)
}

/// Closed-form partial-transpose spectrum of the clone pair in terms of the
/// machine coefficients, ascending:
/// `(a²+b² ± √((a²−b²)² + 4b²c²))/2` and `(b²+c² ± √((b²−c²)² + 4a²b²))/2`.
///
/// These are exact for basis-state inputs. For superpositions the true
/// spectrum depends on the input amplitudes; see [`separability_report`].
pub fn pt_eigenvalues_closed(co: &Coefficients) -> [f64; 4] {
    let (a2, b2, c2) = (co.a * co.a, co.b * co.b, co.c * co.c);
    let r1 = ((a2 - b2).powi(2) + 4.0 * b2 * c2).sqrt();
    let r2 = ((b2 - c2).powi(2) + 4.0 * a2 * b2).sqrt();
    let mut eigs = [
        0.5 * (a2 + b2 - r1),
        0.5 * (a2 + b2 + r1),
        0.5 * (b2 + c2 - r2),
        0.5 * (b2 + c2 + r2),
    ];
    eigs.sort_by(f64::total_cmp);
    eigs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Entangled,
    Separable,
}

impl Verdict {
    pub fn from_min_eigenvalue(min_eig: f64) -> Self {
        if min_eig < ENTANGLEMENT_THRESHOLD {
            Verdict::Entangled
        } else {
            Verdict::Separable
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Entangled => "Entangled",
            Verdict::Separable => "Separable",
        })
    }
}

/// Peres-Horodecki analysis of the `(a2, a3)` pair for one input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub phi: f64,
    pub input: InputSpec,
    pub pt_eigs_numeric: [f64; 4],
    pub pt_eigs_closed: [f64; 4],
    /// Largest distance between the numeric and closed-form spectra.
    pub closed_form_deviation: f64,
    pub min_eig: f64,
    pub verdict: Verdict,
}

impl EntanglementReport {
    /// Magnitude of the most negative partial-transpose eigenvalue.
    pub fn negativity(&self) -> f64 {
        (-self.min_eig).max(0.0)
    }
}

/// Partial-transpose eigenvalues of a two-qubit density matrix, ascending.
pub fn pt_eigenvalues(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let eigs = hermitian_eigenvalues(&partial_transpose(rho)?)?;
    Ok([eigs[0], eigs[1], eigs[2], eigs[3]])
}

/// Runs the machine on `input` at angle φ and classifies the clone pair.
pub fn separability_report(input: InputSpec, phi: f64) -> Result<EntanglementReport> {
    separability_report_on(&Network::default(), input, phi)
}

pub fn separability_report_on(network: &Network, input: InputSpec, phi: f64) -> Result<EntanglementReport> {
    let output = network.clone_state(input, phi)?;
    let numeric = pt_eigenvalues(&clone_pair_density(&output)?)?;
    let closed = pt_eigenvalues_closed(&coefficients(phi)?);
    let deviation = numeric
        .iter()
        .zip(&closed)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(EntanglementReport {
        phi,
        input,
        pt_eigs_numeric: numeric,
        pt_eigs_closed: closed,
        closed_form_deviation: deviation,
        min_eig: numeric[0],
        verdict: Verdict::from_min_eigenvalue(numeric[0]),
    })
}
