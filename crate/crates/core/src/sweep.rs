//! Grid evaluation over φ and Δθ.
//!
//! Points are independent, so each sweep maps a pure function over a slice.
//! With the `parallel` feature (on by default) the map runs on the rayon
//! pool; otherwise, or with [`Strategy::Sequential`], it is a plain iterator.
//! Output order always follows input order.

use std::f64::consts::FRAC_PI_2;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    perturbation, separability_report, single_clone_fidelity, OutputQubit, PerturbationResult, Verdict,
};
use crate::cloner::{clone, input_state, InputSpec, MachineParams};
use crate::{Error, Result};

/// Parallel when the `parallel` feature is on, sequential otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

/// Maps `f` over `items`, stopping at the first error (in input order).
pub fn try_map<T, R, F>(strategy: Strategy, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    match strategy {
        Strategy::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        // Collect everything first so the reported error is the earliest one.
        Strategy::Parallel => items.par_iter().map(f).collect::<Vec<_>>().into_iter().collect(),
    }
}

/// `steps` evenly spaced points from `start` to `end` inclusive; a single step
/// yields just `start`. The last point is `end` exactly.
pub fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    end
                } else {
                    start + (end - start) * (i as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

/// The 41-point grid over [0, π/2] used throughout verification.
pub fn phi_grid() -> Vec<f64> {
    linspace(0.0, FRAC_PI_2, 41)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub phi_start: f64,
    pub phi_end: f64,
    pub steps: usize,
    pub delta_thetas: Vec<f64>,
    pub inputs: Vec<InputSpec>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        for phi in [self.phi_start, self.phi_end] {
            if !(0.0..=FRAC_PI_2).contains(&phi) {
                return Err(Error::PhiOutOfRange(phi));
            }
        }
        if self.phi_start > self.phi_end {
            return Err(Error::InvalidInput(format!(
                "phi_start {} exceeds phi_end {}",
                self.phi_start, self.phi_end
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidInput("steps must be at least 1".into()));
        }
        if self.inputs.is_empty() {
            return Err(Error::InvalidInput("no inputs selected".into()));
        }
        if self.inputs.iter().any(|i| !i.is_family()) {
            return Err(Error::InvalidInput("sweeps accept psi1..psi4 only".into()));
        }
        Ok(())
    }

    pub fn phis(&self) -> Vec<f64> {
        linspace(self.phi_start, self.phi_end, self.steps)
    }
}

/// One `(φ, input)` row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub phi: f64,
    pub input: InputSpec,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub theta1: f64,
    /// Fidelity of the blank copy `a2` with the input.
    pub clone_fidelity: f64,
    pub min_pt_eig_numeric: f64,
    pub min_pt_eig_closed: f64,
    pub verdict: Verdict,
}

pub fn sweep_row(phi: f64, input: InputSpec) -> Result<SweepRow> {
    let params = MachineParams::from_phi(phi)?;
    let output = clone(input, phi)?;
    let fidelity = single_clone_fidelity(&output, &input_state(input, phi)?, OutputQubit::A2)?;
    let report = separability_report(input, phi)?;
    Ok(SweepRow {
        phi,
        input,
        a: params.a,
        b: params.b,
        c: params.c,
        theta1: params.theta1,
        clone_fidelity: fidelity,
        min_pt_eig_numeric: report.min_eig,
        min_pt_eig_closed: report.pt_eigs_closed[0],
        verdict: report.verdict,
    })
}

/// Rows ordered by φ ascending, then by input (psi1 first); duplicates dropped.
pub fn run_sweep(cfg: &SweepConfig, strategy: Strategy) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let mut inputs = cfg.inputs.clone();
    inputs.sort_by_key(|i| i.name());
    inputs.dedup();
    let points: Vec<(f64, InputSpec)> = cfg
        .phis()
        .into_iter()
        .flat_map(|phi| inputs.iter().map(move |&i| (phi, i)))
        .collect();
    try_map(strategy, &points, |&(phi, input)| sweep_row(phi, input))
}

/// [`perturbation_grid`] over the φ points and Δθ values of `cfg`.
pub fn perturbation_sweep(cfg: &SweepConfig, strategy: Strategy) -> Result<Vec<PerturbationResult>> {
    for phi in [cfg.phi_start, cfg.phi_end] {
        if !(0.0..=FRAC_PI_2).contains(&phi) {
            return Err(Error::PhiOutOfRange(phi));
        }
    }
    perturbation_grid(&cfg.phis(), &cfg.delta_thetas, strategy)
}

/// Closed-form and simulated fidelity at every `(φ, Δθ)` pair, φ-major.
pub fn perturbation_grid(phis: &[f64], delta_thetas: &[f64], strategy: Strategy) -> Result<Vec<PerturbationResult>> {
    let points: Vec<(f64, f64)> = phis
        .iter()
        .flat_map(|&phi| delta_thetas.iter().map(move |&dt| (phi, dt)))
        .collect();
    try_map(strategy, &points, |&(phi, dt)| perturbation(phi, dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn cfg(steps: usize, inputs: Vec<InputSpec>) -> SweepConfig {
        SweepConfig {
            phi_start: 0.0,
            phi_end: FRAC_PI_2,
            steps,
            delta_thetas: vec![],
            inputs,
        }
    }

    #[test]
    fn linspace_edges() {
        assert_eq!(linspace(0.3, 1.0, 1), vec![0.3]);
        assert_eq!(linspace(0.0, FRAC_PI_2, 3), vec![0.0, FRAC_PI_4, FRAC_PI_2]);
        let g = phi_grid();
        assert_eq!(g.len(), 41);
        assert_eq!(*g.last().unwrap(), FRAC_PI_2);
    }

    #[test]
    fn three_step_sweep_min_eigs() {
        let rows = run_sweep(&cfg(3, vec![InputSpec::Psi1]), Strategy::default()).unwrap();
        assert_eq!(rows.len(), 3);
        let expected = [0.0, -0.232_963_0, 0.0];
        for (row, e) in rows.iter().zip(expected) {
            assert!((row.min_pt_eig_numeric - e).abs() < 1e-6, "{row:?}");
        }
        assert_eq!(rows[1].verdict, Verdict::Entangled);
        assert_eq!(rows[0].verdict, Verdict::Separable);
    }

    #[test]
    fn single_step_sweep() {
        let mut c = cfg(1, vec![InputSpec::Psi2]);
        c.phi_start = 0.4;
        let rows = run_sweep(&c, Strategy::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].phi, 0.4);
    }

    #[test]
    fn sweep_rejects_bad_configs() {
        let err = run_sweep(&cfg(3, vec![]), Strategy::default()).unwrap_err();
        assert!(err.to_string().contains("no inputs selected"));
        assert!(run_sweep(&cfg(0, vec![InputSpec::Psi1]), Strategy::default()).is_err());
        let mut c = cfg(2, vec![InputSpec::Psi1]);
        c.phi_end = 2.0;
        assert!(matches!(
            run_sweep(&c, Strategy::default()),
            Err(Error::PhiOutOfRange(_))
        ));
        let mut c = cfg(2, vec![InputSpec::Psi1]);
        c.phi_start = 1.0;
        c.phi_end = 0.5;
        assert!(run_sweep(&c, Strategy::default()).is_err());
    }

    #[test]
    fn row_order_is_phi_then_input() {
        let rows = run_sweep(&cfg(2, vec![InputSpec::Psi3, InputSpec::Psi1]), Strategy::default()).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.phi, r.input.name())).collect();
        assert_eq!(
            keys,
            vec![(0.0, "psi1"), (0.0, "psi3"), (FRAC_PI_2, "psi1"), (FRAC_PI_2, "psi3")]
        );
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        let c = cfg(9, InputSpec::FAMILY.to_vec());
        assert_eq!(
            run_sweep(&c, Strategy::Parallel).unwrap(),
            run_sweep(&c, Strategy::Sequential).unwrap()
        );
        let phis = phi_grid();
        let dts = [0.05, -0.01, 0.0];
        assert_eq!(
            perturbation_grid(&phis, &dts, Strategy::Parallel).unwrap(),
            perturbation_grid(&phis, &dts, Strategy::Sequential).unwrap()
        );
    }

    #[test]
    fn try_map_reports_first_error_in_order() {
        let items = [0.1, 3.0, 4.0];
        let err = try_map(Strategy::default(), &items, |&phi| MachineParams::from_phi(phi)).unwrap_err();
        assert_eq!(err, Error::PhiOutOfRange(3.0));
    }
}
