//! Trotterized adiabatic state preparation on a state vector.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::{self, FieldError, FieldGrid, HamiltonianSpec, MomentumBasis};
use crate::StateVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("state length {got} does not match register length {expected}")]
    Length { got: usize, expected: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrotterOrder {
    First,
    #[default]
    Second,
}

/// Where λ is sampled inside a ramp of N steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ramp {
    /// λ_k = λ·k/(N+1); the target is approached but never reached.
    #[default]
    Interior,
    /// λ_k = λ·k/N.
    EndPoint,
}

/// Factor order of a first-order step, as applied to the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Split {
    #[default]
    KineticFirst,
    PotentialFirst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspSchedule {
    pub n_steps: usize,
    pub dt: f64,
    pub order: TrotterOrder,
    pub lambda_target: f64,
    pub nu_cut_phi4: Option<usize>,
    pub nu_cut_phi2: Option<usize>,
    pub merge_adjacent: bool,
    pub ramp: Ramp,
    pub split: Split,
}

impl AspSchedule {
    pub fn new(n_steps: usize, dt: f64, lambda_target: f64) -> Self {
        Self {
            n_steps,
            dt,
            order: TrotterOrder::Second,
            lambda_target,
            nu_cut_phi4: None,
            nu_cut_phi2: None,
            merge_adjacent: false,
            ramp: Ramp::Interior,
            split: Split::KineticFirst,
        }
    }

    pub fn total_time(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    /// Coupling used in step k (1-based).
    pub fn lambda_at(&self, k: usize) -> f64 {
        lambda_at(self.ramp, self.lambda_target, k, self.n_steps)
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(EvolutionError::InvalidSchedule(format!("dt = {}", self.dt)));
        }
        if !(self.lambda_target.is_finite() && self.lambda_target >= 0.0) {
            return Err(EvolutionError::InvalidSchedule(format!("lambda = {}", self.lambda_target)));
        }
        Ok(())
    }
}

pub fn lambda_at(ramp: Ramp, target: f64, k: usize, n: usize) -> f64 {
    match ramp {
        Ramp::Interior => target * k as f64 / (n + 1) as f64,
        Ramp::EndPoint => target * k as f64 / n as f64,
    }
}

pub fn to_complex(v: &[f64]) -> StateVector {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

pub fn norm(state: &[Complex64]) -> f64 {
    state.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// |⟨a|b⟩|².
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

/// Σ_j |a_j||b_j|, insensitive to relative phases between components.
pub fn amplitude_overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.norm() * y.norm()).sum()
}

/// ⟨Z-string⟩ for a mask in the crate's qubit convention.
pub fn z_expectation(state: &[Complex64], mask: usize) -> f64 {
    state
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let p = a.norm_sqr();
            if (j & mask).count_ones().is_multiple_of(2) { p } else { -p }
        })
        .sum()
}

/// ⟨Z_i Z_j⟩ for every pair i < j (1-based qubits).
pub fn zz_expectations(state: &[Complex64], n_qubits: u32) -> BTreeMap<(u32, u32), f64> {
    let mut out = BTreeMap::new();
    for i in 1..=n_qubits {
        for j in i + 1..=n_qubits {
            let mask = (1usize << (n_qubits - i)) | (1usize << (n_qubits - j));
            out.insert((i, j), z_expectation(state, mask));
        }
    }
    out
}

/// Precomputed diagonals and FFT plans for one register and cutoff choice.
#[derive(Clone)]
pub struct Evolver {
    pub n_qubits: u32,
    basis: MomentumBasis,
    half_phi2: Vec<f64>,
    phi4: Vec<f64>,
}

impl Evolver {
    /// Truncated terms lose their identity component: a global phase only.
    pub fn new(grid: &FieldGrid<f64>, nu_cut_phi4: Option<usize>, nu_cut_phi2: Option<usize>) -> Result<Self, EvolutionError> {
        let spec = HamiltonianSpec { lambda: 0.0, nu_cut_phi4, nu_cut_phi2, drop_identity: true };
        let (half_phi2, phi4) = field::potential_terms(grid, &spec)?;
        Ok(Self { n_qubits: grid.n_qubits, basis: MomentumBasis::new(grid), half_phi2, phi4 })
    }

    pub fn for_schedule(grid: &FieldGrid<f64>, s: &AspSchedule) -> Result<Self, EvolutionError> {
        Self::new(grid, s.nu_cut_phi4, s.nu_cut_phi2)
    }

    pub fn len(&self) -> usize {
        self.phi4.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi4.is_empty()
    }

    fn check(&self, state: &[Complex64]) -> Result<(), EvolutionError> {
        if state.len() != self.len() {
            return Err(EvolutionError::Length { got: state.len(), expected: self.len() });
        }
        Ok(())
    }

    /// exp(-i[φ2_t·½φ² + φ4_t·φ⁴]) with independent durations per term.
    fn diagonal_phase(&self, state: &mut [Complex64], phi2_t: f64, phi4_t: f64) {
        state
            .iter_mut()
            .zip(self.half_phi2.iter().zip(&self.phi4))
            .for_each(|(a, (h2, p4))| *a *= Complex64::from_polar(1.0, -(h2 * phi2_t + p4 * phi4_t)));
    }

    /// Φ̃(λ, t) = exp(-i(½φ² + λ/4! φ⁴)t).
    pub fn phi_step(&self, state: &mut [Complex64], lambda: f64, t: f64) {
        self.diagonal_phase(state, t, lambda / 24.0 * t);
    }

    /// Π̃(t) = exp(-i½Π̂²t).
    pub fn pi_step(&self, state: &mut [Complex64], t: f64) {
        self.basis
            .apply_momentum_diag(state, |p2| Complex64::from_polar(1.0, -0.5 * p2 * t));
    }

    pub fn trotter_step(&self, state: &mut [Complex64], lambda: f64, dt: f64, order: TrotterOrder, split: Split) {
        match (order, split) {
            (TrotterOrder::Second, _) => {
                self.phi_step(state, lambda, dt / 2.0);
                self.pi_step(state, dt);
                self.phi_step(state, lambda, dt / 2.0);
            }
            (TrotterOrder::First, Split::KineticFirst) => {
                self.pi_step(state, dt);
                self.phi_step(state, lambda, dt);
            }
            (TrotterOrder::First, Split::PotentialFirst) => {
                self.phi_step(state, lambda, dt);
                self.pi_step(state, dt);
            }
        }
    }

    /// Runs the whole ramp from `initial`.
    pub fn run(&self, s: &AspSchedule, initial: &[Complex64]) -> Result<StateVector, EvolutionError> {
        s.validate()?;
        self.check(initial)?;
        let mut state = initial.to_vec();
        let n = s.n_steps;
        if s.merge_adjacent && s.order == TrotterOrder::Second && n > 0 {
            self.phi_step(&mut state, s.lambda_at(1), s.dt / 2.0);
            for k in 1..=n {
                self.pi_step(&mut state, s.dt);
                if k < n {
                    // Exact product of the two neighbouring half steps.
                    let l = s.lambda_at(k) + s.lambda_at(k + 1);
                    self.diagonal_phase(&mut state, s.dt, l / 24.0 * s.dt / 2.0);
                } else {
                    self.phi_step(&mut state, s.lambda_at(n), s.dt / 2.0);
                }
            }
        } else {
            for k in 1..=n {
                self.trotter_step(&mut state, s.lambda_at(k), s.dt, s.order, s.split);
            }
        }
        Ok(state)
    }

    /// Noiseless forward-backward companion of a two-step run.
    pub fn run_mitigation(&self, s: &AspSchedule, initial: &[Complex64]) -> Result<StateVector, EvolutionError> {
        s.validate()?;
        self.check(initial)?;
        if s.n_steps != 2 {
            return Err(EvolutionError::InvalidSchedule("mitigation needs exactly 2 steps".into()));
        }
        let (l1, l2, t) = (s.lambda_at(1), s.lambda_at(2), s.dt);
        // Rightmost factor acts first.
        let mut state = initial.to_vec();
        self.phi_step(&mut state, l2, -t / 2.0);
        self.pi_step(&mut state, -t);
        self.pi_step(&mut state, t);
        self.phi_step(&mut state, l1, t / 2.0);
        Ok(state)
    }
}

/// Ground state of the free Hamiltonian on `grid`.
pub fn free_ground_state(grid: &FieldGrid<f64>) -> Result<StateVector, EvolutionError> {
    Ok(to_complex(&field::solve_ground_state(grid, &HamiltonianSpec::free())?.1))
}

/// Ground state of the untruncated target Hamiltonian.
pub fn target_ground_state(grid: &FieldGrid<f64>, lambda: f64) -> Result<StateVector, EvolutionError> {
    Ok(to_complex(&field::solve_ground_state(grid, &HamiltonianSpec::full(lambda))?.1))
}

pub fn run_asp(s: &AspSchedule, grid: &FieldGrid<f64>) -> Result<StateVector, EvolutionError> {
    Evolver::for_schedule(grid, s)?.run(s, &free_ground_state(grid)?)
}

/// exp(-iHt) from a dense symmetric eigendecomposition.
fn exact_propagator(h: DMatrix<f64>, t: f64) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(h);
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
    &v * d * v.transpose()
}

/// Adiabatic ramp with exact per-step exponentials exp(-iH(λ_k)δt).
pub fn run_asp_exact(
    grid: &FieldGrid<f64>,
    n_steps: usize,
    total_time: f64,
    lambda_target: f64,
    nu_cut_phi4: Option<usize>,
    nu_cut_phi2: Option<usize>,
    ramp: Ramp,
) -> Result<StateVector, EvolutionError> {
    let mut state = nalgebra::DVector::from_vec(free_ground_state(grid)?);
    if n_steps == 0 {
        return Ok(state.as_slice().to_vec());
    }
    let dt = total_time / n_steps as f64;
    for k in 1..=n_steps {
        let spec = HamiltonianSpec {
            lambda: lambda_at(ramp, lambda_target, k, n_steps),
            nu_cut_phi4,
            nu_cut_phi2,
            drop_identity: false,
        };
        state = exact_propagator(field::build_hamiltonian(grid, &spec)?, dt) * state;
    }
    Ok(state.as_slice().to_vec())
}

/// Everything needed to evaluate one point of a fidelity scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub lambda_target: f64,
    pub order: TrotterOrder,
    pub nu_cut_phi4: Option<usize>,
    pub nu_cut_phi2: Option<usize>,
    pub ramp: Ramp,
    pub split: Split,
}

impl ScanConfig {
    pub fn schedule(&self, n_steps: usize, dt: f64) -> AspSchedule {
        AspSchedule {
            order: self.order,
            nu_cut_phi4: self.nu_cut_phi4,
            nu_cut_phi2: self.nu_cut_phi2,
            ramp: self.ramp,
            split: self.split,
            ..AspSchedule::new(n_steps, dt, self.lambda_target)
        }
    }
}

/// Fidelity against the untruncated target; rows are step counts,
/// columns are δt.
pub fn scan_fidelity(
    grid: &FieldGrid<f64>,
    config: &ScanConfig,
    dts: &[f64],
    steps: &[usize],
) -> Result<Vec<Vec<f64>>, EvolutionError> {
    let evolver = Evolver::new(grid, config.nu_cut_phi4, config.nu_cut_phi2)?;
    let initial = free_ground_state(grid)?;
    let target = target_ground_state(grid, config.lambda_target)?;
    scan_with(&evolver, config, &initial, &target, dts, steps)
}

/// [`scan_fidelity`] with caller-supplied initial and target states.
pub fn scan_with(
    evolver: &Evolver,
    config: &ScanConfig,
    initial: &[Complex64],
    target: &[Complex64],
    dts: &[f64],
    steps: &[usize],
) -> Result<Vec<Vec<f64>>, EvolutionError> {
    steps
        .par_iter()
        .map(|&n| {
            dts.iter()
                .map(|&dt| {
                    let out = evolver.run(&config.schedule(n, dt), initial)?;
                    Ok(fidelity(target, &out))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramps() {
        assert_eq!(lambda_at(Ramp::Interior, 10.0, 4, 4), 8.0);
        assert_eq!(lambda_at(Ramp::EndPoint, 10.0, 4, 4), 10.0);
    }

    #[test]
    fn simple_overlaps() {
        let a = to_complex(&[1.0, 0.0]);
        let b = to_complex(&[0.0, 1.0]);
        assert_eq!(fidelity(&a, &a), 1.0);
        assert_eq!(fidelity(&a, &b), 0.0);
    }

    #[test]
    fn basis_and_uniform_correlators() {
        let zero = to_complex(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(zz_expectations(&zero, 3).values().all(|&v| v == 1.0));
        let u = to_complex(&[8f64.sqrt().recip(); 8]);
        assert!(zz_expectations(&u, 3).values().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn bad_schedules() {
        let g = FieldGrid::new(3, 4.0).unwrap();
        let e = Evolver::new(&g, None, None).unwrap();
        let psi = to_complex(&[8f64.sqrt().recip(); 8]);
        assert!(e.run(&AspSchedule::new(2, 0.0, 1.0), &psi).is_err());
        assert!(e.run(&AspSchedule::new(2, 0.1, 1.0), &psi[..4]).is_err());
        assert!(e.run_mitigation(&AspSchedule::new(3, 0.1, 1.0), &psi).is_err());
        let out = e.run(&AspSchedule::new(0, 0.1, 1.0), &psi).unwrap();
        assert_eq!(out, psi);
    }
}
