//! Single-site digitized scalar field.
//!
//! Field values sit on a symmetric uniform grid; the conjugate momentum
//! lives on a half-integer shifted grid reached through the centered DFT
//! `W_{kj} = N^{-1/2} exp(2πi (j-c)(k-c)/N)`, `c = (N-1)/2`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Float;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::walsh::{self, WalshError, MAX_QUBITS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("eigensolver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("dense diagonalization refused for {0} qubits")]
    TooLarge(u32),
    #[error(transparent)]
    Walsh(#[from] WalshError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid<T> {
    pub n_qubits: u32,
    pub phi_max: T,
    pub delta_phi: T,
    pub values: Vec<T>,
}

impl<T: Float> FieldGrid<T> {
    pub fn new(n_qubits: u32, phi_max: T) -> Result<Self, FieldError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(FieldError::InvalidGrid(format!("n_qubits = {n_qubits}")));
        }
        if !phi_max.is_finite() || phi_max <= T::zero() {
            return Err(FieldError::InvalidGrid("phi_max must be positive".into()));
        }
        let len = 1usize << n_qubits;
        let delta_phi = (phi_max + phi_max) / T::from(len - 1).unwrap();
        // Fill from both ends so the grid is exactly antisymmetric.
        let mut values = vec![T::zero(); len];
        for j in 0..len / 2 {
            let v = -phi_max + T::from(j).unwrap() * delta_phi;
            values[j] = v;
            values[len - 1 - j] = -v;
        }
        Ok(Self { n_qubits, phi_max, delta_phi, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn momentum(&self) -> MomentumGrid<T> {
        MomentumGrid::new(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid<T> {
    pub delta_pi: T,
    pub values: Vec<T>,
}

impl<T: Float> MomentumGrid<T> {
    pub fn new(grid: &FieldGrid<T>) -> Self {
        let n = T::from(grid.len()).unwrap();
        let two_pi = T::from(2.0 * PI).unwrap();
        let delta_pi = two_pi / (n * grid.delta_phi);
        let c = (n - T::one()) / T::from(2.0).unwrap();
        let values = (0..grid.len())
            .map(|k| delta_pi * (T::from(k).unwrap() - c))
            .collect();
        Self { delta_pi, values }
    }
}

pub fn phi_power_operator<T: Float>(grid: &FieldGrid<T>, p: i32) -> Vec<T> {
    grid.values.iter().map(|v| v.powi(p)).collect()
}

/// The optimal φ_max for a free register of `n_qubits`.
pub fn optimal_phi_max(n_qubits: u32) -> f64 {
    let n = 2f64.powi(n_qubits as i32);
    n / 2.0 * (8f64.sqrt() * PI / n).sqrt()
}

fn centre(len: usize) -> f64 {
    (len as f64 - 1.0) / 2.0
}

/// Dense centered DFT kernel; used for oracles and small registers.
pub fn centered_dft(n_qubits: u32) -> DMatrix<Complex64> {
    let len = 1usize << n_qubits;
    let c = centre(len);
    let s = (len as f64).sqrt().recip();
    DMatrix::from_fn(len, len, |k, j| {
        let arg = 2.0 * PI * (j as f64 - c) * (k as f64 - c) / len as f64;
        Complex64::from_polar(s, arg)
    })
}

/// Π̂² in the field basis. It is real: the kernel pairs ±(k-c).
pub fn pi_squared_operator(grid: &FieldGrid<f64>) -> DMatrix<f64> {
    let len = grid.len();
    let c = centre(len);
    let pi2: Vec<f64> = grid.momentum().values.iter().map(|p| p * p).collect();
    // Toeplitz: entry depends on j - l only.
    let column: Vec<f64> = (0..len)
        .map(|d| {
            pi2.iter()
                .enumerate()
                .map(|(k, p)| p * (2.0 * PI * (k as f64 - c) * d as f64 / len as f64).cos())
                .sum::<f64>()
                / len as f64
        })
        .collect();
    DMatrix::from_fn(len, len, |j, l| column[j.abs_diff(l)])
}

/// FFT realization of the centered DFT, with Π̂² helpers.
#[derive(Clone)]
pub struct MomentumBasis {
    len: usize,
    phase: Vec<Complex64>,
    global: Complex64,
    pi_squared: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl MomentumBasis {
    pub fn new(grid: &FieldGrid<f64>) -> Self {
        let len = grid.len();
        let c = centre(len);
        let n = len as f64;
        let phase = (0..len)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * c * k as f64 / n))
            .collect();
        let global = Complex64::from_polar(1.0, 2.0 * PI * c * c / n);
        let pi_squared = grid.momentum().values.iter().map(|p| p * p).collect();
        let mut planner = FftPlanner::new();
        Self {
            len,
            phase,
            global,
            pi_squared,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn pi_squared(&self) -> &[f64] {
        &self.pi_squared
    }

    /// v ← W v
    pub fn to_momentum(&self, v: &mut [Complex64]) {
        assert_eq!(v.len(), self.len);
        v.iter_mut().zip(&self.phase).for_each(|(x, p)| *x *= p);
        self.inverse.process(v);
        let s = self.global / (self.len as f64).sqrt();
        v.iter_mut().zip(&self.phase).for_each(|(x, p)| *x *= p * s);
    }

    /// v ← W† v
    pub fn to_field(&self, v: &mut [Complex64]) {
        assert_eq!(v.len(), self.len);
        v.iter_mut().zip(&self.phase).for_each(|(x, p)| *x *= p.conj());
        self.forward.process(v);
        let s = self.global.conj() / (self.len as f64).sqrt();
        v.iter_mut().zip(&self.phase).for_each(|(x, p)| *x *= p.conj() * s);
    }

    /// v ← W† f(Π²) W v for a pointwise multiplier.
    pub fn apply_momentum_diag(&self, v: &mut [Complex64], f: impl Fn(f64) -> Complex64) {
        self.to_momentum(v);
        v.iter_mut().zip(&self.pi_squared).for_each(|(x, p2)| *x *= f(*p2));
        self.to_field(v);
    }

    /// out = ½Π̂² x for a real vector.
    pub fn half_pi_squared_real(&self, x: &[f64], out: &mut [f64]) {
        let mut buf: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.apply_momentum_diag(&mut buf, |p2| Complex64::new(0.5 * p2, 0.0));
        out.iter_mut().zip(&buf).for_each(|(o, b)| *o = b.re);
    }
}

/// Couplings and cutoffs of the single-site Hamiltonian; mass is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec {
    pub lambda: f64,
    pub nu_cut_phi4: Option<usize>,
    pub nu_cut_phi2: Option<usize>,
    /// Remove the ν = 0 term of each truncated operator.
    pub drop_identity: bool,
}

impl HamiltonianSpec {
    pub fn free() -> Self {
        Self::full(0.0)
    }

    pub fn full(lambda: f64) -> Self {
        Self { lambda, nu_cut_phi4: None, nu_cut_phi2: None, drop_identity: false }
    }

    pub fn truncated(lambda: f64, nu_cut_phi4: usize) -> Self {
        Self { nu_cut_phi4: Some(nu_cut_phi4), ..Self::full(lambda) }
    }

    pub fn with_phi2_cut(mut self, nu_cut: usize) -> Self {
        self.nu_cut_phi2 = Some(nu_cut);
        self
    }
}

fn maybe_truncate(d: Vec<f64>, cut: Option<usize>, drop_identity: bool) -> Result<Vec<f64>, FieldError> {
    Ok(match cut {
        Some(c) => walsh::truncated_diagonal(&d, c, drop_identity)?,
        None => d,
    })
}

/// The two diagonal pieces: (½φ², φ⁴), each truncated per `spec`.
pub fn potential_terms(grid: &FieldGrid<f64>, spec: &HamiltonianSpec) -> Result<(Vec<f64>, Vec<f64>), FieldError> {
    let phi2 = maybe_truncate(phi_power_operator(grid, 2), spec.nu_cut_phi2, spec.drop_identity)?;
    let phi4 = maybe_truncate(phi_power_operator(grid, 4), spec.nu_cut_phi4, spec.drop_identity)?;
    Ok((phi2.iter().map(|x| 0.5 * x).collect(), phi4))
}

/// ½φ² + (λ/4!)·φ⁴ on the grid.
pub fn potential(grid: &FieldGrid<f64>, spec: &HamiltonianSpec) -> Result<Vec<f64>, FieldError> {
    let (half_phi2, phi4) = potential_terms(grid, spec)?;
    Ok(half_phi2
        .iter()
        .zip(&phi4)
        .map(|(a, b)| a + spec.lambda / 24.0 * b)
        .collect())
}

pub const DENSE_LIMIT: u32 = 10;

pub fn build_hamiltonian(grid: &FieldGrid<f64>, spec: &HamiltonianSpec) -> Result<DMatrix<f64>, FieldError> {
    if grid.n_qubits > DENSE_LIMIT {
        return Err(FieldError::TooLarge(grid.n_qubits));
    }
    let mut h = pi_squared_operator(grid) * 0.5;
    for (j, v) in potential(grid, spec)?.into_iter().enumerate() {
        h[(j, j)] += v;
    }
    Ok(h)
}

/// Ascending eigenvalues.
pub fn eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Largest-magnitude amplitude made positive.
pub fn fix_phase(v: &mut [f64]) {
    let peak = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if peak < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

pub fn ground_state(h: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(h.clone());
    let (i, e) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty matrix");
    let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
    fix_phase(&mut v);
    (e, v)
}

/// Matrix-free H = ½Π̂² + V for large registers.
pub struct SparseHamiltonian {
    pub basis: MomentumBasis,
    pub potential: Vec<f64>,
}

impl SparseHamiltonian {
    pub fn new(grid: &FieldGrid<f64>, spec: &HamiltonianSpec) -> Result<Self, FieldError> {
        Ok(Self { basis: MomentumBasis::new(grid), potential: potential(grid, spec)? })
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.basis.half_pi_squared_real(x, out);
        out.iter_mut()
            .zip(x.iter().zip(&self.potential))
            .for_each(|(o, (xi, v))| *o += v * xi);
    }

    /// Solve (H - σ) y = b by conjugate gradients preconditioned with
    /// (½Π̂² + 1)^{-1}, which is exact in momentum space.
    fn solve_shifted(&self, sigma: f64, b: &[f64], y: &mut [f64], tol: f64) {
        let n = b.len();
        let apply = |x: &[f64], out: &mut [f64]| {
            self.apply(x, out);
            out.iter_mut().zip(x).for_each(|(o, xi)| *o -= sigma * xi);
        };
        let precond = |r: &[f64], z: &mut [f64]| {
            let mut buf: Vec<Complex64> = r.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            self.basis
                .apply_momentum_diag(&mut buf, |p2| Complex64::new(1.0 / (0.5 * p2 + 1.0), 0.0));
            z.iter_mut().zip(&buf).for_each(|(zi, c)| *zi = c.re);
        };
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut ay = vec![0.0; n];
        apply(y, &mut ay);
        let mut r: Vec<f64> = b.iter().zip(&ay).map(|(bi, ai)| bi - ai).collect();
        let mut z = vec![0.0; n];
        precond(&r, &mut z);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let bnorm = dot(b, b).sqrt();
        let mut ap = vec![0.0; n];
        for _ in 0..10 * n {
            if dot(&r, &r).sqrt() <= tol * bnorm {
                break;
            }
            apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            y.iter_mut().zip(&p).for_each(|(yi, pi)| *yi += alpha * pi);
            r.iter_mut().zip(&ap).for_each(|(ri, a)| *ri -= alpha * a);
            precond(&r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
    }

    /// Upper bound on ‖H‖: largest kinetic plus largest potential entry.
    pub fn norm_bound(&self) -> f64 {
        let kin = self.basis.pi_squared().iter().copied().fold(0.0, f64::max) / 2.0;
        kin + self.potential.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Lowest eigenpair by shifted inverse iteration. The shift sits below
    /// min V, so H - σ is positive definite. Converged once
    /// ‖Hx - ex‖ ≤ `residual_tol`·‖H‖; an absolute target would sit below
    /// rounding noise at 12 qubits, where ‖H‖ ≈ 1e6.
    pub fn ground_state(&self, residual_tol: f64) -> Result<(f64, Vec<f64>), FieldError> {
        let n = self.potential.len();
        let target = residual_tol * self.norm_bound();
        let vmin = self.potential.iter().copied().fold(f64::INFINITY, f64::min);
        let sigma = vmin - 1.0;
        // Start from the lowest potential well, smeared.
        let mut x: Vec<f64> = self.potential.iter().map(|v| (-(v - vmin)).exp()).collect();
        normalize(&mut x);
        let mut hx = vec![0.0; n];
        let mut residual = f64::INFINITY;
        for it in 0..200 {
            let mut y = x.clone();
            self.solve_shifted(sigma, &x.clone(), &mut y, 1e-14);
            normalize(&mut y);
            x = y;
            self.apply(&x, &mut hx);
            let e: f64 = x.iter().zip(&hx).map(|(a, b)| a * b).sum();
            residual = hx.iter().zip(&x).map(|(h, xi)| (h - e * xi).powi(2)).sum::<f64>().sqrt();
            if residual <= target {
                fix_phase(&mut x);
                return Ok((e, x));
            }
            if it > 0 && !residual.is_finite() {
                break;
            }
        }
        Err(FieldError::NoConvergence { residual, iterations: 200 })
    }
}

fn normalize(x: &mut [f64]) {
    let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= s);
}

/// Largest register diagonalized densely by [`solve_ground_state`].
pub const DENSE_GROUND_LIMIT: u32 = 8;

/// Residual target for the iterative path, relative to ‖H‖.
pub const ITERATIVE_RESIDUAL: f64 = 1e-10;

/// Ground state of `spec`, choosing the dense or iterative path by size.
pub fn solve_ground_state(grid: &FieldGrid<f64>, spec: &HamiltonianSpec) -> Result<(f64, Vec<f64>), FieldError> {
    if grid.n_qubits <= DENSE_GROUND_LIMIT {
        Ok(ground_state(&build_hamiltonian(grid, spec)?))
    } else {
        SparseHamiltonian::new(grid, spec)?.ground_state(ITERATIVE_RESIDUAL)
    }
}

/// Physicists' Hermite polynomial H_n(x).
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * x);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let c = 2.0 * x * b - 2.0 * k as f64 * a;
        a = b;
        b = c;
    }
    b
}

/// Continuum oscillator eigenfunction sampled on the grid, unit norm.
pub fn analytic_ho_state(n: usize, grid: &FieldGrid<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = grid
        .values
        .iter()
        .map(|&x| hermite(n, x) * (-x * x / 2.0).exp())
        .collect();
    normalize(&mut v);
    v
}
