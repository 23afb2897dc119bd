//! Linear stabilizer magic of pure states.
//!
//! c_P = ⟨ψ|P|ψ⟩ for P = i^{|x∧z|} X^x Z^z, so Y = iXZ. For a fixed x-mask
//! the z-dependence is a Walsh-Hadamard transform of conj(ψ_{j⊕x})ψ_j, which
//! brings the full 4^n sum down to O(4^n · n).

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::FieldGrid;
use crate::walsh::{self, fwht_in_place, WalshError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MagicError {
    #[error("Pauli mask {mask:#x} exceeds {n_qubits} qubits")]
    MaskTooWide { mask: usize, n_qubits: u32 },
    #[error("{n_qubits} qubits needs ~{cost:.1e} operations; limit is {limit} qubits")]
    TooLarge { n_qubits: u32, cost: f64, limit: u32 },
    #[error(transparent)]
    Walsh(#[from] WalshError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x_mask: usize,
    pub z_mask: usize,
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn register_qubits(state: &[Complex64]) -> Result<u32, MagicError> {
    Ok(walsh::qubits_for_len(state.len())?)
}

pub fn pauli_expectation(state: &[Complex64], p: PauliString) -> Result<f64, MagicError> {
    let n = register_qubits(state)?;
    for mask in [p.x_mask, p.z_mask] {
        if mask >> n != 0 {
            return Err(MagicError::MaskTooWide { mask, n_qubits: n });
        }
    }
    let sum: Complex64 = state
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let s = if (p.z_mask & j).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            state[j ^ p.x_mask].conj() * a * s
        })
        .sum();
    Ok((sum * i_pow((p.x_mask & p.z_mask).count_ones())).re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicReport {
    pub m_lin: f64,
    pub d: usize,
    /// Σ_P c_P²/d; 1 for any normalized pure state.
    pub sum_xi: f64,
    pub n_nonzero: usize,
}

pub const MAX_MAGIC_QUBITS: u32 = 10;

const NONZERO: f64 = 1e-12;

pub fn linear_magic(state: &[Complex64]) -> Result<MagicReport, MagicError> {
    let n = register_qubits(state)?;
    if n > MAX_MAGIC_QUBITS {
        return Err(MagicError::TooLarge {
            n_qubits: n,
            cost: 8f64.powi(n as i32),
            limit: MAX_MAGIC_QUBITS,
        });
    }
    let d = state.len();
    let (sum2, sum4, nonzero) = (0..d)
        .into_par_iter()
        .map(|x| {
            let mut v: Vec<Complex64> = (0..d).map(|j| state[j ^ x].conj() * state[j]).collect();
            fwht_in_place(&mut v);
            // |i^k| = 1, so the phase drops out of |c_P|.
            v.iter().fold((0.0, 0.0, 0usize), |(s2, s4, nz), c| {
                let m = c.norm_sqr();
                (s2 + m, s4 + m * m, nz + usize::from(m.sqrt() > NONZERO))
            })
        })
        .reduce(|| (0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let df = d as f64;
    Ok(MagicReport { m_lin: 1.0 - sum4 / df, d, sum_xi: sum2 / df, n_nonzero: nonzero })
}

/// exp(-(φ-φ₀)²/(4σ²)) on the grid, unit norm.
pub fn gaussian_state(sigma: f64, center: f64, grid: &FieldGrid<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = grid
        .values
        .iter()
        .map(|x| (-(x - center).powi(2) / (4.0 * sigma * sigma)).exp())
        .collect();
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Magic of the renormalized state kept up to each sequency cutoff.
pub fn truncated_magic_profile(state: &[f64], nu_cuts: &[usize]) -> Result<BTreeMap<usize, f64>, MagicError> {
    let spec = walsh::decompose_state(state)?;
    nu_cuts
        .iter()
        .map(|&cut| {
            let kept = walsh::reconstruct_state(&walsh::truncate(&spec, cut, false))?;
            let psi: Vec<Complex64> = kept.iter().map(|&a| Complex64::new(a, 0.0)).collect();
            Ok((cut, linear_magic(&psi)?.m_lin))
        })
        .collect()
}
