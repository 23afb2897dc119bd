//! Analytic ceilings on Walsh coefficients of monomials and power series.
//!
//! Everything reduces to x_ν, the position of the last sign change of the
//! ν-th Walsh function on [-x_M, x_M].

use num_traits::Float;
use thiserror::Error;

use crate::field::{phi_power_operator, FieldError, FieldGrid};
use crate::walsh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("sequency 0 has no level crossing")]
    NoCrossing,
    #[error("sequency {nu} out of range for {n_qubits} qubits")]
    OutOfRange { nu: usize, n_qubits: u32 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn octave(nu: usize) -> u32 {
    usize::BITS - 1 - nu.leading_zeros()
}

/// x_ν = x_M (1 - 2^{-⌊log₂ν⌋}).
pub fn last_crossing<T: Float>(nu: usize, x_max: T) -> Result<T, BoundError> {
    if nu == 0 {
        return Err(BoundError::NoCrossing);
    }
    Ok(x_max * (T::one() - T::from(0.5).unwrap().powi(octave(nu) as i32)))
}

/// Leading run of equal entries in the ν-th Walsh row: 2^{n-1-⌊log₂ν⌋}.
pub fn crossing_count_prefix(nu: usize, n_qubits: u32) -> Result<usize, BoundError> {
    if nu == 0 || n_qubits == 0 || n_qubits > walsh::MAX_QUBITS || nu >= 1usize << n_qubits {
        return Err(BoundError::OutOfRange { nu, n_qubits });
    }
    Ok(1usize << (n_qubits - 1 - octave(nu)))
}

fn same_parity(p: u32, nu: usize) -> bool {
    (p as usize % 2) == (nu % 2)
}

/// Normalized ceiling B̃_ν for x^p.
pub fn monomial_bound<T: Float>(p: u32, nu: usize) -> T {
    if nu == 0 {
        return if p.is_multiple_of(2) { T::one() } else { T::zero() };
    }
    if !same_parity(p, nu) {
        return T::zero();
    }
    let r = T::one() - T::from(0.5).unwrap().powi(octave(nu) as i32);
    T::one() - r.powi(p as i32 + 1)
}

/// Reference scale for the ν = 0 coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Divide by the digitized β₀; ν = 0 is exactly 1.
    #[default]
    Discrete,
    /// Divide by the continuum average x_M^p/(p+1).
    Continuum,
}

/// β̃_ν for all ν of the digitized x^p on n_qubits.
pub fn normalized_coefficients<T: Float>(
    p: u32,
    x_max: T,
    n_qubits: u32,
    norm: Normalization,
) -> Result<Vec<T>, BoundError> {
    let grid = FieldGrid::new(n_qubits, x_max)?;
    let spec = walsh::decompose(&phi_power_operator(&grid, p as i32)).map_err(FieldError::from)?;
    let scale = match norm {
        Normalization::Discrete => spec.get(0),
        Normalization::Continuum => x_max.powi(p as i32) / T::from(p + 1).unwrap(),
    };
    Ok((0..1usize << n_qubits).map(|nu| spec.get(nu) / scale).collect())
}

pub fn normalized_coefficient<T: Float>(
    p: u32,
    nu: usize,
    x_max: T,
    n_qubits: u32,
) -> Result<T, BoundError> {
    if n_qubits == 0 || n_qubits > walsh::MAX_QUBITS || nu >= 1usize << n_qubits {
        return Err(BoundError::OutOfRange { nu, n_qubits });
    }
    Ok(normalized_coefficients(p, x_max, n_qubits, Normalization::Discrete)?[nu])
}

/// 𝒩_p = (p+1)/(2 x_M^{p+1}).
pub fn monomial_norm<T: Float>(p: u32, x_max: T) -> T {
    T::from(p + 1).unwrap() / (T::from(2.0).unwrap() * x_max.powi(p as i32 + 1))
}

/// Σ_p |a_p| B̃_ν^{(p)} / 𝒩_p, a ceiling on |∫ F Θ_ν dx| over [-x_M, x_M].
pub fn series_bound<T: Float>(coeffs: &[(u32, T)], nu: usize, x_max: T) -> T {
    coeffs.iter().fold(T::zero(), |acc, &(p, a)| {
        acc + a.abs() * monomial_bound::<T>(p, nu) / monomial_norm(p, x_max)
    })
}

/// One row of a bound table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEntry<T> {
    pub nu: usize,
    pub coeff: T,
    pub bound: T,
}

/// β̃_ν and B̃_ν for the even sequencies of x^p (odd ones vanish for even p).
pub fn bound_profile<T: Float>(
    p: u32,
    x_max: T,
    n_qubits: u32,
    norm: Normalization,
) -> Result<Vec<BoundEntry<T>>, BoundError> {
    let coeffs = normalized_coefficients(p, x_max, n_qubits, norm)?;
    Ok(coeffs
        .iter()
        .enumerate()
        .filter(|(nu, _)| same_parity(p, *nu))
        .map(|(nu, &coeff)| BoundEntry { nu, coeff, bound: monomial_bound(p, nu) })
        .collect())
}
