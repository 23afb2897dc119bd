//! Sequency-ordered Walsh basis.
//!
//! A mask bit at position `n - q` marks qubit `q`, so qubit 1 is the most
//! significant bit of the computational index and a mask printed as an
//! `n`-digit binary string reads q1..qn from left to right.

use std::collections::BTreeMap;

use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalshError {
    #[error("sequency {nu} out of range for {n_qubits} qubits")]
    NuOutOfRange { nu: usize, n_qubits: u32 },
    #[error("mask {mask:#x} does not fit in {n_qubits} qubits")]
    MaskOutOfRange { mask: usize, n_qubits: u32 },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("every surviving coefficient is zero")]
    DegenerateTruncation,
}

/// Largest register handled anywhere in the crate; keeps shifts in range.
pub const MAX_QUBITS: u32 = 30;

fn check_nu(nu: usize, n_qubits: u32) -> Result<(), WalshError> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS || nu >= 1usize << n_qubits {
        return Err(WalshError::NuOutOfRange { nu, n_qubits });
    }
    Ok(())
}

fn reverse_bits(x: usize, n_qubits: u32) -> usize {
    if n_qubits == 0 {
        return 0;
    }
    x.reverse_bits() >> (usize::BITS - n_qubits)
}

/// Bit-reversed Gray code of `nu`.
pub fn sequency_to_zmask(nu: usize, n_qubits: u32) -> Result<usize, WalshError> {
    check_nu(nu, n_qubits)?;
    Ok(reverse_bits(nu ^ (nu >> 1), n_qubits))
}

pub fn zmask_to_sequency(mask: usize, n_qubits: u32) -> Result<usize, WalshError> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS || mask >= 1usize << n_qubits {
        return Err(WalshError::MaskOutOfRange { mask, n_qubits });
    }
    let mut g = reverse_bits(mask, n_qubits);
    let mut nu = 0;
    while g != 0 {
        nu ^= g;
        g >>= 1;
    }
    Ok(nu)
}

/// Qubit labels (1-based) carrying a Z in `mask`.
pub fn mask_qubits(mask: usize, n_qubits: u32) -> Vec<u32> {
    (1..=n_qubits)
        .filter(|q| mask >> (n_qubits - q) & 1 == 1)
        .collect()
}

/// Tensor-product label such as `IIZIZ`.
pub fn mask_label(mask: usize, n_qubits: u32) -> String {
    (1..=n_qubits)
        .map(|q| if mask >> (n_qubits - q) & 1 == 1 { 'Z' } else { 'I' })
        .collect()
}

/// One Walsh basis operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SequencyOp {
    pub nu: usize,
    pub n_qubits: u32,
    pub z_mask: usize,
}

impl SequencyOp {
    pub fn new(nu: usize, n_qubits: u32) -> Result<Self, WalshError> {
        let z_mask = sequency_to_zmask(nu, n_qubits)?;
        Ok(Self { nu, n_qubits, z_mask })
    }

    pub fn weight(&self) -> u32 {
        self.z_mask.count_ones()
    }

    pub fn qubits(&self) -> Vec<u32> {
        mask_qubits(self.z_mask, self.n_qubits)
    }

    pub fn label(&self) -> String {
        mask_label(self.z_mask, self.n_qubits)
    }

    /// Diagonal sign at computational index `j`.
    pub fn sign(&self, j: usize) -> i8 {
        if (j & self.z_mask).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

pub fn walsh_row<T: Float>(nu: usize, n_qubits: u32) -> Result<Vec<T>, WalshError> {
    let op = SequencyOp::new(nu, n_qubits)?;
    Ok((0..1usize << n_qubits)
        .map(|j| if op.sign(j) > 0 { T::one() } else { -T::one() })
        .collect())
}

/// Number of sign changes along a vector, ignoring exact zeros.
pub fn sign_changes<T: Float>(v: &[T]) -> usize {
    let mut prev: Option<bool> = None;
    let mut count = 0;
    for x in v {
        if x.is_zero() {
            continue;
        }
        let pos = x.is_sign_positive();
        if prev.is_some_and(|p| p != pos) {
            count += 1;
        }
        prev = Some(pos);
    }
    count
}

/// Unnormalized Walsh-Hadamard transform in natural (mask) order.
pub(crate) fn fwht_in_place<T>(v: &mut [T])
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

pub(crate) fn qubits_for_len(len: usize) -> Result<u32, WalshError> {
    if len < 2 || !len.is_power_of_two() || len.trailing_zeros() > MAX_QUBITS {
        return Err(WalshError::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros())
}

/// Sparse map from sequency to coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct WalshSpectrum<T> {
    pub n_qubits: u32,
    pub coefficients: BTreeMap<usize, T>,
}

impl<T: Float> WalshSpectrum<T> {
    pub fn new(n_qubits: u32) -> Self {
        Self { n_qubits, coefficients: BTreeMap::new() }
    }

    pub fn get(&self, nu: usize) -> T {
        self.coefficients.get(&nu).copied().unwrap_or_else(T::zero)
    }

    pub fn max_abs(&self) -> T {
        self.coefficients
            .values()
            .fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Entries whose magnitude is at least `rel` times the largest one.
    pub fn significant(&self, rel: T) -> impl Iterator<Item = (usize, T)> + '_ {
        let cut = rel * self.max_abs();
        self.coefficients
            .iter()
            .filter(move |(_, c)| c.abs() >= cut && !c.is_zero())
            .map(|(&nu, &c)| (nu, c))
    }

    /// Each entry with its operator; masks never fail for a spectrum
    /// produced by this module.
    pub fn ops(&self) -> impl Iterator<Item = (SequencyOp, T)> + '_ {
        self.coefficients.iter().map(|(&nu, &c)| {
            (SequencyOp::new(nu, self.n_qubits).expect("nu in range"), c)
        })
    }
}

fn check_len<T>(v: &[T]) -> Result<u32, WalshError> {
    if v.len() == 1 {
        return Err(WalshError::NotPowerOfTwo(1));
    }
    qubits_for_len(v.len())
}

/// β_ν = 2^{-n} Σ_j d_j · row_ν(j), computed with one fast transform.
pub fn decompose<T: Float>(diag: &[T]) -> Result<WalshSpectrum<T>, WalshError> {
    let n_qubits = check_len(diag)?;
    let mut h = diag.to_vec();
    fwht_in_place(&mut h);
    let scale = T::from(h.len()).unwrap().recip();
    let mut spec = WalshSpectrum::new(n_qubits);
    for nu in 0..h.len() {
        let mask = sequency_to_zmask(nu, n_qubits)?;
        spec.coefficients.insert(nu, h[mask] * scale);
    }
    Ok(spec)
}

pub fn truncate<T: Float>(
    spec: &WalshSpectrum<T>,
    nu_cut: usize,
    drop_identity: bool,
) -> WalshSpectrum<T> {
    WalshSpectrum {
        n_qubits: spec.n_qubits,
        coefficients: spec
            .coefficients
            .iter()
            .filter(|(&nu, _)| nu <= nu_cut && !(drop_identity && nu == 0))
            .map(|(&nu, &c)| (nu, c))
            .collect(),
    }
}

pub fn reconstruct<T: Float>(spec: &WalshSpectrum<T>) -> Result<Vec<T>, WalshError> {
    let len = 1usize << spec.n_qubits;
    let mut h = vec![T::zero(); len];
    for (&nu, &c) in &spec.coefficients {
        h[sequency_to_zmask(nu, spec.n_qubits)?] = c;
    }
    fwht_in_place(&mut h);
    Ok(h)
}

/// Sequency coefficients α_ν of a real-amplitude state.
pub fn decompose_state<T: Float>(state: &[T]) -> Result<WalshSpectrum<T>, WalshError> {
    decompose(state)
}

/// Inverse of [`decompose_state`], renormalized to unit norm.
pub fn reconstruct_state<T: Float>(spec: &WalshSpectrum<T>) -> Result<Vec<T>, WalshError> {
    let mut v = reconstruct(spec)?;
    let norm = v.iter().fold(T::zero(), |s, x| s + *x * *x).sqrt();
    if norm.is_zero() {
        return Err(WalshError::DegenerateTruncation);
    }
    v.iter_mut().for_each(|x| *x = *x / norm);
    Ok(v)
}

/// `reconstruct(truncate(decompose(diag)))` in one call.
pub fn truncated_diagonal<T: Float>(
    diag: &[T],
    nu_cut: usize,
    drop_identity: bool,
) -> Result<Vec<T>, WalshError> {
    reconstruct(&truncate(&decompose(diag)?, nu_cut, drop_identity))
}
