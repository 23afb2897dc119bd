//! Sequency hierarchy truncation for a digitized scalar field.

pub mod circuit;
pub mod evolution;
pub mod field;
pub mod hierarchy;
pub mod magic;
pub mod walsh;

pub use num_complex::Complex64;

pub type FieldGrid = field::FieldGrid<f64>;
pub type WalshSpectrum = walsh::WalshSpectrum<f64>;
pub type StateVector = Vec<Complex64>;
