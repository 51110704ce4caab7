//! Special functions and spectral transforms.
//!
//! Everything here is a pure function of its inputs.

mod bessel;
mod convolve;
mod dft;
mod fresnel;

pub use bessel::{bessel_j, bessel_j_sequence};
pub use convolve::{convolve_full, IndexedSequence};
pub use dft::{dft, dft_direct, dft_in_place};
pub use fresnel::fresnel;

use num_complex::Complex64;
use std::ops::Deref;

use crate::error::{Error, Result};

/// A non-empty sequence of finite complex samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSequence(Vec<Complex64>);

impl ComplexSequence {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("complex sequence must be non-empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample at index {i}")));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    /// Mean of `|x|^2` over all samples.
    pub fn mean_power(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.0.len() as f64
    }
}

impl Deref for ComplexSequence {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl TryFrom<Vec<Complex64>> for ComplexSequence {
    type Error = Error;

    fn try_from(values: Vec<Complex64>) -> Result<Self> {
        Self::new(values)
    }
}
