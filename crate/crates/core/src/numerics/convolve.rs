//! Linear convolution of sequences that carry an integer start index.

use num_complex::Complex64;

use super::dft::dft_in_place;

/// Finite sequence whose first element sits at integer index `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedSequence {
    pub start: i64,
    pub values: Vec<Complex64>,
}

impl IndexedSequence {
    pub fn new(start: i64, values: Vec<Complex64>) -> Self {
        Self { start, values }
    }

    /// Unit impulse at index 0.
    pub fn delta() -> Self {
        Self::new(0, vec![Complex64::new(1.0, 0.0)])
    }

    /// Last occupied index (inclusive). Only meaningful for non-empty sequences.
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    /// Value at index `k`, zero outside the stored support.
    pub fn get(&self, k: i64) -> Complex64 {
        let off = k - self.start;
        if off < 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.values.get(off as usize).copied().unwrap_or_default()
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

// Below this many multiply-adds the direct sum beats three FFTs.
const DIRECT_LIMIT: usize = 4096;

/// Aperiodic convolution. The result starts at `a.start + b.start` and has
/// `len(a) + len(b) - 1` samples (empty if either input is empty).
pub fn convolve_full(a: &IndexedSequence, b: &IndexedSequence) -> IndexedSequence {
    let start = a.start + b.start;
    if a.values.is_empty() || b.values.is_empty() {
        return IndexedSequence::new(start, Vec::new());
    }
    let out_len = a.values.len() + b.values.len() - 1;
    let values = if a.values.len().min(b.values.len()) == 1
        || a.values.len() * b.values.len() <= DIRECT_LIMIT
    {
        direct(&a.values, &b.values, out_len)
    } else {
        via_fft(&a.values, &b.values, out_len)
    };
    IndexedSequence::new(start, values)
}

fn direct(a: &[Complex64], b: &[Complex64], out_len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for (i, &x) in a.iter().enumerate() {
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

fn via_fft(a: &[Complex64], b: &[Complex64], out_len: usize) -> Vec<Complex64> {
    let size = out_len.next_power_of_two();
    let mut fa = a.to_vec();
    fa.resize(size, Complex64::new(0.0, 0.0));
    let mut fb = b.to_vec();
    fb.resize(size, Complex64::new(0.0, 0.0));
    dft_in_place(&mut fa, false);
    dft_in_place(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    dft_in_place(&mut fa, true);
    fa.truncate(out_len);
    fa
}
