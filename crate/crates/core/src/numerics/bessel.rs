//! Bessel functions of the first kind, integer order.
//!
//! Small arguments (`|x| <= 1`) use the ascending power series. Everything
//! else runs Miller's backward recurrence from an order well past the
//! turning point, normalized with `J_0(x) + 2 * sum_k J_2k(x) = 1`.

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 1.0;
const MAX_ARG: f64 = 1.0e6;
const RESCALE_AT: f64 = 1.0e250;
const RESCALE_BY: f64 = 1.0e-250;

/// `J_order(x)` for any integer order.
///
/// Negative orders use `J_{-k}(x) = (-1)^k J_k(x)`, so the reflection
/// identity holds bit-for-bit.
pub fn bessel_j(order: i64, x: f64) -> Result<f64> {
    check_arg(x)?;
    let n = order.unsigned_abs();
    let value = if negligible(n, x.abs()) {
        0.0
    } else {
        let n = usize::try_from(n).map_err(|_| Error::Domain(format!("order {order} too large")))?;
        bessel_j_nonneg(n, x)
    };
    Ok(if order < 0 && n % 2 == 1 { -value } else { value })
}

/// `[J_0(x), J_1(x), ..., J_max_order(x)]` from a single recurrence sweep.
pub fn bessel_j_sequence(x: f64, max_order: usize) -> Result<Vec<f64>> {
    check_arg(x)?;
    let ax = x.abs();
    let mut out = if ax <= SERIES_LIMIT {
        (0..=max_order).map(|n| series(n, ax)).collect()
    } else {
        miller(ax, max_order)
    };
    if x < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
    Ok(out)
}

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j argument must be finite, got {x}")));
    }
    if x.abs() > MAX_ARG {
        return Err(Error::Domain(format!("bessel_j argument |{x}| exceeds {MAX_ARG:e}")));
    }
    Ok(())
}

/// True when `|J_n(x)| <= (e x / 2n)^n` is below the smallest normal double.
fn negligible(n: u64, ax: f64) -> bool {
    let n = n as f64;
    n > ax && n > 0.0 && n * (std::f64::consts::E * ax / (2.0 * n)).ln() < -745.0
}

fn bessel_j_nonneg(n: usize, x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        series(n, ax)
    } else {
        miller(ax, n)[n]
    };
    if x < 0.0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Ascending series `sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!)` for `0 <= x <= 1`.
fn series(n: usize, ax: f64) -> f64 {
    if ax == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * ax;
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= half / k as f64;
        if lead == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 {
            break;
        }
    }
    sum
}

/// Backward recurrence for `J_0..=J_max_order` at `ax > 0`.
fn miller(ax: f64, max_order: usize) -> Vec<f64> {
    let top = (max_order as f64).max(ax);
    // Past the turning point J_m decays like an Airy tail of width ~ax^(1/3).
    let mut start = (top + 30.0 + 12.0 * top.cbrt()).ceil() as usize;
    start += start % 2;

    let mut out = vec![0.0; max_order + 1];
    let two_over_x = 2.0 / ax;
    let mut above = 0.0; // J_{n+1}
    let mut current = 1.0e-30; // J_n, arbitrary scale
    let mut even_sum = 0.0;
    for n in (1..=start).rev() {
        if n <= max_order {
            out[n] = current;
        }
        if n % 2 == 0 {
            even_sum += current;
        }
        let below = n as f64 * two_over_x * current - above;
        above = current;
        current = below;
        if current.abs() > RESCALE_AT {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            even_sum *= RESCALE_BY;
            let hi = max_order.min(start);
            for v in out[n.min(hi + 1)..=hi].iter_mut() {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = current;
    let norm = current + 2.0 * even_sum;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}
