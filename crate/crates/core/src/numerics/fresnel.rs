//! Fresnel integrals in the normalized convention
//!
//! ```text
//! C(x) = int_0^x cos(pi u^2 / 2) du,   S(x) = int_0^x sin(pi u^2 / 2) du
//! ```
//!
//! so that `C(inf) = S(inf) = 1/2`. For `|x| <= 1.5` both come from their
//! power series; above that from the continued fraction of the complementary
//! error function, `C + jS = (1+j)/2 * (1 - e^{j pi x^2/2} h(x))`, evaluated
//! with the modified Lentz method.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 1.5;
const EPS: f64 = 1.0e-16;
const TINY: f64 = 1.0e-300;
const MAX_ITER: usize = 500;

/// Returns `(C(x), S(x))`. Both are odd in `x`.
pub fn fresnel(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("fresnel argument must be finite, got {x}")));
    }
    let ax = x.abs();
    let (c, s) = if ax < 1.0e-150 {
        (ax, 0.0)
    } else if ax <= SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax)
    };
    Ok(if x < 0.0 { (-c, -s) } else { (c, s) })
}

fn series(ax: f64) -> (f64, f64) {
    // C = sum_k (-1)^k t^(2k) x / ((2k)! (4k+1)),  S = sum_k (-1)^k t^(2k+1) x / ((2k+1)! (4k+3))
    // with t = pi x^2 / 2; walk the shared factorial sequence once.
    let t = FRAC_PI_2 * ax * ax;
    let mut term = ax; // t^j x / j!
    let mut c = ax;
    let mut s = 0.0;
    let mut sign_c = 1.0;
    let mut sign_s = 1.0;
    for j in 1..MAX_ITER {
        term *= t / j as f64;
        let denom = (2 * j + 1) as f64;
        if j % 2 == 1 {
            s += sign_s * term / denom;
            sign_s = -sign_s;
        } else {
            sign_c = -sign_c;
            c += sign_c * term / denom;
        }
        if term < EPS * 0.1 * ax {
            break;
        }
    }
    (c, s)
}

fn continued_fraction(ax: f64) -> (f64, f64) {
    let pix2 = PI * ax * ax;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 1..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += Complex64::new(4.0, 0.0);
        d = (d * a + b).inv();
        cc = b + cc.inv() * a;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    h *= Complex64::new(ax, -ax);
    let phase = Complex64::from_polar(1.0, 0.5 * pix2);
    let cs = Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - phase * h);
    (cs.re, cs.im)
}
