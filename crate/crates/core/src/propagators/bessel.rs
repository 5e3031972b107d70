//! Bessel functions of the first kind, `J_0 .. J_kmax`, by Miller's
//! downward recurrence normalized with `J_0 + 2 sum_k J_2k = 1`.

use crate::{Error, Result};

const MAX_ABS_TAU: f64 = 1e4;
const RESCALE_AT: f64 = 1e250;

/// Returns `[J_0(tau), ..., J_kmax(tau)]`.
pub fn bessel_j_sequence(tau: f64, k_max: usize) -> Result<Vec<f64>> {
    if !tau.is_finite() {
        return Err(Error::Usage(format!("Bessel argument must be finite, got {tau}")));
    }
    if tau.abs() >= MAX_ABS_TAU {
        return Err(Error::Usage(format!(
            "Bessel argument |{tau}| exceeds {MAX_ABS_TAU:e}"
        )));
    }
    let x = tau.abs();
    let mut out = if x == 0.0 {
        let mut v = vec![0.0; k_max + 1];
        v[0] = 1.0;
        v
    } else if x < 1e-5 {
        small_argument(x, k_max)
    } else {
        miller(x, k_max)
    };
    if tau < 0.0 {
        // J_k(-x) = (-1)^k J_k(x)
        out.iter_mut().skip(1).step_by(2).for_each(|j| *j = -*j);
    }
    Ok(out)
}

/// Two-term power series, exact to O(x^4) relative.
fn small_argument(x: f64, k_max: usize) -> Vec<f64> {
    let h = 0.5 * x;
    let mut lead = 1.0; // (x/2)^k / k!
    (0..=k_max)
        .map(|k| {
            if k > 0 {
                lead *= h / k as f64;
            }
            lead * (1.0 - h * h / (k as f64 + 1.0))
        })
        .collect()
}

fn miller(x: f64, k_max: usize) -> Vec<f64> {
    let order = (k_max as f64).max(x);
    // Start well above both the requested order and the argument.
    let mut start = (order + 20.0 + (40.0 * order).sqrt()) as usize;
    start += start % 2;

    let mut vals = vec![0.0; start + 2];
    let mut above = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k, arbitrary seed
    vals[start] = cur;
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * cur - above;
        above = cur;
        cur = below;
        vals[k - 1] = cur;
        if cur.abs() > RESCALE_AT {
            let inv = 1.0 / cur.abs();
            for v in &mut vals[k - 1..] {
                *v *= inv;
            }
            above *= inv;
            cur *= inv;
        }
    }
    // Normalization sum, accumulated from small to large terms.
    let mut sum = 0.0;
    let mut k = start;
    while k >= 2 {
        sum += 2.0 * vals[k];
        k -= 2;
    }
    sum += vals[0];
    let inv = 1.0 / sum;
    vals.truncate(k_max + 1);
    vals.iter_mut().for_each(|v| *v *= inv);
    vals
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `J_k(x) = (1/pi) int_0^pi cos(k t - x sin t) dt`; the trapezoidal rule
    /// on this periodic integrand converges geometrically.
    fn bessel_by_quadrature(k: usize, x: f64) -> f64 {
        let n = 2048;
        let h = PI / n as f64;
        let f = |t: f64| (k as f64 * t - x * t.sin()).cos();
        let mut s = 0.5 * (f(0.0) + f(PI));
        for i in 1..n {
            s += f(i as f64 * h);
        }
        s * h / PI
    }

    fn j0_power_series(x: f64) -> f64 {
        let q = -(x * x) / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..60 {
            term *= q / (m as f64 * m as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn zero_argument_is_kronecker_delta() {
        let j = bessel_j_sequence(0.0, 5).unwrap();
        assert_eq!(j, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn j0_of_one() {
        let want = j0_power_series(1.0);
        assert!((want - 0.7651976865579666).abs() < 1e-16);
        let j = bessel_j_sequence(1.0, 10).unwrap();
        assert!((j[0] - want).abs() < 1e-15);
    }

    #[test]
    fn matches_quadrature_oracle() {
        for &x in &[1e-3, 0.3, 1.0, 2.5, 7.0, 18.0, 42.0, 120.0] {
            let j = bessel_j_sequence(x, 60).unwrap();
            for (k, &jk) in j.iter().enumerate() {
                let want = bessel_by_quadrature(k, x);
                assert!((jk - want).abs() < 1e-13, "J_{k}({x}) = {jk}, oracle {want}");
            }
        }
    }

    #[test]
    fn normalization_identity() {
        for i in 1..100 {
            let x = i as f64 * 0.1;
            let j = bessel_j_sequence(x, 80).unwrap();
            let s = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_argument_parity() {
        let p = bessel_j_sequence(3.3, 12).unwrap();
        let m = bessel_j_sequence(-3.3, 12).unwrap();
        for k in 0..=12 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(m[k], sign * p[k]);
        }
    }

    #[test]
    fn large_argument_stays_accurate() {
        let j = bessel_j_sequence(5000.0, 3).unwrap();
        for k in 0..=3 {
            // asymptotic form is good to ~1e-8 here; use quadrature instead
            let n = 20000;
            let h = PI / n as f64;
            let f = |t: f64| (k as f64 * t - 5000.0 * t.sin()).cos();
            let mut s = 0.5 * (f(0.0) + f(PI));
            for i in 1..n {
                s += f(i as f64 * h);
            }
            assert!((j[k] - s * h / PI).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(bessel_j_sequence(f64::NAN, 3).is_err());
        assert!(bessel_j_sequence(2e4, 3).is_err());
    }
}
