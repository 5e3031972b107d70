//! Time-step bounds under which the `k`-th Hermite or Laguerre term decays,
//! given an energy cutoff `e_m` (a few times the energy of the state).

use crate::{Error, Result};

fn check(e_m: f64, k: usize) -> Result<()> {
    if !(e_m >= 0.0 && e_m.is_finite()) {
        return Err(Error::Usage(format!("E_m must be finite and >= 0, got {e_m}")));
    }
    if k == 0 {
        return Err(Error::Usage("k must be >= 1".into()));
    }
    Ok(())
}

/// `sqrt(k/e) * lambda * exp(-lambda^2 e_m^2 / (2k))`.
pub fn suggest_dt_hermite(e_m: f64, k: usize, lambda: f64) -> Result<f64> {
    check(e_m, k)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Usage(format!("lambda must be > 0, got {lambda}")));
    }
    let k = k as f64;
    Ok((k / std::f64::consts::E).sqrt() * lambda * (-(lambda * e_m).powi(2) / (2.0 * k)).exp())
}

/// `[exp((e_m + ln 2) / k) - 1]^(-1/2)`.
pub fn suggest_dt_laguerre(e_m: f64, k: usize) -> Result<f64> {
    check(e_m, k)?;
    let x = (e_m + std::f64::consts::LN_2) / k as f64;
    Ok(1.0 / x.exp_m1().sqrt())
}
