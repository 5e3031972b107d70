//! Gauss–Hermite quadrature and normalized Hermite functions evaluated
//! without underflow far into the classically forbidden region.

use crate::{Error, Result};

/// A Hermite function value `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    /// `ln |value|`, or `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        if self.mantissa == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().ln() + self.log_scale
        }
    }

    pub fn value(self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum() * self.ln_abs().exp()
        }
    }
}

const RESCALE_AT: f64 = 1e100;

/// `psi_k(y)` for `k < n`, where `psi_k = H_k(y) e^{-y^2/2} / sqrt(2^k k! sqrt(pi))`.
pub fn hermite_functions(y: f64, n: usize) -> Vec<Scaled> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let mut ls = -0.5 * y * y;
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    out.push(Scaled { mantissa: cur, log_scale: ls });
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * y * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            let f = cur.abs();
            cur /= f;
            prev /= f;
            ls += f.ln();
        }
        out.push(Scaled { mantissa: cur, log_scale: ls });
    }
    out
}

/// Nodes `y_j` of the `m`-point rule for the weight `e^{-y^2}` together with
/// the modified weights `w_j e^{y_j^2}`, so that
/// `int f(y) dy ~ sum_j mw_j f(y_j)` for `f = poly * e^{-y^2}`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    /// `ln(w_j e^{y_j^2})`, kept in log form since it overflows for large `m`.
    pub ln_modified_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Usage("quadrature order must be positive".into()));
        }
        let mut nodes = tridiagonal_eigenvalues(m)?;
        for y in nodes.iter_mut() {
            *y = polish_node(*y, m);
        }
        nodes.sort_by(f64::total_cmp);
        // Christoffel: w_j e^{y_j^2} = 1 / sum_{k<m} psi_k(y_j)^2
        let ln_modified_weights = nodes
            .iter()
            .map(|&y| {
                let logs: Vec<f64> = hermite_functions(y, m).iter().map(|s| 2.0 * s.ln_abs()).collect();
                -log_sum_exp(&logs)
            })
            .collect();
        Ok(Self { nodes, ln_modified_weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Eigenvalues of the Jacobi matrix for Hermite polynomials (zero diagonal,
/// off-diagonal `sqrt(k/2)`), by implicit QL.
fn tridiagonal_eigenvalues(m: usize) -> Result<Vec<f64>> {
    let mut d = vec![0.0f64; m];
    let mut e: Vec<f64> = (1..m).map(|k| (k as f64 / 2.0).sqrt()).chain([0.0]).collect();
    for l in 0..m {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < m {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Eigensolver { sweeps: iter, off_norm: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = mm;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    Ok(d)
}

/// One or two Newton steps on `psi_m(y)`; the ratio `psi_m / psi_m'` is
/// independent of the Gaussian factor and of the log scale.
fn polish_node(y: f64, m: usize) -> f64 {
    let mut y = y;
    for _ in 0..2 {
        let h = hermite_functions(y, m + 1);
        let pm = h[m];
        let pm1 = h[m - 1];
        if pm.mantissa == 0.0 || pm1.mantissa == 0.0 {
            break;
        }
        // for the polynomial part p_m: p_m' = sqrt(2m) p_{m-1}
        let ratio = pm.mantissa / pm1.mantissa * (pm.log_scale - pm1.log_scale).exp();
        let step = ratio / (2.0 * m as f64).sqrt();
        if !step.is_finite() {
            break;
        }
        y -= step;
    }
    y
}
