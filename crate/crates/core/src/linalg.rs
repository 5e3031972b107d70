//! Complex state vectors and the Hermitian-operator contract shared by the
//! propagators and the model Hamiltonians.
//!
//! Amplitudes are stored as a contiguous `Vec<Complex64>`, i.e. interleaved
//! `(re, im)` pairs. Inner products are conjugate-linear in the first
//! argument. All reductions run sequentially in index order, so results do
//! not depend on the thread count.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Normalization tolerance for states treated as unit vectors.
pub const NORMALIZED_TOL: f64 = 1e-12;

/// Dimensions below this are applied on the calling thread.
pub(crate) const PAR_THRESHOLD: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amp: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amp: Vec<Complex64>) -> Result<Self> {
        if amp.is_empty() {
            return Err(Error::Usage("state vector must have dim >= 1".into()));
        }
        if let Some(i) = amp.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Usage(format!("amplitude {i} is not finite")));
        }
        Ok(Self { amp })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "state vector must have dim >= 1");
        Self { amp: vec![ZERO; dim] }
    }

    /// The computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = Self::zeros(dim);
        v.amp[index] = Complex64::new(1.0, 0.0);
        v
    }

    /// A normalized vector with i.i.d. complex Gaussian amplitudes
    /// (uniform on the unit sphere).
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let amp: Vec<Complex64> = (0..dim)
                .map(|_| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                })
                .collect();
            if let Ok(v) = normalize(&Self { amp }) {
                return v;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.amp
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amp).sqrt()
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amp.iter_mut().for_each(|z| *z *= factor);
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: Complex64, other: &StateVector) -> Result<StateVector> {
        check_dims(self.dim(), other.dim())?;
        let amp = self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a + factor * b)
            .collect();
        Ok(StateVector { amp })
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.amp[i]
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Usage(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// `<a, b> = sum_i conj(a_i) b_i`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    check_dims(a.dim(), b.dim())?;
    Ok(dot(&a.amp, &b.amp))
}

pub fn norm(v: &StateVector) -> f64 {
    v.norm()
}

pub fn normalize(v: &StateVector) -> Result<StateVector> {
    let n = v.norm();
    if n < 1e-300 {
        return Err(Error::Degenerate("cannot normalize a zero vector".into()));
    }
    let inv = 1.0 / n;
    Ok(StateVector {
        amp: v.amp.iter().map(|z| z * inv).collect(),
    })
}

/// `Re <v, H v>`, rejecting operators whose diagonal element has a
/// non-negligible imaginary part.
pub fn expectation<H: HermitianOperator + ?Sized>(h: &H, v: &StateVector) -> Result<f64> {
    check_dims(h.dim(), v.dim())?;
    let mut hv = vec![ZERO; v.dim()];
    h.apply_into(v.as_slice(), &mut hv);
    let e = dot(v.as_slice(), &hv);
    if e.im.abs() > 1e-10 * (1.0 + e.re.abs()) {
        return Err(Error::OperatorContract(format!(
            "<v|H|v> has imaginary part {:.3e}",
            e.im
        )));
    }
    Ok(e.re)
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

pub(crate) fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// A Hamiltonian known through its action on vectors.
///
/// `apply_into` must be linear and Hermitian. Implementations may
/// parallelize internally but each output element must be computed in a
/// fixed order so results are reproducible.
pub trait HermitianOperator: Sync {
    fn dim(&self) -> usize;

    /// Writes `H x` into `out`; both slices have length `dim()`.
    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]);

    /// An analytic upper bound on `max |E|` over the spectrum, if the model
    /// knows one.
    fn spectral_radius_bound(&self) -> Option<f64> {
        None
    }

    /// The explicit matrix, for operators that store one.
    fn dense(&self) -> Option<&DenseHermitian> {
        None
    }

    fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_dims(self.dim(), v.dim())?;
        let mut out = StateVector::zeros(v.dim());
        self.apply_into(v.as_slice(), out.as_mut_slice());
        Ok(out)
    }
}

impl<T: HermitianOperator + ?Sized> HermitianOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        (**self).apply_into(x, out)
    }
    fn spectral_radius_bound(&self) -> Option<f64> {
        (**self).spectral_radius_bound()
    }
    fn dense(&self) -> Option<&DenseHermitian> {
        (**self).dense()
    }
}

/// Checks `H(aX + bY) = aHX + bHY` on random vectors, to `tol` relative to
/// the size of the right-hand side.
pub fn check_linearity<H, R>(h: &H, trials: usize, tol: f64, rng: &mut R) -> Result<()>
where
    H: HermitianOperator + ?Sized,
    R: Rng + ?Sized,
{
    let n = h.dim();
    for _ in 0..trials {
        let x = StateVector::random(n, rng);
        let y = StateVector::random(n, rng);
        let a = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let b = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let combo = StateVector {
            amp: x.amp.iter().zip(&y.amp).map(|(p, q)| a * p + b * q).collect(),
        };
        let lhs = h.apply(&combo)?;
        let hx = h.apply(&x)?;
        let hy = h.apply(&y)?;
        let rhs = StateVector {
            amp: hx.amp.iter().zip(&hy.amp).map(|(p, q)| a * p + b * q).collect(),
        };
        let err = lhs.distance(&rhs)?;
        if err > tol * rhs.norm().max(1.0) {
            return Err(Error::OperatorContract(format!(
                "linearity violated by {err:.3e}"
            )));
        }
    }
    Ok(())
}

/// Checks `<X, HY> = conj(<Y, HX>)` on random vectors.
pub fn check_hermiticity<H, R>(h: &H, trials: usize, tol: f64, rng: &mut R) -> Result<()>
where
    H: HermitianOperator + ?Sized,
    R: Rng + ?Sized,
{
    let n = h.dim();
    for _ in 0..trials {
        let x = StateVector::random(n, rng);
        let y = StateVector::random(n, rng);
        let xhy = inner_product(&x, &h.apply(&y)?)?;
        let yhx = inner_product(&y, &h.apply(&x)?)?;
        let err = (xhy - yhx.conj()).norm();
        if err > tol * xhy.norm().max(1.0) {
            return Err(Error::OperatorContract(format!(
                "Hermiticity violated by {err:.3e}"
            )));
        }
    }
    Ok(())
}

/// An explicitly stored Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHermitian {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseHermitian {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::Usage(format!(
                "expected {n}x{n} entries, got {}",
                data.len()
            )));
        }
        let scale = data.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        for i in 0..n {
            for j in i..n {
                let d = (data[i * n + j] - data[j * n + i].conj()).norm();
                if d > 1e-12 * scale {
                    return Err(Error::OperatorContract(format!(
                        "matrix not Hermitian at ({i}, {j}): mismatch {d:.3e}"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::new(n, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut data = vec![ZERO; n * n];
        for (i, &d) in diag.iter().enumerate() {
            data[i * n + i] = Complex64::new(d, 0.0);
        }
        Self { n, data }
    }

    /// Materializes any operator by applying it to every basis vector.
    pub fn from_operator<H: HermitianOperator + ?Sized>(h: &H) -> Result<Self> {
        let n = h.dim();
        let mut data = vec![ZERO; n * n];
        let mut e = vec![ZERO; n];
        let mut col = vec![ZERO; n];
        for j in 0..n {
            e[j] = Complex64::new(1.0, 0.0);
            h.apply_into(&e, &mut col);
            e[j] = ZERO;
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
        Self::new(n, data)
    }

    /// A random Hermitian matrix with entries uniform in [-1, 1].
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                data[i * n + j] = z;
                data[j * n + i] = z.conj();
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn gershgorin_radius(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl HermitianOperator for DenseHermitian {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        let row_dot = |(i, o): (usize, &mut Complex64)| {
            *o = self
                .row(i)
                .iter()
                .zip(x)
                .fold(ZERO, |acc, (a, b)| acc + a * b);
        };
        if self.n * self.n >= PAR_THRESHOLD * 16 {
            out.par_iter_mut().enumerate().for_each(row_dot);
        } else {
            out.iter_mut().enumerate().for_each(row_dot);
        }
    }

    fn dense(&self) -> Option<&DenseHermitian> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_product_basis_cases() {
        let e1 = StateVector::basis(2, 0);
        let e2 = StateVector::basis(2, 1);
        assert_eq!(inner_product(&e1, &e1).unwrap(), c(1.0, 0.0));
        assert_eq!(inner_product(&e1, &e2).unwrap(), c(0.0, 0.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = StateVector::new(vec![c(s, 0.0), c(0.0, s)]).unwrap();
        let b = StateVector::new(vec![c(s, 0.0), c(0.0, -s)]).unwrap();
        assert_abs_diff_eq!(inner_product(&a, &b).unwrap().norm(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn inner_product_rejects_mismatched_dims() {
        let r = inner_product(&StateVector::basis(2, 0), &StateVector::basis(3, 0));
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn norm_and_normalize() {
        let v = StateVector::new(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert_eq!(norm(&v), 5.0);
        let u = normalize(&v).unwrap();
        assert_abs_diff_eq!(u[0].re, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(u[1].im, 0.8, epsilon = 1e-15);
        assert!((u.norm() - 1.0).abs() <= 1e-14);
        let zero = StateVector::zeros(2);
        assert!(matches!(normalize(&zero), Err(Error::Degenerate(_))));
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(StateVector::new(vec![]).is_err());
        assert!(StateVector::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn expectation_of_diagonal() {
        let h = DenseHermitian::diagonal(&[1.0, 2.0]);
        assert_eq!(expectation(&h, &StateVector::basis(2, 0)).unwrap(), 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = StateVector::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        assert_abs_diff_eq!(expectation(&h, &v).unwrap(), 1.5, epsilon = 1e-15);
    }

    struct AntiHermitian;
    impl HermitianOperator for AntiHermitian {
        fn dim(&self) -> usize {
            1
        }
        fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
            out[0] = c(0.0, 1.0) * x[0];
        }
    }

    #[test]
    fn expectation_detects_non_hermitian() {
        let r = expectation(&AntiHermitian, &StateVector::basis(1, 0));
        assert!(matches!(r, Err(Error::OperatorContract(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(check_hermiticity(&AntiHermitian, 3, 1e-12, &mut rng).is_err());
    }

    #[test]
    fn dense_rejects_non_hermitian() {
        let r = DenseHermitian::from_real(2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(matches!(r, Err(Error::OperatorContract(_))));
    }

    #[test]
    fn gershgorin_of_pauli_x() {
        let h = DenseHermitian::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(h.gershgorin_radius(), 1.0);
    }

    #[test]
    fn dense_round_trips_through_from_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = DenseHermitian::random(6, &mut rng);
        assert_eq!(DenseHermitian::from_operator(&h).unwrap(), h);
        check_linearity(&h, 20, 1e-12, &mut rng).unwrap();
        check_hermiticity(&h, 20, 1e-12, &mut rng).unwrap();
    }

    proptest! {
        #[test]
        fn inner_product_is_conjugate_symmetric(seed in any::<u64>(), dim in 1usize..32) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = StateVector::random(dim, &mut rng);
            let b = StateVector::random(dim, &mut rng);
            let ab = inner_product(&a, &b).unwrap();
            let ba = inner_product(&b, &a).unwrap();
            prop_assert!((ab - ba.conj()).norm() < 1e-14);
        }

        #[test]
        fn expectation_ignores_global_phase(seed in any::<u64>(), theta in -3.2f64..3.2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = DenseHermitian::random(8, &mut rng);
            let v = StateVector::random(8, &mut rng);
            let mut w = v.clone();
            w.scale(Complex64::from_polar(1.0, theta));
            let e1 = expectation(&h, &v).unwrap();
            let e2 = expectation(&h, &w).unwrap();
            prop_assert!((e1 - e2).abs() <= 1e-12);
        }
    }
}
