//! Time series of observables and dominant-period estimation.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Rows of `(t, values)` with a fixed set of named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    columns: Vec<String>,
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Appends a record; `t` must exceed the previous time and `values` must
    /// have one entry per column.
    pub fn push(&mut self, t: f64, values: Vec<f64>) -> Result<()> {
        if values.len() != self.columns.len() {
            return Err(Error::Usage(format!(
                "row has {} values, series has {} columns",
                values.len(),
                self.columns.len()
            )));
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::Usage(format!(
                    "time {t} does not exceed previous record {last}"
                )));
            }
        }
        self.times.push(t);
        self.values.push(values);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn row(&self, i: usize) -> (f64, &[f64]) {
        (self.times[i], &self.values[i])
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.times.iter().copied().zip(self.values.iter().map(Vec::as_slice))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Usage(format!("no column named {name:?}")))?;
        Ok(self.values.iter().map(|row| row[idx]).collect())
    }
}

const ZERO_PAD_FACTOR: usize = 16;
const PEAK_OVER_FLOOR: f64 = 5.0;

/// Dominant period of `field`, from the largest peak of the zero-padded
/// discrete Fourier transform of the mean-subtracted signal, refined by
/// parabolic interpolation over the three bins around the peak.
///
/// Samples must be uniformly spaced. Fails with [`Error::NoPeriod`] when the
/// peak does not exceed five times the median spectral magnitude.
pub fn estimate_period(series: &TimeSeries, field: &str) -> Result<f64> {
    let signal = series.column(field)?;
    let t = series.times();
    if t.len() < 4 {
        return Err(Error::NoPeriod(format!("only {} samples", t.len())));
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    for w in t.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
            return Err(Error::Usage("period estimation needs uniform sampling".into()));
        }
    }
    period_of_samples(&signal, dt)
}

pub(crate) fn period_of_samples(signal: &[f64], dt: f64) -> Result<f64> {
    let n = signal.len();
    let mean = signal.iter().sum::<f64>() / n as f64;
    let len = (n * ZERO_PAD_FACTOR).next_power_of_two();
    let mut buf: Vec<Complex64> = signal
        .iter()
        .map(|&x| Complex64::new(x - mean, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(len)
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mag: Vec<f64> = buf[..len / 2].iter().map(|z| z.norm()).collect();

    // Skip the DC lobe: with zero padding it spans ZERO_PAD_FACTOR bins.
    let first = (len / n).max(1);
    let (peak, &peak_mag) = mag
        .iter()
        .enumerate()
        .skip(first)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::NoPeriod("signal too short".into()))?;
    let mut sorted: Vec<f64> = mag[first..].to_vec();
    sorted.sort_by(f64::total_cmp);
    let floor = sorted[sorted.len() / 2];
    if !(peak_mag > PEAK_OVER_FLOOR * floor) || peak_mag == 0.0 {
        return Err(Error::NoPeriod(format!(
            "spectral peak {peak_mag:.3e} is not above {PEAK_OVER_FLOOR}x the noise floor {floor:.3e}"
        )));
    }
    let offset = if peak + 1 < mag.len() {
        let (a, b, c) = (mag[peak - 1], mag[peak], mag[peak + 1]);
        let denom = a - 2.0 * b + c;
        if denom != 0.0 {
            0.5 * (a - c) / denom
        } else {
            0.0
        }
    } else {
        0.0
    };
    let freq = (peak as f64 + offset) / (len as f64 * dt);
    Ok(1.0 / freq)
}
