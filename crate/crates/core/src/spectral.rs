//! Periodic grids and Fourier differentiation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Samples of a complex function at `x_j = j L / n`, `j = 0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub period: f64,
    pub samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(period: f64, samples: Vec<Complex64>) -> Result<Self> {
        let n = samples.len();
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridMismatch(format!(
                "sample count must be a power of two >= 8, got {n}"
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::GridMismatch(format!("period must be positive, got {period}")));
        }
        if samples.iter().any(|c| !c.is_finite()) {
            return Err(Error::GridMismatch("non-finite sample".into()));
        }
        Ok(Self { period, samples })
    }

    pub fn from_real(period: f64, samples: &[f64]) -> Result<Self> {
        Self::new(period, samples.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn sample<F: Fn(f64) -> Complex64>(period: f64, n: usize, f: F) -> Result<Self> {
        let h = period / n as f64;
        Self::new(period, (0..n).map(|j| f(j as f64 * h)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        let h = self.period / self.len() as f64;
        (0..self.len()).map(|j| j as f64 * h).collect()
    }

    pub fn re(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.re).collect()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len() && (self.period - other.period).abs() <= 1e-14 * self.period
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "n={} L={} vs n={} L={}",
                self.len(),
                self.period,
                other.len(),
                other.period
            )))
        }
    }

    /// Fourier derivative of the given order.
    pub fn derivative(&self, order: u32) -> Self {
        Self {
            period: self.period,
            samples: spectral_derivative(&self.samples, self.period, order),
        }
    }

    /// Relative energy in the upper third of the spectrum. Smooth periodic
    /// data decays fast; a jump at the wrap point leaves an algebraic tail.
    pub fn spectral_tail(&self) -> f64 {
        let coeffs = fft(&self.samples, false);
        let n = coeffs.len();
        let total: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let tail: f64 = coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| 3 * wavenumber(*j, n).unsigned_abs() as usize > n)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        (tail / total).sqrt()
    }

    pub fn check_periodic(&self, tol: f64) -> Result<()> {
        let tail = self.spectral_tail();
        if tail > tol {
            Err(Error::NotPeriodic(tail))
        } else {
            Ok(())
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Trapezoid mean over one period.
    pub fn mean(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() / self.len() as f64
    }
}

fn wavenumber(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn fft(data: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    let mut buf = data.to_vec();
    plan.process(&mut buf);
    buf
}

/// `d^order/dx^order` of periodic samples on `[0, period)`. The Nyquist
/// mode is dropped for odd orders so that real data stays real.
pub fn spectral_derivative(samples: &[Complex64], period: f64, order: u32) -> Vec<Complex64> {
    if order == 0 {
        return samples.to_vec();
    }
    let n = samples.len();
    let mut coeffs = fft(samples, false);
    let base = TAU / period;
    for (j, c) in coeffs.iter_mut().enumerate() {
        let kw = wavenumber(j, n);
        if order % 2 == 1 && n % 2 == 0 && j == n / 2 {
            *c = Complex64::new(0.0, 0.0);
            continue;
        }
        let ik = Complex64::new(0.0, base * kw as f64);
        *c *= ik.powu(order);
    }
    let scale = 1.0 / n as f64;
    fft(&coeffs, true).into_iter().map(|c| c * scale).collect()
}

/// Real-valued convenience wrapper.
pub fn derivative_real(samples: &[f64], period: f64, order: u32) -> Vec<f64> {
    let c: Vec<Complex64> = samples.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    spectral_derivative(&c, period, order).into_iter().map(|c| c.re).collect()
}

/// Zero-mean periodic antiderivative. Fails if the integrand mean exceeds
/// `mean_tol` in absolute value, since no periodic antiderivative exists then.
pub fn antiderivative_zero_mean(
    samples: &[f64],
    period: f64,
    entry: &'static str,
    mean_tol: f64,
) -> Result<Vec<f64>> {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let scale = samples.iter().map(|v| v.abs()).fold(1.0, f64::max);
    if mean.abs() > mean_tol * scale {
        return Err(Error::NonZeroMean { entry, mean });
    }
    let c: Vec<Complex64> = samples.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    let mut coeffs = fft(&c, false);
    let base = TAU / period;
    for (j, c) in coeffs.iter_mut().enumerate() {
        let kw = wavenumber(j, n);
        if kw == 0 || (n % 2 == 0 && j == n / 2) {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c /= Complex64::new(0.0, base * kw as f64);
        }
    }
    let inv = 1.0 / n as f64;
    Ok(fft(&coeffs, true).into_iter().map(|c| c.re * inv).collect())
}
