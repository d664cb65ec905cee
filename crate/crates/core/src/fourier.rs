//! Fourier analysis on the unit circle.
//!
//! Coefficients follow the normalization c(k) = (1/2pi) * integral of
//! e^{-ik theta} f(theta) d theta, so c(0) is the mean of the signal. Grid
//! analysis is the trapezoidal rule on equispaced nodes theta_j = 2 pi j / M,
//! which is spectrally accurate for smooth periodic functions and exact for
//! band-limited ones below the grid Nyquist frequency.

use crate::error::{Error, Result};
use crate::fft;
use crate::tol;
use num_complex::Complex64;
use serde_json::{json, Value};

/// A smooth real 2pi-periodic function held as Hermitian-symmetric Fourier
/// coefficients, together with the grid it was analyzed on.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySignal {
    order: usize,
    /// c(k) at index k + order, k = -order..=order.
    coeffs: Vec<Complex64>,
    grid_size: usize,
}

/// Equispaced angles theta_j = 2 pi j / m.
pub fn grid_angles(m: usize) -> Vec<f64> {
    let step = std::f64::consts::TAU / m as f64;
    (0..m).map(|j| j as f64 * step).collect()
}

impl BoundarySignal {
    /// Trapezoidal-rule Fourier analysis of real samples at M equispaced nodes.
    ///
    /// Requires M >= 2*order + 2 so the requested band sits strictly below the
    /// grid Nyquist frequency. Hermitian symmetry is enforced by averaging
    /// c(k) with conj(c(-k)).
    pub fn analyze(samples: &[f64], order: usize) -> Result<Self> {
        let m = samples.len();
        let min = 2 * order + 2;
        if m < min {
            return Err(Error::TruncationOrder { grid: m, order, min });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("non-finite sample".into()));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut buf);
        let scale = 1.0 / m as f64;
        let mut coeffs = vec![Complex64::ZERO; 2 * order + 1];
        for k in 0..=order {
            let pos = buf[k] * scale;
            let neg = if k == 0 { pos } else { buf[m - k] * scale };
            // one averaged value keeps c(-k) = conj(c(k)) exact
            let avg = 0.5 * (pos + neg.conj());
            coeffs[order + k] = avg;
            coeffs[order - k] = avg.conj();
        }
        coeffs[order] = Complex64::new(coeffs[order].re, 0.0);
        Ok(Self { order, coeffs, grid_size: m })
    }

    /// Build from explicit coefficients c(-order)..c(order); validates and then
    /// exactly symmetrizes the stored values.
    pub fn from_coeffs(coeffs: Vec<Complex64>, grid_size: usize) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::Parse("coefficient vector must have odd length".into()));
        }
        let order = coeffs.len() / 2;
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut max_dev = 0.0f64;
        for k in 0..=order {
            let dev = (coeffs[order + k].conj() - coeffs[order - k]).norm();
            max_dev = max_dev.max(dev);
        }
        if max_dev > tol::ZERO_REL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SymmetryViolation { max_dev, scale });
        }
        let mut sym = vec![Complex64::ZERO; 2 * order + 1];
        for k in 0..=order {
            let avg = 0.5 * (coeffs[order + k] + coeffs[order - k].conj());
            sym[order + k] = avg;
            sym[order - k] = avg.conj();
        }
        sym[order] = Complex64::new(sym[order].re, 0.0);
        let min_grid = 2 * order + 2;
        Ok(Self { order, coeffs: sym, grid_size: grid_size.max(min_grid) })
    }

    /// Constant signal.
    pub fn constant(value: f64, grid_size: usize) -> Self {
        Self { order: 0, coeffs: vec![Complex64::new(value, 0.0)], grid_size: grid_size.max(2) }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// c(k); zero outside the stored band.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.order as i64;
        if k < -n || k > n {
            Complex64::ZERO
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Mean value c(0).
    pub fn mean(&self) -> f64 {
        self.coeff(0).re
    }

    fn check_hermitian(&self) -> Result<()> {
        let scale = self.max_abs_coeff().max(f64::MIN_POSITIVE);
        let mut max_dev = 0.0f64;
        for k in 0..=self.order {
            let dev = (self.coeffs[self.order + k].conj() - self.coeffs[self.order - k]).norm();
            max_dev = max_dev.max(dev);
        }
        if max_dev > tol::ZERO_REL * scale {
            return Err(Error::SymmetryViolation { max_dev, scale });
        }
        Ok(())
    }

    /// Evaluate sum_k c(k) e^{ik theta} at arbitrary angles. The imaginary
    /// residue must stay below ZERO_REL times the value scale.
    pub fn synthesize(&self, thetas: &[f64]) -> Result<Vec<f64>> {
        self.check_hermitian()?;
        let mut out = Vec::with_capacity(thetas.len());
        let mut max_im = 0.0f64;
        let mut max_val = 0.0f64;
        for &theta in thetas {
            let mut acc = self.coeffs[self.order];
            for k in 1..=self.order {
                let (s, c) = (k as f64 * theta).sin_cos();
                let e = Complex64::new(c, s);
                acc += self.coeffs[self.order + k] * e + self.coeffs[self.order - k] * e.conj();
            }
            max_im = max_im.max(acc.im.abs());
            max_val = max_val.max(acc.norm());
            out.push(acc.re);
        }
        let tolerance = tol::ZERO_REL * max_val.max(self.max_abs_coeff()).max(1e-300);
        if max_im > tolerance {
            return Err(Error::ImaginaryResidue { residue: max_im, tolerance });
        }
        Ok(out)
    }

    /// Evaluate on the equispaced m-grid via inverse FFT (exact for the stored
    /// band when m >= 2*order + 2).
    pub fn synthesize_grid(&self, m: usize) -> Result<Vec<f64>> {
        let min = 2 * self.order + 2;
        if m < min {
            return Err(Error::TruncationOrder { grid: m, order: self.order, min });
        }
        self.check_hermitian()?;
        let mut buf = vec![Complex64::ZERO; m];
        buf[0] = self.coeffs[self.order];
        for k in 1..=self.order {
            buf[k] = self.coeffs[self.order + k];
            buf[m - k] = self.coeffs[self.order - k];
        }
        fft::inverse(&mut buf);
        Ok(buf.into_iter().map(|c| c.re).collect())
    }

    /// Pointwise product, computed on a common alias-free grid and re-analyzed.
    /// Exact to round-off for band-limited inputs.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let out_order = self.order + other.order;
        let m = fft::good_len(2 * out_order + 2).max(4);
        let a = self.synthesize_grid(m)?;
        let b = other.synthesize_grid(m)?;
        let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Self::analyze(&prod, out_order)
    }

    /// Spectral derivative: c(k) -> ik c(k).
    pub fn derivative(&self) -> Self {
        let n = self.order as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| Complex64::new(0.0, (idx as i64 - n) as f64) * c)
            .collect();
        Self { order: self.order, coeffs, grid_size: self.grid_size }
    }

    /// max |c(k)| over k0 <= |k| <= order.
    pub fn tail_max(&self, k0: usize) -> Result<f64> {
        if k0 == 0 || k0 > self.order {
            return Err(Error::Window { window: k0, order: self.order, limit: self.order });
        }
        let mut max = 0.0f64;
        for k in k0..=self.order {
            max = max.max(self.coeffs[self.order + k].norm());
            max = max.max(self.coeffs[self.order - k].norm());
        }
        Ok(max)
    }

    /// sum_k |c(k)|^2 (equals the grid mean of f^2 for band-limited f).
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// JSON export: array of [k, re, im] triples sorted by k.
    pub fn to_json(&self) -> Value {
        let n = self.order as i64;
        let triples: Vec<Value> = (-n..=n)
            .map(|k| {
                let c = self.coeff(k);
                json!([k, c.re, c.im])
            })
            .collect();
        Value::Array(triples)
    }

    /// Inverse of [`to_json`].
    pub fn from_json(value: &Value, grid_size: usize) -> Result<Self> {
        let arr = value.as_array().ok_or_else(|| Error::Parse("expected array".into()))?;
        if arr.is_empty() {
            return Err(Error::Parse("empty coefficient array".into()));
        }
        let mut entries = Vec::with_capacity(arr.len());
        for item in arr {
            let triple = item.as_array().filter(|t| t.len() == 3).ok_or_else(|| {
                Error::Parse("expected [k, re, im] triple".into())
            })?;
            let k = triple[0].as_i64().ok_or_else(|| Error::Parse("bad k".into()))?;
            let re = triple[1].as_f64().ok_or_else(|| Error::Parse("bad re".into()))?;
            let im = triple[2].as_f64().ok_or_else(|| Error::Parse("bad im".into()))?;
            entries.push((k, Complex64::new(re, im)));
        }
        entries.sort_by_key(|e| e.0);
        let order = entries.iter().map(|e| e.0.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::ZERO; 2 * order + 1];
        for (k, c) in entries {
            coeffs[(k + order as i64) as usize] = c;
        }
        Self::from_coeffs(coeffs, grid_size)
    }
}
