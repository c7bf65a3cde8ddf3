use std::f64::consts::TAU;

use super::{CircleForm, ZeroSet};
use crate::error::{Error, Result};
use crate::trig::angle_diff;

/// An orientation-preserving diffeomorphism of the circle, stored as a lift
/// `γ: R → R` with `γ(t + 2π) = γ(t) + 2π`.
///
/// Values and slopes live on the uniform grid `s_j = 2πj/M` and are joined by
/// cubic Hermite pieces; slopes are limited so every piece stays monotone.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleDiffeo {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CircleDiffeo {
    pub fn new(values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        let m = values.len();
        if m < 4 || slopes.len() != m {
            return Err(Error::InvalidInput(format!(
                "circle map needs matching value/slope arrays of length >= 4 (got {} and {})",
                m,
                slopes.len()
            )));
        }
        if values.iter().chain(&slopes).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite circle map sample".into()));
        }
        for j in 0..m {
            let next = if j + 1 < m { values[j + 1] } else { values[0] + TAU };
            if next <= values[j] {
                return Err(Error::NotMonotone(format!("samples {j} and {}", (j + 1) % m)));
            }
            if slopes[j] <= 0.0 {
                return Err(Error::NotMonotone(format!("slope at sample {j} is {}", slopes[j])));
            }
        }
        let mut map = CircleDiffeo { values, slopes };
        map.limit_slopes();
        Ok(map)
    }

    /// Values only; slopes from the periodic Fritsch-Butland estimate.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        if m < 4 {
            return Err(Error::InvalidInput("circle map needs at least 4 samples".into()));
        }
        let h = TAU / m as f64;
        let secant = |j: usize| {
            let next = if j + 1 < m { values[j + 1] } else { values[0] + TAU };
            (next - values[j]) / h
        };
        let slopes = (0..m)
            .map(|j| {
                let (a, b) = (secant((j + m - 1) % m), secant(j));
                if a <= 0.0 || b <= 0.0 {
                    0.0
                } else {
                    2.0 * a * b / (a + b)
                }
            })
            .collect();
        Self::new(values, slopes)
    }

    pub fn from_fn<F, D>(f: F, df: D, m: usize) -> Result<Self>
    where
        F: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        let grid = (0..m).map(|j| TAU * j as f64 / m as f64);
        let (values, slopes) = grid.map(|s| (f(s), df(s))).unzip();
        Self::new(values, slopes)
    }

    pub fn identity(m: usize) -> Self {
        Self::rotation(0.0, m)
    }

    pub fn rotation(angle: f64, m: usize) -> Self {
        Self::from_fn(|t| t + angle, |_| 1.0, m).expect("rigid rotation is monotone")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    fn step(&self) -> f64 {
        TAU / self.len() as f64
    }

    // Fritsch-Carlson: α² + β² ≤ 9 on every piece keeps the cubic monotone.
    fn limit_slopes(&mut self) {
        let m = self.len();
        let h = self.step();
        for j in 0..m {
            let k = (j + 1) % m;
            let next = if j + 1 < m { self.values[j + 1] } else { self.values[0] + TAU };
            let delta = (next - self.values[j]) / h;
            let a = self.slopes[j] / delta;
            let b = self.slopes[k] / delta;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                self.slopes[j] = tau * a * delta;
                self.slopes[k] = tau * b * delta;
            }
        }
    }

    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let turns = (t / TAU).floor();
        let r = t - turns * TAU;
        let h = self.step();
        let j = ((r / h).floor() as usize).min(self.len() - 1);
        let x = ((r - j as f64 * h) / h).clamp(0.0, 1.0);
        (j, x, turns * TAU)
    }

    fn piece(&self, j: usize) -> (f64, f64, f64, f64) {
        let m = self.len();
        let y1 = if j + 1 < m { self.values[j + 1] } else { self.values[0] + TAU };
        (self.values[j], y1, self.slopes[j], self.slopes[(j + 1) % m])
    }

    fn hermite(&self, j: usize, x: f64) -> f64 {
        let (y0, y1, d0, d1) = self.piece(j);
        let h = self.step();
        let x2 = x * x;
        let x3 = x2 * x;
        (2.0 * x3 - 3.0 * x2 + 1.0) * y0
            + (x3 - 2.0 * x2 + x) * h * d0
            + (-2.0 * x3 + 3.0 * x2) * y1
            + (x3 - x2) * h * d1
    }

    fn hermite_slope(&self, j: usize, x: f64) -> f64 {
        let (y0, y1, d0, d1) = self.piece(j);
        let h = self.step();
        let x2 = x * x;
        (6.0 * x2 - 6.0 * x) * (y0 - y1) / h + (3.0 * x2 - 4.0 * x + 1.0) * d0 + (3.0 * x2 - 2.0 * x) * d1
    }

    /// `γ(t)` on the lift.
    pub fn eval(&self, t: f64) -> f64 {
        let (j, x, offset) = self.locate(t);
        self.hermite(j, x) + offset
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (j, x, _) = self.locate(t);
        self.hermite_slope(j, x)
    }

    /// `γ⁻¹(s)` on the lift.
    pub fn inverse_eval(&self, s: f64) -> f64 {
        let base = self.values[0];
        let turns = ((s - base) / TAU).floor();
        let r = s - turns * TAU;
        let j = self.values.partition_point(|&v| v <= r).saturating_sub(1);
        let (mut lo, mut hi) = (0.0, 1.0);
        let (y0, y1, _, _) = self.piece(j);
        let mut x = ((r - y0) / (y1 - y0)).clamp(0.0, 1.0);
        let h = self.step();
        for _ in 0..100 {
            let g = self.hermite(j, x) - r;
            if g == 0.0 {
                break;
            }
            if g < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.hermite_slope(j, x) * h;
            let mut next = x - g / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            let done = (next - x).abs() < 1e-16 || hi - lo < 1e-16;
            x = next;
            if done {
                break;
            }
        }
        j as f64 * h + x * h + turns * TAU
    }

    /// The inverse map sampled on a grid of the same size.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.len();
        let h = self.step();
        let values: Vec<f64> = (0..m).map(|j| self.inverse_eval(h * j as f64)).collect();
        let slopes = values.iter().map(|&t| 1.0 / self.derivative(t)).collect();
        Self::new(values, slopes)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &CircleDiffeo) -> Result<Self> {
        let (values, slopes) = inner
            .values
            .iter()
            .zip(&inner.slopes)
            .map(|(&v, &d)| (self.eval(v), self.derivative(v) * d))
            .unzip();
        Self::new(values, slopes)
    }

    /// `γ^n(t)` by repeated evaluation.
    pub fn iterate(&self, t: f64, n: usize) -> f64 {
        (0..n).fold(t, |acc, _| self.eval(acc))
    }

    /// `j` with `γ(t_i) = t_{i+j}` for all zeros, if such a shift exists.
    pub fn zero_shift(&self, zeros: &ZeroSet, tol: f64) -> Option<usize> {
        let z = &zeros.zeros;
        let k = z.len();
        let image = self.eval(z[0]);
        let j = (0..k).min_by(|&a, &b| {
            angle_diff(image, z[a]).abs().total_cmp(&angle_diff(image, z[b]).abs())
        })?;
        (0..k)
            .all(|i| angle_diff(self.eval(z[i]), z[(i + j) % k]).abs() <= tol)
            .then_some(j)
    }

    /// Pullback `γ*β = (β∘γ)·γ'` sampled on `n` points.
    pub fn pullback(&self, form: &CircleForm, n: usize) -> Result<CircleForm> {
        CircleForm::sampled_from_fn(|t| form.eval(self.eval(t)) * self.derivative(t), n)
    }

    /// Pushforward `γ_*β = (β∘γ⁻¹)·(γ⁻¹)'` sampled on `n` points.
    pub fn pushforward(&self, form: &CircleForm, n: usize) -> Result<CircleForm> {
        CircleForm::sampled_from_fn(
            |s| {
                let t = self.inverse_eval(s);
                form.eval(t) / self.derivative(t)
            },
            n,
        )
    }

    /// Sup over `n` uniform points of the angular distance to `other`.
    pub fn sup_distance<F: Fn(f64) -> f64>(&self, other: F, n: usize) -> f64 {
        (0..n)
            .map(|j| {
                let t = TAU * (j as f64 + 0.5) / n as f64;
                angle_diff(self.eval(t), other(t)).abs()
            })
            .fold(0.0, f64::max)
    }
}
