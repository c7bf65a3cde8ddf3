//! Morse one-forms `β = β(t) dt` on the oriented circle, their zeros and
//! partial vorticities, and the cyclic symmetry of the vorticity profile.

mod diffeo;
mod transport;
mod zeros;

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::quadrature::{panels_for, GaussLegendre};
use crate::trig::{Jet, TrigSeries};

pub use diffeo::CircleDiffeo;
pub use transport::{cumulative, invert_cumulative, stabilizer_generator, transport_map};
pub use zeros::{find_zeros, find_zeros_with_tol, ZeroSet, DEFAULT_MORSE_TOL};

/// Default relative tolerance when comparing partial vorticities.
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    Trig,
    Samples,
}

/// A vorticity density on the parameter circle.
///
/// Sampled densities are interpolated by their band-limited (trigonometric)
/// interpolant, so both representations evaluate through a [`TrigSeries`].
#[derive(Debug, Clone, PartialEq)]
pub struct CircleForm {
    series: TrigSeries,
    samples: Option<Vec<f64>>,
}

impl CircleForm {
    /// `β(t) = a0 + Σ cos[j-1]·cos(jt) + sin[j-1]·sin(jt)`.
    pub fn trig(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if !a0.is_finite() || cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite trig coefficient".into()));
        }
        Ok(CircleForm {
            series: TrigSeries::new(a0, cos, sin),
            samples: None,
        })
    }

    pub fn from_series(series: TrigSeries) -> Self {
        CircleForm {
            series,
            samples: None,
        }
    }

    /// Uniform samples on `[0, 2π)`.
    pub fn from_samples(values: Vec<f64>) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::InvalidInput(format!(
                "sampled density needs at least 4 values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("sample {i} is not finite")));
        }
        Ok(CircleForm {
            series: TrigSeries::interpolate(&values),
            samples: Some(values),
        })
    }

    /// Samples `f` on `n` uniform points.
    pub fn sampled_from_fn<F: Fn(f64) -> f64>(f: F, n: usize) -> Result<Self> {
        Self::from_samples((0..n).map(|j| f(TAU * j as f64 / n as f64)).collect())
    }

    /// `β = dt`, the flat volume form.
    pub fn volume() -> Self {
        CircleForm::from_series(TrigSeries::constant(1.0))
    }

    pub fn kind(&self) -> FormKind {
        if self.samples.is_some() {
            FormKind::Samples
        } else {
            FormKind::Trig
        }
    }

    pub fn series(&self) -> &TrigSeries {
        &self.series
    }

    pub fn samples(&self) -> Option<&[f64]> {
        self.samples.as_deref()
    }

    pub fn degree(&self) -> usize {
        self.series.degree()
    }

    /// Quadrature/discretisation resolution attached to the form.
    pub fn resolution(&self) -> usize {
        match &self.samples {
            Some(v) => v.len(),
            None => (8 * self.degree()).max(64),
        }
    }

    pub(crate) fn scan_resolution(&self) -> usize {
        (8 * self.degree()).max(1024)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.series.eval(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.series.derivative(t)
    }

    pub fn jet(&self, t: f64) -> Jet {
        self.series.jet(t)
    }

    /// Total vorticity `∫_{S¹} β`.
    pub fn total(&self) -> f64 {
        self.series.period_integral()
    }

    /// `∫_a^b β` along the positive orientation (negative when `b < a`).
    ///
    /// Short intervals use a Gauss-Legendre panel so that integrals starting at
    /// a zero keep full relative accuracy; longer ones use the closed-form
    /// antiderivative.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let len = (b - a).abs();
        let degree = self.degree().max(1) as f64;
        let short = (20.0 / degree).min(0.25);
        if len <= short {
            GaussLegendre::standard().integrate(|t| self.eval(t), a, b)
        } else {
            self.series.antiderivative(b) - self.series.antiderivative(a)
        }
    }

    /// `∫_a^b β` by composite Gauss-Legendre quadrature only.
    pub fn quadrature(&self, a: f64, b: f64) -> f64 {
        let panels = panels_for(b - a, self.degree());
        GaussLegendre::standard().integrate_composite(|t| self.eval(t), a, b, panels)
    }

    /// Pullback under the reversal `t ↦ -t`: `β̃(t) = -β(-t)`. Paired with the
    /// reversed embedding it induces the same form on the image curve.
    pub fn reversed(&self) -> Self {
        let series = self.series.reflected().scaled(-1.0);
        match &self.samples {
            Some(v) => {
                let n = v.len();
                let values = (0..n).map(|j| -v[(n - j) % n]).collect();
                CircleForm {
                    series,
                    samples: Some(values),
                }
            }
            None => CircleForm::from_series(series),
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        CircleForm {
            series: self.series.scaled(k),
            samples: self
                .samples
                .as_ref()
                .map(|v| v.iter().map(|x| k * x).collect()),
        }
    }

    /// Values on the uniform grid of `n` points.
    pub fn grid_values(&self, n: usize) -> Vec<f64> {
        match &self.samples {
            Some(v) if v.len() == n => v.clone(),
            _ => self.series.sample(n),
        }
    }
}

/// Partial vorticities `ω_i = ∫_{t_i}^{t_{i+1}} β` with `t_{k+1} = t_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct VorticityProfile {
    pub omegas: Vec<f64>,
    pub total: f64,
}

impl VorticityProfile {
    /// Builds a profile from raw values, checking sign alternation.
    pub fn new(omegas: Vec<f64>) -> Result<Self> {
        check_alternation(&omegas)?;
        let total = omegas.iter().sum();
        Ok(VorticityProfile { omegas, total })
    }

    pub fn k(&self) -> usize {
        self.omegas.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.omegas.iter().fold(0.0, |m, w| m.max(w.abs()))
    }

    /// The profile started at segment `shift`.
    pub fn rotated(&self, shift: usize) -> Self {
        let k = self.k();
        VorticityProfile {
            omegas: (0..k).map(|i| self.omegas[(i + shift) % k]).collect(),
            total: self.total,
        }
    }
}

fn check_alternation(omegas: &[f64]) -> Result<()> {
    let k = omegas.len();
    if let Some(i) = omegas.iter().position(|w| *w == 0.0 || !w.is_finite()) {
        return Err(Error::AlternationViolation { index: i, value: omegas[i] });
    }
    for (i, &w) in omegas.iter().enumerate() {
        if k > 1 && w.signum() == omegas[(i + 1) % k].signum() {
            return Err(Error::AlternationViolation { index: i, value: w });
        }
    }
    Ok(())
}

/// Segment `i` of the zero set as a lifted interval `(t_i, t_{i+1})`.
pub fn segment(zeros: &ZeroSet, i: usize) -> (f64, f64) {
    let z = &zeros.zeros;
    let k = z.len();
    let i = i % k;
    if i + 1 < k {
        (z[i], z[i + 1])
    } else {
        (z[k - 1], z[0] + TAU)
    }
}

/// Partial vorticities of `form` between consecutive zeros.
pub fn partial_vorticities(form: &CircleForm, zeros: &ZeroSet) -> Result<VorticityProfile> {
    let k = zeros.len();
    if k == 0 {
        return Err(Error::NoZeros);
    }
    let omegas = (0..k)
        .map(|i| {
            let (a, b) = segment(zeros, i);
            form.integral(a, b)
        })
        .collect();
    VorticityProfile::new(omegas)
}

/// Smallest `ℓ` dividing `k` with `ω_i ≈ ω_{i+ℓ}` for all `i`.
pub fn symmetry_step(profile: &VorticityProfile, rel_tol: f64) -> usize {
    let w = &profile.omegas;
    let k = w.len();
    let scale = profile.max_abs();
    (1..=k)
        .filter(|l| k.is_multiple_of(*l))
        .find(|&l| (0..k).all(|i| (w[i] - w[(i + l) % k]).abs() <= rel_tol * scale))
        .unwrap_or(k)
}

/// A density that passed Morse validation, together with its zeros and profile.
#[derive(Debug, Clone, PartialEq)]
pub struct MorseForm {
    pub form: CircleForm,
    pub zeros: ZeroSet,
    pub profile: VorticityProfile,
}

impl MorseForm {
    pub fn new(form: CircleForm) -> Result<Self> {
        Self::with_tol(form, DEFAULT_MORSE_TOL)
    }

    pub fn with_tol(form: CircleForm, morse_tol: f64) -> Result<Self> {
        let zeros = find_zeros_with_tol(&form, morse_tol)?;
        let profile = partial_vorticities(&form, &zeros)?;
        Ok(MorseForm {
            form,
            zeros,
            profile,
        })
    }

    pub fn k(&self) -> usize {
        self.zeros.len()
    }

    pub fn segment(&self, i: usize) -> (f64, f64) {
        segment(&self.zeros, i)
    }

    pub fn step(&self, rel_tol: f64) -> usize {
        symmetry_step(&self.profile, rel_tol)
    }
}
