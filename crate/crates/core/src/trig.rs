//! Real trigonometric series on the circle `R / 2πZ` and band-limited
//! interpolation of uniformly sampled periodic data.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// `a0 + Σ_j cos[j-1]·cos(j t) + sin[j-1]·sin(j t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    pub a0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

// Harmonics are generated by rotation and re-anchored with a direct sin_cos
// every RESYNC steps so the recurrence error stays bounded.
const RESYNC: usize = 16;

fn for_each_harmonic<F: FnMut(usize, f64, f64)>(t: f64, degree: usize, mut f: F) {
    if degree == 0 {
        return;
    }
    let (s1, c1) = t.sin_cos();
    let (mut s, mut c) = (s1, c1);
    for j in 1..=degree {
        if j > 1 {
            if (j - 1) % RESYNC == 0 {
                let (sj, cj) = (j as f64 * t).sin_cos();
                s = sj;
                c = cj;
            } else {
                let cn = c * c1 - s * s1;
                let sn = s * c1 + c * s1;
                c = cn;
                s = sn;
            }
        }
        f(j, c, s);
    }
}

impl TrigSeries {
    pub fn new(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        TrigSeries { a0, cos, sin }
    }

    pub fn constant(a0: f64) -> Self {
        TrigSeries::new(a0, Vec::new(), Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// Highest harmonic whose coefficient is not negligible.
    pub fn effective_degree(&self, rel: f64) -> usize {
        let scale = self
            .cos
            .iter()
            .chain(&self.sin)
            .fold(self.a0.abs(), |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return 0;
        }
        (1..=self.degree())
            .rev()
            .find(|&j| self.coeff(j).0.abs().max(self.coeff(j).1.abs()) > rel * scale)
            .unwrap_or(0)
    }

    fn coeff(&self, j: usize) -> (f64, f64) {
        (
            self.cos.get(j - 1).copied().unwrap_or(0.0),
            self.sin.get(j - 1).copied().unwrap_or(0.0),
        )
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.a0;
        for_each_harmonic(t, self.degree(), |j, c, s| {
            let (a, b) = self.coeff(j);
            v += a * c + b * s;
        });
        v
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let mut v = 0.0;
        for_each_harmonic(t, self.degree(), |j, c, s| {
            let (a, b) = self.coeff(j);
            v += j as f64 * (b * c - a * s);
        });
        v
    }

    pub fn jet(&self, t: f64) -> Jet {
        let mut jet = Jet {
            value: self.a0,
            d1: 0.0,
            d2: 0.0,
        };
        for_each_harmonic(t, self.degree(), |j, c, s| {
            let (a, b) = self.coeff(j);
            let jf = j as f64;
            let even = a * c + b * s;
            jet.value += even;
            jet.d1 += jf * (b * c - a * s);
            jet.d2 -= jf * jf * even;
        });
        jet
    }

    /// Continuous antiderivative `a0·t + Σ (a_j sin jt − b_j cos jt)/j`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        let mut v = self.a0 * t;
        for_each_harmonic(t, self.degree(), |j, c, s| {
            let (a, b) = self.coeff(j);
            v += (a * s - b * c) / j as f64;
        });
        v
    }

    /// Integral over one full period.
    pub fn period_integral(&self) -> f64 {
        TAU * self.a0
    }

    /// Values on the uniform grid `2πj/n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.eval(TAU * j as f64 / n as f64)).collect()
    }

    /// Jets on the uniform grid `2πj/n`, by inverse FFT when `n > 2·degree`.
    pub fn sample_jets(&self, n: usize) -> Vec<Jet> {
        let degree = self.degree();
        if n <= 2 * degree {
            return (0..n).map(|j| self.jet(TAU * j as f64 / n as f64)).collect();
        }
        let mut spectra = vec![vec![Complex::new(0.0, 0.0); n]; 3];
        spectra[0][0] = Complex::new(self.a0, 0.0);
        for j in 1..=degree {
            let (a, b) = self.coeff(j);
            let c = Complex::new(0.5 * a, -0.5 * b);
            let k = j as f64;
            for (order, factor) in [Complex::new(1.0, 0.0), Complex::new(0.0, k), Complex::new(-k * k, 0.0)]
                .into_iter()
                .enumerate()
            {
                spectra[order][j] = c * factor;
                spectra[order][n - j] = (c * factor).conj();
            }
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_inverse(n);
        for s in spectra.iter_mut() {
            fft.process(s);
        }
        (0..n)
            .map(|m| Jet {
                value: spectra[0][m].re,
                d1: spectra[1][m].re,
                d2: spectra[2][m].re,
            })
            .collect()
    }

    /// Band-limited interpolant of uniform samples on `[0, 2π)`.
    pub fn interpolate(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n > 0, "cannot interpolate an empty sample set");
        let spectrum = forward_fft(values);
        let nf = n as f64;
        let a0 = spectrum[0].re / nf;
        let top = n / 2;
        let mut cos = Vec::with_capacity(top);
        let mut sin = Vec::with_capacity(top);
        for k in 1..=top {
            if 2 * k == n {
                cos.push(spectrum[k].re / nf);
                sin.push(0.0);
            } else {
                cos.push(2.0 * spectrum[k].re / nf);
                sin.push(-2.0 * spectrum[k].im / nf);
            }
        }
        TrigSeries { a0, cos, sin }
    }

    /// Series with `t ↦ -t` substituted.
    pub fn reflected(&self) -> Self {
        TrigSeries {
            a0: self.a0,
            cos: self.cos.clone(),
            sin: self.sin.iter().map(|b| -b).collect(),
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        TrigSeries {
            a0: k * self.a0,
            cos: self.cos.iter().map(|a| k * a).collect(),
            sin: self.sin.iter().map(|b| k * b).collect(),
        }
    }
}

fn forward_fft(values: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Derivative at the grid points of the band-limited interpolant of `values`.
/// The Nyquist mode contributes nothing at grid points and is dropped.
pub fn spectral_derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut spectrum = forward_fft(values);
    for (k, c) in spectrum.iter_mut().enumerate() {
        let wavenumber = if 2 * k < n {
            k as f64
        } else if 2 * k == n {
            0.0
        } else {
            k as f64 - n as f64
        };
        *c *= Complex::new(0.0, wavenumber);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut spectrum);
    spectrum.iter().map(|c| c.re / n as f64).collect()
}

/// Evaluates the band-limited interpolant of uniform samples at `t`.
pub fn interpolate_at(values: &[f64], t: f64) -> f64 {
    TrigSeries::interpolate(values).eval(t)
}

/// Uniform grid on `[0, 2π)`.
pub fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed angular difference reduced to `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_jets_match_pointwise_jets() {
        let s = TrigSeries::new(0.3, vec![0.2, -1.0, 0.0, 0.4], vec![1.5, 0.0, -0.7]);
        for n in [8, 64] {
            for (j, jet) in s.sample_jets(n).iter().enumerate() {
                let direct = s.jet(TAU * j as f64 / n as f64);
                assert_abs_diff_eq!(jet.value, direct.value, epsilon = 1e-12);
                assert_abs_diff_eq!(jet.d1, direct.d1, epsilon = 1e-12);
                assert_abs_diff_eq!(jet.d2, direct.d2, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eval_matches_closed_form() {
        let s = TrigSeries::new(0.5, vec![0.0, 1.0], vec![0.0, 0.0, 2.0]);
        for &t in &[0.0f64, 0.3, 1.7, 4.0, 6.1] {
            let want = 0.5 + (2.0 * t).cos() + 2.0 * (3.0 * t).sin();
            assert_abs_diff_eq!(s.eval(t), want, epsilon = 1e-14);
            let d = -2.0 * (2.0 * t).sin() + 6.0 * (3.0 * t).cos();
            assert_abs_diff_eq!(s.derivative(t), d, epsilon = 1e-13);
            let jet = s.jet(t);
            let d2 = -4.0 * (2.0 * t).cos() - 18.0 * (3.0 * t).sin();
            assert_abs_diff_eq!(jet.d2, d2, epsilon = 1e-12);
        }
    }

    #[test]
    fn high_harmonics_stay_accurate() {
        let mut cos = vec![0.0; 300];
        cos[299] = 1.0;
        let s = TrigSeries::new(0.0, cos, vec![]);
        for &t in &[0.1, 1.234, 5.5] {
            assert_abs_diff_eq!(s.eval(t), (300.0 * t).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn antiderivative_differentiates_back() {
        let s = TrigSeries::new(0.2, vec![1.0, -0.5], vec![0.3, 0.0, 0.7]);
        let h = 1e-5;
        for &t in &[0.0, 1.0, 3.0] {
            let fd = (s.antiderivative(t + h) - s.antiderivative(t - h)) / (2.0 * h);
            assert_abs_diff_eq!(fd, s.eval(t), epsilon = 1e-9);
        }
        assert_abs_diff_eq!(
            s.antiderivative(TAU) - s.antiderivative(0.0),
            s.period_integral(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn interpolation_recovers_band_limited_signal() {
        for n in [15, 16, 64] {
            let values: Vec<f64> = grid(n)
                .iter()
                .map(|&t| 0.3 + (3.0 * t).sin() - 0.25 * (5.0 * t).cos())
                .collect();
            let s = TrigSeries::interpolate(&values);
            assert_abs_diff_eq!(s.a0, 0.3, epsilon = 1e-14);
            assert_abs_diff_eq!(s.sin[2], 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(s.cos[4], -0.25, epsilon = 1e-14);
            assert_abs_diff_eq!(s.eval(0.37), 0.3 + 1.11f64.sin() - 0.25 * 1.85f64.cos(), epsilon = 1e-13);
        }
    }

    #[test]
    fn spectral_derivative_of_circle() {
        let n = 32;
        let xs: Vec<f64> = grid(n).iter().map(|t| t.cos()).collect();
        let d = spectral_derivative(&xs);
        for (t, dv) in grid(n).iter().zip(d) {
            assert_abs_diff_eq!(dv, -t.sin(), epsilon = 1e-13);
        }
    }

    #[test]
    fn angle_helpers() {
        assert_abs_diff_eq!(wrap_angle(-0.5), TAU - 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(angle_diff(0.1, TAU - 0.1), 0.2, epsilon = 1e-15);
        assert_eq!(wrap_angle(TAU), 0.0);
    }
}
