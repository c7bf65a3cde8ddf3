//! Seeded random generators for loops, densities, circle maps, tangent
//! vectors and Hamiltonians.

use std::f64::consts::TAU;

use rand::Rng;

use crate::circle_forms::{CircleDiffeo, CircleForm};
use crate::error::Result;
use crate::flow::{Bump, PlanarHamiltonian};
use crate::loops::{DecoratedLoop, LoopEmbedding, Point};
use crate::symplectic::{area_constraint, compose_tangent, TangentVector};
use crate::trig::grid;

/// `γ(t) = t + c + Σ a_j sin(j t + φ_j)` with `Σ j|a_j| < 1`, so `γ' > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticMap {
    pub offset: f64,
    pub amps: Vec<f64>,
    pub phases: Vec<f64>,
}

impl AnalyticMap {
    pub fn identity() -> Self {
        AnalyticMap { offset: 0.0, amps: vec![], phases: vec![] }
    }

    /// Random map with `modes` harmonics and `Σ j|a_j| = budget`.
    pub fn random<R: Rng>(rng: &mut R, modes: usize, budget: f64) -> Self {
        let raw: Vec<f64> = (0..modes).map(|_| rng.random_range(-1.0..1.0)).collect();
        let weight: f64 = raw.iter().enumerate().map(|(j, a)| (j + 1) as f64 * a.abs()).sum();
        let amps = raw.iter().map(|a| a * budget / weight.max(1e-12)).collect();
        let phases = (0..modes).map(|_| rng.random_range(0.0..TAU)).collect();
        AnalyticMap { offset: rng.random_range(0.0..TAU), amps, phases }
    }

    pub fn eval(&self, t: f64) -> f64 {
        t + self.offset
            + self
                .amps
                .iter()
                .zip(&self.phases)
                .enumerate()
                .map(|(j, (a, p))| a * ((j + 1) as f64 * t + p).sin())
                .sum::<f64>()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        1.0 + self
            .amps
            .iter()
            .zip(&self.phases)
            .enumerate()
            .map(|(j, (a, p))| (j + 1) as f64 * a * ((j + 1) as f64 * t + p).cos())
            .sum::<f64>()
    }

    /// `γ⁻¹(s)` by safeguarded Newton iteration on the lift.
    pub fn inverse(&self, s: f64) -> f64 {
        let bound: f64 = self.amps.iter().map(|a| a.abs()).sum();
        let (mut lo, mut hi) = (s - self.offset - bound - 1e-12, s - self.offset + bound + 1e-12);
        let mut t = s - self.offset;
        for _ in 0..100 {
            let r = self.eval(t) - s;
            if r == 0.0 {
                break;
            }
            if r < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let mut next = t - r / self.derivative(t);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - t).abs() < 1e-16 * (1.0 + t.abs());
            t = next;
            if done {
                break;
            }
        }
        t
    }

    pub fn to_diffeo(&self, m: usize) -> Result<CircleDiffeo> {
        CircleDiffeo::from_fn(|t| self.eval(t), |t| self.derivative(t), m)
    }

    pub fn inverse_diffeo(&self, m: usize) -> Result<CircleDiffeo> {
        CircleDiffeo::from_fn(|s| self.inverse(s), |s| 1.0 / self.derivative(self.inverse(s)), m)
    }

    /// `γ*β = (β∘γ)·γ'`, sampled at `n` points.
    pub fn pullback(&self, beta: &CircleForm, n: usize) -> Result<CircleForm> {
        CircleForm::sampled_from_fn(|t| beta.eval(self.eval(t)) * self.derivative(t), n)
    }
}

/// `sin(m t + φ) + p(t)` with a small random trigonometric perturbation `p`;
/// `Σ|p_j| ≤ 0.3` and `Σ j|p_j| ≤ m/2`, so the form has exactly `2m` simple zeros.
pub fn random_morse_form<R: Rng>(rng: &mut R, max_mode: usize) -> CircleForm {
    let m = rng.random_range(1..=max_mode.max(1));
    let degree = m + 2;
    let a0: f64 = rng.random_range(-1.0..1.0);
    let mut cos: Vec<f64> = (0..degree).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut sin: Vec<f64> = (0..degree).map(|_| rng.random_range(-1.0..1.0)).collect();
    let plain = a0.abs() + cos.iter().chain(&sin).map(|c| c.abs()).sum::<f64>();
    let weighted: f64 = (0..degree).map(|j| (j + 1) as f64 * (cos[j].abs() + sin[j].abs())).sum();
    let k = (0.3 / plain).min(0.5 * m as f64 / weighted);
    let phase = rng.random_range(0.0..TAU);
    for c in cos.iter_mut().chain(sin.iter_mut()) {
        *c *= k;
    }
    cos[m - 1] += phase.sin();
    sin[m - 1] += phase.cos();
    CircleForm::trig(k * a0, cos, sin).expect("finite coefficients")
}

/// `η*(sin m t)`: a density with `ℓ = 2`, `k = 2m` and a non-rigid stabilizer
/// `η⁻¹ ∘ R_{2π/m} ∘ η`.
pub fn symmetric_form(eta: &AnalyticMap, m: usize, n: usize) -> Result<CircleForm> {
    CircleForm::sampled_from_fn(|t| (m as f64 * eta.eval(t)).sin() * eta.derivative(t), n)
}

/// Star-shaped loop `c + R(1 + Σ ε_j cos(j s + φ_j))(cos s, sin s)`.
pub fn random_star_loop<R: Rng>(rng: &mut R, n: usize) -> Result<LoopEmbedding> {
    let radius = rng.random_range(0.7..1.2);
    let center = [rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)];
    let modes: Vec<(f64, f64)> = (2..=4)
        .map(|j| (rng.random_range(-0.12..0.12) / j as f64, rng.random_range(0.0..TAU)))
        .collect();
    LoopEmbedding::from_fn(
        |s| {
            let r = radius
                * (1.0
                    + modes
                        .iter()
                        .enumerate()
                        .map(|(i, (e, p))| e * ((i + 2) as f64 * s + p).cos())
                        .sum::<f64>());
            [center[0] + r * s.cos(), center[1] + r * s.sin()]
        },
        n,
    )
}

pub fn random_decorated_loop<R: Rng>(rng: &mut R, n: usize, max_mode: usize) -> Result<DecoratedLoop> {
    let embedding = random_star_loop(rng, n)?;
    DecoratedLoop::new(embedding, random_morse_form(rng, max_mode))
}

/// Bumps with centres in `[-r, r]²`, widths in `sigma` and `|A|` in `amplitude`.
pub fn random_hamiltonian<R: Rng>(
    rng: &mut R,
    count: usize,
    r: f64,
    sigma: (f64, f64),
    amplitude: (f64, f64),
) -> PlanarHamiltonian {
    let bumps = (0..count)
        .map(|_| {
            let center = [rng.random_range(-r..r), rng.random_range(-r..r)];
            let s = rng.random_range(sigma.0..sigma.1);
            let a = rng.random_range(amplitude.0..amplitude.1);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            Bump::new(center, s, sign * a).expect("valid bump")
        })
        .collect();
    PlanarHamiltonian::new(bumps)
}

/// Two bumps centred on the curve, wide enough (σ ∈ [0.5, 0.8]) for the
/// deformed loop to stay resolved by its samples, with `|A| ∈ [0.5, 1.5]`.
pub fn random_flow_hamiltonian<R: Rng>(rng: &mut R, around: &LoopEmbedding) -> PlanarHamiltonian {
    let bumps = (0..2)
        .map(|_| {
            let center = around.eval(rng.random_range(0.0..TAU));
            let sigma = rng.random_range(0.5..0.8);
            let a = rng.random_range(0.5..1.5);
            let amplitude = if rng.random_bool(0.5) { a } else { -a };
            Bump::new(center, sigma, amplitude).expect("valid bump")
        })
        .collect();
    PlanarHamiltonian::new(bumps)
}

/// Unit-amplitude bumps centred at random points of the curve.
pub fn bump_dictionary<R: Rng>(rng: &mut R, around: &LoopEmbedding, count: usize) -> Vec<PlanarHamiltonian> {
    (0..count)
        .map(|_| {
            let p = around.eval(rng.random_range(0.0..TAU));
            let jitter = [rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)];
            let s = rng.random_range(0.1..0.4);
            PlanarHamiltonian::new(vec![Bump::new([p[0] + jitter[0], p[1] + jitter[1]], s, 1.0).expect("valid bump")])
        })
        .collect()
}

/// A tangent vector `ρT + λN` from random low-order Fourier data, projected
/// exactly onto the area constraint.
pub fn random_constrained_tangent<R: Rng>(rng: &mut R, f: &LoopEmbedding, modes: usize) -> TangentVector {
    let mut series = || {
        let coeffs: Vec<(f64, f64)> = (0..=modes)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        grid(f.len())
            .into_iter()
            .map(|t| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, (a, b))| (a * (j as f64 * t).cos() + b * (j as f64 * t).sin()) / (1.0 + j as f64))
                    .sum::<f64>()
            })
            .collect::<Vec<f64>>()
    };
    let rho = series();
    let lambda = series();
    let u = compose_tangent(f, &rho, &lambda);
    let g = TangentVector::new(f.velocity().iter().map(|d| [d[1], -d[0]]).collect::<Vec<Point>>());
    u.add(&g.scaled(-area_constraint(f, &u) / area_constraint(f, &g)))
}
