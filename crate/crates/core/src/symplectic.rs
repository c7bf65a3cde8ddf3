//! The symplectic form `Ω_f(u, v) = ∫ ω(u, v) β` on embeddings of the circle,
//! its split (tangential/normal) form, the primitive `α_f(u) = ∫ ν(u) β`, the
//! momentum map `h ↦ ∫ (h∘f) β`, and finite-difference checks of `dΩ = 0` and
//! `dα = Ω`.
//!
//! Integrals over the parameter circle use the trapezoid rule on the sample
//! grid of the embedding, which is spectrally accurate for smooth periodic
//! integrands.

use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::circle_forms::CircleForm;
use crate::error::{Error, Result};
use crate::flow::PlanarHamiltonian;
use crate::loops::{DecoratedLoop, LoopEmbedding, Point};
use crate::trig::{grid, TrigSeries};

/// Relative area-constraint violation accepted without change.
pub const CONSTRAINT_TOL: f64 = 1e-10;
/// Relative violation above which a tangent vector is rejected rather than projected.
pub const PROJECTION_LIMIT: f64 = 1e-6;
/// Default step of the central differences in the `d` checks.
pub const FD_STEP: f64 = 1e-4;

/// A vector field `u(s_j) ∈ ℝ²` along the samples of an embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub u: Vec<Point>,
}

impl TangentVector {
    pub fn new(u: Vec<Point>) -> Self {
        TangentVector { u }
    }

    pub fn zero(n: usize) -> Self {
        TangentVector::new(vec![[0.0, 0.0]; n])
    }

    pub fn constant(v: Point, n: usize) -> Self {
        TangentVector::new(vec![v; n])
    }

    pub fn from_fn<F: Fn(f64) -> Point>(f: F, n: usize) -> Self {
        TangentVector::new(grid(n).into_iter().map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Band-limited interpolation of the field at parameter `t`.
    pub fn eval(&self, t: f64) -> Point {
        let xs: Vec<f64> = self.u.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = self.u.iter().map(|p| p[1]).collect();
        [TrigSeries::interpolate(&xs).eval(t), TrigSeries::interpolate(&ys).eval(t)]
    }

    pub fn scaled(&self, k: f64) -> Self {
        TangentVector::new(self.u.iter().map(|p| [k * p[0], k * p[1]]).collect())
    }

    pub fn add(&self, other: &TangentVector) -> Self {
        TangentVector::new(self.u.iter().zip(&other.u).map(|(a, b)| [a[0] + b[0], a[1] + b[1]]).collect())
    }
}

/// Coefficients of a tangent vector in the unit tangent/normal frame:
/// `u = ρ·T + λ·N` with `N` the left normal.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitTangent {
    pub rho: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Mean of `ρ` with respect to `dt/2π`.
    pub rho_mean: f64,
}

impl SplitTangent {
    /// `ρ` with its mean removed.
    pub fn zero_mean_rho(&self) -> Vec<f64> {
        self.rho.iter().map(|r| r - self.rho_mean).collect()
    }
}

/// Circulations `Γ_i` attached to marked parameters `t_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointedDecoration {
    circulations: Vec<f64>,
    params: Vec<f64>,
}

impl PointedDecoration {
    pub fn new(circulations: Vec<f64>, params: Vec<f64>) -> Result<Self> {
        if circulations.len() != params.len() {
            return Err(Error::InvalidInput(format!(
                "{} circulations for {} marked parameters",
                circulations.len(),
                params.len()
            )));
        }
        let in_range = params.iter().all(|&t| (0.0..TAU).contains(&t));
        if !in_range || params.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("marked parameters must increase within [0, 2π)".into()));
        }
        Ok(PointedDecoration { circulations, params })
    }

    pub fn circulations(&self) -> &[f64] {
        &self.circulations
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }
}

fn weight(n: usize) -> f64 {
    TAU / n as f64
}

fn check_len(f: &LoopEmbedding, u: &TangentVector) -> Result<()> {
    if f.len() != u.len() {
        return Err(Error::InvalidInput(format!(
            "tangent vector has {} samples, embedding has {}",
            u.len(),
            f.len()
        )));
    }
    Ok(())
}

/// `∮ f*(i_u ω) = ∫ (u₁ y' − u₂ x') dt`.
pub fn area_constraint(f: &LoopEmbedding, u: &TangentVector) -> f64 {
    let w = weight(f.len());
    f.velocity().iter().zip(&u.u).map(|(d, v)| v[0] * d[1] - v[1] * d[0]).sum::<f64>() * w
}

fn constraint_scale(f: &LoopEmbedding, u: &TangentVector) -> f64 {
    let w = weight(f.len());
    f.velocity()
        .iter()
        .zip(&u.u)
        .map(|(d, v)| d[0].hypot(d[1]) * v[0].hypot(v[1]))
        .sum::<f64>()
        * w
}

/// Checks the area constraint, projecting small violations away along the
/// constraint gradient `(y', −x')`.
pub fn enforce_constraint(f: &LoopEmbedding, u: &TangentVector) -> Result<TangentVector> {
    check_len(f, u)?;
    let c = area_constraint(f, u);
    let scale = constraint_scale(f, u);
    if scale == 0.0 {
        return Ok(u.clone());
    }
    let violation = c.abs() / scale;
    if violation <= CONSTRAINT_TOL {
        return Ok(u.clone());
    }
    if violation > PROJECTION_LIMIT {
        return Err(Error::ConstraintViolation { violation });
    }
    let w = weight(f.len());
    let norm2 = f.velocity().iter().map(|d| d[0] * d[0] + d[1] * d[1]).sum::<f64>() * w;
    let k = c / norm2;
    Ok(TangentVector::new(
        u.u.iter()
            .zip(f.velocity())
            .map(|(v, d)| [v[0] - k * d[1], v[1] + k * d[0]])
            .collect(),
    ))
}

fn frame(d: Point) -> (Point, Point) {
    let s = d[0].hypot(d[1]);
    let t = [d[0] / s, d[1] / s];
    (t, [-t[1], t[0]])
}

/// `(ρ, λ)` with `u = ρ·T + λ·N`.
pub fn tangent_decompose(f: &LoopEmbedding, u: &TangentVector) -> Result<SplitTangent> {
    let u = enforce_constraint(f, u)?;
    let (rho, lambda): (Vec<f64>, Vec<f64>) = f
        .velocity()
        .iter()
        .zip(&u.u)
        .map(|(&d, v)| {
            let (t, n) = frame(d);
            (v[0] * t[0] + v[1] * t[1], v[0] * n[0] + v[1] * n[1])
        })
        .unzip();
    let rho_mean = rho.iter().sum::<f64>() / rho.len() as f64;
    Ok(SplitTangent { rho, lambda, rho_mean })
}

/// `ρ·T + λ·N` along `f`.
pub fn compose_tangent(f: &LoopEmbedding, rho: &[f64], lambda: &[f64]) -> TangentVector {
    TangentVector::new(
        f.velocity()
            .iter()
            .zip(rho.iter().zip(lambda))
            .map(|(&d, (&r, &l))| {
                let (t, n) = frame(d);
                [r * t[0] + l * n[0], r * t[1] + l * n[1]]
            })
            .collect(),
    )
}

/// `⟨ρ, λ⟩ = ∫ ρ λ β dt` for values on the uniform grid.
pub fn pairing(rho: &[f64], lambda: &[f64], beta: &CircleForm) -> f64 {
    let n = rho.len();
    grid(n)
        .into_iter()
        .zip(rho.iter().zip(lambda))
        .map(|(t, (r, l))| r * l * beta.eval(t))
        .sum::<f64>()
        * weight(n)
}

/// Finite sections of the pairing in a Fourier basis and their smallest
/// singular values.
#[derive(Debug, Clone)]
pub struct PairingMatrix {
    /// Zero-mean `ρ` modes up to degree `n + d` against `λ` modes up to `n`.
    pub lambda_side: DMatrix<f64>,
    /// `ρ` modes up to `n` against `λ` modes up to `n + d`.
    pub rho_side: DMatrix<f64>,
    pub sigma_min_lambda: f64,
    pub sigma_min_rho: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl PairingMatrix {
    pub fn relative_sigma_min(&self) -> f64 {
        if self.sigma_max == 0.0 {
            0.0
        } else {
            self.sigma_min / self.sigma_max
        }
    }
}

// Orthonormal Fourier basis on L²(dt): index 0 is the constant, then cos/sin pairs.
fn basis(index: usize, t: f64) -> f64 {
    if index == 0 {
        return 1.0 / TAU.sqrt();
    }
    let j = index.div_ceil(2) as f64;
    let norm = std::f64::consts::PI.sqrt();
    if index % 2 == 1 {
        (j * t).cos() / norm
    } else {
        (j * t).sin() / norm
    }
}

fn section(beta_values: &[f64], ts: &[f64], rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> DMatrix<f64> {
    let w = weight(ts.len());
    let r: Vec<usize> = rows.collect();
    let c: Vec<usize> = cols.collect();
    DMatrix::from_fn(r.len(), c.len(), |i, j| {
        ts.iter()
            .zip(beta_values)
            .map(|(&t, &b)| basis(r[i], t) * basis(c[j], t) * b)
            .sum::<f64>()
            * w
    })
}

fn singular_range(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    // a wide section has a kernel of dimension at least cols - rows
    let min = if m.nrows() < m.ncols() {
        0.0
    } else {
        sv.iter().copied().fold(f64::INFINITY, f64::min)
    };
    (min, max)
}

fn singular_range_rows(m: &DMatrix<f64>) -> (f64, f64) {
    singular_range(&m.transpose())
}

/// Truncated matrix of `⟨ρ_i, λ_j⟩` for Fourier modes of degree `≤ n`.
///
/// Both sides of the pairing are tested: the `λ` side uses `ρ` modes up to
/// `n + d` (with `d` the degree of `β`) so that `ρ β` can reach every `λ` mode
/// of degree `≤ n`, and symmetrically for the `ρ` side.
pub fn pairing_matrix(beta: &CircleForm, n: usize) -> Result<PairingMatrix> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("basis size must be at least 2, got {n}")));
    }
    let d = beta.series().effective_degree(1e-14);
    let p = 4 * (n + 2 * d) + 16;
    let ts = grid(p);
    let bv: Vec<f64> = ts.iter().map(|&t| beta.eval(t)).collect();
    let lambda_side = section(&bv, &ts, 1..2 * (n + d) + 1, 0..2 * n + 1);
    let rho_side = section(&bv, &ts, 1..2 * n + 1, 0..2 * (n + d) + 1);
    let (lmin, lmax) = singular_range(&lambda_side);
    let (rmin, rmax) = singular_range_rows(&rho_side);
    Ok(PairingMatrix {
        lambda_side,
        rho_side,
        sigma_min_lambda: lmin,
        sigma_min_rho: rmin,
        sigma_min: lmin.min(rmin),
        sigma_max: lmax.max(rmax),
    })
}

fn omega_samples(u: &[Point], v: &[Point], beta: &CircleForm) -> f64 {
    let n = u.len();
    grid(n)
        .into_iter()
        .zip(u.iter().zip(v))
        .map(|(t, (a, b))| (a[0] * b[1] - a[1] * b[0]) * beta.eval(t))
        .sum::<f64>()
        * weight(n)
}

/// `Ω_f(u, v) = ∫ (u₁v₂ − u₂v₁) β` after enforcing the area constraint.
pub fn omega_eval(f: &LoopEmbedding, u: &TangentVector, v: &TangentVector, beta: &CircleForm) -> Result<f64> {
    let u = enforce_constraint(f, u)?;
    let v = enforce_constraint(f, v)?;
    Ok(omega_samples(&u.u, &v.u, beta))
}

/// `Ω` evaluated through the split: `⟨ρ₁, λ₂⟩ − ⟨ρ₂, λ₁⟩`.
pub fn omega_split(f: &LoopEmbedding, u: &TangentVector, v: &TangentVector, beta: &CircleForm) -> Result<f64> {
    let a = tangent_decompose(f, u)?;
    let b = tangent_decompose(f, v)?;
    Ok(pairing(&a.rho, &b.lambda, beta) - pairing(&b.rho, &a.lambda, beta))
}

/// `Ω^Γ(u, v) = Ω(u, v) + Σ Γ_i ω(u(t_i), v(t_i))`.
pub fn pointed_omega_eval(
    f: &LoopEmbedding,
    u: &TangentVector,
    v: &TangentVector,
    beta: &CircleForm,
    pd: &PointedDecoration,
) -> Result<f64> {
    let u = enforce_constraint(f, u)?;
    let v = enforce_constraint(f, v)?;
    let base = omega_samples(&u.u, &v.u, beta);
    let point_terms: f64 = pd
        .params
        .iter()
        .zip(&pd.circulations)
        .map(|(&t, &g)| {
            let (a, b) = (u.eval(t), v.eval(t));
            g * (a[0] * b[1] - a[1] * b[0])
        })
        .sum();
    Ok(base + point_terms)
}

fn primitive_on(points: &[Point], u: &[Point], beta: &CircleForm) -> f64 {
    let n = points.len();
    grid(n)
        .into_iter()
        .zip(points.iter().zip(u))
        .map(|(t, (p, v))| 0.5 * (p[0] * v[1] - p[1] * v[0]) * beta.eval(t))
        .sum::<f64>()
        * weight(n)
}

/// `α_f(u) = ∫ ½(x u₂ − y u₁) β`, the primitive of `Ω`.
pub fn primitive_one_form_eval(f: &LoopEmbedding, u: &TangentVector, beta: &CircleForm) -> Result<f64> {
    check_len(f, u)?;
    Ok(primitive_on(f.points(), &u.u, beta))
}

fn displaced(points: &[Point], u: &TangentVector, eps: f64) -> Vec<Point> {
    points.iter().zip(&u.u).map(|(p, v)| [p[0] + eps * v[0], p[1] + eps * v[1]]).collect()
}

// Central difference of F along the constant field u.
fn directional<F: Fn(&[Point]) -> f64>(points: &[Point], u: &TangentVector, h: f64, f: F) -> f64 {
    (f(&displaced(points, u, h)) - f(&displaced(points, u, -h))) / (2.0 * h)
}

/// `dΩ(u, v, w)` for constant extensions, by central differences of step `h`.
/// Constant fields commute, so only the cyclic derivative sum remains.
pub fn d_omega(
    f: &LoopEmbedding,
    u: &TangentVector,
    v: &TangentVector,
    w: &TangentVector,
    beta: &CircleForm,
    h: f64,
) -> Result<f64> {
    for x in [u, v, w] {
        check_len(f, x)?;
    }
    let p = f.points();
    Ok(directional(p, u, h, |_| omega_samples(&v.u, &w.u, beta))
        - directional(p, v, h, |_| omega_samples(&u.u, &w.u, beta))
        + directional(p, w, h, |_| omega_samples(&u.u, &v.u, beta)))
}

/// `dα(u, v) − Ω(u, v)` for constant extensions, by central differences.
pub fn exactness_defect(
    f: &LoopEmbedding,
    u: &TangentVector,
    v: &TangentVector,
    beta: &CircleForm,
    h: f64,
) -> Result<f64> {
    check_len(f, u)?;
    check_len(f, v)?;
    let p = f.points();
    let d_alpha = directional(p, u, h, |q| primitive_on(q, &v.u, beta))
        - directional(p, v, h, |q| primitive_on(q, &u.u, beta));
    Ok(d_alpha - omega_samples(&u.u, &v.u, beta))
}

/// `Σ_j w·h(p_j)·β(s_j)` over raw samples.
pub fn momentum_on(points: &[Point], h: &PlanarHamiltonian, beta: &CircleForm) -> f64 {
    let n = points.len();
    grid(n)
        .into_iter()
        .zip(points)
        .map(|(t, &p)| h.value(p) * beta.eval(t))
        .sum::<f64>()
        * weight(n)
}

/// `⟨J(f), X_h⟩ = ∫ (h∘f) β`.
pub fn momentum_map_eval(f: &LoopEmbedding, h: &PlanarHamiltonian, beta: &CircleForm) -> f64 {
    momentum_on(f.points(), h, beta)
}

/// `max_h |J(L₁)(h) − J(L₂)(h)|` over the dictionary.
pub fn momentum_separation(l1: &DecoratedLoop, l2: &DecoratedLoop, dictionary: &[PlanarHamiltonian]) -> Result<f64> {
    if dictionary.is_empty() {
        return Err(Error::InvalidInput("empty Hamiltonian dictionary".into()));
    }
    Ok(dictionary
        .iter()
        .map(|h| {
            (momentum_map_eval(l1.embedding(), h, l1.decoration())
                - momentum_map_eval(l2.embedding(), h, l2.decoration()))
            .abs()
        })
        .fold(0.0, f64::max))
}
