//! Decorated vortex loops: sampled plane embeddings carrying a Morse vorticity
//! density, their orbit invariants, and the intertwining reparametrization
//! between loops with matching profiles.

pub mod geometry;

use std::f64::consts::{PI, TAU};

use crate::circle_forms::{
    symmetry_step, transport_map, CircleDiffeo, CircleForm, MorseForm, VorticityProfile,
    DEFAULT_MORSE_TOL, DEFAULT_SYMMETRY_TOL,
};
use crate::error::{Error, Result};
use crate::trig::{spectral_derivative, TrigSeries};

pub use geometry::Point;

/// Default sample count for generated loops.
pub const DEFAULT_SAMPLES: usize = 256;
/// Default relative tolerance used by [`orbit_equivalent`].
pub const DEFAULT_AREA_TOL: f64 = 1e-6;

/// A closed, simple, counterclockwise plane curve sampled at `s_j = 2πj/N`.
///
/// Each coordinate is interpolated by its band-limited trigonometric
/// interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopEmbedding {
    points: Vec<Point>,
    velocity: Vec<Point>,
    x: TrigSeries,
    y: TrigSeries,
}

impl LoopEmbedding {
    /// Validates orientation, immersion and simplicity of the sampled curve.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let emb = Self::build(points)?;
        emb.validate()?;
        Ok(emb)
    }

    /// As [`LoopEmbedding::new`], reversing a clockwise curve instead of
    /// rejecting it. Returns whether the parameter direction was reversed.
    pub fn new_oriented(points: Vec<Point>) -> Result<(Self, bool)> {
        let area = geometry::shoelace(&points);
        if area < 0.0 {
            Ok((Self::new(reverse_samples(&points))?, true))
        } else {
            Ok((Self::new(points)?, false))
        }
    }

    fn build(points: Vec<Point>) -> Result<Self> {
        if points.len() < 8 {
            return Err(Error::InvalidInput(format!(
                "loop needs at least 8 samples, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidInput(format!("sample {i} is not finite")));
        }
        let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
        let (dx, dy) = (spectral_derivative(&xs), spectral_derivative(&ys));
        Ok(LoopEmbedding {
            velocity: dx.into_iter().zip(dy).map(|(a, b)| [a, b]).collect(),
            x: TrigSeries::interpolate(&xs),
            y: TrigSeries::interpolate(&ys),
            points,
        })
    }

    fn validate(&self) -> Result<()> {
        let area = geometry::shoelace(&self.points);
        if !(area > 0.0) {
            return Err(Error::OrientationError { area });
        }
        let max_speed = self.speeds().into_iter().fold(0.0, f64::max);
        if let Some(i) = self.speeds().iter().position(|&s| !(s > 1e-10 * max_speed)) {
            return Err(Error::NotImmersed { index: i });
        }
        if let Some((first, second)) = geometry::first_self_intersection(&self.points) {
            return Err(Error::SelfIntersection { first, second });
        }
        Ok(())
    }

    /// Samples `f` at `n` uniform parameters.
    pub fn from_fn<F: Fn(f64) -> Point>(f: F, n: usize) -> Result<Self> {
        Self::new((0..n).map(|j| f(TAU * j as f64 / n as f64)).collect())
    }

    pub fn circle(center: Point, radius: f64, n: usize) -> Result<Self> {
        Self::from_fn(|t| [center[0] + radius * t.cos(), center[1] + radius * t.sin()], n)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// `f'(s_j)` at the samples.
    pub fn velocity(&self) -> &[Point] {
        &self.velocity
    }

    pub fn speeds(&self) -> Vec<f64> {
        self.velocity.iter().map(|v| v[0].hypot(v[1])).collect()
    }

    /// Uniform sample parameters.
    pub fn params(&self) -> Vec<f64> {
        crate::trig::grid(self.len())
    }

    pub fn eval(&self, t: f64) -> Point {
        [self.x.eval(t), self.y.eval(t)]
    }

    pub fn tangent(&self, t: f64) -> Point {
        [self.x.derivative(t), self.y.derivative(t)]
    }

    /// Interpolant resampled at `n` points.
    pub fn resample(&self, n: usize) -> Result<Self> {
        Self::from_fn(|t| self.eval(t), n)
    }

    /// `f ∘ γ` sampled at `n` points.
    pub fn reparametrized<G: Fn(f64) -> f64>(&self, gamma: G, n: usize) -> Result<Self> {
        Self::from_fn(|t| self.eval(gamma(t)), n)
    }

    /// Image under `p ↦ R(angle)·p + offset`.
    pub fn moved(&self, angle: f64, offset: Point) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        Self::new(
            self.points
                .iter()
                .map(|p| [c * p[0] - s * p[1] + offset[0], s * p[0] + c * p[1] + offset[1]])
                .collect(),
        )
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.points.iter().map(|p| [k * p[0], k * p[1]]).collect())
    }

    /// Polygon area of the samples.
    pub fn polyline_area(&self) -> f64 {
        geometry::shoelace(&self.points)
    }

    pub fn centroid(&self) -> Point {
        let n = self.len() as f64;
        let (sx, sy) = self.points.iter().fold((0.0, 0.0), |(a, b), p| (a + p[0], b + p[1]));
        [sx / n, sy / n]
    }
}

fn reverse_samples<T: Copy>(values: &[T]) -> Vec<T> {
    let n = values.len();
    (0..n).map(|j| values[(n - j) % n]).collect()
}

/// `a = ½∮(x dy − y dx)`, evaluated exactly on the interpolating curve:
/// `π Σ_j j (a_j d_j − b_j c_j)` for `x ~ (a_j, b_j)`, `y ~ (c_j, d_j)`.
pub fn enclosed_area(f: &LoopEmbedding) -> f64 {
    let (x, y) = (&f.x, &f.y);
    let coeff = |v: &[f64], j: usize| v.get(j).copied().unwrap_or(0.0);
    let n = x.degree().max(y.degree());
    PI * (0..n)
        .map(|i| (i + 1) as f64 * (coeff(&x.cos, i) * coeff(&y.sin, i) - coeff(&x.sin, i) * coeff(&y.cos, i)))
        .sum::<f64>()
}

/// An embedding together with its vorticity density on the parameter circle.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoratedLoop {
    embedding: LoopEmbedding,
    morse: MorseForm,
}

impl DecoratedLoop {
    pub fn new(embedding: LoopEmbedding, decoration: CircleForm) -> Result<Self> {
        Self::with_tol(embedding, decoration, DEFAULT_MORSE_TOL)
    }

    pub fn with_tol(embedding: LoopEmbedding, decoration: CircleForm, morse_tol: f64) -> Result<Self> {
        let morse = MorseForm::with_tol(decoration, morse_tol)?;
        let loop_ = DecoratedLoop { embedding, morse };
        let pts = loop_.zero_points();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pts[i] == pts[j] {
                    return Err(Error::ValidationFailed(format!(
                        "zeros {i} and {j} map to the same point"
                    )));
                }
            }
        }
        Ok(loop_)
    }

    /// Builds a loop from raw samples. A clockwise curve is rejected unless
    /// `auto_orient` is set, in which case samples and decoration are both
    /// reversed.
    pub fn load(points: Vec<Point>, decoration: CircleForm, auto_orient: bool, morse_tol: f64) -> Result<Self> {
        let (embedding, decoration) = if auto_orient {
            let (emb, flipped) = LoopEmbedding::new_oriented(points)?;
            (emb, if flipped { decoration.reversed() } else { decoration })
        } else {
            (LoopEmbedding::new(points)?, decoration)
        };
        Self::with_tol(embedding, decoration, morse_tol)
    }

    pub fn embedding(&self) -> &LoopEmbedding {
        &self.embedding
    }

    pub fn decoration(&self) -> &CircleForm {
        &self.morse.form
    }

    pub fn morse(&self) -> &MorseForm {
        &self.morse
    }

    pub fn profile(&self) -> &VorticityProfile {
        &self.morse.profile
    }

    /// Images `x_i = f(t_i)` of the zeros of the decoration.
    pub fn zero_points(&self) -> Vec<Point> {
        self.morse.zeros.zeros.iter().map(|&t| self.embedding.eval(t)).collect()
    }

    /// Same decoration on a different embedding.
    pub fn with_embedding(&self, embedding: LoopEmbedding) -> Self {
        DecoratedLoop {
            embedding,
            morse: self.morse.clone(),
        }
    }

    /// `(f ∘ γ, γ*β)`, both sampled at `n` points.
    pub fn reparametrized(&self, gamma: &CircleDiffeo, n: usize) -> Result<Self> {
        let embedding = self.embedding.reparametrized(|t| gamma.eval(t), n)?;
        DecoratedLoop::with_tol(embedding, pullback_form(gamma, self.decoration(), n)?, DEFAULT_MORSE_TOL)
    }
}

/// Complete orbit label: enclosed area and the circular class of the profile.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitInvariants {
    pub area: f64,
    pub profile: VorticityProfile,
    pub step: usize,
}

pub fn orbit_invariants(l: &DecoratedLoop) -> OrbitInvariants {
    orbit_invariants_with_tol(l, DEFAULT_SYMMETRY_TOL)
}

pub fn orbit_invariants_with_tol(l: &DecoratedLoop, rel_tol: f64) -> OrbitInvariants {
    let profile = l.profile().clone();
    OrbitInvariants {
        area: enclosed_area(l.embedding()),
        step: symmetry_step(&profile, rel_tol),
        profile,
    }
}

/// All `j` with `p_i ≈ q_{i+j}` for every `i`.
pub fn circular_match(p: &VorticityProfile, q: &VorticityProfile, rel_tol: f64) -> Vec<usize> {
    let k = p.k();
    if k != q.k() {
        return Vec::new();
    }
    let scale = p.max_abs();
    (0..k)
        .filter(|&j| (0..k).all(|i| (p.omegas[i] - q.omegas[(i + j) % k]).abs() <= rel_tol * scale))
        .collect()
}

/// Outcome of comparing two loops' orbit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub shifts: Vec<usize>,
    pub area_delta: f64,
}

pub fn compare_orbits(l1: &DecoratedLoop, l2: &DecoratedLoop, rel_tol: f64) -> EquivalenceVerdict {
    let (a1, a2) = (enclosed_area(l1.embedding()), enclosed_area(l2.embedding()));
    let shifts = circular_match(l1.profile(), l2.profile(), rel_tol);
    let area_delta = a2 - a1;
    EquivalenceVerdict {
        equivalent: area_delta.abs() <= rel_tol * a1 && !shifts.is_empty(),
        shifts,
        area_delta,
    }
}

pub fn orbit_equivalent(l1: &DecoratedLoop, l2: &DecoratedLoop, rel_tol: f64) -> bool {
    compare_orbits(l1, l2, rel_tol).equivalent
}

/// The reparametrization `ψ` with `ψ_*(model) = target decoration`, sending
/// segment `i` of the model to segment `i + shift` of the target.
pub fn intertwiner(model: &CircleForm, target: &DecoratedLoop, shift: usize) -> Result<CircleDiffeo> {
    intertwiner_with_tol(model, target, shift, DEFAULT_AREA_TOL)
}

pub fn intertwiner_with_tol(
    model: &CircleForm,
    target: &DecoratedLoop,
    shift: usize,
    rel_tol: f64,
) -> Result<CircleDiffeo> {
    let source = MorseForm::new(model.clone())?;
    let mismatch = || Error::ProfileMismatch {
        shift,
        model: source.profile.omegas.clone(),
        target: target.profile().omegas.clone(),
    };
    if !circular_match(&source.profile, target.profile(), rel_tol).contains(&shift) {
        return Err(mismatch());
    }
    let m = 8 * target.embedding().len().max(model.resolution());
    transport_map(&source, target.morse(), shift, m)
}

/// Largest gap, over `n` uniform points `t`, between the model's cumulative
/// vorticity from the start of `t`'s segment and the target's cumulative
/// vorticity from the start of the matched segment up to `ψ(t)`.
pub fn intertwiner_residual(
    model: &CircleForm,
    target: &DecoratedLoop,
    shift: usize,
    psi: &CircleDiffeo,
    n: usize,
) -> Result<f64> {
    let source = MorseForm::new(model.clone())?;
    let zs = &source.zeros.zeros;
    let k = zs.len();
    let mut worst = 0.0f64;
    for j in 0..n {
        let t = TAU * (j as f64 + 0.5) / n as f64;
        let lifted = if t < zs[0] { t + TAU } else { t };
        let i = zs.partition_point(|&z| z <= lifted) - 1;
        let (a, _) = source.segment(i);
        let (ta, tb) = target.morse().segment((i + shift) % k);
        let mut u = ta + (psi.eval(lifted) - ta).rem_euclid(TAU);
        if u - tb > 0.5 * (TAU - (tb - ta)) {
            u -= TAU;
        }
        worst = worst.max((model.integral(a, lifted) - target.decoration().integral(ta, u)).abs());
    }
    Ok(worst)
}

fn transfer_resolution(gamma: &CircleDiffeo, beta: &CircleForm) -> usize {
    (2 * gamma.len()).max(2 * beta.resolution())
}

/// `γ_*β`, sampled.
pub fn pushforward_form(gamma: &CircleDiffeo, beta: &CircleForm) -> Result<CircleForm> {
    gamma.pushforward(beta, transfer_resolution(gamma, beta))
}

/// `γ*β = (β∘γ)·γ'`, sampled at `n` points.
pub fn pullback_form(gamma: &CircleDiffeo, beta: &CircleForm, n: usize) -> Result<CircleForm> {
    gamma.pullback(beta, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sin2() -> CircleForm {
        CircleForm::trig(0.0, vec![], vec![0.0, 1.0]).unwrap()
    }

    #[test]
    fn intertwiner_matches_cumulative_vorticity() {
        let model = CircleForm::trig(0.1, vec![0.3], vec![0.0, 1.0]).unwrap();
        let gamma = crate::generate::AnalyticMap { offset: 0.3, amps: vec![0.2], phases: vec![0.0] };
        let target_form = gamma.pullback(&model, 256).unwrap();
        let target = DecoratedLoop::new(LoopEmbedding::circle([0.0, 0.0], 1.0, 256).unwrap(), target_form).unwrap();
        let shifts = circular_match(&MorseForm::new(model.clone()).unwrap().profile, target.profile(), 1e-6);
        assert!(!shifts.is_empty());
        for shift in shifts {
            let psi = intertwiner(&model, &target, shift).unwrap();
            assert!(intertwiner_residual(&model, &target, shift, &psi, 2048).unwrap() < 1e-9);
        }
    }

    #[test]
    fn areas_of_conics() {
        let circle = LoopEmbedding::circle([0.3, -1.0], 1.0, 64).unwrap();
        assert_abs_diff_eq!(enclosed_area(&circle), PI, epsilon = 1e-13);
        let ellipse = LoopEmbedding::from_fn(|t| [2.0 * t.cos(), t.sin()], 64).unwrap();
        assert_abs_diff_eq!(enclosed_area(&ellipse), TAU, epsilon = 1e-13);
    }

    #[test]
    fn clockwise_loop_is_rejected_or_reversed() {
        let pts: Vec<Point> = (0..32)
            .map(|j| {
                let t = TAU * j as f64 / 32.0;
                [t.cos(), -t.sin()]
            })
            .collect();
        assert!(matches!(LoopEmbedding::new(pts.clone()), Err(Error::OrientationError { .. })));
        let (emb, flipped) = LoopEmbedding::new_oriented(pts.clone()).unwrap();
        assert!(flipped);
        assert_abs_diff_eq!(emb.points()[1][1], (TAU / 32.0).sin(), epsilon = 1e-15);
        let l = DecoratedLoop::load(pts, sin2(), true, DEFAULT_MORSE_TOL).unwrap();
        assert_eq!(l.profile().k(), 4);
    }

    #[test]
    fn figure_eight_is_rejected() {
        let pts = (0..64)
            .map(|j| {
                let t = TAU * j as f64 / 64.0;
                [t.sin(), (2.0 * t).sin()]
            })
            .collect();
        assert!(matches!(
            LoopEmbedding::new(pts),
            Err(Error::SelfIntersection { .. }) | Err(Error::OrientationError { .. })
        ));
    }

    #[test]
    fn invariants_of_decorated_circle() {
        let l = DecoratedLoop::new(LoopEmbedding::circle([0.0, 0.0], 1.0, 256).unwrap(), sin2()).unwrap();
        let inv = orbit_invariants(&l);
        assert_abs_diff_eq!(inv.area, PI, epsilon = 1e-12);
        assert_eq!(inv.step, 2);
        for (w, want) in inv.profile.omegas.iter().zip([1.0, -1.0, 1.0, -1.0]) {
            assert_abs_diff_eq!(*w, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn circular_match_examples() {
        let p = |w: Vec<f64>| VorticityProfile::new(w).unwrap();
        let alt = p(vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(circular_match(&alt, &alt, 1e-9), vec![0, 2]);
        let a = p(vec![1.0, -2.0, 3.0, -4.0]);
        let b = p(vec![3.0, -4.0, 1.0, -2.0]);
        assert_eq!(circular_match(&a, &b, 1e-9), vec![2]);
        assert!(circular_match(&a, &p(vec![1.0, -1.0]), 1e-9).is_empty());
    }

    #[test]
    fn scaled_circle_is_not_equivalent() {
        let c1 = DecoratedLoop::new(LoopEmbedding::circle([0.0, 0.0], 1.0, 128).unwrap(), sin2()).unwrap();
        let c2 = c1.with_embedding(c1.embedding().scaled(2.0).unwrap());
        let v = compare_orbits(&c1, &c2, DEFAULT_AREA_TOL);
        assert!(!v.equivalent);
        assert_abs_diff_eq!(v.area_delta, 3.0 * PI, epsilon = 1e-11);
        let c3 = c1.with_embedding(c1.embedding().moved(0.7, [3.0, -2.0]).unwrap());
        assert!(orbit_equivalent(&c1, &c3, DEFAULT_AREA_TOL));
    }

    #[test]
    fn intertwiner_of_symmetric_model() {
        let l = DecoratedLoop::new(LoopEmbedding::circle([0.0, 0.0], 1.0, 64).unwrap(), sin2()).unwrap();
        let id = intertwiner(&sin2(), &l, 0).unwrap();
        assert!(id.sup_distance(|t| t, 1000) < 1e-12);
        let half = intertwiner(&sin2(), &l, 2).unwrap();
        assert!(half.sup_distance(|t| t + PI, 1000) < 1e-12);
        let other = CircleForm::trig(0.0, vec![], vec![0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(intertwiner(&other, &l, 0), Err(Error::ProfileMismatch { .. })));
    }

    #[test]
    fn pushforward_by_rotation() {
        let r = CircleDiffeo::rotation(PI, 256);
        let pushed = pushforward_form(&r, &sin2()).unwrap();
        for &t in &[0.1, 1.3, 4.4] {
            assert_abs_diff_eq!(pushed.eval(t), (2.0 * t).sin(), epsilon = 1e-12);
        }
    }
}
