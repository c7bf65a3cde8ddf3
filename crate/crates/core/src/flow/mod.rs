//! Advection of decorated loops by Hamiltonian flows in the plane.
//!
//! The flow acts by left composition, so only the curve samples move; the
//! decoration on the parameter circle is carried over unchanged.

mod hamiltonian;

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::loops::{enclosed_area, DecoratedLoop, LoopEmbedding, Point};
use crate::symplectic::momentum_on;

pub use hamiltonian::{Bump, PlanarHamiltonian, CUTOFF_END, CUTOFF_START};

/// Local error estimate above which a step is rejected.
pub const STEP_ERROR_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Rk4,
    ImplicitMidpoint,
}

impl Scheme {
    pub fn order(self) -> i32 {
        match self {
            Scheme::Rk4 => 4,
            Scheme::ImplicitMidpoint => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Rk4 => "rk4",
            Scheme::ImplicitMidpoint => "implicit-midpoint",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Scheme::Rk4),
            "implicit-midpoint" | "midpoint" => Ok(Scheme::ImplicitMidpoint),
            other => Err(Error::InvalidInput(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowOptions {
    pub t_final: f64,
    pub dt: f64,
    pub scheme: Scheme,
    /// Test function for the equivariance residual; the flow Hamiltonian when absent.
    pub test_hamiltonian: Option<PlanarHamiltonian>,
    pub record_series: bool,
}

impl FlowOptions {
    pub fn new(t_final: f64, dt: f64, scheme: Scheme) -> Self {
        FlowOptions {
            t_final,
            dt,
            scheme,
            test_hamiltonian: None,
            record_series: false,
        }
    }

    /// Number of equal steps covering `[0, T]` with step at most `dt`.
    pub fn steps(&self) -> Result<usize> {
        let (t, dt) = (self.t_final, self.dt);
        if !(dt > 0.0 && dt.is_finite()) || !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("need dt > 0 and T >= 0 (dt = {dt}, T = {t})")));
        }
        if t > 0.0 && dt > t {
            return Err(Error::InvalidInput(format!("dt = {dt} exceeds T = {t}")));
        }
        let ratio = t / dt;
        let nearest = ratio.round();
        Ok(if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            nearest as usize
        } else {
            ratio.ceil() as usize
        })
    }
}

/// Per-step record of the monitored quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub step: usize,
    pub time: f64,
    pub area: f64,
    pub hamiltonian: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub evolved: DecoratedLoop,
    pub area_drift: f64,
    pub profile_drift: f64,
    pub hamiltonian_drift: f64,
    pub equivariance_residual: f64,
    pub steps: usize,
    pub series: Vec<SeriesRow>,
}

impl FlowReport {
    pub fn series_csv(&self) -> String {
        let mut out = String::from("step,time,area,hamiltonian\n");
        for r in &self.series {
            writeln!(out, "{},{:.17e},{:.17e},{:.17e}", r.step, r.time, r.area, r.hamiltonian).unwrap();
        }
        out
    }
}

// State of one sample: position plus the transported test-function increment.
type State = [f64; 3];

struct Field<'a> {
    flow: &'a PlanarHamiltonian,
    test: &'a PlanarHamiltonian,
}

impl Field<'_> {
    fn eval(&self, s: State) -> State {
        let p = [s[0], s[1]];
        let x = self.flow.vector_field(p);
        let g = self.test.gradient(p);
        [x[0], x[1], g[0] * x[0] + g[1] * x[1]]
    }
}

fn axpy(a: f64, x: State, y: State) -> State {
    [y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2]]
}

fn rk4(field: &Field, s: State, dt: f64) -> State {
    let k1 = field.eval(s);
    let k2 = field.eval(axpy(0.5 * dt, k1, s));
    let k3 = field.eval(axpy(0.5 * dt, k2, s));
    let k4 = field.eval(axpy(dt, k3, s));
    let mut out = s;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn implicit_midpoint(field: &Field, s: State, dt: f64) -> State {
    let mut next = axpy(dt, field.eval(s), s);
    for _ in 0..100 {
        let mid = [0.5 * (s[0] + next[0]), 0.5 * (s[1] + next[1]), 0.5 * (s[2] + next[2])];
        let update = axpy(dt, field.eval(mid), s);
        let change = (update[0] - next[0]).abs().max((update[1] - next[1]).abs());
        next = update;
        if change <= 1e-15 * (1.0 + s[0].abs().max(s[1].abs())) {
            break;
        }
    }
    next
}

fn step(field: &Field, scheme: Scheme, s: State, dt: f64) -> State {
    match scheme {
        Scheme::Rk4 => rk4(field, s, dt),
        Scheme::ImplicitMidpoint => implicit_midpoint(field, s, dt),
    }
}

struct Trajectory {
    states: Vec<State>,
    steps: usize,
    series: Vec<SeriesRow>,
}

fn integrate(
    l: &DecoratedLoop,
    flow: &PlanarHamiltonian,
    test: &PlanarHamiltonian,
    opts: &FlowOptions,
) -> Result<Trajectory> {
    let n = opts.steps()?;
    let dt = if n == 0 { 0.0 } else { opts.t_final / n as f64 };
    let field = Field { flow, test };
    let mut states: Vec<State> = l.embedding().points().iter().map(|p| [p[0], p[1], 0.0]).collect();
    let beta = l.decoration();
    let mut series = Vec::new();
    let mut record = |k: usize, states: &[State]| {
        if opts.record_series {
            let points: Vec<Point> = states.iter().map(|s| [s[0], s[1]]).collect();
            let area = LoopEmbedding::new(points.clone()).map(|e| enclosed_area(&e)).unwrap_or(f64::NAN);
            series.push(SeriesRow {
                step: k,
                time: k as f64 * dt,
                area,
                hamiltonian: momentum_on(&points, flow, beta),
            });
        }
    };
    record(0, &states);
    if flow.is_zero() {
        return Ok(Trajectory { states, steps: n, series });
    }
    for k in 1..=n {
        for (j, s) in states.iter_mut().enumerate() {
            let full = step(&field, opts.scheme, *s, dt);
            let half = step(&field, opts.scheme, step(&field, opts.scheme, *s, 0.5 * dt), 0.5 * dt);
            let estimate = (full[0] - half[0]).hypot(full[1] - half[1]);
            if !(estimate <= STEP_ERROR_LIMIT) {
                return Err(Error::StepRejected { step: k, sample: j, estimate });
            }
            *s = full;
        }
        record(k, &states);
    }
    Ok(Trajectory { states, steps: n, series })
}

fn relative_profile_drift(a: &DecoratedLoop, b: &DecoratedLoop) -> f64 {
    let (p, q) = (a.profile(), b.profile());
    let scale = p.max_abs();
    p.omegas
        .iter()
        .zip(&q.omegas)
        .map(|(x, y)| (x - y).abs() / scale)
        .fold(0.0, f64::max)
}

/// Flows the curve samples of `l` along `X_h` for time `T`.
pub fn advect(l: &DecoratedLoop, h: &PlanarHamiltonian, opts: &FlowOptions) -> Result<FlowReport> {
    let test = opts.test_hamiltonian.as_ref().unwrap_or(h);
    let traj = integrate(l, h, test, opts)?;
    let points: Vec<Point> = traj.states.iter().map(|s| [s[0], s[1]]).collect();
    let embedding = LoopEmbedding::new(points.clone())
        .map_err(|e| Error::ValidationFailed(format!("evolved loop is invalid: {e}")))?;
    let evolved = l.with_embedding(embedding);
    let beta = l.decoration();
    let a0 = enclosed_area(l.embedding());
    let a1 = enclosed_area(evolved.embedding());
    let j0 = momentum_on(l.embedding().points(), h, beta);
    let j1 = momentum_on(&points, h, beta);
    Ok(FlowReport {
        area_drift: (a1 - a0).abs() / a0,
        profile_drift: relative_profile_drift(l, &evolved),
        hamiltonian_drift: (j1 - j0).abs(),
        equivariance_residual: residual_from(l, test, &traj),
        evolved,
        steps: traj.steps,
        series: traj.series,
    })
}

// Route 1 evaluates the test function at the advected samples; route 2 adds
// the transported increment of the test function to its initial values.
fn residual_from(l: &DecoratedLoop, test: &PlanarHamiltonian, traj: &Trajectory) -> f64 {
    let beta = l.decoration();
    let moved: Vec<Point> = traj.states.iter().map(|s| [s[0], s[1]]).collect();
    let route1 = momentum_on(&moved, test, beta);
    let n = moved.len();
    let w = std::f64::consts::TAU / n as f64;
    let route2: f64 = crate::trig::grid(n)
        .into_iter()
        .zip(l.embedding().points().iter().zip(&traj.states))
        .map(|(t, (&p, s))| (test.value(p) + s[2]) * beta.eval(t))
        .sum::<f64>()
        * w;
    (route1 - route2).abs()
}

/// `|⟨J(φ_T∘f), h_test⟩ − ⟨J(f), h_test∘φ_T⟩|` with `φ_T` the flow of `h_flow`.
pub fn equivariance_residual(
    l: &DecoratedLoop,
    h_flow: &PlanarHamiltonian,
    h_test: &PlanarHamiltonian,
    t_final: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<f64> {
    let opts = FlowOptions::new(t_final, dt, scheme);
    let traj = integrate(l, h_flow, h_test, &opts)?;
    Ok(residual_from(l, h_test, &traj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_forms::CircleForm;
    use approx::assert_abs_diff_eq;

    fn decorated_circle(n: usize) -> DecoratedLoop {
        DecoratedLoop::new(
            LoopEmbedding::circle([0.0, 0.0], 1.0, n).unwrap(),
            CircleForm::trig(0.0, vec![], vec![0.0, 1.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn step_count() {
        assert_eq!(FlowOptions::new(1.0, 1e-3, Scheme::Rk4).steps().unwrap(), 1000);
        assert_eq!(FlowOptions::new(1.0, 0.3, Scheme::Rk4).steps().unwrap(), 4);
        assert_eq!(FlowOptions::new(0.0, 0.1, Scheme::Rk4).steps().unwrap(), 0);
        assert!(FlowOptions::new(0.1, 0.2, Scheme::Rk4).steps().is_err());
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let l = decorated_circle(64);
        let r = advect(&l, &PlanarHamiltonian::zero(), &FlowOptions::new(1.0, 0.1, Scheme::Rk4)).unwrap();
        assert_eq!(r.evolved.embedding().points(), l.embedding().points());
        assert_eq!((r.area_drift, r.profile_drift, r.hamiltonian_drift, r.equivariance_residual), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn radial_well_rotates_circle() {
        let l = decorated_circle(128);
        let h = PlanarHamiltonian::new(vec![Bump::new([0.0, 0.0], 2.0, -4.0).unwrap()]);
        for scheme in [Scheme::Rk4, Scheme::ImplicitMidpoint] {
            let r = advect(&l, &h, &FlowOptions::new(1.0, 0.01, scheme)).unwrap();
            assert!(r.area_drift < 1e-12, "{}", r.area_drift);
            for p in r.evolved.embedding().points() {
                assert_abs_diff_eq!(p[0].hypot(p[1]), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn samples_outside_support_stay_put() {
        let l = decorated_circle(64);
        let h = PlanarHamiltonian::new(vec![Bump::new([1.0, 0.0], 0.05, 0.01).unwrap()]);
        let r = advect(&l, &h, &FlowOptions::new(0.5, 0.01, Scheme::Rk4)).unwrap();
        for (a, b) in l.embedding().points().iter().zip(r.evolved.embedding().points()) {
            if h.outside_support(*a) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn oversized_step_is_rejected() {
        let l = decorated_circle(64);
        let h = PlanarHamiltonian::new(vec![Bump::new([0.5, 0.0], 0.3, 5.0).unwrap()]);
        assert!(matches!(
            advect(&l, &h, &FlowOptions::new(1.0, 0.5, Scheme::Rk4)),
            Err(Error::StepRejected { .. })
        ));
    }

    #[test]
    fn own_hamiltonian_residual_is_its_drift() {
        let l = decorated_circle(128);
        let h = PlanarHamiltonian::new(vec![Bump::new([0.3, 0.2], 1.0, 1.0).unwrap()]);
        let r = advect(&l, &h, &FlowOptions::new(1.0, 1e-2, Scheme::Rk4)).unwrap();
        assert_abs_diff_eq!(r.equivariance_residual, r.hamiltonian_drift, epsilon = 1e-15);
        assert!(r.hamiltonian_drift < 1e-8);
    }
}
