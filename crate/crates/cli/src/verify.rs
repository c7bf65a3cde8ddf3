//! Seeded property suites behind `vortexloop verify`.
//!
//! Every suite draws from its own generator, so reports depend only on the
//! seed and the suite selection.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vortexloop::circle_forms::{
    cumulative, invert_cumulative, stabilizer_generator, CircleForm, MorseForm,
};
use vortexloop::flow::{advect, equivariance_residual, FlowOptions, Scheme};
use vortexloop::generate::{
    bump_dictionary, random_constrained_tangent, random_decorated_loop, random_flow_hamiltonian,
    random_hamiltonian, random_morse_form, random_star_loop, symmetric_form, AnalyticMap,
};
use vortexloop::loops::{
    intertwiner, orbit_equivalent, DecoratedLoop, DEFAULT_AREA_TOL,
};
use vortexloop::schema::{LoopFile, SCHEMA};
use vortexloop::symplectic::{
    d_omega, exactness_defect, momentum_separation, omega_eval, omega_split, pairing_matrix, FD_STEP,
};
use vortexloop::trig::angle_diff;

use crate::commands::{load_form, to_json, CliError, Done, EXIT_NEGATIVE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Forms,
    Symplectic,
    Flow,
    All,
}

#[derive(Debug, Clone, Serialize)]
pub struct Property {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub criterion: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finding: Option<String>,
}

#[derive(Serialize)]
struct Report {
    schema: &'static str,
    suite: Suite,
    seed: u64,
    passed: bool,
    properties: Vec<Property>,
}

struct Collector {
    suite: &'static str,
    props: Vec<Property>,
}

impl Collector {
    fn new(suite: &'static str) -> Self {
        Collector { suite, props: Vec::new() }
    }

    fn push(&mut self, name: &'static str, passed: bool, measured: f64, criterion: String) -> &mut Property {
        self.props.push(Property { suite: self.suite, name, passed, measured, criterion, finding: None });
        self.props.last_mut().unwrap()
    }

    fn below(&mut self, name: &'static str, measured: f64, limit: f64) -> &mut Property {
        self.push(name, measured < limit, measured, format!("< {limit:e}"))
    }

    fn above(&mut self, name: &'static str, measured: f64, limit: f64) -> &mut Property {
        self.push(name, measured > limit, measured, format!("> {limit:e}"))
    }

    fn near(&mut self, name: &'static str, measured: f64, target: f64, half_width: f64) -> &mut Property {
        let passed = (measured - target).abs() <= half_width;
        self.push(name, passed, measured, format!("{target} ± {half_width}"))
    }

    fn zero_count(&mut self, name: &'static str, failures: usize) -> &mut Property {
        self.push(name, failures == 0, failures as f64, "= 0 failures".into())
    }

    /// Records a property whose computation itself failed.
    fn error(&mut self, name: &'static str, e: impl std::fmt::Display) {
        self.push(name, false, f64::NAN, "computes".into()).finding = Some(e.to_string());
    }
}

fn sin_mode(m: usize) -> CircleForm {
    let mut sin = vec![0.0; m];
    sin[m - 1] = 1.0;
    CircleForm::trig(0.0, vec![], sin).expect("finite coefficients")
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Smallest relative profile distance over all circular alignments.
fn profile_distance(a: &MorseForm, b: &MorseForm) -> f64 {
    let (p, q) = (&a.profile.omegas, &b.profile.omegas);
    if p.len() != q.len() {
        return f64::INFINITY;
    }
    let k = p.len();
    let scale = a.profile.max_abs();
    (0..k)
        .map(|j| (0..k).map(|i| (p[i] - q[(i + j) % k]).abs() / scale).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

fn forms_suite(rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut c = Collector::new("forms");
    match MorseForm::new(sin_mode(2)) {
        Ok(mf) => {
            let want = [0.0, PI / 2.0, PI, 1.5 * PI];
            let zerr = if mf.k() == 4 {
                mf.zeros.zeros.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            c.below("sin2t_zeros", zerr, 1e-10);
            let perr = mf
                .profile
                .omegas
                .iter()
                .zip([1.0, -1.0, 1.0, -1.0])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            c.below("sin2t_profile", perr, 1e-10);
            match stabilizer_generator(&mf, 2) {
                Ok(g) => {
                    c.below("sin2t_stabilizer_is_half_turn", g.sup_distance(|t| t + PI, 4096), 1e-9);
                }
                Err(e) => c.error("sin2t_stabilizer_is_half_turn", e),
            }
        }
        Err(e) => c.error("sin2t_zeros", e),
    }
    match MorseForm::new(sin_mode(3)).and_then(|mf| stabilizer_generator(&mf, 2)) {
        Ok(g) => {
            let err = (0..4096)
                .map(|j| {
                    let t = TAU * (j as f64 + 0.5) / 4096.0;
                    angle_diff(g.iterate(t, 3), t).abs()
                })
                .fold(0.0, f64::max);
            c.below("sin3t_stabilizer_order_three", err, 1e-8);
        }
        Err(e) => c.error("sin3t_stabilizer_order_three", e),
    }

    let mut worst = 0.0f64;
    let mut round_trip = 0.0f64;
    for _ in 0..10 {
        let beta = random_morse_form(rng, 3);
        let gamma = AnalyticMap::random(rng, 3, 0.6);
        let pair = MorseForm::new(beta.clone())
            .and_then(|mf| Ok((mf, MorseForm::new(gamma.pullback(&beta, 256)?)?)));
        match pair {
            Ok((mf, pulled)) => {
                worst = worst.max(profile_distance(&mf, &pulled));
                for i in 0..mf.k() {
                    let (a, b) = mf.segment(i);
                    let t = a + rng.random_range(0.01..0.99) * (b - a);
                    let s = cumulative(&mf.form, a, t);
                    match invert_cumulative(&mf.form, (a, b), s) {
                        Ok(back) => round_trip = round_trip.max((back - t).abs()),
                        Err(_) => round_trip = f64::INFINITY,
                    }
                }
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    c.below("reparametrization_covariance", worst, 1e-8);
    c.below("cumulative_round_trip", round_trip, 1e-10);

    let mut failures = 0;
    for case in 0..10 {
        let eta = AnalyticMap::random(rng, 2, 0.5);
        let m = 2 + case % 2;
        match symmetric_form(&eta, m, 512).and_then(MorseForm::new) {
            Ok(mf) => {
                let ell = mf.step(1e-9);
                if mf.k() % ell != 0 || mf.k() / ell != m {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    c.zero_count("symmetry_step_divides_k", failures);

    let mut recovery = 0.0f64;
    for _ in 0..10 {
        let model = random_morse_form(rng, 3);
        let gamma = AnalyticMap::random(rng, 3, 0.6);
        let result = random_star_loop(rng, 256)
            .and_then(|emb| DecoratedLoop::new(emb, gamma.pullback(&model, 256)?))
            .and_then(|target| {
                let mf = MorseForm::new(model.clone())?;
                let image = gamma.inverse(mf.zeros.zeros[0]);
                let zs = &target.morse().zeros.zeros;
                let shift = (0..zs.len())
                    .min_by(|&a, &b| angle_diff(image, zs[a]).abs().total_cmp(&angle_diff(image, zs[b]).abs()))
                    .unwrap_or(0);
                intertwiner(&model, &target, shift)
            });
        recovery = match result {
            Ok(psi) => recovery.max(psi.sup_distance(|s| gamma.inverse(s), 2048)),
            Err(_) => f64::INFINITY,
        };
    }
    c.below("intertwiner_recovers_inverse", recovery, 1e-8);
    c.props
}

fn symplectic_suite(rng: &mut ChaCha8Rng, beta: Option<&CircleForm>) -> Vec<Property> {
    let mut c = Collector::new("symplectic");
    let probe = beta.cloned().unwrap_or_else(|| sin_mode(2));
    match pairing_matrix(&probe, 16) {
        Ok(m) => {
            let p = c.above("pairing_nondegenerate", m.sigma_min, 1e-6);
            if m.relative_sigma_min() < 1e-10 {
                p.finding = Some(format!(
                    "degenerate pairing: relative smallest singular value {:e}",
                    m.relative_sigma_min()
                ));
            }
        }
        Err(e) => c.error("pairing_nondegenerate", e),
    }
    match pairing_matrix(&CircleForm::volume(), 16) {
        Ok(m) => {
            c.below("volume_form_has_kernel", m.relative_sigma_min(), 1e-10);
        }
        Err(e) => c.error("volume_form_has_kernel", e),
    }

    let (mut route, mut antisym, mut bilinear) = (0.0f64, 0.0f64, 0.0f64);
    let (mut closed, mut exact) = (0.0f64, 0.0f64);
    let mut failed = None;
    for case in 0..20 {
        let l = match random_decorated_loop(rng, 256, 3) {
            Ok(l) => l,
            Err(e) => {
                failed = Some(e);
                break;
            }
        };
        let (f, b) = (l.embedding(), l.decoration());
        let u = random_constrained_tangent(rng, f, 5);
        let v = random_constrained_tangent(rng, f, 5);
        let w = random_constrained_tangent(rng, f, 5);
        let (x, y): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let checks = (|| {
            let uv = omega_eval(f, &u, &v, b)?;
            let wv = omega_eval(f, &w, &v, b)?;
            let scale = 1.0 + uv.abs() + wv.abs();
            route = route.max((uv - omega_split(f, &u, &v, b)?).abs());
            antisym = antisym.max((uv + omega_eval(f, &v, &u, b)?).abs() / scale);
            let combo = omega_eval(f, &u.scaled(x).add(&w.scaled(y)), &v, b)?;
            bilinear = bilinear.max((combo - x * uv - y * wv).abs() / scale);
            if case < 5 {
                closed = closed.max(d_omega(f, &u, &v, &w, b, FD_STEP)?.abs());
                exact = exact.max(exactness_defect(f, &u, &v, b, FD_STEP)?.abs());
            }
            Ok::<(), vortexloop::Error>(())
        })();
        if let Err(e) = checks {
            failed = Some(e);
            break;
        }
    }
    if let Some(e) = failed {
        c.error("route_equivalence", e);
    } else {
        c.below("route_equivalence", route, 1e-9);
        c.below("antisymmetry", antisym, 1e-12);
        c.below("bilinearity", bilinear, 1e-12);
        c.below("closedness", closed, 1e-5);
        c.below("exactness", exact, 1e-5);
    }

    let mut equivalent = 0.0f64;
    for case in 0..5 {
        let eta = AnalyticMap::random(rng, 2, 0.5);
        let pair = symmetric_form(&eta, 2 + case % 2, 512)
            .and_then(|beta| DecoratedLoop::new(random_star_loop(rng, 256)?, beta))
            .and_then(|l1| {
                let gamma = stabilizer_generator(l1.morse(), l1.morse().step(1e-9))?;
                let l2 = l1.reparametrized(&gamma, 256)?;
                Ok((l1, l2))
            });
        equivalent = match pair {
            Ok((l1, l2)) => {
                let dict = bump_dictionary(rng, l1.embedding(), 50);
                equivalent.max(momentum_separation(&l1, &l2, &dict).unwrap_or(f64::INFINITY))
            }
            Err(_) => f64::INFINITY,
        };
    }
    c.below("momentum_equal_on_equivalent_pairs", equivalent, 1e-8);

    let mut separated = f64::INFINITY;
    for _ in 0..5 {
        let pair = random_decorated_loop(rng, 256, 3).and_then(|l1| Ok((l1, random_decorated_loop(rng, 256, 3)?)));
        separated = match pair {
            Ok((l1, l2)) if !orbit_equivalent(&l1, &l2, DEFAULT_AREA_TOL) => {
                let dict = bump_dictionary(rng, l1.embedding(), 50);
                separated.min(momentum_separation(&l1, &l2, &dict).unwrap_or(0.0))
            }
            _ => 0.0,
        };
    }
    c.above("momentum_separates_inequivalent_pairs", separated, 1e-4);
    c.props
}

fn flow_suite(rng: &mut ChaCha8Rng) -> Vec<Property> {
    let mut c = Collector::new("flow");
    let dts = [1e-2, 5e-3, 2.5e-3];
    let mut cases = Vec::new();
    for _ in 0..5 {
        match random_decorated_loop(rng, 256, 3) {
            Ok(l) => {
                let h = random_flow_hamiltonian(rng, l.embedding());
                let test = random_hamiltonian(rng, 2, 0.5, (0.3, 1.0), (0.2, 1.0));
                cases.push((l, h, test));
            }
            Err(e) => {
                c.error("rk4_area_drift", e);
                return c.props;
            }
        }
    }

    let (mut area, mut profile, mut ham, mut inequivalent) = (0.0f64, 0.0f64, 0.0f64, 0);
    let (mut rk4_totals, mut mid_ham, mut mid_area, mut eq_totals) = ([0.0; 3], [0.0; 3], 0.0f64, [0.0; 3]);
    let (mut residual, mut round_trip) = (0.0f64, 0);
    let outcome = (|| {
        for (l, h, test) in &cases {
            let r = advect(l, h, &FlowOptions::new(1.0, 1e-3, Scheme::Rk4))?;
            area = area.max(r.area_drift);
            profile = profile.max(r.profile_drift);
            ham = ham.max(r.hamiltonian_drift);
            if !orbit_equivalent(l, &r.evolved, DEFAULT_AREA_TOL) {
                inequivalent += 1;
            }
            let text = to_json(&LoopFile::from_loop(&r.evolved));
            let reparsed = serde_json::from_str::<LoopFile>(&text)
                .ok()
                .and_then(|f| f.to_loop(false, vortexloop::circle_forms::DEFAULT_MORSE_TOL).ok());
            if reparsed.is_none_or(|back| back.profile() != l.profile()) {
                round_trip += 1;
            }
            residual = residual.max(equivariance_residual(l, h, test, 1.0, 1e-3, Scheme::Rk4)?);
            for (i, &dt) in dts.iter().enumerate() {
                rk4_totals[i] += advect(l, h, &FlowOptions::new(1.0, dt, Scheme::Rk4))?.area_drift;
                let mid = advect(l, h, &FlowOptions::new(1.0, dt, Scheme::ImplicitMidpoint))?;
                mid_ham[i] += mid.hamiltonian_drift;
                mid_area = mid_area.max(mid.area_drift);
                eq_totals[i] += equivariance_residual(l, h, test, 1.0, dt, Scheme::Rk4)?;
            }
        }
        Ok::<(), vortexloop::Error>(())
    })();
    if let Err(e) = outcome {
        c.error("rk4_area_drift", e);
        return c.props;
    }
    c.below("rk4_area_drift", area, 1e-8);
    c.push("rk4_profile_unchanged", profile == 0.0, profile, "= 0".into());
    c.below("rk4_hamiltonian_drift", ham, 1e-8);
    c.zero_count("orbit_preserved", inequivalent);
    c.zero_count("evolved_loop_round_trip", round_trip);
    c.near("rk4_area_drift_order", loglog_slope(&dts, &rk4_totals), 4.0, 0.3);
    c.below("midpoint_area_drift", mid_area, 1e-12);
    c.near("midpoint_hamiltonian_drift_order", loglog_slope(&dts, &mid_ham), 2.0, 0.3);
    c.below("equivariance_residual", residual, 1e-7);
    c.near("equivariance_residual_order", loglog_slope(&dts, &eq_totals), 4.0, 0.3);
    c.props
}

// Fixed per-suite salts keep the suites' random streams independent.
const FORMS_SALT: u64 = 0x666f726d73;
const SYMPLECTIC_SALT: u64 = 0x73796d706c;
const FLOW_SALT: u64 = 0x666c6f77;

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

pub fn run(suite: Suite, seed: u64, beta_path: Option<&Path>) -> Result<Done, CliError> {
    let beta = beta_path.map(load_form).transpose()?;
    let wants = |s: Suite| suite == Suite::All || suite == s;
    let (forms, symplectic, flow) = std::thread::scope(|scope| {
        let forms = wants(Suite::Forms).then(|| scope.spawn(|| forms_suite(&mut rng_for(seed, FORMS_SALT))));
        let symplectic = wants(Suite::Symplectic)
            .then(|| scope.spawn(|| symplectic_suite(&mut rng_for(seed, SYMPLECTIC_SALT), beta.as_ref())));
        let flow = wants(Suite::Flow).then(|| scope.spawn(|| flow_suite(&mut rng_for(seed, FLOW_SALT))));
        let join = |h: Option<std::thread::ScopedJoinHandle<'_, Vec<Property>>>| {
            h.map(|h| h.join().expect("suite thread panicked")).unwrap_or_default()
        };
        (join(forms), join(symplectic), join(flow))
    });
    let properties: Vec<Property> = forms.into_iter().chain(symplectic).chain(flow).collect();
    let passed = properties.iter().all(|p| p.passed);
    let report = Report { schema: SCHEMA, suite, seed, passed, properties };
    Ok(Done { json: to_json(&report), code: if passed { 0 } else { EXIT_NEGATIVE } })
}
