//! Fixture files and a runner for the `vortexloop` binary.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde::Serialize;
use tempfile::TempDir;
use vortexloop::circle_forms::CircleForm;
use vortexloop::flow::{Bump, PlanarHamiltonian};
use vortexloop::schema::{FormFile, HamiltonianFile, LoopFile, ModelFile, TrigCoeffs, SCHEMA};

pub struct Fixtures {
    dir: TempDir,
}

fn circle(center: [f64; 2], radius: f64, n: usize, phase: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64 + phase;
            [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
        })
        .collect()
}

fn trig(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> FormFile {
    FormFile::Trig { coeffs: TrigCoeffs { a0, cos, sin } }
}

fn sin2t() -> FormFile {
    trig(0.0, vec![], vec![0.0, 1.0])
}

fn loop_file(samples: Vec<[f64; 2]>, beta: FormFile) -> LoopFile {
    LoopFile { schema: Some(SCHEMA.to_string()), samples, beta }
}

/// `(name, args, expected exit code)` rows covering every exit code.
pub type Contract = (&'static str, Vec<String>, i32);

impl Fixtures {
    pub fn new() -> Self {
        let fx = Fixtures { dir: tempfile::tempdir().expect("temp dir") };
        fx.write("circle_sin2t.json", &loop_file(circle([0.0, 0.0], 1.0, 64, 0.0), sin2t()));
        fx.write("moved_sin2t.json", &loop_file(circle([3.0, -1.0], 1.0, 64, 0.7), sin2t()));
        fx.write("big_sin2t.json", &loop_file(circle([0.0, 0.0], 2.0, 64, 0.0), sin2t()));
        let mut clockwise = circle([0.0, 0.0], 1.0, 64, 0.0);
        clockwise.reverse();
        fx.write("clockwise_sin2t.json", &loop_file(clockwise, sin2t()));
        // sin 2t - 2c sin t = 2 sin t (cos t - c): with c just below 1 three zeros crowd t = 0
        let c = 1.0 - 1e-10;
        fx.write("degenerate.json", &loop_file(circle([0.0, 0.0], 1.0, 64, 0.0), trig(0.0, vec![], vec![-2.0 * c, 1.0])));
        fx.write("no_zeros.json", &loop_file(circle([0.0, 0.0], 1.0, 64, 0.0), trig(1.0, vec![], vec![0.5])));
        let mut text = serde_json::to_value(loop_file(circle([0.0, 0.0], 1.0, 16, 0.0), sin2t())).unwrap();
        text["colour"] = serde_json::json!("red");
        fx.write("unknown_field.json", &text);
        let mut old = loop_file(circle([0.0, 0.0], 1.0, 16, 0.0), sin2t());
        old.schema = Some("vortexloop/0".into());
        fx.write("wrong_schema.json", &old);
        std::fs::write(fx.path("malformed.json"), "{\"samples\": [[1.0, 0.0], [0.0,").unwrap();

        fx.write("model_sin2t.json", &ModelFile { schema: Some(SCHEMA.into()), beta: sin2t() });
        fx.write("model_sin_t.json", &ModelFile { schema: Some(SCHEMA.into()), beta: trig(0.0, vec![], vec![1.0]) });
        fx.write("volume_form.json", &ModelFile { schema: Some(SCHEMA.into()), beta: FormFile::from_form(&CircleForm::volume()) });

        let gentle = PlanarHamiltonian::new(vec![
            Bump::new([1.0, 0.0], 0.6, 0.8).unwrap(),
            Bump::new([-0.3, 0.9], 0.7, -0.6).unwrap(),
        ]);
        fx.write("hamiltonian.json", &HamiltonianFile::from_hamiltonian(&gentle));
        let violent = PlanarHamiltonian::new(vec![Bump::new([1.0, 0.0], 0.05, 50.0).unwrap()]);
        fx.write("violent.json", &HamiltonianFile::from_hamiltonian(&violent));
        fx
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn write<T: Serialize>(&self, name: &str, value: &T) {
        std::fs::write(self.path(name), serde_json::to_string_pretty(value).unwrap()).unwrap();
    }

    /// The exit-code contract over the fixture set.
    pub fn contracts(&self) -> Vec<Contract> {
        let a = |name: &str| self.arg(name);
        let s = |x: &str| x.to_string();
        vec![
            ("invariants of a valid loop", vec![s("invariants"), a("circle_sin2t.json")], 0),
            ("invariants of a clockwise loop", vec![s("invariants"), a("clockwise_sin2t.json")], 2),
            ("invariants with --auto-orient", vec![s("invariants"), s("--auto-orient"), a("clockwise_sin2t.json")], 0),
            ("malformed JSON", vec![s("invariants"), a("malformed.json")], 2),
            ("unknown field", vec![s("invariants"), a("unknown_field.json")], 2),
            ("wrong schema version", vec![s("invariants"), a("wrong_schema.json")], 2),
            ("missing file", vec![s("invariants"), a("does_not_exist.json")], 2),
            ("non-positive tolerance", vec![s("invariants"), s("--rel-tol"), s("0"), a("circle_sin2t.json")], 2),
            ("near-degenerate zero", vec![s("invariants"), a("degenerate.json")], 3),
            ("density without zeros", vec![s("invariants"), a("no_zeros.json")], 3),
            ("equivalent pair", vec![s("equiv"), a("circle_sin2t.json"), a("moved_sin2t.json")], 0),
            ("inequivalent pair", vec![s("equiv"), a("circle_sin2t.json"), a("big_sin2t.json")], 1),
            ("intertwiner with matching profile", vec![s("intertwine"), a("model_sin2t.json"), a("circle_sin2t.json"), s("--shift"), s("2")], 0),
            ("intertwiner with mismatched profile", vec![s("intertwine"), a("model_sin_t.json"), a("circle_sin2t.json")], 4),
            ("intertwiner with bad shift", vec![s("intertwine"), a("model_sin2t.json"), a("circle_sin2t.json"), s("--shift"), s("1")], 4),
            ("gentle flow", vec![s("flow"), a("circle_sin2t.json"), a("hamiltonian.json"), s("-T"), s("0.5"), s("--dt"), s("0.01")], 0),
            ("flow with dt > T", vec![s("flow"), a("circle_sin2t.json"), a("hamiltonian.json"), s("-T"), s("0.1"), s("--dt"), s("0.2")], 2),
            ("flow with rejected step", vec![s("flow"), a("circle_sin2t.json"), a("violent.json"), s("-T"), s("1"), s("--dt"), s("0.1")], 5),
            ("unknown scheme", vec![s("flow"), a("circle_sin2t.json"), a("hamiltonian.json"), s("--scheme"), s("euler")], 2),
            ("verify forms", vec![s("verify"), s("--suite"), s("forms"), s("--seed"), s("7")], 0),
            ("verify with volume-form fault", vec![s("verify"), s("--suite"), s("symplectic"), s("--beta"), a("volume_form.json")], 1),
        ]
    }
}

pub fn run<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vortexloop"))
        .args(args)
        .env_remove("VORTEXLOOP_SEED")
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", stdout(out)))
}
