use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use vortexloop::circle_forms::CircleForm;
use vortexloop::flow::{advect, FlowOptions, PlanarHamiltonian, Scheme};
use vortexloop::loops::{
    circular_match, compare_orbits, intertwiner_residual, intertwiner_with_tol, orbit_invariants_with_tol,
    DecoratedLoop,
};
use vortexloop::schema::{DiffeoFile, HamiltonianFile, LoopFile, ModelFile, SCHEMA};
use vortexloop::Error;

use crate::{svg, LoadOptions};

/// Successful run: the JSON printed on stdout and the exit code.
pub struct Done {
    pub json: String,
    pub code: u8,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_MORSE: u8 = 3;
pub const EXIT_PROFILE: u8 = 4;
pub const EXIT_FLOW: u8 = 5;

impl CliError {
    fn input(message: String) -> Self {
        CliError { code: EXIT_INPUT, message }
    }

    fn from_load(path: &Path, e: Error) -> Self {
        let code = if e.is_morse_class() { EXIT_MORSE } else { EXIT_INPUT };
        CliError { code, message: format!("{}: {e}", path.display()) }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn done<T: Serialize>(value: &T, code: u8) -> Result<Done, CliError> {
    Ok(Done { json: to_json(value), code })
}

fn check_tol(name: &str, value: f64) -> Result<(), CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::input(format!("--{name} must be positive and finite (got {value})")))
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_loop(path: &Path, opts: &LoadOptions) -> Result<DecoratedLoop, CliError> {
    check_tol("morse-tol", opts.morse_tol)?;
    let file: LoopFile = read_json(path)?;
    file.to_loop(opts.auto_orient, opts.morse_tol).map_err(|e| CliError::from_load(path, e))
}

pub fn load_form(path: &Path) -> Result<CircleForm, CliError> {
    let value: serde_json::Value = read_json(path)?;
    let form = if value.get("samples").is_some() {
        let file: LoopFile = serde_json::from_value(value).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        file.beta.to_form()
    } else {
        let file: ModelFile = serde_json::from_value(value).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        file.to_form()
    };
    form.map_err(|e| CliError::from_load(path, e))
}

fn load_hamiltonian(path: &Path) -> Result<PlanarHamiltonian, CliError> {
    let file: HamiltonianFile = read_json(path)?;
    file.to_hamiltonian().map_err(|e| CliError::from_load(path, e))
}

#[derive(Serialize)]
struct InvariantsReport {
    schema: &'static str,
    area: f64,
    omegas: Vec<f64>,
    total: f64,
    k: usize,
    ell: usize,
}

pub fn invariants(path: &Path, rel_tol: f64, opts: &LoadOptions) -> Result<Done, CliError> {
    check_tol("rel-tol", rel_tol)?;
    let l = load_loop(path, opts)?;
    let inv = orbit_invariants_with_tol(&l, rel_tol);
    let report = InvariantsReport {
        schema: SCHEMA,
        area: inv.area,
        total: inv.profile.omegas.iter().sum(),
        k: inv.profile.k(),
        omegas: inv.profile.omegas,
        ell: inv.step,
    };
    done(&report, 0)
}

#[derive(Serialize)]
struct EquivReport {
    schema: &'static str,
    equivalent: bool,
    shifts: Vec<usize>,
    area_delta: f64,
}

pub fn equiv(a: &Path, b: &Path, tol: f64, opts: &LoadOptions) -> Result<Done, CliError> {
    check_tol("tol", tol)?;
    let (la, lb) = (load_loop(a, opts)?, load_loop(b, opts)?);
    let verdict = compare_orbits(&la, &lb, tol);
    let code = if verdict.equivalent { 0 } else { EXIT_NEGATIVE };
    let report = EquivReport {
        schema: SCHEMA,
        equivalent: verdict.equivalent,
        shifts: verdict.shifts,
        area_delta: verdict.area_delta,
    };
    done(&report, code)
}

#[derive(Serialize)]
struct IntertwineReport {
    schema: &'static str,
    shift: usize,
    nodes: usize,
    residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<DiffeoFile>,
}

const RESIDUAL_POINTS: usize = 4096;

pub fn intertwine(
    model_path: &Path,
    target_path: &Path,
    shift: Option<usize>,
    output: Option<&Path>,
    rel_tol: f64,
    opts: &LoadOptions,
) -> Result<Done, CliError> {
    check_tol("rel-tol", rel_tol)?;
    let model = load_form(model_path)?;
    let model_profile = vortexloop::circle_forms::MorseForm::with_tol(model.clone(), opts.morse_tol)
        .map_err(|e| CliError::from_load(model_path, e))?
        .profile;
    let target = load_loop(target_path, opts)?;
    let mismatch = |e: Error| CliError { code: EXIT_PROFILE, message: e.to_string() };
    let shift = match shift {
        Some(s) => s,
        None => *circular_match(&model_profile, target.profile(), rel_tol).first().ok_or_else(|| {
            mismatch(Error::ProfileMismatch {
                shift: 0,
                model: model_profile.omegas.clone(),
                target: target.profile().omegas.clone(),
            })
        })?,
    };
    let psi = intertwiner_with_tol(&model, &target, shift, rel_tol).map_err(|e| match e {
        Error::ProfileMismatch { .. } => mismatch(e),
        other => CliError::input(other.to_string()),
    })?;
    let residual = intertwiner_residual(&model, &target, shift, &psi, RESIDUAL_POINTS)
        .map_err(|e| CliError::input(e.to_string()))?;
    let file = DiffeoFile::from_diffeo(&psi);
    let map = match output {
        Some(path) => {
            write_file(path, &(to_json(&file) + "\n"))?;
            None
        }
        None => Some(file),
    };
    done(&IntertwineReport { schema: SCHEMA, shift, nodes: psi.len(), residual, map }, 0)
}

pub struct FlowOutputs<'a> {
    pub evolved: Option<&'a Path>,
    pub csv: Option<&'a Path>,
    pub svg: Option<&'a Path>,
}

#[derive(Serialize)]
struct FlowReportJson {
    schema: &'static str,
    scheme: &'static str,
    t_final: f64,
    dt: f64,
    steps: usize,
    area_drift: f64,
    profile_drift: f64,
    hamiltonian_drift: f64,
    equivariance_residual: f64,
}

pub fn flow(
    loop_path: &Path,
    ham_path: &Path,
    t_final: f64,
    dt: f64,
    scheme: Scheme,
    outputs: FlowOutputs,
    opts: &LoadOptions,
) -> Result<Done, CliError> {
    let l = load_loop(loop_path, opts)?;
    let h = load_hamiltonian(ham_path)?;
    let mut options = FlowOptions::new(t_final, dt, scheme);
    options.record_series = outputs.csv.is_some();
    let report = advect(&l, &h, &options).map_err(|e| match e {
        Error::StepRejected { .. } | Error::ValidationFailed(_) => CliError { code: EXIT_FLOW, message: e.to_string() },
        other => CliError::input(other.to_string()),
    })?;
    if let Some(path) = outputs.evolved {
        write_file(path, &(to_json(&LoopFile::from_loop(&report.evolved)) + "\n"))?;
    }
    if let Some(path) = outputs.csv {
        write_file(path, &report.series_csv())?;
    }
    if let Some(path) = outputs.svg {
        write_file(path, &svg::overlay(&l, &report.evolved))?;
    }
    let json = FlowReportJson {
        schema: SCHEMA,
        scheme: scheme.name(),
        t_final,
        dt,
        steps: report.steps,
        area_drift: report.area_drift,
        profile_drift: report.profile_drift,
        hamiltonian_drift: report.hamiltonian_drift,
        equivariance_residual: report.equivariance_residual,
    };
    done(&json, 0)
}
