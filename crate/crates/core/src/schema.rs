//! Serializable file formats (`"schema": "vortexloop/1"`).

use serde::{Deserialize, Serialize};

use crate::circle_forms::{CircleDiffeo, CircleForm, FormKind};
use crate::error::{Error, Result};
use crate::flow::{Bump, PlanarHamiltonian};
use crate::loops::{DecoratedLoop, Point};

pub const SCHEMA: &str = "vortexloop/1";

fn check_schema(found: &Option<String>) -> Result<()> {
    match found {
        Some(s) if s != SCHEMA => Err(Error::InvalidInput(format!(
            "schema: expected \"{SCHEMA}\", found \"{s}\""
        ))),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigCoeffs {
    pub a0: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FormFile {
    Trig { coeffs: TrigCoeffs },
    Samples { values: Vec<f64> },
}

impl FormFile {
    pub fn to_form(&self) -> Result<CircleForm> {
        match self {
            FormFile::Trig { coeffs } => CircleForm::trig(coeffs.a0, coeffs.cos.clone(), coeffs.sin.clone()),
            FormFile::Samples { values } => CircleForm::from_samples(values.clone()),
        }
    }

    pub fn from_form(form: &CircleForm) -> Self {
        match form.kind() {
            FormKind::Samples => FormFile::Samples {
                values: form.samples().expect("sampled form").to_vec(),
            },
            FormKind::Trig => {
                let s = form.series();
                FormFile::Trig {
                    coeffs: TrigCoeffs { a0: s.a0, cos: s.cos.clone(), sin: s.sin.clone() },
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub samples: Vec<Point>,
    pub beta: FormFile,
}

impl LoopFile {
    pub fn from_loop(l: &DecoratedLoop) -> Self {
        LoopFile {
            schema: Some(SCHEMA.to_string()),
            samples: l.embedding().points().to_vec(),
            beta: FormFile::from_form(l.decoration()),
        }
    }

    pub fn to_loop(&self, auto_orient: bool, morse_tol: f64) -> Result<DecoratedLoop> {
        check_schema(&self.schema)?;
        DecoratedLoop::load(self.samples.clone(), self.beta.to_form()?, auto_orient, morse_tol)
    }
}

/// A bare density, used as the model of an intertwiner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub beta: FormFile,
}

impl ModelFile {
    pub fn to_form(&self) -> Result<CircleForm> {
        check_schema(&self.schema)?;
        self.beta.to_form()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpFile {
    pub center: Point,
    pub sigma: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub bumps: Vec<BumpFile>,
}

impl HamiltonianFile {
    pub fn to_hamiltonian(&self) -> Result<PlanarHamiltonian> {
        check_schema(&self.schema)?;
        let bumps = self
            .bumps
            .iter()
            .map(|b| Bump::new(b.center, b.sigma, b.amplitude))
            .collect::<Result<Vec<_>>>()?;
        Ok(PlanarHamiltonian::new(bumps))
    }

    pub fn from_hamiltonian(h: &PlanarHamiltonian) -> Self {
        HamiltonianFile {
            schema: Some(SCHEMA.to_string()),
            bumps: h
                .bumps
                .iter()
                .map(|b| BumpFile { center: b.center, sigma: b.sigma, amplitude: b.amplitude })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffeoFile {
    pub schema: String,
    /// `γ(2πj/M)` on the lift.
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl DiffeoFile {
    pub fn from_diffeo(g: &CircleDiffeo) -> Self {
        DiffeoFile {
            schema: SCHEMA.to_string(),
            values: g.values().to_vec(),
            slopes: g.slopes().to_vec(),
        }
    }

    pub fn to_diffeo(&self) -> Result<CircleDiffeo> {
        check_schema(&Some(self.schema.clone()))?;
        CircleDiffeo::new(self.values.clone(), self.slopes.clone())
    }
}
