use std::path::PathBuf;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{pauli, DensityMatrix, Operator, C64};
use crate::scenarios::{
    default_truncation, extremal_pair, CouplingScaling, Envelope, FieldConfig, FieldKind,
    SystemConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    SpontaneousEmission,
    Bloch,
    SinglePhoton,
    Convergence,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::SpontaneousEmission => "spontaneous_emission",
            Scenario::Bloch => "bloch",
            Scenario::SinglePhoton => "single_photon",
            Scenario::Convergence => "convergence",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexValue {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexValue> for C64 {
    fn from(v: ComplexValue) -> Self {
        C64::new(v.re, v.im)
    }
}

/// A matrix or vector entry: a bare number or `{re, im}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex(ComplexValue),
}

impl From<Entry> for C64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex(z) => z.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvelopeSpec {
    Gaussian {
        center: f64,
        width: f64,
    },
    Tabulated {
        omega_start: f64,
        d_omega: f64,
        values: Vec<Entry>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Vacuum,
    Coherent {
        z: ComplexValue,
        #[serde(default)]
        omega: f64,
    },
    SinglePhoton {
        envelope: EnvelopeSpec,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    /// Top eigenvector of b†b.
    Excited,
    /// Bottom eigenvector of b†b.
    Ground,
    MaximallyMixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(NamedState),
    Matrix(Vec<Vec<Entry>>),
}

/// Defaults to a two-level emitter with H_S = omega0 |e><e| and b = σ₋.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_sys: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<StateSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingSpec {
    Rate,
    FixedG(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub gamma: f64,
    pub t_final: f64,
    /// Required except for convergence runs, which use `n_list`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<usize>,
    /// Defaults to the vacuum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub system: SystemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_anc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_scaling: Option<ScalingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_pair: Option<[StateSpec; 2]>,
    #[serde(default)]
    pub output: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_path: Option<PathBuf>,
}

/// Parses and validates a JSON run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn matrix(rows: &[Vec<Entry>], name: &str) -> Result<DMatrix<C64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(config_err(format!(
            "{name} must be a non-empty square matrix"
        )));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c].into()))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma", self.gamma), ("t_final", self.t_final)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(format!("{name} must be positive")));
            }
        }
        match (self.scenario, &self.n_list) {
            (Scenario::Convergence, None) => {
                return Err(config_err(
                    "n_list is required for the convergence scenario",
                ))
            }
            (Scenario::Convergence, Some(list)) if list.len() < 3 => {
                return Err(config_err("n_list must hold at least three step counts"))
            }
            (Scenario::Convergence, _) => {}
            (_, Some(_)) => {
                return Err(config_err(
                    "n_list is only used by the convergence scenario",
                ))
            }
            (_, None) if self.n_steps.is_none() => return Err(config_err("n_steps is required")),
            _ => {}
        }
        if self.coupling_scaling.is_some() && self.scenario != Scenario::Convergence {
            return Err(config_err(
                "coupling_scaling is only used by the convergence scenario",
            ));
        }
        if self.witness_pair.is_some() && self.scenario != Scenario::SinglePhoton {
            return Err(config_err(
                "witness_pair is only used by the single_photon scenario",
            ));
        }
        let field = self.field.clone().unwrap_or(FieldSpec::Vacuum);
        let ok = match self.scenario {
            Scenario::SpontaneousEmission => matches!(field, FieldSpec::Vacuum),
            Scenario::Bloch => matches!(field, FieldSpec::Coherent { .. }),
            Scenario::SinglePhoton => matches!(field, FieldSpec::SinglePhoton { .. }),
            Scenario::Convergence => !matches!(field, FieldSpec::SinglePhoton { .. }),
        };
        if !ok {
            return Err(config_err(format!(
                "field kind does not fit scenario {}",
                self.scenario.name()
            )));
        }
        self.field_config()?;
        if let Some(ScalingSpec::FixedG(g)) = self.coupling_scaling {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(config_err("fixed_g must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn scaling(&self) -> CouplingScaling {
        match self.coupling_scaling {
            Some(ScalingSpec::FixedG(g)) => CouplingScaling::FixedG(g),
            _ => CouplingScaling::Rate,
        }
    }

    fn field_kind(&self) -> FieldKind {
        match self.field.clone().unwrap_or(FieldSpec::Vacuum) {
            FieldSpec::Vacuum => FieldKind::Vacuum,
            FieldSpec::Coherent { z, omega } => FieldKind::Coherent { z: z.into(), omega },
            FieldSpec::SinglePhoton { envelope } => FieldKind::SinglePhoton(match envelope {
                EnvelopeSpec::Gaussian { center, width } => Envelope::Gaussian { center, width },
                EnvelopeSpec::Tabulated {
                    omega_start,
                    d_omega,
                    values,
                } => Envelope::Tabulated {
                    omega_start,
                    d_omega,
                    values: values.into_iter().map(C64::from).collect(),
                },
            }),
        }
    }

    pub fn system_config(&self) -> Result<SystemConfig> {
        let s = &self.system;
        let b = match &s.b {
            Some(rows) => Operator::from_matrix(matrix(rows, "b")?)?,
            None => pauli::sigma_minus(),
        };
        let h_sys = match (&s.h_sys, s.omega0) {
            (Some(_), Some(_)) => return Err(config_err("give either h_sys or omega0, not both")),
            (Some(rows), None) => Operator::from_matrix(matrix(rows, "h_sys")?)?,
            (None, omega0) => {
                if s.b.is_some() && omega0.is_some() {
                    return Err(config_err("omega0 needs the default two-level system"));
                }
                match omega0 {
                    Some(w) if !w.is_finite() => return Err(config_err("omega0 must be finite")),
                    Some(w) => pauli::excited_projector().scale_real(w),
                    None => Operator::zeros(b.dims()),
                }
            }
        };
        if h_sys.side() != b.side() {
            return Err(config_err("h_sys and b must have the same dimension"));
        }
        if h_sys.hermiticity_defect() > 1e-10 {
            return Err(config_err("h_sys must be Hermitian"));
        }
        let rho0 = self.state(
            s.rho0
                .as_ref()
                .unwrap_or(&StateSpec::Named(NamedState::Excited)),
            &b,
            "rho0",
        )?;
        Ok(SystemConfig { h_sys, b, rho0 })
    }

    fn state(&self, spec: &StateSpec, b: &Operator, name: &str) -> Result<DensityMatrix> {
        match spec {
            StateSpec::Named(NamedState::Excited) => Ok(extremal_pair(b).0),
            StateSpec::Named(NamedState::Ground) => Ok(extremal_pair(b).1),
            StateSpec::Named(NamedState::MaximallyMixed) => {
                Ok(DensityMatrix::maximally_mixed(b.dims()))
            }
            StateSpec::Matrix(rows) => {
                let m = matrix(rows, name)?;
                if m.nrows() != b.side() {
                    return Err(config_err(format!("{name} must match the dimension of b")));
                }
                DensityMatrix::new(Operator::from_matrix(m)?)
                    .map_err(|e| config_err(format!("{name} is not a density matrix: {e}")))
            }
        }
    }

    pub fn witness_states(&self) -> Result<Option<(DensityMatrix, DensityMatrix)>> {
        let Some([a, b]) = &self.witness_pair else {
            return Ok(None);
        };
        let sys = self.system_config()?;
        Ok(Some((
            self.state(a, &sys.b, "witness_pair[0]")?,
            self.state(b, &sys.b, "witness_pair[1]")?,
        )))
    }

    /// Field configuration; for convergence runs `n_steps` defaults to the
    /// first entry of `n_list`.
    pub fn field_config(&self) -> Result<FieldConfig> {
        let kind = self.field_kind();
        let n_steps = self
            .n_steps
            .or_else(|| self.n_list.as_ref().and_then(|l| l.first().copied()))
            .ok_or_else(|| config_err("n_steps is required"))?;
        let d_anc = self.d_anc.unwrap_or_else(|| default_truncation(&kind));
        let system = self.system_config()?;
        FieldConfig::new(kind, self.gamma, self.t_final, n_steps, system)
            .and_then(|c| c.with_truncation(d_anc))
            .map_err(|e| match e {
                Error::InvalidInput(msg) | Error::DimensionMismatch(msg) => Error::Config(msg),
                other => other,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        r#"{"scenario": "spontaneous_emission", "gamma": 1, "t_final": 1, "n_steps": 1000}"#;

    #[test]
    fn minimal_vacuum_config() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.scenario, Scenario::SpontaneousEmission);
        assert_eq!(cfg.output, OutputFormat::Csv);
        let field = cfg.field_config().unwrap();
        assert_eq!(field.kind, FieldKind::Vacuum);
        assert!((field.system.rho0.population(1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn negative_gamma_named() {
        let err = parse_config(&MINIMAL.replace("\"gamma\": 1", "\"gamma\": -1")).unwrap_err();
        assert!(err.to_string().contains("gamma must be positive"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unknown_key_listed() {
        let err = parse_config(&MINIMAL.replace("\"gamma\"", "\"gama\"")).unwrap_err();
        assert!(err.to_string().contains("gama"), "{err}");
    }

    #[test]
    fn malformed_document_has_location() {
        let err = parse_config("{\"scenario\": ").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn scenario_field_mismatch() {
        let text = r#"{"scenario": "bloch", "gamma": 1, "t_final": 1, "n_steps": 10}"#;
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn coherent_and_custom_system() {
        let text = r#"{
            "scenario": "bloch", "gamma": 1, "t_final": 2, "n_steps": 20, "d_anc": 12,
            "field": {"kind": "coherent", "z": {"re": 3, "im": 0.5}},
            "system": {"h_sys": [[0, 0], [0, 1]], "b": [[0, 1], [0, 0]],
                       "rho0": [[0.5, {"re": 0, "im": -0.5}], [{"re": 0, "im": 0.5}, 0.5]]}
        }"#;
        let field = parse_config(text).unwrap().field_config().unwrap();
        assert_eq!(field.d_anc, 12);
        assert_eq!(
            field.kind,
            FieldKind::Coherent {
                z: C64::new(3.0, 0.5),
                omega: 0.0
            }
        );
        assert!((field.system.rho0.op().get(0, 1) - C64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn convergence_needs_list() {
        let text = r#"{"scenario": "convergence", "gamma": 1, "t_final": 1}"#;
        assert!(parse_config(text).is_err());
        let text = r#"{"scenario": "convergence", "gamma": 1, "t_final": 1, "n_list": [10, 20, 40],
                       "coupling_scaling": {"fixed_g": 1.0}}"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.scaling(), CouplingScaling::FixedG(1.0));
    }

    #[test]
    fn invalid_rho_rejected() {
        let text = r#"{"scenario": "spontaneous_emission", "gamma": 1, "t_final": 1, "n_steps": 10,
                       "system": {"rho0": [[2, 0], [0, -1]]}}"#;
        assert!(parse_config(text).is_err());
    }
}
