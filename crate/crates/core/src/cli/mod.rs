//! Command-line front end: JSON run configurations in, CSV or JSON result
//! tables out. Output is a pure function of the configuration.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

pub use config::{
    parse_config, ComplexValue, Entry, EnvelopeSpec, FieldSpec, NamedState, OutputFormat,
    RunConfig, ScalingSpec, Scenario, StateSpec, SystemSpec,
};

use crate::collision::Trajectory;
use crate::error::{Error, Result};
use crate::qcore::{trace_distance, C64};
use crate::scenarios::{
    bloch_run, convergence_study, discretize_input_output, single_photon_run,
    single_photon_run_with_pair, spontaneous_emission_run, FieldConfig,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

/// Scenario result: ordered metadata plus one table.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub scenario: Scenario,
    pub config: Value,
    pub metadata: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[k] {
                    Cell::Int(i) => i as f64,
                    Cell::Real(x) => x,
                })
                .collect(),
        )
    }
}

fn complex(z: C64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn discretization_metadata(field: &FieldConfig, meta: &mut Map<String, Value>) -> Result<()> {
    let (spec, bath) = discretize_input_output(field)?;
    meta.insert("n_steps".into(), json!(spec.n_steps()));
    meta.insert("dt".into(), json!(spec.dt()));
    meta.insert("g".into(), json!(spec.g()));
    meta.insert("Gamma".into(), json!(spec.rate()));
    meta.insert("d_anc".into(), json!(spec.d_anc()));
    meta.insert(
        "truncation_fidelity".into(),
        json!(bath.diagnostics().truncation_fidelity),
    );
    Ok(())
}

/// Observable columns of each labelled trajectory, then the requested
/// trace distances.
fn trajectory_table(
    trajs: &[(&str, &Trajectory)],
    distances: &[(&str, &Trajectory, &Trajectory)],
) -> (Vec<String>, Vec<Vec<Cell>>) {
    let mut columns = vec!["step".to_string(), "t".to_string()];
    for (label, t) in trajs {
        columns.extend(t.observables.iter().map(|(n, _)| format!("{n}_{label}")));
    }
    columns.extend(
        distances
            .iter()
            .map(|(n, _, _)| format!("trace_distance_{n}")),
    );
    let base = trajs[0].1;
    let rows = (0..base.len())
        .map(|i| {
            let mut row = vec![Cell::Int(i as u64), Cell::Real(base.times[i])];
            for (_, t) in trajs {
                row.extend(t.observables.iter().map(|(_, v)| Cell::Real(v[i])));
            }
            for (_, a, b) in distances {
                row.push(Cell::Real(trace_distance(
                    a.states[i].op(),
                    b.states[i].op(),
                )));
            }
            row
        })
        .collect();
    (columns, rows)
}

/// Runs the configured scenario.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let field = cfg.field_config()?;
    let mut metadata = Map::new();
    metadata.insert("gamma".into(), json!(cfg.gamma));
    metadata.insert("t_final".into(), json!(cfg.t_final));
    let (columns, rows) = match cfg.scenario {
        Scenario::SpontaneousEmission => {
            discretization_metadata(&field, &mut metadata)?;
            let run = spontaneous_emission_run(&field)?;
            metadata.insert(
                "max_trace_distance_cm_vs_me".into(),
                json!(run.max_trace_distance),
            );
            metadata.insert("endpoint_error".into(), json!(run.endpoint_error));
            metadata.insert("diagnostics".into(), json!(run.generator_diagnostics));
            trajectory_table(
                &[("cm", &run.collision), ("me", &run.master)],
                &[("cm_vs_me", &run.collision, &run.master)],
            )
        }
        Scenario::Bloch => {
            discretization_metadata(&field, &mut metadata)?;
            let run = bloch_run(&field)?;
            let drive = run.drive.first().copied().unwrap_or_default();
            metadata.insert("drive_amplitude".into(), complex(drive));
            metadata.insert(
                "max_pairwise_trace_distance".into(),
                json!(run.max_pairwise_distance()),
            );
            trajectory_table(
                &[
                    ("cm", &run.quantum),
                    ("me", &run.master),
                    ("sc", &run.semiclassical),
                ],
                &[
                    ("cm_vs_me", &run.quantum, &run.master),
                    ("cm_vs_sc", &run.quantum, &run.semiclassical),
                ],
            )
        }
        Scenario::SinglePhoton => {
            discretization_metadata(&field, &mut metadata)?;
            let run = match cfg.witness_states()? {
                Some((a, b)) => single_photon_run_with_pair(&field, &a, &b)?,
                None => single_photon_run(&field)?,
            };
            metadata.insert("quadrature_error".into(), json!(run.quadrature_error));
            metadata.insert("revival_eps".into(), json!(run.witness.eps));
            metadata.insert("witness_fired".into(), json!(run.witness.fired()));
            metadata.insert(
                "revival_steps".into(),
                json!(run.witness.revivals.iter().map(|r| r.0).collect::<Vec<_>>()),
            );
            metadata.insert("max_revival".into(), json!(run.witness.max_revival()));
            trajectory_table(
                &[("a", &run.first), ("b", &run.second)],
                &[("a_vs_b", &run.first, &run.second)],
            )
        }
        Scenario::Convergence => {
            let n_list = cfg.n_list.clone().unwrap_or_default();
            let report = convergence_study(&field, &n_list, cfg.scaling())?;
            let scaling = match cfg.scaling() {
                crate::scenarios::CouplingScaling::Rate => json!("rate"),
                crate::scenarios::CouplingScaling::FixedG(g) => json!({"fixed_g": g}),
            };
            metadata.insert("coupling_scaling".into(), scaling);
            metadata.insert(
                "reference_substeps".into(),
                json!(report.reference_substeps),
            );
            metadata.insert("slope".into(), json!(report.slope));
            let columns = ["n_steps", "dt", "max_state_error", "endpoint_error"]
                .map(String::from)
                .to_vec();
            let rows = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.n_steps as u64),
                        Cell::Real(r.dt),
                        Cell::Real(r.max_state_error),
                        Cell::Real(r.endpoint_error),
                    ]
                })
                .collect();
            (columns, rows)
        }
    };
    Ok(Report {
        scenario: cfg.scenario,
        config: serde_json::to_value(cfg).map_err(|e| Error::Config(e.to_string()))?,
        metadata,
        columns,
        rows,
    })
}

fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with `#` metadata lines, a header row and one line per sample.
pub fn render_csv(report: &Report) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "# qcollide {VERSION}");
    let _ = writeln!(out, "# scenario: {}", report.scenario.name());
    let _ = writeln!(out, "# config: {}", report.config);
    for (k, v) in &report.metadata {
        let _ = writeln!(out, "# {k}: {v}");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Invariant(format!("csv encoding failed: {e}"));
    w.write_record(&report.columns).map_err(io)?;
    for row in &report.rows {
        w.write_record(row.iter().map(|c| match c {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format_real(*x),
        }))
        .map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Invariant(format!("csv encoding failed: {e}")))?;
    out.push_str(&String::from_utf8_lossy(&bytes));
    Ok(out)
}

/// One JSON object with the config echo, metadata and rows as objects.
pub fn render_json(report: &Report) -> Result<String> {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = report
                .columns
                .iter()
                .zip(row)
                .map(|(k, c)| {
                    let v = match c {
                        Cell::Int(i) => json!(i),
                        Cell::Real(x) => json!(x),
                    };
                    (k.clone(), v)
                })
                .collect();
            Value::Object(obj)
        })
        .collect();
    let doc = json!({
        "version": VERSION,
        "scenario": report.scenario.name(),
        "config": report.config,
        "metadata": report.metadata,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Invariant(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn render(report: &Report, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => render_csv(report),
        OutputFormat::Json => render_json(report),
    }
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Runs `cfg` and writes the result to `out` (falling back to the config's
/// `out_path`, then stdout).
pub fn run(cfg: &RunConfig, out: Option<&Path>, format: Option<OutputFormat>) -> Result<()> {
    let target = out.map(Path::to_path_buf).or_else(|| cfg.out_path.clone());
    if let Some(path) = &target {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            if !dir.is_dir() {
                return Err(Error::File {
                    path: path.display().to_string(),
                    source: std::io::Error::new(
                        std::io::ErrorKind::NotFound,
                        format!("directory {} does not exist", dir.display()),
                    ),
                });
            }
        }
    }
    let report = execute(cfg)?;
    let text = render(&report, format.unwrap_or(cfg.output))?;
    match target {
        Some(path) => fs::write(&path, text).map_err(|source| Error::File {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(Error::Io),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qcollide",
    version,
    about = "Quantum collision model simulations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write its result table.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Parse and validate a configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Run {
            config,
            out,
            format,
        } => read_config(config).and_then(|cfg| run(&cfg, out.as_deref(), *format)),
        Command::Validate { config } => read_config(config).map(|_| println!("ok")),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vacuum(n: usize) -> RunConfig {
        parse_config(&format!(
            r#"{{"scenario": "spontaneous_emission", "gamma": 1, "t_final": 1, "n_steps": {n}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn csv_layout() {
        let report = execute(&vacuum(10)).unwrap();
        let csv = render_csv(&report).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), format!("# qcollide {VERSION}"));
        let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
        assert!(header.starts_with("step,t,rho_ee_cm"));
        assert!(header.ends_with("trace_distance_cm_vs_me"));
        let last = csv.lines().last().unwrap();
        assert!(last.starts_with("10,1.0000000000000000e0,"));
        assert!(csv.contains("# Gamma: 1.0"));
    }

    #[test]
    fn json_is_single_object() {
        let report = execute(&vacuum(5)).unwrap();
        let v: Value = serde_json::from_str(&render_json(&report).unwrap()).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 6);
        assert_eq!(v["config"]["n_steps"], json!(5));
        assert_eq!(v["version"], json!(VERSION));
    }

    #[test]
    fn real_format_round_trips() {
        for x in [std::f64::consts::PI, -1e-300, 0.1 + 0.2, 1.0 / 3.0] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn missing_directory_is_config_class() {
        let err = run(
            &vacuum(3),
            Some(Path::new("/nonexistent-dir/out.csv")),
            None,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }
}
