//! Command dispatch, exit codes and report rendering.
//!
//! Exit codes: 0 all checks pass, 1 some check fails, 2 malformed input,
//! 3 a semantic precondition fails.

use std::path::PathBuf;

use courant::algebroid::{verify_axioms, AlgebroidError};
use courant::battery::{Battery, BatteryConfig};
use courant::cochain::{cartan_suite, compare, generator_set, Cochain, CochainError};
use courant::cohomology::{CohomologyError, PointComplex};
use courant::dorfman::{
    bianchi_check, bott_connection, build_connection, build_example_mjl, connection_flatness, covariant_laws,
    curvature_laws, curvature_symbol_checks, dual_connection, dual_curvature_check, endo_curvature_check,
    induced_linear_connection, verify_connection, AdaptedCase, DorfmanConnection, DorfmanError, PredualBundle,
};
use courant::report::{Check, Report};
use courant::CourantAlgebroid;
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{
    read_json, AlgebroidFile, ChristoffelFile, ConnectionFile, DiracFile, InputError, PredualFile,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Check the Courant algebroid axioms on the battery.
    VerifyAlgebroid { algebroid: PathBuf },
    /// d∘d = 0 on the generator cochains and the Cartan relations.
    Cartan { algebroid: PathBuf },
    /// Construct a Dorfman connection on a predual bundle (B = E by default),
    /// or the Christoffel-driven connection on standard(n).
    ConnectionBuild {
        algebroid: PathBuf,
        #[arg(long)]
        predual: Option<PathBuf>,
        #[arg(long, conflicts_with = "predual")]
        christoffel: Option<PathBuf>,
    },
    /// Check the three Dorfman connection axioms for given coefficients.
    ConnectionVerify {
        algebroid: PathBuf,
        connection: PathBuf,
        #[arg(long)]
        predual: Option<PathBuf>,
    },
    /// Curvature laws of a Dorfman connection.
    Curvature {
        algebroid: PathBuf,
        connection: PathBuf,
        #[arg(long)]
        predual: Option<PathBuf>,
    },
    /// The Bianchi identity of a Dorfman connection.
    Bianchi {
        algebroid: PathBuf,
        connection: PathBuf,
        #[arg(long)]
        predual: Option<PathBuf>,
    },
    /// The Bott–Dorfman connection of a Dirac structure.
    Bott { algebroid: PathBuf, dirac: PathBuf },
    /// Cohomology table of an algebroid over a point.
    Cohomology { algebroid: PathBuf },
    /// Ranks of the kernels K and F of a predual coupling.
    PredualDiagnose { algebroid: PathBuf, predual: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyAlgebroid { .. } => "verify-algebroid",
            Command::Cartan { .. } => "cartan",
            Command::ConnectionBuild { .. } => "connection-build",
            Command::ConnectionVerify { .. } => "connection-verify",
            Command::Curvature { .. } => "curvature",
            Command::Bianchi { .. } => "bianchi",
            Command::Bott { .. } => "bott",
            Command::Cohomology { .. } => "cohomology",
            Command::PredualDiagnose { .. } => "predual-diagnose",
        }
    }

    /// Named input paths in a fixed order.
    fn inputs(&self) -> Vec<(&'static str, &PathBuf)> {
        let mut out = Vec::new();
        match self {
            Command::VerifyAlgebroid { algebroid }
            | Command::Cartan { algebroid }
            | Command::Cohomology { algebroid } => out.push(("algebroid", algebroid)),
            Command::ConnectionBuild { algebroid, predual, christoffel } => {
                out.push(("algebroid", algebroid));
                out.extend(predual.iter().map(|p| ("predual", p)));
                out.extend(christoffel.iter().map(|p| ("christoffel", p)));
            }
            Command::ConnectionVerify { algebroid, connection, predual }
            | Command::Curvature { algebroid, connection, predual }
            | Command::Bianchi { algebroid, connection, predual } => {
                out.push(("algebroid", algebroid));
                out.push(("connection", connection));
                out.extend(predual.iter().map(|p| ("predual", p)));
            }
            Command::Bott { algebroid, dirac } => {
                out.push(("algebroid", algebroid));
                out.push(("dirac", dirac));
            }
            Command::PredualDiagnose { algebroid, predual } => {
                out.push(("algebroid", algebroid));
                out.push(("predual", predual));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub battery: BatteryConfig,
    pub format: Format,
    /// Cochains above this degree are left out of the d∘d checks.
    pub max_degree: i32,
    /// Highest cohomology degree tabulated; `None` means the rank.
    pub max_p: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command) -> RunConfig {
        RunConfig { command, battery: BatteryConfig::default(), format: Format::Json, max_degree: 4, max_p: None }
    }

    fn echo(&self) -> Value {
        let inputs: serde_json::Map<String, Value> = self
            .command
            .inputs()
            .into_iter()
            .map(|(k, p)| (k.to_string(), Value::String(p.display().to_string())))
            .collect();
        json!({
            "inputs": inputs,
            "battery_degree": self.battery.degree,
            "extras": self.battery.extras,
            "seed": self.battery.seed,
            "format": self.format,
            "max_degree": self.max_degree,
            "max_p": self.max_p,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatterySize {
    pub sections: usize,
    pub functions: usize,
    pub forms: usize,
}

impl BatterySize {
    fn of(b: &Battery) -> BatterySize {
        BatterySize { sections: b.sections.len(), functions: b.functions.len(), forms: b.forms.len() }
    }
}

/// The machine-readable run report. Field order is the serialization order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub battery: Option<BatterySize>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub exit_code: i32,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        if let Some(b) = &self.battery {
            out += &format!("battery: {} sections, {} functions, {} one-forms\n", b.sections, b.functions, b.forms);
        }
        out += &Report { checks: self.checks.clone() }.to_string();
        if let Some(result) = &self.result {
            if let Some(rows) = result.get("table").and_then(Value::as_array) {
                out += "   p  dim  rank d  betti\n";
                let cell = |row: &Value, k: &str| row[k].as_u64().unwrap_or_default();
                for row in rows {
                    out += &format!(
                        "{:>4} {:>4} {:>7} {:>6}\n",
                        cell(row, "p"),
                        cell(row, "dim"),
                        cell(row, "rank_d"),
                        cell(row, "betti")
                    );
                }
            } else {
                out += &format!("result: {}\n", serde_json::to_string_pretty(result).expect("serializable"));
            }
        }
        let verdict = match self.exit_code {
            0 => "all checks pass",
            1 => "some checks fail",
            _ => "precondition failed",
        };
        out += &format!("{verdict} (exit {})\n", self.exit_code);
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

/// Why a run stopped before producing its checks: exit 2, 3 and 1.
#[derive(Debug, thiserror::Error)]
enum RunError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("precondition {} failed", .0.name)]
    Precondition(Box<Check>),
    /// A construction whose own result fails a check.
    #[error("check {} failed", .0.name)]
    Failed(Box<Check>),
}

fn precondition(name: &str, identity: &str, args: Vec<String>, residual: impl Into<String>) -> RunError {
    let mut c = Check::new(name, identity);
    c.fail(args, residual);
    RunError::Precondition(Box::new(c))
}

impl From<AlgebroidError> for RunError {
    fn from(e: AlgebroidError) -> RunError {
        precondition("algebroid-data", "valid structure data (shapes, symmetric G, constant det G ≠ 0)", vec![], e.to_string())
    }
}

impl From<CohomologyError> for RunError {
    fn from(e: CohomologyError) -> RunError {
        precondition("point-complex", "n = 0 and constant structure data", vec![], e.to_string())
    }
}

impl From<CochainError> for RunError {
    fn from(e: CochainError) -> RunError {
        precondition("cochain-evaluation", "cochains evaluate on the battery", vec![], e.to_string())
    }
}

impl From<DorfmanError> for RunError {
    fn from(e: DorfmanError) -> RunError {
        let l = |i: usize| format!("l{i}");
        match &e {
            DorfmanError::NotIsotropic { i, j, value } => {
                precondition("dirac-isotropic", "⟨l_i, l_j⟩ = 0", vec![l(*i), l(*j)], value.clone())
            }
            DorfmanError::WrongRank { got, expected } => precondition(
                "dirac-rank",
                "L has rank r/2",
                vec![format!("rank {got}")],
                format!("expected {expected}"),
            ),
            DorfmanError::NotInvolutive { i, j, bracket } => {
                precondition("dirac-involutive", "⟦l_i, l_j⟧ ∈ L", vec![l(*i), l(*j)], bracket.clone())
            }
            DorfmanError::Constraint { row, col, residual } => precondition(
                "predual-constraint",
                "AᵀP = Rho",
                vec![format!("entry ({}, {})", row + 1, col + 1)],
                residual.clone(),
            ),
            DorfmanError::Inconsistent { k, column } => precondition(
                "connection-solvable",
                "AᵀC_k = N_k has a solution",
                vec![format!("k = {k}"), format!("column {column}")],
                e.to_string(),
            ),
            DorfmanError::Defect { check, args, residual } => {
                let mut c = Check::new(check, "constructed connection satisfies the axioms");
                c.fail(vec![args.clone()], residual.clone());
                RunError::Failed(Box::new(c))
            }
            _ => precondition("dorfman-data", "valid predual and connection data", vec![], e.to_string()),
        }
    }
}

fn load_algebroid(path: &PathBuf) -> Result<CourantAlgebroid, RunError> {
    let data = read_json::<AlgebroidFile>(path)?.parse()?;
    Ok(CourantAlgebroid::from_structure_data(data.n, data.rank, data.pairing, data.anchor, data.bracket)?)
}

fn load_bundle(alg: &CourantAlgebroid, predual: Option<&PathBuf>) -> Result<PredualBundle, RunError> {
    match predual {
        None => Ok(PredualBundle::of_algebroid(alg)),
        Some(path) => {
            let (p, a) = read_json::<PredualFile>(path)?.parse(alg)?;
            Ok(PredualBundle::new(alg, p, a)?)
        }
    }
}

fn load_connection(
    alg: &CourantAlgebroid,
    connection: &PathBuf,
    predual: Option<&PathBuf>,
) -> Result<DorfmanConnection, RunError> {
    let bundle = load_bundle(alg, predual)?;
    let gamma = read_json::<ConnectionFile>(connection)?.parse(&bundle)?;
    Ok(DorfmanConnection::new(&bundle, gamma)?)
}

struct Outcome {
    battery: Option<BatterySize>,
    report: Report,
    result: Option<Value>,
}

impl Outcome {
    fn checks(battery: &Battery, report: Report) -> Outcome {
        Outcome { battery: Some(BatterySize::of(battery)), report, result: None }
    }
}

fn execute(config: &RunConfig) -> Result<Outcome, RunError> {
    let battery_for = |alg: &CourantAlgebroid| Battery::new(alg, config.battery);
    match &config.command {
        Command::VerifyAlgebroid { algebroid } => {
            let alg = load_algebroid(algebroid)?;
            let battery = battery_for(&alg);
            Ok(Outcome::checks(&battery, verify_axioms(&alg, &battery)))
        }
        Command::Cartan { algebroid } => {
            let alg = load_algebroid(algebroid)?;
            let battery = battery_for(&alg);
            let mut report = Report::new();
            for (name, w) in generator_set(&alg).into_iter().filter(|(_, w)| w.degree() <= config.max_degree) {
                let dd = w.d().d();
                let what = format!("d-squared[{name}]");
                report.push(compare(&alg, &dd, &Cochain::zero(dd.degree()), &battery, &what, "d(dω) = 0")?);
            }
            report.extend(cartan_suite(&alg, &battery)?);
            Ok(Outcome::checks(&battery, report))
        }
        Command::ConnectionBuild { algebroid, predual, christoffel } => {
            let alg = load_algebroid(algebroid)?;
            let conn = match christoffel {
                Some(path) => {
                    let delta = read_json::<ChristoffelFile>(path)?.parse()?;
                    let standard = CourantAlgebroid::standard(alg.n().max(1))?;
                    if alg.n() == 0 || AlgebroidFile::from_algebroid(&alg) != AlgebroidFile::from_algebroid(&standard) {
                        return Err(precondition(
                            "standard-algebroid",
                            "the Christoffel construction lives on standard(n)",
                            vec![],
                            "algebroid data differ from standard(n)",
                        ));
                    }
                    if delta.n != alg.n() || delta.v != alg.n() {
                        return Err(precondition(
                            "christoffel-shape",
                            "Δ is a connection on TM",
                            vec![format!("n = {}, v = {}", delta.n, delta.v)],
                            format!("expected n = v = {}", alg.n()),
                        ));
                    }
                    build_example_mjl(&delta)?
                }
                None => build_connection(&load_bundle(&alg, predual.as_ref())?)?,
            };
            let battery = battery_for(&alg);
            let mut out = Outcome::checks(&battery, verify_connection(&conn, &battery));
            out.result = Some(serde_json::to_value(ConnectionFile::from_connection(&conn)).expect("serializable"));
            Ok(out)
        }
        Command::ConnectionVerify { algebroid, connection, predual } => {
            let alg = load_algebroid(algebroid)?;
            let conn = load_connection(&alg, connection, predual.as_ref())?;
            let battery = battery_for(&alg);
            Ok(Outcome::checks(&battery, verify_connection(&conn, &battery)))
        }
        Command::Curvature { algebroid, connection, predual } => {
            let alg = load_algebroid(algebroid)?;
            let conn = load_connection(&alg, connection, predual.as_ref())?;
            let battery = battery_for(&alg);
            let mut report = curvature_laws(&conn, &battery)?;
            report.extend(covariant_laws(&conn, &battery)?);
            let linear = [AdaptedCase::K, AdaptedCase::F]
                .into_iter()
                .find_map(|case| induced_linear_connection(&conn, case).ok());
            let symbols = match &linear {
                Some(d) => {
                    report.extend(d.verify(&battery));
                    report.extend(curvature_symbol_checks(&conn, d, &battery));
                    Value::String(format!("case {}", d.case()))
                }
                None => Value::String("frames adapted to neither case; symbol checks skipped".into()),
            };
            report.extend(dual_curvature_check(&dual_connection(&conn), &battery));
            report.extend(endo_curvature_check(&conn, &battery));
            // Flatness is a property of the connection, not a law: reported, not checked.
            let flat = connection_flatness(&conn, &battery);
            let flat = Value::Object(
                flat.checks.iter().map(|c| (c.name.clone(), serde_json::to_value(c).expect("serializable"))).collect(),
            );
            let mut out = Outcome::checks(&battery, report);
            out.result = Some(json!({ "induced_linear_connection": symbols, "flatness": flat }));
            Ok(out)
        }
        Command::Bianchi { algebroid, connection, predual } => {
            let alg = load_algebroid(algebroid)?;
            let conn = load_connection(&alg, connection, predual.as_ref())?;
            let battery = battery_for(&alg);
            Ok(Outcome::checks(&battery, bianchi_check(&conn, &battery)?))
        }
        Command::Bott { algebroid, dirac } => {
            let alg = load_algebroid(algebroid)?;
            let frame = read_json::<DiracFile>(dirac)?.parse(&alg)?;
            let bott = bott_connection(&alg, &frame)?;
            let battery = battery_for(&alg);
            Ok(Outcome::checks(&battery, bott.report(&battery)))
        }
        Command::Cohomology { algebroid } => {
            let alg = load_algebroid(algebroid)?;
            let complex = PointComplex::new(&alg)?;
            let max_p = config.max_p.unwrap_or(complex.rank());
            let table = complex.table(max_p);
            let betti: Vec<usize> = table.iter().map(|row| row.betti).collect();
            let report = complex.verify()?;
            Ok(Outcome {
                battery: None,
                report,
                result: Some(json!({ "table": table, "betti": betti })),
            })
        }
        Command::PredualDiagnose { algebroid, predual } => {
            let alg = load_algebroid(algebroid)?;
            let bundle = load_bundle(&alg, Some(predual))?;
            let mut constraint = Check::new("predual-constraint", "AᵀP = Rho");
            constraint.record(true, Vec::new, String::new);
            let diagnosis = bundle.diagnose();
            Ok(Outcome {
                battery: None,
                report: Report { checks: vec![constraint] },
                result: Some(serde_json::to_value(diagnosis).expect("serializable")),
            })
        }
    }
}

/// Runs one command. Input errors (exit 2) carry no report; every other
/// outcome, including precondition failures, produces one.
pub fn run(config: &RunConfig) -> Result<RunReport, InputError> {
    let base = |checks: Vec<Check>, exit_code: i32| RunReport {
        command: config.command.name().to_string(),
        config: config.echo(),
        battery: None,
        checks,
        result: None,
        exit_code,
    };
    match execute(config) {
        Ok(out) => {
            let exit_code = if out.report.passed() { 0 } else { 1 };
            Ok(RunReport { battery: out.battery, result: out.result, ..base(out.report.checks, exit_code) })
        }
        Err(RunError::Input(e)) => Err(e),
        Err(RunError::Precondition(c)) => Ok(base(vec![*c], 3)),
        Err(RunError::Failed(c)) => Ok(base(vec![*c], 1)),
    }
}
