use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fnlie::classify::{h_map, j_map, HermitianPair};
use fnlie::connection::HermitianConnection;
use fnlie::dsl::{self, Binding, ModelFile};
use fnlie::exterior::ComplexForm;
use fnlie::qbundle::ProjTvf;
use fnlie::report::Report;
use fnlie::verify::{self, Suite, SuiteOutcome, SuiteParams};

#[derive(Parser)]
#[command(name = "fnlie", version, about = "Exact calculus of tangent-valued forms on a Hermitian line bundle")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate an expression against a model file.
    Eval {
        /// Model file defining the chart and named objects.
        #[arg(long)]
        file: PathBuf,
        /// Expression, e.g. "fn(X,Y)" or "curv(c)".
        expr: String,
    },
    /// Check a property of a named definition.
    Check {
        #[arg(long)]
        file: PathBuf,
        /// Name of the definition to check.
        name: String,
        /// projectable | real-linear | complex-linear | hermitian | hermitian-connection
        property: String,
    },
    /// Classify a Hermitian tangent-valued form through a Hermitian
    /// connection, or reconstruct one from a (underline, bar) pair.
    Classify {
        #[arg(long)]
        file: PathBuf,
        /// Name of the connection definition.
        connection: String,
        /// A projtvf name (forward direction), or a pair stem `P` with
        /// definitions `Pu` and `Pb` (inverse direction).
        name: String,
    },
    /// Run a randomized verification suite.
    Verify {
        /// Suite name, e.g. fn-jacobi or iso-theorem.
        suite: String,
        /// Re-check a dumped counterexample (or fixture) model instead of
        /// running randomized trials.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long = "max-degree", default_value_t = 2)]
        max_degree: usize,
        #[arg(long = "coeff-degree", default_value_t = 2)]
        coeff_degree: u32,
        /// Trial count; each suite has its own default.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the counterexample model on failure.
        #[arg(long, default_value = "fnlie-counterexample.model")]
        dump: PathBuf,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli.cmd, format) {
        Ok(report) => {
            print_report(&report, format);
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

enum CliError {
    /// Bad invocation or unreadable/unparsable input: exit 2.
    Usage(String),
    /// The computation itself could not be carried out: exit 1.
    Run(String),
}

impl From<fnlie::Error> for CliError {
    fn from(e: fnlie::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

fn print_report(report: &Report, format: Format) {
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
}

fn load_model(path: &Path) -> Result<ModelFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    ModelFile::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn run(cmd: Cmd, _format: Format) -> Result<Report, CliError> {
    match cmd {
        Cmd::Eval { file, expr } => cmd_eval(&file, &expr),
        Cmd::Check { file, name, property } => cmd_check(&file, &name, &property),
        Cmd::Classify { file, connection, name } => cmd_classify(&file, &connection, &name),
        Cmd::Verify { suite, file, dim, max_degree, coeff_degree, trials, seed, dump } => {
            cmd_verify(&suite, file.as_deref(), dim, max_degree, coeff_degree, trials, seed, &dump)
        }
    }
}

fn cmd_eval(file: &Path, expr: &str) -> Result<Report, CliError> {
    let model = load_model(file)?;
    let value = model.eval_expression(expr).map_err(|e| match e {
        dsl::DslError::Syntax { .. } | dsl::DslError::UnknownName { .. } => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Run(other.to_string()),
    })?;
    Ok(Report::value("eval", &value, &model.qchart).with_input("expr", expr))
}

fn cmd_check(file: &Path, name: &str, property: &str) -> Result<Report, CliError> {
    let model = load_model(file)?;
    let def = model
        .get(name)
        .ok_or_else(|| CliError::Usage(format!("unknown name `{name}`")))?;
    let report = |outcome: Option<String>| {
        let base = Report::pass("check")
            .with_input("name", name)
            .with_input("property", property);
        match outcome {
            None => Ok(base),
            Some(reason) => Ok(Report::fail("check", &reason)
                .with_input("name", name)
                .with_input("property", property)),
        }
    };
    match property {
        "projectable" => {
            let t = match &def.binding {
                Binding::Tvf(t) => t.clone(),
                Binding::ProjTvf(p) => p.embed(),
                Binding::Connection(c) => c.as_tvf().embed(),
                _ => return Err(CliError::Usage(format!("`{name}` is not a tangent-valued form"))),
            };
            report(match ProjTvf::project(&t, &model.qchart) {
                Ok(_) => None,
                Err(e) => Some(e.to_string()),
            })
        }
        "real-linear" | "complex-linear" | "hermitian" => {
            let p = match &def.binding {
                Binding::ProjTvf(p) => p.clone(),
                Binding::Tvf(t) => match ProjTvf::project(t, &model.qchart) {
                    Ok(p) => p,
                    Err(e) => return report(Some(e.to_string())),
                },
                Binding::Connection(c) => c.as_tvf(),
                _ => return Err(CliError::Usage(format!("`{name}` is not a tangent-valued form"))),
            };
            let violation = match property {
                "real-linear" => real_linear_violation(&p)?,
                "complex-linear" => complex_linear_violation(&p)?,
                _ => hermitian_violation(&p)?,
            };
            report(violation)
        }
        "hermitian-connection" => {
            let c = match &def.binding {
                Binding::Connection(c) => c.clone(),
                _ => return Err(CliError::Usage(format!("`{name}` is not a connection"))),
            };
            report(hermitian_connection_violation(&c, &model)?)
        }
        other => Err(CliError::Usage(format!(
            "unknown property `{other}` (expected projectable, real-linear, complex-linear, hermitian, or hermitian-connection)"
        ))),
    }
}

fn mi_label(mi: &fnlie::exterior::MultiIndex, model_chart: &fnlie::scalar::Chart) -> String {
    let names: Vec<String> =
        mi.indices().iter().map(|&i| model_chart.coord(i).name.clone()).collect();
    format!("({})", names.join(","))
}

fn real_linear_violation(p: &ProjTvf) -> Result<Option<String>, CliError> {
    for ((mi, a), f) in p.fiber_comps() {
        if !f.is_fiber_linear() {
            return Ok(Some(format!(
                "Xi^{}_{} is not linear in (w1, w2)",
                a + 1,
                mi_label(mi, p.qchart().total())
            )));
        }
    }
    Ok(None)
}

fn complex_linear_violation(p: &ProjTvf) -> Result<Option<String>, CliError> {
    if let Some(v) = real_linear_violation(p)? {
        return Ok(Some(v));
    }
    let keys: Vec<fnlie::exterior::MultiIndex> =
        p.fiber_comps().map(|((mi, _), _)| mi.clone()).collect();
    for mi in keys {
        let c11 = p.fiber_coeff(&mi, 0, 0)?;
        let c12 = p.fiber_coeff(&mi, 0, 1)?;
        let c21 = p.fiber_coeff(&mi, 1, 0)?;
        let c22 = p.fiber_coeff(&mi, 1, 1)?;
        let label = mi_label(&mi, p.qchart().total());
        if c11 != c22 {
            return Ok(Some(format!("Xi^1_{label},1 differs from Xi^2_{label},2")));
        }
        if c21 != c12.neg() {
            return Ok(Some(format!("Xi^2_{label},1 differs from -Xi^1_{label},2")));
        }
    }
    Ok(None)
}

fn hermitian_violation(p: &ProjTvf) -> Result<Option<String>, CliError> {
    if let Some(v) = real_linear_violation(p)? {
        return Ok(Some(v));
    }
    let keys: Vec<fnlie::exterior::MultiIndex> =
        p.fiber_comps().map(|((mi, _), _)| mi.clone()).collect();
    for mi in keys {
        let c11 = p.fiber_coeff(&mi, 0, 0)?;
        let c12 = p.fiber_coeff(&mi, 0, 1)?;
        let c21 = p.fiber_coeff(&mi, 1, 0)?;
        let c22 = p.fiber_coeff(&mi, 1, 1)?;
        let label = mi_label(&mi, p.qchart().total());
        if !c11.is_zero() {
            return Ok(Some(format!("Xi^1_{label},1 != 0")));
        }
        if !c22.is_zero() {
            return Ok(Some(format!("Xi^2_{label},2 != 0")));
        }
        if c21 != c12.neg() {
            return Ok(Some(format!("Xi^2_{label},1 differs from -Xi^1_{label},2")));
        }
    }
    Ok(None)
}

fn hermitian_connection_violation(
    c: &fnlie::connection::Connection,
    model: &ModelFile,
) -> Result<Option<String>, CliError> {
    let qc = &model.qchart;
    let total = qc.total();
    let w1 = fnlie::scalar::ScalarField::coordinate(total, qc.w_index(0));
    let w2 = fnlie::scalar::ScalarField::coordinate(total, qc.w_index(1));
    for lambda in 0..qc.n() {
        let c1 = c.comp(0, lambda);
        let c2 = c.comp(1, lambda);
        let a_coeff = c2.diff_idx(qc.w_index(0));
        let name = &total.coord(lambda).name;
        if c2 != a_coeff.mul(&w1) {
            return Ok(Some(format!("c^2_{name} is not of the form A_{name} w1")));
        }
        if c1 != a_coeff.mul(&w2).neg() {
            return Ok(Some(format!("c^1_{name} is not of the form -A_{name} w2")));
        }
        if a_coeff.restrict(qc.base()).is_err() {
            return Ok(Some(format!("A_{name} depends on the fibre coordinates")));
        }
    }
    Ok(None)
}

fn cmd_classify(file: &Path, connection: &str, name: &str) -> Result<Report, CliError> {
    let model = load_model(file)?;
    let conn = match model.get(connection).map(|d| &d.binding) {
        Some(Binding::Connection(c)) => c.clone(),
        Some(_) => return Err(CliError::Usage(format!("`{connection}` is not a connection"))),
        None => return Err(CliError::Usage(format!("unknown name `{connection}`"))),
    };
    let h = match conn.hermitian_potential()? {
        Some(a) => HermitianConnection::new(&model.qchart, a)?,
        None => {
            return Ok(Report::fail(
                "classify",
                &format!("connection `{connection}` is not Hermitian"),
            )
            .with_input("connection", connection)
            .with_input("name", name))
        }
    };
    let total = model.qchart.total().clone();
    if let Some(def) = model.get(name) {
        // forward: Ξ ↦ (Ξ̲, Ξ̄)
        let xi = match &def.binding {
            Binding::ProjTvf(p) => p.clone(),
            Binding::Tvf(t) => ProjTvf::project(t, &model.qchart)?,
            _ => return Err(CliError::Usage(format!("`{name}` is not a tangent-valued form"))),
        };
        let pair = match h_map(&h, &xi) {
            Ok(p) => p,
            Err(e) => {
                return Ok(Report::fail("classify", &e.to_string())
                    .with_input("connection", connection)
                    .with_input("name", name))
            }
        };
        let reconstructed = j_map(&h, &pair)?;
        let roundtrip = dsl::tangent_str(&reconstructed.embed(), &model.qchart)
            == dsl::tangent_str(&xi.embed(), &model.qchart);
        let mut report = Report::value(
            "classify",
            &dsl::Value::Tangent(pair.underline.promote(&total)),
            &model.qchart,
        )
        .with_input("connection", connection)
        .with_input("name", name)
        .with_input("direction", "forward")
        .with_input("bar", dsl::report_form(&ComplexForm::real(pair.bar.promote(&total))))
        .with_input("roundtrip", if roundtrip { "ok" } else { "mismatch" });
        if !roundtrip {
            report.outcome =
                fnlie::report::Outcome::Fail { reason: "round trip mismatch".to_string() };
        }
        Ok(report)
    } else {
        // inverse: (Ξ̲, Ξ̄) ↦ Ξ, from the pair stem `name` with defs
        // `<name>u` and `<name>b`
        let u = match model.get(&format!("{name}u")).map(|d| &d.binding) {
            Some(Binding::Tvf(t)) => dsl::restrict_tangent(t, &model.qchart)
                .ok_or_else(|| CliError::Usage(format!("`{name}u` must live on the base")))?,
            _ => return Err(CliError::Usage(format!("unknown name `{name}` (no `{name}u` pair)"))),
        };
        let b = match model.get(&format!("{name}b")).map(|d| &d.binding) {
            Some(Binding::Form(f)) => f
                .restrict(model.qchart.base())
                .map_err(|_| CliError::Usage(format!("`{name}b` must live on the base")))?,
            _ => return Err(CliError::Usage(format!("pair `{name}` is missing form `{name}b`"))),
        };
        let pair = HermitianPair::new(u, b)?;
        let xi = j_map(&h, &pair)?;
        let back = h_map(&h, &xi)?;
        let roundtrip = back == pair;
        let mut report =
            Report::value("classify", &dsl::Value::Tangent(xi.embed()), &model.qchart)
                .with_input("connection", connection)
                .with_input("name", name)
                .with_input("direction", "inverse")
                .with_input("roundtrip", if roundtrip { "ok" } else { "mismatch" });
        if !roundtrip {
            report.outcome =
                fnlie::report::Outcome::Fail { reason: "round trip mismatch".to_string() };
        }
        Ok(report)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite_name: &str,
    fixture: Option<&Path>,
    dim: usize,
    max_degree: usize,
    coeff_degree: u32,
    trials: Option<u64>,
    seed: u64,
    dump: &Path,
) -> Result<Report, CliError> {
    let suite = Suite::from_name(suite_name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown suite `{suite_name}` (expected one of: {})",
            verify::SUITE_NAMES.join(", ")
        ))
    })?;
    if let Some(path) = fixture {
        let model = load_model(path)?;
        let report = match verify::check_model(suite, &model)? {
            None => Report::pass("verify"),
            Some(reason) => Report::fail("verify", &reason),
        };
        return Ok(report
            .with_input("suite", suite_name)
            .with_input("file", path.display().to_string()));
    }
    let params = SuiteParams {
        dim,
        max_degree,
        coeff_degree,
        trials: trials.unwrap_or_else(|| suite.default_trials()),
        seed,
    };
    match verify::run_suite(suite, &params)? {
        SuiteOutcome::Pass { trials } => Ok(Report::pass("verify")
            .with_input("suite", suite_name)
            .with_input("dim", dim)
            .with_input("trials", trials)
            .with_seed(seed)),
        SuiteOutcome::Fail { trial, reason, model } => {
            let text = model.pretty_print();
            if let Err(e) = std::fs::write(dump, &text) {
                eprintln!("warning: cannot write {}: {e}", dump.display());
            } else {
                eprintln!("counterexample written to {}", dump.display());
            }
            let mut report = Report::fail("verify", &format!("trial {trial}: {reason}"))
                .with_input("suite", suite_name)
                .with_input("dim", dim)
                .with_seed(seed);
            report.counterexample = Some(text);
            Ok(report)
        }
    }
}
