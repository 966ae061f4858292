//! `teledistill` command line.
//!
//! Exit codes: 0 all checks within tolerance, 2 configuration or schema error,
//! 3 resource guard violation, 4 tolerance failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use teledistill::channels::{bell_diagonal_state, PauliChannel};
use teledistill::codes::{build_code, choose_reps, code_entanglement_fidelity};
use teledistill::distill::{rate_report, DistillMode};
use teledistill::noise::{error_exponent, BoundKind, DistributionForm, ExponentRegime, PauliDistribution};
use teledistill::schema::{parse_code, parse_noise_model};
use teledistill::verify::{self, Check, Scenario};
use teledistill::{Error, Register, Subspace};

const CODE_FIDELITY_TOL: f64 = 1e-9;
const DISTILL_TOL: f64 = 1e-8;
const BOUND_SLACK: f64 = 1e-9;
const BATTERY_SIZE: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "teledistill", version, about = "Teleportation channels, qudit codes and distillation bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full teleportation simulation against the closed-form Pauli channel.
    #[command(name = "verify-lemma1")]
    VerifyLemma1(Battery),
    /// Explicit twirl against the Bell-diagonal projection, and idempotence.
    Twirl(Battery),
    /// Channel to Choi state to channel, and state to channel to Choi state.
    #[command(name = "choi-roundtrip")]
    ChoiRoundtrip(Battery),
    /// Code entanglement fidelity computed by purification and as P_n(J).
    #[command(name = "code-fidelity")]
    CodeFidelity(CodeNoise),
    /// Simulated distillation fidelity against the code-side prediction. Without
    /// --code and --noise, runs the shipped scenario battery.
    Distill(DistillArgs),
    /// Asymptotic rate bound of a noise model.
    Bounds(NoiseOnly),
    /// Error exponent E(R, P) of an iid noise model.
    Exponent(ExponentArgs),
}

#[derive(clap::Args, Debug)]
struct Battery {
    #[arg(long)]
    d: u32,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args, Debug)]
struct CodeNoise {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    noise: PathBuf,
}

#[derive(clap::Args, Debug)]
struct DistillArgs {
    #[arg(long, requires = "noise")]
    code: Option<PathBuf>,
    #[arg(long, requires = "code")]
    noise: Option<PathBuf>,
    /// Seed for the random resources of the battery.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args, Debug)]
struct NoiseOnly {
    #[arg(long)]
    noise: PathBuf,
}

#[derive(clap::Args, Debug)]
struct ExponentArgs {
    #[arg(long)]
    noise: PathBuf,
    #[arg(long)]
    rate: f64,
}

enum Failure {
    Config(String),
    Guard(String),
    Tolerance(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Guard(_) => 3,
            Failure::Tolerance(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Guard(m) | Failure::Tolerance(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Resource { .. } => Failure::Guard(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

/// A finished command: rows for the report plus human-readable summary lines.
struct Report {
    csv: Vec<u8>,
    json: serde_json::Value,
    summary: Vec<String>,
    /// Failing checks, reported after the report is written.
    failures: Vec<String>,
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Failure::Config(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| Failure::Config(format!("csv: {e}")))
}

fn report<T: Serialize>(rows: &[T], extra: serde_json::Value, summary: Vec<String>, failures: Vec<String>) -> Outcome {
    let mut json = serde_json::json!({ "rows": rows });
    if let (Some(obj), serde_json::Value::Object(more)) = (json.as_object_mut(), extra) {
        obj.extend(more);
    }
    Ok(Report {
        csv: csv_bytes(rows)?,
        json,
        summary,
        failures,
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn load_noise(path: &Path) -> Result<PauliDistribution, Failure> {
    parse_noise_model(&read(path)?).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn load_code(path: &Path) -> Result<Subspace, Failure> {
    parse_code(&read(path)?).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn same_register(l: &Subspace, dist: &PauliDistribution) -> Result<(), Failure> {
    if l.register() != dist.register() {
        let (a, b) = (l.register(), dist.register());
        return Err(Failure::Config(format!(
            "code acts on d={} n={} but noise model on d={} n={}",
            a.d, a.n, b.d, b.n
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckRow {
    check: String,
    d: u32,
    n: usize,
    seed: u64,
    cases: usize,
    max_gap: f64,
    tolerance: f64,
    status: &'static str,
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn checks_report(reg: Register, seed: u64, checks: Vec<Check>, extra: serde_json::Value) -> Outcome {
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    let rows: Vec<CheckRow> = checks
        .into_iter()
        .map(|c| {
            let line = format!(
                "{} {}: {} cases, max gap {:.3e} (tolerance {:.0e})",
                status(c.passed()),
                c.name,
                c.cases,
                c.max_gap,
                c.tolerance
            );
            if !c.passed() {
                failures.push(line.clone());
            }
            summary.push(line);
            CheckRow {
                status: status(c.passed()),
                check: c.name,
                d: reg.d,
                n: reg.n,
                seed,
                cases: c.cases,
                max_gap: c.max_gap,
                tolerance: c.tolerance,
            }
        })
        .collect();
    report(&rows, extra, summary, failures)
}

/// The documented CSV schema for code and distillation tables.
#[derive(Serialize)]
struct FidelityRow {
    scenario: String,
    d: u32,
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    rate: f64,
    fidelity_way1: f64,
    fidelity_way2: f64,
    gap: f64,
    bound_corollary1: f64,
    bound_hashing_or_markov: Option<f64>,
}

fn code_fidelity(args: &CodeNoise) -> Outcome {
    let l = load_code(&args.code)?;
    let dist = load_noise(&args.noise)?;
    same_register(&l, &dist)?;
    let code = build_code(&l)?.with_reps(choose_reps(&l, &dist)?)?;
    let f = code_entanglement_fidelity(&code, &dist)?;
    let name = stem(&args.code);
    let table = rate_report(&dist, &[(name.as_str(), &code)])?;
    let row = &table.rows[0];
    let ok = f.gap() < CODE_FIDELITY_TOL;
    let line = format!(
        "{} {name}: F_e by purification {:.12}, P_n(J) {:.12}, gap {:.3e} (tolerance {CODE_FIDELITY_TOL:.0e})",
        status(ok),
        f.way1,
        f.way2,
        f.gap()
    );
    let failures = if ok { vec![] } else { vec![line.clone()] };
    let rows = vec![FidelityRow {
        scenario: name,
        d: row.d,
        n: row.n,
        k: row.k_dim,
        rate: row.rate,
        fidelity_way1: f.way1,
        fidelity_way2: f.way2,
        gap: f.gap(),
        bound_corollary1: row.bound_any_code,
        bound_hashing_or_markov: table.asymptotic.map(|b| b.value),
    }];
    let extra = serde_json::json!({ "bound_symplectic": row.bound_symplectic, "tolerance": CODE_FIDELITY_TOL });
    report(&rows, extra, vec![line], failures)
}

fn scenario_row(s: &Scenario, bound: Option<f64>) -> FidelityRow {
    FidelityRow {
        scenario: s.name.clone(),
        d: s.d,
        n: s.n,
        k: s.k_dim,
        rate: s.rate,
        fidelity_way1: s.distillation,
        fidelity_way2: s.code_fidelity,
        gap: s.gap(),
        bound_corollary1: s.bound_any_code(),
        bound_hashing_or_markov: bound,
    }
}

fn mode_name(mode: DistillMode) -> &'static str {
    match mode {
        DistillMode::Auto => "auto",
        DistillMode::Dense => "dense",
        DistillMode::PureState => "pure-state",
    }
}

fn distill_cmd(args: &DistillArgs) -> Outcome {
    let (scenarios, bound, seed) = match (&args.code, &args.noise) {
        (Some(code), Some(noise)) => {
            let l = load_code(code)?;
            let dist = load_noise(noise)?;
            same_register(&l, &dist)?;
            let sigma = bell_diagonal_state(&PauliChannel::new(dist.clone()))?;
            let name = format!("{} / {}", stem(code), stem(noise));
            let s = verify::run_scenario(&name, &sigma, &l, DistillMode::Auto)?;
            (vec![s], dist.rate_bound()?.map(|b| b.value), None)
        }
        _ => (verify::distillation_battery(args.seed)?, None, Some(args.seed)),
    };
    let mut summary: Vec<String> = seed.map(|s| format!("battery seed {s}")).into_iter().collect();
    let mut failures = Vec::new();
    for s in &scenarios {
        let within = s.gap() < DISTILL_TOL;
        let bounded = s.infidelity() <= s.bound_any_code() + BOUND_SLACK
            && s.infidelity() <= s.bound_symplectic() + BOUND_SLACK;
        let line = format!(
            "{} {} [{}]: distillation {:.12}, code {:.12}, gap {:.3e} (tolerance {DISTILL_TOL:.0e}), infidelity {:.3e} <= 1-P_n(J) {:.3e}: {bounded}",
            status(within && bounded),
            s.name,
            mode_name(s.mode),
            s.distillation,
            s.code_fidelity,
            s.gap(),
            s.infidelity(),
            s.bound_symplectic()
        );
        if !(within && bounded) {
            failures.push(line.clone());
        }
        summary.push(line);
    }
    let rows: Vec<FidelityRow> = scenarios.iter().map(|s| scenario_row(s, bound)).collect();
    let modes: Vec<&str> = scenarios.iter().map(|s| mode_name(s.mode)).collect();
    let extra = serde_json::json!({ "seed": seed, "modes": modes, "tolerance": DISTILL_TOL });
    report(&rows, extra, summary, failures)
}

#[derive(Serialize)]
struct BoundRow {
    d: u32,
    n: usize,
    form: &'static str,
    kind: &'static str,
    value: Option<f64>,
    unit: String,
    note: &'static str,
}

fn form_name(dist: &PauliDistribution) -> &'static str {
    match dist.form() {
        DistributionForm::Explicit(_) => "explicit",
        DistributionForm::Iid(_) => "iid",
        DistributionForm::Markov { .. } => "markov",
    }
}

fn unit(d: u32) -> String {
    if d == 2 {
        "bits per pair".into()
    } else {
        format!("qudits per pair (log base {d})")
    }
}

fn bounds(args: &NoiseOnly) -> Outcome {
    let dist = load_noise(&args.noise)?;
    let reg = dist.register();
    let bound = dist.rate_bound()?;
    let (kind, value, note) = match bound {
        None => ("none", None, "bound not derived for this noise model"),
        Some(b) => {
            let kind = match b.kind {
                BoundKind::Hashing => "hashing",
                BoundKind::Markov => "markov",
            };
            (kind, Some(b.value), if b.value < 0.0 { "bound vacuous" } else { "" })
        }
    };
    let line = match value {
        None => note.to_string(),
        Some(v) if note.is_empty() => format!("{kind} rate bound {v:.6} {}", unit(reg.d)),
        Some(v) => format!("{kind} rate bound {v:.6} {}: {note}", unit(reg.d)),
    };
    let rows = vec![BoundRow {
        d: reg.d,
        n: reg.n,
        form: form_name(&dist),
        kind,
        value,
        unit: unit(reg.d),
        note,
    }];
    report(&rows, serde_json::json!({}), vec![line], vec![])
}

#[derive(Serialize)]
struct ExponentRow {
    rate: f64,
    exponent: f64,
    regime: &'static str,
    /// Semicolon-separated in CSV.
    minimizer: String,
}

fn exponent(args: &ExponentArgs) -> Outcome {
    let dist = load_noise(&args.noise)?;
    let DistributionForm::Iid(single) = dist.form() else {
        return Err(Failure::Config(format!(
            "{}: the exponent needs an iid noise model, found form `{}`",
            args.noise.display(),
            form_name(&dist)
        )));
    };
    let d = dist.register().d;
    let sol = error_exponent(args.rate, single, d)?;
    let regime = match sol.regime {
        ExponentRegime::AboveCapacity => "above-capacity",
        ExponentRegime::SquareRoot => "square-root",
        ExponentRegime::Tilted => "tilted",
    };
    let line = format!("E({}) = {:.9} [{regime}], log base {d}", args.rate, sol.value);
    let rows = vec![ExponentRow {
        rate: args.rate,
        exponent: sol.value,
        regime,
        minimizer: sol.minimizer.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(";"),
    }];
    let extra = serde_json::json!({ "minimizer": sol.minimizer });
    report(&rows, extra, vec![line], vec![])
}

fn register(d: u32, n: usize) -> Result<Register, Failure> {
    if d < 2 || n == 0 {
        return Err(Failure::Config(format!("need d >= 2 and n >= 1, got d={d} n={n}")));
    }
    Ok(Register::new(d, n)?)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::VerifyLemma1(b) => {
            let reg = register(b.d, b.n)?;
            let check = verify::teleportation_battery(reg, b.seed)?;
            checks_report(reg, b.seed, vec![check], serde_json::json!({ "seed": b.seed }))
        }
        Command::Twirl(b) => {
            let reg = register(b.d, b.n)?;
            let (proj, idem) = verify::twirl_battery(reg, b.seed, BATTERY_SIZE)?;
            checks_report(reg, b.seed, vec![proj, idem], serde_json::json!({ "seed": b.seed }))
        }
        Command::ChoiRoundtrip(b) => {
            let reg = register(b.d, b.n)?;
            let (channel, state, min_off) = verify::choi_battery(reg, b.seed, BATTERY_SIZE)?;
            let extra = serde_json::json!({ "seed": b.seed, "min_generic_displacement": min_off });
            checks_report(reg, b.seed, vec![channel, state], extra)
        }
        Command::CodeFidelity(a) => code_fidelity(a),
        Command::Distill(a) => distill_cmd(a),
        Command::Bounds(a) => bounds(a),
        Command::Exponent(a) => exponent(a),
    }
}

fn emit(cli: &Cli, r: &Report) -> Result<(), Failure> {
    let body = match cli.format {
        Format::Csv => r.csv.clone(),
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(&r.json).expect("reports serialize");
            s.push(b'\n');
            s
        }
    };
    match &cli.output {
        Some(path) => {
            fs::write(path, body).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            for line in &r.summary {
                println!("{line}");
            }
        }
        None => {
            io::stdout()
                .write_all(&body)
                .map_err(|e| Failure::Config(format!("stdout: {e}")))?;
            for line in &r.summary {
                eprintln!("{line}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|r| {
        emit(&cli, &r)?;
        match r.failures.first() {
            Some(_) => Err(Failure::Tolerance(r.failures.join("\n"))),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
