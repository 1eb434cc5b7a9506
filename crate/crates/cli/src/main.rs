//! `bellsimplex`: classify Bell-diagonal states, estimate detection shares and
//! cross-check the fast criteria against their dense oracles.
//!
//! Exit codes: 0 success, 1 numerical failure or verification violation,
//! 2 unreadable input or bad flags. Standard output carries only the JSON or
//! CSV payload; everything else goes to standard error.

mod format;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bellsimplex::detection::{oracle_check, witness_kappa, witness_value};
use bellsimplex::montecarlo::{estimate_shares, SamplerConfig, ShareReport};
use bellsimplex::phase_space::{all_cosets, all_striations};
use bellsimplex::statefile::load_coefficients;
use bellsimplex::{classify, CoefficientMatrix, Error};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::format::{round_floats, sig12};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "bellsimplex",
    version,
    about = "Entanglement detection for Bell-diagonal qudit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the state in a JSON or CSV state file.
    Classify {
        path: PathBuf,
        /// Also run the dense oracles and report whether they agree.
        #[arg(long)]
        oracle: bool,
    },
    /// Estimate detection shares over uniformly sampled states.
    Sample {
        /// Dimension(s); a comma-separated list runs a sweep.
        #[arg(long = "d", value_delimiter = ',', required = true)]
        d: Vec<usize>,
        #[arg(long = "n")]
        n: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Index into the coset list printed by `striations`; those coefficients are held at zero.
        #[arg(long = "zero-coset")]
        zero_coset: Option<usize>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Print the matched witness coefficients of a qutrit state.
    Witness { path: PathBuf },
    /// Check the fast criteria against the dense oracles on random states.
    Verify {
        #[arg(long = "d")]
        d: usize,
        #[arg(long = "n")]
        n: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the subgroups and the indexed cosets of `Z_d x Z_d`.
    Striations {
        #[arg(long = "d")]
        d: usize,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

/// Input and invariant errors exit with 2, anything else with 1.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::NegativeCoefficient { .. }
            | Error::NotNormalized { .. }
            | Error::NonFinite { .. }
            | Error::ShapeMismatch { .. }
            | Error::DimensionTooSmall(_)
            | Error::WrongDimension { .. }
            | Error::InvalidConfig(_)
            | Error::InvalidBloch(_) => Failure::usage(e.to_string()),
            _ => Failure::numerical(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { path, oracle } => cmd_classify(&path, oracle),
        Command::Sample {
            d,
            n,
            seed,
            zero_coset,
            out,
            format,
        } => cmd_sample(&d, n, seed, zero_coset, out.as_deref(), format),
        Command::Witness { path } => cmd_witness(&path),
        Command::Verify { d, n, seed } => verify::cmd_verify(d, n, resolve_seed(seed)),
        Command::Striations { d } => cmd_striations(d),
    };
    match result {
        Ok(payload) => {
            if !payload.is_empty() {
                emit(&payload);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Writes to standard output, ignoring a closed pipe.
fn emit(payload: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{payload}");
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        eprintln!("no --seed given, using {DEFAULT_SEED}");
        DEFAULT_SEED
    })
}

fn load(path: &Path) -> Result<(CoefficientMatrix, Option<String>), Failure> {
    let data = std::fs::read(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    load_coefficients(&data).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn to_json_string(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON values always serialize")
}

fn cmd_classify(path: &Path, with_oracle: bool) -> Result<String, Failure> {
    let (c, name) = load(path)?;
    let record = classify(&c);
    let mut out = round_floats(serde_json::to_value(&record).expect("record serializes"));
    let fields = out.as_object_mut().expect("record is an object");
    if with_oracle {
        let check = oracle_check(&c, &record);
        fields.insert(
            "oracle".into(),
            round_floats(serde_json::to_value(&check).expect("oracle serializes")),
        );
        fields.insert("agreement".into(), Value::Bool(check.agreement));
    }
    if let Some(name) = name {
        fields.insert("name".into(), Value::String(name));
    }
    // The coefficients are echoed at full precision so the output is itself a
    // valid state file that classifies identically.
    fields.insert(
        "c".into(),
        serde_json::to_value(c.to_rows()).expect("rows serialize"),
    );
    Ok(to_json_string(&out))
}

fn cmd_sample(
    dims: &[usize],
    n: u64,
    seed: Option<u64>,
    zero_coset: Option<usize>,
    out: Option<&Path>,
    format: Format,
) -> Result<String, Failure> {
    let seed = resolve_seed(seed);
    let mut reports = Vec::with_capacity(dims.len());
    for &d in dims {
        let mut cfg = SamplerConfig::new(d, n, seed);
        if let Some(index) = zero_coset {
            let cosets = all_cosets(d)?;
            let coset = cosets.get(index).ok_or_else(|| {
                Failure::usage(format!(
                    "--zero-coset {index} is out of range: d = {d} has {} cosets",
                    cosets.len()
                ))
            })?;
            cfg = cfg.with_zero_coset(coset.clone());
        }
        reports.push(estimate_shares(&cfg)?);
    }
    eprint!("{}", summary_table(&reports));

    let payload = match format {
        Format::Json => to_json_string(&round_floats(
            serde_json::to_value(&reports).expect("reports serialize"),
        )),
        Format::Csv => {
            let mut text = String::from(ShareReport::CSV_HEADER);
            for r in &reports {
                text.push('\n');
                text.push_str(&csv_row(r));
            }
            text
        }
    };
    match out {
        Some(path) => {
            std::fs::write(path, format!("{payload}\n"))
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("report written to {}", path.display());
            Ok(String::new())
        }
        None => Ok(payload),
    }
}

fn csv_row(r: &ShareReport) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.d,
        r.n_samples,
        r.seed,
        sig12(r.npt_share),
        sig12(r.realignment_share),
        sig12(r.ppt_and_realignment_share),
        sig12(r.undetected_share)
    )
}

fn summary_table(reports: &[ShareReport]) -> String {
    let mut table = format!(
        "{:>3} {:>9} {:>8} {:>12} {:>10} {:>11} {:>8}\n",
        "d", "n", "NPT %", "realign. %", "PPT-ent %", "undetect. %", "time s"
    );
    for r in reports {
        table.push_str(&format!(
            "{:>3} {:>9} {:>8.3} {:>12.3} {:>10.3} {:>11.3} {:>8.2}\n",
            r.d,
            r.n_samples,
            100.0 * r.npt_share,
            100.0 * r.realignment_share,
            100.0 * r.ppt_and_realignment_share,
            100.0 * r.undetected_share,
            r.wall_time
        ));
    }
    table
}

fn cmd_witness(path: &Path) -> Result<String, Failure> {
    let (c, _) = load(path)?;
    if c.d() != 3 {
        return Err(Failure::usage(format!(
            "the witness is defined for d = 3 only, got d = {}",
            c.d()
        )));
    }
    let w = witness_kappa(&c)?;
    let value = witness_value(&c, &w)?;
    let mut notes = Vec::new();
    if w.is_zero(1e-12) {
        notes.push("degenerate witness: every kappa vanishes, the state sits on the PPT boundary");
    } else if w.is_positive(1e-12) {
        notes.push("positive operator: all kappa are non-negative, so W detects nothing");
    }
    let out = json!({
        "d": 3,
        "kappa": w.kappa,
        "witness_value": value,
        "is_npt": value < -bellsimplex::detection::DETECTION_GUARD,
        "notes": notes,
    });
    Ok(to_json_string(&round_floats(out)))
}

fn cmd_striations(d: usize) -> Result<String, Failure> {
    let striations = all_striations(d)?;
    let cosets = all_cosets(d)?;
    let subgroups: Vec<Value> = striations
        .iter()
        .map(|s| {
            json!({
                "elements": s.generator().elements(),
                "generator": s.generator().generator(),
            })
        })
        .collect();
    let indexed: Vec<Value> = cosets
        .iter()
        .enumerate()
        .map(|(index, coset)| {
            let subgroup = striations
                .iter()
                .position(|s| s.generator() == coset.base())
                .expect("coset of a listed subgroup");
            json!({
                "index": index,
                "subgroup": subgroup,
                "shift": coset.shift(),
                "elements": coset.elements(),
            })
        })
        .collect();
    Ok(to_json_string(
        &json!({ "d": d, "subgroups": subgroups, "cosets": indexed }),
    ))
}
