//! Command-line interface: `analyze`, `hodge`, `bundles`, `verify`.
//!
//! Exit codes: 0 success (and, for `analyze`/`verify`, every check passed),
//! 2 spec or model-build errors, 3 ambiguous characters, 4 failed
//! verification. Reports are rendered fully in memory and written with a
//! temp-file rename, so error paths leave no partial output behind.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::characters::{char_from_user, classify_all, Backend, Classification};
use crate::cohomology::{dolbeault_dim_class, hodge_table, nonvanishing_class};
use crate::model::SolvModel;
use crate::report::{
    build_from_spec, build_report, parse_spec, render_csv, render_json, render_md, sha256_hex,
    ResolvedOptions,
};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "otcoh",
    version,
    about = "Dolbeault and de Rham cohomology of flat line bundles on Oeljeklaus-Toma solvmanifolds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Root-finding precision in bits.
    #[arg(long, global = true)]
    pub precision: Option<u32>,

    /// Model tolerance (default 2^(-precision/4), floored at 1e-9).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    /// Output path; `analyze` defaults to otcoh-report-<hash>.<ext> in the
    /// working directory, the other commands default to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Character-equality backend override.
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendArg>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the model, classify all bundles, compute every table and run the
    /// full verification suite.
    Analyze { spec: PathBuf },
    /// Dimension, witnesses and lower bound for one bundle at one bidegree.
    Hodge {
        spec: PathBuf,
        /// Character spec: `1`, `sigma(i)` products, `triple I=..;K=..;L=..`,
        /// or `values v1; ...`.
        #[arg(long)]
        bundle: String,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// List bundle classes; with --nonvanishing, only those with
    /// H^{p,q} != 0 together with their witnesses.
    Bundles {
        spec: PathBuf,
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        nonvanishing: Option<Vec<usize>>,
    },
    /// Run the verification suite and print a residual summary.
    Verify { spec: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Numeric,
    Generic,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Numeric => Backend::Numeric,
            BackendArg::Generic => Backend::Generic,
        }
    }
}

/// Maps an error onto the documented exit code.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::AmbiguousCharacters(_) => 3,
        _ => 2,
    }
}

struct Loaded {
    model: SolvModel,
    classification: Classification,
    options: ResolvedOptions,
    input_hash: String,
}

fn load(cli: &Cli, spec_path: &Path) -> Result<Loaded> {
    let bytes = std::fs::read(spec_path)?;
    let spec = parse_spec(&bytes)?;
    let (model, options) = build_from_spec(
        &spec,
        cli.precision,
        cli.tol,
        cli.backend.map(Backend::from),
    )?;
    let classification = classify_all(&model, options.backend)?;
    Ok(Loaded {
        model,
        classification,
        options,
        input_hash: sha256_hex(&bytes),
    })
}

fn resolved_format(cli: &Cli, spec_path: &Path) -> FormatArg {
    if let Some(f) = cli.format {
        return f;
    }
    // fall back to the spec's own option when parseable
    if let Ok(bytes) = std::fs::read(spec_path) {
        if let Ok(spec) = parse_spec(&bytes) {
            match spec.options.format.as_deref() {
                Some("csv") => return FormatArg::Csv,
                Some("md") => return FormatArg::Md,
                _ => {}
            }
        }
    }
    FormatArg::Json
}

/// Writes fully rendered content; temp-file rename keeps failures atomic.
fn write_output(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => write_output(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Analyze { spec } => cmd_analyze(cli, spec),
        Command::Hodge { spec, bundle, p, q } => cmd_hodge(cli, spec, bundle, *p, *q),
        Command::Bundles { spec, nonvanishing } => cmd_bundles(cli, spec, nonvanishing.as_deref()),
        Command::Verify { spec } => cmd_verify(cli, spec),
    }
}

fn cmd_analyze(cli: &Cli, spec_path: &Path) -> Result<u8> {
    let loaded = load(cli, spec_path)?;
    let report = build_report(
        &loaded.model,
        &loaded.classification,
        &loaded.input_hash,
        &loaded.options,
    )?;
    let format = resolved_format(cli, spec_path);
    let (content, ext) = match format {
        FormatArg::Json => (render_json(&report), "json"),
        FormatArg::Csv => (render_csv(&report), "csv"),
        FormatArg::Md => (render_md(&report), "md"),
    };
    let out_path = cli.out.clone().unwrap_or_else(|| {
        PathBuf::from(format!("otcoh-report-{}.{ext}", &loaded.input_hash[..12]))
    });
    write_output(&out_path, &content)?;
    let passed = report.all_passed();
    println!(
        "analyzed (s, t) = ({}, {}): {} classes, {} checks, {} -> {}",
        report.model.s,
        report.model.t,
        report.classes.len(),
        report.verification.len(),
        if passed { "all passed" } else { "FAILURES" },
        out_path.display()
    );
    Ok(if passed { 0 } else { 4 })
}

#[derive(serde::Serialize)]
struct HodgeAnswer {
    class: Option<String>,
    p: usize,
    q: usize,
    dimension: u64,
    nonzero: bool,
    witnesses: Vec<String>,
    lower_bound: u64,
}

fn cmd_hodge(cli: &Cli, spec_path: &Path, bundle: &str, p: usize, q: usize) -> Result<u8> {
    let loaded = load(cli, spec_path)?;
    let cl = &loaded.classification;
    if p > cl.s + cl.t || q > cl.s + cl.t {
        return Err(Error::IndexOutOfRange(format!(
            "bidegree ({p},{q}) out of range 0..={}",
            cl.s + cl.t
        )));
    }
    let rho = char_from_user(&loaded.model, bundle)?;
    let resolved = cl.resolve(&loaded.model, &rho)?;
    let answer = match resolved {
        Some(idx) => {
            let nv = nonvanishing_class(cl, idx, p, q);
            HodgeAnswer {
                class: Some(cl.classes[idx].id.to_string()),
                p,
                q,
                dimension: dolbeault_dim_class(cl, idx, p, q),
                nonzero: nv.nonzero,
                witnesses: nv.witnesses.iter().map(|w| w.to_string()).collect(),
                lower_bound: nv.lower_bound,
            }
        }
        None => HodgeAnswer {
            class: None,
            p,
            q,
            dimension: 0,
            nonzero: false,
            witnesses: Vec::new(),
            lower_bound: 0,
        },
    };
    let content = match resolved_format(cli, spec_path) {
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&answer).expect("serializes");
            s.push('\n');
            s
        }
        _ => {
            let mut s = format!(
                "dim H^({},{}) = {} for bundle `{bundle}` (class: {})\n",
                answer.p,
                answer.q,
                answer.dimension,
                answer.class.as_deref().unwrap_or("none")
            );
            if answer.nonzero {
                s.push_str(&format!(
                    "witnesses: {}; lower bound {}\n",
                    answer.witnesses.join(" | "),
                    answer.lower_bound
                ));
            }
            s
        }
    };
    emit(&cli.out, &content)?;
    Ok(0)
}

#[derive(serde::Serialize)]
struct BundleLine {
    class: String,
    members: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witnesses: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_bound: Option<u64>,
}

fn cmd_bundles(cli: &Cli, spec_path: &Path, nonvanishing: Option<&[usize]>) -> Result<u8> {
    let loaded = load(cli, spec_path)?;
    let cl = &loaded.classification;
    if let Some(&[p, q]) = nonvanishing {
        if p > cl.s + cl.t || q > cl.s + cl.t {
            return Err(Error::IndexOutOfRange(format!(
                "bidegree ({p},{q}) out of range 0..={}",
                cl.s + cl.t
            )));
        }
    }
    let mut lines = Vec::new();
    for (idx, class) in cl.classes.iter().enumerate() {
        match nonvanishing {
            Some(&[p, q]) => {
                let nv = nonvanishing_class(cl, idx, p, q);
                if !nv.nonzero {
                    continue;
                }
                lines.push(BundleLine {
                    class: class.id.to_string(),
                    members: class.members.iter().map(|m| m.to_string()).collect(),
                    dimension: Some(dolbeault_dim_class(cl, idx, p, q)),
                    witnesses: Some(nv.witnesses.iter().map(|w| w.to_string()).collect()),
                    lower_bound: Some(nv.lower_bound),
                });
            }
            _ => lines.push(BundleLine {
                class: class.id.to_string(),
                members: class.members.iter().map(|m| m.to_string()).collect(),
                dimension: None,
                witnesses: None,
                lower_bound: None,
            }),
        }
    }
    let content = match resolved_format(cli, spec_path) {
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&lines).expect("serializes");
            s.push('\n');
            s
        }
        _ => {
            let mut s = String::new();
            for l in &lines {
                s.push_str(&format!("{}: members {}", l.class, l.members.join(" | ")));
                if let (Some(d), Some(w), Some(b)) = (&l.dimension, &l.witnesses, &l.lower_bound) {
                    s.push_str(&format!(
                        "; dim {d}, bound {b}, witnesses {}",
                        w.join(" | ")
                    ));
                }
                s.push('\n');
            }
            s
        }
    };
    emit(&cli.out, &content)?;
    Ok(0)
}

fn cmd_verify(cli: &Cli, spec_path: &Path) -> Result<u8> {
    let loaded = load(cli, spec_path)?;
    let checks = crate::report::run_verification(&loaded.model, &loaded.classification)?;
    let mut all_ok = true;
    println!("{:<34} {:<6} residual", "check", "result");
    for c in &checks {
        all_ok &= c.passed;
        let residual = c
            .residual
            .map(|r| format!("{r:.3e}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<34} {:<6} {residual}",
            c.name,
            if c.passed { "pass" } else { "FAIL" }
        );
        if let (false, Some(detail)) = (c.passed, &c.detail) {
            println!("    {detail}");
        }
    }
    // quick view of the trivial-class table for orientation
    let table = hodge_table(&loaded.classification, loaded.classification.trivial_index());
    println!("trivial-class hodge table: {:?}", table.dims);
    Ok(if all_ok { 0 } else { 4 })
}
