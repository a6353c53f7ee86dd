//! Spec-file ingestion, the verification suite, and report rendering.
//!
//! A model spec is a JSON document with exactly one of `field` or `synthetic`:
//!
//! ```json
//! {
//!   "field": { "poly": ["-1", "-1", "0", "1"], "units": [["0", "1", "0"]] },
//!   "options": { "precision": 256, "backend": "numeric" }
//! }
//! ```
//!
//! ```json
//! {
//!   "synthetic": {
//!     "s": 2, "t": 2,
//!     "b": [["-1", "0"], ["0", "-1"]],
//!     "relations": [["1","0","1","0","1","0"], ["0","1","0","1","0","1"]],
//!     "mode": "generic"
//!   }
//! }
//! ```
//!
//! Numbers whose exactness matters (polynomial coefficients, unit coordinates,
//! `B`, `C`, relation vectors) are exact rationals written as `"p/q"` or
//! integer strings. A report is one self-contained document per run; rendering
//! is deterministic, so identical inputs produce identical bytes.

use std::fmt::Write as _;

use num_traits::Zero;

use crate::characters::{Backend, Classification};
use crate::cohomology::{
    all_derham_vectors, all_tables, binomial_identity_violations, brute_force_tables,
    derham_identity_violations, dolbeault_dim_class, nonvanishing_class,
    section_criterion_violations, serre_check, total_euler_characteristic,
};
use crate::field::{FieldElement, NumberField, Polynomial};
use crate::model::{
    build_model, default_tolerance, synthetic_model, ModelSource, SolvModel, SyntheticGenerators,
};
use crate::oracle::{
    derham_monomial, harmonic_monomial, star_closure_check, w1_generators, w2_generators,
};
use crate::{Error, Rat, Result};

// ---------------------------------------------------------------------------
// Spec file
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
    #[serde(default)]
    pub options: SpecOptions,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FieldSpec {
    /// Rational coefficients, lowest degree first.
    pub poly: Vec<String>,
    /// Integer coordinate vectors of the units in the power basis.
    pub units: Vec<Vec<String>>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SyntheticSpec {
    pub s: usize,
    pub t: usize,
    pub b: Vec<Vec<String>>,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
    pub mode: ModeSpec,
}

/// `"generic"` or `{ "c": [[..]] }`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum ModeSpec {
    Named(String),
    Explicit { c: Vec<Vec<String>> },
}

#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
pub struct SpecOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<Backend>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default)]
    pub assume_irreducible: bool,
}

/// Exact rational from `"p/q"`, `"-p/q"` or an integer string.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    let bad = || Error::MalformedSpec(format!("bad rational {text:?}; use \"p/q\" or an integer"));
    if let Some((num, den)) = text.split_once('/') {
        let n: num_bigint::BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: num_bigint::BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat::new(n, d))
    } else {
        let n: num_bigint::BigInt = text.parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(n))
    }
}

fn parse_rat_matrix(rows: &[Vec<String>]) -> Result<Vec<Vec<Rat>>> {
    rows.iter()
        .map(|row| row.iter().map(|x| parse_rat(x)).collect())
        .collect()
}

pub fn parse_spec(bytes: &[u8]) -> Result<SpecFile> {
    let spec: SpecFile = serde_json::from_slice(bytes)
        .map_err(|e| Error::MalformedSpec(format!("invalid JSON: {e}")))?;
    match (&spec.field, &spec.synthetic) {
        (Some(_), Some(_)) => Err(Error::MalformedSpec(
            "spec must contain exactly one of `field` or `synthetic`, found both".into(),
        )),
        (None, None) => Err(Error::MalformedSpec(
            "spec must contain one of `field` or `synthetic`".into(),
        )),
        _ => Ok(spec),
    }
}

/// Precision/tolerance/backend after merging spec options with CLI overrides.
#[derive(Debug, Clone, Copy)]
pub struct ResolvedOptions {
    pub precision: u32,
    pub tolerance: f64,
    pub backend: Backend,
}

/// Builds the model from a parsed spec. CLI overrides win over spec options.
pub fn build_from_spec(
    spec: &SpecFile,
    precision_override: Option<u32>,
    tol_override: Option<f64>,
    backend_override: Option<Backend>,
) -> Result<(SolvModel, ResolvedOptions)> {
    let precision = precision_override.or(spec.options.precision).unwrap_or(256);
    let tolerance = tol_override
        .or(spec.options.tolerance)
        .unwrap_or_else(|| default_tolerance(precision));

    let mut model = match (&spec.field, &spec.synthetic) {
        (Some(fs), None) => {
            let coeffs = fs
                .poly
                .iter()
                .map(|x| parse_rat(x))
                .collect::<Result<Vec<_>>>()?;
            let poly = Polynomial::new(coeffs, spec.options.assume_irreducible)?;
            let field = NumberField::new(poly.clone());
            let emb = crate::field::find_embeddings(&poly, precision)?;
            let units: Vec<FieldElement> = fs
                .units
                .iter()
                .map(|coords| {
                    let v = coords
                        .iter()
                        .map(|x| parse_rat(x))
                        .collect::<Result<Vec<_>>>()?;
                    field.element(v)
                })
                .collect::<Result<_>>()?;
            let units = crate::model::UnitSystem::new(&field, units, &emb)?;
            build_model(&field, &units, &emb)?
        }
        (None, Some(ss)) => {
            let b = parse_rat_matrix(&ss.b)?;
            let relations = parse_rat_matrix(&ss.relations)?;
            let generators = match &ss.mode {
                ModeSpec::Named(name) if name == "generic" => SyntheticGenerators::Generic,
                ModeSpec::Named(other) => {
                    return Err(Error::MalformedSpec(format!(
                        "unknown synthetic mode {other:?}; use \"generic\" or {{\"c\": [[..]]}}"
                    )))
                }
                ModeSpec::Explicit { c } => SyntheticGenerators::ExplicitC(parse_rat_matrix(c)?),
            };
            synthetic_model(ss.s, ss.t, b, relations, generators)?
        }
        _ => unreachable!("parse_spec enforces exactly one model section"),
    };
    model.tol = tolerance;

    let backend = backend_override
        .or(spec.options.backend)
        .unwrap_or(match model.source {
            ModelSource::FieldBacked => Backend::Numeric,
            ModelSource::Synthetic => Backend::Generic,
        });
    match backend {
        Backend::Numeric if !model.has_numeric_backend() => {
            return Err(Error::BackendUnavailable(
                "numeric backend requested but the model has no unit values (generic mode)".into(),
            ))
        }
        Backend::Generic if !model.has_generic_backend() => {
            return Err(Error::BackendUnavailable(
                "generic backend requested but the model declares no exact relations".into(),
            ))
        }
        _ => {}
    }

    Ok((
        model,
        ResolvedOptions {
            precision,
            tolerance,
            backend,
        },
    ))
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    pub model: ModelSummary,
    pub classes: Vec<ClassReport>,
    pub hodge_tables: Vec<TableReport>,
    pub derham: Vec<DeRhamReport>,
    pub verification: Vec<CheckOutcome>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.verification.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub input_sha256: String,
    pub precision: u32,
    pub tolerance: f64,
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelSummary {
    pub source: ModelSource,
    pub s: usize,
    pub t: usize,
    pub lattice: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<f64>>>,
    pub unimodularity_residuals: Vec<f64>,
    pub psi_residuals: Vec<f64>,
    /// Power-basis image of the fiber lattice at the `s+t` places
    /// (report-only data, `[re, im, rad]` per entry).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_lattice_basis: Option<Vec<Vec<[f64; 3]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClassReport {
    pub id: String,
    pub members: Vec<String>,
    /// `[re, im, rad]` per generator, when the backend carries values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character_values: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TableReport {
    pub class: String,
    /// `dims[p][q]`.
    pub dims: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DeRhamReport {
    pub class: String,
    pub dims: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn check(name: &str, passed: bool, residual: Option<f64>, detail: Option<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed,
        residual,
        detail,
    }
}

fn violations_check(name: &str, violations: Vec<String>) -> CheckOutcome {
    let passed = violations.is_empty();
    check(
        name,
        passed,
        None,
        if passed {
            None
        } else {
            Some(violations.join("; "))
        },
    )
}

/// Runs every invariant the pipeline promises and records pass/fail with the
/// measured residual.
pub fn run_verification(m: &SolvModel, cl: &Classification) -> Result<Vec<CheckOutcome>> {
    let (s, t) = (m.s, m.t);
    let mut out = Vec::new();

    let unimod = m
        .unimodularity_residuals
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    out.push(check(
        "model_unimodularity",
        unimod <= m.tol,
        Some(unimod),
        None,
    ));

    if !m.psi_residuals.is_empty() {
        let r = m.psi_residuals.iter().cloned().fold(0.0f64, f64::max);
        out.push(check(
            "model_psi_reproduces_units",
            r <= m.tol,
            Some(r),
            None,
        ));
    }

    let member_total: usize = cl.classes.iter().map(|c| c.members.len()).sum();
    out.push(check(
        "class_partition_complete",
        member_total == 1 << (s + 2 * t),
        None,
        Some(format!(
            "{} classes covering {member_total} triples",
            cl.class_count()
        )),
    ));

    out.push(violations_check(
        "hodge_binomial_identity",
        binomial_identity_violations(cl),
    ));
    out.push(violations_check(
        "derham_binomial_identity",
        derham_identity_violations(cl),
    ));

    let euler = total_euler_characteristic(cl);
    out.push(check(
        "euler_characteristic_zero",
        euler == 0,
        Some(euler as f64),
        None,
    ));

    let mut nv_violations = Vec::new();
    for idx in 0..cl.class_count() {
        for p in 0..=s + t {
            for q in 0..=s + t {
                let nv = nonvanishing_class(cl, idx, p, q);
                let dim = dolbeault_dim_class(cl, idx, p, q);
                if nv.nonzero != (dim > 0) || nv.lower_bound > dim {
                    nv_violations.push(format!(
                        "class {} at ({p},{q}): nonzero={} dim={dim} bound={}",
                        cl.classes[idx].id, nv.nonzero, nv.lower_bound
                    ));
                }
            }
        }
    }
    out.push(violations_check("nonvanishing_consistency", nv_violations));

    out.push(violations_check(
        "holomorphic_section_criterion",
        section_criterion_violations(m, cl)?,
    ));

    let serre = serre_check(m, cl)?;
    out.push(check(
        "serre_duality",
        serre.passed(),
        Some(serre.max_char_residual),
        if serre.passed() {
            None
        } else {
            Some(serre.violations.join("; "))
        },
    ));

    let brute = brute_force_tables(cl);
    let formula = all_tables(cl);
    out.push(check(
        "oracle_equivalence",
        brute == formula,
        None,
        Some(format!("{} tables compared", formula.len())),
    ));

    let star = star_closure_check(m)?;
    out.push(check(
        "star_closure",
        star.passed(),
        Some(star.max_char_residual),
        Some(format!("{} triples", star.checked)),
    ));

    // Symbolic structure-equation checks; identities in the B/C symbols.
    let mut dbar_sq_ok = true;
    let mut w_closed_ok = true;
    for i_mask in 0..(1u32 << s) {
        for j_mask in 0..(1u32 << s) {
            for k_mask in 0..(1u32 << t) {
                for l_mask in 0..(1u32 << t) {
                    let pick = |mask: u32, bound: usize| -> Vec<usize> {
                        (0..bound)
                            .filter(|b| mask & (1 << b) != 0)
                            .map(|b| b + 1)
                            .collect()
                    };
                    let mono = harmonic_monomial(
                        s,
                        t,
                        &pick(i_mask, s),
                        &pick(j_mask, s),
                        &pick(k_mask, t),
                        &pick(l_mask, t),
                    );
                    w_closed_ok &= mono.dbar().is_zero();
                }
            }
        }
    }
    for g in w1_generators(s, t).iter().chain(&w2_generators(s, t)) {
        dbar_sq_ok &= g.dbar().dbar().is_zero();
    }
    for g in [
        crate::oracle::Gen::Alpha(0),
        crate::oracle::Gen::Beta(0),
        crate::oracle::Gen::BetaBar(0),
    ] {
        let e = crate::oracle::FormExpr::generator(s, t, g);
        dbar_sq_ok &= e.dbar().dbar().is_zero();
    }
    out.push(check("dbar_squared_zero", dbar_sq_ok, None, None));
    out.push(check("dbar_closed_on_w1_w2", w_closed_ok, None, None));

    let mut d_ok = true;
    for mask in 0..(1u32 << (2 * (s + t))) {
        d_ok &= derham_monomial(s, t, mask).d_invariant().is_zero();
    }
    out.push(check("d_invariant_zero_on_model", d_ok, None, None));

    Ok(out)
}

/// Assembles the full report for a built and classified model.
pub fn build_report(
    m: &SolvModel,
    cl: &Classification,
    input_sha256: &str,
    opts: &ResolvedOptions,
) -> Result<Report> {
    let verification = run_verification(m, cl)?;
    let classes = cl
        .classes
        .iter()
        .map(|class| ClassReport {
            id: class.id.to_string(),
            members: class.members.iter().map(|t| t.to_string()).collect(),
            character_values: class
                .character
                .values
                .as_ref()
                .map(|vs| vs.iter().map(|v| [v.re, v.im, v.rad]).collect()),
            exponent: class
                .character
                .exponent
                .as_ref()
                .map(|e| e.iter().map(|x| x.to_string()).collect()),
        })
        .collect();
    let hodge_tables = all_tables(cl)
        .into_iter()
        .map(|tb| TableReport {
            class: tb.class.to_string(),
            dims: tb.dims,
        })
        .collect();
    let derham = all_derham_vectors(cl)
        .into_iter()
        .map(|v| DeRhamReport {
            class: v.class.to_string(),
            dims: v.dims,
        })
        .collect();

    Ok(Report {
        provenance: Provenance {
            tool: "otcoh".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            input_sha256: input_sha256.into(),
            precision: opts.precision,
            tolerance: opts.tolerance,
            backend: opts.backend,
        },
        model: ModelSummary {
            source: m.source.clone(),
            s: m.s,
            t: m.t,
            lattice: m.lattice.clone(),
            b: m.b.clone(),
            c: m.c.clone(),
            unimodularity_residuals: m.unimodularity_residuals.clone(),
            psi_residuals: m.psi_residuals.clone(),
            fiber_lattice_basis: m.delta_basis.as_ref().map(|rows| {
                rows.iter()
                    .map(|row| row.iter().map(|v| [v.re, v.im, v.rad]).collect())
                    .collect()
            }),
            note: match m.source {
                ModelSource::FieldBacked => Some(
                    "units are taken in the finite-index subring Z[theta]; \
                     the maximal order may be larger"
                        .into(),
                ),
                ModelSource::Synthetic => None,
            },
        },
        classes,
        hodge_tables,
        derham,
        verification,
    })
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

pub fn render_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Flat CSV: one row per table cell plus one per verification outcome.
pub fn render_csv(report: &Report) -> String {
    let mut out = String::new();
    out.push_str("kind,class,i,j,value\n");
    for tb in &report.hodge_tables {
        for (p, row) in tb.dims.iter().enumerate() {
            for (q, v) in row.iter().enumerate() {
                let _ = writeln!(out, "hodge,{},{p},{q},{v}", csv_quote(&tb.class));
            }
        }
    }
    for dr in &report.derham {
        for (r, v) in dr.dims.iter().enumerate() {
            let _ = writeln!(out, "derham,{},{r},,{v}", csv_quote(&dr.class));
        }
    }
    for c in &report.verification {
        let _ = writeln!(
            out,
            "check,{},,,{}",
            csv_quote(&c.name),
            if c.passed { "pass" } else { "fail" }
        );
    }
    out
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.into()
    }
}

/// Markdown with one Hodge table per class: `p` as rows ascending downward,
/// `q` as columns.
pub fn render_md(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Cohomology report");
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "- source: {:?}, s = {}, t = {}",
        report.model.source, report.model.s, report.model.t
    );
    let _ = writeln!(
        out,
        "- precision: {} bits, tolerance: {:e}, backend: {}",
        report.provenance.precision, report.provenance.tolerance, report.provenance.backend
    );
    let _ = writeln!(out, "- input sha256: `{}`", report.provenance.input_sha256);
    let _ = writeln!(out, "- classes: {}", report.classes.len());
    if let Some(note) = &report.model.note {
        let _ = writeln!(out, "- note: {note}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "## Bundle classes");
    let _ = writeln!(out);
    for class in &report.classes {
        let _ = writeln!(
            out,
            "- `{}`: members {}",
            class.id,
            class.members.join(" | ")
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "## Hodge tables (rows p, columns q)");
    for tb in &report.hodge_tables {
        let _ = writeln!(out);
        let _ = writeln!(out, "### class `{}`", tb.class);
        let _ = writeln!(out);
        let width = tb.dims.len();
        let header: Vec<String> = (0..width).map(|q| format!("q={q}")).collect();
        let _ = writeln!(out, "| p\\q | {} |", header.join(" | "));
        let _ = writeln!(out, "|---|{}|", vec!["---"; width].join("|"));
        for (p, row) in tb.dims.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "| {p} | {} |", cells.join(" | "));
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "## De Rham dimensions (index r)");
    let _ = writeln!(out);
    for dr in &report.derham {
        let cells: Vec<String> = dr.dims.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "- `{}`: [{}]", dr.class, cells.join(", "));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "## Verification");
    let _ = writeln!(out);
    let _ = writeln!(out, "| check | result | residual |");
    let _ = writeln!(out, "|---|---|---|");
    for c in &report.verification {
        let residual = c
            .residual
            .map(|r| format!("{r:.3e}"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "| {} | {} | {residual} |",
            c.name,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
