//! Cohomology of flat holomorphic line bundles on Oeljeklaus-Toma solvmanifolds.
//!
//! The library builds the solvable-group model of an OT-manifold from number-field
//! data (a monic irreducible polynomial and a rank-`s` system of totally positive
//! units), classifies the flat line bundles that restrict trivially to the
//! nilradical by their characters on the lattice, and computes exact Dolbeault and
//! de Rham cohomology dimensions for every bundle class. The harmonic-form model
//! behind those dimension counts is verified independently by a symbolic exterior
//! algebra engine ([`oracle`]).
//!
//! Pipeline:
//!
//! 1. [`field`]: arithmetic in `K = Q[x]/(f)` and certified complex embeddings,
//!    ordered with real places first and one representative per conjugate pair.
//! 2. [`model`]: the logarithmic unit lattice, the matrices `B`, `C` and the
//!    functionals `psi_k`, with a unimodularity certificate. Synthetic models can
//!    be built directly from `(s, t, B)` plus exact character relations.
//! 3. [`characters`]: flat line bundles as characters of the lattice; grouping of
//!    all index triples `(I, K, L)` into bundle classes.
//! 4. [`cohomology`]: per-class Hodge tables, de Rham dimension vectors, the
//!    non-vanishing criterion, Serre-type duality, and tangent-bundle cohomology.
//! 5. [`oracle`]: graded exterior algebra over character-weighted generators with
//!    symbolic coefficients; checks the structure equations and star closure.
//! 6. [`report`] / [`cli`]: spec-file ingestion, reproducible reports, CLI.

pub mod characters;
pub mod cli;
pub mod cohomology;
pub mod field;
pub mod model;
pub mod oracle;
pub mod report;

use num_rational::BigRational;

/// Exact rational scalar used throughout the exact kernels.
pub type Rat = BigRational;

/// Crate-wide error type.
///
/// Variants mirror the failure modes of the individual pipeline stages; the CLI
/// maps them onto its exit-code contract (2 = bad input/model, 3 = ambiguous
/// characters, 4 = failed verification).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("polynomial is not squarefree (gcd(f, f') has positive degree)")]
    NotSquarefree,
    #[error("polynomial is reducible over Q: {0}")]
    Reducible(String),
    #[error(
        "irreducibility of a degree-{0} polynomial is not checked automatically; \
         set assume_irreducible to accept it"
    )]
    IrreducibilityUnverified(usize),
    #[error("wrong signature: the construction needs s >= 1 and t >= 1, got s={s}, t={t}")]
    WrongSignature { s: usize, t: usize },
    #[error("root discs could not be made pairwise disjoint at {0} bits of precision")]
    NonSeparableRoots(u32),
    #[error("interval arithmetic exhausted the available precision")]
    PrecisionExhausted,
    #[error("element is not invertible mod f; a nontrivial gcd certifies that f is reducible")]
    NotInvertible,
    #[error("element does not have integer coordinates in the power basis Z[theta]")]
    NonIntegralElement,
    #[error("unit is not totally positive: sigma_{index}(u) = {value}")]
    NotTotallyPositive { index: usize, value: f64 },
    #[error("element is not a unit: |N(a)| = {0}")]
    NotAUnit(String),
    #[error("log vectors of the units do not span: |det P| = {det:.3e} <= {threshold:.3e}")]
    NotALattice { det: f64, threshold: f64 },
    #[error("unit system has {got} units but the signature requires exactly {want}")]
    WrongRank { got: usize, want: usize },
    #[error("row {row} violates unimodularity: 1 + sum_k b_ik = {residual}")]
    NotUnimodular { row: usize, residual: String },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("generic character backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("ambiguous character coincidences\n{0}")]
    AmbiguousCharacters(characters::AmbiguityReport),
    #[error("malformed spec: {0}")]
    MalformedSpec(String),
    #[error("no inverse class found for class {0}; the classification is inconsistent")]
    MissingInverseClass(String),
    #[error("declared relation is inconsistent with B: {0}")]
    InconsistentRelation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Binomial coefficient `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: usize, k: isize) -> u64 {
    if k < 0 || k as usize > n {
        return 0;
    }
    let k = (k as usize).min(n - k as usize);
    let mut acc: u64 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u64 / (j + 1) as u64;
    }
    acc
}
