//! The solvmanifold model: logarithmic unit lattice, the matrices `B` and `C`,
//! the functionals `psi_k`, and the unimodularity certificate.
//!
//! A field-backed model is derived from `(f, U)`: the rows `lambda_j = p(l(u_j))`
//! of the projected log lattice form the matrix `P`, and `B`, `C` solve
//! `P B = M` and `P C = A` with `M_jk = 2 log|sigma_{s+k}(u_j)|` and
//! `A_jk = Arg(sigma_{s+k}(u_j))`. A synthetic model takes `(s, t, B)` directly,
//! together with exact character relations; this reproduces examples where only
//! the multiplicative relations among the `sigma_i(u)` are pinned down, not the
//! field itself.
//!
//! The functional is `psi_k(x) = (1/2) sum_i b_ik x_i + sqrt(-1) sum_i c_ik x_i`.
//! One source display omits the imaginary unit in front of the `c`-sum, but the
//! surrounding identity `sigma_{s+k}(a) = exp((1/2) sum b_ik x_i +
//! sqrt(-1) sum c_ik x_i)` fixes the reading used here, and it is the only one
//! under which `exp(psi_k)` and `exp(conj(psi_k))` give conjugate characters.

use num_traits::Zero;

use crate::field::{evaluate, rat_to_f64, EmbeddingSet, FieldElement, NumberField, Polynomial};
use crate::{Error, Rat, Result};

/// Complex value with an error radius, in double precision.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CApprox {
    pub re: f64,
    pub im: f64,
    pub rad: f64,
}

impl CApprox {
    pub fn new(re: f64, im: f64, rad: f64) -> Self {
        CApprox { re, im, rad }
    }

    pub fn one() -> Self {
        CApprox::new(1.0, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        CApprox::new(self.re, -self.im, self.rad)
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn mul(self, o: CApprox) -> CApprox {
        let re = self.re * o.re - self.im * o.im;
        let im = self.re * o.im + self.im * o.re;
        let bound_a = self.re.abs() + self.im.abs();
        let bound_b = o.re.abs() + o.im.abs();
        let rad =
            bound_a * o.rad + bound_b * self.rad + self.rad * o.rad + 1e-16 * (re.abs() + im.abs());
        CApprox::new(re, im, rad)
    }

    /// Interval inverse; requires the disc to exclude zero.
    pub fn inv(self) -> Result<CApprox> {
        let lb = self.re.abs().max(self.im.abs()); // lower bound on |center|
        if lb <= self.rad {
            return Err(Error::PrecisionExhausted);
        }
        let n2 = self.re * self.re + self.im * self.im;
        let re = self.re / n2;
        let im = -self.im / n2;
        let rad = self.rad / (lb * (lb - self.rad)) + 1e-16 / lb;
        Ok(CApprox::new(re, im, rad))
    }

    pub fn powi(self, k: i64) -> Result<CApprox> {
        let base = if k < 0 { self.inv()? } else { self };
        let mut acc = CApprox::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(base);
        }
        Ok(acc)
    }

    /// Distance between centers.
    pub fn dist(self, o: CApprox) -> f64 {
        (self.re - o.re).hypot(self.im - o.im)
    }
}

/// Default model tolerance for a given root precision: `2^(-precision/4)`,
/// floored at `1e-9` because the model layer itself works in doubles.
pub fn default_tolerance(precision: u32) -> f64 {
    (2.0f64).powi(-((precision / 4) as i32)).max(1e-9)
}

/// Rank-`s` system of totally positive units.
#[derive(Debug, Clone)]
pub struct UnitSystem {
    units: Vec<FieldElement>,
}

impl UnitSystem {
    /// Checks that every element is a unit and totally positive at the real
    /// embeddings.
    pub fn new(field: &NumberField, units: Vec<FieldElement>, emb: &EmbeddingSet) -> Result<Self> {
        let (s, _) = emb.signature();
        for u in &units {
            check_unit(field, u)?;
            check_totally_positive(u, s, emb)?;
        }
        Ok(UnitSystem { units })
    }

    pub fn units(&self) -> &[FieldElement] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}

fn check_unit(field: &NumberField, u: &FieldElement) -> Result<()> {
    if !field.is_unit(u)? {
        return Err(Error::NotAUnit(field.norm(u).to_string()));
    }
    Ok(())
}

fn check_totally_positive(u: &FieldElement, s: usize, emb: &EmbeddingSet) -> Result<()> {
    for i in 1..=s {
        let v = evaluate(u, i, emb)?;
        if !v.certainly_positive_real() {
            return Err(Error::NotTotallyPositive {
                index: i,
                value: v.to_c64().0,
            });
        }
    }
    Ok(())
}

/// Logarithmic embedding `l(u) = (log sigma_1(u), ..., log sigma_s(u),
/// 2 log|sigma_{s+1}(u)|, ..., 2 log|sigma_{s+t}(u)|)`.
///
/// The row sum is `log|N(u)| = 0` for units.
pub fn log_vector(field: &NumberField, u: &FieldElement, emb: &EmbeddingSet) -> Result<Vec<f64>> {
    check_unit(field, u)?;
    let (s, t) = emb.signature();
    check_totally_positive(u, s, emb)?;
    let mut out = Vec::with_capacity(s + t);
    for i in 1..=s {
        let v = evaluate(u, i, emb)?;
        out.push(v.to_c64().0.ln());
    }
    for k in 1..=t {
        let v = evaluate(u, s + k, emb)?;
        let (re, im) = v.to_c64();
        out.push((re * re + im * im).ln()); // 2 log|.| = log(|.|^2)
    }
    Ok(out)
}

/// The log vectors of the unit system and the projected `s x s` matrix `P`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize, PartialEq)]
pub struct LogLattice {
    pub vectors: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
}

/// Where a model came from.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ModelSource {
    FieldBacked,
    Synthetic,
}

/// Generator data for a synthetic model.
#[derive(Debug, Clone)]
pub enum SyntheticGenerators {
    /// Imaginary parts of the `psi_k` are generic: characters are compared
    /// only by exact relation reduction.
    Generic,
    /// Explicit rational `C` matrix; numeric character values are available.
    ExplicitC(Vec<Vec<Rat>>),
}

/// The solvmanifold data: signature, lattice generators, the matrices `B` and
/// `C`, unit embedding values and/or exact character relations.
#[derive(Debug, Clone)]
pub struct SolvModel {
    pub s: usize,
    pub t: usize,
    /// Rows `lambda_j`, the generators of the lattice in `R^s`.
    pub lattice: Vec<Vec<f64>>,
    pub log_lattice: Option<LogLattice>,
    pub b: Vec<Vec<f64>>,
    pub b_exact: Option<Vec<Vec<Rat>>>,
    pub c: Option<Vec<Vec<f64>>>,
    /// `sigma_i(u_j)` indexed `[j][i-1]`, `i = 1..=s+2t`; absent for generic
    /// synthetic models.
    pub unit_values: Option<Vec<Vec<CApprox>>>,
    /// Exact relation vectors over `{x_1..x_s, psi_1..psi_t, psibar_1..psibar_t}`
    /// whose associated characters are trivial on the lattice; always contains
    /// the unimodular relation. Present iff the generic backend is available.
    pub relations: Option<Vec<Vec<Rat>>>,
    /// Power-basis image `sigma(theta^m)` at the `s+t` places; recorded for
    /// report completeness, unused by any computation.
    pub delta_basis: Option<Vec<Vec<CApprox>>>,
    pub source: ModelSource,
    pub precision: u32,
    pub tol: f64,
    /// Residuals `|1 + sum_k b_ik|` per real direction.
    pub unimodularity_residuals: Vec<f64>,
    /// Residuals `|exp(psi_k(lambda_j)) - sigma_{s+k}(u_j)|`; empty when no
    /// numeric generator data exists.
    pub psi_residuals: Vec<f64>,
}

impl SolvModel {
    pub fn n(&self) -> usize {
        self.s + 2 * self.t
    }

    pub fn has_numeric_backend(&self) -> bool {
        self.unit_values.is_some()
    }

    pub fn has_generic_backend(&self) -> bool {
        self.relations.is_some()
    }

    /// `exp(psi_k(lambda_j))` from `B` and `C`; needs an explicit `C`.
    pub fn exp_psi_at_generator(&self, k: usize, j: usize) -> Option<CApprox> {
        let c = self.c.as_ref()?;
        let mut re_part = 0.0;
        let mut im_part = 0.0;
        for i in 0..self.s {
            re_part += 0.5 * self.b[i][k] * self.lattice[j][i];
            im_part += c[i][k] * self.lattice[j][i];
        }
        let m = re_part.exp();
        Some(CApprox::new(
            m * im_part.cos(),
            m * im_part.sin(),
            1e-13 * (1.0 + m),
        ))
    }
}

// ---------------------------------------------------------------------------
// Field-backed construction
// ---------------------------------------------------------------------------

/// Builds the model from field data with the principal argument branch.
pub fn build_model(
    field: &NumberField,
    units: &UnitSystem,
    emb: &EmbeddingSet,
) -> Result<SolvModel> {
    build_model_with_branch(field, units, emb, None)
}

/// Same as [`build_model`] but shifting the argument of `sigma_{s+k}(u_j)` by
/// `2 pi * branch[j][k]` before solving for `C`.
///
/// Any branch choice leaves every character value on the lattice unchanged;
/// exposing the shift makes that invariance testable.
pub fn build_model_with_branch(
    field: &NumberField,
    units: &UnitSystem,
    emb: &EmbeddingSet,
    branch: Option<&[Vec<i64>]>,
) -> Result<SolvModel> {
    let (s, t) = emb.signature();
    let n = emb.n();
    if units.len() != s {
        return Err(Error::WrongRank {
            got: units.len(),
            want: s,
        });
    }
    let precision = emb.precision();
    let tol = default_tolerance(precision);

    let vectors: Vec<Vec<f64>> = units
        .units()
        .iter()
        .map(|u| log_vector(field, u, emb))
        .collect::<Result<_>>()?;
    let p: Vec<Vec<f64>> = vectors.iter().map(|v| v[..s].to_vec()).collect();

    let det = det_f64(&p);
    let norm = inf_norm(&p);
    let threshold = tol * norm.powi(s as i32);
    if det.abs() <= threshold {
        return Err(Error::NotALattice {
            det: det.abs(),
            threshold,
        });
    }

    // Unit values at every embedding.
    let mut unit_values: Vec<Vec<CApprox>> = Vec::with_capacity(s);
    for u in units.units() {
        let mut row = Vec::with_capacity(n);
        for i in 1..=n {
            let v = evaluate(u, i, emb)?;
            let (re, im) = v.to_c64();
            row.push(CApprox::new(
                re,
                im,
                v.rad_f64() + 1e-15 * (1.0 + re.abs() + im.abs()),
            ));
        }
        unit_values.push(row);
    }

    // Right-hand sides: M_jk = 2 log|sigma_{s+k}(u_j)|, A_jk = Arg + 2 pi shift.
    let mut m = vec![vec![0.0; t]; s];
    let mut a = vec![vec![0.0; t]; s];
    for j in 0..s {
        for k in 0..t {
            m[j][k] = vectors[j][s + k];
            let v = unit_values[j][s + k];
            let mut arg = v.im.atan2(v.re);
            if let Some(shifts) = branch {
                arg += 2.0 * std::f64::consts::PI * shifts[j][k] as f64;
            }
            a[j][k] = arg;
        }
    }

    let b = solve_matrix(&p, &m)?;
    let c = solve_matrix(&p, &a)?;

    let unimodularity_residuals: Vec<f64> = (0..s)
        .map(|i| (1.0 + (0..t).map(|k| b[i][k]).sum::<f64>()).abs())
        .collect();
    for (i, r) in unimodularity_residuals.iter().enumerate() {
        if *r > tol {
            return Err(Error::NotUnimodular {
                row: i,
                residual: format!("{r:e}"),
            });
        }
    }

    let delta_basis = {
        let mut rows = Vec::with_capacity(n);
        for mpow in 0..n {
            let theta_m = field.pow(&field.theta(), mpow as i64)?;
            let mut row = Vec::with_capacity(s + t);
            for i in 1..=s + t {
                let v = evaluate(&theta_m, i, emb)?;
                let (re, im) = v.to_c64();
                row.push(CApprox::new(re, im, v.rad_f64()));
            }
            rows.push(row);
        }
        Some(rows)
    };

    let mut model = SolvModel {
        s,
        t,
        lattice: p.clone(),
        log_lattice: Some(LogLattice { vectors, p }),
        b,
        b_exact: None,
        c: Some(c),
        unit_values: Some(unit_values),
        relations: None,
        delta_basis,
        source: ModelSource::FieldBacked,
        precision,
        tol,
        unimodularity_residuals,
        psi_residuals: Vec::new(),
    };

    // exp(psi_k(lambda_j)) must reproduce sigma_{s+k}(u_j).
    let mut psi_residuals = Vec::with_capacity(s * t);
    for j in 0..model.s {
        for k in 0..model.t {
            let lhs = model.exp_psi_at_generator(k, j).expect("C present");
            let rhs = model.unit_values.as_ref().unwrap()[j][model.s + k];
            let r = lhs.dist(rhs);
            if r > model.tol {
                return Err(Error::PrecisionExhausted);
            }
            psi_residuals.push(r);
        }
    }
    model.psi_residuals = psi_residuals;
    Ok(model)
}

/// Convenience: validate the polynomial/units and build in one call.
pub fn build_model_from_parts(
    f: &Polynomial,
    unit_coords: &[FieldElement],
    precision: u32,
) -> Result<SolvModel> {
    let field = NumberField::new(f.clone());
    let emb = crate::field::find_embeddings(f, precision)?;
    let units = UnitSystem::new(&field, unit_coords.to_vec(), &emb)?;
    build_model(&field, &units, &emb)
}

// ---------------------------------------------------------------------------
// Synthetic construction
// ---------------------------------------------------------------------------

/// Builds a model directly from `(s, t, B)` plus exact relations.
///
/// `B` must satisfy unimodularity exactly. Each relation vector `r` over the
/// basis `{x_i, psi_k, psibar_k}` declares that the functional `r` vanishes
/// identically; its real part is forced by `B` and is verified here, while an
/// unbalanced `psi`/`psibar` part declares a constraint on the generic
/// imaginary parts. The unimodular relation is always included. Lattice
/// generators default to the standard basis of `R^s`.
pub fn synthetic_model(
    s: usize,
    t: usize,
    b_exact: Vec<Vec<Rat>>,
    relations: Vec<Vec<Rat>>,
    generators: SyntheticGenerators,
) -> Result<SolvModel> {
    if s == 0 || t == 0 {
        return Err(Error::WrongSignature { s, t });
    }
    if b_exact.len() != s || b_exact.iter().any(|row| row.len() != t) {
        return Err(Error::MalformedSpec(format!("B must be {s} x {t}")));
    }
    for (i, row) in b_exact.iter().enumerate() {
        let residual: Rat = Rat::from_integer(1.into()) + row.iter().sum::<Rat>();
        if !residual.is_zero() {
            return Err(Error::NotUnimodular {
                row: i,
                residual: residual.to_string(),
            });
        }
    }

    let dim = s + 2 * t;
    // Balanced kernel forced by B: for each k, x-part -b_{.k} with psi_k and
    // psibar_k both 1 is an identical functional zero (real parts cancel by
    // the definition of psi_k, imaginary parts cancel pairwise). Its span
    // contains the unimodular vector. Declared relations add to this.
    let mut rel_vectors: Vec<Vec<Rat>> = (0..t)
        .map(|k| {
            let mut r = vec![Rat::zero(); dim];
            for (i, row) in b_exact.iter().enumerate() {
                r[i] = -row[k].clone();
            }
            r[s + k] = Rat::from_integer(1.into());
            r[s + t + k] = Rat::from_integer(1.into());
            r
        })
        .collect();
    for (ridx, r) in relations.into_iter().enumerate() {
        // Accept an optional leading constant slot, which must be zero.
        let r = if r.len() == dim + 1 {
            if !r[0].is_zero() {
                return Err(Error::MalformedSpec(format!(
                    "relation {ridx}: nonzero constant slot is not supported"
                )));
            }
            r[1..].to_vec()
        } else if r.len() == dim {
            r
        } else {
            return Err(Error::MalformedSpec(format!(
                "relation {ridx}: expected {dim} (or {}) entries, got {}",
                dim + 1,
                r.len()
            )));
        };
        // Real-part consistency with B: a_i + (1/2) sum_k (e_k + f_k) b_ik = 0.
        for i in 0..s {
            let mut acc = r[i].clone();
            for k in 0..t {
                let ef = &r[s + k] + &r[s + t + k];
                acc += ef * &b_exact[i][k] / Rat::from_integer(2.into());
            }
            if !acc.is_zero() {
                return Err(Error::InconsistentRelation(format!(
                    "relation {ridx} has nonzero real part {acc} at x_{}",
                    i + 1
                )));
            }
        }
        rel_vectors.push(r);
    }

    let b: Vec<Vec<f64>> = b_exact
        .iter()
        .map(|row| row.iter().map(rat_to_f64).collect())
        .collect();
    let lattice: Vec<Vec<f64>> = (0..s)
        .map(|j| (0..s).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let (c, unit_values) = match generators {
        SyntheticGenerators::Generic => (None, None),
        SyntheticGenerators::ExplicitC(c_exact) => {
            if c_exact.len() != s || c_exact.iter().any(|row| row.len() != t) {
                return Err(Error::MalformedSpec(format!("C must be {s} x {t}")));
            }
            let c: Vec<Vec<f64>> = c_exact
                .iter()
                .map(|row| row.iter().map(rat_to_f64).collect())
                .collect();
            let mut values = Vec::with_capacity(s);
            for j in 0..s {
                let mut row = Vec::with_capacity(dim);
                for i in 0..s {
                    let v = if i == j { std::f64::consts::E } else { 1.0 };
                    row.push(CApprox::new(v, 0.0, 1e-14 * v));
                }
                for k in 0..t {
                    let m = (0.5 * b[j][k]).exp();
                    let phase = c[j][k];
                    row.push(CApprox::new(
                        m * phase.cos(),
                        m * phase.sin(),
                        1e-13 * (1.0 + m),
                    ));
                }
                for k in 0..t {
                    let v: CApprox = row[s + k];
                    row.push(v.conj());
                }
                values.push(row);
            }
            (Some(c), Some(values))
        }
    };

    let unimodularity_residuals = vec![0.0; s];
    Ok(SolvModel {
        s,
        t,
        lattice,
        log_lattice: None,
        b,
        b_exact: Some(b_exact),
        c,
        unit_values,
        relations: Some(rel_vectors),
        delta_basis: None,
        source: ModelSource::Synthetic,
        precision: 0,
        tol: default_tolerance(256),
        unimodularity_residuals,
        psi_residuals: Vec::new(),
    })
}

/// The exponent vector of the always-trivial full-product character
/// `x_{[s]} + psi_{[t]} + psibar_{[t]}`.
pub fn unimodular_vector(s: usize, t: usize) -> Vec<Rat> {
    vec![Rat::from_integer(1.into()); s + 2 * t]
}

// ---------------------------------------------------------------------------
// Small dense linear algebra (f64)
// ---------------------------------------------------------------------------

fn inf_norm(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn det_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

/// Solves `P X = RHS` by Gaussian elimination with partial pivoting.
fn solve_matrix(p: &[Vec<f64>], rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = p.len();
    let cols = rhs[0].len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = p[i].clone();
            row.extend_from_slice(&rhs[i]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == 0.0 {
            return Err(Error::NotALattice {
                det: 0.0,
                threshold: 0.0,
            });
        }
        a.swap(pivot, col);
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n + cols {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    Ok((0..n)
        .map(|i| (0..cols).map(|k| a[i][n + k] / a[i][i]).collect())
        .collect())
}
