//! Symbolic verification layer: a graded exterior algebra over
//! character-weighted one-form generators, with the Dolbeault and invariant
//! de Rham derivations.
//!
//! Every term of a [`FormExpr`] is `coefficient * (sorted square-free
//! generator monomial) tensor v_Psi`, where the weight `Psi` is an exact
//! exponent vector over `{x_i, psi_k, psibar_k}` and the coefficient lives in
//! the Gaussian rationals extended by the formal symbols `B_ik`, `C_ik`
//! ([`sympoly`]). The structure rules are
//!
//! ```text
//! dbar alpha_i   = -(1/2) alphabar_i ^ alpha_i         dbar alphabar_i = 0
//! dbar beta_k    = -(1/2) psi_k(alphabar) ^ beta_k
//! dbar betabar_k = -(1/2) psibar_k(alphabar) ^ betabar_k
//! dbar v_Psi     =  (1/2) Psi(alphabar) tensor v_Psi
//! ```
//!
//! with `psi_k(alphabar) = sum_i ((1/2) B_ik + i C_ik) alphabar_i`, extended
//! as a graded derivation. The invariant de Rham differential follows the same
//! pattern over `{dx_i, e^{-x_i}dy_i, e^{-psi_k}dz_k, e^{-psibar_k}dzbar_k}`
//! with section rule `d v_Psi = Psi(dx) tensor v_Psi`. Wedge monomials of the
//! weighted generator lists are closed for both operators; the checks here
//! verify that symbolically, so the conclusion holds for every model at once.

pub mod sympoly;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::characters::IndexTriple;
use crate::model::{unimodular_vector, SolvModel};
use crate::{Rat, Result};

pub use sympoly::{GaussRat, Sym, SymPoly};

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// One-form generator. Variant order is the global basis order; monomials are
/// normalized ascending with transposition-parity signs.
///
/// Dolbeault family: `Alpha`/`Beta` are (1,0), `AlphaBar`/`BetaBar` are (0,1).
/// De Rham family: `Dx` is `dx_i`, `Ey` is `e^{-x_i}dy_i`, `Zc`/`ZcBar` are
/// `e^{-psi_k}dz_k` and its conjugate. Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Gen {
    Alpha(u8),
    AlphaBar(u8),
    Beta(u8),
    BetaBar(u8),
    Dx(u8),
    Ey(u8),
    Zc(u8),
    ZcBar(u8),
}

impl Gen {
    fn is_dolbeault(&self) -> bool {
        matches!(
            self,
            Gen::Alpha(_) | Gen::AlphaBar(_) | Gen::Beta(_) | Gen::BetaBar(_)
        )
    }

    fn is_derham(&self) -> bool {
        !self.is_dolbeault()
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Alpha(i) => write!(f, "a{}", i + 1),
            Gen::AlphaBar(i) => write!(f, "abar{}", i + 1),
            Gen::Beta(k) => write!(f, "b{}", k + 1),
            Gen::BetaBar(k) => write!(f, "bbar{}", k + 1),
            Gen::Dx(i) => write!(f, "dx{}", i + 1),
            Gen::Ey(i) => write!(f, "ey{}", i + 1),
            Gen::Zc(k) => write!(f, "dz{}", k + 1),
            Gen::ZcBar(k) => write!(f, "dzbar{}", k + 1),
        }
    }
}

// Weight helpers over {x_1..x_s, psi_1..psi_t, psibar_1..psibar_t}.

pub fn weight_zero(s: usize, t: usize) -> Vec<Rat> {
    vec![Rat::zero(); s + 2 * t]
}

pub fn weight_x(s: usize, t: usize, i: usize) -> Vec<Rat> {
    let mut w = weight_zero(s, t);
    w[i] = Rat::from_integer(1.into());
    w
}

pub fn weight_psi(s: usize, t: usize, k: usize) -> Vec<Rat> {
    let mut w = weight_zero(s, t);
    w[s + k] = Rat::from_integer(1.into());
    w
}

pub fn weight_psibar(s: usize, t: usize, k: usize) -> Vec<Rat> {
    let mut w = weight_zero(s, t);
    w[s + t + k] = Rat::from_integer(1.into());
    w
}

// ---------------------------------------------------------------------------
// FormExpr
// ---------------------------------------------------------------------------

type TermKey = (Vec<Gen>, Vec<Rat>);

/// Element of the weighted exterior algebra: sparse sum of
/// `coefficient * monomial tensor v_weight` terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormExpr {
    s: usize,
    t: usize,
    terms: BTreeMap<TermKey, SymPoly>,
}

impl FormExpr {
    pub fn zero(s: usize, t: usize) -> Self {
        FormExpr {
            s,
            t,
            terms: BTreeMap::new(),
        }
    }

    /// The scalar `1` (empty monomial, trivial weight).
    pub fn one(s: usize, t: usize) -> Self {
        FormExpr::section(s, t, weight_zero(s, t))
    }

    /// `v_weight` with no form part.
    pub fn section(s: usize, t: usize, weight: Vec<Rat>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((Vec::new(), weight), SymPoly::one());
        FormExpr { s, t, terms }
    }

    /// A single unweighted generator.
    pub fn generator(s: usize, t: usize, g: Gen) -> Self {
        FormExpr::monomial(s, t, vec![g])
    }

    /// `g tensor v_weight`.
    pub fn weighted_generator(s: usize, t: usize, g: Gen, weight: Vec<Rat>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((vec![g], weight), SymPoly::one());
        FormExpr { s, t, terms }
    }

    /// Unweighted monomial; `gens` must be strictly ascending.
    pub fn monomial(s: usize, t: usize, gens: Vec<Gen>) -> Self {
        assert!(
            gens.windows(2).all(|w| w[0] < w[1]),
            "monomial generators must be strictly ascending"
        );
        let mut terms = BTreeMap::new();
        terms.insert((gens, weight_zero(s, t)), SymPoly::one());
        FormExpr { s, t, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// All distinct weights appearing among the terms.
    pub fn weights(&self) -> Vec<Vec<Rat>> {
        let mut out: Vec<Vec<Rat>> = self.terms.keys().map(|(_, w)| w.clone()).collect();
        out.dedup();
        out
    }

    pub fn add(&self, o: &FormExpr) -> FormExpr {
        assert_eq!((self.s, self.t), (o.s, o.t));
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            let entry = terms.entry(k.clone()).or_insert_with(SymPoly::zero);
            *entry = entry.add(c);
            if entry.is_zero() {
                terms.remove(k);
            }
        }
        FormExpr {
            s: self.s,
            t: self.t,
            terms,
        }
    }

    pub fn neg(&self) -> FormExpr {
        FormExpr {
            s: self.s,
            t: self.t,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale_gauss(&self, c: &GaussRat) -> FormExpr {
        self.scale_poly(&SymPoly::constant(c.clone()))
    }

    pub fn scale_poly(&self, p: &SymPoly) -> FormExpr {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let v = c.mul(p);
            if !v.is_zero() {
                terms.insert(k.clone(), v);
            }
        }
        FormExpr {
            s: self.s,
            t: self.t,
            terms,
        }
    }

    /// Exterior product. Bilinear; weights add; shared generators kill a term;
    /// signs by transposition parity of the sorted merge.
    pub fn wedge(&self, o: &FormExpr) -> FormExpr {
        assert_eq!((self.s, self.t), (o.s, o.t));
        let mut terms: BTreeMap<TermKey, SymPoly> = BTreeMap::new();
        for ((ma, wa), ca) in &self.terms {
            for ((mb, wb), cb) in &o.terms {
                let (mono, sign) = match merge_sorted(ma, mb) {
                    Some(x) => x,
                    None => continue,
                };
                let weight: Vec<Rat> = wa.iter().zip(wb).map(|(x, y)| x + y).collect();
                let mut coef = ca.mul(cb);
                if sign < 0 {
                    coef = coef.neg();
                }
                let entry = terms
                    .entry((mono, weight))
                    .or_insert_with(SymPoly::zero);
                *entry = entry.add(&coef);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        FormExpr {
            s: self.s,
            t: self.t,
            terms,
        }
    }

    /// Adds `w` to the weight of every term.
    fn shift_weight(&self, w: &[Rat]) -> FormExpr {
        let terms = self
            .terms
            .iter()
            .map(|((m, wt), c)| {
                let nw: Vec<Rat> = wt.iter().zip(w).map(|(x, y)| x + y).collect();
                ((m.clone(), nw), c.clone())
            })
            .collect();
        FormExpr {
            s: self.s,
            t: self.t,
            terms,
        }
    }

    /// The Dolbeault operator, extended as a graded derivation with the
    /// section rule `dbar v_Psi = (1/2) Psi(alphabar) tensor v_Psi`.
    pub fn dbar(&self) -> FormExpr {
        let (s, t) = (self.s, self.t);
        let mut out = FormExpr::zero(s, t);
        for ((mono, w), coef) in &self.terms {
            assert!(
                mono.iter().all(Gen::is_dolbeault),
                "dbar needs Dolbeault generators"
            );
            for (j, g) in mono.iter().enumerate() {
                let rule = dbar_rule(s, t, *g);
                if rule.is_zero() {
                    continue;
                }
                let prefix = FormExpr::monomial(s, t, mono[..j].to_vec());
                let suffix = FormExpr::monomial(s, t, mono[j + 1..].to_vec());
                let mut piece = prefix.wedge(&rule).wedge(&suffix);
                if j % 2 == 1 {
                    piece = piece.neg();
                }
                out = out.add(&piece.shift_weight(w).scale_poly(coef));
            }
            let psi = psi_of(s, t, w, Line::AlphaBar)
                .scale_gauss(&GaussRat::from_i64(1, 2));
            if !psi.is_zero() {
                let mut piece = FormExpr::monomial(s, t, mono.clone()).wedge(&psi);
                if mono.len() % 2 == 1 {
                    piece = piece.neg();
                }
                out = out.add(&piece.shift_weight(w).scale_poly(coef));
            }
        }
        out
    }

    /// The invariant de Rham differential on the weighted model, with
    /// section rule `d v_Psi = Psi(dx) tensor v_Psi`.
    pub fn d_invariant(&self) -> FormExpr {
        let (s, t) = (self.s, self.t);
        let mut out = FormExpr::zero(s, t);
        for ((mono, w), coef) in &self.terms {
            assert!(
                mono.iter().all(Gen::is_derham),
                "d_invariant needs de Rham generators"
            );
            for (j, g) in mono.iter().enumerate() {
                let rule = d_rule(s, t, *g);
                if rule.is_zero() {
                    continue;
                }
                let prefix = FormExpr::monomial(s, t, mono[..j].to_vec());
                let suffix = FormExpr::monomial(s, t, mono[j + 1..].to_vec());
                let mut piece = prefix.wedge(&rule).wedge(&suffix);
                if j % 2 == 1 {
                    piece = piece.neg();
                }
                out = out.add(&piece.shift_weight(w).scale_poly(coef));
            }
            let psi = psi_of(s, t, w, Line::Dx);
            if !psi.is_zero() {
                let mut piece = FormExpr::monomial(s, t, mono.clone()).wedge(&psi);
                if mono.len() % 2 == 1 {
                    piece = piece.neg();
                }
                out = out.add(&piece.shift_weight(w).scale_poly(coef));
            }
        }
        out
    }

    /// Substitutes exact rational `B`, `C` entries for the formal symbols.
    pub fn subst_bc(&self, b: &[Vec<Rat>], c: &[Vec<Rat>]) -> FormExpr {
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, coef)| {
                let v = coef.subst(b, c);
                if v.is_zero() {
                    None
                } else {
                    Some((k.clone(), SymPoly::constant(v)))
                }
            })
            .collect();
        FormExpr {
            s: self.s,
            t: self.t,
            terms,
        }
    }
}

impl fmt::Display for FormExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((mono, w), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for g in mono {
                write!(f, "^{g}")?;
            }
            if w.iter().any(|x| !x.is_zero()) {
                write!(f, " (x) v[")?;
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "{}]", parts.join(","))?;
            }
        }
        Ok(())
    }
}

fn merge_sorted(a: &[Gen], b: &[Gen]) -> Option<(Vec<Gen>, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut swaps = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                swaps += a.len() - i;
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, if swaps % 2 == 0 { 1 } else { -1 }))
}

/// `psi_k` coefficient of `alphabar_i` (resp. `dx_i`): `(1/2) B_ik + i C_ik`.
fn psi_coeff(i: usize, k: usize, conjugate: bool) -> SymPoly {
    let b = SymPoly::symbol(Sym::B(i as u8, k as u8)).scale(&GaussRat::from_i64(1, 2));
    let ic = SymPoly::symbol(Sym::C(i as u8, k as u8)).scale(&if conjugate {
        GaussRat::i().neg()
    } else {
        GaussRat::i()
    });
    b.add(&ic)
}

enum Line {
    AlphaBar,
    Dx,
}

/// The one-form `Psi(alphabar)` or `Psi(dx)` of a weight vector:
/// `sum_i [a_i + sum_k e_k psi_k(e_i) + sum_k f_k psibar_k(e_i)] gen_i`.
fn psi_of(s: usize, t: usize, w: &[Rat], line: Line) -> FormExpr {
    let mut out = FormExpr::zero(s, t);
    for i in 0..s {
        let mut coef = SymPoly::constant(GaussRat::from_rat(w[i].clone()));
        for k in 0..t {
            if !w[s + k].is_zero() {
                coef = coef.add(
                    &psi_coeff(i, k, false).scale(&GaussRat::from_rat(w[s + k].clone())),
                );
            }
            if !w[s + t + k].is_zero() {
                coef = coef.add(
                    &psi_coeff(i, k, true).scale(&GaussRat::from_rat(w[s + t + k].clone())),
                );
            }
        }
        if coef.is_zero() {
            continue;
        }
        let g = match line {
            Line::AlphaBar => Gen::AlphaBar(i as u8),
            Line::Dx => Gen::Dx(i as u8),
        };
        out = out.add(&FormExpr::generator(s, t, g).scale_poly(&coef));
    }
    out
}

fn dbar_rule(s: usize, t: usize, g: Gen) -> FormExpr {
    match g {
        // -(1/2) abar_i ^ a_i = +(1/2) a_i ^ abar_i
        Gen::Alpha(i) => FormExpr::monomial(s, t, vec![Gen::Alpha(i), Gen::AlphaBar(i)])
            .scale_gauss(&GaussRat::from_i64(1, 2)),
        Gen::AlphaBar(_) => FormExpr::zero(s, t),
        Gen::Beta(k) => {
            let mut out = FormExpr::zero(s, t);
            for i in 0..s {
                let coef = psi_coeff(i, k as usize, false)
                    .scale(&GaussRat::from_i64(-1, 2));
                out = out.add(
                    &FormExpr::monomial(s, t, vec![Gen::AlphaBar(i as u8), Gen::Beta(k)])
                        .scale_poly(&coef),
                );
            }
            out
        }
        Gen::BetaBar(k) => {
            let mut out = FormExpr::zero(s, t);
            for i in 0..s {
                let coef = psi_coeff(i, k as usize, true)
                    .scale(&GaussRat::from_i64(-1, 2));
                out = out.add(
                    &FormExpr::monomial(s, t, vec![Gen::AlphaBar(i as u8), Gen::BetaBar(k)])
                        .scale_poly(&coef),
                );
            }
            out
        }
        _ => panic!("dbar rule requested for de Rham generator {g}"),
    }
}

fn d_rule(s: usize, t: usize, g: Gen) -> FormExpr {
    match g {
        Gen::Dx(_) => FormExpr::zero(s, t),
        Gen::Ey(i) => {
            FormExpr::monomial(s, t, vec![Gen::Dx(i), Gen::Ey(i)]).neg()
        }
        Gen::Zc(k) => {
            let mut out = FormExpr::zero(s, t);
            for i in 0..s {
                let coef = psi_coeff(i, k as usize, false).neg();
                out = out.add(
                    &FormExpr::monomial(s, t, vec![Gen::Dx(i as u8), Gen::Zc(k)])
                        .scale_poly(&coef),
                );
            }
            out
        }
        Gen::ZcBar(k) => {
            let mut out = FormExpr::zero(s, t);
            for i in 0..s {
                let coef = psi_coeff(i, k as usize, true).neg();
                out = out.add(
                    &FormExpr::monomial(s, t, vec![Gen::Dx(i as u8), Gen::ZcBar(k)])
                        .scale_poly(&coef),
                );
            }
            out
        }
        _ => panic!("d rule requested for Dolbeault generator {g}"),
    }
}

// ---------------------------------------------------------------------------
// Weighted generator lists and harmonic monomials
// ---------------------------------------------------------------------------

/// `W_1`: `alpha_i tensor v_{e^{x_i}}` and `beta_k tensor v_{e^{psi_k}}`.
pub fn w1_generators(s: usize, t: usize) -> Vec<FormExpr> {
    let mut out = Vec::with_capacity(s + t);
    for i in 0..s {
        out.push(FormExpr::weighted_generator(
            s,
            t,
            Gen::Alpha(i as u8),
            weight_x(s, t, i),
        ));
    }
    for k in 0..t {
        out.push(FormExpr::weighted_generator(
            s,
            t,
            Gen::Beta(k as u8),
            weight_psi(s, t, k),
        ));
    }
    out
}

/// `W_2`: `alphabar_i` with trivial weight and `betabar_k tensor v_{e^{psibar_k}}`.
pub fn w2_generators(s: usize, t: usize) -> Vec<FormExpr> {
    let mut out = Vec::with_capacity(s + t);
    for i in 0..s {
        out.push(FormExpr::generator(s, t, Gen::AlphaBar(i as u8)));
    }
    for k in 0..t {
        out.push(FormExpr::weighted_generator(
            s,
            t,
            Gen::BetaBar(k as u8),
            weight_psibar(s, t, k),
        ));
    }
    out
}

/// The harmonic basis monomial `alpha_I ^ alphabar_J ^ beta_K ^ betabar_L`
/// with weight `Psi_{I K Lbar}` (1-based index sets).
pub fn harmonic_monomial(
    s: usize,
    t: usize,
    i_set: &[usize],
    j_set: &[usize],
    k_set: &[usize],
    l_set: &[usize],
) -> FormExpr {
    let mut acc = FormExpr::one(s, t);
    let w1 = w1_generators(s, t);
    let w2 = w2_generators(s, t);
    for &i in i_set {
        acc = acc.wedge(&w1[i - 1]);
    }
    for &j in j_set {
        acc = acc.wedge(&w2[j - 1]);
    }
    for &k in k_set {
        acc = acc.wedge(&w1[s + k - 1]);
    }
    for &l in l_set {
        acc = acc.wedge(&w2[s + l - 1]);
    }
    acc
}

/// The `2s + 2t` weighted de Rham generators spanning the invariant model.
pub fn derham_generators(s: usize, t: usize) -> Vec<FormExpr> {
    let mut out = Vec::with_capacity(2 * (s + t));
    for i in 0..s {
        out.push(FormExpr::generator(s, t, Gen::Dx(i as u8)));
    }
    for i in 0..s {
        out.push(FormExpr::weighted_generator(
            s,
            t,
            Gen::Ey(i as u8),
            weight_x(s, t, i),
        ));
    }
    for k in 0..t {
        out.push(FormExpr::weighted_generator(
            s,
            t,
            Gen::Zc(k as u8),
            weight_psi(s, t, k),
        ));
    }
    for k in 0..t {
        out.push(FormExpr::weighted_generator(
            s,
            t,
            Gen::ZcBar(k as u8),
            weight_psibar(s, t, k),
        ));
    }
    out
}

/// Wedge of the de Rham generators selected by `mask` (bit `m` picks the
/// `m`-th entry of [`derham_generators`]).
pub fn derham_monomial(s: usize, t: usize, mask: u32) -> FormExpr {
    let gens = derham_generators(s, t);
    let mut acc = FormExpr::one(s, t);
    for (m, g) in gens.iter().enumerate() {
        if mask & (1 << m) != 0 {
            acc = acc.wedge(g);
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Hodge-star closure
// ---------------------------------------------------------------------------

/// Outcome of the star-closure check over all index triples.
#[derive(Debug, Clone)]
pub struct StarReport {
    pub checked: usize,
    pub failures: Vec<String>,
    /// Max numeric residual of `char(T) * char(complement T) - 1`.
    pub max_char_residual: f64,
}

impl StarReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every triple `T`: the weight of `T` plus the weight of its complement
/// is the unimodular vector `x_{[s]} + psi_{[t]} + psibar_{[t]}` (exact
/// integer identity), and that vector's character is trivial on the lattice,
/// so the star image carries the inverse character. The `+-` sign of the star
/// formula is not fixed by the isomorphism and does not affect dimensions;
/// only the character statement is checked.
pub fn star_closure_check(m: &SolvModel) -> Result<StarReport> {
    let (s, t) = (m.s, m.t);
    let unimodular = unimodular_vector(s, t);
    let mut failures = Vec::new();
    let mut max_char_residual: f64 = 0.0;
    let mut checked = 0usize;

    // Generic side: the unimodular vector must lie in the relation span.
    if let Some(relations) = &m.relations {
        let lat = crate::characters::RelationLattice::new(relations);
        if !lat.contains(&unimodular) {
            failures.push("unimodular vector is not in the declared relation span".into());
        }
    }

    for triple in IndexTriple::all(s, t) {
        checked += 1;
        let comp = triple.complement(s, t);
        let sum: Vec<Rat> = triple
            .exponent_vector(s, t)
            .iter()
            .zip(&comp.exponent_vector(s, t))
            .map(|(a, b)| a + b)
            .collect();
        if sum != unimodular {
            failures.push(format!(
                "weight of ({triple}) plus complement is not the unimodular vector"
            ));
            continue;
        }
        if m.unit_values.is_some() {
            let ct = crate::characters::char_of_triple(m, &triple)?;
            let cc = crate::characters::char_of_triple(m, &comp)?;
            for (x, y) in ct
                .values
                .as_ref()
                .unwrap()
                .iter()
                .zip(cc.values.as_ref().unwrap())
            {
                let prod = x.mul(*y);
                let r = (prod.re - 1.0).hypot(prod.im);
                max_char_residual = max_char_residual.max(r);
                if r > m.tol {
                    failures.push(format!(
                        "({triple}): complement character is not inverse, residual {r:e}"
                    ));
                }
            }
        }
    }
    Ok(StarReport {
        checked,
        failures,
        max_char_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{find_embeddings, NumberField, Polynomial};
    use crate::model::{build_model, synthetic_model, SyntheticGenerators, UnitSystem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn wedge_is_square_free_and_anticommutative() {
        let (s, t) = (2, 1);
        let a1 = FormExpr::generator(s, t, Gen::Alpha(0));
        assert!(a1.wedge(&a1).is_zero());

        let abar1 = FormExpr::generator(s, t, Gen::AlphaBar(0));
        let ab = a1.wedge(&abar1);
        let ba = abar1.wedge(&a1);
        assert_eq!(ab, ba.neg());
        assert!(ab.add(&ba).is_zero());
    }

    #[test]
    fn wedge_weights_add() {
        let (s, t) = (1, 1);
        let b = FormExpr::weighted_generator(s, t, Gen::Beta(0), weight_psi(s, t, 0));
        let bbar = FormExpr::weighted_generator(s, t, Gen::BetaBar(0), weight_psibar(s, t, 0));
        let w = b.wedge(&bbar);
        let mut expected = weight_zero(s, t);
        expected[1] = rat(1, 1);
        expected[2] = rat(1, 1);
        assert_eq!(w.weights(), vec![expected]);
    }

    #[test]
    fn dbar_closes_w1_and_w2_generators() {
        for (s, t) in [(1, 1), (2, 2)] {
            for g in w1_generators(s, t).iter().chain(&w2_generators(s, t)) {
                assert!(g.dbar().is_zero(), "dbar({g}) != 0");
            }
        }
    }

    #[test]
    fn dbar_of_unweighted_alpha_follows_structure_equation() {
        let (s, t) = (1, 1);
        let a = FormExpr::generator(s, t, Gen::Alpha(0));
        // -(1/2) abar ^ a = +(1/2) a ^ abar
        let expected = FormExpr::monomial(s, t, vec![Gen::Alpha(0), Gen::AlphaBar(0)])
            .scale_gauss(&GaussRat::from_i64(1, 2));
        assert_eq!(a.dbar(), expected);
        assert!(FormExpr::generator(s, t, Gen::AlphaBar(0)).dbar().is_zero());
    }

    #[test]
    fn dbar_squared_vanishes_on_generators() {
        let (s, t) = (2, 2);
        for g in [
            Gen::Alpha(0),
            Gen::Alpha(1),
            Gen::AlphaBar(0),
            Gen::Beta(0),
            Gen::Beta(1),
            Gen::BetaBar(0),
            Gen::BetaBar(1),
        ] {
            let e = FormExpr::generator(s, t, g);
            assert!(e.dbar().dbar().is_zero(), "dbar^2({g}) != 0");
        }
    }

    #[test]
    fn dbar_squared_vanishes_on_random_forms() {
        let (s, t) = (2, 2);
        let gens = [
            Gen::Alpha(0),
            Gen::Alpha(1),
            Gen::AlphaBar(0),
            Gen::AlphaBar(1),
            Gen::Beta(0),
            Gen::Beta(1),
            Gen::BetaBar(0),
            Gen::BetaBar(1),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0x0ead5eed);
        for trial in 0..200 {
            let mut expr = FormExpr::zero(s, t);
            let n_terms = rng.gen_range(1..=3);
            for _ in 0..n_terms {
                // random square-free monomial of degree <= 3
                let deg = rng.gen_range(0..=3);
                let mut chosen: Vec<Gen> = Vec::new();
                while chosen.len() < deg {
                    let g = gens[rng.gen_range(0..gens.len())];
                    if !chosen.contains(&g) {
                        chosen.push(g);
                    }
                }
                chosen.sort();
                let mut weight = weight_zero(s, t);
                for w in weight.iter_mut() {
                    *w = rat(rng.gen_range(-2..=2), [1, 2][rng.gen_range(0..2)]);
                }
                let coef = GaussRat {
                    re: rat(rng.gen_range(-3..=3), 1),
                    im: rat(rng.gen_range(-3..=3), 1),
                };
                let mono = if chosen.is_empty() {
                    FormExpr::section(s, t, weight)
                } else {
                    FormExpr::monomial(s, t, chosen).shift_weight(&weight)
                };
                expr = expr.add(&mono.scale_gauss(&coef));
            }
            let dd = expr.dbar().dbar();
            assert!(dd.is_zero(), "trial {trial}: dbar^2 = {dd}");
        }
    }

    #[test]
    fn dbar_vanishes_on_all_harmonic_monomials() {
        for (s, t) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            for i_mask in 0..(1u32 << s) {
                for j_mask in 0..(1u32 << s) {
                    for k_mask in 0..(1u32 << t) {
                        for l_mask in 0..(1u32 << t) {
                            let pick = |mask: u32, bound: usize| -> Vec<usize> {
                                (0..bound).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect()
                            };
                            let mono = harmonic_monomial(
                                s,
                                t,
                                &pick(i_mask, s),
                                &pick(j_mask, s),
                                &pick(k_mask, t),
                                &pick(l_mask, t),
                            );
                            assert!(
                                mono.dbar().is_zero(),
                                "({s},{t}) masks ({i_mask},{j_mask},{k_mask},{l_mask})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dbar_preserves_weights() {
        let (s, t) = (2, 1);
        let w = weight_psi(s, t, 0);
        let e = FormExpr::weighted_generator(s, t, Gen::Alpha(0), w.clone());
        let de = e.dbar();
        assert!(!de.is_zero());
        assert_eq!(de.weights(), vec![w]);
    }

    #[test]
    fn d_invariant_vanishes_on_generators_and_monomials() {
        for (s, t) in [(1, 1), (2, 2)] {
            for g in derham_generators(s, t) {
                assert!(g.d_invariant().is_zero(), "d({g}) != 0");
            }
            let dim = 2 * (s + t);
            for mask in 0..(1u32 << dim) {
                let mono = derham_monomial(s, t, mask);
                assert!(mono.d_invariant().is_zero(), "mask {mask}");
            }
        }
    }

    #[test]
    fn d_invariant_nonzero_off_model() {
        // e^{-x_1} dy_1 with the wrong weight is not closed
        let (s, t) = (1, 1);
        let e = FormExpr::generator(s, t, Gen::Ey(0));
        assert!(!e.d_invariant().is_zero());
        // dx_1 ^ dx_2 is closed in the abelian directions
        let (s, t) = (2, 1);
        let e = FormExpr::monomial(s, t, vec![Gen::Dx(0), Gen::Dx(1)]);
        assert!(e.d_invariant().is_zero());
    }

    #[test]
    fn substitution_keeps_identities() {
        let (s, t) = (2, 2);
        let b = vec![vec![rat(-1, 1), rat(0, 1)], vec![rat(0, 1), rat(-1, 1)]];
        let c = vec![vec![rat(1, 3), rat(2, 7)], vec![rat(-5, 2), rat(4, 9)]];
        for g in w1_generators(s, t) {
            let sym = g.dbar();
            assert!(sym.subst_bc(&b, &c).is_zero());
        }
        // and a non-identity stays nonzero after substitution
        let beta = FormExpr::generator(s, t, Gen::Beta(0));
        assert!(!beta.dbar().subst_bc(&b, &c).is_zero());
    }

    fn cubic_model() -> crate::model::SolvModel {
        let f = Polynomial::from_i64(&[-1, -1, 0, 1]).unwrap();
        let emb = find_embeddings(&f, 256).unwrap();
        let k = NumberField::new(f);
        let units = UnitSystem::new(&k, vec![k.theta()], &emb).unwrap();
        build_model(&k, &units, &emb).unwrap()
    }

    #[test]
    fn star_closure_on_cubic_model() {
        let m = cubic_model();
        let report = star_closure_check(&m).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(report.checked, 8);
        assert!(report.max_char_residual < m.tol);

        // complement of ({1}, {}, {}) carries 1/sigma_1(theta)
        let tr = IndexTriple::new(&[1], &[], &[], 1, 1).unwrap();
        let comp = tr.complement(1, 1);
        let c = crate::characters::char_of_triple(&m, &comp).unwrap();
        let v = c.values.as_ref().unwrap()[0];
        assert!((v.re - 0.7548776662466928).abs() < 1e-9);
        assert!(v.im.abs() < 1e-9);
    }

    #[test]
    fn star_closure_on_generic_models() {
        let b = vec![vec![rat(-1, 1), rat(0, 1)], vec![rat(0, 1), rat(-1, 1)]];
        let m = synthetic_model(2, 2, b, vec![], SyntheticGenerators::Generic).unwrap();
        let report = star_closure_check(&m).unwrap();
        assert!(report.passed());
        assert_eq!(report.checked, 64);
    }
}
