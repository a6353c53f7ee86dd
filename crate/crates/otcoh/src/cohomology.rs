//! Exact per-bundle Dolbeault and de Rham dimensions, sum identities, the
//! non-vanishing criterion, Serre-type duality, and tangent-bundle cohomology.
//!
//! For a bundle class with member triples `(I, K, L)`, the harmonic basis in
//! bidegree `(p, q)` consists of the monomials `alpha_I ^ alphabar_J ^ beta_K ^
//! betabar_L` with `|I| + |K| = p` and `|J| + |L| = q`; the `J`-index ranges
//! freely over `[s]` and carries the trivial character, so each member
//! contributes `C(s, q - |L|)`:
//!
//! ```text
//! dim H^{p,q}(E) = sum over members with |I|+|K| = p of C(s, q - |L|)
//! ```
//!
//! The de Rham count is the same bookkeeping over the `2s + 2t` weighted
//! one-form generators: a member of size `m` contributes `C(s, r - m)` in
//! degree `r` (the free factor is the span of the `s` closed `dx_i`).
//!
//! [`brute_force_tables`] recomputes every table by direct enumeration of all
//! `(I, J, K, L)` monomials, bypassing the binomial formula; it is the oracle
//! the formula is checked against.

use crate::binomial;
use crate::characters::{
    equal_on_lattice, Character, CharEq, ClassId, Classification, IndexTriple,
};
use crate::model::SolvModel;
use crate::{Error, Result};

/// Dolbeault dimension table of one bundle class over all bidegrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeTable {
    pub class: ClassId,
    /// `dims[p][q]`, each index running `0..=s+t`.
    pub dims: Vec<Vec<u64>>,
}

/// De Rham dimensions of one bundle class, indexed by total degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeRhamVector {
    pub class: ClassId,
    /// `dims[r]` for `r = 0..=2(s+t)`.
    pub dims: Vec<u64>,
}

/// `dim H^{p,q}` of the class at position `class_idx`.
pub fn dolbeault_dim_class(cl: &Classification, class_idx: usize, p: usize, q: usize) -> u64 {
    cl.classes[class_idx]
        .members
        .iter()
        .filter(|m| m.p_degree() == p)
        .map(|m| binomial(cl.s, q as isize - m.l_weight() as isize))
        .sum()
}

/// `dim H^{p,q}(E_rho)`; a character matching no class has dimension 0.
pub fn dolbeault_dim(
    m: &SolvModel,
    cl: &Classification,
    rho: &Character,
    p: usize,
    q: usize,
) -> Result<u64> {
    Ok(match cl.resolve(m, rho)? {
        Some(idx) => dolbeault_dim_class(cl, idx, p, q),
        None => 0,
    })
}

pub fn hodge_table(cl: &Classification, class_idx: usize) -> HodgeTable {
    let n = cl.s + cl.t + 1;
    let dims = (0..n)
        .map(|p| (0..n).map(|q| dolbeault_dim_class(cl, class_idx, p, q)).collect())
        .collect();
    HodgeTable {
        class: cl.classes[class_idx].id.clone(),
        dims,
    }
}

pub fn all_tables(cl: &Classification) -> Vec<HodgeTable> {
    (0..cl.class_count()).map(|i| hodge_table(cl, i)).collect()
}

/// `dim H^r` of the class at position `class_idx`.
pub fn derham_dim_class(cl: &Classification, class_idx: usize, r: usize) -> u64 {
    cl.classes[class_idx]
        .members
        .iter()
        .map(|m| binomial(cl.s, r as isize - m.size() as isize))
        .sum()
}

/// `dim H^r(E_rho)` with values in the flat bundle of `rho`.
pub fn derham_dim(
    m: &SolvModel,
    cl: &Classification,
    rho: &Character,
    r: usize,
) -> Result<u64> {
    Ok(match cl.resolve(m, rho)? {
        Some(idx) => derham_dim_class(cl, idx, r),
        None => 0,
    })
}

pub fn derham_vector(cl: &Classification, class_idx: usize) -> DeRhamVector {
    let top = 2 * (cl.s + cl.t);
    DeRhamVector {
        class: cl.classes[class_idx].id.clone(),
        dims: (0..=top)
            .map(|r| derham_dim_class(cl, class_idx, r))
            .collect(),
    }
}

pub fn all_derham_vectors(cl: &Classification) -> Vec<DeRhamVector> {
    (0..cl.class_count()).map(|i| derham_vector(cl, i)).collect()
}

// ---------------------------------------------------------------------------
// Non-vanishing criterion
// ---------------------------------------------------------------------------

/// Witnesses for `H^{p,q}(E) != 0` and the combination lower bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonVanishing {
    pub nonzero: bool,
    pub witnesses: Vec<IndexTriple>,
    pub lower_bound: u64,
}

/// Witness search in a fixed class: members with `|I| + |K| = p`, `|L| <= q`
/// and `q - |L| <= s` (the last constraint makes a complementary `J` exist;
/// without it a witness would claim a dimension the count shows to be zero).
pub fn nonvanishing_class(cl: &Classification, class_idx: usize, p: usize, q: usize) -> NonVanishing {
    let witnesses: Vec<IndexTriple> = cl.classes[class_idx]
        .members
        .iter()
        .filter(|m| {
            m.p_degree() == p && m.l_weight() <= q && q - m.l_weight() <= cl.s
        })
        .copied()
        .collect();
    let lower_bound = witnesses
        .iter()
        .map(|w| binomial(cl.s, q as isize - w.l_weight() as isize))
        .max()
        .unwrap_or(0);
    NonVanishing {
        nonzero: !witnesses.is_empty(),
        witnesses,
        lower_bound,
    }
}

pub fn nonvanishing(
    m: &SolvModel,
    cl: &Classification,
    rho: &Character,
    p: usize,
    q: usize,
) -> Result<NonVanishing> {
    Ok(match cl.resolve(m, rho)? {
        Some(idx) => nonvanishing_class(cl, idx, p, q),
        None => NonVanishing {
            nonzero: false,
            witnesses: Vec::new(),
            lower_bound: 0,
        },
    })
}

// ---------------------------------------------------------------------------
// Serre-type duality
// ---------------------------------------------------------------------------

/// Outcome of the duality check `dim H^{p,q}(E) = dim H^{s+t-p,s+t-q}(E^{-1})`.
#[derive(Debug, Clone)]
pub struct SerreReport {
    /// `(class, inverse class)` pairs as matched via complement triples.
    pub pairs: Vec<(ClassId, ClassId)>,
    pub violations: Vec<String>,
    /// Max numeric residual of `rho(u_j) * rho^{-1}(u_j) - 1`, when values exist.
    pub max_char_residual: f64,
}

impl SerreReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Pairs every class with its inverse (the class of the complement of any
/// member; unimodularity makes the complement carry the inverse character) and
/// compares the two tables at mirrored bidegrees.
pub fn serre_check(m: &SolvModel, cl: &Classification) -> Result<SerreReport> {
    let (s, t) = (cl.s, cl.t);
    let mut pairs = Vec::new();
    let mut violations = Vec::new();
    let mut max_char_residual: f64 = 0.0;
    for (idx, class) in cl.classes.iter().enumerate() {
        let comp = class.representative().complement(s, t);
        let inv_idx = cl
            .class_of_triple(&comp)
            .ok_or_else(|| Error::MissingInverseClass(class.id.to_string()))?;
        let inv = &cl.classes[inv_idx];
        pairs.push((class.id.clone(), inv.id.clone()));

        if let (Some(va), Some(vb)) = (&class.character.values, &inv.character.values) {
            for (x, y) in va.iter().zip(vb) {
                let prod = x.mul(*y);
                let r = (prod.re - 1.0).hypot(prod.im);
                max_char_residual = max_char_residual.max(r);
                if r > 10.0 * m.tol {
                    violations.push(format!(
                        "class {} complement does not carry the inverse character (residual {r:e})",
                        class.id
                    ));
                }
            }
        }

        for p in 0..=s + t {
            for q in 0..=s + t {
                let lhs = dolbeault_dim_class(cl, idx, p, q);
                let rhs = dolbeault_dim_class(cl, inv_idx, s + t - p, s + t - q);
                if lhs != rhs {
                    violations.push(format!(
                        "class {} at ({p},{q}): {lhs} != {rhs} for inverse class {} at ({},{})",
                        class.id,
                        inv.id,
                        s + t - p,
                        s + t - q
                    ));
                }
            }
        }
    }
    Ok(SerreReport {
        pairs,
        violations,
        max_char_residual,
    })
}

// ---------------------------------------------------------------------------
// Tangent bundle
// ---------------------------------------------------------------------------

/// `dim H^{0,q}(X, wedge^p Theta)`.
///
/// The holomorphic tangent bundle splits as the sum of the line bundles with
/// characters `e^{x_i}` and `e^{psi_k}`, so `wedge^p Theta` is the sum over
/// `|I| + |K| = p` of the bundles with character of `(I, K, empty)` (positive
/// exponents: these are the tangent weights, not their cotangent inverses).
pub fn tangent_cohomology(cl: &Classification, p: usize, q: usize) -> Result<u64> {
    let (s, t) = (cl.s, cl.t);
    if p > s + t {
        return Err(Error::IndexOutOfRange(format!(
            "exterior power {p} exceeds s+t = {}",
            s + t
        )));
    }
    let mut total = 0u64;
    for i_mask in 0..(1u32 << s) {
        for k_mask in 0..(1u32 << t) {
            let triple = IndexTriple::from_masks(i_mask, k_mask, 0);
            if triple.p_degree() != p {
                continue;
            }
            let idx = cl
                .class_of_triple(&triple)
                .expect("triples are fully classified");
            total += dolbeault_dim_class(cl, idx, 0, q);
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Sum identities
// ---------------------------------------------------------------------------

/// Checks `sum_classes dim H^{p,q} = C(s+t, p) C(s+t, q)` for all bidegrees.
pub fn binomial_identity_violations(cl: &Classification) -> Vec<String> {
    let (s, t) = (cl.s, cl.t);
    let tables = all_tables(cl);
    let mut out = Vec::new();
    for p in 0..=s + t {
        for q in 0..=s + t {
            let total: u64 = tables.iter().map(|tb| tb.dims[p][q]).sum();
            let expected = binomial(s + t, p as isize) * binomial(s + t, q as isize);
            if total != expected {
                out.push(format!("({p},{q}): {total} != {expected}"));
            }
        }
    }
    out
}

/// Checks `sum_classes dim H^r = C(2s+2t, r)` for all degrees.
pub fn derham_identity_violations(cl: &Classification) -> Vec<String> {
    let (s, t) = (cl.s, cl.t);
    let vectors = all_derham_vectors(cl);
    let mut out = Vec::new();
    for r in 0..=2 * (s + t) {
        let total: u64 = vectors.iter().map(|v| v.dims[r]).sum();
        let expected = binomial(2 * (s + t), r as isize);
        if total != expected {
            out.push(format!("r={r}: {total} != {expected}"));
        }
    }
    out
}

/// Euler characteristic summed over all classes; zero on every valid model.
pub fn total_euler_characteristic(cl: &Classification) -> i64 {
    let mut acc = 0i64;
    for table in all_tables(cl) {
        for (p, row) in table.dims.iter().enumerate() {
            for (q, &d) in row.iter().enumerate() {
                let sign = if (p + q) % 2 == 0 { 1 } else { -1 };
                acc += sign * d as i64;
            }
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Per-class Hodge tables by direct enumeration of every basis monomial
/// `alpha_I ^ alphabar_J ^ beta_K ^ betabar_L`: the monomial lands in the
/// class of the character of `(I, K, L)` at bidegree `(|I|+|K|, |J|+|L|)` and
/// counts 1. No binomial shortcut anywhere.
pub fn brute_force_tables(cl: &Classification) -> Vec<HodgeTable> {
    let (s, t) = (cl.s, cl.t);
    let n = s + t + 1;
    let mut dims: Vec<Vec<Vec<u64>>> = vec![vec![vec![0; n]; n]; cl.class_count()];
    for i_mask in 0..(1u32 << s) {
        for j_mask in 0..(1u32 << s) {
            for k_mask in 0..(1u32 << t) {
                for l_mask in 0..(1u32 << t) {
                    let triple = IndexTriple::from_masks(i_mask, k_mask, l_mask);
                    let class = cl
                        .class_of_triple(&triple)
                        .expect("triples are fully classified");
                    let p = (i_mask.count_ones() + k_mask.count_ones()) as usize;
                    let q = (j_mask.count_ones() + l_mask.count_ones()) as usize;
                    dims[class][p][q] += 1;
                }
            }
        }
    }
    dims.into_iter()
        .enumerate()
        .map(|(idx, d)| HodgeTable {
            class: cl.classes[idx].id.clone(),
            dims: d,
        })
        .collect()
}

/// Holomorphic-section criterion: `H^{0,0}(E_rho) != 0` iff `rho` is trivial
/// on the lattice. Returns the violating classes (must be empty).
pub fn section_criterion_violations(m: &SolvModel, cl: &Classification) -> Result<Vec<String>> {
    let trivial = Character::trivial(m);
    let mut out = Vec::new();
    for (idx, class) in cl.classes.iter().enumerate() {
        let dim = dolbeault_dim_class(cl, idx, 0, 0);
        let is_trivial =
            equal_on_lattice(m, &class.character, &trivial, cl.backend)? == CharEq::Yes;
        if (dim != 0) != is_trivial {
            out.push(format!(
                "class {}: dim H^(0,0) = {dim} but trivial = {is_trivial}",
                class.id
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{classify_all, char_from_user, Backend};
    use crate::field::{find_embeddings, NumberField, Polynomial};
    use crate::model::{build_model, synthetic_model, SyntheticGenerators, UnitSystem};
    use crate::Rat;

    fn cubic() -> (SolvModel, Classification) {
        let f = Polynomial::from_i64(&[-1, -1, 0, 1]).unwrap();
        let emb = find_embeddings(&f, 256).unwrap();
        let k = NumberField::new(f);
        let units = UnitSystem::new(&k, vec![k.theta()], &emb).unwrap();
        let m = build_model(&k, &units, &emb).unwrap();
        let cl = classify_all(&m, Backend::Numeric).unwrap();
        (m, cl)
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    /// Generic synthetic model for any (s, t) <= 2: B rows are distinct
    /// unimodular combinations that force no merges beyond the balanced kernel.
    fn generic_model(s: usize, t: usize) -> (SolvModel, Classification) {
        let primes = [3i64, 5, 7, 11];
        let b: Vec<Vec<Rat>> = (0..s)
            .map(|i| {
                let p = primes[i];
                // entries -w_k/p summing to -1
                let mut row: Vec<Rat> = (1..t as i64).map(|k| rat(-k, p)).collect();
                let partial: Rat = row.iter().sum();
                row.push(-Rat::from_integer(1.into()) - partial);
                row
            })
            .collect();
        let m = synthetic_model(s, t, b, vec![], SyntheticGenerators::Generic).unwrap();
        let cl = classify_all(&m, Backend::Generic).unwrap();
        (m, cl)
    }

    fn otiman() -> (SolvModel, Classification) {
        let r = |x: i64| Rat::from_integer(x.into());
        let b = vec![vec![r(-1), r(0)], vec![r(0), r(-1)]];
        let m = synthetic_model(2, 2, b, vec![], SyntheticGenerators::Generic).unwrap();
        let cl = classify_all(&m, Backend::Generic).unwrap();
        (m, cl)
    }

    #[test]
    fn cubic_trivial_class_table() {
        let (_, cl) = cubic();
        let table = hodge_table(&cl, cl.trivial_index());
        assert_eq!(
            table.dims,
            vec![vec![1, 1, 0], vec![0, 0, 0], vec![0, 1, 1]]
        );
    }

    #[test]
    fn dolbeault_spec_values() {
        let (m, cl) = cubic();
        let trivial = Character::trivial(&m);
        assert_eq!(dolbeault_dim(&m, &cl, &trivial, 0, 1).unwrap(), 1);
        assert_eq!(dolbeault_dim(&m, &cl, &trivial, 2, 1).unwrap(), 1);
        assert_eq!(dolbeault_dim(&m, &cl, &trivial, 1, 1).unwrap(), 0);

        let (m2, cl2) = otiman();
        let trivial2 = crate::characters::char_of_triple(&m2, &IndexTriple::empty()).unwrap();
        assert_eq!(dolbeault_dim(&m2, &cl2, &trivial2, 2, 2).unwrap(), 4);
    }

    #[test]
    fn binomial_identity_on_small_models() {
        let (_, cl) = cubic();
        assert!(binomial_identity_violations(&cl).is_empty());
        for (s, t) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let (_, cl) = generic_model(s, t);
            assert!(
                binomial_identity_violations(&cl).is_empty(),
                "violated for ({s},{t})"
            );
        }
        let (_, cl) = otiman();
        assert!(binomial_identity_violations(&cl).is_empty());
        // spot value: s=t=1 at (1,1) totals C(2,1)^2 = 4
        let (_, cl) = cubic();
        let total: u64 = all_tables(&cl).iter().map(|tb| tb.dims[1][1]).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn derham_identity_and_first_betti() {
        let (m, cl) = cubic();
        assert!(derham_identity_violations(&cl).is_empty());
        let trivial = Character::trivial(&m);
        assert_eq!(derham_dim(&m, &cl, &trivial, 0).unwrap(), 1);
        // b_1 = 1: only dx_1 survives
        assert_eq!(derham_dim(&m, &cl, &trivial, 1).unwrap(), 1);
        // top degree monomial has vanishing total weight by unimodularity
        assert_eq!(derham_dim(&m, &cl, &trivial, 4).unwrap(), 1);

        let (_, cl2) = otiman();
        assert!(derham_identity_violations(&cl2).is_empty());
    }

    #[test]
    fn euler_characteristic_is_zero() {
        for cl in [cubic().1, otiman().1, generic_model(2, 1).1] {
            assert_eq!(total_euler_characteristic(&cl), 0);
        }
    }

    #[test]
    fn nonvanishing_spec_examples() {
        let (m, cl) = cubic();
        let trivial = Character::trivial(&m);
        let nv = nonvanishing(&m, &cl, &trivial, 0, 0).unwrap();
        assert!(nv.nonzero);
        assert_eq!(nv.witnesses, vec![IndexTriple::empty()]);
        assert_eq!(nv.lower_bound, 1);

        // sigma_2 character at (1, 0): witness (empty, {1}, empty)
        let rho = char_from_user(&m, "sigma(2)").unwrap();
        let nv = nonvanishing(&m, &cl, &rho, 1, 0).unwrap();
        assert!(nv.nonzero);
        assert_eq!(nv.lower_bound, 1);
        assert_eq!(
            nv.witnesses,
            vec![IndexTriple::new(&[], &[1], &[], 1, 1).unwrap()]
        );

        // holomorphic sections only for the trivial character
        let sigma1 = char_from_user(&m, "sigma(1)").unwrap();
        assert!(!nonvanishing(&m, &cl, &sigma1, 0, 0).unwrap().nonzero);
        assert_eq!(dolbeault_dim(&m, &cl, &sigma1, 0, 0).unwrap(), 0);
    }

    #[test]
    fn nonvanishing_consistent_with_dimension() {
        for (_, cl) in [cubic(), otiman(), generic_model(1, 2)] {
            for idx in 0..cl.class_count() {
                for p in 0..=cl.s + cl.t {
                    for q in 0..=cl.s + cl.t {
                        let nv = nonvanishing_class(&cl, idx, p, q);
                        let dim = dolbeault_dim_class(&cl, idx, p, q);
                        assert_eq!(nv.nonzero, dim > 0);
                        assert!(nv.lower_bound <= dim);
                    }
                }
            }
        }
    }

    #[test]
    fn section_criterion_holds() {
        let (m, cl) = cubic();
        assert!(section_criterion_violations(&m, &cl).unwrap().is_empty());
        let (m2, cl2) = otiman();
        assert!(section_criterion_violations(&m2, &cl2).unwrap().is_empty());
    }

    #[test]
    fn serre_duality_holds() {
        let (m, cl) = cubic();
        let report = serre_check(&m, &cl).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.max_char_residual < 1e-9);

        let (m2, cl2) = otiman();
        assert!(serre_check(&m2, &cl2).unwrap().passed());
    }

    #[test]
    fn serre_spec_examples() {
        let (_, cl) = cubic();
        let trivial_table = hodge_table(&cl, cl.trivial_index());
        assert_eq!(trivial_table.dims[0][0], 1);
        assert_eq!(trivial_table.dims[2][2], 1);

        // class of ({1}, empty, empty) pairs with the class of its complement
        let rep = IndexTriple::new(&[1], &[], &[], 1, 1).unwrap();
        let idx = cl.class_of_triple(&rep).unwrap();
        let inv_idx = cl.class_of_triple(&rep.complement(1, 1)).unwrap();
        for q in 0..=2 {
            assert_eq!(
                dolbeault_dim_class(&cl, idx, 1, q),
                dolbeault_dim_class(&cl, inv_idx, 1, 2 - q)
            );
        }
    }

    #[test]
    fn hodge_total_table_centrally_symmetric() {
        let (_, cl) = otiman();
        let tables = all_tables(&cl);
        let n = cl.s + cl.t;
        for p in 0..=n {
            for q in 0..=n {
                let a: u64 = tables.iter().map(|tb| tb.dims[p][q]).sum();
                let b: u64 = tables.iter().map(|tb| tb.dims[n - p][n - q]).sum();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn tangent_cohomology_t1_vanishes() {
        let (_, cl) = cubic();
        for p in 1..=2 {
            for q in 0..=2 {
                assert_eq!(tangent_cohomology(&cl, p, q).unwrap(), 0);
            }
        }
        // p = 0 is the trivial bundle: C(s, q)
        for q in 0..=2usize {
            assert_eq!(
                tangent_cohomology(&cl, 0, q).unwrap(),
                binomial(1, q as isize)
            );
        }
        // same vanishing on a generic t=1 model with s=2
        let (_, cl2) = generic_model(2, 1);
        for p in 1..=3 {
            for q in 0..=3 {
                assert_eq!(tangent_cohomology(&cl2, p, q).unwrap(), 0);
            }
        }
    }

    #[test]
    fn brute_force_matches_formula_everywhere() {
        let mut setups = vec![cubic(), otiman()];
        for (s, t) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            setups.push(generic_model(s, t));
        }
        for (_, cl) in setups {
            let direct = brute_force_tables(&cl);
            let formula = all_tables(&cl);
            assert_eq!(direct, formula, "mismatch for (s,t)=({},{})", cl.s, cl.t);
        }
    }

    #[test]
    fn otiman_displayed_tables() {
        let (_, cl) = otiman();
        let trivial = hodge_table(&cl, cl.trivial_index());
        for q in 0..=4usize {
            let q = q as isize;
            assert_eq!(trivial.dims[0][q as usize], binomial(2, q));
            assert_eq!(trivial.dims[2][q as usize], 2 * binomial(2, q - 1));
            assert_eq!(trivial.dims[4][q as usize], binomial(2, q - 2));
            assert_eq!(trivial.dims[1][q as usize], 0);
            assert_eq!(trivial.dims[3][q as usize], 0);
        }
        // E_{e^{x_1}}: class of ({1}, empty, empty)
        let rep = IndexTriple::new(&[1], &[], &[], 2, 2).unwrap();
        let idx = cl.class_of_triple(&rep).unwrap();
        let table = hodge_table(&cl, idx);
        for q in 0..=4usize {
            let qi = q as isize;
            assert_eq!(table.dims[1][q], binomial(2, qi));
            assert_eq!(table.dims[3][q], binomial(2, qi - 1));
            assert_eq!(table.dims[0][q], 0);
            assert_eq!(table.dims[2][q], 0);
            assert_eq!(table.dims[4][q], 0);
        }
        // strict inequality instance at p = 2, q in {2, 3}
        for q in [2usize, 3] {
            let qi = q as isize;
            assert!(trivial.dims[2][q] > binomial(2, qi - 1));
        }
    }

    #[test]
    fn characters_without_matching_class_give_zero() {
        let (m, cl) = cubic();
        // sigma_1^2 matches no triple class on this model
        let rho = char_from_user(&m, "sigma(1)^2").unwrap();
        assert_eq!(cl.resolve(&m, &rho).unwrap(), None);
        assert_eq!(dolbeault_dim(&m, &cl, &rho, 1, 1).unwrap(), 0);
        assert_eq!(derham_dim(&m, &cl, &rho, 1).unwrap(), 0);
        assert!(!nonvanishing(&m, &cl, &rho, 1, 1).unwrap().nonzero);
    }
}
