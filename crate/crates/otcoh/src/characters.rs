//! Flat line bundles as characters of the lattice, and the grouping of all
//! index triples `(I, K, L)` into bundle classes.
//!
//! A triple stands for the functional
//! `Psi = sum_{i in I} x_i + sum_{k in K} psi_k + sum_{l in L} psibar_l`;
//! its character sends the `j`-th lattice generator to
//! `prod_{i in I} sigma_i(u_j) * prod_{k in K} sigma_{s+k}(u_j) *
//! prod_{l in L} conj(sigma_{s+l}(u_j))`. Two bundles agree iff their
//! characters agree on the lattice.
//!
//! Equality is decided by one of two backends. The numeric backend compares
//! value vectors with a three-valued verdict: differences inside the guard band
//! `[tol, 10 tol)` are reported as ambiguous, never silently merged. The
//! generic backend reduces exact exponent vectors by the model's declared
//! relation lattice and is immune to accidental numeric coincidences.
//!
//! Index naming caveat: the source statement of the non-vanishing theorem
//! indexes its product over `j in J` and `k in K` while quantifying over
//! `I, K, L`; the convention implemented here is the one its section-3/5
//! analysis uses throughout (`I` over real places, `K` over `psi`, `L` over
//! `psibar`), with `J` always carrying the trivial character.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::model::{CApprox, SolvModel};
use crate::{Error, Rat, Result};

// ---------------------------------------------------------------------------
// Index triples
// ---------------------------------------------------------------------------

/// Multi-index triple `(I, K, L)` with `I` in `[s]`, `K, L` in `[t]`,
/// stored as bitmasks over 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexTriple {
    i_mask: u32,
    k_mask: u32,
    l_mask: u32,
}

fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|b| mask & (1 << b) != 0)
        .map(|b| b + 1)
        .collect()
}

fn indices_to_mask(set: &[usize], bound: usize, what: &str) -> Result<u32> {
    let mut mask = 0u32;
    for &idx in set {
        if idx == 0 || idx > bound {
            return Err(Error::IndexOutOfRange(format!(
                "{what} index {idx} not in 1..={bound}"
            )));
        }
        mask |= 1 << (idx - 1);
    }
    Ok(mask)
}

impl IndexTriple {
    pub fn empty() -> Self {
        IndexTriple {
            i_mask: 0,
            k_mask: 0,
            l_mask: 0,
        }
    }

    /// From 1-based index sets, bounds-checked against `(s, t)`.
    pub fn new(
        i_set: &[usize],
        k_set: &[usize],
        l_set: &[usize],
        s: usize,
        t: usize,
    ) -> Result<Self> {
        Ok(IndexTriple {
            i_mask: indices_to_mask(i_set, s, "I")?,
            k_mask: indices_to_mask(k_set, t, "K")?,
            l_mask: indices_to_mask(l_set, t, "L")?,
        })
    }

    pub(crate) fn from_masks(i_mask: u32, k_mask: u32, l_mask: u32) -> Self {
        IndexTriple {
            i_mask,
            k_mask,
            l_mask,
        }
    }

    pub fn i_indices(&self) -> Vec<usize> {
        mask_to_indices(self.i_mask)
    }

    pub fn k_indices(&self) -> Vec<usize> {
        mask_to_indices(self.k_mask)
    }

    pub fn l_indices(&self) -> Vec<usize> {
        mask_to_indices(self.l_mask)
    }

    /// `|I| + |K|`, the holomorphic degree of the associated forms.
    pub fn p_degree(&self) -> usize {
        (self.i_mask.count_ones() + self.k_mask.count_ones()) as usize
    }

    /// `|L|`.
    pub fn l_weight(&self) -> usize {
        self.l_mask.count_ones() as usize
    }

    pub fn size(&self) -> usize {
        (self.i_mask.count_ones() + self.k_mask.count_ones() + self.l_mask.count_ones()) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.i_mask == 0 && self.k_mask == 0 && self.l_mask == 0
    }

    /// Complement `([s]-I, [t]-K, [t]-L)`.
    pub fn complement(&self, s: usize, t: usize) -> Self {
        let full_s = (1u32 << s) - 1;
        let full_t = (1u32 << t) - 1;
        IndexTriple {
            i_mask: full_s & !self.i_mask,
            k_mask: full_t & !self.k_mask,
            l_mask: full_t & !self.l_mask,
        }
    }

    /// 0/1 exponent vector over `{x_1..x_s, psi_1..psi_t, psibar_1..psibar_t}`.
    pub fn exponent_vector(&self, s: usize, t: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); s + 2 * t];
        for i in self.i_indices() {
            v[i - 1] = Rat::from_integer(1.into());
        }
        for k in self.k_indices() {
            v[s + k - 1] = Rat::from_integer(1.into());
        }
        for l in self.l_indices() {
            v[s + t + l - 1] = Rat::from_integer(1.into());
        }
        v
    }

    /// Union of disjoint triples; `None` when they overlap.
    pub fn union_disjoint(&self, o: &IndexTriple) -> Option<IndexTriple> {
        if self.i_mask & o.i_mask != 0 || self.k_mask & o.k_mask != 0 || self.l_mask & o.l_mask != 0
        {
            return None;
        }
        Some(IndexTriple {
            i_mask: self.i_mask | o.i_mask,
            k_mask: self.k_mask | o.k_mask,
            l_mask: self.l_mask | o.l_mask,
        })
    }

    /// Every triple for signature `(s, t)`, ascending in the canonical order.
    pub fn all(s: usize, t: usize) -> Vec<IndexTriple> {
        let mut out = Vec::with_capacity(1 << (s + 2 * t));
        for i in 0..(1u32 << s) {
            for k in 0..(1u32 << t) {
                for l in 0..(1u32 << t) {
                    out.push(IndexTriple::from_masks(i, k, l));
                }
            }
        }
        out.sort();
        out
    }
}

impl Ord for IndexTriple {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Lexicographic on the ascending index lists of I, then K, then L.
        self.i_indices()
            .cmp(&other.i_indices())
            .then_with(|| self.k_indices().cmp(&other.k_indices()))
            .then_with(|| self.l_indices().cmp(&other.l_indices()))
    }
}

impl PartialOrd for IndexTriple {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_set = |v: Vec<usize>| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "I={};K={};L={}",
            fmt_set(self.i_indices()),
            fmt_set(self.k_indices()),
            fmt_set(self.l_indices())
        )
    }
}

// ---------------------------------------------------------------------------
// Characters
// ---------------------------------------------------------------------------

/// A character of the lattice: values at the `s` generators and/or an exact
/// exponent vector over the functional basis.
#[derive(Debug, Clone)]
pub struct Character {
    /// `rho(u_j)` for `j = 1..=s`, with error radii.
    pub values: Option<Vec<CApprox>>,
    /// Exact exponents over `{x_1..x_s, psi_1..psi_t, psibar_1..psibar_t}`.
    pub exponent: Option<Vec<Rat>>,
}

impl Character {
    pub fn trivial(m: &SolvModel) -> Self {
        Character {
            values: m
                .unit_values
                .as_ref()
                .map(|uv| vec![CApprox::one(); uv.len()]),
            exponent: Some(vec![Rat::zero(); m.n()]),
        }
    }

    /// Pointwise inverse (values) and negated exponent.
    pub fn inverse(&self) -> Result<Character> {
        let values = match &self.values {
            Some(v) => Some(v.iter().map(|x| x.inv()).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        let exponent = self
            .exponent
            .as_ref()
            .map(|e| e.iter().map(|x| -x.clone()).collect());
        Ok(Character { values, exponent })
    }
}

/// Backend used to decide character equality on the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Numeric,
    Generic,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Numeric => write!(f, "numeric"),
            Backend::Generic => write!(f, "generic"),
        }
    }
}

/// Three-valued equality verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharEq {
    Yes,
    No,
    /// Difference inside the guard band; must be surfaced, never merged.
    Ambiguous,
}

/// Character of an index triple.
pub fn char_of_triple(m: &SolvModel, triple: &IndexTriple) -> Result<Character> {
    let (s, t) = (m.s, m.t);
    if triple.i_indices().iter().any(|&i| i > s)
        || triple.k_indices().iter().any(|&k| k > t)
        || triple.l_indices().iter().any(|&l| l > t)
    {
        return Err(Error::IndexOutOfRange(format!(
            "triple {triple} out of range for (s, t) = ({s}, {t})"
        )));
    }
    let values = m.unit_values.as_ref().map(|uv| {
        uv.iter()
            .map(|row| {
                let mut acc = CApprox::one();
                for i in triple.i_indices() {
                    acc = acc.mul(row[i - 1]);
                }
                for k in triple.k_indices() {
                    acc = acc.mul(row[s + k - 1]);
                }
                for l in triple.l_indices() {
                    acc = acc.mul(row[s + l - 1].conj());
                }
                acc
            })
            .collect()
    });
    Ok(Character {
        values,
        exponent: Some(triple.exponent_vector(s, t)),
    })
}

// ---------------------------------------------------------------------------
// Exact relation lattice (generic backend)
// ---------------------------------------------------------------------------

/// Row-reduced span of the declared relation vectors over Q.
#[derive(Debug, Clone)]
pub(crate) struct RelationLattice {
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl RelationLattice {
    pub(crate) fn new(relations: &[Vec<Rat>]) -> Self {
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for r in relations {
            let mut v = r.clone();
            for (row, &p) in rows.iter().zip(&pivots) {
                if !v[p].is_zero() {
                    let f = v[p].clone();
                    for (x, y) in v.iter_mut().zip(row) {
                        *x -= &f * y;
                    }
                }
            }
            if let Some(p) = v.iter().position(|x| !x.is_zero()) {
                let lead = v[p].clone();
                for x in v.iter_mut() {
                    *x /= lead.clone();
                }
                for row in rows.iter_mut() {
                    if !row[p].is_zero() {
                        let f = row[p].clone();
                        for (x, y) in row.iter_mut().zip(&v) {
                            *x -= &f * y;
                        }
                    }
                }
                rows.push(v);
                pivots.push(p);
            }
        }
        RelationLattice { rows, pivots }
    }

    /// Canonical residue of `v` modulo the span.
    pub(crate) fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !out[p].is_zero() {
                let f = out[p].clone();
                for (x, y) in out.iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        out
    }

    pub(crate) fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
}

// ---------------------------------------------------------------------------
// Equality on the lattice
// ---------------------------------------------------------------------------

/// Decides whether two characters agree on the lattice.
pub fn equal_on_lattice(
    m: &SolvModel,
    a: &Character,
    b: &Character,
    backend: Backend,
) -> Result<CharEq> {
    match backend {
        Backend::Numeric => {
            let (va, vb) = match (&a.values, &b.values) {
                (Some(va), Some(vb)) => (va, vb),
                _ => {
                    return Err(Error::BackendUnavailable(
                        "numeric comparison needs character values at the generators".into(),
                    ))
                }
            };
            let d = va
                .iter()
                .zip(vb)
                .map(|(x, y)| x.dist(*y))
                .fold(0.0f64, f64::max);
            if d < m.tol {
                Ok(CharEq::Yes)
            } else if d < 10.0 * m.tol {
                Ok(CharEq::Ambiguous)
            } else {
                Ok(CharEq::No)
            }
        }
        Backend::Generic => {
            let relations = m.relations.as_ref().ok_or_else(|| {
                Error::BackendUnavailable("model declares no exact relations".into())
            })?;
            let (ea, eb) = match (&a.exponent, &b.exponent) {
                (Some(ea), Some(eb)) => (ea, eb),
                _ => {
                    return Err(Error::BackendUnavailable(
                        "generic comparison needs exact exponent vectors".into(),
                    ))
                }
            };
            let lat = RelationLattice::new(relations);
            let diff: Vec<Rat> = ea.iter().zip(eb).map(|(x, y)| x - y).collect();
            Ok(if lat.contains(&diff) {
                CharEq::Yes
            } else {
                CharEq::No
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Bundle classes
// ---------------------------------------------------------------------------

/// Identifier of a bundle class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassId {
    Trivial,
    Rep(IndexTriple),
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassId::Trivial => write!(f, "trivial"),
            ClassId::Rep(t) => write!(f, "[{t}]"),
        }
    }
}

/// Equivalence class of index triples whose characters coincide on the lattice.
#[derive(Debug, Clone)]
pub struct BundleClass {
    pub id: ClassId,
    /// Members in ascending canonical order; the first is the representative.
    pub members: Vec<IndexTriple>,
    pub character: Character,
}

impl BundleClass {
    pub fn representative(&self) -> &IndexTriple {
        &self.members[0]
    }
}

/// The full partition of all `2^(s+2t)` triples into bundle classes.
#[derive(Debug, Clone)]
pub struct Classification {
    pub s: usize,
    pub t: usize,
    pub backend: Backend,
    /// Classes sorted by canonical representative; the trivial class is first.
    pub classes: Vec<BundleClass>,
    lookup: BTreeMap<IndexTriple, usize>,
}

impl Classification {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Index of the class containing `triple`.
    pub fn class_of_triple(&self, triple: &IndexTriple) -> Option<usize> {
        self.lookup.get(triple).copied()
    }

    pub fn trivial_index(&self) -> usize {
        self.class_of_triple(&IndexTriple::empty())
            .expect("trivial triple is always classified")
    }

    /// Resolves an arbitrary character to a class, or `None` when it matches
    /// no class. Ambiguity aborts with diagnostics.
    pub fn resolve(&self, m: &SolvModel, rho: &Character) -> Result<Option<usize>> {
        let mut ambiguous: Vec<(String, String, f64)> = Vec::new();
        for (idx, class) in self.classes.iter().enumerate() {
            match equal_on_lattice(m, rho, &class.character, self.backend)? {
                CharEq::Yes => return Ok(Some(idx)),
                CharEq::No => {}
                CharEq::Ambiguous => ambiguous.push((
                    "queried character".into(),
                    class.id.to_string(),
                    char_distance(rho, &class.character),
                )),
            }
        }
        if !ambiguous.is_empty() {
            return Err(Error::AmbiguousCharacters(AmbiguityReport::new(
                ambiguous, m.tol,
            )));
        }
        Ok(None)
    }
}

fn char_distance(a: &Character, b: &Character) -> f64 {
    match (&a.values, &b.values) {
        (Some(va), Some(vb)) => va
            .iter()
            .zip(vb)
            .map(|(x, y)| x.dist(*y))
            .fold(0.0f64, f64::max),
        _ => f64::NAN,
    }
}

/// Near-coincidence diagnostics attached to [`Error::AmbiguousCharacters`].
#[derive(Debug, Clone)]
pub struct AmbiguityReport {
    /// `(left, right, distance)` for every pair inside the guard band.
    pub pairs: Vec<(String, String, f64)>,
    pub tol: f64,
    pub suggested_tol: f64,
    pub suggested_precision: u32,
}

impl AmbiguityReport {
    fn new(pairs: Vec<(String, String, f64)>, tol: f64) -> Self {
        let min_dist = pairs
            .iter()
            .map(|p| p.2)
            .fold(f64::INFINITY, f64::min)
            .max(1e-300);
        let suggested_tol = min_dist / 20.0;
        // tol ~ 2^(-p/4)  =>  p = 4 log2(1/tol)
        let suggested_precision = (4.0 * (1.0 / suggested_tol).log2()).ceil().max(64.0) as u32;
        AmbiguityReport {
            pairs,
            tol,
            suggested_tol,
            suggested_precision,
        }
    }
}

impl fmt::Display for AmbiguityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} near-coincident character pair(s) at tolerance {:.3e}:",
            self.pairs.len(),
            self.tol
        )?;
        for (a, b, d) in &self.pairs {
            writeln!(f, "  {a} vs {b}: distance {d:.6e}")?;
        }
        write!(
            f,
            "rerun with --tol <= {:.3e} (about {} bits of precision) to separate them",
            self.suggested_tol, self.suggested_precision
        )
    }
}

/// Groups every index triple into bundle classes.
///
/// Numeric backend: union-find under `dist < tol`, then a full pairwise scan
/// that aborts on any distance inside `[tol, 10 tol)` across or within groups.
/// Generic backend: exact residues modulo the relation lattice.
pub fn classify_all(m: &SolvModel, backend: Backend) -> Result<Classification> {
    let triples = IndexTriple::all(m.s, m.t);
    let groups: Vec<Vec<usize>> = match backend {
        Backend::Generic => {
            let relations = m.relations.as_ref().ok_or_else(|| {
                Error::BackendUnavailable("model declares no exact relations".into())
            })?;
            let lat = RelationLattice::new(relations);
            let mut by_residue: BTreeMap<Vec<Rat>, Vec<usize>> = BTreeMap::new();
            for (idx, tr) in triples.iter().enumerate() {
                let res = lat.reduce(&tr.exponent_vector(m.s, m.t));
                by_residue.entry(res).or_default().push(idx);
            }
            by_residue.into_values().collect()
        }
        Backend::Numeric => {
            if m.unit_values.is_none() {
                return Err(Error::BackendUnavailable(
                    "model carries no numeric unit values".into(),
                ));
            }
            let chars: Vec<Character> = triples
                .iter()
                .map(|tr| char_of_triple(m, tr))
                .collect::<Result<_>>()?;
            let n = triples.len();
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(parent: &mut Vec<usize>, x: usize) -> usize {
                if parent[x] != x {
                    let r = find(parent, parent[x]);
                    parent[x] = r;
                }
                parent[x]
            }
            let mut dist = vec![vec![0.0f64; n]; n];
            for x in 0..n {
                for y in x + 1..n {
                    let d = char_distance(&chars[x], &chars[y]);
                    dist[x][y] = d;
                    dist[y][x] = d;
                    if d < m.tol {
                        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                        if rx != ry {
                            parent[rx] = ry;
                        }
                    }
                }
            }
            let mut ambiguous: Vec<(String, String, f64)> = Vec::new();
            for x in 0..n {
                for y in x + 1..n {
                    let same = find(&mut parent, x) == find(&mut parent, y);
                    let d = dist[x][y];
                    let suspicious = if same { d >= m.tol } else { d < 10.0 * m.tol };
                    if suspicious {
                        ambiguous.push((triples[x].to_string(), triples[y].to_string(), d));
                    }
                }
            }
            if !ambiguous.is_empty() {
                return Err(Error::AmbiguousCharacters(AmbiguityReport::new(
                    ambiguous, m.tol,
                )));
            }
            let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for x in 0..n {
                let r = find(&mut parent, x);
                by_root.entry(r).or_default().push(x);
            }
            by_root.into_values().collect()
        }
    };

    let mut classes: Vec<BundleClass> = Vec::with_capacity(groups.len());
    for group in groups {
        let mut members: Vec<IndexTriple> = group.iter().map(|&idx| triples[idx]).collect();
        members.sort();
        let rep = members[0];
        let id = if rep.is_empty() {
            ClassId::Trivial
        } else {
            ClassId::Rep(rep)
        };
        let character = char_of_triple(m, &rep)?;
        classes.push(BundleClass {
            id,
            members,
            character,
        });
    }
    classes.sort_by(|a, b| a.representative().cmp(b.representative()));

    let mut lookup = BTreeMap::new();
    for (idx, class) in classes.iter().enumerate() {
        for member in &class.members {
            lookup.insert(*member, idx);
        }
    }
    debug_assert_eq!(lookup.len(), 1 << (m.s + 2 * m.t));

    Ok(Classification {
        s: m.s,
        t: m.t,
        backend,
        classes,
        lookup,
    })
}

// ---------------------------------------------------------------------------
// User character specs
// ---------------------------------------------------------------------------

/// Parses a character spec: `1`, a product of `sigma(i)^k` factors, an
/// explicit `triple I=..;K=..;L=..`, or `values v1; v2; ...`.
pub fn char_from_user(m: &SolvModel, spec: &str) -> Result<Character> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::MalformedSpec("empty character spec".into()));
    }
    if spec == "1" {
        return Ok(Character::trivial(m));
    }
    if let Some(rest) = spec.strip_prefix("triple") {
        let triple = parse_triple_body(rest.trim(), m.s, m.t)?;
        return char_of_triple(m, &triple);
    }
    if let Some(rest) = spec.strip_prefix("values") {
        return parse_values(rest.trim(), m.s);
    }
    parse_sigma_word(m, spec)
}

fn parse_triple_body(body: &str, s: usize, t: usize) -> Result<IndexTriple> {
    let mut i_set = None;
    let mut k_set = None;
    let mut l_set = None;
    for part in body.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, rest) = part
            .split_once('=')
            .ok_or_else(|| Error::MalformedSpec(format!("expected NAME=..., got {part:?}")))?;
        let list = parse_index_list(rest)?;
        match key.trim() {
            "I" => i_set = Some(list),
            "K" => k_set = Some(list),
            "L" => l_set = Some(list),
            other => {
                return Err(Error::MalformedSpec(format!(
                    "unknown triple component {other:?}"
                )))
            }
        }
    }
    IndexTriple::new(
        &i_set.unwrap_or_default(),
        &k_set.unwrap_or_default(),
        &l_set.unwrap_or_default(),
        s,
        t,
    )
}

fn parse_index_list(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|x| {
            let idx: usize = x
                .trim()
                .parse()
                .map_err(|_| Error::MalformedSpec(format!("bad index {x:?}")))?;
            if idx == 0 {
                return Err(Error::MalformedSpec("indices are 1-based".into()));
            }
            Ok(idx)
        })
        .collect()
}

fn parse_values(body: &str, s: usize) -> Result<Character> {
    let parts: Vec<&str> = body
        .split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect();
    if parts.len() != s {
        return Err(Error::MalformedSpec(format!(
            "expected {s} generator value(s), got {}",
            parts.len()
        )));
    }
    let mut values = Vec::with_capacity(s);
    for p in parts {
        values.push(parse_complex(p)?);
    }
    Ok(Character {
        values: Some(values),
        exponent: None,
    })
}

/// `a`, `a+bi`, `a-bi`, `bi`, or `i`.
fn parse_complex(text: &str) -> Result<CApprox> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::MalformedSpec(format!("bad complex value {text:?}"));
    if let Some(imag) = text.strip_suffix('i') {
        let bytes = imag.as_bytes();
        // Split at the last +/- that is not an exponent sign and not leading.
        let mut split = None;
        for pos in (1..bytes.len()).rev() {
            let c = bytes[pos] as char;
            if (c == '+' || c == '-') && !matches!(bytes[pos - 1] as char, 'e' | 'E') {
                split = Some(pos);
                break;
            }
        }
        match split {
            Some(pos) => {
                let re: f64 = imag[..pos].parse().map_err(|_| bad())?;
                let im_str = &imag[pos..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| bad())?
                };
                Ok(CApprox::new(re, im, 0.0))
            }
            None => {
                let im: f64 = if imag.is_empty() {
                    1.0
                } else if imag == "-" {
                    -1.0
                } else {
                    imag.parse().map_err(|_| bad())?
                };
                Ok(CApprox::new(0.0, im, 0.0))
            }
        }
    } else {
        let re: f64 = text.parse().map_err(|_| bad())?;
        Ok(CApprox::new(re, 0.0, 0.0))
    }
}

fn parse_sigma_word(m: &SolvModel, word: &str) -> Result<Character> {
    let n = m.n();
    let mut exponent = vec![0i64; n];
    for factor in word.split('*') {
        let factor = factor.trim();
        let rest = factor
            .strip_prefix("sigma(")
            .ok_or_else(|| Error::MalformedSpec(format!("expected sigma(i), got {factor:?}")))?;
        let (idx_str, tail) = rest
            .split_once(')')
            .ok_or_else(|| Error::MalformedSpec(format!("missing ')' in {factor:?}")))?;
        let idx: usize = idx_str
            .trim()
            .parse()
            .map_err(|_| Error::MalformedSpec(format!("bad embedding index {idx_str:?}")))?;
        if idx == 0 || idx > n {
            return Err(Error::IndexOutOfRange(format!(
                "sigma({idx}) out of range 1..={n}"
            )));
        }
        let power: i64 = match tail.trim() {
            "" => 1,
            p => {
                let p = p
                    .strip_prefix('^')
                    .ok_or_else(|| Error::MalformedSpec(format!("unexpected {p:?} after sigma")))?;
                p.trim()
                    .parse()
                    .map_err(|_| Error::MalformedSpec(format!("bad power {p:?}")))?
            }
        };
        exponent[idx - 1] += power;
    }
    let values = match &m.unit_values {
        Some(uv) => {
            let mut values = Vec::with_capacity(uv.len());
            for row in uv {
                let mut acc = CApprox::one();
                for (pos, &e) in exponent.iter().enumerate() {
                    if e != 0 {
                        acc = acc.mul(row[pos].powi(e)?);
                    }
                }
                values.push(acc);
            }
            Some(values)
        }
        None => None,
    };
    Ok(Character {
        values,
        exponent: Some(
            exponent
                .into_iter()
                .map(|e| Rat::from_integer(e.into()))
                .collect(),
        ),
    })
}
