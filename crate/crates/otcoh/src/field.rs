//! Arithmetic in the number field `K = Q[x]/(f)` and certified complex embeddings.
//!
//! Elements are coordinate vectors in the power basis `1, theta, ..., theta^{n-1}`
//! with exact rational entries; all ring operations reduce modulo `f`. Embeddings
//! are certified root discs: exact dyadic centers with rational error radii that
//! are pairwise disjoint, refined by Newton iteration from Durand-Kerner seeds
//! until the requested precision is reached. Real roots are detected exactly via
//! a Sturm chain, never by a numeric threshold alone.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Rat, Result};

// ---------------------------------------------------------------------------
// Rational polynomial helpers
// ---------------------------------------------------------------------------

fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

fn trim(coeffs: &mut Vec<Rat>) {
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
}

fn poly_degree(p: &[Rat]) -> usize {
    let mut d = p.len();
    while d > 1 && p[d - 1].is_zero() {
        d -= 1;
    }
    d - 1
}

fn poly_is_zero(p: &[Rat]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    trim(&mut out);
    out
}

/// Euclidean remainder of `a` by `b` (both dense, lowest degree first).
fn poly_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let db = poly_degree(b);
    let lead = b[db].clone();
    let mut r: Vec<Rat> = a.to_vec();
    trim(&mut r);
    while !poly_is_zero(&r) && poly_degree(&r) >= db {
        let dr = poly_degree(&r);
        let q = &r[dr] / &lead;
        let shift = dr - db;
        for i in 0..=db {
            let v = &q * &b[i];
            r[i + shift] -= v;
        }
        r[dr] = Rat::zero();
        trim(&mut r);
    }
    r
}

fn poly_quotient(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let db = poly_degree(b);
    let lead = b[db].clone();
    let mut r: Vec<Rat> = a.to_vec();
    trim(&mut r);
    let da = poly_degree(&r);
    if poly_is_zero(&r) || da < db {
        return vec![Rat::zero()];
    }
    let mut q = vec![Rat::zero(); da - db + 1];
    while !poly_is_zero(&r) && poly_degree(&r) >= db {
        let dr = poly_degree(&r);
        let c = &r[dr] / &lead;
        let shift = dr - db;
        q[shift] = c.clone();
        for i in 0..=db {
            let v = &c * &b[i];
            r[i + shift] -= v;
        }
        r[dr] = Rat::zero();
        trim(&mut r);
    }
    q
}

/// Monic gcd over Q.
fn poly_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut x: Vec<Rat> = a.to_vec();
    let mut y: Vec<Rat> = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !poly_is_zero(&y) {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    if !poly_is_zero(&x) {
        let lead = x[poly_degree(&x)].clone();
        for c in &mut x {
            *c /= lead.clone();
        }
    }
    x
}

/// Extended Euclid: returns `(g, u)` with `u*a = g mod m`, `g` monic.
fn poly_half_ext_gcd(a: &[Rat], m: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r0: Vec<Rat> = m.to_vec();
    let mut r1: Vec<Rat> = a.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut u0 = vec![Rat::zero()];
    let mut u1 = vec![Rat::one()];
    while !poly_is_zero(&r1) {
        let q = poly_quotient(&r0, &r1);
        let r2 = poly_rem(&r0, &r1);
        let qu = poly_mul(&q, &u1);
        let mut u2 = u0.clone();
        u2.resize(u2.len().max(qu.len()), Rat::zero());
        for (i, c) in qu.iter().enumerate() {
            u2[i] -= c;
        }
        trim(&mut u2);
        r0 = r1;
        r1 = r2;
        u0 = u1;
        u1 = u2;
    }
    let lead = r0[poly_degree(&r0)].clone();
    for c in &mut r0 {
        *c /= lead.clone();
    }
    for c in &mut u0 {
        *c /= lead.clone();
    }
    (r0, u0)
}

fn poly_derivative(p: &[Rat]) -> Vec<Rat> {
    if p.len() <= 1 {
        return vec![Rat::zero()];
    }
    let mut out = Vec::with_capacity(p.len() - 1);
    for (i, c) in p.iter().enumerate().skip(1) {
        out.push(c * rat(i as i64));
    }
    trim(&mut out);
    out
}

fn poly_eval_rat(p: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Resultant Res(f, g) as the determinant of the Sylvester matrix.
fn resultant(f: &[Rat], g: &[Rat]) -> Rat {
    let mut fv = f.to_vec();
    let mut gv = g.to_vec();
    trim(&mut fv);
    trim(&mut gv);
    if poly_is_zero(&gv) {
        return Rat::zero();
    }
    let n = poly_degree(&fv);
    let m = poly_degree(&gv);
    if m == 0 {
        // Res(f, c) = c^deg(f)
        let mut acc = Rat::one();
        for _ in 0..n {
            acc *= gv[0].clone();
        }
        return acc;
    }
    let size = n + m;
    let mut mat = vec![vec![Rat::zero(); size]; size];
    // m rows of f coefficients (highest degree first), then n rows of g.
    for row in 0..m {
        for (k, c) in fv.iter().rev().enumerate() {
            mat[row][row + k] = c.clone();
        }
    }
    for row in 0..n {
        for (k, c) in gv.iter().rev().enumerate() {
            mat[m + row][row + k] = c.clone();
        }
    }
    det_rat(mat)
}

/// Determinant by rational Gaussian elimination with partial pivoting.
fn det_rat(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= pv.clone();
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &pv;
            for k in col..n {
                let v = &factor * &m[col][k];
                m[row][k] -= v;
            }
        }
    }
    det
}

/// Number of distinct real roots of a squarefree `f`, by Sturm's theorem.
fn sturm_real_root_count(f: &[Rat]) -> usize {
    let mut chain: Vec<Vec<Rat>> = vec![f.to_vec(), poly_derivative(f)];
    loop {
        let last = &chain[chain.len() - 1];
        if poly_is_zero(last) {
            chain.pop();
            break;
        }
        let prev = &chain[chain.len() - 2];
        let mut r = poly_rem(prev, last);
        if poly_is_zero(&r) {
            break;
        }
        for c in &mut r {
            *c = -c.clone();
        }
        chain.push(r);
    }
    // Sign sequences at -inf and +inf from leading coefficients.
    let sign_at = |plus: bool| -> Vec<i8> {
        chain
            .iter()
            .map(|p| {
                let d = poly_degree(p);
                let lc = &p[d];
                let mut s: i8 = if lc.is_positive() { 1 } else { -1 };
                if !plus && d % 2 == 1 {
                    s = -s;
                }
                s
            })
            .collect()
    };
    let variations = |signs: &[i8]| -> usize {
        signs
            .windows(2)
            .filter(|w| w[0] != 0 && w[1] != 0 && w[0] != w[1])
            .count()
    };
    let neg = variations(&sign_at(false));
    let pos = variations(&sign_at(true));
    neg - pos
}

// ---------------------------------------------------------------------------
// Polynomial (the minimal polynomial of the field generator)
// ---------------------------------------------------------------------------

/// Monic squarefree polynomial over Q, lowest-degree coefficient first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rat>,
}

impl Polynomial {
    /// Validates monicity, squarefreeness and irreducibility.
    ///
    /// Degree below 3 cannot carry a signature with `s >= 1` and `t >= 1`, so it
    /// is rejected as [`Error::WrongSignature`]. Irreducibility is decided by a
    /// rational-root test (degree 3) plus a quadratic-splitting search (degree 4,
    /// integer coefficients); for anything else pass `assume_irreducible = true`.
    /// A nontrivial gcd during a later inversion still certifies reducibility at
    /// runtime ([`Error::NotInvertible`]).
    pub fn new(coeffs: Vec<Rat>, assume_irreducible: bool) -> Result<Self> {
        let mut coeffs = coeffs;
        trim(&mut coeffs);
        let n = poly_degree(&coeffs);
        if coeffs[n] != Rat::one() {
            return Err(Error::NotMonic);
        }
        if n < 3 {
            return Err(Error::WrongSignature {
                s: usize::from(n == 1 || n == 2), // degree this low is never admissible
                t: 0,
            });
        }
        let g = poly_gcd(&coeffs, &poly_derivative(&coeffs));
        if poly_degree(&g) != 0 {
            return Err(Error::NotSquarefree);
        }
        let p = Polynomial { coeffs };
        if !assume_irreducible {
            p.check_irreducible()?;
        }
        Ok(p)
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect(), false)
    }

    pub fn degree(&self) -> usize {
        poly_degree(&self.coeffs)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    fn check_irreducible(&self) -> Result<()> {
        let n = self.degree();
        if let Some(root) = self.rational_root() {
            return Err(Error::Reducible(format!("rational root {root}")));
        }
        match n {
            3 => Ok(()), // cubic with no rational root is irreducible
            4 => self.check_quartic_no_quadratic_split(),
            _ => Err(Error::IrreducibilityUnverified(n)),
        }
    }

    /// Any rational root, via the rational-root theorem on the primitive
    /// integer scaling of `f`.
    fn rational_root(&self) -> Option<Rat> {
        let mut denom_lcm = BigInt::one();
        for c in &self.coeffs {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&denom_lcm / c.denom()))
            .collect();
        let a0 = &ints[0];
        let an = &ints[poly_degree(&self.coeffs)];
        if a0.is_zero() {
            return Some(Rat::zero());
        }
        let ps = divisors(&a0.abs());
        let qs = divisors(&an.abs());
        for p in &ps {
            for q in &qs {
                for sign in [1i64, -1] {
                    let cand = Rat::new(p * BigInt::from(sign), q.clone());
                    if poly_eval_rat(&self.coeffs, &cand).is_zero() {
                        return Some(cand);
                    }
                }
            }
        }
        None
    }

    /// Degree-4 only: search for a factorization into two monic integer
    /// quadratics. Requires integer coefficients (the OT inputs are minimal
    /// polynomials of algebraic integers, hence integral).
    fn check_quartic_no_quadratic_split(&self) -> Result<()> {
        let ints: Option<Vec<BigInt>> = self
            .coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect();
        let ints = match ints {
            Some(v) => v,
            None => return Err(Error::IrreducibilityUnverified(4)),
        };
        let (e0, e1, e2, e3) = (&ints[0], &ints[1], &ints[2], &ints[3]);
        // f = (x^2 + a x + b)(x^2 + c x + d) with b*d = e0, a + c = e3,
        // b + d + a*c = e2, a*d + b*c = e1.
        for b in signed_divisors(e0) {
            if b.is_zero() {
                continue;
            }
            let d = e0 / &b;
            // a + c = e3 and a*c = e2 - b - d: a, c are roots of
            // y^2 - e3 y + (e2 - b - d).
            let sum = e3.clone();
            let prod = e2 - &b - &d;
            let disc = &sum * &sum - BigInt::from(4) * &prod;
            if disc.sign() == num_bigint::Sign::Minus {
                continue;
            }
            let sq = disc.sqrt();
            if &sq * &sq != disc {
                continue;
            }
            for root_sign in [1i64, -1] {
                let two_a = &sum + BigInt::from(root_sign) * &sq;
                if (&two_a % BigInt::from(2)).is_zero() {
                    let a = two_a / BigInt::from(2);
                    let c = &sum - &a;
                    if &a * &d + &b * &c == *e1 {
                        return Err(Error::Reducible(format!(
                            "(x^2 + {a} x + {b})(x^2 + {c} x + {d})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    // Trial division; inputs here are small constant terms.
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

fn signed_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    for d in divisors(n) {
        out.push(d.clone());
        out.push(-d);
    }
    out
}

// ---------------------------------------------------------------------------
// Field elements and the number field
// ---------------------------------------------------------------------------

/// Element of `K` as exact rational coordinates in the power basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    coords: Vec<Rat>,
}

impl FieldElement {
    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// True when every coordinate is an integer (Z[theta] membership).
    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }
}

/// The field `Q[x]/(f)` with its reduction and unit-test machinery.
#[derive(Debug, Clone)]
pub struct NumberField {
    f: Polynomial,
}

impl NumberField {
    pub fn new(f: Polynomial) -> Self {
        NumberField { f }
    }

    pub fn minimal_polynomial(&self) -> &Polynomial {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.degree()
    }

    pub fn element(&self, coords: Vec<Rat>) -> Result<FieldElement> {
        if coords.len() > self.degree() {
            return Err(Error::IndexOutOfRange(format!(
                "element has {} coordinates, field degree is {}",
                coords.len(),
                self.degree()
            )));
        }
        let mut coords = coords;
        coords.resize(self.degree(), Rat::zero());
        Ok(FieldElement { coords })
    }

    pub fn element_i64(&self, coords: &[i64]) -> Result<FieldElement> {
        self.element(coords.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coords: vec![Rat::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut coords = vec![Rat::zero(); self.degree()];
        coords[0] = Rat::one();
        FieldElement { coords }
    }

    /// The generator `theta`.
    pub fn theta(&self) -> FieldElement {
        let mut coords = vec![Rat::zero(); self.degree()];
        coords[1] = Rat::one();
        FieldElement { coords }
    }

    fn reduce(&self, poly: Vec<Rat>) -> FieldElement {
        let mut r = poly_rem(&poly, self.f.coeffs());
        r.resize(self.degree(), Rat::zero());
        FieldElement { coords: r }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| x + y)
            .collect();
        FieldElement { coords }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.reduce(poly_mul(&a.coords, &b.coords))
    }

    /// Inverse via extended Euclid in `Q[x]` modulo `f`.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::NotInvertible);
        }
        let (g, u) = poly_half_ext_gcd(&a.coords, self.f.coeffs());
        if poly_degree(&g) != 0 {
            return Err(Error::NotInvertible);
        }
        Ok(self.reduce(u))
    }

    /// `a^k`; negative exponents go through [`NumberField::inv`].
    pub fn pow(&self, a: &FieldElement, k: i64) -> Result<FieldElement> {
        let (base, mut e) = if k < 0 {
            (self.inv(a)?, (-(k as i128)) as u64)
        } else {
            (a.clone(), k as u64)
        };
        let mut acc = self.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Field norm `N(a) = Res(f, a(x))`, exact.
    pub fn norm(&self, a: &FieldElement) -> Rat {
        if a.is_zero() {
            return Rat::zero();
        }
        resultant(self.f.coeffs(), &a.coords)
    }

    /// True iff `|N(a)| = 1`. Requires integer coordinates in `Z[theta]`.
    pub fn is_unit(&self, a: &FieldElement) -> Result<bool> {
        if !a.is_integral() {
            return Err(Error::NonIntegralElement);
        }
        let n = self.norm(a);
        Ok(n.abs() == Rat::one())
    }
}

// ---------------------------------------------------------------------------
// Complex intervals (exact rational centers, rational radius)
// ---------------------------------------------------------------------------

/// Disc in `C`: exact rational center, rational error radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CInterval {
    pub re: Rat,
    pub im: Rat,
    pub rad: Rat,
}

impl CInterval {
    pub fn exact(re: Rat, im: Rat) -> Self {
        CInterval {
            re,
            im,
            rad: Rat::zero(),
        }
    }

    pub fn conj(&self) -> Self {
        CInterval {
            re: self.re.clone(),
            im: -self.im.clone(),
            rad: self.rad.clone(),
        }
    }

    /// Upper bound on the modulus of the center (1-norm).
    fn center_bound(&self) -> Rat {
        self.re.abs() + self.im.abs()
    }

    fn add(&self, o: &CInterval) -> CInterval {
        CInterval {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
            rad: &self.rad + &o.rad,
        }
    }

    fn mul(&self, o: &CInterval) -> CInterval {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        let rad = self.center_bound() * &o.rad + o.center_bound() * &self.rad + &self.rad * &o.rad;
        CInterval { re, im, rad }
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    pub fn rad_f64(&self) -> f64 {
        rat_to_f64(&self.rad)
    }

    /// True when the disc certainly contains only the real axis point
    /// consistent with a real value (used by positivity checks).
    pub fn certainly_positive_real(&self) -> bool {
        self.im.is_zero() && self.re > self.rad
    }
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled integer division for extreme values.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

/// Round to a dyadic with denominator 2^bits.
fn round_dyadic(x: &Rat, bits: u32) -> Rat {
    let scale = BigInt::one() << bits;
    let scaled = x * Rat::from_integer(scale.clone());
    let rounded = (scaled + Rat::new(BigInt::one(), BigInt::from(2))).floor();
    rounded / Rat::from_integer(scale)
}

/// Rational upper bound of sqrt(x) for x >= 0.
fn sqrt_upper(x: &Rat) -> Rat {
    if x.is_zero() {
        return Rat::zero();
    }
    let a = x.numer().to_biguint().expect("nonnegative");
    let b = x.denom().to_biguint().expect("positive");
    // sqrt(a/b) = sqrt(a*b)/b <= (floor_sqrt(a*b)+1)/b
    let ab = &a * &b;
    let s = ab.sqrt() + BigUint::one();
    Rat::new(BigInt::from(s), BigInt::from(b))
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

/// The ordered complex embeddings of `K`: real places first (ascending), then
/// one representative per conjugate pair (positive imaginary part, sorted by
/// real then imaginary part), then their conjugates, so that
/// `sigma_{s+i} = conj(sigma_{s+t+i})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingSet {
    s: usize,
    t: usize,
    roots: Vec<CInterval>,
    precision: u32,
}

impl EmbeddingSet {
    pub fn signature(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    pub fn n(&self) -> usize {
        self.roots.len()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Root disc of `sigma_i`, 1-based.
    pub fn root(&self, i: usize) -> &CInterval {
        &self.roots[i - 1]
    }

    pub fn roots(&self) -> &[CInterval] {
        &self.roots
    }
}

/// All complex roots of `f` as certified, pairwise disjoint discs with the
/// paper's ordering convention enforced.
pub fn find_embeddings(f: &Polynomial, precision: u32) -> Result<EmbeddingSet> {
    let n = f.degree();
    let coeffs = f.coeffs();

    let real_count = sturm_real_root_count(coeffs);
    let s = real_count;
    if (n - s) % 2 != 0 {
        // Cannot happen for real coefficients; defensive precision failure.
        return Err(Error::PrecisionExhausted);
    }
    let t = (n - s) / 2;
    if s == 0 || t == 0 {
        return Err(Error::WrongSignature { s, t });
    }

    // Target radius from the contract: < 2^{-precision/2}.
    let target_rad = Rat::new(BigInt::one(), BigInt::one() << (precision / 2 + 1));

    let seeds = durand_kerner_seeds(coeffs, n);
    let fp = poly_derivative(coeffs);

    let mut work_bits = precision.max(64);
    let max_bits = precision.saturating_mul(8).max(4096);
    loop {
        match certify_at_precision(coeffs, &fp, &seeds, work_bits, &target_rad, s) {
            Some(roots) => {
                let ordered = order_roots(roots, s, t);
                return Ok(EmbeddingSet {
                    s,
                    t,
                    roots: ordered,
                    precision,
                });
            }
            None => {
                if work_bits >= max_bits {
                    return Err(Error::NonSeparableRoots(precision));
                }
                work_bits *= 2;
            }
        }
    }
}

/// Durand-Kerner simultaneous iteration in f64 to seed the certified Newton
/// refinement. Deterministic: fixed starting points, fixed iteration budget.
fn durand_kerner_seeds(coeffs: &[Rat], n: usize) -> Vec<(f64, f64)> {
    let c: Vec<f64> = coeffs.iter().map(rat_to_f64).collect();
    let eval = |z: (f64, f64)| -> (f64, f64) {
        let mut acc = (0.0f64, 0.0f64);
        for k in (0..c.len()).rev() {
            let re = acc.0 * z.0 - acc.1 * z.1 + c[k];
            let im = acc.0 * z.1 + acc.1 * z.0;
            acc = (re, im);
        }
        acc
    };
    // Cauchy bound on root moduli.
    let bound = 1.0 + c[..n].iter().map(|x| x.abs()).fold(0.0f64, f64::max);
    let mut z: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            // (0.4 + 0.9i)^(k+1), scaled; never real, never a root of unity.
            let mut w = (1.0f64, 0.0f64);
            for _ in 0..=k {
                w = (0.4 * w.0 - 0.9 * w.1, 0.9 * w.0 + 0.4 * w.1);
            }
            (w.0 * bound, w.1 * bound)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = (1.0f64, 0.0f64);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = (z[i].0 - z[j].0, z[i].1 - z[j].1);
                denom = (denom.0 * d.0 - denom.1 * d.1, denom.0 * d.1 + denom.1 * d.0);
            }
            let fv = eval(z[i]);
            let den_norm = denom.0 * denom.0 + denom.1 * denom.1;
            if den_norm == 0.0 {
                continue;
            }
            let step = (
                (fv.0 * denom.0 + fv.1 * denom.1) / den_norm,
                (fv.1 * denom.0 - fv.0 * denom.1) / den_norm,
            );
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
            max_step = max_step.max(step.0.abs() + step.1.abs());
        }
        if max_step < 1e-14 {
            break;
        }
    }
    z
}

/// Newton-refine every seed at `bits` working precision and certify: radii
/// below target, discs pairwise disjoint, real-root count matching Sturm.
fn certify_at_precision(
    coeffs: &[Rat],
    fp: &[Rat],
    seeds: &[(f64, f64)],
    bits: u32,
    target_rad: &Rat,
    sturm_reals: usize,
) -> Option<Vec<CInterval>> {
    let n = poly_degree(coeffs);
    let n_rat = rat(n as i64);
    let mut discs: Vec<CInterval> = Vec::with_capacity(n);
    for &(re0, im0) in seeds {
        let mut z = CInterval {
            re: round_dyadic(&rat_from_f64(re0), bits),
            im: round_dyadic(&rat_from_f64(im0), bits),
            rad: Rat::zero(),
        };
        let mut rad = Rat::zero();
        let mut ok = false;
        for _ in 0..64 {
            let (fv_re, fv_im) = eval_exact(coeffs, &z.re, &z.im);
            let (fpv_re, fpv_im) = eval_exact(fp, &z.re, &z.im);
            let fp_norm2 = &fpv_re * &fpv_re + &fpv_im * &fpv_im;
            if fp_norm2.is_zero() {
                return None; // derivative vanished; retry at higher precision
            }
            let f_norm2 = &fv_re * &fv_re + &fv_im * &fv_im;
            // Nearest root lies within n*|f(z)/f'(z)| of z.
            let rad2 = &n_rat * &n_rat * &f_norm2 / &fp_norm2;
            rad = sqrt_upper(&rad2);
            if &rad < target_rad {
                ok = true;
                break;
            }
            // Newton step, rounded back to the working dyadic grid.
            let step_re = (&fv_re * &fpv_re + &fv_im * &fpv_im) / &fp_norm2;
            let step_im = (&fv_im * &fpv_re - &fv_re * &fpv_im) / &fp_norm2;
            z.re = round_dyadic(&(&z.re - step_re), bits);
            z.im = round_dyadic(&(&z.im - step_im), bits);
        }
        if !ok {
            return None;
        }
        z.rad = rad;
        discs.push(z);
    }

    // Real detection: a disc that crosses the real axis must contain a real
    // root; the count must match the Sturm count exactly.
    let crossing: Vec<usize> = (0..n)
        .filter(|&i| discs[i].im.abs() <= discs[i].rad)
        .collect();
    if crossing.len() != sturm_reals {
        return None;
    }
    for &i in &crossing {
        discs[i].im = Rat::zero(); // projection onto R stays within the disc
    }

    // Pairwise disjoint?
    for i in 0..n {
        for j in i + 1..n {
            let dre = &discs[i].re - &discs[j].re;
            let dim = &discs[i].im - &discs[j].im;
            let dist2 = &dre * &dre + &dim * &dim;
            let rr = &discs[i].rad + &discs[j].rad;
            if dist2 <= &rr * &rr {
                return None;
            }
        }
    }
    Some(discs)
}

fn eval_exact(coeffs: &[Rat], re: &Rat, im: &Rat) -> (Rat, Rat) {
    let mut acc_re = Rat::zero();
    let mut acc_im = Rat::zero();
    for c in coeffs.iter().rev() {
        let nre = &acc_re * re - &acc_im * im + c;
        let nim = &acc_re * im + &acc_im * re;
        acc_re = nre;
        acc_im = nim;
    }
    (acc_re, acc_im)
}

/// Order certified discs: reals ascending, then conjugate-pair representatives
/// with positive imaginary part sorted by (re, im), then exact conjugates.
fn order_roots(discs: Vec<CInterval>, s: usize, t: usize) -> Vec<CInterval> {
    let mut reals: Vec<CInterval> = Vec::new();
    let mut upper: Vec<CInterval> = Vec::new();
    for d in discs {
        if d.im.is_zero() {
            reals.push(d);
        } else if d.im.is_positive() {
            upper.push(d);
        }
        // lower-half roots are regenerated as exact conjugates below
    }
    debug_assert_eq!(reals.len(), s);
    debug_assert_eq!(upper.len(), t);
    reals.sort_by(|a, b| a.re.cmp(&b.re));
    upper.sort_by(|a, b| a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im)));
    let mut out = reals;
    let conjugates: Vec<CInterval> = upper.iter().map(CInterval::conj).collect();
    out.extend(upper);
    out.extend(conjugates);
    out
}

/// Evaluate `a` at the `i`-th embedding (1-based) by interval Horner.
pub fn evaluate(a: &FieldElement, i: usize, e: &EmbeddingSet) -> Result<CInterval> {
    if i == 0 || i > e.n() {
        return Err(Error::IndexOutOfRange(format!(
            "embedding index {i} not in 1..={}",
            e.n()
        )));
    }
    let z = e.root(i);
    let mut acc = CInterval::exact(Rat::zero(), Rat::zero());
    for c in a.coords().iter().rev() {
        acc = acc.mul(z).add(&CInterval::exact(c.clone(), Rat::zero()));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cubic() -> Polynomial {
        Polynomial::from_i64(&[-1, -1, 0, 1]).unwrap()
    }

    fn cubic_field() -> NumberField {
        NumberField::new(cubic())
    }

    #[test]
    fn cubic_embeddings_match_frozen_roots() {
        let e = find_embeddings(&cubic(), 256).unwrap();
        assert_eq!(e.signature(), (1, 1));
        let (re1, im1) = e.root(1).to_c64();
        assert!((re1 - 1.324717957244746).abs() < 1e-12);
        assert_eq!(im1, 0.0);
        let (re2, im2) = e.root(2).to_c64();
        assert!((re2 - -0.662358978622373).abs() < 1e-12);
        assert!((im2 - 0.5622795120623012).abs() < 1e-12);
        // sigma_3 = conj(sigma_2), exactly.
        assert_eq!(e.root(3).re, e.root(2).re);
        assert_eq!(e.root(3).im, -e.root(2).im.clone());
        // radii below the contract bound
        let bound = Rat::new(BigInt::one(), BigInt::one() << 128);
        for r in e.roots() {
            assert!(r.rad < bound);
        }
        // residual oracle: |f(root)| below 1e-12 in f64
        for r in e.roots() {
            let (x, y) = r.to_c64();
            let f = |z: (f64, f64)| {
                let sq = (z.0 * z.0 - z.1 * z.1, 2.0 * z.0 * z.1);
                let cu = (sq.0 * z.0 - sq.1 * z.1, sq.0 * z.1 + sq.1 * z.0);
                (cu.0 - z.0 - 1.0, cu.1 - z.1)
            };
            let (fr, fi) = f((x, y));
            assert!((fr * fr + fi * fi).sqrt() < 1e-12);
        }
    }

    #[test]
    fn all_real_quartic_is_wrong_signature() {
        // x^4 - 5x^2 + 1: four real roots, t = 0. Degree-2 inputs are already
        // rejected at construction for the same reason.
        let f = Polynomial::from_i64(&[1, 0, -5, 0, 1]).unwrap();
        match find_embeddings(&f, 128) {
            Err(Error::WrongSignature { s: 4, t: 0 }) => {}
            other => panic!("expected WrongSignature, got {other:?}"),
        }
    }

    #[test]
    fn degree_two_rejected_at_construction() {
        match Polynomial::from_i64(&[-2, 0, 1]) {
            Err(Error::WrongSignature { .. }) => {}
            other => panic!("expected WrongSignature, got {other:?}"),
        }
    }

    #[test]
    fn no_real_root_quartic_is_wrong_signature() {
        let f = Polynomial::from_i64(&[1, 0, 0, 0, 1]).unwrap();
        match find_embeddings(&f, 128) {
            Err(Error::WrongSignature { s: 0, t: 2 }) => {}
            other => panic!("expected WrongSignature, got {other:?}"),
        }
    }

    #[test]
    fn find_embeddings_is_deterministic() {
        let a = find_embeddings(&cubic(), 192).unwrap();
        let b = find_embeddings(&cubic(), 192).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn evaluate_matches_roots() {
        let k = cubic_field();
        let e = find_embeddings(&cubic(), 256).unwrap();
        let theta = k.theta();
        let v = evaluate(&theta, 1, &e).unwrap();
        assert!((v.to_c64().0 - 1.324717957244746).abs() < 1e-12);

        // constants evaluate exactly, radius zero
        let one = k.one();
        for i in 1..=3 {
            let v = evaluate(&one, i, &e).unwrap();
            assert_eq!(v.re, Rat::one());
            assert!(v.im.is_zero());
            assert!(v.rad.is_zero());
        }

        // |sigma_2(theta^2)| = |sigma_2(theta)|^2 = 1/sigma_1(theta)
        let theta2 = k.pow(&theta, 2).unwrap();
        let v = evaluate(&theta2, 2, &e).unwrap();
        let (x, y) = v.to_c64();
        assert!(((x * x + y * y).sqrt() - 0.7548776662466928).abs() < 1e-12);
    }

    #[test]
    fn conjugate_embeddings_agree() {
        let k = cubic_field();
        let e = find_embeddings(&cubic(), 256).unwrap();
        let a = k.element_i64(&[2, -1, 3]).unwrap();
        let v2 = evaluate(&a, 2, &e).unwrap();
        let v3 = evaluate(&a, 3, &e).unwrap();
        // exact conjugate centers by construction
        assert_eq!(v2.re, v3.re);
        assert_eq!(v2.im, -v3.im.clone());
    }

    #[test]
    fn inverse_of_theta() {
        let k = cubic_field();
        let theta = k.theta();
        let inv = k.inv(&theta).unwrap();
        // theta^{-1} = theta^2 - 1
        assert_eq!(inv, k.element_i64(&[-1, 0, 1]).unwrap());
        assert_eq!(k.mul(&theta, &inv), k.one());
    }

    #[test]
    fn pow_reduces_mod_f() {
        let k = cubic_field();
        let theta = k.theta();
        // theta^3 = theta + 1
        assert_eq!(k.pow(&theta, 3).unwrap(), k.element_i64(&[1, 1, 0]).unwrap());
        // negative powers through inv
        let m = k.mul(&k.pow(&theta, -2).unwrap(), &k.pow(&theta, 2).unwrap());
        assert_eq!(m, k.one());
    }

    #[test]
    fn unit_tests_exact_norm() {
        let k = cubic_field();
        assert!(k.is_unit(&k.theta()).unwrap());
        assert!(!k.is_unit(&k.element_i64(&[2, 0, 0]).unwrap()).unwrap());
        assert_eq!(k.norm(&k.element_i64(&[2, 0, 0]).unwrap()), rat(8));
        // theta + 1 is a unit: N = 1
        let tp1 = k.element_i64(&[1, 1, 0]).unwrap();
        assert!(k.is_unit(&tp1).unwrap());
        // non-integral coordinates are rejected
        let half = k
            .element(vec![Rat::new(BigInt::one(), BigInt::from(2)), Rat::zero(), Rat::zero()])
            .unwrap();
        match k.is_unit(&half) {
            Err(Error::NonIntegralElement) => {}
            other => panic!("expected NonIntegralElement, got {other:?}"),
        }
    }

    #[test]
    fn norm_equals_product_of_embedding_values() {
        let k = cubic_field();
        let e = find_embeddings(&cubic(), 256).unwrap();
        // 100 deterministic small-height elements
        let mut elements = Vec::new();
        'outer: for a0 in -3i64..=3 {
            for a1 in -3i64..=3 {
                for a2 in -2i64..=2 {
                    if (a0, a1, a2) != (0, 0, 0) {
                        elements.push([a0, a1, a2]);
                        if elements.len() == 100 {
                            break 'outer;
                        }
                    }
                }
            }
        }
        assert_eq!(elements.len(), 100);
        for coords in elements {
            let a = k.element_i64(&coords).unwrap();
            let norm = rat_to_f64(&k.norm(&a));
            let mut prod = (1.0f64, 0.0f64);
            let mut rad_acc = 0.0f64;
            for i in 1..=3 {
                let v = evaluate(&a, i, &e).unwrap();
                let (x, y) = v.to_c64();
                prod = (prod.0 * x - prod.1 * y, prod.0 * y + prod.1 * x);
                rad_acc += v.rad_f64();
            }
            assert!(
                (prod.0 - norm).abs() < 1e-9 + rad_acc && prod.1.abs() < 1e-9 + rad_acc,
                "norm mismatch for {a:?}: {prod:?} vs {norm}"
            );
        }
    }

    #[test]
    fn reducible_polynomials_are_rejected() {
        // x^3 - x = x(x-1)(x+1): not squarefree-free? It's squarefree but has
        // rational roots.
        match Polynomial::from_i64(&[0, -1, 0, 1]) {
            Err(Error::Reducible(_)) => {}
            other => panic!("expected Reducible, got {other:?}"),
        }
        // (x^2+1)^2 is not squarefree
        match Polynomial::from_i64(&[1, 0, 2, 0, 1]) {
            Err(Error::NotSquarefree) => {}
            other => panic!("expected NotSquarefree, got {other:?}"),
        }
        // (x^2+1)(x^2+2) splits into quadratics
        match Polynomial::from_i64(&[2, 0, 3, 0, 1]) {
            Err(Error::Reducible(_)) => {}
            other => panic!("expected Reducible, got {other:?}"),
        }
        // x^4 + 1 is irreducible
        assert!(Polynomial::from_i64(&[1, 0, 0, 0, 1]).is_ok());
        // degree 5 needs the assume flag
        match Polynomial::from_i64(&[-1, -1, 0, 0, 0, 1]) {
            Err(Error::IrreducibilityUnverified(5)) => {}
            other => panic!("expected IrreducibilityUnverified, got {other:?}"),
        }
        assert!(Polynomial::new(
            [-1i64, -1, 0, 0, 0, 1].iter().map(|&c| rat(c)).collect(),
            true
        )
        .is_ok());
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(sturm_real_root_count(cubic().coeffs()), 1);
        let f = Polynomial::from_i64(&[1, 0, -5, 0, 1]).unwrap();
        assert_eq!(sturm_real_root_count(f.coeffs()), 4);
        let g = Polynomial::from_i64(&[1, 0, 0, 0, 1]).unwrap();
        assert_eq!(sturm_real_root_count(g.coeffs()), 0);
    }

    proptest! {
        #[test]
        fn mul_commutative_associative(
            a in proptest::collection::vec(-6i64..=6, 3),
            b in proptest::collection::vec(-6i64..=6, 3),
            c in proptest::collection::vec(-6i64..=6, 3),
        ) {
            let k = cubic_field();
            let a = k.element_i64(&a).unwrap();
            let b = k.element_i64(&b).unwrap();
            let c = k.element_i64(&c).unwrap();
            prop_assert_eq!(k.mul(&a, &b), k.mul(&b, &a));
            prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
            prop_assert_eq!(k.mul(&k.one(), &a), a.clone());
        }

        #[test]
        fn inv_is_involutive(coords in proptest::collection::vec(-6i64..=6, 3)) {
            let k = cubic_field();
            let a = k.element_i64(&coords).unwrap();
            prop_assume!(!a.is_zero());
            let inv = k.inv(&a).unwrap();
            prop_assert_eq!(k.inv(&inv).unwrap(), a.clone());
            prop_assert_eq!(k.mul(&a, &inv), k.one());
        }
    }
}
