//! Sparse polynomials over the Gaussian rationals in the formal structure
//! symbols `B_ik` and `C_ik`.
//!
//! Keeping the entries of `B` and `C` symbolic makes the structure-equation
//! identities (`dbar^2 = 0`, closedness of the harmonic generators) theorems
//! in this ring: they hold for every model at once, not just at one numeric
//! instance. Substituting exact rational values is [`SymPoly::subst`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::Rat;

/// Gaussian rational `re + im * sqrt(-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn zero() -> Self {
        GaussRat {
            re: Rat::zero(),
            im: Rat::zero(),
        }
    }

    pub fn one() -> Self {
        GaussRat {
            re: Rat::one(),
            im: Rat::zero(),
        }
    }

    pub fn i() -> Self {
        GaussRat {
            re: Rat::zero(),
            im: Rat::one(),
        }
    }

    pub fn from_rat(r: Rat) -> Self {
        GaussRat {
            re: r,
            im: Rat::zero(),
        }
    }

    pub fn from_i64(n: i64, d: i64) -> Self {
        GaussRat::from_rat(Rat::new(n.into(), d.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn add(&self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn neg(&self) -> GaussRat {
        GaussRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else {
            write!(f, "({}+{}i)", self.re, self.im)
        }
    }
}

/// Formal symbol for a structure-matrix entry, 0-based indices `(i, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sym {
    B(u8, u8),
    C(u8, u8),
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::B(i, k) => write!(f, "B{}{}", i + 1, k + 1),
            Sym::C(i, k) => write!(f, "C{}{}", i + 1, k + 1),
        }
    }
}

/// Sorted exponent list; the empty list is the constant monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct SymMonomial(Vec<(Sym, u32)>);

impl SymMonomial {
    pub fn one() -> Self {
        SymMonomial(Vec::new())
    }

    pub fn symbol(s: Sym) -> Self {
        SymMonomial(vec![(s, 1)])
    }

    fn mul(&self, o: &SymMonomial) -> SymMonomial {
        let mut out: BTreeMap<Sym, u32> = BTreeMap::new();
        for &(s, e) in self.0.iter().chain(&o.0) {
            *out.entry(s).or_insert(0) += e;
        }
        SymMonomial(out.into_iter().collect())
    }
}

/// Polynomial in the `B`/`C` symbols with Gaussian-rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymPoly {
    terms: BTreeMap<SymMonomial, GaussRat>,
}

impl SymPoly {
    pub fn zero() -> Self {
        SymPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(SymMonomial::one(), c);
        }
        SymPoly { terms }
    }

    pub fn one() -> Self {
        SymPoly::constant(GaussRat::one())
    }

    pub fn symbol(s: Sym) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(SymMonomial::symbol(s), GaussRat::one());
        SymPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &SymPoly) -> SymPoly {
        let mut out = self.terms.clone();
        for (m, c) in &o.terms {
            let entry = out.entry(m.clone()).or_insert_with(GaussRat::zero);
            *entry = entry.add(c);
            if entry.is_zero() {
                out.remove(m);
            }
        }
        SymPoly { terms: out }
    }

    pub fn neg(&self) -> SymPoly {
        SymPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn mul(&self, o: &SymPoly) -> SymPoly {
        let mut out: BTreeMap<SymMonomial, GaussRat> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = ma.mul(mb);
                let c = ca.mul(cb);
                let entry = out.entry(m).or_insert_with(GaussRat::zero);
                *entry = entry.add(&c);
            }
        }
        out.retain(|_, c| !c.is_zero());
        SymPoly { terms: out }
    }

    pub fn scale(&self, c: &GaussRat) -> SymPoly {
        if c.is_zero() {
            return SymPoly::zero();
        }
        SymPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x.mul(c)))
                .collect(),
        }
    }

    /// Substitutes exact rational values for every symbol.
    pub fn subst(&self, b: &[Vec<Rat>], c: &[Vec<Rat>]) -> GaussRat {
        let mut acc = GaussRat::zero();
        for (m, coef) in &self.terms {
            let mut val = coef.clone();
            for &(sym, e) in &m.0 {
                let base = match sym {
                    Sym::B(i, k) => b[i as usize][k as usize].clone(),
                    Sym::C(i, k) => c[i as usize][k as usize].clone(),
                };
                for _ in 0..e {
                    val = val.mul(&GaussRat::from_rat(base.clone()));
                }
            }
            acc = acc.add(&val);
        }
        acc
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (s, e) in &m.0 {
                if *e == 1 {
                    write!(f, "*{s}")?;
                } else {
                    write!(f, "*{s}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_basics() {
        let b = SymPoly::symbol(Sym::B(0, 0));
        let c = SymPoly::symbol(Sym::C(0, 0));
        let sum = b.add(&c);
        assert!(sum.add(&sum.neg()).is_zero());
        let prod = sum.mul(&sum); // (B+C)^2 = B^2 + 2BC + C^2
        let expected = b
            .mul(&b)
            .add(&b.mul(&c).scale(&GaussRat::from_i64(2, 1)))
            .add(&c.mul(&c));
        assert_eq!(prod, expected);
    }

    #[test]
    fn gaussian_units() {
        let i = SymPoly::constant(GaussRat::i());
        let minus_one = i.mul(&i);
        assert_eq!(minus_one, SymPoly::constant(GaussRat::from_i64(-1, 1)));
    }

    #[test]
    fn substitution() {
        // (1/2) B_11 + i C_11 at B = -1, C = 3 -> -1/2 + 3i
        let p = SymPoly::symbol(Sym::B(0, 0))
            .scale(&GaussRat::from_i64(1, 2))
            .add(&SymPoly::symbol(Sym::C(0, 0)).scale(&GaussRat::i()));
        let b = vec![vec![Rat::new((-1).into(), 1.into())]];
        let c = vec![vec![Rat::new(3.into(), 1.into())]];
        let v = p.subst(&b, &c);
        assert_eq!(v.re, Rat::new((-1).into(), 2.into()));
        assert_eq!(v.im, Rat::new(3.into(), 1.into()));
    }
}
