//! Sparse multivariate polynomials over a finite field: the exact oracle that
//! every transform is checked against.

mod expand;
mod kronecker;
mod modp;

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement, FieldEmbedding};
use crate::ir::text::{content_lines, parse_preamble, tokens};

pub use expand::{expand, expand_abp, expand_circuit, ExpandCaps};
pub use kronecker::{kronecker_digits, kronecker_decode, kronecker_encode};
pub use modp::{poly_mod_p_decompose, pth_root_poly, ModPDecomposition};

/// Exponent vector of a monomial.
pub type Monomial = SmallVec<[u32; 4]>;

#[derive(Clone, PartialEq, Eq)]
pub struct SparsePoly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl SparsePoly {
    pub fn zero(field: &Field, nvars: usize) -> SparsePoly {
        SparsePoly {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, nvars: usize, c: FieldElement) -> SparsePoly {
        let mut p = Self::zero(field, nvars);
        p.add_term(SmallVec::from_elem(0, nvars), c);
        p
    }

    pub fn var(field: &Field, nvars: usize, i: usize) -> SparsePoly {
        let mut e: Monomial = SmallVec::from_elem(0, nvars);
        e[i] = 1;
        Self::monomial(field, e, field.one())
    }

    pub fn monomial(field: &Field, exps: Monomial, c: FieldElement) -> SparsePoly {
        let mut p = Self::zero(field, exps.len());
        p.add_term(exps, c);
        p
    }

    /// Sum of the given terms; repeated monomials are combined.
    pub fn from_terms<I>(field: &Field, nvars: usize, terms: I) -> Result<SparsePoly>
    where
        I: IntoIterator<Item = (Vec<u32>, FieldElement)>,
    {
        let mut p = Self::zero(field, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::usage(format!(
                    "exponent vector of length {} in a {nvars}-variate polynomial",
                    e.len()
                )));
            }
            if c.field() != field {
                return Err(Error::usage("coefficient from another field"));
            }
            p.add_term(e.into_iter().collect(), c);
        }
        Ok(p)
    }

    /// Add `c·x^e` in place.
    pub(crate) fn add_term(&mut self, e: Monomial, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in lexicographic order of exponent vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &FieldElement)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exps: &[u32]) -> FieldElement {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u64).sum())
            .max()
    }

    /// Largest individual degree; 0 for constants and the zero polynomial.
    pub fn ideg(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().copied())
            .max()
            .unwrap_or(0)
    }

    fn check_compatible(&self, other: &SparsePoly) -> Result<()> {
        if self.field != other.field || self.nvars != other.nvars {
            return Err(Error::usage("polynomials over different fields or variable sets"));
        }
        Ok(())
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SparsePoly {
        self.scale(&(-&self.field.one()))
    }

    pub fn scale(&self, a: &FieldElement) -> SparsePoly {
        if a.is_zero() {
            return Self::zero(&self.field, self.nvars);
        }
        SparsePoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * a)).collect(),
        }
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.mul_capped(other, usize::MAX)
    }

    /// Product, failing with a resource error once it has more than `cap` terms.
    pub fn mul_capped(&self, other: &SparsePoly, cap: usize) -> Result<SparsePoly> {
        self.check_compatible(other)?;
        let mut out = Self::zero(&self.field, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = ea.clone();
                for (x, y) in e.iter_mut().zip(eb.iter()) {
                    *x = x
                        .checked_add(*y)
                        .ok_or_else(|| Error::resource("exponent overflow"))?;
                }
                out.add_term(e, ca * cb);
            }
            if out.terms.len() > cap {
                return Err(Error::resource(format!(
                    "expansion exceeds the term cap of {cap}"
                )));
            }
        }
        Ok(out)
    }

    /// `f^p = Σ c^p x^{p·e}` (the Frobenius map on polynomials).
    pub fn pth_power(&self) -> SparsePoly {
        let p = self.field.p() as u32;
        SparsePoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|&x| x * p).collect(), c.frobenius()))
                .collect(),
        }
    }

    /// `f^e`, splitting `e` into base-p digits so that every p-th power is a
    /// cheap Frobenius step and only digit powers use multiplication.
    pub fn power(&self, e: u64) -> SparsePoly {
        let p = self.field.p();
        let mut result = Self::constant(&self.field, self.nvars, self.field.one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            let digit = e % p;
            for _ in 0..digit {
                result = result.mul(&base).expect("same ring");
            }
            e /= p;
            if e > 0 {
                base = base.pth_power();
            }
        }
        result
    }

    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.nvars {
            return Err(Error::usage(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.nvars
            )));
        }
        if point.iter().any(|c| c.field() != &self.field) {
            return Err(Error::usage("point lies in another field"));
        }
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e.iter()) {
                if k > 0 {
                    t = &t * &x.pow(k as u128);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Coefficients mapped into a larger field.
    pub fn embed(&self, emb: &FieldEmbedding) -> Result<SparsePoly> {
        if emb.base() != &self.field {
            return Err(Error::usage("embedding base differs from the polynomial field"));
        }
        Ok(SparsePoly {
            field: emb.ext().clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), emb.map(c)))
                .collect(),
        })
    }

    /// Substitute values for some variables and renumber the rest densely,
    /// as [`crate::ir::Circuit::restrict`] does for circuits.
    pub fn restrict(&self, assignment: &BTreeMap<usize, FieldElement>) -> Result<SparsePoly> {
        let map = crate::ir::restriction_map(self.nvars, &self.field, assignment)?;
        let nvars = map.iter().flatten().count();
        let mut out = Self::zero(&self.field, nvars);
        for (e, c) in &self.terms {
            let mut coef = c.clone();
            let mut ne: Monomial = SmallVec::from_elem(0, nvars);
            for (v, &k) in e.iter().enumerate() {
                match map[v] {
                    Some(j) => ne[j] = k,
                    None if k > 0 => coef = &coef * &assignment[&v].pow(k as u128),
                    None => {}
                }
            }
            out.add_term(ne, coef);
        }
        Ok(out)
    }

    /// Rename variable `i` to `map[i]` in a ring of `nvars` variables.
    pub fn remap_vars(&self, nvars: usize, map: &[usize]) -> Result<SparsePoly> {
        if map.len() != self.nvars || map.iter().any(|&j| j >= nvars) {
            return Err(Error::usage("variable map does not fit the target ring"));
        }
        let mut out = Self::zero(&self.field, nvars);
        for (e, c) in &self.terms {
            let mut ne: Monomial = SmallVec::from_elem(0, nvars);
            for (v, &k) in e.iter().enumerate() {
                ne[map[v]] += k;
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Terms in descending graded-lex order.
    pub fn graded_terms(&self) -> Vec<(&Monomial, &FieldElement)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|(a, _), (b, _)| {
            let da: u64 = a.iter().map(|&x| x as u64).sum();
            let db: u64 = b.iter().map(|&x| x as u64).sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        t
    }

    /// Field header, `nvars`, then one `[e1 ... en] : [c0 ...]` line per term.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\nnvars {}\n", self.field.header(), self.nvars);
        for (e, c) in self.graded_terms() {
            let exps: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("[{}] : {c}\n", exps.join(" ")));
        }
        out
    }

    pub fn parse(text: &str) -> Result<SparsePoly> {
        let lines = content_lines(text);
        let mut it = lines.into_iter();
        let (field, nvars, _) = parse_preamble(&mut it)?;
        let mut p = Self::zero(&field, nvars);
        for (ln, l) in it {
            let t = tokens(l).map_err(|e| Error::parse(ln, e))?;
            let [e, ":", c] = t.as_slice() else {
                return Err(Error::parse(ln, format!("expected `[exponents] : [coefficient]`, found `{l}`")));
            };
            let exps = crate::ff::parse_list(e)
                .ok_or_else(|| Error::parse(ln, format!("malformed exponent vector `{e}`")))?;
            if exps.len() != nvars {
                return Err(Error::parse(ln, format!("expected {nvars} exponents, found {}", exps.len())));
            }
            let exps: Monomial = exps
                .into_iter()
                .map(|x| u32::try_from(x).map_err(|_| Error::parse(ln, "exponent too large")))
                .collect::<Result<_>>()?;
            let c = field
                .parse_element(c)
                .map_err(|err| Error::parse(ln, err.to_string()))?;
            p.add_term(exps, c);
        }
        Ok(p)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.graded_terms().into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", fmt_term(e, c))?;
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn fmt_term(e: &[u32], c: &FieldElement) -> String {
    let vars: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
        .collect();
    if vars.is_empty() {
        format!("{c}")
    } else {
        format!("{c}*{}", vars.join("*"))
    }
}
