//! Exact arithmetic in F_p and F_{p^m}.
//!
//! A [`Field`] is a shared handle to a [`FieldSpec`]: the characteristic `p`,
//! the extension degree `m` and a monic irreducible modulus of degree `m`.
//! Elements are coefficient vectors over F_p (low degree first) reduced
//! modulo that polynomial. Every finite field is perfect, so Frobenius is an
//! automorphism and [`FieldElement::pth_root`] always succeeds.

mod embed;
pub(crate) mod polyfp;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use embed::{ExtensionBasis, FieldEmbedding};

type Coeffs = SmallVec<[u32; 4]>;

/// Largest characteristic accepted; keeps every product of residues in a `u64`.
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;

#[derive(Debug)]
pub struct FieldSpec {
    p: u64,
    m: usize,
    /// `m + 1` coefficients, low degree first, leading coefficient 1.
    modulus: Vec<u64>,
    order: u64,
    primitive: OnceLock<Coeffs>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

/// Shared handle to a finite field.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldSpec>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Field {}

impl Field {
    /// F_{p^m} with the canonical (lexicographically smallest) modulus.
    pub fn new(p: u64, m: usize) -> Result<Field> {
        Self::check_params(p, m)?;
        let modulus = find_irreducible(p, m)?;
        Self::build(p, m, modulus)
    }

    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Field> {
        Self::new(p, 1)
    }

    /// F_p[x]/(modulus). The modulus is given low degree first and must be
    /// monic and irreducible; for degree one it is normalised to `x`.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Field> {
        if modulus.len() < 2 {
            return Err(Error::usage("modulus must have degree at least 1"));
        }
        let m = modulus.len() - 1;
        Self::check_params(p, m)?;
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::usage("modulus coefficients must be residues in [0, p)"));
        }
        if modulus[m] != 1 {
            return Err(Error::usage("modulus must be monic"));
        }
        if m == 1 {
            return Self::build(p, 1, vec![0, 1]);
        }
        if !polyfp::is_irreducible(modulus, p) {
            return Err(Error::usage(format!(
                "modulus {} is reducible over F_{p}",
                fmt_list(modulus)
            )));
        }
        Self::build(p, m, modulus.to_vec())
    }

    fn check_params(p: u64, m: usize) -> Result<()> {
        if !polyfp::is_prime(p) {
            return Err(Error::usage(format!("characteristic {p} is not prime")));
        }
        if p >= MAX_CHARACTERISTIC {
            return Err(Error::usage(format!("characteristic {p} too large")));
        }
        if m == 0 {
            return Err(Error::usage("extension degree must be at least 1"));
        }
        Ok(())
    }

    fn build(p: u64, m: usize, modulus: Vec<u64>) -> Result<Field> {
        let order = (0..m)
            .try_fold(1u64, |acc, _| acc.checked_mul(p))
            .filter(|&q| q < (1u64 << 62))
            .ok_or_else(|| Error::usage(format!("field F_{p}^{m} is too large")))?;
        Ok(Field(Arc::new(FieldSpec {
            p,
            m,
            modulus,
            order,
            primitive: OnceLock::new(),
        })))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0
    }

    /// Characteristic.
    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Extension degree over F_p.
    pub fn degree(&self) -> usize {
        self.0.m
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// Number of elements `p^m`.
    pub fn order(&self) -> u64 {
        self.0.order
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs: SmallVec::from_elem(0, self.0.m),
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = 1;
        e
    }

    /// Image of an integer under Z -> F_p -> F.
    pub fn from_int(&self, v: i64) -> FieldElement {
        let p = self.0.p as i64;
        let mut e = self.zero();
        e.coeffs[0] = v.rem_euclid(p) as u32;
        e
    }

    /// The class of `x` in F_p[x]/(modulus); for m = 1 this is 0.
    pub fn generator_x(&self) -> FieldElement {
        let mut e = self.zero();
        if self.0.m == 1 {
            // x ≡ 0 mod the normalised modulus x
            return e;
        }
        e.coeffs[1] = 1;
        e
    }

    /// Element from coefficients, low degree first. Shorter vectors are zero padded.
    pub fn element(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.0.m {
            return Err(Error::usage(format!(
                "element has {} coefficients, field degree is {}",
                coeffs.len(),
                self.0.m
            )));
        }
        let mut e = self.zero();
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.0.p {
                return Err(Error::usage(format!(
                    "coefficient {c} is not a residue mod {}",
                    self.0.p
                )));
            }
            e.coeffs[i] = c as u32;
        }
        Ok(e)
    }

    /// Element whose base-p digits (low first) are its coefficients.
    pub fn from_index(&self, mut idx: u64) -> FieldElement {
        let mut e = self.zero();
        for c in e.coeffs.iter_mut() {
            *c = (idx % self.0.p) as u32;
            idx /= self.0.p;
        }
        e
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.order).map(move |i| self.from_index(i))
    }

    /// The primitive element of smallest index.
    pub fn primitive_element(&self) -> FieldElement {
        let coeffs = self.0.primitive.get_or_init(|| {
            let q = self.0.order;
            if q == 2 {
                return self.one().coeffs;
            }
            let factors = polyfp::prime_factors((q - 1) as u128);
            for idx in 1..q {
                let g = self.from_index(idx);
                if factors.iter().all(|&r| !g.pow(((q - 1) as u128) / r).is_one()) {
                    return g.coeffs;
                }
            }
            unreachable!("multiplicative group of a finite field is cyclic")
        });
        FieldElement {
            field: self.clone(),
            coeffs: coeffs.clone(),
        }
    }

    /// The first `k` elements of the canonical order `0, 1, g, g^2, ...` for the
    /// primitive element `g`. These are distinct for `k <= |F|`.
    pub fn canonical_elements(&self, k: usize) -> Result<Vec<FieldElement>> {
        if (k as u128) > self.0.order as u128 {
            return Err(Error::usage(format!(
                "requested {k} distinct elements from a field of size {}",
                self.0.order
            )));
        }
        let mut out = Vec::with_capacity(k);
        if k == 0 {
            return Ok(out);
        }
        out.push(self.zero());
        let g = self.primitive_element();
        let mut cur = self.one();
        while out.len() < k {
            out.push(cur.clone());
            cur = &cur * &g;
        }
        Ok(out)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let mut e = self.zero();
        for c in e.coeffs.iter_mut() {
            *c = rng.random_range(0..self.0.p) as u32;
        }
        e
    }

    /// `field p <p> ext <m> modulus [<c0> ... <cm>]`
    pub fn header(&self) -> String {
        format!(
            "field p {} ext {} modulus {}",
            self.0.p,
            self.0.m,
            fmt_list(&self.0.modulus)
        )
    }

    /// Inverse of [`Field::header`]; `line` is the header without comments.
    pub fn parse_header(line: &str) -> Result<Field> {
        let bad = || Error::usage(format!("malformed field header `{line}`"));
        let rest = line.trim().strip_prefix("field").ok_or_else(bad)?;
        let mut toks = rest.split_whitespace();
        if toks.next() != Some("p") {
            return Err(bad());
        }
        let p: u64 = toks.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        if toks.next() != Some("ext") {
            return Err(bad());
        }
        let m: usize = toks.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        if toks.next() != Some("modulus") {
            return Err(bad());
        }
        let list = rest.find('[').map(|i| &rest[i..]).ok_or_else(bad)?;
        let modulus = parse_list(list).ok_or_else(bad)?;
        if modulus.len() != m + 1 {
            return Err(Error::usage(format!(
                "modulus has {} coefficients, expected {}",
                modulus.len(),
                m + 1
            )));
        }
        Self::with_modulus(p, &modulus)
    }

    /// Parse `[c0 c1 ...]` as an element.
    pub fn parse_element(&self, text: &str) -> Result<FieldElement> {
        let coeffs = parse_list(text.trim())
            .ok_or_else(|| Error::usage(format!("malformed element `{text}`")))?;
        self.element(&coeffs)
    }

    fn check_same(&self, other: &Field) -> Result<()> {
        if self != other {
            return Err(Error::usage(format!(
                "field mismatch: {} vs {}",
                self.header(),
                other.header()
            )));
        }
        Ok(())
    }
}

pub(crate) fn fmt_list(v: &[u64]) -> String {
    let inner: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    format!("[{}]", inner.join(" "))
}

/// Parse a bracketed whitespace-separated list of unsigned integers.
pub(crate) fn parse_list(text: &str) -> Option<Vec<u64>> {
    let inner = text.strip_prefix('[')?.strip_suffix(']')?;
    inner.split_whitespace().map(|t| t.parse().ok()).collect()
}

/// Lexicographically smallest monic irreducible polynomial of degree `m` over
/// F_p, coefficients low degree first (length `m + 1`).
pub fn find_irreducible(p: u64, m: usize) -> Result<Vec<u64>> {
    if !polyfp::is_prime(p) {
        return Err(Error::usage(format!("characteristic {p} is not prime")));
    }
    if m == 0 {
        return Err(Error::usage("extension degree must be at least 1"));
    }
    Ok(polyfp::smallest_irreducible(p, m))
}

/// Deterministic uniform element for a seed.
pub fn random_element(field: &Field, seed: u64) -> FieldElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    field.random_element(&mut rng)
}

/// An element of a finite field.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    coeffs: Coeffs,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Residues, low degree first; always `degree()` entries.
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeffs_u64(&self) -> Vec<u64> {
        self.coeffs.iter().map(|&c| c as u64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Position in the index order (`sum c_i p^i`).
    pub fn index(&self) -> u64 {
        let p = self.field.p();
        self.coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c as u64)
    }

    pub fn pow(&self, mut exp: u128) -> FieldElement {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.field.order() as u128 - 2))
    }

    /// `a^p`.
    pub fn frobenius(&self) -> FieldElement {
        if self.field.degree() == 1 {
            return self.clone();
        }
        self.pow(self.field.p() as u128)
    }

    /// The unique `b` with `b^p = a`, computed as `a^(p^(m-1))`.
    pub fn pth_root(&self) -> FieldElement {
        let mut out = self.clone();
        for _ in 1..self.field.degree() {
            out = out.frobenius();
        }
        out
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.field.check_same(&other.field)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.field.check_same(&other.field)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.field.check_same(&other.field)?;
        Ok(self * other)
    }

    fn add_impl(&self, other: &FieldElement, negate: bool) -> FieldElement {
        assert!(self.field == other.field, "field mismatch in arithmetic");
        let p = self.field.p();
        let mut out = self.clone();
        for (a, &b) in out.coeffs.iter_mut().zip(other.coeffs.iter()) {
            let b = if negate { (p - b as u64) % p } else { b as u64 };
            *a = ((*a as u64 + b) % p) as u32;
        }
        out
    }

    fn mul_impl(&self, other: &FieldElement) -> FieldElement {
        assert!(self.field == other.field, "field mismatch in arithmetic");
        let spec = &self.field.0;
        let p = spec.p;
        let m = spec.m;
        if m == 1 {
            let v = (self.coeffs[0] as u64 * other.coeffs[0] as u64) % p;
            return FieldElement {
                field: self.field.clone(),
                coeffs: SmallVec::from_elem(v as u32, 1),
            };
        }
        let mut prod: SmallVec<[u64; 8]> = SmallVec::from_elem(0, 2 * m - 1);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u64 * b as u64) % p;
            }
        }
        for i in (m..2 * m - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            let shift = i - m;
            for (j, &mc) in spec.modulus[..m].iter().enumerate() {
                prod[shift + j] = (prod[shift + j] + (p - c) * mc) % p;
            }
        }
        FieldElement {
            field: self.field.clone(),
            coeffs: prod[..m].iter().map(|&c| c as u32).collect(),
        }
    }
}

/// Binary and unary field operations for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
}

/// Checked arithmetic entry point: mismatched fields are usage errors and
/// inverting zero is a division-by-zero error.
pub fn field_arith(op: FieldOp, a: &FieldElement, b: Option<&FieldElement>) -> Result<FieldElement> {
    let rhs = || b.ok_or_else(|| Error::usage(format!("{op:?} needs two operands")));
    match op {
        FieldOp::Add => a.checked_add(rhs()?),
        FieldOp::Sub => a.checked_sub(rhs()?),
        FieldOp::Mul => a.checked_mul(rhs()?),
        FieldOp::Inv => a.inv(),
        FieldOp::Neg => Ok(-a),
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    /// Index order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.iter().rev().cmp(other.coeffs.iter().rev())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::ops::Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.add_impl(rhs, false)
    }
}

impl std::ops::Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.add_impl(rhs, true)
    }
}

impl std::ops::Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.mul_impl(rhs)
    }
}

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.zero().add_impl(self, true)
    }
}

impl std::ops::AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        *self = self.add_impl(rhs, false);
    }
}
