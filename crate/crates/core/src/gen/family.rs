//! Families `{g_d}` of `k`-variate polynomials with `deg g_d ≤ d`, queried
//! coefficient by coefficient.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};
use crate::poly::SparsePoly;

pub trait HardFamily: Send + Sync {
    fn field(&self) -> &Field;

    /// Number of variables `k`, fixed across the family.
    fn nvars(&self) -> usize;

    /// A short identifier recorded in generator provenance.
    fn name(&self) -> String;

    /// Coefficient of `x^e` in `g_d`.
    fn coefficient(&self, d: u64, e: &[u32]) -> FieldElement;

    /// `g_d`, assembled from [`HardFamily::coefficient`] over all monomials
    /// of total degree at most `d`.
    fn polynomial(&self, d: u64) -> Result<SparsePoly> {
        let k = self.nvars();
        let count = monomial_count(k, d);
        if count > 1_000_000 {
            return Err(Error::resource(format!(
                "g_{d} on {k} variables has {count} candidate monomials"
            )));
        }
        let mut terms = Vec::new();
        let mut e = vec![0u32; k];
        for_each_monomial(&mut e, 0, d, &mut |e| {
            let c = self.coefficient(d, e);
            if !c.is_zero() {
                terms.push((e.to_vec(), c));
            }
        });
        SparsePoly::from_terms(self.field(), k, terms)
    }
}

fn monomial_count(k: usize, d: u64) -> u128 {
    // C(d + k, k)
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = c.saturating_mul(d as u128 + i) / i;
    }
    c
}

fn for_each_monomial(e: &mut Vec<u32>, i: usize, left: u64, f: &mut impl FnMut(&[u32])) {
    if i == e.len() {
        f(e);
        return;
    }
    for x in 0..=left {
        e[i] = x as u32;
        for_each_monomial(e, i + 1, left - x, f);
    }
    e[i] = 0;
}

/// Pseudo-random coefficients: the coefficient of `x^e` in `g_d` is drawn
/// from a ChaCha stream keyed by `(seed, d)` and indexed by `e`.
#[derive(Clone, Debug)]
pub struct RandomFamily {
    field: Field,
    k: usize,
    seed: u64,
}

impl RandomFamily {
    pub fn new(field: Field, k: usize, seed: u64) -> RandomFamily {
        RandomFamily { field, k, seed }
    }
}

impl HardFamily for RandomFamily {
    fn field(&self) -> &Field {
        &self.field
    }

    fn nvars(&self) -> usize {
        self.k
    }

    fn name(&self) -> String {
        format!("random k {} seed {}", self.k, self.seed)
    }

    fn coefficient(&self, d: u64, e: &[u32]) -> FieldElement {
        if e.len() != self.k || e.iter().map(|&x| x as u64).sum::<u64>() > d {
            return self.field.zero();
        }
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&d.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        let index = e.iter().rev().fold(0u64, |acc, &x| acc.wrapping_mul(d + 1).wrapping_add(x as u64));
        rng.set_stream(index);
        self.field.random_element(&mut rng)
    }
}

/// `g_d = 0`.
#[derive(Clone, Debug)]
pub struct ZeroFamily {
    field: Field,
    k: usize,
}

impl ZeroFamily {
    pub fn new(field: Field, k: usize) -> ZeroFamily {
        ZeroFamily { field, k }
    }
}

impl HardFamily for ZeroFamily {
    fn field(&self) -> &Field {
        &self.field
    }

    fn nvars(&self) -> usize {
        self.k
    }

    fn name(&self) -> String {
        format!("zero k {}", self.k)
    }

    fn coefficient(&self, _d: u64, _e: &[u32]) -> FieldElement {
        self.field.zero()
    }

    fn polynomial(&self, _d: u64) -> Result<SparsePoly> {
        Ok(SparsePoly::zero(&self.field, self.k))
    }
}

/// `g_d = x_1^d`.
#[derive(Clone, Debug)]
pub struct PowerFamily {
    field: Field,
    k: usize,
}

impl PowerFamily {
    pub fn new(field: Field, k: usize) -> PowerFamily {
        PowerFamily { field, k }
    }
}

impl HardFamily for PowerFamily {
    fn field(&self) -> &Field {
        &self.field
    }

    fn nvars(&self) -> usize {
        self.k
    }

    fn name(&self) -> String {
        format!("power k {}", self.k)
    }

    fn coefficient(&self, d: u64, e: &[u32]) -> FieldElement {
        let hit = e.len() == self.k && e.first().map(|&x| x as u64) == Some(d) && e[1..].iter().all(|&x| x == 0);
        if hit {
            self.field.one()
        } else {
            self.field.zero()
        }
    }

    fn polynomial(&self, d: u64) -> Result<SparsePoly> {
        let mut e = vec![0u32; self.k];
        if let Some(x) = e.first_mut() {
            *x = u32::try_from(d).map_err(|_| Error::resource("degree does not fit 32 bits"))?;
        }
        SparsePoly::from_terms(&self.field, self.k, vec![(e, self.field.one())])
    }
}

/// One fixed polynomial, returned for every `d ≥ deg g`.
#[derive(Clone, Debug)]
pub struct FixedFamily {
    poly: SparsePoly,
}

impl FixedFamily {
    pub fn new(poly: SparsePoly) -> FixedFamily {
        FixedFamily { poly }
    }
}

impl HardFamily for FixedFamily {
    fn field(&self) -> &Field {
        self.poly.field()
    }

    fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    fn name(&self) -> String {
        format!("fixed {}", self.poly)
    }

    fn coefficient(&self, _d: u64, e: &[u32]) -> FieldElement {
        self.poly.coefficient(e)
    }

    fn polynomial(&self, d: u64) -> Result<SparsePoly> {
        match self.poly.degree() {
            Some(deg) if deg > d => Err(Error::domain(format!(
                "fixed polynomial has degree {deg}, above the requested {d}"
            ))),
            _ => Ok(self.poly.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_family_is_explicit() {
        let f = Field::new(2, 2).unwrap();
        let fam = RandomFamily::new(f.clone(), 2, 7);
        let g = fam.polynomial(5).unwrap();
        assert!(g.degree().unwrap_or(0) <= 5);
        for (e, c) in g.terms() {
            assert_eq!(&fam.coefficient(5, e), c);
        }
        assert_eq!(g, RandomFamily::new(f, 2, 7).polynomial(5).unwrap());
        assert_eq!(monomial_count(2, 5), 21);
    }

    #[test]
    fn simple_families() {
        let f = Field::prime(3).unwrap();
        assert!(ZeroFamily::new(f.clone(), 2).polynomial(4).unwrap().is_zero());
        let g = PowerFamily::new(f.clone(), 2).polynomial(4).unwrap();
        assert_eq!(g.coefficient(&[4, 0]), f.one());
        assert_eq!(g.num_terms(), 1);
        let fixed = FixedFamily::new(g.clone());
        assert!(fixed.polynomial(3).is_err());
        assert_eq!(fixed.polynomial(4).unwrap(), g);
    }
}
