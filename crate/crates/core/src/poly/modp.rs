//! The decomposition `f = Σ_{a ∈ [p]^n} f_a^p · x^a`.

use std::collections::BTreeMap;

use smallvec::SmallVec;

use super::{fmt_term, Monomial, SparsePoly};
use crate::error::{Error, Result};
use crate::ff::Field;

/// Components `f_a` indexed by type vectors `a ∈ {0..p-1}^n`. Zero
/// components are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPDecomposition {
    field: Field,
    nvars: usize,
    components: BTreeMap<Vec<u32>, SparsePoly>,
}

impl ModPDecomposition {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    /// `f_a` (zero when absent).
    pub fn component(&self, a: &[u32]) -> SparsePoly {
        self.components
            .get(a)
            .cloned()
            .unwrap_or_else(|| SparsePoly::zero(&self.field, self.nvars))
    }

    /// Non-zero components in lexicographic order of type vectors.
    pub fn components(&self) -> impl Iterator<Item = (&[u32], &SparsePoly)> {
        self.components.iter().map(|(a, f)| (a.as_slice(), f))
    }

    /// Replace one component.
    pub fn set_component(&mut self, a: Vec<u32>, f: SparsePoly) {
        if f.is_zero() {
            self.components.remove(&a);
        } else {
            self.components.insert(a, f);
        }
    }

    /// `Σ_a f_a^p · x^a`.
    pub fn recombine(&self) -> SparsePoly {
        let mut out = SparsePoly::zero(&self.field, self.nvars);
        for (a, f) in &self.components {
            for (e, c) in f.pth_power().terms() {
                let m: Monomial = e.iter().zip(a).map(|(x, y)| x + y).collect();
                out.add_term(m, c.clone());
            }
        }
        out
    }
}

/// Each term `α·x^e` goes to component `e mod p` as `α^{1/p}·x^{(e - e mod p)/p}`.
pub fn poly_mod_p_decompose(f: &SparsePoly) -> ModPDecomposition {
    let p = f.field().p() as u32;
    let n = f.nvars();
    let mut components: BTreeMap<Vec<u32>, SparsePoly> = BTreeMap::new();
    for (e, c) in f.terms() {
        let a: Vec<u32> = e.iter().map(|x| x % p).collect();
        let q: Monomial = e.iter().map(|x| x / p).collect();
        components
            .entry(a)
            .or_insert_with(|| SparsePoly::zero(f.field(), n))
            .add_term(q, c.pth_root());
    }
    ModPDecomposition {
        field: f.field().clone(),
        nvars: n,
        components,
    }
}

/// `g` with `g^p = f`; a domain error naming an offending term when `f` is
/// not a p-th power.
pub fn pth_root_poly(f: &SparsePoly) -> Result<SparsePoly> {
    let p = f.field().p() as u32;
    let mut g = SparsePoly::zero(f.field(), f.nvars());
    for (e, c) in f.terms() {
        if e.iter().any(|x| x % p != 0) {
            return Err(Error::domain(format!(
                "not a p-th power: term {} has an exponent not divisible by {p}",
                fmt_term(e, c)
            )));
        }
        let q: Monomial = e.iter().map(|x| x / p).collect::<SmallVec<_>>();
        g.add_term(q, c.pth_root());
    }
    Ok(g)
}
