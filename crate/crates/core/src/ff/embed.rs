//! Field embeddings F_{p^a} -> F_{p^b} (a | b) and coordinates with respect to
//! a power basis of the larger field over the smaller.

use super::{Field, FieldElement};
use crate::error::{Error, Result};

/// An injective field homomorphism from `base` into `ext`, fixed by the image
/// of the class of `x` in `base`.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    base: Field,
    ext: Field,
    image: FieldElement,
}

impl FieldEmbedding {
    pub fn new(base: &Field, ext: &Field) -> Result<FieldEmbedding> {
        if base.p() != ext.p() || !ext.degree().is_multiple_of(base.degree()) {
            return Err(Error::usage(format!(
                "F_{}^{} does not embed in F_{}^{}",
                base.p(),
                base.degree(),
                ext.p(),
                ext.degree()
            )));
        }
        if base.degree() == 1 {
            return Ok(FieldEmbedding {
                base: base.clone(),
                ext: ext.clone(),
                image: ext.zero(),
            });
        }
        // The subfield of size q_b is {0} ∪ <ζ> with ζ = γ^((q_e-1)/(q_b-1)).
        let q_b = base.order() as u128;
        let q_e = ext.order() as u128;
        let zeta = ext.primitive_element().pow((q_e - 1) / (q_b - 1));
        let mut cand = ext.one();
        for _ in 0..q_b - 1 {
            if eval_univariate(base.modulus(), &cand).is_zero() {
                return Ok(FieldEmbedding {
                    base: base.clone(),
                    ext: ext.clone(),
                    image: cand,
                });
            }
            cand = &cand * &zeta;
        }
        Err(Error::Internal("no root of the base modulus in the subfield".into()))
    }

    /// `base` itself when `min_size <= |base|`, otherwise the smallest
    /// extension F_{p^{km}} with at least `min_size` elements.
    pub fn extension_with_at_least(base: &Field, min_size: u64) -> Result<FieldEmbedding> {
        let mut k = 1usize;
        let (p, m) = (base.p(), base.degree());
        loop {
            let size = (p as u128).checked_pow((k * m) as u32);
            match size {
                Some(s) if s >= min_size as u128 => break,
                Some(_) => k += 1,
                None => return Err(Error::resource("extension field too large")),
            }
        }
        let ext = if k == 1 { base.clone() } else { Field::new(p, k * m)? };
        FieldEmbedding::new(base, &ext)
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn ext(&self) -> &Field {
        &self.ext
    }

    pub fn is_identity(&self) -> bool {
        self.base == self.ext
    }

    pub fn map(&self, a: &FieldElement) -> FieldElement {
        assert!(a.field() == &self.base, "element is not in the embedding's base field");
        if self.is_identity() {
            return a.clone();
        }
        let coeffs: Vec<u64> = a.coeffs_u64();
        if self.base.degree() == 1 {
            return self.ext.from_int(coeffs[0] as i64);
        }
        let mut acc = self.ext.zero();
        for &c in coeffs.iter().rev() {
            acc = &(&acc * &self.image) + &self.ext.from_int(c as i64);
        }
        acc
    }
}

fn eval_univariate(coeffs: &[u64], x: &FieldElement) -> FieldElement {
    let f = x.field();
    let mut acc = f.zero();
    for &c in coeffs.iter().rev() {
        acc = &(&acc * x) + &f.from_int(c as i64);
    }
    acc
}

/// The power basis `1, θ, ..., θ^{k-1}` of `ext` over the image of `base`,
/// with `θ` the class of `x` in `ext`.
#[derive(Clone, Debug)]
pub struct ExtensionBasis {
    embedding: FieldEmbedding,
    k: usize,
    basis: Vec<FieldElement>,
    /// Inverse of the F_p-linear map `(c_{j,t}) -> Σ_j embed(x^t) θ^j`, row major.
    inverse: Vec<Vec<u64>>,
}

impl ExtensionBasis {
    pub fn new(base: &Field, ext: &Field) -> Result<ExtensionBasis> {
        let embedding = FieldEmbedding::new(base, ext)?;
        let k = ext.degree() / base.degree();
        let theta = if ext.degree() == 1 { ext.one() } else { ext.generator_x() };
        let mut basis = Vec::with_capacity(k);
        let mut cur = ext.one();
        for _ in 0..k {
            basis.push(cur.clone());
            cur = &cur * &theta;
        }
        let mb = base.degree();
        let dim = ext.degree();
        let p = ext.p();
        // column (j, t) holds the coordinates of embed(x^t) θ^j
        let mut cols = Vec::with_capacity(dim);
        for b in &basis {
            for t in 0..mb {
                let xt = base.generator_x().pow(t as u128);
                cols.push((&embedding.map(&xt) * b).coeffs_u64());
            }
        }
        let a: Vec<Vec<u64>> = (0..dim).map(|r| (0..dim).map(|c| cols[c][r]).collect()).collect();
        let inverse = invert_mod_p(a, p)
            .ok_or_else(|| Error::Internal("power basis is not a basis".into()))?;
        Ok(ExtensionBasis {
            embedding,
            k,
            basis,
            inverse,
        })
    }

    pub fn embedding(&self) -> &FieldEmbedding {
        &self.embedding
    }

    /// Degree `k` of the extension.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    /// Coordinates `c_0..c_{k-1}` over the base with `a = Σ c_j θ^j`.
    pub fn coordinates(&self, a: &FieldElement) -> Vec<FieldElement> {
        let base = self.embedding.base();
        let p = base.p();
        let y = a.coeffs_u64();
        let sol: Vec<u64> = self
            .inverse
            .iter()
            .map(|row| row.iter().zip(&y).fold(0u64, |acc, (&r, &v)| (acc + r * v) % p))
            .collect();
        sol.chunks(base.degree())
            .map(|c| base.element(c).expect("residues"))
            .collect()
    }

    /// `Σ embed(c_j) θ^j`.
    pub fn combine(&self, coords: &[FieldElement]) -> FieldElement {
        let mut acc = self.embedding.ext().zero();
        for (c, b) in coords.iter().zip(&self.basis) {
            acc += &(&self.embedding.map(c) * b);
        }
        acc
    }
}

/// Gauss-Jordan inverse over F_p.
fn invert_mod_p(mut a: Vec<Vec<u64>>, p: u64) -> Option<Vec<Vec<u64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let s = super::polyfp::pow_mod(a[col][col], p - 2, p);
        for j in 0..n {
            a[col][j] = a[col][j] * s % p;
            inv[col][j] = inv[col][j] * s % p;
        }
        for r in 0..n {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let f = a[r][col];
            for j in 0..n {
                a[r][j] = (a[r][j] + (p - f) * a[col][j]) % p;
                inv[r][j] = (inv[r][j] + (p - f) * inv[col][j]) % p;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_is_a_homomorphism() {
        for (p, a, b) in [(2, 1, 3), (2, 2, 4), (3, 1, 2), (3, 2, 4), (2, 3, 6)] {
            let base = Field::new(p, a).unwrap();
            let ext = Field::new(p, b).unwrap();
            let e = FieldEmbedding::new(&base, &ext).unwrap();
            for x in base.elements() {
                for y in base.elements() {
                    assert_eq!(e.map(&(&x + &y)), &e.map(&x) + &e.map(&y));
                    assert_eq!(e.map(&(&x * &y)), &e.map(&x) * &e.map(&y));
                }
            }
            assert!(e.map(&base.one()).is_one());
        }
    }

    #[test]
    fn coordinates_roundtrip() {
        for (p, a, b) in [(2, 1, 2), (3, 1, 2), (2, 2, 4), (2, 1, 3)] {
            let base = Field::new(p, a).unwrap();
            let ext = Field::new(p, b).unwrap();
            let basis = ExtensionBasis::new(&base, &ext).unwrap();
            for y in ext.elements() {
                let c = basis.coordinates(&y);
                assert_eq!(c.len(), b / a);
                assert_eq!(basis.combine(&c), y);
            }
        }
    }

    #[test]
    fn omega_coordinates() {
        let f2 = Field::prime(2).unwrap();
        let f4 = Field::new(2, 2).unwrap();
        let basis = ExtensionBasis::new(&f2, &f4).unwrap();
        let c = basis.coordinates(&f4.generator_x());
        assert!(c[0].is_zero() && c[1].is_one());
    }

    #[test]
    fn extension_sizes() {
        let f2 = Field::prime(2).unwrap();
        let e = FieldEmbedding::extension_with_at_least(&f2, 3).unwrap();
        assert_eq!(e.ext().order(), 4);
        let e = FieldEmbedding::extension_with_at_least(&f2, 2).unwrap();
        assert!(e.is_identity());
        let f4 = Field::new(2, 2).unwrap();
        let e = FieldEmbedding::extension_with_at_least(&f4, 5).unwrap();
        assert_eq!(e.ext().order(), 16);
    }
}
