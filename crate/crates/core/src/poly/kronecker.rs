//! The Kronecker map `y_{i,j} ↦ x_i^{b^j}` between polynomials of individual
//! degree below `b^K` in `m` variables and polynomials of individual degree
//! below `b` in `m·K` variables. Variable `y_{i,j}` has index `i·K + j`, with
//! `j = 0` the least significant digit.

use smallvec::SmallVec;

use super::{Monomial, SparsePoly};
use crate::error::{Error, Result};

/// Digit count `⌊log_b(ideg)⌋ + 1` (1 when `ideg` is 0).
pub fn kronecker_digits(ideg: u32, b: u32) -> u32 {
    let mut k = 1;
    let mut cap = b as u64;
    while cap <= ideg as u64 {
        cap *= b as u64;
        k += 1;
    }
    k
}

/// Encode `g` in base `b`. `digits` forces a digit count (it must satisfy
/// `b^K > ideg(g)`); otherwise the minimal one is used. Returns the encoded
/// polynomial and `K`.
pub fn kronecker_encode(g: &SparsePoly, b: u32, digits: Option<u32>) -> Result<(SparsePoly, u32)> {
    if b < 2 {
        return Err(Error::usage("Kronecker base must be at least 2"));
    }
    let need = kronecker_digits(g.ideg(), b);
    let k = match digits {
        Some(k) if k < need => {
            return Err(Error::domain(format!(
                "individual degree {} needs {need} base-{b} digits, {k} requested",
                g.ideg()
            )))
        }
        Some(k) => k,
        None => need,
    };
    let m = g.nvars();
    let ku = k as usize;
    let mut f = SparsePoly::zero(g.field(), m * ku);
    for (e, c) in g.terms() {
        let mut y: Monomial = SmallVec::from_elem(0, m * ku);
        for (i, &ei) in e.iter().enumerate() {
            let mut rest = ei;
            for j in 0..ku {
                y[i * ku + j] = rest % b;
                rest /= b;
            }
        }
        f.add_term(y, c.clone());
    }
    Ok((f, k))
}

/// Inverse of [`kronecker_encode`] for `f` on `m·K` variables with
/// individual degree at most `b - 1`.
pub fn kronecker_decode(f: &SparsePoly, b: u32, k: u32, m: usize) -> Result<SparsePoly> {
    let ku = k as usize;
    if b < 2 || k == 0 {
        return Err(Error::usage("Kronecker base must be at least 2 and digits at least 1"));
    }
    if f.nvars() != m * ku {
        return Err(Error::usage(format!(
            "decoding needs {} variables, polynomial has {}",
            m * ku,
            f.nvars()
        )));
    }
    if f.ideg() >= b {
        return Err(Error::domain(format!(
            "individual degree {} is not below the base {b}",
            f.ideg()
        )));
    }
    let mut g = SparsePoly::zero(f.field(), m);
    for (y, c) in f.terms() {
        let mut e: Monomial = SmallVec::from_elem(0, m);
        for i in 0..m {
            let mut v: u64 = 0;
            for j in (0..ku).rev() {
                v = v * b as u64 + y[i * ku + j] as u64;
            }
            e[i] = u32::try_from(v).map_err(|_| Error::resource("decoded exponent overflows"))?;
        }
        g.add_term(e, c.clone());
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::poly::tests::poly;

    #[test]
    fn cubic_in_base_two() {
        let f = Field::prime(5).unwrap();
        let g = poly(&f, 1, &[(&[3], 1), (&[2], 1), (&[0], 1)]);
        let (h, k) = kronecker_encode(&g, 2, None).unwrap();
        assert_eq!(k, 2);
        assert_eq!(h, poly(&f, 2, &[(&[1, 1], 1), (&[0, 1], 1), (&[0, 0], 1)]));
        assert_eq!(kronecker_decode(&h, 2, 2, 1).unwrap(), g);
    }

    #[test]
    fn eighth_power_in_base_three() {
        let f = Field::prime(2).unwrap();
        let g = poly(&f, 1, &[(&[8], 1)]);
        let (h, k) = kronecker_encode(&g, 3, None).unwrap();
        assert_eq!(k, 2);
        assert_eq!(h, poly(&f, 2, &[(&[2, 2], 1)]));
    }

    #[test]
    fn multilinear_is_fixed() {
        let f = Field::prime(3).unwrap();
        let g = poly(&f, 2, &[(&[1, 1], 2), (&[1, 0], 1)]);
        let (h, k) = kronecker_encode(&g, 2, None).unwrap();
        assert_eq!((h, k), (g.clone(), 1));
        let z = SparsePoly::zero(&f, 2);
        assert!(kronecker_decode(&z, 2, 1, 2).unwrap().is_zero());
    }

    #[test]
    fn domain_errors() {
        let f = Field::prime(3).unwrap();
        let g = poly(&f, 1, &[(&[4], 1)]);
        assert!(matches!(kronecker_encode(&g, 2, Some(2)), Err(Error::Domain(_))));
        assert!(matches!(kronecker_decode(&g, 2, 1, 1), Err(Error::Domain(_))));
        assert_eq!(kronecker_digits(0, 2), 1);
        assert_eq!(kronecker_digits(31, 2), 5);
        assert_eq!(kronecker_digits(32, 2), 6);
    }
}
