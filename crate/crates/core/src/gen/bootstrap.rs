use num_bigint::BigUint;

use super::{ki_generator, Generator, HardFamily};
use crate::designs::rs_design;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct BootstrapParams {
    /// Variables of the family.
    pub k: usize,
    /// `k` padded with dummy variables up to a prime power.
    pub k_padded: usize,
    /// Design exponent; 3 unless the design capacity forced it higher.
    pub c: usize,
    pub escalated: bool,
    pub n: usize,
    pub r: usize,
    pub s: u64,
    /// `d = s^k`
    pub d: u64,
    pub seed_len: usize,
    /// `|S| = s·d + 1`
    pub set_size: u64,
    /// `|S|^ℓ`, the size of the hitting set built from the generator.
    #[serde(serialize_with = "as_decimal")]
    pub hitting_set_size: BigUint,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug)]
pub struct Bootstrap {
    pub generator: Generator,
    pub params: BootstrapParams,
}

fn is_prime_power(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
    let mut rest = q;
    while rest.is_multiple_of(p) {
        rest /= p;
    }
    rest == 1
}

fn pad_to_prime_power(k: usize) -> usize {
    (k..).find(|&q| is_prime_power(q)).expect("prime powers are unbounded")
}

/// Generator `z ↦ (g_d(z|_{S_1}), ..., g_d(z|_{S_n}))` with `d = s^k`,
/// `n = 2k⁴` and an RS design with `m = k`, `r = 2` and `c = 3`, raised
/// to the smallest `c` with `k^{2(c-1)} ≥ n` when the design is too small.
/// Since `k^4 < 2k^4`, that always means `c = 4` and seed length `k^4`.
pub fn bootstrap_generator(family: &dyn HardFamily, s: u64) -> Result<Bootstrap> {
    let k = family.nvars();
    if k == 0 {
        return Err(Error::usage("the family needs at least one variable"));
    }
    if s < 1 {
        return Err(Error::usage("size parameter s must be at least 1"));
    }
    let kp = pad_to_prime_power(k);
    let r = 2;
    let n = 2 * kp.pow(4);
    let mut c = 3;
    while kp.pow((r * (c - 1)) as u32) < n {
        c += 1;
    }
    let d = s
        .checked_pow(kp as u32)
        .ok_or_else(|| Error::resource("d = s^k overflows"))?;
    let g = family.polynomial(d)?;
    let g = if kp > k {
        let map: Vec<usize> = (0..k).collect();
        g.remap_vars(kp, &map)?
    } else {
        g
    };
    let design = rs_design(n, kp, c, r)?;
    let mut generator = ki_generator(&g, n, &design)?;
    generator.degree = d;
    let set_size = s * d + 1;
    let seed_len = design.ell;
    let params = BootstrapParams {
        k,
        k_padded: kp,
        c,
        escalated: c != 3,
        n,
        r,
        s,
        d,
        seed_len,
        set_size,
        hitting_set_size: BigUint::from(set_size).pow(seed_len as u32),
    };
    generator.provenance = vec![
        format!("bootstrap generator, family {}", family.name()),
        format!(
            "k {} (padded {}) s {s} d {d} n {n} r {r} c {c}{}",
            k,
            kp,
            if params.escalated { " (escalated from 3)" } else { "" }
        ),
    ];
    Ok(Bootstrap { generator, params })
}
