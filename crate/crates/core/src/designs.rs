//! Combinatorial designs: families of `m`-subsets of `[ℓ]` with small
//! pairwise intersections.
//!
//! File format:
//!
//! ```text
//! design ell 9 n 9 m 3 rmax 2
//! # rs-design c 2 r 2
//! 1 4 7
//! ...
//! ```

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ff::Field;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Design {
    pub ell: usize,
    pub m: usize,
    pub r_max: usize,
    /// Sorted sets with elements in `1..=ell`.
    pub sets: Vec<Vec<usize>>,
    /// How the design was built, kept as the comment line of the file.
    pub construction: String,
}

impl Design {
    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// Exhaustive check of the set sizes, the element range and every
    /// pairwise intersection.
    pub fn verify(&self) -> Result<()> {
        let words = self.ell.div_ceil(64).max(1);
        let mut bits = vec![0u64; words * self.sets.len()];
        for (i, s) in self.sets.iter().enumerate() {
            if s.len() != self.m {
                return Err(Error::Integrity(format!("set {} has {} elements, expected {}", i + 1, s.len(), self.m)));
            }
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Integrity(format!("set {} is not strictly increasing", i + 1)));
            }
            for &x in s {
                if x == 0 || x > self.ell {
                    return Err(Error::Integrity(format!("set {} has element {x} outside 1..={}", i + 1, self.ell)));
                }
                bits[i * words + (x - 1) / 64] |= 1 << ((x - 1) % 64);
            }
        }
        let row = |i: usize| &bits[i * words..(i + 1) * words];
        let bad = (0..self.sets.len()).into_par_iter().find_map_first(|i| {
            (i + 1..self.sets.len()).find_map(|j| {
                let common: u32 = row(i).iter().zip(row(j)).map(|(a, b)| (a & b).count_ones()).sum();
                (common as usize > self.r_max).then_some((i, j, common))
            })
        });
        match bad {
            Some((i, j, c)) => Err(Error::Integrity(format!(
                "sets {} and {} share {c} elements, more than {}",
                i + 1,
                j + 1,
                self.r_max
            ))),
            None => Ok(()),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "design ell {} n {} m {} rmax {}\n# {}\n",
            self.ell,
            self.n(),
            self.m,
            self.r_max,
            self.construction
        );
        for s in &self.sets {
            let line: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse a design file and verify it.
    pub fn parse(text: &str) -> Result<Design> {
        let mut construction = String::new();
        let mut lines = text.lines().enumerate().filter_map(|(i, l)| {
            let l = l.trim();
            if let Some(c) = l.strip_prefix('#') {
                if construction.is_empty() {
                    construction = c.trim().to_string();
                }
                return None;
            }
            (!l.is_empty()).then_some((i + 1, l.to_string()))
        });
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty design file"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(ln, format!("expected an integer, found `{s}`")));
        let (ell, n, m, r_max) = match h.as_slice() {
            ["design", "ell", a, "n", b, "m", c, "rmax", d] => (num(a)?, num(b)?, num(c)?, num(d)?),
            _ => return Err(Error::parse(ln, "expected `design ell <ℓ> n <n> m <m> rmax <r>`")),
        };
        let mut sets = Vec::with_capacity(n);
        for (ln, l) in lines.by_ref() {
            let set = l
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| Error::parse(ln, format!("expected an integer, found `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            sets.push(set);
        }
        drop(lines);
        if sets.len() != n {
            return Err(Error::parse(ln, format!("header announces {n} sets, found {}", sets.len())));
        }
        let d = Design {
            ell,
            m,
            r_max,
            sets,
            construction,
        };
        d.verify()?;
        Ok(d)
    }
}

/// `(p, e)` with `q = p^e`, if `q` is a prime power.
fn prime_power(q: usize) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p as u64, e))
}

/// Reed-Solomon design: the sets are graphs `{(a, q(a)) : a ∈ F_m}` of
/// tuples `q = (q_1..q_{c-1})` of polynomials of degree below `r`, taken in
/// lexicographic order of their coefficient vectors. The point
/// `(a, b_1..b_{c-1})` is the element `1 + idx(a) + Σ_t idx(b_t)·m^t`.
pub fn rs_design(n: usize, m: usize, c: usize, r: usize) -> Result<Design> {
    if c < 1 {
        return Err(Error::usage("rs design: c must be at least 1"));
    }
    let ell = m
        .checked_pow(c as u32)
        .ok_or_else(|| Error::usage("rs design: ℓ = m^c overflows"))?;
    if r > m {
        return Err(Error::usage(format!("rs design: condition r ≤ m fails ({r} > {m})")));
    }
    let Some((p, e)) = prime_power(m) else {
        return Err(Error::usage(format!("rs design: condition `m is a prime power` fails (m = {m})")));
    };
    let capacity = m.checked_pow(((c - 1) * r) as u32);
    if capacity.is_none_or(|cap| n > cap) {
        return Err(Error::usage(format!(
            "rs design: condition n ≤ m^((c-1)r) fails ({n} > {m}^{})",
            (c - 1) * r
        )));
    }
    let field = Field::new(p, e)?;
    let elems: Vec<_> = (0..m as u64).map(|i| field.from_index(i)).collect();
    let coeffs_per_set = (c - 1) * r;
    let mut sets = Vec::with_capacity(n);
    let mut digits = vec![0usize; coeffs_per_set];
    for i in 0..n {
        // lexicographic: most significant coefficient first
        let mut t = i;
        for d in digits.iter_mut().rev() {
            *d = t % m;
            t /= m;
        }
        let mut set: Vec<usize> = elems
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                let mut x = 1 + ai;
                let mut weight = m;
                for q in digits.chunks(r.max(1)) {
                    // q[j] is the coefficient of a^j; Horner from the top
                    let mut v = field.zero();
                    for &cj in q.iter().rev() {
                        v = &(&v * a) + &elems[cj];
                    }
                    x += v.index() as usize * weight;
                    weight *= m;
                }
                x
            })
            .collect();
        set.sort_unstable();
        sets.push(set);
    }
    let d = Design {
        ell,
        m,
        r_max: r,
        sets,
        construction: format!("rs-design c {c} r {r}; point (a,b) -> 1 + idx(a) + sum idx(b_t) m^t"),
    };
    d.verify()?;
    Ok(d)
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Scan `m`-subsets of `[ell]` in lexicographic order and accept every one
/// meeting all accepted sets in at most `r_max` elements. A prefix is
/// abandoned as soon as it meets some accepted set in more than `r_max`
/// elements, which never skips an acceptable subset.
fn greedy_scan(n: usize, m: usize, ell: usize, r_max: usize) -> Vec<Vec<usize>> {
    let mut accepted: Vec<Vec<bool>> = Vec::new();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut prefix: Vec<usize> = Vec::with_capacity(m);
    // next candidate element for the current depth
    let mut next = 1usize;
    loop {
        if sets.len() == n {
            return sets;
        }
        if prefix.len() == m {
            let mut mask = vec![false; ell + 1];
            for &x in &prefix {
                mask[x] = true;
            }
            accepted.push(mask);
            sets.push(prefix.clone());
            counts.push(m);
        } else if next + (m - prefix.len()) <= ell + 1 {
            let x = next;
            let ok = accepted.iter().zip(&counts).all(|(a, &c)| c + usize::from(a[x]) <= r_max);
            if ok {
                prefix.push(x);
                for (a, c) in accepted.iter().zip(counts.iter_mut()) {
                    *c += usize::from(a[x]);
                }
            }
            next = x + 1;
            continue;
        }
        // backtrack
        let Some(x) = prefix.pop() else {
            return sets;
        };
        for (a, c) in accepted.iter().zip(counts.iter_mut()) {
            *c -= usize::from(a[x]);
        }
        next = x + 1;
    }
}

/// Greedy design with `r_max = ⌈log₂ n⌉`. `ℓ` starts at `ell_hint` or
/// `max(m, ⌈4m²/⌈log₂ n⌉⌉)` and doubles until `n` sets are found.
pub fn greedy_design(n: usize, m: usize, ell_hint: Option<usize>) -> Result<Design> {
    if m < usize::BITS as usize && n >= 1usize << m {
        return Err(Error::usage(format!("greedy design needs n < 2^m (n = {n}, m = {m})")));
    }
    if m == 0 {
        return Err(Error::usage("greedy design needs m ≥ 1"));
    }
    let r_max = ceil_log2(n);
    let mut ell = ell_hint.unwrap_or_else(|| m.max((4 * m * m).div_ceil(r_max.max(1))));
    ell = ell.max(m);
    loop {
        let sets = greedy_scan(n, m, ell, r_max);
        if sets.len() == n {
            let d = Design {
                ell,
                m,
                r_max,
                sets,
                construction: "greedy-design lexicographic scan".into(),
            };
            d.verify()?;
            return Ok(d);
        }
        ell = ell
            .checked_mul(2)
            .ok_or_else(|| Error::resource("greedy design: ℓ overflow"))?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rs_small_cases() {
        let d = rs_design(9, 3, 2, 2).unwrap();
        assert_eq!((d.ell, d.n(), d.m), (9, 9, 3));
        assert_eq!(d.sets[0], vec![1, 2, 3]);
        let d = rs_design(16, 2, 3, 2).unwrap();
        assert_eq!((d.ell, d.n()), (8, 16));
        let d = rs_design(1, 4, 2, 1).unwrap();
        assert_eq!(d.n(), 1);
        assert_eq!(rs_design(9, 3, 2, 2).unwrap(), rs_design(9, 3, 2, 2).unwrap());
    }

    #[test]
    fn rs_conditions() {
        assert!(rs_design(4, 6, 2, 1).unwrap_err().to_string().contains("prime power"));
        assert!(rs_design(4, 3, 2, 4).unwrap_err().to_string().contains("r ≤ m"));
        assert!(rs_design(10, 3, 2, 2).unwrap_err().to_string().contains("n ≤"));
    }

    #[test]
    fn greedy_small_cases() {
        let d = greedy_design(2, 3, None).unwrap();
        assert_eq!(d.r_max, 1);
        let d = greedy_design(16, 8, None).unwrap();
        assert_eq!(d.r_max, 4);
        assert!(d.ell <= 64);
        assert!(matches!(greedy_design(8, 3, None), Err(Error::Usage(_))));
    }

    #[test]
    fn greedy_doubles_when_too_small() {
        let d = greedy_design(3, 3, Some(3)).unwrap();
        assert!(d.ell > 3);
        assert_eq!(d.n(), 3);
    }

    #[test]
    fn text_round_trip() {
        let d = rs_design(9, 3, 2, 2).unwrap();
        let back = Design::parse(&d.to_text()).unwrap();
        assert_eq!(back, d);
        let mut bad = d.clone();
        bad.sets[1] = bad.sets[0].clone();
        assert!(matches!(Design::parse(&bad.to_text()), Err(Error::Integrity(_))));
    }
}
