//! Hitting-set generators built from combinatorial designs and hard
//! polynomial families, and hitting sets obtained by evaluating them on
//! grids.
//!
//! Generator file:
//!
//! ```text
//! generator seed 3 n 2 degree 1
//! # provenance lines
//! design ell 3 n 2 m 2 rmax 1
//! 1 2
//! 2 3
//! ---
//! <component circuits, separated by --->
//! ```

mod bootstrap;
mod family;
mod hitting;
mod hybrid;

use crate::designs::Design;
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement, FieldEmbedding};
use crate::ir::{parse_devices, serialize_devices, Circuit, CircuitBuilder, Device, Gate, GateId};
use crate::poly::{kronecker_encode, SparsePoly};

pub use bootstrap::{bootstrap_generator, Bootstrap, BootstrapParams};
pub use family::{FixedFamily, HardFamily, PowerFamily, RandomFamily, ZeroFamily};
pub use hitting::{hitting_set_from_generator, HittingSet, HittingSetOptions, HittingSetProvenance};
pub use hybrid::{hybrid_circuit, hybrid_index, Hybrid};

/// A polynomial map `F^ℓ → F^n` given by one circuit per output coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub seed_len: usize,
    pub components: Vec<Circuit>,
    /// Upper bound on the degree of every component.
    pub degree: u64,
    /// Seed variables (1-based) each component reads.
    pub sets: Vec<Vec<usize>>,
    pub design: Option<Design>,
    pub provenance: Vec<String>,
}

impl Generator {
    /// Generator from explicit components; `sets` are their variable supports.
    pub fn from_components(seed_len: usize, components: Vec<Circuit>) -> Result<Generator> {
        let Some(first) = components.first() else {
            return Err(Error::usage("a generator needs at least one component"));
        };
        let field = first.field().clone();
        let mut sets = Vec::with_capacity(components.len());
        let mut degree = 0;
        for (i, c) in components.iter().enumerate() {
            if c.field() != &field || c.nvars() != seed_len {
                return Err(Error::usage(format!("component {} has the wrong field or arity", i + 1)));
            }
            c.single_output()?;
            degree = degree.max(c.metrics().degree_bound);
            sets.push(support(c));
        }
        Ok(Generator {
            seed_len,
            components,
            degree,
            sets,
            design: None,
            provenance: Vec::new(),
        })
    }

    /// `G(z) = z`, whose grid hitting sets are plain cubes `S^n`.
    pub fn identity(field: &Field, n: usize) -> Result<Generator> {
        let components = (0..n)
            .map(|i| {
                let mut b = CircuitBuilder::new(field.clone(), n);
                let x = b.input(i);
                b.finish(vec![x])
            })
            .collect::<Result<Vec<_>>>()?;
        let mut g = Generator::from_components(n, components)?;
        g.provenance.push("identity generator".into());
        Ok(g)
    }

    pub fn field(&self) -> &Field {
        self.components[0].field()
    }

    pub fn nvars_out(&self) -> usize {
        self.components.len()
    }

    pub fn evaluate(&self, seed: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.components
            .iter()
            .map(|c| Ok(c.evaluate(seed)?.remove(0)))
            .collect()
    }

    /// The same generator over a larger field.
    pub fn embed(&self, emb: &FieldEmbedding) -> Result<Generator> {
        let mut g = self.clone();
        g.components = self.components.iter().map(|c| c.embed(emb)).collect::<Result<_>>()?;
        Ok(g)
    }

    /// `f ∘ G`, a circuit on the seed variables of size
    /// `|f| + Σ |component|`.
    pub fn compose(&self, f: &Circuit) -> Result<Circuit> {
        if f.nvars() != self.nvars_out() {
            return Err(Error::usage(format!(
                "circuit has {} variables, generator has {} outputs",
                f.nvars(),
                self.nvars_out()
            )));
        }
        f.compose(&self.components)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "generator seed {} n {} degree {}\n",
            self.seed_len,
            self.nvars_out(),
            self.degree
        );
        for p in &self.provenance {
            out.push_str(&format!("# {p}\n"));
        }
        if let Some(d) = &self.design {
            out.push_str(&d.to_text());
        }
        out.push_str("---\n");
        let devices: Vec<Device> = self.components.iter().cloned().map(Device::Circuit).collect();
        out.push_str(&serialize_devices(&devices, &[]));
        out
    }

    pub fn parse(text: &str) -> Result<Generator> {
        let lines: Vec<&str> = text.lines().collect();
        let split = lines
            .iter()
            .position(|l| l.trim() == "---")
            .ok_or_else(|| Error::parse(0, "generator file has no component section"))?;
        let head: Vec<(usize, &str)> = lines[..split]
            .iter()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let Some(&(ln, first)) = head.first() else {
            return Err(Error::parse(1, "empty generator file"));
        };
        let h: Vec<&str> = first.split_whitespace().collect();
        let num = |s: &str| s.parse::<u64>().map_err(|_| Error::parse(ln, format!("expected an integer, found `{s}`")));
        let (seed_len, n, degree) = match h.as_slice() {
            ["generator", "seed", a, "n", b, "degree", c] => (num(a)? as usize, num(b)? as usize, num(c)?),
            _ => return Err(Error::parse(ln, "expected `generator seed <ℓ> n <n> degree <D>`")),
        };
        let mut provenance = Vec::new();
        let mut rest = head[1..].iter().peekable();
        while let Some((_, l)) = rest.peek() {
            match l.strip_prefix('#') {
                Some(c) => {
                    provenance.push(c.trim().to_string());
                    rest.next();
                }
                None => break,
            }
        }
        let design_text: Vec<&str> = rest.map(|(_, l)| *l).collect();
        let design = if design_text.is_empty() {
            None
        } else {
            Some(Design::parse(&design_text.join("\n"))?)
        };
        // line numbers in the component section are relative to it
        let body = lines[split + 1..].join("\n");
        let components = parse_devices(&body)?
            .into_iter()
            .map(|d| d.to_circuit())
            .collect::<Result<Vec<_>>>()?;
        if components.len() != n {
            return Err(Error::parse(ln, format!("header announces {n} components, found {}", components.len())));
        }
        let mut g = Generator::from_components(seed_len, components)?;
        if g.degree > degree {
            return Err(Error::Integrity(format!(
                "component degree bound {} exceeds the declared degree {degree}",
                g.degree
            )));
        }
        g.degree = degree;
        if let Some(d) = &design {
            if d.ell != seed_len || d.n() < n {
                return Err(Error::usage("embedded design does not match the generator"));
            }
            g.sets = d.sets[..n].to_vec();
        }
        g.design = design;
        g.provenance = provenance;
        Ok(g)
    }
}

/// Seed variables (1-based) reachable from the output of `c`.
fn support(c: &Circuit) -> Vec<usize> {
    let live = c.pruned();
    let mut vars: Vec<usize> = live
        .gates()
        .iter()
        .filter_map(|g| match g {
            Gate::Input(i) => Some(i + 1),
            _ => None,
        })
        .collect();
    vars.sort_unstable();
    vars.dedup();
    vars
}

/// Multilinear `h_d` on `k(⌊log₂ d⌋ + 1)` variables: `g_d` encoded in base 2.
pub fn hard_multilinear_from_family(family: &dyn HardFamily, d: u64) -> Result<SparsePoly> {
    let g = family.polynomial(d)?;
    let digits = 64 - d.max(1).leading_zeros();
    Ok(kronecker_encode(&g, 2, Some(digits))?.0)
}

/// `G(z) = (h(z|_{S_1}), ..., h(z|_{S_n}))`: variable `j` of `h` reads the
/// `j`-th smallest element of `S_i`.
pub fn ki_generator(h: &SparsePoly, n: usize, design: &Design) -> Result<Generator> {
    if design.m != h.nvars() {
        return Err(Error::usage(format!(
            "design sets have {} elements, the polynomial has {} variables",
            design.m,
            h.nvars()
        )));
    }
    if design.n() < n {
        return Err(Error::usage(format!("design has {} sets, {n} requested", design.n())));
    }
    let mut components = Vec::with_capacity(n);
    for set in &design.sets[..n] {
        let mut b = CircuitBuilder::new(h.field().clone(), design.ell);
        let vars: Vec<GateId> = set.iter().map(|&s| b.input(s - 1)).collect();
        let out = b.polynomial(h, &vars)?;
        components.push(b.finish(vec![out])?.pruned());
    }
    Ok(Generator {
        seed_len: design.ell,
        components,
        degree: h.degree().unwrap_or(0),
        sets: design.sets[..n].to_vec(),
        design: Some(Design {
            sets: design.sets[..n].to_vec(),
            ..design.clone()
        }),
        provenance: vec![format!("ki generator: {} terms in h, {}", h.num_terms(), design.construction)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::rs_design;
    use crate::poly::{expand_circuit, ExpandCaps};
    use rand::SeedableRng;

    #[test]
    fn multilinear_encoding() {
        let f = Field::prime(2).unwrap();
        let g = SparsePoly::from_terms(&f, 1, vec![(vec![3], f.one()), (vec![2], f.one()), (vec![0], f.one())]).unwrap();
        let h = hard_multilinear_from_family(&FixedFamily::new(g), 3).unwrap();
        let want = SparsePoly::from_terms(
            &f,
            2,
            vec![(vec![1, 1], f.one()), (vec![0, 1], f.one()), (vec![0, 0], f.one())],
        )
        .unwrap();
        assert_eq!(h, want);
        let lin = SparsePoly::from_terms(&f, 2, vec![(vec![1, 0], f.one()), (vec![0, 1], f.one())]).unwrap();
        assert_eq!(hard_multilinear_from_family(&FixedFamily::new(lin.clone()), 1).unwrap(), lin);
        let fam = RandomFamily::new(Field::prime(3).unwrap(), 2, 1);
        let h = hard_multilinear_from_family(&fam, 9).unwrap();
        assert_eq!(h.nvars(), 2 * 4);
        assert!(h.ideg() <= 1);
    }

    #[test]
    fn two_set_generator() {
        let f = Field::prime(5).unwrap();
        let h = SparsePoly::from_terms(&f, 2, vec![(vec![1, 0], f.one()), (vec![0, 1], f.one())]).unwrap();
        let design = Design {
            ell: 3,
            m: 2,
            r_max: 1,
            sets: vec![vec![1, 2], vec![2, 3]],
            construction: "hand".into(),
        };
        let g = ki_generator(&h, 2, &design).unwrap();
        let caps = ExpandCaps::default();
        let z = |i| SparsePoly::var(&f, 3, i);
        assert_eq!(expand_circuit(&g.components[0], &caps).unwrap()[0], z(0).add(&z(1)).unwrap());
        assert_eq!(expand_circuit(&g.components[1], &caps).unwrap()[0], z(1).add(&z(2)).unwrap());
        let back = Generator::parse(&g.to_text()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn components_agree_with_restrictions() {
        let f = Field::prime(3).unwrap();
        let fam = RandomFamily::new(f.clone(), 2, 4);
        let h = hard_multilinear_from_family(&fam, 3).unwrap();
        assert_eq!(h.nvars(), 4);
        let design = rs_design(9, 4, 2, 2).unwrap();
        let g = ki_generator(&h, 9, &design).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let seed: Vec<_> = (0..g.seed_len).map(|_| f.random_element(&mut rng)).collect();
            let out = g.evaluate(&seed).unwrap();
            for (i, set) in design.sets.iter().enumerate() {
                let sub: Vec<_> = set.iter().map(|&s| seed[s - 1].clone()).collect();
                assert_eq!(out[i], h.eval(&sub).unwrap());
            }
        }
    }
}
