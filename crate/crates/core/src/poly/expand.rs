use super::SparsePoly;
use crate::error::{Error, Result};
use crate::ir::{Abp, Circuit, Device, EdgeLabel, Gate};

/// Limits on brute-force expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpandCaps {
    /// Largest admissible syntactic degree.
    pub max_degree: u64,
    /// Largest admissible number of terms in any intermediate polynomial.
    pub max_terms: usize,
}

impl Default for ExpandCaps {
    fn default() -> Self {
        ExpandCaps {
            max_degree: 64,
            max_terms: 1_000_000,
        }
    }
}

fn check_degree(deg: u64, caps: &ExpandCaps) -> Result<()> {
    if deg > caps.max_degree {
        return Err(Error::resource(format!(
            "syntactic degree {deg} exceeds the degree cap {}",
            caps.max_degree
        )));
    }
    Ok(())
}

fn check_terms(p: &SparsePoly, caps: &ExpandCaps) -> Result<()> {
    if p.num_terms() > caps.max_terms {
        return Err(Error::resource(format!(
            "expansion has {} terms, above the term cap {}",
            p.num_terms(),
            caps.max_terms
        )));
    }
    Ok(())
}

/// The polynomial of every output of a circuit. Only the output cone is
/// expanded, and intermediate polynomials are dropped after their last use.
pub fn expand_circuit(c: &Circuit, caps: &ExpandCaps) -> Result<Vec<SparsePoly>> {
    check_degree(c.metrics().degree_bound, caps)?;
    let field = c.field();
    let n = c.nvars();
    let live = c.cone();
    let mut remaining = vec![0usize; c.size()];
    for (i, g) in c.gates().iter().enumerate() {
        if live[i] {
            if let Some((l, r)) = g.children() {
                remaining[l] += 1;
                remaining[r] += 1;
            }
        }
    }
    for &o in c.outputs() {
        remaining[o] += 1;
    }
    let mut vals: Vec<Option<SparsePoly>> = vec![None; c.size()];
    let take = |vals: &mut Vec<Option<SparsePoly>>, remaining: &mut Vec<usize>, i: usize| -> SparsePoly {
        remaining[i] -= 1;
        if remaining[i] == 0 {
            vals[i].take().expect("gate value")
        } else {
            vals[i].clone().expect("gate value")
        }
    };
    for (i, g) in c.gates().iter().enumerate() {
        if !live[i] {
            continue;
        }
        let v = match g {
            Gate::Input(v) => SparsePoly::var(field, n, *v),
            Gate::Const(a) => SparsePoly::constant(field, n, a.clone()),
            Gate::Add { l, lc, r, rc } => {
                let a = take(&mut vals, &mut remaining, *l).scale(lc);
                let b = take(&mut vals, &mut remaining, *r).scale(rc);
                a.add(&b)?
            }
            Gate::Mul { l, lc, r, rc } => {
                let a = take(&mut vals, &mut remaining, *l).scale(&(lc * rc));
                let b = take(&mut vals, &mut remaining, *r);
                a.mul_capped(&b, caps.max_terms)?
            }
        };
        check_terms(&v, caps)?;
        vals[i] = Some(v);
    }
    Ok(c.outputs()
        .iter()
        .map(|&o| vals[o].clone().expect("output value"))
        .collect())
}

/// The polynomial at every sink of a branching program.
pub fn expand_abp(a: &Abp, caps: &ExpandCaps) -> Result<Vec<SparsePoly>> {
    check_degree(a.metrics().degree_bound, caps)?;
    let field = a.field();
    let n = a.nvars();
    let mut inc = vec![Vec::new(); a.nvertices()];
    for (k, e) in a.edges().iter().enumerate() {
        inc[e.to].push(k);
    }
    let mut vals = vec![SparsePoly::zero(field, n); a.nvertices()];
    vals[a.source()] = SparsePoly::constant(field, n, field.one());
    for &v in a.topological_order() {
        if v == a.source() {
            continue;
        }
        let mut acc = SparsePoly::zero(field, n);
        for &k in &inc[v] {
            let e = &a.edges()[k];
            let term = match &e.label {
                EdgeLabel::Const(c) => vals[e.from].scale(c),
                EdgeLabel::VarMul(c, i) => vals[e.from]
                    .scale(c)
                    .mul_capped(&SparsePoly::var(field, n, *i), caps.max_terms)?,
            };
            acc = acc.add(&term)?;
        }
        check_terms(&acc, caps)?;
        vals[v] = acc;
    }
    Ok(a.sinks().iter().map(|&s| vals[s].clone()).collect())
}

/// The polynomials computed by any device, one per output or sink.
pub fn expand(d: &Device, caps: &ExpandCaps) -> Result<Vec<SparsePoly>> {
    match d {
        Device::Circuit(c) => expand_circuit(c, caps),
        Device::Formula(f) => expand_circuit(f.circuit(), caps),
        Device::Abp(a) => expand_abp(a, caps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::ir::{parse_device, CircuitBuilder};
    use crate::poly::tests::poly;

    #[test]
    fn square_plus_one_over_f2() {
        let f = Field::prime(2).unwrap();
        let mut b = CircuitBuilder::new(f.clone(), 1);
        let x = b.input(0);
        let one = b.constant(f.one());
        let s = b.add(x, one);
        let c = b.finish(vec![s]).unwrap().build_power(2).unwrap();
        let e = expand_circuit(&c, &ExpandCaps::default()).unwrap();
        assert_eq!(e[0], poly(&f, 1, &[(&[2], 1), (&[0], 1)]));
    }

    #[test]
    fn example_file_expansion() {
        let text = "field p 2 ext 1 modulus [0 1]\nnvars 2\nkind circuit\ngate 0 input 0\ngate 1 const [1]\ngate 2 add 0 [1] 1 [1]\ngate 3 mul 2 [1] 2 [1]\noutput 3\n";
        let d = parse_device(text).unwrap();
        let f = d.field().clone();
        assert_eq!(expand(&d, &ExpandCaps::default()).unwrap()[0], poly(&f, 2, &[(&[2, 0], 1), (&[0, 0], 1)]));
    }

    #[test]
    fn zero_constant_expands_to_zero() {
        let f = Field::prime(3).unwrap();
        let mut b = CircuitBuilder::new(f.clone(), 2);
        let z = b.constant(f.zero());
        let c = b.finish(vec![z]).unwrap();
        assert!(expand_circuit(&c, &ExpandCaps::default()).unwrap()[0].is_zero());
    }

    #[test]
    fn caps_are_resource_errors() {
        let f = Field::prime(2).unwrap();
        let mut b = CircuitBuilder::new(f.clone(), 1);
        let x = b.input(0);
        let c = b.finish(vec![x]).unwrap().build_power(100).unwrap();
        let err = expand_circuit(&c, &ExpandCaps::default()).unwrap_err();
        assert!(err.is_resource() && err.to_string().contains("degree"));
        let mut b = CircuitBuilder::new(f.clone(), 4);
        let xs: Vec<_> = (0..4).map(|i| b.input(i)).collect();
        let one = b.constant(f.one());
        let terms: Vec<_> = xs.iter().chain([&one]).map(|&g| (g, f.one())).collect();
        let s = b.sum(&terms);
        let c = b.finish(vec![s]).unwrap().build_power(7).unwrap();
        let caps = ExpandCaps { max_degree: 64, max_terms: 50 };
        let err = expand_circuit(&c, &caps).unwrap_err();
        assert!(err.is_resource() && err.to_string().contains("term cap"));
    }
}
