use std::collections::BTreeMap;

use super::Generator;
use crate::error::{Error, Result};
use crate::ff::{FieldElement, FieldEmbedding};
use crate::ir::{Circuit, CircuitBuilder, GateId};
use crate::poly::{expand_circuit, ExpandCaps, SparsePoly};

/// Outcome of locating the hybrid where `f` stops surviving the generator.
#[derive(Clone, Debug)]
pub struct Hybrid {
    /// 1-based `i` with `f_{i-1} ≠ 0` and `f_i = 0`.
    pub index: usize,
    /// `f_{i-1}` with every variable except `y_i` and `z|_{S_i}` fixed; its
    /// variables are `y_i` followed by the seed variables of `S_i` in order.
    pub restricted: Circuit,
    /// Values given to the other variables, indexed in `[y_1..y_n, z_1..z_ℓ]`.
    pub assignment: BTreeMap<usize, FieldElement>,
    /// Expansion of `restricted`.
    pub restricted_poly: SparsePoly,
}

/// `f_i = f(G_1(z), ..., G_i(z), y_{i+1}, ..., y_n)` on the variables
/// `[y_1..y_n, z_1..z_ℓ]`.
pub fn hybrid_circuit(f: &Circuit, g: &Generator, i: usize) -> Result<Circuit> {
    let n = g.nvars_out();
    if f.nvars() != n || i > n {
        return Err(Error::usage("hybrid needs f on the generator's outputs and i ≤ n"));
    }
    let mut b = CircuitBuilder::new(f.field().clone(), n + g.seed_len);
    let z: Vec<GateId> = (0..g.seed_len).map(|j| b.input(n + j)).collect();
    let mut inputs = Vec::with_capacity(n);
    for j in 0..n {
        if j < i {
            let comp = &g.components[j];
            let o = comp.single_output()?;
            inputs.push(b.splice(comp, &z)?[o]);
        } else {
            inputs.push(b.input(j));
        }
    }
    let ids = b.splice(f, &inputs)?;
    let out = f.single_output()?;
    b.finish(vec![ids[out]])
}

fn expand_one(c: &Circuit, caps: &ExpandCaps) -> Result<SparsePoly> {
    Ok(expand_circuit(c, caps)?.remove(0))
}

/// Find `i` with `f_{i-1} ≠ 0` and `f_i = 0`, then fix every variable other
/// than `y_i` and `z|_{S_i}` so that `f_{i-1}` stays non-zero. Values come
/// from a grid of `deg + 1` canonical elements, in an extension field when
/// the base field is too small. Both postconditions are checked by
/// expansion.
pub fn hybrid_index(f: &Circuit, g: &Generator, caps: &ExpandCaps) -> Result<Hybrid> {
    let n = g.nvars_out();
    if f.field() != g.field() {
        return Err(Error::usage("circuit and generator live over different fields"));
    }
    if expand_one(f, caps)?.is_zero() {
        return Err(Error::domain("f is the zero polynomial"));
    }
    if !expand_one(&g.compose(f)?, caps)?.is_zero() {
        return Err(Error::domain("f∘G is non-zero; the generator hits f"));
    }
    let mut prev = expand_one(&hybrid_circuit(f, g, 0)?, caps)?;
    let mut index = None;
    for i in 1..=n {
        let cur = expand_one(&hybrid_circuit(f, g, i)?, caps)?;
        if cur.is_zero() {
            index = Some(i);
            break;
        }
        prev = cur;
    }
    let i = index.ok_or_else(|| Error::Internal("no hybrid vanishes although f∘G = 0".into()))?;

    let deg = prev.degree().unwrap_or(0);
    let emb = FieldEmbedding::extension_with_at_least(f.field(), deg + 1)?;
    let grid = emb.ext().canonical_elements(deg as usize + 1)?;
    let mut poly = prev.embed(&emb)?;
    let keep_z: Vec<usize> = g.sets[i - 1].iter().map(|&s| n + s - 1).collect();
    let others: Vec<usize> = (0..n + g.seed_len)
        .filter(|&v| v != i - 1 && !keep_z.contains(&v))
        .collect();
    // `poly` is renumbered after each restriction; track current positions
    let mut position: Vec<usize> = (0..n + g.seed_len).collect();
    let mut assignment = BTreeMap::new();
    for &v in &others {
        let at = position[v];
        let mut chosen = None;
        for a in &grid {
            let r = poly.restrict(&BTreeMap::from([(at, a.clone())]))?;
            if !r.is_zero() {
                chosen = Some((a.clone(), r));
                break;
            }
        }
        let Some((a, r)) = chosen else {
            return Err(Error::Internal(format!(
                "no grid value for variable {v} keeps f_{} non-zero (grid of {} points, degree {deg})",
                i - 1,
                grid.len()
            )));
        };
        poly = r;
        assignment.insert(v, a);
        for p in position.iter_mut().skip(v + 1) {
            *p -= 1;
        }
    }

    let prev_circuit = hybrid_circuit(f, g, i - 1)?.embed(&emb)?;
    let (restricted, _) = prev_circuit.restrict(&assignment)?;
    let restricted_poly = expand_one(&restricted, caps)?;
    if restricted_poly.is_zero() || restricted_poly != poly {
        return Err(Error::Integrity("restricted hybrid does not match its expansion".into()));
    }
    let (vanishing, _) = hybrid_circuit(f, g, i)?.embed(&emb)?.restrict(&assignment)?;
    if !expand_one(&vanishing, caps)?.is_zero() {
        return Err(Error::Integrity("restricted f_i with y_i replaced by G_i is non-zero".into()));
    }
    Ok(Hybrid {
        index: i,
        restricted,
        assignment,
        restricted_poly,
    })
}
