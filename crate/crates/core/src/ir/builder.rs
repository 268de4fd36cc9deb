use std::collections::HashMap;

use super::{Circuit, Gate, GateId};
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};
use crate::poly::SparsePoly;

/// Incremental construction of a [`Circuit`].
///
/// `input` and `constant` share gates; `fresh_input` and `fresh_constant`
/// always add a new leaf, which is what formula construction needs.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    field: Field,
    nvars: usize,
    gates: Vec<Gate>,
    inputs: Vec<Option<GateId>>,
    consts: HashMap<FieldElement, GateId>,
    one: FieldElement,
}

impl CircuitBuilder {
    pub fn new(field: Field, nvars: usize) -> CircuitBuilder {
        CircuitBuilder {
            one: field.one(),
            field,
            nvars,
            gates: Vec::new(),
            inputs: vec![None; nvars],
            consts: HashMap::new(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&mut self, g: Gate) -> GateId {
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn input(&mut self, var: usize) -> GateId {
        if let Some(id) = self.inputs[var] {
            return id;
        }
        let id = self.gate(Gate::Input(var));
        self.inputs[var] = Some(id);
        id
    }

    pub fn fresh_input(&mut self, var: usize) -> GateId {
        self.gate(Gate::Input(var))
    }

    pub fn constant(&mut self, c: FieldElement) -> GateId {
        if let Some(&id) = self.consts.get(&c) {
            return id;
        }
        let id = self.gate(Gate::Const(c.clone()));
        self.consts.insert(c, id);
        id
    }

    pub fn fresh_constant(&mut self, c: FieldElement) -> GateId {
        self.gate(Gate::Const(c))
    }

    pub fn add(&mut self, l: GateId, r: GateId) -> GateId {
        let one = self.one.clone();
        self.add_with(l, one.clone(), r, one)
    }

    pub fn add_with(&mut self, l: GateId, lc: FieldElement, r: GateId, rc: FieldElement) -> GateId {
        self.gate(Gate::Add { l, lc, r, rc })
    }

    pub fn mul(&mut self, l: GateId, r: GateId) -> GateId {
        let one = self.one.clone();
        self.mul_with(l, one.clone(), r, one)
    }

    pub fn mul_with(&mut self, l: GateId, lc: FieldElement, r: GateId, rc: FieldElement) -> GateId {
        self.gate(Gate::Mul { l, lc, r, rc })
    }

    /// `α·g`; returns `g` itself when `α = 1`.
    pub fn scale(&mut self, g: GateId, alpha: FieldElement) -> GateId {
        if alpha.is_one() {
            return g;
        }
        let zero = self.constant(self.field.zero());
        self.add_with(g, alpha, zero, self.one.clone())
    }

    /// Balanced binary sum of `Σ c_i g_i` (all `c_i` non-zero). The empty sum is 0.
    pub fn sum(&mut self, terms: &[(GateId, FieldElement)]) -> GateId {
        match terms {
            [] => self.constant(self.field.zero()),
            [(g, c)] => self.scale(*g, c.clone()),
            _ => {
                let mut level: Vec<(GateId, FieldElement)> = terms.to_vec();
                while level.len() > 1 {
                    let mut next = Vec::with_capacity(level.len().div_ceil(2));
                    for pair in level.chunks(2) {
                        match pair {
                            [(a, ca), (b, cb)] => {
                                let g = self.add_with(*a, ca.clone(), *b, cb.clone());
                                next.push((g, self.one.clone()));
                            }
                            [single] => next.push(single.clone()),
                            _ => unreachable!(),
                        }
                    }
                    level = next;
                }
                let (g, c) = level.pop().expect("non-empty");
                self.scale(g, c)
            }
        }
    }

    /// Balanced binary product. The empty product is 1.
    pub fn product(&mut self, factors: &[GateId]) -> GateId {
        if factors.is_empty() {
            return self.constant(self.field.one());
        }
        let mut level = factors.to_vec();
        while level.len() > 1 {
            level = level
                .chunks(2)
                .map(|pair| match pair {
                    [a, b] => self.mul(*a, *b),
                    [a] => *a,
                    _ => unreachable!(),
                })
                .collect();
        }
        level[0]
    }

    /// `g^e` by left-to-right square and multiply; `g^0` is the constant 1.
    pub fn power(&mut self, g: GateId, e: u64) -> GateId {
        if e == 0 {
            return self.constant(self.field.one());
        }
        let mut acc = g;
        for bit in (0..63 - e.leading_zeros()).rev() {
            acc = self.mul(acc, acc);
            if e >> bit & 1 == 1 {
                acc = self.mul(acc, g);
            }
        }
        acc
    }

    /// Sum of monomials computing `f`, with variable `i` read from `vars[i]`.
    pub fn polynomial(&mut self, f: &SparsePoly, vars: &[GateId]) -> Result<GateId> {
        if f.field() != &self.field || vars.len() != f.nvars() {
            return Err(Error::usage("polynomial has the wrong field or arity"));
        }
        let mut terms = Vec::with_capacity(f.num_terms());
        for (e, c) in f.terms() {
            let factors: Vec<GateId> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| self.power(vars[i], x as u64))
                .collect();
            let m = self.product(&factors);
            terms.push((m, c.clone()));
        }
        Ok(self.sum(&terms))
    }

    /// Copy the output cone of `c` with `Input(i)` replaced by `inputs[i]`.
    /// Returns the new id of every gate of `c` (`usize::MAX` outside the cone).
    pub fn splice(&mut self, c: &Circuit, inputs: &[GateId]) -> Result<Vec<GateId>> {
        if c.field() != &self.field || inputs.len() != c.nvars() {
            return Err(Error::usage("spliced circuit has the wrong field or arity"));
        }
        let live = c.cone();
        let mut ids = vec![usize::MAX; c.size()];
        for (i, g) in c.gates().iter().enumerate() {
            if !live[i] {
                continue;
            }
            ids[i] = match g {
                Gate::Input(v) => inputs[*v],
                Gate::Const(a) => self.constant(a.clone()),
                other => self.gate(super::remap_gate(other, &ids)),
            };
        }
        Ok(ids)
    }

    /// Copy the subtree of `c` rooted at `root` with fresh leaves and return
    /// the new root.
    pub fn copy_tree(&mut self, c: &Circuit, root: GateId) -> GateId {
        let gates = c.gates();
        // post-order traversal with an explicit stack
        let mut stack = vec![(root, false)];
        let mut done: Vec<GateId> = Vec::new();
        while let Some((g, expanded)) = stack.pop() {
            match &gates[g] {
                Gate::Input(v) => done.push(self.fresh_input(*v)),
                Gate::Const(a) => done.push(self.fresh_constant(a.clone())),
                Gate::Add { l, r, .. } | Gate::Mul { l, r, .. } => {
                    if expanded {
                        let rr = done.pop().expect("right child");
                        let ll = done.pop().expect("left child");
                        let mut copy = gates[g].clone();
                        if let Gate::Add { l, r, .. } | Gate::Mul { l, r, .. } = &mut copy {
                            *l = ll;
                            *r = rr;
                        }
                        done.push(self.gate(copy));
                    } else {
                        stack.push((g, true));
                        stack.push((*r, false));
                        stack.push((*l, false));
                    }
                }
            }
        }
        done.pop().expect("root")
    }

    pub fn finish(self, outputs: Vec<GateId>) -> Result<Circuit> {
        Circuit::new(self.field, self.nvars, self.gates, outputs)
    }
}
