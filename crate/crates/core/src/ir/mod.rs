//! Circuits, formulae and algebraic branching programs.
//!
//! All three devices compute multivariate polynomials over a [`Field`]. A
//! [`Circuit`] is a topologically ordered list of fan-in-2 gates whose edges
//! carry non-zero scalars: `Add` computes `lc·l + rc·r` and `Mul` computes
//! `(lc·l)·(rc·r)`. A [`Formula`] is a single-output circuit whose gates all
//! have fan-out one. An [`Abp`] is an edge-labelled DAG.

mod abp;
mod builder;
pub mod random;
pub(crate) mod text;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement, FieldEmbedding};
use crate::poly::SparsePoly;

pub use abp::{Abp, Edge, EdgeLabel};
pub use builder::CircuitBuilder;
pub use text::{parse_device, parse_devices, serialize_devices};

pub type GateId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Input(usize),
    Const(FieldElement),
    Add {
        l: GateId,
        lc: FieldElement,
        r: GateId,
        rc: FieldElement,
    },
    Mul {
        l: GateId,
        lc: FieldElement,
        r: GateId,
        rc: FieldElement,
    },
}

impl Gate {
    pub fn children(&self) -> Option<(GateId, GateId)> {
        match self {
            Gate::Add { l, r, .. } | Gate::Mul { l, r, .. } => Some((*l, *r)),
            _ => None,
        }
    }
}

/// Size, product depth and syntactic degree of a device.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Metrics {
    pub size: usize,
    pub product_depth: usize,
    pub degree_bound: u64,
}

/// A point of F^n.
pub type Point = Vec<FieldElement>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    field: Field,
    nvars: usize,
    gates: Vec<Gate>,
    outputs: Vec<GateId>,
}

impl Circuit {
    pub fn new(field: Field, nvars: usize, gates: Vec<Gate>, outputs: Vec<GateId>) -> Result<Circuit> {
        let c = Circuit {
            field,
            nvars,
            gates,
            outputs,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.outputs.is_empty() {
            return Err(Error::usage("circuit has no outputs"));
        }
        for (i, g) in self.gates.iter().enumerate() {
            match g {
                Gate::Input(v) => {
                    if *v >= self.nvars {
                        return Err(Error::usage(format!(
                            "gate {i}: variable {v} out of range (nvars {})",
                            self.nvars
                        )));
                    }
                }
                Gate::Const(c) => {
                    if c.field() != &self.field {
                        return Err(Error::usage(format!("gate {i}: constant from another field")));
                    }
                }
                Gate::Add { l, lc, r, rc } | Gate::Mul { l, lc, r, rc } => {
                    if *l >= i || *r >= i {
                        return Err(Error::usage(format!("gate {i}: child does not precede it")));
                    }
                    for c in [lc, rc] {
                        if c.field() != &self.field {
                            return Err(Error::usage(format!("gate {i}: coefficient from another field")));
                        }
                        if c.is_zero() {
                            return Err(Error::usage(format!("gate {i}: zero edge coefficient")));
                        }
                    }
                }
            }
        }
        if let Some(o) = self.outputs.iter().find(|&&o| o >= self.gates.len()) {
            return Err(Error::usage(format!("output {o} is not a gate")));
        }
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[GateId] {
        &self.outputs
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// The single output; a usage error for multi-output circuits.
    pub fn single_output(&self) -> Result<GateId> {
        match self.outputs.as_slice() {
            [o] => Ok(*o),
            _ => Err(Error::usage(format!(
                "expected a single-output circuit, found {} outputs",
                self.outputs.len()
            ))),
        }
    }

    /// Same gates with a different output list.
    pub fn with_outputs(&self, outputs: Vec<GateId>) -> Result<Circuit> {
        Circuit::new(self.field.clone(), self.nvars, self.gates.clone(), outputs)
    }

    fn check_point(&self, point: &[FieldElement]) -> Result<()> {
        if point.len() != self.nvars {
            return Err(Error::usage(format!(
                "point has {} coordinates, device has {} variables",
                point.len(),
                self.nvars
            )));
        }
        if let Some(c) = point.iter().find(|c| c.field() != &self.field) {
            return Err(Error::usage(format!("coordinate {c} lies in another field")));
        }
        Ok(())
    }

    /// Value of every output at `point`.
    pub fn evaluate(&self, point: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.check_point(point)?;
        let vals = self.gate_values(point);
        Ok(self.outputs.iter().map(|&o| vals[o].clone()).collect())
    }

    /// Value of every gate at `point` (unchecked arity).
    pub(crate) fn gate_values(&self, point: &[FieldElement]) -> Vec<FieldElement> {
        let mut vals: Vec<FieldElement> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g {
                Gate::Input(i) => point[*i].clone(),
                Gate::Const(c) => c.clone(),
                Gate::Add { l, lc, r, rc } => &(lc * &vals[*l]) + &(rc * &vals[*r]),
                Gate::Mul { l, lc, r, rc } => &(lc * &vals[*l]) * &(rc * &vals[*r]),
            };
            vals.push(v);
        }
        vals
    }

    /// Product depth and syntactic degree of every gate.
    pub(crate) fn gate_depths(&self) -> (Vec<usize>, Vec<u64>) {
        let mut depth: Vec<usize> = Vec::with_capacity(self.gates.len());
        let mut deg: Vec<u64> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let (d, e) = match g {
                Gate::Input(_) => (0, 1),
                Gate::Const(_) => (0, 0),
                Gate::Add { l, r, .. } => (depth[*l].max(depth[*r]), deg[*l].max(deg[*r])),
                Gate::Mul { l, r, .. } => (
                    depth[*l].max(depth[*r]) + 1,
                    u64::saturating_add(deg[*l], deg[*r]),
                ),
            };
            depth.push(d);
            deg.push(e);
        }
        (depth, deg)
    }

    /// Size, and the maxima of product depth and syntactic degree over the outputs.
    pub fn metrics(&self) -> Metrics {
        let (depth, deg) = self.gate_depths();
        Metrics {
            size: self.gates.len(),
            product_depth: self.outputs.iter().map(|&o| depth[o]).max().unwrap_or(0),
            degree_bound: self.outputs.iter().map(|&o| deg[o]).max().unwrap_or(0),
        }
    }

    /// Gates reachable from the outputs.
    pub(crate) fn cone(&self) -> Vec<bool> {
        let mut live = vec![false; self.gates.len()];
        for &o in &self.outputs {
            live[o] = true;
        }
        for i in (0..self.gates.len()).rev() {
            if live[i] {
                if let Some((l, r)) = self.gates[i].children() {
                    live[l] = true;
                    live[r] = true;
                }
            }
        }
        live
    }

    /// Drop gates outside the output cone, keeping relative order.
    pub fn pruned(&self) -> Circuit {
        let live = self.cone();
        let mut remap = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            remap[i] = gates.len();
            gates.push(remap_gate(g, &remap));
        }
        Circuit {
            field: self.field.clone(),
            nvars: self.nvars,
            gates,
            outputs: self.outputs.iter().map(|&o| remap[o]).collect(),
        }
    }

    /// Sum-of-monomials circuit for `f`.
    pub fn from_poly(f: &SparsePoly) -> Result<Circuit> {
        let mut b = CircuitBuilder::new(f.field().clone(), f.nvars());
        let vars: Vec<GateId> = (0..f.nvars()).map(|i| b.input(i)).collect();
        let out = b.polynomial(f, &vars)?;
        Ok(b.finish(vec![out])?.pruned())
    }

    /// Circuit computing `f^e` for the single output `f`, by left-to-right
    /// square and multiply (at most `2⌊log₂ e⌋` added gates).
    pub fn build_power(&self, e: u64) -> Result<Circuit> {
        if e == 0 {
            return Err(Error::usage("exponent must be at least 1; use a Const(1) gate for f^0"));
        }
        let f = self.single_output()?;
        let one = self.field.one();
        let mut gates = self.gates.clone();
        let mut acc = f;
        let bits = 64 - e.leading_zeros();
        for b in (0..bits - 1).rev() {
            gates.push(Gate::Mul {
                l: acc,
                lc: one.clone(),
                r: acc,
                rc: one.clone(),
            });
            acc = gates.len() - 1;
            if (e >> b) & 1 == 1 {
                gates.push(Gate::Mul {
                    l: acc,
                    lc: one.clone(),
                    r: f,
                    rc: one.clone(),
                });
                acc = gates.len() - 1;
            }
        }
        Circuit::new(self.field.clone(), self.nvars, gates, vec![acc])
    }

    /// Replace assigned variables by constants and renumber the rest densely.
    /// The returned map sends each old variable to its new index, if any.
    pub fn restrict(&self, assignment: &BTreeMap<usize, FieldElement>) -> Result<(Circuit, Vec<Option<usize>>)> {
        let map = restriction_map(self.nvars, &self.field, assignment)?;
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Input(i) => match map[*i] {
                    Some(j) => Gate::Input(j),
                    None => Gate::Const(assignment[i].clone()),
                },
                other => other.clone(),
            })
            .collect();
        let nvars = map.iter().flatten().count();
        Ok((
            Circuit::new(self.field.clone(), nvars, gates, self.outputs.clone())?,
            map,
        ))
    }

    /// `self ∘ (inner_1, ..., inner_n)`: every `Input(i)` of `self` is replaced
    /// by the spliced single-output circuit `inner[i]`.
    pub fn compose(&self, inner: &[Circuit]) -> Result<Circuit> {
        if inner.len() != self.nvars {
            return Err(Error::usage(format!(
                "composition needs {} inner circuits, got {}",
                self.nvars,
                inner.len()
            )));
        }
        let Some(first) = inner.first() else {
            return Ok(self.clone());
        };
        let nvars = first.nvars;
        let mut b = CircuitBuilder::new(self.field.clone(), nvars);
        let inputs: Vec<GateId> = (0..nvars).map(|i| b.input(i)).collect();
        let mut images = Vec::with_capacity(inner.len());
        for c in inner {
            if c.field != self.field || c.nvars != nvars {
                return Err(Error::usage("inner circuits must share field and arity"));
            }
            let o = c.single_output()?;
            images.push(b.splice(c, &inputs)?[o]);
        }
        let ids = b.splice(self, &images)?;
        let outputs = self.outputs.iter().map(|&o| ids[o]).collect();
        b.finish(outputs)
    }

    /// The same circuit with constants mapped into a larger field.
    pub fn embed(&self, emb: &FieldEmbedding) -> Result<Circuit> {
        if emb.base() != &self.field {
            return Err(Error::usage("embedding base differs from the circuit field"));
        }
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Input(i) => Gate::Input(*i),
                Gate::Const(c) => Gate::Const(emb.map(c)),
                Gate::Add { l, lc, r, rc } => Gate::Add {
                    l: *l,
                    lc: emb.map(lc),
                    r: *r,
                    rc: emb.map(rc),
                },
                Gate::Mul { l, lc, r, rc } => Gate::Mul {
                    l: *l,
                    lc: emb.map(lc),
                    r: *r,
                    rc: emb.map(rc),
                },
            })
            .collect();
        Circuit::new(emb.ext().clone(), self.nvars, gates, self.outputs.clone())
    }

    /// Fan-out of every gate, counting outputs as one use each.
    pub(crate) fn fan_out(&self) -> Vec<usize> {
        let mut fo = vec![0usize; self.gates.len()];
        for g in &self.gates {
            if let Some((l, r)) = g.children() {
                fo[l] += 1;
                fo[r] += 1;
            }
        }
        for &o in &self.outputs {
            fo[o] += 1;
        }
        fo
    }
}

pub(crate) fn remap_gate(g: &Gate, remap: &[usize]) -> Gate {
    match g {
        Gate::Add { l, lc, r, rc } => Gate::Add {
            l: remap[*l],
            lc: lc.clone(),
            r: remap[*r],
            rc: rc.clone(),
        },
        Gate::Mul { l, lc, r, rc } => Gate::Mul {
            l: remap[*l],
            lc: lc.clone(),
            r: remap[*r],
            rc: rc.clone(),
        },
        other => other.clone(),
    }
}

pub(crate) fn restriction_map(
    nvars: usize,
    field: &Field,
    assignment: &BTreeMap<usize, FieldElement>,
) -> Result<Vec<Option<usize>>> {
    for (v, a) in assignment {
        if *v >= nvars {
            return Err(Error::usage(format!("assigned variable {v} out of range (nvars {nvars})")));
        }
        if a.field() != field {
            return Err(Error::usage(format!("value for variable {v} lies in another field")));
        }
    }
    let mut next = 0;
    Ok((0..nvars)
        .map(|v| {
            if assignment.contains_key(&v) {
                None
            } else {
                next += 1;
                Some(next - 1)
            }
        })
        .collect())
}

/// A single-output circuit in which every gate other than the output has
/// fan-out exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula(Circuit);

impl Formula {
    pub fn new(circuit: Circuit) -> Result<Formula> {
        let out = circuit.single_output()?;
        let fo = circuit.fan_out();
        for (i, &f) in fo.iter().enumerate() {
            if f != 1 {
                let what = if i == out { "output" } else { "gate" };
                return Err(Error::usage(format!(
                    "formula {what} {i} has fan-out {}, expected 1",
                    if i == out { f - 1 } else { f }
                )));
            }
        }
        Ok(Formula(circuit))
    }

    pub fn circuit(&self) -> &Circuit {
        &self.0
    }

    pub fn into_circuit(self) -> Circuit {
        self.0
    }

    pub fn output(&self) -> GateId {
        self.0.outputs[0]
    }

    /// Formula for `f^e`: a balanced product of `e` copies of the tree.
    pub fn power(&self, e: u64) -> Result<Formula> {
        if e == 0 {
            return Err(Error::usage("exponent must be at least 1"));
        }
        let c = &self.0;
        let mut b = CircuitBuilder::new(c.field.clone(), c.nvars);
        let mut roots = Vec::new();
        for _ in 0..e {
            roots.push(b.copy_tree(c, c.outputs[0]));
        }
        let root = b.product(&roots);
        Formula::new(b.finish(vec![root])?)
    }

    pub fn restrict(&self, assignment: &BTreeMap<usize, FieldElement>) -> Result<(Formula, Vec<Option<usize>>)> {
        let (c, map) = self.0.restrict(assignment)?;
        Ok((Formula(c), map))
    }
}

impl std::ops::Deref for Formula {
    type Target = Circuit;
    fn deref(&self) -> &Circuit {
        &self.0
    }
}

/// Any of the three device kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Device {
    Circuit(Circuit),
    Formula(Formula),
    Abp(Abp),
}

impl Device {
    pub fn kind(&self) -> &'static str {
        match self {
            Device::Circuit(_) => "circuit",
            Device::Formula(_) => "formula",
            Device::Abp(_) => "abp",
        }
    }

    pub fn field(&self) -> &Field {
        match self {
            Device::Circuit(c) => c.field(),
            Device::Formula(f) => f.field(),
            Device::Abp(a) => a.field(),
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            Device::Circuit(c) => c.nvars(),
            Device::Formula(f) => f.nvars(),
            Device::Abp(a) => a.nvars(),
        }
    }

    pub fn metrics(&self) -> Metrics {
        match self {
            Device::Circuit(c) => c.metrics(),
            Device::Formula(f) => f.metrics(),
            Device::Abp(a) => a.metrics(),
        }
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> Result<Vec<FieldElement>> {
        match self {
            Device::Circuit(c) => c.evaluate(point),
            Device::Formula(f) => f.evaluate(point),
            Device::Abp(a) => a.evaluate(point),
        }
    }

    pub fn restrict(&self, assignment: &BTreeMap<usize, FieldElement>) -> Result<(Device, Vec<Option<usize>>)> {
        Ok(match self {
            Device::Circuit(c) => {
                let (c, m) = c.restrict(assignment)?;
                (Device::Circuit(c), m)
            }
            Device::Formula(f) => {
                let (f, m) = f.restrict(assignment)?;
                (Device::Formula(f), m)
            }
            Device::Abp(a) => {
                let (a, m) = a.restrict(assignment)?;
                (Device::Abp(a), m)
            }
        })
    }

    /// `f^e` within the same device kind.
    pub fn power(&self, e: u64) -> Result<Device> {
        Ok(match self {
            Device::Circuit(c) => Device::Circuit(c.build_power(e)?),
            Device::Formula(f) => Device::Formula(f.power(e)?),
            Device::Abp(a) => Device::Abp(a.power(e)?),
        })
    }

    /// The device as a circuit (ABPs are converted vertex by vertex).
    pub fn to_circuit(&self) -> Result<Circuit> {
        match self {
            Device::Circuit(c) => Ok(c.clone()),
            Device::Formula(f) => Ok(f.circuit().clone()),
            Device::Abp(a) => a.to_circuit(),
        }
    }

    pub fn to_text(&self) -> String {
        serialize_devices(std::slice::from_ref(self), &[])
    }
}
