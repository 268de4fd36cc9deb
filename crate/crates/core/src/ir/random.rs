//! Random devices for randomized test suites.

use rand::Rng;

use super::{Abp, Circuit, CircuitBuilder, Edge, EdgeLabel, Formula, Gate, GateId};
use crate::ff::{Field, FieldElement};

pub fn nonzero_element<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> FieldElement {
    loop {
        let a = field.random_element(rng);
        if !a.is_zero() {
            return a;
        }
    }
}

/// A single-output circuit with exactly `size` gates (`size >= 1`) whose
/// syntactic degree stays at most `max_degree`. Inputs come first, then
/// random Add/Mul gates leaning on recent gates so most of the circuit lies
/// in the output cone.
pub fn random_circuit<R: Rng + ?Sized>(
    field: &Field,
    nvars: usize,
    size: usize,
    max_degree: u64,
    rng: &mut R,
) -> Circuit {
    assert!(size >= 1);
    let mut gates: Vec<Gate> = Vec::with_capacity(size);
    let mut deg: Vec<u64> = Vec::with_capacity(size);
    let leaves = if size == 1 { 1 } else { (size / 3).clamp(1, nvars + 1) };
    for i in 0..leaves {
        if i < nvars {
            gates.push(Gate::Input(i));
            deg.push(1);
        } else {
            gates.push(Gate::Const(field.random_element(rng)));
            deg.push(0);
        }
    }
    while gates.len() < size {
        let i = gates.len();
        let pick = |rng: &mut R| {
            if rng.random_bool(0.5) {
                i - 1
            } else {
                rng.random_range(0..i)
            }
        };
        let (l, r) = (pick(rng), pick(rng));
        let lc = coeff(field, rng);
        let rc = coeff(field, rng);
        let want_mul = rng.random_bool(0.5);
        if want_mul && deg[l] + deg[r] <= max_degree {
            gates.push(Gate::Mul { l, lc, r, rc });
            deg.push(deg[l] + deg[r]);
        } else if rng.random_bool(0.15) {
            if nvars > 0 {
                gates.push(Gate::Input(rng.random_range(0..nvars)));
                deg.push(1);
            } else {
                gates.push(Gate::Const(field.random_element(rng)));
                deg.push(0);
            }
        } else {
            gates.push(Gate::Add { l, lc, r, rc });
            deg.push(deg[l].max(deg[r]));
        }
    }
    Circuit::new(field.clone(), nvars, gates, vec![size - 1]).expect("random circuit is valid")
}

/// Edge coefficients are mostly 1, as in hand-written circuits.
fn coeff<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> FieldElement {
    if rng.random_bool(0.6) {
        field.one()
    } else {
        nonzero_element(field, rng)
    }
}

/// A random formula with at most `size` nodes and product depth at most
/// `max_product_depth`.
pub fn random_formula<R: Rng + ?Sized>(
    field: &Field,
    nvars: usize,
    size: usize,
    max_product_depth: usize,
    rng: &mut R,
) -> Formula {
    let mut b = CircuitBuilder::new(field.clone(), nvars);
    let root = grow(&mut b, field, nvars, size.max(1), max_product_depth, rng);
    Formula::new(b.finish(vec![root]).expect("valid")).expect("random formula is a tree")
}

fn grow<R: Rng + ?Sized>(
    b: &mut CircuitBuilder,
    field: &Field,
    nvars: usize,
    budget: usize,
    depth: usize,
    rng: &mut R,
) -> GateId {
    if budget < 3 || rng.random_bool(0.1) {
        return if nvars > 0 && rng.random_bool(0.8) {
            b.fresh_input(rng.random_range(0..nvars))
        } else {
            b.fresh_constant(field.random_element(rng))
        };
    }
    let left = rng.random_range(1..budget - 1);
    let right = budget - 1 - left;
    let mul = depth > 0 && rng.random_bool(0.5);
    let d = if mul { depth - 1 } else { depth };
    let l = grow(b, field, nvars, left, d, rng);
    let r = grow(b, field, nvars, right, d, rng);
    let (lc, rc) = (coeff(field, rng), coeff(field, rng));
    if mul {
        b.mul_with(l, lc, r, rc)
    } else {
        b.add_with(l, lc, r, rc)
    }
}

/// A random single-sink program on `nvertices >= 2` vertices: a spine
/// `0 -> 1 -> ... -> n-1` plus extra forward edges.
pub fn random_abp<R: Rng + ?Sized>(field: &Field, nvars: usize, nvertices: usize, rng: &mut R) -> Abp {
    assert!(nvertices >= 2);
    let label = |rng: &mut R| {
        let a = coeff(field, rng);
        if nvars > 0 && rng.random_bool(0.6) {
            EdgeLabel::VarMul(a, rng.random_range(0..nvars))
        } else {
            EdgeLabel::Const(a)
        }
    };
    let mut edges = Vec::new();
    for v in 0..nvertices - 1 {
        edges.push(Edge { from: v, to: v + 1, label: label(rng) });
    }
    let extra = rng.random_range(0..=nvertices);
    for _ in 0..extra {
        let u = rng.random_range(0..nvertices - 1);
        let v = rng.random_range(u + 1..nvertices);
        edges.push(Edge { from: u, to: v, label: label(rng) });
    }
    Abp::new(field.clone(), nvars, nvertices, edges, 0, vec![nvertices - 1]).expect("random program is valid")
}
