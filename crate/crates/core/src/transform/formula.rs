//! Mod-p decomposition of formulae.
//!
//! The output must again be a tree, so nothing is shared: each gate copy is
//! indexed by its type together with the types chosen along the path to the
//! root, and those path types are enumerated lazily by a top-down recursion
//! instead of being materialised.
//!
//! To keep the product depth at `d + ⌈log₂ n⌉`, the carry monomial that a
//! product gate contributes is not multiplied in at that gate. Instead the
//! recursion computes `(v, a) · x^P` for a pending `P ∈ {0,1}^n`: sums pass
//! `P` to both children, and a product hands `P` to its left factor and its
//! own carry to the right one. Pending monomials therefore only materialise
//! at leaves, as balanced products of at most `n` variables.

use super::{pow_u128, type_count, type_of, type_vectors, TransformOptions, TransformReport};
use crate::error::{Error, Result};
use crate::ff::FieldElement;
use crate::ir::{Circuit, CircuitBuilder, Formula, Gate, GateId};

/// One formula per type vector, in the order of `types`.
#[derive(Clone, Debug)]
pub struct DecomposedFormula {
    pub components: Vec<Formula>,
    pub types: Vec<Vec<u32>>,
    pub report: TransformReport,
}

struct Splitter<'a> {
    phi: &'a Circuit,
    p: u32,
    n: usize,
    types: Vec<Vec<u32>>,
    prune: bool,
    b: CircuitBuilder,
}

type Piece = Option<(GateId, FieldElement)>;

impl Splitter<'_> {
    fn leaf(&mut self, kappa: FieldElement, pending: usize) -> Piece {
        let field = self.b.field().clone();
        if kappa.is_zero() {
            if self.prune {
                return None;
            }
            return Some((self.b.fresh_constant(kappa), field.one()));
        }
        if pending == 0 {
            return Some((self.b.fresh_constant(kappa), field.one()));
        }
        let vars: Vec<GateId> = (0..self.n)
            .filter(|j| pending >> j & 1 == 1)
            .map(|j| self.b.fresh_input(j))
            .collect();
        Some((self.b.product(&vars), kappa))
    }

    fn sum(&mut self, terms: Vec<(GateId, FieldElement)>) -> Piece {
        let mut level = terms;
        let one = self.b.field().one();
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for pair in level.chunks(2) {
                match pair {
                    [(a, ca), (b, cb)] => {
                        let g = self.b.add_with(*a, ca.clone(), *b, cb.clone());
                        next.push((g, one.clone()));
                    }
                    [single] => next.push(single.clone()),
                    _ => unreachable!(),
                }
            }
            level = next;
        }
        level.pop()
    }

    /// `(v, a) · x^pending`, or `None` for a pruned zero.
    fn build(&mut self, v: GateId, a: usize, pending: usize) -> Piece {
        let field = self.b.field().clone();
        match self.phi.gates()[v].clone() {
            Gate::Input(i) => {
                let ty = &self.types[a];
                let unit = ty.iter().enumerate().all(|(j, &x)| x == u32::from(j == i));
                self.leaf(if unit { field.one() } else { field.zero() }, pending)
            }
            Gate::Const(alpha) => {
                let kappa = if a == 0 { alpha.pth_root() } else { field.zero() };
                self.leaf(kappa, pending)
            }
            Gate::Add { l, lc, r, rc } => {
                let left = self.build(l, a, pending);
                let right = self.build(r, a, pending);
                let (ru, rw) = (lc.pth_root(), rc.pth_root());
                match (left, right) {
                    (Some((gl, cl)), Some((gr, cr))) => {
                        Some((self.b.add_with(gl, &cl * &ru, gr, &cr * &rw), field.one()))
                    }
                    (Some((g, c)), None) => Some((g, &c * &ru)),
                    (None, Some((g, c))) => Some((g, &c * &rw)),
                    (None, None) => None,
                }
            }
            Gate::Mul { l, lc, r, rc } => {
                let scale = &lc.pth_root() * &rc.pth_root();
                let p = self.p;
                let av = self.types[a].clone();
                let mut terms = Vec::new();
                for bi in 0..self.types.len() {
                    let bv = self.types[bi].clone();
                    let mut carry = 0usize;
                    let mut ci = 0usize;
                    for j in 0..self.n {
                        let c = (av[j] + p - bv[j]) % p;
                        if bv[j] + c >= p {
                            carry |= 1 << j;
                        }
                        ci = ci * p as usize + c as usize;
                    }
                    let Some((gl, cl)) = self.build(l, bi, pending) else {
                        continue;
                    };
                    let Some((gr, cr)) = self.build(r, ci, carry) else {
                        continue;
                    };
                    terms.push((self.b.mul_with(gl, cl, gr, cr), scale.clone()));
                }
                self.sum(terms)
            }
        }
    }

    /// Root of the component for type index `a`.
    fn component(&mut self, root: GateId, a: usize) -> GateId {
        let field = self.b.field().clone();
        match self.build(root, a, 0) {
            None => self.b.fresh_constant(field.zero()),
            Some((g, c)) if c.is_one() => g,
            Some((g, c)) => {
                let z = self.b.fresh_constant(field.zero());
                self.b.add_with(g, c, z, field.one())
            }
        }
    }
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

fn decompose(phi: &Formula, opts: &TransformOptions, only_zero: bool) -> Result<DecomposedFormula> {
    let c = phi.circuit();
    let field = c.field().clone();
    let p = field.p();
    let n = c.nvars();
    let m = c.metrics();
    let (s, d) = (m.size as u128, m.product_depth);
    let bound_for = |t: u128| 3 * s * n.max(1) as u128 * t;
    type_count(p, n * (d + 3), opts, bound_for)?;
    let bound = bound_for(pow_u128(p as u128, (n * (d + 3)) as u32));
    let depth_bound = d + ceil_log2(n);
    let types = type_vectors(p, n);
    let wanted: Vec<usize> = if only_zero { vec![0] } else { (0..types.len()).collect() };

    let mut components = Vec::with_capacity(wanted.len());
    let mut total = 0usize;
    for &a in &wanted {
        let mut sp = Splitter {
            phi: c,
            p: p as u32,
            n,
            types: types.clone(),
            prune: opts.prune,
            b: CircuitBuilder::new(field.clone(), n),
        };
        let root = sp.component(phi.output(), a);
        // a factor whose partner folded to zero leaves an orphaned subtree
        let formula = Formula::new(sp.b.finish(vec![root])?.pruned())?;
        let fm = formula.metrics();
        if fm.product_depth > depth_bound {
            return Err(Error::Internal(format!(
                "component {:?} has product depth {}, above {depth_bound}",
                type_of(a, p, n),
                fm.product_depth
            )));
        }
        total += fm.size;
        components.push(formula);
    }
    let report = TransformReport {
        transform: if only_zero { "pth-root-formula" } else { "modp-decompose-formula" }.into(),
        p,
        n,
        input_size: m.size,
        unpruned_size: total,
        output_size: total,
        bound,
    };
    report.check_bound()?;
    let types = wanted.iter().map(|&a| types[a].clone()).collect();
    Ok(DecomposedFormula {
        components,
        types,
        report,
    })
}

/// Formulae for every component `f_a`; total size at most `3·s·n·p^{n(d+3)}`
/// and product depth at most `d + ⌈log₂ n⌉`, where `d` is the product depth
/// of `phi`.
pub fn mod_p_decompose_formula(phi: &Formula, opts: &TransformOptions) -> Result<DecomposedFormula> {
    decompose(phi, opts, false)
}

/// For `phi` computing `f^p`, a formula computing `f` (the component `f_0`).
pub fn pth_root_formula(phi: &Formula, opts: &TransformOptions) -> Result<(Formula, TransformReport)> {
    let mut d = decompose(phi, opts, true)?;
    Ok((d.components.remove(0), d.report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::ir::parse_device;
    use crate::poly::{expand_circuit, poly_mod_p_decompose, ExpandCaps};

    fn formula(text: &str) -> Formula {
        match parse_device(text).unwrap() {
            crate::ir::Device::Formula(f) => f,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_leaf() {
        let phi = formula("field p 2 ext 1 modulus [0 1]\nnvars 2\nkind formula\ngate 0 input 0\noutput 0\n");
        let d = mod_p_decompose_formula(&phi, &TransformOptions::default()).unwrap();
        for (a, comp) in d.types.iter().zip(&d.components) {
            assert_eq!(comp.size(), 1);
            let e = expand_circuit(comp, &ExpandCaps::default()).unwrap().remove(0);
            assert_eq!(e.is_zero(), a != &vec![1, 0]);
        }
    }

    #[test]
    fn squares_and_cross_term() {
        // (x1·x1)·(x2·x2) + x1·x2 over F_2, product depth 2
        let text = "field p 2 ext 1 modulus [0 1]\nnvars 2\nkind formula\ngate 0 input 0\ngate 1 input 0\ngate 2 mul 0 [1] 1 [1]\ngate 3 input 1\ngate 4 input 1\ngate 5 mul 3 [1] 4 [1]\ngate 6 mul 2 [1] 5 [1]\ngate 7 input 0\ngate 8 input 1\ngate 9 mul 7 [1] 8 [1]\ngate 10 add 6 [1] 9 [1]\noutput 10\n";
        let phi = formula(text);
        assert_eq!(phi.metrics().product_depth, 2);
        let caps = ExpandCaps::default();
        let f = expand_circuit(&phi, &caps).unwrap().remove(0);
        for prune in [true, false] {
            let opts = TransformOptions { prune, ..Default::default() };
            let d = mod_p_decompose_formula(&phi, &opts).unwrap();
            let want = poly_mod_p_decompose(&f);
            for (a, comp) in d.types.iter().zip(&d.components) {
                assert!(comp.metrics().product_depth <= 3);
                assert_eq!(expand_circuit(comp, &caps).unwrap()[0], want.component(a));
            }
            let sq = phi.power(2).unwrap();
            let (root, rep) = pth_root_formula(&sq, &opts).unwrap();
            assert!(rep.output_size as u128 <= rep.bound);
            assert!(root.metrics().product_depth <= sq.metrics().product_depth + 1);
            assert_eq!(expand_circuit(&root, &caps).unwrap()[0], f);
        }
    }

    #[test]
    fn depth_bound_with_two_variables() {
        let f = Field::prime(3).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        for _ in 0..10 {
            let phi = crate::ir::random::random_formula(&f, 2, 9, 2, &mut rng);
            let d = mod_p_decompose_formula(&phi, &TransformOptions::default()).unwrap();
            let bound = phi.metrics().product_depth + 1;
            assert!(d.components.iter().all(|c| c.metrics().product_depth <= bound));
        }
        assert_eq!((ceil_log2(1), ceil_log2(2), ceil_log2(3), ceil_log2(4)), (0, 1, 2, 2));
    }
}
