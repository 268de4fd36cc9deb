use super::{index_of, pow_u128, type_count, type_vectors, TransformOptions, TransformReport};
use crate::error::{Error, Result};
use crate::ir::{Circuit, CircuitBuilder, Gate, GateId};
use crate::poly::{expand_circuit, pth_root_poly, ExpandCaps};

/// A circuit with one output per type vector; output `t` computes `f_a` for
/// `a = types[t]`.
#[derive(Clone, Debug)]
pub struct DecomposedCircuit {
    pub circuit: Circuit,
    pub types: Vec<Vec<u32>>,
    pub report: TransformReport,
}

impl DecomposedCircuit {
    /// Output gate computing `f_a`.
    pub fn output_for(&self, a: &[u32]) -> GateId {
        self.circuit.outputs()[index_of(a, self.circuit.field().p())]
    }
}

/// Splits every gate `v` into pieces `(v, a)` computing the components of
/// the polynomial at `v`. Returns the unpruned circuit (one output per type)
/// and its size bound `3·s·p^{2n} + 2^n`.
fn split_gates(phi: &Circuit, opts: &TransformOptions) -> Result<(Circuit, Vec<Vec<u32>>, u128)> {
    let out = phi.single_output()?;
    let field = phi.field().clone();
    let p = field.p();
    let n = phi.nvars();
    let s = phi.size() as u128;
    let two_n = pow_u128(2, n as u32);
    let bound_for = |t: u128| 3 * s * t * t + two_n;
    let tcount = type_count(p, n, opts, bound_for)?;
    let bound = bound_for(tcount as u128);
    let types = type_vectors(p, n);

    let mut b = CircuitBuilder::new(field.clone(), n);
    // x^e for e ∈ {0,1}^n, as a product lattice built once
    let mut mono: Vec<GateId> = Vec::with_capacity(1 << n);
    for e in 0usize..(1 << n) {
        let g = match e.count_ones() {
            0 => b.constant(field.one()),
            1 => b.input(e.trailing_zeros() as usize),
            _ => {
                let low = e & e.wrapping_neg();
                b.mul(mono[e & (e - 1)], mono[low])
            }
        };
        mono.push(g);
    }
    let zero = b.constant(field.zero());
    let one = field.one();

    let mut pieces: Vec<Vec<GateId>> = Vec::with_capacity(phi.size());
    for g in phi.gates() {
        let row: Vec<GateId> = match g {
            Gate::Input(i) => {
                let unit = b.constant(one.clone());
                types
                    .iter()
                    .map(|a| {
                        let is_unit = a.iter().enumerate().all(|(j, &x)| x == u32::from(j == *i));
                        if is_unit {
                            unit
                        } else {
                            zero
                        }
                    })
                    .collect()
            }
            Gate::Const(alpha) => {
                let root = b.constant(alpha.pth_root());
                (0..tcount).map(|t| if t == 0 { root } else { zero }).collect()
            }
            Gate::Add { l, lc, r, rc } => {
                let (ru, rw) = (lc.pth_root(), rc.pth_root());
                (0..tcount)
                    .map(|t| b.add_with(pieces[*l][t], ru.clone(), pieces[*r][t], rw.clone()))
                    .collect()
            }
            Gate::Mul { l, lc, r, rc } => {
                let (ru, rw) = (lc.pth_root(), rc.pth_root());
                let mut row = Vec::with_capacity(tcount);
                let mut c = vec![0u32; n];
                for a in &types {
                    let mut terms = Vec::with_capacity(tcount);
                    for (bi, bv) in types.iter().enumerate() {
                        // c ≡ a - b (mod p); the carry (b + c - a)/p is 0 or 1 per coordinate
                        let mut e = 0usize;
                        for j in 0..n {
                            c[j] = (a[j] + p as u32 - bv[j]) % p as u32;
                            if bv[j] + c[j] >= p as u32 {
                                e |= 1 << j;
                            }
                        }
                        let ci = index_of(&c, p);
                        let t1 = b.mul_with(pieces[*l][bi], ru.clone(), pieces[*r][ci], rw.clone());
                        let t2 = if e == 0 { t1 } else { b.mul(t1, mono[e]) };
                        terms.push((t2, one.clone()));
                    }
                    row.push(b.sum(&terms));
                }
                row
            }
        };
        pieces.push(row);
    }
    let outputs = pieces[out].clone();
    Ok((b.finish(outputs)?, types, bound))
}

/// Circuit computing every component `f_a` of the single output of `phi`,
/// of size at most `3·s·p^{2n} + 2^n` before pruning.
pub fn mod_p_decompose_circuit(phi: &Circuit, opts: &TransformOptions) -> Result<DecomposedCircuit> {
    let (psi, types, bound) = split_gates(phi, opts)?;
    let unpruned_size = psi.size();
    let circuit = if opts.prune { psi.pruned() } else { psi };
    let report = TransformReport {
        transform: "modp-decompose-circuit".into(),
        p: phi.field().p(),
        n: phi.nvars(),
        input_size: phi.size(),
        unpruned_size,
        output_size: circuit.size(),
        bound,
    };
    report.check_bound()?;
    Ok(DecomposedCircuit { circuit, types, report })
}

/// For `phi` computing `f^p`, a circuit computing `f`: the component `f_0`
/// of the decomposition. Whether `phi` is a p-th power is not checked; see
/// [`pth_root_circuit_verified`].
pub fn pth_root_circuit(phi: &Circuit, opts: &TransformOptions) -> Result<(Circuit, TransformReport)> {
    let (psi, _, bound) = split_gates(phi, opts)?;
    let unpruned_size = psi.size();
    let root = psi.with_outputs(vec![psi.outputs()[0]])?;
    let circuit = if opts.prune { root.pruned() } else { root };
    let report = TransformReport {
        transform: "pth-root-circuit".into(),
        p: phi.field().p(),
        n: phi.nvars(),
        input_size: phi.size(),
        unpruned_size,
        output_size: circuit.size(),
        bound,
    };
    report.check_bound()?;
    Ok((circuit, report))
}

/// [`pth_root_circuit`] bracketed by oracle checks: `phi` must expand to a
/// p-th power (domain error with a witness term otherwise) and the result
/// must expand to its root (integrity error otherwise).
pub fn pth_root_circuit_verified(
    phi: &Circuit,
    opts: &TransformOptions,
    caps: &ExpandCaps,
) -> Result<(Circuit, TransformReport)> {
    let f = expand_circuit(phi, caps)?.remove(0);
    let want = pth_root_poly(&f)?;
    let (psi, report) = pth_root_circuit(phi, opts)?;
    let got = expand_circuit(&psi, caps)?.remove(0);
    if got != want {
        return Err(Error::Integrity(format!(
            "p-th root circuit expands to {got}, expected {want}"
        )));
    }
    Ok((psi, report))
}
