use super::{pow_u128, type_count, type_vectors, TransformOptions, TransformReport};
use crate::error::{Error, Result};
use crate::ir::{Abp, Edge, EdgeLabel};

/// A program whose sink `t` computes `f_a` for `a = types[t]`.
#[derive(Clone, Debug)]
pub struct DecomposedAbp {
    pub abp: Abp,
    pub types: Vec<Vec<u32>>,
    pub report: TransformReport,
}

/// Layered copy on vertices `(v, a)`, numbered `v·T + t`.
fn layered(phi: &Abp, opts: &TransformOptions) -> Result<(Abp, Vec<Vec<u32>>, u128)> {
    let [sink] = phi.sinks() else {
        return Err(Error::usage("mod-p decomposition needs a single-sink program"));
    };
    let field = phi.field().clone();
    let p = field.p();
    let n = phi.nvars();
    let s = phi.nvertices() as u128;
    let tcount = type_count(p, n, opts, |t| s * t)?;
    let bound = s * pow_u128(p as u128, n as u32);
    let types = type_vectors(p, n);
    let stride: Vec<usize> = (0..n).map(|i| (p as usize).pow((n - 1 - i) as u32)).collect();

    let mut edges = Vec::with_capacity(phi.edges().len() * tcount);
    for e in phi.edges() {
        let root = e.label.scalar().pth_root();
        for (t, a) in types.iter().enumerate() {
            let from = e.from * tcount + t;
            let (to_t, label) = match &e.label {
                EdgeLabel::Const(_) => (t, EdgeLabel::Const(root.clone())),
                EdgeLabel::VarMul(_, i) => {
                    if (a[*i] as u64) < p - 1 {
                        (t + stride[*i], EdgeLabel::Const(root.clone()))
                    } else {
                        let wrapped = t - (p as usize - 1) * stride[*i];
                        (wrapped, EdgeLabel::VarMul(root.clone(), *i))
                    }
                }
            };
            edges.push(Edge {
                from,
                to: e.to * tcount + to_t,
                label,
            });
        }
    }
    let sinks = (0..tcount).map(|t| sink * tcount + t).collect();
    let abp = Abp::new(field, n, phi.nvertices() * tcount, edges, phi.source() * tcount, sinks)?;
    Ok((abp, types, bound))
}

/// Program with one sink per component `f_a`, on at most `s·p^n` vertices.
pub fn mod_p_decompose_abp(phi: &Abp, opts: &TransformOptions) -> Result<DecomposedAbp> {
    let (psi, types, bound) = layered(phi, opts)?;
    let unpruned_size = psi.nvertices();
    let abp = if opts.prune { psi.pruned().0 } else { psi };
    let report = TransformReport {
        transform: "modp-decompose-abp".into(),
        p: phi.field().p(),
        n: phi.nvars(),
        input_size: phi.nvertices(),
        unpruned_size,
        output_size: abp.nvertices(),
        bound,
    };
    report.check_bound()?;
    Ok(DecomposedAbp { abp, types, report })
}

/// For `phi` computing `f^p`, the sub-program ending at `(sink, 0̄)`, which
/// computes `f`.
pub fn pth_root_abp(phi: &Abp, opts: &TransformOptions) -> Result<(Abp, TransformReport)> {
    let (psi, _, bound) = layered(phi, opts)?;
    let unpruned_size = psi.nvertices();
    let root = psi.with_sinks(vec![psi.sinks()[0]])?;
    let abp = if opts.prune { root.pruned().0 } else { root };
    let report = TransformReport {
        transform: "pth-root-abp".into(),
        p: phi.field().p(),
        n: phi.nvars(),
        input_size: phi.nvertices(),
        unpruned_size,
        output_size: abp.nvertices(),
        bound,
    };
    report.check_bound()?;
    Ok((abp, report))
}
