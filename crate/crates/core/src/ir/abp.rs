use std::collections::{BTreeMap, VecDeque};

use super::{CircuitBuilder, Circuit, GateId, Metrics};
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeLabel {
    Const(FieldElement),
    /// `α·x_i`
    VarMul(FieldElement, usize),
}

impl EdgeLabel {
    pub fn scalar(&self) -> &FieldElement {
        match self {
            EdgeLabel::Const(a) | EdgeLabel::VarMul(a, _) => a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: EdgeLabel,
}

/// An algebraic branching program. Vertices are `0..nvertices`; each sink
/// computes the sum over source-to-sink paths of the product of edge labels.
/// Parallel edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abp {
    field: Field,
    nvars: usize,
    nvertices: usize,
    edges: Vec<Edge>,
    source: usize,
    sinks: Vec<usize>,
    order: Vec<usize>,
}

impl Abp {
    pub fn new(
        field: Field,
        nvars: usize,
        nvertices: usize,
        edges: Vec<Edge>,
        source: usize,
        sinks: Vec<usize>,
    ) -> Result<Abp> {
        if source >= nvertices {
            return Err(Error::usage(format!("source {source} is not a vertex")));
        }
        if sinks.is_empty() {
            return Err(Error::usage("branching program has no sink"));
        }
        if let Some(s) = sinks.iter().find(|&&s| s >= nvertices) {
            return Err(Error::usage(format!("sink {s} is not a vertex")));
        }
        let mut indeg = vec![0usize; nvertices];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); nvertices];
        for (k, e) in edges.iter().enumerate() {
            if e.from >= nvertices || e.to >= nvertices {
                return Err(Error::usage(format!("edge {k} has an endpoint outside the vertex set")));
            }
            let a = e.label.scalar();
            if a.field() != &field {
                return Err(Error::usage(format!("edge {k}: label from another field")));
            }
            if a.is_zero() {
                return Err(Error::usage(format!("edge {k}: zero label")));
            }
            if let EdgeLabel::VarMul(_, v) = e.label {
                if v >= nvars {
                    return Err(Error::usage(format!("edge {k}: variable {v} out of range (nvars {nvars})")));
                }
            }
            indeg[e.to] += 1;
            succ[e.from].push(e.to);
        }
        if indeg[source] != 0 {
            return Err(Error::usage("source has incoming edges"));
        }
        let mut queue: VecDeque<usize> = (0..nvertices).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(nvertices);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if order.len() != nvertices {
            return Err(Error::usage("branching program has a cycle"));
        }
        Ok(Abp {
            field,
            nvars,
            nvertices,
            edges,
            source,
            sinks,
            order,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nvertices(&self) -> usize {
        self.nvertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sinks(&self) -> &[usize] {
        &self.sinks
    }

    /// Vertices in a topological order.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    fn incoming(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.nvertices];
        for (k, e) in self.edges.iter().enumerate() {
            inc[e.to].push(k);
        }
        inc
    }

    /// Value at every sink.
    pub fn evaluate(&self, point: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if point.len() != self.nvars {
            return Err(Error::usage(format!(
                "point has {} coordinates, device has {} variables",
                point.len(),
                self.nvars
            )));
        }
        if point.iter().any(|c| c.field() != &self.field) {
            return Err(Error::usage("point lies in another field"));
        }
        let inc = self.incoming();
        let mut val = vec![self.field.zero(); self.nvertices];
        val[self.source] = self.field.one();
        for &v in &self.order {
            if v == self.source {
                continue;
            }
            let mut acc = self.field.zero();
            for &k in &inc[v] {
                let e = &self.edges[k];
                let w = match &e.label {
                    EdgeLabel::Const(a) => a.clone(),
                    EdgeLabel::VarMul(a, i) => a * &point[*i],
                };
                acc += &(&val[e.from] * &w);
            }
            val[v] = acc;
        }
        Ok(self.sinks.iter().map(|&s| val[s].clone()).collect())
    }

    /// Size is the vertex count; product depth the longest source path (in
    /// edges) to a sink; degree the largest number of variable edges on it.
    pub fn metrics(&self) -> Metrics {
        let inc = self.incoming();
        let mut len: Vec<Option<(usize, u64)>> = vec![None; self.nvertices];
        len[self.source] = Some((0, 0));
        for &v in &self.order {
            for &k in &inc[v] {
                let e = &self.edges[k];
                if let Some((l, d)) = len[e.from] {
                    let dv = d + matches!(e.label, EdgeLabel::VarMul(..)) as u64;
                    let cur = len[v].get_or_insert((0, 0));
                    cur.0 = cur.0.max(l + 1);
                    cur.1 = cur.1.max(dv);
                }
            }
        }
        let at_sinks = self.sinks.iter().filter_map(|&s| len[s]);
        Metrics {
            size: self.nvertices,
            product_depth: at_sinks.clone().map(|x| x.0).max().unwrap_or(0),
            degree_bound: at_sinks.map(|x| x.1).max().unwrap_or(0),
        }
    }

    /// Remove vertices off every source-to-sink path; source and sinks are
    /// kept. Returns the program and the new index of each old vertex.
    pub fn pruned(&self) -> (Abp, Vec<Option<usize>>) {
        let n = self.nvertices;
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            out[e.from].push(e.to);
        }
        let mut fwd = vec![false; n];
        fwd[self.source] = true;
        for &v in &self.order {
            if fwd[v] {
                for &w in &out[v] {
                    fwd[w] = true;
                }
            }
        }
        let mut bwd = vec![false; n];
        for &s in &self.sinks {
            bwd[s] = true;
        }
        for &v in self.order.iter().rev() {
            if !bwd[v] {
                bwd[v] = out[v].iter().any(|&w| bwd[w]);
            }
        }
        let mut keep = vec![false; n];
        for v in 0..n {
            keep[v] = fwd[v] && bwd[v];
        }
        keep[self.source] = true;
        for &s in &self.sinks {
            keep[s] = true;
        }
        let mut map = vec![None; n];
        let mut next = 0;
        for v in 0..n {
            if keep[v] {
                map[v] = Some(next);
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.from] && keep[e.to] && fwd[e.from] && bwd[e.to])
            .map(|e| Edge {
                from: map[e.from].unwrap(),
                to: map[e.to].unwrap(),
                label: e.label.clone(),
            })
            .collect();
        let abp = Abp::new(
            self.field.clone(),
            self.nvars,
            next,
            edges,
            map[self.source].unwrap(),
            self.sinks.iter().map(|&s| map[s].unwrap()).collect(),
        )
        .expect("pruning preserves validity");
        (abp, map)
    }

    /// The sub-program for one sink.
    pub fn with_sinks(&self, sinks: Vec<usize>) -> Result<Abp> {
        Abp::new(
            self.field.clone(),
            self.nvars,
            self.nvertices,
            self.edges.clone(),
            self.source,
            sinks,
        )
    }

    pub fn restrict(&self, assignment: &BTreeMap<usize, FieldElement>) -> Result<(Abp, Vec<Option<usize>>)> {
        let map = super::restriction_map(self.nvars, &self.field, assignment)?;
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                let label = match &e.label {
                    EdgeLabel::Const(a) => EdgeLabel::Const(a.clone()),
                    EdgeLabel::VarMul(a, i) => match map[*i] {
                        Some(j) => EdgeLabel::VarMul(a.clone(), j),
                        None => {
                            let v = a * &assignment[i];
                            if v.is_zero() {
                                return None;
                            }
                            EdgeLabel::Const(v)
                        }
                    },
                };
                Some(Edge {
                    from: e.from,
                    to: e.to,
                    label,
                })
            })
            .collect();
        let nvars = map.iter().flatten().count();
        let abp = Abp::new(
            self.field.clone(),
            nvars,
            self.nvertices,
            edges,
            self.source,
            self.sinks.clone(),
        )?;
        Ok((abp, map))
    }

    /// Series composition of `e` copies (single-sink programs only).
    pub fn power(&self, e: u64) -> Result<Abp> {
        if e == 0 {
            return Err(Error::usage("exponent must be at least 1"));
        }
        let [sink] = self.sinks.as_slice() else {
            return Err(Error::usage("power needs a single-sink program"));
        };
        let n = self.nvertices;
        let mut edges = Vec::new();
        let mut next = 0usize;
        let mut prev_sink = None;
        let mut ids = vec![0usize; n];
        for _ in 0..e {
            for (v, id) in ids.iter_mut().enumerate() {
                *id = match prev_sink {
                    Some(s) if v == self.source => s,
                    _ => {
                        next += 1;
                        next - 1
                    }
                };
            }
            for ed in &self.edges {
                edges.push(Edge {
                    from: ids[ed.from],
                    to: ids[ed.to],
                    label: ed.label.clone(),
                });
            }
            prev_sink = Some(ids[*sink]);
        }
        // the first copy keeps the original numbering
        Abp::new(self.field.clone(), self.nvars, next, edges, self.source, vec![prev_sink.unwrap()])
    }

    /// Equivalent circuit with one output per sink.
    pub fn to_circuit(&self) -> Result<Circuit> {
        let mut b = CircuitBuilder::new(self.field.clone(), self.nvars);
        let inc = self.incoming();
        let mut gate: Vec<GateId> = vec![usize::MAX; self.nvertices];
        for &v in &self.order {
            if v == self.source {
                gate[v] = b.constant(self.field.one());
                continue;
            }
            let mut terms = Vec::new();
            for &k in &inc[v] {
                let e = &self.edges[k];
                match &e.label {
                    EdgeLabel::Const(a) => terms.push((gate[e.from], a.clone())),
                    EdgeLabel::VarMul(a, i) => {
                        let x = b.input(*i);
                        let m = b.mul_with(gate[e.from], a.clone(), x, self.field.one());
                        terms.push((m, self.field.one()));
                    }
                }
            }
            gate[v] = b.sum(&terms);
        }
        let outputs = self.sinks.iter().map(|&s| gate[s]).collect();
        b.finish(outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_abp(field: &Field) -> Abp {
        // x0 + x1 via two parallel edges, then times 1
        let one = field.one();
        Abp::new(
            field.clone(),
            2,
            3,
            vec![
                Edge { from: 0, to: 1, label: EdgeLabel::VarMul(one.clone(), 0) },
                Edge { from: 0, to: 1, label: EdgeLabel::VarMul(one.clone(), 1) },
                Edge { from: 1, to: 2, label: EdgeLabel::Const(one) },
            ],
            0,
            vec![2],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_and_power() {
        let f = Field::prime(5).unwrap();
        let a = path_abp(&f);
        let pt = [f.from_int(2), f.from_int(4)];
        assert_eq!(a.evaluate(&pt).unwrap()[0], f.from_int(1));
        let sq = a.power(2).unwrap();
        assert_eq!(sq.nvertices(), 5);
        assert_eq!(sq.evaluate(&pt).unwrap()[0], f.from_int(1));
        let pt = [f.from_int(1), f.from_int(1)];
        assert_eq!(sq.evaluate(&pt).unwrap()[0], f.from_int(4));
        let m = sq.metrics();
        assert_eq!((m.product_depth, m.degree_bound), (4, 2));
    }

    #[test]
    fn circuit_conversion_agrees() {
        let f = Field::prime(3).unwrap();
        let a = path_abp(&f).power(3).unwrap();
        let c = a.to_circuit().unwrap();
        for x in f.elements() {
            for y in f.elements() {
                let pt = [x.clone(), y];
                assert_eq!(a.evaluate(&pt).unwrap(), c.evaluate(&pt).unwrap());
            }
        }
    }

    #[test]
    fn cycles_are_rejected() {
        let f = Field::prime(2).unwrap();
        let one = f.one();
        let e = |a, b| Edge { from: a, to: b, label: EdgeLabel::Const(one.clone()) };
        assert!(Abp::new(f.clone(), 0, 3, vec![e(0, 1), e(1, 2), e(2, 1)], 0, vec![2]).is_err());
    }

    #[test]
    fn pruning_drops_dead_vertices() {
        let f = Field::prime(2).unwrap();
        let one = f.one();
        let e = |a, b| Edge { from: a, to: b, label: EdgeLabel::Const(one.clone()) };
        let a = Abp::new(f.clone(), 0, 5, vec![e(0, 1), e(1, 2), e(0, 3), e(4, 2)], 0, vec![2]).unwrap();
        let (p, map) = a.pruned();
        assert_eq!(p.nvertices(), 3);
        assert_eq!(map[3], None);
        assert_eq!(map[4], None);
        assert_eq!(p.evaluate(&[]).unwrap(), a.evaluate(&[]).unwrap());
    }
}
