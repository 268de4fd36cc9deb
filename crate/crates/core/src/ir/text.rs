//! Line-oriented text format for devices.
//!
//! ```text
//! field p 2 ext 1 modulus [0 1]
//! nvars 2
//! kind circuit            # circuit | formula | abp
//! gate 0 input 0
//! gate 1 const [1]
//! gate 2 add 0 [1] 1 [1]
//! gate 3 mul 2 [1] 2 [1]
//! output 3
//! ```
//!
//! Gate labels are arbitrary distinct integers and may only refer to gates
//! defined on earlier lines. Sugar: `gate k sum a [α] b [β] c [γ] ...` and
//! `gate k prod a b c ...` become balanced binary trees.
//!
//! Branching programs use `vertex k`, `edge u v const [α]`,
//! `edge u v varmul [α] i`, `edge u v affine [α0] [α1] ... [αn]` (the label
//! `α0 + Σ αi x_{i-1}`, split into parallel edges), `source k` and `sink k`.
//!
//! Several devices may share a file, separated by lines containing `---`.

use std::collections::HashMap;

use super::{Abp, Circuit, Device, Edge, EdgeLabel, Formula, Gate, GateId};
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement};

/// Non-empty lines of a document with comments removed, tagged with 1-based
/// line numbers.
pub(crate) fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (!l.is_empty()).then_some((i + 1, l))
        })
        .collect()
}

/// Split a line into whitespace-separated tokens, keeping `[...]` groups whole.
pub(crate) fn tokens(line: &str) -> std::result::Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut rest = line.trim_start();
    while !rest.is_empty() {
        let end = if rest.starts_with('[') {
            rest.find(']').ok_or("unterminated `[`")? + 1
        } else {
            rest.find(char::is_whitespace).unwrap_or(rest.len())
        };
        out.push(&rest[..end]);
        rest = rest[end..].trim_start();
    }
    Ok(out)
}

/// Parse the field header and `nvars` line that open every document.
pub(crate) fn parse_preamble<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<(Field, usize, usize)> {
    let (ln, header) = lines.next().ok_or_else(|| Error::parse(0, "empty document"))?;
    let field = Field::parse_header(header).map_err(|e| Error::parse(ln, e.to_string()))?;
    let (ln2, nv) = lines
        .next()
        .ok_or_else(|| Error::parse(ln, "missing `nvars` line"))?;
    let nvars = nv
        .strip_prefix("nvars")
        .and_then(|t| t.trim().parse::<usize>().ok())
        .ok_or_else(|| Error::parse(ln2, format!("expected `nvars <n>`, found `{nv}`")))?;
    Ok((field, nvars, ln))
}

fn element(field: &Field, ln: usize, tok: &str) -> Result<FieldElement> {
    field
        .parse_element(tok)
        .map_err(|e| Error::parse(ln, e.to_string()))
}

fn nonzero(field: &Field, ln: usize, tok: &str) -> Result<FieldElement> {
    let e = element(field, ln, tok)?;
    if e.is_zero() {
        return Err(Error::parse(ln, "edge coefficient is zero"));
    }
    Ok(e)
}

fn number(ln: usize, tok: &str) -> Result<u64> {
    tok.parse()
        .map_err(|_| Error::parse(ln, format!("expected a non-negative integer, found `{tok}`")))
}

/// Split a file into documents at `---` lines, keeping line numbers.
fn documents(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut docs = vec![Vec::new()];
    for (ln, l) in content_lines(text) {
        if l == "---" {
            docs.push(Vec::new());
        } else {
            docs.last_mut().unwrap().push((ln, l));
        }
    }
    docs.retain(|d| !d.is_empty());
    docs
}

/// Parse every device in a (possibly multi-document) file.
pub fn parse_devices(text: &str) -> Result<Vec<Device>> {
    let docs = documents(text);
    if docs.is_empty() {
        return Err(Error::parse(0, "no device found"));
    }
    docs.into_iter().map(parse_document).collect()
}

/// Parse a file holding exactly one device.
pub fn parse_device(text: &str) -> Result<Device> {
    let mut all = parse_devices(text)?;
    if all.len() != 1 {
        return Err(Error::parse(0, format!("expected one device, found {}", all.len())));
    }
    Ok(all.pop().unwrap())
}

fn parse_document(lines: Vec<(usize, &str)>) -> Result<Device> {
    let mut it = lines.into_iter();
    let (field, nvars, header_ln) = parse_preamble(&mut it)?;
    let (ln, kind_line) = it
        .next()
        .ok_or_else(|| Error::parse(header_ln, "missing `kind` line"))?;
    let kind = kind_line
        .strip_prefix("kind")
        .map(str::trim)
        .ok_or_else(|| Error::parse(ln, format!("expected `kind <circuit|formula|abp>`, found `{kind_line}`")))?;
    let body: Vec<(usize, &str)> = it.collect();
    match kind {
        "circuit" => Ok(Device::Circuit(parse_gates(field, nvars, &body, false, ln)?)),
        "formula" => {
            let c = parse_gates(field, nvars, &body, true, ln)?;
            Ok(Device::Formula(Formula::new(c).map_err(|e| Error::parse(ln, e.to_string()))?))
        }
        "abp" => Ok(Device::Abp(parse_abp(field, nvars, &body, ln)?)),
        other => Err(Error::parse(ln, format!("unknown device kind `{other}`"))),
    }
}

fn parse_gates(field: Field, nvars: usize, body: &[(usize, &str)], formula: bool, kind_ln: usize) -> Result<Circuit> {
    // every label with its defining line, for forward-reference diagnostics
    let mut defined_at: HashMap<u64, usize> = HashMap::new();
    for &(ln, l) in body {
        let t = tokens(l).map_err(|e| Error::parse(ln, e))?;
        if t.first() == Some(&"gate") && t.len() > 1 {
            let lab = number(ln, t[1])?;
            if defined_at.insert(lab, ln).is_some() {
                return Err(Error::parse(ln, format!("gate {lab} defined twice")));
            }
        }
    }
    let mut gates: Vec<Gate> = Vec::new();
    let mut ids: HashMap<u64, GateId> = HashMap::new();
    let mut uses: Vec<usize> = Vec::new();
    let mut def_line: Vec<usize> = Vec::new();
    let mut outputs = Vec::new();
    let one = field.one();

    let resolve = |ids: &HashMap<u64, GateId>, uses: &mut Vec<usize>, ln: usize, tok: &str| -> Result<GateId> {
        let lab = number(ln, tok)?;
        match ids.get(&lab) {
            Some(&g) => {
                uses[g] += 1;
                if formula && uses[g] > 1 {
                    return Err(Error::parse(ln, format!("formula gate {lab} is used more than once")));
                }
                Ok(g)
            }
            None if defined_at.contains_key(&lab) => {
                Err(Error::parse(ln, format!("forward reference to gate {lab}")))
            }
            None => Err(Error::parse(ln, format!("reference to undefined gate {lab}"))),
        }
    };
    let push = |gates: &mut Vec<Gate>, uses: &mut Vec<usize>, def_line: &mut Vec<usize>, ln: usize, g: Gate| {
        gates.push(g);
        uses.push(0);
        def_line.push(ln);
        gates.len() - 1
    };

    for &(ln, l) in body {
        let t = tokens(l).map_err(|e| Error::parse(ln, e))?;
        match t.as_slice() {
            ["output", labels @ ..] if !labels.is_empty() => {
                for lab in labels {
                    outputs.push(resolve(&ids, &mut uses, ln, lab)?);
                }
            }
            ["gate", lab, op, args @ ..] => {
                let lab = number(ln, lab)?;
                let id = match (*op, args) {
                    ("input", [v]) => {
                        let v = number(ln, v)? as usize;
                        if v >= nvars {
                            return Err(Error::parse(ln, format!("variable {v} out of range (nvars {nvars})")));
                        }
                        push(&mut gates, &mut uses, &mut def_line, ln, Gate::Input(v))
                    }
                    ("const", [c]) => {
                        let c = element(&field, ln, c)?;
                        push(&mut gates, &mut uses, &mut def_line, ln, Gate::Const(c))
                    }
                    ("add" | "mul", [a, ca, b, cb]) => {
                        let l = resolve(&ids, &mut uses, ln, a)?;
                        let lc = nonzero(&field, ln, ca)?;
                        let r = resolve(&ids, &mut uses, ln, b)?;
                        let rc = nonzero(&field, ln, cb)?;
                        let g = if *op == "add" {
                            Gate::Add { l, lc, r, rc }
                        } else {
                            Gate::Mul { l, lc, r, rc }
                        };
                        push(&mut gates, &mut uses, &mut def_line, ln, g)
                    }
                    ("sum", pairs) if !pairs.is_empty() && pairs.len() % 2 == 0 => {
                        let mut level = Vec::new();
                        for pr in pairs.chunks(2) {
                            let g = resolve(&ids, &mut uses, ln, pr[0])?;
                            level.push((g, nonzero(&field, ln, pr[1])?));
                        }
                        while level.len() > 1 {
                            let mut next = Vec::new();
                            for pr in level.chunks(2) {
                                if let [(a, ca), (b, cb)] = pr {
                                    let g = Gate::Add { l: *a, lc: ca.clone(), r: *b, rc: cb.clone() };
                                    next.push((push(&mut gates, &mut uses, &mut def_line, ln, g), one.clone()));
                                } else {
                                    next.push(pr[0].clone());
                                }
                            }
                            level = next;
                        }
                        let (g, c) = level.pop().unwrap();
                        if c.is_one() {
                            g
                        } else {
                            let z = push(&mut gates, &mut uses, &mut def_line, ln, Gate::Const(field.zero()));
                            let g = Gate::Add { l: g, lc: c, r: z, rc: one.clone() };
                            push(&mut gates, &mut uses, &mut def_line, ln, g)
                        }
                    }
                    ("prod", factors) if !factors.is_empty() => {
                        let mut level = Vec::new();
                        for f in factors {
                            level.push(resolve(&ids, &mut uses, ln, f)?);
                        }
                        while level.len() > 1 {
                            let mut next = Vec::new();
                            for pr in level.chunks(2) {
                                if let [a, b] = pr {
                                    let g = Gate::Mul { l: *a, lc: one.clone(), r: *b, rc: one.clone() };
                                    next.push(push(&mut gates, &mut uses, &mut def_line, ln, g));
                                } else {
                                    next.push(pr[0]);
                                }
                            }
                            level = next;
                        }
                        level[0]
                    }
                    _ => return Err(Error::parse(ln, format!("malformed gate line `{l}`"))),
                };
                ids.insert(lab, id);
            }
            _ => return Err(Error::parse(ln, format!("unrecognised line `{l}`"))),
        }
    }
    if outputs.is_empty() {
        return Err(Error::parse(kind_ln, "no `output` line"));
    }
    if formula {
        if outputs.len() != 1 {
            return Err(Error::parse(kind_ln, "a formula has exactly one output"));
        }
        if let Some(g) = (0..gates.len()).find(|&g| g != outputs[0] && uses[g] == 0) {
            return Err(Error::parse(def_line[g], "formula gate is never used"));
        }
    }
    Circuit::new(field, nvars, gates, outputs).map_err(|e| Error::parse(kind_ln, e.to_string()))
}

fn parse_abp(field: Field, nvars: usize, body: &[(usize, &str)], kind_ln: usize) -> Result<Abp> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut source = None;
    let mut sinks = Vec::new();
    let vertex = |ids: &HashMap<u64, usize>, ln: usize, tok: &str| -> Result<usize> {
        let lab = number(ln, tok)?;
        ids.get(&lab)
            .copied()
            .ok_or_else(|| Error::parse(ln, format!("undeclared vertex {lab}")))
    };
    for &(ln, l) in body {
        let t = tokens(l).map_err(|e| Error::parse(ln, e))?;
        match t.as_slice() {
            ["vertex", lab] => {
                let lab = number(ln, lab)?;
                let next = ids.len();
                if ids.insert(lab, next).is_some() {
                    return Err(Error::parse(ln, format!("vertex {lab} declared twice")));
                }
            }
            ["edge", u, v, kind, args @ ..] => {
                let from = vertex(&ids, ln, u)?;
                let to = vertex(&ids, ln, v)?;
                let var = |tok: &str| -> Result<usize> {
                    let i = number(ln, tok)? as usize;
                    if i >= nvars {
                        return Err(Error::parse(ln, format!("variable {i} out of range (nvars {nvars})")));
                    }
                    Ok(i)
                };
                match (*kind, args) {
                    ("const", [a]) => edges.push(Edge { from, to, label: EdgeLabel::Const(nonzero(&field, ln, a)?) }),
                    ("varmul", [a, i]) => edges.push(Edge {
                        from,
                        to,
                        label: EdgeLabel::VarMul(nonzero(&field, ln, a)?, var(i)?),
                    }),
                    ("affine", coeffs) if coeffs.len() == nvars + 1 => {
                        let mut any = false;
                        for (i, c) in coeffs.iter().enumerate() {
                            let c = element(&field, ln, c)?;
                            if c.is_zero() {
                                continue;
                            }
                            any = true;
                            let label = if i == 0 { EdgeLabel::Const(c) } else { EdgeLabel::VarMul(c, i - 1) };
                            edges.push(Edge { from, to, label });
                        }
                        if !any {
                            return Err(Error::parse(ln, "affine edge label is zero"));
                        }
                    }
                    _ => return Err(Error::parse(ln, format!("malformed edge line `{l}`"))),
                }
            }
            ["source", s] => {
                if source.is_some() {
                    return Err(Error::parse(ln, "second `source` line"));
                }
                source = Some(vertex(&ids, ln, s)?);
            }
            ["sink", labels @ ..] if !labels.is_empty() => {
                for s in labels {
                    sinks.push(vertex(&ids, ln, s)?);
                }
            }
            _ => return Err(Error::parse(ln, format!("unrecognised line `{l}`"))),
        }
    }
    let source = source.ok_or_else(|| Error::parse(kind_ln, "no `source` line"))?;
    Abp::new(field, nvars, ids.len(), edges, source, sinks).map_err(|e| Error::parse(kind_ln, e.to_string()))
}

fn write_preamble(out: &mut String, field: &Field, nvars: usize, kind: &str) {
    out.push_str(&field.header());
    out.push('\n');
    out.push_str(&format!("nvars {nvars}\nkind {kind}\n"));
}

fn write_circuit(out: &mut String, c: &Circuit) {
    for (i, g) in c.gates().iter().enumerate() {
        let line = match g {
            Gate::Input(v) => format!("gate {i} input {v}"),
            Gate::Const(a) => format!("gate {i} const {a}"),
            Gate::Add { l, lc, r, rc } => format!("gate {i} add {l} {lc} {r} {rc}"),
            Gate::Mul { l, lc, r, rc } => format!("gate {i} mul {l} {lc} {r} {rc}"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    for o in c.outputs() {
        out.push_str(&format!("output {o}\n"));
    }
}

fn write_abp(out: &mut String, a: &Abp) {
    for v in 0..a.nvertices() {
        out.push_str(&format!("vertex {v}\n"));
    }
    for e in a.edges() {
        let line = match &e.label {
            EdgeLabel::Const(c) => format!("edge {} {} const {c}", e.from, e.to),
            EdgeLabel::VarMul(c, i) => format!("edge {} {} varmul {c} {i}", e.from, e.to),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&format!("source {}\n", a.source()));
    for s in a.sinks() {
        out.push_str(&format!("sink {s}\n"));
    }
}

/// Serialize devices in canonical form, with `comments` as leading `#` lines.
pub fn serialize_devices(devices: &[Device], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    for (i, d) in devices.iter().enumerate() {
        if i > 0 {
            out.push_str("---\n");
        }
        write_preamble(&mut out, d.field(), d.nvars(), d.kind());
        match d {
            Device::Circuit(c) => write_circuit(&mut out, c),
            Device::Formula(f) => write_circuit(&mut out, f.circuit()),
            Device::Abp(a) => write_abp(&mut out, a),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "field p 2 ext 1 modulus [0 1]
nvars 2
kind circuit            # circuit | formula | abp
gate 0 input 0
gate 1 const [1]
gate 2 add 0 [1] 1 [1]
gate 3 mul 2 [1] 2 [1]
output 3
";

    #[test]
    fn example_file() {
        let d = parse_device(EXAMPLE).unwrap();
        assert_eq!(d.metrics().size, 4);
        let again = parse_device(&d.to_text()).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn forward_reference_reports_line() {
        let text = "field p 2 ext 1 modulus [0 1]\nnvars 1\nkind circuit\ngate 0 input 0\ngate 2 add 3 [1] 0 [1]\ngate 3 const [1]\noutput 2\n";
        match parse_device(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 5);
                assert!(msg.contains("forward"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_errors_carry_lines() {
        let base = "field p 3 ext 1 modulus [0 1]\nnvars 1\nkind circuit\ngate 0 input 0\n";
        let zero = format!("{base}gate 1 add 0 [0] 0 [1]\noutput 1\n");
        assert!(matches!(parse_device(&zero), Err(Error::Parse { line: 5, .. })));
        let var = format!("{base}gate 1 input 1\noutput 1\n");
        assert!(matches!(parse_device(&var), Err(Error::Parse { line: 5, .. })));
        let fanout = "field p 3 ext 1 modulus [0 1]\nnvars 1\nkind formula\ngate 0 input 0\ngate 1 mul 0 [1] 0 [1]\noutput 1\n";
        assert!(matches!(parse_device(fanout), Err(Error::Parse { line: 5, .. })));
    }

    #[test]
    fn sum_sugar_and_affine_edges() {
        let text = "field p 5 ext 1 modulus [0 1]\nnvars 3\nkind circuit\ngate 0 input 0\ngate 1 input 1\ngate 2 input 2\ngate 9 sum 0 [1] 1 [2] 2 [3]\noutput 9\n";
        let d = parse_device(text).unwrap();
        let f = d.field().clone();
        let pt = [f.from_int(1), f.from_int(1), f.from_int(1)];
        assert_eq!(d.evaluate(&pt).unwrap()[0], f.from_int(1));
        let abp = "field p 5 ext 1 modulus [0 1]\nnvars 2\nkind abp\nvertex 0\nvertex 1\nedge 0 1 affine [1] [0] [2]\nsource 0\nsink 1\n";
        let d = parse_device(abp).unwrap();
        let pt = [f.from_int(3), f.from_int(2)];
        assert_eq!(d.evaluate(&pt).unwrap()[0], f.from_int(0));
    }

    #[test]
    fn multi_document_roundtrip() {
        let d = parse_device(EXAMPLE).unwrap();
        let text = serialize_devices(&[d.clone(), d.clone()], &["two copies".into()]);
        assert_eq!(parse_devices(&text).unwrap(), vec![d.clone(), d]);
    }
}
