use rayon::prelude::*;

use super::Generator;
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElement, FieldEmbedding};
use crate::ir::text::{content_lines, tokens};

#[derive(Clone, Debug)]
pub struct HittingSetOptions {
    /// Evaluation set; defaults to the first `dD + 1` canonical elements of
    /// the field, or of the smallest extension with that many elements.
    pub set: Option<Vec<FieldElement>>,
    pub dedup: bool,
    /// Refuse grids with more points than this.
    pub max_points: u64,
}

impl Default for HittingSetOptions {
    fn default() -> Self {
        HittingSetOptions {
            set: None,
            dedup: false,
            max_points: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct HittingSetProvenance {
    pub seed_len: usize,
    pub set_size: usize,
    /// Degree `d` of the class the set is meant for.
    pub class_degree: u64,
    pub generator_degree: u64,
    /// Component evaluations performed: `|S|^ℓ · n`.
    pub evaluations: u128,
    pub deduplicated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HittingSet {
    pub field: Field,
    pub n: usize,
    pub points: Vec<Vec<FieldElement>>,
    pub provenance: HittingSetProvenance,
}

/// `{G(α) : α ∈ S^ℓ}` in odometer order (last seed coordinate fastest).
pub fn hitting_set_from_generator(g: &Generator, d: u64, opts: &HittingSetOptions) -> Result<HittingSet> {
    let need = d
        .checked_mul(g.degree)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| Error::resource("dD + 1 overflows"))?;
    let (g, set) = match &opts.set {
        Some(set) => {
            if (set.len() as u64) < need {
                return Err(Error::usage(format!(
                    "evaluation set has {} elements; Schwartz-Zippel needs |S| ≥ dD + 1 = {need}",
                    set.len()
                )));
            }
            let Some(first) = set.first() else {
                return Err(Error::usage("empty evaluation set"));
            };
            let emb = FieldEmbedding::new(g.field(), first.field())?;
            (g.embed(&emb)?, set.clone())
        }
        None => {
            let emb = FieldEmbedding::extension_with_at_least(g.field(), need)?;
            let set = emb.ext().canonical_elements(need as usize)?;
            (g.embed(&emb)?, set)
        }
    };
    let s = set.len() as u64;
    let count = s
        .checked_pow(g.seed_len as u32)
        .filter(|&c| c <= opts.max_points)
        .ok_or_else(|| {
            Error::resource(format!(
                "grid of {s}^{} points exceeds the cap of {}",
                g.seed_len, opts.max_points
            ))
        })?;
    let ell = g.seed_len;
    let mut points: Vec<Vec<FieldElement>> = (0..count)
        .into_par_iter()
        .map(|idx| {
            let mut seed = vec![set[0].clone(); ell];
            let mut t = idx;
            for x in seed.iter_mut().rev() {
                *x = set[(t % s) as usize].clone();
                t /= s;
            }
            g.evaluate(&seed)
        })
        .collect::<Result<_>>()?;
    #[allow(clippy::mutable_key_type)]
    if opts.dedup {
        let mut seen = std::collections::HashSet::new();
        points.retain(|p| seen.insert(p.clone()));
    }
    Ok(HittingSet {
        field: g.field().clone(),
        n: g.nvars_out(),
        points,
        provenance: HittingSetProvenance {
            seed_len: ell,
            set_size: set.len(),
            class_degree: d,
            generator_degree: g.degree,
            evaluations: count as u128 * g.nvars_out() as u128,
            deduplicated: opts.dedup,
        },
    })
}

impl HittingSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_text(&self) -> String {
        let p = &self.provenance;
        let mut out = format!("hitting-set n {} count {}\n{}\n", self.n, self.points.len(), self.field.header());
        out.push_str(&format!(
            "# seed {} set {} class-degree {} generator-degree {} evaluations {}{}\n",
            p.seed_len,
            p.set_size,
            p.class_degree,
            p.generator_degree,
            p.evaluations,
            if p.deduplicated { " dedup" } else { "" }
        ));
        for pt in &self.points {
            let line: Vec<String> = pt.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<HittingSet> {
        let provenance = text
            .lines()
            .find_map(|l| l.trim().strip_prefix('#').map(parse_provenance))
            .flatten();
        let mut lines = content_lines(text).into_iter();
        let (ln, head) = lines.next().ok_or_else(|| Error::parse(1, "empty hitting-set file"))?;
        let h: Vec<&str> = head.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(ln, format!("expected an integer, found `{s}`")));
        let (n, count) = match h.as_slice() {
            ["hitting-set", "n", a, "count", b] => (num(a)?, num(b)?),
            _ => return Err(Error::parse(ln, "expected `hitting-set n <n> count <N>`")),
        };
        let (fln, fline) = lines.next().ok_or_else(|| Error::parse(ln + 1, "missing field header"))?;
        let field = Field::parse_header(fline).map_err(|e| Error::parse(fln, e.to_string()))?;
        let mut points = Vec::with_capacity(count);
        for (ln, l) in lines {
            let toks = tokens(l).map_err(|e| Error::parse(ln, e))?;
            if toks.len() != n {
                return Err(Error::parse(ln, format!("point has {} coordinates, expected {n}", toks.len())));
            }
            let pt = toks
                .iter()
                .map(|t| field.parse_element(t).map_err(|e| Error::parse(ln, e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            points.push(pt);
        }
        if points.len() != count {
            return Err(Error::parse(ln, format!("header announces {count} points, found {}", points.len())));
        }
        if points.is_empty() {
            return Err(Error::parse(ln, "hitting set is empty"));
        }
        let provenance = provenance.unwrap_or(HittingSetProvenance {
            seed_len: n,
            set_size: 0,
            class_degree: u64::MAX,
            generator_degree: 1,
            evaluations: 0,
            deduplicated: false,
        });
        Ok(HittingSet {
            field,
            n,
            points,
            provenance,
        })
    }
}

fn parse_provenance(line: &str) -> Option<HittingSetProvenance> {
    let t: Vec<&str> = line.split_whitespace().collect();
    match t.as_slice() {
        ["seed", a, "set", b, "class-degree", c, "generator-degree", d, "evaluations", e, rest @ ..] => {
            Some(HittingSetProvenance {
                seed_len: a.parse().ok()?,
                set_size: b.parse().ok()?,
                class_degree: c.parse().ok()?,
                generator_degree: d.parse().ok()?,
                evaluations: e.parse().ok()?,
                deduplicated: rest == ["dedup"],
            })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::CircuitBuilder;

    #[test]
    fn grid_size_matches_count() {
        let f = Field::prime(5).unwrap();
        let g = Generator::identity(&f, 2).unwrap();
        let h = hitting_set_from_generator(&g, 2, &HittingSetOptions::default()).unwrap();
        assert_eq!(h.len(), 9);
        assert_eq!(h.provenance.evaluations, 18);
        assert_eq!(h.points[1], vec![f.zero(), f.one()]);
        assert_eq!(HittingSet::parse(&h.to_text()).unwrap(), h);
    }

    #[test]
    fn boolean_cube_from_identity() {
        let f = Field::prime(2).unwrap();
        let g = Generator::identity(&f, 3).unwrap();
        let h = hitting_set_from_generator(&g, 1, &HittingSetOptions::default()).unwrap();
        assert_eq!(h.len(), 8);
        assert_eq!(h.field, f);
    }

    #[test]
    fn small_field_moves_to_extension() {
        let f = Field::prime(2).unwrap();
        let g = Generator::identity(&f, 1).unwrap();
        let h = hitting_set_from_generator(&g, 3, &HittingSetOptions::default()).unwrap();
        assert_eq!(h.field.order(), 4);
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn dedup_and_set_checks() {
        let f = Field::prime(3).unwrap();
        let mut b = CircuitBuilder::new(f.clone(), 2);
        let x = b.input(0);
        let c = b.finish(vec![x]).unwrap();
        let g = Generator::from_components(2, vec![c]).unwrap();
        let opts = HittingSetOptions {
            dedup: true,
            ..Default::default()
        };
        let h = hitting_set_from_generator(&g, 2, &opts).unwrap();
        assert_eq!(h.len(), 3);
        let small = HittingSetOptions {
            set: Some(vec![f.zero()]),
            ..Default::default()
        };
        let err = hitting_set_from_generator(&g, 2, &small).unwrap_err();
        assert!(err.to_string().contains("Schwartz-Zippel"));
    }
}
