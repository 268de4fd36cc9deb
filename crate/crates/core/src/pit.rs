//! Polynomial identity testing: random evaluation, evaluation on a hitting
//! set, and exact expansion.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ff::{FieldElement, FieldEmbedding};
use crate::gen::HittingSet;
use crate::ir::Circuit;
use crate::poly::{expand_circuit, ExpandCaps};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PitMethod {
    Random,
    HittingSet,
    BruteForce,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PitVerdict {
    pub is_zero: bool,
    pub method: PitMethod,
    /// A point where the circuit is non-zero, possibly in an extension field.
    pub witness: Option<Vec<FieldElement>>,
    pub points_used: u64,
    /// For random testing, the probability that a non-zero circuit is
    /// declared zero.
    pub error_bound: Option<f64>,
    pub warnings: Vec<String>,
}

impl PitVerdict {
    /// Single-line JSON.
    pub fn to_json(&self) -> String {
        let witness = self
            .witness
            .as_ref()
            .map(|w| w.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        let field = self.witness.as_ref().and_then(|w| w.first()).map(|x| x.field().header());
        let out = VerdictJson {
            is_zero: self.is_zero,
            method: self.method,
            witness,
            error_bound: self.error_bound,
            witness_field: field,
            points_used: self.points_used,
            warnings: &self.warnings,
        };
        serde_json::to_string(&out).expect("verdicts serialize")
    }
}

#[derive(serde::Serialize)]
struct VerdictJson<'a> {
    is_zero: bool,
    method: PitMethod,
    witness: Option<Vec<String>>,
    error_bound: Option<f64>,
    witness_field: Option<String>,
    points_used: u64,
    warnings: &'a [String],
}

/// Evaluate `c` at random points of `S^n`, `S` the first `set_size`
/// canonical elements of the field or of an extension large enough.
pub fn pit_random(c: &Circuit, trials: u64, set_size: u64, seed: u64) -> Result<PitVerdict> {
    if set_size == 0 {
        return Err(Error::usage("set size must be positive"));
    }
    let emb = FieldEmbedding::extension_with_at_least(c.field(), set_size)?;
    let set = emb.ext().canonical_elements(set_size as usize)?;
    let cc = c.embed(&emb)?;
    let deg = c.metrics().degree_bound;
    let mut warnings = Vec::new();
    if set_size <= deg {
        warnings.push(format!("set size {set_size} does not exceed the degree bound {deg}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let point: Vec<FieldElement> = (0..c.nvars())
            .map(|_| set[rng.random_range(0..set.len())].clone())
            .collect();
        if cc.evaluate(&point)?.iter().any(|v| !v.is_zero()) {
            return Ok(PitVerdict {
                is_zero: false,
                method: PitMethod::Random,
                witness: Some(point),
                points_used: t + 1,
                error_bound: None,
                warnings,
            });
        }
    }
    let ratio = (deg as f64 / set_size as f64).min(1.0);
    Ok(PitVerdict {
        is_zero: true,
        method: PitMethod::Random,
        witness: None,
        points_used: trials,
        error_bound: Some(ratio.powf(trials as f64)),
        warnings,
    })
}

/// Evaluate `c` on every point of `h` and report the first non-zero one.
pub fn pit_hitting_set(c: &Circuit, h: &HittingSet) -> Result<PitVerdict> {
    if c.nvars() != h.n {
        return Err(Error::usage(format!(
            "circuit has {} variables, hitting set points have {}",
            c.nvars(),
            h.n
        )));
    }
    let emb = FieldEmbedding::new(c.field(), &h.field)?;
    let cc = c.embed(&emb)?;
    let mut warnings = Vec::new();
    let deg = c.metrics().degree_bound;
    if deg > h.provenance.class_degree {
        warnings.push(format!(
            "circuit degree bound {deg} exceeds the class degree {} of the hitting set",
            h.provenance.class_degree
        ));
    }
    let hit = h
        .points
        .par_iter()
        .map(|p| cc.evaluate(p).map(|v| v.iter().any(|x| !x.is_zero())))
        .collect::<Result<Vec<bool>>>()?
        .iter()
        .position(|&b| b);
    Ok(PitVerdict {
        is_zero: hit.is_none(),
        method: PitMethod::HittingSet,
        witness: hit.map(|i| h.points[i].clone()),
        points_used: hit.map_or(h.len() as u64, |i| i as u64 + 1),
        error_bound: None,
        warnings,
    })
}

/// Exact test by expansion. For a non-zero circuit, a witness is chosen one
/// variable at a time from the first `deg + 1` canonical elements of the
/// field, or of an extension when the field has at most `deg` elements.
pub fn pit_bruteforce(c: &Circuit, caps: &ExpandCaps) -> Result<PitVerdict> {
    let polys = expand_circuit(c, caps)?;
    let Some(mut poly) = polys.into_iter().find(|f| !f.is_zero()) else {
        return Ok(PitVerdict {
            is_zero: true,
            method: PitMethod::BruteForce,
            witness: None,
            points_used: 0,
            error_bound: None,
            warnings: Vec::new(),
        });
    };
    let deg = poly.degree().unwrap_or(0);
    let emb = FieldEmbedding::extension_with_at_least(c.field(), deg + 1)?;
    let grid = emb.ext().canonical_elements(deg as usize + 1)?;
    poly = poly.embed(&emb)?;
    let mut witness = Vec::with_capacity(c.nvars());
    let mut tried = 0u64;
    for v in 0..c.nvars() {
        let mut next = None;
        for a in &grid {
            tried += 1;
            let r = poly.restrict(&BTreeMap::from([(0, a.clone())]))?;
            if !r.is_zero() {
                next = Some((a.clone(), r));
                break;
            }
        }
        let (a, r) = next.ok_or_else(|| Error::Internal(format!("no grid value for variable {v} keeps the polynomial non-zero")))?;
        witness.push(a);
        poly = r;
    }
    let value = c.embed(&emb)?.evaluate(&witness)?;
    if value.iter().all(|x| x.is_zero()) {
        return Err(Error::Integrity("brute-force witness evaluates to zero".into()));
    }
    Ok(PitVerdict {
        is_zero: false,
        method: PitMethod::BruteForce,
        witness: Some(witness),
        points_used: tried,
        error_bound: None,
        warnings: Vec::new(),
    })
}
