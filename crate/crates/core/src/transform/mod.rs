//! Device-level mod-p decomposition and p-th roots, Kronecker substitution
//! and simulation of extension-field circuits over a subfield.
//!
//! A type vector `a ∈ {0..p-1}^n` names the component `f_a` of
//! `f = Σ_a f_a^p · x^a`. Multi-output results list components in
//! lexicographic order of type vectors (see [`type_vectors`]).

mod abp;
mod circuit;
mod extension;
mod formula;
mod kronecker;

use crate::error::{Error, Result};

pub use abp::{mod_p_decompose_abp, pth_root_abp, DecomposedAbp};
pub use circuit::{mod_p_decompose_circuit, pth_root_circuit, pth_root_circuit_verified, DecomposedCircuit};
pub use extension::{simulate_extension, SimulatedExtension};
pub use formula::{mod_p_decompose_formula, pth_root_formula, DecomposedFormula};
pub use kronecker::kronecker_substitution_circuit;

/// Knobs shared by the transforms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransformOptions {
    /// Refuse inputs with `p^n > 2^max_blowup_bits`.
    pub max_blowup_bits: u32,
    /// Remove gates and vertices that cannot reach an output.
    pub prune: bool,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            max_blowup_bits: 24,
            prune: true,
        }
    }
}

/// Sizes recorded by a transform, emitted as provenance comments.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TransformReport {
    pub transform: String,
    pub p: u64,
    pub n: usize,
    pub input_size: usize,
    /// Size before pruning; formula transforms fold zeros while building and
    /// report the output size here.
    pub unpruned_size: usize,
    pub output_size: usize,
    /// The size bound the construction guarantees.
    pub bound: u128,
}

impl TransformReport {
    pub fn comments(&self) -> Vec<String> {
        vec![
            format!("transform {}", self.transform),
            format!("p {} n {}", self.p, self.n),
            format!("input size {}", self.input_size),
            format!("output size {} (before pruning {})", self.output_size, self.unpruned_size),
            format!("size bound {}", self.bound),
        ]
    }

    pub(crate) fn check_bound(&self) -> Result<()> {
        if self.unpruned_size as u128 > self.bound {
            return Err(Error::Internal(format!(
                "{}: size {} exceeds the bound {}",
                self.transform, self.unpruned_size, self.bound
            )));
        }
        Ok(())
    }
}

/// `p^n`, refusing blow-ups above the configured cap.
pub(crate) fn type_count(p: u64, n: usize, opts: &TransformOptions, projected: impl Fn(u128) -> u128) -> Result<usize> {
    let count = (p as u128).checked_pow(n as u32);
    match count {
        Some(c) if c <= 1u128 << opts.max_blowup_bits => Ok(c as usize),
        _ => {
            let shown = count.map(&projected).map_or_else(|| "overflow".to_string(), |s| s.to_string());
            Err(Error::resource(format!(
                "p^n = {p}^{n} exceeds the blow-up cap of 2^{} (projected size {shown})",
                opts.max_blowup_bits
            )))
        }
    }
}

/// All type vectors in lexicographic order; index `t` has digits of `t` in
/// base `p`, most significant first.
pub fn type_vectors(p: u64, n: usize) -> Vec<Vec<u32>> {
    let count = (p as usize).pow(n as u32);
    (0..count).map(|t| type_of(t, p, n)).collect()
}

pub(crate) fn type_of(mut t: usize, p: u64, n: usize) -> Vec<u32> {
    let mut a = vec![0u32; n];
    for i in (0..n).rev() {
        a[i] = (t % p as usize) as u32;
        t /= p as usize;
    }
    a
}

pub(crate) fn index_of(a: &[u32], p: u64) -> usize {
    a.iter().fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

pub(crate) fn pow_u128(b: u128, e: u32) -> u128 {
    b.saturating_pow(e)
}
