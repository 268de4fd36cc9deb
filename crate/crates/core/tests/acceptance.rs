//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines show up in plain
//! `cargo test` output. Ground truth comes from brute-force expansion and
//! from arithmetic written out here, not from the transforms under test.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use algcirc::designs::{greedy_design, rs_design};
use algcirc::ff::{Field, FieldElement};
use algcirc::gen::{
    bootstrap_generator, hitting_set_from_generator, hybrid_circuit, hybrid_index, Generator, HittingSetOptions,
    RandomFamily,
};
use algcirc::intslp::{check_binomial_window, pow2_factorial_slp, shamir_factorial_slp, slp_pow2, ConstantBinomialOracle};
use algcirc::ir::random::{random_abp, random_circuit, random_formula};
use algcirc::ir::{parse_device, Circuit, CircuitBuilder, Device};
use algcirc::pit::{pit_bruteforce, pit_hitting_set};
use algcirc::poly::{expand, expand_circuit, kronecker_decode, kronecker_encode, ExpandCaps, SparsePoly};
use algcirc::transform::{
    kronecker_substitution_circuit, mod_p_decompose_abp, mod_p_decompose_circuit, mod_p_decompose_formula,
    pth_root_abp, pth_root_circuit, pth_root_formula, simulate_extension, TransformOptions,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Wall-clock budgets.
const BUDGET_PTH_ROOT: Duration = Duration::from_secs(120);
const BUDGET_RS_DESIGNS: Duration = Duration::from_secs(30);
/// Largest admissible constant of the extension-simulation size bound.
const MAX_SIMULATION_CONSTANT: usize = 16;

/// Criteria whose failure has been analysed and recorded; the gate still
/// prints FAIL for them but does not abort.
const KNOWN_FAILURES: &[u32] = &[12];

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn caps() -> ExpandCaps {
    ExpandCaps {
        max_degree: 4096,
        max_terms: 1_000_000,
    }
}

fn expand_one(c: &Circuit) -> SparsePoly {
    expand_circuit(c, &caps()).expect("expansion within caps").remove(0)
}

fn expand_device(d: &Device) -> Vec<SparsePoly> {
    expand(d, &caps()).expect("expansion within caps")
}

fn rng(tag: u64, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(tag << 32 | i)
}

/// `x^a` on `n` variables.
fn monomial(field: &Field, a: &[u32]) -> SparsePoly {
    SparsePoly::from_terms(field, a.len(), vec![(a.to_vec(), field.one())]).unwrap()
}

/// All type vectors in `{0..p-1}^n`, most significant digit first.
fn all_types(p: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..p).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// `Σ_a f_a^p · x^a`, with `f_a^p` by repeated multiplication.
fn recombine(field: &Field, n: usize, comps: &[(Vec<u32>, SparsePoly)]) -> SparsePoly {
    let p = field.p();
    let mut acc = SparsePoly::zero(field, n);
    for (a, fa) in comps {
        let mut pw = SparsePoly::constant(field, n, field.one());
        for _ in 0..p {
            pw = pw.mul(fa).unwrap();
        }
        acc = acc.add(&pw.mul(&monomial(field, a)).unwrap()).unwrap();
    }
    acc
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut worst = 0f64;
    for p in [2u64, 3, 5] {
        let field = Field::prime(p).unwrap();
        for n in 1..=3usize {
            let results: Vec<std::result::Result<f64, String>> = (0..100u64)
                .into_par_iter()
                .map(|i| {
                    let mut r = rng(p * 10 + n as u64, i);
                    let size = r.random_range(1..=15);
                    let phi = random_circuit(&field, n, size, 3, &mut r);
                    let powered = phi.build_power(p).map_err(|e| e.to_string())?;
                    let (root, _) = pth_root_circuit(&powered, &TransformOptions::default()).map_err(|e| e.to_string())?;
                    if expand_one(&root) != expand_one(&phi) {
                        return Err(format!("p {p} n {n} instance {i}: root differs"));
                    }
                    let s = powered.size() as f64;
                    let bound = 3.0 * s * (p as f64).powi(2 * n as i32) + 2f64.powi(n as i32);
                    if root.size() as f64 > bound {
                        return Err(format!("p {p} n {n} instance {i}: size {} > {bound}", root.size()));
                    }
                    Ok(root.size() as f64 / bound)
                })
                .collect();
            for r in results {
                worst = worst.max(r?);
                checked += 1;
            }
        }
    }
    let t = start.elapsed();
    if t > BUDGET_PTH_ROOT {
        return Err(format!("{checked} instances correct but took {t:.1?} (budget {BUDGET_PTH_ROOT:?})"));
    }
    Ok(format!("{checked} instances, max size/bound {worst:.4}, {t:.1?}"))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for p in [2u64, 3, 5] {
        let field = Field::prime(p).unwrap();
        for n in 1..=3usize {
            let results: Vec<std::result::Result<(), String>> = (0..100u64)
                .into_par_iter()
                .map(|i| {
                    let mut r = rng(p * 10 + n as u64, i);
                    let size = r.random_range(1..=15);
                    let phi = random_circuit(&field, n, size, 3, &mut r);
                    let d = mod_p_decompose_circuit(&phi, &TransformOptions::default()).map_err(|e| e.to_string())?;
                    let polys = expand_circuit(&d.circuit, &caps()).map_err(|e| e.to_string())?;
                    let comps: Vec<(Vec<u32>, SparsePoly)> = all_types(p as u32, n).into_iter().zip(polys).collect();
                    if d.types != comps.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>() {
                        return Err("type vectors out of order".into());
                    }
                    if recombine(&field, n, &comps) != expand_one(&phi) {
                        return Err(format!("p {p} n {n} instance {i}: components do not recombine"));
                    }
                    Ok(())
                })
                .collect();
            for r in results {
                r?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} instances recombine exactly"))
}

fn product_depth_of(d: &Device) -> usize {
    d.metrics().product_depth
}

fn criterion_3() -> Outcome {
    let n = 2usize;
    let mut checked = 0;
    for p in [2u64, 3] {
        let field = Field::prime(p).unwrap();
        for i in 0..50u64 {
            let mut r = rng(300 + p, i);
            let size = r.random_range(1..=12);
            let depth = r.random_range(0..=2);
            let phi = random_formula(&field, n, size, depth, &mut r);
            let s = phi.circuit().size() as f64;
            let d = phi.metrics().product_depth;
            let dec = mod_p_decompose_formula(&phi, &TransformOptions::default()).map_err(|e| e.to_string())?;
            let mut total = 0;
            let mut comps = Vec::new();
            for (a, f) in dec.types.iter().zip(&dec.components) {
                // fan-out validation on re-parse
                let dev = parse_device(&Device::Formula(f.clone()).to_text()).map_err(|e| e.to_string())?;
                if !matches!(dev, Device::Formula(_)) {
                    return Err("component is not a formula".into());
                }
                if product_depth_of(&dev) > d + 1 {
                    return Err(format!("p {p} instance {i}: product depth {} > {}", product_depth_of(&dev), d + 1));
                }
                total += f.circuit().size();
                comps.push((a.clone(), expand_device(&dev).remove(0)));
            }
            let bound = 3.0 * s * n as f64 * (p as f64).powi((n * (d + 3)) as i32);
            if total as f64 > bound {
                return Err(format!("p {p} instance {i}: size {total} > {bound}"));
            }
            let f = expand_device(&Device::Formula(phi.clone())).remove(0);
            if recombine(&field, n, &comps) != f {
                return Err(format!("p {p} instance {i}: components do not recombine"));
            }
            let powered = phi.power(p).map_err(|e| e.to_string())?;
            let (root, _) = pth_root_formula(&powered, &TransformOptions::default()).map_err(|e| e.to_string())?;
            if expand_device(&Device::Formula(root)).remove(0) != f {
                return Err(format!("p {p} instance {i}: root differs"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} formulae"))
}

fn criterion_4() -> Outcome {
    let n = 2usize;
    let mut checked = 0;
    for p in [2u64, 3] {
        let field = Field::prime(p).unwrap();
        for i in 0..50u64 {
            let mut r = rng(400 + p, i);
            let v = r.random_range(2..=10);
            let phi = random_abp(&field, n, v, &mut r);
            let dec = mod_p_decompose_abp(&phi, &TransformOptions::default()).map_err(|e| e.to_string())?;
            let bound = phi.nvertices() * (p as usize).pow(n as u32);
            if dec.abp.nvertices() > bound {
                return Err(format!("p {p} instance {i}: {} vertices > {bound}", dec.abp.nvertices()));
            }
            let f = expand_device(&Device::Abp(phi.clone())).remove(0);
            let comps: Vec<(Vec<u32>, SparsePoly)> = dec
                .types
                .iter()
                .cloned()
                .zip(expand_device(&Device::Abp(dec.abp.clone())))
                .collect();
            if recombine(&field, n, &comps) != f {
                return Err(format!("p {p} instance {i}: components do not recombine"));
            }
            let powered = phi.power(p).map_err(|e| e.to_string())?;
            let (root, _) = pth_root_abp(&powered, &TransformOptions::default()).map_err(|e| e.to_string())?;
            if expand_device(&Device::Abp(root)).remove(0) != f {
                return Err(format!("p {p} instance {i}: root differs"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} programs"))
}

/// Exhaustive check of set sizes and pairwise intersections on bitsets.
fn check_sets(sets: &[Vec<usize>], ell: usize, m: usize, r: usize) -> std::result::Result<(), String> {
    let words = ell.div_ceil(64);
    let mut bits = vec![0u64; words * sets.len()];
    for (i, s) in sets.iter().enumerate() {
        if s.len() != m || s.iter().any(|&x| x == 0 || x > ell) {
            return Err(format!("set {i} malformed"));
        }
        for &x in s {
            bits[i * words + (x - 1) / 64] |= 1 << ((x - 1) % 64);
        }
        if bits[i * words..(i + 1) * words].iter().map(|w| w.count_ones() as usize).sum::<usize>() != m {
            return Err(format!("set {i} repeats an element"));
        }
    }
    let row = |i: usize| &bits[i * words..(i + 1) * words];
    let bad = (0..sets.len()).into_par_iter().find_any(|&i| {
        (i + 1..sets.len()).any(|j| {
            let common: u32 = row(i).iter().zip(row(j)).map(|(a, b)| (a & b).count_ones()).sum();
            common as usize > r
        })
    });
    match bad {
        Some(i) => Err(format!("set {i} meets a later set in more than {r} points")),
        None => Ok(()),
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for m in [2usize, 3, 4, 5] {
        for c in [2usize, 3] {
            for r in 1..=m.min(3) {
                let n = m.pow(((c - 1) * r) as u32);
                let d = rs_design(n, m, c, r).map_err(|e| format!("(m {m} c {c} r {r}): {e}"))?;
                if d.ell != m.pow(c as u32) || d.sets.len() != n {
                    return Err(format!("(m {m} c {c} r {r}): ℓ {} with {} sets", d.ell, d.sets.len()));
                }
                check_sets(&d.sets, d.ell, m, r).map_err(|e| format!("(m {m} c {c} r {r}): {e}"))?;
                count += 1;
            }
        }
    }
    let t = start.elapsed();
    if t > BUDGET_RS_DESIGNS {
        return Err(format!("{count} designs verified in {t:.1?}, over budget {BUDGET_RS_DESIGNS:?}"));
    }
    Ok(format!("{count} parameter sets, largest n = 15625, {t:.1?}"))
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

fn criterion_6() -> Outcome {
    let mut report = Vec::new();
    for (n, m) in [(16usize, 8usize), (32, 10), (64, 12)] {
        let d = greedy_design(n, m, None).map_err(|e| e.to_string())?;
        let r = ceil_log2(n);
        let floor_log = (usize::BITS - 1 - n.leading_zeros()) as usize;
        let ell_cap = 8 * m * m / floor_log;
        if d.sets.len() != n {
            return Err(format!("(n {n} m {m}): {} sets", d.sets.len()));
        }
        check_sets(&d.sets, d.ell, m, r).map_err(|e| format!("(n {n} m {m}): {e}"))?;
        if d.ell > ell_cap {
            return Err(format!("(n {n} m {m}): ℓ {} > {ell_cap}", d.ell));
        }
        report.push(format!("ℓ({n},{m}) = {} ≤ {ell_cap}", d.ell));
    }
    Ok(report.join(", "))
}

fn criterion_7() -> Outcome {
    let field = Field::prime(3).unwrap();
    let g = Generator::identity(&field, 2).map_err(|e| e.to_string())?;
    let (d, big_d, ell) = (2u64, g.degree, g.seed_len);
    let h = hitting_set_from_generator(&g, d, &HittingSetOptions::default()).map_err(|e| e.to_string())?;
    let want = (d * big_d + 1).pow(ell as u32) as usize;
    if h.provenance.set_size != 3 || big_d != 1 || ell != 2 || h.len() != want || want != 9 {
        return Err(format!("|S| {} D {big_d} ℓ {ell}: {} points, expected {want}", h.provenance.set_size, h.len()));
    }
    Ok(format!("{} points = (dD+1)^ℓ", h.len()))
}

fn criterion_8() -> Outcome {
    let field = Field::new(2, 2).unwrap();
    let d = 4u64;
    let sets: Vec<_> = (1..=3)
        .map(|n| {
            let g = Generator::identity(&field, n).unwrap();
            hitting_set_from_generator(&g, d, &HittingSetOptions::default()).unwrap()
        })
        .collect();
    let mut found = 0;
    let mut tried = 0u64;
    while found < 500 {
        let mut r = rng(800, tried);
        tried += 1;
        let n = r.random_range(1..=3);
        let s = r.random_range(1..=6);
        let c = random_circuit(&field, n, s, d, &mut r);
        let brute = pit_bruteforce(&c, &caps()).map_err(|e| e.to_string())?;
        if brute.is_zero {
            continue;
        }
        found += 1;
        let v = pit_hitting_set(&c, &sets[n - 1]).map_err(|e| e.to_string())?;
        if v.is_zero {
            return Err(format!("instance {tried}: nonzero circuit reported zero by the hitting set"));
        }
    }
    Ok(format!("500 nonzero circuits hit ({tried} drawn), grids of {} / {} / {} points", sets[0].len(), sets[1].len(), sets[2].len()))
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    for b in [2u32, 3, 5] {
        for i in 0..100u64 {
            let mut r = rng(900 + b as u64, i);
            let field = Field::prime([2u64, 3, 5, 7][r.random_range(0..4)]).unwrap();
            let m = r.random_range(1..=2);
            let terms: Vec<(Vec<u32>, FieldElement)> = (0..r.random_range(1..=6))
                .map(|_| {
                    let e0 = r.random_range(0..=31u32);
                    let e = if m == 2 { vec![e0, r.random_range(0..=31 - e0)] } else { vec![e0] };
                    (e, field.random_element(&mut r))
                })
                .collect();
            let g = SparsePoly::from_terms(&field, m, terms).unwrap();
            let (f, k) = kronecker_encode(&g, b, None).map_err(|e| e.to_string())?;
            if f.ideg() > b - 1 {
                return Err(format!("b {b} instance {i}: encoded individual degree {}", f.ideg()));
            }
            if kronecker_decode(&f, b, k, m).map_err(|e| e.to_string())? != g {
                return Err(format!("b {b} instance {i}: decode∘encode differs"));
            }
            let c = Circuit::from_poly(&f).map_err(|e| e.to_string())?;
            let sub = kronecker_substitution_circuit(&c, m, b).map_err(|e| e.to_string())?;
            if expand_one(&sub) != g {
                return Err(format!("b {b} instance {i}: substitution circuit differs"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} polynomials"))
}

fn criterion_10() -> Outcome {
    let mut checked = 0;
    let mut worst = 0usize;
    let mut constant = 0;
    for (p, m) in [(2u64, 2usize), (3, 2)] {
        let ext = Field::new(p, m).unwrap();
        let base = Field::prime(p).unwrap();
        for i in 0..50u64 {
            let mut r = rng(1000 + p, i);
            let s = r.random_range(1..=12);
            let n = r.random_range(1..=2);
            let phi = random_circuit(&ext, n, s, 4, &mut r);
            let sim = simulate_extension(&phi, &base).map_err(|e| e.to_string())?;
            if sim.constant > MAX_SIMULATION_CONSTANT {
                return Err(format!("reported constant {}", sim.constant));
            }
            constant = sim.constant;
            let k = sim.k;
            let bound = sim.constant * k * k * k * phi.size();
            if sim.circuit.size() > bound {
                return Err(format!("F_{} instance {i}: size {} > {bound}", ext.order(), sim.circuit.size()));
            }
            worst = worst.max(sim.circuit.size() * 1000 / bound);
            // prime subfield: coefficient [c] of a coordinate maps to c·1
            let mut got = SparsePoly::zero(&ext, n);
            for (coord, beta) in expand_circuit(&sim.circuit, &caps()).unwrap().iter().zip(&sim.basis) {
                let lifted = SparsePoly::from_terms(
                    &ext,
                    n,
                    coord.terms().map(|(e, c)| (e.to_vec(), ext.from_int(c.coeffs()[0] as i64))),
                )
                .unwrap();
                got = got.add(&lifted.scale(beta)).unwrap();
            }
            if got != expand_one(&phi) {
                return Err(format!("F_{} instance {i}: coordinates do not recombine", ext.order()));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} circuits, C = {constant}, max size/bound {:.3}", worst as f64 / 1000.0))
}

fn circuit_text(text: &str) -> Circuit {
    parse_device(text).unwrap().to_circuit().unwrap()
}

fn check_hybrid(f: &Circuit, g: &Generator, want_index: usize, want: &SparsePoly) -> std::result::Result<(), String> {
    let h = hybrid_index(f, g, &caps()).map_err(|e| e.to_string())?;
    if h.index != want_index {
        return Err(format!("index {} expected {want_index}", h.index));
    }
    // independent check of the hybrid chain by expansion
    let prev = expand_one(&hybrid_circuit(f, g, want_index - 1).unwrap());
    let cur = expand_one(&hybrid_circuit(f, g, want_index).unwrap());
    if prev.is_zero() || !cur.is_zero() {
        return Err("hybrid chain does not switch at the reported index".into());
    }
    let got = expand_one(&h.restricted);
    if &got != want || h.restricted_poly != got {
        return Err(format!("restricted polynomial {got}, expected {want}"));
    }
    Ok(())
}

fn criterion_11() -> Outcome {
    let mut notes = Vec::new();
    let f2 = Field::prime(2).unwrap();
    for s in [2u64, 3, 4] {
        let b = bootstrap_generator(&RandomFamily::new(f2.clone(), 2, s), s).map_err(|e| e.to_string())?;
        let p = &b.params;
        let seed_ok = p.seed_len == 8 || (p.escalated && p.seed_len == 2usize.pow(p.c as u32));
        if !seed_ok || b.generator.nvars_out() != 32 {
            return Err(format!("s {s}: seed {} outputs {}", p.seed_len, b.generator.nvars_out()));
        }
        let cap = s.pow(2);
        for comp in &b.generator.components {
            let deg = expand_one(comp).degree().unwrap_or(0);
            if deg > cap {
                return Err(format!("s {s}: component degree {deg} > {cap}"));
            }
        }
        notes.push(format!("s {s}: seed {} (c {}), d {}", p.seed_len, p.c, p.d));
    }

    // instance A over F_3: G = (z1, z2, z1·z2), f = y3 - y1·y2
    let f3 = Field::prime(3).unwrap();
    let head3 = "field p 3 ext 1 modulus [0 1]\nnvars 2\nkind circuit\n";
    let comps = [
        "gate 0 input 0\noutput 0\n",
        "gate 0 input 1\noutput 0\n",
        "gate 0 input 0\ngate 1 input 1\ngate 2 mul 0 [1] 1 [1]\noutput 2\n",
    ];
    let g = Generator::from_components(2, comps.iter().map(|t| circuit_text(&format!("{head3}{t}"))).collect()).unwrap();
    let f = circuit_text("field p 3 ext 1 modulus [0 1]\nnvars 3\nkind circuit\ngate 0 input 0\ngate 1 input 1\ngate 2 mul 0 [1] 1 [1]\ngate 3 input 2\ngate 4 add 3 [1] 2 [2]\noutput 4\n");
    let want = SparsePoly::from_terms(&f3, 3, vec![(vec![1, 0, 0], f3.one()), (vec![0, 1, 1], f3.from_int(-1))]).unwrap();
    check_hybrid(&f, &g, 3, &want).map_err(|e| format!("instance A: {e}"))?;

    // instance B over F_5: G = (z1, z1², z2, z1·z2), f = y4 - y1·y3 + y2 - y1²
    let f5 = Field::prime(5).unwrap();
    let mut comps = Vec::new();
    for build in [0, 1, 2, 3] {
        let mut b = CircuitBuilder::new(f5.clone(), 2);
        let (z1, z2) = (b.input(0), b.input(1));
        let out = match build {
            0 => z1,
            1 => b.mul(z1, z1),
            2 => z2,
            _ => b.mul(z1, z2),
        };
        comps.push(b.finish(vec![out]).unwrap());
    }
    let g = Generator::from_components(2, comps).unwrap();
    let mut b = CircuitBuilder::new(f5.clone(), 4);
    let y: Vec<_> = (0..4).map(|i| b.input(i)).collect();
    let y1y3 = b.mul(y[0], y[2]);
    let y1sq = b.mul(y[0], y[0]);
    let t = b.add_with(y[3], f5.one(), y1y3, f5.from_int(-1));
    let u = b.add_with(y[1], f5.one(), y1sq, f5.from_int(-1));
    let out = b.add(t, u);
    let f = b.finish(vec![out]).unwrap();
    // f_3 = y4 - z1·z2 on (y4, z1, z2)
    let want = SparsePoly::from_terms(&f5, 3, vec![(vec![1, 0, 0], f5.one()), (vec![0, 1, 1], f5.from_int(-1))]).unwrap();
    check_hybrid(&f, &g, 4, &want).map_err(|e| format!("instance B: {e}"))?;
    notes.push("hybrids A (i = 3) and B (i = 4) verified".into());
    Ok(notes.join("; "))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::from(1), |a, k| a * k)
}

/// Row `2n` of Pascal's triangle.
fn pascal_row(r: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::from(1)];
    for _ in 0..r {
        let mut next = vec![BigInt::from(1)];
        next.extend(row.windows(2).map(|w| &w[0] + &w[1]));
        next.push(BigInt::from(1));
        row = next;
    }
    row
}

fn criterion_12() -> Outcome {
    let oracle = ConstantBinomialOracle;
    for n in 1..=30 {
        let r = shamir_factorial_slp(n, &oracle).map_err(|e| e.to_string())?;
        if r.slp.eval() != factorial(n) {
            return Err(format!("shamir n {n} wrong"));
        }
        let total: usize = r.levels.iter().map(|l| l.added).sum();
        let bound: usize = r.levels.iter().map(|l| l.oracle_len + l.constant_len + 3).sum::<usize>() + 1;
        if r.slp.len() != total + 1 || r.slp.len() > bound {
            return Err(format!("shamir n {n}: length {} against bound {bound}", r.slp.len()));
        }
    }
    for n in 1..=5u32 {
        if pow2_factorial_slp(n, &oracle).map_err(|e| e.to_string())?.eval() != factorial(1 << n) {
            return Err(format!("pow2 factorial n {n} wrong"));
        }
    }
    let p = slp_pow2(1000);
    if p.eval() != BigInt::from(1) << 1000 || p.len() > 22 {
        return Err(format!("2^1000: length {}", p.len()));
    }
    let mut failures = Vec::new();
    for n in 2..=10u32 {
        let r = check_binomial_window(n).map_err(|e| e.to_string())?;
        let row = pascal_row(2 * n as usize);
        // f(x, x^n) by hand: coefficient of x^e is C(2n, e) when e = i + jn with i, j < n
        let mut sub = vec![BigInt::from(0); (n * n) as usize];
        for i in 0..n {
            for j in 0..n {
                let e = (i + j * n) as usize;
                if e < row.len() {
                    sub[e] += &row[e];
                }
            }
        }
        let holds = (0..sub.len().max(row.len())).all(|e| {
            sub.get(e).cloned().unwrap_or_default() == row.get(e).cloned().unwrap_or_default()
        });
        if holds != r.identity_holds {
            return Err(format!("n {n}: identity check disagrees with the hand computation"));
        }
        if !holds {
            failures.push(format!("f(x,x^{n}) ≠ (x+1)^{} ({} mismatching coefficient)", 2 * n, r.mismatches.len()));
        }
        let central: BigInt = &row[n as usize] + 2;
        if n >= 3 && (r.f_at_0_1 != central.to_string() || !r.f_at_0_1_matches) {
            failures.push(format!("f(0,1) at n {n}"));
        }
    }
    if failures.is_empty() {
        Ok("all identities hold".into())
    } else {
        Err(format!("factorial and power SLPs exact; {}", failures.join(", ")))
    }
}

fn criterion_13() -> Outcome {
    for p in [2u64, 3, 5] {
        let f = Field::prime(p).unwrap();
        let mut b = CircuitBuilder::new(f.clone(), 1);
        let x = b.input(0);
        let xp = b.power(x, p);
        let out = b.add_with(xp, f.one(), x, f.from_int(-1));
        let c = b.finish(vec![out]).unwrap();
        if !f.elements().all(|a| c.evaluate(&[a]).unwrap()[0].is_zero()) {
            return Err(format!("x^{p} - x does not vanish on F_{p}"));
        }
        let v = pit_bruteforce(&c, &caps()).map_err(|e| e.to_string())?;
        let Some(w) = v.witness.filter(|_| !v.is_zero) else {
            return Err(format!("p {p}: reported zero"));
        };
        if w[0].field().degree() < 2 {
            return Err(format!("p {p}: witness in the base field"));
        }
        let wp = w[0].pow(p as u128);
        if (&wp - &w[0]).is_zero() {
            return Err(format!("p {p}: witness is a root"));
        }
    }
    Ok("x^p - x nonzero with extension witnesses for p = 2, 3, 5".into())
}

/// Runs the binary and returns (exit code, stdout, files written).
fn run_cli(dir: &Path, args: &[&str], outputs: &[&str]) -> (i32, Vec<u8>, Vec<Vec<u8>>) {
    let out = Command::new(env!("CARGO_BIN_EXE_algcirc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    let files = outputs.iter().map(|f| std::fs::read(dir.join(f)).unwrap_or_default()).collect();
    (out.status.code().unwrap_or(-1), out.stdout, files)
}

fn criterion_14() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let write = |name: &str, text: &str| std::fs::write(d.join(name), text).unwrap();
    write(
        "sq.circ",
        "field p 3 ext 1 modulus [0 1]\nnvars 2\nkind circuit\ngate 0 input 0\ngate 1 input 1\ngate 2 mul 0 [1] 1 [2]\ngate 3 const [1]\ngate 4 add 2 [1] 3 [1]\ngate 5 mul 4 [1] 4 [1]\ngate 6 mul 5 [1] 4 [1]\noutput 6\n",
    );
    write("f4.circ", "field p 2 ext 2 modulus [1 1 1]\nnvars 2\nkind circuit\ngate 0 input 0\ngate 1 input 1\ngate 2 mul 0 [0 1] 1 [1]\ngate 3 add 2 [1] 0 [1 1]\noutput 3\n");
    write("y.circ", "field p 2 ext 1 modulus [0 1]\nnvars 2\nkind circuit\ngate 0 input 0\ngate 1 input 1\ngate 2 mul 0 [1] 1 [1]\noutput 2\n");
    write("zero.circ", "field p 2 ext 1 modulus [0 1]\nnvars 1\nkind circuit\ngate 0 const [0]\noutput 0\n");
    write("g.poly", "field p 3 ext 1 modulus [0 1]\nnvars 2\n[7 2] : [1]\n[1 0] : [2]\n");
    write("h.poly", "field p 2 ext 1 modulus [0 1]\nnvars 2\n[1 1] : [1]\n[1 0] : [1]\n");
    let cmds: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (vec!["validate", "--in", "sq.circ", "--json"], vec![]),
        (vec!["expand", "--in", "sq.circ", "--out", "e.poly"], vec!["e.poly"]),
        (vec!["transform", "pth-root", "--in", "sq.circ", "--out", "root.circ", "--verify-oracle"], vec!["root.circ"]),
        (vec!["transform", "modp-decompose", "--in", "sq.circ", "--out", "dec.circ", "--verify-oracle"], vec!["dec.circ"]),
        (vec!["transform", "kronecker-sub", "--in", "y.circ", "--m", "1", "--base", "2", "--out", "k.circ", "--verify-oracle"], vec!["k.circ"]),
        (vec!["transform", "simulate-ext", "--in", "f4.circ", "--out", "sim.circ", "--verify-oracle"], vec!["sim.circ"]),
        (vec!["encode", "--in", "g.poly", "--base", "3", "--out", "enc.poly"], vec!["enc.poly"]),
        (vec!["decode", "--in", "enc.poly", "--base", "3", "--digits", "2", "--m", "2", "--out", "dec.poly"], vec!["dec.poly"]),
        (vec!["design", "rs", "--n", "9", "--m", "3", "--c", "2", "--r", "2", "--out", "rs.design"], vec!["rs.design"]),
        (vec!["design", "greedy", "--n", "16", "--m", "8", "--out", "gr.design"], vec!["gr.design"]),
        (vec!["design", "rs", "--n", "4", "--m", "2", "--c", "2", "--r", "2", "--out", "d2.design"], vec!["d2.design"]),
        (vec!["gen", "ki", "--design", "d2.design", "--poly", "h.poly", "--out", "ki.gen"], vec!["ki.gen"]),
        (vec!["gen", "bootstrap", "--k", "2", "--s", "2", "--seed", "7", "--out", "boot.gen"], vec!["boot.gen"]),
        (vec!["gen", "eval", "--in", "ki.gen", "--point", "[1] [0] [1] [1]"], vec![]),
        (vec!["hitting-set", "build", "--gen", "ki.gen", "--degree", "2", "--out", "ki.hs"], vec!["ki.hs"]),
        (vec!["hitting-set", "build", "--cube", "2", "--degree", "2", "--out", "cube.hs"], vec!["cube.hs"]),
        (vec!["pit", "random", "--in", "y.circ", "--seed", "3", "--json"], vec![]),
        (vec!["pit", "hitting-set", "--in", "y.circ", "--set", "cube.hs", "--json"], vec![]),
        (vec!["pit", "brute", "--in", "zero.circ", "--json"], vec![]),
        (vec!["slp", "pow2", "--n", "1000", "--out", "p.slp"], vec!["p.slp"]),
        (vec!["slp", "factorial", "--n", "30", "--out", "f.slp"], vec!["f.slp"]),
        (vec!["slp", "pow2-factorial", "--n", "5", "--out", "pf.slp"], vec!["pf.slp"]),
        (vec!["slp", "window", "--n", "4", "--json"], vec![]),
        (vec!["slp", "eval", "--in", "f.slp"], vec![]),
    ];
    let mut n = 0;
    for (args, outs) in &cmds {
        let first = run_cli(d, args, outs);
        for o in outs {
            std::fs::remove_file(d.join(o)).ok();
        }
        let second = run_cli(d, args, outs);
        if first.0 != 0 {
            return Err(format!("`{}` exited with {}", args.join(" "), first.0));
        }
        if first != second {
            return Err(format!("`{}` differs between runs", args.join(" ")));
        }
        n += 1;
    }
    let (code, stdout, _) = run_cli(d, &["pit", "brute", "--in", "zero.circ", "--json"], &[]);
    if code != 0 || !stdout.starts_with(b"{\"is_zero\":true") {
        return Err("pit brute on Const(0) did not report zero".into());
    }
    Ok(format!("{n} invocations byte-identical"))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "pth-root circuit round trip and size bound", criterion_1),
        (2, "mod-p decomposition identity", criterion_2),
        (3, "formula decomposition", criterion_3),
        (4, "branching-program decomposition", criterion_4),
        (5, "Reed-Solomon designs", criterion_5),
        (6, "greedy designs", criterion_6),
        (7, "hitting-set size (dD+1)^ℓ", criterion_7),
        (8, "desk-scale hitting over F_4", criterion_8),
        (9, "Kronecker encode/decode/substitute", criterion_9),
        (10, "extension simulation", criterion_10),
        (11, "bootstrap generator and hybrids", criterion_11),
        (12, "integer straight-line programs", criterion_12),
        (13, "syntactic vs functional zero", criterion_13),
        (14, "CLI determinism", criterion_14),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match &outcome {
            Ok(detail) => println!("acceptance {id:>2} PASS  {name}: {detail}"),
            Err(detail) => println!("acceptance {id:>2} FAIL  {name}: {detail}"),
        }
        let expected_fail = KNOWN_FAILURES.contains(&id);
        if outcome.is_err() != expected_fail {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected outcomes for criteria {unexpected:?}");
        std::process::exit(1);
    }
    println!("acceptance: outcomes as recorded ({} known failure)", KNOWN_FAILURES.len());
}
