//! Straight-line programs over the integers using the constant 1, `+`, `-`
//! and `×`, with constructions for powers of two and factorials and the
//! binomial window polynomial.
//!
//! Text format: `step <k> one | add <i> <j> | sub <i> <j> | mul <i> <j>`
//! lines, then `output <k>`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    One,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSlp {
    steps: Vec<Step>,
    output: usize,
}

impl IntSlp {
    pub fn new(steps: Vec<Step>, output: usize) -> Result<IntSlp> {
        for (k, s) in steps.iter().enumerate() {
            if let Step::Add(i, j) | Step::Sub(i, j) | Step::Mul(i, j) = *s {
                if i >= k || j >= k {
                    return Err(Error::usage(format!("step {k} refers to a later step")));
                }
            }
        }
        if output >= steps.len() {
            return Err(Error::usage(format!("output {output} is not a step")));
        }
        Ok(IntSlp { steps, output })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn eval(&self) -> BigInt {
        let mut v: Vec<BigInt> = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            let x = match *s {
                Step::One => BigInt::one(),
                Step::Add(i, j) => &v[i] + &v[j],
                Step::Sub(i, j) => &v[i] - &v[j],
                Step::Mul(i, j) => &v[i] * &v[j],
            };
            v.push(x);
        }
        v.swap_remove(self.output)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.steps.iter().enumerate() {
            let line = match s {
                Step::One => format!("step {k} one\n"),
                Step::Add(i, j) => format!("step {k} add {i} {j}\n"),
                Step::Sub(i, j) => format!("step {k} sub {i} {j}\n"),
                Step::Mul(i, j) => format!("step {k} mul {i} {j}\n"),
            };
            out.push_str(&line);
        }
        out.push_str(&format!("output {}\n", self.output));
        out
    }

    pub fn parse(text: &str) -> Result<IntSlp> {
        let mut steps = Vec::new();
        let mut output = None;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let t: Vec<&str> = line.split_whitespace().collect();
            let idx = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(ln, format!("expected an index, found `{s}`")));
            match t.as_slice() {
                ["step", k, rest @ ..] => {
                    if idx(k)? != steps.len() {
                        return Err(Error::parse(ln, format!("expected step {}", steps.len())));
                    }
                    let s = match rest {
                        ["one"] => Step::One,
                        ["add", a, b] => Step::Add(idx(a)?, idx(b)?),
                        ["sub", a, b] => Step::Sub(idx(a)?, idx(b)?),
                        ["mul", a, b] => Step::Mul(idx(a)?, idx(b)?),
                        _ => return Err(Error::parse(ln, "expected `one`, `add i j`, `sub i j` or `mul i j`")),
                    };
                    if let Step::Add(a, b) | Step::Sub(a, b) | Step::Mul(a, b) = s {
                        if a >= steps.len() || b >= steps.len() {
                            return Err(Error::parse(ln, "reference to a later step"));
                        }
                    }
                    steps.push(s);
                }
                ["output", k] => output = Some(idx(k)?),
                _ => return Err(Error::parse(ln, format!("unrecognised line `{line}`"))),
            }
        }
        let output = output.ok_or_else(|| Error::parse(0, "missing `output` line"))?;
        IntSlp::new(steps, output)
    }
}

/// Incremental SLP construction with a shared step for the constant 1.
struct Builder {
    steps: Vec<Step>,
}

impl Builder {
    fn new() -> Builder {
        Builder { steps: vec![Step::One] }
    }

    fn push(&mut self, s: Step) -> usize {
        self.steps.push(s);
        self.steps.len() - 1
    }

    /// Copy `p` with its `One` steps mapped to the shared one; returns the
    /// index of its output.
    fn splice(&mut self, p: &IntSlp) -> usize {
        let mut map = Vec::with_capacity(p.len());
        for s in p.steps() {
            let k = match *s {
                Step::One => 0,
                Step::Add(i, j) => self.push(Step::Add(map[i], map[j])),
                Step::Sub(i, j) => self.push(Step::Sub(map[i], map[j])),
                Step::Mul(i, j) => self.push(Step::Mul(map[i], map[j])),
            };
            map.push(k);
        }
        map[p.output()]
    }

    /// `x^(2^e)` by `e` squarings.
    fn square_times(&mut self, mut x: usize, e: u32) -> usize {
        for _ in 0..e {
            x = self.push(Step::Mul(x, x));
        }
        x
    }

    fn finish(self, output: usize) -> IntSlp {
        IntSlp::new(self.steps, output).expect("builder keeps references backwards")
    }
}

/// `2^n` by left-to-right square and multiply; at most `2⌊log₂ n⌋ + 2` steps.
pub fn slp_pow2(n: u64) -> IntSlp {
    let mut b = Builder::new();
    if n == 0 {
        return b.finish(0);
    }
    let two = b.push(Step::Add(0, 0));
    let mut acc = two;
    for bit in (0..63 - n.leading_zeros()).rev() {
        acc = b.push(Step::Mul(acc, acc));
        if n >> bit & 1 == 1 {
            acc = b.push(Step::Mul(acc, two));
        }
    }
    b.finish(acc)
}

/// The constant `v ≥ 1` by Horner's rule on its binary digits.
pub fn slp_constant(v: &BigUint) -> Result<IntSlp> {
    if v.is_zero() {
        let mut b = Builder::new();
        let z = b.push(Step::Sub(0, 0));
        return Ok(b.finish(z));
    }
    let mut b = Builder::new();
    let mut acc = 0;
    for bit in (0..v.bits() - 1).rev() {
        acc = b.push(Step::Add(acc, acc));
        if v.bit(bit) {
            acc = b.push(Step::Add(acc, 0));
        }
    }
    Ok(b.finish(acc))
}

/// Source of SLPs for the central binomial coefficients `C(2t, t)`.
pub trait BinomialOracle {
    fn central_binomial(&self, t: u64) -> Result<IntSlp>;
}

/// Builds each `C(2t, t)` as a binary-expansion constant.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConstantBinomialOracle;

impl BinomialOracle for ConstantBinomialOracle {
    fn central_binomial(&self, t: u64) -> Result<IntSlp> {
        slp_constant(&central_binomial(t))
    }
}

fn central_binomial(t: u64) -> BigUint {
    num_integer::binomial(BigUint::from(2 * t), BigUint::from(t))
}

/// Cost of one level `n! = n^{[n odd]} · (⌊n/2⌋!)² · C(2⌊n/2⌋, ⌊n/2⌋)`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct LevelCost {
    pub n: u64,
    /// Steps of the oracle program for the binomial.
    pub oracle_len: usize,
    /// Steps of the constant `n` (zero for even `n`).
    pub constant_len: usize,
    /// Steps this level added to the program.
    pub added: usize,
}

#[derive(Clone, Debug)]
pub struct ShamirFactorial {
    pub slp: IntSlp,
    /// Levels from `n` down to the base case.
    pub levels: Vec<LevelCost>,
}

/// `n!` through the halving recurrence, with binomials from `oracle`. Each
/// oracle program is checked against the exact binomial.
pub fn shamir_factorial_slp(n: u64, oracle: &dyn BinomialOracle) -> Result<ShamirFactorial> {
    let mut chain = Vec::new();
    let mut k = n;
    while k > 1 {
        chain.push(k);
        k /= 2;
    }
    let mut b = Builder::new();
    // 0! = 1! = 1
    let mut acc = 0;
    let mut levels = Vec::with_capacity(chain.len());
    for &m in chain.iter().rev() {
        let before = b.steps.len();
        let h = m / 2;
        let binom = oracle.central_binomial(h)?;
        let got = binom.eval();
        let want = BigInt::from(central_binomial(h));
        if got != want {
            return Err(Error::Integrity(format!("oracle gave {got} for C({}, {h}), expected {want}", 2 * h)));
        }
        let bi = b.splice(&binom);
        let sq = b.push(Step::Mul(acc, acc));
        acc = b.push(Step::Mul(sq, bi));
        let mut constant_len = 0;
        if m % 2 == 1 {
            let c = slp_constant(&BigUint::from(m))?;
            constant_len = c.len();
            let ci = b.splice(&c);
            acc = b.push(Step::Mul(acc, ci));
        }
        levels.push(LevelCost {
            n: m,
            oracle_len: binom.len(),
            constant_len,
            added: b.steps.len() - before,
        });
    }
    levels.reverse();
    Ok(ShamirFactorial {
        slp: b.finish(acc),
        levels,
    })
}

/// `(2^n)! = ∏_{i<n} C(2^{n-i}, 2^{n-i-1})^{2^i}`, the `2^i`-th powers by
/// repeated squaring.
pub fn pow2_factorial_slp(n: u32, oracle: &dyn BinomialOracle) -> Result<IntSlp> {
    if n == 0 {
        return Err(Error::usage("pow2 factorial needs n ≥ 1"));
    }
    let mut b = Builder::new();
    let mut acc = None;
    for i in 0..n {
        let t = 1u64 << (n - i - 1);
        let binom = oracle.central_binomial(t)?;
        if binom.eval() != BigInt::from(central_binomial(t)) {
            return Err(Error::Integrity(format!("oracle gave a wrong value for C({}, {t})", 2 * t)));
        }
        let f = b.splice(&binom);
        let f = b.square_times(f, i);
        acc = Some(match acc {
            None => f,
            Some(a) => b.push(Step::Mul(a, f)),
        });
    }
    Ok(b.finish(acc.expect("n ≥ 1")))
}

/// Integer polynomial in `(y1, yn)`, keyed by exponent pairs.
pub type IntPoly = BTreeMap<(u32, u32), BigInt>;

/// `f(y1, yn) = Σ_{i,j<n} C(2n, i + jn) y1^i yn^j`.
pub fn binomial_window_poly(n: u32) -> Result<IntPoly> {
    if n < 2 {
        return Err(Error::usage("binomial window polynomial needs n ≥ 2"));
    }
    let top = BigUint::from(2 * n);
    let mut f = IntPoly::new();
    for i in 0..n {
        for j in 0..n {
            let e = i + j * n;
            if e <= 2 * n {
                f.insert((i, j), BigInt::from(num_integer::binomial(top.clone(), BigUint::from(e))));
            }
        }
    }
    Ok(f)
}

/// Checks of the window polynomial against `(x+1)^{2n}` and `C(2n, n) + 2`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct WindowReport {
    pub n: u32,
    /// `f(x, x^n) = (x+1)^{2n}` holds coefficient by coefficient.
    pub identity_holds: bool,
    /// Degrees where `f(x, x^n)` and `(x+1)^{2n}` differ, with both coefficients.
    pub mismatches: Vec<(u64, String, String)>,
    pub f_at_0_1: String,
    pub central_plus_two: String,
    pub f_at_0_1_matches: bool,
}

pub fn check_binomial_window(n: u32) -> Result<WindowReport> {
    let f = binomial_window_poly(n)?;
    let mut sub: BTreeMap<u64, BigInt> = BTreeMap::new();
    for (&(i, j), c) in &f {
        *sub.entry(i as u64 + j as u64 * n as u64).or_insert_with(BigInt::zero) += c;
    }
    let top = BigUint::from(2 * n);
    let mut mismatches = Vec::new();
    let max = sub.keys().copied().max().unwrap_or(0).max(2 * n as u64);
    for e in 0..=max {
        let want = if e <= 2 * n as u64 {
            BigInt::from(num_integer::binomial(top.clone(), BigUint::from(e)))
        } else {
            BigInt::zero()
        };
        let got = sub.get(&e).cloned().unwrap_or_default();
        if got != want {
            mismatches.push((e, got.to_string(), want.to_string()));
        }
    }
    let f01: BigInt = f.iter().filter(|((i, _), _)| *i == 0).map(|(_, c)| c).sum();
    let expected: BigInt = BigInt::from(num_integer::binomial(top, BigUint::from(n))) + 2;
    Ok(WindowReport {
        n,
        identity_holds: mismatches.is_empty(),
        mismatches,
        f_at_0_1: f01.to_string(),
        central_plus_two: expected.to_string(),
        f_at_0_1_matches: f01 == expected,
    })
}
