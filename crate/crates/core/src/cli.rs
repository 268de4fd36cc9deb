//! Command-line frontend. Data goes to `--out` or standard output,
//! diagnostics to standard error. Exit status: 0 on success, 1 on usage,
//! parse and domain errors, 2 when a resource cap is hit.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::designs::{greedy_design, rs_design, Design};
use crate::error::{Error, Result};
use crate::ff::{Field, FieldEmbedding};
use crate::gen::{
    bootstrap_generator, hitting_set_from_generator, ki_generator, FixedFamily, Generator, HardFamily,
    HittingSet, HittingSetOptions, PowerFamily, RandomFamily, ZeroFamily,
};
use crate::intslp::{
    check_binomial_window, pow2_factorial_slp, shamir_factorial_slp, slp_pow2, IntSlp, ConstantBinomialOracle,
};
use crate::ir::text::tokens;
use crate::ir::{parse_device, parse_devices, serialize_devices, Circuit, Device};
use crate::pit::{pit_bruteforce, pit_hitting_set, pit_random, PitVerdict};
use crate::poly::{
    expand, expand_circuit, kronecker_decode, kronecker_encode, poly_mod_p_decompose, pth_root_poly, ExpandCaps,
    SparsePoly,
};
use crate::transform::{
    kronecker_substitution_circuit, mod_p_decompose_abp, mod_p_decompose_circuit, mod_p_decompose_formula,
    pth_root_abp, pth_root_circuit, pth_root_circuit_verified, pth_root_formula, simulate_extension,
    TransformOptions, TransformReport,
};

const FORMATS: &str = "\
File formats:
  device     field p <p> ext <m> modulus [<c0> ... <cm>]
             nvars <n>
             kind circuit|formula|abp
             gate <k> input <i> | const [α] | add <a> [α] <b> [β] | mul <a> [α] <b> [β]
             gate <k> sum <a> [α] <b> [β] ... | prod <a> <b> ...
             vertex <k> | edge <u> <v> const [α] | edge <u> <v> varmul [α] <i>
             edge <u> <v> affine [α0] [α1] ... [αn] | source <k> | sink <k>
             output <k>
             (several devices per file are separated by `---`)
  poly       field header, nvars <n>, then `[e1 ... en] : [c0 ...]` per term
  design     design ell <ℓ> n <n> m <m> rmax <r>, then one sorted set per line
  generator  generator seed <ℓ> n <n> degree <D>, optional design, `---`,
             then the component circuits
  hitting    hitting-set n <n> count <N>, field header, one point per line
  slp        step <k> one | add <i> <j> | sub <i> <j> | mul <i> <j>, output <k>
Elements are written [c0 c1 ... c_{m-1}], lowest degree first.";

#[derive(Parser, Debug)]
#[command(name = "algcirc", version, about = "Algebraic circuits over finite fields", after_long_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a device file and print its metrics.
    Validate {
        #[command(flatten)]
        io: InOut,
        #[arg(long)]
        json: bool,
    },
    /// Expand every output of every device into a polynomial.
    Expand {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        caps: Caps,
    },
    /// Device transforms.
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Kronecker-encode a polynomial file.
    Encode {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value_t = 2)]
        base: u32,
        /// Digit count; the minimal one by default.
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Decode a Kronecker-encoded polynomial file.
    Decode {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value_t = 2)]
        base: u32,
        #[arg(long)]
        digits: u32,
        /// Variables of the decoded polynomial.
        #[arg(long)]
        m: usize,
    },
    /// Combinatorial designs.
    #[command(subcommand)]
    Design(DesignCmd),
    /// Hitting-set generators.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Hitting sets.
    #[command(subcommand, name = "hitting-set")]
    HittingSet(HittingSetCmd),
    /// Polynomial identity testing.
    #[command(subcommand)]
    Pit(PitCmd),
    /// Integer straight-line programs.
    #[command(subcommand)]
    Slp(SlpCmd),
}

#[derive(Args, Debug)]
struct InOut {
    /// Input file, `-` for standard input.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OutOnly {
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
struct Caps {
    /// Largest number of terms in any intermediate polynomial.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_terms: u64,
    /// Largest syntactic degree accepted for expansion.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    max_degree: u64,
}

impl Caps {
    fn expand(&self) -> ExpandCaps {
        ExpandCaps {
            max_degree: self.max_degree,
            max_terms: self.max_terms as usize,
        }
    }
}

#[derive(Args, Debug)]
struct TransformFlags {
    #[command(flatten)]
    io: InOut,
    /// Re-derive the result by expansion and fail on any mismatch.
    #[arg(long)]
    verify_oracle: bool,
    /// Keep gates and vertices that no output uses.
    #[arg(long)]
    no_prune: bool,
    /// Refuse p^n above 2^bits.
    #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u32).range(1..=40))]
    max_blowup_bits: u32,
    #[command(flatten)]
    caps: Caps,
}

impl TransformFlags {
    fn options(&self) -> TransformOptions {
        TransformOptions {
            max_blowup_bits: self.max_blowup_bits,
            prune: !self.no_prune,
        }
    }
}

#[derive(Subcommand, Debug)]
enum TransformCmd {
    /// Root of a device computing a p-th power.
    PthRoot(TransformFlags),
    /// One output per type vector a, computing f_a in f = Σ f_a^p x^a.
    ModpDecompose(TransformFlags),
    /// Substitute y_{i,j} -> x_i^{b^j} into a circuit on m·K variables.
    KroneckerSub {
        #[command(flatten)]
        flags: TransformFlags,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        base: u32,
    },
    /// Simulate a circuit over F_{p^m} by one over a subfield.
    SimulateExt {
        #[command(flatten)]
        flags: TransformFlags,
        /// Degree of the subfield over F_p.
        #[arg(long, default_value_t = 1)]
        base_ext: usize,
    },
}

#[derive(Subcommand, Debug)]
enum DesignCmd {
    /// Reed-Solomon design: n sets of size m in [m^c], intersections at most r.
    Rs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        c: usize,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        out: OutOnly,
    },
    /// Greedy design with intersections ≤ ⌈log₂ n⌉.
    Greedy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Starting ground-set size.
        #[arg(long)]
        ell: Option<usize>,
        #[command(flatten)]
        out: OutOnly,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum FamilyKind {
    Random,
    Zero,
    Power,
    Fixed,
}

#[derive(Subcommand, Debug)]
enum GenCmd {
    /// Generator z -> (h(z|S_1), ..., h(z|S_n)) from a design and a polynomial.
    Ki {
        #[arg(long)]
        design: PathBuf,
        /// Polynomial file for h, on m variables.
        #[arg(long)]
        poly: PathBuf,
        /// Number of outputs; all sets of the design by default.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        out: OutOnly,
    },
    /// Bootstrap generator from a k-variate family at size parameter s.
    Bootstrap {
        #[arg(long, value_enum, default_value_t = FamilyKind::Random)]
        family: FamilyKind,
        /// Polynomial file for the fixed family.
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        ext: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        s: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the parameters as JSON on standard output.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        out: OutOnly,
    },
    /// Evaluate a generator at a seed point.
    Eval {
        #[command(flatten)]
        io: InOut,
        /// Seed coordinates, e.g. "[1] [0] [1 1]".
        #[arg(long)]
        point: String,
    },
}

#[derive(Subcommand, Debug)]
enum HittingSetCmd {
    /// Evaluate a generator (or the identity on n variables) on S^ℓ.
    Build {
        /// Generator file.
        #[arg(long, conflicts_with = "cube")]
        gen: Option<PathBuf>,
        /// Use the identity generator on this many variables.
        #[arg(long, required_unless_present = "gen")]
        cube: Option<usize>,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        ext: usize,
        /// Degree d of the class to hit.
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        dedup: bool,
        #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_points: u64,
        #[command(flatten)]
        out: OutOnly,
    },
}

#[derive(Subcommand, Debug)]
enum PitCmd {
    /// Evaluate at random points of S^n.
    Random {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        /// |S|; defaults to one more than twice the degree bound.
        #[arg(long)]
        set_size: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate on every point of a hitting set.
    HittingSet {
        #[command(flatten)]
        io: InOut,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Exact test by expansion.
    Brute {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        caps: Caps,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
enum SlpCmd {
    /// 2^n by square and multiply.
    Pow2 {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: OutOnly,
    },
    /// n! through the halving recurrence.
    Factorial {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: OutOnly,
    },
    /// (2^n)! as a product of central binomials.
    Pow2Factorial {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        out: OutOnly,
    },
    /// Check the binomial window polynomial for n.
    Window {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate an SLP file.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// Run the command line `args` (program name first) and return the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match dispatch(cli.command, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = stdout.flush();
            eprintln!("algcirc: {e}");
            if e.is_resource() {
                2
            } else {
                1
            }
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        return Ok(std::io::read_to_string(std::io::stdin())?);
    }
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report types serialize") + "\n"
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Validate { io, json: as_json } => validate(&io, as_json, stdout),
        Command::Expand { io, caps } => {
            let devices = parse_devices(&read(&io.input)?)?;
            let mut docs = Vec::new();
            for d in &devices {
                for f in expand(d, &caps.expand())? {
                    docs.push(f.to_text());
                }
            }
            emit(&io.out, &docs.join("---\n"), stdout)
        }
        Command::Transform(t) => transform(t, stdout),
        Command::Encode { io, base, digits } => {
            let g = SparsePoly::parse(&read(&io.input)?)?;
            let (f, k) = kronecker_encode(&g, base, digits)?;
            let text = format!("# kronecker base {base} digits {k} m {}\n{}", g.nvars(), f.to_text());
            emit(&io.out, &text, stdout)
        }
        Command::Decode { io, base, digits, m } => {
            let f = SparsePoly::parse(&read(&io.input)?)?;
            emit(&io.out, &kronecker_decode(&f, base, digits, m)?.to_text(), stdout)
        }
        Command::Design(d) => {
            let (design, out) = match d {
                DesignCmd::Rs { n, m, c, r, out } => (rs_design(n, m, c, r)?, out),
                DesignCmd::Greedy { n, m, ell, out } => (greedy_design(n, m, ell)?, out),
            };
            design.verify()?;
            eprintln!("design: {} sets of size {} in [{}], intersections ≤ {}", design.n(), design.m, design.ell, design.r_max);
            emit(&out.out, &design.to_text(), stdout)
        }
        Command::Gen(g) => gen(g, stdout),
        Command::HittingSet(HittingSetCmd::Build {
            gen,
            cube,
            p,
            ext,
            degree,
            dedup,
            max_points,
            out,
        }) => {
            let g = match (gen, cube) {
                (Some(path), _) => Generator::parse(&read(&path)?)?,
                (None, Some(n)) => Generator::identity(&Field::new(p, ext)?, n)?,
                (None, None) => return Err(Error::usage("give --gen or --cube")),
            };
            let opts = HittingSetOptions {
                set: None,
                dedup,
                max_points,
            };
            let h = hitting_set_from_generator(&g, degree, &opts)?;
            eprintln!("hitting set: {} points in F^{}", h.len(), h.n);
            emit(&out.out, &h.to_text(), stdout)
        }
        Command::Pit(p) => pit(p, stdout),
        Command::Slp(s) => slp(s, stdout),
    }
}

#[derive(Serialize)]
struct DeviceSummary {
    kind: &'static str,
    field: String,
    nvars: usize,
    outputs: usize,
    size: usize,
    product_depth: usize,
    degree_bound: u64,
}

fn validate(io: &InOut, as_json: bool, stdout: &mut dyn Write) -> Result<()> {
    let devices = parse_devices(&read(&io.input)?)?;
    let summaries: Vec<DeviceSummary> = devices
        .iter()
        .map(|d| {
            let m = d.metrics();
            DeviceSummary {
                kind: d.kind(),
                field: d.field().header(),
                nvars: d.nvars(),
                outputs: match d {
                    Device::Circuit(c) => c.outputs().len(),
                    Device::Formula(_) => 1,
                    Device::Abp(a) => a.sinks().len(),
                },
                size: m.size,
                product_depth: m.product_depth,
                degree_bound: m.degree_bound,
            }
        })
        .collect();
    let text = if as_json {
        json(&summaries)
    } else {
        summaries
            .iter()
            .enumerate()
            .map(|(i, s)| {
                format!(
                    "device {} kind {} nvars {} outputs {} size {} product-depth {} degree-bound {} ({})\n",
                    i + 1,
                    s.kind,
                    s.nvars,
                    s.outputs,
                    s.size,
                    s.product_depth,
                    s.degree_bound,
                    s.field
                )
            })
            .collect()
    };
    emit(&io.out, &text, stdout)
}

fn single_poly(d: &Device, caps: &ExpandCaps) -> Result<SparsePoly> {
    let mut polys = expand(d, caps)?;
    if polys.len() != 1 {
        return Err(Error::usage(format!("expected a single-output device, found {} outputs", polys.len())));
    }
    Ok(polys.remove(0))
}

fn check_components(f: &SparsePoly, types: &[Vec<u32>], got: &[SparsePoly]) -> Result<()> {
    let want = poly_mod_p_decompose(f);
    for (a, g) in types.iter().zip(got) {
        if *g != want.component(a) {
            return Err(Error::Integrity(format!("component {a:?} expands to {g}, expected {}", want.component(a))));
        }
    }
    Ok(())
}

fn transform(cmd: TransformCmd, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        TransformCmd::PthRoot(flags) => {
            let opts = flags.options();
            let caps = flags.caps.expand();
            let phi = parse_device(&read(&flags.io.input)?)?;
            let want = if flags.verify_oracle {
                Some(pth_root_poly(&single_poly(&phi, &caps)?)?)
            } else {
                None
            };
            let (root, report) = match &phi {
                Device::Circuit(c) if flags.verify_oracle => {
                    let (r, rep) = pth_root_circuit_verified(c, &opts, &caps)?;
                    (Device::Circuit(r), rep)
                }
                Device::Circuit(c) => {
                    let (r, rep) = pth_root_circuit(c, &opts)?;
                    (Device::Circuit(r), rep)
                }
                Device::Formula(f) => {
                    let (r, rep) = pth_root_formula(f, &opts)?;
                    (Device::Formula(r), rep)
                }
                Device::Abp(a) => {
                    let (r, rep) = pth_root_abp(a, &opts)?;
                    (Device::Abp(r), rep)
                }
            };
            if let Some(want) = want {
                let got = single_poly(&root, &caps)?;
                if got != want {
                    return Err(Error::Integrity(format!("p-th root expands to {got}, expected {want}")));
                }
            }
            write_transform(&flags.io.out, &[root], &report, &[], stdout)
        }
        TransformCmd::ModpDecompose(flags) => {
            let opts = flags.options();
            let caps = flags.caps.expand();
            let phi = parse_device(&read(&flags.io.input)?)?;
            let (devices, types, report) = match &phi {
                Device::Circuit(c) => {
                    let d = mod_p_decompose_circuit(c, &opts)?;
                    (vec![Device::Circuit(d.circuit)], d.types, d.report)
                }
                Device::Formula(f) => {
                    let d = mod_p_decompose_formula(f, &opts)?;
                    (d.components.into_iter().map(Device::Formula).collect(), d.types, d.report)
                }
                Device::Abp(a) => {
                    let d = mod_p_decompose_abp(a, &opts)?;
                    (vec![Device::Abp(d.abp)], d.types, d.report)
                }
            };
            if flags.verify_oracle {
                let f = single_poly(&phi, &caps)?;
                let mut got = Vec::new();
                for d in &devices {
                    got.extend(expand(d, &caps)?);
                }
                check_components(&f, &types, &got)?;
            }
            let order: Vec<String> = types
                .iter()
                .enumerate()
                .map(|(t, a)| {
                    let a: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                    format!("component {t} type [{}]", a.join(" "))
                })
                .collect();
            write_transform(&flags.io.out, &devices, &report, &order, stdout)
        }
        TransformCmd::KroneckerSub { flags, m, base } => {
            let c = parse_device(&read(&flags.io.input)?)?.to_circuit()?;
            let out = kronecker_substitution_circuit(&c, m, base)?;
            if flags.verify_oracle {
                let caps = flags.caps.expand();
                let want = expand_circuit(&c, &caps)?
                    .iter()
                    .map(|g| substitute(g, m, base))
                    .collect::<Result<Vec<_>>>()?;
                if expand_circuit(&out, &caps)? != want {
                    return Err(Error::Integrity("substituted circuit does not expand to the substituted polynomial".into()));
                }
            }
            let comments = vec![
                format!("kronecker substitution base {base} m {m} digits {}", c.nvars() / m.max(1)),
                format!("input size {} output size {}", c.size(), out.size()),
            ];
            emit(&flags.io.out, &serialize_devices(&[Device::Circuit(out)], &comments), stdout)
        }
        TransformCmd::SimulateExt { flags, base_ext } => {
            let c = parse_device(&read(&flags.io.input)?)?.to_circuit()?;
            let base = Field::new(c.field().p(), base_ext)?;
            let sim = simulate_extension(&c, &base)?;
            if flags.verify_oracle {
                let caps = flags.caps.expand();
                let want = expand_circuit(&c, &caps)?.remove(0);
                let emb = FieldEmbedding::new(&base, c.field())?;
                let mut got = SparsePoly::zero(c.field(), c.nvars());
                for (coord, beta) in expand_circuit(&sim.circuit, &caps)?.iter().zip(&sim.basis) {
                    got = got.add(&coord.embed(&emb)?.scale(beta))?;
                }
                if got != want {
                    return Err(Error::Integrity(format!("coordinates recombine to {got}, expected {want}")));
                }
            }
            let k = sim.k as u128;
            let basis: Vec<String> = sim.basis.iter().map(|b| b.to_string()).collect();
            let comments = vec![
                format!("simulate-ext k {} constant {}", sim.k, sim.constant),
                format!("basis {}", basis.join(" ")),
                format!("input size {} output size {}", c.size(), sim.circuit.size()),
                format!("size bound {}", sim.constant as u128 * k * k * k * c.size() as u128),
            ];
            emit(&flags.io.out, &serialize_devices(&[Device::Circuit(sim.circuit)], &comments), stdout)
        }
    }
}

/// `g` with `y_{i,j} ↦ x_i^{b^j}`, variables `y_{i,j}` at `i·K + j`.
fn substitute(g: &SparsePoly, m: usize, b: u32) -> Result<SparsePoly> {
    if m == 0 || !g.nvars().is_multiple_of(m) {
        return Err(Error::usage(format!("{} variables do not split into {m} blocks", g.nvars())));
    }
    let k = g.nvars() / m;
    let mut terms = Vec::with_capacity(g.num_terms());
    for (e, c) in g.terms() {
        let mut x = vec![0u32; m];
        for (i, xi) in x.iter_mut().enumerate() {
            let acc: u64 = (0..k).map(|j| e[i * k + j] as u64 * (b as u64).pow(j as u32)).sum();
            *xi = u32::try_from(acc).map_err(|_| Error::resource("substituted exponent overflows"))?;
        }
        terms.push((x, c.clone()));
    }
    SparsePoly::from_terms(g.field(), m, terms)
}

fn write_transform(
    out: &Option<PathBuf>,
    devices: &[Device],
    report: &TransformReport,
    extra: &[String],
    stdout: &mut dyn Write,
) -> Result<()> {
    let mut comments = report.comments();
    comments.extend_from_slice(extra);
    emit(out, &serialize_devices(devices, &comments), stdout)
}

fn family(kind: FamilyKind, poly: Option<PathBuf>, field: Field, k: usize, seed: u64) -> Result<Box<dyn HardFamily>> {
    Ok(match kind {
        FamilyKind::Random => Box::new(RandomFamily::new(field, k, seed)),
        FamilyKind::Zero => Box::new(ZeroFamily::new(field, k)),
        FamilyKind::Power => Box::new(PowerFamily::new(field, k)),
        FamilyKind::Fixed => {
            let path = poly.ok_or_else(|| Error::usage("the fixed family needs --poly"))?;
            Box::new(FixedFamily::new(SparsePoly::parse(&read(&path)?)?))
        }
    })
}

fn gen(cmd: GenCmd, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        GenCmd::Ki { design, poly, n, out } => {
            let d = Design::parse(&read(&design)?)?;
            let h = SparsePoly::parse(&read(&poly)?)?;
            let g = ki_generator(&h, n.unwrap_or(d.n()), &d)?;
            emit(&out.out, &g.to_text(), stdout)
        }
        GenCmd::Bootstrap {
            family: kind,
            poly,
            p,
            ext,
            k,
            s,
            seed,
            json: as_json,
            out,
        } => {
            let fam = family(kind, poly, Field::new(p, ext)?, k, seed)?;
            let b = bootstrap_generator(fam.as_ref(), s)?;
            let params = json(&b.params);
            if as_json {
                stdout.write_all(params.as_bytes())?;
            } else {
                eprint!("bootstrap: {params}");
            }
            match (&out.out, as_json) {
                (None, true) => Ok(()),
                _ => emit(&out.out, &b.generator.to_text(), stdout),
            }
        }
        GenCmd::Eval { io, point } => {
            let g = Generator::parse(&read(&io.input)?)?;
            let toks = tokens(&point).map_err(Error::usage)?;
            let seed = toks
                .iter()
                .map(|t| g.field().parse_element(t))
                .collect::<Result<Vec<_>>>()?;
            if seed.len() != g.seed_len {
                return Err(Error::usage(format!("seed has {} coordinates, expected {}", seed.len(), g.seed_len)));
            }
            let values: Vec<String> = g.evaluate(&seed)?.iter().map(|x| x.to_string()).collect();
            emit(&io.out, &(values.join(" ") + "\n"), stdout)
        }
    }
}

fn verdict_text(v: &PitVerdict) -> String {
    let mut out = format!(
        "{} ({:?}, {} points)\n",
        if v.is_zero { "zero" } else { "nonzero" },
        v.method,
        v.points_used
    );
    if let Some(w) = &v.witness {
        let w: Vec<String> = w.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("witness {}\n", w.join(" ")));
    }
    if let Some(e) = v.error_bound {
        out.push_str(&format!("error bound {e}\n"));
    }
    out
}

fn pit(cmd: PitCmd, stdout: &mut dyn Write) -> Result<()> {
    let (io, verdict, as_json) = match cmd {
        PitCmd::Random {
            io,
            trials,
            set_size,
            seed,
            json: as_json,
        } => {
            let c = circuit(&io)?;
            let size = set_size.unwrap_or(2 * c.metrics().degree_bound + 1);
            (io, pit_random(&c, trials, size, seed)?, as_json)
        }
        PitCmd::HittingSet { io, set, json: as_json } => {
            let c = circuit(&io)?;
            let h = HittingSet::parse(&read(&set)?)?;
            (io, pit_hitting_set(&c, &h)?, as_json)
        }
        PitCmd::Brute { io, caps, json: as_json } => {
            let c = circuit(&io)?;
            (io, pit_bruteforce(&c, &caps.expand())?, as_json)
        }
    };
    for w in &verdict.warnings {
        eprintln!("warning: {w}");
    }
    let text = if as_json {
        verdict.to_json() + "\n"
    } else {
        verdict_text(&verdict)
    };
    emit(&io.out, &text, stdout)
}

fn circuit(io: &InOut) -> Result<Circuit> {
    parse_device(&read(&io.input)?)?.to_circuit()
}

fn slp_summary(s: &IntSlp) -> String {
    format!("value {}\nlength {}\n", s.eval(), s.len())
}

fn slp(cmd: SlpCmd, stdout: &mut dyn Write) -> Result<()> {
    let oracle = ConstantBinomialOracle;
    match cmd {
        SlpCmd::Pow2 { n, out } => write_slp(&slp_pow2(n), "", &out, stdout),
        SlpCmd::Factorial { n, out } => {
            let r = shamir_factorial_slp(n, &oracle)?;
            let levels: String = r
                .levels
                .iter()
                .map(|l| {
                    format!(
                        "level n {} oracle {} constant {} added {}\n",
                        l.n, l.oracle_len, l.constant_len, l.added
                    )
                })
                .collect();
            write_slp(&r.slp, &levels, &out, stdout)
        }
        SlpCmd::Pow2Factorial { n, out } => write_slp(&pow2_factorial_slp(n, &oracle)?, "", &out, stdout),
        SlpCmd::Window { n, json: as_json } => {
            let r = check_binomial_window(n)?;
            let text = if as_json {
                json(&r)
            } else {
                let mut t = format!(
                    "n {}\nf(x, x^n) = (x+1)^(2n): {}\n",
                    r.n,
                    if r.identity_holds { "holds" } else { "fails" }
                );
                for (e, got, want) in &r.mismatches {
                    t.push_str(&format!("  degree {e}: coefficient {got}, expected {want}\n"));
                }
                t.push_str(&format!(
                    "f(0, 1) = {}, C(2n, n) + 2 = {}: {}\n",
                    r.f_at_0_1,
                    r.central_plus_two,
                    if r.f_at_0_1_matches { "equal" } else { "differ" }
                ));
                t
            };
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
        SlpCmd::Eval { input } => {
            let s = IntSlp::parse(&read(&input)?)?;
            stdout.write_all(slp_summary(&s).as_bytes())?;
            Ok(())
        }
    }
}

/// Value and length on standard output, the program itself to `--out`.
fn write_slp(s: &IntSlp, extra: &str, out: &OutOnly, stdout: &mut dyn Write) -> Result<()> {
    stdout.write_all(slp_summary(s).as_bytes())?;
    stdout.write_all(extra.as_bytes())?;
    if let Some(path) = &out.out {
        fs::write(path, s.to_text()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
