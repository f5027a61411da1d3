//! Command-line front end.
//!
//! Exit codes: 0 when a verdict was computed (including "not a
//! permutation"), 1 for usage and input errors, 2 when a criterion disagrees
//! with the oracle or a closed-form inverse fails validation.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::aml::{self, AmlParams, JointCounts};
use crate::certificate::{FieldSummary, PermutationCertificate};
use crate::cpp::{self, CppParams};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx, FieldSpec, DEFAULT_FIELD_CAP};
use crate::linearized::LinearizedPoly;
use crate::poly::{is_two_sided_inverse, permutation_check, FieldMap, ValueTable};
use crate::quad::{self, QuadCase, QuadParams};
use crate::{field_for, selftest};

/// Environment variable overriding the largest field size that will be
/// enumerated.
pub const MAX_FIELD_ENV: &str = "PPINV_MAX_FIELD";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONSISTENT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ppinv",
    version,
    about = "Permutation polynomial criteria and closed-form inverses over finite fields"
)]
struct Cli {
    /// Worker threads for exhaustive checks and sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Record wall time in certificates (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide one instance and emit its certificate.
    Verify {
        #[command(subcommand)]
        family: Family,
    },
    /// Decide every instance in a parameter range.
    Sweep {
        #[command(subcommand)]
        family: SweepFamily,
    },
    /// Print the value table of the closed-form inverse.
    Invert {
        #[command(subcommand)]
        family: Family,
    },
    /// Write a value table to a file.
    Export {
        #[command(subcommand)]
        what: ExportKind,
    },
    /// Run the built-in invariant suite.
    Selftest,
    /// Describe a field given as p:e:n (F_{q^n} with q = p^e).
    Field { spec: String },
}

#[derive(Debug, Subcommand)]
enum ExportKind {
    /// One hex element index per line, in element enumeration order.
    Sbox {
        /// Output file; standard output when omitted.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
        /// Export the inverse permutation instead of the map itself.
        #[arg(long, global = true)]
        inverse: bool,
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    A,
    B,
}

#[derive(Debug, Subcommand)]
enum Family {
    /// a x^q + b x + (x^q - x)^k over F_{q^2}.
    Quad(QuadArgs),
    /// -x + x^((q^2+1)/2) + x^((q^3+q)/2) over F_{q^3}.
    Cpp(CppArgs),
    /// A(x)^m + L(x) over F_{q^n}.
    Aml(AmlArgs),
}

#[derive(Debug, Args)]
struct QuadArgs {
    #[arg(long)]
    q: u64,
    /// Comma-separated base-p coefficients, little-endian.
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long)]
    k: u64,
    /// Parameter regime; detected from a and b when omitted.
    #[arg(long, value_enum)]
    case: Option<CaseArg>,
}

#[derive(Debug, Args)]
struct CppArgs {
    #[arg(long)]
    q: u64,
    /// Use f + x instead of f (invert and export only).
    #[arg(long)]
    plus_x: bool,
}

#[derive(Debug, Args)]
struct AmlArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: u32,
    /// Norm-one element, comma-separated base-p coefficients.
    #[arg(long)]
    b: String,
    #[arg(long)]
    m: u64,
    /// Coefficients a_0;a_1;...;a_{n-1} of L, each a coefficient list.
    #[arg(long = "L")]
    l: String,
}

#[derive(Debug, Subcommand)]
enum SweepFamily {
    /// All (a, b) satisfying either case's hypotheses, k in a range.
    Quad {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 2)]
        k_min: u64,
        #[arg(long, default_value_t = 8)]
        k_max: u64,
    },
    /// All norm-one b, m up to m-max, and singular L (sampled when
    /// --samples is given).
    Aml {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 6)]
        m_max: u64,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// The enumeration cap, from [`MAX_FIELD_ENV`] when set.
pub fn field_cap() -> Result<u64> {
    match std::env::var(MAX_FIELD_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::Precondition(format!(
                "{MAX_FIELD_ENV} must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_FIELD_CAP),
    }
}

/// Parses `c0,c1,...` as an element of `ctx`.
pub fn parse_element(ctx: &FieldCtx, s: &str) -> Result<Elem> {
    let coeffs = s
        .split(',')
        .map(|t| {
            t.trim().parse::<u32>().map_err(|_| {
                Error::MalformedElement(format!("{s:?} is not a comma-separated coefficient list"))
            })
        })
        .collect::<Result<Vec<u32>>>()?;
    ctx.from_coeffs(&coeffs)
}

/// Parses `c;c;...`, one coefficient list per element.
pub fn parse_elements(ctx: &FieldCtx, s: &str) -> Result<Vec<Elem>> {
    s.split(';').map(|t| parse_element(ctx, t)).collect()
}

enum Failure {
    Usage(String),
    Inconsistent(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistent(_) | Error::InverseValidation(_) => {
                Failure::Inconsistent(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("I/O error: {e}"))
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                EXIT_OK
            } else {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_USAGE;
        }
    };
    // Output is buffered so the command can run on the pool's threads.
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut buf));
    let _ = out.write_all(&buf).and_then(|_| out.flush());
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Inconsistent(msg)) => {
            let _ = writeln!(err, "inconsistency: {msg}");
            EXIT_INCONSISTENT
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let cap = field_cap()?;
    match &cli.command {
        Command::Verify { family } => verify(family, cap, cli.timing, out),
        Command::Sweep { family } => sweep(family, cap, out),
        Command::Invert { family } => invert(family, cap, out),
        Command::Export {
            what:
                ExportKind::Sbox {
                    out: path,
                    inverse,
                    family,
                },
        } => export_sbox(family, cap, path.as_ref(), *inverse, out),
        Command::Selftest => {
            let summary = selftest::run(out)?;
            Ok(if summary.ok() {
                EXIT_OK
            } else {
                EXIT_INCONSISTENT
            })
        }
        Command::Field { spec } => {
            let ctx = spec.parse::<FieldSpec>()?.build(cap)?;
            writeln!(
                out,
                "{}",
                serde_json::to_string(&FieldSummary::of(&ctx)).expect("serializes")
            )?;
            Ok(EXIT_OK)
        }
    }
}

fn quad_params<'a>(ctx: &'a FieldCtx, args: &QuadArgs) -> Result<QuadParams<'a>> {
    let a = parse_element(ctx, &args.a)?;
    let b = parse_element(ctx, &args.b)?;
    match args.case {
        Some(CaseArg::A) => QuadParams::new(ctx, a, b, args.k, QuadCase::A),
        Some(CaseArg::B) => QuadParams::new(ctx, a, b, args.k, QuadCase::B),
        None => QuadParams::detect(ctx, a, b, args.k),
    }
}

fn aml_params<'a>(ctx: &'a FieldCtx, args: &AmlArgs) -> Result<AmlParams<'a>> {
    let b = parse_element(ctx, &args.b)?;
    let l = LinearizedPoly::new(ctx, parse_elements(ctx, &args.l)?)?;
    AmlParams::new(ctx, b, args.m, l)
}

fn family_field(family: &Family, cap: u64) -> Result<FieldCtx> {
    match family {
        Family::Quad(a) => field_for(a.q, 2, cap),
        Family::Cpp(a) => field_for(a.q, 3, cap),
        Family::Aml(a) => field_for(a.q, a.n, cap),
    }
}

fn certificate(family: &Family, ctx: &FieldCtx) -> Result<PermutationCertificate> {
    match family {
        Family::Quad(args) => Ok(quad::criterion(&quad_params(ctx, args)?)),
        Family::Cpp(_) => cpp::certify(&CppParams::new(ctx)?),
        Family::Aml(args) => Ok(aml::criterion(&aml_params(ctx, args)?)),
    }
}

fn emit_certificate(cert: &PermutationCertificate, out: &mut dyn Write) -> CmdResult {
    writeln!(out, "{}", cert.to_json_line())?;
    if cert.is_consistent() {
        Ok(EXIT_OK)
    } else {
        Err(Failure::Inconsistent(format!(
            "{} certificate disagrees with its oracle or inverse check",
            cert.family
        )))
    }
}

fn verify(family: &Family, cap: u64, timing: bool, out: &mut dyn Write) -> CmdResult {
    let ctx = family_field(family, cap)?;
    let start = Instant::now();
    let mut cert = certificate(family, &ctx)?;
    if timing {
        cert.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    emit_certificate(&cert, out)
}

fn sweep(family: &SweepFamily, cap: u64, out: &mut dyn Write) -> CmdResult {
    let mut mismatches = 0usize;
    match family {
        SweepFamily::Quad { q, k_min, k_max } => {
            let ctx = field_for(*q, 2, cap)?;
            let rows = quad::sweep(&ctx, *k_min..=*k_max);
            for r in &rows {
                mismatches += usize::from(!r.consistent());
                writeln!(out, "{}", serde_json::to_string(r).expect("serializes"))?;
            }
            let perms = rows.iter().filter(|r| r.verdict.is_permutation()).count();
            let summary = json!({"summary": {
                "family": "quad", "field": ctx.spec_string(), "rows": rows.len(),
                "permutations": perms, "mismatches": mismatches,
            }});
            writeln!(out, "{summary}")?;
        }
        SweepFamily::Aml {
            q,
            n,
            m_max,
            samples,
            seed,
        } => {
            let ctx = field_for(*q, *n, cap)?;
            let rows = match samples {
                Some(count) => aml::sweep_sampled(&ctx, *m_max, *count, *seed),
                None => aml::sweep_exhaustive(&ctx, *m_max),
            };
            for r in &rows {
                mismatches += usize::from(!r.consistent());
                writeln!(out, "{}", serde_json::to_string(r).expect("serializes"))?;
            }
            let perms = rows.iter().filter(|r| r.verdict.is_permutation()).count();
            let summary = json!({"summary": {
                "family": "aml", "field": ctx.spec_string(), "rows": rows.len(),
                "permutations": perms, "mismatches": mismatches,
                "joint_counts": JointCounts::tally(&rows),
            }});
            writeln!(out, "{summary}")?;
        }
    }
    if mismatches == 0 {
        Ok(EXIT_OK)
    } else {
        Err(Failure::Inconsistent(format!(
            "{mismatches} sweep rows disagree with the oracle"
        )))
    }
}

/// The chosen map and its closed-form inverse, both as value tables.
fn map_and_inverse(family: &Family, ctx: &FieldCtx) -> Result<(String, ValueTable, ValueTable)> {
    fn tables<F: FieldMap, G: FieldMap>(
        ctx: &FieldCtx,
        f: &F,
        g: &G,
    ) -> Result<(ValueTable, ValueTable)> {
        if !is_two_sided_inverse(ctx, f, g) {
            return Err(Error::InverseValidation(
                "closed-form inverse fails pointwise".into(),
            ));
        }
        Ok((permutation_check(ctx, f), permutation_check(ctx, g)))
    }
    match family {
        Family::Quad(args) => {
            let p = quad_params(ctx, args)?;
            if !quad::is_permutation_by_criterion(&p) {
                return Err(Error::NotBijective);
            }
            let inv = quad::resolve_inverse(&p)?;
            let (f, g) = tables(ctx, &quad::build_f(&p), &inv.poly)?;
            Ok(("f".into(), f, g))
        }
        Family::Cpp(args) => {
            let p = CppParams::new(ctx)?;
            let (f, g) = if args.plus_x {
                tables(ctx, &cpp::build_f_plus_x(&p), &cpp::inverse_f_plus_x(&p)?)?
            } else {
                tables(ctx, &cpp::build_f(&p), &cpp::inverse_f(&p))?
            };
            Ok((if args.plus_x { "f+x" } else { "f" }.into(), f, g))
        }
        Family::Aml(args) => {
            let p = aml_params(ctx, args)?;
            let inv = aml::inverse(&p)?;
            let (f, g) = tables(ctx, &p.map(), &inv)?;
            Ok(("f".into(), f, g))
        }
    }
}

fn invert(family: &Family, cap: u64, out: &mut dyn Write) -> CmdResult {
    let ctx = family_field(family, cap)?;
    let (name, _, inv) = map_and_inverse(family, &ctx)?;
    let line = json!({
        "map": name,
        "inverse": inv.to_json(&ctx),
    });
    writeln!(out, "{line}")?;
    Ok(EXIT_OK)
}

fn export_sbox(
    family: &Family,
    cap: u64,
    path: Option<&PathBuf>,
    inverse: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let ctx = family_field(family, cap)?;
    let table = if inverse {
        map_and_inverse(family, &ctx)?.2
    } else {
        match family {
            Family::Quad(args) => {
                permutation_check(&ctx, &quad::build_f(&quad_params(&ctx, args)?))
            }
            Family::Cpp(args) => {
                let p = CppParams::new(&ctx)?;
                if args.plus_x {
                    permutation_check(&ctx, &cpp::build_f_plus_x(&p))
                } else {
                    permutation_check(&ctx, &cpp::build_f(&p))
                }
            }
            Family::Aml(args) => {
                let p = aml_params(&ctx, args)?;
                permutation_check(&ctx, &p.map())
            }
        }
    };
    let text = table.to_sbox_hex(&ctx)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}
