//! The `qvolk` command line.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or
//! input errors, 3 when precision runs out or a limit does not converge.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::integrator::{integrate_with, IntegrationOptions, Kind, UDFunction};
use crate::padic::{padic_log, parse_rational, teichmuller, PAdicNumber, PrimeContext, Valuation};
use crate::qnumbers::{self, NumberTable};
use crate::verify::{self, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qvolk", version, about = "p-adic q-Volkenborn integrals and q-Bernoulli numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Bosonic,
    Fermionic,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Bosonic => Kind::Bosonic,
            KindArg::Fermionic => Kind::Fermionic,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Odd prime p.
    #[arg(long)]
    p: u64,
    /// q as an integer or a/b with p | q - 1, or 1 for the classical case.
    #[arg(long, default_value = "1")]
    q: String,
    /// Target absolute precision of the output (digits mod p).
    #[arg(long, default_value_t = 10)]
    prec: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Worker threads for Riemann sums (results do not depend on it).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct CharArgs {
    /// Character table file ({"modulus": d, "values": [...]}).
    #[arg(long = "char")]
    char_file: Option<String>,
    /// Modulus of the quadratic character used when no file is given.
    #[arg(long)]
    d: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct LevelArgs {
    /// Highest Riemann-sum level N tried.
    #[arg(long = "N", default_value_t = 12)]
    n_level: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// q-Bernoulli numbers B_{n,q} (classical B_n when q = 1).
    Bernoulli {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
    /// Generalized q-Bernoulli numbers B_{n,q,χ}.
    GenBernoulli {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
    /// Frobenius-Euler numbers H_n(u), by default u = -1/q.
    Euler {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        /// Parameter u (integer or a/b), u != 1.
        #[arg(long)]
        u: Option<String>,
    },
    /// Generalized Frobenius-Euler numbers H_{n,χ}(-1/q), odd modulus.
    GenEuler {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
    /// Integral of f as a limit of Riemann sums.
    Integrate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: LevelArgs,
        /// Integrand: poly:c0,c1,… | chpoly:<file>:c0,… | expbase:a/b | shift:n:<f>.
        #[arg(long)]
        f: String,
        /// Summation modulus (defaults to the integrand's character modulus).
        #[arg(long)]
        d: Option<u64>,
        #[arg(long, value_enum, default_value = "bosonic")]
        kind: KindArg,
    },
    /// p-adic logarithm of a 1-unit.
    Log {
        #[command(flatten)]
        common: Common,
        /// Argument as an integer or a/b.
        #[arg(long)]
        x: String,
    },
    /// Teichmüller lift of an integer prime to p.
    Teichmuller {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
    },
    /// Cross-checks between Riemann sums and closed forms.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args, Debug, Clone)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    level: LevelArgs,
    /// Required valuation of each difference.
    #[arg(long, default_value_t = 6)]
    threshold: i64,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Shift identity for the bosonic integral.
    Theorem1 {
        #[command(flatten)]
        args: VerifyArgs,
        #[arg(long)]
        f: String,
        /// Shifts, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        n: Vec<u64>,
    },
    /// Shift identity for the fermionic integral, with the odd-n form.
    Theorem3 {
        #[command(flatten)]
        args: VerifyArgs,
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long)]
        f: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        n: Vec<u64>,
    },
    /// Moments from sums against generating-function values.
    Witt {
        #[command(flatten)]
        args: VerifyArgs,
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[arg(long, value_enum, default_value = "bosonic")]
        kind: KindArg,
    },
    /// The translation formula as printed against its corrected form.
    Eq2 {
        #[command(flatten)]
        args: VerifyArgs,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match run(cli.command, out) {
        Ok(code) => code,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_precision() {
                EXIT_PRECISION
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn context(common: &Common, working: u32) -> Result<PrimeContext> {
    PrimeContext::with_q_str(common.p, working, &common.q)
}

fn options(common: &Common, level: Option<&LevelArgs>) -> IntegrationOptions {
    let mut o = IntegrationOptions::default();
    if let Some(w) = common.workers {
        o.workers = w.max(1);
    }
    if let Some(l) = level {
        o.n_max = l.n_level;
    }
    o
}

/// Digits kept above the target for Riemann sums.
fn sum_precision(target: u32, opts: &IntegrationOptions) -> u32 {
    target + opts.safety_margin + 3
}

/// Working precision for generating-function coefficients up to `nmax`:
/// each inversion step can lose `v_p(q - 1)` digits in the bosonic case.
fn series_precision(target: u32, nmax: usize, kind: Kind, probe: &PrimeContext) -> u32 {
    qnumbers::required_precision(target, nmax, kind, probe.q_minus_one_valuation())
}

fn load_character(chi: &CharArgs, ctx: &PrimeContext) -> Result<Option<DirichletCharacter>> {
    match (&chi.char_file, chi.d) {
        (Some(path), _) => DirichletCharacter::load(path, ctx).map(Some),
        (None, Some(d)) => DirichletCharacter::quadratic(d, ctx).map(Some),
        (None, None) => Ok(None),
    }
}

fn require_character(chi: &CharArgs, ctx: &PrimeContext) -> Result<DirichletCharacter> {
    load_character(chi, ctx)?
        .ok_or_else(|| Error::Parse("a character is required: pass --char <file> or --d <modulus>".into()))
}

fn check_threshold(t: i64) -> Result<()> {
    if t < 1 {
        return Err(Error::Parse(format!("--threshold must be positive, got {t}")));
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v)?;
    writeln!(out, "{s}")?;
    Ok(())
}

fn emit_table(out: &mut dyn Write, t: &NumberTable, format: Format) -> Result<()> {
    match format {
        Format::Json => emit_json(out, t),
        Format::Text => {
            writeln!(out, "{}", t.kind)?;
            for (k, v) in &t.params {
                writeln!(out, "  {k} = {v}")?;
            }
            for (n, (e, prec)) in t.entries.iter().zip(t.precisions()).enumerate() {
                writeln!(out, "{n:>3}  {e}    [abs precision {prec}]")?;
            }
            Ok(())
        }
    }
}

fn emit_value(out: &mut dyn Write, v: &PAdicNumber, format: Format) -> Result<()> {
    match format {
        Format::Json => emit_json(out, v),
        Format::Text => {
            writeln!(out, "{v}")?;
            Ok(())
        }
    }
}

fn emit_report(out: &mut dyn Write, r: &VerificationReport, format: Format) -> Result<i32> {
    match format {
        Format::Json => emit_json(out, r)?,
        Format::Text => write!(out, "{}", r.to_text())?,
    }
    Ok(report_status(r))
}

/// Exit status for a finished verification.
pub fn report_status(r: &VerificationReport) -> i32 {
    if r.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn truncate_all(t: &mut NumberTable, target: u32) {
    for e in &mut t.entries {
        *e = e.truncate_abs(i64::from(target));
    }
}

fn run(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Bernoulli { common, nmax } => {
            let probe = context(&common, common.prec.max(1))?;
            let ctx = probe.with_precision(series_precision(common.prec, nmax, Kind::Bosonic, &probe))?;
            let mut t = if ctx.is_classical() {
                qnumbers::classical_bernoulli_table(nmax, &ctx)?
            } else {
                qnumbers::q_bernoulli(nmax, &ctx)?
            };
            truncate_all(&mut t, common.prec);
            emit_table(out, &t, common.format)?;
            Ok(EXIT_OK)
        }
        Command::GenBernoulli { common, chi, nmax } => {
            let probe = context(&common, common.prec.max(1))?;
            let ctx = probe.with_precision(series_precision(common.prec, nmax, Kind::Bosonic, &probe))?;
            let chi = require_character(&chi, &ctx)?;
            let mut t = if ctx.is_classical() {
                qnumbers::generalized_bernoulli(&chi, nmax, &ctx)?
            } else {
                qnumbers::generalized_q_bernoulli(&chi, nmax, &ctx)?
            };
            truncate_all(&mut t, common.prec);
            emit_table(out, &t, common.format)?;
            Ok(EXIT_OK)
        }
        Command::Euler { common, nmax, u } => {
            let probe = context(&common, common.prec.max(1))?;
            let mut working = series_precision(common.prec, nmax, Kind::Fermionic, &probe);
            if let Some(u) = &u {
                let one_minus_u = &probe.one() - &probe.rational(&parse_rational(u)?)?;
                if let Valuation::Finite(v) = one_minus_u.valuation() {
                    if v > 0 {
                        working += (nmax as u32 + 1) * v as u32;
                    }
                }
            }
            let ctx = probe.with_precision(working)?;
            let u = match &u {
                Some(u) => ctx.rational(&parse_rational(u)?)?,
                None => qnumbers::fermionic_u(&ctx)?,
            };
            let mut t = qnumbers::frobenius_euler(&u, nmax, &ctx)?;
            truncate_all(&mut t, common.prec);
            emit_table(out, &t, common.format)?;
            Ok(EXIT_OK)
        }
        Command::GenEuler { common, chi, nmax } => {
            let probe = context(&common, common.prec.max(1))?;
            let ctx = probe.with_precision(series_precision(common.prec, nmax, Kind::Fermionic, &probe))?;
            let chi = require_character(&chi, &ctx)?;
            let mut t = qnumbers::generalized_frobenius_euler(&chi, nmax, &ctx)?;
            truncate_all(&mut t, common.prec);
            emit_table(out, &t, common.format)?;
            Ok(EXIT_OK)
        }
        Command::Integrate { common, level, f, d, kind } => {
            let opts = options(&common, Some(&level));
            let ctx = context(&common, sum_precision(common.prec, &opts))?;
            let f = UDFunction::parse(&f, &ctx)?;
            let d = d.unwrap_or_else(|| f.natural_modulus());
            let mut r = integrate_with(&f, d, kind.into(), i64::from(common.prec), &ctx, &opts)?;
            r.value = r.value.truncate_abs(i64::from(common.prec));
            match common.format {
                Format::Json => emit_json(out, &r)?,
                Format::Text => {
                    writeln!(out, "{}", r.value)?;
                    writeln!(
                        out,
                        "  {} integral of {f}, level N = {}, certified mod p^{}",
                        r.kind, r.level, r.certified_valuation
                    )?;
                    let traj: Vec<String> = r.trajectory.iter().map(|v| v.to_string()).collect();
                    writeln!(out, "  level defects: {}", traj.join(", "))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Log { common, x } => {
            let ctx = context(&common, common.prec.max(1))?;
            let v = padic_log(&ctx.rational(&parse_rational(&x)?)?)?;
            emit_value(out, &v, common.format)?;
            Ok(EXIT_OK)
        }
        Command::Teichmuller { common, a } => {
            let ctx = context(&common, common.prec.max(1))?;
            emit_value(out, &teichmuller(a, &ctx)?, common.format)?;
            Ok(EXIT_OK)
        }
        Command::Verify(v) => run_verify(v, out),
    }
}

fn run_verify(cmd: VerifyCommand, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        VerifyCommand::Theorem1 { args, f, n } => {
            check_threshold(args.threshold)?;
            let (ctx, opts) = verify_context(&args, None)?;
            let f = UDFunction::parse(&f, &ctx)?;
            let r = verify::verify_theorem1_with(&f, &n, &ctx, args.threshold, &opts)?;
            emit_report(out, &r, args.common.format)
        }
        VerifyCommand::Theorem3 { args, chi, f, n } => {
            check_threshold(args.threshold)?;
            let (ctx, opts) = verify_context(&args, None)?;
            let f = UDFunction::parse(&f, &ctx)?;
            let chi = load_character(&chi, &ctx)?;
            let r = verify::verify_theorem3_with(&f, &n, chi.as_ref(), &ctx, args.threshold, &opts)?;
            emit_report(out, &r, args.common.format)
        }
        VerifyCommand::Witt { args, chi, nmax, kind } => {
            check_threshold(args.threshold)?;
            let (ctx, opts) = verify_context(&args, Some((nmax, kind.into())))?;
            let chi = load_character(&chi, &ctx)?;
            let r = verify::verify_witt_with(nmax, kind.into(), chi.as_ref(), &ctx, args.threshold, &opts)?;
            emit_report(out, &r, args.common.format)
        }
        VerifyCommand::Eq2 { args } => {
            check_threshold(args.threshold)?;
            let (ctx, opts) = verify_context(&args, None)?;
            let r = verify::verify_eq2_as_printed_with(&ctx, args.threshold, &opts)?;
            emit_report(out, &r, args.common.format)
        }
    }
}

/// Working precision covering both the sums (certified one digit past the
/// threshold) and, for moment checks, the generating-function side.
fn verify_context(args: &VerifyArgs, series: Option<(usize, Kind)>) -> Result<(PrimeContext, IntegrationOptions)> {
    let opts = options(&args.common, Some(&args.level));
    let target = args.common.prec.max(args.threshold as u32 + 1);
    let probe = context(&args.common, target)?;
    let mut working = sum_precision(target, &opts);
    if let Some((nmax, kind)) = series {
        working = working.max(series_precision(target, nmax, kind, &probe));
    }
    Ok((probe.with_precision(working)?, opts))
}
