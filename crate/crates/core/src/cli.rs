//! Command-line front end. `run` returns the process exit code:
//! 0 ok, 1 verification failure, 2 configuration error, 3 numerical error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::blockmat::{BlockMatrix, Preset};
use crate::config::{Format, RunConfig};
use crate::error::{Error, Result};
use crate::io;
use crate::mwd::{mwd, PhaseSpaceField};
use crate::quantize::kernel_from_symbol;
use crate::signals::{gaussian, norm_samples, tf_shift, Grid, Signal};
use crate::verify::{self, Options, Scale, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mwdkit", version, about = "Matrix-Wigner distributions and their quantizations")]
pub struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0, global = true)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct IoArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `output.path`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `output.format` (csv, bin, pgm).
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute B_A(f, g) on the configured grid.
    Transform(IoArgs),
    /// Apply the operator with the configured symbol to the first signal.
    Quantize {
        #[command(flatten)]
        io: IoArgs,
        /// Print max |K − K^H| of the operator kernel.
        #[arg(long)]
        check_adjoint: bool,
    },
    /// Run an identity suite (or `all`) and report each check.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "fast")]
        scale: String,
        #[arg(long, hide = true)]
        break_det: bool,
    },
    /// Heatmaps of a two-Gaussian sum for M = 0, 0.3, 0.6.
    DemoInterference {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for the heatmaps.
        #[arg(long, default_value = "interference")]
        out: PathBuf,
    },
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if cli.threads > 0 {
        // fails only if the global pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch<W: Write>(cmd: Command, out: &mut W) -> Result<i32> {
    match cmd {
        Command::Transform(a) => transform(&a, out),
        Command::Quantize { io, check_adjoint } => quantize(&io, check_adjoint, out),
        Command::Verify {
            suite,
            seed,
            scale,
            break_det,
        } => {
            let opts = Options {
                seed,
                scale: scale.parse()?,
                break_det,
            };
            verify_cmd(suite.parse()?, &opts, out)
        }
        Command::DemoInterference { config, out: dir } => demo(config.as_deref(), &dir, out),
    }
}

fn load(a: &IoArgs) -> Result<(RunConfig, Format, PathBuf)> {
    let cfg = RunConfig::from_file(&a.config)?;
    let format = match (&a.format, &cfg.output) {
        (Some(f), _) => f.parse()?,
        (None, Some(o)) => o.format,
        (None, None) => Format::Csv,
    };
    let path = match (&a.out, &cfg.output) {
        (Some(p), _) => p.clone(),
        (None, Some(o)) => o.path.clone(),
        (None, None) => return Err(Error::Config("output.path: missing (or pass --out)".into())),
    };
    Ok((cfg, format, path))
}

fn io_err(path: &Path) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Io(m) => Error::Io(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn write_field(f: &PhaseSpaceField, format: Format, path: &Path) -> Result<()> {
    let mut w = io::create(path)?;
    match format {
        Format::Csv => io::write_field_csv(&mut w, f),
        Format::Bin => {
            let dims = vec![f.xgrid.n(); 2 * f.dim()];
            io::write_bin(&mut w, &dims, &f.values)
        }
        Format::Pgm => io::write_pgm(&mut w, f),
    }
    .and_then(|_| w.flush().map_err(Error::from))
    .map_err(io_err(path))
}

fn transform<W: Write>(a: &IoArgs, out: &mut W) -> Result<i32> {
    let (cfg, format, path) = load(a)?;
    if cfg.signals.is_empty() || cfg.signals.len() > 2 {
        return Err(Error::Config(format!(
            "signals: expected 1 or 2 entries, got {}",
            cfg.signals.len()
        )));
    }
    if format == Format::Pgm && cfg.grid.dim() != 1 {
        return Err(Error::Config("output.format: pgm needs grid.dim = 1".into()));
    }
    let f = &cfg.signals[0];
    let g = cfg.signals.get(1).unwrap_or(f);
    let field = mwd(&cfg.matrix, f, g, &cfg.grid)?;
    write_field(&field, format, &path)?;
    writeln!(
        out,
        "wrote {} ({} points, max |B| = {:.6e})",
        path.display(),
        field.values.len(),
        field.max_abs()
    )?;
    Ok(EXIT_OK)
}

fn quantize<W: Write>(a: &IoArgs, check_adjoint: bool, out: &mut W) -> Result<i32> {
    let (cfg, format, path) = load(a)?;
    let spec = cfg
        .symbol
        .as_ref()
        .ok_or_else(|| Error::Config("symbol: missing".into()))?;
    let f = cfg
        .signals
        .first()
        .ok_or_else(|| Error::Config("signals: need one input signal".into()))?;
    if format == Format::Pgm {
        return Err(Error::Config("output.format: signals are written as csv or bin".into()));
    }
    let sigma = spec.build(&cfg.grid)?;
    let op = kernel_from_symbol(&sigma, &cfg.matrix)?;
    let fs = f.sample(&cfg.grid)?;
    let image = op.apply_samples(&fs);
    let diff: Vec<Complex64> = image.iter().zip(&fs).map(|(u, v)| u - v).collect();
    let change = norm_samples(&diff, &cfg.grid) / norm_samples(&fs, &cfg.grid);
    writeln!(out, "relative change |Af - f|/|f| = {change:.6e}")?;
    if check_adjoint {
        writeln!(out, "max |K - K^H| = {:.6e}", op.hermitian_deviation())?;
    }
    let mut w = io::create(&path)?;
    match format {
        Format::Csv => io::write_signal_csv(&mut w, &cfg.grid, &image),
        _ => io::write_bin(&mut w, &vec![cfg.grid.n(); cfg.grid.dim()], &image),
    }
    .and_then(|_| w.flush().map_err(Error::from))
    .map_err(io_err(&path))?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(EXIT_OK)
}

fn verify_cmd<W: Write>(suite: Suite, opts: &Options, out: &mut W) -> Result<i32> {
    let checks = verify::run(suite, opts)?;
    let passed = checks.iter().filter(|c| c.passed()).count();
    for c in &checks {
        writeln!(out, "{c}")?;
    }
    let all = passed == checks.len();
    writeln!(
        out,
        "{}: {passed}/{} checks passed (suite {}, seed {}, scale {})",
        if all { "PASS" } else { "FAIL" },
        checks.len(),
        suite.name(),
        opts.seed,
        match opts.scale {
            Scale::Fast => "fast",
            Scale::Full => "full",
        }
    )?;
    Ok(if all { EXIT_OK } else { EXIT_VERIFY })
}

/// Parameters of the interference demo.
pub const DEMO_M: [f64; 3] = [0.0, 0.3, 0.6];

fn demo_signal() -> Result<Signal> {
    let phi = gaussian(1.0, 1)?;
    Ok(Signal::Sum(vec![
        (Complex64::new(1.0, 0.0), tf_shift(&phi, &[-2.0], &[-1.0])?),
        (Complex64::new(1.0, 0.0), tf_shift(&phi, &[2.0], &[1.0])?),
    ]))
}

fn demo<W: Write>(config: Option<&Path>, dir: &Path, out: &mut W) -> Result<i32> {
    let (grid, f) = match config {
        Some(p) => {
            let cfg = RunConfig::from_file(p)?;
            let f = match cfg.signals.first() {
                Some(s) => s.clone(),
                None => demo_signal()?,
            };
            (cfg.grid, f)
        }
        None => (Grid::new(1, 256, 16.0)?, demo_signal()?),
    };
    if grid.dim() != 1 {
        return Err(Error::Config("grid.dim: the interference demo needs dim = 1".into()));
    }
    let fs = f.sample(&grid)?;
    let norm2 = norm_samples(&fs, &grid).powi(2);
    writeln!(out, "|f|^2 = {norm2:.12}")?;
    for m in DEMO_M {
        let a = BlockMatrix::preset(&Preset::Cohen(nalgebra::DMatrix::from_element(1, 1, m)), 1)?;
        let field = mwd(&a, &f, &f, &grid)?;
        let energy: Complex64 = field.values.iter().sum::<Complex64>() * field.weight();
        let path = dir.join(format!("interference_M{m}.pgm"));
        write_field(&field, Format::Pgm, &path)?;
        writeln!(
            out,
            "M = {m}: energy = {:.12} (|energy - |f|^2| = {:.3e}), wrote {}",
            energy.re,
            (energy - norm2).norm(),
            path.display()
        )?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::NotCohenType), EXIT_NUMERIC);
        assert_eq!(run(["mwdkit", "verify", "nope"]), EXIT_CONFIG);
        assert_eq!(run(["mwdkit", "verify", "stft", "--scale", "huge"]), EXIT_CONFIG);
        assert_eq!(run(["mwdkit", "bogus"]), EXIT_CONFIG);
    }

    #[test]
    fn demo_energy_is_preserved() {
        let dir = tempfile::tempdir().unwrap();
        let mut buf = Vec::new();
        assert_eq!(demo(None, dir.path(), &mut buf).unwrap(), EXIT_OK);
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines().skip(1) {
            let err: f64 = line.split("= ").nth(3).unwrap().split(')').next().unwrap().parse().unwrap();
            assert!(err < 1e-6, "{line}");
        }
        for m in DEMO_M {
            let bytes = std::fs::read(dir.path().join(format!("interference_M{m}.pgm"))).unwrap();
            let (w, h, _) = io::read_pgm(&bytes).unwrap();
            assert_eq!((w, h), (256, 256));
        }
    }
}
