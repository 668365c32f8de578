//! JSON run configuration. Every error names the offending field by its path.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::blockmat::{BlockMatrix, Preset};
use crate::error::{Error, Result};
use crate::quantize::SymbolField;
use crate::signals::{chirp, gaussian, hermite, tf_shift, Grid, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Bin,
    Pgm,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "bin" => Ok(Format::Bin),
            "pgm" => Ok(Format::Pgm),
            _ => Err(Error::Config(format!(
                "output.format: unknown format {s:?} (csv, bin, pgm)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub format: Format,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    Gaussian { lambda: f64 },
    Chirped { lambda: f64, rate: f64 },
    Constant { value: Complex64 },
    /// Array file in the binary exchange format, laid out `[x][ω]`.
    File { path: PathBuf },
}

impl SymbolSpec {
    pub fn build(&self, grid: &Grid) -> Result<SymbolField> {
        match self {
            SymbolSpec::Gaussian { lambda } => SymbolField::gaussian(grid, *lambda),
            SymbolSpec::Chirped { lambda, rate } => SymbolField::chirped(grid, *lambda, *rate),
            SymbolSpec::Constant { value } => Ok(SymbolField::constant(grid, *value)),
            SymbolSpec::File { path } => {
                let (dims, values) = crate::io::read_bin_file(path)?;
                let want = grid.total() * grid.total();
                if values.len() != want {
                    return Err(Error::Config(format!(
                        "symbol.path: {} holds {} values (dims {:?}), grid needs {}",
                        path.display(),
                        values.len(),
                        dims,
                        want
                    )));
                }
                SymbolField::new(values, *grid, grid.dual())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid: Grid,
    pub matrix: BlockMatrix,
    pub signals: Vec<Signal>,
    pub symbol: Option<SymbolSpec>,
    pub output: Option<Output>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses a config; relative file paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        let obj = as_object(&v, "config")?;
        let grid = parse_grid(field(obj, "grid", "")?)?;
        let matrix = parse_matrix(field(obj, "matrix", "")?, grid.dim(), "matrix")?;
        let signals = match obj.get("signals") {
            None => Vec::new(),
            Some(s) => as_array(s, "signals")?
                .iter()
                .enumerate()
                .map(|(i, s)| parse_signal(s, grid.dim(), &format!("signals[{i}]")))
                .collect::<Result<_>>()?,
        };
        let symbol = obj
            .get("symbol")
            .map(|s| parse_symbol(s, base, "symbol"))
            .transpose()?;
        let output = obj
            .get("output")
            .map(|o| parse_output(o, base))
            .transpose()?;
        Ok(Self {
            grid,
            matrix,
            signals,
            symbol,
            output,
        })
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Config(format!("{path}: expected an object")))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Config(format!("{path}: expected an array")))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Config(format!("{}: missing", join(path, key))))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Config(format!("{path}: expected a number")))
}

fn num_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<f64> {
    number(field(obj, key, path)?, &join(path, key))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Config(format!("{path}: expected a string")))
}

fn vector(v: &Value, len: usize, path: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = match v {
        Value::Number(_) if len == 1 => vec![number(v, path)?],
        _ => as_array(v, path)?
            .iter()
            .enumerate()
            .map(|(i, x)| number(x, &format!("{path}[{i}]")))
            .collect::<Result<_>>()?,
    };
    if out.len() != len {
        return Err(Error::Config(format!(
            "{path}: expected {len} entries, got {}",
            out.len()
        )));
    }
    Ok(out)
}

/// A `d×d` matrix from `[[...], ...]`; a bare number `c` means `c·I`.
fn matrix(v: &Value, d: usize, path: &str) -> Result<DMatrix<f64>> {
    if let Some(c) = v.as_f64() {
        return Ok(DMatrix::identity(d, d) * c);
    }
    let rows = as_array(v, path)?;
    if rows.len() != d {
        return Err(Error::Config(format!(
            "{path}: expected {d} rows, got {}",
            rows.len()
        )));
    }
    let mut data = Vec::with_capacity(d * d);
    for (i, r) in rows.iter().enumerate() {
        data.extend(vector(r, d, &format!("{path}[{i}]"))?);
    }
    Ok(DMatrix::from_row_slice(d, d, &data))
}

fn complex(v: &Value, path: &str) -> Result<Complex64> {
    if let Some(re) = v.as_f64() {
        return Ok(Complex64::new(re, 0.0));
    }
    let p = vector(v, 2, path)?;
    Ok(Complex64::new(p[0], p[1]))
}

fn wrap(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config(m) => Error::Config(m),
        other => Error::Config(format!("{path}: {other}")),
    }
}

pub fn parse_grid(v: &Value) -> Result<Grid> {
    let obj = as_object(v, "grid")?;
    let dim = num_field(obj, "dim", "grid")?;
    let n = num_field(obj, "n", "grid")?;
    let len = num_field(obj, "len", "grid")?;
    if dim.fract() != 0.0 || n.fract() != 0.0 || dim < 0.0 || n < 0.0 {
        return Err(Error::Config("grid: dim and n must be non-negative integers".into()));
    }
    Grid::new(dim as usize, n as usize, len).map_err(wrap("grid"))
}

pub fn parse_matrix(v: &Value, d: usize, path: &str) -> Result<BlockMatrix> {
    let obj = as_object(v, path)?;
    if let Some(b) = obj.get("blocks") {
        let bp = join(path, "blocks");
        let bo = as_object(b, &bp)?;
        let get = |k: &str| matrix(field(bo, k, &bp)?, d, &join(&bp, k));
        return BlockMatrix::from_blocks(&get("A11")?, &get("A12")?, &get("A21")?, &get("A22")?)
            .map_err(wrap(path));
    }
    if let Some(e) = obj.get("entries") {
        let m = matrix(e, 2 * d, &join(path, "entries"))?;
        return BlockMatrix::from_entries(m).map_err(wrap(path));
    }
    let pp = join(path, "preset");
    let name = string(field(obj, "preset", path)?, &pp)?;
    let preset = match name {
        "wigner" => Preset::Wigner,
        "stft" => Preset::Stft,
        "ambiguity" => Preset::Ambiguity,
        "rihaczek" => Preset::Rihaczek,
        "tau" => Preset::Tau(num_field(obj, "tau", path)?),
        "cohen" => Preset::Cohen(matrix(field(obj, "M", path)?, d, &join(path, "M"))?),
        "affine" => Preset::Affine(matrix(field(obj, "T", path)?, d, &join(path, "T"))?),
        other => {
            return Err(Error::Config(format!(
                "{pp}: unknown preset {other:?} (wigner, tau, stft, ambiguity, rihaczek, cohen, affine)"
            )))
        }
    };
    BlockMatrix::preset(&preset, d).map_err(wrap(path))
}

pub fn parse_signal(v: &Value, d: usize, path: &str) -> Result<Signal> {
    let obj = as_object(v, path)?;
    let kp = join(path, "kind");
    let kind = string(field(obj, "kind", path)?, &kp)?;
    let lambda = |default: f64| -> Result<f64> {
        match obj.get("lambda") {
            Some(l) => number(l, &join(path, "lambda")),
            None => Ok(default),
        }
    };
    let s = match kind {
        "gaussian" => gaussian(lambda(1.0)?, d).map_err(wrap(path))?,
        "chirp" => chirp(num_field(obj, "rate", path)?, lambda(1.0)?, d).map_err(wrap(path))?,
        "hermite" => {
            if d != 1 {
                return Err(Error::Config(format!("{kp}: hermite needs dim = 1")));
            }
            let k = num_field(obj, "k", path)?;
            if k < 0.0 || k.fract() != 0.0 || k as usize > crate::signals::MAX_HERMITE {
                return Err(Error::Config(format!(
                    "{}: expected an integer in [0, {}]",
                    join(path, "k"),
                    crate::signals::MAX_HERMITE
                )));
            }
            hermite(k as usize)
        }
        "shifted" => {
            let base = parse_signal(field(obj, "base", path)?, d, &join(path, "base"))?;
            let zero = Value::Array(vec![Value::from(0.0); d]);
            let x0 = vector(obj.get("x0").unwrap_or(&zero), d, &join(path, "x0"))?;
            let w0 = vector(obj.get("w0").unwrap_or(&zero), d, &join(path, "w0"))?;
            tf_shift(&base, &x0, &w0).map_err(wrap(path))?
        }
        "sum" => {
            let tp = join(path, "terms");
            let terms = as_array(field(obj, "terms", path)?, &tp)?;
            if terms.is_empty() {
                return Err(Error::Config(format!("{tp}: empty")));
            }
            let mut out = Vec::with_capacity(terms.len());
            for (i, t) in terms.iter().enumerate() {
                let ip = format!("{tp}[{i}]");
                let to = as_object(t, &ip)?;
                if let Some(sig) = to.get("signal") {
                    let c = match to.get("coef") {
                        Some(c) => complex(c, &join(&ip, "coef"))?,
                        None => Complex64::new(1.0, 0.0),
                    };
                    out.push((c, parse_signal(sig, d, &join(&ip, "signal"))?));
                } else {
                    out.push((Complex64::new(1.0, 0.0), parse_signal(t, d, &ip)?));
                }
            }
            Signal::Sum(out)
        }
        other => {
            return Err(Error::Config(format!(
                "{kp}: unknown signal kind {other:?} (gaussian, hermite, shifted, sum, chirp)"
            )))
        }
    };
    Ok(s)
}

pub fn parse_symbol(v: &Value, base: &Path, path: &str) -> Result<SymbolSpec> {
    let obj = as_object(v, path)?;
    let kp = join(path, "kind");
    let kind = string(field(obj, "kind", path)?, &kp)?;
    let positive = |key: &str| -> Result<f64> {
        let x = match obj.get(key) {
            Some(x) => number(x, &join(path, key))?,
            None => 1.0,
        };
        if x > 0.0 {
            Ok(x)
        } else {
            Err(Error::Config(format!("{}: must be positive", join(path, key))))
        }
    };
    match kind {
        "gaussian" => Ok(SymbolSpec::Gaussian {
            lambda: positive("lambda")?,
        }),
        "chirped" => Ok(SymbolSpec::Chirped {
            lambda: positive("lambda")?,
            rate: num_field(obj, "rate", path)?,
        }),
        "constant" => Ok(SymbolSpec::Constant {
            value: match obj.get("value") {
                Some(c) => complex(c, &join(path, "value"))?,
                None => Complex64::new(1.0, 0.0),
            },
        }),
        "file" => {
            let pp = join(path, "path");
            let p = base.join(string(field(obj, "path", path)?, &pp)?);
            if !p.is_file() {
                return Err(Error::Config(format!("{pp}: {} does not exist", p.display())));
            }
            Ok(SymbolSpec::File { path: p })
        }
        other => Err(Error::Config(format!(
            "{kp}: unknown symbol kind {other:?} (gaussian, chirped, constant, file)"
        ))),
    }
}

fn parse_output(v: &Value, base: &Path) -> Result<Output> {
    let obj = as_object(v, "output")?;
    let format = match obj.get("format") {
        Some(f) => string(f, "output.format")?.parse()?,
        None => Format::Csv,
    };
    let path = base.join(string(field(obj, "path", "output")?, "output.path")?);
    Ok(Output { format, path })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<RunConfig> {
        RunConfig::parse(s, Path::new("."))
    }

    fn err(s: &str) -> String {
        match parse(s) {
            Err(Error::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    const GRID: &str = r#""grid": {"dim": 1, "n": 64, "len": 8}"#;

    #[test]
    fn parses_presets_and_blocks() {
        let c = parse(&format!(r#"{{{GRID}, "matrix": {{"preset": "tau", "tau": 0.25}}}}"#)).unwrap();
        assert!(c.matrix.approx_eq(&BlockMatrix::preset(&Preset::Tau(0.25), 1).unwrap(), 0.0));
        let c = parse(&format!(r#"{{{GRID}, "matrix": {{"preset": "cohen", "M": [[0.3]]}}}}"#)).unwrap();
        assert!((c.matrix.classify().cohen_m.unwrap()[(0, 0)] - 0.3).abs() < 1e-12);
        let c = parse(&format!(
            r#"{{{GRID}, "matrix": {{"blocks": {{"A11": [[1]], "A12": [[0.5]], "A21": [[1]], "A22": [[-0.5]]}}}}}}"#
        ))
        .unwrap();
        assert!(c.matrix.classify().cohen_type);
        assert!(c.signals.is_empty() && c.symbol.is_none() && c.output.is_none());
    }

    #[test]
    fn errors_name_the_field() {
        assert!(err(&format!(r#"{{{GRID}, "matrix": {{"preset": "wigler"}}}}"#)).starts_with("matrix.preset"));
        assert!(err(r#"{"matrix": {"preset": "wigner"}}"#).starts_with("grid: missing"));
        assert!(err(r#"{"grid": {"dim": 1, "n": 60, "len": 8}, "matrix": {"preset": "wigner"}}"#)
            .starts_with("grid"));
        assert!(err(&format!(r#"{{{GRID}, "matrix": {{"preset": "tau"}}}}"#)).starts_with("matrix.tau"));
        let m = err(&format!(
            r#"{{{GRID}, "matrix": {{"preset": "wigner"}}, "signals": [{{"kind": "gaussian", "lambda": -1}}]}}"#
        ));
        assert!(m.starts_with("signals[0]"), "{m}");
        let m = err(&format!(
            r#"{{{GRID}, "matrix": {{"preset": "wigner"}}, "signals": [{{"kind": "sum", "terms": [{{"kind": "x"}}]}}]}}"#
        ));
        assert!(m.starts_with("signals[0].terms[0].kind"), "{m}");
        let m = err(&format!(
            r#"{{{GRID}, "matrix": {{"blocks": {{"A11": [[0]], "A12": [[0]], "A21": [[1]], "A22": [[1]]}}}}}}"#
        ));
        assert!(m.starts_with("matrix:") && m.contains("singular"), "{m}");
        let m = err(&format!(r#"{{{GRID}, "matrix": {{"preset": "wigner"}}, "symbol": {{"kind": "file", "path": "/nonexistent.bin"}}}}"#));
        assert!(m.starts_with("symbol.path"), "{m}");
        let m = err(&format!(r#"{{{GRID}, "matrix": {{"preset": "wigner"}}, "output": {{"format": "png", "path": "x"}}}}"#));
        assert!(m.starts_with("output.format"), "{m}");
        assert!(err("not json").starts_with("invalid JSON"));
    }

    #[test]
    fn signals_evaluate() {
        let c = parse(&format!(
            r#"{{{GRID}, "matrix": {{"preset": "wigner"}}, "signals": [
                {{"kind": "shifted", "base": {{"kind": "gaussian"}}, "x0": [1.0], "w0": [0.5]}},
                {{"kind": "sum", "terms": [{{"kind": "hermite", "k": 0}}, {{"coef": [0, 2], "signal": {{"kind": "chirp", "rate": 1}}}}]}}
            ]}}"#
        ))
        .unwrap();
        let v = c.signals[0].eval(&[1.0]);
        assert!((v - Complex64::from_polar(1.0, std::f64::consts::PI)).norm() < 1e-12);
        let h0 = hermite(0).eval(&[0.3]);
        let ch = chirp(1.0, 1.0, 1).unwrap().eval(&[0.3]);
        assert!((c.signals[1].eval(&[0.3]) - (h0 + Complex64::new(0.0, 2.0) * ch)).norm() < 1e-12);
    }

    #[test]
    fn symbols_build() {
        let c = parse(&format!(
            r#"{{{GRID}, "matrix": {{"preset": "wigner"}}, "symbol": {{"kind": "constant", "value": 2}}, "output": {{"format": "bin", "path": "o.bin"}}}}"#
        ))
        .unwrap();
        let s = c.symbol.unwrap().build(&c.grid).unwrap();
        assert!(s.values.iter().all(|v| *v == Complex64::new(2.0, 0.0)));
        assert_eq!(c.output.unwrap().format, Format::Bin);
    }
}
