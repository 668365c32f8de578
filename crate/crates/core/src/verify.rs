//! Identity suites: each closed-form identity evaluated by two independent
//! numerical routes, reported as named checks against fixed tolerances.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::blockmat::{random_block, BlockMatrix, Derived, Preset};
use crate::cohen::{chirp_convolution, remap, GaussianOracle};
use crate::error::{Error, Result};
use crate::fourier::ft;
use crate::mwd::{
    covariance_check, covariance_cohen_check, marginals, mwd, mwd_via_stft, reconstruct, stft,
    MagicFormula, PhaseSpaceField,
};
use crate::quantize::{
    adjoint_symbol, channel_matrix, channel_stft_magnitude, convert_symbol, convert_symbol_cohen,
    duality_check, fourier_conjugation_check, hs_norm, kernel_from_symbol, relative_l2,
    spreading_apply, SymbolField,
};
use crate::signals::{
    chirp, dilate, gaussian, hermite, inner, lp_norm_samples, tf_shift, Grid, Signal,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    /// Reduced sample counts, meant for interactive runs.
    #[default]
    Fast,
    Full,
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Scale::Fast),
            "full" => Ok(Scale::Full),
            _ => Err(Error::Config(format!("scale: unknown value {s:?} (fast, full)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub seed: u64,
    pub scale: Scale,
    /// Negative control: drops the `|det A|⁻¹` factor from the orthogonality prediction.
    pub break_det: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: 42,
            scale: Scale::Fast,
            break_det: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Passes when `value < limit`.
    Below,
    /// Passes when `value ≤ limit` (inequality ratios with slack).
    AtMost,
    /// Passes when `value > limit`.
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl Check {
    fn new(criterion: u8, name: impl Into<String>, value: f64, limit: f64, bound: Bound) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            limit,
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::Below => self.value < self.limit,
            Bound::AtMost => self.value <= self.limit,
            Bound::Above => self.value > self.limit,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::Below => "<",
            Bound::AtMost => "<=",
            Bound::Above => ">",
        };
        let limit = if self.limit >= 0.01 {
            format!("{}", self.limit)
        } else {
            format!("{:.0e}", self.limit)
        };
        write!(
            f,
            "{} [{:>2}] {}: {:.3e} {} {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.value,
            op,
            limit
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Gaussian,
    Moyal,
    Stft,
    Inversion,
    Fourier,
    Covariance,
    Magic,
    Multiplier,
    Duality,
    Convert,
    Spreading,
    Adjoint,
    Conjugation,
    Channel,
    Bounds,
    Marginals,
    All,
}

impl Suite {
    /// Suites in criterion order.
    pub const EACH: [Suite; 16] = [
        Suite::Gaussian,
        Suite::Moyal,
        Suite::Stft,
        Suite::Inversion,
        Suite::Fourier,
        Suite::Covariance,
        Suite::Magic,
        Suite::Multiplier,
        Suite::Duality,
        Suite::Convert,
        Suite::Spreading,
        Suite::Adjoint,
        Suite::Conjugation,
        Suite::Channel,
        Suite::Bounds,
        Suite::Marginals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gaussian => "gaussian",
            Suite::Moyal => "moyal",
            Suite::Stft => "stft",
            Suite::Inversion => "inversion",
            Suite::Fourier => "fourier",
            Suite::Covariance => "covariance",
            Suite::Magic => "magic",
            Suite::Multiplier => "multiplier",
            Suite::Duality => "duality",
            Suite::Convert => "convert",
            Suite::Spreading => "spreading",
            Suite::Adjoint => "adjoint",
            Suite::Conjugation => "conjugation",
            Suite::Channel => "channel",
            Suite::Bounds => "bounds",
            Suite::Marginals => "marginals",
            Suite::All => "all",
        }
    }

    /// Acceptance criterion number covered by the suite.
    pub fn criterion(self) -> Option<u8> {
        Suite::EACH
            .iter()
            .position(|s| *s == self)
            .map(|i| i as u8 + 1)
    }

    pub fn for_criterion(k: u8) -> Option<Suite> {
        Suite::EACH.get((k as usize).checked_sub(1)?).copied()
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(Suite::All);
        }
        Suite::EACH
            .iter()
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("suite: unknown name {s:?}")))
    }
}

pub fn run(suite: Suite, o: &Options) -> Result<Vec<Check>> {
    match suite {
        Suite::Gaussian => gaussian_suite(o),
        Suite::Moyal => moyal_suite(o),
        Suite::Stft => stft_suite(o),
        Suite::Inversion => inversion_suite(o),
        Suite::Fourier => fourier_suite(o),
        Suite::Covariance => covariance_suite(o),
        Suite::Magic => magic_suite(o),
        Suite::Multiplier => multiplier_suite(o),
        Suite::Duality => duality_suite(o),
        Suite::Convert => convert_suite(o),
        Suite::Spreading => spreading_suite(o),
        Suite::Adjoint => adjoint_suite(o),
        Suite::Conjugation => conjugation_suite(o),
        Suite::Channel => channel_suite(o),
        Suite::Bounds => bounds_suite(o),
        Suite::Marginals => marginals_suite(o),
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run(s, o)?);
            }
            Ok(out)
        }
    }
}

fn s(v: f64) -> DMatrix<f64> {
    DMatrix::from_element(1, 1, v)
}

fn preset(p: Preset) -> Result<BlockMatrix> {
    BlockMatrix::preset(&p, 1)
}

/// `n = 256`, `L = 16`: self-dual, `Δ = 1/16`.
fn grid1() -> Grid {
    Grid::new(1, 256, 16.0).expect("valid grid")
}

fn grid2() -> Grid {
    Grid::new(2, 64, 12.0).expect("valid grid")
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// A fixed non-Cohen matrix with `|det| = 1`, dyadic entries and dyadic inverse.
fn general_a() -> Result<BlockMatrix> {
    BlockMatrix::from_row_slice(1, &[1.0, 0.5, 0.5, -0.75])
}

fn named_presets() -> Result<Vec<(&'static str, BlockMatrix)>> {
    Ok(vec![
        ("wigner", preset(Preset::Wigner)?),
        ("tau(0.25)", preset(Preset::Tau(0.25))?),
        ("stft", preset(Preset::Stft)?),
        ("ambiguity", preset(Preset::Ambiguity)?),
        ("rihaczek", preset(Preset::Rihaczek)?),
    ])
}

fn right_regular_presets() -> Result<Vec<(&'static str, BlockMatrix)>> {
    Ok(named_presets()?
        .into_iter()
        .filter(|(_, a)| a.classify().right_regular)
        .collect())
}

/// Max `|F(x, ω) − g(x, ω)|` over the field grid.
fn field_vs_fn<G>(f: &PhaseSpaceField, g: G) -> f64
where
    G: Fn(&[f64], &[f64]) -> Complex64 + Sync,
{
    let (xg, wg) = (f.xgrid, f.wgrid);
    let nw = wg.total();
    let ws = wg.all_coords();
    let d = f.dim();
    f.values
        .par_chunks(nw)
        .enumerate()
        .map(|(j, row)| {
            let x = xg.coords(j);
            row.iter()
                .enumerate()
                .map(|(k, v)| (v - g(&x, &ws[k * d..(k + 1) * d])).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

fn gaussian_suite(o: &Options) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let g = grid1();
    for mu in [-0.4, 0.0, 0.3, 0.5] {
        for lam in [0.5, 1.0, 2.0] {
            let a = preset(Preset::Cohen(s(mu)))?;
            let phi = gaussian(lam, 1)?;
            let field = mwd(&a, &phi, &phi, &g)?;
            let oracle = GaussianOracle::new(&s(mu), lam)?;
            let err = field_vs_fn(&field, |x, w| oracle.eval(x, w));
            out.push(Check::new(1, format!("gaussian d=1 M={mu} λ={lam}"), err, 1e-8, Bound::Below));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let count = match o.scale {
        Scale::Fast => 1,
        Scale::Full => 3,
    };
    let g2 = grid2();
    let phi = gaussian(1.0, 2)?;
    for i in 0..count {
        let m = DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-0.6..=0.6));
        let a = BlockMatrix::preset(&Preset::Cohen(m.clone()), 2)?;
        let field = mwd(&a, &phi, &phi, &g2)?;
        let oracle = GaussianOracle::new(&m, 1.0)?;
        let err = field_vs_fn(&field, |x, w| oracle.eval(x, w));
        out.push(Check::new(1, format!("gaussian d=2 random M #{i}"), err, 1e-8, Bound::Below));
    }
    Ok(out)
}

fn moyal_suite(o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let phi = gaussian(1.0, 1)?;
    let f1 = phi.clone();
    let f2 = tf_shift(&phi, &[0.5], &[-0.25])?;
    let g1 = hermite(1);
    let g2 = tf_shift(&hermite(1), &[0.25], &[0.25])?;
    let ff = inner(&f1, &f2, &g)?;
    let gg = inner(&g1, &g2, &g)?;
    let mut mats = named_presets()?;
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let count = match o.scale {
        Scale::Fast => 3,
        Scale::Full => 10,
    };
    let randoms: Vec<BlockMatrix> = (0..count)
        .map(|_| random_block(&mut rng, 1, 1.5, 0.5, true))
        .collect();
    let mut out = Vec::new();
    let det_factor = |a: &BlockMatrix| {
        if o.break_det {
            1.0
        } else {
            1.0 / a.abs_det()
        }
    };
    let mut worst_random = 0.0f64;
    mats.extend(randoms.iter().map(|a| ("", a.clone())));
    for (name, a) in &mats {
        let b1 = mwd(a, &f1, &g1, &g)?;
        let b2 = mwd(a, &f2, &g2, &g)?;
        let lhs = b1.inner(&b2)?;
        let rhs = ff * gg.conj() * det_factor(a);
        let e = rel(lhs, rhs);
        if name.is_empty() {
            worst_random = worst_random.max(e);
        } else {
            out.push(Check::new(2, format!("orthogonality {name}"), e, 1e-7, Bound::Below));
        }
    }
    out.push(Check::new(
        2,
        format!("orthogonality {count} random right-regular A (max)"),
        worst_random,
        1e-7,
        Bound::Below,
    ));

    // Moyal on a Cohen-type matrix: ⟨B_A f, B_A h⟩ = |⟨f, h⟩|²
    let a = preset(Preset::Cohen(s(0.3)))?;
    let h = tf_shift(&hermite(2), &[0.25], &[0.0])?;
    let lhs = mwd(&a, &phi, &phi, &g)?.inner(&mwd(&a, &h, &h, &g)?)?;
    let rhs = Complex64::new(inner(&phi, &h, &g)?.norm_sqr(), 0.0);
    out.push(Check::new(2, "moyal cohen(0.3)", rel(lhs, rhs), 1e-7, Bound::Below));

    // Gram matrix of |det A|^{1/2} B_A(h_m, h_n), m, n ≤ 4
    let a = &randoms[0];
    let c = if o.break_det { 1.0 } else { a.abs_det().sqrt() };
    let mut fields = Vec::new();
    for m in 0..5 {
        for n in 0..5 {
            let mut fm = mwd(a, &hermite(m), &hermite(n), &g)?;
            fm.values.iter_mut().for_each(|v| *v *= c);
            fields.push(fm);
        }
    }
    let mut worst = 0.0f64;
    for (i, fi) in fields.iter().enumerate() {
        for (j, fj) in fields.iter().enumerate().skip(i) {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((fi.inner(fj)? - want).norm());
        }
    }
    out.push(Check::new(2, "hermite gram, random A", worst, 1e-6, Bound::Below));
    Ok(out)
}

fn stft_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let mut out = Vec::new();
    let a = preset(Preset::Stft)?;
    let pairs = [
        ("hermite(1), gaussian(1)", hermite(1), gaussian(1.0, 1)?),
        (
            "chirp, shifted gaussian",
            chirp(0.5, 1.0, 1)?,
            tf_shift(&gaussian(0.5, 1)?, &[0.5], &[0.0])?,
        ),
    ];
    for (name, f, w) in &pairs {
        let e = mwd(&a, f, w, &g)?.max_abs_diff(&stft(f, w, &g)?)?;
        out.push(Check::new(3, format!("stft preset = direct stft [{name}]"), e, 1e-10, Bound::Below));
    }
    let f = gaussian(1.0, 1)?;
    let w = chirp(0.5, 1.0, 1)?;
    for (name, a) in [
        ("ambiguity", preset(Preset::Ambiguity)?),
        ("cohen(0.3)", preset(Preset::Cohen(s(0.3)))?),
    ] {
        let e = mwd_via_stft(&a, &f, &w, &g)?.max_abs_diff(&mwd(&a, &f, &w, &g)?)?;
        out.push(Check::new(3, format!("stft factorization {name}"), e, 1e-7, Bound::Below));
    }
    Ok(out)
}

fn inversion_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let f = hermite(2);
    let gamma = gaussian(1.0, 1)?;
    let mut out = Vec::new();
    for (name, a) in [
        ("wigner", preset(Preset::Wigner)?),
        ("cohen(0.3)", preset(Preset::Cohen(s(0.3)))?),
        ("ambiguity", preset(Preset::Ambiguity)?),
    ] {
        let h = mwd(&a, &f, &gamma, &g)?;
        let back = reconstruct(&a, &h, &gamma, &gamma)?;
        let e = relative_l2(&back, &f, &g)?;
        out.push(Check::new(4, format!("inversion {name}"), e, 1e-6, Bound::Below));
    }
    Ok(out)
}

/// `f̂` in closed form when available, else by the sampled transform.
fn hat(f: &Signal, g: &Grid) -> Result<Signal> {
    match f.fourier() {
        Some(h) => Ok(h),
        None => ft(f, g),
    }
}

fn fourier_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let f = gaussian(1.0, 1)?;
    let h = tf_shift(&gaussian(0.8, 1)?, &[0.5], &[-0.25])?;
    let mut out = Vec::new();
    for (name, a) in [
        ("tau(0.3)", preset(Preset::Tau(0.3))?),
        ("ambiguity", preset(Preset::Ambiguity)?),
        ("general", general_a()?),
    ] {
        let b = mwd(&a, &f, &h, &g)?;
        let aj = mwd(&a.derived(Derived::AJ), &f, &h, &g)?;
        let e = b.ft2().max_abs_diff(&aj.transpose())?;
        out.push(Check::new(5, format!("fourier of distribution {name}"), e, 1e-7, Bound::Below));

        let swapped = mwd(&a, &h, &f, &g)?;
        let c1 = mwd(&a.derived(Derived::C1), &f, &h, &g)?.conj();
        let e = swapped.max_abs_diff(&c1)?;
        out.push(Check::new(5, format!("interchange {name}"), e, 1e-8, Bound::Below));

        let lhs = mwd(&a, &hat(&f, &g)?, &hat(&h, &g)?, &g)?;
        let mut rhs = mwd(&a.derived(Derived::C2), &f, &h, &g)?
            .transpose()
            .reflect_frequency();
        let c = 1.0 / a.abs_det();
        rhs.values.iter_mut().for_each(|v| *v *= c);
        let e = lhs.max_abs_diff(&rhs)?;
        out.push(Check::new(5, format!("fourier behaviour {name}"), e, 1e-7, Bound::Below));
    }

    // self-adjoint form and f = g: real-valued
    let w = mwd(&preset(Preset::Wigner)?, &h, &h, &g)?;
    let im = w.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    out.push(Check::new(5, "real-valued for self-adjoint form", im, 1e-8, Bound::Below));

    // scaling: B_A(U_2 f)(x, ω) = B_A f(2x, ω/2)
    let a = preset(Preset::Cohen(s(0.3)))?;
    let base = mwd(&a, &h, &h, &g)?.to_field2();
    let scaled = mwd(&a, &dilate(&h, 2.0), &dilate(&h, 2.0), &g)?;
    let e = field_vs_fn(&scaled, |x, w| base.interp(&[2.0 * x[0], w[0] / 2.0]));
    out.push(Check::new(5, "scaling invariance λ=2", e, 1e-5, Bound::Below));
    Ok(out)
}

fn covariance_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let phi = gaussian(1.0, 1)?;
    let mut out = Vec::new();
    let wig = preset(Preset::Wigner)?;
    let e = covariance_check(&wig, &phi, &phi, &[1.0], &[0.0], &[0.0], &[0.0], &g)?.max_abs_diff();
    out.push(Check::new(6, "covariance wigner a=1", e, 1e-8, Bound::Below));

    let h = hermite(1);
    let e = covariance_check(&general_a()?, &phi, &h, &[0.5], &[0.5], &[-0.25], &[0.25], &g)?
        .max_abs_diff();
    out.push(Check::new(6, "covariance general A", e, 1e-8, Bound::Below));

    let e = covariance_check(
        &preset(Preset::Ambiguity)?,
        &phi,
        &h,
        &[0.5],
        &[0.25],
        &[-0.5],
        &[0.5],
        &g,
    )?
    .max_abs_diff();
    out.push(Check::new(6, "covariance ambiguity", e, 1e-8, Bound::Below));

    let e = covariance_cohen_check(&s(0.25), &phi, &h, &[0.5, 0.25], &[-0.5, 0.5], &g)?.max_abs_diff();
    out.push(Check::new(6, "cohen-form covariance T=0.25", e, 1e-8, Bound::Below));

    let t = DMatrix::from_row_slice(2, 2, &[0.5, 0.25, 0.0, 0.75]);
    let f2 = gaussian(1.0, 2)?;
    let e = covariance_cohen_check(&t, &f2, &f2, &[1.0, 0.0, 0.5, 0.0], &[0.0, 1.0, 0.0, 0.5], &grid2())?
        .max_abs_diff();
    out.push(Check::new(6, "cohen-form covariance d=2, non-symmetric T", e, 1e-8, Bound::Below));
    Ok(out)
}

fn magic_suite(o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let step = g.step();
    let f = gaussian(1.0, 1)?;
    let h = tf_shift(&f, &[0.25], &[0.0])?;
    let phi = gaussian(0.5, 1)?;
    let psi = gaussian(1.0, 1)?;
    let count = match o.scale {
        Scale::Fast => 5,
        Scale::Full => 20,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut out = Vec::new();
    for (name, a) in [
        ("wigner", preset(Preset::Wigner)?),
        ("cohen(0.3)", preset(Preset::Cohen(s(0.3)))?),
    ] {
        let mf = MagicFormula::new(&a, &f, &h, &phi, &psi, &g)?;
        let mut worst = 0.0f64;
        for _ in 0..count {
            let z = [
                rng.gen_range(-24i32..=24) as f64 * step,
                rng.gen_range(-24i32..=24) as f64 * step,
            ];
            let zeta = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            let (l, r) = mf.eval(&z, &zeta)?;
            worst = worst.max((l - r).norm());
        }
        out.push(Check::new(7, format!("magic formula {name}, {count} points"), worst, 1e-6, Bound::Below));
        let (l, _) = mf.eval(&[0.0, 0.0], &[0.0, 0.0])?;
        let want = mwd(&a, &f, &h, &g)?.inner(&mwd(&a, &phi, &psi, &g)?)?;
        out.push(Check::new(7, format!("magic formula at origin {name}"), (l - want).norm(), 1e-6, Bound::Below));
    }
    Ok(out)
}

fn multiplier_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let phi = gaussian(1.0, 1)?;
    let mut out = Vec::new();
    let w = mwd(&preset(Preset::Wigner)?, &phi, &phi, &g)?;
    let direct = mwd(&preset(Preset::Cohen(s(0.3)))?, &phi, &phi, &g)?;
    let e = remap(&w, &s(0.0), &s(0.3))?.max_abs_diff(&direct)?;
    out.push(Check::new(8, "remap wigner -> cohen(0.3)", e, 1e-7, Bound::Below));

    let composed = remap(&remap(&direct, &s(0.3), &s(0.0))?, &s(0.0), &s(-0.4))?;
    let e = remap(&direct, &s(0.3), &s(-0.4))?.max_abs_diff(&composed)?;
    out.push(Check::new(8, "remap composition", e, 1e-10, Bound::Below));

    for (m1, m2) in [(-0.5, 0.5), (0.5, -0.5)] {
        let src = mwd(&preset(Preset::Cohen(s(m1)))?, &phi, &phi, &g)?;
        let conv = chirp_convolution(&src, &s(m2 - m1))?;
        let e = conv.max_abs_diff(&remap(&src, &s(m1), &s(m2))?)?;
        out.push(Check::new(8, format!("chirp convolution M {m1} -> {m2}"), e, 1e-6, Bound::Below));
    }
    Ok(out)
}

fn duality_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let presets = [
        ("wigner", preset(Preset::Wigner)?),
        ("tau(0.25)", preset(Preset::Tau(0.25))?),
        ("stft", preset(Preset::Stft)?),
        ("ambiguity", preset(Preset::Ambiguity)?),
        ("rihaczek", preset(Preset::Rihaczek)?),
        ("cohen(0.3)", preset(Preset::Cohen(s(0.3)))?),
    ];
    let signals = [gaussian(1.0, 1)?, hermite(2), chirp(1.0, 1.0, 1)?];
    let window = tf_shift(&gaussian(1.5, 1)?, &[0.5], &[-0.25])?;
    let symbols = [SymbolField::gaussian(&g, 1.0)?, SymbolField::chirped(&g, 1.0, 0.5)?];
    let mut out = Vec::new();
    for (name, a) in &presets {
        let mut worst = 0.0f64;
        for f in &signals {
            for sigma in &symbols {
                let (l, r) = duality_check(sigma, a, f, &window)?;
                worst = worst.max((l - r).norm() / l.norm().max(1.0));
            }
        }
        out.push(Check::new(9, format!("duality {name} (6 combinations)"), worst, 1e-6, Bound::Below));
    }
    Ok(out)
}

fn convert_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let rho = SymbolField::gaussian(&g, 1.0)?;
    let wig = preset(Preset::Wigner)?;
    let t25 = preset(Preset::Tau(0.25))?;
    let amb = preset(Preset::Ambiguity)?;
    let k_ref = kernel_from_symbol(&rho, &wig)?;
    let mut out = Vec::new();

    let sigma = convert_symbol(&rho, &wig, &t25)?;
    let e = kernel_from_symbol(&sigma, &t25)?.max_abs_diff(&k_ref);
    out.push(Check::new(10, "operator equality after conversion", e, 1e-5, Bound::Below));

    let sigma_c = convert_symbol_cohen(&rho, &s(0.5), &s(0.25))?;
    let e = kernel_from_symbol(&sigma_c, &t25)?.max_abs_diff(&k_ref);
    out.push(Check::new(10, "operator equality after cohen conversion", e, 1e-5, Bound::Below));

    let e = sigma_c.to_field().max_abs_diff(&sigma.to_field())?;
    out.push(Check::new(10, "cohen conversion = general conversion", e, 1e-6, Bound::Below));

    let chained = convert_symbol(&sigma, &t25, &amb)?;
    let direct = convert_symbol(&rho, &wig, &amb)?;
    let e = chained.to_field().max_abs_diff(&direct.to_field())?;
    out.push(Check::new(10, "three-calculus chain", e, 1e-5, Bound::Below));

    let kn = preset(Preset::Rihaczek)?;
    let back = convert_symbol(&convert_symbol(&rho, &wig, &kn)?, &kn, &wig)?;
    let e = back.to_field().max_abs_diff(&rho.to_field())?;
    out.push(Check::new(10, "weyl <-> kohn-nirenberg round trip", e, 1e-6, Bound::Below));
    Ok(out)
}

fn spreading_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = Grid::new(1, 64, 12.0)?;
    let sigma = SymbolField::gaussian(&g, 1.0)?;
    let f = gaussian(1.0, 1)?;
    let mut out = Vec::new();
    for (name, a) in [
        ("T=1/2", preset(Preset::Wigner)?),
        ("T=0.3", preset(Preset::Affine(s(0.3)))?),
    ] {
        let spread = spreading_apply(&sigma, &a, &f)?;
        let kern = kernel_from_symbol(&sigma, &a)?.apply(&f)?;
        let e = relative_l2(&spread, &kern, &g)?;
        out.push(Check::new(11, format!("spreading vs kernel {name}"), e, 1e-4, Bound::Below));
    }
    Ok(out)
}

fn adjoint_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let gauss = SymbolField::gaussian(&g, 1.0)?;
    let chirped = SymbolField::chirped(&g, 1.0, 0.5)?;
    let mut out = Vec::new();
    let e = kernel_from_symbol(&gauss, &preset(Preset::Wigner)?)?.hermitian_deviation();
    out.push(Check::new(12, "weyl real symbol hermitian", e, 1e-8, Bound::Below));

    for (name, a) in [
        ("tau(0.25)", preset(Preset::Tau(0.25))?),
        ("ambiguity", preset(Preset::Ambiguity)?),
        ("general", general_a()?),
    ] {
        let k = kernel_from_symbol(&chirped, &a)?;
        let (rho, b) = adjoint_symbol(&chirped, &a);
        let e = kernel_from_symbol(&rho, &b)?.max_abs_diff(&k.adjoint());
        out.push(Check::new(12, format!("adjoint symbol {name}"), e, 1e-6, Bound::Below));
        let (rho2, b2) = adjoint_symbol(&rho, &b);
        let e = kernel_from_symbol(&rho2, &b2)?.max_abs_diff(&k);
        out.push(Check::new(12, format!("double adjoint {name}"), e, 1e-8, Bound::Below));
    }

    // real symbol e^{−π(x² + ω²)} cos(π x ω) under Kohn–Nirenberg
    let mut real = chirped.clone();
    real.values.iter_mut().for_each(|v| *v = Complex64::new(v.re, 0.0));
    let e = kernel_from_symbol(&real, &preset(Preset::Rihaczek)?)?.hermitian_deviation();
    out.push(Check::new(12, "kohn-nirenberg real symbol not hermitian", e, 1e-3, Bound::Above));
    Ok(out)
}

fn conjugation_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let f = hermite(2);
    let nf = inner(&f, &f, &g)?.re.sqrt();
    let aniso = SymbolField::from_fn(&g, |x, w| {
        let e = -std::f64::consts::PI * (x[0] * x[0] / 1.5 + 1.5 * w[0] * w[0]);
        Complex64::new(e.exp(), 0.0)
    });
    let mut out = Vec::new();
    for (name, a) in [
        ("T=1/2", preset(Preset::Wigner)?),
        ("T=0.3", preset(Preset::Affine(s(0.3)))?),
    ] {
        let (l, r) = fourier_conjugation_check(&aniso, &a, &f)?;
        let e = distance(&l, &r, &g)? / nf;
        out.push(Check::new(13, format!("fourier conjugation {name}"), e, 1e-6, Bound::Below));
    }
    let radial = SymbolField::gaussian(&g, 1.0)?;
    let wig = preset(Preset::Wigner)?;
    let (l, _) = fourier_conjugation_check(&radial, &wig, &f)?;
    let direct = kernel_from_symbol(&radial, &wig)?.apply(&f)?;
    let e = distance(&l, &direct, &g)? / nf;
    out.push(Check::new(13, "radial weyl symbol commutes with F", e, 1e-6, Bound::Below));
    Ok(out)
}

fn distance(a: &Signal, b: &Signal, g: &Grid) -> Result<f64> {
    let x = a.sample(g)?;
    let y = b.sample(g)?;
    let d: Vec<Complex64> = x.iter().zip(&y).map(|(u, v)| u - v).collect();
    lp_norm_samples(&d, g, 2.0)
}

fn channel_suite(o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let step = g.step();
    let phi = gaussian(1.0, 1)?;
    let chirped = SymbolField::chirped(&g, 1.0, 0.5)?;
    let points = match o.scale {
        Scale::Fast => 3,
        Scale::Full => 5,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut out = Vec::new();
    for (name, t, spacing) in [("T=1/2", 0.5, 2i32), ("T=0.3", 0.3, 10i32)] {
        let tm = s(t);
        let a = preset(Preset::Affine(tm.clone()))?;
        let window = mwd(&a, &phi, &phi, &g)?;
        let reach = 32 / spacing;
        let mut lattice: Vec<Vec<f64>> = Vec::new();
        while lattice.len() < points {
            let p = vec![
                (rng.gen_range(-reach..=reach) * spacing) as f64 * step,
                (rng.gen_range(-reach..=reach) * spacing) as f64 * step,
            ];
            if !lattice.contains(&p) {
                lattice.push(p);
            }
        }
        let cm = channel_matrix(&chirped, &a, &phi, &lattice)?;
        let mut worst = 0.0f64;
        let mut worst_u = 0.0f64;
        for (iz, z) in lattice.iter().enumerate() {
            for (iw, w) in lattice.iter().enumerate() {
                let m = cm.entry(iz, iw).norm();
                worst = worst.max((m - channel_stft_magnitude(&chirped, &window, &tm, z, w, false)?).abs());
                worst_u = worst_u.max((m - channel_stft_magnitude(&chirped, &window, &tm, z, w, true)?).abs());
            }
        }
        let pairs = points * points;
        out.push(Check::new(14, format!("channel lemma {name}, {pairs} pairs"), worst, 1e-6, Bound::Below));
        out.push(Check::new(14, format!("channel lemma via U_T {name}, {pairs} pairs"), worst_u, 1e-6, Bound::Below));
        if t == 0.5 {
            let real = SymbolField::gaussian(&g, 1.0)?;
            let cr = channel_matrix(&real, &a, &phi, &lattice)?;
            let mut h = 0.0f64;
            for iz in 0..points {
                for iw in 0..points {
                    h = h.max((cr.entry(iz, iw) - cr.entry(iw, iz).conj()).norm());
                }
            }
            out.push(Check::new(14, "channel hermitian symmetry T=1/2", h, 1e-8, Bound::Below));
        }
    }
    Ok(out)
}

fn bounds_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let f = gaussian(1.0, 1)?;
    let h = tf_shift(&gaussian(2.0, 1)?, &[0.5], &[0.25])?;
    let fs = f.sample(&g)?;
    let hs = h.sample(&g)?;
    let mut out = Vec::new();
    for (name, a) in right_regular_presets()? {
        let field = mwd(&a, &f, &h, &g)?;
        let d12 = a.a12().determinant().abs();
        let d22 = a.a22().determinant().abs();
        let mut worst = 0.0f64;
        for (p, q) in [(2.0, 2.0), (2.0, 4.0), (1.0, f64::INFINITY)] {
            let pp = conjugate(p);
            let lhs = field.mixed_norm(q, q)?;
            let rhs = lp_norm_samples(&fs, &g, p)? * lp_norm_samples(&hs, &g, pp)?
                / (a.abs_det().powf(1.0 / q)
                    * d12.powf(1.0 / p - 1.0 / q)
                    * d22.powf(1.0 / pp - 1.0 / q));
            worst = worst.max(lhs / rhs);
        }
        out.push(Check::new(15, format!("lebesgue bound {name} (ratio)"), worst, 1.02, Bound::AtMost));
    }
    let sigma = SymbolField::gaussian(&g, 1.0)?;
    let l1 = sigma.norm(1.0)?;
    let l2 = sigma.norm(2.0)?;
    for (name, a) in right_regular_presets()? {
        let op = kernel_from_symbol(&sigma, &a)?;
        let bound = l1 / (a.a12().determinant().abs() * a.a22().determinant().abs()).sqrt();
        out.push(Check::new(15, format!("L1 symbol bound {name} (ratio)"), op.op_norm() / bound, 1.05, Bound::AtMost));
    }
    for (name, a) in named_presets()? {
        let op = kernel_from_symbol(&sigma, &a)?;
        let bound = l2 / a.abs_det().sqrt();
        out.push(Check::new(15, format!("hilbert-schmidt bound {name} (ratio)"), hs_norm(&op) / bound, 1.02, Bound::AtMost));
    }
    Ok(out)
}

fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn marginals_suite(_o: &Options) -> Result<Vec<Check>> {
    let g = grid1();
    let phi = gaussian(1.0, 1)?;
    let xs = g.points();
    let ws = g.dual().points();
    let energy = 0.5f64.sqrt();
    let mut out = Vec::new();
    for m in [0.0, 0.3, -0.4] {
        let mg = marginals(&mwd(&preset(Preset::Cohen(s(m)))?, &phi, &phi, &g)?);
        let et = mg
            .time
            .iter()
            .zip(&xs)
            .map(|(v, x)| (v - (-2.0 * std::f64::consts::PI * x * x).exp()).norm())
            .fold(0.0, f64::max);
        let ef = mg
            .freq
            .iter()
            .zip(&ws)
            .map(|(v, w)| (v - (-2.0 * std::f64::consts::PI * w * w).exp()).norm())
            .fold(0.0, f64::max);
        let total: Complex64 = mg.time.iter().sum::<Complex64>() * g.step();
        out.push(Check::new(16, format!("time marginal cohen({m})"), et, 1e-7, Bound::Below));
        out.push(Check::new(16, format!("frequency marginal cohen({m})"), ef, 1e-7, Bound::Below));
        out.push(Check::new(16, format!("energy cohen({m})"), (total - energy).norm(), 1e-7, Bound::Below));
    }
    let mg = marginals(&mwd(&preset(Preset::Ambiguity)?, &phi, &phi, &g)?);
    let e = mg
        .time
        .iter()
        .zip(&xs)
        .map(|(v, x)| (v - phi.eval(&[x / 2.0]) * phi.eval(&[-x / 2.0]).conj()).norm())
        .fold(0.0, f64::max);
    out.push(Check::new(16, "time marginal ambiguity", e, 1e-7, Bound::Below));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for (i, s) in Suite::EACH.iter().enumerate() {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
            assert_eq!(s.criterion(), Some(i as u8 + 1));
            assert_eq!(Suite::for_criterion(i as u8 + 1), Some(*s));
        }
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!(Suite::for_criterion(0), None);
    }

    #[test]
    fn check_bounds() {
        assert!(Check::new(1, "a", 0.5, 1.0, Bound::Below).passed());
        assert!(!Check::new(1, "a", 1.0, 1.0, Bound::Below).passed());
        assert!(Check::new(1, "a", 1.0, 1.0, Bound::AtMost).passed());
        assert!(Check::new(1, "a", 2.0, 1.0, Bound::Above).passed());
        assert!(!Check::new(1, "a", f64::NAN, 1.0, Bound::Below).passed());
        assert!(Check::new(3, "x", 1e-12, 1e-10, Bound::Below).to_string().starts_with("PASS"));
    }
}
