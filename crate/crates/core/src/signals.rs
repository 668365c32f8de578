//! Grids, signals on ℝ^d (analytic or sampled), time-frequency shifts,
//! inner products and mixed norms.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier;

/// Uniform centered grid on `[-L/2, L/2)^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    len: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, len: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 2, got {n}"
            )));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidGrid(format!("len must be positive, got {len}")));
        }
        Ok(Self { dim, n, len })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> f64 {
        self.len
    }
    pub fn step(&self) -> f64 {
        self.len / self.n as f64
    }
    /// Quadrature weight `Δ^d`.
    pub fn weight(&self) -> f64 {
        self.step().powi(self.dim as i32)
    }
    /// Number of grid points `n^d`.
    pub fn total(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Axis coordinate `x_j = (j − n/2)Δ`.
    pub fn point(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.step()
    }
    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }
    /// Frequencies `ω_k = (k − n/2)/L`; the points of [`Grid::dual`].
    pub fn freq_points(&self) -> Vec<f64> {
        self.dual().points()
    }

    /// The centered DFT dual grid: same `n`, step `1/L`.
    pub fn dual(&self) -> Grid {
        Grid {
            dim: self.dim,
            n: self.n,
            len: self.n as f64 / self.len,
        }
    }

    /// Same extent, `factor` times as many points.
    pub fn refined(&self, factor: usize) -> Grid {
        Grid {
            dim: self.dim,
            n: self.n * factor,
            len: self.len,
        }
    }

    pub fn with_dim(&self, dim: usize) -> Result<Grid> {
        Grid::new(dim, self.n, self.len)
    }

    /// Per-axis indices of flat (row-major) index `flat`.
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.n, flat % self.n]
        }
    }

    /// Coordinates of flat index `flat`, written into `out[..dim]`.
    pub fn coords_into(&self, flat: usize, out: &mut [f64]) {
        let idx = self.unflatten(flat);
        for (a, o) in out.iter_mut().take(self.dim).enumerate() {
            *o = self.point(idx[a]);
        }
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.coords_into(flat, &mut v);
        v
    }

    /// All grid points as a flat `total × dim` array.
    pub fn all_coords(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.total() * self.dim];
        for (k, chunk) in out.chunks_mut(self.dim).enumerate() {
            self.coords_into(k, chunk);
        }
        out
    }

    /// Integer offset `v/Δ` per axis if every component is a grid multiple.
    pub fn offset_of(&self, v: &[f64]) -> Option<Vec<i64>> {
        let step = self.step();
        v.iter()
            .map(|&c| {
                let r = c / step;
                let k = r.round();
                ((r - k).abs() <= 1e-9 * r.abs().max(1.0)).then_some(k as i64)
            })
            .collect()
    }

    /// Flat index of the point `p`, if it lies on the grid.
    pub fn index_of(&self, p: &[f64]) -> Option<usize> {
        let off = self.offset_of(p)?;
        let half = (self.n / 2) as i64;
        let mut flat = 0usize;
        for o in off {
            let j = o + half;
            if j < 0 || j >= self.n as i64 {
                return None;
            }
            flat = flat * self.n + j as usize;
        }
        Some(flat)
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.n == other.n
            && (self.len - other.len).abs() <= 1e-12 * self.len.max(other.len)
    }

    pub(crate) fn check_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: {:?} vs {:?}",
                self, other
            )))
        }
    }
}

pub type SignalFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A function on ℝ^d.
#[derive(Clone)]
pub enum Signal {
    /// `t ↦ exp(−π a |t|²)` with `Re a > 0`.
    Gauss { dim: usize, a: Complex64 },
    /// L²-normalized Hermite function `h_k` (d = 1).
    Hermite { k: usize },
    /// `t ↦ e^{2πi t·w0} f(t − x0)`.
    Shift {
        base: Box<Signal>,
        x0: Vec<f64>,
        w0: Vec<f64>,
    },
    /// `t ↦ |λ|^{d/2} f(λ t)`.
    Dilate { base: Box<Signal>, lambda: f64 },
    /// `t ↦ f(M t)` for an invertible `d×d` matrix `M` (row-major).
    Linear { base: Box<Signal>, m: Vec<f64> },
    /// `t ↦ conj f(t)`.
    Conj(Box<Signal>),
    /// Finite linear combination.
    Sum(Vec<(Complex64, Signal)>),
    Custom { dim: usize, f: SignalFn },
    /// Samples on a grid; off-grid evaluation interpolates with zero extension.
    Sampled {
        grid: Grid,
        samples: Arc<Vec<Complex64>>,
    },
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::Gauss { dim, a } => write!(f, "Gauss(dim={dim}, a={a})"),
            Signal::Hermite { k } => write!(f, "Hermite({k})"),
            Signal::Shift { base, x0, w0 } => write!(f, "Shift({base:?}, x0={x0:?}, w0={w0:?})"),
            Signal::Dilate { base, lambda } => write!(f, "Dilate({base:?}, {lambda})"),
            Signal::Linear { base, m } => write!(f, "Linear({base:?}, {m:?})"),
            Signal::Conj(b) => write!(f, "Conj({b:?})"),
            Signal::Sum(t) => write!(f, "Sum({t:?})"),
            Signal::Custom { dim, .. } => write!(f, "Custom(dim={dim})"),
            Signal::Sampled { grid, .. } => write!(f, "Sampled({grid:?})"),
        }
    }
}

/// `e^{−π|t|²/λ}`.
pub fn gaussian(lambda: f64, dim: usize) -> Result<Signal> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveParameter {
            name: "lambda",
            value: lambda,
        });
    }
    Ok(Signal::Gauss {
        dim,
        a: Complex64::new(1.0 / lambda, 0.0),
    })
}

/// Chirped Gaussian `e^{−π|t|²/λ} e^{πi c |t|²}`.
pub fn chirp(rate: f64, lambda: f64, dim: usize) -> Result<Signal> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveParameter {
            name: "lambda",
            value: lambda,
        });
    }
    Ok(Signal::Gauss {
        dim,
        a: Complex64::new(1.0 / lambda, -rate),
    })
}

pub fn hermite(k: usize) -> Signal {
    Signal::Hermite { k }
}

/// Maximum supported Hermite index.
pub const MAX_HERMITE: usize = 32;

/// `h_k(t) = (2π)^{1/4} ψ_k(√(2π) t)` where `ψ_k` are the standard Hermite functions.
pub fn hermite_value(k: usize, t: f64) -> f64 {
    let u = (2.0 * PI).sqrt() * t;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * u * u).exp();
    for j in 0..k {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * u * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (2.0 * PI).powf(0.25) * cur
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Signal {
    pub fn dim(&self) -> usize {
        match self {
            Signal::Gauss { dim, .. } | Signal::Custom { dim, .. } => *dim,
            Signal::Hermite { .. } => 1,
            Signal::Shift { base, .. }
            | Signal::Dilate { base, .. }
            | Signal::Linear { base, .. }
            | Signal::Conj(base) => base.dim(),
            Signal::Sum(terms) => terms.first().map_or(1, |(_, s)| s.dim()),
            Signal::Sampled { grid, .. } => grid.dim(),
        }
    }

    pub fn is_analytic(&self) -> bool {
        match self {
            Signal::Sampled { .. } => false,
            Signal::Shift { base, .. }
            | Signal::Dilate { base, .. }
            | Signal::Linear { base, .. }
            | Signal::Conj(base) => base.is_analytic(),
            Signal::Sum(terms) => terms.iter().all(|(_, s)| s.is_analytic()),
            _ => true,
        }
    }

    pub fn custom<F>(dim: usize, f: F) -> Signal
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Signal::Custom { dim, f: Arc::new(f) }
    }

    pub fn sampled(grid: Grid, samples: Vec<Complex64>) -> Result<Signal> {
        if samples.len() != grid.total() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                grid.total()
            )));
        }
        Ok(Signal::Sampled {
            grid,
            samples: Arc::new(samples),
        })
    }

    pub fn eval(&self, t: &[f64]) -> Complex64 {
        match self {
            Signal::Gauss { a, .. } => (-PI * a * dot(t, t)).exp(),
            Signal::Hermite { k } => Complex64::new(hermite_value(*k, t[0]), 0.0),
            Signal::Shift { base, x0, w0 } => {
                let mut s = [0.0; 4];
                let d = t.len();
                for i in 0..d {
                    s[i] = t[i] - x0[i];
                }
                let phase = 2.0 * PI * dot(t, w0);
                Complex64::from_polar(1.0, phase) * base.eval(&s[..d])
            }
            Signal::Dilate { base, lambda } => {
                let mut s = [0.0; 4];
                let d = t.len();
                for i in 0..d {
                    s[i] = lambda * t[i];
                }
                base.eval(&s[..d]) * lambda.abs().powf(d as f64 / 2.0)
            }
            Signal::Linear { base, m } => {
                let d = t.len();
                let mut s = [0.0; 4];
                for i in 0..d {
                    s[i] = (0..d).map(|j| m[i * d + j] * t[j]).sum();
                }
                base.eval(&s[..d])
            }
            Signal::Conj(base) => base.eval(t).conj(),
            Signal::Sum(terms) => terms.iter().map(|(c, s)| c * s.eval(t)).sum(),
            Signal::Custom { f, .. } => f(t),
            Signal::Sampled { grid, samples } => fourier::interp_signal(grid, samples, t),
        }
    }

    /// Samples on every point of `grid` (row-major).
    pub fn sample(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        if self.dim() != grid.dim() {
            return Err(Error::GridMismatch(format!(
                "signal has dimension {}, grid has {}",
                self.dim(),
                grid.dim()
            )));
        }
        if let Signal::Sampled { grid: g, samples } = self {
            g.check_same(grid, "sampled signal")?;
            return Ok(samples.as_ref().clone());
        }
        let mut p = vec![0.0; grid.dim()];
        Ok((0..grid.total())
            .map(|k| {
                grid.coords_into(k, &mut p);
                self.eval(&p)
            })
            .collect())
    }

    /// Sampled copy of `self` on `grid`.
    pub fn to_sampled(&self, grid: &Grid) -> Result<Signal> {
        Signal::sampled(*grid, self.sample(grid)?)
    }

    /// Closed-form Fourier transform, when one is known.
    pub fn fourier(&self) -> Option<Signal> {
        match self {
            Signal::Gauss { dim, a } => {
                let c = a.powf(-0.5).powi(*dim as i32);
                let g = Signal::Gauss {
                    dim: *dim,
                    a: a.inv(),
                };
                Some(if (c - 1.0).norm() == 0.0 {
                    g
                } else {
                    Signal::Sum(vec![(c, g)])
                })
            }
            Signal::Hermite { k } => {
                let c = Complex64::new(0.0, -1.0).powi(*k as i32);
                Some(Signal::Sum(vec![(c, Signal::Hermite { k: *k })]))
            }
            Signal::Shift { base, x0, w0 } => {
                let fb = base.fourier()?;
                let c = Complex64::from_polar(1.0, 2.0 * PI * dot(x0, w0));
                let shifted = Signal::Shift {
                    base: Box::new(fb),
                    x0: w0.clone(),
                    w0: x0.iter().map(|v| -v).collect(),
                };
                Some(Signal::Sum(vec![(c, shifted)]))
            }
            Signal::Dilate { base, lambda } => Some(Signal::Dilate {
                base: Box::new(base.fourier()?),
                lambda: 1.0 / lambda,
            }),
            Signal::Linear { base, m } => {
                // F[f(M·)](ω) = |det M|⁻¹ f̂(M^{-T} ω)
                let d = self.dim();
                let mm = nalgebra::DMatrix::from_row_slice(d, d, m);
                let det = mm.determinant().abs();
                let inv_t = mm.try_inverse()?.transpose();
                let rows: Vec<f64> = (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i, j)))
                    .map(|(i, j)| inv_t[(i, j)])
                    .collect();
                Some(Signal::Sum(vec![(
                    Complex64::new(1.0 / det, 0.0),
                    Signal::Linear {
                        base: Box::new(base.fourier()?),
                        m: rows,
                    },
                )]))
            }
            Signal::Conj(base) => {
                // F[conj f](ω) = conj f̂(−ω)
                let d = self.dim();
                let mut m = vec![0.0; d * d];
                for i in 0..d {
                    m[i * d + i] = -1.0;
                }
                Some(Signal::Conj(Box::new(Signal::Linear {
                    base: Box::new(base.fourier()?),
                    m,
                })))
            }
            Signal::Sum(terms) => {
                let mut out = Vec::with_capacity(terms.len());
                for (c, s) in terms {
                    out.push((*c, s.fourier()?));
                }
                Some(Signal::Sum(out))
            }
            Signal::Custom { .. } | Signal::Sampled { .. } => None,
        }
    }

    pub fn scaled(self, c: Complex64) -> Signal {
        Signal::Sum(vec![(c, self)])
    }

    pub fn conj(self) -> Signal {
        Signal::Conj(Box::new(self))
    }
}

/// Time-frequency shift `π(x0, w0) f = M_{w0} T_{x0} f`.
///
/// Sampled signals shift by whole grid steps only; samples shifted in from
/// outside the box are zero.
pub fn tf_shift(f: &Signal, x0: &[f64], w0: &[f64]) -> Result<Signal> {
    let d = f.dim();
    if x0.len() != d || w0.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "shift vectors must have length {d}"
        )));
    }
    match f {
        Signal::Sampled { grid, samples } => {
            let off = grid.offset_of(x0).ok_or_else(|| {
                Error::OffGridShift(format!("x0 = {x0:?} with step {}", grid.step()))
            })?;
            let n = grid.n() as i64;
            let mut out = vec![Complex64::new(0.0, 0.0); grid.total()];
            let mut p = vec![0.0; d];
            for (k, o) in out.iter_mut().enumerate() {
                let idx = grid.unflatten(k);
                let mut src = 0usize;
                let mut inside = true;
                for a in 0..d {
                    let j = idx[a] as i64 - off[a];
                    if j < 0 || j >= n {
                        inside = false;
                        break;
                    }
                    src = src * grid.n() + j as usize;
                }
                if inside {
                    grid.coords_into(k, &mut p);
                    *o = samples[src] * Complex64::from_polar(1.0, 2.0 * PI * dot(&p, w0));
                }
            }
            Signal::sampled(*grid, out)
        }
        _ => Ok(Signal::Shift {
            base: Box::new(f.clone()),
            x0: x0.to_vec(),
            w0: w0.to_vec(),
        }),
    }
}

/// `U_λ f(t) = |λ|^{d/2} f(λ t)`.
pub fn dilate(f: &Signal, lambda: f64) -> Signal {
    Signal::Dilate {
        base: Box::new(f.clone()),
        lambda,
    }
}

/// Riemann-sum inner product `Σ f(x_j) conj g(x_j) Δ^d`.
pub fn inner(f: &Signal, g: &Signal, grid: &Grid) -> Result<Complex64> {
    let a = f.sample(grid)?;
    let b = g.sample(grid)?;
    Ok(inner_samples(&a, &b, grid))
}

/// `Σ a conj b` over fixed-size blocks summed in order, so the result does not
/// depend on how the work was scheduled.
pub(crate) fn ordered_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    use rayon::prelude::*;
    a.par_chunks(4096)
        .zip(b.par_chunks(4096))
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u * v.conj()).sum::<Complex64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

pub fn inner_samples(a: &[Complex64], b: &[Complex64], grid: &Grid) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() * grid.weight()
}

pub fn norm_samples(a: &[Complex64], grid: &Grid) -> f64 {
    (a.iter().map(|x| x.norm_sqr()).sum::<f64>() * grid.weight()).sqrt()
}

/// Discrete `L^p` norm of samples; `p = ∞` gives the maximum.
pub fn lp_norm_samples(a: &[Complex64], grid: &Grid, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Ok(a.iter().map(|x| x.norm()).fold(0.0, f64::max));
    }
    Ok((a.iter().map(|x| x.norm().powf(p)).sum::<f64>() * grid.weight()).powf(1.0 / p))
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::InvalidExponent(p))
    } else {
        Ok(())
    }
}

/// Discrete `L^{p,q}` norm of a phase-space array laid out `[x][ω]`:
/// inner `p`-norm over `x` (weight `Δ^d`), outer `q`-norm over `ω` (weight `(1/L)^d`).
pub fn mixed_norm(values: &[Complex64], xgrid: &Grid, wgrid: &Grid, p: f64, q: f64) -> Result<f64> {
    check_exponent(p)?;
    check_exponent(q)?;
    let nx = xgrid.total();
    let nw = wgrid.total();
    if values.len() != nx * nw {
        return Err(Error::GridMismatch(format!(
            "{} values for a {}×{} field",
            values.len(),
            nx,
            nw
        )));
    }
    let (wx, ww) = (xgrid.weight(), wgrid.weight());
    let inner: Vec<f64> = (0..nw)
        .map(|k| {
            let col = (0..nx).map(|j| values[j * nw + k].norm());
            if p.is_infinite() {
                col.fold(0.0, f64::max)
            } else {
                (col.map(|v| v.powf(p)).sum::<f64>() * wx).powf(1.0 / p)
            }
        })
        .collect();
    Ok(if q.is_infinite() {
        inner.into_iter().fold(0.0, f64::max)
    } else {
        (inner.iter().map(|v| v.powf(q)).sum::<f64>() * ww).powf(1.0 / q)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g256() -> Grid {
        Grid::new(1, 256, 16.0).unwrap()
    }

    #[test]
    fn grid_basics() {
        let g = g256();
        assert_eq!(g.step(), 1.0 / 16.0);
        assert_eq!(g.point(128), 0.0);
        assert_eq!(g.point(0), -8.0);
        assert!((g.dual().step() - 1.0 / 16.0).abs() < 1e-15);
        assert!(g.dual().dual().same_as(&g));
        assert!(Grid::new(1, 100, 1.0).is_err());
        assert!(Grid::new(3, 64, 1.0).is_err());
        assert_eq!(g.index_of(&[0.5]), Some(136));
        assert_eq!(g.index_of(&[0.51]), None);
        let g2 = Grid::new(2, 8, 4.0).unwrap();
        assert_eq!(g2.coords(9), vec![g2.point(1), g2.point(1)]);
        assert_eq!(g2.index_of(&g2.coords(37)), Some(37));
    }

    #[test]
    fn gaussian_examples() {
        let f = gaussian(1.0, 1).unwrap();
        assert_eq!(f.eval(&[0.0]), Complex64::new(1.0, 0.0));
        let n2 = inner(&f, &f, &g256()).unwrap();
        assert!((n2.re - 2f64.powf(-0.5)).abs() < 1e-10 && n2.im.abs() < 1e-15);
        let f2 = gaussian(2.0, 1).unwrap();
        assert!((f2.eval(&[1.0]).re - (-PI / 2.0).exp()).abs() < 1e-15);
        assert!(matches!(
            gaussian(0.0, 1),
            Err(Error::NonPositiveParameter { .. })
        ));
    }

    #[test]
    fn gaussian_norm_over_lambda_range() {
        for lambda in [0.5, 1.0, 2.0, 3.0, 4.0] {
            let f = gaussian(lambda, 1).unwrap();
            let n2 = inner(&f, &f, &g256()).unwrap().re;
            assert!((n2 - (lambda / 2.0f64).sqrt()).abs() < 1e-10, "λ={lambda}");
        }
    }

    #[test]
    fn hermite_examples() {
        let g = g256();
        let h0 = hermite(0);
        let phi = gaussian(1.0, 1).unwrap();
        for t in [-1.3, 0.0, 0.4, 2.2] {
            let want = 2f64.powf(0.25) * phi.eval(&[t]).re;
            assert!((h0.eval(&[t]).re - want).abs() < 1e-15);
        }
        assert_eq!(hermite(1).eval(&[0.0]).re, 0.0);
        for i in 0..=5 {
            for j in 0..=5 {
                let v = inner(&hermite(i), &hermite(j), &g).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v.re - want).abs() < 1e-8 && v.im.abs() < 1e-12);
            }
        }
        // high index stays normalized
        let v = inner(&hermite(MAX_HERMITE), &hermite(MAX_HERMITE), &g).unwrap();
        assert!((v.re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tf_shift_properties() {
        let g = g256();
        let f = hermite(2);
        let s = tf_shift(&f, &[0.0], &[0.0]).unwrap();
        assert_eq!(s.sample(&g).unwrap(), f.sample(&g).unwrap());
        let s = tf_shift(&f, &[0.7], &[1.3]).unwrap();
        for t in [-1.0, 0.2, 1.9] {
            assert!((s.eval(&[t]).norm() - f.eval(&[t - 0.7]).norm()).abs() < 1e-14);
        }
        let n0 = inner(&f, &f, &g).unwrap().re;
        let n1 = inner(&s, &s, &g).unwrap().re;
        assert!((n0 - n1).abs() < 1e-10);
        let a = tf_shift(&tf_shift(&f, &[0.3], &[0.0]).unwrap(), &[0.5], &[0.0]).unwrap();
        let b = tf_shift(&f, &[0.8], &[0.0]).unwrap();
        for t in [-0.4, 0.0, 1.1] {
            assert!((a.eval(&[t]) - b.eval(&[t])).norm() < 1e-15);
        }
    }

    #[test]
    fn sampled_shift_on_and_off_grid() {
        let g = g256();
        let f = gaussian(1.0, 1).unwrap();
        let fs = f.to_sampled(&g).unwrap();
        let s = tf_shift(&fs, &[0.5], &[0.25]).unwrap();
        let want = tf_shift(&f, &[0.5], &[0.25]).unwrap().sample(&g).unwrap();
        let got = s.sample(&g).unwrap();
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-14);
        assert!(matches!(
            tf_shift(&fs, &[0.01], &[0.0]),
            Err(Error::OffGridShift(_))
        ));
    }

    #[test]
    fn sampling_is_exact_for_analytic() {
        let g = g256();
        let f = chirp(0.7, 1.5, 1).unwrap();
        let s = f.sample(&g).unwrap();
        for (k, v) in s.iter().enumerate() {
            assert_eq!(*v, f.eval(&[g.point(k)]));
        }
    }

    #[test]
    fn inner_checks() {
        let g = g256();
        let v = inner(&hermite(0), &hermite(1), &g).unwrap();
        assert!(v.norm() < 1e-10);
        let f = Signal::Sum(vec![
            (Complex64::new(0.3, 0.2), hermite(3)),
            (Complex64::new(-1.0, 0.5), chirp(1.0, 1.0, 1).unwrap()),
        ]);
        let v = inner(&f, &f, &g).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-14);
        let other = Grid::new(1, 128, 16.0).unwrap();
        let fs = f.to_sampled(&other).unwrap();
        assert!(matches!(inner(&fs, &f, &g), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn mixed_norm_examples() {
        let g = Grid::new(1, 4, 4.0).unwrap();
        let w = g.dual();
        let ones = vec![Complex64::new(1.0, 0.0); 16];
        assert!((mixed_norm(&ones, &g, &w, 1.0, 1.0).unwrap() - 4.0).abs() < 1e-14);
        let vals: Vec<Complex64> = (0..16).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let fro = (vals.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.step() * w.step()).sqrt();
        assert!((mixed_norm(&vals, &g, &w, 2.0, 2.0).unwrap() - fro).abs() < 1e-12);
        let mx = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert_eq!(
            mixed_norm(&vals, &g, &w, f64::INFINITY, f64::INFINITY).unwrap(),
            mx
        );
        assert!(matches!(
            mixed_norm(&vals, &g, &w, 0.5, 2.0),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn closed_form_fourier_pairs_compose() {
        // F⁴ = Id on closed forms
        let f = tf_shift(&chirp(0.4, 1.2, 1).unwrap(), &[0.3], &[-0.6]).unwrap();
        let f4 = f.fourier().unwrap().fourier().unwrap().fourier().unwrap().fourier().unwrap();
        for t in [-1.0, 0.0, 0.45, 1.7] {
            assert!((f4.eval(&[t]) - f.eval(&[t])).norm() < 1e-13);
        }
    }
}
