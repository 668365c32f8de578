//! Centered discrete approximations of the continuous Fourier transform,
//! partial transforms on product grids, coordinate changes `F ↦ F∘A` and
//! Fourier multipliers.
//!
//! Forward transforms use the kernel `e^{−2πi x·ω}` scaled by the input step,
//! inverse transforms use `e^{+2πi x·ω}` scaled by the input step. Both map a
//! grid `G` onto `G.dual()`. Centering is done by rotating the index range by
//! `n/2` before and after the FFT, which is exact for even `n`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::blockmat::BlockMatrix;
use crate::error::{Error, Result};
use crate::signals::{Grid, Signal};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Time,
    Frequency,
}

impl Domain {
    fn flipped(self) -> Domain {
        match self {
            Domain::Time => Domain::Frequency,
            Domain::Frequency => Domain::Time,
        }
    }
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    }
}

/// Unscaled centered DFT of a row-major array along the listed axes.
pub fn centered_dft_axes(data: &mut [Complex64], shape: &[usize], axes: &[usize], inverse: bool) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total);
    for &axis in axes {
        let n = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let fft = plan(n, inverse);
        let half = n / 2;
        if stride == 1 {
            data.par_chunks_mut(n).for_each(|line| {
                line.rotate_left(half);
                fft.process(line);
                line.rotate_left(half);
            });
        } else {
            data.par_chunks_mut(n * stride).for_each(|block| {
                let mut buf = vec![ZERO; n];
                for i in 0..stride {
                    for (j, b) in buf.iter_mut().enumerate() {
                        *b = block[((j + half) % n) * stride + i];
                    }
                    fft.process(&mut buf);
                    for (j, b) in buf.iter().enumerate() {
                        block[((j + half) % n) * stride + i] = *b;
                    }
                }
            });
        }
    }
}

fn scale(data: &mut [Complex64], s: f64) {
    data.par_iter_mut().for_each(|v| *v *= s);
}

/// Centered, scaled transform of samples on `grid`; result lives on `grid.dual()`.
pub fn ft_samples(samples: &[Complex64], grid: &Grid, inverse: bool) -> Vec<Complex64> {
    let mut out = samples.to_vec();
    let shape = vec![grid.n(); grid.dim()];
    let axes: Vec<usize> = (0..grid.dim()).collect();
    centered_dft_axes(&mut out, &shape, &axes, inverse);
    scale(&mut out, grid.weight());
    out
}

/// Fourier transform of `f` sampled on `grid`, as a signal sampled on `grid.dual()`.
pub fn ft(f: &Signal, grid: &Grid) -> Result<Signal> {
    let s = f.sample(grid)?;
    Signal::sampled(grid.dual(), ft_samples(&s, grid, false))
}

/// Inverse Fourier transform of `f` sampled on `grid`, on `grid.dual()`.
pub fn ift(f: &Signal, grid: &Grid) -> Result<Signal> {
    let s = f.sample(grid)?;
    Signal::sampled(grid.dual(), ft_samples(&s, grid, true))
}

/// Complex array over a product of two `d`-dimensional grids, laid out
/// `[axis 1][axis 2]` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2 {
    pub values: Vec<Complex64>,
    pub grids: [Grid; 2],
    pub domains: [Domain; 2],
}

impl Field2 {
    pub fn new(values: Vec<Complex64>, grids: [Grid; 2], domains: [Domain; 2]) -> Result<Self> {
        if grids[0].dim() != grids[1].dim() {
            return Err(Error::GridMismatch("axis grids differ in dimension".into()));
        }
        if values.len() != grids[0].total() * grids[1].total() {
            return Err(Error::GridMismatch(format!(
                "{} values for {}×{} grid points",
                values.len(),
                grids[0].total(),
                grids[1].total()
            )));
        }
        Ok(Self {
            values,
            grids,
            domains,
        })
    }

    /// Tensor product `f(x)·g(y)` sampled on the two grids.
    pub fn tensor(f: &Signal, g: &Signal, grids: [Grid; 2]) -> Result<Self> {
        let a = f.sample(&grids[0])?;
        let b = g.sample(&grids[1])?;
        let values = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| x * y))
            .collect();
        Field2::new(values, grids, [Domain::Time, Domain::Time])
    }

    pub fn dim(&self) -> usize {
        self.grids[0].dim()
    }

    fn shape(&self) -> Vec<usize> {
        let d = self.dim();
        let mut s = vec![self.grids[0].n(); d];
        s.extend(std::iter::repeat(self.grids[1].n()).take(d));
        s
    }

    /// Transform along `axis` (0 or 1) regardless of its tag; the tag flips.
    pub fn transform_axis(mut self, axis: usize, inverse: bool) -> Field2 {
        let d = self.dim();
        let shape = self.shape();
        let axes: Vec<usize> = (axis * d..(axis + 1) * d).collect();
        centered_dft_axes(&mut self.values, &shape, &axes, inverse);
        scale(&mut self.values, self.grids[axis].weight());
        self.grids[axis] = self.grids[axis].dual();
        self.domains[axis] = self.domains[axis].flipped();
        self
    }

    fn partial(self, axis: usize, inverse: bool) -> Result<Field2> {
        let want = if inverse { Domain::Frequency } else { Domain::Time };
        if self.domains[axis] != want {
            return Err(Error::DomainTagMismatch(format!(
                "axis {} is tagged {:?}; a {} transform needs {:?}",
                axis + 1,
                self.domains[axis],
                if inverse { "inverse" } else { "forward" },
                want
            )));
        }
        Ok(self.transform_axis(axis, inverse))
    }

    /// Partial transform in the first variable.
    pub fn pft1(self, inverse: bool) -> Result<Field2> {
        self.partial(0, inverse)
    }

    /// Partial transform in the second variable.
    pub fn pft2(self, inverse: bool) -> Result<Field2> {
        self.partial(1, inverse)
    }

    /// Full transform in both variables.
    pub fn ft2(self) -> Result<Field2> {
        self.pft2(false)?.pft1(false)
    }

    pub fn inner(&self, other: &Field2) -> Complex64 {
        let w = self.grids[0].weight() * self.grids[1].weight();
        crate::signals::ordered_inner(&self.values, &other.values) * w
    }

    /// Value at a point of `ℝ^{2d}` by interpolation (zero outside the box).
    pub fn interp(&self, p: &[f64]) -> Complex64 {
        let d = self.dim();
        let mut axes = [(0usize, 0.0f64); 4];
        for a in 0..d {
            axes[a] = (self.grids[0].n(), self.grids[0].step());
            axes[d + a] = (self.grids[1].n(), self.grids[1].step());
        }
        interp_nd(&self.values, &axes[..2 * d], p).0
    }
}

/// Report of a coordinate change: how many target points left the grid box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CoordReport {
    pub extrapolated_points: usize,
}

/// `G(x, y) = F(A(x, y))` on the grids of `F`, interpolating sampled values.
pub fn coord(a: &BlockMatrix, f: &Field2) -> Result<Field2> {
    Ok(coord_with_report(a, f)?.0)
}

pub fn coord_with_report(a: &BlockMatrix, f: &Field2) -> Result<(Field2, CoordReport)> {
    let d = f.dim();
    if a.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "matrix has d = {}, field has d = {d}",
            a.dim()
        )));
    }
    if a.entries() == &nalgebra::DMatrix::identity(2 * d, 2 * d) {
        return Ok((f.clone(), CoordReport::default()));
    }
    let [g1, g2] = f.grids;
    let mut axes = [(0usize, 0.0f64); 4];
    for k in 0..d {
        axes[k] = (g1.n(), g1.step());
        axes[d + k] = (g2.n(), g2.step());
    }
    let axes = &axes[..2 * d];
    let m = a.entries();
    let n2 = g2.total();
    let ys = g2.all_coords();
    let rows: Vec<(Vec<Complex64>, usize)> = (0..g1.total())
        .into_par_iter()
        .map(|j| {
            let x = g1.coords(j);
            let mut row = vec![ZERO; n2];
            let mut outside = 0;
            let mut v = [0.0; 4];
            let mut p = [0.0; 4];
            for (k, out) in row.iter_mut().enumerate() {
                v[..d].copy_from_slice(&x);
                v[d..2 * d].copy_from_slice(&ys[k * d..(k + 1) * d]);
                for r in 0..2 * d {
                    p[r] = (0..2 * d).map(|c| m[(r, c)] * v[c]).sum();
                }
                let (val, inside) = interp_nd(&f.values, axes, &p[..2 * d]);
                if !inside {
                    outside += 1;
                }
                *out = val;
            }
            (row, outside)
        })
        .collect();
    let mut values = Vec::with_capacity(f.values.len());
    let mut extrapolated_points = 0;
    for (r, o) in rows {
        values.extend(r);
        extrapolated_points += o;
    }
    Ok((
        Field2 {
            values,
            grids: f.grids,
            domains: f.domains,
        },
        CoordReport {
            extrapolated_points,
        },
    ))
}

/// `G(x, y) = f(A11x + A12y) · conj g(A21x + A22y)`, evaluated exactly.
pub fn coord_pair(a: &BlockMatrix, f: &Signal, g: &Signal, grids: [Grid; 2]) -> Result<Field2> {
    let d = a.dim();
    if f.dim() != d || g.dim() != d || grids[0].dim() != d || grids[1].dim() != d {
        return Err(Error::DimensionMismatch(
            "matrix, signals and grids must share d".into(),
        ));
    }
    let m = a.entries();
    let ys = grids[1].all_coords();
    let n2 = grids[1].total();
    let values: Vec<Complex64> = (0..grids[0].total())
        .into_par_iter()
        .flat_map_iter(|j| {
            let x = grids[0].coords(j);
            let m = m.clone();
            let ys = &ys;
            (0..n2).map(move |k| {
                let y = &ys[k * d..(k + 1) * d];
                let mut p = [0.0; 2];
                let mut q = [0.0; 2];
                for r in 0..d {
                    p[r] = (0..d).map(|c| m[(r, c)] * x[c] + m[(r, d + c)] * y[c]).sum();
                    q[r] = (0..d)
                        .map(|c| m[(d + r, c)] * x[c] + m[(d + r, d + c)] * y[c])
                        .sum();
                }
                f.eval(&p[..d]) * g.eval(&q[..d]).conj()
            })
        })
        .collect();
    Field2::new(values, grids, [Domain::Time, Domain::Time])
}

/// Fourier multiplier: transform both variables, multiply by `m(ξ, η)`, transform back.
pub fn multiplier<M>(f: &Field2, m: M) -> Field2
where
    M: Fn(&[f64], &[f64]) -> Complex64 + Sync,
{
    let domains = f.domains;
    let mut h = f.clone().transform_axis(1, false).transform_axis(0, false);
    let [g1, g2] = h.grids;
    let d = g1.dim();
    let n2 = g2.total();
    let etas = g2.all_coords();
    h.values
        .par_chunks_mut(n2)
        .enumerate()
        .for_each(|(j, row)| {
            let xi = g1.coords(j);
            for (k, v) in row.iter_mut().enumerate() {
                *v *= m(&xi, &etas[k * d..(k + 1) * d]);
            }
        });
    let mut out = h.transform_axis(0, true).transform_axis(1, true);
    out.domains = domains;
    out
}

// ---------------------------------------------------------------------------
// interpolation

/// Nodes of the 8-point stencil relative to the left neighbour.
const STENCIL: [i64; 8] = [-3, -2, -1, 0, 1, 2, 3, 4];
const SNAP: f64 = 1e-9;

#[derive(Clone, Copy)]
struct Taps {
    idx: [i64; 8],
    w: [f64; 8],
    len: usize,
}

fn lagrange_weights(s: f64) -> [f64; 8] {
    let mut w = [1.0; 8];
    for (i, &xi) in STENCIL.iter().enumerate() {
        let mut num = 1.0;
        let mut den = 1.0;
        for (k, &xk) in STENCIL.iter().enumerate() {
            if k != i {
                num *= s - xk as f64;
                den *= (xi - xk) as f64;
            }
        }
        w[i] = num / den;
    }
    w
}

fn taps(n: usize, step: f64, t: f64) -> (Taps, bool) {
    let u = t / step + (n / 2) as f64;
    let inside = u >= 0.0 && u <= (n - 1) as f64;
    let base = u.floor();
    let frac = u - base;
    let i0 = base as i64;
    if frac < SNAP || frac > 1.0 - SNAP {
        let j = if frac < SNAP { i0 } else { i0 + 1 };
        let mut idx = [0; 8];
        let mut w = [0.0; 8];
        idx[0] = j;
        w[0] = 1.0;
        return (Taps { idx, w, len: 1 }, inside);
    }
    let mut idx = [0; 8];
    for (k, s) in STENCIL.iter().enumerate() {
        idx[k] = i0 + s;
    }
    (
        Taps {
            idx,
            w: lagrange_weights(frac),
            len: 8,
        },
        inside,
    )
}

/// Separable 8-point Lagrange interpolation on a centered row-major array
/// with per-axis `(n, step)`; zero outside the box. Returns the value and
/// whether the point lies inside the grid box.
pub fn interp_nd(values: &[Complex64], axes: &[(usize, f64)], p: &[f64]) -> (Complex64, bool) {
    let m = axes.len();
    debug_assert!(m <= 4 && p.len() == m);
    let mut tp = [Taps {
        idx: [0; 8],
        w: [0.0; 8],
        len: 0,
    }; 4];
    let mut inside = true;
    for a in 0..m {
        let (t, ins) = taps(axes[a].0, axes[a].1, p[a]);
        tp[a] = t;
        inside &= ins;
    }
    let mut strides = [1usize; 4];
    for a in (0..m.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * axes[a + 1].0;
    }
    // recursive tensor sum, unrolled through an explicit counter
    let mut acc = ZERO;
    let mut ctr = [0usize; 4];
    'outer: loop {
        let mut w = 1.0;
        let mut off = 0usize;
        let mut valid = true;
        for a in 0..m {
            let i = tp[a].idx[ctr[a]];
            if i < 0 || i >= axes[a].0 as i64 {
                valid = false;
                break;
            }
            w *= tp[a].w[ctr[a]];
            off += i as usize * strides[a];
        }
        if valid {
            acc += values[off] * w;
        }
        let mut a = m;
        loop {
            if a == 0 {
                break 'outer;
            }
            a -= 1;
            ctr[a] += 1;
            if ctr[a] < tp[a].len {
                break;
            }
            ctr[a] = 0;
        }
    }
    (acc, inside)
}

/// Interpolated value of a sampled signal at an arbitrary point.
pub fn interp_signal(grid: &Grid, samples: &[Complex64], t: &[f64]) -> Complex64 {
    let ax = (grid.n(), grid.step());
    let axes = [ax; 2];
    interp_nd(samples, &axes[..grid.dim()], t).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmat::Preset;
    use crate::signals::{chirp, gaussian, hermite, inner_samples, norm_samples, tf_shift};
    use std::f64::consts::PI;

    fn g256() -> Grid {
        Grid::new(1, 256, 16.0).unwrap()
    }

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let g = g256();
        for lambda in [0.5, 1.0, 2.0] {
            let f = gaussian(lambda, 1).unwrap();
            let got = ft(&f, &g).unwrap().sample(&g.dual()).unwrap();
            let want = f.fourier().unwrap().sample(&g.dual()).unwrap();
            assert!(max_err(&got, &want) < 1e-10, "λ={lambda}");
        }
        // direct closed form λ^{1/2} e^{−πλω²}
        let f = gaussian(2.0, 1).unwrap();
        let got = ft(&f, &g).unwrap().sample(&g.dual()).unwrap();
        for (k, v) in got.iter().enumerate() {
            let w = g.dual().point(k);
            assert!((v.re - 2f64.sqrt() * (-PI * 2.0 * w * w).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn two_dimensional_gaussian_transform() {
        let g = Grid::new(2, 64, 8.0).unwrap();
        let f = chirp(0.3, 1.0, 2).unwrap();
        let got = ft(&f, &g).unwrap().sample(&g.dual()).unwrap();
        let want = f.fourier().unwrap().sample(&g.dual()).unwrap();
        assert!(max_err(&got, &want) < 1e-10);
    }

    #[test]
    fn shift_theorem_and_period_four() {
        let g = g256();
        let f = hermite(3);
        let x0 = 0.75;
        let a = ft(&tf_shift(&f, &[x0], &[0.0]).unwrap(), &g).unwrap().sample(&g.dual()).unwrap();
        let b = ft(&f, &g).unwrap().sample(&g.dual()).unwrap();
        for (k, (u, v)) in a.iter().zip(&b).enumerate() {
            let w = g.dual().point(k);
            assert!((u - v * Complex64::from_polar(1.0, -2.0 * PI * x0 * w)).norm() < 1e-10);
        }
        let s = f.sample(&g).unwrap();
        let mut t = s.clone();
        let mut grid = g;
        for _ in 0..4 {
            t = ft_samples(&t, &grid, false);
            grid = grid.dual();
        }
        assert!(max_err(&t, &s) < 1e-9);
    }

    #[test]
    fn plancherel() {
        let g = g256();
        for f in [hermite(4), chirp(1.0, 1.0, 1).unwrap(), gaussian(0.7, 1).unwrap()] {
            let s = f.sample(&g).unwrap();
            let t = ft_samples(&s, &g, false);
            assert!((norm_samples(&s, &g) - norm_samples(&t, &g.dual())).abs() < 1e-10);
        }
    }

    fn test_field() -> Field2 {
        let g = Grid::new(1, 64, 12.0).unwrap();
        Field2::tensor(&hermite(1), &chirp(0.5, 1.0, 1).unwrap(), [g, g]).unwrap()
    }

    #[test]
    fn partial_transforms() {
        let f = test_field();
        let back = f.clone().pft2(false).unwrap().pft2(true).unwrap();
        assert!(max_err(&back.values, &f.values) < 1e-12);
        assert_eq!(back.domains, f.domains);

        let full = f.clone().pft2(false).unwrap().pft1(false).unwrap();
        let g = f.grids[0];
        let a = hermite(1).sample(&g).unwrap();
        let b = chirp(0.5, 1.0, 1).unwrap().sample(&g).unwrap();
        let fa = ft_samples(&a, &g, false);
        let fb = ft_samples(&b, &g, false);
        let want: Vec<Complex64> = fa.iter().flat_map(|x| fb.iter().map(move |y| x * y)).collect();
        assert!(max_err(&full.values, &want) < 1e-12);

        let half = f.clone().pft2(false).unwrap();
        let want: Vec<Complex64> = a.iter().flat_map(|x| fb.iter().map(move |y| x * y)).collect();
        assert!(max_err(&half.values, &want) < 1e-12);

        assert!(matches!(
            f.clone().pft2(true),
            Err(Error::DomainTagMismatch(_))
        ));
    }

    #[test]
    fn partial_transform_is_unitary() {
        let f = test_field();
        let g = Field2::tensor(&gaussian(1.3, 1).unwrap(), &hermite(2), f.grids).unwrap();
        let a = f.inner(&g);
        let b = f.clone().pft2(false).unwrap().inner(&g.clone().pft2(false).unwrap());
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn coord_identity_and_composition() {
        let g = g256();
        let f = gaussian(1.0, 1).unwrap();
        let h = chirp(0.4, 1.5, 1).unwrap();
        let id = BlockMatrix::from_entries(nalgebra::DMatrix::identity(2, 2)).unwrap();
        let base = coord_pair(&id, &f, &h, [g, g]).unwrap();
        assert_eq!(coord(&id, &base).unwrap(), base);

        let a = BlockMatrix::preset(&Preset::Wigner, 1).unwrap();
        let b = BlockMatrix::preset(&Preset::Tau(0.3), 1).unwrap();
        // analytic path: 𝔗_A 𝔗_B = 𝔗_{BA}
        let lhs = coord(&a, &coord_pair(&b, &f, &h, [g, g]).unwrap()).unwrap();
        let rhs = coord_pair(&b.mul(&a), &f, &h, [g, g]).unwrap();
        assert!(max_err(&lhs.values, &rhs.values) < 1e-6);
        // sampled path against analytic path
        let sampled = coord(&a, &base).unwrap();
        let exact = coord_pair(&a, &f, &h, [g, g]).unwrap();
        assert!(max_err(&sampled.values, &exact.values) < 1e-6);
    }

    #[test]
    fn coord_scales_norm() {
        let g = g256();
        let f = gaussian(1.0, 1).unwrap();
        let base = Field2::tensor(&f, &f, [g, g]).unwrap();
        let a = BlockMatrix::from_row_slice(1, &[1.0, 0.5, 0.25, 1.5]).unwrap();
        let t = coord(&a, &base).unwrap();
        let n0 = base.inner(&base).re.sqrt();
        let n1 = t.inner(&t).re.sqrt();
        assert!((n1 - n0 / a.abs_det().sqrt()).abs() < 1e-6);
    }

    #[test]
    fn multiplier_examples() {
        let f = test_field();
        let same = multiplier(&f, |_, _| Complex64::new(1.0, 0.0));
        assert!(max_err(&same.values, &f.values) < 1e-12);
        let a = 0.37;
        let chirp_m = |s: f64| move |xi: &[f64], eta: &[f64]| Complex64::from_polar(1.0, -2.0 * PI * xi[0] * s * eta[0]);
        let there = multiplier(&f, chirp_m(a));
        let back = multiplier(&there, chirp_m(-a));
        assert!(max_err(&back.values, &f.values) < 1e-12);
    }

    #[test]
    fn interpolation_accuracy() {
        let g = g256();
        let f = gaussian(1.0, 1).unwrap();
        let s = f.sample(&g).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..1000 {
            let t = -6.0 + 12.0 * (k as f64 + 0.37) / 1000.0;
            worst = worst.max((interp_signal(&g, &s, &[t]) - f.eval(&[t])).norm());
        }
        assert!(worst < 1e-7, "worst {worst}");
        // on-grid points are reproduced exactly
        for j in [0, 17, 128, 255] {
            assert_eq!(interp_signal(&g, &s, &[g.point(j)]), s[j]);
        }
        assert_eq!(interp_signal(&g, &s, &[20.0]), ZERO);
        let _ = inner_samples(&s, &s, &g);
    }
}
