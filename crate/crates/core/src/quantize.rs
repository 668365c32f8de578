//! Pseudodifferential operators `σ^A`, defined by `⟨σ^A f, g⟩ = ⟨σ, B_A(g, f)⟩`,
//! realized as dense kernels on grid samples.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::blockmat::{BlockMatrix, CohenMaps, Derived, Preset};
use crate::error::{Error, Result};
use crate::fourier::{self, coord, Field2};
use crate::mwd::{self, phase_space_stft, PhaseSpaceField};
use crate::signals::{inner_samples, norm_samples, tf_shift, Grid, Signal};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A symbol on phase space, laid out `[x][ω]` with `ω` on `xgrid.dual()`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolField {
    pub values: Vec<Complex64>,
    pub xgrid: Grid,
    pub wgrid: Grid,
    /// Calculus the symbol is meant for, when known.
    pub calculus: Option<BlockMatrix>,
}

impl SymbolField {
    pub fn from_fn<F>(grid: &Grid, s: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
    {
        Self::from_field(PhaseSpaceField::from_fn(grid, s))
    }

    pub fn from_field(f: PhaseSpaceField) -> Self {
        Self {
            values: f.values,
            xgrid: f.xgrid,
            wgrid: f.wgrid,
            calculus: f.matrix,
        }
    }

    pub fn to_field(&self) -> PhaseSpaceField {
        PhaseSpaceField {
            values: self.values.clone(),
            xgrid: self.xgrid,
            wgrid: self.wgrid,
            matrix: self.calculus.clone(),
        }
    }

    pub fn new(values: Vec<Complex64>, xgrid: Grid, wgrid: Grid) -> Result<Self> {
        Ok(Self::from_field(PhaseSpaceField::new(values, xgrid, wgrid)?))
    }

    /// `e^{−π(|x|² + |ω|²)/λ}`.
    pub fn gaussian(grid: &Grid, lambda: f64) -> Result<Self> {
        Self::chirped(grid, lambda, 0.0)
    }

    /// `e^{−π(|x|² + |ω|²)/λ} e^{2πi c x·ω}`.
    pub fn chirped(grid: &Grid, lambda: f64, rate: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::NonPositiveParameter {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(Self::from_fn(grid, |x, w| {
            let r2: f64 = x.iter().chain(w).map(|v| v * v).sum();
            let xw: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
            Complex64::from_polar((-PI * r2 / lambda).exp(), 2.0 * PI * rate * xw)
        }))
    }

    pub fn constant(grid: &Grid, c: Complex64) -> Self {
        Self::from_fn(grid, |_, _| c)
    }

    pub fn dim(&self) -> usize {
        self.xgrid.dim()
    }

    pub fn conj(&self) -> Self {
        let mut s = self.clone();
        s.values.iter_mut().for_each(|v| *v = v.conj());
        s
    }

    pub fn norm(&self, p: f64) -> Result<f64> {
        self.to_field().mixed_norm(p, p)
    }

    fn check_dual(&self) -> Result<()> {
        self.wgrid
            .check_same(&self.xgrid.dual(), "symbol ω-grid must be the dual of its x-grid")
    }

    /// `σ∘J⁻¹(x, ω) = σ(−ω, x)`, by index permutation on a self-dual grid.
    pub fn compose_j_inverse(&self) -> Result<Self> {
        if !self.xgrid.same_as(&self.wgrid) {
            return Err(Error::GridMismatch(
                "σ∘J⁻¹ needs a self-dual grid (L² = n)".into(),
            ));
        }
        let g = self.xgrid;
        let (n, d, nt) = (g.n(), g.dim(), g.total());
        let neg = |flat: usize| -> usize {
            let idx = g.unflatten(flat);
            let mut s = 0;
            for &i in idx.iter().take(d) {
                s = s * n + (n - i) % n;
            }
            s
        };
        let mut values = vec![ZERO; nt * nt];
        for j in 0..nt {
            for k in 0..nt {
                values[j * nt + k] = self.values[neg(k) * nt + j];
            }
        }
        Ok(Self {
            values,
            xgrid: self.xgrid,
            wgrid: self.wgrid,
            calculus: None,
        })
    }
}

/// Dense kernel `K` acting by `(Kf)(x_j) = Σ_k K[j, k] f(y_k) Δ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    /// Row-major `n^d × n^d`.
    pub values: Vec<Complex64>,
    pub grid: Grid,
}

impl OperatorMatrix {
    pub fn new(values: Vec<Complex64>, grid: Grid) -> Result<Self> {
        let n = grid.total();
        if values.len() != n * n {
            return Err(Error::GridMismatch(format!(
                "{} kernel entries for {n} grid points",
                values.len()
            )));
        }
        Ok(Self { values, grid })
    }

    /// Kernel `δ_{jk}/Δ^d`.
    pub fn identity(grid: &Grid) -> Self {
        let n = grid.total();
        let mut values = vec![ZERO; n * n];
        let v = Complex64::new(1.0 / grid.weight(), 0.0);
        for j in 0..n {
            values[j * n + j] = v;
        }
        Self { values, grid: *grid }
    }

    pub fn size(&self) -> usize {
        self.grid.total()
    }

    pub fn apply_samples(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        let w = self.grid.weight();
        self.values
            .par_chunks(n)
            .map(|row| row.iter().zip(f).map(|(k, v)| k * v).sum::<Complex64>() * w)
            .collect()
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        let s = f.sample(&self.grid)?;
        Signal::sampled(self.grid, self.apply_samples(&s))
    }

    /// Kernel of the Hilbert-space adjoint, `conj K[k, j]`.
    pub fn adjoint(&self) -> Self {
        let n = self.size();
        let mut values = vec![ZERO; n * n];
        for j in 0..n {
            for k in 0..n {
                values[k * n + j] = self.values[j * n + k].conj();
            }
        }
        Self {
            values,
            grid: self.grid,
        }
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |K − K^H|`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    fn scaled_matrix(&self) -> DMatrix<Complex64> {
        let n = self.size();
        DMatrix::from_row_slice(n, n, &self.values) * Complex64::new(self.grid.weight(), 0.0)
    }

    /// Largest singular value of the discretized operator on `L²`.
    pub fn op_norm(&self) -> f64 {
        self.scaled_matrix().singular_values().max()
    }
}

/// Hilbert–Schmidt norm `Δ^d ‖K‖_F`.
pub fn hs_norm(op: &OperatorMatrix) -> f64 {
    op.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() * op.grid.weight()
}

/// Kernel `k = |det A|⁻¹ 𝔗_{A⁻¹} F₂⁻¹ σ`.
pub fn kernel_from_symbol(sigma: &SymbolField, a: &BlockMatrix) -> Result<OperatorMatrix> {
    sigma.check_dual()?;
    if a.dim() != sigma.dim() {
        return Err(Error::GridMismatch(format!(
            "matrix has d = {}, symbol has d = {}",
            a.dim(),
            sigma.dim()
        )));
    }
    let k = sigma.to_field().to_field2().pft2(true)?;
    let mut t = coord(&a.inverse_block_matrix(), &k)?;
    let s = 1.0 / a.abs_det();
    t.values.par_iter_mut().for_each(|v| *v *= s);
    OperatorMatrix::new(t.values, sigma.xgrid)
}

/// Both sides of `⟨σ^A f, g⟩ = ⟨σ, B_A(g, f)⟩`.
pub fn duality_check(
    sigma: &SymbolField,
    a: &BlockMatrix,
    f: &Signal,
    g: &Signal,
) -> Result<(Complex64, Complex64)> {
    let grid = sigma.xgrid;
    let op = kernel_from_symbol(sigma, a)?;
    let af = op.apply_samples(&f.sample(&grid)?);
    let lhs = inner_samples(&af, &g.sample(&grid)?, &grid);
    let b = mwd::mwd(a, g, f, &grid)?;
    let rhs = sigma.to_field().inner(&b)?;
    Ok((lhs, rhs))
}

/// Symbol `σ` with `σ^A = ρ^B`: `σ = (|det A|/|det B|) F₂ 𝔗_{B⁻¹A} F₂⁻¹ ρ`.
pub fn convert_symbol(rho: &SymbolField, b: &BlockMatrix, a: &BlockMatrix) -> Result<SymbolField> {
    rho.check_dual()?;
    let k = rho.to_field().to_field2().pft2(true)?;
    let m = b.inverse_block_matrix().mul(a);
    let mut t = coord(&m, &k)?;
    let s = a.abs_det() / b.abs_det();
    t.values.par_iter_mut().for_each(|v| *v *= s);
    let back = t.pft2(false)?;
    let mut out = SymbolField::from_field(PhaseSpaceField::from_field2(back));
    out.calculus = Some(a.clone());
    Ok(out)
}

/// Cohen-form conversion `σ̂₂(ξ, η) = e^{−2πi ξ·(T2−T1)η} σ̂₁(ξ, η)`.
pub fn convert_symbol_cohen(sigma: &SymbolField, t1: &DMatrix<f64>, t2: &DMatrix<f64>) -> Result<SymbolField> {
    let d = sigma.dim();
    let dt = t2 - t1;
    let f: Field2 = sigma.to_field().to_field2();
    let g = if dt.amax() == 0.0 {
        f
    } else {
        fourier::multiplier(&f, |xi, eta| {
            let mut s = 0.0;
            for r in 0..d {
                for c in 0..d {
                    s += xi[r] * dt[(r, c)] * eta[c];
                }
            }
            Complex64::from_polar(1.0, -2.0 * PI * s)
        })
    };
    let mut out = SymbolField::from_field(PhaseSpaceField::from_field2(g));
    out.calculus = Some(BlockMatrix::preset(&Preset::Affine(t2.clone()), d)?);
    Ok(out)
}

/// `(σ^A)* = ρ^B` with `ρ = conj σ` and `B = Ĩ A I₂`.
pub fn adjoint_symbol(sigma: &SymbolField, a: &BlockMatrix) -> (SymbolField, BlockMatrix) {
    let b = a.derived(Derived::C1);
    let mut rho = sigma.conj();
    rho.calculus = Some(b.clone());
    (rho, b)
}

fn cohen_t(a: &BlockMatrix) -> Result<DMatrix<f64>> {
    a.classify().cohen_t.ok_or(Error::NotCohenType)
}

/// Spreading form `σ^A f(x) = Σ_{ξ,u} σ̂(ξ, u) e^{2πi(x + Tu)·ξ} f(x + u) Δξ^d Δu^d`
/// for a Cohen-type `A` with parameter `T`.
pub fn spreading_apply(sigma: &SymbolField, a: &BlockMatrix, f: &Signal) -> Result<Signal> {
    let t = cohen_t(a)?;
    sigma.check_dual()?;
    let grid = sigma.xgrid;
    let d = grid.dim();
    // σ̂ on (ξ ∈ xgrid.dual()) × (u ∈ wgrid.dual() = xgrid)
    let spread = sigma.to_field().ft2();
    let xi_grid = spread.xgrid;
    let u_grid = spread.wgrid;
    let (nxi, nu) = (xi_grid.total(), u_grid.total());
    let xis = xi_grid.all_coords();
    let us = u_grid.all_coords();
    let w = xi_grid.weight() * u_grid.weight();
    let out: Vec<Complex64> = (0..grid.total())
        .into_par_iter()
        .map(|j| {
            let x = grid.coords(j);
            let mut acc = ZERO;
            let mut p = [0.0; 2];
            let mut q = [0.0; 2];
            for ku in 0..nu {
                let u = &us[ku * d..(ku + 1) * d];
                for r in 0..d {
                    p[r] = x[r] + u[r];
                    q[r] = x[r] + (0..d).map(|c| t[(r, c)] * u[c]).sum::<f64>();
                }
                let fv = f.eval(&p[..d]);
                if fv == ZERO {
                    continue;
                }
                let mut s = ZERO;
                for kx in 0..nxi {
                    let xi = &xis[kx * d..(kx + 1) * d];
                    let ph: f64 = (0..d).map(|r| q[r] * xi[r]).sum();
                    s += spread.values[kx * nu + ku] * Complex64::from_polar(1.0, 2.0 * PI * ph);
                }
                acc += s * fv;
            }
            acc * w
        })
        .collect();
    Signal::sampled(grid, out)
}

/// Both sides of `F op_{A_T}(σ) F⁻¹ f = op_{A_{I−T}}(σ∘J⁻¹) f` on a self-dual grid.
pub fn fourier_conjugation_check(sigma: &SymbolField, a: &BlockMatrix, f: &Signal) -> Result<(Signal, Signal)> {
    let t = cohen_t(a)?;
    let d = a.dim();
    let grid = sigma.xgrid;
    let sj = sigma.compose_j_inverse()?;
    let op = kernel_from_symbol(sigma, a)?;
    let fi = fourier::ft_samples(&f.sample(&grid)?, &grid, true);
    let lhs = fourier::ft_samples(&op.apply_samples(&fi), &grid, false);
    let i = DMatrix::<f64>::identity(d, d);
    let b = BlockMatrix::preset(&Preset::Affine(&i - &t), d)?;
    let rhs = kernel_from_symbol(&sj, &b)?.apply_samples(&f.sample(&grid)?);
    Ok((Signal::sampled(grid, lhs)?, Signal::sampled(grid, rhs)?))
}

/// Inner products `⟨σ^A π(z)φ, π(w)φ⟩`, indexed `[z][w]` over a finite set of phase-space points.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub points: Vec<Vec<f64>>,
    pub entries: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn entry(&self, iz: usize, iw: usize) -> Complex64 {
        self.entries[iz * self.points.len() + iw]
    }
}

pub fn channel_matrix(
    sigma: &SymbolField,
    a: &BlockMatrix,
    phi: &Signal,
    lattice: &[Vec<f64>],
) -> Result<ChannelMatrix> {
    let grid = sigma.xgrid;
    let d = grid.dim();
    for z in lattice {
        if z.len() != 2 * d {
            return Err(Error::DimensionMismatch("lattice points have length 2d".into()));
        }
        if grid.offset_of(&z[..d]).is_none() || grid.dual().offset_of(&z[d..]).is_none() {
            return Err(Error::OffGridShift(format!("lattice point {z:?}")));
        }
    }
    let op = kernel_from_symbol(sigma, a)?;
    let shifted: Vec<Vec<Complex64>> = lattice
        .iter()
        .map(|z| tf_shift(phi, &z[..d], &z[d..])?.sample(&grid))
        .collect::<Result<_>>()?;
    let images: Vec<Vec<Complex64>> = shifted.iter().map(|s| op.apply_samples(s)).collect();
    let m = lattice.len();
    let mut entries = Vec::with_capacity(m * m);
    for img in &images {
        for s in &shifted {
            entries.push(inner_samples(img, s, &grid));
        }
    }
    Ok(ChannelMatrix {
        points: lattice.to_vec(),
        entries,
    })
}

/// `|V_Φ σ(𝒯_T(w, z), J(w − z))|` with `Φ = B_{A_T}(φ, φ)` supplied as `window`.
pub fn channel_stft_magnitude(
    sigma: &SymbolField,
    window: &PhaseSpaceField,
    t: &DMatrix<f64>,
    z: &[f64],
    w: &[f64],
    via_u: bool,
) -> Result<f64> {
    let maps = CohenMaps::new(t)?;
    let x = if via_u {
        maps.tcal_via_u(w, z)?
    } else {
        maps.tcal(w, z)
    };
    let diff: Vec<f64> = w.iter().zip(z).map(|(a, b)| a - b).collect();
    let y = crate::blockmat::apply_j(&diff);
    Ok(phase_space_stft(&sigma.to_field(), window, &x, &y)?.norm())
}

/// Relative `L²` distance between two signals on `grid`.
pub fn relative_l2(a: &Signal, b: &Signal, grid: &Grid) -> Result<f64> {
    let x = a.sample(grid)?;
    let y = b.sample(grid)?;
    let diff: Vec<Complex64> = x.iter().zip(&y).map(|(u, v)| u - v).collect();
    Ok(norm_samples(&diff, grid) / norm_samples(&y, grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{gaussian, hermite};

    fn small() -> Grid {
        Grid::new(1, 64, 12.0).unwrap()
    }
    fn preset(p: Preset) -> BlockMatrix {
        BlockMatrix::preset(&p, 1).unwrap()
    }

    #[test]
    fn identity_operator() {
        let g = small();
        let f = hermite(2);
        let op = OperatorMatrix::identity(&g);
        let out = op.apply(&f).unwrap().sample(&g).unwrap();
        let want = f.sample(&g).unwrap();
        for (a, b) in out.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((hs_norm(&op) - (g.total() as f64).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn constant_symbol_gives_identity() {
        let g = small();
        let s = SymbolField::constant(&g, Complex64::new(1.0, 0.0));
        for p in [Preset::Wigner, Preset::Tau(0.3), Preset::Rihaczek] {
            let op = kernel_from_symbol(&s, &preset(p)).unwrap();
            let f = gaussian(1.0, 1).unwrap();
            assert!(relative_l2(&op.apply(&f).unwrap(), &f, &g).unwrap() < 1e-4);
        }
    }

    #[test]
    fn linearity_and_norm_bound() {
        let g = small();
        let s = SymbolField::chirped(&g, 1.0, 0.4).unwrap();
        let op = kernel_from_symbol(&s, &preset(Preset::Tau(0.25))).unwrap();
        let f = hermite(1).sample(&g).unwrap();
        let h = gaussian(2.0, 1).unwrap().sample(&g).unwrap();
        let sum: Vec<Complex64> = f.iter().zip(&h).map(|(a, b)| a + b).collect();
        let lhs = op.apply_samples(&sum);
        let r1 = op.apply_samples(&f);
        let r2 = op.apply_samples(&h);
        for k in 0..lhs.len() {
            assert!((lhs[k] - r1[k] - r2[k]).norm() < 1e-12);
        }
        let nrm = op.op_norm();
        assert!(norm_samples(&r1, &g) <= nrm * norm_samples(&f, &g) * (1.0 + 1e-12));
    }

    #[test]
    fn zero_symbol() {
        let g = small();
        let s = SymbolField::constant(&g, ZERO);
        let a = preset(Preset::Wigner);
        let (l, r) = duality_check(&s, &a, &hermite(1), &gaussian(1.0, 1).unwrap()).unwrap();
        assert_eq!(l, ZERO);
        assert_eq!(r, ZERO);
        let op = kernel_from_symbol(&s, &a).unwrap();
        assert_eq!(hs_norm(&op), 0.0);
        let out = spreading_apply(&s, &a, &hermite(1)).unwrap().sample(&g).unwrap();
        assert!(out.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn convert_same_calculus_is_identity() {
        let g = small();
        let s = SymbolField::chirped(&g, 1.0, 0.3).unwrap();
        let a = preset(Preset::Tau(0.25));
        let c = convert_symbol(&s, &a, &a).unwrap();
        let err = c.values.iter().zip(&s.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        let t = DMatrix::from_element(1, 1, 0.3);
        let c = convert_symbol_cohen(&s, &t, &t).unwrap();
        assert_eq!(c.values, s.values);
    }

    #[test]
    fn j_composition_is_exact_permutation() {
        let g = Grid::new(1, 16, 4.0).unwrap();
        let s = SymbolField::from_fn(&g, |x, w| Complex64::new(x[0], w[0]));
        let sj = s.compose_j_inverse().unwrap();
        let n = g.n();
        for j in 1..n {
            for k in 1..n {
                let v = sj.values[j * n + k];
                assert_eq!(v, Complex64::new(-g.point(k), g.point(j)));
            }
        }
        assert!(SymbolField::gaussian(&small(), 1.0).unwrap().compose_j_inverse().is_err());
    }

    #[test]
    fn adjoint_symbol_blocks() {
        let g = small();
        let s = SymbolField::gaussian(&g, 1.0).unwrap();
        let (rho, b) = adjoint_symbol(&s, &preset(Preset::Wigner));
        assert!(b.approx_eq(&preset(Preset::Wigner), 1e-15));
        assert_eq!(rho.values, s.values);
    }

    #[test]
    fn channel_rejects_off_grid_points() {
        let g = small();
        let s = SymbolField::gaussian(&g, 1.0).unwrap();
        let r = channel_matrix(&s, &preset(Preset::Wigner), &gaussian(1.0, 1).unwrap(), &[vec![0.01, 0.0]]);
        assert!(matches!(r, Err(Error::OffGridShift(_))));
    }

    #[test]
    fn spreading_requires_cohen_type() {
        let g = small();
        let s = SymbolField::gaussian(&g, 1.0).unwrap();
        assert!(matches!(
            spreading_apply(&s, &preset(Preset::Stft), &hermite(0)),
            Err(Error::NotCohenType)
        ));
    }
}
