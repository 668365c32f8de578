//! Matrix-Wigner distributions `B_A(f, g)(x, ω) = ∫ e^{−2πi y·ω} f(A11x + A12y) conj g(A21x + A22y) dy`
//! and the short-time Fourier transform, with the identities that tie them together.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::blockmat::BlockMatrix;
use crate::error::{Error, Result};
use crate::fourier::{Domain, Field2};
use crate::signals::{self, inner, tf_shift, Grid, Signal};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default refinement of the `y`-quadrature grid relative to the `x`-grid.
pub const DEFAULT_OVERSAMPLE: usize = 2;

/// Complex values over an `x`-grid × `ω`-grid, laid out `[x][ω]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceField {
    pub values: Vec<Complex64>,
    pub xgrid: Grid,
    pub wgrid: Grid,
    /// Matrix that produced the field, when it is a distribution.
    pub matrix: Option<BlockMatrix>,
}

impl PhaseSpaceField {
    pub fn new(values: Vec<Complex64>, xgrid: Grid, wgrid: Grid) -> Result<Self> {
        if xgrid.dim() != wgrid.dim() || values.len() != xgrid.total() * wgrid.total() {
            return Err(Error::GridMismatch(format!(
                "{} values for grids {:?} × {:?}",
                values.len(),
                xgrid,
                wgrid
            )));
        }
        Ok(Self {
            values,
            xgrid,
            wgrid,
            matrix: None,
        })
    }

    /// Samples of `s(x, ω)` on `grid × grid.dual()`.
    pub fn from_fn<F>(grid: &Grid, s: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
    {
        let wgrid = grid.dual();
        let d = grid.dim();
        let ws = wgrid.all_coords();
        let values = (0..grid.total())
            .into_par_iter()
            .flat_map_iter(|j| {
                let x = grid.coords(j);
                let ws = &ws;
                let s = &s;
                (0..wgrid.total()).map(move |k| s(&x, &ws[k * d..(k + 1) * d]))
            })
            .collect();
        Self {
            values,
            xgrid: *grid,
            wgrid,
            matrix: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.xgrid.dim()
    }

    pub fn get(&self, xi: usize, wi: usize) -> Complex64 {
        self.values[xi * self.wgrid.total() + wi]
    }

    /// Phase-space quadrature weight `Δ^d (1/L)^d`.
    pub fn weight(&self) -> f64 {
        self.xgrid.weight() * self.wgrid.weight()
    }

    fn check_grids(&self, other: &PhaseSpaceField) -> Result<()> {
        self.xgrid.check_same(&other.xgrid, "x-grid")?;
        self.wgrid.check_same(&other.wgrid, "ω-grid")
    }

    /// `Σ F conj G Δ^d (1/L)^d`.
    pub fn inner(&self, other: &PhaseSpaceField) -> Result<Complex64> {
        self.check_grids(other)?;
        Ok(crate::signals::ordered_inner(&self.values, &other.values) * self.weight())
    }

    pub fn norm(&self) -> f64 {
        (crate::signals::ordered_inner(&self.values, &self.values).re * self.weight()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &PhaseSpaceField) -> Result<f64> {
        self.check_grids(other)?;
        Ok(self
            .values
            .par_iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .reduce(|| 0.0, f64::max))
    }

    pub fn mixed_norm(&self, p: f64, q: f64) -> Result<f64> {
        signals::mixed_norm(&self.values, &self.xgrid, &self.wgrid, p, q)
    }

    pub fn conj(&self) -> PhaseSpaceField {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn to_field2(&self) -> Field2 {
        Field2 {
            values: self.values.clone(),
            grids: [self.xgrid, self.wgrid],
            domains: [Domain::Time, Domain::Frequency],
        }
    }

    pub fn from_field2(f: Field2) -> Self {
        Self {
            values: f.values,
            xgrid: f.grids[0],
            wgrid: f.grids[1],
            matrix: None,
        }
    }

    /// `G(u, v) = F(v, u)`: swaps the two variables (and their grids).
    pub fn transpose(&self) -> PhaseSpaceField {
        let (nx, nw) = (self.xgrid.total(), self.wgrid.total());
        let mut values = vec![ZERO; nx * nw];
        for j in 0..nx {
            for k in 0..nw {
                values[k * nx + j] = self.values[j * nw + k];
            }
        }
        PhaseSpaceField {
            values,
            xgrid: self.wgrid,
            wgrid: self.xgrid,
            matrix: None,
        }
    }

    /// Full transform in both variables: result lives on `wgrid.dual() × xgrid.dual()`.
    pub fn ft2(&self) -> PhaseSpaceField {
        let f = self
            .to_field2()
            .transform_axis(1, false)
            .transform_axis(0, false);
        PhaseSpaceField::from_field2(f)
    }

    /// `c · e^{2πi(x·Y₁ + ω·Y₂)} F(x − X₁, ω − X₂)` for an on-grid translation `X`;
    /// values shifted in from outside the box are zero.
    pub fn translate_modulate(&self, tr: &[f64], md: &[f64], c: Complex64) -> Result<PhaseSpaceField> {
        let d = self.dim();
        if tr.len() != 2 * d || md.len() != 2 * d {
            return Err(Error::DimensionMismatch("phase-space vectors have length 2d".into()));
        }
        let ox = self.xgrid.offset_of(&tr[..d]).ok_or_else(|| {
            Error::OffGridShift(format!("x-translation {:?} (step {})", &tr[..d], self.xgrid.step()))
        })?;
        let ow = self.wgrid.offset_of(&tr[d..]).ok_or_else(|| {
            Error::OffGridShift(format!("ω-translation {:?} (step {})", &tr[d..], self.wgrid.step()))
        })?;
        let (nx, nw) = (self.xgrid.total(), self.wgrid.total());
        let src_index = |grid: &Grid, flat: usize, off: &[i64]| -> Option<usize> {
            let idx = grid.unflatten(flat);
            let mut s = 0usize;
            for a in 0..d {
                let j = idx[a] as i64 - off[a];
                if j < 0 || j >= grid.n() as i64 {
                    return None;
                }
                s = s * grid.n() + j as usize;
            }
            Some(s)
        };
        let wsrc: Vec<Option<usize>> = (0..nw).map(|k| src_index(&self.wgrid, k, &ow)).collect();
        let wphase: Vec<Complex64> = (0..nw)
            .map(|k| {
                let w = self.wgrid.coords(k);
                let t: f64 = (0..d).map(|a| w[a] * md[d + a]).sum();
                Complex64::from_polar(1.0, 2.0 * PI * t)
            })
            .collect();
        let mut values = vec![ZERO; nx * nw];
        values.par_chunks_mut(nw).enumerate().for_each(|(j, row)| {
            let Some(js) = src_index(&self.xgrid, j, &ox) else {
                return;
            };
            let x = self.xgrid.coords(j);
            let t: f64 = (0..d).map(|a| x[a] * md[a]).sum();
            let xp = c * Complex64::from_polar(1.0, 2.0 * PI * t);
            for (k, v) in row.iter_mut().enumerate() {
                if let Some(ks) = wsrc[k] {
                    *v = xp * wphase[k] * self.values[js * nw + ks];
                }
            }
        });
        Ok(PhaseSpaceField {
            values,
            xgrid: self.xgrid,
            wgrid: self.wgrid,
            matrix: self.matrix.clone(),
        })
    }

    /// Map `ω ↦ −ω` on a centered grid (index `k ↦ (n − k) mod n` per axis).
    pub fn reflect_frequency(&self) -> PhaseSpaceField {
        let mut out = self.clone();
        let nw = self.wgrid.total();
        let n = self.wgrid.n();
        let d = self.dim();
        let refl: Vec<usize> = (0..nw)
            .map(|k| {
                let idx = self.wgrid.unflatten(k);
                let mut s = 0;
                for &i in idx.iter().take(d) {
                    s = s * n + (n - i) % n;
                }
                s
            })
            .collect();
        for j in 0..self.xgrid.total() {
            for k in 0..nw {
                out.values[j * nw + k] = self.values[j * nw + refl[k]];
            }
        }
        out.matrix = None;
        out
    }
}

// ---------------------------------------------------------------------------
// row engine

struct RowFft {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl RowFft {
    fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(n);
        Self { n, fft }
    }

    /// Unscaled centered forward DFT of a `d`-dimensional cube in place.
    fn run(&self, buf: &mut [Complex64], d: usize, line: &mut [Complex64]) {
        let n = self.n;
        let half = n / 2;
        for chunk in buf.chunks_mut(n) {
            chunk.rotate_left(half);
            self.fft.process(chunk);
            chunk.rotate_left(half);
        }
        if d == 2 {
            for i in 0..n {
                for j in 0..n {
                    line[j] = buf[((j + half) % n) * n + i];
                }
                self.fft.process(line);
                for j in 0..n {
                    buf[((j + half) % n) * n + i] = line[j];
                }
            }
        }
    }
}

/// Rows `B_A(f, g)(x, ·)` for the listed row points, with the `y`-integral
/// taken over `ygrid` and the result restricted to the centered subgrid `keep`
/// of `ygrid.dual()`.
pub fn mwd_rows(
    a: &BlockMatrix,
    f: &Signal,
    g: &Signal,
    rows: &[f64],
    ygrid: &Grid,
    keep: &Grid,
) -> Result<Vec<Complex64>> {
    let d = a.dim();
    if f.dim() != d || g.dim() != d || ygrid.dim() != d || keep.dim() != d {
        return Err(Error::GridMismatch(
            "matrix, signals and grids must share d".into(),
        ));
    }
    let ydual = ygrid.dual();
    if (keep.step() - ydual.step()).abs() > 1e-12 * ydual.step() || keep.n() > ydual.n() {
        return Err(Error::GridMismatch(format!(
            "output grid {keep:?} is not a centered subgrid of {ydual:?}"
        )));
    }
    let off = (ydual.n() - keep.n()) / 2;
    let m = a.entries();
    let ny = ygrid.total();
    let ys = ygrid.all_coords();
    // A12·y and A22·y for every y
    let mut by = vec![0.0; ny * d];
    let mut dy = vec![0.0; ny * d];
    for k in 0..ny {
        let y = &ys[k * d..(k + 1) * d];
        for r in 0..d {
            by[k * d + r] = (0..d).map(|c| m[(r, d + c)] * y[c]).sum();
            dy[k * d + r] = (0..d).map(|c| m[(d + r, d + c)] * y[c]).sum();
        }
    }
    let fft = RowFft::new(ygrid.n());
    let w = ygrid.weight();
    let nk = keep.total();
    let nrows = rows.len() / d;
    let mut out = vec![ZERO; nrows * nk];
    out.par_chunks_mut(nk).enumerate().for_each_init(
        || (vec![ZERO; ny], vec![ZERO; ygrid.n()]),
        |(buf, line), (j, orow)| {
            let x = &rows[j * d..(j + 1) * d];
            let mut ax = [0.0; 2];
            let mut cx = [0.0; 2];
            for r in 0..d {
                ax[r] = (0..d).map(|c| m[(r, c)] * x[c]).sum();
                cx[r] = (0..d).map(|c| m[(d + r, c)] * x[c]).sum();
            }
            let mut p = [0.0; 2];
            let mut q = [0.0; 2];
            for (k, b) in buf.iter_mut().enumerate() {
                for r in 0..d {
                    p[r] = ax[r] + by[k * d + r];
                    q[r] = cx[r] + dy[k * d + r];
                }
                *b = f.eval(&p[..d]) * g.eval(&q[..d]).conj();
            }
            fft.run(buf, d, line);
            let nn = ygrid.n();
            let kn = keep.n();
            if d == 1 {
                for (i, o) in orow.iter_mut().enumerate() {
                    *o = buf[off + i] * w;
                }
            } else {
                for i1 in 0..kn {
                    for i2 in 0..kn {
                        orow[i1 * kn + i2] = buf[(off + i1) * nn + off + i2] * w;
                    }
                }
            }
        },
    );
    Ok(out)
}

/// `B_A(f, g)` on `grid × grid.dual()`.
pub fn mwd(a: &BlockMatrix, f: &Signal, g: &Signal, grid: &Grid) -> Result<PhaseSpaceField> {
    mwd_with(a, f, g, grid, DEFAULT_OVERSAMPLE)
}

/// As [`mwd`], with the `y`-quadrature step `Δ/oversample`.
pub fn mwd_with(
    a: &BlockMatrix,
    f: &Signal,
    g: &Signal,
    grid: &Grid,
    oversample: usize,
) -> Result<PhaseSpaceField> {
    if oversample == 0 || !oversample.is_power_of_two() {
        return Err(Error::InvalidGrid(format!(
            "oversampling factor must be a power of two, got {oversample}"
        )));
    }
    if a.dim() != grid.dim() {
        return Err(Error::GridMismatch(format!(
            "matrix has d = {}, grid has d = {}",
            a.dim(),
            grid.dim()
        )));
    }
    let rows = grid.all_coords();
    let ygrid = grid.refined(oversample);
    let wgrid = grid.dual();
    let values = mwd_rows(a, f, g, &rows, &ygrid, &wgrid)?;
    Ok(PhaseSpaceField {
        values,
        xgrid: *grid,
        wgrid,
        matrix: Some(a.clone()),
    })
}

/// Separable table `e^{−2πi y_j ω_k}` for one axis.
fn exp_table(ys: &[f64], ws: &[f64]) -> Vec<Complex64> {
    let mut t = Vec::with_capacity(ys.len() * ws.len());
    for &y in ys {
        for &w in ws {
            t.push(Complex64::from_polar(1.0, -2.0 * PI * y * w));
        }
    }
    t
}

/// Short-time Fourier transform `V_g f(x, ω) = Σ_y f(y) conj g(y − x) e^{−2πi y·ω} Δ^d`
/// on `grid × grid.dual()`, by direct summation.
pub fn stft(f: &Signal, g: &Signal, grid: &Grid) -> Result<PhaseSpaceField> {
    let d = grid.dim();
    if f.dim() != d || g.dim() != d {
        return Err(Error::GridMismatch("signal and grid dimensions differ".into()));
    }
    let n = grid.n();
    let wgrid = grid.dual();
    let table = exp_table(&grid.points(), &wgrid.points());
    let fy = f.sample(grid)?;
    let ys = grid.all_coords();
    let nt = grid.total();
    let wt = grid.weight();
    let mut values = vec![ZERO; nt * nt];
    values.par_chunks_mut(nt).enumerate().for_each(|(j, row)| {
        let x = grid.coords(j);
        let mut p = [0.0; 2];
        let h: Vec<Complex64> = (0..nt)
            .map(|k| {
                for a in 0..d {
                    p[a] = ys[k * d + a] - x[a];
                }
                fy[k] * g.eval(&p[..d]).conj()
            })
            .collect();
        if d == 1 {
            for (kw, o) in row.iter_mut().enumerate() {
                *o = (0..n).map(|jy| h[jy] * table[jy * n + kw]).sum::<Complex64>() * wt;
            }
        } else {
            // contract the second y-axis, then the first
            let mut tmp = vec![ZERO; n * n];
            for y1 in 0..n {
                for w2 in 0..n {
                    tmp[y1 * n + w2] = (0..n).map(|y2| h[y1 * n + y2] * table[y2 * n + w2]).sum();
                }
            }
            for w1 in 0..n {
                for w2 in 0..n {
                    row[w1 * n + w2] =
                        (0..n).map(|y1| tmp[y1 * n + w2] * table[y1 * n + w1]).sum::<Complex64>() * wt;
                }
            }
        }
    });
    Ok(PhaseSpaceField {
        values,
        xgrid: *grid,
        wgrid,
        matrix: None,
    })
}

/// `V_g f(x, ω)` at one arbitrary point, by quadrature over `quad`.
pub fn stft_point(f: &Signal, g: &Signal, quad: &Grid, x: &[f64], w: &[f64]) -> Complex64 {
    let d = quad.dim();
    let mut y = [0.0; 2];
    let mut p = [0.0; 2];
    let mut acc = ZERO;
    for k in 0..quad.total() {
        quad.coords_into(k, &mut y[..d]);
        let mut yw = 0.0;
        for a in 0..d {
            p[a] = y[a] - x[a];
            yw += y[a] * w[a];
        }
        acc += f.eval(&y[..d]) * g.eval(&p[..d]).conj() * Complex64::from_polar(1.0, -2.0 * PI * yw);
    }
    acc * quad.weight()
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum())
        .collect()
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push(m[(r, c)]);
        }
    }
    out
}

/// Right-regular factorization
/// `B_A(f, g)(x, ω) = |det A12|⁻¹ e^{2πi A12^#ω·A11x} V_{g̃} f(c(x), d(ω))`,
/// with `c(x) = (A11 − A12 A22⁻¹ A21)x`, `d(ω) = A12^# ω`, `g̃(t) = g(A22 A12⁻¹ t)`;
/// the STFT is summed directly at every image point over the `y`-quadrature
/// grid used by [`mwd`].
pub fn mwd_via_stft(a: &BlockMatrix, f: &Signal, g: &Signal, grid: &Grid) -> Result<PhaseSpaceField> {
    if !a.classify().right_regular {
        return Err(Error::NotRightRegular);
    }
    let d = a.dim();
    if grid.dim() != d || f.dim() != d || g.dim() != d {
        return Err(Error::GridMismatch("matrix, signals and grid must share d".into()));
    }
    let (a11, a12, a21, a22) = (a.a11(), a.a12(), a.a21(), a.a22());
    let a12_inv = a12.clone().try_inverse().ok_or(Error::NotRightRegular)?;
    let a22_inv = a22.clone().try_inverse().ok_or(Error::NotRightRegular)?;
    let c = &a11 - &a12 * &a22_inv * &a21;
    let dm = a12_inv.transpose();
    let gt = Signal::Linear {
        base: Box::new(g.clone()),
        m: row_major(&(&a22 * &a12_inv)),
    };
    let scale = 1.0 / a12.determinant().abs();
    let wgrid = grid.dual();
    let quad = grid.refined(DEFAULT_OVERSAMPLE);
    let (nx, nw, ny) = (grid.total(), wgrid.total(), quad.total());
    let ys = quad.all_coords();
    let fy = f.sample(&quad)?;
    let dws: Vec<Vec<f64>> = (0..nw).map(|k| mat_vec(&dm, &wgrid.coords(k))).collect();
    // e^{−2πi y·d(ω)} for every (ω, y)
    let table: Vec<Complex64> = (0..nw)
        .into_par_iter()
        .flat_map_iter(|k| {
            let dw = dws[k].clone();
            let ys = &ys;
            (0..ny).map(move |j| {
                let t: f64 = (0..d).map(|r| ys[j * d + r] * dw[r]).sum();
                Complex64::from_polar(1.0, -2.0 * PI * t)
            })
        })
        .collect();
    let wt = quad.weight();
    let mut values = vec![ZERO; nx * nw];
    values.par_chunks_mut(nw).enumerate().for_each(|(j, row)| {
        let x = grid.coords(j);
        let cx = mat_vec(&c, &x);
        let a11x = mat_vec(&a11, &x);
        let mut p = [0.0; 2];
        let u: Vec<Complex64> = (0..ny)
            .map(|k| {
                for r in 0..d {
                    p[r] = ys[k * d + r] - cx[r];
                }
                fy[k] * gt.eval(&p[..d]).conj()
            })
            .collect();
        for (k, o) in row.iter_mut().enumerate() {
            let tab = &table[k * ny..(k + 1) * ny];
            let v: Complex64 = u.iter().zip(tab).map(|(a, b)| a * b).sum::<Complex64>() * wt;
            let ph: f64 = (0..d).map(|r| dws[k][r] * a11x[r]).sum();
            *o = v * Complex64::from_polar(scale, 2.0 * PI * ph);
        }
    });
    Ok(PhaseSpaceField {
        values,
        xgrid: *grid,
        wgrid,
        matrix: Some(a.clone()),
    })
}

/// `B*_{A,γ} H(x) = |det A|⁻¹ ∫ (F₂H)(A⋆(x, y)) γ(y) dy`, evaluated through the
/// equivalent form `|det A|⁻¹ ∫ (F₂⁻¹H)(A⁻¹(x, y)) γ(y) dy`.
pub fn adjoint_apply(a: &BlockMatrix, h: &PhaseSpaceField, gamma: &Signal) -> Result<Signal> {
    let sym = crate::quantize::SymbolField::from_field(h.clone());
    let op = crate::quantize::kernel_from_symbol(&sym, a)?;
    op.apply(gamma)
}

/// Recovers `f` from `B_A(f, g)`: `f = |det A| / conj⟨g, γ⟩ · B*_{A,γ} B_A(f, g)`.
pub fn reconstruct(
    a: &BlockMatrix,
    h: &PhaseSpaceField,
    g: &Signal,
    gamma: &Signal,
) -> Result<Signal> {
    let grid = h.xgrid;
    let gg = inner(g, gamma, &grid)?;
    let ng = inner(g, g, &grid)?.re.sqrt();
    let nga = inner(gamma, gamma, &grid)?.re.sqrt();
    if gg.norm() <= 1e-14 * ng * nga {
        return Err(Error::OrthogonalWindowPair);
    }
    let s = adjoint_apply(a, h, gamma)?;
    let c = Complex64::new(a.abs_det(), 0.0) / gg.conj();
    let v: Vec<Complex64> = s.sample(&grid)?.into_iter().map(|x| x * c).collect();
    Signal::sampled(grid, v)
}

/// Both sides of a covariance identity.
#[derive(Debug, Clone)]
pub struct CovariancePair {
    pub lhs: PhaseSpaceField,
    pub rhs: PhaseSpaceField,
}

impl CovariancePair {
    pub fn max_abs_diff(&self) -> f64 {
        self.lhs.max_abs_diff(&self.rhs).unwrap_or(f64::INFINITY)
    }
}

/// `B_A(M_α T_a f, M_β T_b g)` versus
/// `e^{2πiσ·s} e^{2πi(x·ρ − ω·s)} B_A(f, g)(x − r, ω − σ)` with
/// `(r, s) = A⁻¹(a, b)` and `(ρ, σ) = Aᵀ(α, −β)`.
#[allow(clippy::too_many_arguments)]
pub fn covariance_check(
    a: &BlockMatrix,
    f: &Signal,
    g: &Signal,
    x_f: &[f64],
    w_f: &[f64],
    x_g: &[f64],
    w_g: &[f64],
    grid: &Grid,
) -> Result<CovariancePair> {
    let d = a.dim();
    let base = mwd(a, f, g, grid)?;
    let lhs = mwd(a, &tf_shift(f, x_f, w_f)?, &tf_shift(g, x_g, w_g)?, grid)?;
    let ab: Vec<f64> = x_f.iter().chain(x_g).copied().collect();
    let rs = mat_vec(&a.inverse(), &ab);
    let al: Vec<f64> = w_f.iter().copied().chain(w_g.iter().map(|v| -v)).collect();
    let rho_sigma = mat_vec(&a.entries().transpose(), &al);
    let (r, s) = rs.split_at(d);
    let (rho, sigma) = rho_sigma.split_at(d);
    let tr: Vec<f64> = r.iter().chain(sigma).copied().collect();
    let md: Vec<f64> = rho.iter().copied().chain(s.iter().map(|v| -v)).collect();
    let ph: f64 = sigma.iter().zip(s).map(|(u, v)| u * v).sum();
    let rhs = base.translate_modulate(&tr, &md, Complex64::from_polar(1.0, 2.0 * PI * ph))?;
    Ok(CovariancePair { lhs, rhs })
}

/// Cohen-form covariance for `A = affine(T)`:
/// `B_A(π(z)f, π(w)g) = e^{2πi(Tᵀz₂ + (I−Tᵀ)w₂)·(z₁−w₁)} M_{J(z−w)} T_{𝒯(z,w)} B_A(f, g)`
/// where `𝒯(z, w) = ((I−T)z₁ + Tw₁, Tᵀz₂ + (I−Tᵀ)w₂)`.
pub fn covariance_cohen_check(
    t: &DMatrix<f64>,
    f: &Signal,
    g: &Signal,
    z: &[f64],
    w: &[f64],
    grid: &Grid,
) -> Result<CovariancePair> {
    let d = t.nrows();
    let a = BlockMatrix::preset(&crate::blockmat::Preset::Affine(t.clone()), d)?;
    let base = mwd(&a, f, g, grid)?;
    let lhs = mwd(
        &a,
        &tf_shift(f, &z[..d], &z[d..])?,
        &tf_shift(g, &w[..d], &w[d..])?,
        grid,
    )?;
    let i = DMatrix::<f64>::identity(d, d);
    let tt = t.transpose();
    let x_part: Vec<f64> = mat_vec(&(&i - t), &z[..d])
        .iter()
        .zip(mat_vec(t, &w[..d]))
        .map(|(u, v)| u + v)
        .collect();
    let w_part: Vec<f64> = mat_vec(&tt, &z[d..])
        .iter()
        .zip(mat_vec(&(&i - &tt), &w[d..]))
        .map(|(u, v)| u + v)
        .collect();
    let tr: Vec<f64> = x_part.iter().chain(&w_part).copied().collect();
    let diff: Vec<f64> = z.iter().zip(w).map(|(u, v)| u - v).collect();
    let md = crate::blockmat::apply_j(&diff);
    let ph: f64 = w_part.iter().zip(&diff[..d]).map(|(u, v)| u * v).sum();
    let rhs = base.translate_modulate(&tr, &md, Complex64::from_polar(1.0, 2.0 * PI * ph))?;
    Ok(CovariancePair { lhs, rhs })
}

/// STFT of a phase-space field with a phase-space window,
/// `V_Φ F(z, ζ) = Σ_s F(s) conj Φ(s − z) e^{−2πi s·ζ} Δ^d (1/L)^d`, for on-grid `z`.
pub fn phase_space_stft(
    field: &PhaseSpaceField,
    window: &PhaseSpaceField,
    z: &[f64],
    zeta: &[f64],
) -> Result<Complex64> {
    field.check_grids(window)?;
    let d = field.dim();
    let shifted = window.translate_modulate(z, &vec![0.0; 2 * d], Complex64::new(1.0, 0.0))?;
    let (xg, wg) = (field.xgrid, field.wgrid);
    let nw = wg.total();
    let wph: Vec<Complex64> = (0..nw)
        .map(|k| {
            let w = wg.coords(k);
            let t: f64 = (0..d).map(|r| w[r] * zeta[d + r]).sum();
            Complex64::from_polar(1.0, -2.0 * PI * t)
        })
        .collect();
    let s: Complex64 = (0..xg.total())
        .into_par_iter()
        .map(|j| {
            let x = xg.coords(j);
            let t: f64 = (0..d).map(|r| x[r] * zeta[r]).sum();
            let xp = Complex64::from_polar(1.0, -2.0 * PI * t);
            let row = &field.values[j * nw..(j + 1) * nw];
            let wrow = &shifted.values[j * nw..(j + 1) * nw];
            let acc: Complex64 = (0..nw).map(|k| row[k] * wrow[k].conj() * wph[k]).sum();
            acc * xp
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(s * field.weight())
}

/// Precomputed fields for evaluating both sides of the magic formula
/// `V_{B_A(φ,ψ)} B_A(f, g)(z, ζ) = |det A|⁻¹ e^{−2πi z₂·ζ₂} V_φ f(a, α) conj V_ψ g(b, β)`,
/// `(a, b) = A(z₁, −ζ₂)`, `(α, β) = I₂A^#(ζ₁, z₂)`.
pub struct MagicFormula {
    a: BlockMatrix,
    f: Signal,
    g: Signal,
    phi: Signal,
    psi: Signal,
    field: PhaseSpaceField,
    window: PhaseSpaceField,
    quad: Grid,
}

impl MagicFormula {
    pub fn new(
        a: &BlockMatrix,
        f: &Signal,
        g: &Signal,
        phi: &Signal,
        psi: &Signal,
        grid: &Grid,
    ) -> Result<Self> {
        Ok(Self {
            a: a.clone(),
            f: f.clone(),
            g: g.clone(),
            phi: phi.clone(),
            psi: psi.clone(),
            field: mwd(a, f, g, grid)?,
            window: mwd(a, phi, psi, grid)?,
            quad: grid.refined(2),
        })
    }

    /// Outer STFT by direct phase-space quadrature; `z` must lie on the grid.
    pub fn lhs(&self, z: &[f64], zeta: &[f64]) -> Result<Complex64> {
        phase_space_stft(&self.field, &self.window, z, zeta)
    }

    /// Product of signal STFTs, each evaluated pointwise.
    pub fn rhs(&self, z: &[f64], zeta: &[f64]) -> Complex64 {
        let d = self.a.dim();
        let v1: Vec<f64> = z[..d].iter().copied().chain(zeta[d..].iter().map(|v| -v)).collect();
        let ab = self.a.apply(&v1);
        let v2: Vec<f64> = zeta[..d].iter().chain(&z[d..]).copied().collect();
        let mut al = self.a.sharp().apply(&v2);
        for v in al[d..].iter_mut() {
            *v = -*v;
        }
        let vf = stft_point(&self.f, &self.phi, &self.quad, &ab[..d], &al[..d]);
        let vg = stft_point(&self.g, &self.psi, &self.quad, &ab[d..], &al[d..]);
        let t: f64 = (0..d).map(|r| z[d + r] * zeta[d + r]).sum();
        Complex64::from_polar(1.0 / self.a.abs_det(), -2.0 * PI * t) * vf * vg.conj()
    }

    pub fn eval(&self, z: &[f64], zeta: &[f64]) -> Result<(Complex64, Complex64)> {
        Ok((self.lhs(z, zeta)?, self.rhs(z, zeta)))
    }
}

/// Both sides of the magic formula at one point.
#[allow(clippy::too_many_arguments)]
pub fn magic_eval(
    a: &BlockMatrix,
    f: &Signal,
    g: &Signal,
    phi: &Signal,
    psi: &Signal,
    z: &[f64],
    zeta: &[f64],
    grid: &Grid,
) -> Result<(Complex64, Complex64)> {
    MagicFormula::new(a, f, g, phi, psi, grid)?.eval(z, zeta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    /// `Σ_ω F(x, ω) (1/L)^d` per `x`.
    pub time: Vec<Complex64>,
    /// `Σ_x F(x, ω) Δ^d` per `ω`.
    pub freq: Vec<Complex64>,
}

pub fn marginals(f: &PhaseSpaceField) -> Marginals {
    let (nx, nw) = (f.xgrid.total(), f.wgrid.total());
    let ww = f.wgrid.weight();
    let wx = f.xgrid.weight();
    let time = (0..nx)
        .map(|j| f.values[j * nw..(j + 1) * nw].iter().sum::<Complex64>() * ww)
        .collect();
    let mut freq = vec![ZERO; nw];
    for j in 0..nx {
        for (k, v) in freq.iter_mut().enumerate() {
            *v += f.values[j * nw + k];
        }
    }
    freq.iter_mut().for_each(|v| *v *= wx);
    Marginals { time, freq }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmat::Preset;
    use crate::signals::{chirp, gaussian, hermite};

    fn g1() -> Grid {
        Grid::new(1, 256, 16.0).unwrap()
    }
    fn small() -> Grid {
        Grid::new(1, 64, 12.0).unwrap()
    }
    fn preset(p: Preset) -> BlockMatrix {
        BlockMatrix::preset(&p, 1).unwrap()
    }

    #[test]
    fn wigner_gaussian_origin() {
        let g = g1();
        let w = mwd(&preset(Preset::Wigner), &gaussian(1.0, 1).unwrap(), &gaussian(1.0, 1).unwrap(), &g).unwrap();
        let c = g.total() / 2;
        let v = w.get(c, c);
        assert!((v.re - 2f64.sqrt()).abs() < 1e-8 && v.im.abs() < 1e-12);
    }

    #[test]
    fn stft_preset_matches_direct_stft() {
        let g = g1();
        let f = hermite(1);
        let h = gaussian(1.0, 1).unwrap();
        let a = mwd(&preset(Preset::Stft), &f, &h, &g).unwrap();
        let b = stft(&f, &h, &g).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-10);
    }

    #[test]
    fn stft_origin_and_swap() {
        let g = g1();
        let phi = gaussian(1.0, 1).unwrap();
        let v = stft(&phi, &phi, &g).unwrap();
        let c = g.total() / 2;
        assert!((v.get(c, c).re - 2f64.powf(-0.5)).abs() < 1e-10);
        let f = chirp(0.5, 1.0, 1).unwrap();
        let a = stft(&f, &phi, &g).unwrap();
        let b = stft(&phi, &f, &g).unwrap();
        let n = g.n();
        let mut worst: f64 = 0.0;
        for j in 1..n {
            for k in 1..n {
                worst = worst.max((a.get(j, k).norm() - b.get(n - j, n - k).norm()).abs());
            }
        }
        assert!(worst < 1e-10);
    }

    #[test]
    fn via_stft_matches_for_ambiguity() {
        let g = small();
        let f = gaussian(1.0, 1).unwrap();
        let h = chirp(0.3, 1.2, 1).unwrap();
        let a = preset(Preset::Ambiguity);
        let d1 = mwd(&a, &f, &h, &g).unwrap();
        let d2 = mwd_via_stft(&a, &f, &h, &g).unwrap();
        let e = d1.max_abs_diff(&d2).unwrap();
        assert!(e < 1e-7, "{e}");
        assert!(matches!(
            mwd_via_stft(&preset(Preset::Rihaczek), &f, &h, &g),
            Err(Error::NotRightRegular)
        ));
    }

    #[test]
    fn zero_shift_covariance_is_exact() {
        let g = small();
        let f = gaussian(1.0, 1).unwrap();
        let p = covariance_check(&preset(Preset::Wigner), &f, &f, &[0.0], &[0.0], &[0.0], &[0.0], &g).unwrap();
        assert_eq!(p.lhs.values, p.rhs.values);
    }

    #[test]
    fn off_grid_covariance_rejected() {
        let g = small();
        let f = gaussian(1.0, 1).unwrap();
        let r = covariance_check(&preset(Preset::Wigner), &f, &f, &[0.01], &[0.0], &[0.0], &[0.0], &g);
        assert!(matches!(r, Err(Error::OffGridShift(_))));
    }

    #[test]
    fn marginals_of_wigner() {
        let g = g1();
        let f = gaussian(1.0, 1).unwrap();
        let w = mwd(&preset(Preset::Wigner), &f, &f, &g).unwrap();
        let m = marginals(&w);
        for (j, v) in m.time.iter().enumerate() {
            let x = g.point(j);
            assert!((v.re - (-2.0 * PI * x * x).exp()).abs() < 1e-7);
        }
    }

    #[test]
    fn transpose_round_trip() {
        let g = Grid::new(2, 4, 2.0).unwrap();
        let f = PhaseSpaceField::from_fn(&g, |x, w| Complex64::new(x[0] + 2.0 * x[1], w[0] - w[1]));
        assert_eq!(f.transpose().transpose(), f);
    }

    #[test]
    fn reconstruct_rejects_orthogonal_windows() {
        let g = small();
        let a = preset(Preset::Wigner);
        let h = mwd(&a, &hermite(2), &hermite(0), &g).unwrap();
        assert!(matches!(
            reconstruct(&a, &h, &hermite(0), &hermite(1)),
            Err(Error::OrthogonalWindowPair)
        ));
    }
}
