//! Cohen-class kernels, the Fourier-multiplier bridge between members of the
//! class, and the closed form of the distribution of a Gaussian.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::blockmat::{is_invertible, BlockMatrix, Preset, CLASSIFY_TOL};
use crate::error::{Error, Result};
use crate::fourier::{multiplier, Field2};
use crate::mwd::PhaseSpaceField;
use crate::signals::Grid;

/// Kernel `θ_M`, carried by its Fourier transform `Θ_M(ξ, η) = e^{−2πi ξ·Mη}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohenKernel {
    pub m: DMatrix<f64>,
    m_inv: Option<DMatrix<f64>>,
    det: f64,
}

fn bilinear(a: &[f64], m: &DMatrix<f64>, b: &[f64]) -> f64 {
    let d = a.len();
    let mut s = 0.0;
    for r in 0..d {
        for c in 0..d {
            s += a[r] * m[(r, c)] * b[c];
        }
    }
    s
}

pub fn kernel(m: &DMatrix<f64>) -> CohenKernel {
    let m_inv = if is_invertible(m).is_ok() {
        m.clone().try_inverse()
    } else {
        None
    };
    CohenKernel {
        m: m.clone(),
        m_inv,
        det: m.determinant(),
    }
}

impl CohenKernel {
    pub fn theta_hat(&self, xi: &[f64], eta: &[f64]) -> Complex64 {
        Complex64::from_polar(1.0, -2.0 * PI * bilinear(xi, &self.m, eta))
    }

    pub fn has_explicit(&self) -> bool {
        self.m_inv.is_some()
    }

    /// `|det M|⁻¹ e^{2πi x·M⁻¹ω}` when `M` is invertible.
    pub fn theta_explicit(&self, x: &[f64], w: &[f64]) -> Option<Complex64> {
        let inv = self.m_inv.as_ref()?;
        Some(Complex64::from_polar(
            1.0 / self.det.abs(),
            2.0 * PI * bilinear(x, inv, w),
        ))
    }
}

/// Cohen parameter `M` of the matrix a field is tagged with.
pub fn cohen_parameter(f: &PhaseSpaceField) -> Result<DMatrix<f64>> {
    let a = f.matrix.as_ref().ok_or(Error::NotCohenTagged)?;
    a.classify().cohen_m.ok_or(Error::NotCohenTagged)
}

/// Maps `W_{M1}(f, g)` to `W_{M2}(f, g)` through `F W_{M2} = e^{−2πi ξ·(M2−M1)η} F W_{M1}`.
pub fn remap(f: &PhaseSpaceField, m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> Result<PhaseSpaceField> {
    let tagged = cohen_parameter(f)?;
    if tagged.shape() != m1.shape() || (&tagged - m1).amax() > CLASSIFY_TOL {
        return Err(Error::NotCohenTagged);
    }
    let dm = m2 - m1;
    let d = f.dim();
    let mut out = if dm.amax() == 0.0 {
        f.clone()
    } else {
        let g = multiplier(&f.to_field2(), |xi, eta| {
            Complex64::from_polar(1.0, -2.0 * PI * bilinear(xi, &dm, eta))
        });
        PhaseSpaceField::from_field2(g)
    };
    out.matrix = Some(BlockMatrix::preset(&Preset::Cohen(m2.clone()), d)?);
    Ok(out)
}

/// Closed form of `W_M φ_λ(x, ω)` for `φ_λ(t) = e^{−π|t|²/λ}`, with `S = I + 4MᵀM`.
#[derive(Debug, Clone)]
pub struct GaussianOracle {
    m: DMatrix<f64>,
    lambda: f64,
    s_inv: DMatrix<f64>,
    prefactor: f64,
}

impl GaussianOracle {
    pub fn new(m: &DMatrix<f64>, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::NonPositiveParameter {
                name: "lambda",
                value: lambda,
            });
        }
        let d = m.nrows();
        if m.ncols() != d {
            return Err(Error::DimensionMismatch("M must be square".into()));
        }
        let s = DMatrix::<f64>::identity(d, d) + m.transpose() * m * 4.0;
        let s_inv = s.clone().try_inverse().expect("I + 4MᵀM is positive definite");
        let prefactor = (2.0 * lambda).powf(d as f64 / 2.0) / s.determinant().sqrt();
        Ok(Self {
            m: m.clone(),
            lambda,
            s_inv,
            prefactor,
        })
    }

    pub fn eval(&self, x: &[f64], w: &[f64]) -> Complex64 {
        let d = x.len();
        let mut mtx = [0.0; 4];
        for r in 0..d {
            mtx[r] = (0..d).map(|c| self.m[(c, r)] * x[c]).sum();
        }
        let mtx = &mtx[..d];
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let l = self.lambda;
        let re = -2.0 * PI * xx / l + 8.0 * PI * bilinear(mtx, &self.s_inv, mtx) / l
            - 2.0 * PI * l * bilinear(w, &self.s_inv, w);
        let im = 8.0 * PI * bilinear(w, &self.s_inv, mtx);
        Complex64::from_polar(self.prefactor * re.exp(), im)
    }
}

/// The closed form sampled on `xgrid × wgrid`.
pub fn gaussian_oracle(m: &DMatrix<f64>, lambda: f64, xgrid: &Grid, wgrid: &Grid) -> Result<PhaseSpaceField> {
    let o = GaussianOracle::new(m, lambda)?;
    let d = xgrid.dim();
    if m.nrows() != d || wgrid.dim() != d {
        return Err(Error::DimensionMismatch("M and grids must share d".into()));
    }
    let ws = wgrid.all_coords();
    let values = (0..xgrid.total())
        .into_par_iter()
        .flat_map_iter(|j| {
            let x = xgrid.coords(j);
            let ws = &ws;
            let o = &o;
            (0..wgrid.total()).map(move |k| o.eval(&x, &ws[k * d..(k + 1) * d]))
        })
        .collect();
    let mut f = PhaseSpaceField::new(values, *xgrid, *wgrid)?;
    f.matrix = Some(BlockMatrix::preset(&Preset::Cohen(m.clone()), d)?);
    Ok(f)
}

/// Periodic discrete convolution `W * θ_{ΔM}` with the explicit chirp kernel,
/// `θ(x, ω) = |det ΔM|⁻¹ e^{2πi x·ΔM⁻¹ω}` sampled on the field grids, computed by FFT.
pub fn chirp_convolution(f: &PhaseSpaceField, dm: &DMatrix<f64>) -> Result<PhaseSpaceField> {
    let k = kernel(dm);
    if !k.has_explicit() {
        return Err(Error::SingularMatrix {
            sigma_min: 0.0,
            sigma_max: dm.amax(),
        });
    }
    let theta = PhaseSpaceField::from_fn(&f.xgrid, |x, w| k.theta_explicit(x, w).unwrap());
    if !theta.wgrid.same_as(&f.wgrid) {
        return Err(Error::GridMismatch("field ω-grid must be the dual of its x-grid".into()));
    }
    let fw = f.to_field2().transform_axis(1, false).transform_axis(0, false);
    let ft = theta.to_field2().transform_axis(1, false).transform_axis(0, false);
    let values: Vec<Complex64> = fw.values.iter().zip(&ft.values).map(|(a, b)| a * b).collect();
    let prod = Field2 { values, ..fw };
    let back = prod.transform_axis(0, true).transform_axis(1, true);
    let mut out = PhaseSpaceField::from_field2(back);
    out.matrix = None;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mwd::mwd;
    use crate::signals::gaussian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(v: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, v)
    }

    #[test]
    fn kernel_examples() {
        let k0 = kernel(&s(0.0));
        assert!(!k0.has_explicit());
        assert_eq!(k0.theta_hat(&[0.3], &[1.7]), Complex64::new(1.0, 0.0));
        let k = kernel(&s(0.5));
        let (x, w) = (0.4, -0.9);
        let want = Complex64::from_polar(2.0, 4.0 * PI * x * w);
        assert!((k.theta_explicit(&[x], &[w]).unwrap() - want).norm() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let km = kernel(&DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0)));
        for _ in 0..100 {
            let xi = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let eta = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            assert!((km.theta_hat(&xi, &eta).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_examples() {
        let g = Grid::new(1, 64, 12.0).unwrap();
        let w = gaussian_oracle(&s(0.0), 1.0, &g, &g.dual()).unwrap();
        let c = g.total() / 2;
        assert!((w.get(c, c).re - 2f64.sqrt()).abs() < 1e-14);
        assert!(w.values.iter().all(|v| v.im.abs() < 1e-12));
        let w = gaussian_oracle(&s(0.5), 1.0, &g, &g.dual()).unwrap();
        assert!((w.get(c, c).re - 1.0).abs() < 1e-14);
        assert!(w.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) > 0.1);
        assert!(matches!(
            gaussian_oracle(&s(0.0), -1.0, &g, &g.dual()),
            Err(Error::NonPositiveParameter { .. })
        ));
    }

    #[test]
    fn remap_round_trips() {
        let g = Grid::new(1, 64, 12.0).unwrap();
        let a = BlockMatrix::preset(&Preset::Wigner, 1).unwrap();
        let f = gaussian(1.0, 1).unwrap();
        let w = mwd(&a, &f, &f, &g).unwrap();
        let same = remap(&w, &s(0.0), &s(0.0)).unwrap();
        assert!(same.max_abs_diff(&w).unwrap() < 1e-12);
        let there = remap(&w, &s(0.0), &s(0.3)).unwrap();
        let back = remap(&there, &s(0.3), &s(0.0)).unwrap();
        assert!(back.max_abs_diff(&w).unwrap() < 1e-10);
        let mut untagged = w.clone();
        untagged.matrix = None;
        assert!(matches!(remap(&untagged, &s(0.0), &s(0.3)), Err(Error::NotCohenTagged)));
        assert!(matches!(remap(&w, &s(0.1), &s(0.3)), Err(Error::NotCohenTagged)));
    }
}
