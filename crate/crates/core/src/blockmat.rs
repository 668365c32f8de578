//! Invertible 2d×2d real block matrices and the derived matrices used by the
//! distribution and quantization formulas.
//!
//! A matrix `A = [[A11, A12], [A21, A22]]` acts on phase-space pairs
//! `(x, y) ∈ ℝ^d × ℝ^d` by `(x, y) ↦ (A11 x + A12 y, A21 x + A22 y)`.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};

/// Relative threshold on `σ_min / σ_max` below which a matrix is singular.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Entrywise tolerance for block-structure classification.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// Largest supported half-dimension.
pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    d: usize,
    entries: DMatrix<f64>,
    det: f64,
}

/// Named matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Wigner,
    Tau(f64),
    Stft,
    Ambiguity,
    Rihaczek,
    /// Perturbative Cohen form `[[I, M + I/2], [I, M − I/2]]`.
    Cohen(DMatrix<f64>),
    /// Affine Cohen form `[[I, T], [I, −(I − T)]]`.
    Affine(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub left_regular: bool,
    pub right_regular: bool,
    pub cohen_type: bool,
    pub self_adjoint_form: bool,
    pub cohen_m: Option<DMatrix<f64>>,
    pub cohen_t: Option<DMatrix<f64>>,
    /// `det(T)·det(I − T)`, present for Cohen-type matrices.
    pub c_t: Option<f64>,
}

/// Matrices derived from `A` by the interchange, Fourier and inversion rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derived {
    /// `Ĩ A I₂ = [[A21, −A22], [A11, −A12]]` (interchange of f and g, adjoint calculus).
    C1,
    /// `I₂ A^# Ĩ` (distribution of Fourier transforms).
    C2,
    /// `A J` (Fourier transform of a distribution).
    AJ,
    /// `I₂ A⁻¹` (inversion formula).
    AStar,
}

pub(crate) fn is_invertible(m: &DMatrix<f64>) -> std::result::Result<(), Error> {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || min <= SINGULAR_RTOL * max {
        return Err(Error::SingularMatrix {
            sigma_min: min,
            sigma_max: max,
        });
    }
    Ok(())
}

pub(crate) fn inverse_of(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    is_invertible(m)?;
    m.clone().try_inverse().ok_or(Error::SingularMatrix {
        sigma_min: 0.0,
        sigma_max: 0.0,
    })
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

/// `d×d` identity.
pub fn eye(d: usize) -> DMatrix<f64> {
    DMatrix::identity(d, d)
}

fn assemble(
    a11: &DMatrix<f64>,
    a12: &DMatrix<f64>,
    a21: &DMatrix<f64>,
    a22: &DMatrix<f64>,
) -> DMatrix<f64> {
    let d = a11.nrows();
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(a11);
    m.view_mut((0, d), (d, d)).copy_from(a12);
    m.view_mut((d, 0), (d, d)).copy_from(a21);
    m.view_mut((d, d), (d, d)).copy_from(a22);
    m
}

impl BlockMatrix {
    /// Build from a full `2d×2d` matrix.
    pub fn from_entries(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n != entries.ncols() || n == 0 || n % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "expected a square 2d×2d matrix, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let d = n / 2;
        if d > MAX_DIM {
            return Err(Error::DimensionMismatch(format!(
                "d = {d} exceeds the supported maximum {MAX_DIM}"
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite entry".into()));
        }
        is_invertible(&entries)?;
        let det = entries.determinant();
        Ok(Self { d, entries, det })
    }

    /// Build from four `d×d` blocks.
    pub fn from_blocks(
        a11: &DMatrix<f64>,
        a12: &DMatrix<f64>,
        a21: &DMatrix<f64>,
        a22: &DMatrix<f64>,
    ) -> Result<Self> {
        let d = a11.nrows();
        for (name, b) in [("A11", a11), ("A12", a12), ("A21", a21), ("A22", a22)] {
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}×{}, expected {d}×{d}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Self::from_entries(assemble(a11, a12, a21, a22))
    }

    /// Build from row-major entries of a `2d×2d` matrix.
    pub fn from_row_slice(d: usize, data: &[f64]) -> Result<Self> {
        if data.len() != 4 * d * d {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                4 * d * d,
                data.len()
            )));
        }
        Self::from_entries(DMatrix::from_row_slice(2 * d, 2 * d, data))
    }

    pub fn preset(preset: &Preset, d: usize) -> Result<Self> {
        let i = eye(d);
        let z = DMatrix::zeros(d, d);
        let check = |m: &DMatrix<f64>| -> Result<()> {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "parameter matrix is {}×{}, expected {d}×{d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            Ok(())
        };
        match preset {
            Preset::Wigner => Self::preset(&Preset::Tau(0.5), d),
            Preset::Rihaczek => Self::preset(&Preset::Tau(0.0), d),
            Preset::Tau(tau) => Self::from_blocks(&i, &(&i * *tau), &i, &(&i * -(1.0 - tau))),
            Preset::Stft => Self::from_blocks(&z, &i, &(-&i), &i),
            Preset::Ambiguity => Self::from_blocks(&(&i * 0.5), &i, &(&i * -0.5), &i),
            Preset::Cohen(m) => {
                check(m)?;
                Self::from_blocks(&i, &(m + &i * 0.5), &i, &(m - &i * 0.5))
            }
            Preset::Affine(t) => {
                check(t)?;
                Self::from_blocks(&i, t, &i, &(t - &i))
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn abs_det(&self) -> f64 {
        self.det.abs()
    }

    /// Block `(i, j)` with `i, j ∈ {1, 2}`.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        assert!((1..=2).contains(&i) && (1..=2).contains(&j));
        let d = self.d;
        self.entries
            .view(((i - 1) * d, (j - 1) * d), (d, d))
            .into_owned()
    }

    pub fn a11(&self) -> DMatrix<f64> {
        self.block(1, 1)
    }
    pub fn a12(&self) -> DMatrix<f64> {
        self.block(1, 2)
    }
    pub fn a21(&self) -> DMatrix<f64> {
        self.block(2, 1)
    }
    pub fn a22(&self) -> DMatrix<f64> {
        self.block(2, 2)
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        // invertibility is checked at construction
        self.entries
            .clone()
            .try_inverse()
            .expect("BlockMatrix is invertible by construction")
    }

    pub fn inverse_block_matrix(&self) -> BlockMatrix {
        BlockMatrix::from_entries(self.inverse()).expect("inverse of an invertible matrix")
    }

    /// `(x, y) ↦ A (x, y)` for a `2d`-vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = 2 * self.d;
        assert_eq!(v.len(), n);
        (0..n)
            .map(|r| (0..n).map(|c| self.entries[(r, c)] * v[c]).sum())
            .collect()
    }

    /// Product `self · other`.
    pub fn mul(&self, other: &BlockMatrix) -> BlockMatrix {
        BlockMatrix::from_entries(&self.entries * &other.entries)
            .expect("product of invertible matrices")
    }

    pub fn transpose(&self) -> BlockMatrix {
        BlockMatrix::from_entries(self.entries.transpose()).expect("transpose is invertible")
    }

    pub fn classify(&self) -> Classification {
        let d = self.d;
        let i = eye(d);
        let (a11, a12, a21, a22) = (self.a11(), self.a12(), self.a21(), self.a22());
        let left_regular = is_invertible(&a11).is_ok() && is_invertible(&a21).is_ok();
        let right_regular = is_invertible(&a12).is_ok() && is_invertible(&a22).is_ok();
        let cohen_type = max_abs_diff(&a11, &i) <= CLASSIFY_TOL
            && max_abs_diff(&a21, &i) <= CLASSIFY_TOL
            && max_abs_diff(&(&a12 - &a22), &i) <= CLASSIFY_TOL;
        let self_adjoint_form = max_abs_diff(&a21, &a11) <= CLASSIFY_TOL
            && max_abs_diff(&a12, &(-&a22)) <= CLASSIFY_TOL;
        let (cohen_m, cohen_t, c_t) = if cohen_type {
            let m = (&a12 + &a22) * 0.5;
            let t = a12.clone();
            let c = t.determinant() * (&i - &t).determinant();
            (Some(m), Some(t), Some(c))
        } else {
            (None, None, None)
        };
        Classification {
            left_regular,
            right_regular,
            cohen_type,
            self_adjoint_form,
            cohen_m,
            cohen_t,
            c_t,
        }
    }

    /// `A^# = (A⁻¹)ᵀ`.
    pub fn sharp(&self) -> BlockMatrix {
        BlockMatrix::from_entries(self.inverse().transpose()).expect("inverse is invertible")
    }

    pub fn derived(&self, which: Derived) -> BlockMatrix {
        let d = self.d;
        let m = match which {
            Derived::C1 => &flip(d) * &self.entries * &i2(d),
            Derived::C2 => &i2(d) * self.inverse().transpose() * &flip(d),
            Derived::AJ => &self.entries * &symplectic_j(d),
            Derived::AStar => &i2(d) * self.inverse(),
        };
        BlockMatrix::from_entries(m).expect("products of invertible matrices are invertible")
    }

    /// Entrywise comparison.
    pub fn approx_eq(&self, other: &BlockMatrix, tol: f64) -> bool {
        self.d == other.d && max_abs_diff(&self.entries, &other.entries) <= tol
    }
}

/// Canonical symplectic matrix `J = [[0, I], [−I, 0]]`.
pub fn symplectic_j(d: usize) -> DMatrix<f64> {
    let i = eye(d);
    let z = DMatrix::zeros(d, d);
    assemble(&z, &i, &(-&i), &z)
}

/// Flip `Ĩ = [[0, I], [I, 0]]`.
pub fn flip(d: usize) -> DMatrix<f64> {
    let i = eye(d);
    let z = DMatrix::zeros(d, d);
    assemble(&z, &i, &i, &z)
}

/// `I₂ = diag(I, −I)`.
pub fn i2(d: usize) -> DMatrix<f64> {
    let i = eye(d);
    let z = DMatrix::zeros(d, d);
    assemble(&i, &z, &z, &(-&i))
}

pub fn j_block(d: usize) -> BlockMatrix {
    BlockMatrix::from_entries(symplectic_j(d)).expect("J is invertible")
}

/// Affine-form maps of a Cohen-type matrix with parameter `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohenMaps {
    pub t: DMatrix<f64>,
    /// `P_T = diag(−T, −(I − T))`.
    pub p_t: DMatrix<f64>,
    /// `I + P_T = diag(I − T, T)`.
    pub i_plus_p_t: DMatrix<f64>,
    /// `U_T = −diag((I − T)⁻¹ T, T⁻¹ (I − T))`, when `T` and `I − T` are invertible.
    u_t: Option<DMatrix<f64>>,
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    let z = DMatrix::zeros(d, d);
    assemble(a, &z, &z, b)
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum())
        .collect()
}

impl CohenMaps {
    pub fn new(t: &DMatrix<f64>) -> Result<Self> {
        let d = t.nrows();
        if t.ncols() != d || d == 0 {
            return Err(Error::DimensionMismatch("T must be square".into()));
        }
        let i = eye(d);
        let i_minus_t = &i - t;
        let p_t = block_diag(&(-t), &(-&i_minus_t));
        let i_plus_p_t = block_diag(&i_minus_t, t);
        let u_t = match (inverse_of(&i_minus_t), inverse_of(t)) {
            (Ok(imt_inv), Ok(t_inv)) => {
                Some(-block_diag(&(&imt_inv * t), &(&t_inv * &i_minus_t)))
            }
            _ => None,
        };
        Ok(Self {
            t: t.clone(),
            p_t,
            i_plus_p_t,
            u_t,
        })
    }

    /// `U_T`, or `SingularMatrix` when `T` or `I − T` is singular.
    pub fn u_t(&self) -> Result<&DMatrix<f64>> {
        self.u_t.as_ref().ok_or(Error::SingularMatrix {
            sigma_min: 0.0,
            sigma_max: 1.0,
        })
    }

    /// `𝒯_T(z, w) = (I + P_T) z − P_T w`.
    pub fn tcal(&self, z: &[f64], w: &[f64]) -> Vec<f64> {
        let a = mat_vec(&self.i_plus_p_t, z);
        let b = mat_vec(&self.p_t, w);
        a.iter().zip(&b).map(|(x, y)| x - y).collect()
    }

    /// `(I + P_T)(w − U_T z)`, equal to `𝒯_T(w, z)` when `U_T` exists.
    pub fn tcal_via_u(&self, w: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let u = self.u_t()?;
        let uz = mat_vec(u, z);
        let diff: Vec<f64> = w.iter().zip(&uz).map(|(a, b)| a - b).collect();
        Ok(mat_vec(&self.i_plus_p_t, &diff))
    }
}

/// `J z = (z₂, −z₁)`.
pub fn apply_j(z: &[f64]) -> Vec<f64> {
    let d = z.len() / 2;
    let mut out = Vec::with_capacity(2 * d);
    out.extend_from_slice(&z[d..]);
    out.extend(z[..d].iter().map(|v| -v));
    out
}

/// Random invertible matrix with entries in `[-scale, scale]` whose smallest
/// singular value is at least `min_sv`; when `right_regular` is set, `A12` and
/// `A22` have smallest singular value at least `min_sv` as well.
pub fn random_block<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    scale: f64,
    min_sv: f64,
    right_regular: bool,
) -> BlockMatrix {
    loop {
        let m = DMatrix::from_fn(2 * d, 2 * d, |_, _| rng.gen_range(-scale..=scale));
        if m.clone().singular_values().min() < min_sv {
            continue;
        }
        let Ok(a) = BlockMatrix::from_entries(m) else {
            continue;
        };
        if right_regular
            && (a.a12().singular_values().min() < min_sv
                || a.a22().singular_values().min() < min_sv)
        {
            continue;
        }
        return a;
    }
}
