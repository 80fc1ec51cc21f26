//! Reduction of pure joint eigenstates to qubit and boson density matrices,
//! Bloch-sphere coordinates, and simple boson observables.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

use crate::model::{hermiticity_deviation, Spin, TruncatedBasis, HERMITICITY_TOL};
use crate::{CMat, CVec, Error, Result};

/// Reduced 2×2 qubit density matrix (trace 1, Hermitian, positive
/// semidefinite; eigenvalues below −1e-12 are rejected, never clipped).
#[derive(Debug, Clone, PartialEq)]
pub struct QubitDensity {
    mat: Matrix2<C64>,
}

impl QubitDensity {
    pub fn new(mat: Matrix2<C64>) -> Result<Self> {
        let tr = (mat[(0, 0)] + mat[(1, 1)]).re;
        let tr_im = (mat[(0, 0)] + mat[(1, 1)]).im;
        if (tr - 1.0).abs() > 1e-12 || tr_im.abs() > 1e-12 {
            return Err(Error::InvalidDensity(format!(
                "qubit trace is {tr}{tr_im:+e}i, expected 1"
            )));
        }
        let herm_dev = (mat[(0, 1)] - mat[(1, 0)].conj())
            .norm()
            .max(mat[(0, 0)].im.abs().max(mat[(1, 1)].im.abs()));
        if herm_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_dev: herm_dev });
        }
        let (lo, _) = eigenvalues_2x2(&mat);
        if lo < -1e-12 {
            return Err(Error::InvalidDensity(format!(
                "qubit density has negative eigenvalue {lo:.3e}"
            )));
        }
        Ok(Self { mat })
    }

    /// ρ = ½(1 + s·σ) for a Bloch vector with |s| ≤ 1.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let half = C64::new(0.5, 0.0);
        let mat = Matrix2::new(
            half * (1.0 + z),
            half * C64::new(x, -y),
            half * C64::new(x, y),
            half * (1.0 - z),
        );
        Self::new(mat)
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.mat
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        eigenvalues_2x2(&self.mat)
    }

    pub fn to_dense(&self) -> CMat {
        CMat::from_fn(2, 2, |i, j| self.mat[(i, j)])
    }
}

fn eigenvalues_2x2(m: &Matrix2<C64>) -> (f64, f64) {
    let a = m[(0, 0)].re;
    let b = m[(1, 1)].re;
    let c = m[(0, 1)].norm();
    let mid = 0.5 * (a + b);
    let rad = (0.25 * (a - b) * (a - b) + c * c).sqrt();
    (mid - rad, mid + rad)
}

/// Reduced boson density matrix on the truncated Fock space (trace 1 to
/// 1e-10, Hermitian, PSD; eigenvalues below −1e-10 are rejected).
#[derive(Debug, Clone, PartialEq)]
pub struct BosonDensity {
    mat: CMat,
}

impl BosonDensity {
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidDensity("boson density must be square".into()));
        }
        let tr: C64 = (0..mat.nrows()).map(|i| mat[(i, i)]).sum();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!(
                "boson trace is {}, expected 1",
                tr.re
            )));
        }
        let herm_dev = hermiticity_deviation(&mat);
        if herm_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_dev: herm_dev });
        }
        let eigs = crate::eigh::eigvalsh(&mat)?;
        let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        if lo < -1e-10 {
            return Err(Error::InvalidDensity(format!(
                "boson density has negative eigenvalue {lo:.3e}"
            )));
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut e = crate::eigh::eigvalsh(&self.mat)?;
        e.sort_by(f64::total_cmp);
        Ok(e)
    }
}

/// Bloch vector s_i = tr(ρ σ_i) with the spherical convention
/// cos θ = s_z/|s|, φ = atan2(s_y, s_x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn theta(&self) -> f64 {
        let n = self.norm();
        if n == 0.0 {
            0.0
        } else {
            (self.z / n).clamp(-1.0, 1.0).acos()
        }
    }

    pub fn phi(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

fn require_normalized(state: &CVec) -> Result<()> {
    let dev = (state.norm() - 1.0).abs();
    if dev > 1e-8 {
        return Err(Error::NotNormalized { dev });
    }
    Ok(())
}

fn require_dim(state: &CVec, basis: &TruncatedBasis) -> Result<()> {
    if state.len() != basis.dim() {
        return Err(Error::InvalidBasis(format!(
            "state length {} does not match basis dimension {}",
            state.len(),
            basis.dim()
        )));
    }
    Ok(())
}

/// Trace out the boson: ρ_S[s, s'] = Σ_n C_{n,s} C̄_{n,s'}.
pub fn trace_out_boson(state: &CVec, basis: &TruncatedBasis) -> Result<QubitDensity> {
    require_dim(state, basis)?;
    require_normalized(state)?;
    let spins = [Spin::Up, Spin::Down];
    let mut mat = Matrix2::zeros();
    for (i, &si) in spins.iter().enumerate() {
        for (j, &sj) in spins.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for n in 0..=basis.n_max() {
                acc += state[basis.index(n, si)] * state[basis.index(n, sj)].conj();
            }
            mat[(i, j)] = acc;
        }
    }
    QubitDensity::new(mat)
}

/// Trace out the qubit: ρ_B[n, n'] = Σ_s C_{n,s} C̄_{n',s}.
pub fn trace_out_qubit(state: &CVec, basis: &TruncatedBasis) -> Result<BosonDensity> {
    require_dim(state, basis)?;
    require_normalized(state)?;
    let nb = basis.boson_dim();
    let mut mat = CMat::zeros(nb, nb);
    for n in 0..nb {
        for np in 0..nb {
            let mut acc = C64::new(0.0, 0.0);
            for s in [Spin::Up, Spin::Down] {
                acc += state[basis.index(n, s)] * state[basis.index(np, s)].conj();
            }
            mat[(n, np)] = acc;
        }
    }
    BosonDensity::new(mat)
}

/// Bloch vector of a qubit density matrix.
pub fn bloch_vector(rho: &QubitDensity) -> BlochVector {
    let m = rho.matrix();
    BlochVector {
        x: (m[(0, 1)] + m[(1, 0)]).re,
        y: (m[(1, 0)] - m[(0, 1)]).im,
        z: (m[(0, 0)] - m[(1, 1)]).re,
    }
}

/// Mean boson number ⟨a†a⟩ = Σ_n n ρ_B[n, n].
pub fn mean_boson_number(rho: &BosonDensity) -> f64 {
    (0..rho.dim())
        .map(|n| n as f64 * rho.matrix()[(n, n)].re)
        .sum()
}
