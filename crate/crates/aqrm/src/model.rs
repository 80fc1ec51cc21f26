//! Operators of the asymmetric quantum Rabi model in the truncated
//! Fock ⊗ qubit basis.
//!
//! The Hamiltonian is, in units where ħ = 1,
//!
//! ```text
//! H = ω a†a + Δ Z + g (a σ₊ + a† σ₋) + g ξ (a σ₋ + a† σ₊) + ε X
//! ```
//!
//! with boson frequency ω, qubit splitting 2Δ, rotating coupling g,
//! counter-rotating coupling gξ, and bias ε. The anisotropy ξ ∈ [0, 1]
//! interpolates from the Jaynes-Cummings limit (ξ = 0) to the quantum Rabi
//! limit (ξ = 1), where the coupling takes the familiar form g (a + a†) X.
//!
//! Pauli operators use the ±1 eigenvalue normalization (Z = diag(1, −1)).
//! The conserved excitation number is Λ = a†a + Z/2 + ½·1, with integer
//! eigenvalues (n + 1 on |n, ↑⟩ and n on |n, ↓⟩), so the parity
//! Π = exp(iπΛ) squares to the identity and is a genuine Z₂ generator:
//! [Π, H] = 0 whenever ε = 0, and additionally [Λ, H] = 0 at ξ = 0.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

use crate::eigh::eigh;
use crate::{CMat, Error, Result};

/// Qubit projection along z. `Up` is the +1 eigenstate of Pauli Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Truncated Fock ⊗ qubit product basis.
///
/// States are enumerated in interleaved order, spin-up before spin-down at
/// each Fock index: `index(n, s) = 2n + s`, giving total dimension
/// `2 (n_max + 1)`. The ordering is fixed so that eigenvector coefficient
/// files are portable across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedBasis {
    n_max: usize,
}

impl TruncatedBasis {
    /// Basis truncated at Fock index `n_max` (must be ≥ 1).
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidBasis(format!(
                "n_max must be at least 1, got {n_max}"
            )));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of Fock levels kept, `n_max + 1`.
    pub fn boson_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Total dimension `2 (n_max + 1)`.
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// Flat index of the product state `|n⟩ ⊗ |s⟩`.
    pub fn index(&self, n: usize, s: Spin) -> usize {
        debug_assert!(n <= self.n_max);
        2 * n
            + match s {
                Spin::Up => 0,
                Spin::Down => 1,
            }
    }

    /// Inverse of [`TruncatedBasis::index`].
    pub fn state_at(&self, index: usize) -> (usize, Spin) {
        debug_assert!(index < self.dim());
        let s = if index % 2 == 0 { Spin::Up } else { Spin::Down };
        (index / 2, s)
    }
}

/// The five Hamiltonian parameters, all in energy units of ω.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Boson frequency ω > 0; sets the energy unit.
    pub omega: f64,
    /// Half the qubit splitting (the qubit frequency is 2Δ).
    pub delta: f64,
    /// Coupling strength g ≥ 0.
    pub g: f64,
    /// Bias ε (any sign).
    pub epsilon: f64,
    /// Anisotropy ξ ∈ [0, 1].
    pub xi: f64,
}

impl ModelParams {
    pub fn new(omega: f64, delta: f64, g: f64, epsilon: f64, xi: f64) -> Result<Self> {
        let p = Self {
            omega,
            delta,
            g,
            epsilon,
            xi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.omega, self.delta, self.g, self.epsilon, self.xi];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite parameter in {self:?}"
            )));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega must be > 0, got {}",
                self.omega
            )));
        }
        if !(0.0..=1.0).contains(&self.xi) {
            return Err(Error::InvalidParams(format!(
                "xi must be in [0, 1], got {}",
                self.xi
            )));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParams(format!(
                "g must be ≥ 0, got {}",
                self.g
            )));
        }
        Ok(())
    }

    /// Boson–qubit detuning δ = ω − 2Δ.
    pub fn detuning(&self) -> f64 {
        self.omega - 2.0 * self.delta
    }
}

/// Which basis an operator is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    /// Full Fock ⊗ qubit space with the given truncation.
    Joint { n_max: usize },
    /// Boson-only sub-basis.
    Boson { n_max: usize },
    /// Qubit-only sub-basis.
    Qubit,
    /// No particular basis attached.
    Generic,
}

/// Dense Hermitian operator; construction verifies Hermiticity to 1e-12
/// entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp {
    mat: CMat,
    basis: BasisTag,
}

/// Absolute entrywise tolerance for the Hermiticity invariant.
pub const HERMITICITY_TOL: f64 = 1e-12;

impl HermitianOp {
    pub fn new(mat: CMat, basis: BasisTag) -> Result<Self> {
        let max_dev = hermiticity_deviation(&mat);
        if max_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_dev });
        }
        Ok(Self { mat, basis })
    }

    /// Wrap a matrix known Hermitian by construction (symmetric assembly).
    fn new_exact(mat: CMat, basis: BasisTag) -> Self {
        debug_assert!(hermiticity_deviation(&mat) <= HERMITICITY_TOL);
        Self { mat, basis }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Real expectation value ⟨ψ|A|ψ⟩.
    pub fn expectation(&self, state: &crate::CVec) -> f64 {
        (state.adjoint() * &self.mat * state)[(0, 0)].re
    }
}

/// Max |A_ij − conj(A_ji)| over all entries.
pub fn hermiticity_deviation(mat: &CMat) -> f64 {
    let n = mat.nrows();
    let mut max_dev = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            let dev = (mat[(i, j)] - mat[(j, i)].conj()).norm();
            max_dev = max_dev.max(dev);
        }
    }
    max_dev
}

fn kron_boson_qubit(b: &CMat, q: &Matrix2<C64>) -> CMat {
    // interleaved ordering (qubit fastest) is exactly kron(boson, qubit)
    b.kronecker(&DMatrix::from_fn(2, 2, |i, j| q[(i, j)]))
}

fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn pauli_x() -> Matrix2<C64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

fn pauli_z() -> Matrix2<C64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

fn sigma_plus() -> Matrix2<C64> {
    // |↑⟩⟨↓|
    Matrix2::new(ZERO, ONE, ZERO, ZERO)
}

fn sigma_minus() -> Matrix2<C64> {
    Matrix2::new(ZERO, ZERO, ONE, ZERO)
}

/// Boson-space annihilation operator with hard truncation: a|n⟩ = √n |n−1⟩.
pub fn boson_annihilation(basis: &TruncatedBasis) -> CMat {
    let nb = basis.boson_dim();
    let mut a = CMat::zeros(nb, nb);
    for n in 1..nb {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Annihilation and creation operators on the joint space, acting as the
/// identity on the qubit factor. The creation operator is the matrix adjoint
/// of the truncated annihilation operator, so a†|n_max⟩ = 0.
pub fn ladder_operators(basis: &TruncatedBasis) -> (CMat, CMat) {
    let a_b = boson_annihilation(basis);
    let eye = Matrix2::identity();
    let a = kron_boson_qubit(&a_b, &eye);
    let a_dag = a.adjoint();
    (a, a_dag)
}

/// The AQRM Hamiltonian (see module docs for the convention).
pub fn hamiltonian(params: &ModelParams, basis: &TruncatedBasis) -> HermitianOp {
    let nb = basis.boson_dim();
    let a_b = boson_annihilation(basis);
    let adag_b = a_b.adjoint();
    let n_b = &adag_b * &a_b;
    let eye_b = identity(nb);
    let eye_q = Matrix2::identity();

    let mut h = kron_boson_qubit(&n_b, &eye_q) * C64::new(params.omega, 0.0);
    h += kron_boson_qubit(&eye_b, &pauli_z()) * C64::new(params.delta, 0.0);
    h += kron_boson_qubit(&eye_b, &pauli_x()) * C64::new(params.epsilon, 0.0);
    // rotating g (a σ₊ + a† σ₋) and counter-rotating g ξ (a σ₋ + a† σ₊)
    let rot = kron_boson_qubit(&a_b, &sigma_plus()) + kron_boson_qubit(&adag_b, &sigma_minus());
    let cnt = kron_boson_qubit(&a_b, &sigma_minus()) + kron_boson_qubit(&adag_b, &sigma_plus());
    h += rot * C64::new(params.g, 0.0);
    h += cnt * C64::new(params.g * params.xi, 0.0);
    HermitianOp::new_exact(
        h,
        BasisTag::Joint {
            n_max: basis.n_max(),
        },
    )
}

/// Excitation number Λ = a†a + Z/2 + ½·1, diagonal with integer eigenvalues
/// n + 1 on |n, ↑⟩ and n on |n, ↓⟩.
pub fn excitation_number(basis: &TruncatedBasis) -> HermitianOp {
    let dim = basis.dim();
    let mut lam = CMat::zeros(dim, dim);
    for idx in 0..dim {
        let (n, s) = basis.state_at(idx);
        let v = match s {
            Spin::Up => n as f64 + 1.0,
            Spin::Down => n as f64,
        };
        lam[(idx, idx)] = C64::new(v, 0.0);
    }
    HermitianOp::new_exact(
        lam,
        BasisTag::Joint {
            n_max: basis.n_max(),
        },
    )
}

/// Parity Π = exp(iπΛ), computed spectrally from the excitation number.
///
/// Λ has integer spectrum, so Π is unitary, Hermitian, and squares to the
/// identity; it generates the Z₂ symmetry of the ε = 0 model.
pub fn parity_operator(basis: &TruncatedBasis) -> Result<HermitianOp> {
    let lam = excitation_number(basis);
    let pi_gen = lam.matrix() * C64::new(std::f64::consts::PI, 0.0);
    let u = unitary_from_hermitian_generator(&pi_gen)?;
    // eigenvalues e^{iπk} are ±1 up to roundoff; drop the imaginary dust
    let dim = u.nrows();
    let herm = CMat::from_fn(dim, dim, |i, j| {
        C64::new(0.5 * (u[(i, j)] + u[(j, i)].conj()).re, 0.0)
    });
    HermitianOp::new(
        herm,
        BasisTag::Joint {
            n_max: basis.n_max(),
        },
    )
}

/// U = exp(iK) for Hermitian K, via spectral decomposition rather than a
/// truncated series.
pub fn unitary_from_hermitian_generator(k: &CMat) -> Result<CMat> {
    let (vals, vecs) = eigh(k)?;
    let n = k.nrows();
    let mut scaled = vecs.clone();
    for (j, &lam) in vals.iter().enumerate() {
        let phase = C64::new(0.0, lam).exp();
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    Ok(scaled * vecs.adjoint())
}

/// One Jaynes-Cummings doublet: the eigenvalues of the 2×2 excitation block
/// and the mixing angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcDoublet {
    pub e_minus: f64,
    pub e_plus: f64,
    /// θ_Λ = atan2(2g√Λ, 2Δ − ω); π/2 at resonance for any g > 0.
    pub mixing_angle: f64,
}

/// Closed-form doublet of the ξ = 0 model in the excitation sector Λ ≥ 1,
/// spanned by {|Λ−1, ↑⟩, |Λ, ↓⟩}:
///
/// ```text
/// E±(Λ) = ω(Λ − ½) ± √((Δ − ω/2)² + g²Λ)
/// ```
pub fn jc_doublet(params: &ModelParams, lambda: u32) -> Result<JcDoublet> {
    if params.xi != 0.0 {
        return Err(Error::AnisotropyMismatch {
            required: 0.0,
            got: params.xi,
        });
    }
    if lambda < 1 {
        return Err(Error::InvalidParams(format!(
            "excitation number must be ≥ 1, got {lambda}"
        )));
    }
    let lam = f64::from(lambda);
    let mean = params.omega * (lam - 0.5);
    let half_gap = params.delta - 0.5 * params.omega;
    let coupling = params.g * lam.sqrt();
    let split = (half_gap * half_gap + coupling * coupling).sqrt();
    let mixing_angle = (2.0 * coupling).atan2(2.0 * params.delta - params.omega);
    Ok(JcDoublet {
        e_minus: mean - split,
        e_plus: mean + split,
        mixing_angle,
    })
}

/// The model conjugated into the polaron frame,
/// H′ = U† H U with U = exp[−(g/ω) X (a† − a)].
///
/// U is built by spectral exponentiation of the displacement generator, so
/// the spectrum of H′ matches the spectrum of H to machine precision; at
/// Δ = 0 the primed Hamiltonian is diagonal in the displaced basis with
/// eigenvalues ωn − g²/ω ± ε.
pub fn polaron_hamiltonian(params: &ModelParams, basis: &TruncatedBasis) -> Result<HermitianOp> {
    if params.xi != 1.0 {
        return Err(Error::AnisotropyMismatch {
            required: 1.0,
            got: params.xi,
        });
    }
    let nb = basis.boson_dim();
    let a_b = boson_annihilation(basis);
    let gen_b = a_b.adjoint() - &a_b; // a† − a, anti-Hermitian
    let x_full = kron_boson_qubit(&identity(nb), &pauli_x());
    let gen = &x_full
        * kron_boson_qubit(&gen_b, &Matrix2::identity())
        * C64::new(-params.g / params.omega, 0.0);
    // exp(S) for anti-Hermitian S, via the Hermitian generator K = −iS
    let k = &gen * C64::new(0.0, -1.0);
    let u = unitary_from_hermitian_generator(&k)?;
    let h = hamiltonian(params, basis);
    let transformed = u.adjoint() * h.matrix() * &u;
    // symmetrize away the ~1e-14 conjugation roundoff
    let dim = transformed.nrows();
    let herm = CMat::from_fn(dim, dim, |i, j| {
        0.5 * (transformed[(i, j)] + transformed[(j, i)].conj())
    });
    HermitianOp::new(
        herm,
        BasisTag::Joint {
            n_max: basis.n_max(),
        },
    )
}
