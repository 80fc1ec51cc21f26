//! Discrete-phase-space magic quantifiers on qubit (and odd-prime qudit)
//! density matrices: Heisenberg-Weyl displacements, discrete Wigner tables,
//! sum negativity, mana, the Dai-Fu-Luo witness, and von Neumann entropy.
//!
//! Conventions, fixed once here:
//! - τ = −exp(iπ/d); the phase operator is Z = Σ τ^{2j} |j⟩⟨j| and the shift
//!   X = Σ |j+1 mod d⟩⟨j|, so D_{k,l} = τ^{kl} X^k Z^l; for d = 2 these are
//!   the Pauli matrices and D_{1,1} = −Y.
//! - Wigner tables are normalized to Σ_{k,l} W(k,l) = 1. For d = 2 this is
//!   W(k,l) = ½·tr(ρ Ŵ_{k,l}) with the kernel of the selected convention;
//!   for odd prime d it is W(k,l) = (1/d)·tr(ρ D_{k,l} P_d D_{k,l}†) with
//!   the discrete parity P_d = (1/d) Σ D_{k,l}.
//! - Mana uses log base 2; entropy uses the natural log.
//!
//! Table entries in (−1e-14, 0) are treated as zero so stabilizer states get
//! exactly zero mana under floating-point noise.

use num_complex::Complex64 as C64;

use crate::reduction::{bloch_vector, BlochVector, QubitDensity};
use crate::{CMat, Error, Result};

/// Negative table entries above this threshold count as zero.
pub const NEGATIVITY_FLOOR: f64 = -1e-14;

/// Which discrete Wigner kernel produced a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Default d = 2 kernel: ½[1 + (−1)^l X + (−1)^{k+l+1} Y + (−1)^k Z].
    Marchiolli,
    /// Alternative d = 2 kernel with the opposite Y sign.
    Wootters,
    /// Displaced-parity phase-point operators for odd prime d.
    OddPrimePpo,
}

/// Real d×d quasi-probability table over Z_d × Z_d, normalized to Σ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteWignerTable {
    d: usize,
    values: Vec<f64>, // row-major in (k, l)
    convention: Convention,
}

impl DiscreteWignerTable {
    fn new(d: usize, values: Vec<f64>, convention: Convention) -> Result<Self> {
        debug_assert_eq!(values.len(), d * d);
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Inconsistent(format!(
                "Wigner table sums to {sum}, expected 1"
            )));
        }
        if values.iter().any(|v| !(-1.0..=1.0).contains(v)) {
            return Err(Error::Inconsistent(
                "Wigner table entry outside [−1, 1]".into(),
            ));
        }
        Ok(Self {
            d,
            values,
            convention,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn value(&self, k: usize, l: usize) -> f64 {
        self.values[k * self.d + l]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Σ_l W(k, l): the computational-basis probability ⟨k|ρ|k⟩ for
    /// odd-prime phase-point tables.
    pub fn position_marginal(&self, k: usize) -> f64 {
        (0..self.d).map(|l| self.value(k, l)).sum()
    }
}

/// Total weight of the negative table entries (entries above
/// [`NEGATIVITY_FLOOR`] count as zero).
pub fn sum_negativity(table: &DiscreteWignerTable) -> f64 {
    table
        .values
        .iter()
        .filter(|&&v| v < NEGATIVITY_FLOOR)
        .map(|v| -v)
        .sum()
}

/// Mana = log₂(2·sn + 1), the logarithmic negativity of the table.
pub fn mana(table: &DiscreteWignerTable) -> f64 {
    (2.0 * sum_negativity(table) + 1.0).log2()
}

fn is_odd_prime(d: usize) -> bool {
    if d < 3 || d % 2 == 0 {
        return false;
    }
    let mut f = 3;
    while f * f <= d {
        if d % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Generalized shift operator X = Σ |j+1 mod d⟩⟨j|.
fn shift_op(d: usize) -> CMat {
    let mut x = CMat::zeros(d, d);
    for j in 0..d {
        x[((j + 1) % d, j)] = C64::new(1.0, 0.0);
    }
    x
}

/// Generalized phase operator Z = Σ τ^{2j} |j⟩⟨j| with τ = −e^{iπ/d}.
fn phase_op(d: usize) -> CMat {
    let tau = tau(d);
    let mut z = CMat::zeros(d, d);
    for j in 0..d {
        z[(j, j)] = tau.powu(2 * j as u32);
    }
    z
}

fn tau(d: usize) -> C64 {
    -C64::new(0.0, std::f64::consts::PI / d as f64).exp()
}

/// Discrete displacement D_{k,l} = τ^{kl} X^k Z^l on Z_d × Z_d.
pub fn heisenberg_weyl(d: usize, k: usize, l: usize) -> Result<CMat> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if k >= d || l >= d {
        return Err(Error::IndexOutOfRange { d, k, l });
    }
    let tau_kl = tau(d).powu((k * l) as u32);
    let x = shift_op(d);
    let z = phase_op(d);
    let mut xk = CMat::identity(d, d);
    for _ in 0..k {
        xk = &x * xk;
    }
    let mut zl = CMat::identity(d, d);
    for _ in 0..l {
        zl = &z * zl;
    }
    Ok(xk * zl * tau_kl)
}

/// Discrete parity P_d = (1/d) Σ_{k,l} D_{k,l} (odd prime d only).
pub fn discrete_parity(d: usize) -> Result<CMat> {
    if !is_odd_prime(d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut p = CMat::zeros(d, d);
    for k in 0..d {
        for l in 0..d {
            p += heisenberg_weyl(d, k, l)?;
        }
    }
    Ok(p / C64::new(d as f64, 0.0))
}

fn qubit_kernel(k: usize, l: usize, convention: Convention) -> CMat {
    let sx = [[0.0, 1.0], [1.0, 0.0]];
    let sz = [[1.0, -0.0], [0.0, -1.0]];
    let y_sign = match convention {
        Convention::Marchiolli => -1.0, // (−1)^{k+l+1}
        Convention::Wootters => 1.0,    // (−1)^{k+l}
        Convention::OddPrimePpo => unreachable!("qubit kernel has no PPO form"),
    };
    let fx = if l % 2 == 0 { 1.0 } else { -1.0 };
    let fy = y_sign * (if (k + l) % 2 == 0 { 1.0 } else { -1.0 });
    let fz = if k % 2 == 0 { 1.0 } else { -1.0 };
    CMat::from_fn(2, 2, |i, j| {
        let eye = if i == j { 1.0 } else { 0.0 };
        let y = match (i, j) {
            (0, 1) => C64::new(0.0, -1.0),
            (1, 0) => C64::new(0.0, 1.0),
            _ => C64::new(0.0, 0.0),
        };
        (C64::new(eye + fx * sx[i][j] + fz * sz[i][j], 0.0) + y * fy) * 0.5
    })
}

/// Discrete Wigner table of a qubit state: W(k,l) = ½·tr(ρ Ŵ_{k,l}).
pub fn discrete_wigner_qubit(
    rho: &QubitDensity,
    convention: Convention,
) -> Result<DiscreteWignerTable> {
    if convention == Convention::OddPrimePpo {
        return Err(Error::UnsupportedDimension(2));
    }
    let dense = rho.to_dense();
    let mut values = Vec::with_capacity(4);
    for k in 0..2 {
        for l in 0..2 {
            let w = qubit_kernel(k, l, convention);
            values.push(trace_product(&dense, &w).re * 0.5);
        }
    }
    DiscreteWignerTable::new(2, values, convention)
}

/// Discrete Wigner table of a qudit state via displaced-parity phase-point
/// operators: W(k,l) = (1/d)·tr(ρ D_{k,l} P_d D_{k,l}†). Requires odd prime d.
pub fn discrete_wigner_qudit(rho: &CMat, d: usize) -> Result<DiscreteWignerTable> {
    if !is_odd_prime(d) {
        return Err(Error::UnsupportedDimension(d));
    }
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::InvalidDensity(format!(
            "density matrix is {}×{}, expected {d}×{d}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    validate_density(rho)?;
    let parity = discrete_parity(d)?;
    let mut values = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            let disp = heisenberg_weyl(d, k, l)?;
            let ppo = &disp * &parity * disp.adjoint();
            values.push(trace_product(rho, &ppo).re / d as f64);
        }
    }
    DiscreteWignerTable::new(d, values, Convention::OddPrimePpo)
}

fn validate_density(rho: &CMat) -> Result<()> {
    let d = rho.nrows();
    let tr: C64 = (0..d).map(|i| rho[(i, i)]).sum();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::InvalidDensity(format!(
            "trace is {}, expected 1",
            tr.re
        )));
    }
    if crate::model::hermiticity_deviation(rho) > crate::model::HERMITICITY_TOL {
        return Err(Error::InvalidDensity("matrix is not Hermitian".into()));
    }
    let eigs = crate::eigh::eigvalsh(rho)?;
    if eigs.iter().any(|&e| e < -1e-10) {
        return Err(Error::InvalidDensity("negative eigenvalue".into()));
    }
    Ok(())
}

fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr += a[(i, j)] * b[(j, i)];
        }
    }
    tr
}

/// Dai-Fu-Luo witness M = Σ_{k,l ∈ Z₂} |tr(ρ D_{k,l})|, evaluated through
/// the displacement traces. M > 2 signals non-stabilizerness for a qubit.
pub fn dai_fu_luo(rho: &QubitDensity) -> f64 {
    let dense = rho.to_dense();
    let mut m = 0.0;
    for k in 0..2 {
        for l in 0..2 {
            let disp = heisenberg_weyl(2, k, l).expect("Z₂ indices are in range");
            m += trace_product(&dense, &disp).norm();
        }
    }
    m
}

/// Von Neumann entropy S = −Σ λ ln λ (natural log, 0·ln 0 = 0) of a density
/// matrix of any dimension.
pub fn von_neumann_entropy(rho: &CMat) -> Result<f64> {
    validate_density(rho)?;
    let eigs = crate::eigh::eigvalsh(rho)?;
    Ok(entropy_from_eigenvalues(&eigs))
}

fn entropy_from_eigenvalues(eigs: &[f64]) -> f64 {
    eigs.iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Both sides of the witness–entropy relation for parity-symmetric
/// (z-diagonal) qubit states, M(s) = 1 + |s| vs 1 − dS/d|s| = 1 + arctanh|s|,
/// together with the cubic bound on their gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessEntropyRelation {
    /// M evaluated through the displacement traces.
    pub witness: f64,
    /// 1 − dS/d|s| = 1 + arctanh(|s|).
    pub entropy_slope_form: f64,
    /// |s|³, which bounds |witness − entropy_slope_form| for |s| ≤ 0.5.
    pub bound: f64,
}

/// Evaluate the witness–entropy relation. Rejects states that are not
/// diagonal in z (|s_x| + |s_y| > 1e-8).
pub fn witness_entropy_relation(rho: &QubitDensity) -> Result<WitnessEntropyRelation> {
    let s = bloch_vector(rho);
    if s.x.abs() + s.y.abs() > 1e-8 {
        return Err(Error::InvalidDensity(format!(
            "state is not z-diagonal: |s_x| + |s_y| = {:.3e}",
            s.x.abs() + s.y.abs()
        )));
    }
    let r = s.norm();
    Ok(WitnessEntropyRelation {
        witness: dai_fu_luo(rho),
        entropy_slope_form: 1.0 + r.atanh(),
        bound: r.powi(3),
    })
}

/// The maximally magical single-qubit reference states.
#[derive(Debug, Clone)]
pub struct ReferenceStates {
    /// The four face-diagonal projectors of the x–z plane,
    /// s = (±1/√2, 0, ±1/√2).
    pub h_states: [QubitDensity; 4],
    /// The body-diagonal projector, s = (1, 1, 1)/√3.
    pub t_state: QubitDensity,
}

/// Construct the reference projectors.
pub fn reference_states() -> ReferenceStates {
    let inv2 = std::f64::consts::FRAC_1_SQRT_2;
    let inv3 = 1.0 / 3.0f64.sqrt();
    let mk = |x: f64, z: f64| QubitDensity::from_bloch(x, 0.0, z).expect("unit Bloch vector");
    ReferenceStates {
        h_states: [
            mk(inv2, inv2),
            mk(inv2, -inv2),
            mk(-inv2, inv2),
            mk(-inv2, -inv2),
        ],
        t_state: QubitDensity::from_bloch(inv3, inv3, inv3).expect("unit Bloch vector"),
    }
}

/// Mana of the x–z face-diagonal reference state, log₂((1 + √2)/2).
pub fn mana_h_reference() -> f64 {
    ((1.0 + std::f64::consts::SQRT_2) / 2.0).log2()
}

/// All resource quantifiers of one qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicReport {
    pub mana: f64,
    pub sum_negativity: f64,
    pub dai_fu_luo: f64,
    pub entropy: f64,
    pub bloch: BlochVector,
}

impl MagicReport {
    /// The witness signals non-stabilizerness above 2.
    pub fn is_magic(&self) -> bool {
        self.dai_fu_luo > 2.0
    }
}

/// Evaluate every quantifier with the default (Marchiolli) kernel.
pub fn magic_report(rho: &QubitDensity) -> Result<MagicReport> {
    let table = discrete_wigner_qubit(rho, Convention::Marchiolli)?;
    let sn = sum_negativity(&table);
    let (lo, hi) = rho.eigenvalues();
    Ok(MagicReport {
        mana: (2.0 * sn + 1.0).log2(),
        sum_negativity: sn,
        dai_fu_luo: dai_fu_luo(rho),
        entropy: entropy_from_eigenvalues(&[lo.max(0.0), hi]),
        bloch: bloch_vector(rho),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn max_abs(m: &CMat) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn qubit_displacements_are_paulis() {
        let x = heisenberg_weyl(2, 1, 0).unwrap();
        assert_abs_diff_eq!(x[(0, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[(1, 0)].re, 1.0, epsilon = 1e-15);
        let z = heisenberg_weyl(2, 0, 1).unwrap();
        assert_abs_diff_eq!(z[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z[(1, 1)].re, -1.0, epsilon = 1e-15);
        // D_{1,1} = τ XZ = −Y
        let d11 = heisenberg_weyl(2, 1, 1).unwrap();
        assert_abs_diff_eq!(d11[(0, 1)].im, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d11[(1, 0)].im, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d11[(0, 0)].norm(), 0.0, epsilon = 1e-15);
        // identity at the origin
        let d00 = heisenberg_weyl(2, 0, 0).unwrap();
        assert_abs_diff_eq!(max_abs(&(d00 - CMat::identity(2, 2))), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn displacements_unitary_d3() {
        for k in 0..3 {
            for l in 0..3 {
                let d = heisenberg_weyl(3, k, l).unwrap();
                let dev = max_abs(&(&d * d.adjoint() - CMat::identity(3, 3)));
                assert!(dev <= 1e-14, "D_{{{k},{l}}} not unitary: {dev:.2e}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range_indices() {
        assert!(matches!(
            heisenberg_weyl(3, 3, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(heisenberg_weyl(1, 0, 0).is_err());
    }

    #[test]
    fn qubit_table_of_computational_zero() {
        let rho = QubitDensity::from_bloch(0.0, 0.0, 1.0).unwrap();
        let t = discrete_wigner_qubit(&rho, Convention::Marchiolli).unwrap();
        assert_abs_diff_eq!(t.value(0, 0), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(t.value(0, 1), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(t.value(1, 0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.value(1, 1), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn qubit_table_of_h_state() {
        let refs = reference_states();
        let t = discrete_wigner_qubit(&refs.h_states[0], Convention::Marchiolli).unwrap();
        let sqrt2 = std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(t.value(0, 0), (1.0 + sqrt2) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.value(0, 1), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(t.value(1, 0), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(t.value(1, 1), (1.0 - sqrt2) / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn kernels_agree_in_xz_plane() {
        let inv2 = std::f64::consts::FRAC_1_SQRT_2;
        for (x, z) in [(0.6, 0.2), (-0.4, 0.7), (0.0, -0.9), (inv2, inv2)] {
            let rho = QubitDensity::from_bloch(x, 0.0, z).unwrap();
            let a = discrete_wigner_qubit(&rho, Convention::Marchiolli).unwrap();
            let b = discrete_wigner_qubit(&rho, Convention::Wootters).unwrap();
            for k in 0..2 {
                for l in 0..2 {
                    assert_abs_diff_eq!(a.value(k, l), b.value(k, l), epsilon = 1e-12);
                }
            }
        }
        // with s_y ≠ 0 the kernels genuinely differ
        let rho = QubitDensity::from_bloch(0.0, 0.8, 0.0).unwrap();
        let a = discrete_wigner_qubit(&rho, Convention::Marchiolli).unwrap();
        let b = discrete_wigner_qubit(&rho, Convention::Wootters).unwrap();
        assert!((a.value(0, 0) - b.value(0, 0)).abs() > 0.1);
    }

    #[test]
    fn golden_negativities() {
        let refs = reference_states();
        let sqrt2 = std::f64::consts::SQRT_2;
        let sqrt3 = 3.0f64.sqrt();
        let t_h = discrete_wigner_qubit(&refs.h_states[0], Convention::Marchiolli).unwrap();
        assert_abs_diff_eq!(sum_negativity(&t_h), (sqrt2 - 1.0) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(mana(&t_h), 0.271553, epsilon = 1e-6);
        assert_abs_diff_eq!(mana(&t_h), mana_h_reference(), epsilon = 1e-15);
        let t_t = discrete_wigner_qubit(&refs.t_state, Convention::Marchiolli).unwrap();
        assert_abs_diff_eq!(sum_negativity(&t_t), (sqrt3 - 1.0) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            mana(&t_t),
            (1.0 + (sqrt3 - 1.0) / 2.0).log2(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(mana(&t_t), 0.449984, epsilon = 1e-6);
        // stabilizer state: exactly zero
        let zero = QubitDensity::from_bloch(0.0, 0.0, 1.0).unwrap();
        let t0 = discrete_wigner_qubit(&zero, Convention::Marchiolli).unwrap();
        assert_eq!(sum_negativity(&t0), 0.0);
        assert_eq!(mana(&t0), 0.0);
    }

    #[test]
    fn witness_golden_values() {
        let refs = reference_states();
        let mixed = QubitDensity::from_bloch(0.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(dai_fu_luo(&mixed), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            dai_fu_luo(&refs.h_states[0]),
            1.0 + std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            dai_fu_luo(&refs.t_state),
            1.0 + 3.0f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(refs.h_states.iter().all(|h| {
            let r = magic_report(h).unwrap();
            r.is_magic() && (r.mana - mana_h_reference()).abs() < 1e-12
        }));
    }

    #[test]
    fn qudit_uniform_table() {
        let rho = CMat::identity(3, 3) / C64::new(3.0, 0.0);
        let t = discrete_wigner_qudit(&rho, 3).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                assert_abs_diff_eq!(t.value(k, l), 1.0 / 9.0, epsilon = 1e-14);
            }
        }
        assert_eq!(sum_negativity(&t), 0.0);
    }

    #[test]
    fn qudit_stabilizer_state_nonnegative() {
        let mut rho = CMat::zeros(3, 3);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let t = discrete_wigner_qudit(&rho, 3).unwrap();
        for v in t.values() {
            assert!(*v >= -1e-14);
        }
        assert_eq!(sum_negativity(&t), 0.0);
        assert_eq!(mana(&t), 0.0);
    }

    #[test]
    fn qudit_strange_state_is_negative() {
        // the −1 eigenvector of the discrete parity maximizes negativity
        let p = discrete_parity(3).unwrap();
        let (vals, vecs) = crate::eigh::eigh(&p).unwrap();
        let k_min = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
        assert_abs_diff_eq!(vals[k_min], -1.0, epsilon = 1e-12);
        let v = vecs.column(k_min).into_owned();
        let rho = CMat::from_fn(3, 3, |i, j| v[i] * v[j].conj());
        let t = discrete_wigner_qudit(&rho, 3).unwrap();
        assert!(sum_negativity(&t) > 0.1);
        assert_abs_diff_eq!(t.value(0, 0), -1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn qudit_marginals_give_basis_probabilities() {
        for d in [3usize, 5] {
            // a fixed non-trivial pure state
            let mut v =
                crate::CVec::from_fn(d, |i, _| C64::new(1.0 + i as f64, (i as f64) * 0.3 - 0.2));
            v /= C64::new(v.norm(), 0.0);
            let rho = CMat::from_fn(d, d, |i, j| v[i] * v[j].conj());
            let t = discrete_wigner_qudit(&rho, d).unwrap();
            let total: f64 = t.values().iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            for k in 0..d {
                assert_abs_diff_eq!(t.position_marginal(k), rho[(k, k)].re, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn rejects_even_or_composite_qudit_dimension() {
        let rho4 = CMat::identity(4, 4) / C64::new(4.0, 0.0);
        assert!(matches!(
            discrete_wigner_qudit(&rho4, 4),
            Err(Error::UnsupportedDimension(4))
        ));
        let rho9 = CMat::identity(9, 9) / C64::new(9.0, 0.0);
        assert!(matches!(
            discrete_wigner_qudit(&rho9, 9),
            Err(Error::UnsupportedDimension(9))
        ));
    }

    #[test]
    fn entropy_values() {
        let pure = QubitDensity::from_bloch(0.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            von_neumann_entropy(&pure.to_dense()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let mixed = QubitDensity::from_bloch(0.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            von_neumann_entropy(&mixed.to_dense()).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-12
        );
        let half = QubitDensity::from_bloch(0.0, 0.0, 0.5).unwrap();
        let expected = -(0.75f64.ln() * 0.75 + 0.25f64.ln() * 0.25);
        assert_abs_diff_eq!(
            von_neumann_entropy(&half.to_dense()).unwrap(),
            expected,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(expected, 0.562335, epsilon = 1e-6);
    }

    #[test]
    fn witness_entropy_relation_closed_forms() {
        let at = |s: f64| {
            witness_entropy_relation(&QubitDensity::from_bloch(0.0, 0.0, s).unwrap()).unwrap()
        };
        let r0 = at(0.0);
        assert_abs_diff_eq!(r0.witness, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r0.entropy_slope_form, 1.0, epsilon = 1e-14);
        let r3 = at(0.3);
        assert_abs_diff_eq!(r3.witness, 1.3, epsilon = 1e-12);
        assert_abs_diff_eq!(r3.entropy_slope_form, 1.30952, epsilon = 1e-5);
        assert!((r3.witness - r3.entropy_slope_form).abs() <= r3.bound);
        assert_abs_diff_eq!(r3.bound, 0.027, epsilon = 1e-12);
        let r5 = at(0.5);
        assert_abs_diff_eq!(r5.witness, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r5.entropy_slope_form, 1.54931, epsilon = 1e-5);
        assert!((r5.witness - r5.entropy_slope_form).abs() <= r5.bound);
    }

    #[test]
    fn witness_entropy_relation_rejects_off_axis() {
        let rho = QubitDensity::from_bloch(0.3, 0.0, 0.4).unwrap();
        assert!(witness_entropy_relation(&rho).is_err());
    }

    #[test]
    fn reference_state_geometry() {
        let refs = reference_states();
        for h in &refs.h_states {
            let (lo, hi) = h.eigenvalues();
            assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-14);
            let s = bloch_vector(h);
            assert_abs_diff_eq!(s.x.abs(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
            assert_abs_diff_eq!(s.y, 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(s.z.abs(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        }
        let s = bloch_vector(&refs.t_state);
        let inv3 = 1.0 / 3.0f64.sqrt();
        assert_abs_diff_eq!(s.x, inv3, epsilon = 1e-14);
        assert_abs_diff_eq!(s.y, inv3, epsilon = 1e-14);
        assert_abs_diff_eq!(s.z, inv3, epsilon = 1e-14);
    }

    #[test]
    fn stabilizer_octahedron_has_zero_mana() {
        // 100-point sweep of the |s_x| + |s_z| ≤ 1 cross-section
        for i in 0..10 {
            for j in 0..10 {
                let x = -0.9 + 0.2 * i as f64;
                let budget = 1.0 - x.abs();
                let z = -budget + 2.0 * budget * (j as f64) / 9.0;
                let rho = QubitDensity::from_bloch(x, 0.0, z).unwrap();
                let t = discrete_wigner_qubit(&rho, Convention::Marchiolli).unwrap();
                assert_eq!(
                    mana(&t),
                    0.0,
                    "mana ≠ 0 inside the octahedron at ({x}, {z})"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn witness_identity_matches_bloch_sum(
            x in -0.7f64..0.7,
            y in -0.7f64..0.7,
            z in -0.7f64..0.7,
        ) {
            prop_assume!((x * x + y * y + z * z).sqrt() <= 1.0);
            let rho = QubitDensity::from_bloch(x, y, z).unwrap();
            let direct = dai_fu_luo(&rho);
            let from_bloch = 1.0 + x.abs() + y.abs() + z.abs();
            prop_assert!((direct - from_bloch).abs() <= 1e-12);
        }

        #[test]
        fn mana_invariant_under_xz_symmetries(
            x in -0.99f64..0.99,
            z in -0.99f64..0.99,
        ) {
            prop_assume!((x * x + z * z).sqrt() <= 1.0);
            let m = |sx: f64, sz: f64| {
                let rho = QubitDensity::from_bloch(sx, 0.0, sz).unwrap();
                mana(&discrete_wigner_qubit(&rho, Convention::Marchiolli).unwrap())
            };
            let base = m(x, z);
            for (sx, sz) in [
                (x, z), (-x, z), (x, -z), (-x, -z),
                (z, x), (-z, x), (z, -x), (-z, -x),
            ] {
                prop_assert!((m(sx, sz) - base).abs() <= 1e-12);
            }
        }

        #[test]
        fn tables_normalized_for_random_states(
            x in -0.99f64..0.99,
            y in -0.99f64..0.99,
            z in -0.99f64..0.99,
        ) {
            prop_assume!((x * x + y * y + z * z).sqrt() <= 1.0);
            let rho = QubitDensity::from_bloch(x, y, z).unwrap();
            for conv in [Convention::Marchiolli, Convention::Wootters] {
                let t = discrete_wigner_qubit(&rho, conv).unwrap();
                let sum: f64 = t.values().iter().sum();
                prop_assert!((sum - 1.0).abs() <= 1e-12);
            }
        }
    }
}
