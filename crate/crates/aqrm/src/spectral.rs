//! Dense Hermitian eigendecomposition with deterministic output: ascending
//! energies, symmetry-resolved degeneracies, fixed eigenvector phase gauge,
//! truncation-convergence flags, and parity labels.

use num_complex::Complex64 as C64;

use crate::eigh::eigh;
use crate::model::{
    excitation_number, hamiltonian, parity_operator, BasisTag, HermitianOp, ModelParams,
    TruncatedBasis,
};
use crate::{CMat, CVec, Error, Result};

/// Relative residual bound enforced on every eigenpair: ‖Hv − Ev‖∞ ≤ RESIDUAL_TOL·‖H‖∞.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Default tail-weight bound for the truncation-convergence criterion.
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-6;
/// A state gets a parity label only when |⟨Π⟩| exceeds 1 − PARITY_LABEL_TOL.
pub const PARITY_LABEL_TOL: f64 = 1e-6;

/// Result of diagonalizing a Hermitian operator.
///
/// Energies are ascending; exact degeneracies are resolved by ascending ⟨Λ̂⟩
/// and then ⟨Ẑ⟩ (when the operator lives in the joint model basis), and each
/// eigenvector's phase is fixed by making its largest-magnitude coefficient
/// real positive. States with `converged = false` must be excluded from
/// downstream resource calculations.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    energies: Vec<f64>,
    states: CMat,
    converged: Vec<bool>,
    parity: Vec<Option<i8>>,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, k: usize) -> f64 {
        self.energies[k]
    }

    /// Eigenvectors as matrix columns aligned with `energies`.
    pub fn states(&self) -> &CMat {
        &self.states
    }

    /// Owned copy of the k-th eigenvector.
    pub fn state(&self, k: usize) -> CVec {
        self.states.column(k).into_owned()
    }

    pub fn converged(&self) -> &[bool] {
        &self.converged
    }

    pub fn parity(&self) -> &[Option<i8>] {
        &self.parity
    }
}

/// Full eigendecomposition of a Hermitian operator.
///
/// When the operator carries the joint-basis tag, degenerate clusters are
/// rotated to diagonalize the excitation number Λ̂ (and Ẑ for any remaining
/// ties) so that conserved quantum numbers survive exact crossings and the
/// output is reproducible. Convergence flags default to `true` and parity
/// labels to `None`; use [`solve`] for the full model pipeline.
pub fn diagonalize(h: &HermitianOp) -> Result<EigenSolution> {
    let (vals, vecs) = eigh(h.matrix())?;
    let n = vals.len();

    // ascending energy order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let energies: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut states = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        states.set_column(dst, &vecs.column(src));
    }

    if let BasisTag::Joint { n_max } = h.basis() {
        let basis = TruncatedBasis::new(n_max)?;
        resolve_degeneracies(&energies, &mut states, &basis)?;
    }
    fix_phase_gauge(&mut states);
    check_residuals(h.matrix(), &energies, &states)?;

    Ok(EigenSolution {
        converged: vec![true; n],
        parity: vec![None; n],
        energies,
        states,
    })
}

/// Energy difference below which two levels are treated as degenerate.
fn degeneracy_tol(energies: &[f64]) -> f64 {
    let scale = energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    1e-10 * scale
}

/// Rotate each degenerate cluster to diagonalize Λ̂ restricted to it, then Ẑ
/// for clusters still tied in ⟨Λ̂⟩. Both operators commute with Π̂, so the
/// rotation respects parity sectors whenever the symmetry is present.
fn resolve_degeneracies(energies: &[f64], states: &mut CMat, basis: &TruncatedBasis) -> Result<()> {
    let n = energies.len();
    let tol = degeneracy_tol(energies);
    let lam = excitation_number(basis);
    let z_diag: Vec<f64> = (0..basis.dim())
        .map(|i| match basis.state_at(i).1 {
            crate::model::Spin::Up => 1.0,
            crate::model::Spin::Down => -1.0,
        })
        .collect();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && energies[end] - energies[end - 1] <= tol {
            end += 1;
        }
        if end - start > 1 {
            rotate_cluster_by(states, start, end, |v| lam.matrix() * v)?;
            // refine remaining ⟨Λ̂⟩ ties by ⟨Ẑ⟩
            let lam_exp: Vec<f64> = (start..end)
                .map(|k| real_expectation(lam.matrix(), &states.column(k).into_owned()))
                .collect();
            let mut s2 = 0;
            while s2 < lam_exp.len() {
                let mut e2 = s2 + 1;
                while e2 < lam_exp.len() && (lam_exp[e2] - lam_exp[e2 - 1]).abs() <= 1e-8 {
                    e2 += 1;
                }
                if e2 - s2 > 1 {
                    rotate_cluster_by(states, start + s2, start + e2, |v| {
                        CVec::from_iterator(v.len(), v.iter().zip(&z_diag).map(|(c, z)| c * *z))
                    })?;
                }
                s2 = e2;
            }
        }
        start = end;
    }
    Ok(())
}

fn real_expectation(op: &CMat, v: &CVec) -> f64 {
    (v.adjoint() * op * v)[(0, 0)].re
}

/// Diagonalize the projection of a Hermitian operator onto the span of
/// columns `start..end`, replacing them with the sorted eigenbasis.
fn rotate_cluster_by(
    states: &mut CMat,
    start: usize,
    end: usize,
    op_apply: impl Fn(&CVec) -> CVec,
) -> Result<()> {
    let k = end - start;
    let dim = states.nrows();
    let cols: Vec<CVec> = (start..end)
        .map(|c| states.column(c).into_owned())
        .collect();
    let images: Vec<CVec> = cols.iter().map(&op_apply).collect();
    let mut proj = CMat::zeros(k, k);
    for (i, ci) in cols.iter().enumerate() {
        for (j, mj) in images.iter().enumerate() {
            proj[(i, j)] = ci.dotc(mj);
        }
    }
    // symmetrize projection roundoff before the dense solve
    let proj = CMat::from_fn(k, k, |i, j| 0.5 * (proj[(i, j)] + proj[(j, i)].conj()));
    let (pvals, pvecs) = eigh(&proj)?;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| pvals[i].total_cmp(&pvals[j]));
    let mut rotated = CMat::zeros(dim, k);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = CVec::zeros(dim);
        for (i, ci) in cols.iter().enumerate() {
            col += ci * pvecs[(i, src)];
        }
        rotated.set_column(dst, &col);
    }
    for (offset, c) in (start..end).enumerate() {
        states.set_column(c, &rotated.column(offset));
    }
    Ok(())
}

/// Make the largest-magnitude coefficient of each column real positive
/// (first index wins on exact magnitude ties).
fn fix_phase_gauge(states: &mut CMat) {
    let (dim, cols) = (states.nrows(), states.ncols());
    for c in 0..cols {
        let mut best = 0;
        let mut best_mag = 0.0f64;
        for i in 0..dim {
            let mag = states[(i, c)].norm();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag > 0.0 {
            let phase = states[(best, c)] / C64::new(best_mag, 0.0);
            let rot = phase.conj();
            for i in 0..dim {
                states[(i, c)] *= rot;
            }
        }
    }
}

fn check_residuals(h: &CMat, energies: &[f64], states: &CMat) -> Result<()> {
    let n = energies.len();
    let hnorm = (0..n)
        .map(|i| (0..n).map(|j| h[(i, j)].norm()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let hv = h * states;
    for (k, &e) in energies.iter().enumerate() {
        let mut res = 0.0f64;
        for i in 0..n {
            res = res.max((hv[(i, k)] - states[(i, k)] * e).norm());
        }
        if res > RESIDUAL_TOL * hnorm {
            return Err(Error::Eigensolver(format!(
                "eigenpair {k} residual {res:.3e} exceeds {RESIDUAL_TOL:.0e}·‖H‖∞"
            )));
        }
    }
    Ok(())
}

/// Default number of top Fock layers inspected by the convergence criterion.
pub fn default_tail_levels(basis: &TruncatedBasis) -> usize {
    (basis.n_max().div_ceil(10)).max(2)
}

/// Truncation-convergence test: the total probability weight carried by the
/// highest `tail_levels` Fock layers (both spin components) must not exceed
/// `tol`.
pub fn check_convergence(
    state: &CVec,
    basis: &TruncatedBasis,
    tail_levels: usize,
    tol: f64,
) -> bool {
    let n_max = basis.n_max();
    let lowest_tail_n = n_max.saturating_sub(tail_levels.saturating_sub(1));
    let mut weight = 0.0;
    for idx in 0..basis.dim() {
        let (n, _) = basis.state_at(idx);
        if n >= lowest_tail_n {
            weight += state[idx].norm_sqr();
        }
    }
    weight <= tol
}

/// Parity label from ⟨Π̂⟩: ±1 when the expectation is within
/// [`PARITY_LABEL_TOL`] of ±1, `None` otherwise (e.g. ε ≠ 0 eigenstates).
pub fn parity_label(state: &CVec, parity_op: &HermitianOp) -> Option<i8> {
    let exp = parity_op.expectation(state);
    if exp > 1.0 - PARITY_LABEL_TOL {
        Some(1)
    } else if exp < -(1.0 - PARITY_LABEL_TOL) {
        Some(-1)
    } else {
        None
    }
}

/// Options for the model solve pipeline.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Number of top Fock layers for the convergence criterion;
    /// `None` selects `max(2, ⌈n_max/10⌉)`.
    pub tail_levels: Option<usize>,
    /// Tail-weight bound.
    pub convergence_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tail_levels: None,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
        }
    }
}

/// Build the Hamiltonian, diagonalize, attach convergence flags and parity
/// labels.
pub fn solve(
    params: &ModelParams,
    basis: &TruncatedBasis,
    opts: &SolveOptions,
) -> Result<EigenSolution> {
    let h = hamiltonian(params, basis);
    let mut sol = diagonalize(&h)?;
    let tail = opts
        .tail_levels
        .unwrap_or_else(|| default_tail_levels(basis));
    let pi = parity_operator(basis)?;
    for k in 0..sol.len() {
        let state = sol.state(k);
        sol.converged[k] = check_convergence(&state, basis, tail, opts.convergence_tol);
        sol.parity[k] = parity_label(&state, &pi);
    }
    Ok(sol)
}

/// Truncation policy for [`solve_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NMaxPolicy {
    Fixed(usize),
    /// Start at `start`, double until the requested states converge, stop at `cap`.
    Adaptive {
        start: usize,
        cap: usize,
    },
}

impl Default for NMaxPolicy {
    fn default() -> Self {
        NMaxPolicy::Adaptive {
            start: 40,
            cap: 400,
        }
    }
}

/// A solved model together with the truncation that produced it.
#[derive(Debug, Clone)]
pub struct SolvedModel {
    pub solution: EigenSolution,
    pub basis: TruncatedBasis,
}

/// Solve under the given truncation policy. `requested` maps a solution to
/// the state indices that must be converged; the truncation is doubled until
/// they all are (or the cap is reached, in which case the flags simply stay
/// false and the caller decides what to do with the unconverged rows).
pub fn solve_adaptive(
    params: &ModelParams,
    policy: NMaxPolicy,
    opts: &SolveOptions,
    requested: impl Fn(&EigenSolution) -> Vec<usize>,
) -> Result<SolvedModel> {
    match policy {
        NMaxPolicy::Fixed(n_max) => {
            let basis = TruncatedBasis::new(n_max)?;
            let solution = solve(params, &basis, opts)?;
            Ok(SolvedModel { solution, basis })
        }
        NMaxPolicy::Adaptive { start, cap } => {
            if start < 1 || cap < start {
                return Err(Error::InvalidParams(format!(
                    "adaptive policy requires 1 ≤ start ≤ cap, got start {start}, cap {cap}"
                )));
            }
            let mut n_max = start;
            loop {
                let basis = TruncatedBasis::new(n_max)?;
                let solution = solve(params, &basis, opts)?;
                let wanted = requested(&solution);
                let all_ok = wanted
                    .iter()
                    .all(|&k| solution.converged.get(k).copied().unwrap_or(false));
                if all_ok || n_max >= cap {
                    return Ok(SolvedModel { solution, basis });
                }
                n_max = (n_max * 2).min(cap);
            }
        }
    }
}
