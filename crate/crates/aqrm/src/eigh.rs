//! Crate-internal dense Hermitian eigensolver.
//!
//! Thin wrapper over faer's self-adjoint EVD, run strictly sequentially so
//! that a single decomposition is deterministic and the sweep layer owns all
//! parallelism. Returns raw (unordered-contract-free) eigenpairs; ordering,
//! gauge fixing, and labeling live in [`crate::spectral`].

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors, SelfAdjointEvdParams};
use faer::{MatMut, MatRef, Par, Spec};
use num_complex::Complex64 as C64;

use crate::{CMat, Error, Result};

/// Eigendecomposition of a Hermitian matrix: eigenvalues (nondecreasing as
/// produced by the backend) and eigenvectors as matching columns.
pub(crate) fn eigh(mat: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols(), "eigh requires a square matrix");
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let a: MatRef<'_, C64> = MatRef::from_column_major_slice(mat.as_slice(), n, n);
    let par = Par::Seq;
    let params = Spec::<SelfAdjointEvdParams, C64>::default();
    let mut s = faer::diag::Diag::<C64>::zeros(n);
    let mut vecs = CMat::zeros(n, n);
    let u: MatMut<'_, C64> = MatMut::from_column_major_slice_mut(vecs.as_mut_slice(), n, n);
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<C64>(
        n,
        ComputeEigenvectors::Yes,
        par,
        params,
    ));
    evd::self_adjoint_evd(a, s.as_mut(), Some(u), par, MemStack::new(&mut buf), params)
        .map_err(|e| Error::Eigensolver(format!("{e:?} (dim {n})")))?;
    let vals = (0..n).map(|k| s[k].re).collect();
    Ok((vals, vecs))
}

/// Eigenvalues only (used for positivity checks where vectors are not needed).
pub(crate) fn eigvalsh(mat: &CMat) -> Result<Vec<f64>> {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols(), "eigvalsh requires a square matrix");
    if n == 0 {
        return Ok(Vec::new());
    }
    let a: MatRef<'_, C64> = MatRef::from_column_major_slice(mat.as_slice(), n, n);
    let par = Par::Seq;
    let params = Spec::<SelfAdjointEvdParams, C64>::default();
    let mut s = faer::diag::Diag::<C64>::zeros(n);
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<C64>(
        n,
        ComputeEigenvectors::No,
        par,
        params,
    ));
    evd::self_adjoint_evd(a, s.as_mut(), None, par, MemStack::new(&mut buf), params)
        .map_err(|e| Error::Eigensolver(format!("{e:?} (dim {n})")))?;
    Ok((0..n).map(|k| s[k].re).collect())
}
