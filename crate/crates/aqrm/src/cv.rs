//! Continuous Wigner functions of boson-reduced states on a rectangular
//! (q, p) grid, assembled from the Weyl transforms of the Fock transition
//! operators |n⟩⟨n′|, and the Wigner logarithmic negativity (bosonic mana).
//!
//! Transition fields are evaluated in polar form (r² = q² + p²,
//! φ = atan2(p, q)):
//!
//! ```text
//! W_{|n⟩⟨n′|}(r, φ) = (−1)^n/(4π) √(n!/n′!) (2r²)^{(n′−n)/2}
//!                     e^{−r²} L_n^{n′−n}(2r²) e^{−i(n′−n)φ}      (n ≤ n′)
//! ```
//!
//! with the n > n′ field the complex conjugate. The assembled field is
//! renormalized to ∫W dq dp = 1, which pins the overall constant against the
//! closed-form diagonal Wigner function (−1)ⁿ/π · e^{−r²} L_n(2r²); the
//! negativity is then log₂ ∫|W| dq dp. Quadrature is plain node summation on
//! the uniform grid (the integrand is smooth and exponentially localized).
//!
//! Factorial ratios are combined in log space, and the Gaussian e^{−r²} is
//! folded into the seeds of the three-term upward Laguerre recurrence so no
//! intermediate overflows for the supported orders.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::sync::OnceLock;

use crate::reduction::BosonDensity;
use crate::{CMat, Error, Result};

/// Largest Fock index accepted by the transition-field evaluator; the scaled
/// recurrence and log-space prefactors are overflow-safe through this order.
pub const MAX_TRANSITION_ORDER: usize = 400;
/// Default grid spacing.
pub const DEFAULT_SPACING: f64 = 0.05;
/// Default margin added to the support radius √(2·n_eff + 1).
pub const DEFAULT_MARGIN: f64 = 4.0;
/// Diagonal weight captured when choosing the effective Fock cutoff.
pub const WEIGHT_CAPTURE: f64 = 1.0 - 1e-8;
/// Assembly fails if the imaginary residue of the field exceeds this.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-6;

/// Uniform rectangular sampling grid, symmetric about the origin with
/// inclusive endpoints: q_i = −q_max + i·dq, dq = 2q_max/(n_q − 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGrid {
    q_max: f64,
    p_max: f64,
    n_q: usize,
    n_p: usize,
}

impl PhaseSpaceGrid {
    pub fn new(q_max: f64, p_max: f64, n_q: usize, n_p: usize) -> Result<Self> {
        if !(q_max > 0.0 && p_max > 0.0 && q_max.is_finite() && p_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "extents must be positive and finite, got ({q_max}, {p_max})"
            )));
        }
        if n_q < 2 || n_p < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 samples per axis, got ({n_q}, {n_p})"
            )));
        }
        Ok(Self {
            q_max,
            p_max,
            n_q,
            n_p,
        })
    }

    /// Symmetric square grid with an odd sample count so the origin is a node.
    pub fn square(extent: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        let half = (extent / spacing).ceil().max(1.0) as usize;
        let n = 2 * half + 1;
        Self::new(extent, extent, n, n)
    }

    /// Default grid for a boson state: the extent covers the support radius
    /// of the smallest Fock cutoff holding all but 1e-8 of the weight, plus
    /// a Gaussian-tail margin.
    pub fn for_density(rho: &BosonDensity, spacing: f64, margin: f64) -> Result<Self> {
        let n_eff = effective_cutoff(rho);
        let extent = (2.0 * n_eff as f64 + 1.0).sqrt() + margin;
        Self::square(extent, spacing)
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn dq(&self) -> f64 {
        2.0 * self.q_max / (self.n_q - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * self.p_max / (self.n_p - 1) as f64
    }

    pub fn q_at(&self, i: usize) -> f64 {
        -self.q_max + i as f64 * self.dq()
    }

    pub fn p_at(&self, j: usize) -> f64 {
        -self.p_max + j as f64 * self.dp()
    }

    /// Area element of the node quadrature.
    pub fn cell_area(&self) -> f64 {
        self.dq() * self.dp()
    }

    fn len(&self) -> usize {
        self.n_q * self.n_p
    }
}

/// Smallest Fock index n with Σ_{m ≤ n} ρ(m,m) ≥ 1 − 1e-8.
pub fn effective_cutoff(rho: &BosonDensity) -> usize {
    let mut acc = 0.0;
    for n in 0..rho.dim() {
        acc += rho.matrix()[(n, n)].re;
        if acc >= WEIGHT_CAPTURE {
            return n;
        }
    }
    rho.dim() - 1
}

/// Whether a field has been scaled so ∫W dq dp = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Raw,
    Renormalized,
}

/// Real-valued Wigner samples over a [`PhaseSpaceGrid`], row-major in
/// (q index, p index).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    grid: PhaseSpaceGrid,
    samples: Vec<f64>,
    normalization: Normalization,
}

impl WignerField {
    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn value(&self, i_q: usize, j_p: usize) -> f64 {
        self.samples[i_q * self.grid.n_p + j_p]
    }

    /// ∫ W dq dp by node summation.
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// ∫ |W| dq dp by node summation.
    pub fn abs_integral(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_area()
    }

    /// Fraction of the |W| mass carried by nodes in the outermost 5% ring of
    /// the grid; values above ~1% mean the extent is too small.
    pub fn edge_mass_fraction(&self) -> f64 {
        let total: f64 = self.samples.iter().map(|v| v.abs()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let mut edge = 0.0;
        for i in 0..self.grid.n_q {
            let fq = self.grid.q_at(i).abs() / self.grid.q_max;
            for j in 0..self.grid.n_p {
                let fp = self.grid.p_at(j).abs() / self.grid.p_max;
                if fq >= 0.95 || fp >= 0.95 {
                    edge += self.value(i, j).abs();
                }
            }
        }
        edge / total
    }

    /// Wigner logarithmic negativity log₂ ∫|W| dq dp of a renormalized
    /// field, clamped at zero against grid noise.
    pub fn log_negativity(&self) -> Result<f64> {
        if self.normalization != Normalization::Renormalized {
            return Err(Error::Inconsistent(
                "log negativity requires a renormalized field".into(),
            ));
        }
        let nu = self.abs_integral().log2();
        if nu < -1e-9 {
            return Err(Error::Inconsistent(format!(
                "negativity {nu:.3e} below the grid-noise floor; field is not normalized"
            )));
        }
        Ok(nu.max(0.0))
    }

    /// Write the field as a CSV matrix (rows = ascending q, columns =
    /// ascending p) with `#`-prefixed header lines recording the grid
    /// geometry and normalization state.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# wigner-field")?;
        writeln!(
            out,
            "# q_max={} p_max={} n_q={} n_p={} dq={} dp={}",
            self.grid.q_max,
            self.grid.p_max,
            self.grid.n_q,
            self.grid.n_p,
            self.grid.dq(),
            self.grid.dp()
        )?;
        let norm = match self.normalization {
            Normalization::Raw => "raw",
            Normalization::Renormalized => "renormalized",
        };
        writeln!(out, "# normalization={norm}")?;
        for i in 0..self.grid.n_q {
            let row: Vec<String> = (0..self.grid.n_p)
                .map(|j| format!("{}", self.value(i, j)))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0.0; MAX_TRANSITION_ORDER + 2];
        for k in 1..t.len() {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    });
    table[n]
}

/// Gaussian-scaled associated Laguerre values M_k = L_k^α(x) e^{−x/2} for
/// k = 0..=k_max, by the three-term upward recurrence (the scale commutes
/// with the linear recurrence and keeps intermediates bounded).
fn scaled_laguerre_column(alpha: f64, x: f64, k_max: usize, out: &mut Vec<f64>) {
    out.clear();
    let seed = (-0.5 * x).exp();
    out.push(seed);
    if k_max == 0 {
        return;
    }
    out.push((1.0 + alpha - x) * seed);
    for k in 1..k_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
}

const INV_4PI: f64 = 1.0 / (4.0 * std::f64::consts::PI);

/// Amplitude of the (k, k+Δ) transition field at radius² = half of x,
/// excluding the e^{−iΔφ} phase: (−1)^k/(4π) √(k!/(k+Δ)!) x^{Δ/2} M_k(x)
/// with the Gaussian already inside M.
fn transition_amplitude(k: usize, delta: usize, x: f64, m_k: f64) -> f64 {
    let ln_ratio = 0.5 * (ln_factorial(k) - ln_factorial(k + delta));
    let ln_power = if delta == 0 {
        0.0
    } else if x == 0.0 {
        return 0.0;
    } else {
        0.5 * delta as f64 * x.ln()
    };
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * INV_4PI * (ln_ratio + ln_power).exp() * m_k
}

fn check_order(n: usize, np: usize) -> Result<()> {
    if n > MAX_TRANSITION_ORDER || np > MAX_TRANSITION_ORDER {
        return Err(Error::InvalidGrid(format!(
            "transition order ({n}, {np}) exceeds the supported bound {MAX_TRANSITION_ORDER}"
        )));
    }
    Ok(())
}

/// Weyl transform of the transition operator |n⟩⟨n′| sampled on the grid
/// (raw 1/4π convention, complex; diagonal fields are real).
pub fn wigner_transition(n: usize, np: usize, grid: &PhaseSpaceGrid) -> Result<Vec<C64>> {
    check_order(n, np)?;
    let (lo, delta, conj) = if n <= np {
        (n, np - n, false)
    } else {
        (np, n - np, true)
    };
    let mut field = vec![C64::new(0.0, 0.0); grid.len()];
    let n_p = grid.n_p;
    field.par_chunks_mut(n_p).enumerate().for_each(|(i, row)| {
        let q = grid.q_at(i);
        let mut lag = Vec::with_capacity(lo + 1);
        for (j, slot) in row.iter_mut().enumerate() {
            let p = grid.p_at(j);
            let r2 = q * q + p * p;
            let x = 2.0 * r2;
            scaled_laguerre_column(delta as f64, x, lo, &mut lag);
            let amp = transition_amplitude(lo, delta, x, lag[lo]);
            let phi = p.atan2(q);
            let phase = C64::new(0.0, -(delta as f64) * phi).exp();
            let v = phase * amp;
            *slot = if conj { v.conj() } else { v };
        }
    });
    Ok(field)
}

/// Raw Wigner field of an arbitrary coefficient matrix in the Fock basis,
/// W = Σ_{n,n′} C_{n,n′} W_{|n⟩⟨n′|}. The imaginary part must be residue
/// (≤ 1e-6, expected ~1e-9 for Hermitian input); it is checked and dropped.
pub fn wigner_of_matrix(mat: &CMat, grid: &PhaseSpaceGrid) -> Result<WignerField> {
    let nb = mat.nrows();
    if nb != mat.ncols() {
        return Err(Error::Inconsistent(
            "coefficient matrix must be square".into(),
        ));
    }
    if nb == 0 {
        return Err(Error::Inconsistent("empty coefficient matrix".into()));
    }
    check_order(nb - 1, nb - 1)?;

    // band list: for each Δ, the k with a non-negligible C[k, k+Δ] or C[k+Δ, k]
    let floor = 1e-15;
    let mut bands: Vec<(usize, Vec<(usize, C64, C64)>)> = Vec::new();
    for delta in 0..nb {
        let mut terms = Vec::new();
        for k in 0..nb - delta {
            let upper = mat[(k, k + delta)];
            let lower = mat[(k + delta, k)];
            if upper.norm() > floor || lower.norm() > floor {
                terms.push((k, upper, lower));
            }
        }
        if !terms.is_empty() {
            bands.push((delta, terms));
        }
    }

    let n_p = grid.n_p;
    let mut raw = vec![C64::new(0.0, 0.0); grid.len()];
    raw.par_chunks_mut(n_p).enumerate().for_each(|(i, row)| {
        let q = grid.q_at(i);
        let mut lag = Vec::new();
        for (j, slot) in row.iter_mut().enumerate() {
            let p = grid.p_at(j);
            let r2 = q * q + p * p;
            let x = 2.0 * r2;
            let phi = p.atan2(q);
            let mut acc = C64::new(0.0, 0.0);
            for (delta, terms) in &bands {
                let k_max = terms.last().map(|t| t.0).unwrap_or(0);
                scaled_laguerre_column(*delta as f64, x, k_max, &mut lag);
                let phase = C64::new(0.0, -(*delta as f64) * phi).exp();
                for &(k, upper, lower) in terms {
                    let amp = transition_amplitude(k, *delta, x, lag[k]);
                    if *delta == 0 {
                        acc += upper * amp;
                    } else {
                        // C[k,k+Δ]·W_{|k⟩⟨k+Δ|} + C[k+Δ,k]·conj(W_{|k⟩⟨k+Δ|})
                        acc += (upper * phase + lower * phase.conj()) * amp;
                    }
                }
            }
            *slot = acc;
        }
    });

    let max_imag = raw.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    if max_imag > IMAG_RESIDUE_LIMIT {
        return Err(Error::Inconsistent(format!(
            "Wigner field has imaginary residue {max_imag:.3e}; coefficient matrix is not Hermitian"
        )));
    }
    Ok(WignerField {
        grid: *grid,
        samples: raw.iter().map(|z| z.re).collect(),
        normalization: Normalization::Raw,
    })
}

/// Quantum amplitude bound in the ∫W dq dp = 1 convention.
const WIGNER_BOUND: f64 = std::f64::consts::FRAC_1_PI;

/// Wigner function of a boson density matrix, renormalized to ∫W dq dp = 1.
pub fn wigner_of_density(rho: &BosonDensity, grid: &PhaseSpaceGrid) -> Result<WignerField> {
    let mut field = wigner_of_matrix(rho.matrix(), grid)?;
    let mass = field.integral();
    if !(mass.is_finite() && mass > 1e-3) {
        return Err(Error::Inconsistent(format!(
            "raw field mass {mass:.3e} is too small to renormalize; grid extent is likely wrong"
        )));
    }
    let scale = 1.0 / mass;
    for v in &mut field.samples {
        *v *= scale;
    }
    field.normalization = Normalization::Renormalized;
    let max_abs = field.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs > WIGNER_BOUND + 1e-6 {
        return Err(Error::Inconsistent(format!(
            "renormalized field exceeds the 1/π amplitude bound: {max_abs:.6}"
        )));
    }
    Ok(field)
}

/// Closed-form Fock-state Wigner function (−1)ⁿ/π · e^{−r²} L_n(2r²),
/// normalized to ∫W dq dp = 1; the independent check for the diagonal
/// transition fields.
pub fn fock_wigner_closed_form(n: usize, q: f64, p: f64) -> f64 {
    let x = 2.0 * (q * q + p * p);
    let mut lag = Vec::with_capacity(n + 1);
    scaled_laguerre_column(0.0, x, n, &mut lag);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * std::f64::consts::FRAC_1_PI * lag[n]
}
