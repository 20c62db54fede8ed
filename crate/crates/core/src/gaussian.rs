//! Gaussian-state calculus on covariance matrices.
//!
//! Conventions used everywhere in this crate:
//!
//! - quadratures are ordered `(x_1, p_1, x_2, p_2, ...)`;
//! - the symplectic form is `Ω = ⊕ [[0, 1], [-1, 0]]`;
//! - variances are in shot-noise units, so the vacuum has covariance `I`.
//!
//! First moments are never tracked. Entropies and the conditional states used
//! for key rates depend on second moments only.

use nalgebra::{Complex, DMatrix, Matrix2};

use crate::error::{invalid, numerical, Result};

/// Elementwise tolerance for `SΩSᵀ = Ω`.
pub const SYMPLECTIC_TOL: f64 = 1e-12;
/// Elementwise tolerance for covariance-matrix symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Symplectic eigenvalues in `[1 - PHYSICAL_TOL, 1)` are treated as exactly 1.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Arguments of [`g_function`] in `[-G_CLAMP_TOL, 0)` are treated as 0.
pub const G_CLAMP_TOL: f64 = 1e-12;

// Relative mismatch allowed between +ν and -ν when pairing the spectrum of iΩγ.
const PAIRING_TOL: f64 = 1e-8;

/// Quadrature second moments of an `N`-mode Gaussian state.
///
/// Construction only checks the shape (square, even, non-empty). Symmetry and
/// the uncertainty bound are checked by [`validate_cm`], so deliberately
/// broken matrices can still be diagnosed.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(invalid(format!("covariance matrix is not square: {rows}x{cols}")));
        }
        if rows == 0 || rows % 2 != 0 {
            return Err(invalid(format!(
                "covariance matrix dimension must be a positive even number, got {rows}"
            )));
        }
        Ok(Self { entries })
    }

    /// Builds a matrix from row-major entries of a `dim x dim` matrix.
    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn n_modes(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    /// The 2x2 block coupling mode `i` (rows) to mode `j` (columns).
    pub fn block(&self, i: usize, j: usize) -> Matrix2<f64> {
        self.entries.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
    }

    /// Tensor product of two uncorrelated states: `self ⊕ other`.
    pub fn direct_sum(&self, other: &CovarianceMatrix) -> CovarianceMatrix {
        let (n, m) = (self.dim(), other.dim());
        let mut out = DMatrix::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&self.entries);
        out.view_mut((n, n), (m, m)).copy_from(&other.entries);
        CovarianceMatrix { entries: out }
    }

    /// Largest elementwise difference to `other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &CovarianceMatrix) -> f64 {
        if self.entries.shape() != other.entries.shape() {
            return f64::INFINITY;
        }
        (&self.entries - &other.entries).amax()
    }
}

/// A linear symplectic map on `N` modes.
///
/// The matrix acts on quadrature row vectors, `rᵀ ↦ rᵀS`, so a covariance
/// matrix transforms as `SᵀγS` (see [`apply_symplectic`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    entries: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Checks `SΩSᵀ = Ω` elementwise within [`SYMPLECTIC_TOL`].
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(invalid(format!(
                "symplectic matrix must be square with positive even dimension, got {rows}x{cols}"
            )));
        }
        let omega = symplectic_form(rows / 2);
        let defect = (&entries * &omega * entries.transpose() - &omega).amax();
        if defect > SYMPLECTIC_TOL {
            return Err(invalid(format!("matrix is not symplectic (|SΩSᵀ - Ω| = {defect:e})")));
        }
        Ok(Self { entries })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            entries: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// The map "apply `self`, then `next`".
    pub fn then(&self, next: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.n_modes() != next.n_modes() {
            return Err(invalid(format!(
                "cannot compose symplectic maps on {} and {} modes",
                self.n_modes(),
                next.n_modes()
            )));
        }
        Ok(SymplecticMatrix {
            entries: &self.entries * &next.entries,
        })
    }
}

/// Which quadrature a homodyne detector measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    /// Offset of this quadrature inside a mode's 2x2 block.
    pub fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// Labels for the modes of the purified Alice–Bob–Eve network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeRole {
    /// Source half travelling to Alice (Alice's mode after the channel).
    SourceToAlice,
    /// Source half travelling to Bob (Bob's mode after the channel).
    SourceToBob,
    /// Cloner mode injected on Alice's arm; Eve's copy after the beam splitter.
    Cloner1In,
    /// Cloner mode Eve keeps on Alice's arm.
    Cloner1Keep,
    /// Cloner mode injected on Bob's arm; Eve's copy after the beam splitter.
    Cloner2In,
    /// Cloner mode Eve keeps on Bob's arm.
    Cloner2Keep,
    /// Vacuum ancilla opened by a heterodyne detector.
    PrepVacuum,
}

/// `Ω = ⊕ [[0, 1], [-1, 0]]` on `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Entropy of a thermal mode with mean photon number `x`, in bits:
/// `G(x) = (x+1)·log2(x+1) − x·log2(x)`.
pub fn g_function(x: f64) -> Result<f64> {
    if x.is_nan() || x < -G_CLAMP_TOL {
        return Err(invalid(format!("G(x) is undefined for x = {x}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

pub fn vacuum_cm(n_modes: usize) -> Result<CovarianceMatrix> {
    if n_modes == 0 {
        return Err(invalid("vacuum needs at least one mode"));
    }
    Ok(CovarianceMatrix {
        entries: DMatrix::identity(2 * n_modes, 2 * n_modes),
    })
}

/// Two-mode squeezed vacuum with local variance `v`:
/// diagonal blocks `v·I`, off-diagonal blocks `√(v²−1)·Z`.
pub fn epr_cm(v: f64) -> Result<CovarianceMatrix> {
    if !(v >= 1.0) || !v.is_finite() {
        return Err(invalid(format!("EPR variance must be finite and >= 1, got {v}")));
    }
    let c = (v * v - 1.0).sqrt();
    CovarianceMatrix::from_row_slice(
        4,
        &[
            v, 0.0, c, 0.0, //
            0.0, v, 0.0, -c, //
            c, 0.0, v, 0.0, //
            0.0, -c, 0.0, v,
        ],
    )
}

/// Single-mode thermal state `diag(w, w)`.
pub fn thermal_cm(w: f64) -> Result<CovarianceMatrix> {
    if !(w >= 1.0) || !w.is_finite() {
        return Err(invalid(format!("thermal variance must be finite and >= 1, got {w}")));
    }
    Ok(CovarianceMatrix {
        entries: DMatrix::from_diagonal_element(2, 2, w),
    })
}

/// Beam splitter of transmissivity `t` between modes `i` and `j` of an
/// `n_modes` system:
///
/// ```text
/// x_i' =  √t·x_i + √(1−t)·x_j
/// x_j' = −√(1−t)·x_i + √t·x_j
/// ```
///
/// and identically for the `p` quadratures. The reflected arm of mode `j`
/// carries the minus sign.
pub fn beam_splitter(t: f64, i: usize, j: usize, n_modes: usize) -> Result<SymplecticMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(invalid(format!(
            "beam splitter transmissivity must lie in [0, 1], got {t}"
        )));
    }
    if i == j {
        return Err(invalid(format!(
            "beam splitter needs two distinct modes, got {i} twice"
        )));
    }
    if i >= n_modes || j >= n_modes {
        return Err(invalid(format!(
            "beam splitter modes ({i}, {j}) out of range for {n_modes} modes"
        )));
    }
    let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
    // Heisenberg action r' = M r; stored as S = Mᵀ.
    let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
    for q in 0..2 {
        let (xi, xj) = (2 * i + q, 2 * j + q);
        m[(xi, xi)] = st;
        m[(xi, xj)] = sr;
        m[(xj, xi)] = -sr;
        m[(xj, xj)] = st;
    }
    Ok(SymplecticMatrix { entries: m.transpose() })
}

/// `SᵀγS`.
pub fn apply_symplectic(gamma: &CovarianceMatrix, s: &SymplecticMatrix) -> Result<CovarianceMatrix> {
    if gamma.dim() != s.entries.nrows() {
        return Err(invalid(format!(
            "symplectic map on {} modes applied to a {}-mode state",
            s.n_modes(),
            gamma.n_modes()
        )));
    }
    let out = s.entries.transpose() * &gamma.entries * &s.entries;
    // Re-symmetrise so rounding never accumulates an antisymmetric part.
    let out = (&out + out.transpose()) * 0.5;
    Ok(CovarianceMatrix { entries: out })
}

/// Reduced state on `keep` (mode indices, in the order given).
pub fn partial_trace(gamma: &CovarianceMatrix, keep: &[usize]) -> Result<CovarianceMatrix> {
    if keep.is_empty() {
        return Err(invalid("partial trace must keep at least one mode"));
    }
    let n = gamma.n_modes();
    for (pos, &m) in keep.iter().enumerate() {
        if m >= n {
            return Err(invalid(format!("mode {m} out of range for {n} modes")));
        }
        if keep[..pos].contains(&m) {
            return Err(invalid(format!("mode {m} listed twice")));
        }
    }
    let idx: Vec<usize> = keep.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
    Ok(CovarianceMatrix {
        entries: gamma.entries.select_rows(&idx).select_columns(&idx),
    })
}

fn split_measured(gamma: &CovarianceMatrix, mode: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = gamma.n_modes();
    if n < 2 {
        return Err(invalid("conditioning needs at least two modes"));
    }
    if mode >= n {
        return Err(invalid(format!("measured mode {mode} out of range for {n} modes")));
    }
    let rest: Vec<usize> = (0..gamma.dim()).filter(|&k| k / 2 != mode).collect();
    Ok((vec![2 * mode, 2 * mode + 1], rest))
}

/// State of the other modes after homodyning quadrature `q` of `mode`.
///
/// The pseudoinverse of `X·γ_m·X` has a single non-zero entry `1/γ_qq`, so the
/// update is the rank-one Schur complement `γ_rest − σ_q σ_qᵀ / γ_qq`. The
/// measured mode is removed; the remaining modes keep their relative order.
pub fn condition_homodyne(gamma: &CovarianceMatrix, mode: usize, q: Quadrature) -> Result<CovarianceMatrix> {
    let (_, rest) = split_measured(gamma, mode)?;
    let qi = 2 * mode + q.offset();
    let var = gamma.entries[(qi, qi)];
    if !(var > 0.0) {
        return Err(numerical(format!(
            "homodyne on mode {mode}: measured variance {var} is not positive"
        )));
    }
    let g_rest = gamma.entries.select_rows(&rest).select_columns(&rest);
    let sigma = gamma.entries.select_rows(&rest).column(qi).into_owned();
    let out = g_rest - &sigma * sigma.transpose() / var;
    Ok(CovarianceMatrix {
        entries: (&out + out.transpose()) * 0.5,
    })
}

/// State of the other modes after heterodyning `mode`:
/// `γ_rest − σ (γ_m + I)⁻¹ σᵀ`.
pub fn condition_heterodyne(gamma: &CovarianceMatrix, mode: usize) -> Result<CovarianceMatrix> {
    let (measured, rest) = split_measured(gamma, mode)?;
    let g_m = gamma.entries.select_rows(&measured).select_columns(&measured) + DMatrix::identity(2, 2);
    let det = g_m[(0, 0)] * g_m[(1, 1)] - g_m[(0, 1)] * g_m[(1, 0)];
    let inv = match g_m.try_inverse() {
        Some(inv) if det > f64::EPSILON => inv,
        _ => {
            return Err(numerical(format!(
                "heterodyne on mode {mode}: γ_m + I is singular (det = {det:e})"
            )))
        }
    };
    let g_rest = gamma.entries.select_rows(&rest).select_columns(&rest);
    let sigma = gamma.entries.select_rows(&rest).select_columns(&measured);
    let out = g_rest - &sigma * inv * sigma.transpose();
    Ok(CovarianceMatrix {
        entries: (&out + out.transpose()) * 0.5,
    })
}

/// Raw symplectic spectrum, descending, without any clamping.
///
/// With `γ = LLᵀ`, `iΩγ` is similar to the Hermitian matrix `i·LᵀΩL`, whose
/// eigenvalues come in pairs `±ν_k`. Only eigenvalues are used; the result is
/// checked against the invariant `Σν² = −½·tr((Ωγ)²)`.
fn raw_symplectic_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let l = match sym.clone().cholesky() {
        Some(ch) => ch.l(),
        None => {
            let min_eig = sym.symmetric_eigenvalues().min();
            return Err(numerical(format!(
                "covariance matrix is not positive definite (smallest eigenvalue {min_eig:e})"
            )));
        }
    };
    let omega = symplectic_form(dim / 2);
    let k = l.transpose() * &omega * &l;
    let herm: DMatrix<Complex<f64>> = k.map(|v| Complex::new(0.0, v));
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));

    let n = dim / 2;
    for k in 0..n {
        let (pos, neg) = (ev[k], ev[dim - 1 - k]);
        if !(pos > 0.0) || (pos + neg).abs() > PAIRING_TOL * (1.0 + pos.abs()) {
            return Err(numerical(format!(
                "symplectic spectrum does not pair up: +{pos} vs {neg}"
            )));
        }
    }
    let nu: Vec<f64> = ev[..n]
        .iter()
        .zip(ev[n..].iter().rev())
        .map(|(p, q)| 0.5 * (p - q))
        .collect();

    let og = &omega * &sym;
    let expected = -0.5 * (&og * &og).trace();
    let got: f64 = nu.iter().map(|v| v * v).sum();
    let scale = sym.norm_squared().max(1.0);
    if (got - expected).abs() > PAIRING_TOL * scale {
        return Err(numerical(format!(
            "symplectic spectrum fails the trace check: Σν² = {got} vs {expected}"
        )));
    }
    Ok(nu)
}

/// Symplectic eigenvalues in descending order.
///
/// Values within [`PHYSICAL_TOL`] below 1 are clamped to 1; anything smaller
/// is reported as an unphysical state.
pub fn symplectic_eigenvalues(gamma: &CovarianceMatrix) -> Result<Vec<f64>> {
    let raw = raw_symplectic_spectrum(&gamma.entries)?;
    raw.into_iter()
        .map(|nu| {
            if nu >= 1.0 {
                Ok(nu)
            } else if nu >= 1.0 - PHYSICAL_TOL {
                Ok(1.0)
            } else {
                Err(numerical(format!(
                    "symplectic eigenvalue {nu} violates the uncertainty bound"
                )))
            }
        })
        .collect()
}

/// Entropy of a single mode with symplectic eigenvalue `nu`.
pub fn mode_entropy(nu: f64) -> Result<f64> {
    g_function((nu - 1.0) / 2.0)
}

/// Von Neumann entropy in bits: `Σ_k G((ν_k − 1)/2)`.
pub fn von_neumann_entropy(gamma: &CovarianceMatrix) -> Result<f64> {
    symplectic_eigenvalues(gamma)?.into_iter().map(mode_entropy).sum()
}

/// Symplectic eigenvalues of the two-mode matrix with blocks `a·I`, `b·I`
/// and `c·Z`, larger first.
///
/// Equivalent to `ν² = [Δ ± √(Δ² − 4D²)]/2` with `Δ = a² + b² − 2c²` and
/// `D = ab − c²`, evaluated through `Δ² − 4D² = (a−b)²((a+b)² − 4c²)` so the
/// pure-state limit is free of cancellation.
pub fn standard_form_spectrum(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    let disc = (a + b) * (a + b) - 4.0 * c * c;
    if !(disc >= 0.0) {
        return Err(numerical(format!(
            "two-mode matrix (a={a}, b={b}, c={c}) is not positive definite"
        )));
    }
    let r = disc.sqrt();
    let gap = (a - b).abs();
    Ok(((r + gap) / 2.0, (r - gap) / 2.0))
}

/// Outcome of [`validate_cm`].
#[derive(Debug, Clone, PartialEq)]
pub struct CmReport {
    pub n_modes: usize,
    /// `max |γ_ij − γ_ji|`.
    pub symmetry_defect: f64,
    /// Smallest raw symplectic eigenvalue; `None` when the matrix is not
    /// positive definite or its spectrum cannot be paired.
    pub min_symplectic_eigenvalue: Option<f64>,
    pub symmetric: bool,
    pub physical: bool,
}

impl CmReport {
    pub fn passed(&self) -> bool {
        self.symmetric && self.physical
    }
}

/// Checks symmetry and the uncertainty bound; never fails.
pub fn validate_cm(gamma: &CovarianceMatrix) -> CmReport {
    let m = &gamma.entries;
    let symmetry_defect = (m - m.transpose()).amax();
    let min_symplectic_eigenvalue = raw_symplectic_spectrum(m)
        .ok()
        .and_then(|nu| nu.into_iter().reduce(f64::min));
    CmReport {
        n_modes: gamma.n_modes(),
        symmetry_defect,
        min_symplectic_eigenvalue,
        symmetric: symmetry_defect <= SYMMETRY_TOL,
        physical: min_symplectic_eigenvalue.is_some_and(|nu| nu >= 1.0 - PHYSICAL_TOL),
    }
}
