//! Entanglement measures for Gaussian states.
//!
//! Covariance matrices are `2k × 2k` with quadratures ordered (x₁, p₁, …,
//! x_k, p_k) and the vacuum at `I/2`. Modes are addressed by 0-based index.

use std::fmt;

use nalgebra::{linalg::Schur, DMatrix};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::lyapunov::CovarianceMatrix;

/// Minimum eigenvalue of C + iΣ/2 accepted as physical.
pub const PHYSICALITY_TOLERANCE: f64 = -1e-9;
/// Relative tolerance on the ±iν pairing of the spectrum of Σ·C.
pub const PAIRING_TOLERANCE: f64 = 1e-9;
/// 2η̃ at or above 1 − this counts as separable.
pub const SEPARABLE_TOLERANCE: f64 = 1e-12;
/// Negative residual contangles down to −this are rounding noise.
pub const MONOGAMY_TOLERANCE: f64 = 1e-9;

/// The three modes of the cavity-magnomechanical system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Cavity,
    Magnon,
    Mechanics,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Cavity, Mode::Magnon, Mode::Mechanics];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cavity => "c",
            Mode::Magnon => "m",
            Mode::Mechanics => "b",
        })
    }
}

/// Two disjoint, nonempty groups of modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModePartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl ModePartition {
    pub fn new(side_a: &[usize], side_b: &[usize]) -> Result<Self> {
        let norm = |s: &[usize]| {
            let mut v = s.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        };
        let (a, b) = (norm(side_a), norm(side_b));
        if a.is_empty() || b.is_empty() {
            return Err(Error::Modes("both sides must be nonempty".into()));
        }
        if a.iter().any(|m| b.contains(m)) {
            return Err(Error::Modes("sides must be disjoint".into()));
        }
        Ok(Self {
            side_a: a,
            side_b: b,
        })
    }

    pub fn of(a: &[Mode], b: &[Mode]) -> Self {
        let idx = |s: &[Mode]| s.iter().map(|m| m.index()).collect::<Vec<_>>();
        Self::new(&idx(a), &idx(b)).expect("mode sides are disjoint")
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    fn union(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.side_a.iter().chain(&self.side_b).copied().collect();
        v.sort_unstable();
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementResult {
    /// Logarithmic negativity or contangle.
    pub value: f64,
    /// Minimum symplectic eigenvalue of the partially transposed state.
    pub eta_tilde: f64,
}

fn mode_count(c: &DMatrix<f64>) -> Result<usize> {
    if c.nrows() != c.ncols() || !c.nrows().is_multiple_of(2) || c.nrows() == 0 {
        return Err(Error::Modes(format!(
            "covariance must be 2k×2k, got {}×{}",
            c.nrows(),
            c.ncols()
        )));
    }
    Ok(c.nrows() / 2)
}

/// Block-diagonal symplectic form ⊕[[0, 1], [−1, 0]] on `k` modes.
pub fn symplectic_form(k: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(2 * k, 2 * k);
    for j in 0..k {
        s[(2 * j, 2 * j + 1)] = 1.0;
        s[(2 * j + 1, 2 * j)] = -1.0;
    }
    s
}

/// Sub-covariance of the selected modes, in ascending mode order.
pub fn reduce(c: &DMatrix<f64>, modes: &[usize]) -> Result<DMatrix<f64>> {
    let k = mode_count(c)?;
    let mut m = modes.to_vec();
    m.sort_unstable();
    m.dedup();
    if m.is_empty() {
        return Err(Error::Modes("empty mode set".into()));
    }
    if let Some(bad) = m.iter().find(|&&j| j >= k) {
        return Err(Error::Modes(format!("mode {bad} out of range for {k} modes")));
    }
    let idx: Vec<usize> = m.iter().flat_map(|&j| [2 * j, 2 * j + 1]).collect();
    Ok(c.select_rows(&idx).select_columns(&idx))
}

/// Flips the sign of the momentum quadrature of `mode`: P·C·P.
pub fn partial_transpose(c: &DMatrix<f64>, mode: usize) -> Result<DMatrix<f64>> {
    let k = mode_count(c)?;
    if mode >= k {
        return Err(Error::Modes(format!("mode {mode} out of range for {k} modes")));
    }
    let p = 2 * mode + 1;
    let mut out = c.clone();
    out.row_mut(p).neg_mut();
    out.column_mut(p).neg_mut();
    Ok(out)
}

/// Symplectic eigenvalues ν₁ ≤ … ≤ ν_k, read off the spectrum ±iν of Σ·C.
pub fn symplectic_eigenvalues(c: &DMatrix<f64>) -> Result<Vec<f64>> {
    let k = mode_count(c)?;
    let sc = symplectic_form(k) * c;
    let schur = Schur::try_new(sc, f64::EPSILON, 10_000).ok_or(Error::EigenFailure)?;
    let ev = schur.complex_eigenvalues();
    let mut up: Vec<f64> = ev.iter().filter(|z| z.im > 0.0).map(|z| z.im).collect();
    let mut down: Vec<f64> = ev.iter().filter(|z| z.im < 0.0).map(|z| -z.im).collect();
    if up.len() != k || down.len() != k {
        return Err(Error::Pairing(format!(
            "expected {k} conjugate pairs, spectrum was {:?}",
            ev.as_slice()
        )));
    }
    up.sort_by(f64::total_cmp);
    down.sort_by(f64::total_cmp);
    for (u, d) in up.iter().zip(&down) {
        if (u - d).abs() > PAIRING_TOLERANCE * u.max(1.0) {
            return Err(Error::Pairing(format!("+i{u} has no partner (nearest −i{d})")));
        }
    }
    Ok(up)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityReport {
    /// Smallest eigenvalue of the Hermitian matrix C + iΣ/2.
    pub min_eigenvalue: f64,
    pub physical: bool,
}

/// Uncertainty-principle test C + iΣ/2 ⪰ 0.
pub fn physicality_check(c: &DMatrix<f64>) -> Result<PhysicalityReport> {
    let k = mode_count(c)?;
    let n = 2 * k;
    let half_sigma = symplectic_form(k) * 0.5;
    // real symmetric embedding [[Re, −Im], [Im, Re]] of C + iΣ/2
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(c);
    h.view_mut((n, n), (n, n)).copy_from(c);
    h.view_mut((0, n), (n, n)).copy_from(&(-&half_sigma));
    h.view_mut((n, 0), (n, n)).copy_from(&half_sigma);
    let min_eigenvalue = h.symmetric_eigenvalues().min();
    Ok(PhysicalityReport {
        min_eigenvalue,
        physical: min_eigenvalue >= PHYSICALITY_TOLERANCE,
    })
}

fn negativity_from_eta(eta: f64) -> f64 {
    if 2.0 * eta >= 1.0 - SEPARABLE_TOLERANCE {
        0.0
    } else {
        -(2.0 * eta).ln()
    }
}

/// Logarithmic negativity E_N = max[0, −ln 2η̃] across `partition`.
pub fn log_negativity(c: &DMatrix<f64>, partition: &ModePartition) -> Result<EntanglementResult> {
    let modes = partition.union();
    let reduced = reduce(c, &modes)?;
    let phys = physicality_check(&reduced)?;
    if !phys.physical {
        return Err(Error::Unphysical {
            min_eigenvalue: phys.min_eigenvalue,
        });
    }
    let mut pt = reduced;
    for a in partition.side_a() {
        let local = modes.iter().position(|m| m == a).expect("side_a ⊂ union");
        pt = partial_transpose(&pt, local)?;
    }
    let eta = symplectic_eigenvalues(&pt)?[0];
    Ok(EntanglementResult {
        value: negativity_from_eta(eta),
        eta_tilde: eta,
    })
}

/// Closed-form η̃ for a two-mode covariance [[A, C], [Cᵀ, B]]:
/// η̃ = 2^{-1/2} [Σ̃ − (Σ̃² − 4 det V)^{1/2}]^{1/2}, Σ̃ = det A + det B − 2 det C.
pub fn two_mode_eta_closed_form(v: &DMatrix<f64>) -> Result<f64> {
    if v.shape() != (4, 4) {
        return Err(Error::Modes("closed form needs a two-mode covariance".into()));
    }
    // double-double so the discriminant survives near-degenerate spectra
    let e = |r: usize, c: usize| TwoFloat::from(v[(r, c)]);
    let minor = |r: usize, c0: usize, c1: usize| e(r, c0) * e(r + 1, c1) - e(r, c1) * e(r + 1, c0);
    let sigma = minor(0, 0, 1) + minor(2, 2, 3) - minor(0, 2, 3) * 2.0;
    let mut det = TwoFloat::from(0.0);
    for (i, j, k, l, sign) in [
        (0, 1, 2, 3, 1.0),
        (0, 2, 1, 3, -1.0),
        (0, 3, 1, 2, 1.0),
        (1, 2, 0, 3, 1.0),
        (1, 3, 0, 2, -1.0),
        (2, 3, 0, 1, 1.0),
    ] {
        det += minor(0, i, j) * minor(2, k, l) * sign;
    }
    let disc = f64::from(sigma * sigma - det * 4.0).max(0.0);
    let (sigma, det) = (f64::from(sigma), f64::from(det));
    let big = sigma + disc.sqrt();
    if big <= 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * det.max(0.0) / big).sqrt())
}

/// Contangle of a bipartition, the squared logarithmic negativity.
pub fn contangle(c: &DMatrix<f64>, partition: &ModePartition) -> Result<f64> {
    Ok(log_negativity(c, partition)?.value.powi(2))
}

/// Unclamped residual contangles R^{i|jk} = C_{i|jk} − C_{i|j} − C_{i|k}
/// for i = cavity, magnon, mechanics.
pub fn residual_contangles(c: &CovarianceMatrix) -> Result<[f64; 3]> {
    let full = c.to_dmatrix();
    let mut out = [0.0; 3];
    for (slot, i) in Mode::ALL.into_iter().enumerate() {
        let others: Vec<Mode> = Mode::ALL.into_iter().filter(|m| *m != i).collect();
        let one_vs_two = contangle(&full, &ModePartition::of(&[i], &others))?;
        let pairs = contangle(&full, &ModePartition::of(&[i], &[others[0]]))?
            + contangle(&full, &ModePartition::of(&[i], &[others[1]]))?;
        out[slot] = one_vs_two - pairs;
    }
    Ok(out)
}

const BIPARTITIONS: [&str; 3] = ["c|mb", "m|cb", "b|cm"];

/// Minimal residual contangle over the three one-versus-two bipartitions.
///
/// Residuals in [−[`MONOGAMY_TOLERANCE`], 0) are clamped to zero; anything
/// more negative is reported as a monogamy violation.
pub fn residual_contangle_min(c: &CovarianceMatrix) -> Result<f64> {
    let r = residual_contangles(c)?;
    let mut min = f64::INFINITY;
    for (v, name) in r.iter().zip(BIPARTITIONS) {
        if *v < -MONOGAMY_TOLERANCE {
            return Err(Error::Monogamy {
                bipartition: name,
                value: *v,
            });
        }
        min = min.min(v.max(0.0));
    }
    Ok(min)
}
