//! Density matrices over fermionic occupation bases.
//!
//! The fermionic content is concentrated in two places: `reorder_modes`
//! conjugates by the signed basis permutation of [`crate::fock`], and
//! `partial_trace` removes a mode by first permuting it to the last
//! position (collecting braiding signs) and only then tracing it out
//! conventionally. Tracing a mode in place without the permutation is
//! exactly the mistake the sign rule exists to prevent.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{self, BasisState, FockVector, ModeOrder, SsrVerdict};

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
pub const SSR_COHERENCE_TOL: f64 = 1e-12;
pub const OUTER_NORM_TOL: f64 = 1e-10;
pub const SPECTRUM_HERMITICITY_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn mat_trace(m: &DMatrix<Complex64>) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

pub(crate) fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Real eigenvalues of a Hermitian matrix, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Total weight of the negative eigenvalues, as a positive number.
    pub fn negative_weight(&self) -> f64 {
        // fold instead of sum: an empty f64 sum is -0.0, which would leak
        // a minus sign into reports
        self.eigenvalues
            .iter()
            .filter(|&&e| e < 0.0)
            .fold(0.0, |acc, e| acc - e)
    }
}

/// Eigenvalues of a Hermitian matrix, descending. Rejects matrices whose
/// Hermiticity deviation exceeds `SPECTRUM_HERMITICITY_TOL`.
pub fn spectrum_of(m: &DMatrix<Complex64>) -> Result<Spectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: "square".into(),
            found: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let dev = hermiticity_deviation(m);
    if dev > SPECTRUM_HERMITICITY_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let eigen = nalgebra::linalg::SymmetricEigen::new(m.clone());
    let mut eigenvalues: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(Spectrum { eigenvalues })
}

/// Dense density matrix over the occupation basis of a fixed mode order.
/// Row/column index is the basis code of [`BasisState`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    order: ModeOrder,
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validating constructor: shape `2^n`, Hermitian within 1e-12,
    /// unit trace within 1e-12, eigenvalues above -1e-10.
    pub fn new(order: ModeOrder, mat: DMatrix<Complex64>) -> Result<Self> {
        let dim = order.dim();
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: format!("{dim}x{dim} for modes [{order}]"),
                found: format!("{}x{}", mat.nrows(), mat.ncols()),
            });
        }
        let dev = hermiticity_deviation(&mat);
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = mat_trace(&mat);
        if (tr - c(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let spectrum = spectrum_of(&mat).expect("hermiticity already checked");
        if spectrum.min() < EIGENVALUE_FLOOR {
            return Err(Error::NotPositive(spectrum.min()));
        }
        Ok(DensityMatrix { order, mat })
    }

    /// Internal constructor for matrices produced by operations that keep
    /// the invariants by construction.
    pub(crate) fn from_parts(order: ModeOrder, mat: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(mat.nrows(), order.dim());
        debug_assert_eq!(mat.ncols(), order.dim());
        DensityMatrix { order, mat }
    }

    /// Projector |state><state| onto a normalized state.
    pub fn outer(state: &FockVector) -> Result<Self> {
        if (state.norm() - 1.0).abs() > OUTER_NORM_TOL {
            return Err(Error::NotNormalized(state.norm()));
        }
        let amps = state.dense();
        let dim = amps.len();
        let mat = DMatrix::from_fn(dim, dim, |i, j| amps[i] * amps[j].conj());
        Ok(DensityMatrix::from_parts(state.order().clone(), mat))
    }

    pub fn order(&self) -> &ModeOrder {
        &self.order
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn num_modes(&self) -> usize {
        self.order.len()
    }

    pub fn trace(&self) -> Complex64 {
        mat_trace(&self.mat)
    }

    /// Conjugate by the signed basis permutation taking the current order
    /// to `new_order`.
    pub fn reorder_modes(&self, new_order: &ModeOrder) -> Result<Self> {
        let mat = reorder_dense(&self.order, &self.mat, new_order)?;
        Ok(DensityMatrix::from_parts(new_order.clone(), mat))
    }

    /// Trace out the labeled modes. Each mode is first permuted to the last
    /// position, so the braiding signs it picks up while crossing occupied
    /// modes are part of the sum; the survivors keep their relative order.
    /// Tracing every mode leaves the 1x1 total trace.
    pub fn partial_trace<I, S>(&self, traced: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut labels: Vec<String> = Vec::new();
        for l in traced {
            let l = l.as_ref();
            if self.order.position(l).is_none() {
                return Err(Error::UnknownMode(l.to_string()));
            }
            if labels.iter().any(|seen| seen == l) {
                return Err(Error::DuplicateMode(l.to_string()));
            }
            labels.push(l.to_string());
        }

        let mut order = self.order.clone();
        let mut mat = self.mat.clone();
        for label in &labels {
            let p = order.position(label).expect("still present");
            let n = order.len();
            if p != n - 1 {
                let mut target = order.labels().to_vec();
                let moved = target.remove(p);
                target.push(moved);
                let target_order = fock::ModeOrder::from_vec_unchecked(target);
                mat = reorder_dense(&order, &mat, &target_order)?;
                order = target_order;
            }
            let half = mat.nrows() / 2;
            mat = DMatrix::from_fn(half, half, |i, j| {
                mat[(2 * i, 2 * j)] + mat[(2 * i + 1, 2 * j + 1)]
            });
            order = order.without(&[order.len() - 1]);
        }
        Ok(DensityMatrix::from_parts(order, mat))
    }

    /// Transpose the indices of the labeled modes. The result is Hermitian
    /// but in general not positive. Transposing nothing returns a copy and
    /// transposing every mode is the plain transpose; both log a warning.
    pub fn partial_transpose<I, S>(&self, subsystem: I) -> Result<DMatrix<Complex64>>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let n = self.order.len();
        let mut positions: Vec<usize> = Vec::new();
        for l in subsystem {
            let l = l.as_ref();
            let p = self
                .order
                .position(l)
                .ok_or_else(|| Error::UnknownMode(l.to_string()))?;
            if positions.contains(&p) {
                return Err(Error::DuplicateMode(l.to_string()));
            }
            positions.push(p);
        }
        if positions.is_empty() {
            log::warn!("partial transpose over an empty subsystem is the identity");
            return Ok(self.mat.clone());
        }
        if positions.len() == n {
            log::warn!("partial transpose over every mode is the full transpose");
            return Ok(self.mat.transpose());
        }
        let mask: usize = positions.iter().map(|p| 1usize << (n - 1 - p)).sum();
        let dim = self.mat.nrows();
        Ok(DMatrix::from_fn(dim, dim, |r, x| {
            let rr = (r & !mask) | (x & mask);
            let cc = (x & !mask) | (r & mask);
            self.mat[(rr, cc)]
        }))
    }

    pub fn spectrum(&self) -> Spectrum {
        spectrum_of(&self.mat).expect("stored matrix is Hermitian")
    }

    /// A mixed state respects parity superselection iff it has no matrix
    /// element of magnitude >= 1e-12 connecting the even and odd sectors.
    pub fn ssr_check(&self) -> SsrVerdict {
        let n = self.order.len();
        let dim = self.mat.nrows();
        for i in 0..dim {
            for j in 0..dim {
                let cross = (i.count_ones() + j.count_ones()) % 2 == 1;
                if cross && self.mat[(i, j)].norm() >= SSR_COHERENCE_TOL {
                    return SsrVerdict::Violation(format!(
                        "coherence of magnitude {:.3e} between {} and {}",
                        self.mat[(i, j)].norm(),
                        BasisState::new(i, n),
                        BasisState::new(j, n),
                    ));
                }
            }
        }
        SsrVerdict::Valid
    }

    /// Two-mode separability under parity superselection: the only allowed
    /// separable two-fermion states are the diagonal ones.
    pub fn ssr_separable_two_modes(&self) -> Result<bool> {
        if self.order.len() != 2 {
            return Err(Error::WrongModeCount { expected: 2, found: self.order.len() });
        }
        for i in 0..4 {
            for j in 0..4 {
                if i != j && self.mat[(i, j)].norm() >= SSR_COHERENCE_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Diagonal weight on the even and odd parity sectors.
    pub fn parity_sector_weights(&self) -> (f64, f64) {
        let mut even = 0.0;
        let mut odd = 0.0;
        for i in 0..self.mat.nrows() {
            if i.count_ones() % 2 == 0 {
                even += self.mat[(i, i)].re;
            } else {
                odd += self.mat[(i, i)].re;
            }
        }
        (even, odd)
    }

    pub fn approx_eq(&self, other: &DensityMatrix, tol: f64) -> bool {
        self.order == other.order
            && self.mat.nrows() == other.mat.nrows()
            && (&self.mat - &other.mat).iter().all(|d| d.norm() <= tol)
    }
}

pub(crate) fn reorder_dense(
    order: &ModeOrder,
    mat: &DMatrix<Complex64>,
    new_order: &ModeOrder,
) -> Result<DMatrix<Complex64>> {
    let perm = fock::permutation_to(order, new_order)?;
    let n = order.len();
    let dim = mat.nrows();
    let map: Vec<(usize, f64)> = (0..dim).map(|code| fock::reorder_code(code, n, &perm)).collect();
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let (ni, si) = map[i];
        for j in 0..dim {
            let (nj, sj) = map[j];
            out[(ni, nj)] = mat[(i, j)] * (si * sj);
        }
    }
    Ok(out)
}

/// Partial transpose on the second factor of a `d_first x d_second`
/// composite index space (row index = `i * d_second + m`).
pub fn partial_transpose_second(
    mat: &DMatrix<Complex64>,
    d_first: usize,
    d_second: usize,
) -> Result<DMatrix<Complex64>> {
    let dim = d_first * d_second;
    if mat.nrows() != dim || mat.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: format!("{dim}x{dim}"),
            found: format!("{}x{}", mat.nrows(), mat.ncols()),
        });
    }
    Ok(DMatrix::from_fn(dim, dim, |row, col| {
        let (i, m) = (row / d_second, row % d_second);
        let (j, n) = (col / d_second, col % d_second);
        mat[(i * d_second + n, j * d_second + m)]
    }))
}
