//! The qubit erasure channel in Kraus form, its Choi-state diagnostics,
//! and the acceleration-parametrized two-mode output state whose
//! entanglement the rest of the crate measures.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::density::{self, spectrum_of, DensityMatrix, Spectrum};
use crate::error::{Error, Result};
use crate::fock::ModeOrder;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const COMPLETENESS_TOL: f64 = 1e-12;

/// Erasure probability, validated to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErasureParams {
    p: f64,
}

impl ErasureParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParamRange { name: "p", value: p, lo: 0.0, hi: 1.0 });
        }
        Ok(ErasureParams { p })
    }

    pub fn value(&self) -> f64 {
        self.p
    }
}

/// Acceleration parameter, validated to [0, pi/4]: 0 is inertial, pi/4 the
/// infinite-acceleration limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelerationParam {
    r: f64,
}

impl AccelerationParam {
    pub const MAX: f64 = std::f64::consts::FRAC_PI_4;

    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=Self::MAX).contains(&r) {
            return Err(Error::ParamRange { name: "r", value: r, lo: 0.0, hi: Self::MAX });
        }
        Ok(AccelerationParam { r })
    }

    pub fn value(&self) -> f64 {
        self.r
    }
}

/// A channel as a list of Kraus operators of common shape `d_out x d_in`
/// satisfying the completeness relation within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<DMatrix<Complex64>>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::BadChannel("no Kraus operators".into()))?;
        let (d_out, d_in) = first.shape();
        if d_out == 0 || d_in == 0 {
            return Err(Error::BadChannel("zero-dimensional Kraus operator".into()));
        }
        for (idx, k) in kraus.iter().enumerate() {
            if k.shape() != (d_out, d_in) {
                return Err(Error::BadChannel(format!(
                    "operator {idx} has shape {}x{}, expected {d_out}x{d_in}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let mut completeness = DMatrix::zeros(d_in, d_in);
        for k in &kraus {
            completeness += k.adjoint() * k;
        }
        let dev = (&completeness - DMatrix::<Complex64>::identity(d_in, d_in))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > COMPLETENESS_TOL {
            return Err(Error::BadChannel(format!(
                "completeness sum deviates from identity by {dev:e}"
            )));
        }
        Ok(KrausChannel { kraus })
    }

    pub fn kraus(&self) -> &[DMatrix<Complex64>] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.kraus[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    /// CPTP action sum_k K rho K^dagger.
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        let d_in = self.input_dim();
        if rho.shape() != (d_in, d_in) {
            return Err(Error::DimensionMismatch {
                expected: format!("{d_in}x{d_in}"),
                found: format!("{}x{}", rho.nrows(), rho.ncols()),
            });
        }
        let d_out = self.output_dim();
        let mut out = DMatrix::zeros(d_out, d_out);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        Ok(out)
    }
}

/// Qubit erasure channel: with probability 1-p the input qubit passes into
/// the first two output levels, with probability p it is replaced by the
/// orthogonal flag level.
pub fn erasure_channel(params: ErasureParams) -> KrausChannel {
    let p = params.value();
    let keep = (1.0 - p).sqrt();
    let flag = p.sqrt();
    let n1 = DMatrix::from_row_slice(
        3,
        2,
        &[
            c(keep, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(keep, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ],
    );
    let n2 = DMatrix::from_row_slice(
        3,
        2,
        &[
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(flag, 0.0),
        ],
    );
    let n3 = DMatrix::from_row_slice(
        3,
        2,
        &[
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(flag, 0.0),
            c(0.0, 0.0),
        ],
    );
    KrausChannel::new(vec![n1, n2, n3]).expect("erasure Kraus set is complete by construction")
}

/// Choi state: half of a maximally entangled qubit pair sent through the
/// channel. 6x6 over the (reference qubit) x (3-level output) split, row
/// index = ref * 3 + out.
pub fn erasure_choi(params: ErasureParams) -> DMatrix<Complex64> {
    let channel = erasure_channel(params);
    let mut choi = DMatrix::zeros(6, 6);
    for k in channel.kraus() {
        for i in 0..2 {
            for m in 0..3 {
                for j in 0..2 {
                    for n in 0..3 {
                        choi[(i * 3 + m, j * 3 + n)] += k[(m, i)] * k[(n, j)].conj() * 0.5;
                    }
                }
            }
        }
    }
    choi
}

/// Eigenvalues of the Choi state partially transposed on the output factor.
pub fn erasure_ppt_spectrum(params: ErasureParams) -> Spectrum {
    let choi = erasure_choi(params);
    let pt = density::partial_transpose_second(&choi, 2, 3).expect("6x6 by construction");
    spectrum_of(&pt).expect("partial transpose of a Hermitian matrix is Hermitian")
}

/// Quantum capacity of the erasure channel, max(0, 1 - 2p) qubits per use:
/// the standard closed form, with the no-cloning cutoff at p = 1/2.
pub fn erasure_quantum_capacity(params: ErasureParams) -> f64 {
    (1.0 - 2.0 * params.value()).max(0.0)
}

/// Two-mode output state of the accelerated observer at acceleration r,
/// over modes a, b: an even-sector coherent block plus an odd-sector
/// population, never mixing the sectors.
pub fn grassmann_output_state(param: AccelerationParam) -> DensityMatrix {
    let r = param.value();
    let (cr, sr) = (r.cos(), r.sin());
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 0)] = c(cr * cr / 2.0, 0.0);
    m[(0, 3)] = c(cr / 2.0, 0.0);
    m[(3, 0)] = c(cr / 2.0, 0.0);
    m[(1, 1)] = c(sr * sr / 2.0, 0.0);
    m[(3, 3)] = c(0.5, 0.0);
    let order = ModeOrder::new(["a", "b"]).expect("static labels");
    DensityMatrix::new(order, m).expect("Hermitian unit-trace PSD by construction")
}
