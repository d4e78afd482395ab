//! Convex-roof entanglement of formation for two-mode (4x4) states.
//!
//! Every size-k pure-state decomposition of rho arises as phi_j = W u_j,
//! where W packs the square-rooted eigenvectors of rho and the rows u_j
//! come from a k x r matrix U with orthonormal columns. The roof is the
//! minimum over U of sum_j [ -Tr(tau_j log2 tau_j) + p_j log2 p_j ], with
//! tau_j the unnormalized one-mode reduction of phi_j and p_j = Tr tau_j.
//! That objective has the closed Wirtinger gradient
//! g_j = (log2(p_j) I - log2(tau_j) (x) I) phi_j, which is projected onto
//! the Stiefel tangent space and followed with a QR retraction.
//!
//! Under the parity constraint no decomposition member may straddle the
//! even and odd sectors, and a compliant rho is block diagonal across
//! them, so the constrained roof decouples exactly: split rho into its
//! sector blocks, take the unconstrained roof of each, and recombine with
//! the sector weights. Members inherit definite parity from the block
//! eigenvectors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::density::DensityMatrix;
use crate::entanglement::EntanglementReport;
use crate::error::{Error, Result};
use crate::fock::ModeOrder;

const RANK_TOL: f64 = 1e-12;
const SECTOR_EPS: f64 = 1e-14;
const LOG_FLOOR: f64 = 1e-18;
const MEMBER_EPS: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which pure-state decompositions the roof may range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoofConstraint {
    Unconstrained,
    /// Only decompositions whose members have definite occupation parity.
    ParitySsr,
}

#[derive(Debug, Clone)]
pub struct RoofConfig {
    /// Number of decomposition members; defaults to twice the rank.
    pub decomposition_size: Option<usize>,
    pub restarts: u32,
    pub seed: u64,
    /// Objective stall threshold ending one restart.
    pub stall_tol: f64,
    pub max_iters: u32,
}

impl Default for RoofConfig {
    fn default() -> Self {
        RoofConfig {
            decomposition_size: None,
            restarts: 32,
            seed: 0,
            stall_tol: 1e-9,
            max_iters: 2000,
        }
    }
}

impl RoofConfig {
    pub fn with_seed(seed: u64) -> Self {
        RoofConfig { seed, ..RoofConfig::default() }
    }
}

/// Weighted pure-state ensemble achieving the reported roof value.
#[derive(Debug, Clone)]
pub struct RoofDecomposition {
    order: ModeOrder,
    /// Pairs (weight, normalized 4-component state vector).
    members: Vec<(f64, Vec<Complex64>)>,
}

impl RoofDecomposition {
    pub fn order(&self) -> &ModeOrder {
        &self.order
    }

    pub fn members(&self) -> &[(f64, Vec<Complex64>)] {
        &self.members
    }

    pub fn weight_sum(&self) -> f64 {
        self.members.iter().map(|(w, _)| w).sum()
    }

    /// Sum of w |psi><psi| over the members.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let dim = self.members.first().map_or(0, |(_, v)| v.len());
        let mut out = DMatrix::zeros(dim, dim);
        for (w, v) in &self.members {
            for i in 0..dim {
                for j in 0..dim {
                    out[(i, j)] += v[i] * v[j].conj() * *w;
                }
            }
        }
        out
    }

    /// Largest amplitude any member carries in its minority parity sector.
    /// Zero (to numerical noise) when every member has definite parity.
    pub fn max_cross_parity_amplitude(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (_, v) in &self.members {
            let mut even: f64 = 0.0;
            let mut odd: f64 = 0.0;
            for (i, amp) in v.iter().enumerate() {
                if i.count_ones() % 2 == 0 {
                    even = even.max(amp.norm());
                } else {
                    odd = odd.max(amp.norm());
                }
            }
            worst = worst.max(even.min(odd));
        }
        worst
    }
}

struct BlockOutcome {
    value: f64,
    members: Vec<(f64, Vec<Complex64>)>,
    restarts: u32,
    best_gap: f64,
    residual: f64,
    converged: bool,
}

/// Entanglement of formation by convex-roof minimization.
///
/// Rank-1 inputs bypass the optimizer: a pure state has exactly one
/// decomposition, so the roof is the entropy of its reduction. With
/// `ParitySsr` the input must pass the mixed-state parity check; the
/// returned value is then the sector-weighted sum of the block roofs.
/// A report with `converged = false` means no restart met the stall
/// tolerance and the value is only an upper bound.
pub fn eof_convex_roof(
    rho: &DensityMatrix,
    constraint: RoofConstraint,
    config: &RoofConfig,
) -> Result<(EntanglementReport, RoofDecomposition)> {
    if rho.num_modes() != 2 {
        return Err(Error::WrongModeCount { expected: 2, found: rho.num_modes() });
    }

    match constraint {
        RoofConstraint::Unconstrained => {
            let outcome = solve_block(rho.matrix(), config, 0)?;
            Ok(package(rho, "eof-roof", outcome))
        }
        RoofConstraint::ParitySsr => {
            if let crate::fock::SsrVerdict::Violation(why) = rho.ssr_check() {
                return Err(Error::SsrViolation(why));
            }
            let m = rho.matrix();
            let even: Vec<usize> = vec![0, 3];
            let odd: Vec<usize> = vec![1, 2];
            let mut total_value = 0.0;
            let mut members = Vec::new();
            let mut restarts = 0;
            let mut residual: f64 = 0.0;
            let mut best_gap = 0.0;
            let mut converged = true;
            for (stream, sector) in [(1u64, &even), (2u64, &odd)] {
                let weight: f64 = sector.iter().map(|&i| m[(i, i)].re).sum();
                if weight < SECTOR_EPS {
                    continue;
                }
                let mut block = DMatrix::zeros(4, 4);
                for &i in sector {
                    for &j in sector {
                        block[(i, j)] = m[(i, j)] / weight;
                    }
                }
                let outcome = solve_block(&block, config, stream)?;
                total_value += weight * outcome.value;
                best_gap += weight * outcome.best_gap;
                restarts += outcome.restarts;
                residual = residual.max(outcome.residual);
                converged &= outcome.converged;
                members.extend(
                    outcome
                        .members
                        .into_iter()
                        .map(|(p, v)| (weight * p, v)),
                );
            }
            let outcome = BlockOutcome {
                value: total_value,
                members,
                restarts,
                best_gap,
                residual,
                converged,
            };
            Ok(package(rho, "eof-roof-ssr", outcome))
        }
    }
}

fn package(
    rho: &DensityMatrix,
    measure: &str,
    outcome: BlockOutcome,
) -> (EntanglementReport, RoofDecomposition) {
    let report = EntanglementReport {
        measure: measure.to_string(),
        value: outcome.value,
        restarts: outcome.restarts,
        best_gap: outcome.best_gap,
        residual: outcome.residual,
        converged: outcome.converged,
    };
    let decomposition = RoofDecomposition {
        order: rho.order().clone(),
        members: outcome.members,
    };
    (report, decomposition)
}

/// Roof of one 4x4 unit-trace block.
fn solve_block(mat: &DMatrix<Complex64>, config: &RoofConfig, stream: u64) -> Result<BlockOutcome> {
    let eigen = nalgebra::linalg::SymmetricEigen::new(mat.clone());
    let mut pairs: Vec<(f64, DVector<Complex64>)> = (0..4)
        .filter(|&k| eigen.eigenvalues[k] > RANK_TOL)
        .map(|k| (eigen.eigenvalues[k], eigen.eigenvectors.column(k).into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let rank = pairs.len();

    // W columns are sqrt(lambda) v; any decomposition mixes these columns.
    let mut w = DMatrix::zeros(4, rank);
    for (col, (lambda, v)) in pairs.iter().enumerate() {
        for row in 0..4 {
            w[(row, col)] = v[row] * lambda.sqrt();
        }
    }

    if rank == 1 {
        let phi: Vec<Complex64> = (0..4).map(|i| w[(i, 0)]).collect();
        let (value, _, _) = member_objective(&phi);
        let norm = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<Complex64> = phi.iter().map(|z| z / norm).collect();
        return Ok(BlockOutcome {
            value,
            members: vec![(norm * norm, psi)],
            restarts: 0,
            best_gap: 0.0,
            residual: 0.0,
            converged: true,
        });
    }

    let k = config.decomposition_size.unwrap_or(2 * rank);
    if k < rank {
        return Err(Error::Optimization(format!(
            "decomposition size {k} is smaller than the state rank {rank}"
        )));
    }

    let mut best: Option<(f64, DMatrix<Complex64>, f64, bool, u32)> = None;
    let mut second_value = f64::INFINITY;
    for restart in 0..config.restarts.max(1) {
        let seed = config
            .seed
            .wrapping_add(stream.wrapping_mul(0x517c_c1b7_2722_0a95))
            .wrapping_add((u64::from(restart) + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u0 = random_isometry(k, rank, &mut rng);
        let (value, u, residual, converged) = minimize(&w, u0, config);
        match &best {
            Some((best_value, ..)) if value >= *best_value => {
                second_value = second_value.min(value);
            }
            _ => {
                if let Some((prev, ..)) = &best {
                    second_value = second_value.min(*prev);
                }
                best = Some((value, u, residual, converged, restart));
            }
        }
    }
    let (value, u, residual, converged, _) = best.expect("at least one restart");

    let mut members = Vec::new();
    for j in 0..k {
        let phi: Vec<Complex64> = (0..4)
            .map(|i| (0..rank).map(|a| w[(i, a)] * u[(j, a)]).sum())
            .collect();
        let p: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        if p < MEMBER_EPS {
            continue;
        }
        let psi: Vec<Complex64> = phi.iter().map(|z| z / p.sqrt()).collect();
        members.push((p, psi));
    }

    let best_gap = if second_value.is_finite() { second_value - value } else { 0.0 };
    Ok(BlockOutcome {
        value,
        members,
        restarts: config.restarts.max(1),
        best_gap,
        residual,
        converged,
    })
}

/// Entropy contribution and gradient pieces of one unnormalized member.
/// Returns (objective term, weight p, 2x2 matrix log2(tau) on the support).
fn member_objective(phi: &[Complex64]) -> (f64, f64, [[Complex64; 2]; 2]) {
    // tau[a][a'] = sum_b phi[2a+b] conj(phi[2a'+b])
    let a = phi[0].norm_sqr() + phi[1].norm_sqr();
    let b = phi[2].norm_sqr() + phi[3].norm_sqr();
    let off = phi[0] * phi[2].conj() + phi[1] * phi[3].conj();
    let p = a + b;

    let zero = [[c(0.0, 0.0); 2]; 2];
    if p < LOG_FLOOR {
        return (0.0, 0.0, zero);
    }

    let mid = (a + b) / 2.0;
    let disc = (((a - b) / 2.0).powi(2) + off.norm_sqr()).sqrt();
    let mu1 = mid + disc;
    let mu2 = (mid - disc).max(0.0);

    let ent = |mu: f64| if mu > 0.0 { -mu * mu.log2() } else { 0.0 };
    let term = ent(mu1) + ent(mu2) + p * p.log2();

    let f1 = mu1.max(LOG_FLOOR).log2();
    let f2 = mu2.max(LOG_FLOOR).log2();
    let log_tau = if disc < 1e-15 {
        [[c(f1, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(f1, 0.0)]]
    } else {
        // Spectral projector route: P1 = (tau - mu2 I) / (mu1 - mu2).
        let scale = 1.0 / (2.0 * disc);
        let p00 = c((a - mu2) * scale, 0.0);
        let p11 = c((b - mu2) * scale, 0.0);
        let p01 = off * scale;
        [
            [
                p00 * (f1 - f2) + c(f2, 0.0),
                p01 * (f1 - f2),
            ],
            [
                p01.conj() * (f1 - f2),
                p11 * (f1 - f2) + c(f2, 0.0),
            ],
        ]
    };
    (term, p, log_tau)
}

/// Objective and Euclidean Wirtinger gradient dE/dU* over all members.
fn objective_and_gradient(w: &DMatrix<Complex64>, u: &DMatrix<Complex64>) -> (f64, DMatrix<Complex64>) {
    let (k, r) = u.shape();
    let mut energy = 0.0;
    let mut grad = DMatrix::zeros(k, r);
    for j in 0..k {
        let phi: Vec<Complex64> = (0..4)
            .map(|i| (0..r).map(|a| w[(i, a)] * u[(j, a)]).sum())
            .collect();
        let (term, p, log_tau) = member_objective(&phi);
        energy += term;
        if p < LOG_FLOOR {
            continue;
        }
        // g = log2(p) phi - (log2(tau) (x) I) phi
        let lp = p.log2();
        let mut g = [c(0.0, 0.0); 4];
        for a in 0..2 {
            for bit in 0..2 {
                let i = 2 * a + bit;
                g[i] = phi[i] * lp
                    - (log_tau[a][0] * phi[bit] + log_tau[a][1] * phi[2 + bit]);
            }
        }
        for a in 0..r {
            grad[(j, a)] = (0..4).map(|i| w[(i, a)].conj() * g[i]).sum();
        }
    }
    (energy, grad)
}

/// Riemannian gradient on the Stiefel manifold: G - U herm(U^dagger G).
fn tangent_project(u: &DMatrix<Complex64>, g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let utg = u.adjoint() * g;
    let herm = (&utg + utg.adjoint()) * c(0.5, 0.0);
    g - u * herm
}

/// Thin QR retraction with the R diagonal rotated positive, so the result
/// is a deterministic function of the input.
fn retract(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for col in 0..q.ncols() {
        let d = r[(col, col)];
        if d.norm() > 1e-300 {
            let phase = (d / d.norm()).conj();
            for row in 0..q.nrows() {
                q[(row, col)] *= phase;
            }
        }
    }
    q
}

fn random_isometry(k: usize, r: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(k, r, |_, _| {
        c(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    retract(&g)
}

/// Projected gradient descent with Armijo backtracking on one start point.
/// Returns (value, point, projected-gradient norm, stall reached).
fn minimize(
    w: &DMatrix<Complex64>,
    mut u: DMatrix<Complex64>,
    config: &RoofConfig,
) -> (f64, DMatrix<Complex64>, f64, bool) {
    let (mut energy, mut grad) = objective_and_gradient(w, &u);
    let mut step = 0.5;
    let mut stalls = 0;
    let mut converged = false;
    for _ in 0..config.max_iters {
        let direction = tangent_project(&u, &grad);
        let slope: f64 = direction.iter().map(|z| z.norm_sqr()).sum();
        if slope.sqrt() < 1e-9 {
            converged = true;
            break;
        }
        let mut accepted = false;
        let mut trial_step = step;
        for _ in 0..40 {
            let trial = retract(&(&u - &direction * c(trial_step, 0.0)));
            let (trial_energy, trial_grad) = objective_and_gradient(w, &trial);
            if trial_energy <= energy - 1e-4 * trial_step * slope {
                let improvement = energy - trial_energy;
                u = trial;
                energy = trial_energy;
                grad = trial_grad;
                step = (trial_step * 2.0).min(4.0);
                accepted = true;
                if improvement < config.stall_tol {
                    stalls += 1;
                } else {
                    stalls = 0;
                }
                break;
            }
            trial_step *= 0.5;
        }
        if !accepted || stalls >= 3 {
            converged = accepted;
            break;
        }
    }
    let residual = tangent_project(&u, &grad)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    (energy, u, residual, converged)
}
