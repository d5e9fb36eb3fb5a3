//! Delayed-choice eraser with a path-entangled photon pair.
//!
//! Photon A is always read out in the `|+>/|->` basis (detectors A1/A2).
//! Photon B reaches the which-way detectors B1 (`|0>`) / B2 (`|1>`) with
//! probability `q`, otherwise the interference detectors B3 (`|+>`) / B4
//! (`|->`).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, outer, real, CMatrix};
use crate::qstate::{named_ket, DensityMatrix, QStateError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EraserError {
    #[error("branch probability {0} is outside [0, 1]")]
    BadBranch(f64),
    #[error("need at least one shot")]
    NoShots,
    #[error(transparent)]
    QState(#[from] QStateError),
}

pub const DEFAULT_BRANCH_PROB: f64 = 0.5;

/// Detector projectors: `[A1, A2]` and `[B1, B2, B3, B4]` (the latter
/// without the branch weights).
fn projectors() -> ([CMatrix; 2], [CMatrix; 4]) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = [real(1.0), real(0.0)];
    let one = [real(0.0), real(1.0)];
    let plus = [real(s), real(s)];
    let minus = [real(s), real(-s)];
    let p = |v: &[num_complex::Complex64]| outer(v, v);
    ([p(&plus), p(&minus)], [p(&zero), p(&one), p(&plus), p(&minus)])
}

fn branch_weight(q: f64, j: usize) -> f64 {
    if j < 2 {
        q
    } else {
        1.0 - q
    }
}

/// Exact click statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EraserOutcomeTable {
    pub branch_prob: f64,
    /// `joint[i][j] = P(A_{i+1}, B_{j+1})`
    pub joint: [[f64; 4]; 2],
    pub marginal_a: [f64; 2],
    pub marginal_b: [f64; 4],
    /// Signed `P(A1) - P(A2)` of photon A alone.
    pub visibility_a: f64,
    /// Signed `(P(A1|Bj) - P(A2|Bj))`; `None` when `P(Bj) = 0`.
    pub conditional_visibility: [Option<f64>; 4],
}

pub fn default_state() -> DensityMatrix {
    named_ket("bell:phi+").expect("known state").projector()
}

pub fn eraser_probabilities(rho: &DensityMatrix, branch_prob: f64) -> Result<EraserOutcomeTable, EraserError> {
    if !(0.0..=1.0).contains(&branch_prob) {
        return Err(EraserError::BadBranch(branch_prob));
    }
    if rho.dims() != [2, 2] {
        return Err(QStateError::DimensionMismatch("two path qubits expected".into()).into());
    }
    let (pa, pb) = projectors();
    let mut joint = [[0.0; 4]; 2];
    for (i, a) in pa.iter().enumerate() {
        for (j, b) in pb.iter().enumerate() {
            let p = rho.product_expectation(&[a.clone(), b.clone()])?.re;
            joint[i][j] = branch_weight(branch_prob, j) * p.max(0.0);
        }
    }
    let marginal_a = [joint[0].iter().sum(), joint[1].iter().sum()];
    let marginal_b: [f64; 4] = std::array::from_fn(|j| joint[0][j] + joint[1][j]);
    let conditional_visibility = std::array::from_fn(|j| {
        let pj = marginal_b[j];
        (pj > 0.0).then(|| (joint[0][j] - joint[1][j]) / pj)
    });
    Ok(EraserOutcomeTable {
        branch_prob,
        joint,
        marginal_a,
        marginal_b,
        visibility_a: marginal_a[0] - marginal_a[1],
        conditional_visibility,
    })
}

/// State of photon A given a click at `B_{j+1}` (`j` in `0..4`), with its
/// probability. `None` if that detector never clicks.
pub fn conditional_a_state(
    rho: &DensityMatrix,
    branch_prob: f64,
    j: usize,
) -> Result<Option<(f64, DensityMatrix)>, EraserError> {
    let (_, pb) = projectors();
    let w = branch_weight(branch_prob, j);
    let filtered = linalg::kron(&linalg::identity(2), &pb[j]) * rho.entries() * real(w);
    let unnorm = DensityMatrix::new_unchecked(vec![2, 2], filtered)?.partial_trace(&[0])?;
    let p = unnorm.entries().trace().re;
    if p <= 0.0 {
        return Ok(None);
    }
    let state = DensityMatrix::new_unchecked(vec![2], unnorm.entries() / real(p))?;
    Ok(Some((p, state)))
}

/// Which-way distinguishability `|<sz>|` and phase-optimized visibility
/// `2|rho_01|` of a path qubit.
pub fn path_duality(a: &DensityMatrix) -> (f64, f64) {
    let d = (a.get(0, 0).re - a.get(1, 1).re).abs();
    let v = 2.0 * a.get(0, 1).norm();
    (d, v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClickCounts {
    pub shots: u64,
    pub seed: u64,
    /// `counts[i][j]` coincidences of `A_{i+1}` with `B_{j+1}`.
    pub counts: [[u64; 4]; 2],
}

impl ClickCounts {
    pub fn conditional_visibility(&self, j: usize) -> Option<f64> {
        let n = self.counts[0][j] + self.counts[1][j];
        (n > 0).then(|| (self.counts[0][j] as f64 - self.counts[1][j] as f64) / n as f64)
    }

    pub fn visibility_a(&self) -> f64 {
        let a1: u64 = self.counts[0].iter().sum();
        let a2: u64 = self.counts[1].iter().sum();
        (a1 as f64 - a2 as f64) / self.shots as f64
    }
}

/// Multinomial sample of `shots` coincidences, drawn cell by cell as
/// conditional binomials.
pub fn sample_clicks(table: &EraserOutcomeTable, shots: u64, seed: u64) -> Result<ClickCounts, EraserError> {
    if shots == 0 {
        return Err(EraserError::NoShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells: Vec<f64> = table.joint.iter().flatten().copied().collect();
    let mut remaining = shots;
    let mut mass_left: f64 = cells.iter().sum();
    let mut flat = [0u64; 8];
    for (k, &p) in cells.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k == cells.len() - 1 || mass_left <= 0.0 {
            flat[k] = remaining;
            break;
        }
        let frac = (p / mass_left).clamp(0.0, 1.0);
        let n = Binomial::new(remaining, frac).expect("probability in [0,1]").sample(&mut rng);
        flat[k] = n;
        remaining -= n;
        mass_left -= p;
    }
    let mut counts = [[0u64; 4]; 2];
    for (k, n) in flat.into_iter().enumerate() {
        counts[k / 4][k % 4] = n;
    }
    Ok(ClickCounts { shots, seed, counts })
}

/// Reassembles photon A's reduced state from the conditional states.
pub fn mix_conditionals(rho: &DensityMatrix, branch_prob: f64) -> Result<CMatrix, EraserError> {
    let mut acc = CMatrix::zeros(2, 2);
    for j in 0..4 {
        if let Some((p, a)) = conditional_a_state(rho, branch_prob, j)? {
            acc += a.entries() * real(p);
        }
    }
    Ok(acc)
}
