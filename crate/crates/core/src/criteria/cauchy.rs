use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::CriteriaError;
use crate::fock::TwoModeState;
use crate::linalg::{c, kron, outer, real, CMatrix};
use crate::optim::{multistart, NelderMeadOptions};
use crate::qstate::{DensityMatrix, Ket};
use crate::verdict::{Classification, CriterionVerdict};

fn require_bipartite(rho: &DensityMatrix, ops_a: &[&CMatrix], ops_b: &[&CMatrix]) -> Result<(), CriteriaError> {
    let dims = rho.dims();
    let ok = dims.len() == 2
        && ops_a.iter().all(|o| o.shape() == (dims[0], dims[0]))
        && ops_b.iter().all(|o| o.shape() == (dims[1], dims[1]));
    if ok {
        Ok(())
    } else {
        Err(CriteriaError::DimensionMismatch(format!(
            "local operators do not match the bipartite dims {dims:?}"
        )))
    }
}

/// `|<A1A2 (x) B1B2>|^2 <= <A1A1† (x) B2†B2> <A2†A2 (x) B1B1†>` for separable states.
pub fn cauchy_schwarz_criterion(
    rho: &DensityMatrix,
    a1: &CMatrix,
    a2: &CMatrix,
    b1: &CMatrix,
    b2: &CMatrix,
) -> Result<CriterionVerdict, CriteriaError> {
    require_bipartite(rho, &[a1, a2], &[b1, b2])?;
    let lhs = rho.expectation(&kron(&(a1 * a2), &(b1 * b2)))?.norm_sqr();
    let r1 = rho.expectation(&kron(&(a1 * a1.adjoint()), &(b2.adjoint() * b2)))?.re;
    let r2 = rho.expectation(&kron(&(a2.adjoint() * a2), &(b1 * b1.adjoint())))?.re;
    Ok(CriterionVerdict::new("cauchy-schwarz", lhs, r1 * r2, Classification::Entangled))
}

/// Rank-one operator choice `A1A2 = |a><alpha|`, `B1B2 = |b><beta|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneChoice {
    pub a: Vec<Complex64>,
    pub alpha: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub beta: Vec<Complex64>,
}

impl RankOneChoice {
    /// Local operators realizing the choice, with an arbitrary unit vector
    /// in the middle: `A1 = |a><u|`, `A2 = |u><alpha|`, same for B.
    pub fn operators(&self) -> [CMatrix; 4] {
        let unit = |d: usize| {
            let mut v = vec![c(0.0, 0.0); d];
            v[0] = c(1.0, 0.0);
            v
        };
        let (u, v) = (unit(self.a.len()), unit(self.b.len()));
        [
            outer(&self.a, &u),
            outer(&u, &self.alpha),
            outer(&self.b, &v),
            outer(&v, &self.beta),
        ]
    }
}

fn sandwich(rho: &DensityMatrix, bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
    let m = rho.entries();
    let mut acc = c(0.0, 0.0);
    for (i, x) in bra.iter().enumerate() {
        if x.norm_sqr() == 0.0 {
            continue;
        }
        let row: Complex64 = ket.iter().enumerate().map(|(j, y)| m[(i, j)] * y).sum();
        acc += x.conj() * row;
    }
    acc
}

fn product(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    u.iter().flat_map(|x| v.iter().map(move |y| x * y)).collect()
}

/// `(|<alpha beta|rho|a b>|^2, <a beta|rho|a beta> <alpha b|rho|alpha b>)`
fn rank_one_sides(rho: &DensityMatrix, ch: &RankOneChoice) -> (f64, f64) {
    let lhs = sandwich(rho, &product(&ch.alpha, &ch.beta), &product(&ch.a, &ch.b)).norm_sqr();
    let abeta = product(&ch.a, &ch.beta);
    let alphab = product(&ch.alpha, &ch.b);
    let rhs = sandwich(rho, &abeta, &abeta).re * sandwich(rho, &alphab, &alphab).re;
    (lhs, rhs)
}

/// Rank-one form of the criterion, evaluated directly from matrix elements.
pub fn cauchy_schwarz_rank_one(rho: &DensityMatrix, choice: &RankOneChoice) -> Result<CriterionVerdict, CriteriaError> {
    let dims = rho.dims();
    if dims.len() != 2
        || choice.a.len() != dims[0]
        || choice.alpha.len() != dims[0]
        || choice.b.len() != dims[1]
        || choice.beta.len() != dims[1]
    {
        return Err(CriteriaError::DimensionMismatch("rank-one vectors do not match dims".into()));
    }
    let (lhs, rhs) = rank_one_sides(rho, choice);
    Ok(CriterionVerdict::new("cauchy-schwarz", lhs, rhs, Classification::Entangled))
}

fn unpack(x: &[f64], d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|i| c(x[2 * i], x[2 * i + 1])).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    v.into_iter().map(|z| z / n).collect()
}

fn choice_from_params(x: &[f64], da: usize, db: usize) -> RankOneChoice {
    let (p_a, rest) = x.split_at(2 * da);
    let (p_alpha, rest) = rest.split_at(2 * da);
    let (p_b, p_beta) = rest.split_at(2 * db);
    RankOneChoice {
        a: unpack(p_a, da),
        alpha: unpack(p_alpha, da),
        b: unpack(p_b, db),
        beta: unpack(p_beta, db),
    }
}

const LOG_FLOOR: f64 = 1e-300;

/// Searches rank-one operators maximizing `lhs / rhs` (the ratio is invariant
/// under rescaling each vector, so vectors are normalized) from `restarts`
/// Gaussian starting points.
pub fn optimize_cauchy_schwarz(
    rho: &DensityMatrix,
    restarts: usize,
    seed: u64,
) -> Result<(RankOneChoice, CriterionVerdict), CriteriaError> {
    let dims = rho.dims().to_vec();
    if dims.len() != 2 {
        return Err(CriteriaError::DimensionMismatch("bipartite state expected".into()));
    }
    let (da, db) = (dims[0], dims[1]);
    let n = 4 * (da + db);
    let objective = |x: &[f64]| {
        let (lhs, rhs) = rank_one_sides(rho, &choice_from_params(x, da, db));
        rhs.max(LOG_FLOOR).ln() - lhs.max(LOG_FLOOR).ln()
    };
    let sample = |r: &mut crate::random::StateRng| (0..n).map(|_| StandardNormal.sample(r)).collect::<Vec<f64>>();
    let best = multistart(&objective, sample, restarts, seed, NelderMeadOptions::default());
    let choice = choice_from_params(&best.x, da, db);
    let verdict = cauchy_schwarz_rank_one(rho, &choice)?.with_note("optimized rank-one operators");
    Ok((choice, verdict))
}

/// Result of scanning `p |psi><psi| + (1-p) 1/d` over a grid of `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WernerScan {
    /// Smallest grid `p` where the optimized criterion fires.
    pub cauchy_schwarz: Option<f64>,
    /// Smallest grid `p` with a negative partial transpose.
    pub ppt: Option<f64>,
}

pub fn werner_detection_scan(psi: &Ket, grid: &[f64], restarts: usize, seed: u64) -> Result<WernerScan, CriteriaError> {
    if psi.dims.len() != 2 {
        return Err(CriteriaError::DimensionMismatch("bipartite pure state expected".into()));
    }
    let pure = psi.normalized()?.projector();
    let mixed = DensityMatrix::maximally_mixed(psi.dims.clone());
    let mut out = WernerScan {
        cauchy_schwarz: None,
        ppt: None,
    };
    for &p in grid {
        let rho = DensityMatrix::mixture(&[(p, pure.clone()), (1.0 - p, mixed.clone())])?;
        if out.cauchy_schwarz.is_none() && optimize_cauchy_schwarz(&rho, restarts, seed)?.1.violated {
            out.cauchy_schwarz = Some(p);
        }
        if out.ppt.is_none() && rho.min_pt_eigenvalue(&[1])? < -crate::VIOLATION_TOL {
            out.ppt = Some(p);
        }
        if out.cauchy_schwarz.is_some() && out.ppt.is_some() {
            break;
        }
    }
    Ok(out)
}

/// Truncated annihilation operator on `0..=cutoff`.
pub fn annihilation_matrix(cutoff: usize) -> CMatrix {
    let d = cutoff + 1;
    CMatrix::from_fn(d, d, |i, j| if j == i + 1 { real((j as f64).sqrt()) } else { c(0.0, 0.0) })
}

pub fn creation_matrix(cutoff: usize) -> CMatrix {
    annihilation_matrix(cutoff).adjoint()
}

/// Density matrix of a two-mode ensemble over dims `[cutoff+1, cutoff+1]`,
/// row-major in `(n1, n2)` like the Fock basis. Components are normalized.
pub fn density_from_two_mode(state: &TwoModeState) -> Result<DensityMatrix, CriteriaError> {
    let d = state.cutoff() + 1;
    let mut m = CMatrix::zeros(d * d, d * d);
    for (w, ket) in state.components() {
        let n = ket.norm_sqr();
        if n == 0.0 {
            return Err(CriteriaError::DimensionMismatch("zero-norm component".into()));
        }
        m += outer(ket.amplitudes(), ket.amplitudes()) * real(w / n);
    }
    Ok(DensityMatrix::new(vec![d, d], m)?)
}

/// `|<a^m (b†)^n>|^2 <= <(a†)^m a^m (b†)^n b^n>`, from the general form with
/// `A1 = B2 = 1`, `A2 = a^m`, `B1 = (b†)^n`.
pub fn hillery_zubairy(state: &TwoModeState, m: usize, n: usize) -> Result<CriterionVerdict, CriteriaError> {
    let rho = density_from_two_mode(state)?;
    let d = state.cutoff() + 1;
    let id = CMatrix::identity(d, d);
    let am = annihilation_matrix(state.cutoff()).pow(m as u32);
    let bdn = creation_matrix(state.cutoff()).pow(n as u32);
    Ok(cauchy_schwarz_criterion(&rho, &id, &am, &bdn, &id)?.with_note(format!("hillery-zubairy m={m} n={n}")))
}
