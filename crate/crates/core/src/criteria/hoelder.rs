use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{require_dims, CriteriaError};
use crate::linalg::{c, kron_all, outer, CMatrix};
use crate::optim::{multistart, nelder_mead, NelderMeadOptions};
use crate::qstate::DensityMatrix;
use crate::verdict::{Classification, CriterionVerdict};

/// Operator choice found by [`optimize_hoelder`] on `rho_alpha(2.1)`.
pub const CAUCHY4_CONFIG: &str = include_str!("../../data/cauchy4_operators.toml");

/// Local operators `(X1, X2)` for the parties A, B, C.
#[derive(Debug, Clone, PartialEq)]
pub struct HoelderOperators {
    pub a: [CMatrix; 2],
    pub b: [CMatrix; 2],
    pub c: [CMatrix; 2],
}

/// Four-root bound for fully separable three-party states:
///
/// `|<A1A2 B1B2 C1C2>| <= (<A1A1† B1B1† C2†C2> <A1A1† B2†B2 C1C1†>
///                         <A2†A2 B1B1† C1C1†> <A2†A2 B2†B2 C2†C2>)^(1/4)`
pub fn hoelder_four_root_criterion(rho: &DensityMatrix, ops: &HoelderOperators) -> Result<CriterionVerdict, CriteriaError> {
    let dims = rho.dims();
    let parties = [&ops.a, &ops.b, &ops.c];
    if dims.len() != 3 || parties.iter().zip(dims).any(|(p, d)| p.iter().any(|o| o.shape() != (*d, *d))) {
        return Err(CriteriaError::DimensionMismatch("one operator pair per party of a tripartite state".into()));
    }
    let out = |x: &[CMatrix; 2]| &x[0] * x[0].adjoint();
    let inn = |x: &[CMatrix; 2]| x[1].adjoint() * &x[1];
    let e = |ms: [CMatrix; 3]| -> Result<f64, CriteriaError> { Ok(rho.expectation(&kron_all(&ms))?.re) };
    let lhs = rho
        .expectation(&kron_all(&[&ops.a[0] * &ops.a[1], &ops.b[0] * &ops.b[1], &ops.c[0] * &ops.c[1]]))?
        .norm();
    let p = [
        e([out(&ops.a), out(&ops.b), inn(&ops.c)])?,
        e([out(&ops.a), inn(&ops.b), out(&ops.c)])?,
        e([inn(&ops.a), out(&ops.b), out(&ops.c)])?,
        e([inn(&ops.a), inn(&ops.b), inn(&ops.c)])?,
    ];
    let scale = [
        kron_all(&[out(&ops.a), out(&ops.b), inn(&ops.c)]).norm(),
        kron_all(&[out(&ops.a), inn(&ops.b), out(&ops.c)]).norm(),
        kron_all(&[inn(&ops.a), out(&ops.b), out(&ops.c)]).norm(),
        kron_all(&[inn(&ops.a), inn(&ops.b), inn(&ops.c)]).norm(),
    ];
    Ok(CriterionVerdict::new("cauchy4", lhs, four_root(p, scale, rho.size()), Classification::Entangled))
}

/// `(P1 P2 P3 P4)^(1/4)` with each factor raised by its rounding error
/// (`scale` bounds the operator norm). The fourth root turns a 1e-17 error in
/// a vanishing factor into ~1e-4 on the bound, which would otherwise let
/// rounding noise in `lhs` register as a violation.
fn four_root(p: [f64; 4], scale: [f64; 4], dim: usize) -> f64 {
    let slack = (dim * dim) as f64 * f64::EPSILON;
    p.iter().zip(scale).map(|(x, s)| x.max(0.0) + slack * s).product::<f64>().powf(0.25)
}

/// Rank-one choice per party: `X1 X2 = |x><xi|`, so that `X1X1† = |x><x|`
/// and `X2†X2 = |xi><xi|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourRootChoice {
    /// `|x>` for A, B, C.
    pub x: [Vec<Complex64>; 3],
    /// `|xi>` for A, B, C.
    pub xi: [Vec<Complex64>; 3],
}

impl FourRootChoice {
    /// Operators `X1 = |x><0|`, `X2 = |0><xi|` realizing the choice.
    pub fn operators(&self) -> HoelderOperators {
        let pair = |i: usize| {
            let mut u = vec![c(0.0, 0.0); self.x[i].len()];
            u[0] = c(1.0, 0.0);
            [outer(&self.x[i], &u), outer(&u, &self.xi[i])]
        };
        HoelderOperators {
            a: pair(0),
            b: pair(1),
            c: pair(2),
        }
    }
}

/// `cos(t/2)|0> + e^{i p} sin(t/2)|1>`
pub fn qubit_vector(theta: f64, phi: f64) -> Vec<Complex64> {
    vec![c((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)]
}

fn product3(a: &[Complex64], b: &[Complex64], cc: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len() * cc.len());
    for x in a {
        for y in b {
            for z in cc {
                out.push(x * y * z);
            }
        }
    }
    out
}

fn sandwich(m: &CMatrix, bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for (i, x) in bra.iter().enumerate() {
        let row: Complex64 = ket.iter().enumerate().map(|(j, y)| m[(i, j)] * y).sum();
        acc += x.conj() * row;
    }
    acc
}

/// `(lhs, [P(x,x,xi), P(x,xi,x), P(xi,x,x), P(xi,xi,xi)])`
fn rank_one_parts(m: &CMatrix, ch: &FourRootChoice) -> (f64, [f64; 4]) {
    let [xa, xb, xc] = &ch.x;
    let [ya, yb, yc] = &ch.xi;
    let lhs = sandwich(m, &product3(ya, yb, yc), &product3(xa, xb, xc)).norm();
    let diag = |u: Vec<Complex64>| sandwich(m, &u, &u).re;
    let p = [
        diag(product3(xa, xb, yc)),
        diag(product3(xa, yb, xc)),
        diag(product3(ya, xb, xc)),
        diag(product3(ya, yb, yc)),
    ];
    (lhs, p)
}

/// Rank-one fast path; equals [`hoelder_four_root_criterion`] on
/// `choice.operators()`.
pub fn hoelder_rank_one(rho: &DensityMatrix, choice: &FourRootChoice) -> Result<CriterionVerdict, CriteriaError> {
    let dims = rho.dims();
    if dims.len() != 3 || (0..3).any(|i| choice.x[i].len() != dims[i] || choice.xi[i].len() != dims[i]) {
        return Err(CriteriaError::DimensionMismatch("rank-one vectors do not match dims".into()));
    }
    let (lhs, p) = rank_one_parts(rho.entries(), choice);
    let n2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let [xa, xb, xc] = &choice.x;
    let [ya, yb, yc] = &choice.xi;
    let scale = [
        n2(xa) * n2(xb) * n2(yc),
        n2(xa) * n2(yb) * n2(xc),
        n2(ya) * n2(xb) * n2(xc),
        n2(ya) * n2(yb) * n2(yc),
    ];
    let rhs = four_root(p, scale, rho.size());
    Ok(CriterionVerdict::new("cauchy4", lhs, rhs, Classification::Entangled))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourRootSearch {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FourRootSearch {
    fn default() -> Self {
        Self { restarts: 64, seed: 2014 }
    }
}

const LOG_FLOOR: f64 = 1e-300;

/// `sum log P - 4 log lhs`; negative exactly when the criterion fires.
fn log_objective(m: &CMatrix, ch: &FourRootChoice) -> f64 {
    let (lhs, p) = rank_one_parts(m, ch);
    p.iter().map(|x| x.max(LOG_FLOOR).ln()).sum::<f64>() - 4.0 * lhs.max(LOG_FLOOR).ln()
}

fn choice_from_angles(x: &[f64]) -> FourRootChoice {
    let v = |i: usize| qubit_vector(x[2 * i], x[2 * i + 1]);
    FourRootChoice {
        x: [v(0), v(2), v(4)],
        xi: [v(1), v(3), v(5)],
    }
}

fn equatorial(phases: &[f64]) -> Vec<f64> {
    phases.iter().flat_map(|&p| [std::f64::consts::FRAC_PI_2, p]).collect()
}

/// Two-stage search over qubit rank-one choices. Stage one restricts all six
/// vectors to the equator (six phases), where the coherence `rho_{1,8}` is
/// reached without the diagonal terms vanishing; stage two frees all twelve
/// Bloch angles starting from the stage-one optimum.
pub fn optimize_hoelder(
    rho: &DensityMatrix,
    search: &FourRootSearch,
) -> Result<(FourRootChoice, CriterionVerdict), CriteriaError> {
    require_dims(rho, &[2, 2, 2])?;
    let m = rho.entries();
    let stage1 = |p: &[f64]| log_objective(m, &choice_from_angles(&equatorial(p)));
    let sample = |r: &mut crate::random::StateRng| {
        (0..6).map(|_| r.random_range(0.0..std::f64::consts::TAU)).collect::<Vec<f64>>()
    };
    let opts = NelderMeadOptions {
        step: 0.5,
        max_iters: 3000,
        sd_tolerance: 1e-15,
    };
    let best = multistart(&stage1, sample, search.restarts, search.seed, opts);
    let full = |x: &[f64]| log_objective(m, &choice_from_angles(x));
    let x0 = equatorial(&best.x);
    let refined = nelder_mead(&full, &x0, NelderMeadOptions { step: 0.1, ..opts });
    let x = if refined.f < full(&x0) { refined.x } else { x0 };
    let choice = choice_from_angles(&x);
    let verdict = hoelder_rank_one(rho, &choice)?.with_note("optimized rank-one operators");
    Ok((choice, verdict))
}

/// Operator choice stored on disk, with where it was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredFourRootChoice {
    pub found_at_alpha: f64,
    pub restarts: usize,
    pub seed: u64,
    /// `4 log(lhs / rhs)` at `found_at_alpha`.
    pub log_ratio: f64,
    pub choice: FourRootChoice,
}

impl StoredFourRootChoice {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        let body = toml::to_string(self).expect("plain data serializes");
        format!(
            "# Rank-one four-root operator choice: X1 X2 = |x><xi| per party (A, B, C),\n\
             # complex amplitudes as [re, im]. Regenerate with `qduality criteria cauchy4-search`.\n{body}"
        )
    }

    /// The choice shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_toml(CAUCHY4_CONFIG).expect("bundled config parses")
    }

    pub fn search_at(alpha: f64, search: &FourRootSearch) -> Result<Self, CriteriaError> {
        let rho = super::rho_alpha(alpha)?;
        let (choice, _) = optimize_hoelder(&rho, search)?;
        Ok(Self {
            found_at_alpha: alpha,
            restarts: search.restarts,
            seed: search.seed,
            log_ratio: -log_objective(rho.entries(), &choice),
            choice,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::rho_alpha;
    use crate::qstate::named_ket;
    use crate::random::{haar_vector, rng, separable_state};

    fn random_ops(r: &mut crate::random::StateRng) -> HoelderOperators {
        let mut op = || CMatrix::from_iterator(2, 2, haar_vector(4, r).into_iter().map(|z| z * 2.0));
        HoelderOperators {
            a: [op(), op()],
            b: [op(), op()],
            c: [op(), op()],
        }
    }

    #[test]
    fn rank_one_path_matches_operator_form() {
        let mut r = rng(51);
        let rho = rho_alpha(2.3).unwrap();
        for _ in 0..10 {
            let x: Vec<f64> = (0..12).map(|_| r.random_range(0.0..6.0)).collect();
            let ch = choice_from_angles(&x);
            let fast = hoelder_rank_one(&rho, &ch).unwrap();
            let slow = hoelder_four_root_criterion(&rho, &ch.operators()).unwrap();
            assert!((fast.lhs - slow.lhs).abs() < 1e-12 && (fast.rhs - slow.rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_states_never_fire() {
        let mut r = rng(52);
        let mut g = rng(53);
        for i in 0..200 {
            let rho = separable_state(&[2, 2, 2], &mut r);
            let v = hoelder_four_root_criterion(&rho, &random_ops(&mut g)).unwrap();
            assert!(!v.violated, "{v:?}");
            if i % 40 == 0 {
                let s = FourRootSearch { restarts: 4, seed: i };
                assert!(!optimize_hoelder(&rho, &s).unwrap().1.violated);
            }
        }
    }

    #[test]
    fn ghz_fires_with_computational_vectors() {
        let rho = named_ket("ghz3").unwrap().projector();
        let zero = qubit_vector(0.0, 0.0);
        let one = qubit_vector(std::f64::consts::PI, 0.0);
        let ch = FourRootChoice {
            x: [zero.clone(), zero.clone(), zero],
            xi: [one.clone(), one.clone(), one],
        };
        let v = hoelder_rank_one(&rho, &ch).unwrap();
        // P(0,0,1) = P(0,1,0) = P(1,0,0) = 0; rhs is only the rounding allowance
        assert!((v.lhs - 0.5).abs() < 1e-12 && v.rhs < 1e-9);
        assert!(v.violated);
    }

    #[test]
    fn bundled_choice_detects_rho_alpha_inside_window() {
        let stored = StoredFourRootChoice::bundled();
        assert!((stored.found_at_alpha - 2.1).abs() < 1e-12);
        for a in [2.0, 2.1, 2.3] {
            assert!(hoelder_rank_one(&rho_alpha(a).unwrap(), &stored.choice).unwrap().violated);
        }
        assert!(!hoelder_rank_one(&rho_alpha(2.6).unwrap(), &stored.choice).unwrap().violated);
    }

    #[test]
    fn stored_choice_round_trips() {
        let s = StoredFourRootChoice::bundled();
        assert_eq!(StoredFourRootChoice::from_toml(&s.to_toml()).unwrap(), s);
    }
}
