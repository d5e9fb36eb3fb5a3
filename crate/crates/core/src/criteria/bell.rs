use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{is_dichotomic, require_dims, CriteriaError};
use crate::linalg::CMatrix;
use crate::qstate::DensityMatrix;
use crate::verdict::{Classification, CriterionVerdict};

/// One local observable per party and setting index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Setting {
    One,
    Two,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChshResult {
    /// `<A1B1>, <A2B2>, <A2B1>, <A1B2>` in that order.
    pub correlations: [f64; 4],
    pub verdict: CriterionVerdict,
}

/// `|<A1B1 + A2B2 + A2B1 - A1B2>| <= 2` for local hidden variable models.
pub fn chsh(
    rho: &DensityMatrix,
    a1: &CMatrix,
    a2: &CMatrix,
    b1: &CMatrix,
    b2: &CMatrix,
) -> Result<ChshResult, CriteriaError> {
    require_dims(rho, &[2, 2])?;
    for (name, op) in [("A1", a1), ("A2", a2), ("B1", b1), ("B2", b2)] {
        if op.shape() != (2, 2) || !is_dichotomic(op) {
            return Err(CriteriaError::NotDichotomic(name.into()));
        }
    }
    let e = |a: &CMatrix, b: &CMatrix| -> Result<f64, CriteriaError> {
        Ok(rho.product_expectation(&[a.clone(), b.clone()])?.re)
    };
    let correlations = [e(a1, b1)?, e(a2, b2)?, e(a2, b1)?, e(a1, b2)?];
    let s = correlations[0] + correlations[1] + correlations[2] - correlations[3];
    Ok(ChshResult {
        correlations,
        verdict: CriterionVerdict::new("chsh", s.abs(), 2.0, Classification::Entangled),
    })
}

/// The 16 deterministic local strategies `(a1, a2, b1, b2)` with values in {+1, -1}.
pub const CLASSICAL_STRATEGIES: usize = 16;

fn strategy(s: usize) -> [f64; 4] {
    let bit = |i: usize| if (s >> i) & 1 == 0 { 1.0 } else { -1.0 };
    [bit(3), bit(2), bit(1), bit(0)]
}

fn value(s: usize, (i, j): (Setting, Setting)) -> f64 {
    let v = strategy(s);
    let a = match i {
        Setting::One => v[0],
        Setting::Two => v[1],
    };
    let b = match j {
        Setting::One => v[2],
        Setting::Two => v[3],
    };
    a * b
}

fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for s in start..n {
            if n - s < m - cur.len() {
                break;
            }
            cur.push(s);
            rec(s + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// Range of `<A_i B_j>` for `target` over all mixtures of deterministic
/// strategies reproducing the `fixed` correlations. `None` if infeasible.
///
/// Solved exactly as an LP by enumerating basic feasible solutions: every
/// vertex of the feasible polytope has at most `1 + fixed.len()` nonzero
/// weights, so each candidate basis is a small square linear system.
pub fn classical_correlation_bounds(
    fixed: &[((Setting, Setting), f64)],
    target: (Setting, Setting),
) -> Option<(f64, f64)> {
    let m = 1 + fixed.len();
    let mut rhs = vec![1.0];
    rhs.extend(fixed.iter().map(|(_, v)| *v));
    let b = DVector::from_vec(rhs);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for basis in subsets(CLASSICAL_STRATEGIES, m) {
        let a = DMatrix::from_fn(m, m, |r, col| {
            let s = basis[col];
            if r == 0 {
                1.0
            } else {
                value(s, fixed[r - 1].0)
            }
        });
        let Some(q) = a.clone().lu().solve(&b) else { continue };
        if q.iter().any(|x| !x.is_finite() || *x < -1e-12) {
            continue;
        }
        // singular bases can return a non-solution instead of failing
        let check = &a * &q;
        if (check - &b).amax() > 1e-9 {
            continue;
        }
        let obj: f64 = basis.iter().zip(q.iter()).map(|(&s, w)| w * value(s, target)).sum();
        lo = lo.min(obj);
        hi = hi.max(obj);
    }
    lo.is_finite().then_some((lo, hi))
}

/// Interval for `<A1B2>` when `<A1B1> = <A2B2> = <A2B1> = p2 - p1`, the value
/// produced by sock configurations of weights `p1` (anti-correlated) and
/// `p2` (correlated).
pub fn classical_sock_bound(p1: f64, p2: f64) -> Result<(f64, f64), CriteriaError> {
    if !(p1 >= 0.0 && p2 >= 0.0 && (p1 + p2 - 1.0).abs() < 1e-12) {
        return Err(CriteriaError::BadProbability(p1, p2));
    }
    let v = p2 - p1;
    use Setting::*;
    let fixed = [((One, One), v), ((Two, Two), v), ((Two, One), v)];
    Ok(classical_correlation_bounds(&fixed, (One, Two)).expect("sock correlations are classically feasible"))
}
