use serde::Serialize;

use super::hoelder::{hoelder_rank_one, optimize_hoelder, FourRootChoice, FourRootSearch};
use super::CriteriaError;
use crate::linalg::{real, CMatrix};
use crate::qstate::DensityMatrix;

/// The three-qubit family with diagonal `(4+a, a, a, a, a, a, a, 4+a)`,
/// off-diagonals `2` at (1,8), (2,7), (4,5) and `-2` at (3,6) (1-based),
/// scaled by `1/(8+8a)`.
///
/// Its smallest eigenvalue is `(a-2)/(8+8a)`, so below `a = 2` the matrix is
/// returned without the positivity check and is not a state.
pub fn rho_alpha(alpha: f64) -> Result<DensityMatrix, CriteriaError> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(CriteriaError::NegativeAlpha(alpha));
    }
    let mut m = CMatrix::zeros(8, 8);
    for i in 0..8 {
        m[(i, i)] = real(alpha);
    }
    m[(0, 0)] = real(4.0 + alpha);
    m[(7, 7)] = real(4.0 + alpha);
    for (i, j, v) in [(0, 7, 2.0), (1, 6, 2.0), (3, 4, 2.0), (2, 5, -2.0)] {
        m[(i, j)] = real(v);
        m[(j, i)] = real(v);
    }
    m /= real(8.0 + 8.0 * alpha);
    Ok(DensityMatrix::new_unchecked(vec![2, 2, 2], m)?)
}

/// Minimum partial-transpose eigenvalue over the three single-party cuts
/// (which cover every bipartition of three parties).
pub fn rho_alpha_min_pt_eigenvalue(alpha: f64) -> Result<f64, CriteriaError> {
    let rho = rho_alpha(alpha)?;
    let mut min = f64::INFINITY;
    for site in 0..3 {
        min = min.min(rho.min_pt_eigenvalue(&[site])?);
    }
    Ok(min)
}

/// How the four-root margin is obtained in a scan.
#[derive(Debug, Clone, PartialEq)]
pub enum FourRootMode {
    Skip,
    Fixed(FourRootChoice),
    Optimize(FourRootSearch),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoAlphaRow {
    pub alpha: f64,
    pub min_pt_eigenvalue: f64,
    pub cauchy4_margin: Option<f64>,
    pub cauchy4_violated: Option<bool>,
}

pub fn rho_alpha_scan(grid: &[f64], mode: &FourRootMode) -> Result<Vec<RhoAlphaRow>, CriteriaError> {
    grid.iter()
        .map(|&alpha| {
            let rho = rho_alpha(alpha)?;
            let verdict = match mode {
                FourRootMode::Skip => None,
                FourRootMode::Fixed(ch) => Some(hoelder_rank_one(&rho, ch)?),
                FourRootMode::Optimize(s) => Some(optimize_hoelder(&rho, s)?.1),
            };
            Ok(RhoAlphaRow {
                alpha,
                min_pt_eigenvalue: rho_alpha_min_pt_eigenvalue(alpha)?,
                cauchy4_margin: verdict.as_ref().map(|v| v.margin),
                cauchy4_violated: verdict.map(|v| v.violated),
            })
        })
        .collect()
}

/// `start:stop:step` with inclusive end (within half a step).
pub fn parse_grid(spec: &str) -> Option<Vec<f64>> {
    let parts: Vec<f64> = spec.split(':').map(|s| s.trim().parse().ok()).collect::<Option<_>>()?;
    let [start, stop, step] = parts[..] else { return None };
    if !(step > 0.0) || stop < start {
        return None;
    }
    let n = ((stop - start) / step + 0.5).floor() as usize;
    Some((0..=n).map(|i| start + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_defect;

    #[test]
    fn trace_and_hermiticity() {
        for a in [0.0, 1.0, 2.0, 5.0] {
            let rho = rho_alpha(a).unwrap();
            assert!((rho.entries().trace().re - 1.0).abs() < 1e-12);
            assert_eq!(hermiticity_defect(rho.entries()), 0.0);
        }
        assert!(matches!(rho_alpha(-0.1), Err(CriteriaError::NegativeAlpha(_))));
    }

    #[test]
    fn alpha_two_is_a_ppt_state() {
        let rho = rho_alpha(2.0).unwrap();
        assert!(rho.min_eigenvalue() > -1e-12);
        for site in 0..3 {
            assert!(rho.is_ppt(&[site]).unwrap());
        }
        assert!(DensityMatrix::new(vec![2, 2, 2], rho.entries().clone()).is_ok());
    }

    #[test]
    fn spectra_follow_closed_form() {
        // oracle: both the matrix and each partial transpose bottom out at (a-2)/(8+8a)
        for a in [0.0, 1.0, 2.5, 3.0, 10.0] {
            let want = (a - 2.0) / (8.0 + 8.0 * a);
            assert!((rho_alpha(a).unwrap().min_eigenvalue() - want).abs() < 1e-12);
            assert!((rho_alpha_min_pt_eigenvalue(a).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("2.0:2.9:0.01").unwrap();
        assert_eq!(g.len(), 91);
        assert!((g[90] - 2.9).abs() < 1e-12);
        assert!(parse_grid("1:0:0.1").is_none());
        assert!(parse_grid("1:2").is_none());
    }
}
