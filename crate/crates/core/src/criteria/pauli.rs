use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::{require_dims, CriteriaError};
use crate::linalg::{pauli_dot, pauli_x, pauli_y, pauli_z, CMatrix};
use crate::qstate::{bloch_directions, DensityMatrix, QStateError};
use crate::verdict::{Classification, CriterionVerdict};

/// Measurement directions for the two-term Pauli-sum witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PauliDirections {
    /// Local directions from the reduced Bloch vectors; falls back to the
    /// optimal orthonormal pairs when a reduced state is maximally mixed.
    Bloch,
    /// Orthonormal pairs `(a1, a2)` for A and `(b1, b2)` for B; the witness
    /// is `|<a1.s (x) b1.s>| + |<a2.s (x) b2.s>|`.
    Explicit { a: [[f64; 3]; 2], b: [[f64; 3]; 2] },
}

fn correlation_matrix(rho: &DensityMatrix) -> Result<Matrix3<f64>, CriteriaError> {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut t = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            t[(i, j)] = rho.product_expectation(&[paulis[i].clone(), paulis[j].clone()])?.re;
        }
    }
    Ok(t)
}

fn corr(rho: &DensityMatrix, a: &CMatrix, b: &CMatrix) -> Result<f64, CriteriaError> {
    Ok(rho.product_expectation(&[a.clone(), b.clone()])?.re)
}

fn orthonormal_pair(p: &[[f64; 3]; 2]) -> bool {
    let dot = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    (dot(&p[0], &p[0]) - 1.0).abs() < 1e-9 && (dot(&p[1], &p[1]) - 1.0).abs() < 1e-9 && dot(&p[0], &p[1]).abs() < 1e-9
}

/// Separable states keep every variant at or below 1.
///
/// With Bloch directions `z', y', x'` on each side the witness is
/// `|<z'z'>| + sqrt(<y'y'>^2 + <y'x'>^2)`, i.e. the B-side partner of `y'_A`
/// is rotated within its `x'y'` plane to match. For a product state with unit
/// Bloch vectors this is at most `|a_z b_z| + |a_y| |b_perp| <= 1`.
///
/// Fallback (degenerate Bloch vector): the sum of the two largest singular
/// values of the correlation matrix `T_jk = <s_j (x) s_k>`, which is the
/// maximum over all orthonormal direction pairs.
pub fn pauli_sum_witness(rho: &DensityMatrix, directions: &PauliDirections) -> Result<CriterionVerdict, CriteriaError> {
    require_dims(rho, &[2, 2])?;
    let name = "pauli-sum";
    match directions {
        PauliDirections::Explicit { a, b } => {
            if !orthonormal_pair(a) || !orthonormal_pair(b) {
                return Err(CriteriaError::DimensionMismatch("directions must be orthonormal pairs".into()));
            }
            let lhs = corr(rho, &pauli_dot(a[0]), &pauli_dot(b[0]))?.abs()
                + corr(rho, &pauli_dot(a[1]), &pauli_dot(b[1]))?.abs();
            Ok(CriterionVerdict::new(name, lhs, 1.0, Classification::Entangled).with_note("explicit directions"))
        }
        PauliDirections::Bloch => {
            let da = bloch_directions(&rho.partial_trace(&[0])?);
            let db = bloch_directions(&rho.partial_trace(&[1])?);
            match (da, db) {
                (Ok(da), Ok(db)) => {
                    let zz = corr(rho, &da.z, &db.z)?;
                    let yy = corr(rho, &da.y, &db.y)?;
                    let yx = corr(rho, &da.y, &db.x)?;
                    let lhs = zz.abs() + yy.hypot(yx);
                    Ok(CriterionVerdict::new(name, lhs, 1.0, Classification::Entangled)
                        .with_note("Bloch directions"))
                }
                (Err(QStateError::DegenerateBloch), _) | (_, Err(QStateError::DegenerateBloch)) => {
                    let sv = correlation_matrix(rho)?.singular_values();
                    let mut s: Vec<f64> = sv.iter().copied().collect();
                    s.sort_by(|x, y| y.total_cmp(x));
                    Ok(CriterionVerdict::new(name, s[0] + s[1], 1.0, Classification::Entangled)
                        .with_note("degenerate Bloch vector: optimal direction pairs"))
                }
                (Err(e), _) | (_, Err(e)) => Err(e.into()),
            }
        }
    }
}

/// `sum_{j,k in {x,y,z}} <s_j (x) s_k>`. Reaches 3 on the product state with
/// both Bloch vectors along `(1,1,1)/sqrt3`, so it is not a separability bound.
pub fn nine_term_pauli_sum(rho: &DensityMatrix) -> Result<f64, CriteriaError> {
    require_dims(rho, &[2, 2])?;
    Ok(correlation_matrix(rho)?.sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::qstate::{named_ket, werner, Ket};
    use crate::random::{rng, separable_state};

    #[test]
    fn phi_plus_reaches_two() {
        let rho = named_ket("bell:phi+").unwrap().projector();
        let v = pauli_sum_witness(&rho, &PauliDirections::Bloch).unwrap();
        assert!((v.lhs - 2.0).abs() < 1e-12 && v.violated);
        let explicit = PauliDirections::Explicit {
            a: [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
            b: [[0.0, 0.0, 1.0], [0.0, -1.0, 0.0]],
        };
        let v = pauli_sum_witness(&rho, &explicit).unwrap();
        assert!((v.lhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_zero() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!(pauli_sum_witness(&rho, &PauliDirections::Bloch).unwrap().lhs.abs() < 1e-12);
    }

    #[test]
    fn separable_sweep_stays_below_one() {
        let mut r = rng(21);
        for _ in 0..200 {
            let rho = separable_state(&[2, 2], &mut r);
            let v = pauli_sum_witness(&rho, &PauliDirections::Bloch).unwrap();
            assert!(v.lhs <= 1.0 + 1e-9, "{}", v.lhs);
        }
    }

    #[test]
    fn non_degenerate_entangled_state() {
        // cos t |00> + sin t |11> has Bloch vectors along z on both sides
        let t: f64 = 0.4;
        let k = Ket::new(vec![2, 2], vec![c(t.cos(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(t.sin(), 0.0)]).unwrap();
        let v = pauli_sum_witness(&k.projector(), &PauliDirections::Bloch).unwrap();
        assert!((v.lhs - (1.0 + (2.0 * t).sin())).abs() < 1e-10);
        assert!(v.violated);
        // Werner states: detected exactly when 2p > 1 under the fallback
        assert!(!pauli_sum_witness(&werner(0.5), &PauliDirections::Bloch).unwrap().violated);
        assert!(pauli_sum_witness(&werner(0.51), &PauliDirections::Bloch).unwrap().violated);
    }

    #[test]
    fn nine_term_sum_exceeds_one_on_a_product_state() {
        let s = 1.0 / 3f64.sqrt();
        let n = [s, s, s];
        let half = |m: CMatrix| m * c(0.5, 0.0);
        let local = half(crate::linalg::identity(2) + pauli_dot(n));
        let q = DensityMatrix::new(vec![2], local).unwrap();
        let rho = q.tensor(&q);
        assert!((nine_term_pauli_sum(&rho).unwrap() - 3.0).abs() < 1e-12);
        assert!(pauli_sum_witness(&rho, &PauliDirections::Bloch).unwrap().lhs <= 1.0 + 1e-12);
    }
}
