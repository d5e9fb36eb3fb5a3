use serde::{Deserialize, Serialize};

use super::hoelder::{hoelder_rank_one, optimize_hoelder, FourRootSearch, StoredFourRootChoice};
use super::{require_dims, CriteriaError};
use crate::linalg::{hermitian_function, kron_all, CMatrix};
use crate::qstate::DensityMatrix;
use crate::verdict::{Classification, CriterionVerdict};

fn d(rho: &DensityMatrix, i: usize) -> f64 {
    rho.get(i, i).re.max(0.0)
}

fn a(rho: &DensityMatrix, i: usize, j: usize) -> f64 {
    rho.get(i, j).norm()
}

/// Matrix-entry bounds obeyed by every convex mixture of biseparable
/// three-qubit states (0-based indices of `|000>..|111>` below):
///
/// * `|r07| <= sqrt(r11 r66) + sqrt(r22 r55) + sqrt(r33 r44)`
/// * `|r12| + |r14| + |r24| <= sqrt(r00 r33) + sqrt(r00 r55) + sqrt(r00 r66) + (r11 + r22 + r44)/2`
pub fn tripartite_biseparable_test(rho: &DensityMatrix) -> Result<[CriterionVerdict; 2], CriteriaError> {
    require_dims(rho, &[2, 2, 2])?;
    let g = |i, j| (d(rho, i) * d(rho, j)).sqrt();
    let first = CriterionVerdict::new(
        "biseparable-ghz-coherence",
        a(rho, 0, 7),
        g(1, 6) + g(2, 5) + g(3, 4),
        Classification::GmeWitnessed,
    );
    let second = CriterionVerdict::new(
        "biseparable-w-coherence",
        a(rho, 1, 2) + a(rho, 1, 4) + a(rho, 2, 4),
        g(0, 3) + g(0, 5) + g(0, 6) + (d(rho, 1) + d(rho, 2) + d(rho, 4)) / 2.0,
        Classification::GmeWitnessed,
    );
    Ok([first, second])
}

/// Bounds obeyed by fully separable three-qubit states (0-based):
///
/// * `|r07| <= (r11 r22 r33 r44 r55 r66)^(1/6)`
/// * `|r07| <= (r00 r33^2 r44 r55 r66)^(1/6)`
///
/// The second bound is used in its homogeneous form: each party's
/// populations then enter the right side with the same total degree as the
/// left side, so it is tight on every product state.
pub fn tripartite_full_separability_test(rho: &DensityMatrix) -> Result<[CriterionVerdict; 2], CriteriaError> {
    require_dims(rho, &[2, 2, 2])?;
    let lhs = a(rho, 0, 7);
    let prod = |idx: &[usize]| idx.iter().map(|&i| d(rho, i)).product::<f64>().powf(1.0 / 6.0);
    Ok([
        CriterionVerdict::new("full-separability-1", lhs, prod(&[1, 2, 3, 4, 5, 6]), Classification::NotFullySeparable),
        CriterionVerdict::new("full-separability-2", lhs, prod(&[0, 3, 3, 4, 5, 6]), Classification::NotFullySeparable),
    ])
}

fn check_local_ops(rho: &DensityMatrix, ops: &[CMatrix]) -> Result<(), CriteriaError> {
    if ops.len() != rho.dims().len() || ops.iter().zip(rho.dims()).any(|(o, d)| o.shape() != (*d, *d)) {
        return Err(CriteriaError::DimensionMismatch("one local operator per party expected".into()));
    }
    Ok(())
}

/// `|<prod O_k>|^2 <= <prod_{k<split} O_k†O_k prod_{k>=split} O_k O_k†>` for
/// states separable across parties `0..split | split..n`.
pub fn zubairy_bipartition(rho: &DensityMatrix, ops: &[CMatrix], split: usize) -> Result<CriterionVerdict, CriteriaError> {
    check_local_ops(rho, ops)?;
    if split == 0 || split >= ops.len() {
        return Err(CriteriaError::DimensionMismatch(format!("split {split} must cut the parties")));
    }
    let lhs = rho.expectation(&kron_all(ops))?.norm_sqr();
    let bound: Vec<CMatrix> = ops
        .iter()
        .enumerate()
        .map(|(k, o)| if k < split { o.adjoint() * o } else { o * o.adjoint() })
        .collect();
    let rhs = rho.expectation(&kron_all(&bound))?.re;
    Ok(CriterionVerdict::new("bipartition-split", lhs, rhs, Classification::Entangled)
        .with_note(format!("split after party {split}")))
}

/// `|<prod O_k>| <= prod <(O_k†O_k)^(n/2)>^(1/n)` with `n` parties. The power
/// of the positive operator `O†O` is taken spectrally, so odd `n` is allowed.
pub fn hillery_multipartite(rho: &DensityMatrix, ops: &[CMatrix]) -> Result<CriterionVerdict, CriteriaError> {
    check_local_ops(rho, ops)?;
    let n = ops.len();
    let lhs = rho.expectation(&kron_all(ops))?.norm();
    let mut rhs = 1.0;
    for (k, o) in ops.iter().enumerate() {
        let pow = hermitian_function(&(o.adjoint() * o), |x| x.max(0.0).powf(n as f64 / 2.0));
        let local: Vec<CMatrix> = rho
            .dims()
            .iter()
            .enumerate()
            .map(|(s, &dim)| if s == k { pow.clone() } else { CMatrix::identity(dim, dim) })
            .collect();
        rhs *= rho.expectation(&kron_all(&local))?.re.max(0.0).powf(1.0 / n as f64);
    }
    Ok(CriterionVerdict::new("hillery-multipartite", lhs, rhs, Classification::Entangled))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TripartiteLabel {
    FullySeparable,
    BiseparableFixedPartition,
    ConvexBiseparable,
    Gme,
    NotFullySeparable,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripartiteClass {
    pub label: TripartiteLabel,
    /// Parties whose single-party cut has a negative partial transpose.
    pub npt_cuts: Vec<usize>,
    pub evidence: Vec<CriterionVerdict>,
}

/// Strongest label the implemented criteria can prove. Only ever reports
/// entanglement; a state on which nothing fires is `Unknown`.
pub fn classify_tripartite(rho: &DensityMatrix) -> Result<TripartiteClass, CriteriaError> {
    require_dims(rho, &[2, 2, 2])?;
    let mut evidence: Vec<CriterionVerdict> = tripartite_biseparable_test(rho)?.into();
    let gme = evidence.iter().any(|v| v.violated);
    evidence.extend(tripartite_full_separability_test(rho)?);
    let mut npt_cuts = Vec::new();
    for site in 0..3 {
        let min = rho.min_pt_eigenvalue(&[site])?;
        let v = CriterionVerdict::new(&format!("ppt-cut-{site}"), -min, 0.0, Classification::Npt);
        if v.violated {
            npt_cuts.push(site);
        }
        evidence.push(v);
    }
    let stored = hoelder_rank_one(rho, &StoredFourRootChoice::bundled().choice)?.with_note("stored operator choice");
    let c4 = if stored.violated {
        stored
    } else {
        let search = FourRootSearch {
            restarts: 16,
            ..FourRootSearch::default()
        };
        optimize_hoelder(rho, &search)?.1
    };
    evidence.push(c4);
    let label = if gme {
        TripartiteLabel::Gme
    } else if evidence.iter().any(|v| v.violated) {
        TripartiteLabel::NotFullySeparable
    } else {
        TripartiteLabel::Unknown
    };
    Ok(TripartiteClass {
        label,
        npt_cuts,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::rho_alpha;
    use crate::linalg::{c, real};
    use crate::qstate::{named_ket, parse_state, Ket};
    use crate::random::{biseparable_state, fixed_partition_state, haar_vector, rng, separable_state, StateRng};

    fn rand_op(d: usize, r: &mut StateRng) -> CMatrix {
        CMatrix::from_iterator(d, d, haar_vector(d * d, r).into_iter().map(|z| z * 2.0))
    }

    #[test]
    fn ghz_and_w_are_gme() {
        let ghz = named_ket("ghz3").unwrap().projector();
        let [b1, _] = tripartite_biseparable_test(&ghz).unwrap();
        assert!((b1.lhs - 0.5).abs() < 1e-12 && b1.rhs.abs() < 1e-12 && b1.violated);
        let w = named_ket("w3").unwrap().projector();
        let [_, b2] = tripartite_biseparable_test(&w).unwrap();
        assert!((b2.lhs - 1.0).abs() < 1e-12 && (b2.rhs - 0.5).abs() < 1e-12 && b2.violated);
        let zero = parse_state("|000>").unwrap();
        assert!(tripartite_biseparable_test(&zero).unwrap().iter().all(|v| !v.violated));
    }

    #[test]
    fn full_separability_examples() {
        let ghz = named_ket("ghz3").unwrap().projector();
        assert!(tripartite_full_separability_test(&ghz).unwrap().iter().all(|v| v.violated));
        let plus = parse_state("|000>+|001>+|010>+|011>+|100>+|101>+|110>+|111>").unwrap();
        for v in tripartite_full_separability_test(&plus).unwrap() {
            assert!((v.lhs - 0.125).abs() < 1e-12 && (v.rhs - 0.125).abs() < 1e-12 && !v.violated);
        }
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2, 2]);
        assert!(tripartite_full_separability_test(&mixed).unwrap().iter().all(|v| v.lhs == 0.0 && !v.violated));
    }

    #[test]
    fn cubed_entry_form_fails_on_a_product_state() {
        // (r00 r33^3 r44 r55 r66)^(1/6) on |+++>: (1/8)^(7/6) < 1/8 = |r07|
        let plus = parse_state("|000>+|001>+|010>+|011>+|100>+|101>+|110>+|111>").unwrap();
        let cubed = [0, 3, 3, 3, 4, 5, 6].iter().map(|&i| plus.get(i, i).re).product::<f64>().powf(1.0 / 6.0);
        assert!(plus.get(0, 7).norm() - cubed > 1e-3);
    }

    #[test]
    fn soundness_sweeps() {
        let mut r = rng(61);
        for _ in 0..200 {
            let sep = separable_state(&[2, 2, 2], &mut r);
            assert!(tripartite_full_separability_test(&sep).unwrap().iter().all(|v| !v.violated));
            assert!(tripartite_biseparable_test(&sep).unwrap().iter().all(|v| !v.violated));
            let ops: Vec<CMatrix> = (0..3).map(|_| rand_op(2, &mut r)).collect();
            assert!(!hillery_multipartite(&sep, &ops).unwrap().violated);
            let bs = biseparable_state(&mut r);
            assert!(tripartite_biseparable_test(&bs).unwrap().iter().all(|v| !v.violated));
        }
    }

    #[test]
    fn bipartition_split_holds_across_its_cut() {
        let mut r = rng(62);
        for _ in 0..100 {
            let ops: Vec<CMatrix> = (0..3).map(|_| rand_op(2, &mut r)).collect();
            let a_bc = fixed_partition_state(0, &mut r);
            assert!(!zubairy_bipartition(&a_bc, &ops, 1).unwrap().violated);
            let ab_c = fixed_partition_state(2, &mut r);
            assert!(!zubairy_bipartition(&ab_c, &ops, 2).unwrap().violated);
        }
        // GHZ with O = |0><1| on every party violates the A|BC split
        let ghz = named_ket("ghz3").unwrap().projector();
        let lower = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let v = zubairy_bipartition(&ghz, &[lower.clone(), lower.clone(), lower], 1).unwrap();
        assert!(v.violated);
    }

    /// Complement of the Shifts unextendible product basis: PPT across every
    /// cut, separable across every bipartition, yet entangled.
    fn upb_state() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = |v: [f64; 2]| Ket::new(vec![2], vec![real(v[0]), real(v[1])]).unwrap();
        let (k0, k1, plus, minus) = (q([1.0, 0.0]), q([0.0, 1.0]), q([s, s]), q([s, -s]));
        let tri = |x: &Ket, y: &Ket, z: &Ket| x.tensor(y).tensor(z).projector();
        let mut m = CMatrix::identity(8, 8);
        for p in [tri(&k0, &k1, &plus), tri(&k1, &plus, &k0), tri(&plus, &k0, &k1), tri(&minus, &minus, &minus)] {
            m -= p.entries();
        }
        DensityMatrix::new(vec![2, 2, 2], m * real(0.25)).unwrap()
    }

    #[test]
    fn hillery_multipartite_is_blind_to_states_biseparable_in_two_cuts() {
        let upb = upb_state();
        for site in 0..3 {
            assert!(upb.is_ppt(&[site]).unwrap());
        }
        let mut r = rng(63);
        for _ in 0..200 {
            let p: f64 = crate::random::dirichlet_weights(2, &mut r)[0];
            let rho = DensityMatrix::mixture(&[(p, upb.clone()), (1.0 - p, separable_state(&[2, 2, 2], &mut r))]).unwrap();
            let ops: Vec<CMatrix> = (0..3).map(|_| rand_op(2, &mut r)).collect();
            assert!(!hillery_multipartite(&rho, &ops).unwrap().violated);
        }
        // GHZ with lowering operators sits exactly on the bound
        let ghz = named_ket("ghz3").unwrap().projector();
        let lower = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let v = hillery_multipartite(&ghz, &[lower.clone(), lower.clone(), lower]).unwrap();
        assert!((v.lhs - 0.5).abs() < 1e-12 && (v.rhs - 0.5).abs() < 1e-12);
    }

    #[test]
    fn classification_examples() {
        let ghz = named_ket("ghz3").unwrap().projector();
        assert_eq!(classify_tripartite(&ghz).unwrap().label, TripartiteLabel::Gme);
        let zero = parse_state("|000>").unwrap();
        assert_eq!(classify_tripartite(&zero).unwrap().label, TripartiteLabel::Unknown);
        let ra = classify_tripartite(&rho_alpha(2.1).unwrap()).unwrap();
        assert_eq!(ra.label, TripartiteLabel::NotFullySeparable);
        assert!(ra.npt_cuts.is_empty());
        assert!(ra.evidence.iter().any(|v| v.criterion == "cauchy4" && v.violated));
    }
}
