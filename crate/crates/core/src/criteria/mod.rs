//! Entanglement criteria as uniform verdict-producing evaluators.

mod bell;
mod cauchy;
mod hoelder;
mod pauli;
mod rho_alpha;
mod tripartite;

pub use bell::{chsh, classical_correlation_bounds, classical_sock_bound, ChshResult, Setting, CLASSICAL_STRATEGIES};
pub use cauchy::{
    annihilation_matrix, cauchy_schwarz_criterion, cauchy_schwarz_rank_one, creation_matrix, density_from_two_mode,
    hillery_zubairy, optimize_cauchy_schwarz, werner_detection_scan, RankOneChoice, WernerScan,
};
pub use hoelder::{
    hoelder_four_root_criterion, hoelder_rank_one, optimize_hoelder, qubit_vector, FourRootChoice, FourRootSearch,
    HoelderOperators, StoredFourRootChoice, CAUCHY4_CONFIG,
};
pub use pauli::{nine_term_pauli_sum, pauli_sum_witness, PauliDirections};
pub use rho_alpha::{parse_grid, rho_alpha, rho_alpha_min_pt_eigenvalue, rho_alpha_scan, FourRootMode, RhoAlphaRow};
pub use tripartite::{
    classify_tripartite, hillery_multipartite, tripartite_biseparable_test, tripartite_full_separability_test,
    zubairy_bipartition, TripartiteClass, TripartiteLabel,
};

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, c, CMatrix};
use crate::qstate::{DensityMatrix, QStateError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriteriaError {
    #[error("observable {0} is not Hermitian with eigenvalues +-1")]
    NotDichotomic(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("alpha must be non-negative, got {0}")]
    NegativeAlpha(f64),
    #[error("bad probabilities ({0}, {1}): need p1, p2 >= 0 and p1 + p2 = 1")]
    BadProbability(f64, f64),
    #[error(transparent)]
    QState(#[from] QStateError),
}

/// Checks `O = O†` and `O² = 1`.
pub fn is_dichotomic(op: &CMatrix) -> bool {
    if !op.is_square() || !linalg::is_hermitian(op, 1e-10) {
        return false;
    }
    let sq = op * op;
    let id = linalg::identity(op.nrows());
    (sq - id).iter().all(|z| z.norm() < 1e-10)
}

/// Recovers `<O>` for non-Hermitian `O` from two Hermitian expectations:
/// `2 Re<O> = <O + O†>` and `2 Im<O> = <i O† - i O>`.
pub fn non_hermitian_expectation(rho: &DensityMatrix, op: &CMatrix) -> Result<Complex64, CriteriaError> {
    let i = c(0.0, 1.0);
    let dag = op.adjoint();
    let herm_re = op + &dag;
    let herm_im = &dag * i - op * i;
    let re = rho.expectation(&herm_re)?.re;
    let im = rho.expectation(&herm_im)?.re;
    Ok(c(re / 2.0, im / 2.0))
}

fn require_dims(rho: &DensityMatrix, dims: &[usize]) -> Result<(), CriteriaError> {
    if rho.dims() != dims {
        return Err(CriteriaError::DimensionMismatch(format!(
            "expected dims {dims:?}, got {:?}",
            rho.dims()
        )));
    }
    Ok(())
}
