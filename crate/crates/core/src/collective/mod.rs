//! Collective-spin observables on qubit ensembles.
//!
//! Spin operators are Pauli matrices (eigenvalues ±1), `J = Σ σ_j`, so the
//! maximal spin length is `J_max = N`. Site `s` of an `N`-qubit register is
//! bit `N-1-s` of the basis index, matching the tensor ordering in `qstate`.

mod depth;
mod width;

pub use depth::{depth_bound_curve, depth_inequality, spin_length_ratio, DepthBoundCurve, DepthOptions};
pub use width::{
    configuration_blocks, figure6_sweep, min_pair_variance, nearest_neighbor_pairing, optimal_pairing, pairing_variance_bound,
    singleton_min_variance, width_bound_nearest_neighbor, Configuration, Figure6Row, PairVariance, PairingResult,
    WidthBound, EPSILON_0,
};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::c;
use crate::qstate::{DensityMatrix, Ket};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CollectiveError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("group size {k} does not divide N = {n}")]
    IndivisibleN { n: usize, k: usize },
    #[error("N = {0} must be even and at least 2")]
    OddN(usize),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("particle {0} appears in more than one group or is out of range")]
    BadGrouping(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Particles on a line coupled to a sinusoidal field of wavelength `λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinEnsemble {
    positions: Vec<f64>,
    wavelength: f64,
}

impl SpinEnsemble {
    pub fn new(positions: Vec<f64>, wavelength: f64) -> Result<Self, CollectiveError> {
        if positions.is_empty() {
            return Err(CollectiveError::InvalidEnsemble("no particles".into()));
        }
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(CollectiveError::InvalidEnsemble(format!("wavelength {wavelength}")));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(CollectiveError::InvalidEnsemble("non-finite position".into()));
        }
        Ok(Self { positions, wavelength })
    }

    /// `x_j = x0 + j d` for `j = 0..n` with `d = λ/(2n)` and `x0 = d/2`.
    pub fn uniform_grid(n: usize, wavelength: f64) -> Result<Self, CollectiveError> {
        let d = wavelength / (2.0 * n as f64);
        Self::new((0..n).map(|j| d / 2.0 + j as f64 * d).collect(), wavelength)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn with_wavelength(&self, wavelength: f64) -> Result<Self, CollectiveError> {
        Self::new(self.positions.clone(), wavelength)
    }

    /// `a_j = sin(2π x_j / λ)`
    pub fn couplings(&self) -> Vec<f64> {
        self.positions
            .iter()
            .map(|x| (2.0 * std::f64::consts::PI * x / self.wavelength).sin())
            .collect()
    }
}

/// Disjoint groups of entangled particles; everyone else is a singleton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingStructure {
    n: usize,
    groups: Vec<Vec<usize>>,
}

impl PairingStructure {
    pub fn new(n: usize, groups: Vec<Vec<usize>>) -> Result<Self, CollectiveError> {
        let mut seen = vec![false; n];
        let mut kept = Vec::new();
        for mut g in groups {
            g.sort_unstable();
            for &j in &g {
                if j >= n || seen[j] {
                    return Err(CollectiveError::BadGrouping(j));
                }
                seen[j] = true;
            }
            if g.len() > 1 {
                kept.push(g);
            }
        }
        kept.sort();
        Ok(Self { n, groups: kept })
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, CollectiveError> {
        Self::new(n, pairs.iter().map(|&(j, k)| vec![j, k]).collect())
    }

    pub fn singletons(n: usize) -> Self {
        Self { n, groups: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Groups with at least two members, each sorted.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.groups.iter().filter(|g| g.len() == 2).map(|g| (g[0], g[1])).collect()
    }

    pub fn singleton_sites(&self) -> Vec<usize> {
        let mut used = vec![false; self.n];
        for g in &self.groups {
            for &j in g {
                used[j] = true;
            }
        }
        (0..self.n).filter(|&j| !used[j]).collect()
    }

    /// Chain distance counted inclusively: the outermost members of a group
    /// at sites `j < k` span `k - j + 1` particles. No groups gives 1.
    pub fn width(&self) -> usize {
        self.groups.iter().map(|g| g[g.len() - 1] - g[0] + 1).max().unwrap_or(1)
    }

    /// Size of the largest group.
    pub fn depth(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(1)
    }
}

/// States on which weighted collective spin moments can be evaluated.
pub trait QubitRegister {
    fn qubits(&self) -> Result<usize, CollectiveError>;
    /// `(<B>, <B²>)` for `B = Σ w_s σ_axis(s)`.
    fn moments(&self, weights: &[f64], axis: Axis) -> Result<(f64, f64), CollectiveError>;
}

fn qubit_count(dims: &[usize]) -> Result<usize, CollectiveError> {
    if dims.iter().all(|&d| d == 2) && !dims.is_empty() {
        Ok(dims.len())
    } else {
        Err(CollectiveError::DimensionMismatch(format!("expected qubits, got dims {dims:?}")))
    }
}

fn check_weights(n: usize, weights: &[f64]) -> Result<(), CollectiveError> {
    if weights.len() != n {
        return Err(CollectiveError::DimensionMismatch(format!(
            "{} weights for {n} qubits",
            weights.len()
        )));
    }
    Ok(())
}

/// `out += Σ_s w_s σ_axis(s) v` for a column `v` of an `n`-qubit register.
fn apply_weighted(n: usize, weights: &[f64], axis: Axis, v: &[Complex64], out: &mut [Complex64]) {
    for (idx, &amp) in v.iter().enumerate() {
        if amp == c(0.0, 0.0) {
            continue;
        }
        for (s, &w) in weights.iter().enumerate() {
            let mask = 1usize << (n - 1 - s);
            let up = idx & mask == 0;
            match axis {
                Axis::Z => out[idx] += amp * if up { w } else { -w },
                Axis::X => out[idx ^ mask] += amp * w,
                Axis::Y => out[idx ^ mask] += amp * if up { c(0.0, w) } else { c(0.0, -w) },
            }
        }
    }
}

impl QubitRegister for Ket {
    fn qubits(&self) -> Result<usize, CollectiveError> {
        qubit_count(&self.dims)
    }

    fn moments(&self, weights: &[f64], axis: Axis) -> Result<(f64, f64), CollectiveError> {
        let n = self.qubits()?;
        check_weights(n, weights)?;
        let norm = self.norm_sqr();
        let mut u = vec![c(0.0, 0.0); self.amplitudes.len()];
        apply_weighted(n, weights, axis, &self.amplitudes, &mut u);
        let mean: f64 = self.amplitudes.iter().zip(&u).map(|(a, b)| (a.conj() * b).re).sum();
        let sq: f64 = u.iter().map(|b| b.norm_sqr()).sum();
        Ok((mean / norm, sq / norm))
    }
}

impl QubitRegister for DensityMatrix {
    fn qubits(&self) -> Result<usize, CollectiveError> {
        qubit_count(self.dims())
    }

    fn moments(&self, weights: &[f64], axis: Axis) -> Result<(f64, f64), CollectiveError> {
        let n = self.qubits()?;
        check_weights(n, weights)?;
        let dim = self.size();
        let rho = self.entries();
        // M = B rho; <B> = tr M and <B²> = tr(B M) = Σ_j <B e_j, M e_j>.
        let mut mean = 0.0;
        let mut sq = 0.0;
        let mut col = vec![c(0.0, 0.0); dim];
        let mut m = vec![c(0.0, 0.0); dim];
        let mut e = vec![c(0.0, 0.0); dim];
        let mut be = vec![c(0.0, 0.0); dim];
        for j in 0..dim {
            for i in 0..dim {
                col[i] = rho[(i, j)];
            }
            m.fill(c(0.0, 0.0));
            apply_weighted(n, weights, axis, &col, &mut m);
            mean += m[j].re;
            e[j] = c(1.0, 0.0);
            be.fill(c(0.0, 0.0));
            apply_weighted(n, weights, axis, &e, &mut be);
            e[j] = c(0.0, 0.0);
            sq += be.iter().zip(&m).map(|(b, x)| (b.conj() * x).re).sum::<f64>();
        }
        Ok((mean, sq))
    }
}

fn variance_of<S: QubitRegister + ?Sized>(state: &S, weights: &[f64], axis: Axis) -> Result<f64, CollectiveError> {
    let (m, s) = state.moments(weights, axis)?;
    Ok((s - m * m).max(0.0))
}

/// `(ΔJ_axis)²` with `J = Σ σ_j`.
pub fn collective_variance_j<S: QubitRegister + ?Sized>(state: &S, axis: Axis) -> Result<f64, CollectiveError> {
    let n = state.qubits()?;
    variance_of(state, &vec![1.0; n], axis)
}

/// `(ΔB_x)² + (ΔB_y)² + (ΔB_z)²` with `B = Σ a_j σ_j`.
pub fn gradient_variance_b<S: QubitRegister + ?Sized>(
    state: &S,
    ensemble: &SpinEnsemble,
) -> Result<f64, CollectiveError> {
    weighted_total_variance(state, &ensemble.couplings())
}

/// Total variance of `Σ w_j σ_j` for explicit weights.
pub fn weighted_total_variance<S: QubitRegister + ?Sized>(state: &S, weights: &[f64]) -> Result<f64, CollectiveError> {
    let mut total = 0.0;
    for axis in Axis::ALL {
        total += variance_of(state, weights, axis)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::named_ket;
    use crate::random::{haar_ket, rng, separable_state};

    fn ket(label: &str) -> Ket {
        named_ket(label).unwrap()
    }

    fn product(kets: &[Ket]) -> Ket {
        kets[1..].iter().fold(kets[0].clone(), |acc, k| acc.tensor(k))
    }

    #[test]
    fn j_variance_examples() {
        let zeros = Ket::basis(vec![2; 5], &[0; 5]).unwrap();
        assert!(collective_variance_j(&zeros, Axis::Z).unwrap().abs() < 1e-14);
        let singlet = ket("bell:psi-");
        let two = singlet.tensor(&singlet);
        for axis in Axis::ALL {
            assert!(collective_variance_j(&two, axis).unwrap().abs() < 1e-12);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Ket::new(vec![2], vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        let p4 = product(&[plus.clone(), plus.clone(), plus.clone(), plus]);
        assert!((collective_variance_j(&p4, Axis::Z).unwrap() - 4.0).abs() < 1e-12);
        assert!(collective_variance_j(&p4, Axis::X).unwrap().abs() < 1e-12);
        let bad = DensityMatrix::maximally_mixed(vec![2, 3]);
        assert!(matches!(collective_variance_j(&bad, Axis::Z), Err(CollectiveError::DimensionMismatch(_))));
    }

    #[test]
    fn pure_and_mixed_moments_agree() {
        // oracle: dense operator built from Kronecker products
        use crate::linalg::{identity, kron_all, pauli_x, pauli_y, pauli_z, real};
        let mut r = rng(5);
        let w = [0.3, -1.0, 0.7];
        for _ in 0..5 {
            let psi = haar_ket(&[2, 2, 2], &mut r);
            let rho = separable_state(&[2, 2, 2], &mut r);
            for (axis, p) in [(Axis::X, pauli_x()), (Axis::Y, pauli_y()), (Axis::Z, pauli_z())] {
                let mut b = crate::linalg::CMatrix::zeros(8, 8);
                for s in 0..3 {
                    let mut f = vec![identity(2), identity(2), identity(2)];
                    f[s] = p.clone() * real(w[s]);
                    b += kron_all(&f);
                }
                let (m1, s1) = psi.moments(&w, axis).unwrap();
                let dm = psi.projector();
                assert!((dm.expectation(&b).unwrap().re - m1).abs() < 1e-12);
                assert!((dm.expectation(&(&b * &b)).unwrap().re - s1).abs() < 1e-12);
                let (m2, s2) = dm.moments(&w, axis).unwrap();
                assert!((m1 - m2).abs() < 1e-12 && (s1 - s2).abs() < 1e-12);
                let (m3, s3) = rho.moments(&w, axis).unwrap();
                assert!((rho.expectation(&b).unwrap().re - m3).abs() < 1e-12);
                assert!((rho.expectation(&(&b * &b)).unwrap().re - s3).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradient_variance_examples() {
        let singlet = ket("bell:psi-");
        let e = SpinEnsemble::new(vec![0.1, 0.5], 1.2).unwrap();
        let a = e.couplings();
        assert!((a[0] - a[1]).abs() < 1e-12);
        assert!(gradient_variance_b(&singlet, &e).unwrap() < 1e-12);
        for (aj, ak) in [(1.0, 0.5), (0.8, -0.3), (0.6, 0.6)] {
            let v = weighted_total_variance(&singlet, &[aj, ak]).unwrap();
            assert!((v - 3.0 * (aj - ak) * (aj - ak)).abs() < 1e-12);
        }
        let up = Ket::basis(vec![2], &[0]).unwrap();
        assert!((weighted_total_variance(&up, &[0.7]).unwrap() - 2.0 * 0.49).abs() < 1e-12);
    }

    #[test]
    fn pairing_structure_width_and_depth() {
        // particles 1..6 in the chain, groups {1,3,6}, {4,5}, {2}
        let s = PairingStructure::new(6, vec![vec![0, 2, 5], vec![3, 4], vec![1]]).unwrap();
        assert_eq!(s.depth(), 3);
        assert_eq!(s.width(), 6);
        assert_eq!(s.singleton_sites(), vec![1]);
        assert_eq!(PairingStructure::singletons(4).width(), 1);
        assert_eq!(PairingStructure::from_pairs(4, &[(0, 1), (2, 3)]).unwrap().width(), 2);
        assert!(matches!(
            PairingStructure::from_pairs(4, &[(0, 1), (1, 3)]),
            Err(CollectiveError::BadGrouping(1))
        ));
        assert!(PairingStructure::from_pairs(4, &[(0, 4)]).is_err());
    }

    #[test]
    fn ensemble_couplings() {
        let e = SpinEnsemble::uniform_grid(16, 1.0).unwrap();
        assert_eq!(e.len(), 16);
        for (j, a) in e.couplings().into_iter().enumerate() {
            let want = (std::f64::consts::PI * (j as f64 + 0.5) / 16.0).sin();
            assert!((a - want).abs() < 1e-12 && a.abs() <= 1.0);
        }
        assert!(SpinEnsemble::new(vec![], 1.0).is_err());
        assert!(SpinEnsemble::new(vec![0.0], 0.0).is_err());
    }
}
