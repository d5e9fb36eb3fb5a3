//! Seeded random state generators used by the soundness sweeps.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::fock::FockKet;
use crate::qstate::{DensityMatrix, Ket};

pub use rand::SeedableRng;

pub type StateRng = ChaCha8Rng;

pub fn rng(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest number of product terms in a random separable mixture.
pub const MAX_MIXTURE_TERMS: usize = 8;

fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in v.iter_mut() {
        *a /= n;
    }
}

/// Haar-random unit vector of length `n`.
pub fn haar_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v = gaussian_vector(n, rng);
    normalize(&mut v);
    v
}

pub fn haar_ket<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Ket {
    Ket::new(dims.to_vec(), haar_vector(dims.iter().product(), rng)).expect("consistent dims")
}

/// Product of independent Haar-random local kets.
pub fn product_ket<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Ket {
    let mut it = dims.iter();
    let first = *it.next().expect("at least one site");
    let mut ket = Ket::new(vec![first], haar_vector(first, rng)).expect("consistent dims");
    for &d in it {
        ket = ket.tensor(&Ket::new(vec![d], haar_vector(d, rng)).expect("consistent dims"));
    }
    ket
}

/// Flat Dirichlet weights.
pub fn dirichlet_weights<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Mixture of `1..=8` random product states with Dirichlet weights.
pub fn separable_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> DensityMatrix {
    let m = rng.random_range(1..=MAX_MIXTURE_TERMS);
    let weights = dirichlet_weights(m, rng);
    let parts: Vec<(f64, DensityMatrix)> = weights
        .into_iter()
        .map(|w| (w, product_ket(dims, rng).projector()))
        .collect();
    DensityMatrix::mixture(&parts).expect("valid mixture")
}

/// Random pure state of three qubits that factorizes as `1 | 2` for a
/// random choice of the lone party.
pub fn biseparable_ket<R: Rng + ?Sized>(rng: &mut R) -> Ket {
    let lone = rng.random_range(0..3usize);
    let single = haar_vector(2, rng);
    let pair = haar_vector(4, rng);
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    let others: Vec<usize> = (0..3).filter(|&s| s != lone).collect();
    for (x, a) in single.iter().enumerate() {
        for (yz, b) in pair.iter().enumerate() {
            let mut bits = [0usize; 3];
            bits[lone] = x;
            bits[others[0]] = yz >> 1;
            bits[others[1]] = yz & 1;
            amps[bits[0] * 4 + bits[1] * 2 + bits[2]] = a * b;
        }
    }
    Ket::new(vec![2, 2, 2], amps).expect("three qubits")
}

/// Convex mixture of biseparable pure states over all three partitions.
pub fn biseparable_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let m = rng.random_range(1..=MAX_MIXTURE_TERMS);
    let parts: Vec<(f64, DensityMatrix)> = dirichlet_weights(m, rng)
        .into_iter()
        .map(|w| (w, biseparable_ket(rng).projector()))
        .collect();
    DensityMatrix::mixture(&parts).expect("valid mixture")
}

/// Mixture of states each separable as `A | BC` with the given lone party.
pub fn fixed_partition_state<R: Rng + ?Sized>(lone: usize, rng: &mut R) -> DensityMatrix {
    let m = rng.random_range(1..=MAX_MIXTURE_TERMS);
    let parts: Vec<(f64, DensityMatrix)> = dirichlet_weights(m, rng)
        .into_iter()
        .map(|w| {
            let a = Ket::new(vec![2], haar_vector(2, rng)).expect("qubit");
            let bc = Ket::new(vec![2, 2], haar_vector(4, rng)).expect("two qubits");
            let rho = a.tensor(&bc).projector();
            (w, permute_lone(&rho, lone))
        })
        .collect();
    DensityMatrix::mixture(&parts).expect("valid mixture")
}

/// Moves site 0 of a three-qubit state to position `lone`.
fn permute_lone(rho: &DensityMatrix, lone: usize) -> DensityMatrix {
    let map = |i: usize| -> usize {
        let b = [(i >> 2) & 1, (i >> 1) & 1, i & 1];
        let mut out = [0; 3];
        let others: Vec<usize> = (0..3).filter(|&s| s != lone).collect();
        out[lone] = b[0];
        out[others[0]] = b[1];
        out[others[1]] = b[2];
        out[0] * 4 + out[1] * 2 + out[2]
    };
    let mut m = rho.entries().clone();
    for i in 0..8 {
        for j in 0..8 {
            m[(map(i), map(j))] = rho.get(i, j);
        }
    }
    DensityMatrix::new_unchecked(vec![2, 2, 2], m).expect("three qubits")
}

/// Haar-like random two-mode ket over the full truncated basis.
pub fn two_mode_ket<R: Rng + ?Sized>(cutoff: usize, rng: &mut R) -> FockKet {
    let side = cutoff + 1;
    FockKet::from_amplitudes(cutoff, haar_vector(side * side, rng)).expect("consistent length")
}

/// Single-mode state times single-mode state.
pub fn two_mode_product_ket<R: Rng + ?Sized>(cutoff: usize, rng: &mut R) -> FockKet {
    let side = cutoff + 1;
    let a = haar_vector(side, rng);
    let b = haar_vector(side, rng);
    let amps = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
    FockKet::from_amplitudes(cutoff, amps).expect("consistent length")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generators_repeat() {
        let a = separable_state(&[2, 2], &mut rng(5));
        let b = separable_state(&[2, 2], &mut rng(5));
        assert_eq!(a, b);
    }

    #[test]
    fn generated_states_are_valid() {
        let mut r = rng(1);
        for _ in 0..20 {
            let s = separable_state(&[2, 3], &mut r);
            assert!((s.entries().trace().re - 1.0).abs() < 1e-12);
            assert!(s.is_ppt(&[1]).unwrap());
            let b = biseparable_state(&mut r);
            assert!(b.min_eigenvalue() > -1e-12);
            let k = two_mode_ket(3, &mut r);
            assert!((k.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_partition_is_product_across_cut() {
        let mut r = rng(2);
        for lone in 0..3 {
            let rho = fixed_partition_state(lone, &mut r);
            assert!(rho.is_ppt(&[lone]).unwrap());
            assert!((rho.entries().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_two_mode_factorizes() {
        let k = two_mode_product_ket(2, &mut rng(3));
        let a = k.get(0, 0).unwrap() * k.get(1, 1).unwrap();
        let b = k.get(0, 1).unwrap() * k.get(1, 0).unwrap();
        assert!((a - b).norm() < 1e-14);
    }
}
