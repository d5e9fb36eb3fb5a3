//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entry of `M - M†` in modulus.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && hermiticity_defect(m) <= tol
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_all(factors: &[CMatrix]) -> CMatrix {
    let mut it = factors.iter();
    let first = it.next().expect("kron_all needs at least one factor").clone();
    it.fold(first, |acc, f| acc.kronecker(f))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn outer(u: &[Complex64], v: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Eigenvalues come back in descending order; eigenvector `i` is
/// column `i` of the returned matrix.
pub fn jacobi_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let mut a = m.clone();
    // symmetrize so tiny input asymmetry does not stall convergence
    for i in 0..n {
        a[(i, i)] = real(a[(i, i)].re);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = CMatrix::identity(n, n);
    let scale = a.norm().max(1.0);
    let off = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    for _sweep in 0..100 {
        if off(&a) < 1e-12 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let g_pq = phase * sn;
                let g_qp = -phase.conj() * sn;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * cs;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs + aqk * g_qp.conj();
                    a[(q, k)] = apk * g_pq.conj() + aqk * cs;
                }
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                a[(p, p)] = real(a[(p, p)].re);
                a[(q, q)] = real(a[(q, q)].re);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * cs;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| v[(r, order[col])]);
    (values, vectors)
}

/// `f(M)` for Hermitian `M` through its spectral decomposition.
pub fn hermitian_function<F: Fn(f64) -> f64>(m: &CMatrix, f: F) -> CMatrix {
    let (vals, vecs) = jacobi_eigen(m);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (i, lam) in vals.iter().enumerate() {
        let col: Vec<Complex64> = vecs.column(i).iter().copied().collect();
        out += outer(&col, &col) * real(f(*lam));
    }
    out
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let (vals, _) = jacobi_eigen(m);
    *vals.last().expect("empty matrix")
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[real(0.0), c(0.0, -1.0), c(0.0, 1.0), real(0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)])
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `n . sigma` for a real direction.
pub fn pauli_dot(n: [f64; 3]) -> CMatrix {
    pauli_x() * real(n[0]) + pauli_y() * real(n[1]) + pauli_z() * real(n[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        (&a + a.adjoint()) * real(0.5)
    }

    #[test]
    fn pauli_spectra() {
        let (vals, _) = jacobi_eigen(&pauli_z());
        assert_eq!(vals, vec![1.0, -1.0]);
        let (vals, _) = jacobi_eigen(&pauli_y());
        assert!((vals[0] - 1.0).abs() < 1e-15 && (vals[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_reconstruction_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 5, 8, 13, 16] {
            let m = random_hermitian(n, &mut rng);
            let (vals, vecs) = jacobi_eigen(&m);
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
            let mut rebuilt = CMatrix::zeros(n, n);
            for (i, lam) in vals.iter().enumerate() {
                let col: Vec<Complex64> = vecs.column(i).iter().copied().collect();
                rebuilt += outer(&col, &col) * real(*lam);
            }
            assert!((rebuilt - &m).norm() < 1e-10);
            let gram = vecs.adjoint() * &vecs;
            assert!((gram - CMatrix::identity(n, n)).norm() < 1e-10);
        }
    }

    #[test]
    fn agrees_with_nalgebra_on_real_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = nalgebra::DMatrix::<f64>::from_fn(6, 6, |_, _| rng.random::<f64>() - 0.5);
        let sym = &r + r.transpose();
        let mut theirs: Vec<f64> = sym.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        let (ours, _) = jacobi_eigen(&sym.map(real));
        for (x, y) in ours.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_function_square_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(4, &mut rng);
        let psd = &a * &a;
        let root = hermitian_function(&psd, |x| x.max(0.0).sqrt());
        assert!((&root * &root - psd).norm() < 1e-10);
    }
}
