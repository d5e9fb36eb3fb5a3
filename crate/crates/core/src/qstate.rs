//! Multi-qudit density matrices.
//!
//! Site 0 is the most significant digit of a basis index, so for three qubits
//! `|000>, |001>, ..., |111>` are indices `0..8`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, c, outer, real, CMatrix};
use crate::literal::{self, LiteralError};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-8;
pub const SCHMIDT_RANK_TOL: f64 = 1e-9;
pub const PARITY_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QStateError {
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("minimum eigenvalue {0:e} is negative")]
    NotPositive(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bad subsystem index {0}")]
    BadSubsystemIndex(usize),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("Bloch vector too short to define directions")]
    DegenerateBloch,
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error(transparent)]
    Literal(#[from] LiteralError),
    #[error("json: {0}")]
    Json(String),
}

fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Digits of `index` in the mixed radix `dims`, most significant first.
fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for s in (0..dims.len()).rev() {
        out[s] = index % dims[s];
        index /= dims[s];
    }
    out
}

fn undigits(ds: &[usize], dims: &[usize]) -> usize {
    ds.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
}

/// Pure state vector with explicit local dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<Complex64>,
}

impl Ket {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self, QStateError> {
        if total_dim(&dims) != amplitudes.len() {
            return Err(QStateError::DimensionMismatch(format!(
                "dims {dims:?} do not match {} amplitudes",
                amplitudes.len()
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self, QStateError> {
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(d, n)| d >= n) {
            return Err(QStateError::DimensionMismatch(format!("label {digits:?} for dims {dims:?}")));
        }
        let mut amps = vec![c(0.0, 0.0); total_dim(&dims)];
        amps[undigits(digits, &dims)] = real(1.0);
        Self::new(dims, amps)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self, QStateError> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(QStateError::NotNormalized(0.0));
        }
        let s = n.sqrt();
        Ok(Self {
            dims: self.dims.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a / s).collect(),
        })
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend(&other.dims);
        Ket { dims, amplitudes: amps }
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            entries: outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

/// Density matrix over a tensor product of qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian, unit trace, positive semidefinite.
    pub fn new(dims: Vec<usize>, entries: CMatrix) -> Result<Self, QStateError> {
        let rho = Self::new_unchecked(dims, entries)?;
        let defect = linalg::hermiticity_defect(&rho.entries);
        if defect > HERMITIAN_TOL {
            return Err(QStateError::NotHermitian(defect));
        }
        let tr = rho.entries.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QStateError::BadTrace(tr.re));
        }
        let min = rho.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(QStateError::NotPositive(min));
        }
        Ok(rho)
    }

    /// Only checks the shape. Used for partial transposes and intermediate
    /// operators which need not be states.
    pub fn new_unchecked(dims: Vec<usize>, entries: CMatrix) -> Result<Self, QStateError> {
        let n = total_dim(&dims);
        if entries.nrows() != n || entries.ncols() != n {
            return Err(QStateError::DimensionMismatch(format!(
                "dims {dims:?} need a {n}x{n} matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { dims, entries })
    }

    pub fn from_ket(ket: &Ket) -> Result<Self, QStateError> {
        let n = ket.norm_sqr();
        if (n - 1.0).abs() > TRACE_TOL {
            return Err(QStateError::NotNormalized(n));
        }
        Ok(ket.projector())
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n = total_dim(&dims);
        Self {
            dims,
            entries: CMatrix::identity(n, n) * real(1.0 / n as f64),
        }
    }

    /// Convex combination of states with identical dims.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self, QStateError> {
        let first = parts
            .first()
            .ok_or_else(|| QStateError::DimensionMismatch("empty mixture".into()))?;
        let mut acc = CMatrix::zeros(first.1.size(), first.1.size());
        for (w, rho) in parts {
            if rho.dims != first.1.dims {
                return Err(QStateError::DimensionMismatch("mixture parts differ in dims".into()));
            }
            acc += &rho.entries * real(*w);
        }
        Self::new(first.1.dims.clone(), acc)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Entry `rho_{i,j}` with zero-based indices.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend(&other.dims);
        DensityMatrix {
            dims,
            entries: self.entries.kronecker(&other.entries),
        }
    }

    fn check_sites(&self, sites: &[usize]) -> Result<(), QStateError> {
        for &s in sites {
            if s >= self.dims.len() {
                return Err(QStateError::BadSubsystemIndex(s));
            }
        }
        Ok(())
    }

    /// Traces out every site not listed in `keep`. Kept sites stay in their
    /// original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, QStateError> {
        if keep.is_empty() {
            return Err(QStateError::BadSubsystemIndex(usize::MAX));
        }
        self.check_sites(keep)?;
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let traced: Vec<usize> = (0..self.dims.len()).filter(|s| !keep.contains(s)).collect();
        let kdims: Vec<usize> = keep.iter().map(|&s| self.dims[s]).collect();
        let tdims: Vec<usize> = traced.iter().map(|&s| self.dims[s]).collect();
        let kn = total_dim(&kdims);
        let tn = total_dim(&tdims);
        let full = |kd: &[usize], td: &[usize]| {
            let mut ds = vec![0; self.dims.len()];
            for (i, &s) in keep.iter().enumerate() {
                ds[s] = kd[i];
            }
            for (i, &s) in traced.iter().enumerate() {
                ds[s] = td[i];
            }
            undigits(&ds, &self.dims)
        };
        let mut out = CMatrix::zeros(kn, kn);
        for r in 0..kn {
            let rd = digits(r, &kdims);
            for col in 0..kn {
                let cd = digits(col, &kdims);
                let mut acc = c(0.0, 0.0);
                for t in 0..tn {
                    let td = digits(t, &tdims);
                    acc += self.entries[(full(&rd, &td), full(&cd, &td))];
                }
                out[(r, col)] = acc;
            }
        }
        Ok(DensityMatrix {
            dims: kdims,
            entries: out,
        })
    }

    /// Transposes the listed sites. The result may have negative eigenvalues.
    pub fn partial_transpose(&self, sites: &[usize]) -> Result<DensityMatrix, QStateError> {
        self.check_sites(sites)?;
        let n = self.size();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            let id = digits(i, &self.dims);
            for j in 0..n {
                let jd = digits(j, &self.dims);
                let (mut a, mut b) = (id.clone(), jd.clone());
                for &s in sites {
                    a[s] = jd[s];
                    b[s] = id[s];
                }
                out[(i, j)] = self.entries[(undigits(&a, &self.dims), undigits(&b, &self.dims))];
            }
        }
        Ok(DensityMatrix {
            dims: self.dims.clone(),
            entries: out,
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::jacobi_eigen(&self.entries).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("nonempty matrix")
    }

    /// Smallest eigenvalue of the partial transpose over `sites`.
    pub fn min_pt_eigenvalue(&self, sites: &[usize]) -> Result<f64, QStateError> {
        Ok(self.partial_transpose(sites)?.min_eigenvalue())
    }

    pub fn is_ppt(&self, sites: &[usize]) -> Result<bool, QStateError> {
        Ok(self.min_pt_eigenvalue(sites)? >= -PSD_TOL)
    }

    /// `Tr(rho O)`
    pub fn expectation(&self, op: &CMatrix) -> Result<Complex64, QStateError> {
        if op.nrows() != self.size() || op.ncols() != self.size() {
            return Err(QStateError::DimensionMismatch(format!(
                "operator is {}x{}, state is {}",
                op.nrows(),
                op.ncols(),
                self.size()
            )));
        }
        Ok(linalg::trace_product(&self.entries, op))
    }

    /// `<O_1 (x) O_2 (x) ...>` for one local operator per site.
    pub fn product_expectation(&self, ops: &[CMatrix]) -> Result<Complex64, QStateError> {
        if ops.len() != self.dims.len() || ops.iter().zip(&self.dims).any(|(o, d)| o.nrows() != *d) {
            return Err(QStateError::DimensionMismatch("one local operator per site expected".into()));
        }
        self.expectation(&linalg::kron_all(ops))
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.entries, &self.entries).re
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<[f64; 2]> = self.entries.transpose().iter().map(|z| [z.re, z.im]).collect();
        serde_json::json!({ "dims": self.dims, "entries": entries })
    }

    /// Reads `{"dims": [...], "entries": [[re, im], ...]}` in row-major order.
    pub fn from_json(text: &str) -> Result<Self, QStateError> {
        #[derive(Deserialize)]
        struct Raw {
            dims: Vec<usize>,
            entries: Vec<[f64; 2]>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| QStateError::Json(e.to_string()))?;
        let n = total_dim(&raw.dims);
        if raw.entries.len() != n * n {
            return Err(QStateError::DimensionMismatch(format!(
                "{} entries for dimension {n}",
                raw.entries.len()
            )));
        }
        let m = CMatrix::from_row_iterator(n, n, raw.entries.iter().map(|[re, im]| c(*re, *im)));
        Self::new(raw.dims, m)
    }
}

/// Eigenvalues in descending order with matching eigenvector columns.
pub fn eigen_hermitian(m: &CMatrix) -> Result<(Vec<f64>, CMatrix), QStateError> {
    if !m.is_square() {
        return Err(QStateError::DimensionMismatch("matrix is not square".into()));
    }
    let defect = linalg::hermiticity_defect(m);
    if defect > 1e-8 {
        return Err(QStateError::NotHermitian(defect));
    }
    Ok(linalg::jacobi_eigen(m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    /// Descending, all above the rank tolerance.
    pub coefficients: Vec<f64>,
    pub basis_a: Vec<Vec<Complex64>>,
    pub basis_b: Vec<Vec<Complex64>>,
    pub rank: usize,
}

impl SchmidtDecomposition {
    pub fn is_entangled(&self) -> bool {
        self.rank > 1
    }

    /// `sum_j p_j |a_j>|b_j>`
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let da = self.basis_a.first().map_or(0, |v| v.len());
        let db = self.basis_b.first().map_or(0, |v| v.len());
        let mut out = vec![c(0.0, 0.0); da * db];
        for (j, p) in self.coefficients.iter().enumerate() {
            for x in 0..da {
                for y in 0..db {
                    out[x * db + y] += self.basis_a[j][x] * self.basis_b[j][y] * *p;
                }
            }
        }
        out
    }
}

pub fn schmidt(psi: &Ket) -> Result<SchmidtDecomposition, QStateError> {
    schmidt_with_tolerance(psi, SCHMIDT_RANK_TOL)
}

/// Schmidt decomposition from the eigenvectors of the reduced state of A;
/// `|b_j> = (<a_j| (x) 1) psi / p_j`.
pub fn schmidt_with_tolerance(psi: &Ket, tol: f64) -> Result<SchmidtDecomposition, QStateError> {
    let [da, db] = psi.dims[..] else {
        return Err(QStateError::DimensionMismatch("Schmidt needs two parties".into()));
    };
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > 1e-10 {
        return Err(QStateError::NotNormalized(n));
    }
    let rho_a = psi.projector().partial_trace(&[0])?;
    let (_, vecs) = linalg::jacobi_eigen(rho_a.entries());
    let mut coefficients = Vec::new();
    let mut basis_a = Vec::new();
    let mut basis_b = Vec::new();
    for j in 0..da {
        let a: Vec<Complex64> = vecs.column(j).iter().copied().collect();
        let b = project_a(psi, &a, db);
        // norm of the projection rather than sqrt of the eigenvalue: keeps
        // numerical zeros at machine precision instead of its square root
        let p = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if p <= tol {
            continue;
        }
        coefficients.push(p);
        basis_a.push(a);
        basis_b.push(b.into_iter().map(|z| z / p).collect());
    }
    let rank = coefficients.len();
    Ok(SchmidtDecomposition {
        coefficients,
        basis_a,
        basis_b,
        rank,
    })
}

/// Number of Schmidt coefficients computed from the reduced state of B.
pub fn schmidt_rank_via_b(psi: &Ket, tol: f64) -> Result<usize, QStateError> {
    let [da, db] = psi.dims[..] else {
        return Err(QStateError::DimensionMismatch("Schmidt needs two parties".into()));
    };
    let rho_b = psi.projector().partial_trace(&[1])?;
    let (_, vecs) = linalg::jacobi_eigen(rho_b.entries());
    let count = (0..db)
        .filter(|&j| {
            let b: Vec<Complex64> = vecs.column(j).iter().copied().collect();
            let norm = (0..da)
                .map(|x| (0..db).map(|y| b[y].conj() * psi.amplitudes[x * db + y]).sum::<Complex64>().norm_sqr())
                .sum::<f64>()
                .sqrt();
            norm > tol
        })
        .count();
    Ok(count)
}

/// `(<a| (x) 1) psi`
fn project_a(psi: &Ket, a: &[Complex64], db: usize) -> Vec<Complex64> {
    let da = a.len();
    (0..db)
        .map(|y| (0..da).map(|x| a[x].conj() * psi.amplitudes[x * db + y]).sum())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub v: [f64; 3],
}

impl BlochVector {
    pub fn of(rho: &DensityMatrix) -> Result<Self, QStateError> {
        if rho.dims() != [2] {
            return Err(QStateError::DimensionMismatch("single qubit expected".into()));
        }
        let e = |op: CMatrix| rho.expectation(&op).map(|z| z.re);
        Ok(Self {
            v: [e(linalg::pauli_x())?, e(linalg::pauli_y())?, e(linalg::pauli_z())?],
        })
    }

    pub fn length(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Local measurement directions aligned with a Bloch vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochDirections {
    pub z: CMatrix,
    pub y: CMatrix,
    pub x: CMatrix,
    pub up: Vec<Complex64>,
    pub down: Vec<Complex64>,
}

pub const BLOCH_DEGENERACY_TOL: f64 = 1e-9;

/// `z' = |v><v| - |v_perp><v_perp|`, `y' = i|v_perp><v| - i|v><v_perp|`,
/// `x' = |v><v_perp| + |v_perp><v|`, from the eigenvectors of `v . sigma`.
pub fn bloch_directions(rho: &DensityMatrix) -> Result<BlochDirections, QStateError> {
    let b = BlochVector::of(rho)?;
    let len = b.length();
    if len < BLOCH_DEGENERACY_TOL {
        return Err(QStateError::DegenerateBloch);
    }
    let n = [b.v[0] / len, b.v[1] / len, b.v[2] / len];
    let (_, vecs) = linalg::jacobi_eigen(&linalg::pauli_dot(n));
    let up: Vec<Complex64> = vecs.column(0).iter().copied().collect();
    let down: Vec<Complex64> = vecs.column(1).iter().copied().collect();
    let i = c(0.0, 1.0);
    let z = outer(&up, &up) - outer(&down, &down);
    let y = outer(&down, &up) * i - outer(&up, &down) * i;
    let x = outer(&up, &down) + outer(&down, &up);
    Ok(BlochDirections { z, y, x, up, down })
}

/// `sigma_phi = e^{-i phi}|0><1| + e^{i phi}|1><0|`
pub fn sigma_phi(phi: f64) -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.0, 0.0),
            Complex64::from_polar(1.0, -phi),
            Complex64::from_polar(1.0, phi),
            c(0.0, 0.0),
        ],
    )
}

/// Parity `P(phi) = (1 + <sigma_phi (x) sigma_phi>) / 2` of a two-qubit state.
pub fn parity(rho: &DensityMatrix, phi: f64) -> Result<f64, QStateError> {
    let s = sigma_phi(phi);
    Ok((1.0 + rho.product_expectation(&[s.clone(), s])?.re) / 2.0)
}

/// `max - min` of the parity over `samples` uniform phases in `[0, pi)`.
pub fn parity_fringe(rho: &DensityMatrix, samples: usize) -> Result<f64, QStateError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m in 0..samples {
        let p = parity(rho, std::f64::consts::PI * m as f64 / samples as f64)?;
        lo = lo.min(p);
        hi = hi.max(p);
    }
    Ok(hi - lo)
}

/// Exact fringe contrast `2 |rho_{00,11}|`.
pub fn parity_fringe_analytic(rho: &DensityMatrix) -> Result<f64, QStateError> {
    if rho.dims() != [2, 2] {
        return Err(QStateError::DimensionMismatch("two qubits expected".into()));
    }
    Ok(2.0 * rho.get(0, 3).norm())
}

fn qubit_ket_from_literal(src: &str, vars: &HashMap<String, f64>) -> Result<Ket, QStateError> {
    let terms = literal::parse_ket_terms(src, vars)?;
    let sites = terms[0].1.len();
    let dims = vec![2; sites];
    let mut amps = vec![c(0.0, 0.0); 1 << sites];
    for (coef, label) in terms {
        if label.len() != sites || label.iter().any(|&d| d > 1) {
            return Err(QStateError::DimensionMismatch(format!("qubit label {label:?}")));
        }
        amps[undigits(&label, &dims)] += coef;
    }
    Ket::new(dims, amps)?.normalized()
}

/// Named pure states: `bell:phi+`, `bell:phi-`, `bell:psi+`, `bell:psi-`,
/// `ghz3`, `w3`, and `ghzN` / `wN` for other sizes.
pub fn named_ket(name: &str) -> Option<Ket> {
    let lit = match name {
        "bell:phi+" => "|00> + |11>".to_string(),
        "bell:phi-" => "|00> - |11>".to_string(),
        "bell:psi+" => "|01> + |10>".to_string(),
        "bell:psi-" => "|01> - |10>".to_string(),
        _ => {
            let (kind, n) = if let Some(n) = name.strip_prefix("ghz") {
                ("ghz", n.parse::<usize>().ok()?)
            } else if let Some(n) = name.strip_prefix('w') {
                ("w", n.parse::<usize>().ok()?)
            } else {
                return None;
            };
            if !(2..=10).contains(&n) {
                return None;
            }
            if kind == "ghz" {
                format!("|{}> + |{}>", "0".repeat(n), "1".repeat(n))
            } else {
                (0..n)
                    .map(|j| {
                        let s: String = (0..n).map(|i| if i == j { '1' } else { '0' }).collect();
                        format!("|{s}>")
                    })
                    .collect::<Vec<_>>()
                    .join(" + ")
            }
        }
    };
    qubit_ket_from_literal(&lit, &HashMap::new()).ok()
}

/// `p |phi+><phi+| + (1-p) 1/4`
pub fn werner(p: f64) -> DensityMatrix {
    let phi = named_ket("bell:phi+").expect("known state").projector();
    let mixed = DensityMatrix::maximally_mixed(vec![2, 2]);
    DensityMatrix {
        dims: vec![2, 2],
        entries: phi.entries * real(p) + mixed.entries * real(1.0 - p),
    }
}

fn parse_single(src: &str) -> Result<DensityMatrix, QStateError> {
    let s = src.trim();
    if let Some(ket) = named_ket(s) {
        return Ok(ket.projector());
    }
    if let Some(p) = s.strip_prefix("werner:") {
        let p = crate::expr::eval_real(p).map_err(LiteralError::from)?;
        return Ok(werner(p));
    }
    if let Some(a) = s.strip_prefix("rho-alpha:") {
        let a = crate::expr::eval_real(a).map_err(LiteralError::from)?;
        return crate::criteria::rho_alpha(a)
            .map_err(|e| QStateError::UnknownState(format!("{s}: {e}")));
    }
    if let Some(n) = s.strip_prefix("mixed:") {
        let n: usize = n.parse().map_err(|_| QStateError::UnknownState(s.into()))?;
        return Ok(DensityMatrix::maximally_mixed(vec![2; n]));
    }
    if s.contains('|') {
        return Ok(qubit_ket_from_literal(s, &HashMap::new())?.projector());
    }
    Err(QStateError::UnknownState(s.to_string()))
}

/// Parses a qubit state literal: a named state, `werner:p`, `rho-alpha:a`,
/// `mixed:n`, a ket such as `|01> - |10>` (normalized on read), or a mixture
/// `w1 : state1 ; w2 : state2`.
pub fn parse_state(src: &str) -> Result<DensityMatrix, QStateError> {
    let single = !src.contains(';') && (!src.contains(':') || is_prefixed(src));
    if single {
        return parse_single(src);
    }
    let mut parts = Vec::new();
    for part in src.split(';').filter(|p| !p.trim().is_empty()) {
        let (w, rest) = part
            .split_once(':')
            .filter(|(w, _)| !is_prefixed(w))
            .ok_or_else(|| QStateError::UnknownState(part.to_string()))?;
        let w = crate::expr::eval_real(w).map_err(LiteralError::from)?;
        parts.push((w, parse_single(rest)?));
    }
    DensityMatrix::mixture(&parts)
}

fn is_prefixed(s: &str) -> bool {
    let s = s.trim();
    ["bell:", "werner:", "rho-alpha:", "mixed:"]
        .iter()
        .any(|p| s.starts_with(p))
}

/// Reads a state from a JSON file path or a literal.
pub fn load_state(arg: &str) -> Result<DensityMatrix, QStateError> {
    let path = std::path::Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| QStateError::Json(e.to_string()))?;
        return DensityMatrix::from_json(&text);
    }
    parse_state(arg)
}
