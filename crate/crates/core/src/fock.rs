//! Truncated two-mode bosonic Fock space.
//!
//! Basis ordering is row-major: index = n1 * (cutoff + 1) + n2.
//! Kets may be unnormalized; every expectation value divides by the norm, so
//! a ket written with integer amplitudes keeps exact moments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_CUTOFF: usize = 8;

/// Sign convention of the 50:50 beam splitter, fixed for the whole crate.
pub const BEAM_SPLITTER_CONVENTION: &str = "a3 = (a1 + a2)/sqrt(2), a4 = (a1 - a2)/sqrt(2)";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("photon number would exceed cutoff {0}")]
    CutoffExceeded(usize),
    #[error("amplitude vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("invalid ensemble weight {0}")]
    BadWeight(f64),
    #[error("ensemble weights sum to {0}, not 1")]
    WeightsNotNormalized(f64),
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("components have different cutoffs")]
    CutoffMismatch,
    #[error("state has zero norm")]
    ZeroNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub fn from_index(i: usize) -> Option<Mode> {
        match i {
            1 => Some(Mode::One),
            2 => Some(Mode::Two),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ladder {
    Create(Mode),
    Annihilate(Mode),
}

impl Ladder {
    pub fn mode(&self) -> Mode {
        match self {
            Ladder::Create(m) | Ladder::Annihilate(m) => *m,
        }
    }
}

/// Normally ordered monomial `(a1†)^c1 a1^d1 (a2†)^c2 a2^d2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct NormalMonomial {
    pub c1: usize,
    pub d1: usize,
    pub c2: usize,
    pub d2: usize,
}

impl NormalMonomial {
    pub fn new(c1: usize, d1: usize, c2: usize, d2: usize) -> Self {
        Self { c1, d1, c2, d2 }
    }

    /// `(a_m†)^k a_m^k`
    pub fn number_power(mode: Mode, k: usize) -> Self {
        match mode {
            Mode::One => Self::new(k, k, 0, 0),
            Mode::Two => Self::new(0, 0, k, k),
        }
    }

    /// `(a1†)^k a2^k`
    pub fn coherence(k: usize) -> Self {
        Self::new(k, 0, 0, k)
    }

    /// `a1^k a2^k`
    pub fn pair(k: usize) -> Self {
        Self::new(0, k, 0, k)
    }

    /// `(a1†)^k a1^k (a2†)^k a2^k`
    pub fn joint(k: usize) -> Self {
        Self::new(k, k, k, k)
    }

    pub fn is_diagonal(&self) -> bool {
        self.c1 == self.d1 && self.c2 == self.d2
    }
}

/// `n!/(n-d)! * m!/(m-c)!` style product, kept as an integer while it fits.
enum Factor {
    Int(u128),
    Float(f64),
}

impl Factor {
    fn one() -> Self {
        Factor::Int(1)
    }

    fn mul(self, x: u64) -> Self {
        match self {
            Factor::Int(v) => match v.checked_mul(x as u128) {
                Some(p) => Factor::Int(p),
                None => Factor::Float(v as f64 * x as f64),
            },
            Factor::Float(v) => Factor::Float(v * x as f64),
        }
    }

    fn sqrt(self) -> f64 {
        match self {
            Factor::Int(v) => (v as f64).sqrt(),
            Factor::Float(v) => v.sqrt(),
        }
    }
}

/// Multiplies `acc` by the falling factorial `n (n-1) ... (n-count+1)`.
fn falling(mut acc: Factor, n: usize, count: usize) -> Factor {
    for j in 0..count {
        acc = acc.mul((n - j) as u64);
    }
    acc
}

/// Pure two-mode ket over the truncated basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockKet {
    cutoff: usize,
    amplitudes: Vec<Complex64>,
}

impl FockKet {
    pub fn zeros(cutoff: usize) -> Self {
        let dim = (cutoff + 1) * (cutoff + 1);
        Self {
            cutoff,
            amplitudes: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn basis(n1: usize, n2: usize, cutoff: usize) -> Result<Self, FockError> {
        let mut ket = Self::zeros(cutoff);
        ket.set(n1, n2, Complex64::new(1.0, 0.0))?;
        Ok(ket)
    }

    pub fn from_amplitudes(cutoff: usize, amplitudes: Vec<Complex64>) -> Result<Self, FockError> {
        let expected = (cutoff + 1) * (cutoff + 1);
        if amplitudes.len() != expected {
            return Err(FockError::BadLength {
                got: amplitudes.len(),
                expected,
            });
        }
        Ok(Self { cutoff, amplitudes })
    }

    /// Builds a ket from `(coefficient, n1, n2)` terms; repeated terms add.
    pub fn from_terms(
        cutoff: usize,
        terms: &[(Complex64, usize, usize)],
    ) -> Result<Self, FockError> {
        let mut ket = Self::zeros(cutoff);
        for &(c, n1, n2) in terms {
            let old = ket.get(n1, n2).ok_or(FockError::CutoffExceeded(cutoff))?;
            ket.set(n1, n2, old + c)?;
        }
        Ok(ket)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn index(&self, n1: usize, n2: usize) -> usize {
        n1 * (self.cutoff + 1) + n2
    }

    pub fn get(&self, n1: usize, n2: usize) -> Option<Complex64> {
        if n1 > self.cutoff || n2 > self.cutoff {
            return None;
        }
        Some(self.amplitudes[self.index(n1, n2)])
    }

    pub fn set(&mut self, n1: usize, n2: usize, value: Complex64) -> Result<(), FockError> {
        if n1 > self.cutoff || n2 > self.cutoff {
            return Err(FockError::CutoffExceeded(self.cutoff));
        }
        let i = self.index(n1, n2);
        self.amplitudes[i] = value;
        Ok(())
    }

    /// Populated basis states as `(n1, n2, amplitude)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let side = self.cutoff + 1;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
            .map(move |(i, a)| (i / side, i % side, *a))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms().next().is_none()
    }

    pub fn normalized(&self) -> Result<Self, FockError> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(FockError::ZeroNorm);
        }
        let s = n.sqrt();
        Ok(Self {
            cutoff: self.cutoff,
            amplitudes: self.amplitudes.iter().map(|a| a / s).collect(),
        })
    }

    pub fn inner(&self, other: &FockKet) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n1, n2, a) in self.terms() {
            if let Some(b) = other.get(n1, n2) {
                acc += a.conj() * b;
            }
        }
        acc
    }

    /// Largest total photon number among populated basis states.
    pub fn max_total_photons(&self) -> usize {
        self.terms().map(|(n1, n2, _)| n1 + n2).max().unwrap_or(0)
    }

    /// Re-embeds the ket in a space with a different cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self, FockError> {
        let mut out = Self::zeros(cutoff);
        for (n1, n2, a) in self.terms() {
            out.set(n1, n2, a)?;
        }
        Ok(out)
    }

    pub fn apply_creation(&self, mode: Mode) -> Result<Self, FockError> {
        let mut out = Self::zeros(self.cutoff);
        for (n1, n2, a) in self.terms() {
            let (m1, m2, n) = match mode {
                Mode::One => (n1 + 1, n2, n1 + 1),
                Mode::Two => (n1, n2 + 1, n2 + 1),
            };
            if m1 > self.cutoff || m2 > self.cutoff {
                return Err(FockError::CutoffExceeded(self.cutoff));
            }
            let i = out.index(m1, m2);
            out.amplitudes[i] += a * (n as f64).sqrt();
        }
        Ok(out)
    }

    /// Annihilating the vacuum gives the zero ket; check with [`FockKet::is_zero`].
    pub fn apply_annihilation(&self, mode: Mode) -> Self {
        let mut out = Self::zeros(self.cutoff);
        for (n1, n2, a) in self.terms() {
            let n = match mode {
                Mode::One => n1,
                Mode::Two => n2,
            };
            if n == 0 {
                continue;
            }
            let (m1, m2) = match mode {
                Mode::One => (n1 - 1, n2),
                Mode::Two => (n1, n2 - 1),
            };
            let i = out.index(m1, m2);
            out.amplitudes[i] += a * (n as f64).sqrt();
        }
        out
    }

    /// Applies a product of ladder operators, rightmost first. The integer
    /// factors of each basis state are multiplied before a single square
    /// root, so words such as `a a†` act exactly.
    pub fn apply_word(&self, word: &[Ladder]) -> Result<Self, FockError> {
        let mut out = Self::zeros(self.cutoff);
        'terms: for (n1, n2, a) in self.terms() {
            let (mut m1, mut m2) = (n1, n2);
            let mut f = Factor::one();
            for op in word.iter().rev() {
                let n = match op.mode() {
                    Mode::One => &mut m1,
                    Mode::Two => &mut m2,
                };
                match op {
                    Ladder::Create(_) => {
                        if *n == self.cutoff {
                            return Err(FockError::CutoffExceeded(self.cutoff));
                        }
                        *n += 1;
                        f = f.mul(*n as u64);
                    }
                    Ladder::Annihilate(_) => {
                        if *n == 0 {
                            continue 'terms;
                        }
                        f = f.mul(*n as u64);
                        *n -= 1;
                    }
                }
            }
            let i = out.index(m1, m2);
            out.amplitudes[i] += a * f.sqrt();
        }
        Ok(out)
    }

    pub fn phase_shift(&self, mode: Mode, phi: f64) -> Self {
        let mut out = self.clone();
        let side = self.cutoff + 1;
        for (i, a) in out.amplitudes.iter_mut().enumerate() {
            let n = match mode {
                Mode::One => i / side,
                Mode::Two => i % side,
            };
            if n != 0 {
                *a *= Complex64::from_polar(1.0, -phi * n as f64);
            }
        }
        out
    }

    /// 50:50 beam splitter in the crate convention; output keeps the cutoff.
    pub fn beam_splitter(&self) -> Result<Self, FockError> {
        if self.max_total_photons() > self.cutoff {
            return Err(FockError::CutoffExceeded(self.cutoff));
        }
        let mut out = Self::zeros(self.cutoff);
        for (n1, n2, a) in self.terms() {
            let total = n1 + n2;
            let scale = 0.5f64.powi(total as i32).sqrt();
            for j in 0..=n1 {
                for l in 0..=n2 {
                    let m3 = j + l;
                    let m4 = total - m3;
                    // sqrt(m3! m4! / (n1! n2!))
                    let ratio = factorial(m3) * factorial(m4) / (factorial(n1) * factorial(n2));
                    let sign = if (n2 - l) % 2 == 0 { 1.0 } else { -1.0 };
                    let c = binomial(n1, j) * binomial(n2, l) * sign * ratio.sqrt() * scale;
                    let i = out.index(m3, m4);
                    out.amplitudes[i] += a * c;
                }
            }
        }
        Ok(out)
    }

    /// `<psi| M |psi>` without normalization.
    pub fn raw_moment(&self, m: &NormalMonomial) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n1, n2, a) in self.terms() {
            if n1 < m.d1 || n2 < m.d2 {
                continue;
            }
            let t1 = n1 - m.d1 + m.c1;
            let t2 = n2 - m.d2 + m.c2;
            let Some(b) = self.get(t1, t2) else { continue };
            if b.re == 0.0 && b.im == 0.0 {
                continue;
            }
            let mut f = Factor::one();
            f = falling(f, n1, m.d1);
            f = falling(f, t1, m.c1);
            f = falling(f, n2, m.d2);
            f = falling(f, t2, m.c2);
            acc += b.conj() * a * f.sqrt();
        }
        acc
    }

    /// Normalized expectation value of a monomial.
    pub fn moment(&self, m: &NormalMonomial) -> Result<Complex64, FockError> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(FockError::ZeroNorm);
        }
        Ok(self.raw_moment(m) / n)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * j as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Pure,
    Mixed,
}

/// Pure ket or weighted ensemble of kets. Each component is read as the
/// normalized projector `|psi><psi| / <psi|psi>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoModeState {
    cutoff: usize,
    components: Vec<(f64, FockKet)>,
}

impl TwoModeState {
    pub fn pure(ket: FockKet) -> Self {
        Self {
            cutoff: ket.cutoff,
            components: vec![(1.0, ket)],
        }
    }

    pub fn mixture(components: Vec<(f64, FockKet)>) -> Result<Self, FockError> {
        let first = components.first().ok_or(FockError::EmptyEnsemble)?;
        let cutoff = first.1.cutoff;
        let mut total = 0.0;
        for (w, ket) in &components {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(FockError::BadWeight(*w));
            }
            if ket.cutoff != cutoff {
                return Err(FockError::CutoffMismatch);
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(FockError::WeightsNotNormalized(total));
        }
        Ok(Self { cutoff, components })
    }

    pub fn basis(n1: usize, n2: usize, cutoff: usize) -> Result<Self, FockError> {
        Ok(Self::pure(FockKet::basis(n1, n2, cutoff)?))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn components(&self) -> &[(f64, FockKet)] {
        &self.components
    }

    pub fn purity(&self) -> Purity {
        if self.components.len() == 1 {
            Purity::Pure
        } else {
            Purity::Mixed
        }
    }

    /// The single ket of a pure state.
    pub fn as_pure(&self) -> Option<&FockKet> {
        match self.components.as_slice() {
            [(_, ket)] => Some(ket),
            _ => None,
        }
    }

    fn map_kets<F>(&self, f: F) -> Result<Self, FockError>
    where
        F: Fn(&FockKet) -> Result<FockKet, FockError>,
    {
        let components = self
            .components
            .iter()
            .map(|(w, k)| Ok((*w, f(k)?)))
            .collect::<Result<Vec<_>, FockError>>()?;
        Ok(Self {
            cutoff: components[0].1.cutoff,
            components,
        })
    }

    pub fn normalize(&self) -> Result<Self, FockError> {
        self.map_kets(|k| k.normalized())
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self, FockError> {
        self.map_kets(|k| k.with_cutoff(cutoff))
    }

    pub fn apply_creation(&self, mode: Mode) -> Result<Self, FockError> {
        self.map_kets(|k| k.apply_creation(mode))
    }

    pub fn apply_annihilation(&self, mode: Mode) -> Self {
        self.map_kets(|k| Ok(k.apply_annihilation(mode)))
            .expect("annihilation cannot fail")
    }

    /// True when any component was mapped to the zero vector.
    pub fn has_zero_component(&self) -> bool {
        self.components.iter().any(|(_, k)| k.is_zero())
    }

    pub fn phase_shift(&self, mode: Mode, phi: f64) -> Self {
        self.map_kets(|k| Ok(k.phase_shift(mode, phi)))
            .expect("phase shift cannot fail")
    }

    pub fn beam_splitter(&self) -> Result<Self, FockError> {
        self.map_kets(|k| k.beam_splitter())
    }

    pub fn max_total_photons(&self) -> usize {
        self.components
            .iter()
            .map(|(_, k)| k.max_total_photons())
            .max()
            .unwrap_or(0)
    }

    /// Ensemble-weighted normalized moment.
    pub fn moment(&self, m: &NormalMonomial) -> Result<Complex64, FockError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, ket) in &self.components {
            if *w == 0.0 {
                continue;
            }
            acc += ket.moment(m)? * *w;
        }
        Ok(acc)
    }

    /// JSON export: cutoff, ordering note and per-component `[re, im]` arrays.
    pub fn to_json(&self) -> serde_json::Value {
        let comps: Vec<serde_json::Value> = self
            .components
            .iter()
            .map(|(w, k)| {
                serde_json::json!({
                    "weight": w,
                    "amplitudes": k.amplitudes.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "cutoff": self.cutoff,
            "ordering": "row-major, index = n1*(cutoff+1) + n2",
            "purity": self.purity(),
            "components": comps,
        })
    }
}
