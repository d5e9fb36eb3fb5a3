//! Order-k duality observables of a two-mode state.
//!
//! With `N_m = <(a_m†)^k a_m^k>` and `den = N_1 + N_2`:
//! `D_k = |N_1 - N_2| / den`, `V_k = 2 |<(a1†)^k a2^k>| / den`,
//! `C_k = <(a1†)^k a1^k (a2†)^k a2^k> / den^2`, `W_k = 2 |<a1^k a2^k>| / den`.
//! All values are unsquared. A vanishing denominator is an error, never NaN.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{FockError, Mode, NormalMonomial, TwoModeState};
use crate::verdict::{Classification, CriterionVerdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DualityError {
    #[error("order-{k} observables are undefined: no {k}-photon component")]
    UndefinedObservable { k: usize },
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("phase grid mismatch: {0}")]
    GridMismatch(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// The moments every order-k observable is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderMoments {
    pub k: usize,
    pub n1: f64,
    pub n2: f64,
    pub coherence: Complex64,
    pub joint: f64,
    pub pair: Complex64,
}

impl OrderMoments {
    pub fn denominator(&self) -> f64 {
        self.n1 + self.n2
    }

    fn checked_denominator(&self) -> Result<f64, DualityError> {
        let den = self.denominator();
        if den <= 0.0 {
            Err(DualityError::UndefinedObservable { k: self.k })
        } else {
            Ok(den)
        }
    }
}

pub fn order_moments(state: &TwoModeState, k: usize) -> Result<OrderMoments, DualityError> {
    if k == 0 {
        return Err(DualityError::ZeroOrder);
    }
    Ok(OrderMoments {
        k,
        n1: state.moment(&NormalMonomial::number_power(Mode::One, k))?.re,
        n2: state.moment(&NormalMonomial::number_power(Mode::Two, k))?.re,
        coherence: state.moment(&NormalMonomial::coherence(k))?,
        joint: state.moment(&NormalMonomial::joint(k))?.re,
        pair: state.moment(&NormalMonomial::pair(k))?,
    })
}

pub fn distinguishability(state: &TwoModeState, k: usize) -> Result<f64, DualityError> {
    let m = order_moments(state, k)?;
    Ok((m.n1 - m.n2).abs() / m.checked_denominator()?)
}

pub fn visibility(state: &TwoModeState, k: usize) -> Result<f64, DualityError> {
    let m = order_moments(state, k)?;
    Ok(2.0 * m.coherence.norm() / m.checked_denominator()?)
}

pub fn coincidence(state: &TwoModeState, k: usize) -> Result<f64, DualityError> {
    let m = order_moments(state, k)?;
    let den = m.checked_denominator()?;
    Ok(m.joint / (den * den))
}

pub fn pair_coherence_w(state: &TwoModeState, k: usize) -> Result<f64, DualityError> {
    let m = order_moments(state, k)?;
    Ok(2.0 * m.pair.norm() / m.checked_denominator()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub k: usize,
    pub d: f64,
    pub v: f64,
    pub c: f64,
    pub w: f64,
    /// `1 - D^2 - V^2`
    pub duality_slack: f64,
    /// `1 - D^2 - W^2`
    pub pair_slack: f64,
    /// `4 C - V^2`
    pub coincidence_slack: f64,
    pub denominator: f64,
    /// Phase of the interferometer arm that maximizes the order-k fringe.
    pub maximizing_phase: f64,
}

impl DualityReport {
    pub fn from_moments(m: &OrderMoments) -> Result<Self, DualityError> {
        let den = m.checked_denominator()?;
        let d = (m.n1 - m.n2).abs() / den;
        let v = 2.0 * m.coherence.norm() / den;
        let c = m.joint / (den * den);
        let w = 2.0 * m.pair.norm() / den;
        Ok(Self {
            k: m.k,
            d,
            v,
            c,
            w,
            duality_slack: 1.0 - d * d - v * v,
            pair_slack: 1.0 - d * d - w * w,
            coincidence_slack: 4.0 * c - v * v,
            denominator: den,
            maximizing_phase: -m.coherence.arg() / m.k as f64,
        })
    }
}

pub fn duality_check(state: &TwoModeState, k: usize) -> Result<DualityReport, DualityError> {
    DualityReport::from_moments(&order_moments(state, k)?)
}

/// First-order slack written out: `4(<n1><n2> - |<a1† a2>|^2) / (<n1>+<n2>)^2`.
pub fn explicit_slack_first_order(state: &TwoModeState) -> Result<f64, DualityError> {
    let m = order_moments(state, 1)?;
    let den = m.checked_denominator()?;
    Ok(4.0 * (m.n1 * m.n2 - m.coherence.norm_sqr()) / (den * den))
}

pub fn entanglement_by_visibility(state: &TwoModeState, k: usize) -> Result<CriterionVerdict, DualityError> {
    let r = duality_check(state, k)?;
    Ok(CriterionVerdict::new(
        &format!("visibility-coincidence-k{k}"),
        r.v * r.v,
        4.0 * r.c,
        Classification::Entangled,
    ))
}

pub fn entanglement_by_distinguishability(
    state: &TwoModeState,
    k: usize,
) -> Result<CriterionVerdict, DualityError> {
    let r = duality_check(state, k)?;
    Ok(CriterionVerdict::new(
        &format!("distinguishability-pair-k{k}"),
        r.d * r.d + r.w * r.w,
        1.0,
        Classification::Entangled,
    ))
}

/// Which detector combination a scan records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorCombination {
    /// `R+`: sum of the two output detectors, used for even k.
    Plus,
    /// `R-`: difference of the two output detectors, used for odd k.
    Minus,
}

impl DetectorCombination {
    pub fn for_order(k: usize) -> Self {
        if k % 2 == 0 {
            DetectorCombination::Plus
        } else {
            DetectorCombination::Minus
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseScan {
    pub base_phase: f64,
    pub combination: DetectorCombination,
    /// `(phi, R(phi))`
    pub samples: Vec<(f64, f64)>,
}

/// Grid phases: `base + 2 m pi / k` for odd k, `base + m pi / k` for even k,
/// `m = 0..k`.
pub fn phase_grid(k: usize, base: f64) -> Vec<f64> {
    let step = if k % 2 == 0 { PI / k as f64 } else { 2.0 * PI / k as f64 };
    (0..k).map(|m| base + m as f64 * step).collect()
}

/// Offset of the second scan, which turns the real part into the imaginary part.
pub fn quadrature_offset(k: usize) -> f64 {
    -PI / (2.0 * k as f64)
}

/// `R±_{k,phi} = 2^{k-1}/k <(a3†)^k a3^k ± (a4†)^k a4^k>` after a phase
/// shift of `phi` on mode 1 followed by the beam splitter.
pub fn detector_signal(
    state: &TwoModeState,
    k: usize,
    phi: f64,
    combination: DetectorCombination,
) -> Result<f64, DualityError> {
    if k == 0 {
        return Err(DualityError::ZeroOrder);
    }
    let needed = state.max_total_photons().max(state.cutoff());
    let out = state
        .phase_shift(Mode::One, phi)
        .with_cutoff(needed)?
        .beam_splitter()?;
    let n3 = out.moment(&NormalMonomial::number_power(Mode::One, k))?.re;
    let n4 = out.moment(&NormalMonomial::number_power(Mode::Two, k))?.re;
    let pref = 2f64.powi(k as i32 - 1) / k as f64;
    Ok(match combination {
        DetectorCombination::Plus => pref * (n3 + n4),
        DetectorCombination::Minus => pref * (n3 - n4),
    })
}

pub fn phase_scan(state: &TwoModeState, k: usize, base: f64) -> Result<PhaseScan, DualityError> {
    let combination = DetectorCombination::for_order(k);
    let samples = phase_grid(k, base)
        .into_iter()
        .map(|phi| Ok((phi, detector_signal(state, k, phi, combination)?)))
        .collect::<Result<Vec<_>, DualityError>>()?;
    Ok(PhaseScan {
        base_phase: base,
        combination,
        samples,
    })
}

/// The two scans needed for reconstruction: at `base` and at
/// `base + quadrature_offset(k)`.
pub fn phase_scans(state: &TwoModeState, k: usize, base: f64) -> Result<[PhaseScan; 2], DualityError> {
    Ok([
        phase_scan(state, k, base)?,
        phase_scan(state, k, base + quadrature_offset(k))?,
    ])
}

fn wrapped_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

const GRID_TOL: f64 = 1e-12;

fn grid_sum(scan: &PhaseScan, k: usize) -> Result<f64, DualityError> {
    let expected = DetectorCombination::for_order(k);
    if scan.combination != expected {
        return Err(DualityError::GridMismatch(format!(
            "order {k} needs {expected:?} detector combination"
        )));
    }
    let grid = phase_grid(k, scan.base_phase);
    if scan.samples.len() != grid.len() {
        return Err(DualityError::GridMismatch(format!(
            "expected {} samples, got {}",
            grid.len(),
            scan.samples.len()
        )));
    }
    let mut sum = 0.0;
    for (m, ((phi, r), want)) in scan.samples.iter().zip(&grid).enumerate() {
        if wrapped_distance(*phi, *want) > GRID_TOL {
            return Err(DualityError::GridMismatch(format!(
                "sample {m} at {phi}, expected {want}"
            )));
        }
        let sign = if k % 2 == 0 && m % 2 == 1 { -1.0 } else { 1.0 };
        sum += sign * r;
    }
    Ok(sum)
}

/// Recovers `2 |<(a1†)^k a2^k>|` from the two detector scans.
///
/// Each grid sum isolates the `e^{ik phi}` Fourier component of the signal,
/// giving `2 Re(M e^{ik phi'})` and `2 Im(M e^{ik phi'})`.
pub fn reconstruct_vk_from_phase_scan(scans: &[PhaseScan], k: usize) -> Result<f64, DualityError> {
    if k == 0 {
        return Err(DualityError::ZeroOrder);
    }
    let [first, second] = scans else {
        return Err(DualityError::GridMismatch(format!(
            "need exactly two scans, got {}",
            scans.len()
        )));
    };
    if wrapped_distance(second.base_phase, first.base_phase + quadrature_offset(k)) > GRID_TOL {
        return Err(DualityError::GridMismatch(
            "second scan must be offset by -pi/(2k)".to_string(),
        ));
    }
    let re = grid_sum(first, k)?;
    let im = grid_sum(second, k)?;
    Ok((re * re + im * im).sqrt())
}

/// Visibility computed from simulated detector scans instead of the direct moment.
pub fn reconstructed_visibility(state: &TwoModeState, k: usize, base: f64) -> Result<f64, DualityError> {
    let scans = phase_scans(state, k, base)?;
    let m = order_moments(state, k)?;
    Ok(reconstruct_vk_from_phase_scan(&scans, k)? / m.checked_denominator()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::parse_two_mode;
    use approx::assert_relative_eq;

    fn st(src: &str) -> TwoModeState {
        parse_two_mode(src, 8).unwrap()
    }

    #[test]
    fn distinguishability_examples() {
        assert_eq!(distinguishability(&st("|0,1>"), 1).unwrap(), 1.0);
        assert_eq!(distinguishability(&st("|2,0>"), 2).unwrap(), 1.0);
        assert_eq!(distinguishability(&st("|1,1>"), 1).unwrap(), 0.0);
    }

    #[test]
    fn visibility_examples() {
        assert_eq!(visibility(&st("|1,0> + |0,1>"), 1).unwrap(), 1.0);
        assert_eq!(visibility(&st("|2,0> + |0,2>"), 2).unwrap(), 1.0);
        assert_eq!(visibility(&st("|4,2> + |2,4>"), 2).unwrap(), 6.0 / 7.0);
    }

    #[test]
    fn coincidence_examples() {
        assert_eq!(coincidence(&st("|1,1>"), 1).unwrap(), 0.25);
        // normalized product (|0>+|1>)(|0>+|1>)/2
        assert_eq!(coincidence(&st("|0,0> + |0,1> + |1,0> + |1,1>"), 1).unwrap(), 0.25);
        assert_eq!(coincidence(&st("|1,0>"), 1).unwrap(), 0.0);
    }

    #[test]
    fn pair_coherence_examples() {
        assert_relative_eq!(
            pair_coherence_w(&st("sqrt(3)|0,0> + |1,1>"), 1).unwrap(),
            3f64.sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(pair_coherence_w(&st("|1,1>"), 1).unwrap(), 0.0);
        assert_eq!(pair_coherence_w(&st("|0,0> + |1,1>"), 1).unwrap(), 1.0);
    }

    #[test]
    fn undefined_is_an_error() {
        let vac = st("|0,0>");
        assert_eq!(
            distinguishability(&vac, 1),
            Err(DualityError::UndefinedObservable { k: 1 })
        );
        assert!(duality_check(&st("|1,1>"), 2).is_err());
        assert_eq!(visibility(&vac, 0), Err(DualityError::ZeroOrder));
    }

    #[test]
    fn duality_check_examples() {
        let a = PI / 8.0;
        let s = st(&format!("{}|1,0> + {}|0,1>", a.cos(), a.sin()));
        let r = duality_check(&s, 1).unwrap();
        assert_relative_eq!(r.d, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r.v, 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(r.duality_slack.abs() < 1e-15);

        let mix = st("3/4 : |0,1> ; 1/4 : |1,0>");
        let r = duality_check(&mix, 1).unwrap();
        assert_eq!((r.d, r.v), (0.5, 0.0));

        let r = duality_check(&st("|1,1>"), 1).unwrap();
        assert_eq!((r.d, r.v, r.duality_slack), (0.0, 0.0, 1.0));
    }

    #[test]
    fn explicit_slack_matches_report() {
        let s = st("(0.3 + 0.2i)|1,0> + 0.5|0,1> - 0.4|2,1> + 0.1i|1,3>");
        let r = duality_check(&s, 1).unwrap();
        assert_relative_eq!(r.duality_slack, explicit_slack_first_order(&s).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn maximizing_phase_gives_full_fringe() {
        let s = st("|1,0> + i|0,1>");
        let r = duality_check(&s, 1).unwrap();
        let shifted = s.phase_shift(Mode::One, r.maximizing_phase);
        let m = shifted.moment(&NormalMonomial::coherence(1)).unwrap();
        assert!(m.im.abs() < 1e-15 && m.re > 0.0);
    }

    #[test]
    fn verdict_examples() {
        let psi4 = st("|1,0> + |0,1>");
        assert!(entanglement_by_visibility(&psi4, 1).unwrap().violated);
        assert!(!entanglement_by_visibility(&st("|1,1>"), 1).unwrap().violated);
        let mix = st("1/4 : |0,1> ; 1/4 : |1,0> ; 1/2 : |1,0> + |0,1>");
        let v = entanglement_by_visibility(&mix, 1).unwrap();
        assert!(v.violated);
        assert_eq!(v.lhs, 0.25);

        let w = entanglement_by_distinguishability(&st("sqrt(3)|0,0> + |1,1>"), 1).unwrap();
        assert!(w.violated);
        assert_relative_eq!(w.lhs, 3.0, epsilon = 1e-14);
        assert!(!entanglement_by_distinguishability(&st("|1,0>"), 1).unwrap().violated);
        assert!(!entanglement_by_distinguishability(&psi4, 1).unwrap().violated);
    }

    #[test]
    fn reconstruction_examples() {
        let s = st("|2,0> + |0,2>");
        let scans = phase_scans(&s, 2, 0.0).unwrap();
        let phases: Vec<f64> = scans.iter().flat_map(|sc| sc.samples.iter().map(|p| p.0)).collect();
        assert_eq!(phases, vec![0.0, PI / 2.0, -PI / 4.0, PI / 4.0]);
        assert_relative_eq!(reconstruct_vk_from_phase_scan(&scans, 2).unwrap(), 2.0, epsilon = 1e-12);

        let s = st("|1,0> + |0,1>");
        let scans = phase_scans(&s, 1, 0.0).unwrap();
        assert_relative_eq!(reconstruct_vk_from_phase_scan(&scans, 1).unwrap(), 1.0, epsilon = 1e-12);

        let s = st("|1,1> + |3,0>");
        let scans = phase_scans(&s, 3, 0.4).unwrap();
        assert!(reconstruct_vk_from_phase_scan(&scans, 3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn reconstruction_rejects_bad_grids() {
        let s = st("|1,0> + |0,1>");
        let mut scans = phase_scans(&s, 3, 0.0).unwrap();
        scans[0].samples[1].0 += 1e-6;
        assert!(matches!(
            reconstruct_vk_from_phase_scan(&scans, 3),
            Err(DualityError::GridMismatch(_))
        ));
        let scans = phase_scans(&s, 1, 0.0).unwrap();
        assert!(reconstruct_vk_from_phase_scan(&scans, 2).is_err());
        assert!(reconstruct_vk_from_phase_scan(&scans[..1], 1).is_err());
    }
}
