//! Gradient-field variance bounds for entanglement width.

use std::collections::HashMap;

use serde::Serialize;

use super::{weighted_total_variance, CollectiveError, PairingStructure, SpinEnsemble};
use crate::linalg::{c, real};
use crate::qstate::Ket;

/// `2 - √3`: below this coupling ratio the singlet stops being the best pair state.
pub const EPSILON_0: f64 = 0.267_949_192_431_122_7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairVariance {
    pub value: f64,
    /// `a_k / a_j` after ordering `|a_j| >= |a_k|`; 0 when both couplings vanish.
    pub epsilon: f64,
    pub singlet_optimal: bool,
    /// Both couplings are zero, so the pair does not see the field at all.
    pub zero_coupling: bool,
}

/// Minimal `(ΔB)²` of two particles with couplings `a_j`, `a_k` over all
/// two-qubit states. Argument order does not matter.
pub fn min_pair_variance(a_j: f64, a_k: f64) -> PairVariance {
    let (big, small) = if a_j.abs() >= a_k.abs() { (a_j, a_k) } else { (a_k, a_j) };
    if big == 0.0 {
        return PairVariance {
            value: 0.0,
            epsilon: 0.0,
            singlet_optimal: true,
            zero_coupling: true,
        };
    }
    let eps = small / big;
    let a2 = big * big;
    let (value, singlet_optimal) = if eps <= EPSILON_0 {
        let d = 1.0 - eps;
        (a2 * (2.0 + 2.0 * eps * eps - 4.0 * eps * eps / (d * d)), false)
    } else {
        (3.0 * a2 * (1.0 - eps) * (1.0 - eps), true)
    };
    PairVariance {
        value,
        epsilon: eps,
        singlet_optimal,
        zero_coupling: false,
    }
}

/// Best product state of one particle: a pure spin, `(ΔB)² = 2a²`.
pub fn singleton_min_variance(a: f64) -> f64 {
    2.0 * a * a
}

/// Lower bound on `(ΔB)²` for states built on a fixed pairing.
pub fn pairing_variance_bound(couplings: &[f64], structure: &PairingStructure) -> Result<f64, CollectiveError> {
    if couplings.len() != structure.len() {
        return Err(CollectiveError::DimensionMismatch(format!(
            "{} couplings for {} particles",
            couplings.len(),
            structure.len()
        )));
    }
    let mut total = 0.0;
    for g in structure.groups() {
        if g.len() != 2 {
            return Err(CollectiveError::BadGrouping(g[0]));
        }
        total += min_pair_variance(couplings[g[0]], couplings[g[1]]).value;
    }
    for j in structure.singleton_sites() {
        total += singleton_min_variance(couplings[j]);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingResult {
    pub structure: PairingStructure,
    pub bound: f64,
}

/// Exact minimum of [`pairing_variance_bound`] over pairings whose width is
/// at most `max_width` (pairs `j < k` with `k - j + 1 <= max_width`).
///
/// Dynamic programming left to right; the state is the current site plus
/// the set of later sites already taken by earlier partners.
pub fn optimal_pairing(ensemble: &SpinEnsemble, max_width: usize) -> PairingResult {
    let a = ensemble.couplings();
    let n = a.len();
    assert!(n <= 64, "pairing search supports at most 64 particles");
    let reach = max_width.max(1) - 1;
    let mut memo: HashMap<(usize, u64), (f64, Option<usize>)> = HashMap::new();
    best(0, 0, &a, reach, &mut memo);

    let mut pairs = Vec::new();
    let (mut i, mut taken) = (0usize, 0u64);
    while i < n {
        if taken >> i & 1 == 1 {
            taken &= !(1 << i);
            i += 1;
            continue;
        }
        let (_, choice) = memo[&(i, taken)];
        if let Some(k) = choice {
            pairs.push((i, k));
            taken |= 1 << k;
        }
        i += 1;
    }
    let structure = PairingStructure::from_pairs(n, &pairs).expect("disjoint by construction");
    let bound = pairing_variance_bound(&a, &structure).expect("pairs only");
    PairingResult { structure, bound }
}

fn best(i: usize, taken: u64, a: &[f64], reach: usize, memo: &mut HashMap<(usize, u64), (f64, Option<usize>)>) -> f64 {
    let n = a.len();
    if i == n {
        return 0.0;
    }
    if taken >> i & 1 == 1 {
        return best(i + 1, taken & !(1 << i), a, reach, memo);
    }
    if let Some(&(v, _)) = memo.get(&(i, taken)) {
        return v;
    }
    let mut value = singleton_min_variance(a[i]) + best(i + 1, taken, a, reach, memo);
    let mut choice = None;
    for k in i + 1..=(i + reach).min(n - 1) {
        if taken >> k & 1 == 1 {
            continue;
        }
        let v = min_pair_variance(a[i], a[k]).value + best(i + 1, taken | 1 << k, a, reach, memo);
        if v < value - 1e-15 {
            value = v;
            choice = Some(k);
        }
    }
    memo.insert((i, taken), (value, choice));
    value
}

/// `{(0,1), (2,3), ...}`
pub fn nearest_neighbor_pairing(n: usize) -> Result<PairingStructure, CollectiveError> {
    if n < 2 || n % 2 == 1 {
        return Err(CollectiveError::OddN(n));
    }
    let pairs: Vec<_> = (0..n / 2).map(|p| (2 * p, 2 * p + 1)).collect();
    PairingStructure::from_pairs(n, &pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthBound {
    pub n: usize,
    /// `(3/2) N (1 - cos(π/N))`
    pub exact: f64,
    /// `3π² / (4N)`
    pub approximation: f64,
}

/// Variance floor for nearest-neighbour singlet pairs on the uniform grid
/// (see [`SpinEnsemble::uniform_grid`]).
pub fn width_bound_nearest_neighbor(n: usize) -> Result<WidthBound, CollectiveError> {
    if n < 2 || n % 2 == 1 {
        return Err(CollectiveError::OddN(n));
    }
    let nf = n as f64;
    let pi = std::f64::consts::PI;
    Ok(WidthBound {
        n,
        exact: 1.5 * nf * (1.0 - (pi / nf).cos()),
        approximation: 3.0 * pi * pi / (4.0 * nf),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Configuration {
    /// Every particle in its own variance-minimizing pure state.
    Product,
    /// Singlets on `(0,1), (2,3), ...`
    NearestNeighborSinglets,
    /// Singlets on mirrored sites `(j, N-1-j)`.
    SeparatedSinglets,
    /// Optimized bound over all width-2 states.
    W2Bound,
}

impl Configuration {
    pub const ALL: [Configuration; 4] = [
        Configuration::Product,
        Configuration::NearestNeighborSinglets,
        Configuration::SeparatedSinglets,
        Configuration::W2Bound,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Configuration::Product => "product",
            Configuration::NearestNeighborSinglets => "nearest-neighbor-singlets",
            Configuration::SeparatedSinglets => "separated-singlets",
            Configuration::W2Bound => "w2-bound",
        }
    }
}

impl std::str::FromStr for Configuration {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Configuration::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| format!("unknown configuration {s:?}"))
    }
}

/// One CSV line: `lambda,configuration,variance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure6Row {
    pub lambda: f64,
    pub configuration: Configuration,
    pub variance: f64,
}

fn singlet() -> Ket {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ket::new(vec![2, 2], vec![real(0.0), c(s, 0.0), c(-s, 0.0), real(0.0)]).expect("4 amplitudes")
}

/// Variance of a product of independent blocks: the sum of block variances.
fn blocks_variance(a: &[f64], blocks: &[(Vec<usize>, Ket)]) -> Result<f64, CollectiveError> {
    let mut total = 0.0;
    for (sites, ket) in blocks {
        let w: Vec<f64> = sites.iter().map(|&j| a[j]).collect();
        total += weighted_total_variance(ket, &w)?;
    }
    Ok(total)
}

/// Blocks (sites, state) realizing a configuration; `None` for the bound.
pub fn configuration_blocks(n: usize, config: Configuration) -> Option<Vec<(Vec<usize>, Ket)>> {
    let up = Ket::basis(vec![2], &[0]).expect("qubit");
    match config {
        Configuration::Product => Some((0..n).map(|j| (vec![j], up.clone())).collect()),
        Configuration::NearestNeighborSinglets => {
            Some((0..n / 2).map(|p| (vec![2 * p, 2 * p + 1], singlet())).collect())
        }
        Configuration::SeparatedSinglets => Some((0..n / 2).map(|j| (vec![j, n - 1 - j], singlet())).collect()),
        Configuration::W2Bound => None,
    }
}

/// `(ΔB)²` of each configuration against wavelength. Particles sit on the
/// uniform grid built for `λ = 1`; only `λ` varies along the sweep.
pub fn figure6_sweep(
    n: usize,
    lambdas: &[f64],
    configurations: &[Configuration],
) -> Result<Vec<Figure6Row>, CollectiveError> {
    if n < 2 || n % 2 == 1 {
        return Err(CollectiveError::OddN(n));
    }
    let base = SpinEnsemble::uniform_grid(n, 1.0)?;
    let mut rows = Vec::new();
    for &lambda in lambdas {
        let ens = base.with_wavelength(lambda)?;
        let a = ens.couplings();
        for &config in configurations {
            let variance = match configuration_blocks(n, config) {
                Some(blocks) => blocks_variance(&a, &blocks)?,
                None => optimal_pairing(&ens, 2).bound,
            };
            rows.push(Figure6Row {
                lambda,
                configuration: config,
                variance,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collective::gradient_variance_b;
    use crate::optim::{multistart, NelderMeadOptions};
    use crate::random::{haar_ket, rng};
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn ket_from(params: &[f64]) -> Ket {
        let amps = (0..4).map(|i| c(params[2 * i], params[2 * i + 1])).collect();
        Ket::new(vec![2, 2], amps).unwrap()
    }

    /// Oracle: minimize the variance over all pure two-qubit states.
    fn brute_force_pair(aj: f64, ak: f64) -> f64 {
        let f = |p: &[f64]| {
            let k = ket_from(p);
            if k.norm_sqr() < 1e-6 {
                return 1e6;
            }
            weighted_total_variance(&k, &[aj, ak]).unwrap()
        };
        let opts = NelderMeadOptions {
            step: 0.4,
            max_iters: 6000,
            sd_tolerance: 1e-16,
        };
        multistart(&f, |r| (0..8).map(|_| StandardNormal.sample(r)).collect(), 24, 3, opts).f
    }

    #[test]
    fn pair_formula_matches_brute_force() {
        for eps in [-1.0, -0.5, 0.0, 0.27, 0.5, 1.0] {
            let want = min_pair_variance(1.0, eps).value;
            let got = brute_force_pair(1.0, eps);
            assert!((got - want).abs() < 1e-6, "eps {eps}: formula {want}, search {got}");
        }
    }

    #[test]
    fn pair_formula_properties() {
        assert_eq!(min_pair_variance(0.8, 0.8).value, 0.0);
        let lo = 0.7 * 0.7 * {
            let e = EPSILON_0;
            2.0 + 2.0 * e * e - 4.0 * e * e / ((1.0 - e) * (1.0 - e))
        };
        let hi = 3.0 * 0.7 * 0.7 * (1.0 - EPSILON_0) * (1.0 - EPSILON_0);
        assert!((lo - hi).abs() < 1e-12);
        assert!((EPSILON_0 - (2.0 - 3f64.sqrt())).abs() < 1e-15);
        let mut r = rng(8);
        for _ in 0..200 {
            let (x, y) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            assert_eq!(min_pair_variance(x, y), min_pair_variance(y, x));
            let v = min_pair_variance(x, y).value;
            assert!(v >= -1e-15 && v <= singleton_min_variance(x) + singleton_min_variance(y) + 1e-12);
        }
        let z = min_pair_variance(0.0, 0.0);
        assert!(z.zero_coupling && z.value == 0.0);
    }

    #[test]
    fn closed_form_bound_values() {
        let b = width_bound_nearest_neighbor(16).unwrap();
        assert_eq!(b.exact, 1.5 * 16.0 * (1.0 - (std::f64::consts::PI / 16.0).cos()));
        assert!((b.exact - 0.46116).abs() < 1e-5);
        assert!((b.approximation - 0.46260).abs() < 1e-4);
        assert_eq!(b.approximation, 3.0 * std::f64::consts::PI.powi(2) / 64.0);
        assert!((width_bound_nearest_neighbor(2).unwrap().exact - 3.0).abs() < 1e-12);
        assert!(matches!(width_bound_nearest_neighbor(5), Err(CollectiveError::OddN(5))));
        assert!(width_bound_nearest_neighbor(0).is_err());
    }

    #[test]
    fn closed_form_is_the_nearest_neighbor_cost() {
        let nn_cost = |n| {
            let e = SpinEnsemble::uniform_grid(n, 1.0).unwrap();
            pairing_variance_bound(&e.couplings(), &nearest_neighbor_pairing(n).unwrap()).unwrap()
        };
        for n in [4, 6, 8, 16, 24] {
            assert!((nn_cost(n) - width_bound_nearest_neighbor(n).unwrap().exact).abs() < 1e-12, "n {n}");
        }
        // two particles sit symmetrically about the field maximum: equal couplings
        assert!(nn_cost(2) < 1e-15);
    }

    /// Oracle: enumerate every partial matching with the width limit.
    fn exhaustive(a: &[f64], max_width: usize) -> f64 {
        fn go(i: usize, used: &mut Vec<bool>, a: &[f64], w: usize) -> f64 {
            if i == a.len() {
                return 0.0;
            }
            if used[i] {
                return go(i + 1, used, a, w);
            }
            let mut best = singleton_min_variance(a[i]) + go(i + 1, used, a, w);
            for k in i + 1..a.len() {
                if used[k] || k - i + 1 > w {
                    continue;
                }
                used[k] = true;
                best = best.min(min_pair_variance(a[i], a[k]).value + go(i + 1, used, a, w));
                used[k] = false;
            }
            best
        }
        go(0, &mut vec![false; a.len()], a, max_width)
    }

    #[test]
    fn dp_matches_exhaustive_search() {
        let mut r = rng(21);
        for _ in 0..30 {
            let n = r.random_range(1..=9);
            let pos: Vec<f64> = (0..n).map(|_| r.random_range(0.0..1.0)).collect();
            let e = SpinEnsemble::new(pos, r.random_range(0.3..2.0)).unwrap();
            for w in 1..=n {
                let res = optimal_pairing(&e, w);
                assert!(res.structure.width() <= w.max(1));
                assert!((res.bound - exhaustive(&e.couplings(), w)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let e = SpinEnsemble::uniform_grid(16, 1.0).unwrap();
        let w1 = optimal_pairing(&e, 1);
        assert!(w1.structure.groups().is_empty());
        let product: f64 = e.couplings().iter().map(|&a| 2.0 * a * a).sum();
        assert!((w1.bound - product).abs() < 1e-12);
        let w2 = optimal_pairing(&e, 2);
        let all = optimal_pairing(&e, 16);
        assert!(all.bound <= w2.bound + 1e-15 && w2.bound <= w1.bound);
        // unpaired end sites beat the strict nearest-neighbour tiling
        let nn = width_bound_nearest_neighbor(16).unwrap().exact;
        assert!((w2.bound - 0.3843).abs() < 1e-4 && w2.bound < nn);
        assert_eq!(w2.structure.singleton_sites(), vec![0, 15]);
        assert_eq!(w2.structure.pairs()[0], (1, 2));
    }

    #[test]
    fn random_width_limited_states_respect_bound() {
        let mut r = rng(33);
        let n = 8;
        for trial in 0..100 {
            let w = 1 + trial % 4;
            let pos: Vec<f64> = (0..n).map(|_| r.random_range(0.0..1.0)).collect();
            let e = SpinEnsemble::new(pos, 1.0).unwrap();
            // random pairing within the width, random block states
            let mut used = [false; 8];
            let mut blocks: Vec<(Vec<usize>, Ket)> = Vec::new();
            for i in 0..n {
                if used[i] {
                    continue;
                }
                used[i] = true;
                let partners: Vec<usize> = (i + 1..n).filter(|&k| !used[k] && k - i < w).collect();
                if !partners.is_empty() && r.random_bool(0.7) {
                    let k = partners[r.random_range(0..partners.len())];
                    used[k] = true;
                    blocks.push((vec![i, k], haar_ket(&[2, 2], &mut r)));
                } else {
                    blocks.push((vec![i], haar_ket(&[2], &mut r)));
                }
            }
            // dense state with sites permuted into place
            let mut order: Vec<usize> = Vec::new();
            let mut psi = Ket::new(vec![], vec![c(1.0, 0.0)]).unwrap();
            for (sites, k) in &blocks {
                order.extend(sites);
                psi = psi.tensor(k);
            }
            let permuted = SpinEnsemble::new(order.iter().map(|&j| e.positions()[j]).collect(), 1.0).unwrap();
            let var = gradient_variance_b(&psi, &permuted).unwrap();
            assert!((var - blocks_variance(&e.couplings(), &blocks).unwrap()).abs() < 1e-10);
            assert!(var >= optimal_pairing(&e, w).bound - 1e-8);
        }
    }

    #[test]
    fn sweep_orderings() {
        let lambdas: Vec<f64> = (1..=60).map(|i| 0.1 * i as f64).collect();
        let rows = figure6_sweep(16, &lambdas, &Configuration::ALL).unwrap();
        assert_eq!(rows.len(), 240);
        let mut separated_below = false;
        for chunk in rows.chunks(4) {
            let v: HashMap<Configuration, f64> = chunk.iter().map(|r| (r.configuration, r.variance)).collect();
            let bound = v[&Configuration::W2Bound];
            assert!(v[&Configuration::Product] >= bound - 1e-12);
            assert!(v[&Configuration::NearestNeighborSinglets] >= bound - 1e-12);
            separated_below |= v[&Configuration::SeparatedSinglets] < bound - 1e-6;
        }
        assert!(separated_below);
        assert!(figure6_sweep(7, &lambdas, &Configuration::ALL).is_err());
    }
}
