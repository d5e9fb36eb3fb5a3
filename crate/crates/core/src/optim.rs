//! Gradient-free minimization: Nelder-Mead from argmin, with seeded
//! independent restarts evaluated in parallel.

use argmin::core::{CostFunction, Error, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;

use crate::random::{rng, StateRng};

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
}

struct Objective<'a, F> {
    f: &'a F,
}

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, Error> {
        let v = (self.f)(p);
        Ok(if v.is_finite() { v } else { f64::MAX })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex.
    pub step: f64,
    pub max_iters: u64,
    /// Stop when the standard deviation of simplex costs drops below this.
    pub sd_tolerance: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            step: 0.3,
            max_iters: 4000,
            sd_tolerance: 1e-13,
        }
    }
}

pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], opts: NelderMeadOptions) -> Minimum {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += opts.step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(opts.sd_tolerance)
        .expect("non-negative tolerance");
    let result = Executor::new(Objective { f }, solver)
        .configure(|s| s.max_iters(opts.max_iters))
        .run();
    match result {
        Ok(res) => {
            let state = res.state();
            let x = state.get_best_param().cloned().unwrap_or_else(|| x0.to_vec());
            let fx = f(&x);
            Minimum { x, f: fx }
        }
        Err(_) => Minimum {
            x: x0.to_vec(),
            f: f(x0),
        },
    }
}

/// Runs `restarts` local searches from points drawn by `sample`, restart `i`
/// using the generator seeded with `seed + i`. Ties go to the lowest index,
/// so the result does not depend on thread scheduling.
pub fn multistart<F, S>(f: &F, sample: S, restarts: usize, seed: u64, opts: NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(&mut StateRng) -> Vec<f64> + Sync,
{
    let results: Vec<Minimum> = (0..restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut r = rng(seed.wrapping_add(i as u64));
            let x0 = sample(&mut r);
            nelder_mead(f, &x0, opts)
        })
        .collect();
    results
        .into_iter()
        .reduce(|best, m| if m.f < best.f { m } else { best })
        .expect("at least one restart")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn finds_rosenbrock_minimum() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(&f, &[-1.2, 1.0], NelderMeadOptions::default());
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn multistart_is_deterministic_and_escapes_local_minima() {
        // double well with the deeper minimum at x = -1
        let f = |x: &[f64]| (x[0] * x[0] - 1.0).powi(2) + 0.2 * x[0];
        let sample = |r: &mut StateRng| vec![r.random_range(-2.0..2.0)];
        let a = multistart(&f, sample, 8, 1, NelderMeadOptions::default());
        let b = multistart(&f, sample, 8, 1, NelderMeadOptions::default());
        assert_eq!(a, b);
        assert!(a.x[0] < 0.0);
    }
}
