//! Distinguishability rates and non-Markovianity measures.
//!
//! Both measures integrate the positive part of a trace-distance rate. The
//! integral is taken as the sum of positive increments of the sampled
//! distance, which is exact for piecewise-monotone data and never
//! differentiates across zeros of `G`.
//!
//! The path measure compares the evolving state with its own initial state, so
//! it is non-zero even for monotone relaxation: there it equals the net
//! distance travelled away from `rho_0`.

use crate::djc::{evolve, propagator, ModelParams};
use crate::error::{Error, Result};
use crate::path::TimeGrid;
use crate::qubit::{trace_distance, BlochVector, DensityMatrix};
use crate::scalar::Real;

/// Tolerance on the identity `D(Lambda[x+], Lambda[x-]) = |G|`.
pub const PAIR_IDENTITY_TOL: f64 = 1e-10;

/// Label of the fixed optimal pair used by [`blp_measure`].
pub const BLP_PAIR: &str = "x+/x-";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonMarkovReport<T> {
    pub lambda_t_final: T,
    pub blp_n: T,
    pub blp_pair_used: &'static str,
    pub path_n_tilde: T,
    pub sigma_sign_changes: usize,
}

fn default_grid<T: Real>(p: &ModelParams<T>, lambda_t_final: T) -> Result<TimeGrid<T>> {
    if !(lambda_t_final > T::zero()) {
        return Err(Error::InvalidInput(format!("final time must be positive, got {lambda_t_final}")));
    }
    TimeGrid::for_rate(lambda_t_final, p.omega().im.abs())
}

/// Sum of the positive increments of `values`.
pub fn positive_variation<T: Real>(values: &[T]) -> T {
    values
        .windows(2)
        .map(|w| (w[1] - w[0]).max(T::zero()))
        .fold(T::zero(), |a, b| a + b)
}

/// `D(Lambda_t[rho_a], Lambda_t[rho_b])` at every grid time.
pub fn pair_distance_series<T: Real>(
    p: &ModelParams<T>,
    rho_a: &DensityMatrix<T>,
    rho_b: &DensityMatrix<T>,
    grid: &TimeGrid<T>,
) -> Result<Vec<T>> {
    grid.times()
        .iter()
        .map(|&t| Ok(trace_distance(&evolve(p, rho_a, t)?, &evolve(p, rho_b, t)?)))
        .collect()
}

/// `D(rho_0, Lambda_t[rho_0])` at every grid time.
pub fn path_distance_series<T: Real>(p: &ModelParams<T>, rho0: &DensityMatrix<T>, grid: &TimeGrid<T>) -> Result<Vec<T>> {
    grid.times()
        .iter()
        .map(|&t| Ok(trace_distance(rho0, &evolve(p, rho0, t)?)))
        .collect()
}

/// Positive-part integral of the distinguishability rate for one pair.
pub fn pair_measure<T: Real>(
    p: &ModelParams<T>,
    rho_a: &DensityMatrix<T>,
    rho_b: &DensityMatrix<T>,
    grid: &TimeGrid<T>,
) -> Result<T> {
    Ok(positive_variation(&pair_distance_series(p, rho_a, rho_b, grid)?))
}

/// Channel measure on the fixed pair `|x;+>, |x;->` over the default grid.
pub fn blp_measure<T: Real>(p: &ModelParams<T>, lambda_t_final: T) -> Result<T> {
    blp_measure_on(p, &default_grid(p, lambda_t_final)?)
}

/// As [`blp_measure`] on an explicit grid; asserts `D = |G|` on the pair.
pub fn blp_measure_on<T: Real>(p: &ModelParams<T>, grid: &TimeGrid<T>) -> Result<T> {
    let distances = pair_distance_series(p, &DensityMatrix::x_plus(), &DensityMatrix::x_minus(), grid)?;
    for (&t, &d) in grid.times().iter().zip(&distances) {
        let g = propagator(p, t)?.g.norm();
        if (d - g).abs() > T::tol(PAIR_IDENTITY_TOL) {
            return Err(Error::InternalConsistency(format!(
                "pair distance {d} differs from |G| = {g} at lambda_t = {t}"
            )));
        }
    }
    Ok(positive_variation(&distances))
}

/// Unit vectors on a Fibonacci sphere; `n = 1` gives the `x` axis.
pub fn fibonacci_sphere<T: Real>(n: usize) -> Vec<BlochVector<T>> {
    let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
    let nf = T::from_usize(n).unwrap();
    (0..n)
        .map(|k| {
            let kf = T::from_usize(k).unwrap();
            let z = T::one() - (T::two() * kf + T::one()) / nf;
            let rho = (T::one() - z * z).max(T::zero()).sqrt();
            let phi = golden * kf;
            BlochVector { x: rho * phi.cos(), y: rho * phi.sin(), z }
        })
        .collect()
}

/// Brute-force maximum of the pair measure over antipodal pure pairs.
pub fn blp_pair_oracle<T: Real>(p: &ModelParams<T>, lambda_t_final: T, n_pairs: usize) -> Result<T> {
    if n_pairs == 0 {
        return Err(Error::InvalidInput("n_pairs must be at least 1".into()));
    }
    let grid = default_grid(p, lambda_t_final)?;
    let mut best = T::zero();
    for n in fibonacci_sphere::<T>(n_pairs) {
        let a = DensityMatrix::from_bloch(&n);
        let b = DensityMatrix::from_bloch(&BlochVector { x: -n.x, y: -n.y, z: -n.z });
        best = best.max(pair_measure(p, &a, &b, &grid)?);
    }
    Ok(best)
}

/// Path measure: positive-part integral of `d/dt D(rho_0, rho_t)`.
pub fn path_measure<T: Real>(p: &ModelParams<T>, rho0: &DensityMatrix<T>, lambda_t_final: T) -> Result<T> {
    path_measure_on(p, rho0, &default_grid(p, lambda_t_final)?)
}

pub fn path_measure_on<T: Real>(p: &ModelParams<T>, rho0: &DensityMatrix<T>, grid: &TimeGrid<T>) -> Result<T> {
    Ok(positive_variation(&path_distance_series(p, rho0, grid)?))
}

/// Centered finite differences of sampled values (one-sided at the ends).
pub fn finite_difference_rate<T: Real>(times: &[T], values: &[T]) -> Vec<(T, T)> {
    let n = times.len();
    (0..n)
        .map(|k| {
            let (lo, hi) = (k.saturating_sub(1), (k + 1).min(n - 1));
            let rate = if hi > lo {
                (values[hi] - values[lo]) / (times[hi] - times[lo])
            } else {
                T::zero()
            };
            (times[k], rate)
        })
        .collect()
}

/// `sigma(t) = d/dt D(Lambda_t[rho_a], Lambda_t[rho_b])` on the grid.
pub fn sigma_series<T: Real>(
    p: &ModelParams<T>,
    rho_a: &DensityMatrix<T>,
    rho_b: &DensityMatrix<T>,
    grid: &TimeGrid<T>,
) -> Result<Vec<(T, T)>> {
    let d = pair_distance_series(p, rho_a, rho_b, grid)?;
    Ok(finite_difference_rate(grid.times(), &d))
}

/// `sigma~(t) = d/dt D(rho_0, Lambda_t[rho_0])` on the grid.
pub fn sigma_tilde_series<T: Real>(p: &ModelParams<T>, rho0: &DensityMatrix<T>, grid: &TimeGrid<T>) -> Result<Vec<(T, T)>> {
    let d = path_distance_series(p, rho0, grid)?;
    Ok(finite_difference_rate(grid.times(), &d))
}

/// Number of sign changes, ignoring entries with `|sigma| <= tol`.
pub fn count_sign_changes<T: Real>(series: &[(T, T)], tol: T) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for &(_, s) in series {
        if s.abs() <= tol {
            continue;
        }
        let positive = s > T::zero();
        if last.is_some_and(|prev| prev != positive) {
            changes += 1;
        }
        last = Some(positive);
    }
    changes
}

pub fn non_markov_report<T: Real>(
    p: &ModelParams<T>,
    rho0: &DensityMatrix<T>,
    lambda_t_final: T,
) -> Result<NonMarkovReport<T>> {
    let grid = default_grid(p, lambda_t_final)?;
    let blp_n = blp_measure_on(p, &grid)?;
    let path_n_tilde = path_measure_on(p, rho0, &grid)?;
    let sigma = sigma_series(p, &DensityMatrix::x_plus(), &DensityMatrix::x_minus(), &grid)?;
    let report = NonMarkovReport {
        lambda_t_final,
        blp_n,
        blp_pair_used: BLP_PAIR,
        path_n_tilde,
        sigma_sign_changes: count_sign_changes(&sigma, T::tol(1e-12)),
    };
    if !(blp_n.is_finite() && blp_n >= T::zero() && path_n_tilde.is_finite() && path_n_tilde >= T::zero()) {
        return Err(Error::InternalConsistency("non-Markovianity measures must be finite and >= 0".into()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = ModelParams<f64>;
    type Dm = DensityMatrix<f64>;

    #[test]
    fn markovian_channel_has_zero_measure() {
        let p = P::new(0.1, 0.1).unwrap();
        assert!(blp_measure(&p, 200.0).unwrap() <= 1e-12);
        assert!(blp_pair_oracle(&p, 50.0, 20).unwrap() <= 1e-12);
    }

    #[test]
    fn resonant_strong_coupling_is_non_markovian() {
        assert!(blp_measure(&P::new(2.0, 0.0).unwrap(), 50.0).unwrap() > 1e-3);
    }

    #[test]
    fn pair_distance_equals_abs_g() {
        let p = P::new(7.0, -0.6).unwrap();
        let grid = TimeGrid::for_rate(10.0, p.omega().im.abs()).unwrap();
        let d = pair_distance_series(&p, &Dm::x_plus(), &Dm::x_minus(), &grid).unwrap();
        for (&t, &dist) in grid.times().iter().zip(&d) {
            assert!((dist - propagator(&p, t).unwrap().g.norm()).abs() <= 1e-10);
        }
    }

    #[test]
    fn single_pair_oracle_is_the_fixed_pair() {
        let p = P::new(10.0, 0.1).unwrap();
        let fixed = blp_measure(&p, 30.0).unwrap();
        assert_eq!(blp_pair_oracle(&p, 30.0, 1).unwrap(), fixed);
        let axis = fibonacci_sphere::<f64>(1)[0];
        assert_eq!((axis.x, axis.y, axis.z), (1.0, 0.0, 0.0));
    }

    #[test]
    fn frozen_state_has_zero_path_measure() {
        let p = P::new(0.0, 0.5).unwrap();
        assert_eq!(path_measure(&p, &Dm::x_plus(), 10.0).unwrap(), 0.0);
    }

    #[test]
    fn identical_states_have_zero_sigma() {
        let p = P::new(50.0, 0.1).unwrap();
        let grid = TimeGrid::for_rate(5.0, p.omega().im.abs()).unwrap();
        let s = sigma_series(&p, &Dm::y_plus(), &Dm::y_plus(), &grid).unwrap();
        assert!(s.iter().all(|&(_, v)| v == 0.0));
        assert_eq!(count_sign_changes(&s, 1e-12), 0);
    }

    #[test]
    fn markovian_pair_never_gains_distinguishability() {
        let p = P::new(0.1, 0.1).unwrap();
        let grid = TimeGrid::for_rate(100.0, p.omega().im.abs()).unwrap();
        let s = sigma_series(&p, &Dm::x_plus(), &Dm::x_minus(), &grid).unwrap();
        assert!(s.iter().all(|&(_, v)| v <= 1e-10));
    }

    #[test]
    fn sign_change_counting() {
        let s = [(0.0, 1.0), (1.0, 0.0), (2.0, -1.0), (3.0, 1e-15), (4.0, 2.0), (5.0, 3.0)];
        assert_eq!(count_sign_changes(&s, 1e-12), 2);
    }

    #[test]
    fn report_fields() {
        let p = P::new(20.0, 0.1).unwrap();
        let r = non_markov_report(&p, &Dm::x_plus(), 10.0).unwrap();
        assert_eq!(r.blp_pair_used, BLP_PAIR);
        assert!(r.blp_n > 0.0 && r.path_n_tilde > 0.0);
        assert!(r.sigma_sign_changes > 0);
    }

    #[test]
    fn invalid_final_time() {
        assert!(blp_measure(&P::new(1.0, 0.0).unwrap(), 0.0).is_err());
        assert!(blp_pair_oracle(&P::new(1.0, 0.0).unwrap(), 1.0, 0).is_err());
    }
}
