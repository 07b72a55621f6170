//! Quantum speed limit times and their velocities, evaluated at a grid time
//! of a sampled trajectory.
//!
//! Times are in units of `1/lambda`, velocities in units of `lambda`. Every
//! bound is read off the cumulative arrays of one [`PathAnalysis`], so a whole
//! series over final times costs a single sampling pass.

use crate::djc::{DjcPath, ModelParams};
use crate::error::{Error, Result};
use crate::path::PathAnalysis;
use crate::qubit::DensityMatrix;
use crate::scalar::Real;

/// Distances below this are treated as zero and give a zero bound.
pub const ZERO_DISTANCE: f64 = 1e-12;
/// Slack allowed for quadrature error when checking `tau <= t`.
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundsReport<T> {
    pub lambda_t_final: T,
    pub bures_angle_l: T,
    pub sin2_l: T,
    /// `sqrt(Q(rho_0, rho_t)/2)`.
    pub quantumness_target: T,
    pub tau_min: T,
    pub tau_av: T,
    pub tau_op: T,
    pub tau_hs: T,
    pub tau_tr: T,
    pub tau_quant: T,
    pub v_min: T,
    pub v_av: T,
    pub v_op: T,
    pub v_hs: T,
    pub v_tr: T,
    pub v_quant: T,
}

/// The three operator-norm bounds and their velocities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormBounds<T> {
    pub tau_op: T,
    pub tau_hs: T,
    pub tau_tr: T,
    pub v_op: T,
    pub v_hs: T,
    pub v_tr: T,
}

fn is_zero<T: Real>(x: T) -> bool {
    x <= T::lit(ZERO_DISTANCE)
}

/// `numerator / (integral / t)`, with `0` when the numerator vanishes.
fn ratio_bound<T: Real>(numerator: T, integral: T, t: T) -> Option<(T, T)> {
    let velocity = if t > T::zero() { integral / t } else { T::zero() };
    if is_zero(numerator) {
        return Some((T::zero(), velocity));
    }
    if velocity > T::zero() {
        Some((numerator / velocity, velocity))
    } else {
        None
    }
}

fn velocity_of<T: Real>(distance: T, tau: T) -> T {
    if tau > T::zero() {
        distance / tau
    } else {
        T::zero()
    }
}

/// Smallest `tau` at which the arc length reaches the Bures angle
/// `L(rho_0, rho_t)`; linear interpolation inside the bracketing step.
pub fn tau_min<T: Real>(path: &PathAnalysis<T>, lambda_t_final: T) -> Result<T> {
    tau_min_at(path, path.index_of(lambda_t_final)?)
}

pub fn tau_min_at<T: Real>(path: &PathAnalysis<T>, k: usize) -> Result<T> {
    let target = path.samples[k].bures_angle_t;
    if is_zero(target) {
        return Ok(T::zero());
    }
    let arc = &path.arc.angle_sum[..=k];
    if arc[k] < target - T::tol(1e-9) {
        return Err(Error::InternalConsistency(format!(
            "arc length {} is shorter than the geodesic {}",
            arc[k], target
        )));
    }
    let j = arc.partition_point(|&s| s < target);
    if j > k {
        return Ok(path.samples[k].lambda_t);
    }
    if j == 0 {
        return Ok(T::zero());
    }
    let (s0, s1) = (arc[j - 1], arc[j]);
    let (t0, t1) = (path.samples[j - 1].lambda_t, path.samples[j].lambda_t);
    let frac = if s1 > s0 { (target - s0) / (s1 - s0) } else { T::one() };
    Ok(t0 + frac * (t1 - t0))
}

/// `(tau_av, V_av)` with `V_av = s(t)/t`.
pub fn tau_av<T: Real>(path: &PathAnalysis<T>, lambda_t_final: T) -> Result<(T, T)> {
    tau_av_at(path, path.index_of(lambda_t_final)?)
}

pub fn tau_av_at<T: Real>(path: &PathAnalysis<T>, k: usize) -> Result<(T, T)> {
    let s = &path.samples[k];
    ratio_bound(s.bures_angle_t, path.arc.angle_sum[k], s.lambda_t).ok_or_else(|| {
        Error::DegeneratePath(format!(
            "average speed vanishes at lambda_t = {} while L = {}",
            s.lambda_t, s.bures_angle_t
        ))
    })
}

/// The operator, Hilbert-Schmidt and trace-norm bounds `sin^2 L / V`.
///
/// Only defined for pure initial states.
pub fn tau_norm_bounds<T: Real>(path: &PathAnalysis<T>, lambda_t_final: T) -> Result<NormBounds<T>> {
    tau_norm_bounds_at(path, path.index_of(lambda_t_final)?)
}

pub fn tau_norm_bounds_at<T: Real>(path: &PathAnalysis<T>, k: usize) -> Result<NormBounds<T>> {
    if !path.rho0.is_pure() {
        return Err(Error::Unsupported(
            "the operator-norm bounds are only defined for a pure initial state".into(),
        ));
    }
    let s = &path.samples[k];
    let sin = s.bures_angle_t.sin();
    let sin2 = sin * sin;
    let bound = |integral: &[T]| {
        ratio_bound(sin2, integral[k], s.lambda_t).ok_or_else(|| {
            Error::InternalConsistency(format!("norm velocity vanishes at lambda_t = {}", s.lambda_t))
        })
    };
    let (tau_op, v_op) = bound(&path.integrals.op)?;
    let (tau_hs, v_hs) = bound(&path.integrals.hs)?;
    let (tau_tr, v_tr) = bound(&path.integrals.tr)?;
    Ok(NormBounds { tau_op, tau_hs, tau_tr, v_op, v_hs, v_tr })
}

/// `(tau_quant, V_quant)` from the quantumness inequality.
pub fn tau_quant<T: Real>(path: &PathAnalysis<T>, lambda_t_final: T) -> Result<(T, T)> {
    tau_quant_at(path, path.index_of(lambda_t_final)?)
}

pub fn tau_quant_at<T: Real>(path: &PathAnalysis<T>, k: usize) -> Result<(T, T)> {
    let s = &path.samples[k];
    let target = (s.quantumness_t / T::two()).max(T::zero()).sqrt();
    ratio_bound(target, path.integrals.comm[k], s.lambda_t).ok_or_else(|| {
        Error::InternalConsistency(format!(
            "commutator velocity vanishes at lambda_t = {} while Q > 0",
            s.lambda_t
        ))
    })
}

impl<T: Real> BoundsReport<T> {
    /// All bounds at grid index `k`; requires a pure initial state.
    pub fn at_index(path: &PathAnalysis<T>, k: usize) -> Result<Self> {
        let s = &path.samples[k];
        let tau_min = tau_min_at(path, k)?;
        let (tau_av, v_av) = tau_av_at(path, k)?;
        let norm = tau_norm_bounds_at(path, k)?;
        let (tau_quant, v_quant) = tau_quant_at(path, k)?;
        let sin = s.bures_angle_t.sin();
        let report = Self {
            lambda_t_final: s.lambda_t,
            bures_angle_l: s.bures_angle_t,
            sin2_l: sin * sin,
            quantumness_target: (s.quantumness_t / T::two()).max(T::zero()).sqrt(),
            tau_min,
            tau_av,
            tau_op: norm.tau_op,
            tau_hs: norm.tau_hs,
            tau_tr: norm.tau_tr,
            tau_quant,
            v_min: velocity_of(s.bures_angle_t, tau_min),
            v_av,
            v_op: norm.v_op,
            v_hs: norm.v_hs,
            v_tr: norm.v_tr,
            v_quant,
        };
        report.validate()?;
        Ok(report)
    }

    pub fn from_path(path: &PathAnalysis<T>, lambda_t_final: T) -> Result<Self> {
        Self::at_index(path, path.index_of(lambda_t_final)?)
    }

    pub fn taus(&self) -> [T; 6] {
        [self.tau_min, self.tau_av, self.tau_op, self.tau_hs, self.tau_tr, self.tau_quant]
    }

    pub fn velocities(&self) -> [T; 6] {
        [self.v_min, self.v_av, self.v_op, self.v_hs, self.v_tr, self.v_quant]
    }

    /// Checks the report invariants: finiteness, `tau <= t`, the norm-bound
    /// ordering and non-negative velocities.
    pub fn validate(&self) -> Result<()> {
        let t = self.lambda_t_final;
        let slack = T::lit(QUADRATURE_TOL);
        let fail = |what: &str| {
            Err(Error::InternalConsistency(format!("bounds report at lambda_t = {t}: {what}")))
        };
        if self.taus().iter().chain(self.velocities().iter()).any(|x| !x.is_finite()) {
            return fail("non-finite value");
        }
        if self.taus().iter().any(|&tau| tau < T::zero() || tau > t + slack) {
            return fail("a bound exceeds the elapsed time");
        }
        let rounding = T::tol(1e-12) * (T::one() + self.tau_op);
        if self.tau_op + rounding < self.tau_hs || self.tau_hs + rounding < self.tau_tr {
            return fail("norm bounds out of order");
        }
        if self.velocities().iter().any(|&v| v < T::zero()) {
            return fail("negative velocity");
        }
        Ok(())
    }
}

/// Samples the DJC trajectory from `rho0` and reports every bound at
/// `lambda_t_final`.
pub fn bounds_report<T: Real>(
    params: &ModelParams<T>,
    rho0: &DensityMatrix<T>,
    lambda_t_final: T,
) -> Result<BoundsReport<T>> {
    if !rho0.is_pure() {
        return Err(Error::Unsupported(
            "the operator-norm bounds are only defined for a pure initial state".into(),
        ));
    }
    if lambda_t_final == T::zero() {
        return Ok(BoundsReport::default());
    }
    let path = PathAnalysis::with_default_grid(&DjcPath::new(*params, *rho0), lambda_t_final)?;
    BoundsReport::from_path(&path, lambda_t_final)
}

/// Reports at every `stride`-th grid point (and the last), skipping `t = 0`.
pub fn bounds_series<T: Real>(path: &PathAnalysis<T>, stride: usize) -> Result<Vec<BoundsReport<T>>> {
    let n = path.samples.len();
    let stride = stride.max(1);
    let mut indices: Vec<usize> = (stride..n).step_by(stride).collect();
    if indices.last() != Some(&(n - 1)) && n > 1 {
        indices.push(n - 1);
    }
    indices.into_iter().map(|k| BoundsReport::at_index(path, k)).collect()
}
