//! Sampling of a state trajectory on a time grid, and the path-geometric
//! quantities built from it: quantum Fisher information, Bures arc length and
//! cumulative integrals of derivative and commutator norms.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qubit::{
    bures_angle, matrix_norms, quantumness, trace_distance, BlochVector, ComplexMatrix2, DensityMatrix,
};
use crate::scalar::Real;

/// Default step for `lambda t <= GRID_SWITCH_TIME`.
pub const DEFAULT_FINE_STEP: f64 = 1e-3;
/// Default step beyond `GRID_SWITCH_TIME`.
pub const DEFAULT_COARSE_STEP: f64 = 1e-2;
pub const GRID_SWITCH_TIME: f64 = 10.0;
/// Steps never exceed this fraction of the fastest oscillation period.
pub const RESOLUTION_CAP: f64 = 0.05;

/// Relative agreement demanded between the two arc-length routes.
pub const ARC_LENGTH_AGREEMENT: f64 = 1e-4;
/// Arc lengths below this scale are compared in absolute terms.
const ARC_LENGTH_FLOOR: f64 = 1e-5;
/// Fraction of the agreement tolerance handed out to the refined intervals.
const REFINEMENT_SAFETY: f64 = 0.25;
/// Upper limit on the pieces a single interval is split into.
pub const MAX_SUBDIVISION: usize = 64;

const PURITY_FLOOR: f64 = 1e-14;
const FALLBACK_STEP: f64 = 1e-5;
const TANGENTIAL_MATCH: f64 = 1e-6;

/// A trajectory `t -> rho_t` with an analytic derivative.
pub trait Dynamics<T: Real>: Sync {
    fn initial(&self) -> DensityMatrix<T>;

    fn state(&self, lambda_t: T) -> Result<DensityMatrix<T>>;

    fn state_and_derivative(&self, lambda_t: T) -> Result<(DensityMatrix<T>, ComplexMatrix2<T>)>;

    /// Fastest angular frequency of the motion, used to cap the grid step.
    fn oscillation_rate(&self) -> T {
        T::zero()
    }
}

/// Unitary precession `rho_t = exp(-i w t sz/2) rho0 exp(+i w t sz/2)`.
///
/// A geodesic for equatorial initial states while `w t <= pi`.
#[derive(Clone, Copy, Debug)]
pub struct Precession<T> {
    pub angular_rate: T,
    pub rho0: DensityMatrix<T>,
}

impl<T: Real> Precession<T> {
    fn phase(&self, t: T) -> Complex<T> {
        Complex::from_polar(T::one(), -self.angular_rate * t)
    }
}

impl<T: Real> Dynamics<T> for Precession<T> {
    fn initial(&self) -> DensityMatrix<T> {
        self.rho0
    }

    fn state(&self, lambda_t: T) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.rho0.ee(), self.rho0.eg() * self.phase(lambda_t))
    }

    fn state_and_derivative(&self, lambda_t: T) -> Result<(DensityMatrix<T>, ComplexMatrix2<T>)> {
        let rho = self.state(lambda_t)?;
        let coh = rho.eg() * Complex::new(T::zero(), -self.angular_rate);
        let zero = Complex::from(T::zero());
        Ok((rho, ComplexMatrix2::new(zero, coh, coh.conj(), zero)))
    }

    fn oscillation_rate(&self) -> T {
        self.angular_rate.abs()
    }
}

/// Strictly increasing sample times starting at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid<T> {
    times: Vec<T>,
    fine_step: T,
    coarse_step: T,
}

fn push_segment<T: Real>(times: &mut Vec<T>, start: T, end: T, max_step: T) {
    if end <= start {
        return;
    }
    let n = ((end - start) / max_step).ceil().to_usize().unwrap_or(1).max(1);
    let step = (end - start) / T::from_usize(n).unwrap();
    for k in 1..n {
        times.push(start + step * T::from_usize(k).unwrap());
    }
    times.push(end);
}

impl<T: Real> TimeGrid<T> {
    /// Two-piece uniform grid with steps at most `fine_step` up to
    /// [`GRID_SWITCH_TIME`] and `coarse_step` afterwards.
    pub fn with_steps(lambda_t_final: T, fine_step: T, coarse_step: T) -> Result<Self> {
        if !(lambda_t_final.is_finite() && lambda_t_final >= T::zero()) {
            return Err(Error::InvalidInput(format!("final time {lambda_t_final} must be >= 0")));
        }
        if !(fine_step > T::zero() && coarse_step > T::zero()) {
            return Err(Error::InvalidInput("grid steps must be positive".into()));
        }
        let switch = T::lit(GRID_SWITCH_TIME).min(lambda_t_final);
        let mut times = vec![T::zero()];
        push_segment(&mut times, T::zero(), switch, fine_step);
        push_segment(&mut times, switch, lambda_t_final, coarse_step);
        Ok(Self { times, fine_step, coarse_step })
    }

    /// The default step policy, capped to resolve oscillations at `oscillation_rate`.
    pub fn for_rate(lambda_t_final: T, oscillation_rate: T) -> Result<Self> {
        let cap = if oscillation_rate > T::zero() {
            T::lit(RESOLUTION_CAP) * T::TAU() / oscillation_rate
        } else {
            T::infinity()
        };
        Self::with_steps(
            lambda_t_final,
            T::lit(DEFAULT_FINE_STEP).min(cap),
            T::lit(DEFAULT_COARSE_STEP).min(cap),
        )
    }

    pub fn for_dynamics<D: Dynamics<T> + ?Sized>(dynamics: &D, lambda_t_final: T) -> Result<Self> {
        Self::for_rate(lambda_t_final, dynamics.oscillation_rate())
    }

    pub fn uniform(lambda_t_final: T, intervals: usize) -> Result<Self> {
        if intervals == 0 || !(lambda_t_final > T::zero()) {
            return Err(Error::InvalidInput("uniform grid needs a positive span and interval count".into()));
        }
        let step = lambda_t_final / T::from_usize(intervals).unwrap();
        let mut times = vec![T::zero()];
        push_segment(&mut times, T::zero(), lambda_t_final, step * T::lit(1.0 + 1e-9));
        Ok(Self { times, fine_step: step, coarse_step: step })
    }

    pub fn from_times(times: Vec<T>) -> Result<Self> {
        if times.first() != Some(&T::zero()) {
            return Err(Error::InvalidInput("time grid must start at 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidInput("time grid must be strictly increasing".into()));
        }
        let max_step = times.windows(2).map(|w| w[1] - w[0]).fold(T::zero(), T::max);
        Ok(Self { times, fine_step: max_step, coarse_step: max_step })
    }

    /// Halves every interval.
    pub fn refined(&self) -> Self {
        let mut times = Vec::with_capacity(self.times.len() * 2);
        times.push(self.times[0]);
        for w in self.times.windows(2) {
            times.push((w[0] + w[1]) * T::half());
            times.push(w[1]);
        }
        Self { times, fine_step: self.fine_step * T::half(), coarse_step: self.coarse_step * T::half() }
    }

    /// Splits interval `k` into `factors[k]` equal pieces.
    pub fn subdivided(&self, factors: &[usize]) -> Result<Self> {
        if factors.len() + 1 != self.times.len() || factors.contains(&0) {
            return Err(Error::InvalidInput("one positive factor per interval is required".into()));
        }
        let mut times = Vec::with_capacity(self.times.len() + factors.iter().sum::<usize>());
        times.push(self.times[0]);
        for (w, &m) in self.times.windows(2).zip(factors) {
            let step = (w[1] - w[0]) / T::from_usize(m).unwrap();
            for j in 1..m {
                times.push(w[0] + step * T::from_usize(j).unwrap());
            }
            times.push(w[1]);
        }
        Ok(Self { times, fine_step: self.fine_step, coarse_step: self.coarse_step })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> T {
        *self.times.last().unwrap()
    }

    pub fn fine_step(&self) -> T {
        self.fine_step
    }

    pub fn coarse_step(&self) -> T {
        self.coarse_step
    }
}

/// Everything the bounds need at one instant of the trajectory.
#[derive(Clone, Copy, Debug)]
pub struct PathSample<T> {
    pub lambda_t: T,
    pub rho_t: DensityMatrix<T>,
    pub rho_dot: ComplexMatrix2<T>,
    pub fisher_q: T,
    /// Instantaneous Bures speed `sqrt(F_Q/4)`.
    pub speed: T,
    pub norm_op: T,
    pub norm_hs: T,
    pub norm_tr: T,
    /// `||[rho_0, rho_dot]||_hs`.
    pub comm_norm: T,
    pub quantumness_t: T,
    pub bures_angle_t: T,
    pub trace_dist_from_init: T,
    pub trace_dist_to_stationary: T,
    /// Set when F_Q came from the finite-angle estimator.
    pub fisher_fallback: bool,
}

fn bloch_velocity<T: Real>(rho_dot: &ComplexMatrix2<T>) -> BlochVector<T> {
    let coh = rho_dot.get(0, 1);
    BlochVector { x: T::two() * coh.re, y: -T::two() * coh.im, z: T::two() * rho_dot.get(0, 0).re }
}

/// Quantum Fisher information of a qubit path,
/// `|r'|^2 + (r.r')^2 / (1 - |r|^2)`.
///
/// On (numerically) pure states the radial term is a removable 0/0; there the
/// value is taken from the finite-angle estimator `4 L(rho_a, rho_b)^2 / dt^2`,
/// centered when possible and forward at `t = 0`. If the estimate matches
/// `|r'|^2` the path is locally pure and `|r'|^2` is returned. Returns the
/// value and whether the estimator was used.
fn fisher_information<T: Real, D: Dynamics<T> + ?Sized>(
    dynamics: &D,
    t: T,
    rho: &DensityMatrix<T>,
    rho_dot: &ComplexMatrix2<T>,
) -> Result<(T, bool)> {
    let r = rho.bloch();
    let v = bloch_velocity(rho_dot);
    let defect = T::lit(4.0) * rho.det();
    let radial = r.dot(&v);
    if defect >= T::lit(PURITY_FLOOR) {
        return Ok((v.norm_sqr() + radial * radial / defect, false));
    }
    let h = T::lit(FALLBACK_STEP);
    let (before, span) = if t >= h {
        (dynamics.state(t - h)?, h + h)
    } else {
        (*rho, h)
    };
    let angle = bures_angle(&before, &dynamics.state(t + h)?)?;
    let estimate = T::lit(4.0) * angle * angle / (span * span);
    let tangential = v.norm_sqr();
    if (estimate - tangential).abs() <= T::tol(TANGENTIAL_MATCH) * estimate.max(tangential) {
        // the path stays pure here and the radial term vanishes
        return Ok((tangential, false));
    }
    Ok((estimate, true))
}

pub fn sample_at<T: Real, D: Dynamics<T> + ?Sized>(dynamics: &D, lambda_t: T) -> Result<PathSample<T>> {
    let rho0 = dynamics.initial();
    let (rho_t, rho_dot) = dynamics.state_and_derivative(lambda_t)?;
    let (fisher_q, fisher_fallback) = fisher_information(dynamics, lambda_t, &rho_t, &rho_dot)?;
    let norms = matrix_norms(&rho_dot)?;
    let comm = rho0.to_matrix().commutator(&rho_dot);
    let sample = PathSample {
        lambda_t,
        rho_t,
        rho_dot,
        fisher_q,
        speed: (fisher_q / T::lit(4.0)).sqrt(),
        norm_op: norms.op,
        norm_hs: norms.hs,
        norm_tr: norms.tr,
        comm_norm: comm.hs_norm_sq().sqrt(),
        quantumness_t: quantumness(&rho0, &rho_t),
        bures_angle_t: bures_angle(&rho0, &rho_t)?,
        trace_dist_from_init: trace_distance(&rho0, &rho_t),
        trace_dist_to_stationary: trace_distance(&rho_t, &DensityMatrix::z_minus()),
        fisher_fallback,
    };
    let finite = [
        sample.fisher_q,
        sample.norm_op,
        sample.comm_norm,
        sample.quantumness_t,
        sample.bures_angle_t,
    ]
    .iter()
    .all(|x| x.is_finite());
    if !finite || !(sample.fisher_q >= T::zero()) || !rho_dot.is_hermitian(T::tol(1e-12)) {
        return Err(Error::InternalConsistency(format!(
            "inconsistent path sample at lambda_t = {lambda_t}"
        )));
    }
    Ok(sample)
}

/// Samples the trajectory at every grid time.
pub fn sample_path<T: Real, D: Dynamics<T> + ?Sized>(dynamics: &D, grid: &TimeGrid<T>) -> Result<Vec<PathSample<T>>> {
    grid.times().iter().map(|&t| sample_at(dynamics, t)).collect()
}

/// Cumulative composite-trapezoid integral.
pub fn cumulative_trapezoid<T: Real>(times: &[T], values: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = T::zero();
    out.push(acc);
    for k in 1..times.len() {
        acc = acc + (times[k] - times[k - 1]) * (values[k] + values[k - 1]) * T::half();
        out.push(acc);
    }
    out
}

/// Cumulative Bures arc length along the sampled path.
#[derive(Clone, Debug)]
pub struct ArcLength<T> {
    /// Sum of Bures angles between consecutive samples (primary route).
    pub angle_sum: Vec<T>,
    /// Trapezoid rule over the Fisher speed (cross-check).
    pub trapezoid: Vec<T>,
}

impl<T: Real> ArcLength<T> {
    pub fn total(&self) -> T {
        *self.angle_sum.last().unwrap()
    }

    /// Relative disagreement of the two routes at the final time.
    pub fn disagreement(&self) -> T {
        let a = self.total();
        let b = *self.trapezoid.last().unwrap();
        (a - b).abs() / a.abs().max(b.abs()).max(T::lit(ARC_LENGTH_FLOOR))
    }
}

fn require_two<T>(samples: &[PathSample<T>]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput("at least two path samples are required".into()));
    }
    Ok(())
}

pub fn arc_length<T: Real>(samples: &[PathSample<T>]) -> Result<ArcLength<T>> {
    require_two(samples)?;
    let mut angle_sum = Vec::with_capacity(samples.len());
    let mut acc = T::zero();
    angle_sum.push(acc);
    for w in samples.windows(2) {
        acc = acc + bures_angle(&w[0].rho_t, &w[1].rho_t)?;
        angle_sum.push(acc);
    }
    let times: Vec<T> = samples.iter().map(|s| s.lambda_t).collect();
    let speeds: Vec<T> = samples.iter().map(|s| s.speed).collect();
    Ok(ArcLength { angle_sum, trapezoid: cumulative_trapezoid(&times, &speeds) })
}

/// Per-interval subdivision counts for one refinement pass.
///
/// Interval `k` receives a share of the tolerance proportional to its width;
/// assuming second-order convergence of the local discrepancy `e_k` between
/// the two routes, it is split into `ceil(sqrt(e_k / share_k))` pieces, at
/// least two and at most [`MAX_SUBDIVISION`].
pub fn refinement_factors<T: Real>(path: &PathAnalysis<T>) -> Vec<usize> {
    let arc = &path.arc;
    let scale = arc.total().abs().max(arc.trapezoid.last().unwrap().abs()).max(T::lit(ARC_LENGTH_FLOOR));
    let budget = T::lit(REFINEMENT_SAFETY * ARC_LENGTH_AGREEMENT) * scale / path.final_time();
    (1..path.samples.len())
        .map(|k| {
            let local = ((arc.angle_sum[k] - arc.angle_sum[k - 1]) - (arc.trapezoid[k] - arc.trapezoid[k - 1])).abs();
            let share = budget * (path.samples[k].lambda_t - path.samples[k - 1].lambda_t);
            (local / share).sqrt().ceil().to_usize().unwrap_or(MAX_SUBDIVISION).clamp(2, MAX_SUBDIVISION)
        })
        .collect()
}

/// Cumulative integrals of the derivative norms and of the commutator norm.
#[derive(Clone, Debug)]
pub struct NormIntegrals<T> {
    pub op: Vec<T>,
    pub hs: Vec<T>,
    pub tr: Vec<T>,
    pub comm: Vec<T>,
}

pub fn cumulative_norm_integrals<T: Real>(samples: &[PathSample<T>]) -> Result<NormIntegrals<T>> {
    require_two(samples)?;
    let times: Vec<T> = samples.iter().map(|s| s.lambda_t).collect();
    let integrate = |f: fn(&PathSample<T>) -> T| {
        let values: Vec<T> = samples.iter().map(f).collect();
        cumulative_trapezoid(&times, &values)
    };
    Ok(NormIntegrals {
        op: integrate(|s| s.norm_op),
        hs: integrate(|s| s.norm_hs),
        tr: integrate(|s| s.norm_tr),
        comm: integrate(|s| s.comm_norm),
    })
}

/// A sampled trajectory with its cumulative arc length and norm integrals.
#[derive(Clone, Debug)]
pub struct PathAnalysis<T> {
    pub rho0: DensityMatrix<T>,
    pub samples: Vec<PathSample<T>>,
    pub arc: ArcLength<T>,
    pub integrals: NormIntegrals<T>,
    /// Number of grid halvings needed for the arc-length routes to agree.
    pub refinements: u32,
}

impl<T: Real> PathAnalysis<T> {
    /// Samples `dynamics` on `grid` and checks that the two arc-length
    /// routes agree to [`ARC_LENGTH_AGREEMENT`].
    ///
    /// On disagreement the grid is refined once: each interval is split in
    /// proportion to its local disagreement (see [`refinement_factors`]) and
    /// the path is resampled. A second failure is a grid-resolution error.
    pub fn compute<D: Dynamics<T> + ?Sized>(dynamics: &D, grid: &TimeGrid<T>) -> Result<Self> {
        let first = Self::compute_unchecked(dynamics, grid)?;
        let tol = T::lit(ARC_LENGTH_AGREEMENT);
        if first.arc.disagreement() <= tol {
            return Ok(first);
        }
        let factors = refinement_factors(&first);
        let mut second = Self::compute_unchecked(dynamics, &grid.subdivided(&factors)?)?;
        second.refinements = 1;
        if second.arc.disagreement() <= tol {
            Ok(second)
        } else {
            Err(Error::GridResolution(format!(
                "arc-length routes disagree by {:e} after refinement",
                second.arc.disagreement()
            )))
        }
    }

    /// Samples without the arc-length cross-check.
    pub fn compute_unchecked<D: Dynamics<T> + ?Sized>(dynamics: &D, grid: &TimeGrid<T>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::InvalidInput("time grid needs at least two points".into()));
        }
        let samples = sample_path(dynamics, grid)?;
        let arc = arc_length(&samples)?;
        let integrals = cumulative_norm_integrals(&samples)?;
        Ok(Self { rho0: dynamics.initial(), samples, arc, integrals, refinements: 0 })
    }

    /// Convenience: default grid for `dynamics` up to `lambda_t_final`.
    pub fn with_default_grid<D: Dynamics<T> + ?Sized>(dynamics: &D, lambda_t_final: T) -> Result<Self> {
        Self::compute(dynamics, &TimeGrid::for_dynamics(dynamics, lambda_t_final)?)
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        self.samples.iter().map(|s| s.lambda_t)
    }

    pub fn final_time(&self) -> T {
        self.samples.last().unwrap().lambda_t
    }

    /// Index of the grid point at `lambda_t` (relative tolerance 1e-9).
    pub fn index_of(&self, lambda_t: T) -> Result<usize> {
        let k = self.samples.partition_point(|s| s.lambda_t < lambda_t);
        let tol = T::lit(1e-9) * lambda_t.abs().max(T::one());
        [k.checked_sub(1), Some(k)]
            .into_iter()
            .flatten()
            .filter(|&i| i < self.samples.len())
            .find(|&i| (self.samples[i].lambda_t - lambda_t).abs() <= tol)
            .ok_or_else(|| Error::InvalidInput(format!("lambda_t = {lambda_t} is not a grid point")))
    }
}
