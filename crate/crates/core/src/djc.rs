//! Exact reduced dynamics of a qubit coupled to a zero-temperature bosonic
//! reservoir with a Lorentzian spectral density (damped Jaynes-Cummings).
//!
//! Everything is expressed in units of the spectral width: the model depends
//! only on `gamma0/lambda` and `delta/lambda`, and every time argument is the
//! dimensionless `lambda * t`. `hbar = 1`.
//!
//! With `alpha = 1 - i delta/lambda` and `Omega/lambda = sqrt(alpha^2 - 2 gamma0/lambda)`
//! the amplitude propagator is
//!
//! ```text
//! G = exp(-alpha t/2) [ (alpha/Omega) sinh(Omega t/2) + cosh(Omega t/2) ]
//! dG/dt = -gamma0 exp(-alpha t/2) sinh(Omega t/2) / Omega
//! ```
//!
//! Both are evaluated from `exp((-alpha +- Omega) t/2)`, whose real parts are
//! never positive for the principal root, so large times cannot overflow.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::path::Dynamics;
use crate::qubit::{ComplexMatrix2, DensityMatrix};
use crate::scalar::Real;

/// `|G|` at or below this floor marks the decay rate as singular.
pub const RATE_SINGULARITY_FLOOR: f64 = 1e-8;

/// Below this `|Omega t/2|` the ratio `sinh(x)/x` is taken from its series.
const SERIES_THRESHOLD: f64 = 1e-3;

/// Dimensionless model parameters `(gamma0/lambda, delta/lambda)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub gamma0_over_lambda: T,
    pub delta_over_lambda: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(gamma0_over_lambda: T, delta_over_lambda: T) -> Result<Self> {
        if !gamma0_over_lambda.is_finite() || !delta_over_lambda.is_finite() {
            return Err(Error::InvalidInput("model parameters must be finite".into()));
        }
        if gamma0_over_lambda < T::zero() {
            return Err(Error::InvalidInput(format!(
                "gamma0/lambda must be non-negative, got {gamma0_over_lambda}"
            )));
        }
        Ok(Self { gamma0_over_lambda, delta_over_lambda })
    }

    /// `1 - i delta/lambda`.
    pub fn alpha(&self) -> Complex<T> {
        Complex::new(T::one(), -self.delta_over_lambda)
    }

    /// Principal root `Omega/lambda`; its real part is non-negative.
    pub fn omega(&self) -> Complex<T> {
        let a = self.alpha();
        (a * a - Complex::from(T::two() * self.gamma0_over_lambda)).sqrt()
    }
}

/// Propagator and its time derivative at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorSample<T> {
    pub lambda_t: T,
    pub g: Complex<T>,
    /// `dG/d(lambda t)`.
    pub g_dot: Complex<T>,
    pub omega_over_lambda: Complex<T>,
}

/// Time-local decay rate and Lamb shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSample<T> {
    pub lambda_t: T,
    /// `gamma_t/lambda = -2 Re(G'/G)`.
    pub gamma_t_over_lambda: T,
    /// `gamma_t/lambda` from the closed-form ratio of hyperbolic functions.
    pub gamma_t_closed_form: T,
    /// `s_t/lambda = -2 Im(G'/G)`.
    pub s_t_over_lambda: T,
    /// False when `|G|` is at or below [`RATE_SINGULARITY_FLOOR`].
    pub valid: bool,
}

fn check_time<T: Real>(lambda_t: T) -> Result<()> {
    if lambda_t.is_finite() && lambda_t >= T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("lambda_t must be finite and >= 0, got {lambda_t}")))
    }
}

/// `sinh(x)/x` from its Taylor series, for small `|x|`.
fn sinhc_series<T: Real>(x: Complex<T>) -> Complex<T> {
    let one = Complex::<T>::one();
    let x2 = x * x;
    one + x2 / T::lit(6.0) * (one + x2 / T::lit(20.0) * (one + x2 / T::lit(42.0)))
}

/// `G` and `G'` for an explicit choice of root `omega` (either sign).
fn propagator_with_omega<T: Real>(p: &ModelParams<T>, omega: Complex<T>, t: T) -> (Complex<T>, Complex<T>) {
    if p.gamma0_over_lambda == T::zero() {
        return (Complex::one(), Complex::zero());
    }
    let alpha = p.alpha();
    let half_t = t * T::half();
    let e_plus = ((omega - alpha) * half_t).exp();
    let e_minus = ((-omega - alpha) * half_t).exp();
    // exp(-alpha t/2) cosh(omega t/2)
    let damped_cosh = (e_plus + e_minus) * T::half();
    // exp(-alpha t/2) sinh(omega t/2) / omega
    let x = omega * half_t;
    let damped_sinh_over_omega = if x.norm() < T::lit(SERIES_THRESHOLD) {
        (-alpha * half_t).exp() * sinhc_series(x) * half_t
    } else {
        (e_plus - e_minus) / (omega * T::two())
    };
    let g = damped_cosh + alpha * damped_sinh_over_omega;
    let g_dot = -damped_sinh_over_omega * p.gamma0_over_lambda;
    (g, g_dot)
}

pub fn propagator<T: Real>(p: &ModelParams<T>, lambda_t: T) -> Result<PropagatorSample<T>> {
    check_time(lambda_t)?;
    let omega = p.omega();
    let (g, g_dot) = propagator_with_omega(p, omega, lambda_t);
    Ok(PropagatorSample { lambda_t, g, g_dot, omega_over_lambda: omega })
}

/// Decay rate from `gamma0 Re(2 sinh / (Omega cosh + alpha sinh))`, rewritten
/// with `E = exp(-Omega t)` as `2 (1 - E) / (Omega (1 + E) + alpha (1 - E))`.
fn gamma_closed_form<T: Real>(p: &ModelParams<T>, t: T) -> T {
    let omega = p.omega();
    let alpha = p.alpha();
    let one = Complex::<T>::one();
    let z = omega * t;
    let one_minus_e: Complex<T> = if z.norm() < T::lit(SERIES_THRESHOLD) {
        // 1 - exp(-z) = z (1 - z/2 + z^2/6 - z^3/24)
        z * (one - z * T::half() * (one - z / T::lit(3.0) * (one - z / T::lit(4.0))))
    } else {
        one - (-z).exp()
    };
    let one_plus_e = Complex::from(T::two()) - one_minus_e;
    let ratio = one_minus_e * T::two() / (omega * one_plus_e + alpha * one_minus_e);
    ratio.re * p.gamma0_over_lambda
}

pub fn rates<T: Real>(p: &ModelParams<T>, lambda_t: T) -> Result<RateSample<T>> {
    let s = propagator(p, lambda_t)?;
    let valid = s.g.norm() > T::lit(RATE_SINGULARITY_FLOOR);
    let log_deriv = if s.g.is_zero() {
        Complex::new(T::nan(), T::nan())
    } else {
        s.g_dot / s.g
    };
    Ok(RateSample {
        lambda_t,
        gamma_t_over_lambda: -T::two() * log_deriv.re,
        gamma_t_closed_form: gamma_closed_form(p, lambda_t),
        s_t_over_lambda: -T::two() * log_deriv.im,
        valid,
    })
}

fn channel<T: Real>(g: Complex<T>, rho0: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::new(g.norm_sqr() * rho0.ee(), g * rho0.eg())
        .map_err(|e| Error::InternalConsistency(format!("channel output is not a state: {e}")))
}

/// Applies the amplitude-damping channel `Lambda_t` to `rho0`.
pub fn evolve<T: Real>(p: &ModelParams<T>, rho0: &DensityMatrix<T>, lambda_t: T) -> Result<DensityMatrix<T>> {
    let s = propagator(p, lambda_t)?;
    channel(s.g, rho0)
}

fn derivative_from<T: Real>(s: &PropagatorSample<T>, rho0: &DensityMatrix<T>) -> ComplexMatrix2<T> {
    let pop = T::two() * (s.g.conj() * s.g_dot).re * rho0.ee();
    let coh = s.g_dot * rho0.eg();
    ComplexMatrix2::new(pop.into(), coh, coh.conj(), (-pop).into())
}

/// `d rho_t / d(lambda t)` from differentiating the channel entrywise.
pub fn state_derivative<T: Real>(
    p: &ModelParams<T>,
    rho0: &DensityMatrix<T>,
    lambda_t: T,
) -> Result<ComplexMatrix2<T>> {
    let s = propagator(p, lambda_t)?;
    Ok(derivative_from(&s, rho0))
}

/// Right-hand side of the time-local master equation
/// `-i (s_t/2) [sigma+ sigma-, rho] + gamma_t (sigma- rho sigma+ - {sigma+ sigma-, rho}/2)`.
///
/// Only defined where the rates are finite; near zeros of `G` callers must use
/// [`state_derivative`].
pub fn master_rhs<T: Real>(p: &ModelParams<T>, rho: &DensityMatrix<T>, lambda_t: T) -> Result<ComplexMatrix2<T>> {
    let r = rates(p, lambda_t)?;
    if !r.valid {
        let abs_g = propagator(p, lambda_t)?.g.norm();
        return Err(Error::SingularRates {
            lambda_t: lambda_t.to_f64().unwrap_or(f64::NAN),
            abs_g: abs_g.to_f64().unwrap_or(f64::NAN),
        });
    }
    let rho = rho.to_matrix();
    let sp = ComplexMatrix2::sigma_plus();
    let sm = ComplexMatrix2::sigma_minus();
    let excited = sp * sm;
    let lamb = excited
        .commutator(&rho)
        .scale(Complex::new(T::zero(), -r.s_t_over_lambda * T::half()));
    let anti = excited * rho + rho * excited;
    let dissipator = (sm * rho * sp - anti.scale_real(T::half())).scale_real(r.gamma_t_over_lambda);
    Ok(lamb + dissipator)
}

/// A damped Jaynes-Cummings trajectory from a fixed initial state.
#[derive(Clone, Copy, Debug)]
pub struct DjcPath<T> {
    pub params: ModelParams<T>,
    pub rho0: DensityMatrix<T>,
}

impl<T: Real> DjcPath<T> {
    pub fn new(params: ModelParams<T>, rho0: DensityMatrix<T>) -> Self {
        Self { params, rho0 }
    }
}

impl<T: Real> Dynamics<T> for DjcPath<T> {
    fn initial(&self) -> DensityMatrix<T> {
        self.rho0
    }

    fn state(&self, lambda_t: T) -> Result<DensityMatrix<T>> {
        evolve(&self.params, &self.rho0, lambda_t)
    }

    fn state_and_derivative(&self, lambda_t: T) -> Result<(DensityMatrix<T>, ComplexMatrix2<T>)> {
        let s = propagator(&self.params, lambda_t)?;
        Ok((channel(s.g, &self.rho0)?, derivative_from(&s, &self.rho0)))
    }

    fn oscillation_rate(&self) -> T {
        self.params.omega().im.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type P = ModelParams<f64>;
    type Dm = DensityMatrix<f64>;

    fn params() -> impl Strategy<Value = P> {
        (-2.0f64..4.0, -2.0f64..2.0, any::<bool>()).prop_map(|(lg, ld, neg)| {
            let d = 10f64.powf(ld);
            P::new(10f64.powf(lg), if neg { -d } else { d }).unwrap()
        })
    }

    fn state() -> impl Strategy<Value = Dm> {
        (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU, 0.0f64..=1.0).prop_map(|(cz, phi, len)| {
            let sz = (1.0 - cz * cz).sqrt();
            Dm::from_bloch(&crate::qubit::BlochVector { x: len * sz * phi.cos(), y: len * sz * phi.sin(), z: len * cz })
        })
    }

    #[test]
    fn initial_value_is_one() {
        for (g, d) in [(0.1, 0.1), (2.0, 0.0), (1e4, 0.1), (0.5, 0.0)] {
            let s = propagator(&P::new(g, d).unwrap(), 0.0).unwrap();
            assert_eq!(s.g, Complex::new(1.0, 0.0));
            assert_eq!(s.g_dot, Complex::new(0.0, 0.0));
        }
    }

    #[test]
    fn no_coupling_is_identity() {
        let p = P::new(0.0, 0.3).unwrap();
        for t in [0.5, 3.0, 40.0, 900.0] {
            let s = propagator(&p, t).unwrap();
            assert!((s.g - Complex::new(1.0, 0.0)).norm() < 1e-14, "t = {t}: {}", s.g);
            assert_eq!(s.g_dot.norm(), 0.0);
        }
    }

    #[test]
    fn first_zero_at_resonant_strong_coupling() {
        // G = e^{-t/2}[cos(sqrt3 t/2) + sin(sqrt3 t/2)/sqrt3] vanishes at t = 4 pi / (3 sqrt3)
        let p = P::new(2.0, 0.0).unwrap();
        let t0 = 4.0 * std::f64::consts::PI / (3.0 * 3f64.sqrt());
        assert!(propagator(&p, t0).unwrap().g.norm() < 1e-14);
        let closed = |t: f64| (-t / 2.0).exp() * ((3f64.sqrt() * t / 2.0).cos() + (3f64.sqrt() * t / 2.0).sin() / 3f64.sqrt());
        for t in [0.3, 1.0, 2.0, 5.0] {
            assert!((propagator(&p, t).unwrap().g - Complex::new(closed(t), 0.0)).norm() < 1e-14);
        }
        assert!(!rates(&p, t0).unwrap().valid);
        assert!(rates(&p, 1.0).unwrap().valid);
    }

    #[test]
    fn degenerate_omega_uses_series_limit() {
        // Omega = 0 at delta = 0, gamma0 = 1/2: G = e^{-t/2}(1 + t/2)
        let p = P::new(0.5, 0.0).unwrap();
        assert!(p.omega().norm() < 1e-12);
        for t in [0.1, 1.0, 7.0, 30.0] {
            let s = propagator(&p, t).unwrap();
            let exact = (-t / 2.0).exp() * (1.0 + t / 2.0);
            assert!((s.g.re - exact).abs() < 1e-14 && s.g.im.abs() < 1e-14);
            let exact_dot = -0.25 * t * (-t / 2.0).exp();
            assert!((s.g_dot.re - exact_dot).abs() < 1e-14);
        }
    }

    #[test]
    fn markovian_rate_limits() {
        let p = P::new(1e-3, 1e-3).unwrap();
        let r = rates(&p, 50.0).unwrap();
        assert!((r.gamma_t_over_lambda / 1e-3 - 1.0).abs() < 0.01);
        // the exact weak-coupling limit is gamma0 (1 - e^{-t}) = 2 gamma0 / (1 + coth(t/2))
        for t in [0.1, 1.0, 5.0, 20.0] {
            let r = rates(&p, t).unwrap();
            let limit = 2.0e-3 / (1.0 + 1.0 / (t / 2.0).tanh());
            assert!((r.gamma_t_over_lambda / limit - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn x_plus_evolution_entries() {
        let p = P::new(3.0, 0.7).unwrap();
        let g = propagator(&p, 1.3).unwrap().g;
        let rho = evolve(&p, &Dm::x_plus(), 1.3).unwrap();
        assert!((rho.ee() - g.norm_sqr() / 2.0).abs() < 1e-15);
        assert!((rho.eg() - g / 2.0).norm() < 1e-15);
    }

    #[test]
    fn long_time_limit_is_ground_state() {
        for (g, d) in [(0.1, 0.1), (1e4, 0.1), (2.0, 0.0)] {
            let rho = evolve(&P::new(g, d).unwrap(), &Dm::y_plus(), 5000.0).unwrap();
            assert!(crate::qubit::trace_distance(&rho, &Dm::z_minus()) < 1e-12);
        }
    }

    #[test]
    fn zero_coupling_freezes_state() {
        let p = P::new(0.0, 1.0).unwrap();
        let rho0 = Dm::new(0.3, Complex::new(0.2, -0.1)).unwrap();
        let rho = evolve(&p, &rho0, 17.0).unwrap();
        assert!(crate::qubit::trace_distance(&rho, &rho0) < 1e-14);
        assert!(state_derivative(&p, &rho0, 17.0).unwrap().hs_norm_sq() == 0.0);
    }

    #[test]
    fn ground_state_is_fixed_point() {
        let p = P::new(1.7, -0.4).unwrap();
        let rho = Dm::z_minus();
        assert_eq!(state_derivative(&p, &rho, 0.0).unwrap().hs_norm_sq(), 0.0);
        assert!(master_rhs(&p, &rho, 0.8).unwrap().hs_norm_sq() == 0.0);
    }

    #[test]
    fn master_rhs_vanishes_without_rates() {
        let p = P::new(0.0, 0.0).unwrap();
        let rhs = master_rhs(&p, &Dm::x_plus(), 2.0).unwrap();
        assert_eq!(rhs.hs_norm_sq(), 0.0);
    }

    #[test]
    fn master_rhs_rejects_singular_rates() {
        let p = P::new(2.0, 0.0).unwrap();
        let t0 = 4.0 * std::f64::consts::PI / (3.0 * 3f64.sqrt());
        assert!(matches!(master_rhs(&p, &Dm::x_plus(), t0), Err(Error::SingularRates { .. })));
    }

    #[test]
    fn invalid_inputs() {
        assert!(P::new(-1.0, 0.0).is_err());
        assert!(P::new(f64::INFINITY, 0.0).is_err());
        assert!(propagator(&P::new(1.0, 0.0).unwrap(), -0.1).is_err());
    }

    #[test]
    fn f32_propagator_tracks_f64() {
        let p64 = P::new(2.0, 0.3).unwrap();
        let p32 = ModelParams::<f32>::new(2.0, 0.3).unwrap();
        let g64 = propagator(&p64, 1.1).unwrap().g;
        let g32 = propagator(&p32, 1.1).unwrap().g;
        assert!((g64.re - g32.re as f64).abs() < 1e-5 && (g64.im - g32.im as f64).abs() < 1e-5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn branch_invariance(p in params(), t in 0.0f64..30.0) {
            let w = p.omega();
            let (g1, d1) = propagator_with_omega(&p, w, t);
            let (g2, d2) = propagator_with_omega(&p, -w, t);
            prop_assert!((g1 - g2).norm() <= 1e-12 * (1.0 + g1.norm()));
            prop_assert!((d1 - d2).norm() <= 1e-12 * (1.0 + d1.norm()));
        }

        #[test]
        fn derivative_matches_finite_difference(p in params(), t in 0.01f64..20.0) {
            // centered difference with a step scaled to the fastest time scale
            let scale = 1.0 + p.omega().norm();
            let h = 1e-4 / scale;
            let gp = propagator(&p, t + h).unwrap().g;
            let gm = propagator(&p, t - h).unwrap().g;
            let fd = (gp - gm) / (2.0 * h);
            let exact = propagator(&p, t).unwrap().g_dot;
            let magnitude = exact.norm().max(gp.norm() * scale).max(1e-300);
            prop_assert!((fd - exact).norm() <= 1e-7 * magnitude, "fd {} exact {}", fd, exact);
        }

        #[test]
        fn amplitude_bounded(p in params(), t in 0.0f64..200.0) {
            prop_assert!(propagator(&p, t).unwrap().g.norm() <= 1.0 + 1e-9);
        }

        #[test]
        fn channel_positivity(p in params(), rho0 in state(), t in 0.0f64..50.0) {
            let rho = evolve(&p, &rho0, t).unwrap();
            let (_, l2) = crate::qubit::hermitian_eigenvalues(&rho.to_matrix()).unwrap();
            prop_assert!(l2 >= -1e-12);
        }

        #[test]
        fn ground_state_fixed(p in params(), t in 0.0f64..100.0) {
            let rho = evolve(&p, &Dm::z_minus(), t).unwrap();
            prop_assert!(crate::qubit::trace_distance(&rho, &Dm::z_minus()) <= 1e-12);
        }

        #[test]
        fn rate_routes_agree(p in params(), t in 0.0f64..30.0) {
            let r = rates(&p, t).unwrap();
            let g = propagator(&p, t).unwrap().g.norm();
            if r.valid {
                let tol = 1e-9 * (1.0 + r.gamma_t_over_lambda.abs()) / g.min(1.0);
                prop_assert!((r.gamma_t_over_lambda - r.gamma_t_closed_form).abs() <= tol,
                    "{} vs {}", r.gamma_t_over_lambda, r.gamma_t_closed_form);
            }
        }

        #[test]
        fn state_derivative_matches_finite_difference(p in params(), rho0 in state(), t in 0.01f64..20.0) {
            let h = 1e-6;
            let plus = evolve(&p, &rho0, t + h).unwrap().to_matrix();
            let minus = evolve(&p, &rho0, t - h).unwrap().to_matrix();
            let fd = (plus - minus).scale_real(0.5 / h);
            let exact = state_derivative(&p, &rho0, t).unwrap();
            prop_assert!(exact.is_hermitian(1e-15));
            prop_assert!(exact.trace().norm() <= 1e-15);
            prop_assert!(fd.max_abs_diff(&exact) <= 1e-6, "diff {}", fd.max_abs_diff(&exact));
        }

        #[test]
        fn master_equation_reproduces_channel(p in params(), rho0 in state(), t in 0.0f64..20.0) {
            let g = propagator(&p, t).unwrap().g.norm();
            prop_assume!(g > 1e-6);
            let rho = evolve(&p, &rho0, t).unwrap();
            let rhs = master_rhs(&p, &rho, t).unwrap();
            let exact = state_derivative(&p, &rho0, t).unwrap();
            prop_assert!(rhs.max_abs_diff(&exact) <= 1e-6, "diff {}", rhs.max_abs_diff(&exact));
        }
    }
}
