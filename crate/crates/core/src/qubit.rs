//! Exact 2x2 complex linear algebra and the state-pair metrics used by the
//! speed-limit bounds.
//!
//! The computational basis is ordered `(|z;+>, |z;->)`; the first diagonal
//! entry of a [`DensityMatrix`] is the excited population `rho_ee`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hermiticity tolerance accepted by the spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Clamping tolerance for traces, determinants and radicands.
pub const CLAMP_TOL: f64 = 1e-12;

/// General 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> ComplexMatrix2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn from_real(a: T, b: T, c: T, d: T) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn zero() -> Self {
        Self::new(Complex::zero(), Complex::zero(), Complex::zero(), Complex::zero())
    }

    pub fn identity() -> Self {
        Self::new(Complex::one(), Complex::zero(), Complex::zero(), Complex::one())
    }

    pub fn pauli_x() -> Self {
        Self::from_real(T::zero(), T::one(), T::one(), T::zero())
    }

    pub fn pauli_y() -> Self {
        let i = Complex::new(T::zero(), T::one());
        Self::new(Complex::zero(), -i, i, Complex::zero())
    }

    pub fn pauli_z() -> Self {
        Self::from_real(T::one(), T::zero(), T::zero(), -T::one())
    }

    /// Raising operator `|z;+><z;-|`.
    pub fn sigma_plus() -> Self {
        Self::from_real(T::zero(), T::one(), T::zero(), T::zero())
    }

    /// Lowering operator `|z;-><z;+|`.
    pub fn sigma_minus() -> Self {
        Self::from_real(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.m[row][col]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let m = &self.m;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// `Tr(A^dagger A)`, the squared Hilbert-Schmidt norm.
    pub fn hs_norm_sq(&self) -> T {
        self.m.iter().flatten().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn hermiticity_defect(&self) -> T {
        let m = &self.m;
        (m[0][1] - m[1][0].conj())
            .norm()
            .max(m[0][0].im.abs())
            .max(m[1][1].im.abs())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Real> Add for ComplexMatrix2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl<T: Real> Sub for ComplexMatrix2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl<T: Real> Neg for ComplexMatrix2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-T::one())
    }
}

impl<T: Real> Mul for ComplexMatrix2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Spectrum of `[[a, b], [b*, d]]`, descending.
fn hermitian_spectrum<T: Real>(a: T, d: T, b: Complex<T>) -> (T, T) {
    let mean = (a + d) * T::half();
    let half_gap = (a - d) * T::half();
    let radius = half_gap.hypot(b.norm());
    (mean + radius, mean - radius)
}

/// Closed-form eigenvalues of a Hermitian 2x2 matrix, in descending order.
///
/// Evaluates `tr/2 +- sqrt((tr/2)^2 - det)` with the discriminant rewritten as
/// `((a - d)/2)^2 + |b|^2`, which is non-negative by construction.
pub fn hermitian_eigenvalues<T: Real>(m: &ComplexMatrix2<T>) -> Result<(T, T)> {
    let defect = m.hermiticity_defect();
    if !(defect <= T::tol(HERMITIAN_TOL)) {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let b = (m.m[0][1] + m.m[1][0].conj()) * T::half();
    Ok(hermitian_spectrum(m.m[0][0].re, m.m[1][1].re, b))
}

/// Operator, Hilbert-Schmidt and trace norms of a Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixNorms<T> {
    pub op: T,
    pub hs: T,
    pub tr: T,
}

impl<T: Real> MatrixNorms<T> {
    fn from_spectrum((l1, l2): (T, T)) -> Self {
        let (a1, a2) = (l1.abs(), l2.abs());
        Self { op: a1.max(a2), hs: a1.hypot(a2), tr: a1 + a2 }
    }
}

pub fn matrix_norms<T: Real>(m: &ComplexMatrix2<T>) -> Result<MatrixNorms<T>> {
    hermitian_eigenvalues(m).map(MatrixNorms::from_spectrum)
}

/// Bloch vector `r` with `rho = (I + r.sigma)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let r = Self { x, y, z };
        let norm = r.norm();
        if !norm.is_finite() || norm > T::one() + T::tol(CLAMP_TOL) {
            return Err(Error::InvalidInput(format!("Bloch vector length {norm} exceeds 1")));
        }
        Ok(r)
    }

    pub fn norm_sqr(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// Qubit density matrix stored as `(rho_ee, rho_eg)`.
///
/// Hermiticity and unit trace hold by construction; positivity is checked
/// when the state is built.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    ee: T,
    eg: Complex<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(ee: T, eg: Complex<T>) -> Result<Self> {
        if !(ee.is_finite() && eg.re.is_finite() && eg.im.is_finite()) {
            return Err(Error::InvalidInput("density matrix entries must be finite".into()));
        }
        let tol = T::tol(CLAMP_TOL);
        let det = ee * (T::one() - ee) - eg.norm_sqr();
        if ee < -tol || ee > T::one() + tol || det < -tol {
            return Err(Error::InvalidInput(format!(
                "not positive semidefinite: rho_ee = {ee}, |rho_eg| = {}",
                eg.norm()
            )));
        }
        Ok(Self { ee, eg })
    }

    /// Builds a state from a full matrix, checking Hermiticity and trace.
    pub fn from_matrix(m: &ComplexMatrix2<T>) -> Result<Self> {
        if !m.is_hermitian(T::tol(HERMITIAN_TOL)) {
            return Err(Error::InvalidInput("density matrix must be Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - T::one()).abs() > T::tol(CLAMP_TOL) {
            return Err(Error::InvalidInput(format!("trace {} differs from 1", tr.re)));
        }
        Self::new(m.m[0][0].re, m.m[0][1])
    }

    pub fn from_bloch(r: &BlochVector<T>) -> Self {
        Self {
            ee: (T::one() + r.z) * T::half(),
            eg: Complex::new(r.x * T::half(), -r.y * T::half()),
        }
    }

    pub fn bloch(&self) -> BlochVector<T> {
        BlochVector {
            x: T::two() * self.eg.re,
            y: -T::two() * self.eg.im,
            z: T::two() * self.ee - T::one(),
        }
    }

    pub fn z_plus() -> Self {
        Self { ee: T::one(), eg: Complex::zero() }
    }

    /// `|z;->`, the stationary state of the damped channel.
    pub fn z_minus() -> Self {
        Self { ee: T::zero(), eg: Complex::zero() }
    }

    pub fn x_plus() -> Self {
        Self { ee: T::half(), eg: Complex::new(T::half(), T::zero()) }
    }

    pub fn x_minus() -> Self {
        Self { ee: T::half(), eg: Complex::new(-T::half(), T::zero()) }
    }

    pub fn y_plus() -> Self {
        Self { ee: T::half(), eg: Complex::new(T::zero(), -T::half()) }
    }

    pub fn y_minus() -> Self {
        Self { ee: T::half(), eg: Complex::new(T::zero(), T::half()) }
    }

    pub fn maximally_mixed() -> Self {
        Self { ee: T::half(), eg: Complex::zero() }
    }

    pub fn ee(&self) -> T {
        self.ee
    }

    pub fn gg(&self) -> T {
        T::one() - self.ee
    }

    pub fn eg(&self) -> Complex<T> {
        self.eg
    }

    pub fn to_matrix(&self) -> ComplexMatrix2<T> {
        ComplexMatrix2::new(self.ee.into(), self.eg, self.eg.conj(), self.gg().into())
    }

    /// Determinant `(1 - |r|^2)/4`; rounding-level values are flushed to zero
    /// so that pure states stay exactly pure.
    pub fn det(&self) -> T {
        let det = self.ee * self.gg() - self.eg.norm_sqr();
        if det <= T::epsilon() * T::lit(8.0) {
            T::zero()
        } else {
            det
        }
    }

    pub fn is_pure(&self) -> bool {
        self.det() <= T::tol(CLAMP_TOL)
    }
}

/// Trace distance `1/2 ||rho1 - rho2||_tr`.
pub fn trace_distance<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> T {
    let a = rho1.ee - rho2.ee;
    let b = rho1.eg - rho2.eg;
    MatrixNorms::from_spectrum(hermitian_spectrum(a, -a, b)).tr * T::half()
}

/// Root fidelity `Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))` via the qubit closed
/// form `sqrt(Tr(rho1 rho2) + 2 sqrt(det rho1 det rho2))`.
pub fn bures_fidelity<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<T> {
    let overlap = rho1.ee * rho2.ee
        + rho1.gg() * rho2.gg()
        + T::two() * (rho1.eg * rho2.eg.conj()).re;
    let radicand = overlap + T::two() * (rho1.det() * rho2.det()).sqrt();
    if radicand < -T::tol(CLAMP_TOL) {
        return Err(Error::NumericalDegeneracy(format!(
            "fidelity radicand {radicand:e} is negative"
        )));
    }
    Ok(radicand.max(T::zero()).sqrt().min(T::one()))
}

/// `sin^2` of the Bures angle, `D^2 + (sqrt(det1) - sqrt(det2))^2`.
///
/// Equal to `1 - F_B^2` but free of cancellation for nearby states.
pub fn bures_sin_sq<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> T {
    let d = trace_distance(rho1, rho2);
    let (s1, s2) = (rho1.det().sqrt(), rho2.det().sqrt());
    let ds = if s1 + s2 > T::zero() {
        (rho1.det() - rho2.det()) / (s1 + s2)
    } else {
        T::zero()
    };
    (d * d + ds * ds).min(T::one())
}

/// Bures angle `arccos F_B`, in `[0, pi/2]`.
///
/// Evaluated as `atan2(sin L, F_B)` so that infinitesimal angles keep full
/// relative precision.
pub fn bures_angle<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<T> {
    let cos = bures_fidelity(rho1, rho2)?;
    let sin = bures_sin_sq(rho1, rho2).sqrt();
    Ok(sin.atan2(cos).min(T::FRAC_PI_2()).max(T::zero()))
}

/// Quantumness `Q = 2 ||[rho_a, rho_b]||_hs^2`.
pub fn quantumness<T: Real>(rho_a: &DensityMatrix<T>, rho_b: &DensityMatrix<T>) -> T {
    let c = rho_a.to_matrix().commutator(&rho_b.to_matrix());
    T::two() * c.hs_norm_sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type M = ComplexMatrix2<f64>;
    type Dm = DensityMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(hermitian_eigenvalues(&M::identity()).unwrap(), (1.0, 1.0));
        assert_eq!(hermitian_eigenvalues(&M::pauli_z()).unwrap(), (1.0, -1.0));
        let m = M::from_real(0.5, 0.5, 0.5, -0.5);
        let (l1, l2) = hermitian_eigenvalues(&m).unwrap();
        assert!(close(l1, 0.5f64.sqrt(), 1e-15));
        assert!(close(l2, -0.5f64.sqrt(), 1e-15));
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = M::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0));
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn trace_distance_examples() {
        assert_eq!(trace_distance(&Dm::z_plus(), &Dm::z_minus()), 1.0);
        let rho = Dm::x_plus();
        assert_eq!(trace_distance(&rho, &rho), 0.0);
        assert!(close(trace_distance(&Dm::z_plus(), &Dm::maximally_mixed()), 0.5, 1e-15));
    }

    #[test]
    fn fidelity_and_angle_examples() {
        let rho = Dm::y_plus();
        assert!(close(bures_fidelity(&rho, &rho).unwrap(), 1.0, 1e-15));
        assert_eq!(bures_fidelity(&Dm::z_plus(), &Dm::z_minus()).unwrap(), 0.0);
        let f = bures_fidelity(&Dm::z_plus(), &Dm::maximally_mixed()).unwrap();
        assert!(close(f, 0.5f64.sqrt(), 1e-15));

        assert_eq!(bures_angle(&rho, &rho).unwrap(), 0.0);
        let l = bures_angle(&Dm::z_plus(), &Dm::z_minus()).unwrap();
        assert!(close(l, std::f64::consts::FRAC_PI_2, 1e-15));
        let l = bures_angle(&Dm::z_plus(), &Dm::maximally_mixed()).unwrap();
        assert!(close(l, std::f64::consts::FRAC_PI_4, 1e-15));
    }

    #[test]
    fn norms_examples() {
        let s2 = 2f64.sqrt();
        for m in [M::identity(), M::pauli_x()] {
            let n = matrix_norms(&m).unwrap();
            assert!(close(n.op, 1.0, 1e-15) && close(n.hs, s2, 1e-15) && close(n.tr, 2.0, 1e-15));
        }
    }

    #[test]
    fn quantumness_examples() {
        let diag = Dm::new(0.3, c(0.0, 0.0)).unwrap();
        assert_eq!(quantumness(&Dm::z_plus(), &diag), 0.0);
        assert!(close(quantumness(&Dm::z_plus(), &Dm::x_plus()), 1.0, 1e-15));
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(Dm::new(1.2, c(0.0, 0.0)).is_err());
        assert!(Dm::new(0.5, c(0.6, 0.0)).is_err());
        assert!(Dm::new(f64::NAN, c(0.0, 0.0)).is_err());
        assert!(BlochVector::new(1.0, 0.1, 0.0).is_err());
        let not_unit = M::from_real(0.6, 0.0, 0.0, 0.6);
        assert!(Dm::from_matrix(&not_unit).is_err());
    }

    #[test]
    fn f32_instantiation() {
        let d = trace_distance(&DensityMatrix::<f32>::z_plus(), &DensityMatrix::<f32>::maximally_mixed());
        assert!((d - 0.5).abs() < 1e-6);
        let l = bures_angle(&DensityMatrix::<f32>::z_plus(), &DensityMatrix::<f32>::z_minus()).unwrap();
        assert!((l - std::f32::consts::FRAC_PI_2).abs() < 1e-6);
    }

    fn bloch_strategy(max_len: f64) -> impl Strategy<Value = BlochVector<f64>> {
        (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU, 0.0f64..=max_len).prop_map(|(cz, phi, len)| {
            let sz = (1.0 - cz * cz).sqrt();
            BlochVector { x: len * sz * phi.cos(), y: len * sz * phi.sin(), z: len * cz }
        })
    }

    fn state() -> impl Strategy<Value = Dm> {
        bloch_strategy(1.0).prop_map(|r| Dm::from_bloch(&r))
    }

    fn hermitian() -> impl Strategy<Value = M> {
        (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0)
            .prop_map(|(a, d, br, bi)| M::new(c(a, 0.0), c(br, bi), c(br, -bi), c(d, 0.0)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn eigenvalues_solve_characteristic_polynomial(m in hermitian()) {
            let (l1, l2) = hermitian_eigenvalues(&m).unwrap();
            prop_assert!(l1 >= l2);
            for l in [l1, l2] {
                let shifted = m - M::identity().scale_real(l);
                prop_assert!(shifted.det().norm() <= 1e-10 * (1.0 + l * l));
            }
        }

        #[test]
        fn trace_distance_triangle(a in state(), b in state(), cc in state()) {
            let lhs = trace_distance(&a, &cc);
            prop_assert!(lhs <= trace_distance(&a, &b) + trace_distance(&b, &cc) + 1e-12);
            prop_assert!((trace_distance(&a, &b) - trace_distance(&b, &a)).abs() <= 1e-15);
        }

        #[test]
        fn fidelity_pure_reduction(psi in bloch_strategy(1.0).prop_map(|r| {
            let n = r.norm();
            BlochVector { x: r.x / n, y: r.y / n, z: r.z / n }
        }), rho in state()) {
            let pure = Dm::from_bloch(&psi);
            let overlap = (pure.to_matrix() * rho.to_matrix()).trace().re;
            let f = bures_fidelity(&pure, &rho).unwrap();
            prop_assert!((f - overlap.max(0.0).sqrt()).abs() <= 1e-12);
            let f_rev = bures_fidelity(&rho, &pure).unwrap();
            prop_assert!((f - f_rev).abs() <= 1e-15);
        }

        #[test]
        fn stable_angle_matches_arccos(a in state(), b in state()) {
            let f = bures_fidelity(&a, &b).unwrap();
            let l = bures_angle(&a, &b).unwrap();
            prop_assert!((l.cos() - f).abs() <= 1e-12);
            prop_assert!((bures_sin_sq(&a, &b) - (1.0 - f * f)).abs() <= 1e-12);
        }

        #[test]
        fn traceless_norm_ratios(a in -3.0f64..3.0, br in -3.0f64..3.0, bi in -3.0f64..3.0) {
            let m = M::new(c(a, 0.0), c(br, bi), c(br, -bi), c(-a, 0.0));
            let n = matrix_norms(&m).unwrap();
            prop_assert!(n.op <= n.hs && n.hs <= n.tr);
            prop_assert!((n.hs - 2f64.sqrt() * n.op).abs() <= 1e-12);
            prop_assert!((n.tr - 2.0 * n.op).abs() <= 1e-12);
        }

        #[test]
        fn norm_ordering(m in hermitian()) {
            let n = matrix_norms(&m).unwrap();
            prop_assert!(n.op <= n.hs && n.hs <= n.tr);
        }

        #[test]
        fn quantumness_properties(a in state(), b in state()) {
            let q = quantumness(&a, &b);
            prop_assert!((q - quantumness(&b, &a)).abs() <= 1e-14);
            prop_assert!((-1e-15..=1.0 + 1e-12).contains(&q));
            // second algebraic route: -4 Tr[(ab)^2 - a^2 b^2]
            let (ma, mb) = (a.to_matrix(), b.to_matrix());
            let ab = ma * mb;
            let alt = ((ab * ab) - (ma * ma) * (mb * mb)).trace().re * -4.0;
            prop_assert!((q - alt).abs() <= 1e-12);
        }

        #[test]
        fn bloch_round_trip(r in bloch_strategy(1.0)) {
            let rho = Dm::from_bloch(&r);
            let back = rho.bloch();
            prop_assert!((back.x - r.x).abs() <= 1e-14);
            prop_assert!((back.y - r.y).abs() <= 1e-14);
            prop_assert!((back.z - r.z).abs() <= 1e-14);
            prop_assert!(Dm::new(rho.ee(), rho.eg()).is_ok());
            let pauli = (M::identity()
                + M::pauli_x().scale_real(r.x)
                + M::pauli_y().scale_real(r.y)
                + M::pauli_z().scale_real(r.z))
                .scale_real(0.5);
            prop_assert!(pauli.max_abs_diff(&rho.to_matrix()) <= 1e-15);
        }
    }
}
