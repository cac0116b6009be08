use std::f64::consts::PI;
use std::sync::Arc;

use super::{Burgers, ConservationLaw, Euler, LinearSystem, Primitive, SpaceTimeFn};
use crate::error::Result;
use crate::linalg::{Matrix, Vector};

/// A smooth exact solution together with the source term it induces.
#[derive(Clone)]
pub struct ManufacturedCase<const M: usize> {
    pub equation: Arc<dyn ConservationLaw<M>>,
    pub exact: SpaceTimeFn<M>,
    pub source: SpaceTimeFn<M>,
    pub domain: (f64, f64),
    pub final_time: f64,
}

impl<const M: usize> std::fmt::Debug for ManufacturedCase<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("equation", &self.equation.name())
            .field("domain", &self.domain)
            .field("final_time", &self.final_time)
            .finish()
    }
}

/// Burgers with `u = sin(4π(x − t))` on (0, 1), periodic, `T = 1`.
pub fn manufactured_burgers() -> ManufacturedCase<1> {
    let k = 4.0 * PI;
    ManufacturedCase {
        equation: Arc::new(Burgers),
        exact: Arc::new(move |x, t| Vector::<1>::new((k * (x - t)).sin())),
        source: Arc::new(move |x, t| {
            let phase = k * (x - t);
            Vector::<1>::new(k * phase.cos() * (phase.sin() - 1.0))
        }),
        domain: (0.0, 1.0),
        final_time: 1.0,
    }
}

/// Euler with primitive profile `(2 + sin, sin, 2 + cos)` of `2π(x − t)`.
///
/// The source is `d/dφ [f(u(φ)) − u(φ)]` with `φ = x − t`, expanded by the
/// chain rule on the primitive variables.
pub fn manufactured_euler() -> ManufacturedCase<3> {
    let eq = Euler::default();
    let gamma = eq.gamma;
    let w = 2.0 * PI;
    ManufacturedCase {
        equation: Arc::new(eq),
        exact: Arc::new(move |x, t| {
            let (s, c) = (w * (x - t)).sin_cos();
            Primitive::new(2.0 + s, s, 2.0 + c).to_conserved(gamma)
        }),
        source: Arc::new(move |x, t| {
            let (s, c) = (w * (x - t)).sin_cos();
            let (rho, v, p) = (2.0 + s, s, 2.0 + c);
            let (drho, dv, dp) = (w * c, w * c, -w * s);
            let energy = p / (gamma - 1.0) + 0.5 * rho * v * v;
            let dm = drho * v + rho * dv;
            let denergy = dp / (gamma - 1.0) + 0.5 * drho * v * v + rho * v * dv;
            Vector::<3>::new(
                dm - drho,
                drho * v * v + 2.0 * rho * v * dv + dp - dm,
                (denergy + dp) * v + (energy + p) * dv - denergy,
            )
        }),
        domain: (0.0, 1.0),
        final_time: 1.0,
    }
}

/// The three-wave linear system with initial data
/// `(sin 2πx, −⅓ cos 2πx, ½ sin 2πx)`, periodic on (0, 1), `T = 1`.
pub fn manufactured_linear_system() -> ManufacturedCase<3> {
    let sys = LinearSystem::three_wave();
    let a = *sys.matrix();
    let u0: Arc<dyn Fn(f64) -> Vector<3> + Send + Sync> = Arc::new(|x: f64| {
        let (s, c) = (2.0 * PI * x).sin_cos();
        Vector::<3>::new(s, -c / 3.0, 0.5 * s)
    });
    let exact_at = LinearCharacteristics::new(u0, &a).expect("three-wave matrix is hyperbolic");
    ManufacturedCase {
        equation: Arc::new(sys),
        exact: Arc::new(move |x, t| exact_at.eval(x, t)),
        source: Arc::new(|_, _| Vector::<3>::zeros()),
        domain: (0.0, 1.0),
        final_time: 1.0,
    }
}

struct LinearCharacteristics<const M: usize> {
    u0: Arc<dyn Fn(f64) -> Vector<M> + Send + Sync>,
    q: Matrix<M>,
    q_inv: Matrix<M>,
    lambda: Vector<M>,
}

impl<const M: usize> LinearCharacteristics<M> {
    fn new(u0: Arc<dyn Fn(f64) -> Vector<M> + Send + Sync>, a: &Matrix<M>) -> Result<Self> {
        let e = super::linear_system_eigen(a)?;
        Ok(Self {
            u0,
            q: e.q,
            q_inv: e.q_inv,
            lambda: e.lambda,
        })
    }

    fn eval(&self, x: f64, t: f64) -> Vector<M> {
        if t == 0.0 {
            return (self.u0)(x);
        }
        let mut w = Vector::<M>::zeros();
        for i in 0..M {
            let xi = (x - self.lambda[i] * t).rem_euclid(1.0);
            w[i] = (self.q_inv.row(i) * (self.u0)(xi))[0];
        }
        self.q * w
    }
}

/// Exact solution of `u_t + A u_x = 0` on the periodic unit interval, by
/// advecting each characteristic variable with its own speed.
pub fn linear_system_exact<const M: usize>(
    u0: Arc<dyn Fn(f64) -> Vector<M> + Send + Sync>,
    a: &Matrix<M>,
    t: f64,
) -> Result<impl Fn(f64) -> Vector<M> + Send + Sync> {
    let ch = LinearCharacteristics::new(u0, a)?;
    Ok(move |x| ch.eval(x, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burgers_profile_values() {
        let case = manufactured_burgers();
        assert!((case.exact)(0.25, 0.0)[0].abs() < 1e-15);
        for &x in &[0.1, 0.37, 0.8] {
            assert!(((case.exact)(x, 1.0)[0] - (case.exact)(x, 0.0)[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn euler_profile_at_zero_phase() {
        let case = manufactured_euler();
        let u = (case.exact)(0.0, 0.0);
        let w = Primitive::from_conserved(&u, 1.4);
        assert!((w.rho - 2.0).abs() < 1e-15 && w.v.abs() < 1e-15 && (w.p - 3.0).abs() < 1e-14);
        assert!((u - Vector::<3>::new(2.0, 0.0, 7.5)).amax() < 1e-14);
    }

    #[test]
    fn scalar_linear_system_is_a_shift() {
        let u0: Arc<dyn Fn(f64) -> Vector<1> + Send + Sync> =
            Arc::new(|x: f64| Vector::<1>::new((2.0 * PI * x).sin() + x * x));
        let a = Matrix::<1>::new(2.0);
        let t = 0.3;
        let exact = linear_system_exact(u0.clone(), &a, t).unwrap();
        for &x in &[0.05, 0.5, 0.95] {
            let expected = u0((x - 2.0 * t).rem_euclid(1.0));
            assert!((exact(x) - expected).amax() < 1e-14);
        }
    }

    #[test]
    fn initial_time_returns_initial_data() {
        let case = manufactured_linear_system();
        let u0 = (case.exact)(0.3, 0.0);
        let (s, c) = (2.0 * PI * 0.3f64).sin_cos();
        assert_eq!(u0, Vector::<3>::new(s, -c / 3.0, 0.5 * s));
    }
}
