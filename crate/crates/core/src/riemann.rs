//! Two-point numerical fluxes `H(u⁻, u⁺)` and their Jacobians with respect to
//! each argument.

use crate::equations::{ConservationLaw, Euler, Primitive};
use crate::error::{Error, Result};
use crate::linalg::{EigenDecomposition, Matrix, Vector};

pub trait NumericalFlux<const M: usize>: Send + Sync {
    fn name(&self) -> &'static str;

    fn flux(&self, a: &Vector<M>, b: &Vector<M>) -> Result<Vector<M>>;

    /// `(∂H/∂u⁻, ∂H/∂u⁺)`.
    fn jacobians(&self, a: &Vector<M>, b: &Vector<M>) -> Result<(Matrix<M>, Matrix<M>)>;

    /// Scalar functions of `(u⁻, u⁺)` whose sign changes mark the kinks of `H`.
    ///
    /// Integrals of `H` along a cell are split at the zeros of these functions.
    fn switch_functions(&self, _a: &Vector<M>, _b: &Vector<M>, _out: &mut Vec<f64>) {}
}

/// Configuration key of a numerical flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FluxKey {
    Upwind,
    Godunov,
    LinsysExact,
    Roe,
}

impl std::str::FromStr for FluxKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upwind" => Ok(Self::Upwind),
            "godunov" => Ok(Self::Godunov),
            "linsys-exact" => Ok(Self::LinsysExact),
            "roe" => Ok(Self::Roe),
            other => Err(Error::Config(format!("unknown flux key '{other}'"))),
        }
    }
}

/// Upwind flux for `u_t + β u_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Upwind {
    pub beta: f64,
}

impl NumericalFlux<1> for Upwind {
    fn name(&self) -> &'static str {
        "upwind"
    }

    fn flux(&self, a: &Vector<1>, b: &Vector<1>) -> Result<Vector<1>> {
        let h = if self.beta > 0.0 {
            self.beta * a[0]
        } else if self.beta < 0.0 {
            self.beta * b[0]
        } else {
            0.0
        };
        Ok(Vector::<1>::new(h))
    }

    fn jacobians(&self, _a: &Vector<1>, _b: &Vector<1>) -> Result<(Matrix<1>, Matrix<1>)> {
        Ok((
            Matrix::<1>::new(if self.beta > 0.0 { self.beta } else { 0.0 }),
            Matrix::<1>::new(if self.beta < 0.0 { self.beta } else { 0.0 }),
        ))
    }
}

/// Exact Godunov flux for Burgers, `f(u) = u²/2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GodunovBurgers;

/// Which argument the Godunov flux takes its value from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Left,
    Right,
    Sonic,
}

fn godunov_branch(a: f64, b: f64) -> Branch {
    if a <= b {
        if a > 0.0 {
            Branch::Left
        } else if b < 0.0 {
            Branch::Right
        } else {
            Branch::Sonic
        }
    } else if a + b >= 0.0 {
        Branch::Left
    } else {
        Branch::Right
    }
}

impl NumericalFlux<1> for GodunovBurgers {
    fn name(&self) -> &'static str {
        "godunov"
    }

    fn flux(&self, a: &Vector<1>, b: &Vector<1>) -> Result<Vector<1>> {
        let (a, b) = (a[0], b[0]);
        let h = match godunov_branch(a, b) {
            Branch::Left => 0.5 * a * a,
            Branch::Right => 0.5 * b * b,
            Branch::Sonic => 0.0,
        };
        Ok(Vector::<1>::new(h))
    }

    fn jacobians(&self, a: &Vector<1>, b: &Vector<1>) -> Result<(Matrix<1>, Matrix<1>)> {
        let (a, b) = (a[0], b[0]);
        let (da, db) = match godunov_branch(a, b) {
            Branch::Left => (a, 0.0),
            Branch::Right => (0.0, b),
            Branch::Sonic => (0.0, 0.0),
        };
        Ok((Matrix::<1>::new(da), Matrix::<1>::new(db)))
    }

    fn switch_functions(&self, a: &Vector<1>, b: &Vector<1>, out: &mut Vec<f64>) {
        out.extend([a[0], b[0], a[0] + b[0]]);
    }
}

/// Exact Riemann flux of a constant-coefficient system, `H = A⁺u⁻ + A⁻u⁺`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinsysExact<const M: usize> {
    a_plus: Matrix<M>,
    a_minus: Matrix<M>,
}

impl<const M: usize> LinsysExact<M> {
    pub fn new(eigen: &EigenDecomposition<M>) -> Self {
        Self {
            a_plus: eigen.map(|l| l.max(0.0)),
            a_minus: eigen.map(|l| l.min(0.0)),
        }
    }

    pub fn a_plus(&self) -> &Matrix<M> {
        &self.a_plus
    }

    pub fn a_minus(&self) -> &Matrix<M> {
        &self.a_minus
    }
}

impl<const M: usize> NumericalFlux<M> for LinsysExact<M> {
    fn name(&self) -> &'static str {
        "linsys-exact"
    }

    fn flux(&self, a: &Vector<M>, b: &Vector<M>) -> Result<Vector<M>> {
        Ok(self.a_plus * a + self.a_minus * b)
    }

    fn jacobians(&self, _a: &Vector<M>, _b: &Vector<M>) -> Result<(Matrix<M>, Matrix<M>)> {
        Ok((self.a_plus, self.a_minus))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoeJacobian {
    /// `½f_u(u∓) ± ½|Â|`, ignoring the dependence of `|Â|` on the states.
    #[default]
    Frozen,
    /// Central differences of the flux with step `√ε·(1 + |u|)`.
    FiniteDifference,
}

/// Roe's approximate Riemann solver for the Euler equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roe {
    pub euler: Euler,
    /// Harten's fix with threshold `δ·(|v̂| + ĉ)` when set.
    pub entropy_fix: Option<f64>,
    pub jacobian: RoeJacobian,
}

impl Default for Roe {
    fn default() -> Self {
        Self {
            euler: Euler::default(),
            entropy_fix: None,
            jacobian: RoeJacobian::Frozen,
        }
    }
}

impl Roe {
    /// `|Â|` at the Roe average of `a` and `b`.
    pub fn abs_matrix(&self, a: &Vector<3>, b: &Vector<3>) -> Result<Matrix<3>> {
        let g = self.euler.gamma;
        let avg = self.euler.roe_average(a, b)?;
        let w = Primitive::from_conserved(&avg, g);
        let h = w.enthalpy(g);
        let c2 = (g - 1.0) * (h - 0.5 * w.v * w.v);
        if !(c2 > 0.0) {
            return Err(Error::Admissibility {
                quantity: "Roe-averaged sound speed",
                value: c2,
                cell: None,
                time: None,
            });
        }
        let c = c2.sqrt();
        let eig = crate::equations::euler_eigen_from_roe_state(w.v, h, c, g);
        let delta = self.entropy_fix.map(|d| d * (w.v.abs() + c));
        Ok(eig.map(|l| match delta {
            Some(d) if d > 0.0 && l.abs() < d => (l * l + d * d) / (2.0 * d),
            _ => l.abs(),
        }))
    }

    fn flux_checked(&self, a: &Vector<3>, b: &Vector<3>) -> Result<Vector<3>> {
        let fa = crate::equations::euler_flux(a, self.euler.gamma)?;
        let fb = crate::equations::euler_flux(b, self.euler.gamma)?;
        let abs = self.abs_matrix(a, b)?;
        Ok((fa + fb) * 0.5 - abs * (b - a) * 0.5)
    }
}

impl NumericalFlux<3> for Roe {
    fn name(&self) -> &'static str {
        "roe"
    }

    fn flux(&self, a: &Vector<3>, b: &Vector<3>) -> Result<Vector<3>> {
        self.flux_checked(a, b)
    }

    fn jacobians(&self, a: &Vector<3>, b: &Vector<3>) -> Result<(Matrix<3>, Matrix<3>)> {
        match self.jacobian {
            RoeJacobian::Frozen => {
                self.euler.check_admissible(a)?;
                self.euler.check_admissible(b)?;
                let abs = self.abs_matrix(a, b)?;
                Ok((
                    (self.euler.jacobian(a) + abs) * 0.5,
                    (self.euler.jacobian(b) - abs) * 0.5,
                ))
            }
            RoeJacobian::FiniteDifference => Ok((
                finite_difference_jacobian(|x| self.flux_checked(&x, b), a)?,
                finite_difference_jacobian(|x| self.flux_checked(a, &x), b)?,
            )),
        }
    }
}

/// Central-difference Jacobian of `f` at `u` with step `√ε·(1 + |u_j|)`.
pub fn finite_difference_jacobian<const M: usize>(
    f: impl Fn(Vector<M>) -> Result<Vector<M>>,
    u: &Vector<M>,
) -> Result<Matrix<M>> {
    let mut jac = Matrix::<M>::zeros();
    for j in 0..M {
        let step = f64::EPSILON.sqrt() * (1.0 + u[j].abs());
        let mut up = *u;
        let mut dn = *u;
        up[j] += step;
        dn[j] -= step;
        let col = (f(up)? - f(dn)?) / (2.0 * step);
        jac.set_column(j, &col);
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{three_wave_matrix, Burgers, LinearSystem, GAMMA};
    use proptest::prelude::*;

    fn s(x: f64) -> Vector<1> {
        Vector::<1>::new(x)
    }

    #[test]
    fn upwind_examples() {
        let f = Upwind { beta: 2.0 };
        assert_eq!(f.flux(&s(3.0), &s(5.0)).unwrap()[0], 6.0);
        let f = Upwind { beta: 1.0 };
        let (ja, jb) = f.jacobians(&s(0.0), &s(0.0)).unwrap();
        assert_eq!((ja[0], jb[0]), (1.0, 0.0));
        let f = Upwind { beta: -1.5 };
        assert_eq!(f.flux(&s(3.0), &s(2.0)).unwrap()[0], -3.0);
        assert_eq!(Upwind { beta: 0.0 }.flux(&s(3.0), &s(2.0)).unwrap()[0], 0.0);
    }

    #[test]
    fn godunov_examples() {
        let g = GodunovBurgers;
        assert_eq!(g.flux(&s(2.0), &s(1.0)).unwrap()[0], 2.0);
        assert_eq!(g.flux(&s(-1.0), &s(1.0)).unwrap()[0], 0.0);
        assert_eq!(g.flux(&s(1.0), &s(1.0)).unwrap()[0], 0.5);
        assert_eq!(g.flux(&s(0.0), &s(0.0)).unwrap()[0], 0.0);
        assert_eq!(g.flux(&s(1.0), &s(-3.0)).unwrap()[0], 4.5);
        assert_eq!(g.flux(&s(-2.0), &s(-1.0)).unwrap()[0], 0.5);
    }

    #[test]
    fn linsys_examples() {
        let sys = LinearSystem::new(Matrix::<2>::new(1.0, 0.0, 0.0, -1.0)).unwrap();
        let f = LinsysExact::new(sys.decomposition());
        let h = f
            .flux(&Vector::<2>::new(1.0, 2.0), &Vector::<2>::new(3.0, 4.0))
            .unwrap();
        assert!((h - Vector::<2>::new(1.0, -4.0)).amax() < 1e-14);

        let sys = LinearSystem::three_wave();
        let f = LinsysExact::new(sys.decomposition());
        assert!((f.a_plus() + f.a_minus() - three_wave_matrix()).amax() < 1e-12);
        let u = Vector::<3>::new(0.3, -1.2, 0.8);
        assert!((f.flux(&u, &u).unwrap() - three_wave_matrix() * u).amax() < 1e-12);
        let e = crate::linalg::real_eigen_decomposition(&(f.a_plus() - f.a_minus())).unwrap();
        assert!(e.lambda.iter().all(|&l| l >= -1e-10));
    }

    #[test]
    fn roe_sod_and_mirror() {
        let roe = Roe::default();
        let l = Vector::<3>::new(1.0, 0.0, 2.5);
        let r = Vector::<3>::new(0.125, 0.0, 0.25);
        assert!(roe.flux(&l, &r).unwrap()[0] > 0.0);
        let a = Primitive::new(0.8, 0.6, 1.3).to_conserved(GAMMA);
        let b = Primitive::new(0.8, -0.6, 1.3).to_conserved(GAMMA);
        assert!(roe.flux(&a, &b).unwrap()[0].abs() < 1e-14);
        assert!((roe.flux(&a, &a).unwrap() - roe.euler.flux(&a)).amax() < 1e-13);
        let bad = Vector::<3>::new(1.0, 3.0, 1.0);
        assert!(matches!(roe.flux(&bad, &l), Err(Error::Admissibility { .. })));
    }

    #[test]
    fn roe_frozen_matches_finite_differences_nearby() {
        let a = Primitive::new(1.0, 0.3, 1.0).to_conserved(GAMMA);
        let b = Primitive::new(1.00001, 0.30001, 1.00002).to_conserved(GAMMA);
        let frozen = Roe::default().jacobians(&a, &b).unwrap();
        let fd = Roe {
            jacobian: RoeJacobian::FiniteDifference,
            ..Roe::default()
        }
        .jacobians(&a, &b)
        .unwrap();
        assert!((frozen.0 - fd.0).amax() < 1e-4);
        assert!((frozen.1 - fd.1).amax() < 1e-4);
    }

    #[test]
    fn entropy_fix_changes_only_near_sonic() {
        let a = Primitive::new(1.0, 0.0, 1.0).to_conserved(GAMMA);
        let b = Primitive::new(0.9, 0.1, 0.8).to_conserved(GAMMA);
        let plain = Roe::default().flux(&a, &b).unwrap();
        let fixed = Roe {
            entropy_fix: Some(0.1),
            ..Roe::default()
        }
        .flux(&a, &b)
        .unwrap();
        assert!((plain - fixed).amax() > 0.0);
        assert!((plain - fixed).amax() < 0.1);
    }

    fn check_scalar_properties(h: &dyn NumericalFlux<1>, f: impl Fn(f64) -> f64, a: f64, b: f64, theta: f64) {
        let ha = h.flux(&s(a), &s(b)).unwrap()[0];
        assert!((h.flux(&s(a), &s(a)).unwrap()[0] - f(a)).abs() < 1e-12);
        let eps = 1e-6;
        let da = (h.flux(&s(a + eps), &s(b)).unwrap()[0] - h.flux(&s(a - eps), &s(b)).unwrap()[0]) / (2.0 * eps);
        let db = (h.flux(&s(a), &s(b + eps)).unwrap()[0] - h.flux(&s(a), &s(b - eps)).unwrap()[0]) / (2.0 * eps);
        assert!(da >= -1e-10 && db <= 1e-10, "da {da} db {db}");
        let u = a + theta * (b - a);
        assert!((ha - f(u)) * (b - a) <= 1e-12);
    }

    proptest! {
        #[test]
        fn godunov_prerequisites(a in -3.0f64..3.0, b in -3.0f64..3.0, t in 0.0f64..1.0) {
            check_scalar_properties(&GodunovBurgers, |u| Burgers.flux(&s(u))[0], a, b, t);
        }

        #[test]
        fn upwind_prerequisites(a in -3.0f64..3.0, b in -3.0f64..3.0, t in 0.0f64..1.0, beta in -2.0f64..2.0) {
            check_scalar_properties(&Upwind { beta }, |u| beta * u, a, b, t);
        }

        #[test]
        fn godunov_jacobians_match_differences(a in -3.0f64..3.0, b in -3.0f64..3.0) {
            prop_assume!(a.abs() > 1e-3 && b.abs() > 1e-3 && (a + b).abs() > 1e-3);
            let (ja, jb) = GodunovBurgers.jacobians(&s(a), &s(b)).unwrap();
            let eps = 1e-7;
            let g = GodunovBurgers;
            let da = (g.flux(&s(a + eps), &s(b)).unwrap()[0] - g.flux(&s(a - eps), &s(b)).unwrap()[0]) / (2.0 * eps);
            let db = (g.flux(&s(a), &s(b + eps)).unwrap()[0] - g.flux(&s(a), &s(b - eps)).unwrap()[0]) / (2.0 * eps);
            prop_assert!((ja[0] - da).abs() < 1e-6 && (jb[0] - db).abs() < 1e-6);
        }
    }
}
