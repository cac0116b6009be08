use super::{ConservationLaw, ADMISSIBILITY_FLOOR};
use crate::error::{Error, Result};
use crate::linalg::{EigenDecomposition, Matrix, Vector};

/// Ratio of specific heats used throughout.
pub const GAMMA: f64 = 1.4;

/// How the intermediate state for the flow-direction matrices is built.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EulerAverage {
    /// Roe-averaged velocity and enthalpy with `ρ̂ = √(ρₗρᵣ)`; reproduces `u` for `(u, u)`.
    #[default]
    Roe,
    /// `½(√ρₗ+√ρᵣ, √ρₗvₗ+√ρᵣvᵣ, √ρₗHₗ+√ρᵣHᵣ)` read as a conserved vector.
    Literal,
}

/// Compressible Euler equations with an ideal-gas law, `u = (ρ, ρv, E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler {
    pub gamma: f64,
    pub average: EulerAverage,
}

impl Default for Euler {
    fn default() -> Self {
        Self {
            gamma: GAMMA,
            average: EulerAverage::Roe,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub v: f64,
    pub p: f64,
}

impl Primitive {
    pub fn new(rho: f64, v: f64, p: f64) -> Self {
        Self { rho, v, p }
    }

    pub fn from_conserved(u: &Vector<3>, gamma: f64) -> Self {
        let rho = u[0];
        let v = u[1] / rho;
        let p = (gamma - 1.0) * (u[2] - 0.5 * rho * v * v);
        Self { rho, v, p }
    }

    pub fn to_conserved(&self, gamma: f64) -> Vector<3> {
        Vector::<3>::new(
            self.rho,
            self.rho * self.v,
            self.p / (gamma - 1.0) + 0.5 * self.rho * self.v * self.v,
        )
    }

    pub fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p.max(0.0) / self.rho).sqrt()
    }

    /// Total specific enthalpy `H = (E + p)/ρ`.
    pub fn enthalpy(&self, gamma: f64) -> f64 {
        gamma / (gamma - 1.0) * self.p / self.rho + 0.5 * self.v * self.v
    }

    pub fn check(&self) -> Result<()> {
        if !(self.rho > ADMISSIBILITY_FLOOR) {
            return Err(Error::Admissibility {
                quantity: "density",
                value: self.rho,
                cell: None,
                time: None,
            });
        }
        if !(self.p > ADMISSIBILITY_FLOOR) {
            return Err(Error::Admissibility {
                quantity: "pressure",
                value: self.p,
                cell: None,
                time: None,
            });
        }
        Ok(())
    }
}

/// Euler flux `(ρv, ρv² + p, (E + p)v)` of an admissible conserved state.
pub fn euler_flux(u: &Vector<3>, gamma: f64) -> Result<Vector<3>> {
    let w = Primitive::from_conserved(u, gamma);
    w.check()?;
    Ok(flux_unchecked(u, &w))
}

fn flux_unchecked(u: &Vector<3>, w: &Primitive) -> Vector<3> {
    Vector::<3>::new(u[1], u[1] * w.v + w.p, (u[2] + w.p) * w.v)
}

/// Flux Jacobian; it depends on the state only through `v` and `H`.
pub fn euler_jacobian_from_vh(v: f64, h: f64, gamma: f64) -> Matrix<3> {
    let g1 = gamma - 1.0;
    Matrix::<3>::new(
        0.0,
        1.0,
        0.0,
        0.5 * (gamma - 3.0) * v * v,
        (3.0 - gamma) * v,
        g1,
        v * (0.5 * g1 * v * v - h),
        h - g1 * v * v,
        gamma * v,
    )
}

/// Closed-form eigenstructure with λ = (v − c, v, v + c).
pub fn euler_eigen_from_roe_state(v: f64, h: f64, c: f64, gamma: f64) -> EigenDecomposition<3> {
    let q = Matrix::<3>::new(
        1.0,
        1.0,
        1.0,
        v - c,
        v,
        v + c,
        h - v * c,
        0.5 * v * v,
        h + v * c,
    );
    let b1 = (gamma - 1.0) / (c * c);
    let b2 = 0.5 * b1 * v * v;
    let q_inv = Matrix::<3>::new(
        0.5 * (b2 + v / c),
        -0.5 * (b1 * v + 1.0 / c),
        0.5 * b1,
        1.0 - b2,
        b1 * v,
        -b1,
        0.5 * (b2 - v / c),
        -0.5 * (b1 * v - 1.0 / c),
        0.5 * b1,
    );
    EigenDecomposition {
        q,
        lambda: Vector::<3>::new(v - c, v, v + c),
        q_inv,
    }
}

impl Euler {
    pub fn primitive(&self, u: &Vector<3>) -> Primitive {
        Primitive::from_conserved(u, self.gamma)
    }

    /// Conventional Roe average, returned as a conserved state.
    pub fn roe_average(&self, a: &Vector<3>, b: &Vector<3>) -> Result<Vector<3>> {
        let wa = self.primitive(a);
        let wb = self.primitive(b);
        wa.check()?;
        wb.check()?;
        let (sa, sb) = (wa.rho.sqrt(), wb.rho.sqrt());
        let v = (sa * wa.v + sb * wb.v) / (sa + sb);
        let h = (sa * wa.enthalpy(self.gamma) + sb * wb.enthalpy(self.gamma)) / (sa + sb);
        let rho = sa * sb;
        let p = (self.gamma - 1.0) / self.gamma * rho * (h - 0.5 * v * v);
        Ok(Primitive::new(rho, v, p).to_conserved(self.gamma))
    }

    fn literal_average(&self, a: &Vector<3>, b: &Vector<3>) -> Result<Vector<3>> {
        let wa = self.primitive(a);
        let wb = self.primitive(b);
        wa.check()?;
        wb.check()?;
        let (sa, sb) = (wa.rho.sqrt(), wb.rho.sqrt());
        let u = Vector::<3>::new(
            sa + sb,
            sa * wa.v + sb * wb.v,
            sa * wa.enthalpy(self.gamma) + sb * wb.enthalpy(self.gamma),
        ) * 0.5;
        self.primitive(&u).check()?;
        Ok(u)
    }
}

impl ConservationLaw<3> for Euler {
    fn name(&self) -> &'static str {
        "euler"
    }

    fn flux(&self, u: &Vector<3>) -> Vector<3> {
        flux_unchecked(u, &self.primitive(u))
    }

    fn jacobian(&self, u: &Vector<3>) -> Matrix<3> {
        let w = self.primitive(u);
        euler_jacobian_from_vh(w.v, w.enthalpy(self.gamma), self.gamma)
    }

    fn eigen(&self, u: &Vector<3>) -> Result<EigenDecomposition<3>> {
        let w = self.primitive(u);
        w.check()?;
        Ok(euler_eigen_from_roe_state(
            w.v,
            w.enthalpy(self.gamma),
            w.sound_speed(self.gamma),
            self.gamma,
        ))
    }

    fn max_wave_speed(&self, u: &Vector<3>) -> f64 {
        let w = self.primitive(u);
        w.v.abs() + w.sound_speed(self.gamma)
    }

    fn check_admissible(&self, u: &Vector<3>) -> Result<()> {
        self.primitive(u).check()
    }

    fn averaged_state(&self, a: &Vector<3>, b: &Vector<3>) -> Result<Vector<3>> {
        match self.average {
            EulerAverage::Roe => self.roe_average(a, b),
            EulerAverage::Literal => self.literal_average(a, b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Vector<3>, b: &Vector<3>, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    #[test]
    fn sod_states_flux() {
        let f = euler_flux(&Vector::<3>::new(1.0, 0.0, 2.5), GAMMA).unwrap();
        assert!(close(&f, &Vector::<3>::new(0.0, 1.0, 0.0), 1e-15));
        let f = euler_flux(&Vector::<3>::new(0.125, 0.0, 0.25), GAMMA).unwrap();
        assert!(close(&f, &Vector::<3>::new(0.0, 0.1, 0.0), 1e-15));
    }

    #[test]
    fn moving_state_flux() {
        let f = euler_flux(&Vector::<3>::new(1.0, 1.0, 2.5), GAMMA).unwrap();
        assert!(close(&f, &Vector::<3>::new(1.0, 1.8, 3.3), 1e-14));
    }

    #[test]
    fn rejects_negative_pressure_and_density() {
        let err = euler_flux(&Vector::<3>::new(1.0, 3.0, 1.0), GAMMA).unwrap_err();
        assert!(matches!(err, Error::Admissibility { quantity: "pressure", .. }));
        let err = euler_flux(&Vector::<3>::new(-1.0, 0.0, 1.0), GAMMA).unwrap_err();
        assert!(matches!(err, Error::Admissibility { quantity: "density", .. }));
    }

    #[test]
    fn primitive_round_trip() {
        let w = Primitive::new(2.0, 0.0, 3.0);
        let u = w.to_conserved(GAMMA);
        assert!(close(&u, &Vector::<3>::new(2.0, 0.0, 7.5), 1e-14));
    }

    #[test]
    fn eigenvectors_invert() {
        let e = Euler::default();
        let u = Primitive::new(0.7, -0.3, 1.9).to_conserved(GAMMA);
        let eig = e.eigen(&u).unwrap();
        assert!((eig.q * eig.q_inv - Matrix::<3>::identity()).amax() < 1e-13);
        assert!((eig.reconstruct() - e.jacobian(&u)).amax() < 1e-12);
    }

    #[test]
    fn roe_average_is_consistent_literal_is_not() {
        let u = Primitive::new(1.3, 0.4, 0.9).to_conserved(GAMMA);
        let roe = Euler::default();
        assert!(close(&roe.averaged_state(&u, &u).unwrap(), &u, 1e-13));
        let lit = Euler {
            average: EulerAverage::Literal,
            ..Euler::default()
        };
        let avg = lit.averaged_state(&u, &u).unwrap();
        assert!(!close(&avg, &u, 1e-3));
    }
}
