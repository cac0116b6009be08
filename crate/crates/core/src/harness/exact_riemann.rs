//! Exact solution of the Riemann problem for the ideal-gas Euler equations.

use crate::equations::Primitive;
use crate::error::{Error, Result};

/// Self-similar solution of a Riemann problem, found by Newton iteration on
/// the star-region pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRiemann {
    pub left: Primitive,
    pub right: Primitive,
    pub gamma: f64,
    p_star: f64,
    v_star: f64,
}

impl ExactRiemann {
    pub fn new(left: Primitive, right: Primitive, gamma: f64) -> Result<Self> {
        left.check()?;
        right.check()?;
        let (cl, cr) = (left.sound_speed(gamma), right.sound_speed(gamma));
        if 2.0 * (cl + cr) / (gamma - 1.0) <= right.v - left.v {
            return Err(Error::Domain("initial states generate a vacuum".into()));
        }
        let mut s = Self {
            left,
            right,
            gamma,
            p_star: 0.0,
            v_star: 0.0,
        };
        let dv = right.v - left.v;
        let pv = 0.5 * (left.p + right.p) - 0.125 * dv * (left.rho + right.rho) * (cl + cr);
        let mut p = pv.max(1e-8);
        for _ in 0..100 {
            let (fl, dfl) = s.wave_function(&left, p);
            let (fr, dfr) = s.wave_function(&right, p);
            let next = (p - (fl + fr + dv) / (dfl + dfr)).max(1e-12);
            let change = 2.0 * (next - p).abs() / (next + p);
            p = next;
            if change < 1e-15 {
                break;
            }
        }
        let (fl, _) = s.wave_function(&left, p);
        let (fr, _) = s.wave_function(&right, p);
        s.p_star = p;
        s.v_star = 0.5 * (left.v + right.v) + 0.5 * (fr - fl);
        Ok(s)
    }

    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    pub fn v_star(&self) -> f64 {
        self.v_star
    }

    /// Pressure jump across one wave and its derivative in `p`.
    fn wave_function(&self, k: &Primitive, p: f64) -> (f64, f64) {
        let g = self.gamma;
        if p > k.p {
            let a = 2.0 / ((g + 1.0) * k.rho);
            let b = (g - 1.0) / (g + 1.0) * k.p;
            let q = (a / (p + b)).sqrt();
            ((p - k.p) * q, q * (1.0 - 0.5 * (p - k.p) / (p + b)))
        } else {
            let c = k.sound_speed(g);
            let r = p / k.p;
            (
                2.0 * c / (g - 1.0) * (r.powf((g - 1.0) / (2.0 * g)) - 1.0),
                r.powf(-(g + 1.0) / (2.0 * g)) / (k.rho * c),
            )
        }
    }

    /// State at similarity coordinate `s = (x − x₀) / t`.
    pub fn sample(&self, s: f64) -> Primitive {
        let g = self.gamma;
        let (ps, vs) = (self.p_star, self.v_star);
        if s <= vs {
            let k = &self.left;
            let c = k.sound_speed(g);
            if ps > k.p {
                let r = ps / k.p;
                let speed = k.v - c * ((g + 1.0) / (2.0 * g) * r + (g - 1.0) / (2.0 * g)).sqrt();
                if s <= speed {
                    *k
                } else {
                    Primitive::new(k.rho * shock_density_ratio(r, g), vs, ps)
                }
            } else {
                let c_star = c * (ps / k.p).powf((g - 1.0) / (2.0 * g));
                if s <= k.v - c {
                    *k
                } else if s >= vs - c_star {
                    Primitive::new(k.rho * (ps / k.p).powf(1.0 / g), vs, ps)
                } else {
                    fan(k, c, s, g, 1.0)
                }
            }
        } else {
            let k = &self.right;
            let c = k.sound_speed(g);
            if ps > k.p {
                let r = ps / k.p;
                let speed = k.v + c * ((g + 1.0) / (2.0 * g) * r + (g - 1.0) / (2.0 * g)).sqrt();
                if s >= speed {
                    *k
                } else {
                    Primitive::new(k.rho * shock_density_ratio(r, g), vs, ps)
                }
            } else {
                let c_star = c * (ps / k.p).powf((g - 1.0) / (2.0 * g));
                if s >= k.v + c {
                    *k
                } else if s <= vs + c_star {
                    Primitive::new(k.rho * (ps / k.p).powf(1.0 / g), vs, ps)
                } else {
                    fan(k, c, s, g, -1.0)
                }
            }
        }
    }
}

fn shock_density_ratio(r: f64, g: f64) -> f64 {
    let q = (g - 1.0) / (g + 1.0);
    (r + q) / (q * r + 1.0)
}

/// Inside a rarefaction fan; `side` is `+1` for a left fan, `−1` for a right one.
fn fan(k: &Primitive, c: f64, s: f64, g: f64, side: f64) -> Primitive {
    let base = 2.0 / (g + 1.0) + side * (g - 1.0) / ((g + 1.0) * c) * (k.v - s);
    let rho = k.rho * base.powf(2.0 / (g - 1.0));
    let v = 2.0 / (g + 1.0) * (side * c + (g - 1.0) / 2.0 * k.v + s);
    let p = k.p * base.powf(2.0 * g / (g - 1.0));
    Primitive::new(rho, v, p)
}

/// Sod's states: `(ρ, v, p) = (1, 0, 1)` on the left, `(0.125, 0, 0.1)` on the right.
pub fn sod_states() -> (Primitive, Primitive) {
    (Primitive::new(1.0, 0.0, 1.0), Primitive::new(0.125, 0.0, 0.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::GAMMA;

    fn sod() -> ExactRiemann {
        let (l, r) = sod_states();
        ExactRiemann::new(l, r, GAMMA).unwrap()
    }

    #[test]
    fn sod_star_state() {
        let s = sod();
        assert!((s.p_star() - 0.30313).abs() < 1e-4);
        assert!((s.v_star() - 0.92745).abs() < 1e-4);
    }

    #[test]
    fn star_pressure_balances_both_waves() {
        let s = sod();
        let (fl, _) = s.wave_function(&s.left, s.p_star());
        let (fr, _) = s.wave_function(&s.right, s.p_star());
        assert!((fl + fr + s.right.v - s.left.v).abs() < 1e-14);
    }

    #[test]
    fn sod_structure_at_final_time() {
        let s = sod();
        let t = 0.4;
        let at = |x: f64| s.sample(x / t);
        let c_l = s.left.sound_speed(GAMMA);
        // undisturbed states
        assert_eq!(at(-0.9), s.left);
        assert_eq!(at(0.9), s.right);
        // rarefaction head and monotone density inside the fan
        assert_eq!(at(-c_l * t - 1e-9), s.left);
        assert!(at(-0.3).rho < at(-0.4).rho);
        // contact: pressure and velocity continuous, density jumps
        let (a, b) = (at(s.v_star() * t - 1e-6), at(s.v_star() * t + 1e-6));
        assert!((a.p - b.p).abs() < 1e-12 && (a.v - b.v).abs() < 1e-12);
        assert!(a.rho > b.rho + 0.1);
        // shock position from the Rankine–Hugoniot speed
        let m_shock = (b.rho * b.v - s.right.rho * s.right.v) / (b.rho - s.right.rho);
        assert!(at(m_shock * t - 1e-6).p > 0.3 && at(m_shock * t + 1e-6).p == 0.1);
    }

    #[test]
    fn fan_is_continuous_at_both_ends() {
        let s = sod();
        let c_l = s.left.sound_speed(GAMMA);
        let head = fan(&s.left, c_l, -c_l, GAMMA, 1.0);
        assert!((head.rho - 1.0).abs() < 1e-14 && head.v.abs() < 1e-14);
        let c_star = c_l * (s.p_star() / s.left.p).powf((GAMMA - 1.0) / (2.0 * GAMMA));
        let tail = fan(&s.left, c_l, s.v_star() - c_star, GAMMA, 1.0);
        assert!((tail.p - s.p_star()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_collision_has_zero_star_velocity() {
        let l = Primitive::new(1.0, 1.0, 1.0);
        let r = Primitive::new(1.0, -1.0, 1.0);
        let s = ExactRiemann::new(l, r, GAMMA).unwrap();
        assert!(s.v_star().abs() < 1e-14);
        assert!(s.p_star() > 1.0);
    }

    #[test]
    fn vacuum_is_reported() {
        let l = Primitive::new(1.0, -10.0, 0.1);
        let r = Primitive::new(1.0, 10.0, 0.1);
        assert!(matches!(ExactRiemann::new(l, r, GAMMA), Err(Error::Domain(_))));
    }
}
