//! Explicit SSP Runge–Kutta time stepping with the cut-cell CFL rule.

use crate::basis::DgState;
use crate::error::{Error, Result};
use crate::limiter::Limiter;
use crate::spatial::SpatialOperator;

/// `Δt = ν h / ((2p + 1) λ_max)` with `h` the background spacing.
pub fn timestep_length(p: usize, nu: f64, h: f64, lambda_max: f64) -> Result<f64> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::DegenerateSpeed(lambda_max));
    }
    Ok(nu * h / ((2 * p + 1) as f64 * lambda_max))
}

/// SSP Runge–Kutta scheme in Shu–Osher form,
/// `u⁽ⁱ⁾ = Σ_k a_ik u⁽ᵏ⁾ + Δt b_ik L(u⁽ᵏ⁾)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SspRk {
    order: usize,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

impl SspRk {
    pub fn new(order: usize) -> Result<Self> {
        let (a, b): (Vec<Vec<f64>>, Vec<Vec<f64>>) = match order {
            1 => (vec![vec![1.0]], vec![vec![1.0]]),
            2 => (
                vec![vec![1.0], vec![0.5, 0.5]],
                vec![vec![1.0], vec![0.0, 0.5]],
            ),
            3 => (
                vec![vec![1.0], vec![0.75, 0.25], vec![1.0 / 3.0, 0.0, 2.0 / 3.0]],
                vec![vec![1.0], vec![0.0, 0.25], vec![0.0, 0.0, 2.0 / 3.0]],
            ),
            4 => (
                vec![
                    vec![1.0],
                    vec![0.444370493651235, 0.555629506348765],
                    vec![0.620101851488403, 0.0, 0.379898148511597],
                    vec![0.178079954393132, 0.0, 0.0, 0.821920045606868],
                    vec![0.0, 0.0, 0.517231671970585, 0.096059710526147, 0.386708617503269],
                ],
                vec![
                    vec![0.391752226571890],
                    vec![0.0, 0.368410593050371],
                    vec![0.0, 0.0, 0.251891774271694],
                    vec![0.0, 0.0, 0.0, 0.544974750228521],
                    vec![0.0, 0.0, 0.0, 0.063692468666290, 0.226007483236906],
                ],
            ),
            _ => {
                return Err(Error::Unsupported(format!(
                    "SSP Runge-Kutta order {order}"
                )))
            }
        };
        Ok(Self { order, a, b })
    }

    /// Order `p + 1`, capped at four.
    pub fn for_degree(p: usize) -> Self {
        Self::new((p + 1).min(4)).expect("orders 1 to 4 exist")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn stages(&self) -> usize {
        self.a.len()
    }

    /// Advance `u` from `t` by `dt`; `post_stage` runs on every stage value.
    pub fn step<F, G>(&self, u: &mut [f64], t: f64, dt: f64, mut rhs: F, mut post_stage: G) -> Result<()>
    where
        F: FnMut(&[f64], f64, &mut [f64]) -> Result<()>,
        G: FnMut(&mut [f64]) -> Result<()>,
    {
        let n = u.len();
        let s = self.stages();
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(s + 1);
        let mut rates: Vec<Vec<f64>> = Vec::with_capacity(s);
        let mut times = Vec::with_capacity(s + 1);
        values.push(u.to_vec());
        times.push(t);
        for i in 0..s {
            let mut rate = vec![0.0; n];
            rhs(&values[i], times[i], &mut rate)?;
            rates.push(rate);
            let mut next = vec![0.0; n];
            let mut tn = 0.0;
            for k in 0..=i {
                let (ak, bk) = (self.a[i][k], self.b[i][k]);
                if ak != 0.0 {
                    for (x, v) in next.iter_mut().zip(&values[k]) {
                        *x += ak * v;
                    }
                }
                if bk != 0.0 {
                    let c = bk * dt;
                    for (x, r) in next.iter_mut().zip(&rates[k]) {
                        *x += c * r;
                    }
                }
                tn += ak * times[k] + bk * dt;
            }
            post_stage(&mut next)?;
            values.push(next);
            times.push(tn);
        }
        u.copy_from_slice(&values[s]);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchOptions {
    pub nu: f64,
    pub t_final: f64,
    /// Runge–Kutta order; `None` means `p + 1`.
    pub order: Option<usize>,
    /// Use this step instead of the CFL rule (the last step is still clipped).
    pub fixed_dt: Option<f64>,
    pub max_steps: Option<usize>,
}

impl MarchOptions {
    pub fn new(nu: f64, t_final: f64) -> Self {
        Self {
            nu,
            t_final,
            order: None,
            fixed_dt: None,
            max_steps: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchStats {
    pub steps: usize,
    pub stages: usize,
    pub time: f64,
    pub min_dt: f64,
}

/// Advance `u` from `t0` to `opts.t_final`.
///
/// `on_step` is called after every completed step with the step count, time and state.
pub fn advance<const M: usize>(
    u: &mut DgState<M>,
    op: &SpatialOperator<M>,
    limiter: Option<&Limiter<M>>,
    t0: f64,
    opts: &MarchOptions,
    mut on_step: impl FnMut(usize, f64, &DgState<M>),
) -> Result<MarchStats> {
    let p = u.degree();
    let rk = match opts.order {
        Some(o) => SspRk::new(o)?,
        None => SspRk::for_degree(p),
    };
    let h = op.space().mesh().h();
    let (n_cells, t_final) = (u.n_cells(), opts.t_final);
    let mut stats = MarchStats {
        steps: 0,
        stages: 0,
        time: t0,
        min_dt: f64::INFINITY,
    };
    if t0 >= t_final {
        return Ok(stats);
    }
    if let Some(lim) = limiter {
        lim.apply(u).map_err(|e| wrap(e, 0, t0))?;
    }
    let mut t = t0;
    while t < t_final {
        if opts.max_steps.is_some_and(|m| stats.steps >= m) {
            break;
        }
        let step = stats.steps + 1;
        let mut dt = match opts.fixed_dt {
            Some(dt) => dt,
            None => timestep_length(p, opts.nu, h, op.max_wave_speed(u)).map_err(|e| wrap(e, step, t))?,
        };
        if t + dt >= t_final - 1e-14 * t_final.abs().max(1.0) {
            dt = t_final - t;
        }
        let result = rk.step(
            u.as_mut_slice(),
            t,
            dt,
            |v, tt, out| op.rhs(&DgState::from_coeffs(n_cells, p, v.to_vec()), tt, out),
            |v| match limiter {
                Some(lim) => {
                    let mut s = DgState::from_coeffs(n_cells, p, v.to_vec());
                    lim.apply(&mut s)?;
                    v.copy_from_slice(s.as_slice());
                    Ok(())
                }
                None => Ok(()),
            },
        );
        result.map_err(|e| wrap(e, step, t))?;
        if !u.is_finite() {
            return Err(Error::NonFinite { step, time: t + dt });
        }
        t = if dt == t_final - t { t_final } else { t + dt };
        stats.steps = step;
        stats.stages += rk.stages();
        stats.time = t;
        stats.min_dt = stats.min_dt.min(dt);
        on_step(step, t, u);
    }
    Ok(stats)
}

fn wrap(e: Error, step: usize, time: f64) -> Error {
    Error::Step {
        step,
        time,
        source: Box::new(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestep_examples() {
        assert!((timestep_length(1, 0.4, 0.01, 2.0).unwrap() - 6.666_666_666_666_667e-4).abs() < 1e-15);
        assert!((timestep_length(0, 0.4, 0.01, 1.0).unwrap() - 4e-3).abs() < 1e-16);
        assert!(matches!(timestep_length(0, 0.4, 0.01, 0.0), Err(Error::DegenerateSpeed(_))));
    }

    #[test]
    fn weights_are_nonnegative_and_consistent() {
        for order in 1..=4 {
            let rk = SspRk::new(order).unwrap();
            for (a, b) in rk.a.iter().zip(&rk.b) {
                assert!(a.iter().chain(b).all(|&c| c >= 0.0));
                assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            }
        }
        assert!(SspRk::new(5).is_err());
    }

    fn ode_error(order: usize, steps: usize) -> f64 {
        // y' = −y + cos t, y(0) = 1
        let exact = |t: f64| 0.5 * (t.cos() + t.sin()) + 0.5 * (-t).exp();
        let rk = SspRk::new(order).unwrap();
        let dt = 1.0 / steps as f64;
        let mut y = [1.0];
        let mut t = 0.0;
        for _ in 0..steps {
            rk.step(&mut y, t, dt, |v, tt, out| {
                out[0] = -v[0] + tt.cos();
                Ok(())
            }, |_| Ok(()))
            .unwrap();
            t += dt;
        }
        (y[0] - exact(1.0)).abs()
    }

    #[test]
    fn observed_temporal_orders() {
        for order in 1..=4 {
            let rate = (ode_error(order, 20) / ode_error(order, 40)).log2();
            assert!((rate - order as f64).abs() < 0.2, "order {order}: rate {rate}");
        }
    }
}
