//! Domain-of-dependence stabilization of small cut cells.
//!
//! For every cut pair `(k − 1, k₁, k₂)` with `α < ν` two penalty terms are
//! added to the weak form:
//!
//! * an edge term at `x_{k−½}` and `x_cut` that replaces the standard fluxes
//!   by the flux `H(u_{k−1}, u_{k₂})` coupling the two neighbours directly,
//! * a volume term on `k₁` that acts on the derivatives of the test functions
//!   of all three cells, with polynomials of the neighbours extended into `k₁`.
//!
//! Inside `k₁` all three polynomials are evaluated through relative reference
//! coordinates, so no precision is lost when `k₁` is many orders of magnitude
//! smaller than its neighbours.

use crate::basis::{basis_derivatives, basis_values, trace_value, DgState, Quadrature};
use crate::equations::ConservationLaw;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::mesh::CutCellMesh;
use crate::riemann::NumericalFlux;

/// `η = max(1 − α/ν, 0)`.
pub fn compute_eta(alpha: f64, nu: f64) -> f64 {
    (1.0 - alpha / nu).max(0.0)
}

/// Geometry of one stabilized cut pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    pub left: usize,
    pub small: usize,
    pub large: usize,
    pub alpha: f64,
    pub eta: f64,
    pub len_left: f64,
    pub len_small: f64,
    pub len_large: f64,
}

impl PairGeometry {
    /// Reference coordinate in the left neighbour of the point with reference
    /// coordinate `s` in the small cell.
    pub fn xi_left(&self, s: f64) -> f64 {
        1.0 + (1.0 + s) * self.len_small / self.len_left
    }

    /// Reference coordinate in the large cut cell of the point `s` in the small cell.
    pub fn xi_large(&self, s: f64) -> f64 {
        -1.0 - (1.0 - s) * self.len_small / self.len_large
    }
}

/// Pairs that receive stabilization for CFL number `nu`, i.e. those with `α < ν`.
pub fn stabilized_pairs(mesh: &CutCellMesh, nu: f64) -> Vec<PairGeometry> {
    mesh.cut_pairs()
        .iter()
        .filter(|p| p.alpha < nu)
        .map(|p| PairGeometry {
            left: p.left_neighbor,
            small: p.small,
            large: p.large,
            alpha: p.alpha,
            eta: compute_eta(p.alpha, nu),
            len_left: mesh.cell(p.left_neighbor).length,
            len_small: mesh.cell(p.small).length,
            len_large: mesh.cell(p.large).length,
        })
        .collect()
}

/// State-dependent data of one stabilized small cell.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationRecord<const M: usize> {
    pub left: usize,
    pub small: usize,
    pub large: usize,
    pub eta: f64,
    pub l: Matrix<M>,
    pub r: Matrix<M>,
}

impl<const M: usize> StabilizationRecord<M> {
    /// The direction weight of the left neighbour, small cell and large cell.
    pub fn k(&self) -> [Matrix<M>; 3] {
        [self.l, -Matrix::<M>::identity(), self.r]
    }
}

fn split_weight(lambda: f64, positive: bool) -> f64 {
    if lambda == 0.0 {
        0.5
    } else if (lambda > 0.0) == positive {
        1.0
    } else {
        0.0
    }
}

/// `(L, R) = (Q I⁺ Q⁻¹, Q I⁻ Q⁻¹)` from the eigenstructure of `f_u` at the
/// averaged state of the two neighbour values.
pub fn direction_matrices<const M: usize>(
    equation: &dyn ConservationLaw<M>,
    u_left: &Vector<M>,
    u_large: &Vector<M>,
) -> Result<(Matrix<M>, Matrix<M>)> {
    let avg = equation.averaged_state(u_left, u_large)?;
    let eig = equation.eigen(&avg)?;
    Ok((
        eig.map(|l| split_weight(l, true)),
        eig.map(|l| split_weight(l, false)),
    ))
}

/// Build the record for a pair, deciding the flow direction at the centroid of `k₁`.
pub fn stabilization_record<const M: usize>(
    u: &DgState<M>,
    geom: &PairGeometry,
    equation: &dyn ConservationLaw<M>,
) -> Result<StabilizationRecord<M>> {
    let a = u.eval_ref(geom.left, geom.xi_left(0.0));
    let b = u.eval_ref(geom.large, geom.xi_large(0.0));
    let (l, r) = direction_matrices(equation, &a, &b)?;
    Ok(StabilizationRecord {
        left: geom.left,
        small: geom.small,
        large: geom.large,
        eta: geom.eta,
        l,
        r,
    })
}

/// Which part of the volume penalty to assemble.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeVariant {
    /// All three term groups.
    #[default]
    Full,
    /// Only the flux-difference group; the earlier formulation for linear advection.
    Legacy,
}

impl std::str::FromStr for VolumeVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "legacy" => Ok(Self::Legacy),
            other => Err(Error::Config(format!("unknown variant '{other}'"))),
        }
    }
}

/// Everything the penalty assembly needs besides the state.
pub struct PenaltyContext<'a, const M: usize> {
    pub equation: &'a dyn ConservationLaw<M>,
    pub flux: &'a dyn NumericalFlux<M>,
    pub quadrature: &'a Quadrature,
    /// Split the integral over `k₁` at kinks of the numerical flux.
    pub kink_aware: bool,
}

fn add_scaled<const M: usize>(
    out: &mut [f64],
    u: &DgState<M>,
    j: usize,
    v: &Vector<M>,
    weights: &[f64],
    scale: f64,
) {
    for l in 0..M {
        let s = scale * v[l];
        if s == 0.0 {
            continue;
        }
        for (i, w) in weights.iter().enumerate() {
            out[u.index(j, l, i)] += s * w;
        }
    }
}

/// Edge penalty: contributions to the residual at `x_{k−½}` and `x_cut`.
pub fn j0_edge_penalty<const M: usize>(
    u: &DgState<M>,
    geom: &PairGeometry,
    flux: &dyn NumericalFlux<M>,
    out: &mut [f64],
) -> Result<()> {
    if geom.eta == 0.0 {
        return Ok(());
    }
    let modes = u.modes();
    let right: Vec<f64> = (0..modes).map(|i| trace_value(i, true)).collect();
    let left: Vec<f64> = (0..modes).map(|i| trace_value(i, false)).collect();

    // x_{k−½}
    let a = u.eval_ref(geom.left, 1.0);
    let c = u.eval_ref(geom.small, -1.0);
    let b = u.eval_ref(geom.large, geom.xi_large(-1.0));
    let d = (flux.flux(&a, &b)? - flux.flux(&a, &c)?) * geom.eta;
    add_scaled(out, u, geom.left, &d, &right, 1.0);
    add_scaled(out, u, geom.small, &d, &left, -1.0);

    // x_cut
    let a = u.eval_ref(geom.left, geom.xi_left(1.0));
    let c = u.eval_ref(geom.small, 1.0);
    let b = u.eval_ref(geom.large, -1.0);
    let d = (flux.flux(&a, &b)? - flux.flux(&c, &b)?) * geom.eta;
    add_scaled(out, u, geom.small, &d, &right, 1.0);
    add_scaled(out, u, geom.large, &d, &left, -1.0);
    Ok(())
}

/// Sub-intervals of `[−1, 1]` (reference coordinate of `k₁`) on which the
/// numerical flux between the extended neighbours is smooth.
pub fn smooth_pieces<const M: usize>(
    u: &DgState<M>,
    geom: &PairGeometry,
    flux: &dyn NumericalFlux<M>,
) -> Vec<(f64, f64)> {
    let switches = |s: f64, out: &mut Vec<f64>| {
        out.clear();
        let a = u.eval_ref(geom.left, geom.xi_left(s));
        let b = u.eval_ref(geom.large, geom.xi_large(s));
        flux.switch_functions(&a, &b, out);
    };
    let mut buf = Vec::new();
    switches(0.0, &mut buf);
    if buf.is_empty() {
        return vec![(-1.0, 1.0)];
    }
    let n_fn = buf.len();
    let n_samples = 4 * u.modes() + 1;
    let samples: Vec<f64> = (0..n_samples)
        .map(|k| -1.0 + 2.0 * k as f64 / (n_samples - 1) as f64)
        .collect();
    let values: Vec<Vec<f64>> = samples
        .iter()
        .map(|&s| {
            let mut v = Vec::with_capacity(n_fn);
            switches(s, &mut v);
            v
        })
        .collect();

    let mut breaks = Vec::new();
    for f in 0..n_fn {
        for k in 0..n_samples - 1 {
            let (v0, v1) = (values[k][f], values[k + 1][f]);
            if k > 0 && v0 == 0.0 {
                breaks.push(samples[k]);
            }
            if v0 * v1 < 0.0 {
                let (mut lo, mut hi) = (samples[k], samples[k + 1]);
                let mut vlo = v0;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    switches(mid, &mut buf);
                    let vm = buf[f];
                    if vm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if (vm < 0.0) == (vlo < 0.0) {
                        lo = mid;
                        vlo = vm;
                    } else {
                        hi = mid;
                    }
                }
                breaks.push(0.5 * (lo + hi));
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
    let mut pieces = Vec::with_capacity(breaks.len() + 1);
    let mut start = -1.0;
    for b in breaks {
        if b > start && b < 1.0 {
            pieces.push((start, b));
            start = b;
        }
    }
    pieces.push((start, 1.0));
    pieces
}

/// Volume penalty: contributions on the three cells from integrals over `k₁`.
pub fn j1_volume_penalty<const M: usize>(
    u: &DgState<M>,
    geom: &PairGeometry,
    record: &StabilizationRecord<M>,
    ctx: &PenaltyContext<'_, M>,
    variant: VolumeVariant,
    out: &mut [f64],
) -> Result<()> {
    let modes = u.modes();
    if geom.eta == 0.0 || modes == 1 {
        return Ok(());
    }
    let pieces = if ctx.kink_aware {
        smooth_pieces(u, geom, ctx.flux)
    } else {
        vec![(-1.0, 1.0)]
    };
    let k = record.k();
    let cells = [geom.left, geom.small, geom.large];
    let ratio = [
        geom.len_small / geom.len_left,
        1.0,
        geom.len_small / geom.len_large,
    ];
    let mut phi = [0.0; 16];
    let mut dphi = [[0.0; 16]; 3];
    let quad = ctx.quadrature;
    for (s0, s1) in pieces {
        let (mid, half) = (0.5 * (s0 + s1), 0.5 * (s1 - s0));
        for (&node, &weight) in quad.nodes.iter().zip(&quad.weights) {
            let s = mid + half * node;
            let w = geom.eta * half * weight;
            let xi = [geom.xi_left(s), s, geom.xi_large(s)];
            let mut vals = [Vector::<M>::zeros(); 3];
            for n in 0..3 {
                basis_values(xi[n], &mut phi[..modes]);
                basis_derivatives(xi[n], &mut dphi[n][..modes]);
                vals[n] = u.combine(cells[n], &phi[..modes]);
            }
            let (a, c, b) = (vals[0], vals[1], vals[2]);
            let h = ctx.flux.flux(&a, &b)?;
            for n in 0..3 {
                let f = k[n] * (h - ctx.equation.flux(&vals[n]));
                add_scaled(out, u, cells[n], &f, &dphi[n][..modes], w * ratio[n]);
            }
            if variant == VolumeVariant::Full {
                let (ha, hb) = ctx.flux.jacobians(&a, &b)?;
                let ga = record.l * (ha * a) - ha * c + record.r * (ha * b);
                let gb = record.l * (hb * a) - hb * c + record.r * (hb * b);
                add_scaled(out, u, geom.left, &ga, &dphi[0][..modes], w * ratio[0]);
                add_scaled(out, u, geom.large, &gb, &dphi[2][..modes], w * ratio[2]);
            }
        }
    }
    Ok(())
}

/// The earlier volume penalty for linear advection with the upwind flux.
pub fn legacy_j1_advection(
    u: &DgState<1>,
    geom: &PairGeometry,
    record: &StabilizationRecord<1>,
    ctx: &PenaltyContext<'_, 1>,
    out: &mut [f64],
) -> Result<()> {
    check_legacy_support(ctx.equation.name(), ctx.flux.name())?;
    j1_volume_penalty(u, geom, record, ctx, VolumeVariant::Legacy, out)
}

pub(crate) fn check_legacy_support(equation: &str, flux: &str) -> Result<()> {
    if equation != "advection" || flux != "upwind" {
        return Err(Error::Unsupported(format!(
            "the legacy volume penalty is defined for advection with the upwind flux, not {equation}/{flux}"
        )));
    }
    Ok(())
}
