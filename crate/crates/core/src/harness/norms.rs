//! Discrete error norms against an exact solution.

use crate::basis::{basis_values, DgSpace, DgState, Quadrature};
use crate::linalg::Vector;

/// `(L¹, L∞)` of `u_h − exact`.
///
/// L¹ sums per-cell Gauss quadrature of the absolute error over all components;
/// L∞ takes the maximum over the quadrature points and both traces of every cell.
pub fn error_norms<const M: usize>(
    space: &DgSpace,
    u: &DgState<M>,
    exact: impl Fn(f64) -> Vector<M>,
) -> (f64, f64) {
    let quad = Quadrature::gauss_legendre(space.degree() + 3);
    let mut phi = vec![0.0; u.modes()];
    let mut l1 = 0.0;
    let mut linf: f64 = 0.0;
    for (j, cell) in space.mesh().cells().iter().enumerate() {
        let mut cell_l1 = 0.0;
        for (&xi, &w) in quad.nodes.iter().zip(&quad.weights) {
            basis_values(xi, &mut phi);
            let e = u.combine(j, &phi) - exact(cell.map(xi));
            cell_l1 += w * e.iter().map(|v| v.abs()).sum::<f64>();
            linf = linf.max(e.amax());
        }
        l1 += 0.5 * cell.length * cell_l1;
        for xi in [-1.0, 1.0] {
            basis_values(xi, &mut phi);
            linf = linf.max((u.combine(j, &phi) - exact(cell.map(xi))).amax());
        }
    }
    (l1, linf)
}

/// `log(e_prev / e) / log(n / n_prev)`: the observed order between two refinements.
pub fn observed_order(e_prev: f64, e: f64, n_prev: usize, n: usize) -> f64 {
    (e_prev / e).ln() / (n as f64 / n_prev as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::CutCellMesh;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn space(n: usize, p: usize) -> DgSpace {
        DgSpace::new(Arc::new(CutCellMesh::uniform(n, (0.0, 1.0)).unwrap()), p)
    }

    #[test]
    fn projected_constant_has_zero_error() {
        let s = space(10, 2);
        let u = s.project(|_| Vector::<1>::new(0.7));
        let (l1, linf) = error_norms(&s, &u, |_| Vector::<1>::new(0.7));
        assert!(l1 < 1e-14 && linf < 1e-14);
    }

    #[test]
    fn zero_against_one() {
        let s = space(7, 1);
        let (l1, linf) = error_norms(&s, &s.zeros::<1>(), |_| Vector::<1>::new(1.0));
        assert!((l1 - 1.0).abs() < 1e-14);
        assert!((linf - 1.0).abs() < 1e-15);
    }

    #[test]
    fn components_are_summed_and_maximized() {
        let s = space(4, 0);
        let (l1, linf) = error_norms(&s, &s.zeros::<3>(), |_| Vector::<3>::new(1.0, -2.0, 0.5));
        assert!((l1 - 3.5).abs() < 1e-14);
        assert!((linf - 2.0).abs() < 1e-15);
    }

    #[test]
    fn projection_converges_at_order_p_plus_one() {
        let f = |x: f64| Vector::<1>::new((2.0 * PI * x).sin());
        let err = |n| {
            let s = space(n, 2);
            error_norms(&s, &s.project(f), f).0
        };
        let ratio = err(40) / err(80);
        assert!((ratio.log2() - 3.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn observed_order_of_halving() {
        assert!((observed_order(8.0, 1.0, 20, 40) - 3.0).abs() < 1e-15);
    }
}
