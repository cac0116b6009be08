//! Orthonormal modal Legendre basis, Gauss–Legendre quadrature and the
//! per-cell polynomial state.
//!
//! On the reference interval `[−1, 1]` the basis is `φ_i = √((2i+1)/2) P_i`,
//! so the mass matrix of a cell of length `len` is `len/2 · I` and the cell
//! average of a component is its degree-0 coefficient divided by `√2`.

use std::sync::Arc;

use crate::linalg::Vector;
use crate::mesh::CutCellMesh;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_{−1}^{1} f`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Classical (non-normalized) Legendre polynomial `P_n` and its derivative.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

static NORMS: std::sync::LazyLock<[f64; 17]> =
    std::sync::LazyLock::new(|| std::array::from_fn(|i| ((2 * i + 1) as f64 / 2.0).sqrt()));

fn norm(i: usize) -> f64 {
    match NORMS.get(i) {
        Some(&v) => v,
        None => ((2 * i + 1) as f64 / 2.0).sqrt(),
    }
}

/// Values of `φ_0..=φ_p` at `xi` (any real `xi`, not only `[−1, 1]`).
pub fn basis_values(xi: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let (mut p0, mut p1) = (1.0, xi);
    out[0] = norm(0);
    if n > 1 {
        out[1] = norm(1) * xi;
    }
    for k in 2..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * xi * p1 - (kf - 1.0) * p0) / kf;
        out[k] = norm(k) * p2;
        p0 = p1;
        p1 = p2;
    }
}

/// Reference derivatives `dφ_i/dξ` for `i = 0..=p`.
pub fn basis_derivatives(xi: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    // P'_{k+1} = P'_{k−1} + (2k+1) P_k
    let (mut p0, mut p1) = (1.0, xi);
    out[0] = 0.0;
    if n > 1 {
        out[1] = 1.0;
    }
    for k in 2..n {
        let kf = k as f64;
        out[k] = out[k - 2] + (2.0 * kf - 1.0) * p1;
        let p2 = ((2.0 * kf - 1.0) * xi * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    for (k, d) in out.iter_mut().enumerate() {
        *d *= norm(k);
    }
}

/// `φ_i(±1) = (±1)^i √((2i+1)/2)`.
pub fn trace_value(i: usize, right: bool) -> f64 {
    if right || i % 2 == 0 {
        norm(i)
    } else {
        -norm(i)
    }
}

/// Basis values and derivatives tabulated at a fixed set of reference points.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTable {
    modes: usize,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl BasisTable {
    pub fn new(p: usize, points: &[f64]) -> Self {
        let modes = p + 1;
        let mut values = vec![0.0; points.len() * modes];
        let mut derivs = vec![0.0; points.len() * modes];
        for (q, &x) in points.iter().enumerate() {
            basis_values(x, &mut values[q * modes..(q + 1) * modes]);
            basis_derivatives(x, &mut derivs[q * modes..(q + 1) * modes]);
        }
        Self {
            modes,
            values,
            derivs,
        }
    }

    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.modes..(q + 1) * self.modes]
    }

    pub fn derivs(&self, q: usize) -> &[f64] {
        &self.derivs[q * self.modes..(q + 1) * self.modes]
    }
}

/// Modal coefficients for every cell and component.
///
/// Coefficient `i` of component `l` on cell `j` is stored at
/// `(j·M + l)(p+1) + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DgState<const M: usize> {
    p: usize,
    n_cells: usize,
    coeffs: Vec<f64>,
}

impl<const M: usize> DgState<M> {
    pub fn zeros(n_cells: usize, p: usize) -> Self {
        Self {
            p,
            n_cells,
            coeffs: vec![0.0; n_cells * M * (p + 1)],
        }
    }

    pub fn from_coeffs(n_cells: usize, p: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), n_cells * M * (p + 1), "coefficient count mismatch");
        Self { p, n_cells, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn modes(&self) -> usize {
        self.p + 1
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn index(&self, j: usize, l: usize, i: usize) -> usize {
        (j * M + l) * (self.p + 1) + i
    }

    pub fn component(&self, j: usize, l: usize) -> &[f64] {
        let s = (j * M + l) * (self.p + 1);
        &self.coeffs[s..s + self.p + 1]
    }

    pub fn component_mut(&mut self, j: usize, l: usize) -> &mut [f64] {
        let s = (j * M + l) * (self.p + 1);
        let n = self.p + 1;
        &mut self.coeffs[s..s + n]
    }

    /// All `M·(p+1)` coefficients of one cell.
    pub fn cell(&self, j: usize) -> &[f64] {
        let n = M * (self.p + 1);
        &self.coeffs[j * n..(j + 1) * n]
    }

    pub fn cell_mut(&mut self, j: usize) -> &mut [f64] {
        let n = M * (self.p + 1);
        &mut self.coeffs[j * n..(j + 1) * n]
    }

    pub fn average(&self, j: usize) -> Vector<M> {
        Vector::<M>::from_fn(|l, _| self.component(j, l)[0] / std::f64::consts::SQRT_2)
    }

    pub fn set_average(&mut self, j: usize, l: usize, value: f64) {
        self.component_mut(j, l)[0] = value * std::f64::consts::SQRT_2;
    }

    /// Evaluate cell `j`'s polynomial at reference coordinate `xi` (extension
    /// outside `[−1, 1]` allowed).
    pub fn eval_ref(&self, j: usize, xi: f64) -> Vector<M> {
        let mut phi = [0.0; 16];
        let phi = basis_slice(&mut phi, self.p + 1, xi);
        self.combine(j, phi)
    }

    /// `Σ_i c_{j,l,i} · weights[i]` for every component.
    pub fn combine(&self, j: usize, weights: &[f64]) -> Vector<M> {
        Vector::<M>::from_fn(|l, _| {
            self.component(j, l)
                .iter()
                .zip(weights)
                .map(|(c, w)| c * w)
                .sum()
        })
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Degree of a state with the same averages: higher modes are dropped or zero-padded.
    pub fn with_degree(&self, p: usize) -> Self {
        let mut out = Self::zeros(self.n_cells, p);
        for j in 0..self.n_cells {
            for l in 0..M {
                let n = (p + 1).min(self.p + 1);
                out.component_mut(j, l)[..n].copy_from_slice(&self.component(j, l)[..n]);
            }
        }
        out
    }
}

fn basis_slice(buf: &mut [f64; 16], modes: usize, xi: f64) -> &[f64] {
    assert!(modes <= 16, "polynomial degree above 15 is not supported");
    basis_values(xi, &mut buf[..modes]);
    &buf[..modes]
}

/// A mesh, a polynomial degree and the quadrature used on every cell.
#[derive(Debug, Clone)]
pub struct DgSpace {
    mesh: Arc<CutCellMesh>,
    p: usize,
    quad: Quadrature,
    table: BasisTable,
}

impl DgSpace {
    /// Uses `p + 2` Gauss points.
    pub fn new(mesh: Arc<CutCellMesh>, p: usize) -> Self {
        Self::with_quadrature(mesh, p, p + 2)
    }

    pub fn with_quadrature(mesh: Arc<CutCellMesh>, p: usize, n_q: usize) -> Self {
        assert!(p <= 15, "polynomial degree above 15 is not supported");
        let quad = Quadrature::gauss_legendre(n_q);
        let table = BasisTable::new(p, &quad.nodes);
        Self {
            mesh,
            p,
            quad,
            table,
        }
    }

    pub fn mesh(&self) -> &CutCellMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<CutCellMesh> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn modes(&self) -> usize {
        self.p + 1
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    /// Basis tabulated at the quadrature nodes.
    pub fn table(&self) -> &BasisTable {
        &self.table
    }

    pub fn zeros<const M: usize>(&self) -> DgState<M> {
        DgState::zeros(self.mesh.n_cells(), self.p)
    }

    /// Polynomial of cell `j` at physical `x`; `x` may lie outside the cell.
    pub fn evaluate<const M: usize>(&self, u: &DgState<M>, j: usize, x: f64) -> Vector<M> {
        u.eval_ref(j, self.mesh.cell(j).reference(x))
    }

    /// `∂_x` of cell `j`'s polynomial at physical `x`.
    pub fn evaluate_deriv<const M: usize>(&self, u: &DgState<M>, j: usize, x: f64) -> Vector<M> {
        let cell = self.mesh.cell(j);
        let mut d = vec![0.0; self.p + 1];
        basis_derivatives(cell.reference(x), &mut d);
        u.combine(j, &d) * (2.0 / cell.length)
    }

    /// Left (`right = false`) or right trace of cell `j`.
    pub fn trace<const M: usize>(&self, u: &DgState<M>, j: usize, right: bool) -> Vector<M> {
        Vector::<M>::from_fn(|l, _| {
            u.component(j, l)
                .iter()
                .enumerate()
                .map(|(i, c)| c * trace_value(i, right))
                .sum()
        })
    }

    /// `u(x⁻) − u(x⁺)` at edge `e`; `−u(x⁺)` on the left boundary and `u(x⁻)` on the right.
    pub fn jump<const M: usize>(&self, u: &DgState<M>, e: usize) -> Vector<M> {
        let n = self.mesh.n_cells();
        assert!(e <= n, "edge index out of range");
        let left = if e == 0 {
            Vector::<M>::zeros()
        } else {
            self.trace(u, e - 1, true)
        };
        let right = if e == n {
            Vector::<M>::zeros()
        } else {
            self.trace(u, e, false)
        };
        left - right
    }

    /// Per-cell L² projection using `p + 3` Gauss points.
    pub fn project<const M: usize>(&self, f: impl Fn(f64) -> Vector<M>) -> DgState<M> {
        let quad = Quadrature::gauss_legendre(self.p + 3);
        let table = BasisTable::new(self.p, &quad.nodes);
        let mut u = self.zeros::<M>();
        for (j, cell) in self.mesh.cells().iter().enumerate() {
            for (q, (&xi, &w)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
                let v = f(cell.map(xi));
                let phi = table.values(q);
                for l in 0..M {
                    let c = u.component_mut(j, l);
                    for i in 0..=self.p {
                        c[i] += w * v[l] * phi[i];
                    }
                }
            }
        }
        u
    }

    /// `Σ_j len_j · ū_j`.
    pub fn total_mass<const M: usize>(&self, u: &DgState<M>) -> Vector<M> {
        self.mesh
            .cells()
            .iter()
            .enumerate()
            .fold(Vector::<M>::zeros(), |acc, (j, c)| acc + u.average(j) * c.length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{model_mesh, CutCellMesh};
    use proptest::prelude::*;

    fn unit_mesh(n: usize) -> Arc<CutCellMesh> {
        Arc::new(CutCellMesh::uniform(n, (0.0, 1.0)).unwrap())
    }

    #[test]
    fn quadrature_is_exact_for_monomials() {
        for n in 1..=8 {
            let q = Quadrature::gauss_legendre(n);
            for d in 0..2 * n {
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                let got = q.integrate(|x| x.powi(d as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} d={d} got {got}");
            }
        }
    }

    #[test]
    fn mass_matrix_is_identity_on_reference() {
        let q = Quadrature::gauss_legendre(8);
        let mut a = vec![0.0; 6];
        for i in 0..6 {
            for k in 0..6 {
                let m = q.integrate(|x| {
                    basis_values(x, &mut a);
                    a[i] * a[k]
                });
                let expected = if i == k { 1.0 } else { 0.0 };
                assert!((m - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut v1 = vec![0.0; 5];
        let mut v2 = vec![0.0; 5];
        let mut d = vec![0.0; 5];
        for &x in &[-1.0, -0.3, 0.2, 1.0, 2.5] {
            let eps = 1e-6;
            basis_values(x + eps, &mut v1);
            basis_values(x - eps, &mut v2);
            basis_derivatives(x, &mut d);
            for i in 0..5 {
                assert!(((v1[i] - v2[i]) / (2.0 * eps) - d[i]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn trace_values() {
        let mut v = vec![0.0; 5];
        basis_values(-1.0, &mut v);
        for i in 0..5 {
            assert!((v[i] - trace_value(i, false)).abs() < 1e-14);
        }
        basis_values(1.0, &mut v);
        for i in 0..5 {
            assert!((v[i] - trace_value(i, true)).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_state_evaluates_everywhere() {
        let space = DgSpace::new(unit_mesh(5), 2);
        let u = space.project(|_| Vector::<1>::new(3.5));
        for j in 0..5 {
            assert!((u.average(j)[0] - 3.5).abs() < 1e-14);
            assert!(u.component(j, 0)[1..].iter().all(|c| c.abs() < 1e-14));
            assert!((space.evaluate(&u, j, 0.77)[0] - 3.5).abs() < 1e-11);
        }
    }

    #[test]
    fn linear_extension() {
        let mesh = Arc::new(CutCellMesh::uniform(10, (0.0, 1.0)).unwrap());
        let space = DgSpace::new(mesh, 1);
        let u = space.project(|x| Vector::<1>::new(x));
        assert!((space.evaluate(&u, 0, 0.2)[0] - 0.2).abs() < 1e-13);
        assert!((space.evaluate_deriv(&u, 0, 0.9)[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_on_unit_cell() {
        let space = DgSpace::new(unit_mesh(1), 2);
        let u = space.project(|x| Vector::<1>::new(x * x));
        assert!((space.evaluate(&u, 0, 0.5)[0] - 0.25).abs() < 1e-14);
        assert!((space.evaluate_deriv(&u, 0, 0.3)[0] - 0.6).abs() < 1e-13);
        let p0 = DgSpace::new(unit_mesh(1), 0);
        let c = p0.project(|x| Vector::<1>::new(x * x));
        assert_eq!(p0.evaluate_deriv(&c, 0, 0.3)[0], 0.0);
    }

    #[test]
    fn jumps() {
        let space = DgSpace::new(unit_mesh(2), 0);
        let mut u = space.zeros::<1>();
        u.set_average(0, 0, 2.0);
        u.set_average(1, 0, 5.0);
        assert!((space.jump(&u, 1)[0] + 3.0).abs() < 1e-14);
        let mut v = space.zeros::<1>();
        v.set_average(0, 0, 4.0);
        assert!((space.jump(&v, 0)[0] + 4.0).abs() < 1e-14);
        assert!(space.jump(&v, 2)[0].abs() < 1e-14);
        let w = space.project(|x| Vector::<1>::new(2.0 * x - 1.0));
        let cont = DgSpace::new(unit_mesh(2), 1);
        let w1 = cont.project(|x| Vector::<1>::new(2.0 * x - 1.0));
        assert!(cont.jump(&w1, 1)[0].abs() < 1e-14);
        assert_eq!(w.n_cells(), 2);
    }

    #[test]
    fn projection_order() {
        let err = |n: usize| {
            let space = DgSpace::new(unit_mesh(n), 3);
            let u = space.project(|x| Vector::<1>::new((2.0 * std::f64::consts::PI * x).sin()));
            let q = Quadrature::gauss_legendre(8);
            let mut e = 0.0;
            for (j, c) in space.mesh().cells().iter().enumerate() {
                for (&xi, &w) in q.nodes.iter().zip(&q.weights) {
                    let x = c.map(xi);
                    let d = u.eval_ref(j, xi)[0] - (2.0 * std::f64::consts::PI * x).sin();
                    e += 0.5 * c.length * w * d.abs();
                }
            }
            e
        };
        let rate = (err(10) / err(20)).log2();
        assert!((rate - 4.0).abs() < 0.3, "rate {rate}");
    }

    #[test]
    fn tiny_cut_cell_average() {
        let mesh = Arc::new(model_mesh(10, 5, 1e-6, (0.0, 1.0)).unwrap());
        let space = DgSpace::new(mesh, 2);
        let u = space.project(|x| Vector::<1>::new(1.0 + x));
        let m = space.total_mass(&u)[0];
        assert!((m - 1.5).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn in_cell_extension_is_bitwise_identical(c in proptest::collection::vec(-5.0f64..5.0, 4), xi in -1.0f64..1.0) {
            let mesh = Arc::new(CutCellMesh::uniform(1, (0.3, 0.7)).unwrap());
            let space = DgSpace::new(mesh, 3);
            let u = DgState::<1>::from_coeffs(1, 3, c);
            let x = space.mesh().cell(0).map(xi);
            let xi_back = space.mesh().cell(0).reference(x);
            prop_assert_eq!(space.evaluate(&u, 0, x), u.eval_ref(0, xi_back));
        }

        #[test]
        fn average_is_scaled_first_mode(c in proptest::collection::vec(-5.0f64..5.0, 3)) {
            let u = DgState::<1>::from_coeffs(1, 2, c.clone());
            let q = Quadrature::gauss_legendre(4);
            let avg = 0.5 * q.integrate(|xi| u.eval_ref(0, xi)[0]);
            prop_assert!((avg - u.average(0)[0]).abs() < 1e-13);
        }
    }
}
