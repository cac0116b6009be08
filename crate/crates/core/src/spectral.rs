//! Eigenvalues of the semi-discrete linear advection operator.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

use crate::basis::{DgSpace, DgState};
use crate::dod::VolumeVariant;
use crate::equations::Advection;
use crate::error::{Error, Result};
use crate::mesh::{banded_mesh, AlphaSpec, CutCellMesh};
use crate::riemann::Upwind;
use crate::spatial::{BoundaryCondition, SpatialOperator, Stabilization};

/// Dense matrix of a linear semi-discrete operator.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<f64>,
    pub p: usize,
    pub alpha: Option<f64>,
    pub variant: VolumeVariant,
}

/// Build the matrix column by column by applying the right-hand side to unit states.
pub fn assemble_matrix<const M: usize>(op: &SpatialOperator<M>) -> Result<DMatrix<f64>> {
    if !op.equation().is_linear() {
        return Err(Error::Unsupported(format!(
            "matrix assembly needs a linear equation, got {}",
            op.equation().name()
        )));
    }
    let n_cells = op.space().mesh().n_cells();
    let p = op.space().degree();
    let dim = op.dim();
    let columns: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|k| {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            let u = DgState::<M>::from_coeffs(n_cells, p, e);
            let mut out = vec![0.0; dim];
            op.rhs(&u, 0.0, &mut out)?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(dim, dim, |i, j| columns[j][i]))
}

/// Mesh of the spectral study: 100 cells on (0, 1), every cell in (0.1, 0.9) split.
pub fn study_mesh(alpha: f64) -> Result<CutCellMesh> {
    banded_mesh(100, (0.0, 1.0), (0.1, 0.9), &AlphaSpec::constant(alpha))
}

/// Periodic advection operator with `β = 1` and the upwind flux.
pub fn advection_operator(
    mesh: CutCellMesh,
    p: usize,
    variant: VolumeVariant,
) -> Result<SpatialOperator<1>> {
    SpatialOperator::new(
        DgSpace::new(Arc::new(mesh), p),
        Arc::new(Advection { beta: 1.0 }),
        Arc::new(Upwind { beta: 1.0 }),
        BoundaryCondition::Periodic,
        Stabilization {
            variant,
            ..Stabilization::default()
        },
    )
}

pub fn study_matrix(p: usize, alpha: f64, variant: VolumeVariant) -> Result<OperatorMatrix> {
    let op = advection_operator(study_mesh(alpha)?, p, variant)?;
    Ok(OperatorMatrix {
        matrix: assemble_matrix(&op)?,
        p,
        alpha: Some(alpha),
        variant,
    })
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex<f64>>,
    pub abscissa: f64,
}

impl Spectrum {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "re,im")?;
        for z in &self.eigenvalues {
            writeln!(w, "{:.17e},{:.17e}", z.re, z.im)?;
        }
        Ok(())
    }
}

/// Diagonal similarity scaling by powers of two that equalizes row and column norms.
///
/// Returns the scaling factors `d` with `balanced = D⁻¹ A D`.
pub fn balance(a: &mut DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut d = vec![1.0; n];
    let radix = 2.0;
    let radix2 = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix2;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix2;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                d[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            return d;
        }
    }
}

/// All eigenvalues and the spectral abscissa `max Re λ`.
///
/// The matrix is balanced, then reduced to Hessenberg form and iterated to real
/// Schur form by the implicitly shifted QR algorithm.
pub fn spectral_abscissa(matrix: &DMatrix<f64>) -> Result<Spectrum> {
    assert!(matrix.is_square(), "matrix must be square");
    let mut a = matrix.clone();
    balance(&mut a);
    let dense = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    let Ok(values) = dense.eigenvalues() else {
        return Err(Error::EigenNonConvergence {
            path: dump_matrix(matrix)?,
        });
    };
    let mut eigenvalues: Vec<Complex<f64>> = values.iter().map(|z| Complex::new(z.re, z.im)).collect();
    eigenvalues.sort_by(|x, y| y.re.total_cmp(&x.re).then(x.im.total_cmp(&y.im)));
    let abscissa = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Spectrum {
        eigenvalues,
        abscissa,
    })
}

fn dump_matrix(m: &DMatrix<f64>) -> Result<PathBuf> {
    let path = std::env::temp_dir().join(format!(
        "cutcell-dg-eigen-{}-{}x{}.csv",
        std::process::id(),
        m.nrows(),
        m.ncols()
    ));
    let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.17e}", m[(i, j)])).collect();
        writeln!(f, "{}", row.join(","))?;
    }
    Ok(path)
}
