//! One-dimensional cut-cell meshes: a uniform background mesh in which selected
//! cells are split into a small cut cell of length `αh` followed by a large one
//! of length `(1 − α)h`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random cut fractions below this are redrawn.
pub const MIN_ALPHA: f64 = 1e-14;

/// Upper end of the random fraction range, `α = RANDOM_ALPHA_SCALE · X`, `X ~ U(0, 1)`.
pub const RANDOM_ALPHA_SCALE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Equi,
    CutSmall,
    CutLarge,
}

impl CellKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Equi => "equi",
            CellKind::CutSmall => "cut_small",
            CellKind::CutLarge => "cut_large",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub left: f64,
    pub right: f64,
    /// Stored separately from `right - left` so tiny cut cells keep full relative precision.
    pub length: f64,
    pub kind: CellKind,
}

impl Cell {
    pub fn centroid(&self) -> f64 {
        self.left + 0.5 * self.length
    }

    /// Physical coordinate of reference point `xi ∈ [−1, 1]`.
    pub fn map(&self, xi: f64) -> f64 {
        self.left + 0.5 * self.length * (1.0 + xi)
    }

    /// Reference coordinate of physical point `x`; may lie outside `[−1, 1]`.
    pub fn reference(&self, x: f64) -> f64 {
        2.0 * (x - self.left) / self.length - 1.0
    }
}

/// A split background cell: small cell `small`, its right partner `large`,
/// and the cell immediately to the left of `small`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPair {
    pub small: usize,
    pub large: usize,
    pub left_neighbor: usize,
    pub alpha: f64,
}

impl CutPair {
    /// `(k − 1, k₁, k₂)`.
    pub fn neighborhood(&self) -> [usize; 3] {
        [self.left_neighbor, self.small, self.large]
    }

    /// The left neighbour is only reachable through a periodic wrap.
    pub fn wraps(&self) -> bool {
        self.small == 0
    }
}

/// Cut fractions for the split cells of a mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AlphaSpec {
    Constant { value: f64 },
    Random { seed: u64 },
    PerCell { values: Vec<f64> },
}

impl AlphaSpec {
    pub fn constant(value: f64) -> Self {
        AlphaSpec::Constant { value }
    }

    pub fn random(seed: u64) -> Self {
        AlphaSpec::Random { seed }
    }

    fn draw(&self, count: usize) -> Result<Vec<f64>> {
        let values = match self {
            AlphaSpec::Constant { value } => vec![*value; count],
            AlphaSpec::PerCell { values } => {
                if values.len() != count {
                    return Err(Error::Mesh(format!(
                        "{} cut fractions given for {count} split cells",
                        values.len()
                    )));
                }
                values.clone()
            }
            AlphaSpec::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..count)
                    .map(|_| loop {
                        let alpha = RANDOM_ALPHA_SCALE * rng.gen::<f64>();
                        if alpha >= MIN_ALPHA {
                            break alpha;
                        }
                    })
                    .collect()
            }
        };
        for &a in &values {
            check_alpha(a)?;
        }
        Ok(values)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::Domain(format!(
            "cut fraction {alpha} outside (0, 1/2]"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutCellMesh {
    x_left: f64,
    x_right: f64,
    h: f64,
    background_cells: usize,
    cells: Vec<Cell>,
    edges: Vec<f64>,
    cut_pairs: Vec<CutPair>,
}

impl CutCellMesh {
    /// Build from a uniform background mesh, splitting background cell `b`
    /// (0-based) with fraction `split[b]` when present.
    fn from_splits(n: usize, domain: (f64, f64), split: &[Option<f64>]) -> Result<Self> {
        let (x_left, x_right) = domain;
        if n == 0 {
            return Err(Error::Mesh("background mesh needs at least one cell".into()));
        }
        if !(x_left < x_right) || !x_left.is_finite() || !x_right.is_finite() {
            return Err(Error::Mesh(format!("invalid domain ({x_left}, {x_right})")));
        }
        let h = (x_right - x_left) / n as f64;
        let background_edge = |b: usize| {
            if b == n {
                x_right
            } else {
                x_left + b as f64 * h
            }
        };

        let mut cells = Vec::with_capacity(2 * n);
        let mut cut_pairs = Vec::new();
        for (b, s) in split.iter().enumerate() {
            let (l, r) = (background_edge(b), background_edge(b + 1));
            match *s {
                None => cells.push(Cell {
                    left: l,
                    right: r,
                    length: h,
                    kind: CellKind::Equi,
                }),
                Some(alpha) => {
                    check_alpha(alpha)?;
                    let small_len = alpha * h;
                    let x_cut = l + small_len;
                    let small = cells.len();
                    cells.push(Cell {
                        left: l,
                        right: x_cut,
                        length: small_len,
                        kind: CellKind::CutSmall,
                    });
                    cells.push(Cell {
                        left: x_cut,
                        right: r,
                        length: h - small_len,
                        kind: CellKind::CutLarge,
                    });
                    cut_pairs.push(CutPair {
                        small,
                        large: small + 1,
                        left_neighbor: small,
                        alpha,
                    });
                }
            }
        }
        let n_cells = cells.len();
        for pair in &mut cut_pairs {
            pair.left_neighbor = (pair.small + n_cells - 1) % n_cells;
        }
        let mut edges: Vec<f64> = cells.iter().map(|c| c.left).collect();
        edges.push(x_right);
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Mesh("edges are not strictly increasing".into()));
        }
        Ok(Self {
            x_left,
            x_right,
            h,
            background_cells: n,
            cells,
            edges,
            cut_pairs,
        })
    }

    /// Uniform mesh without cut cells.
    pub fn uniform(n: usize, domain: (f64, f64)) -> Result<Self> {
        Self::from_splits(n, domain, &vec![None; n])
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    /// Background spacing.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn background_cells(&self) -> usize {
        self.background_cells
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, j: usize) -> &Cell {
        &self.cells[j]
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn cut_pairs(&self) -> &[CutPair] {
        &self.cut_pairs
    }

    pub fn equi_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == CellKind::Equi)
            .map(|(j, _)| j)
    }

    /// Index of the cell containing `x` (right-continuous; the last cell owns `x_R`).
    pub fn locate(&self, x: f64) -> Option<usize> {
        if x < self.x_left || x > self.x_right {
            return None;
        }
        let j = self.edges.partition_point(|&e| e <= x);
        Some(j.saturating_sub(1).min(self.n_cells() - 1))
    }

    /// Cut fraction of the pair that `j` belongs to, if any.
    pub fn alpha_of(&self, j: usize) -> Option<f64> {
        self.cut_pairs
            .iter()
            .find(|p| p.small == j || p.large == j)
            .map(|p| p.alpha)
    }

    /// One row per cell: `index,x_left,x_right,kind,alpha`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,x_left,x_right,kind,alpha")?;
        for (j, c) in self.cells.iter().enumerate() {
            let alpha = self
                .alpha_of(j)
                .map(|a| format!("{a:e}"))
                .unwrap_or_default();
            writeln!(
                w,
                "{j},{:.17e},{:.17e},{},{alpha}",
                c.left,
                c.right,
                c.kind.as_str()
            )?;
        }
        Ok(())
    }
}

/// Uniform mesh of `n` cells on `domain` whose `k`-th background cell
/// (1-based) is split with fraction `alpha`.
///
/// For `k = 1` the left neighbour of the small cell is the last cell, which
/// is only meaningful with periodic boundary conditions.
pub fn model_mesh(n: usize, k: usize, alpha: f64, domain: (f64, f64)) -> Result<CutCellMesh> {
    check_alpha(alpha)?;
    if k < 1 || k > n {
        return Err(Error::Mesh(format!("split index {k} outside 1..={n}")));
    }
    let mut split = vec![None; n];
    split[k - 1] = Some(alpha);
    CutCellMesh::from_splits(n, domain, &split)
}

/// Split every background cell inside `band`; the band ends must coincide with
/// background edges.
pub fn banded_mesh(
    n: usize,
    domain: (f64, f64),
    band: (f64, f64),
    alphas: &AlphaSpec,
) -> Result<CutCellMesh> {
    if n == 0 {
        return Err(Error::Mesh("background mesh needs at least one cell".into()));
    }
    let h = (domain.1 - domain.0) / n as f64;
    for end in [band.0, band.1] {
        let pos = (end - domain.0) / h;
        if (pos - pos.round()).abs() > 1e-9 {
            return Err(Error::Mesh(format!(
                "band end {end} is not aligned with the background spacing {h}"
            )));
        }
    }
    split_band(n, domain, band, alphas)
}

/// Mesh for the shock tube on (−1, 1): background cells whose midpoint lies in
/// `[−0.75, 0.75)` are split with random fractions.
pub fn sod_mesh(n: usize, seed: u64) -> Result<CutCellMesh> {
    split_band(n, (-1.0, 1.0), (-0.75, 0.75), &AlphaSpec::random(seed))
}

/// Split background cells whose midpoint lies in `[band.0, band.1)`.
pub fn split_band(
    n: usize,
    domain: (f64, f64),
    band: (f64, f64),
    alphas: &AlphaSpec,
) -> Result<CutCellMesh> {
    if n == 0 {
        return Err(Error::Mesh("background mesh needs at least one cell".into()));
    }
    if !(band.0 < band.1) || band.0 < domain.0 || band.1 > domain.1 {
        return Err(Error::Mesh(format!(
            "band ({}, {}) does not lie inside the domain",
            band.0, band.1
        )));
    }
    let h = (domain.1 - domain.0) / n as f64;
    let inside: Vec<bool> = (0..n)
        .map(|b| {
            let mid = domain.0 + (b as f64 + 0.5) * h;
            mid >= band.0 && mid < band.1
        })
        .collect();
    let count = inside.iter().filter(|&&s| s).count();
    let mut drawn = alphas.draw(count)?.into_iter();
    let split: Vec<Option<f64>> = inside
        .iter()
        .map(|&s| if s { drawn.next() } else { None })
        .collect();
    CutCellMesh::from_splits(n, domain, &split)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total_length(m: &CutCellMesh) -> f64 {
        m.cells().iter().map(|c| c.length).sum()
    }

    #[test]
    fn model_mesh_lengths() {
        let m = model_mesh(10, 5, 0.3, (0.0, 1.0)).unwrap();
        assert_eq!(m.n_cells(), 11);
        assert!((m.cell(4).length - 0.03).abs() < 1e-15);
        assert!((m.cell(5).length - 0.07).abs() < 1e-15);
        assert_eq!(m.cell(4).kind, CellKind::CutSmall);
        assert_eq!(m.cell(5).kind, CellKind::CutLarge);
        let pair = m.cut_pairs()[0];
        assert_eq!(pair.neighborhood(), [3, 4, 5]);
        assert!((m.edges()[5] - (0.4 + 0.03)).abs() < 1e-15);
        assert_eq!(m.equi_indices().count(), 9);
    }

    #[test]
    fn half_split_is_symmetric() {
        let m = model_mesh(10, 5, 0.5, (0.0, 1.0)).unwrap();
        assert!((m.cell(4).length - 0.05).abs() < 1e-15);
        assert!((m.cell(5).length - 0.05).abs() < 1e-15);
    }

    #[test]
    fn tiny_cut_cell_keeps_relative_precision() {
        let m = model_mesh(100, 50, 1e-6, (0.0, 1.0)).unwrap();
        let small = m.cell(49);
        assert!((small.length - 1e-8).abs() <= 1e-14 * 1e-8);
        assert!(((total_length(&m) - 1.0) / 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(matches!(model_mesh(10, 5, 0.6, (0.0, 1.0)), Err(Error::Domain(_))));
        assert!(matches!(model_mesh(10, 5, 0.0, (0.0, 1.0)), Err(Error::Domain(_))));
        assert!(model_mesh(10, 11, 0.2, (0.0, 1.0)).is_err());
    }

    #[test]
    fn banded_cell_counts() {
        let m = banded_mesh(100, (0.0, 1.0), (0.1, 0.9), &AlphaSpec::constant(1e-3)).unwrap();
        assert_eq!(m.n_cells(), 180);
        let m = banded_mesh(10, (0.0, 1.0), (0.1, 0.9), &AlphaSpec::constant(0.5)).unwrap();
        assert_eq!(m.n_cells(), 18);
        for c in m.cells().iter().filter(|c| c.kind != CellKind::Equi) {
            assert!((c.length - 0.05).abs() < 1e-15);
        }
    }

    #[test]
    fn misaligned_band_is_rejected() {
        assert!(matches!(
            banded_mesh(10, (0.0, 1.0), (0.15, 0.9), &AlphaSpec::constant(0.2)),
            Err(Error::Mesh(_))
        ));
    }

    #[test]
    fn random_alphas_in_range_and_reproducible() {
        let a = banded_mesh(100, (0.0, 1.0), (0.1, 0.9), &AlphaSpec::random(42)).unwrap();
        let b = banded_mesh(100, (0.0, 1.0), (0.1, 0.9), &AlphaSpec::random(42)).unwrap();
        assert_eq!(a, b);
        for p in a.cut_pairs() {
            assert!(p.alpha > 0.0 && p.alpha < 1e-2);
        }
    }

    #[test]
    fn sod_mesh_counts() {
        let m = sod_mesh(100, 7).unwrap();
        assert_eq!(m.n_cells(), 175);
        assert_eq!(m.cut_pairs().len(), 75);
        assert!(((total_length(&m) - 2.0) / 2.0).abs() < 1e-14);
        assert_eq!(m, sod_mesh(100, 7).unwrap());
        let small = sod_mesh(8, 1).unwrap();
        assert_eq!(small.n_cells(), 14);
    }

    #[test]
    fn locate_cells() {
        let m = model_mesh(10, 5, 0.3, (0.0, 1.0)).unwrap();
        assert_eq!(m.locate(0.0), Some(0));
        assert_eq!(m.locate(0.41), Some(4));
        assert_eq!(m.locate(0.44), Some(5));
        assert_eq!(m.locate(1.0), Some(10));
        assert_eq!(m.locate(1.5), None);
    }

    #[test]
    fn csv_dump_has_one_row_per_cell() {
        let m = model_mesh(4, 2, 0.25, (0.0, 1.0)).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 5);
        assert!(text.lines().nth(2).unwrap().contains("cut_small"));
    }
}
