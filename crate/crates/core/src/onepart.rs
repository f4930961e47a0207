//! Piecewise-constant one-particle spaces over a uniform time grid.

use crate::error::{dimension, domain, Result};
use crate::C64;

/// Uniform grid of `cells` intervals of length `width`, each carrying an
/// `internal_dim`-dimensional internal space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub cells: usize,
    pub width: f64,
    pub internal_dim: usize,
}

impl Grid {
    pub fn new(cells: usize, width: f64, internal_dim: usize) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return domain(format!("cell width must be positive, got {width}"));
        }
        if internal_dim == 0 {
            return domain("internal dimension must be at least 1");
        }
        Ok(Self { cells, width, internal_dim })
    }

    /// Number of one-particle modes, `cells * internal_dim`.
    pub fn dim(&self) -> usize {
        self.cells * self.internal_dim
    }

    /// Flat mode index of (cell, internal coordinate).
    pub fn mode(&self, cell: usize, j: usize) -> usize {
        cell * self.internal_dim + j
    }

    pub fn length(&self) -> f64 {
        self.cells as f64 * self.width
    }

    /// Same cell width and internal dimension, different number of cells.
    pub fn with_cells(&self, cells: usize) -> Self {
        Self { cells, ..*self }
    }

    /// Dyadic refinement: twice the cells, half the width.
    pub fn refine(&self) -> Self {
        Self { cells: 2 * self.cells, width: self.width / 2.0, internal_dim: self.internal_dim }
    }

    pub fn same_resolution(&self, other: &Grid) -> bool {
        (self.width - other.width).abs() <= 1e-14 * self.width.max(other.width)
            && self.internal_dim == other.internal_dim
    }
}

/// Piecewise-constant function on a grid. `coeffs[mode(i, j)]` is the value of
/// the `j`-th internal coordinate on cell `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: Grid,
    coeffs: Vec<C64>,
    real: bool,
}

impl GridFn {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, coeffs: vec![C64::new(0.0, 0.0); grid.dim()], real: true }
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.dim() {
            return dimension(format!("expected {} values, got {}", grid.dim(), values.len()));
        }
        let coeffs = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        Ok(Self { grid, coeffs, real: true })
    }

    /// Complex-valued function. The real flag is set only if every imaginary
    /// part vanishes.
    pub fn from_complex(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.dim() {
            return dimension(format!("expected {} values, got {}", grid.dim(), values.len()));
        }
        let real = values.iter().all(|c| c.im == 0.0);
        Ok(Self { grid, coeffs: values, real })
    }

    /// Indicator of `[0, k*width]` tensored with the internal basis vector `e_j`.
    pub fn indicator(grid: Grid, k: usize, j: usize) -> Result<Self> {
        if k > grid.cells {
            return domain(format!("indicator length {k} exceeds {} cells", grid.cells));
        }
        if j >= grid.internal_dim {
            return domain(format!("internal index {j} out of range {}", grid.internal_dim));
        }
        let mut f = Self::zeros(grid);
        for i in 0..k {
            f.coeffs[grid.mode(i, j)] = C64::new(1.0, 0.0);
        }
        Ok(f)
    }

    /// Normalized indicator of a single cell, the orthonormal mode `(cell, j)`.
    pub fn mode_vector(grid: Grid, cell: usize, j: usize) -> Result<Self> {
        if cell >= grid.cells || j >= grid.internal_dim {
            return domain(format!("mode ({cell}, {j}) outside grid"));
        }
        let mut f = Self::zeros(grid);
        f.coeffs[grid.mode(cell, j)] = C64::new(1.0 / grid.width.sqrt(), 0.0);
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// `<f, g> = width * sum conj(f) g`.
    pub fn inner(&self, other: &GridFn) -> Result<C64> {
        if self.grid != other.grid {
            return dimension("inner product of functions on different grids");
        }
        let s: C64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.width)
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.width
    }

    /// Coordinates in the orthonormal mode basis.
    pub fn modes(&self) -> Vec<C64> {
        let s = self.grid.width.sqrt();
        self.coeffs.iter().map(|c| c * s).collect()
    }

    /// Largest cell index carrying a nonzero value.
    pub fn support_end(&self) -> Option<usize> {
        let n = self.grid.internal_dim;
        (0..self.grid.cells).rev().find(|&i| (0..n).any(|j| self.coeffs[i * n + j] != C64::new(0.0, 0.0)))
    }

    /// Translation by `k` cells within the same grid. Fails if the support
    /// would be pushed past the last cell.
    pub fn shift(&self, k: usize) -> Result<GridFn> {
        if let Some(end) = self.support_end() {
            if end + k >= self.grid.cells {
                return Err(crate::Error::Truncation(format!(
                    "shift by {k} moves cell {end} beyond {} cells",
                    self.grid.cells
                )));
            }
        }
        let n = self.grid.internal_dim;
        let mut out = GridFn::zeros(self.grid);
        for p in 0..self.grid.dim().saturating_sub(k * n) {
            out.coeffs[p + k * n] = self.coeffs[p];
        }
        out.real = self.real;
        Ok(out)
    }

    /// The same function on the refined grid.
    pub fn refine(&self) -> GridFn {
        let g = self.grid.refine();
        let n = self.grid.internal_dim;
        let mut out = GridFn::zeros(g);
        for i in 0..self.grid.cells {
            for j in 0..n {
                let v = self.coeffs[i * n + j];
                out.coeffs[g.mode(2 * i, j)] = v;
                out.coeffs[g.mode(2 * i + 1, j)] = v;
            }
        }
        out.real = self.real;
        out
    }

    pub fn scale(&self, c: C64) -> GridFn {
        let coeffs: Vec<C64> = self.coeffs.iter().map(|v| v * c).collect();
        let real = coeffs.iter().all(|v| v.im == 0.0);
        GridFn { grid: self.grid, coeffs, real }
    }

    pub fn add(&self, other: &GridFn) -> Result<GridFn> {
        if self.grid != other.grid {
            return dimension("sum of functions on different grids");
        }
        let coeffs: Vec<C64> = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(GridFn { grid: self.grid, coeffs, real: self.real && other.real })
    }
}

/// Isometric embedding of the grid with `m - k` cells into the grid with `m`
/// cells, translating by `k` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftMap {
    pub source: Grid,
    pub target: Grid,
    pub k: usize,
}

impl ShiftMap {
    pub fn new(target: Grid, k: usize) -> Result<Self> {
        if k > target.cells {
            return domain(format!("shift {k} exceeds {} cells", target.cells));
        }
        Ok(Self { source: target.with_cells(target.cells - k), target, k })
    }

    /// Image of a source mode index.
    pub fn mode(&self, p: usize) -> usize {
        p + self.k * self.target.internal_dim
    }

    pub fn apply(&self, f: &GridFn) -> Result<GridFn> {
        if f.grid != self.source {
            return dimension("function does not live on the shift source grid");
        }
        let mut out = GridFn::zeros(self.target);
        for (p, c) in f.coeffs.iter().enumerate() {
            out.coeffs[self.mode(p)] = *c;
        }
        out.real = f.real;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_norm() {
        let g = Grid::new(2, 0.5, 2).unwrap();
        let f = GridFn::indicator(g, 1, 1).unwrap();
        assert!((f.norm_sq() - 0.5).abs() < 1e-15);
        assert!(GridFn::indicator(g, 3, 0).is_err());
        assert!(GridFn::indicator(g, 1, 2).is_err());
    }

    #[test]
    fn indicators_have_min_overlap() {
        let g = Grid::new(6, 0.25, 1).unwrap();
        for s in 0..=6 {
            for t in 0..=6 {
                let a = GridFn::indicator(g, s, 0).unwrap();
                let b = GridFn::indicator(g, t, 0).unwrap();
                let ip = a.inner(&b).unwrap();
                assert!((ip.re - s.min(t) as f64 * 0.25).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn shift_is_isometric_and_truncates() {
        let g = Grid::new(4, 0.5, 2).unwrap();
        let f = GridFn::indicator(g, 2, 1).unwrap();
        let sf = f.shift(2).unwrap();
        assert!((sf.norm_sq() - f.norm_sq()).abs() < 1e-15);
        assert!(f.shift(3).is_err());
        let map = ShiftMap::new(g, 1).unwrap();
        let src = GridFn::indicator(map.source, 3, 0).unwrap();
        let img = map.apply(&src).unwrap();
        assert_eq!(img.support_end(), Some(3));
        assert!((img.norm_sq() - src.norm_sq()).abs() < 1e-15);
    }

    #[test]
    fn refinement_preserves_inner_products() {
        let g = Grid::new(3, 1.0, 2).unwrap();
        let f = GridFn::from_complex(g, (0..6).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect()).unwrap();
        let h = GridFn::indicator(g, 2, 1).unwrap();
        let a = f.inner(&h).unwrap();
        let b = f.refine().inner(&h.refine()).unwrap();
        assert!((a - b).norm() < 1e-13);
        assert!(!f.is_real());
    }

    #[test]
    fn mode_vectors_are_orthonormal() {
        let g = Grid::new(2, 0.3, 2).unwrap();
        for p in 0..4 {
            for q in 0..4 {
                let a = GridFn::mode_vector(g, p / 2, p % 2).unwrap();
                let b = GridFn::mode_vector(g, q / 2, q % 2).unwrap();
                let want = if p == q { 1.0 } else { 0.0 };
                assert!((a.inner(&b).unwrap().re - want).abs() < 1e-14);
            }
        }
    }
}
