//! Discretized functional data: grids on `[0, 1]`, curves and samples.
//!
//! Every integral over `[0, 1]` is computed with equal quadrature weights
//! `1/m`, so integrals of indicator functions are exact proportions of grid
//! points. Depth formulas are proportions of grid points as well, which keeps
//! the two in bit-exact agreement.

use crate::error::{FrecError, Result};

/// Ordered abscissae in `[0, 1]` with equal quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// Builds a grid from strictly increasing points in `[0, 1]`.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(FrecError::invalid(format!(
                "grid needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points
            .iter()
            .any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0)
        {
            return Err(FrecError::invalid("grid points must lie in [0, 1]"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FrecError::invalid(
                "grid points must be strictly increasing",
            ));
        }
        let w = 1.0 / points.len() as f64;
        let weights = vec![w; points.len()];
        Ok(Grid { points, weights })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: a grid has at least two points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `m` equispaced points `k/(m-1)`, endpoints included.
pub fn uniform_grid(m: usize) -> Result<Grid> {
    if m < 2 {
        return Err(FrecError::invalid(format!(
            "uniform grid needs m >= 2, got {m}"
        )));
    }
    let denom = (m - 1) as f64;
    let mut points: Vec<f64> = (0..m).map(|k| k as f64 / denom).collect();
    // k/(m-1) is exact at both ends, but pin them anyway.
    points[0] = 0.0;
    points[m - 1] = 1.0;
    Grid::new(points)
}

/// A function observed at the points of some grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    values: Vec<f64>,
}

impl Curve {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(FrecError::invalid(format!(
                "non-finite curve value at grid index {k}"
            )));
        }
        Ok(Curve { values })
    }

    /// Constant function `c` on a grid of length `m`.
    pub fn constant(c: f64, m: usize) -> Result<Self> {
        Curve::new(vec![c; m])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Grid average of the values.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// A functional time series: curves `x_1, ..., x_n` in time order on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    grid: Grid,
    curves: Vec<Curve>,
}

impl FunctionalSample {
    pub fn new(grid: Grid, curves: Vec<Curve>) -> Result<Self> {
        if curves.is_empty() {
            return Err(FrecError::invalid(
                "a functional sample needs at least one curve",
            ));
        }
        if let Some(i) = curves.iter().position(|c| c.len() != grid.len()) {
            return Err(FrecError::invalid(format!(
                "curve {} has {} values but the grid has {} points",
                i + 1,
                curves[i].len(),
                grid.len()
            )));
        }
        Ok(FunctionalSample { grid, curves })
    }

    /// Builds a sample on a uniform grid from raw rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map(Vec::len).unwrap_or(0);
        let grid = uniform_grid(m)?;
        let curves = rows
            .into_iter()
            .map(Curve::new)
            .collect::<Result<Vec<_>>>()?;
        FunctionalSample::new(grid, curves)
    }

    /// Constant curves `c_i` on the given grid.
    pub fn constants(values: &[f64], grid: &Grid) -> Result<Self> {
        let curves = values
            .iter()
            .map(|&c| Curve::constant(c, grid.len()))
            .collect::<Result<Vec<_>>>()?;
        FunctionalSample::new(grid.clone(), curves)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn curve(&self, i: usize) -> &Curve {
        &self.curves[i]
    }

    /// Number of curves `n`.
    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// The first `j` curves.
    pub fn prefix(&self, j: usize) -> Result<Self> {
        if j == 0 || j > self.len() {
            return Err(FrecError::invalid(format!(
                "prefix length {j} outside 1..={}",
                self.len()
            )));
        }
        Ok(FunctionalSample {
            grid: self.grid.clone(),
            curves: self.curves[..j].to_vec(),
        })
    }

    /// Applies `x -> scale * x + shift` to every curve.
    pub fn affine(&self, scale: f64, shift: &Curve) -> Result<Self> {
        if shift.len() != self.grid.len() {
            return Err(FrecError::invalid("shift curve does not match the grid"));
        }
        let curves = self
            .curves
            .iter()
            .map(|c| {
                Curve::new(
                    c.values()
                        .iter()
                        .zip(shift.values())
                        .map(|(x, z)| scale * x + z)
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        FunctionalSample::new(self.grid.clone(), curves)
    }

    /// Row-major view: `values[i][k]` is curve `i` at grid point `k`.
    pub fn rows(&self) -> Vec<&[f64]> {
        self.curves.iter().map(Curve::values).collect()
    }
}

/// Quadrature inner product `sum_k w_k a_k b_k`.
pub fn inner_product(a: &Curve, b: &Curve, grid: &Grid) -> Result<f64> {
    if a.len() != grid.len() || b.len() != grid.len() {
        return Err(FrecError::invalid(format!(
            "inner product of curves with lengths {} and {} on a {}-point grid",
            a.len(),
            b.len(),
            grid.len()
        )));
    }
    Ok(inner_product_slices(a.values(), b.values(), grid.weights()))
}

pub(crate) fn inner_product_slices(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| w * x * y).sum()
}

/// Lebesgue measure of `{s : mask(s)}` under the grid quadrature.
pub fn time_fraction(mask: &[bool], grid: &Grid) -> Result<f64> {
    if mask.len() != grid.len() {
        return Err(FrecError::invalid(format!(
            "mask has {} entries but the grid has {} points",
            mask.len(),
            grid.len()
        )));
    }
    // Equal weights: count, then divide once so complementary masks sum to 1 exactly.
    let hits = mask.iter().filter(|&&b| b).count();
    Ok(hits as f64 / grid.len() as f64)
}
