//! Periodic grids over the box `T₀ = [0,T¹) × … × [0,Tᵖ)` and fields sampled on them.
//!
//! A grid stores `Nᵅ` nodes per axis at `tᵅ_k = k·hᵅ`, `hᵅ = Tᵅ/Nᵅ`. Node `Nᵅ` is
//! identified with node `0`, so the face conditions of the periodic problem hold
//! by construction and every operator wraps indices modulo `Nᵅ`.
//!
//! Field values are laid out node-major with the field components innermost; the
//! node order is lexicographic in `(k₁, …, k_p)` with the last axis varying
//! fastest. All reductions go through [`pairwise_sum`] in that order, so norms
//! and inner products are bit-reproducible.

mod ops;
mod reduce;
mod spectral;

pub use ops::{
    backward_diff, forward_diff, h1_inner, h1_norm, l2_inner, l2_norm, laplacian, mean, split_mean,
    stacked_diff_norm,
};
pub use reduce::{pairwise_sum, pairwise_sum_by};
pub use spectral::solve_linear_poisson;

use serde::Serialize;

use crate::error::{Error, Result};

/// Periodic discretization of `T₀` together with the number of field components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    extents: Vec<f64>,
    nodes: Vec<usize>,
    components: usize,
}

impl GridSpec {
    pub fn new(extents: Vec<f64>, nodes: Vec<usize>, components: usize) -> Result<Self> {
        if extents.is_empty() {
            return Err(Error::InvalidGrid(
                "at least one time axis is required".into(),
            ));
        }
        if extents.len() != nodes.len() {
            return Err(Error::InvalidGrid(format!(
                "{} extents but {} node counts",
                extents.len(),
                nodes.len()
            )));
        }
        if let Some((axis, t)) = extents
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.is_finite() && **t > 0.0))
        {
            return Err(Error::InvalidGrid(format!(
                "extent of axis {} must be positive and finite, got {t}",
                axis + 1
            )));
        }
        if let Some((axis, n)) = nodes.iter().enumerate().find(|(_, n)| **n < 3) {
            return Err(Error::InvalidGrid(format!(
                "axis {} needs at least 3 nodes, got {n}",
                axis + 1
            )));
        }
        if components == 0 {
            return Err(Error::InvalidGrid(
                "field needs at least one component".into(),
            ));
        }
        Ok(Self {
            extents,
            nodes,
            components,
        })
    }

    /// Number of time axes `p`.
    pub fn dims(&self) -> usize {
        self.extents.len()
    }

    /// Number of field components `n`.
    pub fn components(&self) -> usize {
        self.components
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extents[axis] / self.nodes[axis] as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.dims()).map(|a| self.spacing(a)).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dims()).map(|a| self.spacing(a)).product()
    }

    /// `Π Tᵅ`, computed from the extents rather than from the spacings.
    pub fn volume(&self) -> f64 {
        self.extents.iter().product()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.iter().product()
    }

    /// Length of the flat value array.
    pub fn len(&self) -> usize {
        self.node_count() * self.components
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat-node stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.nodes[axis + 1..].iter().product()
    }

    /// Multi-index of a flat node number.
    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims()];
        let mut rest = node;
        for axis in (0..self.dims()).rev() {
            idx[axis] = rest % self.nodes[axis];
            rest /= self.nodes[axis];
        }
        idx
    }

    /// Flat node number of a multi-index (indices are taken modulo `Nᵅ`).
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.nodes)
            .fold(0, |acc, (k, n)| acc * n + k % n)
    }

    /// Coordinates `t_k` of a flat node number, written into `out`.
    pub fn coords_into(&self, node: usize, out: &mut [f64]) {
        let mut rest = node;
        for axis in (0..self.dims()).rev() {
            let k = rest % self.nodes[axis];
            rest /= self.nodes[axis];
            out[axis] = k as f64 * self.spacing(axis);
        }
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        let mut t = vec![0.0; self.dims()];
        self.coords_into(node, &mut t);
        t
    }

    /// Flat node reached from `node` by one step of `+1` or `-1` along `axis`, with wrap.
    #[inline]
    pub fn neighbor(&self, node: usize, axis: usize, forward: bool) -> usize {
        let stride = self.stride(axis);
        let n = self.nodes[axis];
        let k = (node / stride) % n;
        if forward {
            if k + 1 == n {
                node - (n - 1) * stride
            } else {
                node + stride
            }
        } else if k == 0 {
            node + (n - 1) * stride
        } else {
            node - stride
        }
    }

    /// Nearest node to an arbitrary point of `Rᵖ`, folded into the periodic box.
    pub fn nearest_node(&self, t: &[f64]) -> usize {
        let idx: Vec<usize> = (0..self.dims())
            .map(|a| {
                let n = self.nodes[a] as i64;
                let k = (t[a] / self.spacing(a)).round() as i64;
                k.rem_euclid(n) as usize
            })
            .collect();
        self.flat_index(&idx)
    }

    /// Discrete Wirtinger constant `max_α hᵅ / (2 sin(π/Nᵅ))`.
    ///
    /// This is `λ_min^{-1/2}` for the forward-difference Dirichlet form, so the
    /// lowest Fourier mode on the coarsest axis attains it.
    pub fn wirtinger_constant(&self) -> f64 {
        (0..self.dims())
            .map(|a| self.spacing(a) / (2.0 * (std::f64::consts::PI / self.nodes[a] as f64).sin()))
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dims() {
            Ok(())
        } else {
            Err(Error::AxisOutOfRange {
                axis,
                dims: self.dims(),
            })
        }
    }
}

/// A map from grid nodes to `Rⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn constant(grid: &GridSpec, value: &[f64]) -> Result<Self> {
        if value.len() != grid.components() {
            return Err(Error::ComponentMismatch {
                expected: grid.components(),
                got: value.len(),
            });
        }
        let values = (0..grid.node_count())
            .flat_map(|_| value.iter().copied())
            .collect();
        Self::new(grid.clone(), values)
    }

    /// Samples `f(t, out)` at every node.
    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(&[f64], &mut [f64])) -> Result<Self> {
        let n = grid.components();
        let mut values = vec![0.0; grid.len()];
        let mut t = vec![0.0; grid.dims()];
        for (node, chunk) in values.chunks_exact_mut(n).enumerate() {
            grid.coords_into(node, &mut t);
            f(&t, chunk);
        }
        Self::new(grid.clone(), values)
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Components at a flat node.
    pub fn at(&self, node: usize) -> &[f64] {
        let n = self.grid.components();
        &self.values[node * n..(node + 1) * n]
    }

    pub fn component(&self, node: usize, i: usize) -> f64 {
        self.values[node * self.grid.components() + i]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + s * b)
            .collect();
        Field::new(self.grid.clone(), values)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.axpy(-1.0, other)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.axpy(1.0, other)
    }

    pub fn scale(&self, s: f64) -> Field {
        Field::from_raw(
            self.grid.clone(),
            self.values.iter().map(|v| s * v).collect(),
        )
    }

    /// Adds `shift[i]` to component `i` at every node.
    pub fn add_constant(&self, shift: &[f64]) -> Result<Field> {
        if shift.len() != self.grid.components() {
            return Err(Error::ComponentMismatch {
                expected: self.grid.components(),
                got: shift.len(),
            });
        }
        let n = shift.len();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| v + shift[j % n])
            .collect();
        Field::new(self.grid.clone(), values)
    }

    /// Cyclic shift of node indices by `offset` along `axis`: `out(k) = u(k + offset·e_α)`.
    pub fn roll(&self, axis: usize, offset: usize) -> Result<Field> {
        self.grid.check_axis(axis)?;
        let n = self.grid.components();
        let mut values = vec![0.0; self.values.len()];
        for node in 0..self.grid.node_count() {
            let mut idx = self.grid.multi_index(node);
            idx[axis] += offset;
            let src = self.grid.flat_index(&idx);
            values[node * n..(node + 1) * n].copy_from_slice(self.at(src));
        }
        Ok(Field::from_raw(self.grid.clone(), values))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute node-wise difference.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(vec![1.0], vec![2], 1).is_err());
        assert!(GridSpec::new(vec![0.0], vec![4], 1).is_err());
        assert!(GridSpec::new(vec![-1.0], vec![4], 1).is_err());
        assert!(GridSpec::new(vec![1.0, 1.0], vec![4], 1).is_err());
        assert!(GridSpec::new(vec![1.0], vec![4], 0).is_err());
        assert!(GridSpec::new(vec![], vec![], 1).is_err());
    }

    #[test]
    fn index_roundtrip_and_neighbors() {
        let g = GridSpec::new(vec![1.0, 2.0, 3.0], vec![3, 4, 5], 2).unwrap();
        for node in 0..g.node_count() {
            let idx = g.multi_index(node);
            assert_eq!(g.flat_index(&idx), node);
            for axis in 0..3 {
                let f = g.neighbor(node, axis, true);
                let b = g.neighbor(f, axis, false);
                assert_eq!(b, node);
                let mut j = idx.clone();
                j[axis] = (j[axis] + 1) % g.nodes()[axis];
                assert_eq!(g.flat_index(&j), f);
            }
        }
    }

    #[test]
    fn coordinates_and_volumes() {
        let g = GridSpec::new(vec![4.0, 2.0], vec![4, 8], 1).unwrap();
        assert_eq!(g.coords(g.flat_index(&[3, 5])), vec![3.0, 1.25]);
        assert_eq!(g.volume(), 8.0);
        assert_eq!(g.cell_volume(), 0.25);
        assert_eq!(g.nearest_node(&[4.1, -0.2]), g.flat_index(&[0, 7]));
    }

    #[test]
    fn non_finite_values_rejected() {
        let g = GridSpec::new(vec![1.0], vec![3], 1).unwrap();
        assert!(matches!(
            Field::new(g, vec![0.0, f64::NAN, 1.0]),
            Err(Error::NonFinite { index: 1 })
        ));
    }
}
