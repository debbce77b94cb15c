//! Tile coding: sparse binary state-action features for linear Q-values.
//!
//! Each of `tilings` grids partitions the (normalized) state box into
//! `bins^dims` cells; tiling `i` is shifted diagonally by `i / (tilings * bins)`
//! of the range in every dimension. A state activates exactly one cell per
//! tiling, and each action owns a disjoint block of the index space, so an
//! encoded state-action pair has exactly `tilings` active features.

use crate::envs::ContinuousState;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TileCoderSpec {
    pub bins_per_dim: usize,
    pub tilings: usize,
    /// Per-dimension closed normalization bounds (lo, hi).
    pub bounds: Vec<(f64, f64)>,
    pub action_count: usize,
}

/// Sparse binary feature vector: the indices of the active tiles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseFeatures {
    active: Vec<u32>,
    total_dim: usize,
}

impl SparseFeatures {
    /// Builds from explicit active indices (must be sorted and unique).
    pub fn from_indices(active: Vec<u32>, total_dim: usize) -> Self {
        assert!(
            active.windows(2).all(|w| w[0] < w[1]),
            "active indices must be sorted and unique"
        );
        assert!(active.iter().all(|&i| (i as usize) < total_dim));
        SparseFeatures { active, total_dim }
    }

    /// The all-zero feature vector (used for terminal next-states).
    pub fn zero(total_dim: usize) -> Self {
        SparseFeatures {
            active: Vec::new(),
            total_dim,
        }
    }

    pub fn active(&self) -> &[u32] {
        &self.active
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }
}

/// Linear state-action value: the sum of `theta` at the active indices.
pub fn q_value(theta: &[f64], features: &SparseFeatures) -> Result<f64> {
    if theta.len() != features.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: features.total_dim(),
            got: theta.len(),
        });
    }
    Ok(features
        .active()
        .iter()
        .map(|&i| theta[i as usize])
        .sum())
}

#[derive(Clone, Debug)]
pub struct TileCoder {
    bins: usize,
    tilings: usize,
    lo: Vec<f64>,
    span: Vec<f64>,
    action_count: usize,
    cells_per_tiling: usize,
    total_dim: usize,
}

impl TileCoder {
    pub fn new(spec: TileCoderSpec) -> Result<Self> {
        if spec.bins_per_dim == 0 {
            return Err(Error::config("bins", "bins_per_dim must be at least 1"));
        }
        if spec.tilings == 0 {
            return Err(Error::config("tilings", "tilings must be at least 1"));
        }
        if spec.bounds.is_empty() {
            return Err(Error::config("bounds", "at least one dimension required"));
        }
        if spec.action_count == 0 {
            return Err(Error::config("action_count", "must be at least 1"));
        }
        let mut lo = Vec::with_capacity(spec.bounds.len());
        let mut span = Vec::with_capacity(spec.bounds.len());
        for (d, &(l, h)) in spec.bounds.iter().enumerate() {
            if !(l < h) {
                return Err(Error::config(
                    format!("bounds[{d}]"),
                    format!("must be strictly ordered, got ({l}, {h})"),
                ));
            }
            lo.push(l);
            span.push(h - l);
        }
        let cells_per_tiling = spec.bins_per_dim.pow(spec.bounds.len() as u32);
        let total_dim = spec.action_count * spec.tilings * cells_per_tiling;
        Ok(TileCoder {
            bins: spec.bins_per_dim,
            tilings: spec.tilings,
            lo,
            span,
            action_count: spec.action_count,
            cells_per_tiling,
            total_dim,
        })
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn tilings(&self) -> usize {
        self.tilings
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Encodes a state-action pair. The state is clipped to the coder bounds,
    /// so encoding is total on any input state of the right dimension.
    pub fn encode(&self, state: &ContinuousState, action: usize) -> SparseFeatures {
        assert!(action < self.action_count, "action index out of range");
        let coords = state.coords();
        assert_eq!(coords.len(), self.dims(), "state dimension mismatch");

        let mut active = Vec::with_capacity(self.tilings);
        let action_base = action * self.tilings * self.cells_per_tiling;
        for tiling in 0..self.tilings {
            let mut cell = 0usize;
            for (d, &x) in coords.iter().enumerate() {
                // odd displacement vector (1, 3, 5, ...): tiling i shifts by
                // (2d+1)*i fine-grid units in dimension d, so the overlap
                // refines every axis instead of only the diagonal
                let offset = ((2 * d + 1) * tiling % self.tilings) as f64 / self.tilings as f64;
                let z = ((x - self.lo[d]) / self.span[d]).clamp(0.0, 1.0);
                let pos = (z * self.bins as f64 + offset).floor() as usize;
                cell = cell * self.bins + pos.min(self.bins - 1);
            }
            active.push((action_base + tiling * self.cells_per_tiling + cell) as u32);
        }
        SparseFeatures {
            active,
            total_dim: self.total_dim,
        }
    }
}
