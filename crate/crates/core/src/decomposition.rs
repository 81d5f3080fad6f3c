//! Hypercube region grid with a lock-free per-region minimum cost table.
//!
//! Costs are nonnegative, and IEEE-754 bit patterns of nonnegative doubles
//! (including +inf) sort the same way as the values they encode when read as
//! unsigned integers. The table therefore stores raw bit patterns in
//! `AtomicU64`s and a CAS loop on the integers implements a floating minimum.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::problem::{GridResolution, Interval, PlannerConfig, PlanningProblem, State};

/// Order-preserving encoding of a nonnegative cost (or +inf).
#[inline]
pub fn encode_cost(c: f64) -> u64 {
    debug_assert!(c >= 0.0, "costs are nonnegative, got {c}");
    // Adding +0.0 folds -0.0 into +0.0.
    (c + 0.0).to_bits()
}

#[inline]
pub fn decode_cost(bits: u64) -> f64 {
    f64::from_bits(bits)
}

pub const INFINITE_COST_BITS: u64 = 0x7ff0_0000_0000_0000;

/// Result of submitting a cost to a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateOutcome {
    Improved,
    Equal,
    Worse,
}

impl UpdateOutcome {
    /// Whether the submitting node still holds (or ties) the region minimum.
    pub fn admits(self) -> bool {
        matches!(self, UpdateOutcome::Improved | UpdateOutcome::Equal)
    }
}

pub struct RegionGrid {
    dims: Vec<usize>,
    bounds: Vec<Interval>,
    cells: Vec<usize>,
    side: Vec<f64>,
    delta: f64,
    table: Vec<AtomicU64>,
}

impl std::fmt::Debug for RegionGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RegionGrid")
            .field("dims", &self.dims)
            .field("cells", &self.cells)
            .field("delta", &self.delta)
            .finish_non_exhaustive()
    }
}

/// Copies the current contents of the cost table.
impl Clone for RegionGrid {
    fn clone(&self) -> Self {
        RegionGrid {
            dims: self.dims.clone(),
            bounds: self.bounds.clone(),
            cells: self.cells.clone(),
            side: self.side.clone(),
            delta: self.delta,
            table: self
                .table
                .iter()
                .map(|c| AtomicU64::new(c.load(Ordering::Acquire)))
                .collect(),
        }
    }
}

impl RegionGrid {
    /// Builds a grid over the state dimensions `dims` with per-dimension `bounds`.
    ///
    /// With [`GridResolution::Delta`], each dimension gets
    /// `max(1, ceil(width * sqrt(n) / delta))` cells so the cell diagonal is at
    /// most `delta`.
    pub fn build(
        dims: Vec<usize>,
        bounds: Vec<Interval>,
        resolution: &GridResolution,
        cell_ceiling: usize,
    ) -> Result<Self> {
        if dims.is_empty() || dims.len() != bounds.len() {
            return Err(Error::Config(format!(
                "grid needs one bound per dimension ({} dims, {} bounds)",
                dims.len(),
                bounds.len()
            )));
        }
        if let Some((i, b)) = bounds.iter().enumerate().find(|(_, b)| !(b.lo < b.hi)) {
            return Err(Error::Config(format!(
                "grid bound {i} must have lo < hi, got [{}, {}]",
                b.lo, b.hi
            )));
        }
        let n = dims.len() as f64;
        let cells: Vec<usize> = match resolution {
            GridResolution::Delta(delta) => {
                if !(*delta > 0.0) {
                    return Err(Error::Config(format!(
                        "delta must be positive, got {delta}"
                    )));
                }
                bounds
                    .iter()
                    .map(|b| {
                        let exact = b.width() * n.sqrt() / delta;
                        // Tolerate roundoff so exact multiples don't gain a cell.
                        let c = (exact - 1e-9 * exact.max(1.0)).ceil();
                        if c >= usize::MAX as f64 {
                            usize::MAX
                        } else {
                            (c as usize).max(1)
                        }
                    })
                    .collect()
            }
            GridResolution::Cells(c) => {
                if c.len() != dims.len() {
                    return Err(Error::Config(format!(
                        "{} cell counts given for {} grid dimensions",
                        c.len(),
                        dims.len()
                    )));
                }
                if c.iter().any(|&k| k < 1) {
                    return Err(Error::Config("cell counts must be >= 1".into()));
                }
                c.clone()
            }
        };
        let count = cells
            .iter()
            .try_fold(1u128, |acc, &c| acc.checked_mul(c as u128))
            .unwrap_or(u128::MAX);
        if count > cell_ceiling as u128 {
            return Err(Error::GridTooFine {
                count,
                ceiling: cell_ceiling,
            });
        }
        let side: Vec<f64> = bounds
            .iter()
            .zip(&cells)
            .map(|(b, &c)| b.width() / c as f64)
            .collect();
        let delta = side.iter().map(|s| s * s).sum::<f64>().sqrt();
        let table = (0..count as usize)
            .map(|_| AtomicU64::new(INFINITE_COST_BITS))
            .collect();
        Ok(RegionGrid {
            dims,
            bounds,
            cells,
            side,
            delta,
            table,
        })
    }

    /// Grid for a planning problem: the configured dimensions, or the full
    /// state when that fits under the cell ceiling and position dims otherwise.
    pub fn for_problem(problem: &PlanningProblem, config: &PlannerConfig) -> Result<Self> {
        let bounds_for = |dims: &[usize]| -> Vec<Interval> {
            dims.iter().map(|&d| problem.state_bounds()[d]).collect()
        };
        let n = problem.model.state_dim();
        if let Some(dims) = &config.grid_dims {
            if let Some(&d) = dims.iter().find(|&&d| d >= n) {
                return Err(Error::Config(format!(
                    "grid dimension {d} outside state dimension {n}"
                )));
            }
            return Self::build(
                dims.clone(),
                bounds_for(dims),
                &config.resolution,
                config.cell_ceiling,
            );
        }
        let position: Vec<usize> = problem.model.position_dims().to_vec();
        let full: Vec<usize> = (0..n).collect();
        match &config.resolution {
            GridResolution::Cells(c) if c.len() == position.len() => Self::build(
                position.clone(),
                bounds_for(&position),
                &config.resolution,
                config.cell_ceiling,
            ),
            GridResolution::Cells(_) => Self::build(
                full.clone(),
                bounds_for(&full),
                &config.resolution,
                config.cell_ceiling,
            ),
            GridResolution::Delta(_) => {
                match Self::build(
                    full.clone(),
                    bounds_for(&full),
                    &config.resolution,
                    config.cell_ceiling,
                ) {
                    Err(Error::GridTooFine { .. }) => Self::build(
                        position.clone(),
                        bounds_for(&position),
                        &config.resolution,
                        config.cell_ceiling,
                    ),
                    other => other,
                }
            }
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn cells_per_dim(&self) -> &[usize] {
        &self.cells
    }

    pub fn cell_side(&self) -> &[f64] {
        &self.side
    }

    /// Diagonal length of one cell.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Row-major cell index of `x`, first grid dimension fastest. Out-of-range
    /// coordinates clamp to the boundary cells.
    pub fn region_index(&self, x: &State) -> usize {
        let mut index = 0usize;
        let mut stride = 1usize;
        for (k, &d) in self.dims.iter().enumerate() {
            let cells = self.cells[k];
            let rel = (x[d] - self.bounds[k].lo) / self.side[k];
            let cell = if rel.is_nan() || rel < 0.0 {
                0
            } else {
                (rel.floor() as usize).min(cells - 1)
            };
            index += cell * stride;
            stride *= cells;
        }
        index
    }

    /// Atomically lowers region `i` to `min(stored, cost)`.
    pub fn try_update(&self, i: usize, cost: f64) -> UpdateOutcome {
        assert!(
            cost.is_finite() && cost >= 0.0,
            "region cost must be finite and >= 0, got {cost}"
        );
        let slot = &self.table[i];
        let new = encode_cost(cost);
        let mut cur = slot.load(Ordering::Acquire);
        loop {
            if new > cur {
                return UpdateOutcome::Worse;
            }
            if new == cur {
                return UpdateOutcome::Equal;
            }
            match slot.compare_exchange_weak(cur, new, Ordering::AcqRel, Ordering::Acquire) {
                Ok(_) => return UpdateOutcome::Improved,
                Err(actual) => cur = actual,
            }
        }
    }

    /// Current minimum of region `i` (+inf if nothing reached it yet).
    pub fn cost(&self, i: usize) -> f64 {
        decode_cost(self.cost_bits(i))
    }

    #[inline]
    pub fn cost_bits(&self, i: usize) -> u64 {
        self.table[i].load(Ordering::Acquire)
    }

    /// Copy of the whole table.
    pub fn snapshot(&self) -> Vec<f64> {
        (0..self.table.len()).map(|i| self.cost(i)).collect()
    }

    /// Resets every region to +inf.
    pub fn reset(&mut self) {
        for slot in &mut self.table {
            *slot.get_mut() = INFINITE_COST_BITS;
        }
    }
}
