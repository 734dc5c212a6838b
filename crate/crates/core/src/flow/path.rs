use alloc::vec::Vec;

use crate::connection::{split_velocity, Connection};
use crate::dirac::{BlockLabel, BlockLayout};
use crate::forms::TrigPolyForm;
use crate::math::sqrt;
use crate::{Error, Result};

/// Straight path `A_s = A0 + s·v` sampled on `0 = s_0 < … < s_N = 1`.
#[derive(Clone, Debug)]
pub struct PathSpec {
    a0: Connection,
    velocity: TrigPolyForm,
    grid: Vec<f64>,
    cutoff: usize,
    gap: f64,
}

impl PathSpec {
    /// Uniform grid with `intervals` steps.
    pub fn new(a0: Connection, velocity: TrigPolyForm, intervals: usize, cutoff: usize, gap: f64) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::InvalidInput("path grid needs at least one interval".into()));
        }
        let grid = (0..=intervals).map(|i| i as f64 / intervals as f64).collect();
        Self::with_grid(a0, velocity, grid, cutoff, gap)
    }

    pub fn with_grid(a0: Connection, velocity: TrigPolyForm, grid: Vec<f64>, cutoff: usize, gap: f64) -> Result<Self> {
        split_velocity(&velocity, a0.dim(), a0.fiber())?;
        if grid.len() < 2 || grid[0] != 0.0 || *grid.last().unwrap() != 1.0 {
            return Err(Error::InvalidInput("path grid must run from 0 to 1".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("path grid must be strictly increasing".into()));
        }
        if !(gap > 0.0) {
            return Err(Error::InvalidInput("endpoint gap must be positive".into()));
        }
        Ok(Self { a0, velocity, grid, cutoff, gap })
    }

    /// The straight path from `a0` to `a1`.
    pub fn between(a0: &Connection, a1: &Connection, intervals: usize, cutoff: usize, gap: f64) -> Result<Self> {
        let v = a0.difference_to(a1)?;
        Self::new(a0.clone(), v, intervals, cutoff, gap)
    }

    pub fn start(&self) -> &Connection {
        &self.a0
    }

    pub fn velocity(&self) -> &TrigPolyForm {
        &self.velocity
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn dim(&self) -> usize {
        self.a0.dim()
    }

    pub fn at(&self, s: f64) -> Result<Connection> {
        self.a0.shifted(&self.velocity, s)
    }

    pub fn end(&self) -> Result<Connection> {
        self.at(1.0)
    }

    /// Same path traversed backwards, on the mirrored grid.
    pub fn reversed(&self) -> Result<Self> {
        let grid = self.grid.iter().rev().map(|s| 1.0 - s).collect();
        Self::with_grid(self.end()?, self.velocity.scale_real(-1.0), grid, self.cutoff, self.gap)
    }

    /// Grid with every interval halved.
    pub fn refined(&self) -> Self {
        let mut grid = Vec::with_capacity(2 * self.grid.len());
        for w in self.grid.windows(2) {
            grid.push(w[0]);
            grid.push(0.5 * (w[0] + w[1]));
        }
        grid.push(1.0);
        Self { grid, ..self.clone() }
    }

    /// Block layout shared by every `A_s`.
    pub fn layout(&self) -> Result<BlockLayout> {
        let end = self.end()?;
        BlockLayout::for_connections(&[&self.a0, &end], self.cutoff)
    }

    /// `‖dD/ds‖ <= |θ̇| + Σ|v_osc|`: eigenvalues move at most this fast.
    pub fn velocity_bound(&self) -> f64 {
        let (dhol, dosc) = split_velocity(&self.velocity, self.a0.dim(), self.a0.fiber()).expect("validated");
        sqrt(dhol.iter().map(|x| x * x).sum()) + dosc.coefficient_l1()
    }

    /// Bound on the oscillatory mass of every `A_s`.
    pub fn oscillation_bound(&self) -> f64 {
        let (_, dosc) = split_velocity(&self.velocity, self.a0.dim(), self.a0.fiber()).expect("validated");
        self.a0.oscillatory().coefficient_l1() + dosc.coefficient_l1()
    }

    /// Blocks that can carry an eigenvalue with `|λ| <= window` somewhere on the path.
    pub fn labels_within(&self, layout: &BlockLayout, window: f64) -> Result<Vec<BlockLabel>> {
        let end = self.end()?;
        Ok(layout.labels_within(self.a0.holonomy(), end.holonomy(), self.oscillation_bound(), window))
    }
}
