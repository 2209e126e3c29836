use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_trial, ShotSplit, TrialOutcome};
use crate::error::{Error, Result};
use crate::state::haar_random_pure;

/// Grid sweep over copy counts and fidelities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Strictly increasing copy counts, each at least 3.
    pub n_grid: Vec<u64>,
    /// Strictly increasing fidelities in `(0.5, 1]`.
    pub g_grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub shot_split: ShotSplit,
}

impl SimConfig {
    pub fn new(n_grid: Vec<u64>, g_grid: Vec<f64>, trials: usize, master_seed: u64) -> Self {
        Self {
            n_grid,
            g_grid,
            trials,
            master_seed,
            shot_split: ShotSplit::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.g_grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 3) {
            return Err(Error::InvalidConfig(format!(
                "copy count {n} leaves a basis without shots"
            )));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig(
                "n grid must be strictly increasing".into(),
            ));
        }
        if let Some(&g) = self.g_grid.iter().find(|&&g| !(g > 0.5 && g <= 1.0)) {
            return Err(Error::FidelityOutOfDomain {
                value: g,
                low: 0.5,
                high: 1.0,
            });
        }
        if !self.g_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig(
                "g grid must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Aggregated trials at one `(n, g)` grid node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub n: u64,
    pub g: f64,
    pub mean_infidelity: f64,
    pub mean_bures_sq: f64,
    /// Standard error of `mean_infidelity`.
    pub stderr: f64,
    pub stderr_bures_sq: f64,
    pub trials: usize,
    /// Trials whose estimate had a tied top eigenvalue.
    pub degenerate: usize,
}

/// Simulation results, row-major over `(n, g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimGrid {
    pub n_grid: Vec<u64>,
    pub g_grid: Vec<f64>,
    pub cells: Vec<GridCell>,
}

impl SimGrid {
    pub fn cell(&self, j: usize, k: usize) -> &GridCell {
        &self.cells[j * self.g_grid.len() + k]
    }

    /// Rebuilds the grid axes from a complete, row-major cell list.
    pub fn from_cells(cells: Vec<GridCell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let mut n_grid: Vec<u64> = Vec::new();
        let mut g_grid: Vec<f64> = Vec::new();
        for c in &cells {
            if n_grid.last() != Some(&c.n) {
                n_grid.push(c.n);
            }
            if !g_grid.contains(&c.g) {
                g_grid.push(c.g);
            }
        }
        if cells.len() != n_grid.len() * g_grid.len() {
            return Err(Error::Table("grid is not rectangular".into()));
        }
        let grid = Self {
            n_grid,
            g_grid,
            cells,
        };
        for j in 0..grid.n_grid.len() {
            for k in 0..grid.g_grid.len() {
                let c = grid.cell(j, k);
                if c.n != grid.n_grid[j] || c.g != grid.g_grid[k] {
                    return Err(Error::Table(format!(
                        "cell ({}, {}) out of row-major order",
                        c.n, c.g
                    )));
                }
            }
        }
        if !grid.n_grid.windows(2).all(|w| w[0] < w[1])
            || !grid.g_grid.windows(2).all(|w| w[0] < w[1])
        {
            return Err(Error::Table("grid axes must be strictly increasing".into()));
        }
        Ok(grid)
    }
}

/// Counter-based stream for trial `i` at grid node `(j, k)`: the seed bytes
/// are the four indices, so streams never depend on scheduling.
pub fn trial_rng(master_seed: u64, j: usize, k: usize, i: usize) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&(j as u64).to_le_bytes());
    seed[16..24].copy_from_slice(&(k as u64).to_le_bytes());
    seed[24..32].copy_from_slice(&(i as u64).to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

/// Neumaier-compensated sum in iteration order.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs `trials` Haar-random states at every grid node. Trials execute on the
/// current rayon pool; results are independent of the thread count.
pub fn simulate_grid(config: &SimConfig) -> Result<SimGrid> {
    config.validate()?;
    let n_len = config.n_grid.len();
    let g_len = config.g_grid.len();
    let trials = config.trials;

    let outcomes: Vec<TrialOutcome> = (0..n_len * g_len * trials)
        .into_par_iter()
        .map(|idx| {
            let i = idx % trials;
            let node = idx / trials;
            let (j, k) = (node / g_len, node % g_len);
            let mut rng = trial_rng(config.master_seed, j, k, i);
            let psi = haar_random_pure(2, &mut rng)?;
            run_trial(
                &psi,
                config.n_grid[j],
                config.g_grid[k],
                config.shot_split,
                &mut rng,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let cells = outcomes
        .chunks(trials)
        .enumerate()
        .map(|(node, chunk)| {
            let (j, k) = (node / g_len, node % g_len);
            let infid: Vec<f64> = chunk.iter().map(|o| o.infidelity).collect();
            let bures: Vec<f64> = chunk.iter().map(|o| o.bures_sq).collect();
            let (mean_infidelity, stderr) = mean_and_stderr(&infid);
            let (mean_bures_sq, stderr_bures_sq) = mean_and_stderr(&bures);
            GridCell {
                n: config.n_grid[j],
                g: config.g_grid[k],
                mean_infidelity,
                mean_bures_sq,
                stderr,
                stderr_bures_sq,
                trials,
                degenerate: chunk.iter().filter(|o| o.degenerate).count(),
            }
        })
        .collect();

    Ok(SimGrid {
        n_grid: config.n_grid.clone(),
        g_grid: config.g_grid.clone(),
        cells,
    })
}
