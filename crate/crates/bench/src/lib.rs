//! Shared fixtures for the benchmarks.

use fockflow_core::ito::cell_addit;
use fockflow_core::{AdditFamily, Grid, GridFn, Result, SuperProductSystem};

/// CAR system with a real one-cell addit, the setting of the Exp benches.
pub fn car_with_addit(n: usize, width: f64, cells: usize) -> Result<(SuperProductSystem, AdditFamily)> {
    let sps = SuperProductSystem::car(n, width, cells)?;
    let values: Vec<f64> = (0..n).map(|j| 0.3 + 0.2 * j as f64).collect();
    let b = cell_addit(&sps, &GridFn::from_real(Grid::new(1, width, n)?, &values)?)?;
    Ok((sps, b))
}
