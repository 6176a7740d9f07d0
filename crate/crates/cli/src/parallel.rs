//! Deterministic parallel evaluation of frequency fields.
//!
//! Each grid point is a pure function of the model, so threads write their
//! values into disjoint preallocated slots and the result is bit-identical
//! to the serial evaluation for any worker count.

use cdpr_core::workspace::{first_frequency, GridSpec, ScalarField};
use cdpr_core::{RobotModel, TensionLimits};

use crate::CliError;

/// Worker count: `CDPR_THREADS` when set, otherwise the machine parallelism.
pub fn thread_count() -> usize {
    if let Ok(v) = std::env::var("CDPR_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

pub fn frequency_field_parallel(
    model: &RobotModel,
    grid: &GridSpec,
    limits: &TensionLimits,
    threads: usize,
) -> Result<ScalarField, CliError> {
    if grid.is_empty() {
        return Err(CliError::Config("grid has a zero dimension".into()));
    }
    let total = grid.len();
    let threads = threads.clamp(1, total);
    let mut values = vec![f64::NAN; total];
    let chunk = total.div_ceil(threads);
    let (ny, nz) = (grid.dims[1], grid.dims[2]);

    std::thread::scope(|scope| {
        for (c, slice) in values.chunks_mut(chunk).enumerate() {
            let start = c * chunk;
            scope.spawn(move || {
                for (offset, slot) in slice.iter_mut().enumerate() {
                    let idx = start + offset;
                    let ix = idx / (ny * nz);
                    let iy = (idx / nz) % ny;
                    let iz = idx % nz;
                    let p = grid.point(ix, iy, iz);
                    if let Some(f1) = first_frequency(model, &p, limits) {
                        *slot = f1;
                    }
                }
            });
        }
    });

    Ok(ScalarField {
        grid: grid.clone(),
        values,
    })
}
