//! Shared fixtures for the benchmarks under `benches/`.

use std::sync::Arc;

use ccrflow_core::{Complex64, Grid, GridFunction, LatticeVector, PolyhedralCone, SigmaLabel};

/// `cells` cells of width `step` on `[0, inf)` with unit intensity.
pub fn line(cells: usize, step: f64) -> Arc<Grid> {
    let cone = PolyhedralCone::orthant(1).expect("orthant");
    Arc::new(Grid::new(cone, vec![cells], vec![step], 1.0).expect("grid"))
}

/// `side x side` grid over the wedge spanned by `(1, 1)` and `(-1, 1)`.
pub fn wedge(side: usize, step: f64) -> Arc<Grid> {
    let cone = PolyhedralCone::wedge().expect("wedge");
    Arc::new(Grid::new(cone, vec![side, side], vec![step, step], 1.0).expect("grid"))
}

/// Deterministic bounded label on the first `len` cells of a line grid.
pub fn ramp(grid: &Arc<Grid>, len: usize, phase: f64) -> GridFunction {
    let values = (0..grid.num_cells())
        .map(|j| {
            if j < len {
                Complex64::from_polar(0.5 / (1.0 + j as f64), phase * j as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    GridFunction::from_values(grid.clone(), values).expect("finite")
}

pub fn ramp_label(grid: &Arc<Grid>, len: usize, phase: f64) -> SigmaLabel {
    SigmaLabel::new(ramp(grid, len, phase), LatticeVector(vec![len as i64])).expect("label")
}
