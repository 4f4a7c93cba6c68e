#![allow(dead_code)]

use std::sync::Arc;

use ccrflow_core::{Complex64, Grid, GridFunction, LatticeVector, PolyhedralCone};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn lv(v: &[i64]) -> LatticeVector {
    LatticeVector(v.to_vec())
}

pub fn line(n: usize, h: f64) -> Arc<Grid> {
    Arc::new(Grid::new(PolyhedralCone::orthant(1).unwrap(), vec![n], vec![h], 1.0).unwrap())
}

pub fn orthant2(n: usize, h: f64) -> Arc<Grid> {
    Arc::new(
        Grid::new(
            PolyhedralCone::orthant(2).unwrap(),
            vec![n, n],
            vec![h, h],
            1.0,
        )
        .unwrap(),
    )
}

pub fn wedge(n: usize, h: f64) -> Arc<Grid> {
    Arc::new(
        Grid::new(
            PolyhedralCone::wedge().unwrap(),
            vec![n, n],
            vec![h, h],
            1.0,
        )
        .unwrap(),
    )
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random function on the lattice box `[0, hi)` with values of modulus below
/// `amp`, roughly half the cells nonzero.
pub fn random_function(
    grid: &Arc<Grid>,
    hi: &[usize],
    amp: f64,
    r: &mut ChaCha8Rng,
) -> GridFunction {
    let mut values = vec![c(0.0, 0.0); grid.num_cells()];
    for (cell, v) in values.iter_mut().enumerate() {
        let m = grid.multi_index(cell);
        if m.iter().zip(hi).all(|(j, h)| j < h) && r.random::<f64>() < 0.6 {
            let re = amp * (2.0 * r.random::<f64>() - 1.0) / 2f64.sqrt();
            let im = amp * (2.0 * r.random::<f64>() - 1.0) / 2f64.sqrt();
            *v = c(re, im);
        }
    }
    GridFunction::from_values(grid.clone(), values).unwrap()
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
