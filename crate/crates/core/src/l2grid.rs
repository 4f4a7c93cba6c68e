//! A finite-dimensional stand-in for `L^2(X, lambda)`: grid-simple functions
//! on a lattice of cells in the cone's generator coordinates, the shift
//! isometries `V_a` and their adjoints, and restrictions to level regions.
//!
//! For the orthant the cells are axis-aligned boxes. For a general simplicial
//! cone the lattice is the image of the integer lattice under the generator
//! matrix, so every lattice shift is an exact relabeling of cells and no cell
//! straddles the boundary of `X + a` for lattice `a`.

use std::fmt;
use std::ops::{Add, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::cone::{InvariantSet, PolyhedralCone, RegionTag};
use crate::error::{Error, Result};
use crate::pointproc::Window;

const ALIGN_TOL: f64 = 1e-9;

/// A cone element expressed in lattice steps along the generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(dimension: usize) -> Self {
        Self(vec![0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// Membership in the cone, which in generator coordinates is the
    /// nonnegative orthant.
    pub fn in_cone(&self) -> bool {
        self.0.iter().all(|&k| k >= 0)
    }

    /// `self <= other` in the cone order.
    pub fn leq(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Uniform cell partition of `window ∩ X` with `X = P`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    set: InvariantSet,
    /// Column `i` is generator `i`.
    basis: DMatrix<f64>,
    inverse: DMatrix<f64>,
    /// Row-major `diag(1/steps) · inverse`: physical point to cell units.
    to_cell: Vec<f64>,
    steps: Vec<f64>,
    counts: Vec<usize>,
    intensity: f64,
    cell_measure: f64,
}

impl Grid {
    /// `counts[i]` cells of width `steps[i]` along generator `i`. Cell measure
    /// is `intensity * |det G| * prod(steps)`.
    pub fn new(
        cone: PolyhedralCone,
        counts: Vec<usize>,
        steps: Vec<f64>,
        intensity: f64,
    ) -> Result<Self> {
        let d = cone.dimension();
        if cone.generators().len() != d {
            return Err(Error::InvalidGrid(format!(
                "lattice grids need a simplicial cone ({} generators in dimension {d})",
                cone.generators().len()
            )));
        }
        if counts.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: counts.len(),
            });
        }
        if steps.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: steps.len(),
            });
        }
        if counts.contains(&0) {
            return Err(Error::InvalidGrid("cell counts must be positive".into()));
        }
        if steps.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidGrid(format!("bad steps {steps:?}")));
        }
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(Error::NonPositiveIntensity(intensity));
        }
        let basis = DMatrix::from_fn(d, d, |i, j| cone.generators()[j][i]);
        let det = basis.determinant();
        let inverse = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidGrid("singular generator matrix".into()))?;
        let cell_measure = intensity * det.abs() * steps.iter().product::<f64>();
        let to_cell = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| inverse[(i, j)] / steps[i])
            .collect();
        Ok(Self {
            set: InvariantSet::new(cone),
            basis,
            inverse,
            to_cell,
            steps,
            counts,
            intensity,
            cell_measure,
        })
    }

    pub fn dimension(&self) -> usize {
        self.counts.len()
    }

    pub fn invariant_set(&self) -> &InvariantSet {
        &self.set
    }

    pub fn cone(&self) -> &PolyhedralCone {
        self.set.cone()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// Scale of `lambda` relative to Lebesgue measure.
    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn num_cells(&self) -> usize {
        self.counts.iter().product()
    }

    /// `lambda(cell)`, identical for all cells.
    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    /// Row-major linear index, last axis fastest.
    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.counts)
            .fold(0, |acc, (&j, &n)| acc * n + j)
    }

    pub fn multi_index(&self, mut linear: usize) -> Vec<usize> {
        let mut out = vec![0; self.counts.len()];
        for (slot, &n) in out.iter_mut().zip(&self.counts).rev() {
            *slot = linear % n;
            linear /= n;
        }
        out
    }

    fn to_physical(&self, coords: &[f64]) -> Vec<f64> {
        let s = DVector::from_column_slice(coords);
        (&self.basis * s).iter().copied().collect()
    }

    fn to_lattice_coords(&self, y: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(y);
        (&self.inverse * v)
            .iter()
            .zip(&self.steps)
            .map(|(s, h)| s / h)
            .collect()
    }

    /// Physical position of a lattice vector.
    pub fn physical(&self, a: &LatticeVector) -> Vec<f64> {
        let coords: Vec<f64> =
            a.0.iter()
                .zip(&self.steps)
                .map(|(&k, h)| k as f64 * h)
                .collect();
        self.to_physical(&coords)
    }

    /// Converts a physical vector to lattice units, failing unless it is an
    /// integer combination of the scaled generators.
    pub fn lattice(&self, a: &[f64]) -> Result<LatticeVector> {
        if a.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: a.len(),
            });
        }
        let coords = self.to_lattice_coords(a);
        let mut out = Vec::with_capacity(coords.len());
        for c in coords {
            let r = c.round();
            if (c - r).abs() > ALIGN_TOL {
                return Err(Error::NonLatticeShift(a.to_vec()));
            }
            out.push(r as i64);
        }
        Ok(LatticeVector(out))
    }

    pub fn cell_center(&self, cell: usize) -> Vec<f64> {
        let coords: Vec<f64> = self
            .multi_index(cell)
            .iter()
            .zip(&self.steps)
            .map(|(&j, h)| (j as f64 + 0.5) * h)
            .collect();
        self.to_physical(&coords)
    }

    /// Cell containing `y`, or `None` outside the gridded part of `X`.
    pub fn locate(&self, y: &[f64]) -> Option<usize> {
        if y.len() != self.dimension() {
            return None;
        }
        let d = y.len();
        let mut idx = 0usize;
        for (row, &n) in self.to_cell.chunks_exact(d).zip(&self.counts) {
            let c: f64 = row.iter().zip(y).map(|(m, x)| m * x).sum();
            if c.is_nan() || c < 0.0 {
                return None;
            }
            let j = c.floor() as usize;
            if j >= n {
                return None;
            }
            idx = idx * n + j;
        }
        Some(idx)
    }

    /// Axis-aligned bounding box of the gridded region.
    pub fn window(&self) -> Window {
        let d = self.dimension();
        let mut lower = vec![f64::INFINITY; d];
        let mut upper = vec![f64::NEG_INFINITY; d];
        for corner in 0..(1usize << d) {
            let coords: Vec<f64> = (0..d)
                .map(|i| {
                    if corner >> i & 1 == 1 {
                        self.counts[i] as f64 * self.steps[i]
                    } else {
                        0.0
                    }
                })
                .collect();
            let p = self.to_physical(&coords);
            for i in 0..d {
                lower[i] = lower[i].min(p[i]);
                upper[i] = upper[i].max(p[i]);
            }
        }
        Window::new(lower, upper).expect("grid has positive extent")
    }

    /// Largest lattice vector whose translate of the cell at the apex still
    /// lies on the grid.
    pub fn extent(&self) -> LatticeVector {
        LatticeVector(self.counts.iter().map(|&n| n as i64).collect())
    }

    fn check_lattice_dim(&self, a: &LatticeVector) -> Result<()> {
        if a.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: a.dimension(),
            });
        }
        Ok(())
    }

    fn check_in_cone(&self, a: &LatticeVector) -> Result<()> {
        self.check_lattice_dim(a)?;
        if !self.cone().contains(&self.physical(a))? {
            return Err(Error::OrderViolation(format!("{a} is not in the cone")));
        }
        Ok(())
    }

    /// Region of a cell, classified by its center against `X + a`, `X + b`.
    pub fn classify(&self, cell: usize, a: &LatticeVector, b: &LatticeVector) -> Result<RegionTag> {
        self.set.region(
            &self.physical(a),
            &self.physical(b),
            &self.cell_center(cell),
        )
    }
}

/// The subsets of `X` that restrictions act on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    /// `L_a = X \ (X + a)`.
    Below(LatticeVector),
    /// `L_{a,b} = (X + a) \ (X + b)`.
    Slab(LatticeVector, LatticeVector),
    /// `L_{a,inf} = X + a`.
    Above(LatticeVector),
}

impl Region {
    /// Builds a slab from physical endpoints. Non-lattice endpoints cut
    /// through cells, which is reported as the first straddling cell.
    pub fn slab_from_physical(grid: &Grid, a: &[f64], b: &[f64]) -> Result<Self> {
        let conv = |v: &[f64]| -> Result<LatticeVector> {
            grid.lattice(v).map_err(|e| match e {
                Error::NonLatticeShift(_) => {
                    let coords = grid.to_lattice_coords(v);
                    let multi: Vec<usize> = coords
                        .iter()
                        .zip(grid.counts())
                        .map(|(c, &n)| (c.floor().max(0.0) as usize).min(n - 1))
                        .collect();
                    Error::StraddlingCell {
                        cell: grid.linear_index(&multi),
                    }
                }
                other => other,
            })
        };
        Ok(Region::Slab(conv(a)?, conv(b)?))
    }

    fn endpoints(&self, d: usize) -> (LatticeVector, Option<LatticeVector>) {
        match self {
            Region::Below(a) => (LatticeVector::zero(d), Some(a.clone())),
            Region::Slab(a, b) => (a.clone(), Some(b.clone())),
            Region::Above(a) => (a.clone(), None),
        }
    }
}

/// A grid-simple complex function: one value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.num_cells();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_values(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.num_cells() {
            return Err(Error::DimensionMismatch {
                expected: grid.num_cells(),
                got: values.len(),
            });
        }
        if let Some(v) = values
            .iter()
            .find(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite(format!("grid value {v}")));
        }
        Ok(Self { grid, values })
    }

    /// Constant `value` on the lattice box of cells `lo <= j < hi`.
    pub fn indicator(
        grid: Arc<Grid>,
        lo: &[usize],
        hi: &[usize],
        value: Complex64,
    ) -> Result<Self> {
        Self::profile(grid, lo, hi, |_| value)
    }

    /// `amplitude * exp(i <wave, center>)` on the lattice box `lo <= j < hi`.
    pub fn exp_profile(
        grid: Arc<Grid>,
        lo: &[usize],
        hi: &[usize],
        amplitude: Complex64,
        wave: &[f64],
    ) -> Result<Self> {
        if wave.len() != grid.dimension() {
            return Err(Error::DimensionMismatch {
                expected: grid.dimension(),
                got: wave.len(),
            });
        }
        let g = grid.clone();
        Self::profile(grid, lo, hi, move |cell| {
            let c = g.cell_center(cell);
            let phase: f64 = c.iter().zip(wave).map(|(x, k)| x * k).sum();
            amplitude * Complex64::from_polar(1.0, phase)
        })
    }

    fn profile(
        grid: Arc<Grid>,
        lo: &[usize],
        hi: &[usize],
        mut value: impl FnMut(usize) -> Complex64,
    ) -> Result<Self> {
        let d = grid.dimension();
        for v in [lo, hi] {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
        }
        if lo
            .iter()
            .zip(hi)
            .zip(grid.counts())
            .any(|((l, h), n)| l > h || h > n)
        {
            return Err(Error::InvalidGrid(format!(
                "cell box {lo:?}..{hi:?} outside grid {:?}",
                grid.counts()
            )));
        }
        let mut out = Self::zeros(grid);
        for cell in 0..out.values.len() {
            let m = out.grid.multi_index(cell);
            if m.iter().zip(lo).zip(hi).all(|((j, l), h)| l <= j && j < h) {
                out.values[cell] = value(cell);
            }
        }
        Self::from_values(out.grid, out.values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> Complex64 {
        self.values[cell]
    }

    /// Value at a physical point; zero off the grid.
    pub fn eval(&self, y: &[f64]) -> Complex64 {
        self.grid
            .locate(y)
            .map_or(Complex64::new(0.0, 0.0), |c| self.values[c])
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Cells carrying a nonzero value.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
            .map(|(i, _)| i)
    }

    /// `∫ f dλ`.
    pub fn integral(&self) -> Complex64 {
        compensated_sum(self.values.iter().copied()) * self.grid.cell_measure()
    }

    /// `<f, g> = Σ f conj(g) λ(cell)`, conjugate-linear in `g`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_grid(other)?;
        let s = compensated_sum(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(f, g)| f * g.conj()),
        );
        Ok(s * self.grid.cell_measure())
    }

    pub fn norm_sq(&self) -> f64 {
        let s: f64 = compensated_sum(
            self.values
                .iter()
                .map(|v| Complex64::new(v.norm_sqr(), 0.0)),
        )
        .re;
        s * self.grid.cell_measure()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn map(&self, mut op: impl FnMut(Complex64) -> Complex64) -> Result<Self> {
        Self::from_values(
            self.grid.clone(),
            self.values.iter().map(|&v| op(v)).collect(),
        )
    }

    /// `V_a f`: translation by `a` inside `X`. Exact cell relabeling. Fails if
    /// a nonzero value would be carried off the grid.
    pub fn shift(&self, a: &LatticeVector) -> Result<Self> {
        self.grid.check_in_cone(a)?;
        let counts = self.grid.counts();
        let mut out = Self::zeros(self.grid.clone());
        for cell in self.support() {
            let m = self.grid.multi_index(cell);
            let mut target = Vec::with_capacity(m.len());
            for ((&j, &k), &n) in m.iter().zip(&a.0).zip(counts) {
                let t = j as i64 + k;
                if t >= n as i64 {
                    return Err(Error::SupportOverflow { cell });
                }
                target.push(t as usize);
            }
            out.values[self.grid.linear_index(&target)] = self.values[cell];
        }
        Ok(out)
    }

    /// `V_a^* f`, i.e. `y -> f(y + a)` on `X`.
    pub fn adjoint_shift(&self, a: &LatticeVector) -> Result<Self> {
        self.grid.check_in_cone(a)?;
        let mut out = Self::zeros(self.grid.clone());
        for cell in self.support() {
            let m = self.grid.multi_index(cell);
            let mut target = Vec::with_capacity(m.len());
            let mut inside = true;
            for (&j, &k) in m.iter().zip(&a.0) {
                let t = j as i64 - k;
                if t < 0 {
                    inside = false;
                    break;
                }
                target.push(t as usize);
            }
            if inside {
                out.values[self.grid.linear_index(&target)] = self.values[cell];
            }
        }
        Ok(out)
    }

    /// `f * 1_region`.
    pub fn restrict(&self, region: &Region) -> Result<Self> {
        let d = self.grid.dimension();
        let (a, b) = region.endpoints(d);
        self.grid.check_in_cone(&a)?;
        let keep_above = b.is_none();
        let b = match b {
            Some(b) => {
                self.grid.check_in_cone(&b)?;
                if !a.leq(&b) {
                    return Err(Error::OrderViolation(format!("{a} is not <= {b}")));
                }
                b
            }
            None => a.clone(),
        };
        let mut out = Self::zeros(self.grid.clone());
        for cell in self.support() {
            let tag = self.grid.classify(cell, &a, &b)?;
            let keep = if keep_above {
                tag != RegionTag::Below
            } else {
                tag == RegionTag::Mid
            };
            if keep {
                out.values[cell] = self.values[cell];
            }
        }
        Ok(out)
    }

    /// Whether every nonzero value lies in `region`.
    pub fn supported_in(&self, region: &Region) -> Result<Option<usize>> {
        let r = self.restrict(region)?;
        Ok(self.support().find(|&c| r.values[c] != self.values[c]))
    }
}

/// Neumaier-compensated complex summation; result is independent of how the
/// caller partitions work as long as the iteration order is fixed.
pub fn compensated_sum(iter: impl IntoIterator<Item = Complex64>) -> Complex64 {
    let (mut sr, mut cr, mut si, mut ci) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for z in iter {
        neumaier(&mut sr, &mut cr, z.re);
        neumaier(&mut si, &mut ci, z.im);
    }
    Complex64::new(sr + cr, si + ci)
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}
