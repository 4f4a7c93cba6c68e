//! Polyhedral cones, the order they induce, and the level regions of the
//! invariant set `X = P`.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Default absolute tolerance on `<n_k, x>` for membership tests.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A closed convex polyhedral cone `P = {x : <n_k, x> >= 0 for all k}` in
/// `R^d`, together with a generating set.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralCone {
    dimension: usize,
    generators: Vec<Vec<f64>>,
    normals: Vec<Vec<f64>>,
    tol: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn numerical_rank(rows: &[Vec<f64>], dim: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * max).count()
}

impl PolyhedralCone {
    /// Builds a cone from generators and inward halfspace normals and checks
    /// that it is spanning, pointed and that every generator satisfies every
    /// halfspace inequality.
    pub fn new(
        dimension: usize,
        generators: Vec<Vec<f64>>,
        normals: Vec<Vec<f64>>,
        tol: f64,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidCone("dimension must be positive".into()));
        }
        for v in generators.iter().chain(normals.iter()) {
            if v.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("cone row {v:?}")));
            }
        }
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::InvalidCone(format!("bad tolerance {tol}")));
        }
        let cone = Self {
            dimension,
            generators,
            normals,
            tol,
        };
        if numerical_rank(&cone.generators, dimension) != dimension {
            return Err(Error::InvalidCone("generators do not span".into()));
        }
        // P ∩ -P = {0} iff the normals span R^d.
        if numerical_rank(&cone.normals, dimension) != dimension {
            return Err(Error::InvalidCone("cone contains a line".into()));
        }
        for g in &cone.generators {
            if let Some(k) = cone.normals.iter().position(|n| dot(n, g) < -tol) {
                return Err(Error::InvalidCone(format!(
                    "generator {g:?} violates halfspace {k}"
                )));
            }
            if g.iter().any(|x| *x != 0.0) {
                let neg: Vec<f64> = g.iter().map(|x| -x).collect();
                if cone.contains(&neg)? {
                    return Err(Error::InvalidCone(format!(
                        "generator {g:?} and its negative both lie in the cone"
                    )));
                }
            }
        }
        Ok(cone)
    }

    /// The nonnegative orthant `[0, inf)^d`.
    pub fn orthant(dimension: usize) -> Result<Self> {
        let unit = |i: usize| {
            let mut e = vec![0.0; dimension];
            e[i] = 1.0;
            e
        };
        let rows: Vec<Vec<f64>> = (0..dimension).map(unit).collect();
        Self::new(dimension, rows.clone(), rows, DEFAULT_TOL)
    }

    /// The planar cone generated by `(1, 1)` and `(-1, 1)`, i.e. `y >= |x|`.
    pub fn wedge() -> Result<Self> {
        Self::new(
            2,
            vec![vec![1.0, 1.0], vec![-1.0, 1.0]],
            vec![vec![-1.0, 1.0], vec![1.0, 1.0]],
            DEFAULT_TOL,
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{x:?}")));
        }
        Ok(())
    }

    /// Membership in `P` up to the cone's tolerance.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.normals.iter().all(|n| dot(n, x) >= -self.tol))
    }

    /// `x <= y` iff `y - x` lies in the cone.
    pub fn leq(&self, x: &[f64], y: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let diff: Vec<f64> = y.iter().zip(x).map(|(b, a)| b - a).collect();
        self.contains(&diff)
    }

    /// Strict interior membership: every halfspace inequality holds with
    /// margin.
    pub fn in_interior(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.normals.iter().all(|n| dot(n, x) > self.tol))
    }

    /// Sum of the generators; lies in the interior for every built-in cone.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.dimension];
        for g in &self.generators {
            for (ei, gi) in e.iter_mut().zip(g) {
                *ei += gi;
            }
        }
        e
    }
}

/// Position of a point relative to the slab `L_{a,b} = (X+a) \ (X+b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionTag {
    /// Outside `X + a`.
    Below,
    /// Inside `X + a` but outside `X + b`.
    Mid,
    /// Inside `X + b`.
    Above,
}

/// A `P`-invariant set on which `P` acts purely. Here always `X = P`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSet {
    cone: PolyhedralCone,
}

impl InvariantSet {
    pub fn new(cone: PolyhedralCone) -> Self {
        Self { cone }
    }

    pub fn cone(&self) -> &PolyhedralCone {
        &self.cone
    }

    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        self.cone.contains(y)
    }

    /// Membership in the translate `X + a`.
    pub fn contains_shifted(&self, y: &[f64], a: &[f64]) -> Result<bool> {
        self.cone.leq(a, y)
    }

    /// Classifies `y` against `L_{-inf,a}`, `L_{a,b}` and `L_{b,inf}`.
    pub fn region(&self, a: &[f64], b: &[f64], y: &[f64]) -> Result<RegionTag> {
        if !self.cone.contains(a)? || !self.cone.contains(b)? {
            return Err(Error::OrderViolation(format!(
                "region endpoints {a:?}, {b:?} must lie in the cone"
            )));
        }
        if !self.cone.leq(a, b)? {
            return Err(Error::OrderViolation(format!("{a:?} is not <= {b:?}")));
        }
        if !self.contains_shifted(y, a)? {
            Ok(RegionTag::Below)
        } else if !self.contains_shifted(y, b)? {
            Ok(RegionTag::Mid)
        } else {
            Ok(RegionTag::Above)
        }
    }

    /// Purity witness: some `t > 0` with `z` outside `X + t e`, where `e` is
    /// the diagonal direction. `None` if `e` is not interior.
    pub fn escape_time(&self, z: &[f64]) -> Result<Option<f64>> {
        let e = self.cone.diagonal();
        if !self.cone.in_interior(&e)? {
            return Ok(None);
        }
        self.cone.check_dim(z)?;
        // <n, z - t e> is affine in t with negative slope on every face.
        let t = self
            .cone
            .normals
            .iter()
            .map(|n| (dot(n, z) + self.cone.tol) / dot(n, &e))
            .fold(f64::NEG_INFINITY, f64::max);
        let t = if t > 0.0 { 2.0 * t + 1.0 } else { 1.0 };
        let shifted: Vec<f64> = z.iter().zip(&e).map(|(zi, ei)| zi - t * ei).collect();
        debug_assert!(!self.cone.contains(&shifted)?);
        Ok(Some(t))
    }
}
