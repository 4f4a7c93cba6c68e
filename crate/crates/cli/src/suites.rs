//! The verification suites. Each suite turns its parameter block into a list
//! of checks; exact checks are computed when the list is built, Monte Carlo
//! checks carry an estimator that can be rerun at any replicate count.

use std::sync::Arc;
use std::time::Instant;

use ccrflow_core::fock::{exponential_gram, min_eigenvalue};
use ccrflow_core::pointproc::{
    compound_laplace_rhs, exp_functional, master_equation_rhs, mc_mean, xi_of,
};
use ccrflow_core::prodsys::{
    decompose, embed_g0, marked_sigma_inner_mc, project_qa, shift_sigma, sigma_eval,
    sigma_inner_mc, sigma_product, theta_check, totality_rank, xi_vector_eval,
};
use ccrflow_core::{
    ccr_product, fock_inner, second_quantize, Complex64, FockVector, Grid, GridFunction,
    LatticeVector, MCEstimate, MarkedSampler, McSettings, PointConfiguration, PoissonSampler,
    Region, Sampler, SigmaLabel,
};

use crate::config::{ConfigError, ExperimentConfig, SuiteParams};
use crate::report::{ConvergenceRow, Row, SuiteReport};

pub const SUITES: [&str; 13] = [
    "master-equation",
    "stationarity",
    "independence",
    "shift-laws",
    "fock-laws",
    "sigma-inner",
    "product-law",
    "projection",
    "decompose",
    "theta-iso",
    "compound-laplace",
    "compound-g0",
    "totality",
];

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error("suite '{0}' has no [suites.{0}] block in the config")]
    NotConfigured(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {error}")]
    Core {
        context: String,
        error: ccrflow_core::Error,
    },
    #[error("no check '{0}'")]
    UnknownCheck(String),
    #[error("check '{0}' is not a Monte Carlo check")]
    NotMonteCarlo(String),
    #[error("empty n-ladder")]
    EmptyLadder,
}

type Estimator = Arc<dyn Fn(McSettings) -> ccrflow_core::Result<MCEstimate> + Send + Sync>;

pub enum Check {
    Exact {
        id: String,
        value: Complex64,
        target: Complex64,
    },
    Bound {
        id: String,
        value: f64,
        floor: f64,
    },
    Mc {
        id: String,
        target: Complex64,
        estimator: Estimator,
        /// Estimate already produced at the suite's own settings.
        precomputed: Option<MCEstimate>,
    },
}

impl Check {
    pub fn id(&self) -> &str {
        match self {
            Check::Exact { id, .. } | Check::Bound { id, .. } | Check::Mc { id, .. } => id,
        }
    }
}

trait CoreContext<T> {
    fn ctx(self, context: impl FnOnce() -> String) -> Result<T, SuiteError>;
}

impl<T> CoreContext<T> for ccrflow_core::Result<T> {
    fn ctx(self, context: impl FnOnce() -> String) -> Result<T, SuiteError> {
        self.map_err(|error| SuiteError::Core {
            context: context(),
            error,
        })
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn lat(a: &LatticeVector) -> String {
    let parts: Vec<String> = a.0.iter().map(i64::to_string).collect();
    format!("({})", parts.join(";"))
}

fn max_cell_diff(f: &GridFunction, g: &GridFunction) -> f64 {
    if !f.same_grid(g) {
        return f64::INFINITY;
    }
    f.values()
        .iter()
        .zip(g.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Everything a suite needs: resolved grid, parameters and MC settings.
struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    name: &'static str,
    grid: Arc<Grid>,
    p: SuiteParams,
    settings: McSettings,
}

impl Ctx<'_> {
    fn corpus(&self) -> Result<Vec<(String, GridFunction)>, SuiteError> {
        self.named(&self.p.corpus, "corpus")
    }

    fn regions(&self) -> Result<Vec<(String, GridFunction)>, SuiteError> {
        self.named(&self.p.regions, "regions")
    }

    fn named(
        &self,
        names: &[String],
        key: &str,
    ) -> Result<Vec<(String, GridFunction)>, SuiteError> {
        names
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let field = format!("suites.{}.{key}[{i}]", self.name);
                Ok((n.clone(), self.cfg.build_function(&self.grid, n, &field)?))
            })
            .collect()
    }

    fn require_nonempty<T>(&self, v: &[T], key: &str) -> Result<(), SuiteError> {
        if v.is_empty() {
            return Err(ConfigError::Field {
                field: format!("suites.{}.{key}", self.name),
                message: "must not be empty".into(),
            }
            .into());
        }
        Ok(())
    }

    fn levy(&self) -> Result<Vec<(String, ccrflow_core::LevyMeasure)>, SuiteError> {
        self.require_nonempty(&self.p.levy, "levy")?;
        self.p
            .levy
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let field = format!("suites.{}.levy[{i}]", self.name);
                Ok((n.clone(), self.cfg.levy_measure(n, &field)?))
            })
            .collect()
    }

    fn label(
        &self,
        name: &str,
        f: &GridFunction,
        fiber: &LatticeVector,
    ) -> Result<SigmaLabel, SuiteError> {
        SigmaLabel::new(f.clone(), fiber.clone())
            .ctx(|| format!("{}: label '{name}' in fiber {}", self.name, lat(fiber)))
    }

    fn poisson(&self) -> Result<PoissonSampler, SuiteError> {
        PoissonSampler::new(self.grid.window(), self.grid.intensity()).ctx(|| self.name.into())
    }

    /// The fixed configurations used by pathwise checks.
    fn configurations(&self) -> Result<Vec<PointConfiguration>, SuiteError> {
        let s = self.poisson()?;
        Ok((0..self.p.configurations())
            .map(|i| s.sample(self.settings.seed, i))
            .collect())
    }

    fn id(&self, rest: impl std::fmt::Display) -> String {
        format!("{}/{rest}", self.name)
    }
}

fn settings_for(
    cfg: &ExperimentConfig,
    p: &SuiteParams,
    n: usize,
    workers: Option<usize>,
) -> McSettings {
    let settings = McSettings::new(n, p.seed_or(cfg.seed));
    match workers.or(cfg.workers) {
        Some(w) => settings.with_workers(w),
        None => settings,
    }
}

fn build(
    cfg: &ExperimentConfig,
    suite: &str,
    workers: Option<usize>,
) -> Result<Vec<Check>, SuiteError> {
    let name = *SUITES
        .iter()
        .find(|s| **s == suite)
        .ok_or_else(|| SuiteError::UnknownSuite(suite.into()))?;
    let p = cfg
        .params(name)
        .cloned()
        .ok_or_else(|| SuiteError::NotConfigured(name.into()))?;
    let settings = settings_for(cfg, &p, p.n(), workers);
    let ctx = Ctx {
        cfg,
        name,
        grid: cfg.build_grid()?,
        p,
        settings,
    };
    match name {
        "master-equation" => master_equation(&ctx),
        "stationarity" => stationarity(&ctx),
        "independence" => independence(&ctx),
        "shift-laws" => shift_laws(&ctx),
        "fock-laws" => fock_laws(&ctx),
        "sigma-inner" => sigma_inner(&ctx),
        "product-law" => product_law(&ctx),
        "projection" => projection(&ctx),
        "decompose" => decompose_suite(&ctx),
        "theta-iso" => theta_iso(&ctx),
        "compound-laplace" => compound_laplace(&ctx),
        "compound-g0" => compound_g0(&ctx),
        "totality" => totality(&ctx),
        _ => unreachable!("suite names come from SUITES"),
    }
}

/// Builds the checks of one suite without running the Monte Carlo ones.
pub fn build_checks(cfg: &ExperimentConfig, suite: &str) -> Result<Vec<Check>, SuiteError> {
    build(cfg, suite, None)
}

/// Runs one suite. `workers` overrides the config's worker count; it never
/// changes the numbers, only the wall clock.
pub fn run_suite(
    cfg: &ExperimentConfig,
    suite: &str,
    workers: Option<usize>,
) -> Result<SuiteReport, SuiteError> {
    let start = Instant::now();
    let checks = build(cfg, suite, workers)?;
    let p = cfg.params(suite).cloned().unwrap_or_default();
    let settings = settings_for(cfg, &p, p.n(), workers);
    let mut rows = Vec::with_capacity(checks.len());
    for check in checks {
        rows.push(match check {
            Check::Exact { id, value, target } => Row::exact(id, value, target),
            Check::Bound { id, value, floor } => Row::bound(id, value, floor),
            Check::Mc {
                id,
                target,
                estimator,
                precomputed,
            } => {
                let est = match precomputed {
                    Some(e) => e,
                    None => estimator(settings).ctx(|| id.clone())?,
                };
                Row::mc(id, &est, target)
            }
        });
    }
    Ok(SuiteReport {
        suite: suite.into(),
        rows,
        duration: start.elapsed(),
    })
}

/// Reruns one Monte Carlo check along a ladder of replicate counts, all with
/// the suite seed.
pub fn emit_convergence(
    cfg: &ExperimentConfig,
    check_id: &str,
    ladder: &[usize],
    workers: Option<usize>,
) -> Result<Vec<ConvergenceRow>, SuiteError> {
    if ladder.is_empty() {
        return Err(SuiteError::EmptyLadder);
    }
    let suite = check_id.split('/').next().unwrap_or_default();
    let checks = build(cfg, suite, workers)?;
    let check = checks
        .into_iter()
        .find(|ch| ch.id() == check_id)
        .ok_or_else(|| SuiteError::UnknownCheck(check_id.into()))?;
    let Check::Mc {
        target, estimator, ..
    } = check
    else {
        return Err(SuiteError::NotMonteCarlo(check_id.into()));
    };
    let p = cfg.params(suite).cloned().unwrap_or_default();
    ladder
        .iter()
        .map(|&n| {
            let est = estimator(settings_for(cfg, &p, n, workers))
                .ctx(|| format!("{check_id} at n = {n}"))?;
            Ok(ConvergenceRow {
                n,
                abs_error: (est.mean - target).norm(),
                stderr: est.stderr,
            })
        })
        .collect()
}

fn master_equation(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let corpus = ctx.corpus()?;
    ctx.require_nonempty(&corpus, "corpus")?;
    let sampler = Arc::new(ctx.poisson()?);
    corpus
        .into_iter()
        .map(|(name, u)| {
            let target = master_equation_rhs(&u).ctx(|| ctx.id(&name))?;
            let s = sampler.clone();
            Ok(Check::Mc {
                id: ctx.id(&name),
                target,
                precomputed: None,
                estimator: Arc::new(move |st| {
                    mc_mean(
                        &*s,
                        |w| exp_functional(w, &u).expect("finite by construction"),
                        st,
                    )
                }),
            })
        })
        .collect()
}

fn real_only(ctx: &Ctx, name: &str, f: &GridFunction) -> Result<(), SuiteError> {
    if f.values().iter().any(|v| v.im != 0.0) {
        return Err(ConfigError::Field {
            field: format!("functions.{name}"),
            message: format!("suite {} needs a real-valued function", ctx.name),
        }
        .into());
    }
    Ok(())
}

/// `η(u) = Σ u(y_i)` for real `u`.
fn eta_of(w: &PointConfiguration, u: &GridFunction) -> f64 {
    w.points.iter().map(|y| u.eval(y).re).sum()
}

fn stationarity(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let regions = ctx.regions()?;
    ctx.require_nonempty(&regions, "regions")?;
    let sampler = Arc::new(ctx.poisson()?);
    let mut shifts = vec![LatticeVector::zero(ctx.grid.dimension())];
    shifts.extend(ctx.p.shift_vectors().into_iter().filter(|s| !s.is_zero()));
    let mut out = Vec::new();
    for (name, b) in &regions {
        real_only(ctx, name, b)?;
        for x in &shifts {
            let u = Arc::new(b.shift(x).ctx(|| ctx.id(format!("{name}+{}", lat(x))))?);
            let mean = u.integral().re;
            let second = u.map(|v| v * v).expect("finite").integral().re + mean * mean;
            for (moment, target, pow) in [("mean", mean, 1), ("second-moment", second, 2)] {
                let (s, u) = (sampler.clone(), u.clone());
                out.push(Check::Mc {
                    id: ctx.id(format!("{name}+{}/{moment}", lat(x))),
                    target: c(target),
                    precomputed: None,
                    estimator: Arc::new(move |st| mc_mean(&*s, |w| c(eta_of(w, &u).powi(pow)), st)),
                });
            }
        }
    }
    Ok(out)
}

fn independence(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let regions = ctx.regions()?;
    if regions.len() < 2 {
        return Err(ConfigError::Field {
            field: format!("suites.{}.regions", ctx.name),
            message: "need at least two regions".into(),
        }
        .into());
    }
    let sampler = Arc::new(ctx.poisson()?);
    let mut out = Vec::new();
    for (j, (na, a)) in regions.iter().enumerate() {
        real_only(ctx, na, a)?;
        for (nb, b) in &regions[j + 1..] {
            real_only(ctx, nb, b)?;
            if a.values()
                .iter()
                .zip(b.values())
                .any(|(x, y)| x.norm() != 0.0 && y.norm() != 0.0)
            {
                return Err(ConfigError::Field {
                    field: format!("suites.{}.regions", ctx.name),
                    message: format!("'{na}' and '{nb}' overlap"),
                }
                .into());
            }
            let (la, lb) = (a.integral().re, b.integral().re);
            let (ua, ub) = (Arc::new(a.clone()), Arc::new(b.clone()));
            let (s, u1, u2) = (sampler.clone(), ua.clone(), ub.clone());
            out.push(Check::Mc {
                id: ctx.id(format!("{na}~{nb}/covariance")),
                target: c(0.0),
                precomputed: None,
                estimator: Arc::new(move |st| {
                    mc_mean(
                        &*s,
                        |w| c((eta_of(w, &u1) - la) * (eta_of(w, &u2) - lb)),
                        st,
                    )
                }),
            });
            // joint characteristic function against the product of the marginals
            let ia = a.scale(Complex64::new(0.0, 1.0));
            let mb = b.scale(c(-0.5));
            let target = master_equation_rhs(&ia).ctx(|| ctx.id(na))?
                * master_equation_rhs(&mb).ctx(|| ctx.id(nb))?;
            let joint = Arc::new(ia.add(&mb).ctx(|| ctx.id(na))?);
            let s = sampler.clone();
            out.push(Check::Mc {
                id: ctx.id(format!("{na}~{nb}/factorization")),
                target,
                precomputed: None,
                estimator: Arc::new(move |st| {
                    mc_mean(&*s, |w| exp_functional(w, &joint).expect("finite"), st)
                }),
            });
        }
    }
    Ok(out)
}

fn shift_laws(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let corpus = ctx.corpus()?;
    let shifts = ctx.p.shift_vectors();
    ctx.require_nonempty(&corpus, "corpus")?;
    ctx.require_nonempty(&shifts, "shifts")?;
    let mut out = Vec::new();
    for (name, f) in &corpus {
        for a in &shifts {
            let ctxa = || ctx.id(format!("{name}/V{}", lat(a)));
            let vaf = f.shift(a).ctx(ctxa)?;
            out.push(Check::Exact {
                id: ctx.id(format!("{name}/adjoint{}", lat(a))),
                value: c(max_cell_diff(&vaf.adjoint_shift(a).ctx(ctxa)?, f)),
                target: c(0.0),
            });
            let range = vaf.restrict(&Region::Above(a.clone())).ctx(ctxa)?;
            out.push(Check::Exact {
                id: ctx.id(format!("{name}/range{}", lat(a))),
                value: c(max_cell_diff(&range, &vaf)),
                target: c(0.0),
            });
            for b in &shifts {
                let ctxab = || ctx.id(format!("{name}/V{}V{}", lat(a), lat(b)));
                let lhs = f.shift(b).ctx(ctxab)?.shift(a).ctx(ctxab)?;
                let rhs = f.shift(&(a + b)).ctx(ctxab)?;
                out.push(Check::Exact {
                    id: ctxab(),
                    value: c(max_cell_diff(&lhs, &rhs)),
                    target: c(0.0),
                });
            }
        }
    }
    for (j, (nf, f)) in corpus.iter().enumerate() {
        for (ng, g) in &corpus[j..] {
            let target = f.inner(g).ctx(|| ctx.id(nf))?;
            for a in &shifts {
                let id = ctx.id(format!("{nf}~{ng}/isometry{}", lat(a)));
                let value = f
                    .shift(a)
                    .and_then(|x| x.inner(&g.shift(a)?))
                    .ctx(|| id.clone())?;
                out.push(Check::Exact { id, value, target });
            }
        }
    }
    Ok(out)
}

fn fock_laws(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let corpus = ctx.corpus()?;
    ctx.require_nonempty(&corpus, "corpus")?;
    let a = ctx.p.fiber(ctx.name)?;
    let e = |name: &str, f: &GridFunction| {
        FockVector::exponential(a.clone(), f.clone()).ctx(|| ctx.id(name))
    };
    let mut out = Vec::new();

    let mut distinct: Vec<&GridFunction> = Vec::new();
    for (_, f) in &corpus {
        if !distinct.contains(&f) && distinct.len() < 8 {
            distinct.push(f);
        }
    }
    for k in 1..=distinct.len() {
        let labels: Vec<GridFunction> = distinct[..k].iter().map(|f| (*f).clone()).collect();
        let gram = exponential_gram(&labels).ctx(|| ctx.id("gram"))?;
        out.push(Check::Bound {
            id: ctx.id(format!("gram-pd/{k}")),
            value: min_eigenvalue(&gram),
            floor: 0.0,
        });
    }

    for (j, (nf, f)) in corpus.iter().enumerate() {
        for (ng, g) in &corpus[j..] {
            let id = ctx.id(format!("{nf}*{ng}/multiplicative"));
            let (ef, eg) = (e(nf, f)?, e(ng, g)?);
            let value = fock_inner(
                &ccr_product(&a, &ef, &a, &eg).ctx(|| id.clone())?,
                &ccr_product(&a, &eg, &a, &ef).ctx(|| id.clone())?,
            )
            .ctx(|| id.clone())?;
            let target = fock_inner(&ef, &eg).ctx(|| id.clone())?
                * fock_inner(&eg, &ef).ctx(|| id.clone())?;
            out.push(Check::Exact { id, value, target });
        }
    }

    // associativity on superpositions of neighbouring corpus labels
    let sup = |i: usize| -> Result<FockVector, SuiteError> {
        let (n1, f1) = &corpus[i % corpus.len()];
        let (_, f2) = &corpus[(i + 1) % corpus.len()];
        FockVector::new(
            a.clone(),
            vec![
                (c(1.0), f1.clone()),
                (Complex64::new(0.5, -0.25), f2.clone()),
            ],
        )
        .ctx(|| ctx.id(n1))
    };
    for (i, (name, _)) in corpus.iter().enumerate() {
        let (u, v, w) = (sup(i)?, sup(i + 1)?, sup(i + 2)?);
        let id = ctx.id(format!("{name}/associativity"));
        let aa = &a + &a;
        let left = ccr_product(
            &aa,
            &ccr_product(&a, &u, &a, &v).ctx(|| id.clone())?,
            &a,
            &w,
        )
        .ctx(|| id.clone())?;
        let right = ccr_product(
            &a,
            &u,
            &aa,
            &ccr_product(&a, &v, &a, &w).ctx(|| id.clone())?,
        )
        .ctx(|| id.clone())?;
        out.push(Check::Exact {
            id,
            value: c(vector_diff(&left, &right)),
            target: c(0.0),
        });
    }

    for s in ctx.p.shift_vectors() {
        for (i, (name, _)) in corpus.iter().enumerate() {
            let v = sup(i)?;
            let id = ctx.id(format!("{name}/second-quantization{}", lat(&s)));
            let gv = second_quantize(&v, &s).ctx(|| id.clone())?;
            out.push(Check::Exact {
                id,
                value: fock_inner(&gv, &gv).ctx(|| ctx.id(name))?,
                target: fock_inner(&v, &v).ctx(|| ctx.id(name))?,
            });
        }
    }
    Ok(out)
}

/// Largest coefficient difference after matching labels; infinite when the
/// label sets differ.
fn vector_diff(x: &FockVector, y: &FockVector) -> f64 {
    if x.fiber() != y.fiber() || x.terms().len() != y.terms().len() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for (cx, fx) in x.terms() {
        match y.terms().iter().find(|(_, fy)| fy == fx) {
            Some((cy, _)) => worst = worst.max((cx - cy).norm()),
            None => return f64::INFINITY,
        }
    }
    worst
}

fn sigma_mc_check(id: String, fl: SigmaLabel, gl: SigmaLabel) -> Result<Check, SuiteError> {
    let target = fl.function().inner(gl.function()).ctx(|| id.clone())?.exp();
    Ok(Check::Mc {
        id,
        target,
        precomputed: None,
        estimator: Arc::new(move |st| sigma_inner_mc(&fl, &gl, st).map(|(e, _)| e)),
    })
}

fn sigma_inner(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let corpus = ctx.corpus()?;
    ctx.require_nonempty(&corpus, "corpus")?;
    let a = ctx.p.fiber(ctx.name)?;
    let mut out = Vec::new();
    for (j, (nf, f)) in corpus.iter().enumerate() {
        for (ng, g) in &corpus[j..] {
            out.push(sigma_mc_check(
                ctx.id(format!("{nf}~{ng}")),
                ctx.label(nf, f, &a)?,
                ctx.label(ng, g, &a)?,
            )?);
        }
    }
    Ok(out)
}

fn product_law(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let corpus = ctx.corpus()?;
    ctx.require_nonempty(&corpus, "corpus")?;
    let a = ctx.p.fiber(ctx.name)?;
    let labels: Vec<(String, SigmaLabel)> = corpus
        .iter()
        .map(|(n, f)| Ok((n.clone(), ctx.label(n, f, &a)?)))
        .collect::<Result<_, SuiteError>>()?;
    let ws = ctx.configurations()?;
    let mut out = Vec::new();
    for (nf, f) in &labels {
        for (ng, g) in &labels {
            let id = ctx.id(format!("{nf}*{ng}/pathwise"));
            let h = sigma_product(&a, f, &a, g).ctx(|| id.clone())?;
            let sg = shift_sigma(g, &a).ctx(|| id.clone())?;
            let worst = ws
                .iter()
                .map(|w| rel(sigma_eval(f, w) * sigma_eval(&sg, w), sigma_eval(&h, w)))
                .fold(0.0, f64::max);
            out.push(Check::Exact {
                id,
                value: c(worst),
                target: c(0.0),
            });
        }
    }
    let aa = &a + &a;
    for i in 0..labels.len() {
        let (nf, f) = &labels[i];
        let (_, g) = &labels[(i + 1) % labels.len()];
        let (_, h) = &labels[(i + 2) % labels.len()];
        let id = ctx.id(format!("{nf}/associativity"));
        let left = sigma_product(&aa, &sigma_product(&a, f, &a, g).ctx(|| id.clone())?, &a, h)
            .ctx(|| id.clone())?;
        let right = sigma_product(&a, f, &aa, &sigma_product(&a, g, &a, h).ctx(|| id.clone())?)
            .ctx(|| id.clone())?;
        let value = if left.fiber() == right.fiber() {
            max_cell_diff(left.function(), right.function())
        } else {
            f64::INFINITY
        };
        out.push(Check::Exact {
            id,
            value: c(value),
            target: c(0.0),
        });

        let id = ctx.id(format!("{nf}/unit"));
        let zero = SigmaLabel::zero(ctx.grid.clone(), a.clone()).ctx(|| id.clone())?;
        let right_unit = sigma_product(&a, f, &a, &zero).ctx(|| id.clone())?;
        let left_unit = sigma_product(&a, &zero, &a, f).ctx(|| id.clone())?;
        let vf = f.function().shift(&a).ctx(|| id.clone())?;
        let unit_eval = ws
            .iter()
            .map(|w| (sigma_eval(&zero, w) - c(1.0)).norm())
            .fold(0.0, f64::max);
        out.push(Check::Exact {
            id,
            value: c(max_cell_diff(right_unit.function(), f.function())
                .max(max_cell_diff(left_unit.function(), &vf))
                .max(unit_eval)),
            target: c(0.0),
        });
    }
    Ok(out)
}

fn projection(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let corpus = ctx.corpus()?;
    let regions = ctx.regions()?;
    let cuts = ctx.p.shift_vectors();
    ctx.require_nonempty(&corpus, "corpus")?;
    ctx.require_nonempty(&regions, "regions")?;
    ctx.require_nonempty(&cuts, "shifts")?;
    let b = ctx.p.fiber(ctx.name)?;
    let mut out = Vec::new();
    for (nf, f) in &corpus {
        let fl = ctx.label(nf, f, &b)?;
        for a in &cuts {
            let qf = project_qa(&fl, a).ctx(|| ctx.id(format!("{nf}@{}", lat(a))))?;
            for (ng, g) in &regions {
                let stem = format!("{nf}@{}~{ng}", lat(a));
                let ga = g
                    .restrict(&Region::Below(a.clone()))
                    .ctx(|| ctx.id(&stem))?;
                let gl = ctx.label(ng, &ga, &b)?;
                let target = f.inner(&ga).ctx(|| ctx.id(&stem))?.exp();
                out.push(Check::Exact {
                    id: ctx.id(format!("{stem}/pairing")),
                    value: qf.function().inner(&ga).ctx(|| ctx.id(&stem))?.exp(),
                    target,
                });
                for (which, left) in [("projected", qf.clone()), ("full", fl.clone())] {
                    let gl = gl.clone();
                    out.push(Check::Mc {
                        id: ctx.id(format!("{stem}/mc-{which}")),
                        target,
                        precomputed: None,
                        estimator: Arc::new(move |st| {
                            sigma_inner_mc(&left, &gl, st).map(|(e, _)| e)
                        }),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// All lattice vectors `0 <= b <= a` componentwise, lexicographic.
fn lattice_box(a: &LatticeVector) -> Vec<LatticeVector> {
    let mut out = vec![Vec::new()];
    for &hi in &a.0 {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (0..=hi).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(LatticeVector).collect()
}

fn decompose_suite(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let corpus = ctx.corpus()?;
    ctx.require_nonempty(&corpus, "corpus")?;
    let a = ctx.p.fiber(ctx.name)?;
    let ws = ctx.configurations()?;
    let mut out = Vec::new();
    for (nf, f) in &corpus {
        let fl = ctx.label(nf, f, &a)?;
        for b in lattice_box(&a) {
            let id = ctx.id(format!("{nf}/b={}", lat(&b)));
            let (left, right) = decompose(&a, &fl, &b).ctx(|| id.clone())?;
            let back = sigma_product(&b, &left, &(&a - &b), &right).ctx(|| id.clone())?;
            let value = if back.fiber() == fl.fiber() {
                max_cell_diff(back.function(), f)
            } else {
                f64::INFINITY
            };
            out.push(Check::Exact {
                id: id.clone(),
                value: c(value),
                target: c(0.0),
            });
            let sr = shift_sigma(&right, &b).ctx(|| id.clone())?;
            let worst = ws
                .iter()
                .map(|w| {
                    rel(
                        sigma_eval(&left, w) * sigma_eval(&sr, w),
                        sigma_eval(&fl, w),
                    )
                })
                .fold(0.0, f64::max);
            out.push(Check::Exact {
                id: format!("{id}/pathwise"),
                value: c(worst),
                target: c(0.0),
            });
        }
    }
    Ok(out)
}

fn theta_iso(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let corpus = ctx.corpus()?;
    ctx.require_nonempty(&corpus, "corpus")?;
    let a = ctx.p.fiber(ctx.name)?;
    let functions: Vec<GridFunction> = corpus.iter().map(|(_, f)| f.clone()).collect();
    let report = theta_check(&a, &functions, ctx.settings).ctx(|| ctx.id("theta"))?;
    let mut out = Vec::new();
    for g in &report.gram {
        let stem = format!("{}~{}", corpus[g.j].0, corpus[g.k].0);
        out.push(Check::Exact {
            id: ctx.id(format!("{stem}/gram")),
            value: g.fock,
            target: g.target,
        });
        let fl = ctx.label(&corpus[g.j].0, &functions[g.j], &a)?;
        let gl = ctx.label(&corpus[g.k].0, &functions[g.k], &a)?;
        out.push(Check::Mc {
            id: ctx.id(format!("{stem}/mc")),
            target: g.target,
            precomputed: Some(g.estimate),
            estimator: Arc::new(move |st| sigma_inner_mc(&fl, &gl, st).map(|(e, _)| e)),
        });
    }
    for e in &report.intertwining {
        out.push(Check::Exact {
            id: ctx.id(format!("{}*{}/intertwining", corpus[e.j].0, corpus[e.k].0)),
            value: c(if e.equal { 0.0 } else { 1.0 }),
            target: c(0.0),
        });
    }
    Ok(out)
}

/// The single region `B` of the compound suites, as a 0/1 indicator.
fn compound_region(ctx: &Ctx) -> Result<Vec<(String, GridFunction)>, SuiteError> {
    let regions = ctx.regions()?;
    ctx.require_nonempty(&regions, "regions")?;
    for (name, b) in &regions {
        if b.values().iter().any(|v| *v != c(0.0) && *v != c(1.0)) {
            return Err(ConfigError::Field {
                field: format!("functions.{name}"),
                message: format!("suite {} needs a 0/1 indicator", ctx.name),
            }
            .into());
        }
    }
    Ok(regions)
}

fn compound_laplace(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let regions = compound_region(ctx)?;
    let levy = ctx.levy()?;
    ctx.require_nonempty(&ctx.p.t, "t")?;
    let mut out = Vec::new();
    for (nb, b) in &regions {
        for (nn, nu) in &levy {
            let sampler = Arc::new(
                MarkedSampler::new(ctx.grid.window(), ctx.grid.intensity(), nu.clone())
                    .ctx(|| ctx.id(nn))?,
            );
            for &t in &ctx.p.t {
                let id = ctx.id(format!("{nb}/{nn}/t={t}"));
                let u = b.scale(c(t));
                let target = c(compound_laplace_rhs(&u, nu).ctx(|| id.clone())?);
                let s = sampler.clone();
                out.push(Check::Mc {
                    id,
                    target,
                    precomputed: None,
                    estimator: Arc::new(move |st| mc_mean(&*s, |w| c((-xi_of(w, &u)).exp()), st)),
                });
            }
        }
    }
    Ok(out)
}

fn compound_g0(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let regions = compound_region(ctx)?;
    let levy = ctx.levy()?;
    ctx.require_nonempty(&ctx.p.rates, "rates")?;
    let a = ctx.p.fiber(ctx.name)?;
    let mut out = Vec::new();
    for (nb, b) in &regions {
        for (nn, nu) in &levy {
            let sampler = Arc::new(
                MarkedSampler::new(ctx.grid.window(), ctx.grid.intensity(), nu.clone())
                    .ctx(|| ctx.id(nn))?,
            );
            let ws: Vec<_> = (0..ctx.p.configurations())
                .map(|i| sampler.sample(ctx.settings.seed, i))
                .collect();
            let mut labels = Vec::new();
            for &rate in &ctx.p.rates {
                let stem = format!("{nb}/{nn}/c={rate}");
                let g0 = embed_g0(rate, b, nu, &a).ctx(|| ctx.id(&stem))?;
                let u = b.scale(c(rate));
                let mut worst: f64 = 0.0;
                for w in &ws {
                    let direct = xi_vector_eval(&u, w, nu).ctx(|| ctx.id(&stem))?;
                    worst = worst.max((g0.sigma_eval(w) - direct).abs() / direct);
                }
                out.push(Check::Exact {
                    id: ctx.id(format!("{stem}/pathwise")),
                    value: c(worst),
                    target: c(0.0),
                });
                let (s, g) = (sampler.clone(), g0.clone());
                out.push(Check::Mc {
                    id: ctx.id(format!("{stem}/mean")),
                    target: c(1.0),
                    precomputed: None,
                    estimator: Arc::new(move |st| mc_mean(&*s, |w| c(g.sigma_eval(w)), st)),
                });
                labels.push((rate, g0));
            }
            for (j, (r1, g)) in labels.iter().enumerate() {
                for (r2, h) in &labels[j + 1..] {
                    let id = ctx.id(format!("{nb}/{nn}/c={r1}~c={r2}/inner"));
                    let target = c(g.inner(h).ctx(|| id.clone())?.exp());
                    let (g, h) = (g.clone(), h.clone());
                    out.push(Check::Mc {
                        id,
                        target,
                        precomputed: None,
                        estimator: Arc::new(move |st| {
                            marked_sigma_inner_mc(&g, &h, st).map(|(e, _)| e)
                        }),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// `k` log-spaced probes on `[lo, hi]`.
fn probes(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![lo];
    }
    (0..k)
        .map(|j| lo * (hi / lo).powf(j as f64 / (k - 1) as f64))
        .collect()
}

fn totality(ctx: &Ctx) -> Result<Vec<Check>, SuiteError> {
    let levy = ctx.levy()?;
    ctx.require_nonempty(&ctx.p.nodes, "nodes")?;
    let (lo, hi) = ctx.p.probe_range.unwrap_or((0.05, 20.0));
    let mut out = Vec::new();
    for (nn, nu) in &levy {
        for &m in &ctx.p.nodes {
            let marks = nu.discretize(m).ctx(|| ctx.id(nn))?;
            // atomic measures ignore the node count
            let id = ctx.id(format!("{nn}/m={}", marks.len()));
            if out.iter().any(|ch: &Check| ch.id() == id) {
                continue;
            }
            let rank =
                totality_rank(&marks, &probes(lo, hi, marks.len() + 4)).ctx(|| id.clone())?;
            out.push(Check::Exact {
                id,
                value: c(rank as f64),
                target: c(marks.len() as f64),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_box_enumerates_order_interval() {
        let b = lattice_box(&LatticeVector(vec![1, 2]));
        assert_eq!(b.len(), 6);
        assert_eq!(b[0].0, vec![0, 0]);
        assert_eq!(b[5].0, vec![1, 2]);
    }

    #[test]
    fn probes_are_log_spaced() {
        let p = probes(0.1, 10.0, 3);
        assert!((p[1] - 1.0).abs() < 1e-12);
        assert_eq!(probes(0.5, 8.0, 1), vec![0.5]);
    }
}
