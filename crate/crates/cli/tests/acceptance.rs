//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use ccrflow_cli::{run_suite, CheckKind, ExperimentConfig, Row, SuiteReport};
use ccrflow_core::prodsys::{sigma_eval, sigma_product, totality_rank, SigmaLabel};
use ccrflow_core::special::exp_integral_e1;
use ccrflow_core::{
    Complex64, Grid, GridFunction, LatticeVector, LevyMeasure, PoissonSampler, PolyhedralCone,
    Sampler,
};
use std::sync::Arc;

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name);
    ExperimentConfig::load(&path).expect("shipped config loads")
}

const ONE_D: &str = "default-1d.toml";
const TWO_D: [&str; 2] = ["orthant-2d.toml", "wedge-2d.toml"];

fn suite(cfg: &ExperimentConfig, name: &str) -> Result<SuiteReport> {
    Ok(run_suite(cfg, name, None)?)
}

fn all_pass(report: &SuiteReport) -> Result<()> {
    let bad: Vec<String> = report
        .failures()
        .map(|r| {
            format!(
                "{} (value {}, target {}, z {:?})",
                r.check_id, r.value, r.target, r.z
            )
        })
        .collect();
    ensure!(bad.is_empty(), "{}: failing rows {:?}", report.suite, bad);
    Ok(())
}

fn rows<'a>(report: &'a SuiteReport, suffix: &'a str) -> impl Iterator<Item = &'a Row> {
    report
        .rows
        .iter()
        .filter(move |r| r.check_id.ends_with(suffix))
}

fn max_z(report: &SuiteReport) -> f64 {
    report.rows.iter().filter_map(|r| r.z).fold(0.0, f64::max)
}

fn function(cfg: &ExperimentConfig, name: &str) -> GridFunction {
    let grid = cfg.build_grid().unwrap();
    cfg.build_function(&grid, name, "oracle").unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// `exp(Σ_cells (e^{u_c} - 1) λ(cell))`, summed here rather than in the library.
fn master_oracle(u: &GridFunction) -> Complex64 {
    let m = u.grid().cell_measure();
    let s: Complex64 = u.values().iter().map(|v| (v.exp() - 1.0) * m).sum();
    s.exp()
}

fn inner_oracle(f: &GridFunction, g: &GridFunction) -> Complex64 {
    let m = f.grid().cell_measure();
    let s: Complex64 = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(x, y)| x * y.conj() * m)
        .sum();
    s.exp()
}

type Criterion = fn() -> Result<String>;

fn criterion_1() -> Result<String> {
    let cfg = config(ONE_D);
    let p = cfg.params("master-equation").unwrap();
    ensure!(
        p.n() == 100_000 && p.corpus.len() >= 10,
        "needs n = 1e5 and >= 10 functions"
    );
    let report = suite(&cfg, "master-equation")?;
    let (mut complex, mut negative) = (false, false);
    for name in &p.corpus {
        let u = function(&cfg, name);
        complex |= u.values().iter().any(|v| v.im != 0.0);
        negative |= u.values().iter().any(|v| (v.exp() - 1.0).re < 0.0);
        let row = report
            .rows
            .iter()
            .find(|r| r.check_id == format!("master-equation/{name}"))
            .context(name.clone())?;
        ensure!(
            rel(row.target, master_oracle(&u)) <= 1e-12,
            "{name}: target {} vs oracle",
            row.target
        );
        ensure!(row.n == Some(100_000), "{name}: n = {:?}", row.n);
    }
    ensure!(
        complex && negative,
        "corpus lacks complex or e^u - 1 < 0 cases"
    );
    all_pass(&report)?;
    Ok(format!(
        "{} functions, max |z| = {:.2}",
        p.corpus.len(),
        max_z(&report)
    ))
}

fn criterion_2() -> Result<String> {
    let cfg = config(ONE_D);
    let p = cfg.params("sigma-inner").unwrap();
    let report = suite(&cfg, "sigma-inner")?;
    ensure!(report.rows.len() >= 15, "only {} pairs", report.rows.len());
    let (mut disjoint, mut equal, mut complex) = (false, false, false);
    for (j, nf) in p.corpus.iter().enumerate() {
        for ng in &p.corpus[j..] {
            let (f, g) = (function(&cfg, nf), function(&cfg, ng));
            let row = report
                .rows
                .iter()
                .find(|r| r.check_id == format!("sigma-inner/{nf}~{ng}"))
                .context("pair")?;
            ensure!(
                rel(row.target, inner_oracle(&f, &g)) <= 1e-12,
                "{nf}~{ng}: target"
            );
            ensure!(row.n == Some(100_000), "n");
            let nonzero = |h: &GridFunction| {
                h.values()
                    .iter()
                    .map(|v| v.norm() != 0.0)
                    .collect::<Vec<_>>()
            };
            let overlap = nonzero(&f).iter().zip(nonzero(&g)).any(|(a, b)| *a && b);
            disjoint |= !overlap && !f.is_zero() && !g.is_zero();
            equal |= nf == ng && !f.is_zero();
            complex |= f.values().iter().chain(g.values()).any(|v| v.im != 0.0);
        }
    }
    ensure!(
        disjoint && equal && complex,
        "corpus misses a required pair type"
    );
    all_pass(&report)?;
    let worked = report
        .rows
        .iter()
        .find(|r| r.check_id == "sigma-inner/b~b")
        .context("b~b")?;
    ensure!(
        (worked.target.re - std::f64::consts::E).abs() < 1e-12,
        "f = g = 1_B target is not e"
    );
    Ok(format!(
        "{} pairs, max |z| = {:.2}",
        report.rows.len(),
        max_z(&report)
    ))
}

fn criterion_3() -> Result<String> {
    let mut count = 0;
    for name in [ONE_D, TWO_D[0], TWO_D[1]] {
        let cfg = config(name);
        let report = suite(&cfg, "product-law")?;
        all_pass(&report)?;
        ensure!(
            rows(&report, "/associativity").all(|r| r.value.re == 0.0),
            "{name}: associativity not exact"
        );
        count += rows(&report, "/pathwise").count();
    }
    // worked example: a = b = 1, f = 1_[0,1), g = 2 · 1_[0,1)
    let grid = Arc::new(Grid::new(
        PolyhedralCone::orthant(1)?,
        vec![4],
        vec![1.0],
        1.0,
    )?);
    let one = LatticeVector(vec![1]);
    let cell = |v: [f64; 4]| {
        GridFunction::from_values(
            grid.clone(),
            v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    };
    let f = SigmaLabel::new(cell([1.0, 0.0, 0.0, 0.0])?, one.clone())?;
    let g = SigmaLabel::new(cell([2.0, 0.0, 0.0, 0.0])?, one.clone())?;
    let h = sigma_product(&one, &f, &one, &g)?;
    ensure!(
        *h.function() == cell([1.0, 2.0, 0.0, 0.0])?,
        "worked example label"
    );
    let vg = SigmaLabel::new(cell([0.0, 2.0, 0.0, 0.0])?, LatticeVector(vec![2]))?;
    let s = PoissonSampler::new(grid.window(), 1.0)?;
    for i in 0..100 {
        let w = s.sample(3, i);
        let lhs = sigma_eval(&f, &w) * sigma_eval(&vg, &w);
        ensure!(
            rel(lhs, sigma_eval(&h, &w)) <= 1e-12,
            "worked example, configuration {i}"
        );
    }
    Ok(format!(
        "{count} label pairs x 100 configurations on 3 grids, associativity exact"
    ))
}

fn criterion_4() -> Result<String> {
    let mut count = 0;
    for name in [ONE_D, TWO_D[0], TWO_D[1]] {
        let cfg = config(name);
        let report = suite(&cfg, "shift-laws")?;
        all_pass(&report)?;
        for r in &report.rows {
            ensure!(
                r.value == r.target,
                "{name}: {} not exact ({} vs {})",
                r.check_id,
                r.value,
                r.target
            );
        }
        count += report.rows.len();
    }
    Ok(format!(
        "{count} exact rows over orthant and wedge grids, zero error"
    ))
}

fn criterion_5() -> Result<String> {
    let mut pd = 0;
    for name in [ONE_D, TWO_D[0], TWO_D[1]] {
        let cfg = config(name);
        let report = suite(&cfg, "fock-laws")?;
        all_pass(&report)?;
        pd = pd.max(
            report
                .rows
                .iter()
                .filter(|r| r.kind == CheckKind::Bound)
                .count(),
        );
        ensure!(
            rows(&report, "/multiplicative").count() > 0,
            "no multiplicativity rows"
        );
    }
    let cfg = config(ONE_D);
    let theta = suite(&cfg, "theta-iso")?;
    all_pass(&theta)?;
    let inter: Vec<&Row> = rows(&theta, "/intertwining").collect();
    ensure!(
        !inter.is_empty() && inter.iter().all(|r| r.value.re == 0.0),
        "intertwining not exact"
    );
    Ok(format!(
        "Gram PD up to {pd} labels, multiplicativity <= 1e-12, {} intertwining pairs exact",
        inter.len()
    ))
}

fn criterion_6() -> Result<String> {
    let cfg = config(ONE_D);
    let report = suite(&cfg, "projection")?;
    let pairings: Vec<&Row> = rows(&report, "/pairing").collect();
    ensure!(pairings.len() >= 10, "only {} triples", pairings.len());
    ensure!(
        pairings.iter().all(|r| r.value == r.target),
        "pairing not exact"
    );
    all_pass(&report)?;
    Ok(format!(
        "{} triples, pairings exact, max |z| = {:.2}",
        pairings.len(),
        max_z(&report)
    ))
}

fn criterion_7() -> Result<String> {
    let mut splits = 0;
    for name in [ONE_D, TWO_D[0], TWO_D[1]] {
        let cfg = config(name);
        let report = suite(&cfg, "decompose")?;
        all_pass(&report)?;
        for r in report
            .rows
            .iter()
            .filter(|r| !r.check_id.ends_with("/pathwise"))
        {
            ensure!(
                r.value.re == 0.0,
                "{name}: {} round trip off by {}",
                r.check_id,
                r.value.re
            );
            splits += 1;
        }
    }
    Ok(format!("{splits} splits b <= a round-trip exactly"))
}

fn laplace_oracle(nu: &LevyMeasure, t: f64) -> f64 {
    match nu {
        LevyMeasure::Atomic(atoms) => atoms.iter().map(|(r, w)| w * (1.0 - (-t * r).exp())).sum(),
        LevyMeasure::Exponential { rate, mass } => mass * t / (rate + t),
        LevyMeasure::TruncatedGamma {
            shape,
            rate,
            cutoff,
        } => shape * (exp_integral_e1(rate * cutoff) - exp_integral_e1((rate + t) * cutoff)),
    }
}

fn criterion_8() -> Result<String> {
    let cfg = config(ONE_D);
    let p = cfg.params("compound-laplace").unwrap();
    ensure!(p.t == [0.5, 1.0, 2.0], "t values {:?}", p.t);
    let report = suite(&cfg, "compound-laplace")?;
    let b = function(&cfg, &p.regions[0]);
    let rho_b = b.integral().re;
    let mut families = Vec::new();
    for name in &p.levy {
        let nu = cfg.levy_measure(name, "oracle")?;
        families.push(std::mem::discriminant(&nu));
        for &t in &p.t {
            let id = format!("compound-laplace/{}/{name}/t={t}", p.regions[0]);
            let row = report
                .rows
                .iter()
                .find(|r| r.check_id == id)
                .context(id.clone())?;
            let oracle = (-rho_b * laplace_oracle(&nu, t)).exp();
            ensure!(
                (row.target.re - oracle).abs() <= 1e-9 * oracle,
                "{id}: target {} vs {oracle}",
                row.target.re
            );
        }
    }
    families.dedup();
    ensure!(families.len() == 3, "need all three families");
    all_pass(&report)?;
    Ok(format!(
        "{} (t, nu) cases, max |z| = {:.2}",
        report.rows.len(),
        max_z(&report)
    ))
}

fn criterion_9() -> Result<String> {
    let cfg = config(ONE_D);
    let report = suite(&cfg, "compound-g0")?;
    let pathwise: Vec<&Row> = rows(&report, "/pathwise").collect();
    ensure!(
        pathwise.len() >= 6,
        "only {} (c, B, nu) combinations",
        pathwise.len()
    );
    ensure!(
        cfg.params("compound-g0").unwrap().configurations() == 100,
        "need 100 configurations"
    );
    all_pass(&report)?;
    let worst = pathwise.iter().map(|r| r.value.re).fold(0.0, f64::max);
    Ok(format!(
        "{} combinations x 100 configurations, worst relative error {worst:.1e}",
        pathwise.len()
    ))
}

fn criterion_10() -> Result<String> {
    let cfg = config(ONE_D);
    let report = suite(&cfg, "totality")?;
    all_pass(&report)?;
    for family in ["expo", "gamma"] {
        for m in [1, 4, 8] {
            let id = format!("totality/{family}/m={m}");
            let row = report
                .rows
                .iter()
                .find(|r| r.check_id == id)
                .context(id.clone())?;
            ensure!(row.value.re == m as f64, "{id}: rank {}", row.value.re);
        }
    }
    let marks = LevyMeasure::Exponential {
        rate: 1.0,
        mass: 1.0,
    }
    .discretize(4)?;
    ensure!(
        totality_rank(&marks, &[0.5, 1.0, 2.0, 4.0, 8.0])? == 4,
        "worked example rank"
    );
    Ok("full rank for m in {1, 4, 8} with k = m + 4 probes".into())
}

fn criterion_11() -> Result<String> {
    let mut cfg = config(ONE_D);
    for s in ["master-equation", "compound-g0", "theta-iso"] {
        cfg.suites.get_mut(s).unwrap().n = Some(20_000);
    }
    let mut checked = 0;
    for s in ["master-equation", "compound-g0", "theta-iso", "decompose"] {
        let base = run_suite(&cfg, s, Some(1))?.to_csv();
        for workers in [2, 3, 8] {
            ensure!(
                run_suite(&cfg, s, Some(workers))?.to_csv() == base,
                "{s}: CSV differs at {workers} workers"
            );
        }
        checked += 1;
    }
    // through the binary: same bytes on disk for different worker counts
    let dir = tempfile::tempdir()?;
    let cfg_path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(ONE_D);
    let mut files = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(workers);
        let status = Command::new(env!("CARGO_BIN_EXE_ccrflow"))
            .args([
                "run",
                cfg_path.to_str().unwrap(),
                "--suite",
                "compound-laplace",
                "--workers",
                workers,
                "--out",
            ])
            .arg(&out)
            .output()?;
        ensure!(
            status.status.success(),
            "binary run failed: {}",
            String::from_utf8_lossy(&status.stderr)
        );
        files.push(std::fs::read(out.join("compound-laplace.csv"))?);
    }
    ensure!(
        files[0] == files[1],
        "binary CSVs differ across worker counts"
    );
    Ok(format!(
        "{checked} suites identical at 1/2/3/8 workers; binary CSV identical at 1/4"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("master equation", criterion_1),
        ("sigma inner products", criterion_2),
        ("product law", criterion_3),
        ("shift and isometry laws", criterion_4),
        ("Fock laws", criterion_5),
        ("projection consistency", criterion_6),
        ("decomposability", criterion_7),
        ("compound Laplace functional", criterion_8),
        ("compound identification", criterion_9),
        ("totality", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            std::panic::catch_unwind(run).unwrap_or_else(|_| Err(anyhow::anyhow!("panicked")));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS [{secs:.1}s] {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL [{secs:.1}s] {e:#}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
