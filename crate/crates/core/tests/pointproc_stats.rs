//! Statistical checks of the samplers against closed-form Poisson identities.
//! Every band is 4 standard errors.

mod common;

use ccrflow_core::pointproc::{
    compound_laplace_rhs, eta_count, exp_functional, master_equation_rhs, mc_mean, xi_mass, xi_of,
};
use ccrflow_core::{
    Complex64, GridFunction, LevyMeasure, MarkedSampler, McSettings, PoissonSampler, Window,
};
use common::*;
use std::f64::consts::E;

const N: usize = 100_000;

fn unit_line() -> Window {
    Window::new(vec![0.0], vec![1.0]).unwrap()
}

fn real(x: f64) -> Complex64 {
    c(x, 0.0)
}

#[test]
fn sparse_poisson_mean() {
    let s = PoissonSampler::new(unit_line(), 0.01).unwrap();
    let est = mc_mean(&s, |w| real(w.len() as f64), McSettings::new(N, 1)).unwrap();
    assert!(est.agrees_with(real(0.01), 4.0), "{est:?}");
}

#[test]
fn poisson_variance_one() {
    let s = PoissonSampler::new(unit_line(), 1.0).unwrap();
    let est = mc_mean(
        &s,
        |w| real((w.len() as f64 - 1.0).powi(2)),
        McSettings::new(N, 2),
    )
    .unwrap();
    assert!(est.agrees_with(real(1.0), 4.0), "{est:?}");
}

#[test]
fn count_mean_two() {
    let w = Window::new(vec![0.0, 0.0], vec![2.0, 0.5]).unwrap();
    let s = PoissonSampler::new(w, 2.0).unwrap();
    let est = mc_mean(&s, |w| real(w.len() as f64), McSettings::new(N, 3)).unwrap();
    assert!(est.agrees_with(real(2.0), 4.0), "{est:?}");
}

#[test]
fn complete_independence() {
    // disjoint B1 = [0, 1), B2 = [1, 2.5) with λ = 1.5 · Lebesgue
    let s = PoissonSampler::new(Window::new(vec![0.0], vec![3.0]).unwrap(), 1.5).unwrap();
    let (m1, m2) = (1.5, 2.25);
    let est = mc_mean(
        &s,
        |w| {
            let n1 = eta_count(w, |y| y[0] < 1.0) as f64;
            let n2 = eta_count(w, |y| (1.0..2.5).contains(&y[0])) as f64;
            real((n1 - m1) * (n2 - m2))
        },
        McSettings::new(N, 4),
    )
    .unwrap();
    assert!(est.agrees_with(real(0.0), 4.0), "{est:?}");
}

#[test]
fn stationarity_first_two_moments() {
    let w = Window::new(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
    let s = PoissonSampler::new(w, 1.0).unwrap();
    let in_b = |y: &[f64]| y[0] < 0.8 && y[1] < 0.5;
    let in_bx = |y: &[f64]| (1.1..1.9).contains(&y[0]) && (0.7..1.2).contains(&y[1]);
    let first = mc_mean(
        &s,
        |w| real(eta_count(w, in_b) as f64 - eta_count(w, in_bx) as f64),
        McSettings::new(N, 5),
    )
    .unwrap();
    let second = mc_mean(
        &s,
        |w| real((eta_count(w, in_b) as f64).powi(2) - (eta_count(w, in_bx) as f64).powi(2)),
        McSettings::new(N, 6),
    )
    .unwrap();
    assert!(first.agrees_with(real(0.0), 4.0), "{first:?}");
    assert!(second.agrees_with(real(0.0), 4.0), "{second:?}");
}

#[test]
fn exponential_of_count() {
    // λ(B) = 1 with B = [0, 1) inside the grid window [0, 2)
    let g = line(4, 0.5);
    let u = GridFunction::indicator(g.clone(), &[0], &[2], real(1.0)).unwrap();
    let target = master_equation_rhs(&u).unwrap();
    assert!((target.re - (E - 1.0).exp()).abs() < 1e-13);
    assert!((target.re - 5.5749).abs() < 1e-4);
    let s = PoissonSampler::new(g.window(), g.intensity()).unwrap();
    let est = mc_mean(
        &s,
        |w| exp_functional(w, &u).unwrap(),
        McSettings::new(N, 7),
    )
    .unwrap();
    assert!(est.agrees_with(target, 4.0), "{est:?} vs {target}");
}

#[test]
fn atomic_marks() {
    let nu = LevyMeasure::Atomic(vec![(2.0, 1.0)]);
    let s = MarkedSampler::new(unit_line(), 1.0, nu).unwrap();
    let count = mc_mean(&s, |w| real(w.len() as f64), McSettings::new(N, 8)).unwrap();
    assert!(count.agrees_with(real(1.0), 4.0));
    let all_two = mc_mean(
        &s,
        |w| real(w.pairs.iter().all(|(_, r)| *r == 2.0) as u8 as f64),
        McSettings::new(1000, 8),
    )
    .unwrap();
    assert_eq!(all_two.mean, real(1.0));
}

#[test]
fn exponential_mark_mean() {
    let nu = LevyMeasure::Exponential {
        rate: 1.0,
        mass: 1.0,
    };
    let s = MarkedSampler::new(unit_line(), 1.0, nu).unwrap();
    // Campbell: E ξ(window) = ρ0(window) ∫ r ν(dr) = 1
    let est = mc_mean(&s, |w| real(xi_mass(w, |_| true)), McSettings::new(N, 9)).unwrap();
    assert!(est.agrees_with(real(1.0), 4.0), "{est:?}");
}

#[test]
fn rare_marked_configurations_are_mostly_empty() {
    let nu = LevyMeasure::Exponential {
        rate: 3.0,
        mass: 0.001,
    };
    let s = MarkedSampler::new(unit_line(), 1.0, nu).unwrap();
    let est = mc_mean(
        &s,
        |w| real(w.is_empty() as u8 as f64),
        McSettings::new(N, 10),
    )
    .unwrap();
    assert!(est.agrees_with(real((-0.001f64).exp()), 4.0), "{est:?}");
}

#[test]
fn truncated_gamma_mark_mean() {
    let nu = LevyMeasure::TruncatedGamma {
        shape: 2.0,
        rate: 1.5,
        cutoff: 0.2,
    };
    let s =
        MarkedSampler::new(Window::new(vec![0.0], vec![0.5]).unwrap(), 1.0, nu.clone()).unwrap();
    let target = 0.5 * nu.total_mass() * nu.mean_mark();
    let est = mc_mean(&s, |w| real(xi_mass(w, |_| true)), McSettings::new(N, 11)).unwrap();
    assert!(est.agrees_with(real(target), 4.0), "{est:?} vs {target}");
}

#[test]
fn compound_laplace_single_atom() {
    let g = line(4, 0.5);
    let nu = LevyMeasure::Atomic(vec![(1.0, 1.0)]);
    let u = GridFunction::indicator(g.clone(), &[0], &[2], real(1.0)).unwrap();
    let target = compound_laplace_rhs(&u, &nu).unwrap();
    let s = MarkedSampler::new(g.window(), g.intensity(), nu).unwrap();
    let est = mc_mean(&s, |w| real((-xi_of(w, &u)).exp()), McSettings::new(N, 12)).unwrap();
    assert!(est.agrees_with(real(target), 4.0), "{est:?} vs {target}");
}
