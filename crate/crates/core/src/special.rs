//! Small numerical kernels: exponential integral, Gauss-Laguerre rules and
//! adaptive Simpson quadrature on finite intervals.

use nalgebra::{DMatrix, SymmetricEigen};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 needs a positive argument, got {x}");
    if x <= 1.0 {
        // -γ - ln x - Σ_{k>=1} (-x)^k / (k k!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // Lentz continued fraction.
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Nodes and weights of the `n`-point Gauss-Laguerre rule for
/// `∫_0^∞ g(x) e^{-x} dx`, computed from the Jacobi matrix.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (2 * i + 1) as f64
        } else if i + 1 == j {
            j as f64
        } else if j + 1 == i {
            i as f64
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &x)| (x, eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `n`-point Gauss rule for the discrete measure `Σ w_i δ_{x_i}`, via the
/// discretized Stieltjes procedure in orthonormal form followed by
/// Golub-Welsch. Use a fine discretization of a continuous measure to get
/// its Gauss rule.
pub fn gauss_from_discrete(x: &[f64], w: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && x.len() == w.len() && x.len() >= n);
    let mu0: f64 = w.iter().sum();
    let mut q_prev = vec![0.0; x.len()];
    let mut q = vec![1.0 / mu0.sqrt(); x.len()];
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n);
    let mut b_prev = 0.0;
    for _ in 0..n {
        let a: f64 = x
            .iter()
            .zip(w)
            .zip(&q)
            .map(|((xi, wi), qi)| wi * xi * qi * qi)
            .sum();
        let r: Vec<f64> = x
            .iter()
            .zip(&q)
            .zip(&q_prev)
            .map(|((xi, qi), pi)| (xi - a) * qi - b_prev * pi)
            .collect();
        let b = r
            .iter()
            .zip(w)
            .map(|(ri, wi)| wi * ri * ri)
            .sum::<f64>()
            .sqrt();
        diag.push(a);
        off.push(b);
        q_prev = std::mem::replace(&mut q, r.iter().map(|ri| ri / b).collect());
        b_prev = b;
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &xk)| (xk, mu0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Composite Simpson rule on `[a, b]` with `panels` (even) panels, as
/// nodes and weights.
pub fn simpson_rule(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(panels >= 2 && panels.is_multiple_of(2));
    let h = (b - a) / panels as f64;
    (0..=panels)
        .map(|i| {
            let wt = if i == 0 || i == panels {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (a + i as f64 * h, wt * h / 3.0)
        })
        .unzip()
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_reference_values() {
        // Abramowitz & Stegun table 5.1
        assert!((exp_integral_e1(0.5) - 0.559_773_594_776_160_8).abs() < 1e-14);
        assert!((exp_integral_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
        assert!((exp_integral_e1(2.0) - 0.048_900_510_708_061_1).abs() < 1e-15);
        assert!((exp_integral_e1(0.1) - 1.822_923_958_419_390_7).abs() < 1e-13);
    }

    #[test]
    fn e1_matches_quadrature() {
        for &x in &[0.05, 0.3, 0.9, 1.1, 3.0, 7.5] {
            let q = adaptive_simpson(&|t: f64| (-t).exp() / t, x, x + 60.0, 1e-14);
            assert!((q - exp_integral_e1(x)).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn laguerre_integrates_polynomials() {
        let (x, w) = gauss_laguerre(6);
        // ∫ x^k e^{-x} = k!
        let mut fact = 1.0;
        for k in 0..12 {
            if k > 0 {
                fact *= k as f64;
            }
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            assert!((q - fact).abs() < 1e-9 * fact, "k={k}");
        }
    }

    #[test]
    fn stieltjes_reproduces_laguerre() {
        // fine discretization of e^{-x} on [0, 60]
        let (x, w0) = simpson_rule(0.0, 60.0, 60_000);
        let w: Vec<f64> = x.iter().zip(&w0).map(|(xi, wi)| wi * (-xi).exp()).collect();
        let (gx, gw) = gauss_from_discrete(&x, &w, 6);
        let (lx, lw) = gauss_laguerre(6);
        for i in 0..6 {
            assert!((gx[i] - lx[i]).abs() < 1e-9 * lx[i].max(1.0), "{i}");
            assert!((gw[i] - lw[i]).abs() < 1e-9, "{i}");
        }
    }

    #[test]
    fn simpson_polynomial() {
        let q = adaptive_simpson(&|x: f64| x * x * x - x, 0.0, 2.0, 1e-12);
        assert!((q - 2.0).abs() < 1e-12);
    }
}
