use num_complex::Complex64;
use std::f64::consts::PI;

/// The fixed logarithm `ℓ`: principal branch with argument in `(-π, π]`, so
/// `e^{ℓ(z)} = z` and `ℓ(x) = ln x` for `x > 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MeasurableLog;

impl MeasurableLog {
    /// `None` at zero.
    pub fn apply(&self, z: Complex64) -> Option<Complex64> {
        if z.re == 0.0 && z.im == 0.0 {
            return None;
        }
        if z.im == 0.0 && z.re > 0.0 {
            return Some(Complex64::new(z.re.ln(), 0.0));
        }
        let mut arg = z.im.atan2(z.re);
        // atan2 returns -π on the negative real axis with a negative zero.
        if arg == -PI {
            arg = PI;
        }
        Some(Complex64::new(z.norm().ln(), arg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn branch_cut_convention() {
        let l = MeasurableLog;
        assert_eq!(
            l.apply(Complex64::new(-1.0, 0.0)).unwrap(),
            Complex64::new(0.0, PI)
        );
        assert_eq!(
            l.apply(Complex64::new(-1.0, -0.0)).unwrap(),
            Complex64::new(0.0, PI)
        );
        assert_eq!(l.apply(Complex64::new(0.0, 0.0)), None);
        assert_eq!(
            l.apply(Complex64::new(1.0, 0.0)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    proptest! {
        #[test]
        fn exp_inverts_log(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            prop_assume!(re != 0.0 || im != 0.0);
            let z = Complex64::new(re, im);
            let w = MeasurableLog.apply(z).unwrap();
            prop_assert!(w.im > -PI && w.im <= PI);
            prop_assert!((w.exp() - z).norm() <= 1e-13 * z.norm());
        }

        #[test]
        fn real_on_positive_axis(x in 1e-12f64..1e12) {
            let w = MeasurableLog.apply(Complex64::new(x, 0.0)).unwrap();
            prop_assert_eq!(w.im, 0.0);
            prop_assert_eq!(w.re, x.ln());
        }
    }
}
