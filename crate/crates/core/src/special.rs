//! Special functions: log-gamma, Riemann zeta on the real axis, sphere areas.

use crate::real::{rf, ri, Kahan, Real};

/// Lanczos coefficients for g = 7, n = 9 (double precision).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive real argument.
pub fn lgamma<T: Real>(x: T) -> T {
    assert!(x > T::zero(), "lgamma requires a positive argument");
    let half = rf::<T>(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - lgamma(T::one() - x);
    }
    let xm1 = x - T::one();
    let mut acc = rf::<T>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += rf::<T>(c) / (xm1 + ri::<T>(i as i64));
    }
    let t = xm1 + rf::<T>(LANCZOS_G) + half;
    let ln_sqrt_2pi = rf::<T>(0.918_938_533_204_672_7);
    ln_sqrt_2pi + (xm1 + half) * t.ln() - t + acc.ln()
}

/// Gamma function for positive real argument.
pub fn gamma<T: Real>(x: T) -> T {
    lgamma(x).exp()
}

/// Riemann zeta `ζ(s)` for real `s > 1`.
///
/// Partial sum plus the integral bracket of the tail; terminates once the
/// bracket half-width drops below `1e-13` of the partial sum.
pub fn zeta<T: Real>(s: T) -> T {
    assert!(s > T::one(), "zeta series requires s > 1");
    let tol = rf::<T>(1e-13);
    let mut sum = Kahan::<T>::new();
    let mut j = 1i64;
    loop {
        sum.add(ri::<T>(j).powf(-s));
        if j >= 16 && j % 16 == 0 {
            let jf = ri::<T>(j);
            let lo = (jf + T::one()).powf(T::one() - s) / (s - T::one());
            let hi = jf.powf(T::one() - s) / (s - T::one());
            if (hi - lo) <= tol * sum.total() {
                let mid = (hi + lo) / ri::<T>(2);
                return sum.total() + mid;
            }
        }
        j += 1;
        assert!(j < 100_000_000, "zeta series failed to converge");
    }
}

/// Surface area of the unit sphere `S^{d-1}` in `R^d`.
pub fn sphere_area<T: Real>(d: u32) -> T {
    let df = ri::<T>(i64::from(d));
    let two = ri::<T>(2);
    two * T::PI().powf(df / two) / gamma(df / two)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lgamma_known_values() {
        assert_relative_eq!(gamma(1.0f64), 1.0, max_relative = 1e-13);
        assert_relative_eq!(
            gamma(0.5f64),
            core::f64::consts::PI.sqrt(),
            max_relative = 1e-13
        );
        assert_relative_eq!(gamma(5.0f64), 24.0, max_relative = 1e-13);
        // Γ(7/2) = 15/8 √π
        assert_relative_eq!(
            gamma(3.5f64),
            15.0 / 8.0 * core::f64::consts::PI.sqrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn zeta_known_values() {
        assert_relative_eq!(
            zeta(2.0f64),
            core::f64::consts::PI.powi(2) / 6.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            zeta(4.0f64),
            core::f64::consts::PI.powi(4) / 90.0,
            max_relative = 1e-12
        );
        // Apery's constant
        assert_relative_eq!(zeta(3.0f64), 1.202_056_903_159_594_2, max_relative = 1e-12);
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(
            sphere_area::<f64>(2),
            2.0 * core::f64::consts::PI,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            sphere_area::<f64>(3),
            4.0 * core::f64::consts::PI,
            max_relative = 1e-13
        );
        // |S^4| = 8π²/3
        assert_relative_eq!(
            sphere_area::<f64>(5),
            8.0 * core::f64::consts::PI.powi(2) / 3.0,
            max_relative = 1e-13
        );
    }
}
