//! Dimension/order bundle `(N, m)` and the admissible flatness window.

use crate::error::{Error, Result};
use crate::real::{lower, rf, ri, Real};

/// Validated `(N, m)` pair with its derived exponents.
///
/// `N` is the ambient dimension, `m` the half-order of the operator
/// `(-Δ)^m`, `mstar = 2N/(N-2m)` the critical exponent, `cnm` the bubble
/// normalization, `c0` the curvature-flatness amplitude and `l` the
/// flatness order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceSpec<T> {
    pub n: u32,
    pub m: u32,
    pub mstar: T,
    /// `mstar` as a reduced integer fraction.
    pub mstar_ratio: (u32, u32),
    pub cnm: T,
    pub c0: T,
    pub l: T,
}

impl<T: Real> SpaceSpec<T> {
    /// Validate `(N, m, l, c0)` and populate the derived fields.
    pub fn new(n: u32, m: u32, l: T, c0: T) -> Result<Self> {
        if m == 0 {
            return Err(Error::NonPositive {
                name: "m",
                value: 0.0,
            });
        }
        if n < 2 * m + 3 {
            return Err(Error::DimensionTooSmall { n, m });
        }
        if c0 <= T::zero() {
            return Err(Error::NonPositive {
                name: "c0",
                value: lower(c0),
            });
        }
        let nu = n - 2 * m;
        let nu_t = ri::<T>(i64::from(nu));
        let threshold = Self::l_threshold(n, m);
        let two = ri::<T>(2);
        // window (l_{N,m}, N-2m] ∩ [2, N-2m]
        if !(l > threshold && l >= two && l <= nu_t) {
            return Err(Error::FlatnessOutOfRange {
                l: lower(l),
                lo: lower(threshold.max(two)),
                hi: f64::from(nu),
            });
        }
        let g = gcd(2 * n, nu);
        let mstar = ri::<T>(i64::from(2 * n)) / nu_t;
        let mut prod = 1i64;
        for i in -(i64::from(m))..i64::from(m) {
            prod *= i64::from(n) + 2 * i;
        }
        let cnm = ri::<T>(prod).powf(nu_t / ri::<T>(4 * i64::from(m)));
        Ok(Self {
            n,
            m,
            mstar,
            mstar_ratio: (2 * n / g, nu / g),
            cnm,
            c0,
            l,
        })
    }

    /// Lower end `l_{N,m}` of the flatness window.
    pub fn l_threshold(n: u32, m: u32) -> T {
        let nu = ri::<T>(i64::from(n) - 2 * i64::from(m));
        let pref = nu / (ri::<T>(4) * (nu + T::one()));
        let disc = rf::<T>(25.0) * nu * nu + rf::<T>(22.0) * nu + T::one();
        pref * (ri::<T>(-3) * ri::<T>(i64::from(n)) + ri::<T>(6) * ri::<T>(i64::from(m)) - T::one()
            + disc.sqrt())
    }

    /// `N - 2m` as an integer.
    #[inline]
    pub fn nu(&self) -> u32 {
        self.n - 2 * self.m
    }

    /// `N - 2m` as a scalar.
    #[inline]
    pub fn nu_t(&self) -> T {
        ri(i64::from(self.nu()))
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn n5_m1_l2_substitution() {
        let s = SpaceSpec::<f64>::new(5, 1, 2.0, 1.0).unwrap();
        assert_relative_eq!(s.mstar, 10.0 / 3.0, max_relative = 1e-15);
        assert_eq!(s.mstar_ratio, (10, 3));
        // c_{5,1} = (3·5)^{3/4}
        assert_relative_eq!(s.cnm, 15.0f64.powf(0.75), max_relative = 1e-15);
        assert_eq!(s.nu(), 3);
    }

    #[test]
    fn l_threshold_n5_m1() {
        // (3/16)(−10+√292), evaluated independently
        let expected = 3.0 / 16.0 * (-10.0 + 292.0f64.sqrt());
        let got: f64 = SpaceSpec::<f64>::l_threshold(5, 1);
        assert_relative_eq!(got, expected, max_relative = 1e-14);
        assert_relative_eq!(got, 1.329_001_404_494_074_2, max_relative = 1e-12);
        // threshold below 2, so the window is [2, 3]
        assert!(SpaceSpec::<f64>::new(5, 1, 2.0, 1.0).is_ok());
        assert!(SpaceSpec::<f64>::new(5, 1, 3.0, 1.0).is_ok());
        assert!(matches!(
            SpaceSpec::<f64>::new(5, 1, 1.9, 1.0),
            Err(Error::FlatnessOutOfRange { .. })
        ));
        assert!(matches!(
            SpaceSpec::<f64>::new(5, 1, 3.1, 1.0),
            Err(Error::FlatnessOutOfRange { .. })
        ));
    }

    #[test]
    fn dimension_too_small() {
        assert_eq!(
            SpaceSpec::<f64>::new(4, 1, 2.0, 1.0),
            Err(Error::DimensionTooSmall { n: 4, m: 1 })
        );
    }

    #[test]
    fn rejects_nonpositive_c0() {
        assert!(matches!(
            SpaceSpec::<f64>::new(5, 1, 2.0, 0.0),
            Err(Error::NonPositive { name: "c0", .. })
        ));
    }

    #[test]
    fn endpoint_l_equals_nu_is_allowed() {
        // closed interval at l = N−2m
        let s = SpaceSpec::<f64>::new(5, 1, 3.0, 1.0).unwrap();
        assert_eq!(s.l, 3.0);
    }

    #[test]
    fn higher_order_case() {
        // N=7, m=2: ν=3, c_{7,2} = (3·5·7·9)^{3/8}
        let s = SpaceSpec::<f64>::new(7, 2, 2.5, 1.0).unwrap();
        assert_relative_eq!(
            s.cnm,
            (3.0f64 * 5.0 * 7.0 * 9.0).powf(3.0 / 8.0),
            max_relative = 1e-15
        );
        assert_relative_eq!(s.mstar, 14.0 / 3.0, max_relative = 1e-15);
    }
}
