//! The radial curvature profile `K`.
//!
//! Inside the window `|s-1| ≤ δ` the profile is the exact power law
//! `1 - c0 |s-1|^l`. Outside it is blended by a cubic smoothstep over
//! `[δ, 2δ]` onto the constant `1 - c0 δ^l`, which keeps `K` in `(0, 1]`,
//! `C¹`, with `K'` bounded.

use crate::error::{Error, Result};
use crate::real::{lower, ri, Real};

#[derive(Clone, Copy, Debug)]
pub struct KProfile<T> {
    pub c0: T,
    pub l: T,
    /// Half-width of the exact power-law window around `s = 1`.
    pub delta: T,
}

impl<T: Real> KProfile<T> {
    pub fn new(c0: T, l: T, delta: T) -> Result<Self> {
        if c0 < T::zero() {
            return Err(Error::NonPositive {
                name: "c0",
                value: lower(c0),
            });
        }
        if delta <= T::zero() {
            return Err(Error::NonPositive {
                name: "delta",
                value: lower(delta),
            });
        }
        if l < T::one() {
            return Err(Error::InvalidConfig(format!(
                "flatness order l must be >= 1, got {}",
                lower(l)
            )));
        }
        // the blend never dips below the power law at 2δ, so this floor
        // keeps K positive everywhere
        let floor = T::one() - c0 * (ri::<T>(2) * delta).powf(l);
        if floor <= T::zero() {
            return Err(Error::InvalidConfig(format!(
                "profile not positive: c0 (2 delta)^l = {} >= 1",
                lower(c0 * (ri::<T>(2) * delta).powf(l))
            )));
        }
        Ok(Self { c0, l, delta })
    }

    /// Flat profile `K ≡ 1`.
    pub fn flat(l: T, delta: T) -> Self {
        Self {
            c0: T::zero(),
            l,
            delta,
        }
    }

    /// Evaluate `K(s)` for `s ≥ 0`.
    pub fn eval(&self, s: T) -> T {
        let x = (s - T::one()).abs();
        let power = |x: T| T::one() - self.c0 * x.powf(self.l);
        let cap = power(self.delta);
        if x <= self.delta {
            power(x)
        } else if x < ri::<T>(2) * self.delta {
            let u = (x - self.delta) / self.delta;
            let w = u * u * (ri::<T>(3) - ri::<T>(2) * u);
            (T::one() - w) * power(x) + w * cap
        } else {
            cap
        }
    }
}
