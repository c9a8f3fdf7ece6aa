//! Exact lattice interaction sums over the tower points and their
//! large-`k` asymptotic laws.

use crate::constants::ExpansionConstants;
use crate::error::{Error, Result};
use crate::real::{lower, ri, Kahan, Real};
use crate::tower::TowerConfig;

/// Which remainder law of the expansion applies to a sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemainderModel {
    /// Same-ring remainder: `O(1/k²)` for `N ≥ 2m+4`, `O(ln k / k²)` at `N = 2m+3`.
    SameRing { log_corrected: bool },
    /// Cross-ring remainder: `O(1/(hk))`.
    CrossRing,
}

impl core::fmt::Display for RemainderModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RemainderModel::SameRing {
                log_corrected: true,
            } => write!(f, "O(ln k / k^2)"),
            RemainderModel::SameRing {
                log_corrected: false,
            } => write!(f, "O(1/k^2)"),
            RemainderModel::CrossRing => write!(f, "O(1/(h k))"),
        }
    }
}

/// One exact-vs-asymptotic comparison.
#[derive(Clone, Copy, Debug)]
pub struct SumReport<T> {
    pub k: u32,
    pub exact: T,
    pub asymptotic: T,
    pub relative_gap: T,
    pub remainder_model: RemainderModel,
}

/// `Σ_{j=1}^{k-1} |x^+_{k,1,r} - x^+_{k,1+j,r}|^{-(N-2m)}`, compensated.
pub fn sum_same_exact<T: Real>(cfg: &TowerConfig<T>) -> Result<T> {
    if cfg.k < 2 {
        return Err(Error::InvalidConfig(format!(
            "same-ring sum needs k >= 2, got {}",
            cfg.k
        )));
    }
    let nu = cfg.spec.nu_t();
    let mut acc = Kahan::new();
    for j in 1..cfg.k {
        acc.add(cfg.dist_same(j)?.powf(-nu));
    }
    Ok(acc.total())
}

/// Asymptotic law `B1 k^{N-2m} / (r √(1-h²))^{N-2m}`.
pub fn sum_same_asym<T: Real>(cfg: &TowerConfig<T>, c: &ExpansionConstants<T>) -> T {
    let nu = cfg.spec.nu_t();
    let kf = ri::<T>(i64::from(cfg.k));
    c.b1.value * kf.powf(nu) / (cfg.r * (T::one() - cfg.h * cfg.h).sqrt()).powf(nu)
}

/// `Σ_{j=1}^{k} |x^+_{k,1,r} - x^-_{k,j,r}|^{-(N-2m)}`, compensated.
pub fn sum_cross_exact<T: Real>(cfg: &TowerConfig<T>) -> T {
    let nu = cfg.spec.nu_t();
    let mut acc = Kahan::new();
    for j in 1..=cfg.k {
        acc.add(cfg.dist_cross(j).expect("j in range").powf(-nu));
    }
    acc.total()
}

/// Asymptotic law `B2 k / (r^{N-2m} h^{N-2m-1} √(1-h²))`.
pub fn sum_cross_asym<T: Real>(cfg: &TowerConfig<T>, c: &ExpansionConstants<T>) -> Result<T> {
    if cfg.h == T::zero() || cfg.h == T::one() {
        return Err(Error::DegenerateHeight { h: lower(cfg.h) });
    }
    let nu = cfg.spec.nu_t();
    let kf = ri::<T>(i64::from(cfg.k));
    Ok(c.b2.value * kf
        / (cfg.r.powf(nu) * cfg.h.powf(nu - T::one()) * (T::one() - cfg.h * cfg.h).sqrt()))
}

fn same_remainder<T: Real>(cfg: &TowerConfig<T>) -> RemainderModel {
    RemainderModel::SameRing {
        log_corrected: cfg.spec.n == 2 * cfg.spec.m + 3,
    }
}

/// Exact-vs-asymptotic report for the same-ring sum.
pub fn same_report<T: Real>(
    cfg: &TowerConfig<T>,
    c: &ExpansionConstants<T>,
) -> Result<SumReport<T>> {
    let exact = sum_same_exact(cfg)?;
    let asymptotic = sum_same_asym(cfg, c);
    Ok(SumReport {
        k: cfg.k,
        exact,
        asymptotic,
        relative_gap: (exact / asymptotic - T::one()).abs(),
        remainder_model: same_remainder(cfg),
    })
}

/// Exact-vs-asymptotic report for the cross-ring sum.
pub fn cross_report<T: Real>(
    cfg: &TowerConfig<T>,
    c: &ExpansionConstants<T>,
) -> Result<SumReport<T>> {
    let exact = sum_cross_exact(cfg);
    let asymptotic = sum_cross_asym(cfg, c)?;
    Ok(SumReport {
        k: cfg.k,
        exact,
        asymptotic,
        relative_gap: (exact / asymptotic - T::one()).abs(),
        remainder_model: RemainderModel::CrossRing,
    })
}
