//! Monte-Carlo checks of the convolution and pair-splitting inequalities
//! used by the weighted-norm machinery.

use crate::error::{Error, Result};
use crate::real::Kahan;
use crate::space::SpaceSpec;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// One Monte-Carlo ratio sample of the convolution bound.
#[derive(Clone, Copy, Debug)]
pub struct ConvolutionPoint {
    pub y_norm: f64,
    pub integral: f64,
    pub stderr: f64,
    /// `integral · (1+|y|)^β` — should stay bounded in `|y|`.
    pub ratio: f64,
}

/// Estimate `∫ |y-z|^{-(N-2m)} (1+|z|)^{-(2m+β)} dz` at `|y| ∈ {1, 10, 100}`
/// and check that `(1+|y|)^β` times it stays within a factor 3 across the
/// three magnitudes.
///
/// The radial substitution around `y` absorbs the integrable singularity:
/// `z = y + ρω` with `ρ` log-uniform and `ω` uniform on the sphere.
pub fn convolution_bound_check(
    spec: &SpaceSpec<f64>,
    beta: f64,
    n_samples: u64,
    seed: u64,
) -> Result<(Vec<ConvolutionPoint>, bool)> {
    let nu = spec.nu_t();
    if beta <= 0.0 || beta >= nu {
        return Err(Error::InvalidConfig(format!(
            "beta must lie in (0, {nu}), got {beta}"
        )));
    }
    let n = spec.n as usize;
    let area = crate::special::sphere_area::<f64>(spec.n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &y_norm in &[1.0f64, 10.0, 100.0] {
        // log-uniform radial proposal wide enough for bias below noise
        let rho_min = 1e-6 * (1.0 + y_norm);
        let rho_max = 1e6 * (1.0 + y_norm);
        let log_span = (rho_max / rho_min).ln();
        let mut sum = Kahan::<f64>::new();
        let mut sum_sq = Kahan::<f64>::new();
        let mut dir = vec![0.0f64; n];
        for _ in 0..n_samples {
            let rho = rho_min * (rng.random::<f64>() * log_span).exp();
            let mut nrm = 0.0;
            for d in dir.iter_mut() {
                *d = rng.sample(StandardNormal);
                nrm += *d * *d;
            }
            let nrm = nrm.sqrt();
            // |z|² for z = y + ρω with y = y_norm·e₁
            let mut z2 = (y_norm + rho * dir[0] / nrm).powi(2);
            for d in dir.iter().skip(1) {
                z2 += (rho * d / nrm).powi(2);
            }
            // ∫ f dz = ∫∫ ρ^{N-1-ν} (1+|z|)^{-(2m+β)} dρ dω, importance ρ ~ 1/(ρ ln span)
            let val = rho.powf(spec.n as f64 - nu) // N-1-ν plus the ρ from the log proposal
                * (1.0 + z2.sqrt()).powf(-(2.0 * spec.m as f64 + beta))
                * log_span
                * area;
            sum.add(val);
            sum_sq.add(val * val);
        }
        let nf = n_samples as f64;
        let mean = sum.total() / nf;
        let var = (sum_sq.total() / nf - mean * mean).max(0.0);
        let stderr = (var / nf).sqrt();
        if stderr > 0.5 * mean.abs() {
            return Err(Error::SamplerDegenerate {
                stderr,
                estimate: mean,
                limit: 0.5,
            });
        }
        out.push(ConvolutionPoint {
            y_norm,
            integral: mean,
            stderr,
            ratio: mean * (1.0 + y_norm).powf(beta),
        });
    }
    let hi = out.iter().map(|p| p.ratio).fold(f64::MIN, f64::max);
    let lo = out.iter().map(|p| p.ratio).fold(f64::MAX, f64::min);
    Ok((out, hi / lo <= 3.0))
}

/// Result of the pointwise pair-splitting check.
#[derive(Clone, Copy, Debug)]
pub struct PairSplitOutcome {
    pub separation: f64,
    /// Max over sampled points of `g_{mn} |x_m-x_n|^υ / (split sum)`.
    pub empirical_c: f64,
}

/// Verify that `(1+|y-x_n|)^{-γ₁}(1+|y-x_m|)^{-γ₂}` is dominated by
/// `C |x_m-x_n|^{-υ}` times the two split powers, with a `C` that stays
/// stable (within ×2) across separations 10 and 100.
pub fn pair_split_check(
    spec: &SpaceSpec<f64>,
    gamma1: f64,
    gamma2: f64,
    upsilon: f64,
    trials: u64,
    seed: u64,
) -> Result<(Vec<PairSplitOutcome>, bool)> {
    if gamma1 < 1.0 || gamma2 < 1.0 {
        return Err(Error::InvalidConfig("gamma exponents must be >= 1".into()));
    }
    if upsilon <= 0.0 || upsilon > gamma1.min(gamma2) {
        return Err(Error::InvalidConfig(format!(
            "upsilon must lie in (0, min(gamma1, gamma2)], got {upsilon}"
        )));
    }
    let n = spec.n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &sep in &[10.0f64, 100.0] {
        let xn = vec![0.0f64; n];
        let mut xm = vec![0.0f64; n];
        xm[0] = sep;
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            // sample around both centers and in the slab between them
            let mode: u8 = rng.random_range(0..3);
            let mut y = vec![0.0f64; n];
            match mode {
                0 | 1 => {
                    let center = if mode == 0 { &xn } else { &xm };
                    let rho = 10f64.powf(rng.random_range(-1.0..2.5));
                    let mut nrm = 0.0;
                    let mut d = vec![0.0f64; n];
                    for di in d.iter_mut() {
                        *di = rng.sample(StandardNormal);
                        nrm += *di * *di;
                    }
                    let nrm = nrm.sqrt();
                    for i in 0..n {
                        y[i] = center[i] + d[i] / nrm * rho;
                    }
                }
                _ => {
                    y[0] = rng.random_range(-sep..2.0 * sep);
                    for yi in y.iter_mut().skip(1) {
                        *yi = rng.random_range(-sep..sep);
                    }
                }
            }
            let dn = crate::real::dist2(&y, &xn).sqrt();
            let dm = crate::real::dist2(&y, &xm).sqrt();
            let g = (1.0 + dn).powf(-gamma1) * (1.0 + dm).powf(-gamma2);
            let split_pow = gamma1 + gamma2 - upsilon;
            let split = (1.0 + dm).powf(-split_pow) + (1.0 + dn).powf(-split_pow);
            worst = worst.max(g * sep.powf(upsilon) / split);
        }
        out.push(PairSplitOutcome {
            separation: sep,
            empirical_c: worst,
        });
    }
    let stable = out[0].empirical_c.max(out[1].empirical_c)
        / out[0].empirical_c.min(out[1].empirical_c)
        <= 2.0;
    let finite = out.iter().all(|o| o.empirical_c.is_finite());
    Ok((out, stable && finite))
}
