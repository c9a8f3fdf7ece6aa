//! Weighted sup-norms on stratified grids, the ansatz error term, and the
//! norm-decay scan across ring sizes.
//!
//! Sup-norms are estimated, not proved: the grid recipe (geometric shells
//! around every bubble center plus a far-field stratum) is fixed and hashed
//! so that reports are comparable across `k`.

use crate::constants::ExpansionConstants;
use crate::energy::{ExponentBook, ReducedEnergyModel};
use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::gram::first_point_derivatives;
use crate::kprofile::KProfile;
use crate::real::{lower, norm, rf, ri, Real};
use crate::space::SpaceSpec;
use crate::tower::TowerConfig;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Fixed recipe generating a stratified evaluation grid.
#[derive(Clone, Copy, Debug)]
pub struct GridRecipe {
    pub shells_per_bubble: usize,
    pub angles_per_shell: usize,
    /// Innermost shell radius.
    pub r_min: f64,
    /// Outermost shell radius as a multiple of the minimal bubble separation.
    pub r_max_factor: f64,
    /// Extra far-field points spread over the configuration sphere scale.
    pub far_points: usize,
    pub seed: u64,
}

impl Default for GridRecipe {
    fn default() -> Self {
        Self {
            shells_per_bubble: 12,
            angles_per_shell: 32,
            r_min: 0.1,
            r_max_factor: 4.0,
            far_points: 256,
            seed: 0xd00d,
        }
    }
}

/// Evaluation points in `R^N`, flat storage.
#[derive(Clone, Debug)]
pub struct WeightedGrid<T> {
    pub dim: usize,
    points: Vec<T>,
    pub hash: u64,
}

impl<T: Real> WeightedGrid<T> {
    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

fn fnv1a(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Build the stratified grid for a configuration.
pub fn stratified_grid<T: Real>(cfg: &TowerConfig<T>, recipe: &GridRecipe) -> WeightedGrid<T> {
    let n = cfg.spec.n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed ^ u64::from(cfg.k));
    let sep = lower(cfg.min_separation());
    let r_max = (recipe.r_max_factor * sep).max(recipe.r_min * 2.0);
    let ratio = (r_max / recipe.r_min).powf(1.0 / (recipe.shells_per_bubble as f64 - 1.0));
    let mut points: Vec<T> = Vec::new();

    let mut dir = vec![0.0f64; n];
    let mut push_around = |points: &mut Vec<T>, center: &[T], radius: f64, rng: &mut ChaCha8Rng| {
        let mut nrm = 0.0;
        for d in dir.iter_mut() {
            *d = rng.sample(StandardNormal);
            nrm += *d * *d;
        }
        let nrm = nrm.sqrt();
        for (i, d) in dir.iter().enumerate() {
            points.push(center[i] + rf::<T>(d / nrm * radius));
        }
    };

    let centers: Vec<Vec<T>> = cfg
        .plus_points()
        .iter()
        .chain(cfg.minus_points().iter())
        .cloned()
        .collect();
    for center in &centers {
        for s in 0..recipe.shells_per_bubble {
            let radius = recipe.r_min * ratio.powi(s as i32);
            for _ in 0..recipe.angles_per_shell {
                push_around(&mut points, center, radius, &mut rng);
            }
        }
    }
    let origin = vec![T::zero(); n];
    let r_cfg = lower(cfg.r);
    for _ in 0..recipe.far_points {
        let radius = r_cfg * 10f64.powf(rng.random_range(-0.5..0.7));
        push_around(&mut points, &origin, radius, &mut rng);
    }

    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    hash = fnv1a(hash, &u64::from(cfg.k).to_le_bytes());
    hash = fnv1a(hash, &recipe.seed.to_le_bytes());
    hash = fnv1a(hash, &(points.len() as u64).to_le_bytes());
    for p in &points {
        hash = fnv1a(hash, &lower(*p).to_bits().to_le_bytes());
    }
    WeightedGrid {
        dim: n,
        points,
        hash,
    }
}

/// `Σ_j [(1+|y-x⁺_j|)^{-e} + (1+|y-x⁻_j|)^{-e}]`.
pub fn weight_sum<T: Real>(cfg: &TowerConfig<T>, y: &[T], exponent: T) -> T {
    let mut acc = T::zero();
    for p in cfg.plus_points().iter().chain(cfg.minus_points().iter()) {
        let d = crate::real::dist2(y, p).sqrt();
        acc += (T::one() + d).powf(-exponent);
    }
    acc
}

/// A sampled weighted-norm value.
#[derive(Clone, Debug)]
pub struct NormReport<T> {
    pub k: u32,
    pub tau: T,
    pub value: T,
    pub argmax: Vec<T>,
    pub grid_hash: u64,
}

fn weighted_sup<T: Real, F: Fn(&[T]) -> T>(
    field: &F,
    grid: &WeightedGrid<T>,
    cfg: &TowerConfig<T>,
    tau: T,
    exponent_base: T,
) -> Result<NormReport<T>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let e = exponent_base + tau;
    let mut best = T::neg_infinity();
    let mut arg = 0usize;
    for i in 0..grid.len() {
        let y = grid.point(i);
        let v = field(y).abs() / weight_sum(cfg, y, e);
        if v > best {
            best = v;
            arg = i;
        }
    }
    Ok(NormReport {
        k: cfg.k,
        tau,
        value: best,
        argmax: grid.point(arg).to_vec(),
        grid_hash: grid.hash,
    })
}

/// `‖u‖_{*,k}`: weight exponent `(N-2m)/2 + τ`.
pub fn norm_star<T: Real, F: Fn(&[T]) -> T>(
    field: &F,
    grid: &WeightedGrid<T>,
    cfg: &TowerConfig<T>,
    tau: T,
) -> Result<NormReport<T>> {
    weighted_sup(field, grid, cfg, tau, cfg.spec.nu_t() / ri(2))
}

/// `‖f‖_{**,k}`: weight exponent `(N+2m)/2 + τ`.
pub fn norm_dblstar<T: Real, F: Fn(&[T]) -> T>(
    field: &F,
    grid: &WeightedGrid<T>,
    cfg: &TowerConfig<T>,
    tau: T,
) -> Result<NormReport<T>> {
    let base = (ri::<T>(i64::from(cfg.spec.n)) + ri::<T>(2 * i64::from(cfg.spec.m))) / ri(2);
    weighted_sup(field, grid, cfg, tau, base)
}

/// The ansatz error term
/// `l_k(y) = K(|y|/μ) W^{m*-1}(y) - Σ_j (U⁺_j^{m*-1} + U⁻_j^{m*-1})(y)`.
pub fn error_term_lk<T: Real>(cfg: &TowerConfig<T>, mu: T, profile_k: &KProfile<T>, y: &[T]) -> T {
    let p = cfg.spec.mstar - T::one();
    profile_k.eval(norm(y) / mu) * cfg.eval_w(y).powf(p) - cfg.sum_bubble_powers(y, p)
}

/// Row of the norm-decay scan.
#[derive(Clone, Debug)]
pub struct LkScanRow<T> {
    pub k: u64,
    pub norm: T,
    pub grid_hash: u64,
}

/// Result of scanning `‖l_k‖_{**,k}` across ring sizes.
#[derive(Clone, Debug)]
pub struct LkScanReport<T> {
    pub rows: Vec<LkScanRow<T>>,
    pub slope: T,
    pub predicted_bound: T,
}

/// Predicted decay exponent of `‖l_k‖_{**,k}` in `k` (an upper bound):
/// `-min{ (l/(ν-l)) ((N+2m)/2 - (ν-l)/ν - ε₁), ν l/(ν-l) }`.
pub fn lk_predicted_exponent<T: Real>(spec: &SpaceSpec<T>, eps1: T) -> T {
    let nu = spec.nu_t();
    let l = spec.l;
    let half_sum = (ri::<T>(i64::from(spec.n)) + ri::<T>(2 * i64::from(spec.m))) / ri(2);
    let first = l / (nu - l) * (half_sum - (nu - l) / nu - eps1);
    let second = nu * l / (nu - l);
    -first.min(second)
}

/// Compute `‖l_k‖_{**,k}` at `(μ_k, λ_k, Λ₀)` for each `k` and fit the decay.
///
/// The curvature profile is supplied explicitly so flat-`K` variants can be
/// scanned against the same critical parameters.
pub fn lk_norm_scan<T: Real>(
    spec: &SpaceSpec<T>,
    constants: &ExpansionConstants<T>,
    exponents: &ExponentBook<T>,
    ks: &[u64],
    profile_k: &KProfile<T>,
    recipe: &GridRecipe,
) -> Result<LkScanReport<T>> {
    if ks.len() < 4 {
        return Err(Error::InsufficientRange {
            got: ks.len(),
            min: 4,
        });
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let model = ReducedEnergyModel::new(spec.clone(), constants.clone(), *exponents, k)?;
        let mu = model.mu_k();
        let cfg = TowerConfig::new(
            spec.clone(),
            u32::try_from(k).map_err(|_| Error::InvalidConfig("k too large".into()))?,
            mu,
            model.lambda_k(),
            model.lambda0(),
        )?;
        let grid = stratified_grid(&cfg, recipe);
        let report = norm_dblstar(
            &|y: &[T]| error_term_lk(&cfg, mu, profile_k, y),
            &grid,
            &cfg,
            exponents.tau,
        )?;
        rows.push(LkScanRow {
            k,
            norm: report.value,
            grid_hash: grid.hash,
        });
    }
    let xs: Vec<T> = rows.iter().map(|r| T::from_u64(r.k).unwrap()).collect();
    let ys: Vec<T> = rows.iter().map(|r| r.norm).collect();
    Ok(LkScanReport {
        rows,
        slope: loglog_slope(&xs, &ys),
        predicted_bound: lk_predicted_exponent(spec, exponents.eps1),
    })
}

/// Max and median over a radial scan of the normalized kernel magnitudes
/// `|Z̄_{ℓ1}| (1+ρ)^{N-2m+1} / (1 + r δ_{ℓ2})`, `ℓ = 1, 2, 3`.
pub fn kernel_bound_scan<T: Real>(cfg: &TowerConfig<T>) -> [(T, T); 3] {
    let spec = &cfg.spec;
    let nu = spec.nu_t();
    let lambda = cfg.lambda;
    let (d_r, d_h) = first_point_derivatives(cfg);
    let mut samples: [Vec<T>; 3] = [vec![], vec![], vec![]];
    let lo = 0.1 / lower(lambda);
    let hi = 10.0 / lower(lambda);
    let n_rad = 48;
    let n_ang = 9;
    for i in 0..n_rad {
        let rho = rf::<T>(lo * (hi / lo).powf(i as f64 / (n_rad - 1) as f64));
        for a in 0..n_ang {
            let gamma = T::PI() * ri::<T>(a as i64) / ri::<T>(n_ang as i64 - 1);
            let v = [gamma.cos(), gamma.sin()];
            let du = crate::bubble::profile_dr(spec, lambda, rho);
            let z1 = -du * (v[0] * d_r[0] + v[1] * d_r[1]);
            let z2 = -du * (v[0] * d_h[0] + v[1] * d_h[1]);
            let z3 = crate::bubble::profile_dlambda(spec, lambda, rho);
            let weight = (T::one() + rho).powf(nu + T::one());
            samples[0].push(z1.abs() * weight);
            samples[1].push(z2.abs() * weight / (T::one() + cfg.r));
            samples[2].push(z3.abs() * weight);
        }
    }
    let mut out = [(T::zero(), T::zero()); 3];
    for (slot, vals) in out.iter_mut().zip(samples.iter_mut()) {
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let max = *vals.last().unwrap();
        let median = vals[vals.len() / 2];
        *slot = (max, median);
    }
    out
}
