//! Curvature-weighted single-bubble integral against its leading expansion.

use crate::bubble::profile;
use crate::constants::moment_integral;
use crate::error::Result;
use crate::kprofile::KProfile;
use crate::quad::{integrate_radial, GaussLegendre};
use crate::real::{rf, ri, Real};
use crate::space::SpaceSpec;
use crate::special::sphere_area;
use crate::tower::TowerConfig;

/// Direct quadrature vs. leading expansion of `∫ (K(|y|/μ) - 1) U_{x,Λ}^{m*}`.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureCheck<T> {
    pub direct: T,
    pub expansion: T,
}

/// Evaluate both sides for the first upper-ring bubble of `cfg`.
///
/// The integrand depends only on `|y|` and `|y - x|`, so the integral
/// reduces to a polar quadrature around the bubble center; the expansion is
/// `-c0/(Λ^l μ^l) ∫|y₁|^l U^{m*} - (l(l-1)/2) c0/(Λ^{l-2} μ^l) ∫|y₁|^{l-2} U^{m*} (μ-r)²`.
pub fn curvature_weight_integral<T: Real>(
    spec: &SpaceSpec<T>,
    cfg: &TowerConfig<T>,
    profile_k: &KProfile<T>,
    mu: T,
) -> Result<CurvatureCheck<T>> {
    let nf = ri::<T>(i64::from(spec.n));
    let lambda = cfg.lambda;
    let r = cfg.r;
    let angular_rule = GaussLegendre::<T>::new(48);

    let g = |rho: T| {
        let ang = angular_rule.integrate(T::zero(), T::PI(), &|phi: T| {
            let (s, c) = (phi.sin(), phi.cos());
            let w1 = rho * c;
            let t = rho * s;
            let y_norm = ((r + w1) * (r + w1) + t * t).sqrt();
            (profile_k.eval(y_norm / mu) - T::one()) * s.powf(nf - ri(2))
        });
        rho.powf(nf - T::one()) * profile(spec, lambda, rho).powf(spec.mstar) * ang
    };
    // |K-1| is bounded, so the tail is governed by ρ^{N-1} U^{m*} ~ ρ^{-N-1}
    let q = integrate_radial(&g, T::one() / lambda, nf + T::one(), rf(1e-9))?;
    let direct = sphere_area::<T>(spec.n - 1) * q.value;

    let m_l = moment_integral(spec, spec.l)?.value;
    let lam_l = lambda.powf(spec.l);
    let mu_l = mu.powf(spec.l);
    let mut expansion = -profile_k.c0 / (lam_l * mu_l) * m_l;
    if (mu - r).abs() > T::zero() {
        let m_lm2 = moment_integral(spec, spec.l - ri(2))?.value;
        expansion -= profile_k.c0 * spec.l * (spec.l - T::one())
            / ri::<T>(2)
            / (lambda.powf(spec.l - ri(2)) * mu_l)
            * m_lm2
            * (mu - r)
            * (mu - r);
    }
    Ok(CurvatureCheck { direct, expansion })
}
