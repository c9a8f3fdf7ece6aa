//! Gram matrix of the parameter-derivative kernels against the weight
//! `U^{m*-2}`, by genuine numerical integration.
//!
//! Every factor appearing here depends on the integration variable only
//! through the radius and through the two coordinates of a shared plane, so
//! the `N`-dimensional integral reduces exactly to radius × unit-disk
//! marginal: `dσ_{S^{N-1}} = (1-|v|²)^{(N-4)/2} dv dσ_{S^{N-3}}`. The disk
//! is parameterized as `v = sin α (cos ψ, sin ψ)`, which removes the
//! half-integer endpoint weight. Orthogonality of the entries is *not*
//! hard-coded: the angular quadrature discovers it.

use crate::bubble::{profile, profile_dlambda, profile_dr};
use crate::error::Result;
#[cfg(test)]
use crate::quad::integrate_radial;
use crate::quad::{
    geometric_breaks, integrate_finite, integrate_panels, GaussLegendre, QuadResult,
};
use crate::real::{rf, ri, Real};
use crate::space::SpaceSpec;
use crate::special::sphere_area;
use crate::tower::TowerConfig;

/// One factor of a pair integral: a directional derivative kernel with the
/// given components in the shared coordinate plane, or the dilation kernel.
#[derive(Clone, Copy, Debug)]
pub enum GramFactor<T> {
    /// `-u'(ρ) (ŵ·a)` with `a` living in the shared plane.
    Direction([T; 2]),
    /// `∂u/∂Λ`, radial.
    Dilation,
}

impl<T: Real> GramFactor<T> {
    #[inline]
    fn eval(&self, spec: &SpaceSpec<T>, lambda: T, rho: T, v: [T; 2]) -> T {
        match self {
            GramFactor::Direction(a) => {
                -profile_dr(spec, lambda, rho) * (v[0] * a[0] + v[1] * a[1])
            }
            GramFactor::Dilation => profile_dlambda(spec, lambda, rho),
        }
    }
}

fn angular_sum<T: Real, const NPSI: usize>(
    spec: &SpaceSpec<T>,
    lambda: T,
    a: GramFactor<T>,
    b: GramFactor<T>,
    rule: &GaussLegendre<T>,
    rho: T,
) -> T {
    // ∫_0^{π/2} ∫_0^{2π} G_a G_b sin α cos^{N-3} α dψ dα
    let nf = ri::<T>(i64::from(spec.n));
    let d_psi = ri::<T>(2) * T::PI() / ri::<T>(NPSI as i64);
    rule.integrate(T::zero(), T::PI() / ri(2), &|alpha: T| {
        let (sa, ca) = (alpha.sin(), alpha.cos());
        let mut acc = T::zero();
        for i in 0..NPSI {
            let psi = d_psi * ri::<T>(i as i64);
            let v = [sa * psi.cos(), sa * psi.sin()];
            acc += a.eval(spec, lambda, rho, v) * b.eval(spec, lambda, rho, v);
        }
        acc * d_psi * sa * ca.powf(nf - ri(3))
    })
}

/// `∫_{R^N} U^{m*-2} Z_a Z_b` for two kernels sharing a coordinate plane,
/// with a defect-based absolute error estimate.
///
/// Off-diagonal pairs integrate to zero, so no relative error target is
/// imposed here; the caller judges the defect against its own scale.
pub fn pair_integral<T: Real>(
    spec: &SpaceSpec<T>,
    lambda: T,
    a: GramFactor<T>,
    b: GramFactor<T>,
) -> QuadResult<T> {
    assert!(spec.n >= 5, "disk marginal needs N >= 5");
    let nf = ri::<T>(i64::from(spec.n));
    let alpha_rule = GaussLegendre::<T>::new(16);
    let g = |rho: T| {
        rho.powf(nf - T::one())
            * profile(spec, lambda, rho).powf(spec.mstar - ri(2))
            * angular_sum::<T, 32>(spec, lambda, a, b, &alpha_rule, rho)
    };
    // the integrand decays at least like ρ^{-(N+1)}: a cut at 10⁴ bubble
    // widths leaves a tail far below the quadrature defect
    let scale = T::one() / lambda;
    let breaks = geometric_breaks(scale, scale * rf(1e4));
    let fine = GaussLegendre::new(48);
    let coarse = GaussLegendre::new(24);
    let vf = integrate_panels(&fine, &breaks, &g);
    let vc = integrate_panels(&coarse, &breaks, &g);
    QuadResult {
        value: sphere_area::<T>(spec.n - 2) * vf,
        abs_err: sphere_area::<T>(spec.n - 2) * (vf - vc).abs(),
    }
}

/// As [`pair_integral`] but over the centered ball of radius `r_ball`.
pub fn pair_integral_ball<T: Real>(
    spec: &SpaceSpec<T>,
    lambda: T,
    a: GramFactor<T>,
    b: GramFactor<T>,
    r_ball: T,
) -> T {
    let nf = ri::<T>(i64::from(spec.n));
    let alpha_rule = GaussLegendre::<T>::new(16);
    let g = |rho: T| {
        rho.powf(nf - T::one())
            * profile(spec, lambda, rho).powf(spec.mstar - ri(2))
            * angular_sum::<T, 32>(spec, lambda, a, b, &alpha_rule, rho)
    };
    sphere_area::<T>(spec.n - 2) * integrate_finite(T::zero(), r_ball, 24, &g).value
}

/// Derivative vectors of the first upper-ring point, projected on the
/// `(y₁, y₃)` plane where they live: `∂x/∂r` and `∂x/∂h`.
pub fn first_point_derivatives<T: Real>(cfg: &TowerConfig<T>) -> ([T; 2], [T; 2]) {
    let planar = (T::one() - cfg.h * cfg.h).sqrt();
    let d_r = [planar, cfg.h];
    let d_h = [-cfg.r * cfg.h / planar, cfg.r];
    (d_r, d_h)
}

/// The 3×3 Gram matrix `⟨U^{m*-2} Z̄_{ℓ1}, Z̄_{q1}⟩` for the derivative
/// kernels in `r`, `h`, `Λ` of the first upper-ring bubble.
///
/// Fails if any entry's quadrature defect exceeds `1e-8` of the geometric
/// mean of the corresponding diagonal entries.
pub fn kernel_gram<T: Real>(spec: &SpaceSpec<T>, cfg: &TowerConfig<T>) -> Result<[[T; 3]; 3]> {
    let (d_r, d_h) = first_point_derivatives(cfg);
    let factors = [
        GramFactor::Direction(d_r),
        GramFactor::Direction(d_h),
        GramFactor::Dilation,
    ];
    let mut out = [[T::zero(); 3]; 3];
    let mut errs = [[T::zero(); 3]; 3];
    for (i, fa) in factors.iter().enumerate() {
        for (j, fb) in factors.iter().enumerate().skip(i) {
            let q = pair_integral(spec, cfg.lambda, *fa, *fb);
            out[i][j] = q.value;
            out[j][i] = q.value;
            errs[i][j] = q.abs_err;
        }
    }
    for i in 0..3 {
        for j in i..3 {
            let scale = (out[i][i] * out[j][j]).sqrt();
            if errs[i][j] > rf::<T>(1e-8) * scale {
                return Err(crate::error::Error::QuadratureFailure {
                    err: crate::real::lower(errs[i][j]),
                    target: crate::real::lower(rf::<T>(1e-8) * scale),
                });
            }
        }
    }
    Ok(out)
}
