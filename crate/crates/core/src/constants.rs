//! Expansion constants of the reduced energy, with error bars and provenance.
//!
//! `B0`, `B2` and the moment integrals behind `A1..A3` come from quadrature,
//! `B1` from a zeta series with an integral tail bracket; `B4 = B0·B1` and
//! `B5 = B0·B2` by construction, and `B6`, `B7` follow from `B4`, `B5` and
//! the closed-form height prefactor `h0`.

use crate::error::{Error, Result};
use crate::quad::integrate_radial;
use crate::real::{lower, rf, ri, Real};
use crate::space::SpaceSpec;
use crate::special::{gamma, sphere_area, zeta};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Series,
    Quadrature,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Series => "series",
            Provenance::Quadrature => "quadrature",
        }
    }
}

/// A computed constant with an absolute error estimate.
#[derive(Clone, Copy, Debug)]
pub struct Constant<T> {
    pub value: T,
    pub abs_err: T,
    pub provenance: Provenance,
}

/// `B0 = ∫ (1+|z|²)^{-(N+2m)/2} dz`, quadrature cross-checked against the
/// Gamma closed form `π^{N/2} Γ(m) / Γ((N+2m)/2)`.
pub fn const_b0<T: Real>(spec: &SpaceSpec<T>) -> Result<Constant<T>> {
    const_b0_raw(spec.n, spec.m)
}

/// `B0` for a bare `(N, m)` pair, skipping the `N >= 2m+3` validation.
pub fn const_b0_raw<T: Real>(n: u32, m: u32) -> Result<Constant<T>> {
    let nf = ri::<T>(i64::from(n));
    let expo = (nf + ri::<T>(2 * i64::from(m))) / ri::<T>(2);
    let g = move |rho: T| rho.powf(nf - T::one()) * (T::one() + rho * rho).powf(-expo);
    let q = integrate_radial(
        &g,
        T::one(),
        ri::<T>(2 * i64::from(m)) + T::one(),
        rf(1e-12),
    )?;
    let value = sphere_area::<T>(n) * q.value;
    let closed = T::PI().powf(nf / ri(2)) * gamma(ri::<T>(i64::from(m)))
        / gamma((nf + ri::<T>(2 * i64::from(m))) / ri(2));
    let defect = (value - closed).abs();
    if defect > rf::<T>(1e-9) * closed {
        return Err(Error::QuadratureFailure {
            err: lower(defect / closed),
            target: 1e-9,
        });
    }
    Ok(Constant {
        value,
        abs_err: sphere_area::<T>(n) * q.abs_err + defect,
        provenance: Provenance::Quadrature,
    })
}

/// `B1 = 2 ζ(N-2m) / (2π)^{N-2m}` by series with tail bracket.
pub fn const_b1<T: Real>(spec: &SpaceSpec<T>) -> Constant<T> {
    let nu = spec.nu_t();
    let value = ri::<T>(2) * zeta(nu) / (ri::<T>(2) * T::PI()).powf(nu);
    Constant {
        value,
        abs_err: rf::<T>(1e-13) * value,
        provenance: Provenance::Series,
    }
}

/// `B2 = (1 / (2^{N-2m-1} π)) ∫_0^∞ (s²+1)^{-(N-2m)/2} ds` by quadrature.
pub fn const_b2<T: Real>(spec: &SpaceSpec<T>) -> Result<Constant<T>> {
    let nu = spec.nu_t();
    let g = move |s: T| (T::one() + s * s).powf(-nu / ri(2));
    let q = integrate_radial(&g, T::one(), nu, rf(1e-12))?;
    let pref = T::one() / (ri::<T>(2).powf(nu - T::one()) * T::PI());
    Ok(Constant {
        value: pref * q.value,
        abs_err: pref * q.abs_err,
        provenance: Provenance::Quadrature,
    })
}

/// Moment `∫ |y₁|^q U_{0,1}^{m*} dy` by the axially-reduced product of a
/// radial and an angular quadrature.
pub fn moment_integral<T: Real>(spec: &SpaceSpec<T>, q: T) -> Result<Constant<T>> {
    if q < T::zero() {
        return Err(Error::NonIntegrable { power: lower(q) });
    }
    let nf = ri::<T>(i64::from(spec.n));
    // radial: ∫ ρ^{N-1+q} (1+ρ²)^{-N} dρ, tail power N+1-q > 1
    let rad = {
        let g = move |rho: T| rho.powf(nf - T::one() + q) * (T::one() + rho * rho).powf(-nf);
        integrate_radial(&g, T::one(), nf + T::one() - q, rf(1e-12))?
    };
    // angular: ∫_0^π |cos φ|^q sin^{N-2} φ dφ = 2 ∫_0^1 x^q (1-x²)^{(N-3)/2} dx
    let ang = {
        let e = (nf - ri::<T>(3)) / ri::<T>(2);
        let g = move |x: T| x.powf(q) * (T::one() - x * x).powf(e);
        // geometric refinement toward both endpoints handles the algebraic corners
        let mut breaks = vec![T::zero()];
        let mut t = rf::<T>(1e-12);
        while t < rf::<T>(0.5) {
            breaks.push(t);
            t *= ri::<T>(4);
        }
        breaks.push(rf(0.5));
        let mut upper: Vec<T> = breaks.iter().map(|&b| T::one() - b).collect();
        upper.reverse();
        breaks.extend(upper);
        let fine = crate::quad::GaussLegendre::new(48);
        let coarse = crate::quad::GaussLegendre::new(24);
        let vf = crate::quad::integrate_panels(&fine, &breaks, &g);
        let vc = crate::quad::integrate_panels(&coarse, &breaks, &g);
        crate::quad::QuadResult {
            value: ri::<T>(2) * vf,
            abs_err: ri::<T>(2) * (vf - vc).abs(),
        }
    };
    let pref = spec.cnm.powf(spec.mstar) * sphere_area::<T>(spec.n - 1);
    let value = pref * rad.value * ang.value;
    let abs_err = pref * (rad.abs_err * ang.value.abs() + ang.abs_err * rad.value.abs());
    Ok(Constant {
        value,
        abs_err,
        provenance: Provenance::Quadrature,
    })
}

/// Closed Gamma form of the moment, used as an independent route.
pub fn moment_closed_form<T: Real>(spec: &SpaceSpec<T>, q: T) -> T {
    let nf = ri::<T>(i64::from(spec.n));
    spec.cnm.powf(spec.mstar)
        * T::PI().powf((nf - T::one()) / ri(2))
        * gamma((q + T::one()) / ri(2))
        * gamma((nf - q) / ri(2))
        / gamma(nf)
}

/// The energy-expansion prefactors `(A1, A2, A3)`.
pub fn const_a<T: Real>(spec: &SpaceSpec<T>) -> Result<(Constant<T>, Constant<T>, Constant<T>)> {
    let mass = moment_integral(spec, T::zero())?;
    let m_l = moment_integral(spec, spec.l)?;
    let m_lm2 = moment_integral(spec, spec.l - ri(2))?;
    let two = ri::<T>(2);
    let a1c = T::one() - two / spec.mstar;
    let a2c = two * spec.c0 / spec.mstar;
    let a3c = spec.c0 * spec.l * (spec.l - T::one()) / spec.mstar;
    Ok((
        Constant {
            value: a1c * mass.value,
            abs_err: a1c * mass.abs_err,
            provenance: Provenance::Quadrature,
        },
        Constant {
            value: a2c * m_l.value,
            abs_err: a2c * m_l.abs_err,
            provenance: Provenance::Quadrature,
        },
        Constant {
            value: a3c * m_lm2.value,
            abs_err: a3c * m_lm2.abs_err,
            provenance: Provenance::Quadrature,
        },
    ))
}

/// Curvature amplitude that puts the critical concentration at `Λ₀ = 1`,
/// so the bubbles in the scan windows are separated on their own scale.
///
/// From `Λ₀ = [ν B4 / (A2 l)]^{1/(ν-l)}` with `A2 = (2 c0/m*) ∫|y₁|^l U^{m*}`:
/// `c0 = ν B4 m* / (2 l ∫|y₁|^l U^{m*})`.
pub fn separated_regime_c0<T: Real>(n: u32, m: u32, l: T) -> Result<T> {
    let probe = SpaceSpec::new(n, m, l, T::one())?;
    let b0 = const_b0(&probe)?;
    let b1 = const_b1(&probe);
    let m_l = moment_integral(&probe, l)?;
    let nu = probe.nu_t();
    Ok(nu * b0.value * b1.value * probe.mstar / (ri::<T>(2) * l * m_l.value))
}

/// The full constant table for a space.
#[derive(Clone, Debug)]
pub struct ExpansionConstants<T> {
    pub a1: Constant<T>,
    pub a2: Constant<T>,
    pub a3: Constant<T>,
    pub b0: Constant<T>,
    pub b1: Constant<T>,
    pub b2: Constant<T>,
    pub b4: Constant<T>,
    pub b5: Constant<T>,
    pub b6: Constant<T>,
    pub b7: Constant<T>,
    /// Height prefactor `h0 = [(N-2m-1) B5 / ((N-2m) B4)]^{1/(N-2m+1)}`.
    pub h0: T,
}

impl<T: Real> ExpansionConstants<T> {
    pub fn compute(spec: &SpaceSpec<T>) -> Result<Self> {
        let (a1, a2, a3) = const_a(spec)?;
        let b0 = const_b0(spec)?;
        let b1 = const_b1(spec);
        let b2 = const_b2(spec)?;
        let prod = |x: &Constant<T>, y: &Constant<T>| Constant {
            value: x.value * y.value,
            abs_err: x.abs_err * y.value.abs() + y.abs_err * x.value.abs(),
            provenance: Provenance::Quadrature,
        };
        let b4 = prod(&b0, &b1);
        let b5 = prod(&b0, &b2);
        let nu = spec.nu_t();
        let h0 = ((nu - T::one()) * b5.value / (nu * b4.value)).powf(T::one() / (nu + T::one()));
        let two = ri::<T>(2);
        let b6 = Constant {
            value: nu * b4.value * h0 * h0 / two + b5.value / h0.powf(nu - T::one()),
            abs_err: nu * b4.abs_err * h0 * h0 / two + b5.abs_err / h0.powf(nu - T::one()),
            provenance: Provenance::Quadrature,
        };
        let b7 = Constant {
            value: nu / two
                * (b4.value * h0 * h0 + (nu - T::one()) * b5.value / h0.powf(nu - T::one())),
            abs_err: nu / two
                * (b4.abs_err * h0 * h0 + (nu - T::one()) * b5.abs_err / h0.powf(nu - T::one())),
            provenance: Provenance::Quadrature,
        };
        let out = Self {
            a1,
            a2,
            a3,
            b0,
            b1,
            b2,
            b4,
            b5,
            b6,
            b7,
            h0,
        };
        for (name, c) in out.named() {
            // written to also reject NaN
            let positive = matches!(
                c.value.partial_cmp(&T::zero()),
                Some(core::cmp::Ordering::Greater)
            );
            if !positive {
                return Err(Error::InvalidConfig(format!(
                    "constant {name} not positive"
                )));
            }
        }
        Ok(out)
    }

    /// `(name, constant)` pairs in report order.
    pub fn named(&self) -> Vec<(&'static str, Constant<T>)> {
        vec![
            ("A1", self.a1),
            ("A2", self.a2),
            ("A3", self.a3),
            ("B0", self.b0),
            ("B1", self.b1),
            ("B2", self.b2),
            ("B4", self.b4),
            ("B5", self.b5),
            ("B6", self.b6),
            ("B7", self.b7),
        ]
    }
}
