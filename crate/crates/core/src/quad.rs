//! Gauss–Legendre quadrature with panel subdivision and algebraic tail bounds.
//!
//! Radial profiles here decay like a power of the radius, so improper
//! integrals are evaluated on geometric panels `[0,s], [s,2s], …, [R/2,R]`
//! and closed with the analytic tail of the known decay power. The error
//! estimate is the defect between two node counts plus the tail bound.

use crate::error::{Error, Result};
use crate::real::{rf, ri, Kahan, Real};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Compute the `n`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = ri::<T>(n as i64);
        for i in 0..n.div_ceil(2) {
            // Chebyshev-like initial guess
            let mut x = (T::PI() * (ri::<T>(i as i64) + rf::<T>(0.75)) / (nf + rf::<T>(0.5))).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() * (T::one() + x.abs()) {
                    break;
                }
            }
            let w = ri::<T>(2) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: Fn(T) -> T>(&self, a: T, b: T, f: &F) -> T {
        let half = (b - a) / ri::<T>(2);
        let mid = (a + b) / ri::<T>(2);
        let mut acc = Kahan::new();
        for (&x, &w) in self.nodes.iter().zip(self.weights.iter()) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.total()
    }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for j in 2..=n {
        let jf = ri::<T>(j as i64);
        let p2 = ((ri::<T>(2 * j as i64 - 1)) * x * p1 - (jf - T::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = ri::<T>(n as i64) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Integrate `g` over a list of panel breakpoints with the given rule.
pub fn integrate_panels<T: Real, F: Fn(T) -> T>(rule: &GaussLegendre<T>, breaks: &[T], g: &F) -> T {
    let mut acc = Kahan::new();
    for w in breaks.windows(2) {
        acc.add(rule.integrate(w[0], w[1], g));
    }
    acc.total()
}

/// Geometric breakpoints `0, s/4, s/2, s, 2s, …, R` covering `[0, R]`.
pub fn geometric_breaks<T: Real>(scale: T, r_max: T) -> Vec<T> {
    let mut breaks = vec![T::zero(), scale / ri(4), scale / ri(2)];
    let mut x = scale;
    while x < r_max {
        breaks.push(x);
        x *= ri(2);
    }
    breaks.push(r_max);
    breaks
}

/// Result of an improper radial integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_err: T,
}

/// Integrate `g` over `[0, ∞)` where `g(ρ) ~ c ρ^{-q}` for large `ρ`, `q > 1`.
///
/// `scale` is the natural width of the integrand (panels refine around it)
/// and `rel_tol` the requested relative accuracy. The cut radius doubles
/// until the analytic tail bound `|g(R)| R / (q-1)` is below `rel_tol/4`
/// of the running value.
pub fn integrate_radial<T: Real, F: Fn(T) -> T>(
    g: &F,
    scale: T,
    tail_power: T,
    rel_tol: T,
) -> Result<QuadResult<T>> {
    assert!(tail_power > T::one(), "tail power must exceed 1");
    let coarse = GaussLegendre::new(24);
    let fine = GaussLegendre::new(48);

    let mut r_max = scale * ri(64);
    for _ in 0..60 {
        let breaks = geometric_breaks(scale, r_max);
        let v_fine = integrate_panels(&fine, &breaks, g);
        let tail = (g(r_max)).abs() * r_max / (tail_power - T::one());
        if tail <= rel_tol / ri(4) * v_fine.abs() || tail < T::min_positive_value() {
            let v_coarse = integrate_panels(&coarse, &breaks, g);
            let err = (v_fine - v_coarse).abs() + tail;
            if err > rel_tol * v_fine.abs() && v_fine.abs() > T::zero() {
                return Err(Error::QuadratureFailure {
                    err: crate::real::lower(err),
                    target: crate::real::lower(rel_tol * v_fine.abs()),
                });
            }
            return Ok(QuadResult {
                value: v_fine + tail_correction(g, r_max, tail_power),
                abs_err: err,
            });
        }
        r_max *= ri(2);
    }
    Err(Error::QuadratureFailure {
        err: f64::INFINITY,
        target: crate::real::lower(rel_tol),
    })
}

/// First-order analytic tail `∫_R^∞ c ρ^{-q} dρ` with `c` matched at `R`.
fn tail_correction<T: Real, F: Fn(T) -> T>(g: &F, r_max: T, q: T) -> T {
    g(r_max) * r_max / (q - T::one())
}

/// Integrate a smooth function over `[a, b]` with a defect error estimate.
pub fn integrate_finite<T: Real, F: Fn(T) -> T>(a: T, b: T, panels: usize, g: &F) -> QuadResult<T> {
    let coarse = GaussLegendre::new(24);
    let fine = GaussLegendre::new(48);
    let mut breaks = Vec::with_capacity(panels + 1);
    for i in 0..=panels {
        breaks.push(a + (b - a) * ri::<T>(i as i64) / ri::<T>(panels as i64));
    }
    let vf = integrate_panels(&fine, &breaks, g);
    let vc = integrate_panels(&coarse, &breaks, g);
    QuadResult {
        value: vf,
        abs_err: (vf - vc).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_polynomial_exactness() {
        let rule = GaussLegendre::<f64>::new(8);
        // degree 15 polynomial integrated exactly
        let v = rule.integrate(0.0, 1.0, &|x: f64| x.powi(15));
        assert_relative_eq!(v, 1.0 / 16.0, max_relative = 1e-13);
    }

    #[test]
    fn radial_integral_with_tail() {
        // ∫_0^∞ ρ^4 (1+ρ²)^{-5} dρ = (1/2) B(5/2, 5/2) = 3π/256
        let g = |r: f64| r.powi(4) * (1.0 + r * r).powi(-5);
        let got = integrate_radial(&g, 1.0, 6.0, 1e-12).unwrap();
        assert_relative_eq!(
            got.value,
            3.0 * core::f64::consts::PI / 256.0,
            max_relative = 1e-12
        );
        // ∫_0^∞ (1+s²)^{-3/2} ds = 1
        let g2 = |s: f64| (1.0 + s * s).powf(-1.5);
        let got2 = integrate_radial(&g2, 1.0, 3.0, 1e-12).unwrap();
        assert_relative_eq!(got2.value, 1.0, max_relative = 1e-11);
    }

    #[test]
    fn finite_integral_defect() {
        let got = integrate_finite(0.0, core::f64::consts::PI, 4, &|x: f64| x.sin());
        assert_relative_eq!(got.value, 2.0, max_relative = 1e-13);
        assert!(got.abs_err < 1e-12);
    }
}
