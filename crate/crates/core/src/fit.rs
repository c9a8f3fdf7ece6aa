//! Least-squares slope fits for decay-rate tests.

use crate::real::Real;

/// Slope and intercept of the least-squares line through `(x, y)` pairs.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let n = T::from_usize(xs.len()).unwrap();
    let mut sx = T::zero();
    let mut sy = T::zero();
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Log-log slope of `values` against `abscissae` (both must be positive).
pub fn loglog_slope<T: Real>(abscissae: &[T], values: &[T]) -> T {
    let xs: Vec<T> = abscissae.iter().map(|v| v.ln()).collect();
    let ys: Vec<T> = values.iter().map(|v| v.ln()).collect();
    linear_fit(&xs, &ys).0
}
