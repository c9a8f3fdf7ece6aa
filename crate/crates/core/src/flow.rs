//! Gradient-flow simulation of the descending flow on `F̄ = -F` inside the
//! confinement box.
//!
//! The state is integrated in box-normalized coordinates `u_i ∈ [-1, 1]`
//! (offsets divided by the box half-widths), which evens out the wildly
//! different natural scales of `r`, `h` and `Λ`. The time-rescaled flow
//! `du/dt = -∇_u F̄` shares the confinement behavior of the raw flow: `F̄`
//! still decreases along trajectories and boundary-face gradient signs are
//! unchanged. The stepper is an adaptive explicit Bogacki–Shampine pair.

use crate::energy::ReducedEnergyModel;
use crate::error::{Error, Result};
use crate::real::{lower, rf, ri, Real};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Boundary faces of the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    RLow,
    RHigh,
    HLow,
    HHigh,
    LambdaLow,
    LambdaHigh,
}

impl Face {
    pub fn as_str(self) -> &'static str {
        match self {
            Face::RLow => "r-low",
            Face::RHigh => "r-high",
            Face::HLow => "h-low",
            Face::HHigh => "h-high",
            Face::LambdaLow => "lambda-low",
            Face::LambdaHigh => "lambda-high",
        }
    }

    /// The `h`- or `Λ`-faces are the ones confinement forbids.
    pub fn is_confining(self) -> bool {
        !matches!(self, Face::RLow | Face::RHigh)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowStatus {
    ReachedT1,
    LeftBox(Face),
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions<T> {
    pub eta1: T,
    pub max_steps: u64,
    pub rel_tol: T,
}

impl<T: Real> Default for FlowOptions<T> {
    fn default() -> Self {
        Self {
            eta1: rf(1e-3),
            max_steps: 50_000,
            rel_tol: rf(1e-6),
        }
    }
}

/// Outcome of one trajectory.
#[derive(Clone, Debug)]
pub struct FlowReport<T> {
    pub seed: u64,
    pub status: FlowStatus,
    pub steps: u64,
    /// Start and end as offsets `(r - μ_k, h - λ_k, Λ - Λ₀)`.
    pub start_offsets: [T; 3],
    pub end_offsets: [T; 3],
    pub fbar_final: T,
    /// FNV-1a hash over the accepted step sizes.
    pub step_hash: u64,
}

fn fnv1a(hash: u64, bytes: &[u8]) -> u64 {
    let mut h = hash;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

struct Scales<T> {
    half: [T; 3],
    lambda_k: T,
    lambda0: T,
}

impl<T: Real> Scales<T> {
    fn new(model: &ReducedEnergyModel<T>) -> Self {
        let b = model.box_dk();
        let half = [
            (b.r.1 - b.r.0) / ri(2),
            (b.h.1 - b.h.0) / ri(2),
            (b.lambda.1 - b.lambda.0) / ri(2),
        ];
        Self {
            half,
            lambda_k: model.lambda_k(),
            lambda0: model.lambda0(),
        }
    }

    /// `-∇_u F̄ = +∇_u F` in normalized coordinates.
    fn rhs(&self, model: &ReducedEnergyModel<T>, u: [T; 3]) -> [T; 3] {
        let dr = u[0] * self.half[0];
        let dh = u[1] * self.half[1];
        let lam = self.lambda0 + u[2] * self.half[2];
        let e = -dh / self.lambda_k;
        let g = model.grad_from_offsets(dr, e, lam);
        // chain rule: ∂F/∂dh = -∂F/∂e / λ_k
        [
            self.half[0] * g[0],
            self.half[1] * (-g[1] / self.lambda_k),
            self.half[2] * g[2],
        ]
    }

    fn fbar(&self, model: &ReducedEnergyModel<T>, u: [T; 3]) -> T {
        let dr = u[0] * self.half[0];
        let e = -(u[1] * self.half[1]) / self.lambda_k;
        let lam = self.lambda0 + u[2] * self.half[2];
        model.fbar_from_offsets(dr, e, lam)
    }

    /// `F̄ + k A1`, the part that level comparisons can resolve at any `k`.
    fn fbar_tail(&self, model: &ReducedEnergyModel<T>, u: [T; 3]) -> T {
        let dr = u[0] * self.half[0];
        let e = -(u[1] * self.half[1]) / self.lambda_k;
        let lam = self.lambda0 + u[2] * self.half[2];
        model.fbar_tail_from_offsets(dr, e, lam)
    }
}

fn exit_face<T: Real>(u: [T; 3]) -> Option<Face> {
    let mut worst = T::one();
    let mut face = None;
    let faces = [
        (Face::RLow, Face::RHigh),
        (Face::HLow, Face::HHigh),
        (Face::LambdaLow, Face::LambdaHigh),
    ];
    for (i, &(lo, hi)) in faces.iter().enumerate() {
        if u[i].abs() > worst {
            worst = u[i].abs();
            face = Some(if u[i] < T::zero() { lo } else { hi });
        }
    }
    face
}

/// Integrate one trajectory from offsets `(r-μ_k, h-λ_k, Λ-Λ₀)`.
pub fn simulate<T: Real>(
    model: &ReducedEnergyModel<T>,
    start_offsets: [T; 3],
    seed: u64,
    opts: &FlowOptions<T>,
) -> Result<FlowReport<T>> {
    let scales = Scales::new(model);
    let mut u = [T::zero(); 3];
    for i in 0..3 {
        u[i] = start_offsets[i] / scales.half[i];
        if u[i].abs() > T::one() {
            return Err(Error::BadStart {
                reason: format!("coordinate {i} outside the box: normalized {}", lower(u[i])),
            });
        }
    }
    let (t1_tail, t2_tail) = model.level_tails(opts.eta1);
    if scales.fbar_tail(model, u) > t2_tail {
        return Err(Error::BadStart {
            reason: "start level above t2".into(),
        });
    }

    let mut dt = rf::<T>(1e-3);
    let mut steps = 0u64;
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    let mut status = FlowStatus::BudgetExhausted;
    let third = T::one() / ri::<T>(3);
    while steps < opts.max_steps {
        // Bogacki–Shampine 3(2) pair
        let k1 = scales.rhs(model, u);
        let u2 = add(u, scale(k1, dt / ri(2)));
        let k2 = scales.rhs(model, u2);
        let u3 = add(u, scale(k2, dt * rf(0.75)));
        let k3 = scales.rhs(model, u3);
        let mut u_new = u;
        for i in 0..3 {
            u_new[i] =
                u[i] + dt * (ri::<T>(2) * k1[i] + ri::<T>(3) * k2[i] + ri::<T>(4) * k3[i]) / ri(9);
        }
        let k4 = scales.rhs(model, u_new);
        let mut err = T::zero();
        for i in 0..3 {
            let e = dt
                * (-rf::<T>(5.0 / 72.0) * k1[i]
                    + rf::<T>(1.0 / 12.0) * k2[i]
                    + rf::<T>(1.0 / 9.0) * k3[i]
                    - rf::<T>(1.0 / 8.0) * k4[i]);
            let sc = rf::<T>(1e-9) + opts.rel_tol * u[i].abs().max(u_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if err <= T::one() {
            u = u_new;
            steps += 1;
            hash = fnv1a(hash, &lower(dt).to_bits().to_le_bytes());
            if let Some(face) = exit_face(u) {
                status = FlowStatus::LeftBox(face);
                break;
            }
            if scales.fbar_tail(model, u) <= t1_tail {
                status = FlowStatus::ReachedT1;
                break;
            }
        }
        let grow = rf::<T>(0.9) * (T::one() / err.max(rf(1e-12))).powf(third);
        dt *= grow.min(rf(5.0)).max(rf(0.2));
        dt = dt.min(rf(1e4));
    }

    let end = [
        u[0] * scales.half[0],
        u[1] * scales.half[1],
        u[2] * scales.half[2],
    ];
    Ok(FlowReport {
        seed,
        status,
        steps,
        start_offsets,
        end_offsets: end,
        fbar_final: scales.fbar(model, u),
        step_hash: hash,
    })
}

fn add<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale<T: Real>(a: [T; 3], s: T) -> [T; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Seeded uniform starts inside the box (as offsets), each below `t2`.
///
/// Rejection-samples against the level filter; gives up after a fixed
/// attempt budget and returns however many starts were admissible, which
/// the caller's start-count check then surfaces.
pub fn seeded_starts<T: Real>(
    model: &ReducedEnergyModel<T>,
    count: usize,
    seed: u64,
    eta1: T,
) -> Vec<[T; 3]> {
    let scales = Scales::new(model);
    let (_, t2_tail) = model.level_tails(eta1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count.saturating_mul(1000) {
        attempts += 1;
        let u = [
            rf::<T>(rng.random_range(-0.98..0.98)),
            rf::<T>(rng.random_range(-0.98..0.98)),
            rf::<T>(rng.random_range(-0.98..0.98)),
        ];
        if scales.fbar_tail(model, u) <= t2_tail {
            out.push([
                u[0] * scales.half[0],
                u[1] * scales.half[1],
                u[2] * scales.half[2],
            ]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ExpansionConstants;
    use crate::energy::ExponentBook;
    use crate::space::SpaceSpec;

    fn model(k: u64) -> ReducedEnergyModel<f64> {
        let spec = SpaceSpec::new(5, 1, 2.0, 1.0).unwrap();
        let constants = ExpansionConstants::compute(&spec).unwrap();
        let exponents = ExponentBook::for_space(&spec).unwrap();
        ReducedEnergyModel::new(spec, constants, exponents, k).unwrap()
    }

    #[test]
    fn stationary_start_stays_put() {
        // the model's finite-k stationary concentration is Λ*, not Λ₀
        let m = model(64);
        let start = [0.0, 0.0, m.lambda_star() - m.lambda0()];
        let rep = simulate(
            &m,
            start,
            1,
            &FlowOptions {
                max_steps: 2_000,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(rep.status, FlowStatus::BudgetExhausted);
        let b = m.box_dk();
        let half_r = (b.r.1 - b.r.0) / 2.0;
        assert!(rep.end_offsets[0].abs() <= 1e-6 * half_r);
        assert!(rep.end_offsets[1].abs() <= 1e-6);
        assert!((rep.end_offsets[2] - start[2]).abs() <= 1e-6);
    }

    #[test]
    fn lambda0_start_drifts_to_lambda_star() {
        // starting at the asymptotic Λ₀, the flow settles on the modeled
        // stationary point Λ*
        let m = model(64);
        let rep = simulate(
            &m,
            [0.0, 0.0, 0.0],
            2,
            &FlowOptions {
                max_steps: 20_000,
                ..Default::default()
            },
        )
        .unwrap();
        let drift_target = m.lambda_star() - m.lambda0();
        assert!(
            (rep.end_offsets[2] - drift_target).abs() <= 0.05 * drift_target.abs(),
            "end {} vs target {}",
            rep.end_offsets[2],
            drift_target
        );
    }

    #[test]
    fn rejects_start_outside_box() {
        let m = model(64);
        let b = m.box_dk();
        let half_r = (b.r.1 - b.r.0) / 2.0;
        assert!(matches!(
            simulate(&m, [2.0 * half_r, 0.0, 0.0], 0, &FlowOptions::default()),
            Err(Error::BadStart { .. })
        ));
    }

    #[test]
    fn h_and_lambda_relax_inward() {
        // start near the h-high and Λ-low faces but below the t2 level
        // (the deep Λ-low corner is above t2 at this k)
        let m = model(64);
        let b = m.box_dk();
        let half_h = (b.h.1 - b.h.0) / 2.0;
        let half_l = (b.lambda.1 - b.lambda.0) / 2.0;
        let rep = simulate(
            &m,
            [0.0, 0.8 * half_h, -0.4 * half_l],
            3,
            &FlowOptions {
                max_steps: 30_000,
                ..Default::default()
            },
        )
        .unwrap();
        assert_ne!(rep.status, FlowStatus::LeftBox(Face::HHigh));
        assert_ne!(rep.status, FlowStatus::LeftBox(Face::LambdaLow));
        // both stable coordinates moved toward the attractor
        assert!(rep.end_offsets[1].abs() < 0.8 * half_h);
        assert!(rep.end_offsets[2] > -0.4 * half_l);
    }

    #[test]
    fn fbar_decreases_along_flow() {
        let m = model(64);
        let b = m.box_dk();
        let half_h = (b.h.1 - b.h.0) / 2.0;
        let start = [0.0, 0.5 * half_h, 0.0];
        let f0 = m.fbar_from_offsets(0.0, -0.5 * half_h / m.lambda_k(), m.lambda0());
        let rep = simulate(
            &m,
            start,
            5,
            &FlowOptions {
                max_steps: 5_000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(rep.fbar_final <= f0 + 1e-12);
    }

    #[test]
    fn hundred_seeded_starts_confined_at_k64() {
        let m = model(64);
        let starts = seeded_starts(&m, 100, 42, 1e-3);
        assert_eq!(starts.len(), 100);
        let opts = FlowOptions {
            max_steps: 3_000,
            ..Default::default()
        };
        for (i, s) in starts.iter().enumerate() {
            let rep = simulate(&m, *s, 42 + i as u64, &opts).unwrap();
            if let FlowStatus::LeftBox(face) = rep.status {
                assert!(!face.is_confining(), "trajectory {i} left via {face:?}");
            }
        }
    }

    #[test]
    fn start_sampling_gives_up_on_impossible_level() {
        // a negative eta1 puts t2 below every box point; the sampler must
        // terminate empty instead of spinning
        let m = model(64);
        let starts = seeded_starts(&m, 5, 1, -1.0);
        assert!(starts.is_empty());
    }

    #[test]
    fn deterministic_trajectories() {
        let m = model(64);
        let opts = FlowOptions {
            max_steps: 1_000,
            ..Default::default()
        };
        let a = simulate(&m, [0.1, 0.0, 1e-5], 9, &opts).unwrap();
        let b = simulate(&m, [0.1, 0.0, 1e-5], 9, &opts).unwrap();
        assert_eq!(a.step_hash, b.step_hash);
        assert_eq!(a.steps, b.steps);
        assert_eq!(a.fbar_final.to_bits(), b.fbar_final.to_bits());
    }
}
