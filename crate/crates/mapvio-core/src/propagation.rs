//! IMU-driven mean propagation and covariance propagation in either error
//! chart.
//!
//! The invariant error dynamics have a state-independent core: only the
//! bias-coupling columns depend on estimates. The standard-chart dynamics
//! are the classical linearization and need the current IMU sample.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::liegroup::{gamma2, so3_exp, so3_hat, so3_left_jacobian, Rot3};
use crate::state::{AugmentedState, StateLayout};

/// Gravity in the local inertial frame.
pub fn gravity() -> Vector3<f64> {
    Vector3::new(0.0, 0.0, -9.8)
}

/// One gyro/accelerometer sample. The values are treated as constant over
/// the interval they head (zero-order hold).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample {
    pub t: f64,
    pub omega: Vector3<f64>,
    pub acc: Vector3<f64>,
}

/// Continuous-time IMU noise densities (per √Hz conventions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub sigma_g: f64,
    pub sigma_a: f64,
    pub sigma_bg: f64,
    pub sigma_ba: f64,
}

impl NoiseParams {
    pub fn zero() -> Self {
        NoiseParams { sigma_g: 0.0, sigma_a: 0.0, sigma_bg: 0.0, sigma_ba: 0.0 }
    }

    /// Spectral density diagonal over the 21 process-noise slots
    /// [w_g, w_a, 0₉, w_bg, w_ba].
    pub fn spectral_density(&self) -> DVector<f64> {
        let mut d = DVector::zeros(NOISE_DIM);
        for i in 0..3 {
            d[i] = self.sigma_g * self.sigma_g;
            d[3 + i] = self.sigma_a * self.sigma_a;
            d[15 + i] = self.sigma_bg * self.sigma_bg;
            d[18 + i] = self.sigma_ba * self.sigma_ba;
        }
        d
    }
}

/// Process-noise vector dimension: gyro, accel, three interleaved zero
/// blocks (p, p_LG, θ_LG), gyro random walk, accel random walk.
pub const NOISE_DIM: usize = 21;

/// Exact flow of the deterministic kinematics over one zero-order-hold
/// interval. Used by the simulator self-consistency checks and by the
/// observability analysis, where exact transition maps are required.
pub fn zoh_flow(
    rot: &Rot3,
    v: &Vector3<f64>,
    p: &Vector3<f64>,
    omega: &Vector3<f64>,
    acc: &Vector3<f64>,
    dt: f64,
) -> (Rot3, Vector3<f64>, Vector3<f64>) {
    let g = gravity();
    let wdt = omega * dt;
    let r_new = *rot * so3_exp(&wdt);
    let v_new = v + g * dt + *rot * (so3_left_jacobian(&wdt) * acc) * dt;
    let p_new = p + v * dt + g * (0.5 * dt * dt) + *rot * (gamma2(&wdt) * acc) * (dt * dt);
    (r_new, v_new, p_new)
}

/// Integrates the bias-corrected kinematics over `dt` with RK4 on the
/// deterministic part. Biases, the odometry-to-map transform, extrinsic,
/// clones and keyframes are unchanged.
pub fn propagate_mean(state: &AugmentedState, imu: &ImuSample, dt: f64) -> Result<AugmentedState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidTimeStep(dt));
    }
    let omega = imu.omega - state.nav.bg;
    let acc = imu.acc - state.nav.ba;
    let g = gravity();

    // flat (R, v, p) derivative under constant (omega, acc)
    let deriv = |r: &Matrix3<f64>, v: &Vector3<f64>| -> (Matrix3<f64>, Vector3<f64>, Vector3<f64>) {
        (r * so3_hat(&omega), r * acc + g, *v)
    };

    let r0 = *state.nav.r_li.matrix();
    let v0 = state.nav.v;
    let p0 = state.nav.p_li;

    let (k1r, k1v, k1p) = deriv(&r0, &v0);
    let (k2r, k2v, k2p) = deriv(&(r0 + 0.5 * dt * k1r), &(v0 + 0.5 * dt * k1v));
    let (k3r, k3v, k3p) = deriv(&(r0 + 0.5 * dt * k2r), &(v0 + 0.5 * dt * k2v));
    let (k4r, k4v, k4p) = deriv(&(r0 + dt * k3r), &(v0 + dt * k3v));

    let r1 = r0 + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    let v1 = v0 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    let p1 = p0 + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);

    let mut out = state.clone();
    let mut rot = Rot3::from_matrix_unchecked(r1);
    rot.renormalize();
    out.nav.r_li = rot;
    out.nav.v = v1;
    out.nav.p_li = p1;
    Ok(out)
}

/// Continuous error dynamics (A, W) in the invariant chart over the active
/// layout. Rows and columns of clones and extrinsic are zero: their errors
/// are constant under propagation. W maps the 21 process-noise slots through
/// the adjoint of the current group estimate (identity on the bias block).
pub fn error_dynamics(state: &AugmentedState) -> (DMatrix<f64>, DMatrix<f64>) {
    let layout = state.layout();
    let na = layout.active_dim();
    let mut a = DMatrix::zeros(na, na);
    let r = state.nav.r_li.matrix();
    let g_hat = so3_hat(&gravity());

    a.view_mut((StateLayout::THETA_LI, StateLayout::BG), (3, 3)).copy_from(&(-r));
    a.view_mut((StateLayout::VEL, StateLayout::THETA_LI), (3, 3)).copy_from(&g_hat);
    a.view_mut((StateLayout::VEL, StateLayout::BG), (3, 3))
        .copy_from(&(-so3_hat(&state.nav.v) * r));
    a.view_mut((StateLayout::VEL, StateLayout::BA), (3, 3)).copy_from(&(-r));
    a.view_mut((StateLayout::P_LI, StateLayout::VEL), (3, 3)).fill_with_identity();
    a.view_mut((StateLayout::P_LI, StateLayout::BG), (3, 3))
        .copy_from(&(-so3_hat(&state.nav.p_li) * r));
    a.view_mut((StateLayout::P_LG, StateLayout::BG), (3, 3))
        .copy_from(&(-so3_hat(&state.nav.p_lg) * r));

    let mut w = DMatrix::zeros(na, NOISE_DIM);
    w.view_mut((0, 0), (15, 15)).copy_from(&state.nav.group().adjoint());
    w.view_mut((StateLayout::BG, 15), (6, 6)).fill_with_identity();
    (a, w)
}

/// Standard-chart error dynamics (classical MSCKF linearization). The
/// attitude and velocity rows depend on the bias-corrected IMU sample.
pub fn std_ekf_error_dynamics(
    state: &AugmentedState,
    imu: &ImuSample,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let layout = state.layout();
    let na = layout.active_dim();
    let mut a = DMatrix::zeros(na, na);
    let r = state.nav.r_li.matrix();
    let omega = imu.omega - state.nav.bg;
    let acc = imu.acc - state.nav.ba;

    a.view_mut((StateLayout::THETA_LI, StateLayout::THETA_LI), (3, 3))
        .copy_from(&(-so3_hat(&omega)));
    a.view_mut((StateLayout::THETA_LI, StateLayout::BG), (3, 3))
        .copy_from(&(-Matrix3::identity()));
    a.view_mut((StateLayout::VEL, StateLayout::THETA_LI), (3, 3))
        .copy_from(&(-r * so3_hat(&acc)));
    a.view_mut((StateLayout::VEL, StateLayout::BA), (3, 3)).copy_from(&(-r));
    a.view_mut((StateLayout::P_LI, StateLayout::VEL), (3, 3)).fill_with_identity();

    let mut w = DMatrix::zeros(na, NOISE_DIM);
    w.view_mut((StateLayout::THETA_LI, 0), (3, 3)).fill_with_identity();
    w.view_mut((StateLayout::VEL, 3), (3, 3)).copy_from(r);
    w.view_mut((StateLayout::BG, 15), (6, 6)).fill_with_identity();
    (a, w)
}

/// Discrete transition over `dt`: `Φ = exp(A·dt)` and the trapezoidal
/// discretization `Q_d = (Φ Q̂ Φᵀ + Q̂)·dt/2` with `Q̂ = W Cov(w) Wᵀ`.
pub fn discrete_transition(
    a: &DMatrix<f64>,
    w: &DMatrix<f64>,
    noise: &NoiseParams,
    dt: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let phi = (a * dt).exp();
    let density = noise.spectral_density();
    // W * diag(density) * Wᵀ
    let mut wd = w.clone();
    for j in 0..NOISE_DIM {
        let s = density[j];
        wd.column_mut(j).scale_mut(s);
    }
    let q_hat = &wd * w.transpose();
    let mut qd = (&phi * &q_hat * phi.transpose() + &q_hat) * (0.5 * dt);
    crate::state::symmetrize(&mut qd);
    (phi, qd)
}

/// One discrete covariance step, `P' = Φ P Φᵀ + Q_d`, symmetrized. The input
/// must not have lost definiteness beyond `−1e-9`.
pub fn propagate_covariance(
    p: &DMatrix<f64>,
    a: &DMatrix<f64>,
    w: &DMatrix<f64>,
    noise: &NoiseParams,
    dt: f64,
) -> Result<DMatrix<f64>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    let min_diag = (0..p.nrows()).map(|i| p[(i, i)]).fold(f64::INFINITY, f64::min);
    if min_diag < -1e-9 {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min_diag });
    }
    let (phi, qd) = discrete_transition(a, w, noise, dt);
    let mut out = &phi * p * phi.transpose() + qd;
    crate::state::symmetrize(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{state_error, retract, ErrorChart};
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rv3(rng: &mut ChaCha8Rng, s: f64) -> Vector3<f64> {
        Vector3::from_fn(|_, _| (rng.gen::<f64>() * 2.0 - 1.0) * s)
    }

    fn random_state(rng: &mut ChaCha8Rng) -> AugmentedState {
        let mut st = AugmentedState::new(crate::state::NavState::identity(), crate::state::Extrinsic::identity());
        st.nav.r_li = so3_exp(&rv3(rng, 1.0));
        st.nav.v = rv3(rng, 2.0);
        st.nav.p_li = rv3(rng, 4.0);
        st.nav.p_lg = rv3(rng, 4.0);
        st.nav.r_lg = so3_exp(&rv3(rng, 1.0));
        st.nav.bg = rv3(rng, 0.02);
        st.nav.ba = rv3(rng, 0.1);
        st
    }

    #[test]
    fn static_hover_is_equilibrium() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut st = random_state(&mut rng);
        st.nav.v = Vector3::zeros();
        // gyro reads the bias, accelerometer reads bias minus body gravity
        let imu = ImuSample {
            t: 0.0,
            omega: st.nav.bg,
            acc: st.nav.ba - st.nav.r_li.matrix().transpose() * gravity(),
        };
        let out = propagate_mean(&st, &imu, 0.05).unwrap();
        assert!((out.nav.p_li - st.nav.p_li).norm() < 1e-12);
        assert!((out.nav.v - st.nav.v).norm() < 1e-12);
        assert!((out.nav.r_li.matrix() - st.nav.r_li.matrix()).norm() < 1e-12);
    }

    #[test]
    fn map_related_slots_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let st = random_state(&mut rng);
        let imu = ImuSample { t: 0.0, omega: rv3(&mut rng, 1.0), acc: rv3(&mut rng, 3.0) };
        let out = propagate_mean(&st, &imu, 0.005).unwrap();
        assert_eq!(out.nav.p_lg, st.nav.p_lg);
        assert_eq!(out.nav.r_lg, st.nav.r_lg);
        assert_eq!(out.nav.bg, st.nav.bg);
        assert_eq!(out.nav.ba, st.nav.ba);
        assert_eq!(out.extrinsic, st.extrinsic);
    }

    #[test]
    fn rejects_bad_dt() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let st = random_state(&mut rng);
        let imu = ImuSample { t: 0.0, omega: Vector3::zeros(), acc: Vector3::zeros() };
        assert!(propagate_mean(&st, &imu, 0.0).is_err());
        assert!(propagate_mean(&st, &imu, -0.1).is_err());
    }

    #[test]
    fn mean_matches_fine_step_reference() {
        // Constant true (omega, acc) over 1 s; fine-step Euler oracle.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut st = random_state(&mut rng);
        st.nav.bg = Vector3::zeros();
        st.nav.ba = Vector3::zeros();
        let imu = ImuSample { t: 0.0, omega: Vector3::new(0.3, -0.2, 0.5), acc: Vector3::new(0.5, 0.2, -0.3) };

        let mut ours = st.clone();
        let dt = 1.0 / 200.0;
        for _ in 0..200 {
            ours = propagate_mean(&ours, &imu, dt).unwrap();
        }

        // Euler at 1e-6 steps
        let n = 1_000_000usize;
        let h = 1.0 / n as f64;
        let mut r = *st.nav.r_li.matrix();
        let mut v = st.nav.v;
        let mut p = st.nav.p_li;
        let g = gravity();
        let w_hat = so3_hat(&imu.omega);
        for _ in 0..n {
            let rd = r * w_hat;
            let vd = r * imu.acc + g;
            p += v * h;
            v += vd * h;
            r += rd * h;
        }
        assert!((ours.nav.p_li - p).norm() < 1e-7, "pos err {}", (ours.nav.p_li - p).norm());
        assert!((ours.nav.v - v).norm() < 1e-7);
        assert!((ours.nav.r_li.matrix() - r).norm() < 1e-6);

        // and the closed-form flow agrees tighter
        let (re, ve, pe) = {
            let mut s = (st.nav.r_li, st.nav.v, st.nav.p_li);
            for _ in 0..200 {
                s = zoh_flow(&s.0, &s.1, &s.2, &imu.omega, &imu.acc, dt);
            }
            s
        };
        assert!((ours.nav.p_li - pe).norm() < 1e-10);
        assert!((ours.nav.v - ve).norm() < 1e-10);
        assert!((ours.nav.r_li.matrix() - re.matrix()).norm() < 1e-10);
    }

    #[test]
    fn invariant_core_is_state_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a1, _) = error_dynamics(&random_state(&mut rng));
        let (a2, _) = error_dynamics(&random_state(&mut rng));
        let core1 = a1.view((0, 0), (9, 9)).into_owned();
        let core2 = a2.view((0, 0), (9, 9)).into_owned();
        assert_eq!(core1, core2);
        // and the core has the documented pattern
        assert_eq!(core1.fixed_view::<3, 3>(3, 0).into_owned(), so3_hat(&gravity()));
        assert_eq!(core1.fixed_view::<3, 3>(6, 3).into_owned(), Matrix3::identity());
    }

    #[test]
    fn bias_columns_at_identity() {
        let st = AugmentedState::new(crate::state::NavState::identity(), crate::state::Extrinsic::identity());
        let (a, _) = error_dynamics(&st);
        assert_eq!(a.fixed_view::<3, 3>(StateLayout::THETA_LI, StateLayout::BG).into_owned(), -Matrix3::identity());
        assert_eq!(a.fixed_view::<3, 3>(StateLayout::VEL, StateLayout::BA).into_owned(), -Matrix3::identity());
        assert_eq!(a.fixed_view::<3, 3>(StateLayout::VEL, StateLayout::BG).into_owned(), Matrix3::zeros());

        let imu = ImuSample { t: 0.0, omega: Vector3::zeros(), acc: Vector3::zeros() };
        let (a_std, _) = std_ekf_error_dynamics(&st, &imu);
        assert_eq!(
            a_std.fixed_view::<3, 3>(StateLayout::THETA_LI, StateLayout::BG).into_owned(),
            -Matrix3::identity()
        );
        assert_eq!(a_std.fixed_view::<3, 3>(StateLayout::VEL, StateLayout::BA).into_owned(), -Matrix3::identity());
    }

    #[test]
    fn std_velocity_block_is_state_dependent() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let st = random_state(&mut rng);
        let imu = ImuSample { t: 0.0, omega: rv3(&mut rng, 0.5), acc: rv3(&mut rng, 2.0) };
        let (a_std, _) = std_ekf_error_dynamics(&st, &imu);
        let expected = -st.nav.r_li.matrix() * so3_hat(&(imu.acc - st.nav.ba));
        assert_relative_eq!(
            a_std.fixed_view::<3, 3>(StateLayout::VEL, StateLayout::THETA_LI).into_owned(),
            expected,
            epsilon = 1e-14
        );
    }

    /// Finite-difference oracle: propagate truth and estimate through the
    /// exact flow, differentiate the error in time, compare against A·ξ.
    fn check_error_dynamics_fd(chart: ErrorChart, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth = random_state(&mut rng);
        let na = truth.layout().active_dim();
        let xi_small = DVector::from_fn(na, |_, _| (rng.gen::<f64>() * 2.0 - 1.0));
        let xi = &xi_small * (1e-4 / xi_small.norm());
        let est = retract(&truth, &xi, chart).unwrap();

        let imu = ImuSample { t: 0.0, omega: rv3(&mut rng, 0.6), acc: rv3(&mut rng, 2.0) };
        let dt = 1e-5;

        let flow = |s: &AugmentedState| -> AugmentedState {
            // truth propagates with its own biases, zero noise
            let (r, v, p) = zoh_flow(&s.nav.r_li, &s.nav.v, &s.nav.p_li, &(imu.omega - s.nav.bg), &(imu.acc - s.nav.ba), dt);
            let mut out = s.clone();
            out.nav.r_li = r;
            out.nav.v = v;
            out.nav.p_li = p;
            out
        };
        let truth1 = flow(&truth);
        let est1 = flow(&est);
        let xi0 = state_error(&truth, &est, chart).unwrap();
        let xi1 = state_error(&truth1, &est1, chart).unwrap();
        let deriv = (xi1 - &xi0) / dt;

        let (a, _) = match chart {
            ErrorChart::Invariant => error_dynamics(&est),
            ErrorChart::Standard => std_ekf_error_dynamics(&est, &imu),
        };
        let predicted = &a * xi0;
        assert!(
            (deriv - predicted).norm() < 1e-6,
            "chart {chart:?}: fd mismatch"
        );
    }

    #[test]
    fn error_dynamics_matches_finite_difference() {
        for seed in 0..5 {
            check_error_dynamics_fd(ErrorChart::Invariant, 100 + seed);
            check_error_dynamics_fd(ErrorChart::Standard, 200 + seed);
        }
    }

    #[test]
    fn zero_noise_zero_dynamics_keeps_covariance() {
        let na = 27;
        let a = DMatrix::zeros(na, na);
        let w = DMatrix::zeros(na, NOISE_DIM);
        let p = DMatrix::identity(na, na) * 0.3;
        let out = propagate_covariance(&p, &a, &w, &NoiseParams::zero(), 0.01).unwrap();
        assert!((out - p).norm() < 1e-14);
    }

    #[test]
    fn bias_random_walk_grows_variance_linearly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let st = random_state(&mut rng);
        let na = st.layout().active_dim();
        let (a, w) = error_dynamics(&st);
        let noise = NoiseParams { sigma_g: 0.0, sigma_a: 0.0, sigma_bg: 0.3, sigma_ba: 0.0 };
        let p = DMatrix::zeros(na, na);
        let dt = 0.01;
        let out = propagate_covariance(&p, &a, &w, &noise, dt).unwrap();
        for i in 0..3 {
            let idx = StateLayout::BG + i;
            assert_relative_eq!(out[(idx, idx)], 0.3 * 0.3 * dt, epsilon = 1e-6);
        }
    }

    #[test]
    fn covariance_matches_exact_riccati_solution() {
        // Closed-form oracle: vectorize the Riccati equation; with constant
        // A the lifted system is linear time-invariant and solvable by one
        // matrix exponential. An RK4 fine-step integration cross-checks it.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut st = random_state(&mut rng);
        st.clones.clear();
        let na = st.layout().active_dim();
        let (a, w) = error_dynamics(&st);
        let noise = NoiseParams { sigma_g: 0.01, sigma_a: 0.05, sigma_bg: 0.001, sigma_ba: 0.003 };

        let base = DMatrix::from_fn(na, na, |_, _| rng.gen::<f64>() - 0.5);
        let p0 = &base * base.transpose() * 0.01 + DMatrix::identity(na, na) * 0.01;

        // ours, stepped at 1e-4 over 1 s
        let steps = 10_000;
        let dt = 1e-4;
        let mut ours = p0.clone();
        for _ in 0..steps {
            ours = propagate_covariance(&ours, &a, &w, &noise, dt).unwrap();
        }

        // exact via Kronecker lift: vec(P)' = M vec(P) + vec(Q̂)
        let density = noise.spectral_density();
        let mut wd = w.clone();
        for j in 0..NOISE_DIM {
            wd.column_mut(j).scale_mut(density[j]);
        }
        let q_hat = &wd * w.transpose();
        let n2 = na * na;
        let mut lift = DMatrix::<f64>::zeros(n2 + 1, n2 + 1);
        // M = I ⊗ A + A ⊗ I acting on column-stacked P
        for c in 0..na {
            for r in 0..na {
                let row = c * na + r;
                for k in 0..na {
                    lift[(row, c * na + k)] += a[(r, k)];
                    lift[(row, k * na + r)] += a[(c, k)];
                }
                lift[(row, n2)] = q_hat[(r, c)];
            }
        }
        let e = (lift * 1.0f64).exp();
        let mut v0 = DVector::zeros(n2 + 1);
        for c in 0..na {
            for r in 0..na {
                v0[c * na + r] = p0[(r, c)];
            }
        }
        v0[n2] = 1.0;
        let v1 = e * v0;
        let exact = DMatrix::from_fn(na, na, |r, c| v1[c * na + r]);

        let rel = (&ours - &exact).norm() / exact.norm();
        assert!(rel < 1e-6, "relative error {rel}");

        // RK4 cross-check of the oracle itself
        let mut p = p0.clone();
        let h = 1e-3;
        let f = |p: &DMatrix<f64>| &a * p + p * a.transpose() + &q_hat;
        for _ in 0..1000 {
            let k1 = f(&p);
            let k2 = f(&(&p + 0.5 * h * &k1));
            let k3 = f(&(&p + 0.5 * h * &k2));
            let k4 = f(&(&p + h * &k3));
            p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((p - exact).norm() / ours.norm() < 1e-8);
    }

    #[test]
    fn long_run_covariance_stays_psd() {
        // 10⁴ steps at 200 Hz with default-magnitude noise.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let st = random_state(&mut rng);
        let na = st.layout().active_dim();
        let (a, w) = error_dynamics(&st);
        let noise = NoiseParams { sigma_g: 1.7e-4, sigma_a: 2e-3, sigma_bg: 1.9e-5, sigma_ba: 3e-3 };
        let mut p = DMatrix::identity(na, na) * 1e-4;
        let dt = 1.0 / 200.0;
        for _ in 0..10_000 {
            p = propagate_covariance(&p, &a, &w, &noise, dt).unwrap();
        }
        let eig = nalgebra::SymmetricEigen::new(p.clone());
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > -1e-8, "min eigenvalue {min}");
        assert!((p.clone() - p.transpose()).norm() < 1e-10);
    }
}
