//! The augmented filter state: navigation variables, the odometry-to-map
//! transform, camera extrinsic, cloned historical poses and the nuisance
//! block of map keyframe poses, with a partitioned covariance.
//!
//! Error slot ordering is fixed and owned by [`StateLayout`]; every Jacobian
//! builder and retraction consumes the same table:
//!
//! ```text
//! [θ_LI, v, p_LI, p_LG, θ_LG, b_g, b_a, θ_IC, p_IC, clones (θ,p)..., keyframes (θ,p)...]
//! ```

use nalgebra::{DMatrix, DVector, Matrix6, Vector3};

use crate::error::{Error, Result};
use crate::liegroup::{
    group_exp, so3_exp, so3_left_jacobian, so3_log, ExtendedPose, GroupElement, Rot3,
    TangentVector,
};

/// Flat error/correction vector in the layout ordering.
pub type ErrorVector = DVector<f64>;

/// Which linearization chart a filter variant runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorChart {
    /// Right-invariant errors: rotations via `log(R̂R⁻¹)`, vector slots
    /// coupled to their group's base rotation.
    Invariant,
    /// Body-side rotation errors `log(RᵀR̂)` with additive vector errors.
    Standard,
}

/// Core navigation variables plus the odometry-to-map transform and biases.
#[derive(Debug, Clone, PartialEq)]
pub struct NavState {
    pub r_li: Rot3,
    pub v: Vector3<f64>,
    pub p_li: Vector3<f64>,
    pub p_lg: Vector3<f64>,
    pub r_lg: Rot3,
    pub bg: Vector3<f64>,
    pub ba: Vector3<f64>,
}

impl NavState {
    pub fn identity() -> Self {
        NavState {
            r_li: Rot3::identity(),
            v: Vector3::zeros(),
            p_li: Vector3::zeros(),
            p_lg: Vector3::zeros(),
            r_lg: Rot3::identity(),
            bg: Vector3::zeros(),
            ba: Vector3::zeros(),
        }
    }

    /// The group-valued part (R_LI, v, p_LI, p_LG, R_LG) as a block group
    /// element with one extra rotation.
    pub fn group(&self) -> GroupElement {
        GroupElement {
            block1: ExtendedPose { rot: self.r_li, vectors: vec![self.v, self.p_li, self.p_lg] },
            block2: vec![self.r_lg],
        }
    }

    pub fn set_from_group(&mut self, g: &GroupElement) {
        self.r_li = g.block1.rot;
        self.v = g.block1.vectors[0];
        self.p_li = g.block1.vectors[1];
        self.p_lg = g.block1.vectors[2];
        self.r_lg = g.block2[0];
    }
}

/// A cloned historical IMU pose.
#[derive(Debug, Clone, PartialEq)]
pub struct ClonedPose {
    pub rot: Rot3,
    pub pos: Vector3<f64>,
    pub timestamp: f64,
}

/// Camera-IMU extrinsic (camera pose in the IMU frame).
#[derive(Debug, Clone, PartialEq)]
pub struct Extrinsic {
    pub rot: Rot3,
    pub pos: Vector3<f64>,
}

impl Extrinsic {
    pub fn identity() -> Self {
        Extrinsic { rot: Rot3::identity(), pos: Vector3::zeros() }
    }
}

/// A map keyframe pose in the map frame, as held in the nuisance block.
#[derive(Debug, Clone, PartialEq)]
pub struct MapKeyframePose {
    pub id: u64,
    pub rot: Rot3,
    pub pos: Vector3<f64>,
}

/// Slot offsets of the error layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLayout {
    pub n_clones: usize,
    pub n_keyframes: usize,
}

impl StateLayout {
    pub const THETA_LI: usize = 0;
    pub const VEL: usize = 3;
    pub const P_LI: usize = 6;
    pub const P_LG: usize = 9;
    pub const THETA_LG: usize = 12;
    pub const BG: usize = 15;
    pub const BA: usize = 18;
    pub const THETA_IC: usize = 21;
    pub const P_IC: usize = 24;
    pub const CLONE_BASE: usize = 27;

    pub fn clone_theta(&self, i: usize) -> usize {
        debug_assert!(i < self.n_clones);
        Self::CLONE_BASE + 6 * i
    }

    pub fn clone_p(&self, i: usize) -> usize {
        self.clone_theta(i) + 3
    }

    /// Keyframe offsets are local to the nuisance partition.
    pub fn kf_theta(&self, j: usize) -> usize {
        debug_assert!(j < self.n_keyframes);
        6 * j
    }

    pub fn kf_p(&self, j: usize) -> usize {
        self.kf_theta(j) + 3
    }

    pub fn active_dim(&self) -> usize {
        Self::CLONE_BASE + 6 * self.n_clones
    }

    pub fn nuisance_dim(&self) -> usize {
        6 * self.n_keyframes
    }

    pub fn total_dim(&self) -> usize {
        self.active_dim() + self.nuisance_dim()
    }
}

/// Covariance stored with an explicit active/nuisance partition. The
/// nuisance-nuisance block is never touched by Schmidt updates.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedCov {
    pub aa: DMatrix<f64>,
    pub an: DMatrix<f64>,
    pub nn: DMatrix<f64>,
}

impl PartitionedCov {
    pub fn zeros(active: usize, nuisance: usize) -> Self {
        PartitionedCov {
            aa: DMatrix::zeros(active, active),
            an: DMatrix::zeros(active, nuisance),
            nn: DMatrix::zeros(nuisance, nuisance),
        }
    }

    /// Assembled joint matrix (tests and full updates).
    pub fn joint(&self) -> DMatrix<f64> {
        let na = self.aa.nrows();
        let nn = self.nn.nrows();
        let mut p = DMatrix::zeros(na + nn, na + nn);
        p.view_mut((0, 0), (na, na)).copy_from(&self.aa);
        p.view_mut((0, na), (na, nn)).copy_from(&self.an);
        p.view_mut((na, 0), (nn, na)).copy_from(&self.an.transpose());
        p.view_mut((na, na), (nn, nn)).copy_from(&self.nn);
        p
    }

    pub fn symmetrize(&mut self) {
        symmetrize(&mut self.aa);
        symmetrize(&mut self.nn);
    }

    /// Smallest eigenvalue of the joint matrix. Diagnostic use.
    pub fn min_eigenvalue(&self) -> f64 {
        let joint = self.joint();
        nalgebra::SymmetricEigen::new(joint)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// Active state, nuisance keyframes and the partitioned covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    pub nav: NavState,
    pub extrinsic: Extrinsic,
    pub clones: Vec<ClonedPose>,
    pub keyframes: Vec<MapKeyframePose>,
    pub cov: PartitionedCov,
    /// First estimate of the odometry-to-map rotation, frozen at
    /// initialization of the augmented variable for the lifetime of the run.
    pub oc_anchor: Option<Rot3>,
}

impl AugmentedState {
    pub fn new(nav: NavState, extrinsic: Extrinsic) -> Self {
        let layout = StateLayout { n_clones: 0, n_keyframes: 0 };
        AugmentedState {
            nav,
            extrinsic,
            clones: Vec::new(),
            keyframes: Vec::new(),
            cov: PartitionedCov::zeros(layout.active_dim(), 0),
            oc_anchor: None,
        }
    }

    pub fn layout(&self) -> StateLayout {
        StateLayout { n_clones: self.clones.len(), n_keyframes: self.keyframes.len() }
    }

    pub fn augmented_initialized(&self) -> bool {
        self.oc_anchor.is_some()
    }

    pub fn keyframe_index(&self, id: u64) -> Option<usize> {
        self.keyframes.iter().position(|k| k.id == id)
    }

    /// Appends a clone of the current pose. The clone error slots are exact
    /// copies of the pose error slots, so the covariance grows by copying
    /// their rows/columns.
    pub fn augment_clone(&mut self, timestamp: f64) -> Result<()> {
        if self.clones.iter().any(|c| c.timestamp == timestamp) {
            return Err(Error::DuplicateId(timestamp.to_bits()));
        }
        let layout = self.layout();
        let na = layout.active_dim();
        let nn = layout.nuisance_dim();
        let src = [StateLayout::THETA_LI, StateLayout::P_LI];

        let mut aa = DMatrix::zeros(na + 6, na + 6);
        aa.view_mut((0, 0), (na, na)).copy_from(&self.cov.aa);
        for (bi, s) in src.iter().enumerate() {
            aa.view_mut((na + 3 * bi, 0), (3, na))
                .copy_from(&self.cov.aa.view((*s, 0), (3, na)));
            aa.view_mut((0, na + 3 * bi), (na, 3))
                .copy_from(&self.cov.aa.view((0, *s), (na, 3)));
            for (bj, t) in src.iter().enumerate() {
                aa.view_mut((na + 3 * bi, na + 3 * bj), (3, 3))
                    .copy_from(&self.cov.aa.view((*s, *t), (3, 3)));
            }
        }
        let mut an = DMatrix::zeros(na + 6, nn);
        an.view_mut((0, 0), (na, nn)).copy_from(&self.cov.an);
        for (bi, s) in src.iter().enumerate() {
            an.view_mut((na + 3 * bi, 0), (3, nn))
                .copy_from(&self.cov.an.view((*s, 0), (3, nn)));
        }
        self.cov.aa = aa;
        self.cov.an = an;
        self.clones.push(ClonedPose { rot: self.nav.r_li, pos: self.nav.p_li, timestamp });
        Ok(())
    }

    /// Drops the oldest clone: plain deletion of its rows/columns, which is
    /// the correct marginalization of a slot that receives no further
    /// observations.
    pub fn marginalize_oldest(&mut self) -> Result<()> {
        if self.clones.is_empty() {
            return Err(Error::EmptyWindow);
        }
        let layout = self.layout();
        let start = layout.clone_theta(0);
        self.cov.aa = self.cov.aa.clone().remove_rows(start, 6).remove_columns(start, 6);
        self.cov.an = self.cov.an.clone().remove_rows(start, 6);
        self.clones.remove(0);
        Ok(())
    }

    /// Extends the nuisance block with keyframe poses and their block
    /// diagonal prior covariances (6×6, ordered [θ, p]). Cross terms with the
    /// existing state start at zero.
    pub fn insert_keyframes(
        &mut self,
        kfs: &[MapKeyframePose],
        kf_cov: &[Matrix6<f64>],
    ) -> Result<()> {
        if kfs.len() != kf_cov.len() {
            return Err(Error::DimensionMismatch {
                expected: kfs.len(),
                got: kf_cov.len(),
                what: "keyframe covariances",
            });
        }
        for kf in kfs {
            if self.keyframe_index(kf.id).is_some() {
                return Err(Error::DuplicateId(kf.id));
            }
        }
        if kfs.is_empty() {
            return Ok(());
        }
        let layout = self.layout();
        let na = layout.active_dim();
        let n0 = layout.nuisance_dim();
        let added = 6 * kfs.len();

        let mut nn = DMatrix::zeros(n0 + added, n0 + added);
        nn.view_mut((0, 0), (n0, n0)).copy_from(&self.cov.nn);
        for (j, c) in kf_cov.iter().enumerate() {
            nn.view_mut((n0 + 6 * j, n0 + 6 * j), (6, 6)).copy_from(c);
        }
        let mut an = DMatrix::zeros(na, n0 + added);
        an.view_mut((0, 0), (na, n0)).copy_from(&self.cov.an);
        self.cov.nn = nn;
        self.cov.an = an;
        self.keyframes.extend_from_slice(kfs);
        Ok(())
    }

    /// Sets the odometry-to-map transform with its prior covariance (6×6
    /// over [p_LG, θ_LG]) and freezes the anchor rotation.
    pub fn init_augmented_variable(
        &mut self,
        r_lg: Rot3,
        p_lg: Vector3<f64>,
        cov_init: Matrix6<f64>,
    ) -> Result<()> {
        if self.augmented_initialized() {
            return Err(Error::AlreadyInitialized);
        }
        self.nav.r_lg = r_lg;
        self.nav.p_lg = p_lg;
        let s = StateLayout::P_LG;
        let na = self.cov.aa.nrows();
        self.cov.aa.view_mut((s, 0), (6, na)).fill(0.0);
        self.cov.aa.view_mut((0, s), (na, 6)).fill(0.0);
        self.cov.aa.view_mut((s, s), (6, 6)).copy_from(&cov_init);
        let nn = self.cov.an.ncols();
        self.cov.an.view_mut((s, 0), (6, nn)).fill(0.0);
        self.oc_anchor = Some(r_lg);
        Ok(())
    }
}

fn rot_err_standard(truth: &Rot3, est: &Rot3) -> Result<Vector3<f64>> {
    so3_log(&(truth.inverse() * *est))
}

/// Exact right-invariant error of a (rotation, vector...) group component:
/// the group logarithm of `X̂ X⁻¹`. Its first-order expansion is the hat
/// form `v̂ − (I + (θ̃)×) v` on each vector slot.
fn pair_err_invariant(
    truth: (&Rot3, &[Vector3<f64>]),
    est: (&Rot3, &[Vector3<f64>]),
) -> Result<(Vector3<f64>, Vec<Vector3<f64>>)> {
    let eta_r = *est.0 * truth.0.inverse();
    let theta = so3_log(&eta_r)?;
    let jl_inv = crate::liegroup::so3_left_jacobian_inv(&theta);
    let xis = est
        .1
        .iter()
        .zip(truth.1)
        .map(|(ve, vt)| jl_inv * (ve - &eta_r * vt))
        .collect();
    Ok((theta, xis))
}

/// Error of the estimate relative to the truth in the requested chart, over
/// the estimate's layout. Both states must share the same layout.
pub fn state_error(
    truth: &AugmentedState,
    est: &AugmentedState,
    chart: ErrorChart,
) -> Result<ErrorVector> {
    let layout = est.layout();
    if truth.layout() != layout {
        return Err(Error::DimensionMismatch {
            expected: layout.total_dim(),
            got: truth.layout().total_dim(),
            what: "state layouts",
        });
    }
    let mut e = DVector::zeros(layout.total_dim());
    match chart {
        ErrorChart::Invariant => {
            let nav_t = truth.nav.group();
            let nav_e = est.nav.group();
            let xi = crate::liegroup::group_log(&nav_e.compose(&nav_t.inverse())?)?;
            e.fixed_rows_mut::<3>(StateLayout::THETA_LI).copy_from(&xi.head_rot);
            e.fixed_rows_mut::<3>(StateLayout::VEL).copy_from(&xi.vectors[0]);
            e.fixed_rows_mut::<3>(StateLayout::P_LI).copy_from(&xi.vectors[1]);
            e.fixed_rows_mut::<3>(StateLayout::P_LG).copy_from(&xi.vectors[2]);
            e.fixed_rows_mut::<3>(StateLayout::THETA_LG).copy_from(&xi.extra_rots[0]);
            let (th_ic, p_ic) = pair_err_invariant(
                (&truth.extrinsic.rot, std::slice::from_ref(&truth.extrinsic.pos)),
                (&est.extrinsic.rot, std::slice::from_ref(&est.extrinsic.pos)),
            )?;
            e.fixed_rows_mut::<3>(StateLayout::THETA_IC).copy_from(&th_ic);
            e.fixed_rows_mut::<3>(StateLayout::P_IC).copy_from(&p_ic[0]);
            for (i, (ct, ce)) in truth.clones.iter().zip(&est.clones).enumerate() {
                let (th, p) = pair_err_invariant(
                    (&ct.rot, std::slice::from_ref(&ct.pos)),
                    (&ce.rot, std::slice::from_ref(&ce.pos)),
                )?;
                e.fixed_rows_mut::<3>(layout.clone_theta(i)).copy_from(&th);
                e.fixed_rows_mut::<3>(layout.clone_p(i)).copy_from(&p[0]);
            }
            let base = layout.active_dim();
            for (j, (kt, ke)) in truth.keyframes.iter().zip(&est.keyframes).enumerate() {
                let (th, p) = pair_err_invariant(
                    (&kt.rot, std::slice::from_ref(&kt.pos)),
                    (&ke.rot, std::slice::from_ref(&ke.pos)),
                )?;
                e.fixed_rows_mut::<3>(base + layout.kf_theta(j)).copy_from(&th);
                e.fixed_rows_mut::<3>(base + layout.kf_p(j)).copy_from(&p[0]);
            }
        }
        ErrorChart::Standard => {
            e.fixed_rows_mut::<3>(StateLayout::THETA_LI)
                .copy_from(&rot_err_standard(&truth.nav.r_li, &est.nav.r_li)?);
            e.fixed_rows_mut::<3>(StateLayout::VEL).copy_from(&(est.nav.v - truth.nav.v));
            e.fixed_rows_mut::<3>(StateLayout::P_LI).copy_from(&(est.nav.p_li - truth.nav.p_li));
            e.fixed_rows_mut::<3>(StateLayout::P_LG).copy_from(&(est.nav.p_lg - truth.nav.p_lg));
            e.fixed_rows_mut::<3>(StateLayout::THETA_LG)
                .copy_from(&rot_err_standard(&truth.nav.r_lg, &est.nav.r_lg)?);
            e.fixed_rows_mut::<3>(StateLayout::THETA_IC)
                .copy_from(&rot_err_standard(&truth.extrinsic.rot, &est.extrinsic.rot)?);
            e.fixed_rows_mut::<3>(StateLayout::P_IC)
                .copy_from(&(est.extrinsic.pos - truth.extrinsic.pos));
            for (i, (ct, ce)) in truth.clones.iter().zip(&est.clones).enumerate() {
                e.fixed_rows_mut::<3>(layout.clone_theta(i))
                    .copy_from(&rot_err_standard(&ct.rot, &ce.rot)?);
                e.fixed_rows_mut::<3>(layout.clone_p(i)).copy_from(&(ce.pos - ct.pos));
            }
            let base = layout.active_dim();
            for (j, (kt, ke)) in truth.keyframes.iter().zip(&est.keyframes).enumerate() {
                e.fixed_rows_mut::<3>(base + layout.kf_theta(j))
                    .copy_from(&rot_err_standard(&kt.rot, &ke.rot)?);
                e.fixed_rows_mut::<3>(base + layout.kf_p(j)).copy_from(&(ke.pos - kt.pos));
            }
        }
    }
    // bias errors are additive in both charts
    e.fixed_rows_mut::<3>(StateLayout::BG).copy_from(&(est.nav.bg - truth.nav.bg));
    e.fixed_rows_mut::<3>(StateLayout::BA).copy_from(&(est.nav.ba - truth.nav.ba));
    Ok(e)
}

/// Right-invariant error of the estimate relative to the truth.
pub fn right_invariant_error(truth: &AugmentedState, est: &AugmentedState) -> Result<ErrorVector> {
    state_error(truth, est, ErrorChart::Invariant)
}

fn se3_retract_invariant(theta: &Vector3<f64>, dp: &Vector3<f64>, rot: &Rot3, pos: &Vector3<f64>) -> (Rot3, Vector3<f64>) {
    let dr = so3_exp(theta);
    (dr * *rot, so3_left_jacobian(theta) * dp + dr * *pos)
}

/// Applies a correction in the given chart. The correction length must be
/// either the active dimension (nuisance untouched, the Schmidt convention)
/// or the full dimension.
pub fn retract(state: &AugmentedState, correction: &ErrorVector, chart: ErrorChart) -> Result<AugmentedState> {
    let layout = state.layout();
    let na = layout.active_dim();
    let with_nuisance = if correction.len() == na {
        false
    } else if correction.len() == layout.total_dim() {
        true
    } else {
        return Err(Error::DimensionMismatch {
            expected: na,
            got: correction.len(),
            what: "correction vector",
        });
    };
    let mut out = state.clone();
    let c3 = |o: usize| correction.fixed_rows::<3>(o).into_owned();

    match chart {
        ErrorChart::Invariant => {
            // group slots via left multiplication with the group exponential
            let delta = TangentVector {
                head_rot: c3(StateLayout::THETA_LI),
                vectors: vec![c3(StateLayout::VEL), c3(StateLayout::P_LI), c3(StateLayout::P_LG)],
                extra_rots: vec![c3(StateLayout::THETA_LG)],
            };
            let updated = group_exp(&delta).compose(&state.nav.group())?;
            out.nav.set_from_group(&updated);
            let (r, p) = se3_retract_invariant(
                &c3(StateLayout::THETA_IC),
                &c3(StateLayout::P_IC),
                &state.extrinsic.rot,
                &state.extrinsic.pos,
            );
            out.extrinsic = Extrinsic { rot: r, pos: p };
            for (i, cl) in out.clones.iter_mut().enumerate() {
                let (r, p) = se3_retract_invariant(
                    &c3(layout.clone_theta(i)),
                    &c3(layout.clone_p(i)),
                    &cl.rot,
                    &cl.pos,
                );
                cl.rot = r;
                cl.pos = p;
            }
            if with_nuisance {
                for (j, kf) in out.keyframes.iter_mut().enumerate() {
                    let (r, p) = se3_retract_invariant(
                        &c3(na + layout.kf_theta(j)),
                        &c3(na + layout.kf_p(j)),
                        &kf.rot,
                        &kf.pos,
                    );
                    kf.rot = r;
                    kf.pos = p;
                }
            }
        }
        ErrorChart::Standard => {
            out.nav.r_li = state.nav.r_li * so3_exp(&c3(StateLayout::THETA_LI));
            out.nav.v = state.nav.v + c3(StateLayout::VEL);
            out.nav.p_li = state.nav.p_li + c3(StateLayout::P_LI);
            out.nav.p_lg = state.nav.p_lg + c3(StateLayout::P_LG);
            out.nav.r_lg = state.nav.r_lg * so3_exp(&c3(StateLayout::THETA_LG));
            out.extrinsic.rot = state.extrinsic.rot * so3_exp(&c3(StateLayout::THETA_IC));
            out.extrinsic.pos = state.extrinsic.pos + c3(StateLayout::P_IC);
            for (i, cl) in out.clones.iter_mut().enumerate() {
                cl.rot = cl.rot * so3_exp(&c3(layout.clone_theta(i)));
                cl.pos += c3(layout.clone_p(i));
            }
            if with_nuisance {
                for (j, kf) in out.keyframes.iter_mut().enumerate() {
                    kf.rot = kf.rot * so3_exp(&c3(na + layout.kf_theta(j)));
                    kf.pos += c3(na + layout.kf_p(j));
                }
            }
        }
    }
    // bias corrections are additive in both charts
    out.nav.bg = state.nav.bg + c3(StateLayout::BG);
    out.nav.ba = state.nav.ba + c3(StateLayout::BA);
    Ok(out)
}
