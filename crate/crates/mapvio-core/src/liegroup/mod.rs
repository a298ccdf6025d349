//! Closed-form Lie group operations.
//!
//! Three groups are covered: SO(3) for plain rotations, the extended pose
//! group (one rotation plus 2+K translation-like vectors), and the block
//! group combining one extended pose over 2+K+M vectors with M additional
//! rotations arranged diagonally. The last one carries the full filter
//! state: for the map-anchored system M = 1, the extra rotation/vector pair
//! is the odometry-to-map transform.
//!
//! Elements are stored in structured form (rotations and vectors), never as
//! the dense embedded matrix; the dense embedding exists for tests.

mod group;
mod so3;

pub use group::{group_exp, group_log, ExtendedPose, GroupElement, TangentVector};
pub use so3::{
    gamma2, so3_exp, so3_hat, so3_left_jacobian, so3_left_jacobian_inv, so3_log, so3_vee, Rot3,
};
