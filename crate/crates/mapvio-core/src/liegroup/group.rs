//! The extended pose group and its block extension with extra rotations.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};

use super::so3::{so3_exp, so3_hat, so3_left_jacobian, so3_left_jacobian_inv, so3_log, Rot3};

/// One rotation and an ordered list of 2+K vectors (velocity, position and K
/// feature positions). Embeds as the (5+K)×(5+K) matrix with unit diagonal
/// tail.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPose {
    pub rot: Rot3,
    pub vectors: Vec<Vector3<f64>>,
}

impl ExtendedPose {
    pub fn identity(n_vectors: usize) -> Self {
        ExtendedPose { rot: Rot3::identity(), vectors: vec![Vector3::zeros(); n_vectors] }
    }

    pub fn embed(&self) -> DMatrix<f64> {
        let n = 3 + self.vectors.len();
        let mut m = DMatrix::identity(n, n);
        m.view_mut((0, 0), (3, 3)).copy_from(self.rot.matrix());
        for (i, v) in self.vectors.iter().enumerate() {
            m.view_mut((0, 3 + i), (3, 1)).copy_from(v);
        }
        m
    }
}

/// Element of the block group: one extended pose over 2+K+M vectors plus M
/// extra rotations on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub block1: ExtendedPose,
    pub block2: Vec<Rot3>,
}

/// Tangent vector in the block ordering: head rotation, then one 3-vector
/// per extended-pose vector slot, then one 3-vector per extra rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub head_rot: Vector3<f64>,
    pub vectors: Vec<Vector3<f64>>,
    pub extra_rots: Vec<Vector3<f64>>,
}

impl TangentVector {
    pub fn zeros(k: usize, m: usize) -> Self {
        TangentVector {
            head_rot: Vector3::zeros(),
            vectors: vec![Vector3::zeros(); 2 + k + m],
            extra_rots: vec![Vector3::zeros(); m],
        }
    }

    pub fn dim(&self) -> usize {
        3 * (1 + self.vectors.len() + self.extra_rots.len())
    }

    pub fn as_dvector(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        out.fixed_rows_mut::<3>(0).copy_from(&self.head_rot);
        for (i, v) in self.vectors.iter().enumerate() {
            out.fixed_rows_mut::<3>(3 + 3 * i).copy_from(v);
        }
        let base = 3 + 3 * self.vectors.len();
        for (i, v) in self.extra_rots.iter().enumerate() {
            out.fixed_rows_mut::<3>(base + 3 * i).copy_from(v);
        }
        out
    }

    pub fn from_dvector(xi: &DVector<f64>, k: usize, m: usize) -> Result<Self> {
        let expected = 3 * (3 + k + 2 * m);
        if xi.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: xi.len(), what: "tangent vector" });
        }
        let mut out = TangentVector::zeros(k, m);
        out.head_rot = xi.fixed_rows::<3>(0).into_owned();
        for i in 0..(2 + k + m) {
            out.vectors[i] = xi.fixed_rows::<3>(3 + 3 * i).into_owned();
        }
        let base = 3 + 3 * (2 + k + m);
        for i in 0..m {
            out.extra_rots[i] = xi.fixed_rows::<3>(base + 3 * i).into_owned();
        }
        Ok(out)
    }

    /// The algebra embedding: skew head block with the vectors alongside,
    /// zero rows below, and the extra skew blocks on the diagonal tail.
    pub fn hat(&self) -> DMatrix<f64> {
        let nv = self.vectors.len();
        let m = self.extra_rots.len();
        let n1 = 3 + nv;
        let n = n1 + 3 * m;
        let mut out = DMatrix::zeros(n, n);
        out.view_mut((0, 0), (3, 3)).copy_from(&so3_hat(&self.head_rot));
        for (i, v) in self.vectors.iter().enumerate() {
            out.view_mut((0, 3 + i), (3, 1)).copy_from(v);
        }
        for (i, w) in self.extra_rots.iter().enumerate() {
            out.view_mut((n1 + 3 * i, n1 + 3 * i), (3, 3)).copy_from(&so3_hat(w));
        }
        out
    }
}

impl GroupElement {
    /// Identity with K feature slots and M extra rotations.
    pub fn identity(k: usize, m: usize) -> Self {
        GroupElement {
            block1: ExtendedPose::identity(2 + k + m),
            block2: vec![Rot3::identity(); m],
        }
    }

    pub fn n_extra(&self) -> usize {
        self.block2.len()
    }

    /// Number of feature slots implied by the vector count.
    pub fn k(&self) -> usize {
        self.block1.vectors.len() - 2 - self.block2.len()
    }

    pub fn dof(&self) -> usize {
        3 * (1 + self.block1.vectors.len() + self.block2.len())
    }

    fn check_compatible(&self, other: &GroupElement) -> Result<()> {
        if self.block1.vectors.len() != other.block1.vectors.len()
            || self.block2.len() != other.block2.len()
        {
            return Err(Error::DimensionMismatch {
                expected: self.dof(),
                got: other.dof(),
                what: "group element shape",
            });
        }
        Ok(())
    }

    /// Dense block-diagonal embedding; test/debug use only.
    pub fn embed(&self) -> DMatrix<f64> {
        let n1 = 3 + self.block1.vectors.len();
        let n = n1 + 3 * self.block2.len();
        let mut out = DMatrix::identity(n, n);
        out.view_mut((0, 0), (n1, n1)).copy_from(&self.block1.embed());
        for (i, r) in self.block2.iter().enumerate() {
            out.view_mut((n1 + 3 * i, n1 + 3 * i), (3, 3)).copy_from(r.matrix());
        }
        out
    }

    /// Matrix product of the embeddings, computed in structured form.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_compatible(other)?;
        let rot = self.block1.rot * other.block1.rot;
        let vectors = self
            .block1
            .vectors
            .iter()
            .zip(&other.block1.vectors)
            .map(|(a, b)| &self.block1.rot * b + a)
            .collect();
        let block2 = self.block2.iter().zip(&other.block2).map(|(a, b)| *a * *b).collect();
        Ok(GroupElement { block1: ExtendedPose { rot, vectors }, block2 })
    }

    pub fn inverse(&self) -> GroupElement {
        let rot_inv = self.block1.rot.inverse();
        let vectors = self.block1.vectors.iter().map(|v| -(&rot_inv * v)).collect();
        GroupElement {
            block1: ExtendedPose { rot: rot_inv, vectors },
            block2: self.block2.iter().map(|r| r.inverse()).collect(),
        }
    }

    /// Adjoint matrix over the tangent ordering. Diagonal carries the head
    /// rotation (and the extra rotations at the tail); each vector slot adds
    /// a `(v)×R` block against the head rotation column.
    pub fn adjoint(&self) -> DMatrix<f64> {
        let nv = self.block1.vectors.len();
        let m = self.block2.len();
        let dim = 3 * (1 + nv + m);
        let mut out = DMatrix::zeros(dim, dim);
        let r = self.block1.rot.matrix();
        out.view_mut((0, 0), (3, 3)).copy_from(r);
        for (i, v) in self.block1.vectors.iter().enumerate() {
            let row = 3 + 3 * i;
            out.view_mut((row, 0), (3, 3)).copy_from(&(so3_hat(v) * r));
            out.view_mut((row, row), (3, 3)).copy_from(r);
        }
        let base = 3 + 3 * nv;
        for (i, rot) in self.block2.iter().enumerate() {
            let row = base + 3 * i;
            out.view_mut((row, row), (3, 3)).copy_from(rot.matrix());
        }
        out
    }
}

/// Group exponential. The block-diagonal algebra factorizes: the extended
/// pose block takes the closed form with the SO(3) left Jacobian on each
/// vector slot, each extra rotation exponentiates independently.
pub fn group_exp(xi: &TangentVector) -> GroupElement {
    let rot = so3_exp(&xi.head_rot);
    let jl = so3_left_jacobian(&xi.head_rot);
    let vectors = xi.vectors.iter().map(|v| jl * v).collect();
    let block2 = xi.extra_rots.iter().map(so3_exp).collect();
    GroupElement { block1: ExtendedPose { rot, vectors }, block2 }
}

/// Inverse of [`group_exp`], blockwise.
pub fn group_log(x: &GroupElement) -> Result<TangentVector> {
    let head_rot = so3_log(&x.block1.rot)?;
    let jl_inv = so3_left_jacobian_inv(&head_rot);
    let vectors = x.block1.vectors.iter().map(|v| jl_inv * v).collect();
    let extra_rots = x.block2.iter().map(so3_log).collect::<Result<Vec<_>>>()?;
    Ok(TangentVector { head_rot, vectors, extra_rots })
}
