//! Articulated-body mathematics: the 24-joint kinematic tree, axis-angle
//! rotations, optional linear-blend-skinned mesh, and the derived geometric
//! quantities (leg/shoulder symmetry angles, foot-to-ground clearance)
//! consumed by the training objective and the evaluation metrics.
//!
//! All operations are pure functions of their inputs; a [`BodyModel`] is
//! immutable after load and safe to share across threads.

pub mod file;
pub mod math;
pub mod obj;
pub mod template;

use crate::autodiff::Real;
use crate::error::{Error, Result};
use math::{rodrigues_generic, Mat3, Vec3};
use serde::{Deserialize, Serialize};

pub const NUM_JOINTS: usize = 24;
pub const POSE_DIM: usize = 3 * NUM_JOINTS;
pub const SHAPE_DIM: usize = 10;
/// Translation (3) + pose (72) + shape (10).
pub const STATE_DIM: usize = 3 + POSE_DIM + SHAPE_DIM;

/// One pedestrian at one frame: global translation in meters, per-joint
/// axis-angle pose in radians (joint 0 is the root orientation), and
/// dimensionless shape coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyState {
    pub trans: [f64; 3],
    pub pose: Vec<f64>,
    pub shape: Vec<f64>,
}

impl BodyState {
    pub fn new(trans: [f64; 3], pose: Vec<f64>, shape: Vec<f64>) -> Result<Self> {
        if pose.len() != POSE_DIM {
            return Err(Error::DimensionMismatch {
                what: "pose",
                expected: POSE_DIM,
                got: pose.len(),
            });
        }
        if shape.len() != SHAPE_DIM {
            return Err(Error::DimensionMismatch {
                what: "shape",
                expected: SHAPE_DIM,
                got: shape.len(),
            });
        }
        Ok(BodyState { trans, pose, shape })
    }

    pub fn zero() -> Self {
        BodyState {
            trans: [0.0; 3],
            pose: vec![0.0; POSE_DIM],
            shape: vec![0.0; SHAPE_DIM],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.trans.iter().all(|v| v.is_finite())
            && self.pose.iter().all(|v| v.is_finite())
            && self.shape.iter().all(|v| v.is_finite())
    }

    /// Axis-angle triple of one joint.
    pub fn joint_pose(&self, joint: usize) -> [f64; 3] {
        [
            self.pose[3 * joint],
            self.pose[3 * joint + 1],
            self.pose[3 * joint + 2],
        ]
    }
}

/// Body side, used to index per-foot data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left = 0,
    Right = 1,
}

pub const SIDES: [Side; 2] = [Side::Left, Side::Right];

/// Named joint indices into the 24-joint tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointIds {
    pub hip: [usize; 2],
    pub knee: [usize; 2],
    pub ankle: [usize; 2],
    pub toe: [usize; 2],
    pub shoulder: [usize; 2],
    pub elbow: [usize; 2],
}

/// Foot geometry estimated from the rest pose. `heel_local[side]` is the heel
/// reference point expressed in the ankle joint frame; with a loaded mesh it
/// is derived from the designated heel vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootGeometry {
    pub length: [f64; 2],
    pub width: [f64; 2],
    pub heel_local: [[f64; 3]; 2],
}

/// Optional mesh: rest vertices, sparse row-stochastic skinning weights,
/// triangle faces, an optional joint regressor, and designated heel vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub rest_vertices: Vec<[f64; 3]>,
    /// Per vertex: (joint index, weight) pairs; each row sums to 1 within 1e-6.
    pub skin_weights: Vec<Vec<(usize, f64)>>,
    pub faces: Vec<[u32; 3]>,
    /// Per joint: (vertex index, weight) pairs regressing the joint location
    /// from mesh vertices.
    pub joint_regressor: Option<Vec<Vec<(usize, f64)>>>,
    pub heel_vertex: Option<[usize; 2]>,
}

/// Kinematic template: rest skeleton, parent tree, named joints, foot
/// geometry, and an optional skinned mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyModel {
    pub rest_joints: Vec<[f64; 3]>,
    /// Parent index per joint; the root carries -1. Topologically ordered:
    /// every non-root parent index is smaller than the joint's own index.
    pub parents: Vec<i32>,
    pub joint_names: Vec<String>,
    pub ids: JointIds,
    pub foot: FootGeometry,
    pub mesh: Option<Mesh>,
}

impl BodyModel {
    /// Structural invariants: tree ordering, weight rows, foot dimensions.
    pub fn validate(&self) -> Result<()> {
        if self.rest_joints.len() != NUM_JOINTS || self.parents.len() != NUM_JOINTS {
            return Err(Error::ModelInvalid(format!(
                "expected {NUM_JOINTS} joints, got {} rest joints / {} parents",
                self.rest_joints.len(),
                self.parents.len()
            )));
        }
        if self.parents[0] != -1 {
            return Err(Error::ModelInvalid("joint 0 must be the root".into()));
        }
        for (j, &p) in self.parents.iter().enumerate().skip(1) {
            if p < 0 || p as usize >= j {
                return Err(Error::ModelInvalid(format!(
                    "joint {j} has parent {p}; parents must precede children"
                )));
            }
        }
        for side in 0..2 {
            if self.foot.length[side] <= 0.0 || self.foot.width[side] <= 0.0 {
                return Err(Error::ModelInvalid(
                    "foot length and width must be positive".into(),
                ));
            }
        }
        if let Some(mesh) = &self.mesh {
            for (v, row) in mesh.skin_weights.iter().enumerate() {
                let sum: f64 = row.iter().map(|(_, w)| w).sum();
                if (sum - 1.0).abs() > 1e-6 || row.iter().any(|&(j, w)| j >= NUM_JOINTS || w < 0.0)
                {
                    return Err(Error::ModelInvalid(format!(
                        "skin weight row {v} is not row-stochastic (sum {sum})"
                    )));
                }
            }
            if mesh.skin_weights.len() != mesh.rest_vertices.len() {
                return Err(Error::ModelInvalid(
                    "skin weight rows must match vertex count".into(),
                ));
            }
            if let Some(hv) = mesh.heel_vertex {
                if hv.iter().any(|&v| v >= mesh.rest_vertices.len()) {
                    return Err(Error::ModelInvalid("heel vertex out of range".into()));
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> Option<usize> {
        self.mesh.as_ref().map(|m| m.rest_vertices.len())
    }
}

/// Materialized forward-kinematics output: global joint positions, global
/// joint rotations, and optionally the skinned mesh vertices.
#[derive(Debug, Clone)]
pub struct PosedBody {
    pub joints: Vec<[f64; 3]>,
    pub joint_rotations: Vec<[[f64; 3]; 3]>,
    pub vertices: Option<Vec<[f64; 3]>>,
}

/// Rotation matrix of an axis-angle vector. The zero vector maps to the
/// identity by continuity.
pub fn rodrigues(axis_angle: &[f64; 3]) -> [[f64; 3]; 3] {
    rodrigues_generic(axis_angle).values()
}

/// Global joint positions and rotations, generic over plain and taped scalars.
/// Positions are model-local plus `trans` (the root joint sits at its rest
/// location plus the global translation).
pub(crate) fn fk_generic<R: Real>(
    ctx: R,
    trans: &Vec3<R>,
    pose: &[R],
    model: &BodyModel,
) -> (Vec<Vec3<R>>, Vec<Mat3<R>>) {
    debug_assert_eq!(pose.len(), POSE_DIM);
    let mut rots: Vec<Mat3<R>> = Vec::with_capacity(NUM_JOINTS);
    let mut pos: Vec<Vec3<R>> = Vec::with_capacity(NUM_JOINTS);
    for j in 0..NUM_JOINTS {
        let local = rodrigues_generic(&[pose[3 * j], pose[3 * j + 1], pose[3 * j + 2]]);
        if j == 0 {
            rots.push(local);
            pos.push(Vec3::lift(ctx, model.rest_joints[0]).add(trans));
        } else {
            let p = model.parents[j] as usize;
            let offset = [
                model.rest_joints[j][0] - model.rest_joints[p][0],
                model.rest_joints[j][1] - model.rest_joints[p][1],
                model.rest_joints[j][2] - model.rest_joints[p][2],
            ];
            let rotated = rots[p].mul_vec(&Vec3::lift(ctx, offset));
            pos.push(pos[p].add(&rotated));
            rots.push(rots[p].mul(&local));
        }
    }
    (pos, rots)
}

/// Poses the body. With `include_mesh` set, vertices are produced by linear
/// blend skinning of the rest vertices with the global joint transforms.
pub fn forward_kinematics(
    state: &BodyState,
    model: &BodyModel,
    include_mesh: bool,
) -> Result<PosedBody> {
    if state.pose.len() != POSE_DIM {
        return Err(Error::DimensionMismatch {
            what: "pose",
            expected: POSE_DIM,
            got: state.pose.len(),
        });
    }
    let trans = Vec3(state.trans);
    let (pos, rots) = fk_generic(0.0f64, &trans, &state.pose, model);
    let joints: Vec<[f64; 3]> = pos.iter().map(|p| p.values()).collect();
    let joint_rotations: Vec<[[f64; 3]; 3]> = rots.iter().map(|r| r.values()).collect();

    let vertices = if include_mesh {
        let mesh = model.mesh.as_ref().ok_or(Error::MeshUnavailable)?;
        let mut verts = Vec::with_capacity(mesh.rest_vertices.len());
        for (v, row) in mesh.rest_vertices.iter().zip(&mesh.skin_weights) {
            let mut out = [0.0; 3];
            for &(j, w) in row {
                let rest_j = model.rest_joints[j];
                let local = [v[0] - rest_j[0], v[1] - rest_j[1], v[2] - rest_j[2]];
                let r = &joint_rotations[j];
                for axis in 0..3 {
                    let rotated = r[axis][0] * local[0] + r[axis][1] * local[1] + r[axis][2] * local[2];
                    out[axis] += w * (rotated + joints[j][axis]);
                }
            }
            verts.push(out);
        }
        Some(verts)
    } else {
        None
    };

    Ok(PosedBody {
        joints,
        joint_rotations,
        vertices,
    })
}

/// Signed symmetry angles of Eq.-style leg/arm segments, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegShoulderAngles {
    pub leg: [f64; 2],
    pub shoulder: [f64; 2],
}

pub(crate) struct AnglesGeneric<R> {
    pub leg: [R; 2],
    pub shoulder: [R; 2],
}

/// Signed angle between a segment and the downward vertical, measured in the
/// body's frontal plane; positive toward the body's left. The frontal plane
/// is spanned by the global up axis and the root rotation's lateral axis.
pub(crate) fn leg_shoulder_angles_generic<R: Real>(
    ctx: R,
    joints: &[Vec3<R>],
    root_rot: &Mat3<R>,
    ids: &JointIds,
) -> Result<AnglesGeneric<R>> {
    // Lateral (leftward) axis of the body, projected into the horizontal plane.
    let lat_raw = root_rot.mul_vec(&Vec3::lift(ctx, [0.0, 1.0, 0.0]));
    let horiz = Vec3([lat_raw.x(), lat_raw.y(), ctx.lift(0.0)]);
    let horiz_norm = horiz.norm();
    if horiz_norm.value() < 1e-6 {
        return Err(Error::DegenerateSegment {
            what: "frontal-plane lateral axis",
            len: horiz_norm.value(),
        });
    }
    let lat = horiz.scale_by(ctx.lift(1.0) / horiz_norm);

    let signed = |from: usize, to: usize, what: &'static str| -> Result<R> {
        let seg = joints[to].sub(&joints[from]);
        let len = seg.norm();
        if len.value() < 1e-6 {
            return Err(Error::DegenerateSegment {
                what,
                len: len.value(),
            });
        }
        // u: leftward component, v: downward component.
        let u = seg.dot(&lat);
        let v = -seg.z();
        Ok(u.atan2(v))
    };

    Ok(AnglesGeneric {
        leg: [
            signed(ids.hip[0], ids.knee[0], "left hip-knee")?,
            signed(ids.hip[1], ids.knee[1], "right hip-knee")?,
        ],
        shoulder: [
            signed(ids.shoulder[0], ids.elbow[0], "left shoulder-elbow")?,
            signed(ids.shoulder[1], ids.elbow[1], "right shoulder-elbow")?,
        ],
    })
}

/// Frontal-plane symmetry angles of the posed body. Legs use hip→knee,
/// arms shoulder→elbow; signs are positive toward the body's left.
pub fn leg_shoulder_angles(posed: &PosedBody, ids: &JointIds) -> Result<LegShoulderAngles> {
    let joints: Vec<Vec3<f64>> = posed.joints.iter().map(|&p| Vec3(p)).collect();
    let root = Mat3(posed.joint_rotations[0]);
    let a = leg_shoulder_angles_generic(0.0f64, &joints, &root, ids)?;
    Ok(LegShoulderAngles {
        leg: a.leg,
        shoulder: a.shoulder,
    })
}

/// Per-foot ground clearance: `d` is the signed heel height above the ground
/// plane, `alpha` the signed pitch of the ankle→toe segment (positive when
/// the toe is above the heel-end of the foot line).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootClearance {
    pub d: f64,
    pub alpha: f64,
}

pub(crate) struct ClearanceGeneric<R> {
    pub d: R,
    pub alpha: R,
}

pub(crate) fn foot_clearance_generic<R: Real>(
    ctx: R,
    joints: &[Vec3<R>],
    rots: &[Mat3<R>],
    model: &BodyModel,
    ground_z: f64,
    side: Side,
) -> Result<ClearanceGeneric<R>> {
    let s = side as usize;
    let ankle = joints[model.ids.ankle[s]];
    let toe = joints[model.ids.toe[s]];
    let seg = toe.sub(&ankle);
    let len = seg.norm();
    if len.value() < 1e-6 {
        return Err(Error::DegenerateSegment {
            what: "ankle-toe",
            len: len.value(),
        });
    }
    let heel_local = Vec3::lift(ctx, model.foot.heel_local[s]);
    let heel = rots[model.ids.ankle[s]].mul_vec(&heel_local).add(&ankle);
    let d = heel.z() - ctx.lift(ground_z);
    let horiz = (seg.x() * seg.x() + seg.y() * seg.y()).sqrt();
    let alpha = seg.z().atan2(horiz);
    Ok(ClearanceGeneric { d, alpha })
}

/// Heel height and foot pitch for both feet relative to the plane at
/// `ground_z`. The heel reference point rides rigidly in the ankle frame.
pub fn foot_clearance(
    posed: &PosedBody,
    model: &BodyModel,
    ground_z: f64,
) -> Result<[FootClearance; 2]> {
    let joints: Vec<Vec3<f64>> = posed.joints.iter().map(|&p| Vec3(p)).collect();
    let rots: Vec<Mat3<f64>> = posed.joint_rotations.iter().map(|&r| Mat3(r)).collect();
    let mut out = [FootClearance { d: 0.0, alpha: 0.0 }; 2];
    for side in SIDES {
        let c = foot_clearance_generic(0.0f64, &joints, &rots, model, ground_z, side)?;
        out[side as usize] = FootClearance {
            d: c.d,
            alpha: c.alpha,
        };
    }
    Ok(out)
}

/// Left/right joint pairs of the canonical 24-joint tree.
pub const MIRROR_PAIRS: [(usize, usize); 9] = [
    (1, 2),
    (4, 5),
    (7, 8),
    (10, 11),
    (13, 14),
    (16, 17),
    (18, 19),
    (20, 21),
    (22, 23),
];

fn mirror_joint(j: usize) -> usize {
    for (l, r) in MIRROR_PAIRS {
        if j == l {
            return r;
        }
        if j == r {
            return l;
        }
    }
    j
}

/// Reflects a pose across the body's sagittal plane: left/right joints swap
/// and each axis-angle (x, y, z) maps to (-x, y, -z).
pub fn mirror_pose(pose: &[f64]) -> Vec<f64> {
    debug_assert_eq!(pose.len(), POSE_DIM);
    let mut out = vec![0.0; POSE_DIM];
    for j in 0..NUM_JOINTS {
        let src = mirror_joint(j);
        out[3 * j] = -pose[3 * src];
        out[3 * j + 1] = pose[3 * src + 1];
        out[3 * j + 2] = -pose[3 * src + 2];
    }
    out
}

/// Mirrored body state: pose reflected, lateral translation negated.
pub fn mirror_state(state: &BodyState) -> BodyState {
    BodyState {
        trans: [state.trans[0], -state.trans[1], state.trans[2]],
        pose: mirror_pose(&state.pose),
        shape: state.shape.clone(),
    }
}

/// Max deviation of RᵀR from the identity, for rotation sanity checks.
pub fn orthonormality_defect(r: &[[f64; 3]; 3]) -> f64 {
    let mut defect: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut dot = 0.0;
            for k in 0..3 {
                dot += r[k][i] * r[k][j];
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((dot - expect).abs());
        }
    }
    defect
}

#[cfg(test)]
mod tests;
