//! Built-in stick-figure template with the canonical 24-joint parent ordering
//! and anthropometric segment lengths, plus a low-vertex proxy mesh. Used
//! whenever no model file is supplied; vertex-based operations run on the
//! proxy mesh. The frame is z-up, the body faces +x, and +y is the body's
//! left.

use super::{BodyModel, FootGeometry, JointIds, Mesh, NUM_JOINTS};

pub const JOINT_NAMES: [&str; NUM_JOINTS] = [
    "pelvis",
    "hip_l",
    "hip_r",
    "spine1",
    "knee_l",
    "knee_r",
    "spine2",
    "ankle_l",
    "ankle_r",
    "spine3",
    "foot_l",
    "foot_r",
    "neck",
    "collar_l",
    "collar_r",
    "head",
    "shoulder_l",
    "shoulder_r",
    "elbow_l",
    "elbow_r",
    "wrist_l",
    "wrist_r",
    "hand_l",
    "hand_r",
];

pub const PARENTS: [i32; NUM_JOINTS] = [
    -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21,
];

/// Rest-pose (T-pose) joint positions in meters. The ankle and toe joints sit
/// at the same height so that a flat foot has zero pitch, and the heel
/// reference point touches z = 0 in the rest pose.
pub const REST_JOINTS: [[f64; 3]; NUM_JOINTS] = [
    [0.000, 0.000, 0.950],  // pelvis
    [0.000, 0.090, 0.900],  // hip_l
    [0.000, -0.090, 0.900], // hip_r
    [0.000, 0.000, 1.050],  // spine1
    [0.000, 0.090, 0.480],  // knee_l
    [0.000, -0.090, 0.480], // knee_r
    [0.000, 0.000, 1.160],  // spine2
    [0.000, 0.090, 0.080],  // ankle_l
    [0.000, -0.090, 0.080], // ankle_r
    [0.000, 0.000, 1.280],  // spine3
    [0.160, 0.090, 0.080],  // foot_l (toe)
    [0.160, -0.090, 0.080], // foot_r (toe)
    [0.000, 0.000, 1.450],  // neck
    [0.000, 0.080, 1.400],  // collar_l
    [0.000, -0.080, 1.400], // collar_r
    [0.000, 0.000, 1.600],  // head
    [0.000, 0.180, 1.420],  // shoulder_l
    [0.000, -0.180, 1.420], // shoulder_r
    [0.000, 0.460, 1.420],  // elbow_l
    [0.000, -0.460, 1.420], // elbow_r
    [0.000, 0.720, 1.420],  // wrist_l
    [0.000, -0.720, 1.420], // wrist_r
    [0.000, 0.810, 1.420],  // hand_l
    [0.000, -0.810, 1.420], // hand_r
];

pub const JOINT_IDS: JointIds = JointIds {
    hip: [1, 2],
    knee: [4, 5],
    ankle: [7, 8],
    toe: [10, 11],
    shoulder: [16, 17],
    elbow: [18, 19],
};

const TUBE_RADIUS: f64 = 0.03;
const RING_SIDES: usize = 4;

/// The built-in template, with a proxy mesh of tube segments along each bone.
/// Skinning weights are nonzero on at most the two joints bounding a bone.
pub fn builtin() -> BodyModel {
    let foot_len = 0.160; // rest ankle→toe distance
    let foot = FootGeometry {
        length: [foot_len, foot_len],
        width: [0.4 * foot_len, 0.4 * foot_len],
        // Heel: slightly behind and below the ankle, on the ground at rest.
        heel_local: [[-0.060, 0.0, -0.080], [-0.060, 0.0, -0.080]],
    };

    let mut model = BodyModel {
        rest_joints: REST_JOINTS.to_vec(),
        parents: PARENTS.to_vec(),
        joint_names: JOINT_NAMES.iter().map(|s| s.to_string()).collect(),
        ids: JOINT_IDS,
        foot,
        mesh: None,
    };
    model.mesh = Some(proxy_mesh(&model));
    model
}

/// Orthonormal basis perpendicular to `axis`, chosen deterministically.
fn ring_basis(axis: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pick = if axis[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [1.0, 0.0, 0.0]
    };
    let mut u = [
        axis[1] * pick[2] - axis[2] * pick[1],
        axis[2] * pick[0] - axis[0] * pick[2],
        axis[0] * pick[1] - axis[1] * pick[0],
    ];
    let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    for c in &mut u {
        *c /= n;
    }
    let v = [
        axis[1] * u[2] - axis[2] * u[1],
        axis[2] * u[0] - axis[0] * u[2],
        axis[0] * u[1] - axis[1] * u[0],
    ];
    (u, v)
}

fn proxy_mesh(model: &BodyModel) -> Mesh {
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut weights: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    // Regressor source ring per joint (a full ring centered on the joint).
    let mut joint_ring: Vec<Option<Vec<usize>>> = vec![None; NUM_JOINTS];

    for child in 1..NUM_JOINTS {
        let parent = model.parents[child] as usize;
        let a = model.rest_joints[parent];
        let b = model.rest_joints[child];
        let mut axis = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        for c in &mut axis {
            *c /= len;
        }
        let (u, v) = ring_basis(axis);

        let mut ring_starts = Vec::new();
        for (station, frac) in [0.0, 0.5, 1.0].iter().enumerate() {
            let center = [
                a[0] + (b[0] - a[0]) * frac,
                a[1] + (b[1] - a[1]) * frac,
                a[2] + (b[2] - a[2]) * frac,
            ];
            ring_starts.push(vertices.len());
            for k in 0..RING_SIDES {
                let ang = 2.0 * std::f64::consts::PI * (k as f64) / (RING_SIDES as f64);
                let (c, s) = (ang.cos() * TUBE_RADIUS, ang.sin() * TUBE_RADIUS);
                vertices.push([
                    center[0] + c * u[0] + s * v[0],
                    center[1] + c * u[1] + s * v[1],
                    center[2] + c * u[2] + s * v[2],
                ]);
                // The bone parent→child is rigid in the parent joint's frame;
                // the far cap blends into the child joint.
                weights.push(if station == 2 {
                    vec![(parent, 0.5), (child, 0.5)]
                } else {
                    vec![(parent, 1.0)]
                });
            }
        }
        // Quads between consecutive rings, split into triangles.
        for w in ring_starts.windows(2) {
            let (r0, r1) = (w[0] as u32, w[1] as u32);
            for k in 0..RING_SIDES as u32 {
                let k1 = (k + 1) % RING_SIDES as u32;
                faces.push([r0 + k, r1 + k, r1 + k1]);
                faces.push([r0 + k, r1 + k1, r0 + k1]);
            }
        }
        let cap0: Vec<usize> = (ring_starts[0]..ring_starts[0] + RING_SIDES).collect();
        let cap1: Vec<usize> = (ring_starts[2]..ring_starts[2] + RING_SIDES).collect();
        if joint_ring[parent].is_none() {
            joint_ring[parent] = Some(cap0);
        }
        joint_ring[child] = Some(cap1);
    }

    // Heel vertices, rigid in the ankle frame, sitting on the ground at rest.
    let mut heel_vertex = [0usize; 2];
    for (side, &ankle) in model.ids.ankle.iter().enumerate() {
        let rest = model.rest_joints[ankle];
        let off = model.foot.heel_local[side];
        heel_vertex[side] = vertices.len();
        vertices.push([rest[0] + off[0], rest[1] + off[1], rest[2] + off[2]]);
        weights.push(vec![(ankle, 1.0)]);
    }

    // A full ring centered on a joint averages exactly to the joint.
    let regressor: Vec<Vec<(usize, f64)>> = joint_ring
        .into_iter()
        .map(|ring| {
            let ring = ring.expect("every joint bounds at least one bone");
            let w = 1.0 / ring.len() as f64;
            ring.into_iter().map(|v| (v, w)).collect()
        })
        .collect();

    Mesh {
        rest_vertices: vertices,
        skin_weights: weights,
        faces,
        joint_regressor: Some(regressor),
        heel_vertex: Some(heel_vertex),
    }
}
