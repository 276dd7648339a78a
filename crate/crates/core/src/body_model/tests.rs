use super::*;
use crate::body_model::template::builtin;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

/// Independent quaternion rotation oracle (scalar-first).
mod quat {
    pub fn from_axis_angle(aa: &[f64; 3]) -> [f64; 4] {
        let theta = (aa[0] * aa[0] + aa[1] * aa[1] + aa[2] * aa[2]).sqrt();
        if theta < 1e-12 {
            return [1.0, 0.0, 0.0, 0.0];
        }
        let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        [c, s * aa[0] / theta, s * aa[1] / theta, s * aa[2] / theta]
    }

    pub fn mul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    }

    pub fn to_matrix(q: &[f64; 4]) -> [[f64; 3]; 3] {
        let [w, x, y, z] = *q;
        [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - z * w),
                2.0 * (x * z + y * w),
            ],
            [
                2.0 * (x * y + z * w),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - x * w),
            ],
            [
                2.0 * (x * z - y * w),
                2.0 * (y * z + x * w),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]
    }
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn max_diff(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

#[test]
fn rodrigues_composition_matches_quaternion_oracle() {
    let cases = [
        ([0.3, -0.2, 0.9], [0.1, 0.5, -0.4]),
        ([1.7, 0.0, 0.2], [-0.6, 1.1, 0.3]),
        ([0.0, 0.0, 0.0], [2.5, -1.0, 0.7]),
    ];
    for (a, b) in cases {
        let composed = mat_mul(&rodrigues(&a), &rodrigues(&b));
        let q = quat::mul(&quat::from_axis_angle(&a), &quat::from_axis_angle(&b));
        assert!(max_diff(&composed, &quat::to_matrix(&q)) < 1e-9);
    }
}

#[test]
fn identity_fk_reproduces_rest_joints() {
    let model = builtin();
    let posed = forward_kinematics(&BodyState::zero(), &model, false).unwrap();
    for (joint, rest) in posed.joints.iter().zip(&model.rest_joints) {
        for axis in 0..3 {
            assert_eq!(joint[axis], rest[axis]);
        }
    }
    for rot in &posed.joint_rotations {
        assert!(orthonormality_defect(rot) < 1e-9);
    }
}

#[test]
fn pure_translation_shifts_all_joints() {
    let model = builtin();
    let mut state = BodyState::zero();
    state.trans = [1.0, 2.0, 3.0];
    let posed = forward_kinematics(&state, &model, true).unwrap();
    for (joint, rest) in posed.joints.iter().zip(&model.rest_joints) {
        for axis in 0..3 {
            assert!((joint[axis] - (rest[axis] + state.trans[axis])).abs() < 1e-12);
        }
    }
    let mesh = model.mesh.as_ref().unwrap();
    for (v, rest) in posed.vertices.as_ref().unwrap().iter().zip(&mesh.rest_vertices) {
        for axis in 0..3 {
            assert!((v[axis] - (rest[axis] + state.trans[axis])).abs() < 1e-9);
        }
    }
}

#[test]
fn knee_bend_places_ankle_by_two_link_arithmetic() {
    // Bend the left knee 90 degrees about the lateral axis. The shank
    // (0, 0, -0.40) rotates to (-0.40, 0, 0), so the ankle lands at
    // knee + (-0.40, 0, 0); hand two-link forward kinematics.
    let model = builtin();
    let mut state = BodyState::zero();
    state.pose[3 * 4 + 1] = FRAC_PI_2; // left knee, y axis
    let posed = forward_kinematics(&state, &model, false).unwrap();
    let knee = model.rest_joints[4];
    let expected = [knee[0] - 0.40, knee[1], knee[2]];
    for axis in 0..3 {
        assert!(
            (posed.joints[7][axis] - expected[axis]).abs() < 1e-12,
            "axis {axis}: {} vs {}",
            posed.joints[7][axis],
            expected[axis]
        );
    }
}

#[test]
fn mesh_unavailable_without_mesh() {
    let mut model = builtin();
    model.mesh = None;
    let err = forward_kinematics(&BodyState::zero(), &model, true);
    assert!(matches!(err, Err(Error::MeshUnavailable)));
}

#[test]
fn skinning_at_identity_reproduces_rest_vertices() {
    let model = builtin();
    let posed = forward_kinematics(&BodyState::zero(), &model, true).unwrap();
    let mesh = model.mesh.as_ref().unwrap();
    for (v, rest) in posed.vertices.as_ref().unwrap().iter().zip(&mesh.rest_vertices) {
        for axis in 0..3 {
            assert!((v[axis] - rest[axis]).abs() < 1e-9);
        }
    }
}

#[test]
fn rest_pose_legs_are_mirrored() {
    let model = builtin();
    let posed = forward_kinematics(&BodyState::zero(), &model, false).unwrap();
    let a = leg_shoulder_angles(&posed, &model.ids).unwrap();
    assert!((a.leg[0] + a.leg[1]).abs() < 1e-12);
    assert!((a.shoulder[0] + a.shoulder[1]).abs() < 1e-12);
}

#[test]
fn abducted_left_leg_reads_plus_ten_degrees() {
    let model = builtin();
    let mut state = BodyState::zero();
    let ten_deg = 10.0 * PI / 180.0;
    state.pose[3 * 1] = ten_deg; // left hip about the forward axis
    let posed = forward_kinematics(&state, &model, false).unwrap();
    let a = leg_shoulder_angles(&posed, &model.ids).unwrap();
    // Planar check: rotating (0, 0, -1) about +x by phi tilts it to
    // (0, sin phi, -cos phi), an angle of exactly phi toward the left.
    assert!((a.leg[0] - ten_deg).abs() < 1e-12);
    assert!(a.leg[1].abs() < 1e-12);
}

#[test]
fn hanging_arms_cancel() {
    let model = builtin();
    let mut state = BodyState::zero();
    state.pose[3 * 16] = -FRAC_PI_2; // left shoulder down
    state.pose[3 * 17] = FRAC_PI_2; // right shoulder down
    let posed = forward_kinematics(&state, &model, false).unwrap();
    let a = leg_shoulder_angles(&posed, &model.ids).unwrap();
    assert!((a.shoulder[0] + a.shoulder[1]).abs() < 1e-12);
    assert!(a.shoulder[0].abs() < 1e-12);
}

#[test]
fn angles_follow_root_heading() {
    // Rotating the whole body about z must not change frontal-plane angles.
    let model = builtin();
    let mut state = BodyState::zero();
    state.pose[3 * 1] = 0.2;
    let before = leg_shoulder_angles(
        &forward_kinematics(&state, &model, false).unwrap(),
        &model.ids,
    )
    .unwrap();
    state.pose[2] = 1.1; // root yaw
    let after = leg_shoulder_angles(
        &forward_kinematics(&state, &model, false).unwrap(),
        &model.ids,
    )
    .unwrap();
    for side in 0..2 {
        assert!((before.leg[side] - after.leg[side]).abs() < 1e-12);
        assert!((before.shoulder[side] - after.shoulder[side]).abs() < 1e-12);
    }
}

#[test]
fn degenerate_segment_reported() {
    let mut model = builtin();
    model.rest_joints[4] = model.rest_joints[1]; // knee collapsed onto hip
    let posed = forward_kinematics(&BodyState::zero(), &model, false).unwrap();
    let err = leg_shoulder_angles(&posed, &model.ids);
    assert!(matches!(err, Err(Error::DegenerateSegment { .. })));
}

#[test]
fn flat_foot_has_zero_clearance_and_pitch() {
    let model = builtin();
    let posed = forward_kinematics(&BodyState::zero(), &model, false).unwrap();
    for c in foot_clearance(&posed, &model, 0.0).unwrap() {
        assert!(c.d.abs() < 1e-12);
        assert!(c.alpha.abs() < 1e-12);
    }
}

#[test]
fn raising_the_body_raises_the_heel() {
    let model = builtin();
    let mut state = BodyState::zero();
    state.trans = [0.0, 0.0, 0.05];
    let posed = forward_kinematics(&state, &model, false).unwrap();
    for c in foot_clearance(&posed, &model, 0.0).unwrap() {
        assert!((c.d - 0.05).abs() < 1e-12);
        assert!(c.alpha.abs() < 1e-12);
    }
}

#[test]
fn raised_toe_with_heel_down_gives_thirty_degree_pitch() {
    let model = builtin();
    let mut state = BodyState::zero();
    // Pitch the left ankle so the toe rises 30 degrees.
    state.pose[3 * 7 + 1] = -FRAC_PI_6;
    // Hand-rotate the heel offset by R_y(-pi/6) to find where the heel lands,
    // then lift the body so the heel sits exactly on the ground.
    let (c, s) = (FRAC_PI_6.cos(), -FRAC_PI_6.sin());
    let off = model.foot.heel_local[0];
    let heel_z_local = -s * off[0] + c * off[2];
    let heel_z = model.rest_joints[7][2] + heel_z_local;
    state.trans = [0.0, 0.0, -heel_z];
    let posed = forward_kinematics(&state, &model, false).unwrap();
    let clearance = foot_clearance(&posed, &model, 0.0).unwrap();
    assert!(clearance[0].d.abs() < 1e-12);
    // Independent oracle: pitch from the posed segment endpoints.
    let ankle = posed.joints[model.ids.ankle[0]];
    let toe = posed.joints[model.ids.toe[0]];
    let oracle = (toe[2] - ankle[2])
        .atan2(((toe[0] - ankle[0]).powi(2) + (toe[1] - ankle[1]).powi(2)).sqrt());
    assert!((clearance[0].alpha - FRAC_PI_6).abs() < 1e-12);
    assert!((clearance[0].alpha - oracle).abs() < 1e-12);
}

#[test]
fn mirrored_pose_negates_and_swaps_angles() {
    let model = builtin();
    let mut state = BodyState::zero();
    state.pose[3 * 1] = 0.3; // left hip
    state.pose[3 * 2] = -0.1; // right hip
    state.pose[3 * 16] = -0.7; // left shoulder
    state.pose[3 * 17] = 0.9; // right shoulder
    state.pose[2] = 0.4; // heading
    let a = leg_shoulder_angles(
        &forward_kinematics(&state, &model, false).unwrap(),
        &model.ids,
    )
    .unwrap();
    let mirrored = mirror_state(&state);
    let b = leg_shoulder_angles(
        &forward_kinematics(&mirrored, &model, false).unwrap(),
        &model.ids,
    )
    .unwrap();
    assert!((a.leg[0] + b.leg[1]).abs() < 1e-9);
    assert!((a.leg[1] + b.leg[0]).abs() < 1e-9);
    assert!((a.shoulder[0] + b.shoulder[1]).abs() < 1e-9);
    assert!((a.shoulder[1] + b.shoulder[0]).abs() < 1e-9);
}

#[test]
fn invalid_state_dimensions_rejected() {
    assert!(BodyState::new([0.0; 3], vec![0.0; 71], vec![0.0; 10]).is_err());
    assert!(BodyState::new([0.0; 3], vec![0.0; 72], vec![0.0; 9]).is_err());
    assert!(BodyState::new([0.0; 3], vec![0.0; 72], vec![0.0; 10]).is_ok());
}
