//! Body model file I/O.
//!
//! A model is a single JSON document:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "frame": "z-up",
//!   "rest_joints": [[x, y, z], ...24],
//!   "parents": [-1, 0, ...24],
//!   "joint_names": ["pelvis", ...24],
//!   "joint_ids": { "hip": [1,2], "knee": [4,5], "ankle": [7,8],
//!                  "toe": [10,11], "shoulder": [16,17], "elbow": [18,19] },
//!   "foot": { "length": [l, r], "width": [l, r],
//!             "heel_local": [[x,y,z], [x,y,z]] },
//!   "mesh": {                                   // optional
//!     "rest_vertices": [[x, y, z], ...],
//!     "skin_weights": [[[joint, w], ...], ...], // sparse rows, sum to 1
//!     "faces": [[a, b, c], ...],
//!     "joint_regressor": [[[vertex, w], ...], ...24],  // optional
//!     "heel_vertex": [left, right]              // optional
//!   }
//! }
//! ```
//!
//! When a mesh provides `heel_vertex`, the heel reference offsets are derived
//! from those rest vertices, overriding `foot.heel_local`.

use super::{BodyModel, FootGeometry, JointIds, Mesh};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: u32,
    frame: String,
    rest_joints: Vec<[f64; 3]>,
    parents: Vec<i32>,
    joint_names: Vec<String>,
    joint_ids: JointIds,
    foot: FootGeometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mesh: Option<Mesh>,
}

pub fn load(path: &Path) -> Result<BodyModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::Format {
            path: path.to_path_buf(),
            msg: format!("unsupported format_version {}", file.format_version),
        });
    }
    if file.frame != "z-up" {
        return Err(Error::Format {
            path: path.to_path_buf(),
            msg: format!("unsupported frame '{}' (expected z-up)", file.frame),
        });
    }
    let mut model = BodyModel {
        rest_joints: file.rest_joints,
        parents: file.parents,
        joint_names: file.joint_names,
        ids: file.joint_ids,
        foot: file.foot,
        mesh: file.mesh,
    };
    if let Some(mesh) = &model.mesh {
        if let Some(hv) = mesh.heel_vertex {
            for side in 0..2 {
                let v = mesh
                    .rest_vertices
                    .get(hv[side])
                    .ok_or_else(|| Error::ModelInvalid("heel vertex out of range".into()))?;
                let ankle = model.rest_joints[model.ids.ankle[side]];
                model.foot.heel_local[side] =
                    [v[0] - ankle[0], v[1] - ankle[1], v[2] - ankle[2]];
            }
        }
    }
    model.validate()?;
    Ok(model)
}

pub fn save(model: &BodyModel, path: &Path) -> Result<()> {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        frame: "z-up".to_string(),
        rest_joints: model.rest_joints.clone(),
        parents: model.parents.clone(),
        joint_names: model.joint_names.clone(),
        joint_ids: model.ids.clone(),
        foot: model.foot.clone(),
        mesh: model.mesh.clone(),
    };
    let text = serde_json::to_string_pretty(&file).expect("model serialization");
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body_model::template;

    #[test]
    fn roundtrip_builtin() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let model = template::builtin();
        save(&model, &path).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(model, loaded);
    }

    #[test]
    fn heel_local_derived_from_heel_vertex() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let mut model = template::builtin();
        // Deliberately corrupt heel_local; loading must rebuild it from the
        // designated heel vertices.
        model.foot.heel_local = [[9.0, 9.0, 9.0], [9.0, 9.0, 9.0]];
        save(&model, &path).unwrap();
        let loaded = load(&path).unwrap();
        let expect = template::builtin().foot.heel_local;
        for side in 0..2 {
            for axis in 0..3 {
                assert!((loaded.foot.heel_local[side][axis] - expect[side][axis]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bad_parent_order_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let mut model = template::builtin();
        model.parents[3] = 7; // parent after child
        save(&model, &path).unwrap();
        assert!(matches!(load(&path), Err(Error::ModelInvalid(_))));
    }

    #[test]
    fn unknown_fields_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let model = template::builtin();
        save(&model, &path).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.insert_str(text.len() - 2, ",\"bogus\": 1\n");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(load(&path), Err(Error::Format { .. })));
    }
}
