//! Wavefront OBJ export of a posed mesh (vertex and face lines).

use super::{BodyModel, PosedBody};
use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

/// Writes the posed vertices and the model's faces. Requires the body to have
/// been posed with `include_mesh`.
pub fn export_obj(posed: &PosedBody, model: &BodyModel, path: &Path) -> Result<()> {
    let vertices = posed.vertices.as_ref().ok_or(Error::MeshUnavailable)?;
    let mesh = model.mesh.as_ref().ok_or(Error::MeshUnavailable)?;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        for v in vertices {
            writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for f in &mesh.faces {
            // OBJ indices are 1-based.
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    };
    write().map_err(|e| Error::io(path, e))
}
