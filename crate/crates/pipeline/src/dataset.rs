use std::path::Path;

use inhand_geometry::Pose;
use serde::{Deserialize, Serialize};

use crate::ply::{read_frame_cloud, write_frame_cloud};
use crate::{Action, Demonstration, Frame, PipelineError};

/// Everything about a demonstration except the clouds, which live in one
/// `frame_%04d.ply` per frame next to this file.
#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    instruction: String,
    v_eps: f64,
    frame_count: usize,
    keyposes: Vec<usize>,
    actions: Vec<ActionMeta>,
    frames: Vec<FrameMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ActionMeta {
    pose: [f64; 7],
    gripper_open: bool,
    collide: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameMeta {
    pose: [f64; 7],
    gripper_open: bool,
    timestep: f64,
}

fn frame_file(i: usize) -> String {
    format!("frame_{i:04}.ply")
}

/// Writes `meta.json` plus one PLY per frame into `dir` (created if absent).
/// The output is byte-deterministic: saving the same demonstration twice
/// produces identical files.
pub fn save_demonstration(dir: &Path, demo: &Demonstration) -> Result<(), PipelineError> {
    demo.validate()?;
    std::fs::create_dir_all(dir)?;
    let meta = Meta {
        instruction: demo.instruction.clone(),
        v_eps: demo.v_eps,
        frame_count: demo.frames.len(),
        keyposes: demo.keyposes.clone(),
        actions: demo
            .actions
            .iter()
            .map(|a| ActionMeta {
                pose: a.pose.to_array7(),
                gripper_open: a.gripper_open,
                collide: a.collide,
            })
            .collect(),
        frames: demo
            .frames
            .iter()
            .map(|f| FrameMeta {
                pose: f.pose.to_array7(),
                gripper_open: f.gripper_open,
                timestep: f.timestep,
            })
            .collect(),
    };
    std::fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)?)?;
    for (i, f) in demo.frames.iter().enumerate() {
        write_frame_cloud(&dir.join(frame_file(i)), &f.cloud)?;
    }
    Ok(())
}

/// Loads a demonstration saved by [`save_demonstration`] and re-validates it,
/// so tampered labels or corrupted clouds surface here instead of at training
/// time.
pub fn load_demonstration(dir: &Path) -> Result<Demonstration, PipelineError> {
    let meta_path = dir.join("meta.json");
    let meta: Meta = serde_json::from_str(&std::fs::read_to_string(&meta_path)?)?;
    if meta.frames.len() != meta.frame_count {
        return Err(PipelineError::Validation(format!(
            "{}: frame_count {} but {} frame entries",
            meta_path.display(),
            meta.frame_count,
            meta.frames.len()
        )));
    }
    let frames = meta
        .frames
        .iter()
        .enumerate()
        .map(|(i, f)| {
            Ok(Frame {
                cloud: read_frame_cloud(&dir.join(frame_file(i)))?,
                pose: Pose::from_array7(f.pose),
                gripper_open: f.gripper_open,
                timestep: f.timestep,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let demo = Demonstration {
        instruction: meta.instruction,
        frames,
        keyposes: meta.keyposes,
        actions: meta
            .actions
            .into_iter()
            .map(|a| Action {
                pose: Pose::from_array7(a.pose),
                gripper_open: a.gripper_open,
                collide: a.collide,
            })
            .collect(),
        v_eps: meta.v_eps,
    };
    demo.validate()?;
    Ok(demo)
}

/// Loads every `demo_*` subdirectory of `dir`, sorted by name.
pub fn load_dataset(dir: &Path) -> Result<Vec<Demonstration>, PipelineError> {
    let mut dirs: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_dir()
                && p.file_name()
                    .map(|n| n.to_string_lossy().starts_with("demo_"))
                    .unwrap_or(false)
        })
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(PipelineError::Validation(format!(
            "no demo_* directories under {}",
            dir.display()
        )));
    }
    dirs.iter().map(|d| load_demonstration(d)).collect()
}
