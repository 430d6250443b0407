//! Demonstration dataset generation: sample scenes, synthesize smooth
//! keypose-to-keypose trajectories, and persist them in the lossless
//! on-disk demo format.

use std::fs;
use std::path::{Path, PathBuf};

use inhand_pipeline::{load_dataset, save_demonstration, synthesize_trajectory, Demonstration};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::tasks::{home_pose, Task};
use crate::BenchError;

#[derive(Debug, Clone)]
pub struct GenOptions {
    pub demos_per_task: usize,
    pub seed: u64,
    /// Pause-speed threshold baked into each demo for keypose labeling.
    pub v_eps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenSummary {
    pub demos: usize,
    pub frames: usize,
}

/// Stable per-episode seed: FNV-1a over the domain and task name, mixed
/// with the root seed and episode index through splitmix64. Episodes are
/// independent of task ordering, and the `domain` tag keeps evaluation
/// scenes disjoint from generated training scenes under the same seed.
pub fn episode_seed(domain: &str, seed: u64, task: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in domain.bytes().chain(task.bytes()) {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(splitmix64(h ^ seed) ^ index)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Writes `demos_per_task` demonstrations per task under
/// `out/<task>/demo_NNNN/`. Identical seeds reproduce the dataset byte for
/// byte.
pub fn generate_dataset(
    tasks: &[Box<dyn Task>],
    opts: &GenOptions,
    out: &Path,
) -> Result<GenSummary, BenchError> {
    if tasks.is_empty() {
        return Err(BenchError::Invariant("no tasks selected".into()));
    }
    if opts.demos_per_task == 0 {
        return Err(BenchError::Invariant(
            "demos_per_task must be at least 1".into(),
        ));
    }
    if !(opts.v_eps > 0.0 && opts.v_eps.is_finite()) {
        return Err(BenchError::Invariant(format!(
            "v_eps {} must be a positive length",
            opts.v_eps
        )));
    }

    let mut summary = GenSummary { demos: 0, frames: 0 };
    for task in tasks {
        let task_dir = out.join(task.id());
        for i in 0..opts.demos_per_task {
            let mut rng = ChaCha8Rng::seed_from_u64(episode_seed(
                "gen-data",
                opts.seed,
                task.id(),
                i as u64,
            ));
            let scene = task.sample_scene(&mut rng)?;
            let (frames, keyposes) = synthesize_trajectory(
                &scene.cloud,
                &home_pose(),
                scene.start_open,
                &scene.actions,
                opts.v_eps,
            );
            let demo = Demonstration {
                instruction: scene.instruction,
                frames,
                keyposes,
                actions: scene.actions,
                v_eps: opts.v_eps,
            };
            summary.frames += demo.frames.len();
            save_demonstration(&task_dir.join(format!("demo_{i:04}")), &demo)?;
            summary.demos += 1;
        }
    }
    Ok(summary)
}

/// Loads every demonstration under `data`, which may be a dataset root with
/// one subdirectory per task or a single task directory.
pub fn load_training_demos(data: &Path) -> Result<Vec<Demonstration>, BenchError> {
    fn holds_demos(dir: &Path) -> bool {
        fs::read_dir(dir)
            .map(|entries| {
                entries.filter_map(|e| e.ok()).any(|e| {
                    e.path().is_dir()
                        && e.file_name().to_string_lossy().starts_with("demo_")
                })
            })
            .unwrap_or(false)
    }

    if holds_demos(data) {
        return Ok(load_dataset(data)?);
    }

    let mut task_dirs: Vec<PathBuf> = fs::read_dir(data)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir() && holds_demos(p))
        .collect();
    task_dirs.sort();
    if task_dirs.is_empty() {
        return Err(BenchError::Invariant(format!(
            "no demonstrations found under {}",
            data.display()
        )));
    }

    let mut demos = Vec::new();
    for dir in task_dirs {
        demos.extend(load_dataset(&dir)?);
    }
    Ok(demos)
}
