use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const TINY_CONFIG: &str = "\
[model]
image_resolution = 16
layers = 1
model_dim = 32
heads = 2

[eval]
episodes = 2
";

fn inhand(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inhand"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should spawn")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_tiny_config(dir: &Path) -> String {
    let path = dir.join("tiny.toml");
    fs::write(&path, TINY_CONFIG).unwrap();
    path.to_string_lossy().into_owned()
}

/// Generates a one-demo reach-color dataset and returns its directory.
fn small_dataset(dir: &Path, seed: &str) -> String {
    let out = inhand(
        &["gen-data", "--task", "reach-color", "--demos", "1", "--seed", seed, "--out", "data"],
        dir,
    );
    assert_ok(&out);
    dir.join("data").to_string_lossy().into_owned()
}

fn train_tiny(dir: &Path, config: &str, data: &str, steps: &str) -> String {
    let out = inhand(
        &["train", "--data", data, "--steps", steps, "--config", config, "--out", "run"],
        dir,
    );
    assert_ok(&out);
    let ckpt = dir.join("run").join("checkpoint.json");
    assert!(ckpt.is_file(), "training should write a checkpoint");
    ckpt.to_string_lossy().into_owned()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = inhand(&[], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    let dir = TempDir::new().unwrap();
    let out = inhand(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["gen-data", "train", "eval", "render", "inspect"] {
        assert!(text.contains(sub), "help should mention {sub}");
    }
}

#[test]
fn unknown_task_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = inhand(&["gen-data", "--task", "fold-laundry"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fold-laundry"));
}

#[test]
fn gen_data_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    for out_dir in ["a", "b"] {
        let out = inhand(
            &["gen-data", "--task", "peg-insert-2cm", "--demos", "1", "--seed", "4", "--out", out_dir],
            dir.path(),
        );
        assert_ok(&out);
    }
    let read = |n: &str| {
        fs::read(dir.path().join(n).join("peg-insert-2cm/demo_0000/meta.json")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
    let ply = |n: &str| {
        fs::read(dir.path().join(n).join("peg-insert-2cm/demo_0000/frame_0000.ply")).unwrap()
    };
    assert_eq!(ply("a"), ply("b"));
}

#[test]
fn train_zero_steps_writes_a_loadable_checkpoint() {
    let dir = TempDir::new().unwrap();
    let config = write_tiny_config(dir.path());
    let data = small_dataset(dir.path(), "0");
    let ckpt = train_tiny(dir.path(), &config, &data, "0");

    inhand_model::Model::load(&ckpt).expect("fresh checkpoint should load");

    let out = inhand(&["inspect", "--ckpt", &ckpt], dir.path());
    assert_ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("image_resolution"), "inspect should print the config:\n{text}");
    assert!(text.contains("16"));
}

#[test]
fn eval_refuses_a_mismatched_config() {
    let dir = TempDir::new().unwrap();
    let config = write_tiny_config(dir.path());
    let data = small_dataset(dir.path(), "0");
    let ckpt = train_tiny(dir.path(), &config, &data, "0");

    let other = dir.path().join("other.toml");
    fs::write(&other, TINY_CONFIG.replace("model_dim = 32", "model_dim = 64")).unwrap();
    let out = inhand(
        &[
            "eval", "--ckpt", &ckpt, "--task", "reach-color", "--episodes", "1",
            "--config", other.to_str().unwrap(), "--out", "eval",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "silent config drift must be refused");
    assert!(String::from_utf8_lossy(&out.stderr).contains("checkpoint"));
}

#[test]
fn eval_report_json_is_schema_valid_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let config = write_tiny_config(dir.path());
    let data = small_dataset(dir.path(), "0");
    let ckpt = train_tiny(dir.path(), &config, &data, "0");

    let run = || {
        let out = inhand(
            &[
                "eval", "--ckpt", &ckpt, "--task", "reach-color", "--episodes", "2",
                "--seed", "5", "--config", &config, "--report", "json", "--out", "eval",
            ],
            dir.path(),
        );
        assert_ok(&out);
        let mut v: serde_json::Value =
            serde_json::from_slice(&out.stdout).expect("stdout should be a JSON report");
        assert_eq!(v["seed"], 5);
        assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
        assert_eq!(v["tasks"][0]["task"], "reach-color");
        assert_eq!(v["tasks"][0]["episodes"], 2);
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let first = run();
    let report_path = dir.path().join("eval").join("eval_report.json");
    assert!(report_path.is_file(), "eval should also write the report to disk");
    let second = run();
    assert_eq!(first, second, "same seed and config must reproduce the report");
}

fn png_dimensions(path: &Path) -> (u32, u32) {
    let bytes = fs::read(path).unwrap();
    assert_eq!(&bytes[1..4], b"PNG", "not a PNG: {path:?}");
    assert_eq!(&bytes[12..16], b"IHDR");
    let be = |b: &[u8]| u32::from_be_bytes([b[0], b[1], b[2], b[3]]);
    (be(&bytes[16..20]), be(&bytes[20..24]))
}

#[test]
fn render_paper_scale_emits_110px_views() {
    let dir = TempDir::new().unwrap();
    let data = small_dataset(dir.path(), "2");
    let demo = Path::new(&data).join("reach-color/demo_0000");
    let out = inhand(
        &[
            "render", "--demo", demo.to_str().unwrap(), "--frame", "0", "--stage", "1",
            "--paper-scale", "--out", "views",
        ],
        dir.path(),
    );
    assert_ok(&out);
    for view in ["top", "front", "back", "left", "right"] {
        let png = dir.path().join("views").join(format!("stage1_{view}.png"));
        assert!(png.is_file(), "missing {png:?}");
        assert_eq!(png_dimensions(&png), (110, 110));
    }
}
