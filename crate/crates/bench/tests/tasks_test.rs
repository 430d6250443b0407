use inhand_bench::{find_task, home_pose, registry, workspace, VOCABULARY};
use inhand_model::{language_token_ids, PAD_TOKEN};
use inhand_pipeline::{synthesize_trajectory, Demonstration};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const V_EPS: f64 = 1e-3;

#[test]
fn registry_lists_the_three_benchmark_tasks() {
    let tasks = registry();
    let ids: Vec<&str> = tasks.iter().map(|t| t.id()).collect();
    assert_eq!(ids, ["reach-color", "stack-offset", "peg-insert-2cm"]);
    for id in ids {
        assert_eq!(find_task(id).unwrap().id(), id);
    }
    assert!(find_task("juggle-chainsaws").is_err());
}

#[test]
fn tolerances_match_the_benchmark_definitions() {
    let tol = |id: &str| {
        let t = find_task(id).unwrap().tolerance();
        (t.translation_m, t.rotation_deg)
    };
    assert_eq!(tol("reach-color"), (0.01, 15.0));
    assert_eq!(tol("stack-offset"), (0.01, 15.0));
    assert_eq!(tol("peg-insert-2cm"), (0.003, 10.0));
}

#[test]
fn sampled_scenes_keep_targets_apart() {
    for task in registry() {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scene = task.sample_scene(&mut rng).unwrap();
            for (i, a) in scene.targets.iter().enumerate() {
                for b in scene.targets.iter().skip(i + 1) {
                    assert!(
                        (*a - *b).norm() >= 0.02,
                        "{}: targets {:?} and {:?} closer than 2 cm",
                        task.id(),
                        a,
                        b
                    );
                }
            }
        }
    }
}

#[test]
fn sampled_scenes_stay_inside_the_workspace() {
    let ws = workspace();
    for task in registry() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let scene = task.sample_scene(&mut rng).unwrap();
        for &p in scene.cloud.positions() {
            assert!(ws.contains(p), "{}: cloud point {:?} escapes", task.id(), p);
        }
        for action in &scene.actions {
            assert!(
                ws.contains(action.pose.translation),
                "{}: keypose {:?} escapes",
                task.id(),
                action.pose.translation
            );
        }
        assert!(ws.contains(home_pose().translation));
    }
}

#[test]
fn oracle_actions_satisfy_their_own_predicate() {
    for task in registry() {
        let tol = task.tolerance();
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scene = task.sample_scene(&mut rng).unwrap();
            assert!(!scene.actions.is_empty());
            for action in &scene.actions {
                assert!(tol.satisfied_by(&action.pose, &action.pose));
            }
            // Consecutive keyposes must be far enough apart for the motion
            // synthesizer (and for the predicate to discriminate steps).
            let mut prev = home_pose().translation;
            for action in &scene.actions {
                let sep = (action.pose.translation - prev).norm();
                assert!(sep >= 4.0 * V_EPS, "{}: segment of {} m", task.id(), sep);
                prev = action.pose.translation;
            }
        }
    }
}

#[test]
fn instructions_use_only_the_frozen_vocabulary() {
    for task in registry() {
        for seed in 0..30u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scene = task.sample_scene(&mut rng).unwrap();
            let words: Vec<&str> = scene.instruction.split_whitespace().collect();
            assert!(!words.is_empty());
            assert!(words.len() <= 8, "instruction overflows the token budget");
            for word in words {
                assert!(
                    VOCABULARY.contains(&word),
                    "{}: word {word:?} is not in the benchmark vocabulary",
                    task.id()
                );
            }
        }
    }
}

#[test]
fn vocabulary_tokenizes_without_collisions() {
    let mut ids = Vec::new();
    for word in VOCABULARY {
        let id = language_token_ids(word, 1, 256)[0];
        assert_ne!(id, PAD_TOKEN);
        ids.push(id);
    }
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), VOCABULARY.len(), "hash collision inside the vocabulary");
}

#[test]
fn gripper_start_states_match_the_task_setups() {
    let start = |id: &str| {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        find_task(id).unwrap().sample_scene(&mut rng).unwrap().start_open
    };
    assert!(start("reach-color"), "reach starts with an empty open gripper");
    assert!(start("stack-offset"), "stack starts with an empty open gripper");
    assert!(!start("peg-insert-2cm"), "the peg starts already grasped");
}

#[test]
fn demos_synthesized_from_scenes_validate() {
    for task in registry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let scene = task.sample_scene(&mut rng).unwrap();
        let (frames, keyposes) = synthesize_trajectory(
            &scene.cloud,
            &home_pose(),
            scene.start_open,
            &scene.actions,
            V_EPS,
        );
        let demo = Demonstration {
            instruction: scene.instruction.clone(),
            frames,
            keyposes,
            actions: scene.actions.clone(),
            v_eps: V_EPS,
        };
        demo.validate().unwrap();
        assert_eq!(demo.keyposes.len(), scene.actions.len());
    }
}

#[test]
fn scene_sampling_is_deterministic() {
    for task in registry() {
        let sample = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            task.sample_scene(&mut rng).unwrap()
        };
        let a = sample(42);
        let b = sample(42);
        assert_eq!(a.instruction, b.instruction);
        assert_eq!(a.cloud.len(), b.cloud.len());
        assert_eq!(a.cloud.positions(), b.cloud.positions());
        assert_eq!(a.actions.len(), b.actions.len());
        for (x, y) in a.actions.iter().zip(&b.actions) {
            assert_eq!(x.pose.to_array7(), y.pose.to_array7());
            assert_eq!(x.gripper_open, y.gripper_open);
            assert_eq!(x.collide, y.collide);
        }
        let c = sample(43);
        assert_ne!(
            a.actions[0].pose.to_array7(),
            c.actions[0].pose.to_array7(),
            "{}: different seeds should move the targets",
            task.id()
        );
    }
}
