//! Finite-difference checks of every model kind on a sampled subset of
//! coordinates; the exhaustive sweep lives in the acceptance suite.

use sentifuse_core::data::*;
use sentifuse_core::encoders::*;
use sentifuse_core::gradcheck::*;
use sentifuse_core::model::*;
use sentifuse_tensor::gradcheck::MAX_REL_ERR;

fn tiny_batch(seed: u64) -> (ModelConfig, Vec<EncodedPost>) {
    let cfg = ModelConfig::tiny();
    let recs = generate_with(&SynthConfig::new(3, seed, 0.7).with_vision_dim(cfg.vision_dim));
    let provider = EmbeddingProvider::synthetic(cfg.text_dim, seed).unwrap();
    let posts = recs.iter().map(|r| encode_post(r, &provider, cfg.vision_dim, 0.5).unwrap()).collect();
    (cfg, posts)
}

#[test]
fn sampled_coordinates_match_for_every_kind() {
    let (cfg, posts) = tiny_batch(11);
    let batch = Batch::new(&posts.iter().collect::<Vec<_>>()).unwrap();
    let opts = CheckOptions {
        coords_per_param: Some(3),
        seed: 11,
        ..CheckOptions::default()
    };
    for kind in ModelKind::ALL {
        let model = Model::new(cfg.clone(), kind, BranchSet::all(), 11).unwrap();
        let groups = check_model(&model, &batch, &opts).unwrap();
        assert!(!groups.is_empty());
        for g in groups {
            assert!(g.max_rel_err < MAX_REL_ERR, "{kind:?} {} {:e} at {}", g.group, g.max_rel_err, g.worst);
        }
    }
}

#[test]
fn full_model_reports_each_branch_group() {
    let (cfg, posts) = tiny_batch(2);
    let batch = Batch::new(&posts.iter().collect::<Vec<_>>()).unwrap();
    let model = Model::new(cfg, ModelKind::Full, BranchSet::all(), 2).unwrap();
    let opts = CheckOptions {
        coords_per_param: Some(1),
        ..CheckOptions::default()
    };
    let names: Vec<String> = check_model(&model, &batch, &opts).unwrap().into_iter().map(|g| g.group).collect();
    for g in ["va", "ta", "vt", "fusion"] {
        assert!(names.iter().any(|n| n == g), "{names:?}");
    }
}

#[test]
fn a_wrong_gradient_is_caught() {
    let (cfg, posts) = tiny_batch(5);
    let batch = Batch::new(&posts.iter().collect::<Vec<_>>()).unwrap();
    let model = Model::new(cfg, ModelKind::Late, BranchSet::all(), 5).unwrap();
    let mut analytic = analytic_gradients(&model, &batch).unwrap();
    let id = model.store.id_of("late.text.bias").unwrap();
    analytic[id.index()].as_mut().unwrap()[0] += 1.0;
    let groups = compare_gradients(&model, &batch, &analytic, &CheckOptions::default()).unwrap();
    assert!(groups.iter().any(|g| g.max_rel_err > MAX_REL_ERR && g.worst.starts_with("late.text.bias")));
}
