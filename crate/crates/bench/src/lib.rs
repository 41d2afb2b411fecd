//! Shared inputs for the benchmarks.

use std::path::PathBuf;
use std::sync::Arc;

use yoneda_core::ore::validate_ore;
use yoneda_core::presentation::{parse_ore, parse_presentation};
use yoneda_core::{build_ore_model, GradedModel, OreModel};

fn read(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// The truncated model of a shipped algebra.
pub fn algebra(name: &str, max_deg: usize) -> Arc<GradedModel> {
    let p = parse_presentation(&read(&format!("{name}.alg"))).expect("valid presentation");
    Arc::new(GradedModel::build(&p, max_deg).expect("model fits the cap"))
}

/// `A` together with the model of its shipped Ore extension.
pub fn extension(name: &str, max_deg: usize) -> (Arc<GradedModel>, OreModel) {
    let a = algebra(name, max_deg);
    let spec = parse_ore(&read(&format!("{name}.ore")), a.presentation()).expect("valid Ore data");
    let ore = validate_ore(&spec, &a).expect("Ore data preserves the ideal");
    let om = build_ore_model(a.clone(), ore, max_deg).expect("extension fits the cap");
    (a, om)
}
