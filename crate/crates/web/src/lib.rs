//! Browser demo: generate a random structure, minimize it under one of the
//! equivalences, and compare two structures. Every export takes and returns
//! plain strings; results are JSON documents.

pub mod svg;

use std::collections::HashMap;

use ksmin::oracles::{stutter_trace_equivalent_with, trace_equivalent_with, OracleOptions};
use ksmin::wkme::{wkme_reduce_with, WeakMode};
use ksmin::{
    div_stutter_bisim_partition, gen_random, kme_quotient, kme_reduce, parse_ks, strong_bisim_partition,
    wkme_quotient, KripkeStructure, NormalizeOptions, Partition, Strategy,
};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// The bundled examples, by name.
pub fn example_text(name: &str) -> Option<&'static str> {
    match name {
        "fig2" => Some(include_str!("../../../fixtures/fig2.ks")),
        "fig3" => Some(include_str!("../../../fixtures/fig3.ks")),
        "toggler" => Some(include_str!("../../../fixtures/toggler.ks")),
        _ => None,
    }
}

pub fn generate_text(states: usize, aps: usize, density: f64, seed: u64) -> Result<String, String> {
    gen_random(states, aps, density, seed).map(|ks| ks.to_text()).map_err(|e| e.to_string())
}

fn reduce(ks: &KripkeStructure, mode: &str, strategy: Strategy) -> Result<Partition, String> {
    let part = match mode {
        "bisim" => strong_bisim_partition(ks),
        "stutter-bisim" => div_stutter_bisim_partition(ks),
        "kme" => kme_reduce(ks, strategy).map_err(|e| e.to_string())?,
        "wkme" => wkme_reduce_with(ks, strategy, WeakMode::Literal).map_err(|e| e.to_string())?,
        "wkme-dc" => wkme_reduce_with(ks, strategy, WeakMode::DivergenceConsistent).map_err(|e| e.to_string())?,
        other => return Err(format!("unknown mode `{other}`")),
    };
    Ok(part)
}

/// Minimizes `text` and returns the blocks, the quotient and drawings of
/// both structures with matching block colors.
pub fn minimize_json(text: &str, mode: &str, strategy: &str) -> Result<String, String> {
    let strategy = match strategy {
        "greedy" => Strategy::Greedy,
        "exhaustive" => Strategy::Exhaustive,
        other => return Err(format!("unknown strategy `{other}`")),
    };
    let user = parse_ks(text).map_err(|e| e.to_string())?;
    let ks = user.normalize(NormalizeOptions::default()).map_err(|e| e.to_string())?;
    let part = reduce(&ks, mode, strategy)?;
    let quotient = match mode {
        "bisim" | "kme" => kme_quotient(&ks, &part),
        _ => wkme_quotient(&ks, &part),
    }
    .map_err(|e| e.to_string())?;

    // quotient state i is block i, so one index colors both drawings
    let by_state: HashMap<&str, usize> = ks.states().map(|s| (ks.name(s), part.block_of(s))).collect();
    let by_block: HashMap<&str, usize> = quotient.states().map(|s| (quotient.name(s), s.0)).collect();
    let quotient = quotient.denormalize();
    Ok(json!({
        "blocks": part.report(&ks).blocks,
        "blockCount": part.visible_blocks(&ks),
        "states": user.num_states(),
        "quotient": quotient.to_text(),
        "originalSvg": svg::render(&user, &|n| by_state.get(n).copied()),
        "quotientSvg": svg::render(&quotient, &|n| by_block.get(n).copied()),
    })
    .to_string())
}

/// Decides trace (`trace`) or stutter-trace (`stutter-trace`) equivalence.
pub fn equivalent_json(a: &str, b: &str, semantics: &str) -> Result<String, String> {
    let a = parse_ks(a).map_err(|e| format!("first structure: {e}"))?;
    let b = parse_ks(b).map_err(|e| format!("second structure: {e}"))?;
    let opts = OracleOptions::default();
    let r = match semantics {
        "trace" => trace_equivalent_with(&a, &b, opts),
        "stutter-trace" => stutter_trace_equivalent_with(&a, &b, opts),
        other => return Err(format!("unknown semantics `{other}`")),
    };
    Ok(json!({
        "equivalent": r.equivalent,
        "witness": r.witness.map(|w| w.to_string()),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn example(name: &str) -> Result<String, JsError> {
    example_text(name)
        .map(str::to_string)
        .ok_or_else(|| JsError::new(&format!("no example named `{name}`")))
}

#[wasm_bindgen]
pub fn generate(states: usize, aps: usize, density: f64, seed: u32) -> Result<String, JsError> {
    generate_text(states, aps, density, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn minimize(text: &str, mode: &str, strategy: &str) -> Result<String, JsError> {
    minimize_json(text, mode, strategy).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn equivalent(a: &str, b: &str, semantics: &str) -> Result<String, JsError> {
    equivalent_json(a, b, semantics).map_err(|e| JsError::new(&e))
}
