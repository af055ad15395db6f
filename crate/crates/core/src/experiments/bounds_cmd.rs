//! Calculator mode: bounds for explicit indicator values.

use serde_json::{json, Value};

use super::config::RunConfig;
use crate::bounds::{bounds_for, Variant};
use crate::error::{Error, Result};
use crate::indicators::GammaIndicators;
use crate::io::write_atomic;

/// Variants whose `E` assumption matches the indicators.
pub fn default_variants(g: &GammaIndicators) -> Vec<Variant> {
    Variant::ALL.into_iter().filter(|v| v.needs_zero_e() == g.is_e_zero()).collect()
}

/// The error as `{"kind": .., "message": ..}`.
pub fn error_json(e: &Error) -> Value {
    json!({ "kind": e.kind(), "message": e.to_string() })
}

/// Bounds for every requested variant; failures are reported per variant.
/// Square-`C` variants take the caller's word that `C` is square.
pub fn compute_bounds_json(g: &GammaIndicators, variants: &[Variant]) -> (Value, bool) {
    let mut ok = true;
    let results: Vec<Value> = variants
        .iter()
        .map(|v| match bounds_for(*v, g, (1, 1)) {
            Ok(b) => json!({ "variant": v.name(), "bounds": b }),
            Err(e) => {
                ok = false;
                json!({ "variant": v.name(), "error": error_json(&e) })
            }
        })
        .collect();
    let out = json!({
        "indicators": g,
        "warnings": g.assumptions().violations(),
        "results": results,
    });
    (out, ok)
}

/// Evaluates the configured indicators, writes `bounds.json` under
/// `cfg.out` and returns the document with a success flag.
pub fn cmd_bounds(cfg: &RunConfig) -> Result<(Value, bool)> {
    let g = cfg.indicators.ok_or(Error::MissingMeasurement("indicators"))?;
    g.validate()?;
    let variants = cfg.variants.clone().unwrap_or_else(|| default_variants(&g));
    let (doc, ok) = compute_bounds_json(&g, &variants);
    write_atomic(&cfg.out.join("bounds.json"), serde_json::to_string_pretty(&doc)?.as_bytes())?;
    Ok((doc, ok))
}
