//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each operation has a plain Rust core returning `Result<String, String>`
//! (testable natively) and a thin `#[wasm_bindgen]` wrapper that turns the
//! error into a JavaScript exception.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use poincare_core::c1norm::Radius;
use poincare_core::compactify::compactify_with_degree;
use poincare_core::equilibria::Equilibrium;
use poincare_core::polyfield::{limit_field, ProblemSpec};
use poincare_core::portrait::{phase_portrait, PortraitOptions, SvgOptions};
use poincare_core::reduction::{convergence_csv, convergence_study, StudyOptions};

/// Largest grid the page may request; keeps a click under a second.
const MAX_GRID: usize = 1024;

fn parse_spec(spec_json: &str) -> Result<ProblemSpec, String> {
    ProblemSpec::from_json(spec_json).map_err(|e| e.to_string())
}

/// The built-in quadratic example as pretty JSON, used to prefill the page.
pub fn example_spec() -> String {
    serde_json::to_string_pretty(&ProblemSpec::quadratic_example()).expect("plain data serializes")
}

/// Human-readable listing of the six chart systems.
pub fn chart_listing(spec_json: &str) -> Result<String, String> {
    let spec = parse_spec(spec_json)?;
    let field = limit_field(&spec).map_err(|e| e.to_string())?;
    let cf = compactify_with_degree(&field, spec.degree()).map_err(|e| e.to_string())?;
    Ok(cf.listing())
}

#[derive(Serialize)]
struct PortraitView<'a> {
    svg: &'a str,
    all_hyperbolic: bool,
    saddle_connection_suspected: bool,
    equilibria: &'a [Equilibrium],
}

/// Phase portrait on the Poincaré disk as JSON `{svg, all_hyperbolic,
/// saddle_connection_suspected, equilibria}`.
pub fn portrait_json(spec_json: &str, fill_orbits: usize, size: u32) -> Result<String, String> {
    let spec = parse_spec(spec_json)?;
    let field = limit_field(&spec).map_err(|e| e.to_string())?;
    let cf = compactify_with_degree(&field, spec.degree()).map_err(|e| e.to_string())?;
    let opts = PortraitOptions {
        fill_orbits: fill_orbits.min(64),
        svg: SvgOptions {
            size: size.clamp(200, 2000),
            ..SvgOptions::default()
        },
        ..PortraitOptions::default()
    };
    let p = phase_portrait(&cf, &opts).map_err(|e| e.to_string())?;
    serde_json::to_string(&PortraitView {
        svg: &p.svg,
        all_hyperbolic: p.report.all_hyperbolic,
        saddle_connection_suspected: p.report.saddle_connection_suspected,
        equilibria: &p.report.points,
    })
    .map_err(|e| e.to_string())
}

/// Convergence table (CSV) for a comma-separated, descending `eps` list.
pub fn convergence_table(spec_json: &str, eps_list: &str, n: usize) -> Result<String, String> {
    let spec = parse_spec(spec_json)?;
    let eps = eps_list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad eps {s:?}: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if n > MAX_GRID {
        return Err(format!("grid size {n} exceeds the demo limit {MAX_GRID}"));
    }
    let opts = StudyOptions {
        n,
        grid_n: 32,
        radius: Radius::Unit,
        ..StudyOptions::default()
    };
    let rows = convergence_study(&spec, &eps, &opts).map_err(|e| e.to_string())?;
    Ok(convergence_csv(&rows))
}

#[wasm_bindgen(js_name = exampleSpec)]
pub fn example_spec_js() -> String {
    example_spec()
}

#[wasm_bindgen(js_name = chartListing)]
pub fn chart_listing_js(spec_json: &str) -> Result<String, JsValue> {
    chart_listing(spec_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = portrait)]
pub fn portrait_js(spec_json: &str, fill_orbits: usize, size: u32) -> Result<String, JsValue> {
    portrait_json(spec_json, fill_orbits, size).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = convergenceTable)]
pub fn convergence_table_js(spec_json: &str, eps_list: &str, n: usize) -> Result<String, JsValue> {
    convergence_table(spec_json, eps_list, n).map_err(|e| JsValue::from_str(&e))
}
