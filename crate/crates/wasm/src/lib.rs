//! Browser demo bindings: interactive field rendering, tiling overlay and
//! constant-power transitions for planar fan configurations.
//!
//! Build with `wasm-pack build --target web crates/wasm` and open
//! `crates/wasm/www/index.html` from a static file server.

use qcfield_core::control::{direct_path, geodesic_path, translate_controls};
use qcfield_core::grid::{sample_field, Region};
use qcfield_core::tiling::build_tiling;
use qcfield_core::wavefield::{psi_bounds, Controls, PotentialSpec, WaveConfig};
use qcfield_core::{C64, LAMBDA, RVec};
use wasm_bindgen::prelude::wasm_bindgen;

fn fan_scene(n: usize) -> (WaveConfig, Controls) {
    let cfg = WaveConfig::fan(n.clamp(2, 12));
    let u = Controls::normalized(
        Controls::uniform(cfg.n(), C64::new(1.0, 0.0), C64::new(-1.0, 0.0))
            .as_vector()
            .clone(),
    )
    .expect("nonzero");
    (cfg, u)
}

fn region(extent_lambda: f64) -> Region {
    Region::centered_cube(2, extent_lambda.clamp(0.5, 12.0) * LAMBDA)
}

/// Renders the grid to RGBA against a fixed spectral scale so the
/// brightness stays comparable while parameters move.
fn rgba(values: &[f64], lo: f64, hi: f64) -> Vec<u8> {
    let span = (hi - lo).max(1e-300);
    let mut out = Vec::with_capacity(values.len() * 4);
    for &v in values {
        let g = (255.0 * (v - lo) / span).clamp(0.0, 255.0) as u8;
        out.extend_from_slice(&[g, g, g, 255]);
    }
    out
}

fn render(
    cfg: &WaveConfig,
    u: &Controls,
    spec: &PotentialSpec,
    extent_lambda: f64,
    resolution: usize,
) -> Vec<u8> {
    let resolution = resolution.clamp(16, 1024);
    let region = region(extent_lambda);
    let grid = sample_field(&region, &[resolution, resolution], u, cfg, spec)
        .expect("resolution validated");
    let (lo, hi) = psi_bounds(cfg, spec);
    let power = u.norm() * u.norm();
    // image rows run top-down while the second grid axis runs bottom-up
    let mut values = Vec::with_capacity(grid.len());
    for row in 0..resolution {
        let i1 = resolution - 1 - row;
        for i0 in 0..resolution {
            values.push(grid.values[i0 * resolution + i1]);
        }
    }
    rgba(&values, lo * power, hi * power)
}

/// RGBA pixels (row-major, top row first) of the fan potential with the
/// alternating control pattern translated by `(eps_x, eps_y)` wavelengths.
#[wasm_bindgen]
pub fn field_image(
    n: usize,
    a: f64,
    b: f64,
    extent_lambda: f64,
    resolution: usize,
    eps_x_lambda: f64,
    eps_y_lambda: f64,
) -> Vec<u8> {
    let (cfg, u0) = fan_scene(n);
    let eps = RVec::from_column_slice(&[eps_x_lambda * LAMBDA, eps_y_lambda * LAMBDA]);
    let u = translate_controls(&u0, &eps, &cfg);
    render(&cfg, &u, &PotentialSpec::diagonal(a, b), extent_lambda, resolution)
}

/// Edge segments of the cut-and-project tiling for the fan configuration,
/// flattened as `[x1, y1, x2, y2, ...]` in wavelength units.
#[wasm_bindgen]
pub fn tiling_segments(n: usize, extent_lambda: f64) -> Vec<f64> {
    let (cfg, _) = fan_scene(n);
    let Ok(graph) = build_tiling(&region(extent_lambda), 3.0, &cfg) else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(graph.edges.len() * 4);
    for &(i, j) in &graph.edges {
        let a = &graph.nodes[i].projection;
        let b = &graph.nodes[j].projection;
        out.extend_from_slice(&[
            a[0] / LAMBDA,
            a[1] / LAMBDA,
            b[0] / LAMBDA,
            b[1] / LAMBDA,
        ]);
    }
    out
}

/// Arc lengths `[direct, geodesic]` of the two constant-power paths
/// realizing a translation by `(eps_x, eps_y)` wavelengths.
#[wasm_bindgen]
pub fn transition_lengths(n: usize, eps_x_lambda: f64, eps_y_lambda: f64) -> Vec<f64> {
    let (cfg, u0) = fan_scene(n);
    let eps = RVec::from_column_slice(&[eps_x_lambda * LAMBDA, eps_y_lambda * LAMBDA]);
    let u1 = translate_controls(&u0, &eps, &cfg);
    let direct = direct_path(&u0, &eps, &cfg).map(|p| p.arc_length()).unwrap_or(0.0);
    let geodesic = geodesic_path(&u0, &u1).map(|p| p.arc_length()).unwrap_or(0.0);
    vec![direct, geodesic]
}

/// RGBA pixels of the potential at fraction `t ∈ [0, 1]` along the direct
/// (`kind = 0`) or geodesic (`kind = 1`) transition path for a translation
/// by `(eps_x, eps_y)` wavelengths.
#[wasm_bindgen]
pub fn transition_image(
    n: usize,
    kind: u8,
    t: f64,
    extent_lambda: f64,
    resolution: usize,
    eps_x_lambda: f64,
    eps_y_lambda: f64,
) -> Vec<u8> {
    let (cfg, u0) = fan_scene(n);
    let eps = RVec::from_column_slice(&[eps_x_lambda * LAMBDA, eps_y_lambda * LAMBDA]);
    let u = if kind == 0 {
        match direct_path(&u0, &eps, &cfg) {
            Ok(path) => path.at_fraction(t.clamp(0.0, 1.0)),
            Err(_) => u0,
        }
    } else {
        let u1 = translate_controls(&u0, &eps, &cfg);
        match geodesic_path(&u0, &u1) {
            Ok(path) => path.at_fraction(t.clamp(0.0, 1.0)),
            Err(_) => u0,
        }
    };
    render(&cfg, &u, &PotentialSpec::default(), extent_lambda, resolution)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_image_has_rgba_layout() {
        let img = field_image(5, 1.0, 1.0, 2.0, 32, 0.0, 0.0);
        assert_eq!(img.len(), 32 * 32 * 4);
        assert!(img.chunks(4).all(|px| px[3] == 255));
        // grayscale: all channels equal
        assert!(img.chunks(4).all(|px| px[0] == px[1] && px[1] == px[2]));
    }

    #[test]
    fn tiling_segments_come_in_quads() {
        let segs = tiling_segments(4, 2.0);
        assert!(!segs.is_empty());
        assert_eq!(segs.len() % 4, 0);
    }

    #[test]
    fn transition_endpoints_match_translated_fields() {
        let start = transition_image(5, 1, 0.0, 2.0, 24, 1.0, 2.0);
        let base = field_image(5, 1.0, 1.0, 2.0, 24, 0.0, 0.0);
        assert_eq!(start, base);
        let lens = transition_lengths(5, 1.0, 2.0);
        assert!(lens[0] > lens[1] && lens[1] > 0.0);
    }
}
