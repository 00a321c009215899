//! File output backends: binary graymap rasters, exact-decimal CSV, tiling
//! vector graphics with an optional field underlay, and transition frame
//! sequences. All writers emit byte-identical output for identical inputs.

use crate::control::TransitionPath;
use crate::error::CoreError;
use crate::grid::{sample_field, FieldGrid, Region};
use crate::tiling::TilingGraph;
use crate::wavefield::{PotentialSpec, WaveConfig};
use std::path::{Path, PathBuf};

/// Gray value of a sample under linear min–max normalization; a constant
/// field maps to mid-gray.
fn gray(v: f64, min: f64, max: f64) -> u8 {
    if max > min {
        (255.0 * (v - min) / (max - min)).round() as u8
    } else {
        128
    }
}

/// Binary 8-bit graymap (`P5`) of a 2-D grid. The image x-axis is the first
/// grid axis (ascending) and the top row is the highest second coordinate.
pub fn pgm_bytes(grid: &FieldGrid) -> Result<Vec<u8>, CoreError> {
    if grid.dim() != 2 {
        return Err(CoreError::DimensionMismatch {
            what: "raster grid",
            expected: 2,
            got: grid.dim(),
        });
    }
    let (w, h) = (grid.resolution[0], grid.resolution[1]);
    let mut out = Vec::with_capacity(w * h + 32);
    out.extend_from_slice(format!("P5\n{w} {h}\n255\n").as_bytes());
    for row in 0..h {
        let i1 = h - 1 - row;
        for i0 in 0..w {
            out.push(gray(grid.values[i0 * h + i1], grid.min, grid.max));
        }
    }
    Ok(out)
}

pub fn write_pgm(grid: &FieldGrid, path: &Path) -> Result<(), CoreError> {
    let bytes = pgm_bytes(grid)?;
    std::fs::write(path, bytes).map_err(|e| CoreError::io(path, e))
}

/// CSV with one row per line of the grid (all indices but the last fixed),
/// 17 significant digits per value so a reparse is bit-exact.
pub fn csv_string(grid: &FieldGrid) -> String {
    let last = *grid.resolution.last().unwrap();
    let lines = grid.len() / last;
    let mut out = String::new();
    for line in 0..lines {
        for i in 0..last {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.16e}", grid.values[line * last + i]));
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(grid: &FieldGrid, path: &Path) -> Result<(), CoreError> {
    std::fs::write(path, csv_string(grid)).map_err(|e| CoreError::io(path, e))
}

/// CSV of a 3-D point cloud, one `x,y,z` row per point.
pub fn point_cloud_csv(points: &[[f64; 3]]) -> String {
    let mut out = String::new();
    for p in points {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p[0], p[1], p[2]));
    }
    out
}

pub fn write_point_cloud(points: &[[f64; 3]], path: &Path) -> Result<(), CoreError> {
    std::fs::write(path, point_cloud_csv(points)).map_err(|e| CoreError::io(path, e))
}

/// Canvas coordinates (in wavelengths, y pointing down) of a physical point
/// for a given region. Shared by the tiling primitives and the underlay
/// placement so overlays align by construction.
pub fn canvas_point(region: &Region, lambda: f64, x: f64, y: f64) -> (f64, f64) {
    ((x - region.lo[0]) / lambda, (region.hi[1] - y) / lambda)
}

/// Vector graphic of a tiling graph: edges as line segments, nodes as
/// circles, coordinates in wavelengths. An optional sampled field is
/// embedded as a lossless image underlay over its own region. Element
/// order follows the graph's (sorted) node and edge order.
pub fn svg_string(
    g: &TilingGraph,
    underlay: Option<&FieldGrid>,
    lambda: f64,
) -> Result<String, CoreError> {
    let region = &g.region;
    let (w, h) = (
        (region.hi[0] - region.lo[0]) / lambda,
        (region.hi[1] - region.lo[1]) / lambda,
    );
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w:.9} {h:.9}\" \
         width=\"{}\" height=\"{}\">\n",
        (w * 96.0).round(),
        (h * 96.0).round()
    ));
    if let Some(grid) = underlay {
        if grid.dim() != 2 {
            return Err(CoreError::DimensionMismatch {
                what: "underlay grid",
                expected: 2,
                got: grid.dim(),
            });
        }
        let (x0, y0) = canvas_point(&grid.region, lambda, grid.region.lo[0], grid.region.hi[1]);
        let gw = (grid.region.hi[0] - grid.region.lo[0]) / lambda;
        let gh = (grid.region.hi[1] - grid.region.lo[1]) / lambda;
        let png = png::encode_gray(&raster_rows(grid)?, grid.resolution[0], grid.resolution[1]);
        out.push_str(&format!(
            "  <image x=\"{x0:.9}\" y=\"{y0:.9}\" width=\"{gw:.9}\" height=\"{gh:.9}\" \
             preserveAspectRatio=\"none\" href=\"data:image/png;base64,{}\"/>\n",
            base64(&png)
        ));
    }
    for &(i, j) in &g.edges {
        let a = &g.nodes[i].projection;
        let b = &g.nodes[j].projection;
        let (x1, y1) = canvas_point(region, lambda, a[0], a[1]);
        let (x2, y2) = canvas_point(region, lambda, b[0], b[1]);
        out.push_str(&format!(
            "  <line x1=\"{x1:.9}\" y1=\"{y1:.9}\" x2=\"{x2:.9}\" y2=\"{y2:.9}\" \
             stroke=\"black\" stroke-width=\"0.02\"/>\n"
        ));
    }
    for node in &g.nodes {
        let (cx, cy) = canvas_point(region, lambda, node.projection[0], node.projection[1]);
        out.push_str(&format!(
            "  <circle cx=\"{cx:.9}\" cy=\"{cy:.9}\" r=\"0.05\" fill=\"white\" \
             stroke=\"black\" stroke-width=\"0.01\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_svg(
    g: &TilingGraph,
    underlay: Option<&FieldGrid>,
    lambda: f64,
    path: &Path,
) -> Result<(), CoreError> {
    let s = svg_string(g, underlay, lambda)?;
    std::fs::write(path, s).map_err(|e| CoreError::io(path, e))
}

/// Gray rows of a 2-D grid in image order (top row first).
fn raster_rows(grid: &FieldGrid) -> Result<Vec<u8>, CoreError> {
    if grid.dim() != 2 {
        return Err(CoreError::DimensionMismatch {
            what: "raster grid",
            expected: 2,
            got: grid.dim(),
        });
    }
    let (w, h) = (grid.resolution[0], grid.resolution[1]);
    let mut rows = Vec::with_capacity(w * h);
    for row in 0..h {
        let i1 = h - 1 - row;
        for i0 in 0..w {
            rows.push(gray(grid.values[i0 * h + i1], grid.min, grid.max));
        }
    }
    Ok(rows)
}

/// Renders frames of a transition at equal arc-length increments into
/// `dir/<stem>_NNN.pgm`. The first and last frame are sampled with the
/// exact endpoint controls, so they match standalone endpoint renders
/// byte for byte. Returns the written paths in order.
#[allow(clippy::too_many_arguments)]
pub fn write_transition_frames(
    dir: &Path,
    stem: &str,
    path: &TransitionPath,
    frames: usize,
    region: &Region,
    resolution: &[usize],
    cfg: &WaveConfig,
    spec: &PotentialSpec,
) -> Result<Vec<PathBuf>, CoreError> {
    assert!(frames >= 2, "a transition needs at least two frames");
    std::fs::create_dir_all(dir).map_err(|e| CoreError::io(dir, e))?;
    let mut written = Vec::with_capacity(frames);
    for i in 0..frames {
        let u = path.at_fraction(i as f64 / (frames - 1) as f64);
        let grid = sample_field(region, resolution, &u, cfg, spec)?;
        let file = dir.join(format!("{stem}_{i:03}.pgm"));
        write_pgm(&grid, &file)?;
        written.push(file);
    }
    Ok(written)
}

/// Plain-text document for a tiling graph: header, one `node` line per cell
/// (center then projection), one `edge` line per adjacency.
pub fn tiling_text(g: &TilingGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "tiling d {} n {} nodes {} edges {}\n",
        g.d,
        g.n,
        g.nodes.len(),
        g.edges.len()
    ));
    for (i, node) in g.nodes.iter().enumerate() {
        out.push_str(&format!("node {i}"));
        for c in &node.center {
            out.push_str(&format!(" {c}"));
        }
        for a in 0..g.d {
            out.push_str(&format!(" {:.16e}", node.projection[a]));
        }
        out.push('\n');
    }
    for &(i, j) in &g.edges {
        out.push_str(&format!("edge {i} {j}\n"));
    }
    out
}

fn base64(data: &[u8]) -> String {
    const TABLE: &[u8; 64] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    let mut out = String::with_capacity(data.len().div_ceil(3) * 4);
    for chunk in data.chunks(3) {
        let b = [
            chunk[0],
            chunk.get(1).copied().unwrap_or(0),
            chunk.get(2).copied().unwrap_or(0),
        ];
        let n = (u32::from(b[0]) << 16) | (u32::from(b[1]) << 8) | u32::from(b[2]);
        out.push(TABLE[(n >> 18) as usize & 63] as char);
        out.push(TABLE[(n >> 12) as usize & 63] as char);
        out.push(if chunk.len() > 1 {
            TABLE[(n >> 6) as usize & 63] as char
        } else {
            '='
        });
        out.push(if chunk.len() > 2 {
            TABLE[n as usize & 63] as char
        } else {
            '='
        });
    }
    out
}

/// Minimal lossless PNG writer (8-bit grayscale, stored deflate blocks).
/// Only used to embed underlays into vector graphics.
mod png {
    pub fn encode_gray(rows: &[u8], width: usize, height: usize) -> Vec<u8> {
        assert_eq!(rows.len(), width * height);
        let mut raw = Vec::with_capacity((width + 1) * height);
        for row in rows.chunks(width) {
            raw.push(0); // filter: none
            raw.extend_from_slice(row);
        }
        let mut out = Vec::new();
        out.extend_from_slice(&[0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A]);
        let mut ihdr = Vec::new();
        ihdr.extend_from_slice(&(width as u32).to_be_bytes());
        ihdr.extend_from_slice(&(height as u32).to_be_bytes());
        ihdr.extend_from_slice(&[8, 0, 0, 0, 0]); // 8-bit gray
        chunk(&mut out, b"IHDR", &ihdr);
        chunk(&mut out, b"IDAT", &zlib_stored(&raw));
        chunk(&mut out, b"IEND", &[]);
        out
    }

    fn chunk(out: &mut Vec<u8>, tag: &[u8; 4], data: &[u8]) {
        out.extend_from_slice(&(data.len() as u32).to_be_bytes());
        out.extend_from_slice(tag);
        out.extend_from_slice(data);
        let mut crc = Crc32::new();
        crc.update(tag);
        crc.update(data);
        out.extend_from_slice(&crc.finish().to_be_bytes());
    }

    /// zlib stream made of stored (uncompressed) deflate blocks.
    fn zlib_stored(data: &[u8]) -> Vec<u8> {
        let mut out = vec![0x78, 0x01];
        let mut rest = data;
        loop {
            let take = rest.len().min(65535);
            let last = take == rest.len();
            out.push(u8::from(last));
            out.extend_from_slice(&(take as u16).to_le_bytes());
            out.extend_from_slice(&(!(take as u16)).to_le_bytes());
            out.extend_from_slice(&rest[..take]);
            if last {
                break;
            }
            rest = &rest[take..];
        }
        // adler32 of the uncompressed data
        let mut a: u32 = 1;
        let mut b: u32 = 0;
        for &byte in data {
            a = (a + u32::from(byte)) % 65521;
            b = (b + a) % 65521;
        }
        out.extend_from_slice(&((b << 16) | a).to_be_bytes());
        out
    }

    struct Crc32(u32);

    impl Crc32 {
        fn new() -> Self {
            Crc32(0xFFFF_FFFF)
        }

        fn update(&mut self, data: &[u8]) {
            for &byte in data {
                let mut c = self.0 ^ u32::from(byte);
                for _ in 0..8 {
                    c = if c & 1 != 0 {
                        0xEDB8_8320 ^ (c >> 1)
                    } else {
                        c >> 1
                    };
                }
                self.0 = (self.0 >> 8) ^ c;
            }
        }

        fn finish(self) -> u32 {
            !self.0
        }
    }
}
