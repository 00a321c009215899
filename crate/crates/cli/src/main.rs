//! Batch command line for standing-wave field synthesis and analysis.
//!
//! Every command reads a scene file (see the `qcfield-core` scene module for
//! the format), runs deterministically for a fixed `QCFIELD_THREADS`, and
//! exits with 0 on success, 2 on validation errors, 3 on i/o failures and
//! 4 when a resource cap is hit.

use clap::{Parser, Subcommand};
use qcfield_core::calculus::synthesize_min_controls;
use qcfield_core::control::{
    direct_path, geodesic_path, reflection_action, rotation_action, transition_cost,
    translate_controls, PathKind, TransitionPath, DEFAULT_PATH_SAMPLES, DEFAULT_REGION_RESOLUTION,
};
use qcfield_core::error::CoreError;
use qcfield_core::periodicity::{classify, DEFAULT_BOUND, DEFAULT_TOL};
use qcfield_core::render;
use qcfield_core::scene::{parse_scene, OutputFormat, Scene, TransitionTarget};
use qcfield_core::tiling::{build_tiling_with_cap, tile_statistics};
use qcfield_core::wavefield::Controls;
use qcfield_core::RVec;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qcfield",
    about = "Synthesize, analyze and control quasiperiodic standing-wave potentials",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the scene's potential on its grid and write a raster or CSV.
    Eval {
        scene: PathBuf,
        /// Output file (defaults to the scene stem with .pgm/.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        /// For 3-D scenes: write the sublevel-set point cloud at this
        /// fraction of the grid range instead of the raw grid.
        #[arg(long, value_name = "FRACTION")]
        level_set: Option<f64>,
    },
    /// Build the cut-and-project tiling of the scene region.
    Tile {
        scene: PathBuf,
        /// Plain-text graph output (defaults to <stem>_tiling.txt).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Vector-graphics output (defaults to <stem>_tiling.svg).
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Seed points per wavelength per axis.
        #[arg(long)]
        density: Option<f64>,
        /// Underlay the sampled field in the SVG.
        #[arg(long)]
        overlay: bool,
        /// Node cap for the growth phase.
        #[arg(long, default_value_t = qcfield_core::tiling::DEFAULT_NODE_CAP)]
        cap: usize,
    },
    /// Classify the wavevector configuration as periodic or quasiperiodic.
    CheckQp {
        scene: PathBuf,
        /// Infinity-norm bound of the integer witness search.
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: i64,
        /// Witness tolerance.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Translate, rotate or reflect the pattern; prints the new controls.
    Transform {
        scene: PathBuf,
        /// Translation offset "dx,dy" in scene units.
        #[arg(long, value_name = "DX,DY")]
        translate: Option<String>,
        /// Rotation steps of π/N.
        #[arg(long, value_name = "STEPS")]
        rotate: Option<usize>,
        /// Reflection-line steps of π/(2N).
        #[arg(long, value_name = "STEPS")]
        reflect: Option<usize>,
    },
    /// Sample a constant-power transition between two control vectors.
    Transition {
        scene: PathBuf,
        /// Path kind (defaults to the scene's transition table).
        #[arg(long)]
        kind: Option<String>,
        /// Number of samples to print (≥ 2).
        #[arg(long)]
        frames: Option<usize>,
        /// Midpoint segments for the cost quadrature.
        #[arg(long, default_value_t = DEFAULT_PATH_SAMPLES)]
        samples: usize,
        /// Directory for rendered frame rasters (omitted: no frames).
        #[arg(long)]
        render_dir: Option<PathBuf>,
    },
    /// Pin a potential minimum at a point by eigenvector synthesis.
    Minima {
        scene: PathBuf,
        /// Target point "x,y" (or "x,y,z") in scene units.
        #[arg(long, value_name = "X,Y")]
        at: String,
    },
}

fn main() -> ExitCode {
    // die quietly when stdout is a pipe that closes early (e.g. `| head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[derive(Debug)]
enum AppError {
    Core(CoreError),
    Usage(String),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Core(e)
    }
}

impl AppError {
    fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Core(e) => match e {
                CoreError::Io { .. } => 3,
                CoreError::TileOverflow { .. } | CoreError::GridTooLarge { .. } => 4,
                _ => 2,
            },
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Eval {
            scene,
            out,
            level_set,
        } => eval(&scene, out, level_set),
        Command::Tile {
            scene,
            out,
            svg,
            density,
            overlay,
            cap,
        } => tile(&scene, out, svg, density, overlay, cap),
        Command::CheckQp { scene, bound, tol } => check_qp(&scene, bound, tol),
        Command::Transform {
            scene,
            translate,
            rotate,
            reflect,
        } => transform(&scene, translate, rotate, reflect),
        Command::Transition {
            scene,
            kind,
            frames,
            samples,
            render_dir,
        } => transition(&scene, kind, frames, samples, render_dir),
        Command::Minima { scene, at } => minima(&scene, &at),
    }
}

fn with_stem(scene_path: &Path, suffix: &str) -> PathBuf {
    let stem = scene_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scene".into());
    scene_path.with_file_name(format!("{stem}{suffix}"))
}

fn print_controls(u: &Controls) {
    for j in 0..u.n_pairs() {
        let a = u.alpha(j);
        let b = u.beta(j);
        println!(
            "pair {j} alpha {:.16e} {:.16e} beta {:.16e} {:.16e}",
            a.re, a.im, b.re, b.im
        );
    }
}

fn parse_vector(text: &str, dim: usize, what: &str) -> Result<RVec, AppError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| AppError::usage(format!("cannot parse {what} {text:?}: {e}")))?;
    if parts.len() != dim {
        return Err(AppError::usage(format!(
            "{what} must have {dim} components, found {}",
            parts.len()
        )));
    }
    Ok(RVec::from_column_slice(&parts))
}

fn eval(
    scene_path: &Path,
    out: Option<PathBuf>,
    level_set: Option<f64>,
) -> Result<(), AppError> {
    let scene = parse_scene(scene_path)?;
    let grid = scene.sample()?;
    if let Some(fraction) = level_set {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(AppError::usage("--level-set must lie in (0, 1]"));
        }
        let cloud = qcfield_core::grid::level_set_points_3d(&grid, fraction)?;
        let out_path = out
            .or_else(|| scene.output.path.clone().map(PathBuf::from))
            .unwrap_or_else(|| with_stem(scene_path, "_levelset.csv"));
        render::write_point_cloud(&cloud, &out_path)?;
        println!(
            "wrote {} ({} of {} points at fraction {:.6})",
            out_path.display(),
            cloud.len(),
            grid.len(),
            fraction
        );
        return Ok(());
    }
    type Writer = fn(&qcfield_core::grid::FieldGrid, &Path) -> Result<(), CoreError>;
    let (default_suffix, write): (&str, Writer) = match scene.output.format {
        OutputFormat::Pgm => (".pgm", render::write_pgm),
        OutputFormat::Csv => (".csv", render::write_csv),
    };
    let out_path = out
        .or_else(|| scene.output.path.clone().map(PathBuf::from))
        .unwrap_or_else(|| with_stem(scene_path, default_suffix));
    write(&grid, &out_path)?;
    println!(
        "wrote {} ({} points, min {:.16e}, max {:.16e})",
        out_path.display(),
        grid.len(),
        grid.min,
        grid.max
    );
    Ok(())
}

fn tile(
    scene_path: &Path,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
    density: Option<f64>,
    overlay_flag: bool,
    cap: usize,
) -> Result<(), AppError> {
    let scene = parse_scene(scene_path)?;
    let options = scene.tiling.clone();
    let density = density
        .or(options.as_ref().map(|t| t.seed_density))
        .unwrap_or(4.0);
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(density > 0.0) {
        return Err(AppError::usage("--density must be positive"));
    }
    let overlay = overlay_flag || options.map(|t| t.overlay).unwrap_or(false);

    let graph = build_tiling_with_cap(&scene.region, density, &scene.cfg, cap)?;
    let out_path = out.unwrap_or_else(|| with_stem(scene_path, "_tiling.txt"));
    std::fs::write(&out_path, render::tiling_text(&graph)).map_err(|e| CoreError::Io {
        path: out_path.display().to_string(),
        source: e,
    })?;

    let svg_path = svg.unwrap_or_else(|| with_stem(scene_path, "_tiling.svg"));
    let underlay = if overlay { Some(scene.sample()?) } else { None };
    render::write_svg(&graph, underlay.as_ref(), scene.cfg.lambda(), &svg_path)?;

    let stats = tile_statistics(&graph);
    println!(
        "wrote {} and {} ({} nodes, {} edges)",
        out_path.display(),
        svg_path.display(),
        graph.nodes.len(),
        graph.edges.len()
    );
    for (value, count) in stats.edge_lengths {
        println!("edge-length {value:.9} count {count}");
    }
    for (value, count) in stats.corner_angles {
        println!("corner-angle {value:.9} count {count}");
    }
    Ok(())
}

fn check_qp(scene_path: &Path, bound: i64, tol: f64) -> Result<(), AppError> {
    if bound < 1 {
        return Err(AppError::usage("--bound must be at least 1"));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(tol > 0.0) {
        return Err(AppError::usage("--tol must be positive"));
    }
    let scene = parse_scene(scene_path)?;
    let report = classify(&scene.cfg, bound, tol);
    println!("verdict: {}", report.verdict);
    println!("lattice_dim: {}", report.lattice_dim);
    println!("bound: {}", report.search_bound);
    println!("tolerance: {:e}", report.tolerance);
    println!("exhaustive: {}", report.exhaustive);
    println!(
        "witnesses: {} (showing {})",
        report.witness_count,
        report.witnesses.len()
    );
    for w in &report.witnesses {
        let parts: Vec<String> = w.iter().map(|c| c.to_string()).collect();
        println!("  [{}]", parts.join(", "));
    }
    Ok(())
}

fn transform(
    scene_path: &Path,
    translate: Option<String>,
    rotate: Option<usize>,
    reflect: Option<usize>,
) -> Result<(), AppError> {
    let scene = parse_scene(scene_path)?;
    let chosen = usize::from(translate.is_some())
        + usize::from(rotate.is_some())
        + usize::from(reflect.is_some());
    if chosen != 1 {
        return Err(AppError::usage(
            "choose exactly one of --translate, --rotate, --reflect",
        ));
    }
    let result = if let Some(text) = translate {
        let eps = parse_vector(&text, scene.cfg.d(), "--translate")? * scene.unit_scale;
        let parts: Vec<String> = eps.iter().map(|v| format!("{v:.16e}")).collect();
        println!("transform: translate by [{}]", parts.join(", "));
        translate_controls(&scene.controls, &eps, &scene.cfg)
    } else if let Some(steps) = rotate {
        let action = rotation_action(&scene.cfg, steps)?;
        println!(
            "transform: rotate {} steps, permutation {:?}",
            steps,
            action.permutation_one_based()
        );
        action.apply(&scene.controls)
    } else {
        let steps = reflect.expect("checked above");
        let action = reflection_action(&scene.cfg, steps)?;
        println!(
            "transform: reflect {} steps, permutation {:?}",
            steps,
            action.permutation_one_based()
        );
        action.apply(&scene.controls)
    };
    print_controls(&result);
    Ok(())
}

fn build_path(scene: &Scene, kind: PathKind) -> Result<TransitionPath, AppError> {
    let spec = scene
        .transition
        .as_ref()
        .ok_or_else(|| AppError::usage("the scene has no [transition] table"))?;
    let norm = scene.controls.norm();
    let u0 = if (norm - 1.0).abs() > 1e-10 {
        println!("note: controls scaled by {:.16e} to unit power", 1.0 / norm);
        Controls::normalized(scene.controls.as_vector().clone())?
    } else {
        scene.controls.clone()
    };
    let path = match (kind, &spec.target) {
        (PathKind::Direct, TransitionTarget::Translate(eps)) => direct_path(&u0, eps, &scene.cfg)?,
        (PathKind::Direct, TransitionTarget::Explicit(_)) => {
            return Err(AppError::usage(
                "a direct path needs a translation target (`transition.eps`)",
            ))
        }
        (PathKind::Geodesic, target) => {
            let u1 = match target {
                TransitionTarget::Translate(eps) => translate_controls(&u0, eps, &scene.cfg),
                TransitionTarget::Explicit(u1) => {
                    let n1 = u1.norm();
                    if (n1 - 1.0).abs() > 1e-10 {
                        println!(
                            "note: target controls scaled by {:.16e} to unit power",
                            1.0 / n1
                        );
                        Controls::normalized(u1.as_vector().clone())?
                    } else {
                        u1.clone()
                    }
                }
            };
            geodesic_path(&u0, &u1)?
        }
    };
    Ok(path)
}

fn transition(
    scene_path: &Path,
    kind: Option<String>,
    frames: Option<usize>,
    samples: usize,
    render_dir: Option<PathBuf>,
) -> Result<(), AppError> {
    let scene = parse_scene(scene_path)?;
    let spec = scene
        .transition
        .as_ref()
        .ok_or_else(|| AppError::usage("the scene has no [transition] table"))?;
    let kind = match kind.as_deref() {
        None => spec.kind,
        Some("direct") => PathKind::Direct,
        Some("geodesic") => PathKind::Geodesic,
        Some(other) => {
            return Err(AppError::usage(format!(
                "--kind must be direct or geodesic, found {other:?}"
            )))
        }
    };
    let frames = frames.unwrap_or(spec.frames);
    if frames < 2 {
        return Err(AppError::usage("--frames must be at least 2"));
    }
    if samples < 2 {
        return Err(AppError::usage("--samples must be at least 2"));
    }
    let path = build_path(&scene, kind)?;
    println!("kind: {kind}");
    println!("arc_length: {:.16e}", path.arc_length());
    println!(
        "frame_spacing: {:.16e}",
        path.arc_length() / (frames - 1) as f64
    );
    let resolution = vec![DEFAULT_REGION_RESOLUTION; scene.cfg.d()];
    let cost = transition_cost(
        &path,
        &scene.region,
        &resolution,
        &scene.cfg,
        &scene.spec,
        samples,
    );
    println!("cost: {cost:.16e}");
    for (i, u) in path.sample_uniform(frames).iter().enumerate() {
        println!("sample {i}");
        print_controls(u);
    }
    if let Some(dir) = render_dir {
        let files = render::write_transition_frames(
            &dir,
            "frame",
            &path,
            frames,
            &scene.region,
            &scene.resolution,
            &scene.cfg,
            &scene.spec,
        )?;
        println!("wrote {} frames to {}", files.len(), dir.display());
    }
    Ok(())
}

fn minima(scene_path: &Path, at: &str) -> Result<(), AppError> {
    let scene = parse_scene(scene_path)?;
    let x0 = parse_vector(at, scene.cfg.d(), "--at")? * scene.unit_scale;
    let syn = synthesize_min_controls(&x0, &scene.cfg, &scene.spec);
    println!("eigenvalue: {:.16e}", syn.eigenvalue);
    println!("multiplicity: {}", syn.multiplicity);
    print_controls(&syn.controls);
    Ok(())
}
