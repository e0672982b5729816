//! Command-line surface for generating, measuring, reconstructing, and
//! checking disc maps.
//!
//! Exit codes: 0 success, 1 validation failure, 2 not realizable, 3 I/O or
//! parse error, 4 enumeration budget exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use disc_recon::boundary_metrics::{
    boundary_distances, chordless_diameter_check, equidistant_triangle_scan, four_point_check,
    layer_inequality_check, mixed_boundary_bound_check, quad_edge_bounds_check, validate_matrix,
    MetricError,
};
use disc_recon::generator::{
    lattice_patch, layered_map, mixed_counterexample_pair, nonplanar_metric_fixture, LayerSpec,
    PatchShape, PatchSpec,
};
use disc_recon::io::{read_map, read_matrix, write_json, write_map, write_matrix};
use disc_recon::oracle::{enumerate_maps, injectivity_report, EnumerationBudget, OracleError};
use disc_recon::quad_reconstruct::{reconstruct_quadrangulation, QuadError};
use disc_recon::tri_reconstruct::{reconstruct_triangulation, TriError};
use disc_recon::{DiscMap, MapKind};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NOT_REALIZABLE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_BUDGET: u8 = 4;

fn parse_kind(s: &str) -> Result<MapKind, String> {
    match s {
        "tri" => Ok(MapKind::Triangulation),
        "quad" => Ok(MapKind::Quadrangulation),
        "mixed" => Ok(MapKind::Mixed),
        other => Err(format!("unknown kind `{other}` (expected tri, quad, or mixed)")),
    }
}

#[derive(Parser)]
#[command(
    name = "disc-recon",
    version,
    about = "Generate, measure, and reconstruct disc triangulations and quadrangulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a lattice patch or a layered disc as a .dmap file.
    Generate {
        /// Map kind: tri or quad.
        #[arg(long, value_parser = parse_kind)]
        kind: MapKind,
        /// Patch shape: hex, parallelogram, or rectangle.
        #[arg(long, conflicts_with = "layers")]
        shape: Option<String>,
        /// Hex patch radius.
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// First side length for parallelogram/rectangle shapes.
        #[arg(long, default_value_t = 2)]
        a: usize,
        /// Second side length for parallelogram/rectangle shapes.
        #[arg(long, default_value_t = 2)]
        b: usize,
        /// Build a layered disc with this many layers instead of a patch.
        #[arg(long)]
        layers: Option<usize>,
        /// Comma-separated internal degrees to sample, e.g. 6,7.
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<usize>,
        /// Seed for the layered degree sampler.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional seed for random boundary trimming of a patch.
        #[arg(long)]
        trim_seed: Option<u64>,
        /// Output path.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compute the boundary distance matrix of a .dmap file.
    Distances {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Rebuild the unique admissible map realizing a .dist matrix.
    Reconstruct {
        input: PathBuf,
        /// Override the kind recorded in the file.
        #[arg(long, value_parser = parse_kind)]
        kind: Option<MapKind>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the reduction trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run structural checks on a .dmap file and print a pass/fail table.
    Verify {
        input: PathBuf,
        /// Comma-separated checks: degrees, chordless, layer, equidistant,
        /// bounds, fourpoint.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "degrees,chordless,layer,equidistant,bounds,fourpoint"
        )]
        checks: Vec<String>,
        /// Emit the table as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Exhaustively enumerate small maps; optionally check injectivity.
    Oracle {
        #[arg(long, value_parser = parse_kind)]
        kind: MapKind,
        /// Boundary length.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        max_internal: usize,
        /// Check that boundary matrices separate the enumerated maps and
        /// that reconstruction returns each one.
        #[arg(long)]
        injectivity: bool,
        /// Enumerate without the internal-degree condition.
        #[arg(long)]
        degree_off: bool,
        /// Enumerate only chordless maps.
        #[arg(long)]
        chordless: bool,
        /// Abort after this many expansion steps.
        #[arg(long, default_value_t = 100_000_000)]
        node_cap: u64,
    },
    /// Write the bundled fixture files into a directory.
    Fixtures {
        /// Which fixture set: mixed-pair or nonplanar.
        which: String,
        /// Output directory.
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Serialize)]
struct CheckResult {
    check: String,
    status: &'static str,
    detail: String,
}

fn check_row(name: &str, outcome: Result<Result<bool, String>, MetricError>) -> CheckResult {
    let (status, detail) = match outcome {
        Ok(Ok(true)) => ("pass", String::new()),
        Ok(Ok(false)) => ("fail", String::new()),
        Ok(Err(witness)) => ("fail", witness),
        Err(e) => ("skip", e.to_string()),
    };
    CheckResult { check: name.to_string(), status, detail }
}

fn run_checks(map: &DiscMap, names: &[String]) -> Result<Vec<CheckResult>, String> {
    let mut rows = Vec::new();
    for name in names {
        let row = match name.as_str() {
            "degrees" => {
                let report = map.curvature_report();
                let bad: Vec<usize> = report
                    .per_vertex
                    .iter()
                    .filter(|c| !c.admissible)
                    .map(|c| c.vertex)
                    .collect();
                check_row(
                    "degrees",
                    Ok(if bad.is_empty() {
                        Ok(true)
                    } else {
                        Err(format!("inadmissible internal vertices: {bad:?}"))
                    }),
                )
            }
            "chordless" => {
                let chords = map.chords();
                check_row(
                    "chordless",
                    Ok(if chords.is_empty() {
                        Ok(true)
                    } else {
                        Err(format!("chords between boundary positions: {chords:?}"))
                    }),
                )
            }
            "layer" => match map.kind() {
                MapKind::Triangulation => {
                    check_row("layer", layer_inequality_check(map, 6.0).map(Ok))
                }
                _ => CheckResult {
                    check: "layer".into(),
                    status: "skip",
                    detail: "layer inequality applies to triangulations".into(),
                },
            },
            "equidistant" => check_row(
                "equidistant",
                Ok(match equidistant_triangle_scan(map) {
                    None => Ok(true),
                    Some((face, vertex)) => Err(format!(
                        "vertex {vertex} is equidistant from the corners of face {face}"
                    )),
                }),
            ),
            "bounds" => {
                let outcome = match map.kind() {
                    MapKind::Triangulation => chordless_diameter_check(map),
                    MapKind::Quadrangulation => chordless_diameter_check(map)
                        .and_then(|a| quad_edge_bounds_check(map).map(|b| a && b)),
                    MapKind::Mixed => mixed_boundary_bound_check(map),
                };
                check_row("bounds", outcome.map(Ok))
            }
            "fourpoint" => {
                let violations = four_point_check(&boundary_distances(map));
                check_row(
                    "fourpoint",
                    Ok(if violations.is_empty() {
                        Ok(true)
                    } else {
                        Err(format!("violated at boundary positions {:?}", violations[0]))
                    }),
                )
            }
            other => return Err(format!("unknown check `{other}`")),
        };
        rows.push(row);
    }
    Ok(rows)
}

fn generate(cmd: &Command) -> Result<(), (u8, String)> {
    let Command::Generate {
        kind,
        shape,
        radius,
        a,
        b,
        layers,
        degrees,
        seed,
        trim_seed,
        output,
    } = cmd
    else {
        unreachable!()
    };
    let map = if let Some(layers) = layers {
        layered_map(&LayerSpec {
            kind: *kind,
            layers: *layers,
            degrees: degrees.clone(),
            seed: *seed,
        })
        .map_err(|e| (EXIT_VALIDATION, e.to_string()))?
    } else {
        let shape = match shape.as_deref() {
            Some("hex") => PatchShape::Hex { radius: *radius },
            Some("parallelogram") => PatchShape::Parallelogram { a: *a, b: *b },
            Some("rectangle") => PatchShape::Rectangle { a: *a, b: *b },
            Some(other) => return Err((EXIT_IO, format!("unknown shape `{other}`"))),
            None => return Err((EXIT_IO, "pass either --shape or --layers".into())),
        };
        lattice_patch(&PatchSpec { kind: *kind, shape, trim_seed: *trim_seed })
            .map_err(|e| (EXIT_VALIDATION, e.to_string()))?
    };
    write_map(output, &map).map_err(|e| (EXIT_IO, e.to_string()))
}

fn reconstruct(cmd: &Command) -> Result<(), (u8, String)> {
    let Command::Reconstruct { input, kind, output, trace } = cmd else { unreachable!() };
    let (d, file_kind) = read_matrix(input).map_err(|e| (EXIT_IO, e.to_string()))?;
    let kind = kind.unwrap_or(file_kind);
    if kind == MapKind::Mixed {
        return Err((
            EXIT_VALIDATION,
            "mixed maps are not determined by their boundary distances; pick tri or quad".into(),
        ));
    }
    let violations = validate_matrix(&d, kind);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err((EXIT_VALIDATION, lines.join("\n")));
    }
    let (map, trace_json) = match kind {
        MapKind::Triangulation => reconstruct_triangulation(&d)
            .map(|(m, t)| (m, serde_json::to_value(&t)))
            .map_err(|e| match e {
                TriError::NotRealizable(msg) => (EXIT_NOT_REALIZABLE, msg),
                other => (EXIT_VALIDATION, other.to_string()),
            })?,
        _ => reconstruct_quadrangulation(&d)
            .map(|(m, t)| (m, serde_json::to_value(&t)))
            .map_err(|e| match e {
                QuadError::NotRealizable(msg) => (EXIT_NOT_REALIZABLE, msg),
                other => (EXIT_VALIDATION, other.to_string()),
            })?,
    };
    if let Some(path) = output {
        write_map(path, &map).map_err(|e| (EXIT_IO, e.to_string()))?;
    }
    if let Some(path) = trace {
        let value = trace_json.map_err(|e| (EXIT_IO, e.to_string()))?;
        write_json(path, &value).map_err(|e| (EXIT_IO, e.to_string()))?;
    }
    if output.is_none() && trace.is_none() {
        println!(
            "realizable: {} vertices, {} faces",
            map.vertex_count(),
            map.faces().len()
        );
    }
    Ok(())
}

fn oracle(cmd: &Command) -> Result<(), (u8, String)> {
    let Command::Oracle { kind, n, max_internal, injectivity, degree_off, chordless, node_cap } =
        cmd
    else {
        unreachable!()
    };
    let budget = EnumerationBudget {
        boundary_len: *n,
        max_internal: *max_internal,
        kind: *kind,
        degree_condition: !degree_off,
        chordless: *chordless,
        node_cap: *node_cap,
    };
    let map_err = |e: OracleError| match e {
        OracleError::BudgetExceeded(msg) => (EXIT_BUDGET, msg),
        OracleError::BadBudget(msg) => (EXIT_VALIDATION, msg),
    };
    if *injectivity {
        let report = injectivity_report(&budget).map_err(map_err)?;
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        if !report.pass {
            return Err((EXIT_VALIDATION, "injectivity check failed".into()));
        }
    } else {
        let maps = enumerate_maps(&budget).map_err(map_err)?;
        println!(
            "{}",
            serde_json::json!({
                "kind": kind,
                "boundary_len": n,
                "max_internal": max_internal,
                "map_count": maps.len(),
            })
        );
    }
    Ok(())
}

fn fixtures(which: &str, output: &PathBuf) -> Result<(), (u8, String)> {
    std::fs::create_dir_all(output).map_err(|e| (EXIT_IO, e.to_string()))?;
    match which {
        "mixed-pair" => {
            let (a, b) = mixed_counterexample_pair();
            write_map(&output.join("mixed_a.dmap"), &a)
                .map_err(|e| (EXIT_IO, e.to_string()))?;
            write_map(&output.join("mixed_b.dmap"), &b)
                .map_err(|e| (EXIT_IO, e.to_string()))?;
        }
        "nonplanar" => {
            let d = nonplanar_metric_fixture();
            write_matrix(&output.join("nonplanar.dist"), &d, MapKind::Triangulation)
                .map_err(|e| (EXIT_IO, e.to_string()))?;
        }
        other => return Err((EXIT_IO, format!("unknown fixture set `{other}`"))),
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), (u8, String)> {
    match &cli.command {
        cmd @ Command::Generate { .. } => generate(cmd),
        Command::Distances { input, output } => {
            let map = read_map(input).map_err(|e| (EXIT_IO, e.to_string()))?;
            let d = boundary_distances(&map);
            write_matrix(output, &d, map.kind()).map_err(|e| (EXIT_IO, e.to_string()))
        }
        cmd @ Command::Reconstruct { .. } => reconstruct(cmd),
        Command::Verify { input, checks, json } => {
            let map = read_map(input).map_err(|e| (EXIT_IO, e.to_string()))?;
            let rows = run_checks(&map, checks).map_err(|e| (EXIT_IO, e))?;
            if *json {
                println!("{}", serde_json::to_string_pretty(&rows).unwrap());
            } else {
                for row in &rows {
                    let detail = if row.detail.is_empty() {
                        String::new()
                    } else {
                        format!("  ({})", row.detail)
                    };
                    println!("{:<12} {}{}", row.check, row.status.to_uppercase(), detail);
                }
            }
            if rows.iter().any(|r| r.status == "fail") {
                return Err((EXIT_VALIDATION, "one or more checks failed".into()));
            }
            Ok(())
        }
        cmd @ Command::Oracle { .. } => oracle(cmd),
        Command::Fixtures { which, output } => fixtures(which, output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_IO,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
