//! Black-box tests of the command-line interface: every subcommand, the
//! documented exit codes, and the bundled fixture files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use disc_recon::generator::{insert_band, lattice_patch, mixed_core, PatchShape, PatchSpec};
use disc_recon::io::{read_map, write_map};
use disc_recon::MapKind;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_disc-recon"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn repo_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[test]
fn generate_measure_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let dmap = dir.path().join("hex.dmap");
    let dist = dir.path().join("hex.dist");
    let back = dir.path().join("back.dmap");
    let trace = dir.path().join("trace.json");

    let out = run(&["generate", "--kind", "tri", "--shape", "hex", "--radius", "1", "-o",
        path_str(&dmap)]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let out = run(&["distances", path_str(&dmap), "-o", path_str(&dist)]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let out = run(&[
        "reconstruct",
        path_str(&dist),
        "--kind",
        "tri",
        "-o",
        path_str(&back),
        "--trace",
        path_str(&trace),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let wheel = lattice_patch(&PatchSpec {
        kind: MapKind::Triangulation,
        shape: PatchShape::Hex { radius: 1 },
        trim_seed: None,
    })
    .unwrap();
    let rebuilt = read_map(&back).unwrap();
    assert_eq!(rebuilt.labeled_code(), wheel.labeled_code());

    let trace_text = std::fs::read_to_string(&trace).unwrap();
    let value: serde_json::Value = serde_json::from_str(&trace_text).unwrap();
    assert!(value.get("root").is_some());
}

#[test]
fn fixture_pair_measures_identically_but_maps_differ() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["fixtures", "mixed-pair", "-o", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let map_a = dir.path().join("mixed_a.dmap");
    let map_b = dir.path().join("mixed_b.dmap");
    let dist_a = dir.path().join("a.dist");
    let dist_b = dir.path().join("b.dist");
    assert_eq!(run(&["distances", path_str(&map_a), "-o", path_str(&dist_a)]).status.code(),
        Some(0));
    assert_eq!(run(&["distances", path_str(&map_b), "-o", path_str(&dist_b)]).status.code(),
        Some(0));
    assert_eq!(
        std::fs::read(&dist_a).unwrap(),
        std::fs::read(&dist_b).unwrap(),
        "the two fixture maps must measure to byte-identical distance files"
    );
    assert_ne!(
        read_map(&map_a).unwrap().unlabeled_code(),
        read_map(&map_b).unwrap().unlabeled_code(),
        "the two fixture maps must not be isomorphic"
    );
}

#[test]
fn nonplanar_fixture_is_rejected_as_unrealizable() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["fixtures", "nonplanar", "-o", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let dist = dir.path().join("nonplanar.dist");
    let out = run(&["reconstruct", path_str(&dist), "--kind", "tri"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn checked_in_fixtures_match_regenerated_ones() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["fixtures", "mixed-pair", "-o", path_str(dir.path())]).status.code(),
        Some(0));
    assert_eq!(run(&["fixtures", "nonplanar", "-o", path_str(dir.path())]).status.code(),
        Some(0));
    for name in ["mixed_a.dmap", "mixed_b.dmap", "nonplanar.dist"] {
        let fresh = std::fs::read(dir.path().join(name)).unwrap();
        let checked_in = std::fs::read(repo_fixture(name))
            .unwrap_or_else(|e| panic!("fixtures/{name} must be kept in the repo: {e}"));
        assert_eq!(fresh, checked_in, "fixtures/{name} is stale; regenerate it");
    }
}

#[test]
fn verify_reports_pass_and_fail_states() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.dmap");
    assert_eq!(
        run(&["generate", "--kind", "quad", "--shape", "rectangle", "--a", "2", "--b", "3",
            "-o", path_str(&good)])
        .status
        .code(),
        Some(0)
    );
    let out = run(&["verify", path_str(&good), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rows.as_array().unwrap().iter().all(|r| r["status"] != "fail"));

    // A band insertion leaves four internal vertices that violate the degree
    // condition, so the degree check must fail and the exit code must be 1.
    let core = mixed_core();
    let quad_face = core.faces().iter().position(|f| f.len() == 4).unwrap();
    let banded = insert_band(&core, quad_face).unwrap();
    let bad = dir.path().join("bad.dmap");
    write_map(&bad, &banded).unwrap();
    let out = run(&["verify", path_str(&bad), "--checks", "degrees"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn exit_codes_cover_the_documented_failure_modes() {
    let dir = tempfile::tempdir().unwrap();

    // 3: missing input file.
    let out = run(&["distances", path_str(&dir.path().join("absent.dmap")), "-o",
        path_str(&dir.path().join("x.dist"))]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");

    // 3: unparseable input.
    let garbage = dir.path().join("garbage.dist");
    std::fs::write(&garbage, b"not json").unwrap();
    let out = run(&["reconstruct", path_str(&garbage)]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");

    // 3: unknown flags or subcommands.
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));

    // 0: help and version are not errors.
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    // 1: a metrically invalid matrix (odd distance in a quadrangulation).
    let hexmap = dir.path().join("hex.dmap");
    let hexdist = dir.path().join("hex.dist");
    assert_eq!(run(&["generate", "--kind", "tri", "--shape", "hex", "--radius", "1", "-o",
        path_str(&hexmap)])
        .status
        .code(), Some(0));
    assert_eq!(run(&["distances", path_str(&hexmap), "-o", path_str(&hexdist)]).status.code(),
        Some(0));
    let out = run(&["reconstruct", path_str(&hexdist), "--kind", "quad"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");

    // 4: enumeration budget exhausted.
    let out = run(&["oracle", "--kind", "tri", "--n", "8", "--max-internal", "3", "--node-cap",
        "5"]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");

    // 0: oracle counting and injectivity reports.
    let out = run(&["oracle", "--kind", "quad", "--n", "6", "--max-internal", "0"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["map_count"], 3);
    let out = run(&["oracle", "--kind", "tri", "--n", "6", "--max-internal", "2",
        "--injectivity"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], true);
}
