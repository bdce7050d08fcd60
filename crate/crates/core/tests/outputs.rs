use std::fs;

use swe_esdg::cases::{CaseName, Resolution};
use swe_esdg::config::SimulationConfig;
use swe_esdg::experiments::run_case;
use swe_esdg::output::{read_snapshot_csv, SUMMARY_SCHEMA_VERSION};

fn short_run(case: CaseName, resolution: Resolution, out: &std::path::Path) -> SimulationConfig {
    let mut cfg = SimulationConfig::new(case);
    cfg.degree = Some(2);
    cfg.resolution = Some(resolution);
    cfg.t_end = Some(0.01);
    cfg.out = Some(out.to_path_buf());
    cfg.snapshots = vec![0.005];
    cfg.vtk = true;
    cfg
}

#[test]
fn snapshots_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_case(&short_run(CaseName::DamBreak, Resolution::Grid(6, 4), dir.path())).unwrap();
    let rows = read_snapshot_csv(&dir.path().join("snapshot_t0.010000.csv")).unwrap();
    assert_eq!(rows.len(), run.disc.nq() * run.disc.num_elements());
    for (k, (x, u, b)) in rows.iter().enumerate() {
        assert_eq!(*x, run.disc.coords[k]);
        assert_eq!(*u, run.state[k]);
        assert_eq!(*b, run.disc.bathymetry[k]);
    }
    for t in ["0.000000", "0.005000", "0.010000"] {
        assert!(dir.path().join(format!("snapshot_t{t}.csv")).exists());
        let vtk = fs::read_to_string(dir.path().join(format!("snapshot_t{t}.vtk"))).unwrap();
        assert!(vtk.starts_with("# vtk DataFile Version"));
        assert!(vtk.contains(&format!("POINT_DATA {}", rows.len())));
    }
}

#[test]
fn one_dimensional_snapshots_omit_the_second_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_case(&short_run(CaseName::ParabolicBowl, Resolution::Elements(8), dir.path())).unwrap();
    let text = fs::read_to_string(dir.path().join("snapshot_t0.010000.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("x,h,hu,b"));
    assert_eq!(text.lines().count(), run.disc.num_nodes() + 1);
    assert!(!dir.path().join("snapshot_t0.010000.vtk").exists());
}

#[test]
fn summary_records_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_case(&short_run(
        CaseName::TranslatingVortex,
        Resolution::Grid(4, 2),
        dir.path(),
    ))
    .unwrap();
    let text = fs::read_to_string(dir.path().join("summary.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema_version"], SUMMARY_SCHEMA_VERSION);
    let steps = v["steps"].as_u64().unwrap() as usize;
    assert_eq!(steps, run.summary.steps);
    for key in ["mass", "entropy", "min_h", "time"] {
        assert_eq!(v["history"][key].as_array().unwrap().len(), steps + 1, "{key}");
    }
    assert_eq!(v["history"]["limited_elements"].as_array().unwrap().len(), steps);
    assert!(v["error"]["h"].as_f64().unwrap() > 0.0);
    assert_eq!(v["case"]["name"], "translating_vortex");
}

#[test]
fn dam_summary_lists_the_snapped_wall() {
    let dir = tempfile::tempdir().unwrap();
    run_case(&short_run(CaseName::DamBreak, Resolution::Grid(12, 8), dir.path())).unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let walls = v["internal_walls"].as_array().unwrap();
    assert!(!walls.is_empty());
}

#[test]
fn unwritable_output_reports_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let Err(err) = run_case(&short_run(
        CaseName::DamBreak,
        Resolution::Grid(6, 4),
        &blocker.join("out"),
    )) else {
        panic!("run wrote below a file");
    };
    assert!(err.to_string().contains("file"), "{err}");
}
