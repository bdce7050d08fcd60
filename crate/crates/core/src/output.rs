//! CSV snapshots, legacy VTK point data and the JSON run summary.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::discretization::Discretization;
use crate::error::{Result, SolverError};
use crate::physics::ConservedState;

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| SolverError::io(dir, e))?;
    }
    let f = fs::File::create(path).map_err(|e| SolverError::io(path, e))?;
    Ok(BufWriter::new(f))
}

/// `x,h,hu,b` in 1D and `x,y,h,hu,hv,b` in 2D, one row per node.
pub fn write_snapshot_csv(path: &Path, disc: &Discretization, state: &[ConservedState]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| SolverError::io(path, e);
    let two_d = disc.dim() == 2;
    if two_d {
        writeln!(w, "x,y,h,hu,hv,b").map_err(io)?;
    } else {
        writeln!(w, "x,h,hu,b").map_err(io)?;
    }
    for ((x, u), b) in disc.coords.iter().zip(state).zip(&disc.bathymetry) {
        if two_d {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                x[0], x[1], u.h, u.hu, u.hv, b
            )
        } else {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e}", x[0], u.h, u.hu, b)
        }
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

/// One parsed CSV row: coordinates, state and bathymetry.
pub type SnapshotRow = ([f64; 2], ConservedState, f64);

pub fn read_snapshot_csv(path: &Path) -> Result<Vec<SnapshotRow>> {
    let text = fs::read_to_string(path).map_err(|e| SolverError::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let two_d = header.starts_with("x,y");
    lines
        .map(|line| {
            let v: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| SolverError::Config(format!("{}: bad row '{line}': {e}", path.display())))?;
            match (two_d, v.len()) {
                (true, 6) => Ok(([v[0], v[1]], ConservedState::new(v[2], v[3], v[4]), v[5])),
                (false, 4) => Ok(([v[0], 0.0], ConservedState::new(v[1], v[2], 0.0), v[3])),
                _ => Err(SolverError::Config(format!("{}: bad row '{line}'", path.display()))),
            }
        })
        .collect()
}

/// Legacy ASCII VTK polydata: one vertex per node with point data.
pub fn write_vtk(path: &Path, disc: &Discretization, state: &[ConservedState]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| SolverError::io(path, e);
    let n = disc.num_nodes();
    let mut body = String::new();
    body.push_str("# vtk DataFile Version 3.0\nshallow water nodal solution\nASCII\nDATASET POLYDATA\n");
    body.push_str(&format!("POINTS {n} double\n"));
    for x in &disc.coords {
        body.push_str(&format!("{:.16e} {:.16e} 0\n", x[0], x[1]));
    }
    body.push_str(&format!("VERTICES {n} {}\n", 2 * n));
    for i in 0..n {
        body.push_str(&format!("1 {i}\n"));
    }
    body.push_str(&format!("POINT_DATA {n}\n"));
    let fields: [(&str, Box<dyn Fn(usize) -> f64>); 4] = [
        ("h", Box::new(|i| state[i].h)),
        ("b", Box::new(|i| disc.bathymetry[i])),
        ("surface", Box::new(|i| state[i].h + disc.bathymetry[i])),
        ("hu", Box::new(|i| state[i].hu)),
    ];
    for (name, f) in fields.iter() {
        body.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
        for i in 0..n {
            body.push_str(&format!("{:.16e}\n", f(i)));
        }
    }
    body.push_str("VECTORS momentum double\n");
    for u in state {
        body.push_str(&format!("{:.16e} {:.16e} 0\n", u.hu, u.hv));
    }
    w.write_all(body.as_bytes()).map_err(io)?;
    w.flush().map_err(io)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| SolverError::io(path, e))?;
    w.flush().map_err(|e| SolverError::io(path, e))
}

/// Rows of a convergence table.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| SolverError::io(path, e);
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}
