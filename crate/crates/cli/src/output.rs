//! CSV writers. Floats use 17 significant digits so files round-trip bit for bit.

use std::fs::File;
use std::path::Path;

use hystwave_core::analysis::{mass, total_variation_u};
use hystwave_core::riemann::{Branch, FanState, RiemannFan};
use hystwave_core::wavefront::{EventRecord, FrontRecord};
use hystwave_core::{Cell, FrontKind, MemoryCurve, PiecewiseState};

use crate::CliError;

pub type Writer = csv::Writer<File>;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn create(path: &Path, header: &[&str]) -> Result<Writer, CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    w.write_record(header)?;
    Ok(w)
}

pub fn finish(mut w: Writer) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub const FAN_HEADER: [&str; 7] = ["xi_lo", "xi_hi", "kind", "u_lo", "u_hi", "branch", "pivot"];

/// One row per wave: the stationary jump first, then the pieces of `0 < x/t < ∞`.
pub fn write_fan(path: &Path, fan: &RiemannFan) -> Result<(), CliError> {
    let mut w = create(path, &FAN_HEADER)?;
    if !fan.is_trivial() {
        let u_l = fan.data().u_left;
        if fan.stationary.is_some() {
            w.write_record([num(0.0), num(0.0), "stationary".into(), num(u_l), num(u_l), String::new(), String::new()])?;
        }
        for p in &fan.pieces {
            let row = match p.state {
                FanState::Constant(v) => {
                    [num(p.lo), num(p.hi), "constant".into(), num(v), num(v), String::new(), String::new()]
                }
                FanState::Rarefaction { branch, u_lo_xi, u_hi_xi, .. } => {
                    let (name, pivot) = match branch {
                        Branch::Staircase(m) => ("staircase", num(m)),
                        Branch::AntiDiagonal => ("anti_diagonal", String::new()),
                    };
                    [num(p.lo), num(p.hi), "rarefaction".into(), num(u_lo_xi), num(u_hi_xi), name.into(), pivot]
                }
            };
            w.write_record(row)?;
        }
    }
    finish(w)
}

pub const PROFILE_HEADER: [&str; 3] = ["x_over_t", "u", "w"];

pub fn write_profile(path: &Path, rows: &[(f64, Cell)]) -> Result<(), CliError> {
    let mut w = create(path, &PROFILE_HEADER)?;
    for (xi, c) in rows {
        w.write_record([num(*xi), num(c.u), num(c.w)])?;
    }
    finish(w)
}

pub const EVENT_HEADER: [&str; 7] =
    ["time", "position", "kind", "fronts_in", "fronts_out", "u_fronts_before", "u_fronts_after"];

pub fn write_events(path: &Path, events: &[EventRecord]) -> Result<(), CliError> {
    let mut w = create(path, &EVENT_HEADER)?;
    for e in events {
        w.write_record([
            num(e.time),
            num(e.position),
            e.kind.name().into(),
            e.fronts_in.to_string(),
            e.fronts_out.to_string(),
            e.u_fronts_before.to_string(),
            e.u_fronts_after.to_string(),
        ])?;
    }
    finish(w)
}

pub const SNAPSHOT_HEADER: [&str; 5] = ["x_left", "x_right", "u", "w", "curve"];

pub fn write_snapshot(path: &Path, state: &PiecewiseState) -> Result<(), CliError> {
    let mut w = create(path, &SNAPSHOT_HEADER)?;
    for (lo, hi, c) in state.intervals() {
        w.write_record([num(lo), num(hi), num(c.u), num(c.w), c.curve.to_string()])?;
    }
    finish(w)
}

pub const CHECKPOINT_HEADER: [&str; 6] = ["index", "time", "file", "tv_u", "fronts", "mass"];

pub fn write_checkpoints(path: &Path, rows: &[(f64, PiecewiseState)]) -> Result<(), CliError> {
    let mut w = create(path, &CHECKPOINT_HEADER)?;
    for (i, (t, s)) in rows.iter().enumerate() {
        let m = mass(s).map(num).unwrap_or_else(|_| "nan".into());
        w.write_record([
            i.to_string(),
            num(*t),
            snapshot_name(i),
            num(total_variation_u(s)),
            s.fronts.len().to_string(),
            m,
        ])?;
    }
    finish(w)
}

pub fn snapshot_name(i: usize) -> String {
    format!("snapshot_{i}.csv")
}

pub const FRONT_HEADER: [&str; 12] = [
    "id",
    "kind",
    "birth_time",
    "death_time",
    "origin_x",
    "speed",
    "u_left",
    "w_left",
    "curve_left",
    "u_right",
    "w_right",
    "curve_right",
];

pub fn write_fronts(path: &Path, fronts: &[FrontRecord]) -> Result<(), CliError> {
    let mut w = create(path, &FRONT_HEADER)?;
    for f in fronts {
        w.write_record([
            f.id.to_string(),
            f.kind.name().into(),
            num(f.birth_time),
            num(f.death_time),
            num(f.origin_x),
            num(f.speed),
            num(f.left.u),
            num(f.left.w),
            f.left.curve.to_string(),
            num(f.right.u),
            num(f.right.w),
            f.right.curve.to_string(),
        ])?;
    }
    finish(w)
}

fn field(rec: &csv::StringRecord, i: usize, line: u64) -> Result<&str, CliError> {
    rec.get(i).ok_or_else(|| CliError::Input(format!("fronts file line {line}: missing column {}", FRONT_HEADER[i])))
}

fn parse_num(text: &str, line: u64) -> Result<f64, CliError> {
    text.trim().parse().map_err(|e| CliError::Input(format!("fronts file line {line}: bad number {text:?}: {e}")))
}

/// Reads a history written by [`write_fronts`]. Outputs `w` are recomputed from the curves.
pub fn read_fronts(path: &Path) -> Result<Vec<FrontRecord>, CliError> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let header = rd.headers().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?.clone();
    if header.iter().collect::<Vec<_>>() != FRONT_HEADER {
        return Err(CliError::Input(format!("{}: unexpected header {:?}", path.display(), header)));
    }
    let mut out = Vec::new();
    for (row, rec) in rd.records().enumerate() {
        let line = row as u64 + 2;
        let rec = rec.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let id: usize = field(&rec, 0, line)?
            .parse()
            .map_err(|e| CliError::Input(format!("fronts file line {line}: bad id: {e}")))?;
        if id != row {
            return Err(CliError::Input(format!("fronts file line {line}: id {id} out of sequence")));
        }
        let kind = match field(&rec, 1, line)? {
            "u_shock" => FrontKind::UShock,
            "z_stationary" => FrontKind::ZStationary,
            other => return Err(CliError::Input(format!("fronts file line {line}: unknown kind {other:?}"))),
        };
        let cell = |u: usize, c: usize| -> Result<Cell, CliError> {
            let curve: MemoryCurve = field(&rec, c, line)?
                .parse()
                .map_err(|e| CliError::Input(format!("fronts file line {line}: {e}")))?;
            Cell::new(parse_num(field(&rec, u, line)?, line)?, curve)
                .map_err(|e| CliError::Input(format!("fronts file line {line}: {e}")))
        };
        out.push(FrontRecord {
            id,
            kind,
            birth_time: parse_num(field(&rec, 2, line)?, line)?,
            death_time: parse_num(field(&rec, 3, line)?, line)?,
            origin_x: parse_num(field(&rec, 4, line)?, line)?,
            speed: parse_num(field(&rec, 5, line)?, line)?,
            left: cell(6, 8)?,
            right: cell(9, 11)?,
        });
    }
    Ok(out)
}

pub const REPORT_HEADER: [&str; 5] = ["check", "value", "bound", "relation", "pass"];

pub const ORACLE_HEADER: [&str; 5] = ["n", "max_abs_dw", "dw_bound", "max_abs_dpsi", "mean_abs_dw"];
