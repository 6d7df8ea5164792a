//! Plain-text artifacts: field dumps, residual histories, timing reports and
//! convergence tables.
//!
//! Field dump layout:
//!
//! ```text
//! # case vortex
//! # mode rcd
//! # nx 100
//! # ny 100
//! # dx 1.0000000000000000e-1
//! # dy 1.0000000000000000e-1
//! # t 2.0000000000000000e0
//! # gamma 1.3999999999999999e0
//! # x y rho u v p
//! <x> <y> <rho> <u> <v> <p>      nx*ny rows, x varying fastest
//! ```
//!
//! Floats are written with 17 significant digits so they parse back exactly.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rcd_core::solver::ResidualHistory;
use rcd_core::{CellField, GasModel};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct DumpHeader {
    pub case: String,
    pub mode: String,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub t: f64,
    pub gamma: f64,
}

/// A field dump as read back from disk. Each record is `[x, y, rho, u, v, p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub header: DumpHeader,
    pub records: Vec<[f64; 6]>,
}

pub fn write_field<W: Write>(
    mut w: W,
    field: &CellField,
    case: &str,
    mode: &str,
    t: f64,
    gas: &GasModel,
) -> Result<(), CliError> {
    let g = *field.grid();
    let mut text = String::with_capacity(64 * g.cell_count() + 256);
    use std::fmt::Write as _;
    let _ = writeln!(text, "# case {case}");
    let _ = writeln!(text, "# mode {mode}");
    let _ = writeln!(text, "# nx {}", g.nx);
    let _ = writeln!(text, "# ny {}", g.ny);
    let _ = writeln!(text, "# dx {:.16e}", g.dx);
    let _ = writeln!(text, "# dy {:.16e}", g.dy);
    let _ = writeln!(text, "# t {t:.16e}");
    let _ = writeln!(text, "# gamma {:.16e}", gas.gamma());
    let _ = writeln!(text, "# x y rho u v p");
    for (i, j, q) in field.interior() {
        let (x, y) = g.center(i as isize, j as isize);
        let p = gas.primitive_from_conserved(&q)?;
        let _ = writeln!(
            text,
            "{x:.16e} {y:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            p.rho, p.u, p.v, p.p
        );
    }
    w.write_all(text.as_bytes()).map_err(CliError::Write)
}

pub fn write_field_file(
    path: &Path,
    field: &CellField,
    case: &str,
    mode: &str,
    t: f64,
    gas: &GasModel,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_field(&mut buf, field, case, mode, t, gas)?;
    write_to(path, |f| f.write_all(&buf))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

pub fn read_field(path: &Path) -> Result<FieldDump, CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut keys: Vec<(String, String)> = Vec::new();
    let mut records = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let lineno = n + 1;
        if let Some(rest) = line.strip_prefix('#') {
            let mut parts = rest.trim().splitn(2, ' ');
            let key = parts.next().unwrap_or_default().to_string();
            let value = parts.next().unwrap_or_default().to_string();
            keys.push((key, value));
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut rec = [0.0; 6];
        let mut it = line.split_ascii_whitespace();
        for slot in rec.iter_mut() {
            let tok = it.next().ok_or_else(|| parse_err(path, lineno, "expected 6 columns"))?;
            *slot = tok
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad number `{tok}`")))?;
        }
        if it.next().is_some() {
            return Err(parse_err(path, lineno, "expected 6 columns"));
        }
        records.push(rec);
    }
    let get = |k: &str| {
        keys.iter()
            .find(|(key, _)| key == k)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| parse_err(path, 0, format!("missing header key `{k}`")))
    };
    let num = |k: &str| -> Result<f64, CliError> {
        get(k)?
            .parse()
            .map_err(|_| parse_err(path, 0, format!("bad header value for `{k}`")))
    };
    let int = |k: &str| -> Result<usize, CliError> {
        get(k)?
            .parse()
            .map_err(|_| parse_err(path, 0, format!("bad header value for `{k}`")))
    };
    let header = DumpHeader {
        case: get("case")?,
        mode: get("mode")?,
        nx: int("nx")?,
        ny: int("ny")?,
        dx: num("dx")?,
        dy: num("dy")?,
        t: num("t")?,
        gamma: num("gamma")?,
    };
    if records.len() != header.nx * header.ny {
        return Err(parse_err(
            path,
            0,
            format!("{} records, header promises {}", records.len(), header.nx * header.ny),
        ));
    }
    Ok(FieldDump { header, records })
}

/// `step,time,rmax`, one row per step.
pub fn write_residuals<W: Write>(w: W, history: &ResidualHistory) -> io::Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "step,time,rmax")?;
    for s in &history.samples {
        writeln!(w, "{},{:.16e},{:.16e}", s.step, s.time, s.rmax)?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub case: String,
    pub mode: String,
    pub cells: usize,
    pub steps: usize,
    /// Wall time of the integration loop, output excluded.
    pub cpu_seconds: f64,
}

pub fn write_timing<W: Write>(mut w: W, report: &TimingReport) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)
}

/// One grid of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub l1: f64,
    pub linf: f64,
    pub cpu_seconds: f64,
}

/// `cells,l1,l1_order,linf,linf_order,cpu_seconds`; orders are blank on the
/// first row.
pub fn write_table<W: Write>(w: W, rows: &[TableRow]) -> io::Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "cells,l1,l1_order,linf,linf_order,cpu_seconds")?;
    let mut prev: Option<&TableRow> = None;
    for r in rows {
        let (o1, oinf) = match prev {
            Some(p) => (
                format!("{:.4}", rcd_core::cases::convergence_order(p.l1, r.l1, p.n, r.n)),
                format!("{:.4}", rcd_core::cases::convergence_order(p.linf, r.linf, p.n, r.n)),
            ),
            None => (String::new(), String::new()),
        };
        writeln!(
            w,
            "{}x{},{:.6e},{},{:.6e},{},{:.3}",
            r.n, r.n, r.l1, o1, r.linf, oinf, r.cpu_seconds
        )?;
        prev = Some(r);
    }
    w.flush()
}

/// Opens `path` for writing and runs `f`, attaching the path to any error.
pub fn write_to(path: &Path, f: impl FnOnce(&mut File) -> io::Result<()>) -> Result<(), CliError> {
    let wrap = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = File::create(path).map_err(wrap)?;
    f(&mut file).map_err(wrap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rcd_core::solver::ResidualSample;
    use rcd_core::{CartesianGrid, Primitive};

    #[test]
    fn empty_history_is_header_only() {
        let mut buf = Vec::new();
        write_residuals(&mut buf, &ResidualHistory::default()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "step,time,rmax\n");
    }

    #[test]
    fn residual_rows() {
        let h = ResidualHistory {
            samples: vec![ResidualSample { step: 1, time: 0.5, rmax: 1e-3 }],
        };
        let mut buf = Vec::new();
        write_residuals(&mut buf, &h).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "1,5.0000000000000000e-1,1.0000000000000000e-3");
    }

    #[test]
    fn uniform_dump_rows_equal() {
        let gas = GasModel::default();
        let grid = CartesianGrid::new(0.0, 1.0, 0.0, 1.0, 3, 2).unwrap();
        let f = CellField::uniform(&grid, gas.conserved_from_primitive(&Primitive::new(1.0, 0.5, -0.25, 2.0)));
        let mut buf = Vec::new();
        write_field(&mut buf, &f, "vortex", "rcd", 0.0, &gas).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 6);
        let tails: Vec<String> = rows.iter().map(|r| r.split(' ').skip(2).collect::<Vec<_>>().join(" ")).collect();
        assert!(tails.iter().all(|t| t == &tails[0]));
    }

    #[test]
    fn table_layout() {
        let rows = [
            TableRow { n: 50, l1: 8e-4, linf: 1e-2, cpu_seconds: 1.0 },
            TableRow { n: 100, l1: 1e-4, linf: 2.5e-3, cpu_seconds: 8.0 },
        ];
        let mut buf = Vec::new();
        write_table(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "cells,l1,l1_order,linf,linf_order,cpu_seconds");
        assert_eq!(lines[1], "50x50,8.000000e-4,,1.000000e-2,,1.000");
        assert_eq!(lines[2], "100x100,1.000000e-4,3.0000,2.500000e-3,2.0000,8.000");
    }

    #[test]
    fn timing_json() {
        let r = TimingReport {
            case: "vortex".into(),
            mode: "scd".into(),
            cells: 2500,
            steps: 68,
            cpu_seconds: 0.25,
        };
        let mut buf = Vec::new();
        write_timing(&mut buf, &r).unwrap();
        let back: TimingReport = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, r);
    }
}
