//! JSON envelopes and CSV writers shared by the subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use pressure_lab::fields::{Chart, GridField};
use pressure_lab::pressure::TraceCurve;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliResult;

pub const SCHEMA: &str = "pressure-lab/1";

#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub passed: bool,
    pub config: &'a ExperimentConfig,
    #[serde(flatten)]
    pub body: T,
}

/// Shortest round-trip float text; empty for `None`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn out_path(dir: &Path, name: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<PathBuf> {
    let path = out_path(dir, name)?;
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> CliResult<PathBuf> {
    let path = out_path(dir, name)?;
    fs::write(&path, text)?;
    Ok(path)
}

/// `i,j,x1,x2,value…` per node of an interior field.
pub fn field_csv(f: &GridField) -> String {
    let mut out = String::from("i,j,x1,x2");
    let nc = f.comps().len();
    for c in 0..nc {
        if nc == 1 {
            out.push_str(",value");
        } else {
            let _ = write!(out, ",c{c}");
        }
    }
    out.push('\n');
    let Chart::Interior(g) = f.chart() else {
        return out;
    };
    for i in 0..g.n_rho() {
        for j in 0..g.n_phi() {
            let x = g.node(i, j).x;
            let _ = write!(out, "{i},{j},{},{}", num(x[0]), num(x[1]));
            for c in 0..nc {
                let _ = write!(out, ",{}", num(f.comp(c)[[i, j]]));
            }
            out.push('\n');
        }
    }
    out
}

pub fn trace_csv(t: &TraceCurve) -> String {
    let mut out = String::from("s,distance\n");
    for (s, d) in t.s.iter().zip(&t.distance) {
        let _ = writeln!(out, "{},{}", num(*s), num(*d));
    }
    let _ = writeln!(out, "0,{}", num(t.wall_extrapolated));
    out
}
