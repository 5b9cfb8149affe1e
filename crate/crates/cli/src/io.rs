//! File formats: commented CSV, NDJSON shot files and the task-result JSON
//! layout with per-shot `preSequence` / `postSequence` arrays.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use rydladder::bits::{format_bitstring, parse_bitstring};
use rydladder::dist::{CountTable, Origin, ProbDist};
use rydladder::noise::ShotRecord;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Probabilities keep 17 significant digits.
pub fn prob(x: f64) -> String {
    format!("{x:.16e}")
}

/// Derived quantities keep 6 significant digits.
pub fn summary(x: f64) -> String {
    format!("{x:.5e}")
}

pub struct Output<'a> {
    pub dir: PathBuf,
    pub command: &'a str,
    pub cfg: &'a RunConfig,
}

impl<'a> Output<'a> {
    pub fn new(dir: impl Into<PathBuf>, command: &'a str, cfg: &'a RunConfig) -> CliResult<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
        let out = Self { dir, command, cfg };
        out.write_raw("config.resolved.toml", &cfg.to_toml())?;
        Ok(out)
    }

    pub fn sub(&self, name: &str) -> CliResult<Output<'a>> {
        let dir = self.dir.join(name);
        fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
        Ok(Output {
            dir,
            command: self.command,
            cfg: self.cfg,
        })
    }

    /// Same directory, files annotated with another configuration.
    pub fn with_cfg<'b>(&self, cfg: &'b RunConfig) -> Output<'b>
    where
        'a: 'b,
    {
        Output {
            dir: self.dir.clone(),
            command: self.command,
            cfg,
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write_raw(&self, name: &str, text: &str) -> CliResult<()> {
        let path = self.path(name);
        fs::write(&path, text).map_err(CliError::io(&path))
    }

    /// CSV with the command and the resolved configuration as `#` comments.
    pub fn csv(&self, name: &str, header: &str, rows: impl IntoIterator<Item = String>) -> CliResult<()> {
        let mut text = format!("# rydladder {}\n# config {}\n{header}\n", self.command, self.cfg.to_json_line());
        for row in rows {
            text.push_str(&row);
            text.push('\n');
        }
        self.write_raw(name, &text)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let body = serde_json::json!({
            "command": self.command,
            "config": self.cfg,
            "result": value,
        });
        let mut text = serde_json::to_string_pretty(&body).expect("serializable");
        text.push('\n');
        self.write_raw(name, &text)
    }

    pub fn probdist(&self, name: &str, p: &ProbDist) -> CliResult<()> {
        let n = p.n_atoms();
        self.csv(
            name,
            "bitstring,probability",
            p.iter().map(|(k, v)| format!("{},{}", format_bitstring(k, n), prob(v))),
        )
    }

    pub fn counts(&self, name: &str, c: &CountTable) -> CliResult<()> {
        let n = c.n_atoms();
        self.csv(
            name,
            "bitstring,count",
            c.iter().map(|(k, v)| format!("{},{v}", format_bitstring(k, n))),
        )
    }
}

/// Anything a command can analyse.
pub enum Input {
    Dist(ProbDist),
    Counts(CountTable),
}

impl Input {
    pub fn distribution(&self) -> CliResult<ProbDist> {
        match self {
            Input::Dist(p) => Ok(p.clone()),
            Input::Counts(c) => Ok(c.to_distribution()?),
        }
    }
}

fn data_err(path: &Path, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}:{line}: {msg}", path.display()))
}

fn csv_body(path: &Path) -> CliResult<(String, Vec<(usize, String)>)> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| CliError::Data(format!("{}: no header line", path.display())))?
        .1;
    Ok((header, lines.collect()))
}

fn split_row<'s>(path: &Path, line: usize, row: &'s str) -> CliResult<(&'s str, &'s str)> {
    row.split_once(',')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| data_err(path, line, "expected two comma-separated fields"))
}

fn parse_rows<T: std::str::FromStr>(
    path: &Path,
    rows: &[(usize, String)],
) -> CliResult<(usize, Vec<(u64, T)>)>
where
    T::Err: std::fmt::Display,
{
    let mut n_atoms = None;
    let mut out = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let (bits, value) = split_row(path, *line, row)?;
        let (k, n) = parse_bitstring(bits).map_err(|e| data_err(path, *line, e))?;
        if *n_atoms.get_or_insert(n) != n {
            return Err(data_err(path, *line, "bitstrings have different lengths"));
        }
        let v = value.parse::<T>().map_err(|e| data_err(path, *line, e))?;
        out.push((k, v));
    }
    let n = n_atoms.ok_or_else(|| CliError::Data(format!("{}: no rows", path.display())))?;
    Ok((n, out))
}

/// `bitstring,probability` or `bitstring,count` CSV.
pub fn read_table(path: &Path) -> CliResult<Input> {
    let (header, rows) = csv_body(path)?;
    match header.replace(' ', "").as_str() {
        "bitstring,probability" => {
            let (n, rows) = parse_rows::<f64>(path, &rows)?;
            let p = ProbDist::new(n, rows.into_iter().collect(), Origin::Exact)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            Ok(Input::Dist(p))
        }
        "bitstring,count" => {
            let (n, rows) = parse_rows::<u64>(path, &rows)?;
            let mut c = CountTable::new(n);
            for (k, v) in rows {
                c.add(k, v).map_err(|e| CliError::Data(e.to_string()))?;
            }
            Ok(Input::Counts(c))
        }
        other => Err(CliError::Data(format!(
            "{}: unrecognized header {other:?}",
            path.display()
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotFormat {
    Ndjson,
    TaskResult,
}

fn bit_array(v: &Value, what: &str) -> Result<Vec<u8>, String> {
    v.as_array()
        .ok_or_else(|| format!("{what} is not an array"))?
        .iter()
        .map(|b| match b.as_u64() {
            Some(0) => Ok(0),
            Some(1) => Ok(1),
            _ => Err(format!("{what} entries must be 0 or 1")),
        })
        .collect()
}

fn task_shot(m: &Value) -> Result<ShotRecord, String> {
    let r = m.get("shotResult").ok_or("missing shotResult")?;
    Ok(ShotRecord {
        pre_sequence: bit_array(r.get("preSequence").unwrap_or(&Value::Null), "preSequence")?,
        post_sequence: bit_array(r.get("postSequence").unwrap_or(&Value::Null), "postSequence")?,
    })
}

/// Shots from NDJSON (`pre_sequence` / `post_sequence` per line) or from a
/// task-result JSON document with `measurements[].shotResult`.
pub fn read_shots(path: &Path) -> CliResult<(Vec<ShotRecord>, ShotFormat)> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    if let Ok(doc) = serde_json::from_str::<Value>(&text) {
        if let Some(measurements) = doc.get("measurements").and_then(Value::as_array) {
            let shots = measurements
                .iter()
                .enumerate()
                .map(|(i, m)| task_shot(m).map_err(|e| data_err(path, i, format!("measurement {i}: {e}"))))
                .collect::<CliResult<Vec<_>>>()?;
            return Ok((shots, ShotFormat::TaskResult));
        }
    }
    let mut shots = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line).map_err(|e| data_err(path, i + 1, e))?;
        let get = |key| bit_array(v.get(key).unwrap_or(&Value::Null), key);
        let shot = ShotRecord {
            pre_sequence: get("pre_sequence").map_err(|e| data_err(path, i + 1, e))?,
            post_sequence: get("post_sequence").map_err(|e| data_err(path, i + 1, e))?,
        };
        shots.push(shot);
    }
    if shots.is_empty() {
        return Err(CliError::Data(format!("{}: no shots", path.display())));
    }
    Ok((shots, ShotFormat::Ndjson))
}

pub fn is_shot_file(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("json" | "ndjson" | "jsonl")
    )
}
