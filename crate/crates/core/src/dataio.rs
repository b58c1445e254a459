//! File formats: edge lists, feature matrices (binary or CSV), label files,
//! dataset manifests, and canonical JSON reports.
//!
//! Binary matrix layout: the 8-byte magic `NAFSMAT1`, `rows` and `cols` as
//! little-endian `u64`, then `rows · cols` little-endian IEEE-754 doubles in
//! row-major order.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{NafsError, Result};
use crate::evaluation::MetricReport;
use crate::graph::Graph;
use crate::matrix::DenseMatrix;

pub const MATRIX_MAGIC: &[u8; 8] = b"NAFSMAT1";
const HEADER_LEN: usize = 24;

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| NafsError::io(path, e))
}

/// Meaningful lines with their 1-based line numbers; blank and `#` lines skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses an edge list: two 0-based node ids per line separated by tabs or
/// spaces. The node count is `max id + 1` unless `n` is given.
pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    for (line, content) in content_lines(text) {
        let mut fields = content.split_whitespace();
        let mut next_id = || -> Result<usize> {
            let tok = fields.next().ok_or_else(|| NafsError::Load {
                line,
                message: format!("expected two node ids, got `{content}`"),
            })?;
            tok.parse::<usize>().map_err(|_| NafsError::Load {
                line,
                message: format!("`{tok}` is not a non-negative integer"),
            })
        };
        let u = next_id()?;
        let v = next_id()?;
        if fields.next().is_some() {
            return Err(NafsError::Load {
                line,
                message: format!("expected two node ids, got `{content}`"),
            });
        }
        edges.push((u, v));
        lines.push(line);
    }
    let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = n.unwrap_or(inferred);
    // report the offending file line rather than the edge position
    Graph::from_edges(n, &edges).map_err(|e| match e {
        NafsError::Load { line, message } => NafsError::Load {
            line: lines[line - 1],
            message,
        },
        other => other,
    })
}

pub fn load_edge_list(path: impl AsRef<Path>, n: Option<usize>) -> Result<Graph> {
    let path = path.as_ref();
    parse_edge_list(&read_text(path)?, n)
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| NafsError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(w, "# nodes {} edges {}", g.node_count(), g.edge_count())?;
        for (u, v) in g.edges() {
            writeln!(w, "{u}\t{v}")?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| NafsError::io(path, e))
}

/// Reads a feature matrix, detecting the binary format by its magic and
/// falling back to CSV.
pub fn load_features(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| NafsError::io(path, e))?;
    let m = if bytes.starts_with(MATRIX_MAGIC) {
        decode_matrix(&bytes)?
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| NafsError::Format("neither a binary matrix nor UTF-8 CSV".into()))?;
        parse_csv_matrix(&text)?
    };
    m.ensure_finite()?;
    Ok(m)
}

pub fn decode_matrix(bytes: &[u8]) -> Result<DenseMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(NafsError::Format(format!(
            "header needs {HEADER_LEN} bytes, file has {}",
            bytes.len()
        )));
    }
    if &bytes[..8] != MATRIX_MAGIC {
        return Err(NafsError::Format("bad magic".into()));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
    let (rows, cols) = (word(8), word(16));
    let payload = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .and_then(|b| usize::try_from(b).ok())
        .ok_or_else(|| NafsError::Format(format!("dimension overflow: {rows} x {cols}")))?;
    let actual = bytes.len() - HEADER_LEN;
    if actual != payload {
        return Err(NafsError::Format(format!(
            "payload for {rows} x {cols} needs {payload} bytes, found {actual}"
        )));
    }
    let data = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    DenseMatrix::from_vec(rows as usize, cols as usize, data)
}

pub fn encode_matrix(m: &DenseMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.as_slice().len());
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn save_matrix(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_matrix(m)).map_err(|e| NafsError::io(path, e))
}

/// One node per line, comma-separated values.
pub fn parse_csv_matrix(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, content) in content_lines(text) {
        let row = content
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<f64>().map_err(|_| NafsError::Load {
                    line,
                    message: format!("`{tok}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(NafsError::Load {
                    line,
                    message: format!("expected {} columns, got {}", first.len(), row.len()),
                });
            }
        }
        if let Some(col) = row.iter().position(|v| !v.is_finite()) {
            return Err(NafsError::NonFinite {
                row: rows.len(),
                col,
            });
        }
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

pub fn write_csv_matrix(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    fs::write(path, s).map_err(|e| NafsError::io(path, e))
}

/// One integer class id per line; line `i` is node `i`.
pub fn parse_labels(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| NafsError::Load {
                line: i + 1,
                message: format!("`{}` is not a class id", l.trim()),
            })
        })
        .collect()
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    parse_labels(&read_text(path.as_ref())?)
}

pub fn write_labels(labels: &[usize], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut s = String::with_capacity(labels.len() * 3);
    for l in labels {
        s.push_str(&l.to_string());
        s.push('\n');
    }
    fs::write(path, s).map_err(|e| NafsError::io(path, e))
}

/// Dataset description. Relative paths resolve against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub edge_path: PathBuf,
    pub feature_path: PathBuf,
    #[serde(default)]
    pub label_path: Option<PathBuf>,
    /// Node count.
    pub n: usize,
    /// Undirected edge count after removing duplicates and self loops.
    pub m: usize,
    /// Feature dimension.
    pub f: usize,
    #[serde(default)]
    pub num_classes: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub graph: Graph,
    pub features: DenseMatrix,
    pub labels: Option<Vec<usize>>,
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    Ok(serde_json::from_str(&read_text(path.as_ref())?)?)
}

/// Loads every artifact named by the manifest and checks the declared sizes.
pub fn load_dataset(manifest_path: impl AsRef<Path>) -> Result<Dataset> {
    let manifest_path = manifest_path.as_ref();
    let manifest = load_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: &Path| {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };

    let check = |field: &str, declared: usize, actual: usize| {
        if declared == actual {
            Ok(())
        } else {
            Err(NafsError::Manifest {
                field: field.to_string(),
                declared,
                actual,
            })
        }
    };

    let graph = load_edge_list(resolve(&manifest.edge_path), Some(manifest.n))?;
    check("m", manifest.m, graph.edge_count())?;
    let features = load_features(resolve(&manifest.feature_path))?;
    check("n", manifest.n, features.rows())?;
    check("f", manifest.f, features.cols())?;
    let labels = match &manifest.label_path {
        Some(p) => {
            let labels = load_labels(resolve(p))?;
            check("n", manifest.n, labels.len())?;
            if let Some(c) = manifest.num_classes {
                let mut distinct = labels.clone();
                distinct.sort_unstable();
                distinct.dedup();
                check("num_classes", c, distinct.len())?;
            }
            Some(labels)
        }
        None => None,
    };
    Ok(Dataset {
        name: manifest.name,
        graph,
        features,
        labels,
    })
}

/// Shortest-form-independent float rendering with 17 significant digits.
/// Trailing zeros are dropped and integral values keep one decimal (`1.0`).
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return "null".to_string();
    }
    if v == 0.0 {
        return "0.0".to_string();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, e) = sci.split_once('e').expect("exponent present");
    let exp_exact: i32 = e.parse().expect("integer exponent");
    if !(-4..17).contains(&exp_exact) {
        let mantissa = trim_fraction(mantissa);
        return format!("{mantissa}e{exp_exact}");
    }
    let decimals = (16 - exp_exact).max(0) as usize;
    trim_fraction(&format!("{v:.decimals$}"))
}

fn trim_fraction(s: &str) -> String {
    if !s.contains('.') {
        return format!("{s}.0");
    }
    let t = s.trim_end_matches('0');
    if t.ends_with('.') {
        format!("{t}0")
    } else {
        t.to_string()
    }
}

/// Pretty JSON with sorted object keys, [`format_float`] numbers, and a
/// trailing newline.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(value: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(num) => match (num.as_u64(), num.as_i64()) {
            (Some(u), _) => out.push_str(&u.to_string()),
            (None, Some(i)) => out.push_str(&i.to_string()),
            _ => out.push_str(&format_float(num.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(item, depth + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(&map[*k], depth + 1, out);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

pub fn report_json(report: &MetricReport) -> Result<String> {
    Ok(canonical_json(&serde_json::to_value(report)?))
}

pub fn write_report(report: &MetricReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, report_json(report)?).map_err(|e| NafsError::io(path, e))
}
