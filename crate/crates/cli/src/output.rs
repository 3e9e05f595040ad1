//! Deterministic CSV/JSON encoding and file writing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;
use crate::format::round_sig;
use crate::manifest::RunManifest;

/// Rounds every float to nine significant digits and replaces each `"inf"`
/// with `null`, flagging object fields with a sibling `<field>_unbounded`.
fn normalize(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            *value = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::String(s) if s == "inf" => *value = Value::Null,
        Value::Array(items) => items.iter_mut().for_each(normalize),
        Value::Object(map) => {
            let unbounded: Vec<String> = map
                .iter()
                .filter(|(_, v)| v.as_str() == Some("inf"))
                .map(|(k, _)| k.clone())
                .collect();
            map.values_mut().for_each(normalize);
            for key in unbounded {
                map.insert(format!("{key}_unbounded"), Value::Bool(true));
            }
        }
        _ => {}
    }
}

/// Pretty JSON with a trailing newline, normalised as above.
pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut value = serde_json::to_value(value).map_err(CliError::encoding)?;
    normalize(&mut value);
    let mut out = serde_json::to_vec_pretty(&value).map_err(CliError::encoding)?;
    out.push(b'\n');
    Ok(out)
}

/// A JSON document `{ ...fields, "manifest": manifest }`.
pub fn with_manifest<T: Serialize>(body: &T, manifest: &RunManifest) -> Result<Value, CliError> {
    let mut map = match serde_json::to_value(body).map_err(CliError::encoding)? {
        Value::Object(map) => map,
        other => Map::from_iter([("data".to_string(), other)]),
    };
    map.insert(
        "manifest".to_string(),
        serde_json::to_value(manifest).map_err(CliError::encoding)?,
    );
    Ok(Value::Object(map))
}

/// CSV text with a header row and LF line endings.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes to `path`, or to stdout when there is none. A CSV written to a
/// file gets its manifest as a `<path>.manifest.json` sidecar.
pub fn emit(
    path: Option<&Path>,
    bytes: &[u8],
    sidecar: Option<&RunManifest>,
) -> Result<(), CliError> {
    match path {
        Some(path) => {
            write_file(path, bytes)?;
            if let Some(manifest) = sidecar {
                write_file(&sidecar_path(path), &json_bytes(manifest)?)?;
            }
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}
