//! Report envelope and output handling.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

pub const SCHEMA_VERSION: &str = "1.0";

/// Environment variable naming the directory reports go to when `--out`
/// is absent.
pub const OUT_DIR_ENV: &str = "WEAVE_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub verb: String,
    pub inputs: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    pub timing: f64,
}


/// Rounds every float to 12 significant digits so reports are stable.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("reports are plain data");
        let mut s = serde_json::to_string_pretty(&round_floats(v)).expect("values serialise");
        s.push('\n');
        s
    }
}

/// Where output goes: `--out`, else `$WEAVE_OUT_DIR/<name>`, else stdout.
pub fn destination(out: Option<&Path>, name: &str) -> Option<PathBuf> {
    if let Some(p) = out {
        return Some(p.to_path_buf());
    }
    std::env::var_os(OUT_DIR_ENV).map(|d| Path::new(&d).join(name))
}

/// Writes through a temporary file and a rename.
pub fn emit(content: &str, dest: Option<&Path>) -> std::io::Result<()> {
    match dest {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()
        }
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".tmp");
            let tmp = PathBuf::from(tmp);
            std::fs::write(&tmp, content)?;
            std::fs::rename(&tmp, path)
        }
    }
}
