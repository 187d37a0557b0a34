//! Job files: a TOML document whose keys mirror the command-line flags.
//!
//! ```toml
//! command = "estimate"
//! law = "dng:0.5"
//! d = 2
//! n = 64
//!
//! [sampling]
//! samples = 1e6
//! seed = 7
//! ```
//!
//! Tables only group keys; a leaf `samples` anywhere becomes `--samples`.
//! Arrays are joined with commas and `true` booleans become bare flags.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use toml::{Table, Value};

fn push_value(key: &str, value: &Value, argv: &mut Vec<String>) -> Result<()> {
    let flag = format!("--{}", key.replace('_', "-"));
    match value {
        Value::Table(table) => {
            for (k, v) in table {
                push_value(k, v, argv).with_context(|| format!("in table `{key}`"))?;
            }
        }
        Value::Boolean(true) => argv.push(flag),
        Value::Boolean(false) => {}
        Value::Array(items) => {
            let parts = items.iter().map(scalar).collect::<Result<Vec<_>>>().with_context(|| format!("field `{key}`"))?;
            argv.push(flag);
            argv.push(parts.join(","));
        }
        other => {
            argv.push(flag);
            argv.push(scalar(other).with_context(|| format!("field `{key}`"))?);
        }
    }
    Ok(())
}

fn scalar(value: &Value) -> Result<String> {
    Ok(match value {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        Value::Boolean(b) => b.to_string(),
        other => bail!("expected a scalar, found {}", other.type_str()),
    })
}

/// Translates a job document into an argument vector for the parser.
pub fn job_to_argv(text: &str) -> Result<Vec<String>> {
    let table: Table = text.parse().map_err(|e| anyhow!("{e}"))?;
    let command = match table.get("command") {
        Some(Value::String(c)) => c.clone(),
        Some(_) => bail!("field `command` must be a string"),
        None => bail!("missing field `command`"),
    };
    if command == "run" {
        bail!("field `command`: a job file cannot run another job file");
    }
    let mut argv = vec!["sitewise".to_string(), command];
    for (key, value) in &table {
        if key != "command" {
            push_value(key, value, &mut argv)?;
        }
    }
    Ok(argv)
}

pub fn load_job(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    job_to_argv(&text).with_context(|| format!("job file {}", path.display()))
}
