//! Config files: flat `key = value` text or a JSON object, merged into the
//! command line before argument parsing. Flags given on the command line win.

use std::collections::BTreeSet;
use std::path::Path;

use clap::{ArgAction, Command};

use crate::CliError;

/// Parses the contents of a config file into `(key, value)` pairs in file
/// order. Keys are normalised to flag spelling (`max_iter` → `max-iter`).
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let trimmed = text.trim_start();
    let pairs = if trimmed.starts_with('{') {
        parse_json(trimmed)?
    } else {
        parse_flat(text)?
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(pairs.len());
    for (k, v) in pairs {
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::usage("empty key in config file"));
        }
        if !seen.insert(key.clone()) {
            return Err(CliError::usage(format!("duplicate config key `{key}`")));
        }
        out.push((key, v));
    }
    Ok(out)
}

fn parse_flat(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::usage(format!(
                "config line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let v = v.trim().trim_matches('"');
        pairs.push((k.trim().to_string(), v.to_string()));
    }
    Ok(pairs)
}

fn scalar(v: &serde_json::Value, key: &str) -> Result<String, CliError> {
    use serde_json::Value;
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Bool(b) => Ok(b.to_string()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        Value::Number(n) => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            if x.fract() == 0.0 && x.abs() < 1e15 {
                Ok(format!("{x:.0}"))
            } else {
                Ok(n.to_string())
            }
        }
        _ => Err(CliError::usage(format!("config key `{key}` must be a scalar or a list of scalars"))),
    }
}

fn parse_json(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("config file is not valid JSON: {e}")))?;
    let serde_json::Value::Object(map) = value else {
        return Err(CliError::usage("JSON config must be an object"));
    };
    let mut pairs = Vec::with_capacity(map.len());
    for (k, v) in map {
        let text = match &v {
            serde_json::Value::Array(items) => items
                .iter()
                .map(|item| scalar(item, &k))
                .collect::<Result<Vec<_>, _>>()?
                .join(","),
            other => scalar(other, &k)?,
        };
        pairs.push((k, text));
    }
    Ok(pairs)
}

fn flag_name(arg: &str) -> Option<&str> {
    let body = arg.strip_prefix("--")?;
    Some(body.split_once('=').map_or(body, |(k, _)| k))
}

/// Position of the subcommand name in `args` (index 0 is the program).
fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if a == "--config" {
            i += 2;
            continue;
        }
        if !a.starts_with('-') {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// Removes `--config PATH` from `args` and returns the path.
fn take_config(args: &mut Vec<String>) -> Result<Option<String>, CliError> {
    let mut found = None;
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err(CliError::usage("--config needs a file path"));
            }
            found = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = args[i].strip_prefix("--config=") {
            found = Some(p.to_string());
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

/// Splices the values of `--config FILE` into `args` after the subcommand,
/// skipping keys the command line already sets. Keys that are not flags of
/// the chosen subcommand are rejected.
pub fn merge_config(mut args: Vec<String>, command: &Command) -> Result<Vec<String>, CliError> {
    let Some(path) = take_config(&mut args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::usage(format!("cannot read config file `{path}`: {e}")))?;
    let pairs = parse_config(&text)?;
    let Some(at) = subcommand_index(&args) else {
        return Err(CliError::usage("a config file needs a subcommand"));
    };
    let name = args[at].clone();
    let Some(sub) = command.find_subcommand(&name) else {
        // Let the parser report the unknown subcommand.
        return Ok(args);
    };
    let given: BTreeSet<String> = args[at + 1..].iter().filter_map(|a| flag_name(a)).map(String::from).collect();
    let mut injected = Vec::new();
    for (key, value) in pairs {
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            return Err(CliError::usage(format!("unknown config key `{key}` for `{name}`")));
        };
        if given.contains(&key) {
            continue;
        }
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => injected.push(format!("--{key}")),
                "false" => {}
                other => {
                    return Err(CliError::usage(format!("config key `{key}` expects true or false, got `{other}`")))
                }
            }
        } else {
            injected.push(format!("--{key}={value}"));
        }
    }
    args.splice(at + 1..at + 1, injected);
    Ok(args)
}
