//! `key = value` configuration files. Every key names a long flag; flags on
//! the command line override the file.

use std::path::Path;

use crate::CliError;

/// Turns a config file into flag tokens.
pub fn parse(text: &str) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().trim_start_matches("--");
        let value = value.trim();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.extend(value.split_whitespace().map(str::to_owned));
            }
        }
    }
    Ok(out)
}

/// Options taking a value that may precede the subcommand.
const GLOBAL_WITH_VALUE: [&str; 2] = ["--out", "--config"];

/// Splices the flags of any `--config FILE` right after the subcommand name,
/// so that explicit flags (which come later) win.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_owned());
        } else if a == "--config" {
            config = argv.get(i + 1).cloned();
        }
        if GLOBAL_WITH_VALUE.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if sub.is_none() && !a.starts_with('-') {
            sub = Some(i);
        }
        i += 1;
    }
    let (Some(path), Some(at)) = (config, sub) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let extra = parse(&text)?;
    let mut out = argv[..=at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[at + 1..]);
    Ok(out)
}
