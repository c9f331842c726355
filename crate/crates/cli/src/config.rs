//! `key = value` config files mirrored onto command-line flags.

use std::ffi::OsString;
use std::fs;

/// Extracts `--config PATH` (or `--config=PATH`) from `args`.
fn config_path(args: &[OsString]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it.next().map(|p| p.to_string_lossy().into_owned());
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Parses a config file into `(flag, value)` pairs. Blank lines and lines
/// starting with `#` are skipped; keys may use `_` or `-`.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("config line {}: expected key=value", i + 1));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(format!("config line {}: bad key {:?}", i + 1, k.trim()));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn has_flag(args: &[OsString], flag: &str) -> bool {
    let long = format!("--{flag}");
    let eq = format!("--{flag}=");
    args.iter().any(|a| {
        let a = a.to_string_lossy();
        a == long || a.starts_with(&eq)
    })
}

/// Appends every config entry whose flag is absent from `args`; flags given on
/// the command line win. `true`/`false` values toggle switch flags.
pub fn merge(mut args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    for (key, value) in parse(&text)? {
        if has_flag(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                args.push(format!("--{key}").into());
                args.push(value.into());
            }
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_pairs_and_comments() {
        let pairs = parse("# run\nn = 5\nmode=exact\n\nsamples_per = 3\n").unwrap();
        assert_eq!(pairs, vec![("n".into(), "5".into()), ("mode".into(), "exact".into()), ("samples-per".into(), "3".into())]);
        assert!(parse("n 5").is_err());
    }

    #[test]
    fn flags_win_over_config() {
        let dir = std::env::temp_dir().join(format!("c5census-config-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        fs::write(&path, "n = 6\nm = 5\nforce = true\n").unwrap();
        let p = path.to_string_lossy().into_owned();
        let merged = merge(os(&["c5census", "census", "--n", "5", "--config", &p])).unwrap();
        assert_eq!(merged, os(&["c5census", "census", "--n", "5", "--config", &p, "--m", "5", "--force"]));
    }
}
