//! `--config` files: `key = value` lines, merged into argv before parsing.
//! Flags given on the command line win.

use std::ffi::OsString;
use std::fs;

/// Flags whose value does not affect the output and is left out of the echo.
const UNECHOED: [&str; 3] = ["--threads", "--out", "--config"];

/// Boolean switches: a config value of `true` adds the bare flag.
const SWITCHES: [&str; 1] = ["records"];

fn flag_present(args: &[String], flag: &str) -> bool {
    args.iter()
        .any(|a| a == flag || a.starts_with(&format!("{flag}=")))
}

/// Value of `--config`, in either `--config PATH` or `--config=PATH` form.
fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

/// Reads the config file named in `args` (if any) and appends its entries
/// as flags, skipping keys already on the command line.
pub fn merge(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut merged = args;
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected `key = value`", i + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" {
            return Err(format!("{path}:{}: invalid key", i + 1));
        }
        let flag = format!("--{key}");
        if flag_present(&merged, &flag) || flag_present(&extra, &flag) {
            continue;
        }
        if SWITCHES.contains(&key.as_str()) {
            match value {
                "true" => extra.push(flag),
                "false" => {}
                _ => return Err(format!("{path}:{}: {key} takes true or false", i + 1)),
            }
        } else {
            extra.push(flag);
            extra.push(value.to_string());
        }
    }
    merged.extend(extra);
    Ok(merged)
}

/// The argv echoed into output headers: everything except flags that only
/// steer where and how fast the output is produced.
pub fn echo(args: &[String]) -> String {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if UNECHOED.contains(&a.as_str()) {
            it.next();
            continue;
        }
        if UNECHOED.iter().any(|f| a.starts_with(&format!("{f}="))) {
            continue;
        }
        out.push(a.as_str());
    }
    out.join(" ")
}

pub fn to_strings(args: impl IntoIterator<Item = OsString>) -> Result<Vec<String>, String> {
    args.into_iter()
        .map(|a| {
            a.into_string()
                .map_err(|a| format!("argument is not valid UTF-8: {a:?}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn echo_drops_output_flags() {
        let a = s(&[
            "exp-fig1",
            "--threads",
            "4",
            "--seed",
            "3",
            "--out=x.csv",
            "--config",
            "c.txt",
        ]);
        assert_eq!(echo(&a), "exp-fig1 --seed 3");
    }

    #[test]
    fn merge_prefers_command_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        fs::write(
            &path,
            "# comment\nseed = 9\ntrials = 4\nrecords = true\nn_list = 10,20\n",
        )
        .unwrap();
        let args = s(&[
            "exp-linf",
            "--seed",
            "2",
            "--config",
            path.to_str().unwrap(),
        ]);
        let merged = merge(args).unwrap();
        assert!(!merged.contains(&"9".to_string()));
        assert!(merged.windows(2).any(|w| w[0] == "--trials" && w[1] == "4"));
        assert!(merged
            .windows(2)
            .any(|w| w[0] == "--n-list" && w[1] == "10,20"));
        assert!(merged.contains(&"--records".to_string()));
    }

    #[test]
    fn merge_rejects_malformed_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        fs::write(&path, "seed 9\n").unwrap();
        assert!(merge(s(&["kp", "--config", path.to_str().unwrap()])).is_err());
    }
}
