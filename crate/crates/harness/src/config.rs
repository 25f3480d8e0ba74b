//! Flat `key = value` files whose keys mirror the command-line flags.

use crate::error::{HarnessError, Result};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
/// A key may repeat; comma-separated values are split.
pub fn parse_config(text: &str, origin: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| HarnessError::Parse {
            path: origin.to_string(),
            line: i + 1,
            reason: "expected `key = value`".into(),
        })?;
        let key = key.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(HarnessError::Parse {
                path: origin.to_string(),
                line: i + 1,
                reason: "empty key".into(),
            });
        }
        for v in value.split(',') {
            out.push((key.clone(), v.trim().to_string()));
        }
    }
    Ok(out)
}

/// Flag arguments for the parsed entries, leaving out keys the command line
/// already sets so that explicit flags win.
pub fn config_args(entries: &[(String, String)], given: &[String]) -> Vec<String> {
    let set_on_line = |key: &str| {
        given
            .iter()
            .any(|a| a == &format!("--{key}") || a.starts_with(&format!("--{key}=")))
    };
    let mut args = Vec::new();
    for (k, v) in entries {
        if k == "config" || set_on_line(k) {
            continue;
        }
        args.push(format!("--{k}"));
        if !v.is_empty() {
            args.push(v.clone());
        }
    }
    args
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_splits() {
        let text = "# comment\nd = 300\n\nalgo = rada-rgd, arpgda\n--seed=4 # trailing\n";
        let e = parse_config(text, "t").unwrap();
        let pairs: Vec<(&str, &str)> = e.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        assert_eq!(pairs, [("d", "300"), ("algo", "rada-rgd"), ("algo", "arpgda"), ("seed", "4")]);
        assert!(matches!(parse_config("d 300", "t"), Err(HarnessError::Parse { line: 1, .. })));
        assert!(parse_config(" = 3", "t").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let e = parse_config("d = 300\nalgo = dsgm\nalgo = radmm\nseed = 4", "t").unwrap();
        let given: Vec<String> = ["--algo", "rada-rgd", "--seed=9"].iter().map(|s| s.to_string()).collect();
        assert_eq!(config_args(&e, &given), ["--d", "300"]);
        assert_eq!(config_args(&e, &[]), ["--d", "300", "--algo", "dsgm", "--algo", "radmm", "--seed", "4"]);
    }
}
