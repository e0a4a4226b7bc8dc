//! TOML config files. Keys mirror the command-line flags: top-level keys
//! are global flags, a table named after the subcommand holds its flags
//! (`[caloric.extend]` for nested commands). The config is spliced into
//! the argument list ahead of the user's own flags, so flags win.

use std::path::Path;

use toml::Value;

pub const GLOBAL_VALUE_FLAGS: [&str; 5] = ["--seed", "--tol", "--out", "--threads", "--config"];

/// Finds `--config <path>` or `--config=<path>` anywhere in `args`.
pub fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn flag_for(key: &str, value: &Value) -> Result<Option<String>, String> {
    let v = match value {
        Value::Boolean(true) => return Ok(Some(format!("--{key}"))),
        Value::Boolean(false) => return Ok(None),
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        Value::Array(items) => items
            .iter()
            .map(|i| match i {
                Value::String(s) => Ok(s.clone()),
                Value::Integer(n) => Ok(n.to_string()),
                Value::Float(f) => Ok(f.to_string()),
                other => Err(format!("unsupported list item {other} for {key}")),
            })
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        other => return Err(format!("unsupported value {other} for {key}")),
    };
    Ok(Some(format!("--{key}={v}")))
}

fn flags_of(table: &toml::Table) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (k, v) in table {
        if v.is_table() || k == "config" {
            continue;
        }
        if let Some(f) = flag_for(k, v)? {
            out.push(f);
        }
    }
    Ok(out)
}

/// Positions of the subcommand tokens after the leading global flags.
fn subcommand_span(args: &[String]) -> (usize, Vec<String>) {
    let mut i = 1;
    while i < args.len() && args[i].starts_with("--") {
        let takes_value = GLOBAL_VALUE_FLAGS.contains(&args[i].as_str());
        i += if takes_value { 2 } else { 1 };
    }
    let mut path = Vec::new();
    if i < args.len() {
        path.push(args[i].clone());
        if args[i] == "caloric" && i + 1 < args.len() {
            path.push(args[i + 1].clone());
        }
    }
    (i, path)
}

/// Returns `args` with the config's flags inserted.
pub fn splice(args: &[String], path: &Path) -> Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let table: toml::Table = text.parse().map_err(|e| format!("{}: {e}", path.display()))?;

    let (start, sub) = subcommand_span(args);
    let mut section = Some(&table);
    for name in &sub {
        section = section.and_then(|t| t.get(name)).and_then(Value::as_table);
    }
    let global = flags_of(&table)?;
    let local = match section {
        Some(t) if !sub.is_empty() => flags_of(t)?,
        _ => Vec::new(),
    };

    let mut out = vec![args[0].clone()];
    out.extend(global);
    out.extend_from_slice(&args[1..start]);
    out.extend(sub.iter().cloned());
    out.extend(local);
    out.extend_from_slice(&args[(start + sub.len()).min(args.len())..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn finds_config() {
        assert_eq!(config_path(&args("ancient --config a.toml geom")), Some("a.toml".into()));
        assert_eq!(config_path(&args("ancient geom --config=b.toml")), Some("b.toml".into()));
        assert_eq!(config_path(&args("ancient geom")), None);
    }

    #[test]
    fn splices_ahead_of_user_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "seed = 3\n[geom]\nsamples = 100\neps = [1, 0.5]\n[caloric.extend]\nn = 2\n").unwrap();
        let out = splice(&args("ancient --seed 9 geom --samples 5"), &p).unwrap();
        assert_eq!(
            out,
            args("ancient --seed=3 --seed 9 geom --eps=1,0.5 --samples=100 --samples 5")
        );
        let out = splice(&args("ancient caloric extend x0^2"), &p).unwrap();
        assert_eq!(out, args("ancient --seed=3 caloric extend --n=2 x0^2"));
    }
}
