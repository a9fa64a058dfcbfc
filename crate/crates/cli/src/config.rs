//! `key=value` defaults for the shared flags. Blank lines and `#` comments
//! are ignored; keys may use `-` or `_`.

use crate::args::{Common, Format};
use crate::error::{usage, CliError, CliResult};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

pub fn parse(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!("config line {}: expected key=value, got `{line}`", lineno + 1));
        };
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn one<T: FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse().map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{v}`")))
}

fn list<T: FromStr>(key: &str, v: &str) -> CliResult<Vec<T>> {
    v.split(',').map(|x| one(key, x.trim())).collect()
}

/// Fills every flag that was not given on the command line.
pub fn apply(common: &mut Common, map: &BTreeMap<String, String>) -> CliResult<()> {
    for (key, v) in map {
        let k = key.as_str();
        match k {
            "beta" if common.beta.is_empty() => common.beta = list(k, v)?,
            "lambda" if common.lambda.is_empty() => common.lambda = list(k, v)?,
            "ebits" if common.ebits.is_empty() => common.ebits = list(k, v)?,
            "energy" if common.energy.is_empty() => common.energy = list(k, v)?,
            "branches" if common.branches.is_empty() => common.branches = list(k, v)?,
            "gain" if common.gain.is_empty() => common.gain = list(k, v)?,
            "grid" if common.grid.is_none() => common.grid = Some(one(k, v)?),
            "tol" if common.tol.is_none() => common.tol = Some(one(k, v)?),
            "seed" if common.seed.is_none() => common.seed = Some(one(k, v)?),
            "out" if common.out.is_none() => common.out = Some(PathBuf::from(v)),
            "workers" if common.workers.is_none() => common.workers = Some(one(k, v)?),
            "format" if common.format.is_none() => {
                common.format = Some(match v.as_str() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return usage(format!("config key `format`: expected csv or json, got `{v}`")),
                })
            }
            "beta" | "lambda" | "ebits" | "energy" | "branches" | "gain" | "grid" | "tol" | "seed" | "out" | "workers"
            | "format" => {}
            _ => return usage(format!("unknown config key `{k}`")),
        }
    }
    Ok(())
}

pub fn load(common: &mut Common) -> CliResult<()> {
    if let Some(path) = common.config.clone() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        apply(common, &parse(&text)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let map = parse("# defaults\nbeta = 0.5,2\n\ngrid=7\nformat=json").unwrap();
        let mut c = Common {
            grid: Some(3),
            ..Default::default()
        };
        apply(&mut c, &map).unwrap();
        assert_eq!(c.beta, vec![0.5, 2.0]);
        assert_eq!(c.grid, Some(3));
        assert_eq!(c.format, Some(Format::Json));
    }

    #[test]
    fn malformed_lines_are_usage_errors() {
        assert!(matches!(parse("beta 2"), Err(CliError::Usage(_))));
        let mut c = Common::default();
        assert!(apply(&mut c, &parse("tol=abc").unwrap()).is_err());
        assert!(apply(&mut c, &parse("colour=red").unwrap()).is_err());
    }
}
