//! Quadrature settings from an optional `key = value` file, overridden by
//! command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use entropic_core::QuadratureConfig;

/// Environment variable naming the config file.
pub const CONFIG_ENV: &str = "ENTROPIC_PACKET_CONFIG";

/// Parses `rel_tol`, `abs_tol`, `max_levels` and `max_subdivisions` on top of
/// `base`. Blank lines and `#` comments are ignored; unknown keys are errors.
pub fn parse(text: &str, base: QuadratureConfig) -> Result<QuadratureConfig> {
    let mut cfg = base;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected key = value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = || format!("line {}: bad value {value:?} for {key}", lineno + 1);
        match key {
            "rel_tol" => cfg.rel_tol = value.parse().with_context(bad)?,
            "abs_tol" => cfg.abs_tol = value.parse().with_context(bad)?,
            "max_levels" => cfg.max_levels = value.parse().with_context(bad)?,
            "max_subdivisions" => cfg.max_subdivisions = value.parse().with_context(bad)?,
            other => bail!("line {}: unknown key {other:?}", lineno + 1),
        }
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<QuadratureConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text, QuadratureConfig::default()).with_context(|| format!("in config {}", path.display()))
}

/// Defaults, then the file named by [`CONFIG_ENV`] (if set), then flags.
pub fn resolve(env_path: Option<&Path>, rel_tol: Option<f64>, abs_tol: Option<f64>) -> Result<QuadratureConfig> {
    let mut cfg = match env_path {
        Some(p) => load(p)?,
        None => QuadratureConfig::default(),
    };
    if let Some(t) = rel_tol {
        cfg.rel_tol = t;
    }
    if let Some(t) = abs_tol {
        cfg.abs_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = parse("# tolerances\nrel_tol = 1e-9\n\nmax_levels=8 # fewer\n", QuadratureConfig::default()).unwrap();
        assert_eq!(cfg.rel_tol, 1e-9);
        assert_eq!(cfg.max_levels, 8);
        assert_eq!(cfg.abs_tol, QuadratureConfig::default().abs_tol);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(parse("tolerance = 1", QuadratureConfig::default()).is_err());
        assert!(parse("rel_tol 1e-9", QuadratureConfig::default()).is_err());
        assert!(parse("max_levels = many", QuadratureConfig::default()).is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.conf");
        std::fs::write(&path, "rel_tol = 1e-6\nabs_tol = 1e-9\n").unwrap();
        let cfg = resolve(Some(&path), Some(1e-11), None).unwrap();
        assert_eq!(cfg.rel_tol, 1e-11);
        assert_eq!(cfg.abs_tol, 1e-9);
        assert!(resolve(None, Some(-1.0), None).is_err());
    }
}
