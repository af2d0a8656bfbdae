use std::fmt;
use std::path::{Path, PathBuf};

use accel_core::instances::{generate, Instance, InstanceConfig, InstanceFile};
use accel_core::methods::{Family, MethodSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Quantity drawn in the convergence plots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "F_gap")]
    FGap,
    #[serde(rename = "gmap_sq")]
    GmapSq,
    #[serde(rename = "subgrad_sq")]
    SubgradSq,
    #[serde(rename = "dist_sq")]
    DistSq,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Self::FGap => "F_gap",
            Self::GmapSq => "gmap_sq",
            Self::SubgradSq => "subgrad_sq",
            Self::DistSq => "dist_sq",
        }
    }

    pub fn axis_label(self) -> &'static str {
        match self {
            Self::FGap => "F(x_k) - F*",
            Self::GmapSq => "||gradient mapping||^2",
            Self::SubgradSq => "||subgradient||^2",
            Self::DistSq => "||x_k - x*||^2",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_metrics() -> Vec<Metric> {
    vec![Metric::GmapSq]
}

fn default_out() -> PathBuf {
    PathBuf::from("bench-out")
}

fn default_true() -> bool {
    true
}

fn default_budget() -> usize {
    100_000
}

/// Contents of a `run` config file (TOML, or JSON when the path ends in `.json`).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    /// Generated instance; exclusive with `instance_file`.
    #[serde(default)]
    pub instance: Option<InstanceConfig>,
    /// Instance written by `gen-instance`.
    #[serde(default)]
    pub instance_file: Option<PathBuf>,
    pub methods: Vec<String>,
    pub horizons: Vec<usize>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Composed methods get K/2 iterations per phase, so every curve spends K.
    #[serde(default = "default_true")]
    pub split_composed: bool,
    /// FISTA iterations for the F* estimate behind `F_gap`.
    #[serde(default = "default_budget")]
    pub fstar_budget: usize,
    /// Seed of a standard normal starting point; zero when absent.
    #[serde(default)]
    pub x0_seed: Option<u64>,
}

impl BenchConfig {
    pub fn parse(text: &str, json: bool) -> Result<Self, CliError> {
        if json {
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
        } else {
            toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e == "json");
        let mut cfg = Self::parse(&text, json)?;
        // relative instance files are resolved against the config's directory
        if let (Some(f), Some(dir)) = (&cfg.instance_file, path.parent()) {
            if f.is_relative() {
                cfg.instance_file = Some(dir.join(f));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(format!("config: {m}")));
        match (&self.instance, &self.instance_file) {
            (Some(_), Some(_)) => return bad("`instance` and `instance_file` are exclusive".into()),
            (None, None) => return bad("one of `instance` or `instance_file` is required".into()),
            _ => {}
        }
        if self.methods.is_empty() {
            return bad("`methods` is empty".into());
        }
        if self.horizons.is_empty() {
            return bad("`horizons` is empty".into());
        }
        if let Some(i) = self.horizons.iter().position(|&k| k == 0) {
            return bad(format!("horizons[{i}]: K must be at least 1"));
        }
        if self.metrics.is_empty() {
            return bad("`metrics` is empty".into());
        }
        let mut labels = Vec::new();
        for (i, m) in self.methods.iter().enumerate() {
            let (spec, _) = resolve_method(m, self.horizons[0], self.split_composed)
                .map_err(|e| CliError::Usage(format!("config: methods[{i}]: {e}")))?;
            let label = slug(&spec.to_string());
            if labels.contains(&label) {
                return bad(format!("methods[{i}]: duplicate method `{m}`"));
            }
            labels.push(label);
        }
        Ok(())
    }

    pub fn instance(&self) -> Result<Instance<f64>, CliError> {
        match (&self.instance, &self.instance_file) {
            (Some(cfg), _) => generate(cfg).map_err(|e| CliError::Usage(format!("instance: {e}"))),
            (None, Some(path)) => load_instance(path),
            (None, None) => Err(CliError::Usage("config: no instance".into())),
        }
    }
}

pub fn load_instance(path: &Path) -> Result<Instance<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    InstanceFile::from_json(&text)
        .and_then(|f| f.into_instance())
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Parses a method for horizon `k` and returns it with the horizon to run.
///
/// A bare `fpgm_m` means `m = K/2`.
pub fn resolve_method(text: &str, k: usize, split_composed: bool) -> accel_core::Result<(MethodSpec<f64>, usize)> {
    let text = text.trim();
    let spec = if text == "fpgm_m" {
        MethodSpec::parse(&format!("fpgm_m[m={}]", (k / 2).max(1)))?
    } else {
        MethodSpec::parse(text)?
    };
    let horizon = match spec.family {
        Family::Composed(..) if split_composed => (k / 2).max(1),
        _ => k,
    };
    Ok((spec, horizon))
}

/// File-name-safe form of a method label.
pub fn slug(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
            out.push(c);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
methods = ["ista", "fista"]
horizons = [10]

[instance]
kind = "lasso"
seed = 3
"#;

    #[test]
    fn toml_defaults() {
        let c = BenchConfig::parse(MINIMAL, false).unwrap();
        assert_eq!(c.metrics, vec![Metric::GmapSq]);
        assert!(c.split_composed);
        assert_eq!(c.instance.as_ref().unwrap().seed, 3);
        c.validate().unwrap();
    }

    #[test]
    fn json_matches_toml() {
        let j = r#"{"instance": {"kind": "lasso", "seed": 3}, "methods": ["ista", "fista"], "horizons": [10]}"#;
        let a = BenchConfig::parse(j, true).unwrap();
        let b = BenchConfig::parse(MINIMAL, false).unwrap();
        assert_eq!(a.instance, b.instance);
        assert_eq!(a.methods, b.methods);
    }

    #[test]
    fn parse_error_names_the_line() {
        let err = BenchConfig::parse("methods = [\"ista\"]\nhorizons = [1,\n", false).unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
        let err = BenchConfig::parse("methods = [\"ista\"]\nhorizons = [1]\nbogus = 2\n", false).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn validation_errors() {
        let mut c = BenchConfig::parse(MINIMAL, false).unwrap();
        c.methods.push("nope".into());
        assert!(c.validate().unwrap_err().to_string().contains("methods[2]"));
        c.methods.truncate(2);
        c.horizons = vec![0];
        assert!(c.validate().is_err());
        c.horizons = vec![4];
        c.instance_file = Some("x.json".into());
        assert!(c.validate().is_err());
    }

    #[test]
    fn fpgm_and_composed_budgets() {
        let (s, k) = resolve_method("fpgm_m", 100, true).unwrap();
        assert_eq!((s.to_string().as_str(), k), ("fpgm_m[m=50]", 100));
        let (_, k) = resolve_method("composed(fista,fista_g)", 100, true).unwrap();
        assert_eq!(k, 50);
        let (_, k) = resolve_method("composed(fista,fista_g)", 100, false).unwrap();
        assert_eq!(k, 100);
        assert_eq!(resolve_method("composed(fista,fista_g)", 1, true).unwrap().1, 1);
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("composed(fista,fista_g)"), "composed_fista_fista_g");
        assert_eq!(slug("guler_g[lambda=0.5]"), "guler_g_lambda_0.5");
    }
}
