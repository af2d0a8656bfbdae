use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Real;

use super::{generate, lasso_problem, nuclear_problem, Instance, InstanceConfig, InstanceKind};

pub const INSTANCE_FORMAT: &str = "accel-instance/v1";

/// JSON container: config echo plus the generated data (A row-major).
/// Kinds without data are rebuilt from the config.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format: String,
    pub config: InstanceConfig,
    pub l: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Matrix<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vector<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_true: Option<Vector<f64>>,
}

impl InstanceFile {
    pub fn from_instance<T: Real>(inst: &Instance<T>) -> Self {
        Self {
            format: INSTANCE_FORMAT.to_string(),
            config: inst.config.clone(),
            l: inst.problem.smoothness().to_f64_lossy(),
            a: inst.a.as_ref().map(|a| a.cast()),
            b: inst.b.as_ref().map(|b| b.cast()),
            x_true: inst.x_true.as_ref().map(|x| x.cast()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance data is serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if file.format != INSTANCE_FORMAT {
            return Err(Error::Format(format!("unknown instance format `{}`", file.format)));
        }
        Ok(file)
    }

    pub fn into_instance<T: Real>(self) -> Result<Instance<T>> {
        let cfg = self.config.resolved();
        match cfg.kind {
            InstanceKind::Lasso | InstanceKind::NuclearSym => {
                let missing = || Error::Format("instance file lacks A or b".into());
                let a: Matrix<T> = self.a.as_ref().ok_or_else(missing)?.cast();
                let b: Vector<T> = self.b.as_ref().ok_or_else(missing)?.cast();
                let lambda = T::lit(cfg.lambda.expect("resolved"));
                let l_override = cfg.fixed_l.then(|| T::lit(self.l));
                let problem = if cfg.kind == InstanceKind::Lasso {
                    lasso_problem(&a, &b, lambda, l_override)?
                } else {
                    nuclear_problem(&a, &b, cfg.n.expect("resolved"), lambda, !cfg.unscaled, l_override)?
                };
                Ok(Instance { config: cfg, problem, a: Some(a), b: Some(b), x_true: self.x_true.map(|x| x.cast()) })
            }
            _ => generate(&cfg),
        }
    }
}
