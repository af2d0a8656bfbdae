use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::schedules::{ItemStart, PhiTauSchedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    #[default]
    Momentum,
    Auxiliary,
}

/// Where the φ/τ pair of a G-family comes from. Recipes are instantiated
/// for the run's horizon; `Explicit` must already match it.
#[derive(Clone, Debug)]
pub enum PhiTauRecipe<T> {
    /// FISTA-G's φ with τ_k = 2φ_{k−1}/(φ_{k−1}−φ_k)².
    FistaG,
    /// τ_k = θ_k⁻², φ_k = θ_k⁴ from the Güler-G θ sequence.
    Theta,
    /// τ ≡ 1.
    Constant,
    Explicit(PhiTauSchedule<T>),
}

impl<T> PhiTauRecipe<T> {
    fn label(&self) -> &'static str {
        match self {
            Self::FistaG => "fista_g",
            Self::Theta => "theta",
            Self::Constant => "constant",
            Self::Explicit(_) => "explicit",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Family<T> {
    Ista,
    Fista,
    FpgmM { m: usize },
    FistaG,
    GFistaG(PhiTauRecipe<T>),
    Fgm,
    Ogm,
    OgmG,
    FgmG,
    GFgmG(PhiTauRecipe<T>),
    Guler1 { lambda: T },
    Guler2 { lambda: T },
    GulerG { lambda: T },
    GGulerG { lambda: T, schedule: PhiTauRecipe<T> },
    ScFgm,
    ScOgm,
    Tmm,
    Item { start: ItemStart },
    NonstationaryScFgm,
    GeometricDescent,
    ProximalTmm { lambda: T },
    ProximalItem { lambda: T, start: ItemStart },
    Composed(Box<MethodSpec<T>>, Box<MethodSpec<T>>),
}

/// Which standing assumptions a family needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Requirement {
    ProxGrad,
    SmoothOnly,
    ProximalPointOnly,
}

impl<T: Real> Family<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ista => "ista",
            Self::Fista => "fista",
            Self::FpgmM { .. } => "fpgm_m",
            Self::FistaG => "fista_g",
            Self::GFistaG(_) => "g_fista_g",
            Self::Fgm => "fgm",
            Self::Ogm => "ogm",
            Self::OgmG => "ogm_g",
            Self::FgmG => "fgm_g",
            Self::GFgmG(_) => "g_fgm_g",
            Self::Guler1 { .. } => "guler1",
            Self::Guler2 { .. } => "guler2",
            Self::GulerG { .. } => "guler_g",
            Self::GGulerG { .. } => "g_guler_g",
            Self::ScFgm => "sc_fgm",
            Self::ScOgm => "sc_ogm",
            Self::Tmm => "tmm",
            Self::Item { .. } => "item",
            Self::NonstationaryScFgm => "nonstationary_sc_fgm",
            Self::GeometricDescent => "geometric_descent",
            Self::ProximalTmm { .. } => "proximal_tmm",
            Self::ProximalItem { .. } => "proximal_item",
            Self::Composed(..) => "composed",
        }
    }

    pub fn requirement(&self) -> Requirement {
        match self {
            Self::Ista | Self::Fista | Self::FpgmM { .. } | Self::FistaG | Self::GFistaG(_) | Self::Composed(..) => {
                Requirement::ProxGrad
            }
            Self::Guler1 { .. }
            | Self::Guler2 { .. }
            | Self::GulerG { .. }
            | Self::GGulerG { .. }
            | Self::ProximalTmm { .. }
            | Self::ProximalItem { .. } => Requirement::ProximalPointOnly,
            _ => Requirement::SmoothOnly,
        }
    }

    pub fn needs_strong_convexity(&self) -> bool {
        matches!(
            self,
            Self::ScFgm
                | Self::ScOgm
                | Self::Tmm
                | Self::Item { .. }
                | Self::NonstationaryScFgm
                | Self::GeometricDescent
                | Self::ProximalTmm { .. }
                | Self::ProximalItem { .. }
        )
    }

    /// Whether the family has both a momentum and an auxiliary form.
    pub fn has_auxiliary_form(&self) -> bool {
        !matches!(self, Self::Ista | Self::FpgmM { .. } | Self::GeometricDescent | Self::Composed(..))
    }

    pub fn lambda(&self) -> Option<T> {
        match self {
            Self::Guler1 { lambda }
            | Self::Guler2 { lambda }
            | Self::GulerG { lambda }
            | Self::GGulerG { lambda, .. }
            | Self::ProximalTmm { lambda }
            | Self::ProximalItem { lambda, .. } => Some(*lambda),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MethodSpec<T> {
    pub family: Family<T>,
    pub form: Form,
}

impl<T: Real> MethodSpec<T> {
    pub fn new(family: Family<T>) -> Self {
        Self { family, form: Form::Momentum }
    }

    pub fn auxiliary(family: Family<T>) -> Self {
        Self { family, form: Form::Auxiliary }
    }

    pub fn with_form(mut self, form: Form) -> Self {
        self.form = form;
        self
    }

    pub fn composed(first: MethodSpec<T>, second: MethodSpec<T>) -> Self {
        Self::new(Family::Composed(Box::new(first), Box::new(second)))
    }

    /// Parses `name`, `name[key=value,...]`, `composed(a,b)`, each with an
    /// optional `@aux` or `@momentum` suffix. Keys: `m`, `lambda`,
    /// `tau` (fista_g|theta|constant), `start` (recursion|table).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |reason: &str| Error::Unsupported(format!("cannot parse method `{text}`: {reason}"));
        if let Some(inner) = text.strip_prefix("composed(") {
            let inner = inner.strip_suffix(')').ok_or_else(|| bad("missing `)`"))?;
            let split = split_top_level(inner).ok_or_else(|| bad("composed needs two comma-separated methods"))?;
            let first = Self::parse(&inner[..split])?;
            let second = Self::parse(&inner[split + 1..])?;
            return Ok(Self::composed(first, second));
        }
        let (body, form) = match text.rsplit_once('@') {
            Some((b, "aux")) | Some((b, "auxiliary")) => (b, Form::Auxiliary),
            Some((b, "momentum")) => (b, Form::Momentum),
            Some(_) => return Err(bad("unknown form suffix")),
            None => (text, Form::Momentum),
        };
        let (name, params) = match body.split_once('[') {
            Some((n, rest)) => (n, rest.strip_suffix(']').ok_or_else(|| bad("missing `]`"))?),
            None => (body, ""),
        };
        let mut m = None;
        let mut lambda = None;
        let mut tau = None;
        let mut start = ItemStart::Recursion;
        for kv in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad("parameters are key=value"))?;
            match k.trim() {
                "m" => m = Some(v.trim().parse::<usize>().map_err(|_| bad("m must be an integer"))?),
                "lambda" => {
                    let x: f64 = v.trim().parse().map_err(|_| bad("lambda must be a number"))?;
                    lambda = Some(T::lit(x));
                }
                "tau" => {
                    tau = Some(match v.trim() {
                        "fista_g" => PhiTauRecipe::FistaG,
                        "theta" => PhiTauRecipe::Theta,
                        "constant" => PhiTauRecipe::Constant,
                        _ => return Err(bad("tau must be fista_g, theta or constant")),
                    })
                }
                "start" => {
                    start = match v.trim() {
                        "recursion" => ItemStart::Recursion,
                        "table" => ItemStart::Table,
                        _ => return Err(bad("start must be recursion or table")),
                    }
                }
                _ => return Err(bad("unknown parameter")),
            }
        }
        let lam = || lambda.ok_or_else(|| bad("proximal-point families need lambda"));
        let family = match name.trim() {
            "ista" => Family::Ista,
            "fista" => Family::Fista,
            "fpgm_m" => Family::FpgmM { m: m.ok_or_else(|| bad("fpgm_m needs m"))? },
            "fista_g" => Family::FistaG,
            "g_fista_g" => Family::GFistaG(tau.unwrap_or(PhiTauRecipe::FistaG)),
            "fgm" => Family::Fgm,
            "ogm" => Family::Ogm,
            "ogm_g" => Family::OgmG,
            "fgm_g" => Family::FgmG,
            "g_fgm_g" => Family::GFgmG(tau.unwrap_or(PhiTauRecipe::Theta)),
            "guler1" => Family::Guler1 { lambda: lam()? },
            "guler2" => Family::Guler2 { lambda: lam()? },
            "guler_g" => Family::GulerG { lambda: lam()? },
            "g_guler_g" => Family::GGulerG { lambda: lam()?, schedule: tau.unwrap_or(PhiTauRecipe::Theta) },
            "sc_fgm" => Family::ScFgm,
            "sc_ogm" => Family::ScOgm,
            "tmm" => Family::Tmm,
            "item" => Family::Item { start },
            "nonstationary_sc_fgm" => Family::NonstationaryScFgm,
            "geometric_descent" => Family::GeometricDescent,
            "proximal_tmm" => Family::ProximalTmm { lambda: lam()? },
            "proximal_item" => Family::ProximalItem { lambda: lam()?, start },
            _ => return Err(bad("unknown family")),
        };
        Ok(Self { family, form })
    }
}

fn split_top_level(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

impl<T: Real> fmt::Display for MethodSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Composed(a, b) => return write!(f, "composed({a},{b})"),
            Family::FpgmM { m } => write!(f, "fpgm_m[m={m}]")?,
            Family::GFistaG(r) | Family::GFgmG(r) => write!(f, "{}[tau={}]", self.family.name(), r.label())?,
            Family::GGulerG { lambda, schedule } => write!(f, "g_guler_g[lambda={lambda},tau={}]", schedule.label())?,
            Family::Item { start: ItemStart::Table } => write!(f, "item[start=table]")?,
            Family::ProximalItem { lambda, start: ItemStart::Table } => {
                write!(f, "proximal_item[lambda={lambda},start=table]")?
            }
            fam => match fam.lambda() {
                Some(l) => write!(f, "{}[lambda={l}]", fam.name())?,
                None => write!(f, "{}", fam.name())?,
            },
        }
        if self.form == Form::Auxiliary {
            write!(f, "@aux")?;
        }
        Ok(())
    }
}
