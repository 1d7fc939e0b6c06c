//! Experiment configuration: JSON schema, validation, and construction of the
//! norm/domain/intensity triple.
//!
//! The schema is versioned and strict: unknown keys are rejected so that a
//! misspelled field cannot silently change an acceptance run.

use pareto_peeling::norm::{norm_from_spec, norm_preset, NormSpec};
use pareto_peeling::reference::ReferenceCase;
use pareto_peeling::sampling::BilinearGrid;
use pareto_peeling::{Domain, IntensityField, NormModel, Rect, Vec2};
use serde::Deserialize;
use std::fmt;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Norm: either a preset name or an explicit spec.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum NormConfig {
    Preset(String),
    Spec(NormSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum DomainConfig {
    /// `[xmin, xmax, ymin, ymax]`
    Rectangle([f64; 4]),
    Polygon(Vec<[f64; 2]>),
    Rectilinear(Vec<[f64; 4]>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum IntensityConfig {
    Constant(f64),
    Bilinear {
        rect: [f64; 4],
        nx: usize,
        ny: usize,
        values: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Peel,
    Sort,
    Weakpeel,
    Convexpeel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum Observable {
    #[serde(rename = "center-height")]
    CenterHeight,
    #[serde(rename = "sup-error-vs-reference")]
    SupErrorVsReference,
    #[serde(rename = "layer-count")]
    LayerCount,
    #[serde(rename = "chain-length")]
    ChainLength,
    #[serde(rename = "anisotropy")]
    Anisotropy,
}

impl Observable {
    pub fn label(&self) -> &'static str {
        match self {
            Observable::CenterHeight => "center-height",
            Observable::SupErrorVsReference => "sup-error-vs-reference",
            Observable::LayerCount => "layer-count",
            Observable::ChainLength => "chain-length",
            Observable::Anisotropy => "anisotropy",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub norm: NormConfig,
    pub domain: DomainConfig,
    pub intensity: IntensityConfig,
    pub engine: Engine,
    pub n_values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub observables: Vec<Observable>,
    #[serde(default)]
    pub reference: Option<String>,
    #[serde(default)]
    pub out_dir: Option<String>,
}

/// Fully validated experiment, ready to run.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub model: NormModel,
    pub domain: Domain,
    pub intensity: IntensityField,
    pub reference: Option<ReferenceCase>,
}

pub fn load_config(json: &str) -> Result<Experiment, ConfigError> {
    let config: ExperimentConfig =
        serde_json::from_str(json).map_err(|e| ConfigError(e.to_string()))?;
    validate(config)
}

fn build_norm_model(norm: &NormConfig) -> Result<NormModel, ConfigError> {
    match norm {
        NormConfig::Preset(name) => norm_preset(name).map_err(|e| ConfigError(e.to_string())),
        NormConfig::Spec(spec) => norm_from_spec(spec).map_err(|e| ConfigError(e.to_string())),
    }
}

fn build_domain(domain: &DomainConfig) -> Result<Domain, ConfigError> {
    match domain {
        DomainConfig::Rectangle([a, b, c, d]) => {
            let rect = Rect::new(*a, *b, *c, *d).map_err(|e| ConfigError(e.to_string()))?;
            Ok(Domain::rectangle(rect))
        }
        DomainConfig::Polygon(verts) => {
            let verts = verts.iter().map(|&[x, y]| Vec2::new(x, y)).collect();
            Domain::convex_polygon(verts).map_err(|e| ConfigError(e.to_string()))
        }
        DomainConfig::Rectilinear(rects) => {
            let rects = rects
                .iter()
                .map(|&[a, b, c, d]| Rect::new(a, b, c, d))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ConfigError(e.to_string()))?;
            Domain::rectilinear(rects).map_err(|e| ConfigError(e.to_string()))
        }
    }
}

fn build_intensity(intensity: &IntensityConfig) -> Result<IntensityField, ConfigError> {
    match intensity {
        IntensityConfig::Constant(v) => {
            IntensityField::constant(*v).map_err(|e| ConfigError(e.to_string()))
        }
        IntensityConfig::Bilinear {
            rect: [a, b, c, d],
            nx,
            ny,
            values,
        } => {
            let rect = Rect::new(*a, *b, *c, *d).map_err(|e| ConfigError(e.to_string()))?;
            IntensityField::bilinear(BilinearGrid {
                rect,
                nx: *nx,
                ny: *ny,
                values: values.clone(),
            })
            .map_err(|e| ConfigError(e.to_string()))
        }
    }
}

/// Whether two norm models describe the same norm (same functional sets
/// modulo order and sign, same Euclidean weight).
fn same_norm(a: &NormModel, b: &NormModel) -> bool {
    if (a.euclidean_weight() - b.euclidean_weight()).abs() > 1e-9 {
        return false;
    }
    if a.functionals().len() != b.functionals().len() {
        return false;
    }
    a.functionals().iter().all(|fa| {
        b.functionals()
            .iter()
            .any(|fb| (*fa - *fb).norm() < 1e-9 || (*fa + *fb).norm() < 1e-9)
    })
}

fn validate(config: ExperimentConfig) -> Result<Experiment, ConfigError> {
    if config.schema != SCHEMA_VERSION {
        return err(format!(
            "unsupported schema version {} (expected {SCHEMA_VERSION})",
            config.schema
        ));
    }
    if config.n_values.is_empty() || config.seeds.is_empty() {
        return err("n_values and seeds must be nonempty");
    }
    if !config.n_values.iter().all(|&n| n > 0.0) {
        return err("n_values must be positive");
    }
    if config.observables.is_empty() {
        return err("at least one observable is required");
    }
    let model = build_norm_model(&config.norm)?;
    let domain = build_domain(&config.domain)?;
    let intensity = build_intensity(&config.intensity)?;

    let reference = match &config.reference {
        None => None,
        Some(name) => Some(ReferenceCase::parse(name).map_err(|e| ConfigError(e.to_string()))?),
    };
    if config
        .observables
        .contains(&Observable::SupErrorVsReference)
        && reference.is_none()
    {
        return err("sup-error-vs-reference requires a `reference` case");
    }

    if let Some(case) = reference {
        // The referenced closed form must match the (norm, domain, f) triple
        // and the engine it solves for.
        let case_model: NormModel =
            norm_preset(case.norm_preset()).map_err(|e| ConfigError(e.to_string()))?;
        if !same_norm(&model, &case_model) {
            return err(format!(
                "reference case {} holds for the `{}` norm, which does not match the configured norm",
                case.name(),
                case.norm_preset()
            ));
        }
        let want: Rect = case.experiment_rect();
        let ok_domain = matches!(
            &config.domain,
            DomainConfig::Rectangle([a, b, c, d])
                if (*a - want.xmin).abs() < 1e-12
                    && (*b - want.xmax).abs() < 1e-12
                    && (*c - want.ymin).abs() < 1e-12
                    && (*d - want.ymax).abs() < 1e-12
        );
        if !ok_domain {
            return err(format!(
                "reference case {} holds on the rectangle [{}, {}]×[{}, {}]",
                case.name(),
                want.xmin,
                want.xmax,
                want.ymin,
                want.ymax
            ));
        }
        if !matches!(&config.intensity, IntensityConfig::Constant(v) if (*v - 1.0).abs() < 1e-12) {
            return err(format!(
                "reference case {} holds for constant unit intensity",
                case.name()
            ));
        }
        let want_engine = match case {
            ReferenceCase::WeakL1Square => Engine::Weakpeel,
            ReferenceCase::L1Quadrant => Engine::Sort,
            _ => Engine::Peel,
        };
        if config.engine != want_engine {
            return err(format!(
                "reference case {} is an engine `{:?}` target",
                case.name(),
                want_engine
            ));
        }
    }

    Ok(Experiment {
        config,
        model,
        domain,
        intensity,
        reference,
    })
}
