//! The JSON configuration format.
//!
//! ```json
//! {
//!   "version": 1,
//!   "name": "three lines and a hyperplane",
//!   "components": [
//!     {"degree": 1, "role": "paired"},
//!     {"degree": 1, "role": "hyperplane"}
//!   ],
//!   "points": [{"id": "Q1", "on": 0}],
//!   "concurrent": [],
//!   "weights": [4, "3"],
//!   "multiplicities": [5, "inf"],
//!   "geometry": {"forms": ["X0", "X0 + X1 + X2"], "points": [[0, 1, 2]]}
//! }
//! ```
//!
//! Omitted weights default to the ansatz when the configuration has its
//! shape. Rationals are integers or `"n/d"` strings.

use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cz::CertifyOptions;
use crate::ff::{Form, Geometry};
use crate::orbifold::Multiplicity;
use crate::picard::{Component, PointId, SurfaceConfig};
use crate::positivity::WeightedBoundary;
use crate::rational::int;
use crate::search::ansatz_weights;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigLoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("empty configuration")]
    Empty,
    #[error("line {line}, column {column}, field `{field}`: {message}")]
    Syntax {
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub id: String,
    /// Index of the paired component carrying the point.
    pub on: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalList(#[serde(with = "crate::rational::serde_rational_vec")] pub Vec<BigRational>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalValue(#[serde(with = "crate::rational::serde_rational")] pub BigRational);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub forms: Vec<String>,
    pub points: Vec<RationalList>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub components: Vec<Component>,
    #[serde(default)]
    pub points: Vec<PointSpec>,
    #[serde(default)]
    pub concurrent: Vec<Vec<usize>>,
    #[serde(default)]
    pub allow_single_component: bool,
    #[serde(default)]
    pub weights: Option<RationalList>,
    #[serde(default)]
    pub multiplicities: Option<Vec<Multiplicity>>,
    /// Twist parameter for the ample-twist threshold (default 1).
    #[serde(default)]
    pub alpha: Option<RationalValue>,
    #[serde(default)]
    pub geometry: Option<GeometrySpec>,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub file: ConfigFile,
    pub surface: SurfaceConfig,
    pub weights: WeightedBoundary,
    pub options: CertifyOptions,
    pub geometry: Option<Geometry>,
}

pub fn parse_config(text: &str) -> Result<Loaded, ConfigLoadError> {
    if text.trim().is_empty() {
        return Err(ConfigLoadError::Empty);
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ConfigFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        ConfigLoadError::Syntax {
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })?;
    validate(file)
}

pub fn load_config(path: &Path) -> Result<Loaded, ConfigLoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigLoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn validate(file: ConfigFile) -> Result<Loaded, ConfigLoadError> {
    let invalid = |s: String| ConfigLoadError::Invalid(s);
    if file.version != CONFIG_VERSION {
        return Err(invalid(format!(
            "unsupported version {} (expected {CONFIG_VERSION})",
            file.version
        )));
    }
    let points = file
        .points
        .iter()
        .map(|p| (PointId(p.id.clone()), p.on))
        .collect();
    let surface = SurfaceConfig::new(file.components.clone(), points, file.concurrent.clone())
        .map_err(|e| invalid(e.to_string()))?;

    let weights = match &file.weights {
        Some(w) => WeightedBoundary::new(&surface, w.0.clone()).map_err(|e| invalid(e.to_string()))?,
        None => ansatz_weights(&surface)
            .map_err(|e| invalid(format!("no weights given and no default applies: {e}")))?,
    };

    if let Some(m) = &file.multiplicities {
        if m.len() != surface.component_count() {
            return Err(invalid(format!(
                "{} multiplicities for {} components",
                m.len(),
                surface.component_count()
            )));
        }
    }

    let alpha = file.alpha.as_ref().map(|a| a.0.clone()).unwrap_or_else(|| int(1));
    if alpha < int(0) {
        return Err(invalid("alpha must be nonnegative".into()));
    }

    let geometry = match &file.geometry {
        Some(g) => {
            let forms = g
                .forms
                .iter()
                .map(|s| s.parse::<Form>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid(e.to_string()))?;
            let geom = Geometry {
                forms,
                points: g.points.iter().map(|p| p.0.clone()).collect(),
            };
            geom.validate(&surface).map_err(|e| invalid(e.to_string()))?;
            Some(geom)
        }
        None => None,
    };

    let options = CertifyOptions {
        name: file.name.clone(),
        allow_single_component: file.allow_single_component,
        multiplicities: file.multiplicities.clone(),
        alpha,
        ..CertifyOptions::default()
    };
    Ok(Loaded {
        file,
        surface,
        weights,
        options,
        geometry,
    })
}
