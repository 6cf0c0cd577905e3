//! Style and layout configuration read from `--config`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use codecarta_core::glyph::{check_overrides, EdgeOverrides, GlyphConfig, ScalingMode};
use codecarta_core::layout::LayoutConfig;
use codecarta_core::EntityKind;
use serde::Deserialize;

use crate::error::CliError;

/// On-disk form. Every field is optional; missing ones keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StyleConfig {
    #[serde(default)]
    pub base_radius: BTreeMap<EntityKind, f64>,
    #[serde(default)]
    pub member_weight: Option<f64>,
    #[serde(default)]
    pub scaling_mode: Option<ScalingMode>,
    #[serde(default)]
    pub relation_styles: EdgeOverrides,
    #[serde(default)]
    pub layout: Option<LayoutConfig>,
}

impl StyleConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|m| CliError::Config(format!("{}: {m}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: StyleConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        check_overrides(&cfg.relation_styles).map_err(|e| e.to_string())?;
        if let Some((kind, r)) = cfg.base_radius.iter().find(|(_, r)| !(**r > 0.0)) {
            return Err(format!("baseRadius.{} must be positive, got {r}", kind.as_str()));
        }
        if let Some(w) = cfg.member_weight.filter(|w| !(*w >= 0.0)) {
            return Err(format!("memberWeight must be non-negative, got {w}"));
        }
        if let Some(layout) = &cfg.layout {
            layout.check().map_err(|e| e.to_string())?;
        }
        Ok(cfg)
    }

    /// Glyph settings; `scaling` from the command line wins over the file.
    pub fn glyphs(&self, scaling: Option<ScalingMode>) -> GlyphConfig {
        let mut g = GlyphConfig::default();
        g.base_radius.extend(self.base_radius.iter().map(|(k, v)| (*k, *v)));
        if let Some(w) = self.member_weight {
            g.member_weight = w;
        }
        g.scaling = scaling.or(self.scaling_mode).unwrap_or_default();
        g
    }

    pub fn layout(&self) -> LayoutConfig {
        self.layout.clone().unwrap_or_default()
    }
}
