//! Visual descriptors for nodes and edges.
//!
//! Everything here is a pure function of entity data and configuration; the
//! web renderer only draws what these descriptors say.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Accessibility, Entity, EntityKind, MethodKind, RelationId, Severity, TypeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ScalingMode {
    #[default]
    Linear,
    #[serde(alias = "log")]
    Logarithmic,
    #[serde(alias = "sqrt")]
    SquareRoot,
}

impl ScalingMode {
    /// Scales `x` relative to `anchor`; every mode maps `anchor` to itself and
    /// is strictly increasing for positive inputs.
    pub fn scale(self, x: f64, anchor: f64) -> f64 {
        match self {
            ScalingMode::Linear => x,
            ScalingMode::Logarithmic => anchor * (1.0 + x / anchor).log2(),
            ScalingMode::SquareRoot => (anchor * x).sqrt(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(ScalingMode::Linear),
            "log" | "logarithmic" => Some(ScalingMode::Logarithmic),
            "sqrt" | "squareRoot" => Some(ScalingMode::SquareRoot),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LineStyle {
    Solid,
    Dashed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outline {
    pub style: LineStyle,
    pub width: f64,
    /// Relative saturation of the outline color; decreases from the center out.
    pub saturation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Effect {
    None,
    Smoke,
    Fire,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GlyphSpec {
    pub icon_id: String,
    pub tint: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corner_icon_id: Option<String>,
    pub inner_outline: Outline,
    pub middle_outline: Outline,
    pub outer_outline: Outline,
    pub radius: f64,
    pub effect: Effect,
}

pub const INNER_OUTLINE_WIDTH: f64 = 1.0;
pub const OUTLINE_SATURATION: [f64; 3] = [1.0, 0.65, 0.35];
pub const MAX_OUTLINE_WIDTH: f64 = 4.0;
pub const MEMBERS_PER_OUTLINE_UNIT: f64 = 5.0;

/// Node sizing configuration. `base_radius` is keyed by entity kind.
#[derive(Debug, Clone, PartialEq)]
pub struct GlyphConfig {
    pub base_radius: BTreeMap<EntityKind, f64>,
    pub member_weight: f64,
    pub scaling: ScalingMode,
}

impl Default for GlyphConfig {
    fn default() -> Self {
        let base_radius = EntityKind::ALL
            .into_iter()
            .map(|kind| {
                let r = match kind {
                    EntityKind::Solution => 16.0,
                    EntityKind::Project => 14.0,
                    EntityKind::Package => 12.0,
                    EntityKind::Namespace | EntityKind::Type => 10.0,
                    _ => 5.0,
                };
                (kind, r)
            })
            .collect();
        GlyphConfig {
            base_radius,
            member_weight: 0.5,
            scaling: ScalingMode::Linear,
        }
    }
}

impl GlyphConfig {
    pub fn base(&self, kind: EntityKind) -> f64 {
        self.base_radius.get(&kind).copied().unwrap_or(5.0)
    }
}

pub fn node_radius(e: &Entity, cfg: &GlyphConfig) -> f64 {
    let base = cfg.base(e.kind);
    let unscaled = if e.kind == EntityKind::Type {
        base + cfg.member_weight * f64::from(e.member_count())
    } else {
        base
    };
    cfg.scaling.scale(unscaled, base)
}

/// Width of a member-count outline: `clamp(count / 5, 0, 4)`.
pub fn outline_width(count: u32) -> f64 {
    (f64::from(count) / MEMBERS_PER_OUTLINE_UNIT).clamp(0.0, MAX_OUTLINE_WIDTH)
}

pub fn icon_id(e: &Entity) -> &'static str {
    match e.kind {
        EntityKind::Solution => "solution",
        EntityKind::Project => "project",
        EntityKind::Package => "package",
        EntityKind::Namespace => "namespace",
        EntityKind::Type => match e.type_kind.unwrap_or(TypeKind::Class) {
            TypeKind::Class => "class",
            TypeKind::Struct => "struct",
            TypeKind::Enum => "enum",
            TypeKind::Interface => "interface",
            TypeKind::Delegate => "delegate",
        },
        EntityKind::Field => "field",
        EntityKind::Method => match e.method_kind {
            Some(MethodKind::Constructor) => "constructor",
            Some(MethodKind::Operator) => "operator",
            Some(MethodKind::Getter) => "getter",
            Some(MethodKind::Setter) => "setter",
            _ => "method",
        },
        EntityKind::Property => "property",
        EntityKind::Event => "event",
    }
}

/// Tint per icon family. Perceptual lightness differs by at least 4.5 L*
/// units between any two entries so tints stay apart when grayed out.
pub fn tint(e: &Entity) -> &'static str {
    match e.kind {
        EntityKind::Solution => "#5d2785",
        EntityKind::Project => "#214a9b",
        EntityKind::Package => "#8c5a2f",
        EntityKind::Namespace => "#318052",
        EntityKind::Type => match e.type_kind.unwrap_or(TypeKind::Class) {
            TypeKind::Class => "#f0ca74",
            TypeKind::Struct => "#4e9fd9",
            TypeKind::Enum => "#d6561f",
            TypeKind::Interface => "#1b9c91",
            TypeKind::Delegate => "#a12865",
        },
        EntityKind::Field => "#9ac5f1",
        EntityKind::Method => "#b299e5",
        EntityKind::Property => "#a8b4c5",
        EntityKind::Event => "#f7dc6e",
    }
}

pub fn corner_icon_id(access: Accessibility) -> Option<&'static str> {
    match access {
        Accessibility::Public => None,
        Accessibility::Internal => Some("access-internal"),
        Accessibility::Protected => Some("access-protected"),
        Accessibility::ProtectedInternal => Some("access-protected-internal"),
        Accessibility::PrivateProtected => Some("access-private-protected"),
        Accessibility::Private => Some("access-private"),
    }
}

pub fn effect_for(e: &Entity) -> Effect {
    if e.has_severity(Severity::Error) {
        Effect::Fire
    } else if e.has_severity(Severity::Warning) {
        Effect::Smoke
    } else {
        Effect::None
    }
}

pub fn glyph_for(e: &Entity, cfg: &GlyphConfig) -> GlyphSpec {
    let (instance, stat) = if e.kind == EntityKind::Type {
        (e.instance_member_count, e.static_member_count)
    } else {
        (0, 0)
    };
    GlyphSpec {
        icon_id: icon_id(e).to_string(),
        tint: tint(e).to_string(),
        corner_icon_id: e.accessibility.and_then(corner_icon_id).map(str::to_string),
        inner_outline: Outline {
            style: if e.is_static { LineStyle::Dashed } else { LineStyle::Solid },
            width: INNER_OUTLINE_WIDTH,
            saturation: OUTLINE_SATURATION[0],
        },
        middle_outline: Outline {
            style: LineStyle::Solid,
            width: outline_width(instance),
            saturation: OUTLINE_SATURATION[1],
        },
        outer_outline: Outline {
            style: LineStyle::Dashed,
            width: outline_width(stat),
            saturation: OUTLINE_SATURATION[2],
        },
        radius: node_radius(e, cfg),
        effect: effect_for(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeStyle {
    pub relation_id: RelationId,
    pub color: String,
    pub line_weight: f64,
    pub enabled: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EdgeOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enabled: Option<bool>,
}

/// User overrides keyed by relation id text.
pub type EdgeOverrides = BTreeMap<String, EdgeOverride>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlyphError {
    #[error("unknown relation {0:?}; known relations: declares, dependsOn, inheritsFrom, returns, typeOf")]
    UnknownRelation(String),
}

pub fn default_edge_style(relation: RelationId) -> EdgeStyle {
    let (color, line_weight) = match relation {
        RelationId::Declares => ("#9e9e9e", 1.0),
        RelationId::InheritsFrom => ("#1b9c91", 2.0),
        RelationId::TypeOf => ("#e39b2d", 1.5),
        RelationId::Returns => ("#8e44ad", 1.5),
        RelationId::DependsOn => ("#c0392b", 2.5),
    };
    EdgeStyle {
        relation_id: relation,
        color: color.to_string(),
        line_weight,
        enabled: relation == RelationId::Declares,
    }
}

/// Default style merged with overrides. `declares` cannot be disabled.
pub fn edge_style(relation: &str, overrides: &EdgeOverrides) -> Result<EdgeStyle, GlyphError> {
    let id = RelationId::parse(relation).ok_or_else(|| GlyphError::UnknownRelation(relation.to_string()))?;
    let mut style = default_edge_style(id);
    if let Some(o) = overrides.get(relation) {
        if let Some(color) = &o.color {
            style.color = color.clone();
        }
        if let Some(weight) = o.line_weight {
            style.line_weight = weight;
        }
        if let Some(enabled) = o.enabled {
            style.enabled = enabled || id == RelationId::Declares;
        }
    }
    Ok(style)
}

/// Rejects override entries naming relations that do not exist.
pub fn check_overrides(overrides: &EdgeOverrides) -> Result<(), GlyphError> {
    match overrides.keys().find(|k| RelationId::parse(k).is_none()) {
        Some(unknown) => Err(GlyphError::UnknownRelation(unknown.clone())),
        None => Ok(()),
    }
}

pub fn edge_styles(overrides: &EdgeOverrides) -> Result<Vec<EdgeStyle>, GlyphError> {
    check_overrides(overrides)?;
    RelationId::ALL
        .into_iter()
        .map(|r| edge_style(r.as_str(), overrides))
        .collect()
}
