//! Web bundle assembly: a static directory, or one self-contained HTML file.
//!
//! Single-file bundles embed each data document as
//! `<script type="application/octet-stream" id="cc-data-NAME">LEN:BASE64</script>`
//! where `LEN` is the decoded byte length.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use codecarta_core::glyph::{edge_styles, glyph_for, EdgeOverrides, EdgeStyle, GlyphConfig, GlyphSpec};
use codecarta_core::layout::LayoutSnapshot;
use codecarta_core::serializer::serialize;
use codecarta_core::{EntityGraph, Token};
use serde::Serialize;

use crate::error::CliError;

/// Default size budget for single-file bundles, in bytes.
pub const SIZE_BUDGET: usize = 15 * 1024 * 1024;

pub const ASSET_FILES: [&str; 4] = ["index.html", "app.js", "app.css", "icons.json"];

const STYLES_MARK: &str = "<!--codecarta:styles-->";
const DATA_MARK: &str = "<!--codecarta:data-->";
const SCRIPT_MARK: &str = "<!--codecarta:script-->";

/// The compiled web application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assets {
    pub index_html: String,
    pub app_js: String,
    pub app_css: String,
    pub icons_json: String,
}

impl Assets {
    /// The snapshot checked in under `assets/web-ui`.
    pub fn prebuilt() -> Assets {
        Assets {
            index_html: include_str!("../assets/web-ui/index.html").to_string(),
            app_js: include_str!("../assets/web-ui/app.js").to_string(),
            app_css: include_str!("../assets/web-ui/app.css").to_string(),
            icons_json: include_str!("../assets/web-ui/icons.json").to_string(),
        }
    }

    /// Reads a build of the web application from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Assets, CliError> {
        let read = |name: &str| {
            fs::read_to_string(dir.join(name)).map_err(|e| {
                CliError::Bundle(format!(
                    "web assets missing: cannot read {} ({e}). Build the web application and copy its output \
                     ({}) into {}, or use the prebuilt copy shipped in crates/cli/assets/web-ui",
                    dir.join(name).display(),
                    ASSET_FILES.join(", "),
                    dir.display()
                ))
            })
        };
        let assets = Assets {
            index_html: read("index.html")?,
            app_js: read("app.js")?,
            app_css: read("app.css")?,
            icons_json: read("icons.json")?,
        };
        assets.check()?;
        Ok(assets)
    }

    pub fn check(&self) -> Result<(), CliError> {
        for mark in [STYLES_MARK, DATA_MARK, SCRIPT_MARK] {
            if !self.index_html.contains(mark) {
                return Err(CliError::Bundle(format!("index.html lacks the {mark} marker")));
            }
        }
        if self.app_js.to_ascii_lowercase().contains("</script") {
            return Err(CliError::Bundle("app.js contains a closing script tag and cannot be inlined".into()));
        }
        if self.app_css.to_ascii_lowercase().contains("</style") {
            return Err(CliError::Bundle("app.css contains a closing style tag and cannot be inlined".into()));
        }
        let icons: serde_json::Value =
            serde_json::from_str(&self.icons_json).map_err(|e| CliError::Bundle(format!("icons.json: {e}")))?;
        if !icons.get("icons").is_some_and(serde_json::Value::is_object) {
            return Err(CliError::Bundle("icons.json has no icon table".into()));
        }
        Ok(())
    }

    pub fn icon_ids(&self) -> Vec<String> {
        let icons: serde_json::Value = serde_json::from_str(&self.icons_json).unwrap_or_default();
        icons
            .get("icons")
            .and_then(serde_json::Value::as_object)
            .map(|m| m.keys().cloned().collect())
            .unwrap_or_default()
    }
}

/// Precomputed visuals the page draws from.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StyleDocument {
    pub glyphs: BTreeMap<Token, GlyphSpec>,
    pub edges: Vec<EdgeStyle>,
}

impl StyleDocument {
    pub fn new(g: &EntityGraph, glyphs: &GlyphConfig, overrides: &EdgeOverrides) -> Result<Self, CliError> {
        Ok(StyleDocument {
            glyphs: g.entities.iter().map(|(t, e)| (t.clone(), glyph_for(e, glyphs))).collect(),
            edges: edge_styles(overrides).map_err(|e| CliError::Config(e.to_string()))?,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec(self).expect("style documents serialize");
        bytes.push(b'\n');
        bytes
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    /// Relative to the output location.
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

fn file(path: &str, bytes: impl Into<Vec<u8>>) -> OutputFile {
    OutputFile { path: PathBuf::from(path), bytes: bytes.into() }
}

pub fn data_block(name: &str, bytes: &[u8]) -> String {
    format!(
        "<script type=\"application/octet-stream\" id=\"cc-data-{name}\">{}:{}</script>",
        bytes.len(),
        STANDARD.encode(bytes)
    )
}

/// Extracts and checks the data block called `name`.
pub fn decode_block(html: &str, name: &str) -> Result<Vec<u8>, String> {
    let open = format!("id=\"cc-data-{name}\">");
    let start = html.find(&open).ok_or_else(|| format!("no data block {name:?}"))? + open.len();
    let end = start + html[start..].find("</script>").ok_or("unterminated data block")?;
    let (len, payload) = html[start..end].split_once(':').ok_or("data block lacks a length prefix")?;
    let len: usize = len.parse().map_err(|_| format!("bad length prefix {len:?}"))?;
    let bytes = STANDARD.decode(payload).map_err(|e| e.to_string())?;
    if bytes.len() != len {
        return Err(format!("data block {name:?} holds {} bytes, prefix says {len}", bytes.len()));
    }
    Ok(bytes)
}

/// Builds the bundle. In single-file mode the result is exactly one file,
/// `index.html`; otherwise a static site with the data documents beside it.
pub fn bundle(
    g: &EntityGraph,
    layout: &LayoutSnapshot,
    style: &StyleDocument,
    assets: &Assets,
    single_file: bool,
) -> Result<Vec<OutputFile>, CliError> {
    assets.check()?;
    let known = assets.icon_ids();
    if let Some((t, spec)) = style.glyphs.iter().find(|(_, s)| !known.contains(&s.icon_id)) {
        return Err(CliError::Bundle(format!("icon {:?} used by {t} is not in the icon set", spec.icon_id)));
    }
    let graph = serialize(g).map_err(|e| CliError::Bundle(e.to_string()))?;
    let layout = layout.to_bytes();
    let style = style.to_bytes();
    let html = &assets.index_html;
    if single_file {
        let data = [
            ("graph", graph.as_slice()),
            ("layout", &layout),
            ("style", &style),
            ("icons", assets.icons_json.as_bytes()),
        ]
        .iter()
        .map(|(name, bytes)| data_block(name, bytes))
        .collect::<Vec<_>>()
        .join("\n");
        let page = html
            .replace(STYLES_MARK, &format!("<style>\n{}</style>", assets.app_css))
            .replace(DATA_MARK, &data)
            .replace(SCRIPT_MARK, &format!("<script>\n{}</script>", assets.app_js));
        return Ok(vec![file("index.html", page)]);
    }
    let page = html
        .replace(STYLES_MARK, "<link rel=\"stylesheet\" href=\"app.css\">")
        .replace(DATA_MARK, "")
        .replace(SCRIPT_MARK, "<script src=\"app.js\"></script>");
    Ok(vec![
        file("index.html", page),
        file("app.js", assets.app_js.as_str()),
        file("app.css", assets.app_css.as_str()),
        file("icons.json", assets.icons_json.as_str()),
        file("graph.json", graph),
        file("layout.json", layout),
        file("style.json", style),
    ])
}

/// Writes `files` below `dir`.
pub fn write_files(dir: &Path, files: &[OutputFile]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for f in files {
        let path = dir.join(&f.path);
        fs::write(&path, &f.bytes).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

/// References in `html` that would leave the document: anything with a URL
/// scheme other than `data:`, protocol-relative or root-relative links, and
/// CSS imports.
pub fn external_references(html: &str) -> Vec<String> {
    let lower = html.to_ascii_lowercase();
    let mut found = Vec::new();
    let snippet = |at: usize| {
        let start = html[..at].char_indices().rev().nth(24).map_or(0, |(i, _)| i);
        let end = html[at..].char_indices().nth(24).map_or(html.len(), |(i, _)| at + i);
        html[start..end].to_string()
    };
    for (at, _) in lower.match_indices("://") {
        found.push(snippet(at));
    }
    for attr in ["src=", "href=", "action=", "poster=", "srcset=", "xlink:href="] {
        for (at, _) in lower.match_indices(attr) {
            let value = lower[at + attr.len()..].trim_start_matches(['"', '\'']);
            if value.starts_with('/') || has_scheme(value) {
                found.push(snippet(at));
            }
        }
    }
    for (at, _) in lower.match_indices("url(") {
        let value = lower[at + 4..].trim_start_matches(['"', '\'', ' ']);
        if !(value.starts_with('#') || value.starts_with("data:")) {
            found.push(snippet(at));
        }
    }
    for (at, _) in lower.match_indices("@import") {
        found.push(snippet(at));
    }
    found
}

fn has_scheme(value: &str) -> bool {
    let scheme: String = value.chars().take_while(|c| c.is_ascii_alphanumeric() || "+.-".contains(*c)).collect();
    !scheme.is_empty() && value[scheme.len()..].starts_with(':') && scheme != "data"
}
