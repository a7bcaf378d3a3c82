//! Session manifests and loaded chart views.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{infer_table_with_diagnostics, DataError, DataTable};
use crate::deconstruct::{deconstruct, ChartMetadata};
use crate::link::{LinkOptions, EXTERNAL};
use crate::svg::{parse_svg, SvgDocument, SvgError};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Svg { path: PathBuf, source: SvgError },
    #[error("{path}: {source}")]
    Data { path: PathBuf, source: DataError },
    #[error("manifest: {0}")]
    Manifest(String),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ManifestOptions {
    pub epsilon: Option<f64>,
    pub budget: Option<usize>,
    pub dim_opacity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionManifest {
    pub charts: Vec<PathBuf>,
    #[serde(default)]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub options: ManifestOptions,
}

impl SessionManifest {
    /// Parses a manifest; relative paths resolve against `base`.
    pub fn from_json(src: &str, base: &Path) -> Result<Self, SessionError> {
        let mut m: SessionManifest = serde_json::from_str(src).map_err(|e| SessionError::Manifest(e.to_string()))?;
        for c in &mut m.charts {
            if c.is_relative() {
                *c = base.join(&*c);
            }
        }
        if let Some(d) = &mut m.data {
            if d.is_relative() {
                *d = base.join(&*d);
            }
        }
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, SessionError> {
        let src = std::fs::read_to_string(path).map_err(|source| SessionError::Io { path: path.into(), source })?;
        Self::from_json(&src, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        if self.charts.is_empty() {
            return Err(SessionError::Manifest("at least one chart is required".into()));
        }
        if let Some(e) = self.options.epsilon {
            if !(0.0..=1.0).contains(&e) {
                return Err(SessionError::Manifest(format!("epsilon {e} outside [0, 1]")));
            }
        }
        if let Some(o) = self.options.dim_opacity {
            if !(0.0..=1.0).contains(&o) {
                return Err(SessionError::Manifest(format!("dimOpacity {o} outside [0, 1]")));
            }
        }
        if self.options.budget == Some(0) {
            return Err(SessionError::Manifest("budget must be positive".into()));
        }
        Ok(())
    }

    pub fn link_options(&self) -> LinkOptions {
        let d = LinkOptions::default();
        LinkOptions {
            epsilon: self.options.epsilon.unwrap_or(d.epsilon),
            budget: self.options.budget.unwrap_or(d.budget),
        }
    }

    /// View ids: file stems, suffixed on collision.
    pub fn view_ids(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.charts {
            let stem = c.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "chart".into());
            let mut id = stem.clone();
            let mut k = 2;
            while out.contains(&id) || id == EXTERNAL {
                id = format!("{stem}_{k}");
                k += 1;
            }
            out.push(id);
        }
        out
    }
}

/// One deconstructed chart.
#[derive(Debug, Clone)]
pub struct ChartView {
    pub id: String,
    pub source: Vec<u8>,
    pub doc: SvgDocument,
    pub meta: ChartMetadata,
    pub table: DataTable,
}

impl ChartView {
    pub fn from_bytes(id: &str, bytes: Vec<u8>) -> Result<Self, SvgError> {
        let doc = parse_svg(&bytes)?;
        let mut meta = deconstruct(&doc);
        let (table, diags) = infer_table_with_diagnostics(&doc, &meta, id);
        if !diags.is_empty() {
            meta.degraded = true;
        }
        meta.diagnostics.extend(diags);
        Ok(ChartView { id: id.to_string(), source: bytes, doc, meta, table })
    }

    pub fn load(id: &str, path: &Path) -> Result<Self, SessionError> {
        let bytes = std::fs::read(path).map_err(|source| SessionError::Io { path: path.into(), source })?;
        Self::from_bytes(id, bytes).map_err(|source| SessionError::Svg { path: path.into(), source })
    }
}

/// Reads an external CSV or JSON table.
pub fn load_external(path: &Path) -> Result<DataTable, SessionError> {
    let src = std::fs::read_to_string(path).map_err(|source| SessionError::Io { path: path.into(), source })?;
    let json = path.extension().map(|e| e.eq_ignore_ascii_case("json")).unwrap_or(false);
    let res = if json { DataTable::from_json(EXTERNAL, &src) } else { DataTable::from_csv(EXTERNAL, &src) };
    res.map_err(|source| SessionError::Data { path: path.into(), source })
}

/// Loads every chart and the external table named by a manifest.
pub fn load_manifest(m: &SessionManifest) -> Result<(Vec<ChartView>, Option<DataTable>), SessionError> {
    let mut views = Vec::new();
    for (id, path) in m.view_ids().iter().zip(&m.charts) {
        views.push(ChartView::load(id, path)?);
    }
    let external = m.data.as_deref().map(load_external).transpose()?;
    Ok((views, external))
}
