use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::usage;

/// Optional TOML config file. Each table overrides fields of the
/// corresponding resolved structure; command-line flags override the file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub generate: Option<toml::Table>,
    pub model: Option<toml::Table>,
    pub train: Option<toml::Table>,
    pub search: Option<toml::Table>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| usage(format!("--config {}: {e}", path.display())))
    }
}

/// Replaces fields of `base` with the entries of `table`. Unknown keys and
/// type mismatches are usage errors naming `section.key`.
pub fn overlay<T: Serialize + DeserializeOwned>(
    base: &T,
    table: Option<&toml::Table>,
    section: &str,
) -> Result<T> {
    let Some(table) = table else {
        return Ok(serde_json::from_value(serde_json::to_value(base)?)?);
    };
    let mut value = serde_json::to_value(base)?;
    let obj = value
        .as_object_mut()
        .expect("config structures serialize to objects");
    for (key, v) in table {
        if !obj.contains_key(key) {
            return Err(usage(format!("config: unknown field {section}.{key}")));
        }
        let v =
            serde_json::to_value(v).map_err(|e| usage(format!("config: {section}.{key}: {e}")))?;
        obj.insert(key.clone(), v);
    }
    serde_json::from_value(value).map_err(|e| usage(format!("config: [{section}] {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bevtraj::model::ModelConfig;

    #[test]
    fn overlay_replaces_fields() {
        let t: toml::Table = toml::from_str("gcn_layers = 3\nknn_k = 2").unwrap();
        let m = overlay(&ModelConfig::default(), Some(&t), "model").unwrap();
        assert_eq!(m.gcn_layers, 3);
        assert_eq!(m.knn_k, 2);
        assert_eq!(m.lstm_hidden, ModelConfig::default().lstm_hidden);
    }

    #[test]
    fn unknown_key_named() {
        let t: toml::Table = toml::from_str("gcn_layerz = 3").unwrap();
        let err = overlay(&ModelConfig::default(), Some(&t), "model").unwrap_err();
        assert!(err.to_string().contains("model.gcn_layerz"));
    }

    #[test]
    fn wrong_type_rejected() {
        let t: toml::Table = toml::from_str("gcn_layers = \"two\"").unwrap();
        assert!(overlay(&ModelConfig::default(), Some(&t), "model").is_err());
    }
}
