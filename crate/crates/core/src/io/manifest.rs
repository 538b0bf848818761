use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sidecar metadata for an embedding file, stored as TOML.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub class_names: Vec<String>,
    pub source: String,
    /// Seconds since the Unix epoch. Taken from `SOURCE_DATE_EPOCH` when set,
    /// otherwise 0, so regenerated outputs stay byte-identical.
    pub created_unix: u64,
    #[serde(default)]
    pub seed_lineage: BTreeMap<String, u64>,
}

impl Manifest {
    pub fn new(class_names: Vec<String>, source: impl Into<String>) -> Self {
        Self {
            class_names,
            source: source.into(),
            created_unix: reproducible_timestamp(),
            seed_lineage: BTreeMap::new(),
        }
    }

    /// Checks the class list against the paired embedding file's `C`.
    pub fn check_classes(&self, num_classes: u32) -> Result<()> {
        if self.class_names.len() != num_classes as usize {
            return Err(Error::config(format!(
                "manifest lists {} class names, embedding file has {num_classes} classes",
                self.class_names.len()
            )));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are always representable")
    }

    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        super::write_atomic(path, self.to_toml().as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml(&super::read_text(path)?, path)
    }

    /// Conventional manifest location next to an embedding file.
    pub fn path_for(embeddings: &Path) -> std::path::PathBuf {
        embeddings.with_extension("manifest.toml")
    }
}

fn reproducible_timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut m = Manifest::new(vec!["a".into(), "b \"quoted\"".into()], "synthetic");
        m.seed_lineage.insert("seed".into(), 7);
        m.seed_lineage.insert("test_seed".into(), 9);
        let text = m.to_toml();
        assert_eq!(Manifest::from_toml(&text, Path::new("m")).unwrap(), m);
        assert!(m.check_classes(2).is_ok());
        assert!(m.check_classes(3).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "class_names = []\nsource = \"x\"\ncreated_unix = 0\nextra = 1\n";
        assert!(matches!(
            Manifest::from_toml(text, Path::new("m")),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn path_convention() {
        assert_eq!(
            Manifest::path_for(Path::new("out/bench.emb")),
            Path::new("out/bench.manifest.toml")
        );
    }
}
