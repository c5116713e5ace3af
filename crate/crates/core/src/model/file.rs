use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ChannelParams, ContentCatalog, CostWeights, DeviceProfile, Instance, RequestMatrix};
use crate::error::{Error, Result};
use crate::matrix;

/// On-disk layout of an instance. The request matrix is either inline or a CSV
/// path resolved relative to the document.
#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    catalog: ContentCatalog,
    devices: Vec<DeviceProfile>,
    channel: ChannelParams,
    weights: CostWeights,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<RequestMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix_path: Option<PathBuf>,
    #[serde(default)]
    seed: Option<u64>,
}

impl Instance {
    /// Parses an instance document. `base_dir` resolves a relative `matrix_path`.
    pub fn from_json_str(text: &str, base_dir: Option<&Path>) -> Result<Instance> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        let matrix = match (doc.matrix, doc.matrix_path) {
            (Some(m), None) => m,
            (None, Some(p)) => {
                let path = match base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p,
                };
                matrix::load_matrix(&path)?
            }
            (Some(_), Some(_)) => {
                return Err(Error::InvalidInstance(
                    "give either \"matrix\" or \"matrix_path\", not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidInstance(
                    "missing \"matrix\" or \"matrix_path\"".into(),
                ))
            }
        };
        Ok(Instance {
            catalog: doc.catalog,
            devices: doc.devices,
            channel: doc.channel,
            weights: doc.weights,
            matrix,
            seed: doc.seed,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Instance::from_json_str(&text, path.parent())
    }

    /// Serializes with SI numbers and the matrix inline.
    pub fn to_json_string(&self) -> String {
        let doc = InstanceDoc {
            catalog: self.catalog.clone(),
            devices: self.devices.clone(),
            channel: self.channel.clone(),
            weights: self.weights.clone(),
            matrix: Some(self.matrix.clone()),
            matrix_path: None,
            seed: self.seed,
        };
        serde_json::to_string_pretty(&doc).expect("instance serialization is infallible")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json_string()).map_err(|e| Error::io(path, e))
    }
}
