use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FibNet, FibNetConfig};
use crate::nn::ModelDocument;
use crate::{Error, Result};

pub const FIBNET_FORMAT_VERSION: u32 = 1;

/// JSON form of a [`FibNet`]: the config plus one model document per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibNetDocument {
    pub format_version: u32,
    pub config: FibNetConfig,
    pub blocks: Vec<ModelDocument>,
}

impl From<&FibNet> for FibNetDocument {
    fn from(net: &FibNet) -> Self {
        Self {
            format_version: FIBNET_FORMAT_VERSION,
            config: net.config.clone(),
            blocks: net.blocks.iter().map(ModelDocument::from).collect(),
        }
    }
}

impl FibNetDocument {
    pub fn into_fibnet(self) -> Result<FibNet> {
        if self.format_version != FIBNET_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported fibnet format_version {}",
                self.format_version
            )));
        }
        let blocks = self
            .blocks
            .into_iter()
            .map(ModelDocument::into_network)
            .collect::<Result<Vec<_>>>()?;
        FibNet::from_blocks(self.config, blocks).map_err(|e| Error::Format(e.to_string()))
    }
}

impl FibNet {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FibNetDocument::from(self)).expect("fibnet document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FibNetDocument =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        doc.into_fibnet()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
