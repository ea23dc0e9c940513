//! `grid.json`: a structure together with an infected set.
//!
//! ```json
//! {"structure": {"family": "plain", "n": 5, "d": 2, "ell": 0, "k": 1, "r": 2},
//!  "infected": [[1, 1], [2, 2]]}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structures::{CellSet, Coord, Structure, StructureSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub structure: StructureSpec,
    pub infected: Vec<Coord>,
}

impl GridFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("grid file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn from_cells(structure: &Structure, cells: &CellSet) -> Self {
        GridFile {
            structure: structure.spec().clone(),
            infected: cells.coords().collect(),
        }
    }

    /// Builds the structure and the infected set, rejecting out-of-range
    /// coordinates.
    pub fn resolve(&self) -> Result<(Structure, CellSet)> {
        let s = Structure::new(self.structure.clone())?;
        let cells = s.cells(&self.infected)?;
        Ok((s, cells))
    }
}

/// Reads a JSON document of type `T` from `path`.
pub fn load_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{what} {}: {e}", path.display())))
}
