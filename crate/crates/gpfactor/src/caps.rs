//! Resource limits shared by the analyses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Maximum number of group elements produced by word enumeration.
    pub enumeration: usize,
    /// Maximum dimension of a truncated Fock space.
    pub fock_dimension: usize,
    /// Maximum number of vertices for sweeps over all induced subgraphs.
    pub sweep_vertices: usize,
    /// Maximum number of cliques in transfer-matrix computations.
    pub cliques: usize,
    /// Maximum number of graph isomorphisms listed in reports.
    pub isomorphisms: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: 1_000_000,
            fock_dimension: 20_000,
            sweep_vertices: 16,
            cliques: 1 << 20,
            isomorphisms: 1000,
        }
    }
}

impl Caps {
    /// Applies overrides written as `key=value` pairs separated by commas,
    /// e.g. `enumeration=5000,sweep_vertices=12`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::validation(format!("cap override {item:?} is not key=value")))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::validation(format!("cap override {item:?} has a non-integer value")))?;
            match k.trim() {
                "enumeration" => self.enumeration = v,
                "fock_dimension" => self.fock_dimension = v,
                "sweep_vertices" => self.sweep_vertices = v,
                "cliques" => self.cliques = v,
                "isomorphisms" => self.isomorphisms = v,
                other => return Err(Error::validation(format!("unknown cap {other:?}"))),
            }
        }
        Ok(self)
    }
}
