//! Plain-text description of an assembled system, stored next to exports.

use serde::{Deserialize, Serialize};
use sghelm_core::assembly::{BoundaryCondition, GalerkinSystem};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldDescriptor {
    Constant { kbar: f64, theta: f64 },
    Wedge { k1: f64, k2: f64, k3: f64, theta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDescriptor {
    pub dim: usize,
    pub q: usize,
    pub h: f64,
    pub bc: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub vars: usize,
    pub degree: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDescriptor {
    pub rows: usize,
    pub nnz: usize,
    pub block_size: usize,
    pub blocks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    pub grid: GridDescriptor,
    pub basis: BasisDescriptor,
    pub field: FieldDescriptor,
    pub matrix: MatrixDescriptor,
}

pub fn bc_name(bc: BoundaryCondition) -> &'static str {
    match bc {
        BoundaryCondition::Dirichlet => "dirichlet",
        BoundaryCondition::Absorbing => "absorbing",
    }
}

impl SystemDescriptor {
    pub fn new(sys: &GalerkinSystem, field: FieldDescriptor) -> Self {
        Self {
            grid: GridDescriptor {
                dim: sys.grid.dim(),
                q: sys.grid.q(),
                h: sys.grid.h(),
                bc: bc_name(sys.bc).to_owned(),
            },
            basis: BasisDescriptor {
                vars: sys.basis.dim(),
                degree: sys.basis.max_degree(),
                size: sys.basis.len(),
            },
            field,
            matrix: MatrixDescriptor {
                rows: sys.dim(),
                nnz: sys.a.nnz(),
                block_size: sys.block_size(),
                blocks: sys.blocks(),
            },
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))
    }
}
