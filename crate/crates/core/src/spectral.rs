//! Shared result record for eigenvalue computations.

use serde::{Deserialize, Serialize};

/// How an eigenvalue was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    RadialExact,
    #[serde(rename = "FEM2D")]
    Fem2D,
    Model1D,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::RadialExact => "RadialExact",
            Method::Fem2D => "FEM2D",
            Method::Model1D => "Model1D",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "RadialExact" => Some(Method::RadialExact),
            "FEM2D" => Some(Method::Fem2D),
            "Model1D" => Some(Method::Model1D),
            _ => None,
        }
    }
}

/// Method-specific discretisation data attached to a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Discretization {
    /// Exact secular equation; `l` is the angular momentum of the mode.
    Radial { l: usize, multiplicity: usize, tolerance: f64 },
    /// Finite elements; `h` is the finest mesh width, `dofs` its vertex count,
    /// `order` the observed convergence order when a ladder was used.
    Fem { h: f64, dofs: usize, order: Option<f64> },
    Model1D { tolerance: f64 },
}

/// One eigenvalue `E_j` of the Robin Laplacian at parameter `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub domain_id: String,
    pub alpha: f64,
    /// 1-based index in the non-decreasing, multiplicity-counted ordering.
    pub j: usize,
    pub energy: f64,
    pub method: Method,
    pub disc: Discretization,
    pub err_est: f64,
    /// Set when a solver did not meet its convergence target.
    #[serde(default)]
    pub flagged: bool,
}
