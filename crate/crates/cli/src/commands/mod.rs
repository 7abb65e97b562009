//! One module per subcommand. Each returns a [`Report`]; errors are usage
//! or configuration problems.

pub mod conjugate;
pub mod cover;
pub mod fitz;
pub mod graph;
pub mod solve;
pub mod verify;

use std::path::PathBuf;

use bipokit_core::laws::Sampling;

use crate::config::RunConfig;

/// Settings shared by every command: flags first, then the config file.
#[derive(Debug, Default, Clone)]
pub struct Common {
    pub config: RunConfig,
    pub grid: Option<String>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn grid(&self) -> Option<String> {
        self.grid.clone().or_else(|| self.config.grid.clone())
    }

    pub fn tol(&self, default: f64) -> f64 {
        self.tol.or(self.config.tol).unwrap_or(default)
    }

    pub fn seed(&self) -> u64 {
        self.seed.or(self.config.seed).unwrap_or(0)
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.out.clone().or_else(|| self.config.out.clone())
    }

    pub fn sampling(&self, per_branch: Option<usize>) -> Sampling {
        Sampling {
            per_branch: per_branch.or(self.config.per_branch).unwrap_or(Sampling::default().per_branch),
            seed: self.seed(),
            ..Sampling::default()
        }
    }
}

/// Default probe box for a space of dimension `dim`.
pub fn default_grid(dim: usize) -> &'static str {
    match dim {
        1 => "-3:3:61",
        2 | 3 => "-2:2:21",
        _ => "-1:1:5",
    }
}
