use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How base simplices of cone rules are sampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum BaseScheme {
    /// Product rule when it fits the node budget, low-discrepancy otherwise.
    Auto,
    /// Conical product Gauss rule, error from two orders.
    Product,
    /// Shifted R_d points; error from the spread over replications.
    LowDiscrepancy { points: usize, replications: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct SampleBudget {
    /// Target relative tolerance.
    pub tol: f64,
    pub max_nodes: u64,
    pub seed: u64,
    pub base: BaseScheme,
    /// Extra Gauss nodes per direction beyond the exactness count, for
    /// integrands that are only analytic.
    pub smooth_extra: usize,
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget {
            tol: 1e-7,
            max_nodes: 50_000_000,
            seed: 0x5EED,
            base: BaseScheme::Auto,
            smooth_extra: 8,
        }
    }
}

impl SampleBudget {
    pub fn with_seed(seed: u64) -> Self {
        SampleBudget {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tolerance {} not in (0, 1)", self.tol)));
        }
        if self.max_nodes < 1000 {
            return Err(Error::Config(format!("max nodes {} below 1000", self.max_nodes)));
        }
        if let BaseScheme::LowDiscrepancy { points, replications } = self.base {
            if points == 0 || replications < 2 {
                return Err(Error::Config("low-discrepancy base needs points >= 1 and replications >= 2".into()));
            }
        }
        Ok(())
    }
}
