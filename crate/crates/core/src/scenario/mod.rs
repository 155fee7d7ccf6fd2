//! Fault scenarios, per-sub-topology scenario databases and the
//! lookup-based decision queries built on them.

mod complexity;
mod database;
mod eval;
mod oracle;
mod query;

pub use complexity::{complexity_report, pow2, ComplexityReport};
pub use database::{build_database, BuildOptions, ElementDescriptor, ScenarioDatabase, DEFAULT_MAX_M};
pub use eval::{delivered_capacity, evaluate_scenario, Evaluator};
pub use oracle::{brute_force_oracle, oracle_sink};
pub use query::{project_scenario, query_survivability, survivability_measure, Verdict};

use crate::error::{Error, Result};
use crate::link::LinkNetwork;

/// A fault scenario over a sub-topology: bit i set means element i is faulty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scenario(pub u64);

impl Scenario {
    pub fn is_faulty(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn all_faulty(m: usize) -> Scenario {
        Scenario(if m >= 64 { u64::MAX } else { (1u64 << m) - 1 })
    }
}

/// Faulty elements of a full link network, which may have more than 64 elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FaultSet {
    faulty: Vec<bool>,
}

impl FaultSet {
    pub fn none(m: usize) -> Self {
        FaultSet { faulty: vec![false; m] }
    }

    pub fn all(m: usize) -> Self {
        FaultSet { faulty: vec![true; m] }
    }

    pub fn from_mask(m: usize, mask: u64) -> Self {
        FaultSet { faulty: (0..m).map(|i| i < 64 && mask >> i & 1 == 1).collect() }
    }

    pub fn from_indices(m: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = FaultSet::none(m);
        for i in indices {
            set.faulty[i] = true;
        }
        set
    }

    /// Looks up element names such as `VB27` or `H1`.
    pub fn from_names<S: AsRef<str>>(net: &LinkNetwork, names: &[S]) -> Result<Self> {
        let indices = names.iter().map(|n| net.find_or_err(n.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(FaultSet::from_indices(net.len(), indices))
    }

    pub fn len(&self) -> usize {
        self.faulty.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faulty.is_empty()
    }

    pub fn is_faulty(&self, i: usize) -> bool {
        self.faulty[i]
    }

    pub fn set(&mut self, i: usize, faulty: bool) {
        self.faulty[i] = faulty;
    }

    pub fn faulty(&self) -> impl Iterator<Item = usize> + '_ {
        self.faulty.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i)
    }

    pub(crate) fn check_width(&self, net: &LinkNetwork) -> Result<()> {
        if self.len() != net.len() {
            return Err(Error::ScenarioWidth { got: self.len(), expected: net.len() });
        }
        Ok(())
    }
}
