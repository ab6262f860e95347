use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::metrics::Metrics;
use crate::tree::ValidationReport;
use crate::types::ElementId;

/// Identifier of a registered list. Engines assign ids from a private
/// counter in creation order, so two engines fed the same operation sequence
/// agree on every id.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ListId(pub u64);

impl std::fmt::Debug for ListId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "l{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Tt,
    Ltt,
    Oracle,
}

impl EngineKind {
    pub fn build(self) -> Box<dyn Engine> {
        match self {
            EngineKind::Tt => Box::new(crate::tt::TtEngine::new()),
            EngineKind::Ltt => Box::new(crate::ltt::LttEngine::new()),
            EngineKind::Oracle => Box::new(crate::oracle::OracleEngine::new()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Tt => "tt",
            EngineKind::Ltt => "ltt",
            EngineKind::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tt" => Ok(EngineKind::Tt),
            "ltt" => Ok(EngineKind::Ltt),
            "oracle" => Ok(EngineKind::Oracle),
            other => Err(format!("unknown engine {other:?} (expected tt, ltt or oracle)")),
        }
    }
}

/// The dynamic partial sorting interface every engine implements.
///
/// `psort` never mutates the represented lists; it takes `&mut self` only to
/// account its work in [`Metrics`]. Update operations consume their list
/// arguments and return fresh ids.
pub trait Engine {
    fn kind(&self) -> EngineKind;

    /// Register a new list, assigning fresh element ids in list order.
    fn new_list(&mut self, values: &[i64]) -> Result<ListId, Error>;

    /// The `min(k, n)` smallest elements in increasing order.
    fn psort(&mut self, list: ListId, k: usize) -> Result<Vec<(ElementId, i64)>, Error>;

    fn changeval(&mut self, list: ListId, elem: ElementId, value: i64) -> Result<(), Error>;

    /// Concatenate: `a`'s elements followed by `b`'s. Both inputs are
    /// consumed.
    fn link(&mut self, a: ListId, b: ListId) -> Result<ListId, Error>;

    /// Split after `elem`: the first result holds head..elem inclusive, the
    /// second the rest (possibly empty). The input is consumed.
    fn cut(&mut self, list: ListId, elem: ElementId) -> Result<(ListId, ListId), Error>;

    /// Current (id, value) sequence of the list, in list order.
    fn elements(&self, list: ListId) -> Result<Vec<(ElementId, i64)>, Error>;

    fn list_len(&self, list: ListId) -> Result<usize, Error>;

    /// Run the engine's structural validators over one list.
    fn validate(&self, list: ListId) -> Result<ValidationReport, Error>;

    fn metrics(&self) -> &Metrics;

    fn metrics_mut(&mut self) -> &mut Metrics;

    fn reset_metrics(&mut self) {
        self.metrics_mut().reset();
    }
}
