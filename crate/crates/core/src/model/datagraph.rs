use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{HybridDataModel, ModelError};

/// A node of a data graph: labels, `attribute: value` records and an
/// optional index label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgNode {
    pub id: String,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub attrs: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgEdge {
    pub from: String,
    pub to: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataGraph {
    pub nodes: Vec<DgNode>,
    #[serde(default)]
    pub edges: Vec<DgEdge>,
}

/// Encodes a data graph as a model: labels become propositions, index labels
/// nominals, edges relations, and each attribute `c` the comparison relating
/// nodes with the same value for `c` (closed under equivalence).
pub fn ingest_datagraph(dg: &DataGraph) -> Result<HybridDataModel, ModelError> {
    let mut m = HybridDataModel::new(dg.nodes.iter().map(|n| n.id.clone()))?;
    let mut seen_index = BTreeSet::new();
    let mut attrs: BTreeSet<&str> = BTreeSet::new();
    for (id, node) in dg.nodes.iter().enumerate() {
        for l in &node.labels {
            m.set_true(l, id)?;
        }
        if let Some(ix) = &node.index {
            if !seen_index.insert(ix.clone()) {
                return Err(ModelError::DuplicateIndex(ix.clone()));
            }
            m.assign(ix, id)?;
        }
        attrs.extend(node.attrs.keys().map(String::as_str));
    }
    for e in &dg.edges {
        let (x, y) = (m.node(&e.from)?, m.node(&e.to)?);
        m.add_edge(&e.label, x, y)?;
    }
    for c in attrs {
        let mut by_value: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (id, node) in dg.nodes.iter().enumerate() {
            if let Some(v) = node.attrs.get(c) {
                by_value.entry(v.to_string()).or_default().push(id);
            }
        }
        let classes: Vec<Vec<usize>> = by_value.into_values().collect();
        m.set_partition(c, &classes)?;
    }
    Ok(m)
}
