use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{HybridDataModel, ModelError};

/// Wire form: `{nodes, rels, cmp, g, val}` with nodes referenced by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub rels: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub cmp: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub g: BTreeMap<String, String>,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<String>>,
}

impl From<&HybridDataModel> for ModelJson {
    fn from(m: &HybridDataModel) -> Self {
        let name = |n: usize| m.name(n).to_string();
        ModelJson {
            nodes: m.names().to_vec(),
            rels: m
                .relation_names()
                .map(|a| (a.to_string(), m.relation(a).into_iter().map(|(x, y)| (name(x), name(y))).collect()))
                .collect(),
            cmp: m
                .comparison_names()
                .map(|c| (c.to_string(), m.classes(c).into_iter().map(|cl| cl.into_iter().map(name).collect()).collect()))
                .collect(),
            g: m.assignment().iter().map(|(i, n)| (i.to_string(), name(*n))).collect(),
            val: m.prop_names().map(|p| (p.to_string(), m.valuation(p).iter().map(name).collect())).collect(),
        }
    }
}

impl TryFrom<&ModelJson> for HybridDataModel {
    type Error = ModelError;

    fn try_from(j: &ModelJson) -> Result<Self, Self::Error> {
        let mut m = HybridDataModel::new(j.nodes.iter().cloned())?;
        for (a, pairs) in &j.rels {
            m.declare_relation(a);
            for (x, y) in pairs {
                let (x, y) = (m.node(x)?, m.node(y)?);
                m.add_edge(a, x, y)?;
            }
        }
        for (c, classes) in &j.cmp {
            let classes = classes
                .iter()
                .map(|cl| cl.iter().map(|n| m.node(n)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            m.set_partition(c, &classes)?;
        }
        for (i, n) in &j.g {
            let n = m.node(n)?;
            m.assign(i, n)?;
        }
        for (p, ns) in &j.val {
            m.declare_prop(p);
            for n in ns {
                let n = m.node(n)?;
                m.set_true(p, n)?;
            }
        }
        Ok(m)
    }
}

impl Serialize for HybridDataModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ModelJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HybridDataModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ModelJson::deserialize(d)?;
        HybridDataModel::try_from(&j).map_err(serde::de::Error::custom)
    }
}
