use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ast::{sym, CmpKind, NodeExpr, PathExpr};

/// Wire form of both expression kinds: a tag, an optional symbol, an optional
/// comparison kind, and ordered children.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AstJson {
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sym: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<CmpKind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<AstJson>,
}

impl AstJson {
    fn leaf(tag: &str, s: &str) -> Self {
        AstJson { tag: tag.into(), sym: Some(s.into()), kind: None, children: vec![] }
    }
}

impl From<&NodeExpr> for AstJson {
    fn from(e: &NodeExpr) -> Self {
        match e {
            NodeExpr::Prop(p) => AstJson::leaf("prop", p),
            NodeExpr::Nominal(i) => AstJson::leaf("nom", i),
            NodeExpr::Bottom => AstJson { tag: "bot".into(), sym: None, kind: None, children: vec![] },
            NodeExpr::Implies(a, b) => AstJson {
                tag: "imp".into(),
                sym: None,
                kind: None,
                children: vec![(&**a).into(), (&**b).into()],
            },
            NodeExpr::At(i, phi) => AstJson {
                tag: "at".into(),
                sym: Some(i.to_string()),
                kind: None,
                children: vec![(&**phi).into()],
            },
            NodeExpr::Diamond(a, phi) => AstJson {
                tag: "dia".into(),
                sym: Some(a.to_string()),
                kind: None,
                children: vec![(&**phi).into()],
            },
            NodeExpr::Compare(a, kind, c, b) => AstJson {
                tag: "cmp".into(),
                sym: Some(c.to_string()),
                kind: Some(*kind),
                children: vec![(&**a).into(), (&**b).into()],
            },
        }
    }
}

impl From<&PathExpr> for AstJson {
    fn from(e: &PathExpr) -> Self {
        match e {
            PathExpr::Atom(a) => AstJson::leaf("atom", a),
            PathExpr::Jump(i) => AstJson::leaf("jump", i),
            PathExpr::Test(phi) => AstJson {
                tag: "test".into(),
                sym: None,
                kind: None,
                children: vec![(&**phi).into()],
            },
            PathExpr::Concat(a, b) => AstJson {
                tag: "concat".into(),
                sym: None,
                kind: None,
                children: vec![(&**a).into(), (&**b).into()],
            },
        }
    }
}

fn need_sym(j: &AstJson) -> Result<&str, String> {
    j.sym.as_deref().ok_or_else(|| format!("'{}' needs a symbol", j.tag))
}

fn need_children(j: &AstJson, n: usize) -> Result<&[AstJson], String> {
    if j.children.len() == n {
        Ok(&j.children)
    } else {
        Err(format!("'{}' needs {n} children, got {}", j.tag, j.children.len()))
    }
}

impl TryFrom<&AstJson> for NodeExpr {
    type Error = String;

    fn try_from(j: &AstJson) -> Result<Self, Self::Error> {
        Ok(match j.tag.as_str() {
            "prop" => NodeExpr::prop(need_sym(j)?),
            "nom" => NodeExpr::nom(need_sym(j)?),
            "bot" => NodeExpr::Bottom,
            "imp" => {
                let c = need_children(j, 2)?;
                NodeExpr::implies((&c[0]).try_into()?, (&c[1]).try_into()?)
            }
            "at" => NodeExpr::at(need_sym(j)?, (&need_children(j, 1)?[0]).try_into()?),
            "dia" => NodeExpr::dia(need_sym(j)?, (&need_children(j, 1)?[0]).try_into()?),
            "cmp" => {
                let c = need_children(j, 2)?;
                let kind = j.kind.ok_or_else(|| "'cmp' needs a kind".to_string())?;
                NodeExpr::Compare(
                    sym_path(&c[0])?.into(),
                    kind,
                    sym(need_sym(j)?),
                    sym_path(&c[1])?.into(),
                )
            }
            other => return Err(format!("unknown node tag '{other}'")),
        })
    }
}

fn sym_path(j: &AstJson) -> Result<PathExpr, String> {
    PathExpr::try_from(j)
}

impl TryFrom<&AstJson> for PathExpr {
    type Error = String;

    fn try_from(j: &AstJson) -> Result<Self, Self::Error> {
        Ok(match j.tag.as_str() {
            "atom" => PathExpr::atom(need_sym(j)?),
            "jump" => PathExpr::jump(need_sym(j)?),
            "test" => PathExpr::test((&need_children(j, 1)?[0]).try_into()?),
            "concat" => {
                let c = need_children(j, 2)?;
                PathExpr::concat(sym_path(&c[0])?, sym_path(&c[1])?)
            }
            other => return Err(format!("unknown path tag '{other}'")),
        })
    }
}

impl Serialize for NodeExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AstJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for NodeExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = AstJson::deserialize(d)?;
        NodeExpr::try_from(&j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for PathExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AstJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PathExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = AstJson::deserialize(d)?;
        PathExpr::try_from(&j).map_err(serde::de::Error::custom)
    }
}
