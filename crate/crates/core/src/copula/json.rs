//! JSON form of copula expressions.
//!
//! ```json
//! {"type": "shuffle", "splits": ["1/4", "3/4"], "perm": [1, 2, 3], "flips": [-1, 1, -1]}
//! {"type": "ordinal", "blocks": [{"a": "1/4", "b": "3/4", "summand": {"type": "Pi"}}]}
//! {"type": "reflect", "axis": 2, "of": {"type": "M"}}
//! {"type": "convex", "parts": [{"w": "1/2", "of": {"type": "M"}}, {"w": "1/2", "of": {"type": "W"}}]}
//! ```
//!
//! Rationals are strings `"p/q"`, floats are JSON numbers. `splits` lists the
//! interior breakpoints (the endpoints 0 and 1 may be included).

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::scalar::Scalar;

use super::{Axis, BaseCopula, CopulaExpr};

#[derive(Debug, thiserror::Error)]
pub enum ExprParseError {
    #[error("malformed expression JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] Error),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type")]
enum Node {
    M,
    W,
    Pi,
    #[serde(rename = "shuffle")]
    Shuffle { splits: Vec<Scalar>, perm: Vec<usize>, flips: Vec<i64> },
    #[serde(rename = "ordinal")]
    Ordinal { blocks: Vec<BlockNode> },
    #[serde(rename = "reflect")]
    Reflect { axis: u8, of: Box<Node> },
    #[serde(rename = "convex")]
    Convex { parts: Vec<PartNode> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockNode {
    a: Scalar,
    b: Scalar,
    summand: Node,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartNode {
    w: Scalar,
    of: Node,
}

impl Node {
    fn build(self) -> Result<CopulaExpr, Error> {
        Ok(match self {
            Node::M => CopulaExpr::m(),
            Node::W => CopulaExpr::w(),
            Node::Pi => CopulaExpr::pi(),
            Node::Shuffle { splits, perm, flips } => CopulaExpr::shuffle(splits, perm, flips)?,
            Node::Ordinal { blocks } => CopulaExpr::ordinal(
                blocks
                    .into_iter()
                    .map(|b| Ok((b.a, b.b, b.summand.build()?)))
                    .collect::<Result<Vec<_>, Error>>()?,
            )?,
            Node::Reflect { axis, of } => {
                let axis = Axis::from_index(axis).ok_or_else(|| {
                    Error::InvalidExpression(format!("reflection axis must be 1 or 2, got {axis}"))
                })?;
                of.build()?.reflect(axis)
            }
            Node::Convex { parts } => CopulaExpr::convex(
                parts
                    .into_iter()
                    .map(|p| Ok((p.w, p.of.build()?)))
                    .collect::<Result<Vec<_>, Error>>()?,
            )?,
        })
    }

    fn from_expr(expr: &CopulaExpr) -> Node {
        match expr {
            CopulaExpr::Base(BaseCopula::M) => Node::M,
            CopulaExpr::Base(BaseCopula::W) => Node::W,
            CopulaExpr::Base(BaseCopula::Pi) => Node::Pi,
            CopulaExpr::Shuffle(s) => Node::Shuffle {
                splits: s.interior_splits().to_vec(),
                perm: s.perm_one_based(),
                flips: s.flips().iter().map(|f| f.sign() as i64).collect(),
            },
            CopulaExpr::Ordinal(o) => Node::Ordinal {
                blocks: o
                    .blocks()
                    .iter()
                    .map(|b| BlockNode {
                        a: b.a().clone(),
                        b: b.b().clone(),
                        summand: Node::from_expr(b.summand()),
                    })
                    .collect(),
            },
            CopulaExpr::Reflect { axis, of } => Node::Reflect {
                axis: axis.index(),
                of: Box::new(Node::from_expr(of)),
            },
            CopulaExpr::Convex(m) => Node::Convex {
                parts: m
                    .parts()
                    .iter()
                    .map(|p| PartNode { w: p.weight().clone(), of: Node::from_expr(p.expr()) })
                    .collect(),
            },
        }
    }
}

impl CopulaExpr {
    /// Parses and validates an expression. Syntax and schema problems are
    /// reported separately from invalid copula data.
    pub fn from_json_str(text: &str) -> Result<CopulaExpr, ExprParseError> {
        let node: Node = serde_json::from_str(text).map_err(|e| ExprParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Ok(node.build()?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(Node::from_expr(self)).expect("expression nodes always serialize")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&Node::from_expr(self)).expect("expression nodes always serialize")
    }
}

impl Serialize for CopulaExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Node::from_expr(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CopulaExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Node::deserialize(deserializer)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}
