//! The on-disk network description: a small JSON document naming vertices,
//! edges with their operation probabilities, the terminal set, and an
//! optional separator with side assignments for the splitting commands.
//!
//! Probabilities are kept as strings (`"3/4"`, `"0.75"`) so files round-trip
//! byte-for-byte and parse to exact rationals — no floating point anywhere.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{split_by_separator, KGraph, KSplitting, Multigraph};
use crate::reliability::KNetwork;

/// One edge line: endpoints by vertex name, probability verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub u: String,
    pub v: String,
    pub p: String,
}

/// A parsed network file. `separator` and `side_assignment` only matter to
/// the splitting commands and may be absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub terminals: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separator: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_assignment: Option<BTreeMap<String, u8>>,
}

fn digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses `"3/4"`, `"0.75"`, `".5"` or `"1"` to an exact rational.
pub fn parse_probability(raw: &str) -> Result<BigRational> {
    let s = raw.trim();
    let fail = || {
        Error::InvalidProbability(
            raw.to_string(),
            "expected an integer, a fraction like 3/4, or a decimal like 0.75".to_string(),
        )
    };
    if let Some((num, den)) = s.split_once('/') {
        let n = digits(num).ok_or_else(fail)?;
        let d = digits(den).ok_or_else(fail)?;
        if d.is_zero() {
            return Err(Error::InvalidProbability(
                raw.to_string(),
                "zero denominator".to_string(),
            ));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int_part = if int.is_empty() {
            BigInt::zero()
        } else {
            digits(int).ok_or_else(fail)?
        };
        let frac_part = if frac.is_empty() {
            if int.is_empty() {
                return Err(fail());
            }
            BigInt::zero()
        } else {
            digits(frac).ok_or_else(fail)?
        };
        let scale = BigInt::from(10u8).pow(frac.len() as u32);
        return Ok(BigRational::new(int_part * &scale + frac_part, scale));
    }
    Ok(BigRational::from(digits(s).ok_or_else(fail)?))
}

impl NetworkFile {
    pub fn parse_str(text: &str) -> Result<NetworkFile> {
        let file: NetworkFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidNetwork(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<NetworkFile> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidNetwork(format!("{}: {e}", path.display())))?;
        NetworkFile::parse_str(&text)
    }

    /// Shape checks that don't need the graph: at least two terminals, and
    /// side assignments only to sides 1 and 2. Name resolution is left to
    /// the constructors that consume the names.
    fn validate(&self) -> Result<()> {
        if self.terminals.len() < 2 {
            return Err(Error::InvalidNetwork(
                "at least two terminals are required".to_string(),
            ));
        }
        if let Some(assignment) = &self.side_assignment {
            for (rep, &side) in assignment {
                if side != 1 && side != 2 {
                    return Err(Error::InvalidNetwork(format!(
                        "side for {rep} must be 1 or 2, got {side}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Serializes back to JSON; parsing the result reproduces `self`.
    pub fn render(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("network files serialize");
        text.push('\n');
        text
    }

    pub fn to_kgraph(&self) -> Result<KGraph> {
        let edges: Vec<(String, String, String)> = self
            .edges
            .iter()
            .map(|e| (e.id.clone(), e.u.clone(), e.v.clone()))
            .collect();
        let graph = Multigraph::new(&self.vertices, &edges)?;
        KGraph::new(graph, self.terminals.iter().cloned())
    }

    /// Builds the probability-weighted network, parsing every edge's
    /// probability exactly.
    pub fn to_network(&self, limit: usize) -> Result<KNetwork> {
        let kgraph = self.to_kgraph()?;
        let mut prob = BTreeMap::new();
        for e in &self.edges {
            let p = parse_probability(&e.p).map_err(|err| match err {
                Error::InvalidProbability(value, why) => {
                    Error::InvalidProbability(value, format!("edge {}: {why}", e.id))
                }
                other => other,
            })?;
            prob.insert(e.id.clone(), p);
        }
        KNetwork::new(kgraph, prob, limit)
    }

    /// Splits along `separator` if given, else the file's own; the file's
    /// side assignment applies either way.
    pub fn to_splitting(&self, separator: Option<&[String]>) -> Result<KSplitting> {
        let x = separator
            .or(self.separator.as_deref())
            .ok_or_else(|| Error::InvalidNetwork("no separator given".to_string()))?;
        let kgraph = self.to_kgraph()?;
        split_by_separator(&kgraph, x, self.side_assignment.as_ref())
    }
}
