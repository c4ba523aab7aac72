//! Shared helpers for the integration suites: a seeded generator for random
//! split networks, and small numeric utilities kept independent of the
//! library's own linear algebra.

// Each suite pulls in a different subset of these helpers.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use relsplit::graph::{KGraph, KSplitting, Multigraph};
use relsplit::lattice::state::StateSpace;
use relsplit::reliability::KNetwork;
use relsplit::splitting::TransferBundle;

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A generated instance: the assembled network plus the splitting it was
/// built from.
pub struct Instance {
    pub name: String,
    pub net: KNetwork,
    pub split: KSplitting,
}

impl Instance {
    pub fn bundle(&self) -> TransferBundle {
        let base = self.split.base_partition().unwrap();
        TransferBundle::build(Arc::new(StateSpace::new(&base).unwrap())).unwrap()
    }
}

fn named(name: &str, vertices: &[&str], edges: &[(&str, &str, &str)]) -> Multigraph {
    let _ = name;
    let vs: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
    let es: Vec<(String, String, String)> = edges
        .iter()
        .map(|(id, u, v)| (id.to_string(), u.to_string(), v.to_string()))
        .collect();
    Multigraph::new(&vs, &es).unwrap()
}

fn network(graph: Multigraph, terminals: &[&str], prob: BTreeMap<String, BigRational>) -> KNetwork {
    let kg = KGraph::new(graph, terminals.iter().map(|s| s.to_string())).unwrap();
    KNetwork::new(kg, prob, 24).unwrap()
}

fn splitting_of(net: &KNetwork, x: &[&str]) -> KSplitting {
    let x: Vec<String> = x.iter().map(|s| s.to_string()).collect();
    relsplit::graph::split_by_separator(net.kgraph(), &x, None).unwrap()
}

/// Path a–x–b, both edges 1/2, terminals {a, b}, separator {x}.
pub fn path_instance() -> Instance {
    let g = named(
        "path",
        &["a", "x", "b"],
        &[("e1", "a", "x"), ("e2", "x", "b")],
    );
    let prob = [("e1", ratio(1, 2)), ("e2", ratio(1, 2))]
        .into_iter()
        .map(|(id, p)| (id.to_string(), p))
        .collect();
    let net = network(g, &["a", "b"], prob);
    let split = splitting_of(&net, &["x"]);
    Instance {
        name: "path".into(),
        net,
        split,
    }
}

/// Diamond a–{x,y}–b, four edges 1/2, terminals {a, b}, separator {x, y}.
pub fn diamond_instance() -> Instance {
    let g = named(
        "diamond",
        &["a", "x", "y", "b"],
        &[
            ("e1", "a", "x"),
            ("e2", "a", "y"),
            ("e3", "x", "b"),
            ("e4", "y", "b"),
        ],
    );
    let prob = ["e1", "e2", "e3", "e4"]
        .into_iter()
        .map(|id| (id.to_string(), ratio(1, 2)))
        .collect();
    let net = network(g, &["a", "b"], prob);
    let split = splitting_of(&net, &["x", "y"]);
    Instance {
        name: "diamond".into(),
        net,
        split,
    }
}

fn complete_edges(prefix: &str, vertices: &[&str]) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            out.push((
                format!("{prefix}{}", out.len()),
                vertices[i].to_string(),
                vertices[j].to_string(),
            ));
        }
    }
    out
}

/// Two complete graphs on four vertices glued along `shared` common
/// vertices (2 or 3), terminals one extreme vertex on each side, varied
/// rational probabilities.
pub fn glued_complete_instance(shared: usize) -> Instance {
    assert!(shared == 2 || shared == 3);
    let (left, right, x): (Vec<&str>, Vec<&str>, Vec<&str>) = match shared {
        2 => (
            vec!["a", "b", "x", "y"],
            vec!["x", "y", "e", "f"],
            vec!["x", "y"],
        ),
        _ => (
            vec!["a", "x", "y", "z"],
            vec!["x", "y", "z", "e"],
            vec!["x", "y", "z"],
        ),
    };
    let mut edges = complete_edges("l", &left);
    edges.extend(complete_edges("r", &right));
    let mut vertices: Vec<&str> = left.clone();
    for v in &right {
        if !vertices.contains(v) {
            vertices.push(v);
        }
    }
    let vs: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
    let graph = Multigraph::new(&vs, &edges).unwrap();
    let terminals = match shared {
        2 => ["a", "f"],
        _ => ["a", "e"],
    };
    // A fixed but non-uniform probability pattern.
    let pool = [
        ratio(1, 2),
        ratio(1, 3),
        ratio(2, 3),
        ratio(3, 4),
        ratio(1, 4),
        ratio(2, 5),
    ];
    let prob: BTreeMap<String, BigRational> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id().to_owned(), pool[i % pool.len()].clone()))
        .collect();
    let net = network(graph, &terminals, prob);
    let split = splitting_of(&net, &x);
    Instance {
        name: format!("glued complete graphs, {shared} shared"),
        net,
        split,
    }
}

/// Budget knobs for [`random_instance`].
pub struct GenLimits {
    pub x_size: usize,
    pub max_extra_vertices: usize,
    pub side_edge_cap: usize,
    pub total_edge_cap: usize,
}

/// One random split network: each side is a spanning tree over its
/// vertices plus random extra edges (parallels allowed), glued on the
/// separator. Terminals land on both sides and sometimes on the separator
/// itself; probabilities are random rationals including 0 and 1.
pub fn random_instance(rng: &mut ChaCha8Rng, limits: &GenLimits) -> Instance {
    let x: Vec<String> = ["x", "y", "z"][..limits.x_size]
        .iter()
        .map(|s| s.to_string())
        .collect();

    // Vertex counts first, so the edge budget can account for both
    // spanning trees before any extra edges are handed out.
    let extras: Vec<usize> = (0..2)
        .map(|_| rng.gen_range(1..=limits.max_extra_vertices))
        .collect();
    let tree_sizes: Vec<usize> = extras.iter().map(|e| limits.x_size + e - 1).collect();
    let mut spare = limits
        .total_edge_cap
        .checked_sub(tree_sizes.iter().sum())
        .expect("edge budget cannot fit two spanning trees");

    let mut side_graphs: Vec<Multigraph> = Vec::new();
    let mut side_vertices: Vec<Vec<String>> = Vec::new();
    for (side, prefix) in ["a", "b"].iter().enumerate() {
        let mut vertices = x.clone();
        vertices.extend((0..extras[side]).map(|i| format!("{prefix}{i}")));

        // Spanning tree over the side's vertices in a shuffled order.
        let mut order: Vec<usize> = (0..vertices.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut edges: Vec<(String, String, String)> = Vec::new();
        for (pos, &vi) in order.iter().enumerate().skip(1) {
            let anchor = order[rng.gen_range(0..pos)];
            edges.push((
                format!("s{side}e{}", edges.len()),
                vertices[anchor].clone(),
                vertices[vi].clone(),
            ));
        }
        // Extra edges, random endpoints, parallels welcome.
        let room = limits
            .side_edge_cap
            .saturating_sub(edges.len())
            .min(spare)
            .min(4);
        let extra_edges = rng.gen_range(0..=room);
        spare -= extra_edges;
        for _ in 0..extra_edges {
            let u = rng.gen_range(0..vertices.len());
            let mut v = rng.gen_range(0..vertices.len());
            if u == v {
                v = (v + 1) % vertices.len();
            }
            edges.push((
                format!("s{side}e{}", edges.len()),
                vertices[u].clone(),
                vertices[v].clone(),
            ));
        }
        side_graphs.push(Multigraph::new(&vertices, &edges).unwrap());
        side_vertices.push(vertices);
    }

    // Terminals: at least one per side; separator vertices join in
    // sometimes, so both "inside X" and "outside X" terminals occur.
    let mut terminals: Vec<String> = Vec::new();
    for vertices in &side_vertices {
        let off_x: Vec<&String> = vertices.iter().filter(|v| !x.contains(v)).collect();
        terminals.push(off_x[rng.gen_range(0..off_x.len())].clone());
    }
    if rng.gen_bool(0.4) {
        terminals.push(x[rng.gen_range(0..x.len())].clone());
    }
    terminals.sort();
    terminals.dedup();

    let side_kgraphs: Vec<KGraph> = side_graphs
        .into_iter()
        .zip(&side_vertices)
        .map(|(g, vs)| {
            let own: Vec<String> = terminals
                .iter()
                .filter(|t| vs.contains(t))
                .cloned()
                .collect();
            KGraph::new(g, own).unwrap()
        })
        .collect();
    let mut sides = side_kgraphs.into_iter();
    let split = KSplitting::new(sides.next().unwrap(), sides.next().unwrap(), x).unwrap();

    let assembled = split.reassemble().unwrap();
    let prob: BTreeMap<String, BigRational> = assembled
        .graph()
        .edges()
        .iter()
        .map(|e| {
            let den: i64 = rng.gen_range(2..=6);
            let num: i64 = rng.gen_range(0..=den);
            (e.id().to_owned(), ratio(num, den))
        })
        .collect();
    let net = KNetwork::new(assembled, prob, 24).unwrap();
    Instance {
        name: "seeded random".into(),
        net,
        split,
    }
}

/// Fraction-free determinant (Bareiss) of a small integer matrix.
pub fn determinant(mat: &[Vec<i64>]) -> i128 {
    let n = mat.len();
    let mut a: Vec<Vec<i128>> = mat
        .iter()
        .map(|row| row.iter().map(|&v| i128::from(v)).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}
