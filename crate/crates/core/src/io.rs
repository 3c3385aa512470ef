//! JSON file formats.
//!
//! ```text
//! {"n": 3, "edges": [[0, 1, "5"], [1, 2, "7/2"]]}
//! {"n": 3, "hyperedges": [[[0, 1, 2], "6"]]}
//! {"bags": [[0, 1], [1, 2]], "parents": [null, 0]}
//! {"k": 2, "class_of": [0, 1, 0]}
//! ```
//!
//! Budgets are strings holding `"p/q"`, an integer or a decimal; bare JSON
//! integers are tolerated on input. Writers always emit canonical strings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Edge, HyperEdge, HyperInstance, Instance};
use crate::kpartite::Coloring;
use crate::rational::{self, Rational};
use crate::treewidth::TreeDecomposition;

#[derive(Serialize, Deserialize)]
struct EdgeRecord(usize, usize, #[serde(with = "rational::serde_string")] Rational);

#[derive(Serialize, Deserialize)]
struct HyperRecord(Vec<usize>, #[serde(with = "rational::serde_string")] Rational);

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
struct HyperInstanceFile {
    n: usize,
    hyperedges: Vec<HyperRecord>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionFile {
    bags: Vec<Vec<usize>>,
    parents: Vec<Option<usize>>,
}

/// Either kind of instance file.
#[derive(Clone, Debug)]
pub enum AnyInstance {
    Graph(Instance),
    Hyper(HyperInstance),
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    Instance::new(
        file.n,
        file.edges
            .into_iter()
            .map(|EdgeRecord(u, v, b)| Edge::new(u, v, b))
            .collect(),
    )
}

pub fn instance_to_json(instance: &Instance) -> String {
    let file = InstanceFile {
        n: instance.n(),
        edges: instance
            .edges()
            .iter()
            .map(|e| EdgeRecord(e.u, e.v, e.budget.clone()))
            .collect(),
    };
    serde_json::to_string(&file).expect("instance serializes")
}

pub fn hyper_from_json(text: &str) -> Result<HyperInstance> {
    let file: HyperInstanceFile = serde_json::from_str(text)?;
    HyperInstance::new(
        file.n,
        file.hyperedges
            .into_iter()
            .map(|HyperRecord(vertices, budget)| HyperEdge { vertices, budget })
            .collect(),
    )
}

pub fn hyper_to_json(hyper: &HyperInstance) -> String {
    let file = HyperInstanceFile {
        n: hyper.n(),
        hyperedges: hyper
            .hyperedges()
            .iter()
            .map(|h| HyperRecord(h.vertices.clone(), h.budget.clone()))
            .collect(),
    };
    serde_json::to_string(&file).expect("hyper instance serializes")
}

/// Parses a graph instance, falling back to the hypergraph layout when the
/// document has a `hyperedges` key.
pub fn any_instance_from_json(text: &str) -> Result<AnyInstance> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("hyperedges").is_some() {
        hyper_from_json(text).map(AnyInstance::Hyper)
    } else {
        instance_from_json(text).map(AnyInstance::Graph)
    }
}

pub fn decomposition_from_json(text: &str) -> Result<TreeDecomposition> {
    let file: DecompositionFile = serde_json::from_str(text)?;
    if file.bags.len() != file.parents.len() {
        return Err(Error::Parse(format!(
            "{} bags but {} parent entries",
            file.bags.len(),
            file.parents.len()
        )));
    }
    Ok(TreeDecomposition::new(file.bags, file.parents))
}

pub fn decomposition_to_json(td: &TreeDecomposition) -> String {
    let file = DecompositionFile {
        bags: td.bags().to_vec(),
        parents: td.parents().to_vec(),
    };
    serde_json::to_string(&file).expect("decomposition serializes")
}

pub fn coloring_from_json(text: &str) -> Result<Coloring> {
    Ok(serde_json::from_str(text)?)
}

pub fn coloring_to_json(coloring: &Coloring) -> String {
    serde_json::to_string(coloring).expect("coloring serializes")
}

pub fn read_to_string(path: impl AsRef<Path>) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}
