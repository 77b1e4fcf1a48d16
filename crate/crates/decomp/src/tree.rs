//! Materialized decomposition trees and their export formats.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::OffspringModel;
use crate::sim::{require_depth_cap, GenerationTrace, PoissonSampler};

/// Safety cap on materialized nodes: populations grow like `lambda^depth`,
/// so an over-deep tree request is refused instead of exhausting memory.
pub const MAX_TREE_NODES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Node {
    parent: Option<u32>,
    level: u32,
}

/// A simulated decomposition tree: nodes in generation order, each with a
/// parent link and level index; the root is node 0 at level 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionTree {
    nodes: Vec<Node>,
    level_counts: Vec<u64>,
}

impl DecompositionTree {
    /// Number of materialized nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Per-level population counts, identical to the trace simulated from
    /// the same seed (including a trailing zero if the line went extinct).
    pub fn level_counts(&self) -> &[u64] {
        &self.level_counts
    }

    /// Level of a node.
    pub fn level(&self, node: u32) -> u32 {
        self.nodes[node as usize].level
    }

    /// Parent of a node; `None` for the root.
    pub fn parent(&self, node: u32) -> Option<u32> {
        self.nodes[node as usize].parent
    }

    /// Child lists in generation order (children of node `i`, ascending).
    fn children(&self) -> Vec<Vec<u32>> {
        let mut children = vec![Vec::new(); self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                children[p as usize].push(id as u32);
            }
        }
        children
    }
}

/// Export formats for a decomposition tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeFormat {
    /// Nested objects `{"id":..,"level":..,"children":[..]}`.
    Json,
    /// Graphviz digraph, one edge per parent-child pair.
    Dot,
}

/// Simulates a full decomposition tree for one seed.
///
/// Consumes random draws in exactly the same order as
/// [`crate::sim::simulate_trace`], so the tree's per-level counts equal the
/// trace from the same seed. Refuses trees beyond [`MAX_TREE_NODES`] nodes.
///
/// # Examples
///
/// ```
/// let model = decomp::OffspringModel::new(2.0).unwrap();
/// let tree = decomp::simulate_tree(&model, 42, 4).unwrap();
/// let trace = decomp::simulate_trace(&model, 42, 4).unwrap();
/// assert_eq!(tree.level_counts(), trace.z());
/// ```
pub fn simulate_tree(
    model: &OffspringModel<f64>,
    seed: u64,
    depth_cap: u32,
) -> Result<DecompositionTree> {
    let sampler = PoissonSampler::new(model.lambda())?;
    require_depth_cap(depth_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = vec![Node {
        parent: None,
        level: 0,
    }];
    let mut level_counts = vec![1u64];
    let mut level_start = 0usize;
    for level in 1..=depth_cap {
        let level_end = nodes.len();
        let mut born = 0u64;
        for parent in level_start..level_end {
            let kids = sampler.sample(&mut rng);
            for _ in 0..kids {
                if nodes.len() >= MAX_TREE_NODES {
                    return Err(Error::Domain {
                        what: "tree would exceed the materialization limit of 1e6 nodes; lower the depth cap",
                        value: MAX_TREE_NODES as f64,
                    });
                }
                nodes.push(Node {
                    parent: Some(parent as u32),
                    level,
                });
            }
            born += kids;
        }
        level_counts.push(born);
        if born == 0 {
            break;
        }
        level_start = level_end;
    }
    Ok(DecompositionTree {
        nodes,
        level_counts,
    })
}

/// Renders a tree in the requested format; output is deterministic, children
/// appear in generation order.
///
/// # Examples
///
/// ```
/// use decomp::{simulate_tree, export_tree, OffspringModel, TreeFormat};
/// let model = OffspringModel::new(2.0).unwrap();
/// let tree = simulate_tree(&model, 3, 3).unwrap();
/// let json = export_tree(&tree, TreeFormat::Json);
/// assert!(json.starts_with("{\"id\":0,\"level\":0,"));
/// ```
pub fn export_tree(tree: &DecompositionTree, format: TreeFormat) -> String {
    match format {
        TreeFormat::Json => export_json(tree),
        TreeFormat::Dot => export_dot(tree),
    }
}

fn export_json(tree: &DecompositionTree) -> String {
    let children = tree.children();
    let mut out = String::new();
    // Iterative walk: tree depth is user-controlled, recursion is not safe.
    let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
    out.push_str("{\"id\":0,\"level\":0,\"children\":[");
    while let Some((node, child_idx)) = stack.last_mut() {
        let kids = &children[*node as usize];
        if *child_idx < kids.len() {
            let child = kids[*child_idx];
            if *child_idx > 0 {
                out.push(',');
            }
            *child_idx += 1;
            out.push_str(&format!(
                "{{\"id\":{},\"level\":{},\"children\":[",
                child,
                tree.level(child)
            ));
            stack.push((child, 0));
        } else {
            out.push_str("]}");
            stack.pop();
        }
    }
    out
}

fn export_dot(tree: &DecompositionTree) -> String {
    let mut out = String::from("digraph decomposition {\n");
    if tree.node_count() == 1 {
        out.push_str("  0;\n");
    }
    for id in 1..tree.node_count() {
        let parent = tree.nodes[id].parent.expect("non-root nodes have parents");
        out.push_str(&format!("  {parent} -> {id};\n"));
    }
    out.push_str("}\n");
    out
}

/// Trace/tree agreement helper used by tests and the CLI: the per-level
/// counts of a tree must equal the trace from the same seed.
pub fn tree_matches_trace(tree: &DecompositionTree, trace: &GenerationTrace) -> bool {
    tree.level_counts() == trace.z()
}
