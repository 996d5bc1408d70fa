use super::Subnetwork;
use crate::model::RoutingTree;

/// Outcome of removing the critical node from a subnetwork.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePartition {
    pub critical: usize,
    /// Stationary lifetime of the critical node, in epochs.
    pub lifetime: f64,
    /// Nodes whose route passes through the critical node.
    pub disconnected: Vec<usize>,
    /// Nodes that stay connected to the sink.
    pub surviving: Vec<usize>,
}

/// Split `nodes` into the descendants of `critical` and the rest (the
/// critical node itself is in neither set).
pub fn split_graph(tree: &RoutingTree, nodes: &[usize], critical: usize) -> (Vec<usize>, Vec<usize>) {
    nodes
        .iter()
        .copied()
        .filter(|&j| j != critical)
        .partition(|&j| tree.path(j).contains(&critical))
}

pub(crate) fn partition(net: &Subnetwork<'_>, critical: usize, lifetime: f64) -> NodePartition {
    let (disconnected, surviving) = split_graph(net.scenario().tree(), net.nodes(), critical);
    NodePartition { critical, lifetime, disconnected, surviving }
}
