use crate::error::{Error, Result};

/// Fixed routing tree towards a single sink.
///
/// Nodes are indexed `0..n`. `parent[i] == None` means node `i` forwards
/// straight to the sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingTree {
    parent: Vec<Option<usize>>,
    // paths[j] = nodes traversed by a message from j, source first.
    paths: Vec<Vec<usize>>,
}

impl RoutingTree {
    pub fn new(parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidScenario("routing tree has no nodes".into()));
        }
        let mut paths = Vec::with_capacity(n);
        for j in 0..n {
            let mut path = vec![j];
            let mut cur = j;
            while let Some(next) = parent[cur] {
                if next >= n {
                    return Err(Error::InvalidScenario(format!(
                        "node {} has out-of-range parent {}",
                        cur + 1,
                        next + 1
                    )));
                }
                if path.len() > n {
                    return Err(Error::InvalidScenario(format!(
                        "routing cycle through node {}",
                        j + 1
                    )));
                }
                path.push(next);
                cur = next;
            }
            paths.push(path);
        }
        Ok(Self { parent, paths })
    }

    /// Chain `0 -> 1 -> ... -> n-1 -> sink`.
    pub fn line(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| (i + 1 < n).then_some(i + 1)).collect())
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    /// Nodes a message from `source` traverses, starting at the source.
    pub fn path(&self, source: usize) -> &[usize] {
        &self.paths[source]
    }

    /// Routing matrix entry `t[node][source]`.
    pub fn routes_through(&self, node: usize, source: usize) -> bool {
        self.paths[source].contains(&node)
    }

    pub fn routing_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.node_count();
        let mut t = vec![vec![0u8; n]; n];
        for (j, path) in self.paths.iter().enumerate() {
            for &i in path {
                t[i][j] = 1;
            }
        }
        t
    }

    pub fn is_sink_neighbor(&self, node: usize) -> bool {
        self.parent[node].is_none()
    }

    pub fn sink_neighbors(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&i| self.parent[i].is_none())
    }

    /// Nodes whose route to the sink passes through `node` (excluding it).
    pub fn descendants(&self, node: usize) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&j| j != node && self.paths[j].contains(&node))
            .collect()
    }
}
