//! Network model: routing tree, costs, importance and scenario builders.

mod costs;
mod file;
mod importance;
mod scenario;
mod tree;

pub use costs::CostModel;
pub use file::{ImportanceSpec, ScenarioFile};
pub use importance::{ImportanceModel, ImportanceSampler};
pub use scenario::{
    build_line_scenario, build_random_tree_scenario, single_node_scenario, two_node_example,
    EnergyParams, Scenario,
};
pub use tree::RoutingTree;
