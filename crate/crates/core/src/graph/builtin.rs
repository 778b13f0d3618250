use super::Topology;

const BUNDLED14: &str = include_str!("../../data/bundled14.topo");

/// The default 14-switch evaluation topology (max degree 7).
pub fn bundled14() -> Topology {
    Topology::parse(BUNDLED14).expect("bundled topology is well-formed")
}

/// Seven-switch walkthrough graph: source 1 has a single link, switch 3 has
/// four, and the tree `1-2-4`, `2-3-5-7`, `3-6` spans destinations {4, 6, 7}.
pub fn fork_example() -> Topology {
    Topology::new(
        7,
        &[
            (1, 2, 100.0, 1.0),
            (2, 3, 100.0, 1.0),
            (2, 4, 100.0, 1.0),
            (3, 4, 100.0, 1.0),
            (3, 5, 100.0, 1.0),
            (3, 6, 100.0, 1.0),
            (5, 7, 100.0, 1.0),
            (6, 7, 100.0, 1.0),
        ],
    )
    .expect("example topology is well-formed")
}
