//! Parse an edge list, inspect its strongly connected components and
//! normalize the largest one.
//!
//!     cargo run --example graph_tools

use netsis::graphio::{normalize_in_weights, parse_edge_list, strongly_connected_analysis};

const EDGES: &str = "\
# a 4-cycle with a chord, plus a dangling source node 4
0 1 1.0
1 2 2.0
2 3 1.0
3 0 0.5
0 2 1.5
4 0 1.0
";

fn main() {
    let g = parse_edge_list(EDGES).expect("valid edge list");
    println!("{} nodes, {} edges", g.n(), g.edge_count());

    let scc = strongly_connected_analysis(&g);
    println!("strongly connected: {}", scc.is_strongly_connected);
    for (i, c) in scc.components.iter().enumerate() {
        println!("  component {i}: {c:?}");
    }

    let core = normalize_in_weights(&scc.largest_component_subgraph).unwrap();
    println!(
        "largest component, in-weights normalized (labels {:?}):",
        core.labels()
    );
    print!("{}", core.to_edge_list());
}
