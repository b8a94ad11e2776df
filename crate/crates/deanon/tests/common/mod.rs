//! Hand-checkable worked instance shared by the integration tests.
//!
//! Original side: five sybils on a path with three chords, four victims.
//! Released side: the same structure with two inter-sybil edges dropped and
//! one spurious victim edge added, so every dissimilarity and matching value
//! can be checked by hand.

use deanon::attack::AttackState;
use deanon::graph::{Graph, VertexSet};

/// Path-ordered sybil ids in the original graph.
pub const SYBILS: [usize; 5] = [0, 1, 2, 3, 4];
/// Victim ids y1..y4 in the original graph.
pub const VICTIMS: [usize; 4] = [5, 6, 7, 8];
/// The identity-order candidate vector v1..v5 in the released graph.
pub const CANDIDATE: [usize; 5] = [0, 1, 2, 3, 4];

/// Sybil-extended original: x1..x5 -> 0..4, y1..y4 -> 5..8.
pub fn original_graph() -> Graph {
    Graph::from_edges(
        9,
        &[
            // sybil path
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            // chords
            (0, 2),
            (0, 3),
            (1, 3),
            // fingerprints: F1={x1} F2={x1,x3} F3={x3,x5} F4={x3}
            (0, 5),
            (0, 6),
            (2, 6),
            (2, 7),
            (4, 7),
            (2, 8),
        ],
    )
    .unwrap()
}

fn released_edges() -> Vec<(usize, usize)> {
    vec![
        // inter-sybil: path edge v3-v4 and chord v1-v3 are missing
        (0, 1),
        (1, 2),
        (3, 4),
        (0, 3),
        (1, 3),
        // victim side: v1..v5 -> 0..4, z1..z5 -> 5..9
        (0, 5),
        (0, 6),
        (2, 6),
        (2, 7),
        (4, 7),
        (2, 8),
        (1, 5),
    ]
}

/// Released counterpart with z5 hanging off v2: the matcher resolves it to
/// a unique re-identification.
pub fn released_graph() -> Graph {
    let mut edges = released_edges();
    edges.push((1, 9));
    Graph::from_edges(10, &edges).unwrap()
}

/// Same instance except z5 hangs off v3, which makes z4 and z5
/// indistinguishable as images of y4.
pub fn released_graph_ambiguous() -> Graph {
    let mut edges = released_edges();
    edges.push((2, 9));
    Graph::from_edges(10, &edges).unwrap()
}

/// The attacker's stage-1 knowledge for the worked instance.
pub fn attack_state() -> AttackState {
    let fp = |xs: &[usize]| xs.iter().copied().collect::<VertexSet>();
    AttackState {
        sybil_order: SYBILS.to_vec(),
        victims: VICTIMS.to_vec(),
        fingerprints: vec![fp(&[0]), fp(&[0, 2]), fp(&[2, 4]), fp(&[2])],
        min_separation: 1,
    }
}
