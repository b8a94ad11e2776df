//! Stage 3a: locate the sybil vector in the released graph.
//!
//! The search is a level-by-level breadth-first scan over ordered vertex
//! tuples. Level i holds the candidate prefixes of length i that minimise the
//! dissimilarity Δ against the first i sybils; a threshold θ bounds what is
//! admissible at all. Per level, every surviving prefix is extended by every
//! unused released vertex, each parent keeps its best extensions, and the
//! level then keeps the global minimum across parents (ties accumulate).
//! The bound is initialised to θ and only strict improvements replace it, so
//! a candidate at exactly θ survives only while nothing beats it.
//!
//! Δ for a prefix is the sum of two counts:
//! - edge mismatches: ordered pairs (j, l) whose edge-presence differs
//!   between the sybil prefix in the original graph and the candidate prefix
//!   in the released graph;
//! - marginal-degree mismatches: per position, the absolute difference in
//!   the number of neighbours *outside* the prefix set. On full-length
//!   vectors this is exactly the published measure; on shorter prefixes the
//!   marginal degree is taken relative to the prefix, the natural restriction
//!   the level-wise pruning needs.
//!
//! Δ is recomputed incrementally (per-position internal-neighbour counts),
//! which keeps an extension at O(prefix length) instead of O(length²).

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// An ordered candidate for the (prefix of the) sybil vector, with its Δ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateVector {
    pub vertices: Vec<usize>,
    pub delta: usize,
}

/// The equally-likely minimal-Δ full-length candidates. Empty means the
/// attack failed at the retrieval stage.
#[derive(Clone, Debug, Default)]
pub struct CandidateSet {
    pub candidates: Vec<CandidateVector>,
}

impl CandidateSet {
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    /// The shared Δ value, when any candidate survived.
    pub fn delta(&self) -> Option<usize> {
        self.candidates.first().map(|c| c.delta)
    }

    /// Debug dump, one candidate per line: `delta=<d> v=<id,id,...>`.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<()> {
        for c in &self.candidates {
            let ids: Vec<String> = c.vertices.iter().map(usize::to_string).collect();
            writeln!(w, "delta={} v={}", c.delta, ids.join(","))?;
        }
        Ok(())
    }
}

/// Optional guards for the search (the defaults match the unbounded
/// published procedure).
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchLimits {
    /// Keep at most this many candidates per level (first in deterministic
    /// order win); trimming flags the result as truncated.
    pub frontier_cap: Option<usize>,
    /// Abort when the wall clock passes this point; an aborted search
    /// reports an empty candidate set flagged as timed out.
    pub deadline: Option<Instant>,
}

#[derive(Clone, Debug, Default)]
pub struct RetrievalResult {
    pub candidates: CandidateSet,
    pub truncated: bool,
    pub timed_out: bool,
}

fn validate_prefix(g: &Graph, prefix: &[usize], what: &str) -> Result<()> {
    let mut seen = VertexSet::new();
    for &v in prefix {
        if !g.contains_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
        if !seen.insert(v) {
            return Err(Error::InvalidInput(format!("{what} repeats vertex {v}")));
        }
    }
    Ok(())
}

/// Edge-set mismatch between the positional images of two equal-length
/// prefixes: counts pairs (j, l) where exactly one of (s_j, s_l), (v_j, v_l)
/// is an edge.
pub fn delta_syb(
    original: &Graph,
    s_prefix: &[usize],
    released: &Graph,
    v_prefix: &[usize],
) -> Result<usize> {
    if s_prefix.len() != v_prefix.len() {
        return Err(Error::InvalidInput(format!(
            "prefix lengths differ: {} vs {}",
            s_prefix.len(),
            v_prefix.len()
        )));
    }
    validate_prefix(original, s_prefix, "sybil prefix")?;
    validate_prefix(released, v_prefix, "candidate prefix")?;
    let mut count = 0;
    for j in 0..s_prefix.len() {
        for l in j + 1..s_prefix.len() {
            let a = original.has_edge(s_prefix[j], s_prefix[l]);
            let b = released.has_edge(v_prefix[j], v_prefix[l]);
            count += usize::from(a != b);
        }
    }
    Ok(count)
}

/// Sum over positions of |marginal degree difference|, the marginal degree
/// being the neighbour count outside the respective prefix set.
pub fn delta_neigh(
    original: &Graph,
    s_prefix: &[usize],
    released: &Graph,
    v_prefix: &[usize],
) -> Result<usize> {
    if s_prefix.len() != v_prefix.len() {
        return Err(Error::InvalidInput(format!(
            "prefix lengths differ: {} vs {}",
            s_prefix.len(),
            v_prefix.len()
        )));
    }
    validate_prefix(original, s_prefix, "sybil prefix")?;
    validate_prefix(released, v_prefix, "candidate prefix")?;
    let s_set: VertexSet = s_prefix.iter().copied().collect();
    let v_set: VertexSet = v_prefix.iter().copied().collect();
    let mut total = 0usize;
    for (x, v) in s_prefix.iter().zip(v_prefix) {
        let mx = original
            .neighbours_of(*x)?
            .iter()
            .filter(|nb| !s_set.contains(nb))
            .count();
        let mv = released
            .neighbours_of(*v)?
            .iter()
            .filter(|nb| !v_set.contains(nb))
            .count();
        total += mx.abs_diff(mv);
    }
    Ok(total)
}

/// The dissimilarity Δ: edge mismatches plus marginal-degree mismatches.
pub fn delta(
    original: &Graph,
    s_prefix: &[usize],
    released: &Graph,
    v_prefix: &[usize],
) -> Result<usize> {
    Ok(delta_syb(original, s_prefix, released, v_prefix)?
        + delta_neigh(original, s_prefix, released, v_prefix)?)
}

/// Per-candidate incremental state. Vertices are stored as released-graph
/// positions; `ints[j]` counts the neighbours of vertex j inside the prefix,
/// so the marginal degree is deg - ints[j] without re-scanning adjacency.
#[derive(Clone, Debug)]
struct Partial {
    verts: Vec<u32>,
    ints: Vec<u16>,
    dsyb: u32,
}

/// Precomputed per-level facts about the sybil side.
struct SybilSide {
    /// edge[i][j]: is (x_{j+1}, x_{i+1}) an edge of the original graph.
    edge: Vec<Vec<bool>>,
    /// marginal[i][j]: marginal degree of x_{j+1} relative to the length-
    /// (i+1) prefix.
    marginal: Vec<Vec<u32>>,
}

fn sybil_side(original: &Graph, sybil_order: &[usize]) -> Result<SybilSide> {
    let k = sybil_order.len();
    let mut edge = vec![Vec::new(); k];
    for i in 0..k {
        edge[i] = (0..i)
            .map(|j| original.has_edge(sybil_order[j], sybil_order[i]))
            .collect();
    }
    let mut ints = vec![0u32; k];
    let mut marginal = vec![Vec::new(); k];
    for i in 0..k {
        for j in 0..i {
            if edge[i][j] {
                ints[j] += 1;
                ints[i] += 1;
            }
        }
        marginal[i] = (0..=i)
            .map(|j| original.degree(sybil_order[j]).map(|d| d as u32 - ints[j]))
            .collect::<Result<_>>()?;
    }
    Ok(SybilSide { edge, marginal })
}

/// Noise-tolerant sybil retrieval with the unbounded published behaviour.
pub fn retrieve_sybils(
    original: &Graph,
    sybil_order: &[usize],
    released: &Graph,
    theta: usize,
) -> Result<CandidateSet> {
    Ok(retrieve_sybils_limited(original, sybil_order, released, theta, SearchLimits::default())?
        .candidates)
}

/// Retrieval with optional frontier cap and deadline.
pub fn retrieve_sybils_limited(
    original: &Graph,
    sybil_order: &[usize],
    released: &Graph,
    theta: usize,
    limits: SearchLimits,
) -> Result<RetrievalResult> {
    if sybil_order.is_empty() {
        return Err(Error::InvalidInput("empty sybil order".into()));
    }
    validate_prefix(original, sybil_order, "sybil order")?;
    let side = sybil_side(original, sybil_order)?;
    let k = sybil_order.len();
    let n_rel = released.num_vertices();
    let deg_rel: Vec<u32> = (0..n_rel)
        .map(|i| released.neighbours_of(released.vertices()[i]).map(|a| a.len() as u32))
        .collect::<Result<_>>()?;

    let mut result = RetrievalResult::default();

    // Level 1: every released vertex, Δ = |deg(v) - deg(x_1)|.
    let mut frontier: Vec<Partial> = Vec::new();
    let mut level_d = theta;
    for v in 0..n_rel {
        let d = deg_rel[v].abs_diff(side.marginal[0][0]) as usize;
        if d < level_d {
            level_d = d;
            frontier.clear();
            frontier.push(single(v));
        } else if d == level_d {
            frontier.push(single(v));
        }
    }
    trim(&mut frontier, limits.frontier_cap, &mut result.truncated);

    for i in 1..k {
        if frontier.is_empty() {
            break;
        }
        if past_deadline(&limits) {
            result.timed_out = true;
            return Ok(result);
        }

        // Per parent: the best extensions by any unused vertex.
        let per_parent: Vec<(Vec<Partial>, usize)> = if frontier.len() >= 64 {
            frontier
                .par_iter()
                .map(|p| extend_parent(p, i, theta, released, &deg_rel, &side))
                .collect()
        } else {
            frontier
                .iter()
                .map(|p| extend_parent(p, i, theta, released, &deg_rel, &side))
                .collect()
        };

        // Merge: keep the global per-level minimum, ties append in parent
        // order.
        let mut next: Vec<Partial> = Vec::new();
        level_d = theta;
        for (exts, d) in per_parent {
            if exts.is_empty() {
                continue;
            }
            if d < level_d {
                level_d = d;
                next = exts;
            } else if d == level_d {
                next.extend(exts);
            }
        }
        trim(&mut next, limits.frontier_cap, &mut result.truncated);
        frontier = next;
    }

    result.candidates.candidates = frontier
        .into_iter()
        .map(|p| CandidateVector {
            vertices: p
                .verts
                .iter()
                .map(|&v| released.vertices()[v as usize])
                .collect(),
            delta: p.dsyb as usize + dneigh_of(&p, &deg_rel, &side),
        })
        .collect();
    debug_assert!(result
        .candidates
        .candidates
        .iter()
        .all(|c| c.delta == level_d));
    Ok(result)
}

fn single(v: usize) -> Partial {
    Partial {
        verts: vec![v as u32],
        ints: vec![0],
        dsyb: 0,
    }
}

fn past_deadline(limits: &SearchLimits) -> bool {
    limits.deadline.is_some_and(|d| Instant::now() > d)
}

fn trim(frontier: &mut Vec<Partial>, cap: Option<usize>, truncated: &mut bool) {
    if let Some(cap) = cap {
        if frontier.len() > cap {
            frontier.truncate(cap);
            *truncated = true;
        }
    }
}

/// Δ_neigh of a stored partial at its own level.
fn dneigh_of(p: &Partial, deg_rel: &[u32], side: &SybilSide) -> usize {
    let lvl = p.verts.len() - 1;
    p.verts
        .iter()
        .zip(&p.ints)
        .zip(&side.marginal[lvl])
        .map(|((&v, &int), &mx)| (deg_rel[v as usize] - int as u32).abs_diff(mx) as usize)
        .sum()
}

/// Extend one parent prefix to level i+1 (0-based i): scan every unused
/// released vertex, keep the extensions minimising Δ under the literal
/// bound-θ rule, and return them with their Δ.
fn extend_parent(
    parent: &Partial,
    i: usize,
    theta: usize,
    released: &Graph,
    deg_rel: &[u32],
    side: &SybilSide,
) -> (Vec<Partial>, usize) {
    let n_rel = deg_rel.len();
    let mut best: Vec<(u32, Vec<bool>)> = Vec::new();
    let mut best_d = theta;
    let prefix_len = parent.verts.len();
    let mut adj = vec![false; prefix_len];

    'next_vertex: for u in 0..n_rel as u32 {
        if parent.verts.contains(&u) {
            continue 'next_vertex;
        }
        // Incremental Δ of the extended prefix.
        let mut dsyb = parent.dsyb;
        let mut int_u = 0u32;
        for (j, &vj) in parent.verts.iter().enumerate() {
            let e = released.has_edge_idx(vj as usize, u as usize);
            adj[j] = e;
            dsyb += u32::from(e != side.edge[i][j]);
            int_u += u32::from(e);
        }
        let mut d = dsyb as usize;
        if d > best_d {
            continue 'next_vertex;
        }
        for (j, &vj) in parent.verts.iter().enumerate() {
            let internal = parent.ints[j] as u32 + u32::from(adj[j]);
            d += (deg_rel[vj as usize] - internal).abs_diff(side.marginal[i][j]) as usize;
            if d > best_d {
                continue 'next_vertex;
            }
        }
        d += (deg_rel[u as usize] - int_u).abs_diff(side.marginal[i][i]) as usize;

        if d < best_d {
            best_d = d;
            best.clear();
            best.push((u, adj.clone()));
        } else if d == best_d {
            best.push((u, adj.clone()));
        }
    }

    let exts = best
        .into_iter()
        .map(|(u, adj)| {
            let mut verts = Vec::with_capacity(prefix_len + 1);
            verts.extend_from_slice(&parent.verts);
            verts.push(u);
            let mut ints = Vec::with_capacity(prefix_len + 1);
            let mut int_u = 0u16;
            for (j, &e) in adj.iter().enumerate() {
                ints.push(parent.ints[j] + u16::from(e));
                int_u += u16::from(e);
            }
            ints.push(int_u);
            let dsyb = parent.dsyb
                + adj
                    .iter()
                    .enumerate()
                    .map(|(j, &e)| u32::from(e != side.edge[i][j]))
                    .sum::<u32>();
            Partial { verts, ints, dsyb }
        })
        .collect();
    (exts, best_d)
}
