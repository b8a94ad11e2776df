//! Stage 1 of the game: build the sybil subgraph, generate a fingerprint pool
//! with maximal minimum separation, and wire fingerprints to victims.
//!
//! Fingerprints are subsets of the sybil set, written as 1-based sybil
//! positions (position j means the j-th sybil in path order). Internally they
//! are bitmasks, which caps the supported sybil count — pool generation
//! enumerates all 2^|S|-1 non-empty subsets anyway, so the practical limit is
//! the documented |S| <= 15 guard.

use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{rng_from_seed, Graph, VertexSet};

/// Hard cap on the sybil count for pool generation: the fingerprint graphs
/// have 2^|S|-1 nodes, so anything beyond this is not worth computing.
pub const MAX_POOL_SYBILS: usize = 15;

/// Everything the attacker knows after stage 1: the ordered sybil vector, the
/// chosen victims, the planted fingerprints (as sybil-id sets, aligned with
/// `victims`), and their minimum pairwise separation.
#[derive(Clone, Debug)]
pub struct AttackState {
    pub sybil_order: Vec<usize>,
    pub victims: Vec<usize>,
    pub fingerprints: Vec<VertexSet>,
    pub min_separation: usize,
}

impl AttackState {
    pub fn num_sybils(&self) -> usize {
        self.sybil_order.len()
    }

    pub fn num_victims(&self) -> usize {
        self.victims.len()
    }

    /// Fingerprint of victim `i` as a bitmask over sybil positions
    /// (bit j set = sybil at path position j+1 is a neighbour).
    pub(crate) fn fingerprint_mask(&self, i: usize) -> u32 {
        let mut mask = 0u32;
        for (j, x) in self.sybil_order.iter().enumerate() {
            if self.fingerprints[i].contains(x) {
                mask |= 1 << j;
            }
        }
        mask
    }
}

/// The graph whose nodes are all non-empty subsets of the sybil set and whose
/// edges join subsets at symmetric-difference distance <= radius. Adjacency
/// is implicit (popcount of the XOR), never materialised.
#[derive(Clone, Copy, Debug)]
pub struct FingerprintGraph {
    num_sybils: usize,
    radius: usize,
}

impl FingerprintGraph {
    pub fn new(num_sybils: usize, radius: usize) -> Result<FingerprintGraph> {
        if num_sybils == 0 || num_sybils > MAX_POOL_SYBILS {
            return Err(Error::Infeasible(format!(
                "fingerprint graphs support 1..={MAX_POOL_SYBILS} sybils, got {num_sybils}"
            )));
        }
        Ok(FingerprintGraph { num_sybils, radius })
    }

    pub fn num_sybils(&self) -> usize {
        self.num_sybils
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn num_nodes(&self) -> usize {
        (1usize << self.num_sybils) - 1
    }

    /// All nodes, as masks, in ascending-member lexicographic order
    /// ({1} < {1,2} < {1,2,3} < {1,3} < {2} < ...), the order used for
    /// deterministic tie-breaking.
    pub(crate) fn lex_nodes(&self) -> Vec<u32> {
        let mut nodes: Vec<u32> = (1..=self.num_nodes() as u32).collect();
        nodes.sort_by(|&a, &b| cmp_masks_lex(a, b));
        nodes
    }

    pub fn are_adjacent(&self, x: u32, y: u32) -> bool {
        x != y && (x ^ y).count_ones() as usize <= self.radius
    }
}

/// Compare subset masks by their sorted member lists ([1,2,3] < [2]).
fn cmp_masks_lex(a: u32, b: u32) -> std::cmp::Ordering {
    let (mut a, mut b) = (a, b);
    while a != 0 && b != 0 {
        let (la, lb) = (a.trailing_zeros(), b.trailing_zeros());
        if la != lb {
            return la.cmp(&lb);
        }
        a &= a - 1;
        b &= b - 1;
    }
    (a != 0).cmp(&(b != 0))
}

pub(crate) fn mask_to_set(mask: u32) -> VertexSet {
    (0..32)
        .filter(|j| mask >> j & 1 == 1)
        .map(|j| j + 1)
        .collect()
}

fn set_to_mask(set: &VertexSet, num_sybils: usize) -> Result<u32> {
    let mut mask = 0u32;
    for &p in set {
        if p == 0 || p > num_sybils {
            return Err(Error::InvalidInput(format!(
                "fingerprint position {p} outside 1..={num_sybils}"
            )));
        }
        mask |= 1 << (p - 1);
    }
    Ok(mask)
}

/// Greedy maximal independent set: repeatedly keep a minimum-degree
/// non-isolated node and delete all its neighbours, until no edges remain;
/// the surviving nodes are returned. Ties on degree go to the
/// lexicographically smallest subset.
pub fn max_ind_set_greedy(fg: &FingerprintGraph) -> Vec<VertexSet> {
    max_ind_set_masks(fg).into_iter().map(mask_to_set).collect()
}

fn max_ind_set_masks(fg: &FingerprintGraph) -> Vec<u32> {
    let s = fg.num_sybils;
    let size = 1usize << s;
    let lex = fg.lex_nodes();

    // Non-zero XOR deltas within the radius; x's neighbours are {x ^ d}\{0}.
    let ball: Vec<u32> = (1..size as u32)
        .filter(|d| (d.count_ones() as usize) <= fg.radius)
        .collect();

    let mut alive = vec![false; size];
    let mut deg = vec![0usize; size];
    let mut edges = 0usize;
    for x in 1..size {
        alive[x] = true;
        let self_hit = (x.count_ones() as usize) <= fg.radius;
        deg[x] = ball.len() - usize::from(self_hit);
        edges += deg[x];
    }
    edges /= 2;

    while edges > 0 {
        let mut pick = 0u32;
        let mut pick_deg = usize::MAX;
        for &x in &lex {
            let xi = x as usize;
            if alive[xi] && deg[xi] > 0 && deg[xi] < pick_deg {
                pick = x;
                pick_deg = deg[xi];
            }
        }
        debug_assert!(pick != 0);
        for &d in &ball {
            let w = pick ^ d;
            let wi = w as usize;
            if w == 0 || !alive[wi] {
                continue;
            }
            // Delete neighbour w and every edge incident to it.
            alive[wi] = false;
            edges -= deg[wi];
            deg[wi] = 0;
            for &d2 in &ball {
                let u = (w ^ d2) as usize;
                if u != 0 && alive[u] && deg[u] > 0 {
                    deg[u] -= 1;
                }
            }
        }
    }

    lex.into_iter().filter(|&x| alive[x as usize]).collect()
}

fn pool_min_separation(masks: &[u32]) -> usize {
    let mut best = usize::MAX;
    for (i, &a) in masks.iter().enumerate() {
        for &b in &masks[i + 1..] {
            best = best.min((a ^ b).count_ones() as usize);
        }
    }
    // A single fingerprint has no pairs; by convention its separation is 1.
    if best == usize::MAX {
        1
    } else {
        best
    }
}

/// Build a fingerprint pool of size >= m with maximal minimum separation:
/// grow the fingerprint-graph radius while the greedy independent set keeps
/// at least m nodes, and return the last set that did, together with its true
/// pairwise minimum separation.
///
/// Radius 0 conceptually yields all non-empty subsets (distinct sets are
/// always at distance >= 1), which is what makes the m <= 2^|S|-1
/// precondition sufficient. The radius never needs to exceed |S| because no
/// pair of subsets is further apart than that.
pub fn generate_fingerprint_pool(
    num_sybils: usize,
    m: usize,
) -> Result<(Vec<VertexSet>, usize)> {
    if m == 0 {
        return Err(Error::InvalidInput("victim count must be at least 1".into()));
    }
    if num_sybils > MAX_POOL_SYBILS {
        return Err(Error::Infeasible(format!(
            "pool generation supports at most {MAX_POOL_SYBILS} sybils, got {num_sybils}"
        )));
    }
    let limit = (1usize << num_sybils) - 1;
    if m > limit {
        return Err(Error::Infeasible(format!(
            "cannot build {m} distinct fingerprints from {num_sybils} sybils (max {limit})"
        )));
    }

    let mut pool = FingerprintGraph::new(num_sybils, 0)?.lex_nodes();
    for radius in 1..=num_sybils {
        let next = max_ind_set_masks(&FingerprintGraph::new(num_sybils, radius)?);
        if next.len() < m {
            break;
        }
        pool = next;
    }
    let delta = pool_min_separation(&pool);
    Ok((pool.into_iter().map(mask_to_set).collect(), delta))
}

/// Serialise a pool: header "|S| delta", then one fingerprint per line as
/// comma-separated ascending 1-based sybil positions.
pub fn write_fingerprint_pool<W: Write>(
    mut w: W,
    num_sybils: usize,
    pool: &[VertexSet],
    delta: usize,
) -> Result<()> {
    writeln!(w, "{num_sybils} {delta}")?;
    for fp in pool {
        let line: Vec<String> = fp.iter().map(usize::to_string).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Parse the pool format written by [`write_fingerprint_pool`]; recomputes
/// the minimum separation and rejects files whose header disagrees.
pub fn read_fingerprint_pool<R: BufRead>(r: R) -> Result<(usize, Vec<VertexSet>, usize)> {
    let mut lines = r.lines().enumerate();
    let (num_sybils, delta) = match lines.next() {
        Some((_, line)) => {
            let line = line?;
            let mut it = line.split_whitespace();
            let mut next = || -> Result<usize> {
                it.next()
                    .ok_or_else(|| Error::Parse {
                        line: 1,
                        msg: "expected \"num_sybils delta\" header".into(),
                    })?
                    .parse()
                    .map_err(|_| Error::Parse {
                        line: 1,
                        msg: "expected \"num_sybils delta\" header".into(),
                    })
            };
            (next()?, next()?)
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty pool file".into(),
            })
        }
    };
    let mut masks = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut set = VertexSet::new();
        for tok in line.trim().split(',') {
            let p: usize = tok.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad position {tok:?}"),
            })?;
            set.insert(p);
        }
        let mask = set_to_mask(&set, num_sybils).map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        if mask == 0 {
            return Err(Error::Parse {
                line: lineno,
                msg: "empty fingerprint".into(),
            });
        }
        if masks.contains(&mask) {
            return Err(Error::Parse {
                line: lineno,
                msg: "duplicate fingerprint".into(),
            });
        }
        masks.push(mask);
    }
    if pool_min_separation(&masks) != delta {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "header separation {delta} does not match the fingerprints (actual {})",
                pool_min_separation(&masks)
            ),
        });
    }
    Ok((num_sybils, masks.into_iter().map(mask_to_set).collect(), delta))
}

/// Add `num_sybils` fresh vertices wired as a path in creation order, plus an
/// independent coin-flip edge for every non-consecutive sybil pair. No edges
/// to original vertices are created here. Returns the extended graph and the
/// sybil ids in path order.
pub fn build_sybil_subgraph(
    g: &Graph,
    num_sybils: usize,
    seed: u64,
) -> Result<(Graph, Vec<usize>)> {
    if num_sybils == 0 {
        return Err(Error::InvalidInput("sybil count must be at least 1".into()));
    }
    let (mut ext, sybils) = g.with_added_vertices(num_sybils);
    for w in sybils.windows(2) {
        ext.add_edge(w[0], w[1])?;
    }
    let mut rng = rng_from_seed(seed);
    for i in 0..num_sybils {
        for j in i + 2..num_sybils {
            if rng.gen_bool(0.5) {
                ext.add_edge(sybils[i], sybils[j])?;
            }
        }
    }
    Ok((ext, sybils))
}

/// Wire victims to sybils: sample `victims.len()` distinct fingerprints
/// uniformly from the pool, assign them to the victims, and add the
/// corresponding sybil-victim edges. The result is the full sybil-extended
/// graph handed to the defender.
pub fn plant_fingerprints(
    g_syb: &Graph,
    sybil_order: &[usize],
    victims: &[usize],
    pool: &[VertexSet],
    seed: u64,
) -> Result<(Graph, AttackState)> {
    let m = victims.len();
    if m > pool.len() {
        return Err(Error::Infeasible(format!(
            "{m} victims but only {} fingerprints in the pool",
            pool.len()
        )));
    }
    for &x in sybil_order {
        if !g_syb.contains_vertex(x) {
            return Err(Error::UnknownVertex(x));
        }
    }
    let sybil_set: VertexSet = sybil_order.iter().copied().collect();
    if sybil_set.len() != sybil_order.len() {
        return Err(Error::InvalidInput("repeated sybil in sybil order".into()));
    }
    let mut seen = VertexSet::new();
    for &y in victims {
        if !g_syb.contains_vertex(y) {
            return Err(Error::UnknownVertex(y));
        }
        if sybil_set.contains(&y) {
            return Err(Error::InvalidInput(format!("victim {y} is a sybil")));
        }
        if !seen.insert(y) {
            return Err(Error::InvalidInput(format!("victim {y} repeats")));
        }
    }

    let mut rng = rng_from_seed(seed);
    let picks = rand::seq::index::sample(&mut rng, pool.len(), m);
    let mut g_plus = g_syb.clone();
    let mut fingerprints = Vec::with_capacity(m);
    let mut masks = Vec::with_capacity(m);
    for (i, pick) in picks.iter().enumerate() {
        let mask = set_to_mask(&pool[pick], sybil_order.len())?;
        if mask == 0 {
            return Err(Error::InvalidInput("empty fingerprint in pool".into()));
        }
        if masks.contains(&mask) {
            return Err(Error::InvalidInput(
                "pool contains duplicate fingerprints".into(),
            ));
        }
        let fp: VertexSet = pool[pick]
            .iter()
            .map(|&p| sybil_order[p - 1])
            .collect();
        for &x in &fp {
            g_plus.add_edge(x, victims[i])?;
        }
        fingerprints.push(fp);
        masks.push(mask);
    }
    let state = AttackState {
        sybil_order: sybil_order.to_vec(),
        victims: victims.to_vec(),
        fingerprints,
        min_separation: pool_min_separation(&masks),
    };
    Ok((g_plus, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_graph, set_distance};

    fn fp(xs: &[usize]) -> VertexSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn lex_order_of_subsets() {
        let fg = FingerprintGraph::new(3, 1).unwrap();
        let order: Vec<VertexSet> = fg.lex_nodes().into_iter().map(mask_to_set).collect();
        assert_eq!(
            order,
            vec![
                fp(&[1]),
                fp(&[1, 2]),
                fp(&[1, 2, 3]),
                fp(&[1, 3]),
                fp(&[2]),
                fp(&[2, 3]),
                fp(&[3]),
            ]
        );
    }

    #[test]
    fn greedy_independent_set_radius_one() {
        let fg = FingerprintGraph::new(3, 1).unwrap();
        assert_eq!(
            max_ind_set_greedy(&fg),
            vec![fp(&[1]), fp(&[1, 2, 3]), fp(&[2]), fp(&[3])]
        );
    }

    #[test]
    fn greedy_independent_set_radius_two() {
        let fg = FingerprintGraph::new(3, 2).unwrap();
        assert_eq!(max_ind_set_greedy(&fg), vec![fp(&[1]), fp(&[2, 3])]);
    }

    #[test]
    fn greedy_on_edgeless_graph_keeps_everything() {
        let fg = FingerprintGraph::new(3, 0).unwrap();
        assert_eq!(max_ind_set_greedy(&fg).len(), 7);
    }

    #[test]
    fn greedy_on_complete_graph_keeps_one() {
        // Radius |S| joins every pair.
        let fg = FingerprintGraph::new(3, 3).unwrap();
        assert_eq!(max_ind_set_greedy(&fg), vec![fp(&[1])]);
    }

    #[test]
    fn pool_three_sybils_two_victims() {
        let (pool, delta) = generate_fingerprint_pool(3, 2).unwrap();
        assert_eq!(pool, vec![fp(&[1]), fp(&[2, 3])]);
        assert_eq!(delta, 3);
    }

    #[test]
    fn pool_three_sybils_four_victims() {
        let (pool, delta) = generate_fingerprint_pool(3, 4).unwrap();
        assert_eq!(
            pool,
            vec![fp(&[1]), fp(&[1, 2, 3]), fp(&[2]), fp(&[3])]
        );
        assert_eq!(delta, 2);
    }

    #[test]
    fn pool_degenerate_cases() {
        let (pool, delta) = generate_fingerprint_pool(1, 1).unwrap();
        assert_eq!(pool, vec![fp(&[1])]);
        assert_eq!(delta, 1);

        // Greedy can't keep 3 nodes at distance >= 2 with two sybils, so the
        // full subset family is the answer.
        let (pool, delta) = generate_fingerprint_pool(2, 3).unwrap();
        assert_eq!(pool, vec![fp(&[1]), fp(&[1, 2]), fp(&[2])]);
        assert_eq!(delta, 1);
    }

    #[test]
    fn pool_pairwise_separation_matches_reported_delta() {
        for s in 1..=6 {
            for m in 1..(1usize << s) {
                let (pool, delta) = generate_fingerprint_pool(s, m).unwrap();
                assert!(pool.len() >= m);
                let mut min = usize::MAX;
                for i in 0..pool.len() {
                    for j in i + 1..pool.len() {
                        min = min.min(set_distance(&pool[i], &pool[j]));
                    }
                }
                let min = if min == usize::MAX { 1 } else { min };
                assert_eq!(min, delta, "s={s} m={m}");
            }
        }
    }

    /// Max over all families of m distinct non-empty subsets of the min
    /// pairwise symmetric-difference distance.
    fn optimal_separation(s: usize, m: usize) -> usize {
        fn rec(subsets: &[u32], start: usize, chosen: &mut Vec<u32>, m: usize) -> usize {
            if chosen.len() == m {
                let mut min = usize::MAX;
                for i in 0..m {
                    for j in i + 1..m {
                        min = min.min((chosen[i] ^ chosen[j]).count_ones() as usize);
                    }
                }
                return if min == usize::MAX { 1 } else { min };
            }
            let mut best = 0;
            for k in start..subsets.len() {
                chosen.push(subsets[k]);
                best = best.max(rec(subsets, k + 1, chosen, m));
                chosen.pop();
            }
            best
        }
        let subsets: Vec<u32> = (1..1u32 << s).collect();
        rec(&subsets, 0, &mut Vec::new(), m)
    }

    #[test]
    fn greedy_pool_separation_is_optimal_for_small_sybil_counts() {
        for s in 1..=4 {
            for m in 1..=((1usize << s) - 1).min(5) {
                let (_, delta) = generate_fingerprint_pool(s, m).unwrap();
                let best = optimal_separation(s, m);
                assert_eq!(delta, best, "s={s} m={m}: greedy {delta}, optimum {best}");
            }
        }
    }

    #[test]
    fn pool_rejects_infeasible_requests() {
        assert!(matches!(
            generate_fingerprint_pool(3, 8),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            generate_fingerprint_pool(16, 2),
            Err(Error::Infeasible(_))
        ));
        assert!(generate_fingerprint_pool(3, 0).is_err());
    }

    #[test]
    fn pool_roundtrip() {
        let (pool, delta) = generate_fingerprint_pool(4, 3).unwrap();
        let mut buf = Vec::new();
        write_fingerprint_pool(&mut buf, 4, &pool, delta).unwrap();
        let (s, pool2, delta2) = read_fingerprint_pool(&buf[..]).unwrap();
        assert_eq!((s, &pool2, delta2), (4, &pool, delta));
    }

    #[test]
    fn pool_reader_rejects_bad_files() {
        for bad in [
            "",                        // empty
            "3\n1\n",                  // short header
            "3 1\n0\n",                // position 0
            "3 1\n4\n",                // position out of range
            "3 1\n1\n1\n",             // duplicate fingerprint
            "3 3\n1\n2\n",             // header separation wrong (actual 2)
        ] {
            assert!(read_fingerprint_pool(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn sybil_subgraph_path_always_present() {
        let g = random_graph(20, 0.2, 3).unwrap();
        for seed in 0..50 {
            let (ext, sybils) = build_sybil_subgraph(&g, 5, seed).unwrap();
            assert_eq!(sybils, vec![20, 21, 22, 23, 24]);
            for w in sybils.windows(2) {
                assert!(ext.has_edge(w[0], w[1]));
            }
            // No sybil-to-original edges yet.
            for &x in &sybils {
                assert!(ext
                    .neighbours_of(x)
                    .unwrap()
                    .iter()
                    .all(|nb| sybils.contains(nb)));
            }
        }
    }

    #[test]
    fn sybil_subgraph_edge_count_bounds() {
        let g = Graph::new(4);
        let mut seen_min = usize::MAX;
        let mut seen_max = 0;
        for seed in 0..1000 {
            let (ext, _) = build_sybil_subgraph(&g, 8, seed).unwrap();
            let inter = ext.num_edges();
            assert!((7..=28).contains(&inter), "seed {seed}: {inter}");
            seen_min = seen_min.min(inter);
            seen_max = seen_max.max(inter);
        }
        // The coin flips actually vary.
        assert!(seen_min < seen_max);
    }

    #[test]
    fn single_and_double_sybil_cases() {
        let g = Graph::new(3);
        let (ext, sybils) = build_sybil_subgraph(&g, 1, 7).unwrap();
        assert_eq!(ext.degree(sybils[0]).unwrap(), 0);

        for seed in 0..20 {
            let (ext, sybils) = build_sybil_subgraph(&g, 2, seed).unwrap();
            assert_eq!(ext.num_edges(), 1);
            assert!(ext.has_edge(sybils[0], sybils[1]));
        }
    }

    #[test]
    fn planting_wires_exact_fingerprints() {
        // Three sybils, two victims, pool fixed to {{2,3},{1}}.
        let g = Graph::new(6);
        let (ext, sybils) = build_sybil_subgraph(&g, 3, 1).unwrap();
        let pool = vec![fp(&[2, 3]), fp(&[1])];
        let (g_plus, state) = plant_fingerprints(&ext, &sybils, &[0, 1], &pool, 5).unwrap();
        assert_eq!(state.min_separation, 3);
        for (i, &y) in state.victims.iter().enumerate() {
            let nbrs: VertexSet = g_plus
                .neighbours_of(y)
                .unwrap()
                .iter()
                .copied()
                .filter(|nb| sybils.contains(nb))
                .collect();
            assert_eq!(nbrs, state.fingerprints[i]);
        }
    }

    #[test]
    fn planting_nothing_changes_nothing() {
        let g = Graph::new(4);
        let (ext, sybils) = build_sybil_subgraph(&g, 2, 1).unwrap();
        let pool = vec![fp(&[1])];
        let (g_plus, state) = plant_fingerprints(&ext, &sybils, &[], &pool, 5).unwrap();
        assert_eq!(g_plus.edges(), ext.edges());
        assert_eq!(state.num_victims(), 0);
    }

    #[test]
    fn planting_validates_inputs() {
        let g = Graph::new(4);
        let (ext, sybils) = build_sybil_subgraph(&g, 2, 1).unwrap();
        let pool = vec![fp(&[1])];
        assert!(matches!(
            plant_fingerprints(&ext, &sybils, &[0, 1], &pool, 5),
            Err(Error::Infeasible(_))
        ));
        let pool = vec![fp(&[1]), fp(&[2])];
        assert!(plant_fingerprints(&ext, &sybils, &[0, 0], &pool, 5).is_err());
        assert!(plant_fingerprints(&ext, &sybils, &[sybils[0]], &pool, 5).is_err());
        assert!(plant_fingerprints(&ext, &sybils, &[99], &pool, 5).is_err());
    }

    #[test]
    fn fingerprint_assignment_is_uniform() {
        // 3 victims over a 3-fingerprint pool: 6 possible bijections. A
        // chi-square over 10^4 seeded draws should sit well under the 0.001
        // critical value for 5 degrees of freedom (20.5).
        let g = Graph::new(8);
        let (ext, sybils) = build_sybil_subgraph(&g, 3, 2).unwrap();
        let pool = vec![fp(&[1]), fp(&[2]), fp(&[3])];
        let mut counts = std::collections::HashMap::new();
        let trials = 10_000usize;
        for seed in 0..trials as u64 {
            let (_, state) = plant_fingerprints(&ext, &sybils, &[0, 1, 2], &pool, seed).unwrap();
            let key: Vec<usize> = state
                .fingerprints
                .iter()
                .map(|f| *f.iter().next().unwrap())
                .collect();
            *counts.entry(key).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = trials as f64 / 6.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 20.5, "chi-square {chi2}");
    }

    #[test]
    fn fingerprint_masks_follow_path_positions() {
        let g = Graph::new(5);
        let (ext, sybils) = build_sybil_subgraph(&g, 3, 1).unwrap();
        let pool = vec![fp(&[1, 3])];
        let (_, state) = plant_fingerprints(&ext, &sybils, &[0], &pool, 5).unwrap();
        assert_eq!(state.fingerprint_mask(0), 0b101);
    }
}
