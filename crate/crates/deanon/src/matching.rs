//! Stage 3b: re-identify the victims among the neighbours of a retrieved
//! sybil vector.
//!
//! Every neighbour z of the candidate vector v carries a candidate
//! fingerprint: the positions of v it is adjacent to. The matcher compares
//! those against the planted fingerprints (mapped into the same position
//! space) under Hamming distance and runs a greedy level-wise recursion:
//!
//! - scan all (unmatched victim, unused candidate) pairs, keeping every pair
//!   that achieves the globally minimal distance (bound initialised to β,
//!   strict improvement resets, ties accumulate per victim);
//! - build all partial assignments from the tied pairs (cross product over
//!   victims, filtered to injective combinations);
//! - if the tied pairs already cover every victim in scope the partials are
//!   the answer; otherwise recurse on the remaining victims/candidates per
//!   partial and keep the completions of minimal recursion distance across
//!   all partials, combining every partial with every kept completion
//!   (again filtered to injective unions).
//!
//! The distance the recursion reports is the max pair distance of every
//! returned matching. Failure (no admissible pair anywhere, or every
//! combination collides) reports an empty matching set.
//!
//! Tie cross-products can explode combinatorially, so the number of
//! simultaneously tracked assignments is capped (default 10^5); hitting the
//! cap flags the result as truncated.

use std::collections::BTreeSet;
use std::io::Write;

use rand::Rng;

use crate::attack::AttackState;
use crate::error::{Error, Result};
use crate::graph::{neighbours, rng_from_seed, Graph, VertexSet};
use crate::retrieval::{CandidateSet, CandidateVector};

/// Default bound on simultaneously tracked partial assignments.
pub const DEFAULT_PARTIAL_CAP: usize = 100_000;

const INF: usize = usize::MAX;

/// The equally-likely victim assignments produced by the greedy matcher.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReIdentification {
    /// Each entry maps original victim id -> released vertex id and covers
    /// every victim injectively. Empty means the matching stage failed.
    pub matchings: Vec<std::collections::BTreeMap<usize, usize>>,
    /// The recursion's final distance bound; equals the max per-pair Hamming
    /// distance of every returned matching. None on failure.
    pub achieved_distance: Option<usize>,
    /// True when the partial-assignment cap trimmed the search.
    pub truncated: bool,
}

impl ReIdentification {
    pub fn is_failure(&self) -> bool {
        self.matchings.is_empty()
    }

    /// Debug dump: per matching, a `dist=<d>` line followed by one
    /// `y=<orig-id> -> z=<released-id>` line per victim.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<()> {
        if let Some(d) = self.achieved_distance {
            for m in &self.matchings {
                writeln!(w, "dist={d}")?;
                for (y, z) in m {
                    writeln!(w, "y={y} -> z={z}")?;
                }
            }
        }
        Ok(())
    }
}

/// The fingerprint of z with respect to the candidate vector v: the subset
/// of v adjacent to z, expressed as 1-based v-positions so it is directly
/// comparable with mapped original fingerprints.
pub fn candidate_fingerprint(released: &Graph, v: &[usize], z: usize) -> Result<VertexSet> {
    if !released.contains_vertex(z) {
        return Err(Error::UnknownVertex(z));
    }
    if v.contains(&z) {
        return Err(Error::InvalidInput(format!(
            "vertex {z} is part of the candidate vector"
        )));
    }
    let mut out = VertexSet::new();
    for (j, &vj) in v.iter().enumerate() {
        if !released.contains_vertex(vj) {
            return Err(Error::UnknownVertex(vj));
        }
        if released.has_edge(z, vj) {
            out.insert(j + 1);
        }
    }
    Ok(out)
}

fn candidate_mask(released: &Graph, v: &[usize], z: usize) -> u32 {
    let mut mask = 0u32;
    for (j, &vj) in v.iter().enumerate() {
        if released.has_edge(z, vj) {
            mask |= 1 << j;
        }
    }
    mask
}

type Pair = (u32, u32);
type Assignment = Vec<Pair>;

struct Search {
    phi: Vec<u32>,
    cand: Vec<u32>,
    beta: usize,
    cap: usize,
    truncated: bool,
}

impl Search {
    fn dist(&self, y: u32, z: u32) -> usize {
        (self.phi[y as usize] ^ self.cand[z as usize]).count_ones() as usize
    }

    /// One recursion level over the victim indices `ys` and candidate
    /// indices `zs`. Returns the set of assignments covering all of `ys`
    /// together with their shared max distance, or (∅, INF) on failure.
    fn greedy(&mut self, ys: &[u32], zs: &[u32]) -> (BTreeSet<Assignment>, usize) {
        // Globally minimal pairs under the bound: strict improvement resets
        // the table, equality appends; per victim the tied candidates stay
        // grouped.
        let mut d = self.beta;
        let mut table: Vec<(u32, Vec<u32>)> = Vec::new();
        for &y in ys {
            for &z in zs {
                let dp = self.dist(y, z);
                if dp < d {
                    d = dp;
                    table.clear();
                    table.push((y, vec![z]));
                } else if dp == d {
                    match table.last_mut() {
                        Some(last) if last.0 == y => last.1.push(z),
                        _ => table.push((y, vec![z])),
                    }
                }
            }
        }
        if table.is_empty() {
            return (BTreeSet::new(), INF);
        }

        // Cross product of the tied pairs, injective combinations only.
        let mut partials: Vec<Assignment> = vec![Vec::new()];
        for (y, zlist) in &table {
            let mut next: Vec<Assignment> = Vec::new();
            'grow: for p in &partials {
                for &z in zlist {
                    if p.iter().any(|&(_, pz)| pz == z) {
                        continue;
                    }
                    if next.len() >= self.cap {
                        self.truncated = true;
                        break 'grow;
                    }
                    let mut q = p.clone();
                    q.push((*y, z));
                    next.push(q);
                }
            }
            partials = next;
        }
        if partials.is_empty() {
            // Every combination of tied pairs collided on a candidate.
            return (BTreeSet::new(), INF);
        }

        if table.len() == ys.len() {
            // The tied pairs already assign every victim in scope.
            let mut out = BTreeSet::new();
            for mut p in partials {
                p.sort_unstable();
                if out.len() >= self.cap {
                    self.truncated = true;
                    break;
                }
                out.insert(p);
            }
            return (out, d);
        }

        // Recurse per partial on what remains; keep the completions of
        // minimal recursion distance across all partials.
        let matched: Vec<u32> = table.iter().map(|(y, _)| *y).collect();
        let rest_ys: Vec<u32> = ys.iter().copied().filter(|y| !matched.contains(y)).collect();
        let mut pool: BTreeSet<Assignment> = BTreeSet::new();
        let mut d_best = self.beta;
        for p in &partials {
            let rest_zs: Vec<u32> = zs
                .iter()
                .copied()
                .filter(|z| !p.iter().any(|&(_, pz)| pz == *z))
                .collect();
            let (completions, d_rec) = self.greedy(&rest_ys, &rest_zs);
            if d_rec == INF {
                continue;
            }
            if d_rec < d_best {
                d_best = d_rec;
                pool = completions;
            } else if d_rec == d_best {
                for c in completions {
                    if pool.len() >= self.cap {
                        self.truncated = true;
                        break;
                    }
                    pool.insert(c);
                }
            }
        }

        // Combine every partial with every kept completion; the victim sets
        // are disjoint by construction but candidates can collide across
        // subtrees, so filter again.
        let mut out: BTreeSet<Assignment> = BTreeSet::new();
        'combine: for p in &partials {
            for r in &pool {
                if r.iter().any(|(_, rz)| p.iter().any(|&(_, pz)| pz == *rz)) {
                    continue;
                }
                if out.len() >= self.cap {
                    self.truncated = true;
                    break 'combine;
                }
                let mut full: Assignment = p.iter().chain(r.iter()).copied().collect();
                full.sort_unstable();
                out.insert(full);
            }
        }
        if out.is_empty() {
            return (out, INF);
        }
        (out, d_best)
    }
}

/// Run the greedy matcher for one candidate vector with the default
/// partial-assignment cap.
pub fn match_fingerprints(
    attack: &AttackState,
    released: &Graph,
    v: &[usize],
    beta: usize,
) -> Result<ReIdentification> {
    match_fingerprints_capped(attack, released, v, beta, DEFAULT_PARTIAL_CAP)
}

/// Run the greedy matcher with an explicit cap on simultaneously tracked
/// partial assignments.
pub fn match_fingerprints_capped(
    attack: &AttackState,
    released: &Graph,
    v: &[usize],
    beta: usize,
    cap: usize,
) -> Result<ReIdentification> {
    if v.len() != attack.num_sybils() {
        return Err(Error::InvalidInput(format!(
            "candidate vector length {} does not match sybil count {}",
            v.len(),
            attack.num_sybils()
        )));
    }
    let mut v_set = VertexSet::new();
    for &u in v {
        if !released.contains_vertex(u) {
            return Err(Error::UnknownVertex(u));
        }
        if !v_set.insert(u) {
            return Err(Error::InvalidInput(format!(
                "candidate vector repeats vertex {u}"
            )));
        }
    }
    if cap == 0 {
        return Err(Error::InvalidInput("partial cap must be positive".into()));
    }

    // Candidate victims: the neighbourhood of the vector, minus the vector.
    let zs_ids: Vec<usize> = neighbours(released, &v_set)?.into_iter().collect();
    let phi: Vec<u32> = (0..attack.num_victims())
        .map(|i| attack.fingerprint_mask(i))
        .collect();
    let cand: Vec<u32> = zs_ids
        .iter()
        .map(|&z| candidate_mask(released, v, z))
        .collect();

    let mut search = Search {
        phi,
        cand,
        beta,
        cap,
        truncated: false,
    };
    let ys: Vec<u32> = (0..attack.num_victims() as u32).collect();
    let zs: Vec<u32> = (0..zs_ids.len() as u32).collect();
    let (set, d) = if ys.is_empty() {
        // No victims to match: the empty assignment is trivially complete.
        (BTreeSet::from([Vec::new()]), 0)
    } else {
        search.greedy(&ys, &zs)
    };

    if set.is_empty() {
        return Ok(ReIdentification {
            matchings: Vec::new(),
            achieved_distance: None,
            truncated: search.truncated,
        });
    }
    let matchings = set
        .into_iter()
        .map(|assignment| {
            assignment
                .into_iter()
                .map(|(y, z)| (attack.victims[y as usize], zs_ids[z as usize]))
                .collect()
        })
        .collect();
    Ok(ReIdentification {
        matchings,
        achieved_distance: Some(d),
        truncated: search.truncated,
    })
}

/// Outcome of the final attack step for one game.
#[derive(Clone, Debug)]
pub enum ReidentifyOutcome {
    /// No candidate vector or no matching survived.
    Failure,
    /// The vector the attacker committed to and the matcher's output on it.
    Identified {
        candidate: CandidateVector,
        result: ReIdentification,
    },
}

/// Commit to one retrieved candidate (uniformly at random when there are
/// several) and run the matcher on it.
pub fn reidentify(
    attack: &AttackState,
    released: &Graph,
    candidates: &CandidateSet,
    beta: usize,
    seed: u64,
) -> Result<ReidentifyOutcome> {
    if candidates.is_empty() {
        return Ok(ReidentifyOutcome::Failure);
    }
    let candidate = if candidates.len() == 1 {
        candidates.candidates[0].clone()
    } else {
        let mut rng = rng_from_seed(seed);
        candidates.candidates[rng.gen_range(0..candidates.len())].clone()
    };
    let result = match_fingerprints(attack, released, &candidate.vertices, beta)?;
    if result.is_failure() {
        return Ok(ReidentifyOutcome::Failure);
    }
    Ok(ReidentifyOutcome::Identified { candidate, result })
}
