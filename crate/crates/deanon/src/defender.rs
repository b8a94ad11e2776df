//! Stage 2 of the game: pseudonymise the sybil-extended graph, then apply a
//! perturbation. The pseudonym map is kept alongside the released graph, but
//! only the scoring side ever looks at it — retrieval and matching take the
//! released [`Graph`] alone.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{apply_isomorphism, pair_from_index, rng_from_seed, Graph, Isomorphism};
use crate::sub_seed;

/// Edge perturbation applied after pseudonymisation. `None` releases the
/// relabelled graph as-is. Published anonymisation schemes slot in here as
/// new variants without touching the attack side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerturbationSpec {
    None,
    /// Flip `rate` * n(n-1)/2 uniformly random vertex pairs (floor, sampled
    /// with replacement across the flip sequence): present edges are removed,
    /// absent ones added.
    RandomFlip { rate: f64 },
}

impl PerturbationSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PerturbationSpec::None => Ok(()),
            PerturbationSpec::RandomFlip { rate } => {
                if (0.0..=1.0).contains(rate) {
                    Ok(())
                } else {
                    Err(Error::InvalidInput(format!(
                        "flip rate {rate} outside [0, 1]"
                    )))
                }
            }
        }
    }

    /// Number of flips performed on a graph of order `n`.
    pub fn flip_count(&self, n: usize) -> usize {
        match self {
            PerturbationSpec::None => 0,
            PerturbationSpec::RandomFlip { rate } => {
                (rate * (n * (n - 1) / 2) as f64).floor() as usize
            }
        }
    }
}

impl fmt::Display for PerturbationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerturbationSpec::None => write!(f, "none"),
            PerturbationSpec::RandomFlip { rate } => write!(f, "flip:{rate}"),
        }
    }
}

impl FromStr for PerturbationSpec {
    type Err = Error;

    /// CLI syntax: `none` or `flip:<rate>`.
    fn from_str(s: &str) -> Result<PerturbationSpec> {
        if s == "none" {
            return Ok(PerturbationSpec::None);
        }
        if let Some(rate) = s.strip_prefix("flip:") {
            let rate: f64 = rate
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad flip rate in {s:?}")))?;
            let spec = PerturbationSpec::RandomFlip { rate };
            spec.validate()?;
            return Ok(spec);
        }
        Err(Error::InvalidInput(format!(
            "unknown perturbation {s:?} (expected \"none\" or \"flip:<rate>\")"
        )))
    }
}

/// What the defender publishes plus the secret bookkeeping used for scoring.
#[derive(Clone, Debug)]
pub struct DefenderOutput {
    /// The transformed pseudonymised graph the attacker gets to see.
    pub released: Graph,
    /// The pseudonym map from pre-release ids to released ids, recorded
    /// before perturbation. Evaluation-only: nothing on the attack side
    /// receives this.
    pub ground_truth: Isomorphism,
}

/// Relabel every vertex with a uniformly random bijection onto the same id
/// space; returns the relabelled graph and the map.
pub fn pseudonymise(g_plus: &Graph, seed: u64) -> (Graph, Isomorphism) {
    let mut rng = rng_from_seed(seed);
    let iso = Isomorphism::random_relabelling(g_plus.vertices(), &mut rng);
    let relabelled = apply_isomorphism(g_plus, &iso).expect("relabelling is a bijection");
    (relabelled, iso)
}

/// Perform exactly floor(rate * n(n-1)/2) edge flips, each on a uniformly
/// random unordered vertex pair; pairs can repeat across flips (a repeat
/// undoes the earlier flip). The vertex set is unchanged.
pub fn perturb_random_flip(g: &Graph, rate: f64, seed: u64) -> Result<Graph> {
    let spec = PerturbationSpec::RandomFlip { rate };
    spec.validate()?;
    let n = g.num_vertices();
    let mut out = g.clone();
    if n < 2 {
        return Ok(out);
    }
    let total = n * (n - 1) / 2;
    let mut rng = rng_from_seed(seed);
    for _ in 0..spec.flip_count(n) {
        let (i, j) = pair_from_index(n, rng.gen_range(0..total));
        let (u, v) = (g.vertices()[i], g.vertices()[j]);
        out.flip_edge(u, v)?;
    }
    Ok(out)
}

/// Full stage 2: pseudonymise, then perturb the relabelled graph.
pub fn run_defender(g_plus: &Graph, spec: PerturbationSpec, seed: u64) -> Result<DefenderOutput> {
    spec.validate()?;
    let (relabelled, ground_truth) = pseudonymise(g_plus, sub_seed(seed, 0));
    let released = match spec {
        PerturbationSpec::None => relabelled,
        PerturbationSpec::RandomFlip { rate } => {
            perturb_random_flip(&relabelled, rate, sub_seed(seed, 1))?
        }
    };
    Ok(DefenderOutput {
        released,
        ground_truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_graph;
    use std::collections::BTreeSet;

    #[test]
    fn flip_counts_match_the_rate_formula() {
        let flip = |rate| PerturbationSpec::RandomFlip { rate };
        assert_eq!(flip(0.01).flip_count(208), 215);
        assert_eq!(flip(0.05).flip_count(208), 1076);
        assert_eq!(flip(0.10).flip_count(208), 2152);
        assert_eq!(flip(0.0).flip_count(208), 0);
        assert_eq!(PerturbationSpec::None.flip_count(208), 0);
    }

    #[test]
    fn spec_parsing_and_display() {
        assert_eq!(
            "none".parse::<PerturbationSpec>().unwrap(),
            PerturbationSpec::None
        );
        assert_eq!(
            "flip:0.05".parse::<PerturbationSpec>().unwrap(),
            PerturbationSpec::RandomFlip { rate: 0.05 }
        );
        assert_eq!(
            PerturbationSpec::RandomFlip { rate: 0.05 }.to_string(),
            "flip:0.05"
        );
        assert!("flip:1.5".parse::<PerturbationSpec>().is_err());
        assert!("flip:x".parse::<PerturbationSpec>().is_err());
        assert!("garble".parse::<PerturbationSpec>().is_err());
    }

    #[test]
    fn pseudonymisation_preserves_structure() {
        let g = random_graph(40, 0.2, 11).unwrap();
        let (h, iso) = pseudonymise(&g, 17);
        assert_eq!(h.num_edges(), g.num_edges());
        assert_eq!(h.degree_sequence(), g.degree_sequence());
        assert!(iso.preserves_edges(&g, &h));

        // Undoing the relabelling gives back the exact original.
        let back = apply_isomorphism(
            &h,
            &Isomorphism::from_map(iso.domain().map(|v| (iso.apply(v).unwrap(), v)).collect())
                .unwrap(),
        )
        .unwrap();
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn triangle_is_rigid_under_relabelling() {
        let k3 = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let (a, _) = pseudonymise(&k3, 1);
        let (b, _) = pseudonymise(&k3, 2);
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn zero_rate_changes_nothing() {
        let g = random_graph(30, 0.3, 5).unwrap();
        let out = perturb_random_flip(&g, 0.0, 9).unwrap();
        assert_eq!(out.edges(), g.edges());
    }

    #[test]
    fn flipping_a_pair_twice_restores_it() {
        let mut g = random_graph(10, 0.4, 2).unwrap();
        let before = g.edges();
        for (u, v) in [(0, 1), (3, 7), (8, 9)] {
            g.flip_edge(u, v).unwrap();
            g.flip_edge(u, v).unwrap();
        }
        assert_eq!(g.edges(), before);
    }

    #[test]
    fn perturbation_changes_at_most_flip_count_pairs() {
        let g = random_graph(208, 0.1, 3).unwrap();
        let out = perturb_random_flip(&g, 0.01, 4).unwrap();
        let a: BTreeSet<_> = g.edges().into_iter().collect();
        let b: BTreeSet<_> = out.edges().into_iter().collect();
        let diff = a.symmetric_difference(&b).count();
        assert!(diff <= 215, "{diff} pair slots changed");
        assert!(diff > 0);
        assert_eq!(out.num_vertices(), g.num_vertices());
    }

    #[test]
    fn defender_pipeline_is_reproducible() {
        let g = random_graph(50, 0.2, 21).unwrap();
        let spec = PerturbationSpec::RandomFlip { rate: 0.02 };
        let a = run_defender(&g, spec, 77).unwrap();
        let b = run_defender(&g, spec, 77).unwrap();
        let c = run_defender(&g, spec, 78).unwrap();
        assert_eq!(a.released.edges(), b.released.edges());
        assert_ne!(a.released.edges(), c.released.edges());
    }

    #[test]
    fn no_perturbation_releases_an_isomorphic_graph() {
        let g = random_graph(30, 0.25, 8).unwrap();
        let out = run_defender(&g, PerturbationSpec::None, 5).unwrap();
        assert!(out.ground_truth.preserves_edges(&g, &out.released));
    }
}
