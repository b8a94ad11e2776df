//! Undirected simple graphs over stable integer vertex ids, plus the set and
//! isomorphism primitives everything else is built on.
//!
//! Adjacency is kept twice: sorted neighbour lists for iteration and a packed
//! bitmap for O(1) edge queries, because the sybil retrieval search does
//! massive edge-membership probing. Graphs are cheap to clone and immutable
//! in practice once a pipeline stage has produced them.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// A set of vertex ids. Fingerprints, victim sets and neighbourhoods are all
/// plain vertex sets.
pub type VertexSet = BTreeSet<usize>;

const ABSENT: usize = usize::MAX;

#[derive(Clone, Debug, Default)]
pub struct Graph {
    /// Sorted distinct vertex ids.
    ids: Vec<usize>,
    /// id -> position in `ids` (ABSENT for ids not in the graph).
    pos: Vec<usize>,
    /// Sorted neighbour id lists, indexed by vertex position.
    adj: Vec<Vec<usize>>,
    /// Adjacency bitmap, `words` u64s per row, indexed by vertex position.
    bits: Vec<u64>,
    words: usize,
    num_edges: usize,
}

impl Graph {
    /// Graph with vertices 0..n and no edges.
    pub fn new(n: usize) -> Graph {
        Graph::from_vertices(0..n).expect("range ids are distinct")
    }

    /// Graph over an arbitrary id set (used for subgraphs). Ids are sorted;
    /// duplicates are rejected.
    pub fn from_vertices<I: IntoIterator<Item = usize>>(ids: I) -> Result<Graph> {
        let mut ids: Vec<usize> = ids.into_iter().collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate vertex id".into()));
        }
        let n = ids.len();
        let max_id = ids.last().copied().map_or(0, |m| m + 1);
        let mut pos = vec![ABSENT; max_id];
        for (i, &v) in ids.iter().enumerate() {
            pos[v] = i;
        }
        let words = n.div_ceil(64);
        Ok(Graph {
            ids,
            pos,
            adj: vec![Vec::new(); n],
            bits: vec![0; n * words],
            words,
            num_edges: 0,
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Sorted vertex ids.
    pub fn vertices(&self) -> &[usize] {
        &self.ids
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.pos.get(v).is_some_and(|&p| p != ABSENT)
    }

    pub(crate) fn index_of(&self, v: usize) -> Option<usize> {
        match self.pos.get(v) {
            Some(&p) if p != ABSENT => Some(p),
            _ => None,
        }
    }

    fn require(&self, v: usize) -> Result<usize> {
        self.index_of(v).ok_or(Error::UnknownVertex(v))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(iu), Some(iv)) => self.has_edge_idx(iu, iv),
            _ => false,
        }
    }

    #[inline]
    pub(crate) fn has_edge_idx(&self, iu: usize, iv: usize) -> bool {
        self.bits[iu * self.words + (iv >> 6)] >> (iv & 63) & 1 == 1
    }

    fn set_bit(&mut self, iu: usize, iv: usize, on: bool) {
        let w = &mut self.bits[iu * self.words + (iv >> 6)];
        if on {
            *w |= 1 << (iv & 63);
        } else {
            *w &= !(1 << (iv & 63));
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let (iu, iv) = (self.require(u)?, self.require(v)?);
        if self.has_edge_idx(iu, iv) {
            return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.set_bit(iu, iv, true);
        self.set_bit(iv, iu, true);
        let p = self.adj[iu].binary_search(&v).unwrap_err();
        self.adj[iu].insert(p, v);
        let p = self.adj[iv].binary_search(&u).unwrap_err();
        self.adj[iv].insert(p, u);
        self.num_edges += 1;
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let (iu, iv) = (self.require(u)?, self.require(v)?);
        if u == v || !self.has_edge_idx(iu, iv) {
            return Err(Error::MissingEdge(u.min(v), u.max(v)));
        }
        self.set_bit(iu, iv, false);
        self.set_bit(iv, iu, false);
        let p = self.adj[iu].binary_search(&v).unwrap();
        self.adj[iu].remove(p);
        let p = self.adj[iv].binary_search(&u).unwrap();
        self.adj[iv].remove(p);
        self.num_edges -= 1;
        Ok(())
    }

    /// Toggle an edge; returns true when the edge is present afterwards.
    pub fn flip_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        if self.has_edge(u, v) {
            self.remove_edge(u, v)?;
            Ok(false)
        } else {
            self.add_edge(u, v)?;
            Ok(true)
        }
    }

    /// Sorted neighbour ids of `v`.
    pub fn neighbours_of(&self, v: usize) -> Result<&[usize]> {
        Ok(&self.adj[self.require(v)?])
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        Ok(self.adj[self.require(v)?].len())
    }

    /// All edges as (min, max) pairs, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges);
        for (i, &u) in self.ids.iter().enumerate() {
            for &w in &self.adj[i] {
                if w > u {
                    out.push((u, w));
                }
            }
        }
        out
    }

    /// Copy of the graph with `k` fresh vertices appended (ids continue after
    /// the current maximum). Returns the new graph and the fresh ids.
    pub fn with_added_vertices(&self, k: usize) -> (Graph, Vec<usize>) {
        let next = self.ids.last().map_or(0, |m| m + 1);
        let fresh: Vec<usize> = (next..next + k).collect();
        let mut g = Graph::from_vertices(self.ids.iter().copied().chain(fresh.iter().copied()))
            .expect("fresh ids cannot collide");
        for (u, v) in self.edges() {
            g.add_edge(u, v).expect("edges are valid in the source graph");
        }
        (g, fresh)
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }

    /// Write in edge-list form: header "n m", then one "u v" line per edge
    /// with ascending endpoints. Vertices are numbered 0..n-1 in id order
    /// (identical to the stored ids for graphs created dense).
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.num_vertices(), self.num_edges)?;
        for (i, _) in self.ids.iter().enumerate() {
            for &nb in &self.adj[i] {
                let j = self.index_of(nb).unwrap();
                if j > i {
                    writeln!(w, "{} {}", i, j)?;
                }
            }
        }
        Ok(())
    }

    /// Parse the edge-list format produced by [`Graph::write_edge_list`].
    /// Rejects self-loops, duplicate edges and out-of-range endpoints.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph> {
        let mut lines = r.lines().enumerate();
        let (n, m) = match lines.next() {
            Some((_, line)) => {
                let line = line?;
                let mut it = line.split_whitespace();
                let parse = |tok: Option<&str>, line: &str| -> Result<usize> {
                    tok.ok_or_else(|| Error::Parse {
                        line: 1,
                        msg: format!("expected \"n m\", got {line:?}"),
                    })?
                    .parse()
                    .map_err(|_| Error::Parse {
                        line: 1,
                        msg: format!("expected \"n m\", got {line:?}"),
                    })
                };
                let n = parse(it.next(), &line)?;
                let m = parse(it.next(), &line)?;
                if it.next().is_some() {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("expected \"n m\", got {line:?}"),
                    });
                }
                (n, m)
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty input".into(),
                })
            }
        };
        let mut g = Graph::new(n);
        let mut seen = 0usize;
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let mut it = line.split_whitespace();
            let mut next = || -> Result<usize> {
                it.next()
                    .ok_or_else(|| Error::Parse {
                        line: lineno,
                        msg: "expected \"u v\"".into(),
                    })?
                    .parse()
                    .map_err(|_| Error::Parse {
                        line: lineno,
                        msg: "expected \"u v\"".into(),
                    })
            };
            let (u, v) = (next()?, next()?);
            if it.next().is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "trailing tokens after \"u v\"".into(),
                });
            }
            g.add_edge(u, v).map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            seen += 1;
        }
        if seen != m {
            return Err(Error::Parse {
                line: seen + 1,
                msg: format!("header announced {m} edges, found {seen}"),
            });
        }
        Ok(g)
    }
}

/// A bijective vertex relabelling. Both directions are kept so scoring can
/// invert the defender's pseudonym map.
#[derive(Clone, Debug)]
pub struct Isomorphism {
    fwd: BTreeMap<usize, usize>,
    inv: BTreeMap<usize, usize>,
}

impl Isomorphism {
    pub fn from_map(fwd: BTreeMap<usize, usize>) -> Result<Isomorphism> {
        let mut inv = BTreeMap::new();
        for (&u, &v) in &fwd {
            if inv.insert(v, u).is_some() {
                return Err(Error::InvalidInput(format!(
                    "map is not injective: image {v} repeats"
                )));
            }
        }
        Ok(Isomorphism { fwd, inv })
    }

    pub fn identity<I: IntoIterator<Item = usize>>(ids: I) -> Isomorphism {
        let fwd: BTreeMap<usize, usize> = ids.into_iter().map(|v| (v, v)).collect();
        let inv = fwd.clone();
        Isomorphism { fwd, inv }
    }

    /// Uniformly random permutation of `ids` onto itself.
    pub fn random_relabelling<R: Rng>(ids: &[usize], rng: &mut R) -> Isomorphism {
        let mut images = ids.to_vec();
        images.shuffle(rng);
        let fwd: BTreeMap<usize, usize> =
            ids.iter().copied().zip(images.iter().copied()).collect();
        Isomorphism::from_map(fwd).expect("a permutation is bijective")
    }

    pub fn apply(&self, v: usize) -> Result<usize> {
        self.fwd.get(&v).copied().ok_or(Error::UnknownVertex(v))
    }

    pub fn invert(&self, v: usize) -> Result<usize> {
        self.inv.get(&v).copied().ok_or(Error::UnknownVertex(v))
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.fwd.keys().copied()
    }

    /// True when the map is a graph isomorphism g -> h: same vertex sets on
    /// both sides and edges map exactly onto edges.
    pub fn preserves_edges(&self, g: &Graph, h: &Graph) -> bool {
        if g.num_vertices() != self.fwd.len()
            || h.num_vertices() != self.fwd.len()
            || g.num_edges() != h.num_edges()
            || !g.vertices().iter().all(|&v| self.fwd.contains_key(&v))
            || !h.vertices().iter().all(|&v| self.inv.contains_key(&v))
        {
            return false;
        }
        g.edges()
            .into_iter()
            .all(|(u, v)| h.has_edge(self.fwd[&u], self.fwd[&v]))
    }
}

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// The neighbourhood N(w): vertices outside `w` adjacent to at least one
/// member of `w`.
pub fn neighbours(g: &Graph, w: &VertexSet) -> Result<VertexSet> {
    let mut out = VertexSet::new();
    for &v in w {
        for &nb in g.neighbours_of(v)? {
            if !w.contains(&nb) {
                out.insert(nb);
            }
        }
    }
    Ok(out)
}

/// The weakly-induced subgraph of `s`: vertex set s ∪ N(s), edge set every
/// edge with at least one endpoint in `s`. Edges between two neighbours that
/// are both outside `s` are excluded.
pub fn weakly_induced_subgraph(g: &Graph, s: &VertexSet) -> Result<Graph> {
    let boundary = neighbours(g, s)?;
    let mut sub = Graph::from_vertices(s.iter().chain(boundary.iter()).copied())?;
    for &u in s {
        for &v in g.neighbours_of(u)? {
            if !s.contains(&v) || u < v {
                sub.add_edge(u, v)?;
            }
        }
    }
    Ok(sub)
}

/// Cardinality of the symmetric difference between two vertex sets.
pub fn set_distance(x: &VertexSet, y: &VertexSet) -> usize {
    x.symmetric_difference(y).count()
}

/// Uniform random graph on vertices 0..n with exactly
/// round(density * n(n-1)/2) edges, sampled without replacement.
pub fn random_graph(n: usize, density: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidInput("graph order must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidInput(format!(
            "density {density} outside [0, 1]"
        )));
    }
    let total = n * (n - 1) / 2;
    let target = (density * total as f64).round() as usize;
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::new(n);
    let mut picks = rand::seq::index::sample(&mut rng, total, target).into_vec();
    picks.sort_unstable();
    for t in picks {
        let (u, v) = pair_from_index(n, t);
        g.add_edge(u, v).expect("sampled pairs are distinct");
    }
    Ok(g)
}

/// Decode a flat index in 0..n(n-1)/2 into the unordered pair (i, j), i < j,
/// enumerated row by row: (0,1), (0,2), ..., (0,n-1), (1,2), ...
pub(crate) fn pair_from_index(n: usize, t: usize) -> (usize, usize) {
    let row_start = |i: usize| i * n - i * (i + 1) / 2;
    let tf = t as f64;
    let nf = n as f64;
    let disc = ((2.0 * nf - 1.0) * (2.0 * nf - 1.0) - 8.0 * tf).max(0.0);
    let mut i = ((2.0 * nf - 1.0 - disc.sqrt()) / 2.0) as usize;
    i = i.min(n - 2);
    while row_start(i) > t {
        i -= 1;
    }
    while row_start(i + 1) <= t {
        i += 1;
    }
    (i, i + 1 + (t - row_start(i)))
}

/// Relabel `g` through `iso`; the image graph has edge (iso(u), iso(v)) for
/// every edge (u, v) of `g`.
pub fn apply_isomorphism(g: &Graph, iso: &Isomorphism) -> Result<Graph> {
    if iso.len() != g.num_vertices() || !g.vertices().iter().all(|v| iso.fwd.contains_key(v)) {
        return Err(Error::InvalidInput(
            "isomorphism domain does not match the graph's vertex set".into(),
        ));
    }
    let mut h = Graph::from_vertices(iso.fwd.values().copied())?;
    for (u, v) in g.edges() {
        h.add_edge(iso.fwd[&u], iso.fwd[&v])?;
    }
    Ok(h)
}
