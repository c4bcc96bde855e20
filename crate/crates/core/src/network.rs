//! Communication graph, Metropolis–Hastings consensus weights, the
//! round-synchronous linear-average and max consensus engines, and the
//! collection step that localizes every known pairwise difference to every
//! agent.
//!
//! Rounds are synchronous: round `t + 1` states are pure functions of the
//! round-`t` snapshot, so runs are deterministic for a given seed.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::edm::Edmm;
use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Undirected, connected communication graph without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    n: usize,
    adj: Vec<Vec<bool>>,
    neighbors: Vec<Vec<usize>>,
}

impl NetworkGraph {
    /// Build from an undirected edge list over agents `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config("a network needs at least two agents".into()));
        }
        let mut adj = vec![vec![false; n]; n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Config(format!("edge ({i},{j}) outside 0..{n}")));
            }
            if i == j {
                return Err(Error::Config("self-loops are not allowed".into()));
            }
            adj[i][j] = true;
            adj[j][i] = true;
        }
        let neighbors: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| adj[i][j]).collect())
            .collect();
        let g = Self { n, adj, neighbors };
        if !g.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        Ok(g)
    }

    /// Complete graph on `n` agents.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Ring on `n` agents.
    pub fn ring(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    /// Star with agent 0 at the center.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::from_edges(n, &edges)
    }

    /// Random connected graph at a target edge density: a uniformly random
    /// spanning tree first, then uniformly sampled extra edges until the
    /// target count is met. Deterministic for a given generator state.
    pub fn random_connected<R: Rng>(n: usize, density: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::Config("density must be in [0, 1]".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for v in 1..n {
            let u = order[rng.random_range(0..v)];
            edges.push((order[v], u));
        }
        let total_pairs = n * (n - 1) / 2;
        let target = ((density * total_pairs as f64).round() as usize).max(n - 1);
        let in_tree: std::collections::HashSet<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        let mut rest: Vec<(usize, usize)> = Vec::with_capacity(total_pairs - (n - 1));
        for i in 0..n {
            for j in (i + 1)..n {
                if !in_tree.contains(&(i, j)) {
                    rest.push((i, j));
                }
            }
        }
        rest.shuffle(rng);
        edges.extend(rest.into_iter().take(target - (n - 1)));
        Self::from_edges(n, &edges)
    }

    pub fn n_agents(&self) -> usize {
        self.n
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.adj[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_density(&self) -> f64 {
        let total = self.n * (self.n - 1) / 2;
        self.edges().len() as f64 / total as f64
    }

    fn bfs_dist(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.neighbors[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn is_connected(&self) -> bool {
        self.bfs_dist(0).iter().all(|&d| d != usize::MAX)
    }

    pub fn diameter(&self) -> usize {
        (0..self.n)
            .map(|s| self.bfs_dist(s).into_iter().max().unwrap())
            .max()
            .unwrap()
    }

    /// Local adjacency pattern of one agent: true exactly on `(i, j)` and
    /// `(j, i)` for its incident edges.
    pub fn local_mask(&self, agent: usize) -> DMatrix<bool> {
        let mut mask = DMatrix::from_element(self.n, self.n, false);
        for &j in &self.neighbors[agent] {
            mask[(agent, j)] = true;
            mask[(j, agent)] = true;
        }
        mask
    }

    /// Global adjacency pattern.
    pub fn global_mask(&self) -> DMatrix<bool> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.adj[i][j])
    }
}

/// Doubly stochastic Metropolis–Hastings weight matrix of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusMatrix<S: Real> {
    c: DMatrix<S>,
}

impl<S: Real> ConsensusMatrix<S> {
    pub fn get(&self, i: usize, j: usize) -> S {
        self.c[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<S> {
        &self.c
    }

    pub fn n_agents(&self) -> usize {
        self.c.nrows()
    }
}

/// Metropolis–Hastings weights: `c_ij = 1 / (max(|N_i|, |N_j|) + 1)` on
/// edges, the diagonal absorbing the remainder. Rows and columns sum to 1.
pub fn mh_weights<S: Real>(g: &NetworkGraph) -> ConsensusMatrix<S> {
    let n = g.n_agents();
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut off_sum = S::zero();
        for &j in g.neighbors(i) {
            let w = S::one() / real::<S>((g.degree(i).max(g.degree(j)) + 1) as f64);
            c[(i, j)] = w;
            off_sum += w;
        }
        c[(i, i)] = S::one() - off_sum;
    }
    ConsensusMatrix { c }
}

/// Linear average consensus on per-agent matrix states:
/// `x_i <- x_i + sum_j c_ij (x_j - x_i)`, run for `iters` synchronous rounds.
pub fn lac_run<S: Real>(
    initial: &[DMatrix<S>],
    c: &ConsensusMatrix<S>,
    iters: usize,
) -> Vec<DMatrix<S>> {
    let n = initial.len();
    assert_eq!(n, c.n_agents(), "one state per agent");
    let mut states = initial.to_vec();
    let mut next = initial.to_vec();
    for _ in 0..iters {
        for (i, out) in next.iter_mut().enumerate() {
            out.fill(S::zero());
            for (j, s) in states.iter().enumerate() {
                let w = c.get(i, j);
                if w != S::zero() {
                    *out += s * w;
                }
            }
        }
        std::mem::swap(&mut states, &mut next);
    }
    states
}

/// Elementwise max consensus: each round every agent keeps the componentwise
/// maximum over itself and its neighbors. Exact after `diameter` rounds.
pub fn max_consensus<S: Real>(
    initial: &[DMatrix<S>],
    g: &NetworkGraph,
    iters: usize,
) -> Vec<DMatrix<S>> {
    let n = initial.len();
    assert_eq!(n, g.n_agents(), "one state per agent");
    let mut states = initial.to_vec();
    let mut next = initial.to_vec();
    for _ in 0..iters {
        for (i, out) in next.iter_mut().enumerate() {
            out.copy_from(&states[i]);
            for &j in g.neighbors(i) {
                out.zip_apply(&states[j], |a, b| *a = (*a).max(b));
            }
        }
        std::mem::swap(&mut states, &mut next);
    }
    states
}

/// Which agent a partial difference matrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Owner {
    Agent(usize),
    Global,
}

/// Pairwise difference matrix with a known-entry mask. Entries off the mask
/// are zero; known entries are symmetric; the diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialEdmm<S: Real> {
    values: DMatrix<S>,
    mask: DMatrix<bool>,
    owner: Owner,
}

impl<S: Real> PartialEdmm<S> {
    pub fn new(values: DMatrix<S>, mask: DMatrix<bool>, owner: Owner) -> Result<Self> {
        let n = values.nrows();
        if values.ncols() != n || mask.nrows() != n || mask.ncols() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: values.ncols().max(mask.nrows()),
            });
        }
        for i in 0..n {
            for j in 0..n {
                if !mask[(i, j)] && values[(i, j)] != S::zero() {
                    return Err(Error::Config("value off the known-entry mask".into()));
                }
            }
        }
        Ok(Self {
            values,
            mask,
            owner,
        })
    }

    /// Agent-local view: the rows/columns of `d` touching `agent`'s edges.
    pub fn local_view(d: &Edmm<S>, g: &NetworkGraph, agent: usize) -> Self {
        let mask = g.local_mask(agent);
        let n = g.n_agents();
        let values = DMatrix::from_fn(n, n, |i, j| {
            if mask[(i, j)] {
                d.get(i, j)
            } else {
                S::zero()
            }
        });
        Self {
            values,
            mask,
            owner: Owner::Agent(agent),
        }
    }

    /// Directly assembled union of all local views, `P_A(D)` — the oracle the
    /// consensus collection must reproduce.
    pub fn assemble_global(d: &Edmm<S>, g: &NetworkGraph) -> Self {
        let mask = g.global_mask();
        let n = g.n_agents();
        let values = DMatrix::from_fn(n, n, |i, j| {
            if mask[(i, j)] {
                d.get(i, j)
            } else {
                S::zero()
            }
        });
        Self {
            values,
            mask,
            owner: Owner::Global,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<S> {
        &self.values
    }

    pub fn mask(&self) -> &DMatrix<bool> {
        &self.mask
    }

    pub fn owner(&self) -> Owner {
        self.owner
    }

    pub fn known(&self, i: usize, j: usize) -> bool {
        self.mask[(i, j)]
    }

    /// Project a dense matrix onto the known entries.
    pub fn project(&self, x: &DMatrix<S>) -> DMatrix<S> {
        DMatrix::from_fn(self.values.nrows(), self.values.ncols(), |i, j| {
            if self.mask[(i, j)] {
                x[(i, j)]
            } else {
                S::zero()
            }
        })
    }
}

/// How the known differences are localized to every agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectionMode {
    /// Linear average consensus followed by the `N/2` rescale; entries are
    /// rounded to a fixed grid so every agent holds identical values.
    Lac,
    /// Elementwise max consensus; exact in `diameter` rounds.
    Max,
}

/// Grid used to round LAC-collected entries so all agents start completion
/// from identical inputs.
const COLLECTION_GRID: f64 = 1e-9;

/// Localize the union of all local difference views to every agent.
///
/// Each agent starts from its own local view; since every edge is known to
/// exactly two agents, the LAC limit is `(2/N) P_A(D)` and the rescale by
/// `N/2` recovers `P_A(D)` itself. The global mask is localized alongside by
/// max consensus, which is exact on 0/1 entries.
pub fn collect_edmm<S: Real>(
    local: &[PartialEdmm<S>],
    g: &NetworkGraph,
    mode: CollectionMode,
    iters: usize,
) -> Vec<PartialEdmm<S>> {
    let n = g.n_agents();
    assert_eq!(local.len(), n, "one local view per agent");
    let masks: Vec<DMatrix<S>> = local
        .iter()
        .map(|p| {
            DMatrix::from_fn(n, n, |i, j| {
                if p.known(i, j) {
                    S::one()
                } else {
                    S::zero()
                }
            })
        })
        .collect();
    let collected_masks = max_consensus(&masks, g, g.diameter());
    let global_masks: Vec<DMatrix<bool>> = collected_masks
        .iter()
        .map(|m| DMatrix::from_fn(n, n, |i, j| m[(i, j)] > real::<S>(0.5)))
        .collect();

    let values: Vec<DMatrix<S>> = local.iter().map(|p| p.values().clone()).collect();
    let collected = match mode {
        CollectionMode::Max => max_consensus(&values, g, g.diameter()),
        CollectionMode::Lac => {
            let c = mh_weights::<S>(g);
            let rescale = real::<S>(n as f64 / 2.0);
            let grid = real::<S>(COLLECTION_GRID);
            lac_run(&values, &c, iters)
                .into_iter()
                .zip(&global_masks)
                .map(|(mut m, mask)| {
                    for i in 0..n {
                        for j in 0..n {
                            if mask[(i, j)] {
                                m[(i, j)] = (m[(i, j)] * rescale / grid).round() * grid;
                            } else {
                                m[(i, j)] = S::zero();
                            }
                        }
                    }
                    m
                })
                .collect()
        }
    };

    collected
        .into_iter()
        .zip(global_masks)
        .enumerate()
        .map(|(agent, (values, mask))| PartialEdmm {
            values,
            mask,
            owner: Owner::Agent(agent),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn path3() -> NetworkGraph {
        NetworkGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn rejects_disconnected() {
        assert!(matches!(
            NetworkGraph::from_edges(4, &[(0, 1), (2, 3)]),
            Err(Error::DisconnectedGraph)
        ));
    }

    #[test]
    fn mh_weights_path_graph() {
        let c = mh_weights::<f64>(&path3());
        assert_abs_diff_eq!(c.get(0, 1), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.get(0, 0), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.get(1, 1), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(c.get(0, 2), 0.0);
    }

    #[test]
    fn mh_weights_complete_k3() {
        let c = mh_weights::<f64>(&NetworkGraph::complete(3).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(c.get(i, j), 1.0 / 3.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mh_weights_doubly_stochastic() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.random_range(2..25);
            let g = NetworkGraph::random_connected(n, 0.4, &mut rng).unwrap();
            let c = mh_weights::<f64>(&g);
            for i in 0..n {
                let row: f64 = (0..n).map(|j| c.get(i, j)).sum();
                let col: f64 = (0..n).map(|j| c.get(j, i)).sum();
                assert_abs_diff_eq!(row, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(col, 1.0, epsilon = 1e-12);
                for j in 0..n {
                    assert!(c.get(i, j) >= 0.0);
                    assert_eq!(c.get(i, j) > 0.0, i == j || g.is_edge(i, j));
                }
            }
        }
    }

    #[test]
    fn lac_fixed_point_and_average() {
        let g = path3();
        let c = mh_weights::<f64>(&g);
        let equal: Vec<DMatrix<f64>> = (0..3).map(|_| DMatrix::from_element(1, 1, 2.5)).collect();
        let out = lac_run(&equal, &c, 10);
        for s in &out {
            assert_abs_diff_eq!(s[(0, 0)], 2.5, epsilon = 1e-15);
        }

        let init: Vec<DMatrix<f64>> = [0.0, 3.0, 6.0]
            .iter()
            .map(|&v| DMatrix::from_element(1, 1, v))
            .collect();
        let out = lac_run(&init, &c, 200);
        for s in &out {
            assert_abs_diff_eq!(s[(0, 0)], 3.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn lac_preserves_sum_and_contracts() {
        let mut rng = StdRng::seed_from_u64(5);
        let g = NetworkGraph::random_connected(20, 0.3, &mut rng).unwrap();
        let c = mh_weights::<f64>(&g);
        let mut states: Vec<DMatrix<f64>> = (0..20)
            .map(|_| DMatrix::from_fn(2, 2, |_, _| rng.random::<f64>()))
            .collect();
        let total = |xs: &[DMatrix<f64>]| -> f64 { xs.iter().map(|m| m.sum()).sum() };
        let mean: DMatrix<f64> = states.iter().sum::<DMatrix<f64>>() / 20.0;
        let sum0 = total(&states);
        let mut prev_dev = f64::INFINITY;
        for _ in 0..50 {
            states = lac_run(&states, &c, 1);
            assert_abs_diff_eq!(total(&states), sum0, epsilon = 1e-10 * 20.0);
            let dev: f64 = states
                .iter()
                .map(|s| (s - &mean).norm_squared())
                .sum::<f64>()
                .sqrt();
            assert!(dev <= prev_dev + 1e-12);
            prev_dev = dev;
        }
    }

    #[test]
    fn max_consensus_examples() {
        let g = path3();
        let init: Vec<DMatrix<f64>> = [5.0, 1.0, 2.0]
            .iter()
            .map(|&v| DMatrix::from_element(1, 1, v))
            .collect();
        let same = max_consensus(&init, &g, 0);
        assert_eq!(same[1][(0, 0)], 1.0);
        let out = max_consensus(&init, &g, g.diameter());
        for s in &out {
            assert_eq!(s[(0, 0)], 5.0);
        }
    }

    #[test]
    fn max_consensus_matches_direct_max() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.random_range(3..15);
            let g = NetworkGraph::random_connected(n, 0.3, &mut rng).unwrap();
            let init: Vec<DMatrix<f64>> = (0..n)
                .map(|_| DMatrix::from_fn(3, 2, |_, _| rng.random::<f64>()))
                .collect();
            let direct = {
                let mut m = init[0].clone();
                for s in &init[1..] {
                    m.zip_apply(s, |a, b| *a = a.max(b));
                }
                m
            };
            for s in max_consensus(&init, &g, g.diameter()) {
                assert_eq!(s, direct);
            }
        }
    }

    fn random_edmm(n: usize, rng: &mut StdRng) -> Edmm<f64> {
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v: f64 = rng.random();
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        Edmm::from_matrix(d).unwrap()
    }

    #[test]
    fn local_views_sum_to_twice_global() {
        let mut rng = StdRng::seed_from_u64(11);
        let g = NetworkGraph::random_connected(12, 0.4, &mut rng).unwrap();
        let d = random_edmm(12, &mut rng);
        let global = PartialEdmm::assemble_global(&d, &g);
        let sum: DMatrix<f64> = (0..12)
            .map(|i| PartialEdmm::local_view(&d, &g, i).values().clone())
            .sum();
        assert_abs_diff_eq!(
            (sum - global.values() * 2.0).norm(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn collect_matches_direct_assembly() {
        let mut rng = StdRng::seed_from_u64(13);
        for &mode in &[CollectionMode::Max, CollectionMode::Lac] {
            let g = NetworkGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
            let d = random_edmm(3, &mut rng);
            let local: Vec<_> = (0..3).map(|i| PartialEdmm::local_view(&d, &g, i)).collect();
            let out = collect_edmm(&local, &g, mode, 300);
            let oracle = PartialEdmm::assemble_global(&d, &g);
            for p in &out {
                assert_eq!(p.mask(), oracle.mask());
                let err = (p.values() - oracle.values()).abs().max();
                assert!(err <= 1e-8, "collection error {err}");
            }
        }
    }

    #[test]
    fn collect_max_exact_and_identical() {
        let mut rng = StdRng::seed_from_u64(17);
        let g = NetworkGraph::random_connected(10, 0.4, &mut rng).unwrap();
        let d = random_edmm(10, &mut rng);
        let local: Vec<_> = (0..10).map(|i| PartialEdmm::local_view(&d, &g, i)).collect();
        let out = collect_edmm(&local, &g, CollectionMode::Max, 0);
        let oracle = PartialEdmm::assemble_global(&d, &g);
        for p in &out {
            assert_eq!(p.values(), oracle.values());
        }
    }

    #[test]
    fn collect_lac_identical_across_agents() {
        let mut rng = StdRng::seed_from_u64(19);
        let g = NetworkGraph::random_connected(15, 0.4, &mut rng).unwrap();
        let d = random_edmm(15, &mut rng);
        let local: Vec<_> = (0..15).map(|i| PartialEdmm::local_view(&d, &g, i)).collect();
        let out = collect_edmm(&local, &g, CollectionMode::Lac, 200);
        for p in &out[1..] {
            assert_eq!(p.values(), out[0].values());
            assert_eq!(p.mask(), out[0].mask());
        }
    }

    #[test]
    fn random_graph_density_and_determinism() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..10 {
            let g = NetworkGraph::random_connected(100, 0.4, &mut rng).unwrap();
            assert!((g.edge_density() - 0.4).abs() <= 0.05);
        }
        let a = NetworkGraph::random_connected(30, 0.4, &mut StdRng::seed_from_u64(1)).unwrap();
        let b = NetworkGraph::random_connected(30, 0.4, &mut StdRng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
    }
}
