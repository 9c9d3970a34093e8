//! Graph generation and the expander quantities: edge expansion (exact and
//! spectral lower bound), average distances, magnified edge averages and
//! Menger-style edge-disjoint path packings.

use crate::metric::{self, SubsetHandle};
use crate::scalar::Scalar;
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Undirected graph with positive edge weights, edges stored with u < v.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<R: Scalar> {
    n: usize,
    edges: Vec<(usize, usize, R)>,
}

impl<R: Scalar> WeightedGraph<R> {
    pub fn new(n: usize, edges: Vec<(usize, usize, R)>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        let mut seen = std::collections::HashSet::new();
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::Argument(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::Argument(format!("edge ({u},{v}) out of range")));
            }
            if w <= R::zero() {
                return Err(Error::Argument(format!(
                    "edge ({u},{v}) has non-positive weight"
                )));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(Error::Argument(format!("duplicate edge ({a},{b})")));
            }
            normalized.push((a, b, w));
        }
        normalized.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        Ok(WeightedGraph { n, edges: normalized })
    }

    pub fn unit(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, pairs.iter().map(|&(u, v)| (u, v, R::one())).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, R)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, R)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (u, v, w) in &self.edges {
            adj[*u].push((*v, w.clone()));
            adj[*v].push((*u, w.clone()));
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for (u, v, _) in &self.edges {
            deg[*u] += 1;
            deg[*v] += 1;
        }
        deg
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let deg = self.degrees();
        let d = *deg.first()?;
        deg.iter().all(|&x| x == d).then_some(d)
    }

    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|(_, _, w)| *w == R::one())
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for (v, _) in &adj[u] {
                if !seen[*v] {
                    seen[*v] = true;
                    count += 1;
                    stack.push(*v);
                }
            }
        }
        count == self.n
    }
}

/// The Petersen graph, unit weights.
pub fn petersen() -> WeightedGraph<f64> {
    let mut pairs = Vec::new();
    for i in 0..5 {
        pairs.push((i, (i + 1) % 5)); // outer cycle
        pairs.push((i, i + 5)); // spokes
        pairs.push((i + 5, (i + 2) % 5 + 5)); // inner pentagram
    }
    WeightedGraph::unit(10, &pairs).unwrap()
}

const PAIRING_ATTEMPTS: usize = 10_000;

/// Uniform random simple connected d-regular graph via the pairing model,
/// rejecting loops, multi-edges and disconnected outcomes.
pub fn random_regular_graph<R: Scalar>(n: usize, d: usize, seed: u64) -> Result<WeightedGraph<R>> {
    if n < 3 {
        return Err(Error::Argument("need n >= 3".into()));
    }
    if d >= n {
        return Err(Error::Argument("need d < n".into()));
    }
    if (n * d) % 2 != 0 {
        return Err(Error::Parity(format!("n*d = {} is odd", n * d)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n * d).map(|i| i / d).collect();
    'attempt: for _ in 0..PAIRING_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut seen = std::collections::HashSet::new();
        let mut pairs = Vec::with_capacity(n * d / 2);
        for chunk in stubs.chunks(2) {
            let (u, v) = (chunk[0], chunk[1]);
            if u == v {
                continue 'attempt;
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                continue 'attempt;
            }
            pairs.push(key);
        }
        let g = WeightedGraph::unit(n, &pairs)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Sampling(format!(
        "pairing model failed to produce a simple connected {d}-regular graph on {n} vertices \
         within {PAIRING_ATTEMPTS} attempts"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpansionMethod {
    Exact,
    SpectralLowerBound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub phi: f64,
    /// Subset achieving the minimum ratio (empty for the spectral bound).
    pub witness_set: Vec<usize>,
    pub method: ExpansionMethod,
}

pub const EXPANSION_EXACT_MAX_N: usize = 24;

/// Edge expansion by subset enumeration: the largest phi with
/// E(S, V\S) >= phi |S|(n-|S|)|E|/n^2 over all nonempty proper S.
/// Ratio comparisons are done in exact integer arithmetic.
pub fn edge_expansion_exact<R: Scalar>(g: &WeightedGraph<R>) -> Result<ExpansionReport> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Argument("expansion needs at least 2 vertices".into()));
    }
    if n > EXPANSION_EXACT_MAX_N {
        return Err(Error::Capacity(format!(
            "exact expansion enumerates 2^(n-1) subsets; n={n} > {EXPANSION_EXACT_MAX_N}. \
             Use the spectral lower bound instead"
        )));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let m = g.edge_count() as u128;
    let n_u = n as u128;
    let adj = g.adjacency();
    // Gray-code walk over subsets containing vertex 0 (complement symmetry).
    let mut in_s = vec![false; n];
    in_s[0] = true;
    let mut size: u128 = 1;
    let mut cut: u128 = adj[0].len() as u128;
    let mut best_num = cut * n_u * n_u; // phi = cut*n^2 / (|S|(n-|S|)|E|)
    let mut best_den = size * (n_u - size) * m;
    let mut best_set: u64 = 1;
    let mut code: u64 = 0;
    let total = 1u64 << (n - 1);
    for i in 1..total {
        let next = i ^ (i >> 1);
        let flipped = (code ^ next).trailing_zeros() as usize + 1;
        code = next;
        let entering = !in_s[flipped];
        in_s[flipped] = entering;
        let mut delta: i128 = 0;
        for (v, _) in &adj[flipped] {
            if in_s[*v] {
                delta -= 1;
            } else {
                delta += 1;
            }
        }
        if entering {
            size += 1;
            cut = (cut as i128 + delta) as u128;
        } else {
            size -= 1;
            cut = (cut as i128 - delta) as u128;
        }
        if size == n as u128 {
            continue; // S = V excluded
        }
        let num = cut * n_u * n_u;
        let den = size * (n_u - size) * m;
        if num * best_den < best_num * den {
            best_num = num;
            best_den = den;
            best_set = (code << 1) | 1;
        }
    }
    let witness_set: Vec<usize> = (0..n).filter(|&i| best_set >> i & 1 == 1).collect();
    Ok(ExpansionReport {
        phi: best_num as f64 / best_den as f64,
        witness_set,
        method: ExpansionMethod::Exact,
    })
}

/// Certified lower bound on the edge expansion from the second-smallest
/// eigenvalue of the normalized Laplacian (Cheeger direction only).
pub fn edge_expansion_spectral_bound<R: Scalar>(g: &WeightedGraph<R>) -> Result<f64> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Argument("expansion needs at least 2 vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let deg = g.degrees();
    let mut lap = nalgebra::DMatrix::<f64>::identity(n, n);
    for (u, v, _) in g.edges() {
        let w = -1.0 / ((deg[*u] as f64) * (deg[*v] as f64)).sqrt();
        lap[(*u, *v)] = w;
        lap[(*v, *u)] = w;
    }
    let eig = nalgebra::SymmetricEigen::new(lap);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigensolver produced non-finite values".into()));
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lambda2 = vals[1].max(0.0);
    // phi(S) >= 2 h(S) * (n d_min / 2|E|) and h >= lambda2 / 2.
    let d_min = *deg.iter().min().unwrap() as f64;
    let bound = lambda2 * (n as f64) * d_min / (2.0 * g.edge_count() as f64);
    Ok(bound * (1.0 - 1e-9))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AverageDistanceReport {
    pub average: f64,
    /// log|S| / (4 log d), natural logarithm.
    pub lower_bound: f64,
    pub bound_holds: bool,
}

/// Average of d_G over ordered pairs of S, checked against the standard
/// log|S|/(4 log d) estimate for connected d-regular graphs, d >= 3.
pub fn average_distance<R: Scalar>(
    g: &WeightedGraph<R>,
    s: &SubsetHandle,
) -> Result<AverageDistanceReport> {
    let d = g
        .regular_degree()
        .ok_or_else(|| Error::Regularity("average_distance requires a regular graph".into()))?;
    if d < 3 {
        return Err(Error::Regularity("average_distance requires degree >= 3".into()));
    }
    if s.is_empty() {
        return Err(Error::Argument("subset must be nonempty".into()));
    }
    let m = metric::shortest_path_metric(&to_f64_graph(g))?;
    let mut total = 0.0;
    for &i in s.indices() {
        for &j in s.indices() {
            total += m.d(i, j);
        }
    }
    let k = s.len() as f64;
    let average = total / (k * k);
    let lower_bound = k.ln() / (4.0 * (d as f64).ln());
    Ok(AverageDistanceReport {
        average,
        lower_bound,
        bound_holds: average >= lower_bound,
    })
}

fn to_f64_graph<R: Scalar>(g: &WeightedGraph<R>) -> WeightedGraph<f64> {
    WeightedGraph {
        n: g.n,
        edges: g
            .edges
            .iter()
            .map(|(u, v, w)| (*u, *v, w.to_f64()))
            .collect(),
    }
}

/// Average length of G's edges in the r-magnification at S, computed from
/// the magnified metric and cross-checked against the closed form
/// 1 + 2r|S|/n.
pub fn magnified_edge_average<R: Scalar>(
    g: &WeightedGraph<R>,
    s: &SubsetHandle,
    r: f64,
) -> Result<f64> {
    if !g.is_unit_weight() || g.regular_degree().is_none() {
        return Err(Error::Regularity(
            "magnified_edge_average requires a unit-weight regular graph".into(),
        ));
    }
    let base = metric::shortest_path_metric(&to_f64_graph(g))?;
    let value = if s.is_empty() {
        // no magnification: every edge has length 1
        1.0
    } else {
        let mag = metric::magnify(&base, s, r)?;
        let total: f64 = g.edges().iter().map(|(u, v, _)| mag.d(*u, *v)).sum();
        total / g.edge_count() as f64
    };
    let expected = 1.0 + 2.0 * r * s.len() as f64 / g.n() as f64;
    if (value - expected).abs() > 1e-12 {
        return Err(Error::Internal(format!(
            "magnified edge average {value} deviates from closed form {expected}; \
             this signals a magnification bug"
        )));
    }
    Ok(value)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MengerReport {
    pub count: usize,
    /// Edge-disjoint A-B paths as vertex sequences decomposing the max flow.
    pub paths: Vec<Vec<usize>>,
    /// Size of the residual min cut, equal to `count` by max-flow/min-cut.
    pub min_cut: usize,
}

/// Maximum number of edge-disjoint paths joining A and B (unit capacity per
/// undirected edge), with an explicit path decomposition.
pub fn edge_disjoint_paths<R: Scalar>(
    g: &WeightedGraph<R>,
    a: &SubsetHandle,
    b: &SubsetHandle,
) -> Result<MengerReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Argument("A and B must be nonempty".into()));
    }
    if a.indices().iter().any(|i| b.contains(*i)) {
        return Err(Error::Argument("A and B must be disjoint".into()));
    }
    let n = g.n();
    let source = n;
    let sink = n + 1;
    let mut net = UnitFlow::new(n + 2);
    for (u, v, _) in g.edges() {
        net.add_undirected(*u, *v);
    }
    let big = g.edge_count() as i64 + 1;
    for &u in a.indices() {
        net.add_directed(source, u, big);
    }
    for &v in b.indices() {
        net.add_directed(v, sink, big);
    }
    let count = net.max_flow(source, sink);

    // residual min cut among the original (undirected) edges
    let reach = net.residual_reachable(source);
    let min_cut = g
        .edges()
        .iter()
        .filter(|(u, v, _)| reach[*u] != reach[*v])
        .count();

    // net flow per undirected edge, then greedy walk decomposition
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for arc in net.arcs() {
        if arc.from < n && arc.to < n && arc.flow > 0 {
            for _ in 0..arc.flow {
                out[arc.from].push(arc.to);
            }
        }
    }
    let mut paths = Vec::with_capacity(count);
    let in_b = b.membership(n);
    for &start in a.indices() {
        loop {
            let mut path = vec![start];
            let mut cur = start;
            let mut moved = false;
            while !in_b[cur] {
                match out[cur].pop() {
                    Some(next) => {
                        path.push(next);
                        cur = next;
                        moved = true;
                    }
                    None => break,
                }
            }
            if moved && in_b[cur] {
                paths.push(path);
            } else {
                break;
            }
        }
    }
    if paths.len() != count {
        return Err(Error::Internal(format!(
            "flow decomposition produced {} paths for flow value {count}",
            paths.len()
        )));
    }
    Ok(MengerReport {
        count,
        paths,
        min_cut,
    })
}

#[derive(Debug, Clone)]
pub(crate) struct Arc {
    pub from: usize,
    pub to: usize,
    pub cap: i64,
    pub flow: i64,
}

/// Integer max flow (Edmonds-Karp) where an undirected edge is a mutually
/// inverse arc pair, so both directions share one unit of capacity.
struct UnitFlow {
    arcs: Vec<Arc>,
    head: Vec<Vec<usize>>, // arc indices per node
}

impl UnitFlow {
    fn new(n: usize) -> Self {
        UnitFlow {
            arcs: Vec::new(),
            head: vec![Vec::new(); n],
        }
    }

    fn add_pair(&mut self, u: usize, v: usize, cap_uv: i64, cap_vu: i64) {
        let i = self.arcs.len();
        self.arcs.push(Arc { from: u, to: v, cap: cap_uv, flow: 0 });
        self.arcs.push(Arc { from: v, to: u, cap: cap_vu, flow: 0 });
        self.head[u].push(i);
        self.head[v].push(i + 1);
    }

    fn add_undirected(&mut self, u: usize, v: usize) {
        self.add_pair(u, v, 1, 1);
    }

    fn add_directed(&mut self, u: usize, v: usize, cap: i64) {
        self.add_pair(u, v, cap, 0);
    }

    fn residual(&self, arc: usize) -> i64 {
        // pushing along `arc` consumes its capacity and refunds its partner
        self.arcs[arc].cap - self.arcs[arc].flow + self.arcs[arc ^ 1].flow
    }

    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut total = 0usize;
        loop {
            let mut prev_arc = vec![usize::MAX; self.head.len()];
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(s);
            let mut found = false;
            let mut visited = vec![false; self.head.len()];
            visited[s] = true;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    found = true;
                    break;
                }
                for &ai in &self.head[u] {
                    let v = self.arcs[ai].to;
                    if !visited[v] && self.residual(ai) > 0 {
                        visited[v] = true;
                        prev_arc[v] = ai;
                        queue.push_back(v);
                    }
                }
            }
            if !found {
                return total;
            }
            // unit augmentation: cancel against the partner arc first
            let mut v = t;
            while v != s {
                let ai = prev_arc[v];
                if self.arcs[ai ^ 1].flow > 0 {
                    self.arcs[ai ^ 1].flow -= 1;
                } else {
                    self.arcs[ai].flow += 1;
                }
                v = self.arcs[ai].from;
            }
            total += 1;
        }
    }

    fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for &ai in &self.head[u] {
                let v = self.arcs[ai].to;
                if !seen[v] && self.residual(ai) > 0 {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    fn arcs(&self) -> &[Arc] {
        &self.arcs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> WeightedGraph<f64> {
        WeightedGraph::unit(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap()
    }

    fn k4() -> WeightedGraph<f64> {
        WeightedGraph::unit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn random_regular_k4_is_unique() {
        let g = random_regular_graph::<f64>(4, 3, 0).unwrap();
        assert_eq!(g.edges().len(), 6);
        assert_eq!(g.regular_degree(), Some(3));
    }

    #[test]
    fn random_regular_postconditions_and_determinism() {
        let g1 = random_regular_graph::<f64>(16, 4, 1).unwrap();
        let g2 = random_regular_graph::<f64>(16, 4, 1).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1.regular_degree(), Some(4));
        assert!(g1.is_connected());
        let g3 = random_regular_graph::<f64>(16, 4, 2).unwrap();
        assert_ne!(g1, g3);
    }

    #[test]
    fn random_regular_parity_error() {
        assert!(matches!(
            random_regular_graph::<f64>(5, 3, 0),
            Err(Error::Parity(_))
        ));
    }

    #[test]
    fn exact_expansion_c4_and_k4() {
        let rep = edge_expansion_exact(&c4()).unwrap();
        assert!((rep.phi - 2.0).abs() < 1e-12);
        // witness: an adjacent pair
        assert_eq!(rep.witness_set.len(), 2);
        let rep = edge_expansion_exact(&k4()).unwrap();
        assert!((rep.phi - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_expansion_brute_force_agreement_small() {
        // independent brute force over explicit subsets
        for g in [c4(), k4(), petersen()] {
            let n = g.n();
            let m = g.edge_count() as f64;
            let mut phi = f64::INFINITY;
            for mask in 1u32..(1 << n) - 1 {
                let in_s: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                let cut = g
                    .edges()
                    .iter()
                    .filter(|(u, v, _)| in_s[*u] != in_s[*v])
                    .count() as f64;
                let k = in_s.iter().filter(|&&b| b).count() as f64;
                phi = phi.min(cut * (n as f64) * (n as f64) / (k * (n as f64 - k) * m));
            }
            let rep = edge_expansion_exact(&g).unwrap();
            assert!((rep.phi - phi).abs() < 1e-12);
            // witness achieves phi
            let in_s: Vec<bool> = (0..n).map(|i| rep.witness_set.contains(&i)).collect();
            let cut = g
                .edges()
                .iter()
                .filter(|(u, v, _)| in_s[*u] != in_s[*v])
                .count() as f64;
            let k = rep.witness_set.len() as f64;
            let ratio = cut * (n as f64) * (n as f64) / (k * (n as f64 - k) * m);
            assert!((ratio - rep.phi).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_bound_below_exact() {
        for g in [c4(), k4(), petersen()] {
            let exact = edge_expansion_exact(&g).unwrap().phi;
            let bound = edge_expansion_spectral_bound(&g).unwrap();
            assert!(bound <= exact + 1e-12, "bound {bound} > exact {exact}");
            assert!(bound > 0.0);
        }
    }

    #[test]
    fn spectral_bound_needs_connectivity() {
        let g = WeightedGraph::<f64>::unit(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            edge_expansion_spectral_bound(&g),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn average_distance_examples() {
        let s1 = SubsetHandle::new(vec![0], 4).unwrap();
        let rep = average_distance(&k4(), &s1).unwrap();
        assert_eq!(rep.average, 0.0);
        assert_eq!(rep.lower_bound, 0.0);
        assert!(rep.bound_holds);

        let rep = average_distance(&k4(), &SubsetHandle::full(4)).unwrap();
        assert!((rep.average - 0.75).abs() < 1e-12);
        assert!((rep.lower_bound - 4f64.ln() / (4.0 * 3f64.ln())).abs() < 1e-12);
        assert!(rep.bound_holds);

        let rep = average_distance(&petersen(), &SubsetHandle::full(10)).unwrap();
        assert!((rep.average - 1.5).abs() < 1e-12);
        assert!(rep.bound_holds);
    }

    #[test]
    fn magnified_edge_average_examples() {
        let s = SubsetHandle::new(vec![0], 4).unwrap();
        assert!((magnified_edge_average(&c4(), &s, 1.0).unwrap() - 1.5).abs() < 1e-15);
        let empty = SubsetHandle::new(vec![], 4).unwrap();
        assert_eq!(magnified_edge_average(&c4(), &empty, 1.0).unwrap(), 1.0);
        let s2 = SubsetHandle::new(vec![0, 1], 4).unwrap();
        assert!((magnified_edge_average(&k4(), &s2, 0.5).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn menger_on_path_bridge() {
        let g = WeightedGraph::<f64>::unit(3, &[(0, 1), (1, 2)]).unwrap();
        let a = SubsetHandle::new(vec![0], 3).unwrap();
        let b = SubsetHandle::new(vec![2], 3).unwrap();
        let rep = edge_disjoint_paths(&g, &a, &b).unwrap();
        assert_eq!(rep.count, 1);
        assert_eq!(rep.paths, vec![vec![0, 1, 2]]);
        assert_eq!(rep.min_cut, 1);
    }

    #[test]
    fn menger_k4_three_paths() {
        let a = SubsetHandle::new(vec![0], 4).unwrap();
        let b = SubsetHandle::new(vec![1], 4).unwrap();
        let rep = edge_disjoint_paths(&k4(), &a, &b).unwrap();
        assert_eq!(rep.count, 3);
        assert_eq!(rep.min_cut, 3);
        // phi * min(|A|,|B|) * |E| / (2n) = (8/3)*1*6/8 = 2 <= 3
        let phi = edge_expansion_exact(&k4()).unwrap().phi;
        assert!(rep.count as f64 >= phi * 1.0 * 6.0 / 8.0);
        // paths are edge-disjoint
        let mut used = std::collections::HashSet::new();
        for p in &rep.paths {
            for w in p.windows(2) {
                let key = (w[0].min(w[1]), w[0].max(w[1]));
                assert!(used.insert(key));
            }
        }
    }

    #[test]
    fn menger_c4_opposite_pair() {
        let a = SubsetHandle::new(vec![0, 2], 4).unwrap();
        let b = SubsetHandle::new(vec![1, 3], 4).unwrap();
        let rep = edge_disjoint_paths(&c4(), &a, &b).unwrap();
        assert_eq!(rep.count, 4);
        assert_eq!(rep.min_cut, 4);
    }

    #[test]
    fn menger_rejects_overlap() {
        let a = SubsetHandle::new(vec![0, 1], 4).unwrap();
        let b = SubsetHandle::new(vec![1, 2], 4).unwrap();
        assert!(matches!(
            edge_disjoint_paths(&c4(), &a, &b),
            Err(Error::Argument(_))
        ));
    }
}
