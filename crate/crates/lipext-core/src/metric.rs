//! Finite metric spaces: validation, shortest-path metrics, r-magnification,
//! snowflakes, glue constructions and the twisted union of hypercubes.

use crate::graph::WeightedGraph;
use crate::scalar::{self, Scalar};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A labeled point set with a dense symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric<R: Scalar> {
    points: Vec<String>,
    dist: Vec<Vec<R>>,
}

impl<R: Scalar> FiniteMetric<R> {
    /// Wraps a candidate matrix after shape checks only; use
    /// [`validate_metric`] to audit the metric axioms.
    pub fn from_matrix(points: Vec<String>, dist: Vec<Vec<R>>) -> Result<Self> {
        let n = points.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!(
                "distance matrix must be {n}x{n} to match the point list"
            )));
        }
        Ok(FiniteMetric { points, dist })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn dist(&self, i: usize, j: usize) -> &R {
        &self.dist[i][j]
    }

    pub fn d(&self, i: usize, j: usize) -> R {
        self.dist[i][j].clone()
    }

    pub fn matrix(&self) -> &[Vec<R>] {
        &self.dist
    }

    pub fn diameter(&self) -> R {
        let mut best = R::zero();
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                best = scalar::max(best, self.d(i, j));
            }
        }
        best
    }

    /// Smallest strictly positive entry, `None` on spaces with < 2 points.
    pub fn min_positive_distance(&self) -> Option<R> {
        let mut best: Option<R> = None;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let d = self.d(i, j);
                if d > R::zero() && best.as_ref().map_or(true, |b| d < *b) {
                    best = Some(d);
                }
            }
        }
        best
    }

    /// Diameter of the restriction to an index subset.
    pub fn diameter_on(&self, s: &SubsetHandle) -> R {
        let mut best = R::zero();
        for (a, &i) in s.indices().iter().enumerate() {
            for &j in &s.indices()[a + 1..] {
                best = scalar::max(best, self.d(i, j));
            }
        }
        best
    }

    /// The restriction of the metric to an index subset, keeping labels.
    pub fn restrict(&self, s: &SubsetHandle) -> FiniteMetric<R> {
        let idx = s.indices();
        FiniteMetric {
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
            dist: idx
                .iter()
                .map(|&i| idx.iter().map(|&j| self.d(i, j)).collect())
                .collect(),
        }
    }

    pub fn to_f64(&self) -> FiniteMetric<f64> {
        FiniteMetric {
            points: self.points.clone(),
            dist: self
                .dist
                .iter()
                .map(|row| row.iter().map(Scalar::to_f64).collect())
                .collect(),
        }
    }
}

/// Distinct, in-range indices into a [`FiniteMetric`]'s point list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetHandle {
    indices: Vec<usize>,
}

impl SubsetHandle {
    pub fn new(indices: Vec<usize>, universe: usize) -> Result<Self> {
        let mut seen = vec![false; universe];
        for &i in &indices {
            if i >= universe {
                return Err(Error::Argument(format!(
                    "index {i} out of range for universe of size {universe}"
                )));
            }
            if seen[i] {
                return Err(Error::Argument(format!("duplicate index {i} in subset")));
            }
            seen[i] = true;
        }
        Ok(SubsetHandle { indices })
    }

    pub fn full(universe: usize) -> Self {
        SubsetHandle {
            indices: (0..universe).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn membership(&self, universe: usize) -> Vec<bool> {
        let mut m = vec![false; universe];
        for &i in &self.indices {
            m[i] = true;
        }
        m
    }
}

/// Whether distinct points may sit at distance zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationMode {
    Metric,
    SemiMetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    NonzeroDiagonal { i: usize },
    Asymmetry { i: usize, j: usize },
    NonPositive { i: usize, j: usize },
    Negative { i: usize, j: usize },
    Triangle { i: usize, j: usize, k: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
    pub triples_checked: usize,
    pub exhaustive: bool,
}

const MAX_RECORDED_VIOLATIONS: usize = 1000;
const SAMPLED_TRIPLES: usize = 200_000;

/// Audits zero diagonal, symmetry, positivity and the triangle inequality of
/// a raw candidate matrix, beyond `tol`. Exhaustive over all triples for
/// up to 64 points, deterministically sampled above that.
pub fn validate_matrix<R: Scalar>(
    dist: &[Vec<R>],
    tol: &R,
    mode: ValidationMode,
) -> Result<ValidationReport> {
    let n = dist.len();
    if dist.iter().any(|row| row.len() != n) {
        return Err(Error::Shape("distance matrix is not square".into()));
    }
    if *tol < R::zero() {
        return Err(Error::Argument("tolerance must be nonnegative".into()));
    }
    let mut violations = Vec::new();
    let push = |violations: &mut Vec<Violation>, v: Violation| {
        if violations.len() < MAX_RECORDED_VIOLATIONS {
            violations.push(v);
        }
    };
    for i in 0..n {
        if dist[i][i].abs() > *tol {
            push(&mut violations, Violation::NonzeroDiagonal { i });
        }
        for j in (i + 1)..n {
            if (dist[i][j].clone() - dist[j][i].clone()).abs() > *tol {
                push(&mut violations, Violation::Asymmetry { i, j });
            }
            if dist[i][j] < -tol.clone() {
                push(&mut violations, Violation::Negative { i, j });
            } else if mode == ValidationMode::Metric && dist[i][j] <= *tol {
                push(&mut violations, Violation::NonPositive { i, j });
            }
        }
    }
    let mut triples_checked = 0usize;
    let check_triple = |violations: &mut Vec<Violation>, i: usize, j: usize, k: usize| {
        // d(i,j) <= d(i,k) + d(k,j) beyond tol
        if dist[i][j].clone() - dist[i][k].clone() - dist[k][j].clone() > *tol {
            push(violations, Violation::Triangle { i, j, k });
        }
    };
    let exhaustive = n <= 64;
    if exhaustive {
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    triples_checked += 1;
                    check_triple(&mut violations, i, j, k);
                }
            }
        }
    } else {
        // splitmix64 stream, fixed seed: deterministic sampling
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            (z ^ (z >> 31)) as usize
        };
        while triples_checked < SAMPLED_TRIPLES {
            let i = next() % n;
            let j = next() % n;
            let k = next() % n;
            if i == j || j == k || i == k {
                continue;
            }
            triples_checked += 1;
            check_triple(&mut violations, i, j, k);
        }
    }
    Ok(ValidationReport {
        pass: violations.is_empty(),
        violations,
        triples_checked,
        exhaustive,
    })
}

pub fn validate_metric<R: Scalar>(
    m: &FiniteMetric<R>,
    tol: &R,
    mode: ValidationMode,
) -> Result<ValidationReport> {
    validate_matrix(&m.dist, tol, mode)
}

/// Shortest-path metric of a connected positively weighted graph.
pub fn shortest_path_metric<R: Scalar>(g: &WeightedGraph<R>) -> Result<FiniteMetric<R>> {
    let n = g.n();
    let adj = g.adjacency();
    let mut dist = Vec::with_capacity(n);
    for src in 0..n {
        let row = dijkstra_row(n, &adj, src)?;
        dist.push(row);
    }
    let points = (0..n).map(|i| i.to_string()).collect();
    Ok(FiniteMetric { points, dist })
}

fn dijkstra_row<R: Scalar>(n: usize, adj: &[Vec<(usize, R)>], src: usize) -> Result<Vec<R>> {
    let mut dist: Vec<Option<R>> = vec![None; n];
    let mut done = vec![false; n];
    dist[src] = Some(R::zero());
    for _ in 0..n {
        let mut u = None;
        for v in 0..n {
            if done[v] {
                continue;
            }
            if let Some(dv) = &dist[v] {
                match &u {
                    None => u = Some((v, dv.clone())),
                    Some((_, du)) if dv < du => u = Some((v, dv.clone())),
                    _ => {}
                }
            }
        }
        let Some((u, du)) = u else {
            return Err(Error::Disconnected);
        };
        done[u] = true;
        for (v, w) in &adj[u] {
            let cand = du.clone() + w.clone();
            if dist[*v].as_ref().map_or(true, |dv| cand < *dv) {
                dist[*v] = Some(cand);
            }
        }
    }
    Ok(dist.into_iter().map(Option::unwrap).collect())
}

/// The r-magnification of `x` at `s`: distances of distinct points grow by
/// `r` per endpoint inside `s`.
pub fn magnify<R: Scalar>(x: &FiniteMetric<R>, s: &SubsetHandle, r: R) -> Result<FiniteMetric<R>> {
    if r <= R::zero() {
        return Err(Error::Domain("magnification radius r must be positive".into()));
    }
    check_subset(s, x.len())?;
    let in_s = s.membership(x.len());
    let n = x.len();
    let mut dist = x.dist.clone();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let touches = in_s[i] as i64 + in_s[j] as i64;
            dist[i][j] = dist[i][j].clone() + r.clone() * R::from_int(touches);
        }
    }
    Ok(FiniteMetric {
        points: x.points.clone(),
        dist,
    })
}

fn check_subset(s: &SubsetHandle, universe: usize) -> Result<()> {
    if s.indices().iter().any(|&i| i >= universe) {
        return Err(Error::Argument("subset index out of range".into()));
    }
    Ok(())
}

/// Entrywise power metric d^alpha for alpha in (0,1].
pub fn snowflake(x: &FiniteMetric<f64>, alpha: f64) -> Result<FiniteMetric<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "snowflake exponent must lie in (0,1], got {alpha}"
        )));
    }
    let dist = x
        .dist
        .iter()
        .map(|row| row.iter().map(|d| d.powf(alpha)).collect())
        .collect();
    Ok(FiniteMetric {
        points: x.points.clone(),
        dist,
    })
}

/// Glues two metric spaces along `sigma: X -> Y` with bridge weight `r`:
/// the shortest-path metric of the weighted graph with cliques on X and Y
/// (weights d_X, d_Y) and edges {x, sigma(x)} of weight r.
pub fn glue_metric<R: Scalar>(
    x: &FiniteMetric<R>,
    y: &FiniteMetric<R>,
    sigma: &[usize],
    r: R,
) -> Result<FiniteMetric<R>> {
    if r <= R::zero() {
        return Err(Error::Domain("glue weight r must be positive".into()));
    }
    if sigma.len() != x.len() {
        return Err(Error::Argument(
            "sigma must be defined on every point of x".into(),
        ));
    }
    if sigma.iter().any(|&t| t >= y.len()) {
        return Err(Error::Argument("sigma maps outside of y".into()));
    }
    let nx = x.len();
    let n = nx + y.len();
    let mut edges: Vec<(usize, usize, R)> = Vec::new();
    for i in 0..nx {
        for j in (i + 1)..nx {
            edges.push((i, j, x.d(i, j)));
        }
    }
    for i in 0..y.len() {
        for j in (i + 1)..y.len() {
            edges.push((nx + i, nx + j, y.d(i, j)));
        }
    }
    for (i, &t) in sigma.iter().enumerate() {
        edges.push((i, nx + t, r.clone()));
    }
    let g = WeightedGraph::new(n, edges)?;
    let sp = shortest_path_metric(&g)?;
    let points = x
        .points
        .iter()
        .map(|p| format!("x:{p}"))
        .chain(y.points.iter().map(|p| format!("y:{p}")))
        .collect();
    Ok(FiniteMetric {
        points,
        dist: sp.dist,
    })
}

/// A vertex of the twisted union of hypercubes: a word in F_2^n plus a layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypercubePoint {
    pub word: Vec<bool>,
    pub layer: bool,
}

impl HypercubePoint {
    pub fn label(&self) -> String {
        let bits: String = self
            .word
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        format!("{}|{}", bits, self.layer as u8)
    }
}

#[derive(Debug, Clone)]
pub struct TwistedCube {
    pub metric: FiniteMetric<f64>,
    pub n: usize,
    pub alpha: f64,
    pub r: f64,
    pub s: f64,
    /// Sufficient condition for metricity; when false the matrix is still
    /// produced and the validator decides.
    pub rs_condition_ok: bool,
}

impl TwistedCube {
    /// Index of the point (word, layer): layer-0 points come first.
    pub fn index(&self, word: u32, layer: u8) -> usize {
        (layer as usize) << self.n | word as usize
    }

    pub fn point(&self, idx: usize) -> HypercubePoint {
        let layer = idx >> self.n == 1;
        let word = (0..self.n).map(|b| (idx >> b) & 1 == 1).collect();
        HypercubePoint { word, layer }
    }

    /// Indices of layer 0, in word order.
    pub fn layer0(&self) -> SubsetHandle {
        SubsetHandle {
            indices: (0..1usize << self.n).collect(),
        }
    }
}

pub const TWISTED_CUBE_MAX_N: usize = 14;

/// Three-case metric on F_2^n x F_2 with parameters (alpha, r, s).
pub fn twisted_cube_metric(n: usize, alpha: f64, r: f64, s: f64) -> Result<TwistedCube> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "twisted cube exponent must lie in (1/2,1], got {alpha}"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if n > TWISTED_CUBE_MAX_N {
        return Err(Error::Capacity(format!(
            "twisted cube with n={n} exceeds dense-storage guard n <= {TWISTED_CUBE_MAX_N}"
        )));
    }
    if r <= 0.0 || s <= 0.0 {
        return Err(Error::Domain("r and s must be positive".into()));
    }
    let rs_condition_ok = check_rs_condition(alpha, r, s)?;
    let words = 1usize << n;
    let total = 2 * words;
    let root = |h: f64| h.powf(1.0 / (2.0 * alpha));
    let mut dist = vec![vec![0.0f64; total]; total];
    for a in 0..total {
        let (xa, la) = (a % words, a / words);
        for b in 0..total {
            let (xb, lb) = (b % words, b / words);
            let h = ((xa ^ xb) as u32).count_ones() as f64;
            dist[a][b] = match (la, lb) {
                (1, 1) => (s * h).min(2.0 * r + root(h)),
                (0, 0) => root(h),
                _ => r + (s * h).min(root(h)),
            };
        }
    }
    let mut points = Vec::with_capacity(total);
    for layer in 0..2u8 {
        for w in 0..words {
            let bits: String = (0..n).map(|b| if (w >> b) & 1 == 1 { '1' } else { '0' }).collect();
            points.push(format!("{bits}|{layer}"));
        }
    }
    Ok(TwistedCube {
        metric: FiniteMetric { points, dist },
        n,
        alpha,
        r,
        s,
        rs_condition_ok,
    })
}

/// Sufficient condition for the twisted-cube formula to be a metric:
/// (2a)^(2a) * s * (2r)^(2a-1) >= ((2a)^(2a/(2a-1)) - 1)^(2a-1).
pub fn check_rs_condition(alpha: f64, r: f64, s: f64) -> Result<bool> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "rs-condition requires alpha in (1/2,1], got {alpha}"
        )));
    }
    let a2 = 2.0 * alpha;
    let lhs = a2.powf(a2) * s * (2.0 * r).powf(a2 - 1.0);
    let rhs = (a2.powf(a2 / (a2 - 1.0)) - 1.0).powf(a2 - 1.0);
    Ok(lhs >= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn metric_from(points: usize, entries: &[&[f64]]) -> FiniteMetric<f64> {
        let labels = (0..points).map(|i| i.to_string()).collect();
        let dist = entries.iter().map(|r| r.to_vec()).collect();
        FiniteMetric::from_matrix(labels, dist).unwrap()
    }

    #[test]
    fn validator_flags_triangle_violation() {
        let m = metric_from(
            3,
            &[&[0.0, 1.0, 3.0], &[1.0, 0.0, 1.0], &[3.0, 1.0, 0.0]],
        );
        let rep = validate_metric(&m, &1e-12, ValidationMode::Metric).unwrap();
        assert!(!rep.pass);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Triangle { .. })));
    }

    #[test]
    fn validator_accepts_path_graph_metric() {
        let g = WeightedGraph::<f64>::unit(3, &[(0, 1), (1, 2)]).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        assert_eq!(m.d(0, 2), 2.0);
        let rep = validate_metric(&m, &1e-12, ValidationMode::Metric).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn validator_rejects_non_square() {
        let bad = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(
            validate_matrix(&bad, &1e-12, ValidationMode::Metric),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn shortest_path_on_cycle_and_single_edge() {
        let c4 = WeightedGraph::<f64>::unit(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let m = shortest_path_metric(&c4).unwrap();
        assert_eq!(m.d(0, 2), 2.0);
        assert_eq!(m.d(1, 3), 2.0);

        let e = WeightedGraph::new(2, vec![(0, 1, 5.0)]).unwrap();
        assert_eq!(shortest_path_metric(&e).unwrap().d(0, 1), 5.0);
    }

    #[test]
    fn shortest_path_petersen_diameter() {
        let g = crate::graph::petersen();
        let m = shortest_path_metric(&g).unwrap();
        assert_eq!(m.diameter(), 2.0);
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        let g = WeightedGraph::<f64>::unit(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(shortest_path_metric(&g), Err(Error::Disconnected)));
    }

    #[test]
    fn magnify_matches_formula() {
        let m = metric_from(
            3,
            &[&[0.0, 2.0, 2.0], &[2.0, 0.0, 2.0], &[2.0, 2.0, 0.0]],
        );
        let s = SubsetHandle::new(vec![0, 1], 3).unwrap();
        let mag = magnify(&m, &s, 3.0).unwrap();
        assert_eq!(mag.d(0, 1), 8.0); // both endpoints in S
        assert_eq!(mag.d(0, 2), 5.0); // one endpoint in S
        assert_eq!(mag.d(0, 0), 0.0);
    }

    #[test]
    fn magnify_is_exact_in_rational_mode() {
        let q = |v: i64| Rational::from_int(v);
        let m = FiniteMetric::from_matrix(
            vec!["a".into(), "b".into()],
            vec![vec![q(0), q(2)], vec![q(2), q(0)]],
        )
        .unwrap();
        let s = SubsetHandle::new(vec![0, 1], 2).unwrap();
        let mag = magnify(&m, &s, q(3)).unwrap();
        assert_eq!(mag.d(0, 1), q(8));
    }

    #[test]
    fn snowflake_examples() {
        let m = metric_from(2, &[&[0.0, 4.0], &[4.0, 0.0]]);
        assert_eq!(snowflake(&m, 0.5).unwrap().d(0, 1), 2.0);
        assert_eq!(snowflake(&m, 1.0).unwrap().d(0, 1), 4.0);
        assert!(snowflake(&m, 0.0).is_err());
        assert!(snowflake(&m, 1.5).is_err());
    }

    #[test]
    fn snowflaked_cycle_is_a_metric() {
        let c4 = WeightedGraph::<f64>::unit(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let m = snowflake(&shortest_path_metric(&c4).unwrap(), 0.7).unwrap();
        assert!(validate_metric(&m, &1e-12, ValidationMode::Metric)
            .unwrap()
            .pass);
    }

    #[test]
    fn snowflake_composes() {
        let g = crate::graph::petersen();
        let m = shortest_path_metric(&g).unwrap();
        let a = snowflake(&snowflake(&m, 0.8).unwrap(), 0.7).unwrap();
        let b = snowflake(&m, 0.56).unwrap();
        for i in 0..m.len() {
            for j in 0..m.len() {
                assert!((a.d(i, j) - b.d(i, j)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn glue_single_points() {
        let one = metric_from(1, &[&[0.0]]);
        let glued = glue_metric(&one, &one, &[0], 1.0).unwrap();
        assert_eq!(glued.len(), 2);
        assert_eq!(glued.d(0, 1), 1.0);
    }

    #[test]
    fn glue_with_huge_r_preserves_x() {
        let g = WeightedGraph::<f64>::unit(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let m = shortest_path_metric(&g).unwrap();
        let glued = glue_metric(&m, &m, &[0, 1, 2, 3], 100.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(glued.d(i, j), m.d(i, j));
            }
        }
        // restriction to Y always equals d_Y
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(glued.d(4 + i, 4 + j), m.d(i, j));
            }
        }
        // cross distances through the bridge
        assert!(glued.d(0, 4) <= 100.0);
    }

    #[test]
    fn glue_reproduces_magnification_shape() {
        // Gluing X to a single-point Y with bridge weight r halves into the
        // magnification pattern: d(x, x') through Y is at most 2r, so for
        // r large the X-restriction is d_X, and d(x, y) = r exactly.
        let m = metric_from(
            4,
            &[
                &[0.0, 1.0, 2.0, 1.0],
                &[1.0, 0.0, 1.0, 2.0],
                &[2.0, 1.0, 0.0, 1.0],
                &[1.0, 2.0, 1.0, 0.0],
            ],
        );
        let one = metric_from(1, &[&[0.0]]);
        let glued = glue_metric(&m, &one, &[0, 0, 0, 0], 3.0).unwrap();
        let rep = validate_metric(&glued, &1e-12, ValidationMode::Metric).unwrap();
        assert!(rep.pass);
        for i in 0..4 {
            assert_eq!(glued.d(i, 4), 3.0);
        }
    }

    #[test]
    fn twisted_cube_cases_n2() {
        let tc = twisted_cube_metric(2, 1.0, 1.0, 1.0).unwrap();
        assert!(tc.rs_condition_ok);
        let m = &tc.metric;
        // layer 0, hamming 2: 2^(1/2)
        assert!((m.d(tc.index(0b00, 0), tc.index(0b11, 0)) - 2f64.sqrt()).abs() < 1e-15);
        // layer 1, hamming 2: min(2, 2 + sqrt 2) = 2
        assert_eq!(m.d(tc.index(0b00, 1), tc.index(0b11, 1)), 2.0);
        // cross layers, same word: r
        assert_eq!(m.d(tc.index(0b01, 0), tc.index(0b01, 1)), 1.0);
    }

    #[test]
    fn twisted_cube_n3_is_a_metric() {
        let tc = twisted_cube_metric(3, 1.0, 1.0, 1.0).unwrap();
        let rep = validate_metric(&tc.metric, &1e-12, ValidationMode::Metric).unwrap();
        assert!(rep.pass, "violations: {:?}", rep.violations);
    }

    #[test]
    fn twisted_cube_layer0_is_snowflaked_hamming() {
        let alpha = 0.8;
        let tc = twisted_cube_metric(3, alpha, 2.0, 1.0).unwrap();
        for a in 0..8u32 {
            for b in 0..8u32 {
                let h = (a ^ b).count_ones() as f64;
                let expect = h.powf(1.0 / (2.0 * alpha));
                let got = tc
                    .metric
                    .d(tc.index(a, 0), tc.index(b, 0));
                assert!((got - expect).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rs_condition_examples() {
        assert!(check_rs_condition(1.0, 1.0, 1.0).unwrap()); // 8 >= 3
        assert!(check_rs_condition(1.0, 4f64.powf(0.25), 4f64.powf(-0.25)).unwrap());
        assert!(!check_rs_condition(1.0, 0.1, 0.1).unwrap()); // 0.08 < 3
        assert!(check_rs_condition(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn guard_on_large_twisted_cube() {
        assert!(matches!(
            twisted_cube_metric(15, 1.0, 1.0, 1.0),
            Err(Error::Capacity(_))
        ));
    }
}
