//! The Wasserstein-1 (earthmover) norm on the mean-zero vectors over a finite
//! metric: primal transport value with an explicit plan, dual Kantorovich
//! potential, sandwich bounds, and the Wasserstein Poincaré inequality for
//! expanders.

use crate::graph::WeightedGraph;
use crate::metric::{self, FiniteMetric, SubsetHandle};
use crate::opt::{min_cost_flow, FlowArc, FlowNetwork};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// An element of R_0^X: coordinates over the points of a metric, summing to
/// zero (exactly in rational mode, to 1e-12 relative in float mode).
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure<R: Scalar> {
    values: Vec<R>,
}

impl<R: Scalar> SignedMeasure<R> {
    pub fn new(values: Vec<R>) -> Result<Self> {
        let total = scalar::sum(&values);
        let l1 = scalar::sum(&values.iter().map(|v| v.abs()).collect::<Vec<_>>());
        let tol = if R::EXACT {
            R::zero()
        } else {
            R::from_f64(1e-12) * (R::one() + l1)
        };
        if total.abs() > tol {
            return Err(Error::Domain(format!(
                "signed measure sums to {}, not zero",
                total.to_f64()
            )));
        }
        Ok(SignedMeasure { values })
    }

    pub fn zero(n: usize) -> Self {
        SignedMeasure {
            values: vec![R::zero(); n],
        }
    }

    /// e_x - e_y.
    pub fn point_diff(n: usize, x: usize, y: usize) -> Result<Self> {
        if x >= n || y >= n {
            return Err(Error::Argument("point index out of range".into()));
        }
        let mut values = vec![R::zero(); n];
        values[x] = values[x].clone() + R::one();
        values[y] = values[y].clone() - R::one();
        Ok(SignedMeasure { values })
    }

    /// e_x - (1/n) * sum of all unit masses: the expander boundary vector.
    pub fn centered_point(n: usize, x: usize) -> Result<Self> {
        if x >= n {
            return Err(Error::Argument("point index out of range".into()));
        }
        let avg = R::one() / R::from_int(n as i64);
        let mut values = vec![-avg; n];
        values[x] = values[x].clone() + R::one();
        SignedMeasure::new(values)
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1_norm(&self) -> R {
        scalar::sum(&self.values.iter().map(|v| v.abs()).collect::<Vec<_>>())
    }

    pub fn scale(&self, lambda: &R) -> Self {
        SignedMeasure {
            values: self
                .values
                .iter()
                .map(|v| v.clone() * lambda.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Shape("signed measure dimension mismatch".into()));
        }
        Ok(SignedMeasure {
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Shape("signed measure dimension mismatch".into()));
        }
        Ok(SignedMeasure {
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    /// (f^+, f^-): positive and negative parts, both nonnegative.
    pub fn parts(&self) -> (Vec<R>, Vec<R>) {
        let pos = self
            .values
            .iter()
            .map(|v| scalar::max(v.clone(), R::zero()))
            .collect();
        let neg = self
            .values
            .iter()
            .map(|v| scalar::max(-v.clone(), R::zero()))
            .collect();
        (pos, neg)
    }
}

#[derive(Debug, Clone)]
pub struct TransportPlan<R: Scalar> {
    /// Nonnegative coupling matrix over X x X; rows marginal to the source,
    /// columns to the target.
    pub plan: Vec<Vec<R>>,
    pub cost: R,
}

#[derive(Debug, Clone)]
pub struct LipschitzPotential<R: Scalar> {
    /// 1-Lipschitz dual certificate: sum f·g equals the transport value.
    pub g: Vec<R>,
}

fn tol<R: Scalar>() -> R {
    if R::EXACT {
        R::zero()
    } else {
        R::from_f64(1e-12)
    }
}

/// Bipartite min-cost-flow transport between the residual parts of mu and nu
/// (shared mass stays in place on the diagonal). Returns (cost, plan,
/// potential), the potential being the McShane envelope of the flow's sink
/// potentials, repaired by a tight-closure pass.
fn bipartite_transport<R: Scalar>(
    mu: &[R],
    nu: &[R],
    d: &FiniteMetric<R>,
) -> Result<(R, Vec<Vec<R>>, Vec<R>)> {
    let n = d.len();
    let eps = tol::<R>();
    let mut plan = vec![vec![R::zero(); n]; n];
    let mut mu_res = mu.to_vec();
    let mut nu_res = nu.to_vec();
    for i in 0..n {
        let common = scalar::min(mu_res[i].clone(), nu_res[i].clone());
        if common > R::zero() {
            plan[i][i] = common.clone();
            mu_res[i] = mu_res[i].clone() - common.clone();
            nu_res[i] = nu_res[i].clone() - common;
        }
    }
    let srcs: Vec<usize> = (0..n).filter(|&i| mu_res[i] > eps).collect();
    let snks: Vec<usize> = (0..n).filter(|&j| nu_res[j] > eps).collect();
    if srcs.is_empty() || snks.is_empty() {
        return Ok((R::zero(), plan, vec![R::zero(); n]));
    }
    let mut supplies = Vec::with_capacity(srcs.len() + snks.len());
    for &i in &srcs {
        supplies.push(mu_res[i].clone());
    }
    for &j in &snks {
        supplies.push(-nu_res[j].clone());
    }
    let mut arcs = Vec::with_capacity(srcs.len() * snks.len());
    for (a, &i) in srcs.iter().enumerate() {
        for (b, &j) in snks.iter().enumerate() {
            arcs.push(FlowArc {
                from: a,
                to: srcs.len() + b,
                cost: d.d(i, j),
                capacity: None,
            });
        }
    }
    let sol = min_cost_flow(&FlowNetwork {
        num_nodes: srcs.len() + snks.len(),
        supplies,
        arcs,
    })?;
    for (a, &i) in srcs.iter().enumerate() {
        for (b, &j) in snks.iter().enumerate() {
            let f = sol.flows[a * snks.len() + b].clone();
            if f > R::zero() {
                plan[i][j] = plan[i][j].clone() + f;
            }
        }
    }
    // McShane envelope of the sink potentials: g(z) = min over sinks y of
    // (-pi(y) + d(z,y)) is 1-Lipschitz and matches -pi on every support node,
    // so complementary slackness survives intact
    let g_raw: Vec<R> = (0..n)
        .map(|z| {
            let mut best: Option<R> = None;
            for (b, &j) in snks.iter().enumerate() {
                let v = -sol.potentials[srcs.len() + b].clone() + d.d(z, j);
                best = Some(match best {
                    None => v,
                    Some(cur) => scalar::min(cur, v),
                });
            }
            best.unwrap()
        })
        .collect();
    // tight-closure repair pass; a fixpoint already, but re-applied defensively
    let g: Vec<R> = (0..n)
        .map(|x| {
            let mut best = g_raw[x].clone();
            for y in 0..n {
                best = scalar::min(best, g_raw[y].clone() + d.d(x, y));
            }
            best
        })
        .collect();
    Ok((sol.cost, plan, g))
}

/// W1 distance between equal-mass nonnegative measures, with the optimal plan.
pub fn w1_distance<R: Scalar>(
    mu: &[R],
    nu: &[R],
    d: &FiniteMetric<R>,
) -> Result<(R, TransportPlan<R>)> {
    let n = d.len();
    if mu.len() != n || nu.len() != n {
        return Err(Error::Shape("measure dimension != metric size".into()));
    }
    let eps = tol::<R>();
    for v in mu.iter().chain(nu.iter()) {
        if *v < -eps.clone() {
            return Err(Error::Argument("measures must be nonnegative".into()));
        }
    }
    let mass_mu = scalar::sum(mu);
    let mass_nu = scalar::sum(nu);
    let scale = R::one() + mass_mu.abs() + mass_nu.abs();
    if (mass_mu - mass_nu).abs() > eps.clone() * scale {
        return Err(Error::Argument("measures have different total mass".into()));
    }
    let (cost, plan, _) = bipartite_transport(mu, nu, d)?;
    check_marginals(&plan, mu, nu)?;
    Ok((cost.clone(), TransportPlan { plan, cost }))
}

fn check_marginals<R: Scalar>(plan: &[Vec<R>], mu: &[R], nu: &[R]) -> Result<()> {
    let n = mu.len();
    let eps = if R::EXACT {
        R::zero()
    } else {
        R::from_f64(1e-9)
    };
    for i in 0..n {
        let row = scalar::sum(&plan[i]);
        if (row - mu[i].clone()).abs() > eps.clone() * (R::one() + mu[i].abs()) {
            return Err(Error::Internal(format!("plan row {i} misses its marginal")));
        }
    }
    for j in 0..n {
        let col = scalar::sum(&(0..n).map(|i| plan[i][j].clone()).collect::<Vec<_>>());
        if (col - nu[j].clone()).abs() > eps.clone() * (R::one() + nu[j].abs()) {
            return Err(Error::Internal(format!(
                "plan column {j} misses its marginal"
            )));
        }
    }
    Ok(())
}

/// The W1 norm of f in R_0^X: W1(f^+, f^-), with the optimal plan and a
/// 1-Lipschitz Kantorovich potential certifying the value.
pub fn w1_norm<R: Scalar>(
    f: &SignedMeasure<R>,
    d: &FiniteMetric<R>,
) -> Result<(R, TransportPlan<R>, LipschitzPotential<R>)> {
    let n = d.len();
    if f.len() != n {
        return Err(Error::Shape("measure dimension != metric size".into()));
    }
    let (pos, neg) = f.parts();
    let (cost, plan, g) = bipartite_transport(&pos, &neg, d)?;
    check_marginals(&plan, &pos, &neg)?;
    // dual certificate checks
    let eps = if R::EXACT {
        R::zero()
    } else {
        R::from_f64(1e-9)
    };
    for x in 0..n {
        for y in (x + 1)..n {
            let gap = (g[x].clone() - g[y].clone()).abs() - d.d(x, y);
            if gap > eps.clone() * (R::one() + d.d(x, y).abs()) {
                return Err(Error::Internal(format!(
                    "potential violates 1-Lipschitz at ({x},{y}) by {}",
                    gap.to_f64()
                )));
            }
        }
    }
    let pairing = scalar::sum(
        &(0..n)
            .map(|x| f.values()[x].clone() * g[x].clone())
            .collect::<Vec<_>>(),
    );
    if (pairing - cost.clone()).abs() > eps * (R::one() + cost.abs()) {
        return Err(Error::Internal(
            "potential does not certify the transport value".into(),
        ));
    }
    Ok((cost.clone(), TransportPlan { plan, cost }, LipschitzPotential { g }))
}

#[derive(Debug, Clone)]
pub struct SandwichReport<R: Scalar> {
    pub l1: R,
    pub w1: R,
    /// (min positive distance / 2) * l1
    pub lower: R,
    /// (diameter / 2) * l1
    pub upper: R,
    pub lower_slack: R,
    pub upper_slack: R,
    pub pass: bool,
}

/// Checks (min+ d / 2)·||f||_1 <= ||f||_W1 <= (diam/2)·||f||_1.
pub fn w1_sandwich_check<R: Scalar>(
    f: &SignedMeasure<R>,
    d: &FiniteMetric<R>,
) -> Result<SandwichReport<R>> {
    let (w1, _, _) = w1_norm(f, d)?;
    let l1 = f.l1_norm();
    let half = R::one() / scalar::two::<R>();
    let min_pos = d.min_positive_distance().unwrap_or_else(R::zero);
    let lower = min_pos * half.clone() * l1.clone();
    let upper = d.diameter() * half * l1.clone();
    let eps = if R::EXACT {
        R::zero()
    } else {
        R::from_f64(1e-9) * (R::one() + w1.abs())
    };
    let lower_slack = w1.clone() - lower.clone();
    let upper_slack = upper.clone() - w1.clone();
    let pass = lower_slack >= -eps.clone() && upper_slack >= -eps;
    Ok(SandwichReport {
        l1,
        w1,
        lower,
        upper,
        lower_slack,
        upper_slack,
        pass,
    })
}

#[derive(Debug, Clone)]
pub struct MagnifiedSandwichReport<R: Scalar> {
    pub l1: R,
    pub w1: R,
    /// r * l1
    pub lower: R,
    /// (r + diam(X)/2) * l1
    pub upper: R,
    pub pass: bool,
}

/// The magnified form of the sandwich: for f supported on S inside the
/// r-magnification X_r(S), r·||f||_1 <= ||f||_W1 <= (r + diam(X,d)/2)·||f||_1.
pub fn w1_magnified_sandwich_check<R: Scalar>(
    f: &SignedMeasure<R>,
    x: &FiniteMetric<R>,
    s: &SubsetHandle,
    r: R,
) -> Result<MagnifiedSandwichReport<R>> {
    if f.len() != x.len() {
        return Err(Error::Shape("measure dimension != metric size".into()));
    }
    let member = s.membership(x.len());
    for (i, v) in f.values().iter().enumerate() {
        if !member[i] && !v.is_zero() {
            return Err(Error::Domain(format!(
                "f must be supported on S; point {i} carries mass"
            )));
        }
    }
    let mag = metric::magnify(x, s, r.clone())?;
    let (w1, _, _) = w1_norm(f, &mag)?;
    let l1 = f.l1_norm();
    let half = R::one() / scalar::two::<R>();
    let lower = r.clone() * l1.clone();
    let upper = (r + x.diameter() * half) * l1.clone();
    let eps = if R::EXACT {
        R::zero()
    } else {
        R::from_f64(1e-9) * (R::one() + w1.abs())
    };
    let pass = w1.clone() + eps.clone() >= lower && w1 <= upper.clone() + eps;
    Ok(MagnifiedSandwichReport {
        l1,
        w1,
        lower,
        upper,
        pass,
    })
}

#[derive(Debug, Clone)]
pub struct PoincareReport<R: Scalar> {
    /// (1/n^2) * sum over ordered pairs of ||F(x)-F(y)||_W1.
    pub lhs: R,
    /// factor * edge average.
    pub rhs: R,
    /// (2r + diam(S, d_G)) / ((2r+1) * phi).
    pub factor: R,
    /// (1/|E|) * sum over edges of ||F(x)-F(y)||_W1.
    pub edge_average: R,
    pub pass: bool,
}

/// Wasserstein Poincaré inequality for F: V -> R_0^S over the magnified
/// ground metric d_{G_r(S)} restricted to S; phi must be a verified lower
/// bound on the edge expansion, in (0,1].
pub fn poincare_check<R: Scalar>(
    g: &WeightedGraph<R>,
    s: &SubsetHandle,
    r: R,
    f_map: &[SignedMeasure<R>],
    phi: R,
) -> Result<PoincareReport<R>> {
    let n = g.n();
    if phi <= R::zero() || phi > R::one() {
        return Err(Error::Domain(format!(
            "phi = {} outside (0, 1]",
            phi.to_f64()
        )));
    }
    if f_map.len() != n {
        return Err(Error::Shape("F must assign a measure to every vertex".into()));
    }
    if s.is_empty() {
        return Err(Error::Argument("S must be nonempty".into()));
    }
    for fm in f_map {
        if fm.len() != s.len() {
            return Err(Error::Shape("F values must live in R_0^S".into()));
        }
    }
    let base = metric::shortest_path_metric(g)?;
    let ground = metric::magnify(&base, s, r.clone())?.restrict(s);

    let norm = |a: &SignedMeasure<R>, b: &SignedMeasure<R>| -> Result<R> {
        let (v, _, _) = w1_norm(&a.sub(b)?, &ground)?;
        Ok(v)
    };
    let mut pair_sum = R::zero();
    for x in 0..n {
        for y in (x + 1)..n {
            pair_sum = pair_sum + scalar::two::<R>() * norm(&f_map[x], &f_map[y])?;
        }
    }
    let lhs = pair_sum / (R::from_int(n as i64) * R::from_int(n as i64));
    let mut edge_sum = R::zero();
    for (u, v, _) in g.edges() {
        edge_sum = edge_sum + norm(&f_map[*u], &f_map[*v])?;
    }
    let edge_average = edge_sum / R::from_int(g.edge_count() as i64);
    let two_r = scalar::two::<R>() * r;
    let factor = (two_r.clone() + base.diameter_on(s)) / ((two_r + R::one()) * phi);
    let rhs = factor.clone() * edge_average.clone();
    let eps = if R::EXACT {
        R::zero()
    } else {
        R::from_f64(1e-9) * (R::one() + rhs.abs())
    };
    let pass = lhs <= rhs.clone() + eps;
    Ok(PoincareReport {
        lhs,
        rhs,
        factor,
        edge_average,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opt::{solve_lp, LinearProgram, LpStatus, Sense};
    use crate::scalar::Rational;
    use num_traits::{One, Zero};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c4_metric() -> FiniteMetric<f64> {
        let g = WeightedGraph::<f64>::unit(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        metric::shortest_path_metric(&g).unwrap()
    }

    fn c4_metric_exact() -> FiniteMetric<Rational> {
        let g = WeightedGraph::<Rational>::new(
            4,
            [(0, 1), (1, 2), (2, 3), (0, 3)]
                .iter()
                .map(|&(u, v)| (u, v, Rational::one()))
                .collect(),
        )
        .unwrap();
        metric::shortest_path_metric(&g).unwrap()
    }

    /// Random metric with entries in [1,2]: triangle holds automatically.
    fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetric<f64> {
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = rng.random_range(1.0..2.0);
                dist[i][j] = v;
                dist[j][i] = v;
            }
        }
        FiniteMetric::from_matrix((0..n).map(|i| i.to_string()).collect(), dist).unwrap()
    }

    fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> SignedMeasure<f64> {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean: f64 = v.iter().sum::<f64>() / n as f64;
        for x in v.iter_mut() {
            *x -= mean;
        }
        SignedMeasure::new(v).unwrap()
    }

    /// Full coupling LP over all |X|^2 variables: the independent oracle.
    fn coupling_lp_oracle(f: &SignedMeasure<f64>, d: &FiniteMetric<f64>) -> f64 {
        let n = d.len();
        let (pos, neg) = f.parts();
        let mut lp = LinearProgram::<f64>::new(n * n, false);
        for i in 0..n {
            for j in 0..n {
                lp.objective[i * n + j] = d.d(i, j);
            }
        }
        for i in 0..n {
            lp.add_row((0..n).map(|j| (i * n + j, 1.0)).collect(), Sense::Eq, pos[i]);
        }
        for j in 0..n {
            lp.add_row((0..n).map(|i| (i * n + j, 1.0)).collect(), Sense::Eq, neg[j]);
        }
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        sol.value
    }

    #[test]
    fn identical_measures_cost_zero() {
        let d = c4_metric();
        let mu = vec![0.25; 4];
        let (v, plan) = w1_distance(&mu, &mu, &d).unwrap();
        assert_eq!(v, 0.0);
        for i in 0..4 {
            assert_eq!(plan.plan[i][i], 0.25);
        }
    }

    #[test]
    fn dirac_to_dirac_is_distance() {
        let d = c4_metric();
        let mut mu = vec![0.0; 4];
        let mut nu = vec![0.0; 4];
        mu[0] = 1.0;
        nu[2] = 1.0;
        let (v, _) = w1_distance(&mu, &nu, &d).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn mass_mismatch_is_an_error() {
        let d = c4_metric();
        let mu = vec![1.0, 0.0, 0.0, 0.0];
        let nu = vec![0.0, 0.5, 0.0, 0.0];
        assert!(matches!(
            w1_distance(&mu, &nu, &d),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn point_diff_norm_is_distance_exact() {
        let d = c4_metric_exact();
        for x in 0..4 {
            for y in 0..4 {
                if x == y {
                    continue;
                }
                let f = SignedMeasure::<Rational>::point_diff(4, x, y).unwrap();
                let (v, _, pot) = w1_norm(&f, &d).unwrap();
                assert_eq!(v, d.d(x, y));
                // potential certifies exactly
                let pairing: Rational = f
                    .values()
                    .iter()
                    .zip(pot.g.iter())
                    .map(|(a, b)| a.clone() * b.clone())
                    .fold(Rational::zero(), |acc, t| acc + t);
                assert_eq!(pairing, v);
            }
        }
    }

    #[test]
    fn zero_measure_has_zero_norm() {
        let d = c4_metric();
        let f = SignedMeasure::<f64>::zero(4);
        let (v, _, _) = w1_norm(&f, &d).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn c4_opposite_pairs_norm_and_potential() {
        let d = c4_metric_exact();
        // f = e_0 + e_2 - e_1 - e_3
        let f = SignedMeasure::new(vec![
            Rational::one(),
            -Rational::one(),
            Rational::one(),
            -Rational::one(),
        ])
        .unwrap();
        let (v, _, pot) = w1_norm(&f, &d).unwrap();
        assert_eq!(v, Rational::from_int(2));
        // the optimal potential is unique up to a constant: (1,0,1,0)
        let base = pot.g[1].clone();
        let shifted: Vec<Rational> = pot.g.iter().map(|x| x.clone() - base.clone()).collect();
        assert_eq!(
            shifted,
            vec![
                Rational::one(),
                Rational::zero(),
                Rational::one(),
                Rational::zero()
            ]
        );
    }

    #[test]
    fn norm_matches_coupling_lp_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.random_range(2..=6);
            let d = random_metric(&mut rng, n);
            let f = random_measure(&mut rng, n);
            let (v, _, _) = w1_norm(&f, &d).unwrap();
            let oracle = coupling_lp_oracle(&f, &d);
            assert!(
                (v - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()),
                "flow {v} vs LP {oracle}"
            );
        }
    }

    #[test]
    fn norm_triangle_inequality_and_homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let n = rng.random_range(2..=7);
            let d = random_metric(&mut rng, n);
            let f = random_measure(&mut rng, n);
            let g = random_measure(&mut rng, n);
            let (vf, _, _) = w1_norm(&f, &d).unwrap();
            let (vg, _, _) = w1_norm(&g, &d).unwrap();
            let (vfg, _, _) = w1_norm(&f.add(&g).unwrap(), &d).unwrap();
            assert!(vfg <= vf + vg + 1e-9);
            let lambda = rng.random_range(-3.0..3.0);
            let (vs, _, _) = w1_norm(&f.scale(&lambda), &d).unwrap();
            assert!((vs - lambda.abs() * vf).abs() <= 1e-12 * (1.0 + vf));
        }
    }

    #[test]
    fn sandwich_two_point_space_tight() {
        let d = FiniteMetric::from_matrix(
            vec!["x".into(), "y".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap();
        let f = SignedMeasure::<f64>::point_diff(2, 0, 1).unwrap();
        let rep = w1_sandwich_check(&f, &d).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.lower, 1.0);
        assert_eq!(rep.w1, 1.0);
        assert_eq!(rep.upper, 1.0);
    }

    #[test]
    fn sandwich_random_on_c4() {
        let d = c4_metric();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let f = random_measure(&mut rng, 4);
            let rep = w1_sandwich_check(&f, &d).unwrap();
            assert!(rep.pass, "sandwich failed: {rep:?}");
        }
    }

    #[test]
    fn magnified_sandwich_unit_pair() {
        // two points at distance 1, S = both, r = 3: W1 = 7, bounds 6 <= 7 <= 7
        let x = FiniteMetric::from_matrix(
            vec!["x".into(), "y".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap();
        let s = SubsetHandle::full(2);
        let f = SignedMeasure::<f64>::point_diff(2, 0, 1).unwrap();
        let rep = w1_magnified_sandwich_check(&f, &x, &s, 3.0).unwrap();
        assert_eq!(rep.l1, 2.0);
        assert_eq!(rep.w1, 7.0);
        assert_eq!(rep.lower, 6.0);
        assert_eq!(rep.upper, 7.0);
        assert!(rep.pass);
    }

    #[test]
    fn magnified_sandwich_rejects_off_support_mass() {
        let x = c4_metric();
        let s = SubsetHandle::new(vec![0, 1], 4).unwrap();
        let f = SignedMeasure::<f64>::point_diff(4, 0, 2).unwrap();
        assert!(matches!(
            w1_magnified_sandwich_check(&f, &x, &s, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn poincare_constant_map_passes() {
        let g = WeightedGraph::<f64>::unit(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let s = SubsetHandle::full(4);
        let f_map: Vec<SignedMeasure<f64>> =
            (0..4).map(|_| SignedMeasure::zero(4)).collect();
        let rep = poincare_check(&g, &s, 1.0, &f_map, 1.0).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.rhs, 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn poincare_random_assignment_on_c4() {
        let g = WeightedGraph::<f64>::unit(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let s = SubsetHandle::full(4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            // F(x) = e_{sigma(x)} - avg over S
            let f_map: Vec<SignedMeasure<f64>> = (0..4)
                .map(|_| {
                    let sigma = rng.random_range(0..4);
                    SignedMeasure::centered_point(4, sigma).unwrap()
                })
                .collect();
            let rep = poincare_check(&g, &s, 1.0, &f_map, 1.0).unwrap();
            assert!(rep.pass, "Poincaré failed: {rep:?}");
        }
    }

    #[test]
    fn poincare_rejects_bad_phi() {
        let g = WeightedGraph::<f64>::unit(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = SubsetHandle::full(3);
        let f_map: Vec<SignedMeasure<f64>> =
            (0..3).map(|_| SignedMeasure::zero(3)).collect();
        assert!(matches!(
            poincare_check(&g, &s, 1.0, &f_map, 1.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            poincare_check(&g, &s, 1.0, &f_map, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn duality_gap_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let n = rng.random_range(2..=8);
            let d = random_metric(&mut rng, n);
            let f = random_measure(&mut rng, n);
            // w1_norm internally certifies duality to 1e-9; reaching Ok is the test
            let (v, plan, _) = w1_norm(&f, &d).unwrap();
            // plan cost re-check
            let direct: f64 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| plan.plan[i][j] * d.d(i, j))
                .sum();
            assert!((direct - v).abs() <= 1e-9 * (1.0 + v));
        }
    }
}
