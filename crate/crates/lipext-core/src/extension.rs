//! Minimum Lipschitz/Hölder extension constants: exact LP for polyhedral
//! targets (real line, ell_1, ell_inf, W1) and subgradient descent upper
//! bounds for Euclidean targets, plus the McShane formula as ground truth
//! for the real line.

use crate::metric::{FiniteMetric, SubsetHandle};
use crate::opt::{
    minimize_max_ratio, solve_lp, LinearProgram, LpStatus, MaxRatioProblem, Sense, VarBounds,
};
use crate::wasserstein::{w1_norm, SignedMeasure};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum Target {
    RealLine,
    Ell1(usize),
    EllInf(usize),
    Euclidean(usize),
    /// Target W1(S', d'): vectors are mean-zero coordinates over d'.
    Wasserstein(FiniteMetric<f64>),
}

impl Target {
    pub fn dim(&self) -> usize {
        match self {
            Target::RealLine => 1,
            Target::Ell1(k) | Target::EllInf(k) | Target::Euclidean(k) => *k,
            Target::Wasserstein(m) => m.len(),
        }
    }

    /// Norm of a difference vector in the target space.
    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        match self {
            Target::RealLine => Ok(v[0].abs()),
            Target::Ell1(_) => Ok(v.iter().map(|x| x.abs()).sum()),
            Target::EllInf(_) => Ok(v.iter().fold(0.0, |a, x| a.max(x.abs()))),
            Target::Euclidean(_) => Ok(v.iter().map(|x| x * x).sum::<f64>().sqrt()),
            Target::Wasserstein(d) => {
                // project out tiny sum drift from solver output
                let mean = v.iter().sum::<f64>() / v.len() as f64;
                let centered: Vec<f64> = v.iter().map(|x| x - mean).collect();
                let f = SignedMeasure::new(centered)?;
                let (cost, _, _) = w1_norm(&f, d)?;
                Ok(cost)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExtensionProblem {
    pub ambient: FiniteMetric<f64>,
    pub subset: SubsetHandle,
    pub alpha: f64,
    pub target: Target,
    /// One target vector per subset member, in `subset.indices()` order.
    pub boundary: Vec<Vec<f64>>,
}

impl ExtensionProblem {
    pub fn new(
        ambient: FiniteMetric<f64>,
        subset: SubsetHandle,
        alpha: f64,
        target: Target,
        boundary: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0,1], got {alpha}")));
        }
        if subset.is_empty() {
            return Err(Error::Argument("subset must be nonempty".into()));
        }
        if subset.indices().iter().any(|&i| i >= ambient.len()) {
            return Err(Error::Argument("subset index out of range".into()));
        }
        if boundary.len() != subset.len() {
            return Err(Error::Shape("boundary size != subset size".into()));
        }
        let k = target.dim();
        if boundary.iter().any(|v| v.len() != k) {
            return Err(Error::Shape("boundary vector has wrong dimension".into()));
        }
        if let Target::Wasserstein(_) = target {
            for v in &boundary {
                let l1: f64 = v.iter().map(|x| x.abs()).sum();
                if v.iter().sum::<f64>().abs() > 1e-9 * (1.0 + l1) {
                    return Err(Error::Domain(
                        "W1-target boundary values must sum to zero".into(),
                    ));
                }
            }
        }
        Ok(ExtensionProblem {
            ambient,
            subset,
            alpha,
            target,
            boundary,
        })
    }

    /// d(x,y)^alpha on the ambient space.
    fn denom(&self, x: usize, y: usize) -> f64 {
        self.ambient.d(x, y).powf(self.alpha)
    }

    /// Position of each ambient point inside S, if any.
    fn subset_pos(&self) -> Vec<Option<usize>> {
        let mut pos = vec![None; self.ambient.len()];
        for (p, &i) in self.subset.indices().iter().enumerate() {
            pos[i] = Some(p);
        }
        pos
    }

    /// Hölder constant of the boundary data itself.
    pub fn boundary_constant(&self) -> Result<f64> {
        let idx = self.subset.indices();
        let mut best = 0.0f64;
        for a in 0..idx.len() {
            for b in (a + 1)..idx.len() {
                let diff: Vec<f64> = self.boundary[a]
                    .iter()
                    .zip(&self.boundary[b])
                    .map(|(p, q)| p - q)
                    .collect();
                let num = self.target.norm(&diff)?;
                let den = self.denom(idx[a], idx[b]);
                if den == 0.0 {
                    if num > 0.0 {
                        return Ok(f64::INFINITY);
                    }
                    continue;
                }
                best = best.max(num / den);
            }
        }
        Ok(best)
    }
}

#[derive(Debug, Clone)]
pub struct ExtensionSolution {
    /// One target vector per ambient point.
    pub values: Vec<Vec<f64>>,
    pub constant: f64,
    /// True only when backed by an LP optimality certificate.
    pub optimal: bool,
    pub trace: Vec<f64>,
}

/// Exact max over all unordered pairs of ||F(x)-F(y)|| / d(x,y)^alpha;
/// +infinity when a zero-distance pair carries different values.
pub fn holder_constant(values: &[Vec<f64>], problem: &ExtensionProblem) -> Result<f64> {
    let n = problem.ambient.len();
    if values.len() != n {
        return Err(Error::Shape("values must be total on X".into()));
    }
    let mut best = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            let diff: Vec<f64> = values[x].iter().zip(&values[y]).map(|(p, q)| p - q).collect();
            let num = problem.target.norm(&diff)?;
            let den = problem.denom(x, y);
            if den == 0.0 {
                if num > 0.0 {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            best = best.max(num / den);
        }
    }
    Ok(best)
}

pub const LP_NONZERO_BUDGET: usize = 1_000_000;
const CONSTANT_CHECK_TOL: f64 = 1e-9;

/// Certified minimum extension constant for polyhedral targets, as one LP:
/// minimize t subject to ||F(x)-F(y)|| <= t * d(x,y)^alpha for all pairs,
/// with F fixed to the boundary on S.
pub fn min_extension_polyhedral(problem: &ExtensionProblem) -> Result<ExtensionSolution> {
    let n = problem.ambient.len();
    let k = problem.target.dim();
    let pos = problem.subset_pos();
    let free: Vec<usize> = (0..n).filter(|&x| pos[x].is_none()).collect();
    let free_slot: Vec<Option<usize>> = {
        let mut s = vec![None; n];
        for (i, &x) in free.iter().enumerate() {
            s[x] = Some(i);
        }
        s
    };

    // pairs with at least one free endpoint get full norm encodings
    let free_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| ((x + 1)..n).map(move |y| (x, y)))
        .filter(|&(x, y)| pos[x].is_none() || pos[y].is_none())
        .collect();

    // nonzero estimate before allocating anything big
    let per_pair = match &problem.target {
        Target::RealLine => 2 * 3,
        Target::Ell1(k) => 2 * k * 3 + (k + 1),
        Target::EllInf(k) => 2 * k * 3,
        Target::Euclidean(_) => {
            return Err(Error::Argument(
                "euclidean targets use min_extension_euclidean".into(),
            ))
        }
        Target::Wasserstein(m) => {
            let s = m.len();
            s * (s - 1) * 3 + s * 3
        }
    };
    let estimate = free_pairs.len() * per_pair + free.len() * k;
    if estimate > LP_NONZERO_BUDGET {
        return Err(Error::Capacity(format!(
            "extension LP needs ~{estimate} nonzeros, budget {LP_NONZERO_BUDGET}"
        )));
    }

    // variable layout: t, then k values per free vertex, then per-pair extras
    let t_var = 0usize;
    let val_var = |slot: usize, j: usize| 1 + slot * k + j;
    let mut num_vars = 1 + free.len() * k;
    let mut lp_rows: Vec<(Vec<(usize, f64)>, Sense, f64)> = Vec::new();

    // coefficient-or-constant of coordinate j of F at vertex x
    enum Coord {
        Var(usize),
        Fixed(f64),
    }
    let coord = |x: usize, j: usize| -> Coord {
        match pos[x] {
            Some(p) => Coord::Fixed(problem.boundary[p][j]),
            None => Coord::Var(val_var(free_slot[x].unwrap(), j)),
        }
    };
    // builds the row "sign*(F_x[j] - F_y[j]) + extra <= t*denom" as
    // coefficients and rhs
    let diff_terms = |x: usize, y: usize, j: usize, sign: f64| -> (Vec<(usize, f64)>, f64) {
        let mut coeffs = Vec::new();
        let mut rhs = 0.0;
        match coord(x, j) {
            Coord::Var(v) => coeffs.push((v, sign)),
            Coord::Fixed(c) => rhs -= sign * c,
        }
        match coord(y, j) {
            Coord::Var(v) => coeffs.push((v, -sign)),
            Coord::Fixed(c) => rhs += sign * c,
        }
        (coeffs, rhs)
    };

    let mut free_bounds: Vec<usize> = Vec::new(); // value vars are free
    for slot in 0..free.len() {
        for j in 0..k {
            free_bounds.push(val_var(slot, j));
        }
    }
    let mut pair_extra_base = num_vars;

    for &(x, y) in &free_pairs {
        let den = problem.denom(x, y);
        match &problem.target {
            Target::RealLine => {
                for sign in [1.0, -1.0] {
                    let (mut coeffs, rhs) = diff_terms(x, y, 0, sign);
                    coeffs.push((t_var, -den));
                    lp_rows.push((coeffs, Sense::Le, rhs));
                }
            }
            Target::EllInf(k) => {
                for j in 0..*k {
                    for sign in [1.0, -1.0] {
                        let (mut coeffs, rhs) = diff_terms(x, y, j, sign);
                        coeffs.push((t_var, -den));
                        lp_rows.push((coeffs, Sense::Le, rhs));
                    }
                }
            }
            Target::Ell1(k) => {
                // aux u_j >= |diff_j|, sum u_j <= t*den
                let u_base = pair_extra_base;
                pair_extra_base += *k;
                for j in 0..*k {
                    for sign in [1.0, -1.0] {
                        let (mut coeffs, rhs) = diff_terms(x, y, j, sign);
                        coeffs.push((u_base + j, -1.0));
                        lp_rows.push((coeffs, Sense::Le, rhs));
                    }
                }
                let mut sum_row: Vec<(usize, f64)> = (0..*k).map(|j| (u_base + j, 1.0)).collect();
                sum_row.push((t_var, -den));
                lp_rows.push((sum_row, Sense::Le, 0.0));
            }
            Target::Wasserstein(m) => {
                // flow pi on ordered pairs of S' with divergence F_x - F_y and
                // cost sum d'(u,v) pi(u,v) <= t*den
                let s = m.len();
                let base = pair_extra_base;
                let pi = move |u: usize, v: usize| base + u * s + v;
                pair_extra_base += s * s; // diagonal unused, kept for layout
                for u in 0..s {
                    // sum_v pi(u,v) - sum_v pi(v,u) - (F_x[u]-F_y[u]) = 0
                    let (mut coeffs, rhs) = diff_terms(x, y, u, -1.0);
                    for v in 0..s {
                        if v == u {
                            continue;
                        }
                        coeffs.push((pi(u, v), 1.0));
                        coeffs.push((pi(v, u), -1.0));
                    }
                    lp_rows.push((coeffs, Sense::Eq, rhs));
                }
                let mut cost_row: Vec<(usize, f64)> = Vec::new();
                for u in 0..s {
                    for v in 0..s {
                        if v == u {
                            continue;
                        }
                        cost_row.push((pi(u, v), m.d(u, v)));
                    }
                }
                cost_row.push((t_var, -den));
                lp_rows.push((cost_row, Sense::Le, 0.0));
            }
            Target::Euclidean(_) => unreachable!(),
        }
    }
    num_vars = pair_extra_base;

    // boundary-boundary pairs reduce to scalar lower bounds on t
    let idx = problem.subset.indices();
    for a in 0..idx.len() {
        for b in (a + 1)..idx.len() {
            let diff: Vec<f64> = problem.boundary[a]
                .iter()
                .zip(&problem.boundary[b])
                .map(|(p, q)| p - q)
                .collect();
            let num = problem.target.norm(&diff)?;
            let den = problem.denom(idx[a], idx[b]);
            if den == 0.0 {
                if num > 0.0 {
                    return Err(Error::Infeasible(
                        "boundary differs on a zero-distance pair".into(),
                    ));
                }
                continue;
            }
            lp_rows.push((vec![(t_var, den)], Sense::Ge, num));
        }
    }

    // W1 targets: free values must stay mean-zero
    if let Target::Wasserstein(_) = problem.target {
        for slot in 0..free.len() {
            let coeffs: Vec<(usize, f64)> = (0..k).map(|j| (val_var(slot, j), 1.0)).collect();
            lp_rows.push((coeffs, Sense::Eq, 0.0));
        }
    }

    let mut lp = LinearProgram::<f64>::new(num_vars, false);
    lp.objective[t_var] = 1.0;
    for v in free_bounds {
        lp.bounds[v] = VarBounds::free();
    }
    let nonzeros: usize = lp_rows.iter().map(|(c, _, _)| c.len()).sum();
    if nonzeros > LP_NONZERO_BUDGET {
        return Err(Error::Capacity(format!(
            "extension LP has {nonzeros} nonzeros, budget {LP_NONZERO_BUDGET}"
        )));
    }
    for (coeffs, sense, rhs) in lp_rows {
        lp.add_row(coeffs, sense, rhs);
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!(
            "extension LP ended with status {:?}",
            sol.status
        )));
    }

    let mut values = vec![vec![0.0; k]; n];
    for x in 0..n {
        match pos[x] {
            Some(p) => values[x] = problem.boundary[p].clone(),
            None => {
                let slot = free_slot[x].unwrap();
                for j in 0..k {
                    values[x][j] = sol.primal[val_var(slot, j)];
                }
                if let Target::Wasserstein(_) = problem.target {
                    let mean = values[x].iter().sum::<f64>() / k as f64;
                    for v in values[x].iter_mut() {
                        *v -= mean;
                    }
                }
            }
        }
    }
    let constant = sol.primal[t_var];
    let recomputed = holder_constant(&values, problem)?;
    if (recomputed - constant).abs() > CONSTANT_CHECK_TOL * (1.0 + constant.abs()) {
        return Err(Error::Internal(format!(
            "witness constant {recomputed} disagrees with LP value {constant}"
        )));
    }
    Ok(ExtensionSolution {
        values,
        constant,
        optimal: true,
        trace: Vec::new(),
    })
}

/// Uncertified upper bound on the Euclidean extension constant via
/// multi-restart subgradient descent on the max pair ratio.
pub fn min_extension_euclidean(problem: &ExtensionProblem, seed: u64) -> Result<ExtensionSolution> {
    let k = match problem.target {
        Target::Euclidean(k) => k,
        _ => return Err(Error::Argument("target must be euclidean".into())),
    };
    let n = problem.ambient.len();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let den = problem.denom(x, y);
            if den == 0.0 {
                continue; // forced equal; descent cannot encode it, checked below
            }
            pairs.push((x, y, den));
        }
    }
    let fixed: Vec<(usize, Vec<f64>)> = problem
        .subset
        .indices()
        .iter()
        .enumerate()
        .map(|(p, &x)| (x, problem.boundary[p].clone()))
        .collect();
    let p = MaxRatioProblem {
        dim: k,
        num_points: n,
        pairs,
        fixed,
    };
    let sol = minimize_max_ratio(&p, seed)?;
    let constant = holder_constant(&sol.assignment, problem)?;
    Ok(ExtensionSolution {
        values: sol.assignment,
        constant,
        optimal: false,
        trace: sol.trace,
    })
}

/// McShane/Whitney formula F(x) = min_s (f(s) + L * d(x,s)^alpha): the exact
/// optimal real-line extension with L = the boundary's own Hölder constant.
pub fn mcshane_extension(problem: &ExtensionProblem) -> Result<ExtensionSolution> {
    match problem.target {
        Target::RealLine => {}
        _ => return Err(Error::Argument("mcshane requires the real-line target".into())),
    }
    let l = problem.boundary_constant()?;
    if !l.is_finite() {
        return Err(Error::Infeasible(
            "boundary differs on a zero-distance pair".into(),
        ));
    }
    let idx = problem.subset.indices();
    let n = problem.ambient.len();
    let mut values = vec![vec![0.0]; n];
    let pos = problem.subset_pos();
    for x in 0..n {
        if let Some(p) = pos[x] {
            values[x][0] = problem.boundary[p][0];
            continue;
        }
        values[x][0] = idx
            .iter()
            .enumerate()
            .map(|(p, &s)| problem.boundary[p][0] + l * problem.denom(x, s))
            .fold(f64::INFINITY, f64::min);
    }
    let recomputed = holder_constant(&values, problem)?;
    if (recomputed - l).abs() > CONSTANT_CHECK_TOL * (1.0 + l.abs()) {
        return Err(Error::Internal(format!(
            "McShane witness constant {recomputed} != boundary constant {l}"
        )));
    }
    Ok(ExtensionSolution {
        values,
        constant: l,
        optimal: true,
        trace: Vec::new(),
    })
}
