//! The 0-Extension problem and its relaxation chain: OPT by exhaustive
//! enumeration, MET (semi-metric LP) and EMD (earthmover LP), with the
//! MET <= EMD <= OPT audit.

use crate::metric::{self, FiniteMetric, SubsetHandle, ValidationMode};
use crate::opt::{solve_lp, LinearProgram, LpStatus, Sense};
use crate::scalar::{self, Scalar};
use crate::wasserstein;
use crate::{Error, Result};

/// Graph with nonnegative edge weights (zero allowed, unlike WeightedGraph),
/// a terminal set T, and a metric d_T on the terminals.
#[derive(Debug, Clone)]
pub struct ZeroExtensionInstance<R: Scalar> {
    n: usize,
    edges: Vec<(usize, usize, R)>,
    terminals: SubsetHandle,
    d_t: FiniteMetric<R>,
}

impl<R: Scalar> ZeroExtensionInstance<R> {
    pub fn new(
        n: usize,
        edges: Vec<(usize, usize, R)>,
        terminals: SubsetHandle,
        d_t: FiniteMetric<R>,
    ) -> Result<Self> {
        if terminals.is_empty() {
            return Err(Error::Argument("terminal set must be nonempty".into()));
        }
        if terminals.indices().iter().any(|&t| t >= n) {
            return Err(Error::Argument("terminal index out of range".into()));
        }
        if d_t.len() != terminals.len() {
            return Err(Error::Shape("d_T size != number of terminals".into()));
        }
        let tol = if R::EXACT {
            R::zero()
        } else {
            R::from_f64(1e-9)
        };
        let report = metric::validate_metric(&d_t, &tol, ValidationMode::Metric)?;
        if !report.pass {
            return Err(Error::Domain(format!(
                "d_T is not a metric: {:?}",
                report.violations.first()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::Argument(format!("bad edge ({u},{v})")));
            }
            if w < R::zero() {
                return Err(Error::Argument("edge weights must be nonnegative".into()));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::Argument(format!("duplicate edge {key:?}")));
            }
            normalized.push((key.0, key.1, w));
        }
        normalized.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        Ok(ZeroExtensionInstance {
            n,
            edges: normalized,
            terminals,
            d_t,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, R)] {
        &self.edges
    }

    pub fn terminals(&self) -> &SubsetHandle {
        &self.terminals
    }

    pub fn d_t(&self) -> &FiniteMetric<R> {
        &self.d_t
    }

    /// Position of vertex v inside T, if terminal.
    fn terminal_pos(&self) -> Vec<Option<usize>> {
        let mut pos = vec![None; self.n];
        for (p, &t) in self.terminals.indices().iter().enumerate() {
            pos[t] = Some(p);
        }
        pos
    }

    fn free_vertices(&self) -> Vec<usize> {
        let pos = self.terminal_pos();
        (0..self.n).filter(|&v| pos[v].is_none()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ZeroExtensionResult<R: Scalar> {
    pub opt: R,
    pub met: R,
    pub emd: R,
    /// Assignment V -> position in T (terminals map to themselves).
    pub opt_partition: Vec<usize>,
    /// Witness semi-metric on V extending d_T.
    pub met_metric: Vec<Vec<R>>,
    /// Witness probability measures on T per vertex (delta at terminals).
    pub emd_measures: Vec<Vec<R>>,
}

pub const OPT_BRUTE_FORCE_BUDGET: f64 = 1e7;

/// Exact 0-Extension optimum by enumerating all |T|^(free) assignments.
pub fn opt_brute_force<R: Scalar>(inst: &ZeroExtensionInstance<R>) -> Result<(R, Vec<usize>)> {
    let k = inst.terminals.len();
    let free = inst.free_vertices();
    let combos = (k as f64).powi(free.len() as i32);
    if combos > OPT_BRUTE_FORCE_BUDGET {
        return Err(Error::Capacity(format!(
            "{k}^{} assignments exceed the {OPT_BRUTE_FORCE_BUDGET:.0} budget",
            free.len()
        )));
    }
    let pos = inst.terminal_pos();
    let mut assign: Vec<usize> = (0..inst.n).map(|v| pos[v].unwrap_or(0)).collect();
    let mut digits = vec![0usize; free.len()];
    let mut best: Option<(R, Vec<usize>)> = None;
    loop {
        for (slot, &v) in free.iter().enumerate() {
            assign[v] = digits[slot];
        }
        let cost = scalar::sum(
            &inst
                .edges
                .iter()
                .map(|(u, v, w)| w.clone() * inst.d_t.d(assign[*u], assign[*v]))
                .collect::<Vec<_>>(),
        );
        let better = match &best {
            None => true,
            Some((b, _)) => cost < *b,
        };
        if better {
            best = Some((cost, assign.clone()));
        }
        // increment the mixed-radix counter
        let mut slot = 0;
        loop {
            if slot == digits.len() {
                let (value, partition) = best.unwrap();
                return Ok((value, partition));
            }
            digits[slot] += 1;
            if digits[slot] < k {
                break;
            }
            digits[slot] = 0;
            slot += 1;
        }
    }
}

/// Index map for unordered pairs {u,v} of V that involve a free vertex.
struct PairVars {
    index: Vec<Vec<Option<usize>>>,
    count: usize,
}

impl PairVars {
    fn build(n: usize, pos: &[Option<usize>]) -> Self {
        let mut index = vec![vec![None; n]; n];
        let mut count = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                if pos[u].is_none() || pos[v].is_none() {
                    index[u][v] = Some(count);
                    index[v][u] = Some(count);
                    count += 1;
                }
            }
        }
        PairVars { index, count }
    }

    fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.index[u][v]
    }
}

/// MET relaxation: minimize sum of w(u,v) * delta(u,v) over semi-metrics
/// delta on V with delta restricted to T equal to d_T.
pub fn met_relaxation<R: Scalar>(inst: &ZeroExtensionInstance<R>) -> Result<(R, Vec<Vec<R>>)> {
    let n = inst.n;
    let pos = inst.terminal_pos();
    let vars = PairVars::build(n, &pos);
    // value of the pair {u,v}: Err(var index) or Ok(fixed constant)
    let fixed = |u: usize, v: usize| -> Option<R> {
        match (pos[u], pos[v]) {
            (Some(a), Some(b)) => Some(inst.d_t.d(a, b)),
            _ => None,
        }
    };
    let mut lp = LinearProgram::<R>::new(vars.count, false);
    let mut constant = R::zero();
    for (u, v, w) in &inst.edges {
        match fixed(*u, *v) {
            Some(c) => constant = constant + w.clone() * c,
            None => {
                let j = vars.get(*u, *v).unwrap();
                lp.objective[j] = lp.objective[j].clone() + w.clone();
            }
        }
    }
    // triangle rows: delta(i,j) - delta(i,k) - delta(k,j) <= 0, all i<j, k
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let mut coeffs: Vec<(usize, R)> = Vec::new();
                let mut rhs = R::zero();
                let add = |u: usize, v: usize, sign: R, coeffs: &mut Vec<(usize, R)>, rhs: &mut R| {
                    match fixed(u, v) {
                        Some(c) => *rhs = rhs.clone() - sign * c,
                        None => coeffs.push((vars.get(u, v).unwrap(), sign)),
                    }
                };
                add(i, j, R::one(), &mut coeffs, &mut rhs);
                add(i, k, -R::one(), &mut coeffs, &mut rhs);
                add(k, j, -R::one(), &mut coeffs, &mut rhs);
                if coeffs.is_empty() {
                    continue; // all three in T: d_T already validated
                }
                lp.add_row(coeffs, Sense::Le, rhs);
            }
        }
    }
    let sol = solve_lp(&lp).map_err(|e| {
        Error::Solver(format!(
            "MET LP failed: {e}; instance dump: {}",
            lp.to_debug_json()
        ))
    })?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!(
            "MET LP status {:?}; instance dump: {}",
            sol.status,
            lp.to_debug_json()
        )));
    }
    let mut witness = vec![vec![R::zero(); n]; n];
    for u in 0..n {
        for v in (u + 1)..n {
            let val = match fixed(u, v) {
                Some(c) => c,
                None => sol.primal[vars.get(u, v).unwrap()].clone(),
            };
            witness[u][v] = val.clone();
            witness[v][u] = val;
        }
    }
    let tol = if R::EXACT { R::zero() } else { R::from_f64(1e-9) };
    let report = metric::validate_matrix(&witness, &tol, ValidationMode::SemiMetric)?;
    if !report.pass {
        return Err(Error::Internal(format!(
            "MET witness fails semi-metric validation: {:?}",
            report.violations.first()
        )));
    }
    Ok((sol.value + constant, witness))
}

/// EMD relaxation: one joint LP over vertex measures mu_u on T and per-edge
/// couplings pi_uv, minimizing sum of w(u,v) * cost(pi_uv).
pub fn emd_relaxation<R: Scalar>(inst: &ZeroExtensionInstance<R>) -> Result<(R, Vec<Vec<R>>)> {
    let n = inst.n;
    let k = inst.terminals.len();
    let pos = inst.terminal_pos();
    let free = inst.free_vertices();
    let free_slot: Vec<Option<usize>> = {
        let mut s = vec![None; n];
        for (i, &v) in free.iter().enumerate() {
            s[v] = Some(i);
        }
        s
    };
    let num_mu = free.len() * k;
    let num_pi = inst.edges.len() * k * k;
    let mut lp = LinearProgram::<R>::new(num_mu + num_pi, false);
    let pi_base = |e: usize| num_mu + e * k * k;
    for (e, (_, _, w)) in inst.edges.iter().enumerate() {
        for s in 0..k {
            for t in 0..k {
                lp.objective[pi_base(e) + s * k + t] = w.clone() * inst.d_t.d(s, t);
            }
        }
    }
    // mu of a vertex: variable block or fixed delta
    enum Mu {
        Free(usize),
        Terminal(usize),
    }
    let mu_of = |v: usize| -> Mu {
        match pos[v] {
            Some(p) => Mu::Terminal(p),
            None => Mu::Free(free_slot[v].unwrap()),
        }
    };
    // coupling marginals per edge
    for (e, (u, v, _)) in inst.edges.iter().enumerate() {
        for s in 0..k {
            // sum_t pi(s,t) - mu_u(s) = 0  (or = delta constant)
            let mut coeffs: Vec<(usize, R)> =
                (0..k).map(|t| (pi_base(e) + s * k + t, R::one())).collect();
            let rhs = match mu_of(*u) {
                Mu::Free(slot) => {
                    coeffs.push((slot * k + s, -R::one()));
                    R::zero()
                }
                Mu::Terminal(p) => {
                    if p == s {
                        R::one()
                    } else {
                        R::zero()
                    }
                }
            };
            lp.add_row(coeffs, Sense::Eq, rhs);
        }
        for t in 0..k {
            let mut coeffs: Vec<(usize, R)> =
                (0..k).map(|s| (pi_base(e) + s * k + t, R::one())).collect();
            let rhs = match mu_of(*v) {
                Mu::Free(slot) => {
                    coeffs.push((slot * k + t, -R::one()));
                    R::zero()
                }
                Mu::Terminal(p) => {
                    if p == t {
                        R::one()
                    } else {
                        R::zero()
                    }
                }
            };
            lp.add_row(coeffs, Sense::Eq, rhs);
        }
    }
    // each free measure is a probability measure
    for slot in 0..free.len() {
        lp.add_row(
            (0..k).map(|t| (slot * k + t, R::one())).collect(),
            Sense::Eq,
            R::one(),
        );
    }
    let sol = solve_lp(&lp).map_err(|e| {
        Error::Solver(format!(
            "EMD LP failed: {e}; instance dump: {}",
            lp.to_debug_json()
        ))
    })?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!("EMD LP status {:?}", sol.status)));
    }
    let mut measures = vec![vec![R::zero(); k]; n];
    for v in 0..n {
        match mu_of(v) {
            Mu::Terminal(p) => measures[v][p] = R::one(),
            Mu::Free(slot) => {
                for t in 0..k {
                    measures[v][t] = sol.primal[slot * k + t].clone();
                }
            }
        }
    }
    Ok((sol.value, measures))
}

/// Runs all three objectives, audits MET <= EMD <= OPT, re-derives the EMD
/// objective from the witness measures through the wasserstein module, and
/// returns the bundle.
pub fn relaxation_chain_check<R: Scalar>(
    inst: &ZeroExtensionInstance<R>,
) -> Result<ZeroExtensionResult<R>> {
    let (opt, opt_partition) = opt_brute_force(inst)?;
    let (met, met_metric) = met_relaxation(inst)?;
    let (emd, emd_measures) = emd_relaxation(inst)?;
    let tol = if R::EXACT {
        R::zero()
    } else {
        R::from_f64(1e-9) * (R::one() + opt.abs())
    };
    if met > emd.clone() + tol.clone() || emd > opt.clone() + tol.clone() {
        return Err(Error::Internal(format!(
            "relaxation chain violated: MET={} EMD={} OPT={}",
            met.to_f64(),
            emd.to_f64(),
            opt.to_f64()
        )));
    }
    // independent recomputation of the EMD objective via W1
    let mut recomputed = R::zero();
    for (u, v, w) in &inst.edges {
        let (cost, _) = wasserstein::w1_distance(&emd_measures[*u], &emd_measures[*v], &inst.d_t)?;
        recomputed = recomputed + w.clone() * cost;
    }
    if (recomputed.clone() - emd.clone()).abs() > tol {
        return Err(Error::Internal(format!(
            "W1 recomputation {} disagrees with EMD objective {}",
            recomputed.to_f64(),
            emd.to_f64()
        )));
    }
    Ok(ZeroExtensionResult {
        opt,
        met,
        emd,
        opt_partition,
        met_metric,
        emd_measures,
    })
}
