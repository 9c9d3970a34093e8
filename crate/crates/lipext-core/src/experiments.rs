//! End-to-end drivers: the magnified-expander extension instance with its
//! lower-bound formula, and the twisted-cube Hölder instance with its exact
//! bound, each emitting one report row per parameter choice.

use crate::extension::{min_extension_euclidean, min_extension_polyhedral, ExtensionProblem, Target};
use crate::graph::{
    edge_expansion_exact, edge_expansion_spectral_bound, random_regular_graph, WeightedGraph,
    EXPANSION_EXACT_MAX_N,
};
use crate::metric::{self, twisted_cube_metric, SubsetHandle, TwistedCube, ValidationMode};
use crate::wasserstein::{poincare_check, w1_norm, SignedMeasure};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// All bound formulas use the natural logarithm; report headers carry this.
pub const LOG_BASE: &str = "natural";

pub const EXPANDER_MAX_N: usize = 64;
pub const HOLDER_BUILD_MAX_N: usize = 8;
pub const HOLDER_SOLVE_MAX_N: usize = 4;

#[derive(Debug, Clone)]
pub struct ExpanderInstance {
    pub graph: WeightedGraph<f64>,
    pub s: SubsetHandle,
    pub r: f64,
    /// f(x) = e_x - (1/|S|) sum of unit masses, one per member of S.
    pub boundary: Vec<SignedMeasure<f64>>,
    /// True when the |S| formula exceeded n and was clamped to n.
    pub s_clamped: bool,
}

/// Builds the magnified-expander instance: a random d-regular graph, the set
/// S of the first |S| vertices, the magnification radius r, and the isometric
/// boundary map into W1(S, d_{G_r(S)}).
pub fn build_expander_instance(n: usize, d: usize, seed: u64) -> Result<ExpanderInstance> {
    if n < 8 {
        return Err(Error::Argument(format!("need n >= 8, got {n}")));
    }
    if d < 3 {
        return Err(Error::Argument(format!("need d >= 3, got {d}")));
    }
    // retry nearby seeds until the sample is connected (deterministic)
    let mut graph = None;
    for k in 0..32u64 {
        let g = random_regular_graph::<f64>(n, d, seed.wrapping_add(k))?;
        if g.is_connected() {
            graph = Some(g);
            break;
        }
    }
    let graph = graph.ok_or_else(|| {
        Error::Sampling("no connected d-regular sample in 32 attempts".into())
    })?;
    let nf = n as f64;
    let df = d as f64;
    let formula = (nf * (df * df.ln()).sqrt() / nf.ln().sqrt()).floor() as usize;
    let s_size = formula.min(n);
    let s_clamped = formula > n;
    let r = nf.ln().sqrt() / (df * df.ln()).sqrt();
    let s = SubsetHandle::new((0..s_size).collect(), n)?;
    let boundary: Vec<SignedMeasure<f64>> = (0..s_size)
        .map(|p| SignedMeasure::centered_point(s_size, p))
        .collect::<Result<_>>()?;
    // isometry audit: ||f(x)-f(y)||_W1 = d_{G_r(S)}(x,y) on all pairs of S
    let base = metric::shortest_path_metric(&graph)?;
    let ground = metric::magnify(&base, &s, r)?.restrict(&s);
    for a in 0..s_size {
        for b in (a + 1)..s_size {
            let diff = boundary[a].sub(&boundary[b])?;
            let (w1, _, _) = w1_norm(&diff, &ground)?;
            let want = ground.d(a, b);
            if (w1 - want).abs() > 1e-9 * (1.0 + want) {
                return Err(Error::Internal(format!(
                    "boundary not isometric at ({a},{b}): {w1} vs {want}"
                )));
            }
        }
    }
    Ok(ExpanderInstance {
        graph,
        s,
        r,
        boundary,
        s_clamped,
    })
}

/// Theorem lower-bound formula (natural log), up to an unspecified universal
/// constant: [phi/(1+r|S|/n)] * min{ |S| ln n/(nd ln d),
/// (16 r^2 ln d + r ln(phi|S|/8))/(diam ln d) }. Returns 0 on the vacuous
/// branch 16 r ln d + ln(phi|S|/8) <= 0.
pub fn evaluate_expander_bound(
    phi: f64,
    n: usize,
    d: usize,
    diam: f64,
    s_size: usize,
    r: f64,
) -> Result<f64> {
    if s_size == 0 {
        return Err(Error::Argument("S must be nonempty".into()));
    }
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(Error::Domain(format!("phi = {phi} outside (0, 1]")));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("need r > 0, got {r}")));
    }
    if r > diam {
        return Err(Error::Domain(format!("need r <= diam, got r={r}, diam={diam}")));
    }
    if n < 2 || d < 2 {
        return Err(Error::Argument("need n >= 2 and d >= 2".into()));
    }
    let (nf, df, sf) = (n as f64, d as f64, s_size as f64);
    let log_term = (phi * sf / 8.0).ln();
    if 16.0 * r * df.ln() + log_term <= 0.0 {
        return Ok(0.0); // the theorem is vacuous here
    }
    let term1 = sf * nf.ln() / (nf * df * df.ln());
    let term2 = (16.0 * r * r * df.ln() + r * log_term) / (diam * df.ln());
    let prefix = phi / (1.0 + r * sf / nf);
    Ok(prefix * term1.min(term2))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpanderInstanceReport {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub phi_used: f64,
    pub diam: f64,
    pub s_size: usize,
    pub s_clamped: bool,
    pub r: f64,
    pub min_l: f64,
    pub bound_value: f64,
    pub ratio: f64,
    pub epsilon_discreteness: f64,
    pub poincare_pass: bool,
    pub poincare_lhs: f64,
    pub poincare_rhs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpanderRow {
    pub n: usize,
    /// "ok" or the error that stopped this row.
    pub status: String,
    pub report: Option<ExpanderInstanceReport>,
}

fn expander_row(n: usize, d: usize, seed: u64) -> Result<ExpanderInstanceReport> {
    if n > EXPANDER_MAX_N {
        return Err(Error::Capacity(format!(
            "n = {n} exceeds the W1-extension solver capacity {EXPANDER_MAX_N}"
        )));
    }
    let inst = build_expander_instance(n, d, seed)?;
    let base = metric::shortest_path_metric(&inst.graph)?;
    let diam_g = base.diameter();
    let diam_s = base.diameter_on(&inst.s);
    let phi = if n <= EXPANSION_EXACT_MAX_N {
        edge_expansion_exact(&inst.graph)?.phi
    } else {
        edge_expansion_spectral_bound(&inst.graph)?
    };
    let phi_used = phi.min(1.0);

    let ground = metric::magnify(&base, &inst.s, inst.r)?.restrict(&inst.s);
    let ambient = metric::magnify(&base, &inst.s, inst.r)?;
    let problem = ExtensionProblem::new(
        ambient,
        inst.s.clone(),
        1.0,
        Target::Wasserstein(ground),
        inst.boundary.iter().map(|m| m.values().to_vec()).collect(),
    )?;
    let sol = min_extension_polyhedral(&problem)?;
    let min_l = sol.constant;
    if min_l < 1.0 - 1e-9 {
        return Err(Error::Internal(format!(
            "min L = {min_l} below 1 despite isometric boundary"
        )));
    }
    // Poincaré audit on the LP witness
    let f_map: Vec<SignedMeasure<f64>> = sol
        .values
        .iter()
        .map(|v| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            SignedMeasure::new(v.iter().map(|x| x - mean).collect())
        })
        .collect::<Result<_>>()?;
    let poincare = poincare_check(&inst.graph, &inst.s, inst.r, &f_map, phi_used)?;
    let bound_value = evaluate_expander_bound(phi_used, n, d, diam_g, inst.s.len(), inst.r)?;
    let ratio = if bound_value > 0.0 {
        min_l / bound_value
    } else {
        f64::INFINITY
    };
    Ok(ExpanderInstanceReport {
        n,
        d,
        seed,
        phi_used,
        diam: diam_g,
        s_size: inst.s.len(),
        s_clamped: inst.s_clamped,
        r: inst.r,
        min_l,
        bound_value,
        ratio,
        epsilon_discreteness: (2.0 * inst.r + 1.0) / (2.0 * inst.r + diam_s),
        poincare_pass: poincare.pass,
        poincare_lhs: poincare.lhs,
        poincare_rhs: poincare.rhs,
    })
}

/// One report row per n; failures become per-row error entries and the run
/// continues.
pub fn run_expander_experiment(n_list: &[usize], d: usize, seed: u64) -> Vec<ExpanderRow> {
    n_list
        .iter()
        .map(|&n| match expander_row(n, d, seed) {
            Ok(report) => ExpanderRow {
                n,
                status: "ok".into(),
                report: Some(report),
            },
            Err(e) => ExpanderRow {
                n,
                status: e.to_string(),
                report: None,
            },
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct HolderInstance {
    pub cube: TwistedCube,
    /// Layer 0 of the twisted cube.
    pub s: SubsetHandle,
    /// f(x, 0) = x as a 0/1 vector in R^n.
    pub boundary: Vec<Vec<f64>>,
}

/// Builds the twisted-cube Hölder instance with the sub-optimal parameter
/// choices r = n^{1/(4a^2)}, s = n^{-(2a-1)/(4a^2)}, and audits that the
/// boundary is an isometry after snowflaking: ||f(x,0)-f(y,0)||_2 = d^alpha.
pub fn build_holder_instance(n: usize, alpha: f64) -> Result<HolderInstance> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "holder instance requires alpha in (1/2,1], got {alpha}"
        )));
    }
    if n == 0 || n > HOLDER_BUILD_MAX_N {
        return Err(Error::Capacity(format!(
            "holder instance requires 1 <= n <= {HOLDER_BUILD_MAX_N}, got {n}"
        )));
    }
    let nf = n as f64;
    let r = nf.powf(1.0 / (4.0 * alpha * alpha));
    let s_param = nf.powf(-(2.0 * alpha - 1.0) / (4.0 * alpha * alpha));
    let cube = twisted_cube_metric(n, alpha, r, s_param)?;
    let words = 1usize << n;
    let boundary: Vec<Vec<f64>> = (0..words)
        .map(|w| (0..n).map(|b| ((w >> b) & 1) as f64).collect())
        .collect();
    for x in 0..words {
        for y in (x + 1)..words {
            let h = (x ^ y).count_ones() as f64;
            let lhs = h.sqrt(); // ||f(x,0)-f(y,0)||_2 on bit vectors
            let rhs = cube.metric.d(x, y).powf(alpha);
            if (lhs - rhs).abs() > 1e-12 * (1.0 + lhs) {
                return Err(Error::Internal(format!(
                    "boundary not isometric after snowflake at ({x},{y}): {lhs} vs {rhs}"
                )));
            }
        }
    }
    Ok(HolderInstance {
        cube,
        s: SubsetHandle::new((0..words).collect(), 2 * words)?,
        boundary,
    })
}

/// Theorem lower bound, exact: sqrt(n) / (s^alpha sqrt(n) + 2 r^alpha).
pub fn evaluate_holder_bound(n: usize, alpha: f64, r: f64, s: f64) -> Result<f64> {
    if n == 0 || !(alpha > 0.0) || !(r > 0.0) || !(s > 0.0) {
        return Err(Error::Argument("all arguments must be positive".into()));
    }
    let root_n = (n as f64).sqrt();
    Ok(root_n / (s.powf(alpha) * root_n + 2.0 * r.powf(alpha)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnfloReport {
    /// Sum over x of ||F(x+e) - F(x)||^2, e the all-ones word.
    pub diagonal_sum: f64,
    /// Sum over coordinates j and x of ||F(x+e_j) - F(x)||^2.
    pub edge_sum: f64,
    pub pass: bool,
}

/// Enflo's inequality on the hypercube for F: F_2^n -> R^k, n inferred from
/// the table length (must be a power of two, n <= 10).
pub fn enflo_check(f: &[Vec<f64>]) -> Result<EnfloReport> {
    let words = f.len();
    if words == 0 || !words.is_power_of_two() {
        return Err(Error::Shape("F must be defined on all of F_2^n".into()));
    }
    let n = words.trailing_zeros() as usize;
    if n > 10 {
        return Err(Error::Capacity(format!("enflo check limited to n <= 10, got {n}")));
    }
    let k = f[0].len();
    if f.iter().any(|v| v.len() != k) {
        return Err(Error::Shape("F values have mixed dimensions".into()));
    }
    let sq = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
    };
    let full = words - 1;
    let diagonal_sum: f64 = (0..words).map(|x| sq(&f[x], &f[x ^ full])).sum();
    let mut edge_sum = 0.0;
    for j in 0..n {
        for x in 0..words {
            edge_sum += sq(&f[x], &f[x ^ (1 << j)]);
        }
    }
    let pass = diagonal_sum <= edge_sum + 1e-9 * (1.0 + edge_sum);
    Ok(EnfloReport {
        diagonal_sum,
        edge_sum,
        pass,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderInstanceReport {
    pub n: usize,
    pub alpha: f64,
    pub r: f64,
    pub s: f64,
    pub rs_condition_ok: bool,
    pub metric_valid: bool,
    pub min_l_upper: f64,
    pub exact_bound: f64,
    pub enflo_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderRow {
    pub n: usize,
    pub alpha: f64,
    pub status: String,
    pub report: Option<HolderInstanceReport>,
}

fn holder_row(n: usize, alpha: f64, seed: u64) -> Result<HolderInstanceReport> {
    if n > HOLDER_SOLVE_MAX_N {
        return Err(Error::Capacity(format!(
            "descent solve limited to n <= {HOLDER_SOLVE_MAX_N}, got {n}"
        )));
    }
    let inst = build_holder_instance(n, alpha)?;
    let validation =
        metric::validate_metric(&inst.cube.metric, &1e-12, ValidationMode::Metric)?;
    let problem = ExtensionProblem::new(
        inst.cube.metric.clone(),
        inst.s.clone(),
        alpha,
        Target::Euclidean(n),
        inst.boundary.clone(),
    )?;
    let sol = min_extension_euclidean(&problem, seed)?;
    let exact_bound = evaluate_holder_bound(n, alpha, inst.cube.r, inst.cube.s)?;
    if sol.constant < exact_bound - 1e-3 {
        return Err(Error::Internal(format!(
            "descent value {} fell below the certified lower bound {exact_bound}",
            sol.constant
        )));
    }
    // Enflo audit on the witness restricted to layer 1
    let words = 1usize << n;
    let layer1: Vec<Vec<f64>> = (0..words).map(|w| sol.values[words + w].clone()).collect();
    let enflo = enflo_check(&layer1)?;
    Ok(HolderInstanceReport {
        n,
        alpha,
        r: inst.cube.r,
        s: inst.cube.s,
        rs_condition_ok: inst.cube.rs_condition_ok,
        metric_valid: validation.pass,
        min_l_upper: sol.constant,
        exact_bound,
        enflo_ok: enflo.pass,
    })
}

/// One report row per (n, alpha); failures become per-row error entries.
pub fn run_holder_experiment(n_list: &[usize], alpha_list: &[f64], seed: u64) -> Vec<HolderRow> {
    let mut rows = Vec::new();
    for &n in n_list {
        for &alpha in alpha_list {
            rows.push(match holder_row(n, alpha, seed) {
                Ok(report) => HolderRow {
                    n,
                    alpha,
                    status: "ok".into(),
                    report: Some(report),
                },
                Err(e) => HolderRow {
                    n,
                    alpha,
                    status: e.to_string(),
                    report: None,
                },
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn expander_bound_hand_value() {
        let v = evaluate_expander_bound(1.0, 64, 4, 6.0, 16, 2.0).unwrap();
        assert!((v - 0.125).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn expander_bound_vacuous_and_domain_branches() {
        // phi*|S|/8 tiny and r tiny: 16 r ln d + ln(phi|S|/8) <= 0
        let v = evaluate_expander_bound(1e-3, 64, 4, 6.0, 1, 1e-3).unwrap();
        assert_eq!(v, 0.0);
        assert!(matches!(
            evaluate_expander_bound(1.0, 64, 4, 6.0, 16, 7.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            evaluate_expander_bound(1.0, 64, 4, 6.0, 0, 2.0),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            evaluate_expander_bound(1.5, 64, 4, 6.0, 16, 2.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn expander_instance_n16_parameters() {
        let inst = build_expander_instance(16, 4, 7).unwrap();
        assert_eq!(inst.s.len(), 16); // formula value 22 clamps to n
        assert!(inst.s_clamped);
        let want_r = 16f64.ln().sqrt() / (4.0 * 4f64.ln()).sqrt();
        assert!((inst.r - want_r).abs() < 1e-15);
        assert_eq!(inst.boundary.len(), 16);
    }

    #[test]
    fn expander_instance_n8_builds() {
        let inst = build_expander_instance(8, 3, 1).unwrap();
        assert!(inst.s.len() <= 8);
    }

    #[test]
    fn holder_bound_hand_values() {
        let r = 2f64.sqrt();
        let s = 1.0 / 2f64.sqrt();
        let v = evaluate_holder_bound(4, 1.0, r, s).unwrap();
        assert!((v - 2.0 / (3.0 * 2f64.sqrt())).abs() < 1e-12);
        // eq-choices at alpha=1: bound = n^{1/4}/3
        let inst = build_holder_instance(4, 1.0).unwrap();
        assert!((inst.cube.r - 2f64.sqrt()).abs() < 1e-12);
        assert!((inst.cube.s - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(inst.cube.rs_condition_ok);
        let v16 = {
            let nf = 16f64;
            let r = nf.powf(0.25);
            let s = nf.powf(-0.25);
            evaluate_holder_bound(16, 1.0, r, s).unwrap()
        };
        assert!((v16 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn holder_build_rejects_small_alpha() {
        assert!(matches!(
            build_holder_instance(3, 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn enflo_basics() {
        // constant map
        let f = vec![vec![1.0, 2.0]; 8];
        let rep = enflo_check(&f).unwrap();
        assert_eq!(rep.diagonal_sum, 0.0);
        assert!(rep.pass);
        // coordinate projection on F_2^3: both sides count flips
        let n = 3;
        let words = 1usize << n;
        let proj: Vec<Vec<f64>> = (0..words).map(|w| vec![(w & 1) as f64]).collect();
        let rep = enflo_check(&proj).unwrap();
        assert_eq!(rep.diagonal_sum, words as f64);
        assert_eq!(rep.edge_sum, words as f64);
        // random maps
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let n = rng.random_range(1..=6);
            let k = rng.random_range(1..=4);
            let f: Vec<Vec<f64>> = (0..1usize << n)
                .map(|_| (0..k).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            assert!(enflo_check(&f).unwrap().pass);
        }
    }

    #[test]
    fn holder_experiment_small_row() {
        let rows = run_holder_experiment(&[2], &[0.8], 0);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].status, "ok", "{}", rows[0].status);
        let rep = rows[0].report.as_ref().unwrap();
        assert!(rep.metric_valid);
        assert!(rep.rs_condition_ok);
        assert!(rep.enflo_ok);
        assert!(rep.min_l_upper >= rep.exact_bound - 1e-3);
    }

    #[test]
    fn expander_experiment_n16_row() {
        let rows = run_expander_experiment(&[16], 4, 7);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].status, "ok", "{}", rows[0].status);
        let rep = rows[0].report.as_ref().unwrap();
        assert!(rep.min_l >= 1.0 - 1e-9);
        assert!(rep.poincare_pass);
        assert!(rep.bound_value > 0.0);
        assert!(rep.ratio > 0.0);
        let eps = (2.0 * rep.r + 1.0) / (2.0 * rep.r + rep.diam);
        // here S = V so diam(S) = diam(G)
        assert!((rep.epsilon_discreteness - eps).abs() < 1e-12);
    }

    #[test]
    fn experiment_rows_are_deterministic() {
        let a = serde_json::to_string(&run_holder_experiment(&[2], &[0.9], 3)).unwrap();
        let b = serde_json::to_string(&run_holder_experiment(&[2], &[0.9], 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn capacity_rows_do_not_abort_the_run() {
        let rows = run_expander_experiment(&[16, 1000], 4, 7);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].status, "ok");
        assert!(rows[1].status.contains("capacity"));
        assert!(rows[1].report.is_none());
    }
}
