//! Optimization kernels with certificates: dense two-phase simplex (generic
//! over [`Scalar`], so it runs exactly on rationals), min-cost flow via
//! successive shortest paths with node potentials, and a heuristic nonsmooth
//! minimax descent for Euclidean targets.

use crate::scalar::Scalar;
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// Per-variable bounds; `None` means unbounded on that side.
/// Default is `lower = 0`, `upper = +inf`.
#[derive(Debug, Clone)]
pub struct VarBounds<R: Scalar> {
    pub lower: Option<R>,
    pub upper: Option<R>,
}

impl<R: Scalar> VarBounds<R> {
    pub fn nonnegative() -> Self {
        VarBounds {
            lower: Some(R::zero()),
            upper: None,
        }
    }

    pub fn free() -> Self {
        VarBounds {
            lower: None,
            upper: None,
        }
    }
}

/// `minimize (or maximize) c·x` subject to triplet-sparse rows and
/// per-variable bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram<R: Scalar> {
    pub num_vars: usize,
    pub maximize: bool,
    pub objective: Vec<R>,
    /// (row, col, coefficient); duplicates are summed.
    pub triplets: Vec<(usize, usize, R)>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<R>,
    pub bounds: Vec<VarBounds<R>>,
}

impl<R: Scalar> LinearProgram<R> {
    pub fn new(num_vars: usize, maximize: bool) -> Self {
        LinearProgram {
            num_vars,
            maximize,
            objective: vec![R::zero(); num_vars],
            triplets: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![VarBounds::nonnegative(); num_vars],
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, R)>, sense: Sense, rhs: R) -> usize {
        let row = self.senses.len();
        for (col, v) in coeffs {
            self.triplets.push((row, col, v));
        }
        self.senses.push(sense);
        self.rhs.push(rhs);
        row
    }

    pub fn num_rows(&self) -> usize {
        self.senses.len()
    }

    fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars || self.bounds.len() != self.num_vars {
            return Err(Error::Shape("objective/bounds length mismatch".into()));
        }
        if self.rhs.len() != self.senses.len() {
            return Err(Error::Shape("rhs/senses length mismatch".into()));
        }
        for (r, c, v) in &self.triplets {
            if *r >= self.senses.len() || *c >= self.num_vars {
                return Err(Error::Shape(format!("triplet ({r},{c}) out of range")));
            }
            if !v.to_f64().is_finite() {
                return Err(Error::Argument("non-finite coefficient".into()));
            }
        }
        for v in self.objective.iter().chain(self.rhs.iter()) {
            if !v.to_f64().is_finite() {
                return Err(Error::Argument("non-finite coefficient".into()));
            }
        }
        Ok(())
    }

    /// Triplet JSON dump for debugging failed instances.
    pub fn to_debug_json(&self) -> serde_json::Value {
        serde_json::json!({
            "num_vars": self.num_vars,
            "maximize": self.maximize,
            "objective": self.objective.iter().map(|v| v.to_f64()).collect::<Vec<_>>(),
            "triplets": self.triplets.iter()
                .map(|(r, c, v)| serde_json::json!([r, c, v.to_f64()]))
                .collect::<Vec<_>>(),
            "senses": self.senses.iter()
                .map(|s| match s { Sense::Le => "<=", Sense::Eq => "=", Sense::Ge => ">=" })
                .collect::<Vec<_>>(),
            "rhs": self.rhs.iter().map(|v| v.to_f64()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution<R: Scalar> {
    pub status: LpStatus,
    /// Primal point (original variables); empty unless optimal.
    pub primal: Vec<R>,
    /// Dual per original row, oriented so that rhs·dual equals the objective
    /// value (also the Farkas direction on infeasible instances).
    pub dual: Vec<R>,
    pub value: R,
    pub duality_gap: R,
}

fn eps<R: Scalar>() -> R {
    if R::EXACT {
        R::zero()
    } else {
        R::from_f64(1e-9)
    }
}

enum ColKind<R> {
    Shift { var: usize, lower: R },
    Pos(usize),
    Neg(usize),
}

/// Two-phase dense simplex. Dantzig pricing with a permanent switch to
/// Bland's rule on stalls; the final basis is re-factorized from the original
/// data so primal, dual and gap come from a fresh solve rather than the
/// drifted tableau.
pub fn solve_lp<R: Scalar>(lp: &LinearProgram<R>) -> Result<LpSolution<R>> {
    lp.validate()?;
    let n = lp.num_vars;
    let m_user = lp.senses.len();

    // dense user matrix
    let mut user = vec![vec![R::zero(); n]; m_user];
    for (r, c, v) in &lp.triplets {
        user[*r][*c] = user[*r][*c].clone() + v.clone();
    }

    // internal sense: minimize
    let c_orig: Vec<R> = if lp.maximize {
        lp.objective.iter().map(|v| -v.clone()).collect()
    } else {
        lp.objective.clone()
    };

    // column transform: shift finite lower bounds to 0, split free variables
    let mut col_kind: Vec<ColKind<R>> = Vec::new();
    let mut var_cols: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        match &lp.bounds[j].lower {
            Some(l) => {
                var_cols[j].push(col_kind.len());
                col_kind.push(ColKind::Shift {
                    var: j,
                    lower: l.clone(),
                });
            }
            None => {
                var_cols[j].push(col_kind.len());
                col_kind.push(ColKind::Pos(j));
                var_cols[j].push(col_kind.len());
                col_kind.push(ColKind::Neg(j));
            }
        }
    }
    let nstd = col_kind.len();
    let col_coeff = |kind: &ColKind<R>, a: &R| -> R {
        match kind {
            ColKind::Shift { .. } | ColKind::Pos(_) => a.clone(),
            ColKind::Neg(_) => -a.clone(),
        }
    };

    // standardized rows: user rows then upper-bound rows
    let mut rows: Vec<(Vec<R>, Sense, R)> = Vec::new();
    let mut source_row: Vec<Option<usize>> = Vec::new();
    for i in 0..m_user {
        let mut coeffs = vec![R::zero(); nstd];
        let mut b = lp.rhs[i].clone();
        for (k, kind) in col_kind.iter().enumerate() {
            let var = match kind {
                ColKind::Shift { var, .. } | ColKind::Pos(var) | ColKind::Neg(var) => *var,
            };
            coeffs[k] = col_coeff(kind, &user[i][var]);
            if let ColKind::Shift { lower, .. } = kind {
                b = b - user[i][var].clone() * lower.clone();
            }
        }
        rows.push((coeffs, lp.senses[i], b));
        source_row.push(Some(i));
    }
    for j in 0..n {
        if let Some(u) = &lp.bounds[j].upper {
            let shifted = match &lp.bounds[j].lower {
                Some(l) => {
                    if u < l {
                        return Ok(LpSolution {
                            status: LpStatus::Infeasible,
                            primal: vec![],
                            dual: vec![],
                            value: R::zero(),
                            duality_gap: R::zero(),
                        });
                    }
                    u.clone() - l.clone()
                }
                None => u.clone(),
            };
            let mut coeffs = vec![R::zero(); nstd];
            for &k in &var_cols[j] {
                coeffs[k] = col_coeff(&col_kind[k], &R::one());
            }
            rows.push((coeffs, Sense::Le, shifted));
            source_row.push(None);
        }
    }

    // flip rows to nonnegative rhs, then append slack columns
    let mut negated = vec![false; rows.len()];
    for (i, (coeffs, sense, b)) in rows.iter_mut().enumerate() {
        if *b < R::zero() {
            for v in coeffs.iter_mut() {
                *v = -v.clone();
            }
            *b = -b.clone();
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
            negated[i] = true;
        }
    }
    let m = rows.len();
    let nslack = rows.iter().filter(|(_, s, _)| *s != Sense::Eq).count();
    let ncols = nstd + nslack;
    let mut a = vec![vec![R::zero(); ncols]; m];
    let mut b = vec![R::zero(); m];
    {
        let mut slack = nstd;
        for (i, (coeffs, sense, bi)) in rows.iter().enumerate() {
            a[i][..nstd].clone_from_slice(coeffs);
            b[i] = bi.clone();
            match sense {
                Sense::Le => {
                    a[i][slack] = R::one();
                    slack += 1;
                }
                Sense::Ge => {
                    a[i][slack] = -R::one();
                    slack += 1;
                }
                Sense::Eq => {}
            }
        }
    }
    let mut c_std = vec![R::zero(); ncols];
    let mut obj_const = R::zero();
    for (k, kind) in col_kind.iter().enumerate() {
        match kind {
            ColKind::Shift { var, lower } => {
                c_std[k] = c_orig[*var].clone();
                obj_const = obj_const + c_orig[*var].clone() * lower.clone();
            }
            ColKind::Pos(var) => c_std[k] = c_orig[*var].clone(),
            ColKind::Neg(var) => c_std[k] = -c_orig[*var].clone(),
        }
    }

    let outcome = simplex(&a, &b, &c_std)?;
    match outcome {
        SimplexOutcome::Unbounded => {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                primal: vec![],
                dual: vec![],
                value: R::zero(),
                duality_gap: R::zero(),
            })
        }
        SimplexOutcome::Infeasible { y } => {
            let mut dual = vec![R::zero(); m_user];
            for (i, yi) in y.iter().enumerate() {
                if let Some(src) = source_row[i] {
                    let v = if negated[i] { -yi.clone() } else { yi.clone() };
                    dual[src] = if lp.maximize { -v } else { v };
                }
            }
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                primal: vec![],
                dual,
                value: R::zero(),
                duality_gap: R::zero(),
            });
        }
        SimplexOutcome::Optimal { basis, rows_kept } => {
            // re-factorize the final basis from the original data (restricted
            // to the non-redundant rows), so primal/dual come out fresh
            let k = basis.len();
            let mut bmat = vec![vec![R::zero(); k]; k];
            let mut btmat = vec![vec![R::zero(); k]; k];
            for (col, &j) in basis.iter().enumerate() {
                for (row, &src) in rows_kept.iter().enumerate() {
                    bmat[row][col] = a[src][j].clone();
                    btmat[col][row] = a[src][j].clone();
                }
            }
            let bk: Vec<R> = rows_kept.iter().map(|&src| b[src].clone()).collect();
            let xb = solve_linear(bmat, bk)
                .ok_or_else(|| Error::Numerical("singular final basis".into()))?;
            let cb: Vec<R> = basis.iter().map(|&j| c_std[j].clone()).collect();
            let yk = solve_linear(btmat, cb)
                .ok_or_else(|| Error::Numerical("singular final basis (dual)".into()))?;
            let mut y = vec![R::zero(); m];
            for (row, &src) in rows_kept.iter().enumerate() {
                y[src] = yk[row].clone();
            }

            let tol = eps::<R>();
            let mut x_std = vec![R::zero(); ncols];
            for (row, &j) in basis.iter().enumerate() {
                if xb[row] < -tol.clone() {
                    return Err(Error::Numerical(format!(
                        "refined basic solution has negative component {}",
                        xb[row].to_f64()
                    )));
                }
                x_std[j] = crate::scalar::max(xb[row].clone(), R::zero());
            }
            // dual feasibility: reduced costs over every column
            for j in 0..ncols {
                let mut r = c_std[j].clone();
                for i in 0..m {
                    r = r - y[i].clone() * a[i][j].clone();
                }
                if r < -tol.clone() {
                    return Err(Error::Numerical(format!(
                        "reduced cost {} violates dual feasibility at column {j}",
                        r.to_f64()
                    )));
                }
            }

            // recover original variables
            let mut primal = vec![R::zero(); n];
            for (k2, kind) in col_kind.iter().enumerate() {
                match kind {
                    ColKind::Shift { var, lower } => {
                        primal[*var] = lower.clone() + x_std[k2].clone()
                    }
                    ColKind::Pos(var) => primal[*var] = primal[*var].clone() + x_std[k2].clone(),
                    ColKind::Neg(var) => primal[*var] = primal[*var].clone() - x_std[k2].clone(),
                }
            }
            let value_min = crate::scalar::sum(
                &(0..ncols)
                    .map(|j| c_std[j].clone() * x_std[j].clone())
                    .collect::<Vec<_>>(),
            ) + obj_const.clone();
            let dual_min = crate::scalar::sum(
                &(0..m)
                    .map(|i| b[i].clone() * y[i].clone())
                    .collect::<Vec<_>>(),
            ) + obj_const;
            let gap = (value_min.clone() - dual_min).abs();
            let scale = R::one() + value_min.abs();
            let gap_tol = if R::EXACT {
                R::zero()
            } else {
                R::from_f64(1e-8) * scale
            };
            if gap > gap_tol {
                return Err(Error::Numerical(format!(
                    "duality gap {} exceeds tolerance",
                    gap.to_f64()
                )));
            }
            check_primal_feasibility(lp, &user, &primal)?;

            let mut dual = vec![R::zero(); m_user];
            for i in 0..m {
                if let Some(src) = source_row[i] {
                    let v = if negated[i] { -y[i].clone() } else { y[i].clone() };
                    dual[src] = if lp.maximize { -v } else { v };
                }
            }
            let value = if lp.maximize { -value_min } else { value_min };
            Ok(LpSolution {
                status: LpStatus::Optimal,
                primal,
                dual,
                value,
                duality_gap: gap,
            })
        }
    }
}

fn check_primal_feasibility<R: Scalar>(
    lp: &LinearProgram<R>,
    user: &[Vec<R>],
    x: &[R],
) -> Result<()> {
    let tol = eps::<R>();
    for i in 0..lp.senses.len() {
        let lhs = crate::scalar::sum(
            &(0..lp.num_vars)
                .map(|j| user[i][j].clone() * x[j].clone())
                .collect::<Vec<_>>(),
        );
        let slack_tol = tol.clone() * (R::one() + lp.rhs[i].abs());
        let ok = match lp.senses[i] {
            Sense::Le => lhs <= lp.rhs[i].clone() + slack_tol,
            Sense::Ge => lhs + slack_tol >= lp.rhs[i].clone(),
            Sense::Eq => (lhs - lp.rhs[i].clone()).abs() <= slack_tol,
        };
        if !ok {
            return Err(Error::Numerical(format!("primal infeasibility at row {i}")));
        }
    }
    for j in 0..lp.num_vars {
        if let Some(l) = &lp.bounds[j].lower {
            if x[j].clone() + tol.clone() * (R::one() + l.abs()) < *l {
                return Err(Error::Numerical(format!("lower bound violated at var {j}")));
            }
        }
        if let Some(u) = &lp.bounds[j].upper {
            if x[j].clone() > u.clone() + tol.clone() * (R::one() + u.abs()) {
                return Err(Error::Numerical(format!("upper bound violated at var {j}")));
            }
        }
    }
    Ok(())
}

enum SimplexOutcome<R> {
    Optimal {
        basis: Vec<usize>,
        /// Standardized row indices surviving redundancy elimination,
        /// parallel to `basis`.
        rows_kept: Vec<usize>,
    },
    Infeasible {
        y: Vec<R>,
    },
    Unbounded,
}

const SIMPLEX_MAX_ITERS: usize = 200_000;

/// Tableau simplex on `min c·x, Ax = b, x >= 0` with `b >= 0`. Artificial
/// columns form the initial basis; only the final basis index set matters to
/// the caller (which re-solves it cleanly).
fn simplex<R: Scalar>(a: &[Vec<R>], b: &[R], c: &[R]) -> Result<SimplexOutcome<R>> {
    let m = a.len();
    let ncols = if m > 0 { a[0].len() } else { c.len() };
    let total = ncols + m; // artificials appended
    let tol = eps::<R>();
    let pivot_tol = if R::EXACT {
        R::zero()
    } else {
        R::from_f64(1e-10)
    };

    let mut tab: Vec<Vec<R>> = (0..m)
        .map(|i| {
            let mut row = vec![R::zero(); total + 1];
            row[..ncols].clone_from_slice(&a[i]);
            row[ncols + i] = R::one();
            row[total] = b[i].clone();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (0..m).map(|i| ncols + i).collect();

    // phase 1: objective row for min sum of artificials
    let mut obj = vec![R::zero(); total + 1];
    for j in 0..total {
        let mut r = if j >= ncols { R::one() } else { R::zero() };
        for row in tab.iter() {
            r = r - row[j].clone();
        }
        obj[j] = r;
    }
    let mut rhs_obj = R::zero();
    for row in tab.iter() {
        rhs_obj = rhs_obj - row[total].clone();
    }
    obj[total] = rhs_obj;

    run_pivots(&mut tab, &mut obj, &mut basis, ncols, &tol, &pivot_tol)?
        .map(|_| ())
        .map_err(|_| Error::Internal("phase 1 cannot be unbounded".into()))?;

    let phase1 = -obj[total].clone();
    if phase1 > tol.clone() * (R::one() + phase1.abs()) {
        // Farkas direction from the phase-1 reduced costs of the artificials
        let y: Vec<R> = (0..m).map(|i| R::one() - obj[ncols + i].clone()).collect();
        return Ok(SimplexOutcome::Infeasible { y });
    }

    // drive remaining artificials out of the basis; drop redundant rows
    let mut keep = vec![true; m];
    for r in 0..m {
        if basis[r] >= ncols {
            let enter = (0..ncols).find(|&j| tab[r][j].abs() > pivot_tol);
            match enter {
                Some(j) => pivot(&mut tab, &mut obj, &mut basis, r, j),
                None => keep[r] = false,
            }
        }
    }
    // Redundant rows (no pivotable entry; rhs 0 since phase 1 closed) are
    // linear combinations of the kept rows, so dropping them and assigning
    // them zero duals preserves both primal and dual solutions. Tableau rows
    // are never permuted, so row r is standardized constraint r.
    let mut kept_tab = Vec::new();
    let mut kept_basis = Vec::new();
    let mut rows_kept = Vec::new();
    for r in 0..m {
        if keep[r] {
            kept_tab.push(tab[r].clone());
            kept_basis.push(basis[r]);
            rows_kept.push(r);
        }
    }
    let mut tab = kept_tab;
    let mut basis = kept_basis;

    // phase 2 objective row
    for (j, oj) in obj.iter_mut().enumerate().take(total) {
        let mut r = if j < ncols { c[j].clone() } else { R::zero() };
        for (i, row) in tab.iter().enumerate() {
            let cb = if basis[i] < ncols {
                c[basis[i]].clone()
            } else {
                R::zero()
            };
            r = r - cb * row[j].clone();
        }
        *oj = r;
    }
    let mut rhs_obj = R::zero();
    for (i, row) in tab.iter().enumerate() {
        let cb = if basis[i] < ncols {
            c[basis[i]].clone()
        } else {
            R::zero()
        };
        rhs_obj = rhs_obj - cb * row[total].clone();
    }
    obj[total] = rhs_obj;

    match run_pivots(&mut tab, &mut obj, &mut basis, ncols, &tol, &pivot_tol)? {
        Ok(()) => Ok(SimplexOutcome::Optimal { basis, rows_kept }),
        Err(()) => Ok(SimplexOutcome::Unbounded),
    }
}

/// Pivots to optimality. `Ok(Ok(()))` optimal, `Ok(Err(()))` unbounded.
/// Artificial columns (index >= ncols) never enter.
#[allow(clippy::result_unit_err)]
fn run_pivots<R: Scalar>(
    tab: &mut Vec<Vec<R>>,
    obj: &mut Vec<R>,
    basis: &mut Vec<usize>,
    ncols: usize,
    tol: &R,
    pivot_tol: &R,
) -> Result<std::result::Result<(), ()>> {
    let m = tab.len();
    let total = obj.len() - 1;
    let mut bland = false;
    let mut stall = 0usize;
    let stall_limit = 2 * (m + ncols) + 10;
    let mut last_obj = obj[total].clone();
    for _ in 0..SIMPLEX_MAX_ITERS {
        // entering column
        let mut enter: Option<usize> = None;
        if bland {
            enter = (0..ncols).find(|&j| obj[j] < -tol.clone());
        } else {
            let mut best = -tol.clone();
            for j in 0..ncols {
                if obj[j] < best {
                    best = obj[j].clone();
                    enter = Some(j);
                }
            }
        }
        let Some(j) = enter else {
            return Ok(Ok(()));
        };
        // ratio test
        let mut leave: Option<usize> = None;
        let mut best_ratio: Option<R> = None;
        for i in 0..m {
            if tab[i][j] > pivot_tol.clone() {
                let ratio = tab[i][total].clone() / tab[i][j].clone();
                let better = match &best_ratio {
                    None => true,
                    Some(br) => {
                        ratio < br.clone()
                            || (ratio == br.clone()
                                && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best_ratio = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            return Ok(Err(()));
        };
        pivot(tab, obj, basis, r, j);
        // stall detection: no strict improvement in the objective
        if (obj[total].clone() - last_obj.clone()).abs()
            <= tol.clone() * (R::one() + last_obj.abs())
        {
            stall += 1;
            if stall > stall_limit {
                bland = true;
            }
        } else {
            stall = 0;
        }
        last_obj = obj[total].clone();
    }
    Err(Error::Solver(format!(
        "simplex exceeded {SIMPLEX_MAX_ITERS} pivots"
    )))
}

fn pivot<R: Scalar>(
    tab: &mut [Vec<R>],
    obj: &mut [R],
    basis: &mut [usize],
    r: usize,
    j: usize,
) {
    let piv = tab[r][j].clone();
    for v in tab[r].iter_mut() {
        *v = v.clone() / piv.clone();
    }
    let pivot_row = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r && !row[j].is_zero() {
            let f = row[j].clone();
            for (v, p) in row.iter_mut().zip(pivot_row.iter()) {
                *v = v.clone() - f.clone() * p.clone();
            }
        }
    }
    if !obj[j].is_zero() {
        let f = obj[j].clone();
        for (v, p) in obj.iter_mut().zip(pivot_row.iter()) {
            *v = v.clone() - f.clone() * p.clone();
        }
    }
    basis[r] = j;
}

/// Dense Gaussian elimination with partial pivoting; `None` if singular.
pub(crate) fn solve_linear<R: Scalar>(mut a: Vec<Vec<R>>, mut b: Vec<R>) -> Option<Vec<R>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][col].is_zero() {
            return None;
        }
        if !R::EXACT && a[piv][col].abs() < R::from_f64(1e-12) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let f = a[row][col].clone() / a[col][col].clone();
            for k in col..n {
                a[row][k] = a[row][k].clone() - f.clone() * a[col][k].clone();
            }
            b[row] = b[row].clone() - f * b[col].clone();
        }
    }
    let mut x = vec![R::zero(); n];
    for col in (0..n).rev() {
        let mut v = b[col].clone();
        for k in col + 1..n {
            v = v - a[col][k].clone() * x[k].clone();
        }
        x[col] = v / a[col][col].clone();
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// min-cost flow
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FlowArc<R: Scalar> {
    pub from: usize,
    pub to: usize,
    pub cost: R,
    /// `None` means uncapacitated.
    pub capacity: Option<R>,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork<R: Scalar> {
    pub num_nodes: usize,
    /// Positive = supply, negative = demand; must sum to zero.
    pub supplies: Vec<R>,
    pub arcs: Vec<FlowArc<R>>,
}

#[derive(Debug, Clone)]
pub struct McfSolution<R: Scalar> {
    pub cost: R,
    /// Flow per arc, parallel to `FlowNetwork::arcs`.
    pub flows: Vec<R>,
    /// Node potentials certifying optimality: every residual arc has
    /// nonnegative reduced cost `cost + pi(from) - pi(to)`.
    pub potentials: Vec<R>,
}

/// Successive shortest paths with potentials. Costs must be nonnegative, so
/// the zero potential is valid initially and Dijkstra applies throughout.
pub fn min_cost_flow<R: Scalar>(net: &FlowNetwork<R>) -> Result<McfSolution<R>> {
    let n = net.num_nodes;
    if net.supplies.len() != n {
        return Err(Error::Shape("supplies length != num_nodes".into()));
    }
    for arc in &net.arcs {
        if arc.from >= n || arc.to >= n || arc.from == arc.to {
            return Err(Error::Argument("bad arc endpoints".into()));
        }
        if arc.cost < R::zero() {
            return Err(Error::Argument("negative arc cost".into()));
        }
        if let Some(cap) = &arc.capacity {
            if *cap <= R::zero() {
                return Err(Error::Argument("non-positive arc capacity".into()));
            }
        }
    }
    let tol = if R::EXACT {
        R::zero()
    } else {
        R::from_f64(1e-12)
    };
    let total = crate::scalar::sum(&net.supplies);
    if total.abs() > tol {
        return Err(Error::Argument(format!(
            "supplies sum to {}, not zero",
            total.to_f64()
        )));
    }
    let mut excess = net.supplies.clone();
    // absorb a float rounding residue so internal balances close exactly
    if !total.is_zero() {
        if let Some(i) = (0..n).max_by(|&i, &j| {
            excess[i]
                .abs()
                .partial_cmp(&excess[j].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        }) {
            excess[i] = excess[i].clone() - total;
        }
    }

    let mut flows = vec![R::zero(); net.arcs.len()];
    let mut pi = vec![R::zero(); n];
    // residual arcs: (head, arc index, forward?)
    let mut adj: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); n];
    for (idx, arc) in net.arcs.iter().enumerate() {
        adj[arc.from].push((arc.to, idx, true));
        adj[arc.to].push((arc.from, idx, false));
    }
    let residual = |flows: &[R], idx: usize, fwd: bool| -> Option<R> {
        let arc = &net.arcs[idx];
        if fwd {
            match &arc.capacity {
                Some(cap) => Some(cap.clone() - flows[idx].clone()),
                None => None, // infinite
            }
        } else {
            Some(flows[idx].clone())
        }
    };

    let max_rounds = 4 * (n + net.arcs.len()) + 16;
    for _ in 0..max_rounds {
        let Some(source) = (0..n).find(|&i| excess[i] > tol) else {
            break;
        };
        // Dijkstra on reduced costs from `source`
        let mut dist: Vec<Option<R>> = vec![None; n];
        let mut done = vec![false; n];
        let mut prev: Vec<Option<(usize, usize, bool)>> = vec![None; n];
        dist[source] = Some(R::zero());
        loop {
            let mut u = None;
            for i in 0..n {
                if done[i] || dist[i].is_none() {
                    continue;
                }
                u = match u {
                    None => Some(i),
                    Some(cur) => {
                        if dist[i].clone().unwrap() < dist[cur].clone().unwrap() {
                            Some(i)
                        } else {
                            Some(cur)
                        }
                    }
                };
            }
            let Some(u) = u else { break };
            done[u] = true;
            let du = dist[u].clone().unwrap();
            for &(v, idx, fwd) in &adj[u] {
                if done[v] {
                    continue;
                }
                let open = match residual(&flows, idx, fwd) {
                    Some(res) => res > tol,
                    None => true,
                };
                if !open {
                    continue;
                }
                let base = if fwd {
                    net.arcs[idx].cost.clone()
                } else {
                    -net.arcs[idx].cost.clone()
                };
                let red = base + pi[u].clone() - pi[v].clone();
                let cand = du.clone() + red;
                let better = match &dist[v] {
                    None => true,
                    Some(dv) => cand < dv.clone(),
                };
                if better {
                    dist[v] = Some(cand);
                    prev[v] = Some((u, idx, fwd));
                }
            }
        }
        let sink = (0..n)
            .filter(|&i| excess[i] < -tol.clone() && dist[i].is_some())
            .min_by(|&i, &j| {
                dist[i]
                    .clone()
                    .unwrap()
                    .partial_cmp(&dist[j].clone().unwrap())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(sink) = sink else {
            let unreachable: Vec<usize> =
                (0..n).filter(|&i| excess[i] < -tol.clone()).collect();
            return Err(Error::Infeasible(format!(
                "demand nodes {unreachable:?} are unreachable from remaining supply \
                 (cut certificate: nodes with finite distance {:?})",
                (0..n).filter(|&i| dist[i].is_some()).collect::<Vec<_>>()
            )));
        };
        // update potentials on labeled nodes
        let dsink = dist[sink].clone().unwrap();
        for i in 0..n {
            let di = dist[i].clone().unwrap_or(dsink.clone());
            pi[i] = pi[i].clone() + crate::scalar::min(di, dsink.clone());
        }
        // bottleneck
        let mut amount = crate::scalar::min(excess[source].clone(), -excess[sink].clone());
        let mut v = sink;
        while v != source {
            let (u, idx, fwd) = prev[v].clone().unwrap();
            if let Some(res) = residual(&flows, idx, fwd) {
                amount = crate::scalar::min(amount, res);
            }
            v = u;
        }
        if amount <= tol {
            return Err(Error::Numerical("vanishing augmentation amount".into()));
        }
        let mut v = sink;
        while v != source {
            let (u, idx, fwd) = prev[v].clone().unwrap();
            if fwd {
                flows[idx] = flows[idx].clone() + amount.clone();
            } else {
                flows[idx] = flows[idx].clone() - amount.clone();
            }
            v = u;
        }
        excess[source] = excess[source].clone() - amount.clone();
        excess[sink] = excess[sink].clone() + amount;
    }
    if (0..n).any(|i| excess[i].abs() > tol.clone() + tol.clone()) {
        return Err(Error::Solver("flow did not converge within round budget".into()));
    }

    // certify: reduced-cost nonnegativity on all residual arcs
    for (idx, arc) in net.arcs.iter().enumerate() {
        let fwd_open = match &arc.capacity {
            Some(cap) => cap.clone() - flows[idx].clone() > tol,
            None => true,
        };
        let red = arc.cost.clone() + pi[arc.from].clone() - pi[arc.to].clone();
        let slack = if R::EXACT {
            R::zero()
        } else {
            R::from_f64(1e-9) * (R::one() + arc.cost.abs())
        };
        if fwd_open && red < -slack.clone() {
            return Err(Error::Internal(format!(
                "arc {idx}: residual reduced cost {} < 0",
                red.to_f64()
            )));
        }
        if flows[idx] > tol && red > slack {
            return Err(Error::Internal(format!(
                "arc {idx}: flow-carrying arc has reduced cost {} > 0",
                red.to_f64()
            )));
        }
    }
    let cost = crate::scalar::sum(
        &net.arcs
            .iter()
            .zip(flows.iter())
            .map(|(arc, f)| arc.cost.clone() * f.clone())
            .collect::<Vec<_>>(),
    );
    Ok(McfSolution {
        cost,
        flows,
        potentials: pi,
    })
}

// ---------------------------------------------------------------------------
// nonsmooth minimax descent
// ---------------------------------------------------------------------------

/// Minimize `max over pairs of ||F(i) - F(j)||_2 / denom(i,j)` over the free
/// point images in R^dim, with some images fixed.
#[derive(Debug, Clone)]
pub struct MaxRatioProblem {
    pub dim: usize,
    pub num_points: usize,
    /// (i, j, denominator > 0)
    pub pairs: Vec<(usize, usize, f64)>,
    pub fixed: Vec<(usize, Vec<f64>)>,
}

#[derive(Debug, Clone)]
pub struct MaxRatioSolution {
    /// Best max-ratio found: an upper bound on the true minimum, never
    /// certified optimal.
    pub value: f64,
    /// Images of all points, fixed ones included.
    pub assignment: Vec<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
    /// Best-so-far samples from the descent, for convergence inspection.
    pub trace: Vec<f64>,
}

pub const MAX_RATIO_RESTARTS: usize = 5;
const MAX_RATIO_ITERS: usize = 20_000;
const CONVERGENCE_WINDOW: usize = 1_000;
const CONVERGENCE_REL: f64 = 1e-6;

/// Projected subgradient with Polyak-style steps and multi-restart, followed
/// by a shrinking random polish around each restart's incumbent.
pub fn minimize_max_ratio(p: &MaxRatioProblem, seed: u64) -> Result<MaxRatioSolution> {
    if p.dim == 0 {
        return Err(Error::Argument("dimension must be >= 1".into()));
    }
    if p.fixed.is_empty() {
        return Err(Error::Argument("need at least one fixed point".into()));
    }
    let mut is_fixed = vec![false; p.num_points];
    let mut anchor = vec![vec![0.0; p.dim]; p.num_points];
    for (i, v) in &p.fixed {
        if *i >= p.num_points {
            return Err(Error::Argument(format!("fixed index {i} out of range")));
        }
        if v.len() != p.dim {
            return Err(Error::Shape("fixed point has wrong dimension".into()));
        }
        if is_fixed[*i] {
            return Err(Error::Argument(format!("point {i} fixed twice")));
        }
        is_fixed[*i] = true;
        anchor[*i] = v.clone();
    }
    for (i, j, denom) in &p.pairs {
        if *i >= p.num_points || *j >= p.num_points || i == j {
            return Err(Error::Argument("bad pair indices".into()));
        }
        if !(*denom > 0.0) || !denom.is_finite() {
            return Err(Error::Argument("pair denominator must be positive".into()));
        }
    }
    let free: Vec<usize> = (0..p.num_points).filter(|&i| !is_fixed[i]).collect();
    let nfree = free.len();
    let slot: Vec<Option<usize>> = {
        let mut s = vec![None; p.num_points];
        for (k, &i) in free.iter().enumerate() {
            s[i] = Some(k);
        }
        s
    };

    let coords = |x: &[f64], i: usize, c: usize| -> f64 {
        match slot[i] {
            Some(k) => x[k * p.dim + c],
            None => anchor[i][c],
        }
    };
    let eval = |x: &[f64]| -> (f64, usize) {
        let mut best = 0.0;
        let mut arg = 0;
        for (t, (i, j, denom)) in p.pairs.iter().enumerate() {
            let mut sq = 0.0;
            for c in 0..p.dim {
                let d = coords(x, *i, c) - coords(x, *j, c);
                sq += d * d;
            }
            let v = sq.sqrt() / denom;
            if v > best {
                best = v;
                arg = t;
            }
        }
        (best, arg)
    };

    // centroid of fixed images and their spread, for initialization scale
    let mut centroid = vec![0.0; p.dim];
    for (_, v) in &p.fixed {
        for c in 0..p.dim {
            centroid[c] += v[c] / p.fixed.len() as f64;
        }
    }
    let mut spread: f64 = 1.0;
    for (_, u) in &p.fixed {
        for (_, v) in &p.fixed {
            let d: f64 = (0..p.dim).map(|c| (u[c] - v[c]).powi(2)).sum::<f64>().sqrt();
            spread = spread.max(d);
        }
    }

    if nfree == 0 {
        let (value, _) = eval(&[]);
        return Ok(MaxRatioSolution {
            value,
            assignment: anchor,
            converged: true,
            iterations: 0,
            trace: vec![value],
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut global_best = f64::INFINITY;
    let mut global_x = vec![0.0; nfree * p.dim];
    let mut global_converged = false;
    let mut iterations = 0usize;
    let mut trace = Vec::new();

    for restart in 0..MAX_RATIO_RESTARTS {
        let mut x: Vec<f64> = (0..nfree * p.dim)
            .map(|idx| {
                let base = centroid[idx % p.dim];
                if restart == 0 {
                    base
                } else {
                    base + rng.random_range(-spread..=spread)
                }
            })
            .collect();
        let (mut best, _) = eval(&x);
        let mut xbest = x.clone();
        let mut delta = 0.05 * (1.0 + best);
        let mut stall = 0usize;
        let mut converged = false;

        for k in 0..MAX_RATIO_ITERS {
            iterations += 1;
            let (f, arg) = eval(&x);
            if f < best {
                let rel = (best - f) / best.max(1.0);
                best = f;
                xbest = x.clone();
                stall = if rel >= CONVERGENCE_REL { 0 } else { stall + 1 };
            } else {
                stall += 1;
            }
            if stall >= CONVERGENCE_WINDOW {
                converged = true;
                break;
            }
            if restart == 0 && k % 50 == 0 {
                trace.push(best);
            }
            if f == 0.0 {
                converged = true;
                break;
            }
            // subgradient of the active term
            let (i, j, denom) = p.pairs[arg];
            let mut g = vec![0.0; nfree * p.dim];
            let dist = f * denom;
            if dist > 0.0 {
                for c in 0..p.dim {
                    let d = (coords(&x, i, c) - coords(&x, j, c)) / (dist * denom);
                    if let Some(ki) = slot[i] {
                        g[ki * p.dim + c] += d;
                    }
                    if let Some(kj) = slot[j] {
                        g[kj * p.dim + c] -= d;
                    }
                }
            }
            let gnorm2: f64 = g.iter().map(|v| v * v).sum();
            if gnorm2 == 0.0 {
                break; // active pair has both endpoints fixed: f is a floor
            }
            let target = best - delta;
            let step = (f - target).max(0.0) / gnorm2;
            for (xi, gi) in x.iter_mut().zip(g.iter()) {
                *xi -= step * gi;
            }
            delta = (delta * 0.9995).max(1e-12);
        }

        // shrinking random polish around the incumbent
        let mut radius = (0.05 * spread).max(10.0 * delta);
        while radius > 1e-10 {
            let mut improved = false;
            for _ in 0..60 {
                iterations += 1;
                let cand: Vec<f64> = xbest
                    .iter()
                    .map(|v| v + rng.random_range(-radius..=radius))
                    .collect();
                let (f, _) = eval(&cand);
                if f < best {
                    best = f;
                    xbest = cand;
                    improved = true;
                }
            }
            if !improved {
                radius *= 0.6;
            }
        }
        if restart == 0 {
            trace.push(best);
        }
        if best < global_best {
            global_best = best;
            global_x = xbest;
            global_converged = converged;
        }
    }

    let mut assignment = anchor;
    for (k, &i) in free.iter().enumerate() {
        assignment[i] = global_x[k * p.dim..(k + 1) * p.dim].to_vec();
    }
    Ok(MaxRatioSolution {
        value: global_best,
        assignment,
        converged: global_converged,
        iterations,
        trace,
    })
}
