//! JSON schemas for instances and reports. Parsing is mode-aware: in exact
//! mode JSON number literals become rationals digit-for-digit (no float
//! round-trip), courtesy of serde_json's arbitrary-precision numbers.
//! Emission always uses shortest-round-trip decimals.

use crate::extension::{ExtensionProblem, Target};
use crate::graph::WeightedGraph;
use crate::metric::{FiniteMetric, SubsetHandle};
use crate::scalar::{rational_from_decimal, Rational, Scalar};
use crate::wasserstein::{LipschitzPotential, SignedMeasure, TransportPlan};
use crate::zero_extension::{ZeroExtensionInstance, ZeroExtensionResult};
use crate::{Error, Result};
use serde_json::{json, Map, Number, Value};

fn err(msg: impl Into<String>) -> Error {
    Error::Serde(msg.into())
}

/// Mode-aware number conversion: exact mode parses the decimal literal
/// itself, float mode takes the f64 value.
pub fn number_to_scalar<R: Scalar>(n: &Number) -> Result<R> {
    if R::EXACT {
        let r: Rational = rational_from_decimal(&n.to_string())
            .ok_or_else(|| err(format!("cannot parse {n} as an exact rational")))?;
        // Rational is the only exact Scalar; route through its f64-free repr
        Ok(rational_to_scalar(&r))
    } else {
        Ok(R::from_f64(n.as_f64().ok_or_else(|| {
            err(format!("number {n} does not fit in an f64"))
        })?))
    }
}

// Safe only when R::EXACT (R = Rational); reconstructs through ratio parts.
fn rational_to_scalar<R: Scalar>(r: &Rational) -> R {
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
        return R::ratio(n, d);
    }
    // huge components: digit-by-digit reconstruction
    let mut out = R::zero();
    let ten = R::from_int(10);
    for c in r.numer().to_string().chars() {
        if c == '-' {
            continue;
        }
        out = out * ten.clone() + R::from_int((c as u8 - b'0') as i64);
    }
    let mut den = R::zero();
    for c in r.denom().to_string().chars() {
        den = den * ten.clone() + R::from_int((c as u8 - b'0') as i64);
    }
    let mut out = out / den;
    if r.numer().sign() == num_bigint::Sign::Minus {
        out = -out;
    }
    out
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| err(format!("missing field \"{key}\"")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| err(format!("{what} must be an array")))
}

fn as_number<R: Scalar>(v: &Value, what: &str) -> Result<R> {
    match v {
        Value::Number(n) => number_to_scalar(n),
        _ => Err(err(format!("{what} must be a number"))),
    }
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| err(format!("{what} must be a nonnegative integer")))
}

/// Shortest round-trip decimal for report files.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn scalar_value<R: Scalar>(x: &R) -> Value {
    json!(x.to_f64())
}

// ---- metric ----------------------------------------------------------------

/// {"points": [labels], "dist": [[numbers]]}
pub fn parse_metric<R: Scalar>(v: &Value) -> Result<FiniteMetric<R>> {
    let points: Vec<String> = as_array(get(v, "points")?, "points")?
        .iter()
        .map(|p| {
            p.as_str()
                .map(str::to_owned)
                .ok_or_else(|| err("points must be strings"))
        })
        .collect::<Result<_>>()?;
    let dist: Vec<Vec<R>> = as_array(get(v, "dist")?, "dist")?
        .iter()
        .map(|row| {
            as_array(row, "dist row")?
                .iter()
                .map(|x| as_number(x, "distance"))
                .collect()
        })
        .collect::<Result<_>>()?;
    FiniteMetric::from_matrix(points, dist)
}

pub fn metric_to_json<R: Scalar>(m: &FiniteMetric<R>) -> Value {
    json!({
        "points": m.points(),
        "dist": m.matrix().iter().map(|row| row.iter().map(scalar_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

// ---- graph -----------------------------------------------------------------

/// {"n": int, "edges": [[u, v, weight], ...]}
pub fn parse_graph<R: Scalar>(v: &Value) -> Result<WeightedGraph<R>> {
    let (n, edges) = parse_graph_parts(v)?;
    WeightedGraph::new(n, edges)
}

/// Same schema, but without the positive-weight constraint (0-Extension
/// instances allow zero weights).
pub fn parse_graph_parts<R: Scalar>(v: &Value) -> Result<(usize, Vec<(usize, usize, R)>)> {
    let n = as_usize(get(v, "n")?, "n")?;
    let edges = as_array(get(v, "edges")?, "edges")?
        .iter()
        .map(|e| {
            let t = as_array(e, "edge")?;
            if t.len() != 3 {
                return Err(err("edges must be [u, v, weight] triples"));
            }
            Ok((
                as_usize(&t[0], "edge endpoint")?,
                as_usize(&t[1], "edge endpoint")?,
                as_number(&t[2], "edge weight")?,
            ))
        })
        .collect::<Result<_>>()?;
    Ok((n, edges))
}

pub fn graph_to_json<R: Scalar>(g: &WeightedGraph<R>) -> Value {
    json!({
        "n": g.n(),
        "edges": g.edges().iter().map(|(u, v, w)| json!([u, v, w.to_f64()])).collect::<Vec<_>>(),
    })
}

// ---- signed measure ----------------------------------------------------------

/// {"values": {point-label: number}}; labels resolve against the metric,
/// unmentioned points get 0.
pub fn parse_measure<R: Scalar>(v: &Value, m: &FiniteMetric<R>) -> Result<SignedMeasure<R>> {
    let table = get(v, "values")?
        .as_object()
        .ok_or_else(|| err("values must be an object of label: number"))?;
    let mut values = vec![R::zero(); m.len()];
    for (label, x) in table {
        let idx = m
            .index_of(label)
            .ok_or_else(|| err(format!("unknown point label \"{label}\"")))?;
        values[idx] = as_number(x, "measure value")?;
    }
    SignedMeasure::new(values)
}

pub fn measure_to_json<R: Scalar>(f: &SignedMeasure<R>, m: &FiniteMetric<R>) -> Value {
    let mut table = Map::new();
    for (i, v) in f.values().iter().enumerate() {
        table.insert(m.points()[i].clone(), scalar_value(v));
    }
    json!({ "values": Value::Object(table) })
}

pub fn transport_report_to_json<R: Scalar>(
    value: &R,
    plan: &TransportPlan<R>,
    potential: Option<&LipschitzPotential<R>>,
) -> Value {
    let mut out = json!({
        "value": value.to_f64(),
        "plan": plan.plan.iter().map(|row| row.iter().map(scalar_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    if let Some(g) = potential {
        out["potential"] = Value::Array(g.g.iter().map(scalar_value).collect());
    }
    out
}

// ---- 0-extension -------------------------------------------------------------

/// {"graph": {...}, "terminals": [vertex indices], "d_t": [[numbers]]}
pub fn parse_zext_instance<R: Scalar>(v: &Value) -> Result<ZeroExtensionInstance<R>> {
    let (n, edges) = parse_graph_parts(get(v, "graph")?)?;
    let terminals: Vec<usize> = as_array(get(v, "terminals")?, "terminals")?
        .iter()
        .map(|t| as_usize(t, "terminal index"))
        .collect::<Result<_>>()?;
    let dist: Vec<Vec<R>> = as_array(get(v, "d_t")?, "d_t")?
        .iter()
        .map(|row| {
            as_array(row, "d_t row")?
                .iter()
                .map(|x| as_number(x, "d_t entry"))
                .collect()
        })
        .collect::<Result<_>>()?;
    let labels = terminals.iter().map(|t| format!("t{t}")).collect();
    let d_t = FiniteMetric::from_matrix(labels, dist)?;
    let handle = SubsetHandle::new(terminals, n)?;
    ZeroExtensionInstance::new(n, edges, handle, d_t)
}

pub fn zext_result_to_json<R: Scalar>(r: &ZeroExtensionResult<R>) -> Value {
    json!({
        "met": r.met.to_f64(),
        "emd": r.emd.to_f64(),
        "opt": r.opt.to_f64(),
        "opt_partition": r.opt_partition,
        "met_metric": r.met_metric.iter().map(|row| row.iter().map(scalar_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "emd_measures": r.emd_measures.iter().map(|row| row.iter().map(scalar_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

// ---- extension problems --------------------------------------------------------

/// {"metric": {...}, "subset": [indices], "alpha": number,
///  "target": {"kind": "real"|"l1"|"linf"|"l2"|"w1", "dim": k, "metric": {...}},
///  "boundary": [[numbers]]}
pub fn parse_extension_problem(v: &Value) -> Result<ExtensionProblem> {
    let ambient = parse_metric::<f64>(get(v, "metric")?)?;
    let subset: Vec<usize> = as_array(get(v, "subset")?, "subset")?
        .iter()
        .map(|x| as_usize(x, "subset index"))
        .collect::<Result<_>>()?;
    let alpha: f64 = as_number(get(v, "alpha")?, "alpha")?;
    let tv = get(v, "target")?;
    let kind = get(tv, "kind")?
        .as_str()
        .ok_or_else(|| err("target.kind must be a string"))?;
    let dim = |tv: &Value| -> Result<usize> { as_usize(get(tv, "dim")?, "target.dim") };
    let target = match kind {
        "real" => Target::RealLine,
        "l1" => Target::Ell1(dim(tv)?),
        "linf" => Target::EllInf(dim(tv)?),
        "l2" => Target::Euclidean(dim(tv)?),
        "w1" => Target::Wasserstein(parse_metric::<f64>(get(tv, "metric")?)?),
        _ => return Err(err(format!("unknown target kind \"{kind}\""))),
    };
    let boundary: Vec<Vec<f64>> = as_array(get(v, "boundary")?, "boundary")?
        .iter()
        .map(|row| {
            as_array(row, "boundary vector")?
                .iter()
                .map(|x| as_number(x, "boundary value"))
                .collect()
        })
        .collect::<Result<_>>()?;
    let n = ambient.len();
    ExtensionProblem::new(ambient, SubsetHandle::new(subset, n)?, alpha, target, boundary)
}

pub fn target_kind(t: &Target) -> &'static str {
    match t {
        Target::RealLine => "real",
        Target::Ell1(_) => "l1",
        Target::EllInf(_) => "linf",
        Target::Euclidean(_) => "l2",
        Target::Wasserstein(_) => "w1",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zero_extension::relaxation_chain_check;

    #[test]
    fn metric_round_trips_byte_stable() {
        let v: Value = serde_json::from_str(
            r#"{"points":["a","b","c"],"dist":[[0,1,1.5],[1,0,1.25],[1.5,1.25,0]]}"#,
        )
        .unwrap();
        let m = parse_metric::<f64>(&v).unwrap();
        let once = serde_json::to_string(&metric_to_json(&m)).unwrap();
        let again =
            serde_json::to_string(&metric_to_json(&parse_metric::<f64>(&metric_to_json(&m)).unwrap()))
                .unwrap();
        assert_eq!(once, again);
    }

    #[test]
    fn exact_mode_parses_decimals_exactly() {
        let v: Value = serde_json::from_str(r#"{"x": 0.1}"#).unwrap();
        let n = v["x"].as_number().unwrap();
        let r: Rational = number_to_scalar(n).unwrap();
        assert_eq!(r, Rational::ratio(1, 10));
    }

    #[test]
    fn graph_and_measure_schemas() {
        let gv: Value =
            serde_json::from_str(r#"{"n":3,"edges":[[0,1,1.0],[1,2,2.0]]}"#).unwrap();
        let g = parse_graph::<f64>(&gv).unwrap();
        assert_eq!(g.edge_count(), 2);
        let m = crate::metric::shortest_path_metric(&g).unwrap();
        let fv: Value = serde_json::from_str(r#"{"values":{"0":1,"2":-1}}"#).unwrap();
        let f = parse_measure::<f64>(&fv, &m).unwrap();
        assert_eq!(f.values()[0], 1.0);
        assert_eq!(f.values()[1], 0.0);
        let back = measure_to_json(&f, &m);
        assert_eq!(back["values"]["2"], json!(-1.0));
    }

    #[test]
    fn zext_star_instance_parses_and_solves() {
        let v: Value = serde_json::from_str(
            r#"{
                "graph": {"n": 4, "edges": [[0,3,1],[1,3,1],[2,3,1]]},
                "terminals": [0,1,2],
                "d_t": [[0,1,1],[1,0,1],[1,1,0]]
            }"#,
        )
        .unwrap();
        let inst = parse_zext_instance::<Rational>(&v).unwrap();
        let res = relaxation_chain_check(&inst).unwrap();
        assert_eq!(res.met, Rational::ratio(3, 2));
        assert_eq!(res.emd.to_f64(), 2.0);
        assert_eq!(res.opt.to_f64(), 2.0);
    }

    #[test]
    fn extension_problem_parses_each_target() {
        let base = r#"{
            "metric": {"points":["x","m","y"],"dist":[[0,1,2],[1,0,1],[2,1,0]]},
            "subset": [0,2],
            "alpha": 1.0,
            "boundary": [[0.0],[1.0]],
            "target": {"kind":"real"}
        }"#;
        let v: Value = serde_json::from_str(base).unwrap();
        let p = parse_extension_problem(&v).unwrap();
        assert_eq!(target_kind(&p.target), "real");
        let sol = crate::extension::mcshane_extension(&p).unwrap();
        assert!((sol.constant - 0.5).abs() < 1e-12);

        let mut v2 = v.clone();
        v2["target"] = json!({"kind":"l2","dim":1});
        v2["boundary"] = json!([[0.0],[1.0]]);
        assert_eq!(
            target_kind(&parse_extension_problem(&v2).unwrap().target),
            "l2"
        );
        let mut v3 = v;
        v3["target"] = json!({"kind":"w1","metric":{"points":["a","b"],"dist":[[0,2],[2,0]]}});
        v3["boundary"] = json!([[0.5,-0.5],[-0.5,0.5]]);
        let p3 = parse_extension_problem(&v3).unwrap();
        assert_eq!(target_kind(&p3.target), "w1");
    }

    #[test]
    fn shortest_round_trip_formatting() {
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(2.0), "2");
        assert_eq!(fmt_f64(1.0 / 3.0), "0.3333333333333333");
    }
}
