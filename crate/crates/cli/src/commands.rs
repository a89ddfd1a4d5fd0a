use envderiv::combinatorics::check_identities;
use envderiv::derivative::{
    derivative_from_table, derivative_leibniz, derivative_recursive, format_ratio, HypercubeTable,
};
use envderiv::extremes::{
    exhaustive_extremes, lanes_family_scan, randomized_search, table_bounds, ExtremeReport, SearchConfig,
};
use envderiv::lanes::{attainment_tuples, embed_lanes, lane_derivative_closed_form, LaneSpec};
use envderiv::lattice::{EdgeSubset, ExceptionEdge, LatticeSpec};
use envderiv::passage::{classify_all, geodesic_dag};
use envderiv::variance::{decomposition, monte_carlo_variance, talagrand_terms, BernoulliParam};
use envderiv::{Lattice, Normalized, Time};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::args::{Command, Format, Global, Method, Mode};
use crate::failure::{CliResult, Failure};
use crate::input::{lattice_input, parse_edge, weights, Instance};

pub struct Outcome {
    pub text: String,
    /// A proven bound was breached.
    pub violation: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, violation: None }
    }
}

const DEFAULT_BUDGET: u64 = 2000;

fn pretty<S: Serialize>(v: &S) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn format_of(g: &Global, default: Format) -> Format {
    g.format.unwrap_or(default)
}

fn json_only(g: &Global, what: &str) -> CliResult<()> {
    if g.format == Some(Format::Csv) {
        return Err(Failure::Usage(format!("{what} has no CSV form; use --format json")));
    }
    Ok(())
}

fn need_seed(g: &Global, what: &str) -> CliResult<u64> {
    g.seed.ok_or_else(|| Failure::Usage(format!("{what} is randomized and needs --seed")))
}

fn edge_json(l: &Lattice, e: envderiv::lattice::EdgeId) -> CliResult<ExceptionEdge> {
    let (base, axis) = l.decode_edge(e)?;
    Ok(ExceptionEdge { base, axis })
}

pub fn dispatch(g: &Global, cmd: &Command) -> CliResult<Outcome> {
    match cmd {
        Command::Time => cmd_time(g),
        Command::Derivative { edges, method } => cmd_derivative(g, edges, *method),
        Command::Classify => cmd_classify(g),
        Command::Lanes { m1, m2, beta1, beta2, embed } => {
            cmd_lanes(g, LaneSpec::new(*m1, *m2, *beta1, *beta2)?, *embed)
        }
        Command::SearchExtremes { max_beta } => cmd_search_extremes(g, *max_beta),
        Command::Variance { max_size, mc_samples } => cmd_variance(g, *max_size, *mc_samples),
        Command::Identities { check, max } => cmd_identities(g, *check, *max),
        Command::ReproduceTable { max_beta } => cmd_reproduce_table(g, *max_beta),
        Command::HuntK5 { max_beta } => cmd_hunt_k5(g, *max_beta),
    }
}

fn cmd_time(g: &Global) -> CliResult<Outcome> {
    let (l, env) = lattice_input(g)?;
    let dag = geodesic_dag(&l, &env);
    let on = dag.geodesic_edges(&l, &env);
    if format_of(g, Format::Json) == Format::Csv {
        return Ok(Outcome::ok(format!(
            "passage_time,geodesic_edges\n{},{}\n",
            dag.time,
            on.iter().filter(|&&x| x).count()
        )));
    }
    let edges = l.edge_ids().filter(|e| on[e.index()]).map(|e| edge_json(&l, e)).collect::<CliResult<Vec<_>>>()?;
    Ok(Outcome::ok(pretty(&json!({
        "instance": Instance::of(&l),
        "passage_time": dag.time,
        "geodesic_edges": edges,
    }))))
}

fn cmd_derivative(g: &Global, edges: &[String], method: Method) -> CliResult<Outcome> {
    let (l, env) = lattice_input(g)?;
    let ids = edges
        .iter()
        .map(|s| {
            let e = parse_edge(s)?;
            Ok(l.encode_edge(&e.base, e.axis)?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let s = EdgeSubset::new(ids)?;
    let d = match method {
        Method::Leibniz => derivative_leibniz(&l, &env, &s)?,
        Method::Recursive => derivative_recursive(&l, &env, &s)?,
        Method::Table => {
            let table = HypercubeTable::build(&l, &env, &s)?;
            derivative_from_table(&table, &s, 0)?
        }
    };
    if format_of(g, Format::Json) == Format::Csv {
        return Ok(Outcome::ok(format!(
            "order,raw,normalized\n{},{},{}\n",
            s.order(),
            d.raw,
            format_ratio(&d.normalized)
        )));
    }
    let s_json = s.iter().map(|e| edge_json(&l, e)).collect::<CliResult<Vec<_>>>()?;
    Ok(Outcome::ok(pretty(&json!({
        "instance": Instance::of(&l),
        "S": s_json,
        "raw": d.raw,
        "normalized": format_ratio(&d.normalized),
    }))))
}

fn cmd_classify(g: &Global) -> CliResult<Outcome> {
    let (l, env) = lattice_input(g)?;
    let classes = classify_all(&l, &env);
    if format_of(g, Format::Json) == Format::Csv {
        let mut out = String::new();
        let coords: Vec<String> = (0..l.dim()).map(|i| format!("x{i}")).collect();
        out.push_str(&format!("{},axis,essential,semi_essential,influential,very_influential\n", coords.join(",")));
        for (e, c) in l.edge_ids().zip(&classes) {
            let (base, axis) = l.decode_edge(e)?;
            let base: Vec<String> = base.iter().map(i64::to_string).collect();
            out.push_str(&format!(
                "{},{axis},{},{},{},{}\n",
                base.join(","),
                c.essential,
                c.semi_essential,
                c.influential,
                c.very_influential
            ));
        }
        return Ok(Outcome::ok(out));
    }
    let records = l
        .edge_ids()
        .zip(&classes)
        .map(|(e, c)| {
            Ok(json!({
                "edge": edge_json(&l, e)?,
                "essential": c.essential,
                "semi_essential": c.semi_essential,
                "influential": c.influential,
                "very_influential": c.very_influential,
            }))
        })
        .collect::<CliResult<Vec<Json>>>()?;
    Ok(Outcome::ok(pretty(&json!({ "instance": Instance::of(&l), "edges": records }))))
}

#[derive(Serialize)]
struct LanesOutput {
    m1: u32,
    m2: u32,
    beta1: u32,
    beta2: u32,
    #[serde(rename = "D_normalized")]
    d_normalized: i64,
    embedded: bool,
    verified: bool,
    /// The embedding lives in a 2-dimensional box.
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice_normalized: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges: Option<usize>,
}

fn cmd_lanes(g: &Global, spec: LaneSpec, embed: bool) -> CliResult<Outcome> {
    let d = lane_derivative_closed_form(&spec)?.0;
    let mut out = LanesOutput {
        m1: spec.m1,
        m2: spec.m2,
        beta1: spec.beta1,
        beta2: spec.beta2,
        d_normalized: d,
        embedded: false,
        verified: false,
        dimension: None,
        lattice_normalized: None,
        edges: None,
    };
    if embed {
        let (a, b) = weights(g);
        let e = embed_lanes(&spec, a, b)?;
        let got = derivative_leibniz(&e.lattice, &e.env, &e.subset)?;
        if got.normalized != Ratio::from_integer(d) {
            return Err(Failure::Verification(format!(
                "embedded derivative {} differs from the closed form {d}",
                format_ratio(&got.normalized)
            )));
        }
        out.embedded = true;
        out.verified = true;
        out.dimension = Some(e.lattice.dim());
        out.lattice_normalized = Some(format_ratio(&got.normalized));
        out.edges = Some(e.lattice.edge_count());
    }
    if format_of(g, Format::Json) == Format::Csv {
        return Ok(Outcome::ok(format!(
            "m1,m2,beta1,beta2,D_normalized,embedded,verified\n{},{},{},{},{},{},{}\n",
            out.m1, out.m2, out.beta1, out.beta2, out.d_normalized, out.embedded, out.verified
        )));
    }
    Ok(Outcome::ok(pretty(&out)))
}

/// Envelope and table checks on a lattice report.
fn audit(report: &ExtremeReport<Time>) -> Option<String> {
    if !report.within_envelope() {
        return Some(format!(
            "order {} values [{}, {}] leave the envelope",
            report.order,
            format_ratio(&report.min_normalized),
            format_ratio(&report.max_normalized)
        ));
    }
    if report.within_table() == Some(false) {
        return Some(format!(
            "order {} values [{}, {}] leave the proven table interval",
            report.order,
            format_ratio(&report.min_normalized),
            format_ratio(&report.max_normalized)
        ));
    }
    match &report.switch_audit {
        Some(a) if !a.consistent => Some("a direction switch appeared without b ≥ 3a and ∂_S f ≥ 3a − b".into()),
        _ => None,
    }
}

fn report_json(report: &ExtremeReport<Time>, reduced: Option<bool>) -> Json {
    let mut v = json!({
        "report": report,
        "within_envelope": report.within_envelope(),
        "within_table": report.within_table(),
    });
    if let Some(r) = reduced {
        v["reduced_box"] = json!(r);
    }
    if report.conjectural {
        v["label"] = json!("conjectural evidence");
    }
    v
}

fn cmd_search_extremes(g: &Global, max_beta: u32) -> CliResult<Outcome> {
    json_only(g, "search-extremes")?;
    let k = g.k.ok_or_else(|| Failure::Usage("search-extremes needs --k".into()))?;
    let mode = g.mode.unwrap_or(Mode::Exhaustive);
    let (report, reduced) = match mode {
        Mode::Lanes => (lanes_family_scan::<Time>(k, max_beta)?, None),
        Mode::Exhaustive => {
            let (l, _) = lattice_input(g)?;
            (exhaustive_extremes(&l, k)?, Some(l.spec().is_reduced()))
        }
        Mode::Random => {
            let seed = need_seed(g, "random mode")?;
            let (l, env) = lattice_input(g)?;
            let mut cfg = SearchConfig::new(g.budget.unwrap_or(DEFAULT_BUDGET), seed);
            if g.env.is_some() {
                cfg.start = Some(env);
            }
            (randomized_search(&l, k, &cfg)?, Some(l.spec().is_reduced()))
        }
    };
    Ok(Outcome { text: pretty(&report_json(&report, reduced)), violation: audit(&report) })
}

fn cmd_variance(g: &Global, max_size: Option<usize>, mc_samples: Option<u64>) -> CliResult<Outcome> {
    let p = g.p.ok_or_else(|| Failure::Usage("variance needs --p".into()))?;
    let param = BernoulliParam::new(p)?;
    let (l, _) = lattice_input(g)?;
    let report = decomposition(&l, param, max_size.unwrap_or(l.edge_count()))?;
    if format_of(g, Format::Csv) == Format::Csv {
        if mc_samples.is_some() || g.k.is_some() {
            return Err(Failure::Usage("--mc-samples and --k need --format json".into()));
        }
        return Ok(Outcome::ok(report.to_csv()));
    }
    let mut v = json!({
        "instance": Instance::of(&l),
        "decomposition": report,
        "relative_residual": report.relative_residual(),
    });
    if let Some(k) = g.k {
        v["talagrand"] = json!(talagrand_terms(&l, param, k)?);
        v["talagrand_constant"] = json!("C=1 reference scale");
    }
    if let Some(n) = mc_samples {
        let seed = need_seed(g, "--mc-samples")?;
        v["monte_carlo"] = json!(monte_carlo_variance(&l, param, n, seed)?);
    }
    Ok(Outcome::ok(pretty(&v)))
}

fn cmd_identities(g: &Global, check: bool, max: i64) -> CliResult<Outcome> {
    json_only(g, "identities")?;
    if !check {
        return Err(Failure::Usage("nothing to do; pass --check".into()));
    }
    if !(0..=256).contains(&max) {
        return Err(Failure::Usage(format!("--max must lie in 0..=256, got {max}")));
    }
    let r = check_identities(max);
    let violation = (!r.ok()).then(|| format!("{} identity failures", r.failures.len()));
    let text = pretty(&json!({
        "max": max,
        "ok": r.ok(),
        "tail_cases": r.tail_cases,
        "vandermonde_cases": r.vandermonde_cases,
        "failures": r.failures,
    }));
    Ok(Outcome { text, violation })
}

/// Boxes with `|W|` between 8 and 14 used for the envelope checks.
pub fn table_instances(a: Time, b: Time) -> Vec<LatticeSpec<Time>> {
    vec![
        LatticeSpec::reduced(vec![(0, 3), (0, 1)], a, b).with_endpoints(vec![0, 0], vec![3, 1]),
        LatticeSpec::reduced(vec![(0, 2), (0, 2)], a, b).with_endpoints(vec![0, 0], vec![2, 2]),
    ]
}

#[derive(Serialize)]
struct Cell {
    expected: i64,
    attained: String,
    attained_by: String,
    exhaustive: Vec<String>,
    status: &'static str,
}

#[derive(Serialize)]
struct TableRow {
    k: usize,
    #[serde(rename = "U")]
    upper: Cell,
    #[serde(rename = "L")]
    lower: Cell,
}

fn cmd_reproduce_table(g: &Global, max_beta: u32) -> CliResult<Outcome> {
    let (a, b) = weights(g);
    let lattices = table_instances(a, b).into_iter().map(Lattice::build).collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for k in 1..=4usize {
        let (lo, hi) = table_bounds(k).expect("table covers k <= 4");
        let scans = lattices.iter().map(|l| exhaustive_extremes(l, k)).collect::<Result<Vec<_>, _>>()?;
        let ex_max: Vec<Normalized> = scans.iter().map(|r| r.max_normalized).collect();
        let ex_min: Vec<Normalized> = scans.iter().map(|r| r.min_normalized).collect();
        // attained values: the lane family for k ≥ 2, the scans themselves for k = 1
        let (att_hi, att_lo, by) = if k >= 2 {
            let r = lanes_family_scan::<Time>(k, max_beta)?;
            (r.max_normalized, r.min_normalized, "two-lane family")
        } else {
            (ex_max.iter().max().copied().unwrap(), ex_min.iter().min().copied().unwrap(), "exhaustive scan")
        };
        let cell = |expected: i64,
                    attained: Normalized,
                    exhaustive: &[Normalized],
                    inside: &dyn Fn(&Normalized) -> bool| Cell {
            expected,
            attained: format_ratio(&attained),
            attained_by: by.into(),
            exhaustive: exhaustive.iter().map(format_ratio).collect(),
            status: if attained == Ratio::from_integer(expected) && exhaustive.iter().all(inside) {
                "PASS"
            } else {
                "FAIL"
            },
        };
        let upper = cell(hi, att_hi, &ex_max, &|x| *x <= Ratio::from_integer(hi));
        let lower = cell(lo, att_lo, &ex_min, &|x| *x >= Ratio::from_integer(lo));
        rows.push(TableRow { k, upper, lower });
    }
    let all_pass = rows.iter().all(|r| r.upper.status == "PASS" && r.lower.status == "PASS");
    let violation = (!all_pass).then(|| "table reproduction failed".to_string());
    let text = if format_of(g, Format::Json) == Format::Csv {
        let mut s = String::from("k,U,U_attained,U_status,L,L_attained,L_status\n");
        for r in &rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.k,
                r.upper.expected,
                r.upper.attained,
                r.upper.status,
                r.lower.expected,
                r.lower.attained,
                r.lower.status
            ));
        }
        s
    } else {
        let instances: Vec<Instance> = lattices.iter().map(Instance::of).collect();
        pretty(&json!({ "rows": rows, "instances": instances, "all_pass": all_pass }))
    };
    Ok(Outcome { text, violation })
}

fn cmd_hunt_k5(g: &Global, max_beta: u32) -> CliResult<Outcome> {
    json_only(g, "hunt-k5")?;
    let seed = need_seed(g, "hunt-k5")?;
    let budget = g.budget.unwrap_or(DEFAULT_BUDGET);
    let (a, b) = weights(g);
    let lanes = lanes_family_scan::<Time>(5, max_beta)?;
    let (up, down) = attainment_tuples(5)?;
    let mut searches = Vec::new();
    let mut violation = audit(&lanes);
    let (mut max_found, mut min_found) = (lanes.max_normalized, lanes.min_normalized);
    for (i, spec) in [up, down].iter().enumerate() {
        let e = embed_lanes(spec, a, b)?;
        let mut cfg = SearchConfig::new(budget, seed.wrapping_add(i as u64));
        cfg.start = Some(e.env.clone());
        cfg.start_subset = Some(e.subset.clone());
        let r = randomized_search(&e.lattice, 5, &cfg)?;
        violation = violation.or_else(|| audit(&r));
        max_found = max_found.max(r.max_normalized);
        min_found = min_found.min(r.min_normalized);
        searches.push(json!({ "start": spec, "result": report_json(&r, Some(true)) }));
    }
    let text = pretty(&json!({
        "label": "conjectural evidence",
        "lanes": report_json(&lanes, None),
        "searches": searches,
        "max_found": format_ratio(&max_found),
        "min_found": format_ratio(&min_found),
        "beats_lanes": max_found > lanes.max_normalized || min_found < lanes.min_normalized,
    }));
    Ok(Outcome { text, violation })
}
