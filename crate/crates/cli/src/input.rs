//! Turning flags into a lattice and an environment.

use envderiv::lattice::{load_environment, Environment, ExceptionEdge, LatticeSpec};
use envderiv::{Lattice, Time};
use serde::Serialize;

use crate::args::Global;
use crate::failure::{CliResult, Failure};

pub const DEFAULT_A: Time = 1;
pub const DEFAULT_B: Time = 2;

fn parse_ints(s: &str, what: &str) -> CliResult<Vec<i64>> {
    s.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| Failure::Usage(format!("bad {what} '{s}'")))).collect()
}

/// `"lo:hi,lo:hi,..."`.
pub fn parse_box(s: &str) -> CliResult<Vec<(i64, i64)>> {
    s.split(',')
        .map(|r| {
            let (lo, hi) =
                r.split_once(':').ok_or_else(|| Failure::Usage(format!("bad range '{r}' in --reduced-box")))?;
            let p = |t: &str| {
                t.trim().parse::<i64>().map_err(|_| Failure::Usage(format!("bad range '{r}' in --reduced-box")))
            };
            Ok((p(lo)?, p(hi)?))
        })
        .collect()
}

/// `"x,y,...:axis"`.
pub fn parse_edge(s: &str) -> CliResult<ExceptionEdge> {
    let (base, axis) =
        s.rsplit_once(':').ok_or_else(|| Failure::Usage(format!("edge '{s}' is not of the form x,y:axis")))?;
    let axis = axis.trim().parse().map_err(|_| Failure::Usage(format!("bad axis in edge '{s}'")))?;
    Ok(ExceptionEdge { base: parse_ints(base, "edge base")?, axis })
}

pub fn weights(g: &Global) -> (Time, Time) {
    (g.a.unwrap_or(DEFAULT_A), g.b.unwrap_or(DEFAULT_B))
}

/// Exactly one of `--env`, `--reduced-box`, or `--dim` with `--radius`.
pub fn lattice_input(g: &Global) -> CliResult<(Lattice, Environment)> {
    let inline = g.dim.is_some() || g.radius.is_some() || g.reduced_box.is_some();
    if let Some(path) = &g.env {
        if inline || g.a.is_some() || g.b.is_some() || g.source.is_some() || g.sink.is_some() {
            return Err(Failure::Usage("--env cannot be combined with inline lattice flags".into()));
        }
        return Ok(load_environment(path)?);
    }
    let (a, b) = weights(g);
    let mut spec = match (&g.reduced_box, g.dim, g.radius) {
        (Some(bx), None, None) => LatticeSpec::reduced(parse_box(bx)?, a, b),
        (Some(_), _, _) => return Err(Failure::Usage("--reduced-box cannot be combined with --dim/--radius".into())),
        (None, Some(dim), Some(radius)) => LatticeSpec::new(dim, radius, a, b),
        _ => {
            return Err(Failure::Usage(
                "no lattice given: pass --env, --reduced-box, or both --dim and --radius".into(),
            ))
        }
    };
    if g.source.is_some() || g.sink.is_some() {
        let source = g.source.as_deref().map(|s| parse_ints(s, "source")).transpose()?.unwrap_or(spec.source.clone());
        let sink = g.sink.as_deref().map(|s| parse_ints(s, "sink")).transpose()?.unwrap_or(spec.sink.clone());
        spec = spec.with_endpoints(source, sink);
    }
    let lattice = Lattice::build(spec)?;
    let env = lattice.all_a();
    Ok((lattice, env))
}

#[derive(Serialize)]
pub struct Instance {
    pub description: String,
    pub edges: usize,
    pub vertices: usize,
    /// Box given by explicit bounds rather than `[-2n, 2n]^d`.
    pub reduced_box: bool,
}

impl Instance {
    pub fn of(l: &Lattice) -> Self {
        Self {
            description: l.describe(),
            edges: l.edge_count(),
            vertices: l.vertex_count(),
            reduced_box: l.spec().is_reduced(),
        }
    }
}
