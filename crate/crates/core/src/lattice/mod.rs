//! Finite box graphs, canonical edge indexing, and environments.
//!
//! A box is the set of integer points with each coordinate in a closed interval.
//! The production box is `[-2n, 2n]^d`; a reduced box with arbitrary per-axis
//! bounds is available for exhaustive work on tiny graphs.
//!
//! Vertices are linearized in mixed radix with the first coordinate most
//! significant, so increasing vertex index is lexicographic order on coordinates.
//! Edges are numbered densely in lexicographic order of `(base vertex, axis)`,
//! where the base is the smaller endpoint.

mod env;
mod file;

pub use env::{EdgeSubset, Environment, Value};
pub use file::{load_environment, save_environment, EnvironmentFile, ExceptionEdge};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Weight;

/// Largest vertex count a box may have.
pub const MAX_VERTICES: usize = 1 << 26;

const NO_EDGE: u32 = u32::MAX;

/// Dense edge index in `[0, |W|)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Parameters of a box graph with two-valued passage times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec<T> {
    pub dim: usize,
    /// `n` in `[-2n, 2n]^d`. Ignored when `reduced_box` is set.
    pub radius: u32,
    pub reduced_box: Option<Vec<(i64, i64)>>,
    pub a: T,
    pub b: T,
    pub source: Vec<i64>,
    pub sink: Vec<i64>,
}

impl<T: Weight> LatticeSpec<T> {
    /// The box `[-2n, 2n]^d` with source at the origin and sink at `n·e₁`.
    pub fn new(dim: usize, radius: u32, a: T, b: T) -> Self {
        let source = vec![0; dim];
        let mut sink = vec![0; dim];
        if dim > 0 {
            sink[0] = radius as i64;
        }
        Self { dim, radius, reduced_box: None, a, b, source, sink }
    }

    /// An arbitrary axis-aligned box. Source is the lower corner; sink is one step
    /// along the first axis, or the upper corner when the first axis is flat.
    pub fn reduced(bounds: Vec<(i64, i64)>, a: T, b: T) -> Self {
        let source: Vec<i64> = bounds.iter().map(|&(lo, _)| lo).collect();
        let mut sink = source.clone();
        match bounds.first() {
            Some(&(lo, hi)) if hi > lo => sink[0] = lo + 1,
            _ => sink = bounds.iter().map(|&(_, hi)| hi).collect(),
        }
        Self { dim: bounds.len(), radius: 0, reduced_box: Some(bounds), a, b, source, sink }
    }

    pub fn with_endpoints(mut self, source: Vec<i64>, sink: Vec<i64>) -> Self {
        self.source = source;
        self.sink = sink;
        self
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced_box.is_some()
    }

    /// Per-axis inclusive coordinate bounds.
    pub fn bounds(&self) -> Vec<(i64, i64)> {
        match &self.reduced_box {
            Some(b) => b.clone(),
            None => {
                let r = 2 * self.radius as i64;
                vec![(-r, r); self.dim]
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidSpec(format!("dimension {} < 2", self.dim)));
        }
        match &self.reduced_box {
            None if self.radius < 1 => {
                return Err(Error::InvalidSpec(format!("radius {} < 1", self.radius)));
            }
            Some(b) if b.len() != self.dim => {
                return Err(Error::InvalidSpec(format!("reduced box has {} axes, dimension is {}", b.len(), self.dim)));
            }
            Some(b) => {
                if let Some(&(lo, hi)) = b.iter().find(|(lo, hi)| lo > hi) {
                    return Err(Error::InvalidSpec(format!("empty axis range [{lo}, {hi}]")));
                }
            }
            None => {}
        }
        if self.a <= T::zero() {
            return Err(Error::InvalidSpec(format!("a = {} must be positive", self.a)));
        }
        if self.a >= self.b {
            return Err(Error::InvalidSpec(format!("need a < b, got a = {}, b = {}", self.a, self.b)));
        }
        let bounds = self.bounds();
        for (name, v) in [("source", &self.source), ("sink", &self.sink)] {
            if v.len() != self.dim || v.iter().zip(&bounds).any(|(&x, &(lo, hi))| x < lo || x > hi) {
                return Err(Error::InvalidSpec(format!("{name} {v:?} is not a vertex of the box")));
            }
        }
        if self.source == self.sink {
            return Err(Error::InvalidSpec("source and sink coincide".into()));
        }
        Ok(())
    }
}

/// An immutable box graph. Shareable across threads.
#[derive(Clone, Debug)]
pub struct Lattice<T> {
    spec: LatticeSpec<T>,
    lo: Vec<i64>,
    sides: Vec<usize>,
    strides: Vec<usize>,
    edges: Vec<(u32, u8)>,
    edge_lookup: Vec<u32>,
    adj_start: Vec<u32>,
    adj: Vec<(u32, u32)>,
    source: u32,
    sink: u32,
}

impl<T: Weight> Lattice<T> {
    pub fn build(spec: LatticeSpec<T>) -> Result<Self> {
        spec.validate()?;
        let bounds = spec.bounds();
        let dim = spec.dim;
        let lo: Vec<i64> = bounds.iter().map(|&(l, _)| l).collect();
        let sides: Vec<usize> = bounds.iter().map(|&(l, h)| (h - l + 1) as usize).collect();

        let mut n_vertices: usize = 1;
        for &s in &sides {
            n_vertices = n_vertices
                .checked_mul(s)
                .filter(|&n| n <= MAX_VERTICES)
                .ok_or_else(|| Error::cap("vertex count", usize::MAX, MAX_VERTICES))?;
        }
        let mut strides = vec![1usize; dim];
        for ax in (0..dim.saturating_sub(1)).rev() {
            strides[ax] = strides[ax + 1] * sides[ax + 1];
        }

        let mut edges = Vec::new();
        let mut edge_lookup = vec![NO_EDGE; n_vertices * dim];
        let mut coord = vec![0usize; dim];
        for v in 0..n_vertices {
            // coord holds the offsets of v from the lower corner
            for ax in 0..dim {
                if coord[ax] + 1 < sides[ax] {
                    edge_lookup[v * dim + ax] = edges.len() as u32;
                    edges.push((v as u32, ax as u8));
                }
            }
            for ax in (0..dim).rev() {
                coord[ax] += 1;
                if coord[ax] < sides[ax] {
                    break;
                }
                coord[ax] = 0;
            }
        }
        if edges.len() >= u32::MAX as usize {
            return Err(Error::cap("edge count", edges.len(), u32::MAX as usize - 1));
        }

        let mut degree = vec![0u32; n_vertices + 1];
        for &(base, ax) in &edges {
            degree[base as usize] += 1;
            degree[base as usize + strides[ax as usize]] += 1;
        }
        let mut adj_start = vec![0u32; n_vertices + 1];
        for v in 0..n_vertices {
            adj_start[v + 1] = adj_start[v] + degree[v];
        }
        let mut fill = adj_start.clone();
        let mut adj = vec![(0u32, 0u32); adj_start[n_vertices] as usize];
        for (id, &(base, ax)) in edges.iter().enumerate() {
            let top = base + strides[ax as usize] as u32;
            adj[fill[base as usize] as usize] = (top, id as u32);
            fill[base as usize] += 1;
            adj[fill[top as usize] as usize] = (base, id as u32);
            fill[top as usize] += 1;
        }

        let index = |x: &[i64]| -> u32 {
            x.iter().zip(&lo).zip(&strides).map(|((&c, &l), &s)| (c - l) as usize * s).sum::<usize>() as u32
        };
        let source = index(&spec.source);
        let sink = index(&spec.sink);

        Ok(Self { spec, lo, sides, strides, edges, edge_lookup, adj_start, adj, source, sink })
    }

    pub fn spec(&self) -> &LatticeSpec<T> {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn a(&self) -> T {
        self.spec.a
    }

    pub fn b(&self) -> T {
        self.spec.b
    }

    /// `b - a`.
    pub fn gap(&self) -> T {
        self.spec.b - self.spec.a
    }

    pub fn vertex_count(&self) -> usize {
        self.adj_start.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> usize {
        self.source as usize
    }

    pub fn sink(&self) -> usize {
        self.sink as usize
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn vertex_index(&self, coords: &[i64]) -> Option<usize> {
        if coords.len() != self.dim() {
            return None;
        }
        let mut idx = 0usize;
        for (ax, &c) in coords.iter().enumerate() {
            let off = c - self.lo[ax];
            if off < 0 || off as usize >= self.sides[ax] {
                return None;
            }
            idx += off as usize * self.strides[ax];
        }
        Some(idx)
    }

    pub fn vertex_coords(&self, v: usize) -> Vec<i64> {
        (0..self.dim()).map(|ax| self.lo[ax] + ((v / self.strides[ax]) % self.sides[ax]) as i64).collect()
    }

    /// Edge from `base` to `base + e_axis`.
    pub fn encode_edge(&self, base: &[i64], axis: usize) -> Result<EdgeId> {
        let bad = || Error::InvalidEdge { base: base.to_vec(), axis };
        if axis >= self.dim() {
            return Err(bad());
        }
        let v = self.vertex_index(base).ok_or_else(bad)?;
        match self.edge_lookup[v * self.dim() + axis] {
            NO_EDGE => Err(bad()),
            id => Ok(EdgeId(id)),
        }
    }

    pub fn decode_edge(&self, e: EdgeId) -> Result<(Vec<i64>, usize)> {
        let &(base, ax) = self.edges.get(e.index()).ok_or(Error::EdgeIndex(e.index()))?;
        Ok((self.vertex_coords(base as usize), ax as usize))
    }

    /// Vertex indices `(base, base + e_axis)`.
    pub fn endpoints(&self, e: EdgeId) -> (usize, usize) {
        let (base, ax) = self.edges[e.index()];
        (base as usize, base as usize + self.strides[ax as usize])
    }

    pub fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[self.adj_start[v] as usize..self.adj_start[v + 1] as usize]
    }

    pub fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e.index() < self.edges.len() {
            Ok(())
        } else {
            Err(Error::EdgeIndex(e.index()))
        }
    }

    pub fn check_env(&self, env: &Environment) -> Result<()> {
        if env.len() == self.edge_count() {
            Ok(())
        } else {
            Err(Error::EnvironmentMismatch { got: env.len(), expected: self.edge_count() })
        }
    }

    pub fn weight(&self, env: &Environment, e: EdgeId) -> T {
        match env.value(e) {
            Value::A => self.spec.a,
            Value::B => self.spec.b,
        }
    }

    pub fn value_weight(&self, v: Value) -> T {
        match v {
            Value::A => self.spec.a,
            Value::B => self.spec.b,
        }
    }

    pub fn all_a(&self) -> Environment {
        Environment::uniform(self.edge_count(), Value::A)
    }

    pub fn all_b(&self) -> Environment {
        Environment::uniform(self.edge_count(), Value::B)
    }

    /// Graph distance (number of edges) between source and sink.
    pub fn hop_distance(&self) -> usize {
        self.spec.source.iter().zip(&self.spec.sink).map(|(x, y)| (x - y).unsigned_abs() as usize).sum()
    }

    /// Short human-readable description, used to tag reports.
    pub fn describe(&self) -> String {
        let shape = match &self.spec.reduced_box {
            Some(b) => format!("reduced {}", b.iter().map(|(l, h)| format!("[{l},{h}]")).collect::<Vec<_>>().join("x")),
            None => format!("[-{0},{0}]^{1}", 2 * self.spec.radius, self.spec.dim),
        };
        format!("{shape} a={} b={} source={:?} sink={:?}", self.spec.a, self.spec.b, self.spec.source, self.spec.sink)
    }
}
