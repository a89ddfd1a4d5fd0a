//! Passage times, geodesic structure, the pinning operators σ, and edge
//! classification.
//!
//! Geodesic membership is never enumerated path by path. After one shortest-path
//! sweep from the source and one from the sink, edge `(u, v)` is traversed
//! `u → v` by some geodesic iff `dsrc(u) + w + dsnk(v) = f`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{EdgeId, Environment, Lattice, Value};
use crate::scalar::Weight;

fn sweep<T: Weight>(
    lattice: &Lattice<T>,
    env: &Environment,
    start: usize,
    stop: Option<usize>,
    forbidden: Option<EdgeId>,
) -> Vec<T> {
    debug_assert_eq!(env.len(), lattice.edge_count());
    let unreached = T::max_value();
    let mut dist = vec![unreached; lattice.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[start] = T::zero();
    heap.push(Reverse((T::zero(), start as u32)));
    while let Some(Reverse((d, v))) = heap.pop() {
        let v = v as usize;
        if d > dist[v] {
            continue;
        }
        if stop == Some(v) {
            break;
        }
        for &(u, e) in lattice.neighbors(v) {
            let e = EdgeId(e);
            let w = if forbidden == Some(e) { T::sentinel() } else { lattice.weight(env, e) };
            let nd = d + w;
            if nd < dist[u as usize] {
                dist[u as usize] = nd;
                heap.push(Reverse((nd, u)));
            }
        }
    }
    dist
}

/// Shortest source-to-sink passage time `f(ω)`.
pub fn passage_time<T: Weight>(lattice: &Lattice<T>, env: &Environment) -> T {
    assert_eq!(env.len(), lattice.edge_count(), "environment does not match lattice");
    sweep(lattice, env, lattice.source(), Some(lattice.sink()), None)[lattice.sink()]
}

/// Passage time with edge `e` made impassable (weight set to [`Weight::sentinel`]).
pub fn passage_time_avoiding<T: Weight>(lattice: &Lattice<T>, env: &Environment, e: EdgeId) -> T {
    assert_eq!(env.len(), lattice.edge_count(), "environment does not match lattice");
    sweep(lattice, env, lattice.source(), Some(lattice.sink()), Some(e))[lattice.sink()]
}

/// Traversal directions of an edge `(base, base + e_axis)` used by geodesics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    /// Some geodesic crosses base → top.
    pub forward: bool,
    /// Some geodesic crosses top → base.
    pub backward: bool,
}

impl Orientation {
    pub fn any(self) -> bool {
        self.forward || self.backward
    }
}

/// Distances to and from the endpoints, enough to answer every geodesic query.
#[derive(Clone, Debug)]
pub struct GeodesicDag<T> {
    pub dsrc: Vec<T>,
    pub dsnk: Vec<T>,
    pub time: T,
}

impl<T: Weight> GeodesicDag<T> {
    pub fn compute(lattice: &Lattice<T>, env: &Environment) -> Self {
        assert_eq!(env.len(), lattice.edge_count(), "environment does not match lattice");
        let dsrc = sweep(lattice, env, lattice.source(), None, None);
        let dsnk = sweep(lattice, env, lattice.sink(), None, None);
        let time = dsrc[lattice.sink()];
        Self { dsrc, dsnk, time }
    }

    pub fn orientation(&self, lattice: &Lattice<T>, env: &Environment, e: EdgeId) -> Orientation {
        let (u, v) = lattice.endpoints(e);
        let w = lattice.weight(env, e);
        Orientation {
            forward: self.dsrc[u] + w + self.dsnk[v] == self.time,
            backward: self.dsrc[v] + w + self.dsnk[u] == self.time,
        }
    }

    pub fn on_geodesic(&self, lattice: &Lattice<T>, env: &Environment, e: EdgeId) -> bool {
        self.orientation(lattice, env, e).any()
    }

    /// Indicator over all edges of membership in some geodesic.
    pub fn geodesic_edges(&self, lattice: &Lattice<T>, env: &Environment) -> Vec<bool> {
        lattice.edge_ids().map(|e| self.on_geodesic(lattice, env, e)).collect()
    }
}

/// Compute the geodesic DAG of `env`.
pub fn geodesic_dag<T: Weight>(lattice: &Lattice<T>, env: &Environment) -> GeodesicDag<T> {
    GeodesicDag::compute(lattice, env)
}

/// `σ_j^δ(ω)`: coordinate `j` pinned to `δ`.
pub fn sigma(env: &Environment, j: EdgeId, value: Value) -> Environment {
    env.with(j, value)
}

/// `σ_{v_1}^{α_1} ∘ … ∘ σ_{v_m}^{α_m}(ω)` for distinct edges.
pub fn sigma_vector(env: &Environment, edges: &[EdgeId], values: &[Value]) -> Result<Environment> {
    if edges.len() != values.len() {
        return Err(Error::InvalidArgument(format!("{} edges but {} values", edges.len(), values.len())));
    }
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateEdge(w[0].index()));
    }
    if let Some(e) = edges.iter().find(|e| e.index() >= env.len()) {
        return Err(Error::EdgeIndex(e.index()));
    }
    let mut out = env.clone();
    // the rightmost operator acts first
    for (&e, &v) in edges.iter().zip(values).rev() {
        out.set(e, v);
    }
    Ok(out)
}

/// Membership of `ω` in the events `E_j`, `Ê_j`, `A_j`, `Â_j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeClassification {
    pub essential: bool,
    pub semi_essential: bool,
    pub influential: bool,
    pub very_influential: bool,
}

/// Every geodesic uses `j`: forbidding `j` strictly increases the passage time.
pub fn is_essential<T: Weight>(lattice: &Lattice<T>, env: &Environment, j: EdgeId) -> bool {
    passage_time_avoiding(lattice, env, j) > passage_time(lattice, env)
}

/// `∂_j f(ω) = f(σ_j^b ω) − f(σ_j^a ω)`.
pub fn first_derivative<T: Weight>(lattice: &Lattice<T>, env: &Environment, j: EdgeId) -> T {
    passage_time(lattice, &sigma(env, j, Value::B)) - passage_time(lattice, &sigma(env, j, Value::A))
}

pub fn classify_edge<T: Weight>(lattice: &Lattice<T>, env: &Environment, j: EdgeId) -> EdgeClassification {
    let dag = GeodesicDag::compute(lattice, env);
    let essential = passage_time_avoiding(lattice, env, j) > dag.time;
    let d = first_derivative(lattice, env, j);
    EdgeClassification {
        essential,
        semi_essential: dag.on_geodesic(lattice, env, j),
        influential: d != T::zero(),
        very_influential: d == lattice.gap(),
    }
}

/// Classification of every edge, sharing one geodesic DAG.
pub fn classify_all<T: Weight>(lattice: &Lattice<T>, env: &Environment) -> Vec<EdgeClassification> {
    let dag = GeodesicDag::compute(lattice, env);
    lattice
        .edge_ids()
        .map(|j| {
            let d = first_derivative(lattice, env, j);
            EdgeClassification {
                essential: passage_time_avoiding(lattice, env, j) > dag.time,
                semi_essential: dag.on_geodesic(lattice, env, j),
                influential: d != T::zero(),
                very_influential: d == lattice.gap(),
            }
        })
        .collect()
}

/// Whether `k` is a direction-switching edge with respect to `(l, m)`: some
/// geodesic of `σ_k^a σ_l^a σ_m^b ω` crosses `k` one way and some geodesic of
/// `σ_k^a σ_l^b σ_m^a ω` crosses it the other way.
pub fn detect_direction_switch<T: Weight>(
    lattice: &Lattice<T>,
    env: &Environment,
    k: EdgeId,
    l: EdgeId,
    m: EdgeId,
) -> Result<bool> {
    for e in [k, l, m] {
        lattice.check_edge(e)?;
    }
    if k == l || k == m || l == m {
        return Err(Error::InvalidArgument(format!("edges {k}, {l}, {m} are not distinct")));
    }
    let first = sigma_vector(env, &[k, l, m], &[Value::A, Value::A, Value::B])?;
    let second = sigma_vector(env, &[k, l, m], &[Value::A, Value::B, Value::A])?;
    let o1 = GeodesicDag::compute(lattice, &first).orientation(lattice, &first, k);
    let o2 = GeodesicDag::compute(lattice, &second).orientation(lattice, &second, k);
    Ok((o1.forward && o2.backward) || (o1.backward && o2.forward))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;

    fn square(sink: Vec<i64>) -> Lattice<i64> {
        Lattice::build(LatticeSpec::reduced(vec![(0, 1), (0, 1)], 1, 2).with_endpoints(vec![0, 0], sink)).unwrap()
    }

    #[test]
    fn square_passage_times() {
        let l = square(vec![1, 0]);
        let direct = l.encode_edge(&[0, 0], 0).unwrap();
        assert_eq!(passage_time(&l, &l.all_a()), 1);
        assert_eq!(passage_time(&l, &l.all_a().with(direct, Value::B)), 2);
        assert_eq!(passage_time(&l, &l.all_b()), 2);
    }

    #[test]
    fn dag_distances_agree() {
        let l = Lattice::build(LatticeSpec::new(2, 1, 1i64, 3)).unwrap();
        let mut env = l.all_a();
        for e in l.edge_ids().step_by(3) {
            env.set(e, Value::B);
        }
        let dag = geodesic_dag(&l, &env);
        assert_eq!(dag.dsrc[l.source()], 0);
        assert_eq!(dag.dsnk[l.sink()], 0);
        assert_eq!(dag.time, dag.dsnk[l.source()]);
        assert_eq!(dag.time, passage_time(&l, &env));
        assert!(dag.time >= l.a() * l.hop_distance() as i64);
    }

    #[test]
    fn diagonal_square_has_four_geodesic_edges() {
        let l = square(vec![1, 1]);
        let env = l.all_a();
        let dag = geodesic_dag(&l, &env);
        assert_eq!(dag.geodesic_edges(&l, &env).iter().filter(|&&g| g).count(), 4);
        for e in l.edge_ids() {
            let o = dag.orientation(&l, &env, e);
            assert!(o.forward && !o.backward);
        }
    }

    #[test]
    fn all_a_far_sink_leaves_side_edges_off() {
        let l = Lattice::build(LatticeSpec::new(2, 1, 1i64, 2)).unwrap();
        let env = l.all_a();
        let dag = geodesic_dag(&l, &env);
        // the straight segment from the origin to (1,0) is the only geodesic
        let direct = l.encode_edge(&[0, 0], 0).unwrap();
        assert!(dag.on_geodesic(&l, &env, direct));
        assert_eq!(dag.geodesic_edges(&l, &env).iter().filter(|&&g| g).count(), 1);
        let side = l.encode_edge(&[-2, -2], 1).unwrap();
        assert!(!classify_edge(&l, &env, side).semi_essential);
        assert_eq!(first_derivative(&l, &env, side), 0);
    }

    #[test]
    fn direct_edge_classification() {
        let l = square(vec![1, 0]);
        let direct = l.encode_edge(&[0, 0], 0).unwrap();
        let env = l.all_a();
        let c = classify_edge(&l, &env, direct);
        assert!(c.essential && c.semi_essential && c.influential && c.very_influential);
        assert_eq!(first_derivative(&l, &env, direct), 1);
        assert_eq!(first_derivative(&l, &env.with(direct, Value::B), direct), 1);
        assert_eq!(classify_all(&l, &env)[direct.index()], c);
    }

    #[test]
    fn sigma_identities() {
        let env = Environment::from_mask(6, 0b101100);
        let (i, j) = (EdgeId(1), EdgeId(4));
        assert_eq!(sigma(&sigma(&env, i, Value::B), i, Value::A), sigma(&env, i, Value::A));
        assert_eq!(sigma(&sigma(&env, i, Value::A), j, Value::B), sigma(&sigma(&env, j, Value::B), i, Value::A));
        let all_a = Environment::uniform(6, Value::A);
        assert_eq!(sigma(&all_a, i, Value::A), all_a);
    }

    #[test]
    fn sigma_vector_contract() {
        let env = Environment::from_mask(6, 0b000111);
        assert_eq!(sigma_vector(&env, &[], &[]).unwrap(), env);
        assert_eq!(sigma_vector(&env, &[EdgeId(0)], &[Value::A]).unwrap(), sigma(&env, EdgeId(0), Value::A));
        let fwd = sigma_vector(&env, &[EdgeId(0), EdgeId(5)], &[Value::A, Value::B]).unwrap();
        let rev = sigma_vector(&env, &[EdgeId(5), EdgeId(0)], &[Value::B, Value::A]).unwrap();
        assert_eq!(fwd, rev);
        assert!(sigma_vector(&env, &[EdgeId(0)], &[]).is_err());
        assert!(sigma_vector(&env, &[EdgeId(0), EdgeId(0)], &[Value::A, Value::B]).is_err());
    }

    #[test]
    fn direction_switch_edge_cases() {
        let l = square(vec![1, 1]);
        let env = l.all_a();
        let e: Vec<EdgeId> = l.edge_ids().collect();
        assert!(!detect_direction_switch(&l, &env, e[0], e[1], e[2]).unwrap());
        assert!(detect_direction_switch(&l, &env, e[0], e[0], e[2]).is_err());
    }
}
