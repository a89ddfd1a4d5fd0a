//! Environment derivatives `∂_S f` of any order.
//!
//! Three independent routes compute the same number:
//! the signed sum over the `2^|S|` pinnings of `S` ([`derivative_leibniz`]),
//! the recursion `∂_S f = ∂_{S∖{j}}(∂_j f)` ([`derivative_recursive`]), and
//! lookups in a precomputed table of passage times over a variable set
//! ([`HypercubeTable`]).

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{EdgeId, EdgeSubset, Environment, Lattice, Value};
use crate::passage::passage_time;
use crate::scalar::Weight;

/// Largest `|S|` (and table variable count) accepted.
pub const MAX_ORDER: usize = 20;

/// A derivative value, raw and normalized by `b − a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DerivativeValue<T: Weight> {
    pub raw: T,
    pub normalized: Ratio<T>,
}

impl<T: Weight> DerivativeValue<T> {
    pub fn new(raw: T, gap: T) -> Self {
        Self { raw, normalized: Ratio::new(raw, gap) }
    }
}

impl<T: Weight> Serialize for DerivativeValue<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DerivativeValue", 2)?;
        st.serialize_field("raw", &self.raw.to_i64_lossy())?;
        st.serialize_field("normalized", &format_ratio(&self.normalized))?;
        st.end()
    }
}

/// `p/q` with `q > 0`, always written with a denominator.
pub fn format_ratio<T: Weight>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn check_subset<T: Weight>(lattice: &Lattice<T>, s: &EdgeSubset) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("derivative needs a non-empty edge set".into()));
    }
    if s.order() > MAX_ORDER {
        return Err(Error::cap("derivative order", s.order(), MAX_ORDER));
    }
    s.iter().try_for_each(|e| lattice.check_edge(e))
}

/// Pins the edges of `vars` according to the bits of `mask` (set bit = `b`).
pub fn pin_mask(env: &Environment, vars: &[EdgeId], mask: u64) -> Environment {
    let mut out = env.clone();
    for (i, &e) in vars.iter().enumerate() {
        out.set(e, Value::from_bit(mask >> i & 1 == 1));
    }
    out
}

#[inline]
fn sign_for<T: Weight>(order: usize, mask: u64) -> T {
    // (-1)^{number of a-pinned coordinates}
    if (order - mask.count_ones() as usize).is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

/// `Σ_θ (−1)^{#a(θ)} f(σ_S^θ ω)` over all `θ ∈ {a,b}^S`.
pub fn derivative_leibniz<T: Weight>(
    lattice: &Lattice<T>,
    env: &Environment,
    s: &EdgeSubset,
) -> Result<DerivativeValue<T>> {
    lattice.check_env(env)?;
    check_subset(lattice, s)?;
    let vars = s.edges();
    let k = vars.len();
    let raw = (0..1u64 << k)
        .into_par_iter()
        .map(|mask| sign_for::<T>(k, mask) * passage_time(lattice, &pin_mask(env, vars, mask)))
        .reduce(T::zero, |x, y| x + y);
    Ok(DerivativeValue::new(raw, lattice.gap()))
}

/// Which element the recursion peels first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Peel {
    Largest,
    Smallest,
}

/// `∂_S f = ∂_{S∖{j}} f ∘ σ_j^b − ∂_{S∖{j}} f ∘ σ_j^a`, peeling the largest index.
pub fn derivative_recursive<T: Weight>(
    lattice: &Lattice<T>,
    env: &Environment,
    s: &EdgeSubset,
) -> Result<DerivativeValue<T>> {
    derivative_recursive_with(lattice, env, s, Peel::Largest)
}

pub fn derivative_recursive_with<T: Weight>(
    lattice: &Lattice<T>,
    env: &Environment,
    s: &EdgeSubset,
    peel: Peel,
) -> Result<DerivativeValue<T>> {
    lattice.check_env(env)?;
    check_subset(lattice, s)?;
    fn go<T: Weight>(lattice: &Lattice<T>, env: &mut Environment, rest: &[EdgeId], peel: Peel) -> T {
        let Some((&j, tail)) = (match peel {
            Peel::Largest => rest.split_last(),
            Peel::Smallest => rest.split_first(),
        }) else {
            return passage_time(lattice, env);
        };
        env.set(j, Value::B);
        let hi = go(lattice, env, tail, peel);
        env.set(j, Value::A);
        let lo = go(lattice, env, tail, peel);
        hi - lo
    }
    let mut scratch = env.clone();
    let raw = go(lattice, &mut scratch, s.edges(), peel);
    Ok(DerivativeValue::new(raw, lattice.gap()))
}

/// Passage times at all `2^|V|` pinnings of a variable set `V` on top of a base
/// environment. Entry `μ` holds `f(σ_V^{θ(μ)} ω)` with bit `i` of `μ` pinning
/// `V[i]` to `b` when set.
#[derive(Clone, Debug)]
pub struct HypercubeTable<T> {
    base: Environment,
    vars: Vec<EdgeId>,
    values: Vec<T>,
    gap: T,
}

impl<T: Weight> HypercubeTable<T> {
    pub fn build(lattice: &Lattice<T>, env: &Environment, vars: &EdgeSubset) -> Result<Self> {
        lattice.check_env(env)?;
        if vars.order() > MAX_ORDER {
            return Err(Error::cap("hypercube variables", vars.order(), MAX_ORDER));
        }
        vars.iter().try_for_each(|e| lattice.check_edge(e))?;
        let list = vars.edges().to_vec();
        let values = (0..1u64 << list.len())
            .into_par_iter()
            .map_init(
                || env.clone(),
                |scratch, mask| {
                    for (i, &e) in list.iter().enumerate() {
                        scratch.set(e, Value::from_bit(mask >> i & 1 == 1));
                    }
                    passage_time(lattice, scratch)
                },
            )
            .collect();
        Ok(Self { base: env.clone(), vars: list, values, gap: lattice.gap() })
    }

    /// Table over every edge of the lattice: the whole sample space.
    pub fn full(lattice: &Lattice<T>) -> Result<Self> {
        let all = EdgeSubset::new(lattice.edge_ids().collect())?;
        Self::build(lattice, &lattice.all_a(), &all)
    }

    pub fn base(&self) -> &Environment {
        &self.base
    }

    pub fn vars(&self) -> &[EdgeId] {
        &self.vars
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn gap(&self) -> T {
        self.gap
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, mask: u64) -> T {
        self.values[mask as usize]
    }

    /// Bitmask over table positions of the edges in `s`.
    pub fn positions(&self, s: &EdgeSubset) -> Result<u64> {
        let mut m = 0u64;
        for e in s.iter() {
            let i = self
                .vars
                .binary_search(&e)
                .map_err(|_| Error::InvalidArgument(format!("edge {e} is not a table variable")))?;
            m |= 1 << i;
        }
        Ok(m)
    }

    /// Environment corresponding to a table mask.
    pub fn environment(&self, mask: u64) -> Environment {
        pin_mask(&self.base, &self.vars, mask)
    }

    /// Signed sum over the sub-cube spanned by `smask` through `base_mask`.
    #[inline]
    pub fn signed_sum(&self, smask: u64, base_mask: u64) -> T {
        let k = smask.count_ones() as usize;
        let base = base_mask & !smask;
        let mut acc = T::zero();
        let mut sub = smask;
        loop {
            let v = self.values[(base | sub) as usize];
            if (k - sub.count_ones() as usize).is_multiple_of(2) {
                acc += v;
            } else {
                acc -= v;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & smask;
        }
        acc
    }
}

/// `∂_S f` at the environment given by `base_mask`, read from the table.
pub fn derivative_from_table<T: Weight>(
    table: &HypercubeTable<T>,
    s: &EdgeSubset,
    base_mask: u64,
) -> Result<DerivativeValue<T>> {
    if s.is_empty() {
        return Err(Error::InvalidArgument("derivative needs a non-empty edge set".into()));
    }
    if base_mask as usize >= table.len() {
        return Err(Error::InvalidArgument(format!("mask {base_mask:#b} outside the table")));
    }
    let smask = table.positions(s)?;
    Ok(DerivativeValue::new(table.signed_sum(smask, base_mask), table.gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;
    use crate::passage::first_derivative;

    fn square() -> Lattice<i64> {
        Lattice::build(LatticeSpec::reduced(vec![(0, 1), (0, 1)], 1, 2)).unwrap()
    }

    #[test]
    fn order_one_is_first_derivative() {
        let l = square();
        let env = l.all_a();
        for e in l.edge_ids() {
            let s = EdgeSubset::new(vec![e]).unwrap();
            assert_eq!(derivative_leibniz(&l, &env, &s).unwrap().raw, first_derivative(&l, &env, e));
        }
    }

    #[test]
    fn two_edge_square_matches_hand_sum() {
        // bottom edge (0,0)-(1,0) and the middle of the detour, (0,1)-(1,1)
        let l = square();
        let bottom = l.encode_edge(&[0, 0], 0).unwrap();
        let top = l.encode_edge(&[0, 1], 0).unwrap();
        let s = EdgeSubset::new(vec![bottom, top]).unwrap();
        let env = l.all_a();
        // f(b,b) - f(b,a) - f(a,b) + f(a,a) with (bottom, top) values
        let f = |vb, vt| passage_time(&l, &env.with(bottom, vb).with(top, vt));
        assert_eq!(f(Value::B, Value::B), 2);
        assert_eq!(f(Value::B, Value::A), 2);
        assert_eq!(f(Value::A, Value::B), 1);
        assert_eq!(f(Value::A, Value::A), 1);
        let hand = 2 - 2 - 1 + 1;
        assert_eq!(derivative_leibniz(&l, &env, &s).unwrap().raw, hand);
        assert_eq!(derivative_recursive(&l, &env, &s).unwrap().raw, hand);
    }

    #[test]
    fn rejects_empty_and_oversized() {
        let l = Lattice::build(LatticeSpec::new(2, 1, 1i64, 2)).unwrap();
        let env = l.all_a();
        assert!(derivative_leibniz(&l, &env, &EdgeSubset::default()).is_err());
        let big = EdgeSubset::new(l.edge_ids().take(21).collect()).unwrap();
        assert!(matches!(derivative_leibniz(&l, &env, &big), Err(Error::SizeCap { .. })));
        assert!(matches!(HypercubeTable::build(&l, &env, &big), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn peel_order_is_immaterial() {
        let l = Lattice::build(LatticeSpec::reduced(vec![(0, 2), (0, 1)], 1, 3)).unwrap();
        let env = Environment::from_mask(l.edge_count(), 0b0100101);
        let s = EdgeSubset::new(vec![EdgeId(0), EdgeId(2), EdgeId(3), EdgeId(5)]).unwrap();
        let a = derivative_recursive_with(&l, &env, &s, Peel::Largest).unwrap();
        let b = derivative_recursive_with(&l, &env, &s, Peel::Smallest).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, derivative_leibniz(&l, &env, &s).unwrap());
    }

    #[test]
    fn empty_table_is_single_time() {
        let l = square();
        let env = l.all_b();
        let t = HypercubeTable::build(&l, &env, &EdgeSubset::default()).unwrap();
        assert_eq!(t.values(), &[passage_time(&l, &env)]);
    }

    #[test]
    fn full_table_reproduces_sample_space() {
        let l = square();
        let t = HypercubeTable::full(&l).unwrap();
        assert_eq!(t.len(), 16);
        for mask in 0..16u64 {
            assert_eq!(t.get(mask), passage_time(&l, &Environment::from_mask(4, mask)));
            assert_eq!(t.environment(mask), Environment::from_mask(4, mask));
        }
    }

    #[test]
    fn table_is_monotone_along_raised_bits() {
        let l = Lattice::build(LatticeSpec::reduced(vec![(0, 2), (0, 1)], 1, 2)).unwrap();
        let t = HypercubeTable::full(&l).unwrap();
        for mask in 0..t.len() as u64 {
            for i in 0..t.vars().len() {
                if mask >> i & 1 == 0 {
                    assert!(t.get(mask) <= t.get(mask | 1 << i));
                }
            }
        }
    }

    #[test]
    fn moebius_reconstructs_passage_times() {
        // f at mask μ equals the sum of ∂_M f at the all-a base over M ⊆ μ (∂_∅ f = f(base)).
        let l = Lattice::build(LatticeSpec::reduced(vec![(0, 2), (0, 1)], 1, 2)).unwrap();
        let t = HypercubeTable::full(&l).unwrap();
        let n = t.vars().len();
        for mask in (0..1u64 << n).step_by(7) {
            let mut total = t.get(0);
            let mut sub = mask;
            while sub != 0 {
                total += t.signed_sum(sub, 0);
                sub = (sub - 1) & mask;
            }
            assert_eq!(total, t.get(mask));
        }
    }

    #[test]
    fn single_global_sum() {
        let l = square();
        let t = HypercubeTable::full(&l).unwrap();
        let all = EdgeSubset::new(l.edge_ids().collect()).unwrap();
        let direct: i64 = (0..16u64).map(|m| if (4 - m.count_ones()) % 2 == 0 { t.get(m) } else { -t.get(m) }).sum();
        assert_eq!(derivative_from_table(&t, &all, 0).unwrap().raw, direct);
        assert_eq!(derivative_from_table(&t, &all, 0b1011).unwrap().raw, direct);
    }

    #[test]
    fn table_rejects_foreign_edges() {
        let l = square();
        let vars = EdgeSubset::new(vec![EdgeId(0), EdgeId(1)]).unwrap();
        let t = HypercubeTable::build(&l, &l.all_a(), &vars).unwrap();
        let s = EdgeSubset::new(vec![EdgeId(3)]).unwrap();
        assert!(derivative_from_table(&t, &s, 0).is_err());
    }

    #[test]
    fn normalized_is_exact() {
        let v = DerivativeValue::new(-4i64, 6);
        assert_eq!(format_ratio(&v.normalized), "-2/3");
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"raw":-4,"normalized":"-2/3"}"#);
    }
}
