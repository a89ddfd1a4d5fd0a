//! Moments of the passage time under i.i.d. two-valued weights and the exact
//! decomposition of its variance over edge subsets.
//!
//! Passage times stay exact integers; probabilities enter once, as per-level
//! weights `p^{#a} (1−p)^{#b}`, and every sum is compensated.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::derivative::HypercubeTable;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::passage::passage_time;
use crate::scalar::{CompensatedSum, Real, Weight};

/// Largest `|W|` for exact moments.
pub const MAX_EXACT_EDGES: usize = 20;
/// Largest `|W|` for a decomposition that includes every subset size.
pub const MAX_FULL_DECOMPOSITION_EDGES: usize = 14;

/// Probability `p` that an edge takes the smaller value `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BernoulliParam<F>(F);

impl<F: Real> BernoulliParam<F> {
    pub fn new(p: F) -> Result<Self> {
        if !(p > F::zero() && p < F::one()) {
            return Err(Error::InvalidArgument(format!("p must lie in (0, 1), got {p}")));
        }
        Ok(Self(p))
    }

    pub fn p(self) -> F {
        self.0
    }

    /// `p (1 − p)`.
    pub fn spread(self) -> F {
        self.0 * (F::one() - self.0)
    }

    /// `P(ω)` for an environment on `n` edges with `c` of them at `b`, indexed by `c`.
    pub fn level_weights(self, n: usize) -> Vec<F> {
        let (p, q) = (self.0, F::one() - self.0);
        (0..=n).map(|c| p.powi((n - c) as i32) * q.powi(c as i32)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moments<F> {
    pub mean: F,
    pub variance: F,
}

fn full_table<T: Weight>(lattice: &Lattice<T>, cap: usize) -> Result<HypercubeTable<T>> {
    let n = lattice.edge_count();
    if n > cap {
        return Err(Error::cap("edge count", n, cap));
    }
    HypercubeTable::full(lattice)
}

const CHUNK: usize = 1 << 12;

/// Weighted sum of `g(mask, f)` over the table, chunked in a fixed order.
fn weighted_sum<T: Weight, F: Real>(table: &HypercubeTable<T>, w: &[F], g: impl Fn(T) -> F + Sync) -> F {
    table
        .values()
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(ci, chunk)| {
            let mut s = CompensatedSum::new();
            for (i, &f) in chunk.iter().enumerate() {
                let mask = (ci * CHUNK + i) as u64;
                s.add(w[mask.count_ones() as usize] * g(f));
            }
            s
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(CompensatedSum::new(), CompensatedSum::merge)
        .value()
}

fn moments_of<T: Weight, F: Real>(table: &HypercubeTable<T>, param: BernoulliParam<F>) -> Moments<F> {
    let w = param.level_weights(table.vars().len());
    let mean = weighted_sum(table, &w, |f| F::of(f));
    let variance = weighted_sum(table, &w, |f| {
        let d = F::of(f) - mean;
        d * d
    });
    Moments { mean, variance }
}

/// `E[f]` and `var(f)` by summing over all `2^{|W|}` environments.
pub fn exact_moments<T: Weight, F: Real>(lattice: &Lattice<T>, param: BernoulliParam<F>) -> Result<Moments<F>> {
    let table = full_table(lattice, MAX_EXACT_EDGES)?;
    Ok(moments_of(&table, param))
}

/// `E[∂_M f]` for every `M ⊆ W`, indexed by the bitmask of `M`; entry `0` is `E[f]`.
///
/// One butterfly per coordinate maps `(x_a, x_b)` to `(p x_a + (1−p) x_b, x_b − x_a)`.
pub fn expected_derivatives<T: Weight, F: Real>(table: &HypercubeTable<T>, param: BernoulliParam<F>) -> Vec<F> {
    let (p, q) = (param.p(), F::one() - param.p());
    let mut v: Vec<F> = table.values().iter().map(|&f| F::of(f)).collect();
    for j in 0..table.vars().len() {
        let bit = 1usize << j;
        for i in 0..v.len() {
            if i & bit == 0 {
                let (xa, xb) = (v[i], v[i | bit]);
                v[i] = p * xa + q * xb;
                v[i | bit] = xb - xa;
            }
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SizeRow<F> {
    pub size: usize,
    pub term_sum: F,
    pub cumulative: F,
    pub residual: F,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport<F> {
    pub edges: usize,
    pub p: F,
    pub mean: F,
    pub variance: F,
    pub max_size: usize,
    pub rows: Vec<SizeRow<F>>,
    pub total: F,
    pub residual: F,
}

impl<F: Real> DecompositionReport<F> {
    /// `|residual| / var`, or the absolute residual when the variance vanishes.
    pub fn relative_residual(&self) -> F {
        if self.variance > F::zero() {
            self.residual.abs() / self.variance
        } else {
            self.residual.abs()
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,term_sum,cumulative,residual\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.size, r.term_sum, r.cumulative, r.residual));
        }
        out
    }
}

/// Per-size partial sums of `(p(1−p))^{|M|} (E[∂_M f])²` for `1 ≤ |M| ≤ max_size`.
pub fn decomposition<T: Weight, F: Real>(
    lattice: &Lattice<T>,
    param: BernoulliParam<F>,
    max_size: usize,
) -> Result<DecompositionReport<F>> {
    let n = lattice.edge_count();
    let max_size = max_size.min(n);
    let cap = if max_size == n { MAX_FULL_DECOMPOSITION_EDGES } else { MAX_EXACT_EDGES };
    let table = full_table(lattice, cap)?;
    let moments = moments_of(&table, param);
    let e = expected_derivatives(&table, param);
    let mut by_size = vec![CompensatedSum::new(); n + 1];
    for (m, &x) in e.iter().enumerate().skip(1) {
        let s = m.count_ones() as usize;
        if s <= max_size {
            by_size[s].add(param.spread().powi(s as i32) * x * x);
        }
    }
    let mut cumulative = CompensatedSum::new();
    let rows: Vec<SizeRow<F>> = (1..=max_size)
        .map(|size| {
            let term_sum = by_size[size].value();
            cumulative.add(term_sum);
            SizeRow { size, term_sum, cumulative: cumulative.value(), residual: moments.variance - cumulative.value() }
        })
        .collect();
    let total = cumulative.value();
    Ok(DecompositionReport {
        edges: n,
        p: param.p(),
        mean: moments.mean,
        variance: moments.variance,
        max_size,
        rows,
        total,
        residual: moments.variance - total,
    })
}

/// The two sums on the right of the order-`k` variance bound, with `C = 1` as a reference scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TalagrandTerms<F> {
    pub order: usize,
    /// `Σ_{1≤|M|<k} (p(1−p))^{|M|} (E[∂_M f])²`.
    pub first_sum: F,
    /// `Σ_{|M|=k, ‖∂_M f‖₁≠0} ‖∂_M f‖₂² / (1 + ln(‖∂_M f‖₂/‖∂_M f‖₁)^k)`.
    pub second_sum: F,
    /// Subsets of size `k` with `∂_M f ≢ 0`.
    pub nonzero_subsets: u64,
}

/// Evaluates both sums; norms are `L^p` under the product measure.
pub fn talagrand_terms<T: Weight, F: Real>(
    lattice: &Lattice<T>,
    param: BernoulliParam<F>,
    k: usize,
) -> Result<TalagrandTerms<F>> {
    if k == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let n = lattice.edge_count();
    let table = full_table(lattice, MAX_FULL_DECOMPOSITION_EDGES)?;
    let e = expected_derivatives(&table, param);
    let spread = param.spread();
    let mut first = CompensatedSum::new();
    for (m, &x) in e.iter().enumerate().skip(1) {
        let s = m.count_ones() as usize;
        if s < k {
            first.add(spread.powi(s as i32) * x * x);
        }
    }

    let full = (1u64 << n) - 1;
    let subsets: Vec<u64> = (1..=full).filter(|m| m.count_ones() as usize == k).collect();
    // exact per-level integer sums of |∂| and ∂², converted once
    let parts: Vec<Option<F>> = subsets
        .par_iter()
        .map(|&smask| {
            let comp = full & !smask;
            let mut l1 = vec![0i128; n + 1];
            let mut l2 = vec![0i128; n + 1];
            let mut base = 0u64;
            loop {
                let d = table.signed_sum(smask, base).to_i64_lossy() as i128;
                let c = base.count_ones() as usize;
                l1[c] += d.abs();
                l2[c] += d * d;
                base = (base | !comp).wrapping_add(1) & comp;
                if base == 0 {
                    break;
                }
            }
            if l1.iter().all(|&x| x == 0) {
                return None;
            }
            // the pinned coordinates carry no weight: rescale levels to the complement
            let (p, q) = (param.p(), F::one() - param.p());
            let norm = |h: &[i128]| -> F {
                let mut s = CompensatedSum::new();
                for (c, &x) in h.iter().enumerate() {
                    if x != 0 && c <= n - k {
                        s.add(p.powi((n - k - c) as i32) * q.powi(c as i32) * F::from_i128(x).expect("finite"));
                    }
                }
                s.value()
            };
            let n1 = norm(&l1);
            let n2sq = norm(&l2);
            let ratio = n2sq.sqrt() / n1;
            let log = ratio.ln().max(F::zero());
            Some(n2sq / (F::one() + log.powi(k as i32)))
        })
        .collect();
    let mut second = CompensatedSum::new();
    let mut nonzero = 0u64;
    for v in parts.into_iter().flatten() {
        second.add(v);
        nonzero += 1;
    }
    Ok(TalagrandTerms { order: k, first_sum: first.value(), second_sum: second.value(), nonzero_subsets: nonzero })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate<F> {
    pub samples: u64,
    pub mean: F,
    /// Unbiased sample variance.
    pub variance: F,
    /// Standard error of the sample variance.
    pub standard_error: F,
}

const MC_CHUNK: u64 = 1 << 12;

/// Sample variance of `f` over seeded i.i.d. environments.
///
/// Samples are drawn in fixed-size chunks, each from its own ChaCha8 stream, so
/// the result depends only on the seed and not on the number of workers.
pub fn monte_carlo_variance<T: Weight, F: Real>(
    lattice: &Lattice<T>,
    param: BernoulliParam<F>,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate<F>> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    let q = (F::one() - param.p()).to_f64().expect("finite p");
    let chunks = samples.div_ceil(MC_CHUNK);
    let hist = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci);
            let count = MC_CHUNK.min(samples - ci * MC_CHUNK);
            let mut h: BTreeMap<T, u64> = BTreeMap::new();
            for _ in 0..count {
                let mut env = lattice.all_a();
                for e in lattice.edge_ids() {
                    if rng.gen_bool(q) {
                        env.flip(e);
                    }
                }
                *h.entry(passage_time(lattice, &env)).or_default() += 1;
            }
            h
        })
        .reduce(BTreeMap::new, |mut x, y| {
            for (k, c) in y {
                *x.entry(k).or_default() += c;
            }
            x
        });
    let n = F::of(samples as i64);
    let mean = hist.iter().map(|(&f, &c)| F::of(f) * F::of(c as i64)).collect::<CompensatedSum<F>>().value() / n;
    let central = |power: i32| -> F {
        hist.iter()
            .map(|(&f, &c)| (F::of(f) - mean).powi(power) * F::of(c as i64))
            .collect::<CompensatedSum<F>>()
            .value()
            / n
    };
    let m2 = central(2);
    let m4 = central(4);
    let variance = m2 * n / (n - F::one());
    let three = F::lit(3.0);
    let se_sq = (m4 - (n - three) / (n - F::one()) * variance * variance) / n;
    Ok(MonteCarloEstimate { samples, mean, variance, standard_error: se_sq.max(F::zero()).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivative::pin_mask;
    use crate::lattice::{EdgeId, LatticeSpec};

    fn single_edge() -> Lattice<i64> {
        Lattice::build(LatticeSpec::reduced(vec![(0, 1), (0, 0)], 2, 5)).unwrap()
    }

    fn square() -> Lattice<i64> {
        Lattice::build(LatticeSpec::reduced(vec![(0, 1), (0, 1)], 1, 3).with_endpoints(vec![0, 0], vec![1, 1])).unwrap()
    }

    fn bp(p: f64) -> BernoulliParam<f64> {
        BernoulliParam::new(p).unwrap()
    }

    #[test]
    fn param_bounds() {
        assert!(BernoulliParam::new(0.0f64).is_err());
        assert!(BernoulliParam::new(1.0f64).is_err());
        assert!(BernoulliParam::new(f64::NAN).is_err());
        assert!((bp(0.25).spread() - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn single_edge_bernoulli() {
        let l = single_edge();
        assert_eq!(l.edge_count(), 1);
        let m = exact_moments(&l, bp(0.3)).unwrap();
        assert!((m.mean - (0.3 * 2.0 + 0.7 * 5.0)).abs() < 1e-12);
        assert!((m.variance - 9.0 * 0.21).abs() < 1e-12);
        let d = decomposition(&l, bp(0.3), 1).unwrap();
        assert_eq!(d.rows.len(), 1);
        assert!((d.rows[0].term_sum - 9.0 * 0.21).abs() < 1e-12);
        assert!(d.relative_residual() < 1e-12);
    }

    #[test]
    fn square_by_hand() {
        // two disjoint two-edge paths: f = min of their sums
        let l = square();
        let mut mean = 0.0;
        for mask in 0..16u64 {
            let env = pin_mask(&l.all_a(), &[EdgeId(0), EdgeId(1), EdgeId(2), EdgeId(3)], mask);
            mean += passage_time(&l, &env) as f64 / 16.0;
        }
        let m = exact_moments(&l, bp(0.5)).unwrap();
        assert!((m.mean - mean).abs() < 1e-12);
        let d = decomposition(&l, bp(0.5), 4).unwrap();
        assert!(d.relative_residual() < 1e-9);
    }

    #[test]
    fn butterfly_matches_direct_sum() {
        let l = square();
        let table = HypercubeTable::full(&l).unwrap();
        let param = bp(0.3);
        let e = expected_derivatives(&table, param);
        for smask in 0..16u64 {
            let comp = 15 & !smask;
            let k = smask.count_ones() as usize;
            let mut direct = 0.0;
            for base in 0..16u64 {
                if base & !comp != 0 {
                    continue;
                }
                let c = base.count_ones() as usize;
                // weight of the complement coordinates only
                let pw = 0.3f64.powi((4 - k - c) as i32) * 0.7f64.powi(c as i32);
                direct += pw * table.signed_sum(smask, base) as f64;
            }
            assert!((e[smask as usize] - direct).abs() < 1e-12, "M = {smask:#b}");
        }
    }

    #[test]
    fn truncation_is_monotone() {
        let l = square();
        let d = decomposition(&l, bp(0.2), 4).unwrap();
        assert!(d.rows.windows(2).all(|r| r[1].cumulative >= r[0].cumulative));
        let d1 = decomposition(&l, bp(0.2), 1).unwrap();
        assert!(d1.total <= d.variance + 1e-12);
        assert!(d.to_csv().starts_with("size,term_sum,cumulative,residual\n1,"));
    }

    #[test]
    fn talagrand_degenerates_to_variance() {
        let l = square();
        let param = bp(0.8);
        let t = talagrand_terms(&l, param, 5).unwrap();
        let m = exact_moments(&l, param).unwrap();
        assert!(((t.first_sum - m.variance) / m.variance).abs() < 1e-9);
        assert_eq!(t.second_sum, 0.0);
        let t2 = talagrand_terms(&l, param, 2).unwrap();
        assert!(t2.second_sum >= 0.0 && t2.nonzero_subsets <= 6);
        assert!(talagrand_terms(&l, param, 0).is_err());
    }

    #[test]
    fn monte_carlo_seeded() {
        let l = square();
        let a = monte_carlo_variance(&l, bp(0.5), 5000, 11).unwrap();
        let b = monte_carlo_variance(&l, bp(0.5), 5000, 11).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_variance(&l, bp(0.5), 1, 11).is_err());
        let near = monte_carlo_variance(&l, bp(1.0 - 1e-9), 1000, 3).unwrap();
        assert!(near.variance < 1e-6);
    }
}
