//! The two-lane extremal family.
//!
//! Source and sink are joined by two disjoint equal-length `a`-paths. Lane `i`
//! carries `m_i` edges of the derivative set `S` and `β_i` fixed `b`-edges; every
//! edge off the lanes is `b`. When the lanes are the only geodesics, the passage
//! time with `i_1`, `i_2` of the `S`-edges raised to `b` is
//! `L·a + (b − a)·min(i_1 + β_1, i_2 + β_2)`, and `∂_S f` has a binomial closed form.
//!
//! [`embed_lanes`] realizes the family on an actual box and certifies the
//! embedding by checking every assignment of `S` against the analytic model.

use serde::Serialize;

use crate::combinatorics::binom_i64;
use crate::derivative::HypercubeTable;
use crate::error::{Error, Result};
use crate::lattice::{EdgeId, EdgeSubset, Environment, Lattice, LatticeSpec, Value};
use crate::scalar::Weight;

/// Largest `m_1 + m_2` for the brute-force signed sum.
pub const MAX_BRUTE_FORCE: u32 = 24;
/// Largest `m_1 + m_2` for a lattice embedding.
pub const MAX_EMBEDDED: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LaneSpec {
    pub m1: u32,
    pub m2: u32,
    pub beta1: u32,
    pub beta2: u32,
    /// Edges per lane.
    pub lane_length: u32,
}

impl LaneSpec {
    /// Lane length defaults to the least admissible value.
    pub fn new(m1: u32, m2: u32, beta1: u32, beta2: u32) -> Result<Self> {
        let lane_length = (m1 + beta1).max(m2 + beta2);
        Self { m1, m2, beta1, beta2, lane_length }.validated()
    }

    pub fn with_length(self, lane_length: u32) -> Result<Self> {
        Self { lane_length, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.m1 + self.m2 < 2 {
            return Err(Error::InvalidArgument(format!("need m1 + m2 ≥ 2, got {} + {}", self.m1, self.m2)));
        }
        if self.lane_length < (self.m1 + self.beta1).max(self.m2 + self.beta2) {
            return Err(Error::InvalidArgument(format!(
                "lane length {} cannot hold the C and B groups",
                self.lane_length
            )));
        }
        Ok(self)
    }

    pub fn order(&self) -> u32 {
        self.m1 + self.m2
    }

    /// The same configuration with the lanes relabeled.
    pub fn swapped(&self) -> Self {
        Self { m1: self.m2, m2: self.m1, beta1: self.beta2, beta2: self.beta1, lane_length: self.lane_length }
    }
}

/// `D(m_1, m_2; β_1, β_2)` as an integer multiple of `b − a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct LaneDerivative(pub i64);

impl LaneDerivative {
    pub fn raw<T: Weight>(self, gap: T) -> T {
        T::from_i64(self.0).expect("lane derivative fits the weight type") * gap
    }
}

/// `L·a + (b − a)·min(i_1 + β_1, i_2 + β_2)`.
pub fn lane_passage_time<T: Weight>(spec: &LaneSpec, a: T, b: T, i1: u32, i2: u32) -> Result<T> {
    if i1 > spec.m1 || i2 > spec.m2 {
        return Err(Error::InvalidArgument(format!(
            "counts ({i1}, {i2}) exceed lane capacities ({}, {})",
            spec.m1, spec.m2
        )));
    }
    let conv = |v: u32| T::from_i64(v as i64).expect("small count fits");
    Ok(conv(spec.lane_length) * a + (b - a) * conv((i1 + spec.beta1).min(i2 + spec.beta2)))
}

/// Signed binomial sum of the lane minimum over all `(i_1, i_2)`.
pub fn lane_derivative_bruteforce(spec: &LaneSpec) -> Result<LaneDerivative> {
    if spec.order() > MAX_BRUTE_FORCE {
        return Err(Error::cap("lane brute force m1 + m2", spec.order() as usize, MAX_BRUTE_FORCE as usize));
    }
    let (m1, m2) = (spec.m1 as i64, spec.m2 as i64);
    let mut total: i128 = 0;
    for i1 in 0..=m1 {
        for i2 in 0..=m2 {
            let weight = binom_i64(m1, i1).unwrap() as i128 * binom_i64(m2, i2).unwrap() as i128;
            let low = (i1 + spec.beta1 as i64).min(i2 + spec.beta2 as i64) as i128;
            let term = weight * low;
            if ((m1 - i1) + (m2 - i2)) % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
    }
    Ok(LaneDerivative(total as i64))
}

/// Closed form: zero when one lane's fixed surplus covers the other lane's
/// `S`-edges, else `(−1)^{m₁+m₂+β₁+β₂} binom(m₁+m₂−2, m₁+β₁−β₂−1)`.
pub fn lane_derivative_closed_form(spec: &LaneSpec) -> Result<LaneDerivative> {
    let (m1, m2, b1, b2) = (spec.m1 as i64, spec.m2 as i64, spec.beta1 as i64, spec.beta2 as i64);
    if m1 + m2 < 2 {
        return Err(Error::InvalidArgument("need m1 + m2 ≥ 2".into()));
    }
    if b1 - b2 >= m2 || b2 - b1 >= m1 {
        return Ok(LaneDerivative(0));
    }
    let magnitude = binom_i64(m1 + m2 - 2, m1 + b1 - b2 - 1)
        .ok_or_else(|| Error::cap("lane closed form m1 + m2", spec.order() as usize, 68))?;
    let sign = if (m1 + m2 + b1 + b2) % 2 == 0 { 1 } else { -1 };
    Ok(LaneDerivative(sign * magnitude))
}

/// `binom(k − 2, ⌈(k − 2)/2⌉)`, the magnitude attained by the family at order `k`.
pub fn extremal_magnitude(k: u32) -> i64 {
    let m = k as i64 - 2;
    binom_i64(m, (m + 1) / 2).unwrap_or(0)
}

/// Tuples attaining `+extremal_magnitude(k)` and `−extremal_magnitude(k)`.
pub fn attainment_tuples(k: u32) -> Result<(LaneSpec, LaneSpec)> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("order {k} < 2")));
    }
    if k % 2 == 1 {
        Ok((LaneSpec::new((k - 1) / 2, k.div_ceil(2), 1, 0)?, LaneSpec::new(k.div_ceil(2), (k - 1) / 2, 0, 0)?))
    } else {
        Ok((LaneSpec::new(k / 2, k / 2, 0, 0)?, LaneSpec::new(k / 2 - 1, k / 2 + 1, 1, 0)?))
    }
}

/// Placement of the two lanes in a 2-dimensional box `[0, span] × [−half_gap, half_gap]`.
///
/// Lane 1 climbs the left column to `y = half_gap`, runs right along that row, and
/// descends to the sink; lane 2 mirrors it below. Lane length is `2·half_gap + span`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LaneGeometry {
    pub half_gap: u32,
    pub span: u32,
}

const GROUP_GAP: u32 = 2;

impl LaneGeometry {
    fn c_start(&self) -> u32 {
        GROUP_GAP
    }

    fn b_start(&self, spec: &LaneSpec) -> u32 {
        GROUP_GAP + spec.m1.max(spec.m2) + GROUP_GAP
    }

    fn min_span(spec: &LaneSpec) -> u32 {
        3 * GROUP_GAP + spec.m1.max(spec.m2) + spec.beta1.max(spec.beta2)
    }

    /// Smallest geometry that prices every cross-lane or off-lane route above the
    /// cheaper lane: crossing costs `2h·b`, running off-lane costs `span·(b − a)`
    /// over the lane.
    pub fn auto<T: Weight>(spec: &LaneSpec, a: T, b: T) -> Self {
        let (a, b) = (a.to_i64_lossy() as i128, b.to_i64_lossy() as i128);
        let gap = b - a;
        let load = (spec.m1 + spec.beta1).max(spec.m2 + spec.beta2) as i128;
        let total = (spec.m1 + spec.m2 + spec.beta1 + spec.beta2) as i128;
        let mut h: i128 = 2;
        while 2 * h * b <= gap * total {
            h += 1;
        }
        let mut x = Self::min_span(spec) as i128;
        while x * gap <= 2 * h * a + gap * load {
            x += 1;
        }
        Self { half_gap: h as u32, span: x as u32 }
    }
}

/// A verified (or rejected) lattice realization of a [`LaneSpec`].
#[derive(Clone, Debug)]
pub struct EmbeddedLanes<T> {
    pub lattice: Lattice<T>,
    pub env: Environment,
    pub subset: EdgeSubset,
    pub c1: Vec<EdgeId>,
    pub c2: Vec<EdgeId>,
    /// `spec` with `lane_length` set to the embedded lane length.
    pub spec: LaneSpec,
    pub geometry: LaneGeometry,
}

/// Embed with [`LaneGeometry::auto`] and verify.
pub fn embed_lanes<T: Weight>(spec: &LaneSpec, a: T, b: T) -> Result<EmbeddedLanes<T>> {
    embed_lanes_with(spec, a, b, LaneGeometry::auto(spec, a, b))
}

pub fn embed_lanes_with<T: Weight>(spec: &LaneSpec, a: T, b: T, geometry: LaneGeometry) -> Result<EmbeddedLanes<T>> {
    if spec.order() > MAX_EMBEDDED {
        return Err(Error::cap("embedded m1 + m2", spec.order() as usize, MAX_EMBEDDED as usize));
    }
    if geometry.half_gap < 1 {
        return Err(Error::GeometryInfeasible("lanes need half_gap ≥ 1".into()));
    }
    if geometry.span < LaneGeometry::min_span(spec) {
        return Err(Error::GeometryInfeasible(format!(
            "span {} cannot hold the C and B groups (needs {})",
            geometry.span,
            LaneGeometry::min_span(spec)
        )));
    }
    let h = geometry.half_gap as i64;
    let x = geometry.span as i64;
    let lattice_spec = LatticeSpec::reduced(vec![(0, x), (-h, h)], a, b).with_endpoints(vec![0, 0], vec![x, 0]);
    let lattice = Lattice::build(lattice_spec)?;

    let mut env = lattice.all_b();
    let mut c = [Vec::new(), Vec::new()];
    let counts = [(spec.m1, spec.beta1), (spec.m2, spec.beta2)];
    for (lane, &y_sign) in [1i64, -1].iter().enumerate() {
        let row = y_sign * h;
        let (m, beta) = counts[lane];
        // vertical connectors at both ends, lower endpoint is the base
        for col in [0, x] {
            for y in 0..h {
                let base_y = if y_sign > 0 { y } else { -h + y };
                env.set(lattice.encode_edge(&[col, base_y], 1)?, Value::A);
            }
        }
        for col in 0..x {
            env.set(lattice.encode_edge(&[col, row], 0)?, Value::A);
        }
        for i in 0..m {
            c[lane].push(lattice.encode_edge(&[(geometry.c_start() + i) as i64, row], 0)?);
        }
        for i in 0..beta {
            env.set(lattice.encode_edge(&[(geometry.b_start(spec) + i) as i64, row], 0)?, Value::B);
        }
    }
    let [c1, c2] = c;
    let subset = EdgeSubset::new(c1.iter().chain(&c2).copied().collect())?;
    let lane_length = geometry.span + 2 * geometry.half_gap;
    let embedded = EmbeddedLanes { lattice, env, subset, c1, c2, spec: spec.with_length(lane_length)?, geometry };
    verify_embedding(&embedded)?;
    Ok(embedded)
}

/// Every assignment of `S` must reproduce the analytic lane passage time.
pub fn verify_embedding<T: Weight>(e: &EmbeddedLanes<T>) -> Result<()> {
    let table = HypercubeTable::build(&e.lattice, &e.env, &e.subset)?;
    let c1_mask = table.positions(&EdgeSubset::new(e.c1.clone())?)?;
    let c2_mask = table.positions(&EdgeSubset::new(e.c2.clone())?)?;
    let (a, b) = (e.lattice.a(), e.lattice.b());
    for mask in 0..table.len() as u64 {
        let i1 = (mask & c1_mask).count_ones();
        let i2 = (mask & c2_mask).count_ones();
        let model = lane_passage_time(&e.spec, a, b, i1, i2)?;
        let got = table.get(mask);
        if got != model {
            return Err(Error::VerificationMismatch { mask, lattice: got.to_i64_lossy(), model: model.to_i64_lossy() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m1: u32, m2: u32, b1: u32, b2: u32) -> LaneSpec {
        LaneSpec::new(m1, m2, b1, b2).unwrap()
    }

    /// Sums over every subset of the S-edges individually, without binomial weights.
    fn subset_enumeration(s: &LaneSpec) -> i64 {
        let m = s.m1 + s.m2;
        (0..1u32 << m)
            .map(|mask| {
                let i1 = (mask & ((1 << s.m1) - 1)).count_ones();
                let i2 = (mask >> s.m1).count_ones();
                let t = lane_passage_time(s, 0i64, 1, i1, i2).unwrap();
                if (m - mask.count_ones()).is_multiple_of(2) {
                    t
                } else {
                    -t
                }
            })
            .sum()
    }

    #[test]
    fn lane_times() {
        assert_eq!(lane_passage_time(&spec(1, 1, 0, 0).with_length(5).unwrap(), 1i64, 2, 0, 0).unwrap(), 5);
        assert_eq!(lane_passage_time(&spec(1, 1, 0, 0).with_length(5).unwrap(), 1i64, 2, 1, 1).unwrap(), 6);
        let s = spec(0, 2, 1, 0).with_length(7).unwrap();
        assert_eq!(lane_passage_time(&s, 1i64, 3, 0, 1).unwrap(), 7 + 2);
        assert!(lane_passage_time(&s, 1i64, 3, 1, 0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(LaneSpec::new(1, 0, 0, 0).is_err());
        assert!(spec(1, 1, 2, 0).with_length(2).is_err());
        assert_eq!(spec(1, 1, 2, 0).lane_length, 3);
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(lane_derivative_bruteforce(&spec(1, 1, 0, 0)).unwrap(), LaneDerivative(1));
        assert_eq!(lane_derivative_bruteforce(&spec(0, 2, 1, 0)).unwrap(), LaneDerivative(-1));
        assert_eq!(lane_derivative_bruteforce(&spec(2, 2, 0, 0)).unwrap(), LaneDerivative(2));
        assert_eq!(lane_derivative_bruteforce(&spec(3, 2, 0, 0)).unwrap(), LaneDerivative(-3));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(lane_derivative_closed_form(&spec(1, 1, 2, 0)).unwrap(), LaneDerivative(0));
        assert_eq!(lane_derivative_closed_form(&spec(1, 2, 1, 0)).unwrap(), LaneDerivative(1));
        assert_eq!(lane_derivative_closed_form(&spec(3, 2, 0, 0)).unwrap(), LaneDerivative(-3));
        assert_eq!(lane_derivative_closed_form(&spec(2, 3, 1, 0)).unwrap(), LaneDerivative(3));
    }

    #[test]
    fn brute_force_matches_subset_enumeration() {
        for m1 in 0..=5 {
            for m2 in 0..=5 {
                if m1 + m2 < 2 {
                    continue;
                }
                for b1 in 0..=3 {
                    for b2 in 0..=3 {
                        let s = spec(m1, m2, b1, b2);
                        assert_eq!(lane_derivative_bruteforce(&s).unwrap().0, subset_enumeration(&s), "{s:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn caps() {
        assert!(lane_derivative_bruteforce(&spec(13, 12, 0, 0)).is_err());
        assert!(embed_lanes(&spec(6, 5, 0, 0), 1i64, 2).is_err());
    }

    #[test]
    fn extremal_magnitudes() {
        let expected = [(2, 1), (3, 1), (4, 2), (5, 3), (6, 6), (7, 10), (8, 20), (9, 35)];
        for (k, v) in expected {
            assert_eq!(extremal_magnitude(k), v, "k = {k}");
        }
    }

    #[test]
    fn embedding_reproduces_model() {
        for s in [spec(1, 1, 0, 0), spec(2, 1, 0, 0), spec(0, 2, 1, 0), spec(1, 2, 1, 0)] {
            let e = embed_lanes(&s, 1i64, 2).unwrap();
            assert_eq!(e.subset.order() as u32, s.order());
            assert_eq!(e.spec.lane_length, e.geometry.span + 2 * e.geometry.half_gap);
        }
    }

    #[test]
    fn adjacent_lanes_fail_verification() {
        let s = spec(0, 5, 5, 0);
        let g = LaneGeometry { half_gap: 1, span: LaneGeometry::auto(&s, 1i64, 2).span };
        assert!(matches!(embed_lanes_with(&s, 1i64, 2, g), Err(Error::VerificationMismatch { .. })));
        assert!(embed_lanes(&s, 1i64, 2).is_ok());
    }
}
