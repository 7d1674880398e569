//! Exponent sets of the coded and secret share polynomials.
//!
//! Everything here is symbolic: the sets say which powers of `x` carry a
//! coefficient in `F_A`, `F_B` and their product `H = F_A * F_B`. The
//! cardinality of the product support is the number of workers the scheme
//! needs, so [`support_h`] doubles as the brute-force oracle for the closed
//! form in [`crate::counts`].

use std::fmt;

use crate::error::{Error, Result};

/// A sorted, deduplicated set of non-negative exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExponentSet(Vec<u64>);

impl ExponentSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// The contiguous range `start..start + len`.
    pub fn range(start: u64, len: u64) -> Self {
        Self((start..start + len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.0.clone()
    }

    pub fn contains(&self, e: u64) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    /// Index of `e` in ascending order.
    pub fn position(&self, e: u64) -> Option<usize> {
        self.0.binary_search(&e).ok()
    }

    pub fn max(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &ExponentSet) -> ExponentSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersection(&self, other: &ExponentSet) -> ExponentSet {
        self.iter().filter(|&e| other.contains(e)).collect()
    }

    pub fn is_disjoint(&self, other: &ExponentSet) -> bool {
        self.iter().all(|e| !other.contains(e))
    }

    pub fn is_subset(&self, other: &ExponentSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }
}

impl FromIterator<u64> for ExponentSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut v: Vec<u64> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl fmt::Display for ExponentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `{a + b : a in lhs, b in rhs}`
pub fn sumset(lhs: &ExponentSet, rhs: &ExponentSet) -> ExponentSet {
    let mut out = Vec::with_capacity(lhs.len() * rhs.len());
    for a in lhs.iter() {
        out.extend(rhs.iter().map(|b| a + b));
    }
    out.into_iter().collect()
}

/// Which secret layout `F_A` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaCase {
    /// `z > ts - t` with `s, t != 1`: secrets fill `p` gaps, then a tail.
    Windowed,
    /// Otherwise: one contiguous run starting at `ts + theta' p`.
    Contiguous,
}

/// Which secret layout `F_B` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FbCase {
    /// `z > tau`, `t = 1` or `s = 1`: a run above the highest coded power.
    Top,
    /// `(tau + 1)/2 < z <= tau` with `s, t != 1`: `p'` gaps, then a tail.
    Windowed,
    /// `z <= (tau + 1)/2` with `s, t != 1`: a run starting at `ts`.
    Low,
}

/// Partition counts `s` (row-wise) and `t` (column-wise) and the collusion
/// bound `z`, with the derived scalars of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchemeParams {
    s: u64,
    t: u64,
    z: u64,
}

impl SchemeParams {
    pub fn new(s: u64, t: u64, z: u64) -> Result<Self> {
        for (name, v) in [("s", s), ("t", t), ("z", z)] {
            if v < 1 {
                return Err(Error::InvalidParams(format!("{name} must be ≥ 1")));
            }
        }
        Ok(Self { s, t, z })
    }

    #[inline]
    pub fn s(&self) -> u64 {
        self.s
    }

    #[inline]
    pub fn t(&self) -> u64 {
        self.t
    }

    #[inline]
    pub fn z(&self) -> u64 {
        self.z
    }

    #[inline]
    pub fn ts(&self) -> u64 {
        self.t * self.s
    }

    /// Column stride of the coded part of `F_B`: `t(2s - 1)`.
    #[inline]
    pub fn theta(&self) -> u64 {
        self.t * (2 * self.s - 1)
    }

    /// `theta' - ts - t = ts - 2t`, negative for `s = 1`.
    #[inline]
    pub fn tau(&self) -> i64 {
        self.theta() as i64 - self.ts() as i64 - self.t as i64
    }

    /// Number of full gap windows the secrets of `F_A` occupy. For `s = 1`
    /// the denominator `ts - t` vanishes and `p = t - 1`.
    pub fn p(&self) -> u64 {
        (self.z - 1)
            .checked_div(self.ts() - self.t)
            .map_or(self.t - 1, |p| p.min(self.t - 1))
    }

    /// `min(floor((z-1)/(tau-z+1)), t-1)`, defined only in the windowed `F_B`
    /// regime where the denominator is at least one.
    pub fn p_prime(&self) -> Option<u64> {
        let tau = self.tau();
        let z = self.z as i64;
        if 2 * z > tau + 1 && z <= tau {
            let denom = (tau - z + 1) as u64;
            Some(((self.z - 1) / denom).min(self.t - 1))
        } else {
            None
        }
    }

    /// `z <= max(ts - 2t - s + 2, (ts - 2t + 1)/2)`, compared without
    /// fractions.
    pub fn z_at_most_upsilon(&self) -> bool {
        let (ts, t, s, z) = (
            self.ts() as i64,
            self.t as i64,
            self.s as i64,
            self.z as i64,
        );
        z <= ts - 2 * t - s + 2 || 2 * z <= ts - 2 * t + 1
    }

    #[inline]
    pub fn neither_one(&self) -> bool {
        self.s != 1 && self.t != 1
    }

    pub fn fa_case(&self) -> FaCase {
        if self.z > self.ts() - self.t && self.neither_one() {
            FaCase::Windowed
        } else {
            FaCase::Contiguous
        }
    }

    pub fn fb_case(&self) -> FbCase {
        let (z, tau) = (self.z as i64, self.tau());
        if z > tau || !self.neither_one() {
            FbCase::Top
        } else if 2 * z > tau + 1 {
            FbCase::Windowed
        } else {
            FbCase::Low
        }
    }
}

impl fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s={} t={} z={}", self.s, self.t, self.z)
    }
}

/// Coded powers of `F_A`: `i + t j`, i.e. `{0, ..., ts - 1}`.
pub fn p_ca(params: &SchemeParams) -> ExponentSet {
    ExponentSet::range(0, params.ts())
}

/// Coded powers of `F_B`: `t(s - 1 - k) + theta' l`.
pub fn p_cb(params: &SchemeParams) -> ExponentSet {
    let (s, t, th) = (params.s(), params.t(), params.theta());
    (0..s)
        .flat_map(|k| (0..t).map(move |l| t * (s - 1 - k) + th * l))
        .collect()
}

/// The `z` secret powers of `F_A`.
pub fn p_sa(params: &SchemeParams) -> ExponentSet {
    let (ts, th, p, z) = (params.ts(), params.theta(), params.p(), params.z());
    match params.fa_case() {
        FaCase::Windowed => {
            let width = params.t() * (params.s() - 1);
            let windows = (0..p).flat_map(|l| (0..width).map(move |w| ts + th * l + w));
            let tail = (0..z - p * width).map(|u| ts + th * p + u);
            windows.chain(tail).collect()
        }
        FaCase::Contiguous => (0..z).map(|u| ts + th * p + u).collect(),
    }
}

/// The `z` secret powers of `F_B`.
pub fn p_sb(params: &SchemeParams) -> ExponentSet {
    let (ts, th, t, z) = (params.ts(), params.theta(), params.t(), params.z());
    match params.fb_case() {
        FbCase::Top => (0..z).map(|r| ts + th * (t - 1) + r).collect(),
        FbCase::Windowed => {
            let pp = params.p_prime().expect("windowed case defines p'");
            let width = (params.tau() - z as i64 + 1) as u64;
            let windows = (0..pp).flat_map(|l| (0..width).map(move |d| ts + th * l + d));
            let tail = (0..z - pp * width).map(|v| ts + th * pp + v);
            windows.chain(tail).collect()
        }
        FbCase::Low => (0..z).map(|v| ts + v).collect(),
    }
}

/// The `t^2` powers `i + t(s-1) + theta' l` whose coefficients in `F_A F_B`
/// are the output blocks `Y_{i,l}`.
pub fn important_powers(params: &SchemeParams) -> ExponentSet {
    important_power_grid(params)
        .into_iter()
        .map(|(_, _, e)| e)
        .collect()
}

/// `(i, l, exponent)` for every output block, ordered by `l` then `i`.
pub fn important_power_grid(params: &SchemeParams) -> Vec<(u64, u64, u64)> {
    let (s, t, th) = (params.s(), params.t(), params.theta());
    (0..t)
        .flat_map(|l| (0..t).map(move |i| (i, l, i + t * (s - 1) + th * l)))
        .collect()
}

/// The three disjointness conditions on the product support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// important power not in `P(S_A) + P(C_B)`
    C1,
    /// important power not in `P(S_A) + P(S_B)`
    C2,
    /// important power not in `P(S_B) + P(C_A)`
    C3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub power: u64,
    pub condition: Condition,
    /// `(a, b)` with `a + b = power`, `a` from the first set of the sum.
    pub witness: (u64, u64),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionReport {
    pub violations: Vec<Violation>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks C1-C3 for the secret supports the construction produces.
pub fn check_conditions(params: &SchemeParams) -> ConditionReport {
    check_conditions_with(params, &p_sa(params), &p_sb(params))
}

/// Checks C1-C3 for arbitrary secret supports.
pub fn check_conditions_with(
    params: &SchemeParams,
    sa: &ExponentSet,
    sb: &ExponentSet,
) -> ConditionReport {
    let ca = p_ca(params);
    let cb = p_cb(params);
    let pairs = [
        (Condition::C1, sa, &cb),
        (Condition::C2, sa, sb),
        (Condition::C3, sb, &ca),
    ];
    let mut violations = Vec::new();
    for power in important_powers(params).iter() {
        for (condition, lhs, rhs) in pairs {
            for a in lhs.iter().take_while(|&a| a <= power) {
                if rhs.contains(power - a) {
                    violations.push(Violation {
                        power,
                        condition,
                        witness: (a, power - a),
                    });
                }
            }
        }
    }
    ConditionReport { violations }
}

/// The four sumsets whose union is the support of `H = F_A F_B`.
pub fn product_parts(params: &SchemeParams) -> [ExponentSet; 4] {
    let (ca, cb, sa, sb) = (p_ca(params), p_cb(params), p_sa(params), p_sb(params));
    [
        sumset(&ca, &cb),
        sumset(&ca, &sb),
        sumset(&sa, &cb),
        sumset(&sa, &sb),
    ]
}

/// Support of `H`, assuming no coefficient cancels.
pub fn support_h(params: &SchemeParams) -> ExponentSet {
    let [d1, d2, d3, d4] = product_parts(params);
    d1.iter()
        .chain(d2.iter())
        .chain(d3.iter())
        .chain(d4.iter())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: u64, t: u64, z: u64) -> SchemeParams {
        SchemeParams::new(s, t, z).unwrap()
    }

    fn set(v: &[u64]) -> ExponentSet {
        v.iter().copied().collect()
    }

    #[test]
    fn params_validation_and_scalars() {
        assert!(SchemeParams::new(0, 2, 1).is_err());
        assert!(SchemeParams::new(1, 0, 1).is_err());
        assert!(SchemeParams::new(1, 1, 0).is_err());
        let p = sp(4, 15, 100);
        assert_eq!(p.theta(), 105);
        assert_eq!(p.tau(), 30);
        assert_eq!(p.p(), 2);
        assert_eq!(sp(1, 5, 3).p(), 4);
        assert_eq!(sp(1, 5, 3).tau(), -5);
        // s=5, t=2: tau = 6, p' = min((4-1)/(6-4+1), 1) = 1 at z = 4
        assert_eq!(sp(5, 2, 4).p_prime(), Some(1));
        assert_eq!(sp(5, 2, 2).p_prime(), None);
        assert_eq!(sp(5, 2, 7).p_prime(), None);
    }

    #[test]
    fn upsilon_boundary() {
        // s=t=3: ts-2t-s+2 = 2, (ts-2t+1)/2 = 2
        assert!(sp(3, 3, 2).z_at_most_upsilon());
        assert!(!sp(3, 3, 3).z_at_most_upsilon());
        // s=2, t=4: max(-2, 0.5) = 0.5
        assert!(!sp(2, 4, 1).z_at_most_upsilon());
        // s=3, t=4: max(3, 2.5) = 3
        assert!(sp(3, 4, 3).z_at_most_upsilon());
        assert!(!sp(3, 4, 4).z_at_most_upsilon());
    }

    #[test]
    fn coded_sets() {
        assert_eq!(p_ca(&sp(1, 1, 1)), set(&[0]));
        assert_eq!(p_ca(&sp(2, 2, 1)), set(&[0, 1, 2, 3]));
        let big = p_ca(&sp(4, 15, 1));
        assert_eq!(big.len(), 60);
        assert_eq!(big.max(), Some(59));
        assert_eq!(p_cb(&sp(2, 2, 1)), set(&[0, 2, 6, 8]));
        assert_eq!(p_cb(&sp(2, 1, 1)), set(&[0, 1]));
        assert_eq!(p_cb(&sp(1, 2, 1)), set(&[0, 2]));
    }

    #[test]
    fn secret_sets() {
        assert_eq!(p_sa(&sp(2, 2, 2)), set(&[4, 5]));
        assert_eq!(p_sa(&sp(2, 1, 2)), set(&[2, 3]));
        assert_eq!(p_sa(&sp(1, 2, 3)), set(&[4, 5, 6]));
        assert_eq!(p_sb(&sp(2, 2, 2)), set(&[10, 11]));
        assert_eq!(p_sb(&sp(2, 1, 2)), set(&[2, 3]));
        assert_eq!(p_sb(&sp(5, 2, 2)), set(&[10, 11]));
        assert_eq!(sp(5, 2, 2).fb_case(), FbCase::Low);
        // windowed F_A: s=t=2, z=3 > ts-t = 2, p = 1, width 2:
        // {4, 5} then tail {4+6+0} = {10}
        assert_eq!(sp(2, 2, 3).fa_case(), FaCase::Windowed);
        assert_eq!(p_sa(&sp(2, 2, 3)), set(&[4, 5, 10]));
        // windowed F_B: s=5, t=2, z=4, tau=6, p'=1, width tau-z+1=3:
        // {10,11,12} then tail {10+18+0}
        assert_eq!(sp(5, 2, 4).fb_case(), FbCase::Windowed);
        assert_eq!(p_sb(&sp(5, 2, 4)), set(&[10, 11, 12, 28]));
    }

    #[test]
    fn important() {
        assert_eq!(important_powers(&sp(2, 1, 1)), set(&[1]));
        assert_eq!(important_powers(&sp(2, 2, 1)), set(&[2, 3, 8, 9]));
        assert_eq!(important_powers(&sp(1, 1, 1)), set(&[0]));
    }

    #[test]
    fn sumsets() {
        let s = set(&[3, 7, 9]);
        assert_eq!(sumset(&set(&[0]), &s), s);
        assert_eq!(sumset(&set(&[0, 1]), &set(&[0, 2])), set(&[0, 1, 2, 3]));
        assert_eq!(
            sumset(&ExponentSet::range(0, 6), &set(&[0, 2, 6, 8, 10, 11])),
            ExponentSet::range(0, 17)
        );
        assert!(sumset(&ExponentSet::new(), &s).is_empty());
    }

    #[test]
    fn conditions() {
        assert!(check_conditions(&sp(2, 2, 2)).holds());
        assert!(check_conditions(&sp(2, 1, 2)).holds());
        let p = sp(2, 1, 2);
        let report = check_conditions_with(&p, &set(&[1, 2]), &p_sb(&p));
        assert!(!report.holds());
        assert!(report.violations.contains(&Violation {
            power: 1,
            condition: Condition::C1,
            witness: (1, 0),
        }));
    }

    #[test]
    fn product_support() {
        assert_eq!(support_h(&sp(2, 1, 2)).len(), 7);
        assert_eq!(support_h(&sp(2, 2, 2)), ExponentSet::range(0, 17));
        assert_eq!(support_h(&sp(1, 1, 1)), set(&[0, 1, 2]));
    }

    #[test]
    fn structural_invariants_on_grid() {
        for s in 1..=8u64 {
            for t in 1..=8u64 {
                if s * t > 48 {
                    continue;
                }
                for z in 1..=2 * s * t + 8 {
                    let p = sp(s, t, z);
                    let (sa, sb) = (p_sa(&p), p_sb(&p));
                    assert_eq!(sa.len() as u64, z, "{p}");
                    assert_eq!(sb.len() as u64, z, "{p}");
                    assert!(p_ca(&p).is_disjoint(&sa), "{p}");
                    assert!(p_cb(&p).is_disjoint(&sb), "{p}");
                    let [d1, d2, d3, d4] = product_parts(&p);
                    let imp = important_powers(&p);
                    assert!(imp.is_subset(&d1), "{p}");
                    assert!(
                        imp.is_disjoint(&d2) && imp.is_disjoint(&d3) && imp.is_disjoint(&d4),
                        "{p}"
                    );
                    assert!(check_conditions(&p).holds(), "{p}");
                }
            }
        }
    }
}
