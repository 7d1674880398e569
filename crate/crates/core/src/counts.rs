//! Closed-form worker counts for PolyDot-CMPC and three baselines, plus the
//! parameter regions in which PolyDot-CMPC is claimed to need strictly fewer
//! workers than each baseline.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::powersets::SchemeParams;

/// The six branches of the PolyDot-CMPC worker count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Psi1,
    Psi2,
    Psi3,
    Psi4,
    Psi5,
    Psi6,
}

impl Region {
    pub const ALL: [Region; 6] = [
        Region::Psi1,
        Region::Psi2,
        Region::Psi3,
        Region::Psi4,
        Region::Psi5,
        Region::Psi6,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Region::Psi1 => "psi1",
            Region::Psi2 => "psi2",
            Region::Psi3 => "psi3",
            Region::Psi4 => "psi4",
            Region::Psi5 => "psi5",
            Region::Psi6 => "psi6",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Region::Psi1 => "ψ1",
            Region::Psi2 => "ψ2",
            Region::Psi3 => "ψ3",
            Region::Psi4 => "ψ4",
            Region::Psi5 => "ψ5",
            Region::Psi6 => "ψ6",
        }
    }

    /// Whether `params` lies in this branch's guard.
    pub fn matches(self, params: &SchemeParams) -> bool {
        let (s, t, z) = (params.s() as i64, params.t() as i64, params.z() as i64);
        let ts = t * s;
        let inner = params.neither_one();
        match self {
            Region::Psi1 => ts < z || t == 1,
            Region::Psi2 => inner && ts - t < z && z <= ts,
            Region::Psi3 => inner && ts - 2 * t < z && z <= ts - t,
            Region::Psi4 => inner && !params.z_at_most_upsilon() && z <= ts - 2 * t,
            Region::Psi5 => inner && params.z_at_most_upsilon(),
            Region::Psi6 => s == 1 && t >= z && t != 1,
        }
    }

    /// The branch formula, evaluated regardless of the guard.
    pub fn formula(self, params: &SchemeParams) -> i64 {
        let (s, t, z) = (params.s() as i64, params.t() as i64, params.z() as i64);
        let ts = t * s;
        let th = params.theta() as i64;
        let p = params.p() as i64;
        match self {
            Region::Psi1 => (p + 2) * ts + th * (t - 1) + 2 * z - 1,
            Region::Psi2 => 2 * ts + th * (t - 1) + 3 * z - 1,
            Region::Psi3 => 2 * ts + th * (t - 1) + 2 * z - 1,
            Region::Psi4 => (t + 1) * ts + (t - 1) * (z + t - 1) + 2 * z - 1,
            Region::Psi5 => th * t + z,
            Region::Psi6 => t * t + 2 * t + t * z - 1,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Determines the unique branch for `params`. Zero or several matching
/// branches is a hard error.
pub fn polydot_region(params: &SchemeParams) -> Result<Region> {
    let hits: Vec<Region> = Region::ALL
        .into_iter()
        .filter(|r| r.matches(params))
        .collect();
    match hits.as_slice() {
        [r] => Ok(*r),
        _ => Err(Error::RegionDispatch {
            s: params.s(),
            t: params.t(),
            z: params.z(),
            detail: format!("matched {hits:?}"),
        }),
    }
}

/// Closed-form PolyDot-CMPC worker count.
pub fn n_polydot(params: &SchemeParams) -> Result<u64> {
    n_polydot_with_region(params).map(|(_, n)| n)
}

pub fn n_polydot_with_region(params: &SchemeParams) -> Result<(Region, u64)> {
    let region = polydot_region(params)?;
    let n = region.formula(params);
    debug_assert!(n >= 1);
    Ok((region, n as u64))
}

/// Entangled-CMPC.
pub fn n_entangled(params: &SchemeParams) -> u64 {
    let (s, t, z) = (params.s(), params.t(), params.z());
    if z + s > t * s {
        2 * s * t * t + 2 * z - 1
    } else {
        s * t * t + 3 * s * t - 2 * s + t * (z - 1) + 1
    }
}

/// SSMM.
pub fn n_ssmm(params: &SchemeParams) -> u64 {
    let (s, t, z) = (params.s(), params.t(), params.z());
    (t + 1) * (t * s + z) - 1
}

/// GCSA-NA with a batch of one.
pub fn n_gcsa(params: &SchemeParams) -> u64 {
    let (s, t, z) = (params.s(), params.t(), params.z());
    2 * s * t * t + 2 * z - 1
}

/// Schemes in tie-breaking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    PolyDot,
    Entangled,
    Ssmm,
    GcsaNa,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::PolyDot,
        Scheme::Entangled,
        Scheme::Ssmm,
        Scheme::GcsaNa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::PolyDot => "polydot",
            Scheme::Entangled => "entangled",
            Scheme::Ssmm => "ssmm",
            Scheme::GcsaNa => "gcsa",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkerCountReport {
    pub params: SchemeParams,
    pub n_polydot: u64,
    pub n_entangled: u64,
    pub n_ssmm: u64,
    pub n_gcsa: u64,
    pub region: Region,
    pub winner: Scheme,
}

impl WorkerCountReport {
    pub fn count(&self, scheme: Scheme) -> u64 {
        match scheme {
            Scheme::PolyDot => self.n_polydot,
            Scheme::Entangled => self.n_entangled,
            Scheme::Ssmm => self.n_ssmm,
            Scheme::GcsaNa => self.n_gcsa,
        }
    }

    /// Schemes attaining the minimum, in tie-breaking order.
    pub fn minimizers(&self) -> Vec<Scheme> {
        let best = Scheme::ALL.iter().map(|&s| self.count(s)).min().unwrap();
        Scheme::ALL
            .into_iter()
            .filter(|&s| self.count(s) == best)
            .collect()
    }
}

/// All four counts; the winner is the first minimizer in [`Scheme::ALL`] order.
pub fn best_scheme(params: &SchemeParams) -> Result<WorkerCountReport> {
    let (region, n_polydot) = n_polydot_with_region(params)?;
    let mut report = WorkerCountReport {
        params: *params,
        n_polydot,
        n_entangled: n_entangled(params),
        n_ssmm: n_ssmm(params),
        n_gcsa: n_gcsa(params),
        region,
        winner: Scheme::PolyDot,
    };
    report.winner = report.minimizers()[0];
    Ok(report)
}

/// The baseline a region lemma compares against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Baseline {
    Entangled,
    Ssmm,
    Gcsa,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [Baseline::Entangled, Baseline::Ssmm, Baseline::Gcsa];

    pub fn scheme(self) -> Scheme {
        match self {
            Baseline::Entangled => Scheme::Entangled,
            Baseline::Ssmm => Scheme::Ssmm,
            Baseline::Gcsa => Scheme::GcsaNa,
        }
    }

    pub fn count(self, params: &SchemeParams) -> u64 {
        match self {
            Baseline::Entangled => n_entangled(params),
            Baseline::Ssmm => n_ssmm(params),
            Baseline::Gcsa => n_gcsa(params),
        }
    }

    /// Number of the lemma stating this baseline's regions.
    pub fn lemma(self) -> u8 {
        match self {
            Baseline::Entangled => 1,
            Baseline::Ssmm => 2,
            Baseline::Gcsa => 3,
        }
    }
}

type Q = Ratio<i64>;

fn r(n: i64) -> Q {
    Q::from_integer(n)
}

fn frac(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// One-based indices of the enumerated conditions that hold for `params`.
pub fn lemma_conditions(which: Baseline, params: &SchemeParams) -> Vec<usize> {
    let conds = match which {
        Baseline::Entangled => entangled_conditions(params),
        Baseline::Ssmm => ssmm_conditions(params),
        Baseline::Gcsa => gcsa_conditions(params),
    };
    conds
        .into_iter()
        .enumerate()
        .filter(|(_, hit)| *hit)
        .map(|(i, _)| i + 1)
        .collect()
}

/// True iff `params` falls in at least one of the lemma's regions.
pub fn lemma_region(which: Baseline, params: &SchemeParams) -> bool {
    !lemma_conditions(which, params).is_empty()
}

// Each fractional bound is only evaluated behind the guard that keeps its
// denominator nonzero.
fn entangled_conditions(params: &SchemeParams) -> Vec<bool> {
    let (s, t, z) = (params.s() as i64, params.t() as i64, params.z() as i64);
    let ts = t * s;
    let p = params.p() as i64;
    let inner = s != 1 && t != 1;
    let zq = r(z);
    let upsilon = std::cmp::max(r(ts - 2 * t - s + 2), frac(ts - 2 * t + 1, 2));
    vec![
        // 1
        t != 1 && z > ts && r(p) < frac(t - 1, s),
        // 2
        inner && ts - s < z && z <= ts && t - 1 > s,
        // 3
        inner && s == t - 1 && (t - 1) * (t - 1) < z && z < t * (t - 1),
        // 4
        t > 3 && s != 1 && {
            let lower = r(ts - t) - std::cmp::min(r(0), r(1) - frac(2 * s - 5, t - 3));
            lower < zq && z <= ts - s
        },
        // 5
        s == 2 && t == 3 && z == 4,
        // 6
        t == 2 && s == 2 && (z == 1 || z == 2),
        // 7
        t > 2 && t >= s && s != 1 && {
            let lower = std::cmp::max(r(s * t - t - s) - frac(2, t - 2), r(ts - 2 * t));
            lower < zq && z <= ts - t
        },
        // 8
        inner && t < s && s <= 2 * t && ts - s < z && z <= ts - t,
        // 9
        t == 2 && (3..=4).contains(&s) && 2 * (s - 2) < z && z <= 2 * (s - 1),
        // 10
        t > 2 && t < s && s <= 2 * t && s * t - 2 * t < z && z <= ts - s,
        // 11
        inner && s > 2 * t && ts - 2 * t < z && z <= ts - t,
        // 12
        inner
            && 2 * t >= s
            && upsilon < zq
            && z <= std::cmp::min(s * t - 2 * t, 2 * ts - t * t + t - 2 * s + 1),
        // 13
        s > 2 * t && t != 1 && t != 2 && ts - s < z && z <= ts - 2 * t,
        // 14
        t == 2 && 4 < s && s < z && z < 2 * s - 4,
        // 15
        inner && 2 * t < s && ts - 2 * t - s + 2 < z && z < ts - s,
        // 16
        inner && r(s * t - 2 * s - t) - frac(1, t - 1) < zq && zq <= upsilon,
    ]
}

fn ssmm_conditions(params: &SchemeParams) -> Vec<bool> {
    let (s, t, z) = (params.s() as i64, params.t() as i64, params.z() as i64);
    let ts = t * s;
    let p = params.p() as i64;
    let inner = s != 1 && t != 1;
    vec![
        // 1
        t != 1 && r(z) > std::cmp::max(r(ts), r(ts - t) + frac(p * ts, t - 1)),
        // 2: derived where psi2 applies, so s, t != 1; empty for t = 2
        inner && t > 2 && frac(t - 1, t - 2) * r(s * t - t) < r(z) && z <= ts,
    ]
}

fn gcsa_conditions(params: &SchemeParams) -> Vec<bool> {
    let (s, t, z) = (params.s() as i64, params.t() as i64, params.z() as i64);
    let ts = t * s;
    let p = params.p() as i64;
    let inner = s != 1 && t != 1;
    vec![
        // 1
        t != 1 && z > ts && r(p) < frac(t - 1, s),
        // 2: derived where psi2 applies
        inner && s < t && ts - t < z && z <= std::cmp::min(ts, t * (t - 1) - 1),
        // 3: derived where psi3..psi5 apply
        inner && z <= ts - t,
        // 4
        s == 1 && t > z && t != 2,
    ]
}
