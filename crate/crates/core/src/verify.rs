//! Grid harness comparing the closed-form worker count against the
//! brute-force support oracle, checking the disjointness conditions, and
//! testing every region predicate against direct evaluation.

use rayon::prelude::*;

use crate::counts::{lemma_conditions, n_polydot_with_region, Baseline, Region};
use crate::error::Result;
use crate::powersets::{check_conditions, support_h, SchemeParams};

/// Every `(s, t, z)` with `s <= s_max`, `t <= t_max`, `s t <= max_product`
/// and `1 <= z <= 2ts + z_pad`, in ascending `(s, t, z)` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub s_max: u64,
    pub t_max: u64,
    pub max_product: u64,
    pub z_pad: u64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            s_max: 6,
            t_max: 6,
            max_product: u64::MAX,
            z_pad: 5,
        }
    }
}

impl Grid {
    pub fn points(&self) -> Vec<SchemeParams> {
        let mut out = Vec::new();
        for s in 1..=self.s_max {
            for t in 1..=self.t_max {
                if s * t > self.max_product {
                    continue;
                }
                for z in 1..=2 * s * t + self.z_pad {
                    out.push(SchemeParams::new(s, t, z).expect("grid values are positive"));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceFailure {
    pub params: SchemeParams,
    pub region: Region,
    pub formula: u64,
    pub oracle: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaViolation {
    pub baseline: Baseline,
    pub condition: usize,
    pub params: SchemeParams,
    pub polydot: u64,
    pub baseline_count: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub points: usize,
    pub equivalence_failures: Vec<EquivalenceFailure>,
    pub dispatch_errors: Vec<(SchemeParams, String)>,
    pub condition_failures: Vec<SchemeParams>,
    pub lemma_violations: Vec<LemmaViolation>,
    /// Points where PolyDot-CMPC is strictly better but no region of the
    /// corresponding lemma fires, per baseline in [`Baseline::ALL`] order.
    pub completeness_gaps: [usize; 3],
}

impl VerifyReport {
    pub fn violations_for(&self, baseline: Baseline) -> impl Iterator<Item = &LemmaViolation> {
        self.lemma_violations
            .iter()
            .filter(move |v| v.baseline == baseline)
    }

    /// Equivalence, dispatch and condition failures, and soundness
    /// violations of the SSMM and GCSA-NA regions, are fatal. Entangled-CMPC
    /// region violations are reported only.
    pub fn is_clean(&self) -> bool {
        self.equivalence_failures.is_empty()
            && self.dispatch_errors.is_empty()
            && self.condition_failures.is_empty()
            && self.violations_for(Baseline::Ssmm).next().is_none()
            && self.violations_for(Baseline::Gcsa).next().is_none()
    }
}

#[derive(Default)]
struct PointResult {
    equivalence: Option<EquivalenceFailure>,
    dispatch: Option<(SchemeParams, String)>,
    conditions_fail: bool,
    violations: Vec<LemmaViolation>,
    gaps: [usize; 3],
}

/// Runs the harness with the library's closed form.
pub fn verify_grid(grid: &Grid) -> VerifyReport {
    verify_grid_with(grid, n_polydot_with_region)
}

/// Runs the harness with a caller-supplied closed form, so the harness
/// itself can be checked against deliberately wrong formulas.
pub fn verify_grid_with<F>(grid: &Grid, count: F) -> VerifyReport
where
    F: Fn(&SchemeParams) -> Result<(Region, u64)> + Sync,
{
    let points = grid.points();
    let results: Vec<PointResult> = points.par_iter().map(|p| check_point(p, &count)).collect();
    let mut report = VerifyReport {
        points: points.len(),
        ..Default::default()
    };
    for (p, res) in points.iter().zip(results) {
        report.equivalence_failures.extend(res.equivalence);
        report.dispatch_errors.extend(res.dispatch);
        if res.conditions_fail {
            report.condition_failures.push(*p);
        }
        report.lemma_violations.extend(res.violations);
        for (acc, g) in report.completeness_gaps.iter_mut().zip(res.gaps) {
            *acc += g;
        }
    }
    report
}

fn check_point<F>(p: &SchemeParams, count: &F) -> PointResult
where
    F: Fn(&SchemeParams) -> Result<(Region, u64)>,
{
    let mut res = PointResult {
        conditions_fail: !check_conditions(p).holds(),
        ..Default::default()
    };
    let (region, formula) = match count(p) {
        Ok(v) => v,
        Err(e) => {
            res.dispatch = Some((*p, e.to_string()));
            return res;
        }
    };
    let oracle = support_h(p).len() as u64;
    if oracle != formula {
        res.equivalence = Some(EquivalenceFailure {
            params: *p,
            region,
            formula,
            oracle,
        });
    }
    for (k, baseline) in Baseline::ALL.into_iter().enumerate() {
        let base = baseline.count(p);
        let fired = lemma_conditions(baseline, p);
        if fired.is_empty() && formula < base {
            res.gaps[k] += 1;
        }
        if formula >= base {
            res.violations
                .extend(fired.into_iter().map(|condition| LemmaViolation {
                    baseline,
                    condition,
                    params: *p,
                    polydot: formula,
                    baseline_count: base,
                }));
        }
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_rows_are_clean() {
        let grid = Grid {
            s_max: 1,
            t_max: 1,
            max_product: 1,
            z_pad: 20,
        };
        let report = verify_grid(&grid);
        assert_eq!(report.points, 22);
        assert!(report.is_clean(), "{report:?}");
        for p in grid.points() {
            assert_eq!(support_h(&p).len() as u64, 2 * p.z() + 1);
        }
    }

    #[test]
    fn harness_catches_an_off_by_one() {
        let grid = Grid {
            s_max: 3,
            t_max: 3,
            max_product: 9,
            z_pad: 2,
        };
        let mutated = |p: &SchemeParams| {
            n_polydot_with_region(p).map(|(r, n)| {
                if r == Region::Psi3 {
                    (r, n + 1)
                } else {
                    (r, n)
                }
            })
        };
        let is_psi3 = |f: &&EquivalenceFailure| f.region == Region::Psi3;
        assert!(verify_grid(&grid)
            .equivalence_failures
            .iter()
            .find(is_psi3)
            .is_none());
        let report = verify_grid_with(&grid, mutated);
        assert!(!report.is_clean());
        let first = report.equivalence_failures.iter().find(is_psi3).unwrap();
        assert_eq!(first.params, SchemeParams::new(2, 2, 1).unwrap());
        assert_eq!(first.formula, first.oracle + 1);
    }
}
