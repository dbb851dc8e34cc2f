use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{MeasureTable, ProbabilityVector, SubsetFamily};
use crate::rational::{half, rat, to_f64};
use crate::reductions::weak_hypothesis_holds;

use super::{enumerate_up_sets, max_cross_product, FamilyPair, ORACLE_CAP};

#[derive(Debug, Clone, Serialize)]
pub struct WeakProbeReport {
    #[serde(with = "crate::rational::serde_rational")]
    pub max: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub p1p2: BigRational,
    pub max_equals_p1p2: bool,
    pub w_weak: Vec<usize>,
    pub stars_only: bool,
    /// The full extremal list whenever either property fails.
    pub counterexample: Option<Vec<FamilyPair>>,
}

/// Compare the exhaustive maximum with `p1 p2` and the extremal list with the
/// weak-form stars. Records the outcome; never asserts it.
pub fn probe_conjecture_weak(pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> Result<WeakProbeReport> {
    if !weak_hypothesis_holds(pv1, pv2) {
        return Err(Error::Precondition("p1 p2 is not the largest coordinate product".into()));
    }
    let r = max_cross_product(pv1, pv2)?;
    let ok = r.max_equals_p1p2 && r.stars_weak;
    Ok(WeakProbeReport {
        max_equals_p1p2: r.max_equals_p1p2,
        stars_only: r.stars_weak,
        w_weak: r.w_weak.elements().to_vec(),
        counterexample: (!ok).then(|| r.pairs.clone()),
        max: r.max,
        p1p2: r.p1p2,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityPoint {
    #[serde(with = "crate::rational::serde_rational")]
    pub eps: BigRational,
    pub pairs: usize,
    /// Largest `min_l max(μ1(U1 △ Star l), μ2(U2 △ Star l))` among pairs with
    /// product above `(1 - ε) p1 p2`.
    pub max_distance: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub points: Vec<StabilityPoint>,
    /// `max distance / √ε` over the grid.
    pub empirical_c: f64,
}

pub fn probe_stability(
    pv1: &ProbabilityVector,
    pv2: &ProbabilityVector,
    eps_grid: &[BigRational],
) -> Result<StabilityReport> {
    let n = pv1.n();
    if pv2.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: pv2.n() });
    }
    if n > 4 {
        return Err(Error::SizeCap { n, cap: 4 });
    }
    if pv1.first() >= &half() || pv2.first() >= &half() {
        return Err(Error::Precondition("stability probe needs p1, p2 < 1/2".into()));
    }
    if eps_grid.iter().any(|e| e <= &BigRational::zero() || e > &BigRational::one()) {
        return Err(Error::OutOfRange("ε must lie in (0, 1]".into()));
    }
    let catalog = enumerate_up_sets(n, false)?;
    let (t1, t2) = (MeasureTable::new(pv1), MeasureTable::new(pv2));
    let fams: Vec<SubsetFamily> = catalog.families().collect();
    let m1: Vec<BigRational> = fams.iter().map(|f| t1.measure(f).unwrap()).collect();
    let m2: Vec<BigRational> = fams.iter().map(|f| t2.measure(f).unwrap()).collect();
    let blockers: Vec<u64> = fams.iter().map(|f| f.blocker().as_word().unwrap()).collect();
    let stars: Vec<SubsetFamily> = (1..=n).map(|l| SubsetFamily::star(n, l).unwrap()).collect();
    let p1p2 = pv1.first() * pv2.first();
    let widest = eps_grid.iter().max().cloned().unwrap_or_else(BigRational::zero);
    let floor = (BigRational::one() - &widest) * &p1p2;

    // (deficiency ε* = 1 - product/p1p2, distance) for every pair close enough.
    let mut scatter: Vec<(BigRational, f64)> = Vec::new();
    for i in 0..fams.len() {
        for j in 0..fams.len() {
            if catalog.words()[j] & blockers[i] != 0 {
                continue;
            }
            let prod = &m1[i] * &m2[j];
            if prod <= floor {
                continue;
            }
            let dist = stars
                .iter()
                .map(|s| {
                    let d1 = t1.measure(&fams[i].symmetric_difference(s).unwrap()).unwrap();
                    let d2 = t2.measure(&fams[j].symmetric_difference(s).unwrap()).unwrap();
                    to_f64(&d1.max(d2))
                })
                .fold(f64::INFINITY, f64::min);
            scatter.push((BigRational::one() - prod / &p1p2, dist));
        }
    }
    let points: Vec<StabilityPoint> = eps_grid
        .iter()
        .map(|eps| {
            let hits: Vec<f64> = scatter.iter().filter(|(d, _)| d < eps).map(|(_, v)| *v).collect();
            let max_distance = hits.iter().copied().fold(0.0, f64::max);
            StabilityPoint {
                eps: eps.clone(),
                pairs: hits.len(),
                max_distance,
                ratio: max_distance / to_f64(eps).sqrt(),
            }
        })
        .collect();
    let empirical_c = points.iter().map(|p| p.ratio).fold(0.0, f64::max);
    Ok(StabilityReport { points, empirical_c })
}

#[derive(Debug, Clone, Serialize)]
pub struct SingleFamilyReport {
    #[serde(with = "crate::rational::serde_rational")]
    pub max: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub p_first: BigRational,
    pub max_le_p_first: bool,
    /// `p(1) = max` and `p(l) ≤ 1/2` for `l ≥ 3`.
    pub hypotheses: bool,
    /// `p^3 + 3p^2(1-p)` when the first three coordinates share a value `p > 1/2`.
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub majority_value: Option<BigRational>,
    pub extremal: Vec<SubsetFamily>,
}

/// Largest `μ_p(U)` over intersecting up-sets `U`.
pub fn probe_single_family_conjecture(pv: &ProbabilityVector) -> Result<SingleFamilyReport> {
    let n = pv.n();
    let catalog = enumerate_up_sets(n, false)?;
    debug_assert!(n <= ORACLE_CAP);
    let table = MeasureTable::new(pv);
    let mut best = BigRational::zero();
    let mut extremal = Vec::new();
    for f in catalog.families() {
        if f.as_word().unwrap() & f.blocker().as_word().unwrap() != 0 {
            continue;
        }
        let m = table.measure(&f)?;
        if m > best {
            best = m.clone();
            extremal.clear();
        }
        if m == best {
            extremal.push(f);
        }
    }
    let h = half();
    let hypotheses = pv.first() == pv.max() && pv.entries().iter().skip(2).all(|p| p <= &h);
    let majority_value = (n >= 3 && pv.p(1) == pv.p(2) && pv.p(2) == pv.p(3) && pv.p(1) > &h).then(|| {
        let p = pv.p(1);
        p * p * p + rat(3, 1) * p * p * (BigRational::one() - p)
    });
    Ok(SingleFamilyReport {
        max_le_p_first: &best <= pv.first(),
        p_first: pv.first().clone(),
        max: best,
        hypotheses,
        majority_value,
        extremal,
    })
}
