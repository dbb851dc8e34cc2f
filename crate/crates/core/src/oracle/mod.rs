//! Exhaustive ground truth over up-set pairs at small `n`.

mod probes;

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use probes::{
    probe_conjecture_weak, probe_single_family_conjecture, probe_stability, SingleFamilyReport, StabilityPoint,
    StabilityReport, WeakProbeReport,
};

use crate::error::{Error, Result};
use crate::measure::{
    is_cross_intersecting, product_measure, GroundSet, MeasureTable, ProbabilityVector, SubsetFamily,
};
use crate::reductions::{main_hypotheses_hold, weak_hypothesis_holds, WitnessForm, WitnessSet};
use crate::testkit;

/// Default cap on `n` for the oracle; 6 needs an explicit override.
pub const ORACLE_CAP: usize = 5;
pub const ORACLE_HARD_CAP: usize = 6;

/// Dedekind numbers `M(0..=6)`.
pub const DEDEKIND: [usize; 7] = [2, 3, 6, 20, 168, 7581, 7_828_354];

/// All up-sets over `2^[n]`, stored as single-word bitsets.
#[derive(Debug, Clone)]
pub struct UpSetCatalog {
    n: usize,
    words: Vec<u64>,
}

impl UpSetCatalog {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> SubsetFamily {
        SubsetFamily::from_word(self.n, self.words[i])
    }

    pub fn families(&self) -> impl Iterator<Item = SubsetFamily> + '_ {
        self.words.iter().map(|&w| SubsetFamily::from_word(self.n, w))
    }
}

fn check_cap(n: usize, allow_six: bool) -> Result<()> {
    let cap = if allow_six { ORACLE_HARD_CAP } else { ORACLE_CAP };
    if n > cap {
        return Err(Error::SizeCap { n, cap });
    }
    Ok(())
}

/// Enumerate up-sets; filters all families for `n ≤ 4`, extends recursively above.
pub fn enumerate_up_sets(n: usize, allow_six: bool) -> Result<UpSetCatalog> {
    check_cap(n, allow_six)?;
    let words = if n <= 4 { up_sets_by_filter(n) } else { up_sets_by_recursion(n) };
    Ok(UpSetCatalog { n, words })
}

pub fn up_sets_by_filter(n: usize) -> Vec<u64> {
    assert!(n <= 4);
    let count = 1u64 << (1u32 << n);
    (0..count).filter(|&w| SubsetFamily::from_word(n, w).is_co_complex()).collect()
}

/// `U = U0 ⊔ {x ∪ {n} : x ∈ U1}` with `U0 ⊆ U1` up-sets over `n - 1`.
pub fn up_sets_by_recursion(n: usize) -> Vec<u64> {
    assert!(n <= 6);
    if n == 0 {
        return vec![0, 1];
    }
    let prev = up_sets_by_recursion(n - 1);
    let shift = 1u32 << (n - 1);
    let mut out = Vec::new();
    for &u1 in &prev {
        for &u0 in &prev {
            if u0 & !u1 == 0 {
                out.push(u0 | (u1 << shift));
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FamilyPair {
    pub u1: SubsetFamily,
    pub u2: SubsetFamily,
}

#[derive(Debug, Clone, Serialize)]
pub struct Hypotheses {
    pub main: bool,
    pub weak: bool,
    pub exceptional: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremalReport {
    pub n: usize,
    pub pv1: ProbabilityVector,
    pub pv2: ProbabilityVector,
    pub catalog_size: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub max: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub p1p2: BigRational,
    pub max_equals_p1p2: bool,
    pub hypotheses: Hypotheses,
    pub w_strong: WitnessSet,
    pub w_weak: WitnessSet,
    /// Extremal list equals `{(Star l, Star l) : l ∈ w}` for the strong form.
    pub stars_strong: bool,
    pub stars_weak: bool,
    pub pairs: Vec<FamilyPair>,
}

impl ExtremalReport {
    pub fn contains_pair(&self, u1: &SubsetFamily, u2: &SubsetFamily) -> bool {
        self.pairs.iter().any(|p| &p.u1 == u1 && &p.u2 == u2)
    }
}

pub fn star_pairs(n: usize, w: &WitnessSet) -> BTreeSet<FamilyPair> {
    w.elements()
        .iter()
        .map(|&l| {
            let s = SubsetFamily::star(n, l).expect("l in range");
            FamilyPair { u1: s.clone(), u2: s }
        })
        .collect()
}

/// Maximum of `μ1(U1) μ2(U2)` over cross-intersecting up-set pairs, with all maximizers.
pub fn max_cross_product(pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> Result<ExtremalReport> {
    max_cross_product_with(pv1, pv2, false)
}

pub fn max_cross_product_with(
    pv1: &ProbabilityVector,
    pv2: &ProbabilityVector,
    allow_six: bool,
) -> Result<ExtremalReport> {
    if pv1.n() != pv2.n() {
        return Err(Error::DimensionMismatch { left: pv1.n(), right: pv2.n() });
    }
    let n = pv1.n();
    check_cap(n, allow_six)?;
    let catalog = enumerate_up_sets(n, allow_six)?;
    max_over_catalog(pv1, pv2, &catalog)
}

pub fn max_over_catalog(
    pv1: &ProbabilityVector,
    pv2: &ProbabilityVector,
    catalog: &UpSetCatalog,
) -> Result<ExtremalReport> {
    let n = catalog.n();
    if pv1.n() != n || pv2.n() != n {
        return Err(Error::DimensionMismatch { left: pv1.n(), right: n });
    }
    let (t1, t2) = (MeasureTable::new(pv1), MeasureTable::new(pv2));
    let m1: Vec<BigRational> = catalog.families().map(|f| t1.measure(&f).expect("same n")).collect();
    let m2: Vec<BigRational> = catalog.families().map(|f| t2.measure(&f).expect("same n")).collect();
    let mut order: Vec<usize> = (0..catalog.len()).collect();
    order.sort_by(|&a, &b| m2[b].cmp(&m2[a]));
    let blockers: Vec<u64> = catalog
        .families()
        .map(|f| f.blocker().as_word().expect("n ≤ 6"))
        .collect();
    let words = catalog.words();

    // For each U1 the best compatible U2 is the first in measure order; keep ties.
    let per_u1: Vec<(BigRational, Vec<(usize, usize)>)> = (0..catalog.len())
        .into_par_iter()
        .map(|i| {
            let first = order.iter().position(|&j| words[j] & blockers[i] == 0);
            let Some(k) = first else {
                return (BigRational::zero(), Vec::new());
            };
            let top = &m2[order[k]];
            let ties = order[k..]
                .iter()
                .take_while(|&&j| &m2[j] == top)
                .filter(|&&j| words[j] & blockers[i] == 0)
                .map(|&j| (i, j))
                .collect();
            (&m1[i] * top, ties)
        })
        .collect();

    let max = per_u1.iter().map(|(v, _)| v).max().cloned().unwrap_or_else(BigRational::zero);
    let mut pairs: Vec<FamilyPair> = per_u1
        .into_iter()
        .filter(|(v, _)| v == &max)
        .flat_map(|(_, ps)| ps)
        .map(|(i, j)| FamilyPair { u1: catalog.get(i), u2: catalog.get(j) })
        .collect();
    pairs.sort();

    let p1p2 = pv1.first() * pv2.first();
    let w_strong = WitnessSet::new(pv1, pv2, WitnessForm::Strong)?;
    let w_weak = WitnessSet::new(pv1, pv2, WitnessForm::Weak)?;
    let found: BTreeSet<FamilyPair> = pairs.iter().cloned().collect();
    let half = crate::rational::half();
    Ok(ExtremalReport {
        n,
        pv1: pv1.clone(),
        pv2: pv2.clone(),
        catalog_size: catalog.len(),
        max_equals_p1p2: max == p1p2,
        max,
        p1p2,
        hypotheses: Hypotheses {
            main: main_hypotheses_hold(pv1, pv2),
            weak: weak_hypothesis_holds(pv1, pv2),
            exceptional: pv1.first() == &half && pv2.first() == &half && w_strong.len() >= 3,
        },
        stars_strong: found == star_pairs(n, &w_strong),
        stars_weak: found == star_pairs(n, &w_weak),
        w_strong,
        w_weak,
        pairs,
    })
}

/// Maximum over all (not only monotone) cross-intersecting pairs; `n ≤ 3`.
pub fn max_all_families(pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> Result<BigRational> {
    let n = pv1.n();
    if n > 3 {
        return Err(Error::SizeCap { n, cap: 3 });
    }
    if pv2.n() != n {
        return Err(Error::DimensionMismatch { left: n, right: pv2.n() });
    }
    let count = 1u64 << (1u32 << n);
    let (t1, t2) = (MeasureTable::new(pv1), MeasureTable::new(pv2));
    let m2: Vec<BigRational> = (0..count).map(|w| t2.measure(&SubsetFamily::from_word(n, w)).unwrap()).collect();
    let best = (0..count)
        .into_par_iter()
        .map(|a| {
            let f = SubsetFamily::from_word(n, a);
            let block = f.blocker().as_word().unwrap();
            let m1 = t1.measure(&f).unwrap();
            (0..count)
                .filter(|b| b & block == 0)
                .map(|b| &m1 * &m2[b as usize])
                .max()
                .unwrap_or_else(BigRational::zero)
        })
        .max()
        .unwrap_or_else(BigRational::zero);
    Ok(best)
}

/// Random cross-intersecting pairs of arbitrary families never beat `max`, and
/// closing them upward never lowers the product. Returns the number of samples
/// that broke either rule.
pub fn spot_check_all_families(
    pv1: &ProbabilityVector,
    pv2: &ProbabilityVector,
    max: &BigRational,
    samples: usize,
    seed: u64,
) -> Result<usize> {
    let n = pv1.n();
    GroundSet::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..samples {
        let u1 = SubsetFamily::from_predicate(n, |_| rng.gen_bool(0.3));
        // Largest partner of u1, then thin it randomly.
        let partner = u1.blocker().complement_family();
        let u2 = SubsetFamily::from_masks(n, partner.members().filter(|_| rng.gen_bool(0.7)).collect::<Vec<_>>())?;
        debug_assert!(is_cross_intersecting(&u1, &u2)?);
        let prod = product_measure(pv1, &u1)? * product_measure(pv2, &u2)?;
        let closed = product_measure(pv1, &u1.up_closure())? * product_measure(pv2, &u2.up_closure())?;
        if &prod > max || closed < prod || !is_cross_intersecting(&u1.up_closure(), &u2.up_closure())? {
            bad += 1;
        }
    }
    Ok(bad)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleCheck {
    pub name: String,
    pub n: usize,
    pub cross_intersecting: bool,
    #[serde(with = "crate::rational::serde_rational")]
    pub product_at_half: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub product_at_third: BigRational,
    pub u1_intersecting: bool,
    pub u2_intersecting: bool,
    pub in_oracle_list: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExamplesReport {
    pub examples: Vec<ExampleCheck>,
    pub pass: bool,
}

/// Check both exceptional pairs at `p = 1/2`: cross-intersecting, product `1/4`,
/// listed by the oracle; the `n = 4` pair is non-intersecting on both sides.
pub fn verify_example_pairs() -> Result<ExamplesReport> {
    let half = crate::rational::half();
    let third = crate::rational::rat(1, 3);
    let mut examples = Vec::new();
    for (name, n) in [("ex-n3", 3usize), ("ex-n4", 4)] {
        let fx = testkit::example_families(n)?;
        let (u1, u2) = if n == 3 {
            (fx["ex-n3"].clone(), fx["ex-n3"].clone())
        } else {
            (fx["ex-n4-C1"].clone(), fx["ex-n4-C2"].clone())
        };
        let ph = ProbabilityVector::uniform(n, half.clone())?;
        let pt = ProbabilityVector::uniform(n, third.clone())?;
        let cross = is_cross_intersecting(&u1, &u2)?;
        let at_half = product_measure(&ph, &u1)? * product_measure(&ph, &u2)?;
        let at_third = product_measure(&pt, &u1)? * product_measure(&pt, &u2)?;
        let oracle = max_cross_product(&ph, &ph)?;
        let in_list = oracle.contains_pair(&u1, &u2);
        let (i1, i2) = (u1.is_intersecting(), u2.is_intersecting());
        let mut pass = cross && at_half == crate::rational::rat(1, 4) && in_list && at_third < &third * &third;
        if n == 4 {
            pass &= !i1 && !i2;
        }
        examples.push(ExampleCheck {
            name: name.into(),
            n,
            cross_intersecting: cross,
            product_at_half: at_half,
            product_at_third: at_third,
            u1_intersecting: i1,
            u2_intersecting: i2,
            in_oracle_list: in_list,
            pass,
        });
    }
    let pass = examples.iter().all(|e| e.pass);
    Ok(ExamplesReport { examples, pass })
}
