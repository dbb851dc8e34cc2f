//! Fixtures and generators shared by tests, the acceptance suite and the CLI.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{full_mask, is_cross_intersecting, mask_from_elements, Mask, ProbabilityVector, SubsetFamily};
use crate::rational::{half, rat};
use crate::reductions::{main_hypotheses_hold, weak_hypothesis_holds, WitnessForm, WitnessSet};

const C1: [&[usize]; 8] = [&[1, 2], &[3, 4], &[1, 3], &[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4], &[1, 2, 3, 4]];
const C2: [&[usize]; 8] = [&[1, 4], &[2, 3], &[1, 3], &[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4], &[1, 2, 3, 4]];

/// Named families over `[n]`: `ex-n3` (`|x ∩ [3]| ≥ 2`, also exposed as
/// `single-counter`) for `n ≥ 3`, `ex-n4-C1`/`ex-n4-C2` for `n ≥ 4`, and `star-l`.
pub fn example_families(n: usize) -> Result<BTreeMap<String, SubsetFamily>> {
    let mut out = BTreeMap::new();
    for l in 1..=n {
        out.insert(format!("star-{l}"), SubsetFamily::star(n, l)?);
    }
    if n >= 3 {
        let maj = SubsetFamily::from_predicate(n, |x| (x & 0b111).count_ones() >= 2);
        out.insert("ex-n3".into(), maj.clone());
        out.insert("single-counter".into(), maj);
    }
    if n >= 4 {
        for (name, list) in [("ex-n4-C1", &C1), ("ex-n4-C2", &C2)] {
            let kernel: Vec<Mask> = list.iter().map(|s| mask_from_elements(4, s)).collect::<Result<_>>()?;
            out.insert(name.into(), SubsetFamily::from_predicate(n, |x| kernel.contains(&(x & 0b1111))));
        }
    }
    Ok(out)
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Read a family literal from `fixtures/<name>.json`.
pub fn load_fixture(name: &str, n: usize) -> Result<SubsetFamily> {
    let path = fixture_dir().join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    SubsetFamily::from_json(n, &text)
}

/// A cross-intersecting pair of up-sets, deterministic per seed. Members are
/// drawn with element density 0.6 and closed upward; pairs that fail to
/// cross-intersect are rejected.
pub fn random_cross_pair(n: usize, seed: u64) -> Result<(SubsetFamily, SubsetFamily)> {
    if n == 0 || n > 8 {
        return Err(Error::SizeCap { n, cap: 8 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let draw = |rng: &mut ChaCha8Rng| {
            let k = rng.gen_range(1..=3);
            let masks: Vec<Mask> = (0..k)
                .map(|_| (0..n).filter(|_| rng.gen_bool(0.6)).fold(0, |m, b| m | (1 << b)))
                .collect();
            SubsetFamily::from_masks(n, masks).expect("masks in range").up_closure()
        };
        let u1 = draw(&mut rng);
        let u2 = draw(&mut rng);
        if is_cross_intersecting(&u1, &u2)? {
            return Ok((u1, u2));
        }
    }
}

/// A random up-set: the up-closure of a handful of random sets.
pub fn random_co_complex(n: usize, rng: &mut impl Rng) -> SubsetFamily {
    let k = rng.gen_range(0..=4);
    let full = full_mask(n);
    let masks: Vec<Mask> = (0..k).map(|_| rng.gen_range(0..=full)).collect();
    SubsetFamily::from_masks(n, masks).expect("masks in range").up_closure()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Main hypotheses with both first coordinates at most 1/2 (not exceptional).
    MainSmall,
    /// Main hypotheses with some first coordinate above 1/2.
    MainLarge,
    /// Weak hypothesis with every entry at most 1/3.
    Third,
    /// Weak hypothesis while the main one fails.
    WeakOnly,
    /// `p1 = p2 = 1/2` and `|w| ≥ 3`.
    Exceptional,
}

impl Regime {
    pub fn holds(self, pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> bool {
        let h = half();
        let main = main_hypotheses_hold(pv1, pv2);
        let exceptional = main
            && pv1.first() == &h
            && pv2.first() == &h
            && WitnessSet::new(pv1, pv2, WitnessForm::Strong).map(|w| w.len() >= 3).unwrap_or(false);
        match self {
            Regime::MainSmall => main && pv1.first() <= &h && pv2.first() <= &h && !exceptional,
            Regime::MainLarge => main && (pv1.first() > &h || pv2.first() > &h),
            Regime::Third => {
                let third = rat(1, 3);
                weak_hypothesis_holds(pv1, pv2) && pv1.max() <= &third && pv2.max() <= &third
            }
            Regime::WeakOnly => weak_hypothesis_holds(pv1, pv2) && !main,
            Regime::Exceptional => exceptional,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridEntry {
    pub regime: Regime,
    pub pv1: ProbabilityVector,
    pub pv2: ProbabilityVector,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParameterGrid {
    entries: Vec<GridEntry>,
}

/// Fractions `a/b` with `b ≤ max_den` in `(lo, hi]`, ascending.
pub fn fractions(max_den: i64, lo: &BigRational, hi: &BigRational) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = (1..=max_den)
        .flat_map(|b| (1..b).map(move |a| rat(a, b)))
        .filter(|x| x > lo && x <= hi)
        .collect();
    out.sort();
    out.dedup();
    out
}

impl ParameterGrid {
    /// Validate every entry against its regime.
    pub fn new(entries: Vec<GridEntry>) -> Result<Self> {
        for e in &entries {
            if e.pv1.n() != e.pv2.n() {
                return Err(Error::DimensionMismatch { left: e.pv1.n(), right: e.pv2.n() });
            }
            if !e.regime.holds(&e.pv1, &e.pv2) {
                return Err(Error::Precondition(format!("({}) / ({}) is not {:?}", e.pv1, e.pv2, e.regime)));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[GridEntry] {
        &self.entries
    }

    pub fn regime(&self, regime: Regime) -> impl Iterator<Item = &GridEntry> {
        self.entries.iter().filter(move |e| e.regime == regime)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The standard grid: hand-picked anchors plus `per_n` seeded samples per
    /// regime and size. Denominators stay at most 12.
    pub fn standard(seed: u64, per_n: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entries = Vec::new();
        let mut push = |regime, a: &str, b: &str| -> Result<()> {
            entries.push(GridEntry { regime, pv1: ProbabilityVector::parse(a)?, pv2: ProbabilityVector::parse(b)? });
            Ok(())
        };
        push(Regime::MainSmall, "1/2,1/3,1/4", "1/2,1/3,1/4")?;
        push(Regime::MainSmall, "1/2,1/3", "1/3,1/4")?;
        push(Regime::MainSmall, "1/2,1/2,1/3", "1/2,1/2,1/3")?;
        push(Regime::MainSmall, "1/2,1/3,1/2", "1/3,1/4,1/3")?;
        push(Regime::MainSmall, "1/3,1/3,1/3", "1/4,1/4,1/4")?;
        push(Regime::MainSmall, "1/2,1/2", "1/2,1/2")?;
        push(Regime::MainLarge, "3/5,1/3", "3/5,1/3")?;
        push(Regime::MainLarge, "2/3,1/3", "2/3,1/3")?;
        push(Regime::MainLarge, "3/5,1/3,1/2", "1/2,1/4,1/2")?;
        push(Regime::MainLarge, "3/4,1/2,1/2", "1/2,1/2,1/2")?;
        push(Regime::Third, "1/3,1/3", "1/3,1/3")?;
        push(Regime::Third, "1/3,1/4", "1/3,1/5")?;
        push(Regime::Third, "1/3,1/4,1/3", "1/4,1/3,1/4")?;
        push(Regime::WeakOnly, "1/2,1/3", "1/3,1/2")?;
        push(Regime::WeakOnly, "1/2,2/5", "2/5,1/2")?;
        push(Regime::Exceptional, "1/2,1/2,1/2", "1/2,1/2,1/2")?;
        push(Regime::Exceptional, "1/2,1/2,1/2,1/2", "1/2,1/2,1/2,1/2")?;
        push(Regime::Exceptional, "1/2,1/2,1/2,1/3", "1/2,1/2,1/2,1/4")?;

        for n in 2..=4 {
            for _ in 0..per_n {
                if let Some(e) = sample(&mut rng, Regime::MainSmall, n) {
                    entries.push(e);
                }
                if let Some(e) = sample(&mut rng, Regime::Third, n) {
                    entries.push(e);
                }
                if n <= 3 {
                    if let Some(e) = sample(&mut rng, Regime::MainLarge, n) {
                        entries.push(e);
                    }
                    if let Some(e) = sample(&mut rng, Regime::WeakOnly, n) {
                        entries.push(e);
                    }
                }
            }
        }
        Self::new(entries)
    }
}

/// Draw one pair for `regime`; `None` if rejection sampling gives up.
fn sample(rng: &mut ChaCha8Rng, regime: Regime, n: usize) -> Option<GridEntry> {
    let zero = BigRational::from_integer(0.into());
    let h = half();
    let third = rat(1, 3);
    let small = fractions(12, &zero, &h);
    let large = fractions(12, &h, &BigRational::one());
    let tiny = fractions(12, &zero, &third);
    for _ in 0..200 {
        let (v1, v2) = match regime {
            Regime::MainSmall => {
                let p1 = small.choose(rng)?.clone();
                let p2 = small.choose(rng)?.clone();
                fill_below(rng, &p1, &p2, &small, n)
            }
            Regime::MainLarge => {
                let p1 = large.choose(rng)?.clone();
                let p2 = if rng.gen_bool(0.5) { large.choose(rng)? } else { small.choose(rng)? }.clone();
                fill_below(rng, &p1, &p2, &small, n)
            }
            Regime::Third => {
                let p1 = tiny.choose(rng)?.clone();
                let p2 = tiny.choose(rng)?.clone();
                let mut v1 = vec![p1.clone()];
                let mut v2 = vec![p2.clone()];
                for _ in 1..n {
                    if rng.gen_bool(0.3) {
                        // Same product, sides swapped.
                        v1.push(p2.clone());
                        v2.push(p1.clone());
                    } else {
                        v1.push(tiny.choose(rng)?.clone());
                        v2.push(tiny.choose(rng)?.clone());
                    }
                }
                (v1, v2)
            }
            Regime::WeakOnly => {
                let all = fractions(12, &zero, &h);
                let v1: Vec<_> = (0..n).map(|_| all.choose(rng).cloned()).collect::<Option<_>>()?;
                let v2: Vec<_> = (0..n).map(|_| all.choose(rng).cloned()).collect::<Option<_>>()?;
                (v1, v2)
            }
            Regime::Exceptional => return None,
        };
        let (pv1, pv2) = (ProbabilityVector::new(v1).ok()?, ProbabilityVector::new(v2).ok()?);
        if regime.holds(&pv1, &pv2) {
            return Some(GridEntry { regime, pv1, pv2 });
        }
    }
    None
}

/// Coordinate 1 is `(p1, p2)`; later coordinates either repeat it (growing `w`)
/// or draw from `pool` below the respective first entry.
fn fill_below(
    rng: &mut ChaCha8Rng,
    p1: &BigRational,
    p2: &BigRational,
    pool: &[BigRational],
    n: usize,
) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut v1 = vec![p1.clone()];
    let mut v2 = vec![p2.clone()];
    let below = |p: &BigRational, rng: &mut ChaCha8Rng| {
        let cands: Vec<&BigRational> = pool.iter().filter(|x| *x <= p).collect();
        (*cands.choose(rng).unwrap_or(&&pool[0])).clone()
    };
    for _ in 1..n {
        if p1 <= &half() && p2 <= &half() && rng.gen_bool(0.3) {
            v1.push(p1.clone());
            v2.push(p2.clone());
        } else {
            v1.push(below(p1, rng));
            v2.push(below(p2, rng));
        }
    }
    (v1, v2)
}
