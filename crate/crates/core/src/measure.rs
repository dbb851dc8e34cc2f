//! Subsets of `[n]`, families of subsets, and product measures.
//!
//! A subset of `[n]` is an `n`-bit mask with element `l` stored in bit `l - 1`.
//! A family is a bitset over all `2^n` masks: bit `x` is set iff `x` is a member.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, is_unit_open};

/// Largest ground set a [`SubsetFamily`] can be built over.
pub const MAX_FAMILY_N: usize = 24;

pub type Mask = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGroundSet);
        }
        if n > MAX_FAMILY_N {
            return Err(Error::SizeCap { n, cap: MAX_FAMILY_N });
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full_mask(&self) -> Mask {
        full_mask(self.n)
    }

    /// All subsets in increasing mask order.
    pub fn subsets(&self) -> impl Iterator<Item = Mask> {
        0..(1 as Mask) << self.n
    }
}

pub fn full_mask(n: usize) -> Mask {
    if n == 0 {
        0
    } else {
        Mask::MAX >> (Mask::BITS as usize - n)
    }
}

/// 1-based elements of a mask, ascending.
pub fn mask_elements(x: Mask) -> Vec<usize> {
    (0..Mask::BITS as usize)
        .filter(|b| x >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

pub fn mask_from_elements(n: usize, elements: &[usize]) -> Result<Mask> {
    let mut x = 0;
    for &e in elements {
        if e == 0 || e > n {
            return Err(Error::ElementOutOfRange { element: e, n });
        }
        x |= 1 << (e - 1);
    }
    Ok(x)
}

/// Pack the bits of `x` selected by `z` into the low `|z|` bits.
pub fn compress(x: Mask, z: Mask) -> Mask {
    let mut out = 0;
    let mut k = 0;
    let mut rest = z;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        out |= ((x >> bit) & 1) << k;
        k += 1;
        rest &= rest - 1;
    }
    out
}

/// Inverse of [`compress`]: spread the low `|w|` bits of `k` onto the positions of `w`.
pub fn expand(k: Mask, w: Mask) -> Mask {
    let mut out = 0;
    let mut j = 0;
    let mut rest = w;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        out |= ((k >> j) & 1) << bit;
        j += 1;
        rest &= rest - 1;
    }
    out
}

/// Per-coordinate probabilities, each strictly between 0 and 1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ProbabilityVector {
    entries: Vec<BigRational>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<BigRational>) -> Result<Self> {
        GroundSet::new(entries.len())?;
        for (i, p) in entries.iter().enumerate() {
            if !is_unit_open(p) {
                return Err(Error::InvalidProbability { coordinate: i + 1, value: p.to_string() });
            }
        }
        Ok(Self { entries })
    }

    /// Parse a comma separated list of `num/den` strings.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(rational::parse_rational_list(text)?)
    }

    pub fn uniform(n: usize, p: BigRational) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    /// `p^(l)` for 1-based `l`.
    pub fn p(&self, l: usize) -> &BigRational {
        &self.entries[l - 1]
    }

    /// `q^(l) = 1 - p^(l)`.
    pub fn q(&self, l: usize) -> BigRational {
        BigRational::one() - self.p(l)
    }

    /// The distinguished first coordinate.
    pub fn first(&self) -> &BigRational {
        &self.entries[0]
    }

    pub fn max(&self) -> &BigRational {
        self.entries.iter().max().expect("non-empty")
    }

    /// Replace coordinate `l` (1-based).
    pub fn with_entry(&self, l: usize, value: BigRational) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries[l - 1] = value;
        Self::new(entries)
    }

    /// Keep only the coordinates in `z`, re-indexed in increasing order.
    pub fn restrict(&self, z: Mask) -> Result<Self> {
        Self::new(
            mask_elements(z)
                .into_iter()
                .filter(|&l| l <= self.n())
                .map(|l| self.p(l).clone())
                .collect(),
        )
    }

    /// Measure of the single atom `x`.
    pub fn atom(&self, x: Mask) -> BigRational {
        let mut w = BigRational::one();
        for (i, p) in self.entries.iter().enumerate() {
            if x >> i & 1 == 1 {
                w *= p;
            } else {
                w *= BigRational::one() - p;
            }
        }
        w
    }

    /// All `2^n` atom weights indexed by mask.
    pub fn atoms(&self) -> Vec<BigRational> {
        let mut table = vec![BigRational::one()];
        for p in &self.entries {
            let q = BigRational::one() - p;
            let mut next = Vec::with_capacity(table.len() * 2);
            next.extend(table.iter().map(|w| w * &q));
            next.extend(table.iter().map(|w| w * p));
            table = next;
        }
        table
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.entries.iter().map(rational::format_rational).collect()
    }
}

impl fmt::Debug for ProbabilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl fmt::Display for ProbabilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_strings().join(","))
    }
}

impl TryFrom<Vec<String>> for ProbabilityVector {
    type Error = Error;
    fn try_from(texts: Vec<String>) -> Result<Self> {
        Self::new(
            texts
                .iter()
                .map(|t| rational::parse_rational(t))
                .collect::<Result<_>>()?,
        )
    }
}

impl From<ProbabilityVector> for Vec<String> {
    fn from(pv: ProbabilityVector) -> Self {
        pv.to_strings()
    }
}

/// A family `U ⊂ 2^[n]` stored as a bitset over masks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetFamily {
    n: usize,
    words: Vec<u64>,
}

// Masks for the bits of a word whose index lacks bit `s`, for strides s = 1, 2, ..., 32.
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

impl SubsetFamily {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_FAMILY_N, "ground set too large for a bitset family");
        let bits = 1usize << n;
        Self { n, words: vec![0; bits.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut f = Self::empty(n);
        for w in &mut f.words {
            *w = u64::MAX;
        }
        f.trim();
        f
    }

    pub fn from_masks<I: IntoIterator<Item = Mask>>(n: usize, masks: I) -> Result<Self> {
        let mut f = Self::empty(n);
        let full = full_mask(n);
        for x in masks {
            if x & !full != 0 {
                return Err(Error::ElementOutOfRange {
                    element: (Mask::BITS - x.leading_zeros()) as usize,
                    n,
                });
            }
            f.insert(x);
        }
        Ok(f)
    }

    /// Build from 1-based element lists.
    pub fn from_sets<S: AsRef<[usize]>>(n: usize, sets: &[S]) -> Result<Self> {
        let masks = sets
            .iter()
            .map(|s| mask_from_elements(n, s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_masks(n, masks)
    }

    /// Build from the raw bitset word of a family with `n <= 6`.
    pub fn from_word(n: usize, word: u64) -> Self {
        assert!(n <= 6);
        let mut f = Self { n, words: vec![word] };
        f.trim();
        f
    }

    /// `{x : pred(x)}`.
    pub fn from_predicate(n: usize, mut pred: impl FnMut(Mask) -> bool) -> Self {
        let mut f = Self::empty(n);
        for x in 0..(1 as Mask) << n {
            if pred(x) {
                f.insert(x);
            }
        }
        f
    }

    /// The star `{x : l ∈ x}`.
    pub fn star(n: usize, l: usize) -> Result<Self> {
        Ok(CanonicalStar::new(n, l)?.to_family())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Single-word view for `n <= 6`.
    pub fn as_word(&self) -> Option<u64> {
        (self.n <= 6).then(|| self.words[0])
    }

    fn trim(&mut self) {
        let bits = 1usize << self.n;
        if bits < 64 {
            self.words[0] &= (1u64 << bits) - 1;
        }
    }

    pub fn contains(&self, x: Mask) -> bool {
        let i = x as usize;
        i < (1usize << self.n) && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, x: Mask) {
        let i = x as usize;
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, x: Mask) {
        let i = x as usize;
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in increasing mask order.
    pub fn members(&self) -> impl Iterator<Item = Mask> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some((i * 64) as Mask + b)
            })
        })
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        Ok(Self {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        })
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        Ok(Self {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        Ok(Self {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        })
    }

    pub fn symmetric_difference(&self, other: &Self) -> Result<Self> {
        self.check_same_n(other)?;
        Ok(Self {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        })
    }

    /// The complement family `2^[n] \ U`.
    pub fn complement_family(&self) -> Self {
        let mut f = Self {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        };
        f.trim();
        f
    }

    /// `{[n] \ x : x ∈ U}`.
    pub fn complements(&self) -> Self {
        let bits = 1usize << self.n;
        if bits < 64 {
            let w = self.words[0].reverse_bits() >> (64 - bits);
            return Self { n: self.n, words: vec![w] };
        }
        Self {
            n: self.n,
            words: self.words.iter().rev().map(|w| w.reverse_bits()).collect(),
        }
    }

    /// Close under adding element `l` (0-based bit) to members.
    fn spread_up(&mut self, bit: usize) {
        let stride = 1usize << bit;
        if stride < 64 {
            let low = LOW_HALF[bit];
            for w in &mut self.words {
                *w |= (*w & low) << stride;
            }
        } else {
            let ws = stride / 64;
            for i in 0..self.words.len() {
                if i & ws == 0 {
                    let v = self.words[i];
                    self.words[i | ws] |= v;
                }
            }
        }
    }

    fn spread_down(&mut self, bit: usize) {
        let stride = 1usize << bit;
        if stride < 64 {
            let low = LOW_HALF[bit];
            for w in &mut self.words {
                *w |= (*w >> stride) & low;
            }
        } else {
            let ws = stride / 64;
            for i in 0..self.words.len() {
                if i & ws == 0 {
                    let v = self.words[i | ws];
                    self.words[i] |= v;
                }
            }
        }
    }

    /// Smallest co-complex (up-set) containing `U`.
    pub fn up_closure(&self) -> Self {
        let mut f = self.clone();
        for bit in 0..self.n {
            f.spread_up(bit);
        }
        f
    }

    /// Smallest down-set containing `U`.
    pub fn down_closure(&self) -> Self {
        let mut f = self.clone();
        for bit in 0..self.n {
            f.spread_down(bit);
        }
        f
    }

    /// `{y : x ∩ y = ∅ for some x ∈ U}`. A family is cross-intersecting with `U`
    /// exactly when it misses this set.
    pub fn blocker(&self) -> Self {
        self.complements().down_closure()
    }

    pub fn is_co_complex(&self) -> bool {
        self.up_closure() == *self
    }

    pub fn is_intersecting(&self) -> bool {
        is_cross_intersecting(self, self).expect("same ground set")
    }

    /// `{x ∩ z : x ∈ U}` re-indexed over the ground set `z`.
    pub fn restrict(&self, z: Mask) -> Self {
        let z = z & full_mask(self.n);
        let mut out = Self::empty(z.count_ones() as usize);
        for x in self.members() {
            out.insert(compress(x, z));
        }
        out
    }

    /// Family literal: sorted list of 1-based element lists, members in mask order.
    pub fn to_literal(&self) -> Vec<Vec<usize>> {
        self.members().map(mask_elements).collect()
    }

    pub fn from_literal(n: usize, literal: &[Vec<usize>]) -> Result<Self> {
        Self::from_sets(n, literal)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_literal()).expect("plain data")
    }

    pub fn from_json(n: usize, text: &str) -> Result<Self> {
        let literal: Vec<Vec<usize>> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_literal(n, &literal)
    }
}

impl fmt::Debug for SubsetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} {}", self.n, self.to_json())
    }
}

impl Serialize for SubsetFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_literal().serialize(s)
    }
}

/// `{x ∈ 2^[n] : pivot ∈ x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CanonicalStar {
    n: usize,
    pivot: usize,
}

impl CanonicalStar {
    pub fn new(n: usize, pivot: usize) -> Result<Self> {
        GroundSet::new(n)?;
        if pivot == 0 || pivot > n {
            return Err(Error::ElementOutOfRange { element: pivot, n });
        }
        Ok(Self { n, pivot })
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn to_family(&self) -> SubsetFamily {
        let bit = 1 << (self.pivot - 1);
        SubsetFamily::from_predicate(self.n, |x| x & bit != 0)
    }
}

fn check_dims(pv: &ProbabilityVector, u: &SubsetFamily) -> Result<()> {
    if pv.n() != u.n() {
        return Err(Error::DimensionMismatch { left: pv.n(), right: u.n() });
    }
    Ok(())
}

/// `μ_p(U) = Σ_{x∈U} Π_{l∈x} p^(l) Π_{k∉x} (1 - p^(k))`, exactly.
pub fn product_measure(pv: &ProbabilityVector, u: &SubsetFamily) -> Result<BigRational> {
    check_dims(pv, u)?;
    Ok(u.members().map(|x| pv.atom(x)).fold(BigRational::zero(), |acc, w| acc + w))
}

/// Atom weights precomputed once for repeated measure evaluations.
#[derive(Debug, Clone)]
pub struct MeasureTable {
    n: usize,
    atoms: Vec<BigRational>,
}

impl MeasureTable {
    pub fn new(pv: &ProbabilityVector) -> Self {
        Self { n: pv.n(), atoms: pv.atoms() }
    }

    pub fn measure(&self, u: &SubsetFamily) -> Result<BigRational> {
        if u.n() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: u.n() });
        }
        Ok(u.members().fold(BigRational::zero(), |acc, x| acc + &self.atoms[x as usize]))
    }

    pub fn atom(&self, x: Mask) -> &BigRational {
        &self.atoms[x as usize]
    }
}

/// True iff `x ∩ y ≠ ∅` for all `x ∈ U1`, `y ∈ U2`.
pub fn is_cross_intersecting(u1: &SubsetFamily, u2: &SubsetFamily) -> Result<bool> {
    u1.check_same_n(u2)?;
    let blocked = u1.blocker();
    Ok(blocked.words.iter().zip(&u2.words).all(|(a, b)| a & b == 0))
}

/// A disjoint pair `(x, y)` with `x ∈ U1`, `y ∈ U2`, if one exists.
pub fn disjoint_pair(u1: &SubsetFamily, u2: &SubsetFamily) -> Result<Option<(Mask, Mask)>> {
    u1.check_same_n(u2)?;
    let hits = u1.blocker().intersection(u2)?;
    let first = hits.members().next();
    Ok(first.map(|y| {
        let x = u1.members().find(|x| x & y == 0).expect("blocker member has a witness");
        (x, y)
    }))
}

pub fn is_intersecting(u: &SubsetFamily) -> bool {
    u.is_intersecting()
}

pub fn is_co_complex(u: &SubsetFamily) -> bool {
    u.is_co_complex()
}

pub fn up_closure(u: &SubsetFamily) -> SubsetFamily {
    u.up_closure()
}

pub fn restrict(u: &SubsetFamily, z: Mask) -> SubsetFamily {
    u.restrict(z)
}

/// `{x ⊔ y : x ∈ K, y ⊂ [n] \ w}` where `K` lives over the ground set `w`.
pub fn box_product(kernel: &SubsetFamily, w: Mask, n: usize) -> Result<SubsetFamily> {
    GroundSet::new(n)?;
    if w & !full_mask(n) != 0 {
        return Err(Error::ElementOutOfRange {
            element: (Mask::BITS - w.leading_zeros()) as usize,
            n,
        });
    }
    if kernel.n() != w.count_ones() as usize {
        return Err(Error::DimensionMismatch { left: kernel.n(), right: w.count_ones() as usize });
    }
    let outside = full_mask(n) & !w;
    let mut out = SubsetFamily::empty(n);
    for k in kernel.members() {
        let base = expand(k, w);
        // Enumerate all subsets of `outside`.
        let mut y = outside;
        loop {
            out.insert(base | y);
            if y == 0 {
                break;
            }
            y = (y - 1) & outside;
        }
    }
    Ok(out)
}
