//! Kernel extraction, eigenbasis coefficients, co-complex scaling and
//! the large-`p` reduction chain.

mod chain;
mod eigen;
mod kernel;
mod monotone;

use num_rational::BigRational;
use serde::Serialize;

pub use chain::{reduce_large_p, verify_reduction_chain, ChainLink, ChainReport, ClaimCheck, ReducedVectors};
pub use eigen::{eigen_coefficients, junta_coefficients_exact, EigenCoefficients};
pub use kernel::{kernel_extract, KernelReport};
pub use monotone::{monotone_scale, MonotoneReport};

use crate::error::{Error, Result};
use crate::measure::{mask_elements, Mask, ProbabilityVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessForm {
    /// Coordinates where `(p1^(l), p2^(l)) = (p1, p2)`.
    Strong,
    /// Coordinates where `p1^(l) p2^(l) = p1 p2`.
    Weak,
}

/// The coordinate set `w`, with `p_i` read from coordinate 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessSet {
    #[serde(skip)]
    n: usize,
    #[serde(skip)]
    mask: Mask,
    elements: Vec<usize>,
    form: WitnessForm,
}

impl WitnessSet {
    pub fn new(pv1: &ProbabilityVector, pv2: &ProbabilityVector, form: WitnessForm) -> Result<Self> {
        if pv1.n() != pv2.n() {
            return Err(Error::DimensionMismatch { left: pv1.n(), right: pv2.n() });
        }
        let (p1, p2) = (pv1.first(), pv2.first());
        let prod = p1 * p2;
        let mut mask = 0;
        for l in 1..=pv1.n() {
            let hit = match form {
                WitnessForm::Strong => pv1.p(l) == p1 && pv2.p(l) == p2,
                WitnessForm::Weak => pv1.p(l) * pv2.p(l) == prod,
            };
            if hit {
                mask |= 1 << (l - 1);
            }
        }
        Ok(Self { n: pv1.n(), mask, elements: mask_elements(mask), form })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> Mask {
        self.mask
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, l: usize) -> bool {
        l >= 1 && l <= self.n && self.mask & (1 << (l - 1)) != 0
    }

    pub fn form(&self) -> WitnessForm {
        self.form
    }
}

pub fn witness_set(pv1: &ProbabilityVector, pv2: &ProbabilityVector, form: WitnessForm) -> Result<WitnessSet> {
    WitnessSet::new(pv1, pv2, form)
}

/// `p_i = max_l p_i^(l)` for both sides and `p_i^(l) ≤ 1/2` for `l ≥ 2`.
pub fn main_hypotheses_hold(pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> bool {
    let half = crate::rational::half();
    [pv1, pv2].iter().all(|pv| pv.first() == pv.max() && pv.entries()[1..].iter().all(|p| p <= &half))
}

/// `p1 p2 = max_l p1^(l) p2^(l)`.
pub fn weak_hypothesis_holds(pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> bool {
    let prod: BigRational = pv1.first() * pv2.first();
    (1..=pv1.n()).all(|l| pv1.p(l) * pv2.p(l) <= prod)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(text: &str) -> ProbabilityVector {
        ProbabilityVector::parse(text).unwrap()
    }

    #[test]
    fn witness_examples() {
        let a = pv("1/2,1/3,1/2");
        assert_eq!(witness_set(&a, &a, WitnessForm::Strong).unwrap().elements(), &[1, 3]);
        let (b, c) = (pv("1/2,1/3"), pv("1/3,1/2"));
        assert_eq!(witness_set(&b, &c, WitnessForm::Weak).unwrap().elements(), &[1, 2]);
        assert_eq!(witness_set(&b, &c, WitnessForm::Strong).unwrap().elements(), &[1]);
    }

    #[test]
    fn hypotheses() {
        assert!(main_hypotheses_hold(&pv("3/5,1/3,1/2"), &pv("1/2,1/4,1/2")));
        assert!(!main_hypotheses_hold(&pv("1/3,1/2"), &pv("1/2,1/4")));
        assert!(!main_hypotheses_hold(&pv("3/5,3/5"), &pv("3/5,1/4")));
        assert!(weak_hypothesis_holds(&pv("1/2,1/3"), &pv("1/3,1/2")));
        assert!(!weak_hypothesis_holds(&pv("1/3,1/2"), &pv("1/3,1/2")));
    }
}
