use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{product_measure, ProbabilityVector, SubsetFamily};

/// Both sides of `μ_p(U) ≤ (p^(1)/p̃^(1)) μ_p̃(U)` plus the decomposition
/// `U = U' ⊔ U'' ⊔ U'''` by whether members contain 1 and pair up.
#[derive(Debug, Clone, Serialize)]
pub struct MonotoneReport {
    #[serde(with = "crate::rational::serde_rational")]
    pub lhs: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub rhs: BigRational,
    pub equality: bool,
    pub pivot_contained: bool,
    pub sizes: [usize; 3],
    /// `μ_p(U' ⊔ U'') = μ_p̃(U' ⊔ U'')`.
    pub pairing_invariant: bool,
}

impl MonotoneReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs && (!self.equality || self.pivot_contained) && self.pairing_invariant
    }
}

pub fn monotone_scale(
    pv: &ProbabilityVector,
    pv_tilde: &ProbabilityVector,
    u: &SubsetFamily,
) -> Result<MonotoneReport> {
    if pv.n() != pv_tilde.n() || pv.n() != u.n() {
        return Err(Error::DimensionMismatch { left: pv.n(), right: pv_tilde.n().max(u.n()) });
    }
    if !u.is_co_complex() {
        return Err(Error::Precondition("family is not a co-complex".into()));
    }
    if pv.entries()[1..] != pv_tilde.entries()[1..] {
        return Err(Error::Precondition("vectors differ outside coordinate 1".into()));
    }
    if pv.first() <= pv_tilde.first() {
        return Err(Error::Precondition(format!(
            "p(1) = {} must exceed p~(1) = {}",
            pv.first(),
            pv_tilde.first()
        )));
    }
    let lhs = product_measure(pv, u)?;
    let rhs = pv.first() / pv_tilde.first() * product_measure(pv_tilde, u)?;

    let without = u.members().filter(|x| x & 1 == 0).collect::<Vec<_>>();
    let lifted = without.iter().map(|x| x | 1).collect::<Vec<_>>();
    let rest = u.len() - without.len() - lifted.len();
    let paired = SubsetFamily::from_masks(u.n(), without.iter().chain(&lifted).copied())?;
    let pairing_invariant = product_measure(pv, &paired)? == product_measure(pv_tilde, &paired)?;

    Ok(MonotoneReport {
        equality: lhs == rhs,
        lhs,
        rhs,
        pivot_contained: without.is_empty(),
        sizes: [without.len(), lifted.len(), rest],
        pairing_invariant,
    })
}
