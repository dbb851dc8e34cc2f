use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::certificate::{verify_dual_feasibility, EpsilonChoice};
use crate::error::{Error, Result};
use crate::measure::{disjoint_pair, product_measure, ProbabilityVector, SubsetFamily};
use crate::rational::{half, rat};

use super::{main_hypotheses_hold, monotone_scale, WitnessForm, WitnessSet};

/// Vectors with coordinate 1 lowered to `p̃_i = max_{l≥2} p_i^(l)`.
#[derive(Debug, Clone, Serialize)]
pub struct ReducedVectors {
    pub pv1_tilde: ProbabilityVector,
    pub pv2_tilde: ProbabilityVector,
    pub w_tilde: WitnessSet,
}

pub fn reduce_large_p(pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> Result<ReducedVectors> {
    if pv1.n() != pv2.n() {
        return Err(Error::DimensionMismatch { left: pv1.n(), right: pv2.n() });
    }
    if pv1.n() < 2 {
        return Err(Error::Precondition("need n ≥ 2 to lower coordinate 1".into()));
    }
    if !main_hypotheses_hold(pv1, pv2) {
        return Err(Error::Precondition(
            "need p_i = max_l p_i^(l) and p_i^(l) ≤ 1/2 for l ≥ 2".into(),
        ));
    }
    if pv1.first() <= &half() && pv2.first() <= &half() {
        return Err(Error::Precondition("no side has p > 1/2".into()));
    }
    let lower = |pv: &ProbabilityVector| {
        let t = pv.entries()[1..].iter().max().expect("n ≥ 2").clone();
        pv.with_entry(1, t)
    };
    let pv1_tilde = lower(pv1)?;
    let pv2_tilde = lower(pv2)?;
    let w_tilde = WitnessSet::new(&pv1_tilde, &pv2_tilde, WitnessForm::Strong)?;
    Ok(ReducedVectors { pv1_tilde, pv2_tilde, w_tilde })
}

/// One inequality `lhs ≤ rhs` in the chain.
#[derive(Debug, Clone, Serialize)]
pub struct ChainLink {
    pub name: String,
    #[serde(with = "crate::rational::serde_rational")]
    pub lhs: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub rhs: BigRational,
    pub holds: bool,
    pub tight: bool,
    pub via: String,
}

impl ChainLink {
    fn new(name: &str, lhs: BigRational, rhs: BigRational, via: &str) -> Self {
        Self { name: name.into(), holds: lhs <= rhs, tight: lhs == rhs, lhs, rhs, via: via.into() }
    }
}

/// Bound `(p/2)(1 - |E|²/2^(2n-2))` for `p1 = (p, 1/2, …)`, `p2 = (1/2, …)` and `U1 ⊆ Star(1)`.
#[derive(Debug, Clone, Serialize)]
pub struct ClaimCheck {
    pub e_size: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub bound: BigRational,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub reduced: ReducedVectors,
    pub closed_up: [bool; 2],
    pub links: Vec<ChainLink>,
    #[serde(with = "crate::rational::serde_rational")]
    pub product: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub bound: BigRational,
    pub equality: bool,
    /// On equality: `U_i ⊆ Star(1)` for each side with `p_i > p̃_i`.
    pub pivot_containment: Vec<bool>,
    pub claim: Option<ClaimCheck>,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.links.iter().all(|l| l.holds)
            && self.pivot_containment.iter().all(|&b| b)
            && self.claim.as_ref().is_none_or(|c| c.holds)
    }

    pub fn all_tight(&self) -> bool {
        self.links.iter().all(|l| l.tight)
    }
}

pub fn verify_reduction_chain(
    pv1: &ProbabilityVector,
    pv2: &ProbabilityVector,
    u1: &SubsetFamily,
    u2: &SubsetFamily,
) -> Result<ChainReport> {
    let reduced = reduce_large_p(pv1, pv2)?;
    if let Some((x, y)) = disjoint_pair(u1, u2)? {
        return Err(Error::Precondition(format!("families share a disjoint pair ({x:#b}, {y:#b})")));
    }
    let v1 = u1.up_closure();
    let v2 = u2.up_closure();
    let closed_up = [&v1 != u1, &v2 != u2];
    let (pt1, pt2) = (&reduced.pv1_tilde, &reduced.pv2_tilde);

    let m1 = product_measure(pv1, &v1)?;
    let m2 = product_measure(pv2, &v2)?;
    let mt1 = product_measure(pt1, &v1)?;
    let mt2 = product_measure(pt2, &v2)?;
    let (tp1, tp2) = (pt1.first().clone(), pt2.first().clone());

    let mut links = Vec::new();
    let cert = verify_dual_feasibility(pt1, pt2, EpsilonChoice::Zero)?;
    let via = if cert.feasible { "certificate" } else { "uncertified" };
    links.push(ChainLink::new("reduced", &mt1 * &mt2, &tp1 * &tp2, via));

    for (i, (pv, pt, v, m, mt)) in [(pv1, pt1, &v1, &m1, &mt1), (pv2, pt2, &v2, &m2, &mt2)].into_iter().enumerate() {
        let name = format!("monotone[{}]", i + 1);
        if pv.first() == pt.first() {
            links.push(ChainLink::new(&name, m.clone(), mt.clone(), "identity"));
        } else {
            let r = monotone_scale(pv, pt, v)?;
            let mut link = ChainLink::new(&name, r.lhs.clone(), r.rhs.clone(), "monotone");
            link.holds &= r.holds();
            links.push(link);
        }
    }

    let product = &m1 * &m2;
    let bound = pv1.first() * pv2.first();
    let scale = &bound / (&tp1 * &tp2);
    let middle = &scale * &mt1 * &mt2;
    links.push(ChainLink::new("scaled[left]", product.clone(), middle.clone(), "monotone"));
    links.push(ChainLink::new("scaled[right]", middle, bound.clone(), "reduced"));

    let equality = product == bound;
    let mut pivot_containment = Vec::new();
    if equality {
        for (pv, pt, v) in [(pv1, pt1, &v1), (pv2, pt2, &v2)] {
            if pv.first() > pt.first() {
                pivot_containment.push(v.members().all(|x| x & 1 != 0));
            }
        }
    }

    let claim = claim_check(pv1, pv2, &v1, &v2, &product)?;
    Ok(ChainReport { reduced, closed_up, links, product, bound, equality, pivot_containment, claim })
}

fn claim_check(
    pv1: &ProbabilityVector,
    pv2: &ProbabilityVector,
    u1: &SubsetFamily,
    u2: &SubsetFamily,
    product: &BigRational,
) -> Result<Option<ClaimCheck>> {
    let n = pv1.n();
    let halves = |pv: &ProbabilityVector, from: usize| pv.entries()[from..].iter().all(|p| p == &half());
    if !(pv1.first() > &half() && halves(pv1, 1) && halves(pv2, 0)) || !u1.members().all(|x| x & 1 != 0) {
        return Ok(None);
    }
    let star = SubsetFamily::star(n, 1)?;
    let e_size = u2.difference(&star)?.len();
    let t = rat(e_size as i64, 1 << (n - 1));
    let bound = pv1.first() / rat(2, 1) * (BigRational::one() - &t * &t);
    Ok(Some(ClaimCheck { e_size, holds: product <= &bound, bound }))
}
