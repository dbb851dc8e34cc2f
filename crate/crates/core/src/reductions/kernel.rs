use serde::Serialize;

use crate::certificate::normalize_sides;
use crate::error::{Error, Result};
use crate::measure::{box_product, is_cross_intersecting, ProbabilityVector, SubsetFamily};
use crate::rational::half;

use super::{WitnessForm, WitnessSet};

/// Kernels `K_i = U_i|w` and any violations of the box-product structure.
#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub w: WitnessSet,
    pub k1: SubsetFamily,
    pub k2: SubsetFamily,
    pub violations: Vec<String>,
}

impl KernelReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check that an optimal pair is `K_i × Ω|[n]∖w` with cross-intersecting kernels.
/// Optimality is the caller's responsibility.
pub fn kernel_extract(
    pv1: &ProbabilityVector,
    pv2: &ProbabilityVector,
    u1: &SubsetFamily,
    u2: &SubsetFamily,
) -> Result<KernelReport> {
    let n = pv1.n();
    for m in [pv2.n(), u1.n(), u2.n()] {
        if m != n {
            return Err(Error::DimensionMismatch { left: n, right: m });
        }
    }
    let (a, b, _) = normalize_sides(pv1, pv2);
    if a.first() > &half() {
        return Err(Error::Precondition(format!("p1 = {} > 1/2", a.first())));
    }
    let w = WitnessSet::new(pv1, pv2, WitnessForm::Strong)?;
    let k1 = u1.restrict(w.mask());
    let k2 = u2.restrict(w.mask());

    let mut violations = Vec::new();
    for (i, (u, k)) in [(u1, &k1), (u2, &k2)].into_iter().enumerate() {
        if &box_product(k, w.mask(), n)? != u {
            violations.push(format!("U{} is not U{}|w × Ω|[n]∖w", i + 1, i + 1));
        }
    }
    if !is_cross_intersecting(&k1, &k2)? {
        violations.push("kernels are not cross-intersecting".into());
    }
    if a.first() == &half() && b.first() == &half() {
        let want = 1usize << (w.len().max(1) - 1);
        for (i, k) in [&k1, &k2].into_iter().enumerate() {
            if k.len() != want {
                violations.push(format!("|K{}| = {} ≠ 2^(|w|-1) = {want}", i + 1, k.len()));
            }
        }
    }
    Ok(KernelReport { w, k1, k2, violations })
}
