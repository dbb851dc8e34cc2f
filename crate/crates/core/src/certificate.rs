//! Closed-form dual certificates for the bipartite disjointness graph.
//!
//! The dual slack matrix `S` is a tensor product over coordinates. Conjugating by
//! the per-coordinate eigenbases `V_i` splits it into one 2×2 block `S^(z)` per
//! subset `z`, so feasibility reduces to `2^n` exact 2×2 checks. Every quantity
//! lives in `Q(√(p1·p2))`; irrational per-coordinate factors `c_i^(l) = √(p/q)`
//! only ever appear squared.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{full_mask, mask_elements, Mask, ProbabilityVector};
use crate::rational::{format_rational, half, rat};
use crate::reductions::{WitnessForm, WitnessSet};
use crate::surd::Surd;

pub type Matrix2<T> = [[T; 2]; 2];

/// Per-coordinate 2×2 data for both sides. Side indices are 0 and 1.
#[derive(Debug, Clone)]
pub struct CoordinateBlocks {
    p: [Vec<BigRational>; 2],
    q: [Vec<BigRational>; 2],
    r: [Vec<BigRational>; 2],
}

impl CoordinateBlocks {
    pub fn new(pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> Result<Self> {
        if pv1.n() != pv2.n() {
            return Err(Error::DimensionMismatch { left: pv1.n(), right: pv2.n() });
        }
        let p = [pv1.entries().to_vec(), pv2.entries().to_vec()];
        let q = p.clone().map(|v| v.iter().map(|x| BigRational::one() - x).collect::<Vec<_>>());
        let r = [0, 1].map(|i| p[i].iter().zip(&q[i]).map(|(a, b)| a / b).collect());
        Ok(Self { p, q, r })
    }

    pub fn n(&self) -> usize {
        self.p[0].len()
    }

    pub fn p(&self, side: usize, l: usize) -> &BigRational {
        &self.p[side][l - 1]
    }

    pub fn q(&self, side: usize, l: usize) -> &BigRational {
        &self.q[side][l - 1]
    }

    /// `(c_side^(l))² = p/q`.
    pub fn ratio(&self, side: usize, l: usize) -> &BigRational {
        &self.r[side][l - 1]
    }

    /// `A_{i,j}^(l) = [[1 - p_j/q_i, p_j/q_i], [1, 0]]`, rows and columns indexed `∅, {l}`.
    pub fn a_matrix(&self, i: usize, j: usize, l: usize) -> Matrix2<BigRational> {
        let t = self.p(j, l) / self.q(i, l);
        [[BigRational::one() - &t, t], [BigRational::one(), BigRational::zero()]]
    }

    pub fn delta(&self, i: usize, l: usize) -> Matrix2<BigRational> {
        [[self.q(i, l).clone(), BigRational::zero()], [BigRational::zero(), self.p(i, l).clone()]]
    }

    /// `Δ_i^(l) A_{i,j}^(l)`.
    pub fn delta_a(&self, i: usize, j: usize, l: usize) -> Matrix2<BigRational> {
        mul2(&self.delta(i, l), &self.a_matrix(i, j, l))
    }

    /// `c_{i,j}^(z) = Π_{l∈z} (-c_i^(l) c_j^(l))`, as a sign and a rational square.
    pub fn c_product(&self, i: usize, j: usize, z: Mask) -> SignedRoot {
        let mut square = BigRational::one();
        for l in mask_elements(z) {
            square *= self.ratio(i, l) * self.ratio(j, l);
        }
        let sign = if z.count_ones().is_multiple_of(2) { 1 } else { -1 };
        SignedRoot { sign, square }
    }

    /// `c_{i,i}^(z)`, which is always rational.
    pub fn c_diag(&self, i: usize, z: Mask) -> BigRational {
        let mut v = BigRational::one();
        for l in mask_elements(z) {
            v *= -self.ratio(i, l);
        }
        v
    }

    /// Exact forms of the per-coordinate identities, with every `c` cleared by
    /// multiplying through. Returns the names of identities that fail.
    pub fn exact_identity_failures(&self) -> Vec<String> {
        let mut failures = Vec::new();
        let one = BigRational::one();
        for l in 1..=self.n() {
            for i in 0..2 {
                let (p, q, r) = (self.p(i, l), self.q(i, l), self.ratio(i, l));
                // Off-diagonal of V^T Δ V and the ∅-column of V^T Δ J Δ V.
                if q * r - p != BigRational::zero() {
                    failures.push(format!("coordinate {l} side {i}: q·c² ≠ p"));
                }
                // Lower-right entry of V^T Δ V.
                if q * r + p / r != one {
                    failures.push(format!("coordinate {l} side {i}: q·c² + p/c² ≠ 1"));
                }
                for j in 0..2 {
                    let a = self.a_matrix(i, j, l);
                    if &a[0][0] + &a[0][1] != one || a[1][0] != one {
                        failures.push(format!("coordinate {l} A_{i}{j}: row sums"));
                    }
                    // Upper-right entry of A_{i,j} V_j = V_i D_{i,j}, times c_j.
                    let t = self.p(j, l) / self.q(i, l);
                    let lhs = (&one - &t) * self.ratio(j, l) - &t;
                    let rhs = -(self.ratio(i, l) * self.ratio(j, l));
                    if lhs != rhs {
                        failures.push(format!("coordinate {l} A_{i}{j} V_{j} ≠ V_{i} D_{i}{j}"));
                    }
                    if transpose2(&self.delta_a(i, j, l)) != self.delta_a(j, i, l) {
                        failures.push(format!("coordinate {l}: (Δ_{i} A_{i}{j})ᵀ ≠ Δ_{j} A_{j}{i}"));
                    }
                }
            }
        }
        failures
    }

    /// `V_i^(l) = [[1, c], [1, -1/c]]` in floating point.
    pub fn v_matrix_f64(&self, i: usize, l: usize) -> Matrix2<f64> {
        let c = crate::rational::to_f64(self.ratio(i, l)).sqrt();
        [[1.0, c], [1.0, -1.0 / c]]
    }

    /// `D_{i,j}^(l) = diag(1, -c_i c_j)` in floating point.
    pub fn d_matrix_f64(&self, i: usize, j: usize, l: usize) -> Matrix2<f64> {
        let ci = crate::rational::to_f64(self.ratio(i, l)).sqrt();
        let cj = crate::rational::to_f64(self.ratio(j, l)).sqrt();
        [[1.0, 0.0], [0.0, -ci * cj]]
    }

    /// Largest absolute residual over all coordinates of the four identities
    /// `A V = V D`, `Vᵀ Δ V = I`, `Vᵀ (Δ A) V = D`, `Vᵀ (Δ J Δ) V = E_{∅,∅}`.
    pub fn identity_residual_f64(&self) -> f64 {
        let f = |m: &Matrix2<BigRational>| m.clone().map(|row| row.map(|x| crate::rational::to_f64(&x)));
        let mut worst = 0.0f64;
        let mut track = |a: Matrix2<f64>, b: Matrix2<f64>| {
            for r in 0..2 {
                for c in 0..2 {
                    worst = worst.max((a[r][c] - b[r][c]).abs());
                }
            }
        };
        let identity = [[1.0, 0.0], [0.0, 1.0]];
        let e00 = [[1.0, 0.0], [0.0, 0.0]];
        for l in 1..=self.n() {
            for i in 0..2 {
                let vi = self.v_matrix_f64(i, l);
                let di = f(&self.delta(i, l));
                track(mul2f(&mul2f(&transpose2f(&vi), &di), &vi), identity);
                for j in 0..2 {
                    let vj = self.v_matrix_f64(j, l);
                    let dj = f(&self.delta(j, l));
                    let a = f(&self.a_matrix(i, j, l));
                    let d = self.d_matrix_f64(i, j, l);
                    track(mul2f(&a, &vj), mul2f(&vi, &d));
                    track(mul2f(&mul2f(&transpose2f(&vi), &mul2f(&di, &a)), &vj), d);
                    let col_i = [[di[0][0], 0.0], [di[1][1], 0.0]];
                    let row_j = [[dj[0][0], dj[1][1]], [0.0, 0.0]];
                    let djd = mul2f(&col_i, &row_j);
                    track(mul2f(&mul2f(&transpose2f(&vi), &djd), &vj), e00);
                }
            }
        }
        worst
    }
}

fn mul2(a: &Matrix2<BigRational>, b: &Matrix2<BigRational>) -> Matrix2<BigRational> {
    let e = |r: usize, c: usize| &a[r][0] * &b[0][c] + &a[r][1] * &b[1][c];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn transpose2<T: Clone>(a: &Matrix2<T>) -> Matrix2<T> {
    [[a[0][0].clone(), a[1][0].clone()], [a[0][1].clone(), a[1][1].clone()]]
}

fn mul2f(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Matrix2<f64> {
    let e = |r: usize, c: usize| a[r][0] * b[0][c] + a[r][1] * b[1][c];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn transpose2f(a: &Matrix2<f64>) -> Matrix2<f64> {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// `sign · √square`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedRoot {
    pub sign: i8,
    pub square: BigRational,
}

impl SignedRoot {
    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * crate::rational::to_f64(&self.square).sqrt()
    }
}

/// A symmetric 2×2 block with exact diagonal and the off-diagonal kept as
/// sign plus exact square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMatrix {
    pub diag: [Surd; 2],
    pub off_sign: i8,
    pub off_square: Surd,
}

impl BlockMatrix {
    /// A block with an exactly known off-diagonal.
    pub fn from_entries(d1: Surd, d2: Surd, off: &Surd) -> Self {
        Self { diag: [d1, d2], off_sign: off.signum(), off_square: off.square() }
    }

    pub fn det(&self) -> Surd {
        &(&self.diag[0] * &self.diag[1]) - &self.off_square
    }

    pub fn trace(&self) -> Surd {
        &self.diag[0] + &self.diag[1]
    }

    pub fn off_f64(&self) -> f64 {
        self.off_sign as f64 * self.off_square.to_f64().max(0.0).sqrt()
    }

    pub fn to_f64(&self) -> Matrix2<f64> {
        let o = self.off_f64();
        [[self.diag[0].to_f64(), o], [o, self.diag[1].to_f64()]]
    }
}

/// PSD test for a symmetric 2×2 block: both diagonal entries and the
/// determinant non-negative, decided exactly.
pub fn is_block_psd(m: &BlockMatrix) -> bool {
    m.diag[0].is_nonnegative() && m.diag[1].is_nonnegative() && m.det().is_nonnegative()
}

/// Positive definite: determinant and trace strictly positive.
pub fn is_block_pd(m: &BlockMatrix) -> bool {
    m.det().is_positive() && m.trace().is_positive()
}

/// Put the side with the larger first coordinate first.
pub fn normalize_sides(
    pv1: &ProbabilityVector,
    pv2: &ProbabilityVector,
) -> (ProbabilityVector, ProbabilityVector, bool) {
    if pv1.first() >= pv2.first() {
        (pv1.clone(), pv2.clone(), false)
    } else {
        (pv2.clone(), pv1.clone(), true)
    }
}

/// `s/2` with `s = √(p1 p2)`.
fn half_root(d: &BigRational) -> Surd {
    Surd::root(half(), d)
}

/// The one-parameter family of `(ε1, η)` given `ε2`; requires `p1 ≥ p2`.
///
/// `ε1 = (p2/p1) ε2 + (p1 - p2) p2 / (2s)` and `η = (p2/s) ε2 + q2/2`.
pub fn epsilon_eta(
    pv1: &ProbabilityVector,
    pv2: &ProbabilityVector,
    eps2: &Surd,
) -> Result<(Surd, Surd)> {
    let (p1, p2) = (pv1.first(), pv2.first());
    if p1 < p2 {
        return Err(Error::Precondition(format!("p1 = {p1} < p2 = {p2}; swap sides first")));
    }
    let d = p1 * p2;
    if eps2.radicand() != &d {
        return Err(Error::Precondition("ε2 is not expressed over √(p1 p2)".into()));
    }
    if !eps2.is_nonnegative() || eps2 > &half_root(&d) {
        return Err(Error::OutOfRange(format!("ε2 = {eps2} outside [0, √(p1p2)/2]")));
    }
    // (p1 - p2) p2 / (2s) = (p1 - p2)/(2 p1) · s
    let shift = Surd::root((p1 - p2) / (rat(2, 1) * p1), &d);
    let eps1 = &eps2.scale(&(p2 / p1)) + &shift;
    // (p2/s) ε2 = (s/p1) ε2
    let s = Surd::root(BigRational::one(), &d);
    let eta = (&s * eps2).scale(&p1.recip()).add_rational(&(pv2.q(1) / rat(2, 1)));
    Ok((eps1, eta))
}

/// Parameters `(α, β, ε1, ε2, η)` of a dual solution over two probability vectors.
#[derive(Debug, Clone)]
pub struct DualCertificate {
    pv1: ProbabilityVector,
    pv2: ProbabilityVector,
    swapped: bool,
    blocks: CoordinateBlocks,
    pub alpha: Surd,
    pub beta: Surd,
    pub eps1: Surd,
    pub eps2: Surd,
    pub eta: Surd,
}

impl DualCertificate {
    /// Member of the one-parameter family with `α = β = √(p1p2)/2`. Sides are
    /// swapped internally when `p1 < p2`.
    pub fn new(pv1: &ProbabilityVector, pv2: &ProbabilityVector, eps2: EpsilonChoice) -> Result<Self> {
        if pv1.n() != pv2.n() {
            return Err(Error::DimensionMismatch { left: pv1.n(), right: pv2.n() });
        }
        let (a, b, swapped) = normalize_sides(pv1, pv2);
        let d = a.first() * b.first();
        let eps2 = match eps2 {
            EpsilonChoice::Zero => Surd::zero(&d),
            EpsilonChoice::Max => half_root(&d),
            EpsilonChoice::Value(v) => Surd::new(v.a().clone(), v.b().clone(), d.clone()),
        };
        let (eps1, eta) = epsilon_eta(&a, &b, &eps2)?;
        let blocks = CoordinateBlocks::new(&a, &b)?;
        Ok(Self {
            alpha: half_root(&d),
            beta: half_root(&d),
            pv1: a,
            pv2: b,
            swapped,
            blocks,
            eps1,
            eps2,
            eta,
        })
    }

    /// Override the objective split `(α, β)`; the family formulas assume `α = β`.
    pub fn with_split(mut self, alpha: Surd, beta: Surd) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn n(&self) -> usize {
        self.pv1.n()
    }

    /// Normalized first side (the one with the larger first coordinate).
    pub fn pv1(&self) -> &ProbabilityVector {
        &self.pv1
    }

    pub fn pv2(&self) -> &ProbabilityVector {
        &self.pv2
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn blocks(&self) -> &CoordinateBlocks {
        &self.blocks
    }

    /// `p1 p2`, the radicand of every surd in the certificate.
    pub fn radicand(&self) -> BigRational {
        self.pv1.first() * self.pv2.first()
    }

    pub fn epsilon(&self, side: usize) -> &Surd {
        if side == 0 {
            &self.eps1
        } else {
            &self.eps2
        }
    }

    pub fn objective(&self) -> Surd {
        &self.alpha + &self.beta
    }

    /// The block `S^(z)`.
    pub fn block(&self, z: Mask) -> BlockMatrix {
        let c11 = self.blocks.c_diag(0, z);
        let c22 = self.blocks.c_diag(1, z);
        let d1 = &self.alpha - &self.eps1.scale(&c11);
        let d2 = &self.beta - &self.eps2.scale(&c22);
        if z == 0 {
            return BlockMatrix::from_entries(d1, d2, &self.eta.add_rational(&-half()));
        }
        let c12 = self.blocks.c_product(0, 1, z);
        BlockMatrix {
            diag: [d1, d2],
            off_sign: self.eta.signum() * c12.sign,
            off_square: self.eta.square().scale(&c12.square),
        }
    }

    pub fn block_spectrum(&self) -> BlockSpectrum {
        BlockSpectrum { blocks: (0..=full_mask(self.n())).map(|z| self.block(z)).collect() }
    }

    pub fn verify(&self) -> FeasibilityReport {
        FeasibilityReport::build(self, CertificateKind::OneParameter, Vec::new())
    }
}

/// How to pick `ε2` within `[0, √(p1p2)/2]`.
#[derive(Debug, Clone)]
pub enum EpsilonChoice {
    Zero,
    Max,
    /// Coefficients are reinterpreted over the normalized `√(p1p2)`.
    Value(Surd),
}

/// All blocks `S^(z)`, indexed by the mask of `z`.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    pub blocks: Vec<BlockMatrix>,
}

impl BlockSpectrum {
    pub fn get(&self, z: Mask) -> &BlockMatrix {
        &self.blocks[z as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Mask, &BlockMatrix)> {
        self.blocks.iter().enumerate().map(|(z, b)| (z as Mask, b))
    }
}

pub fn block_s(z: Mask, cert: &DualCertificate) -> BlockMatrix {
    cert.block(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    OneParameter,
    Third,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

impl Check {
    fn new(name: &str, details: Vec<String>) -> Self {
        Self { name: name.into(), pass: details.is_empty(), details }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockFailure {
    pub z: Vec<usize>,
    pub diag: [String; 2],
    pub det: String,
}

/// Outcome of checking a certificate; failures are entries, not errors.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub kind: CertificateKind,
    pub swapped: bool,
    pub pv1: ProbabilityVector,
    pub pv2: ProbabilityVector,
    #[serde(with = "crate::rational::serde_rational")]
    pub p1p2: BigRational,
    pub alpha: Surd,
    pub beta: Surd,
    pub eps1: Surd,
    pub eps2: Surd,
    pub eta: Surd,
    pub checks: Vec<Check>,
    pub failing_blocks: Vec<BlockFailure>,
    pub feasible: bool,
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub bound: Option<BigRational>,
}

impl FeasibilityReport {
    fn build(cert: &DualCertificate, kind: CertificateKind, mut checks: Vec<Check>) -> Self {
        let blocks = cert.blocks();
        let n = cert.n();

        // (a) Z = diag(ε1 Δ1 A11, ε2 Δ2 A22) ≥ 0 entrywise. A tensor product of the
        // per-coordinate A_ii has a negative entry iff some factor does, i.e. p > 1/2.
        let mut z_issues = Vec::new();
        for side in 0..2 {
            let eps = cert.epsilon(side);
            if !eps.is_nonnegative() {
                z_issues.push(format!("ε{} = {} is negative", side + 1, eps));
                continue;
            }
            if eps.is_zero() {
                continue;
            }
            for l in 1..=n {
                let p = blocks.p(side, l);
                if p > &half() {
                    z_issues.push(format!(
                        "side {} coordinate {l}: p = {p} > 1/2 with ε{} > 0, so A{}{} has negative entries",
                        side + 1,
                        side + 1,
                        side + 1,
                        side + 1
                    ));
                }
            }
        }
        checks.push(Check::new("z_nonnegative", z_issues));

        // (b) γ = η Δ1 A12 is supported on disjoint pairs: every factor has a zero
        // ({l},{l}) entry, so the product vanishes whenever x ∩ y ≠ ∅.
        let mut gamma_issues = Vec::new();
        for l in 1..=n {
            if !blocks.a_matrix(0, 1, l)[1][1].is_zero() {
                gamma_issues.push(format!("coordinate {l}: A12 has nonzero ({{l}},{{l}}) entry"));
            }
            if transpose2(&blocks.delta_a(0, 1, l)) != blocks.delta_a(1, 0, l) {
                gamma_issues.push(format!("coordinate {l}: (Δ1 A12)ᵀ ≠ Δ2 A21"));
            }
        }
        checks.push(Check::new("gamma_support", gamma_issues));

        // (c) every block S^(z) is PSD.
        let mut failing = Vec::new();
        for z in 0..=full_mask(n) {
            let b = cert.block(z);
            if !is_block_psd(&b) {
                failing.push(BlockFailure {
                    z: mask_elements(z),
                    diag: [b.diag[0].to_string(), b.diag[1].to_string()],
                    det: b.det().to_string(),
                });
            }
        }
        let block_details = failing.iter().map(|f| format!("S^{:?} not PSD (det {})", f.z, f.det)).collect();
        checks.push(Check::new("blocks_psd", block_details));

        // (d) objective α + β = √(p1 p2).
        let d = cert.radicand();
        let target = Surd::root(BigRational::one(), &d);
        let objective = cert.objective();
        let obj_issues = if objective == target || (&objective - &target).is_zero() {
            Vec::new()
        } else {
            vec![format!("α + β = {objective} ≠ sqrt(p1p2)")]
        };
        checks.push(Check::new("objective", obj_issues));

        let feasible = checks.iter().all(|c| c.pass);
        let bound = feasible.then(|| objective.square().to_rational()).flatten();
        Self {
            kind,
            swapped: cert.swapped(),
            pv1: cert.pv1().clone(),
            pv2: cert.pv2().clone(),
            p1p2: d,
            alpha: cert.alpha.clone(),
            beta: cert.beta.clone(),
            eps1: cert.eps1.clone(),
            eps2: cert.eps2.clone(),
            eta: cert.eta.clone(),
            checks,
            failing_blocks: failing,
            feasible,
            bound,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Check the one-parameter certificate at the given `ε2`.
pub fn verify_dual_feasibility(
    pv1: &ProbabilityVector,
    pv2: &ProbabilityVector,
    eps2: EpsilonChoice,
) -> Result<FeasibilityReport> {
    Ok(DualCertificate::new(pv1, pv2, eps2)?.verify())
}

/// Certificate with `ε1 = ε2 = √(p1p2)/2`, `η = 1/2`, for vectors with every
/// entry at most 1/3 whose first coordinate attains the largest product.
///
/// For `z ≠ ∅` the block condition is the rational inequality
/// `p1p2 · (1 - c11)/|c11| · (1 - c22)/|c22| ≥ 1`; it is checked for every `z`.
pub fn verify_third_certificate(pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> Result<FeasibilityReport> {
    let cert = DualCertificate::new(pv1, pv2, EpsilonChoice::Max)?;
    let (a, b) = (cert.pv1(), cert.pv2());
    let n = cert.n();
    let d = cert.radicand();

    let mut pre = Vec::new();
    let third = rat(1, 3);
    for (side, pv) in [a, b].into_iter().enumerate() {
        for l in 1..=n {
            if pv.p(l) > &third {
                pre.push(format!("side {} coordinate {l}: p = {} > 1/3", side + 1, pv.p(l)));
            }
        }
    }
    for l in 1..=n {
        let prod = a.p(l) * b.p(l);
        if prod > d {
            pre.push(format!("coordinate {l}: p1(l) p2(l) = {prod} > p1 p2 = {d}"));
        }
    }
    let mut checks = vec![Check::new("preconditions", pre)];

    let blocks = cert.blocks();
    let mut det_issues = Vec::new();
    if !(cert.eps1 == half_root(&d) && cert.eta == Surd::rational(half(), &d)) {
        det_issues.push("(ε1, η) ≠ (√(p1p2)/2, 1/2)".to_string());
    }
    for z in 1..=full_mask(n) {
        let c11 = blocks.c_diag(0, z);
        let c22 = blocks.c_diag(1, z);
        let lhs = &d * ((BigRational::one() - &c11) / c11.abs()) * ((BigRational::one() - &c22) / c22.abs());
        if lhs < BigRational::one() {
            det_issues.push(format!("z = {:?}: p1p2·(1-c11)/|c11|·(1-c22)/|c22| = {} < 1", mask_elements(z), lhs));
        }
    }
    checks.push(Check::new("det_e1_e2", det_issues));

    let mut report = FeasibilityReport::build(&cert, CertificateKind::Third, checks);
    report.feasible = report.checks.iter().all(|c| c.pass);
    if !report.feasible {
        report.bound = None;
    }
    Ok(report)
}

/// `(α + β)²`, available only once the certificate verifies.
pub fn certificate_bound(cert: &DualCertificate) -> Result<BigRational> {
    let report = cert.verify();
    if !report.feasible {
        return Err(Error::NotVerified);
    }
    report.bound.ok_or_else(|| Error::OutOfRange("(α + β)² is irrational".into()))
}

/// Subsets `z` whose block `S^(z)` is positive definite.
pub fn strict_block_set(cert: &DualCertificate) -> Result<BTreeSet<Mask>> {
    if !cert.verify().feasible {
        return Err(Error::NotVerified);
    }
    Ok((0..=full_mask(cert.n())).filter(|&z| is_block_pd(&cert.block(z))).collect())
}

/// Halve `ε2` from `√(p1p2)/2` until the certificate is feasible and strict
/// on every block except `∅` and the singletons of the witness set.
pub fn choose_small_epsilon2(pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> Result<Surd> {
    const MAX_HALVINGS: usize = 64;
    let (a, b, _) = normalize_sides(pv1, pv2);
    if a.first() >= &half() {
        return Err(Error::Precondition(format!("p1 = {} must be < 1/2", a.first())));
    }
    let w = WitnessSet::new(&a, &b, WitnessForm::Strong)?.mask();
    let n = a.n();
    let target: BTreeSet<Mask> =
        (0..=full_mask(n)).filter(|&z| z.count_ones() >= 2 || z & !w != 0).collect();
    let d = a.first() * b.first();
    let mut coeff = half();
    for _ in 0..MAX_HALVINGS {
        let eps2 = Surd::root(coeff.clone(), &d);
        let cert = DualCertificate::new(&a, &b, EpsilonChoice::Value(eps2.clone()))?;
        if cert.verify().feasible && strict_block_set(&cert)? == target {
            return Ok(eps2);
        }
        coeff /= rat(2, 1);
    }
    Err(Error::SearchExhausted(MAX_HALVINGS))
}

pub fn format_surd_block(b: &BlockMatrix) -> [String; 3] {
    [b.diag[0].to_string(), b.diag[1].to_string(), format_rational(&BigRational::from_integer(b.off_sign.into()))]
}
