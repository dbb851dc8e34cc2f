use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{full_mask, Mask, ProbabilityVector, SubsetFamily};
use crate::rational::to_f64;

/// Coefficients `θ^(z)` of `x / √μ(U)` in the basis `v^(z)` (columns of the
/// tensor product of `V^(l) = [[1, c], [1, -1/c]]`).
#[derive(Debug, Clone, Serialize)]
pub struct EigenCoefficients {
    pub n: usize,
    pub theta: Vec<f64>,
    #[serde(skip)]
    c: Vec<f64>,
    pub measure: f64,
}

pub fn eigen_coefficients(pv: &ProbabilityVector, u: &SubsetFamily) -> Result<EigenCoefficients> {
    if pv.n() != u.n() {
        return Err(Error::DimensionMismatch { left: pv.n(), right: u.n() });
    }
    if pv.n() > 12 {
        return Err(Error::SizeCap { n: pv.n(), cap: 12 });
    }
    let atoms = pv.atoms();
    let mut f: Vec<f64> = (0..=full_mask(pv.n()))
        .map(|x| if u.contains(x) { to_f64(&atoms[x as usize]) } else { 0.0 })
        .collect();
    let mu: f64 = f.iter().sum();
    if u.is_empty() || mu.is_zero() {
        return Err(Error::EmptyFamily);
    }
    let c: Vec<f64> = (1..=pv.n()).map(|l| (to_f64(pv.p(l)) / to_f64(&pv.q(l))).sqrt()).collect();
    butterfly(&mut f, |j, f0, f1| (f0 + f1, c[j] * f0 - f1 / c[j]));
    let scale = mu.sqrt();
    for v in &mut f {
        *v /= scale;
    }
    Ok(EigenCoefficients { n: pv.n(), theta: f, c, measure: mu })
}

/// In-place per-coordinate 2-point transform over a vector indexed by masks.
fn butterfly(f: &mut [f64], op: impl Fn(usize, f64, f64) -> (f64, f64)) {
    let n = f.len().trailing_zeros() as usize;
    for j in 0..n {
        let bit = 1usize << j;
        for x in 0..f.len() {
            if x & bit == 0 {
                let (a, b) = op(j, f[x], f[x | bit]);
                f[x] = a;
                f[x | bit] = b;
            }
        }
    }
}

impl EigenCoefficients {
    pub fn get(&self, z: Mask) -> f64 {
        self.theta[z as usize]
    }

    pub fn parseval(&self) -> f64 {
        self.theta.iter().map(|t| t * t).sum()
    }

    /// `Σ θ^(z) v^(z)`, which should equal the characteristic vector over `√μ`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut f = self.theta.clone();
        butterfly(&mut f, |j, t0, t1| (t0 + self.c[j] * t1, t0 - t1 / self.c[j]));
        f
    }

    pub fn reconstruction_error(&self, u: &SubsetFamily) -> f64 {
        let s = self.measure.sqrt();
        self.reconstruct()
            .iter()
            .enumerate()
            .map(|(x, v)| (v - if u.contains(x as Mask) { 1.0 / s } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|θ^(z)|` over `z` outside `keep`.
    pub fn max_outside(&self, keep: impl Fn(Mask) -> bool) -> f64 {
        self.theta
            .iter()
            .enumerate()
            .filter(|(z, _)| !keep(*z as Mask))
            .map(|(_, t)| t.abs())
            .fold(0.0, f64::max)
    }

    /// Coefficients `λ^(z)` of the characteristic vector in the basis `y^(z)`
    /// (indicator of `{x : z ⊆ x}`), derived from `θ`.
    pub fn junta_lambda(&self) -> Vec<f64> {
        let mut f = self.theta.clone();
        butterfly(&mut f, |j, t0, t1| {
            let c = self.c[j];
            (t0 + c * t1, -(c + 1.0 / c) * t1)
        });
        let s = self.measure.sqrt();
        f.iter().map(|v| v * s).collect()
    }
}

/// `λ^(z)` by Möbius inversion over the subset lattice, exactly.
pub fn junta_coefficients_exact(u: &SubsetFamily) -> Vec<i64> {
    let mut f: Vec<i64> = (0..=full_mask(u.n())).map(|x| u.contains(x) as i64).collect();
    for j in 0..u.n() {
        let bit = 1usize << j;
        for x in 0..f.len() {
            if x & bit != 0 {
                f[x] -= f[x ^ bit];
            }
        }
    }
    f
}
