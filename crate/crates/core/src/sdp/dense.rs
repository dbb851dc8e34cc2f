use nalgebra::DMatrix;
use serde::Serialize;

use crate::certificate::{is_block_psd, DualCertificate, Matrix2};
use crate::error::{Error, Result};
use crate::rational::to_f64;

use super::masks;

/// Largest `n` for which the `2^(n+1)`-square matrices are materialized.
pub const DENSE_CAP: usize = 10;

/// `factors[0] ⊗ … ` arranged so that `factors[l-1]` acts on bit `l-1` of the index.
pub fn kron_all(factors: &[DMatrix<f64>]) -> DMatrix<f64> {
    factors.iter().rev().fold(DMatrix::from_element(1, 1, 1.0), |acc, f| acc.kronecker(f))
}

fn to_dm(m: Matrix2<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

fn rat2(m: &Matrix2<num_rational::BigRational>) -> DMatrix<f64> {
    to_dm(m.clone().map(|row| row.map(|x| to_f64(&x))))
}

/// Dense matrices of a certificate, in its normalized side order.
#[derive(Debug, Clone)]
pub struct DenseCertificate {
    /// Slack matrix, `2N × 2N`.
    pub s: DMatrix<f64>,
    /// `diag(ε1 Δ1 A11, ε2 Δ2 A22)`.
    pub z: DMatrix<f64>,
    /// `η Δ1 A12`, the edge multipliers, `N × N`.
    pub gamma: DMatrix<f64>,
    /// `blockdiag(V1, V2)`.
    pub v: DMatrix<f64>,
}

pub fn dense_matrices(cert: &DualCertificate) -> Result<DenseCertificate> {
    let n = cert.n();
    if n > DENSE_CAP {
        return Err(Error::SizeCap { n, cap: DENSE_CAP });
    }
    let b = cert.blocks();
    let coords = |f: &dyn Fn(usize) -> DMatrix<f64>| kron_all(&(1..=n).map(f).collect::<Vec<_>>());
    let delta = [0, 1].map(|i| coords(&|l| rat2(&b.delta(i, l))));
    let da = |i: usize, j: usize| coords(&|l| rat2(&b.delta_a(i, j, l)));
    let mass = [0, 1].map(|i| coords(&|l| DMatrix::from_column_slice(2, 1, &[to_f64(b.q(i, l)), to_f64(b.p(i, l))])));
    let vmat = [0, 1].map(|i| coords(&|l| to_dm(b.v_matrix_f64(i, l))));
    let (a, bt, e1, e2, eta) =
        (cert.alpha.to_f64(), cert.beta.to_f64(), cert.eps1.to_f64(), cert.eps2.to_f64(), cert.eta.to_f64());

    let size = 1usize << n;
    let z11 = da(0, 0) * e1;
    let z22 = da(1, 1) * e2;
    let gamma = da(0, 1) * eta;
    let djd = &mass[0] * mass[1].transpose();
    let off = &gamma - djd * 0.5;

    let mut s = DMatrix::zeros(2 * size, 2 * size);
    let mut z = DMatrix::zeros(2 * size, 2 * size);
    let mut v = DMatrix::zeros(2 * size, 2 * size);
    s.view_mut((0, 0), (size, size)).copy_from(&(&delta[0] * a - &z11));
    s.view_mut((size, size), (size, size)).copy_from(&(&delta[1] * bt - &z22));
    s.view_mut((0, size), (size, size)).copy_from(&off);
    s.view_mut((size, 0), (size, size)).copy_from(&off.transpose());
    z.view_mut((0, 0), (size, size)).copy_from(&z11);
    z.view_mut((size, size), (size, size)).copy_from(&z22);
    v.view_mut((0, 0), (size, size)).copy_from(&vmat[0]);
    v.view_mut((size, size), (size, size)).copy_from(&vmat[1]);
    Ok(DenseCertificate { s, z, gamma, v })
}

/// Floating-point cross-check of the block decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct DenseAudit {
    pub dim: usize,
    /// Eigenvalues of `S`, ascending.
    pub s_eigenvalues: Vec<f64>,
    /// Eigenvalues of `Vᵀ S V`, ascending; these are the block eigenvalues.
    pub conjugated_eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub z_min_entry: f64,
    /// Largest `|(Vᵀ S V)_{block z} - S^(z)|` over all `z`.
    pub block_max_residual: f64,
    /// Largest entry of `Vᵀ S V` outside the `2^n` blocks.
    pub offblock_max: f64,
    pub dense_psd: bool,
    /// Dense and exact verdicts coincide.
    pub agrees_with_blocks: bool,
}

pub fn dense_certificate_oracle(cert: &DualCertificate, tolerance: f64) -> Result<DenseAudit> {
    let d = dense_matrices(cert)?;
    let size = 1usize << cert.n();
    let m = d.v.transpose() * &d.s * &d.v;

    let mut block_max_residual = 0.0f64;
    for z in masks(cert.n()) {
        let exact = cert.block(z).to_f64();
        let zi = z as usize;
        let got = [[m[(zi, zi)], m[(zi, size + zi)]], [m[(size + zi, zi)], m[(size + zi, size + zi)]]];
        for r in 0..2 {
            for c in 0..2 {
                block_max_residual = block_max_residual.max((got[r][c] - exact[r][c]).abs());
            }
        }
    }
    let mut offblock_max = 0.0f64;
    for r in 0..2 * size {
        for c in 0..2 * size {
            if r % size != c % size {
                offblock_max = offblock_max.max(m[(r, c)].abs());
            }
        }
    }

    let sorted = |x: &DMatrix<f64>| {
        let mut e: Vec<f64> = x.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    };
    let s_eigenvalues = sorted(&d.s);
    let symmetric_m = (&m + m.transpose()) * 0.5;
    let conjugated_eigenvalues = sorted(&symmetric_m);
    let min_eigenvalue = s_eigenvalues[0];
    let scale = d.s.amax().max(1.0);
    let dense_psd = min_eigenvalue >= -tolerance * scale;
    let exact_psd = masks(cert.n()).all(|z| is_block_psd(&cert.block(z)));
    Ok(DenseAudit {
        dim: 2 * size,
        z_min_entry: d.z.iter().copied().fold(f64::INFINITY, f64::min),
        s_eigenvalues,
        conjugated_eigenvalues,
        min_eigenvalue,
        block_max_residual,
        offblock_max,
        dense_psd,
        agrees_with_blocks: dense_psd == exact_psd,
    })
}

/// `Σ_z (θ1(z), θ2(z)) S^(z) (θ1(z), θ2(z))ᵀ`, which equals `S • X` for the rank-one
/// primal whose coefficient vectors in the bases `V1`, `V2` are `θ1`, `θ2`.
pub fn block_quadratic_form(cert: &DualCertificate, theta1: &[f64], theta2: &[f64]) -> Result<f64> {
    let size = 1usize << cert.n();
    if theta1.len() != size || theta2.len() != size {
        return Err(Error::DimensionMismatch { left: theta1.len().max(theta2.len()), right: size });
    }
    let mut total = 0.0;
    for z in masks(cert.n()) {
        let b = cert.block(z).to_f64();
        let (x, y) = (theta1[z as usize], theta2[z as usize]);
        total += b[0][0] * x * x + 2.0 * b[0][1] * x * y + b[1][1] * y * y;
    }
    Ok(total)
}
