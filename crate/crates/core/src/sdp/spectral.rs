use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};

use super::MeasuredBipartiteGraph;

/// Simple undirected graph on `0..n`.
#[derive(Debug, Clone)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<bool>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGroundSet);
        }
        let mut adj = vec![false; n * n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::OutOfRange(format!("bad edge ({a}, {b})")));
            }
            adj[a * n + b] = true;
            adj[b * n + a] = true;
        }
        Ok(Self { n, adj })
    }

    pub fn complete(m: usize) -> Result<Self> {
        let edges: Vec<_> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
        Self::new(m, &edges)
    }

    pub fn complete_bipartite(m: usize) -> Result<Self> {
        let edges: Vec<_> = (0..m).flat_map(|a| (m..2 * m).map(move |b| (a, b))).collect();
        Self::new(2 * m, &edges)
    }

    pub fn cycle(m: usize) -> Result<Self> {
        let edges: Vec<_> = (0..m).map(|a| (a, (a + 1) % m)).collect();
        Self::new(m, &edges)
    }

    /// Kneser graph K(5, 2).
    pub fn petersen() -> Self {
        let pairs: Vec<u32> = (0..5u32).flat_map(|a| (a + 1..5).map(move |b| (1 << a) | (1 << b))).collect();
        let mut edges = Vec::new();
        for i in 0..10 {
            for j in i + 1..10 {
                if pairs[i] & pairs[j] == 0 {
                    edges.push((i, j));
                }
            }
        }
        Self::new(10, &edges).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.n + b]
    }

    pub fn degree(&self, a: usize) -> usize {
        (0..self.n).filter(|&b| self.adjacent(a, b)).count()
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |a, b| if self.adjacent(a, b) { 1.0 } else { 0.0 })
    }
}

/// A floating-point bound with a rigorous-up-to-rounding enclosure.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralBound {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Smallest-denominator rational inside `[lower, upper]`, if one exists with denominator ≤ 10^4.
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub rational: Option<BigRational>,
}

const MAX_DEN: i64 = 10_000;
const SLACK: f64 = 1e-12;

impl SpectralBound {
    fn new(value: f64, lower: f64, upper: f64) -> Self {
        let (lower, upper) = (lower.min(value) - SLACK, upper.max(value) + SLACK);
        Self { value, lower, upper, rational: to_rational_within(lower, upper, MAX_DEN) }
    }
}

/// Smallest-denominator rational in `[lo, hi]`, searching denominators up to `max_den`.
pub fn to_rational_within(lo: f64, hi: f64, max_den: i64) -> Option<BigRational> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return None;
    }
    for den in 1..=max_den {
        let num = (lo * den as f64).ceil();
        if num <= hi * den as f64 {
            return Some(BigRational::new(BigInt::from(num as i64), BigInt::from(den)));
        }
    }
    None
}

/// Eigenvalues with residual radii `‖A v - λ v‖`.
fn enclosed_eigenvalues(a: &DMatrix<f64>) -> Vec<(f64, f64)> {
    let eig = a.clone().symmetric_eigen();
    let mut out: Vec<(f64, f64)> = (0..a.nrows())
        .map(|k| {
            let v: DVector<f64> = eig.eigenvectors.column(k).into_owned();
            let lambda = eig.eigenvalues[k];
            let r = (a * &v - &v * lambda).norm() / v.norm();
            (lambda, r)
        })
        .collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// `-λ_min / (d - λ_min)` for a `d`-regular graph, an upper bound on `α(G)/|V|`.
pub fn hoffman_ratio_bound(graph: &SimpleGraph) -> Result<SpectralBound> {
    let d = graph.degree(0);
    if (0..graph.n()).any(|a| graph.degree(a) != d) {
        return Err(Error::Precondition("graph is not regular".into()));
    }
    if d == 0 {
        return Ok(SpectralBound::new(1.0, 1.0, 1.0));
    }
    let (lmin, r) = enclosed_eigenvalues(&graph.adjacency())[0];
    let d = d as f64;
    let f = |l: f64| -l / (d - l);
    Ok(SpectralBound::new(f(lmin), f(lmin + r), f(lmin - r)))
}

/// `σ2 / (σ1 + σ2)` for a biregular bipartite graph, an upper bound on
/// `√(μ1(U1) μ2(U2))` for cross-independent `U1, U2` under uniform measures.
pub fn bipartite_svd_bound(graph: &MeasuredBipartiteGraph) -> Result<SpectralBound> {
    let (left, right) = graph.degrees();
    let (d1, d2) = (left[0], right[0]);
    if left.iter().any(|&d| d != d1) || right.iter().any(|&d| d != d2) {
        return Err(Error::Precondition("graph is not biregular".into()));
    }
    let (m1, m2) = graph.sizes();
    let uniform = |mu: &[BigRational], m: usize| mu.iter().all(|x| x == &BigRational::new(1.into(), (m as i64).into()));
    if !uniform(graph.mu1(), m1) || !uniform(graph.mu2(), m2) {
        return Err(Error::Precondition("spectral bound needs uniform vertex measures".into()));
    }
    if d1 == 0 {
        return Ok(SpectralBound::new(0.0, 0.0, 0.0));
    }
    let sigma1 = ((d1 * d2) as f64).sqrt();
    // Singular values of B are the non-negative eigenvalues of [[0, B], [Bᵀ, 0]].
    let b = graph.biadjacency();
    let mut h = DMatrix::zeros(m1 + m2, m1 + m2);
    h.view_mut((0, m1), (m1, m2)).copy_from(&b);
    h.view_mut((m1, 0), (m2, m1)).copy_from(&b.transpose());
    let eig = enclosed_eigenvalues(&h);
    let top = eig.len() - 1;
    // σ1 is simple only for connected graphs; the second largest eigenvalue is σ2.
    let (sigma2, r) = eig[top - 1];
    let (sigma2, r) = (sigma2.max(0.0), r);
    let f = |s: f64| s / (sigma1 + s);
    Ok(SpectralBound::new(f(sigma2), f((sigma2 - r).max(0.0)), f(sigma2 + r)))
}

/// Independence number by exhaustive search (`n ≤ 20`).
pub fn brute_force_independence_number(graph: &SimpleGraph) -> Result<usize> {
    let n = graph.n();
    if n > 20 {
        return Err(Error::SizeCap { n, cap: 20 });
    }
    let nbr: Vec<u32> =
        (0..n).map(|a| (0..n).filter(|&b| graph.adjacent(a, b)).fold(0u32, |m, b| m | (1 << b))).collect();
    let mut best = 0;
    for set in 0u32..(1 << n) {
        let independent = (0..n).all(|a| set & (1 << a) == 0 || nbr[a] & set == 0);
        if independent {
            best = best.max(set.count_ones() as usize);
        }
    }
    Ok(best)
}

/// `max √(μ1(U1) μ2(U2))` over cross-independent pairs, by enumerating `U1` (`m1 ≤ 16`).
pub fn brute_force_cross_independent(graph: &MeasuredBipartiteGraph) -> Result<f64> {
    let (m1, m2) = graph.sizes();
    if m1 > 16 {
        return Err(Error::SizeCap { n: m1, cap: 16 });
    }
    let mu1: Vec<f64> = graph.mu1().iter().map(crate::rational::to_f64).collect();
    let mu2: Vec<f64> = graph.mu2().iter().map(crate::rational::to_f64).collect();
    let mut best = 0.0f64;
    for set in 0u32..(1 << m1) {
        let a: f64 = (0..m1).filter(|&x| set & (1 << x) != 0).map(|x| mu1[x]).sum();
        let b: f64 = (0..m2)
            .filter(|&y| (0..m1).all(|x| set & (1 << x) == 0 || !graph.adjacent(x, y)))
            .map(|y| mu2[y])
            .sum();
        best = best.max((a * b).sqrt());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn crown(m: usize) -> MeasuredBipartiteGraph {
        let edges: Vec<_> = (0..m).flat_map(|x| (0..m).filter(move |&y| y != x).map(move |y| (x, y))).collect();
        MeasuredBipartiteGraph::uniform(m, m, &edges).unwrap()
    }

    #[test]
    fn petersen_hoffman() {
        let g = SimpleGraph::petersen();
        let b = hoffman_ratio_bound(&g).unwrap();
        assert_eq!(b.rational, Some(rat(2, 5)));
        assert_eq!(brute_force_independence_number(&g).unwrap(), 4);
    }

    #[test]
    fn complete_and_cycle() {
        for m in 2..7 {
            let b = hoffman_ratio_bound(&SimpleGraph::complete(m).unwrap()).unwrap();
            assert_eq!(b.rational, Some(rat(1, m as i64)));
        }
        let kmm = hoffman_ratio_bound(&SimpleGraph::complete_bipartite(4).unwrap()).unwrap();
        assert_eq!(kmm.rational, Some(rat(1, 2)));
        let c = hoffman_ratio_bound(&SimpleGraph::cycle(6).unwrap()).unwrap();
        assert_eq!(c.rational, Some(rat(1, 2)));
        assert!(hoffman_ratio_bound(&SimpleGraph::new(3, &[(0, 1)]).unwrap()).is_err());
    }

    #[test]
    fn crown_is_tight() {
        for m in 3..7 {
            let g = crown(m);
            let b = bipartite_svd_bound(&g).unwrap();
            assert_eq!(b.rational, Some(rat(1, m as i64)));
            let best = brute_force_cross_independent(&g).unwrap();
            assert!((best - 1.0 / m as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_bipartite_svd() {
        let edges: Vec<_> = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).collect();
        let g = MeasuredBipartiteGraph::uniform(3, 3, &edges).unwrap();
        assert_eq!(bipartite_svd_bound(&g).unwrap().rational, Some(rat(0, 1)));
    }

    #[test]
    fn rational_search() {
        assert_eq!(to_rational_within(0.3999999, 0.4000001, 100), Some(rat(2, 5)));
        assert_eq!(to_rational_within(0.5, 0.4, 100), None);
    }
}
