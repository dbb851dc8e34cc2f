//! Primal/dual machinery for cross-independent pairs in a measured bipartite
//! graph, plus the dense cross-check for the closed-form certificates.

mod dense;
mod spectral;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use dense::{
    block_quadratic_form, dense_certificate_oracle, dense_matrices, kron_all, DenseAudit, DenseCertificate,
    DENSE_CAP,
};
pub use spectral::{
    bipartite_svd_bound, brute_force_cross_independent, brute_force_independence_number, hoffman_ratio_bound,
    to_rational_within, SimpleGraph, SpectralBound,
};

use crate::certificate::DualCertificate;
use crate::error::{Error, Result};
use crate::measure::{full_mask, Mask, ProbabilityVector, SubsetFamily};
use crate::rational::{parse_rational, to_f64};
use crate::surd::Surd;

/// Bipartite graph on `Ω1 ⊔ Ω2` with a probability measure on each side.
#[derive(Debug, Clone)]
pub struct MeasuredBipartiteGraph {
    m1: usize,
    m2: usize,
    adj: Vec<bool>,
    mu1: Vec<BigRational>,
    mu2: Vec<BigRational>,
}

#[derive(Deserialize)]
struct GraphFile {
    left: usize,
    right: usize,
    edges: Vec<(usize, usize)>,
    mu1: Option<Vec<String>>,
    mu2: Option<Vec<String>>,
}

impl MeasuredBipartiteGraph {
    pub fn new(
        m1: usize,
        m2: usize,
        edges: &[(usize, usize)],
        mu1: Vec<BigRational>,
        mu2: Vec<BigRational>,
    ) -> Result<Self> {
        if m1 == 0 || m2 == 0 {
            return Err(Error::EmptyGroundSet);
        }
        for (mu, m) in [(&mu1, m1), (&mu2, m2)] {
            if mu.len() != m {
                return Err(Error::DimensionMismatch { left: mu.len(), right: m });
            }
            if mu.iter().any(|x| x.is_negative()) || mu.iter().sum::<BigRational>() != BigRational::one() {
                return Err(Error::OutOfRange("vertex measure must be non-negative and sum to 1".into()));
            }
        }
        let mut adj = vec![false; m1 * m2];
        for &(x, y) in edges {
            if x >= m1 || y >= m2 {
                return Err(Error::OutOfRange(format!("edge ({x}, {y}) outside {m1} × {m2}")));
            }
            adj[x * m2 + y] = true;
        }
        Ok(Self { m1, m2, adj, mu1, mu2 })
    }

    /// Uniform measures on both sides.
    pub fn uniform(m1: usize, m2: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let u = |m: usize| vec![BigRational::new(1.into(), (m.max(1) as i64).into()); m];
        Self::new(m1, m2, edges, u(m1), u(m2))
    }

    /// `x ~ y` iff `x ∩ y = ∅`, with product measures on `2^[n]`.
    pub fn disjointness(pv1: &ProbabilityVector, pv2: &ProbabilityVector) -> Result<Self> {
        if pv1.n() != pv2.n() {
            return Err(Error::DimensionMismatch { left: pv1.n(), right: pv2.n() });
        }
        let size = 1usize << pv1.n();
        let edges: Vec<(usize, usize)> =
            (0..size).flat_map(|x| (0..size).filter(move |y| x & y == 0).map(move |y| (x, y))).collect();
        Self::new(size, size, &edges, pv1.atoms(), pv2.atoms())
    }

    /// `{"left": m1, "right": m2, "edges": [[i, j], ...], "mu1": [...], "mu2": [...]}`;
    /// measures default to uniform.
    pub fn from_json(text: &str) -> Result<Self> {
        let g: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let parse = |v: Option<Vec<String>>, m: usize| -> Result<Vec<BigRational>> {
            match v {
                Some(list) => list.iter().map(|s| parse_rational(s)).collect(),
                None => Ok(vec![BigRational::new(1.into(), (m.max(1) as i64).into()); m]),
            }
        };
        let mu1 = parse(g.mu1, g.left)?;
        let mu2 = parse(g.mu2, g.right)?;
        Self::new(g.left, g.right, &g.edges, mu1, mu2)
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.m1, self.m2)
    }

    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.adj[x * self.m2 + y]
    }

    pub fn mu1(&self) -> &[BigRational] {
        &self.mu1
    }

    pub fn mu2(&self) -> &[BigRational] {
        &self.mu2
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&a| a).count()
    }

    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let left = (0..self.m1).map(|x| (0..self.m2).filter(|&y| self.adjacent(x, y)).count()).collect();
        let right = (0..self.m2).map(|y| (0..self.m1).filter(|&x| self.adjacent(x, y)).count()).collect();
        (left, right)
    }

    /// Biadjacency matrix.
    pub fn biadjacency(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m1, self.m2, |x, y| if self.adjacent(x, y) { 1.0 } else { 0.0 })
    }
}

/// The rank-one primal `X = v vᵀ` with `v = (x1/√μ1(U1), x2/√μ2(U2))`.
#[derive(Debug, Clone, Serialize)]
pub struct PrimalWitness {
    pub u1: Vec<usize>,
    pub u2: Vec<usize>,
    #[serde(with = "crate::rational::serde_rational")]
    pub mu1: BigRational,
    #[serde(with = "crate::rational::serde_rational")]
    pub mu2: BigRational,
    /// Objective `√(μ1 μ2)`, kept squared.
    #[serde(with = "crate::rational::serde_rational")]
    pub objective_sq: BigRational,
    /// `Δ_i • X_ii = 1`, exact.
    pub trace_constraints: bool,
    /// Edges `(x, y)` with `x ∈ U1`, `y ∈ U2`; at most a few are kept.
    pub edge_violations: Vec<(usize, usize)>,
    pub feasible: bool,
}

impl PrimalWitness {
    pub fn vector(&self, graph: &MeasuredBipartiteGraph) -> DVector<f64> {
        let (m1, m2) = graph.sizes();
        let mut v = DVector::zeros(m1 + m2);
        let (s1, s2) = (to_f64(&self.mu1).sqrt(), to_f64(&self.mu2).sqrt());
        for &x in &self.u1 {
            v[x] = 1.0 / s1;
        }
        for &y in &self.u2 {
            v[m1 + y] = 1.0 / s2;
        }
        v
    }
}

pub fn build_primal(graph: &MeasuredBipartiteGraph, u1: &[usize], u2: &[usize]) -> Result<PrimalWitness> {
    let (m1, m2) = graph.sizes();
    if u1.iter().any(|&x| x >= m1) || u2.iter().any(|&y| y >= m2) {
        return Err(Error::OutOfRange("vertex index outside the graph".into()));
    }
    let mu1: BigRational = u1.iter().map(|&x| &graph.mu1[x]).sum();
    let mu2: BigRational = u2.iter().map(|&y| &graph.mu2[y]).sum();
    if mu1.is_zero() || mu2.is_zero() {
        return Err(Error::EmptyFamily);
    }
    // Δ_i • X_ii sums over distinct vertices, so repeated indices break it.
    let trace = |u: &[usize], mu: &[BigRational], total: &BigRational| {
        let distinct: std::collections::BTreeSet<usize> = u.iter().copied().collect();
        (distinct.iter().map(|&x| &mu[x]).sum::<BigRational>() / total).is_one()
    };
    let trace_constraints = trace(u1, &graph.mu1, &mu1) && trace(u2, &graph.mu2, &mu2);
    let mut edge_violations = Vec::new();
    let mut violated = false;
    'outer: for &x in u1 {
        for &y in u2 {
            if graph.adjacent(x, y) {
                violated = true;
                edge_violations.push((x, y));
                if edge_violations.len() >= 8 {
                    break 'outer;
                }
            }
        }
    }
    Ok(PrimalWitness {
        u1: u1.to_vec(),
        u2: u2.to_vec(),
        objective_sq: &mu1 * &mu2,
        mu1,
        mu2,
        trace_constraints,
        edge_violations,
        feasible: trace_constraints && !violated,
    })
}

/// Primal witness for two families on the disjointness graph (vertex = mask).
pub fn build_primal_families(
    graph: &MeasuredBipartiteGraph,
    u1: &SubsetFamily,
    u2: &SubsetFamily,
) -> Result<PrimalWitness> {
    let a: Vec<usize> = u1.members().map(|x| x as usize).collect();
    let b: Vec<usize> = u2.members().map(|x| x as usize).collect();
    build_primal(graph, &a, &b)
}

/// `(α, β, γ, Z)` in floating point, with the exact objective when known.
#[derive(Debug, Clone)]
pub struct GenericDualSolution {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: Vec<((usize, usize), f64)>,
    pub z: DMatrix<f64>,
    pub exact_objective: Option<Surd>,
}

impl GenericDualSolution {
    /// Materialize a closed-form certificate on the disjointness graph (`n ≤ 10`).
    pub fn from_certificate(cert: &DualCertificate) -> Result<Self> {
        let dense = dense_matrices(cert)?;
        let size = 1usize << cert.n();
        let mut gamma = Vec::new();
        for x in 0..size {
            for y in 0..size {
                let v = dense.gamma[(x, y)];
                if v != 0.0 {
                    gamma.push(if cert.swapped() { ((y, x), v) } else { ((x, y), v) });
                }
            }
        }
        gamma.sort_by_key(|&(e, _)| e);
        let (mut alpha, mut beta, mut z) = (cert.alpha.to_f64(), cert.beta.to_f64(), dense.z);
        if cert.swapped() {
            // Back to the caller's side order.
            std::mem::swap(&mut alpha, &mut beta);
            let mut back = DMatrix::zeros(2 * size, 2 * size);
            back.view_mut((0, 0), (size, size)).copy_from(&z.view((size, size), (size, size)));
            back.view_mut((size, size), (size, size)).copy_from(&z.view((0, 0), (size, size)));
            z = back;
        }
        Ok(Self { alpha, beta, gamma, z, exact_objective: Some(cert.objective()) })
    }

    pub fn objective(&self) -> f64 {
        self.alpha + self.beta
    }

    /// `S = [αΔ1, -½Δ1JΔ2; ·, βΔ2] + Σ γ (E_xy + E_yx) - Z`.
    pub fn slack(&self, graph: &MeasuredBipartiteGraph) -> DMatrix<f64> {
        let (m1, m2) = graph.sizes();
        let d1: Vec<f64> = graph.mu1.iter().map(to_f64).collect();
        let d2: Vec<f64> = graph.mu2.iter().map(to_f64).collect();
        let mut s = DMatrix::zeros(m1 + m2, m1 + m2);
        for x in 0..m1 {
            s[(x, x)] = self.alpha * d1[x];
            for y in 0..m2 {
                let v = -0.5 * d1[x] * d2[y];
                s[(x, m1 + y)] = v;
                s[(m1 + y, x)] = v;
            }
        }
        for y in 0..m2 {
            s[(m1 + y, m1 + y)] = self.beta * d2[y];
        }
        for &((x, y), g) in &self.gamma {
            s[(x, m1 + y)] += g;
            s[(m1 + y, x)] += g;
        }
        s - &self.z
    }
}

/// Feasibility of a dual solution, within `tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct DualCheck {
    pub gamma_on_edges: bool,
    pub z_min_entry: f64,
    pub s_min_eigenvalue: f64,
    pub feasible: bool,
}

pub fn check_dual(graph: &MeasuredBipartiteGraph, dual: &GenericDualSolution, tolerance: f64) -> DualCheck {
    let gamma_on_edges = dual.gamma.iter().all(|&((x, y), _)| graph.adjacent(x, y));
    let z_min_entry = dual.z.iter().copied().fold(f64::INFINITY, f64::min);
    let s = dual.slack(graph);
    let scale = s.amax().max(1.0);
    let s_min_eigenvalue = s.symmetric_eigenvalues().min();
    DualCheck {
        gamma_on_edges,
        z_min_entry,
        s_min_eigenvalue,
        feasible: gamma_on_edges && z_min_entry >= -tolerance && s_min_eigenvalue >= -tolerance * scale,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub dual: DualCheck,
    pub s_dot_x: f64,
    pub z_dot_x: f64,
    /// `(α + β) - √(μ1 μ2)`.
    pub gap: f64,
    /// `(α + β)² - μ1 μ2`, exact when the objective is known exactly and squares to a rational.
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub gap_squared_exact: Option<BigRational>,
    /// `|α + β - C•X - S•X - Z•X|`; zero up to rounding for a feasible primal.
    pub identity_residual: f64,
    pub complementary_slackness: bool,
}

/// Weak duality and slackness for a primal witness against a dual solution.
pub fn weak_duality_audit(
    graph: &MeasuredBipartiteGraph,
    witness: &PrimalWitness,
    dual: &GenericDualSolution,
    tolerance: f64,
) -> Result<AuditReport> {
    let check = check_dual(graph, dual, tolerance);
    if !check.feasible {
        return Err(Error::Precondition(format!(
            "dual is infeasible (min eigenvalue {:.3e}, min Z entry {:.3e}, γ on edges: {})",
            check.s_min_eigenvalue, check.z_min_entry, check.gamma_on_edges
        )));
    }
    let v = witness.vector(graph);
    let s = dual.slack(graph);
    let s_dot_x = v.dot(&(&s * &v));
    let z_dot_x = v.dot(&(&dual.z * &v));
    let root = to_f64(&witness.objective_sq).sqrt();
    let gap = dual.objective() - root;
    let gap_squared_exact = dual
        .exact_objective
        .as_ref()
        .and_then(|o| o.square().to_rational())
        .map(|o2| o2 - &witness.objective_sq);
    let identity_residual = (gap - s_dot_x - z_dot_x).abs();
    Ok(AuditReport {
        dual: check,
        s_dot_x,
        z_dot_x,
        gap,
        gap_squared_exact,
        identity_residual,
        complementary_slackness: s_dot_x.abs() < tolerance && z_dot_x.abs() < tolerance,
    })
}

pub(crate) fn masks(n: usize) -> impl Iterator<Item = Mask> {
    0..=full_mask(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::EpsilonChoice;
    use crate::rational::rat;

    fn pv(text: &str) -> ProbabilityVector {
        ProbabilityVector::parse(text).unwrap()
    }

    #[test]
    fn primal_single_edge() {
        let (a, b) = (pv("1/2"), pv("1/3"));
        let g = MeasuredBipartiteGraph::disjointness(&a, &b).unwrap();
        let w = build_primal(&g, &[1], &[1]).unwrap();
        assert!(w.feasible);
        assert_eq!(w.objective_sq, rat(1, 6));
        let full = build_primal(&g, &[0, 1], &[0, 1]).unwrap();
        assert!(!full.feasible);
        assert!(build_primal(&g, &[], &[1]).is_err());
    }

    #[test]
    fn graph_json() {
        let g = MeasuredBipartiteGraph::from_json(r#"{"left": 2, "right": 3, "edges": [[0, 1], [1, 2]]}"#).unwrap();
        assert_eq!(g.sizes(), (2, 3));
        assert!(g.adjacent(1, 2) && !g.adjacent(0, 0));
        assert_eq!(g.mu2()[0], rat(1, 3));
        assert!(MeasuredBipartiteGraph::from_json(r#"{"left": 1, "right": 1, "edges": [[0, 1]]}"#).is_err());
    }

    #[test]
    fn stars_have_zero_slackness() {
        let (a, b) = (pv("1/2,1/3,1/2"), pv("1/3,1/4,1/3"));
        let cert = DualCertificate::new(&a, &b, EpsilonChoice::Zero).unwrap();
        let g = MeasuredBipartiteGraph::disjointness(&a, &b).unwrap();
        let dual = GenericDualSolution::from_certificate(&cert).unwrap();
        let star = SubsetFamily::star(3, 1).unwrap();
        let w = build_primal_families(&g, &star, &star).unwrap();
        let r = weak_duality_audit(&g, &w, &dual, 1e-10).unwrap();
        assert!(r.complementary_slackness, "{r:?}");
        assert_eq!(r.gap_squared_exact, Some(rat(0, 1)));

        let small = SubsetFamily::from_sets(3, &[vec![1, 2]]).unwrap().up_closure();
        let w = build_primal_families(&g, &small, &star).unwrap();
        let r = weak_duality_audit(&g, &w, &dual, 1e-10).unwrap();
        assert!(r.gap > 0.0 && r.gap_squared_exact.unwrap() > rat(0, 1));
        assert!(r.identity_residual < 1e-12);
    }

    #[test]
    fn swapped_certificate_keeps_caller_order() {
        let (a, b) = (pv("1/4,1/5"), pv("1/3,1/5"));
        let e = crate::certificate::choose_small_epsilon2(&a, &b).unwrap();
        let cert = DualCertificate::new(&a, &b, EpsilonChoice::Value(e)).unwrap();
        assert!(cert.swapped() && cert.verify().feasible);
        let g = MeasuredBipartiteGraph::disjointness(&a, &b).unwrap();
        let dual = GenericDualSolution::from_certificate(&cert).unwrap();
        assert!(dual.z.amax() > 0.0);
        assert!(check_dual(&g, &dual, 1e-10).feasible);
        let star = SubsetFamily::star(2, 1).unwrap();
        let w = build_primal_families(&g, &star, &star).unwrap();
        assert!(weak_duality_audit(&g, &w, &dual, 1e-10).unwrap().complementary_slackness);
    }

    #[test]
    fn disjoint_members_cost_z() {
        let p = pv("1/3,1/3,1/3");
        let e = crate::certificate::choose_small_epsilon2(&p, &p).unwrap();
        let cert = DualCertificate::new(&p, &p, EpsilonChoice::Value(e)).unwrap();
        assert!(cert.eps1.is_positive());
        let g = MeasuredBipartiteGraph::disjointness(&p, &p).unwrap();
        let dual = GenericDualSolution::from_certificate(&cert).unwrap();
        let u1 = SubsetFamily::from_sets(3, &[vec![1], vec![2, 3]]).unwrap().up_closure();
        let u2 = SubsetFamily::from_sets(3, &[vec![1, 2], vec![1, 3]]).unwrap().up_closure();
        let w = build_primal_families(&g, &u1, &u2).unwrap();
        assert!(w.feasible);
        let r = weak_duality_audit(&g, &w, &dual, 1e-10).unwrap();
        assert!(r.z_dot_x > 1e-6);
    }
}
