//! Rank-one representations: the digraph D[V], linear matroids, conditions
//! (K1), (F), (K2), submodular-flow feasibility, and the α ≡ 1 Gale oracle.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::lattice::{for_each_lower_set, max_weight_closure};
use crate::numerics::{ExactMatrix, GaussRat, Subspace};
use crate::quiver::{Quiver, Representation, Subrepresentation, Weight};

/// Representation with every arc map factored as `v_a · f_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneRep {
    base: Representation,
    /// Per arc: `(v_a ∈ ℂ^{α(ha)}, f_a ∈ (ℂ^{α(ta)})*)`.
    factors: Vec<(Vec<GaussRat>, Vec<GaussRat>)>,
}

impl RankOneRep {
    pub fn base(&self) -> &Representation {
        &self.base
    }

    pub fn v(&self, arc: usize) -> &[GaussRat] {
        &self.factors[arc].0
    }

    pub fn f(&self, arc: usize) -> &[GaussRat] {
        &self.factors[arc].1
    }

    /// Drops zero arcs (they impose nothing on subrepresentations) and factors the rest.
    pub fn from_support(rep: &Representation) -> Result<Self> {
        factorize_rank_one(&rep.restrict_arcs(&rep.support_arcs()))
    }
}

/// Exact `V(a) = v_a f_a` for every arc, or the first arc whose rank is not one.
pub fn factorize_rank_one(rep: &Representation) -> Result<RankOneRep> {
    let mut factors = Vec::with_capacity(rep.quiver().n_arcs());
    for (k, a) in rep.quiver().arcs().iter().enumerate() {
        let m = rep.matrix(k);
        if m.rank() != 1 {
            return Err(Error::NotRankOne(a.id.clone()));
        }
        let c = (0..m.cols()).find(|&c| (0..m.rows()).any(|r| !m.get(r, c).is_zero())).expect("nonzero column");
        let v = m.column(c);
        let r = v.iter().position(|x| !x.is_zero()).expect("nonzero entry");
        let f: Vec<GaussRat> = (0..m.cols()).map(|j| m.get(r, j) / &v[r]).collect();
        debug_assert_eq!(ExactMatrix::column_vector(&v).mul(&ExactMatrix::row_vector(&f)), *m);
        factors.push((v, f));
    }
    Ok(RankOneRep { base: rep.clone(), factors })
}

fn dot(f: &[GaussRat], v: &[GaussRat]) -> GaussRat {
    let mut acc = GaussRat::zero();
    for (a, b) in f.iter().zip(v) {
        if !a.is_zero() && !b.is_zero() {
            acc += &(a * b);
        }
    }
    acc
}

/// Node of D[V].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DvNode {
    /// f_a, an element of S⁺ at the tail of `a`.
    F(usize),
    /// v_a, an element of S⁻ at the head of `a`.
    V(usize),
}

/// D[V]: nodes `F(a)` at index `2a` and `V(a)` at `2a+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DvGraph {
    pub nodes: Vec<DvNode>,
    pub succ: Vec<Vec<usize>>,
}

impl DvGraph {
    pub fn node_index(node: DvNode) -> usize {
        match node {
            DvNode::F(a) => 2 * a,
            DvNode::V(a) => 2 * a + 1,
        }
    }

    pub fn arcs(&self) -> Vec<(DvNode, DvNode)> {
        self.succ.iter().enumerate().flat_map(|(u, s)| s.iter().map(move |&w| (u, w))).map(|(u, w)| (self.nodes[u], self.nodes[w])).collect()
    }
}

/// Arcs `f_a → v_a` for every arc, and `v_a → f_b` when `ha = tb` and `f_b(v_a) ≠ 0`.
pub fn build_dv_graph(r1: &RankOneRep) -> DvGraph {
    let q = r1.base.quiver();
    let m = q.n_arcs();
    let nodes = (0..m).flat_map(|a| [DvNode::F(a), DvNode::V(a)]).collect();
    let mut succ = vec![Vec::new(); 2 * m];
    for a in 0..m {
        succ[2 * a].push(2 * a + 1);
        for &b in q.out_arcs(q.arc(a).head) {
            if !dot(r1.f(b), r1.v(a)).is_zero() {
                succ[2 * a + 1].push(2 * b);
            }
        }
    }
    DvGraph { nodes, succ }
}

/// Linear matroid on an ordered multiset of exact vectors, with a rank cache.
#[derive(Debug)]
pub struct LinearMatroid {
    dim: usize,
    ground: Vec<Vec<GaussRat>>,
    cache: Mutex<HashMap<Vec<usize>, usize>>,
}

impl Clone for LinearMatroid {
    fn clone(&self) -> Self {
        LinearMatroid { dim: self.dim, ground: self.ground.clone(), cache: Mutex::new(HashMap::new()) }
    }
}

impl LinearMatroid {
    pub fn new(dim: usize, ground: Vec<Vec<GaussRat>>) -> Result<Self> {
        if let Some(v) = ground.iter().find(|v| v.len() != dim) {
            return Err(Error::Shape(format!("matroid vector of length {} in dimension {dim}", v.len())));
        }
        Ok(LinearMatroid { dim, ground, cache: Mutex::new(HashMap::new()) })
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn element(&self, k: usize) -> &[GaussRat] {
        &self.ground[k]
    }

    /// dim span of the selected elements.
    pub fn rank(&self, subset: &[usize]) -> Result<usize> {
        if let Some(&k) = subset.iter().find(|&&k| k >= self.ground.len()) {
            return Err(Error::OutOfRange(format!("element {k} of a {}-element matroid", self.ground.len())));
        }
        let mut key = subset.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.is_empty() {
            return Ok(0);
        }
        if let Some(&r) = self.cache.lock().expect("matroid cache").get(&key) {
            return Ok(r);
        }
        let cols: Vec<Vec<GaussRat>> = key.iter().map(|&k| self.ground[k].clone()).collect();
        let r = ExactMatrix::from_columns(&cols, self.dim)?.rank();
        self.cache.lock().expect("matroid cache").insert(key, r);
        Ok(r)
    }

    pub fn full_rank(&self) -> usize {
        self.rank(&(0..self.len()).collect::<Vec<_>>()).expect("in range")
    }
}

pub fn matroid_rank(m: &LinearMatroid, subset: &[usize]) -> Result<usize> {
    m.rank(subset)
}

/// Per-vertex matroids 𝐌ᵢ⁺ (f_a, a ∈ Out(i)) and 𝐌ᵢ⁻ (v_a, a ∈ In(i)).
pub struct VertexMatroids {
    pub plus: Vec<LinearMatroid>,
    pub minus: Vec<LinearMatroid>,
    /// Arc ids of the ground elements, in matroid order.
    pub plus_arcs: Vec<Vec<usize>>,
    pub minus_arcs: Vec<Vec<usize>>,
}

pub fn vertex_matroids(r1: &RankOneRep) -> VertexMatroids {
    let q = r1.base.quiver();
    let alpha = r1.base.alpha();
    let mut out = VertexMatroids { plus: Vec::new(), minus: Vec::new(), plus_arcs: Vec::new(), minus_arcs: Vec::new() };
    for i in 0..q.n_vertices() {
        let oa = q.out_arcs(i).to_vec();
        let ia = q.in_arcs(i).to_vec();
        out.plus.push(LinearMatroid::new(alpha.get(i), oa.iter().map(|&a| r1.f(a).to_vec()).collect()).expect("shape"));
        out.minus.push(LinearMatroid::new(alpha.get(i), ia.iter().map(|&a| r1.v(a).to_vec()).collect()).expect("shape"));
        out.plus_arcs.push(oa);
        out.minus_arcs.push(ia);
    }
    out
}

/// Result of the (K1) and (F) checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct K1F {
    pub k1: bool,
    pub f: bool,
    /// Σ = Σᵢ σ⁺(i)·dim V(i).
    pub sigma_total: i64,
}

pub fn check_k1_f(r1: &RankOneRep, sigma: &Weight) -> Result<K1F> {
    check_weight(r1, sigma)?;
    let alpha = r1.base.alpha();
    let sigma_total = sigma.positive_mass(alpha);
    let k1 = sigma_total == sigma.negative_mass(alpha);
    let mats = vertex_matroids(r1);
    let f = (0..alpha.len()).all(|i| {
        (sigma.get(i) <= 0 || mats.plus[i].full_rank() == alpha.get(i))
            && (sigma.get(i) >= 0 || mats.minus[i].full_rank() == alpha.get(i))
    });
    Ok(K1F { k1, f, sigma_total })
}

fn check_weight(r1: &RankOneRep, sigma: &Weight) -> Result<()> {
    if sigma.len() != r1.base.quiver().n_vertices() {
        return Err(Error::Shape(format!("weight has {} entries for {} vertices", sigma.len(), r1.base.quiver().n_vertices())));
    }
    Ok(())
}

/// Memoized evaluation of Σᵢ σ⁺(i)·rᵢ⁺(Sᵢ⁺∖X) + σ⁻(i)·rᵢ⁻(Sᵢ⁻∩X) over D[V] membership vectors.
struct K2Objective {
    mats: VertexMatroids,
    sigma: Weight,
}

impl K2Objective {
    fn new(r1: &RankOneRep, sigma: &Weight) -> Self {
        K2Objective { mats: vertex_matroids(r1), sigma: sigma.clone() }
    }

    fn plus_rank_outside(&self, i: usize, x: &[bool]) -> usize {
        let sel: Vec<usize> = self.mats.plus_arcs[i]
            .iter()
            .enumerate()
            .filter(|(_, &a)| !x[DvGraph::node_index(DvNode::F(a))])
            .map(|(k, _)| k)
            .collect();
        self.mats.plus[i].rank(&sel).expect("in range")
    }

    fn minus_rank_inside(&self, i: usize, x: &[bool]) -> usize {
        let sel: Vec<usize> = self.mats.minus_arcs[i]
            .iter()
            .enumerate()
            .filter(|(_, &a)| x[DvGraph::node_index(DvNode::V(a))])
            .map(|(k, _)| k)
            .collect();
        self.mats.minus[i].rank(&sel).expect("in range")
    }

    fn lhs(&self, x: &[bool]) -> i64 {
        (0..self.sigma.len())
            .map(|i| {
                let mut v = 0;
                if self.sigma.get(i) > 0 {
                    v += self.sigma.plus(i) * self.plus_rank_outside(i, x) as i64;
                }
                if self.sigma.get(i) < 0 {
                    v += self.sigma.minus(i) * self.minus_rank_inside(i, x) as i64;
                }
                v
            })
            .sum()
    }
}

/// Outcome of the (K2) sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K2Result {
    pub holds: bool,
    /// Minimum of the left-hand side over lower sets.
    pub min_lhs: i64,
    /// A violating lower set (D[V] nodes), when (K2) fails.
    pub witness: Option<Vec<DvNode>>,
}

fn members(g: &DvGraph, x: &[bool]) -> Vec<DvNode> {
    (0..x.len()).filter(|&k| x[k]).map(|k| g.nodes[k]).collect()
}

/// (K2): min over lower sets X of D[V] of the rank expression is at least Σ.
pub fn check_k2(r1: &RankOneRep, sigma: &Weight, limit: usize) -> Result<K2Result> {
    check_weight(r1, sigma)?;
    let g = build_dv_graph(r1);
    let obj = K2Objective::new(r1, sigma);
    let total = sigma.positive_mass(r1.base.alpha());
    let mut best: Option<(i64, Vec<bool>)> = None;
    for_each_lower_set(&g.succ, limit, |x| {
        let v = obj.lhs(x);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, x.to_vec()));
        }
    })?;
    let (min_lhs, arg) = best.expect("the empty set is a lower set");
    let holds = min_lhs >= total;
    Ok(K2Result { holds, min_lhs, witness: (!holds).then(|| members(&g, &arg)) })
}

/// (K1) ∧ (F) ∧ (K2).
pub fn decide_rank_one_ss(r1: &RankOneRep, sigma: &Weight, limit: usize) -> Result<bool> {
    let kf = check_k1_f(r1, sigma)?;
    if !kf.k1 || !kf.f {
        return Ok(false);
    }
    Ok(check_k2(r1, sigma, limit)?.holds)
}

/// The subrepresentation attached to a lower set X of D[V]:
/// W(i) = ∩{ker f_b : f_b ∈ Sᵢ⁺∖X} when σ(i) ≥ 0, span{v_a : v_a ∈ Sᵢ⁻∩X} otherwise.
pub fn subrep_of_lower_set(r1: &RankOneRep, sigma: &Weight, x: &[bool]) -> Result<Subrepresentation> {
    let q = r1.base.quiver();
    let alpha = r1.base.alpha();
    let spaces = (0..q.n_vertices())
        .map(|i| {
            if sigma.get(i) >= 0 {
                let rows: Vec<Vec<GaussRat>> = q
                    .out_arcs(i)
                    .iter()
                    .filter(|&&b| !x[DvGraph::node_index(DvNode::F(b))])
                    .map(|&b| r1.f(b).to_vec())
                    .collect();
                let m = ExactMatrix::from_rows(rows, alpha.get(i)).expect("shape");
                Subspace::span(&m.kernel())
            } else {
                let cols: Vec<Vec<GaussRat>> = q
                    .in_arcs(i)
                    .iter()
                    .filter(|&&a| x[DvGraph::node_index(DvNode::V(a))])
                    .map(|&a| r1.v(a).to_vec())
                    .collect();
                Subspace::from_vectors(alpha.get(i), &cols).expect("shape")
            }
        })
        .collect();
    Subrepresentation::new(&r1.base, spaces)
}

/// Submodular function handle on membership vectors over the digraph's nodes.
pub type SetFunction = Arc<dyn Fn(&[bool]) -> i64 + Send + Sync>;

/// Submodular flow instance with capacities c̄ ≡ +∞ and c̲ ≡ 0.
#[derive(Clone)]
pub struct SubflowInstance {
    pub succ: Vec<Vec<usize>>,
    pub f: SetFunction,
}

impl SubflowInstance {
    /// (D[V], ∞, 0, f_V) with f_V(Y) = Σᵢ σ⁺(i)rᵢ⁺(Sᵢ⁺∩Y) + σ⁻(i)rᵢ⁻(Sᵢ⁻∖Y) − Σ.
    pub fn from_rank_one(r1: &RankOneRep, sigma: &Weight) -> Result<Self> {
        check_weight(r1, sigma)?;
        let g = build_dv_graph(r1);
        let obj = Arc::new(K2Objective::new(r1, sigma));
        let total = sigma.positive_mass(r1.base.alpha());
        let f: SetFunction = Arc::new(move |y: &[bool]| {
            let comp: Vec<bool> = y.iter().map(|b| !b).collect();
            obj.lhs(&comp) - total
        });
        Ok(SubflowInstance { succ: g.succ, f })
    }
}

/// Frank's condition with infinite upper capacities: f(S∖X) ≥ 0 for every lower set X.
/// Returns a violating X when infeasible.
pub fn submodular_flow_feasible(inst: &SubflowInstance, limit: usize) -> Result<(bool, Option<Vec<usize>>)> {
    let mut witness = None;
    for_each_lower_set(&inst.succ, limit, |x| {
        if witness.is_some() {
            return;
        }
        let comp: Vec<bool> = x.iter().map(|b| !b).collect();
        if (inst.f)(&comp) < 0 {
            witness = Some((0..x.len()).filter(|&k| x[k]).collect());
        }
    })?;
    Ok((witness.is_none(), witness))
}

/// Outcome of the Gale check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaleResult {
    pub feasible: bool,
    pub total: i64,
    /// max σ(X) over lower sets X of the support quiver.
    pub max_lower: i64,
    /// An inclusion-minimal lower set attaining `max_lower` when it is positive.
    pub witness: Option<Vec<usize>>,
}

/// σ(Q0) = 0 and σ(X) ≤ 0 for every lower set X of `support`.
pub fn gale_feasible(support: &Quiver, sigma: &Weight) -> Result<GaleResult> {
    if sigma.len() != support.n_vertices() {
        return Err(Error::Shape("weight length".into()));
    }
    let succ: Vec<Vec<usize>> =
        (0..support.n_vertices()).map(|i| support.out_arcs(i).iter().map(|&k| support.arc(k).head).collect()).collect();
    let (max_lower, minimal) = max_weight_closure(&succ, sigma.as_slice());
    let total: i64 = sigma.as_slice().iter().sum();
    let witness = (max_lower > 0).then(|| (0..minimal.len()).filter(|&i| minimal[i]).collect());
    Ok(GaleResult { feasible: total == 0 && max_lower <= 0, total, max_lower, witness })
}
