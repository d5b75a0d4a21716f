//! Quivers, representations, weights and the subrepresentation lattice.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::numerics::{ExactMatrix, GaussRat, Subspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arcs: Vec<Arc>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
}

impl Quiver {
    /// Vertices by id and arcs as `(id, tail, head)` triples of ids.
    pub fn new<S: AsRef<str>>(vertices: &[S], arcs: &[(S, S, S)]) -> Result<Self> {
        let mut index = HashMap::new();
        let mut names = Vec::with_capacity(vertices.len());
        for v in vertices {
            let v = v.as_ref().to_string();
            if index.insert(v.clone(), names.len()).is_some() {
                return Err(Error::DuplicateId(v));
            }
            names.push(v);
        }
        let mut seen = HashMap::new();
        let mut out = Vec::with_capacity(arcs.len());
        for (id, t, h) in arcs {
            let id = id.as_ref().to_string();
            if seen.insert(id.clone(), ()).is_some() {
                return Err(Error::DuplicateId(id));
            }
            let tail = *index.get(t.as_ref()).ok_or_else(|| Error::DanglingVertex(t.as_ref().to_string()))?;
            let head = *index.get(h.as_ref()).ok_or_else(|| Error::DanglingVertex(h.as_ref().to_string()))?;
            out.push(Arc { id, tail, head });
        }
        Ok(Self::assemble(names, out))
    }

    /// Vertices named `1..=n`, arcs named `a1, a2, …` in the given order.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let names = (1..=n).map(|i| i.to_string()).collect();
        let arcs = edges
            .iter()
            .enumerate()
            .map(|(k, &(t, h))| {
                assert!(t < n && h < n, "edge endpoint out of range");
                Arc { id: format!("a{}", k + 1), tail: t, head: h }
            })
            .collect();
        Self::assemble(names, arcs)
    }

    fn assemble(vertices: Vec<String>, arcs: Vec<Arc>) -> Self {
        let n = vertices.len();
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        for (k, a) in arcs.iter().enumerate() {
            out_arcs[a.tail].push(k);
            in_arcs[a.head].push(k);
        }
        Quiver { vertices, arcs, out_arcs, in_arcs }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn arc_index(&self, id: &str) -> Option<usize> {
        self.arcs.iter().position(|a| a.id == id)
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, k: usize) -> &Arc {
        &self.arcs[k]
    }

    pub fn out_arcs(&self, i: usize) -> &[usize] {
        &self.out_arcs[i]
    }

    pub fn in_arcs(&self, i: usize) -> &[usize] {
        &self.in_arcs[i]
    }

    /// Same vertices, every arc reversed.
    pub fn opposite(&self) -> Quiver {
        let arcs = self.arcs.iter().map(|a| Arc { id: a.id.clone(), tail: a.head, head: a.tail }).collect();
        Self::assemble(self.vertices.clone(), arcs)
    }

    /// Subquiver on the same vertices keeping only the listed arcs.
    pub fn with_arcs(&self, keep: &[usize]) -> Quiver {
        let arcs = keep.iter().map(|&k| self.arcs[k].clone()).collect();
        Self::assemble(self.vertices.clone(), arcs)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    /// Kahn's algorithm; on failure the error carries a closed walk `v, …, v`.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.n_vertices();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.in_arcs[i].len()).collect();
        let mut stack: Vec<usize> = (0..n).rev().filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = stack.pop() {
            order.push(v);
            for &k in self.out_arcs[v].iter().rev() {
                let h = self.arcs[k].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    stack.push(h);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // every remaining vertex has an in-arc from another remaining vertex; walk backwards
        let remaining: Vec<bool> = (0..n).map(|i| indeg[i] > 0).collect();
        let start = (0..n).find(|&i| remaining[i]).expect("a vertex on a cycle");
        let mut pos = vec![usize::MAX; n];
        let mut walk = Vec::new();
        let mut v = start;
        while pos[v] == usize::MAX {
            pos[v] = walk.len();
            walk.push(v);
            let k = *self.in_arcs[v].iter().find(|&&k| remaining[self.arcs[k].tail]).expect("predecessor on cycle");
            v = self.arcs[k].tail;
        }
        let mut cycle: Vec<usize> = walk[pos[v]..].to_vec();
        cycle.reverse();
        cycle.push(cycle[0]);
        Err(Error::Cycle(cycle.iter().map(|&i| self.vertices[i].clone()).collect()))
    }
}

/// Dimension vector α.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimensionVector(pub Vec<usize>);

impl DimensionVector {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Integer weight σ on the vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight(vec![0; n])
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn plus(&self, i: usize) -> i64 {
        self.0[i].max(0)
    }

    pub fn minus(&self, i: usize) -> i64 {
        (-self.0[i]).max(0)
    }

    /// Q0⁺.
    pub fn positive_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] > 0).collect()
    }

    /// Q0⁻.
    pub fn negative_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] < 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&s| s == 0)
    }

    /// σ(d) = Σ σ(i)·d(i).
    pub fn eval(&self, d: &[usize]) -> i64 {
        self.0.iter().zip(d).map(|(&s, &x)| s * x as i64).sum()
    }

    /// N = σ⁺(α).
    pub fn positive_mass(&self, alpha: &DimensionVector) -> i64 {
        (0..self.len()).map(|i| self.plus(i) * alpha.get(i) as i64).sum()
    }

    pub fn negative_mass(&self, alpha: &DimensionVector) -> i64 {
        (0..self.len()).map(|i| self.minus(i) * alpha.get(i) as i64).sum()
    }

    pub fn negated(&self) -> Weight {
        Weight(self.0.iter().map(|s| -s).collect())
    }

    /// Largest bit length of |σ(i)|.
    pub fn max_bit_length(&self) -> u32 {
        self.0.iter().map(|s| 64 - s.unsigned_abs().leading_zeros()).max().unwrap_or(0)
    }
}

/// Slope data (σ, τ) with τ ≥ 0. `relaxed` allows τ(dimv W) = 0 on nonzero W.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slope {
    pub sigma: Weight,
    pub tau: Weight,
    pub relaxed: bool,
}

impl Slope {
    pub fn new(sigma: Weight, tau: Weight) -> Result<Self> {
        if sigma.len() != tau.len() {
            return Err(Error::Shape("sigma and tau have different lengths".into()));
        }
        if let Some(i) = tau.0.iter().position(|&t| t < 0) {
            return Err(Error::InvalidSlope(format!("tau({i}) = {} is negative", tau.0[i])));
        }
        Ok(Slope { sigma, tau, relaxed: false })
    }

    pub fn relaxed(mut self) -> Self {
        self.relaxed = true;
        self
    }

    /// True when every nonzero subrepresentation has τ(dimv W) > 0.
    pub fn strictly_monotone_on(&self, rep: &Representation) -> Result<bool> {
        let ceilings: Vec<Subspace> = (0..rep.quiver().n_vertices())
            .map(|i| if self.tau.get(i) == 0 { Subspace::full(rep.alpha().get(i)) } else { Subspace::zero(rep.alpha().get(i)) })
            .collect();
        Ok(interior_subrepresentation(rep, &ceilings)?.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    quiver: Quiver,
    alpha: DimensionVector,
    matrices: Vec<ExactMatrix>,
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub acyclic: bool,
}

impl Representation {
    pub fn new(quiver: Quiver, alpha: Vec<usize>, matrices: Vec<ExactMatrix>) -> Result<Self> {
        if alpha.len() != quiver.n_vertices() {
            return Err(Error::Shape(format!(
                "dimension vector has {} entries for {} vertices",
                alpha.len(),
                quiver.n_vertices()
            )));
        }
        if matrices.len() != quiver.n_arcs() {
            return Err(Error::Shape(format!("{} matrices for {} arcs", matrices.len(), quiver.n_arcs())));
        }
        for (a, m) in quiver.arcs().iter().zip(&matrices) {
            let want = (alpha[a.head], alpha[a.tail]);
            if m.shape() != want {
                return Err(Error::Shape(format!(
                    "arc `{}` carries a {}x{} matrix, expected {}x{}",
                    a.id,
                    m.rows(),
                    m.cols(),
                    want.0,
                    want.1
                )));
            }
        }
        Ok(Representation { quiver, alpha: DimensionVector(alpha), matrices })
    }

    /// Every arc carries the zero matrix.
    pub fn zero(quiver: Quiver, alpha: Vec<usize>) -> Self {
        let matrices = quiver.arcs().iter().map(|a| ExactMatrix::zeros(alpha[a.head], alpha[a.tail])).collect();
        Self::new(quiver, alpha, matrices).expect("zero representation shapes")
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn alpha(&self) -> &DimensionVector {
        &self.alpha
    }

    pub fn matrix(&self, arc: usize) -> &ExactMatrix {
        &self.matrices[arc]
    }

    pub fn matrices(&self) -> &[ExactMatrix] {
        &self.matrices
    }

    /// Vᵀ on the opposite quiver.
    pub fn transpose(&self) -> Representation {
        Representation {
            quiver: self.quiver.opposite(),
            alpha: self.alpha.clone(),
            matrices: self.matrices.iter().map(ExactMatrix::transpose).collect(),
        }
    }

    /// Arcs with nonzero matrices.
    pub fn support_arcs(&self) -> Vec<usize> {
        (0..self.quiver.n_arcs()).filter(|&k| !self.matrices[k].is_zero()).collect()
    }

    pub fn support_quiver(&self) -> Quiver {
        self.quiver.with_arcs(&self.support_arcs())
    }

    /// Same quiver and α, arcs kept only where listed.
    pub fn restrict_arcs(&self, keep: &[usize]) -> Representation {
        Representation {
            quiver: self.quiver.with_arcs(keep),
            alpha: self.alpha.clone(),
            matrices: keep.iter().map(|&k| self.matrices[k].clone()).collect(),
        }
    }

    pub fn max_bit_size(&self) -> u64 {
        self.matrices.iter().map(ExactMatrix::max_bit_size).max().unwrap_or(0)
    }
}

pub fn validate(rep: &Representation) -> Result<ValidationReport> {
    let q = rep.quiver();
    if rep.alpha().len() != q.n_vertices() {
        return Err(Error::Shape("dimension vector length".into()));
    }
    for (k, a) in q.arcs().iter().enumerate() {
        if a.tail >= q.n_vertices() || a.head >= q.n_vertices() {
            return Err(Error::DanglingVertex(a.id.clone()));
        }
        let m = rep.matrix(k);
        if m.shape() != (rep.alpha().get(a.head), rep.alpha().get(a.tail)) {
            return Err(Error::Shape(format!("arc `{}`", a.id)));
        }
    }
    Ok(ValidationReport { acyclic: q.is_acyclic() })
}

/// Per-vertex subspaces closed under the arc maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subrepresentation {
    spaces: Vec<Subspace>,
}

impl Subrepresentation {
    /// Validates closure under every arc map.
    pub fn new(rep: &Representation, spaces: Vec<Subspace>) -> Result<Self> {
        if !is_subrepresentation(rep, &spaces)? {
            return Err(Error::NotSubrepresentation("some V(a)W(ta) is not contained in W(ha)".into()));
        }
        Ok(Subrepresentation { spaces })
    }


    pub fn zero(rep: &Representation) -> Self {
        Subrepresentation { spaces: rep.alpha().as_slice().iter().map(|&d| Subspace::zero(d)).collect() }
    }

    pub fn full(rep: &Representation) -> Self {
        Subrepresentation { spaces: rep.alpha().as_slice().iter().map(|&d| Subspace::full(d)).collect() }
    }

    pub fn spaces(&self) -> &[Subspace] {
        &self.spaces
    }

    pub fn space(&self, i: usize) -> &Subspace {
        &self.spaces[i]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(Subspace::dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.spaces.iter().map(Subspace::dim).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.spaces.iter().all(Subspace::is_zero)
    }

    pub fn contains(&self, o: &Subrepresentation) -> bool {
        self.spaces.iter().zip(&o.spaces).all(|(a, b)| a.contains(b))
    }

    pub fn sum(&self, o: &Subrepresentation) -> Subrepresentation {
        Subrepresentation { spaces: self.spaces.iter().zip(&o.spaces).map(|(a, b)| a.sum(b)).collect() }
    }

    pub fn intersection(&self, o: &Subrepresentation) -> Subrepresentation {
        Subrepresentation { spaces: self.spaces.iter().zip(&o.spaces).map(|(a, b)| a.intersection(b)).collect() }
    }

    /// Per-vertex annihilators; a subrepresentation of the transposed representation.
    pub fn annihilator(&self) -> Subrepresentation {
        Subrepresentation { spaces: self.spaces.iter().map(Subspace::annihilator).collect() }
    }

    /// W as a representation in the stored bases.
    pub fn as_representation(&self, rep: &Representation) -> Result<Representation> {
        quotient_representation(rep, &Subrepresentation::zero(rep), self)
    }
}

fn check_spaces(rep: &Representation, spaces: &[Subspace]) -> Result<()> {
    if spaces.len() != rep.quiver().n_vertices() {
        return Err(Error::Shape(format!("{} subspaces for {} vertices", spaces.len(), rep.quiver().n_vertices())));
    }
    for (i, s) in spaces.iter().enumerate() {
        if s.ambient() != rep.alpha().get(i) {
            return Err(Error::Shape(format!(
                "subspace at vertex `{}` lives in dimension {}, expected {}",
                rep.quiver().vertex_name(i),
                s.ambient(),
                rep.alpha().get(i)
            )));
        }
    }
    Ok(())
}

/// True iff V(a)W(ta) ≤ W(ha) for every arc.
pub fn is_subrepresentation(rep: &Representation, spaces: &[Subspace]) -> Result<bool> {
    check_spaces(rep, spaces)?;
    for (k, a) in rep.quiver().arcs().iter().enumerate() {
        let img = spaces[a.tail].image_under(rep.matrix(k));
        if !spaces[a.head].contains(&img) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest subrepresentation containing the seeds.
pub fn closure_subrepresentation(rep: &Representation, seeds: &[Subspace]) -> Result<Subrepresentation> {
    check_spaces(rep, seeds)?;
    let order = rep.quiver().topological_order()?;
    let mut spaces = seeds.to_vec();
    for &i in &order {
        let mut w = spaces[i].clone();
        for &k in rep.quiver().in_arcs(i) {
            let t = rep.quiver().arc(k).tail;
            w = w.sum(&spaces[t].image_under(rep.matrix(k)));
        }
        spaces[i] = w;
    }
    Ok(Subrepresentation { spaces })
}

/// Largest subrepresentation contained in the ceilings.
pub fn interior_subrepresentation(rep: &Representation, ceilings: &[Subspace]) -> Result<Subrepresentation> {
    check_spaces(rep, ceilings)?;
    let order = rep.quiver().topological_order()?;
    let mut spaces = ceilings.to_vec();
    for &i in order.iter().rev() {
        let mut w = spaces[i].clone();
        for &k in rep.quiver().out_arcs(i) {
            if w.is_zero() {
                break;
            }
            let h = rep.quiver().arc(k).head;
            w = w.intersection(&Subspace::preimage(rep.matrix(k), &spaces[h]));
        }
        spaces[i] = w;
    }
    Ok(Subrepresentation { spaces })
}

/// σ(dimv W).
pub fn king_value(rep: &Representation, sigma: &Weight, w: &Subrepresentation) -> Result<i64> {
    if sigma.len() != rep.quiver().n_vertices() {
        return Err(Error::Shape("weight length".into()));
    }
    if !is_subrepresentation(rep, w.spaces())? {
        return Err(Error::NotSubrepresentation("king_value on an invalid subrepresentation".into()));
    }
    Ok(sigma.eval(&w.dims()))
}

/// The representation `upper / lower` in bases chosen as exact complements
/// of `lower(i)` inside `upper(i)`.
pub fn quotient_representation(
    rep: &Representation,
    lower: &Subrepresentation,
    upper: &Subrepresentation,
) -> Result<Representation> {
    let n = rep.quiver().n_vertices();
    let mut comps = Vec::with_capacity(n);
    let mut full_bases = Vec::with_capacity(n);
    for i in 0..n {
        if !upper.space(i).contains(lower.space(i)) {
            return Err(Error::NotSubrepresentation("quotient of non-nested subrepresentations".into()));
        }
        let c = upper.space(i).complement_of(lower.space(i));
        full_bases.push(lower.space(i).basis().hstack(&c));
        comps.push(c);
    }
    let mut mats = Vec::with_capacity(rep.quiver().n_arcs());
    for (k, a) in rep.quiver().arcs().iter().enumerate() {
        let img = rep.matrix(k).mul(&comps[a.tail]);
        let basis = &full_bases[a.head];
        let d_low = lower.space(a.head).dim();
        let coords = solve_in_basis(basis, &img)
            .ok_or_else(|| Error::NotSubrepresentation(format!("arc `{}` leaves the upper subrepresentation", a.id)))?;
        let keep: Vec<usize> = (d_low..basis.cols()).collect();
        mats.push(coords.select_rows(&keep));
    }
    let alpha: Vec<usize> = comps.iter().map(ExactMatrix::cols).collect();
    Representation::new(rep.quiver().clone(), alpha, mats)
}

/// Coordinates `x` with `basis · x = m`, for a basis of full column rank.
fn solve_in_basis(basis: &ExactMatrix, m: &ExactMatrix) -> Option<ExactMatrix> {
    let d = basis.cols();
    if d == 0 {
        return if m.is_zero() { Some(ExactMatrix::zeros(0, m.cols())) } else { None };
    }
    let (r, pivots) = basis.hstack(m).rref();
    if pivots.len() > d || pivots.iter().take(d).enumerate().any(|(k, &p)| k != p) {
        return None;
    }
    let rows: Vec<usize> = (0..d).collect();
    let cols: Vec<usize> = (d..d + m.cols()).collect();
    Some(r.select_rows(&rows).select_columns(&cols))
}

/// Kronecker-type helper: representation of `n` vertices and arbitrary edges with given matrices.
pub fn representation_from_edges(
    n: usize,
    alpha: Vec<usize>,
    edges: &[(usize, usize)],
    matrices: Vec<ExactMatrix>,
) -> Result<Representation> {
    Representation::new(Quiver::from_edges(n, edges), alpha, matrices)
}

/// α ≡ 1 representation with scalar arc values.
pub fn scalar_representation(n: usize, edges: &[(usize, usize)], values: &[GaussRat]) -> Representation {
    let mats = values.iter().map(|v| ExactMatrix::from_vec(1, 1, vec![v.clone()]).unwrap()).collect();
    representation_from_edges(n, vec![1; n], edges, mats).expect("scalar representation shapes")
}
