//! GL(α)-semistability of arbitrary quivers through trace polynomials of the
//! symbolic adjacency matrix, tested by a deterministic noncommutative ABP
//! identity test over ℚ(i).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::{ExactMatrix, GaussRat, Subspace};
use crate::quiver::Representation;

/// Affine form c₀ + Σ c_x·x over noncommuting symbols.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearForm {
    pub constant: GaussRat,
    /// Nonzero coefficients, sorted by symbol.
    pub coeffs: Vec<(usize, GaussRat)>,
}

impl LinearForm {
    pub fn constant(c: GaussRat) -> Self {
        LinearForm { constant: c, coeffs: Vec::new() }
    }

    pub fn symbol(x: usize, c: GaussRat) -> Self {
        let coeffs = if c.is_zero() { Vec::new() } else { vec![(x, c)] };
        LinearForm { constant: GaussRat::zero(), coeffs }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, GaussRat)>) -> Self {
        let mut m: BTreeMap<usize, GaussRat> = BTreeMap::new();
        for (x, c) in terms {
            *m.entry(x).or_insert_with(GaussRat::zero) += &c;
        }
        LinearForm { constant: GaussRat::zero(), coeffs: m.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }

    pub fn coeff(&self, x: usize) -> Option<&GaussRat> {
        self.coeffs.binary_search_by_key(&x, |t| t.0).ok().map(|k| &self.coeffs[k].1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbpEdge {
    pub from: usize,
    pub to: usize,
    pub label: LinearForm,
}

/// Layered branching program: `edges[l]` joins layer l to layer l + 1, with
/// node indices local to each layer. Layers 0 and d are the source and sink.
#[derive(Clone, Debug, PartialEq)]
pub struct Abp {
    pub n_symbols: usize,
    pub layers: Vec<usize>,
    pub edges: Vec<Vec<AbpEdge>>,
}

impl Abp {
    pub fn size(&self) -> usize {
        self.layers.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.layers.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.layers.len();
        if d < 2 || self.layers[0] != 1 || self.layers[d - 1] != 1 {
            return Err(Error::MalformedAbp("need singleton source and sink layers".into()));
        }
        if self.edges.len() != d - 1 {
            return Err(Error::MalformedAbp(format!("{} edge layers for {d} node layers", self.edges.len())));
        }
        for (l, es) in self.edges.iter().enumerate() {
            for e in es {
                if e.from >= self.layers[l] || e.to >= self.layers[l + 1] {
                    return Err(Error::MalformedAbp(format!("edge {}->{} out of range at layer {l}", e.from, e.to)));
                }
                if e.label.coeffs.iter().any(|(x, _)| *x >= self.n_symbols) {
                    return Err(Error::MalformedAbp(format!("unknown symbol at layer {l}")));
                }
            }
        }
        Ok(())
    }

    fn is_homogeneous(&self) -> bool {
        self.edges.iter().flatten().all(|e| e.label.constant.is_zero())
    }
}

/// Incrementally reduced row basis.
#[derive(Default)]
struct Span {
    rows: Vec<(usize, Vec<GaussRat>)>,
}

impl Span {
    fn insert(&mut self, mut v: Vec<GaussRat>) -> bool {
        for (p, r) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (a, b) in v.iter_mut().zip(r) {
                    if !b.is_zero() {
                        *a -= &(b * &f);
                    }
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { return false };
        let inv = v[p].inv();
        for a in v.iter_mut() {
            *a *= &inv;
        }
        self.rows.push((p, v));
        true
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    fn vectors(self) -> Vec<Vec<GaussRat>> {
        self.rows.into_iter().map(|r| r.1).collect()
    }
}

type SparseLayer = BTreeMap<usize, Vec<(usize, usize, GaussRat)>>;

/// Per edge layer and symbol: sparse (from, to, coefficient) triples.
fn symbol_maps(abp: &Abp) -> Vec<SparseLayer> {
    abp.edges
        .iter()
        .map(|es| {
            let mut m: SparseLayer = BTreeMap::new();
            for e in es {
                for (x, c) in &e.label.coeffs {
                    m.entry(*x).or_default().push((e.from, e.to, c.clone()));
                }
            }
            m
        })
        .collect()
}

/// Raz–Shpilka sweep: a basis of the coefficient vectors of all monomials at
/// each layer, over exact Gaussian rationals.
fn homogeneous_is_zero(abp: &Abp) -> bool {
    let maps = symbol_maps(abp);
    let mut basis = vec![vec![GaussRat::one()]];
    for (l, m) in maps.iter().enumerate() {
        let width = abp.layers[l + 1];
        let mut next = Span::default();
        'fill: for b in &basis {
            for trip in m.values() {
                let mut v = vec![GaussRat::zero(); width];
                for (u, w, c) in trip {
                    if !b[*u].is_zero() {
                        v[*w] += &(&b[*u] * c);
                    }
                }
                next.insert(v);
                if next.len() == width {
                    break 'fill;
                }
            }
        }
        if next.len() == 0 {
            return true;
        }
        basis = next.vectors();
    }
    basis.iter().all(|b| b[0].is_zero())
}

/// Affine labels: constant edges are folded into a transitive closure T, and
/// monomials of degree e have coefficient rows in span{e_src T (X_x T)^e}.
fn affine_is_zero(abp: &Abp) -> bool {
    let offsets: Vec<usize> = abp.layers.iter().scan(0, |s, &n| { let o = *s; *s += n; Some(o) }).collect();
    let total = abp.size();
    let sink = total - 1;
    let mut consts: Vec<Vec<(usize, GaussRat)>> = vec![Vec::new(); total];
    let mut syms: BTreeMap<usize, Vec<(usize, usize, GaussRat)>> = BTreeMap::new();
    for (l, es) in abp.edges.iter().enumerate() {
        for e in es {
            let (u, w) = (offsets[l] + e.from, offsets[l + 1] + e.to);
            if !e.label.constant.is_zero() {
                consts[u].push((w, e.label.constant.clone()));
            }
            for (x, c) in &e.label.coeffs {
                syms.entry(*x).or_default().push((u, w, c.clone()));
            }
        }
    }
    // nodes are numbered layer by layer, so one forward pass applies T
    let close = |mut v: Vec<GaussRat>| {
        for u in 0..total {
            if v[u].is_zero() {
                continue;
            }
            let vu = v[u].clone();
            for (w, c) in &consts[u] {
                v[*w] += &(&vu * c);
            }
        }
        v
    };
    let mut start = vec![GaussRat::zero(); total];
    start[0] = GaussRat::one();
    let mut basis = vec![close(start)];
    for _ in 0..=abp.depth() {
        if basis.iter().any(|b| !b[sink].is_zero()) {
            return false;
        }
        let mut next = Span::default();
        for b in &basis {
            for trip in syms.values() {
                let mut v = vec![GaussRat::zero(); total];
                for (u, w, c) in trip {
                    if !b[*u].is_zero() {
                        v[*w] += &(&b[*u] * c);
                    }
                }
                next.insert(close(v));
            }
        }
        if next.len() == 0 {
            return true;
        }
        basis = next.vectors();
    }
    true
}

/// Whether the noncommutative polynomial computed by the ABP is identically zero.
pub fn abp_is_zero(abp: &Abp) -> Result<bool> {
    abp.validate()?;
    Ok(if abp.is_homogeneous() { homogeneous_is_zero(abp) } else { affine_is_zero(abp) })
}

/// Keeps, per ordered vertex pair, parallel arcs whose matrices form a basis of their span.
pub fn reduce_arcs(rep: &Representation) -> Representation {
    let q = rep.quiver();
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, a) in q.arcs().iter().enumerate() {
        groups.entry((a.tail, a.head)).or_default().push(k);
    }
    let mut keep = Vec::new();
    for ((t, h), arcs) in groups {
        let mut span = Subspace::zero(rep.alpha().get(t) * rep.alpha().get(h));
        for k in arcs {
            let v = rep.matrix(k).entries().to_vec();
            if span.contains_vector(&v) {
                continue;
            }
            span = span.sum(&Subspace::span(&ExactMatrix::column_vector(&v)));
            keep.push(k);
        }
    }
    keep.sort_unstable();
    rep.restrict_arcs(&keep)
}

/// Block matrix A with (i, j) block Σ_{a: j → i} x_a V(a), in global coordinates.
#[derive(Clone, Debug)]
pub struct SymbolicAdjacency {
    size: usize,
    n_symbols: usize,
    entries: BTreeMap<(usize, usize), LinearForm>,
}

impl SymbolicAdjacency {
    pub fn new(rep: &Representation) -> Self {
        let alpha = rep.alpha().as_slice();
        let offsets: Vec<usize> = alpha.iter().scan(0, |s, &n| { let o = *s; *s += n; Some(o) }).collect();
        let mut terms: BTreeMap<(usize, usize), Vec<(usize, GaussRat)>> = BTreeMap::new();
        for (k, a) in rep.quiver().arcs().iter().enumerate() {
            let m = rep.matrix(k);
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if !m.get(r, c).is_zero() {
                        terms.entry((offsets[a.head] + r, offsets[a.tail] + c)).or_default().push((k, m.get(r, c).clone()));
                    }
                }
            }
        }
        let entries = terms.into_iter().map(|(pq, t)| (pq, LinearForm::from_terms(t))).filter(|(_, f)| !f.is_zero()).collect();
        SymbolicAdjacency { size: alpha.iter().sum(), n_symbols: rep.quiver().n_arcs(), entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, p: usize, q: usize) -> LinearForm {
        self.entries.get(&(p, q)).cloned().unwrap_or_default()
    }

    fn nonzero(&self) -> impl Iterator<Item = (&(usize, usize), &LinearForm)> {
        self.entries.iter()
    }
}

fn check_power(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n * n {
        return Err(Error::OutOfRange(format!("trace power {k} outside [1, {}]", n * n)));
    }
    Ok(())
}

/// ABP for tr A^k: layer l (0 < l < k) has nodes (p, q) computing (A^l)_{pq};
/// the last edge layer closes (p, q) with A_{qp}.
pub fn build_abp_for_trace_power(rep: &Representation, k: usize) -> Result<Abp> {
    let adj = SymbolicAdjacency::new(rep);
    let n = adj.size();
    check_power(n, k)?;
    let node = |p: usize, q: usize| p * n + q;
    let mut layers = vec![1];
    let mut edges = Vec::with_capacity(k);
    if k == 1 {
        let diag = LinearForm::from_terms((0..n).flat_map(|p| adj.entry(p, p).coeffs));
        edges.push(vec![AbpEdge { from: 0, to: 0, label: diag }]);
    } else {
        edges.push(adj.nonzero().map(|(&(p, q), f)| AbpEdge { from: 0, to: node(p, q), label: f.clone() }).collect());
        for _ in 1..k - 1 {
            layers.push(n * n);
            let mut es = Vec::new();
            for p in 0..n {
                for (&(q, r), f) in adj.nonzero() {
                    es.push(AbpEdge { from: node(p, q), to: node(p, r), label: f.clone() });
                }
            }
            edges.push(es);
        }
        layers.push(n * n);
        edges.push(adj.nonzero().map(|(&(q, p), f)| AbpEdge { from: node(p, q), to: 0, label: f.clone() }).collect());
    }
    layers.push(1);
    Ok(Abp { n_symbols: adj.n_symbols, layers, edges })
}

/// Single ABP for Σ_{k=1}^{K} tr A^k with K = α(Q0)², joining the partial
/// powers through a chain of collector nodes with label 1.
pub fn build_aggregate_abp(rep: &Representation) -> Result<Abp> {
    let adj = SymbolicAdjacency::new(rep);
    let n = adj.size();
    if n == 0 {
        return Err(Error::EmptyInput("α(Q0) = 0".into()));
    }
    let big_k = n * n;
    if big_k == 1 {
        return build_abp_for_trace_power(rep, 1);
    }
    let node = |p: usize, q: usize| p * n + q;
    let collector = n * n;
    let one = LinearForm::constant(GaussRat::one());
    let diag = LinearForm::from_terms((0..n).flat_map(|p| adj.entry(p, p).coeffs));
    let mut layers = vec![1];
    let mut edges = Vec::with_capacity(big_k);
    let mut first: Vec<AbpEdge> = adj.nonzero().map(|(&(p, q), f)| AbpEdge { from: 0, to: node(p, q), label: f.clone() }).collect();
    first.push(AbpEdge { from: 0, to: collector, label: diag });
    edges.push(first);
    for l in 1..big_k {
        layers.push(n * n + 1);
        let last = l + 1 == big_k;
        let target_collector = if last { 0 } else { collector };
        let mut es = Vec::new();
        for (&(q, p), f) in adj.nonzero() {
            es.push(AbpEdge { from: node(p, q), to: target_collector, label: f.clone() });
        }
        es.push(AbpEdge { from: collector, to: target_collector, label: one.clone() });
        if !last {
            for p in 0..n {
                for (&(q, r), f) in adj.nonzero() {
                    es.push(AbpEdge { from: node(p, q), to: node(p, r), label: f.clone() });
                }
            }
        }
        edges.push(es);
    }
    layers.push(1);
    Ok(Abp { n_symbols: adj.n_symbols, layers, edges })
}

/// GL(α)-semistability: some tr A^k with 1 ≤ k ≤ α(Q0)² is a nonzero polynomial.
pub fn decide_gl_semistable(rep: &Representation) -> Result<bool> {
    let red = reduce_arcs(rep);
    let n: usize = red.alpha().total();
    for k in 1..=n * n {
        if !abp_is_zero(&build_abp_for_trace_power(&red, k)?)? {
            return Ok(true);
        }
    }
    Ok(false)
}
