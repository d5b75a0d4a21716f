//! The path-aggregating completely positive map Φ_V, its dual, and scaling of
//! a representation by block matrices.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{CMat, HermitianFloat};
use crate::quiver::{Quiver, Representation};

/// Square blocks indexed by vertex.
pub type BlockDiag = BTreeMap<usize, CMat>;

/// Hermitian PSD blocks indexed by vertex.
pub type Marginal = BTreeMap<usize, HermitianFloat>;

/// A representation with double-precision arc matrices.
#[derive(Clone, Debug)]
pub struct FloatRep {
    pub(crate) tails: Vec<usize>,
    pub(crate) heads: Vec<usize>,
    pub(crate) alpha: Vec<usize>,
    pub(crate) mats: Vec<CMat>,
    pub(crate) order: Vec<usize>,
    pub(crate) out_arcs: Vec<Vec<usize>>,
    pub(crate) in_arcs: Vec<Vec<usize>>,
}

impl FloatRep {
    pub fn from_exact(rep: &Representation) -> Result<Self> {
        let q = rep.quiver();
        let order = q.topological_order()?;
        Ok(FloatRep {
            tails: q.arcs().iter().map(|a| a.tail).collect(),
            heads: q.arcs().iter().map(|a| a.head).collect(),
            alpha: rep.alpha().as_slice().to_vec(),
            mats: rep.matrices().iter().map(|m| m.to_float()).collect(),
            order,
            out_arcs: (0..q.n_vertices()).map(|i| q.out_arcs(i).to_vec()).collect(),
            in_arcs: (0..q.n_vertices()).map(|i| q.in_arcs(i).to_vec()).collect(),
        })
    }

    pub fn matrix(&self, arc: usize) -> &CMat {
        &self.mats[arc]
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.mats
    }

    pub fn n_vertices(&self) -> usize {
        self.alpha.len()
    }

    /// Forward sweep: returns the accumulated block at every vertex.
    pub(crate) fn sweep(&self, init: &[Option<&CMat>]) -> Vec<CMat> {
        let mut acc: Vec<CMat> = (0..self.n_vertices())
            .map(|i| match init[i] {
                Some(x) => x.clone(),
                None => CMat::zeros(self.alpha[i], self.alpha[i]),
            })
            .collect();
        for &i in &self.order {
            for &k in &self.in_arcs[i] {
                let t = self.tails[k];
                let (src, dst) = two_mut(&mut acc, t, i);
                dst.add_congruence(&self.mats[k], src);
            }
        }
        acc
    }

    /// Reverse sweep for the dual map.
    pub(crate) fn dual_sweep(&self, init: &[Option<&CMat>]) -> Vec<CMat> {
        let mut acc: Vec<CMat> = (0..self.n_vertices())
            .map(|i| match init[i] {
                Some(y) => y.clone(),
                None => CMat::zeros(self.alpha[i], self.alpha[i]),
            })
            .collect();
        for &i in self.order.iter().rev() {
            for &k in &self.out_arcs[i] {
                let h = self.heads[k];
                let (src, dst) = two_mut(&mut acc, h, i);
                dst.add_dual_congruence(&self.mats[k], src);
            }
        }
        acc
    }

    /// Replaces the frame at vertex `i` by `G`: in-arcs become `G·V(a)`,
    /// out-arcs become `V(a)·G⁻¹`. Self-loops are impossible on acyclic quivers.
    pub(crate) fn act(&mut self, i: usize, g: &CMat, g_inv: &CMat) {
        for &k in &self.in_arcs[i] {
            self.mats[k] = g.mul(&self.mats[k]);
        }
        for &k in &self.out_arcs[i] {
            self.mats[k] = self.mats[k].mul(g_inv);
        }
    }
}

fn two_mut(v: &mut [CMat], src: usize, dst: usize) -> (&CMat, &mut CMat) {
    assert_ne!(src, dst, "self-loop in an acyclic sweep");
    if src < dst {
        let (a, b) = v.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = v.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}

fn check_blocks(rep: &Representation, blocks: &BTreeMap<usize, HermitianFloat>) -> Result<()> {
    for (&i, b) in blocks {
        if i >= rep.quiver().n_vertices() {
            return Err(Error::DanglingVertex(i.to_string()));
        }
        if b.dim() != rep.alpha().get(i) {
            return Err(Error::Shape(format!(
                "block at vertex `{}` is {}x{0}, expected {}",
                rep.quiver().vertex_name(i),
                b.dim(),
                rep.alpha().get(i)
            )));
        }
    }
    Ok(())
}

fn collect(acc: Vec<CMat>, targets: &[usize]) -> Marginal {
    targets.iter().map(|&t| (t, HermitianFloat::symmetrized(&acc[t]))).collect()
}

/// (Φ_V(X))_t = Σ over s–t paths P of V(P)·X_s·V(P)†, for the source blocks
/// given in `x` and the requested target vertices.
pub fn apply_phi(rep: &Representation, x: &Marginal, targets: &[usize]) -> Result<Marginal> {
    check_blocks(rep, x)?;
    let f = FloatRep::from_exact(rep)?;
    let init: Vec<Option<&CMat>> = (0..f.n_vertices()).map(|i| x.get(&i).map(HermitianFloat::matrix)).collect();
    Ok(collect(f.sweep(&init), targets))
}

/// (Φ*_V(Y))_s = Σ over s–t paths P of V(P)†·Y_t·V(P).
pub fn apply_phi_dual(rep: &Representation, y: &Marginal, targets: &[usize]) -> Result<Marginal> {
    check_blocks(rep, y)?;
    let f = FloatRep::from_exact(rep)?;
    let init: Vec<Option<&CMat>> = (0..f.n_vertices()).map(|i| y.get(&i).map(HermitianFloat::matrix)).collect();
    Ok(collect(f.dual_sweep(&init), targets))
}

fn invert(m: &CMat) -> Option<CMat> {
    let n = m.rows();
    if n == 0 {
        return Some(CMat::zeros(0, 0));
    }
    let inv: DMatrix<Complex64> = m.to_nalgebra().try_inverse()?;
    let out = CMat::from_nalgebra(&inv);
    out.is_finite().then_some(out)
}

/// Scales V by `g` on sink-side vertices and `h` on source-side vertices.
///
/// This is the change of frame `G_i` at each vertex with `G_t = g_t` and
/// `G_s = h_s^{-†}`, i.e. `V(a) ↦ G_{ha}·V(a)·G_{ta}⁻¹`. An arc `s → t`
/// becomes `g_t·V(a)·h_s†`; arcs that touch neither set are unchanged, and
/// Φ of the result equals the scaled map `X ↦ g·Φ_V(h†Xh)·g†`.
pub fn scale_representation(rep: &Representation, g: &BlockDiag, h: &BlockDiag) -> Result<FloatRep> {
    let mut f = FloatRep::from_exact(rep)?;
    let name = |i: usize| rep.quiver().vertex_name(i).to_string();
    for (&i, b) in g.iter().chain(h.iter()) {
        if i >= f.n_vertices() {
            return Err(Error::DanglingVertex(i.to_string()));
        }
        if b.rows() != f.alpha[i] || b.cols() != f.alpha[i] {
            return Err(Error::Shape(format!("scaling block at vertex `{}`", name(i))));
        }
    }
    if let Some(i) = g.keys().find(|i| h.contains_key(i)) {
        return Err(Error::Shape(format!("vertex `{}` scaled on both sides", name(*i))));
    }
    for (&t, gt) in g {
        let inv = invert(gt).ok_or_else(|| Error::SingularBlock(name(t)))?;
        f.act(t, gt, &inv);
    }
    for (&s, hs) in h {
        let hinv = invert(hs).ok_or_else(|| Error::SingularBlock(name(s)))?;
        // G_s = h^{-†}, G_s⁻¹ = h†
        f.act(s, &hinv.adjoint(), &hs.adjoint());
    }
    Ok(f)
}

/// |tr(Y†Φ(X)) − tr(Φ*(Y)†X)|.
pub fn duality_check(rep: &Representation, x: &Marginal, y: &Marginal) -> Result<f64> {
    let targets: Vec<usize> = y.keys().copied().collect();
    let sources: Vec<usize> = x.keys().copied().collect();
    let phi = apply_phi(rep, x, &targets)?;
    let dual = apply_phi_dual(rep, y, &sources)?;
    let lhs: Complex64 = targets.iter().map(|t| y[t].matrix().inner(phi[t].matrix())).sum();
    let rhs: Complex64 = sources.iter().map(|s| dual[s].matrix().inner(x[s].matrix())).sum();
    Ok((lhs - rhs).norm())
}

/// Φ_V over explicitly enumerated s–t paths; exponential, for cross-checks.
pub fn apply_phi_by_paths(rep: &Representation, x: &Marginal, targets: &[usize]) -> Result<Marginal> {
    check_blocks(rep, x)?;
    let q = rep.quiver();
    q.topological_order()?;
    let mats: Vec<CMat> = rep.matrices().iter().map(|m| m.to_float()).collect();
    let mut out: BTreeMap<usize, CMat> =
        targets.iter().map(|&t| (t, CMat::zeros(rep.alpha().get(t), rep.alpha().get(t)))).collect();
    for (&s, xs) in x {
        walk(q, &mats, s, CMat::identity(rep.alpha().get(s)), xs.matrix(), &mut out);
    }
    Ok(out.into_iter().map(|(t, m)| (t, HermitianFloat::symmetrized(&m))).collect())
}

fn walk(q: &Quiver, mats: &[CMat], v: usize, path: CMat, xs: &CMat, out: &mut BTreeMap<usize, CMat>) {
    if let Some(acc) = out.get_mut(&v) {
        acc.add_congruence(&path, xs);
    }
    for &k in q.out_arcs(v) {
        walk(q, mats, q.arc(k).head, mats[k].mul(&path), xs, out);
    }
}
