//! Wong sequences on the blown-up path-span matrix space.
//!
//! The matrix space has one row block per copy (t, q), q < σ⁻(t), and one
//! column block per copy (s, p), p < σ⁺(s); block ((t, q), (s, p)) ranges over
//! the span of path matrices s → t. Its shrunk subspaces U relate to
//! subrepresentations through dim U − dim 𝒜U ≤ max σ(dimv W), with equality for
//! the minimal shrunk subspace, whose copy blocks seed the minimum maximizer.
//!
//! For a random B in the space, the second Wong sequence W₀ = 0,
//! Wᵢ₊₁ = 𝒜 B⁻¹(Wᵢ) stabilises at W*. When W* ⊆ im B, B⁻¹(W*) is exactly that
//! minimal shrunk subspace and the answer is certified.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{KingMaximizer, KingOptions, MaximizerStrategy, Method};
use crate::error::Result;
use crate::numerics::{ExactMatrix, GaussRat, Subspace};
use crate::quiver::{closure_subrepresentation, Representation, Subrepresentation, Weight};

pub struct WongSequence;

/// Blocks larger than this are left to the floating-point strategy.
const MAX_SIDE: usize = 96;
const ATTEMPTS: u64 = 3;
const COEFF_RANGE: i64 = 1000;

fn flatten(m: &ExactMatrix) -> Vec<GaussRat> {
    m.entries().to_vec()
}

/// Basis of span{V(P) : P a path s → t of positive length} for every source s
/// and target t in the given lists.
pub fn path_span_bases(rep: &Representation, sources: &[usize], targets: &[usize]) -> Result<BTreeMap<(usize, usize), Vec<ExactMatrix>>> {
    let q = rep.quiver();
    let order = q.topological_order()?;
    let alpha = rep.alpha();
    let mut out = BTreeMap::new();
    for &s in sources {
        let mut spans: Vec<Vec<ExactMatrix>> = vec![Vec::new(); q.n_vertices()];
        spans[s] = vec![ExactMatrix::identity(alpha.get(s))];
        for &i in &order {
            if i == s {
                continue;
            }
            let mut gens = Vec::new();
            for &a in q.in_arcs(i) {
                let ta = q.arc(a).tail;
                for m in &spans[ta] {
                    let p = rep.matrix(a).mul(m);
                    if !p.is_zero() {
                        gens.push(flatten(&p));
                    }
                }
            }
            if gens.is_empty() {
                continue;
            }
            let len = alpha.get(i) * alpha.get(s);
            let span = Subspace::from_vectors(len, &gens)?;
            let b = span.basis();
            spans[i] = (0..b.cols())
                .map(|c| ExactMatrix::from_vec(alpha.get(i), alpha.get(s), b.column(c)).expect("shape"))
                .collect();
        }
        for &t in targets {
            out.insert((s, t), spans[t].clone());
        }
    }
    Ok(out)
}

struct Blown<'a> {
    alpha: &'a [usize],
    pos: Vec<usize>,
    neg: Vec<usize>,
    /// (vertex, offset) per copy
    col_blocks: Vec<(usize, usize)>,
    row_blocks: Vec<(usize, usize)>,
    rows: usize,
    cols: usize,
    spans: BTreeMap<(usize, usize), Vec<ExactMatrix>>,
}

impl<'a> Blown<'a> {
    fn new(rep: &'a Representation, sigma: &Weight) -> Result<Self> {
        let alpha = rep.alpha().as_slice();
        let pos = sigma.positive_vertices();
        let neg = sigma.negative_vertices();
        let mut col_blocks = Vec::new();
        let mut cols = 0;
        for &s in &pos {
            for _ in 0..sigma.plus(s) {
                col_blocks.push((s, cols));
                cols += alpha[s];
            }
        }
        let mut row_blocks = Vec::new();
        let mut rows = 0;
        for &t in &neg {
            for _ in 0..sigma.minus(t) {
                row_blocks.push((t, rows));
                rows += alpha[t];
            }
        }
        let spans = path_span_bases(rep, &pos, &neg)?;
        Ok(Blown { alpha, pos, neg, col_blocks, row_blocks, rows, cols, spans })
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> ExactMatrix {
        let mut b = ExactMatrix::zeros(self.rows, self.cols);
        for &(t, ro) in &self.row_blocks {
            for &(s, co) in &self.col_blocks {
                for e in &self.spans[&(s, t)] {
                    let c = GaussRat::from_i64(rng.gen_range(-COEFF_RANGE..=COEFF_RANGE));
                    for r in 0..e.rows() {
                        for k in 0..e.cols() {
                            let x = e.get(r, k);
                            if !x.is_zero() {
                                let v = b.get(ro + r, co + k) + &(x * &c);
                                b.set(ro + r, co + k, v);
                            }
                        }
                    }
                }
            }
        }
        b
    }

    /// Sum over copies p of the (s, p) block projections of U.
    fn column_shadows(&self, u: &Subspace) -> BTreeMap<usize, Subspace> {
        let mut out: BTreeMap<usize, Subspace> = self.pos.iter().map(|&s| (s, Subspace::zero(self.alpha[s]))).collect();
        for &(s, off) in &self.col_blocks {
            let idx: Vec<usize> = (off..off + self.alpha[s]).collect();
            let proj = Subspace::span(&u.basis().select_rows(&idx));
            let e = out.get_mut(&s).expect("source");
            *e = e.sum(&proj);
        }
        out
    }

    /// 𝒜U, which is a direct sum of one space per sink repeated over its copies.
    fn apply_space(&self, u: &Subspace) -> Subspace {
        let shadows = self.column_shadows(u);
        let mut per_sink: BTreeMap<usize, Subspace> = BTreeMap::new();
        for &t in &self.neg {
            let mut r = Subspace::zero(self.alpha[t]);
            for &s in &self.pos {
                for e in &self.spans[&(s, t)] {
                    r = r.sum(&shadows[&s].image_under(e));
                }
            }
            per_sink.insert(t, r);
        }
        let mut gens = Vec::new();
        for &(t, off) in &self.row_blocks {
            let b = per_sink[&t].basis();
            for c in 0..b.cols() {
                let mut v = vec![GaussRat::zero(); self.rows];
                for (r, x) in b.column(c).into_iter().enumerate() {
                    v[off + r] = x;
                }
                gens.push(v);
            }
        }
        Subspace::from_vectors(self.rows, &gens).expect("shape")
    }
}

/// Minimum maximizer certified by a Wong sequence, or `None` when the random
/// element never reached the non-commutative rank.
pub(crate) fn wong_min_maximizer(rep: &Representation, sigma: &Weight, seed: u64) -> Result<Option<KingMaximizer>> {
    let bl = Blown::new(rep, sigma)?;
    if bl.rows.max(bl.cols) > MAX_SIDE {
        return Ok(None);
    }
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let b = bl.random_element(&mut rng);
        let mut w = Subspace::zero(bl.rows);
        loop {
            let next = bl.apply_space(&Subspace::preimage(&b, &w));
            if next.dim() == w.dim() {
                break;
            }
            w = next;
        }
        if !b.image().contains(&w) {
            continue;
        }
        let u = Subspace::preimage(&b, &w);
        let shrink = (bl.cols - b.rank()) as i64;
        debug_assert_eq!(u.dim() - w.dim(), bl.cols - b.rank());
        let shadows = bl.column_shadows(&u);
        let seeds: Vec<Subspace> = (0..bl.alpha.len())
            .map(|i| shadows.get(&i).cloned().unwrap_or_else(|| Subspace::zero(bl.alpha[i])))
            .collect();
        let wsub: Subrepresentation = closure_subrepresentation(rep, &seeds)?;
        let value = sigma.eval(&wsub.dims());
        if value != shrink {
            continue;
        }
        return Ok(Some(KingMaximizer { w: wsub, value, extremal: true, method: Method::WongCertified }));
    }
    Ok(None)
}

impl MaximizerStrategy for WongSequence {
    fn name(&self) -> &'static str {
        "wong-sequence"
    }

    fn min_maximizer(&self, rep: &Representation, sigma: &Weight, opts: &KingOptions) -> Result<Option<KingMaximizer>> {
        wong_min_maximizer(rep, sigma, opts.seed)
    }
}
