//! Maximizer proposals read off the spectra of a running scaling.
//!
//! At checkpoints the right marginal of the scaled representation is
//! eigendecomposed; eigenvectors below a threshold, pulled back to the original
//! frame and rounded to small rationals, seed candidate subrepresentations.
//! Candidates are polished and scored exactly, so the result is always a valid
//! subrepresentation, though maximality is only heuristic.

use num_complex::Complex64;

use super::{polish, select_minimal, KingMaximizer, KingOptions, MaximizerStrategy, Method};
use crate::error::{Error, Result};
use crate::numerics::{approx_rational, CMat, GaussRat, HermitianFloat, Subspace};
use crate::quiver::{closure_subrepresentation, Representation, Subrepresentation, Weight};
use crate::semistability::{decide_sigma_semistable, Scaler, Verdict};

pub struct SinkhornProposals;

const THRESHOLDS: [f64; 3] = [1e-2, 1e-3, 1e-4];
const MAX_DEN: i64 = 1_000_000;
const SNAP: f64 = 1e-9;

fn round(x: f64) -> GaussRat {
    if x.abs() < SNAP {
        return GaussRat::zero();
    }
    let (p, q) = approx_rational(x, MAX_DEN);
    GaussRat::from_fractions(p, q, 0, 1)
}

/// Rational basis close to the span of the given float vectors: reduced echelon
/// form with complete pivoting, then entrywise continued-fraction rounding.
pub(crate) fn round_span(dim: usize, vecs: &[Vec<Complex64>]) -> Result<Subspace> {
    let mut rows: Vec<Vec<Complex64>> = vecs.to_vec();
    let mut out = Vec::new();
    let mut used = vec![false; dim];
    while !rows.is_empty() {
        let mut best = (0usize, 0usize, 0.0f64);
        for (r, v) in rows.iter().enumerate() {
            for (c, x) in v.iter().enumerate() {
                if !used[c] && x.norm() > best.2 {
                    best = (r, c, x.norm());
                }
            }
        }
        if best.2 < 1e-10 {
            break;
        }
        let (r, c, _) = best;
        let piv = rows.swap_remove(r);
        let p = piv[c];
        let piv: Vec<Complex64> = piv.iter().map(|x| x / p).collect();
        for v in rows.iter_mut() {
            let f = v[c];
            for (x, y) in v.iter_mut().zip(&piv) {
                *x -= f * y;
            }
        }
        for v in out.iter_mut() {
            let v: &mut Vec<Complex64> = v;
            let f = v[c];
            for (x, y) in v.iter_mut().zip(&piv) {
                *x -= f * y;
            }
        }
        used[c] = true;
        out.push(piv);
    }
    let exact: Vec<Vec<GaussRat>> = out
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| {
                    let re = round(x.re);
                    let im = round(x.im);
                    re + im * GaussRat::i()
                })
                .collect()
        })
        .collect();
    Subspace::from_vectors(dim, &exact)
}

struct Spectrum {
    /// per positive vertex: (eigenvalues ascending, original-frame eigenvectors as columns)
    blocks: Vec<(usize, Vec<f64>, CMat)>,
}

fn spectrum(sc: &Scaler) -> Option<Spectrum> {
    let right = sc.right_marginal();
    let invs = sc.frame_invs.as_ref().expect("tracked");
    let mut blocks = Vec::new();
    for &s in &sc.pos {
        if !right[s].is_finite() || !invs[s].is_finite() {
            return None;
        }
        let (vals, vecs) = HermitianFloat::symmetrized(&right[s]).eigh();
        blocks.push((s, vals, invs[s].mul(&vecs)));
    }
    Some(Spectrum { blocks })
}

fn seeds_below(rep: &Representation, sp: &Spectrum, cut: f64) -> Result<Vec<Subspace>> {
    let alpha = rep.alpha();
    let mut seeds: Vec<Subspace> = (0..alpha.len()).map(|i| Subspace::zero(alpha.get(i))).collect();
    for (s, vals, vecs) in &sp.blocks {
        let cols: Vec<Vec<Complex64>> = vals.iter().enumerate().filter(|(_, &v)| v <= cut).map(|(k, _)| vecs.column(k)).collect();
        seeds[*s] = round_span(alpha.get(*s), &cols)?;
    }
    Ok(seeds)
}

fn proposals(rep: &Representation, sp: &Spectrum) -> Result<Vec<Vec<Subspace>>> {
    let mut all: Vec<f64> = sp.blocks.iter().flat_map(|b| b.1.iter().copied()).collect();
    all.sort_by(|a, b| a.total_cmp(b));
    let top = all.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let mut cuts: Vec<f64> = THRESHOLDS.iter().map(|d| d * top).collect();
    // every global cut point between consecutive eigenvalues
    cuts.extend(all.iter().copied());
    let mut out = Vec::new();
    for c in cuts {
        out.push(seeds_below(rep, sp, c)?);
    }
    Ok(out)
}

fn checkpoints(budget: u64) -> Vec<u64> {
    let mut v = Vec::new();
    let mut k = 1;
    while k <= budget {
        v.push(k);
        k *= 2;
    }
    v
}

impl MaximizerStrategy for SinkhornProposals {
    fn name(&self) -> &'static str {
        "sinkhorn-proposals"
    }

    fn min_maximizer(&self, rep: &Representation, sigma: &Weight, opts: &KingOptions) -> Result<Option<KingMaximizer>> {
        let alpha = rep.alpha();
        let n = alpha.len();
        let full_pos: Vec<Subspace> = (0..n)
            .map(|i| if sigma.get(i) > 0 { Subspace::full(alpha.get(i)) } else { Subspace::zero(alpha.get(i)) })
            .collect();
        let mut seed_sets = vec![full_pos];
        if !sigma.positive_vertices().is_empty() && !sigma.negative_vertices().is_empty() {
            let mut sc = Scaler::new(rep, sigma, true)?;
            let marks = checkpoints(opts.proposal_iters);
            let mut it = 0;
            'run: for &m in &marks {
                while it < m {
                    it += 1;
                    let left = sc.left_marginal();
                    if left.iter().any(|b| !b.is_finite()) {
                        break 'run;
                    }
                    if !matches!(sc.left_step(&left), Ok(Ok(()))) {
                        break 'run;
                    }
                    let right = sc.right_marginal();
                    if right.iter().any(|b| !b.is_finite()) {
                        break 'run;
                    }
                    if it == m {
                        // read the spectrum before the right step equalizes it
                        if let Some(sp) = spectrum(&sc) {
                            seed_sets.extend(proposals(rep, &sp)?);
                        }
                    }
                    if !matches!(sc.right_step(&right), Ok(Ok(()))) {
                        break 'run;
                    }
                }
            }
            // a collapse or blow-up leaves the last state as the most informative one
            if let Some(sp) = spectrum(&sc) {
                seed_sets.extend(proposals(rep, &sp)?);
            }
        }
        let mut cands = vec![Subrepresentation::zero(rep)];
        for seeds in seed_sets {
            let w = closure_subrepresentation(rep, &seeds)?;
            cands.push(polish(rep, sigma, &w)?);
        }
        let (w, value) = select_minimal(sigma, cands).expect("nonempty");
        let extremal = value == 0
            && w.is_zero()
            && sigma.eval(alpha.as_slice()) == 0
            && match decide_sigma_semistable(rep, sigma, &opts.ss) {
                Ok(d) => d.verdict == Verdict::Semistable,
                Err(Error::NumericalFailure(_)) => false,
                Err(e) => return Err(e),
            };
        Ok(Some(KingMaximizer { w, value, extremal, method: Method::ProposeVerify }))
    }
}
