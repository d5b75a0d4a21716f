//! Exact enumeration for representations whose nonzero arcs all have rank one.
//!
//! At a vertex with σ > 0 every maximizer equals an intersection of kernels of
//! the outgoing functionals f_a, and the closure of those seeds is again a
//! maximizer. Enumerating all seed tuples therefore finds the maximum and the
//! minimum maximizer.

use std::collections::HashSet;

use super::{select_minimal, KingMaximizer, KingOptions, MaximizerStrategy, Method};
use crate::error::{Error, Result};
use crate::numerics::{ExactMatrix, Subspace};
use crate::quiver::{closure_subrepresentation, Representation, Weight};
use crate::rankone::RankOneRep;

pub struct ExactCombinatorial;

/// Distinct intersections of kernels of the given functionals, starting from the full space.
fn kernel_flats(dim: usize, functionals: &[Subspace]) -> Vec<Subspace> {
    let mut seen: HashSet<Subspace> = HashSet::new();
    let mut stack = vec![Subspace::full(dim)];
    seen.insert(Subspace::full(dim));
    let mut out = Vec::new();
    while let Some(s) = stack.pop() {
        for k in functionals {
            let t = s.intersection(k);
            if seen.insert(t.clone()) {
                stack.push(t);
            }
        }
        out.push(s);
    }
    out
}

impl MaximizerStrategy for ExactCombinatorial {
    fn name(&self) -> &'static str {
        "exact-combinatorial"
    }

    fn min_maximizer(&self, rep: &Representation, sigma: &Weight, opts: &KingOptions) -> Result<Option<KingMaximizer>> {
        let r1 = match RankOneRep::from_support(rep) {
            Ok(r) => r,
            Err(Error::NotRankOne(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let sup = r1.base();
        let q = sup.quiver();
        let alpha = rep.alpha();
        let pos = sigma.positive_vertices();
        let mut flats: Vec<Vec<Subspace>> = Vec::with_capacity(pos.len());
        let mut combos: u64 = 1;
        for &s in &pos {
            let kers: Vec<Subspace> = q
                .out_arcs(s)
                .iter()
                .map(|&b| Subspace::preimage(&ExactMatrix::row_vector(r1.f(b)), &Subspace::zero(1)))
                .collect();
            let fl = kernel_flats(alpha.get(s), &kers);
            combos = combos.saturating_mul(fl.len() as u64);
            flats.push(fl);
        }
        if combos > opts.enumeration_limit {
            return Ok(None);
        }
        let n = q.n_vertices();
        let mut seeds: Vec<Subspace> = (0..n).map(|i| Subspace::zero(alpha.get(i))).collect();
        let mut idx = vec![0usize; pos.len()];
        let mut cands = Vec::new();
        let mut best = i64::MIN;
        loop {
            for (k, &s) in pos.iter().enumerate() {
                seeds[s] = flats[k][idx[k]].clone();
            }
            let w = closure_subrepresentation(sup, &seeds)?;
            let v = sigma.eval(&w.dims());
            if v > best {
                best = v;
                cands.clear();
            }
            if v == best {
                cands.push(w);
            }
            // odometer
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < flats[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        let (w, value) = select_minimal(sigma, cands).expect("at least one candidate");
        let w = crate::quiver::Subrepresentation::new(rep, w.spaces().to_vec())?;
        Ok(Some(KingMaximizer { w, value, extremal: true, method: Method::ExactCombinatorial }))
    }
}
