//! Minimum and maximum maximizers of King's criterion.
//!
//! Strategies are registered by name and tried in order by the `auto`
//! pipeline: exact enumeration on rank-one instances, a certifying Wong
//! sequence on the Derksen linear matrix, then Sinkhorn-driven proposals.

mod combinatorial;
mod sinkhorn;
mod wong;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

pub use combinatorial::ExactCombinatorial;
pub use sinkhorn::SinkhornProposals;
pub use wong::{path_span_bases, WongSequence};

use crate::cpmap::{apply_phi, apply_phi_dual, Marginal};
use crate::error::{Error, Result};
use crate::numerics::{HermitianFloat, Subspace};
use crate::quiver::{closure_subrepresentation, interior_subrepresentation, Representation, Subrepresentation, Weight};
use crate::semistability::SsConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Enumeration over a finite lattice that contains every maximizer.
    ExactCombinatorial,
    /// Minimal shrunk subspace certified by a Wong sequence.
    WongCertified,
    /// Best exactly-scored candidate from scaling proposals.
    ProposeVerify,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KingMaximizer {
    pub w: Subrepresentation,
    /// σ(dimv W).
    pub value: i64,
    /// W is certified to be the minimum (or maximum) maximizer.
    pub extremal: bool,
    pub method: Method,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

#[derive(Clone, Debug)]
pub struct KingOptions {
    /// Registered strategy name, or `auto`.
    pub strategy: String,
    pub seed: u64,
    /// Scaling parameters for the proposal strategy.
    pub ss: SsConfig,
    /// Iteration budget for proposal checkpoints.
    pub proposal_iters: u64,
    /// Cap on seed combinations enumerated by the exact strategy.
    pub enumeration_limit: u64,
}

impl Default for KingOptions {
    fn default() -> Self {
        KingOptions {
            strategy: "auto".into(),
            seed: 0x5eed,
            ss: SsConfig::default(),
            proposal_iters: 4096,
            enumeration_limit: 1 << 20,
        }
    }
}

/// A way of producing a minimum maximizer for arbitrary integer weights.
pub trait MaximizerStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// `Ok(None)` when the strategy does not apply to this instance.
    fn min_maximizer(&self, rep: &Representation, sigma: &Weight, opts: &KingOptions) -> Result<Option<KingMaximizer>>;
}

/// Name-keyed strategy table.
#[derive(Clone)]
pub struct StrategyRegistry {
    map: BTreeMap<String, Arc<dyn MaximizerStrategy>>,
    order: Vec<String>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        let mut r = StrategyRegistry { map: BTreeMap::new(), order: Vec::new() };
        r.register(Arc::new(ExactCombinatorial));
        r.register(Arc::new(WongSequence));
        r.register(Arc::new(SinkhornProposals));
        r
    }
}

impl StrategyRegistry {
    /// Later registrations under the same name replace earlier ones; `auto` tries them in registration order.
    pub fn register(&mut self, s: Arc<dyn MaximizerStrategy>) {
        let name = s.name().to_string();
        if self.map.insert(name.clone(), s).is_none() {
            self.order.push(name);
        }
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn MaximizerStrategy>> {
        self.map.get(name).cloned()
    }

    pub fn names(&self) -> Vec<String> {
        self.order.clone()
    }

    fn run(&self, rep: &Representation, sigma: &Weight, opts: &KingOptions) -> Result<KingMaximizer> {
        if opts.strategy != "auto" {
            let s = self.get(&opts.strategy).ok_or_else(|| Error::UnknownStrategy(opts.strategy.clone()))?;
            return s.min_maximizer(rep, sigma, opts)?.ok_or_else(|| {
                Error::OutOfRange(format!("strategy `{}` does not apply to this instance", opts.strategy))
            });
        }
        for name in &self.order {
            if let Some(m) = self.map[name].min_maximizer(rep, sigma, opts)? {
                return Ok(m);
            }
        }
        Err(Error::OutOfRange("no registered strategy applies".into()))
    }
}

/// Φ_V(J⁺_σ) on Q0⁻ and Φ*_V(J⁻_σ) on Q0⁺, with J±_σ = ⊕ σ±(i)·I.
pub fn phi_sigma_marginals(rep: &Representation, sigma: &Weight) -> Result<(Marginal, Marginal)> {
    let a = rep.alpha();
    let pos = sigma.positive_vertices();
    let neg = sigma.negative_vertices();
    let jp: Marginal = pos.iter().map(|&s| (s, HermitianFloat::scaled_identity(a.get(s), sigma.plus(s) as f64))).collect();
    let jm: Marginal = neg.iter().map(|&t| (t, HermitianFloat::scaled_identity(a.get(t), sigma.minus(t) as f64))).collect();
    Ok((apply_phi(rep, &jp, &neg)?, apply_phi_dual(rep, &jm, &pos)?))
}

fn check(rep: &Representation, sigma: &Weight) -> Result<()> {
    if sigma.len() != rep.quiver().n_vertices() {
        return Err(Error::Shape(format!("weight has {} entries for {} vertices", sigma.len(), rep.quiver().n_vertices())));
    }
    rep.quiver().topological_order()?;
    Ok(())
}

/// Minimum or maximum maximizer of W ↦ σ(dimv W) for any integer weight.
///
/// The maximum maximizer of (V, σ) is the annihilator of the minimum maximizer
/// of (Vᵀ, −σ) on the opposite quiver.
pub fn extremal_maximizer(rep: &Representation, sigma: &Weight, which: Extreme, opts: &KingOptions) -> Result<KingMaximizer> {
    check(rep, sigma)?;
    let reg = StrategyRegistry::default();
    match which {
        Extreme::Min => reg.run(rep, sigma, opts),
        Extreme::Max => {
            let t = rep.transpose();
            let m = reg.run(&t, &sigma.negated(), opts)?;
            let w = Subrepresentation::new(rep, m.w.annihilator().spaces().to_vec())?;
            let value = sigma.eval(&w.dims());
            Ok(KingMaximizer { w, value, extremal: m.extremal, method: m.method })
        }
    }
}

fn require_balanced(rep: &Representation, sigma: &Weight) -> Result<()> {
    check(rep, sigma)?;
    let total = sigma.eval(rep.alpha().as_slice());
    if total != 0 {
        return Err(Error::WeightInfeasible(total));
    }
    Ok(())
}

pub fn min_maximizer(rep: &Representation, sigma: &Weight) -> Result<KingMaximizer> {
    min_maximizer_with(rep, sigma, &KingOptions::default())
}

pub fn max_maximizer(rep: &Representation, sigma: &Weight) -> Result<KingMaximizer> {
    max_maximizer_with(rep, sigma, &KingOptions::default())
}

pub fn min_maximizer_with(rep: &Representation, sigma: &Weight, opts: &KingOptions) -> Result<KingMaximizer> {
    require_balanced(rep, sigma)?;
    extremal_maximizer(rep, sigma, Extreme::Min, opts)
}

pub fn max_maximizer_with(rep: &Representation, sigma: &Weight, opts: &KingOptions) -> Result<KingMaximizer> {
    require_balanced(rep, sigma)?;
    extremal_maximizer(rep, sigma, Extreme::Max, opts)
}

/// Improves a subrepresentation without lowering σ(dimv W): first the largest
/// subrepresentation below W on Q0⁻, then the closure of its Q0⁺ part.
pub(crate) fn polish(rep: &Representation, sigma: &Weight, w: &Subrepresentation) -> Result<Subrepresentation> {
    let n = rep.quiver().n_vertices();
    let alpha = rep.alpha();
    let ceilings: Vec<Subspace> =
        (0..n).map(|i| if sigma.get(i) < 0 { w.space(i).clone() } else { Subspace::full(alpha.get(i)) }).collect();
    let up = interior_subrepresentation(rep, &ceilings)?;
    seeds_closure(rep, sigma, &up)
}

/// Closure of W restricted to Q0⁺.
pub(crate) fn seeds_closure(rep: &Representation, sigma: &Weight, w: &Subrepresentation) -> Result<Subrepresentation> {
    let alpha = rep.alpha();
    let seeds: Vec<Subspace> = (0..rep.quiver().n_vertices())
        .map(|i| if sigma.get(i) > 0 { w.space(i).clone() } else { Subspace::zero(alpha.get(i)) })
        .collect();
    closure_subrepresentation(rep, &seeds)
}

/// Picks the smallest maximizer among scored candidates: intersect all
/// candidates of the best value and keep the intersection if it still attains it.
pub(crate) fn select_minimal(sigma: &Weight, cands: Vec<Subrepresentation>) -> Option<(Subrepresentation, i64)> {
    let best = cands.iter().map(|w| sigma.eval(&w.dims())).max()?;
    let tops: Vec<Subrepresentation> = cands.into_iter().filter(|w| sigma.eval(&w.dims()) == best).collect();
    let mut meet = tops[0].clone();
    for w in &tops[1..] {
        meet = meet.intersection(w);
    }
    if sigma.eval(&meet.dims()) == best {
        return Some((meet, best));
    }
    let smallest = tops.into_iter().min_by_key(|w| w.total_dim()).expect("nonempty");
    Some((smallest, best))
}
