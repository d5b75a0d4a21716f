//! Semistability deciders selectable by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::king::{min_maximizer_with, KingOptions};
use crate::lattice::DEFAULT_LOWERSET_LIMIT;
use crate::quiver::{Representation, Weight};
use crate::rankone::{decide_rank_one_ss, gale_feasible, RankOneRep};
use crate::semistability::{decide_sigma_semistable, SsConfig, SsDecision, Verdict};

#[derive(Clone, Debug)]
pub struct DeciderOptions {
    pub ss: SsConfig,
    pub lowerset_limit: usize,
    pub king: KingOptions,
}

impl Default for DeciderOptions {
    fn default() -> Self {
        DeciderOptions { ss: SsConfig::default(), lowerset_limit: DEFAULT_LOWERSET_LIMIT, king: KingOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub decider: String,
    pub verdict: Verdict,
    pub certificate: Option<String>,
    /// Present for the scaling decider.
    pub scaling: Option<SsDecision>,
}

pub trait SemistabilityDecider: Send + Sync {
    fn name(&self) -> &'static str;

    /// `Ok(None)` when the decider does not apply to the instance.
    fn decide(&self, rep: &Representation, sigma: &Weight, opts: &DeciderOptions) -> Result<Option<Decision>>;
}

fn infeasible(name: &str, rep: &Representation, sigma: &Weight) -> Option<Decision> {
    let total = sigma.eval(rep.alpha().as_slice());
    (total != 0).then(|| Decision {
        decider: name.into(),
        verdict: Verdict::WeightInfeasible,
        certificate: Some(format!("sigma(alpha) = {total}")),
        scaling: None,
    })
}

fn verdict(semistable: bool) -> Verdict {
    if semistable {
        Verdict::Semistable
    } else {
        Verdict::Unstable
    }
}

pub struct ScalingDecider;

impl SemistabilityDecider for ScalingDecider {
    fn name(&self) -> &'static str {
        "scaling"
    }

    fn decide(&self, rep: &Representation, sigma: &Weight, opts: &DeciderOptions) -> Result<Option<Decision>> {
        let d = decide_sigma_semistable(rep, sigma, &opts.ss)?;
        Ok(Some(Decision { decider: self.name().into(), verdict: d.verdict, certificate: d.certificate.clone(), scaling: Some(d) }))
    }
}

/// Conditions (K1) and (K2) on rank-one representations.
pub struct RankOneDecider;

impl SemistabilityDecider for RankOneDecider {
    fn name(&self) -> &'static str {
        "rank-one"
    }

    fn decide(&self, rep: &Representation, sigma: &Weight, opts: &DeciderOptions) -> Result<Option<Decision>> {
        if let Some(d) = infeasible(self.name(), rep, sigma) {
            return Ok(Some(d));
        }
        let r1 = match RankOneRep::from_support(rep) {
            Ok(r) => r,
            Err(Error::NotRankOne(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let ss = decide_rank_one_ss(&r1, sigma, opts.lowerset_limit)?;
        Ok(Some(Decision { decider: self.name().into(), verdict: verdict(ss), certificate: None, scaling: None }))
    }
}

/// Lower-set condition on the support quiver, valid when α ≡ 1.
pub struct GaleDecider;

impl SemistabilityDecider for GaleDecider {
    fn name(&self) -> &'static str {
        "gale"
    }

    fn decide(&self, rep: &Representation, sigma: &Weight, _opts: &DeciderOptions) -> Result<Option<Decision>> {
        if rep.alpha().as_slice().iter().any(|&d| d != 1) {
            return Ok(None);
        }
        if let Some(d) = infeasible(self.name(), rep, sigma) {
            return Ok(Some(d));
        }
        let g = gale_feasible(&rep.support_quiver(), sigma)?;
        let certificate = g.witness.map(|w| {
            let names: Vec<&str> = w.iter().map(|&i| rep.quiver().vertex_name(i)).collect();
            format!("lower set {{{}}} has sigma = {}", names.join(", "), g.max_lower)
        });
        Ok(Some(Decision { decider: self.name().into(), verdict: verdict(g.feasible), certificate, scaling: None }))
    }
}

/// King's criterion through a certified minimum maximizer.
pub struct KingDecider;

impl SemistabilityDecider for KingDecider {
    fn name(&self) -> &'static str {
        "king"
    }

    fn decide(&self, rep: &Representation, sigma: &Weight, opts: &DeciderOptions) -> Result<Option<Decision>> {
        if let Some(d) = infeasible(self.name(), rep, sigma) {
            return Ok(Some(d));
        }
        let m = min_maximizer_with(rep, sigma, &opts.king)?;
        if !m.extremal && m.value == 0 {
            return Ok(None);
        }
        let certificate = (m.value > 0).then(|| format!("subrepresentation of dimension {:?} has sigma = {}", m.w.dims(), m.value));
        Ok(Some(Decision { decider: self.name().into(), verdict: verdict(m.value == 0), certificate, scaling: None }))
    }
}

#[derive(Clone)]
pub struct DeciderRegistry {
    map: BTreeMap<String, Arc<dyn SemistabilityDecider>>,
}

impl Default for DeciderRegistry {
    fn default() -> Self {
        let mut r = DeciderRegistry { map: BTreeMap::new() };
        r.register(Arc::new(ScalingDecider));
        r.register(Arc::new(RankOneDecider));
        r.register(Arc::new(GaleDecider));
        r.register(Arc::new(KingDecider));
        r
    }
}

impl DeciderRegistry {
    pub fn register(&mut self, d: Arc<dyn SemistabilityDecider>) {
        self.map.insert(d.name().to_string(), d);
    }

    pub fn names(&self) -> Vec<String> {
        self.map.keys().cloned().collect()
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn SemistabilityDecider>> {
        self.map.get(name).cloned()
    }

    pub fn decide(&self, name: &str, rep: &Representation, sigma: &Weight, opts: &DeciderOptions) -> Result<Decision> {
        let d = self.get(name).ok_or_else(|| Error::UnknownStrategy(name.to_string()))?;
        d.decide(rep, sigma, opts)?
            .ok_or_else(|| Error::OutOfRange(format!("decider `{name}` does not apply to this instance")))
    }
}
