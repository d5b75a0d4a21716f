//! σ-semistability of acyclic-quiver representations by alternating scaling.

use serde::Serialize;

use crate::cpmap::FloatRep;
use crate::error::{Error, Result};
use crate::king::{KingOptions, StrategyRegistry};
use crate::numerics::float::{cholesky_into, lower_triangular_inverse_into};
use crate::numerics::{CMat, HermitianFloat, Subspace};
use crate::quiver::{closure_subrepresentation, interior_subrepresentation, Representation, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Semistable,
    Unstable,
    WeightInfeasible,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Semistable => "semistable",
            Verdict::Unstable => "unstable",
            Verdict::WeightInfeasible => "weight-infeasible",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SsDecision {
    pub verdict: Verdict,
    /// Outer iterations started (0 when a precheck decided).
    pub iterations: u64,
    /// Trace-norm residual at termination (the larger side when converged).
    pub final_residual: f64,
    /// Iteration budget T for this instance.
    pub bound: u64,
    pub epsilon: f64,
    pub certificate: Option<String>,
    /// Largest left residual seen right after a left normalization (only when auditing).
    pub max_post_left_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsConfig {
    /// ε = epsilon_scale / (6N).
    pub epsilon_scale: f64,
    /// The constant c in T = ⌈c·ε⁻²·(b + d·ln(N·d))⌉.
    pub iter_constant: f64,
    /// Hard cap on T.
    pub max_iters: u64,
    /// Re-measure the left marginal after every left step.
    pub audit: bool,
}

impl Default for SsConfig {
    fn default() -> Self {
        SsConfig { epsilon_scale: 1.0, iter_constant: 10.0, max_iters: 1_000_000, audit: false }
    }
}

/// A connected component C of the support with σ(α|C) > 0 is itself a
/// destabilizing subrepresentation. Scaling cannot move mass between
/// components, so without this check it would only stop at the bound.
fn unbalanced_component(rep: &Representation, sigma: &Weight) -> Option<String> {
    let alpha = rep.alpha().as_slice();
    let n = alpha.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for k in rep.support_arcs() {
        let a = rep.quiver().arc(k);
        let (x, y) = (root(&mut parent, a.tail), root(&mut parent, a.head));
        parent[x] = y;
    }
    let mut mass = vec![0i64; n];
    for (i, &a) in alpha.iter().enumerate() {
        let r = root(&mut parent, i);
        mass[r] += sigma.get(i) * a as i64;
    }
    let r = (0..n).find(|&r| mass[r] > 0)?;
    let members: Vec<&str> = (0..n).filter(|&i| root(&mut parent, i) == r).map(|i| rep.quiver().vertex_name(i)).collect();
    Some(format!("the component {{{}}} of the support has sigma value {}", members.join(", "), mass[r]))
}

/// Iteration budget ⌈c·ε⁻²·(b + d·ln(N·d))⌉ before the cap.
pub fn iteration_bound(n_mass: i64, d: usize, bits: u32, epsilon: f64, c: f64) -> u64 {
    let nd = (n_mass as f64) * (d as f64);
    let log = if nd > 1.0 { nd.ln() } else { 0.0 };
    let t = c * (bits as f64 + d as f64 * log) / (epsilon * epsilon);
    t.ceil().max(1.0) as u64
}

/// Exact rank prechecks: Φ_V(I)_t must be nonsingular on Q0⁻ and Φ*_V(I)_s on Q0⁺.
///
/// The range of Φ_V(I)_t is the span of all path images from Q0⁺, i.e. the
/// closure of the full spaces at Q0⁺; the kernel of Φ*_V(I)_s is the largest
/// subrepresentation vanishing on Q0⁻.
pub fn rank_precheck(rep: &Representation, sigma: &Weight) -> Result<Option<String>> {
    let alpha = rep.alpha().as_slice();
    let n = alpha.len();
    if let Some(note) = unbalanced_component(rep, sigma) {
        return Ok(Some(note));
    }
    let seeds: Vec<Subspace> =
        (0..n).map(|i| if sigma.get(i) > 0 { Subspace::full(alpha[i]) } else { Subspace::zero(alpha[i]) }).collect();
    let reach = closure_subrepresentation(rep, &seeds)?;
    for t in sigma.negative_vertices() {
        if reach.space(t).dim() < alpha[t] {
            return Ok(Some(format!(
                "Phi_V(I) is singular at vertex `{}` (rank {} < {})",
                rep.quiver().vertex_name(t),
                reach.space(t).dim(),
                alpha[t]
            )));
        }
    }
    let ceilings: Vec<Subspace> =
        (0..n).map(|i| if sigma.get(i) < 0 { Subspace::zero(alpha[i]) } else { Subspace::full(alpha[i]) }).collect();
    let dead = interior_subrepresentation(rep, &ceilings)?;
    for s in sigma.positive_vertices() {
        if !dead.space(s).is_zero() {
            return Ok(Some(format!(
                "Phi*_V(I) is singular at vertex `{}` (rank {} < {})",
                rep.quiver().vertex_name(s),
                alpha[s] - dead.space(s).dim(),
                alpha[s]
            )));
        }
    }
    Ok(None)
}

/// Alternating left/right normalization state over a float copy of V.
pub(crate) struct Scaler {
    pub(crate) f: FloatRep,
    pub(crate) pos: Vec<usize>,
    pub(crate) neg: Vec<usize>,
    /// b⁺ or b⁻ per vertex (0 elsewhere).
    pub(crate) target: Vec<f64>,
    /// Cumulative frame change per vertex, if tracked.
    pub(crate) frames: Option<Vec<CMat>>,
    pub(crate) frame_invs: Option<Vec<CMat>>,
    init: Vec<CMat>,
    chol: CMat,
    inv: CMat,
}

impl Scaler {
    pub(crate) fn new(rep: &Representation, sigma: &Weight, track_frames: bool) -> Result<Self> {
        let f = FloatRep::from_exact(rep)?;
        let alpha = rep.alpha().as_slice();
        let n_mass = sigma.positive_mass(rep.alpha()) as f64;
        let pos: Vec<usize> = sigma.positive_vertices().into_iter().filter(|&i| alpha[i] > 0).collect();
        let neg: Vec<usize> = sigma.negative_vertices().into_iter().filter(|&i| alpha[i] > 0).collect();
        let target = (0..alpha.len()).map(|i| sigma.get(i).unsigned_abs() as f64 / n_mass).collect();
        let frames = track_frames.then(|| alpha.iter().map(|&d| CMat::identity(d)).collect());
        let frame_invs = frames.clone();
        let init = alpha.iter().map(|&d| CMat::identity(d)).collect();
        Ok(Scaler { f, pos, neg, target, frames, frame_invs, init, chol: CMat::zeros(0, 0), inv: CMat::zeros(0, 0) })
    }

    fn seeds(&self, side: &[usize]) -> Vec<Option<&CMat>> {
        let mut v = vec![None; self.f.n_vertices()];
        for &i in side {
            v[i] = Some(&self.init[i]);
        }
        v
    }

    /// Φ_V(I) blocks at Q0⁻ (full vertex-indexed vector).
    pub(crate) fn left_marginal(&self) -> Vec<CMat> {
        self.f.sweep(&self.seeds(&self.pos))
    }

    /// Φ*_V(I) blocks at Q0⁺.
    pub(crate) fn right_marginal(&self) -> Vec<CMat> {
        self.f.dual_sweep(&self.seeds(&self.neg))
    }

    /// Whether Σ‖M_i − b_i·I‖_tr ≤ eps, using Frobenius bounds before eigensolving.
    /// The returned value is exact unless the lower bound already exceeds eps.
    pub(crate) fn residual(&self, blocks: &[CMat], side: &[usize], eps: f64) -> Result<(bool, f64)> {
        let mut lower = 0.0;
        let mut upper = 0.0;
        let mut diffs = Vec::with_capacity(side.len());
        for &i in side {
            let d = blocks[i].sub(&CMat::scaled_identity(blocks[i].rows(), self.target[i]));
            if !d.is_finite() {
                return Err(Error::NumericalFailure("non-finite marginal during scaling".into()));
            }
            let fro = d.frobenius_norm();
            lower += fro;
            upper += fro * (d.rows() as f64).sqrt();
            diffs.push(d);
        }
        if lower > eps {
            return Ok((false, lower));
        }
        if upper <= eps {
            return Ok((true, self.exact_residual_of(diffs)));
        }
        let exact = self.exact_residual_of(diffs);
        Ok((exact <= eps, exact))
    }

    fn exact_residual_of(&self, diffs: Vec<CMat>) -> f64 {
        diffs.iter().map(|d| HermitianFloat::symmetrized(d).trace_norm()).sum()
    }

    pub(crate) fn exact_residual(&self, blocks: &[CMat], side: &[usize]) -> f64 {
        let diffs = side
            .iter()
            .map(|&i| blocks[i].sub(&CMat::scaled_identity(blocks[i].rows(), self.target[i])))
            .collect();
        self.exact_residual_of(diffs)
    }

    /// g_t = √b⁻(t)·C⁻¹ with C·C† = Φ_V(I)_t; V ← V_{g,I}.
    pub(crate) fn left_step(&mut self, blocks: &[CMat]) -> Result<std::result::Result<(), String>> {
        for k in 0..self.neg.len() {
            let t = self.neg[k];
            if let Err(e) = self.factor(&blocks[t]) {
                return Ok(Err(format!("left normalization collapsed at vertex index {t}: {e}")));
            }
            let r = self.target[t].sqrt();
            let g = self.inv.scale(r);
            let g_inv = self.chol.scale(1.0 / r);
            self.f.act(t, &g, &g_inv);
            if let Some(fr) = self.frames.as_mut() {
                fr[t] = g.mul(&fr[t]);
            }
            if let Some(fr) = self.frame_invs.as_mut() {
                fr[t] = fr[t].mul(&g_inv);
            }
        }
        Ok(Ok(()))
    }

    /// h_s = √b⁺(s)·C⁻¹ with C·C† = Φ*_V(I)_s; V ← V_{I,h}.
    pub(crate) fn right_step(&mut self, blocks: &[CMat]) -> Result<std::result::Result<(), String>> {
        for k in 0..self.pos.len() {
            let s = self.pos[k];
            if let Err(e) = self.factor(&blocks[s]) {
                return Ok(Err(format!("right normalization collapsed at vertex index {s}: {e}")));
            }
            let r = self.target[s].sqrt();
            // frame G_s = h^{-†} = C†/√b, G_s⁻¹ = h† = √b·C^{-†}
            let frame = self.chol.adjoint().scale(1.0 / r);
            let frame_inv = self.inv.adjoint().scale(r);
            self.f.act(s, &frame, &frame_inv);
            if let Some(fr) = self.frames.as_mut() {
                fr[s] = frame.mul(&fr[s]);
            }
            if let Some(fr) = self.frame_invs.as_mut() {
                fr[s] = fr[s].mul(&frame_inv);
            }
        }
        Ok(Ok(()))
    }

    /// Largest condition number among the tracked frames (1 when untracked).
    pub(crate) fn frame_condition(&self) -> f64 {
        let Some(frames) = self.frames.as_ref() else { return 1.0 };
        frames
            .iter()
            .filter(|f| f.rows() > 1)
            .map(|f| {
                let sv = f.to_nalgebra().singular_values();
                let hi = sv.max();
                let lo = sv.min();
                if lo > 0.0 && hi.is_finite() { hi / lo } else { f64::INFINITY }
            })
            .fold(1.0, f64::max)
    }

    fn factor(&mut self, m: &CMat) -> Result<()> {
        let n = m.rows();
        if self.chol.rows() != n {
            self.chol = CMat::zeros(n, n);
            self.inv = CMat::zeros(n, n);
        }
        if !m.is_finite() {
            return Err(Error::NumericalFailure("non-finite marginal during scaling".into()));
        }
        cholesky_into(m, &mut self.chol)?;
        lower_triangular_inverse_into(&self.chol, &mut self.inv);
        if !self.inv.is_finite() {
            return Err(Error::NumericalFailure("non-finite Cholesky inverse".into()));
        }
        Ok(())
    }
}

fn decided(verdict: Verdict, bound: u64, epsilon: f64, note: Option<String>) -> SsDecision {
    SsDecision {
        verdict,
        iterations: 0,
        final_residual: 0.0,
        bound,
        epsilon,
        certificate: note,
        max_post_left_residual: None,
    }
}

/// Decides σ-semistability by scaling Φ_V to the marginals b±(i) = σ±(i)/N.
pub fn decide_sigma_semistable(rep: &Representation, sigma: &Weight, config: &SsConfig) -> Result<SsDecision> {
    let q = rep.quiver();
    if sigma.len() != q.n_vertices() {
        return Err(Error::Shape(format!("weight has {} entries for {} vertices", sigma.len(), q.n_vertices())));
    }
    q.topological_order()?;
    let total = sigma.eval(rep.alpha().as_slice());
    if total != 0 {
        return Ok(decided(Verdict::WeightInfeasible, 0, 0.0, Some(format!("sigma(alpha) = {total}"))));
    }
    let n_mass = sigma.positive_mass(rep.alpha());
    if sigma.is_zero() || n_mass == 0 {
        return Ok(decided(Verdict::Semistable, 0, 0.0, Some("sigma vanishes on the support of alpha".into())));
    }
    let epsilon = config.epsilon_scale / (6.0 * n_mass as f64);
    let alpha = rep.alpha().as_slice();
    let dp: usize = sigma.positive_vertices().iter().map(|&i| alpha[i]).sum();
    let dm: usize = sigma.negative_vertices().iter().map(|&i| alpha[i]).sum();
    let d = dp.max(dm);
    let bound = iteration_bound(n_mass, d, sigma.max_bit_length(), epsilon, config.iter_constant).min(config.max_iters);
    if let Some(note) = rank_precheck(rep, sigma)? {
        return Ok(decided(Verdict::Unstable, bound, epsilon, Some(note)));
    }

    let mut sc = Scaler::new(rep, sigma, true)?;
    let mut progress = Progress { it: 0, res: f64::INFINITY, audit_max: config.audit.then_some(0.0) };
    match scale(rep, sigma, &mut sc, &mut progress, bound, epsilon) {
        // overflow or a failed Cholesky mid-run means the frames have degenerated
        Err(Error::NumericalFailure(_) | Error::NotPsd { .. }) => {
            let Progress { it, res, audit_max } = progress;
            exact_fallback(rep, sigma, &sc, it, res, bound, epsilon, audit_max)
        }
        other => other,
    }
}

struct Progress {
    it: u64,
    res: f64,
    audit_max: Option<f64>,
}

fn scale(
    rep: &Representation,
    sigma: &Weight,
    sc: &mut Scaler,
    p: &mut Progress,
    bound: u64,
    epsilon: f64,
) -> Result<SsDecision> {
    let (pos, neg) = (sc.pos.clone(), sc.neg.clone());
    for it in 1..=bound {
        p.it = it;
        let left = sc.left_marginal();
        let (ok, res) = sc.residual(&left, &neg, epsilon)?;
        p.res = res;
        if ok {
            let right = sc.right_marginal();
            let (ok_r, res_r) = sc.residual(&right, &pos, epsilon)?;
            if ok_r {
                return settle(rep, sigma, sc, it, res.max(res_r), bound, epsilon, p.audit_max);
            }
        }
        if let Err(note) = sc.left_step(&left)? {
            return Ok(finish(Verdict::Unstable, it, res, bound, epsilon, Some(note), p.audit_max));
        }
        let after = sc.left_marginal();
        let res_l = sc.exact_residual(&after, &neg);
        if let Some(m) = p.audit_max.as_mut() {
            *m = m.max(res_l);
        }
        let right = sc.right_marginal();
        let (ok, res) = sc.residual(&right, &pos, epsilon)?;
        p.res = res;
        if ok && res_l <= epsilon {
            return settle(rep, sigma, sc, it, res.max(res_l), bound, epsilon, p.audit_max);
        }
        if let Err(note) = sc.right_step(&right)? {
            return Ok(finish(Verdict::Unstable, it, res, bound, epsilon, Some(note), p.audit_max));
        }
        if it % CONDITION_CHECK_PERIOD == 0 && sc.frame_condition() > FRAME_CONDITION_LIMIT {
            return exact_fallback(rep, sigma, sc, it, res, bound, epsilon, p.audit_max);
        }
    }
    let left = sc.left_marginal();
    if left.iter().any(|m| !m.is_finite()) {
        return Err(Error::NumericalFailure("non-finite marginal after scaling".into()));
    }
    let res = sc.exact_residual(&left, &neg);
    Ok(finish(Verdict::Unstable, bound, res, bound, epsilon, None, p.audit_max))
}

/// Frames worse conditioned than this have lost too many digits for the
/// marginals to be trusted.
const FRAME_CONDITION_LIMIT: f64 = 1e6;
const CONDITION_CHECK_PERIOD: u64 = 8;

/// Accepts a converged scaling, unless the frames are too ill-conditioned
/// for the residual to mean anything.
#[allow(clippy::too_many_arguments)]
fn settle(
    rep: &Representation,
    sigma: &Weight,
    sc: &Scaler,
    it: u64,
    res: f64,
    bound: u64,
    epsilon: f64,
    audit_max: Option<f64>,
) -> Result<SsDecision> {
    if sc.frame_condition() > FRAME_CONDITION_LIMIT {
        return exact_fallback(rep, sigma, sc, it, res, bound, epsilon, audit_max);
    }
    Ok(finish(Verdict::Semistable, it, res, bound, epsilon, None, audit_max))
}

/// Float scaling has degenerated; decide with the exact maximizer strategies.
#[allow(clippy::too_many_arguments)]
fn exact_fallback(
    rep: &Representation,
    sigma: &Weight,
    sc: &Scaler,
    it: u64,
    res: f64,
    bound: u64,
    epsilon: f64,
    audit_max: Option<f64>,
) -> Result<SsDecision> {
    let kappa = sc.frame_condition();
    let registry = StrategyRegistry::default();
    let opts = KingOptions::default();
    for name in ["exact-combinatorial", "wong-sequence"] {
        let strategy = registry.get(name).expect("built-in strategy");
        let Some(m) = strategy.min_maximizer(rep, sigma, &opts)? else { continue };
        let verdict = if m.value > 0 {
            Verdict::Unstable
        } else if m.extremal {
            Verdict::Semistable
        } else {
            continue;
        };
        let note = format!(
            "scaling frames reached condition {kappa:.1e}; decided by {name}: subrepresentation {:?} with value {}",
            m.w.dims(),
            m.value
        );
        return Ok(finish(verdict, it, res, bound, epsilon, Some(note), audit_max));
    }
    Err(Error::NumericalFailure(format!("scaling frames reached condition {kappa:.1e} and no exact strategy certified a verdict")))
}

fn finish(
    verdict: Verdict,
    iterations: u64,
    final_residual: f64,
    bound: u64,
    epsilon: f64,
    certificate: Option<String>,
    max_post_left_residual: Option<f64>,
) -> SsDecision {
    SsDecision { verdict, iterations, final_residual, bound, epsilon, certificate, max_post_left_residual }
}
