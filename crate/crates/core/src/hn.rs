//! Harder-Narasimhan filtrations by sweeping candidate slopes, and the coarse
//! Dulmage-Mendelsohn decomposition of a linear matrix.
//!
//! For λ = p/q the function f_λ(W) = λ·τ(W) − σ(W) is minimized exactly where
//! σ' = qσ − pτ is maximized, so the largest minimizer is a maximum King
//! maximizer. These grow as λ decreases and jump at the HN slopes.

use num_integer::Integer;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::king::{extremal_maximizer, Extreme, KingOptions};
use crate::numerics::{ExactMatrix, Subspace};
use crate::quiver::{quotient_representation, Quiver, Representation, Slope, Subrepresentation, Weight};

#[derive(Clone, Debug, PartialEq)]
pub struct HNFiltration {
    /// {0} = W₀ < W₁ < … < W_k = V.
    pub chain: Vec<Subrepresentation>,
    /// μ(W_i / W_{i−1}) for i = 1..k.
    pub slopes: Vec<Rational64>,
    /// Candidate values λ at which the chain grew.
    pub criticals: Vec<Rational64>,
    /// Every chain step was produced by a certified extremal maximizer.
    pub certified: bool,
}

impl HNFiltration {
    /// Successive quotients W_i / W_{i−1}.
    pub fn quotients(&self, rep: &Representation) -> Result<Vec<Representation>> {
        self.chain.windows(2).map(|w| quotient_representation(rep, &w[0], &w[1])).collect()
    }
}

/// qσ − pτ.
pub fn slope_to_weight(sigma: &Weight, tau: &Weight, p: i64, q: i64) -> Result<Weight> {
    if q <= 0 {
        return Err(Error::InvalidSlope(format!("denominator {q} must be positive")));
    }
    if sigma.len() != tau.len() {
        return Err(Error::Shape("sigma and tau have different lengths".into()));
    }
    Ok(Weight(sigma.0.iter().zip(&tau.0).map(|(s, t)| q * s - p * t).collect()))
}

/// Distinct p/q with p ∈ [−σ⁻(α), σ⁺(α)] and q ∈ [1, τ(α)], largest first.
pub fn candidate_slopes(rep: &Representation, sigma: &Weight, tau: &Weight) -> Vec<Rational64> {
    let alpha = rep.alpha();
    let lo = -sigma.negative_mass(alpha);
    let hi = sigma.positive_mass(alpha);
    let qmax = tau.eval(alpha.as_slice()).max(1);
    let mut out: Vec<Rational64> = (1..=qmax).flat_map(|q| (lo..=hi).map(move |p| Rational64::new(p, q))).collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out.dedup();
    out
}

fn slope_of(sigma: &Weight, tau: &Weight, d: &[usize]) -> Result<Rational64> {
    let t = tau.eval(d);
    if t == 0 {
        return Err(Error::InvalidSlope("a filtration quotient has τ = 0".into()));
    }
    Ok(Rational64::new(sigma.eval(d), t))
}

pub fn hn_filtration(rep: &Representation, sigma: &Weight, tau: &Weight) -> Result<HNFiltration> {
    hn_filtration_with(rep, &Slope::new(sigma.clone(), tau.clone())?, &KingOptions::default())
}

pub fn hn_filtration_with(rep: &Representation, slope: &Slope, opts: &KingOptions) -> Result<HNFiltration> {
    let (sigma, tau) = (&slope.sigma, &slope.tau);
    if sigma.len() != rep.quiver().n_vertices() {
        return Err(Error::Shape(format!("weight has {} entries for {} vertices", sigma.len(), rep.quiver().n_vertices())));
    }
    rep.quiver().topological_order()?;
    if !slope.relaxed && !slope.strictly_monotone_on(rep)? {
        return Err(Error::InvalidSlope("τ vanishes on a nonzero subrepresentation".into()));
    }
    let full = Subrepresentation::full(rep);
    let mut chain = vec![Subrepresentation::zero(rep)];
    let mut criticals = Vec::new();
    let mut certified = true;
    for lam in candidate_slopes(rep, sigma, tau) {
        let last = chain.last().expect("nonempty");
        if *last == full {
            break;
        }
        let w_sigma = slope_to_weight(sigma, tau, *lam.numer(), *lam.denom())?;
        let m = extremal_maximizer(rep, &w_sigma, Extreme::Max, opts)?;
        certified &= m.extremal;
        if m.w == *last {
            continue;
        }
        if !m.w.contains(last) {
            return Err(Error::NumericalFailure(format!("maximizers at λ = {lam} are not nested")));
        }
        chain.push(m.w);
        criticals.push(lam);
    }
    if *chain.last().expect("nonempty") != full {
        // only reachable when τ vanishes on the final quotient in relaxed mode
        return Err(Error::InvalidSlope("slope sweep did not reach the whole representation".into()));
    }
    let mut slopes = Vec::with_capacity(chain.len() - 1);
    for w in chain.windows(2) {
        let d: Vec<usize> = w[1].dims().iter().zip(w[0].dims()).map(|(a, b)| a - b).collect();
        slopes.push(slope_of(sigma, tau, &d)?);
    }
    Ok(HNFiltration { chain, slopes, criticals, certified })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoarseDm {
    pub filtration: HNFiltration,
    /// Dimension of the common kernel removed before the sweep.
    pub kernel_dim: usize,
    /// Column flag K = Y₀ ⊂ Y₁ ⊂ … ⊂ Y_k = ℂⁿ in original coordinates.
    pub column_flags: Vec<Subspace>,
    /// Row flags X_i = (𝒜Y_i)^⊥.
    pub row_flags: Vec<Subspace>,
    /// (rows, columns) of each diagonal block.
    pub blocks: Vec<(usize, usize)>,
}

/// 𝒜Y = Σ_k A_k Y.
pub fn apply_matrix_space(matrices: &[ExactMatrix], y: &Subspace) -> Subspace {
    let rows = matrices.first().map(ExactMatrix::rows).unwrap_or(0);
    matrices.iter().fold(Subspace::zero(rows), |acc, a| acc.sum(&y.image_under(a)))
}

/// Coarse DM decomposition of the linear matrix Σ x_k A_k as the HN filtration
/// of the Kronecker representation with σ = (1, 0), τ = (0, 1).
pub fn coarse_dm(matrices: &[ExactMatrix]) -> Result<CoarseDm> {
    coarse_dm_with(matrices, &KingOptions::default())
}

pub fn coarse_dm_with(matrices: &[ExactMatrix], opts: &KingOptions) -> Result<CoarseDm> {
    let first = matrices.first().ok_or_else(|| Error::EmptyInput("no matrices given".into()))?;
    let (rows, cols) = first.shape();
    if let Some(bad) = matrices.iter().find(|m| m.shape() != (rows, cols)) {
        return Err(Error::Shape(format!("matrix of shape {:?} among {rows}x{cols}", bad.shape())));
    }
    let kernel = matrices.iter().fold(Subspace::full(cols), |acc, a| acc.intersection(&Subspace::preimage(a, &Subspace::zero(rows))));
    let comp = Subspace::full(cols).complement_of(&kernel);
    if comp.cols() == 0 || rows == 0 {
        return Err(Error::EmptyInput("the matrix space is zero after deleting the common kernel".into()));
    }
    let edges: Vec<(usize, usize)> = (0..matrices.len()).map(|_| (0, 1)).collect();
    let mats: Vec<ExactMatrix> = matrices.iter().map(|a| a.mul(&comp)).collect();
    let rep = Representation::new(Quiver::from_edges(2, &edges), vec![comp.cols(), rows], mats)?;
    let slope = Slope::new(Weight(vec![1, 0]), Weight(vec![0, 1]))?.relaxed();
    let filtration = hn_filtration_with(&rep, &slope, opts)?;
    let mut column_flags = Vec::new();
    let mut row_flags = Vec::new();
    for w in &filtration.chain {
        let y = kernel.sum(&w.space(0).image_under(&comp));
        row_flags.push(apply_matrix_space(matrices, &y).annihilator());
        column_flags.push(y);
    }
    let blocks = filtration
        .chain
        .windows(2)
        .map(|w| (w[1].space(1).dim() - w[0].space(1).dim(), w[1].space(0).dim() - w[0].space(0).dim()))
        .collect();
    Ok(CoarseDm { filtration, kernel_dim: kernel.dim(), column_flags, row_flags, blocks })
}

/// Lowest-terms (p, q) of a slope, q > 0.
pub fn slope_parts(r: &Rational64) -> (i64, i64) {
    let g = r.numer().gcd(r.denom()).max(1);
    (r.numer() / g, r.denom() / g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::GaussRat;
    use crate::quiver::scalar_representation;
    use crate::semistability::{decide_sigma_semistable, SsConfig, Verdict};

    #[test]
    fn weight_arithmetic() {
        let s = Weight(vec![1, -1]);
        let t = Weight(vec![1, 1]);
        assert_eq!(slope_to_weight(&s, &t, 0, 3).unwrap(), Weight(vec![3, -3]));
        assert!(slope_to_weight(&s, &s, 1, 1).unwrap().is_zero());
        assert_eq!(slope_to_weight(&s, &t, 1, 2).unwrap(), Weight(vec![1, -3]));
        assert!(matches!(slope_to_weight(&s, &t, 1, 0), Err(Error::InvalidSlope(_))));
    }

    #[test]
    fn semistable_gives_one_step() {
        let one = GaussRat::one();
        let rep = scalar_representation(2, &[(0, 1)], &[one]);
        let f = hn_filtration(&rep, &Weight(vec![1, -1]), &Weight(vec![1, 1])).unwrap();
        assert_eq!(f.chain.len(), 2);
        assert_eq!(f.slopes, vec![Rational64::new(0, 1)]);
    }

    #[test]
    fn zero_arc_splits() {
        let rep = scalar_representation(2, &[(0, 1)], &[GaussRat::zero()]);
        let f = hn_filtration(&rep, &Weight(vec![1, -1]), &Weight(vec![1, 1])).unwrap();
        let dims: Vec<Vec<usize>> = f.chain.iter().map(|w| w.dims()).collect();
        assert_eq!(dims, vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
        assert_eq!(f.slopes, vec![Rational64::new(1, 1), Rational64::new(-1, 1)]);
        for (q, s) in f.quotients(&rep).unwrap().iter().zip(&f.slopes) {
            let (p, d) = slope_parts(s);
            let w = slope_to_weight(&Weight(vec![1, -1]), &Weight(vec![1, 1]), p, d).unwrap();
            assert_eq!(decide_sigma_semistable(q, &w, &SsConfig::default()).unwrap().verdict, Verdict::Semistable);
        }
    }

    #[test]
    fn rejects_degenerate_tau() {
        let rep = scalar_representation(2, &[(0, 1)], &[GaussRat::one()]);
        assert!(hn_filtration(&rep, &Weight(vec![1, -1]), &Weight(vec![0, 1])).is_ok());
        assert!(matches!(hn_filtration(&rep, &Weight(vec![1, -1]), &Weight(vec![1, 0])), Err(Error::InvalidSlope(_))));
        assert!(matches!(hn_filtration(&rep, &Weight(vec![1, -1]), &Weight(vec![-1, 1])), Err(Error::InvalidSlope(_))));
    }

    #[test]
    fn coarse_dm_examples() {
        let d = coarse_dm(&[ExactMatrix::identity(3)]).unwrap();
        assert_eq!(d.blocks, vec![(3, 3)]);
        assert!(matches!(coarse_dm(&[]), Err(Error::EmptyInput(_))));
        assert!(matches!(coarse_dm(&[ExactMatrix::zeros(2, 2)]), Err(Error::EmptyInput(_))));
        // [[x, y, *], [0, 0, x], [0, 0, y]]: a 1x2 block above a 2x1 block
        let a = ExactMatrix::from_i64(&[&[1, 0, 2], &[0, 0, 1], &[0, 0, 0]]);
        let b = ExactMatrix::from_i64(&[&[0, 1, 3], &[0, 0, 0], &[0, 0, 1]]);
        let d = coarse_dm(&[a, b]).unwrap();
        assert_eq!(d.blocks, vec![(1, 2), (2, 1)]);
        let dims: Vec<(usize, usize)> = d.row_flags.iter().zip(&d.column_flags).map(|(x, y)| (x.dim(), y.dim())).collect();
        assert_eq!(dims, vec![(3, 0), (2, 2), (0, 3)]);
        let k = coarse_dm(&[ExactMatrix::from_i64(&[&[1, 0], &[0, 0]])]).unwrap();
        assert_eq!(k.kernel_dim, 1);
    }
}
