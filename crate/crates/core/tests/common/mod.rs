//! Instance generators and brute-force oracles shared by integration tests.
#![allow(dead_code)]

use quiverss::numerics::{ExactMatrix, GaussRat};
use quiverss::quiver::{scalar_representation, Quiver, Representation, Weight};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn gint(re: i64, im: i64) -> GaussRat {
    GaussRat::from_ints(re, im)
}

pub fn random_gint(rng: &mut ChaCha8Rng, r: i64) -> GaussRat {
    gint(rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

/// Integer weights with |σ(i)| ≤ bound and Σ σ(i)·α(i) = 0.
pub fn balanced_weights(alpha: &[usize], bound: i64) -> Vec<Weight> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in alpha {
        out = out.into_iter().flat_map(|w| (-bound..=bound).map(move |s| [w.clone(), vec![s]].concat())).collect();
    }
    out.into_iter()
        .filter(|w| w.iter().zip(alpha).map(|(s, &a)| s * a as i64).sum::<i64>() == 0)
        .map(Weight)
        .collect()
}

/// A random nonzero balanced weight, or zero when none exists within `bound`.
pub fn random_balanced_weight(rng: &mut ChaCha8Rng, alpha: &[usize], bound: i64) -> Weight {
    for _ in 0..10_000 {
        let w: Vec<i64> = alpha.iter().map(|_| rng.gen_range(-bound..=bound)).collect();
        if w.iter().zip(alpha).map(|(s, &a)| s * a as i64).sum::<i64>() == 0 && w.iter().any(|&s| s != 0) {
            return Weight(w);
        }
    }
    let nonzero: Vec<Weight> = balanced_weights(alpha, bound).into_iter().filter(|w| !w.is_zero()).collect();
    nonzero.choose(rng).cloned().unwrap_or_else(|| Weight(vec![0; alpha.len()]))
}

/// Every α ≡ 1 instance on n vertices whose arcs go i → j with i < j, at most one
/// arc per pair, at most `max_arcs` arcs, each valued 0 or 1.
pub fn simple_scalar_dags(n: usize, max_arcs: usize) -> Vec<Representation> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|k| mask & (1 << k) != 0).map(|k| pairs[k]).collect();
        if edges.len() > max_arcs {
            continue;
        }
        for vals in 0u32..(1 << edges.len()) {
            let values: Vec<GaussRat> = (0..edges.len()).map(|k| GaussRat::from_i64(((vals >> k) & 1) as i64)).collect();
            out.push(scalar_representation(n, &edges, &values));
        }
    }
    out
}

/// α ≡ 1 instances on n vertices with parallel arcs: per pair i < j, a number of
/// 1-valued and 0-valued arcs, at most `max_arcs` arcs in total.
pub fn parallel_scalar_dags(n: usize, max_arcs: usize) -> Vec<Representation> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut counts = vec![(0usize, 0usize); pairs.len()];
    fn rec(k: usize, left: usize, pairs: &[(usize, usize)], counts: &mut Vec<(usize, usize)>, n: usize, out: &mut Vec<Representation>) {
        if k == pairs.len() {
            let mut edges = Vec::new();
            let mut values = Vec::new();
            for (p, &(ones, zeros)) in pairs.iter().zip(counts.iter()) {
                for _ in 0..ones {
                    edges.push(*p);
                    values.push(GaussRat::one());
                }
                for _ in 0..zeros {
                    edges.push(*p);
                    values.push(GaussRat::zero());
                }
            }
            out.push(scalar_representation(n, &edges, &values));
            return;
        }
        for ones in 0..=left {
            for zeros in 0..=left - ones {
                counts[k] = (ones, zeros);
                rec(k + 1, left - ones - zeros, pairs, counts, n, out);
            }
        }
    }
    rec(0, max_arcs, &pairs, &mut counts, n, &mut out);
    out
}

/// Random acyclic quiver on n vertices (arcs i → j, i < j, parallel allowed).
pub fn random_dag_edges(rng: &mut ChaCha8Rng, n: usize, max_arcs: usize) -> Vec<(usize, usize)> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    if pairs.is_empty() {
        return Vec::new();
    }
    let m = rng.gen_range(1..=max_arcs);
    (0..m).map(|_| *pairs.choose(rng).expect("pairs")).collect()
}

/// Random rank-one representation: V(a) = v·fᵀ with factor entries in [−r, r] + i[−r, r].
pub fn random_rank_one(rng: &mut ChaCha8Rng, n: usize, alpha_max: usize, max_arcs: usize, r: i64) -> Representation {
    let edges = random_dag_edges(rng, n, max_arcs);
    let alpha: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=alpha_max)).collect();
    let mats = edges
        .iter()
        .map(|&(t, h)| {
            let v: Vec<GaussRat> = (0..alpha[h]).map(|_| random_gint(rng, r)).collect();
            let f: Vec<GaussRat> = (0..alpha[t]).map(|_| random_gint(rng, r)).collect();
            ExactMatrix::column_vector(&v).mul(&ExactMatrix::row_vector(&f))
        })
        .collect();
    Representation::new(Quiver::from_edges(n, &edges), alpha, mats).expect("shapes")
}

/// Subsets of 0..n closed under the successor relation of the nonzero arcs.
pub fn closed_vertex_sets(rep: &Representation) -> Vec<Vec<bool>> {
    let n = rep.quiver().n_vertices();
    let arcs: Vec<(usize, usize)> = rep.support_arcs().iter().map(|&k| (rep.quiver().arc(k).tail, rep.quiver().arc(k).head)).collect();
    (0u32..(1 << n))
        .map(|m| (0..n).map(|i| m & (1 << i) != 0).collect::<Vec<bool>>())
        .filter(|x| arcs.iter().all(|&(t, h)| !x[t] || x[h]))
        .collect()
}

pub fn weight_of(sigma: &Weight, x: &[bool]) -> i64 {
    x.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| sigma.get(i)).sum()
}

/// Rank over ℤ[i] by fraction-free elimination on i128 pairs.
pub fn gauss_int_rank(rows: &[Vec<(i128, i128)>]) -> usize {
    type C = (i128, i128);
    let mul = |a: C, b: C| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let sub = |a: C, b: C| (a.0 - b.0, a.1 - b.1);
    let div = |a: C, b: C| {
        let n = b.0 * b.0 + b.1 * b.1;
        let p = mul(a, (b.0, -b.1));
        assert!(p.0 % n == 0 && p.1 % n == 0, "inexact Bareiss division");
        (p.0 / n, p.1 / n)
    };
    let mut m: Vec<Vec<C>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev: C = (1, 0);
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != (0, 0)) else { continue };
        m.swap(rank, p);
        let piv = m[rank][c];
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest {
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(pivot_row) {
                *x = div(sub(mul(piv, *x), mul(f, y)), prev);
            }
        }
        prev = piv;
        rank += 1;
    }
    rank
}

pub fn to_pairs(v: &[GaussRat]) -> Vec<(i128, i128)> {
    v.iter()
        .map(|x| {
            assert!(x.re.is_integer() && x.im.is_integer(), "integral entries expected");
            (x.re.to_integer().try_into().unwrap(), x.im.to_integer().try_into().unwrap())
        })
        .collect()
}

/// Random acyclic representation with dense Gaussian-integer matrices; `sparsity`
/// is the chance of an entry being zero.
pub fn random_dense_rep(rng: &mut ChaCha8Rng, n: usize, alpha_max: usize, max_arcs: usize, r: i64, sparsity: f64) -> Representation {
    let edges = random_dag_edges(rng, n, max_arcs);
    let alpha: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=alpha_max)).collect();
    let mats = edges
        .iter()
        .map(|&(t, h)| {
            let data = (0..alpha[h] * alpha[t]).map(|_| if rng.gen_bool(sparsity) { GaussRat::zero() } else { random_gint(rng, r) }).collect();
            ExactMatrix::from_vec(alpha[h], alpha[t], data).expect("shape")
        })
        .collect();
    Representation::new(Quiver::from_edges(n, &edges), alpha, mats).expect("shapes")
}

/// Random invertible d×d Gaussian-integer matrix with small entries.
pub fn random_invertible(rng: &mut ChaCha8Rng, d: usize) -> ExactMatrix {
    loop {
        let data = (0..d * d).map(|_| random_gint(rng, 2)).collect();
        let m = ExactMatrix::from_vec(d, d, data).expect("shape");
        if m.rank() == d {
            return m;
        }
    }
}

/// V(a) ↦ G_{ha}·V(a)·G_{ta}⁻¹.
pub fn change_frames(rep: &Representation, frames: &[ExactMatrix]) -> Representation {
    let invs: Vec<ExactMatrix> = frames.iter().map(|g| g.inverse().expect("invertible frame")).collect();
    let mats = rep
        .quiver()
        .arcs()
        .iter()
        .enumerate()
        .map(|(k, a)| frames[a.head].mul(rep.matrix(k)).mul(&invs[a.tail]))
        .collect();
    Representation::new(rep.quiver().clone(), rep.alpha().as_slice().to_vec(), mats).expect("shapes")
}
