//! Lower sets of digraphs: exhaustive enumeration and maximum-weight closure.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Default cap on the ground-set size for exhaustive lower-set sweeps.
pub const DEFAULT_LOWERSET_LIMIT: usize = 24;

/// Node order in which every node comes after all of its successors.
fn successors_first(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = succ.len();
    let mut state = vec![0u8; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(&mut (v, ref mut k)) = stack.last_mut() {
            if *k < succ[v].len() {
                let w = succ[v][*k];
                *k += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return None,
                    _ => {}
                }
            } else {
                state[v] = 2;
                order.push(v);
                stack.pop();
            }
        }
    }
    Some(order)
}

/// Calls `f` on every lower set (successor-closed subset) of an acyclic digraph.
pub fn for_each_lower_set(succ: &[Vec<usize>], limit: usize, mut f: impl FnMut(&[bool])) -> Result<()> {
    let n = succ.len();
    if n > limit {
        return Err(Error::LowerSetLimit { size: n, limit });
    }
    let order = successors_first(succ).ok_or_else(|| Error::Cycle(vec!["lower-set digraph".into()]))?;
    let mut member = vec![false; n];
    rec(succ, &order, 0, &mut member, &mut f);
    Ok(())
}

fn rec(succ: &[Vec<usize>], order: &[usize], k: usize, member: &mut [bool], f: &mut impl FnMut(&[bool])) {
    if k == order.len() {
        f(member);
        return;
    }
    let v = order[k];
    rec(succ, order, k + 1, member, f);
    if succ[v].iter().all(|&w| member[w]) {
        member[v] = true;
        rec(succ, order, k + 1, member, f);
        member[v] = false;
    }
}

/// All lower sets, as membership vectors.
pub fn lower_sets(succ: &[Vec<usize>], limit: usize) -> Result<Vec<Vec<bool>>> {
    let mut out = Vec::new();
    for_each_lower_set(succ, limit, |m| out.push(m.to_vec()))?;
    Ok(out)
}

/// Maximum of Σ_{v∈X} w(v) over successor-closed X, with the inclusion-minimal
/// maximizer. Works on any digraph (max-flow on the closure network).
pub fn max_weight_closure(succ: &[Vec<usize>], w: &[i64]) -> (i64, Vec<bool>) {
    let n = succ.len();
    let (src, sink) = (n, n + 1);
    let inf: i64 = w.iter().map(|x| x.abs()).sum::<i64>() + 1;
    let mut g = FlowGraph::new(n + 2);
    for v in 0..n {
        if w[v] > 0 {
            g.add(src, v, w[v]);
        } else if w[v] < 0 {
            g.add(v, sink, -w[v]);
        }
        for &u in &succ[v] {
            g.add(v, u, inf);
        }
    }
    let flow = g.max_flow(src, sink);
    let positive: i64 = w.iter().filter(|&&x| x > 0).sum();
    let reach = g.reachable(src);
    (positive - flow, reach[..n].to_vec())
}

struct FlowGraph {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        FlowGraph { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    fn add(&mut self, u: usize, v: usize, c: i64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let mut prev = vec![usize::MAX; self.head.len()];
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &e in &self.head[u] {
                    let v = self.to[e];
                    if !seen[v] && self.cap[e] > 0 {
                        seen[v] = true;
                        prev[v] = e;
                        q.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while v != s {
                let e = prev[v];
                push = push.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = prev[v];
                self.cap[e] -= push;
                self.cap[e ^ 1] += push;
                v = self.to[e ^ 1];
            }
            total += push;
        }
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if !seen[v] && self.cap[e] > 0 {
                    seen[v] = true;
                    q.push_back(v);
                }
            }
        }
        seen
    }
}
