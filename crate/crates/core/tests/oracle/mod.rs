//! Reference computations for the tests, written against the raw edge list
//! only so they share no code with the library's distance module.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use lbkit::gadgets::{Bits, Instance};
use lbkit::{Graph, Owner, Rational};
use num_bigint::BigUint;

pub type Adj = Vec<Vec<(usize, u64)>>;

pub fn adjacency(g: &Graph, keep: Option<&[bool]>) -> Adj {
    let mut adj = vec![Vec::new(); g.n()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if keep.is_some_and(|k| !k[e]) {
            continue;
        }
        let w = g.weight(e) as u64;
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    adj
}

/// Shortest distances; `None` when unreachable.
pub fn sssp(adj: &Adj, s: usize) -> Vec<Option<u64>> {
    let unit = adj.iter().flatten().all(|&(_, w)| w == 1);
    let mut dist = vec![None; adj.len()];
    dist[s] = Some(0);
    if unit {
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            let d = dist[u].unwrap();
            for &(v, _) in &adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    q.push_back(v);
                }
            }
        }
    } else {
        let mut heap = BinaryHeap::from([Reverse((0u64, s))]);
        while let Some(Reverse((d, u))) = heap.pop() {
            if dist[u].is_some_and(|x| x < d) {
                continue;
            }
            for &(v, w) in &adj[u] {
                let nd = d + w;
                if dist[v].is_none_or(|x| nd < x) {
                    dist[v] = Some(nd);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
    }
    dist
}

/// Eccentricity of every node of a connected graph.
pub fn eccentricities(g: &Graph) -> Vec<u64> {
    let adj = adjacency(g, None);
    (0..g.n())
        .map(|s| {
            sssp(&adj, s)
                .into_iter()
                .map(|d| d.expect("connected"))
                .max()
                .unwrap()
        })
        .collect()
}

pub fn diameter(g: &Graph) -> u64 {
    eccentricities(g).into_iter().max().unwrap()
}

pub fn radius(g: &Graph) -> u64 {
    eccentricities(g).into_iter().min().unwrap()
}

pub fn intersecting(sa: &Bits, sb: &Bits) -> bool {
    sa.iter().zip(sb.iter()).any(|(a, b)| *a && *b)
}

/// Edges whose endpoints have different owners.
pub fn cut_count(g: &Graph, owners: &[Owner]) -> usize {
    g.edges().iter().filter(|&&(u, v)| owners[u] != owners[v]).count()
}

pub fn max_degree(g: &Graph) -> usize {
    let mut deg = vec![0; g.n()];
    for &(u, v) in g.edges() {
        deg[u] += 1;
        deg[v] += 1;
    }
    deg.into_iter().max().unwrap_or(0)
}

/// `m <= c n log2 n`, i.e. `2^m <= n^(c n)`, for integer `c`.
pub fn sparse(m: usize, n: usize, c: u32) -> bool {
    let rhs = BigUint::from(n).pow(c * n as u32);
    rhs.bits() > m as u64
}

/// H as an edge mask.
pub fn h_mask(inst: &Instance) -> Vec<bool> {
    let mut keep = vec![false; inst.graph.edge_count()];
    for &e in inst.h_edges.as_ref().expect("spanner instance") {
        keep[e] = true;
    }
    keep
}

/// Exact all-pairs check of `d_H <= alpha d_G + beta`.
pub fn spanner_ok(inst: &Instance, alpha: Rational, beta: Rational) -> bool {
    let keep = h_mask(inst);
    let g = &inst.graph;
    spanner_ok_on(&adjacency(g, None), &adjacency(g, Some(&keep)), g.n(), alpha, beta)
}

/// The spanner inequality over all pairs of nodes `0..nodes`.
pub fn spanner_ok_on(ga: &Adj, ha: &Adj, nodes: usize, alpha: Rational, beta: Rational) -> bool {
    (0..nodes).all(|s| {
        let dg = sssp(ga, s);
        let dh = sssp(ha, s);
        (0..nodes).all(|v| match dh[v] {
            None => false,
            Some(dh) => Rational::from_integer(dh as i64) <= alpha * Rational::from_integer(dg[v].unwrap() as i64) + beta,
        })
    })
}

/// Unit-length subdivision of G and of H; original nodes keep their ids.
pub fn subdivide(g: &Graph, keep: &[bool]) -> (Adj, Adj) {
    let mut full: Adj = vec![Vec::new(); g.n()];
    let mut h: Adj = vec![Vec::new(); g.n()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let mut prev = u;
        for step in 1..=g.weight(e) as usize {
            let next = if step == g.weight(e) as usize {
                v
            } else {
                full.push(Vec::new());
                h.push(Vec::new());
                full.len() - 1
            };
            full[prev].push((next, 1));
            full[next].push((prev, 1));
            if keep[e] {
                h[prev].push((next, 1));
                h[next].push((prev, 1));
            }
            prev = next;
        }
    }
    (full, h)
}
