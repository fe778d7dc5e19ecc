//! Exact bottleneck distance between persistence diagrams.
//!
//! The answer is always one of the candidate costs: an L∞ distance between
//! two points, or a point's distance to the diagonal. We binary-search the
//! sorted candidates with a matching-based feasibility test.
//!
//! Feasibility at threshold t: every point farther than t from the diagonal
//! must be matched to a point of the other diagram within L∞ distance t.
//! By the Mendelsohn–Dulmage theorem such a matching exists iff one
//! matching covers the forced points of the first diagram and another
//! covers the forced points of the second, so two maximum matchings decide
//! it.

use std::collections::VecDeque;

use super::persistence::PersistenceDiagram;

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn diagonal_cost(p: (f64, f64)) -> f64 {
    (p.1 - p.0) / 2.0
}

/// Bottleneck distance with unmatched points paying their distance to the
/// diagonal.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram) -> f64 {
    let (pa, pb) = (a.points(), b.points());
    if pa.is_empty() && pb.is_empty() {
        return 0.0;
    }
    let mut cand: Vec<f64> = Vec::with_capacity(pa.len() * pb.len() + pa.len() + pb.len() + 1);
    cand.push(0.0);
    cand.extend(pa.iter().chain(pb).map(|&p| diagonal_cost(p)));
    for &p in pa {
        cand.extend(pb.iter().map(|&q| linf(p, q)));
    }
    cand.sort_unstable_by(f64::total_cmp);
    cand.dedup();

    // the largest candidate is always feasible: everything goes to the diagonal
    let (mut lo, mut hi) = (0, cand.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(pa, pb, cand[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cand[lo]
}

fn feasible(a: &[(f64, f64)], b: &[(f64, f64)], t: f64) -> bool {
    covers_forced(a, b, t) && covers_forced(b, a, t)
}

/// Is there a matching covering every point of `left` with diagonal cost
/// above `t`, using edges of L∞ cost at most `t`?
fn covers_forced(left: &[(f64, f64)], right: &[(f64, f64)], t: f64) -> bool {
    let forced: Vec<(f64, f64)> = left.iter().copied().filter(|&p| diagonal_cost(p) > t).collect();
    if forced.is_empty() {
        return true;
    }
    if forced.len() > right.len() {
        return false;
    }
    let adj: Vec<Vec<usize>> = forced
        .iter()
        .map(|&p| (0..right.len()).filter(|&j| linf(p, right[j]) <= t).collect())
        .collect();
    if adj.iter().any(Vec::is_empty) {
        return false;
    }
    hopcroft_karp(&adj, right.len()) == forced.len()
}

/// Maximum bipartite matching size.
fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> usize {
    const NIL: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![NIL; n_left];
    let mut match_r = vec![NIL; n_right];
    let mut dist = vec![0usize; n_left];
    let mut size = 0;

    // greedy start
    for u in 0..n_left {
        if let Some(&v) = adj[u].iter().find(|&&v| match_r[v] == NIL) {
            match_l[u] = v;
            match_r[v] = u;
            size += 1;
        }
    }

    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return size;
        }
        let mut next_edge = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == NIL && augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut next_edge) {
                size += 1;
            }
        }
    }
}

// Iterative DFS along the BFS layers.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    const NIL: usize = usize::MAX;
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if next_edge[u] == adj[u].len() {
            dist[u] = usize::MAX;
            stack.pop();
            continue;
        }
        let v = adj[u][next_edge[u]];
        next_edge[u] += 1;
        let w = match_r[v];
        if w == NIL {
            // flip the path: each stacked left vertex takes the edge it last tried
            for &x in stack.iter().rev() {
                let y = adj[x][next_edge[x] - 1];
                match_l[x] = y;
                match_r[y] = x;
            }
            return true;
        }
        if dist[w] == dist[u] + 1 {
            stack.push(w);
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(p: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::new(p.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        let a = diag(&[(0.0, 2.0)]);
        assert_eq!(bottleneck_distance(&a, &a), 0.0);
        assert_eq!(bottleneck_distance(&a, &diag(&[(0.0, 2.5)])), 0.5);
        assert_eq!(bottleneck_distance(&a, &diag(&[])), 1.0);
        assert_eq!(bottleneck_distance(&diag(&[]), &diag(&[])), 0.0);
    }

    #[test]
    fn symmetric() {
        let a = diag(&[(0.0, 1.0), (0.5, 3.0), (0.0, 0.2)]);
        let b = diag(&[(0.1, 1.2), (0.0, 4.0)]);
        assert_eq!(bottleneck_distance(&a, &b), bottleneck_distance(&b, &a));
    }

    #[test]
    fn matching_needs_augmenting_paths() {
        // greedy would pair a0-b0 and strand a1; the optimum crosses
        let a = diag(&[(0.0, 10.0), (0.0, 10.4)]);
        let b = diag(&[(0.0, 10.3), (0.0, 10.0)]);
        assert_eq!(bottleneck_distance(&a, &b), linf((0.0, 10.4), (0.0, 10.3)));
    }

    #[test]
    fn hopcroft_karp_sizes() {
        assert_eq!(hopcroft_karp(&[vec![0, 1], vec![0], vec![1]], 2), 2);
        assert_eq!(hopcroft_karp(&[vec![0], vec![0]], 1), 1);
        assert_eq!(hopcroft_karp(&[vec![1], vec![0, 1], vec![2, 1]], 3), 3);
    }
}
