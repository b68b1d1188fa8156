use std::collections::VecDeque;

use super::SparseMatrix;

/// Adjacency lists of the symmetrised pattern of `a`, without the diagonal.
fn symmetric_adjacency(a: &SparseMatrix) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in a.row(i) {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

/// BFS level structure from `root`; returns (visit order, last level).
fn bfs(adj: &[Vec<usize>], keep: &[bool], root: usize, seen: &mut [u32], stamp: u32) -> (Vec<usize>, Vec<usize>) {
    let mut order = vec![root];
    seen[root] = stamp;
    let mut level_start = 0;
    let mut last = vec![root];
    while level_start < order.len() {
        let level_end = order.len();
        for k in level_start..level_end {
            let v = order[k];
            for &w in &adj[v] {
                if keep[w] && seen[w] != stamp {
                    seen[w] = stamp;
                    order.push(w);
                }
            }
        }
        if order.len() > level_end {
            last = order[level_end..].to_vec();
        }
        level_start = level_end;
    }
    (order, last)
}

/// Reverse Cuthill-McKee permutation: `perm[k]` is the original index placed
/// at position `k`.
///
/// Rows whose degree exceeds `10 sqrt(n)` (e.g. constraint multipliers) are
/// left out of the band and placed last.
pub fn rcm_ordering(a: &SparseMatrix) -> Vec<usize> {
    let n = a.nrows();
    let adj = symmetric_adjacency(a);
    let dense_cut = ((10.0 * (n as f64).sqrt()) as usize).max(16);
    let keep: Vec<bool> = adj.iter().map(|l| l.len() <= dense_cut).collect();
    let degree = |v: usize| adj[v].iter().filter(|&&w| keep[w]).count();

    let mut placed = vec![false; n];
    let mut seen = vec![0u32; n];
    let mut stamp = 0u32;
    let mut perm = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).filter(|&v| keep[v]).collect();
    by_degree.sort_by_key(|&v| degree(v));

    for &start in &by_degree {
        if placed[start] {
            continue;
        }
        // pseudo-peripheral root by repeated BFS
        let mut root = start;
        let mut depth = 0usize;
        for _ in 0..8 {
            stamp += 1;
            let (order, last) = bfs(&adj, &keep, root, &mut seen, stamp);
            let d = levels(&adj, &keep, &order, root);
            let cand = *last.iter().min_by_key(|&&v| degree(v)).unwrap();
            if d <= depth || cand == root {
                break;
            }
            depth = d;
            root = cand;
        }
        let mut queue = VecDeque::from([root]);
        placed[root] = true;
        let mut nbrs = Vec::new();
        while let Some(v) = queue.pop_front() {
            perm.push(v);
            nbrs.clear();
            nbrs.extend(adj[v].iter().copied().filter(|&w| keep[w] && !placed[w]));
            nbrs.sort_by_key(|&w| degree(w));
            for &w in &nbrs {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    perm.reverse();
    perm.extend((0..n).filter(|&v| !keep[v]));
    perm
}

fn levels(adj: &[Vec<usize>], keep: &[bool], order: &[usize], root: usize) -> usize {
    let mut depth = vec![usize::MAX; adj.len()];
    depth[root] = 0;
    let mut max = 0;
    for &v in order {
        let d = depth[v];
        for &w in &adj[v] {
            if keep[w] && depth[w] == usize::MAX {
                depth[w] = d + 1;
                max = max.max(d + 1);
            }
        }
    }
    max
}

/// Half-bandwidth of `a` under the symmetric permutation `perm`.
pub fn bandwidth(a: &SparseMatrix, perm: &[usize]) -> usize {
    let mut pos = vec![0; perm.len()];
    for (k, &v) in perm.iter().enumerate() {
        pos[v] = k;
    }
    let mut bw = 0;
    for i in 0..a.nrows() {
        for (j, _) in a.row(i) {
            bw = bw.max(pos[i].abs_diff(pos[j]));
        }
    }
    bw
}
