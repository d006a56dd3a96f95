//! Dense Hungarian algorithm (shortest augmenting path with potentials).

/// Minimum-cost perfect matching on a square cost matrix. Returns
/// `assign[row] = col` and the total cost.
///
/// # Panics
/// Panics when `cost` is not square.
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> (Vec<usize>, i64) {
    let n = cost.len();
    assert!(cost.iter().all(|r| r.len() == n), "cost matrix must be square");
    if n == 0 {
        return (Vec::new(), 0);
    }
    // 1-based potentials; column 0 is a virtual source.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0;
        let mut min_to = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        assign[col_owner[j] - 1] = j - 1;
    }
    let total = assign.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    (assign, total)
}

/// Largest total weight over one-to-one row/column pairings of a
/// rectangular non-negative weight matrix (unmatched rows or columns score 0).
pub fn max_weight_matching(weights: &[Vec<i64>]) -> i64 {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let n = rows.max(cols);
    let top = weights.iter().flatten().copied().max().unwrap_or(0);
    let cost: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| top - weights.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0)).collect())
        .collect();
    let (_, total) = min_cost_assignment(&cost);
    top * n as i64 - total
}
