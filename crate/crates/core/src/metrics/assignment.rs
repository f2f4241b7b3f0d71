//! Minimum-cost bipartite assignment (Hungarian method with potentials).

use crate::scalar::Scalar;

/// Optimal assignment of `min(R, P)` pairs for an `R x P` cost matrix.
///
/// Pairs come back sorted by reference index. Equal-cost optima are resolved
/// deterministically: the same matrix always yields the same pairs.
/// Costs must be finite.
pub fn assign_min_cost<T: Scalar>(cost: &[Vec<T>]) -> Vec<(usize, usize)> {
    let rows = cost.len();
    let cols = cost.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    debug_assert!(cost.iter().all(|r| r.len() == cols), "ragged cost matrix");
    let mut pairs = if rows <= cols {
        hungarian(rows, cols, |i, j| cost[i][j])
    } else {
        hungarian(cols, rows, |i, j| cost[j][i])
            .into_iter()
            .map(|(p, r)| (r, p))
            .collect()
    };
    pairs.sort_unstable();
    pairs
}

/// Sum of the costs of `pairs`.
pub fn assignment_cost<T: Scalar>(cost: &[Vec<T>], pairs: &[(usize, usize)]) -> T {
    pairs.iter().fold(T::zero(), |acc, &(r, p)| acc + cost[r][p])
}

// n <= m; rows and columns are 1-based inside, 0 is the virtual column.
fn hungarian<T: Scalar>(n: usize, m: usize, a: impl Fn(usize, usize) -> T) -> Vec<(usize, usize)> {
    let inf = T::infinity();
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=m).filter(|&j| p[j] != 0).map(|j| (p[j] - 1, j - 1)).collect()
}
