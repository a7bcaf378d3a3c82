/// Order-preserving assignment of each `a` position to a distinct `b`
/// position minimizing the summed absolute offset. Requires `a.len() <=
/// b.len()`; both slices sorted ascending. Returns the chosen `b` index per
/// `a` and the summed offset. Ties resolve toward lower `b` indices.
pub(crate) fn ordered_pairing(a: &[f64], b: &[f64]) -> Option<(Vec<usize>, f64)> {
    let n = a.len();
    let m = b.len();
    if n == 0 || n > m {
        return None;
    }
    // cost[i][j]: best cost pairing a[..=i] with a[i] -> b[j]
    let inf = f64::INFINITY;
    let mut cost = vec![vec![inf; m]; n];
    let mut back = vec![vec![usize::MAX; m]; n];
    for j in 0..=(m - n) {
        cost[0][j] = (a[0] - b[j]).abs();
    }
    for i in 1..n {
        // running minimum over cost[i-1][..j]
        let mut best = inf;
        let mut best_k = usize::MAX;
        for j in i..=(m - n + i) {
            let k = j - 1;
            if cost[i - 1][k] < best - 1e-12 {
                best = cost[i - 1][k];
                best_k = k;
            }
            if best.is_finite() {
                cost[i][j] = best + (a[i] - b[j]).abs();
                back[i][j] = best_k;
            }
        }
    }
    let mut end = usize::MAX;
    let mut total = inf;
    for j in (n - 1)..m {
        if cost[n - 1][j] < total - 1e-12 {
            total = cost[n - 1][j];
            end = j;
        }
    }
    if end == usize::MAX {
        return None;
    }
    let mut picks = vec![0; n];
    let mut j = end;
    for i in (0..n).rev() {
        picks[i] = j;
        if i > 0 {
            j = back[i][j];
        }
    }
    Some((picks, total))
}
