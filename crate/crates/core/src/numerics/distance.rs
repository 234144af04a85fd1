use alloc::vec::Vec;

use crate::matrix::{DataMatrix, Matrix};

/// Squared Euclidean distance between two equally long slices.
#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// All pairwise squared distances, `result[i][j] = ‖x_i − x_j‖²`.
///
/// Each entry is accumulated over columns in index order and written to both
/// `(i, j)` and `(j, i)`, so the result is exactly symmetric with a zero
/// diagonal. Non-finite inputs cannot reach this function: [`DataMatrix`]
/// rejects them on construction, naming the offending row.
pub fn pairwise_sq_dists(data: &DataMatrix) -> Matrix {
    let n = data.n();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        let xi = data.row(i);
        for j in (i + 1)..n {
            let d = sq_dist(xi, data.row(j));
            out[(i, j)] = d;
            out[(j, i)] = d;
        }
    }
    out
}

/// Indices of the `k` rows of `points` nearest to row `i` (excluding `i`),
/// ordered by distance with ties going to the lower index.
pub fn nearest_rows(points: &Matrix, i: usize, k: usize) -> Vec<usize> {
    nearest_to(points, points.row(i), k, Some(i))
}

/// Indices of the `k` rows of `points` nearest to `query`, ordered by
/// distance with ties going to the lower index. `exclude` is skipped.
pub fn nearest_to(points: &Matrix, query: &[f64], k: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut cand: Vec<(f64, usize)> = (0..points.rows())
        .filter(|&j| Some(j) != exclude)
        .map(|j| (sq_dist(query, points.row(j)), j))
        .collect();
    let k = k.min(cand.len());
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k == 0 {
        return Vec::new();
    }
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, cmp);
        cand.truncate(k);
    }
    cand.sort_unstable_by(cmp);
    cand.into_iter().map(|(_, j)| j).collect()
}
