use crate::scalar::Real;

/// Solves `a x = b` for a small dense system by Gaussian elimination with
/// partial pivoting. Returns `None` when a pivot falls below `rel_tol` times
/// the largest diagonal magnitude.
pub(crate) fn solve<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>, rel_tol: T) -> Option<Vec<T>> {
    let n = b.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(T::zero(), T::max);
    if scale == T::zero() {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() <= rel_tol * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] = a[row][k] - factor * a[col][k];
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let tail: T = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}
