//! Dense and Krylov linear-algebra helpers shared by the analysis modules.

use faer::linalg::solvers::SolveLstsq;
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::hamiltonian::SparseOperator;

/// Eigenvalues ascending and eigenvectors as columns of a real symmetric matrix.
pub fn symmetric_eigen(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Solver(format!("{e:?}")))?;
    let s = evd.S();
    let values: Vec<f64> = (0..m.nrows()).map(|k| s[k]).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn symmetric_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Solver(format!("{e:?}")))
}

/// Singular values, nonincreasing.
pub fn singular_values(m: &Mat<f64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    m.singular_values().map_err(|e| Error::Solver(format!("{e:?}")))
}

/// Orthonormal basis of the right null space of `m`, as columns.
///
/// Singular values at or below `rel_tol * sigma_max` count as zero.
pub fn null_space(m: &Mat<f64>, rel_tol: f64) -> Result<Mat<f64>> {
    let n = m.ncols();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    if m.nrows() == 0 {
        return Ok(Mat::identity(n, n));
    }
    // A tall matrix only needs the thin factorization: V is still square.
    let (s, v) = if m.nrows() >= n {
        let svd = m.thin_svd().map_err(|e| Error::Solver(format!("{e:?}")))?;
        ((0..n).map(|j| svd.S()[j]).collect::<Vec<f64>>(), svd.V().to_owned())
    } else {
        let svd = m.svd().map_err(|e| Error::Solver(format!("{e:?}")))?;
        ((0..m.nrows()).map(|j| svd.S()[j]).collect(), svd.V().to_owned())
    };
    let smax = s.first().copied().unwrap_or(0.0);
    let rank = s.iter().filter(|&&x| x > rel_tol * smax.max(f64::MIN_POSITIVE)).count();
    Ok(Mat::from_fn(n, n - rank, |i, j| v[(i, rank + j)]))
}

/// Null space of a sparse matrix given by rows of `(column, value)`.
///
/// A row with a single live column forces that column to vanish. Such rows
/// are peeled until none remain, and the surviving columns split into
/// independent blocks (columns linked by a shared row), each solved densely
/// by [`null_space`]. Returns orthonormal vectors of length `ncols`.
pub fn sparse_null_space(ncols: usize, rows: &[Vec<(usize, f64)>], rel_tol: f64) -> Result<Vec<Vec<f64>>> {
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    for (i, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            if c >= ncols {
                return Err(Error::DimensionMismatch { expected: ncols, found: c + 1 });
            }
            if v != 0.0 {
                col_rows[c].push(i as u32);
            }
        }
    }
    let mut live = vec![true; ncols];
    let mut degree: Vec<usize> = rows.iter().map(|r| r.iter().filter(|e| e.1 != 0.0).count()).collect();
    let mut queue: Vec<usize> = (0..rows.len()).filter(|&i| degree[i] == 1).collect();
    while let Some(i) = queue.pop() {
        if degree[i] != 1 {
            continue;
        }
        let Some(&(c, _)) = rows[i].iter().find(|e| e.1 != 0.0 && live[e.0]) else { continue };
        live[c] = false;
        for &j in &col_rows[c] {
            let j = j as usize;
            degree[j] -= 1;
            if degree[j] == 1 {
                queue.push(j);
            }
        }
    }

    // union-find over live columns
    let mut parent: Vec<usize> = (0..ncols).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, row) in rows.iter().enumerate() {
        if degree[i] < 2 {
            continue;
        }
        let mut first = None;
        for &(c, v) in row {
            if v == 0.0 || !live[c] {
                continue;
            }
            match first {
                None => first = Some(c),
                Some(f) => {
                    let (a, b) = (find(&mut parent, f), find(&mut parent, c));
                    parent[a] = b;
                }
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for c in (0..ncols).filter(|&c| live[c]) {
        let root = find(&mut parent, c);
        blocks.entry(root).or_default().push(c);
    }

    let mut out = Vec::new();
    let mut local = vec![usize::MAX; ncols];
    for cols in blocks.values() {
        for (k, &c) in cols.iter().enumerate() {
            local[c] = k;
        }
        let mut brows: Vec<usize> = cols.iter().flat_map(|&c| col_rows[c].iter().map(|&j| j as usize)).collect();
        brows.sort_unstable();
        brows.dedup();
        brows.retain(|&j| degree[j] >= 1);
        let mut a = Mat::<f64>::zeros(brows.len(), cols.len());
        for (bi, &j) in brows.iter().enumerate() {
            for &(c, v) in &rows[j] {
                if live[c] && v != 0.0 {
                    a[(bi, local[c])] += v;
                }
            }
        }
        let z = null_space(&a, rel_tol)?;
        for j in 0..z.ncols() {
            let mut v = vec![0.0; ncols];
            for (k, &c) in cols.iter().enumerate() {
                v[c] = z[(k, j)];
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Least-squares solution of `a x = b`.
pub fn lstsq(a: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = a.qr().solve_lstsq(&rhs);
    (0..a.ncols()).map(|i| x[(i, 0)]).collect()
}

/// Orthonormalizes `vectors` in place by modified Gram-Schmidt (two passes)
/// and drops those whose residual norm falls below `tol`. Returns the
/// surviving vectors.
pub fn orthonormalize(vectors: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut v in vectors {
        let n0 = norm(&v);
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        let n = norm(&v);
        if n > tol * n0.max(1.0) {
            v.iter_mut().for_each(|x| *x /= n);
            out.push(v);
        }
    }
    out
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

/// Lowest eigenpairs from a Lanczos iteration.
#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Lanczos with full reorthogonalization for the `k` lowest eigenpairs.
///
/// A single start vector only sees one copy of each degenerate level, which
/// is enough for ground-state energies and gaps of connected sectors.
pub fn lanczos_lowest(h: &SparseOperator, k: usize, tol: f64, max_iter: usize) -> Result<LanczosResult> {
    let n = h.dim();
    if n == 0 || k == 0 {
        return Err(Error::Domain("Lanczos needs a nonempty operator and k >= 1".into()));
    }
    let k = k.min(n);
    let max_iter = max_iter.min(n).max(k);
    // Deterministic start vector with weight on every basis state.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64 * 0.618_033_988_749_895).fract() - 0.5)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut best: Option<(Vec<f64>, Mat<f64>, Vec<f64>)> = None;
    for j in 0..max_iter {
        h.apply_into(&basis[j], &mut w)?;
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let b = norm(&w);
        let m = j + 1;
        let check = m >= k && (m % 10 == 0 || b < 1e-12 || m == max_iter);
        if check {
            let t = Mat::from_fn(m, m, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let (vals, vecs) = symmetric_eigen(&t)?;
            let res: Vec<f64> = (0..k).map(|i| (b * vecs[(m - 1, i)]).abs()).collect();
            let done = b < 1e-12 || res.iter().all(|&r| r < tol);
            best = Some((vals, vecs, res));
            if done {
                break;
            }
        }
        if b < 1e-12 {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    let (vals, vecs, residuals) = best.ok_or_else(|| Error::Solver("Lanczos made no progress".into()))?;
    let m = vecs.nrows();
    let mut vectors = Vec::with_capacity(k);
    for i in 0..k {
        let mut x = vec![0.0; n];
        for (r, q) in basis.iter().take(m).enumerate() {
            axpy(vecs[(r, i)], q, &mut x);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|e| *e /= nx);
        vectors.push(x);
    }
    Ok(LanczosResult { values: vals[..k].to_vec(), vectors, residuals, iterations: m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_null_space_matches_dense() {
        // chain of forced zeros, a free pair and an independent 2x3 block
        let rows = vec![
            vec![(0, 1.0)],
            vec![(0, 2.0), (1, 1.0)],
            vec![(2, 1.0), (3, -1.0)],
            vec![(4, 1.0), (5, 1.0), (6, 1.0)],
            vec![(4, 1.0), (5, -1.0)],
        ];
        let n = 7;
        let sparse = sparse_null_space(n, &rows, 1e-12).unwrap();
        let dense = Mat::from_fn(rows.len(), n, |i, j| rows[i].iter().filter(|e| e.0 == j).map(|e| e.1).sum());
        let z = null_space(&dense, 1e-12).unwrap();
        assert_eq!(sparse.len(), z.ncols());
        for v in &sparse {
            assert!((norm(v) - 1.0).abs() < 1e-12);
            for r in &rows {
                assert!(r.iter().map(|&(c, a)| a * v[c]).sum::<f64>().abs() < 1e-12);
            }
            assert!(v[0] == 0.0 && v[1] == 0.0);
        }
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = Mat::from_fn(2, 3, |i, j| ((i + 1) * (j + 1)) as f64);
        let z = null_space(&m, 1e-12).unwrap();
        assert_eq!(z.ncols(), 2);
        for c in 0..2 {
            for r in 0..2 {
                let s: f64 = (0..3).map(|k| m[(r, k)] * z[(k, c)]).sum();
                assert!(s.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lanczos_on_path_graph() {
        let n = 200;
        let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        let h = SparseOperator::from_entries(n, &e).unwrap();
        let r = lanczos_lowest(&h, 2, 1e-10, 400).unwrap();
        let exact = |k: usize| -2.0 * (std::f64::consts::PI * k as f64 / (n as f64 + 1.0)).cos();
        assert!((r.values[0] - exact(1)).abs() < 1e-9);
        assert!((r.values[1] - exact(2)).abs() < 1e-9);
    }

    #[test]
    fn lstsq_recovers_line() {
        let a = Mat::from_fn(5, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let b: Vec<f64> = (0..5).map(|i| 2.0 + 3.0 * i as f64).collect();
        let x = lstsq(&a, &b);
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
    }
}
