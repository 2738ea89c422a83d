//! Thin SVD of tall matrices and the symmetric eigenproblem behind
//! row-stochastic kernel operators.
//!
//! Both return vectors under a fixed sign convention: in every column the
//! entry of largest magnitude (first one on ties) is positive.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, norm, Matrix};
use crate::rng::Rng;

/// Problems up to this size are solved densely.
pub const DENSE_EIG_MAX: usize = 600;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThinSvd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymEig {
    /// Non-increasing eigenvalues.
    pub values: Vec<f64>,
    /// Right eigenvectors `phi_j = D^{-1/2} v_j` of `D^{-1} W`.
    pub vectors: Matrix,
    /// Orthonormal eigenvectors `v_j` of `D^{-1/2} W D^{-1/2}`.
    pub conjugate_vectors: Matrix,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigSolver {
    /// Dense for small problems, Lanczos otherwise.
    #[default]
    Auto,
    Dense,
    Lanczos,
}

/// All eigenpairs of a small symmetric matrix, sorted non-increasing.
pub(crate) fn dense_symmetric_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    let mut dm = DMatrix::from_row_slice(n, n, a.as_slice());
    // exact symmetry for the solver
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (dm[(i, j)] + dm[(j, i)]);
            dm[(i, j)] = v;
            dm[(j, i)] = v;
        }
    }
    let eig = SymmetricEigen::new(dm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])])
        .expect("eigenvectors of a finite matrix are finite");
    (values, vectors)
}

fn largest_magnitude_sign(col: &[f64]) -> f64 {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &v in col {
        if v.abs() > best {
            best = v.abs();
            sign = if v < 0.0 { -1.0 } else { 1.0 };
        }
    }
    sign
}

/// Flips columns so the largest-magnitude entry of each column of `key` is
/// positive; the same flips are applied to every matrix in `others`.
pub(crate) fn apply_sign_convention(key: &mut [Vec<f64>], others: &mut [&mut [Vec<f64>]]) {
    for j in 0..key.len() {
        if largest_magnitude_sign(&key[j]) < 0.0 {
            key[j].iter_mut().for_each(|v| *v = -*v);
            for o in others.iter_mut() {
                o[j].iter_mut().for_each(|v| *v = -*v);
            }
        }
    }
}

/// Orthonormalises `cols` in place by modified Gram-Schmidt with one full
/// reorthogonalisation pass; returns the upper-triangular factor so that
/// `input = Q R`. Columns that are numerically dependent on their
/// predecessors get `R_jj = 0` and are replaced by a deterministic unit
/// vector orthogonal to the others.
fn orthonormalize(cols: &mut [Vec<f64>]) -> Vec<Vec<f64>> {
    let k = cols.len();
    let n = cols.first().map_or(0, Vec::len);
    let mut r = vec![vec![0.0; k]; k];
    let scale = cols.iter().map(|c| norm(c)).fold(0.0, f64::max);
    for j in 0..k {
        let (done, rest) = cols.split_at_mut(j);
        let x = &mut rest[0];
        for _ in 0..2 {
            for (i, q) in done.iter().enumerate() {
                let c = dot(q, x);
                x.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                r[i][j] += c;
            }
        }
        let nrm = norm(x);
        if nrm > 1e-14 * scale && nrm > 0.0 {
            r[j][j] = nrm;
            x.iter_mut().for_each(|v| *v /= nrm);
            continue;
        }
        // dependent column: pick the first coordinate direction that is
        // well outside the span found so far
        r[j][j] = 0.0;
        for t in 0..n {
            let mut e = vec![0.0; n];
            e[t] = 1.0;
            for _ in 0..2 {
                for q in done.iter() {
                    let c = dot(q, &e);
                    e.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                }
            }
            let en = norm(&e);
            if en > 0.5 {
                e.iter_mut().for_each(|v| *v /= en);
                *x = e;
                break;
            }
        }
    }
    r
}

pub(crate) fn columns_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.cols()).map(|j| m.column(j)).collect()
}

/// Top-`k` singular triplets of a tall matrix.
///
/// The right singular subspace comes from the `m x m` Gram matrix; the
/// triplets are then refined by a Rayleigh-Ritz step (QR of `A V_k` and an
/// SVD of the small triangular factor), so `A v_j = s_j u_j` holds to
/// rounding and small singular values keep full absolute accuracy.
pub fn thin_svd(a: &Matrix, k: usize) -> Result<ThinSvd> {
    let (n, m) = a.shape();
    if k == 0 || k > n.min(m) {
        return Err(Error::Dim(format!(
            "requested {k} singular triplets of a {n}x{m} matrix"
        )));
    }
    let gram = a.gram();
    let (_, evecs) = dense_symmetric_eigen(&gram);
    let vk = evecs.select_columns(&(0..k).collect::<Vec<_>>());
    let b = a.matmul(&vk)?;
    let mut q = columns_of(&b);
    let r = orthonormalize(&mut q);

    let rm = DMatrix::from_fn(k, k, |i, j| r[i][j]);
    let svd = SVD::new(rm, true, true);
    let (pu, pvt) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::Convergence("small SVD returned no vectors".into())),
    };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));

    let s: Vec<f64> = order.iter().map(|&j| svd.singular_values[j]).collect();
    let mut u_cols: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| {
            let mut col = vec![0.0; n];
            for (l, ql) in q.iter().enumerate() {
                let c = pu[(l, j)];
                col.iter_mut().zip(ql).for_each(|(a, b)| *a += c * b);
            }
            col
        })
        .collect();
    let mut v_cols: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| {
            (0..m)
                .map(|row| (0..k).map(|l| vk.get(row, l) * pvt[(j, l)]).sum())
                .collect()
        })
        .collect();
    apply_sign_convention(&mut u_cols, &mut [&mut v_cols]);
    Ok(ThinSvd {
        u: Matrix::from_columns(&u_cols)?,
        s,
        v: Matrix::from_columns(&v_cols)?,
    })
}

/// Top-`k` eigenpairs of the row-stochastic operator `D^{-1} W`, solved
/// through its symmetric conjugate `D^{-1/2} W D^{-1/2}`.
pub fn sym_eig_stochastic(w: &Matrix, d: &[f64], k: usize) -> Result<SymEig> {
    sym_eig_stochastic_with(w, d, k, EigSolver::Auto)
}

pub fn sym_eig_stochastic_with(w: &Matrix, d: &[f64], k: usize, solver: EigSolver) -> Result<SymEig> {
    let n = w.rows();
    if w.cols() != n || d.len() != n {
        return Err(Error::Dim(format!(
            "need a square kernel and matching degrees, got {}x{} and {}",
            n,
            w.cols(),
            d.len()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::Dim(format!("requested {k} eigenpairs of a {n}x{n} operator")));
    }
    if let Some(i) = d.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Value(format!("degree {i} is not positive ({})", d[i])));
    }
    let s: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let dense = match solver {
        EigSolver::Auto => n <= DENSE_EIG_MAX,
        EigSolver::Dense => true,
        EigSolver::Lanczos => false,
    };
    let (values, mut vcols) = if dense {
        let sym = Matrix::from_fn(n, n, |i, j| s[i] * w.get(i, j) * s[j])?;
        let (vals, vecs) = dense_symmetric_eigen(&sym);
        (
            vals[..k].to_vec(),
            (0..k).map(|j| vecs.column(j)).collect::<Vec<_>>(),
        )
    } else if let Some(sparse) = SparseSym::drop_negligible(w, &s) {
        lanczos_top(n, k, |x| sparse.matvec(x), LanczosOptions::for_k(n, k))?
    } else {
        let apply = |x: &[f64]| -> Vec<f64> {
            let z: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a * b).collect();
            let mut y = w.matvec(&z);
            y.iter_mut().zip(&s).for_each(|(a, b)| *a *= b);
            y
        };
        lanczos_top(n, k, apply, LanczosOptions::for_k(n, k))?
    };
    let mut phi: Vec<Vec<f64>> = vcols
        .iter()
        .map(|v| v.iter().zip(&s).map(|(a, b)| a * b).collect())
        .collect();
    apply_sign_convention(&mut phi, &mut [&mut vcols]);
    Ok(SymEig {
        values,
        vectors: Matrix::from_columns(&phi)?,
        conjugate_vectors: Matrix::from_columns(&vcols)?,
    })
}

/// Row-compressed `S = diag(s) W diag(s)` without entries below
/// `1e-17 / n`. The dropped part has spectral norm under `1e-17`, far below
/// the rounding of a dense product, so the spectrum is unchanged to working
/// precision.
struct SparseSym {
    offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// `None` when more than a quarter of the entries survive.
    fn drop_negligible(w: &Matrix, s: &[f64]) -> Option<Self> {
        let n = w.rows();
        if n > u32::MAX as usize {
            return None;
        }
        let cutoff = 1e-17 / n as f64;
        let rows: Vec<Vec<(u32, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                w.row(i)
                    .iter()
                    .enumerate()
                    .filter_map(|(j, &v)| {
                        let x = s[i] * v * s[j];
                        (x.abs() >= cutoff).then_some((j as u32, x))
                    })
                    .collect()
            })
            .collect();
        let nnz: usize = rows.iter().map(Vec::len).sum();
        if nnz > n * n / 4 {
            return None;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        offsets.push(0);
        for r in rows {
            for (j, v) in r {
                cols.push(j);
                vals.push(v);
            }
            offsets.push(cols.len());
        }
        Some(Self { offsets, cols, vals })
    }

    fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.offsets.len() - 1)
            .into_par_iter()
            .map(|i| {
                let (a, b) = (self.offsets[i], self.offsets[i + 1]);
                self.cols[a..b].iter().zip(&self.vals[a..b]).map(|(&j, v)| v * x[j as usize]).sum()
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct LanczosOptions {
    pub max_basis: usize,
    pub keep: usize,
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl LanczosOptions {
    pub fn for_k(n: usize, k: usize) -> Self {
        let max_basis = (2 * k + 30).max(50).min(n);
        let keep = (k + (max_basis - k) / 2).min(max_basis.saturating_sub(1)).max(k);
        Self {
            max_basis,
            keep,
            tol: 1e-10,
            max_restarts: 2000,
            seed: 0x5EED_1A4C,
        }
    }
}

fn random_unit(n: usize, rng: &mut Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.uniform() - 0.5).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

fn orthogonalize_against(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        let coeffs: Vec<f64> = basis.par_iter().map(|q| dot(q, x)).collect();
        for (q, c) in basis.iter().zip(coeffs) {
            x.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
    }
}

fn combine(vectors: &[Vec<f64>], coeffs: impl Fn(usize) -> f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (i, v) in vectors.iter().enumerate() {
        let c = coeffs(i);
        if c != 0.0 {
            out.iter_mut().zip(v).for_each(|(a, b)| *a += c * b);
        }
    }
    out
}

/// Largest-algebraic eigenpairs of a symmetric operator by thick-restart
/// Lanczos with full reorthogonalisation. Convergence is judged on explicit
/// residuals `|A x - theta x| <= tol * max(1, |theta_1|)`.
pub(crate) fn lanczos_top(
    n: usize,
    k: usize,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    opts: LanczosOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut rng = Rng::new(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(opts.max_basis);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(opts.max_basis);
    let mut next = random_unit(n, &mut rng);
    for _restart in 0..opts.max_restarts {
        while basis.len() < opts.max_basis {
            let before = norm(&next);
            orthogonalize_against(&mut next, &basis);
            let mut nrm = norm(&next);
            if !(nrm > 1e-10 * before) {
                // invariant subspace reached; continue from a fresh direction
                next = random_unit(n, &mut rng);
                orthogonalize_against(&mut next, &basis);
                nrm = norm(&next);
            }
            next.iter_mut().for_each(|v| *v /= nrm);
            let image = apply(&next);
            basis.push(std::mem::take(&mut next));
            next = image.clone();
            images.push(image);
        }
        let b = basis.len();
        let h = Matrix::from_fn(b, b, |i, j| 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i])))?;
        let (theta, z) = dense_symmetric_eigen(&h);
        let keep = opts.keep.min(b);
        let ritz: Vec<Vec<f64>> = (0..keep)
            .into_par_iter()
            .map(|j| combine(&basis, |i| z.get(i, j), n))
            .collect();
        let ritz_images: Vec<Vec<f64>> = (0..keep)
            .into_par_iter()
            .map(|j| combine(&images, |i| z.get(i, j), n))
            .collect();
        let scale = theta[0].abs().max(1.0);
        let converged = (0..k).all(|j| {
            let r: f64 = ritz_images[j]
                .iter()
                .zip(&ritz[j])
                .map(|(ax, x)| (ax - theta[j] * x).powi(2))
                .sum::<f64>()
                .sqrt();
            r <= opts.tol * scale
        });
        if converged || b == n {
            return Ok((theta[..k].to_vec(), ritz.into_iter().take(k).collect()));
        }
        // the Krylov continuation must be orthogonal to the whole old basis,
        // not just to the retained Ritz vectors
        orthogonalize_against(&mut next, &basis);
        basis = ritz;
        images = ritz_images;
    }
    Err(Error::Convergence(format!(
        "Lanczos did not reach tolerance {:e} after {} restarts",
        opts.tol, opts.max_restarts
    )))
}
