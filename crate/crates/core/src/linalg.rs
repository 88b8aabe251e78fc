//! Dense complex linear algebra on tensor-product spaces.
//!
//! Subsystem index convention: for dims `[d_0, …, d_{k-1}]` the first subsystem is the most
//! significant digit of the flat index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues at or below this are treated as zero in `0 · log 0`.
pub const EIGEN_CUTOFF: f64 = 1e-12;

pub fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `(M + M†) / 2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = symmetrize(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Shannon entropy in bits of a spectrum, ignoring entries `≤ EIGEN_CUTOFF`.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_CUTOFF)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Principal square root of a positive semidefinite matrix; negative eigenvalues are clipped.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let roots = DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| Complex64::new(l.max(0.0).sqrt(), 0.0)),
    );
    let scaled = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, c| vectors[(r, c)] * roots[c]);
    scaled * vectors.adjoint()
}

/// `Tr|M|` for Hermitian `M`.
pub fn hermitian_trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Largest entrywise modulus of `m − m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Digits of flat index `f` under `dims`.
fn digits(mut f: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = f % dims[i];
        f /= dims[i];
    }
    out
}

/// Partial trace keeping the subsystems listed in `keep` (any order; output keeps the
/// original relative order).
pub fn partial_trace(op: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let keep_side: usize = keep_dims.iter().product();
    let traced_side: usize = traced_dims.iter().product();
    if traced.is_empty() {
        return op.clone();
    }
    let ks = strides(&keep_dims);
    let ts = strides(&traced_dims);
    let full: usize = dims.iter().product();

    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(keep_side); traced_side];
    for f in 0..full {
        let d = digits(f, dims);
        let k: usize = keep.iter().zip(&ks).map(|(&i, &s)| d[i] * s).sum();
        let t: usize = traced.iter().zip(&ts).map(|(&i, &s)| d[i] * s).sum();
        groups[t].push((f, k));
    }
    let mut out = CMatrix::zeros(keep_side, keep_side);
    for group in &groups {
        for &(r, kr) in group {
            for &(c, kc) in group {
                out[(kr, kc)] += op[(r, c)];
            }
        }
    }
    out
}

/// Flat-index map for reordering subsystems: output subsystem `j` is input subsystem
/// `order[j]`. Returns `map[input_index] = output_index`.
fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = order.iter().map(|&i| dims[i]).collect();
    let ns = strides(&new_dims);
    let full: usize = dims.iter().product();
    (0..full)
        .map(|f| {
            let d = digits(f, dims);
            order.iter().zip(&ns).map(|(&i, &s)| d[i] * s).sum()
        })
        .collect()
}

/// Reorders the tensor factors of an operator.
pub fn permute_subsystems(op: &CMatrix, dims: &[usize], order: &[usize]) -> CMatrix {
    let map = permutation_map(dims, order);
    let n = map.len();
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(map[r], map[c])] = op[(r, c)];
        }
    }
    out
}

/// Reorders the tensor factors of a vector.
pub fn permute_vector(v: &CVector, dims: &[usize], order: &[usize]) -> CVector {
    let map = permutation_map(dims, order);
    let mut out = CVector::zeros(v.len());
    for (i, &j) in map.iter().enumerate() {
        out[j] = v[i];
    }
    out
}

/// Orthonormal basis for the column span of a tall matrix (thin QR).
pub fn orthonormalize_columns(m: &CMatrix) -> CMatrix {
    m.clone().qr().q()
}

/// Closest isometry in Frobenius norm (polar factor `U W†` of the SVD `U Σ W†`).
pub fn polar_isometry(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V†");
    u * v_t
}

/// Largest entrywise deviation of `V†V` from the identity.
pub fn isometry_defect(v: &CMatrix) -> f64 {
    let g = v.adjoint() * v;
    max_abs_diff(&g, &CMatrix::identity(g.nrows(), g.ncols()))
}

/// Pairwise (cascade) summation; result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
