//! Dense complex linear algebra for small operators.
//!
//! Everything here works on square matrices that carry an explicit list of
//! tensor-factor dimensions, so partial traces and factor permutations can be
//! expressed by factor index. Sizes in this crate stay well below a few
//! thousand, so plain dense storage is used throughout.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{argument, domain, Result};

pub type C64 = Complex64;
/// Plain dense complex matrix without factor structure (Kraus operators, eigenvectors).
pub type Mat = DMatrix<C64>;

/// Absolute tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues above `-PSD_CLIP` are treated as zero when taking PSD functions.
pub const PSD_CLIP: f64 = 1e-10;

/// Square complex matrix with a tensor-factor layout.
///
/// The side length always equals the product of `dims`. Entries are indexed
/// row-major over the factors, first factor most significant, which is the
/// ordering produced by [`kron`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: Mat,
    dims: Vec<usize>,
}

impl ComplexMatrix {
    pub fn new(data: Mat, dims: Vec<usize>) -> Result<Self> {
        if !data.is_square() {
            return argument(format!("matrix is {}x{}, not square", data.nrows(), data.ncols()));
        }
        if dims.contains(&0) {
            return argument("tensor factors must have positive dimension");
        }
        let side: usize = dims.iter().product();
        if side != data.nrows() {
            return argument(format!(
                "factor dims {:?} multiply to {}, matrix side is {}",
                dims,
                side,
                data.nrows()
            ));
        }
        Ok(Self { data, dims })
    }

    /// Wraps a square matrix as a single tensor factor.
    pub fn from_matrix(data: Mat) -> Result<Self> {
        let n = data.nrows();
        Self::new(data, vec![n])
    }

    pub fn from_row_major(dims: Vec<usize>, entries: &[C64]) -> Result<Self> {
        let side: usize = dims.iter().product();
        if entries.len() != side * side {
            return argument(format!("expected {} entries, got {}", side * side, entries.len()));
        }
        Self::new(Mat::from_row_slice(side, side, entries), dims)
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let data = Mat::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) });
        Self { data, dims: vec![n] }
    }

    pub fn identity(dims: &[usize]) -> Self {
        let side = dims.iter().product();
        Self { data: Mat::identity(side, side), dims: dims.to_vec() }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let side = dims.iter().product();
        Self { data: Mat::zeros(side, side), dims: dims.to_vec() }
    }

    /// `|v><v|` for a vector given in the computational basis of a single factor.
    pub fn projector(v: &[C64]) -> Self {
        let n = v.len();
        let data = Mat::from_fn(n, n, |i, j| v[i] * v[j].conj());
        Self { data, dims: vec![n] }
    }

    /// `|k><k|` on a `d`-dimensional factor.
    pub fn basis_projector(d: usize, k: usize) -> Self {
        let mut m = Self::zeros(&[d]);
        m.data[(k, k)] = C64::new(1.0, 0.0);
        m
    }

    pub fn side(&self) -> usize {
        self.data.nrows()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &Mat {
        &self.data
    }

    pub fn into_matrix(self) -> Mat {
        self.data
    }

    /// Reinterprets the factor layout; the new dims must multiply to the same side.
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.data, dims)
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint(), dims: self.dims.clone() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { data: self.data.scale(s), dims: self.dims.clone() }
    }

    pub fn map_entries(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { data: self.data.map(f), dims: self.dims.clone() }
    }

    /// Largest entrywise absolute difference; `f64::INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.data.shape() != other.data.shape() {
            return f64::INFINITY;
        }
        self.data.iter().zip(other.data.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.side();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(M + M†)/2`, removing roundoff asymmetry.
    pub fn hermitian_part(&self) -> Self {
        Self { data: hermitize(&self.data), dims: self.dims.clone() }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        Self { data: &self.data * &rhs.data, dims: self.dims.clone() }
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self { data: &u.data * &self.data * u.data.adjoint(), dims: self.dims.clone() }
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.data[idx]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: &self.data + &rhs.data, dims: self.dims.clone() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { data: &self.data - &rhs.data, dims: self.dims.clone() }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigResult {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Mat,
}

impl EigResult {
    pub fn reconstruct(&self) -> Mat {
        apply_spectral(&self.eigenvalues, &self.eigenvectors, |l| C64::new(l, 0.0))
    }
}

/// Pauli matrices and friends.
pub mod pauli {
    use super::{ComplexMatrix, C64};

    fn from(entries: [C64; 4]) -> ComplexMatrix {
        ComplexMatrix::from_row_major(vec![2], &entries).expect("2x2 literal")
    }

    const O: C64 = C64::new(0.0, 0.0);
    const ONE: C64 = C64::new(1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);

    pub fn id() -> ComplexMatrix {
        from([ONE, O, O, ONE])
    }

    pub fn x() -> ComplexMatrix {
        from([O, ONE, ONE, O])
    }

    pub fn y() -> ComplexMatrix {
        from([O, -I, I, O])
    }

    pub fn z() -> ComplexMatrix {
        from([ONE, O, O, -ONE])
    }
}

/// Tensor product; the factor lists are concatenated.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    ComplexMatrix { data: a.data.kronecker(&b.data), dims }
}

/// Tensor product of a nonempty list, left to right.
pub fn kron_all(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = match factors.split_first() {
        Some(split) => split,
        None => return argument("kron_all needs at least one factor"),
    };
    Ok(rest.iter().fold(first.clone(), |acc, f| kron(&acc, f)))
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Linear offsets of every multi-index over the listed factors, enumerated
/// row-major in the order given (first listed factor most significant).
fn factor_offsets(factors: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(offsets.len() * dims[f]);
        for &o in &offsets {
            for x in 0..dims[f] {
                next.push(o + x * strides[f]);
            }
        }
        offsets = next;
    }
    offsets
}

fn check_factor_indices(indices: &[usize], n: usize) -> Result<()> {
    for (pos, &i) in indices.iter().enumerate() {
        if i >= n {
            return argument(format!("factor index {} out of range for {} factors", i, n));
        }
        if indices[..pos].contains(&i) {
            return argument(format!("factor index {} repeated", i));
        }
    }
    Ok(())
}

/// Traces out every factor not listed in `keep`. The kept factors stay in
/// their original order regardless of the order of `keep`.
pub fn partial_trace(m: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    let dims = &m.dims;
    check_factor_indices(keep, dims.len())?;
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
    let st = strides(dims);
    let kept_off = factor_offsets(&kept, dims, &st);
    let traced_off = factor_offsets(&traced, dims, &st);
    let dk = kept_off.len();
    let out = Mat::from_fn(dk, dk, |r, c| {
        let (ro, co) = (kept_off[r], kept_off[c]);
        traced_off.iter().map(|&t| m.data[(ro + t, co + t)]).sum()
    });
    let new_dims = if kept.is_empty() { vec![1] } else { kept.iter().map(|&i| dims[i]).collect() };
    Ok(ComplexMatrix { data: out, dims: new_dims })
}

/// Reorders tensor factors: factor `k` of the result is factor `order[k]` of `m`.
pub fn permute_factors(m: &ComplexMatrix, order: &[usize]) -> Result<ComplexMatrix> {
    let dims = &m.dims;
    if order.len() != dims.len() {
        return argument(format!("permutation of length {} for {} factors", order.len(), dims.len()));
    }
    check_factor_indices(order, dims.len())?;
    if order.iter().enumerate().all(|(k, &o)| k == o) {
        return Ok(m.clone());
    }
    let off = factor_offsets(order, dims, &strides(dims));
    let n = off.len();
    let data = Mat::from_fn(n, n, |r, c| m.data[(off[r], off[c])]);
    Ok(ComplexMatrix { data, dims: order.iter().map(|&i| dims[i]).collect() })
}

/// Applies `rho -> sum_k K rho K†` with the Kraus operators acting on factor
/// `target` only. Kraus operators are `d_out x d_in` with `d_in = dims[target]`.
/// Returns the new matrix and its factor layout.
pub fn apply_local_kraus(rho: &ComplexMatrix, target: usize, kraus: &[Mat]) -> Result<ComplexMatrix> {
    let dims = &rho.dims;
    if target >= dims.len() {
        return argument(format!("factor index {} out of range", target));
    }
    let Some(first) = kraus.first() else {
        return argument("empty Kraus list");
    };
    let d_in = dims[target];
    let d_out = first.nrows();
    if kraus.iter().any(|k| k.ncols() != d_in || k.nrows() != d_out) {
        return argument(format!("Kraus operators do not act on a factor of dimension {}", d_in));
    }
    let pre: usize = dims[..target].iter().product();
    let post: usize = dims[target + 1..].iter().product();
    let n_in = pre * d_in * post;
    let n_out = pre * d_out * post;
    let idx_in = |a: usize, i: usize, b: usize| (a * d_in + i) * post + b;
    let idx_out = |a: usize, j: usize, b: usize| (a * d_out + j) * post + b;

    let mut out = Mat::zeros(n_out, n_out);
    let mut left = Mat::zeros(n_out, n_in);
    for k in kraus {
        // left = (I ⊗ K ⊗ I) rho
        left.fill(C64::new(0.0, 0.0));
        for a in 0..pre {
            for b in 0..post {
                for j in 0..d_out {
                    let row = idx_out(a, j, b);
                    for i in 0..d_in {
                        let kji = k[(j, i)];
                        if kji == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let src = idx_in(a, i, b);
                        for col in 0..n_in {
                            left[(row, col)] += kji * rho.data[(src, col)];
                        }
                    }
                }
            }
        }
        // out += left (I ⊗ K† ⊗ I)
        for a in 0..pre {
            for b in 0..post {
                for j in 0..d_out {
                    let col = idx_out(a, j, b);
                    for i in 0..d_in {
                        let kji = k[(j, i)].conj();
                        if kji == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let src = idx_in(a, i, b);
                        for row in 0..n_out {
                            out[(row, col)] += left[(row, src)] * kji;
                        }
                    }
                }
            }
        }
    }
    let mut new_dims = dims.clone();
    new_dims[target] = d_out;
    Ok(ComplexMatrix { data: out, dims: new_dims })
}

pub(crate) fn hermitize(m: &Mat) -> Mat {
    (m + m.adjoint()).scale(0.5)
}

/// Unchecked eigendecomposition of a matrix assumed Hermitian; descending order.
pub(crate) fn eigh(m: &Mat) -> (Vec<f64>, Mat) {
    let eig = hermitize(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Unchecked eigenvalues of a matrix assumed Hermitian; descending order.
pub(crate) fn eigvalsh(m: &Mat) -> Vec<f64> {
    let mut v: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `V f(diag) V†`.
pub(crate) fn apply_spectral(values: &[f64], vectors: &Mat, f: impl Fn(f64) -> C64) -> Mat {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &l) in values.iter().enumerate() {
        let fl = f(l);
        for r in 0..n {
            scaled[(r, c)] *= fl;
        }
    }
    scaled * vectors.adjoint()
}

fn require_hermitian(m: &ComplexMatrix, what: &str) -> Result<()> {
    let err = m.hermiticity_error();
    if err > HERMITIAN_TOL {
        return argument(format!("{} requires a Hermitian matrix (asymmetry {:.3e})", what, err));
    }
    Ok(())
}

pub fn herm_eig(m: &ComplexMatrix) -> Result<EigResult> {
    require_hermitian(m, "herm_eig")?;
    let (eigenvalues, eigenvectors) = eigh(&m.data);
    Ok(EigResult { eigenvalues, eigenvectors })
}

/// Square root of a PSD matrix. Eigenvalues in `[-PSD_CLIP, 0)` are clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(m)?;
    if let Some(&min) = eig.eigenvalues.last() {
        if min < -PSD_CLIP {
            return domain(format!("psd_sqrt of a matrix with eigenvalue {:.3e}", min));
        }
    }
    let data = apply_spectral(&eig.eigenvalues, &eig.eigenvectors, |l| C64::new(l.max(0.0).sqrt(), 0.0));
    Ok(ComplexMatrix { data, dims: m.dims.clone() })
}

/// Index groups of the connected components of the nonzero pattern of `m`.
fn nonzero_blocks(m: &Mat) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in 0..n {
        for r in 0..c {
            if m[(r, c)] != C64::new(0.0, 0.0) || m[(c, r)] != C64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Eigenvalues of a Hermitian matrix, computed block by block over the
/// connected components of its nonzero pattern. Exact up to roundoff; large
/// block-diagonal operators (classical registers) become cheap.
pub fn hermitian_eigenvalues_blocked(m: &ComplexMatrix) -> Result<Vec<f64>> {
    require_hermitian(m, "hermitian_eigenvalues_blocked")?;
    let mut out = Vec::with_capacity(m.side());
    for block in nonzero_blocks(&m.data) {
        if block.len() == 1 {
            out.push(m.data[(block[0], block[0])].re);
            continue;
        }
        let sub = Mat::from_fn(block.len(), block.len(), |r, c| m.data[(block[r], block[c])]);
        out.extend(eigvalsh(&sub));
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.hermiticity_error() <= 1e-13 {
        if let Ok(values) = hermitian_eigenvalues_blocked(&m.hermitian_part()) {
            return values.iter().map(|l| l.abs()).sum();
        }
    }
    m.data.singular_values().iter().sum()
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn unitary_from_hamiltonian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    let data = apply_spectral(&eig.eigenvalues, &eig.eigenvectors, |l| C64::from_polar(1.0, -t * l));
    Ok(ComplexMatrix { data, dims: h.dims.clone() })
}
