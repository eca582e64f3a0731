//! Dense complex matrix helpers.
//!
//! Everything here works on small `DMatrix<Complex64>` operators (d ≤ 64 or
//! so). Vectorization is column-major, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const IM: C64 = C64::new(0.0, 1.0);

/// Relative threshold below which singular values count as zero.
pub const RANK_TOL: f64 = 1e-8;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn zeros(d: usize) -> CMat {
    CMat::zeros(d, d)
}

pub fn from_rows(rows: &[&[C64]]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMat::from_fn(n, m, |i, j| rows[i][j])
}

pub fn pauli_x() -> CMat {
    from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn pauli_y() -> CMat {
    from_rows(&[&[ZERO, -IM], &[IM, ZERO]])
}

pub fn pauli_z() -> CMat {
    from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]])
}

pub fn paulis() -> [CMat; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `op` acting on qubit `site` (0-based, most significant first) of `n` qubits.
pub fn embed_qubit(op: &CMat, site: usize, n: usize) -> CMat {
    (0..n).fold(identity(1), |acc, k| {
        if k == site {
            kron(&acc, op)
        } else {
            kron(&acc, &identity(2))
        }
    })
}

/// `⊗_k op` over `n` qubits.
pub fn tensor_power(op: &CMat, n: usize) -> CMat {
    (0..n).fold(identity(1), |acc, _| kron(&acc, op))
}

pub fn frobenius(a: &CMat) -> f64 {
    a.norm()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Hilbert-Schmidt inner product `tr(A† B)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn hermitian_defect(a: &CMat) -> f64 {
    (a - a.adjoint()).norm()
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    a.is_square() && hermitian_defect(a) <= tol * a.norm().max(1.0)
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5, 0.0)
}

/// `‖U†U − I‖_F`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    (u.adjoint() * u - identity(u.nrows())).norm()
}

/// Eigendecomposition of a Hermitian matrix, kept around so that
/// `exp(−i τ H)` can be evaluated cheaply for many τ.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn new(h: &CMat) -> Self {
        let eig = SymmetricEigen::new(hermitian_part(h));
        HermitianEigen {
            values: eig.eigenvalues.iter().cloned().collect(),
            vectors: eig.eigenvectors,
        }
    }

    /// `exp(−i τ H)`.
    pub fn propagator(&self, tau: f64) -> CMat {
        let d = self.values.len();
        let phases = DVector::from_iterator(
            d,
            self.values.iter().map(|&e| C64::from_polar(1.0, -e * tau)),
        );
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        scaled * self.vectors.adjoint()
    }

    /// Eigenvalues sorted ascending together with the matching eigenvector columns.
    pub fn sorted(&self) -> (Vec<f64>, CMat) {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        let values = order.iter().map(|&k| self.values[k]).collect();
        let vectors = CMat::from_fn(self.vectors.nrows(), order.len(), |i, j| {
            self.vectors[(i, order[j])]
        });
        (values, vectors)
    }
}

/// `exp(−i t H)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMat, t: f64) -> CMat {
    HermitianEigen::new(h).propagator(t)
}

/// Unit phase `z` minimizing `‖z A − B‖_F`, i.e. the phase of `tr(A† B)`.
pub fn align_phase(a: &CMat, b: &CMat) -> C64 {
    let t = hs_inner(a, b);
    if t.norm() == 0.0 {
        ONE
    } else {
        t / t.norm()
    }
}

/// Frobenius distance after optimal global-phase alignment.
pub fn phase_distance(a: &CMat, b: &CMat) -> f64 {
    let z = align_phase(a, b);
    (a * z - b).norm()
}

/// Phase of the first (row-major) entry whose modulus is within `tie_tol`
/// of the largest modulus.
pub fn canonical_phase(a: &CMat, tie_tol: f64) -> C64 {
    let max = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return ONE;
    }
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let z = a[(i, j)];
            if z.norm() >= max - tie_tol * max {
                return z / z.norm();
            }
        }
    }
    ONE
}

/// `A` with its global phase fixed so that the canonical entry is real positive.
pub fn canonicalize_phase(a: &CMat, tie_tol: f64) -> CMat {
    a * canonical_phase(a, tie_tol).conj()
}

/// Equality up to a global phase, comparing canonicalized forms.
pub fn equal_up_to_phase(a: &CMat, b: &CMat, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    let ca = canonicalize_phase(a, 1e-8);
    let cb = canonicalize_phase(b, 1e-8);
    (ca - cb).norm() <= tol * (1.0 + a.norm())
}

pub fn vectorize(x: &CMat) -> DVector<C64> {
    DVector::from_iterator(x.len(), x.iter().cloned())
}

pub fn unvectorize(v: &DVector<C64>, rows: usize) -> CMat {
    CMat::from_iterator(rows, v.len() / rows, v.iter().cloned())
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let cols = m.ncols();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    // Thin SVD only returns a full V for tall inputs.
    let tall = if m.nrows() < cols {
        let mut padded = CMat::zeros(cols, cols);
        padded.rows_mut(0, m.nrows()).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = SVD::new(tall, false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thr = rel_tol * smax.max(1.0);
    let null: Vec<usize> = (0..cols)
        .filter(|&k| svd.singular_values[k] <= thr)
        .collect();
    CMat::from_fn(cols, null.len(), |i, j| v_t[(null[j], i)].conj())
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &CMat, rel_tol: f64) -> CMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thr = rel_tol * smax.max(1.0);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > thr)
        .collect();
    CMat::from_fn(m.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Stack vectorized operators as columns.
pub fn operator_columns(ops: &[CMat], rows: usize) -> CMat {
    let mut m = CMat::zeros(rows, ops.len());
    for (j, op) in ops.iter().enumerate() {
        m.set_column(j, &vectorize(op));
    }
    m
}

/// Turn orthonormal columns of `d²`-vectors back into phase-canonical `d×d` operators.
pub fn columns_to_operators(basis: &CMat, d: usize) -> Vec<CMat> {
    basis
        .column_iter()
        .map(|col| canonicalize_phase(&unvectorize(&col.into_owned(), d), 1e-8))
        .collect()
}

/// Orthogonal projection of `x` onto the span of an HS-orthonormal operator basis.
pub fn project_onto(basis: &[CMat], x: &CMat) -> CMat {
    let mut out = CMat::zeros(x.nrows(), x.ncols());
    for b in basis {
        out += b * hs_inner(b, x);
    }
    out
}

/// `‖x − P(x)‖_F` for the projection onto the span of `basis`.
pub fn span_residual(basis: &[CMat], x: &CMat) -> f64 {
    (x - project_onto(basis, x)).norm()
}

/// Partial trace over the second tensor factor of dimension `env_dim`.
pub fn trace_env(rho: &CMat, env_dim: usize) -> CMat {
    let d = rho.nrows() / env_dim;
    CMat::from_fn(d, d, |i, j| {
        (0..env_dim)
            .map(|e| rho[(i * env_dim + e, j * env_dim + e)])
            .sum()
    })
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Gaussian random Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| random_complex(rng));
    hermitian_part(&g)
}

/// Random Hermitian, traceless, unit Frobenius norm.
pub fn random_traceless_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let mut h = random_hermitian(rng, d);
    let tr = h.trace() / c(d as f64, 0.0);
    h -= identity(d) * tr;
    let n = h.norm();
    if n > 0.0 {
        h /= c(n, 0.0);
    }
    h
}

/// Haar-ish random pure state (normalized complex Gaussian vector).
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DVector<C64> {
    let v = DVector::from_fn(d, |_, _| random_complex(rng));
    let n = v.norm();
    v / c(n, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        assert!((&x * &y - &z * IM).norm() < 1e-15);
        assert!((&x * &x - identity(2)).norm() < 1e-15);
    }

    #[test]
    fn expm_of_pauli_rotation() {
        let u = expm_hermitian(&pauli_x(), PI / 2.0);
        // exp(−iπ/2 σx) = −i σx
        assert!((u - pauli_x() * (-IM)).norm() < 1e-14);
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let a = pauli_y();
        let b = &a * C64::from_polar(1.0, 0.7);
        assert!(phase_distance(&a, &b) < 1e-14);
        assert!(equal_up_to_phase(&a, &b, 1e-12));
        assert!(!equal_up_to_phase(&a, &pauli_x(), 1e-12));
    }

    #[test]
    fn null_space_of_commutator_map() {
        // [σx, X] = 0 → span{I, σx}
        let x = pauli_x();
        let id = identity(2);
        let m = kron(&id, &x) - kron(&x.transpose(), &id);
        let ns = null_space(&m, RANK_TOL);
        assert_eq!(ns.ncols(), 2);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_state(&mut rng, 2);
        let rho_s = &psi * psi.adjoint();
        let rho = kron(&rho_s, &(identity(2) * c(0.5, 0.0)));
        assert!((trace_env(&rho, 2) - rho_s).norm() < 1e-14);
    }

    #[test]
    fn embed_and_tensor_power() {
        let zz = tensor_power(&pauli_z(), 2);
        let z1 = embed_qubit(&pauli_z(), 0, 2);
        let z2 = embed_qubit(&pauli_z(), 1, 2);
        assert!((zz - z1 * z2).norm() < 1e-15);
    }
}
