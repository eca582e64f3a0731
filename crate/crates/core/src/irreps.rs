//! Numerical block diagonalization of a representation into
//! `⊕_J C^{n_J} ⊗ C^{d_J}`.
//!
//! A random Hermitian element of the center separates the isotypic
//! components. Inside each component a random Hermitian commutant element
//! (acting as `c ⊗ I_{d_J}`) splits it into `n_J` copies of the irrep, and a
//! generic commutant element transports the basis of the first copy onto the
//! others so that the algebra acts as `I_{n_J} ⊗ a`. A random algebra element
//! is used at the end to confirm that structure.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{algebra_basis, center_basis, commutant_basis, UnitaryRep};
use crate::linalg::{c, hermitian_part, identity, random_complex, CMat, HermitianEigen, C64};
use nalgebra::SVD;

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct IrrepBlock {
    pub label: String,
    /// `n_J`: dimension of the commutant factor `C_J`.
    pub multiplicity: usize,
    /// `d_J`: dimension of the irreducible factor `D_J`.
    pub dimension: usize,
    /// `d × n_J d_J` orthonormal columns spanning `H_J`, ordered `(k, m)` with
    /// `k` indexing `C_J` (outer) and `m` indexing `D_J` (inner).
    pub columns: CMat,
    /// `tr(ĝ_j restricted to one copy of D_J)`, one entry per group element.
    pub character: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct IrrepDecomposition {
    pub blocks: Vec<IrrepBlock>,
    /// Unitary whose columns are the concatenated block columns.
    pub basis_change: CMat,
}

/// Per-block structure of an operator expressed in the decomposition basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockAction {
    /// `‖P_J X P_J‖_F`.
    pub norm: f64,
    /// Distance of the block from a multiple of the identity on `H_J`.
    pub scalar_deviation: f64,
    /// Distance from the form `c ⊗ I_{d_J}` (acts trivially on `D_J`).
    pub d_factor_deviation: f64,
    /// Distance from the form `I_{n_J} ⊗ a` (acts trivially on `C_J`).
    pub c_factor_deviation: f64,
    /// `‖P_J X (1 − P_J)‖_F`: coupling out of `H_J`.
    pub leakage: f64,
}

impl IrrepDecomposition {
    pub fn dim(&self) -> usize {
        self.basis_change.nrows()
    }

    /// `B† X B`.
    pub fn rotate(&self, x: &CMat) -> CMat {
        self.basis_change.adjoint() * x * &self.basis_change
    }

    pub fn find_dimension(&self, d_j: usize) -> Option<&IrrepBlock> {
        self.blocks.iter().find(|b| b.dimension == d_j)
    }

    pub fn block_action(&self, block: usize, x: &CMat) -> BlockAction {
        let b = &self.blocks[block];
        let (n, dj) = (b.multiplicity, b.dimension);
        let inside = b.columns.adjoint() * x * &b.columns;
        let full = b.columns.adjoint() * x;
        let leakage = (&full - &inside * b.columns.adjoint()).norm();

        let size = n * dj;
        let avg = inside.trace() / c(size as f64, 0.0);
        let scalar_deviation = (&inside - identity(size) * avg).norm();

        let mut d_dev = 0.0;
        let mut diag_sum = CMat::zeros(dj, dj);
        for k in 0..n {
            for l in 0..n {
                let sub = inside.view((k * dj, l * dj), (dj, dj)).into_owned();
                let s = sub.trace() / c(dj as f64, 0.0);
                d_dev += (&sub - identity(dj) * s).norm_squared();
                if k == l {
                    diag_sum += sub;
                }
            }
        }
        let a = diag_sum / c(n as f64, 0.0);
        let c_dev = (&inside - identity(n).kronecker(&a)).norm();

        BlockAction {
            norm: inside.norm(),
            scalar_deviation,
            d_factor_deviation: d_dev.sqrt(),
            c_factor_deviation: c_dev,
            leakage,
        }
    }
}

fn random_element<R: rand::Rng>(rng: &mut R, basis: &[CMat], d: usize) -> CMat {
    let mut acc = CMat::zeros(d, d);
    for b in basis {
        acc += b * random_complex(rng);
    }
    acc
}

/// Group sorted eigenvalues into clusters. Gaps must be either below
/// `tol · scale` (same cluster) or above `√tol · scale` (different clusters).
fn cluster(values: &[f64], tol: f64) -> Result<Vec<std::ops::Range<usize>>> {
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    let ambiguous = tol.sqrt().max(tol) * scale;
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() {
            out.push(start..k);
            break;
        }
        let gap = values[k] - values[k - 1];
        if gap > tol * scale {
            if gap < ambiguous {
                return Err(Error::DegenerateDecomposition(format!(
                    "eigenvalue gap {gap:.2e} is neither resolved nor degenerate"
                )));
            }
            out.push(start..k);
            start = k;
        }
    }
    Ok(out)
}

fn columns(m: &CMat, range: std::ops::Range<usize>) -> CMat {
    m.columns(range.start, range.len()).into_owned()
}

/// Unitary factor of the polar decomposition.
fn polar_unitary(m: &CMat) -> CMat {
    let svd = SVD::new(m.clone(), true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

pub fn decompose_irreps(rep: &UnitaryRep, cluster_tol: f64, seed: u64) -> Result<IrrepDecomposition> {
    let d = rep.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = center_basis(rep);
    let commutant = commutant_basis(rep);
    let algebra = algebra_basis(rep);

    // isotypic components
    let z = hermitian_part(&random_element(&mut rng, &center, d));
    let (zvals, zvecs) = HermitianEigen::new(&z).sorted();
    let isotypic: Vec<CMat> = cluster(&zvals, cluster_tol)?
        .into_iter()
        .map(|r| columns(&zvecs, r))
        .collect();

    let herm = hermitian_part(&random_element(&mut rng, &commutant, d));
    let generic = random_element(&mut rng, &commutant, d);

    let mut blocks = Vec::new();
    for q in &isotypic {
        let m = q.ncols();
        let (cvals, cvecs) = HermitianEigen::new(&(q.adjoint() * &herm * q)).sorted();
        let copies = cluster(&cvals, cluster_tol)?;
        let n = copies.len();
        let dj = m / n;
        if copies.iter().any(|r| r.len() != dj) {
            return Err(Error::DegenerateDecomposition(
                "unequal copy sizes inside an isotypic component".into(),
            ));
        }
        let g_local = q.adjoint() * &generic * q;
        let first = columns(&cvecs, copies[0].clone());
        let mut local = CMat::zeros(m, m);
        local.columns_mut(0, dj).copy_from(&first);
        for (k, r) in copies.iter().enumerate().skip(1) {
            let wk = columns(&cvecs, r.clone());
            let transfer = wk.adjoint() * &g_local * &first;
            if transfer.norm() < 1e-6 * g_local.norm().max(1e-300) {
                return Err(Error::DegenerateDecomposition(
                    "commutant element does not connect irrep copies".into(),
                ));
            }
            local
                .columns_mut(k * dj, dj)
                .copy_from(&(wk * polar_unitary(&transfer)));
        }
        let cols = q * local;
        let character = rep
            .matrices()
            .iter()
            .map(|g| (cols.adjoint() * g * &cols).trace() / c(n as f64, 0.0))
            .collect();
        blocks.push(IrrepBlock {
            label: String::new(),
            multiplicity: n,
            dimension: dj,
            columns: cols,
            character,
        });
    }

    blocks.sort_by(|a, b| {
        b.dimension
            .cmp(&a.dimension)
            .then(b.multiplicity.cmp(&a.multiplicity))
    });
    for (k, b) in blocks.iter_mut().enumerate() {
        b.label = format!("J{k}");
    }

    let mut basis_change = CMat::zeros(d, d);
    let mut offset = 0;
    for b in &blocks {
        let w = b.columns.ncols();
        basis_change.columns_mut(offset, w).copy_from(&b.columns);
        offset += w;
    }
    if offset != d {
        return Err(Error::DegenerateDecomposition(format!(
            "blocks span {offset} of {d} dimensions"
        )));
    }

    let decomposition = IrrepDecomposition {
        blocks,
        basis_change,
    };

    // confirm the I ⊗ a / c ⊗ I structure with fresh random elements
    let check_tol = cluster_tol.sqrt().max(1e-6);
    let a = random_element(&mut rng, &algebra, d);
    let y = random_element(&mut rng, &commutant, d);
    for k in 0..decomposition.blocks.len() {
        let aa = decomposition.block_action(k, &a);
        let ya = decomposition.block_action(k, &y);
        if aa.c_factor_deviation > check_tol * a.norm()
            || aa.leakage > check_tol * a.norm()
            || ya.d_factor_deviation > check_tol * y.norm()
        {
            return Err(Error::DegenerateDecomposition(format!(
                "block {k} fails the tensor-structure check"
            )));
        }
    }
    Ok(decomposition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::close_group;
    use crate::linalg::{kron, pauli_x, pauli_z, tensor_power, unitarity_defect};

    fn swap() -> CMat {
        let mut m = CMat::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m[(i, j)] = c(1.0, 0.0);
        }
        m
    }

    fn check_invariants(rep: &UnitaryRep, dec: &IrrepDecomposition) {
        let d = rep.dim();
        let total: usize = dec.blocks.iter().map(|b| b.multiplicity * b.dimension).sum();
        assert_eq!(total, d);
        assert!(unitarity_defect(&dec.basis_change) < 1e-10);
        let comm_dim: usize = dec.blocks.iter().map(|b| b.multiplicity.pow(2)).sum();
        let alg_dim: usize = dec.blocks.iter().map(|b| b.dimension.pow(2)).sum();
        assert_eq!(comm_dim, commutant_basis(rep).len());
        assert_eq!(alg_dim, algebra_basis(rep).len());
        for g in rep.matrices() {
            for k in 0..dec.blocks.len() {
                let act = dec.block_action(k, g);
                assert!(act.c_factor_deviation < 1e-9, "{act:?}");
                assert!(act.leakage < 1e-9);
            }
        }
        for y in commutant_basis(rep) {
            for k in 0..dec.blocks.len() {
                let act = dec.block_action(k, &y);
                assert!(act.d_factor_deviation < 1e-9);
                assert!(act.leakage < 1e-9, "{act:?}");
            }
        }
    }

    #[test]
    fn pauli_is_irreducible() {
        let (_, rep) = close_group(&[pauli_x(), pauli_z()], 8).unwrap();
        let dec = decompose_irreps(&rep, DEFAULT_CLUSTER_TOL, 0).unwrap();
        assert_eq!(dec.blocks.len(), 1);
        assert_eq!((dec.blocks[0].multiplicity, dec.blocks[0].dimension), (1, 2));
        check_invariants(&rep, &dec);
    }

    #[test]
    fn symmetric_group_on_three_qubits() {
        let s12 = kron(&swap(), &identity(2));
        let s23 = kron(&identity(2), &swap());
        let (_, rep) = close_group(&[s12.clone(), &s12 * &s23], 16).unwrap();
        let dec = decompose_irreps(&rep, DEFAULT_CLUSTER_TOL, 0).unwrap();
        let dims: Vec<(usize, usize)> = dec
            .blocks
            .iter()
            .map(|b| (b.multiplicity, b.dimension))
            .collect();
        assert_eq!(dims, vec![(2, 2), (4, 1)]);
        check_invariants(&rep, &dec);
        // character of [2 1] on a transposition is 0
        let t = rep.group().generators()[0];
        assert!(dec.blocks[0].character[t].norm() < 1e-9);
    }

    #[test]
    fn collective_spin_flip_two_qubits_is_abelian() {
        let x = tensor_power(&pauli_x(), 2);
        let z = tensor_power(&pauli_z(), 2);
        let (_, rep) = close_group(&[x, z], 8).unwrap();
        let dec = decompose_irreps(&rep, DEFAULT_CLUSTER_TOL, 0).unwrap();
        assert_eq!(dec.blocks.len(), 4);
        assert!(dec
            .blocks
            .iter()
            .all(|b| b.multiplicity == 1 && b.dimension == 1));
        check_invariants(&rep, &dec);
    }

    #[test]
    fn collective_spin_flip_three_qubits_projective() {
        let x = tensor_power(&pauli_x(), 3);
        let z = tensor_power(&pauli_z(), 3);
        let (_, rep) = close_group(&[x, z], 8).unwrap();
        let dec = decompose_irreps(&rep, DEFAULT_CLUSTER_TOL, 1).unwrap();
        check_invariants(&rep, &dec);
        assert!(dec.blocks.iter().all(|b| b.dimension == 2));
    }

    #[test]
    fn trivial_group_and_seeds() {
        let (_, rep) = close_group(&[identity(3)], 4).unwrap();
        let dec = decompose_irreps(&rep, DEFAULT_CLUSTER_TOL, 0).unwrap();
        assert_eq!(dec.blocks.len(), 1);
        assert_eq!((dec.blocks[0].multiplicity, dec.blocks[0].dimension), (3, 1));
        for seed in 0..5 {
            let s12 = kron(&swap(), &identity(2));
            let s23 = kron(&identity(2), &swap());
            let (_, rep) = close_group(&[s12.clone(), &s12 * &s23], 16).unwrap();
            check_invariants(&rep, &decompose_irreps(&rep, DEFAULT_CLUSTER_TOL, seed).unwrap());
        }
    }

    #[test]
    fn cluster_flags_ambiguous_gaps() {
        assert_eq!(cluster(&[0.0, 1e-12, 1.0], 1e-8).unwrap(), vec![0..2, 2..3]);
        assert!(cluster(&[0.0, 1e-6, 1.0], 1e-8).is_err());
    }
}
