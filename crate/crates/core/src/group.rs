//! Finite groups, their projective unitary representations, and the
//! operator subspaces attached to them (group algebra, commutant, center).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, column_space, columns_to_operators, identity, kron, null_space, operator_columns,
    phase_distance, span_residual, unitarity_defect, CMat, RANK_TOL,
};

pub const DEFAULT_PHASE_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ORDER: usize = 512;

/// Abstract finite group given by its multiplication table.
///
/// Element 0 is the identity. `mul(a, b)` is the index of `g_a g_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    order: usize,
    table: Vec<usize>,
    inverses: Vec<usize>,
    generators: Vec<usize>,
}

impl Group {
    pub fn new(mult_table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self> {
        let n = mult_table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty multiplication table".into()));
        }
        if mult_table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGroup("multiplication table is not square".into()));
        }
        let table: Vec<usize> = mult_table.into_iter().flatten().collect();
        if table.iter().any(|&k| k >= n) {
            return Err(Error::InvalidGroup("entry out of range".into()));
        }
        for i in 0..n {
            if table[i] != i || table[i * n] != i {
                return Err(Error::InvalidGroup("element 0 is not the identity".into()));
            }
        }
        for i in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for j in 0..n {
                row_seen[table[i * n + j]] = true;
                col_seen[table[j * n + i]] = true;
            }
            if row_seen.iter().chain(col_seen.iter()).any(|s| !s) {
                return Err(Error::InvalidGroup(format!(
                    "row or column {i} is not a permutation"
                )));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b];
                for k in 0..n {
                    if table[ab * n + k] != table[a * n + table[b * n + k]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails for ({a}, {b}, {k})"
                        )));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|a| (0..n).find(|&b| table[a * n + b] == 0).expect("latin square"))
            .collect();
        if generators.iter().any(|&g| g >= n) {
            return Err(Error::InvalidGroup("generator index out of range".into()));
        }
        let group = Group {
            order: n,
            table,
            inverses,
            generators,
        };
        if group.closure(&group.generators).len() != n {
            return Err(Error::InvalidGroup(
                "generators do not generate the group".into(),
            ));
        }
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn mult_table(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// Sorted subgroup generated by `subset`.
    pub fn closure(&self, subset: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            for &s in subset {
                let h = self.mul(s, g);
                if !seen[h] {
                    seen[h] = true;
                    queue.push_back(h);
                }
            }
        }
        (0..self.order).filter(|&k| seen[k]).collect()
    }

    pub fn is_subgroup(&self, subset: &[usize]) -> bool {
        subset.contains(&0)
            && subset
                .iter()
                .all(|&a| subset.iter().all(|&b| subset.contains(&self.mul(a, b))))
    }

    pub fn is_normal_subgroup(&self, subset: &[usize]) -> bool {
        self.is_subgroup(subset)
            && (0..self.order).all(|g| {
                subset
                    .iter()
                    .all(|&h| subset.contains(&self.mul(self.mul(g, h), self.inverse(g))))
            })
    }

    /// One representative per left coset `gH`, lowest index first.
    pub fn transversal(&self, subgroup: &[usize]) -> Vec<usize> {
        let mut covered = vec![false; self.order];
        let mut reps = Vec::new();
        for g in 0..self.order {
            if covered[g] {
                continue;
            }
            reps.push(g);
            for &h in subgroup {
                covered[self.mul(g, h)] = true;
            }
        }
        reps
    }
}

/// Unitary matrices `ĝ_j` representing a group up to global phases.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    group: Group,
    dim: usize,
    matrices: Vec<CMat>,
    phase_tolerance: f64,
}

impl UnitaryRep {
    pub fn new(group: Group, matrices: Vec<CMat>, phase_tolerance: f64) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::InvalidRepresentation(format!(
                "{} matrices for a group of order {}",
                matrices.len(),
                group.order()
            )));
        }
        let dim = matrices[0].nrows();
        if matrices.iter().any(|m| m.shape() != (dim, dim)) {
            return Err(Error::Shape("representation matrices differ in shape".into()));
        }
        let tol = phase_tolerance.max(0.0);
        if phase_distance(&matrices[0], &identity(dim)) > tol {
            return Err(Error::InvalidRepresentation(
                "identity element is not represented by the identity".into(),
            ));
        }
        for (j, m) in matrices.iter().enumerate() {
            if unitarity_defect(m) > tol {
                return Err(Error::InvalidRepresentation(format!(
                    "matrix {j} is not unitary"
                )));
            }
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                let prod = &matrices[a] * &matrices[b];
                if phase_distance(&prod, &matrices[group.mul(a, b)]) > tol {
                    return Err(Error::InvalidRepresentation(format!(
                        "product of elements {a} and {b} disagrees with the table"
                    )));
                }
            }
        }
        for a in 0..group.order() {
            for b in (a + 1)..group.order() {
                if phase_distance(&matrices[a], &matrices[b]) <= tol {
                    return Err(Error::InvalidRepresentation(format!(
                        "elements {a} and {b} coincide up to phase (not faithful)"
                    )));
                }
            }
        }
        Ok(UnitaryRep {
            group,
            dim,
            matrices,
            phase_tolerance: tol,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn matrix(&self, element: usize) -> &CMat {
        &self.matrices[element]
    }

    pub fn phase_tolerance(&self) -> f64 {
        self.phase_tolerance
    }

    /// Matrix of generator `λ` (0-based color).
    pub fn generator_matrix(&self, color: usize) -> &CMat {
        &self.matrices[self.group.generators()[color]]
    }

    pub fn is_abelian(&self, tol: f64) -> bool {
        self.matrices.iter().all(|a| {
            self.matrices
                .iter()
                .all(|b| linalg::commutator(a, b).norm() <= tol)
        })
    }

    fn check_shape(&self, x: &CMat) -> Result<()> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::Shape(format!(
                "expected {}x{} operator, got {}x{}",
                self.dim,
                self.dim,
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(())
    }
}

/// Build the group generated by `generators` by closure up to phase.
///
/// New elements are discovered as `γ_λ g` (left multiplication), so the
/// element order follows a breadth-first walk of the Cayley graph.
pub fn close_group(generators: &[CMat], max_order: usize) -> Result<(Group, UnitaryRep)> {
    let first = generators
        .first()
        .ok_or_else(|| Error::InvalidGenerator("empty generator list".into()))?;
    let d = first.nrows();
    for (k, g) in generators.iter().enumerate() {
        if g.shape() != (d, d) {
            return Err(Error::InvalidGenerator(format!("generator {k} has wrong shape")));
        }
        if unitarity_defect(g) > DEFAULT_PHASE_TOLERANCE {
            return Err(Error::InvalidGenerator(format!("generator {k} is not unitary")));
        }
    }
    let tol = DEFAULT_PHASE_TOLERANCE;
    let find = |elements: &[CMat], m: &CMat| {
        elements
            .iter()
            .position(|e| linalg::equal_up_to_phase(e, m, tol))
    };

    let mut elements = vec![identity(d)];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let prod = g * &elements[i];
            if find(&elements, &prod).is_none() {
                if elements.len() >= max_order {
                    return Err(Error::GroupTooLarge { max_order });
                }
                elements.push(prod);
                queue.push_back(elements.len() - 1);
            }
        }
    }

    let n = elements.len();
    let mut table = vec![vec![0usize; n]; n];
    for a in 0..n {
        for b in 0..n {
            let prod = &elements[a] * &elements[b];
            table[a][b] = find(&elements, &prod).ok_or(Error::GroupTooLarge { max_order })?;
        }
    }
    let gens = generators
        .iter()
        .map(|g| find(&elements, g).expect("generator is reachable"))
        .collect();
    let group = Group::new(table, gens)?;
    let rep = UnitaryRep::new(group.clone(), elements, tol)?;
    Ok((group, rep))
}

/// Group average `(1/|G|) Σ_j ĝ_j† X ĝ_j`: the projector onto the commutant.
pub fn pi_g(rep: &UnitaryRep, x: &CMat) -> Result<CMat> {
    rep.check_shape(x)?;
    Ok(pi_g_lifted(rep, x, 1))
}

/// Group average with `ĝ_j ⊗ I_env` acting on a system–environment operator.
pub fn pi_g_lifted(rep: &UnitaryRep, x: &CMat, env_dim: usize) -> CMat {
    let id_env = identity(env_dim);
    let mut acc = CMat::zeros(x.nrows(), x.ncols());
    for g in rep.matrices() {
        let g = if env_dim == 1 { g.clone() } else { kron(g, &id_env) };
        acc += g.adjoint() * x * &g;
    }
    acc / c(rep.group().order() as f64, 0.0)
}

/// HS-orthonormal basis of the span of the representation matrices.
pub fn algebra_basis(rep: &UnitaryRep) -> Vec<CMat> {
    let d = rep.dim();
    let cols = operator_columns(rep.matrices(), d * d);
    columns_to_operators(&column_space(&cols, RANK_TOL), d)
}

fn commutant_columns(rep: &UnitaryRep) -> CMat {
    let d = rep.dim();
    let id = identity(d);
    let blocks: Vec<CMat> = rep
        .matrices()
        .iter()
        .skip(1)
        .map(|g| kron(&id, g) - kron(&g.transpose(), &id))
        .collect();
    if blocks.is_empty() {
        return identity(d * d);
    }
    let mut stacked = CMat::zeros(blocks.len() * d * d, d * d);
    for (k, b) in blocks.iter().enumerate() {
        stacked.rows_mut(k * d * d, d * d).copy_from(b);
    }
    null_space(&stacked, RANK_TOL)
}

/// HS-orthonormal basis of `{X : X ĝ_j = ĝ_j X for all j}`.
pub fn commutant_basis(rep: &UnitaryRep) -> Vec<CMat> {
    columns_to_operators(&commutant_columns(rep), rep.dim())
}

/// HS-orthonormal basis of the center: group algebra ∩ commutant.
pub fn center_basis(rep: &UnitaryRep) -> Vec<CMat> {
    let d = rep.dim();
    let alg = column_space(&operator_columns(rep.matrices(), d * d), RANK_TOL);
    let comm = commutant_columns(rep);
    // x = alg·c lies in the commutant iff (I − P_comm) alg·c = 0
    let outside = &alg - &comm * (comm.adjoint() * &alg);
    let coeffs = null_space(&outside, RANK_TOL);
    columns_to_operators(&(&alg * coeffs), d)
}

/// Distance of `x` from the commutant, `‖x − Π(x)‖_F`.
pub fn commutant_residual(rep: &UnitaryRep, x: &CMat) -> Result<f64> {
    Ok((x - pi_g(rep, x)?).norm())
}

/// Distance of `x` from the span of `basis`.
pub fn distance_from_span(basis: &[CMat], x: &CMat) -> f64 {
    span_residual(basis, x)
}

/// Check whether averaging over a transversal of `G/G₀` agrees with the full
/// group average for a `G₀`-invariant operator `x`.
pub fn quotient_check(rep: &UnitaryRep, normal_subgroup: &[usize], x: &CMat, tol: f64) -> Result<bool> {
    rep.check_shape(x)?;
    let group = rep.group();
    let mut sub: Vec<usize> = normal_subgroup.to_vec();
    sub.sort_unstable();
    sub.dedup();
    if sub.iter().any(|&h| h >= group.order()) {
        return Err(Error::NotNormalSubgroup("element index out of range".into()));
    }
    if !group.is_normal_subgroup(&sub) {
        return Err(Error::NotNormalSubgroup(format!("{sub:?}")));
    }
    let scale = x.norm().max(1.0);
    for &h in &sub {
        if linalg::commutator(rep.matrix(h), x).norm() > tol * scale {
            return Err(Error::Precondition(
                "operator is not invariant under the subgroup".into(),
            ));
        }
    }
    let reps = group.transversal(&sub);
    let mut quotient = CMat::zeros(x.nrows(), x.ncols());
    for &t in &reps {
        let g = rep.matrix(t);
        quotient += g.adjoint() * x * g;
    }
    quotient /= c(reps.len() as f64, 0.0);
    let full = pi_g(rep, x)?;
    Ok((full - quotient).norm() <= tol * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_inner, pauli_x, pauli_y, pauli_z, random_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_rep() -> UnitaryRep {
        close_group(&[pauli_x(), pauli_z()], 8).unwrap().1
    }

    /// Null-space oracle: dimension of the commutant by brute force over the
    /// real 2d²-dimensional parameterization, via rank of the stacked map.
    fn commutant_dim_oracle(rep: &UnitaryRep) -> usize {
        let d = rep.dim();
        let mut basis = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let mut e = CMat::zeros(d, d);
                e[(i, j)] = c(1.0, 0.0);
                basis.push(e);
            }
        }
        // columns: images of each matrix unit under X ↦ (ĝX − Xĝ)_ĝ
        let rows = rep.matrices().len() * d * d;
        let mut m = CMat::zeros(rows, d * d);
        for (k, e) in basis.iter().enumerate() {
            let mut col = Vec::with_capacity(rows);
            for g in rep.matrices() {
                col.extend((g * e - e * g).iter().cloned());
            }
            for (r, v) in col.into_iter().enumerate() {
                m[(r, k)] = v;
            }
        }
        d * d - column_space(&m, 1e-9).ncols()
    }

    #[test]
    fn close_sigma_x_gives_z2() {
        let (g, rep) = close_group(&[pauli_x()], 8).unwrap();
        assert_eq!(g.order(), 2);
        assert!(phase_distance(rep.matrix(1), &pauli_x()) < 1e-12);
        assert_eq!(g.generators(), &[1]);
    }

    #[test]
    fn close_identity_gives_trivial_group() {
        let (g, _) = close_group(&[identity(2)], 8).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.generators(), &[0]);
    }

    #[test]
    fn close_pauli_gives_order_four() {
        let rep = pauli_rep();
        assert_eq!(rep.group().order(), 4);
        for target in [identity(2), pauli_x(), pauli_y(), pauli_z()] {
            assert!(rep
                .matrices()
                .iter()
                .any(|m| phase_distance(m, &target) < 1e-12));
        }
    }

    #[test]
    fn close_rejects_bad_input() {
        let not_unitary = pauli_x() * c(2.0, 0.0);
        assert!(matches!(
            close_group(&[not_unitary], 8),
            Err(Error::InvalidGenerator(_))
        ));
        // rotation by an irrational angle never closes
        let r = linalg::expm_hermitian(&pauli_x(), 1.0);
        assert!(matches!(
            close_group(&[r], 16),
            Err(Error::GroupTooLarge { .. })
        ));
    }

    #[test]
    fn group_table_validation() {
        assert!(Group::new(vec![vec![0, 1], vec![1, 0]], vec![1]).is_ok());
        assert!(Group::new(vec![vec![0, 1], vec![1, 1]], vec![1]).is_err());
        // Z2 x Z2 with only one generator does not generate
        let z2z2 = vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ];
        assert!(Group::new(z2z2.clone(), vec![1]).is_err());
        assert!(Group::new(z2z2, vec![1, 2]).is_ok());
    }

    #[test]
    fn pi_g_examples() {
        let (_, z2) = close_group(&[pauli_x()], 8).unwrap();
        assert!(pi_g(&z2, &pauli_z()).unwrap().norm() < 1e-14);
        let rep = pauli_rep();
        for s in [pauli_x(), pauli_y(), pauli_z()] {
            assert!(pi_g(&rep, &s).unwrap().norm() < 1e-14);
        }
        assert!((pi_g(&rep, &identity(2)).unwrap() - identity(2)).norm() < 1e-14);
        assert!(matches!(pi_g(&rep, &identity(3)), Err(Error::Shape(_))));
    }

    #[test]
    fn commutant_dimensions_match_oracle() {
        let rep = pauli_rep();
        let comm = commutant_basis(&rep);
        assert_eq!(comm.len(), 1);
        assert_eq!(commutant_dim_oracle(&rep), 1);
        let half = identity(2) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert!(phase_distance(&comm[0], &half) < 1e-12);

        let (_, z2) = close_group(&[pauli_x()], 8).unwrap();
        assert_eq!(commutant_basis(&z2).len(), 2);
        assert_eq!(commutant_dim_oracle(&z2), 2);
        for b in commutant_basis(&z2) {
            assert!(span_residual(&algebra_basis(&z2), &b) < 1e-12);
        }

        let (_, trivial) = close_group(&[identity(3)], 4).unwrap();
        assert_eq!(commutant_basis(&trivial).len(), 9);
    }

    #[test]
    fn commutant_basis_is_orthonormal() {
        let (_, z2) = close_group(&[pauli_x()], 8).unwrap();
        let b = commutant_basis(&z2);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((hs_inner(x, y) - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn center_examples() {
        let rep = pauli_rep();
        assert_eq!(center_basis(&rep).len(), 1);
        let (_, z2) = close_group(&[pauli_x()], 8).unwrap();
        let center = center_basis(&z2);
        assert_eq!(center.len(), 2);
        assert!(span_residual(&center, &pauli_x()) < 1e-12);
        let (_, trivial) = close_group(&[identity(3)], 4).unwrap();
        let center = center_basis(&trivial);
        assert_eq!(center.len(), 1);
        assert!(span_residual(&center, &identity(3)) < 1e-12);
    }

    #[test]
    fn pi_g_is_idempotent_and_commutant_valued() {
        let rep = pauli_rep();
        let (_, z2) = close_group(&[pauli_x()], 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for r in [&rep, &z2] {
            for _ in 0..100 {
                let x = random_hermitian(&mut rng, 2);
                let p = pi_g(r, &x).unwrap();
                assert!((pi_g(r, &p).unwrap() - &p).norm() < 1e-10);
                for g in r.matrices() {
                    assert!(linalg::commutator(&p, g).norm() < 1e-10);
                }
                assert!((p.trace() - x.trace()).norm() < 1e-12);
                assert!(linalg::hermitian_defect(&p) < 1e-12);
            }
        }
    }

    #[test]
    fn quotient_check_examples() {
        let rep = pauli_rep();
        let x_index = (0..4)
            .find(|&k| phase_distance(rep.matrix(k), &pauli_x()) < 1e-12)
            .unwrap();
        assert!(quotient_check(&rep, &[0, x_index], &pauli_x(), 1e-10).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_hermitian(&mut rng, 2);
        assert!(quotient_check(&rep, &[0], &x, 1e-10).unwrap());

        // σz does not commute with σx
        assert!(matches!(
            quotient_check(&rep, &[0, x_index], &pauli_z(), 1e-10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn quotient_check_rejects_non_normal() {
        let swap = {
            let mut m = CMat::zeros(4, 4);
            for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                m[(i, j)] = c(1.0, 0.0);
            }
            m
        };
        // S3 on three qubits: swap12 and the 3-cycle
        let s12 = kron(&swap, &identity(2));
        let s23 = kron(&identity(2), &swap);
        let (g, rep) = close_group(&[s12.clone(), &s12 * &s23], 16).unwrap();
        assert_eq!(g.order(), 6);
        let t = g.generators()[0];
        assert!(matches!(
            quotient_check(&rep, &[0, t], &identity(8), 1e-10),
            Err(Error::NotNormalSubgroup(_))
        ));
        // A3 is normal; the symmetric projector of S3 agrees on A3-invariant input
        let c3 = g.generators()[1];
        let a3 = g.closure(&[c3]);
        assert_eq!(a3.len(), 3);
        let sym = pi_g(&rep, &s12).unwrap();
        assert!(quotient_check(&rep, &a3, &sym, 1e-10).unwrap());
    }
}
