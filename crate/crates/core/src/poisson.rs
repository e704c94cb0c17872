//! Truncated Poisson structures as antisymmetric bracket tables of
//! polynomials, with the Jacobi test, Hamiltonian fields, linear-part
//! extraction and pushforward along near-identity coordinate changes.
//!
//! A table of truncation degree `D` determines brackets exactly through
//! degree `D`; its Jacobi identity is therefore only meaningful through
//! degree `D - 1`, and all consistency checks are stated at that order.

use alloc::vec;
use alloc::vec::Vec;

use crate::cohom::{pair_count, pair_index};
use crate::liealg::StructureConstants;
use crate::poly::{MapRole, Monomial, PolyMap, Polynomial};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Antisymmetric table of bracket polynomials `{z_i, z_j}` for `i < j`,
/// truncated at total degree `trunc`.
#[derive(Clone, PartialEq, Debug)]
pub struct PoissonTable<S: Scalar> {
    pub n: usize,
    pub trunc: u32,
    /// Size of the Levi block when the coordinates are adapted.
    pub levi_split: Option<usize>,
    entries: Vec<Polynomial<S>>,
}

impl<S: Scalar> PoissonTable<S> {
    /// Build from the upper-triangular entries in pair order
    /// `(0,1), (0,2), ..., (1,2), ...`; entries are truncated to `trunc`.
    pub fn new(n: usize, trunc: u32, entries: Vec<Polynomial<S>>) -> Result<Self> {
        if entries.len() != pair_count(n) {
            return Err(Error::DimensionMismatch {
                expected: pair_count(n),
                found: entries.len(),
            });
        }
        for e in &entries {
            if e.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.nvars(),
                });
            }
        }
        Ok(PoissonTable {
            n,
            trunc,
            levi_split: None,
            entries: entries.into_iter().map(|e| e.truncate(trunc)).collect(),
        })
    }

    pub fn zero(n: usize, trunc: u32) -> Self {
        PoissonTable {
            n,
            trunc,
            levi_split: None,
            entries: vec![Polynomial::zero(n); pair_count(n)],
        }
    }

    /// The linear table of a Lie algebra: `{z_i, z_j} = sum_k t[i][j][k] z_k`.
    pub fn linear(sc: &StructureConstants<S>, trunc: u32) -> Self {
        let n = sc.n;
        let mut entries = Vec::with_capacity(pair_count(n));
        for i in 0..n {
            for j in i + 1..n {
                let mut p = Polynomial::zero(n);
                for k in 0..n {
                    if !sc.t[i][j][k].is_zero() {
                        p.add_term(Monomial::var(n, k), sc.t[i][j][k].clone());
                    }
                }
                entries.push(p);
            }
        }
        PoissonTable {
            n,
            trunc,
            levi_split: None,
            entries,
        }
    }

    pub fn with_levi_split(mut self, m: usize) -> Self {
        self.levi_split = Some(m);
        self
    }

    /// `{z_i, z_j}` for any pair, via antisymmetry.
    pub fn entry(&self, i: usize, j: usize) -> Polynomial<S> {
        use core::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => self.entries[pair_index(self.n, i, j)].clone(),
            Ordering::Equal => Polynomial::zero(self.n),
            Ordering::Greater => self.entries[pair_index(self.n, j, i)].neg(),
        }
    }

    pub fn entry_ref(&self, i: usize, j: usize) -> Option<&Polynomial<S>> {
        (i < j).then(|| &self.entries[pair_index(self.n, i, j)])
    }

    pub fn entries(&self) -> &[Polynomial<S>] {
        &self.entries
    }

    /// Poisson bracket of two polynomials, truncated at the table degree:
    /// `sum_{i<j} {z_i, z_j} (df/dz_i dg/dz_j - df/dz_j dg/dz_i)`.
    pub fn bracket(&self, f: &Polynomial<S>, g: &Polynomial<S>) -> Result<Polynomial<S>> {
        if f.nvars() != self.n || g.nvars() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: if f.nvars() != self.n { f.nvars() } else { g.nvars() },
            });
        }
        let cap = Some(self.trunc);
        let df: Vec<Polynomial<S>> = (0..self.n).map(|i| f.derivative(i)).collect();
        let dg: Vec<Polynomial<S>> = (0..self.n).map(|i| g.derivative(i)).collect();
        let mut acc = Polynomial::zero(self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                let pi = &self.entries[pair_index(self.n, i, j)];
                if pi.is_zero() {
                    continue;
                }
                let t1 = df[i].mul_trunc(&dg[j], cap)?;
                let t2 = df[j].mul_trunc(&dg[i], cap)?;
                let mixed = t1.sub(&t2)?;
                if !mixed.is_zero() {
                    acc.add_assign_ref(&pi.mul_trunc(&mixed, cap)?);
                }
            }
        }
        Ok(acc.truncate(self.trunc))
    }

    /// Jacobi defects `{{z_i,z_j},z_k} + {{z_j,z_k},z_i} + {{z_k,z_i},z_j}`
    /// for all triples `i < j < k`, each truncated at degree `trunc - 1`.
    pub fn jacobiator(&self) -> Vec<((usize, usize, usize), Polynomial<S>)> {
        let cap = self.trunc.saturating_sub(1);
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                for k in j + 1..self.n {
                    let zi = Polynomial::variable(self.n, i);
                    let zj = Polynomial::variable(self.n, j);
                    let zk = Polynomial::variable(self.n, k);
                    let t1 = self.bracket(&self.entry(i, j), &zk).expect("same vars");
                    let t2 = self.bracket(&self.entry(j, k), &zi).expect("same vars");
                    let t3 = self.bracket(&self.entry(k, i), &zj).expect("same vars");
                    let sum = t1
                        .add(&t2)
                        .and_then(|s| s.add(&t3))
                        .expect("same vars")
                        .truncate(cap);
                    out.push(((i, j, k), sum));
                }
            }
        }
        out
    }

    /// Error with the first violating triple if the Jacobi identity fails
    /// through degree `trunc - 1`.
    pub fn check_jacobi(&self) -> Result<()> {
        for ((i, j, k), defect) in self.jacobiator() {
            if !defect.is_zero() {
                return Err(Error::NotPoisson { i, j, k });
            }
        }
        Ok(())
    }

    /// Degree-1 coefficients as structure constants. Errors when a constant
    /// term is present or when the constants fail the Jacobi identity.
    pub fn linear_part(&self) -> Result<StructureConstants<S>> {
        let n = self.n;
        let mut sc = StructureConstants::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                let p = &self.entries[pair_index(n, i, j)];
                for (mono, coeff) in p.terms() {
                    match mono.degree() {
                        0 => {
                            return Err(Error::InvalidArgument(
                                "table has a constant term: structure does not vanish at 0"
                                    .into(),
                            ))
                        }
                        1 => {
                            let k = mono.0.iter().position(|&e| e == 1).expect("degree 1");
                            sc.t[i][j][k] = coeff.clone();
                            sc.t[j][i][k] = coeff.neg();
                        }
                        _ => break,
                    }
                }
            }
        }
        if let Some((i, j, k)) = sc.jacobi_violation() {
            return Err(Error::InvalidAlgebra(alloc::format!(
                "linear part fails the Jacobi identity on ({i}, {j}, {k})"
            )));
        }
        Ok(sc)
    }

    /// Hamiltonian vector field of `f`: component `j` is `{f, z_j}`.
    pub fn hamiltonian_field(&self, f: &Polynomial<S>) -> Result<PolyMap<S>> {
        let comps = (0..self.n)
            .map(|j| self.bracket(f, &Polynomial::variable(self.n, j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap::new(comps, MapRole::VectorField))
    }

    /// Push the table forward along a near-identity coordinate change: the
    /// new coordinates are `phi(old)`, and the new table is
    /// `{phi_i, phi_j}` re-expressed in the new coordinates through `phi^-1`.
    pub fn pushforward(&self, phi: &PolyMap<S>, trunc: u32) -> Result<PoissonTable<S>> {
        let inv = phi.invert_near_identity(trunc)?;
        self.pushforward_with_inverse(phi, &inv, trunc)
    }

    /// Variant of [`Self::pushforward`] reusing a precomputed inverse.
    pub fn pushforward_with_inverse(
        &self,
        phi: &PolyMap<S>,
        phi_inv: &PolyMap<S>,
        trunc: u32,
    ) -> Result<PoissonTable<S>> {
        if !phi.is_near_identity() {
            return Err(Error::NotNearIdentity);
        }
        if phi.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: phi.dim(),
            });
        }
        let mut brackets = Vec::with_capacity(pair_count(self.n));
        for i in 0..self.n {
            for j in i + 1..self.n {
                brackets.push(self.bracket(&phi.components[i], &phi.components[j])?);
            }
        }
        // one shared substitution cache for the whole table
        let entries = crate::poly::substitute_many(&brackets, phi_inv, trunc)?;
        let mut out = PoissonTable::new(self.n, trunc, entries)?;
        out.levi_split = self.levi_split;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{sl2_data, sl2_k2_data};
    use crate::sample::{random_near_identity, random_polynomial, seeded_rng};
    use crate::scalar::{rat, Rat};

    fn sl2_table(trunc: u32) -> PoissonTable<Rat> {
        PoissonTable::linear(&sl2_data::<Rat>().full_constants(), trunc)
    }

    fn poly(nvars: usize, terms: &[(&[u16], &str)]) -> Polynomial<Rat> {
        Polynomial::from_terms(
            nvars,
            terms.iter().map(|(e, c)| (Monomial(e.to_vec()), rat(c))),
        )
    }

    #[test]
    fn coordinate_brackets_match_entries() {
        let t = sl2_table(4);
        let h = Polynomial::variable(3, 0);
        let e = Polynomial::variable(3, 1);
        // {h, e} = 2e
        assert_eq!(t.bracket(&h, &e).unwrap(), e.scale(&rat("2")));
        // {f, f} = 0
        let f = Polynomial::variable(3, 2);
        assert!(t.bracket(&f, &f).unwrap().is_zero());
        for i in 0..3 {
            for j in 0..3 {
                let zi = Polynomial::variable(3, i);
                let zj = Polynomial::variable(3, j);
                assert_eq!(t.bracket(&zi, &zj).unwrap(), t.entry(i, j));
            }
        }
    }

    #[test]
    fn jacobiator_vanishes_on_linear_tables() {
        for table in [
            sl2_table(5),
            PoissonTable::linear(&sl2_k2_data::<Rat>().full_constants(), 4),
        ] {
            assert!(table.check_jacobi().is_ok());
        }
        // so(3)-type: {z1,z2} = z3 cyclic
        let so3 = StructureConstants::from_upper_triples(
            3,
            &[
                (0, 1, 2, rat("1")),
                (1, 2, 0, rat("1")),
                (2, 0, 1, rat("1")),
            ],
        );
        assert!(PoissonTable::linear(&so3, 4).check_jacobi().is_ok());
    }

    #[test]
    fn jacobiator_detects_non_poisson_table() {
        // {z1,z2} = z3, {z2,z3} = 0, {z3,z1} = z1: J(1,2,3) != 0
        let entries = alloc::vec![
            poly(3, &[(&[0, 0, 1], "1")]), // {z1, z2}
            poly(3, &[(&[1, 0, 0], "-1")]), // {z1, z3} = -{z3, z1}
            Polynomial::zero(3),           // {z2, z3}
        ];
        let t = PoissonTable::new(3, 3, entries).unwrap();
        assert!(matches!(
            t.check_jacobi(),
            Err(Error::NotPoisson { i: 0, j: 1, k: 2 })
        ));
    }

    #[test]
    fn linear_part_reads_constants() {
        let t = sl2_table(4);
        let sc = t.linear_part().unwrap();
        assert_eq!(sc.t, sl2_data::<Rat>().full_constants().t);
        // adding a quadratic perturbation does not change the linear part
        let mut entries: Vec<Polynomial<Rat>> = t.entries().to_vec();
        entries[0] = entries[0].add(&poly(3, &[(&[0, 2, 0], "5")])).unwrap();
        let t2 = PoissonTable::new(3, 4, entries).unwrap();
        assert_eq!(t2.linear_part().unwrap().t, sc.t);
        // zero table reads as the abelian algebra
        let z = PoissonTable::<Rat>::zero(3, 4);
        assert!(z.linear_part().unwrap().t.iter().flatten().flatten().all(|x| x.is_zero()));
        // constant term rejected
        let mut entries: Vec<Polynomial<Rat>> = t.entries().to_vec();
        entries[0] = entries[0].add(&Polynomial::constant(3, rat("1"))).unwrap();
        let bad = PoissonTable::new(3, 4, entries).unwrap();
        assert!(bad.linear_part().is_err());
    }

    #[test]
    fn hamiltonian_field_of_casimir_vanishes() {
        let t = sl2_table(4);
        // h^2/4 + ef is a Casimir polynomial of the linear sl(2) bracket
        let q = poly(3, &[(&[2, 0, 0], "1/4"), (&[0, 1, 1], "1")]);
        let x = t.hamiltonian_field(&q).unwrap();
        assert!(x.components.iter().all(|c| c.is_zero()));
        // constants have zero field
        let c = Polynomial::constant(3, rat("7"));
        assert!(t
            .hamiltonian_field(&c)
            .unwrap()
            .components
            .iter()
            .all(|p| p.is_zero()));
        // coordinate functions give the linear fields: component j is {z_i, z_j}
        let h = Polynomial::variable(3, 0);
        let xh = t.hamiltonian_field(&h).unwrap();
        for j in 0..3 {
            assert_eq!(xh.components[j], t.entry(0, j));
        }
    }

    #[test]
    fn pushforward_identity_is_identity() {
        let t = sl2_table(6);
        let id = PolyMap::identity(3);
        assert_eq!(t.pushforward(&id, 6).unwrap(), t);
    }

    #[test]
    fn pushforward_roundtrip_and_jacobi() {
        let mut rng = seeded_rng(41);
        let t = sl2_table(8);
        let phi: PolyMap<Rat> = random_near_identity(&mut rng, 3, 2, 3, 3);
        let pushed = t.pushforward(&phi, 8).unwrap();
        // stays Poisson through trunc - 1
        assert!(pushed.check_jacobi().is_ok());
        // linear part survives a near-identity change
        assert_eq!(pushed.linear_part().unwrap().t, t.linear_part().unwrap().t);
        // round trip through the inverse restores the table
        let inv = phi.invert_near_identity(8).unwrap();
        let back = pushed.pushforward(&inv, 8).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn bracket_is_a_derivation() {
        // Leibniz: {f, gh} = {f, g} h + g {f, h}, up to truncation
        let mut rng = seeded_rng(43);
        let t = sl2_table(6);
        for _ in 0..10 {
            let f: Polynomial<Rat> = random_polynomial(&mut rng, 3, 1, 2, 4);
            let g: Polynomial<Rat> = random_polynomial(&mut rng, 3, 1, 2, 4);
            let h: Polynomial<Rat> = random_polynomial(&mut rng, 3, 1, 2, 4);
            let gh = g.mul_trunc(&h, Some(6)).unwrap();
            let lhs = t.bracket(&f, &gh).unwrap().truncate(4);
            let rhs = t
                .bracket(&f, &g)
                .unwrap()
                .mul_trunc(&h, Some(6))
                .unwrap()
                .add(&g.mul_trunc(&t.bracket(&f, &h).unwrap(), Some(6)).unwrap())
                .unwrap()
                .truncate(4);
            assert_eq!(lhs, rhs);
        }
    }
}
