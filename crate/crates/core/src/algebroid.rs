//! Lie algebroid data and its normal form through the dual fiberwise-linear
//! Poisson structure.
//!
//! An algebroid over a pointed base with anchor vanishing at the origin is
//! encoded by bracket coefficients `[s_i, s_j] = sum_k P_ijk(x) s_k` and
//! anchor components `#s_i = sum_j Q_ij(x) d/dx_j`. On the dual bundle this
//! becomes a Poisson table over the variables `(s_1..s_N, x_1..x_n)` that is
//! linear in the fiber block; the normalization driver runs on that table
//! with the windows constrained to fiberwise-linear subspaces, and the
//! result is read back as algebroid data.

use alloc::vec;
use alloc::vec::Vec;

use crate::cohom::{pair_count, pair_index};
use crate::levi::{
    levi_normalize_constrained, NormalizeOptions, NormalizeOutcome, RunLog,
};
use crate::liealg::{LeviAlgebraData, StructureConstants};
use crate::poisson::PoissonTable;
use crate::poly::{Monomial, PolyMap, Polynomial};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Lie algebroid over a pointed base, truncated at total degree `trunc`
/// (fiber coordinates count one, base coordinates their polynomial degree).
#[derive(Clone, PartialEq, Debug)]
pub struct AlgebroidData<S: Scalar> {
    /// Number of sections (fiber dimension).
    pub rank: usize,
    /// Base dimension.
    pub base: usize,
    pub trunc: u32,
    /// `bracket[pair(i,j)][k]` is the coefficient of `s_k` in `[s_i, s_j]`,
    /// a polynomial over the base variables.
    bracket: Vec<Vec<Polynomial<S>>>,
    /// `anchor[i][j]` is the coefficient of `d/dx_j` in `#s_i`.
    anchor: Vec<Vec<Polynomial<S>>>,
}

impl<S: Scalar> AlgebroidData<S> {
    pub fn new(
        rank: usize,
        base: usize,
        trunc: u32,
        bracket: Vec<Vec<Polynomial<S>>>,
        anchor: Vec<Vec<Polynomial<S>>>,
    ) -> Result<Self> {
        if bracket.len() != pair_count(rank) {
            return Err(Error::DimensionMismatch {
                expected: pair_count(rank),
                found: bracket.len(),
            });
        }
        for coeffs in &bracket {
            if coeffs.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: coeffs.len(),
                });
            }
            for p in coeffs {
                if p.nvars() != base {
                    return Err(Error::DimensionMismatch {
                        expected: base,
                        found: p.nvars(),
                    });
                }
            }
        }
        if anchor.len() != rank {
            return Err(Error::DimensionMismatch {
                expected: rank,
                found: anchor.len(),
            });
        }
        for comps in &anchor {
            if comps.len() != base {
                return Err(Error::DimensionMismatch {
                    expected: base,
                    found: comps.len(),
                });
            }
            for q in comps {
                if q.nvars() != base {
                    return Err(Error::DimensionMismatch {
                        expected: base,
                        found: q.nvars(),
                    });
                }
                // anchor must vanish at the origin
                if q.min_degree() == Some(0) {
                    return Err(Error::InvalidArgument(
                        "anchor does not vanish at the origin".into(),
                    ));
                }
            }
        }
        Ok(AlgebroidData {
            rank,
            base,
            trunc,
            bracket,
            anchor,
        })
    }

    pub fn bracket_coeff(&self, i: usize, j: usize, k: usize) -> Polynomial<S> {
        use core::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Less => self.bracket[pair_index(self.rank, i, j)][k].clone(),
            Ordering::Equal => Polynomial::zero(self.base),
            Ordering::Greater => self.bracket[pair_index(self.rank, j, i)][k].neg(),
        }
    }

    pub fn anchor_comp(&self, i: usize, j: usize) -> &Polynomial<S> {
        &self.anchor[i][j]
    }

    /// Lift a base polynomial to the dual-bundle variable list (sections
    /// first, base after).
    fn lift_base(&self, p: &Polynomial<S>) -> Polynomial<S> {
        let total = self.rank + self.base;
        Polynomial::from_terms(
            total,
            p.terms().map(|(mono, c)| {
                let mut e = vec![0u16; total];
                e[self.rank..].copy_from_slice(&mono.0);
                (Monomial(e), c.clone())
            }),
        )
    }

    /// The dual fiberwise-linear Poisson table on `(s_1..s_N, x_1..x_n)`:
    /// `{s_i, s_j} = [s_i, s_j]`, `{s_i, x_j} = #s_i(x_j)`, `{x_i, x_j} = 0`.
    /// Errors when the table fails the Jacobi identity through `trunc - 1`,
    /// i.e. when the input is not a Lie algebroid to that order.
    pub fn dual_poisson(&self) -> Result<PoissonTable<S>> {
        let nn = self.rank + self.base;
        let mut entries = Vec::with_capacity(pair_count(nn));
        for i in 0..nn {
            for j in i + 1..nn {
                let entry = if j < self.rank {
                    // fiber-fiber: sum_k P_ijk(x) s_k
                    let mut acc = Polynomial::zero(nn);
                    for k in 0..self.rank {
                        let p = &self.bracket[pair_index(self.rank, i, j)][k];
                        if p.is_zero() {
                            continue;
                        }
                        let lifted = self.lift_base(p);
                        let sk = Polynomial::variable(nn, k);
                        acc = acc.add(&lifted.mul_trunc(&sk, Some(self.trunc))?)?;
                    }
                    acc
                } else if i < self.rank {
                    // fiber-base: anchor component
                    self.lift_base(&self.anchor[i][j - self.rank])
                        .truncate(self.trunc)
                } else {
                    Polynomial::zero(nn)
                };
                entries.push(entry);
            }
        }
        let table = PoissonTable::new(nn, self.trunc, entries)?;
        if let Err(Error::NotPoisson { i, j, k }) = table.check_jacobi() {
            return Err(Error::InvalidArgument(alloc::format!(
                "not a Lie algebroid to order {}: Jacobi fails on ({i}, {j}, {k})",
                self.trunc
            )));
        }
        Ok(table)
    }

    /// Read algebroid data back from a fiberwise-linear Poisson table.
    pub fn from_dual(table: &PoissonTable<S>, rank: usize) -> Result<Self> {
        let nn = table.n;
        if rank > nn {
            return Err(Error::DimensionMismatch {
                expected: nn,
                found: rank,
            });
        }
        let base = nn - rank;
        if !is_fiberwise_linear(table, rank) {
            return Err(Error::InvalidArgument(
                "table is not fiberwise linear".into(),
            ));
        }
        let drop_to_base = |p: &Polynomial<S>, strip_fiber: Option<usize>| -> Polynomial<S> {
            Polynomial::from_terms(
                base,
                p.terms().filter_map(|(mono, c)| {
                    if let Some(k) = strip_fiber {
                        if mono.0[k] != 1 {
                            return None;
                        }
                        let others =
                            (0..rank).any(|f| f != k && mono.0[f] != 0);
                        if others {
                            return None;
                        }
                    }
                    Some((Monomial(mono.0[rank..].to_vec()), c.clone()))
                }),
            )
        };
        let mut bracket = Vec::with_capacity(pair_count(rank));
        for i in 0..rank {
            for j in i + 1..rank {
                let entry = table.entry(i, j);
                let coeffs = (0..rank)
                    .map(|k| drop_to_base(&entry, Some(k)))
                    .collect::<Vec<_>>();
                bracket.push(coeffs);
            }
        }
        let mut anchor = Vec::with_capacity(rank);
        for i in 0..rank {
            let comps = (0..base)
                .map(|j| drop_to_base(&table.entry(i, rank + j), None))
                .collect::<Vec<_>>();
            anchor.push(comps);
        }
        AlgebroidData::new(rank, base, table.trunc, bracket, anchor)
    }

    /// Constant part of the bracket and linear part of the anchor: the
    /// structure constants of the algebroid's linear model.
    pub fn linear_model(&self) -> (StructureConstants<S>, Vec<Vec<Vec<S>>>) {
        let mut sc = StructureConstants::zero(self.rank);
        for i in 0..self.rank {
            for j in 0..self.rank {
                if i == j {
                    continue;
                }
                for k in 0..self.rank {
                    let p = self.bracket_coeff(i, j, k);
                    sc.t[i][j][k] = p.coeff(&Monomial::unit(self.base));
                }
            }
        }
        // anchor_lin[i][j][k]: coefficient of x_k in Q_ij
        let mut anchor_lin = vec![vec![vec![S::zero(); self.base]; self.base]; self.rank];
        for i in 0..self.rank {
            for j in 0..self.base {
                for k in 0..self.base {
                    anchor_lin[i][j][k] = self.anchor[i][j].coeff(&Monomial::var(self.base, k));
                }
            }
        }
        (sc, anchor_lin)
    }

    /// Assemble the split linear data of the dual table from the declared
    /// Levi split of the linear model: Levi block `s_1..s_m`, radical block
    /// `(s_{m+1}..s_N, x_1..x_n)`.
    pub fn dual_levi_data(&self, data: &LeviAlgebraData<S>) -> Result<LeviAlgebraData<S>> {
        if data.n != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: data.n,
            });
        }
        let (sc, anchor_lin) = self.linear_model();
        if sc != data.full_constants() {
            return Err(Error::InvalidArgument(
                "bracket constants do not match the declared linear model".into(),
            ));
        }
        let m = data.m;
        let nv = self.rank - m; // radical sections
        let nb = self.base;
        let r = nv + nb;
        let mut a = vec![vec![vec![S::zero(); r]; r]; m];
        for i in 0..m {
            for j in 0..nv {
                for k in 0..nv {
                    a[i][j][k] = data.a[i][j][k].clone();
                }
            }
            for j in 0..nb {
                for k in 0..nb {
                    a[i][nv + j][nv + k] = anchor_lin[i][j][k].clone();
                }
            }
        }
        let mut b = vec![vec![vec![S::zero(); r]; r]; r];
        for i in 0..nv {
            for j in 0..nv {
                for k in 0..nv {
                    b[i][j][k] = data.b[i][j][k].clone();
                }
            }
        }
        // radical sections act on the base through their anchor linear part
        for i in 0..nv {
            for j in 0..nb {
                for k in 0..nb {
                    let v = anchor_lin[m + i][j][k].clone();
                    if !v.is_zero() {
                        b[i][nv + j][nv + k] = v.clone();
                        b[nv + j][i][nv + k] = v.neg();
                    }
                }
            }
        }
        let big = LeviAlgebraData::new(self.rank + nb, m, data.c.clone(), a, b)?;
        let report = big.validate();
        if !report.is_valid() {
            return Err(Error::InvalidAlgebra(alloc::format!(
                "dual linear part invalid: {}",
                report.violations[0]
            )));
        }
        Ok(big)
    }

    /// Normalize the algebroid: run the constrained driver on the dual table
    /// and read the result back. The output satisfies, exactly through the
    /// normalized degree: constant Levi-block brackets, constant mixed
    /// brackets, and an exactly linear anchor on the Levi block.
    pub fn normalize(
        &self,
        data: &LeviAlgebraData<S>,
        opts: NormalizeOptions,
    ) -> Result<AlgebroidOutcome<S>> {
        let big = self.dual_levi_data(data)?;
        let dual = self.dual_poisson()?;
        let out: NormalizeOutcome<S> =
            levi_normalize_constrained(&dual, &big, opts, self.rank)?;
        if !is_fiberwise_linear(&out.table, self.rank) {
            return Err(Error::Internal(
                "normalized table left the fiberwise-linear subspace".into(),
            ));
        }
        let algebroid = AlgebroidData::from_dual(&out.table, self.rank)?;
        verify_algebroid_shape(&algebroid, data, out.normalized_through)
            .map_err(Error::Internal)?;
        Ok(AlgebroidOutcome {
            algebroid,
            forward: out.forward,
            inverse: out.inverse,
            normalized_through: out.normalized_through,
            log: out.log,
        })
    }
}

/// Outcome of an algebroid normalization.
#[derive(Clone, Debug)]
pub struct AlgebroidOutcome<S: Scalar> {
    pub algebroid: AlgebroidData<S>,
    /// Coordinate change on the dual bundle: new `(s, x)` in terms of old.
    pub forward: PolyMap<S>,
    pub inverse: PolyMap<S>,
    pub normalized_through: u32,
    pub log: RunLog<S>,
}

/// Whether a table is fiberwise linear with respect to the leading `fiber`
/// variables: fiber-fiber entries are fiber-linear, fiber-base entries are
/// base functions, base-base entries vanish.
pub fn is_fiberwise_linear<S: Scalar>(table: &PoissonTable<S>, fiber: usize) -> bool {
    let n = table.n;
    for i in 0..n {
        for j in i + 1..n {
            let Some(entry) = table.entry_ref(i, j) else { continue };
            for (mono, _) in entry.terms() {
                let fdeg = mono.block_degree(0, fiber);
                let ok = if j < fiber {
                    fdeg == 1
                } else if i < fiber {
                    fdeg == 0
                } else {
                    false // base-base entries must be empty
                };
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// Check the normal-form shape: Levi-block and Levi-radical brackets exactly
/// constant, Levi anchors exactly linear. Radical-radical brackets and
/// radical anchors may keep tails.
pub fn verify_algebroid_shape<S: Scalar>(
    a: &AlgebroidData<S>,
    data: &LeviAlgebraData<S>,
    _through: u32,
) -> core::result::Result<(), alloc::string::String> {
    let m = data.m;
    for i in 0..m {
        for j in i + 1..a.rank {
            for k in 0..a.rank {
                let p = a.bracket_coeff(i, j, k);
                let expected = if j < m && k < m {
                    data.c[i][j][k].clone()
                } else if j >= m && k >= m {
                    data.a[i][j - m][k - m].clone()
                } else {
                    S::zero()
                };
                let mut q = p;
                q.add_term(Monomial::unit(a.base), expected.neg());
                if !q.is_zero() {
                    return Err(alloc::format!(
                        "bracket coefficient ({i}, {j}, {k}) is not the expected constant"
                    ));
                }
            }
        }
        for j in 0..a.base {
            let q = &a.anchor[i][j];
            if q.degree().map_or(false, |d| d > 1) {
                return Err(alloc::format!(
                    "anchor component ({i}, {j}) is not linear"
                ));
            }
        }
    }
    Ok(())
}

/// The action algebroid of sl(2) on the plane through the standard
/// representation: constant bracket, linear anchor.
pub fn sl2_action_algebroid<S: Scalar>(trunc: u32) -> (AlgebroidData<S>, LeviAlgebraData<S>) {
    let ldata = crate::liealg::sl2_k2_data::<S>();
    let base = 2usize;
    let rank = 3usize;
    let mut bracket = Vec::with_capacity(pair_count(rank));
    for i in 0..rank {
        for j in i + 1..rank {
            let coeffs = (0..rank)
                .map(|k| {
                    let v = ldata.c[i][j][k].clone();
                    if v.is_zero() {
                        Polynomial::zero(base)
                    } else {
                        Polynomial::constant(base, v)
                    }
                })
                .collect();
            bracket.push(coeffs);
        }
    }
    let mut anchor = Vec::with_capacity(rank);
    for i in 0..rank {
        let comps = (0..base)
            .map(|j| {
                let mut q = Polynomial::zero(base);
                for k in 0..base {
                    if !ldata.a[i][j][k].is_zero() {
                        q.add_term(Monomial::var(base, k), ldata.a[i][j][k].clone());
                    }
                }
                q
            })
            .collect();
        anchor.push(comps);
    }
    let a = AlgebroidData::new(rank, base, trunc, bracket, anchor).expect("valid data");
    let sl2 = crate::liealg::sl2_data::<S>();
    (a, sl2)
}
