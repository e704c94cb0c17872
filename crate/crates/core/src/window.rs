//! Graded module windows: finite-dimensional pieces of the function and
//! vector-field modules on which the semisimple block acts.
//!
//! A window holds the monomial (or monomial-times-direction) basis for total
//! degrees in `(lo, hi]`, the sparse action matrices of the generators, the
//! Casimir operator, and the decomposition of the basis into invariant
//! components. The Casimir is split and inverted per component through its
//! minimal polynomial on the cyclic subspace of the vector at hand, which
//! keeps everything exact without any dense elimination.
//!
//! Two constrained window kinds support the fiberwise-linear setting: their
//! bases are the sub-bases of the general windows compatible with the
//! fiber/base block structure.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::liealg::LeviAlgebraData;
use crate::linalg::IncrementalSpan;
use crate::poly::{enumerate_monomials, Monomial, Polynomial};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Which module a window is a piece of.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WindowKind {
    /// Polynomial functions.
    Function,
    /// Vector fields along the radical directions.
    VectorField,
    /// Fiberwise-linear functions; `fiber` is the number of leading fiber
    /// variables (sections), the rest are base variables.
    FiberLinearFunction { fiber: usize },
    /// Fields along radical directions with fiberwise-linear coefficients on
    /// fiber directions and base-function coefficients on base directions.
    AlgebroidVectorField { fiber: usize },
}

impl WindowKind {
    pub fn is_vector(&self) -> bool {
        matches!(
            self,
            WindowKind::VectorField | WindowKind::AlgebroidVectorField { .. }
        )
    }

    fn fiber(&self) -> Option<usize> {
        match self {
            WindowKind::FiberLinearFunction { fiber }
            | WindowKind::AlgebroidVectorField { fiber } => Some(*fiber),
            _ => None,
        }
    }
}

/// Column-major sparse matrix over the window basis.
#[derive(Clone, Debug)]
pub struct SparseCols<S> {
    pub dim: usize,
    pub cols: Vec<Vec<(u32, S)>>,
}

impl<S: Scalar> SparseCols<S> {
    fn zero(dim: usize) -> Self {
        SparseCols {
            dim,
            cols: vec![Vec::new(); dim],
        }
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, a) in &self.cols[c] {
                out[*r as usize] = out[*r as usize].add_ref(&a.mul_ref(x));
            }
        }
        out
    }

    /// Apply restricted to the given columns (entries elsewhere ignored).
    pub fn apply_on(&self, v: &[S], support: &[u32]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        for &c in support {
            let x = &v[c as usize];
            if x.is_zero() {
                continue;
            }
            for (r, a) in &self.cols[c as usize] {
                out[*r as usize] = out[*r as usize].add_ref(&a.mul_ref(x));
            }
        }
        out
    }
}

/// A finite-dimensional graded window of a module with its generator action.
#[derive(Clone, Debug)]
pub struct ModuleWindow<S: Scalar> {
    pub kind: WindowKind,
    pub nvars: usize,
    pub m: usize,
    pub lo: u32,
    pub hi: u32,
    /// Directions (variable indices) for vector kinds; empty otherwise.
    pub dirs: Vec<usize>,
    /// Basis elements `(direction position, monomial)`; direction position is
    /// 0 for function kinds.
    basis: Vec<(u32, Monomial)>,
    index: BTreeMap<(u32, Monomial), usize>,
    /// Levi-block structure constants, kept for the differential.
    pub c: Vec<Vec<Vec<S>>>,
    /// Inverse Killing form of the Levi block.
    pub kinv: Vec<Vec<S>>,
    act: Vec<SparseCols<S>>,
    gamma: SparseCols<S>,
    comps: Vec<Vec<u32>>,
    comp_of: Vec<u32>,
}

impl<S: Scalar> ModuleWindow<S> {
    /// Build the window of the given kind for total degrees in `(lo, hi]`.
    ///
    /// The action matrices are assembled from the linear part encoded in
    /// `data`; the representation law `[rho_i, rho_j] = rho([xi_i, xi_j])` is
    /// verified exactly on the result.
    pub fn build(data: &LeviAlgebraData<S>, kind: WindowKind, lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(
                "window range must satisfy lo <= hi".into(),
            ));
        }
        let n = data.n;
        let m = data.m;
        if let Some(fiber) = kind.fiber() {
            if fiber < m || fiber > n {
                return Err(Error::InvalidArgument(
                    "fiber block must contain the Levi block".into(),
                ));
            }
        }

        let dirs: Vec<usize> = if kind.is_vector() {
            (m..n).collect()
        } else {
            Vec::new()
        };

        // Basis enumeration, graded order within each direction slot.
        let admit = |mono: &Monomial, dir: Option<usize>| -> bool {
            let d = mono.degree();
            if d <= lo || d > hi {
                return false;
            }
            match (kind, dir) {
                (WindowKind::Function, _) => true,
                (WindowKind::FiberLinearFunction { fiber }, _) => mono.block_degree(0, fiber) == 1,
                (WindowKind::VectorField, _) => true,
                (WindowKind::AlgebroidVectorField { fiber }, Some(dv)) => {
                    let fdeg = mono.block_degree(0, fiber);
                    if dv < fiber {
                        fdeg == 1
                    } else {
                        fdeg == 0
                    }
                }
                (WindowKind::AlgebroidVectorField { .. }, None) => false,
            }
        };
        let monos = enumerate_monomials(n, hi);
        let mut basis: Vec<(u32, Monomial)> = Vec::new();
        if kind.is_vector() {
            for (dpos, &dvar) in dirs.iter().enumerate() {
                for mono in &monos {
                    if admit(mono, Some(dvar)) {
                        basis.push((dpos as u32, mono.clone()));
                    }
                }
            }
        } else {
            for mono in &monos {
                if admit(mono, None) {
                    basis.push((0, mono.clone()));
                }
            }
        }
        let index: BTreeMap<(u32, Monomial), usize> = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, b)| (b, i))
            .collect();

        let full = data.full_constants();
        let kinv: Vec<Vec<S>> = if m > 0 {
            let kinv_mat = data.killing_inverse()?;
            (0..m)
                .map(|i| (0..m).map(|j| kinv_mat.at(i, j).clone()).collect())
                .collect()
        } else {
            Vec::new()
        };

        // Column of rho_i at each basis element.
        let dim = basis.len();
        let mut act: Vec<SparseCols<S>> = (0..m).map(|_| SparseCols::zero(dim)).collect();
        for (col, (dpos, mono)) in basis.iter().enumerate() {
            for (i, mat) in act.iter_mut().enumerate() {
                let mut entries: BTreeMap<usize, S> = BTreeMap::new();
                // Derivation part: sum_p (sum_k t[i][p][k] z_k) d(mono)/dz_p.
                for p in 0..n {
                    let e = mono.0[p];
                    if e == 0 {
                        continue;
                    }
                    for k in 0..n {
                        let t = &full.t[i][p][k];
                        if t.is_zero() {
                            continue;
                        }
                        let mut m2 = mono.clone();
                        m2.0[p] -= 1;
                        m2.0[k] += 1;
                        let coeff = t.mul_ref(&S::from_i64(e as i64));
                        let target = (*dpos, m2);
                        let Some(&row) = index.get(&target) else {
                            return Err(Error::Internal("action leaves the window basis".into()));
                        };
                        merge(&mut entries, row, coeff);
                    }
                }
                // Direction part for vector kinds: the bracket with the
                // linear field also moves the direction slot, contributing
                // -t[i][p][dir] at direction p for radical p.
                if kind.is_vector() {
                    let dvar = dirs[*dpos as usize];
                    for (ppos, &pvar) in dirs.iter().enumerate() {
                        let t = &full.t[i][pvar][dvar];
                        if t.is_zero() {
                            continue;
                        }
                        let target = (ppos as u32, mono.clone());
                        let Some(&row) = index.get(&target) else {
                            return Err(Error::Internal("action leaves the window basis".into()));
                        };
                        merge(&mut entries, row, t.neg());
                    }
                }
                mat.cols[col] = entries
                    .into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(r, v)| (r as u32, v))
                    .collect();
            }
        }

        // Casimir operator Gamma = sum_{i,j} kinv[i][j] rho_i rho_j.
        let mut gamma = SparseCols::zero(dim);
        for col in 0..dim {
            let mut unit = vec![S::zero(); dim];
            unit[col] = S::one();
            let mut acc = vec![S::zero(); dim];
            for j in 0..m {
                let rj = act[j].apply_on(&unit, &[col as u32]);
                for i in 0..m {
                    if kinv[i][j].is_zero() {
                        continue;
                    }
                    let ri = act[i].apply(&rj);
                    for (r, v) in ri.iter().enumerate() {
                        if !v.is_zero() {
                            acc[r] = acc[r].add_ref(&kinv[i][j].mul_ref(v));
                        }
                    }
                }
            }
            gamma.cols[col] = acc
                .into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(r, v)| (r as u32, v))
                .collect();
        }

        // Invariant components: connected components of the union of the
        // action sparsity patterns. The actions preserve them, so every
        // solve can be restricted per component.
        let mut uf: Vec<u32> = (0..dim as u32).collect();
        for mat in act.iter() {
            for (col, entries) in mat.cols.iter().enumerate() {
                for (r, _) in entries {
                    let (a, b) = (uf_find(&mut uf, col as u32), uf_find(&mut uf, *r));
                    if a != b {
                        uf[a as usize] = b;
                    }
                }
            }
        }
        let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for i in 0..dim as u32 {
            let root = uf_find(&mut uf, i);
            groups.entry(root).or_default().push(i);
        }
        let comps: Vec<Vec<u32>> = groups.into_values().collect();
        let mut comp_of = vec![0u32; dim];
        for (ci, comp) in comps.iter().enumerate() {
            for &i in comp {
                comp_of[i as usize] = ci as u32;
            }
        }

        let win = ModuleWindow {
            kind,
            nvars: n,
            m,
            lo,
            hi,
            dirs,
            basis,
            index,
            c: data.c.clone(),
            kinv,
            act,
            gamma,
            comps,
            comp_of,
        };
        win.verify_representation_law()?;
        Ok(win)
    }

    fn verify_representation_law(&self) -> Result<()> {
        let dim = self.dim();
        for i in 0..self.m {
            for j in i + 1..self.m {
                for b in 0..dim {
                    let mut unit = vec![S::zero(); dim];
                    unit[b] = S::one();
                    let support = [b as u32];
                    let ij = self.act[i].apply(&self.act[j].apply_on(&unit, &support));
                    let ji = self.act[j].apply(&self.act[i].apply_on(&unit, &support));
                    let mut expected = vec![S::zero(); dim];
                    for k in 0..self.m {
                        if self.c[i][j][k].is_zero() {
                            continue;
                        }
                        let rk = self.act[k].apply_on(&unit, &support);
                        for (r, v) in rk.iter().enumerate() {
                            if !v.is_zero() {
                                expected[r] = expected[r].add_ref(&self.c[i][j][k].mul_ref(v));
                            }
                        }
                    }
                    for r in 0..dim {
                        if !ij[r].sub_ref(&ji[r]).sub_ref(&expected[r]).is_zero() {
                            return Err(Error::Internal(
                                "window action violates the representation law".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn generator_count(&self) -> usize {
        self.m
    }

    pub fn basis_elem(&self, i: usize) -> &(u32, Monomial) {
        &self.basis[i]
    }

    pub fn components(&self) -> &[Vec<u32>] {
        &self.comps
    }

    pub fn component_of(&self, basis_index: usize) -> usize {
        self.comp_of[basis_index] as usize
    }

    /// Apply the action of generator `i`.
    pub fn act(&self, i: usize, v: &[S]) -> Vec<S> {
        self.act[i].apply(v)
    }

    pub fn action_matrix(&self, i: usize) -> &SparseCols<S> {
        &self.act[i]
    }

    pub fn casimir_apply(&self, v: &[S]) -> Vec<S> {
        self.gamma.apply(v)
    }

    /// Project a polynomial supported in this window onto basis coordinates.
    /// Errors if any term lies outside the window (degree or constraint).
    pub fn project_poly(&self, p: &Polynomial<S>) -> Result<Vec<S>> {
        if self.kind.is_vector() {
            return Err(Error::InvalidArgument(
                "this window holds vector fields, not functions".into(),
            ));
        }
        let mut out = vec![S::zero(); self.dim()];
        for (mono, coeff) in p.terms() {
            let Some(&i) = self.index.get(&(0, mono.clone())) else {
                return Err(Error::InvalidArgument(alloc::format!(
                    "monomial of degree {} outside window ({}, {}] or constraint",
                    mono.degree(),
                    self.lo,
                    self.hi
                )));
            };
            out[i] = coeff.clone();
        }
        Ok(out)
    }

    /// Project a vector field given by components along `dirs`.
    pub fn project_field(&self, comps: &[Polynomial<S>]) -> Result<Vec<S>> {
        if !self.kind.is_vector() {
            return Err(Error::InvalidArgument(
                "this window holds functions, not vector fields".into(),
            ));
        }
        if comps.len() != self.dirs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dirs.len(),
                found: comps.len(),
            });
        }
        let mut out = vec![S::zero(); self.dim()];
        for (dpos, p) in comps.iter().enumerate() {
            for (mono, coeff) in p.terms() {
                let Some(&i) = self.index.get(&(dpos as u32, mono.clone())) else {
                    return Err(Error::InvalidArgument(alloc::format!(
                        "component {} has a term of degree {} outside the window",
                        dpos,
                        mono.degree()
                    )));
                };
                out[i] = coeff.clone();
            }
        }
        Ok(out)
    }

    /// Read a window vector back as a polynomial (function kinds).
    pub fn lift_to_poly(&self, v: &[S]) -> Polynomial<S> {
        let mut p = Polynomial::zero(self.nvars);
        for (i, coeff) in v.iter().enumerate() {
            if !coeff.is_zero() {
                p.add_term(self.basis[i].1.clone(), coeff.clone());
            }
        }
        p
    }

    /// Read a window vector back as per-direction components (vector kinds).
    pub fn lift_to_field(&self, v: &[S]) -> Vec<Polynomial<S>> {
        let mut out = vec![Polynomial::zero(self.nvars); self.dirs.len()];
        for (i, coeff) in v.iter().enumerate() {
            if !coeff.is_zero() {
                let (dpos, mono) = &self.basis[i];
                out[*dpos as usize].add_term(mono.clone(), coeff.clone());
            }
        }
        out
    }

    /// Split `v = invariant + image` along `ker(Gamma) + im(Gamma)` and
    /// invert the Casimir on the image part. Works per invariant component
    /// through the minimal polynomial of the Casimir on the cyclic subspace
    /// generated by the component of `v`.
    ///
    /// Errors if the Casimir is not semisimple on some cyclic subspace,
    /// which signals an invalid module.
    pub fn casimir_split_invert(&self, v: &[S]) -> Result<CasimirSplit<S>> {
        let dim = self.dim();
        let mut invariant = vec![S::zero(); dim];
        let mut inverted = vec![S::zero(); dim];

        let mut touched: Vec<u32> = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, _)| self.comp_of[i])
            .collect();
        touched.sort_unstable();
        touched.dedup();

        for &ci in &touched {
            let comp = &self.comps[ci as usize];
            let compress =
                |w: &[S]| -> Vec<S> { comp.iter().map(|&i| w[i as usize].clone()).collect() };
            let mut span = IncrementalSpan::<S>::new(comp.len());
            let mut iterates: Vec<Vec<S>> = Vec::new();
            let mut cur = vec![S::zero(); dim];
            for &i in comp {
                cur[i as usize] = v[i as usize].clone();
            }
            let minpoly: Vec<S>;
            loop {
                match span.insert(&compress(&cur)) {
                    Some(dep) => {
                        // cur = sum dep_i iterates_i: the monic minimal
                        // polynomial is t^k - sum dep_i t^i.
                        let k = iterates.len();
                        let mut p = vec![S::zero(); k + 1];
                        for (i, d) in dep.iter().enumerate() {
                            p[i] = d.neg();
                        }
                        p[k] = S::one();
                        minpoly = p;
                        break;
                    }
                    None => {
                        iterates.push(cur.clone());
                        if iterates.len() > comp.len() + 1 {
                            return Err(Error::Internal(
                                "Krylov iteration exceeded component dimension".into(),
                            ));
                        }
                        cur = self.gamma.apply_on(&cur, comp);
                    }
                }
            }

            let k = minpoly.len() - 1;
            if k == 0 {
                continue; // zero component
            }
            if !minpoly[0].is_zero() {
                // No invariant part here:
                // Gamma^{-1} v = -(1/p_0) sum_{i>=1} p_i Gamma^{i-1} v.
                let factor = minpoly[0].inv().expect("nonzero").neg();
                for i in 1..=k {
                    if minpoly[i].is_zero() {
                        continue;
                    }
                    let coeff = factor.mul_ref(&minpoly[i]);
                    for &bi in comp {
                        let b = bi as usize;
                        if !iterates[i - 1][b].is_zero() {
                            inverted[b] = inverted[b].add_ref(&coeff.mul_ref(&iterates[i - 1][b]));
                        }
                    }
                }
            } else {
                if minpoly.len() < 2 || minpoly[1].is_zero() {
                    return Err(Error::Internal(
                        "Casimir not semisimple on window (repeated zero root)".into(),
                    ));
                }
                // r(t) = minpoly / t; invariant part = r(Gamma) v / r(0).
                let r: Vec<S> = minpoly[1..].to_vec();
                let inv_r0 = r[0].inv().expect("nonzero");
                let mut inv_part = vec![S::zero(); dim];
                for (i, ri) in r.iter().enumerate() {
                    if ri.is_zero() {
                        continue;
                    }
                    let coeff = inv_r0.mul_ref(ri);
                    for &bi in comp {
                        let b = bi as usize;
                        if !iterates[i][b].is_zero() {
                            inv_part[b] = inv_part[b].add_ref(&coeff.mul_ref(&iterates[i][b]));
                        }
                    }
                }
                // v1 = v - invariant has Gamma^i v1 = iterates[i] for i >= 1:
                // Gamma^{-1} v1 = -(1/r_0)(r_1 v1 + sum_{i>=2} r_i Gamma^{i-1} v1).
                let deg_r = r.len() - 1;
                let minus_inv_r0 = inv_r0.neg();
                for &bi in comp {
                    let b = bi as usize;
                    let v1_b = iterates[0][b].sub_ref(&inv_part[b]);
                    let mut acc = if deg_r >= 1 {
                        r[1].mul_ref(&v1_b)
                    } else {
                        S::zero()
                    };
                    for (i, ri) in r.iter().enumerate().skip(2) {
                        if !ri.is_zero() {
                            acc = acc.add_ref(&ri.mul_ref(&iterates[i - 1][b]));
                        }
                    }
                    let val = minus_inv_r0.mul_ref(&acc);
                    if !val.is_zero() {
                        inverted[b] = inverted[b].add_ref(&val);
                    }
                    if !inv_part[b].is_zero() {
                        invariant[b] = invariant[b].add_ref(&inv_part[b]);
                    }
                }
            }
        }

        Ok(CasimirSplit {
            invariant,
            inverted,
        })
    }

    /// Norm of a window value: the weighted ball-average norm of the lifted
    /// polynomial, combined over components in square sum for vector kinds.
    pub fn value_l2_norm(&self, v: &[S], rho: f64) -> Result<f64> {
        if self.kind.is_vector() {
            let comps = self.lift_to_field(v);
            let mut acc = 0.0;
            for c in comps {
                let nm = c.weighted_l2_norm(rho)?;
                acc += nm * nm;
            }
            Ok(num_traits::Float::sqrt(acc))
        } else {
            self.lift_to_poly(v).weighted_l2_norm(rho)
        }
    }
}

fn uf_find(uf: &mut [u32], mut x: u32) -> u32 {
    while uf[x as usize] != x {
        uf[x as usize] = uf[uf[x as usize] as usize];
        x = uf[x as usize];
    }
    x
}

fn merge<S: Scalar>(map: &mut BTreeMap<usize, S>, key: usize, val: S) {
    match map.entry(key) {
        alloc::collections::btree_map::Entry::Vacant(e) => {
            e.insert(val);
        }
        alloc::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().add_ref(&val);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// Result of splitting a vector along `ker(Gamma) + im(Gamma)`:
/// `v = invariant + Gamma(inverted)`.
#[derive(Clone, Debug)]
pub struct CasimirSplit<S> {
    pub invariant: Vec<S>,
    /// Casimir inverse of the image part of the input.
    pub inverted: Vec<S>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{sl2_data, sl2_k2_data};
    use crate::linalg::Mat;
    use crate::scalar::{rat, Rat};

    fn sl2_window(lo: u32, hi: u32) -> ModuleWindow<Rat> {
        ModuleWindow::build(&sl2_data::<Rat>(), WindowKind::Function, lo, hi).unwrap()
    }

    #[test]
    fn function_window_dims() {
        // degrees (1,2] in three variables: 6 quadratic monomials
        let w = sl2_window(1, 2);
        assert_eq!(w.dim(), 6);
        // empty range (2,2]
        let e = sl2_window(2, 2);
        assert!(e.is_empty());
    }

    #[test]
    fn action_on_e_squared() {
        // variables (h, e, f) = (z0, z1, z2); rho(xi_h) e^2 = 4 e^2
        let w = sl2_window(1, 2);
        let e2 = Polynomial::from_terms(3, [(Monomial(alloc::vec![0, 2, 0]), rat("1"))]);
        let v = w.project_poly(&e2).unwrap();
        let out = w.act(0, &v);
        let lifted = w.lift_to_poly(&out);
        assert_eq!(lifted, e2.scale(&rat("4")));
    }

    #[test]
    fn casimir_kernel_image_decomposition() {
        // (1,2] window of sl(2): ker and im are complementary; the kernel is
        // spanned by the quadratic invariant h^2/4 + ef.
        let w = sl2_window(1, 2);
        let dim = w.dim();
        let mut g: Mat<Rat> = Mat::zero(dim, dim);
        for c in 0..dim {
            let mut unit = alloc::vec![rat("0"); dim];
            unit[c] = rat("1");
            let col = w.casimir_apply(&unit);
            for r in 0..dim {
                *g.at_mut(r, c) = col[r].clone();
            }
        }
        let rank = g.rank();
        let ker = g.nullspace();
        assert_eq!(rank + ker.len(), dim);
        assert_eq!(ker.len(), 1);
        let q = Polynomial::from_terms(
            3,
            [
                (Monomial(alloc::vec![2, 0, 0]), rat("1/4")),
                (Monomial(alloc::vec![0, 1, 1]), rat("1")),
            ],
        );
        let qv = w.project_poly(&q).unwrap();
        assert!(w.casimir_apply(&qv).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn split_invert_reconstructs() {
        let w = sl2_window(1, 2);
        let q = Polynomial::from_terms(
            3,
            [
                (Monomial(alloc::vec![2, 0, 0]), rat("1/4")),
                (Monomial(alloc::vec![0, 1, 1]), rat("1")),
                (Monomial(alloc::vec![0, 2, 0]), rat("3")),
            ],
        );
        let v = w.project_poly(&q).unwrap();
        let split = w.casimir_split_invert(&v).unwrap();
        // invariant is killed by Gamma
        assert!(w
            .casimir_apply(&split.invariant)
            .iter()
            .all(|x| x.is_zero()));
        // Gamma(inverted) + invariant reconstructs v
        let back = w.casimir_apply(&split.inverted);
        for i in 0..w.dim() {
            assert_eq!(back[i].add_ref(&split.invariant[i]), v[i]);
        }
    }

    #[test]
    fn vector_window_representation_law_holds() {
        // construction verifies the law exactly
        let data = sl2_k2_data::<Rat>();
        let w = ModuleWindow::build(&data, WindowKind::VectorField, 1, 2).unwrap();
        // 2 directions x 15 quadratic monomials in 5 variables
        assert_eq!(w.dim(), 2 * 15);
        assert_eq!(w.dirs, alloc::vec![3, 4]);
    }

    #[test]
    fn components_partition_basis() {
        let w = sl2_window(1, 4);
        let total: usize = w.components().iter().map(|c| c.len()).sum();
        assert_eq!(total, w.dim());
        assert!(w.components().len() > 1, "degree layers split at least");
    }

    #[test]
    fn natural_module_eigenvalue_through_window() {
        // Linear window (0,1] of sl(2) x| K^2: the Casimir acts as 1 on the
        // adjoint variables and as 3/8 on the natural-module variables.
        let data = sl2_k2_data::<Rat>();
        let w = ModuleWindow::build(&data, WindowKind::Function, 0, 1).unwrap();
        let y = Polynomial::<Rat>::variable(5, 3);
        let v = w.project_poly(&y).unwrap();
        let gy = w.casimir_apply(&v);
        assert_eq!(w.lift_to_poly(&gy), y.scale(&rat("3/8")));
        let h = Polynomial::<Rat>::variable(5, 0);
        let vh = w.project_poly(&h).unwrap();
        assert_eq!(w.lift_to_poly(&w.casimir_apply(&vh)), h);
    }

    #[test]
    fn fiber_linear_window_subsets_function_window() {
        let data = sl2_k2_data::<Rat>();
        // treat (h,e,f) as fiber sections over a 2-dimensional base
        let all = ModuleWindow::build(&data, WindowKind::Function, 1, 2).unwrap();
        let fl = ModuleWindow::build(&data, WindowKind::FiberLinearFunction { fiber: 3 }, 1, 2)
            .unwrap();
        assert!(fl.dim() < all.dim());
        for i in 0..fl.dim() {
            let (_, mono) = fl.basis_elem(i);
            assert_eq!(mono.block_degree(0, 3), 1);
        }
    }
}
