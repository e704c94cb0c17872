//! Finite-dimensional Lie algebra machinery: structure-constant validation,
//! Killing form, Casimir dual pairs, and a Levi-Malcev splitting helper.
//!
//! The engine's main pipeline takes input that is already split into a
//! semisimple block acting on a solvable block ([`LeviAlgebraData`]);
//! [`levi_malcev_split`] is a convenience for callers starting from raw
//! structure constants.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Structure constants of an arbitrary finite-dimensional algebra:
/// `[e_i, e_j] = sum_k t[i][j][k] e_k`.
#[derive(Clone, PartialEq, Debug)]
pub struct StructureConstants<S: Scalar> {
    pub n: usize,
    pub t: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> StructureConstants<S> {
    pub fn zero(n: usize) -> Self {
        StructureConstants {
            n,
            t: vec![vec![vec![S::zero(); n]; n]; n],
        }
    }

    pub fn from_triples(n: usize, triples: &[(usize, usize, usize, S)]) -> Self {
        let mut sc = Self::zero(n);
        for (i, j, k, v) in triples {
            sc.t[*i][*j][*k] = sc.t[*i][*j][*k].add_ref(v);
        }
        sc
    }

    /// Antisymmetric fill: sets `t[i][j][k] = v` and `t[j][i][k] = -v`.
    pub fn from_upper_triples(n: usize, triples: &[(usize, usize, usize, S)]) -> Self {
        let mut sc = Self::zero(n);
        for (i, j, k, v) in triples {
            sc.t[*i][*j][*k] = sc.t[*i][*j][*k].add_ref(v);
            sc.t[*j][*i][*k] = sc.t[*j][*i][*k].sub_ref(v);
        }
        sc
    }

    pub fn bracket(&self, x: &[S], y: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.n];
        for i in 0..self.n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = x[i].mul_ref(&y[j]);
                for k in 0..self.n {
                    if !self.t[i][j][k].is_zero() {
                        out[k] = out[k].add_ref(&self.t[i][j][k].mul_ref(&xy));
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad e_i` acting on column vectors: `(ad e_i)[k][j] = t[i][j][k]`.
    pub fn ad(&self, i: usize) -> Mat<S> {
        let mut m: Mat<S> = Mat::zero(self.n, self.n);
        for j in 0..self.n {
            for k in 0..self.n {
                *m.at_mut(k, j) = self.t[i][j][k].clone();
            }
        }
        m
    }

    pub fn is_antisymmetric(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    if !self.t[i][j][k].add_ref(&self.t[j][i][k]).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// First Jacobi violation `(i, j, k)`, if any.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let basis = standard_basis::<S>(self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                for k in j + 1..self.n {
                    let t1 = self.bracket(&self.bracket(&basis[i], &basis[j]), &basis[k]);
                    let t2 = self.bracket(&self.bracket(&basis[j], &basis[k]), &basis[i]);
                    let t3 = self.bracket(&self.bracket(&basis[k], &basis[i]), &basis[j]);
                    let bad =
                        (0..self.n).any(|p| !t1[p].add_ref(&t2[p]).add_ref(&t3[p]).is_zero());
                    if bad {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// Killing form `K(i, j) = trace(ad e_i . ad e_j)`.
    pub fn killing_form(&self) -> Mat<S> {
        let mut k: Mat<S> = Mat::zero(self.n, self.n);
        for i in 0..self.n {
            for j in i..self.n {
                let mut tr = S::zero();
                for p in 0..self.n {
                    for q in 0..self.n {
                        // (ad_i ad_j)[p][p] = sum_q t[i][q][p] t[j][p][q]
                        if !self.t[i][q][p].is_zero() && !self.t[j][p][q].is_zero() {
                            tr = tr.add_ref(&self.t[i][q][p].mul_ref(&self.t[j][p][q]));
                        }
                    }
                }
                *k.at_mut(i, j) = tr.clone();
                *k.at_mut(j, i) = tr;
            }
        }
        k
    }

    /// Structure constants in the basis given by the columns of `p`.
    pub fn conjugate(&self, p: &Mat<S>) -> Result<StructureConstants<S>> {
        let n = self.n;
        let pinv = p.inverse()?;
        let mut out = StructureConstants::zero(n);
        for i in 0..n {
            let fi: Vec<S> = (0..n).map(|r| p.at(r, i).clone()).collect();
            for j in 0..n {
                let fj: Vec<S> = (0..n).map(|r| p.at(r, j).clone()).collect();
                let br = self.bracket(&fi, &fj);
                out.t[i][j] = pinv.apply(&br);
            }
        }
        Ok(out)
    }

    /// Span of all pairwise brackets of the given vectors (row-reduced).
    pub fn derived_span(&self, span: &[Vec<S>]) -> Vec<Vec<S>> {
        let mut rows = Vec::new();
        for (idx, x) in span.iter().enumerate() {
            for y in span.iter().skip(idx + 1) {
                let b = self.bracket(x, y);
                if b.iter().any(|v| !v.is_zero()) {
                    rows.push(b);
                }
            }
        }
        if rows.is_empty() {
            return Vec::new();
        }
        let mut m = Mat::from_rows(rows);
        let pivots = m.rref();
        (0..pivots.len()).map(|r| m.row(r).to_vec()).collect()
    }

    /// Whether the span's derived series reaches zero.
    pub fn is_solvable_span(&self, span: &[Vec<S>]) -> bool {
        let mut cur: Vec<Vec<S>> = span.to_vec();
        for _ in 0..=self.n {
            if cur.is_empty() {
                return true;
            }
            let next = self.derived_span(&cur);
            if next.len() >= cur.len() {
                return false;
            }
            cur = next;
        }
        false
    }
}

fn standard_basis<S: Scalar>(n: usize) -> Vec<Vec<S>> {
    (0..n)
        .map(|i| {
            let mut v = vec![S::zero(); n];
            v[i] = S::one();
            v
        })
        .collect()
}

/// Structure constants of a Lie algebra `L` split into a semisimple block
/// (`c`), the action of the semisimple block on the radical (`a`), and the
/// radical bracket (`b`).
#[derive(Clone, PartialEq, Debug)]
pub struct LeviAlgebraData<S: Scalar> {
    pub n: usize,
    pub m: usize,
    /// `[x_i, x_j] = sum_k c[i][j][k] x_k`, indices below `m`.
    pub c: Vec<Vec<Vec<S>>>,
    /// `[x_i, y_j] = sum_k a[i][j][k] y_k`, `i < m`, `j, k < n - m`.
    pub a: Vec<Vec<Vec<S>>>,
    /// `[y_i, y_j] = sum_k b[i][j][k] y_k`, indices below `n - m`.
    pub b: Vec<Vec<Vec<S>>>,
}

/// A named validation failure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    Shape(String),
    CNotAntisymmetric { i: usize, j: usize, k: usize },
    BNotAntisymmetric { i: usize, j: usize, k: usize },
    JacobiFails { i: usize, j: usize, k: usize },
    KillingDegenerate,
    ModuleLawFails { i: usize, j: usize, y: usize },
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::Shape(s) => write!(f, "shape: {s}"),
            Violation::CNotAntisymmetric { i, j, k } => {
                write!(f, "c not antisymmetric at ({i}, {j}, {k})")
            }
            Violation::BNotAntisymmetric { i, j, k } => {
                write!(f, "b not antisymmetric at ({i}, {j}, {k})")
            }
            Violation::JacobiFails { i, j, k } => {
                write!(f, "Jacobi identity fails on triple ({i}, {j}, {k})")
            }
            Violation::KillingDegenerate => {
                write!(f, "Levi factor not semisimple: Killing form degenerate")
            }
            Violation::ModuleLawFails { i, j, y } => {
                write!(f, "a-tensor violates the module law at ({i}, {j}) on y_{y}")
            }
        }
    }
}

/// Outcome of [`LeviAlgebraData::validate`].
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl<S: Scalar> LeviAlgebraData<S> {
    pub fn new(
        n: usize,
        m: usize,
        c: Vec<Vec<Vec<S>>>,
        a: Vec<Vec<Vec<S>>>,
        b: Vec<Vec<Vec<S>>>,
    ) -> Result<Self> {
        if m > n {
            return Err(Error::DimensionMismatch { expected: n, found: m });
        }
        let r = n - m;
        // Degenerate blocks may be passed as empty vectors.
        let mut c = c;
        let mut a = a;
        let mut b = b;
        if m == 0 && c.is_empty() {
            c = Vec::new();
        }
        if (r == 0 || m == 0) && a.is_empty() {
            a = vec![vec![vec![]; r]; m];
        }
        if r == 0 && b.is_empty() {
            b = Vec::new();
        }
        let shape3 = |t: &Vec<Vec<Vec<S>>>, d1: usize, d2: usize, d3: usize| {
            t.len() == d1
                && t.iter()
                    .all(|u| u.len() == d2 && u.iter().all(|v| v.len() == d3))
        };
        if !shape3(&c, m, m, m) {
            return Err(Error::InvalidArgument("c tensor must be m x m x m".into()));
        }
        if !shape3(&a, m, r, r) {
            return Err(Error::InvalidArgument(
                "a tensor must be m x (n-m) x (n-m)".into(),
            ));
        }
        if !shape3(&b, r, r, r) {
            return Err(Error::InvalidArgument("b tensor must be (n-m)^3".into()));
        }
        Ok(LeviAlgebraData { n, m, c, a, b })
    }

    pub fn radical_dim(&self) -> usize {
        self.n - self.m
    }

    /// The full n-dimensional structure tensor assembled from `(c, a, b)`.
    pub fn full_constants(&self) -> StructureConstants<S> {
        let (n, m) = (self.n, self.m);
        let mut sc = StructureConstants::zero(n);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    sc.t[i][j][k] = self.c[i][j][k].clone();
                }
            }
        }
        for i in 0..m {
            for j in 0..n - m {
                for k in 0..n - m {
                    sc.t[i][m + j][m + k] = self.a[i][j][k].clone();
                    sc.t[m + j][i][m + k] = self.a[i][j][k].neg();
                }
            }
        }
        for i in 0..n - m {
            for j in 0..n - m {
                for k in 0..n - m {
                    sc.t[m + i][m + j][m + k] = self.b[i][j][k].clone();
                }
            }
        }
        sc
    }

    /// The structure constants of the Levi block alone.
    pub fn levi_constants(&self) -> StructureConstants<S> {
        StructureConstants {
            n: self.m,
            t: self.c.clone(),
        }
    }

    /// Killing form of the Levi block.
    pub fn killing_form(&self) -> Mat<S> {
        self.levi_constants().killing_form()
    }

    /// Check antisymmetry, the Jacobi identity of the assembled algebra,
    /// semisimplicity of the Levi block, and the module law of the action
    /// tensor. Returns all violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let (m, r) = (self.m, self.n - self.m);

        for i in 0..m {
            for j in i..m {
                for k in 0..m {
                    if !self.c[i][j][k].add_ref(&self.c[j][i][k]).is_zero() {
                        report
                            .violations
                            .push(Violation::CNotAntisymmetric { i, j, k });
                    }
                }
            }
        }
        for i in 0..r {
            for j in i..r {
                for k in 0..r {
                    if !self.b[i][j][k].add_ref(&self.b[j][i][k]).is_zero() {
                        report
                            .violations
                            .push(Violation::BNotAntisymmetric { i, j, k });
                    }
                }
            }
        }
        if !report.is_valid() {
            // Jacobi and the rest presuppose antisymmetry.
            return report;
        }

        let full = self.full_constants();
        if let Some((i, j, k)) = full.jacobi_violation() {
            report.violations.push(Violation::JacobiFails { i, j, k });
        }

        if m > 0 && self.killing_form().determinant().is_zero() {
            report.violations.push(Violation::KillingDegenerate);
        }

        // a defines a g-module: [rho_i, rho_j] = rho([xi_i, xi_j]).
        for i in 0..m {
            for j in i + 1..m {
                'y: for y in 0..r {
                    for k in 0..r {
                        let mut lhs = S::zero();
                        for p in 0..r {
                            lhs = lhs.add_ref(&self.a[i][p][k].mul_ref(&self.a[j][y][p]));
                            lhs = lhs.sub_ref(&self.a[j][p][k].mul_ref(&self.a[i][y][p]));
                        }
                        let mut rhs = S::zero();
                        for p in 0..m {
                            if !self.c[i][j][p].is_zero() {
                                rhs = rhs.add_ref(&self.c[i][j][p].mul_ref(&self.a[p][y][k]));
                            }
                        }
                        if !lhs.sub_ref(&rhs).is_zero() {
                            report.violations.push(Violation::ModuleLawFails { i, j, y });
                            continue 'y;
                        }
                    }
                }
            }
        }

        report
    }

    /// Casimir element in dual-pair form.
    pub fn casimir(&self) -> Result<CasimirElement<S>> {
        let kinv = self.killing_inverse()?;
        let pairs = (0..self.m)
            .map(|i| (i, (0..self.m).map(|j| kinv.at(i, j).clone()).collect()))
            .collect();
        Ok(CasimirElement { pairs })
    }

    /// Inverse Killing form of the Levi block.
    pub fn killing_inverse(&self) -> Result<Mat<S>> {
        self.killing_form()
            .inverse()
            .map_err(|_| Error::NotSemisimple)
    }
}

/// The Casimir element written with Killing-dual pairs:
/// `Gamma = sum_i xi_i . dual_i` where `dual_i = sum_j pairs[i].1[j] xi_j`
/// and `Killing(xi_i, dual_j) = delta_ij`.
#[derive(Clone, PartialEq, Debug)]
pub struct CasimirElement<S: Scalar> {
    pub pairs: Vec<(usize, Vec<S>)>,
}

impl<S: Scalar> CasimirElement<S> {
    /// Operator of the Casimir on a module given by the representation
    /// matrices of the generators.
    pub fn operator(&self, rho: &[Mat<S>]) -> Mat<S> {
        let dim = rho.first().map_or(0, |m| m.rows);
        let mut out: Mat<S> = Mat::zero(dim, dim);
        for (i, dual) in &self.pairs {
            let mut rd: Mat<S> = Mat::zero(dim, dim);
            for (j, cj) in dual.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                for r in 0..dim {
                    for c in 0..dim {
                        if !rho[j].at(r, c).is_zero() {
                            *rd.at_mut(r, c) =
                                rd.at(r, c).add_ref(&cj.mul_ref(rho[j].at(r, c)));
                        }
                    }
                }
            }
            let prod = rho[*i].matmul(&rd);
            for r in 0..dim {
                for c in 0..dim {
                    *out.at_mut(r, c) = out.at(r, c).add_ref(prod.at(r, c));
                }
            }
        }
        out
    }
}

/// Radical as the Killing-orthogonal complement of the derived algebra
/// (valid in characteristic zero). Returns a row-reduced basis.
pub fn radical<S: Scalar>(sc: &StructureConstants<S>) -> Vec<Vec<S>> {
    let basis = standard_basis::<S>(sc.n);
    let derived = sc.derived_span(&basis);
    if derived.is_empty() {
        return basis;
    }
    let k = sc.killing_form();
    // x is radical iff K(x, d) = 0 for each derived basis vector d.
    let rows: Vec<Vec<S>> = derived
        .iter()
        .map(|d| {
            (0..sc.n)
                .map(|j| {
                    let mut acc = S::zero();
                    for p in 0..sc.n {
                        if !d[p].is_zero() {
                            acc = acc.add_ref(&d[p].mul_ref(k.at(p, j)));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let ns = Mat::from_rows(rows).nullspace();
    if ns.is_empty() {
        return Vec::new();
    }
    let mut m = Mat::from_rows(ns);
    let pivots = m.rref();
    (0..pivots.len()).map(|r| m.row(r).to_vec()).collect()
}

/// Restrict structure constants to a subalgebra spanned by `span` (which must
/// be closed under the bracket).
fn subalgebra_constants<S: Scalar>(
    sc: &StructureConstants<S>,
    span: &[Vec<S>],
) -> Result<StructureConstants<S>> {
    let d = span.len();
    let basis_cols = Mat::from_rows(span.to_vec()).transpose();
    let mut out = StructureConstants::zero(d);
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let br = sc.bracket(&span[i], &span[j]);
            let coeffs = basis_cols
                .solve_vec(&br)
                .ok_or_else(|| Error::Internal("span not closed under bracket".into()))?;
            out.t[i][j] = coeffs;
        }
    }
    Ok(out)
}

/// Indices of standard basis vectors complementing the row space of `rows`
/// (the non-pivot columns; deterministic).
fn standard_complement<S: Scalar>(rows: &[Vec<S>], n: usize) -> Vec<usize> {
    if rows.is_empty() {
        return (0..n).collect();
    }
    let mut m = Mat::from_rows(rows.to_vec());
    let pivots = m.rref();
    let pivot_set: alloc::collections::BTreeSet<usize> = pivots.into_iter().collect();
    (0..n).filter(|c| !pivot_set.contains(c)).collect()
}

/// Express `coeffs` over `span` back in ambient coordinates.
fn combine<S: Scalar>(coeffs: &[S], span: &[Vec<S>], n: usize) -> Vec<S> {
    let mut w = vec![S::zero(); n];
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            for p in 0..n {
                w[p] = w[p].add_ref(&c.mul_ref(&span[i][p]));
            }
        }
    }
    w
}

/// Find a Levi subalgebra of `sc`, returned as vectors in the input basis.
/// Classical successive lifting: quotient by the derived radical, solve the
/// abelian-radical case cohomologically, pull the answer back and recurse.
fn levi_subalgebra<S: Scalar>(sc: &StructureConstants<S>) -> Result<Vec<Vec<S>>> {
    let rad = radical(sc);
    if rad.is_empty() {
        return Ok(standard_basis(sc.n));
    }
    if rad.len() == sc.n {
        return Ok(Vec::new());
    }
    let rad_sq = sc.derived_span(&rad);

    if rad_sq.is_empty() {
        // Abelian radical: fix up a linear section of L/rad by a 1-cochain.
        let comp_cols = standard_complement(&rad, sc.n);
        let m = comp_cols.len();
        let r = rad.len();
        let section: Vec<Vec<S>> = comp_cols
            .iter()
            .map(|&c| standard_basis::<S>(sc.n)[c].clone())
            .collect();
        let mut all = section.clone();
        all.extend(rad.iter().cloned());
        let basis_cols = Mat::from_rows(all).transpose();

        // Quotient constants and section defects.
        let mut q = StructureConstants::<S>::zero(m);
        let mut defect = vec![vec![vec![S::zero(); r]; m]; m];
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let br = sc.bracket(&section[i], &section[j]);
                let coeffs = basis_cols
                    .solve_vec(&br)
                    .ok_or_else(|| Error::Internal("basis does not span".into()))?;
                q.t[i][j] = coeffs[..m].to_vec();
                defect[i][j] = coeffs[m..].to_vec();
            }
        }
        // Action of the section on the radical.
        let rad_cols = Mat::from_rows(rad.to_vec()).transpose();
        let mut act: Vec<Mat<S>> = Vec::with_capacity(m);
        for sec in &section {
            let mut mat: Mat<S> = Mat::zero(r, r);
            for (jr, rv) in rad.iter().enumerate() {
                let br = sc.bracket(sec, rv);
                let coeffs = rad_cols
                    .solve_vec(&br)
                    .ok_or_else(|| Error::Internal("radical is not an ideal".into()))?;
                for k in 0..r {
                    *mat.at_mut(k, jr) = coeffs[k].clone();
                }
            }
            act.push(mat);
        }

        // Correct the section by w: q -> rad satisfying
        //   act_i w_j - act_j w_i - w([i,j]_q) = -defect(i, j),
        // unknowns stacked as w_0 | ... | w_{m-1}.
        let unknowns = m * r;
        let mut rows: Vec<Vec<S>> = Vec::new();
        let mut rhs: Vec<S> = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for row_r in 0..r {
                    let mut row = vec![S::zero(); unknowns];
                    for cc in 0..r {
                        row[j * r + cc] = row[j * r + cc].add_ref(act[i].at(row_r, cc));
                        row[i * r + cc] = row[i * r + cc].sub_ref(act[j].at(row_r, cc));
                    }
                    for k in 0..m {
                        if !q.t[i][j][k].is_zero() {
                            row[k * r + row_r] = row[k * r + row_r].sub_ref(&q.t[i][j][k]);
                        }
                    }
                    rows.push(row);
                    rhs.push(defect[i][j][row_r].neg());
                }
            }
        }
        let sol = Mat::from_rows(rows)
            .solve_vec(&rhs)
            .ok_or_else(|| Error::Internal("Levi lifting system inconsistent".into()))?;

        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            let mut v = section[i].clone();
            let w = combine(&sol[i * r..(i + 1) * r], &rad, sc.n);
            for p in 0..sc.n {
                v[p] = v[p].add_ref(&w[p]);
            }
            out.push(v);
        }
        return Ok(out);
    }

    // Non-abelian radical: find a Levi of L / rad^2 (whose radical is
    // abelian), pull its preimage M = lift + rad^2 back, and recurse in M
    // (whose radical is rad^2, shorter derived series).
    let comp_cols = standard_complement(&rad_sq, sc.n);
    let section: Vec<Vec<S>> = comp_cols
        .iter()
        .map(|&c| standard_basis::<S>(sc.n)[c].clone())
        .collect();
    let mq = section.len();
    let mut all = section.clone();
    all.extend(rad_sq.iter().cloned());
    let basis_cols = Mat::from_rows(all).transpose();
    let mut quot = StructureConstants::<S>::zero(mq);
    for i in 0..mq {
        for j in 0..mq {
            if i == j {
                continue;
            }
            let br = sc.bracket(&section[i], &section[j]);
            let coeffs = basis_cols
                .solve_vec(&br)
                .ok_or_else(|| Error::Internal("quotient basis does not span".into()))?;
            quot.t[i][j] = coeffs[..mq].to_vec();
        }
    }
    let levi_bar = levi_subalgebra(&quot)?;
    let mut span: Vec<Vec<S>> = levi_bar
        .iter()
        .map(|v| combine(v, &section, sc.n))
        .collect();
    span.extend(rad_sq.iter().cloned());
    let sub = subalgebra_constants(sc, &span)?;
    let levi_in_sub = levi_subalgebra(&sub)?;
    Ok(levi_in_sub
        .iter()
        .map(|v| combine(v, &span, sc.n))
        .collect())
}

/// Split arbitrary structure constants into Levi form: returns the basis
/// change `P` (columns are the new basis, Levi block first, then radical) and
/// the re-expressed [`LeviAlgebraData`].
pub fn levi_malcev_split<S: Scalar>(
    sc: &StructureConstants<S>,
) -> Result<(Mat<S>, LeviAlgebraData<S>)> {
    if !sc.is_antisymmetric() {
        return Err(Error::InvalidAlgebra("bracket not antisymmetric".into()));
    }
    if let Some((i, j, k)) = sc.jacobi_violation() {
        return Err(Error::InvalidAlgebra(format!(
            "Jacobi identity fails on triple ({i}, {j}, {k})"
        )));
    }

    let rad = radical(sc);
    let levi = levi_subalgebra(sc)?;
    let m = levi.len();
    let n = sc.n;
    if m + rad.len() != n {
        return Err(Error::Internal(
            "Levi and radical dimensions do not add up".into(),
        ));
    }

    let mut cols = levi;
    cols.extend(rad);
    let p = Mat::from_rows(cols).transpose();
    let new_sc = sc.conjugate(&p)?;

    // Carve (c, a, b) out of the conjugated tensor, checking block shape.
    let r = n - m;
    let mut c = vec![vec![vec![S::zero(); m]; m]; m];
    let mut a = vec![vec![vec![S::zero(); r]; r]; m];
    let mut b = vec![vec![vec![S::zero(); r]; r]; r];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = new_sc.t[i][j][k].clone();
                if v.is_zero() {
                    continue;
                }
                match (i < m, j < m, k < m) {
                    (true, true, true) => c[i][j][k] = v,
                    (true, false, false) => a[i][j - m][k - m] = v,
                    (false, true, false) => (), // mirror of the case above
                    (false, false, false) => b[i - m][j - m][k - m] = v,
                    _ => {
                        return Err(Error::Internal(format!(
                            "split produced a bracket outside the Levi pattern at ({i},{j},{k})"
                        )))
                    }
                }
            }
        }
    }
    let data = LeviAlgebraData::new(n, m, c, a, b)?;
    let report = data.validate();
    if !report.is_valid() {
        return Err(Error::Internal(format!(
            "split output fails validation: {}",
            report.violations[0]
        )));
    }
    Ok((p, data))
}

/// sl(2) structure constants in the basis `(h, e, f)`:
/// `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
pub fn sl2_constants<S: Scalar>() -> Vec<Vec<Vec<S>>> {
    StructureConstants::from_upper_triples(
        3,
        &[
            (0, 1, 1, S::from_i64(2)),
            (0, 2, 2, S::from_i64(-2)),
            (1, 2, 0, S::one()),
        ],
    )
    .t
}

/// sl(2) as a Levi datum with empty radical.
pub fn sl2_data<S: Scalar>() -> LeviAlgebraData<S> {
    LeviAlgebraData::new(3, 3, sl2_constants::<S>(), Vec::new(), Vec::new()).expect("valid shape")
}

/// `sl(2)` acting on `K^2` by the standard representation, in the basis
/// `(h, e, f, u, v)`: `h.u = u`, `h.v = -v`, `e.v = u`, `f.u = v`.
pub fn sl2_k2_data<S: Scalar>() -> LeviAlgebraData<S> {
    let c = sl2_constants::<S>();
    let mut a = vec![vec![vec![S::zero(); 2]; 2]; 3];
    a[0][0][0] = S::one();
    a[0][1][1] = S::from_i64(-1);
    a[1][1][0] = S::one();
    a[2][0][1] = S::one();
    let b = vec![vec![vec![S::zero(); 2]; 2]; 2];
    LeviAlgebraData::new(5, 3, c, a, b).expect("valid shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};

    fn sl2() -> LeviAlgebraData<Rat> {
        sl2_data::<Rat>()
    }

    /// Independent Killing oracle: assemble adjoint matrices explicitly and
    /// trace their products.
    fn killing_by_traces(sc: &StructureConstants<Rat>) -> Mat<Rat> {
        let ads: Vec<Mat<Rat>> = (0..sc.n).map(|i| sc.ad(i)).collect();
        let mut k: Mat<Rat> = Mat::zero(sc.n, sc.n);
        for i in 0..sc.n {
            for j in 0..sc.n {
                let prod = ads[i].matmul(&ads[j]);
                let mut tr = Rat::from_i64(0);
                for d in 0..sc.n {
                    tr = tr.add_ref(prod.at(d, d));
                }
                *k.at_mut(i, j) = tr;
            }
        }
        k
    }

    #[test]
    fn killing_form_sl2() {
        let k = sl2().killing_form();
        assert_eq!(k.at(0, 0), &rat("8"));
        assert_eq!(k.at(1, 2), &rat("4"));
        assert_eq!(k.at(2, 1), &rat("4"));
        for (i, j) in [(0, 1), (0, 2), (1, 0), (2, 0), (1, 1), (2, 2)] {
            assert!(k.at(i, j).is_zero());
        }
        assert_eq!(k, killing_by_traces(&sl2().levi_constants()));
    }

    #[test]
    fn killing_form_so3_and_abelian() {
        let so3 = StructureConstants::from_upper_triples(
            3,
            &[
                (0, 1, 2, rat("1")),
                (1, 2, 0, rat("1")),
                (2, 0, 1, rat("1")),
            ],
        );
        let k = so3.killing_form();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { rat("-2") } else { rat("0") };
                assert_eq!(k.at(i, j), &expected);
            }
        }
        assert_eq!(k, killing_by_traces(&so3));

        let abelian = StructureConstants::<Rat>::zero(3);
        assert!(abelian.killing_form().is_zero());
    }

    #[test]
    fn validate_sl2_passes() {
        assert!(sl2().validate().is_valid());
        assert!(sl2_k2_data::<Rat>().validate().is_valid());
    }

    #[test]
    fn validate_catches_symmetric_c() {
        let mut c = vec![vec![vec![rat("0"); 3]; 3]; 3];
        c[0][1][2] = rat("1");
        c[1][0][2] = rat("1"); // symmetric, not antisymmetric
        let data = LeviAlgebraData::new(3, 3, c, Vec::new(), Vec::new()).unwrap();
        let report = data.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CNotAntisymmetric { .. })));
    }

    #[test]
    fn validate_catches_abelian_levi() {
        // m = 1 with c = 0: Killing form is identically zero.
        let data = LeviAlgebraData::<Rat>::new(
            1,
            1,
            vec![vec![vec![rat("0")]]],
            Vec::new(),
            Vec::new(),
        )
        .unwrap();
        let report = data.validate();
        assert_eq!(report.violations, alloc::vec![Violation::KillingDegenerate]);
    }

    #[test]
    fn casimir_acts_as_one_on_adjoint() {
        let data = sl2();
        let cas = data.casimir().unwrap();
        let sc = data.levi_constants();
        let ads: Vec<Mat<Rat>> = (0..3).map(|i| sc.ad(i)).collect();
        let op = cas.operator(&ads);
        assert_eq!(op, Mat::identity(3));
        for ad in &ads {
            assert_eq!(op.matmul(ad), ad.matmul(&op));
        }
    }

    #[test]
    fn casimir_on_natural_module_is_three_eighths() {
        let data = sl2_k2_data::<Rat>();
        let cas = data.casimir().unwrap();
        let rho: Vec<Mat<Rat>> = (0..3)
            .map(|i| {
                let mut m: Mat<Rat> = Mat::zero(2, 2);
                for j in 0..2 {
                    for k in 0..2 {
                        *m.at_mut(k, j) = data.a[i][j][k].clone();
                    }
                }
                m
            })
            .collect();
        let op = cas.operator(&rho);
        let mut expected: Mat<Rat> = Mat::zero(2, 2);
        *expected.at_mut(0, 0) = rat("3/8");
        *expected.at_mut(1, 1) = rat("3/8");
        assert_eq!(op, expected);
    }

    #[test]
    fn casimir_trivial_module_is_zero() {
        let cas = sl2().casimir().unwrap();
        let rho: Vec<Mat<Rat>> = (0..3).map(|_| Mat::zero(1, 1)).collect();
        assert!(cas.operator(&rho).is_zero());
    }

    #[test]
    fn casimir_basis_independence() {
        // Conjugate sl(2); the Casimir operator on the adjoint module
        // transports by the same conjugation and stays the identity.
        let data = sl2();
        let sc = data.levi_constants();
        let p = Mat::from_rows(alloc::vec![
            alloc::vec![rat("1"), rat("1"), rat("0")],
            alloc::vec![rat("0"), rat("1"), rat("2")],
            alloc::vec![rat("1/2"), rat("0"), rat("1")],
        ]);
        let sc2 = sc.conjugate(&p).unwrap();
        let data2 = LeviAlgebraData::new(3, 3, sc2.t.clone(), Vec::new(), Vec::new()).unwrap();
        assert!(data2.validate().is_valid());
        let op1 = data
            .casimir()
            .unwrap()
            .operator(&[sc.ad(0), sc.ad(1), sc.ad(2)]);
        let op2 = data2
            .casimir()
            .unwrap()
            .operator(&[sc2.ad(0), sc2.ad(1), sc2.ad(2)]);
        let transported = p.inverse().unwrap().matmul(&op1).matmul(&p);
        assert_eq!(op2, transported);
        assert_eq!(op2, Mat::identity(3));
    }

    #[test]
    fn split_recognizes_presplit_input() {
        let data = sl2_k2_data::<Rat>();
        let (p, out) = levi_malcev_split(&data.full_constants()).unwrap();
        assert_eq!(p, Mat::identity(5));
        assert_eq!(out, data);
    }

    #[test]
    fn split_solvable_algebra_has_no_levi_block() {
        // [x, y] = y
        let sc = StructureConstants::from_upper_triples(2, &[(0, 1, 1, rat("1"))]);
        let (p, out) = levi_malcev_split(&sc).unwrap();
        assert_eq!(out.m, 0);
        assert_eq!(out.n, 2);
        assert_eq!(p.rank(), 2);
        let full = out.full_constants();
        let basis: Vec<Vec<Rat>> = (0..2)
            .map(|i| {
                let mut v = alloc::vec![rat("0"); 2];
                v[i] = rat("1");
                v
            })
            .collect();
        assert!(full.is_solvable_span(&basis));
    }

    #[test]
    fn split_scrambled_sl2_plus_center() {
        // sl(2) + K scrambled by an invertible rational matrix.
        let mut t = vec![vec![vec![rat("0"); 4]; 4]; 4];
        let c = sl2_constants::<Rat>();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    t[i][j][k] = c[i][j][k].clone();
                }
            }
        }
        let sc = StructureConstants { n: 4, t };
        let p = Mat::from_rows(alloc::vec![
            alloc::vec![rat("1"), rat("2"), rat("0"), rat("1")],
            alloc::vec![rat("0"), rat("1"), rat("1"), rat("0")],
            alloc::vec![rat("1"), rat("0"), rat("1"), rat("0")],
            alloc::vec![rat("1/3"), rat("0"), rat("0"), rat("1")],
        ]);
        let scrambled = sc.conjugate(&p).unwrap();
        let (q, out) = levi_malcev_split(&scrambled).unwrap();
        assert_eq!(out.m, 3);
        assert_eq!(out.radical_dim(), 1);
        assert!(!out.killing_form().determinant().is_zero());
        assert_eq!(out.levi_constants().killing_form().rank(), 3);
        // radical of sl(2) + K is the center: action and bracket vanish
        assert!(out.b[0][0][0].is_zero());
        for i in 0..3 {
            assert!(out.a[i][0][0].is_zero());
        }
        // Recombination: conjugating the scrambled constants by the returned
        // basis change reproduces the split output exactly.
        let recombined = scrambled.conjugate(&q).unwrap();
        assert_eq!(recombined, out.full_constants());
    }

    #[test]
    fn split_rejects_non_lie_input() {
        // [e1,e2] = e3, [e3,e1] = e1 violates Jacobi:
        // [[e3,e1],e2] = e3 and the other two summands vanish.
        let sc = StructureConstants::from_upper_triples(
            3,
            &[(0, 1, 2, rat("1")), (2, 0, 0, rat("1"))],
        );
        assert!(matches!(
            levi_malcev_split(&sc),
            Err(Error::InvalidAlgebra(_))
        ));
    }
}
