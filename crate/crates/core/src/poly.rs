//! Sparse multivariate polynomials with exact coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors under graded
//! lexicographic order, so iteration is always in a deterministic degree-first
//! order and no zero coefficient is ever stored. Degree truncation is a first
//! class operation: every product and composition takes an optional cap and
//! drops higher terms on the fly.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::{l2_weight, rat_to_f64, Scalar};
use crate::{Error, Result};

/// Exponent vector of a monomial. Ordered graded-lexicographically: total
/// degree first, then lexicographic with earlier variables weighing more.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Degree of this monomial in the variable block `[start, end)`.
    pub fn block_degree(&self, start: usize, end: usize) -> u32 {
        self.0[start..end].iter().map(|&e| e as u32).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Monomials are packed into a `u128`: the total degree in the top byte,
/// then one byte per variable (earlier variables more significant), so plain
/// integer order is exactly graded-lex order. This caps the engine at 15
/// variables and total degree 255, plenty for local normal forms, and keeps
/// the hot paths allocation-free.
pub(crate) type Key = u128;

pub(crate) const MAX_VARS: usize = 15;
pub(crate) const MAX_DEGREE: u32 = 255;

#[inline]
pub(crate) fn key_pack(exps: &[u16]) -> Key {
    debug_assert!(exps.len() <= MAX_VARS);
    let mut key: u128 = 0;
    let mut deg: u32 = 0;
    for (i, &e) in exps.iter().enumerate() {
        deg += e as u32;
        key |= (e as u128) << (112 - 8 * i);
    }
    debug_assert!(deg <= MAX_DEGREE, "total degree above 255");
    key | ((deg as u128) << 120)
}

#[inline]
pub(crate) fn key_degree(key: Key) -> u32 {
    (key >> 120) as u32
}

#[inline]
pub(crate) fn key_exp(key: Key, i: usize) -> u16 {
    ((key >> (112 - 8 * i)) & 0xFF) as u16
}

#[inline]
pub(crate) fn key_unpack(key: Key, nvars: usize) -> Monomial {
    Monomial((0..nvars).map(|i| key_exp(key, i)).collect())
}

/// Sparse polynomial over an exact scalar field.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<S: Scalar> {
    nvars: usize,
    terms: BTreeMap<Key, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most 15 variables supported");
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = Self::zero(nvars);
        p.add_key(0, c);
        p
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_key(key_pack(&Monomial::var(nvars, i).0), S::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "exponent length mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms in graded-lex order, materializing exponent vectors.
    /// Boundary use only; internal paths work on packed keys.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &S)> {
        let n = self.nvars;
        self.terms.iter().map(move |(k, c)| (key_unpack(*k, n), c))
    }

    pub(crate) fn term_keys(&self) -> impl Iterator<Item = (&Key, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms
            .get(&key_pack(&m.0))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    /// Accumulate `c` onto the monomial `m`, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: S) {
        debug_assert_eq!(m.0.len(), self.nvars);
        self.add_key(key_pack(&m.0), c);
    }

    pub(crate) fn add_key(&mut self, key: Key, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add_ref(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|k| key_degree(*k))
    }

    /// Least total degree among terms; `None` for zero.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|k| key_degree(*k))
    }

    fn check_vars(&self, other: &Polynomial<S>) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial<S>) -> Result<Polynomial<S>> {
        self.check_vars(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial<S>) -> Result<Polynomial<S>> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (k, c) in other.term_keys() {
            out.add_key(*k, c.neg());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial<S> {
        let mut out = Self::zero(self.nvars);
        for (k, c) in self.term_keys() {
            out.terms.insert(*k, c.neg());
        }
        out
    }

    pub fn scale(&self, s: &S) -> Polynomial<S> {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = Self::zero(self.nvars);
        for (k, c) in self.term_keys() {
            out.add_key(*k, c.mul_ref(s));
        }
        out
    }

    /// Accumulate `other` into `self` in place.
    pub fn add_assign_ref(&mut self, other: &Polynomial<S>) {
        for (k, c) in other.term_keys() {
            self.add_key(*k, c.clone());
        }
    }

    /// Accumulate `s * other` into `self` in place.
    pub fn add_assign_scaled(&mut self, other: &Polynomial<S>, s: &S) {
        if s.is_zero() {
            return;
        }
        for (k, c) in other.term_keys() {
            self.add_key(*k, c.mul_ref(s));
        }
    }

    /// Product truncated at total degree `cap` (`None` for no cap). The
    /// factor with the higher minimum degree runs in the outer loop so the
    /// graded inner iteration prunes as early as possible.
    pub fn mul_trunc(&self, other: &Polynomial<S>, cap: Option<u32>) -> Result<Polynomial<S>> {
        self.check_vars(other)?;
        if let (Some(da), Some(db), None) = (self.degree(), other.degree(), cap) {
            assert!(da + db <= MAX_DEGREE, "product degree above 255");
        }
        let (a, b) = if self.min_degree().unwrap_or(0) >= other.min_degree().unwrap_or(0) {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Self::zero(self.nvars);
        for (ka, ca) in a.term_keys() {
            let da = key_degree(*ka);
            if let Some(cap) = cap {
                if da > cap {
                    break;
                }
            }
            for (kb, cb) in b.term_keys() {
                if let Some(cap) = cap {
                    // graded order: once past the cap, stop this row
                    if da + key_degree(*kb) > cap {
                        break;
                    }
                }
                out.add_key(ka + kb, ca.mul_ref(cb));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Polynomial<S>) -> Result<Polynomial<S>> {
        self.mul_trunc(other, None)
    }

    /// Drop all terms of total degree greater than `cap`.
    pub fn truncate(&self, cap: u32) -> Polynomial<S> {
        let bound = ((cap as u128 + 1) << 120) as Key;
        let mut out = Self::zero(self.nvars);
        for (k, c) in self.terms.range(..bound) {
            out.terms.insert(*k, c.clone());
        }
        out
    }

    /// Terms with total degree in `(lo, hi]`.
    pub fn window_part(&self, lo: u32, hi: u32) -> Polynomial<S> {
        let start = ((lo as u128 + 1) << 120) as Key;
        let end = ((hi as u128 + 1) << 120) as Key;
        let mut out = Self::zero(self.nvars);
        for (k, c) in self.terms.range(start..end) {
            out.terms.insert(*k, c.clone());
        }
        out
    }

    /// True when every term has total degree in `(lo, hi]`.
    pub fn supported_in_window(&self, lo: u32, hi: u32) -> bool {
        self.min_degree().map_or(true, |d| d > lo) && self.degree().map_or(true, |d| d <= hi)
    }

    pub fn derivative(&self, var: usize) -> Polynomial<S> {
        let mut out = Self::zero(self.nvars);
        let step = 1u128 << (112 - 8 * var);
        let deg_step = 1u128 << 120;
        for (k, c) in self.term_keys() {
            let e = key_exp(*k, var);
            if e == 0 {
                continue;
            }
            out.add_key(k - step - deg_step, c.mul_ref(&S::from_i64(e as i64)));
        }
        out
    }

    /// Substitute `map` into `self`, truncating at total degree `cap`. `map`
    /// must have one component per variable of `self`; the result lives over
    /// the map components' variables.
    pub fn substitute(&self, map: &PolyMap<S>, cap: u32) -> Result<Polynomial<S>> {
        let mut out = substitute_many(core::slice::from_ref(self), map, cap)?;
        Ok(out.pop().expect("one result"))
    }

    /// Weighted ball-average norm
    /// `sqrt( sum_alpha alpha!(n-1)!/(|alpha|+n-1)! |c_alpha|^2 rho^(2|alpha|) )`.
    ///
    /// Exact coefficients, floating point accumulation; diagnostics only.
    pub fn weighted_l2_norm(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!(
                "radius must be positive, got {rho}"
            )));
        }
        let mut acc = 0.0f64;
        for (m, c) in self.terms() {
            let w = rat_to_f64(&l2_weight(&m.0, self.nvars));
            acc += w * c.abs_sq_f64() * num_traits::Float::powi(rho, 2 * m.degree() as i32);
        }
        Ok(num_traits::Float::sqrt(acc))
    }

    /// Coefficient majorant `sum |c_alpha| rho^|alpha|`, an upper bound for
    /// the sup of `|p|` on the ball of radius `rho`.
    pub fn majorant_sup_norm(&self, rho: f64) -> f64 {
        let mut acc = 0.0f64;
        for (k, c) in self.term_keys() {
            acc += c.abs_f64() * num_traits::Float::powi(rho, key_degree(*k) as i32);
        }
        acc
    }

    /// Per-degree coefficient mass `sum_{|alpha|=d} |c_alpha|`; index `d`.
    /// The majorant at any radius is recovered as `sum_d profile[d] rho^d`.
    pub fn majorant_profile(&self, up_to: u32) -> Vec<f64> {
        let mut prof = vec![0.0f64; up_to as usize + 1];
        for (k, c) in self.term_keys() {
            let d = key_degree(*k) as usize;
            if d < prof.len() {
                prof[d] += c.abs_f64();
            }
        }
        prof
    }
}

impl<S: Scalar> core::fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    write!(f, "*z{i}")?;
                } else if e > 1 {
                    write!(f, "*z{i}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Substitute `map` into each polynomial of the batch, truncating at total
/// degree `cap`. The expensive power caches are shared across the batch.
///
/// Two strategies: around the identity the Taylor form
/// `p(z + psi) = sum_beta (d^beta p / beta!) psi^beta` touches one
/// multi-index per admissible `beta` (`sigma * |beta| <= cap` with `sigma`
/// the least correction degree); otherwise monomial powers of the components
/// are cached over the closure of the supports. The cheaper count is chosen.
pub fn substitute_many<S: Scalar>(
    polys: &[Polynomial<S>],
    map: &PolyMap<S>,
    cap: u32,
) -> Result<Vec<Polynomial<S>>> {
    let Some(first) = polys.first() else {
        return Ok(Vec::new());
    };
    let nvars = first.nvars;
    for p in polys {
        if p.nvars != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                found: p.nvars,
            });
        }
    }
    if map.components.len() != nvars {
        return Err(Error::DimensionMismatch {
            expected: nvars,
            found: map.components.len(),
        });
    }
    let out_vars = map.out_vars()?;

    // Closure of all supports under "decrement first nonzero exponent";
    // its size is the work count of the power-cache strategy.
    let mut closure: alloc::collections::BTreeSet<Key> = alloc::collections::BTreeSet::new();
    for p in polys {
        for (k, _) in p.term_keys() {
            let mut cur = *k;
            while key_degree(cur) > 0 && !closure.contains(&cur) {
                closure.insert(cur);
                let j = first_nonzero_var(cur, nvars).unwrap();
                cur -= exp_step(j) + DEG_STEP;
            }
        }
    }

    if out_vars == nvars {
        if let Some(sigma) = map.near_identity_gap() {
            if sigma == u32::MAX {
                // exact identity
                return Ok(polys.iter().map(|p| p.truncate(cap)).collect());
            }
            let kmax = cap / sigma;
            let n_beta = count_monomials(nvars, kmax);
            if n_beta <= closure.len() {
                return substitute_taylor(polys, map, sigma, cap);
            }
        }
    }
    substitute_powers(polys, map, out_vars, cap, &closure)
}

const DEG_STEP: Key = 1u128 << 120;

#[inline]
fn exp_step(var: usize) -> Key {
    1u128 << (112 - 8 * var)
}

#[inline]
fn first_nonzero_var(key: Key, nvars: usize) -> Option<usize> {
    (0..nvars).find(|&i| key_exp(key, i) > 0)
}

fn count_monomials(n: usize, cap: u32) -> usize {
    // C(cap + n, n)
    let mut acc = 1usize;
    for i in 1..=n {
        acc = acc * (cap as usize + i) / i;
    }
    acc
}

fn substitute_taylor<S: Scalar>(
    polys: &[Polynomial<S>],
    map: &PolyMap<S>,
    sigma: u32,
    cap: u32,
) -> Result<Vec<Polynomial<S>>> {
    let n = polys[0].nvars;
    let psi: Vec<Polynomial<S>> = (0..n)
        .map(|i| {
            let mut q = map.components[i].clone();
            q.add_term(Monomial::var(n, i), S::one().neg());
            q.truncate(cap)
        })
        .collect();
    let kmax = cap / sigma;
    let betas: Vec<Key> = enumerate_monomials(n, kmax)
        .into_iter()
        .map(|m| key_pack(&m.0))
        .collect();

    // Shared psi^beta cache and per-poly derivative chains, each built from
    // the parent with the first nonzero exponent decremented.
    let mut psi_pow: BTreeMap<Key, Polynomial<S>> = BTreeMap::new();
    let mut derivs: Vec<BTreeMap<Key, Polynomial<S>>> =
        polys.iter().map(|_| BTreeMap::new()).collect();
    psi_pow.insert(0, Polynomial::constant(n, S::one()));
    for (k, p) in polys.iter().enumerate() {
        derivs[k].insert(0, p.clone());
    }

    let mut out: Vec<Polynomial<S>> = polys.iter().map(|_| Polynomial::zero(n)).collect();
    for beta in betas {
        let db = key_degree(beta);
        if db > 0 {
            let j = first_nonzero_var(beta, n).unwrap();
            let parent = beta - exp_step(j) - DEG_STEP;
            // missing parent marks a pruned subtree (psi^parent = 0)
            let Some(parent_pw) = psi_pow.get(&parent) else {
                continue;
            };
            let pw = parent_pw.mul_trunc(&psi[j], Some(cap))?;
            if pw.is_zero() {
                continue;
            }
            psi_pow.insert(beta, pw);
            for d in derivs.iter_mut() {
                let dv = d[&parent].derivative(j);
                d.insert(beta, dv);
            }
        }
        let pw = &psi_pow[&beta];
        let mut fact = 1i64;
        for i in 0..n {
            for e in 2..=key_exp(beta, i) as i64 {
                fact *= e;
            }
        }
        let coeff = S::from_i64(fact).inv().expect("factorial nonzero");
        for (k, d) in derivs.iter().enumerate() {
            if d[&beta].is_zero() {
                continue;
            }
            let term = d[&beta].mul_trunc(pw, Some(cap))?;
            out[k].add_assign_scaled(&term, &coeff);
        }
    }
    Ok(out.into_iter().map(|p| p.truncate(cap)).collect())
}

fn substitute_powers<S: Scalar>(
    polys: &[Polynomial<S>],
    map: &PolyMap<S>,
    out_vars: usize,
    cap: u32,
    closure: &alloc::collections::BTreeSet<Key>,
) -> Result<Vec<Polynomial<S>>> {
    let nvars = polys[0].nvars;
    let mut cache: BTreeMap<Key, Polynomial<S>> = BTreeMap::new();
    cache.insert(0, Polynomial::constant(out_vars, S::one()));
    for k in closure {
        let j = first_nonzero_var(*k, nvars).unwrap();
        let parent = k - exp_step(j) - DEG_STEP;
        let pw = cache[&parent].mul_trunc(&map.components[j], Some(cap))?;
        cache.insert(*k, pw);
    }
    let mut out = Vec::with_capacity(polys.len());
    for p in polys {
        let mut acc = Polynomial::zero(out_vars);
        for (k, c) in p.term_keys() {
            acc.add_assign_scaled(&cache[k], c);
        }
        out.push(acc);
    }
    Ok(out)
}

/// All exponent vectors in `n` variables of total degree at most `cap`, in
/// graded-lex order.
pub fn enumerate_monomials(n: usize, cap: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; n];
    fn rec(out: &mut Vec<Vec<u16>>, cur: &mut Vec<u16>, pos: usize, left: u32) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[pos] = e as u16;
            rec(out, cur, pos + 1, left - e);
        }
        cur[pos] = 0;
    }
    let mut raw = Vec::new();
    rec(&mut raw, &mut cur, 0, cap);
    let mut ms: Vec<Monomial> = raw.into_iter().map(Monomial).collect();
    ms.sort();
    out.extend(ms);
    out
}

/// Role of a polynomial tuple.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MapRole {
    CoordinateChange,
    VectorField,
}

/// Tuple of polynomials over a common variable list: a polynomial coordinate
/// change or a polynomial vector field.
#[derive(Clone, PartialEq, Debug)]
pub struct PolyMap<S: Scalar> {
    pub components: Vec<Polynomial<S>>,
    pub role: MapRole,
}

impl<S: Scalar> PolyMap<S> {
    pub fn new(components: Vec<Polynomial<S>>, role: MapRole) -> Self {
        PolyMap { components, role }
    }

    pub fn identity(nvars: usize) -> Self {
        PolyMap {
            components: (0..nvars).map(|i| Polynomial::variable(nvars, i)).collect(),
            role: MapRole::CoordinateChange,
        }
    }

    pub fn zero_field(nvars: usize, ncomps: usize) -> Self {
        PolyMap {
            components: (0..ncomps).map(|_| Polynomial::zero(nvars)).collect(),
            role: MapRole::VectorField,
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    fn out_vars(&self) -> Result<usize> {
        let n = self
            .components
            .first()
            .map(|p| p.nvars())
            .ok_or_else(|| Error::InvalidArgument("empty map".into()))?;
        for c in &self.components {
            if c.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.nvars(),
                });
            }
        }
        Ok(n)
    }

    /// For a map of the form `Id + psi` with `psi` of degree >= 2, the least
    /// degree of any `psi` term (>= 2); `None` when the map is not of that
    /// form.
    pub fn near_identity_gap(&self) -> Option<u32> {
        let n = self.components.len();
        let mut gap = u32::MAX;
        for (i, comp) in self.components.iter().enumerate() {
            if comp.nvars() != n {
                return None;
            }
            let mut saw_var = false;
            for (m, c) in comp.terms() {
                let d = m.degree();
                if d <= 1 {
                    if m.0[i] == 1 && d == 1 && c == &S::one() {
                        saw_var = true;
                    } else {
                        return None;
                    }
                } else {
                    gap = gap.min(d);
                }
            }
            if !saw_var {
                return None;
            }
        }
        Some(if gap == u32::MAX { u32::MAX } else { gap })
    }

    pub fn is_near_identity(&self) -> bool {
        self.near_identity_gap().is_some()
    }

    /// `self` composed after `inner`: component `i` is `self_i(inner_1, ...)`.
    /// The substitution caches are shared across components.
    pub fn compose(&self, inner: &PolyMap<S>, cap: u32) -> Result<PolyMap<S>> {
        let components = substitute_many(&self.components, inner, cap)?;
        Ok(PolyMap {
            components,
            role: self.role,
        })
    }

    /// Formal inverse of a near-identity coordinate change, valid through
    /// total degree `cap`. Both compositions with the input are verified to
    /// be the identity through `cap`.
    ///
    /// The fixed-point iteration `chi <- -psi o (Id + chi)` gains
    /// `sigma - 1` valid degrees per pass (`sigma` = least correction
    /// degree), so each pass runs at an escalating cap instead of the full
    /// one.
    pub fn invert_near_identity(&self, cap: u32) -> Result<PolyMap<S>> {
        let Some(sigma) = self.near_identity_gap() else {
            return Err(Error::NotNearIdentity);
        };
        let n = self.components.len();
        if sigma == u32::MAX {
            return Ok(PolyMap::identity(n));
        }
        let psi: Vec<Polynomial<S>> = (0..n)
            .map(|i| {
                let mut q = self.components[i].clone();
                q.add_term(Monomial::var(n, i), S::one().neg());
                q.truncate(cap)
            })
            .collect();

        let mut inv = PolyMap::identity(n);
        let mut valid = sigma - 1; // degrees already exact in `inv`
        while valid < cap {
            let next_valid = (valid + sigma - 1).min(cap);
            let corrections = substitute_many(&psi, &inv, next_valid)?;
            let comps: Vec<Polynomial<S>> = (0..n)
                .map(|i| {
                    let mut c = Polynomial::variable(n, i);
                    c.add_assign_scaled(&corrections[i], &S::one().neg());
                    c
                })
                .collect();
            inv = PolyMap::new(comps, MapRole::CoordinateChange);
            valid = next_valid;
        }

        for check in [self.compose(&inv, cap)?, inv.compose(self, cap)?] {
            if check != PolyMap::identity(n).truncate(cap) {
                return Err(Error::Internal("inverse verification failed".into()));
            }
        }
        Ok(inv)
    }

    pub fn truncate(&self, cap: u32) -> PolyMap<S> {
        PolyMap {
            components: self.components.iter().map(|c| c.truncate(cap)).collect(),
            role: self.role,
        }
    }

    /// Componentwise majorant, combined as `sqrt(sum_i majorant_i^2)`; upper
    /// bound for `sup |g|` on the radius-`rho` ball.
    pub fn majorant_sup_norm(&self, rho: f64) -> f64 {
        let acc: f64 = self
            .components
            .iter()
            .map(|c| {
                let m = c.majorant_sup_norm(rho);
                m * m
            })
            .sum();
        num_traits::Float::sqrt(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};
    use proptest::prelude::*;

    fn poly(nvars: usize, terms: &[(&[u16], &str)]) -> Polynomial<Rat> {
        Polynomial::from_terms(
            nvars,
            terms
                .iter()
                .map(|(e, c)| (Monomial(e.to_vec()), rat(c))),
        )
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial(vec![0, 2]);
        let b = Monomial(vec![1, 0]);
        let c = Monomial(vec![2, 0]);
        assert!(b < a, "degree dominates");
        assert!(a < c || c < a);
        // same degree: lexicographic, x-block first
        assert!(Monomial(vec![1, 1]) < Monomial(vec![2, 0]));
    }

    #[test]
    fn ring_basics() {
        let x = Polynomial::<Rat>::variable(2, 0);
        let y = Polynomial::<Rat>::variable(2, 1);
        let sum = x.add(&y).unwrap();
        let diff = x.sub(&y).unwrap();
        // (x+y)(x-y) = x^2 - y^2
        let prod = sum.mul(&diff).unwrap();
        assert_eq!(prod, poly(2, &[(&[2, 0], "1"), (&[0, 2], "-1")]));
        // p + (-1) p = 0
        assert!(prod.add(&prod.scale(&rat("-1"))).unwrap().is_zero());
        // (x+2y)^2 = x^2 + 4xy + 4y^2
        let p = x.add(&y.scale(&rat("2"))).unwrap();
        let sq = p.mul(&p).unwrap();
        assert_eq!(
            sq,
            poly(2, &[(&[2, 0], "1"), (&[1, 1], "4"), (&[0, 2], "4")])
        );
    }

    #[test]
    fn truncate_and_window() {
        let p = poly(1, &[(&[1], "1"), (&[3], "1")]);
        assert_eq!(p.truncate(2), poly(1, &[(&[1], "1")]));
        assert_eq!(p.truncate(5), p);
        let q = poly(1, &[(&[1], "1"), (&[2], "1"), (&[3], "1"), (&[4], "1"), (&[5], "1")]);
        assert_eq!(
            q.window_part(2, 4),
            poly(1, &[(&[3], "1"), (&[4], "1")])
        );
    }

    #[test]
    fn substitution_examples() {
        // p = x^2 under x -> x + y
        let p = poly(2, &[(&[2, 0], "1")]);
        let map = PolyMap::new(
            alloc::vec![
                poly(2, &[(&[1, 0], "1"), (&[0, 1], "1")]),
                Polynomial::variable(2, 1),
            ],
            MapRole::CoordinateChange,
        );
        let got = p.substitute(&map, 10).unwrap();
        assert_eq!(
            got,
            poly(2, &[(&[2, 0], "1"), (&[1, 1], "2"), (&[0, 2], "1")])
        );

        // identity map fixes anything
        let id = PolyMap::<Rat>::identity(2);
        let q = poly(2, &[(&[2, 1], "3/5"), (&[0, 1], "-2")]);
        assert_eq!(q.substitute(&id, 10).unwrap(), q);

        // x -> x - x^2 truncated at 2
        let p = Polynomial::<Rat>::variable(1, 0);
        let map = PolyMap::new(
            alloc::vec![poly(1, &[(&[1], "1"), (&[2], "-1")])],
            MapRole::CoordinateChange,
        );
        assert_eq!(
            p.substitute(&map, 2).unwrap(),
            poly(1, &[(&[1], "1"), (&[2], "-1")])
        );
    }

    #[test]
    fn inverse_of_z_minus_z_squared() {
        // phi: z -> z - z^2 has inverse z + z^2 + 2z^3 through degree 3.
        let phi = PolyMap::new(
            alloc::vec![poly(1, &[(&[1], "1"), (&[2], "-1")])],
            MapRole::CoordinateChange,
        );
        let inv = phi.invert_near_identity(3).unwrap();
        assert_eq!(
            inv.components[0],
            poly(1, &[(&[1], "1"), (&[2], "1"), (&[3], "2")])
        );
        // psi = 0 inverts to the identity
        let id = PolyMap::<Rat>::identity(3);
        assert_eq!(id.invert_near_identity(7).unwrap(), id);
    }

    #[test]
    fn norm_values() {
        // constant c -> |c|
        let c = Polynomial::constant(2, rat("-7/2"));
        assert!((c.weighted_l2_norm(1.0).unwrap() - 3.5).abs() < 1e-12);
        assert!((c.majorant_sup_norm(1.0) - 3.5).abs() < 1e-12);
        // z1 in two variables at rho = 1: 1/sqrt(2)
        let z1 = Polynomial::<Rat>::variable(2, 0);
        assert!((z1.weighted_l2_norm(1.0).unwrap() - 0.7071067811865476).abs() < 1e-12);
        // z1 z2 at rho = 1: 1/sqrt(6)
        let p = poly(2, &[(&[1, 1], "1")]);
        assert!((p.weighted_l2_norm(1.0).unwrap() - 0.4082482904638631).abs() < 1e-12);
        // majorants: z1 + z2 at rho=1 -> 2; (z1+z2)^2 at rho=1/2 -> 1
        let s = poly(2, &[(&[1, 0], "1"), (&[0, 1], "1")]);
        assert!((s.majorant_sup_norm(1.0) - 2.0).abs() < 1e-12);
        let sq = s.mul(&s).unwrap();
        assert!((sq.majorant_sup_norm(0.5) - 1.0).abs() < 1e-12);
        // rho <= 0 rejected
        assert!(z1.weighted_l2_norm(0.0).is_err());
    }

    #[test]
    fn enumerate_monomials_counts() {
        // degree <= 3 in 2 vars: C(5,2) = 10
        assert_eq!(enumerate_monomials(2, 3).len(), 10);
        let ms = enumerate_monomials(3, 2);
        assert_eq!(ms.len(), 10);
        let mut sorted = ms.clone();
        sorted.sort();
        assert_eq!(ms, sorted, "enumeration comes out sorted");
    }

    fn arb_poly(nvars: usize, maxdeg: u16, nterms: usize) -> impl Strategy<Value = Polynomial<Rat>> {
        let term = (
            proptest::collection::vec(0..=maxdeg, nvars),
            -6i64..=6,
            1i64..=4,
        );
        proptest::collection::vec(term, 0..nterms).prop_map(move |ts| {
            Polynomial::from_terms(
                nvars,
                ts.into_iter().map(|(mut e, n, d)| {
                    for x in e.iter_mut() {
                        *x %= 3;
                    }
                    (Monomial(e), Rat::from_ratio_i64(n, d))
                }),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mul_associative_distributive(
            a in arb_poly(3, 2, 5),
            b in arb_poly(3, 2, 5),
            c in arb_poly(3, 2, 5),
        ) {
            let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
            let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(&lhs, &rhs);
        }

        #[test]
        fn substitution_roundtrip(p in arb_poly(3, 2, 5), seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let cap = 8u32;
            let mut comps = alloc::vec::Vec::new();
            for i in 0..3 {
                let mut comp = Polynomial::<Rat>::variable(3, i);
                for _ in 0..2 {
                    let e: alloc::vec::Vec<u16> =
                        (0..3).map(|_| rng.gen_range(0..=2u16)).collect();
                    let m = Monomial(e);
                    if m.degree() >= 2 && m.degree() <= 3 {
                        comp.add_term(m, Rat::from_ratio_i64(rng.gen_range(-3..=3), 2));
                    }
                }
                comps.push(comp);
            }
            let phi = PolyMap::new(comps, MapRole::CoordinateChange);
            let inv = phi.invert_near_identity(cap).unwrap();
            let back = p.substitute(&phi, cap).unwrap().substitute(&inv, cap).unwrap();
            prop_assert_eq!(back, p.truncate(cap));
        }

        #[test]
        fn l2_below_majorant_and_monotone(p in arb_poly(2, 3, 6)) {
            let l2 = p.weighted_l2_norm(0.75).unwrap();
            let maj = p.majorant_sup_norm(0.75);
            prop_assert!(l2 <= maj + 1e-9);
            let l2_big = p.weighted_l2_norm(1.5).unwrap();
            prop_assert!(l2 <= l2_big + 1e-9);
        }
    }
}
