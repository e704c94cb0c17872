//! Seeded random generation of scalars, polynomials, coordinate changes and
//! window vectors. Used by the norm-bound sampler and by tests; everything is
//! driven by a caller-supplied generator so runs are reproducible from a
//! single seed.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::poly::{enumerate_monomials, MapRole, Monomial, PolyMap, Polynomial};
use crate::scalar::Scalar;
use crate::window::ModuleWindow;

/// Deterministic generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand_core::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

fn next_range(rng: &mut impl RngCore, n: u64) -> u64 {
    // Small ranges; modulo bias is irrelevant for test data.
    rng.next_u64() % n
}

/// Small random scalar `p / 2^k` with `p` in `-4..=4` and `k <= 2`.
/// Dyadic denominators keep coefficient growth tame across compositions.
pub fn random_scalar<S: Scalar>(rng: &mut impl RngCore) -> S {
    let num = next_range(rng, 9) as i64 - 4;
    let den = 1i64 << next_range(rng, 3);
    S::from_ratio_i64(num, den)
}

/// Nonzero variant of [`random_scalar`].
pub fn random_nonzero_scalar<S: Scalar>(rng: &mut impl RngCore) -> S {
    loop {
        let s = random_scalar::<S>(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Random polynomial with `terms` draws of monomials of total degree in
/// `[lo, hi]` over `nvars` variables.
pub fn random_polynomial<S: Scalar>(
    rng: &mut impl RngCore,
    nvars: usize,
    lo: u32,
    hi: u32,
    terms: usize,
) -> Polynomial<S> {
    let pool: Vec<Monomial> = enumerate_monomials(nvars, hi)
        .into_iter()
        .filter(|m| m.degree() >= lo)
        .collect();
    let mut p = Polynomial::zero(nvars);
    if pool.is_empty() {
        return p;
    }
    for _ in 0..terms {
        let m = pool[next_range(rng, pool.len() as u64) as usize].clone();
        p.add_term(m, random_scalar::<S>(rng));
    }
    p
}

/// Random near-identity coordinate change `Id + psi` with `psi` terms of
/// total degree in `[lo, hi]` (`lo >= 2`).
pub fn random_near_identity<S: Scalar>(
    rng: &mut impl RngCore,
    nvars: usize,
    lo: u32,
    hi: u32,
    terms_per_component: usize,
) -> PolyMap<S> {
    assert!(lo >= 2, "near-identity corrections start at degree 2");
    let comps = (0..nvars)
        .map(|i| {
            let mut c = Polynomial::variable(nvars, i);
            let psi = random_polynomial::<S>(rng, nvars, lo, hi, terms_per_component);
            for (m, v) in psi.terms() {
                c.add_term(m.clone(), v.clone());
            }
            c
        })
        .collect();
    PolyMap::new(comps, MapRole::CoordinateChange)
}

/// Random window vector with about `terms` nonzero coordinates.
pub fn random_window_vec<S: Scalar>(
    win: &ModuleWindow<S>,
    rng: &mut impl RngCore,
    terms: usize,
) -> Vec<S> {
    let dim = win.dim();
    let mut v = alloc::vec![S::zero(); dim];
    if dim == 0 {
        return v;
    }
    for _ in 0..terms {
        let i = next_range(rng, dim as u64) as usize;
        v[i] = random_scalar::<S>(rng);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    #[test]
    fn reproducible_from_seed() {
        let mut a = seeded_rng(7);
        let mut b = seeded_rng(7);
        let p: Polynomial<Rat> = random_polynomial(&mut a, 3, 2, 3, 5);
        let q: Polynomial<Rat> = random_polynomial(&mut b, 3, 2, 3, 5);
        assert_eq!(p, q);
        let r: Polynomial<Rat> = random_polynomial(&mut a, 3, 2, 3, 5);
        assert_ne!(p, r, "stream advances");
    }

    #[test]
    fn near_identity_shape() {
        let mut rng = seeded_rng(3);
        let phi: PolyMap<Rat> = random_near_identity(&mut rng, 4, 2, 3, 4);
        assert!(phi.is_near_identity());
        let gap = phi.near_identity_gap().unwrap();
        assert!(gap >= 2);
    }
}
