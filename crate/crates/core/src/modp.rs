//! Modular linear algebra: prime-field elimination, Chinese remaindering and
//! rational reconstruction.
//!
//! This backs the fast path of the brute-force cocycle solver on large
//! rational systems. Solutions obtained here are certified by an exact check
//! in the caller; a failed check falls back to elimination over the field, so
//! the modular path never weakens exactness.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// Primes just above 2^62; products of residues stay below 2^126.
pub const PRIMES62: [u64; 8] = [
    4611686018427388039,
    4611686018427388073,
    4611686018427388081,
    4611686018427388091,
    4611686018427388093,
    4611686018427388097,
    4611686018427388157,
    4611686018427388181,
];

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (p - b)
    }
}

/// Modular inverse by extended Euclid; `None` when `gcd(a, p) != 1`.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    let t = ((t0 % p as i128) + p as i128) % p as i128;
    Some(t as u64)
}

/// Sparse row-major rational matrix for the modular solver.
pub struct SparseRows<S> {
    pub n_cols: usize,
    pub rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> SparseRows<S> {
    pub fn apply(&self, x: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = S::zero();
                for (c, v) in row {
                    if !x[*c].is_zero() {
                        acc = acc.add_ref(&v.mul_ref(&x[*c]));
                    }
                }
                acc
            })
            .collect()
    }
}

/// Pivot sequence fixed by the first good prime and replayed on the others,
/// so particular solutions agree across primes.
#[derive(Clone, Debug)]
pub struct PivotPlan {
    pub pivots: Vec<(usize, usize)>,
}

enum ElimOutcome {
    /// Per right-hand side: solution mod p, or `None` when that system is
    /// inconsistent mod p (bad prime or genuinely unsolvable; the caller
    /// distinguishes by voting across primes).
    Ok {
        solutions: Vec<Option<Vec<u64>>>,
        plan: PivotPlan,
    },
    /// A pivot from the plan vanished mod this prime.
    BadPrime,
}

/// Gauss-Jordan elimination of `a x = b` over `Z/p` for a batch of right-hand
/// sides. Free variables are set to zero. When `plan` is given its pivot
/// sequence is replayed; otherwise pivots are chosen greedily and returned.
fn eliminate_mod(
    a: &SparseRows<impl Scalar>,
    rhs_cols: &[Vec<u64>],
    dense: &mut Vec<Vec<u64>>,
    p: u64,
    plan: Option<&PivotPlan>,
) -> ElimOutcome {
    let n_rows = a.rows.len();
    let n_cols = a.n_cols;
    let n_rhs = rhs_cols.len();
    let width = n_cols + n_rhs;

    // Dense working copy [A | B] mod p.
    dense.clear();
    for (i, row) in a.rows.iter().enumerate() {
        let mut d = vec![0u64; width];
        for (c, v) in row {
            match v.residue_mod(p) {
                Some(r) => d[*c] = add_mod(d[*c], r, p),
                None => return ElimOutcome::BadPrime,
            }
        }
        for (k, col) in rhs_cols.iter().enumerate() {
            d[n_cols + k] = col[i] % p;
        }
        dense.push(d);
    }

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut used_row = vec![false; n_rows];

    let do_pivot = |dense: &mut Vec<Vec<u64>>, used_row: &mut Vec<bool>, r: usize, c: usize| {
        let inv = inv_mod(dense[r][c], p).expect("pivot invertible");
        for x in dense[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..n_rows {
            if i != r && dense[i][c] != 0 {
                let factor = dense[i][c];
                let (head, tail) = if i < r {
                    let (h, t) = dense.split_at_mut(r);
                    (&mut h[i], &t[0])
                } else {
                    let (h, t) = dense.split_at_mut(i);
                    (&mut t[0], &h[r])
                };
                for (x, y) in head.iter_mut().zip(tail.iter()) {
                    *x = sub_mod(*x, mul_mod(factor, *y, p), p);
                }
            }
        }
        used_row[r] = true;
    };

    match plan {
        Some(plan) => {
            for &(r, c) in &plan.pivots {
                if dense[r][c] == 0 {
                    return ElimOutcome::BadPrime;
                }
                do_pivot(dense, &mut used_row, r, c);
            }
            pivots = plan.pivots.clone();
            // The plan's rank must still be maximal for this prime: any
            // unused row with a nonzero matrix part means the ranks differ.
            for (i, row) in dense.iter().enumerate() {
                if !used_row[i] && row[..n_cols].iter().any(|&x| x != 0) {
                    return ElimOutcome::BadPrime;
                }
            }
        }
        None => {
            for c in 0..n_cols {
                let Some(r) = (0..n_rows).find(|&r| !used_row[r] && dense[r][c] != 0) else {
                    continue;
                };
                do_pivot(dense, &mut used_row, r, c);
                pivots.push((r, c));
            }
        }
    }

    // Consistency per right-hand side: zero matrix rows must carry zero
    // right-hand side entries.
    let mut consistent = vec![true; n_rhs];
    for (i, row) in dense.iter().enumerate() {
        if !used_row[i] {
            for k in 0..n_rhs {
                if row[n_cols + k] != 0 {
                    consistent[k] = false;
                }
            }
        }
    }

    let mut solutions: Vec<Option<Vec<u64>>> = consistent
        .iter()
        .map(|&ok| if ok { Some(vec![0u64; n_cols]) } else { None })
        .collect();
    for &(r, c) in &pivots {
        for (k, slot) in solutions.iter_mut().enumerate() {
            if let Some(sol) = slot {
                sol[c] = dense[r][n_cols + k];
            }
        }
    }
    ElimOutcome::Ok {
        solutions,
        plan: PivotPlan { pivots },
    }
}

/// Rational reconstruction of `r mod m`: returns `(num, den)` with
/// `|num|, den <= sqrt(m/2)` and `num = den * r mod m`, if one exists.
pub fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (m / BigInt::from(2u8)).sqrt();
    let (mut r0, mut r1) = (m.clone(), ((r % m) + m) % m);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = core::mem::replace(&mut r1, r2);
        t0 = core::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

fn crt_pair(r1: &BigInt, m1: &BigInt, r2: u64, p2: u64) -> (BigInt, BigInt) {
    // x = r1 mod m1, x = r2 mod p2 with gcd(m1, p2) = 1.
    let p2b = BigInt::from(p2);
    let m1_mod = ((m1 % &p2b) + &p2b) % &p2b;
    let m1_u = m1_mod.to_u64_digits().1.first().copied().unwrap_or(0);
    let inv = inv_mod(m1_u % p2, p2).expect("moduli coprime");
    let r1_mod = (((r1 % &p2b) + &p2b) % &p2b)
        .to_u64_digits()
        .1
        .first()
        .copied()
        .unwrap_or(0);
    let diff = sub_mod(r2 % p2, r1_mod, p2);
    let k = mul_mod(diff, inv, p2);
    (r1 + m1 * BigInt::from(k), m1 * &p2b)
}

/// Result of the batched modular solve.
pub enum BatchOutcome<S> {
    /// Per right-hand side: `Some(solution)` or `None` when that system is
    /// inconsistent over the field.
    Solved(Vec<Option<Vec<S>>>),
    /// The modular pipeline could not certify an answer (non-rational field,
    /// persistent bad primes, reconstruction failure). Fall back to exact
    /// elimination.
    Unavailable,
}

/// Solve `a x = b` for many right-hand sides via mod-p elimination, CRT and
/// rational reconstruction. Every returned solution is verified exactly over
/// the field before being reported, so a `Solved` outcome is certified.
pub fn solve_batch<S: Scalar>(a: &SparseRows<S>, rhs: &[Vec<S>]) -> BatchOutcome<S> {
    if rhs.is_empty() {
        return BatchOutcome::Solved(Vec::new());
    }
    // Probe the field for a modular image; bail out for non-rational scalars.
    if S::one().residue_mod(PRIMES62[0]).is_none() {
        return BatchOutcome::Unavailable;
    }

    let n_cols = a.n_cols;
    let n_rhs = rhs.len();
    let mut plan: Option<PivotPlan> = None;
    // Per right-hand side: CRT-accumulated residues with their modulus, and
    // inconsistency votes.
    let mut acc: Vec<Option<(Vec<BigInt>, BigInt)>> = vec![None; n_rhs];
    let mut bad_votes = vec![0usize; n_rhs];
    let mut verified: Vec<Option<Option<Vec<S>>>> = vec![None; n_rhs];
    let mut scratch: Vec<Vec<u64>> = Vec::new();

    let rhs_residues = |p: u64| -> Option<Vec<Vec<u64>>> {
        rhs.iter()
            .map(|col| col.iter().map(|v| v.residue_mod(p)).collect::<Option<Vec<u64>>>())
            .collect()
    };

    for &p in PRIMES62.iter() {
        if verified.iter().all(|v| v.is_some()) {
            break;
        }
        let Some(cols) = rhs_residues(p) else { continue };
        let solutions = match eliminate_mod(a, &cols, &mut scratch, p, plan.as_ref()) {
            ElimOutcome::BadPrime => continue,
            ElimOutcome::Ok { solutions, plan: got } => {
                if plan.is_none() {
                    plan = Some(got);
                }
                solutions
            }
        };

        for (k, sol) in solutions.into_iter().enumerate() {
            if verified[k].is_some() {
                continue;
            }
            match sol {
                None => {
                    bad_votes[k] += 1;
                    if bad_votes[k] >= 2 {
                        // Two independent primes agree: inconsistent over
                        // the field.
                        verified[k] = Some(None);
                    }
                }
                Some(sol) => {
                    match acc[k].take() {
                        None => {
                            acc[k] = Some((
                                sol.iter().map(|&x| BigInt::from(x)).collect(),
                                BigInt::from(p),
                            ));
                        }
                        Some((mut res, modulus)) => {
                            for (c, &x) in sol.iter().enumerate() {
                                let (r, _) = crt_pair(&res[c], &modulus, x, p);
                                res[c] = r;
                            }
                            acc[k] = Some((res, modulus * BigInt::from(p)));
                        }
                    }
                    // Attempt reconstruction + exact verification.
                    let (res, modulus) = acc[k].as_ref().unwrap();
                    let mut sol: Vec<S> = Vec::with_capacity(n_cols);
                    let mut ok = true;
                    for r in res {
                        match rational_reconstruct(r, modulus)
                            .and_then(|(num, den)| S::from_big_ratio(num, den))
                        {
                            Some(s) => sol.push(s),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        let image = a.apply(&sol);
                        if image
                            .iter()
                            .zip(rhs[k].iter())
                            .all(|(x, y)| x.sub_ref(y).is_zero())
                        {
                            verified[k] = Some(Some(sol));
                        }
                    }
                }
            }
        }
    }

    if verified.iter().all(|v| v.is_some()) {
        BatchOutcome::Solved(verified.into_iter().map(|v| v.unwrap()).collect())
    } else {
        BatchOutcome::Unavailable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};

    #[test]
    fn inverse_mod() {
        for p in PRIMES62 {
            let inv = inv_mod(12345, p).unwrap();
            assert_eq!(mul_mod(12345, inv, p), 1);
        }
        assert_eq!(inv_mod(0, PRIMES62[0]), None);
    }

    #[test]
    fn reconstruct_small_rational() {
        let p = BigInt::from(PRIMES62[0]) * BigInt::from(PRIMES62[1]);
        let value = rat("22/7");
        let r1 = value.residue_mod(PRIMES62[0]).unwrap();
        let r2 = value.residue_mod(PRIMES62[1]).unwrap();
        let (combined, _) =
            crt_pair(&BigInt::from(r1), &BigInt::from(PRIMES62[0]), r2, PRIMES62[1]);
        let (num, den) = rational_reconstruct(&combined, &p).unwrap();
        assert_eq!(num, BigInt::from(22));
        assert_eq!(den, BigInt::from(7));
    }

    #[test]
    fn batch_solve_small_system() {
        // x + y = 3, x - y = 1  ->  x = 2, y = 1
        let a = SparseRows::<Rat> {
            n_cols: 2,
            rows: alloc::vec![
                alloc::vec![(0, rat("1")), (1, rat("1"))],
                alloc::vec![(0, rat("1")), (1, rat("-1"))],
            ],
        };
        let rhs = alloc::vec![alloc::vec![rat("3"), rat("1")]];
        match solve_batch(&a, &rhs) {
            BatchOutcome::Solved(v) => {
                let sol = v[0].as_ref().unwrap();
                assert_eq!(sol[0], rat("2"));
                assert_eq!(sol[1], rat("1"));
            }
            BatchOutcome::Unavailable => panic!("modular path should apply"),
        }
    }

    #[test]
    fn batch_solve_underdetermined_and_inconsistent() {
        // One equation, two unknowns: x + 2y = 4 (free var y set to 0).
        let a = SparseRows::<Rat> {
            n_cols: 2,
            rows: alloc::vec![alloc::vec![(0, rat("1")), (1, rat("2"))]],
        };
        match solve_batch(&a, &[alloc::vec![rat("4")]]) {
            BatchOutcome::Solved(v) => {
                let sol = v[0].as_ref().unwrap();
                assert_eq!(sol, &alloc::vec![rat("4"), rat("0")]);
            }
            BatchOutcome::Unavailable => panic!(),
        }

        // 0 * x = 1 is inconsistent.
        let z = SparseRows::<Rat> {
            n_cols: 1,
            rows: alloc::vec![alloc::vec![]],
        };
        match solve_batch(&z, &[alloc::vec![rat("1")]]) {
            BatchOutcome::Solved(v) => assert!(v[0].is_none()),
            BatchOutcome::Unavailable => panic!(),
        }
    }
}
