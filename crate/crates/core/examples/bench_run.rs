//! Timing scratch: one seeded perturbation run at the acceptance scale.

use levinorm_core::levi::{levi_normalize, NormalizeOptions};
use levinorm_core::liealg::sl2_data;
use levinorm_core::poisson::PoissonTable;
use levinorm_core::poly::PolyMap;
use levinorm_core::sample::{random_near_identity, seeded_rng};
use levinorm_core::scalar::Rat;
use std::time::Instant;

fn main() {
    let data = sl2_data::<Rat>();
    let linear = PoissonTable::linear(&data.full_constants(), 16);
    let mut rng = seeded_rng(1000);
    let phi: PolyMap<Rat> = random_near_identity(&mut rng, 3, 2, 3, 3);
    let t0 = Instant::now();
    let table = linear.pushforward(&phi, 16).unwrap();
    eprintln!("perturb: {:?}", t0.elapsed());
    let mut opts = NormalizeOptions::new(4, 16);
    opts.clock = Some(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_micros() as u64
    });
    let t0 = Instant::now();
    let out = levi_normalize(&table, &data, opts).unwrap();
    eprintln!("normalize: {:?}", t0.elapsed());
    for s in &out.log.steps {
        eprintln!("  step {} ({},{}]: {:?} ms", s.step, s.lo, s.hi, s.micros.map(|m| m / 1000));
    }
    assert_eq!(out.table, linear);
}
