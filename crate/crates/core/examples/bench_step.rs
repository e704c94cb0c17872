//! Timing scratch: break one driver step into its phases.

use levinorm_core::levi::{LeviRunState, NormalizeOptions};
use levinorm_core::liealg::sl2_data;
use levinorm_core::poisson::PoissonTable;
use levinorm_core::poly::{MapRole, PolyMap, Polynomial};
use levinorm_core::sample::{random_near_identity, seeded_rng};
use levinorm_core::scalar::Rat;
use levinorm_core::window::{ModuleWindow, WindowKind};
use std::time::Instant;

fn main() {
    let data = sl2_data::<Rat>();
    let linear = PoissonTable::linear(&data.full_constants(), 16);
    let mut rng = seeded_rng(1000);
    let phi: PolyMap<Rat> = random_near_identity(&mut rng, 3, 2, 3, 3);
    let table = linear.pushforward(&phi, 16).unwrap();

    let mut state = LeviRunState::new(table, data.clone(), NormalizeOptions::new(4, 16)).unwrap();

    for step in 0..2 {
        let (lo, hi) = state.opts.schedule.window(step);
        eprintln!("== step {step} window ({lo},{hi}]");
        let t = Instant::now();
        let fwin = ModuleWindow::build(&data, WindowKind::Function, lo, hi).unwrap();
        eprintln!("  window build: {:?} (dim {})", t.elapsed(), fwin.dim());
        let t = Instant::now();
        let f = state.extract_two_cocycle(&fwin).unwrap();
        eprintln!("  extract+cocycle check: {:?}", t.elapsed());
        let t = Instant::now();
        let w = state.substep_x(&fwin, &f).unwrap();
        eprintln!("  homotopy solve + lift: {:?}", t.elapsed());
        let t = Instant::now();
        let psi: Vec<Polynomial<Rat>> = w.iter().map(|p| p.neg()).collect();
        let phi_comps: Vec<Polynomial<Rat>> = (0..3)
            .map(|i| Polynomial::variable(3, i).add(&psi[i]).unwrap())
            .collect();
        let phi_step = PolyMap::new(phi_comps, MapRole::CoordinateChange);
        let phi_inv = phi_step.invert_near_identity(16).unwrap();
        eprintln!("  invert: {:?}", t.elapsed());
        let t = Instant::now();
        let pushed = state
            .table
            .pushforward_with_inverse(&phi_step, &phi_inv, 16)
            .unwrap();
        eprintln!("  pushforward: {:?}", t.elapsed());
        let t = Instant::now();
        pushed.check_jacobi().unwrap();
        eprintln!("  jacobi check: {:?}", t.elapsed());
        let t = Instant::now();
        let fwd = phi_step.compose(&state.forward, 16).unwrap();
        let inv = state.inverse.compose(&phi_inv, 16).unwrap();
        eprintln!("  accumulate fwd/inv: {:?}", t.elapsed());
        let _ = (fwd, inv);

        // max coefficient size in the pushed table
        let mut max_bits = 0u64;
        for e in pushed.entries() {
            for (_, c) in e.terms() {
                let bits = c.numer().bits().max(c.denom().bits());
                max_bits = max_bits.max(bits);
            }
        }
        eprintln!("  max coeff bits in table: {max_bits}");

        let t = Instant::now();
        state = state.step().unwrap();
        eprintln!("  full driver step: {:?}", t.elapsed());
    }
}
