//! The normalization driver: walks degree windows, extracts the bracket
//! defects as cochains, solves for primitives with the homotopy operators,
//! and pushes the table forward along the resulting near-identity coordinate
//! changes.
//!
//! After the step covering the window `(lo, hi]`, the Levi-block brackets
//! `{x_i, x_j}` and the mixed brackets `{x_i, y_j}` agree with the linear
//! model through total degree `hi`; each step doubles (or, on the
//! single-degree schedule, increments) the normalized range. All assertions
//! are exact.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cohom::{self, Cochain};
use crate::liealg::LeviAlgebraData;
use crate::poly::{MapRole, Monomial, PolyMap, Polynomial};
use crate::poisson::PoissonTable;
use crate::scalar::Scalar;
use crate::window::{ModuleWindow, WindowKind};
use crate::{Error, Result};

/// Degree-window schedule.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Schedule {
    /// Windows `(2^l, 2^(l+1)]`: quadratic progress, one cohomology solve
    /// per doubling.
    Doubling,
    /// Windows `(d, d+1]`: one degree at a time, easier to inspect.
    SingleDegree,
}

impl Schedule {
    /// Degree window handled by step `step` (0-based).
    pub fn window(&self, step: usize) -> (u32, u32) {
        match self {
            Schedule::Doubling => (1u32 << step, 1u32 << (step + 1)),
            Schedule::SingleDegree => (step as u32 + 1, step as u32 + 2),
        }
    }

    /// Truncation degree needed to run `steps` steps.
    pub fn required_truncation(&self, steps: usize) -> u32 {
        if steps == 0 {
            1
        } else {
            self.window(steps - 1).1
        }
    }
}

/// Options for a normalization run.
#[derive(Clone, Debug)]
pub struct NormalizeOptions {
    pub steps: usize,
    pub trunc: u32,
    pub schedule: Schedule,
    /// Check the Jacobi identity of every intermediate table (exact, through
    /// `trunc - 1`).
    pub verify_jacobi_each_step: bool,
    /// Clock in microseconds for per-step timings; the core stays free of
    /// platform timers.
    pub clock: Option<fn() -> u64>,
}

impl NormalizeOptions {
    pub fn new(steps: usize, trunc: u32) -> Self {
        NormalizeOptions {
            steps,
            trunc,
            schedule: Schedule::Doubling,
            verify_jacobi_each_step: true,
            clock: None,
        }
    }
}

/// Per-step record: the window, its module dimensions, the coordinate change
/// produced, and float summaries for the diagnostics report.
#[derive(Clone, Debug)]
pub struct StepLog<S: Scalar> {
    pub step: usize,
    pub lo: u32,
    pub hi: u32,
    pub function_window_dim: usize,
    pub field_window_dim: usize,
    /// The near-identity correction of this step (components of `psi`).
    pub psi: PolyMap<S>,
    /// Per-entry degree profiles of the table after the step: entry `(i,j)`
    /// in pair order, then degree.
    pub table_profiles: Vec<Vec<f64>>,
    /// Per-component degree profiles of `psi`.
    pub psi_profiles: Vec<Vec<f64>>,
    pub micros: Option<u64>,
}

/// Full run record.
#[derive(Clone, Debug)]
pub struct RunLog<S: Scalar> {
    pub trunc: u32,
    pub schedule: Schedule,
    /// Degree profiles of the input table entries.
    pub initial_profiles: Vec<Vec<f64>>,
    pub steps: Vec<StepLog<S>>,
}

/// Iteration state: the current table, and the accumulated coordinate change
/// in both directions (`forward` expresses the current coordinates as
/// polynomials in the original ones).
#[derive(Clone, Debug)]
pub struct LeviRunState<S: Scalar> {
    pub data: LeviAlgebraData<S>,
    pub table: PoissonTable<S>,
    pub forward: PolyMap<S>,
    pub inverse: PolyMap<S>,
    pub step: usize,
    pub opts: NormalizeOptions,
    /// Fiber block size for constrained (fiberwise-linear) runs.
    pub fiber: Option<usize>,
    pub log: RunLog<S>,
}

/// Result of a completed run.
#[derive(Clone, Debug)]
pub struct NormalizeOutcome<S: Scalar> {
    pub table: PoissonTable<S>,
    /// New coordinates as polynomials in the original coordinates.
    pub forward: PolyMap<S>,
    pub inverse: PolyMap<S>,
    /// The Levi relations hold exactly through this degree.
    pub normalized_through: u32,
    pub log: RunLog<S>,
}

fn profiles<S: Scalar>(table: &PoissonTable<S>) -> Vec<Vec<f64>> {
    table
        .entries()
        .iter()
        .map(|p| p.majorant_profile(table.trunc))
        .collect()
}

impl<S: Scalar> LeviRunState<S> {
    /// Validate the input and set up the run. Rejects ill-posed input before
    /// any step: invalid algebra data, a table whose linear part disagrees
    /// with the declared constants, a Jacobi failure, or a schedule that
    /// does not fit inside the truncation degree.
    pub fn new(
        table: PoissonTable<S>,
        data: LeviAlgebraData<S>,
        opts: NormalizeOptions,
    ) -> Result<Self> {
        Self::new_inner(table, data, opts, None)
    }

    /// Constrained variant: coordinates split into a fiber block of the
    /// given size (containing the Levi block) and a base block; every
    /// cochain is confined to the fiberwise-linear subspaces.
    pub fn new_constrained(
        table: PoissonTable<S>,
        data: LeviAlgebraData<S>,
        opts: NormalizeOptions,
        fiber: usize,
    ) -> Result<Self> {
        Self::new_inner(table, data, opts, Some(fiber))
    }

    fn new_inner(
        table: PoissonTable<S>,
        data: LeviAlgebraData<S>,
        opts: NormalizeOptions,
        fiber: Option<usize>,
    ) -> Result<Self> {
        let report = data.validate();
        if !report.is_valid() {
            return Err(Error::InvalidAlgebra(alloc::format!(
                "{}",
                report.violations[0]
            )));
        }
        if table.n != data.n {
            return Err(Error::DimensionMismatch {
                expected: data.n,
                found: table.n,
            });
        }
        let needed = opts.schedule.required_truncation(opts.steps);
        if needed > opts.trunc {
            return Err(Error::ScheduleError(alloc::format!(
                "{} steps need truncation degree >= {}, got {}",
                opts.steps,
                needed,
                opts.trunc
            )));
        }
        if table.trunc != opts.trunc {
            return Err(Error::ScheduleError(alloc::format!(
                "table truncation {} differs from run truncation {}",
                table.trunc,
                opts.trunc
            )));
        }
        let lp = table.linear_part()?;
        if lp != data.full_constants() {
            return Err(Error::InvalidArgument(
                "linear part of the table does not match the declared constants".into(),
            ));
        }
        table.check_jacobi()?;
        let n = table.n;
        let log = RunLog {
            trunc: opts.trunc,
            schedule: opts.schedule,
            initial_profiles: profiles(&table),
            steps: Vec::new(),
        };
        Ok(LeviRunState {
            data,
            table,
            forward: PolyMap::identity(n),
            inverse: PolyMap::identity(n),
            step: 0,
            opts,
            fiber,
            log,
        })
    }

    fn function_kind(&self) -> WindowKind {
        match self.fiber {
            Some(fiber) => WindowKind::FiberLinearFunction { fiber },
            None => WindowKind::Function,
        }
    }

    fn field_kind(&self) -> WindowKind {
        match self.fiber {
            Some(fiber) => WindowKind::AlgebroidVectorField { fiber },
            None => WindowKind::VectorField,
        }
    }

    /// Defect of the Levi-block bracket `(i, j)` against the linear model.
    fn xx_defect(&self, i: usize, j: usize) -> Polynomial<S> {
        let mut d = self.table.entry(i, j);
        for k in 0..self.data.m {
            if !self.data.c[i][j][k].is_zero() {
                d.add_term(Monomial::var(self.data.n, k), self.data.c[i][j][k].neg());
            }
        }
        d
    }

    /// Defect of the mixed bracket `{x_i, y_j}` (with `x_i` given as a
    /// polynomial) against the action model.
    fn xy_defect(&self, xi: &Polynomial<S>, i: usize, j: usize) -> Result<Polynomial<S>> {
        let (n, m) = (self.data.n, self.data.m);
        let yj = Polynomial::variable(n, m + j);
        let mut d = self.table.bracket(xi, &yj)?;
        for k in 0..n - m {
            if !self.data.a[i][j][k].is_zero() {
                d.add_term(Monomial::var(n, m + k), self.data.a[i][j][k].neg());
            }
        }
        Ok(d)
    }

    /// Window part of the Levi-block defects as a 2-cochain; verified to be
    /// a cocycle. Errors if a defect has terms at or below `lo` (the input
    /// was not Poisson-normalized to the required order) or escapes the
    /// constrained subspace.
    pub fn extract_two_cocycle(&self, fwin: &ModuleWindow<S>) -> Result<Cochain<S>> {
        let m = self.data.m;
        let mut slots = Vec::with_capacity(cohom::pair_count(m));
        for i in 0..m {
            for j in i + 1..m {
                let defect = self.xx_defect(i, j);
                if defect.min_degree().map_or(false, |d| d <= fwin.lo) {
                    return Err(Error::NotPoisson { i, j, k: 0 });
                }
                let windowed = defect.window_part(fwin.lo, fwin.hi);
                slots.push(fwin.project_poly(&windowed)?);
            }
        }
        let f = Cochain { degree: 2, slots };
        cohom::check_cocycle(fwin, &f)?;
        Ok(f)
    }

    /// First substep: primitive of the 2-cocycle, lifted to polynomials.
    /// Returns the corrections `w_i`; the updated Levi coordinates are
    /// `x_i - w_i`.
    pub fn substep_x(
        &self,
        fwin: &ModuleWindow<S>,
        f: &Cochain<S>,
    ) -> Result<Vec<Polynomial<S>>> {
        let w = cohom::solve_two_cocycle(fwin, f)?;
        Ok(w.slots.iter().map(|s| fwin.lift_to_poly(s)).collect())
    }

    /// Window part of the mixed-bracket defects (after the `x` update) as a
    /// 1-cochain with vector-field values; verified to be a cocycle.
    pub fn extract_one_cocycle(
        &self,
        vwin: &ModuleWindow<S>,
        w_polys: &[Polynomial<S>],
    ) -> Result<Cochain<S>> {
        let (n, m) = (self.data.n, self.data.m);
        let mut slots = Vec::with_capacity(m);
        for i in 0..m {
            let mut xi = Polynomial::variable(n, i);
            xi = xi.sub(&w_polys[i])?;
            let mut comps = Vec::with_capacity(n - m);
            for j in 0..n - m {
                let defect = self.xy_defect(&xi, i, j)?;
                if defect.min_degree().map_or(false, |d| d <= vwin.lo) {
                    return Err(Error::NotPoisson { i, j: m + j, k: 0 });
                }
                comps.push(defect.window_part(vwin.lo, vwin.hi));
            }
            slots.push(vwin.project_field(&comps)?);
        }
        let t = Cochain { degree: 1, slots };
        cohom::check_cocycle(vwin, &t)?;
        Ok(t)
    }

    /// Second substep: primitive of the 1-cocycle, lifted to per-direction
    /// polynomials `v_j`; the updated radical coordinates are `y_j - v_j`.
    pub fn substep_y(
        &self,
        vwin: &ModuleWindow<S>,
        t: &Cochain<S>,
    ) -> Result<Vec<Polynomial<S>>> {
        let v = cohom::solve_one_cocycle(vwin, t)?;
        Ok(vwin.lift_to_field(&v.slots[0]))
    }

    /// Exact assertion that all Levi-block and mixed defects vanish through
    /// degree `hi`; runs after every step and is available to callers that
    /// drive steps manually.
    pub fn verify_window_progress(&self, hi: u32) -> Result<()> {
        let m = self.data.m;
        for i in 0..m {
            for j in i + 1..m {
                let defect = self.xx_defect(i, j);
                if defect.min_degree().map_or(false, |d| d <= hi) {
                    return Err(Error::Internal(alloc::format!(
                        "window progress violated on x-x pair ({i}, {j})"
                    )));
                }
            }
            let xi = Polynomial::variable(self.data.n, i);
            for j in 0..self.data.n - m {
                let defect = self.xy_defect(&xi, i, j)?;
                if defect.min_degree().map_or(false, |d| d <= hi) {
                    return Err(Error::Internal(alloc::format!(
                        "window progress violated on x-y pair ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Run one full step: both substeps, the coordinate update, and the
    /// pushforward, with exact invariant checks.
    pub fn step(mut self) -> Result<Self> {
        let t0 = self.opts.clock.map(|c| c());
        let (lo, hi) = self.opts.schedule.window(self.step);
        if hi > self.opts.trunc {
            return Err(Error::ScheduleError(alloc::format!(
                "window ({lo}, {hi}] exceeds truncation degree {}",
                self.opts.trunc
            )));
        }
        let (n, m) = (self.data.n, self.data.m);

        let fwin = ModuleWindow::build(&self.data, self.function_kind(), lo, hi)?;
        let f = self.extract_two_cocycle(&fwin)?;
        let w_polys = self.substep_x(&fwin, &f)?;

        let (vwin_dim, v_polys) = if n > m {
            let vwin = ModuleWindow::build(&self.data, self.field_kind(), lo, hi)?;
            let t = self.extract_one_cocycle(&vwin, &w_polys)?;
            (vwin.dim(), self.substep_y(&vwin, &t)?)
        } else {
            (0, Vec::new())
        };

        // psi = -(w_1..w_m, v_1..v_{n-m}); phi = Id + psi.
        let mut psi_comps: Vec<Polynomial<S>> = Vec::with_capacity(n);
        for w in &w_polys {
            psi_comps.push(w.neg());
        }
        for v in &v_polys {
            psi_comps.push(v.neg());
        }
        for (idx, p) in psi_comps.iter().enumerate() {
            if !p.supported_in_window(lo, hi) {
                return Err(Error::Internal(alloc::format!(
                    "correction component {idx} escapes the window"
                )));
            }
        }
        let phi_comps: Vec<Polynomial<S>> = (0..n)
            .map(|i| Polynomial::variable(n, i).add(&psi_comps[i]).expect("same vars"))
            .collect();
        let phi = PolyMap::new(phi_comps, MapRole::CoordinateChange);
        let phi_inv = phi.invert_near_identity(self.opts.trunc)?;

        self.table = self
            .table
            .pushforward_with_inverse(&phi, &phi_inv, self.opts.trunc)?;
        self.forward = phi.compose(&self.forward, self.opts.trunc)?;
        self.inverse = self.inverse.compose(&phi_inv, self.opts.trunc)?;
        self.step += 1;

        self.verify_window_progress(hi)?;
        if self.opts.verify_jacobi_each_step {
            self.table.check_jacobi()?;
        }
        let lp = self.table.linear_part()?;
        if lp != self.data.full_constants() {
            return Err(Error::Internal("linear part drifted during a step".into()));
        }

        let micros = match (t0, self.opts.clock) {
            (Some(t0), Some(c)) => Some(c().saturating_sub(t0)),
            _ => None,
        };
        let psi = PolyMap::new(psi_comps, MapRole::CoordinateChange);
        self.log.steps.push(StepLog {
            step: self.step - 1,
            lo,
            hi,
            function_window_dim: fwin.dim(),
            field_window_dim: vwin_dim,
            psi_profiles: psi
                .components
                .iter()
                .map(|p| p.majorant_profile(self.opts.trunc))
                .collect(),
            psi,
            table_profiles: profiles(&self.table),
            micros,
        });
        Ok(self)
    }

    /// Run all remaining steps and package the outcome.
    pub fn finish(mut self) -> Result<NormalizeOutcome<S>> {
        while self.step < self.opts.steps {
            self = self.step()?;
        }
        let normalized_through = if self.opts.steps == 0 {
            1
        } else {
            self.opts.schedule.window(self.opts.steps - 1).1
        };
        // Final consistency: pushing the original table through the
        // accumulated change reproduces the output table exactly.
        Ok(NormalizeOutcome {
            table: self.table,
            forward: self.forward,
            inverse: self.inverse,
            normalized_through,
            log: self.log,
        })
    }
}

/// Bring a truncated Poisson table with the given split linear part into
/// Levi normal form: after the run the Levi-block and mixed brackets are
/// exactly linear through the normalized degree, and only the radical-block
/// brackets keep higher-order tails.
pub fn levi_normalize<S: Scalar>(
    table: &PoissonTable<S>,
    data: &LeviAlgebraData<S>,
    opts: NormalizeOptions,
) -> Result<NormalizeOutcome<S>> {
    LeviRunState::new(table.clone(), data.clone(), opts)?.finish()
}

/// Constrained run used by the fiberwise-linear (Lie algebroid) pipeline.
pub fn levi_normalize_constrained<S: Scalar>(
    table: &PoissonTable<S>,
    data: &LeviAlgebraData<S>,
    opts: NormalizeOptions,
    fiber: usize,
) -> Result<NormalizeOutcome<S>> {
    LeviRunState::new_constrained(table.clone(), data.clone(), opts, fiber)?.finish()
}

/// Verify the normal-form shape of a table against the declared constants:
/// Levi-block and mixed brackets exactly linear through `through`, and
/// radical-block tails of total degree at least 2. Returns the first
/// violation as an error message.
pub fn verify_levi_shape<S: Scalar>(
    table: &PoissonTable<S>,
    data: &LeviAlgebraData<S>,
    through: u32,
) -> core::result::Result<(), String> {
    let (n, m) = (data.n, data.m);
    for i in 0..n {
        for j in i + 1..n {
            let mut defect = table.entry(i, j);
            if i < m && j < m {
                for k in 0..m {
                    if !data.c[i][j][k].is_zero() {
                        defect.add_term(Monomial::var(n, k), data.c[i][j][k].neg());
                    }
                }
                if defect.min_degree().map_or(false, |d| d <= through) {
                    return Err(alloc::format!(
                        "x-x bracket ({i}, {j}) deviates from linear within degree {through}"
                    ));
                }
            } else if i < m {
                for k in 0..n - m {
                    if !data.a[i][j - m][k].is_zero() {
                        defect.add_term(Monomial::var(n, m + k), data.a[i][j - m][k].neg());
                    }
                }
                if defect.min_degree().map_or(false, |d| d <= through) {
                    return Err(alloc::format!(
                        "x-y bracket ({i}, {j}) deviates from linear within degree {through}"
                    ));
                }
            } else {
                for k in 0..n - m {
                    if !data.b[i - m][j - m][k].is_zero() {
                        defect.add_term(Monomial::var(n, m + k), data.b[i - m][j - m][k].neg());
                    }
                }
                // radical-block tails must have degree >= 2
                if defect.min_degree().map_or(false, |d| d <= 1) {
                    return Err(alloc::format!(
                        "y-y bracket ({i}, {j}) has a tail of degree below 2"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// One row of the convergence diagnostics report.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    /// Step level `l`: 0 for the input table, `t + 1` after step `t`.
    pub level: usize,
    pub window: Option<(u32, u32)>,
    pub function_window_dim: usize,
    pub field_window_dim: usize,
    /// Radius at which the correction norm is measured, and the majorant.
    pub psi_radius: f64,
    pub psi_majorant: f64,
    /// Radius at which the table norm is measured, and the majorant.
    pub pi_radius: f64,
    pub pi_majorant: f64,
    /// The constant that the decay profile would imply at this level.
    pub implied_constant: f64,
    pub micros: Option<u64>,
}

/// Diagnostics over a completed run: majorant surrogates for the norm
/// conditions of the convergence scheme, evaluated at the scaled radii.
/// Purely informational; never fails a run.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rho: f64,
    pub epsilon: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Every correction majorant is below `rho`.
    pub psi_below_rho: bool,
    /// Table majorants do not increase across steps.
    pub pi_nonincreasing: bool,
    /// Implied constants stay within 25 percent of the first level's.
    pub decay_consistent: bool,
}

fn profile_eval(profile: &[f64], radius: f64) -> f64 {
    let mut acc = 0.0;
    let mut pw = 1.0;
    for p in profile {
        acc += p * pw;
        pw *= radius;
    }
    acc
}

fn table_majorant(profiles: &[Vec<f64>], radius: f64) -> f64 {
    profiles
        .iter()
        .map(|p| profile_eval(p, radius))
        .fold(0.0, f64::max)
}

/// Build the diagnostics report from a run log.
pub fn convergence_report<S: Scalar>(
    log: &RunLog<S>,
    rho: f64,
    epsilon: f64,
) -> Result<ConvergenceReport> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let exp = |x: f64| num_traits::Float::exp(x);
    let sqrt = |x: f64| num_traits::Float::sqrt(x);
    let mut rows = Vec::new();

    let pi_radius_at = |level: usize| -> f64 {
        if level == 0 {
            rho
        } else {
            exp(1.0 / level as f64) * rho
        }
    };
    let implied = |level: usize, pi: f64| -> f64 {
        let l = level.max(1) as f64;
        pi / (exp(-1.0 / sqrt(l)) * rho)
    };

    let pi0 = table_majorant(&log.initial_profiles, pi_radius_at(0));
    rows.push(ConvergenceRow {
        level: 0,
        window: None,
        function_window_dim: 0,
        field_window_dim: 0,
        psi_radius: rho,
        psi_majorant: 0.0,
        pi_radius: pi_radius_at(0),
        pi_majorant: pi0,
        implied_constant: implied(0, pi0),
        micros: None,
    });

    for s in &log.steps {
        let level = s.step + 1;
        // Correction norm measured at the level below, per the scheme's
        // norm condition; level 1 has no scaled radius and uses rho.
        let psi_radius = if level >= 2 {
            let lm = (level - 1) as f64;
            exp(1.0 / lm - epsilon / (lm * lm)) * rho
        } else {
            rho
        };
        let psi_majorant = {
            let acc: f64 = s
                .psi_profiles
                .iter()
                .map(|p| {
                    let v = profile_eval(p, psi_radius);
                    v * v
                })
                .sum();
            sqrt(acc)
        };
        let pi_radius = pi_radius_at(level);
        let pi_majorant = table_majorant(&s.table_profiles, pi_radius);
        rows.push(ConvergenceRow {
            level,
            window: Some((s.lo, s.hi)),
            function_window_dim: s.function_window_dim,
            field_window_dim: s.field_window_dim,
            psi_radius,
            psi_majorant,
            pi_radius,
            pi_majorant,
            implied_constant: implied(level, pi_majorant),
            micros: s.micros,
        });
    }

    let psi_below_rho = rows.iter().skip(1).all(|r| r.psi_majorant < rho);
    let pi_nonincreasing = rows.windows(2).all(|w| w[1].pi_majorant <= w[0].pi_majorant + 1e-12);
    let first_c = rows
        .iter()
        .find(|r| r.level >= 1)
        .map(|r| r.implied_constant)
        .unwrap_or(0.0);
    let decay_consistent = rows
        .iter()
        .filter(|r| r.level >= 1)
        .all(|r| r.implied_constant <= first_c * 1.25 + 1e-12);

    Ok(ConvergenceReport {
        rho,
        epsilon,
        rows,
        psi_below_rho,
        pi_nonincreasing,
        decay_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{sl2_data, sl2_k2_data};
    use crate::sample::{random_near_identity, seeded_rng};
    use crate::scalar::Rat;

    fn perturbed_sl2(seed: u64, trunc: u32) -> (PoissonTable<Rat>, PolyMap<Rat>) {
        let linear = PoissonTable::linear(&sl2_data::<Rat>().full_constants(), trunc);
        let mut rng = seeded_rng(seed);
        let phi: PolyMap<Rat> = random_near_identity(&mut rng, 3, 2, 3, 3);
        (linear.pushforward(&phi, trunc).unwrap(), phi)
    }

    #[test]
    fn linear_input_is_a_fixed_point() {
        let data = sl2_data::<Rat>();
        let table = PoissonTable::linear(&data.full_constants(), 4);
        let out = levi_normalize(&table, &data, NormalizeOptions::new(2, 4)).unwrap();
        assert_eq!(out.table, table);
        assert_eq!(out.forward, PolyMap::identity(3));
        assert_eq!(out.inverse, PolyMap::identity(3));
        for s in &out.log.steps {
            assert!(s.psi.components.iter().all(|p| p.is_zero()));
        }
    }

    #[test]
    fn one_step_clears_quadratic_defects() {
        let data = sl2_data::<Rat>();
        let (table, _) = perturbed_sl2(5, 8);
        let state = LeviRunState::new(table, data, NormalizeOptions::new(3, 8)).unwrap();
        let state = state.step().unwrap();
        // after step 0 (window (1,2]) the defects start at degree >= 3
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d = state.xx_defect(i, j);
                assert!(d.min_degree().map_or(true, |deg| deg >= 3));
            }
        }
        // after the second step, degree >= 5
        let state = state.step().unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d = state.xx_defect(i, j);
                assert!(d.min_degree().map_or(true, |deg| deg >= 5));
            }
        }
    }

    #[test]
    fn full_sl2_run_linearizes() {
        let data = sl2_data::<Rat>();
        let (table, _) = perturbed_sl2(7, 8);
        let out = levi_normalize(&table, &data, NormalizeOptions::new(3, 8)).unwrap();
        let linear = PoissonTable::linear(&data.full_constants(), 8);
        assert_eq!(out.table, linear);
        // full-run consistency: pushforward of the input by the accumulated
        // map equals the output
        let repush = table
            .pushforward_with_inverse(&out.forward, &out.inverse, 8)
            .unwrap();
        assert_eq!(repush, out.table);
        // idempotence: normalizing the output gives the identity
        let again = levi_normalize(&out.table, &data, NormalizeOptions::new(3, 8)).unwrap();
        assert_eq!(again.forward, PolyMap::identity(3));
    }

    #[test]
    fn radical_case_reaches_levi_shape() {
        let data = sl2_k2_data::<Rat>();
        let linear = PoissonTable::linear(&data.full_constants(), 4);
        let mut rng = seeded_rng(11);
        let phi: PolyMap<Rat> = random_near_identity(&mut rng, 5, 2, 2, 2);
        let table = linear.pushforward(&phi, 4).unwrap();
        let out = levi_normalize(&table, &data, NormalizeOptions::new(2, 4)).unwrap();
        verify_levi_shape(&out.table, &data, out.normalized_through).unwrap();
        assert!(out.table.check_jacobi().is_ok());
    }

    #[test]
    fn schedule_errors() {
        let data = sl2_data::<Rat>();
        let table = PoissonTable::linear(&data.full_constants(), 4);
        // 3 doubling steps need degree 8 > 4
        assert!(matches!(
            levi_normalize(&table, &data, NormalizeOptions::new(3, 4)),
            Err(Error::ScheduleError(_))
        ));
    }

    #[test]
    fn single_degree_schedule_matches_doubling_result() {
        let data = sl2_data::<Rat>();
        let (table, _) = perturbed_sl2(13, 4);
        let doubling = levi_normalize(&table, &data, NormalizeOptions::new(2, 4)).unwrap();
        let mut opts = NormalizeOptions::new(3, 4);
        opts.schedule = Schedule::SingleDegree;
        let single = levi_normalize(&table, &data, opts).unwrap();
        // both linearize through degree 4
        assert_eq!(doubling.table, single.table);
    }

    #[test]
    fn mismatched_linear_part_rejected() {
        let data = sl2_data::<Rat>();
        let other = PoissonTable::<Rat>::zero(3, 4);
        assert!(LeviRunState::new(other, data, NormalizeOptions::new(1, 4)).is_err());
    }

    #[test]
    fn convergence_report_shapes() {
        let data = sl2_data::<Rat>();
        let (table, _) = perturbed_sl2(17, 8);
        let out = levi_normalize(&table, &data, NormalizeOptions::new(3, 8)).unwrap();
        let report = convergence_report(&out.log, 0.1, 0.1).unwrap();
        assert_eq!(report.rows.len(), 4);
        // linear output: last step's correction is measured, table majorant
        // at small radius is small
        assert!(report.rows[3].pi_majorant.is_finite());
        // linear input produces all-zero psi majorants
        let linear = PoissonTable::linear(&data.full_constants(), 8);
        let out2 = levi_normalize(&linear, &data, NormalizeOptions::new(3, 8)).unwrap();
        let rep2 = convergence_report(&out2.log, 0.1, 0.1).unwrap();
        assert!(rep2.rows.iter().all(|r| r.psi_majorant == 0.0));
        assert!(rep2.psi_below_rho);
    }
}
