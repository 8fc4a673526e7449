//! Discrete teaching-learning-based optimization engine.
//!
//! Each individual is a triad `(X, Y, Z)`: a real vector `X` evolved by the
//! teacher and learner moves, the binary solution `Y = binarize(X)`, and the
//! companion vector `Z` produced by the repair operator. Every candidate `Y`
//! is repaired before it is stored, so the population holds feasible
//! solutions at all times, and each repair-plus-evaluation charges one unit
//! of the evaluation budget.
//!
//! One iteration runs the teacher phase (everyone moves toward the teacher,
//! one evaluation each, greedy acceptance), the learner phase (pairwise
//! moves, likewise), one elite opposite search (the teacher's bitwise
//! complement, repaired; replaces the teacher only when strictly better) and
//! one survival-of-the-fittest step (the worst individual is replaced by a
//! fresh random one). The budget is checked after every single evaluation,
//! so a run overshoots `mfc` by at most the evaluation in flight.
//!
//! All randomness comes from one seeded ChaCha stream; identical
//! `(instance, params)` inputs reproduce identical results bit for bit.

use crate::eval::{
    build_density_table, is_feasible_elements, is_feasible_items, DensityTable, ElementSolution,
    ItemSolution,
};
use crate::instance::SukpInstance;
use crate::repair::{esro, isro, static_greedy_repair, RepairOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Which objects the binary vector `Y` loads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    Item,
    Element,
}

/// Which repair operator backs the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepairKind {
    /// ISRO in item mode, ESRO in element mode.
    SelfAdjusting,
    /// Static AVDI ranking; item mode only.
    StaticGreedy,
}

/// Teaching-factor rule for the teacher phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfRule {
    /// `1 + round(rand(0,1))`: uniform on {1, 2}.
    RoundRandom,
    /// A fixed factor, mainly for tests.
    Fixed(u8),
}

/// Engine parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DtlboParams {
    pub popsize: usize,
    /// Evaluation budget; `None` means `20 + 20 * max(m, n)`.
    pub mfc: Option<usize>,
    pub mode: LoadMode,
    pub seed: u64,
    pub tf_rule: TfRule,
    pub repair: RepairKind,
    pub use_eos: bool,
    pub use_sf: bool,
}

impl DtlboParams {
    pub fn new(mode: LoadMode, seed: u64) -> Self {
        DtlboParams {
            popsize: 20,
            mfc: None,
            mode,
            seed,
            tf_rule: TfRule::RoundRandom,
            repair: RepairKind::SelfAdjusting,
            use_eos: true,
            use_sf: true,
        }
    }

    /// The default evaluation budget for an instance.
    pub fn default_mfc(inst: &SukpInstance) -> usize {
        20 + 20 * inst.item_count().max(inst.element_count())
    }

    pub fn resolved_mfc(&self, inst: &SukpInstance) -> usize {
        self.mfc.unwrap_or_else(|| Self::default_mfc(inst))
    }
}

/// One population member.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub x: Vec<f64>,
    pub y: Vec<bool>,
    pub z: Vec<bool>,
    pub fitness: f64,
}

/// Outcome of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Individual,
    pub evaluations_used: usize,
    /// `(evaluation index, best-so-far fitness)` at every improvement.
    pub history: Vec<(usize, f64)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum DtlboError {
    #[error("population size must be at least 2, got {0}")]
    PopsizeTooSmall(usize),
    #[error("evaluation budget {mfc} is below the population size {popsize}")]
    BudgetTooSmall { mfc: usize, popsize: usize },
    #[error("static repair only applies to item loading")]
    StaticElementRepair,
}

/// Binary vector from a real vector: strictly positive coordinates map to 1.
pub fn binarize(x: &[f64]) -> Vec<bool> {
    x.iter().map(|&v| v > 0.0).collect()
}

/// Real vector consistent with a binary vector: coordinates land in (0, 1)
/// where the bit is set and in (-1, 0) where it is not, so
/// `binarize(refresh_real(y)) == y` always.
pub fn refresh_real<R: Rng>(y: &[bool], rng: &mut R) -> Vec<f64> {
    y.iter()
        .map(|&bit| {
            let u = unit_open(rng);
            if bit {
                u
            } else {
                u - 1.0
            }
        })
        .collect()
}

/// Uniform draw from (0, 1); the zero edge of the generator is resampled so
/// the sign construction above never produces a zero coordinate.
fn unit_open<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// Uniform draw from (-1, 0) union (0, 1).
fn signed_open<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let v: f64 = rng.gen_range(-1.0..1.0);
        if v != 0.0 && v != -1.0 {
            return v;
        }
    }
}

/// The teacher-phase displacement with an explicit scalar:
/// `x + r * (x_teacher - tf * x_mean)` elementwise.
pub fn teacher_step(x: &[f64], x_teacher: &[f64], x_mean: &[f64], tf: f64, r: f64) -> Vec<f64> {
    assert_eq!(x.len(), x_teacher.len(), "teacher vector length");
    assert_eq!(x.len(), x_mean.len(), "mean vector length");
    x.iter()
        .zip(x_teacher)
        .zip(x_mean)
        .map(|((&xi, &xt), &xm)| xi + r * (xt - tf * xm))
        .collect()
}

/// The teacher-phase move: one scalar `rand(0,1)` draw applied to all
/// coordinates.
pub fn teacher_move<R: Rng>(
    x: &[f64],
    x_teacher: &[f64],
    x_mean: &[f64],
    tf: u8,
    rng: &mut R,
) -> Vec<f64> {
    let r: f64 = rng.gen();
    teacher_step(x, x_teacher, x_mean, tf as f64, r)
}

/// The learner-phase displacement with an explicit scalar: away from the
/// partner when `away`, toward it otherwise.
pub fn learner_step(x_i: &[f64], x_k: &[f64], away: bool, r: f64) -> Vec<f64> {
    assert_eq!(x_i.len(), x_k.len(), "partner vector length");
    x_i.iter()
        .zip(x_k)
        .map(|(&xi, &xk)| {
            if away {
                xi + r * (xi - xk)
            } else {
                xi + r * (xk - xi)
            }
        })
        .collect()
}

/// The learner-phase move: away from the partner when the mover is strictly
/// fitter, toward it otherwise (ties move toward).
pub fn learner_move<R: Rng>(
    x_i: &[f64],
    fit_i: f64,
    x_k: &[f64],
    fit_k: f64,
    rng: &mut R,
) -> Vec<f64> {
    let r: f64 = rng.gen();
    learner_step(x_i, x_k, fit_i > fit_k, r)
}

/// Instance, density table, and operator choice bundled for repair dispatch.
pub struct RepairEnv<'a> {
    pub inst: &'a SukpInstance,
    pub table: &'a DensityTable,
    pub mode: LoadMode,
    pub kind: RepairKind,
}

impl RepairEnv<'_> {
    /// Length of the binary solution vector in this mode.
    pub fn dim(&self) -> usize {
        match self.mode {
            LoadMode::Item => self.inst.item_count(),
            LoadMode::Element => self.inst.element_count(),
        }
    }

    fn repair(&self, bits: Vec<bool>) -> RepairOutcome {
        match (self.mode, self.kind) {
            (LoadMode::Item, RepairKind::SelfAdjusting) => {
                isro(self.inst, self.table, &ItemSolution::new(bits))
            }
            (LoadMode::Item, RepairKind::StaticGreedy) => {
                static_greedy_repair(self.inst, self.table, &ItemSolution::new(bits))
            }
            (LoadMode::Element, RepairKind::SelfAdjusting) => {
                esro(self.inst, self.table, &ElementSolution::new(bits))
            }
            (LoadMode::Element, RepairKind::StaticGreedy) => {
                unreachable!("rejected by parameter validation")
            }
        }
        .expect("engine-built candidates have the right length")
    }

    /// Repairs a candidate, refreshes its real vector, and packs the triad.
    fn make_individual<R: Rng>(&self, bits: Vec<bool>, rng: &mut R) -> Individual {
        let out = self.repair(bits);
        let x = refresh_real(&out.solution, rng);
        debug_assert_eq!(binarize(&x), out.solution);
        debug_assert!(match self.mode {
            LoadMode::Item => {
                is_feasible_items(self.inst, &ItemSolution::new(out.solution.clone()))
            }
            LoadMode::Element => {
                is_feasible_elements(self.inst, &ElementSolution::new(out.solution.clone()))
            }
        });
        Individual {
            x,
            y: out.solution,
            z: out.derived,
            fitness: out.objective,
        }
    }
}

/// Fittest index, ties toward the lower index.
fn fittest_index(population: &[Individual]) -> usize {
    let mut best = 0;
    for (i, ind) in population.iter().enumerate().skip(1) {
        if ind.fitness > population[best].fitness {
            best = i;
        }
    }
    best
}

/// Worst index, ties toward the higher index.
fn worst_index(population: &[Individual]) -> usize {
    let mut worst = 0;
    for (i, ind) in population.iter().enumerate().skip(1) {
        if ind.fitness <= population[worst].fitness {
            worst = i;
        }
    }
    worst
}

/// Elite opposite search: repair the bitwise complement of the teacher's
/// solution and replace the teacher iff strictly fitter. Charges one
/// evaluation; returns whether the teacher was replaced.
pub fn elite_opposite_search<R: Rng>(
    env: &RepairEnv<'_>,
    population: &mut [Individual],
    teacher_idx: usize,
    rng: &mut R,
    evaluations: &mut usize,
) -> bool {
    let flipped: Vec<bool> = population[teacher_idx].y.iter().map(|&b| !b).collect();
    let candidate = env.make_individual(flipped, rng);
    *evaluations += 1;
    if candidate.fitness > population[teacher_idx].fitness {
        population[teacher_idx] = candidate;
        true
    } else {
        false
    }
}

/// Survival of the fittest: replace the worst individual (ties toward the
/// higher index) with a fresh random one. Charges one evaluation; returns
/// the replaced index.
pub fn survival_of_fittest<R: Rng>(
    env: &RepairEnv<'_>,
    population: &mut [Individual],
    rng: &mut R,
    evaluations: &mut usize,
) -> usize {
    let worst = worst_index(population);
    let x0: Vec<f64> = (0..env.dim()).map(|_| signed_open(rng)).collect();
    let candidate = env.make_individual(binarize(&x0), rng);
    *evaluations += 1;
    population[worst] = candidate;
    worst
}

/// Runs the engine on an instance.
pub fn run(inst: &SukpInstance, params: &DtlboParams) -> Result<RunResult, DtlboError> {
    if params.popsize < 2 {
        return Err(DtlboError::PopsizeTooSmall(params.popsize));
    }
    let mfc = params.resolved_mfc(inst);
    if mfc < params.popsize {
        return Err(DtlboError::BudgetTooSmall {
            mfc,
            popsize: params.popsize,
        });
    }
    if params.mode == LoadMode::Element && params.repair == RepairKind::StaticGreedy {
        return Err(DtlboError::StaticElementRepair);
    }

    let table = build_density_table(inst);
    let env = RepairEnv {
        inst,
        table: &table,
        mode: params.mode,
        kind: params.repair,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let popsize = params.popsize;
    let mut evaluations = 0usize;
    let mut history: Vec<(usize, f64)> = Vec::new();
    let mut best: Option<Individual> = None;

    fn note_best(
        best: &mut Option<Individual>,
        history: &mut Vec<(usize, f64)>,
        evaluations: usize,
        candidate: &Individual,
    ) {
        let improved = best.as_ref().is_none_or(|b| candidate.fitness > b.fitness);
        if improved {
            *best = Some(candidate.clone());
            history.push((evaluations, candidate.fitness));
        }
    }

    let mut population: Vec<Individual> = Vec::with_capacity(popsize);
    for _ in 0..popsize {
        let x0: Vec<f64> = (0..env.dim()).map(|_| signed_open(&mut rng)).collect();
        let ind = env.make_individual(binarize(&x0), &mut rng);
        evaluations += 1;
        note_best(&mut best, &mut history, evaluations, &ind);
        population.push(ind);
    }
    let mut teacher = fittest_index(&population);

    'budget: while evaluations <= mfc {
        // Teacher phase. The mean includes the teacher and is held fixed for
        // the whole phase.
        let dim = env.dim();
        let mut x_mean = vec![0.0; dim];
        for ind in &population {
            for (m, &v) in x_mean.iter_mut().zip(&ind.x) {
                *m += v;
            }
        }
        for v in x_mean.iter_mut() {
            *v /= popsize as f64;
        }
        for i in 0..popsize {
            let tf = match params.tf_rule {
                TfRule::RoundRandom => 1 + rng.gen::<f64>().round() as u8,
                TfRule::Fixed(v) => v,
            };
            let moved = teacher_move(
                &population[i].x,
                &population[teacher].x,
                &x_mean,
                tf,
                &mut rng,
            );
            let candidate = env.make_individual(binarize(&moved), &mut rng);
            evaluations += 1;
            note_best(&mut best, &mut history, evaluations, &candidate);
            if candidate.fitness > population[i].fitness {
                population[i] = candidate;
            }
            if evaluations > mfc {
                break 'budget;
            }
        }

        // Learner phase: a fresh uniform partner per move.
        for i in 0..popsize {
            let mut partner = rng.gen_range(0..popsize - 1);
            if partner >= i {
                partner += 1;
            }
            let moved = learner_move(
                &population[i].x,
                population[i].fitness,
                &population[partner].x,
                population[partner].fitness,
                &mut rng,
            );
            let candidate = env.make_individual(binarize(&moved), &mut rng);
            evaluations += 1;
            note_best(&mut best, &mut history, evaluations, &candidate);
            if candidate.fitness > population[i].fitness {
                population[i] = candidate;
            }
            if evaluations > mfc {
                break 'budget;
            }
        }

        if params.use_eos {
            elite_opposite_search(&env, &mut population, teacher, &mut rng, &mut evaluations);
            note_best(&mut best, &mut history, evaluations, &population[teacher]);
            if evaluations > mfc {
                break 'budget;
            }
        }

        if params.use_sf {
            let replaced = survival_of_fittest(&env, &mut population, &mut rng, &mut evaluations);
            note_best(&mut best, &mut history, evaluations, &population[replaced]);
            if evaluations > mfc {
                break 'budget;
            }
        }

        teacher = fittest_index(&population);
    }

    Ok(RunResult {
        best: best.expect("population is nonempty"),
        evaluations_used: evaluations,
        history,
    })
}
