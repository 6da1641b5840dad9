//! Constrained maximisation over the eight box parameters.
//!
//! Equalities are eliminated by substitution. The remaining free variables
//! are searched by multi-start Nelder-Mead on an exact L1 penalty, and each
//! local optimum is pulled back onto the feasible set by bisection towards a
//! known feasible anchor. Large constraint pools are handled lazily: only
//! constraints violated by some local optimum join the working set.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::OptError;
use crate::lo;
use crate::ml;
use crate::nsbox::{NSBox, SignPattern};
use crate::poly::{Bindings, CompiledPoly, Polynomial, Var};
use crate::quantum::QuantumPoint;
use crate::scenario::Scenario;

pub const DEFAULT_STARTS: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const CONVERGENCE_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 4000;

const PENALTY_WEIGHTS: [f64; 4] = [10.0, 100.0, 1e3, 1e4];
const MAX_RESTARTS: usize = 6;
const BISECTION_STEPS: usize = 60;
const MAX_LAZY_ROUNDS: usize = 40;
const LAZY_PER_START: usize = 4;

pub const PRESETS: [&str; 9] = [
    "hardy_ns",
    "hardy_ml",
    "hardy_lo2_appendix",
    "hardy_lo2_full",
    "cabello_ns",
    "cabello_ml",
    "cabello_lo2_appendix",
    "cabello_lo2_full",
    "chsh_ml",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    Poly(Polynomial),
    Chsh(SignPattern),
}

impl Objective {
    pub fn eval(&self, x: &[f64; 8]) -> f64 {
        match self {
            Objective::Poly(p) => p.eval(x),
            Objective::Chsh(s) => NSBox::from_array(*x).chsh(*s),
        }
    }
}

/// A constraint `g(box) ≤ 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Constraint {
    Poly(Polynomial),
    /// `|Σ (−1)^{xy} asin D_xy| − π`.
    MlExcess,
}

#[derive(Clone, Debug)]
pub struct OptProblem {
    pub name: String,
    pub objective: Objective,
    /// Eliminated before the search; the free variables are the unbound ones.
    pub equalities: Bindings,
    pub inequalities: Vec<Constraint>,
    /// Polynomial constraints added to the working set only once violated.
    pub lazy: Vec<Polynomial>,
    /// Enforce all 16 table entries ≥ 0. Bounds `[0, 1]` always apply.
    pub positivity: bool,
    pub warm_starts: Vec<NSBox>,
    /// A feasible point used to restore feasibility.
    pub anchor: NSBox,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub starts: usize,
    pub seed: u64,
    pub tol: f64,
    /// Function evaluations per Nelder-Mead run.
    pub max_iters: usize,
}

impl Default for OptConfig {
    fn default() -> OptConfig {
        OptConfig {
            starts: DEFAULT_STARTS,
            seed: 0,
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<(), OptError> {
        if self.starts == 0 {
            return Err(OptError::Config("starts must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(OptError::Config("tolerance must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(OptError::Config("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub preset: String,
    pub value: f64,
    pub point: NSBox,
    /// Largest constraint violation at `point` (0 when strictly feasible).
    pub feasibility: f64,
    pub seed: u64,
    pub starts_used: usize,
    /// Constraints in the final working set.
    pub constraints: usize,
    pub rounds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum_point: Option<QuantumPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl fmt::Display for OptResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {:.6} (feasibility {:.1e}, {} starts, seed {})",
            self.preset, self.value, self.feasibility, self.starts_used, self.seed
        )
    }
}

/// Build a named problem.
pub fn preset(name: &str) -> Result<OptProblem, OptError> {
    let (scenario, principle) = match name {
        "chsh_ml" => return Ok(chsh_ml()),
        _ => name
            .split_once('_')
            .and_then(|(s, p)| Some((s.parse::<Scenario>().ok()?, p)))
            .ok_or_else(|| OptError::UnknownPreset(name.into()))?,
    };
    let mut problem = scenario_problem(name, scenario);
    match principle {
        "ns" => {}
        "ml" => problem.inequalities.push(Constraint::MlExcess),
        "lo2_appendix" => problem.inequalities.extend(
            lo::appendix_constraints(scenario)
                .into_iter()
                .map(Constraint::Poly),
        ),
        "lo2_full" => problem.lazy = lo::full_constraint_set(scenario).polynomials(),
        _ => return Err(OptError::UnknownPreset(name.into())),
    }
    Ok(problem)
}

/// Success of the scenario under its zero constraints and positivity.
pub fn scenario_problem(name: &str, scenario: Scenario) -> OptProblem {
    OptProblem {
        name: name.to_string(),
        objective: Objective::Poly(scenario.objective()),
        equalities: scenario.bindings(),
        inequalities: Vec::new(),
        lazy: Vec::new(),
        positivity: true,
        warm_starts: vec![NSBox::pr_box()],
        anchor: local_anchor(scenario),
    }
}

fn chsh_ml() -> OptProblem {
    OptProblem {
        name: "chsh_ml".into(),
        objective: Objective::Chsh(SignPattern::STANDARD),
        equalities: Bindings::new(),
        inequalities: vec![Constraint::MlExcess],
        lazy: Vec::new(),
        positivity: true,
        warm_starts: Vec::new(),
        anchor: NSBox::uniform_box(),
    }
}

/// Uniform mixture of the deterministic boxes that never produce the
/// scenario's zero events; local, hence inside every LO and ML set.
pub fn local_anchor(scenario: Scenario) -> NSBox {
    let zeros = scenario.zero_events();
    let parts: Vec<(f64, NSBox)> = (0..16)
        .map(NSBox::deterministic_by_index)
        .filter(|b| zeros.iter().all(|e| lo::event_probability(e, b) == 0.0))
        .map(|b| (1.0, b))
        .collect();
    let w = 1.0 / parts.len() as f64;
    let parts: Vec<(f64, NSBox)> = parts.into_iter().map(|(_, b)| (w, b)).collect();
    NSBox::mixture(&parts)
}

enum Check {
    Poly(CompiledPoly),
    Ml,
}

impl Check {
    fn eval(&self, x: &[f64; 8]) -> f64 {
        match self {
            Check::Poly(p) => p.eval(x),
            Check::Ml => ml::ml_excess(&NSBox::from_array(*x)),
        }
    }
}

/// A problem reduced to its free variables.
pub(crate) struct Reduced {
    free: Vec<usize>,
    embed: Vec<(usize, CompiledPoly)>,
    objective: Objective,
    base: Vec<Check>,
    pool: Vec<CompiledPoly>,
    anchor: Vec<f64>,
}

impl Reduced {
    fn new(problem: &OptProblem) -> Result<Reduced, OptError> {
        let resolved = problem
            .equalities
            .resolve()
            .map_err(|e| OptError::Config(e.to_string()))?;
        let bindings = Bindings(resolved.clone());
        let free: Vec<usize> = Var::ALL
            .iter()
            .filter(|v| !resolved.contains_key(v))
            .map(|v| v.index())
            .collect();
        let embed = resolved
            .iter()
            .map(|(v, p)| (v.index(), p.compile()))
            .collect();
        let subst = |p: &Polynomial| {
            p.substitute(&bindings)
                .map_err(|e| OptError::Config(e.to_string()))
        };
        let mut base = Vec::new();
        for v in Var::ALL {
            let x = Polynomial::var(v);
            base.push(Check::Poly(
                subst(&(&x - &Polynomial::constant(1)))?.compile(),
            ));
            base.push(Check::Poly(subst(&-&x)?.compile()));
        }
        if problem.positivity {
            for xy in 0..4u8 {
                for ab in 0..4u8 {
                    let e = lo::entry_poly(ab >> 1, ab & 1, xy >> 1, xy & 1);
                    base.push(Check::Poly(subst(&-&e)?.compile()));
                }
            }
        }
        for c in &problem.inequalities {
            base.push(match c {
                Constraint::Poly(p) => Check::Poly(subst(p)?.compile()),
                Constraint::MlExcess => Check::Ml,
            });
        }
        let pool = problem
            .lazy
            .iter()
            .map(|p| subst(p).map(|q| q.compile()))
            .collect::<Result<_, _>>()?;
        let objective = match &problem.objective {
            Objective::Poly(p) => Objective::Poly(subst(p)?),
            o => o.clone(),
        };
        let a = problem.anchor.to_array();
        let anchor = free.iter().map(|&i| a[i]).collect();
        Ok(Reduced {
            free,
            embed,
            objective,
            base,
            pool,
            anchor,
        })
    }

    fn dim(&self) -> usize {
        self.free.len()
    }

    fn point(&self, z: &[f64]) -> [f64; 8] {
        let mut x = [0.0; 8];
        for (&i, &v) in self.free.iter().zip(z) {
            x[i] = v;
        }
        for (i, p) in &self.embed {
            x[*i] = p.eval(&x);
        }
        x
    }

    fn reduce(&self, b: &NSBox) -> Vec<f64> {
        let a = b.to_array();
        self.free.iter().map(|&i| a[i]).collect()
    }

    /// `Σ max(0, g)` and `max(0, max g)` over the base checks plus `working`.
    fn violation(&self, x: &[f64; 8], working: &[usize]) -> (f64, f64) {
        let mut sum = 0.0;
        let mut max: f64 = 0.0;
        let all = self
            .base
            .iter()
            .map(|c| c.eval(x))
            .chain(working.iter().map(|&k| self.pool[k].eval(x)));
        for g in all {
            if g > 0.0 {
                sum += g;
                max = max.max(g);
            }
        }
        (sum, max)
    }

    fn full_violation(&self, x: &[f64; 8]) -> f64 {
        let base = self.violation(x, &[]).1;
        self.pool.iter().map(|p| p.eval(x)).fold(base, f64::max)
    }

    /// All constraints, pool included, within `tol` at `x`.
    fn feasible(&self, x: &[f64; 8], tol: f64) -> bool {
        self.base.iter().all(|c| c.eval(x) <= tol) && self.pool.iter().all(|p| p.eval(x) <= tol)
    }

    /// The `limit` most violated pool constraints at `x`.
    fn worst_pool(&self, x: &[f64; 8], tol: f64, limit: usize) -> Vec<usize> {
        let mut v: Vec<(f64, usize)> = self
            .pool
            .iter()
            .enumerate()
            .map(|(k, p)| (p.eval(x), k))
            .filter(|(g, _)| *g > tol)
            .collect();
        v.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        v.into_iter().take(limit).map(|(_, k)| k).collect()
    }
}

/// Minimise `f` from `x0` with an axis-aligned initial simplex of size `step`.
pub(crate) fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += if v[i] + step <= 1.0 { step } else { -step };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;
    let mut order: Vec<usize> = (0..=n).collect();
    while evals < max_evals {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        let spread = values[worst] - values[best];
        let diameter = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= tol && diameter <= tol.sqrt() {
            break;
        }
        let mut centroid = vec![0.0; n];
        for &k in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&simplex[k]) {
                *c += v / n as f64;
            }
        }
        let towards = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = towards(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < values[best] {
            let xe = towards(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
        } else if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
        } else {
            let (xc, fc) = if fr < values[worst] {
                let xc = towards(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = towards(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < values[worst].min(fr) {
                simplex[worst] = xc;
                values[worst] = fc;
            } else {
                let xb = simplex[best].clone();
                for k in 0..=n {
                    if k != best {
                        for (v, b) in simplex[k].iter_mut().zip(&xb) {
                            *v = b + 0.5 * (*v - b);
                        }
                        values[k] = f(&simplex[k]);
                    }
                }
                evals += n;
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .expect("nonempty simplex");
    (simplex[best].clone(), values[best])
}

/// Penalised Nelder-Mead with weight escalation and restarts.
pub(crate) fn penalised_search<O, V>(
    objective: &O,
    violation: &V,
    start: &[f64],
    max_evals: usize,
) -> Vec<f64>
where
    O: Fn(&[f64]) -> f64,
    V: Fn(&[f64]) -> f64,
{
    let mut z = start.to_vec();
    for (stage, &mu) in PENALTY_WEIGHTS.iter().enumerate() {
        let f = |v: &[f64]| -objective(v) + mu * violation(v);
        let mut fz = f(&z);
        let mut step = 0.1 / (1 << stage) as f64;
        for _ in 0..MAX_RESTARTS {
            let (z2, f2) = nelder_mead(&f, &z, step, CONVERGENCE_TOL, max_evals);
            let gain = fz - f2;
            if f2 < fz {
                z = z2;
                fz = f2;
            }
            if gain <= CONVERGENCE_TOL {
                break;
            }
            step *= 0.5;
        }
    }
    z
}

/// The point `anchor + t (z − anchor)` for the largest `t ∈ [0, 1]` found
/// feasible by bisection.
pub(crate) fn polish<F: Fn(&[f64]) -> bool>(feasible: &F, anchor: &[f64], z: &[f64]) -> Vec<f64> {
    let at = |t: f64| -> Vec<f64> { anchor.iter().zip(z).map(|(a, b)| a + t * (b - a)).collect() };
    if feasible(z) {
        return z.to_vec();
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if feasible(&at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}

/// `count` points of a Halton sequence in `[0,1]^dim` under a seeded
/// Cranley-Patterson shift.
pub fn start_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    assert!(dim <= PRIMES.len(), "at most {} dimensions", PRIMES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (1..=count as u64)
        .map(|i| {
            PRIMES[..dim]
                .iter()
                .zip(&shift)
                .map(|(&p, s)| (radical_inverse(i, p) + s).fract())
                .collect()
        })
        .collect()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// Order candidates by value, then lexicographically by point.
pub(crate) fn better(a: (f64, &[f64]), b: (f64, &[f64])) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| {
        a.1.iter()
            .zip(b.1)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

struct Candidate {
    point: [f64; 8],
    value: f64,
    violation: f64,
}

pub fn maximize(problem: &OptProblem, config: &OptConfig) -> Result<OptResult, OptError> {
    config.validate()?;
    let r = Reduced::new(problem)?;
    let anchor_violation = r.full_violation(&r.point(&r.anchor));
    if anchor_violation > config.tol {
        return Err(OptError::Config(format!(
            "anchor is infeasible (violation {anchor_violation:.3e})"
        )));
    }
    let mut starts: Vec<Vec<f64>> = problem.warm_starts.iter().map(|b| r.reduce(b)).collect();
    starts.truncate(config.starts);
    starts.extend(start_points(
        r.dim(),
        config.starts - starts.len(),
        config.seed,
    ));

    let mut working: Vec<usize> = Vec::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let raw: Vec<Vec<f64>> = starts
            .par_iter()
            .map(|s| local_search(&r, &working, s, config))
            .collect();
        let mut added: Vec<usize> = Vec::new();
        if !r.pool.is_empty() {
            for z in &raw {
                added.extend(r.worst_pool(&r.point(z), config.tol, LAZY_PER_START));
            }
            added.sort_unstable();
            added.dedup();
            added.retain(|k| !working.contains(k));
        }
        if added.is_empty() || rounds >= MAX_LAZY_ROUNDS {
            let candidates: Vec<Candidate> =
                raw.par_iter().map(|z| restore(&r, z, config.tol)).collect();
            return finish(problem, config, &r, candidates, working.len(), rounds);
        }
        working.extend(added);
        working.sort_unstable();
        starts = raw;
    }
}

fn local_search(r: &Reduced, working: &[usize], start: &[f64], config: &OptConfig) -> Vec<f64> {
    let objective = |z: &[f64]| r.objective.eval(&r.point(z));
    let penalty = |z: &[f64]| r.violation(&r.point(z), working).0;
    penalised_search(&objective, &penalty, start, config.max_iters)
}

fn restore(r: &Reduced, z: &[f64], tol: f64) -> Candidate {
    let feasible = |z: &[f64]| r.feasible(&r.point(z), tol);
    let polished = polish(&feasible, &r.anchor, z);
    let point = r.point(&polished);
    Candidate {
        point,
        value: r.objective.eval(&point),
        violation: r.full_violation(&point),
    }
}

fn finish(
    problem: &OptProblem,
    config: &OptConfig,
    r: &Reduced,
    candidates: Vec<Candidate>,
    constraints: usize,
    rounds: usize,
) -> Result<OptResult, OptError> {
    let best = candidates
        .iter()
        .filter(|c| c.violation <= config.tol)
        .max_by(|a, b| better((a.value, &a.point), (b.value, &b.point)));
    match best {
        Some(c) => Ok(OptResult {
            preset: problem.name.clone(),
            value: c.value,
            point: NSBox::from_array(c.point),
            feasibility: c.violation,
            seed: config.seed,
            starts_used: candidates.len(),
            constraints: r.base.len() + constraints,
            rounds,
            quantum_point: None,
            wall_time_s: None,
        }),
        None => Err(OptError::Infeasible {
            best_violation: candidates
                .iter()
                .map(|c| c.violation)
                .fold(f64::INFINITY, f64::min),
            starts: candidates.len(),
        }),
    }
}

/// Largest violation of the problem's constraints (including the lazy pool
/// and the equalities) at `b`.
pub fn feasibility(problem: &OptProblem, b: &NSBox) -> Result<f64, OptError> {
    let r = Reduced::new(problem)?;
    let x = b.to_array();
    let eq = r
        .embed
        .iter()
        .map(|(i, p)| (x[*i] - p.eval(&x)).abs())
        .fold(0.0, f64::max);
    Ok(r.full_violation(&x).max(eq))
}

pub fn objective_value(problem: &OptProblem, b: &NSBox) -> f64 {
    problem.objective.eval(&b.to_array())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub first: String,
    pub second: String,
    pub first_value: f64,
    pub second_value: f64,
    pub delta: f64,
    pub tol: f64,
    pub agree: bool,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {:.6}, {} = {:.6}, |delta| = {:.2e} {} {:.1e}: {}",
            self.first,
            self.first_value,
            self.second,
            self.second_value,
            self.delta,
            if self.agree { "<=" } else { ">" },
            self.tol,
            if self.agree { "agree" } else { "differ" }
        )
    }
}

pub fn compare(a: &OptResult, b: &OptResult, tol: f64) -> Comparison {
    let delta = (a.value - b.value).abs();
    Comparison {
        first: a.preset.clone(),
        second: b.preset.clone(),
        first_value: a.value,
        second_value: b.value,
        delta,
        tol,
        agree: delta <= tol,
    }
}
