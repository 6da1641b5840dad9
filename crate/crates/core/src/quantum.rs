//! Two-qubit quantum references for the Hardy and Cabello arguments.
//!
//! Pure states and projective measurements are searched with the shared
//! penalised multi-start optimiser; the zero conditions are then enforced by
//! a minimal-norm Gauss-Newton projection on the offending amplitudes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::OptError;
use crate::graph::Event;
use crate::nsbox::NSBox;
use crate::optimize::{self, OptConfig, OptResult};
use crate::scenario::Scenario;

/// Largest probability tolerated on a zero event.
pub const ZERO_TOL: f64 = 1e-8;

const PROJECTION_STEPS: usize = 50;
const FD_STEP: f64 = 1e-7;
/// Candidates refined on the feasible manifold.
const REFINED: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    /// Amplitudes on `|ab⟩`, indexed `2a + b`.
    pub amplitudes: [Complex64; 4],
}

impl TwoQubitState {
    pub fn new(amplitudes: [Complex64; 4]) -> TwoQubitState {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        TwoQubitState {
            amplitudes: amplitudes.map(|a| a / norm),
        }
    }

    /// Hyperspherical magnitudes `(α1, α2, α3)` and relative phases
    /// `(φ1, φ2, φ3)` of amplitudes 1 to 3.
    pub fn from_angles(p: &[f64; 6]) -> TwoQubitState {
        let (s1, c1) = p[0].sin_cos();
        let (s2, c2) = p[1].sin_cos();
        let (s3, c3) = p[2].sin_cos();
        let r = [c1, s1 * c2, s1 * s2 * c3, s1 * s2 * s3];
        TwoQubitState {
            amplitudes: [
                Complex64::new(r[0], 0.0),
                Complex64::from_polar(r[1], p[3]),
                Complex64::from_polar(r[2], p[4]),
                Complex64::from_polar(r[3], p[5]),
            ],
        }
    }

    /// `(cos t_A |0⟩ + e^{i p_A} sin t_A |1⟩) ⊗ (cos t_B |0⟩ + e^{i p_B} sin t_B |1⟩)`.
    pub fn product(p: &[f64; 4]) -> TwoQubitState {
        let a = [
            Complex64::new(p[0].cos(), 0.0),
            Complex64::from_polar(p[0].sin(), p[1]),
        ];
        let b = [
            Complex64::new(p[2].cos(), 0.0),
            Complex64::from_polar(p[2].sin(), p[3]),
        ];
        TwoQubitState {
            amplitudes: [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn with_global_phase(&self, phase: f64) -> TwoQubitState {
        let g = Complex64::from_polar(1.0, phase);
        TwoQubitState {
            amplitudes: self.amplitudes.map(|a| a * g),
        }
    }
}

/// Outcome 0 projects onto `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitMeasurement {
    pub theta: f64,
    pub phi: f64,
}

impl QubitMeasurement {
    pub fn new(theta: f64, phi: f64) -> QubitMeasurement {
        QubitMeasurement { theta, phi }
    }

    /// The eigenvector for `outcome`.
    pub fn vector(&self, outcome: usize) -> [Complex64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        match outcome {
            0 => [Complex64::new(c, 0.0), e * s],
            _ => [Complex64::new(-s, 0.0), e * c],
        }
    }

    /// `|v⟩⟨v|` for `outcome`, row-major.
    pub fn projector(&self, outcome: usize) -> [[Complex64; 2]; 2] {
        let v = self.vector(outcome);
        [
            [v[0] * v[0].conj(), v[0] * v[1].conj()],
            [v[1] * v[0].conj(), v[1] * v[1].conj()],
        ]
    }
}

/// Measurements `[A0, A1, B0, B1]`.
pub type Settings = [QubitMeasurement; 4];

/// `⟨u_a^x ⊗ v_b^y | ψ⟩`.
pub fn amplitude(
    state: &TwoQubitState,
    m: &Settings,
    a: usize,
    b: usize,
    x: usize,
    y: usize,
) -> Complex64 {
    let u = m[x].vector(a);
    let v = m[2 + y].vector(b);
    let mut s = Complex64::new(0.0, 0.0);
    for (i, ui) in u.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            s += (ui * vj).conj() * state.amplitudes[2 * i + j];
        }
    }
    s
}

pub fn born_probability(
    state: &TwoQubitState,
    m: &Settings,
    a: usize,
    b: usize,
    x: usize,
    y: usize,
) -> f64 {
    amplitude(state, m, a, b, x, y).norm_sqr()
}

/// The box `P(ab|xy) = |⟨u_a^x ⊗ v_b^y|ψ⟩|²` in table parameters.
pub fn born_box(state: &TwoQubitState, m: &Settings) -> NSBox {
    let p = |a, b, x, y| born_probability(state, m, a, b, x, y);
    NSBox {
        m0: p(0, 0, 0, 0) + p(0, 1, 0, 0),
        m1: p(0, 0, 1, 0) + p(0, 1, 1, 0),
        n0: p(0, 0, 0, 0) + p(1, 0, 0, 0),
        n1: p(0, 0, 0, 1) + p(1, 0, 0, 1),
        c1: p(0, 0, 0, 0),
        c2: p(0, 0, 0, 1),
        c3: p(0, 0, 1, 0),
        c4: p(0, 0, 1, 1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFamily {
    /// All pure two-qubit states.
    Entangled,
    /// Product states only.
    Product,
}

impl StateFamily {
    fn dim(self) -> usize {
        match self {
            StateFamily::Entangled => 6,
            StateFamily::Product => 4,
        }
    }

    fn state(self, p: &[f64]) -> TwoQubitState {
        match self {
            StateFamily::Entangled => {
                TwoQubitState::from_angles(&p[..6].try_into().expect("6 angles"))
            }
            StateFamily::Product => TwoQubitState::product(&p[..4].try_into().expect("4 angles")),
        }
    }
}

/// The optimiser's coordinates: state parameters then `(θ, φ)` per
/// measurement.
fn decode(family: StateFamily, p: &[f64]) -> (TwoQubitState, Settings) {
    let k = family.dim();
    let m = |i: usize| QubitMeasurement::new(p[k + 2 * i], p[k + 2 * i + 1]);
    (family.state(p), [m(0), m(1), m(2), m(3)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumPoint {
    pub family: StateFamily,
    pub state: TwoQubitState,
    /// `[A0, A1, B0, B1]`.
    pub measurements: Settings,
    /// Largest probability among the zero events.
    pub zero_residual: f64,
}

fn zero_amplitudes(zeros: &[Event], state: &TwoQubitState, m: &Settings) -> Vec<Complex64> {
    zeros
        .iter()
        .map(|e| {
            let r = e.copies()[0];
            amplitude(
                state,
                m,
                r.a as usize,
                r.b as usize,
                r.x as usize,
                r.y as usize,
            )
        })
        .collect()
}

/// Gauss-Newton with a pseudo-inverse step on the real and imaginary parts
/// of the zero-event amplitudes.
fn project(family: StateFamily, zeros: &[Event], p: &[f64]) -> Vec<f64> {
    let residual = |p: &[f64]| -> DVector<f64> {
        let (s, m) = decode(family, p);
        let amps = zero_amplitudes(zeros, &s, &m);
        DVector::from_iterator(2 * amps.len(), amps.iter().flat_map(|a| [a.re, a.im]))
    };
    let mut p = p.to_vec();
    let mut r = residual(&p);
    for _ in 0..PROJECTION_STEPS {
        if r.norm() < 1e-15 {
            break;
        }
        let mut j = DMatrix::zeros(r.len(), p.len());
        for k in 0..p.len() {
            let mut q = p.clone();
            q[k] += FD_STEP;
            let mut q2 = p.clone();
            q2[k] -= FD_STEP;
            j.set_column(k, &((residual(&q) - residual(&q2)) / (2.0 * FD_STEP)));
        }
        let step = match j.svd(true, true).solve(&r, 1e-12) {
            Ok(s) => s,
            Err(_) => break,
        };
        let next: Vec<f64> = p.iter().zip(step.iter()).map(|(a, d)| a - d).collect();
        let rn = residual(&next);
        if rn.norm() >= r.norm() {
            break;
        }
        p = next;
        r = rn;
    }
    p
}

/// Maximise the scenario's success over two-qubit pure states and
/// projective measurements, subject to its zero events.
pub fn max_quantum(
    scenario: Scenario,
    family: StateFamily,
    config: &OptConfig,
) -> Result<OptResult, OptError> {
    config.validate()?;
    let zeros: Vec<Event> = scenario.zero_events();
    let dim = family.dim() + 8;
    let objective = |p: &[f64]| {
        let (s, m) = decode(family, p);
        scenario.success(&born_box(&s, &m))
    };
    let penalty = |p: &[f64]| {
        let (s, m) = decode(family, p);
        zero_amplitudes(&zeros, &s, &m)
            .iter()
            .map(|a| a.norm())
            .sum::<f64>()
    };
    let starts: Vec<Vec<f64>> = optimize::start_points(dim, config.starts, config.seed)
        .into_iter()
        .map(|u| u.iter().map(|v| v * std::f64::consts::TAU).collect())
        .collect();
    let candidates: Vec<(f64, Vec<f64>, f64)> = starts
        .par_iter()
        .map(|s| {
            let z = optimize::penalised_search(&objective, &penalty, s, config.max_iters);
            let z = project(family, &zeros, &z);
            let (st, m) = decode(family, &z);
            let residual = zero_amplitudes(&zeros, &st, &m)
                .iter()
                .map(|a| a.norm_sqr())
                .fold(0.0, f64::max);
            (objective(&z), z, residual)
        })
        .collect();
    let mut ranked: Vec<&(f64, Vec<f64>, f64)> =
        candidates.iter().filter(|c| c.2 <= ZERO_TOL).collect();
    ranked.sort_by(|a, b| optimize::better((b.0, &b.1), (a.0, &a.1)));
    let projected = |p: &[f64]| -> (f64, Vec<f64>, f64) {
        let z = project(family, &zeros, p);
        let (st, m) = decode(family, &z);
        let residual = zero_amplitudes(&zeros, &st, &m)
            .iter()
            .map(|a| a.norm_sqr())
            .fold(0.0, f64::max);
        (objective(&z), z, residual)
    };
    let refined: Vec<(f64, Vec<f64>, f64)> = ranked
        .par_iter()
        .take(REFINED)
        .map(|c| {
            let f = |p: &[f64]| {
                let (v, _, r) = projected(p);
                if r <= ZERO_TOL {
                    -v
                } else {
                    f64::INFINITY
                }
            };
            let (z, _) = optimize::nelder_mead(
                &f,
                &c.1,
                0.05,
                optimize::CONVERGENCE_TOL,
                20 * config.max_iters,
            );
            let out = projected(&z);
            if out.2 <= ZERO_TOL && out.0 >= c.0 {
                out
            } else {
                (*c).clone()
            }
        })
        .collect();
    let best = refined
        .iter()
        .max_by(|a, b| optimize::better((a.0, &a.1), (b.0, &b.1)));
    let Some((value, z, residual)) = best else {
        return Err(OptError::Infeasible {
            best_violation: candidates.iter().map(|c| c.2).fold(f64::INFINITY, f64::min),
            starts: candidates.len(),
        });
    };
    let (state, measurements) = decode(family, z);
    let suffix = match family {
        StateFamily::Entangled => "",
        StateFamily::Product => "_product",
    };
    Ok(OptResult {
        preset: format!("{scenario}_quantum{suffix}"),
        value: *value,
        point: born_box(&state, &measurements),
        feasibility: *residual,
        seed: config.seed,
        starts_used: candidates.len(),
        constraints: zeros.len(),
        rounds: 1,
        quantum_point: Some(QuantumPoint {
            family,
            state,
            measurements,
            zero_residual: *residual,
        }),
        wall_time_s: None,
    })
}

pub fn max_quantum_hardy(config: &OptConfig) -> Result<OptResult, OptError> {
    max_quantum(Scenario::Hardy, StateFamily::Entangled, config)
}

pub fn max_quantum_cabello(config: &OptConfig) -> Result<OptResult, OptError> {
    max_quantum(Scenario::Cabello, StateFamily::Entangled, config)
}
