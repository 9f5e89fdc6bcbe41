//! Independent numerical oracle: classical fourth-order Runge-Kutta on the
//! truncated Galerkin system.
//!
//! The oracle shares only the pressure elimination with the series solver.
//! Everything else, the convolution over all pairs including the mean and the
//! time dependence, is recomputed numerically with a fixed step.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::initdata::InitialData;
use crate::lattice::{modes_up_to, split_pairs_with_zero, MultiIndex};
use crate::recursion::CoefficientTable;
use crate::scalar::Scalar;

/// A state may grow by at most this factor over its initial size before the
/// step is rejected. Admissible data decays.
const GROWTH_LIMIT: f64 = 1e3;

type State = Vec<[Complex64; 3]>;

/// `T_{·k}(t)` for every mode of the truncation, pressure included.
#[derive(Clone, Debug, Serialize)]
pub struct OracleTrajectory {
    pub modes: Vec<MultiIndex>,
    pub times: Vec<f64>,
    /// `values[i][n]` is `(T₁, T₂, T₃, T₄)` of `modes[n]` at `times[i]`.
    pub values: Vec<Vec<[Complex64; 4]>>,
}

impl OracleTrajectory {
    pub fn value(&self, time_index: usize, k: &MultiIndex) -> Option<[Complex64; 4]> {
        let n = self.modes.iter().position(|m| m == k)?;
        Some(self.values[time_index][n])
    }
}

struct Galerkin {
    modes: Vec<MultiIndex>,
    /// For each mode, `(index of k¹, index of k², k²)` over all pairs.
    pairs: Vec<Vec<(usize, usize, [f64; 3])>>,
    nu: f64,
    pressure_mean: Complex64,
}

impl Galerkin {
    fn new(init: &InitialData, order: u32) -> Self {
        let modes = modes_up_to(order);
        let index: HashMap<MultiIndex, usize> = modes.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let pairs = modes
            .iter()
            .map(|k| {
                split_pairs_with_zero(k)
                    .into_iter()
                    .map(|(a, b)| (index[&a], index[&b], b.components().map(f64::from)))
                    .collect()
            })
            .collect();
        Galerkin {
            modes,
            pairs,
            nu: init.nu,
            pressure_mean: init.pressure_mean,
        }
    }

    fn initial(&self, init: &InitialData) -> State {
        self.modes
            .iter()
            .map(|k| if k.is_zero() { init.mean } else { init.coeff(k) })
            .collect()
    }

    /// `C_{mk} = Σ_{k¹+k²=k} (Σ_j k²_j T_{j,k¹}) T_{m,k²}` over all pairs.
    fn advection(&self, n: usize, state: &State) -> [Complex64; 3] {
        let mut c = [Complex64::new(0.0, 0.0); 3];
        for (a, b, k2) in &self.pairs[n] {
            let lower = &state[*a];
            let adv = lower[0] * k2[0] + lower[1] * k2[1] + lower[2] * k2[2];
            for m in 0..3 {
                c[m] += adv * state[*b][m];
            }
        }
        c
    }

    fn pressure(&self, k: &MultiIndex, c: &[Complex64; 3]) -> Complex64 {
        if k.is_zero() {
            return self.pressure_mean;
        }
        let kc = k.components().map(f64::from);
        -(kc[0] * c[0] + kc[1] * c[1] + kc[2] * c[2]) / k.norm_sq() as f64
    }

    fn rhs(&self, state: &State) -> State {
        self.modes
            .iter()
            .enumerate()
            .map(|(n, k)| {
                let c = self.advection(n, state);
                let p = self.pressure(k, &c);
                let kc = k.components().map(f64::from);
                let visc = self.nu * k.norm_sq() as f64;
                std::array::from_fn(|m| -Complex64::i() * (c[m] + kc[m] * p) - visc * state[n][m])
            })
            .collect()
    }

    fn with_pressure(&self, state: &State) -> Vec<[Complex64; 4]> {
        self.modes
            .iter()
            .enumerate()
            .map(|(n, k)| {
                let p = self.pressure(k, &self.advection(n, state));
                let v = state[n];
                [v[0], v[1], v[2], p]
            })
            .collect()
    }

    fn step(&self, state: &State, h: f64) -> State {
        let axpy = |x: &State, a: f64, y: &State| -> State {
            x.iter()
                .zip(y)
                .map(|(u, v)| std::array::from_fn(|m| u[m] + a * v[m]))
                .collect()
        };
        let k1 = self.rhs(state);
        let k2 = self.rhs(&axpy(state, h / 2.0, &k1));
        let k3 = self.rhs(&axpy(state, h / 2.0, &k2));
        let k4 = self.rhs(&axpy(state, h, &k3));
        state
            .iter()
            .enumerate()
            .map(|(n, u)| {
                std::array::from_fn(|m| u[m] + h / 6.0 * (k1[n][m] + 2.0 * k2[n][m] + 2.0 * k3[n][m] + k4[n][m]))
            })
            .collect()
    }
}

fn size(state: &State) -> f64 {
    state
        .iter()
        .flat_map(|v| v.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Integrates the Galerkin system on `|k|₁ ≤ order` with step at most `h`
/// and records the state at each requested time.
///
/// Times are visited in increasing order. Each interval between consecutive
/// output times is split into equal steps no longer than `h`, so the output
/// times are hit exactly.
pub fn galerkin_oracle(init: &InitialData, order: u32, t_grid: &[f64], h: f64) -> Result<OracleTrajectory> {
    init.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("step {h} must be positive")));
    }
    if t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput("output times must be finite and nonnegative".into()));
    }
    let system = Galerkin::new(init, order);
    let mut state = system.initial(init);
    let ceiling = GROWTH_LIMIT * size(&state).max(f64::MIN_POSITIVE);

    let mut order_of: Vec<usize> = (0..t_grid.len()).collect();
    order_of.sort_by(|a, b| t_grid[*a].total_cmp(&t_grid[*b]));
    let mut values = vec![Vec::new(); t_grid.len()];
    let mut now = 0.0;
    for i in order_of {
        let target = t_grid[i];
        let span = target - now;
        let steps = (span / h).ceil() as u64;
        if steps > 0 {
            let dt = span / steps as f64;
            for s in 0..steps {
                state = system.step(&state, dt);
                let grown = size(&state);
                if !grown.is_finite() {
                    return Err(Error::StepRejected {
                        t: now + (s + 1) as f64 * dt,
                        reason: "non-finite state".into(),
                    });
                }
                if grown > ceiling {
                    return Err(Error::StepRejected {
                        t: now + (s + 1) as f64 * dt,
                        reason: format!("state grew to {grown:e}"),
                    });
                }
            }
        }
        now = target;
        values[i] = system.with_pressure(&state);
    }
    Ok(OracleTrajectory {
        modes: system.modes,
        times: t_grid.to_vec(),
        values,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    /// `max |oracle − series|` over modes, components and times.
    pub max_abs_diff: f64,
    pub worst: Option<(MultiIndex, f64)>,
    /// Per output time, in the order of the trajectory.
    pub per_time: Vec<(f64, f64)>,
}

/// Compares a solved table with an oracle trajectory on the common modes.
pub fn compare_with_oracle<C: Scalar>(table: &CoefficientTable<C>, oracle: &OracleTrajectory) -> OracleComparison {
    let init = table.init();
    let float = table.to_c64();
    let mut max_abs_diff: f64 = 0.0;
    let mut worst = None;
    let mut per_time = Vec::new();
    for (i, t) in oracle.times.iter().enumerate() {
        let mut at_time: f64 = 0.0;
        for (n, k) in oracle.modes.iter().enumerate() {
            let Some(f) = float.get(k) else { continue };
            for c in 0..4 {
                let diff = (f[c].evaluate(*t, init.nu, &init.mean) - oracle.values[i][n][c]).norm();
                at_time = at_time.max(diff);
                if worst.is_none() || diff > max_abs_diff {
                    max_abs_diff = diff;
                    worst = Some((*k, *t));
                }
            }
        }
        per_time.push((*t, at_time));
    }
    OracleComparison {
        max_abs_diff,
        worst,
        per_time,
    }
}
