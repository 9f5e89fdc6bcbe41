//! Conjugation symmetry: the complex conjugate of a solution solves the
//! problem with conjugated data on the opposite octant.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::initdata::InitialData;
use crate::recursion::{solve_with, CoefficientTable, FieldSnapshot, SolveOptions};
use crate::scalar::Scalar;

/// Probe times are drawn from `[0, PROBE_T_MAX)`.
pub const PROBE_T_MAX: f64 = 2.0;
pub const PROBE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugateReport {
    /// Largest coefficient of `T''_{jk} + conj T_{jk}` and `T''_{4k} − conj T_{4k}`.
    pub symbolic_max_diff: f64,
    pub symbolic_equal: bool,
    /// Largest `|field''(x,t) − conj field(x,t)|` over the probes.
    pub probe_max_diff: f64,
    pub probes: usize,
    pub pass: bool,
}

/// Largest coefficient of the mismatch between the table of the conjugated
/// problem and the prediction from the original table, in the ℕ³ frame:
/// velocity functions negate-conjugate, pressure functions conjugate.
pub fn symbolic_mismatch<C: Scalar>(original: &CoefficientTable<C>, conjugated: &CoefficientTable<C>) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, f) in original.iter() {
        let Some(g) = conjugated.get(k) else {
            return f64::INFINITY;
        };
        for c in 0..4 {
            let predicted = if c < 3 { -&f[c].conjugate_map() } else { f[c].conjugate_map() };
            let diff: ExpPoly<C> = &g[c] - &predicted;
            worst = worst.max(diff.max_abs_coeff());
        }
    }
    worst
}

/// Solves `init` and its conjugate to `order` and compares them symbolically
/// and at `probes` seeded random points `(x, t)`.
pub fn conjugate_check(init: &InitialData, order: u32, probes: usize, seed: u64) -> Result<ConjugateReport> {
    conjugate_check_with::<Complex64>(init, order, probes, seed)
}

/// As [`conjugate_check`] with the solver running over `C`.
pub fn conjugate_check_with<C: Scalar>(init: &InitialData, order: u32, probes: usize, seed: u64) -> Result<ConjugateReport> {
    if !init.mean_is_real() {
        return Err(Error::Hypothesis("conjugation symmetry needs a real mean".into()));
    }
    let opts = SolveOptions::default();
    let original: CoefficientTable<C> = solve_with(init, order, &opts)?;
    let conjugated: CoefficientTable<C> = solve_with(&init.conjugated(), order, &opts)?;
    let symbolic_max_diff = symbolic_mismatch(&original, &conjugated);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let mut probe_max_diff: f64 = 0.0;
    for _ in 0..probes {
        let x: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..tau));
        let t = rng.gen_range(0.0..PROBE_T_MAX);
        let a = FieldSnapshot::new(&original, t).at(x);
        let b = FieldSnapshot::new(&conjugated, t).at(x);
        for c in 0..4 {
            probe_max_diff = probe_max_diff.max((b[c] - a[c].conj()).norm());
        }
    }
    Ok(ConjugateReport {
        symbolic_max_diff,
        symbolic_equal: symbolic_max_diff == 0.0,
        probe_max_diff,
        probes,
        pass: probe_max_diff <= PROBE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initdata::random_admissible;
    use crate::lattice::MultiIndex;
    use crate::scalar::Exact;

    #[test]
    fn zero_data_is_trivially_symmetric() {
        let r = conjugate_check(&InitialData::new(1.0).unwrap(), 3, 10, 0).unwrap();
        assert_eq!(r.probe_max_diff, 0.0);
        assert!(r.symbolic_equal && r.pass);
    }

    #[test]
    fn imaginary_single_mode() {
        let mut d = InitialData::new(1.0).unwrap();
        d.add_coeff(2, MultiIndex::new(1, 1, 0), Complex64::new(0.0, 1e-4)).unwrap();
        let r = conjugate_check(&d, 4, 20, 1).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn random_data_exact_and_float() {
        let d = random_admissible(5, 2, 1.0);
        let exact = conjugate_check_with::<Exact>(&d, 4, 10, 2).unwrap();
        assert!(exact.symbolic_equal && exact.pass, "{exact:?}");
        let float = conjugate_check(&d, 5, 50, 3).unwrap();
        assert!(float.pass, "{float:?}");
    }

    #[test]
    fn complex_mean_is_rejected() {
        let d = InitialData::new(1.0)
            .unwrap()
            .with_mean([Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(matches!(conjugate_check(&d, 2, 1, 0), Err(Error::Hypothesis(_))));
    }
}
