//! Momentum and continuity residuals of a solved table.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::exppoly::ExpPoly;
use crate::lattice::{modes_up_to, reflect, shell_modes, split_pairs_with_zero, MultiIndex};
use crate::recursion::CoefficientTable;
use crate::scalar::Scalar;

/// Per-mode momentum residual, rebuilt from the raw Fourier-projected system
/// rather than from the closed-form solution formulas:
///
/// `R_{mk} = T'_{mk} + Σ_j Σ_{k¹+k²=k} i k²_j T_{j,k¹} T_{m,k²} + ν|k|² T_{mk} + i k_m T_{4k}`
///
/// The convolution runs over all pairs in ℕ³, the origin included, so the
/// mean-flow advection enters here as an ordinary product.
pub fn mode_residual<C: Scalar>(table: &CoefficientTable<C>, k: &MultiIndex) -> Option<[ExpPoly<C>; 3]> {
    let entry = table.get(k)?;
    let rates = table.rates();
    let mut out: [ExpPoly<C>; 3] = std::array::from_fn(|m| entry[m].derivative(rates));
    let viscous = rates.nu.scale_int(k.norm_sq() as i64);
    let i = C::imag_unit();
    for (first, second) in split_pairs_with_zero(k) {
        let (lower, upper) = (table.get(&first)?, table.get(&second)?);
        let mut advecting = ExpPoly::zero();
        for (j, kj) in second.components().iter().enumerate() {
            if *kj != 0 {
                advecting.add_scaled(&lower[j], &i.scale_int(*kj as i64));
            }
        }
        for (m, slot) in out.iter_mut().enumerate() {
            advecting.mul_add_into(&upper[m], slot);
        }
    }
    for (m, slot) in out.iter_mut().enumerate() {
        slot.add_scaled(&entry[m], &viscous);
        let km = k.get(m);
        if km != 0 {
            slot.add_scaled(&entry[3], &i.scale_int(km as i64));
        }
    }
    Some(out)
}

/// Whether every in-band momentum and continuity residual is the empty
/// exponential polynomial. Meaningful as an exact statement for exact tables.
pub fn symbolic_residual_vanishes<C: Scalar>(table: &CoefficientTable<C>) -> bool {
    modes_up_to(table.order()).iter().all(|k| {
        let momentum = mode_residual(table, k).map(|r| r.iter().all(ExpPoly::is_zero));
        let continuity = table.divergence(k).map(|d| d.is_zero());
        momentum == Some(true) && matches!(continuity, Ok(true))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Largest modulus of a momentum or continuity residual for `|k|₁ ≤ N`,
    /// evaluated at the probe times.
    pub in_band_max: f64,
    /// Largest nonlinear coefficient created at `N < |k|₁ ≤ 2N`.
    pub out_of_band_max: f64,
    /// Largest pointwise residual of the truncated series at the probes.
    pub sample_point_max: f64,
    /// The in-band residual is symbolically zero.
    pub in_band_symbolic_zero: bool,
}

/// Full residual report at the given probe times and points; every point is
/// probed at every time.
pub fn residual<C: Scalar>(table: &CoefficientTable<C>, probe_times: &[f64], probe_points: &[[f64; 3]]) -> ResidualReport {
    let init = table.init();
    let mut in_band_max: f64 = 0.0;
    let mut symbolic_zero = true;
    let mut in_band_polys = Vec::new();
    for k in modes_up_to(table.order()) {
        let mut polys: Vec<ExpPoly<C>> = mode_residual(table, &k).map(Vec::from).unwrap_or_default();
        polys.extend(table.divergence(&k).ok());
        symbolic_zero &= polys.iter().all(ExpPoly::is_zero);
        in_band_polys.extend(polys.into_iter().filter(|p| !p.is_zero()).map(|p| p.to_c64()));
    }
    for t in probe_times {
        for p in &in_band_polys {
            in_band_max = in_band_max.max(p.evaluate(*t, init.nu, &init.mean).norm());
        }
    }

    let float = table.to_c64();
    let mut out_of_band_max: f64 = 0.0;
    let mut sample_point_max: f64 = 0.0;
    for t in probe_times {
        let values = ModeValues::new(&float, *t);
        out_of_band_max = out_of_band_max.max(values.out_of_band_max());
        for x in probe_points {
            sample_point_max = sample_point_max.max(values.pointwise_residual(*x));
        }
    }
    ResidualReport {
        in_band_max,
        out_of_band_max,
        sample_point_max,
        in_band_symbolic_zero: symbolic_zero,
    }
}

/// Pointwise residual `max(|∂_t u + (u·∇)u − νΔu + ∇p|, |∇·u|)` of the
/// truncated series at `(x, t)`, derivatives taken spectrally.
pub fn pointwise_residual(table: &CoefficientTable<Complex64>, x: [f64; 3], t: f64) -> f64 {
    ModeValues::new(table, t).pointwise_residual(x)
}

/// Values of `T_{·k}(t)` and `T'_{·k}(t)` in the ℕ³ frame.
struct ModeValues {
    order: u32,
    nu: f64,
    octant_signs: [f64; 3],
    octant: crate::lattice::Octant,
    modes: Vec<(MultiIndex, [Complex64; 4], [Complex64; 3])>,
    index: HashMap<MultiIndex, usize>,
}

impl ModeValues {
    fn new(table: &CoefficientTable<Complex64>, t: f64) -> Self {
        let init = table.init();
        let rates = table.rates();
        let modes = modes_up_to(table.order())
            .into_iter()
            .map(|k| {
                let f = table.get(&k).expect("complete table");
                let value = [0, 1, 2, 3].map(|i| f[i].evaluate(t, init.nu, &init.mean));
                let rate = [0, 1, 2].map(|i| f[i].derivative(rates).evaluate(t, init.nu, &init.mean));
                (k, value, rate)
            })
            .collect::<Vec<_>>();
        let index = modes.iter().enumerate().map(|(i, m)| (m.0, i)).collect();
        ModeValues {
            order: table.order(),
            nu: init.nu,
            octant_signs: [0, 1, 2].map(|j| init.octant.sign(j)),
            octant: init.octant,
            modes,
            index,
        }
    }

    fn index(&self, k: &MultiIndex) -> Option<usize> {
        self.index.get(k).copied()
    }

    /// Largest `|Σ_j Σ_{k¹+k²=k} i k²_j T_{j,k¹} T_{m,k²}|` over `N < |k|₁ ≤ 2N`.
    fn out_of_band_max(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in self.order + 1..=2 * self.order {
            for k in shell_modes(n) {
                let mut conv = [Complex64::new(0.0, 0.0); 3];
                for (first, second) in split_pairs_with_zero(&k) {
                    let (Some(a), Some(b)) = (self.index(&first), self.index(&second)) else {
                        continue;
                    };
                    let lower = &self.modes[a].1;
                    let upper = &self.modes[b].1;
                    let adv: Complex64 = (0..3).map(|j| lower[j] * second.get(j) as f64).sum();
                    for m in 0..3 {
                        conv[m] += Complex64::i() * adv * upper[m];
                    }
                }
                worst = conv.iter().map(|z| z.norm()).fold(worst, f64::max);
            }
        }
        worst
    }

    fn pointwise_residual(&self, x: [f64; 3]) -> f64 {
        let zero = Complex64::new(0.0, 0.0);
        let mut u = [zero; 3];
        let mut du_dt = [zero; 3];
        let mut grad = [[zero; 3]; 3]; // grad[j][m] = ∂_m u_j
        let mut laplacian = [zero; 3];
        let mut grad_p = [zero; 3];
        for (k, value, rate) in &self.modes {
            let kp = reflect(k, &self.octant);
            let kc = kp.components().map(f64::from);
            let phase = kc[0] * x[0] + kc[1] * x[1] + kc[2] * x[2];
            let basis = Complex64::from_polar(1.0, phase);
            let ksq = kp.norm_sq() as f64;
            for j in 0..3 {
                let coeff = value[j] * self.octant_signs[j] * basis;
                u[j] += coeff;
                du_dt[j] += rate[j] * self.octant_signs[j] * basis;
                for m in 0..3 {
                    grad[j][m] += Complex64::i() * kc[m] * coeff;
                }
                laplacian[j] -= ksq * coeff;
                grad_p[j] += Complex64::i() * kc[j] * value[3] * basis;
            }
        }
        let mut worst: f64 = 0.0;
        for j in 0..3 {
            let advection: Complex64 = (0..3).map(|m| u[m] * grad[j][m]).sum();
            let r = du_dt[j] + advection - self.nu * laplacian[j] + grad_p[j];
            worst = worst.max(r.norm());
        }
        let divergence: Complex64 = (0..3).map(|j| grad[j][j]).sum();
        worst.max(divergence.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initdata::{random_admissible, InitialData};
    use crate::recursion::{solve, solve_exact};

    #[test]
    fn zero_data_has_zero_residual() {
        let d = InitialData::new(1.0).unwrap();
        let table = solve(&d, 3).unwrap();
        let r = residual(&table, &[0.0, 1.0], &[[0.1, 0.2, 0.3]]);
        assert_eq!(
            r,
            ResidualReport {
                in_band_max: 0.0,
                out_of_band_max: 0.0,
                sample_point_max: 0.0,
                in_band_symbolic_zero: true
            }
        );
    }

    #[test]
    fn single_mode_residual() {
        let mut d = InitialData::new(1.0).unwrap();
        d.add_coeff(1, MultiIndex::new(1, 0, 0), Complex64::new(1e-3, 0.0)).unwrap();
        let table = solve_exact(&d, 3).unwrap();
        let r = residual(&table, &[0.0, 0.5, 2.0], &[[0.3, -0.2, 1.7], [2.0, 2.0, 2.0]]);
        assert!(r.in_band_symbolic_zero);
        assert!(r.in_band_max <= 1e-12);
        assert_eq!(r.out_of_band_max, 0.0);
        assert!(r.sample_point_max <= 1e-15);
    }

    #[test]
    fn exact_residual_vanishes_with_mean_flow() {
        let d = random_admissible(21, 2, 1.0);
        assert!(d.mean.iter().any(|b| b.re != 0.0));
        let table = solve_exact(&d, 4).unwrap();
        assert!(symbolic_residual_vanishes(&table));
    }

    #[test]
    fn corrupted_table_is_caught() {
        let d = random_admissible(3, 2, 1.0);
        let mut table = solve_exact(&d, 3).unwrap();
        assert!(symbolic_residual_vanishes(&table));
        let k = MultiIndex::new(1, 1, 0);
        let bump = crate::exppoly::ExpPoly::monomial(
            crate::recursion::lambda_key(&k),
            1,
            crate::scalar::Exact::from_f64(1e-9),
        );
        table.entry_mut(&k).unwrap()[2].add_assign_ref(&bump);
        assert!(!symbolic_residual_vanishes(&table));
        assert!(mode_residual(&table, &k).unwrap()[2].len() > 0);
    }

    #[test]
    fn float_residual_is_tiny_in_band() {
        let table = solve(&random_admissible(8, 3, 1.0), 5).unwrap();
        let r = residual(&table, &[0.0, 0.5, 1.0], &[[0.1, 0.2, 0.3], [4.0, -1.0, 2.5]]);
        assert!(r.in_band_max < 1e-15, "{}", r.in_band_max);
        assert!(r.out_of_band_max > 0.0);
        assert!(r.sample_point_max >= 0.0);
    }
}
