//! The coefficient recursion.
//!
//! Substituting `u_j = Σ T_{jk}(t) φ_k`, `p = Σ T_{4k}(t) φ_k` over `k ∈ ℕ³`
//! into the momentum and continuity equations gives, for every `k > 0`,
//!
//! ```text
//! T'_{mk} + Σ_j Σ_{k¹+k²=k} i k²_j T_{j,k¹} T_{m,k²} + ν|k|² T_{mk} + i k_m T_{4k} = 0
//! k·T_k = 0,   T_{jk}(0) = B_{jk}
//! ```
//!
//! Differentiating the constraint eliminates the pressure, and the pairs that
//! involve the origin are the mean-flow advection `i (k·B₀) T_{mk}`, which
//! joins the viscous term in the exponent `−P_k(t) = −(i k·B₀ + ν|k|²) t`. The
//! remaining convolution runs over strict pairs only, which live in lower
//! shells, so the system is solved exactly shell by shell:
//!
//! ```text
//! S_{mk}  = Σ_{k¹,k²>0} (Σ_j k²_j T_{j,k¹}) T_{m,k²}
//! T_{4k}  = −Σ_m k_m S_{mk} / |k|²
//! Q_{mk}  = −i S_{mk} − i k_m T_{4k}
//! T_{mk}  = e^{−P_k t} (∫₀ᵗ Q_{mk} e^{P_k s} ds + B_{mk})
//! ```
//!
//! Every term of every `T_{·k}` carries the phase key `m = k`, so the
//! resonance test in the kernel integral compares only the `ν` multipliers.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exppoly::{ExpKey, ExpPoly, Rates};
use crate::initdata::InitialData;
use crate::lattice::{modes_up_to, reflect, shell_modes, split_pairs, MultiIndex};
use crate::scalar::{Exact, Scalar};

/// Default ceiling on the number of terms in one coefficient function.
pub const DEFAULT_TERM_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub term_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            term_limit: DEFAULT_TERM_LIMIT,
        }
    }
}

/// `(T₁, T₂, T₃, T₄)` for one mode; index 3 is the pressure.
pub type ModeFunctions<C> = [ExpPoly<C>; 4];

/// The exponent key of `e^{−P_k(t)}`: `m = k`, `q = |k|₂²`.
pub fn lambda_key(k: &MultiIndex) -> ExpKey {
    ExpKey::new(*k, k.norm_sq())
}

/// Solved coefficient functions for every `k ∈ ℕ³` with `|k|₁ ≤ order`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable<C = Complex64> {
    order: u32,
    entries: BTreeMap<MultiIndex, ModeFunctions<C>>,
    init: InitialData,
    rates: Rates<C>,
}

impl<C: Scalar> CoefficientTable<C> {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn init(&self) -> &InitialData {
        &self.init
    }

    pub fn rates(&self) -> &Rates<C> {
        &self.rates
    }

    pub fn get(&self, k: &MultiIndex) -> Option<&ModeFunctions<C>> {
        self.entries.get(k)
    }

    #[cfg(test)]
    pub(crate) fn entry_mut(&mut self, k: &MultiIndex) -> Option<&mut ModeFunctions<C>> {
        self.entries.get_mut(k)
    }

    fn lookup(&self, k: &MultiIndex) -> Result<&ModeFunctions<C>> {
        self.entries.get(k).ok_or(Error::TableIncomplete(*k))
    }

    /// Reassembles a table from stored entries, checking that every mode up
    /// to `order` is present.
    pub fn from_entries(init: InitialData, order: u32, entries: BTreeMap<MultiIndex, ModeFunctions<C>>) -> Result<Self> {
        init.validate()?;
        if let Some(k) = modes_up_to(order).into_iter().find(|k| !entries.contains_key(k)) {
            return Err(Error::TableIncomplete(k));
        }
        if let Some(k) = entries.keys().find(|k| k.l1() > order || !k.is_nonneg()) {
            return Err(Error::InvalidInput(format!("mode {k} lies outside the table of order {order}")));
        }
        let rates = Rates::new(init.nu, init.mean);
        Ok(CoefficientTable {
            order,
            entries,
            init,
            rates,
        })
    }

    /// Entries in lexicographic order of `k`.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &ModeFunctions<C>)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `k₁T₁ + k₂T₂ + k₃T₃` for a solved mode.
    pub fn divergence(&self, k: &MultiIndex) -> Result<ExpPoly<C>> {
        let t = self.lookup(k)?;
        let mut out = ExpPoly::zero();
        for (j, kj) in k.components().iter().enumerate() {
            out.add_assign_ref(&t[j].scale_int(*kj as i64));
        }
        Ok(out)
    }

    pub fn to_c64(&self) -> CoefficientTable<Complex64> {
        CoefficientTable {
            order: self.order,
            entries: self
                .entries
                .iter()
                .map(|(k, t)| (*k, [0, 1, 2, 3].map(|i| t[i].to_c64())))
                .collect(),
            init: self.init.clone(),
            rates: Rates::new(self.init.nu, self.init.mean),
        }
    }

    /// Largest term count over all coefficient functions.
    pub fn max_terms(&self) -> usize {
        self.entries
            .values()
            .flat_map(|t| t.iter().map(ExpPoly::len))
            .max()
            .unwrap_or(0)
    }

    /// The same table with shells above `order` dropped.
    pub fn truncated(&self, order: u32) -> CoefficientTable<C> {
        CoefficientTable {
            order: order.min(self.order),
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| k.l1() <= order)
                .map(|(k, t)| (*k, t.clone()))
                .collect(),
            init: self.init.clone(),
            rates: self.rates.clone(),
        }
    }
}

/// `S_{mk} = Σ_{k¹,k²>0} (Σ_j k²_j T_{j,k¹}) T_{m,k²}` for `m = 1, 2, 3`.
pub fn convolution<C: Scalar>(k: &MultiIndex, table: &CoefficientTable<C>) -> Result<[ExpPoly<C>; 3]> {
    let mut sums: [ExpPoly<C>; 3] = Default::default();
    for (first, second) in split_pairs(k)? {
        let lower = table.lookup(&first)?;
        let upper = table.lookup(&second)?;
        let mut advecting = ExpPoly::zero();
        for (j, kj) in second.components().iter().enumerate() {
            if *kj != 0 {
                advecting.add_assign_ref(&lower[j].scale_int(*kj as i64));
            }
        }
        if advecting.is_zero() {
            continue;
        }
        for (m, sum) in sums.iter_mut().enumerate() {
            advecting.mul_add_into(&upper[m], sum);
        }
    }
    Ok(sums)
}

fn pressure_from<C: Scalar>(k: &MultiIndex, conv: &[ExpPoly<C>; 3]) -> ExpPoly<C> {
    let denom = C::from_int(k.norm_sq() as i64);
    let mut out = ExpPoly::zero();
    for (m, km) in k.components().iter().enumerate() {
        if *km != 0 {
            out.add_scaled(&conv[m], &C::from_int(-(*km as i64)).divide(&denom));
        }
    }
    out
}

fn forcing_from<C: Scalar>(m: usize, k: &MultiIndex, conv: &[ExpPoly<C>; 3], pressure: &ExpPoly<C>) -> ExpPoly<C> {
    let mut inner = conv[m].clone();
    inner.add_assign_ref(&pressure.scale_int(k.get(m) as i64));
    inner.scale(&C::imag_unit().negated())
}

/// `T_{4k} = −Σ_m k_m S_{mk} / |k|²` for `k > 0`.
pub fn compute_t4<C: Scalar>(k: &MultiIndex, table: &CoefficientTable<C>) -> Result<ExpPoly<C>> {
    if !k.is_positive() {
        return Err(Error::InvalidInput(format!(
            "the pressure at {k} is not given by the recursion; the mean is the constant a"
        )));
    }
    Ok(pressure_from(k, &convolution(k, table)?))
}

/// `Q_{mk} = −i S_{mk} − i k_m T_{4k}`, `m` zero-based.
///
/// Uses the table's `T_{4k}` when the mode is already solved.
pub fn compute_q<C: Scalar>(m: usize, k: &MultiIndex, table: &CoefficientTable<C>) -> Result<ExpPoly<C>> {
    if m > 2 {
        return Err(Error::InvalidInput(format!("component index {} out of range", m + 1)));
    }
    let conv = convolution(k, table)?;
    let pressure = match table.get(k) {
        Some(t) => t[3].clone(),
        None => pressure_from(k, &conv),
    };
    Ok(forcing_from(m, k, &conv, &pressure))
}

/// `T_{jk} = e^{−P_k t}(∫₀ᵗ Q_{jk} e^{P_k s} ds + B_{jk})`, `j` zero-based.
pub fn compute_t<C: Scalar>(j: usize, k: &MultiIndex, table: &CoefficientTable<C>, b_jk: Complex64) -> Result<ExpPoly<C>> {
    let q = compute_q(j, k, table)?;
    Ok(q.integrate_with_kernel(&lambda_key(k), &C::from_c64(b_jk), table.rates()))
}

fn solve_mode<C: Scalar>(k: &MultiIndex, table: &CoefficientTable<C>, opts: &SolveOptions) -> Result<ModeFunctions<C>> {
    let conv = convolution(k, table)?;
    let pressure = pressure_from(k, &conv);
    let b = table.init.coeff(k);
    let kernel = lambda_key(k);
    let velocity: [ExpPoly<C>; 3] = std::array::from_fn(|m| {
        forcing_from(m, k, &conv, &pressure).integrate_with_kernel(&kernel, &C::from_c64(b[m]), table.rates())
    });
    let [t1, t2, t3] = velocity;
    let out = [t1, t2, t3, pressure];
    for f in &out {
        if f.len() > opts.term_limit {
            return Err(Error::TermLimit {
                mode: *k,
                terms: f.len(),
                limit: opts.term_limit,
            });
        }
        if !f.all_finite() {
            return Err(Error::NonFinite(*k));
        }
    }
    Ok(out)
}

/// Solves in floating point.
pub fn solve(init: &InitialData, order: u32) -> Result<CoefficientTable<Complex64>> {
    solve_with(init, order, &SolveOptions::default())
}

/// Solves over the complex rationals; every identity holds exactly.
pub fn solve_exact(init: &InitialData, order: u32) -> Result<CoefficientTable<Exact>> {
    solve_with(init, order, &SolveOptions::default())
}

/// Fills shells `0..=order` in turn. Modes within a shell are independent and
/// are computed in parallel on the current rayon pool; the result does not
/// depend on the number of threads.
pub fn solve_with<C: Scalar>(init: &InitialData, order: u32, opts: &SolveOptions) -> Result<CoefficientTable<C>> {
    init.validate()?;
    let div = init.check_divergence();
    if !div.pass {
        return Err(Error::Divergence {
            mode: div.worst_mode.unwrap_or_default(),
            residual: div.max_residual,
        });
    }
    let mut table = CoefficientTable {
        order: 0,
        entries: BTreeMap::new(),
        init: init.clone(),
        rates: Rates::new(init.nu, init.mean),
    };
    let origin = [
        ExpPoly::constant(C::from_c64(init.mean[0])),
        ExpPoly::constant(C::from_c64(init.mean[1])),
        ExpPoly::constant(C::from_c64(init.mean[2])),
        ExpPoly::constant(C::from_c64(init.pressure_mean)),
    ];
    table.entries.insert(MultiIndex::ZERO, origin);

    for n in 1..=order {
        let modes = shell_modes(n);
        let solved: Vec<Result<ModeFunctions<C>>> = modes.par_iter().map(|k| solve_mode(k, &table, opts)).collect();
        for (k, entry) in modes.into_iter().zip(solved) {
            table.entries.insert(k, entry?);
        }
        table.order = n;
    }
    Ok(table)
}

/// Values of every coefficient function at one time.
#[derive(Clone, Debug)]
pub struct FieldSnapshot {
    pub t: f64,
    pub octant_signs: [f64; 3],
    pub modes: Vec<(MultiIndex, [Complex64; 4])>,
}

impl FieldSnapshot {
    pub fn new<C: Scalar>(table: &CoefficientTable<C>, t: f64) -> Self {
        let init = table.init();
        let modes = modes_up_to(table.order())
            .into_iter()
            .map(|k| {
                let f = &table.entries[&k];
                let values = [0, 1, 2, 3].map(|i| f[i].evaluate(t, init.nu, &init.mean));
                // physical frequency of this ℕ³ mode
                (reflect(&k, &init.octant), values)
            })
            .collect();
        FieldSnapshot {
            t,
            octant_signs: [0, 1, 2].map(|j| init.octant.sign(j)),
            modes,
        }
    }

    /// `(u₁, u₂, u₃, p)` at `x` in physical coordinates.
    pub fn at(&self, x: [f64; 3]) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (k, values) in &self.modes {
            let phase = k.k1 as f64 * x[0] + k.k2 as f64 * x[1] + k.k3 as f64 * x[2];
            let basis = Complex64::from_polar(1.0, phase);
            for (slot, v) in out.iter_mut().zip(values) {
                *slot += v * basis;
            }
        }
        for j in 0..3 {
            out[j] *= self.octant_signs[j];
        }
        out
    }
}

/// `(u₁, u₂, u₃, p)(x, t) = Σ_{|k|₁ ≤ N} T_{·k}(t) φ_k(x)` in physical coordinates.
pub fn evaluate_fields<C: Scalar>(table: &CoefficientTable<C>, x: [f64; 3], t: f64) -> [Complex64; 4] {
    FieldSnapshot::new(table, t).at(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initdata::random_admissible;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(a: i32, b: i32, cc: i32) -> MultiIndex {
        MultiIndex::new(a, b, cc)
    }

    fn single_mode(eps: f64) -> InitialData {
        let mut d = InitialData::new(1.0).unwrap();
        d.add_coeff(1, mi(1, 0, 0), c(eps, 0.0)).unwrap();
        d
    }

    #[test]
    fn lambda_key_examples() {
        assert_eq!(lambda_key(&mi(1, 0, 0)), ExpKey::new(mi(1, 0, 0), 1));
        assert_eq!(lambda_key(&mi(1, 1, 0)), ExpKey::new(mi(1, 1, 0), 2));
        assert!(lambda_key(&MultiIndex::ZERO).is_zero());
    }

    #[test]
    fn zero_data_gives_constants_only() {
        let mut d = InitialData::new(1.0).unwrap();
        d.mean = [c(0.5, 0.0), c(-1.0, 0.0), c(0.0, 0.0)];
        d.pressure_mean = c(2.0, 0.0);
        let table = solve(&d, 4).unwrap();
        assert_eq!(table.len(), 35);
        for (k, t) in table.iter() {
            if k.is_zero() {
                assert_eq!(t[0], ExpPoly::constant(c(0.5, 0.0)));
                assert_eq!(t[2], ExpPoly::zero());
                assert_eq!(t[3], ExpPoly::constant(c(2.0, 0.0)));
            } else {
                assert!(t.iter().all(ExpPoly::is_zero), "{k}");
            }
        }
        let f = evaluate_fields(&table, [0.3, 1.0, -2.0], 0.7);
        assert_eq!(f, [c(0.5, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn single_mode_is_pure_heat_decay() {
        let eps = 1e-3;
        let table = solve_exact(&single_mode(eps), 4).unwrap();
        let nonconstant: Vec<_> = table
            .iter()
            .filter(|(k, t)| !k.is_zero() && t.iter().any(|f| !f.is_zero()))
            .map(|(k, _)| *k)
            .collect();
        assert_eq!(nonconstant, vec![mi(1, 0, 0)]);
        let t = &table.get(&mi(1, 0, 0)).unwrap()[1];
        assert_eq!(*t, ExpPoly::monomial(lambda_key(&mi(1, 0, 0)), 0, Exact::from_f64(eps)));
        let f = t.to_c64();
        assert!((f.evaluate(1.0, 1.0, &[c(0.0, 0.0); 3]) - c(eps * (-1f64).exp(), 0.0)).norm() < 1e-18);
    }

    #[test]
    fn single_mode_components() {
        let table = solve_exact(&single_mode(0.25), 3).unwrap();
        let k2 = mi(2, 0, 0);
        for m in 0..3 {
            assert!(compute_q(m, &k2, &table).unwrap().is_zero());
        }
        assert!(compute_t4(&k2, &table).unwrap().is_zero());
        // k = (1,0,0) has no strict split: Q reduces to the pressure term, which is zero
        let k1 = mi(1, 0, 0);
        assert!(compute_q(0, &k1, &table).unwrap().is_zero());
        assert!(compute_t4(&k1, &table).unwrap().is_zero());
        assert!(compute_t4(&MultiIndex::ZERO, &table).is_err());
    }

    #[test]
    fn crossed_modes_resonate() {
        // u = (0, ε e^{i x₁}, δ e^{i x₂}): the product is already solenoidal at (1,1,0)
        // and its exponent equals that of the (1,1,0) kernel.
        let (eps, delta) = (0.5, 0.25);
        let mut d = InitialData::new(1.0).unwrap();
        d.add_coeff(1, mi(1, 0, 0), c(eps, 0.0)).unwrap();
        d.add_coeff(2, mi(0, 1, 0), c(delta, 0.0)).unwrap();
        let table = solve_exact(&d, 2).unwrap();
        let k = mi(1, 1, 0);
        let t = table.get(&k).unwrap();
        assert!(t[3].is_zero());
        let expected = ExpPoly::monomial(lambda_key(&k), 1, Exact::from_c64(c(0.0, -eps * delta)));
        assert_eq!(t[2], expected);
    }

    #[test]
    fn crossed_modes_of_gradient_type_cancel() {
        // u = (δ e^{i x₂}, ε e^{i x₁}, 0): u·∇u is a gradient, absorbed by the pressure.
        let (eps, delta) = (1e-4, 1e-4);
        let mut d = InitialData::new(1.0).unwrap();
        d.add_coeff(1, mi(1, 0, 0), c(eps, 0.0)).unwrap();
        d.add_coeff(0, mi(0, 1, 0), c(delta, 0.0)).unwrap();
        let table = solve_exact(&d, 2).unwrap();
        let k = mi(1, 1, 0);
        let t = table.get(&k).unwrap();
        let expected_p = ExpPoly::monomial(ExpKey::new(k, 2), 0, Exact::from_f64(eps).times(&Exact::from_f64(-delta)));
        assert_eq!(t[3], expected_p);
        assert!(t[0].is_zero() && t[1].is_zero() && t[2].is_zero());
    }

    #[test]
    fn incomplete_table_is_reported() {
        let table = solve(&random_admissible(0, 2, 1.0), 1).unwrap();
        assert!(matches!(compute_t4(&mi(1, 1, 1), &table), Err(Error::TableIncomplete(_))));
        assert!(compute_t4(&mi(1, 1, 0), &table).is_ok());
    }

    #[test]
    fn solver_rejects_divergent_data() {
        let mut d = InitialData::new(1.0).unwrap();
        d.add_coeff(0, mi(1, 0, 0), c(1.0, 0.0)).unwrap();
        assert!(matches!(solve(&d, 2), Err(Error::Divergence { .. })));
    }

    #[test]
    fn term_limit_aborts() {
        let opts = SolveOptions { term_limit: 2 };
        let r = solve_with::<Complex64>(&random_admissible(1, 3, 1.0), 4, &opts);
        assert!(matches!(r, Err(Error::TermLimit { limit: 2, .. })));
    }

    #[test]
    fn exact_table_is_divergence_free_and_matches_formulas() {
        let d = random_admissible(11, 2, 1.0);
        let table = solve_exact(&d, 4).unwrap();
        for (k, t) in table.iter() {
            if k.is_zero() {
                continue;
            }
            assert!(table.divergence(k).unwrap().is_zero(), "{k}");
            let lower = table.truncated(k.l1() - 1);
            assert_eq!(compute_t4(k, &lower).unwrap(), t[3]);
            for j in 0..3 {
                assert_eq!(compute_t(j, k, &lower, d.coeff(k)[j]).unwrap(), t[j]);
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let d = random_admissible(4, 3, 1.0);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| solve(&d, 5).unwrap());
        let b = four.install(|| solve(&d, 5).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn fields_reproduce_data_and_are_periodic() {
        let d = random_admissible(9, 2, 1.0);
        let table = solve(&d, 2).unwrap();
        let x = [0.4, -1.1, 2.5];
        let f0 = evaluate_fields(&table, x, 0.0);
        for j in 0..3 {
            let mut direct = d.mean[j];
            for (k, b) in &d.coeffs {
                let ph = k.k1 as f64 * x[0] + k.k2 as f64 * x[1] + k.k3 as f64 * x[2];
                direct += b[j] * Complex64::from_polar(1.0, ph);
            }
            assert!((f0[j] - direct).norm() < 1e-12);
        }
        let tau = 2.0 * std::f64::consts::PI;
        for shift in [[tau, 0.0, 0.0], [0.0, tau, 0.0], [0.0, 0.0, tau]] {
            let y = [x[0] + shift[0], x[1] + shift[1], x[2] + shift[2]];
            let f = evaluate_fields(&table, y, 0.8);
            let g = evaluate_fields(&table, x, 0.8);
            for i in 0..4 {
                assert!((f[i] - g[i]).norm() < 1e-12);
            }
        }
    }
}
