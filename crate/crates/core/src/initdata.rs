//! Initial data: construction, admissibility checks, octant decomposition.
//!
//! An [`InitialData`] is always an ℕ³ problem. When it came from another
//! octant `∧_{a,b,c}` it carries that octant, and its coefficients are the
//! reflected ones: with `R = diag(a, b, c)`, the physical field is
//! `u(x, t) = R·v(Rx, t)`, `p(x, t) = q(Rx, t)` where `(v, q)` solves the ℕ³
//! problem. Reflections `x ↦ Rx` map solutions of the incompressible
//! Navier-Stokes system to solutions when the velocity is flipped by the same
//! signs, so the ℕ³ solver covers all eight octants.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{ln_tree_weight, modes_up_to, reflect, MultiIndex, Octant};

pub type Vec3 = [Complex64; 3];

const ZERO3: Vec3 = [Complex64::new(0.0, 0.0); 3];

/// Relative tolerance of the divergence check.
pub const DIVERGENCE_TOL: f64 = 1e-12;

/// Initial data of an ℕ³ problem (possibly a reflected octant problem).
#[derive(Clone, Debug, PartialEq)]
pub struct InitialData {
    pub nu: f64,
    pub octant: Octant,
    /// Mean velocity `B_{j,(0,0,0)}`.
    pub mean: Vec3,
    /// Pressure mean `a`; any constant is a valid gauge.
    pub pressure_mean: Complex64,
    /// `B_{jk}` for `k > 0`, in ℕ³ coordinates.
    pub coeffs: BTreeMap<MultiIndex, Vec3>,
}

impl InitialData {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidInput(format!("viscosity must be positive, got {nu}")));
        }
        Ok(InitialData {
            nu,
            octant: Octant::POSITIVE,
            mean: ZERO3,
            pressure_mean: Complex64::new(0.0, 0.0),
            coeffs: BTreeMap::new(),
        })
    }

    /// Adds `value` to `B_{j,k}` (`j` zero-based). `k = 0` adds to the mean.
    pub fn add_coeff(&mut self, j: usize, k: MultiIndex, value: Complex64) -> Result<()> {
        if j > 2 {
            return Err(Error::InvalidInput(format!("component index {} out of range", j + 1)));
        }
        if !k.is_nonneg() {
            return Err(Error::InvalidInput(format!("mode {k} is not in ℕ³")));
        }
        if k.is_zero() {
            self.mean[j] += value;
        } else {
            self.coeffs.entry(k).or_insert(ZERO3)[j] += value;
        }
        Ok(())
    }

    pub fn with_mean(mut self, mean: Vec3) -> Self {
        self.mean = mean;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn coeff(&self, k: &MultiIndex) -> Vec3 {
        if k.is_zero() {
            self.mean
        } else {
            self.coeffs.get(k).copied().unwrap_or(ZERO3)
        }
    }

    pub fn max_shell(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::l1).max().unwrap_or(0)
    }

    pub fn mean_is_real(&self) -> bool {
        self.mean.iter().all(|b| b.im == 0.0)
    }

    /// Structural validity: positive finite viscosity, keys in ℕ³ \ {0},
    /// finite values.
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidInput(format!("viscosity must be positive, got {}", self.nu)));
        }
        for (k, b) in &self.coeffs {
            if !k.is_positive() {
                return Err(Error::InvalidInput(format!("coefficient key {k} is not in ℕ³ \\ {{0}}")));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(*k));
            }
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !self.mean.iter().all(finite) || !finite(&self.pressure_mean) {
            return Err(Error::NonFinite(MultiIndex::ZERO));
        }
        Ok(())
    }

    pub fn check_divergence(&self) -> DivergenceReport {
        check_divergence(self.coeffs.iter())
    }

    pub fn check_smallness(&self) -> SmallnessReport {
        check_smallness(self.coeffs.iter())
    }

    /// Data of the problem solved by the complex conjugate of this one.
    ///
    /// Conjugation sends `φ_k` to `φ_{−k}`, so the conjugated problem lives on
    /// the opposite octant. Re-expressed in that octant's ℕ³ frame the
    /// velocity coefficients become `−conj(B)` and the pressure mean `conj(a)`.
    pub fn conjugated(&self) -> InitialData {
        let neg_conj = |v: &Vec3| v.map(|z| -z.conj());
        InitialData {
            nu: self.nu,
            octant: self.octant.opposite(),
            mean: neg_conj(&self.mean),
            pressure_mean: self.pressure_mean.conj(),
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, neg_conj(v))).collect(),
        }
    }

    /// Coefficients in physical coordinates: `A_{R k} = R·B_k`, mean included.
    pub fn physical_coeffs(&self) -> BTreeMap<MultiIndex, Vec3> {
        let flip = |v: &Vec3| {
            let mut out = *v;
            for (j, z) in out.iter_mut().enumerate() {
                *z *= self.octant.sign(j);
            }
            out
        };
        let mut out = BTreeMap::new();
        if self.mean != ZERO3 {
            out.insert(MultiIndex::ZERO, flip(&self.mean));
        }
        for (k, v) in &self.coeffs {
            out.insert(reflect(k, &self.octant), flip(v));
        }
        out
    }
}

/// Coefficients on the whole lattice ℤ³, the mean included at `k = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FullLatticeData {
    pub nu: f64,
    /// The data claim to come from a real-valued field.
    pub real: bool,
    pub coeffs: BTreeMap<MultiIndex, Vec3>,
}

impl FullLatticeData {
    pub fn new(nu: f64) -> Self {
        FullLatticeData {
            nu,
            real: false,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add_coeff(&mut self, j: usize, k: MultiIndex, value: Complex64) -> Result<()> {
        if j > 2 {
            return Err(Error::InvalidInput(format!("component index {} out of range", j + 1)));
        }
        self.coeffs.entry(k).or_insert(ZERO3)[j] += value;
        Ok(())
    }

    pub fn coeff(&self, k: &MultiIndex) -> Vec3 {
        self.coeffs.get(k).copied().unwrap_or(ZERO3)
    }

    pub fn check_divergence(&self) -> DivergenceReport {
        check_divergence(self.coeffs.iter())
    }

    /// Largest `|A_{j,−k} − conj(A_{jk})|` over the support.
    pub fn reality_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|(k, a)| {
                let b = self.coeff(&-*k);
                (0..3).map(move |j| (b[j] - a[j].conj()).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Drops coefficients whose components are all below `tol` in modulus.
    pub fn pruned(mut self, tol: f64) -> Self {
        self.coeffs.retain(|_, v| v.iter().any(|z| z.norm() > tol));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceReport {
    /// `max_k |Σ_j B_{jk} k_j|`.
    pub max_residual: f64,
    /// `max |B_{jk}|`, the scale of the relative test.
    pub max_coeff: f64,
    pub worst_mode: Option<MultiIndex>,
    pub pass: bool,
}

pub fn check_divergence<'a>(coeffs: impl IntoIterator<Item = (&'a MultiIndex, &'a Vec3)>) -> DivergenceReport {
    let mut max_residual = 0.0;
    let mut max_coeff: f64 = 0.0;
    let mut worst_mode = None;
    for (k, b) in coeffs {
        let kc = k.components();
        let residual: Complex64 = (0..3).map(|j| b[j] * kc[j] as f64).sum();
        let r = residual.norm();
        if r > max_residual {
            max_residual = r;
            worst_mode = Some(*k);
        }
        max_coeff = b.iter().map(|z| z.norm()).fold(max_coeff, f64::max);
    }
    DivergenceReport {
        max_residual,
        max_coeff,
        worst_mode,
        pass: max_residual <= DIVERGENCE_TOL * max_coeff,
    }
}

/// `e^{−|k|}/10³ · Π_{k_j>0} k_j^{k_j−1}/k_j!`, the largest admissible `|B_{jk}|`.
pub fn smallness_threshold(k: &MultiIndex) -> f64 {
    (ln_tree_weight(k) - k.l1() as f64).exp() / 1e3
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeMargin {
    pub k: MultiIndex,
    pub threshold: f64,
    pub max_abs: f64,
    /// `threshold / max_abs`; infinite for a zero coefficient.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmallnessReport {
    pub modes: Vec<ModeMargin>,
    /// Smallest per-mode margin (`f64::INFINITY` for zero data).
    #[serde(serialize_with = "crate::io::serialize_float")]
    pub min_margin: f64,
    pub pass: bool,
}

pub fn check_smallness<'a>(coeffs: impl IntoIterator<Item = (&'a MultiIndex, &'a Vec3)>) -> SmallnessReport {
    let mut modes = Vec::new();
    let mut pass = true;
    for (k, b) in coeffs {
        if k.is_zero() {
            continue;
        }
        let threshold = smallness_threshold(k);
        let max_abs = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        pass &= b.iter().all(|z| z.norm() <= threshold);
        let margin = if max_abs == 0.0 { f64::INFINITY } else { threshold / max_abs };
        modes.push(ModeMargin {
            k: *k,
            threshold,
            max_abs,
            margin,
        });
    }
    let min_margin = modes.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min);
    SmallnessReport { modes, min_margin, pass }
}

/// Field samples on the uniform grid `x = 2π (i1, i2, i3)/M`, row-major with
/// `i3` varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSamples {
    pub m: usize,
    pub values: Vec<Vec3>,
}

impl GridSamples {
    /// Samples `field` on the `M³` grid.
    pub fn sample(m: usize, field: impl Fn([f64; 3]) -> Vec3) -> Self {
        let h = 2.0 * PI / m as f64;
        let mut values = Vec::with_capacity(m * m * m);
        for i1 in 0..m {
            for i2 in 0..m {
                for i3 in 0..m {
                    values.push(field([i1 as f64 * h, i2 as f64 * h, i3 as f64 * h]));
                }
            }
        }
        GridSamples { m, values }
    }
}

/// Discrete Fourier coefficients `A_k = M⁻³ Σ_x u(x) e^{−ik·x}` for
/// `|k_i| ≤ ⌊(M−1)/2⌋`, the quadrature form of the coefficient integral.
/// Exact for fields band-limited to that range.
pub fn extract_coefficients(samples: &GridSamples, nu: f64) -> Result<FullLatticeData> {
    let m = samples.m;
    let expected = m * m * m;
    if m == 0 || samples.values.len() != expected {
        return Err(Error::GridMismatch {
            expected,
            got: samples.values.len(),
        });
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let kmax = ((m - 1) / 2) as i32;
    let norm = 1.0 / expected as f64;
    let mut out = FullLatticeData::new(nu);
    out.real = samples.values.iter().all(|v| v.iter().all(|z| z.im == 0.0));

    for j in 0..3 {
        let mut data: Vec<Complex64> = samples.values.iter().map(|v| v[j]).collect();
        // innermost axis is contiguous
        for line in data.chunks_mut(m) {
            fft.process(line);
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); m];
        for stride in [m, m * m] {
            for start in 0..expected {
                // visit each line once: its first element has a zero index along the axis
                if (start / stride) % m != 0 {
                    continue;
                }
                for (s, slot) in scratch.iter_mut().enumerate() {
                    *slot = data[start + s * stride];
                }
                fft.process(&mut scratch);
                for (s, value) in scratch.iter().enumerate() {
                    data[start + s * stride] = *value;
                }
            }
        }
        let wrap = |k: i32| if k < 0 { (k + m as i32) as usize } else { k as usize };
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                for k3 in -kmax..=kmax {
                    let idx = (wrap(k1) * m + wrap(k2)) * m + wrap(k3);
                    let value = data[idx] * norm;
                    if value != Complex64::new(0.0, 0.0) {
                        out.add_coeff(j, MultiIndex::new(k1, k2, k3), value)?;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Splits ℤ³ data into the eight octant problems, each reflected into ℕ³.
///
/// A mode goes to the cell of [`Octant::containing`] (zero components count
/// as `+`), so the mean lands in `(+,+,+)`. Output order is [`Octant::all`].
pub fn octant_decompose(data: &FullLatticeData) -> Vec<InitialData> {
    Octant::all()
        .iter()
        .map(|o| {
            let mut piece = InitialData {
                nu: data.nu,
                octant: *o,
                mean: ZERO3,
                pressure_mean: Complex64::new(0.0, 0.0),
                coeffs: BTreeMap::new(),
            };
            for (k, a) in data.coeffs.iter().filter(|(k, _)| Octant::containing(k) == *o) {
                let mut flipped = *a;
                for (j, z) in flipped.iter_mut().enumerate() {
                    *z *= o.sign(j);
                }
                let k_ref = reflect(k, o);
                if k_ref.is_zero() {
                    piece.mean = flipped;
                } else {
                    piece.coeffs.insert(k_ref, flipped);
                }
            }
            piece
        })
        .collect()
}

/// Inverse of [`octant_decompose`]: un-reflects each piece and sums.
pub fn recompose(pieces: &[InitialData], nu: f64) -> FullLatticeData {
    let mut out = FullLatticeData::new(nu);
    for piece in pieces {
        for (k, v) in piece.physical_coeffs() {
            let slot = out.coeffs.entry(k).or_insert(ZERO3);
            for j in 0..3 {
                slot[j] += v[j];
            }
        }
    }
    out
}

/// Bits of the integer lattice the random coefficients are quantized to.
const QUANT_BITS: i32 = 24;

/// Deterministic random admissible data on `0 < |k|₁ ≤ n_support`.
///
/// Each mode is `v × k` for a random complex integer vector `v`, so the
/// divergence constraint holds exactly. The vector is rescaled so the largest
/// component modulus is just under `margin × threshold(k)` and rounded to a
/// power-of-two grid, keeping every coefficient a short dyadic rational with
/// `k·B = 0` in floating point. The mean is real. `ν = 1`.
pub fn random_admissible(seed: u64, n_support: u32, margin: f64) -> InitialData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = InitialData::new(1.0).expect("unit viscosity");
    if !(margin > 0.0) {
        return data;
    }
    let margin = margin.min(1.0);
    for j in 0..3 {
        let x: i64 = rng.gen_range(-256..=256);
        data.mean[j] = Complex64::new(x as f64 / 256.0, 0.0);
    }
    for k in modes_up_to(n_support).into_iter().filter(MultiIndex::is_positive) {
        let cap = margin * smallness_threshold(&k);
        data.coeffs.insert(k, admissible_mode(&mut rng, &k, cap));
    }
    data
}

fn cross(v: [i64; 3], k: [i64; 3]) -> [i64; 3] {
    [
        v[1] * k[2] - v[2] * k[1],
        v[2] * k[0] - v[0] * k[2],
        v[0] * k[1] - v[1] * k[0],
    ]
}

fn admissible_mode(rng: &mut ChaCha8Rng, k: &MultiIndex, cap: f64) -> Vec3 {
    let kc = k.components().map(i64::from);
    let bound = 1i64 << 12;
    let (mut re, mut im) = loop {
        let re: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-bound..=bound));
        let im: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-bound..=bound));
        if cross(re, kc) != [0; 3] || cross(im, kc) != [0; 3] {
            break (re, im);
        }
    };
    let assemble = |re: &[i64; 3], im: &[i64; 3], grid: f64| -> Vec3 {
        let (a, b) = (cross(*re, kc), cross(*im, kc));
        std::array::from_fn(|j| Complex64::new(a[j] as f64 * grid, b[j] as f64 * grid))
    };
    let largest = |v: &Vec3| v.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let raw = largest(&assemble(&re, &im, 1.0));
    let scale = cap / raw;
    let grid = 2f64.powi(scale.log2().floor() as i32 - QUANT_BITS);
    let factor = scale / grid;
    let quantize = |v: &[i64; 3], f: f64| v.map(|x| (x as f64 * f).trunc() as i64);
    re = quantize(&re, factor);
    im = quantize(&im, factor);
    let mut out = assemble(&re, &im, grid);
    while largest(&out) > cap {
        let shrink = 1.0 - 2f64.powi(-QUANT_BITS);
        re = quantize(&re, shrink);
        im = quantize(&im, shrink);
        out = assemble(&re, &im, grid);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(a: i32, b: i32, cc: i32) -> MultiIndex {
        MultiIndex::new(a, b, cc)
    }

    fn single(j: usize, k: MultiIndex, v: Complex64) -> FullLatticeData {
        let mut d = FullLatticeData::new(1.0);
        d.add_coeff(j, k, v).unwrap();
        d
    }

    #[test]
    fn divergence_examples() {
        assert!(single(1, mi(1, 0, 0), c(1.0, 0.0)).check_divergence().pass);
        let bad = single(0, mi(1, 0, 0), c(1.0, 0.0)).check_divergence();
        assert!(!bad.pass);
        assert_eq!(bad.worst_mode, Some(mi(1, 0, 0)));
        let mut d = single(0, mi(1, -1, 0), c(1.0, 0.0));
        d.add_coeff(1, mi(1, -1, 0), c(1.0, 0.0)).unwrap();
        assert!(d.check_divergence().pass);
    }

    #[test]
    fn smallness_thresholds() {
        // e^{-1}/1000 and e^{-2}·(2^1/2!)/1000
        assert!((smallness_threshold(&mi(1, 0, 0)) - 3.678794411714423e-4).abs() < 1e-16);
        assert!((smallness_threshold(&mi(2, 0, 0)) - 1.353352832366127e-4).abs() < 1e-16);
        // (1,1,0): two unit factors, e^{-2}/1000
        assert!((smallness_threshold(&mi(1, 1, 0)) - 1.353352832366127e-4).abs() < 1e-16);
        // (3,0,0): 3²/3! = 1.5
        assert!((smallness_threshold(&mi(3, 0, 0)) - 1.5 * (-3f64).exp() / 1e3).abs() < 1e-17);
        let zero = InitialData::new(1.0).unwrap().check_smallness();
        assert!(zero.pass);
        assert_eq!(zero.min_margin, f64::INFINITY);
    }

    #[test]
    fn extraction_examples() {
        let m = 8;
        let e = GridSamples::sample(m, |x| [c(0.0, 0.0), c(x[0].cos(), x[0].sin()), c(0.0, 0.0)]);
        let a = extract_coefficients(&e, 1.0).unwrap();
        for (k, v) in &a.coeffs {
            for (j, z) in v.iter().enumerate() {
                let expected = if *k == mi(1, 0, 0) && j == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) };
                assert!((z - expected).norm() <= 1e-12, "{k} {j} {z}");
            }
        }
        assert!((a.coeff(&mi(1, 0, 0))[1] - c(1.0, 0.0)).norm() < 1e-12);

        let konst = GridSamples::sample(m, |_| [c(0.5, -1.0), c(2.0, 0.0), c(0.0, 0.0)]);
        let a = extract_coefficients(&konst, 1.0).unwrap().pruned(1e-12);
        assert_eq!(a.coeffs.len(), 1);
        let mean = a.coeff(&MultiIndex::ZERO);
        assert!((mean[0] - c(0.5, -1.0)).norm() < 1e-14 && (mean[1] - c(2.0, 0.0)).norm() < 1e-14);

        let cosine = GridSamples::sample(m, |x| [c(0.0, 0.0), c(x[0].cos(), 0.0), c(0.0, 0.0)]);
        let a = extract_coefficients(&cosine, 1.0).unwrap();
        assert!(a.real);
        assert!((a.coeff(&mi(1, 0, 0))[1] - c(0.5, 0.0)).norm() < 1e-12);
        assert!((a.coeff(&mi(-1, 0, 0))[1] - c(0.5, 0.0)).norm() < 1e-12);
        assert!(a.reality_defect() < 1e-15);
    }

    #[test]
    fn extraction_rejects_bad_grid() {
        let s = GridSamples {
            m: 4,
            values: vec![ZERO3; 63],
        };
        assert!(matches!(
            extract_coefficients(&s, 1.0),
            Err(Error::GridMismatch { expected: 64, got: 63 })
        ));
    }

    #[test]
    fn extraction_along_every_axis() {
        // e^{i(2x1 - x2 + 3x3)} on M = 9 (kmax = 4)
        let s = GridSamples::sample(9, |x| {
            let ph = 2.0 * x[0] - x[1] + 3.0 * x[2];
            [c(ph.cos(), ph.sin()), c(0.0, 0.0), c(0.0, 0.0)]
        });
        let a = extract_coefficients(&s, 1.0).unwrap().pruned(1e-12);
        assert_eq!(a.coeffs.keys().copied().collect::<Vec<_>>(), vec![mi(2, -1, 3)]);
    }

    #[test]
    fn decompose_convention() {
        let mut d = FullLatticeData::new(1.0);
        d.add_coeff(1, mi(1, 0, 0), c(1.0, 0.0)).unwrap();
        d.add_coeff(1, mi(-1, 0, 0), c(2.0, 0.0)).unwrap();
        d.add_coeff(0, MultiIndex::ZERO, c(0.25, 0.0)).unwrap();
        let pieces = octant_decompose(&d);
        assert_eq!(pieces.len(), 8);
        assert_eq!(pieces[0].octant, Octant::POSITIVE);
        assert_eq!(pieces[0].mean[0], c(0.25, 0.0));
        assert_eq!(pieces[0].coeffs.keys().copied().collect::<Vec<_>>(), vec![mi(1, 0, 0)]);
        let neg = pieces.iter().find(|p| p.octant == Octant::new(-1, 1, 1).unwrap()).unwrap();
        assert_eq!(neg.coeffs.keys().copied().collect::<Vec<_>>(), vec![mi(1, 0, 0)]);
        // u_2 is not flipped by a reflection of x_1
        assert_eq!(neg.coeffs[&mi(1, 0, 0)][1], c(2.0, 0.0));
        let total: usize = pieces.iter().map(|p| p.coeffs.len()).sum();
        assert_eq!(total, 2);
        assert_eq!(recompose(&pieces, 1.0), d);
    }

    #[test]
    fn random_admissible_properties() {
        assert!(random_admissible(3, 3, 0.0).coeffs.is_empty());
        assert_eq!(random_admissible(5, 3, 1.0), random_admissible(5, 3, 1.0));
        assert_ne!(random_admissible(5, 3, 1.0), random_admissible(6, 3, 1.0));
        for seed in 0..100 {
            let d = random_admissible(seed, 3, 1.0);
            assert_eq!(d.coeffs.len(), 19);
            let div = d.check_divergence();
            assert_eq!(div.max_residual, 0.0, "seed {seed}");
            let small = d.check_smallness();
            assert!(small.pass, "seed {seed}");
            // margin 1 sits at the threshold up to the quantization grid
            assert!(small.min_margin < 1.0 + 1e-5, "seed {seed}: {}", small.min_margin);
        }
        let half = random_admissible(1, 2, 0.5).check_smallness();
        assert!(half.min_margin >= 2.0 && half.min_margin < 2.0 + 1e-4);
    }

    #[test]
    fn conjugated_data_lives_on_opposite_octant() {
        let d = random_admissible(2, 2, 1.0);
        let cj = d.conjugated();
        assert_eq!(cj.octant, Octant::new(-1, -1, -1).unwrap());
        for (k, v) in d.physical_coeffs() {
            let w = cj.physical_coeffs()[&-k];
            for j in 0..3 {
                assert_eq!(w[j], v[j].conj());
            }
        }
        assert_eq!(cj.conjugated(), d);
    }
}
