//! Solves the smallest nontrivial problem, one Fourier mode, and prints its
//! closed-form coefficient functions and field values.

use num_complex::Complex64;
use octant_ns::initdata::InitialData;
use octant_ns::lattice::MultiIndex;
use octant_ns::recursion::{evaluate_fields, solve};

fn main() -> octant_ns::Result<()> {
    let mut data = InitialData::new(1.0)?;
    // u₂ = ε e^{i x₁}: divergence-free since k·B = 0
    data.add_coeff(1, MultiIndex::new(1, 0, 0), Complex64::new(1e-3, 0.0))?;

    let table = solve(&data, 4)?;
    for (k, f) in table.iter().filter(|(_, f)| f.iter().any(|p| !p.is_zero())) {
        println!("k = {k}");
        for (name, p) in ["T1", "T2", "T3", "T4"].iter().zip(f) {
            for (key, power, c) in p.iter() {
                println!("  {name}: ({c}) t^{power} exp(-(i m·B0 + {} q) t), m = {}, q = {}", data.nu, key.m, key.q);
            }
        }
    }

    for t in [0.0, 0.5, 1.0] {
        let [u1, u2, u3, p] = evaluate_fields(&table, [0.3, 0.0, 0.0], t);
        println!("t = {t}: u = ({u1:.3e}, {u2:.3e}, {u3:.3e}), p = {p:.3e}");
    }
    Ok(())
}
