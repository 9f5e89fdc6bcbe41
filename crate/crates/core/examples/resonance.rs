//! Two crossed modes feed (1,1,0) at exactly its own decay rate, which the
//! solver turns into a polynomial-times-exponential term. A second pair whose
//! advection is a pure gradient shows the pressure absorbing everything.

use num_complex::Complex64;
use octant_ns::initdata::InitialData;
use octant_ns::lattice::MultiIndex;
use octant_ns::recursion::{lambda_key, solve};
use octant_ns::verify::galerkin_oracle;

fn report(label: &str, second_component: usize) -> octant_ns::Result<()> {
    let eps = 1e-4;
    let mut data = InitialData::new(1.0)?;
    data.add_coeff(1, MultiIndex::new(1, 0, 0), Complex64::new(eps, 0.0))?;
    data.add_coeff(second_component, MultiIndex::new(0, 1, 0), Complex64::new(eps, 0.0))?;

    let k = MultiIndex::new(1, 1, 0);
    let table = solve(&data, 3)?;
    let f = table.get(&k).expect("solved");
    let key = lambda_key(&k);
    println!("{label}");
    for (j, p) in f.iter().enumerate() {
        let secular = p.coeff(&key, 1).copied().unwrap_or_default();
        println!("  T{}: {} terms, coefficient of t·e^(-2t) = {secular:.3e}", j + 1, p.len());
    }
    let oracle = galerkin_oracle(&data, 3, &[1.0], 1e-3)?;
    let o = oracle.value(0, &k).expect("in band");
    for j in 0..4 {
        let s = f[j].evaluate(1.0, data.nu, &data.mean);
        println!("  t = 1, T{}: series {s:.6e}, oracle {:.6e}", j + 1, o[j]);
    }
    Ok(())
}

fn main() -> octant_ns::Result<()> {
    report("B2 at (1,0,0) with B3 at (0,1,0): resonant", 2)?;
    report("B2 at (1,0,0) with B1 at (0,1,0): gradient forcing, no velocity at (1,1,0)", 0)?;
    Ok(())
}
