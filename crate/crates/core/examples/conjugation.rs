//! The conjugate of a solution solves the conjugated problem on the opposite
//! octant.

use num_complex::Complex64;
use octant_ns::initdata::{random_admissible, InitialData};
use octant_ns::lattice::MultiIndex;
use octant_ns::recursion::{evaluate_fields, solve};
use octant_ns::verify::conjugate_check;

fn main() -> octant_ns::Result<()> {
    let data = random_admissible(5, 3, 1.0);
    let mirror = data.conjugated();
    println!("original octant {}, conjugated octant {}", data.octant, mirror.octant);

    let a = solve(&data, 5)?;
    let b = solve(&mirror, 5)?;
    let (x, t) = ([1.0, 2.0, 0.5], 0.7);
    let u = evaluate_fields(&a, x, t);
    let v = evaluate_fields(&b, x, t);
    for j in 0..4 {
        println!("  component {}: {:.6e} vs conj {:.6e}", j + 1, v[j], u[j].conj());
    }

    let mut imaginary = InitialData::new(1.0)?;
    imaginary.add_coeff(2, MultiIndex::new(1, 1, 0), Complex64::new(0.0, 1e-4))?;
    for (name, d) in [("random", &data), ("imaginary single mode", &imaginary)] {
        let r = conjugate_check(d, 6, 50, 1)?;
        println!("{name}: symbolic mismatch {:e}, probe mismatch {:e}, pass {}", r.symbolic_max_diff, r.probe_max_diff, r.pass);
    }
    Ok(())
}
