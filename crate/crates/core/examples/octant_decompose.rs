//! Samples a real divergence-free field on a grid, extracts its Fourier
//! coefficients, splits them into the eight octant problems, solves each one
//! and evaluates the pieces.

use num_complex::Complex64;
use octant_ns::initdata::{extract_coefficients, octant_decompose, recompose, GridSamples};
use octant_ns::recursion::{evaluate_fields, solve};

fn main() -> octant_ns::Result<()> {
    let eps = 1e-4;
    // a sum of shear waves: each component independent of its own coordinate
    let field = |x: [f64; 3]| {
        [
            Complex64::new(eps * (x[1].cos() + (x[2] - x[1]).sin()), 0.0),
            Complex64::new(eps * (2.0 * x[0]).sin(), 0.0),
            Complex64::new(eps * (x[0] + x[1]).cos(), 0.0),
        ]
    };
    let samples = GridSamples::sample(8, field);
    let data = extract_coefficients(&samples, 1.0)?.pruned(1e-18);
    println!("{} nonzero modes, reality defect {:.1e}", data.coeffs.len(), data.reality_defect());

    let pieces = octant_decompose(&data);
    let back = recompose(&pieces, data.nu);
    let err = data
        .coeffs
        .iter()
        .flat_map(|(k, a)| {
            let b = back.coeff(k);
            (0..3).map(move |j| (a[j] - b[j]).norm())
        })
        .fold(0.0, f64::max);
    println!("recomposition error {err:e}");

    let x = [0.7, 1.9, 4.2];
    let mut sum = [Complex64::new(0.0, 0.0); 3];
    for piece in pieces.iter().filter(|p| !p.coeffs.is_empty() || p.mean.iter().any(|z| z.norm() > 0.0)) {
        let div = piece.check_divergence();
        let table = solve(piece, 4)?;
        let u = evaluate_fields(&table, x, 0.0);
        println!("octant {}: {} modes, divergence ok {}", piece.octant, piece.coeffs.len(), div.pass);
        for j in 0..3 {
            sum[j] += u[j];
        }
    }
    // at t = 0 the octant pieces add back up to the sampled field
    let direct = field(x);
    for j in 0..3 {
        println!("u{}(x, 0): pieces {:.6e}, field {:.6e}", j + 1, sum[j].re, direct[j].re);
    }
    Ok(())
}
