//! Cross-checks the closed-form series against fourth-order Runge-Kutta
//! integration of the same truncated system.

use octant_ns::initdata::random_admissible;
use octant_ns::recursion::solve;
use octant_ns::verify::{compare_with_oracle, galerkin_oracle};

fn main() -> octant_ns::Result<()> {
    let times = [0.1, 0.5, 1.0];
    for seed in 0..3 {
        let data = random_admissible(seed, 5, 1.0);
        let table = solve(&data, 5)?;
        for h in [1e-1, 1e-2, 1e-3] {
            let oracle = galerkin_oracle(&data, 5, &times, h)?;
            let cmp = compare_with_oracle(&table, &oracle);
            println!("seed {seed}, h = {h:e}: max difference {:.3e}", cmp.max_abs_diff);
        }
    }
    Ok(())
}
