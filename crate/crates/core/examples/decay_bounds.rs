//! Data at the smallness threshold, checked against the per-mode decay bound
//! and the bound on the discarded tail of the series.

use octant_ns::initdata::random_admissible;
use octant_ns::recursion::solve;
use octant_ns::verify::{check_decay_bounds, tail_bound};

fn main() -> octant_ns::Result<()> {
    let times = [0.0, 0.1, 1.0, 10.0];
    for nu in [1.0, 2.0] {
        let data = random_admissible(3, 6, 1.0).with_nu(nu);
        println!("nu = {nu}: smallness margin {:.6}", data.check_smallness().min_margin);
        let table = solve(&data, 6)?;
        let report = check_decay_bounds(&table, &times)?;
        println!(
            "  worst |T|/bound = {:.3e} at {:?}, violations {}",
            report.worst_ratio, report.worst, report.violations
        );
    }
    for n in [4, 6, 8, 12] {
        println!("tail beyond N = {n}: t = 0 {:.3e}, t = 1 {:.3e}", tail_bound(n, 0.0, 1.0), tail_bound(n, 1.0, 1.0));
    }
    Ok(())
}
