//! The binomial identities and the product bound behind the decay estimate,
//! in exact arithmetic.

use octant_ns::verify::{abel_identity, corollary_bound};

fn main() -> octant_ns::Result<()> {
    for row in abel_identity(6) {
        println!(
            "k = {}: {} = {} ({}), {} = {} <= {} ({}, {})",
            row.k,
            row.first_lhs,
            row.first_rhs,
            row.first_equal,
            row.second_lhs,
            row.second_middle,
            row.second_upper,
            row.second_equal,
            row.second_bounded
        );
    }
    let all = abel_identity(200).iter().all(|r| r.first_equal && r.second_equal);
    println!("both identities exact for k <= 200: {all}");

    for k in [vec![1], vec![1, 1], vec![3, 2, 1], vec![8, 8, 8]] {
        let r = corollary_bound(&k)?;
        println!("{k:?}: {} <= {} holds: {}", r.lhs, r.rhs, r.holds);
    }
    Ok(())
}
