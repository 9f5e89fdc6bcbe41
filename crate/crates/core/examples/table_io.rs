//! Writes initial data and a solved table as JSON, reads them back, and
//! exports field values as CSV.

use octant_ns::initdata::random_admissible;
use octant_ns::io::{initial_data_json, parse_initial_data, parse_table, table_json, write_field_csv};
use octant_ns::recursion::solve;

fn main() -> octant_ns::Result<()> {
    let data = random_admissible(1, 2, 0.5);
    let data_json = initial_data_json(&data)?;
    println!("initial data document: {} bytes", data_json.len());
    assert_eq!(parse_initial_data(&data_json)?, data);

    let table = solve(&data, 3)?;
    let json = table_json(&table)?;
    let back = parse_table(&json)?;
    println!("table document: {} bytes, lossless: {}", json.len(), back == table);

    let mut out = Vec::new();
    write_field_csv(&back, &[[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]], &[0.0, 1.0], &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}
