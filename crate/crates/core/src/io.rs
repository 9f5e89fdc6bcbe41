//! File formats.
//!
//! All JSON documents use `[re, im]` pairs for complex numbers and `[k1, k2, k3]`
//! arrays for lattice points. Floats are written in shortest round-trip form,
//! so a document read back reproduces every value bit for bit.
//!
//! Initial data (`InitialDataFile`):
//!
//! ```json
//! { "nu": 1.0, "mean": [[0.5, 0], [0, 0], [0, 0]], "pressure_mean": [0, 0],
//!   "octant": [1, 1, 1],
//!   "coefficients": [ { "j": 2, "k": [1, 0, 0], "re": 1e-4, "im": 0 } ] }
//! ```
//!
//! `j` is 1-based. `mean`, `pressure_mean` and `octant` are optional. Entries
//! at `k = [0, 0, 0]` add to the mean; repeated entries add up.
//!
//! Full-lattice data (`FullLatticeFile`) has the same `nu` and `coefficients`
//! fields with `k` anywhere in ℤ³, plus an optional `real` flag.
//!
//! Grid samples are CSV. The first line is `M,<M>`, then `M³` rows in row-major
//! order with `i3` fastest, each holding `u1_re,u1_im,u2_re,u2_im,u3_re,u3_im`,
//! or just `u1,u2,u3` for a real field.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::initdata::{FullLatticeData, GridSamples, InitialData};
use crate::lattice::{MultiIndex, Octant};
use crate::recursion::{CoefficientTable, FieldSnapshot, ModeFunctions};
use crate::scalar::Scalar;

/// JSON has no infinities; non-finite values are written as strings.
pub fn serialize_float<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&x.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffEntry {
    /// Velocity component, 1-based.
    pub j: usize,
    pub k: MultiIndex,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl CoeffEntry {
    fn index(&self) -> Result<usize> {
        match self.j {
            1..=3 => Ok(self.j - 1),
            j => Err(Error::InvalidInput(format!("component j = {j} is not in 1..=3"))),
        }
    }
}

fn flatten(coeffs: &BTreeMap<MultiIndex, [Complex64; 3]>) -> Vec<CoeffEntry> {
    let mut out = Vec::new();
    for (k, v) in coeffs {
        for (j, z) in v.iter().enumerate() {
            if *z != Complex64::new(0.0, 0.0) {
                out.push(CoeffEntry {
                    j: j + 1,
                    k: *k,
                    re: z.re,
                    im: z.im,
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDataFile {
    pub nu: f64,
    #[serde(default)]
    pub mean: [Complex64; 3],
    #[serde(default)]
    pub pressure_mean: Complex64,
    #[serde(default)]
    pub octant: Octant,
    #[serde(default)]
    pub coefficients: Vec<CoeffEntry>,
}

impl InitialDataFile {
    pub fn into_data(self) -> Result<InitialData> {
        let mut d = InitialData::new(self.nu)?.with_mean(self.mean);
        d.pressure_mean = self.pressure_mean;
        d.octant = self.octant;
        for e in &self.coefficients {
            d.add_coeff(e.index()?, e.k, Complex64::new(e.re, e.im))?;
        }
        d.validate()?;
        Ok(d)
    }

    pub fn from_data(d: &InitialData) -> Self {
        InitialDataFile {
            nu: d.nu,
            mean: d.mean,
            pressure_mean: d.pressure_mean,
            octant: d.octant,
            coefficients: flatten(&d.coeffs),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullLatticeFile {
    pub nu: f64,
    #[serde(default)]
    pub real: bool,
    #[serde(default)]
    pub coefficients: Vec<CoeffEntry>,
}

impl FullLatticeFile {
    pub fn into_data(self) -> Result<FullLatticeData> {
        let mut d = FullLatticeData::new(self.nu);
        d.real = self.real;
        for e in &self.coefficients {
            d.add_coeff(e.index()?, e.k, Complex64::new(e.re, e.im))?;
        }
        Ok(d)
    }

    pub fn from_data(d: &FullLatticeData) -> Self {
        FullLatticeFile {
            nu: d.nu,
            real: d.real,
            coefficients: flatten(&d.coeffs),
        }
    }
}

pub fn read_to_string(path: &Path) -> Result<String> {
    let mut s = String::new();
    std::fs::File::open(path)?.read_to_string(&mut s)?;
    Ok(s)
}

pub fn parse_initial_data(json: &str) -> Result<InitialData> {
    serde_json::from_str::<InitialDataFile>(json)?.into_data()
}

pub fn read_initial_data(path: &Path) -> Result<InitialData> {
    parse_initial_data(&read_to_string(path)?)
}

pub fn initial_data_json(d: &InitialData) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InitialDataFile::from_data(d))?)
}

pub fn read_full_lattice(path: &Path) -> Result<FullLatticeData> {
    serde_json::from_str::<FullLatticeFile>(&read_to_string(path)?)?.into_data()
}

/// Reads grid samples in the CSV layout described at the top of this module.
pub fn read_grid_csv(reader: impl Read) -> Result<GridSamples> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::InvalidInput("empty grid file".into()))??;
    let m: usize = match (header.get(0), header.get(1)) {
        (Some("M"), Some(m)) => m
            .parse()
            .map_err(|_| Error::InvalidInput(format!("grid size {m:?} is not an integer")))?,
        _ => return Err(Error::InvalidInput("grid file must start with `M,<size>`".into())),
    };
    let mut values = Vec::new();
    for (row, record) in records.enumerate() {
        let record = record?;
        let nums = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("row {}: {s:?} is not a number", row + 2)))
            })
            .collect::<Result<Vec<f64>>>()?;
        let v = match nums.as_slice() {
            [a, b, c] => [*a, *b, *c].map(|x| Complex64::new(x, 0.0)),
            [a, b, c, d, e, f] => [
                Complex64::new(*a, *b),
                Complex64::new(*c, *d),
                Complex64::new(*e, *f),
            ],
            _ => {
                return Err(Error::InvalidInput(format!(
                    "row {} has {} columns; expected 3 or 6",
                    row + 2,
                    nums.len()
                )))
            }
        };
        values.push(v);
    }
    if values.len() != m * m * m {
        return Err(Error::GridMismatch {
            expected: m * m * m,
            got: values.len(),
        });
    }
    Ok(GridSamples { m, values })
}

pub fn write_grid_csv(samples: &GridSamples, writer: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(writer);
    w.write_record(["M", &samples.m.to_string()])?;
    for v in &samples.values {
        w.write_record(v.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub k: MultiIndex,
    pub t1: ExpPoly,
    pub t2: ExpPoly,
    pub t3: ExpPoly,
    pub t4: ExpPoly,
}

/// A solved table. Each `t·` is a list of terms `{m, q, p, re, im}` meaning
/// `(re + i im) t^p exp(−(i m·B₀ + ν q) t)`, in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    pub order: u32,
    pub nu: f64,
    pub octant: Octant,
    pub mean: [Complex64; 3],
    pub pressure_mean: Complex64,
    #[serde(default)]
    pub coefficients: Vec<CoeffEntry>,
    pub entries: Vec<TableEntry>,
}

impl TableFile {
    pub fn from_table<C: Scalar>(table: &CoefficientTable<C>) -> Self {
        let init = table.init();
        TableFile {
            order: table.order(),
            nu: init.nu,
            octant: init.octant,
            mean: init.mean,
            pressure_mean: init.pressure_mean,
            coefficients: flatten(&init.coeffs),
            entries: table
                .iter()
                .map(|(k, f)| {
                    let [t1, t2, t3, t4] = [0, 1, 2, 3].map(|i| f[i].to_c64());
                    TableEntry { k: *k, t1, t2, t3, t4 }
                })
                .collect(),
        }
    }

    pub fn into_table(self) -> Result<CoefficientTable> {
        let init = InitialDataFile {
            nu: self.nu,
            mean: self.mean,
            pressure_mean: self.pressure_mean,
            octant: self.octant,
            coefficients: self.coefficients,
        }
        .into_data()?;
        let mut entries: BTreeMap<MultiIndex, ModeFunctions<Complex64>> = BTreeMap::new();
        for e in self.entries {
            if entries.insert(e.k, [e.t1, e.t2, e.t3, e.t4]).is_some() {
                return Err(Error::InvalidInput(format!("mode {} appears twice", e.k)));
            }
        }
        CoefficientTable::from_entries(init, self.order, entries)
    }
}

/// Canonical JSON of a table: one line, modes in lexicographic order.
pub fn table_json<C: Scalar>(table: &CoefficientTable<C>) -> Result<String> {
    Ok(serde_json::to_string(&TableFile::from_table(table))?)
}

/// Canonical JSON of one mode's four functions.
pub fn entry_json<C: Scalar>(k: &MultiIndex, f: &ModeFunctions<C>) -> Result<String> {
    let [t1, t2, t3, t4] = [0, 1, 2, 3].map(|i| f[i].to_c64());
    Ok(serde_json::to_string(&TableEntry { k: *k, t1, t2, t3, t4 })?)
}

pub fn parse_table(json: &str) -> Result<CoefficientTable> {
    serde_json::from_str::<TableFile>(json)?.into_table()
}

/// One row per mode and function: `k1,k2,k3,component,terms,max_abs_coeff`.
pub fn write_summary_csv<C: Scalar>(table: &CoefficientTable<C>, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k1", "k2", "k3", "component", "terms", "max_abs_coeff"])?;
    for (k, f) in table.iter() {
        for (c, poly) in f.iter().enumerate() {
            let name = if c < 3 { format!("u{}", c + 1) } else { "p".to_string() };
            w.write_record([
                k.k1.to_string(),
                k.k2.to_string(),
                k.k3.to_string(),
                name,
                poly.len().to_string(),
                poly.max_abs_coeff().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Field values `x1,x2,x3,t,Re u1,Im u1,Re u2,Im u2,Re u3,Im u3,Re p,Im p` at
/// every point and time, times outermost.
pub fn write_field_csv<C: Scalar>(
    table: &CoefficientTable<C>,
    points: &[[f64; 3]],
    times: &[f64],
    writer: impl Write,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "x1", "x2", "x3", "t", "re_u1", "im_u1", "re_u2", "im_u2", "re_u3", "im_u3", "re_p", "im_p",
    ])?;
    for &t in times {
        let snap = FieldSnapshot::new(table, t);
        for x in points {
            let v = snap.at(*x);
            let mut row = vec![x[0], x[1], x[2], t];
            row.extend(v.iter().flat_map(|z| [z.re, z.im]));
            w.write_record(row.iter().map(f64::to_string))?;
        }
    }
    w.flush()?;
    Ok(())
}
