//! CSV tables of cell values: `cell,re,im` for functions and
//! `ell,cell,re,im` for generator spectra, plus the `u(n)` listing.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::analysis::{Domain, Grid, SampledFunction};
use crate::error::{Error, Result};
use crate::finite_field::FieldSpec;
use crate::local_field::{kappa, u_of_n};

#[derive(Debug, Serialize, Deserialize)]
struct CellRow {
    cell: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Deserialize)]
struct GeneratorRow {
    ell: usize,
    cell: usize,
    re: f64,
    im: f64,
}

fn csv_error(what: &str, e: csv::Error) -> Error {
    let line = e.position().map(|p| format!(" (line {})", p.line())).unwrap_or_default();
    Error::Parse(format!("{what}{line}: {e}"))
}

/// Reads a function table; every cell must appear exactly once.
pub fn read_function(reader: impl Read, grid: &Grid, domain: Domain) -> Result<SampledFunction<f64>> {
    let mut values: Vec<Option<Complex<f64>>> = vec![None; grid.len()];
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut rows = 0usize;
    for row in rdr.deserialize::<CellRow>() {
        let row = row.map_err(|e| csv_error("function table", e))?;
        rows += 1;
        let slot = values.get_mut(row.cell).ok_or_else(|| {
            Error::Range(format!("cell {} outside a grid of {} cells", row.cell, grid.len()))
        })?;
        if slot.replace(Complex::new(row.re, row.im)).is_some() {
            return Err(Error::Parse(format!("cell {} listed twice", row.cell)));
        }
    }
    if rows != grid.len() {
        return Err(Error::Range(format!("{rows} rows for a grid of {} cells", grid.len())));
    }
    SampledFunction::new(grid, domain, values.into_iter().map(|v| v.expect("all cells seen")).collect())
}

/// Writes a function table in cell order with round-trip float formatting.
pub fn write_function(writer: impl Write, f: &SampledFunction<f64>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for (cell, z) in f.values().iter().enumerate() {
        wtr.serialize(CellRow { cell, re: z.re, im: z.im })
            .map_err(|e| csv_error("writing table", e))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads generator spectra `psi_0, .., psi_L`; every `(ell, cell)` pair for
/// `ell <= L` must appear exactly once.
pub fn read_generators(reader: impl Read, grid: &Grid) -> Result<Vec<SampledFunction<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for row in rdr.deserialize::<GeneratorRow>() {
        rows.push(row.map_err(|e| csv_error("generator table", e))?);
    }
    let count = rows.iter().map(|r| r.ell + 1).max().unwrap_or(0);
    if count == 0 {
        return Err(Error::Parse("generator table has no rows".into()));
    }
    if rows.len() != count * grid.len() {
        return Err(Error::Range(format!(
            "generator table has {} rows; {} generators on {} cells need {}",
            rows.len(),
            count,
            grid.len(),
            count * grid.len()
        )));
    }
    let mut values: Vec<Vec<Option<Complex<f64>>>> = vec![vec![None; grid.len()]; count];
    for r in rows {
        let slot = values[r.ell].get_mut(r.cell).ok_or_else(|| {
            Error::Range(format!("cell {} outside a grid of {} cells", r.cell, grid.len()))
        })?;
        if slot.replace(Complex::new(r.re, r.im)).is_some() {
            return Err(Error::Parse(format!("generator {} cell {} listed twice", r.ell, r.cell)));
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(ell, v)| {
            let v: Option<Vec<_>> = v.into_iter().collect();
            let v = v.ok_or_else(|| Error::Range(format!("generator {ell} misses some cells")))?;
            SampledFunction::new(grid, Domain::Frequency, v)
        })
        .collect()
}

/// One line of the `u(n)` listing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct URow {
    pub n: u64,
    pub u: String,
    pub norm: f64,
    pub kappa: String,
}

/// `u(n)`, `|u(n)|` and `kappa(n)` for `n < count`.
pub fn u_rows(field: &Arc<FieldSpec>, count: u64) -> Vec<URow> {
    (0..count)
        .map(|n| {
            let u = u_of_n(field, n);
            URow { n, u: u.to_string(), norm: u.norm(), kappa: kappa(field.q(), n).to_string() }
        })
        .collect()
}

pub fn write_u_csv(writer: impl Write, rows: &[URow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in rows {
        wtr.serialize(r).map_err(|e| csv_error("writing u table", e))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Aligned plain-text rendering of [`u_rows`].
pub fn format_u_table(rows: &[URow]) -> String {
    let width = rows.iter().map(|r| r.u.len()).max().unwrap_or(0).max(4);
    let mut out = format!("{:>6}  {:<width$}  {:>10}  {:>5}\n", "n", "u(n)", "|u(n)|", "kappa");
    for r in rows {
        out.push_str(&format!("{:>6}  {:<width$}  {:>10}  {:>5}\n", r.n, r.u, r.norm, r.kappa));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::FieldSpec;
    use std::sync::Arc;

    #[test]
    fn function_round_trip() {
        let g = Grid::new(Arc::new(FieldSpec::prime(3).unwrap()), 1, 1).unwrap();
        let f = SampledFunction::from_fn(&g, Domain::Time, |i| Complex::new(i as f64 / 3.0, -0.1 * i as f64));
        let mut buf = Vec::new();
        write_function(&mut buf, &f).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("cell,re,im\n"));
        assert_eq!(read_function(buf.as_slice(), &g, Domain::Time).unwrap(), f);
    }

    #[test]
    fn malformed_tables() {
        let g = Grid::new(Arc::new(FieldSpec::prime(2).unwrap()), 1, 1).unwrap();
        let short = "cell,re,im\n0,1,0\n1,0,0\n2,0,0\n";
        assert!(matches!(read_function(short.as_bytes(), &g, Domain::Time), Err(Error::Range(_))));
        let twice = "cell,re,im\n0,1,0\n0,0,0\n2,0,0\n3,0,0\n";
        assert!(read_function(twice.as_bytes(), &g, Domain::Time).is_err());
        let junk = "cell,re,im\n0,x,0\n";
        assert!(matches!(read_function(junk.as_bytes(), &g, Domain::Time), Err(Error::Parse(_))));
        let gens = "ell,cell,re,im\n0,0,1,0\n0,1,1,0\n1,2,1,0\n";
        assert!(read_generators(gens.as_bytes(), &g).is_err());
    }

    #[test]
    fn u_listing() {
        let f = Arc::new(FieldSpec::prime(2).unwrap());
        let rows = u_rows(&f, 5);
        assert_eq!(rows[0].kappa, "inf");
        assert_eq!(rows[4].kappa, "2");
        assert_eq!(rows[3].norm, 4.0);
        let mut buf = Vec::new();
        write_u_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,u,norm,kappa\n0,0,0.0,inf\n"), "{text}");
        assert_eq!(format_u_table(&rows).lines().count(), 6);
    }
}
