//! CSV emission. Every number is written with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::euler::{Conserved, GasModel};
use crate::fv1d::Grid1D;
use crate::fv2d::Grid2D;

pub const HEADER_1D: &str = "x,rho,u,p,q,E,s,H";
pub const HEADER_2D: &str = "x,y,rho,u,v,p";

fn num(out: &mut String, v: f64) {
    // `{:.16e}` keeps 17 significant digits and round-trips every f64.
    let _ = write!(out, "{v:.16e}");
}

fn row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        num(out, *v);
    }
    out.push('\n');
}

/// `rho, u, p, q, E, s, H` of a state with `H = (E + p)/rho + phi`.
fn columns_1d(w: &Conserved, phi: f64, gas: &GasModel) -> [f64; 7] {
    let p = gas.pressure(w);
    let s = gas.entropy(w.rho, p);
    [w.rho, w.q / w.rho, p, w.q, w.e, s, (w.e + p) / w.rho + phi]
}

fn columns_2d(w: &Conserved, gas: &GasModel) -> [f64; 4] {
    [w.rho, w.q / w.rho, w.qt / w.rho, gas.pressure(w)]
}

/// Interior snapshot; with `base`, every column holds the difference to it.
pub fn write_1d(
    path: &Path,
    grid: &Grid1D,
    cells: &[Conserved],
    base: Option<&[Conserved]>,
    gas: &GasModel,
) -> Result<()> {
    let mut out = String::with_capacity(64 * 8 * cells.len());
    out.push_str(HEADER_1D);
    out.push('\n');
    for (m, k) in grid.interior().enumerate() {
        let mut vals = [0.0; 8];
        vals[0] = grid.center(k);
        let c = columns_1d(&cells[m], grid.phi[k], gas);
        match base {
            Some(b) => {
                let r = columns_1d(&b[m], grid.phi[k], gas);
                for i in 0..7 {
                    vals[i + 1] = c[i] - r[i];
                }
            }
            None => vals[1..].copy_from_slice(&c),
        }
        row(&mut out, &vals);
    }
    fs::write(path, out)?;
    Ok(())
}

/// Interior snapshot in row-major order; with `base`, differences to it.
pub fn write_2d(
    path: &Path,
    grid: &Grid2D,
    cells: &[Conserved],
    base: Option<&[Conserved]>,
    gas: &GasModel,
) -> Result<()> {
    let mut out = String::with_capacity(48 * 6 * cells.len());
    out.push_str(HEADER_2D);
    out.push('\n');
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let n = j * grid.nx + i;
            let (x, y) = grid.center(i, j);
            let c = columns_2d(&cells[n], gas);
            let d = match base {
                Some(b) => {
                    let r = columns_2d(&b[n], gas);
                    [c[0] - r[0], c[1] - r[1], c[2] - r[2], c[3] - r[3]]
                }
                None => c,
            };
            row(&mut out, &[x, y, d[0], d[1], d[2], d[3]]);
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes a header and pre-formatted rows.
pub fn write_table(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(r);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// A number for a table cell; missing values become `n/a`.
pub fn cell(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        _ => "n/a".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::Primitive;
    use crate::potential::Potential;

    #[test]
    fn one_dimensional_rows_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let gas = GasModel::default();
        let grid = Grid1D::new(0.0, 1.0, 4, Potential::Quadratic, false).unwrap();
        let w = gas.to_conserved(&Primitive::new(1.0 / 3.0, 0.1, 0.7));
        let cells = vec![w; 4];
        let path = dir.path().join("a.csv");
        write_1d(&path, &grid, &cells, None, &gas).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(HEADER_1D));
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(first.len(), 8);
        assert_eq!(first[1], 1.0 / 3.0);
        assert_eq!(text.lines().count(), 5);

        write_1d(&path, &grid, &cells, Some(&cells), &gas).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let diff: Vec<f64> = text
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .skip(1)
            .map(|s| s.parse().unwrap())
            .collect();
        assert!(diff.iter().all(|d| *d == 0.0));
    }

    #[test]
    fn missing_values_are_marked() {
        assert_eq!(cell(None), "n/a");
        assert_eq!(cell(Some(f64::NAN)), "n/a");
        assert_eq!(cell(Some(0.5)), "5.0000000000000000e-1");
    }
}
