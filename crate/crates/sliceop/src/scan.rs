//! Sector scans of `||C_q(A)||` for plotting.

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use num_complex::Complex64;
use sliceop_core::algebra::phi;
use sliceop_core::operator::SphericalCalculus;
use sliceop_core::{Error, Multivector, RightLinearOperator};

use crate::formats::{fmt_f64, Table};

/// Points `w + rho e^{theta j}` with `0 <= theta <= pi/2 + delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub radii: Vec<f64>,
    /// Number of angular steps; `angles + 1` angles including both ends.
    pub angles: usize,
    pub delta: f64,
    /// `||C_q||` is maximised over these axes.
    pub axes: Vec<Multivector>,
}

/// One scan row; `norm` is `None` on the spherical spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub re: f64,
    pub s: f64,
    pub norm: Option<f64>,
    pub dist: f64,
}

pub fn scan_rows(a: &RightLinearOperator, omega: f64, grid: &ScanGrid) -> Result<Vec<ScanRow>, Error> {
    let calc = SphericalCalculus::new(a);
    let top = FRAC_PI_2 + grid.delta;
    let steps = grid.angles.max(1);
    let mut rows = Vec::new();
    for &rho in &grid.radii {
        for i in 0..=steps {
            let z = Complex64::from_polar(rho, top * i as f64 / steps as f64);
            let mut norm = Some(0.0f64);
            for j in &grid.axes {
                let q = phi(j, z).add_scalar(omega);
                match calc.spherical_c(&q) {
                    Ok(c) => norm = norm.map(|v| v.max(c.norm_upper())),
                    Err(Error::SingularDelta { .. }) => norm = None,
                    Err(e) => return Err(e),
                }
            }
            rows.push(ScanRow { re: omega + z.re, s: z.im, norm, dist: rho });
        }
    }
    rows.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.s.total_cmp(&b.s)));
    Ok(rows)
}

pub fn scan_table(rows: &[ScanRow]) -> Table {
    let mut t = Table::new(&["re", "s", "norm_c", "scaled_norm", "status"]);
    for r in rows {
        let (n, k, status) = match r.norm {
            Some(n) => (fmt_f64(n), fmt_f64(n * r.dist), "ok"),
            None => ("inf".into(), "inf".into(), "singular"),
        };
        t.push(vec![fmt_f64(r.re), fmt_f64(r.s), n, k, status.into()]);
    }
    t
}

/// Rows `(Re q, s, ||C_q(A)||, |q - w| ||C_q(A)||, status)` sorted by
/// `(Re q, s)`; points of the spherical spectrum are flagged `singular`.
pub fn emit_sector_scan<W: Write>(a: &RightLinearOperator, omega: f64, grid: &ScanGrid, out: &mut W) -> io::Result<usize> {
    let rows = scan_rows(a, omega, grid).map_err(io::Error::other)?;
    out.write_all(scan_table(&rows).to_csv().as_bytes())?;
    Ok(rows.len())
}
