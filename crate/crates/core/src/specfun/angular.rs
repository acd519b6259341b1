use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Result, SpecFunError, MAX_ANGULAR_ORDER};

/// Spin-`l` representation of the angular-momentum operators in the
/// basis m = -l, ..., +l (row/column index `m + l`).
#[derive(Debug, Clone, PartialEq)]
pub struct AngularMomentumMatrices {
    pub l: u32,
    pub lx: DMatrix<Complex64>,
    pub ly: DMatrix<Complex64>,
    pub lz: DMatrix<Complex64>,
}

/// <l, m+1| L+ |l, m>
pub fn raising_element(l: u32, m: i64) -> f64 {
    let l = l as f64;
    let m = m as f64;
    (l * (l + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

impl AngularMomentumMatrices {
    pub fn new(l: u32) -> Result<Self> {
        if l > MAX_ANGULAR_ORDER {
            return Err(SpecFunError::OrderOutOfRange {
                l,
                max: MAX_ANGULAR_ORDER,
            });
        }
        let dim = 2 * l as usize + 1;
        let zero = Complex64::new(0.0, 0.0);
        let mut lx = DMatrix::from_element(dim, dim, zero);
        let mut ly = DMatrix::from_element(dim, dim, zero);
        let mut lz = DMatrix::from_element(dim, dim, zero);
        let li = l as i64;
        for (idx, m) in (-li..=li).enumerate() {
            lz[(idx, idx)] = Complex64::new(m as f64, 0.0);
            if m < li {
                // L+ couples column m to row m+1; Lx = (L+ + L-)/2, Ly = (L+ - L-)/2i
                let a = raising_element(l, m) / 2.0;
                lx[(idx + 1, idx)] = Complex64::new(a, 0.0);
                lx[(idx, idx + 1)] = Complex64::new(a, 0.0);
                ly[(idx + 1, idx)] = Complex64::new(0.0, -a);
                ly[(idx, idx + 1)] = Complex64::new(0.0, a);
            }
        }
        Ok(Self { l, lx, ly, lz })
    }

    pub fn dim(&self) -> usize {
        2 * self.l as usize + 1
    }

    /// The three components as an array, x, y, z.
    pub fn components(&self) -> [&DMatrix<Complex64>; 3] {
        [&self.lx, &self.ly, &self.lz]
    }
}
