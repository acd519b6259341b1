use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DVector, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CouplingError, Result};
use crate::specfun::AngularMomentumMatrices;

type Cache = RwLock<HashMap<u32, Arc<AngularMomentumMatrices>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Spin-l matrices, built once per l and shared.
pub fn angular_momentum_matrices(l: u32) -> Result<Arc<AngularMomentumMatrices>> {
    if let Some(m) = cache().read().unwrap_or_else(|e| e.into_inner()).get(&l) {
        return Ok(Arc::clone(m));
    }
    let built = Arc::new(AngularMomentumMatrices::new(l)?);
    let mut w = cache().write().unwrap_or_else(|e| e.into_inner());
    Ok(Arc::clone(w.entry(l).or_insert(built)))
}

/// Mean-field optical angular momentum in units of ħ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalAngularMomentum {
    #[serde(rename = "S")]
    pub s: Vector3<f64>,
    pub photon_number: f64,
    pub l: u32,
}

impl OpticalAngularMomentum {
    /// N photons in the single azimuthal mode m.
    pub fn single_mode(l: u32, m: i32, photon_number: f64) -> Result<Self> {
        if m.unsigned_abs() > l {
            return Err(CouplingError::InvalidArgument {
                field: "m",
                reason: format!("|m| must not exceed l = {l}"),
            });
        }
        let mut alpha = vec![Complex64::new(0.0, 0.0); 2 * l as usize + 1];
        alpha[(m + l as i32) as usize] = Complex64::new(photon_number.sqrt(), 0.0);
        optical_s_from_amplitudes(l, &alpha)
    }

    /// The representation bound N √(l(l+1)).
    pub fn bound(&self) -> f64 {
        let l = self.l as f64;
        self.photon_number * (l * (l + 1.0)).sqrt()
    }
}

/// S_i = α† L_i α for coherent amplitudes α_m, m = -l..l in that order.
pub fn optical_s_from_amplitudes(l: u32, alpha: &[Complex64]) -> Result<OpticalAngularMomentum> {
    let expected = 2 * l as usize + 1;
    if alpha.len() != expected {
        return Err(CouplingError::LengthMismatch {
            l,
            expected,
            got: alpha.len(),
        });
    }
    let mats = angular_momentum_matrices(l)?;
    let a = DVector::from_column_slice(alpha);
    let sandwich = |m: &nalgebra::DMatrix<Complex64>| a.dotc(&(m * &a)).re;
    let s = Vector3::new(sandwich(&mats.lx), sandwich(&mats.ly), sandwich(&mats.lz));
    let photon_number = alpha.iter().map(|v| v.norm_sqr()).sum();
    Ok(OpticalAngularMomentum {
        s,
        photon_number,
        l,
    })
}
