use nalgebra::{UnitQuaternion, Vector3};

use super::{DynamicsError, Result};

/// ω for z-y-z Euler angles (α, β, γ) and their rates.
pub fn euler_rates_to_omega(angles: (f64, f64, f64), rates: (f64, f64, f64)) -> Vector3<f64> {
    let (a, b, _) = angles;
    let (da, db, dg) = rates;
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    Vector3::new(dg * sb * ca - db * sa, dg * sb * sa + db * ca, da + dg * cb)
}

/// Canonical angular momentum from the momenta conjugate to (α, β, γ).
pub fn canonical_j(angles: (f64, f64, f64), momenta: (f64, f64, f64)) -> Result<Vector3<f64>> {
    let (a, b, _) = angles;
    let (pa, pb, pg) = momenta;
    let (sb, cb) = b.sin_cos();
    if sb.abs() <= f64::EPSILON {
        return Err(DynamicsError::GimbalLock { beta: b });
    }
    let (sa, ca) = a.sin_cos();
    let cot = cb / sb;
    let csc = 1.0 / sb;
    Ok(Vector3::new(
        -cot * ca * pa - sa * pb + csc * ca * pg,
        -cot * sa * pa + ca * pb + csc * sa * pg,
        pa,
    ))
}

/// Rz(α) Ry(β) Rz(γ).
pub fn orientation_from_euler(angles: (f64, f64, f64)) -> UnitQuaternion<f64> {
    let (a, b, g) = angles;
    UnitQuaternion::from_axis_angle(&Vector3::z_axis(), a)
        * UnitQuaternion::from_axis_angle(&Vector3::y_axis(), b)
        * UnitQuaternion::from_axis_angle(&Vector3::z_axis(), g)
}

/// z-y-z angles with β in [0, π]; at the poles γ is set to zero.
pub fn euler_from_orientation(q: &UnitQuaternion<f64>) -> (f64, f64, f64) {
    let m = q.to_rotation_matrix();
    let m = m.matrix();
    let b = m[(2, 2)].clamp(-1.0, 1.0).acos();
    if b.sin().abs() < 1e-12 {
        // only α ± γ is defined
        let a = if m[(2, 2)] > 0.0 {
            m[(1, 0)].atan2(m[(0, 0)])
        } else {
            (-m[(0, 1)]).atan2(m[(1, 1)])
        };
        return (a, b, 0.0);
    }
    let a = m[(1, 2)].atan2(m[(0, 2)]);
    let g = m[(2, 1)].atan2(-m[(2, 0)]);
    (a, b, g)
}
